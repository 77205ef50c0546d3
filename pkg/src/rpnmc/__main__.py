"""Allow ``python -m rpnmc``."""
import sys

from rpnmc.cli import main

sys.exit(main())
