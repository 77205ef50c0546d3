"""Convert the N1 fixture and rule r1 into the four Maude modules.

Run with ``python3 demos/emit_maude_modules.py [out_dir]``.
"""
from __future__ import annotations

import sys
from pathlib import Path

from rpnmc.catalog import fixture_path
from rpnmc.ltl import parse
from rpnmc.maude import write_files
from rpnmc.pnml import load_net, load_rule
from rpnmc.rules import Configuration


def main(out_dir: str) -> None:
    net = load_net(fixture_path("n1.pnml"))
    rule = load_rule(fixture_path("r1.rule.pnml"))
    config = Configuration.initial(net, [rule])
    for path in write_files(config, out_dir, parse("[]<> enabled")):
        print(f"{path}: {len(path.read_text().splitlines())} lines")
    print(Path(out_dir, "net.maude").read_text())


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "maude-out")
