"""Time the liveness check on growing ring nets with rule r1 loaded.

Run with ``python3 demos/circle_scaling.py [sizes...]``.
"""
from __future__ import annotations

import sys
import time

from rpnmc.catalog import circle_net, r1
from rpnmc.ltl import model_check
from rpnmc.rules import Configuration


def main(sizes: list[int]) -> None:
    print(f"{'size':>6} {'verdict':>8} {'states':>7} {'product':>8} {'seconds':>8}")
    for n in sizes:
        start = time.perf_counter()
        v = model_check(Configuration.initial(circle_net(n), [r1()]), "[]<> enabled")
        print(f"{n}x{n:<3} {'holds' if v.holds else 'fails':>8} {v.states:>7} "
              f"{v.product_states:>8} {time.perf_counter() - start:>8.3f}")

    # With place labels that r1 can match, the rule reverses an arc and the
    # token gets stuck, so the ring is no longer live.
    v = model_check(Configuration.initial(circle_net(10, place_label="A"), [r1()]), "[]<> enabled")
    print(f"\n10x10 with r1-matchable labels: {'holds' if v.holds else 'fails'}, "
          f"stuck at {v.cycle[-1][0].net.describe()}")


if __name__ == "__main__":
    main([int(a) for a in sys.argv[1:]] or [10, 20, 22, 23])
