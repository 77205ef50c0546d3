"""Walk through the N1 example: fire, rewrite, and find the deadlock.

Run with ``python3 demos/deadlock_walkthrough.py``.
"""
from __future__ import annotations

from rpnmc.catalog import n1, r1, r2
from rpnmc.firing import enabled_transitions, fire
from rpnmc.ltl import model_check
from rpnmc.maude import render_counterexample
from rpnmc.rules import Configuration, applicable_matches, apply_rule


def main() -> None:
    net = n1()
    print("N1 starts with", net.describe())
    print("enabled transitions:", enabled_transitions(net))
    after = fire(net, 5)
    print("after firing T5:", after.describe())

    config = Configuration.initial(net, [r1()])
    matches = applicable_matches(config)
    print(f"r1 has {len(matches)} applicable match(es) on N1")
    rewritten = apply_rule(config, matches[0])
    print("after applying r1 once, transitions are",
          [(t.id, dict(rewritten.net.pre_of(t.id)), dict(rewritten.net.post_of(t.id)))
           for t in rewritten.net.transitions])

    verdict = model_check(config, "[]<> enabled")
    print(f"\n[]<> enabled with r1: {'holds' if verdict.holds else 'violated'} "
          f"({verdict.states} states)")
    for state, label in verdict.lasso:
        print(f"  {state.net.describe():<12} --{label}-->")

    print("\nThe same counterexample in Maude's result syntax (first lines):")
    print("\n".join(render_counterexample(verdict).splitlines()[:8]))

    fixed = model_check(Configuration.initial(n1(), [r2()]), "[]<> enabled")
    print(f"\n[]<> enabled with r2: {'holds' if fixed.holds else 'violated'} ({fixed.states} states)")


if __name__ == "__main__":
    main()
