"""Ready-made nets and rules: the running example N1, the rules r1/r2/r3,
the dangling-condition example N2 and the scalable circle nets."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .net import PetriNet, Place, Transition
from .rules import Rule


def fixture_path(name: str) -> Path:
    """Path of a PNML file shipped in ``rpnmc/data``."""
    return Path(str(resources.files("rpnmc") / "data" / name))


def n1(marking=(3, 4)) -> PetriNet:
    """Three-place cycle A4 -T5-> A3 -T7-> A2 -T6-> A4.

    The default marking A3 + A4 is the one the model-checking runs start
    from; pass ``(2, 4)`` for the variant with tokens on A2 and A4.
    """
    return PetriNet.build(
        [Place("A", 2), Place("A", 3), Place("A", 4)],
        [Transition("T", 5), Transition("T", 6), Transition("T", 7)],
        [("p", 4, 5), ("t", 5, 3),
         ("p", 2, 6), ("t", 6, 4),
         ("p", 3, 7), ("t", 7, 2)],
        marking=list(marking),
    )


def _reverse_rule(name: str, marked: int) -> Rule:
    lhs = PetriNet.build([Place("A", 17), Place("A", 20)], [Transition("T", 24)],
                         [("p", 17, 24), ("t", 24, 20)], marking=[marked])
    rhs = PetriNet.build([Place("A", 17), Place("A", 20)], [Transition("T", 26)],
                         [("p", 20, 26), ("t", 26, 17)], marking=[marked])
    return Rule(name, lhs, rhs)


def r1() -> Rule:
    """Reverse an A -T-> A transition whose input place is marked."""
    return _reverse_rule("r1", 17)


def r2() -> Rule:
    """Reverse an A -T-> A transition whose output place is marked."""
    return _reverse_rule("r2", 20)


def n2() -> PetriNet:
    """Two marked branches A -T-> A; the lower one has an extra transition
    consuming from its last place."""
    return PetriNet.build(
        [Place("A", 1), Place("A", 2), Place("A", 3), Place("A", 4)],
        [Transition("T", 5), Transition("T", 6), Transition("T", 7)],
        [("p", 1, 5), ("t", 5, 2),
         ("p", 3, 6), ("t", 6, 4),
         ("p", 4, 7)],
        marking=[1, 3],
    )


def r3() -> Rule:
    """Delete the output place of a marked A -T-> A; the transition is
    replaced by one without output."""
    lhs = PetriNet.build([Place("A", 1), Place("A", 2)], [Transition("T", 3)],
                         [("p", 1, 3), ("t", 3, 2)], marking=[1])
    rhs = PetriNet.build([Place("A", 1)], [Transition("T", 4)], [("p", 1, 4)], marking=[1])
    return Rule("r3", lhs, rhs)


def circle_net(n: int, tokens: int = 1, place_label: str = "P", transition_label: str = "T") -> PetriNet:
    """Ring P1 -> T -> P2 -> ... -> Pn -> T -> P1 with ``tokens`` tokens on P1.

    Places have ids ``1..n`` and transitions ``n+1..2n``.
    """
    if n < 1:
        raise ValueError("a circle needs at least one place")
    places = [Place(place_label, i) for i in range(1, n + 1)]
    transitions = [Transition(transition_label, n + i) for i in range(1, n + 1)]
    arcs = []
    for i in range(1, n + 1):
        arcs.append(("p", i, n + i))
        arcs.append(("t", n + i, i % n + 1))
    return PetriNet.build(places, transitions, arcs, marking=[1] * tokens)
