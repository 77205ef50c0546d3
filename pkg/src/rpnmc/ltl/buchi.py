"""On-the-fly tableau translation of LTL (negation normal form) to a
generalized Büchi automaton, and its degeneralization.

States of the automaton carry the literals a Kripke state must satisfy
when the automaton *enters* them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import FALSE, TRUE, And, Atom, Const, Formula, Next, Not, Or, Release, Until, nnf

INIT = -1


@dataclass
class _Node:
    id: int
    incoming: set[int]
    new: set[Formula]
    old: set[Formula] = field(default_factory=set)
    next: set[Formula] = field(default_factory=set)


def _is_literal(f: Formula) -> bool:
    return isinstance(f, (Atom, Const)) or (isinstance(f, Not) and isinstance(f.arg, Atom))


def _negated(f: Formula) -> Formula:
    if isinstance(f, Const):
        return Const(not f.value)
    if isinstance(f, Not):
        return f.arg
    return Not(f)


@dataclass
class BuchiAutomaton:
    """Degeneralized Büchi automaton.

    ``states[q]`` is the tuple of literals required on entering ``q``;
    ``succ[q]`` lists successor states; ``initial`` holds the states that
    may be entered first; ``accepting`` is the acceptance set.
    """

    states: dict[int, tuple[Formula, ...]]
    succ: dict[int, list[int]]
    initial: list[int]
    accepting: set[int]

    def __len__(self):
        return len(self.states)


def tableau(f: Formula) -> tuple[list[_Node], list[Until]]:
    """Expand an NNF formula into tableau nodes (generalized automaton)."""
    nodes: list[_Node] = []
    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0]

    work = [_Node(fresh(), {INIT}, {f})]
    while work:
        node = work.pop()
        if not node.new:
            for nd in nodes:
                if nd.old == node.old and nd.next == node.next:
                    nd.incoming |= node.incoming
                    break
            else:
                nodes.append(node)
                work.append(_Node(fresh(), {node.id}, set(node.next)))
            continue
        g = min(node.new, key=str)  # deterministic node numbering
        node.new.discard(g)
        if g in node.old:
            work.append(node)
            continue
        if _is_literal(g):
            if g == FALSE or _negated(g) in node.old:
                continue
            node.old.add(g)
            work.append(node)
        elif isinstance(g, And):
            node.old.add(g)
            node.new |= {g.left, g.right} - node.old
            work.append(node)
        elif isinstance(g, Next):
            node.old.add(g)
            node.next.add(g.arg)
            work.append(node)
        elif isinstance(g, (Or, Until, Release)):
            if isinstance(g, Or):
                new1, next1, new2 = {g.left}, set(), {g.right}
            elif isinstance(g, Until):
                new1, next1, new2 = {g.left}, {g}, {g.right}
            else:
                new1, next1, new2 = {g.right}, {g}, {g.left, g.right}
            old = node.old | {g}
            n1 = _Node(fresh(), set(node.incoming), node.new | (new1 - old), set(old), node.next | next1)
            n2 = _Node(fresh(), set(node.incoming), node.new | (new2 - old), set(old), set(node.next))
            work.append(n2)
            work.append(n1)
        else:
            raise TypeError(f"formula not in negation normal form: {g}")

    untils = sorted({g for nd in nodes for g in nd.old if isinstance(g, Until)}, key=str)
    return nodes, untils


def translate(f: Formula) -> BuchiAutomaton:
    """Büchi automaton accepting exactly the words satisfying ``f``."""
    nodes, untils = tableau(nnf(f))
    ids = sorted(nd.id for nd in nodes)
    literals = {nd.id: tuple(sorted((g for g in nd.old if _is_literal(g) and g != TRUE), key=str))
                for nd in nodes}
    gsucc: dict[int, list[int]] = {i: [] for i in ids}
    for nd in nodes:
        for src in nd.incoming:
            if src != INIT:
                gsucc[src].append(nd.id)
    ginit = sorted(nd.id for nd in nodes if INIT in nd.incoming)
    acc_sets = [{nd.id for nd in nodes if u not in nd.old or u.right in nd.old} for u in untils]

    # Degeneralize: state (q, i) waits for acceptance set i.
    k = max(1, len(acc_sets))
    if not acc_sets:
        acc_sets = [set(ids)]
    index = {(q, i): n for n, (q, i) in enumerate((q, i) for i in range(k) for q in ids)}
    states = {index[(q, i)]: literals[q] for (q, i) in index}
    succ: dict[int, list[int]] = {}
    for (q, i), n in index.items():
        j = (i + 1) % k if q in acc_sets[i] else i
        succ[n] = sorted(index[(q2, j)] for q2 in gsucc[q])
    initial = [index[(q, 0)] for q in ginit]
    accepting = {index[(q, 0)] for q in ids if q in acc_sets[0]}
    return BuchiAutomaton(states, succ, initial, accepting)
