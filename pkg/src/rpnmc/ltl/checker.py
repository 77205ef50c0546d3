"""Automata-based LTL model checking with lasso counterexamples.

The negated formula is translated to a Büchi automaton, the product with
the state graph is built breadth-first, and emptiness is decided by a
nested depth-first search. When the product is non-empty the reported
lasso prefers a one-step cycle (typically a deadlock), then the shortest
prefix, which keeps counterexamples small and reproducible.
"""
from __future__ import annotations

import time
from collections import deque
from collections.abc import Callable, Hashable, Iterable
from dataclasses import dataclass, field

from ..firing import enabled_transitions
from ..rules import Configuration, applicable_matches
from ..statespace import DEADLOCK, ActionLabel, StateGraph, StateSpaceExceeded, canonical_key, explore, successors
from .buchi import translate
from .lasso import holds_on_lasso
from .syntax import Atom, Formula, Not, atoms, parse

__all__ = [
    "Verdict",
    "FormulaError",
    "InvalidCounterexample",
    "eval_atom",
    "check_atoms",
    "check_structure",
    "model_check",
    "validate_counterexample",
]


class FormulaError(ValueError):
    """A formula refers to something the model cannot contain."""


class InvalidCounterexample(AssertionError):
    pass


def eval_atom(config: Configuration, atom: Atom, strict_capacity: bool = False) -> bool:
    net = config.net
    if atom.kind == "t-enabled":
        return bool(enabled_transitions(net, strict_capacity))
    if atom.kind == "enabled":
        return bool(enabled_transitions(net, strict_capacity)) or bool(applicable_matches(config))
    places = net.place_map
    for label, pid, count in atom.pattern:
        if pid is not None:
            if pid not in places or places[pid].label != label or net.marking.get(pid, 0) < count:
                return False
        else:
            have = sum(n for p, n in net.marking.items() if places[p].label == label)
            if have < count:
                return False
    return True


def check_atoms(formula: Formula, config: Configuration, semantic: bool = False) -> None:
    """Reject ``reachable`` patterns naming a label no place can ever carry.

    With ``semantic`` set, states that differ only by a renaming of ids are
    merged, so patterns that pin a place id are rejected as well.
    """
    labels = {p.label for p in config.net.places}
    for rule in config.rules:
        labels |= {p.label for p in rule.rhs.places}
    for a in atoms(formula):
        for label, pid, _ in a.pattern:
            if label not in labels:
                raise FormulaError(f"unknown place label {label!r} in {a}")
            if semantic and pid is not None:
                raise FormulaError(f"{a} names place id {pid}, which semantic state identity does not preserve")


# -- generic product search --------------------------------------------------

@dataclass
class _Search:
    holds: bool
    prefix: list[tuple[Hashable, object]] = field(default_factory=list)
    cycle: list[tuple[Hashable, object]] = field(default_factory=list)
    product_states: int = 0
    automaton_states: int = 0


def check_structure(initial: Iterable[Hashable], succ: Callable[[Hashable], list[tuple[object, Hashable]]],
                    evaluate: Callable[[Hashable, Atom], bool], formula: Formula) -> _Search:
    """Model check ``formula`` on an arbitrary total transition system.

    ``succ(s)`` returns ``(label, target)`` pairs and must be non-empty for
    every reachable state. ``evaluate(s, atom)`` gives atom truth values.
    """
    aut = translate(Not(formula))
    cache: dict[tuple, bool] = {}

    def sat(s, q) -> bool:
        for lit in aut.states[q]:
            if isinstance(lit, Not):
                atom, want = lit.arg, False
            elif isinstance(lit, Atom):
                atom, want = lit, True
            else:
                if not lit.value:
                    return False
                continue
            key = (s, atom)
            if key not in cache:
                cache[key] = bool(evaluate(s, atom))
            if cache[key] != want:
                return False
        return True

    # Reachable product, breadth-first.
    init = []
    for s in initial:
        init += [(s, q) for q in aut.initial if sat(s, q)]
    adj: dict[tuple, list[tuple[object, tuple]]] = {}
    parent: dict[tuple, tuple | None] = {p: None for p in init}
    order = list(init)
    queue = deque(init)
    while queue:
        p = queue.popleft()
        s, q = p
        out = []
        for label, s2 in succ(s):
            for q2 in aut.succ[q]:
                if sat(s2, q2):
                    p2 = (s2, q2)
                    out.append((label, p2))
                    if p2 not in parent:
                        parent[p2] = (p, label)
                        order.append(p2)
                        queue.append(p2)
        adj[p] = out

    result = _Search(holds=True, product_states=len(adj), automaton_states=len(aut))
    seed = _nested_dfs(init, adj, aut.accepting)
    if seed is None:
        return result

    # Prefer an accepting self-loop closest to the start.
    loop_state = next((p for p in order if p[1] in aut.accepting and any(t == p for _, t in adj[p])), None)
    if loop_state is not None:
        target = loop_state
        label = next(lab for lab, t in adj[target] if t == target)
        cycle = [(target, label)]
    else:
        target = seed
        cycle = _shortest_cycle(seed, adj)

    prefix = []
    node = target
    while parent[node] is not None:
        prev, label = parent[node]
        prefix.append((prev, label))
        node = prev
    prefix.reverse()
    kprefix = [(p[0], lab) for p, lab in prefix]
    kcycle = [(p[0], lab) for p, lab in cycle]
    # Roll the loop back while the prefix ends with the cycle's last step.
    while kprefix and kprefix[-1] == kcycle[-1]:
        kcycle = [kprefix.pop()] + kcycle[:-1]
    result.holds = False
    result.prefix = kprefix
    result.cycle = kcycle
    return result


def _nested_dfs(init, adj, accepting) -> tuple | None:
    """Return an accepting product state on a reachable cycle, or None."""
    blue: set = set()
    red: set = set()

    def red_search(seed) -> bool:
        stack = [iter(adj[seed])]
        while stack:
            for _, nx in stack[-1]:
                if nx == seed:
                    return True
                if nx not in red:
                    red.add(nx)
                    stack.append(iter(adj[nx]))
                    break
            else:
                stack.pop()
        return False

    for p0 in init:
        if p0 in blue:
            continue
        blue.add(p0)
        stack = [(p0, iter(adj[p0]))]
        while stack:
            p, it = stack[-1]
            for _, nx in it:
                if nx not in blue:
                    blue.add(nx)
                    stack.append((nx, iter(adj[nx])))
                    break
            else:
                stack.pop()
                if p[1] in accepting and red_search(p):
                    return p
    return None


def _shortest_cycle(seed, adj) -> list[tuple[tuple, object]]:
    parent: dict = {}
    queue = deque()
    for label, nx in adj[seed]:
        if nx == seed:
            return [(seed, label)]
        if nx not in parent:
            parent[nx] = (seed, label)
            queue.append(nx)
    while queue:
        p = queue.popleft()
        for label, nx in adj[p]:
            if nx == seed:
                path = [(p, label)]
                while p != seed:
                    prev, lab = parent[p]
                    path.append((prev, lab))
                    p = prev
                path.reverse()
                return path
            if nx not in parent:
                parent[nx] = (p, label)
                queue.append(nx)
    raise AssertionError("seed is not on a cycle")


# -- configurations ----------------------------------------------------------

@dataclass
class Verdict:
    """Outcome of a model-checking run.

    ``prefix`` and ``cycle`` are lists of ``(Configuration, ActionLabel)``;
    each label is the step leaving that configuration, and the last label
    of the cycle leads back to the cycle's first configuration.
    """

    holds: bool
    formula: Formula
    prefix: list[tuple[Configuration, ActionLabel]] = field(default_factory=list)
    cycle: list[tuple[Configuration, ActionLabel]] = field(default_factory=list)
    deadlock_tail: bool = False
    prefix_keys: list[bytes] = field(default_factory=list)
    cycle_keys: list[bytes] = field(default_factory=list)
    states: int = 0
    edges: int = 0
    deadlocks: int = 0
    product_states: int = 0
    elapsed: float = 0.0

    @property
    def counterexample(self):
        if self.holds:
            return None
        return {"prefix": self.prefix, "cycle": self.cycle, "deadlock_tail": self.deadlock_tail}

    @property
    def lasso(self) -> list[tuple[Configuration, ActionLabel]]:
        return self.prefix + self.cycle


def model_check(initial: Configuration, formula: Formula | str, max_states: int = 1_000_000,
                max_depth: int | None = None, semantic: bool = False, strict_capacity: bool = False,
                workers: int = 1, graph: StateGraph | None = None) -> Verdict:
    """Decide whether every path from ``initial`` satisfies ``formula``.

    Raises :class:`StateSpaceExceeded` instead of answering when the
    state graph had to be truncated.
    """
    start = time.perf_counter()
    if isinstance(formula, str):
        formula = parse(formula)
    check_atoms(formula, initial, semantic=semantic if graph is None else graph.semantic)
    if graph is None:
        graph = explore(initial, max_states=max_states, max_depth=max_depth, semantic=semantic,
                        strict_capacity=strict_capacity, workers=workers)
    if graph.truncated:
        raise StateSpaceExceeded(f"state space exceeded after {graph.num_states} states")

    def evaluate(key: bytes, atom: Atom) -> bool:
        if atom.kind == "enabled":
            return key not in graph.deadlocks
        return eval_atom(graph.states[key], atom, graph.strict_capacity)

    search = check_structure([graph.initial], graph.successors, evaluate, formula)
    v = Verdict(holds=search.holds, formula=formula, states=graph.num_states, edges=graph.num_edges,
                deadlocks=len(graph.deadlocks), product_states=search.product_states)
    if not search.holds:
        v.prefix = [(graph.states[k], lab) for k, lab in search.prefix]
        v.cycle = [(graph.states[k], lab) for k, lab in search.cycle]
        v.prefix_keys = [k for k, _ in search.prefix]
        v.cycle_keys = [k for k, _ in search.cycle]
        v.deadlock_tail = len(search.cycle) == 1 and search.cycle[0][1] == DEADLOCK
    v.elapsed = time.perf_counter() - start
    return v


def validate_counterexample(initial: Configuration, verdict: Verdict, semantic: bool = False,
                            strict_capacity: bool = False) -> None:
    """Replay a counterexample from ``initial`` and re-evaluate the formula on it.

    Raises :class:`InvalidCounterexample` on the first discrepancy.
    """
    if verdict.holds:
        raise InvalidCounterexample("verdict holds; nothing to validate")
    if not verdict.cycle:
        raise InvalidCounterexample("empty cycle")
    steps = verdict.lasso

    def key(c):
        return canonical_key(c, semantic=semantic)

    if key(steps[0][0]) != key(initial):
        raise InvalidCounterexample("lasso does not start at the initial configuration")
    cur = initial
    for i, (cfg, label) in enumerate(steps):
        if key(cur) != key(cfg):
            raise InvalidCounterexample(f"step {i}: replayed state differs from the listed one")
        succ = successors(cur, strict_capacity)
        target = steps[i + 1][0] if i + 1 < len(steps) else verdict.cycle[0][0]
        if label == DEADLOCK:
            if succ:
                raise InvalidCounterexample(f"step {i}: deadlock label on a state with successors")
            nxt = cur
        else:
            cands = [c for lab, c in succ if (semantic or lab == label) and key(c) == key(target)]
            if not cands:
                raise InvalidCounterexample(f"step {i}: no successor via {label}")
            nxt = cands[0]
        cur = nxt
    if key(cur) != key(verdict.cycle[0][0]):
        raise InvalidCounterexample("cycle does not close")

    configs = [c for c, _ in steps]
    valuation = [
        (lambda a, c=c: eval_atom(c, a, strict_capacity)) for c in configs
    ]
    if holds_on_lasso(verdict.formula, valuation, len(verdict.prefix)):
        raise InvalidCounterexample("formula holds on the reported lasso")
