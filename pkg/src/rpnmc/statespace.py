"""Kripke structure over configurations: successor generation, state
identity and breadth-first exploration."""
from __future__ import annotations

import hashlib
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

from .firing import enabled_transitions, fire
from .net import OMEGA, PetriNet
from .rules import Configuration, Match, applicable_matches, apply_rule

__all__ = [
    "ActionLabel",
    "DEADLOCK",
    "StateGraph",
    "StateSpaceExceeded",
    "successors",
    "canonical_key",
    "explore",
]


class StateSpaceExceeded(RuntimeError):
    """The exploration hit its state or depth limit."""


@dataclass(frozen=True)
class ActionLabel:
    """What caused a step: a firing, a rule application, or the implicit
    self-loop of a deadlock."""

    kind: str
    transition: int | None = None
    rule: str | None = None
    match: str | None = None

    @classmethod
    def firing(cls, tid: int) -> ActionLabel:
        return cls("fire", transition=tid)

    @classmethod
    def rewrite(cls, match: Match) -> ActionLabel:
        return cls("rule", rule=match.rule_name, match=match.digest)

    def __str__(self):
        if self.kind == "fire":
            return f"'fire T{self.transition}"
        if self.kind == "rule":
            return f"'{self.rule} [{self.match}]"
        return self.kind

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.transition is not None:
            out["transition"] = self.transition
        if self.rule is not None:
            out["rule"] = self.rule
            out["match"] = self.match
        return out


DEADLOCK = ActionLabel("deadlock")


def successors(config: Configuration, strict_capacity: bool = False) -> list[tuple[ActionLabel, Configuration]]:
    """All one-step successors: firings by ascending transition id, then rule
    applications by rule name and match order."""
    out = [(ActionLabel.firing(t), config.with_net(fire(config.net, t, strict_capacity)))
           for t in enabled_transitions(config.net, strict_capacity)]
    for m in applicable_matches(config):
        out.append((ActionLabel.rewrite(m), apply_rule(config, m)))
    return out


# -- state identity ----------------------------------------------------------

def _cap(c) -> str:
    return "w" if c is OMEGA else str(c)


def _net_text(net: PetriNet, pid=None, tid=None) -> str:
    pid = pid or (lambda x: x)
    tid = tid or (lambda x: x)
    places = sorted((pid(p.id), p.label, _cap(p.capacity)) for p in net.places)
    trans = sorted((tid(t.id), t.label) for t in net.transitions)
    pre = sorted((tid(t), tuple(sorted((pid(p), n) for p, n in m.items()))) for t, m in net.pre.items())
    post = sorted((tid(t), tuple(sorted((pid(p), n) for p, n in m.items()))) for t, m in net.post.items())
    marking = sorted((pid(p), n) for p, n in net.marking.items())
    return repr((places, trans, pre, post, marking))


def rule_digest(rules) -> str:
    text = "|".join(f"{r.name}:{_net_text(r.lhs)}:{_net_text(r.rhs)}" for r in sorted(rules, key=lambda r: r.name))
    return hashlib.sha1(text.encode()).hexdigest()[:16]


def _canonical_order(net: PetriNet) -> tuple[dict[int, int], dict[int, int]]:
    """Relabel ids by colour refinement followed by breadth-first numbering.

    Isomorphic nets usually get the same numbering; ties between
    indistinguishable elements fall back to the original ids, so the
    result is deterministic but not a perfect canonical form.
    """
    colour = {("p", p.id): (0, p.label, _cap(p.capacity), net.marking.get(p.id, 0)) for p in net.places}
    colour.update({("t", t.id): (1, t.label) for t in net.transitions})
    nbrs: dict[tuple, list[tuple]] = {k: [] for k in colour}
    for t, m in net.pre.items():
        for p, n in m.items():
            nbrs[("t", t)].append(("in", n, ("p", p)))
            nbrs[("p", p)].append(("out", n, ("t", t)))
    for t, m in net.post.items():
        for p, n in m.items():
            nbrs[("t", t)].append(("out", n, ("p", p)))
            nbrs[("p", p)].append(("in", n, ("t", t)))

    def compress(c):
        ranks = {v: i for i, v in enumerate(sorted(set(c.values()), key=repr))}
        return {k: ranks[v] for k, v in c.items()}

    colour = compress(colour)
    for _ in range(len(colour)):
        refined = compress({k: (colour[k], tuple(sorted((d, n, colour[x]) for d, n, x in nbrs[k])))
                            for k in colour})
        if len(set(refined.values())) == len(set(colour.values())):
            colour = refined
            break
        colour = refined

    order: list[tuple] = []
    placed: set[tuple] = set()
    for start in sorted(colour, key=lambda k: (colour[k], k)):
        if start in placed:
            continue
        placed.add(start)
        queue = deque([start])
        while queue:
            k = queue.popleft()
            order.append(k)
            for _, _, x in sorted(nbrs[k], key=lambda e: (colour[e[2]], e[0], e[1], e[2])):
                if x not in placed:
                    placed.add(x)
                    queue.append(x)
    pid = {k[1]: i for i, k in enumerate(k for k in order if k[0] == "p")}
    tid = {k[1]: i for i, k in enumerate(k for k in order if k[0] == "t")}
    return pid, tid


def canonical_key(config: Configuration, semantic: bool = False, _rules_digest: str | None = None) -> bytes:
    """Byte string identifying a configuration as a Kripke state.

    By default the key covers the net with its concrete ids, the rules,
    ``max_id``, the step size and both pools. With ``semantic=True`` only
    the net is encoded, after renumbering its ids, so configurations that
    differ just in id choice or pool contents may collapse.
    """
    digest = _rules_digest or rule_digest(config.rules)
    if semantic:
        pid, tid = _canonical_order(config.net)
        return f"S|{digest}|{_net_text(config.net, pid.__getitem__, tid.__getitem__)}".encode()
    return (f"T|{digest}|{_net_text(config.net)}|{config.max_id}|{config.step_size}|"
            f"{config.place_pool.available}|{config.transition_pool.available}").encode()


def key_digest(key: bytes) -> str:
    return hashlib.sha1(key).hexdigest()[:12]


# -- exploration -------------------------------------------------------------

@dataclass
class StateGraph:
    """Explored part of the Kripke structure.

    Deadlock states have no entries in ``edges``; the implicit self-loop
    that makes the structure total is added by :meth:`successors`.
    """

    initial: bytes
    states: dict[bytes, Configuration] = field(default_factory=dict)
    edges: dict[bytes, list[tuple[ActionLabel, bytes]]] = field(default_factory=dict)
    deadlocks: set[bytes] = field(default_factory=set)
    depth: dict[bytes, int] = field(default_factory=dict)
    truncated: bool = False
    semantic: bool = False
    strict_capacity: bool = False
    elapsed: float = 0.0

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_edges(self) -> int:
        return sum(len(v) for v in self.edges.values())

    def successors(self, key: bytes) -> list[tuple[ActionLabel, bytes]]:
        """Outgoing edges, with deadlocks looping to themselves."""
        if key in self.deadlocks:
            return [(DEADLOCK, key)]
        return self.edges.get(key, [])

    def index(self) -> dict[bytes, int]:
        """Discovery order number of every state."""
        return {k: i for i, k in enumerate(self.states)}

    def to_text(self) -> str:
        idx = self.index()
        lines = [f"states {self.num_states} edges {self.num_edges} deadlocks {len(self.deadlocks)}"
                 f" truncated {str(self.truncated).lower()}"]
        for k, cfg in self.states.items():
            tag = " deadlock" if k in self.deadlocks else ""
            lines.append(f"state {idx[k]} {key_digest(k)} [{cfg.net.describe()}]{tag}")
        for k, out in self.edges.items():
            for label, dst in out:
                lines.append(f"edge {idx[k]} {idx[dst]} {label}")
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        idx = self.index()
        lines = ["digraph statespace {", "  node [shape=box, fontname=monospace];"]
        for k, cfg in self.states.items():
            attrs = f'label="{key_digest(k)}\\n{cfg.net.describe()}"'
            if k == self.initial:
                attrs += ", penwidth=2"
            if k in self.deadlocks:
                attrs += ", color=red"
            lines.append(f"  s{idx[k]} [{attrs}];")
        for k, out in self.edges.items():
            for label, dst in out:
                text = str(label).replace('"', '\\"')
                lines.append(f'  s{idx[k]} -> s{idx[dst]} [label="{text}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _expand(config: Configuration, strict_capacity: bool):
    return successors(config, strict_capacity)


def explore(initial: Configuration, max_states: int = 1_000_000, max_depth: int | None = None,
            semantic: bool = False, strict_capacity: bool = False, workers: int = 1) -> StateGraph:
    """Breadth-first construction of the reachable state graph.

    Stops at ``max_states`` states or ``max_depth`` steps and then sets
    ``truncated``. With ``workers > 1`` each BFS layer is expanded in a
    process pool; the graph is identical to the single-worker one.
    """
    if max_states < 1 or (max_depth is not None and max_depth < 0):
        raise ValueError("limits must be positive")
    start = time.perf_counter()
    digest = rule_digest(initial.rules)
    key_of = partial(canonical_key, semantic=semantic, _rules_digest=digest)

    k0 = key_of(initial)
    g = StateGraph(initial=k0, semantic=semantic, strict_capacity=strict_capacity)
    g.states[k0] = initial
    g.depth[k0] = 0
    layer = [k0]
    depth = 0
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        while layer:
            if max_depth is not None and depth >= max_depth:
                # Unexpanded frontier: only a truncation if something lies beyond it.
                for k in layer:
                    if successors(g.states[k], strict_capacity):
                        g.truncated = True
                        break
                break
            configs = [g.states[k] for k in layer]
            if pool is not None:
                expanded = list(pool.map(partial(_expand, strict_capacity=strict_capacity), configs,
                                         chunksize=max(1, len(configs) // (4 * workers))))
            else:
                expanded = [successors(c, strict_capacity) for c in configs]
            next_layer = []
            for k, succ in zip(layer, expanded):
                if not succ:
                    g.deadlocks.add(k)
                    continue
                out = []
                for label, cfg in succ:
                    sk = key_of(cfg)
                    if sk not in g.states:
                        if len(g.states) >= max_states:
                            g.truncated = True
                            continue
                        g.states[sk] = cfg
                        g.depth[sk] = depth + 1
                        next_layer.append(sk)
                    out.append((label, sk))
                g.edges[k] = out
            layer = next_layer
            depth += 1
    finally:
        if pool is not None:
            pool.shutdown()
    g.elapsed = time.perf_counter() - start
    return g
