"""Net transformation rules: matching, the gluing condition, rule application
and the recycled identifier pools.

A :class:`Rule` is a pair of nets ``(lhs, rhs)`` over rule-local ids. An id
occurring on both sides denotes a preserved element (the interface), ids
only in ``lhs`` are deleted and ids only in ``rhs`` are created.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

from .net import OMEGA, Marking, PetriNet, Place, Transition, capacity_ok, marking_add, marking_sub, validate_net

__all__ = [
    "Rule",
    "Match",
    "IdPool",
    "Configuration",
    "GluingError",
    "PoolError",
    "find_matches",
    "identification_ok",
    "dangling_ok",
    "deleted_marking_ok",
    "gluing_failure",
    "applicable_matches",
    "apply_rule",
    "pool_acquire",
    "pool_release",
]

DEFAULT_STEP_SIZE = 10


class GluingError(ValueError):
    """A rule was applied at a match that violates an applicability condition."""

    def __init__(self, condition: str, detail: str = ""):
        msg = f"gluing condition violated: {condition}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.condition = condition


class PoolError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Rule:
    name: str
    lhs: PetriNet
    rhs: PetriNet

    @cached_property
    def preserved_places(self) -> frozenset[int]:
        return frozenset(self.lhs.place_map) & frozenset(self.rhs.place_map)

    @cached_property
    def preserved_transitions(self) -> frozenset[int]:
        return frozenset(self.lhs.transition_map) & frozenset(self.rhs.transition_map)

    @cached_property
    def deleted_places(self) -> tuple[int, ...]:
        return tuple(p.id for p in self.lhs.places if p.id not in self.rhs.place_map)

    @cached_property
    def deleted_transitions(self) -> tuple[int, ...]:
        return tuple(t.id for t in self.lhs.transitions if t.id not in self.rhs.transition_map)

    @cached_property
    def created_places(self) -> tuple[int, ...]:
        return tuple(p.id for p in self.rhs.places if p.id not in self.lhs.place_map)

    @cached_property
    def created_transitions(self) -> tuple[int, ...]:
        return tuple(t.id for t in self.rhs.transitions if t.id not in self.lhs.transition_map)

    @cached_property
    def identification_ok(self) -> bool:
        return identification_ok(self)

    def __eq__(self, other):
        if not isinstance(other, Rule):
            return NotImplemented
        return self.name == other.name and self.lhs == other.lhs and self.rhs == other.rhs

    __hash__ = None

    def __repr__(self):
        return f"Rule({self.name!r})"


@dataclass(frozen=True)
class Match:
    """An injective embedding of a rule's left-hand side into a host net.

    ``place_map`` and ``transition_map`` are sorted tuples of
    ``(rule id, host id)`` pairs.
    """

    rule: Rule = field(compare=False, hash=False, repr=False)
    place_map: tuple[tuple[int, int], ...]
    transition_map: tuple[tuple[int, int], ...]
    rule_name: str = ""

    def __post_init__(self):
        if not self.rule_name:
            object.__setattr__(self, "rule_name", self.rule.name)

    @cached_property
    def places(self) -> dict[int, int]:
        return dict(self.place_map)

    @cached_property
    def transitions(self) -> dict[int, int]:
        return dict(self.transition_map)

    @property
    def digest(self) -> str:
        """Stable text form, e.g. ``t24->5,p17->4,p20->3``."""
        parts = [f"t{a}->{b}" for a, b in self.transition_map]
        parts += [f"p{a}->{b}" for a, b in self.place_map]
        return ",".join(parts)

    def sort_key(self) -> tuple:
        return (tuple(b for _, b in self.transition_map), tuple(b for _, b in self.place_map))


# -- identifier pools --------------------------------------------------------

@dataclass(frozen=True)
class IdPool:
    """Ordered list of recycled identifiers for one element kind."""

    kind: str
    available: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("place", "transition"):
            raise ValueError(f"pool kind must be 'place' or 'transition', not {self.kind!r}")
        if len(set(self.available)) != len(self.available):
            raise PoolError(f"duplicate ids in {self.kind} pool: {self.available}")

    def __len__(self):
        return len(self.available)


def pool_acquire(pool: IdPool, max_id: int, step_size: int) -> tuple[int, IdPool, int]:
    """Take the first free id. An empty pool is refilled with
    ``max_id + 1 .. max_id + step_size`` first.

    Returns ``(id, remaining pool, new max id)``.
    """
    if step_size < 1:
        raise ValueError("step size must be at least 1")
    available = pool.available
    if not available:
        available = tuple(range(max_id + 1, max_id + step_size + 1))
        max_id += step_size
    return available[0], IdPool(pool.kind, available[1:]), max_id


def pool_release(pool: IdPool, ident: int) -> IdPool:
    """Put ``ident`` back at the front of the pool."""
    if ident in pool.available:
        raise PoolError(f"id {ident} is already in the {pool.kind} pool")
    return IdPool(pool.kind, (ident,) + pool.available)


# -- configuration -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Configuration:
    """One state of the reconfigurable net: the net, its rules, the highest
    id handed out so far, the pool refill size and the two id pools."""

    net: PetriNet
    rules: tuple[Rule, ...] = ()
    max_id: int = 0
    step_size: int = DEFAULT_STEP_SIZE
    place_pool: IdPool = IdPool("place")
    transition_pool: IdPool = IdPool("transition")

    def __post_init__(self):
        if self.step_size < 1:
            raise ValueError("step size must be at least 1")
        object.__setattr__(self, "rules", tuple(self.rules))

    @classmethod
    def initial(cls, net: PetriNet, rules=(), step_size: int = DEFAULT_STEP_SIZE,
                max_id: int | None = None, prefill: bool = True) -> Configuration:
        """Initial configuration for ``net``.

        ``max_id`` defaults to the largest id in the net. With ``prefill``
        both pools start with ``max_id + 1 .. max_id + step_size``.
        """
        if max_id is None:
            ids = [p.id for p in net.places] + [t.id for t in net.transitions]
            max_id = max(ids, default=0)
        place_pool, transition_pool = IdPool("place"), IdPool("transition")
        if prefill:
            fresh = tuple(range(max_id + 1, max_id + step_size + 1))
            place_pool, transition_pool = IdPool("place", fresh), IdPool("transition", fresh)
            max_id += step_size
        rules = tuple(sorted(rules, key=lambda r: r.name))
        return cls(net, rules, max_id, step_size, place_pool, transition_pool)

    def with_net(self, net: PetriNet) -> Configuration:
        return replace(self, net=net)

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def __repr__(self):
        return (f"Configuration({self.net!r}, rules={[r.name for r in self.rules]}, "
                f"max_id={self.max_id}, step_size={self.step_size})")


# -- matching ------------------------------------------------------------------

def _arc_image(m: Marking, places: dict[int, int]) -> dict[int, int]:
    return {places[p]: n for p, n in m.items()}


def find_matches(net: PetriNet, rule: Rule) -> list[Match]:
    """All injective, label-, capacity-, arc- and marking-preserving
    embeddings of ``rule.lhs`` into ``net``, sorted by host ids.

    A matched transition must have exactly the (mapped) pre- and post-sets
    it has in the rule. Matched places keep any additional arcs; whether
    that is allowed is decided later by the dangling condition.
    """
    lhs = rule.lhs
    if len(lhs.places) > len(net.places) or len(lhs.transitions) > len(net.transitions):
        return []

    # Variable order: each rule transition followed by its not-yet-ordered
    # neighbourhood, then isolated places.
    order: list[tuple[str, int]] = []
    seen: set[int] = set()
    for t in lhs.transitions:
        order.append(("t", t.id))
        for pid in sorted(set(lhs.pre_of(t.id)) | set(lhs.post_of(t.id))):
            if pid not in seen:
                seen.add(pid)
                order.append(("p", pid))
    for p in lhs.places:
        if p.id not in seen:
            order.append(("p", p.id))

    # A transition constraint can be checked once its last neighbour is bound.
    checks_at: dict[int, list[int]] = {}
    for t in lhs.transitions:
        nb = set(lhs.pre_of(t.id)) | set(lhs.post_of(t.id))
        last = max((i for i, (k, x) in enumerate(order) if (k == "t" and x == t.id) or (k == "p" and x in nb)))
        checks_at.setdefault(last, []).append(t.id)

    host_places_by_key: dict[tuple, list[int]] = {}
    for p in net.places:
        host_places_by_key.setdefault((p.label, p.capacity), []).append(p.id)
    host_trans_by_label: dict[str, list[int]] = {}
    for t in net.transitions:
        host_trans_by_label.setdefault(t.label, []).append(t.id)

    pmap: dict[int, int] = {}
    tmap: dict[int, int] = {}
    used_p: set[int] = set()
    used_t: set[int] = set()
    results: list[Match] = []

    def candidates(kind: str, rid: int) -> list[int]:
        if kind == "t":
            return host_trans_by_label.get(lhs.transition(rid).label, [])
        rp = lhs.place(rid)
        cands = host_places_by_key.get((rp.label, rp.capacity), [])
        need = lhs.marking.get(rid, 0)
        # Restrict to the neighbourhood of an already-bound adjacent transition.
        for t_rule, t_host in tmap.items():
            if rid in lhs.pre_of(t_rule) or rid in lhs.post_of(t_rule):
                nb = set(net.pre_of(t_host)) | set(net.post_of(t_host))
                cands = [c for c in cands if c in nb]
                break
        return [c for c in cands if net.marking.get(c, 0) >= need]

    def transition_ok(t_rule: int) -> bool:
        t_host = tmap[t_rule]
        return (_arc_image(lhs.pre_of(t_rule), pmap) == dict(net.pre_of(t_host).items())
                and _arc_image(lhs.post_of(t_rule), pmap) == dict(net.post_of(t_host).items()))

    def search(i: int):
        if i == len(order):
            results.append(Match(rule, tuple(sorted(pmap.items())), tuple(sorted(tmap.items()))))
            return
        kind, rid = order[i]
        table, used = (tmap, used_t) if kind == "t" else (pmap, used_p)
        for h in candidates(kind, rid):
            if h in used:
                continue
            table[rid] = h
            used.add(h)
            if all(transition_ok(t) for t in checks_at.get(i, ())):
                search(i + 1)
            used.discard(h)
            del table[rid]

    search(0)
    results.sort(key=Match.sort_key)
    return results


# -- gluing condition --------------------------------------------------------

def identification_ok(rule: Rule) -> bool:
    """No element may be both deleted and created.

    An id shared by both sides is only a preserved element if it carries the
    same label (and capacity, for places) on both sides and, for
    transitions, the same pre- and post-sets. Otherwise the rule would have
    to delete and re-create it.
    """
    lhs, rhs = rule.lhs, rule.rhs
    for pid in rule.preserved_places:
        if lhs.place(pid) != rhs.place(pid):
            return False
    for tid in rule.preserved_transitions:
        if lhs.transition(tid) != rhs.transition(tid):
            return False
        if lhs.pre_of(tid) != rhs.pre_of(tid) or lhs.post_of(tid) != rhs.post_of(tid):
            return False
    return True


def dangling_ok(net: PetriNet, match: Match) -> bool:
    """Every deleted place's image is only connected to images of deleted transitions."""
    rule = match.rule
    deleted_t = {match.transitions[t] for t in rule.deleted_transitions}
    for pid in rule.deleted_places:
        host = match.places[pid]
        if not net.adjacency.get(host, frozenset()) <= deleted_t:
            return False
    return True


def deleted_marking_ok(net: PetriNet, match: Match) -> bool:
    """A deleted place must hold exactly the tokens the left-hand side accounts for."""
    rule = match.rule
    for pid in rule.deleted_places:
        if net.marking.get(match.places[pid], 0) != rule.lhs.marking.get(pid, 0):
            return False
    return True


def gluing_failure(net: PetriNet, match: Match) -> str | None:
    """Name of the first violated applicability condition, or None."""
    if not match.rule.identification_ok:
        return "identification"
    if not dangling_ok(net, match):
        return "dangling"
    if not deleted_marking_ok(net, match):
        return "marking"
    return None


def applicable_matches(config: Configuration) -> list[Match]:
    """Matches of every rule (in rule-name order) at which the rule can be applied."""
    out = []
    for rule in sorted(config.rules, key=lambda r: r.name):
        if not rule.identification_ok:
            continue
        for m in find_matches(config.net, rule):
            if gluing_failure(config.net, m) is None and _result_capacity_ok(config.net, m):
                out.append(m)
    return out


def _result_capacity_ok(net: PetriNet, match: Match) -> bool:
    rule = match.rule
    if not rule.rhs.marking:
        return True
    base = marking_sub(net.marking, rule.lhs.marking.rename(match.places))
    added = {match.places[p]: n for p, n in rule.rhs.marking.items() if p in match.places}
    for p, n in rule.rhs.marking.items():
        cap = rule.rhs.place(p).capacity
        if p not in match.places and cap is not OMEGA and n > cap:
            return False
    return capacity_ok(base, added, net.place_map)


# -- application -------------------------------------------------------------

def apply_rule(config: Configuration, match: Match) -> Configuration:
    """Transform the configuration's net at ``match``.

    Created elements take fresh ids from the pools first; the ids of
    deleted elements are then released to the front of their pool.
    """
    net, rule = config.net, match.rule
    failure = gluing_failure(net, match)
    if failure is not None:
        raise GluingError(failure, f"rule {rule.name} at {match.digest}")

    max_id, step = config.max_id, config.step_size
    ppool, tpool = config.place_pool, config.transition_pool

    pmap = dict(match.places)
    tmap = dict(match.transitions)
    for pid in rule.created_places:
        pmap[pid], ppool, max_id = pool_acquire(ppool, max_id, step)
    for tid in rule.created_transitions:
        tmap[tid], tpool, max_id = pool_acquire(tpool, max_id, step)

    del_p = {match.places[p] for p in rule.deleted_places}
    del_t = {match.transitions[t] for t in rule.deleted_transitions}
    for hid in sorted(del_p):
        ppool = pool_release(ppool, hid)
    for hid in sorted(del_t):
        tpool = pool_release(tpool, hid)

    places = [p for p in net.places if p.id not in del_p]
    places += [Place(rule.rhs.place(p).label, pmap[p], rule.rhs.place(p).capacity) for p in rule.created_places]
    transitions = [t for t in net.transitions if t.id not in del_t]
    transitions += [Transition(rule.rhs.transition(t).label, tmap[t]) for t in rule.created_transitions]
    pre = {t: m for t, m in net.pre.items() if t not in del_t}
    post = {t: m for t, m in net.post.items() if t not in del_t}
    for t in rule.created_transitions:
        pre[tmap[t]] = rule.rhs.pre_of(t).rename(pmap)
        post[tmap[t]] = rule.rhs.post_of(t).rename(pmap)

    marking = marking_sub(net.marking, rule.lhs.marking.rename(match.places))
    marking = marking_add(marking, rule.rhs.marking.rename(pmap))
    if any(p in del_p for p in marking):
        raise GluingError("marking", "tokens left on a deleted place")
    new_net = PetriNet(tuple(places), tuple(transitions), pre, post, marking)
    place_map = new_net.place_map
    for pid, n in marking.items():
        cap = place_map[pid].capacity
        if cap is not OMEGA and n > cap:
            raise GluingError("capacity", f"place {pid} would hold {n} > {cap}")
    return Configuration(new_net, config.rules, max_id, step, ppool, tpool)


def check_rule(rule: Rule) -> list[str]:
    """Structural problems of either side of a rule."""
    problems = [f"lhs: {v}" for v in validate_net(rule.lhs)]
    problems += [f"rhs: {v}" for v in validate_net(rule.rhs)]
    return problems
