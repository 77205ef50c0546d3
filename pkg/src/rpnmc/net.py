"""Marked Petri nets with place capacities, and the multiset algebra on markings.

Markings are count maps ``place id -> tokens``. Nets are immutable values;
every operation that "changes" a net returns a new one.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType

__all__ = [
    "OMEGA",
    "OMEGA_LITERAL",
    "Marking",
    "MarkingUnderflow",
    "Place",
    "Transition",
    "PetriNet",
    "marking_leq",
    "marking_add",
    "marking_sub",
    "capacity_ok",
    "validate_net",
]

# Integer used for unbounded capacities in rendered Maude terms.
OMEGA_LITERAL = 2147483647


class _Omega:
    """Unbounded capacity. Compares greater than every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OMEGA"

    def __reduce__(self):
        return (_Omega, ())

    def __int__(self):
        return OMEGA_LITERAL

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


OMEGA = _Omega()


class MarkingUnderflow(ValueError):
    """Raised when subtracting a multiset that is not contained in the minuend."""


class Marking(Mapping):
    """Immutable multiset of places, stored as ``{place_id: count}``.

    Zero counts are never stored, so ``Marking({3: 0}) == Marking()``.
    """

    __slots__ = ("_counts", "_hash")

    def __init__(self, counts: Mapping[int, int] | Iterable[int] | None = None):
        data: dict[int, int] = {}
        if counts is None:
            pass
        elif isinstance(counts, Mapping):
            for pid, n in counts.items():
                if n < 0:
                    raise ValueError(f"negative token count {n} for place {pid}")
                if n:
                    data[pid] = data.get(pid, 0) + n
        else:
            for pid in counts:
                data[pid] = data.get(pid, 0) + 1
        self._counts = dict(sorted(data.items()))
        self._hash = None

    def __getitem__(self, pid):
        return self._counts[pid]

    def __iter__(self) -> Iterator[int]:
        return iter(self._counts)

    def __len__(self):
        return len(self._counts)

    def __contains__(self, pid):
        return pid in self._counts

    def get(self, pid, default=0):
        return self._counts.get(pid, default)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._counts.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Marking):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self._counts == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __repr__(self):
        body = ", ".join(f"{p}: {n}" for p, n in self._counts.items())
        return f"Marking({{{body}}})"

    def __add__(self, other: Marking) -> Marking:
        return marking_add(self, other)

    def __sub__(self, other: Marking) -> Marking:
        return marking_sub(self, other)

    def __le__(self, other: Marking) -> bool:
        return marking_leq(self, other)

    def __ge__(self, other: Marking) -> bool:
        return marking_leq(other, self)

    @property
    def total(self) -> int:
        """Total number of tokens."""
        return sum(self._counts.values())

    def items(self):
        return self._counts.items()

    def elements(self) -> list[int]:
        """Expand into a sorted list with one entry per token."""
        return [pid for pid, n in self._counts.items() for _ in range(n)]

    def rename(self, mapping: Mapping[int, int]) -> Marking:
        """Push the multiset forward along an id map (ids missing from it are kept)."""
        out: dict[int, int] = {}
        for pid, n in self._counts.items():
            q = mapping.get(pid, pid)
            out[q] = out.get(q, 0) + n
        return Marking(out)


EMPTY = Marking()


def marking_leq(a: Mapping[int, int], b: Mapping[int, int]) -> bool:
    """True iff every place holds at most as many tokens in ``a`` as in ``b``."""
    return all(n <= b.get(pid, 0) for pid, n in a.items())


def marking_add(a: Mapping[int, int], b: Mapping[int, int]) -> Marking:
    out = dict(a)
    for pid, n in b.items():
        out[pid] = out.get(pid, 0) + n
    return Marking(out)


def marking_sub(a: Mapping[int, int], b: Mapping[int, int]) -> Marking:
    out = dict(a)
    for pid, n in b.items():
        have = out.get(pid, 0)
        if have < n:
            raise MarkingUnderflow(f"place {pid}: cannot remove {n} token(s) from {have}")
        out[pid] = have - n
    return Marking(out)


@dataclass(frozen=True)
class Place:
    label: str
    id: int
    capacity: int | _Omega = OMEGA

    def __post_init__(self):
        if self.capacity is not OMEGA and (not isinstance(self.capacity, int) or self.capacity < 1):
            raise ValueError(f"place {self.id}: capacity must be a positive integer or OMEGA, got {self.capacity!r}")


@dataclass(frozen=True)
class Transition:
    label: str
    id: int


def capacity_ok(m: Mapping[int, int], added: Mapping[int, int], places: Mapping[int, Place]) -> bool:
    """True iff ``m(p) + added(p) <= cap(p)`` for every place ``p`` in ``added``.

    ``places`` maps ids to :class:`Place`. Unbounded places always pass.
    """
    for pid, n in added.items():
        cap = places[pid].capacity
        if cap is OMEGA:
            continue
        if m.get(pid, 0) + n > cap:
            return False
    return True


def _as_marking(value) -> Marking:
    return value if isinstance(value, Marking) else Marking(value)


@dataclass(frozen=True, eq=False)
class PetriNet:
    """A marked place/transition net ``(P, T, pre, post, M, cap)``.

    ``pre`` and ``post`` map transition ids to place multisets. The
    constructor normalises ordering but does not validate; call
    :func:`validate_net` for that.
    """

    places: tuple[Place, ...] = ()
    transitions: tuple[Transition, ...] = ()
    pre: Mapping[int, Marking] = field(default_factory=dict)
    post: Mapping[int, Marking] = field(default_factory=dict)
    marking: Marking = EMPTY

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "places", tuple(sorted(self.places, key=lambda p: p.id)))
        set_(self, "transitions", tuple(sorted(self.transitions, key=lambda t: t.id)))
        set_(self, "pre", MappingProxyType({t: _as_marking(m) for t, m in sorted(self.pre.items())}))
        set_(self, "post", MappingProxyType({t: _as_marking(m) for t, m in sorted(self.post.items())}))
        set_(self, "marking", _as_marking(self.marking))

    def __reduce__(self):
        # Mapping proxies and cached properties do not pickle; rebuild instead.
        return (PetriNet, (self.places, self.transitions, dict(self.pre), dict(self.post), self.marking))

    @classmethod
    def build(cls, places: Iterable[Place], transitions: Iterable[Transition],
              arcs: Iterable[tuple] = (), marking: Mapping[int, int] | Iterable[int] = ()) -> PetriNet:
        """Assemble a net from an arc list.

        Each arc is ``("p", place_id, transition_id[, weight])`` for an input
        arc or ``("t", transition_id, place_id[, weight])`` for an output arc.
        """
        transitions = list(transitions)
        pre: dict[int, dict[int, int]] = {t.id: {} for t in transitions}
        post: dict[int, dict[int, int]] = {t.id: {} for t in transitions}
        for arc in arcs:
            kind, src, dst, *rest = arc
            w = rest[0] if rest else 1
            if kind == "p":
                pre.setdefault(dst, {})
                pre[dst][src] = pre[dst].get(src, 0) + w
            elif kind == "t":
                post.setdefault(src, {})
                post[src][dst] = post[src].get(dst, 0) + w
            else:
                raise ValueError(f"unknown arc kind {kind!r}")
        return cls(tuple(places), tuple(transitions),
                   {t: Marking(m) for t, m in pre.items()},
                   {t: Marking(m) for t, m in post.items()},
                   Marking(marking))

    @cached_property
    def place_map(self) -> Mapping[int, Place]:
        return MappingProxyType({p.id: p for p in self.places})

    @cached_property
    def transition_map(self) -> Mapping[int, Transition]:
        return MappingProxyType({t.id: t for t in self.transitions})

    def place(self, pid: int) -> Place:
        return self.place_map[pid]

    def transition(self, tid: int) -> Transition:
        return self.transition_map[tid]

    def pre_of(self, tid: int) -> Marking:
        return self.pre.get(tid, EMPTY)

    def post_of(self, tid: int) -> Marking:
        return self.post.get(tid, EMPTY)

    @cached_property
    def adjacency(self) -> Mapping[int, frozenset[int]]:
        """Place id -> ids of transitions with an arc to or from it."""
        adj: dict[int, set[int]] = {p.id: set() for p in self.places}
        for tid, m in list(self.pre.items()) + list(self.post.items()):
            for pid in m:
                adj.setdefault(pid, set()).add(tid)
        return MappingProxyType({p: frozenset(ts) for p, ts in adj.items()})

    def with_marking(self, marking: Mapping[int, int]) -> PetriNet:
        return PetriNet(self.places, self.transitions, self.pre, self.post, _as_marking(marking))

    def __eq__(self, other):
        if not isinstance(other, PetriNet):
            return NotImplemented
        return (self.places == other.places and self.transitions == other.transitions
                and dict(self.pre) == dict(other.pre) and dict(self.post) == dict(other.post)
                and self.marking == other.marking)

    __hash__ = None

    def __repr__(self):
        return (f"PetriNet(places={len(self.places)}, transitions={len(self.transitions)}, "
                f"marking={dict(self.marking.items())})")

    def describe(self) -> str:
        """Human-readable marking such as ``A@3 + A@4``."""
        if not self.marking:
            return "(empty)"
        parts = []
        for pid, n in self.marking.items():
            label = self.place_map[pid].label if pid in self.place_map else "?"
            parts.extend([f"{label}@{pid}"] * n)
        return " + ".join(parts)


def validate_net(net: PetriNet) -> list[str]:
    """Return a list of structural problems; an empty list means the net is well formed."""
    violations = []
    seen_p: set[int] = set()
    for p in net.places:
        if p.id in seen_p:
            violations.append(f"duplicate place id {p.id}")
        seen_p.add(p.id)
    seen_t: set[int] = set()
    for t in net.transitions:
        if t.id in seen_t:
            violations.append(f"duplicate transition id {t.id}")
        seen_t.add(t.id)

    for side, table in (("pre", net.pre), ("post", net.post)):
        for tid, m in table.items():
            if tid not in seen_t:
                violations.append(f"{side} entry for unknown transition {tid}")
            for pid in m:
                if pid not in seen_p:
                    violations.append(f"{side}({tid}) references unknown place {pid}")
    for tid in seen_t:
        if tid not in net.pre or tid not in net.post:
            missing = "pre" if tid not in net.pre else "post"
            violations.append(f"transition {tid} has no {missing} entry")

    for pid, n in net.marking.items():
        if pid not in seen_p:
            violations.append(f"marking references unknown place {pid}")
            continue
        cap = net.place_map[pid].capacity
        if cap is not OMEGA and n > cap:
            violations.append(f"place {pid} holds {n} token(s) above capacity {cap}")
    return violations
