"""The token game: activation and firing of transitions."""
from __future__ import annotations

from .net import PetriNet, capacity_ok, marking_add, marking_leq, marking_sub

__all__ = ["NotActivated", "activation_failure", "is_activated", "fire", "enabled_transitions"]


class NotActivated(ValueError):
    """Firing was requested for a transition that is not activated.

    ``reason`` is ``"tokens"`` (pre-set not covered by the marking) or
    ``"capacity"`` (the post-set would overflow a place).
    """

    def __init__(self, tid: int, reason: str):
        super().__init__(f"transition {tid} is not activated ({reason})")
        self.tid = tid
        self.reason = reason


def activation_failure(net: PetriNet, tid: int, strict_capacity: bool = False) -> str | None:
    """Return why ``tid`` cannot fire, or None when it is activated.

    By default capacities are checked on the marking after the pre-set has
    been consumed, so a self-loop on a full place can still fire. With
    ``strict_capacity`` the post-set is added to the untouched marking.
    """
    if tid not in net.transition_map:
        raise KeyError(f"unknown transition {tid}")
    pre = net.pre_of(tid)
    if not marking_leq(pre, net.marking):
        return "tokens"
    base = net.marking if strict_capacity else marking_sub(net.marking, pre)
    if not capacity_ok(base, net.post_of(tid), net.place_map):
        return "capacity"
    return None


def is_activated(net: PetriNet, tid: int, strict_capacity: bool = False) -> bool:
    return activation_failure(net, tid, strict_capacity) is None


def fire(net: PetriNet, tid: int, strict_capacity: bool = False) -> PetriNet:
    """Fire ``tid`` and return the successor net; ``net`` itself is untouched."""
    reason = activation_failure(net, tid, strict_capacity)
    if reason is not None:
        raise NotActivated(tid, reason)
    m = marking_add(marking_sub(net.marking, net.pre_of(tid)), net.post_of(tid))
    return net.with_marking(m)


def enabled_transitions(net: PetriNet, strict_capacity: bool = False) -> list[int]:
    """Ids of all activated transitions, ascending."""
    return [t.id for t in net.transitions if activation_failure(net, t.id, strict_capacity) is None]
