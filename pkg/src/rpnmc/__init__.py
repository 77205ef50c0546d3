"""Model checking for reconfigurable Petri nets.

A reconfigurable net is a marked place/transition net together with a set
of transformation rules that may rewrite the net while it runs. This
package plays the token game, applies rules under the gluing condition,
explores the reachable configurations and checks LTL properties on them.
"""
from .firing import NotActivated, enabled_transitions, fire, is_activated
from .net import OMEGA, Marking, PetriNet, Place, Transition, capacity_ok, marking_add, marking_leq, marking_sub, validate_net
from .rules import (Configuration, GluingError, IdPool, Match, PoolError, Rule, apply_rule, dangling_ok,
                    deleted_marking_ok, find_matches, identification_ok, pool_acquire, pool_release)
from .statespace import DEADLOCK, ActionLabel, StateGraph, StateSpaceExceeded, canonical_key, explore, successors
from .ltl import Verdict, eval_atom, model_check, parse, validate_counterexample

__version__ = "0.1.0"

__all__ = [
    "OMEGA", "Marking", "PetriNet", "Place", "Transition", "capacity_ok", "marking_add", "marking_leq",
    "marking_sub", "validate_net", "NotActivated", "enabled_transitions", "fire", "is_activated",
    "Configuration", "GluingError", "IdPool", "Match", "PoolError", "Rule", "apply_rule", "dangling_ok",
    "deleted_marking_ok", "find_matches", "identification_ok", "pool_acquire", "pool_release",
    "DEADLOCK", "ActionLabel", "StateGraph", "StateSpaceExceeded", "canonical_key", "explore", "successors",
    "Verdict", "eval_atom", "model_check", "parse", "validate_counterexample",
]
