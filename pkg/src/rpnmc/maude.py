"""Rendering configurations, rules and verdicts as Maude-style text.

The output follows the term syntax of the rewriting-logic encoding of
reconfigurable nets: ``p("A" | 3 | 2147483647)`` for places, ``t("T" | 5)``
for transitions, ``net(places{..}, transitions{..}, pre{..}, post{..},
marking{..})`` for nets. Elements are always listed by ascending id, so
identical configurations give byte-identical text.

:func:`emit_files` produces the four-module split (``rpn.maude``,
``rules.maude``, ``prop.maude``, ``net.maude``). The generated modules are
meant for reading and for use with an external Maude installation; this
package never executes them.
"""
from __future__ import annotations

import os
import tempfile
from importlib import resources
from pathlib import Path

from .ltl.syntax import Atom, Formula
from .net import OMEGA, OMEGA_LITERAL, Marking, PetriNet, Place
from .rules import Configuration, IdPool, Rule

__all__ = [
    "place_term",
    "transition_term",
    "net_term",
    "rule_term",
    "pool_term",
    "emit_maude",
    "emit_rule_crl",
    "emit_props",
    "emit_files",
    "render_counterexample",
    "MAUDE_FILES",
]

MAUDE_FILES = ("rpn.maude", "rules.maude", "prop.maude", "net.maude")

EMPTY_NET = ("net(places{emptyPlace}, transitions{emptyTransition}, pre{emptyMappingTuple}, "
             "post{emptyMappingTuple}, marking{emptyMarking})")


def _string(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _cap(place: Place) -> int:
    return OMEGA_LITERAL if place.capacity is OMEGA else int(place.capacity)


def place_term(place: Place, ident: str | None = None) -> str:
    return f"p({_string(place.label)} | {place.id if ident is None else ident} | {_cap(place)})"


def transition_term(label: str, ident) -> str:
    return f"t({_string(label)} | {ident})"


class _Names:
    """Maps ids to the identifier text used in a term (numbers or variables)."""

    def __init__(self, place=None, transition=None):
        self.place = place or (lambda pid: str(pid))
        self.transition = transition or (lambda tid: str(tid))


def _parts(net: PetriNet, names: _Names) -> dict[str, list[str]]:
    pm = net.place_map

    def p(pid):
        return place_term(pm[pid], names.place(pid))

    def t(tid):
        return transition_term(net.transition(tid).label, names.transition(tid))

    def tuples(table) -> list[str]:
        out = []
        for tr in net.transitions:
            m = table.get(tr.id, Marking())
            rhs = " + ".join(p(pid) for pid in m.elements()) or "emptyPlace"
            out.append(f"({t(tr.id)} --> {rhs})")
        return out

    return {
        "places": [p(x.id) for x in net.places],
        "transitions": [t(x.id) for x in net.transitions],
        "pre": tuples(net.pre),
        "post": tuples(net.post),
        "marking": [p(pid) for pid in net.marking.elements()],
    }


def _net_from_parts(parts: dict[str, list[str]], rests: dict[str, str] | None = None, indent: str = "") -> str:
    rests = rests or {}
    sep = {"places": " , ", "transitions": " : ", "pre": " , ", "post": " , ", "marking": " ; "}
    empty = {"places": "emptyPlace", "transitions": "emptyTransition", "pre": "emptyMappingTuple",
             "post": "emptyMappingTuple", "marking": "emptyMarking"}
    fields = []
    for key in ("places", "transitions", "pre", "post", "marking"):
        items = list(parts[key])
        if key in rests:
            items.append(rests[key])
        body = sep[key].join(items) if items else empty[key]
        fields.append(f"{key}{{{body}}}")
    inner = f" ,\n{indent}    ".join(fields)
    return f"net({inner})"


def net_term(net: PetriNet, indent: str = "") -> str:
    """The ``net(...)`` term; the empty net renders on one line."""
    if not net.places and not net.transitions:
        if not net.marking:
            return EMPTY_NET
    return _net_from_parts(_parts(net, _Names()), indent=indent)


def rule_term(rule: Rule, indent: str = "") -> str:
    pad = indent + "       "
    return (f"rule(l({net_term(rule.lhs, pad)}) ,\n"
            f"{indent}     r({net_term(rule.rhs, pad)}))")


def pool_term(pool: IdPool | tuple[int, ...]) -> str:
    """Nested-parenthesis list ``26,(27,(28))``, or ``emptyIDSet``."""
    ids = list(pool.available if isinstance(pool, IdPool) else pool)
    if not ids:
        return "emptyIDSet"
    text = str(ids[-1])
    for i in reversed(ids[:-1]):
        text = f"{i},({text})"
    return text


def emit_maude(config: Configuration) -> str:
    """The Configuration term: net, rules, maxID, stepSize and both pools."""
    rules = " |\n".join(rule_term(r, " ") for r in config.rules) or "emptyRule"
    return (f"{net_term(config.net)}\n"
            f" {rules}\n"
            f" {config.max_id}\n"
            f" {config.step_size}\n"
            f" aidPlace{{{pool_term(config.place_pool)}}}\n"
            f" aidTransition{{{pool_term(config.transition_pool)}}}")


# -- rule and property modules -------------------------------------------------

def _var_names(prefix: str) -> _Names:
    return _Names(lambda pid: f"I{prefix}P{pid}", lambda tid: f"I{prefix}T{tid}")


def _rule_parts(rule: Rule) -> tuple[str, str, list[str], list[str], str, str]:
    """Left and right configuration patterns of ``rule`` plus its conditions.

    Returns ``(left, right, gluing, pools, place_pool, transition_pool)``
    where ``gluing`` holds the applicability conditions and ``pools`` the
    id bookkeeping; the last two name the final pool variables.
    """
    lhs, rhs = rule.lhs, rule.rhs
    names = _var_names("r")
    created_p = {pid: f"AidP{k}" for k, pid in enumerate(rule.created_places, 1)}
    created_t = {tid: f"AidT{k}" for k, tid in enumerate(rule.created_transitions, 1)}
    rnames = _Names(lambda pid: created_p.get(pid) or names.place(pid),
                    lambda tid: created_t.get(tid) or names.transition(tid))
    rests = {"places": "PRest", "transitions": "TRest", "pre": "MTupleRest1", "post": "MTupleRest2",
             "marking": "MRest"}
    left = _net_from_parts(_parts(lhs, names), rests, "     ")
    right = _net_from_parts(_parts(rhs, rnames), rests, "     ")

    gluing = []
    pm = lhs.place_map
    for pid in rule.deleted_places:
        pterm = place_term(pm[pid], names.place(pid))
        gluing.append(f"emptyNeighbourForPlace({pterm}, pre{{MTupleRest1}}, post{{MTupleRest2}})")
        gluing.append(f"not contains({pterm} | MRest)")

    pools = []
    final = {}
    n = 0
    for kind, created, pool in (("P", created_p, "AidPRest"), ("T", created_t, "AidTRest")):
        cur = pool
        for var in created.values():
            n += 1
            pools.append(f"{var} := getAid({cur} | MaxID | StepSize)")
            pools.append(f"{pool}{n} := removeFirstElement({cur} | MaxID | StepSize)")
            cur = f"{pool}{n}"
        for ident in (rule.deleted_places if kind == "P" else rule.deleted_transitions):
            n += 1
            var = names.place(ident) if kind == "P" else names.transition(ident)
            pools.append(f"{pool}{n} := addOldID({cur} | {var})")
            cur = f"{pool}{n}"
        final[kind] = cur
    pools.append(f"NewMaxID := correctMaxID(MaxID | StepSize | {len(created_p) + len(created_t)})")
    rterms = [place_term(p, rnames.place(p.id)) for p in rhs.places]
    if rterms:
        marks = " ; ".join(_parts(rhs, rnames)["marking"]) or "emptyMarking"
        pools.append(f"marking{{{marks} ; MRest}} <=? ({' , '.join(rterms)})")
    return left, right, gluing, pools, final["P"], final["T"]


def emit_rule_crl(rule: Rule) -> str:
    """A conditional rewrite rule applying ``rule`` to a configuration.

    Host ids bound to the left-hand side become variables ``IrP<id>`` and
    ``IrT<id>``; created elements take ids from the pools, acquiring all
    of them before the ids of deleted elements are given back.
    """
    left, right, gluing, pools, pool_p, pool_t = _rule_parts(rule)
    cond = " /\\\n        ".join(gluing + pools)
    return (f"  crl [{rule.name.upper()}-PNML] :\n"
            f"     {left}\n"
            f"     Rules MaxID StepSize aidPlace{{AidPRest}} aidTransition{{AidTRest}}\n"
            f"   =>\n"
            f"     {right}\n"
            f"     Rules NewMaxID StepSize aidPlace{{{pool_p}}} aidTransition{{{pool_t}}}\n"
            f"     if {cond} .\n")


def _atom_term(atom: Atom, net: PetriNet) -> str:
    if atom.kind != "reachable":
        return atom.kind
    toks = []
    for label, pid, count in atom.pattern:
        if pid is None:
            ident, cap = "I:Int", "C:Int"
        else:
            ident = str(pid)
            place = net.place_map.get(pid)
            cap = _cap(place) if place is not None else OMEGA_LITERAL
        toks += [f"p({_string(label)} | {ident} | {cap})"] * count
    return f"reachable({' ; '.join(toks)})"


def formula_term(formula: Formula, net: PetriNet) -> str:
    """``formula`` in Maude's LTL syntax with atoms spelled as terms."""
    text = str(formula)
    for atom in sorted({a for a in _atoms(formula)}, key=lambda a: -len(str(a))):
        text = text.replace(str(atom), _atom_term(atom, net))
    return text


def _atoms(f: Formula):
    from .ltl.syntax import subformulas
    return [g for g in subformulas(f) if isinstance(g, Atom)]


def emit_props(config: Configuration, formula: Formula | None = None) -> str:
    lines = [
        "mod RPN-PROP is",
        "  including RPN-RULES .",
        "  including SATISFACTION .",
        "  subsort Configuration < State .",
        "",
        "  var P : Places .  var T : Transitions .  var T1 : Transitions .",
        "  var Pre : Pre .  var Post : Post .  var M : Markings .  var MRest : Markings .",
        "  var PreValue : Places .  var MappingTuple : MappingTuple .",
        "  var Rules : Rule .  vars MaxID StepSize : Int .",
        "  var AidP : IDPoolPlace .  var AidT : IDPoolTransition .",
        "",
        "  op reachable : Markings -> Prop .",
        "  eq net(P , T , Pre , Post , marking{M ; MRest}) Rules MaxID StepSize AidP AidT",
        "     |= reachable(M) = true .",
        "",
        "  op t-enabled : -> Prop .",
        "  eq net(P , T , pre{(T1 --> PreValue) , MappingTuple} , Post , marking{PreValue ; MRest})",
        "     Rules MaxID StepSize AidP AidT |= t-enabled = true .",
        "",
        "  op enabled : -> Prop .",
        "  eq net(P , T , pre{(T1 --> PreValue) , MappingTuple} , Post , marking{PreValue ; MRest})",
        "     Rules MaxID StepSize AidP AidT |= enabled = true .",
    ]
    for rule in config.rules:
        left, _, gluing, _, _, _ = _rule_parts(rule)
        head = "ceq" if gluing else "eq"
        lines += ["", f"  *** {rule.name} is applicable",
                  f"  {head} {left}",
                  "     Rules MaxID StepSize aidPlace{AidPRest} aidTransition{AidTRest}",
                  "     |= enabled = true" + (" if " + " /\\ ".join(gluing) if gluing else "") + " ."]
    lines += ["", "  var C : Configuration .  var Prop : Prop .",
              "  eq C |= Prop = false [owise] ."]
    if formula is not None:
        lines += ["", f"  *** rew modelCheck(initial, {formula_term(formula, config.net)}) ."]
    lines.append("endm")
    return "\n".join(lines) + "\n"


def _rules_module(config: Configuration) -> str:
    body = "\n".join(emit_rule_crl(r) for r in config.rules)
    lines = [
        "mod RPN-RULES is",
        "  including RPN .",
        "",
        "  vars PRest : Places .  var TRest : Transitions .",
        "  vars MTupleRest1 MTupleRest2 : MappingTuple .  var MRest : Markings .",
        "  var Rules : Rule .  vars MaxID NewMaxID StepSize : Int .",
        "  vars AidPRest AidTRest : Int .",
        "",
    ]
    return "\n".join(lines) + body + "endm\n"


def _net_module(config: Configuration) -> str:
    term = emit_maude(config).replace("\n", "\n     ")
    return ("mod NET is\n"
            "  including RPN-PROP .\n"
            "  op initial : -> Configuration .\n"
            f"  eq initial =\n     {term} .\n"
            "endm\n")


def _rpn_module() -> str:
    return resources.files("rpnmc").joinpath("data", "rpn.maude").read_text(encoding="utf-8")


def emit_files(config: Configuration, formula: Formula | None = None) -> dict[str, str]:
    """Contents of the four Maude modules, keyed by file name."""
    return {
        "rpn.maude": _rpn_module(),
        "rules.maude": _rules_module(config),
        "prop.maude": emit_props(config, formula),
        "net.maude": _net_module(config),
    }


def write_files(config: Configuration, out_dir, formula: Formula | None = None) -> list[Path]:
    """Write the four modules into ``out_dir``, each atomically."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in emit_files(config, formula).items():
        fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=out)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, out / name)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        written.append(out / name)
    return written


# -- verdicts ---------------------------------------------------------------------

def _state(config: Configuration, label) -> str:
    body = emit_maude(config).replace("\n", "\n ")
    return f"{{{body}\n ,{label}}}"


def render_counterexample(verdict) -> str:
    """Maude-style result text for a :class:`~rpnmc.ltl.Verdict`."""
    if verdict.holds:
        return "result Bool: true\n"
    prefix = " ".join(_state(c, lab) for c, lab in verdict.prefix) or "nil"
    cycle = " ".join(_state(c, lab) for c, lab in verdict.cycle)
    return f"result ModelCheckResult: counterexample(\n{prefix},\n{cycle})\n"
