"""Reading and writing the PNML subset used for nets and rules.

See ``docs/pnml-subset.md`` for the accepted elements. Graphics and unknown
tool-specific annotations are ignored; structural problems raise
:class:`PnmlError` naming the offending element.
"""
from __future__ import annotations

import os
import re
import xml.etree.ElementTree as ET
from collections.abc import Iterable
from pathlib import Path

from .net import OMEGA, OMEGA_LITERAL, Marking, PetriNet, Place, Transition, validate_net
from .rules import Rule

__all__ = ["PnmlError", "parse_net", "parse_rule", "load_net", "load_rule", "write_net", "write_rule"]

PTNET_TYPE = "http://www.pnml.org/version-2009/grammar/ptnet"
_TRAILING_INT = re.compile(r"(\d+)$")


class PnmlError(ValueError):
    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _children(elem: ET.Element, name: str) -> list[ET.Element]:
    return [c for c in elem if _local(c.tag) == name]


def _child(elem: ET.Element, name: str) -> ET.Element | None:
    found = _children(elem, name)
    return found[0] if found else None


def _text_value(elem: ET.Element | None) -> str | None:
    """Value of a ``<x><text>v</text></x>`` annotation (or bare ``<x>v</x>``)."""
    if elem is None:
        return None
    t = _child(elem, "text")
    value = t.text if t is not None else elem.text
    return value.strip() if value is not None else None


def _int_annotation(elem: ET.Element, name: str, where: str) -> int | None:
    node = _child(elem, name)
    if node is None:
        for ts in _children(elem, "toolspecific"):
            node = _child(ts, name)
            if node is not None:
                break
    value = _text_value(node)
    if value in (None, ""):
        return None
    try:
        return int(value)
    except ValueError:
        raise PnmlError(f"{name} must be an integer, got {value!r}", where) from None


def _root(source) -> ET.Element:
    try:
        if isinstance(source, ET.Element):
            return source
        if isinstance(source, ET.ElementTree):
            return source.getroot()
        if isinstance(source, bytes) or (isinstance(source, str) and source.lstrip().startswith("<")):
            return ET.fromstring(source)
        return ET.parse(os.fspath(source)).getroot()
    except ET.ParseError as exc:
        raise PnmlError(f"malformed XML ({exc})") from None


def _net_elements(net_elem: ET.Element) -> Iterable[ET.Element]:
    """Direct children of the net plus those of its pages (one level)."""
    for c in net_elem:
        if _local(c.tag) == "page":
            yield from c
        else:
            yield c


def _assign_ids(elems: list[ET.Element], kind: str, where: str) -> dict[str, int]:
    """Numeric id per XML id: the trailing integer, or the next free number."""
    out: dict[str, int] = {}
    used: set[int] = set()
    pending = []
    for e in elems:
        xml_id = e.get("id")
        if not xml_id:
            raise PnmlError(f"{kind} without id attribute", where)
        if xml_id in out or xml_id in pending:
            raise PnmlError(f"duplicate id {xml_id!r}", where)
        m = _TRAILING_INT.search(xml_id)
        if m is None:
            pending.append(xml_id)
            continue
        num = int(m.group(1))
        if num in used:
            raise PnmlError(f"duplicate numeric {kind} id {num} (from {xml_id!r})", where)
        used.add(num)
        out[xml_id] = num
    nxt = max(used, default=0) + 1
    for xml_id in pending:
        out[xml_id] = nxt
        nxt += 1
    return out


def _read_net(net_elem: ET.Element) -> tuple[PetriNet, dict[str, int], dict[str, int]]:
    where = f"net {net_elem.get('id', '?')!r}"
    elems = list(_net_elements(net_elem))
    place_elems = [e for e in elems if _local(e.tag) == "place"]
    trans_elems = [e for e in elems if _local(e.tag) == "transition"]
    arc_elems = [e for e in elems if _local(e.tag) == "arc"]

    xml_ids = [e.get("id") for e in place_elems + trans_elems]
    dup = {i for i in xml_ids if xml_ids.count(i) > 1}
    if dup:
        raise PnmlError(f"duplicate id {sorted(dup)[0]!r}", where)
    pids = _assign_ids(place_elems, "place", where)
    tids = _assign_ids(trans_elems, "transition", where)

    places, marking = [], {}
    for e in place_elems:
        loc = f"{where}, place {e.get('id')!r}"
        label = _text_value(_child(e, "name")) or ""
        cap = _int_annotation(e, "capacity", loc)
        if cap is None or cap == OMEGA_LITERAL:
            capacity = OMEGA
        elif cap < 1:
            raise PnmlError(f"capacity must be positive, got {cap}", loc)
        else:
            capacity = cap
        tokens = _int_annotation(e, "initialMarking", loc) or 0
        if tokens < 0:
            raise PnmlError("negative initial marking", loc)
        places.append(Place(label, pids[e.get("id")], capacity))
        if tokens:
            marking[pids[e.get("id")]] = tokens
    transitions = [Transition(_text_value(_child(e, "name")) or "", tids[e.get("id")]) for e in trans_elems]

    pre = {t.id: {} for t in transitions}
    post = {t.id: {} for t in transitions}
    for e in arc_elems:
        loc = f"{where}, arc {e.get('id', '?')!r}"
        src, dst = e.get("source"), e.get("target")
        weight = _int_annotation(e, "inscription", loc)
        if weight is None and e.get("weight") is not None:
            try:
                weight = int(e.get("weight"))
            except ValueError:
                raise PnmlError(f"weight must be an integer, got {e.get('weight')!r}", loc) from None
        weight = 1 if weight is None else weight
        if weight < 1:
            raise PnmlError(f"arc weight must be positive, got {weight}", loc)
        if src in pids and dst in tids:
            table, t, p = pre, tids[dst], pids[src]
        elif src in tids and dst in pids:
            table, t, p = post, tids[src], pids[dst]
        elif src in pids and dst in pids:
            raise PnmlError("arc connects two places", loc)
        elif src in tids and dst in tids:
            raise PnmlError("arc connects two transitions", loc)
        else:
            missing = src if src not in pids and src not in tids else dst
            raise PnmlError(f"arc references unknown node {missing!r}", loc)
        table[t][p] = table[t].get(p, 0) + weight

    net = PetriNet(tuple(places), tuple(transitions),
                   {t: Marking(m) for t, m in pre.items()}, {t: Marking(m) for t, m in post.items()},
                   Marking(marking))
    problems = validate_net(net)
    if problems:
        raise PnmlError(problems[0], where)
    return net, pids, tids


def parse_net(source) -> PetriNet:
    """Parse a PNML document (path, XML text or element) holding one net."""
    root = _root(source)
    nets = [e for e in root.iter() if _local(e.tag) == "net"]
    if not nets:
        raise PnmlError("document contains no <net>")
    if len(nets) > 1:
        raise PnmlError(f"expected one <net>, found {len(nets)}")
    return _read_net(nets[0])[0]


def load_net(path) -> PetriNet:
    return parse_net(Path(path))


def parse_rule(source, name: str | None = None) -> Rule:
    """Parse a rule document with left, interface and right nets.

    Interface elements are linked to both sides by ``<map>`` entries.
    Elements linked through the interface share their left-hand id in
    the resulting :class:`Rule`; elements only on the right keep their own
    id unless it clashes with a left-hand one.
    """
    root = _root(source)
    rule_elem = root if _local(root.tag) == "rule" else next(
        (e for e in root.iter() if _local(e.tag) == "rule"), None)
    if rule_elem is None:
        raise PnmlError("document contains no <rule>")
    rname = name or rule_elem.get("name") or rule_elem.get("id") or "rule"
    where = f"rule {rname!r}"

    sides: dict[str, ET.Element] = {}
    for e in _children(rule_elem, "net"):
        role = (e.get("role") or e.get("id") or "").lower()
        role = {"l": "lhs", "left": "lhs", "k": "interface", "r": "rhs", "right": "rhs"}.get(role, role)
        if role not in ("lhs", "interface", "rhs"):
            raise PnmlError(f"net {e.get('id')!r} has no lhs/interface/rhs role", where)
        if role in sides:
            raise PnmlError(f"two nets with role {role}", where)
        sides[role] = e
    for role in ("lhs", "interface", "rhs"):
        if role not in sides:
            raise PnmlError(f"missing {role} net", where)

    lhs, l_p, l_t = _read_net(sides["lhs"])
    k, k_p, k_t = _read_net(sides["interface"])
    rhs, r_p, r_t = _read_net(sides["rhs"])

    to_l: dict[str, str] = {}
    to_r: dict[str, str] = {}
    for m in rule_elem.iter():
        if _local(m.tag) != "map":
            continue
        kid, lid, rid = m.get("interface"), m.get("lhs"), m.get("rhs")
        if kid is None or lid is None or rid is None:
            raise PnmlError("<map> needs interface, lhs and rhs attributes", where)
        if kid not in k_p and kid not in k_t:
            raise PnmlError(f"mapping references missing interface element {kid!r}", where)
        kind_p = kid in k_p
        if (lid not in (l_p if kind_p else l_t)) or (rid not in (r_p if kind_p else r_t)):
            bad = lid if lid not in (l_p if kind_p else l_t) else rid
            raise PnmlError(f"mapping references missing element {bad!r}", where)
        if kid in to_l:
            raise PnmlError(f"interface element {kid!r} mapped twice", where)
        to_l[kid], to_r[kid] = lid, rid
    for kid in list(k_p) + list(k_t):
        if kid not in to_l:
            raise PnmlError(f"interface element {kid!r} has no mapping", where)

    # Numeric maps interface -> lhs / rhs, per kind.
    kp_l = {k_p[x]: l_p[to_l[x]] for x in k_p}
    kp_r = {k_p[x]: r_p[to_r[x]] for x in k_p}
    kt_l = {k_t[x]: l_t[to_l[x]] for x in k_t}
    kt_r = {k_t[x]: r_t[to_r[x]] for x in k_t}
    for side, pm, tm, net in (("lhs", kp_l, kt_l, lhs), ("rhs", kp_r, kt_r, rhs)):
        if len(set(pm.values())) != len(pm) or len(set(tm.values())) != len(tm):
            raise PnmlError(f"interface is not injective into the {side}", where)
        _check_subnet(k, net, pm, tm, f"{where}, interface vs {side}")

    # Rule-local ids: lhs ids throughout, rhs-only elements renumbered on clash.
    r_to_rule_p = {kp_r[kid]: kp_l[kid] for kid in kp_l}
    r_to_rule_t = {kt_r[kid]: kt_l[kid] for kid in kt_l}
    used_p = set(lhs.place_map)
    used_t = set(lhs.transition_map)
    for p in rhs.places:
        if p.id not in r_to_rule_p:
            r_to_rule_p[p.id] = p.id if p.id not in used_p else max(used_p | set(rhs.place_map)) + 1
            used_p.add(r_to_rule_p[p.id])
    for t in rhs.transitions:
        if t.id not in r_to_rule_t:
            r_to_rule_t[t.id] = t.id if t.id not in used_t else max(used_t | set(rhs.transition_map)) + 1
            used_t.add(r_to_rule_t[t.id])
    rhs_local = PetriNet(
        tuple(Place(p.label, r_to_rule_p[p.id], p.capacity) for p in rhs.places),
        tuple(Transition(t.label, r_to_rule_t[t.id]) for t in rhs.transitions),
        {r_to_rule_t[t]: m.rename(r_to_rule_p) for t, m in rhs.pre.items()},
        {r_to_rule_t[t]: m.rename(r_to_rule_p) for t, m in rhs.post.items()},
        rhs.marking.rename(r_to_rule_p),
    )
    return Rule(rname, lhs, rhs_local)


def _check_subnet(k: PetriNet, net: PetriNet, pm: dict[int, int], tm: dict[int, int], where: str) -> None:
    for p in k.places:
        q = net.place(pm[p.id])
        if (q.label, q.capacity) != (p.label, p.capacity):
            raise PnmlError(f"interface place {p.id} differs from its image {q.id}", where)
    for t in k.transitions:
        u = net.transition(tm[t.id])
        if u.label != t.label:
            raise PnmlError(f"interface transition {t.id} differs from its image {u.id}", where)
        for side, km, nm in (("pre", k.pre_of(t.id), net.pre_of(u.id)), ("post", k.post_of(t.id), net.post_of(u.id))):
            if any(p not in pm for p in km) or km.rename(pm) != nm:
                raise PnmlError(f"{side}-set of interface transition {t.id} is not preserved", where)


def load_rule(path, name: str | None = None) -> Rule:
    path = Path(path)
    if name is None:
        stem = path.name
        for suffix in (".rule.pnml", ".pnml", ".xml"):
            if stem.endswith(suffix):
                stem = stem[: -len(suffix)]
                break
        root = _root(path)
        rule_elem = root if _local(root.tag) == "rule" else next(
            (e for e in root.iter() if _local(e.tag) == "rule"), None)
        if rule_elem is not None and (rule_elem.get("name") or rule_elem.get("id")):
            stem = rule_elem.get("name") or rule_elem.get("id")
        return parse_rule(root, stem)
    return parse_rule(path, name)


# -- writing -----------------------------------------------------------------

def _net_element(net: PetriNet, net_id: str, role: str | None = None, prefix: str = "") -> ET.Element:
    e = ET.Element("net", {"id": net_id, "type": PTNET_TYPE})
    if role:
        e.set("role", role)
    for p in net.places:
        pe = ET.SubElement(e, "place", {"id": f"{prefix}P{p.id}"})
        ET.SubElement(ET.SubElement(pe, "name"), "text").text = p.label
        if net.marking.get(p.id):
            ET.SubElement(ET.SubElement(pe, "initialMarking"), "text").text = str(net.marking[p.id])
        if p.capacity is not OMEGA:
            ET.SubElement(ET.SubElement(pe, "capacity"), "text").text = str(p.capacity)
    for t in net.transitions:
        te = ET.SubElement(e, "transition", {"id": f"{prefix}T{t.id}"})
        ET.SubElement(ET.SubElement(te, "name"), "text").text = t.label
    n = 0
    for kind, table in (("pre", net.pre), ("post", net.post)):
        for tid, m in table.items():
            for pid, w in m.items():
                n += 1
                src, dst = (f"{prefix}P{pid}", f"{prefix}T{tid}") if kind == "pre" else (f"{prefix}T{tid}", f"{prefix}P{pid}")
                a = ET.SubElement(e, "arc", {"id": f"{prefix}a{n}", "source": src, "target": dst})
                if w != 1:
                    ET.SubElement(ET.SubElement(a, "inscription"), "text").text = str(w)
    return e


def _serialize(root: ET.Element) -> str:
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def write_net(net: PetriNet, net_id: str = "net") -> str:
    """PNML text for ``net``; parsing it back yields an equal net."""
    root = ET.Element("pnml")
    root.append(_net_element(net, net_id))
    return _serialize(root)


def write_rule(rule: Rule) -> str:
    """PNML text for ``rule`` with the interface made explicit."""
    root = ET.Element("pnml")
    r = ET.SubElement(root, "rule", {"id": rule.name, "name": rule.name})
    pp, pt = rule.preserved_places, rule.preserved_transitions
    lhs = rule.lhs
    k = PetriNet(tuple(p for p in lhs.places if p.id in pp), tuple(t for t in lhs.transitions if t.id in pt),
                 {t: lhs.pre_of(t) for t in pt}, {t: lhs.post_of(t) for t in pt}, Marking())
    r.append(_net_element(rule.lhs, "L", "lhs", "L"))
    r.append(_net_element(k, "K", "interface", "K"))
    r.append(_net_element(rule.rhs, "R", "rhs", "R"))
    mapping = ET.SubElement(r, "mapping")
    for pid in sorted(pp):
        ET.SubElement(mapping, "map", {"interface": f"KP{pid}", "lhs": f"LP{pid}", "rhs": f"RP{pid}"})
    for tid in sorted(pt):
        ET.SubElement(mapping, "map", {"interface": f"KT{tid}", "lhs": f"LT{tid}", "rhs": f"RT{tid}"})
    return _serialize(root)
