"""Tests for matching, the gluing condition, rule application and id pools."""
from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_dangling, oracle_equal_marking, oracle_matches
from strategies import nets, rules
from rpnmc.catalog import n1, n2, r1, r2, r3
from rpnmc.net import Marking, PetriNet, Place, Transition, validate_net
from rpnmc.rules import (Configuration, GluingError, IdPool, PoolError, Rule, applicable_matches,
                         apply_rule, dangling_ok, deleted_marking_ok, find_matches, gluing_failure,
                         identification_ok, pool_acquire, pool_release)
from rpnmc.statespace import explore, successors


def _as_pairs(matches):
    return {(m.place_map, m.transition_map) for m in matches}


def grow_rule() -> Rule:
    """Attach a fresh B place behind an A place."""
    lhs = PetriNet.build([Place("A", 1)], [])
    rhs = PetriNet.build([Place("A", 1), Place("B", 2)], [Transition("G", 3)], [("p", 1, 3), ("t", 3, 2)])
    return Rule("grow", lhs, rhs)


def shrink_rule() -> Rule:
    """Remove an unmarked B place together with the transition feeding it."""
    lhs = PetriNet.build([Place("A", 1), Place("B", 2)], [Transition("G", 3)], [("p", 1, 3), ("t", 3, 2)])
    rhs = PetriNet.build([Place("A", 1)], [])
    return Rule("shrink", lhs, rhs)


class TestRuleStructure:
    def test_r1_preserves_places_and_swaps_transition(self):
        rule = r1()
        assert rule.preserved_places == {17, 20}
        assert rule.deleted_transitions == (24,)
        assert rule.created_transitions == (26,)
        assert rule.deleted_places == () and rule.created_places == ()

    def test_r1_identification(self):
        assert identification_ok(r1())

    def test_conflicting_labels_fail_identification(self):
        lhs = PetriNet.build([Place("A", 1)], [])
        rhs = PetriNet.build([Place("B", 1)], [])
        assert not identification_ok(Rule("bad", lhs, rhs))

    def test_preserved_transition_with_changed_arcs_fails(self):
        places = [Place("A", 1), Place("A", 2)]
        lhs = PetriNet.build(places, [Transition("T", 3)], [("p", 1, 3)])
        rhs = PetriNet.build(places, [Transition("T", 3)], [("p", 2, 3)])
        assert not identification_ok(Rule("bad", lhs, rhs))

    def test_empty_rule(self):
        assert identification_ok(Rule("empty", PetriNet(), PetriNet()))


class TestMatching:
    def test_n1_r1_two_matches(self):
        matches = find_matches(n1(), r1())
        assert [m.transitions[24] for m in matches] == [5, 7]
        assert matches[0].places == {17: 4, 20: 3}

    def test_n1_r1_agrees_with_oracle(self):
        assert _as_pairs(find_matches(n1(), r1())) == oracle_matches(n1(), r1())

    def test_n2_r3_one_valid_match(self):
        matches = find_matches(n2(), r3())
        assert len(matches) == 2
        valid = [m for m in matches if gluing_failure(n2(), m) is None]
        assert len(valid) == 1 and valid[0].transitions[3] == 5

    def test_lhs_larger_than_host(self):
        host = PetriNet.build([Place("A", 1), Place("A", 2)], [Transition("T", 3)], [("p", 1, 3), ("t", 3, 2)], [1])
        lhs = PetriNet.build([Place("A", 1), Place("A", 2)], [Transition("T", 3), Transition("T", 4)],
                             [("p", 1, 3), ("t", 3, 2), ("p", 2, 4), ("t", 4, 1)])
        assert find_matches(host, Rule("big", lhs, lhs)) == []

    def test_capacity_must_be_equal(self):
        host = n1()
        lhs = PetriNet.build([Place("A", 1, 5)], [])
        assert find_matches(host, Rule("cap", lhs, lhs)) == []

    def test_digest(self):
        m = find_matches(n1(), r1())[0]
        assert m.digest == "t24->5,p17->4,p20->3"

    @settings(max_examples=1000, deadline=None)
    @given(nets(max_places=5, max_transitions=5, finite_caps=False), rules())
    def test_agrees_with_brute_force(self, net, rule):
        found = find_matches(net, rule)
        assert _as_pairs(found) == oracle_matches(net, rule)
        for m in found:
            assert len(set(m.places.values())) == len(m.places)
            assert len(set(m.transitions.values())) == len(m.transitions)


@st.composite
def branchy_nets(draw):
    """Several marked A -T-> A branches; the target places get random extra
    arcs and tokens so that both gluing checks can pass or fail."""
    k = draw(st.integers(1, 3))
    places, transitions, arcs, marking = [], [], [], {}
    nid = 1
    targets = []
    for _ in range(k):
        src, dst, t = nid, nid + 1, nid + 2
        nid += 3
        places += [Place("A", src), Place("A", dst)]
        transitions.append(Transition("T", t))
        arcs += [("p", src, t), ("t", t, dst)]
        marking[src] = 1
        targets.append(dst)
        marking[dst] = draw(st.integers(0, 2))
    for _ in range(draw(st.integers(0, 3))):
        t = nid
        nid += 1
        transitions.append(Transition("X", t))
        p = draw(st.sampled_from(targets))
        arcs.append(("p", p, t) if draw(st.booleans()) else ("t", t, p))
    return PetriNet.build(places, transitions, arcs, {p: n for p, n in marking.items() if n})


class TestGluing:
    def test_top_branch_ok(self):
        m = next(m for m in find_matches(n2(), r3()) if m.transitions[3] == 5)
        assert dangling_ok(n2(), m)

    def test_bottom_branch_dangles(self):
        m = next(m for m in find_matches(n2(), r3()) if m.transitions[3] == 6)
        assert not dangling_ok(n2(), m)
        assert gluing_failure(n2(), m) == "dangling"

    def test_isolated_deleted_place(self):
        lhs = PetriNet.build([Place("A", 1)], [])
        rule = Rule("drop", lhs, PetriNet())
        host = PetriNet.build([Place("A", 7)], [])
        (m,) = find_matches(host, rule)
        assert dangling_ok(host, m)

    def test_deleted_marking_equal(self):
        lhs = PetriNet.build([Place("A", 1)], [], [], {1: 1})
        rule = Rule("drop", lhs, PetriNet())
        host = PetriNet.build([Place("A", 7)], [], [], {7: 1})
        (m,) = find_matches(host, rule)
        assert deleted_marking_ok(host, m)

    def test_deleted_marking_extra_token(self):
        lhs = PetriNet.build([Place("A", 1)], [], [], {1: 1})
        rule = Rule("drop", lhs, PetriNet())
        host = PetriNet.build([Place("A", 7)], [], [], {7: 2})
        (m,) = find_matches(host, rule)
        assert not deleted_marking_ok(host, m)
        with pytest.raises(GluingError):
            apply_rule(Configuration.initial(host, [rule]), m)

    def test_no_deleted_places(self):
        for m in find_matches(n1(), r1()):
            assert deleted_marking_ok(n1(), m)

    @settings(max_examples=1000, deadline=None)
    @given(branchy_nets())
    def test_agrees_with_oracles_on_branch_nets(self, net):
        rule = r3()
        for m in find_matches(net, rule):
            assert dangling_ok(net, m) == oracle_dangling(net, rule, m.places, m.transitions)
            assert deleted_marking_ok(net, m) == oracle_equal_marking(net, rule, m.places)


class TestApplyRule:
    def test_r1_on_t5_reverses_arcs(self):
        config = Configuration.initial(n1(), [r1()], max_id=25)
        m = next(m for m in find_matches(n1(), r1()) if m.transitions[24] == 5)
        out = apply_rule(config, m)
        net = out.net
        assert 5 not in net.transition_map
        assert 26 in net.transition_map
        assert net.pre_of(26) == Marking({3: 1}) and net.post_of(26) == Marking({4: 1})
        assert out.transition_pool.available[0] == 5
        assert validate_net(net) == []

    def test_identity_rule_changes_nothing(self):
        lhs = PetriNet.build([Place("A", 1)], [], [], {1: 1})
        config = Configuration.initial(n1(), [Rule("id", lhs, lhs)])
        m = find_matches(config.net, config.rules[0])[0]
        out = apply_rule(config, m)
        assert out.net.describe() == config.net.describe()
        assert out.net.pre == config.net.pre
        assert out.place_pool == config.place_pool and out.transition_pool == config.transition_pool
        assert out.max_id == config.max_id

    def test_dangling_violation_raises(self):
        config = Configuration.initial(n2(), [r3()])
        m = next(m for m in find_matches(n2(), r3()) if m.transitions[3] == 6)
        with pytest.raises(GluingError) as err:
            apply_rule(config, m)
        assert err.value.condition == "dangling"

    def test_r3_deletes_place_and_transition(self):
        config = Configuration.initial(n2(), [r3()])
        (m,) = applicable_matches(config)
        out = apply_rule(config, m)
        assert 2 not in out.net.place_map and 5 not in out.net.transition_map
        assert out.place_pool.available[0] == 2
        assert validate_net(out.net) == []

    def test_applicable_matches_filter_gluing(self):
        assert len(applicable_matches(Configuration.initial(n2(), [r3()]))) == 1


class TestPools:
    def test_acquire_front(self):
        ident, pool, max_id = pool_acquire(IdPool("place", tuple(range(26, 37))), 36, 10)
        assert ident == 26 and pool.available[0] == 27 and max_id == 36

    def test_refill_when_empty(self):
        ident, pool, max_id = pool_acquire(IdPool("place"), 25, 10)
        assert ident == 26
        assert pool.available == tuple(range(27, 36))
        assert max_id == 35

    def test_released_id_comes_back_first(self):
        pool = pool_release(IdPool("transition", (26, 27)), 24)
        assert pool.available == (24, 26, 27)
        assert pool_acquire(pool, 36, 10)[0] == 24

    def test_release_into_empty(self):
        assert pool_release(IdPool("place"), 5).available == (5,)

    def test_double_release(self):
        with pytest.raises(PoolError):
            pool_release(IdPool("place", (5,)), 5)

    def test_initial_configuration(self):
        c = Configuration.initial(n1(), [r2(), r1()], max_id=25)
        assert c.max_id == 35
        assert c.place_pool.available == tuple(range(26, 36))
        assert [r.name for r in c.rules] == ["r1", "r2"]

    @settings(max_examples=1000, deadline=None)
    @given(st.lists(st.tuples(st.booleans(), st.integers(0, 50)), max_size=60), st.integers(1, 5))
    def test_acquire_release_sequences_stay_unique(self, ops, step):
        pool, max_id, live = IdPool("place"), 0, []
        for acquire, pick in ops:
            if acquire or not live:
                ident, pool, max_id = pool_acquire(pool, max_id, step)
                assert ident not in live
                live.append(ident)
            else:
                pool = pool_release(pool, live.pop(pick % len(live)))
            assert not set(live) & set(pool.available)
            assert all(i <= max_id for i in live + list(pool.available))

    def test_ten_thousand_rewrites_keep_ids_unique(self):
        rng = random.Random(7)
        base = PetriNet.build([Place("A", 1), Place("A", 2)], [Transition("T", 3), Transition("T", 4)],
                              [("p", 1, 3), ("t", 3, 2), ("p", 2, 4), ("t", 4, 1)], {1: 1})
        config = Configuration.initial(base, [r1(), grow_rule(), shrink_rule()], step_size=3)
        rewrites = 0
        while rewrites < 10_000:
            options = successors(config)
            rule_steps = [(lab, c) for lab, c in options if lab.kind == "rule"]
            if not rule_steps:
                break
            shrinking = [(lab, c) for lab, c in rule_steps if lab.rule == "shrink"]
            pool = shrinking if shrinking and len(config.net.places) > 6 else rule_steps
            _, config = pool[rng.randrange(len(pool))]
            rewrites += 1
            net = config.net
            pids = [p.id for p in net.places]
            tids = [t.id for t in net.transitions]
            assert len(pids) == len(set(pids)) and len(tids) == len(set(tids))
            assert not set(pids) & set(config.place_pool.available)
            assert not set(tids) & set(config.transition_pool.available)
            assert max(pids + tids) <= config.max_id
        assert rewrites == 10_000
        assert validate_net(config.net) == []

    def test_recycling_bounds_the_id_universe(self):
        graph = explore(Configuration.initial(n1(), [r1()]), max_states=10_000)
        assert not graph.truncated
        ids = {t.id for c in graph.states.values() for t in c.net.transitions}
        assert ids <= set(range(5, 18))

    @settings(max_examples=300, deadline=None)
    @given(nets(max_places=4, max_transitions=3, finite_caps=False), rules(), st.integers(0, 10))
    def test_apply_keeps_nets_valid(self, net, rule, pick):
        config = Configuration.initial(net, [rule])
        matches = applicable_matches(config)
        if matches:
            out = apply_rule(config, matches[pick % len(matches)])
            assert validate_net(out.net) == []
