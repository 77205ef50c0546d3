"""Tests for markings, places, nets and net validation."""
from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpnmc.catalog import n1
from rpnmc.net import (EMPTY, OMEGA, OMEGA_LITERAL, Marking, MarkingUnderflow, PetriNet, Place, Transition,
                       capacity_ok, marking_add, marking_leq, marking_sub, validate_net)

markings = st.dictionaries(st.integers(1, 6), st.integers(0, 4)).map(Marking)


class TestMarking:
    def test_zero_counts_are_dropped(self):
        assert Marking({2: 0, 3: 1}) == Marking({3: 1})
        assert len(Marking({2: 0})) == 0

    def test_from_element_list(self):
        assert Marking([4, 4, 3]) == Marking({3: 1, 4: 2})

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError):
            Marking({1: -1})

    def test_empty_is_below_everything(self):
        assert marking_leq(EMPTY, Marking({2: 1}))
        assert marking_leq(EMPTY, EMPTY)

    def test_pre_of_t6_covered_by_a2_a4(self):
        assert marking_leq(Marking({2: 1}), Marking({2: 1, 4: 1}))

    def test_multiplicity_shortfall(self):
        assert not marking_leq(Marking({2: 2}), Marking({2: 1, 4: 1}))

    def test_firing_t6_by_hand(self):
        m = marking_add(marking_sub(Marking({2: 1, 4: 1}), Marking({2: 1})), Marking({4: 1}))
        assert m == Marking({4: 2})

    def test_identities(self):
        m = Marking({2: 1, 4: 3})
        assert marking_add(m, EMPTY) == m
        assert marking_sub(m, EMPTY) == m

    def test_underflow(self):
        with pytest.raises(MarkingUnderflow):
            marking_sub(Marking({4: 2}), Marking({2: 1}))

    def test_total_and_elements(self):
        m = Marking({3: 2, 1: 1})
        assert m.total == 3
        assert list(m.elements()) == [1, 3, 3]

    def test_rename(self):
        assert Marking({17: 1}).rename({17: 4}) == Marking({4: 1})

    @settings(max_examples=200)
    @given(markings, markings, markings)
    def test_add_commutative_associative(self, a, b, c):
        assert marking_add(a, b) == marking_add(b, a)
        assert marking_add(marking_add(a, b), c) == marking_add(a, marking_add(b, c))

    @settings(max_examples=200)
    @given(markings, markings)
    def test_sub_inverts_add(self, m, x):
        assert marking_sub(marking_add(m, x), x) == m

    @settings(max_examples=200)
    @given(markings, markings, markings)
    def test_leq_is_partial_order(self, a, b, c):
        assert marking_leq(a, a)
        if marking_leq(a, b) and marking_leq(b, a):
            assert a == b
        if marking_leq(a, b) and marking_leq(b, c):
            assert marking_leq(a, c)


class TestCapacity:
    places = {1: Place("A", 1, 1), 2: Place("A", 2)}

    def test_nothing_added(self):
        assert capacity_ok(Marking({1: 1}), EMPTY, self.places)

    def test_unbounded_always_fits(self):
        assert capacity_ok(Marking({2: 10 ** 6}), Marking({2: 10 ** 6}), self.places)

    def test_overflow(self):
        assert not capacity_ok(Marking({1: 1}), Marking({1: 1}), self.places)

    @given(markings.map(lambda m: Marking({p: n for p, n in m.items() if p <= 2})),
           markings.map(lambda m: Marking({p: n for p, n in m.items() if p <= 2})),
           markings.map(lambda m: Marking({p: n for p, n in m.items() if p <= 2})))
    def test_monotone_decreasing_in_added(self, m, small, extra):
        bigger = marking_add(small, extra)
        if capacity_ok(m, bigger, self.places):
            assert capacity_ok(m, small, self.places)
        assert capacity_ok(m, EMPTY, self.places)


class TestOmega:
    def test_sentinel_renders_as_int_max(self):
        assert int(OMEGA) == OMEGA_LITERAL == 2147483647
        assert str(OMEGA) in ("OMEGA", "2147483647", "ω")

    def test_compares_above_integers(self):
        assert OMEGA > 10 ** 9

    def test_place_default_is_unbounded(self):
        assert Place("A", 1).capacity is OMEGA

    @pytest.mark.parametrize("cap", [0, -1])
    def test_non_positive_capacity_rejected(self, cap):
        with pytest.raises(ValueError):
            Place("A", 1, cap)


class TestPetriNet:
    def test_n1_structure(self):
        net = n1()
        assert [p.id for p in net.places] == [2, 3, 4]
        assert [t.id for t in net.transitions] == [5, 6, 7]
        assert net.pre_of(5) == Marking({4: 1}) and net.post_of(5) == Marking({3: 1})
        assert net.pre_of(6) == Marking({2: 1}) and net.post_of(6) == Marking({4: 1})
        assert net.pre_of(7) == Marking({3: 1}) and net.post_of(7) == Marking({2: 1})
        assert net.marking == Marking({3: 1, 4: 1})

    def test_n1_validates(self):
        assert validate_net(n1()) == []

    def test_describe(self):
        assert n1().describe() == "A@3 + A@4"

    def test_element_order_is_normalised(self):
        a = PetriNet.build([Place("A", 4), Place("A", 2)], [Transition("T", 9)], [("p", 4, 9)])
        b = PetriNet.build([Place("A", 2), Place("A", 4)], [Transition("T", 9)], [("p", 4, 9)])
        assert a.places == b.places and a.pre == b.pre

    def test_unknown_place_reported(self):
        net = PetriNet.build([Place("A", 1)], [Transition("T", 2)], [("p", 9, 2)])
        assert any("9" in v for v in validate_net(net))

    def test_marking_over_capacity_reported(self):
        net = PetriNet.build([Place("A", 1, 1)], [], [], {1: 2})
        assert validate_net(net)

    def test_duplicate_ids_reported(self):
        net = PetriNet((Place("A", 1), Place("B", 1)), (), {}, {}, EMPTY)
        assert validate_net(net)

    def test_with_marking_keeps_structure(self):
        net = n1().with_marking({2: 1, 4: 1})
        assert net.marking == Marking({2: 1, 4: 1}) and net.pre == n1().pre

    def test_adjacency(self):
        assert n1().adjacency[3] == frozenset({5, 7})
