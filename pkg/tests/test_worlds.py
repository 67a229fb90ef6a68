"""Core semantics: observations, knowledge, and announcement filtering."""

import pytest

from ckgames.scenarios import (
    Blind,
    Full,
    HatsAtLeast,
    MaxDiffExact,
    NearCircle,
    SumOrProduct,
    gen_universe,
    gen_visibility,
)
from ckgames.worlds import (
    ContractViolation,
    EmptyStateError,
    KnowledgeState,
    answer_vector,
    answers_for_all,
    filter_simultaneous,
    filter_turn,
    knows_own,
    observe,
)

R, B = 0, 1


def intro_universe():
    return gen_universe(HatsAtLeast(R, 1, 2), 3)


def test_observe_blind_sees_nothing():
    vis = gen_visibility(Blind(frozenset({0})), 3)
    assert observe(0, (R, B, B), vis) == {}


def test_observe_full_sight_restriction():
    vis = gen_visibility(Full(), 3)
    assert observe(0, (R, B, B), vis) == {1: B, 2: B}


def test_observe_near_circle_neighbors():
    vis = gen_visibility(NearCircle(), 5)
    assert observe(0, (0, 1, 2, 3, 4), vis) == {1: 1, 4: 4}


def test_observe_bad_agent_index():
    vis = gen_visibility(Full(), 3)
    with pytest.raises(ContractViolation):
        observe(5, (R, B, B), vis)


def test_knows_own_sees_two_blues():
    # seeing two blue hats pins the remaining red
    vis = gen_visibility(Full(), 3)
    assert knows_own(0, (R, B, B), intro_universe(), vis)


def test_knows_own_indistinguishable_pair():
    vis = gen_visibility(Full(), 2)
    state = KnowledgeState.from_worlds([(0, 0), (1, 0)])
    assert not knows_own(0, (0, 0), state, vis)


def test_knows_own_sop_nondivisor():
    # announced 50, agent 0 sees a 3: 3 does not divide 50, so the sum is forced
    universe = gen_universe(SumOrProduct(50), 2)
    assert len(universe) == 55
    vis = gen_visibility(Full(), 2)
    assert (47, 3) in universe
    assert knows_own(0, (47, 3), universe, vis)


def test_knows_own_requires_membership():
    vis = gen_visibility(Full(), 3)
    with pytest.raises(ContractViolation):
        knows_own(0, (B, B, B), intro_universe(), vis)


def test_answer_vector_two_reds_all_no():
    vis = gen_visibility(Full(), 3)
    assert answer_vector(intro_universe(), (R, R, B), vis) == (False, False, False)


def test_answer_vector_one_red():
    vis = gen_visibility(Full(), 3)
    assert answer_vector(intro_universe(), (R, B, B), vis) == (True, False, False)


def test_answer_vector_singleton_state_all_yes():
    vis = gen_visibility(Full(), 3)
    state = KnowledgeState.from_worlds([(R, B, B)])
    assert answer_vector(state, (R, B, B), vis) == (True, True, True)


def test_answers_for_all_matches_pointwise():
    universe = intro_universe()
    vis = gen_visibility(Full(), 3)
    table = answers_for_all(universe, vis)
    for w in universe:
        assert table[w] == answer_vector(universe, w, vis)


def test_filter_simultaneous_all_no_keeps_two_plus_reds():
    universe = intro_universe()
    vis = gen_visibility(Full(), 3)
    state = filter_simultaneous(universe, (False, False, False), vis)
    assert set(state) == {w for w in universe if w.count(R) >= 2}
    assert len(state) == 4


def test_filter_simultaneous_singleton_fixpoint():
    vis = gen_visibility(Full(), 3)
    state = KnowledgeState.from_worlds([(R, B, B)])
    again = filter_simultaneous(state, (True, True, True), vis)
    assert tuple(again) == tuple(state)


def test_filter_simultaneous_inconsistent_raises():
    vis = gen_visibility(Full(), 3)
    state = KnowledgeState.from_worlds([(R, B, B)])
    with pytest.raises(EmptyStateError):
        filter_simultaneous(state, (False, True, True), vis)


def test_filter_turn_first_speaker_no():
    # Kevin's NO removes every world in which only Kevin is red
    universe = gen_universe(HatsAtLeast(R, 1, 2), 4)
    vis = gen_visibility(Full(), 4)
    state = filter_turn(universe, 0, False, vis)
    assert (R, B, B, B) not in state
    assert all(w != (R, B, B, B) for w in state)
    assert set(universe) - set(state) == {(R, B, B, B)}


def test_filter_turn_uninformative_yes():
    vis = gen_visibility(Full(), 2)
    state = KnowledgeState.from_worlds([(0, 1), (0, 2)])
    # agent 1 sees the 0 either way but its own value differs; agent 0 knows in both
    out = filter_turn(state, 0, True, vis)
    assert tuple(out) == tuple(state)


def test_filter_turn_maxdiff_first_no():
    universe = gen_universe(MaxDiffExact(1, 8), 2)
    vis = gen_visibility(Full(), 2)
    state = filter_turn(universe, 0, False, vis)
    assert all(w[1] != 0 for w in state)


def test_state_canonical_order():
    state = KnowledgeState.from_worlds([(1, 0), (0, 1), (1, 0)])
    assert state.worlds == ((0, 1), (1, 0))
