"""Universe generation, visibility models, and streaming."""

import math

import pytest

from ckgames.scenarios import (
    Blind,
    BoundConfig,
    Circular,
    ConsecutiveDistinct,
    FarCircle,
    Full,
    GenerationError,
    HatsAtLeast,
    HatsExactly,
    MaxDiffAtMost,
    MaxDiffExact,
    NearCircle,
    NearLine,
    Scenario,
    Simultaneous,
    SumInSet,
    SumOrProduct,
    ZeroOne,
    gen_universe,
    gen_visibility,
    stream_worlds,
)


def test_hats_at_least_count():
    assert len(gen_universe(HatsAtLeast(0, 1, 2), 3)) == 7


def test_sum_or_product_50():
    u = gen_universe(SumOrProduct(50), 2)
    # 49 sum pairs plus 6 product pairs, no overlap
    assert len(u) == 55
    sums = {w for w in u if sum(w) == 50}
    prods = {w for w in u if w[0] * w[1] == 50}
    assert len(sums) == 49 and len(prods) == 6 and not (sums & prods)


def test_sum_in_set_composition_counts():
    c = SumInSet((30, 31, 32))
    expect = math.comb(29, 9) + math.comb(30, 9) + math.comb(31, 9)
    assert c.count_worlds(10) == expect == 44482230


def test_consecutive_counts():
    c = ConsecutiveDistinct(9)
    assert c.count_worlds(4) == 7 * 24
    assert len(gen_universe(c, 4)) == 7 * 24


def test_generators_lexicographic_and_consistent():
    cases = [
        (HatsAtLeast(0, 2, 3), 3),
        (HatsExactly(0, 1, 2), 4),
        (MaxDiffExact(2, 7), 3),
        (MaxDiffAtMost(2, 5), 3),
        (ConsecutiveDistinct(6), 3),
        (SumOrProduct(12), 3),
        (SumInSet((7, 9)), 3),
        (ZeroOne(), 3),
    ]
    for c, n in cases:
        ws = list(c.generate(n))
        assert ws == sorted(ws), c
        assert len(ws) == len(set(ws)) == c.count_worlds(n), c
        assert all(c.contains(w) for w in ws), c


def test_maxdiff_exact_semantics():
    for w in gen_universe(MaxDiffExact(3, 8), 3):
        assert max(w) - min(w) == 3


def test_visibility_far_circle():
    vis = gen_visibility(FarCircle(), 10)
    assert vis.sees[0] == frozenset(range(2, 9))


def test_visibility_near_line_ends():
    vis = gen_visibility(NearLine(), 10)
    assert vis.sees[0] == frozenset({1})
    assert vis.sees[9] == frozenset({8})
    assert vis.sees[4] == frozenset({3, 5})


def test_visibility_blind():
    vis = gen_visibility(Blind(frozenset({0})), 5)
    assert vis.sees[0] == frozenset()
    assert all(len(vis.sees[i]) == 4 for i in range(1, 5))


def test_visibility_models_self_exclusive():
    for n in range(3, 13):
        for model in (Full(), NearCircle(), FarCircle(), NearLine(), Blind(frozenset({1}))):
            vis = gen_visibility(model, n)
            for i, seen in enumerate(vis.sees):
                assert i not in seen


def test_circle_needs_three():
    with pytest.raises(GenerationError):
        gen_visibility(NearCircle(), 2)


def test_stream_matches_generate():
    c = SumOrProduct(18)
    assert list(stream_worlds(c, 3)) == list(c.generate(3))


def test_stream_with_predicates():
    # scaled version of the ten-person line: forcing the seen value pins the rest
    c = SumInSet((12, 13, 14))
    picky = list(stream_worlds(c, 5, [lambda w: w[1] == 10]))
    assert picky == [(1, 10, 1, 1, 1)]


def test_stream_nondivisor_complement():
    c = SumOrProduct(35)
    total = c.count_worlds(3)
    divisor_only = sum(1 for _ in stream_worlds(c, 3, [lambda w: all(35 % v == 0 for v in w)]))
    with_nondiv = sum(1 for _ in stream_worlds(c, 3, [lambda w: any(35 % v for v in w)]))
    assert divisor_only + with_nondiv == total


def test_cap_below_difference_rejected():
    with pytest.raises(GenerationError):
        MaxDiffExact(5, 3)


def test_scenario_validation():
    sc = Scenario(
        "x", ("a", "b"), MaxDiffExact(1, 9), Full(), Simultaneous(5), (2, 3),
        bound=BoundConfig(9),
    )
    sc.validate()
    bad = Scenario("x", ("a", "b"), MaxDiffExact(1, 9), Full(), Simultaneous(5), (2, 5),
                   bound=BoundConfig(9))
    with pytest.raises(GenerationError):
        bad.validate()
    uncapped = Scenario("x", ("a", "b"), MaxDiffExact(1, 9), Full(), Simultaneous(5), (2, 3))
    with pytest.raises(GenerationError):
        uncapped.validate()


def test_circular_order_must_be_permutation():
    with pytest.raises(GenerationError):
        Circular((0, 0, 1), 5)
