import random

import pytest

from conmatch import (Market, MarketError, default_weights, example1_market,
                      make_market, nu_of, prefers)
from conmatch.market import (is_matching, matched_college,
                             replace_student_prefs, restrict_students)

from util import rand_market


def test_make_market_rejects_bad_input():
    with pytest.raises(MarketError):
        make_market([(0, 0)], [(0,)])                 # repeated college
    with pytest.raises(MarketError):
        make_market([(2,)], [(0,)])                   # unknown college
    with pytest.raises(MarketError):
        make_market([(0,)], [()])                     # one-sided contract
    with pytest.raises(MarketError):
        make_market([()], [(0,)])                     # other side missing
    with pytest.raises(MarketError):
        make_market([(0,)], [(0,)], weights={(0, 0): 0})   # non-positive
    with pytest.raises(MarketError):
        make_market([(0,), (0,)], [(0, 1)],
                    weights={(0, 0): 1, (1, 0): 2})   # breaks college order


def test_default_weights_unique_positive_respect_colleges():
    rng = random.Random(5)
    for _ in range(30):
        market = rand_market(rng)
        w = market.weights
        assert all(v > 0 for v in w.values())
        assert len(set(w.values())) == len(w)
        for c, prefs in enumerate(market.college_prefs):
            for a, b in zip(prefs, prefs[1:]):
                assert w[(a, c)] > w[(b, c)]


def test_default_weights_layering_on_identical_college_prefs():
    # with every college ranking s6 > s5 > ... > s1, any contract of a
    # higher-indexed student outweighs any contract of a lower-indexed one
    market, _, _ = example1_market()
    w = market.weights
    for s in range(1, 6):
        assert min(w[(s, c)] for c in range(6)) > \
            max(w[(s - 1, c)] for c in range(6))


def test_nu_of_and_matching_helpers():
    Y = {(0, 1), (1, 1), (2, 0)}
    assert nu_of(Y, 3) == (1, 2, 0)
    with pytest.raises(MarketError):
        nu_of({(0, 5)}, 3)
    assert matched_college(Y, 1) == 1
    assert matched_college(Y, 5) is None


def test_prefers_with_unmatched_and_domain_errors():
    market, _, _ = example1_market()
    assert prefers(market, 0, (0, 0), (0, 1))
    assert prefers(market, 0, (0, 5), None) is True    # any seat beats none
    assert prefers(market, 0, None, (0, 5)) is False
    with pytest.raises(MarketError):
        prefers(market, 0, (1, 0), None)


def test_is_matching():
    market, _, _ = example1_market()
    assert is_matching(market, {(0, 0), (1, 0)})
    assert not is_matching(market, {(0, 0), (0, 1)})


def test_replace_student_prefs_prunes_both_sides():
    market, _, _ = example1_market()
    alt = replace_student_prefs(market, 0, (1, 0))
    assert alt.student_prefs[0] == (1, 0)
    for c in (2, 3, 4, 5):
        assert 0 not in alt.college_prefs[c]
    assert 0 in alt.college_prefs[0] and 0 in alt.college_prefs[1]
    with pytest.raises(MarketError):
        replace_student_prefs(Market(1, 2, ((0,),), ((0,), ()),
                                     {(0, 0): 1}), 0, (1,))


def test_restrict_students_keeps_indices():
    market, _, _ = example1_market()
    sub = restrict_students(market, [1, 3])
    assert sub.student_prefs[0] == ()
    assert sub.student_prefs[1] == market.student_prefs[1]
    assert all(s in (1, 3) for prefs in sub.college_prefs for s in prefs)


def test_example1_structure():
    market, spec, master = example1_market()
    assert market.n == market.m == 6
    assert market.student_prefs[0] == (0, 1, 3, 4, 2, 5)
    assert market.college_prefs[0] == (5, 4, 3, 2, 1, 0)
    assert master == (0, 1, 2, 3, 4, 5)
    assert spec.evaluate((3, 0, 0, 1, 0, 2))
    assert not spec.evaluate((3, 0, 1, 0, 0, 0))   # region 1 over quota
    assert not spec.evaluate((2, 1, 0, 2, 0, 0))   # non-rural cap over
