import random

import pytest

from conmatch import (And, BlackBox, ChoiceError, LinearCap, ch_colleges_bruteforce,
                      ch_colleges_greedy, ch_student, ch_students,
                      example1_market, single_rejection_step)

from util import rand_laminar_spec, rand_pool


def test_ch_student_picks_best_acceptable():
    market, _, _ = example1_market()
    pool = {(0, 5), (0, 3), (0, 1), (1, 0)}
    assert ch_student(market, 0, pool) == {(0, 1)}
    assert ch_student(market, 0, {(1, 0)}) == set()
    assert ch_students(market, pool) == {(0, 1), (1, 0)}


def test_greedy_skips_and_continues():
    # c0 capped at 1: heaviest contract takes it, next heaviest at c0 is
    # skipped, lighter contract at c1 still enters
    spec = And(LinearCap((0,), 1))
    pool = {(0, 0), (1, 0), (2, 1)}
    weights = {(0, 0): 30, (1, 0): 20, (2, 1): 10}
    assert ch_colleges_greedy(pool, weights, spec, 2) == {(0, 0), (2, 1)}


def test_bruteforce_is_exact_and_capped():
    spec = And(LinearCap((0, 1), 1))
    pool = {(0, 0), (1, 1)}
    weights = {(0, 0): 1, (1, 1): 2}
    assert ch_colleges_bruteforce(pool, weights, spec, 2) == {(1, 1)}
    with pytest.raises(ChoiceError):
        ch_colleges_bruteforce([(s, 0) for s in range(20)],
                               {(s, 0): s + 1 for s in range(20)},
                               spec, 1)


def test_greedy_matches_bruteforce_on_laminar_specs():
    rng = random.Random(17)
    for _ in range(300):
        m = rng.randint(1, 4)
        spec = rand_laminar_spec(rng, m)
        pool, weights = rand_pool(rng, rng.randint(1, 8), m)
        assert ch_colleges_greedy(pool, weights, spec, m) == \
            ch_colleges_bruteforce(pool, weights, spec, m)


def test_choice_properties_on_laminar_specs():
    rng = random.Random(23)
    for _ in range(200):
        m = rng.randint(1, 4)
        spec = rand_laminar_spec(rng, m)
        pool, weights = rand_pool(rng, rng.randint(1, 8), m)
        pool = list(pool)
        chosen = ch_colleges_greedy(pool, weights, spec, m)
        # idempotence
        assert ch_colleges_greedy(chosen, weights, spec, m) == chosen
        # substitutability and aggregated demand against a random subset
        sub = [x for x in pool if rng.random() < 0.6]
        chosen_sub = ch_colleges_greedy(sub, weights, spec, m)
        for x in sub:
            if x not in chosen_sub:                  # rejected from less
                assert x not in chosen               # rejected from more
        assert len(chosen_sub) <= len(chosen)
        # order irrelevance: one-at-a-time insertion reaches the same set
        order = list(pool)
        rng.shuffle(order)
        Z = set()
        for x in order:
            Z = ch_colleges_greedy(Z | {x}, weights, spec, m)
        assert Z == chosen


def test_single_rejection_step():
    spec = And(LinearCap((0,), 1))
    weights = {(0, 0): 3, (1, 0): 2, (2, 1): 1}
    accepted, rejected = single_rejection_step({(1, 0)}, (0, 0), weights,
                                               spec, 2)
    assert accepted == {(0, 0)} and rejected == (1, 0)
    accepted, rejected = single_rejection_step({(0, 0)}, (2, 1), weights,
                                               spec, 2)
    assert rejected is None and accepted == {(0, 0), (2, 1)}


def test_single_rejection_step_flags_nonconvex_region():
    # adding one contract evicts two: impossible under convex constraints
    spec = BlackBox(lambda nu: (nu[0] == 0) or (nu[0] == 1 and nu[1] == 0)
                    or (nu[0] == 3 and nu[1] == 0))
    weights = {(0, 0): 5, (1, 0): 4, (2, 0): 3, (3, 1): 2}
    with pytest.raises(ChoiceError):
        single_rejection_step({(1, 0), (2, 0)}, (3, 1), weights, spec, 2)
