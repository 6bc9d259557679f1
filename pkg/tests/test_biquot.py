import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from curvlab.biquot import (SCALAR_KERNEL_WARNING, BazaikinParams, BiquotientError, EschenburgParams,
                            aloff_wallach_params, aloff_wallach_positive, baz_is_free, baz_is_positive,
                            baz_order_h6, esch_block_conditions, esch_horizontal_flat_sampler, esch_is_free,
                            esch_is_positive, esch_order_h4, esch_vertical_vector, esch_warnings,
                            ps_bundle_order, sigma, su3)
from curvlab.liealg import random_group_element

E = EschenburgParams
B = BazaikinParams


@st.composite
def esch_tuples(draw, bound=10):
    ints = st.integers(-bound, bound)
    k = [draw(ints) for _ in range(3)]
    l1, l2 = draw(ints), draw(ints)
    l3 = sum(k) - l1 - l2
    assume(-bound <= l3 <= bound)
    return E(tuple(k), (l1, l2, l3))


def free_positive(bound=10, seed=0, count=100):
    """Deterministic stream of free, criterion-positive tuples."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        k = rng.integers(-bound, bound + 1, 3)
        l = rng.integers(-bound, bound + 1, 2)
        l3 = int(k.sum() - l.sum())
        if abs(l3) > bound:
            continue
        p = E(tuple(k), (int(l[0]), int(l[1]), l3))
        if esch_is_free(p) and esch_is_positive(p):
            out.append(p)
    return out


def test_sigma():
    assert sigma((1, 2, 3), 1) == 6 and sigma((1, 2, 3), 2) == 11 and sigma((1, 2, 3), 3) == 6


def test_sum_mismatch():
    with pytest.raises(BiquotientError):
        E((1, 1, -1), (0, 0, 0))
    with pytest.raises(BiquotientError):
        B((1, 1, 1, 1))


# ---------------------------------------------------------------- Eschenburg predicates


@pytest.mark.parametrize("k,l,free,positive,r", [
    ((1, 1, -2), (0, 0, 0), True, True, -3),
    ((2, 2, -4), (0, 0, 0), False, None, None),
    ((1, 0, -1), (0, 0, 0), True, False, -1),
    ((79, 49, -50), (0, 46, 32), True, None, None),
])
def test_esch_examples(k, l, free, positive, r):
    p = E(k, l)
    assert esch_is_free(p) is free
    if positive is not None:
        assert esch_is_positive(p) is positive
    if r is not None:
        assert esch_order_h4(p) == r


def test_known_eschenburg_pair_has_equal_order():
    a = esch_order_h4(E((79, 49, -50), (0, 46, 32)))
    b = esch_order_h4(E((75, 54, -51), (0, 46, 32)))
    assert a == b


@pytest.mark.parametrize("p", [1, 2, 3, 7])
def test_ep_family(p):
    # written as (1,1,p; 1,1,p+2) the sums differ; the valid presentation is (1,1,p; 0,0,p+2)
    with pytest.raises(BiquotientError):
        E((1, 1, p), (1, 1, p + 2))
    ep = E((1, 1, p), (0, 0, p + 2))
    assert esch_is_free(ep)
    assert not esch_is_positive(ep)  # k_1 = 1 lies in [0, p + 2]
    assert esch_is_positive(ep.swapped())  # l_i = 0, p + 2 lie outside [1, p]


def test_scalar_kernel_warning():
    # z = -1 (resp. a cube root of unity) acts trivially; the reduced tuple is free
    for k in [(2, 2, -4), (3, 0, -3)]:
        p = E(k, (0, 0, 0))
        assert not esch_is_free(p)
        assert esch_warnings(p) == [SCALAR_KERNEL_WARNING]
    assert esch_warnings(E((1, 0, -1), (1, 0, -1))) == []  # not free, no scalar kernel
    assert esch_warnings(E((1, 1, -2), (0, 0, 0))) == []


def test_block_conditions_match_criterion():
    for k in itertools.product(range(-4, 5), repeat=3):
        for l1, l2 in itertools.product(range(-4, 5), repeat=2):
            p = E(k, (l1, l2, sum(k) - l1 - l2))
            lo, hi = min(p.l), max(p.l)
            direct = all(not lo <= ki <= hi for ki in p.k)
            assert esch_is_positive(p) == direct
            assert set(esch_block_conditions(p)) == {0, 1, 2}


@settings(max_examples=100, deadline=None)
@given(esch_tuples())
def test_permutation_invariance(p):
    free, pos = esch_is_free(p), esch_is_positive(p)
    for sk in itertools.permutations(p.k):
        for sl in itertools.permutations(p.l):
            q = E(sk, sl)
            assert esch_is_free(q) == free
            assert esch_is_positive(q) == pos


@settings(max_examples=100, deadline=None)
@given(esch_tuples(), st.integers(-20, 20))
def test_translation_invariance(p, c):
    q = E(tuple(v + c for v in p.k), tuple(v + c for v in p.l))
    assert esch_is_free(q) == esch_is_free(p)
    assert esch_is_positive(q) == esch_is_positive(p)
    assert esch_order_h4(q) == esch_order_h4(p)
    assert esch_warnings(q) == esch_warnings(p)


# ---------------------------------------------------------------- Aloff-Wallach


@pytest.mark.parametrize("p,q,expected", [(1, 1, True), (1, 0, False), (1, -1, False), (2, 3, True)])
def test_aloff_wallach_positive(p, q, expected):
    assert aloff_wallach_positive(p, q) is expected


def test_aloff_wallach_requires_coprime():
    with pytest.raises(BiquotientError):
        aloff_wallach_positive(2, 4)


@settings(max_examples=200, deadline=None)
@given(st.integers(-50, 50), st.integers(-50, 50))
def test_aloff_wallach_matches_eschenburg_criterion(p, q):
    assume(math.gcd(p, q) == 1)
    assert aloff_wallach_positive(p, q) == esch_is_positive(aloff_wallach_params(p, q))


def test_aloff_wallach_order_is_quadratic_form():
    for p, q in [(1, 1), (2, 3), (5, -7)]:
        assert abs(esch_order_h4(aloff_wallach_params(p, q))) == p * p + p * q + q * q


# ---------------------------------------------------------------- vertical vector


def test_vertical_vector():
    alg = su3()
    I = np.eye(3)
    assert np.allclose(esch_vertical_vector(E((1, 2, -3), (1, 2, -3)), I), 0)
    v = esch_vertical_vector(E((1, 1, -2), (0, 0, 0)), I)
    assert np.allclose(alg.to_matrix(v), 1j * np.diag([1.0, 1.0, -2.0]))
    g = random_group_element(alg, 3).matrix
    p = E((4, -1, 0), (2, 2, -1))
    M = g.conj().T @ (1j * np.diag([4.0, -1, 0]) - 1j * I) @ g - (1j * np.diag([2.0, 2, -1]) - 1j * I)
    assert np.allclose(alg.to_matrix(esch_vertical_vector(p, g)), M, atol=1e-12)


# ---------------------------------------------------------------- sampler


def test_sampler_positive_example():
    rep = esch_horizontal_flat_sampler(E((1, 1, -2), (0, 0, 0)), t=0.7, samples=10_000)
    assert rep.margin > 1e-6 and rep.integer_positive
    assert rep.orientation == "inverted"
    assert rep.as_dict()["blocks"][0]["margin"] >= 0


def test_sampler_exposes_w10():
    rep = esch_horizontal_flat_sampler(aloff_wallach_params(1, 0), t=0.7, samples=10_000)
    assert rep.margin < 1e-6 and not rep.integer_positive


def test_sampler_rejects_t():
    with pytest.raises(BiquotientError):
        esch_horizontal_flat_sampler(E((1, 1, -2), (0, 0, 0)), t=1.0)


def test_sampler_is_deterministic():
    p = E((2, 3, -5), (0, 0, 0))
    a = esch_horizontal_flat_sampler(p, samples=500, seed=4)
    b = esch_horizontal_flat_sampler(p, samples=500, seed=4)
    assert a.as_dict() == b.as_dict()


def test_integer_check_matches_criterion():
    rng = np.random.default_rng(11)
    seen = 0
    while seen < 100:
        k = rng.integers(-10, 11, 3)
        l = rng.integers(-10, 11, 2)
        p = E(tuple(k), (int(l[0]), int(l[1]), int(k.sum() - l.sum())))
        if not esch_is_free(p):
            continue
        seen += 1
        rep = esch_horizontal_flat_sampler(p, samples=10)
        assert rep.integer_positive == esch_is_positive(p)


@pytest.mark.parametrize("p", free_positive(count=8, seed=3), ids=str)
def test_sampler_sound_on_positive_tuples(p):
    assert esch_horizontal_flat_sampler(p, t=0.7, samples=2000).margin > 1e-6


# ---------------------------------------------------------------- Bazaikin


@pytest.mark.parametrize("q,free,positive,r", [
    ((1, 1, 1, 1, 1), True, True, -5),
    ((1, 1, 1, 1, 3), True, True, -13),
    ((1, 1, 1, 1, 2), False, None, None),
    ((1, 1, 1, 1, -3), None, False, None),
    ((-1, -1, -1, -1, -1), True, True, 5),
])
def test_bazaikin_examples(q, free, positive, r):
    p = B(q)
    if free is not None:
        assert baz_is_free(p) is free
    if positive is not None:
        assert baz_is_positive(p) is positive
    if r is not None:
        assert baz_order_h6(p) == r


def test_bazaikin_divisibility_error():
    with pytest.raises(BiquotientError, match="not divisible"):
        baz_order_h6(B((1, 1, 0, 0, 0)))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-7, 7).map(lambda v: 2 * v + 1), min_size=5, max_size=5))
def test_bazaikin_symmetries(q):
    p = B(tuple(q))
    free, pos = baz_is_free(p), baz_is_positive(p)
    for perm in itertools.permutations(q):
        assert baz_is_free(B(perm)) == free
        assert baz_is_positive(B(perm)) == pos
    neg = B(tuple(-v for v in q))
    assert baz_is_free(neg) == free and baz_is_positive(neg) == pos
    if free:
        assert baz_order_h6(neg) == -baz_order_h6(p)


@pytest.mark.parametrize("r,s,expected", [(5, 1, 3), (1, 1, 0), (1, 5, 3), (9, -3, 9)])
def test_ps_bundle_order(r, s, expected):
    assert ps_bundle_order(r, s) == expected


def test_ps_bundle_order_congruence():
    with pytest.raises(BiquotientError):
        ps_bundle_order(3, 1)
