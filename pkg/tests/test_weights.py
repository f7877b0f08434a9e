import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornergrowth.weights import (DOMAIN_WEIGHTS, WeightField, domain_seed,
                                  hash_exp1_reference, hash_u01)


def test_same_site_same_value():
    f = WeightField(seed=123)
    assert f.weight_at((5, 9)) == f.weight_at((5, 9))
    assert f.weight_at((-2, 7)) == f.weight_at((-2, 7))


def test_scalar_matches_rectangle_bitwise():
    f = WeightField(seed=7)
    w = f.rectangle(6, 8, origin=(-3, 2))
    for a in range(6):
        for b in range(8):
            assert f.weight_at((-3 + a, 2 + b)) == w[a, b]


def test_evaluation_order_independent():
    f = WeightField(seed=99)
    sites = [(3, 4), (1, 1), (10, 2), (2, 10), (5, 5)]
    forward = [f.weight_at(z) for z in sites]
    backward = [f.weight_at(z) for z in reversed(sites)]
    assert forward == backward[::-1]
    # sub-rectangle values equal the same entries of a larger rectangle
    big = f.rectangle(12, 12)
    small = f.rectangle(4, 5, origin=(3, 2))
    assert np.array_equal(small, big[2:6, 1:6])


def test_distinct_seeds_differ():
    a = WeightField(seed=1).rectangle(10, 10)
    b = WeightField(seed=2).rectangle(10, 10)
    assert not np.array_equal(a, b)


def test_strictly_positive_and_finite():
    w = WeightField(seed=11).rectangle(500, 500)
    assert (w > 0).all()
    assert np.isfinite(w).all()


def test_mean_one_million_sites():
    # LLN for Exp(1); the same tolerance holds for a reference generator.
    w = WeightField(seed=202).rectangle(1000, 1000)
    assert abs(w.mean() - 1.0) < 0.005
    ref = np.random.default_rng(202).exponential(size=1_000_000)
    assert abs(ref.mean() - 1.0) < 0.005


def test_variance_one_million_sites():
    w = WeightField(seed=303).rectangle(1000, 1000)
    assert abs(w.var() - 1.0) < 0.01


def test_ks_against_exp1():
    # sup distance of the empirical CDF from 1 - e^-x at 1e5 samples
    w = np.sort(WeightField(seed=404).rectangle(400, 250).ravel())
    cdf = -np.expm1(-w)
    n = w.size
    up = np.arange(1, n + 1) / n - cdf
    dn = cdf - np.arange(0, n) / n
    ks = max(up.max(), dn.max())
    assert ks < 0.006


def test_reference_path_agrees_with_kernel():
    # numpy log1p may differ from libm by one ulp; uniforms are identical
    f = WeightField(seed=31)
    ii = np.arange(-5, 20, dtype=np.int64)[:, None]
    jj = np.arange(-7, 9, dtype=np.int64)[None, :]
    ref = hash_exp1_reference(f.dseed, ii, jj)
    got = f.rectangle(25, 16, origin=(-5, -7))
    assert np.allclose(ref, got, rtol=5e-16, atol=0)


def test_domain_separation():
    s = 42
    assert domain_seed(s, DOMAIN_WEIGHTS) != domain_seed(s, DOMAIN_WEIGHTS + 1)
    u1 = hash_u01(domain_seed(s, DOMAIN_WEIGHTS), 1, 1)
    u2 = hash_u01(domain_seed(s, DOMAIN_WEIGHTS + 1), 1, 1)
    assert u1 != u2


def test_rectangle_cache_policy():
    f = WeightField(seed=5, cache="rectangle")
    a = f.rectangle(10, 10)
    b = f.rectangle(10, 10)
    assert a is b
    g = WeightField(seed=5, cache="none")
    assert g.rectangle(10, 10) is not g.rectangle(10, 10)
    with pytest.raises(ValueError):
        WeightField(seed=5, cache="bogus")


def test_bad_rectangle_extents():
    with pytest.raises(ValueError):
        WeightField(seed=1).rectangle(0, 5)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**63 - 1),
       i=st.integers(min_value=-10**6, max_value=10**6),
       j=st.integers(min_value=-10**6, max_value=10**6))
def test_weight_pure_positive(seed, i, j):
    f = WeightField(seed=seed)
    v = f.weight_at((i, j))
    assert v > 0 and math.isfinite(v)
    assert f.weight_at((i, j)) == v
