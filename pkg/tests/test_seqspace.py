import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from roughideal import registry, seqspace
from roughideal.errors import ArgumentError, UnknownNameError, WeightViolationError
from roughideal.seqspace import (CFunction, EuclideanD, PointSeq, QuadratureC01,
                                 TruncatedSup, WeightedSeq, constant_weights)


# ---------------------------------------------------------------------------
# registry point values

def test_oscillating_sequence_values():
    x, w = registry.paper_sequence("sec2_example")
    t = np.arange(1, 10)
    got = x.points(t)[:, 0]
    want = [t_ ** 2 if math.isqrt(t_) ** 2 == t_ else (-1) ** t_ / t_ + 1 / t_ ** 2
            for t_ in range(1, 10)]
    assert np.allclose(got, want, rtol=0, atol=1e-15)
    assert w(5) == 5.0


def test_inverse_sequence_values():
    x, w = registry.paper_sequence("remark_4_3")
    assert x.point(4)[0] == 0.25
    assert w(3) == 9.0


def test_block_functions_use_dyadic_block_index():
    x, _ = registry.paper_sequence("example_4_4", r=0.5)
    # t = 12 = 4 * 3 lies in block 3, so x_12(u) = u^2 + u/12
    f = x.point(12)
    u = np.linspace(0, 1, 7)
    assert np.allclose(f(u), u ** 2 + u / 12, atol=1e-15)


def test_distance_oracle_profiles():
    x, w = registry.paper_sequence("example_4_6")
    t = np.array([1, 2, 3, 10])
    assert np.allclose(seqspace.distances(x, "0", t), 1.0)
    assert np.allclose(seqspace.distances(x, "P", t), [1.0, 1 / 3, 1.0, 1 / 11])
    assert np.allclose(w(t), [1.0, math.sqrt(2), 1.0, math.sqrt(10)])


def test_unknown_registry_name():
    with pytest.raises(UnknownNameError):
        registry.paper_sequence("no_such_sequence")


def test_registry_has_at_least_eight_entries():
    assert len(registry.registry_names()) >= 8
    for name in registry.registry_names():
        assert registry.describe(name)


# ---------------------------------------------------------------------------
# norms and distances

def test_euclidean_and_sup_norms():
    assert seqspace.ambient_norm(EuclideanD(2), [3.0, 4.0]) == 5.0
    assert seqspace.ambient_norm(EuclideanD(2, "sup"), [3.0, -4.0]) == 4.0
    assert seqspace.ambient_norm(TruncatedSup(3), [0.5, -2.0, 1.0]) == 2.0


def test_candidate_dimension_mismatch():
    x, _ = registry.paper_sequence("const_zero", d=2)
    with pytest.raises(ArgumentError):
        seqspace.distances(x, np.zeros(3), [1, 2])


@pytest.mark.parametrize("f, breaks, exact", [
    (lambda u: u ** 2, (), 1 / 3),
    (lambda u: u - 0.5, (0.5,), 0.25),
    (lambda u: np.sin(2 * np.pi * u), (0.5,), 2 / np.pi),
    (lambda u: np.exp(u), (), math.e - 1),
    (lambda u: np.clip(7 * (u - 0.5), 0, 1), (0.5, 0.5 + 1 / 7), 0.5 - 1 / 14),
])
@pytest.mark.parametrize("rule", ["simpson", "midpoint"])
def test_quadrature_against_closed_form(f, breaks, exact, rule):
    M = 512 if rule == "simpson" else 200_000
    got = seqspace.quadrature_norm(CFunction(f, breaks), M, rule)
    assert got == pytest.approx(exact, abs=1e-8)


def test_quadrature_rejects_small_M():
    with pytest.raises(ArgumentError):
        QuadratureC01(8)


def ramp_integral(t):
    # clip(t (u - 1/2), 0, 1) rises over [1/2, 1/2 + a] with a = min(1/t, 1/2)
    a = min(1 / t, 0.5)
    return t * a * a / 2 + (0.5 - a)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5000), st.integers(1, 60))
def test_ramp_distances_closed_form(t, k):
    # ramps are pointwise ordered, so the distance is the gap of integrals
    x, _ = registry.paper_sequence("example_3_1")
    d = seqspace.distances(x, registry.ramp_function(k), [t])[0]
    assert d == pytest.approx(abs(ramp_integral(t) - ramp_integral(k)), abs=1e-10)


def test_block_function_distance():
    x, _ = registry.paper_sequence("example_4_4", r=0.5)
    t = np.array([1, 3, 2, 6, 4, 12, 1000])
    j = [1, 1, 2, 2, 3, 3, 4]
    for tt, jj in zip(t, j):
        d = seqspace.distances(x, registry.monomial(jj), [tt])[0]
        assert d == pytest.approx(0.5 / tt, rel=1e-10)


def test_truncated_sup_fidelity():
    x, _ = registry.paper_sequence("note_2_5", d=64)
    e3 = registry.basis_vector(3, 64)
    d = seqspace.distances(x, e3, np.arange(1, 65))
    assert d[2] == 0.0
    assert np.all(np.delete(d, 2) == 1.0)
    with pytest.raises(ArgumentError):
        seqspace.distances(x, e3, [65])


def test_distance_oracle_triangle_inequality():
    x, _ = registry.paper_sequence("example_4_6")
    assert x.triangle_violations(np.arange(1, 5001)) == []
    assert seqspace.candidate_distance(x, "0", "P") == 1.0


def test_distance_oracle_unknown_candidate():
    x, _ = registry.paper_sequence("example_4_6")
    with pytest.raises(UnknownNameError):
        x.distance([1], "Q")


def test_weighted_distance_scalar_and_vector():
    x, w = registry.paper_sequence("sec2_example")
    assert seqspace.weighted_distance(x, w, [0.0], 4) == 64.0
    v = seqspace.weighted_distance(x, w, [0.0], [2, 3])
    assert np.allclose(v, [2 * 0.75, 3 * abs(-1 / 3 + 1 / 9)])


# ---------------------------------------------------------------------------
# weights

@pytest.mark.parametrize("name", registry.registry_names())
def test_registry_weights_exceed_beta(name):
    _, w = registry.paper_sequence(name)
    sample = w.sample(5000)
    assert np.all(sample > w.beta)
    assert np.all(np.isfinite(sample))


def test_non_finite_weight_is_rejected():
    with pytest.raises(WeightViolationError):
        WeightedSeq(lambda t: np.where(t == 3, np.inf, 1.0), 0.5, "blowup")


def test_beta_must_be_positive():
    with pytest.raises(ArgumentError):
        WeightedSeq(lambda t: np.ones(t.shape), 0.0, "zero beta")


def test_constant_weights_declare_bound():
    w = constant_weights(2.0)
    assert w.mu == 2.0 and w.infimum() == 2.0 and w.tail_minimum(100) == 2.0


def test_concurrent_sampling_is_consistent():
    w = WeightedSeq(lambda t: 1.0 + np.log(t.astype(float)), 0.99, "log weights",
                    check_horizon=0)
    x, _ = registry.paper_sequence("example_3_1")
    c = registry.ramp_function(3)
    t = np.arange(1, 20001)
    ref_w = w._eval(t)
    ref_d = seqspace.distances(x, c, t[:2000])
    with ThreadPoolExecutor(8) as pool:
        ws = list(pool.map(lambda _: w.sample(20000), range(16)))
        ds = list(pool.map(lambda _: seqspace.distances(x, c, t[:2000]), range(8)))
    assert all(np.array_equal(a, ref_w) for a in ws)
    assert all(np.array_equal(a, ref_d) for a in ds)


def test_point_sequence_shape_check():
    bad = PointSeq(EuclideanD(2), lambda t: np.zeros((t.size, 3)), "wrong shape")
    with pytest.raises(ArgumentError):
        bad.points([1, 2])
