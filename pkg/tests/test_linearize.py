import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from urllc_admission import linearize as L


def rand_c(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def fd_gradient(fun, m: np.ndarray, x: float, eps: float = 1e-6):
    """Central differences over (Re m, Im m) and the scalar x."""
    v = L.to_real(m)
    g = np.zeros(v.size)
    for i in range(v.size):
        e = np.zeros(v.size)
        e[i] = eps * max(1.0, abs(v[i]))
        g[i] = (fun(L.to_complex(v + e), x) - fun(L.to_complex(v - e), x)) / (2 * e[i])
    ex = eps * max(1.0, abs(x))
    return g, (fun(m, x + ex) - fun(m, x - ex)) / (2 * ex)


def rel_err(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))) / max(1e-12, np.max(np.abs(b))))


def test_real_complex_round_trip():
    x = rand_c(np.random.default_rng(0), 5)
    assert np.array_equal(L.to_complex(L.to_real(x)), x)


@pytest.mark.parametrize("seed", range(20))
def test_g_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    h, m = rand_c(rng, 4), rand_c(rng, 4)
    beta = rng.uniform(0.5, 3.0)
    gm, gb = L.g_gradient(m, beta, h)
    fm, fb = fd_gradient(lambda mm, b: L.g_value(mm, b, h), m, beta)
    assert rel_err(gm, fm) < 1e-5 and rel_err([gb], [fb]) < 1e-5


@pytest.mark.parametrize("seed", range(20))
def test_z_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(100 + seed)
    h, m = rand_c(rng, 4), rand_c(rng, 4)
    b, n0 = rng.uniform(0.5, 3.0), rng.uniform(0.1, 2.0)
    gm, gb = L.z_gradient(m, b, h, n0)
    fm, fb = fd_gradient(lambda mm, bb: L.z_value(mm, bb, h, n0), m, b)
    assert rel_err(gm, fm) < 1e-5 and rel_err([gb], [fb]) < 1e-5


def test_gradient_of_gain_is_2hhm():
    rng = np.random.default_rng(1)
    h, m = rand_c(rng, 3), rand_c(rng, 3)
    gm, _ = L.g_gradient(m, 1.0, h)
    assert np.allclose(L.to_complex(gm), 2 * h * np.vdot(h, m))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_g_lin_is_a_global_underestimator(seed):
    rng = np.random.default_rng(seed)
    h, m, mh = rand_c(rng, 4), rand_c(rng, 4), rand_c(rng, 4)
    beta, bh = 10 ** rng.uniform(-2, 2), 10 ** rng.uniform(-2, 2)
    assert L.g_lin(m, beta, mh, bh, h) <= L.g_value(m, beta, h) + 1e-12 * max(1.0, L.g_value(m, beta, h))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_z_lin_is_a_global_underestimator(seed):
    rng = np.random.default_rng(seed)
    h, m, mh = rand_c(rng, 4), rand_c(rng, 4), rand_c(rng, 4)
    b, bh = 10 ** rng.uniform(-2, 2), 10 ** rng.uniform(-2, 2)
    z = L.z_value(m, b, h, 0.7)
    assert L.z_lin(m, b, mh, bh, h, 0.7) <= z + 1e-12 * max(1.0, z)


def test_linearisations_are_tight_at_the_anchor():
    rng = np.random.default_rng(2)
    h, m = rand_c(rng, 4), rand_c(rng, 4)
    assert L.g_lin(m, 1.3, m, 1.3, h) == pytest.approx(L.g_value(m, 1.3, h), rel=1e-13)
    assert L.z_lin(m, 0.4, m, 0.4, h, 2.0) == pytest.approx(L.z_value(m, 0.4, h, 2.0), rel=1e-13)


def test_domain_errors():
    h = np.ones(2, complex)
    with pytest.raises(ValueError):
        L.g_value(h, 0.0, h)
    with pytest.raises(ValueError):
        L.g_gradient(h, -1.0, h)
    with pytest.raises(ValueError):
        L.z_value(h, 0.0, h, 1.0)
    with pytest.raises(ValueError):
        L.z_gradient(h, 1.0, h, 0.0)


def test_objective_pieces():
    s, sh = np.array([0.0, 2.0]), np.array([1.0, 0.0])
    assert L.objective_lin(s, sh, 1e-3) == pytest.approx(2.0 / 1e-3)
    assert L.log_surrogate(np.zeros(3), 1e-3) == pytest.approx(3 * np.log(1e-3))


@given(st.lists(st.floats(0, 1e3), min_size=1, max_size=6), st.lists(st.floats(0, 1e3), min_size=6, max_size=6))
def test_objective_lin_majorises_log_surrogate(s, sh):
    # concavity: log-sum lies below its tangent, which the weighted sum is up to a constant
    s = np.array(s)
    sh = np.array(sh[: s.size])
    d = 1e-3
    lhs = L.log_surrogate(s, d)
    rhs = L.log_surrogate(sh, d) + L.objective_lin(s - sh, sh, d)
    assert lhs <= rhs + 1e-9 * max(1.0, abs(rhs))


def test_expansion_point_validation():
    kw = dict(embb_beamformers=np.zeros((1, 2)), interference=np.array([1.0]),
              urllc_beamformers=np.zeros((1, 2)), urllc_bandwidths=np.array([1.0]), slack=np.array([0.0]))
    L.ExpansionPoint(**kw)
    for key, bad in (("interference", np.array([0.0])), ("urllc_bandwidths", np.array([-1.0])),
                     ("slack", np.array([-0.1]))):
        with pytest.raises(ValueError):
            L.ExpansionPoint(**dict(kw, **{key: bad}))
