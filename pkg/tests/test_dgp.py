import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from antishift import dgp
from antishift.errors import ConfigError, DegenerateConditioningError
from antishift.runner import scenario

S1 = scenario(1).dgp_source
S3 = scenario(3).dgp_source

probs = st.floats(0.0, 1.0)
means = st.floats(-5.0, 5.0)


@st.composite
def causal_dgps(draw):
    mu = ((draw(means), draw(means)), (draw(means), draw(means)))
    return dgp.CausalDgp(p=draw(probs), p0=draw(probs), p1=draw(probs), mu=mu)


@st.composite
def spurious_dgps(draw):
    mu = ((draw(means), draw(means)), (draw(means), draw(means)))
    return dgp.SpuriousDgp(p2=draw(probs), p=draw(probs), mu=mu)


def test_marginal_v_examples():
    assert dgp.marginal_v(S1) == 0.4
    sym = dgp.SpuriousDgp(p2=0.5, p=0.5, mu=S3.mu)
    assert dgp.marginal_v(sym) == 0.5
    d = dgp.SpuriousDgp(p2=0.22, p=0.2, mu=S3.mu)
    assert dgp.marginal_v(d) == pytest.approx(0.22 * 0.2 + 0.78 * 0.8, abs=1e-15)


def test_marginal_v_spurious_matches_monte_carlo():
    d = dgp.SpuriousDgp(p2=0.22, p=0.2, mu=S3.mu)
    n = 2**16
    freq = dgp.sample(d, n, 4).v.mean()
    q = dgp.marginal_v(d)
    assert abs(freq - q) <= 4 * math.sqrt(q * (1 - q) / n)


def test_cond_y_given_v_examples():
    assert dgp.cond_y_given_v(S1, 0) == pytest.approx(0.8)
    assert dgp.cond_y_given_v(S1, 1) == 0.9
    sym = dgp.SpuriousDgp(p2=0.5, p=0.5, mu=S3.mu)
    assert dgp.cond_y_given_v(sym, 1) == 0.5


def test_cond_y_given_v_spurious_degenerate():
    # p2 = 1 and p = 0 puts all mass on V = 0
    d = dgp.SpuriousDgp(p2=1.0, p=0.0, mu=S3.mu)
    with pytest.raises(DegenerateConditioningError):
        dgp.cond_y_given_v(d, 1)


def test_likelihood_examples():
    mu = S1.mu[1][0]
    assert dgp.likelihood(S1, mu, 1, 0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)
    assert dgp.likelihood(S1, mu + 1, 1, 0) == pytest.approx(
        math.exp(-0.5) / math.sqrt(2 * math.pi), rel=1e-15
    )
    # extended-precision Gaussian density at x=0, mu=1
    assert dgp.likelihood(S1, 0.0, 1, 0) == pytest.approx(0.24197072451914334979, rel=1e-14)


@pytest.mark.parametrize("d", [S1, scenario(2).dgp_source, S3])
def test_joint_density_normalises(d):
    lo = min(min(r) for r in d.mu) - 10
    hi = max(max(r) for r in d.mu) + 10
    total = sum(
        quad(lambda x: dgp.joint_density(d, x, y, v), lo, hi, epsabs=1e-13, epsrel=1e-13)[0]
        for y in (0, 1)
        for v in (0, 1)
    )
    assert abs(total - 1) <= 1e-9


@settings(max_examples=50, deadline=None)
@given(spurious_dgps(), st.floats(-8, 8))
def test_joint_factorisation_spurious(d, x):
    for v in (0, 1):
        pv = dgp.marginal_v(d) if v == 1 else 1 - dgp.marginal_v(d)
        if pv == 0:
            continue
        for y in (0, 1):
            pyv = dgp.cond_y_given_v(d, v)
            pyv = pyv if y == 1 else 1 - pyv
            expected = dgp.likelihood(d, x, y, v) * pyv * pv
            assert dgp.joint_density(d, x, y, v) == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_joint_density_scenario3_component_product():
    # N(0; 0, 1) * P(Y=1) * P(V=1|Y=1) in 50-digit arithmetic
    assert dgp.joint_density(S3, 0.0, 1, 1) == pytest.approx(0.017553460337663037829, rel=1e-14)


def test_shift_identity_and_invariants():
    assert dgp.shift(S1, S1.p) == S1
    t = dgp.shift(S1, 0.9)
    for v in (0, 1):
        assert dgp.cond_y_given_v(t, v) == dgp.cond_y_given_v(S1, v)
    assert dgp.marginal_y(dgp.shift(S3, 0.9)) == 0.22


@settings(max_examples=100, deadline=None)
@given(causal_dgps(), probs)
def test_causal_shift_keeps_conditionals_bitwise(d, p):
    t = dgp.shift(d, p)
    assert (t.p0, t.p1, t.mu, t.sigma) == (d.p0, d.p1, d.mu, d.sigma)
    for v in (0, 1):
        assert dgp.cond_y_given_v(t, v) == dgp.cond_y_given_v(d, v)
        for y in (0, 1):
            assert dgp.likelihood(t, 0.3, y, v) == dgp.likelihood(d, 0.3, y, v)


@settings(max_examples=100, deadline=None)
@given(spurious_dgps(), probs)
def test_spurious_shift_keeps_py(d, p):
    t = dgp.shift(d, p)
    assert dgp.marginal_y(t) == dgp.marginal_y(d) == d.p2
    assert t.mu == d.mu


def test_sample_frequencies():
    n = 2**16
    data = dgp.sample(S1, n, 123)
    assert abs(data.v.mean() - 0.4) <= 4 * math.sqrt(0.4 * 0.6 / n)
    y1 = data.y[data.v == 1]
    assert abs(y1.mean() - 0.9) <= 4 * math.sqrt(0.9 * 0.1 / len(y1))


def test_sample_deterministic():
    a = dgp.sample(S3, 1000, 7)
    b = dgp.sample(S3, 1000, 7)
    for col in ("v", "y", "x"):
        np.testing.assert_array_equal(getattr(a, col), getattr(b, col))
    assert a.count == len(list(a)) == 1000
    c = dgp.sample(S3, 1000, 8)
    assert not np.array_equal(a.x, c.x)


def test_sample_degenerate_probabilities():
    d = dgp.CausalDgp(p=1.0, p0=1.0, p1=0.0, mu=S1.mu)
    data = dgp.sample(d, 500, 0)
    assert data.v.min() == 1 and data.y.max() == 0


def test_sample_rows():
    data = dgp.sample(S1, 3, 0)
    row = data[0]
    assert isinstance(row, dgp.Sample)
    assert row == next(iter(data))


def test_validation():
    with pytest.raises(ValueError):
        dgp.CausalDgp(p=1.2, p0=0.2, p1=0.9, mu=S1.mu)
    with pytest.raises(ValueError):
        dgp.CausalDgp(p=0.2, p0=0.2, p1=0.9, mu=S1.mu, sigma=2.0)
    with pytest.raises(ValueError):
        dgp.SpuriousDgp(p2=0.2, p=0.2, mu=((0, math.inf), (0, 0)))
    with pytest.raises(ValueError):
        dgp.sample(S1, 0, 0)


def test_config_roundtrip(tmp_path):
    path = tmp_path / "s3.toml"
    path.write_text('family = "spur"\np = 0.2\np2 = 0.22\n'
                    "mu00 = -3.4\nmu10 = -0.5\nmu01 = -1.7\nmu11 = 0.0\n")
    assert dgp.load_config(path) == S3
    assert dgp.from_config(dgp.to_config(S1)) == S1


def test_config_rejects_unknown_and_missing_keys():
    cfg = dgp.to_config(S1)
    with pytest.raises(ConfigError, match="unknown"):
        dgp.from_config({**cfg, "sigma": 1.0})
    del cfg["p0"]
    with pytest.raises(ConfigError, match="p0"):
        dgp.from_config(cfg)
    with pytest.raises(ConfigError, match="family"):
        dgp.from_config({**dgp.to_config(S1), "family": "other"})
