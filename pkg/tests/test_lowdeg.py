import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from corrspike import lowdeg as L
from corrspike.errors import ParameterError
from corrspike.prior import PriorKind, PriorSpec, RhoMode

from lowdeg_oracle import exact_adv_wigner


def test_exp_trunc_examples():
    assert L.exp_trunc(0.0, 7) == 1.0
    assert L.exp_trunc(1.0, 2) == 2.5
    for x in np.linspace(0, 5, 21):
        assert abs(L.exp_trunc(x, 40) - math.exp(x)) <= 1e-10 * math.exp(x)


@given(st.floats(0, 20), st.integers(0, 30))
def test_exp_trunc_monotone(x, D):
    a, b = L.exp_trunc(x, D), L.exp_trunc(x, D + 1)
    assert a <= b * (1 + 1e-15) and b <= math.exp(x) * (1 + 1e-12)


def test_exp_trunc_vectorized():
    np.testing.assert_allclose(L.exp_trunc(np.array([0.0, 1.0]), 2), [1.0, 2.5])


def test_degenerate_advantages():
    spec = L.default_spec(0.5)
    for e in (L.adv_wigner_mc(spec, 0, 0, 100, 10, 1000), L.adv_wigner_mc(spec, 1, 1, 100, 0, 1000),
              L.adv_wishart_mc(spec, 0, 0, 100, 400, 10, 1000),
              L.adv_wishart_mc(spec, 1, 1, 100, 400, 0, 1000)):
        assert e.value == 1.0 and e.std_error == 0.0
    with pytest.raises(ParameterError):
        L.adv_wigner_mc(spec, 1, 1, 100, 5, 10)


def test_multinomial_overlaps_match_direct_sampling():
    spec = PriorSpec(PriorKind.RADEMACHER, 0.6, rho_mode=RhoMode.SQUARED)
    ox, oy = L.sample_overlaps(spec, 50, 40_000, 1)
    rng = np.random.default_rng(2)
    from corrspike.prior import sample_spikes
    dx, dy = [], []
    for s in range(4000):
        a, b = sample_spikes(spec, 50, rng.integers(2**32)), sample_spikes(spec, 50, rng.integers(2**32))
        dx.append(a.x @ b.x)
        dy.append(a.y @ b.y)
    dx, dy = np.array(dx), np.array(dy)
    # E<x,x'>^2 = n, E<x,x'>^2<y,y'>^2 = n^2 + 2n(n-1) r^4 ... compare moments empirically
    for f in (lambda a, b: a**2, lambda a, b: a * b, lambda a, b: a**2 * b**2):
        m1, m2 = f(ox, oy).mean(), f(dx, dy).mean()
        se = math.hypot(f(ox, oy).std() / math.sqrt(ox.size), f(dx, dy).std() / math.sqrt(dx.size))
        assert abs(m1 - m2) < 5 * se
    assert np.mean(ox * oy) == pytest.approx(50 * 0.36**2, rel=0.1)


def test_sparse_and_gaussian_overlap_second_moments():
    for spec in (PriorSpec(PriorKind.SPARSE, 0.5, p=0.3), PriorSpec(PriorKind.GAUSSIAN, 0.5)):
        ox, oy = L.sample_overlaps(spec, 40, 20_000, 3)
        assert np.mean(ox**2) == pytest.approx(40, rel=0.05)
        assert np.mean(ox * oy) == pytest.approx(40 * spec.rho_eff**2, rel=0.1)


def test_estimate_floor():
    spec = L.default_spec(0.3)
    e = L.adv_wigner_mc(spec, 0.6, 0.6, 200, 6, 5000, seed=1)
    assert e.value >= 1 - 3 * e.std_error
    w = L.adv_wishart_mc(spec, 0.6, 0.6, 200, 800, 6, 5000, seed=1)
    assert w.value >= 1 - 3 * w.std_error


def test_phi_examples_and_identity():
    assert L.phi_coefficients(1, 2).c[2] == 6
    assert L.phi_coefficients(2, 1).c[1] == 4
    assert L.phi_coefficients(17, 0).c[0] == 1
    for N in range(1, 9):
        assert L.phi_coefficients_dp(N, 6) == L.phi_coefficients_closed(N, 6)
    assert L.phi_identity_verified()


def test_phi_log_space_consistent():
    big = L.phi_coefficients(200_000, 10)  # N * D above the log-space switch
    exact = L.phi_coefficients_closed(200_000, 10)
    for k in range(11):
        assert big.log_c[k] == pytest.approx(math.log(exact[k]), rel=1e-12)


def test_coefficient_ratio():
    r = L.coefficient_ratio(1000, 10)
    assert r[0] == 1.0 and np.all(r >= 1.0) and np.all(r <= 1.1)


def test_log_phi_matches_direct_sum():
    coef = L.phi_coefficients(5, 8)
    for t in (0.0, 1e-3, 0.7, 4.0):
        assert math.exp(L.log_phi(coef, t)[0]) == pytest.approx(
            sum(c * t**k for k, c in enumerate(coef.c)), rel=1e-12)


def test_csv(tmp_path):
    path = tmp_path / "ld.csv"
    L.write_csv(path, [(500, 15, 0.6, 0.6, 0.3, 1.5, 0.01)])
    assert path.read_text().splitlines() == ["n,D,lambda,mu,rho,estimate,stderr",
                                             "500,15,0.6,0.6,0.3,1.5,0.01"]


def _exhaustive_adv(spec, lam, mu, n, D):
    """Sum over all atom-count vectors of the merged product law."""
    a, b, p = L._product_law(spec)
    total = 0.0
    for counts in itertools.product(range(n + 1), repeat=len(p)):
        if sum(counts) != n:
            continue
        c = np.array(counts)
        coef = math.factorial(n) / math.prod(math.factorial(k) for k in counts)
        s, t = c @ a, c @ b
        total += coef * np.prod(p**c) * L.exp_trunc((lam**2 * s**2 + mu**2 * t**2) / (2 * n), D)
    return total


def test_moment_oracle_against_exhaustive_sum():
    spec = L.default_spec(0.7)
    for n, D in ((3, 4), (5, 6)):
        assert exact_adv_wigner(spec, 0.9, 0.6, n, D) == pytest.approx(
            _exhaustive_adv(spec, 0.9, 0.6, n, D), rel=1e-12)


def test_mc_matches_moment_oracle_below_threshold():
    spec = L.default_spec(0.3)
    e = L.adv_wigner_mc(spec, 0.6, 0.6, 500, 15, 20_000, seed=4)
    assert abs(e.value - exact_adv_wigner(spec, 0.6, 0.6, 500, 15)) < 4 * e.std_error
