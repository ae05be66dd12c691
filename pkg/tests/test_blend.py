import math

import mpmath
import numpy as np
import pytest

from symmetro import (
    BlochDirection,
    DomainError,
    blend_family,
    build_moments,
    closed_forms,
    figure1_sweep,
    haldane_prior,
    make_fmap,
    optimal_eigenstates,
    solve_optimal,
)
from symmetro.blend import KET0, blend_chi, tau

PI = math.pi


def mp_reference(a, beta):
    """kappa, chi and the derived quantities at 30 digits."""
    mpmath.mp.dps = 30
    a = mpmath.mpf(a)
    kappa = 4 * mpmath.atanh(1 - 2 * a)
    chi = -mpmath.log(a * (1 - a)) / 4 + (mpmath.polylog(2, a) - mpmath.polylog(2, 1 - a)) / kappa
    h2 = mpmath.sin(mpmath.mpf(beta) / 2) ** 2
    return {
        "kappa": float(kappa),
        "chi": float(chi),
        "min_error": float(kappa ** 2 / 12 - 4 * chi ** 2 * h2),
        "gain_ratio": float(48 * chi ** 2 * h2 / kappa ** 2),
    }


def chi_by_quadrature(a):
    mpmath.mp.dps = 25
    a = mpmath.mpf(a)
    kappa = 4 * mpmath.atanh(1 - 2 * a)
    g = lambda t: 2 * mpmath.atanh(2 * t - 1) / (kappa * (1 - t))
    return float(mpmath.quad(g, [a, 0.5, 1 - a]))


class TestDirection:
    def test_unit_vector(self):
        for al, be in [(0.0, 0.3), (1.0, PI / 2), (5.0, PI), (2 * PI + 1.0, 1.0)]:
            assert np.linalg.norm(BlochDirection(al, be).vector) == pytest.approx(1.0, abs=1e-12)

    def test_alpha_wraps(self):
        assert BlochDirection(2 * PI + 0.5, 1.0).alpha == pytest.approx(0.5)

    @pytest.mark.parametrize("beta", [0.0, -0.1, PI + 0.01, float("nan")])
    def test_bad_beta(self, beta):
        with pytest.raises(DomainError):
            BlochDirection(0.0, beta)


class TestFamily:
    @pytest.mark.parametrize("alpha", [0.0, 1.3, 4.0])
    def test_beta_pi_is_diagonal(self, alpha):
        fam = blend_family(BlochDirection(alpha, PI))
        np.testing.assert_allclose(fam.state(0.3), np.diag([0.3, 0.7]), atol=1e-15)

    def test_beta_half_pi(self):
        t = tau(BlochDirection(0.0, PI / 2))
        np.testing.assert_allclose(t, [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)

    def test_tau_projector_and_trace(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            d = BlochDirection(rng.uniform(0, 2 * PI), rng.uniform(0.01, PI))
            t = tau(d)
            np.testing.assert_allclose(t @ t, t, atol=1e-12)
            fam = blend_family(d)
            for eta in rng.uniform(0, 1, 4):
                assert np.trace(fam.state(eta)).real == pytest.approx(1.0, abs=1e-14)
            np.testing.assert_allclose(fam.derivative(0.2), KET0 - t, atol=1e-15)


class TestClosedForms:
    def test_reference_values(self):
        cf = closed_forms(0.01, BlochDirection(0.0, PI / 2))
        ref = mp_reference(0.01, PI / 2)
        assert cf.kappa == pytest.approx(9.190239700269179854, abs=1e-13)
        assert cf.chi == pytest.approx(0.98203590704286324747, abs=1e-13)
        assert cf.s_plus == pytest.approx(1.3888084984773812545, abs=1e-13)
        assert cf.min_error == pytest.approx(ref["min_error"], abs=1e-12)
        assert cf.min_error == pytest.approx(5.1095864335906471059, abs=1e-12)
        assert cf.prior_error == pytest.approx(7.0383754790336453963, abs=1e-12)

    @pytest.mark.parametrize("a", [1e-6, 0.01, 0.1, 0.25, 0.3, 0.49])
    def test_chi_against_mpmath(self, a):
        assert blend_chi(a) == pytest.approx(mp_reference(a, PI)["chi"], rel=1e-12, abs=1e-14)

    @pytest.mark.parametrize("a", [0.01, 0.1, 0.3])
    def test_chi_against_quadrature(self, a):
        assert blend_chi(a) == pytest.approx(chi_by_quadrature(a), abs=1e-12)

    @pytest.mark.parametrize("beta", [0.4, PI / 2, PI])
    def test_invariants(self, beta):
        cf = closed_forms(0.05, BlochDirection(0.7, beta))
        h = math.sin(beta / 2)
        assert cf.s_plus == -cf.s_minus == pytest.approx(2 * cf.chi * h)
        assert cf.gain_ratio == pytest.approx(48 * cf.chi ** 2 * h * h / cf.kappa ** 2)
        assert cf.min_error == pytest.approx(cf.kappa ** 2 / 12 - 4 * cf.chi ** 2 * h * h)

    def test_small_a_approaches_three_quarters_slowly(self):
        # the approach is logarithmic: 3/4 - 2 pi^2 / kappa^2 to leading order
        cf = closed_forms(1e-6, BlochDirection(0.0, PI))
        assert cf.gain_ratio == pytest.approx(mp_reference(1e-6, PI)["gain_ratio"], rel=1e-12)
        assert cf.gain_ratio == pytest.approx(0.75 - 2 * PI ** 2 / cf.kappa ** 2, abs=5e-3)
        assert cf.gain_ratio < 0.75

    def test_local_regime(self):
        for beta in (PI / 2, PI):
            cf = closed_forms(0.49, BlochDirection(0.0, beta))
            asym = math.sin(beta / 2) ** 2 * (2 * 0.49 - 1) ** 2 / 3
            assert 0.9 <= cf.gain_ratio / asym <= 1.1

    @pytest.mark.parametrize("a", [0.0, 0.5, -0.1, 0.7])
    def test_bad_a(self, a):
        with pytest.raises(DomainError):
            closed_forms(a, BlochDirection(0.0, PI))


class TestEigenstates:
    @pytest.mark.parametrize("beta", [0.2, PI / 2, 2.5, PI])
    @pytest.mark.parametrize("alpha", [0.0, PI / 3, 4.0])
    def test_orthonormal(self, alpha, beta):
        p, m = optimal_eigenstates(BlochDirection(alpha, beta))
        assert np.linalg.norm(p) == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.norm(m) == pytest.approx(1.0, abs=1e-10)
        assert abs(np.vdot(p, m)) < 1e-10

    def test_real_at_alpha_zero(self):
        p, m = optimal_eigenstates(BlochDirection(0.0, PI / 2))
        assert np.allclose(p.imag, 0) and np.allclose(m.imag, 0)

    def test_beta_pi_basis(self):
        p, m = optimal_eigenstates(BlochDirection(1.0, PI))
        assert abs(p[0]) == pytest.approx(1.0) and abs(m[1]) == pytest.approx(1.0)

    @pytest.mark.parametrize("beta", [PI / 4, PI / 2, 2.0, PI])
    def test_eigenvectors_of_closed_form_S(self, beta):
        d = BlochDirection(0.4, beta)
        S = KET0 - tau(d)
        for v, sign in zip(optimal_eigenstates(d), (1, -1)):
            np.testing.assert_allclose(S @ v, sign * math.sin(beta / 2) * v, atol=1e-12)

    def test_overlap_with_numerical(self, haldane01, weight):
        d = BlochDirection(PI / 3, PI / 2)
        sol = solve_optimal(build_moments(blend_family(d), haldane01, weight), weight)
        vals, vecs = np.linalg.eigh(sol.S)
        p, m = optimal_eigenstates(d)
        assert abs(np.vdot(vecs[:, 1], p)) >= 1 - 1e-8
        assert abs(np.vdot(vecs[:, 0], m)) >= 1 - 1e-8


GRID = [(a, b, al) for a in (0.01, 0.1, 0.3) for b in (PI / 4, PI / 2, PI) for al in (0.0, PI / 3)]


@pytest.mark.parametrize("a,beta,alpha", GRID)
def test_end_to_end_against_closed_form(a, beta, alpha, weight):
    d = BlochDirection(alpha, beta)
    cf = closed_forms(a, d)
    sol = solve_optimal(build_moments(blend_family(d), haldane_prior(a), weight), weight)
    assert np.linalg.norm(sol.S - 2 * cf.chi * (KET0 - tau(d)), 2) <= 1e-8
    np.testing.assert_allclose(sol.eigenvalues, [cf.s_minus, cf.s_plus], atol=1e-8)
    assert abs(sol.min_error - cf.min_error) <= 1e-8
    assert abs(sol.gain - cf.gain) <= 1e-8
    assert abs(sol.prior_error - cf.prior_error) <= 1e-8


def test_gain_independent_of_alpha(weight):
    prior = haldane_prior(0.05)
    gains = [solve_optimal(build_moments(blend_family(BlochDirection(al, 1.1)), prior, weight), weight).gain
             for al in (0.0, 0.9, 2.5, 5.0)]
    assert max(gains) - min(gains) <= 1e-9


def test_gain_monotone_in_beta(weight):
    prior = haldane_prior(0.05)
    betas = np.linspace(0.1, PI, 12)
    gains = [solve_optimal(build_moments(blend_family(BlochDirection(0.3, b)), prior, weight), weight).gain
             for b in betas]
    assert np.all(np.diff(gains) > 0)


ETA0 = [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99]


@pytest.fixture(scope="module")
def rows():
    return figure1_sweep(0.01, PI / 2, [0.0, PI / 4, PI / 2], ETA0)


class TestFigure1:
    def pick(self, rows, alpha, eta0):
        return next(r for r in rows if r.alpha == pytest.approx(alpha) and r.eta0 == pytest.approx(eta0))

    def test_alpha0_saturates_at_half(self, rows):
        r = self.pick(rows, 0.0, 0.5)
        assert abs(r.mhe - r.min_error) <= 1e-6

    def test_alpha_half_pi_uninformative_at_half(self, rows):
        r = self.pick(rows, PI / 2, 0.5)
        assert abs(r.mhe - r.prior_error) <= 1e-6

    def test_alpha_quarter_pi_near_prior_at_edge(self, rows):
        r = self.pick(rows, PI / 4, 0.01)
        assert abs(r.mhe - r.prior_error) <= 0.05 * r.prior_error

    def test_sandwich(self, rows):
        for r in rows:
            assert not r.error
            assert r.min_error - 1e-9 <= r.mhe <= r.prior_error + 1e-9

    def test_row_order(self, rows):
        assert [(r.alpha, r.eta0) for r in rows][:2] == [(0.0, 0.01), (0.0, 0.1)]

    def test_threads_same_output(self, rows):
        again = figure1_sweep(0.01, PI / 2, [0.0, PI / 4, PI / 2], ETA0, threads=4)
        assert again == rows

    def test_unconjugated_is_alpha_independent(self):
        rows = figure1_sweep(0.01, PI / 2, [0.0, PI / 4, PI / 2], [0.01, 0.5], conjugate_pom=False)
        by_eta = {}
        for r in rows:
            by_eta.setdefault(r.eta0, []).append(r.mhe)
        for vals in by_eta.values():
            assert max(vals) - min(vals) <= 1e-9

    def test_eta0_outside_support(self):
        with pytest.raises(DomainError):
            figure1_sweep(0.01, PI / 2, [0.0], [0.005])
