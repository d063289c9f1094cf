import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gauss_squeeze.dynamics import steady_state_covariance
from gauss_squeeze.errors import ConfigError, NumericalError
from gauss_squeeze.metrics import (
    LOG2_DB,
    bogoliubov_params,
    quadrature_squeezing_db,
    reduced_mech_covariance,
    squeezing_report,
    total_squeezing,
    wigner,
)
from gauss_squeeze.model import SqueezedBath, SystemParams

FIG2 = SystemParams(kappa=0.1, gamma_m=1e-6, g0=1e-4, g_minus=0.01, g_plus=0.002, n_th=0.0)


def _v(v33=0.5, v44=0.5, v34=0.0):
    V = np.eye(4) / 2
    V[2, 2], V[3, 3] = v33, v44
    V[2, 3] = V[3, 2] = v34
    return V


def sigmas(max_squeeze=2.0):
    """Physical 2x2 covariances: rotated squeezed thermal states."""
    return st.tuples(st.floats(0.5, 50), st.floats(0.05, max_squeeze), st.floats(0, math.pi)).map(
        lambda a: _rotated(*a)
    )


def _rotated(nu, s, phi):
    R = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    return R @ np.diag([nu * math.exp(-2 * s), nu * math.exp(2 * s)]) @ R.T


class TestQuadrature:
    def test_vacuum_zero_db(self):
        assert quadrature_squeezing_db(_v(), "Q") == 0.0

    def test_half_vacuum_three_db(self):
        assert quadrature_squeezing_db(_v(v33=0.25), "Q") == pytest.approx(3.0103, abs=1e-4)
        assert quadrature_squeezing_db(_v(v44=0.25), "P") == pytest.approx(3.0103, abs=1e-4)

    def test_signed(self):
        assert quadrature_squeezing_db(_v(v44=1.0), "P") < 0

    def test_rejects_nonpositive(self):
        with pytest.raises(NumericalError):
            quadrature_squeezing_db(_v(v33=0.0), "Q")

    def test_rejects_unknown_quadrature(self):
        with pytest.raises(ValueError):
            quadrature_squeezing_db(_v(), "X")

    def test_fig2_point_b(self):
        V = steady_state_covariance(FIG2, SqueezedBath(1.0, 2 * math.pi))
        # reference value: position squeezing peaks at 10.44 dB at theta = 2 pi
        assert quadrature_squeezing_db(V, "Q") == pytest.approx(10.44, abs=0.05)


class TestReducedCovariance:
    def test_vacuum(self):
        np.testing.assert_array_equal(reduced_mech_covariance(np.eye(4) / 2), np.eye(2) / 2)

    def test_symmetric_at_theta0(self):
        sigma = reduced_mech_covariance(steady_state_covariance(FIG2, SqueezedBath(1.0, 0.0)))
        assert sigma[0, 1] == sigma[1, 0]

    def test_cross_correlation_at_half_pi(self):
        sigma = reduced_mech_covariance(steady_state_covariance(FIG2, SqueezedBath(1.0, math.pi / 2)))
        assert abs(sigma[0, 1]) > 1e-6

    def test_heisenberg_bound(self):
        sigma = reduced_mech_covariance(steady_state_covariance(FIG2, SqueezedBath(1.5, 0.7)))
        assert np.linalg.det(sigma) >= 0.25 - 1e-9


class TestTotalSqueezing:
    def test_vacuum_two_conventions(self):
        lam, s_paper, s_norm = total_squeezing(np.eye(2) / 2)
        assert lam == 0.5
        assert s_paper == pytest.approx(3.0103, abs=1e-4)
        assert s_norm == pytest.approx(0.0, abs=1e-12)

    def test_position_squeezed(self):
        lam, _, s_norm = total_squeezing(np.diag([0.25, 1.0]))
        assert lam == 0.25
        assert s_norm == pytest.approx(3.0103, abs=1e-4)

    def test_rejects_nonpositive(self):
        with pytest.raises(NumericalError):
            total_squeezing(np.diag([0.0, 1.0]))

    @given(sigmas())
    def test_convention_link_and_minimality(self, sigma):
        lam, s_paper, s_norm = total_squeezing(sigma)
        assert s_paper - s_norm == pytest.approx(10 * math.log10(2), abs=1e-12)
        assert lam <= sigma[0, 0] * (1 + 1e-12) and lam <= sigma[1, 1] * (1 + 1e-12)

    def test_fig3b_peak(self):
        sigma = reduced_mech_covariance(steady_state_covariance(FIG2, SqueezedBath(1.0, 0.0)))
        # reference value: total squeezing reaches 13.45 dB at even multiples of pi
        assert total_squeezing(sigma)[1] == pytest.approx(13.45, abs=0.05)


class TestWigner:
    def test_vacuum_peak(self):
        g = wigner(np.eye(2) / 2, q=[0.0, 1.0], p=[0.0])
        assert g.W[0, 0] == pytest.approx(1 / math.pi, rel=1e-14)
        assert g.W[0, 0] == pytest.approx(0.31831, abs=1e-5)
        assert g.W[0, 1] == pytest.approx(math.exp(-1) / math.pi, rel=1e-14)
        assert g.W[0, 1] == pytest.approx(0.11709, abs=1e-5)

    def test_default_grid(self):
        g = wigner(np.diag([0.25, 4.0]))
        assert g.W.shape == (201, 201)
        assert g.q[-1] == pytest.approx(5 * 2.0)

    @given(sigmas(max_squeeze=1.0))
    @settings(max_examples=40)
    def test_positive_and_normalised(self, sigma):
        # +-6 sigma along each axis; squeezing bounded so 301 points resolve the narrow direction
        q = np.linspace(-6, 6, 301) * math.sqrt(sigma[0, 0])
        p = np.linspace(-6, 6, 301) * math.sqrt(sigma[1, 1])
        g = wigner(sigma, q=q, p=p)
        assert np.all(g.W >= 0)
        assert 0.99 <= g.riemann_sum() <= 1.01

    def test_quadrature_oracle(self):
        # independent oracle: scipy's bivariate normal pdf
        from scipy.stats import multivariate_normal

        sigma = np.array([[0.3, 0.2], [0.2, 1.7]])
        q = np.linspace(-2, 2, 9)
        p = np.linspace(-3, 3, 7)
        g = wigner(sigma, q=q, p=p)
        Q, P = np.meshgrid(q, p)
        ref = multivariate_normal(mean=[0, 0], cov=sigma).pdf(np.dstack([Q, P]))
        np.testing.assert_allclose(g.W, ref, rtol=1e-12)

    def test_singular_rejected(self):
        with pytest.raises(NumericalError):
            wigner(np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_csv(self, tmp_path):
        g = wigner(np.eye(2) / 2, points=3)
        path = tmp_path / "w.csv"
        with open(path, "w", newline="") as fh:
            g.write_csv(fh)
        lines = path.read_text().splitlines()
        assert lines[0] == "q,p,W"
        assert len(lines) == 10


class TestBogoliubov:
    def test_no_parametric(self):
        assert bogoliubov_params(0.0, 0.01) == (0.0, 0.01)

    def test_working_point(self):
        xi, g_eff = bogoliubov_params(0.002, 0.01)
        assert xi == pytest.approx(0.5 * math.log(1.5), rel=1e-14)
        assert xi == pytest.approx(0.20273, abs=1e-5)
        assert g_eff == pytest.approx(0.0097980, abs=1e-7)

    def test_divergence_near_one(self):
        xi, g_eff = bogoliubov_params(0.01 * (1 - 1e-9), 0.01)
        assert xi > 10 and g_eff < 1e-5

    @pytest.mark.parametrize("gp", [0.01, 0.02])
    def test_rejected(self, gp):
        with pytest.raises(ConfigError):
            bogoliubov_params(gp, 0.01)


class TestReportProperties:
    def test_report_fields(self):
        rep = squeezing_report(FIG2, SqueezedBath(1.0, 0.0))
        assert rep.s_total_paper_db - rep.s_total_norm_db == pytest.approx(LOG2_DB, abs=1e-12)
        assert rep.lambda_min <= 0.5
        assert rep.stable_rh and rep.stable_eig
        assert set(rep.to_dict()) == {
            "s_q_db", "s_p_db", "lambda_min", "s_total_paper_db", "s_total_norm_db", "xi", "g_eff", "stable_rh", "stable_eig",
        }

    def test_theta_periodicity(self):
        for theta in np.linspace(0, 2 * math.pi, 9):
            a = squeezing_report(FIG2, SqueezedBath(1.0, theta))
            b = squeezing_report(FIG2, SqueezedBath(1.0, theta + 2 * math.pi))
            assert abs(a.s_q_db - b.s_q_db) < 1e-9
            assert abs(a.s_p_db - b.s_p_db) < 1e-9
            assert abs(a.lambda_min - b.lambda_min) < 1e-12

    def test_mirror_symmetry(self):
        for theta in np.linspace(0, 2 * math.pi, 13):
            a = squeezing_report(FIG2, SqueezedBath(1.0, theta))
            b = squeezing_report(FIG2, SqueezedBath(1.0, 2 * math.pi - theta))
            assert abs(a.s_total_paper_db - b.s_total_paper_db) < 1e-9

    def test_r0_flat_in_theta(self):
        ref = squeezing_report(FIG2, SqueezedBath(0.0, 0.0)).s_q_db
        for theta in np.linspace(0, 4 * math.pi, 17):
            assert abs(squeezing_report(FIG2, SqueezedBath(0.0, theta)).s_q_db - ref) < 1e-12

    def test_monotone_in_r(self):
        values = [squeezing_report(FIG2, SqueezedBath(r, 0.0)).s_q_db for r in (0.0, 0.5, 1.0, 1.5)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_position_momentum_mirror_at_pi_multiples(self):
        # observed numerically at theta in {pi, 2 pi}; not a general identity
        for theta in (math.pi, 2 * math.pi):
            rep = squeezing_report(FIG2, SqueezedBath(1.0, theta))
            assert rep.s_q_db == pytest.approx(-rep.s_p_db, abs=0.02)

    def test_xi_none_when_undefined(self):
        p = SystemParams(kappa=0.1, gamma_m=0.01, g_minus=0.01, g_plus=0.01)
        rep = squeezing_report(p, SqueezedBath())
        assert rep.xi is None and rep.g_eff is None
