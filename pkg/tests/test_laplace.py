"""Tests for the thermodynamic-limit Laplace analysis."""

import math

import numpy as np
import pytest

from dicke.core.errors import DomainError, NoTransitionError
from dicke.core.model import ModelParams
from dicke.ensembles.laplace import (
    STATE_COLUMNS,
    LaplaceEnsemble,
    critical_beta,
    laplace_djz_de,
    laplace_maximize,
    laplace_observables,
    laplace_sweep,
    order_parameter,
    psi_prime,
    psi_second,
    solve_gap_equation,
    stationary_maxima,
    write_states,
)

BETA_C = math.log(1.25)


@pytest.fixture
def params():
    return ModelParams(lam=1.5, n_atoms=100_000)


class TestCriticalPoint:
    """Tests for critical_beta."""

    def test_reference_values(self, params):
        """Test beta_c = 2 atanh(1/9) and E_c/N = Jz_c/N = -1/18 at lambda = 1.5."""
        point = critical_beta(params)
        assert point.beta_c == pytest.approx(0.223144, abs=1e-6)
        assert point.beta_c == pytest.approx(BETA_C, rel=1e-12)
        assert point.e_c_per_atom == pytest.approx(-1 / 18)
        assert point.jz_c_per_atom == pytest.approx(-1 / 18)

    def test_weaker_coupling(self):
        """Test lambda = 0.6 gives beta_c close to 1.7130."""
        point = critical_beta(ModelParams(lam=0.6))
        assert point.beta_c == pytest.approx(1.7130, abs=1e-4)

    def test_below_critical_coupling(self):
        """Test the normal phase has no transition."""
        with pytest.raises(NoTransitionError, match="no thermal phase transition"):
            critical_beta(ModelParams(lam=0.45))

    def test_at_critical_coupling(self):
        """Test lambda_c sends beta_c to infinity."""
        with pytest.raises(NoTransitionError, match="QPT at beta -> infinity"):
            critical_beta(ModelParams(lam=0.5))

    def test_block(self, params):
        """Test the key=value block."""
        lines = critical_beta(params).to_block().splitlines()
        assert [line.split("=")[0] for line in lines] == [
            "beta_c",
            "e_c_per_atom",
            "jz_c_per_atom",
        ]
        assert float(lines[0].split("=")[1]) == pytest.approx(BETA_C)


class TestMaximizer:
    """Tests for the maximum of Psi."""

    def test_trivial_branch(self, params):
        """Test y0 = 0 above the critical temperature."""
        state = laplace_maximize(0.1, params)
        assert state.y0 == pytest.approx(0.0, abs=1e-12)
        assert state.branch == "trivial"
        assert state.psi_second_derivative < 0

    @pytest.mark.parametrize("factor", [2, 5, 10])
    def test_gap_equation(self, params, factor):
        """Test the maximizer agrees with the gap-equation solution."""
        beta = factor * BETA_C
        z = solve_gap_equation(beta, params)
        state = laplace_maximize(beta, params)
        assert state.branch == "broken"
        assert state.y0 == pytest.approx(order_parameter(z, params), abs=1e-8)
        assert state.branches == pytest.approx((-state.y0, state.y0))

    @pytest.mark.parametrize("beta", [0.1, 0.5, 3.0])
    def test_stationary(self, params, beta):
        """Test Psi'(y0) = 0 and Psi''(y0) < 0."""
        state = laplace_maximize(beta, params)
        assert float(psi_prime(state.y0, beta, params)) == pytest.approx(0.0, abs=1e-10)
        assert float(psi_second(state.y0, beta, params)) < 0

    def test_critical_flag(self, params):
        """Test the vanishing curvature at beta_c is flagged."""
        state = laplace_maximize(critical_beta(params).beta_c, params)
        assert state.critical

    def test_field_selects_branch(self, params):
        """Test a positive field picks the positive maximizer."""
        assert laplace_maximize(1.0, params, epsilon=1e-3).y0 > 0
        assert laplace_maximize(1.0, params, epsilon=-1e-3).y0 < 0

    def test_uncoupled(self):
        """Test lambda = 0 has the single maximum y0 = 0."""
        assert stationary_maxima(1.0, ModelParams(lam=0.0)) == [0.0]

    def test_beta_positive(self, params):
        """Test beta must be positive."""
        with pytest.raises(DomainError):
            laplace_maximize(0.0, params)


class TestGapEquation:
    """Tests for solve_gap_equation."""

    def test_root(self, params):
        """Test tanh(beta z / 2) = z / 9 at the root."""
        z = solve_gap_equation(1.0, params)
        assert z > 1
        assert math.tanh(0.5 * z) == pytest.approx(z / 9, abs=1e-12)

    def test_normal_phase(self, params):
        """Test no nontrivial root above the critical temperature."""
        with pytest.raises(NoTransitionError):
            solve_gap_equation(0.1, params)

    def test_normal_coupling(self):
        """Test no nontrivial root below the critical coupling."""
        with pytest.raises(NoTransitionError):
            solve_gap_equation(10.0, ModelParams(lam=0.3))


class TestObservables:
    """Tests for laplace_observables."""

    def test_energy_at_transition(self, params):
        """Test E/N -> -1/18 as beta -> beta_c from below."""
        energy, jz, jx = laplace_observables(BETA_C * (1 - 1e-9), params)
        assert energy == pytest.approx(-1 / 18, abs=1e-8)
        assert jz == pytest.approx(-1 / 18, abs=1e-8)
        assert jx == pytest.approx(0.0, abs=1e-12)

    def test_ground_state(self, params):
        """Test E/N -> -(lambda^2 + 1/(16 lambda^2)) at low temperature."""
        energy = laplace_observables(50.0, params)[0]
        assert energy == pytest.approx(-(2.25 + 1 / 36), abs=1e-6)

    @pytest.mark.parametrize("beta", [0.5, 2.0, 10.0])
    def test_jz_plateau(self, params, beta):
        """Test Jz/N = -1/18 throughout the broken phase."""
        assert laplace_observables(beta, params)[1] == pytest.approx(-1 / 18, rel=1e-9)

    def test_high_temperature(self, params):
        """Test E/N approaches zero from below as beta -> 0."""
        energy = laplace_observables(1e-3, params)[0]
        assert -1e-3 < energy < 0

    def test_epsilon_limits_broken(self, params):
        """Test the two eps -> 0 limits give opposite order parameters."""
        minus = laplace_observables(2.0, params, "limit-plus")[2]
        plus = laplace_observables(2.0, params, "limit-minus")[2]
        assert plus > 0.1
        assert minus == pytest.approx(-plus, rel=1e-6)

    def test_epsilon_limits_normal(self, params):
        """Test the order parameter vanishes above the critical temperature."""
        for mode in ("limit-plus", "limit-minus"):
            assert laplace_observables(0.1, params, mode)[2] == pytest.approx(0.0, abs=1e-6)

    def test_epsilon_mode(self, params):
        """Test unknown eps modes are rejected."""
        with pytest.raises(ValueError):
            laplace_observables(1.0, params, "limit")

    def test_djz_de(self, params):
        """Test dJz/dE jumps from one to zero at the transition."""
        assert laplace_djz_de(0.9 * BETA_C, params) == pytest.approx(1.0, abs=0.02)
        assert laplace_djz_de(1.1 * BETA_C, params) == pytest.approx(0.0, abs=0.02)


class TestLaplaceEnsemble:
    """Tests for LaplaceEnsemble sweeps."""

    def test_curve(self, params):
        """Test both order-parameter branches on a two-point sweep."""
        curve = LaplaceEnsemble(params).curve(np.array([0.1, 2.0]))
        assert curve.ensemble == "laplace"
        # sorted by energy: the cold point first
        assert curve.beta[0] == 2.0
        assert curve.jx_plus_per_atom[0] > 0.1
        assert curve.jx_minus_per_atom[0] == pytest.approx(-curve.jx_plus_per_atom[0])
        assert curve.jx_plus_per_atom[1] == pytest.approx(0.0, abs=1e-6)

    def test_finite_field(self):
        """Test a finite field gives the branch it favours."""
        params = ModelParams(lam=1.5, epsilon=1e-3)
        curve = LaplaceEnsemble(params).curve(np.array([2.0]))
        assert curve.jx_minus_per_atom[0] < -0.1

    def test_write_states(self, params, tmp_path):
        """Test the maximizer trajectory file."""
        states = laplace_sweep(params, np.array([0.1, 1.0]))
        path = write_states(states, tmp_path / "states.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(STATE_COLUMNS)
        assert lines[1].endswith(",trivial")
        assert lines[2].endswith(",broken")
