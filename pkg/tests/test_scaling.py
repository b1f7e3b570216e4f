"""Tests for the finite-size scaling of critical precursors."""

import numpy as np
import pytest

from dicke.core.errors import DomainError, PrecursorNotFoundError
from dicke.core.model import ModelParams
from dicke.scaling import (
    DEFAULT_LADDER,
    Precursor,
    delta_e,
    delta_jz,
    find_precursor_jx,
    find_precursor_jz,
    fit_powerlaw,
    monotonicity_violations,
)
from dicke.scaling.precursors import _parabola_vertex


class TestPowerLawFit:
    """Tests for fit_powerlaw."""

    def test_exact_powerlaw(self):
        """Test recovery of delta = 2 N^(-1/2)."""
        points = [(n, 2.0 * n**-0.5) for n in (1_000, 3_000, 10_000, 30_000)]
        fit = fit_powerlaw(points)
        assert fit.alpha == pytest.approx(0.5)
        assert fit.amplitude == pytest.approx(2.0)
        assert fit.rms == pytest.approx(0.0, abs=1e-12)
        assert fit.n_values == (1_000, 3_000, 10_000, 30_000)
        assert set(fit.summary()) == {"alpha", "stderr", "rms"}

    def test_noisy(self):
        """Test residuals are reported for scattered data."""
        points = [(1_000, 0.1), (10_000, 0.05), (100_000, 0.01)]
        fit = fit_powerlaw(points)
        assert 0 < fit.alpha < 1
        assert fit.rms > 0
        assert len(fit.residuals) == 3

    def test_too_few_points(self):
        """Test at least three sizes are needed."""
        with pytest.raises(DomainError):
            fit_powerlaw([(1_000, 0.1), (10_000, 0.01)])

    def test_nonpositive_deviation(self):
        """Test a precursor on the asymptote cannot be fitted."""
        with pytest.raises(DomainError):
            fit_powerlaw([(1_000, 0.1), (3_000, 0.0), (10_000, 0.01)])

    def test_monotone_sequence(self):
        """Test a shrinking sequence has no violations, in any input order."""
        points = [(10_000, 0.02), (1_000, 0.1), (3_000, 0.05)]
        assert monotonicity_violations(points) == []

    def test_non_monotone_sequence(self):
        """Test a deviation that grows with N is reported at that size."""
        points = [(1_000, 0.1), (3_000, 0.12), (10_000, 0.02), (30_000, 0.02)]
        assert monotonicity_violations(points) == [3_000, 30_000]


class TestPrecursors:
    """Tests for precursor location."""

    def test_parabola_vertex(self):
        """Test the vertex of y = (x - 0.3)^2 - 1."""
        xs = np.array([0.0, 0.5, 1.0])
        x, y = _parabola_vertex(xs, (xs - 0.3) ** 2 - 1)
        assert x == pytest.approx(0.3)
        assert y == pytest.approx(-1.0)

    def test_parabola_vertex_concave(self):
        """Test a concave triple falls back to the middle point."""
        xs = np.array([0.0, 0.5, 1.0])
        assert _parabola_vertex(xs, -(xs**2)) == (0.5, -0.25)

    def test_deltas(self):
        """Test deviations from the critical point at lambda = 1.5."""
        params = ModelParams(lam=1.5, n_atoms=1_000)
        precursor = Precursor(n_atoms=1_000, e_per_atom=-0.05, jz_per_atom=-0.06)
        assert delta_e(precursor, params) == pytest.approx(1 / 18 - 0.05)
        assert delta_jz(precursor, params) == pytest.approx(0.06 - 1 / 18)
        assert precursor.energy == pytest.approx(-50.0)

    def test_crossed_precursor(self):
        """Test a precursor below E_c gives a negative deviation the fit rejects."""
        params = ModelParams(lam=1.5, n_atoms=1_000)
        crossed = Precursor(n_atoms=1_000, e_per_atom=-0.06)
        assert delta_e(crossed, params) == pytest.approx(1 / 18 - 0.06)
        assert delta_e(crossed, params) < 0
        points = [(3_000, 0.02), (10_000, 0.01)]
        points.append((1_000, delta_e(crossed, params)))
        with pytest.raises(DomainError, match="crossed the asymptote"):
            fit_powerlaw(points)

    def test_delta_jz_requires_value(self):
        """Test a Jx precursor carries no Jz depth."""
        params = ModelParams(lam=1.5, n_atoms=1_000)
        with pytest.raises(ValueError):
            delta_jz(Precursor(n_atoms=1_000, e_per_atom=-0.05), params)

    def test_threshold_never_crossed(self):
        """Test a negative threshold is never reached."""
        params = ModelParams(lam=1.5, n_atoms=1_000)
        with pytest.raises(PrecursorNotFoundError, match="never drops"):
            find_precursor_jx(params, threshold=-1.0, e_min=-0.2, step=0.02)

    def test_threshold_always_below(self):
        """Test a threshold above every value brackets nothing."""
        params = ModelParams(lam=1.5, n_atoms=1_000)
        with pytest.raises(PrecursorNotFoundError, match="entire scan"):
            find_precursor_jx(params, threshold=10.0, e_min=-0.2, step=0.02)

    def test_jx_precursor(self):
        """Test the Jx/N crossing lies near the critical energy."""
        params = ModelParams(lam=1.5, n_atoms=10_000)
        precursor = find_precursor_jx(params, threshold=0.01, e_min=-0.3, step=0.01)
        assert -0.3 < precursor.e_per_atom < 0.0
        assert precursor.jz_per_atom is None

    def test_threshold_doubling(self):
        """Test a larger threshold is crossed at a lower energy."""
        params = ModelParams(lam=1.5, n_atoms=10_000)
        low = find_precursor_jx(params, threshold=0.01, e_min=-0.3, step=0.01)
        high = find_precursor_jx(params, threshold=0.02, e_min=-0.3, step=0.01)
        assert high.e_per_atom < low.e_per_atom


@pytest.mark.slow
class TestScalingLadder:
    """Precursor exponents over the default N ladder."""

    @pytest.fixture(scope="class")
    def jz_precursors(self):
        results = []
        for n in DEFAULT_LADDER:
            params = ModelParams(lam=1.5, n_atoms=n)
            results.append((params, find_precursor_jz(params)))
        return results

    def test_jz_exponent(self, jz_precursors):
        """Test the Jz-minimum energy converges with alpha close to 0.47."""
        fit = fit_powerlaw([(p.n_atoms, delta_e(pre, p)) for p, pre in jz_precursors])
        assert 0.37 <= fit.alpha <= 0.57

    def test_jz_value_exponent(self, jz_precursors):
        """Test the Jz-minimum depth converges with alpha close to 0.40."""
        fit = fit_powerlaw([(p.n_atoms, delta_jz(pre, p)) for p, pre in jz_precursors])
        assert 0.30 <= fit.alpha <= 0.50

    def test_jz_monotone(self, jz_precursors):
        """Test the precursor energy approaches E_c monotonically."""
        points = [(p.n_atoms, delta_e(pre, p)) for p, pre in jz_precursors]
        assert monotonicity_violations(points) == []

    def test_jx_exponent(self):
        """Test the Jx-threshold energy converges with alpha close to 0.41."""
        points = []
        for n in DEFAULT_LADDER:
            params = ModelParams(lam=1.5, n_atoms=n)
            points.append((n, delta_e(find_precursor_jx(params), params)))
        fit = fit_powerlaw(points)
        assert 0.31 <= fit.alpha <= 0.51
