"""Tests for core functionality."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from dicke.core.config import (
    BetaGrid,
    EnergyGrid,
    RunConfig,
    default_cache_dir,
    load_config_file,
)
from dicke.core.errors import ConvergenceError, DomainError, NoTransitionError
from dicke.core.model import (
    ModelParams,
    SectorId,
    check_sector,
    critical_coupling_sector,
    effective_coupling,
    ground_energy_ratio,
    require_unit_frequencies,
    sector_ground_energy,
)
from dicke.core.numerics import (
    central_difference,
    composite_rule,
    log_2cosh,
    log_gradient,
    log_integrate,
    log_sinh,
    richardson,
)
from dicke.core.storage import FINGERPRINT_PREFIX, SpectrumStore
from dicke.core.utils import (
    csv_text,
    format_table,
    format_value,
    key_value_block,
    parse_csv,
    parse_key_value,
    read_csv,
    write_csv,
)


class TestModelParams:
    """Tests for ModelParams."""

    def test_defaults(self):
        """Test default couplings."""
        params = ModelParams()
        assert params.omega == 1.0
        assert params.omega0 == 1.0
        assert params.lam == 1.5
        assert params.epsilon == 0.0

    def test_lambda_alias(self):
        """Test the coupling can be given under its physical name."""
        params = ModelParams(**{"lambda": 0.4})
        assert params.lam == 0.4

    def test_critical_coupling(self):
        """Test lambda_c = sqrt(omega omega0) / 2."""
        assert ModelParams().critical_coupling == 0.5
        assert ModelParams(omega=4.0, omega0=1.0).critical_coupling == 1.0
        assert ModelParams(lam=1.5).is_superradiant
        assert not ModelParams(lam=0.45).is_superradiant

    def test_frozen(self):
        """Test parameters cannot be mutated."""
        params = ModelParams()
        with pytest.raises(ValidationError):
            params.lam = 2.0

    def test_rejects_invalid(self):
        """Test out-of-range fields are rejected as value errors."""
        with pytest.raises(ValueError):
            ModelParams(omega=-1.0)
        with pytest.raises(ValueError):
            ModelParams(n_atoms=0)
        with pytest.raises(ValueError):
            ModelParams(epsilon=-1e-6)

    def test_replace(self):
        """Test replace returns a validated copy."""
        params = ModelParams(lam=1.5, n_atoms=10)
        changed = params.replace(**{"lambda": 0.2}, n_atoms=20)
        assert changed.lam == 0.2
        assert changed.n_atoms == 20
        assert params.lam == 1.5
        with pytest.raises(ValueError):
            params.replace(omega0=0.0)

    def test_fingerprint(self):
        """Test the fingerprint carries every physical parameter."""
        fingerprint = ModelParams(lam=0.7, n_atoms=12, epsilon=1e-6).fingerprint()
        assert fingerprint == {
            "omega": 1.0,
            "omega0": 1.0,
            "lambda": 0.7,
            "n_atoms": 12,
            "epsilon": 1e-6,
        }

    def test_require_unit_frequencies(self):
        """Test semiclassical guard on omega and omega0."""
        require_unit_frequencies(ModelParams())
        with pytest.raises(DomainError):
            require_unit_frequencies(ModelParams(omega=2.0))


class TestSectorId:
    """Tests for SectorId."""

    def test_create(self):
        """Test integer and half-integer sectors."""
        assert SectorId.create(4, 2).j == 2.0
        assert SectorId.create(5, 1.5).two_j == 3

    def test_parity_mismatch(self):
        """Test j and N/2 must share integrality."""
        with pytest.raises(DomainError):
            SectorId.create(4, 1.5)
        with pytest.raises(DomainError):
            SectorId.create(4, 0.3)

    def test_out_of_range(self):
        """Test j above N/2 is rejected."""
        with pytest.raises(DomainError):
            SectorId.create(4, 3)

    def test_maximal(self):
        """Test the symmetric sector."""
        sector = SectorId.maximal(100)
        assert sector.j == 50.0
        assert sector.x == 0.5

    def test_from_fraction(self):
        """Test fractions are rounded to valid sectors."""
        assert SectorId.from_fraction(100, 0.1).j == 10.0
        assert SectorId.from_fraction(101, 0.5).j == 50.5
        assert SectorId.from_fraction(16, 2 / 16).j == 2.0
        with pytest.raises(DomainError):
            SectorId.from_fraction(100, 0.6)

    def test_all_sectors(self):
        """Test enumeration of every sector."""
        assert [s.j for s in SectorId.all_sectors(4)] == [0.0, 1.0, 2.0]
        assert [s.j for s in SectorId.all_sectors(5)] == [0.5, 1.5, 2.5]


class TestSectorQuantities:
    """Tests for per-sector couplings and energies."""

    def test_effective_coupling(self):
        """Test lambda_eff = lambda sqrt(2j/N)."""
        params = ModelParams(lam=1.5, n_atoms=100_000)
        assert effective_coupling(params, SectorId.maximal(100_000)) == pytest.approx(1.5)
        quarter = SectorId.create(100_000, 25_000)
        assert effective_coupling(params, quarter) == pytest.approx(1.5 * math.sqrt(0.5))

    def test_critical_coupling_sector(self):
        """Test the symmetric sector has lambda_c = 1/2."""
        params = ModelParams(n_atoms=100_000)
        assert critical_coupling_sector(params, SectorId.maximal(100_000)) == pytest.approx(0.5)
        with pytest.raises(NoTransitionError):
            critical_coupling_sector(params, SectorId.create(100_000, 0))

    def test_ground_energy_ratio(self):
        """Test the sector ground energy in units of j."""
        assert ground_energy_ratio(1.5) == pytest.approx(-(4.5 + 1 / 18))
        assert ground_energy_ratio(0.3) == -1.0

    def test_sector_ground_energy(self):
        """Test E_min = j * ratio."""
        params = ModelParams(lam=1.5, n_atoms=10)
        sector = SectorId.maximal(10)
        assert sector_ground_energy(params, sector) == pytest.approx(-5 * (4.5 + 1 / 18))

    def test_check_sector_foreign(self):
        """Test a sector of another N is rejected."""
        with pytest.raises(DomainError):
            check_sector(ModelParams(n_atoms=10), SectorId.maximal(12))


class TestErrors:
    """Tests for the error hierarchy."""

    def test_builtin_bases(self):
        """Test errors map onto ValueError and ArithmeticError."""
        assert issubclass(DomainError, ValueError)
        assert issubclass(NoTransitionError, DomainError)
        assert issubclass(ConvergenceError, ArithmeticError)

    def test_diagnostics(self):
        """Test diagnostics are shown in the message."""
        error = ConvergenceError("did not converge", {"beta": 0.5})
        assert error.diagnostics == {"beta": 0.5}
        assert str(error) == "did not converge (beta=0.5)"
        assert str(ConvergenceError("plain")) == "plain"


class TestNumerics:
    """Tests for quadrature and differentiation helpers."""

    def test_composite_rule_exact_for_cubic(self):
        """Test a composite rule integrates polynomials exactly."""
        nodes, weights = composite_rule([0.0, 1.0, 2.0], 8)
        assert np.dot(weights, nodes**3) == pytest.approx(4.0, rel=1e-13)
        assert np.all(np.diff(nodes) > 0)

    def test_composite_rule_drops_empty_panels(self):
        """Test duplicate breakpoints do not create empty panels."""
        nodes, _ = composite_rule([0.0, 1.0, 1.0, 2.0], 4)
        assert nodes.size == 8
        assert composite_rule([1.0], 4)[0].size == 0

    def test_log_integrate(self):
        """Test log-domain integration of a constant."""
        value = log_integrate(lambda x: np.zeros_like(x), [0.0, 2.0], 8)
        assert value == pytest.approx(math.log(2.0))
        assert log_integrate(lambda x: x, [1.0], 8) == -np.inf

    def test_log_sinh(self):
        """Test log(sinh) for small and overflowing arguments."""
        assert log_sinh(1.0) == pytest.approx(math.log(math.sinh(1.0)))
        assert log_sinh(1000.0) == pytest.approx(1000.0 - math.log(2.0))

    def test_log_2cosh(self):
        """Test log(2 cosh)."""
        assert log_2cosh(0.0) == pytest.approx(math.log(2.0))
        assert log_2cosh(800.0) == pytest.approx(800.0)

    def test_log_gradient(self):
        """Test the log-derivative of an exponential."""
        grid = np.linspace(0.0, 1.0, 11)
        slope = log_gradient(3 * grid, grid)
        assert slope == pytest.approx(np.full(11, 3.0))

    def test_log_gradient_marks_missing(self):
        """Test stencils touching -inf give nan rather than zero."""
        values = np.array([-np.inf, 0.0, 1.0, 2.0])
        slope = log_gradient(values, np.arange(4.0))
        assert np.isnan(slope[0])
        assert np.isnan(slope[1])
        assert slope[2] == pytest.approx(1.0)

    def test_central_difference(self):
        """Test the derivative of sin."""
        assert central_difference(np.sin, 0.3) == pytest.approx(math.cos(0.3), rel=1e-7)

    def test_central_difference_unstable(self):
        """Test a jump under the stencil raises ConvergenceError."""
        with pytest.raises(ConvergenceError):
            central_difference(lambda x: 0.0 if x < 0.30003 else 1.0, 0.3)

    def test_richardson(self):
        """Test extrapolation removes polynomial terms in h."""
        hs = [1e-2, 1e-3, 1e-4]
        values = [2 + 3 * h + 5 * h**2 for h in hs]
        assert richardson(values, 10.0) == pytest.approx(2.0, abs=1e-12)


class TestCsvAndBlocks:
    """Tests for CSV and key=value helpers."""

    def test_format_value(self):
        """Test cell formatting."""
        assert format_value(True) == "true"
        assert format_value(3) == "3"
        assert format_value(np.int64(7)) == "7"
        assert format_value(0.1) == "0.1"
        assert format_value(np.float64(1.5)) == "1.5"
        assert format_value(float("nan")) == "nan"
        assert format_value("micro") == "micro"

    def test_csv_text(self):
        """Test header and rows."""
        assert csv_text(["a", "b"], [[1, 0.5], [2, float("nan")]]) == "a,b\n1,0.5\n2,nan\n"

    def test_write_and_read(self, tmp_path):
        """Test CSV files are written with parent directories."""
        path = write_csv(tmp_path / "out" / "table.csv", ["x", "y"], [[0.25, -1.0]])
        header, rows = read_csv(path)
        assert header == ["x", "y"]
        assert rows == [["0.25", "-1.0"]]
        assert parse_csv(path.read_text()) == (header, rows)

    def test_key_value_block(self):
        """Test key=value rendering."""
        assert key_value_block({"alpha": 0.47, "n": 3}) == "alpha=0.47\nn=3"

    def test_parse_key_value(self):
        """Test comments, blank lines and dashed keys."""
        text = "# model\nlambda = 1.5\n\ne-step=0.01  # fine grid\n"
        assert parse_key_value(text) == {"lambda": "1.5", "e_step": "0.01"}

    def test_parse_key_value_bad_line(self):
        """Test a line without '=' names its location."""
        with pytest.raises(ValueError, match="run.cfg:2"):
            parse_key_value("lambda=1.5\nbroken\n", source="run.cfg")


class TestFormatTable:
    """Tests for format_table utility function."""

    def test_format_table_basic(self):
        """Test basic table formatting."""
        table = format_table(["n_atoms", "delta_e"], [{"n_atoms": 1000, "delta_e": 0.01}])
        lines = table.split("\n")
        assert lines[0].startswith("+")
        assert "n_atoms" in lines[1]
        assert "delta_e" in lines[1]
        assert "1000" in lines[3]
        assert "0.01" in lines[3]

    def test_format_table_empty_rows(self):
        """Test table formatting with no rows."""
        table = format_table(["a"], [])
        assert len(table.split("\n")) == 4

    def test_format_table_empty_columns(self):
        """Test table formatting with no columns."""
        assert format_table([], [{"a": 1}]) == ""

    def test_format_table_missing_columns(self):
        """Test rows missing a column render blank."""
        table = format_table(["a", "b"], [{"a": 1}])
        assert "| 1 |" in table


class TestSpectrumStore:
    """Tests for SpectrumStore."""

    FINGERPRINT = {"omega": 1.0, "lambda": 1.5, "n_atoms": 4, "j": 2.0, "n_max": 10}

    def test_store_and_retrieve(self, tmp_path):
        """Test storing and retrieving a cache body."""
        store = SpectrumStore(tmp_path)
        store.initialize()

        key = store.store(self.FINGERPRINT, "index,eigenvalue\n0,-1.0\n")

        assert key.startswith("sha256:")
        assert store.retrieve(self.FINGERPRINT) == "index,eigenvalue\n0,-1.0\n"

    def test_key_order_irrelevant(self, tmp_path):
        """Test fingerprints are canonicalized."""
        store = SpectrumStore(tmp_path)
        store.store(self.FINGERPRINT, "body")
        reordered = dict(reversed(list(self.FINGERPRINT.items())))
        assert store.retrieve(reordered) == "body"

    def test_layout(self, tmp_path):
        """Test files live under two levels of hash prefixes."""
        store = SpectrumStore(tmp_path)
        store.store(self.FINGERPRINT, "body")
        path = store.path_for(self.FINGERPRINT)
        assert path.parent.name == path.stem[2:4]
        assert path.parent.parent.name == path.stem[:2]
        assert path.read_text().startswith(FINGERPRINT_PREFIX)
        assert not list(path.parent.glob("*.tmp"))

    def test_miss(self, tmp_path):
        """Test an unknown fingerprint."""
        store = SpectrumStore(tmp_path)
        assert store.retrieve(self.FINGERPRINT) is None
        assert not store.path_for(self.FINGERPRINT).exists()

    def test_mismatched_header(self, tmp_path):
        """Test a file whose header disagrees is treated as stale."""
        store = SpectrumStore(tmp_path)
        store.store(self.FINGERPRINT, "body")
        path = store.path_for(self.FINGERPRINT)
        path.write_text(FINGERPRINT_PREFIX + "{}\nbody")
        assert store.retrieve(self.FINGERPRINT) is None

    def test_delete(self, tmp_path):
        """Test deleting a cache file."""
        store = SpectrumStore(tmp_path)
        store.store(self.FINGERPRINT, "body")
        assert store.delete(self.FINGERPRINT)
        assert not store.path_for(self.FINGERPRINT).exists()
        assert not store.delete(self.FINGERPRINT)


class TestConfig:
    """Tests for grids, settings and the config file."""

    def test_energy_grid(self):
        """Test inclusive uniform grids."""
        values = EnergyGrid(e_min=-1.0, e_max=1.0, e_step=0.5).values()
        assert values == pytest.approx([-1.0, -0.5, 0.0, 0.5, 1.0])

    def test_energy_grid_invalid(self):
        """Test empty ranges and non-positive steps."""
        with pytest.raises(ValidationError):
            EnergyGrid(e_min=1.0, e_max=0.0, e_step=0.1)
        with pytest.raises(ValidationError):
            EnergyGrid(e_min=0.0, e_max=1.0, e_step=0.0)

    def test_beta_grid(self):
        """Test log-spaced inverse temperatures."""
        values = BetaGrid(beta_min=0.1, beta_max=10.0, beta_count=3).values()
        assert values == pytest.approx([0.1, 1.0, 10.0])
        with pytest.raises(ValidationError):
            BetaGrid(beta_min=1.0, beta_max=0.5)

    def test_default_cache_dir(self, tmp_path, monkeypatch):
        """Test the environment overrides the cache location."""
        monkeypatch.setenv("DICKE_CACHE_DIR", str(tmp_path / "cache"))
        assert default_cache_dir() == tmp_path / "cache"
        monkeypatch.delenv("DICKE_CACHE_DIR")
        assert default_cache_dir().parts[-2:] == (".cache", "dicke")

    def test_load_config_file(self, tmp_path):
        """Test aliases map to parameter names."""
        path = tmp_path / "run.cfg"
        path.write_text("lambda=0.6\nn=2000\nomega-0=1.0\nbins=0.1\ne_step=0.01\n")
        assert load_config_file(path) == {
            "lam": "0.6",
            "n_atoms": "2000",
            "omega0": "1.0",
            "bin_width": "0.1",
            "e_step": "0.01",
        }

    def test_run_config_defaults(self, tmp_path):
        """Test a run configuration with nested settings."""
        config = RunConfig(command="micro", params=ModelParams(), output=tmp_path / "a.csv")
        assert config.micro.x_order == 8
        assert config.canonical.epsilon_sequence == (1e-6, 1e-7, 1e-8)
        assert config.diag.n_max == 150
