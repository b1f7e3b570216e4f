"""Power-law fits of finite-size deviations."""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from dicke.core.errors import DomainError


@dataclass(frozen=True)
class PowerLawFit:
    """delta = amplitude * N^(-alpha), fitted on log-log axes."""

    alpha: float
    stderr: float
    amplitude: float
    n_values: tuple[int, ...]
    residuals: tuple[float, ...]

    @property
    def rms(self) -> float:
        return float(np.sqrt(np.mean(np.square(self.residuals))))

    def summary(self) -> dict:
        return {"alpha": self.alpha, "stderr": self.stderr, "rms": self.rms}


def fit_powerlaw(points: list[tuple[int, float]]) -> PowerLawFit:
    """Least squares on (log N, log delta)."""
    if len(points) < 3:
        raise DomainError(f"a power-law fit needs at least 3 points, got {len(points)}")
    n_values = np.array([p[0] for p in points], dtype=float)
    deltas = np.array([p[1] for p in points], dtype=float)
    if np.any(deltas <= 0):
        raise DomainError("deviations must be positive: the precursor crossed the asymptote")
    log_n, log_delta = np.log(n_values), np.log(deltas)
    result = stats.linregress(log_n, log_delta)
    residuals = log_delta - (result.intercept + result.slope * log_n)
    return PowerLawFit(
        alpha=float(-result.slope),
        stderr=float(result.stderr),
        amplitude=float(np.exp(result.intercept)),
        n_values=tuple(int(n) for n in n_values),
        residuals=tuple(float(r) for r in residuals),
    )


def monotonicity_violations(points: list[tuple[int, float]]) -> list[int]:
    """Sizes whose deviation does not shrink relative to the next smaller N.

    Precursor sequences converge monotonically for N >= 10^3; a violation
    usually means the energy grid was too coarse for that size.
    """
    ordered = sorted(points)
    return [
        int(n)
        for (_, previous), (n, delta) in zip(ordered, ordered[1:])
        if not delta < previous
    ]
