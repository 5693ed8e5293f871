"""Training-reliability and risk metrics.

Quantiles use linear interpolation between order statistics (position
``(n - 1) * q``), numpy's default ``"linear"`` method.  Ground-truth scores
are losses, so the upper tail is the risky one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyInputError

DEFAULT_ALPHA = 0.05
FINAL_FRACTION = 0.2


def _as_array(values, name="values") -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptyInputError(f"{name} must not be empty")
    return arr


def quantile(values, q: float) -> float:
    return float(np.quantile(_as_array(values), q))


def iqr(values) -> float:
    q1, q3 = np.quantile(_as_array(values), [0.25, 0.75])
    return float(q3 - q1)


def detrend(curve) -> np.ndarray:
    """First differences ``y[t] - y[t-1]``."""
    y = np.asarray(curve, dtype=np.float64).ravel()
    if y.size < 2:
        raise ValueError("detrending needs at least two evaluation points")
    return np.diff(y)


def default_window(n_points: int) -> int:
    return max(2, n_points // 10)


def dt(curve, window: Optional[int] = None) -> float:
    """Dispersion across time: mean IQR over sliding windows of the differenced curve."""
    diffs = detrend(curve)
    if window is None:
        window = default_window(len(diffs) + 1)
    if window < 2:
        raise ValueError("window must be at least 2")
    if window > diffs.size:
        raise ValueError(f"window {window} exceeds detrended curve length {diffs.size}")
    windows = np.lib.stride_tricks.sliding_window_view(diffs, window)
    q1, q3 = np.quantile(windows, [0.25, 0.75], axis=1)
    return float(np.mean(q3 - q1))


def dt_mean(runs: Sequence, window: Optional[int] = None) -> float:
    if len(runs) == 0:
        raise EmptyInputError("no runs given")
    return float(np.mean([dt(r, window) for r in runs]))


def _stack_runs(runs: Sequence, steps: Optional[Sequence] = None) -> np.ndarray:
    if steps is not None:
        first = list(steps[0])
        for s in steps[1:]:
            if list(s) != first:
                raise ValueError("training curves have misaligned evaluation grids")
    lengths = {len(r) for r in runs}
    if len(lengths) != 1:
        raise ValueError("training curves have misaligned evaluation grids")
    return np.asarray(runs, dtype=np.float64)


def dr(runs: Sequence, steps: Optional[Sequence] = None) -> tuple[np.ndarray, float]:
    """Dispersion across runs: IQR over runs at each evaluation point.

    Returns the per-point sequence and its mean.
    """
    if len(runs) < 2:
        raise ValueError("dispersion across runs needs at least two runs")
    data = _stack_runs(runs, steps)
    q1, q3 = np.quantile(data, [0.25, 0.75], axis=0)
    per_step = q3 - q1
    return per_step, float(per_step.mean())


def final_window_mean(curve, fraction: float = FINAL_FRACTION) -> float:
    y = _as_array(curve, "curve")
    k = max(1, math.ceil(fraction * y.size))
    return float(y[-k:].mean())


def dr_prime(runs: Sequence, fraction: float = FINAL_FRACTION) -> float:
    """IQR of the z-scored final-window means of each run."""
    if len(runs) < 2:
        raise ValueError("DR' needs at least two runs")
    means = np.array([final_window_mean(r, fraction) for r in runs])
    sigma = means.std()
    if sigma == 0.0:
        return 0.0
    return iqr((means - means.mean()) / sigma)


def _stable_mean(tail: np.ndarray) -> float:
    # a constant sample returns its value exactly, not a rounded re-summation
    if tail.min() == tail.max():
        return float(tail[0])
    return float(tail.mean())


def var_alpha(x, alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return quantile(x, alpha)


def cvar_lower(x, alpha: float = DEFAULT_ALPHA) -> float:
    """Mean of the values at or below the alpha-quantile."""
    arr = _as_array(x, "X")
    threshold = var_alpha(arr, alpha)
    tail = arr[arr <= threshold]
    if tail.size == 0:
        tail = arr.min(keepdims=True)
    return _stable_mean(tail)


def cvar_upper(x, alpha: float = DEFAULT_ALPHA) -> float:
    """Mean of the values at or above the (1 - alpha)-quantile."""
    arr = _as_array(x, "X")
    threshold = var_alpha(arr, 1.0 - alpha)
    tail = arr[arr >= threshold]
    if tail.size == 0:
        tail = arr.max(keepdims=True)
    return _stable_mean(tail)


def ci95(x) -> tuple[float, float]:
    arr = _as_array(x, "X")
    if arr.size < 2:
        raise ValueError("a confidence interval needs at least two samples")
    mean = _stable_mean(arr)
    half = 1.96 * arr.std(ddof=1) / math.sqrt(arr.size)
    return float(mean - half), float(mean + half)


@dataclass
class RiskSummary:
    score_gt_mean: float
    lower_rf: float
    upper_rf: float
    dt_mean: float
    dr_prime: float
    ci_lower: float
    ci_upper: float

    def as_row(self) -> list[float]:
        return [self.score_gt_mean, self.lower_rf, self.upper_rf, self.dt_mean,
                self.dr_prime, self.ci_lower, self.ci_upper]
