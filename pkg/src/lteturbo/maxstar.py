"""The max* operator and its suboptimal variants.

max*(x, y) = ln(e^x + e^y) = max(x, y) + ln(1 + e^-|x-y|) is the exact
(Jacobian) form.  The decoder can swap the correction term for cheaper
approximations, selected by MaxStarMode:

  MAX_LOG       no correction, plain max
  LINEAR_LOG    correction max(0, a * (|x-y| - t_lin)), a < 0
  CONSTANT_LOG  correction C when |x-y| <= T, else 0
  LOG_MAP       exact correction (optionally an 8-entry lookup table)

All variants are symmetric and shift-equivariant:
max*(x+d, y+d) = max*(x,y) + d.  Shift equivariance is what lets the
decoder renormalise state metrics every stage without changing any LLR.

Unreachable trellis states are marked with a large negative sentinel
(METRIC_NEG_INF) rather than -inf so that sums never produce NaN.  No
special-casing is needed here: when one argument is at the sentinel the
difference |x-y| is astronomical, every correction term evaluates to
exactly 0.0, and the other argument is returned unchanged.
"""

import enum
from dataclasses import dataclass

import numpy as np

# Sentinel standing in for -inf on the metric scale.  Anything at or below
# SENTINEL_CEILING is treated as unreachable by validity checks.
METRIC_NEG_INF = -1.0e15
SENTINEL_CEILING = -1.0e12


class MaxStarMode(enum.Enum):
    """The four selectable decoding kernels (fastest to slowest)."""
    MAX_LOG = "max-log"
    LINEAR_LOG = "linear"
    CONSTANT_LOG = "constant"
    LOG_MAP = "log-map"

    @classmethod
    def from_name(cls, name: str) -> "MaxStarMode":
        for mode in cls:
            if mode.value == name:
                return mode
        raise ValueError(f"unknown algorithm {name!r}; expected one of "
                         f"{[m.value for m in cls]}")


@dataclass(frozen=True)
class CorrectionParams:
    """Constants of the approximate correction terms.

    c, t        constant-log-MAP: add c when |x-y| <= t
    a, t_lin    linear-log-MAP: add max(0, a * (|x-y| - t_lin))
    logmap_lut  replace the exact LOG_MAP correction with an 8-entry
                piecewise-constant table (cost-model experiments)

    The defaults are the usual literature constants.  Note that no
    clipped-linear correction can track the exact term ln(1 + e^-d)
    better than ~0.072 worst-case (the family's minimax error); the
    defaults minimise mean squared error instead, with worst-case
    error 0.0784 at d = t_lin.
    """
    c: float = 0.5
    t: float = 1.5
    a: float = -0.24904
    t_lin: float = 2.5068
    logmap_lut: bool = False

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("constant correction c must be >= 0")
        if self.t <= 0:
            raise ValueError("constant threshold t must be > 0")
        if self.a >= 0:
            raise ValueError("linear slope a must be < 0")
        if self.t_lin <= 0:
            raise ValueError("linear threshold t_lin must be > 0")


DEFAULT_CORRECTION = CorrectionParams()

# 8-entry lookup variant of the exact correction: bins of width 0.25 over
# |x-y| in [0, 2), table value = exact correction at the bin centre, zero
# beyond 2.0.
_LUT_STEP = 0.25
_LUT = np.log1p(np.exp(-(np.arange(8) + 0.5) * _LUT_STEP))


def _lut_correction(diff):
    idx = np.minimum((diff / _LUT_STEP).astype(np.int64), 8)
    return np.where(idx >= 8, 0.0, _LUT[np.minimum(idx, 7)])


def max_star(x, y, mode: MaxStarMode = MaxStarMode.LOG_MAP,
             params: CorrectionParams = DEFAULT_CORRECTION):
    """Elementwise max* of two metrics (scalars or broadcastable arrays)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if mode is MaxStarMode.MAX_LOG:
        return np.maximum(x, y)
    if mode is MaxStarMode.LOG_MAP and not params.logmap_lut:
        return np.logaddexp(x, y)
    m = np.maximum(x, y)
    diff = np.abs(x - y)
    if mode is MaxStarMode.CONSTANT_LOG:
        return m + np.where(diff <= params.t, params.c, 0.0)
    if mode is MaxStarMode.LINEAR_LOG:
        return m + np.maximum(0.0, params.a * (diff - params.t_lin))
    return m + _lut_correction(diff)


def max_star_reduce(values, mode: MaxStarMode = MaxStarMode.LOG_MAP,
                    params: CorrectionParams = DEFAULT_CORRECTION, axis: int = -1):
    """Left fold of max_star along an axis.

    For MAX_LOG the fold equals the plain maximum for any fold order, so
    it is computed with np.max directly.  The approximate modes are not
    associative, hence the explicit left-to-right fold.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.shape == () or values.shape[axis] == 0:
        raise ValueError("max_star_reduce needs a non-empty axis to reduce")
    if mode is MaxStarMode.MAX_LOG:
        return np.max(values, axis=axis)
    values = np.moveaxis(values, axis, -1)
    acc = values[..., 0]
    for i in range(1, values.shape[-1]):
        acc = max_star(acc, values[..., i], mode, params)
    return acc
