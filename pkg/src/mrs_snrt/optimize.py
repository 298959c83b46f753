"""SNR per unit time versus field strength at maximum SAR, and its maximizer.

A sequence that is SAR-limited at ``TR0`` on the reference field must
stretch its repetition time to ``TR0 * f**3`` on a field ``f`` times
stronger. With Ernst-angle excitation and a fixed total acquisition time
the achievable SNR per unit time, relative to the reference field, is::

    f**-0.5 * F_E(f**3 * TR0 / T1(f)) / F_E(TR0 / T1_ref)

where ``F_E(x) = sqrt((1 - e^-x) / (1 + e^-x))`` and
``T1(f) = T1_ref * f**alpha``.
"""

import enum
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from ._validation import (
    DegenerateObjectiveError,
    InvalidParameterError,
    check_positive,
)
from .core import FieldScaling, RelaxationParams, SequenceTiming, ernst_f_factor_of_ratio

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

DEFAULT_F_MAX = 10.0
DEFAULT_TOL = 1e-6
DEFAULT_GRID = 512


class Condition(str, enum.Enum):
    """Boundary-condition regimes.

    I: fixed TA and B0, TR varies. II: maximum SAR, B0 varies, constant T1.
    III: as II with ``T1 = T1_ref * f**alpha``.
    """

    I = "I"
    II = "II"
    III = "III"


@dataclass(frozen=True)
class ScanScenario:
    condition: Condition
    field: FieldScaling
    timing: SequenceTiming
    relax: RelaxationParams

    def __post_init__(self):
        object.__setattr__(self, "condition", Condition(self.condition))
        if self.condition is Condition.II and self.relax.alpha != 0:
            raise InvalidParameterError("Condition II requires alpha = 0 (constant T1)")
        if self.condition is Condition.III and not self.relax.alpha > 0:
            raise InvalidParameterError("Condition III requires alpha > 0")

    @classmethod
    def from_ratio(cls, tr0_in_t1, alpha=0.0, t1_ref=1.0, b0_ref=1.5, ta=300.0):
        """Scenario from ``TR0 / T1_ref`` and ``alpha``; condition inferred from alpha."""
        condition = Condition.III if alpha > 0 else Condition.II
        tr_ref = tr0_in_t1 * t1_ref
        return cls(
            condition=condition,
            field=FieldScaling(b0_ref),
            timing=SequenceTiming(tr_ref=tr_ref, ta=max(ta, tr_ref)),
            relax=RelaxationParams(t1_ref=t1_ref, alpha=alpha),
        )

    @property
    def tr0_in_t1(self):
        return self.timing.tr_ref / self.relax.t1_ref

    def with_alpha(self, alpha):
        condition = Condition.III if alpha > 0 else Condition.II
        return replace(self, condition=condition, relax=replace(self.relax, alpha=alpha))


@dataclass(frozen=True)
class OptimizationResult:
    f_opt: float
    b0_opt: float
    tr_e_opt: float
    tr_e_opt_in_t1: float       # TR_e,opt / T1(f_opt)
    tr_e_opt_in_t1_ref: float   # TR_e,opt / T1_ref
    tr_e_opt_in_tr0: float      # f_opt**3
    snr_gain: float
    at_boundary: bool
    n_excitations: int          # floor(TA / TR_e,opt)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        names = [f.name for f in cls.__dataclass_fields__.values()]
        unknown = set(data) - set(names)
        if unknown:
            raise InvalidParameterError(f"unknown OptimizationResult keys: {sorted(unknown)}")
        return cls(**{n: data[n] for n in names})


@dataclass(frozen=True)
class SweepCurve:
    f: np.ndarray
    value: np.ndarray
    label: str = ""
    x_name: str = "f"
    value_name: str = "snr_t"

    def __post_init__(self):
        x = np.array(self.f, dtype=float).reshape(-1)
        v = np.array(self.value, dtype=float).reshape(-1)
        if x.shape != v.shape:
            raise InvalidParameterError("sweep abscissa and values differ in length")
        if np.any(np.diff(x) <= 0):
            raise InvalidParameterError("sweep abscissa must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise DegenerateObjectiveError("sweep values must be finite")
        object.__setattr__(self, "f", x)
        object.__setattr__(self, "value", v)

    @property
    def points(self):
        return list(zip(self.f.tolist(), self.value.tolist()))

    def argmax(self):
        i = int(np.argmax(self.value))
        return float(self.f[i]), float(self.value[i])


def t1_at_field(relax: RelaxationParams, f):
    """``T1_ref * f**alpha``."""
    check_positive("f", f)
    f = np.asarray(f, dtype=float)
    out = relax.t1_ref * f ** relax.alpha
    return float(out) if out.ndim == 0 else out


def _objective(scenario: ScanScenario, f):
    """Unchecked vectorized objective; ``f`` is a float array."""
    tr0 = scenario.timing.tr_ref
    t1_ref = scenario.relax.t1_ref
    alpha = scenario.relax.alpha
    x = f ** 3 * tr0 / (t1_ref * f ** alpha)
    ref = ernst_f_factor_of_ratio(tr0 / t1_ref)
    return ernst_f_factor_of_ratio(x) / (np.sqrt(f) * ref)


def snr_t_max_sar(scenario: ScanScenario, f):
    """Normalized SNR per unit time at ``f * B0_ref``; exactly 1 at ``f = 1``.

    Accepts a scalar or an array of scale factors.
    """
    if scenario.condition is Condition.I:
        raise InvalidParameterError("snr_t_max_sar needs Condition II or III")
    check_positive("f", f)
    f = np.asarray(f, dtype=float)
    out = _objective(scenario, f)
    out = np.where(f == 1.0, 1.0, out)
    if not np.all(np.isfinite(out)):
        raise DegenerateObjectiveError("objective is not finite")
    return float(out) if out.ndim == 0 else out


def golden_section_max(func, lo, hi, tol=DEFAULT_TOL, max_iter=200):
    """Maximize a unimodal scalar ``func`` on ``[lo, hi]``.

    Returns ``(x, func(x))``; the bracket is shrunk until narrower than ``tol``.
    """
    if not hi > lo:
        raise InvalidParameterError(f"empty bracket [{lo!r}, {hi!r}]")
    a, b = float(lo), float(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = func(d)
    x = 0.5 * (a + b)
    return x, func(x)


def _grid(f_min, f_max, n, spacing):
    if spacing == "geometric":
        g = np.geomspace(f_min, f_max, n)
    else:
        g = np.linspace(f_min, f_max, n)
    g[0], g[-1] = f_min, f_max
    return g


def _check_domain(f_min, f_max, tol):
    check_positive("f_min", f_min)
    check_positive("tol", tol)
    if not f_max > f_min:
        raise InvalidParameterError(f"f_max ({f_max!r}) must exceed f_min ({f_min!r})")


def find_optimal_field(scenario: ScanScenario, f_max=DEFAULT_F_MAX, tol=DEFAULT_TOL,
                       f_min=1.0, n_grid=DEFAULT_GRID):
    """Locate the field scale factor maximizing :func:`snr_t_max_sar`.

    A geometric coarse grid brackets the maximum; golden-section search
    refines it inside the two neighbouring grid cells. ``at_boundary`` is
    set when the grid maximum is an end point of ``[f_min, f_max]``.
    """
    _check_domain(f_min, f_max, tol)
    if n_grid < DEFAULT_GRID:
        raise InvalidParameterError(f"n_grid must be >= {DEFAULT_GRID}, got {n_grid!r}")
    grid = _grid(f_min, f_max, int(n_grid), "geometric")
    values = snr_t_max_sar(scenario, grid)
    i = int(np.argmax(values))
    at_boundary = i == 0 or i == len(grid) - 1

    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    f_best, v_best = golden_section_max(lambda x: snr_t_max_sar(scenario, x), lo, hi, tol)
    if values[i] > v_best:
        f_best, v_best = float(grid[i]), float(values[i])
    if not math.isfinite(v_best):
        raise DegenerateObjectiveError("objective is not finite at the optimum")
    return make_result(scenario, f_best, v_best, at_boundary)


def make_result(scenario: ScanScenario, f_opt, snr_gain, at_boundary=False):
    tr_e = scenario.timing.tr_ref * f_opt ** 3
    t1_opt = t1_at_field(scenario.relax, f_opt)
    return OptimizationResult(
        f_opt=float(f_opt),
        b0_opt=float(f_opt * scenario.field.b0_ref),
        tr_e_opt=float(tr_e),
        tr_e_opt_in_t1=float(tr_e / t1_opt),
        tr_e_opt_in_t1_ref=float(tr_e / scenario.relax.t1_ref),
        tr_e_opt_in_tr0=float(f_opt ** 3),
        snr_gain=float(snr_gain),
        at_boundary=bool(at_boundary),
        n_excitations=int(scenario.timing.ta // tr_e),
    )


def grid_oracle(scenario: ScanScenario, f_max=DEFAULT_F_MAX, n=10 ** 6, f_min=1.0):
    """Brute-force argmax of the objective on a uniform ``n``-point grid."""
    if n < 10 ** 4:
        raise InvalidParameterError(f"grid oracle needs n >= 10**4, got {n!r}")
    _check_domain(f_min, f_max, 1.0)
    grid = np.linspace(f_min, f_max, int(n))
    values = snr_t_max_sar(scenario, grid)
    i = int(np.argmax(values))
    return float(grid[i]), float(values[i])


def derivative_sign_profile(scenario: ScanScenario, f_samples, h_rel=1e-5, zero_tol=1e-9):
    """Sign of the central difference quotient of the objective at each sample.

    Returns a list of ``+1``, ``-1`` or ``0`` (magnitude below ``zero_tol``).
    """
    f = np.asarray(f_samples, dtype=float).reshape(-1)
    check_positive("f_samples", f)
    if np.any(np.diff(f) <= 0):
        raise InvalidParameterError("f_samples must be strictly increasing")
    h = h_rel * f
    slope = (snr_t_max_sar(scenario, f + h) - snr_t_max_sar(scenario, f - h)) / (2 * h)
    return [0 if abs(s) < zero_tol else (1 if s > 0 else -1) for s in np.atleast_1d(slope)]


def difference_quotient(scenario: ScanScenario, f, h_rel=1e-5):
    h = h_rel * f
    return (snr_t_max_sar(scenario, f + h) - snr_t_max_sar(scenario, f - h)) / (2 * h)


def sign_changes(signs):
    nonzero = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(nonzero, nonzero[1:]) if a != b)
