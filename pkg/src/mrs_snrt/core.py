"""Steady-state signal model for repeated single-voxel excitations.

All quantities are relative: physical constants (gyromagnetic ratio,
spin density, voxel volume, receiver gain) are folded into a unit
proportionality constant. Times are in seconds, angles in radians and
fields in tesla.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import (
    InvalidParameterError,
    as_float,
    check_interval,
    check_nonnegative,
    check_positive,
)

# e^{-x} underflows to 0 well before this; keeps intermediate math finite
EXP_ARG_CLAMP = 700.0


@dataclass(frozen=True)
class RelaxationParams:
    """Longitudinal relaxation at the reference field.

    ``t1(f) = t1_ref * f**alpha``; ``alpha = 0`` means T1 does not depend
    on the field.
    """

    t1_ref: float
    alpha: float = 0.0

    def __post_init__(self):
        check_positive("t1_ref", self.t1_ref)
        check_interval("alpha", self.alpha, 0.0, 2.0)


@dataclass(frozen=True)
class SequenceTiming:
    tr_ref: float
    ta: float
    flip_angle: Optional[float] = None  # None -> Ernst angle

    def __post_init__(self):
        check_positive("tr_ref", self.tr_ref)
        check_positive("ta", self.ta)
        if self.ta < self.tr_ref:
            raise InvalidParameterError(
                f"ta ({self.ta!r}) must be at least tr_ref ({self.tr_ref!r})")
        if self.flip_angle is not None:
            check_positive("flip_angle", self.flip_angle)
            check_interval("flip_angle", self.flip_angle, 0.0, np.pi / 2)

    @property
    def n_excitations(self):
        """Real-valued excitation count TA / TR."""
        return self.ta / self.tr_ref


@dataclass(frozen=True)
class NoiseModelParams:
    sample_temp: float = 310.0
    coil_temp: float = 295.0
    coil_noise_coeff: float = 0.0

    def __post_init__(self):
        check_positive("sample_temp", self.sample_temp)
        check_positive("coil_temp", self.coil_temp)
        check_nonnegative("coil_noise_coeff", self.coil_noise_coeff)


@dataclass(frozen=True)
class FieldScaling:
    b0_ref: float
    f: float = 1.0

    def __post_init__(self):
        check_positive("b0_ref", self.b0_ref)
        check_positive("f", self.f)

    @property
    def b0(self):
        return self.f * self.b0_ref


def _relaxation_factor(tr, t1):
    tr = np.asarray(tr, dtype=float)
    t1 = np.asarray(t1, dtype=float)
    check_positive("t1", t1)
    check_nonnegative("tr", tr)
    return np.minimum(tr / t1, EXP_ARG_CLAMP)


def ernst_angle(tr, t1):
    """Flip angle ``arccos(exp(-tr/t1))`` maximizing the steady-state signal."""
    x = _relaxation_factor(tr, t1)
    return as_float(np.arccos(np.exp(-x)))


def f_factor(tr, t1, theta):
    """Steady-state saturation weighting of a spoiled repeated excitation.

    ``sin(theta) * (1 - E) / (1 - cos(theta) * E)`` with ``E = exp(-tr/t1)``.
    The fully saturated corner ``tr = 0, theta = 0`` is defined as 0.
    """
    x = _relaxation_factor(tr, t1)
    theta = np.asarray(theta, dtype=float)
    check_interval("theta", theta, 0.0, np.pi)
    e = np.exp(-x)
    num = np.sin(theta) * -np.expm1(-x)
    den = 1.0 - np.cos(theta) * e
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return as_float(out)


def ernst_f_factor_of_ratio(x):
    """``sqrt((1 - E) / (1 + E))`` for ``E = exp(-x)``, without validation.

    Shared inner kernel of the Ernst-angle F-factor; ``x`` is TR / T1.
    """
    x = np.minimum(np.asarray(x, dtype=float), EXP_ARG_CLAMP)
    return np.sqrt(-np.expm1(-x) / (1.0 + np.exp(-x)))


def f_factor_ernst(tr, t1):
    """F-factor at the Ernst angle, ``sqrt((1 - E) / (1 + E))``."""
    return as_float(ernst_f_factor_of_ratio(_relaxation_factor(tr, t1)))


def noise_std_relative(b0, params=None):
    """Relative thermal noise amplitude at field ``b0``.

    Sample noise grows as ``b0**2`` in variance, coil noise as
    ``b0**0.5``; with ``coil_noise_coeff = 0`` the result is linear in b0.
    """
    if params is None:
        params = NoiseModelParams(sample_temp=1.0, coil_temp=1.0)
    b0 = np.asarray(b0, dtype=float)
    check_positive("b0", b0)
    var = params.sample_temp * b0 ** 2
    if params.coil_noise_coeff:
        var = var + params.coil_noise_coeff * params.coil_temp * np.sqrt(b0)
        return as_float(np.sqrt(var))
    # exact linearity when the coil term is absent
    return as_float(np.sqrt(params.sample_temp) * b0)


def snr_t_fixed_ta(b0, tr, t1):
    """SNR per unit time at fixed acquisition time and field.

    ``b0 * F_E(tr, t1) / sqrt(tr)``; the number of averages TA / TR
    cancels against the fixed TA.
    """
    b0 = np.asarray(b0, dtype=float)
    check_positive("b0", b0)
    tr = np.asarray(tr, dtype=float)
    check_positive("tr", tr)
    x = _relaxation_factor(tr, t1)
    return as_float(b0 * ernst_f_factor_of_ratio(x) / np.sqrt(tr))


def snr_t_for(field: FieldScaling, timing: SequenceTiming, relax: RelaxationParams):
    """:func:`snr_t_fixed_ta` from the record types (Condition I)."""
    if timing.flip_angle is None:
        weight = f_factor_ernst(timing.tr_ref, relax.t1_ref)
    else:
        weight = f_factor(timing.tr_ref, relax.t1_ref, timing.flip_angle)
    return field.b0 * weight / np.sqrt(timing.tr_ref)


@dataclass(frozen=True)
class SignalCurve:
    """Magnetization over one repetition in the Ernst-angle steady state."""

    time: np.ndarray
    longitudinal: np.ndarray
    transverse_at_pulse: float
    mz_steady: float
    flip_angle: float

    def rows(self):
        for t, mz in zip(self.time, self.longitudinal):
            yield float(t), float(mz), self.transverse_at_pulse


def one_tr_signal_curve(tr, t1, n_samples=500):
    """Longitudinal recovery across one TR plus the post-pulse transverse value.

    The pre-pulse steady state is ``Mz_ss = (1 - E) / (1 - cos(theta) E)``;
    the pulse tips it to ``Mz_ss cos(theta)`` longitudinal and
    ``Mz_ss sin(theta)`` transverse, and recovery with T1 brings it back to
    ``Mz_ss`` at ``t = tr``.
    """
    if int(n_samples) != n_samples or n_samples < 2:
        raise InvalidParameterError(f"n_samples must be an integer >= 2, got {n_samples!r}")
    check_positive("tr", tr)
    check_positive("t1", t1)
    theta = ernst_angle(tr, t1)
    x = min(tr / t1, EXP_ARG_CLAMP)
    e = np.exp(-x)
    mz_ss = -np.expm1(-x) / (1.0 - np.cos(theta) * e)
    t = np.linspace(0.0, tr, int(n_samples))
    mz = 1.0 + (mz_ss * np.cos(theta) - 1.0) * np.exp(-np.minimum(t / t1, EXP_ARG_CLAMP))
    return SignalCurve(
        time=t,
        longitudinal=mz,
        transverse_at_pulse=float(mz_ss * np.sin(theta)),
        mz_steady=float(mz_ss),
        flip_angle=float(theta),
    )
