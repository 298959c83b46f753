"""RF pulse energy and specific absorption rate (SAR) scaling.

SAR follows a single-loop conduction model,
``sigma * A**2 * omega**2 * integral(B1(t)**2 dt) / (2 m TR)``. Pulses whose
bandwidth scales with B0 carry energy proportional to B0, so SAR grows as
``B0**3 / TR`` and the shortest legal TR grows as ``f**3``.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from ._validation import (
    InvalidParameterError,
    MalformedEnvelopeError,
    as_float,
    check_positive,
)

PULSE_CSV_HEADER = ("time_s", "b1_tesla")

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True, eq=False)
class PulseEnvelope:
    """Sampled RF amplitude ``B1+(t)``; times start at 0 and increase strictly."""

    times: np.ndarray
    amplitudes: np.ndarray
    name: str = "pulse"

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        a = np.array(self.amplitudes, dtype=float)
        if t.ndim != 1 or a.shape != t.shape:
            raise MalformedEnvelopeError("times and amplitudes must be 1-D and equal length")
        if t.size < 2:
            raise MalformedEnvelopeError("an envelope needs at least 2 samples")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(a))):
            raise MalformedEnvelopeError("envelope samples must be finite")
        if t[0] != 0.0:
            raise MalformedEnvelopeError(f"first sample must be at t=0, got {t[0]!r}")
        if np.any(np.diff(t) <= 0):
            raise MalformedEnvelopeError("sample times must be strictly increasing")
        if np.any(a < 0):
            raise MalformedEnvelopeError("amplitudes must be non-negative")
        t.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "amplitudes", a)

    @property
    def duration(self):
        return float(self.times[-1])

    def __eq__(self, other):
        if not isinstance(other, PulseEnvelope):
            return NotImplemented
        return (self.name == other.name
                and np.array_equal(self.times, other.times)
                and np.array_equal(self.amplitudes, other.amplitudes))

    __hash__ = None

    @classmethod
    def rectangular(cls, amplitude, duration, n_samples=2, name="rect"):
        t = np.linspace(0.0, duration, n_samples)
        return cls(t, np.full_like(t, amplitude), name)

    @classmethod
    def half_sine(cls, amplitude, duration, n_samples=1000, name="half-sine"):
        t = np.linspace(0.0, duration, n_samples)
        return cls(t, np.clip(amplitude * np.sin(np.pi * t / duration), 0.0, None), name)

    @classmethod
    def from_csv(cls, text, name="pulse"):
        """Parse ``time_s,b1_tesla`` CSV text."""
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedEnvelopeError("empty pulse file") from None
        if tuple(h.strip() for h in header) != PULSE_CSV_HEADER:
            raise MalformedEnvelopeError(
                f"pulse CSV header must be {','.join(PULSE_CSV_HEADER)!r}, got {','.join(header)!r}")
        times, amps = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise MalformedEnvelopeError(f"line {lineno}: expected 2 columns")
            try:
                times.append(float(row[0]))
                amps.append(float(row[1]))
            except ValueError:
                raise MalformedEnvelopeError(f"line {lineno}: non-numeric value") from None
        return cls(np.array(times), np.array(amps), name)

    def to_csv(self):
        lines = [",".join(PULSE_CSV_HEADER)]
        lines += [f"{t!r},{a!r}" for t, a in zip(self.times.tolist(), self.amplitudes.tolist())]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SarConstants:
    conductivity: float   # S/m
    loop_area: float      # m^2
    tissue_mass: float    # kg
    larmor_freq: float    # rad/s

    def __post_init__(self):
        for name in ("conductivity", "loop_area", "tissue_mass", "larmor_freq"):
            check_positive(name, getattr(self, name))


@dataclass(frozen=True)
class SarBudget:
    sar_max: float = 1.0
    relative: bool = True

    def __post_init__(self):
        check_positive("sar_max", self.sar_max)


def pulse_energy(pulse: PulseEnvelope):
    """Trapezoidal ``integral(B1(t)**2 dt)`` over the samples, in T^2 s."""
    return float(_trapezoid(pulse.amplitudes ** 2, pulse.times))


def pulse_area(pulse: PulseEnvelope):
    """Trapezoidal ``integral(B1(t) dt)``; proportional to the flip angle."""
    return float(_trapezoid(pulse.amplitudes, pulse.times))


def sar_absolute(pulse: PulseEnvelope, constants: SarConstants, tr):
    """SAR in W/kg for one pulse per repetition of length ``tr``."""
    check_positive("tr", tr)
    c = constants
    energy = c.conductivity * c.loop_area ** 2 * c.larmor_freq ** 2 * pulse_energy(pulse)
    return as_float(energy / (2.0 * c.tissue_mass * np.asarray(tr, dtype=float)))


def scale_pulse_to_field(pulse: PulseEnvelope, f):
    """Bandwidth-scaled copy of ``pulse`` for a field ``f`` times higher.

    Time is compressed by ``f`` and amplitude raised by ``f`` sample by
    sample, so the pulse area (flip angle) is preserved and the energy
    integral grows by exactly ``f``.
    """
    check_positive("f", f)
    f = float(f)
    if f == 1.0:
        return pulse
    return PulseEnvelope(pulse.times / f, pulse.amplitudes * f, pulse.name)


def effective_tr(tr_ref, f):
    """Shortest SAR-legal TR at ``f * B0_ref`` when ``tr_ref`` was SAR-limited at B0_ref."""
    check_positive("tr_ref", tr_ref)
    check_positive("f", f)
    f = np.asarray(f, dtype=float)
    return as_float(tr_ref * f ** 3)


def sar_relative(f, tr):
    """``f**3 / tr``, normalized so that ``sar_relative(1, 1) == 1``."""
    check_positive("f", f)
    check_positive("tr", tr)
    f = np.asarray(f, dtype=float)
    return as_float(f ** 3 / np.asarray(tr, dtype=float))


def within_budget(f, tr, budget: SarBudget = SarBudget()):
    """True when the relative SAR at ``(f, tr)`` does not exceed the budget."""
    if not budget.relative:
        raise InvalidParameterError("within_budget only handles relative budgets")
    return bool(sar_relative(f, tr) <= budget.sar_max * (1.0 + 1e-12))
