"""Parameter sweeps, golden tables and deterministic CSV/JSON/SVG emission."""

import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import singledispatch

import numpy as np

from ._validation import InvalidParameterError
from .core import SignalCurve, f_factor, snr_t_fixed_ta
from .optimize import (
    DEFAULT_F_MAX,
    DEFAULT_TOL,
    OptimizationResult,
    ScanScenario,
    SweepCurve,
    find_optimal_field,
    snr_t_max_sar,
)

TABLE1_TR0 = (0.2, 0.4, 0.6, 0.8, 1.0, 1.5, 2.0)
TABLE1_ALPHA = (0.3, 0.5)
FIG5_TR0 = 0.5
FIG5_ALPHA = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7)

MAX_POINTS = 10 ** 7
VARIABLES = ("f", "tr", "alpha", "theta")
SPACINGS = ("linear", "geometric")

_HEADERS = {
    "f": ("f", "snr_t"),
    "tr": ("tr_s", "snr_t"),
    "alpha": ("alpha", "snr_gain"),
    "theta": ("theta_rad", "f_factor"),
}


class InvalidSpecError(InvalidParameterError):
    """A sweep specification is inconsistent."""


class UnsupportedFormatError(InvalidParameterError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional sweep of ``variable`` with everything else held by ``fixed``.

    A single point is allowed when ``start == stop``.
    """

    variable: str
    start: float
    stop: float
    n_points: int
    fixed: ScanScenario
    spacing: str = "linear"
    f_max: float = DEFAULT_F_MAX
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise InvalidSpecError(f"variable must be one of {VARIABLES}, got {self.variable!r}")
        if self.spacing not in SPACINGS:
            raise InvalidSpecError(f"spacing must be one of {SPACINGS}, got {self.spacing!r}")
        if int(self.n_points) != self.n_points or not 1 <= self.n_points <= MAX_POINTS:
            raise InvalidSpecError(f"n_points must be an integer in [1, {MAX_POINTS}]")
        if self.n_points == 1:
            if self.start != self.stop:
                raise InvalidSpecError("a single-point sweep needs start == stop")
        elif not self.start < self.stop:
            raise InvalidSpecError(f"start ({self.start!r}) must be below stop ({self.stop!r})")
        needs_positive = self.variable in ("f", "tr") or self.spacing == "geometric"
        if needs_positive and not self.start > 0:
            raise InvalidSpecError(f"start must be > 0 for {self.variable} sweeps")
        if self.variable == "alpha" and (self.start < 0 or self.stop > 2):
            raise InvalidSpecError("alpha sweeps must stay within [0, 2]")
        if self.variable == "theta" and (self.start < 0 or self.stop > np.pi):
            raise InvalidSpecError("theta sweeps must stay within [0, pi]")

    def abscissa(self):
        n = int(self.n_points)
        if n == 1:
            return np.array([float(self.start)])
        if self.spacing == "geometric":
            x = np.geomspace(self.start, self.stop, n)
        else:
            x = np.linspace(self.start, self.stop, n)
        x[0], x[-1] = self.start, self.stop
        return x


@dataclass(frozen=True)
class Table1Row:
    tr0_in_t1: float
    alpha: float
    f_opt: float
    tr_e_opt_in_tr0: float
    snr_gain: float


@dataclass(frozen=True)
class Table1Report:
    rows: tuple

    headers = ("tr0_in_t1", "alpha", "f_opt", "tr_e_opt_in_tr0", "snr_gain")

    def row(self, tr0_in_t1, alpha):
        for r in self.rows:
            if np.isclose(r.tr0_in_t1, tr0_in_t1) and np.isclose(r.alpha, alpha):
                return r
        raise KeyError((tr0_in_t1, alpha))

    def to_dict(self):
        return {"rows": [asdict(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(Table1Row(**r) for r in data["rows"]))


@dataclass(frozen=True)
class LadderRow:
    alpha: float
    f_opt: float
    tr_e_opt_in_t1: float
    tr_e_opt_in_t1_ref: float


@dataclass(frozen=True)
class Fig5Ladder:
    rows: tuple
    tr0_in_t1: float = FIG5_TR0

    headers = ("alpha", "f_opt", "tr_e_opt_in_t1", "tr_e_opt_in_t1_ref")

    def to_dict(self):
        return {"tr0_in_t1": self.tr0_in_t1, "rows": [asdict(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(LadderRow(**r) for r in data["rows"]), data["tr0_in_t1"])


def _parallel_map(func, items, jobs=1):
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def _curve(spec, values):
    x_name, value_name = _HEADERS[spec.variable]
    label = (f"{spec.variable} sweep, tr0/t1={spec.fixed.tr0_in_t1:g}, "
             f"alpha={spec.fixed.relax.alpha:g}")
    return SweepCurve(spec.abscissa(), values, label=label, x_name=x_name,
                      value_name=value_name)


def sweep_snrt_vs_f(spec: SweepSpec, jobs=1):
    """Normalized SNR per unit time at maximum SAR across field scale factors."""
    if spec.variable != "f":
        raise InvalidSpecError("sweep_snrt_vs_f needs variable='f'")
    # one vectorized pass; chunking across threads could change SIMD tails
    return _curve(spec, np.atleast_1d(snr_t_max_sar(spec.fixed, spec.abscissa())))


def sweep_snrt_vs_tr(spec: SweepSpec, jobs=1):
    """SNR per unit time at fixed TA and B0 across repetition times."""
    if spec.variable != "tr":
        raise InvalidSpecError("sweep_snrt_vs_tr needs variable='tr'")
    s = spec.fixed
    values = snr_t_fixed_ta(s.field.b0_ref, spec.abscissa(), s.relax.t1_ref)
    return _curve(spec, np.atleast_1d(values))


def sweep(spec: SweepSpec, jobs=1):
    """Dispatch on ``spec.variable``.

    ``alpha`` sweeps report the optimal gain for each alpha; ``theta``
    sweeps report the F-factor at ``tr_ref`` for each flip angle.
    """
    if spec.variable == "f":
        return sweep_snrt_vs_f(spec, jobs)
    if spec.variable == "tr":
        return sweep_snrt_vs_tr(spec, jobs)
    s = spec.fixed
    if spec.variable == "alpha":
        def gain(a):
            return find_optimal_field(s.with_alpha(float(a)), f_max=spec.f_max,
                                      tol=spec.tol).snr_gain
        return _curve(spec, _parallel_map(gain, spec.abscissa(), jobs))
    values = f_factor(s.timing.tr_ref, s.relax.t1_ref, spec.abscissa())
    return _curve(spec, np.atleast_1d(values))


def reproduce_table1(t1_ref=1.0, f_max=DEFAULT_F_MAX, tol=DEFAULT_TOL, jobs=1):
    """Optimal operating points over TR0 in {0.2 .. 2.0} T1 and alpha in {0.3, 0.5}."""
    cells = [(tr0, a) for tr0 in TABLE1_TR0 for a in TABLE1_ALPHA]

    def solve(cell):
        tr0, alpha = cell
        r = find_optimal_field(ScanScenario.from_ratio(tr0, alpha, t1_ref=t1_ref),
                               f_max=f_max, tol=tol)
        return Table1Row(tr0, alpha, r.f_opt, r.tr_e_opt_in_tr0, r.snr_gain)

    return Table1Report(tuple(_parallel_map(solve, cells, jobs)))


def reproduce_fig5_ladder(t1_ref=1.0, f_max=DEFAULT_F_MAX, tol=DEFAULT_TOL, jobs=1):
    """Optimal effective TR in units of T1(f_opt) for alpha = 0.1 .. 0.7 at TR0 = 0.5 T1."""
    def solve(alpha):
        r = find_optimal_field(ScanScenario.from_ratio(FIG5_TR0, alpha, t1_ref=t1_ref),
                               f_max=f_max, tol=tol)
        return LadderRow(alpha, r.f_opt, r.tr_e_opt_in_t1, r.tr_e_opt_in_t1_ref)

    return Fig5Ladder(tuple(_parallel_map(solve, FIG5_ALPHA, jobs)))


# --- emission --------------------------------------------------------------

def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.6g}"


@singledispatch
def _tabulate(obj):
    raise InvalidParameterError(f"cannot emit objects of type {type(obj).__name__}")


@_tabulate.register
def _(obj: SweepCurve):
    rows = list(zip(obj.f.tolist(), obj.value.tolist()))
    payload = {
        "label": obj.label,
        "x_name": obj.x_name,
        "value_name": obj.value_name,
        "points": [{obj.x_name: x, obj.value_name: v} for x, v in rows],
    }
    return (obj.x_name, obj.value_name), rows, payload


@_tabulate.register
def _(obj: Table1Report):
    rows = [tuple(asdict(r).values()) for r in obj.rows]
    return obj.headers, rows, obj.to_dict()


@_tabulate.register
def _(obj: Fig5Ladder):
    rows = [tuple(asdict(r).values()) for r in obj.rows]
    return obj.headers, rows, obj.to_dict()


@_tabulate.register
def _(obj: OptimizationResult):
    d = obj.to_dict()
    return tuple(d), [tuple(d.values())], d


@_tabulate.register
def _(obj: SignalCurve):
    rows = list(obj.rows())
    payload = {
        "flip_angle_rad": obj.flip_angle,
        "mz_steady": obj.mz_steady,
        "transverse_at_pulse": obj.transverse_at_pulse,
        "points": [{"time_s": t, "mz": mz} for t, mz, _ in rows],
    }
    return ("time_s", "mz", "mxy_at_pulse"), rows, payload


@_tabulate.register
def _(obj: dict):
    return tuple(obj), [tuple(obj.values())], obj


def curve_from_dict(data):
    x_name, value_name = data["x_name"], data["value_name"]
    pts = data["points"]
    return SweepCurve([p[x_name] for p in pts], [p[value_name] for p in pts],
                      label=data["label"], x_name=x_name, value_name=value_name)


def render(obj, fmt="csv"):
    """Text rendering of a report object; identical inputs give identical bytes."""
    headers, rows, payload = _tabulate(obj)
    if fmt == "csv":
        lines = [",".join(headers)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"
    raise UnsupportedFormatError(f"unsupported format {fmt!r}; use csv or json")


def emit(obj, fmt="csv", destination=None):
    """Write :func:`render` output to a path, a text stream, or stdout (``None``/``"-"``)."""
    text = render(obj, fmt)
    if destination is None or destination == "-":
        sys.stdout.write(text)
    elif isinstance(destination, io.TextIOBase) or hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def curve_to_svg(curve: SweepCurve, width=640, height=400, margin=48):
    """Minimal SVG line chart of a sweep curve."""
    x, y = curve.f, curve.value
    if x.size == 0:
        raise InvalidParameterError("cannot plot an empty curve")
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(min(y.min(), 0.0)), float(y.max())
    sx = (width - 2 * margin) / ((x1 - x0) or 1.0)
    sy = (height - 2 * margin) / ((y1 - y0) or 1.0)
    pts = " ".join(
        f"{margin + (a - x0) * sx:.2f},{height - margin - (b - y0) * sy:.2f}"
        for a, b in zip(x.tolist(), y.tolist()))
    bottom, right = height - margin, width - margin
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'  <title>{_escape(curve.label)}</title>',
        f'  <line x1="{margin}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'  <line x1="{margin}" y1="{margin}" x2="{margin}" y2="{bottom}" stroke="black"/>',
        f'  <text x="{right}" y="{height - 12}" text-anchor="end">{_escape(curve.x_name)}'
        f' [{x0:.3g}, {x1:.3g}]</text>',
        f'  <text x="4" y="{margin - 12}">{_escape(curve.value_name)} max {y1:.4g}</text>',
        f'  <polyline fill="none" stroke="steelblue" stroke-width="2" points="{pts}"/>',
        "</svg>",
    ]) + "\n"


def _escape(text):
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
