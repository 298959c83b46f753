"""Command-line interface.

Exit codes: 0 success, 1 invalid arguments/config/input file, 2 numeric
failure (non-finite objective).
"""

import argparse
import json
import math
import sys

import numpy as np

from ._validation import DegenerateObjectiveError, InvalidParameterError
from .core import (
    FieldScaling,
    RelaxationParams,
    SequenceTiming,
    ernst_angle,
    f_factor,
    f_factor_ernst,
    one_tr_signal_curve,
)
from .optimize import (
    DEFAULT_F_MAX,
    DEFAULT_TOL,
    Condition,
    ScanScenario,
    find_optimal_field,
)
from .report import (
    SweepSpec,
    curve_to_svg,
    emit,
    reproduce_fig5_ladder,
    reproduce_table1,
    sweep,
)
from .sar import (
    PulseEnvelope,
    SarConstants,
    pulse_area,
    pulse_energy,
    sar_absolute,
    sar_relative,
    scale_pulse_to_field,
)

CONFIG_KEYS = {
    "condition", "b0_ref_tesla", "tr0_s", "t1_ref_s", "alpha", "ta_s", "f_max", "tolerance",
    "sweep_variable", "sweep_start", "sweep_stop", "sweep_points", "sweep_spacing",
}
REQUIRED_KEYS = {"condition", "tr0_s", "t1_ref_s"}

CONSTANTS_KEYS = {
    "conductivity_s_per_m": "conductivity",
    "loop_area_m2": "loop_area",
    "tissue_mass_kg": "tissue_mass",
    "larmor_freq_rad_s": "larmor_freq",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _number(name, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidParameterError(f"config key {name!r} must be a number, got {value!r}")
    if kind is int and int(value) != value:
        raise InvalidParameterError(f"config key {name!r} must be an integer, got {value!r}")
    if not math.isfinite(value):
        raise InvalidParameterError(f"config key {name!r} must be finite")
    return kind(value)


def load_config(path):
    """Read and validate a scenario JSON document; unknown keys are rejected."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidParameterError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(data)


def parse_config(data):
    if not isinstance(data, dict):
        raise InvalidParameterError("config must be a JSON object")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
    missing = REQUIRED_KEYS - set(data)
    if missing:
        raise InvalidParameterError(f"missing config keys: {sorted(missing)}")
    try:
        condition = Condition(str(data["condition"]))
    except ValueError:
        raise InvalidParameterError(
            f"condition must be one of I, II, III, got {data['condition']!r}") from None

    tr0 = _number("tr0_s", data["tr0_s"])
    t1 = _number("t1_ref_s", data["t1_ref_s"])
    alpha = _number("alpha", data.get("alpha", 0.0))
    ta = _number("ta_s", data.get("ta_s", max(300.0, tr0)))
    scenario = ScanScenario(
        condition=condition,
        field=FieldScaling(_number("b0_ref_tesla", data.get("b0_ref_tesla", 1.5))),
        timing=SequenceTiming(tr_ref=tr0, ta=ta),
        relax=RelaxationParams(t1_ref=t1, alpha=alpha),
    )
    cfg = {
        "scenario": scenario,
        "f_max": _number("f_max", data.get("f_max", DEFAULT_F_MAX)),
        "tolerance": _number("tolerance", data.get("tolerance", DEFAULT_TOL)),
    }
    default_var = "tr" if condition is Condition.I else "f"
    cfg["sweep_variable"] = data.get("sweep_variable", default_var)
    if default_var == "tr":
        start, stop, spacing = 0.01 * t1, 10.0 * t1, "geometric"
    else:
        start, stop, spacing = 1.0, 5.0, "linear"
    cfg["sweep_start"] = _number("sweep_start", data.get("sweep_start", start))
    cfg["sweep_stop"] = _number("sweep_stop", data.get("sweep_stop", stop))
    cfg["sweep_points"] = _number("sweep_points", data.get("sweep_points", 401), int)
    cfg["sweep_spacing"] = data.get("sweep_spacing", spacing)
    return cfg


def load_pulse(path):
    with open(path, encoding="utf-8") as fh:
        return PulseEnvelope.from_csv(fh.read(), name=path)


def load_constants(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidParameterError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict) or set(data) != set(CONSTANTS_KEYS):
        raise InvalidParameterError(
            f"constants file must have exactly the keys {sorted(CONSTANTS_KEYS)}")
    return SarConstants(**{CONSTANTS_KEYS[k]: _number(k, v) for k, v in data.items()})


def _write(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _emit(obj, args):
    emit(obj, args.format, args.out)


# --- subcommands -----------------------------------------------------------

def cmd_ernst(args):
    theta = ernst_angle(args.tr, args.t1)
    _emit({"tr_s": args.tr, "t1_s": args.t1, "ernst_deg": math.degrees(theta),
           "ernst_rad": theta}, args)


def cmd_ffactor(args):
    if args.theta_deg is None:
        theta = ernst_angle(args.tr, args.t1)
        value = f_factor_ernst(args.tr, args.t1)
    else:
        theta = math.radians(args.theta_deg)
        value = f_factor(args.tr, args.t1, theta)
    _emit({"tr_s": args.tr, "t1_s": args.t1, "theta_deg": math.degrees(theta),
           "f_factor": value}, args)


def _write_svg(curve, path):
    if path:
        _write(curve_to_svg(curve), path)


def cmd_snrt_tr(args):
    scenario = ScanScenario(
        condition=Condition.I,
        field=FieldScaling(args.b0),
        timing=SequenceTiming(tr_ref=args.tr_max, ta=max(args.ta, args.tr_max)),
        relax=RelaxationParams(args.t1),
    )
    spec = SweepSpec("tr", args.tr_min, args.tr_max, args.n, scenario, spacing=args.spacing)
    curve = sweep(spec)
    _emit(curve, args)
    _write_svg(curve, args.svg)


def cmd_signal(args):
    _emit(one_tr_signal_curve(args.tr, args.t1, args.n), args)


def cmd_optimize(args):
    cfg = load_config(args.config)
    scenario = cfg["scenario"]
    if scenario.condition is Condition.I:
        raise InvalidParameterError("optimize needs condition II or III")
    result = find_optimal_field(scenario, f_max=cfg["f_max"], tol=cfg["tolerance"],
                                f_min=args.f_min)
    _emit(result, args)


def cmd_sweep(args):
    cfg = load_config(args.config)
    scenario = cfg["scenario"]
    start = cfg["sweep_start"]
    if args.f_min is not None and cfg["sweep_variable"] == "f":
        start = args.f_min
    spec = SweepSpec(cfg["sweep_variable"], start, cfg["sweep_stop"], cfg["sweep_points"],
                     scenario, spacing=cfg["sweep_spacing"], f_max=cfg["f_max"],
                     tol=cfg["tolerance"])
    if scenario.condition is Condition.I and spec.variable in ("f", "alpha"):
        raise InvalidParameterError(f"{spec.variable} sweeps need condition II or III")
    curve = sweep(spec, jobs=args.jobs)
    _emit(curve, args)
    _write_svg(curve, args.svg)


def cmd_table1(args):
    _emit(reproduce_table1(t1_ref=args.t1, jobs=args.jobs), args)


def cmd_fig5(args):
    _emit(reproduce_fig5_ladder(t1_ref=args.t1, jobs=args.jobs), args)


def cmd_sar(args):
    pulse = load_pulse(args.pulse)
    pulse = scale_pulse_to_field(pulse, args.f)
    record = {
        "pulse": pulse.name,
        "f": args.f,
        "duration_s": pulse.duration,
        "energy_t2s": pulse_energy(pulse),
        "area_ts": pulse_area(pulse),
        "tr_s": args.tr,
        "sar_relative": sar_relative(args.f, args.tr),
    }
    if args.constants:
        record["sar_w_per_kg"] = sar_absolute(pulse, load_constants(args.constants), args.tr)
    _emit(record, args)


def cmd_pulse_scale(args):
    scaled = scale_pulse_to_field(load_pulse(args.pulse), args.f)
    if args.format == "csv":
        _write(scaled.to_csv(), args.out)
    else:
        payload = {"name": scaled.name, "time_s": scaled.times.tolist(),
                   "b1_tesla": scaled.amplitudes.tolist()}
        _write(json.dumps(payload, indent=2) + "\n", args.out)


def build_parser():
    parser = _Parser(prog="mrs-snrt", description=(
        "SNR per unit acquisition time of single-voxel MRS versus B0 under "
        "fixed TA and maximum SAR."))
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ernst", parents=[common], help="Ernst angle")
    p.add_argument("--tr", type=float, required=True, help="repetition time [s]")
    p.add_argument("--t1", type=float, required=True, help="T1 [s]")
    p.set_defaults(func=cmd_ernst)

    p = sub.add_parser("ffactor", parents=[common], help="steady-state F-factor")
    p.add_argument("--tr", type=float, required=True)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--theta-deg", type=float, default=None,
                   help="flip angle in degrees (default: Ernst angle)")
    p.set_defaults(func=cmd_ffactor)

    p = sub.add_parser("snrt-tr", parents=[common], help="SNR_t versus TR at fixed TA and B0")
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--b0", type=float, default=1.0)
    p.add_argument("--ta", type=float, default=300.0)
    p.add_argument("--tr-min", type=float, default=0.01)
    p.add_argument("--tr-max", type=float, default=10.0)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--spacing", choices=("linear", "geometric"), default="geometric")
    p.add_argument("--svg", default=None, help="also write an SVG line chart")
    p.set_defaults(func=cmd_snrt_tr)

    p = sub.add_parser("signal", parents=[common], help="magnetization within one TR")
    p.add_argument("--tr", type=float, required=True)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--n", type=int, default=500)
    p.set_defaults(func=cmd_signal)

    for name, func, text in (("optimize", cmd_optimize, "optimal field for a scenario"),
                             ("sweep", cmd_sweep, "sweep a scenario variable")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--f-min", type=float, default=1.0 if name == "optimize" else None,
                       help="lower edge of the field search; values below 1 explore down-scaling")
        if name == "sweep":
            p.add_argument("--jobs", type=int, default=1)
            p.add_argument("--svg", default=None)
        p.set_defaults(func=func)

    for name, func, text in (
            ("table1", cmd_table1, "optimum grid over TR0 in {0.2..2} T1 and alpha in {0.3, 0.5}"),
            ("fig5", cmd_fig5, "TRe,opt/T1 ladder for alpha 0.1..0.7 at TR0 = 0.5 T1")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--t1", type=float, default=1.0, help="reference T1 [s]")
        p.add_argument("--jobs", type=int, default=1, help="worker threads")
        p.set_defaults(func=func)

    p = sub.add_parser("sar", parents=[common], help="pulse energy and SAR")
    p.add_argument("--pulse", required=True, help="CSV with header time_s,b1_tesla")
    p.add_argument("--tr", type=float, required=True)
    p.add_argument("--f", type=float, default=1.0, help="field scale factor applied to the pulse")
    p.add_argument("--constants", default=None, help="JSON with SAR model constants")
    p.set_defaults(func=cmd_sar)

    p = sub.add_parser("pulse-scale", parents=[common], help="bandwidth-scale a pulse")
    p.add_argument("--pulse", required=True)
    p.add_argument("--f", type=float, required=True)
    p.set_defaults(func=cmd_pulse_scale)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
            raise InvalidParameterError("--jobs must be >= 1")
        with np.errstate(over="ignore"):
            args.func(args)
    except DegenerateObjectiveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, InvalidParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
