"""Command-line front end: single evaluations, frontiers, sweeps, figure data.

Exit codes: 0 success (and K > 0 for `keyrate`), 2 invalid flags or config,
3 insecure (K <= 0), 4 purification limit not converged, 5 unphysical
covariance matrix encountered.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from . import reproduce, tableio
from .analysis import (
    SweepSpec, loss_distance_convert, max_tolerable_excess_noise,
    optimize_modulation, run_sweep, worker_count,
)
from .errors import (
    CVQKDError, ConfigError, DomainError, NonConvergedError, PhysicalityError,
)
from .protocols import (
    COHERENT, DR, INFINITE, METHOD_ASYMPTOTIC, METHOD_PURIFICATION, METHODS,
    RR, SQUEEZED, ChannelParams, ProtocolParams, PurificationConfig, key_rate,
    with_params,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INSECURE = 3
EXIT_NOT_CONVERGED = 4
EXIT_UNPHYSICAL = 5

CONFIG_SCHEMA_VERSION = 1


def _tool_version():
    try:
        return version("cvqkd")
    except PackageNotFoundError:
        return "unknown"


def _parse_vm(text):
    if text == "inf":
        return INFINITE, False
    if text == "opt":
        return 1.0, True
    try:
        return float(text), False
    except ValueError:
        raise ConfigError(f"--vm must be a number, 'opt' or 'inf', got {text!r}")


def _precision(text):
    value = int(text)
    if not 1 <= value <= 17:
        raise argparse.ArgumentTypeError("precision must be between 1 and 17")
    return value


def _channel_from_args(args):
    given = [name for name in ("eta", "db", "km") if getattr(args, name) is not None]
    if len(given) != 1:
        raise ConfigError("exactly one of --eta, --db, --km is required")
    value = getattr(args, given[0])
    eta = loss_distance_convert(value, given[0], "eta")
    return ChannelParams(eta=eta, eps=args.eps)


def _purification_config(args):
    kw = {}
    if getattr(args, "t", None) is not None:
        kw["t"] = args.t
    if getattr(args, "t_check", None) is not None:
        kw["t_check"] = args.t_check
    if getattr(args, "tol_k", None) is not None:
        kw["tol_k"] = args.tol_k
    return PurificationConfig(**kw)


def cmd_keyrate(args):
    v_m, optimize = _parse_vm(args.vm)
    p = ProtocolParams(state_family=args.state,
                       v_s=args.vs, v_m=v_m, delta_v=args.dv, n_det=args.n,
                       beta=args.beta, direction=args.direction)
    c = _channel_from_args(args)
    cfg = _purification_config(args)
    if optimize:
        if args.method == METHOD_ASYMPTOTIC:
            raise ConfigError("--vm opt is not meaningful for the asymptotic method")
        v_m, _ = optimize_modulation(p, c, cfg, method=args.method)
        p = with_params(p, v_m=v_m)
    report = key_rate(p, c, cfg, args.method)
    row = tableio.keyrate_row(
        "cli", p, c, report,
        loss_distance_convert(c.eta, "eta", "db"),
        loss_distance_convert(c.eta, "eta", "km"))
    if args.out == "json":
        tableio.write_json(sys.stdout, [row], args.precision)
    else:
        tableio.write_csv(sys.stdout, [row], tableio.KEYRATE_COLUMNS, args.precision)
    return EXIT_OK if report.k > 0.0 else EXIT_INSECURE


def cmd_frontier(args):
    v_m, optimize = _parse_vm(args.vm)
    if math.isinf(v_m):
        raise ConfigError("frontier scans need a numeric --vm (or 'opt')")
    p = ProtocolParams(state_family=args.state, v_s=args.vs, v_m=v_m,
                       delta_v=args.dv, n_det=args.n, beta=args.beta,
                       direction=args.direction)
    cfg = _purification_config(args)
    optimize_over = tuple(s for s in (args.optimize or "").split(",") if s)
    if optimize:
        optimize_over = tuple(dict.fromkeys(optimize_over + ("v_m",)))
    if args.db_stop < args.db_start or args.db_step <= 0:
        raise ConfigError("need db_start <= db_stop and db_step > 0")
    rows = []
    loss = args.db_start
    while loss <= args.db_stop + 1e-9:
        eta = loss_distance_convert(loss, "db", "eta")
        point = max_tolerable_excess_noise(p, eta, cfg, optimize_over, args.method)
        rows.append(tableio.frontier_row(point))
        loss += args.db_step
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        tableio.write_csv(out, rows, tableio.FRONTIER_COLUMNS, args.precision)
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def cmd_reproduce(args):
    figures = sorted(reproduce.FIGURES) if args.figure == "all" else [args.figure]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for figure in figures:
        files, meta = reproduce.figure_rows(figure)
        for filename, (kind, rows) in files.items():
            columns = (tableio.KEYRATE_COLUMNS if kind == "keyrate"
                       else tableio.FRONTIER_COLUMNS)
            with open(out_dir / filename, "w", newline="") as fp:
                tableio.write_csv(fp, rows, columns, args.precision)
        sidecar = {"figure": figure, "tool_version": _tool_version(), "panels": meta}
        with open(out_dir / f"{figure}.meta.json", "w") as fp:
            json.dump(sidecar, fp, indent=2, sort_keys=True)
            fp.write("\n")
        print(f"{figure}: wrote {', '.join(sorted(files))}", file=sys.stderr)
    return EXIT_OK


# --- sweep config -----------------------------------------------------------

_PROTOCOL_KEYS = {"direction", "state", "v_s", "v_m", "delta_v", "n", "beta"}
_CHANNEL_KEYS = {"eta", "loss_db", "distance_km", "eps"}
_TOP_KEYS = {"schema_version", "objective", "protocol", "channel", "method",
             "purification", "axes", "optimize_over"}


def _reject_unknown(mapping, allowed, path):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} at {path}")


def _config_channel(doc):
    _reject_unknown(doc, _CHANNEL_KEYS, "channel")
    loss_keys = [k for k in ("eta", "loss_db", "distance_km") if k in doc]
    if len(loss_keys) != 1:
        raise ConfigError("channel needs exactly one of eta, loss_db, distance_km")
    key = loss_keys[0]
    eta = loss_distance_convert(
        doc[key], {"eta": "eta", "loss_db": "db", "distance_km": "km"}[key], "eta")
    return ChannelParams(eta=eta, eps=doc.get("eps", 0.0))


def load_config(path):
    """Parse and validate a sweep configuration document."""
    try:
        with open(path) as fp:
            doc = json.load(fp)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise ConfigError("config root must be an object")
    _reject_unknown(doc, _TOP_KEYS, "the top level")
    if doc.get("schema_version") != CONFIG_SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version must be {CONFIG_SCHEMA_VERSION}, "
            f"got {doc.get('schema_version')!r}")
    proto_doc = doc.get("protocol", {})
    _reject_unknown(proto_doc, _PROTOCOL_KEYS, "protocol")
    try:
        p = ProtocolParams(
            state_family=proto_doc.get("state", COHERENT),
            v_s=proto_doc.get("v_s", 1.0),
            v_m=float(proto_doc.get("v_m", 1.0)),
            delta_v=proto_doc.get("delta_v", 0.0),
            n_det=proto_doc.get("n", 0.0),
            beta=proto_doc.get("beta", 1.0),
            direction=proto_doc.get("direction", RR))
        c = _config_channel(doc.get("channel", {"eta": 1.0}))
        pur_doc = doc.get("purification", {})
        _reject_unknown(pur_doc, {"t", "t_check", "tol_k"}, "purification")
        cfg = PurificationConfig(**pur_doc)
        axes = []
        for i, axis in enumerate(doc.get("axes", [])):
            _reject_unknown(axis, {"name", "grid", "start", "stop", "step"},
                            f"axes[{i}]")
            if "name" not in axis:
                raise ConfigError(f"axes[{i}] needs a name")
            if "grid" in axis:
                grid = tuple(float(v) for v in axis["grid"])
            else:
                missing = {"start", "stop", "step"} - set(axis)
                if missing:
                    raise ConfigError(
                        f"axes[{i}] needs grid or start/stop/step (missing {sorted(missing)})")
                grid = reproduce._steps(axis["start"], axis["stop"], axis["step"])
            axes.append((axis["name"], grid))
        spec = SweepSpec(protocol=p, channel=c, axes=tuple(axes),
                         objective=doc.get("objective", "keyrate"),
                         optimize_over=tuple(doc.get("optimize_over", ())),
                         method=doc.get("method", METHOD_PURIFICATION),
                         cfg=cfg)
    except ConfigError:
        raise
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}")
    resolved = {
        "schema_version": CONFIG_SCHEMA_VERSION,
        "objective": spec.objective,
        "protocol": {"direction": p.direction, "state": p.state_family,
                     "v_s": p.v_s, "v_m": p.v_m, "delta_v": p.delta_v,
                     "n": p.n_det, "beta": p.beta},
        "channel": {"eta": c.eta, "eps": c.eps},
        "method": spec.method,
        "purification": {"t": cfg.t, "t_check": cfg.t_check, "tol_k": cfg.tol_k},
        "axes": [{"name": n, "grid": list(g)} for n, g in spec.axes],
        "optimize_over": list(spec.optimize_over),
    }
    return spec, resolved


def cmd_sweep(args):
    spec, resolved = load_config(args.config)
    rows_out = []
    kind = spec.objective
    for out in run_sweep(spec, workers=worker_count()):
        if out["error"] is not None:
            raise CVQKDError(out["error"])
        if kind == "keyrate":
            c = out["channel"]
            rows_out.append(tableio.keyrate_row(
                "sweep", out["protocol"], c, out["report"],
                loss_distance_convert(c.eta, "eta", "db"),
                loss_distance_convert(c.eta, "eta", "km")))
        else:
            rows_out.append(tableio.frontier_row(out["frontier"]))
    columns = tableio.KEYRATE_COLUMNS if kind == "keyrate" else tableio.FRONTIER_COLUMNS
    with open(args.out, "w", newline="") as fp:
        tableio.write_csv(fp, rows_out, columns, args.precision)
    sidecar_path = Path(args.out).with_suffix(".meta.json")
    with open(sidecar_path, "w") as fp:
        json.dump({"tool_version": _tool_version(), "config": resolved},
                  fp, indent=2, sort_keys=True)
        fp.write("\n")
    return EXIT_OK


def _add_scenario_flags(sub, vm_default="1"):
    sub.add_argument("--direction", choices=(DR, RR), required=True)
    sub.add_argument("--state", choices=(COHERENT, SQUEEZED), default=COHERENT)
    sub.add_argument("--vs", type=float, default=1.0, help="signal variance V_S (SNU)")
    sub.add_argument("--vm", default=vm_default,
                     help="modulation variance, a number or 'opt' or 'inf'")
    sub.add_argument("--dv", type=float, default=0.0, help="preparation noise (SNU)")
    sub.add_argument("--n", type=float, default=0.0, help="detection noise (SNU)")
    sub.add_argument("--beta", type=float, default=1.0)
    sub.add_argument("--eps", type=float, default=0.0, help="channel excess noise (SNU)")
    sub.add_argument("--method", choices=METHODS, default=METHOD_PURIFICATION)
    sub.add_argument("--t", type=float, default=None,
                     help="trusted-noise coupling transmittance override")
    sub.add_argument("--t-check", dest="t_check", type=float, default=None)
    sub.add_argument("--tol-k", dest="tol_k", type=float, default=None)
    sub.add_argument("--precision", type=_precision, default=tableio.DEFAULT_PRECISION,
                     help="significant digits in numeric output")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cvqkd",
        description="Secure key rate bounds for one-way Gaussian CV-QKD "
                    "with trusted preparation and detection noise.")
    sub = parser.add_subparsers(dest="command", required=True)

    kr = sub.add_parser("keyrate", help="evaluate one scenario")
    _add_scenario_flags(kr)
    group = kr.add_argument_group("channel (exactly one)")
    group.add_argument("--eta", type=float, default=None)
    group.add_argument("--db", type=float, default=None, help="channel loss in dB")
    group.add_argument("--km", type=float, default=None, help="fiber length in km")
    kr.add_argument("--out", choices=("csv", "json"), default="csv")
    kr.set_defaults(func=cmd_keyrate)

    fr = sub.add_parser("frontier", help="maximum tolerable excess noise vs loss")
    _add_scenario_flags(fr, vm_default="1e6")
    fr.add_argument("--db-start", type=float, required=True)
    fr.add_argument("--db-stop", type=float, required=True)
    fr.add_argument("--db-step", type=float, required=True)
    fr.add_argument("--optimize", default="",
                    help="comma-separated subset of v_m,delta_v,n")
    fr.add_argument("--output", default=None, help="CSV path (default stdout)")
    fr.set_defaults(func=cmd_frontier)

    rp = sub.add_parser("reproduce", help="emit the figure datasets")
    rp.add_argument("--figure", default="all",
                    choices=tuple(sorted(reproduce.FIGURES)) + ("all",))
    rp.add_argument("--out-dir", required=True)
    rp.add_argument("--precision", type=_precision, default=tableio.DEFAULT_PRECISION)
    rp.set_defaults(func=cmd_reproduce)

    sw = sub.add_parser("sweep", help="run a sweep from a JSON config")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", required=True)
    sw.add_argument("--precision", type=_precision, default=tableio.DEFAULT_PRECISION)
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except PhysicalityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNPHYSICAL
    except CVQKDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
