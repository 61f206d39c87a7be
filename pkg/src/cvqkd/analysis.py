"""Optimization, security frontiers and parameter sweeps over protocol scenarios."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .errors import DomainError, MonotonicityError, OptimizerAmbiguityError
from .protocols import (
    DR, RR, METHOD_PURIFICATION,
    ChannelParams, ProtocolParams, PurificationConfig, key_rate,
)

#: standard telecom fiber attenuation used for the distance axis
FIBER_DB_PER_KM = 0.2

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

#: Pre-scan peaks within this many bits of each other count as one flat
#: optimum, not an ambiguity: near the trusted-noise saturation plateau the
#: key rate is flat to ~1e-7 bits and evaluation noise (~1e-8) would
#: otherwise split it into spurious micro-maxima.
SCAN_PROMINENCE = 1e-6


def loss_distance_convert(value: float, frm: str, to: str) -> float:
    """Convert between transmittance, dB loss and km of standard fiber."""
    units = ("eta", "db", "km")
    if frm not in units or to not in units:
        raise DomainError(f"units must be one of {units}")
    if frm == "eta":
        if not 0.0 < value <= 1.0:
            raise DomainError(f"eta must be in (0, 1], got {value}")
        db = -10.0 * math.log10(value)
    elif frm == "db":
        if value < 0.0:
            raise DomainError(f"dB loss must be >= 0, got {value}")
        db = value
    else:
        if value < 0.0:
            raise DomainError(f"distance must be >= 0, got {value}")
        db = value * FIBER_DB_PER_KM
    if to == "eta":
        return 10.0 ** (-db / 10.0)
    if to == "db":
        return db
    return db / FIBER_DB_PER_KM


def _golden_max(f, lo, hi, x_tol):
    """Golden-section maximization of a unimodal f on [lo, hi]."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > x_tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = c if fc >= fd else d
    return x, max(fc, fd)


def _prescan(f, lo, hi, points):
    xs = [lo + (hi - lo) * i / (points - 1) for i in range(points)]
    ks = [f(x) for x in xs]
    return xs, ks


def _interior_maxima(ks, prominence):
    out = []
    for i in range(1, len(ks) - 1):
        if ks[i] > ks[i - 1] + prominence and ks[i] > ks[i + 1] + prominence:
            out.append(i)
    return out


def _k_of(p, c, cfg, method):
    return key_rate(p, c, cfg, method).k


def optimize_modulation(p: ProtocolParams, c: ChannelParams,
                        cfg: PurificationConfig | None = None,
                        bounds=(1e-3, 1e4),
                        method: str = METHOD_PURIFICATION):
    """Maximize K over the modulation variance, log-spaced golden section.

    A 32-point coarse pre-scan guards the unimodality assumption and raises
    OptimizerAmbiguityError (carrying the scan) if several interior local
    maxima stand out beyond tolerance.  Relative tolerance on V_M is 1e-4.
    Returns (v_m_opt, k_opt).
    """
    if cfg is None:
        cfg = PurificationConfig()
    lo, hi = bounds
    if not 0.0 < lo < hi:
        raise DomainError(f"bounds must be positive and increasing, got {bounds}")

    def k_of_log(u):
        return _k_of(replace(p, v_m=10.0 ** u), c, cfg, method)

    ulo, uhi = math.log10(lo), math.log10(hi)
    us, ks = _prescan(k_of_log, ulo, uhi, 32)
    peaks = _interior_maxima(ks, SCAN_PROMINENCE)
    if len(peaks) > 1:
        raise OptimizerAmbiguityError(
            "modulation pre-scan found several interior local maxima",
            scan=([10.0 ** u for u in us], ks))
    best = max(range(len(ks)), key=ks.__getitem__)
    a = us[max(best - 1, 0)]
    b = us[min(best + 1, len(us) - 1)]
    u_opt, k_opt = _golden_max(k_of_log, a, b, math.log10(1.0 + 1e-4))
    return 10.0 ** u_opt, k_opt


def optimize_trusted_noise(p: ProtocolParams, c: ChannelParams,
                           cfg: PurificationConfig | None = None,
                           which: str = "delta_v",
                           bounds=(0.0, 10.0),
                           method: str = METHOD_PURIFICATION):
    """Maximize K over one trusted noise, returning (noise_opt, k_opt).

    Preparation noise is only beneficial on the reference side, so
    which="delta_v" requires direct reconciliation and which="n" reverse
    reconciliation.  Returns noise 0 when no interior improvement exists.
    """
    if cfg is None:
        cfg = PurificationConfig()
    if which == "delta_v":
        if p.direction != DR:
            raise DomainError("preparation noise is optimized for DR only")
        k_at = lambda v: _k_of(replace(p, delta_v=v), c, cfg, method)
    elif which == "n":
        if p.direction != RR:
            raise DomainError("detection noise is optimized for RR only")
        k_at = lambda v: _k_of(replace(p, n_det=v), c, cfg, method)
    else:
        raise DomainError(f"which must be 'delta_v' or 'n', got {which!r}")
    lo, hi = bounds
    if not 0.0 <= lo < hi:
        raise DomainError(f"bounds must be increasing and >= 0, got {bounds}")

    k0 = k_at(lo)
    xs, ks = _prescan(k_at, lo, hi, 32)
    peaks = _interior_maxima(ks, SCAN_PROMINENCE)
    if len(peaks) > 1:
        raise OptimizerAmbiguityError(
            "trusted-noise pre-scan found several interior local maxima",
            scan=(xs, ks))
    best = max(range(len(ks)), key=ks.__getitem__)
    a = xs[max(best - 1, 0)]
    b = xs[min(best + 1, len(xs) - 1)]
    x_opt, k_opt = _golden_max(k_at, a, b, 1e-5)
    if k_opt <= k0:
        return lo, k0
    return x_opt, k_opt


@dataclass(frozen=True)
class FrontierPoint:
    """Maximum tolerable channel excess noise at one transmittance."""

    eta: float
    loss_db: float
    distance_km: float
    eps_max: float
    v_m_opt: float
    delta_v_opt: float
    n_opt: float
    direction: str
    state_family: str
    flags: tuple[str, ...] = ()


def _inner_optimized(p, c, cfg, optimize_over, method):
    """Optimize the requested nuisance parameters at a fixed channel.

    Nested 1-D searches in the order v_m, delta_v, n; returns the updated
    parameters and the key rate at them.
    """
    current = p
    if "v_m" in optimize_over:
        v_m, _ = optimize_modulation(current, c, cfg, method=method)
        current = replace(current, v_m=v_m)
    if "delta_v" in optimize_over:
        dv, _ = optimize_trusted_noise(current, c, cfg, which="delta_v", method=method)
        current = replace(current, delta_v=dv)
    if "n" in optimize_over:
        nd, _ = optimize_trusted_noise(current, c, cfg, which="n", method=method)
        current = replace(current, n_det=nd)
    return current, _k_of(current, c, cfg, method)


def max_tolerable_excess_noise(p: ProtocolParams, eta: float,
                               cfg: PurificationConfig | None = None,
                               optimize_over=(),
                               method: str = METHOD_PURIFICATION,
                               ceiling: float = 5.0) -> FrontierPoint:
    """Largest eps with positive inner-optimized key rate, by sign bisection.

    The nuisance parameters in optimize_over (subset of v_m / delta_v / n) are
    re-optimized at every trial eps since the optima shift with the channel
    noise.  Monotonicity of the optimized K in eps is checked on an 8-point
    pre-scan; eps resolution is 1e-5 SNU.  A non-positive K at eps = 0 yields
    eps_max = 0 with an "insecure_at_zero" flag.
    """
    if cfg is None:
        cfg = PurificationConfig()
    bad = set(optimize_over) - {"v_m", "delta_v", "n"}
    if bad:
        raise DomainError(f"cannot optimize over {sorted(bad)}")

    def k_at(eps):
        _, k = _inner_optimized(p, ChannelParams(eta, eps), cfg, optimize_over, method)
        return k

    flags = []
    k0 = k_at(0.0)
    loss_db = loss_distance_convert(eta, "eta", "db")
    km = loss_distance_convert(eta, "eta", "km")
    if k0 <= 0.0:
        return FrontierPoint(eta=eta, loss_db=loss_db, distance_km=km, eps_max=0.0,
                             v_m_opt=p.v_m, delta_v_opt=p.delta_v, n_opt=p.n_det,
                             direction=p.direction, state_family=p.state_family,
                             flags=("insecure_at_zero",))
    xs, ks = _prescan(k_at, 0.0, ceiling, 8)
    for i in range(len(ks) - 1):
        if ks[i + 1] > ks[i] + max(1e-9, 1e-9 * abs(ks[i])):
            raise MonotonicityError(
                f"optimized K is not decreasing in eps near eps = {xs[i]:.3f}")
    lo, hi = 0.0, ceiling
    for i in range(len(ks)):
        if ks[i] <= 0.0:
            lo, hi = xs[max(i - 1, 0)], xs[i]
            break
    else:
        flags.append("at_ceiling")
        lo = hi = ceiling
    while hi - lo > 1e-5:
        mid = 0.5 * (lo + hi)
        if k_at(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    eps_max = 0.5 * (lo + hi) if hi > lo else ceiling
    opt_p, _ = _inner_optimized(p, ChannelParams(eta, eps_max), cfg, optimize_over, method)
    return FrontierPoint(eta=eta, loss_db=loss_db, distance_km=km, eps_max=eps_max,
                         v_m_opt=opt_p.v_m, delta_v_opt=opt_p.delta_v, n_opt=opt_p.n_det,
                         direction=p.direction, state_family=p.state_family,
                         flags=tuple(flags))


# Axis names understood by sweeps: protocol fields, channel fields, and the
# two loss aliases that set eta through the unit conversions.
_PROTOCOL_AXES = ("v_s", "v_m", "delta_v", "n", "beta")
_CHANNEL_AXES = ("eta", "eps", "loss_db", "distance_km")


@dataclass(frozen=True)
class SweepSpec:
    """A grid evaluation over protocol/channel parameters.

    axes: ordered (name, grid) pairs, cartesian-product order, grids strictly
    monotone; objective "keyrate" or "frontier"; optimize_over names nuisance
    parameters re-optimized per grid point (disjoint from the axes).
    """

    protocol: ProtocolParams
    channel: ChannelParams
    axes: tuple = ()
    objective: str = "keyrate"
    optimize_over: tuple = ()
    method: str = METHOD_PURIFICATION
    cfg: PurificationConfig = field(default_factory=PurificationConfig)

    def __post_init__(self):
        if self.objective not in ("keyrate", "frontier"):
            raise DomainError(f"unknown objective {self.objective!r}")
        names = [n for n, _ in self.axes]
        if len(set(names)) != len(names):
            raise DomainError("duplicate axis names")
        for name, grid in self.axes:
            if name not in _PROTOCOL_AXES + _CHANNEL_AXES:
                raise DomainError(f"unknown axis {name!r}")
            grid = list(grid)
            if not grid:
                raise DomainError(f"axis {name!r} has an empty grid")
            steps = [b - a for a, b in zip(grid, grid[1:])]
            if steps and not (all(s > 0 for s in steps) or all(s < 0 for s in steps)):
                raise DomainError(f"axis {name!r} grid is not strictly monotone")
        overlap = set(names) & set(self.optimize_over)
        if overlap:
            raise DomainError(f"axes overlap optimize_over: {sorted(overlap)}")
        bad = set(self.optimize_over) - {"v_m", "delta_v", "n"}
        if bad:
            raise DomainError(f"cannot optimize over {sorted(bad)}")


def _apply_point(p, c, assignment):
    pk, ck = {}, {}
    for name, value in assignment.items():
        if name in ("loss_db", "distance_km"):
            ck["eta"] = loss_distance_convert(
                value, "db" if name == "loss_db" else "km", "eta")
        elif name == "n":
            pk["n_det"] = value
        elif name in _PROTOCOL_AXES:
            pk[name] = value
        else:
            ck[name] = value
    return replace(p, **pk) if pk else p, replace(c, **ck) if ck else c


def _grid_points(axes):
    if not axes:
        return [{}]
    points = [{}]
    for name, grid in axes:
        points = [dict(pt, **{name: v}) for pt in points for v in grid]
    return points


def _sweep_row(spec, assignment):
    row = dict(assignment)
    try:
        p, c = _apply_point(spec.protocol, spec.channel, assignment)
        if spec.objective == "keyrate":
            if spec.optimize_over:
                p, _ = _inner_optimized(p, c, spec.cfg, spec.optimize_over, spec.method)
            report = key_rate(p, c, spec.cfg, spec.method)
            row.update(protocol=p, channel=c, report=report, error=None)
        else:
            point = max_tolerable_excess_noise(
                p, c.eta, spec.cfg, spec.optimize_over, spec.method)
            row.update(protocol=p, channel=c, frontier=point, error=None)
    except Exception as exc:  # per-point failures stay in the table
        row.update(error=f"{type(exc).__name__}: {exc}")
    return row


def worker_count() -> int:
    """Sweep parallelism, capped by the CVQKD_THREADS environment variable."""
    raw = os.environ.get("CVQKD_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"CVQKD_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def run_sweep(spec: SweepSpec, workers: int | None = None):
    """Evaluate the grid; deterministic row order matching the grid order.

    Workers are pure and results are merged by grid index, so parallel and
    serial runs produce identical tables; failures are recorded per row.
    """
    points = _grid_points(spec.axes)
    if workers is None:
        workers = worker_count()
    if workers <= 1 or len(points) <= 1:
        return [_sweep_row(spec, pt) for pt in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda pt: _sweep_row(spec, pt), points))
