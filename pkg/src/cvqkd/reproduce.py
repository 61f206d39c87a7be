"""Publication figure datasets with the parameter settings baked in.

Each figure id maps to one or more CSV panels.  Key-rate panels sweep a noise
or distance axis for a list of series; frontier panels sweep a dB-loss axis.
Series are emitted one after another, each with its axis ascending, so a
reader can split series on axis restarts.  Grids are this package's choice
(the captions fix only the physics parameters) and are recorded in the
figure's sidecar metadata.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import tableio
from .analysis import SweepSpec, loss_distance_convert, run_sweep
from .errors import DomainError
from .protocols import COHERENT, DR, RR, SQUEEZED, ChannelParams, ProtocolParams

#: numeric stand-in for arbitrarily strong modulation
V_M_LARGE = 1.0e6
#: numeric stand-in for arbitrarily strong squeezing
V_S_STRONG = 1.0e-4
#: post-processing efficiencies used for the realistic panels
BETA_RR = 0.95
BETA_DR = 0.99


def _coh(**kw):
    return ProtocolParams(state_family=COHERENT, v_s=1.0, **kw)


def _sq(v_s, **kw):
    return ProtocolParams(state_family=SQUEEZED, v_s=v_s, **kw)


def _steps(start, stop, step):
    grid = []
    x = start
    while x <= stop + 1e-9:
        grid.append(round(x, 9))
        x += step
    return tuple(grid)


@dataclass(frozen=True)
class Series:
    label: str
    protocol: ProtocolParams
    optimize_over: tuple = ()


@dataclass(frozen=True)
class Panel:
    filename: str
    kind: str                 # "keyrate" or "frontier"
    axis: str                 # swept parameter
    grid: tuple
    series: tuple
    channel: ChannelParams


def _noise_axis():
    return _steps(0.0, 3.0, 0.05)


def _fig3():
    dr = Panel(
        filename="fig3_dr_main.csv", kind="keyrate", axis="distance_km",
        grid=_steps(0.0, 14.0, 0.5),
        channel=ChannelParams(1.0, 0.0),
        series=(
            Series("coherent", _coh(v_m=10.0, beta=BETA_DR, direction=DR), ("v_m",)),
            Series("squeezed", _sq(0.1, v_m=10.0, beta=BETA_DR, direction=DR), ("v_m",)),
        ))
    rr = Panel(
        filename="fig3_rr_inset.csv", kind="keyrate", axis="distance_km",
        grid=_steps(0.0, 100.0, 5.0),
        channel=ChannelParams(1.0, 0.0),
        series=(
            Series("coherent", _coh(v_m=10.0, beta=BETA_RR, direction=RR), ("v_m",)),
            Series("squeezed", _sq(0.1, v_m=10.0, beta=BETA_RR, direction=RR), ("v_m",)),
        ))
    return (dr, rr)


def _fig4():
    ideal = Panel(
        filename="fig4_ideal.csv", kind="frontier", axis="loss_db",
        grid=_steps(0.25, 10.0, 0.25),
        channel=ChannelParams(0.5, 0.0),
        series=(
            Series("dr_coherent", _coh(v_m=V_M_LARGE, direction=DR)),
            Series("dr_squeezed", _sq(V_S_STRONG, v_m=V_M_LARGE, direction=DR)),
            Series("rr_coherent", _coh(v_m=V_M_LARGE, direction=RR)),
            Series("rr_squeezed", _sq(V_S_STRONG, v_m=V_M_LARGE, direction=RR)),
        ))
    realistic = Panel(
        filename="fig4_realistic.csv", kind="frontier", axis="loss_db",
        grid=_steps(0.5, 9.0, 0.5),
        channel=ChannelParams(0.5, 0.0),
        series=(
            Series("dr_coherent", _coh(v_m=10.0, beta=BETA_DR, direction=DR), ("v_m",)),
            Series("dr_squeezed", _sq(0.1, v_m=10.0, beta=BETA_DR, direction=DR), ("v_m",)),
            Series("rr_coherent", _coh(v_m=10.0, beta=BETA_RR, direction=RR), ("v_m",)),
            Series("rr_squeezed", _sq(0.1, v_m=10.0, beta=BETA_RR, direction=RR), ("v_m",)),
        ))
    return (ideal, realistic)


def _fig5():
    rr = Panel(
        filename="fig5_rr_preparation_noise.csv", kind="frontier", axis="loss_db",
        grid=_steps(0.5, 15.0, 0.5),
        channel=ChannelParams(0.5, 0.0),
        series=(
            Series("coherent_dv0", _coh(v_m=V_M_LARGE, direction=RR)),
            Series("coherent_dv0.5", _coh(v_m=V_M_LARGE, delta_v=0.5, direction=RR)),
            Series("squeezed_dv0", _sq(V_S_STRONG, v_m=V_M_LARGE, direction=RR)),
            Series("squeezed_dv0.5", _sq(V_S_STRONG, v_m=V_M_LARGE, delta_v=0.5, direction=RR)),
        ))
    dr = Panel(
        filename="fig5_dr_detection_noise.csv", kind="frontier", axis="loss_db",
        grid=_steps(0.1, 3.2, 0.1),
        channel=ChannelParams(0.5, 0.0),
        series=(
            Series("coherent_n0", _coh(v_m=V_M_LARGE, direction=DR)),
            Series("coherent_n0.5", _coh(v_m=V_M_LARGE, n_det=0.5, direction=DR)),
            Series("squeezed_n0", _sq(V_S_STRONG, v_m=V_M_LARGE, direction=DR)),
            Series("squeezed_n0.5", _sq(V_S_STRONG, v_m=V_M_LARGE, n_det=0.5, direction=DR)),
        ))
    return (rr, dr)


def _noise_curves(filename, axis, eta, eps_list, families, direction, fixed):
    series = []
    for eps in eps_list:
        for fam, v_s in families:
            label = f"eps{eps:g}_{fam}"
            if fam == COHERENT:
                proto = _coh(v_m=V_M_LARGE, direction=direction, **fixed)
            else:
                proto = _sq(v_s, v_m=V_M_LARGE, direction=direction, **fixed)
            series.append((eps, Series(label, proto)))
    return filename, axis, eta, series


def _keyrate_noise_panel(filename, axis, eta, entries):
    # entries: list of (eps, Series); eps lives on the channel
    return [Panel(filename=filename, kind="keyrate", axis=axis, grid=_noise_axis(),
                  channel=ChannelParams(eta, eps), series=(srs,))
            for eps, srs in entries]


def _fig6():
    panels = []
    _, axis, eta, entries = _noise_curves(
        "fig6_a.csv", "delta_v", 0.6, (0.2, 0.15, 0.1),
        ((COHERENT, 1.0), (SQUEEZED, 0.1)), DR, {})
    panels += _keyrate_noise_panel("fig6_a.csv", axis, eta, entries)
    _, axis, eta, entries = _noise_curves(
        "fig6_b.csv", "n", 0.1, (0.18, 0.15, 0.12), ((COHERENT, 1.0),), RR, {})
    panels += _keyrate_noise_panel("fig6_b.csv", axis, eta, entries)
    _, axis, eta, entries = _noise_curves(
        "fig6_c.csv", "n", 0.1, (0.4, 0.3, 0.2), ((SQUEEZED, 0.1),), RR, {})
    panels += _keyrate_noise_panel("fig6_c.csv", axis, eta, entries)
    return tuple(panels)


def _fig7():
    dr = Panel(
        filename="fig7_dr.csv", kind="frontier", axis="loss_db",
        grid=_steps(0.2, 3.0, 0.2),
        channel=ChannelParams(0.5, 0.0),
        series=(
            Series("coherent_dv0", _coh(v_m=V_M_LARGE, direction=DR)),
            Series("coherent_dvopt", _coh(v_m=V_M_LARGE, direction=DR), ("delta_v",)),
            Series("squeezed_dv0", _sq(0.1, v_m=V_M_LARGE, direction=DR)),
            Series("squeezed_dvopt", _sq(0.1, v_m=V_M_LARGE, direction=DR), ("delta_v",)),
        ))
    rr = Panel(
        filename="fig7_rr.csv", kind="frontier", axis="loss_db",
        grid=_steps(1.0, 15.0, 1.0),
        channel=ChannelParams(0.5, 0.0),
        series=(
            Series("coherent_n0", _coh(v_m=V_M_LARGE, direction=RR)),
            Series("coherent_nopt", _coh(v_m=V_M_LARGE, direction=RR), ("n",)),
            Series("squeezed_n0", _sq(0.1, v_m=V_M_LARGE, direction=RR)),
            Series("squeezed_nopt", _sq(0.1, v_m=V_M_LARGE, direction=RR), ("n",)),
        ))
    return (dr, rr)


def _fig8():
    panels = []
    _, axis, eta, entries = _noise_curves(
        "fig8_a.csv", "delta_v", 0.6, (0.15, 0.1),
        ((COHERENT, 1.0), (SQUEEZED, 0.1)), DR, {"n_det": 0.08})
    panels += _keyrate_noise_panel("fig8_a.csv", axis, eta, entries)
    _, axis, eta, entries = _noise_curves(
        "fig8_b.csv", "n", 0.1, (0.12, 0.06), ((COHERENT, 1.0),), RR, {"delta_v": 0.1})
    panels += _keyrate_noise_panel("fig8_b.csv", axis, eta, entries)
    _, axis, eta, entries = _noise_curves(
        "fig8_c.csv", "n", 0.1, (0.25, 0.1), ((SQUEEZED, 0.1),), RR, {"delta_v": 0.1})
    panels += _keyrate_noise_panel("fig8_c.csv", axis, eta, entries)
    return tuple(panels)


FIGURES = {
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig7": _fig7,
    "fig8": _fig8,
}


def figure_rows(figure: str):
    """Evaluate one figure; returns {filename: (kind, rows)} plus settings.

    Key-rate rows follow the keyrate CSV schema (the scenario_id carries the
    series label), frontier rows the frontier schema.
    """
    if figure not in FIGURES:
        raise DomainError(f"unknown figure {figure!r}; choose from {sorted(FIGURES)}")
    files: dict = {}
    meta: dict = {}
    for panel in FIGURES[figure]():
        kind, rows = files.setdefault(panel.filename, (panel.kind, []))
        pmeta = meta.setdefault(panel.filename, {"kind": panel.kind, "series": []})
        for srs in panel.series:
            spec = SweepSpec(protocol=srs.protocol, channel=panel.channel,
                             axes=((panel.axis, panel.grid),),
                             objective="keyrate" if panel.kind == "keyrate" else "frontier",
                             optimize_over=srs.optimize_over)
            for out in run_sweep(spec):
                if out["error"] is not None:
                    raise RuntimeError(
                        f"{panel.filename} series {srs.label}: {out['error']}")
                if panel.kind == "keyrate":
                    c = out["channel"]
                    rows.append(tableio.keyrate_row(
                        srs.label, out["protocol"], c, out["report"],
                        loss_distance_convert(c.eta, "eta", "db"),
                        loss_distance_convert(c.eta, "eta", "km")))
                else:
                    rows.append(tableio.frontier_row(out["frontier"]))
            pmeta["series"].append({
                "label": srs.label, "axis": panel.axis,
                "grid": [panel.grid[0], panel.grid[-1], len(panel.grid)],
                "state": srs.protocol.state_family,
                "direction": srs.protocol.direction,
                "eps": panel.channel.eps,
                "optimize_over": list(srs.optimize_over),
            })
    return files, meta
