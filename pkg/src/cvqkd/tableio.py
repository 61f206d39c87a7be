"""CSV/JSON row serialization shared by the CLI commands.

Column sets and their order are fixed so every command emits the same schema
for the same row type; numbers are printed with a configurable number of
significant digits (default 9), which round-trips losslessly at that
precision.
"""

from __future__ import annotations

import csv
import json

KEYRATE_COLUMNS = (
    "scenario_id", "direction", "state", "V_S", "V_M", "dV", "N", "beta",
    "eta", "loss_dB", "distance_km", "eps", "method",
    "I_AB_bits", "chi_bits", "K_bits", "converged", "warnings",
)

FRONTIER_COLUMNS = (
    "eta", "loss_dB", "distance_km", "eps_max",
    "V_M_opt", "dV_opt", "N_opt", "direction", "state",
)

DEFAULT_PRECISION = 9


def format_value(value, precision=DEFAULT_PRECISION):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{precision}g}"
    return str(value)


def keyrate_row(scenario_id, p, c, report, loss_db, distance_km):
    warnings = []
    if report.diagnostics.get("clamp_warnings"):
        warnings.append(f"clamped={report.diagnostics['clamp_warnings']}")
    return {
        "scenario_id": scenario_id,
        "direction": p.direction,
        "state": p.state_family,
        "V_S": p.v_s,
        "V_M": p.v_m,
        "dV": p.delta_v,
        "N": p.n_det,
        "beta": p.beta,
        "eta": c.eta,
        "loss_dB": loss_db,
        "distance_km": distance_km,
        "eps": c.eps,
        "method": report.method,
        "I_AB_bits": report.i_ab,
        "chi_bits": report.chi,
        "K_bits": report.k,
        "converged": report.diagnostics.get("converged", True),
        "warnings": ";".join(warnings),
    }


def frontier_row(point):
    return {
        "eta": point.eta,
        "loss_dB": point.loss_db,
        "distance_km": point.distance_km,
        "eps_max": point.eps_max,
        "V_M_opt": point.v_m_opt,
        "dV_opt": point.delta_v_opt,
        "N_opt": point.n_opt,
        "direction": point.direction,
        "state": point.state_family,
    }


def write_csv(fp, rows, columns, precision=DEFAULT_PRECISION):
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c], precision) for c in columns])


def write_json(fp, rows, precision=DEFAULT_PRECISION):
    payload = [{k: format_value(v, precision) if isinstance(v, float) else v
                for k, v in row.items()} for row in rows]
    json.dump(payload, fp, indent=2)
    fp.write("\n")
