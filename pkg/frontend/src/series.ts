/** Series extraction and validation against a panel's expectations. */

import { numeric, Row } from './csv.js';
import { PanelSpec, Series } from './types.js';

/** Split rows into series wherever the axis value resets (stops increasing). */
export function splitSeries(rows: Row[], spec: PanelSpec, path: string): Series[] {
    const series: Series[] = [];
    let current: Series | null = null;
    let lastX = Number.NEGATIVE_INFINITY;
    for (const row of rows) {
        const x = numeric(row, spec.xColumn, path);
        const y = numeric(row, spec.yColumn, path);
        if (current === null || x <= lastX) {
            current = {
                label: row.scenario_id ?? '',
                state: row.state as Series['state'],
                x: [],
                y: [],
            };
            series.push(current);
        }
        current.x.push(x);
        current.y.push(y);
        lastX = x;
    }
    return series;
}

/** Hard error listing every mismatch between found and expected series. */
export function validateSeries(found: Series[], spec: PanelSpec, path: string): void {
    const problems: string[] = [];
    const describe = (s: { label: string; state: string }) =>
        spec.kind === 'keyrate' ? `${s.label} (${s.state})` : s.state;
    if (found.length !== spec.series.length) {
        problems.push(`expected ${spec.series.length} series, found ${found.length}`);
    }
    const n = Math.min(found.length, spec.series.length);
    for (let i = 0; i < n; i++) {
        const want = spec.series[i];
        const got = found[i];
        if (got.state !== want.state ||
            (spec.kind === 'keyrate' && got.label !== want.label)) {
            problems.push(`series ${i}: expected ${describe(want)}, found ${describe(got)}`);
        }
    }
    for (let i = n; i < spec.series.length; i++) {
        problems.push(`missing series: ${describe(spec.series[i])}`);
    }
    for (let i = n; i < found.length; i++) {
        problems.push(`extra series: ${describe(found[i])}`);
    }
    if (problems.length > 0) {
        throw new Error(`${path}: series mismatch: ${problems.join('; ')}`);
    }
    for (const s of found) {
        if (s.state !== 'coherent' && s.state !== 'squeezed') {
            throw new Error(`${path}: unknown state ${JSON.stringify(s.state)}`);
        }
    }
}
