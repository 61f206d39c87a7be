/**
 * Minimal deterministic SVG line plot.
 *
 * No numeric post-processing happens here beyond affine mapping to pixels:
 * the polylines carry exactly the CSV values (points with non-positive y are
 * dropped on log panels, as on any log axis).  Output bytes depend only on
 * the input series and spec, so identical inputs give identical files.
 */

import { PanelSpec, Series } from './types.js';

const WIDTH = 640;
const HEIGHT = 440;
const MARGIN = { left: 70, right: 16, top: 34, bottom: 48 };

/** Solid lines for the coherent-state protocol, dashed for squeezed. */
const DASH_BY_STATE = { coherent: null as string | null, squeezed: '7 4' };

const PALETTE = ['#1f5fa8', '#c23b22', '#2e8b57', '#8a2be2', '#b8860b', '#008b8b'];

function fmt(value: number): string {
    if (value === 0) return '0';
    const abs = Math.abs(value);
    if (abs >= 0.01 && abs < 10000) {
        return String(Number(value.toPrecision(6)));
    }
    return value.toExponential(2);
}

function ticks(lo: number, hi: number, count: number): number[] {
    if (!(hi > lo)) return [lo];
    const out: number[] = [];
    for (let i = 0; i <= count; i++) out.push(lo + ((hi - lo) * i) / count);
    return out;
}

function logTicks(lo: number, hi: number): number[] {
    const out: number[] = [];
    for (let d = Math.floor(Math.log10(lo)); d <= Math.ceil(Math.log10(hi)); d++) {
        const v = 10 ** d;
        if (v >= lo / 1.0001 && v <= hi * 1.0001) out.push(v);
    }
    return out.length >= 2 ? out : [lo, hi];
}

export function renderPanelSvg(spec: PanelSpec, series: Series[]): string {
    const logY = spec.yScale === 'log';
    const plotted = series.map((s) => ({
        ...s,
        points: s.x
            .map((x, i) => ({ x, y: s.y[i] }))
            .filter((p) => (logY ? p.y > 0 : Number.isFinite(p.y))),
    }));
    const xs = plotted.flatMap((s) => s.points.map((p) => p.x));
    const ys = plotted.flatMap((s) => s.points.map((p) => p.y));
    if (xs.length === 0) {
        throw new Error(`${spec.file}: nothing to plot (all points off-scale)`);
    }
    const xLo = Math.min(...xs);
    const xHi = Math.max(...xs);
    let yLo = Math.min(...ys);
    let yHi = Math.max(...ys);
    if (!logY) {
        const pad = (yHi - yLo || Math.abs(yHi) || 1) * 0.05;
        yLo -= pad;
        yHi += pad;
    }

    const innerW = WIDTH - MARGIN.left - MARGIN.right;
    const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;
    const sx = (x: number) =>
        MARGIN.left + (xHi === xLo ? 0.5 : (x - xLo) / (xHi - xLo)) * innerW;
    const sy = (y: number) => {
        const t = logY
            ? (Math.log10(y) - Math.log10(yLo)) / (Math.log10(yHi) - Math.log10(yLo))
            : (y - yLo) / (yHi - yLo);
        return MARGIN.top + (1 - t) * innerH;
    };

    const parts: string[] = [];
    parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`);
    parts.push(`<title>${spec.figure}: ${spec.file.replace('.csv', '')}</title>`);
    parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

    const axisStyle = 'stroke="#222" stroke-width="1"';
    const x0 = MARGIN.left;
    const y0 = HEIGHT - MARGIN.bottom;
    parts.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" ${axisStyle}/>`);
    parts.push(`<line x1="${x0}" y1="${y0}" x2="${WIDTH - MARGIN.right}" y2="${y0}" ${axisStyle}/>`);

    for (const t of ticks(xLo, xHi, 6)) {
        const px = sx(t);
        parts.push(`<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y0 + 5}" ${axisStyle}/>`);
        parts.push(`<text x="${px.toFixed(2)}" y="${y0 + 18}" font-size="11" text-anchor="middle" fill="#222">${fmt(t)}</text>`);
    }
    for (const t of logY ? logTicks(yLo, yHi) : ticks(yLo, yHi, 6)) {
        const py = sy(t);
        parts.push(`<line x1="${x0 - 5}" y1="${py.toFixed(2)}" x2="${x0}" y2="${py.toFixed(2)}" ${axisStyle}/>`);
        parts.push(`<text x="${x0 - 8}" y="${(py + 4).toFixed(2)}" font-size="11" text-anchor="end" fill="#222">${fmt(t)}</text>`);
    }
    parts.push(`<text x="${(x0 + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 10}" font-size="13" text-anchor="middle" fill="#222">${spec.xLabel}</text>`);
    parts.push(`<text x="16" y="${(MARGIN.top + y0) / 2}" font-size="13" text-anchor="middle" fill="#222" transform="rotate(-90 16 ${(MARGIN.top + y0) / 2})">${spec.yLabel}</text>`);

    plotted.forEach((s, i) => {
        const color = PALETTE[i % PALETTE.length];
        const dash = DASH_BY_STATE[s.state];
        const pts = s.points
            .map((p) => `${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`)
            .join(' ');
        const dashAttr = dash ? ` stroke-dasharray="${dash}"` : '';
        parts.push(`<polyline fill="none" stroke="${color}" stroke-width="1.6"${dashAttr} data-label="${s.label || s.state}" data-points="${s.points.length}" points="${pts}"/>`);
    });

    // legend, one entry per series in data order
    plotted.forEach((s, i) => {
        const color = PALETTE[i % PALETTE.length];
        const dash = DASH_BY_STATE[s.state];
        const ly = MARGIN.top + 4 + i * 15;
        const dashAttr = dash ? ` stroke-dasharray="${dash}"` : '';
        parts.push(`<line x1="${WIDTH - 190}" y1="${ly}" x2="${WIDTH - 160}" y2="${ly}" stroke="${color}" stroke-width="1.6"${dashAttr}/>`);
        parts.push(`<text x="${WIDTH - 154}" y="${ly + 4}" font-size="11" fill="#222">${s.label || s.state}</text>`);
    });

    parts.push('</svg>');
    return parts.join('\n') + '\n';
}
