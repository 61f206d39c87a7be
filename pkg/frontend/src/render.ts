/** Orchestration: read each panel's CSV, validate series, write one SVG. */

import { existsSync, mkdirSync, writeFileSync } from 'fs';
import { join } from 'path';
import { readTable } from './csv.js';
import { FIGURES, PANELS } from './panels.js';
import { splitSeries, validateSeries } from './series.js';
import { renderPanelSvg } from './svg.js';

export interface RenderResult {
    figure: string;
    csv: string;
    svg: string;
}

export function render(csvDir: string, outDir: string, figureFilter?: string): RenderResult[] {
    if (figureFilter && !FIGURES.includes(figureFilter)) {
        throw new Error(`unknown figure ${JSON.stringify(figureFilter)}; known: ${FIGURES.join(', ')}`);
    }
    const panels = PANELS.filter((p) => !figureFilter || p.figure === figureFilter);
    mkdirSync(outDir, { recursive: true });
    const results: RenderResult[] = [];
    for (const spec of panels) {
        const csvPath = join(csvDir, spec.file);
        if (!existsSync(csvPath)) {
            throw new Error(`missing dataset ${csvPath}`);
        }
        const rows = readTable(csvPath, spec.kind);
        const series = splitSeries(rows, spec, csvPath);
        validateSeries(series, spec, csvPath);
        const svg = renderPanelSvg(spec, series);
        const svgName = spec.file.replace(/\.csv$/, '.svg');
        writeFileSync(join(outDir, svgName), svg);
        results.push({ figure: spec.figure, csv: spec.file, svg: svgName });
    }
    return results;
}
