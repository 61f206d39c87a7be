/** Strict CSV loading for the two row schemas emitted by the key-rate tool. */

import { readFileSync } from 'fs';
import Papa from 'papaparse';
import { FRONTIER_COLUMNS, KEYRATE_COLUMNS } from './types.js';

export type Row = Record<string, string>;

export function readTable(path: string, kind: 'keyrate' | 'frontier'): Row[] {
    const text = readFileSync(path, 'utf8');
    const parsed = Papa.parse<Row>(text.trim(), { header: true, skipEmptyLines: true });
    if (parsed.errors.length > 0) {
        const first = parsed.errors[0];
        throw new Error(`${path}: CSV parse error at row ${first.row}: ${first.message}`);
    }
    const expected = kind === 'keyrate' ? KEYRATE_COLUMNS : FRONTIER_COLUMNS;
    const got = parsed.meta.fields ?? [];
    if (got.length !== expected.length || expected.some((c, i) => got[i] !== c)) {
        throw new Error(
            `${path}: unexpected header [${got.join(', ')}], want [${expected.join(', ')}]`);
    }
    if (parsed.data.length === 0) {
        throw new Error(`${path}: no data rows; refusing to render an empty panel`);
    }
    return parsed.data;
}

export function numeric(row: Row, column: string, path: string): number {
    const value = Number(row[column]);
    if (!Number.isFinite(value)) {
        throw new Error(`${path}: non-numeric ${column} value ${JSON.stringify(row[column])}`);
    }
    return value;
}
