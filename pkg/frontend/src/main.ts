/**
 * Standalone entry point:
 *   node dist/main.js <csv-dir> <out-dir> [--figure figN]
 */

import { render } from './render.js';

function main(argv: string[]): number {
    const positional: string[] = [];
    let figure: string | undefined;
    for (let i = 0; i < argv.length; i++) {
        if (argv[i] === '--figure') {
            figure = argv[++i];
        } else if (argv[i].startsWith('--')) {
            console.error(`unknown flag ${argv[i]}`);
            return 2;
        } else {
            positional.push(argv[i]);
        }
    }
    if (positional.length !== 2) {
        console.error('usage: main.js <csv-dir> <out-dir> [--figure figN]');
        return 2;
    }
    try {
        const results = render(positional[0], positional[1], figure);
        for (const r of results) {
            console.error(`${r.figure}: ${r.csv} -> ${r.svg}`);
        }
        return 0;
    } catch (err) {
        console.error(`error: ${err instanceof Error ? err.message : err}`);
        return 1;
    }
}

process.exit(main(process.argv.slice(2)));
