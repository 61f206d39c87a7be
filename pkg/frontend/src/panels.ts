/**
 * Panel catalog: one entry per CSV emitted by `cvqkd reproduce`, with axis
 * labels/scales and the expected series in emission order.  Solid lines are
 * the coherent-state protocol, dashed the squeezed-state one.
 */

import { PanelSpec, SeriesExpectation } from './types.js';

const coh = (label: string): SeriesExpectation => ({ label, state: 'coherent' });
const sq = (label: string): SeriesExpectation => ({ label, state: 'squeezed' });

function keyratePanel(figure: string, file: string, xColumn: string, xLabel: string,
                      yScale: 'linear' | 'log', series: SeriesExpectation[]): PanelSpec {
    return {
        figure, file, kind: 'keyrate', xColumn, xLabel,
        yColumn: 'K_bits', yLabel: 'key rate (bits/use)', yScale, series,
    };
}

function frontierPanel(figure: string, file: string,
                       series: SeriesExpectation[]): PanelSpec {
    return {
        figure, file, kind: 'frontier',
        xColumn: 'loss_dB', xLabel: 'channel loss (dB)',
        yColumn: 'eps_max', yLabel: 'max tolerable excess noise (SNU)',
        yScale: 'linear', series,
    };
}

function noiseCurves(epsValues: number[],
                     states: Array<'coherent' | 'squeezed'>): SeriesExpectation[] {
    const out: SeriesExpectation[] = [];
    for (const eps of epsValues) {
        for (const state of states) {
            out.push({ label: `eps${eps}_${state}`, state });
        }
    }
    return out;
}

export const PANELS: PanelSpec[] = [
    keyratePanel('fig3', 'fig3_dr_main.csv', 'distance_km', 'distance (km)', 'log',
                 [coh('coherent'), sq('squeezed')]),
    keyratePanel('fig3', 'fig3_rr_inset.csv', 'distance_km', 'distance (km)', 'log',
                 [coh('coherent'), sq('squeezed')]),
    frontierPanel('fig4', 'fig4_ideal.csv',
                  [coh('dr_coherent'), sq('dr_squeezed'),
                   coh('rr_coherent'), sq('rr_squeezed')]),
    frontierPanel('fig4', 'fig4_realistic.csv',
                  [coh('dr_coherent'), sq('dr_squeezed'),
                   coh('rr_coherent'), sq('rr_squeezed')]),
    frontierPanel('fig5', 'fig5_rr_preparation_noise.csv',
                  [coh('coherent_dv0'), coh('coherent_dv0.5'),
                   sq('squeezed_dv0'), sq('squeezed_dv0.5')]),
    frontierPanel('fig5', 'fig5_dr_detection_noise.csv',
                  [coh('coherent_n0'), coh('coherent_n0.5'),
                   sq('squeezed_n0'), sq('squeezed_n0.5')]),
    keyratePanel('fig6', 'fig6_a.csv', 'dV', 'preparation noise (SNU)', 'linear',
                 noiseCurves([0.2, 0.15, 0.1], ['coherent', 'squeezed'])),
    keyratePanel('fig6', 'fig6_b.csv', 'N', 'detection noise (SNU)', 'linear',
                 noiseCurves([0.18, 0.15, 0.12], ['coherent'])),
    keyratePanel('fig6', 'fig6_c.csv', 'N', 'detection noise (SNU)', 'linear',
                 noiseCurves([0.4, 0.3, 0.2], ['squeezed'])),
    frontierPanel('fig7', 'fig7_dr.csv',
                  [coh('coherent_dv0'), coh('coherent_dvopt'),
                   sq('squeezed_dv0'), sq('squeezed_dvopt')]),
    frontierPanel('fig7', 'fig7_rr.csv',
                  [coh('coherent_n0'), coh('coherent_nopt'),
                   sq('squeezed_n0'), sq('squeezed_nopt')]),
    keyratePanel('fig8', 'fig8_a.csv', 'dV', 'preparation noise (SNU)', 'linear',
                 noiseCurves([0.15, 0.1], ['coherent', 'squeezed'])),
    keyratePanel('fig8', 'fig8_b.csv', 'N', 'detection noise (SNU)', 'linear',
                 noiseCurves([0.12, 0.06], ['coherent'])),
    keyratePanel('fig8', 'fig8_c.csv', 'N', 'detection noise (SNU)', 'linear',
                 noiseCurves([0.25, 0.1], ['squeezed'])),
];

export const FIGURES = [...new Set(PANELS.map((p) => p.figure))];
