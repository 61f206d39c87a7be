/**
 * Shared types for the figure renderer.
 *
 * The CSV contract comes from the key-rate tool: key-rate tables carry one
 * row per axis point with the series identified by scenario_id/state, and
 * frontier tables carry eps_max rows per loss point.  Series follow one
 * another within a file, each with its axis column ascending, so a reader
 * splits series wherever the axis value resets.
 */

export interface SeriesExpectation {
    /** scenario_id for key-rate rows; synthesized label for frontier rows */
    label: string;
    state: 'coherent' | 'squeezed';
}

export interface PanelSpec {
    /** CSV filename the panel is read from (one panel per CSV) */
    file: string;
    figure: string;
    kind: 'keyrate' | 'frontier';
    xColumn: string;
    yColumn: string;
    xLabel: string;
    yLabel: string;
    yScale: 'linear' | 'log';
    series: SeriesExpectation[];
}

export interface Series {
    label: string;
    state: 'coherent' | 'squeezed';
    x: number[];
    y: number[];
}

export const KEYRATE_COLUMNS = [
    'scenario_id', 'direction', 'state', 'V_S', 'V_M', 'dV', 'N', 'beta',
    'eta', 'loss_dB', 'distance_km', 'eps', 'method',
    'I_AB_bits', 'chi_bits', 'K_bits', 'converged', 'warnings',
];

export const FRONTIER_COLUMNS = [
    'eta', 'loss_dB', 'distance_km', 'eps_max',
    'V_M_opt', 'dV_opt', 'N_opt', 'direction', 'state',
];
