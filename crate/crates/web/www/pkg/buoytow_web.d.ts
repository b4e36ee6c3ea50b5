/* tslint:disable */
/* eslint-disable */

export class RunSummary {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly altitude_error_cm: number;
    readonly energy_kj: number;
    readonly speed_error_cms: number;
    readonly svg: string;
}

/**
 * Heave amplification over a speed grid for a preset's waves, flattened as
 * `[v, Δh_amp, h_im, flyover]` per grid point.
 */
export function flyover_map(preset: string, alpha_deg: number, v_max: number): Float64Array;

/**
 * Runs a preset with `"svcs"` or `"cbnc"` and returns its metrics and
 * trace plot.
 */
export function run_preset(preset: string, controller: string, seed: bigint): RunSummary;

/**
 * Admissible steady speeds `[rear_lo, rear_hi, front_lo, front_hi]` in m/s
 * for a cable elevation in degrees and a surface current in m/s.
 */
export function velocity_bounds(alpha_deg: number, current_mps: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_runsummary_free: (a: number, b: number) => void;
    readonly flyover_map: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly run_preset: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly runsummary_altitude_error_cm: (a: number) => number;
    readonly runsummary_energy_kj: (a: number) => number;
    readonly runsummary_speed_error_cms: (a: number) => number;
    readonly runsummary_svg: (a: number) => [number, number];
    readonly velocity_bounds: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
