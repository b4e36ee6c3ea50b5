/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_runsummary_free: (a: number, b: number) => void;
export const flyover_map: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const run_preset: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const runsummary_altitude_error_cm: (a: number) => number;
export const runsummary_energy_kj: (a: number) => number;
export const runsummary_speed_error_cms: (a: number) => number;
export const runsummary_svg: (a: number) => [number, number];
export const velocity_bounds: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
