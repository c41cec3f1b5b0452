/* tslint:disable */
/* eslint-disable */

/**
 * `[formula, optimal lower, optimal upper]` for the symmetric order-2
 * spline with parameter `lambda` at `alpha = 1`, `beta = k / den`.
 */
export function frame_bounds(lambda: number, k: number, den: number): Float64Array;

/**
 * `[x_0, B(x_0), x_1, B(x_1), ...]` on `samples` uniform points of `[0, m]`.
 */
export function spline_samples(rates: Float64Array, samples: number): Float64Array;

/**
 * Row-major `|Z_alpha B(x_i, w_j)|` on an `n x n` grid of
 * `[0, alpha) x [0, 1/alpha)`, followed by the located zero `(x, w)`.
 */
export function zak_modulus(rates: Float64Array, alpha: number, n: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly frame_bounds: (a: number, b: number, c: number) => [number, number, number, number];
    readonly spline_samples: (a: number, b: number, c: number) => [number, number, number, number];
    readonly zak_modulus: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
