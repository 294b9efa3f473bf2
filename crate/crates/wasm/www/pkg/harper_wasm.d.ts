/* tslint:disable */
/* eslint-disable */

export class Butterfly {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Flux p/q of each column, ascending.
     */
    fluxes(): Float64Array;
    height(): number;
    /**
     * Row-major RGBA, top row highest energy.
     */
    rgba(): Uint8Array;
    width(): number;
}

export function butterfly(q_max: number, bins: number): Butterfly;

/**
 * Elliptic density at one energy; `Infinity` at the band centre.
 */
export function dos_at(lambda: number, a: number, b: number): number;

export function dos_counting_curve(a: number, b: number, alpha: number, beta: number, n: number, bins: number): Float64Array;

export function dos_elliptic_curve(a: number, b: number, steps: number): Float64Array;

export function flux_bands(p: number, q: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_butterfly_free: (a: number, b: number) => void;
    readonly butterfly: (a: number, b: number) => [number, number, number];
    readonly butterfly_fluxes: (a: number) => [number, number];
    readonly butterfly_height: (a: number) => number;
    readonly butterfly_rgba: (a: number) => [number, number];
    readonly butterfly_width: (a: number) => number;
    readonly dos_at: (a: number, b: number, c: number) => [number, number, number];
    readonly dos_counting_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly dos_elliptic_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly flux_bands: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
