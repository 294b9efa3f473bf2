/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_butterfly_free: (a: number, b: number) => void;
export const butterfly: (a: number, b: number) => [number, number, number];
export const butterfly_fluxes: (a: number) => [number, number];
export const butterfly_height: (a: number) => number;
export const butterfly_rgba: (a: number) => [number, number];
export const butterfly_width: (a: number) => number;
export const dos_at: (a: number, b: number, c: number) => [number, number, number];
export const dos_counting_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const dos_elliptic_curve: (a: number, b: number, c: number) => [number, number, number, number];
export const flux_bands: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
