/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_clear: (a: number) => [number, number];
export const demo_coordinates: (a: number) => [number, number];
export const demo_cutAuto: (a: number) => [number, number];
export const demo_cutTopk: (a: number, b: number) => [number, number, number, number];
export const demo_fromCsv: (a: number, b: number, c: number) => [number, number, number];
export const demo_graph: (a: number) => [number, number];
export const demo_n: (a: number) => number;
export const demo_new: (a: number, b: number) => [number, number, number];
export const demo_nmi: (a: number) => number;
export const demo_partition: (a: number) => [number, number];
export const demo_rounds: (a: number) => [number, number];
export const demo_toggle: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
