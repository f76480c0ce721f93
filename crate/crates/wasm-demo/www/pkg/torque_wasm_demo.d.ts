/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    clear(): string;
    /**
     * x0, y0, x1, y1, ... for the scatter plot.
     */
    coordinates(): Float64Array;
    cutAuto(): string;
    cutTopk(k: number): string;
    /**
     * Clusters pasted CSV rows. A negative `label_col` means no labels.
     */
    static fromCsv(text: string, label_col: number): Demo;
    /**
     * Connection records as a JSON array, same fields as the graph file.
     */
    graph(): string;
    /**
     * Generates `groups` blobs from `seed` and clusters them.
     */
    constructor(groups: number, seed: number);
    /**
     * NMI against the generating labels, or NaN when there are none.
     */
    nmi(): number;
    /**
     * Current partition as JSON: k, sizes, removed, labels, warnings.
     */
    partition(): string;
    toggle(id: number): string;
    readonly n: number;
    readonly rounds: Uint32Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_clear: (a: number) => [number, number];
    readonly demo_coordinates: (a: number) => [number, number];
    readonly demo_cutAuto: (a: number) => [number, number];
    readonly demo_cutTopk: (a: number, b: number) => [number, number, number, number];
    readonly demo_fromCsv: (a: number, b: number, c: number) => [number, number, number];
    readonly demo_graph: (a: number) => [number, number];
    readonly demo_n: (a: number) => number;
    readonly demo_new: (a: number, b: number) => [number, number, number];
    readonly demo_nmi: (a: number) => number;
    readonly demo_partition: (a: number) => [number, number];
    readonly demo_rounds: (a: number) => [number, number];
    readonly demo_toggle: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
