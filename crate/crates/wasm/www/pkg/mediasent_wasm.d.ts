/* tslint:disable */
/* eslint-disable */

/**
 * Simulated monthly index with its centered moving average. The moving
 * average is padded with NaN where the window lacks support.
 */
export class IndexDemo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly emsi: Float64Array;
    readonly smoothed: Float64Array;
}

/**
 * Naive Bayes model trained from lines of the form `label: text`.
 */
export class ToyClassifier {
    free(): void;
    [Symbol.dispose](): void;
    classes(): string[];
    /**
     * Predicted class name.
     */
    classify(text: string): string;
    constructor(examples: string);
    /**
     * Posterior probabilities in the order of `classes()`.
     */
    posteriors(text: string): Float64Array;
    vocabulary_size(): number;
}

/**
 * A random walk with a slow cycle on top, for the HP explorer.
 */
export function demo_series(n: number, seed: bigint): Float64Array;

/**
 * Trend component of `values` under smoothing parameter `lambda`.
 */
export function hp_trend(values: Float64Array, lambda: number): Float64Array;

/**
 * Each day carries `items_per_day` items. An item is irrelevant with
 * probability `irrelevant`; otherwise it is positive with a probability that
 * swings by `swing` around one half over a three-year cycle.
 */
export function simulate_index(months: number, items_per_day: number, swing: number, irrelevant: number, ma_window: number, seed: bigint): IndexDemo;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_indexdemo_free: (a: number, b: number) => void;
    readonly __wbg_toyclassifier_free: (a: number, b: number) => void;
    readonly demo_series: (a: number, b: bigint) => [number, number];
    readonly hp_trend: (a: number, b: number, c: number) => [number, number, number, number];
    readonly indexdemo_emsi: (a: number) => [number, number];
    readonly indexdemo_smoothed: (a: number) => [number, number];
    readonly simulate_index: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number];
    readonly toyclassifier_classes: (a: number) => [number, number];
    readonly toyclassifier_classify: (a: number, b: number, c: number) => [number, number];
    readonly toyclassifier_new: (a: number, b: number) => [number, number, number];
    readonly toyclassifier_posteriors: (a: number, b: number, c: number) => [number, number];
    readonly toyclassifier_vocabulary_size: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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
