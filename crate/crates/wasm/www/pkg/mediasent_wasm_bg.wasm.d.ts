/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_indexdemo_free: (a: number, b: number) => void;
export const __wbg_toyclassifier_free: (a: number, b: number) => void;
export const demo_series: (a: number, b: bigint) => [number, number];
export const hp_trend: (a: number, b: number, c: number) => [number, number, number, number];
export const indexdemo_emsi: (a: number) => [number, number];
export const indexdemo_smoothed: (a: number) => [number, number];
export const simulate_index: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number];
export const toyclassifier_classes: (a: number) => [number, number];
export const toyclassifier_classify: (a: number, b: number, c: number) => [number, number];
export const toyclassifier_new: (a: number, b: number) => [number, number, number];
export const toyclassifier_posteriors: (a: number, b: number, c: number) => [number, number];
export const toyclassifier_vocabulary_size: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
