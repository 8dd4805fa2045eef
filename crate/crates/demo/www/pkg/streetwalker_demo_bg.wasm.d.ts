/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_runview_free: (a: number, b: number) => void;
export const corridor_run: (a: number, b: number, c: bigint) => [number, number, number];
export const funnel_run: (a: number, b: number, c: bigint) => [number, number, number];
export const ratio_curve_svg: (a: number, b: number, c: number) => [number, number, number, number];
export const runview_funnels: (a: number) => number;
export const runview_geo_len: (a: number) => number;
export const runview_path_len: (a: number) => number;
export const runview_ratio: (a: number) => number;
export const runview_svg: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
