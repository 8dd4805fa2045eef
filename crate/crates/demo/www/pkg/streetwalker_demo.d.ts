/* tslint:disable */
/* eslint-disable */

/**
 * One rendered run.
 */
export class RunView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly funnels: number;
    readonly geo_len: number;
    readonly path_len: number;
    readonly ratio: number;
    readonly svg: string;
}

export function corridor_run(offset: number, randomized: boolean, seed: bigint): RunView;

export function funnel_run(angle_deg: number, randomized: boolean, seed: bigint): RunView;

export function ratio_curve_svg(max_offset: number, points: number, trials: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_runview_free: (a: number, b: number) => void;
    readonly corridor_run: (a: number, b: number, c: bigint) => [number, number, number];
    readonly funnel_run: (a: number, b: number, c: bigint) => [number, number, number];
    readonly ratio_curve_svg: (a: number, b: number, c: number) => [number, number, number, number];
    readonly runview_funnels: (a: number) => number;
    readonly runview_geo_len: (a: number) => number;
    readonly runview_path_len: (a: number) => number;
    readonly runview_ratio: (a: number) => number;
    readonly runview_svg: (a: number) => [number, number];
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
