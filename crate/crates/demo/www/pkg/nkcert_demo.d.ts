/* tslint:disable */
/* eslint-disable */

/**
 * Fan orbit and fundamental domain of the quartic `(q1, q2)` as SVG. On
 * failure returns an SVG with the message.
 */
export function fan_svg(q1: number, q2: number, window: number): string;

/**
 * Which part of the fundamental domain `(x, y)` lies in, with the
 * witness word, plus the word bringing `x` into the strip `B`.
 */
export function locate_point(q1: number, q2: number, x: number, y: number): string;

/**
 * Salem quartics with `q1` in the range, as a JSON array.
 */
export function salem_quartics(q1_min: number, q1_max: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly fan_svg: (a: number, b: number, c: number) => [number, number];
    readonly locate_point: (a: number, b: number, c: number, d: number) => [number, number];
    readonly salem_quartics: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
