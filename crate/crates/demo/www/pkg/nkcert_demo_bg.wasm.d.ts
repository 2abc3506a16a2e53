/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const fan_svg: (a: number, b: number, c: number) => [number, number];
export const locate_point: (a: number, b: number, c: number, d: number) => [number, number];
export const salem_quartics: (a: number, b: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
