/* tslint:disable */
/* eslint-disable */

/**
 * Symbolic derivative of `expr` in `var`, and its value at `at` (a JSON
 * object) when every remaining symbol is bound, alongside a central
 * difference of the original expression for comparison.
 */
export function differentiate(expr: string, _var: string, at: string): string;

/**
 * Quadrature and closed form of family `id` at the JSON parameter object.
 */
export function evaluate(id: string, params: string): string;

/**
 * All builtin families, for the page's picker.
 */
export function families(): string;

/**
 * Closed-form check of family `id` over its default grid.
 */
export function verify_closed_form(id: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly differentiate: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly evaluate: (a: number, b: number, c: number, d: number) => [number, number];
    readonly families: () => [number, number];
    readonly verify_closed_form: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
