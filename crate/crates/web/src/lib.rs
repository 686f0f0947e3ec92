//! Browser bindings for three small operations: the weight table of a code,
//! the rank and residue profile of one quadratic form, and one codeword with
//! its weight counted directly and through the character sum.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn weight_table(p: u32, m: u32, k: u32) -> Result<String, JsError> {
    js(demo::weight_table(p, m, k))
}

/// Field elements are given as discrete logs of the primitive element, or -1
/// for zero.
#[wasm_bindgen]
pub fn form_profile(p: u32, m: u32, k: u32, u: i64, v: i64, w: i64) -> Result<String, JsError> {
    js(demo::form_profile(p, m, k, [u, v, w]))
}

#[wasm_bindgen]
pub fn codeword(p: u32, m: u32, k: u32, seed: u64) -> Result<String, JsError> {
    js(demo::codeword(p, m, k, seed))
}
