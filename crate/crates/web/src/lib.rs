//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain strings and numbers and returns a JSON string, so
//! the page needs no glue beyond `JSON.parse`. The `*_json` functions hold the
//! logic and are callable (and tested) natively.

use braidcomb::combing::compare_combed;
use braidcomb::fingerprint::Method;
use braidcomb::{beta_m, comb_compressed, parse_word_for, EqualityChecker, SurfaceParams};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Factors are expanded for display only up to this length.
const DISPLAY_LIMIT: u64 = 400;

fn params(g: u32, p: u32, n: u32) -> Result<SurfaceParams, String> {
    SurfaceParams::bounded(g, p, n).map_err(|e| e.to_string())
}

pub fn comb_json(word: &str, g: u32, p: u32, n: u32) -> Result<String, String> {
    let params = params(g, p, n)?;
    let word = parse_word_for(word, &params).map_err(|e| e.to_string())?;
    let nf = comb_compressed(&word, &params).map_err(|e| e.to_string())?;
    let factors: Vec<Value> = std::iter::once(json!({
        "k": 1,
        "size": null,
        "length": nf.factor1.len().to_string(),
        "reduced": nf.factor1.to_string(),
    }))
    .chain(nf.factors.iter().map(|f| {
        json!({
            "k": f.k,
            "size": f.slp.size(),
            "length": f.slp.eval_length().to_string(),
            "reduced": f.slp.reduced_word(DISPLAY_LIMIT).ok().map(|w| w.to_string()),
            "rules": f.labelled_rules().iter().map(|(l, r)| format!("{l} -> {}", r.join(" "))).collect::<Vec<_>>(),
        })
    }))
    .collect();
    Ok(json!({ "input_length": word.len(), "factors": factors }).to_string())
}

pub fn equal_json(word1: &str, word2: &str, g: u32, p: u32, n: u32) -> Result<String, String> {
    let params = params(g, p, n)?;
    let comb = |w: &str| {
        parse_word_for(w, &params).and_then(|w| comb_compressed(&w, &params)).map_err(|e| e.to_string())
    };
    let c = compare_combed(&comb(word1)?, &comb(word2)?, &EqualityChecker::default());
    let factors: Vec<Value> = c
        .factors
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let method = match v.method {
                Method::Exact => "exact".to_string(),
                Method::Fingerprint { primes } => format!("fingerprint ({primes} primes)"),
            };
            json!({ "k": idx + 2, "equal": v.equal, "method": method })
        })
        .collect();
    Ok(json!({ "equal": c.equal(), "factor1_equal": c.factor1_equal, "factors": factors }).to_string())
}

/// Compressed size against explicit length of the last factor of
/// `beta_1 .. beta_max_m`.
pub fn growth_json(max_m: usize) -> Result<String, String> {
    if !(1..=60).contains(&max_m) {
        return Err("m must be between 1 and 60".into());
    }
    let disc = SurfaceParams::disc(4).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = (1..=max_m)
        .map(|m| {
            let nf = comb_compressed(&beta_m(m), &disc).expect("beta_m is a disc braid");
            let last = &nf.factors[2].slp;
            json!({
                "m": m,
                "input_length": 4 * m + 1,
                "size": last.size(),
                "eval_length": last.eval_length().to_string(),
                "log2_eval_length": braidcomb::slp::approx_log2(&last.eval_length()),
                "reduced_length": last.reduced_word(200_000).ok().map(|w| w.len()),
            })
        })
        .collect();
    Ok(Value::Array(rows).to_string())
}

#[wasm_bindgen]
pub fn comb(word: &str, g: u32, p: u32, n: u32) -> Result<String, JsValue> {
    comb_json(word, g, p, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn equal(word1: &str, word2: &str, g: u32, p: u32, n: u32) -> Result<String, JsValue> {
    equal_json(word1, word2, g, p, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn growth(max_m: usize) -> Result<String, JsValue> {
    growth_json(max_m).map_err(|e| JsValue::from_str(&e))
}
