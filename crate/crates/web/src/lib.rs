//! Browser bindings for the `bentsq` crate.
//!
//! Every export takes plain numbers or strings and returns a JSON string, so
//! the page needs no generated TypeScript types. The `*_json` functions hold
//! the logic and are tested natively; the `#[wasm_bindgen]` wrappers only
//! convert errors.

use std::sync::OnceLock;

use bentsq::bentsquare::{classify_vector, is_bent_square, square_from_truth_table};
use bentsq::boolfn::{algebraic_normal_form, is_bent, walsh_transform, TruthTable};
use bentsq::construct::{build_bent_square, QuadrupleIndex, SignPattern, PATTERN_COUNT};
use bentsq::bentsquare::truth_table_from_square;
use bentsq::tworegular::{
    bipartition_signs, cycle_decomposition, enumerate, horizontal_signature, sample_uniform,
    vertical_signature,
};
use rand_chacha::rand_core::SeedableRng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

type Outcome = Result<Value, String>;

fn err(e: bentsq::Error) -> String {
    format!("{}: {e}", e.name())
}

/// Spectrum, ANF and (for even `n`) the bent square of a hex truth table.
pub fn analyze_json(hex: &str) -> Outcome {
    let f: TruthTable = hex.trim().parse().map_err(err)?;
    let n = f.num_vars();
    let spectrum = walsh_transform(&f);
    let anf = algebraic_normal_form(&f);
    let mut out = json!({
        "hex": f.to_hex(),
        "n": n,
        "weight": f.weight(),
        "spectrum": spectrum.values(),
        "anf": format!("{anf:?}").trim_start_matches("ANF(").trim_end_matches(')'),
        "degree": anf.degree(),
        "bent": Value::Null,
        "square": Value::Null,
    });
    if n.is_multiple_of(2) {
        let sq = square_from_truth_table(&f).map_err(err)?;
        let rows: Vec<Value> = sq
            .rows()
            .map(|r| {
                json!({
                    "entries": r,
                    "class": classify_vector(r).expect("row of a square"),
                })
            })
            .collect();
        out["bent"] = json!(is_bent(&f).map_err(err)?);
        out["square"] = json!({ "rows": rows, "is_bent_square": is_bent_square(&sq) });
    }
    Ok(out)
}

/// A uniformly random 2-regular `N x N` matrix with its signatures, cycles
/// and balanced signs.
pub fn sample_two_regular_json(size: usize, seed: u64) -> Outcome {
    if size > 64 {
        return Err(format!("N = {size} is too large for the page (max 64)"));
    }
    let m = sample_uniform(size, seed).map_err(err)?;
    let signs = bipartition_signs(&m);
    let signed: Vec<Vec<i8>> = (0..size)
        .map(|r| (0..size).map(|c| signs.get(&m, r, c).unwrap_or(0)).collect())
        .collect();
    let signatures = if size.is_power_of_two() {
        let bits = size.trailing_zeros() as usize;
        json!({
            "vertical": vertical_signature(&m).map_err(err)?.to_binary(bits),
            "horizontal": horizontal_signature(&m).map_err(err)?.to_binary(bits),
        })
    } else {
        Value::Null
    };
    Ok(json!({
        "N": size,
        "rows": m.rows(),
        "signed": signed,
        "cycles": cycle_decomposition(&m).lengths(),
        "signatures": signatures,
    }))
}

fn index_for(n: u32) -> Result<&'static QuadrupleIndex, String> {
    static N4: OnceLock<QuadrupleIndex> = OnceLock::new();
    static N6: OnceLock<QuadrupleIndex> = OnceLock::new();
    let (cell, size) = match n {
        4 => (&N4, 2),
        6 => (&N6, 4),
        _ => return Err(format!("n = {n} is not offered here (use 4 or 6)")),
    };
    Ok(cell.get_or_init(|| {
        let ms: Vec<_> = enumerate(size).expect("small N").collect();
        QuadrupleIndex::new(&ms).expect("one size")
    }))
}

/// A bent function built from a uniformly random signature-matched
/// quadruple and the given sign pattern.
pub fn construct_json(n: u32, seed: u64, pattern: usize) -> Outcome {
    let p = SignPattern::from_id(pattern)
        .ok_or_else(|| format!("pattern must be below {PATTERN_COUNT}"))?;
    let index = index_for(n)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let ids = index.sample_ids(&mut rng).ok_or("no quadruples")?;
    let q = index.quadruple(ids);
    let sq = build_bent_square(&q, &p);
    let f = truth_table_from_square(&sq).map_err(err)?;
    let blocks: Vec<_> = q.blocks().iter().map(|b| b.rows().to_vec()).collect();
    Ok(json!({
        "n": n,
        "quadruples": index.count().to_string(),
        "blocks": blocks,
        "pattern": pattern,
        "square": sq.rows().collect::<Vec<_>>(),
        "hex": f.to_hex(),
        "bent": is_bent(&f).map_err(err)?,
    }))
}

fn finish(r: Outcome) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn analyze(hex: &str) -> Result<String, JsError> {
    finish(analyze_json(hex))
}

#[wasm_bindgen(js_name = sampleTwoRegular)]
pub fn sample_two_regular(size: usize, seed: u64) -> Result<String, JsError> {
    finish(sample_two_regular_json(size, seed))
}

#[wasm_bindgen]
pub fn construct(n: u32, seed: u64, pattern: usize) -> Result<String, JsError> {
    finish(construct_json(n, seed, pattern))
}
