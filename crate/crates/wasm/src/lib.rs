//! Browser bindings. Each export returns a JSON string; the plain functions
//! underneath are what the host tests call.

use dessins::catalog::Recognizer;
use dessins::enumerate::{count, published_count, EnumerationTask};
use dessins::geometry::induce;
use dessins::pauli::{chsh_check, PauliOp};
use dessins::perm::parse_cycles;
use dessins::{Dessin, Mode};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest index the page will enumerate; index 9 already takes seconds in a browser.
pub const PAGE_MAX_INDEX: usize = 9;

pub fn counts_json(max_index: usize, hypermap: bool) -> Result<String, String> {
    if max_index > PAGE_MAX_INDEX {
        return Err(format!("the demo stops at index {PAGE_MAX_INDEX}"));
    }
    let mode = if hypermap { Mode::Hypermap } else { Mode::Preclean };
    let rows: Vec<Value> = (1..=max_index)
        .map(|n| {
            let c = count(&EnumerationTask::new(n, mode)).map_err(|e| e.to_string())?;
            Ok(json!({"n": n, "count": c, "published": published_count(mode, n)}))
        })
        .collect::<Result<_, String>>()?;
    Ok(Value::Array(rows).to_string())
}

/// Every stabilizer class with its edges and lines, 0-based, for drawing.
pub fn geometry_json(n: usize, alpha: &str, beta: &str) -> Result<String, String> {
    let mode = if is_involution_text(n, beta) { Mode::Preclean } else { Mode::Hypermap };
    let d = Dessin::from_cycles(n, alpha, beta, mode).map_err(|e| e.to_string())?;
    let rec = Recognizer::for_points(n);
    let classes: Vec<Value> = induce(&d)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|ig| {
            let g = &ig.geometry;
            let inv = g.invariants();
            let best = rec.recognize(g, &inv, None).into_iter().next();
            json!({
                "fingerprint": ig.class.fingerprint.to_string(),
                "row": inv.row(),
                "edges": g.graph().plain_edges(),
                "lines": g.lines(),
                "recognized_as": best.map(|m| m.name),
            })
        })
        .collect();
    let r = d.report();
    Ok(json!({
        "signature": r.signature,
        "passport": r.passport,
        "group_order": r.group_order,
        "classes": classes,
    })
    .to_string())
}

fn is_involution_text(n: usize, beta: &str) -> bool {
    // a parse error surfaces from `from_cycles` below
    parse_cycles(n, beta).map_or(true, |b| b.then(&b).is_identity())
}

pub fn chsh_json(ops: &str) -> Result<String, String> {
    let parsed: Vec<PauliOp> = ops
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e: dessins::pauli::PauliError| format!("{s}: {e}")))
        .collect::<Result<_, _>>()?;
    let quad: [PauliOp; 4] = parsed.try_into().map_err(|v: Vec<PauliOp>| format!("need four operators, got {}", v.len()))?;
    let r = chsh_check(&quad).map_err(|e| e.to_string())?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn counts(max_index: usize, hypermap: bool) -> Result<String, JsError> {
    counts_json(max_index, hypermap).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn geometry(n: usize, alpha: &str, beta: &str) -> Result<String, JsError> {
    geometry_json(n, alpha, beta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn chsh(ops: &str) -> Result<String, JsError> {
    chsh_json(ops).map_err(|e| JsError::new(&e))
}
