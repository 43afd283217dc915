//! Browser bindings. Every function takes the text of a TOML generator file
//! and returns flat `Float64Array`s the page can plot directly.

use lindcert::{parse_str, report, Error};
use wasm_bindgen::prelude::*;

/// `[t, i_exact, i_twirled, purity]` repeated `points` times.
pub fn curve_rows(config: &str, t_max: f64, points: usize) -> Result<Vec<f64>, Error> {
    let rows = report::decay_curve(&parse_str(config)?, t_max, points)?;
    Ok(rows.iter().flat_map(|r| [r.t, r.i_exact, r.i_twirled, r.purity]).collect())
}

/// `[re, im]` per eigenvalue, sorted by decreasing real part.
pub fn spectrum_pairs(config: &str) -> Result<Vec<f64>, Error> {
    Ok(report::spectrum(&parse_str(config)?)?.into_iter().flat_map(|(re, im)| [re, im]).collect())
}

/// Labels and probabilities of the Bell outcomes of `exp(tL)`.
pub fn bell_outcomes(config: &str, t: f64) -> Result<(Vec<String>, Vec<f64>), Error> {
    let dist = report::bell_distribution_at(&parse_str(config)?, t)?;
    Ok(dist.into_iter().map(|(p, q)| (p.to_string(), q)).unzip())
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = decayCurve)]
pub fn decay_curve(config: &str, t_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    curve_rows(config, t_max, points).map_err(js)
}

#[wasm_bindgen]
pub fn spectrum(config: &str) -> Result<Vec<f64>, JsError> {
    spectrum_pairs(config).map_err(js)
}

#[wasm_bindgen(js_name = bellProbabilities)]
pub fn bell_probabilities(config: &str, t: f64) -> Result<Vec<f64>, JsError> {
    bell_outcomes(config, t).map(|(_, q)| q).map_err(js)
}

#[wasm_bindgen(js_name = bellLabels)]
pub fn bell_labels(config: &str) -> Result<Vec<String>, JsError> {
    bell_outcomes(config, 0.0).map(|(l, _)| l).map_err(js)
}
