//! Decay curves, spectra and Bell distributions as CSV.
//!
//! Floats are written in scientific notation with 17 significant digits, so
//! parsing a file and writing it back reproduces it byte for byte.

use std::io::{Read, Write};

use serde::Serialize;

use crate::bell;
use crate::error::{ensure, Error, Result};
use crate::model::Lindbladian;
use crate::pauli::{enumerate_all, PauliString};
use crate::superop::SuperOperator;
use crate::twirl;

pub const CURVE_HEADER: [&str; 4] = ["t", "i_exact", "i_twirled", "purity"];
pub const SPECTRUM_HEADER: [&str; 2] = ["re", "im"];
pub const BELL_HEADER: [&str; 2] = ["pauli", "probability"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub i_exact: f64,
    pub i_twirled: f64,
    pub purity: f64,
}

/// `points` uniformly spaced times in `[0, t_max]`.
pub fn decay_curve(l: &Lindbladian, t_max: f64, points: usize) -> Result<Vec<CurvePoint>> {
    ensure!(points >= 2, Domain, "a curve needs at least 2 points, got {points}");
    ensure!(t_max > 0.0 && t_max.is_finite(), Domain, "t_max must be positive, got {t_max}");
    let generator = SuperOperator::from_lindbladian(l)?;
    let twirled = twirl::twirled_generator_matrix(l)?;
    (0..points)
        .map(|i| {
            let t = t_max * i as f64 / (points - 1) as f64;
            let channel = generator.exp(t)?;
            Ok(CurvePoint {
                t,
                i_exact: channel.identity_fraction()?,
                i_twirled: twirled.exp(t)?.identity_fraction()?,
                purity: channel.purity(),
            })
        })
        .collect()
}

/// Eigenvalues of the generator, sorted by decreasing real part, then
/// increasing imaginary part.
pub fn spectrum(l: &Lindbladian) -> Result<Vec<(f64, f64)>> {
    let mut eigs: Vec<(f64, f64)> = SuperOperator::from_lindbladian(l)?
        .eigenvalues()?
        .into_iter()
        .map(|z| (z.re, z.im))
        .collect();
    eigs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
    Ok(eigs)
}

/// Bell outcome distribution of `exp(tL)`, labelled in canonical order.
pub fn bell_distribution_at(l: &Lindbladian, t: f64) -> Result<Vec<(PauliString, f64)>> {
    let channel = SuperOperator::from_lindbladian(l)?.exp(t)?;
    let q = bell::bell_distribution(&channel)?;
    Ok(enumerate_all(l.num_qubits())?.into_iter().zip(q).collect())
}

pub fn format_float(x: f64) -> String {
    // Adding zero folds -0.0 into 0.0.
    format!("{:.16e}", x + 0.0)
}

fn parse_float(s: &str, line: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("line {line}: {s:?} is not a number")))
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Records after a header that must equal `header` exactly, each with its
/// 1-based line number.
fn read_rows<R: Read>(input: R, header: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let found = r.headers()?.clone();
    ensure!(
        found.iter().eq(header.iter().copied()),
        Parse,
        "line 1: expected header {}, found {}",
        header.join(","),
        found.iter().collect::<Vec<_>>().join(",")
    );
    r.records()
        .map(|rec| {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            Ok((line, rec))
        })
        .collect()
}

pub fn write_curve_csv<W: Write>(out: W, rows: &[CurvePoint]) -> Result<()> {
    write_rows(
        out,
        &CURVE_HEADER,
        rows.iter().map(|p| [p.t, p.i_exact, p.i_twirled, p.purity].map(format_float).to_vec()),
    )
}

pub fn read_curve_csv<R: Read>(input: R) -> Result<Vec<CurvePoint>> {
    read_rows(input, &CURVE_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            let v = |i: usize| parse_float(&rec[i], line);
            Ok(CurvePoint { t: v(0)?, i_exact: v(1)?, i_twirled: v(2)?, purity: v(3)? })
        })
        .collect()
}

pub fn write_spectrum_csv<W: Write>(out: W, eigs: &[(f64, f64)]) -> Result<()> {
    write_rows(out, &SPECTRUM_HEADER, eigs.iter().map(|(re, im)| vec![format_float(*re), format_float(*im)]))
}

pub fn read_spectrum_csv<R: Read>(input: R) -> Result<Vec<(f64, f64)>> {
    read_rows(input, &SPECTRUM_HEADER)?
        .into_iter()
        .map(|(line, rec)| Ok((parse_float(&rec[0], line)?, parse_float(&rec[1], line)?)))
        .collect()
}

pub fn write_bell_csv<W: Write>(out: W, dist: &[(PauliString, f64)]) -> Result<()> {
    write_rows(out, &BELL_HEADER, dist.iter().map(|(p, q)| vec![p.to_string(), format_float(*q)]))
}

pub fn read_bell_csv<R: Read>(input: R) -> Result<Vec<(PauliString, f64)>> {
    read_rows(input, &BELL_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            let p = rec[0]
                .parse()
                .map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
            Ok((p, parse_float(&rec[1], line)?))
        })
        .collect()
}
