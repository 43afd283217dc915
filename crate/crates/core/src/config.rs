//! TOML generator files.
//!
//! ```toml
//! n = 2
//! declared_k = 2          # optional, must equal the derived locality
//! declared_degree = 1     # optional, must equal the derived degree
//! capacity_override = 5   # optional, raises the dense-realization limit
//!
//! [[hamiltonian]]
//! pauli = "ZZ"
//! coeff = 0.5
//!
//! [[jumps]]
//! support = [0, 1]        # optional, defaults to the union of term supports
//! terms = [
//!   { pauli = "XI", re = 0.3, im = 0.0 },
//!   { pauli = "ZY", re = 0.0, im = -0.1 },
//! ]
//! ```
//!
//! Qubit 0 is the leftmost letter of every string.

use std::path::Path;

use faer::c64;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{Error, Result};
use crate::model::{Hamiltonian, JumpOperator, JumpOperatorSet, Lindbladian};
use crate::pauli::PauliString;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub n: Spanned<usize>,
    #[serde(default)]
    pub hamiltonian: Vec<HamiltonianTerm>,
    #[serde(default)]
    pub jumps: Vec<JumpConfig>,
    #[serde(default)]
    pub declared_k: Option<Spanned<usize>>,
    #[serde(default)]
    pub declared_degree: Option<Spanned<usize>>,
    #[serde(default)]
    pub capacity_override: Option<Spanned<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianTerm {
    pub pauli: Spanned<String>,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    #[serde(default)]
    pub support: Option<Spanned<Vec<usize>>>,
    pub terms: Spanned<Vec<JumpTerm>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpTerm {
    pub pauli: Spanned<String>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

fn at<T>(text: &str, span: &Spanned<T>, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {}: {msg}", line_of(text, span.span().start)))
}

fn reword(text: &str, span: &Spanned<impl Sized>, e: Error) -> Error {
    let msg = match e {
        Error::Parse(m) | Error::Validation(m) | Error::Dimension(m) | Error::Capacity(m) | Error::Domain(m) => m,
        other => other.to_string(),
    };
    at(text, span, msg)
}

fn pauli(text: &str, n: usize, s: &Spanned<String>) -> Result<PauliString> {
    let p: PauliString = s.get_ref().parse().map_err(|e| reword(text, s, e))?;
    if p.num_qubits() != n {
        return Err(at(text, s, format!("Pauli string {:?} has length {}, expected {n}", s.get_ref(), p.num_qubits())));
    }
    Ok(p)
}

impl GeneratorConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))
    }

    /// Validated model. `text` must be the source the config was read from,
    /// and is used to turn spans into line numbers.
    pub fn build(&self, text: &str) -> Result<Lindbladian> {
        let n = *self.n.get_ref();
        if n == 0 {
            return Err(at(text, &self.n, "n must be at least 1"));
        }
        let mut h_terms = Vec::with_capacity(self.hamiltonian.len());
        for term in &self.hamiltonian {
            if !term.coeff.is_finite() {
                return Err(at(text, &term.pauli, "Hamiltonian coefficient is not finite"));
            }
            h_terms.push((pauli(text, n, &term.pauli)?, term.coeff));
        }
        let hamiltonian = Hamiltonian::new(n, h_terms)?;

        let mut jumps = Vec::with_capacity(self.jumps.len());
        for jump in &self.jumps {
            let mut terms = Vec::with_capacity(jump.terms.get_ref().len());
            for term in jump.terms.get_ref() {
                let p = pauli(text, n, &term.pauli)?;
                if p.is_identity() {
                    return Err(at(
                        text,
                        &term.pauli,
                        "jump operators must be traceless; the identity term is not allowed",
                    ));
                }
                terms.push((p, c64::new(term.re, term.im)));
            }
            let support = jump.support.as_ref().map(|s| s.get_ref().clone());
            let op = JumpOperator::new(n, support, terms).map_err(|e| match &jump.support {
                Some(s) => reword(text, s, e),
                None => reword(text, &jump.terms, e),
            })?;
            jumps.push(op);
        }
        let mut l = Lindbladian::new(hamiltonian, JumpOperatorSet::new(n, jumps)?)?;

        let (k, degree) = l.locality_degree();
        if let Some(dk) = &self.declared_k {
            if *dk.get_ref() != k {
                return Err(at(text, dk, format!("declared_k = {} but the jumps have locality {k}", dk.get_ref())));
            }
        }
        if let Some(dd) = &self.declared_degree {
            if *dd.get_ref() != degree {
                return Err(at(
                    text,
                    dd,
                    format!("declared_degree = {} but the jumps have degree {degree}", dd.get_ref()),
                ));
            }
        }
        if let Some(cap) = &self.capacity_override {
            l = l.with_capacity(*cap.get_ref()).map_err(|e| reword(text, cap, e))?;
        }
        l.check_capacity().map_err(|e| reword(text, &self.n, e))?;
        Ok(l)
    }
}

pub fn parse_str(text: &str) -> Result<Lindbladian> {
    GeneratorConfig::from_toml(text)?.build(text)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<Lindbladian> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}
