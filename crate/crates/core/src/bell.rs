//! Bell sampling on simulated channels.
//!
//! Half of a maximally entangled pair goes through the channel and the pair
//! is measured in the Bell basis `{(P (x) I)|Phi>}`. Rounds only need the
//! identity/non-identity bit, so they draw one Bernoulli sample from the
//! exact identity-outcome probability.

use std::fmt;
use std::str::FromStr;

use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::linalg::{self, CMat};
use crate::model::Lindbladian;
use crate::pauli::{enumerate_all, sample_uniform, PauliString};
use crate::superop::{SuperOperator, CROSS_METHOD_TOL};
use crate::twirl;

/// How the twirled short-time evolution is realized inside a round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Fresh uniformly random Pauli frame around every slice.
    #[default]
    SampledPauli,
    /// Exact twirl of every slice.
    Averaged,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::SampledPauli => "sampled_pauli",
            Mode::Averaged => "averaged",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "sampled_pauli" | "sampled" => Ok(Mode::SampledPauli),
            "averaged" => Ok(Mode::Averaged),
            _ => Err(Error::Parse(format!(
                "unknown mode {s:?} (expected sampled_pauli or averaged)"
            ))),
        }
    }
}

/// Bell outcome probabilities in canonical Pauli order:
/// `q(P) = sum_Q chi(P, Q) S_QQ / d^2`.
pub fn bell_distribution(s: &SuperOperator) -> Result<Vec<f64>> {
    s.check_cptp()?;
    let paulis = enumerate_all(s.num_qubits())?;
    let diag: Vec<f64> = s.diagonal().iter().map(|v| v.re).collect();
    let norm = s.size() as f64;
    Ok(paulis
        .iter()
        .map(|p| {
            paulis
                .iter()
                .zip(&diag)
                .map(|(q, v)| p.sign(q) * v)
                .sum::<f64>()
                / norm
        })
        .collect())
}

/// Independent stream for one round: the master seed picks the key, the
/// round index picks the stream.
pub fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    /// The Bell measurement returned `|Phi>`.
    pub identity_outcome: bool,
    /// The round asks for REJECT: the outcome left `|Phi>`.
    pub rejected: bool,
    pub t_used: f64,
    /// Clamped identity-outcome probability used for the draw.
    pub p_identity: f64,
    /// One frame per slice in sampled mode; empty in averaged mode or when
    /// dropped for serialization.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pauli_frames: Vec<PauliString>,
}

/// Round engine with the generator realized once.
#[derive(Clone, Debug)]
pub struct RoundSimulator {
    generator: SuperOperator,
    basis: Vec<PauliString>,
}

impl RoundSimulator {
    pub fn new(l: &Lindbladian) -> Result<Self> {
        Ok(Self::from_generator(SuperOperator::from_lindbladian(l)?))
    }

    pub fn from_generator(generator: SuperOperator) -> Self {
        let basis = enumerate_all(generator.num_qubits()).expect("generator size is valid");
        Self { generator, basis }
    }

    pub fn generator(&self) -> &SuperOperator {
        &self.generator
    }

    /// `prod_j U_{P_j} o exp(tau L) o U_{P_j}` with the first frame applied
    /// first.
    pub fn sampled_composition(&self, tau: f64, frames: &[PauliString]) -> Result<SuperOperator> {
        let step = self.generator.exp(tau)?;
        let e = step.matrix();
        let size = self.basis.len();
        let mut acc = linalg::identity(size);
        let mut tmp = linalg::zeros(size);
        for p in frames {
            ensure!(
                p.num_qubits() == self.generator.num_qubits(),
                Dimension,
                "frame {p} does not match the generator size"
            );
            let signs: Vec<f64> = self.basis.iter().map(|q| p.sign(q)).collect();
            scale_rows(&mut acc, &signs);
            faer::linalg::matmul::matmul(
                tmp.as_mut(),
                faer::Accum::Replace,
                e.as_ref(),
                acc.as_ref(),
                c64::new(1.0, 0.0),
                faer::Par::Seq,
            );
            std::mem::swap(&mut acc, &mut tmp);
            scale_rows(&mut acc, &signs);
        }
        SuperOperator::from_matrix(self.generator.num_qubits(), acc)
    }

    /// Exact identity-outcome probability for evolution time `t` split into
    /// `m` slices. `frames` is used only in sampled mode.
    pub fn identity_probability(&self, t: f64, m: u64, mode: Mode, frames: &[PauliString]) -> Result<f64> {
        ensure!(m >= 1, Domain, "the number of slices must be at least 1");
        let tau = t / m as f64;
        match mode {
            Mode::Averaged => twirl::trotterized_twirled_of(&self.generator, tau, m)?.identity_fraction(),
            Mode::SampledPauli => {
                ensure!(frames.len() as u64 == m, Domain, "expected {m} frames, got {}", frames.len());
                self.sampled_composition(tau, frames)?.identity_fraction()
            }
        }
    }

    /// One round: draw `t`, then the frames (sampled mode), then the
    /// measurement outcome, all from `rng`.
    pub fn run_round<R: Rng + ?Sized>(&self, t_max: f64, m: u64, mode: Mode, rng: &mut R) -> Result<RoundOutcome> {
        ensure!(t_max > 0.0 && t_max.is_finite(), Domain, "t_max must be positive and finite, got {t_max}");
        ensure!(m >= 1, Domain, "the number of slices must be at least 1");
        let t = rng.random::<f64>() * t_max;
        let frames = match mode {
            Mode::SampledPauli => (0..m)
                .map(|_| sample_uniform(self.generator.num_qubits(), rng))
                .collect::<Result<Vec<_>>>()?,
            Mode::Averaged => Vec::new(),
        };
        let raw = self.identity_probability(t, m, mode, &frames)?;
        if !(-CROSS_METHOD_TOL..=1.0 + CROSS_METHOD_TOL).contains(&raw) {
            log::warn!("identity probability {raw} outside [0, 1] beyond tolerance; clamping");
        }
        let p_identity = raw.clamp(0.0, 1.0);
        let identity_outcome = rng.random::<f64>() < p_identity;
        Ok(RoundOutcome {
            identity_outcome,
            rejected: !identity_outcome,
            t_used: t,
            p_identity,
            pauli_frames: frames,
        })
    }
}

fn scale_rows(m: &mut CMat, signs: &[f64]) {
    for j in 0..m.ncols() {
        for (i, s) in signs.iter().enumerate() {
            if *s < 0.0 {
                m[(i, j)] = -m[(i, j)];
            }
        }
    }
}

/// Convenience wrapper building a [`RoundSimulator`] for a single round.
pub fn run_round<R: Rng + ?Sized>(
    l: &Lindbladian,
    t_max: f64,
    m: u64,
    mode: Mode,
    rng: &mut R,
) -> Result<RoundOutcome> {
    RoundSimulator::new(l)?.run_round(t_max, m, mode, rng)
}
