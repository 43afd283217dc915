//! Certification of Markovian noise: dense superoperator simulation of
//! local Lindbladians, Pauli twirling, Bell sampling and a detector that
//! decides whether a generator has any dissipative part.

pub mod bell;
pub mod config;
pub mod detector;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod par;
pub mod pauli;
pub mod random;
pub mod report;
pub mod superop;
pub mod twirl;

pub use bell::{bell_distribution, Mode, RoundOutcome, RoundSimulator};
pub use detector::{
    derive_parameters, run_detection, theoretical_budgets, Budgets, DerivedParameters, DetectionParams,
    DetectionReport, Verdict,
};
pub use config::{parse_config, parse_str, GeneratorConfig};
pub use error::{Error, Result};
pub use model::{
    DiagonalDissipator, Hamiltonian, JumpOperator, JumpOperatorSet, Lindbladian, DEFAULT_CAPACITY,
};
pub use pauli::{Pauli, PauliString};
pub use superop::{ChoiMatrix, DiamondBounds, SuperOperator};
