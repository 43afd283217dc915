//! Randomized certification of dissipation.
//!
//! Each round evolves one half of a Bell pair for a uniformly random time
//! under `m` Pauli-twirled slices and measures in the Bell basis. Any
//! non-identity outcome means the dynamics are not unitary, and the run
//! stops with REJECT. If all `R` rounds return the identity outcome, the
//! verdict is ACCEPT.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::bell::{round_rng, Mode, RoundOutcome, RoundSimulator};
use crate::error::{ensure, Result};
use crate::model::{self, Lindbladian};
use crate::par;

/// Rounds are simulated in blocks of this many and consumed in order, so the
/// outcome never depends on the worker count.
const ROUND_BLOCK: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Accept,
    Reject,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "ACCEPT",
            Verdict::Reject => "REJECT",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionParams {
    /// Promise threshold on the normalized Frobenius norm of the dissipator.
    pub epsilon: f64,
    /// Failure probability.
    pub delta: f64,
    pub k: usize,
    pub degree: usize,
    /// Promise `||L||_diamond <= l_bound`. Defaults to
    /// [`model::diamond_upper_bound`].
    pub l_bound: Option<f64>,
    pub mode: Mode,
    pub seed: u64,
    pub m_override: Option<u64>,
    pub r_override: Option<u64>,
    /// `t_max = t_max_factor / epsilon'`.
    pub t_max_factor: f64,
}

impl DetectionParams {
    pub fn new(epsilon: f64, delta: f64, k: usize, degree: usize) -> Self {
        Self {
            epsilon,
            delta,
            k,
            degree,
            l_bound: None,
            mode: Mode::default(),
            seed: 0,
            m_override: None,
            r_override: None,
            t_max_factor: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_core(self.epsilon, self.delta, self.k, self.degree)?;
        if let Some(l) = self.l_bound {
            ensure!(l > 0.0 && l.is_finite(), Domain, "L bound must be positive and finite, got {l}");
        }
        ensure!(
            self.t_max_factor > 0.0 && self.t_max_factor.is_finite(),
            Domain,
            "t_max factor must be positive, got {}",
            self.t_max_factor
        );
        ensure!(self.m_override != Some(0), Domain, "m override must be at least 1");
        ensure!(self.r_override != Some(0), Domain, "R override must be at least 1");
        Ok(())
    }
}

fn check_core(epsilon: f64, delta: f64, k: usize, degree: usize) -> Result<()> {
    ensure!(epsilon > 0.0 && epsilon.is_finite(), Domain, "epsilon must be positive, got {epsilon}");
    ensure!(delta > 0.0 && delta < 1.0, Domain, "delta must lie in (0, 1), got {delta}");
    ensure!(k >= 1, Domain, "locality k must be at least 1");
    ensure!(degree >= 1, Domain, "degree must be at least 1");
    ensure!(k <= 16 && degree <= 1 << 16, Domain, "locality {k} or degree {degree} is out of range");
    Ok(())
}

/// Ceiling that ignores relative round-off below `1e-12`.
fn ceil_tolerant(x: f64) -> f64 {
    (x - x.abs() * 1e-12).ceil()
}

fn to_count(x: f64) -> u64 {
    // Saturating conversion; `as` clamps to u64::MAX.
    x.max(1.0) as u64
}

/// `(4 degree)^k + 1`.
fn sparsity_factor(k: usize, degree: usize) -> f64 {
    (4.0 * degree as f64).powi(k as i32) + 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParameters {
    pub epsilon_prime: f64,
    pub m: u64,
    #[serde(rename = "R")]
    pub r: u64,
    pub t_max: f64,
}

/// Parameters for the default interval `t ~ U[0, 1/epsilon']`.
pub fn derive_parameters(epsilon: f64, delta: f64, k: usize, degree: usize, l_bound: f64) -> Result<DerivedParameters> {
    derive_parameters_with_factor(epsilon, delta, k, degree, l_bound, 1.0)
}

/// `epsilon' = epsilon / (2((4D)^k + 1))`,
/// `R = ceil(40/3 9^k ln(1/delta))`,
/// `m = ceil(192 9^(k-1) ((4D)^k + 1)^2 L^2 / epsilon^2)`,
/// `t_max = factor / epsilon'`. `R` and `m` are at least 1.
pub fn derive_parameters_with_factor(
    epsilon: f64,
    delta: f64,
    k: usize,
    degree: usize,
    l_bound: f64,
    t_max_factor: f64,
) -> Result<DerivedParameters> {
    check_core(epsilon, delta, k, degree)?;
    ensure!(l_bound >= 0.0 && l_bound.is_finite(), Domain, "L bound must be non-negative, got {l_bound}");
    ensure!(t_max_factor > 0.0 && t_max_factor.is_finite(), Domain, "t_max factor must be positive");
    let s = sparsity_factor(k, degree);
    let log_term = -delta.ln();
    let nine_k = 9f64.powi(k as i32);
    let r = ceil_tolerant(40.0 * nine_k * log_term / 3.0);
    let m = ceil_tolerant(192.0 * 9f64.powi(k as i32 - 1) * s * s * l_bound * l_bound / (epsilon * epsilon));
    Ok(DerivedParameters {
        epsilon_prime: epsilon / (2.0 * s),
        m: to_count(m),
        r: to_count(r),
        t_max: t_max_factor * 2.0 * s / epsilon,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    /// `80/3 9^k ((4D)^k + 1) ln(1/delta) / epsilon`.
    pub t_bound: f64,
    /// `ceil(2560 9^(2k-1) (4D + 1)^2 L^2 ln(1/delta) / epsilon^2)`, as
    /// stated; realized query counts come from `m` and `R`.
    pub q_bound: u64,
}

pub fn theoretical_budgets(epsilon: f64, delta: f64, k: usize, degree: usize, l_bound: f64) -> Result<Budgets> {
    check_core(epsilon, delta, k, degree)?;
    ensure!(l_bound >= 0.0 && l_bound.is_finite(), Domain, "L bound must be non-negative, got {l_bound}");
    let log_term = -delta.ln();
    let t_bound = 80.0 * 9f64.powi(k as i32) * sparsity_factor(k, degree) * log_term / (3.0 * epsilon);
    let lin = 4.0 * degree as f64 + 1.0;
    let q = 2560.0 * 9f64.powi(2 * k as i32 - 1) * lin * lin * l_bound * l_bound * log_term / (epsilon * epsilon);
    Ok(Budgets {
        t_bound,
        q_bound: ceil_tolerant(q).max(0.0) as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub verdict: Verdict,
    pub epsilon_prime: f64,
    pub m: u64,
    #[serde(rename = "R")]
    pub r: u64,
    pub t_max: f64,
    pub m_overridden: bool,
    pub r_overridden: bool,
    /// Outcomes of the executed rounds, in order.
    pub rounds: Vec<RoundOutcome>,
    pub rejecting_round: Option<usize>,
    pub rounds_executed: usize,
    pub total_evolution_time: f64,
    pub query_count: u64,
    pub budgets: Budgets,
    pub l_bound_used: f64,
    /// The model's own bound `2||H|| + 2 sum ||L_a||^2`.
    pub l_bound_model: f64,
    /// A user-supplied `L` below the model bound may break the promise.
    pub l_bound_below_model: bool,
    pub derived_k: usize,
    pub derived_degree: usize,
    pub params: DetectionParams,
    pub notes: Vec<String>,
}

impl DetectionReport {
    /// Drops the recorded Pauli frames from every round.
    pub fn strip_frames(&mut self) {
        for r in &mut self.rounds {
            r.pauli_frames = Vec::new();
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("verdict: {}\n", self.verdict));
        s.push_str(&format!("mode: {}  seed: {}\n", self.params.mode, self.params.seed));
        s.push_str(&format!(
            "epsilon: {}  delta: {}  k: {}  degree: {}  L: {}{}\n",
            self.params.epsilon,
            self.params.delta,
            self.params.k,
            self.params.degree,
            self.l_bound_used,
            if self.l_bound_below_model { " (below the model bound, promise may not hold)" } else { "" }
        ));
        s.push_str(&format!(
            "epsilon': {}  m: {}{}  R: {}{}  t_max: {}\n",
            self.epsilon_prime,
            self.m,
            if self.m_overridden { " (override)" } else { "" },
            self.r,
            if self.r_overridden { " (override)" } else { "" },
            self.t_max
        ));
        s.push_str(&format!(
            "rounds executed: {}{}\n",
            self.rounds_executed,
            match self.rejecting_round {
                Some(i) => format!(" (rejected in round {i})"),
                None => String::new(),
            }
        ));
        s.push_str(&format!(
            "total evolution time: {} (theoretical bound {})\n",
            self.total_evolution_time, self.budgets.t_bound
        ));
        s.push_str(&format!(
            "queries: {} (theoretical bound {})\n",
            self.query_count, self.budgets.q_bound
        ));
        s
    }
}

/// Runs up to `R` rounds, stopping at the first rejection.
pub fn run_detection(l: &Lindbladian, params: &DetectionParams) -> Result<DetectionReport> {
    params.validate()?;
    l.check_capacity()?;
    let (derived_k, derived_degree) = l.locality_degree();
    ensure!(
        derived_k <= params.k && derived_degree <= params.degree,
        Validation,
        "model has locality {derived_k} and degree {derived_degree}, beyond the promised k = {} and degree = {}",
        params.k,
        params.degree
    );

    let l_bound_model = model::diamond_upper_bound(l)?;
    let l_bound_used = params.l_bound.unwrap_or(l_bound_model);
    let l_bound_below_model = params.l_bound.is_some_and(|u| u < l_bound_model * (1.0 - 1e-12));
    if l_bound_below_model {
        log::warn!("L bound {l_bound_used} is below the model bound {l_bound_model}; the promise may not hold");
    }

    let derived = derive_parameters_with_factor(
        params.epsilon,
        params.delta,
        params.k,
        params.degree,
        l_bound_used,
        params.t_max_factor,
    )?;
    let budgets = theoretical_budgets(params.epsilon, params.delta, params.k, params.degree, l_bound_used)?;
    let m = params.m_override.unwrap_or(derived.m);
    let r = params.r_override.unwrap_or(derived.r);

    let sim = RoundSimulator::new(l)?;
    let first_reject = AtomicUsize::new(usize::MAX);
    let total = usize::try_from(r).unwrap_or(usize::MAX);
    let mut rounds = Vec::new();
    let mut rejecting_round = None;

    let mut start = 0usize;
    'blocks: while start < total {
        let end = total.min(start.saturating_add(ROUND_BLOCK));
        let block = par::map_range(start..end, |i| {
            if i > first_reject.load(Ordering::Relaxed) {
                return None;
            }
            let mut rng = round_rng(params.seed, i as u64);
            let out = sim.run_round(derived.t_max, m, params.mode, &mut rng);
            if matches!(&out, Ok(o) if o.rejected) {
                first_reject.fetch_min(i, Ordering::Relaxed);
            }
            Some(out)
        });
        for (offset, out) in block.into_iter().enumerate() {
            let out = out.expect("rounds up to the first rejection are always simulated")?;
            let rejected = out.rejected;
            rounds.push(out);
            if rejected {
                rejecting_round = Some(start + offset);
                break 'blocks;
            }
        }
        start = end;
    }

    let rounds_executed = rounds.len();
    let total_evolution_time = rounds.iter().map(|o| o.t_used).sum();
    Ok(DetectionReport {
        verdict: if rejecting_round.is_some() { Verdict::Reject } else { Verdict::Accept },
        epsilon_prime: derived.epsilon_prime,
        m,
        r,
        t_max: derived.t_max,
        m_overridden: params.m_override.is_some(),
        r_overridden: params.r_override.is_some(),
        rounds,
        rejecting_round,
        rounds_executed,
        total_evolution_time,
        query_count: m.saturating_mul(rounds_executed as u64),
        budgets,
        l_bound_used,
        l_bound_model,
        l_bound_below_model,
        derived_k,
        derived_degree,
        params: params.clone(),
        notes: vec![
            "log(1/delta) is the natural logarithm".into(),
            "the default L bound is 2||H||_op + 2 sum_a ||L_a||_op^2".into(),
            "realized totals count executed rounds only; theoretical bounds are worst case".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::model::{DiagonalDissipator, Hamiltonian, JumpOperator, JumpOperatorSet};
    use crate::pauli::PauliString;
    use approx::assert_relative_eq;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn dephasing(alpha: f64) -> Lindbladian {
        DiagonalDissipator::new(1, [(p("Z"), alpha)]).unwrap().to_lindbladian().unwrap()
    }

    #[test]
    fn test_derive_parameters_reference_point() {
        let e_inv = (-1.0f64).exp();
        let d = derive_parameters(0.5, e_inv, 1, 1, 1.0).unwrap();
        assert_eq!(d.epsilon_prime, 0.05);
        assert_eq!(d.m, 19200);
        assert_eq!(d.r, 120);
        assert_eq!(d.t_max, 20.0);
        let b = theoretical_budgets(0.5, e_inv, 1, 1, 1.0).unwrap();
        assert_eq!(b.t_bound, 2400.0);
    }

    #[test]
    fn test_derive_parameters_k2() {
        let d = derive_parameters(0.5, (-1.0f64).exp(), 2, 1, 1.0).unwrap();
        assert_relative_eq!(d.epsilon_prime, 0.5 / 34.0, epsilon = 1e-15);
        assert_eq!(d.r, 1080);
    }

    #[test]
    fn test_round_count_floor() {
        let d = derive_parameters(0.5, 1.0 - 1e-15, 1, 1, 1.0).unwrap();
        assert_eq!(d.r, 1);
        let zero_l = derive_parameters(0.5, 0.1, 1, 1, 0.0).unwrap();
        assert_eq!(zero_l.m, 1);
    }

    #[test]
    fn test_parameter_domain_errors() {
        assert!(derive_parameters(0.0, 0.1, 1, 1, 1.0).is_err());
        assert!(derive_parameters(0.5, 1.0, 1, 1, 1.0).is_err());
        assert!(derive_parameters(0.5, 0.0, 1, 1, 1.0).is_err());
        assert!(derive_parameters(0.5, 0.1, 0, 1, 1.0).is_err());
        assert!(derive_parameters(0.5, 0.1, 1, 0, 1.0).is_err());
        assert!(derive_parameters(0.5, 0.1, 1, 1, -1.0).is_err());
    }

    #[test]
    fn test_budgets_scale_with_epsilon() {
        let a = theoretical_budgets(0.5, 0.2, 1, 2, 1.0).unwrap();
        let b = theoretical_budgets(0.25, 0.2, 1, 2, 1.0).unwrap();
        assert_relative_eq!(b.t_bound, 2.0 * a.t_bound, max_relative = 1e-14);
        let da = derive_parameters(0.5, 0.2, 1, 2, 1.0).unwrap();
        let db = derive_parameters(0.25, 0.2, 1, 2, 1.0).unwrap();
        assert_relative_eq!(db.t_max, 2.0 * da.t_max, max_relative = 1e-14);
    }

    #[test]
    fn test_zero_generator_accepts() {
        let l = Lindbladian::dissipative(JumpOperatorSet::empty(1).unwrap()).unwrap();
        let mut params = DetectionParams::new(0.5, 0.1, 1, 1);
        params.seed = 4;
        let report = run_detection(&l, &params).unwrap();
        assert_eq!(report.verdict, Verdict::Accept);
        assert_eq!(report.rounds_executed as u64, report.r);
        assert!(report.rounds.iter().all(|o| o.p_identity == 1.0));
        assert_eq!(report.query_count, report.m * report.r);
    }

    #[test]
    fn test_strong_dephasing_rejects() {
        let alpha = 0.3536;
        let l = dephasing(alpha);
        for mode in [Mode::SampledPauli, Mode::Averaged] {
            let mut params = DetectionParams::new(0.5, 0.1, 1, 1);
            params.mode = mode;
            params.seed = 11;
            let report = run_detection(&l, &params).unwrap();
            assert_eq!(report.verdict, Verdict::Reject);
            assert_eq!(report.rounds_executed, report.rejecting_round.unwrap() + 1);
            assert!(report.total_evolution_time <= report.r as f64 * report.t_max);
            assert_eq!(report.query_count, report.m * report.rounds_executed as u64);
            assert_relative_eq!(report.l_bound_used, 2.0 * alpha, epsilon = 1e-12);
        }
    }

    #[test]
    fn test_report_is_deterministic() {
        let js = JumpOperatorSet::new(
            2,
            vec![JumpOperator::new(2, None, [(p("XI"), c(0.02, 0.0)), (p("ZI"), c(0.0, 0.01))]).unwrap()],
        )
        .unwrap();
        let h = Hamiltonian::new(2, [(p("ZZ"), 0.3)]).unwrap();
        let l = Lindbladian::new(h, js).unwrap();
        let mut params = DetectionParams::new(0.5, 0.3, 1, 1);
        params.seed = 99;
        params.m_override = Some(20);
        params.r_override = Some(70);
        let a = run_detection(&l, &params).unwrap();
        let b = run_detection(&l, &params).unwrap();
        assert_eq!(a, b);
        assert!(a.m_overridden && a.r_overridden);
    }

    #[test]
    fn test_promise_validation() {
        let js = JumpOperatorSet::new(
            2,
            vec![JumpOperator::new(2, None, [(p("XX"), c(0.2, 0.0))]).unwrap()],
        )
        .unwrap();
        let l = Lindbladian::dissipative(js).unwrap();
        let params = DetectionParams::new(0.5, 0.1, 1, 1);
        assert!(matches!(run_detection(&l, &params), Err(crate::Error::Validation(_))));
    }

    #[test]
    fn test_small_l_bound_is_flagged() {
        let l = dephasing(0.3536);
        let mut params = DetectionParams::new(0.5, 0.1, 1, 1);
        params.l_bound = Some(0.1);
        params.mode = Mode::Averaged;
        let report = run_detection(&l, &params).unwrap();
        assert!(report.l_bound_below_model);
        assert_eq!(report.l_bound_used, 0.1);
    }
}
