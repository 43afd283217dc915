use lindcert::bell::{self, Mode, RoundSimulator};
use lindcert::detector::{self, DetectionParams};
use lindcert::linalg;
use lindcert::model::{self, DiagonalDissipator, Lindbladian};
use lindcert::pauli::{enumerate_all, sample_uniform};
use lindcert::superop::SuperOperator;
use lindcert::{oracle, random, twirl};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_model(seed: u64, n_max: usize) -> Lindbladian {
    let mut r = rng(seed);
    let n = r.random_range(1..=n_max);
    random::random_lindbladian(n, n.min(2), 2, &mut r).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn alpha_structure_holds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=4);
        let js = random::random_jump_set(n, n.min(3), 2, 4, &mut r).unwrap();
        let result = oracle::check_alpha_structure_on(&js).unwrap();
        prop_assert!(result.passed, "{:?}", result.failures);
    }

    #[test]
    fn norm_comparison_holds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=3);
        let js = random::random_jump_set(n, n.min(2), 2, 3, &mut r).unwrap();
        let result = oracle::check_norm_comparison_on(&js).unwrap();
        prop_assert!(result.passed, "{:?}", result.failures);
    }

    #[test]
    fn diagonal_eigenvalues_match_dense_spectrum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=3);
        let d = random::random_diagonal_dissipator(n, 2.min(n), 5, &mut r).unwrap();
        let mut formula: Vec<f64> = enumerate_all(n)
            .unwrap()
            .iter()
            .map(|q| model::diagonal_eigenvalue(&d, q).unwrap())
            .collect();
        let realized = SuperOperator::from_lindbladian(&d.to_lindbladian().unwrap()).unwrap();
        let mut dense: Vec<f64> = realized.eigenvalues().unwrap().iter().map(|z| z.re).collect();
        formula.sort_by(f64::total_cmp);
        dense.sort_by(f64::total_cmp);
        for (a, b) in formula.iter().zip(&dense) {
            prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn identity_fraction_is_stable(seed in any::<u64>(), t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let a = SuperOperator::from_lindbladian(&random_model(seed, 2)).unwrap().exp(t1).unwrap();
        let b = SuperOperator::from_lindbladian(&random_model(seed ^ 1, 2))
            .map(|g| g.exp(t2).unwrap());
        let b = match b {
            Ok(b) if b.num_qubits() == a.num_qubits() => b,
            _ => SuperOperator::identity(a.num_qubits()).unwrap(),
        };
        let gap = (a.identity_fraction().unwrap() - b.identity_fraction().unwrap()).abs();
        let bounds = a.sub(&b).unwrap().diamond_bounds().unwrap();
        prop_assert!(gap <= 0.5 * bounds.upper + 1e-12);
        prop_assert!(gap <= 0.5 * bounds.lower + 1e-12);
    }

    #[test]
    fn pauli_sandwiches_are_orthogonal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=2);
        let terms: Vec<_> = (0..4)
            .map(|_| {
                let p = sample_uniform(n, &mut r).unwrap();
                let q = sample_uniform(n, &mut r).unwrap();
                (p, q, random::complex_gaussian(&mut r))
            })
            .collect();
        let mut table = std::collections::BTreeMap::new();
        for (p, q, a) in &terms {
            *table.entry((*p, *q)).or_insert(linalg::c(0.0, 0.0)) += *a;
        }
        let mats: Vec<_> = table
            .iter()
            .map(|((p, q), a)| (p.matrix().unwrap(), q.matrix().unwrap(), *a))
            .collect();
        let s = SuperOperator::from_map(n, |x| {
            let mut acc = linalg::zeros(x.nrows());
            for (p, q, a) in &mats {
                acc += linalg::scale(&(p * x * q), *a);
            }
            acc
        })
        .unwrap();
        let expected: f64 = table.values().map(|a| a.norm_sqr()).sum();
        let got = s.frobenius_normalized().powi(2);
        prop_assert!((got - expected).abs() <= 1e-9 * expected.max(1.0), "{got} vs {expected}");
    }

    #[test]
    fn exponential_methods_agree(seed in any::<u64>(), t in 0.0f64..3.0) {
        let g = SuperOperator::from_lindbladian(&random_model(seed, 3)).unwrap();
        let a = g.exp(t).unwrap();
        if let Ok(b) = g.exp_eigen(t) {
            let scale = linalg::max_abs(a.matrix()).max(1.0);
            prop_assert!(linalg::max_abs_diff(a.matrix(), b.matrix()) <= 1e-9 * scale);
        }
        prop_assert!(a.spectral_radius().unwrap() <= 1.0 + 1e-9);
        prop_assert!(a.check_cptp().is_ok());
    }

    #[test]
    fn twirl_keeps_identity_fraction(seed in any::<u64>(), t in 0.0f64..3.0) {
        let s = SuperOperator::from_lindbladian(&random_model(seed, 2)).unwrap().exp(t).unwrap();
        let tw = twirl::twirl_exact(&s);
        prop_assert_eq!(tw.identity_fraction().unwrap(), s.identity_fraction().unwrap());
    }

    #[test]
    fn trotterized_twirl_is_a_channel(seed in any::<u64>(), t in 0.0f64..2.0, m in 1u64..64) {
        let l = random_model(seed, 2);
        let s = twirl::trotterized_twirled(&l, t / m as f64, m).unwrap();
        prop_assert!(s.check_cptp().is_ok());
        let exact = twirl::twirled_generator_matrix(&l).unwrap().exp(t).unwrap();
        let gap = (s.identity_fraction().unwrap() - exact.identity_fraction().unwrap()).abs();
        prop_assert!(gap <= 0.5 * twirl::trotter_error_bound(&l, t / m as f64, m).unwrap() + 1e-12);
    }

    #[test]
    fn bell_identity_entry_is_identity_fraction(seed in any::<u64>(), t in 0.0f64..3.0) {
        let s = SuperOperator::from_lindbladian(&random_model(seed, 3)).unwrap().exp(t).unwrap();
        let q = bell::bell_distribution(&s).unwrap();
        prop_assert!((q[0] - s.identity_fraction().unwrap()).abs() <= 1e-10);
        prop_assert!((q.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        prop_assert!(q.iter().all(|p| *p >= -1e-10));
    }

    #[test]
    fn sampled_slices_compose_to_channels(seed in any::<u64>(), tau in 0.0f64..0.5) {
        let l = random_model(seed, 2);
        let sim = RoundSimulator::new(&l).unwrap();
        let mut r = rng(seed);
        let frames: Vec<_> = (0..5).map(|_| sample_uniform(l.num_qubits(), &mut r).unwrap()).collect();
        let s = sim.sampled_composition(tau, &frames).unwrap();
        prop_assert!(s.check_cptp().is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn detection_is_deterministic(seed in any::<u64>(), sampled in any::<bool>()) {
        let l = random_model(seed, 2);
        let mut params = DetectionParams::new(0.5, 0.1, 2, 2);
        params.seed = seed;
        params.mode = if sampled { Mode::SampledPauli } else { Mode::Averaged };
        params.m_override = Some(16);
        params.r_override = Some(40);
        let a = detector::run_detection(&l, &params).unwrap();
        let b = detector::run_detection(&l, &params).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.query_count, a.m * a.rounds_executed as u64);
        prop_assert_eq!(a.rounds.len(), a.rounds_executed);
        prop_assert!(a.rounds_executed as u64 <= a.r);
    }
}

#[test]
fn sampled_frames_average_to_the_twirled_channel() {
    let l = DiagonalDissipator::new(1, [("Z".parse().unwrap(), 0.3)])
        .unwrap()
        .to_lindbladian()
        .unwrap();
    let h = model::Hamiltonian::new(1, [("X".parse().unwrap(), 0.8)]).unwrap();
    let l = Lindbladian::new(h, l.dissipator().clone()).unwrap();
    let sim = RoundSimulator::new(&l).unwrap();
    let (t, m) = (1.5, 4u64);
    let target = twirl::trotterized_twirled(&l, t / m as f64, m).unwrap().identity_fraction().unwrap();
    let mut r = rng(99);
    let samples: Vec<f64> = (0..1000)
        .map(|_| {
            let frames: Vec<_> = (0..m).map(|_| sample_uniform(1, &mut r).unwrap()).collect();
            sim.identity_probability(t, m, Mode::SampledPauli, &frames).unwrap()
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
    let se = (var / samples.len() as f64).sqrt();
    assert!((mean - target).abs() <= 3.0 * se.max(1e-12), "{mean} vs {target} (se {se})");
}
