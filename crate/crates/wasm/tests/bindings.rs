use lindcert_wasm::{bell_outcomes, curve_rows, spectrum_pairs};

const DEPOLARIZING: &str = r#"
n = 1
[[jumps]]
terms = [{ pauli = "X", re = 0.5, im = 0.0 }]
[[jumps]]
terms = [{ pauli = "Y", re = 0.5, im = 0.0 }]
[[jumps]]
terms = [{ pauli = "Z", re = 0.5, im = 0.0 }]
"#;

#[test]
fn depolarizing_curve_and_spectrum() {
    let rows = curve_rows(DEPOLARIZING, 5.0, 100).unwrap();
    for row in rows.chunks(4) {
        let expected = (1.0 + 3.0 * (-row[0]).exp()) / 4.0;
        assert!((row[1] - expected).abs() <= 1e-9);
        assert!((row[2] - expected).abs() <= 1e-9);
    }
    let eigs = spectrum_pairs(DEPOLARIZING).unwrap();
    let re: Vec<f64> = eigs.chunks(2).map(|p| p[0]).collect();
    assert!(re[0].abs() < 1e-12);
    assert!(re[1..].iter().all(|r| (r + 1.0).abs() < 1e-12));
}

#[test]
fn bell_outcomes_of_two_qubits() {
    let cfg = "n = 2\n[[hamiltonian]]\npauli = \"XX\"\ncoeff = 0.3\n[[jumps]]\nterms = [{ pauli = \"ZI\", re = 0.4 }]\n";
    let (labels, q) = bell_outcomes(cfg, 1.2).unwrap();
    assert_eq!(labels.len(), 16);
    assert_eq!(labels[0], "II");
    assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(q.iter().all(|p| *p >= -1e-12));
}

#[test]
fn invalid_configs_are_errors() {
    assert!(curve_rows("n = 0\n", 1.0, 3).is_err());
    assert!(curve_rows(DEPOLARIZING, 1.0, 1).is_err());
    assert!(spectrum_pairs("n = \"x\"").is_err());
}
