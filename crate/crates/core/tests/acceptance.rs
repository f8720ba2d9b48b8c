use std::io::Write;

use fif_core::acceptance::{self, CriterionResult};

// Written to the raw handle so the line shows up without --nocapture.
fn report(result: CriterionResult) {
    let mut text = format!("{}\n", result.line());
    for note in &result.notes {
        text.push_str(&format!("       {note}\n"));
    }
    let _ = std::io::stderr().lock().write_all(text.as_bytes());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn criterion_01_functional_equation() {
    report(acceptance::functional_equation());
}

#[test]
fn criterion_02_fourier_factorization() {
    report(acceptance::fourier_factorization());
}

#[test]
fn criterion_03_series_vs_quadrature() {
    report(acceptance::series_vs_quadrature());
}

#[test]
fn criterion_04_wavelet_pair() {
    report(acceptance::wavelet_pair());
}

#[test]
fn criterion_05_dual_path() {
    report(acceptance::dual_path());
}

#[test]
fn criterion_06_recursion_identity() {
    report(acceptance::recursion_identity());
}

#[test]
fn criterion_07_lipschitz_bound() {
    report(acceptance::lipschitz_bound());
}

#[test]
fn criterion_08_o_of_s() {
    report(acceptance::o_of_s());
}

#[test]
fn criterion_09_fractal_exponent() {
    report(acceptance::fractal_exponent());
}

#[test]
fn criterion_10_split_asymptotics() {
    report(acceptance::split_asymptotics());
}
