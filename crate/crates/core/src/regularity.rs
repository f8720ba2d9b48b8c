//! Decay constants, bound checks and log–log exponent fits on scalograms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cwt::{CwtMethod, ScalogramGrid};
use crate::error::{FifError, Result};
use crate::grid::FifGrid;
use crate::problem::InterpolationProblem;
use crate::quadrature::PanelRule;
use crate::wavelet::{factorial, CauchyWavelet};

/// Relative slack allowed over `bound_C · s^δ`.
pub const LIP_BOUND_SLACK: f64 = 0.05;

/// Required excess of the fitted slope over 1 for the `o(s)` check.
pub const O_OF_S_MARGIN: f64 = 0.05;

/// Number of finest scales entering the asymptotic fit.
pub const FIT_WINDOW: usize = 6;

/// Largest slope change tolerated when one end scale is dropped.
pub const WINDOW_STABILITY_TOLERANCE: f64 = 0.05;

/// Default dyadic scale window `2^{-3} … 2^{-10}`.
pub const DEFAULT_SCALE_EXPONENTS: (i32, i32) = (3, 10);

/// Translations used for `max_t |W(s, t)|`.
pub const DEFAULT_TRANSLATIONS: usize = 257;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub fixture_hash: String,
    pub scale_window: Vec<f64>,
    pub translations: usize,
    pub wavelet_order: u32,
    pub method: CwtMethod,
    pub grid_level: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub delta: f64,
    /// `max_k sup |q_k'|` on a 1025-point grid.
    #[serde(rename = "K")]
    pub k: f64,
    /// `max_k Σ r |c_{k,r}|`, never below the true supremum.
    #[serde(rename = "K_cert")]
    pub k_cert: f64,
    #[serde(rename = "K_star")]
    pub k_star: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    /// `N Ω`; the bound is finite iff this is below 1.
    pub contraction: f64,
    /// `N K* / (1 - N Ω)`, absent when `N Ω ≥ 1`.
    #[serde(rename = "bound_C")]
    pub bound_c: Option<f64>,
    pub bound_finite: bool,
    /// `|γ_k| < 1/N^{δ+1}` for every `k`.
    pub hypothesis_ok: bool,
    /// `|γ_k| < 1/N^{m+1}` and `M - 1 > m`; `None` until a wavelet is known.
    pub o_of_s_hypothesis_ok: Option<bool>,
    pub fitted_exponent: Option<f64>,
    pub fit_residual: Option<f64>,
    pub window_stability: Option<f64>,
    pub per_scale_max: Vec<(f64, f64)>,
    pub lip_bound_ok: Option<bool>,
    pub lip_worst_ratio: Option<f64>,
    pub provenance: Option<Provenance>,
}

impl RegularityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Constants of the Lipschitz-order decay bound for `problem` at order `δ`.
pub fn constants(problem: &InterpolationProblem, delta: f64) -> Result<RegularityReport> {
    problem.ensure_valid()?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(FifError::Domain(format!("delta must lie in (0, 1], got {delta}")));
    }
    let n = problem.n as f64;
    let k = problem.q.iter().map(|q| q.lipschitz_grid()).fold(0.0, f64::max);
    let k_cert = problem
        .q
        .iter()
        .map(|q| q.lipschitz_certificate())
        .fold(0.0, f64::max);
    let scale = n.powf(delta);
    let k_star = k * scale;
    let omega = scale * problem.gamma_max();
    let contraction = n * omega;
    let bound_finite = contraction < 1.0;
    let bound_c = bound_finite.then(|| n * k_star / (1.0 - contraction));
    let limit = n.powf(-(delta + 1.0));
    let hypothesis_ok = problem.gamma.iter().all(|g| g.abs() < limit);
    Ok(RegularityReport {
        delta,
        k,
        k_cert,
        k_star,
        omega,
        contraction,
        bound_c,
        bound_finite,
        hypothesis_ok,
        o_of_s_hypothesis_ok: None,
        fitted_exponent: None,
        fit_residual: None,
        window_stability: None,
        per_scale_max: Vec::new(),
        lip_bound_ok: None,
        lip_worst_ratio: None,
        provenance: None,
    })
}

/// `|γ_k| < 1/N^{m+1}` with `m` the largest polynomial degree, and `M - 1 > m`.
pub fn o_of_s_hypothesis(problem: &InterpolationProblem, wavelet: &CauchyWavelet) -> bool {
    let m = problem.max_degree();
    let limit = (problem.n as f64).powi(-(m as i32 + 1));
    problem.gamma.iter().all(|g| g.abs() < limit) && wavelet.order() as usize > m + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub ok: bool,
    pub worst_ratio: f64,
}

/// Largest `|W(s,t)| / (bound_C s^δ)` over the scalogram; ok when it stays
/// within `1 + LIP_BOUND_SLACK`.
pub fn verify_lip_bound(report: &RegularityReport, scalogram: &ScalogramGrid) -> Result<BoundCheck> {
    let c = match (report.hypothesis_ok, report.bound_c) {
        (true, Some(c)) => c,
        _ => {
            return Err(FifError::Precondition(format!(
                "decay bound needs |γ_k| < N^-(δ+1); N Ω = {}",
                report.contraction
            )))
        }
    };
    let mut worst = 0.0_f64;
    for (&s, row) in scalogram.scales.iter().zip(&scalogram.values) {
        let bound = c * s.powf(report.delta);
        for w in row {
            worst = worst.max(w.norm() / bound);
        }
    }
    Ok(BoundCheck {
        ok: worst <= 1.0 + LIP_BOUND_SLACK,
        worst_ratio: worst,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the residuals in `log₂` units.
    pub residual: f64,
}

/// Least-squares line through `(log₂ s, log₂ v)`.
pub fn fit_decay_exponent(per_scale_max: &[(f64, f64)]) -> Result<DecayFit> {
    if per_scale_max.len() < 3 {
        return Err(FifError::Domain(format!(
            "exponent fit needs at least 3 scales, got {}",
            per_scale_max.len()
        )));
    }
    if let Some(&(s, v)) = per_scale_max.iter().find(|(s, v)| !(*s > 0.0 && *v > 0.0)) {
        return Err(FifError::Domain(format!("nonpositive entry ({s}, {v}) in exponent fit")));
    }
    let pts: Vec<(f64, f64)> = per_scale_max.iter().map(|&(s, v)| (s.log2(), v.log2())).collect();
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FifError::Domain("exponent fit needs distinct scales".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(DecayFit {
        slope,
        intercept,
        residual: (ss / len).sqrt(),
    })
}

/// The `count` smallest scales, coarse to fine.
pub fn finest(per_scale_max: &[(f64, f64)], count: usize) -> Vec<(f64, f64)> {
    let mut v = per_scale_max.to_vec();
    v.sort_by(|a, b| b.0.total_cmp(&a.0));
    let skip = v.len().saturating_sub(count);
    v.split_off(skip)
}

/// Largest slope change when the coarsest or the finest scale is dropped.
pub fn window_stability(per_scale_max: &[(f64, f64)]) -> Result<f64> {
    if per_scale_max.len() < 4 {
        return Err(FifError::Domain("stability check needs at least 4 scales".into()));
    }
    let mut v = per_scale_max.to_vec();
    v.sort_by(|a, b| b.0.total_cmp(&a.0));
    let all = fit_decay_exponent(&v)?.slope;
    let no_coarse = fit_decay_exponent(&v[1..])?.slope;
    let no_fine = fit_decay_exponent(&v[..v.len() - 1])?.slope;
    Ok((all - no_coarse).abs().max((all - no_fine).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCheck {
    pub ok: bool,
    /// `None` when the transform vanishes identically.
    pub slope: Option<f64>,
    pub residual: Option<f64>,
    /// `M - m`, reported for comparison only.
    pub nominal_regularity: i64,
}

/// Faster-than-linear decay of `max_t |W(s, ·)|` over the finest
/// [`FIT_WINDOW`] scales.
pub fn verify_o_of_s(
    problem: &InterpolationProblem,
    scalogram: &ScalogramGrid,
    wavelet: &CauchyWavelet,
) -> Result<DecayCheck> {
    if !o_of_s_hypothesis(problem, wavelet) {
        return Err(FifError::Precondition(format!(
            "o(s) check needs |γ_k| < N^-(m+1) and M - 1 > m (m = {}, M = {})",
            problem.max_degree(),
            wavelet.order()
        )));
    }
    let nominal_regularity = wavelet.order() as i64 - problem.max_degree() as i64;
    let maxima = finest(&scalogram.per_scale_max(), FIT_WINDOW);
    if maxima.iter().all(|(_, v)| *v == 0.0) {
        return Ok(DecayCheck {
            ok: true,
            slope: None,
            residual: None,
            nominal_regularity,
        });
    }
    let fit = fit_decay_exponent(&maxima)?;
    Ok(DecayCheck {
        ok: fit.slope > 1.0 + O_OF_S_MARGIN,
        slope: Some(fit.slope),
        residual: Some(fit.residual),
        nominal_regularity,
    })
}

/// Fills the scalogram-derived fields of `report`.
pub fn annotate(
    report: &mut RegularityReport,
    problem: &InterpolationProblem,
    scalogram: &ScalogramGrid,
    wavelet: &CauchyWavelet,
    grid_level: Option<u32>,
) {
    report.per_scale_max = scalogram.per_scale_max();
    report.o_of_s_hypothesis_ok = Some(o_of_s_hypothesis(problem, wavelet));
    let window = finest(&report.per_scale_max, FIT_WINDOW);
    if let Ok(fit) = fit_decay_exponent(&window) {
        report.fitted_exponent = Some(fit.slope);
        report.fit_residual = Some(fit.residual);
    }
    report.window_stability = window_stability(&window).ok();
    if let Ok(check) = verify_lip_bound(report, scalogram) {
        report.lip_bound_ok = Some(check.ok);
        report.lip_worst_ratio = Some(check.worst_ratio);
    }
    report.provenance = Some(Provenance {
        fixture_hash: problem.fingerprint(),
        scale_window: scalogram.scales.clone(),
        translations: scalogram.translations.len(),
        wavelet_order: wavelet.order(),
        method: scalogram.method,
        grid_level,
    });
}

/// Hölder exponent from `max_x |f(x + h) - f(x)|` at `h = N^{-j}`, fitted
/// over `levels`, computed straight from grid samples.
pub fn oscillation_exponent(grid: &FifGrid, levels: std::ops::RangeInclusive<u32>) -> Result<DecayFit> {
    let n = grid.n();
    let mut pts = Vec::new();
    for j in levels {
        if j > grid.level() {
            return Err(FifError::Domain(format!(
                "oscillation level {j} finer than grid level {}",
                grid.level()
            )));
        }
        let lag = n.pow(grid.level() - j);
        pts.push(((n as f64).powi(-(j as i32)), grid.oscillation(lag)));
    }
    fit_decay_exponent(&pts)
}

fn check_split(order: u32, p: u32, s: f64) -> Result<()> {
    if p == 0 || p > order {
        return Err(FifError::Domain(format!("need 1 ≤ p ≤ M, got p = {p}, M = {order}")));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(FifError::Domain(format!("scale must be positive, got {s}")));
    }
    Ok(())
}

/// `γ(a, x) = ∫₀^x u^{a-1} e^{-u} du` for integer `a ≥ 1`, by its power series.
pub fn lower_incomplete_gamma(a: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x > a as f64 + 1.0 {
        return factorial(a - 1) - upper_incomplete_gamma(a, x);
    }
    let mut term = 1.0 / a as f64;
    let mut sum = term;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        term *= x / (a as f64 + k);
        sum += term;
        k += 1.0;
    }
    x.powi(a as i32) * (-x).exp() * sum
}

/// `Γ(a, x) = (a-1)! e^{-x} Σ_{k<a} x^k/k!` for integer `a ≥ 1`.
pub fn upper_incomplete_gamma(a: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..a {
        term *= x / k as f64;
        sum += term;
    }
    factorial(a - 1) * (-x).exp() * sum
}

/// `s^M ∫₀^s ω^{M-p} e^{-sω} dω = s^{p-1} γ(M-p+1, s²)`.
pub fn split_low(order: u32, p: u32, s: f64) -> Result<f64> {
    check_split(order, p, s)?;
    Ok(s.powi(p as i32 - 1) * lower_incomplete_gamma(order - p + 1, s * s))
}

/// `s^M ∫_s^∞ ω^{M-p} e^{-sω} dω = s^{p-1} Γ(M-p+1, s²)`.
pub fn split_high(order: u32, p: u32, s: f64) -> Result<f64> {
    check_split(order, p, s)?;
    Ok(s.powi(p as i32 - 1) * upper_incomplete_gamma(order - p + 1, s * s))
}

/// `s^{p-1} (M-p)!`, the sum of both parts.
pub fn split_total(order: u32, p: u32, s: f64) -> Result<f64> {
    check_split(order, p, s)?;
    Ok(s.powi(p as i32 - 1) * factorial(order - p))
}

/// [`split_high`] by Gauss–Legendre panels over `[s, ω_end]`, where the
/// integrand has dropped below `1e-18` of its peak.
pub fn split_high_quadrature(order: u32, p: u32, s: f64) -> Result<f64> {
    check_split(order, p, s)?;
    let a = (order - p) as i32;
    let f = |om: f64| om.powi(a) * (-s * om).exp();
    // e^{-sω} ω^a is below 1e-18 · peak beyond ω ≈ (a + 45)/s
    let end = s.max((a as f64 + 45.0) / s * 2.0);
    let panels = ((end - s) * s).ceil().max(16.0) as usize * 4;
    let rule = PanelRule::new(16);
    let v = rule.integrate(s, end, panels, |om| Complex64::new(f(om), 0.0)).re;
    Ok(s.powi(order as i32) * v)
}
