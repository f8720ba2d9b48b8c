//! Continuous wavelet transform `W f(s, t) = (1/s) ∫ f(x) conj ψ((x - t)/s) dx`
//! of the attractor, extended by zero outside `[0, 1]`.
//!
//! Two independent routes are provided. [`DirectCwt`] integrates the
//! piecewise-linear interpolant of a sampled grid exactly against the
//! wavelet. [`FourierCwt`] evaluates `(1/2π) ∫₀^∞ f̂(ω) ψ̂(sω) e^{itω} dω`
//! with `f̂` from the factorized series. By Parseval the two agree only
//! when the direct form conjugates `ψ`, which is the default here.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FifError, Result};
use crate::format::fmt_f64;
use crate::grid::FifGrid;
use crate::problem::InterpolationProblem;
use crate::quadrature::{CompensatedSum, PanelRule};
use crate::spectrum::SpectrumEvaluator;
use crate::wavelet::CauchyWavelet;

/// Minimum number of grid cells per unit of scale on the direct path.
pub const SAMPLES_PER_SCALE: f64 = 8.0;

/// Default bound on the wavelet mass ignored outside the direct window.
pub const DEFAULT_WINDOW_TOLERANCE: f64 = 1e-10;

/// Default relative cutoff of `ψ̂(sω)` on the Fourier path.
pub const DEFAULT_HAT_TOLERANCE: f64 = 1e-15;

/// Gauss–Legendre points per panel on the Fourier path.
pub const DEFAULT_PANEL_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CwtMethod {
    Direct,
    Fourier,
}

/// A single-point wavelet transform over the half-plane `s > 0`.
pub trait WaveletTransform: Sync {
    fn method(&self) -> CwtMethod;

    fn transform(&self, scale: f64, translation: f64) -> Result<Complex64>;

    /// All translations at one scale.
    fn transform_row(&self, scale: f64, translations: &[f64]) -> Result<Vec<Complex64>> {
        translations
            .iter()
            .map(|&t| self.transform(scale, t))
            .collect()
    }
}

/// Direct quadrature on a sampled grid.
#[derive(Debug, Clone)]
pub struct DirectCwt<'a> {
    grid: &'a FifGrid,
    wavelet: CauchyWavelet,
    conjugate: bool,
    radius: f64,
}

impl<'a> DirectCwt<'a> {
    pub fn new(grid: &'a FifGrid, wavelet: CauchyWavelet) -> Self {
        Self {
            grid,
            wavelet,
            conjugate: true,
            radius: wavelet.support_radius(DEFAULT_WINDOW_TOLERANCE),
        }
    }

    /// `false` integrates against `ψ` instead of `conj ψ`.
    pub fn with_conjugate(mut self, conjugate: bool) -> Self {
        self.conjugate = conjugate;
        self
    }

    /// Wavelet mass outside the integration window, relative to `sup|f|`.
    pub fn with_window_tolerance(mut self, tol: f64) -> Self {
        self.radius = self.wavelet.support_radius(tol);
        self
    }

    pub fn min_scale(&self) -> f64 {
        SAMPLES_PER_SCALE * self.grid.spacing()
    }

    fn check_scale(&self, scale: f64) -> Result<()> {
        check_direct_scale(scale, self.grid.spacing())
    }
}

fn check_direct_scale(scale: f64, spacing: f64) -> Result<()> {
    let min = SAMPLES_PER_SCALE * spacing;
    if !(scale >= min) || !scale.is_finite() {
        return Err(FifError::Accuracy(format!(
            "scale {scale:e} below the direct-path guard {min:e} ({SAMPLES_PER_SCALE} samples per scale)"
        )));
    }
    Ok(())
}

impl WaveletTransform for DirectCwt<'_> {
    fn method(&self) -> CwtMethod {
        CwtMethod::Direct
    }

    fn transform(&self, scale: f64, translation: f64) -> Result<Complex64> {
        self.check_scale(scale)?;
        if !translation.is_finite() {
            return Err(FifError::Domain("translation must be finite".into()));
        }
        let w = pl_transform(
            self.grid.values(),
            0.0,
            self.grid.spacing(),
            &self.wavelet,
            scale,
            translation,
            self.radius,
        );
        Ok(if self.conjugate { w } else { w.conj() })
    }

    fn transform_row(&self, scale: f64, translations: &[f64]) -> Result<Vec<Complex64>> {
        translations
            .par_iter()
            .map(|&t| self.transform(scale, t))
            .collect()
    }
}

/// `(1/s) ∫ P(x) conj ψ((x - t)/s) dx` where `P` interpolates `values`
/// linearly on nodes `x0 + i h` and vanishes outside them. Only nodes with
/// `|x - t| ≤ radius · s` contribute.
fn pl_transform(
    values: &[f64],
    x0: f64,
    h: f64,
    wavelet: &CauchyWavelet,
    scale: f64,
    translation: f64,
    radius: f64,
) -> Complex64 {
    let cells = values.len().saturating_sub(1);
    if cells == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let lo = ((translation - radius * scale - x0) / h).floor();
    let hi = ((translation + radius * scale - x0) / h).ceil();
    if hi < 0.0 || lo > cells as f64 {
        return Complex64::new(0.0, 0.0);
    }
    let lo = lo.max(0.0) as usize;
    let hi = (hi as usize).min(cells);
    if lo >= hi {
        return Complex64::new(0.0, 0.0);
    }
    let dy = h / scale;
    let y_at = |i: usize| (x0 + i as f64 * h - translation) / scale;
    let mut sum = CompensatedSum::default();
    let mut y_prev = y_at(lo);
    let mut prev = wavelet.conj_antiderivatives(y_prev);
    for i in lo..hi {
        let y_next = y_at(i + 1);
        let next = wavelet.conj_antiderivatives(y_next);
        let (fa, fb) = (values[i], values[i + 1]);
        if fa != 0.0 || fb != 0.0 {
            let d0 = next.0 - prev.0;
            let d1 = next.1 - prev.1;
            let slope = (fb - fa) / dy;
            // ∫ (fa + slope (y - y_prev)) conj ψ(y) dy over the cell
            sum.add(d0 * fa + (d1 - d0 * y_prev) * slope);
        }
        y_prev = y_next;
        prev = next;
    }
    sum.value()
}

/// Fourier-domain quadrature with the truncated series for `f̂`.
#[derive(Debug, Clone)]
pub struct FourierCwt<'a> {
    spectrum: &'a SpectrumEvaluator,
    wavelet: CauchyWavelet,
    rule: PanelRule,
    hat_tolerance: f64,
}

impl<'a> FourierCwt<'a> {
    pub fn new(spectrum: &'a SpectrumEvaluator, wavelet: CauchyWavelet) -> Self {
        Self {
            spectrum,
            wavelet,
            rule: PanelRule::new(DEFAULT_PANEL_POINTS),
            hat_tolerance: DEFAULT_HAT_TOLERANCE,
        }
    }

    pub fn with_panel_points(mut self, points: usize) -> Self {
        self.rule = PanelRule::new(points);
        self
    }

    pub fn with_hat_tolerance(mut self, tol: f64) -> Self {
        self.hat_tolerance = tol;
        self
    }

    /// Quadrature nodes `ω` with weights `w · f̂(ω) ψ̂(sω) / 2π` on
    /// `(0, ω_max]`. Panel width follows the fastest phase
    /// `e^{iω(t - x)}` for `x ∈ [0, 1]` and the envelope width `1/s`.
    fn weighted_nodes(&self, scale: f64, max_phase_rate: f64) -> Vec<(f64, Complex64)> {
        let omega_max = self.wavelet.hat_cutoff(self.hat_tolerance) / scale;
        let width = (1.0 / max_phase_rate.max(1.0)).min(1.0 / scale);
        let panels = (omega_max / width).ceil().max(1.0) as usize;
        let width = omega_max / panels as f64;
        let norm = 1.0 / (2.0 * std::f64::consts::PI);
        (0..panels)
            .into_par_iter()
            .flat_map_iter(|p| {
                let lo = p as f64 * width;
                let hi = lo + width;
                self.rule
                    .mapped(lo, hi)
                    .map(|(om, w)| {
                        let value = self.spectrum.series(om).value;
                        (om, value * (w * self.wavelet.hat(scale * om) * norm))
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

fn max_phase_rate(translations: &[f64]) -> f64 {
    translations
        .iter()
        .fold(1.0_f64, |m, &t| m.max(t.abs()).max((t - 1.0).abs()))
}

impl WaveletTransform for FourierCwt<'_> {
    fn method(&self) -> CwtMethod {
        CwtMethod::Fourier
    }

    fn transform(&self, scale: f64, translation: f64) -> Result<Complex64> {
        Ok(self.transform_row(scale, &[translation])?[0])
    }

    fn transform_row(&self, scale: f64, translations: &[f64]) -> Result<Vec<Complex64>> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(FifError::Domain(format!("scale must be positive, got {scale}")));
        }
        if translations.iter().any(|t| !t.is_finite()) {
            return Err(FifError::Domain("translation must be finite".into()));
        }
        let nodes = self.weighted_nodes(scale, max_phase_rate(translations));
        Ok(translations
            .par_iter()
            .map(|&t| {
                let mut sum = CompensatedSum::default();
                for &(om, v) in &nodes {
                    sum.add(v * Complex64::from_polar(1.0, t * om));
                }
                sum.value()
            })
            .collect())
    }
}

/// `W f(s, t)` by direct quadrature on `grid`.
pub fn cwt_direct(grid: &FifGrid, wavelet: CauchyWavelet, scale: f64, translation: f64) -> Result<Complex64> {
    DirectCwt::new(grid, wavelet).transform(scale, translation)
}

/// `W f(s, t)` through the Fourier transform.
pub fn cwt_fourier(
    spectrum: &SpectrumEvaluator,
    wavelet: CauchyWavelet,
    scale: f64,
    translation: f64,
) -> Result<Complex64> {
    FourierCwt::new(spectrum, wavelet).transform(scale, translation)
}

/// `W(q_k ∘ L_k⁻¹)(s, t)`: the transform of `x ↦ q_k(N x - (k-1))` on
/// `I_k`, zero elsewhere, sampled on the level-`level` grid.
pub fn cwt_q_piece(
    problem: &InterpolationProblem,
    piece: usize,
    wavelet: CauchyWavelet,
    level: u32,
    scale: f64,
    translation: f64,
) -> Result<Complex64> {
    if piece == 0 || piece > problem.n || problem.q.len() != problem.n {
        return Err(FifError::Domain(format!("piece index {piece} outside 1..={}", problem.n)));
    }
    if level == 0 {
        return Err(FifError::Domain("piece transform needs level ≥ 1".into()));
    }
    let n = problem.n;
    let cells = n
        .checked_pow(level)
        .filter(|c| *c < crate::grid::MAX_GRID_POINTS)
        .ok_or_else(|| FifError::Resource(format!("level {level} too fine for N = {n}")))?;
    let h = 1.0 / cells as f64;
    check_direct_scale(scale, h)?;
    let piece_cells = cells / n;
    let q = &problem.q[piece - 1];
    let values: Vec<f64> = (0..=piece_cells)
        .map(|i| q.eval(i as f64 / piece_cells as f64))
        .collect();
    let x0 = (piece - 1) as f64 / n as f64;
    let radius = wavelet.support_radius(DEFAULT_WINDOW_TOLERANCE);
    Ok(pl_transform(&values, x0, h, &wavelet, scale, translation, radius))
}

/// `|W f(s,t) - Σ_k [γ_k W f(Ns, Nt - (k-1)) + W(q_k ∘ L_k⁻¹)(s,t)]|`,
/// all terms by direct quadrature on `grid`.
pub fn recursion_residual(
    grid: &FifGrid,
    problem: &InterpolationProblem,
    wavelet: CauchyWavelet,
    scale: f64,
    translation: f64,
) -> Result<f64> {
    if grid.n() != problem.n {
        return Err(FifError::Domain("grid and problem disagree on N".into()));
    }
    let direct = DirectCwt::new(grid, wavelet);
    let lhs = direct.transform(scale, translation)?;
    let n = problem.n as f64;
    let mut rhs = CompensatedSum::default();
    for k in 1..=problem.n {
        let coarse = direct.transform(n * scale, n * translation - (k - 1) as f64)?;
        rhs.add(coarse * problem.gamma[k - 1]);
        rhs.add(cwt_q_piece(problem, k, wavelet, grid.level(), scale, translation)?);
    }
    Ok((lhs - rhs.value()).norm())
}

/// Scales `2^{-ℓ}` for `ℓ = first..=last`, strictly decreasing.
pub fn dyadic_scales(first: i32, last: i32) -> Vec<f64> {
    (first..=last).map(|l| 2f64.powi(-l)).collect()
}

/// `count` equally spaced translations covering `[0, 1]`.
pub fn uniform_translations(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5],
        _ => (0..count).map(|i| i as f64 / (count - 1) as f64).collect(),
    }
}

/// Transform values on a scale × translation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalogramGrid {
    pub method: CwtMethod,
    pub scales: Vec<f64>,
    pub translations: Vec<f64>,
    /// `values[i][j]` is `W f(scales[i], translations[j])`.
    pub values: Vec<Vec<Complex64>>,
}

impl ScalogramGrid {
    /// `(s, max_t |W(s, t)|)` for every scale.
    pub fn per_scale_max(&self) -> Vec<(f64, f64)> {
        self.scales
            .iter()
            .zip(&self.values)
            .map(|(&s, row)| (s, row.iter().fold(0.0_f64, |m, w| m.max(w.norm()))))
            .collect()
    }

    /// Largest `|a - b| / |b|` over all cells; cells where both vanish count
    /// as zero.
    pub fn max_relative_deviation(&self, reference: &ScalogramGrid) -> Result<f64> {
        if self.scales != reference.scales || self.translations != reference.translations {
            return Err(FifError::Domain("scalograms cover different grids".into()));
        }
        let mut worst = 0.0_f64;
        for (ra, rb) in self.values.iter().zip(&reference.values) {
            for (a, b) in ra.iter().zip(rb) {
                let diff = (a - b).norm();
                if diff == 0.0 {
                    continue;
                }
                worst = worst.max(diff / b.norm());
            }
        }
        Ok(worst)
    }

    /// CSV with header `s,t,re,im,abs`, scale-major.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "s,t,re,im,abs")?;
        for (s, row) in self.scales.iter().zip(&self.values) {
            for (t, w) in self.translations.iter().zip(row) {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_f64(*s),
                    fmt_f64(*t),
                    fmt_f64(w.re),
                    fmt_f64(w.im),
                    fmt_f64(w.norm())
                )?;
            }
        }
        Ok(())
    }
}

/// Evaluates `engine` on every `(scale, translation)` pair. Scales must be
/// positive and strictly decreasing.
pub fn scalogram(
    engine: &dyn WaveletTransform,
    scales: &[f64],
    translations: &[f64],
) -> Result<ScalogramGrid> {
    if scales.iter().any(|s| !(*s > 0.0)) {
        return Err(FifError::Domain("scales must be positive".into()));
    }
    if scales.windows(2).any(|w| w[1] >= w[0]) {
        return Err(FifError::Domain("scales must be strictly decreasing".into()));
    }
    let values = scales
        .iter()
        .map(|&s| engine.transform_row(s, translations))
        .collect::<Result<Vec<_>>>()?;
    if values.iter().flatten().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
        return Err(FifError::Accuracy("non-finite transform value".into()));
    }
    Ok(ScalogramGrid {
        method: engine.method(),
        scales: scales.to_vec(),
        translations: translations.to_vec(),
        values,
    })
}
