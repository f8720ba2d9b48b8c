//! Fourier transform `f̂(ω) = ∫₀¹ f(x) e^{-iωx} dx` of the attractor.
//!
//! Unrolling `f̂(ω) = (1/N) Σ_k e^{-iω(k-1)/N} (γ_k f̂(ω/N) + ∫₀¹ q_k(x) e^{-iωx/N} dx)`
//! gives a series over levels `j` whose `N^j` tuple terms separate into
//!
//! ```text
//! term_j = N^{-j} · Π_{i<j} G_i(ω) · Σ_k e^{-iω(k-1)/N^j} Q_k(ω/N^j),
//! G_i(ω) = Σ_k γ_k e^{-iω(k-1)/N^i},   Q_k(u) = ∫₀¹ q_k(x) e^{-iux} dx.
//! ```
//!
//! The literal tuple enumeration is kept as [`SpectrumEvaluator::series_bruteforce`]
//! to check the factorization, and [`ft_quadrature`] integrates sampled
//! grids directly as an independent oracle.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FifError, Result};
use crate::format::fmt_f64;
use crate::grid::FifGrid;
use crate::poly::power_moments;
use crate::problem::InterpolationProblem;
use crate::quadrature::CompensatedSum;

/// Frequencies below this use the regular series instead of the closed
/// forms, which carry negative powers of `ω`.
pub const DEFAULT_OMEGA_MIN: f64 = 1e-6;

/// Default certified truncation error of the series.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

/// Upper limit on the truncation depth chosen automatically.
const MAX_TRUNCATION: usize = 400;

/// Per-level `|ω| / N^j` below which the closed form switches to the
/// cancellation-free moment expression.
const CLOSED_FORM_MIN_U: f64 = 1.0;

const BRUTE_MAX_DEPTH: usize = 6;
const BRUTE_MAX_N: usize = 4;

/// Truncated series value and the certified bound on the omitted levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Evaluation route for [`SpectrumEvaluator::evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMethod {
    /// Factorized series with exact polynomial moments.
    Series,
    /// Literal tuple enumeration (small `N` and depth only).
    Brute,
    /// Closed form for polynomial pieces after the telescoping of the
    /// constant terms.
    Closed,
    /// Closed form for linear pieces.
    Linear,
}

/// Truncated-series evaluator of `f̂`.
#[derive(Debug, Clone)]
pub struct SpectrumEvaluator {
    problem: InterpolationProblem,
    truncation: usize,
    omega_min: f64,
    /// `Σ|γ_k| / N`, the geometric ratio of the level bounds.
    ratio: f64,
    /// `Σ_k ∫|q_k| / N`, the bound of the first level.
    first_level: f64,
}

impl SpectrumEvaluator {
    pub fn new(problem: &InterpolationProblem, truncation: usize) -> Result<Self> {
        problem.ensure_valid()?;
        if truncation == 0 {
            return Err(FifError::Domain("series truncation must be at least 1".into()));
        }
        let n = problem.n as f64;
        let ratio = problem.gamma.iter().map(|g| g.abs()).sum::<f64>() / n;
        let first_level = problem.q.iter().map(|q| q.abs_integral_bound()).sum::<f64>() / n;
        Ok(Self {
            problem: problem.clone(),
            truncation,
            omega_min: DEFAULT_OMEGA_MIN,
            ratio,
            first_level,
        })
    }

    /// Picks the smallest truncation whose tail certificate is below `tol`.
    pub fn with_tail_tolerance(problem: &InterpolationProblem, tol: f64) -> Result<Self> {
        let mut ev = Self::new(problem, 1)?;
        while ev.tail_bound() > tol && ev.truncation < MAX_TRUNCATION {
            ev.truncation += 1;
        }
        Ok(ev)
    }

    pub fn with_omega_min(mut self, omega_min: f64) -> Self {
        self.omega_min = omega_min;
        self
    }

    pub fn problem(&self) -> &InterpolationProblem {
        &self.problem
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    /// Bound on `Σ_{j > J} |term_j|`, uniform in `ω`.
    ///
    /// `|G_i| ≤ Σ|γ_k|` and `|Σ_k … Q_k| ≤ Σ_k ∫|q_k|`, so level `j` is at
    /// most `ρ^{j-1} Σ_k∫|q_k| / N` with `ρ = Σ|γ_k| / N < 1`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_after(self.truncation)
    }

    fn tail_after(&self, levels: usize) -> f64 {
        if self.first_level == 0.0 {
            return 0.0;
        }
        if self.ratio >= 1.0 {
            return f64::INFINITY;
        }
        self.ratio.powi(levels as i32) / (1.0 - self.ratio) * self.first_level
    }

    pub fn evaluate(&self, method: SpectrumMethod, omega: f64) -> Result<SeriesValue> {
        match method {
            SpectrumMethod::Series => Ok(self.series(omega)),
            SpectrumMethod::Brute => {
                let value = self.series_bruteforce(omega, self.truncation)?;
                Ok(SeriesValue {
                    value,
                    tail_bound: self.tail_bound(),
                })
            }
            SpectrumMethod::Closed => Ok(SeriesValue {
                value: self.series_closed(omega)?,
                tail_bound: self.tail_bound(),
            }),
            SpectrumMethod::Linear => Ok(SeriesValue {
                value: self.series_linear(omega)?,
                tail_bound: self.tail_bound(),
            }),
        }
    }

    /// Factorized series truncated at `J` levels, `O(J N)` per frequency.
    ///
    /// The moments are regular at `u = 0`, so no small-`ω` switch is needed.
    pub fn series(&self, omega: f64) -> SeriesValue {
        let p = &self.problem;
        let n = p.n;
        let max_degree = p.max_degree();
        let mut prefix = Complex64::new(1.0, 0.0);
        let mut sum = CompensatedSum::default();
        let mut scale = 1.0;
        for _ in 1..=self.truncation {
            scale *= n as f64;
            let u = omega / scale;
            let moments = power_moments(u, max_degree);
            let mut level = Complex64::new(0.0, 0.0);
            let mut g = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let phase = Complex64::from_polar(1.0, -omega * k as f64 / scale);
                let qk: Complex64 = p.q[k]
                    .coeffs()
                    .iter()
                    .zip(&moments)
                    .map(|(&c, &m)| m * c)
                    .sum();
                level += phase * qk;
                g += phase * p.gamma[k];
            }
            sum.add(prefix * level / scale);
            prefix *= g;
            if prefix == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        SeriesValue {
            value: sum.value(),
            tail_bound: self.tail_bound(),
        }
    }

    /// Enumerates every tuple `(k_1, …, k_j)` for `j ≤ depth`, with
    /// `p = Σ_i (k_i - 1) / N^i` and the product `γ_{k_1} ⋯ γ_{k_{j-1}}`.
    pub fn series_bruteforce(&self, omega: f64, depth: usize) -> Result<Complex64> {
        let p = &self.problem;
        let n = p.n;
        if depth > BRUTE_MAX_DEPTH || n > BRUTE_MAX_N {
            return Err(FifError::Resource(format!(
                "brute-force enumeration limited to depth ≤ {BRUTE_MAX_DEPTH} and N ≤ {BRUTE_MAX_N} (got depth {depth}, N {n})"
            )));
        }
        let mut sum = CompensatedSum::default();
        for j in 1..=depth {
            let scale = (n as f64).powi(j as i32);
            let moments: Vec<Complex64> = p.q.iter().map(|q| q.fourier_moment(omega / scale)).collect();
            let mut tuple = vec![0usize; j];
            loop {
                let mut weight = 1.0;
                let mut position = 0.0;
                let mut level_scale = 1.0;
                for (i, &k) in tuple.iter().enumerate() {
                    level_scale *= n as f64;
                    position += k as f64 / level_scale;
                    if i + 1 < j {
                        weight *= p.gamma[k];
                    }
                }
                let last = tuple[j - 1];
                sum.add(Complex64::from_polar(weight / scale, -omega * position) * moments[last]);
                if !advance(&mut tuple, n) {
                    break;
                }
            }
        }
        Ok(sum.value())
    }

    /// Closed form for polynomial pieces.
    ///
    /// After the `r = 0` and leading `i/ω` terms telescope across `k`
    /// (this uses `y_0 = y_N = 0`), level `j` contributes
    /// `Π_{i<j} G_i · Σ_k e^{-iω(k-1)/N^j} Σ_{r≥1} c_{k,r} B_r` with
    ///
    /// ```text
    /// B_r = [Σ_{l=1}^{r} (-1)^l r!/(r-l)! · i^{l+1} N^{lj} / ω^{l+1}] e^{-iω/N^j}
    ///       - (-1)^r r! i^{r+1} N^{rj} / ω^{r+1}.
    /// ```
    ///
    /// On levels where `|ω|/N^j < 1` the expanded bracket cancels
    /// catastrophically and the equal expression `N^{-j} I_r(u) - i e^{-iu}/ω`
    /// is used instead.
    pub fn series_closed(&self, omega: f64) -> Result<Complex64> {
        self.check_omega(omega)?;
        let p = &self.problem;
        let n = p.n;
        let max_degree = p.max_degree();
        let i = Complex64::new(0.0, 1.0);
        let mut prefix = Complex64::new(1.0, 0.0);
        let mut sum = CompensatedSum::default();
        let mut scale = 1.0;
        for _ in 1..=self.truncation {
            scale *= n as f64;
            let u = omega / scale;
            let e = Complex64::from_polar(1.0, -u);
            let brackets: Vec<Complex64> = if u.abs() >= CLOSED_FORM_MIN_U {
                (0..=max_degree).map(|r| closed_bracket(r, omega, scale, e)).collect()
            } else {
                let m = power_moments(u, max_degree);
                m.iter().map(|&ir| ir / scale - i * e / omega).collect()
            };
            let mut level = Complex64::new(0.0, 0.0);
            let mut g = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let phase = Complex64::from_polar(1.0, -omega * k as f64 / scale);
                let inner: Complex64 = p.q[k]
                    .coeffs()
                    .iter()
                    .zip(&brackets)
                    .skip(1)
                    .map(|(&c, &b)| b * c)
                    .sum();
                level += phase * inner;
                g += phase * p.gamma[k];
            }
            sum.add(prefix * level);
            prefix *= g;
            if prefix == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        Ok(sum.value())
    }

    /// Linear pieces `q_k(x) = c_k x + d_k`:
    /// `ω^{-2} Σ_j N^j (e^{-iω/N^j} - 1) Π_{i<j} G_i Σ_k c_k e^{-iω(k-1)/N^j}`.
    pub fn series_linear(&self, omega: f64) -> Result<Complex64> {
        let p = &self.problem;
        if !p.is_linear() {
            return Err(FifError::Domain(format!(
                "linear closed form needs degree ≤ 1 pieces, found degree {}",
                p.max_degree()
            )));
        }
        self.check_omega(omega)?;
        let n = p.n;
        let slopes: Vec<f64> = p.q.iter().map(|q| q.coeffs().get(1).copied().unwrap_or(0.0)).collect();
        let mut prefix = Complex64::new(1.0, 0.0);
        let mut sum = CompensatedSum::default();
        let mut scale = 1.0;
        for _ in 1..=self.truncation {
            scale *= n as f64;
            let u = omega / scale;
            let half = (0.5 * u).sin();
            let em1 = Complex64::new(-2.0 * half * half, -u.sin());
            let mut inner = Complex64::new(0.0, 0.0);
            let mut g = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let phase = Complex64::from_polar(1.0, -omega * k as f64 / scale);
                inner += phase * slopes[k];
                g += phase * p.gamma[k];
            }
            sum.add(prefix * inner * em1 * scale);
            prefix *= g;
            if prefix == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        Ok(sum.value() / (omega * omega))
    }

    fn check_omega(&self, omega: f64) -> Result<()> {
        if omega.abs() < self.omega_min {
            return Err(FifError::Domain(format!(
                "closed forms need |ω| ≥ {:e}, got {omega:e}",
                self.omega_min
            )));
        }
        Ok(())
    }
}

fn closed_bracket(r: usize, omega: f64, scale: f64, e: Complex64) -> Complex64 {
    if r == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let i = Complex64::new(0.0, 1.0);
    // N^{lj} / ω^{l+1} = (N^j/ω)^l / ω
    let ratio = scale / omega;
    let mut falling = 1.0;
    let mut ratio_pow = 1.0;
    let mut bracket = Complex64::new(0.0, 0.0);
    for l in 1..=r {
        falling *= (r - l + 1) as f64;
        ratio_pow *= ratio;
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        bracket += i.powu(l as u32 + 1) * (sign * falling * ratio_pow / omega);
    }
    let sign_r = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    bracket * e - i.powu(r as u32 + 1) * (sign_r * falling * ratio_pow / omega)
}

fn advance(tuple: &mut [usize], n: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Minimum number of cells for [`ft_quadrature`].
pub const QUADRATURE_MIN_CELLS: usize = 64;

/// `∫₀¹ f(x) e^{-iωx} dx` with `f` replaced by its piecewise-linear
/// interpolant on the grid, each cell integrated exactly against the
/// exponential.
///
/// Guards: at least 64 cells and `|ω| ≤ π N^J`.
pub fn ft_quadrature(grid: &FifGrid, omega: f64) -> Result<Complex64> {
    let cells = grid.cells();
    if cells < QUADRATURE_MIN_CELLS {
        return Err(FifError::Accuracy(format!(
            "quadrature needs at least {QUADRATURE_MIN_CELLS} cells, grid has {cells}"
        )));
    }
    if omega.abs() > std::f64::consts::PI * cells as f64 {
        return Err(FifError::Accuracy(format!(
            "|ω| = {} exceeds the grid resolution π·{cells}",
            omega.abs()
        )));
    }
    Ok(pl_fourier(grid.values(), omega))
}

/// [`ft_quadrature`] plus the difference to the same rule on the grid one
/// level coarser, a conservative error estimate.
pub fn ft_quadrature_with_estimate(grid: &FifGrid, omega: f64) -> Result<(Complex64, f64)> {
    let fine = ft_quadrature(grid, omega)?;
    let estimate = match grid.coarsen() {
        Some(c) if c.cells() >= 2 && omega.abs() <= std::f64::consts::PI * c.cells() as f64 => {
            (pl_fourier(c.values(), omega) - fine).norm()
        }
        _ => f64::INFINITY,
    };
    Ok((fine, estimate))
}

fn pl_fourier(values: &[f64], omega: f64) -> Complex64 {
    let cells = values.len() - 1;
    let h = 1.0 / cells as f64;
    let m = power_moments(omega * h, 1);
    let left = (m[0] - m[1]) * h;
    let right = m[1] * h;
    let mut sum = CompensatedSum::default();
    for (i, w) in values.windows(2).enumerate() {
        if w[0] == 0.0 && w[1] == 0.0 {
            continue;
        }
        let phase = Complex64::from_polar(1.0, -omega * (i as f64 * h));
        sum.add(phase * (left * w[0] + right * w[1]));
    }
    sum.value()
}

/// CSV with header `omega,re,im,abs,tail_bound`.
pub fn write_spectrum_csv<W: Write>(mut out: W, rows: &[(f64, SeriesValue)]) -> std::io::Result<()> {
    writeln!(out, "omega,re,im,abs,tail_bound")?;
    for (omega, v) in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(*omega),
            fmt_f64(v.value.re),
            fmt_f64(v.value.im),
            fmt_f64(v.value.norm()),
            fmt_f64(v.tail_bound)
        )?;
    }
    Ok(())
}
