//! Real polynomials on `[0, 1]` and their oscillatory moments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Below this `|u|` the moments `∫₀¹ xʳ e^{-iux} dx` are summed from their
/// Taylor series; above it the integration-by-parts recurrence is stable.
const TAYLOR_RADIUS: f64 = 4.0;

/// Number of sample points used for the grid estimate of `sup |q'|`.
pub const LIPSCHITZ_GRID_POINTS: usize = 1025;

/// Dense polynomial `c₀ + c₁x + … + c_m xᵐ`, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    /// `a + (b - a) x`, the segment from `(0, a)` to `(1, b)`.
    pub fn linear(a: f64, b: f64) -> Self {
        Self { coeffs: vec![a, b - a] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Stored degree `m_k`, i.e. `len - 1` (trailing zeros are not trimmed).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `Σ c_r`, the value at `x = 1` summed in coefficient order.
    pub fn coeff_sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(r, &c)| r as f64 * c)
                .collect(),
        )
    }

    /// `Σ |c_r|`, an upper bound of `sup_{[0,1]} |q|`.
    pub fn sup_bound(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// `Σ |c_r| / (r + 1)`, an upper bound of `∫₀¹ |q|`.
    pub fn abs_integral_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(r, c)| c.abs() / (r as f64 + 1.0))
            .sum()
    }

    /// `∫₀¹ q`.
    pub fn integral(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(r, c)| c / (r as f64 + 1.0))
            .sum()
    }

    /// Maximum of `|q'|` over a uniform 1025-point grid on `[0, 1]`.
    pub fn lipschitz_grid(&self) -> f64 {
        let d = self.derivative();
        let last = (LIPSCHITZ_GRID_POINTS - 1) as f64;
        (0..LIPSCHITZ_GRID_POINTS)
            .map(|i| d.eval(i as f64 / last).abs())
            .fold(0.0, f64::max)
    }

    /// `Σ r |c_r|`, a certified upper bound of `sup_{[0,1]} |q'|`.
    pub fn lipschitz_certificate(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(r, c)| r as f64 * c.abs())
            .sum()
    }

    /// `∫₀¹ q(x) e^{-iux} dx`.
    pub fn fourier_moment(&self, u: f64) -> Complex64 {
        let moments = power_moments(u, self.degree());
        self.coeffs
            .iter()
            .zip(&moments)
            .map(|(&c, &m)| m * c)
            .sum()
    }
}

/// `I_r(u) = ∫₀¹ xʳ e^{-iux} dx` for `r = 0..=max_r`.
///
/// Uses the Taylor series `Σ_n (-iu)ⁿ / (n! (r+n+1))` for `|u| < 4` (the
/// point `u = 0` is a removable singularity of the closed form) and the
/// recurrence `I_r = i (e^{-iu} - r I_{r-1}) / u` otherwise.
pub fn power_moments(u: f64, max_r: usize) -> Vec<Complex64> {
    if u.abs() < TAYLOR_RADIUS {
        (0..=max_r).map(|r| taylor_moment(u, r)).collect()
    } else {
        let phase = Complex64::from_polar(1.0, -u);
        let i_over_u = Complex64::new(0.0, 1.0 / u);
        let mut out = Vec::with_capacity(max_r + 1);
        let mut prev = (phase - 1.0) * i_over_u;
        out.push(prev);
        for r in 1..=max_r {
            prev = (phase - prev * r as f64) * i_over_u;
            out.push(prev);
        }
        out
    }
}

fn taylor_moment(u: f64, r: usize) -> Complex64 {
    let step = Complex64::new(0.0, -u);
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..200 {
        let term = power / (r + n + 1) as f64;
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) && n > 2 {
            break;
        }
        power = power * step / (n + 1) as f64;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn simpson(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        let h = 1.0 / n as f64;
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn horner_matches_naive() {
        let p = Polynomial::new(vec![1.0, -2.0, 0.5, 3.0]);
        let x = 0.37;
        let naive = 1.0 - 2.0 * x + 0.5 * x * x + 3.0 * x * x * x;
        assert!((p.eval(x) - naive).abs() < 1e-15);
    }

    #[test]
    fn lipschitz_of_tent_pieces() {
        assert_eq!(Polynomial::linear(0.0, 1.0).lipschitz_grid(), 1.0);
        assert_eq!(Polynomial::linear(1.0, 0.0).lipschitz_certificate(), 1.0);
        let cubic = Polynomial::new(vec![0.0, 1.0, -3.0, 2.0]);
        assert!(cubic.lipschitz_grid() <= cubic.lipschitz_certificate());
    }

    #[test]
    fn constant_over_full_period_vanishes() {
        let one = Polynomial::new(vec![1.0]);
        assert!(one.fourier_moment(2.0 * PI).norm() < 1e-15);
    }

    #[test]
    fn zero_frequency_is_plain_moment() {
        let p = Polynomial::new(vec![0.5, -1.0, 2.0, 0.25]);
        let m = p.fourier_moment(0.0);
        let expected = 0.5 - 1.0 / 2.0 + 2.0 / 3.0 + 0.25 / 4.0;
        assert!((m.re - expected).abs() < 1e-15);
        assert_eq!(m.im, 0.0);
    }

    #[test]
    fn identity_at_pi_against_quadrature() {
        // oracle: Simpson on real and imaginary parts separately
        let u = PI;
        let re = simpson(|x| x * (u * x).cos(), 20_000);
        let im = simpson(|x| -x * (u * x).sin(), 20_000);
        let m = Polynomial::new(vec![0.0, 1.0]).fourier_moment(u);
        assert!((re - (-0.202_642_367_284_675_5)).abs() < 1e-12);
        assert!((im - (-0.318_309_886_183_790_7)).abs() < 1e-12);
        assert!((m.re - re).abs() < 1e-12);
        assert!((m.im - im).abs() < 1e-12);
    }

    #[test]
    fn taylor_and_recurrence_agree_near_switch() {
        for &u in &[3.999, 4.0, 4.001, -3.999, -4.0] {
            for r in 0..=5 {
                let t = taylor_moment(u, r);
                let rec = power_moments(u.signum() * 4.0001_f64.max(u.abs()), r)[r];
                let t2 = taylor_moment(u.signum() * 4.0001_f64.max(u.abs()), r);
                assert!((rec - t2).norm() < 1e-12, "u={u} r={r}");
                assert!(t.norm().is_finite());
            }
        }
    }

    #[test]
    fn moments_match_quadrature_on_wide_range() {
        for &u in &[-150.0, -17.3, -2.5, -0.01, 0.3, 3.0, 9.1, 64.0, 400.0] {
            let ms = power_moments(u, 4);
            for (r, m) in ms.iter().enumerate() {
                let re = simpson(|x| x.powi(r as i32) * (u * x).cos(), 40_000);
                let im = simpson(|x| -x.powi(r as i32) * (u * x).sin(), 40_000);
                assert!((m.re - re).abs() < 1e-9, "u={u} r={r}");
                assert!((m.im - im).abs() < 1e-9, "u={u} r={r}");
            }
        }
    }
}
