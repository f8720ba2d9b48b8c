//! The analytic wavelet `ψ̂(ω) = ω^M e^{-ω}` on `ω > 0` and its time form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FifError, Result};

/// Wavelet of order `M` with Fourier transform `ω^M e^{-ω}` on the positive
/// half-line and zero elsewhere. Its vanishing-moment order is `M`.
///
/// In time, `ψ(x) = M! / (2π) · (1 - ix)^{-(M+1)}`, which is complex: a
/// real `ψ̂` supported on `ω > 0` cannot belong to a real wavelet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauchyWavelet {
    order: u32,
}

impl CauchyWavelet {
    pub fn new(order: u32) -> Result<Self> {
        if order < 2 {
            return Err(FifError::Domain(format!("wavelet order must be ≥ 2, got {order}")));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Vanishing-moment order `r`, identical to `M` for this family.
    pub fn vanishing_moments(&self) -> u32 {
        self.order
    }

    /// `M! / (2π)`.
    pub fn amplitude(&self) -> f64 {
        factorial(self.order) / (2.0 * std::f64::consts::PI)
    }

    pub fn hat(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            0.0
        } else {
            omega.powi(self.order as i32) * (-omega).exp()
        }
    }

    pub fn time(&self, x: f64) -> Complex64 {
        Complex64::new(1.0, -x).powi(-(self.order as i32 + 1)) * self.amplitude()
    }

    /// `conj ψ(y)`, the kernel of the transform.
    pub fn time_conj(&self, y: f64) -> Complex64 {
        self.time(y).conj()
    }

    /// Antiderivatives of `conj ψ(y)` and `y · conj ψ(y)` vanishing at
    /// `+∞`, with `z = 1 + iy`:
    /// `(i c / M) z^{-M}` and `c (z^{1-M}/(M-1) - z^{-M}/M)`.
    pub(crate) fn conj_antiderivatives(&self, y: f64) -> (Complex64, Complex64) {
        let m = self.order as i32;
        let c = self.amplitude();
        let inv = Complex64::new(1.0, y).inv();
        let p1 = inv.powi(m - 1);
        let p0 = p1 * inv;
        let zero = Complex64::new(0.0, c / m as f64) * p0;
        let first = (p1 / (m - 1) as f64 - p0 / m as f64) * c;
        (zero, first)
    }

    /// `∫_{|y| > R} |ψ(y)| dy ≤ 2 c R^{-M} / M`.
    pub fn tail_mass(&self, radius: f64) -> f64 {
        2.0 * self.amplitude() * radius.powi(-(self.order as i32)) / self.order as f64
    }

    /// Smallest radius with [`tail_mass`](Self::tail_mass) below `tol`.
    pub fn support_radius(&self, tol: f64) -> f64 {
        (2.0 * self.amplitude() / (self.order as f64 * tol)).powf(1.0 / self.order as f64)
    }

    /// `v` with `∫_v^∞ ω^M e^{-ω} dω < tol · M!`.
    pub fn hat_cutoff(&self, tol: f64) -> f64 {
        let m = self.order as f64;
        let mut v = m + 1.0;
        // upper incomplete gamma ratio ≤ e^{-v} Σ_{k≤M} v^k/k!
        while upper_gamma_ratio(self.order, v) > tol {
            v += 0.5;
        }
        v
    }
}

/// `Γ(M+1, v) / M! = e^{-v} Σ_{k=0}^{M} v^k / k!`.
fn upper_gamma_ratio(order: u32, v: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=order {
        term *= v / k as f64;
        sum += term;
    }
    (-v).exp() * sum
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::PanelRule;
    use std::f64::consts::PI;

    #[test]
    fn hat_examples() {
        let w = CauchyWavelet::new(4).unwrap();
        assert_eq!(w.hat(0.0), 0.0);
        assert_eq!(w.hat(-1.0), 0.0);
        assert!((w.hat(4.0) - 256.0 * (-4.0f64).exp()).abs() < 1e-15);
        assert!((w.hat(4.0) - 4.688_803_555_515_95).abs() < 1e-12);
        // maximizer at ω = M
        assert!(w.hat(4.0) > w.hat(3.99) && w.hat(4.0) > w.hat(4.01));
    }

    #[test]
    fn order_guard() {
        assert!(CauchyWavelet::new(1).is_err());
    }

    #[test]
    fn time_form_at_origin() {
        let w = CauchyWavelet::new(2).unwrap();
        let v = w.time(0.0);
        assert!((v.re - 1.0 / PI).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
        // inverse transform by quadrature: (1/2π)∫ω²e^{-ω}dω
        let rule = PanelRule::new(16);
        let num = rule.integrate(0.0, 80.0, 80, |om| Complex64::new(w.hat(om), 0.0)) / (2.0 * PI);
        assert!((num.re - 0.318_309_886_183_790_7).abs() < 1e-12);
    }

    #[test]
    fn time_decay_rate() {
        let w = CauchyWavelet::new(3).unwrap();
        let a = w.time(100.0).norm();
        let b = w.time(200.0).norm();
        assert!(((a / b).log2() - 4.0).abs() < 1e-3);
    }

    #[test]
    fn antiderivatives_differentiate_back() {
        let w = CauchyWavelet::new(4).unwrap();
        for &y in &[-3.0, -0.2, 0.0, 0.7, 5.0] {
            let h = 1e-5;
            let (a0, a1) = w.conj_antiderivatives(y + h);
            let (b0, b1) = w.conj_antiderivatives(y - h);
            let d0 = (a0 - b0) / (2.0 * h);
            let d1 = (a1 - b1) / (2.0 * h);
            assert!((d0 - w.time_conj(y)).norm() < 1e-8);
            assert!((d1 - w.time_conj(y) * y).norm() < 1e-8);
        }
        let (far0, far1) = w.conj_antiderivatives(1e9);
        assert!(far0.norm() < 1e-30 && far1.norm() < 1e-20);
    }

    #[test]
    fn small_frequency_behaviour() {
        let w = CauchyWavelet::new(4).unwrap();
        for e in 10..=20 {
            let om = 2f64.powi(-e);
            assert!((w.hat(om) / om.powi(4) - 1.0).abs() < 1e-3);
        }
        assert!(w.hat(1e3) * 1e3f64.powi(10) < 1e-300);
    }

    #[test]
    fn cutoff_and_radius() {
        let w = CauchyWavelet::new(4).unwrap();
        let v = w.hat_cutoff(1e-14);
        assert!(upper_gamma_ratio(4, v) <= 1e-14);
        let r = w.support_radius(1e-9);
        assert!((w.tail_mass(r) - 1e-9).abs() < 1e-15);
    }
}
