//! Quadrature building blocks shared by the spectrum and wavelet paths.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

/// Gauss–Legendre rule on `[-1, 1]`, mapped onto panels on demand.
#[derive(Debug, Clone)]
pub struct PanelRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl PanelRule {
    pub fn new(points: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(points.max(1)).unwrap());
        let (nodes, weights) = rule.as_node_weight_pairs().iter().copied().unzip();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights of the rule mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// `∫_a^b f` with `panels` equal panels.
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> Complex64 {
        let width = (b - a) / panels as f64;
        let mut sum = CompensatedSum::default();
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let hi = if p + 1 == panels { b } else { lo + width };
            for (x, w) in self.mapped(lo, hi) {
                sum.add(f(x) * w);
            }
        }
        sum.value()
    }
}

/// Neumaier-compensated complex accumulator; results do not depend on the
/// magnitude ordering of the summands beyond rounding of the compensation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

impl CompensatedSum {
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (sum, comp) = *acc;
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        (sum - t) + x
    } else {
        (x - t) + sum
    };
    *acc = (t, comp + c);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panels_integrate_oscillation() {
        let rule = PanelRule::new(10);
        let v = rule.integrate(0.0, 20.0, 40, |x| Complex64::from_polar(1.0, 3.0 * x));
        let exact = (Complex64::from_polar(1.0, 60.0) - 1.0) / Complex64::new(0.0, 3.0);
        assert!((v - exact).norm() < 1e-13);
    }

    #[test]
    fn compensation_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(Complex64::new(1e16, 0.0));
        for _ in 0..10 {
            s.add(Complex64::new(1.0, 0.0));
        }
        s.add(Complex64::new(-1e16, 0.0));
        assert_eq!(s.value().re, 10.0);
    }
}
