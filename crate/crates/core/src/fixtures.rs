//! Reference problems used by the tests, the benches and `verify-all`.

use rand::Rng;

use crate::poly::Polynomial;
use crate::problem::InterpolationProblem;

/// `N = 2`, `y = (0, 1, 0)`, `q₁(x) = x`, `q₂(x) = 1 - x`, `γ₁ = γ₂ = gamma`.
pub fn tent(gamma: f64) -> InterpolationProblem {
    InterpolationProblem::new(
        vec![0.0, 1.0, 0.0],
        vec![gamma, gamma],
        vec![Polynomial::linear(0.0, 1.0), Polynomial::linear(1.0, 0.0)],
    )
}

/// The problem whose attractor is the zero function.
pub fn zero(n: usize) -> InterpolationProblem {
    InterpolationProblem::new(vec![0.0; n + 1], vec![0.3; n], vec![Polynomial::zero(); n])
}

/// Random admissible problem: `y_k` uniform in `[-1, 1]` with zero ends,
/// `|γ_k| < gamma_bound`, and `q_k` of degree `degree` (1..=3) built as the
/// chord through the knots plus `x(1-x)(a + b x)`.
pub fn random_admissible<R: Rng>(
    rng: &mut R,
    n: usize,
    degree: usize,
    gamma_bound: f64,
) -> InterpolationProblem {
    assert!((1..=3).contains(&degree));
    let mut y: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    y[0] = 0.0;
    y[n] = 0.0;
    let gamma = (0..n)
        .map(|_| rng.gen_range(-gamma_bound..gamma_bound))
        .collect();
    let q = (0..n)
        .map(|k| {
            let (y0, y1) = (y[k], y[k + 1]);
            let a = if degree >= 2 { rng.gen_range(0.2..1.5) * sign(rng) } else { 0.0 };
            let b = if degree >= 3 { rng.gen_range(0.2..1.5) * sign(rng) } else { 0.0 };
            // y0 + (y1-y0)x + a x - a x² + b x² - b x³
            let mut c = vec![y0, y1 - y0 + a, b - a, -b];
            c.truncate(degree + 1);
            if degree == 1 && c[1] == 0.0 {
                c.truncate(1);
            }
            Polynomial::new(c)
        })
        .collect();
    InterpolationProblem::new(y, gamma, q)
}

fn sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_fixtures_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=4 {
            for degree in 1..=3 {
                for _ in 0..20 {
                    let p = random_admissible(&mut rng, n, degree, 0.45);
                    let r = p.validate();
                    assert!(r.ok, "{r}");
                }
            }
        }
    }
}
