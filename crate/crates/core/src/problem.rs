//! Interpolation data, free parameters and the affine maps of the
//! iterated function system on uniform knots `x_i = i / N`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{FifError, Result};
use crate::poly::Polynomial;

/// Absolute slack (scaled by the data magnitude) for the join conditions.
const JOIN_TOLERANCE: f64 = 1e-12;

/// A fractal interpolation problem on `N` uniform subintervals of `[0, 1]`.
///
/// The function it defines satisfies `f((x + k - 1)/N) = γ_k f(x) + q_k(x)`
/// for `x ∈ [0, 1]` and every piece `k`. Construction does not validate;
/// call [`InterpolationProblem::validate`] before sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpolationProblem {
    #[serde(rename = "N")]
    pub n: usize,
    pub y: Vec<f64>,
    pub gamma: Vec<f64>,
    pub q: Vec<Polynomial>,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    1.0
}

/// One failed constraint: name, 1-based piece or 0-based knot index, and
/// the size of the violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: String,
    pub index: usize,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn has(&self, constraint: &str) -> bool {
        self.violations.iter().any(|v| v.constraint == constraint)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{} (index {}, magnitude {:e})", v.constraint, v.index, v.magnitude))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl InterpolationProblem {
    pub fn new(y: Vec<f64>, gamma: Vec<f64>, q: Vec<Polynomial>) -> Self {
        Self {
            n: gamma.len(),
            y,
            gamma,
            q,
            delta: 1.0,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// Replaces every `γ_k` by the given value.
    pub fn with_uniform_gamma(mut self, gamma: f64) -> Self {
        self.gamma = vec![gamma; self.n];
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("problem serializes")
    }

    /// SHA-256 of the compact JSON form, used to tag exported reports.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn gamma_max(&self) -> f64 {
        self.gamma.iter().fold(0.0, |m, g| m.max(g.abs()))
    }

    /// `m = max_k m_k`.
    pub fn max_degree(&self) -> usize {
        self.q.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    /// True when every `q_k` has degree at most one.
    pub fn is_linear(&self) -> bool {
        self.max_degree() <= 1
    }

    /// `L_k(x) = (x + k - 1) / N`.
    pub fn map_forward(&self, k: usize, x: f64) -> Result<f64> {
        if k == 0 || k > self.n {
            return Err(FifError::Domain(format!("piece index {k} outside 1..={}", self.n)));
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(FifError::Domain(format!("x = {x} outside [0, 1]")));
        }
        Ok((x + (k - 1) as f64) / self.n as f64)
    }

    /// Returns `(k, u)` with `x ∈ I_k` and `u = L_k⁻¹(x)`. Interior knots
    /// resolve to the left piece, `(k, 1)`.
    pub fn map_inverse(&self, x: f64) -> Result<(usize, f64)> {
        if !(0.0..=1.0).contains(&x) {
            return Err(FifError::Domain(format!("x = {x} outside [0, 1]")));
        }
        let scaled = x * self.n as f64;
        let k = (scaled.ceil() as usize).clamp(1, self.n);
        let u = (scaled - (k - 1) as f64).clamp(0.0, 1.0);
        Ok((k, u))
    }

    /// Checks every structural and join constraint and reports each
    /// violation separately.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let mut push = |name: &str, index: usize, magnitude: f64| {
            v.push(Violation {
                constraint: name.to_string(),
                index,
                magnitude,
            })
        };
        let n = self.n;
        if n < 2 {
            push("N>=2", 0, n as f64);
        }
        if self.y.len() != n + 1 {
            push("len(y)=N+1", 0, self.y.len() as f64);
        }
        if self.gamma.len() != n {
            push("len(gamma)=N", 0, self.gamma.len() as f64);
        }
        if self.q.len() != n {
            push("len(q)=N", 0, self.q.len() as f64);
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            push("0<delta<=1", 0, self.delta);
        }
        let all_finite = self.y.iter().chain(&self.gamma).all(|x| x.is_finite())
            && self
                .q
                .iter()
                .all(|p| !p.coeffs().is_empty() && p.coeffs().iter().all(|c| c.is_finite()));
        if !all_finite {
            push("finite", 0, f64::NAN);
        }
        let shaped = n >= 1 && self.y.len() == n + 1 && self.q.len() == n && self.gamma.len() == n;
        if !shaped || !all_finite {
            return ValidationReport {
                ok: false,
                violations: v,
            };
        }

        if self.y[0] != 0.0 {
            push("y_0=0", 0, self.y[0].abs());
        }
        if self.y[n] != 0.0 {
            push("y_N=0", n, self.y[n].abs());
        }
        for (k, g) in self.gamma.iter().enumerate() {
            if g.abs() >= 1.0 {
                push("|gamma_k|<1", k + 1, g.abs());
            }
        }

        let scale = 1.0 + self.y.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
        let tol = JOIN_TOLERANCE * scale;
        for (k, q) in self.q.iter().enumerate() {
            let piece = k + 1;
            let left = (q.eval(0.0) - self.y[k]).abs();
            if left > tol {
                push("q_k(0)=y_{k-1}", piece, left);
            }
            let right = (q.eval(1.0) - self.y[k + 1]).abs();
            if right > tol {
                push("q_k(1)=y_k", piece, right);
            }
            if q.degree() > 0 && q.leading() == 0.0 {
                push("c_{k,m_k}!=0", piece, 0.0);
            }
        }

        // coefficient form of the same join conditions
        let c10 = self.q[0].coeffs()[0];
        if c10.abs() > tol {
            push("c_{1,0}=0", 1, c10.abs());
        }
        for k in 0..n - 1 {
            let gap = (self.q[k].coeff_sum() - self.q[k + 1].coeffs()[0]).abs();
            if gap > tol {
                push("sum_r c_{k,r}=c_{k+1,0}", k + 1, gap);
            }
        }
        let last = self.q[n - 1].coeff_sum().abs();
        if last > tol {
            push("sum_r c_{N,r}=0", n, last);
        }

        ValidationReport {
            ok: v.is_empty(),
            violations: v,
        }
    }

    /// Validates and converts failures into [`FifError::Invalid`].
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.ok {
            Ok(())
        } else {
            Err(FifError::Invalid(report))
        }
    }
}
