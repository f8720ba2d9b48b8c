//! Exact samples of the attractor on N-adic grids.
//!
//! The functional equation `f(L_k(x)) = γ_k f(x) + q_k(x)` maps the level
//! `j-1` grid `{i / N^{j-1}}` onto the level `j` grid, so the function is
//! computable there without any fixed-point iteration error.

use std::io::Write;

use crate::error::{FifError, Result};
use crate::format::fmt_f64;
use crate::problem::InterpolationProblem;

/// Largest grid (in samples) [`sample_grid`] will allocate.
pub const MAX_GRID_POINTS: usize = 1 << 26;

/// Values `f(i / N^J)` for `i = 0..=N^J`.
#[derive(Debug, Clone, PartialEq)]
pub struct FifGrid {
    n: usize,
    level: u32,
    values: Vec<f64>,
}

impl FifGrid {
    /// Wraps raw samples; `values.len()` must be `N^level + 1`.
    pub fn from_values(n: usize, level: u32, values: Vec<f64>) -> Result<Self> {
        let cells = grid_cells(n, level)?;
        if values.len() != cells + 1 {
            return Err(FifError::Domain(format!(
                "expected {} samples for level {level}, got {}",
                cells + 1,
                values.len()
            )));
        }
        Ok(Self { n, level, values })
    }

    /// The all-zero function on the given grid.
    pub fn zeros(n: usize, level: u32) -> Result<Self> {
        let cells = grid_cells(n, level)?;
        Ok(Self {
            n,
            level,
            values: vec![0.0; cells + 1],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of cells, `N^J`.
    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    /// Grid spacing `N^{-J}`.
    pub fn spacing(&self) -> f64 {
        1.0 / self.cells() as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 / self.cells() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_distance(&self, other: &FifGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Every `N`-th sample, i.e. the grid one level coarser.
    pub fn coarsen(&self) -> Option<FifGrid> {
        if self.level == 0 {
            return None;
        }
        Some(FifGrid {
            n: self.n,
            level: self.level - 1,
            values: self.values.iter().step_by(self.n).copied().collect(),
        })
    }

    /// Largest `|f(x_{i+1}) - f(x_i)|`.
    pub fn max_adjacent_jump(&self) -> f64 {
        self.values
            .windows(2)
            .fold(0.0, |m, w| m.max((w[1] - w[0]).abs()))
    }

    /// Largest `|f(x + h) - f(x)|` over grid points with `h = lag` cells.
    pub fn oscillation(&self, lag: usize) -> f64 {
        if lag == 0 || lag > self.cells() {
            return 0.0;
        }
        self.values[lag..]
            .iter()
            .zip(&self.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// CSV with header `x,f`, one row per grid point, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,f")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{},{}", fmt_f64(self.x(i)), fmt_f64(*v))?;
        }
        Ok(())
    }
}

fn grid_cells(n: usize, level: u32) -> Result<usize> {
    n.checked_pow(level)
        .filter(|c| *c < MAX_GRID_POINTS)
        .ok_or_else(|| {
            FifError::Resource(format!(
                "grid N^J + 1 with N = {n}, J = {level} exceeds {MAX_GRID_POINTS} samples"
            ))
        })
}

/// Samples the attractor on the level-`level` grid.
///
/// Level 0 is `(y_0, y_N)`, level 1 is the data `y`. Each finer level keeps
/// the coarse samples (so restriction is exact) and fills the new points
/// from `f(L_k(x)) = γ_k f(x) + q_k(x)`.
pub fn sample_grid(problem: &InterpolationProblem, level: u32) -> Result<FifGrid> {
    problem.ensure_valid()?;
    let n = problem.n;
    grid_cells(n, level)?;
    let mut values = vec![problem.y[0], problem.y[n]];
    if level >= 1 {
        values = problem.y.clone();
    }
    for j in 2..=level {
        let coarse_cells = n.pow(j - 1);
        let coarse_step = 1.0 / coarse_cells as f64;
        let fine_cells = coarse_cells * n;
        let mut fine = vec![0.0; fine_cells + 1];
        for (m, slot) in fine.iter_mut().enumerate() {
            if m % n == 0 {
                *slot = values[m / n];
                continue;
            }
            let k = m / coarse_cells;
            let i = m % coarse_cells;
            let x = i as f64 * coarse_step;
            *slot = problem.gamma[k] * values[i] + problem.q[k].eval(x);
        }
        values = fine;
    }
    Ok(FifGrid { n, level, values })
}

/// Applies the Read–Bajraktarevic operator
/// `T(g)(x) = γ_k g(L_k⁻¹ x) + q_k(L_k⁻¹ x)` `iterations` times on the grid
/// of `start`.
///
/// `L_k⁻¹` maps the level-`J` grid into itself (`u` has index
/// `N m - (k-1) N^J`), so no interpolation is involved.
pub fn rb_iterate(
    problem: &InterpolationProblem,
    start: &FifGrid,
    iterations: usize,
) -> Result<FifGrid> {
    problem.ensure_valid()?;
    if start.n != problem.n {
        return Err(FifError::Domain(format!(
            "grid built for N = {} used with N = {}",
            start.n, problem.n
        )));
    }
    let n = problem.n;
    let cells = start.cells();
    let step = 1.0 / cells as f64;
    // piece and source index for every target point, knots to the left piece
    let plan: Vec<(usize, usize)> = (0..=cells)
        .map(|m| {
            let k = if m == 0 { 1 } else { (m * n - 1) / cells + 1 };
            (k - 1, m * n - (k - 1) * cells)
        })
        .collect();
    let mut current = start.values.clone();
    let mut next = vec![0.0; cells + 1];
    for _ in 0..iterations {
        for (slot, &(k, src)) in next.iter_mut().zip(&plan) {
            *slot = problem.gamma[k] * current[src] + problem.q[k].eval(src as f64 * step);
        }
        std::mem::swap(&mut current, &mut next);
    }
    Ok(FifGrid {
        n,
        level: start.level,
        values: current,
    })
}

/// Pointwise value from `depth` unrollings of the functional equation,
/// closed by the piecewise-linear interpolant of the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    pub value: f64,
    /// Certified bound on `|f(x) - value|`.
    pub error_bound: f64,
}

/// Evaluates `f(x)` at an arbitrary point.
///
/// The remainder after `depth` levels is a product of `depth` factors `γ`
/// times `f - P` at some point, where `P` is the linear interpolant of `y`;
/// `sup |f| ≤ max_k sup|q_k| / (1 - max|γ|)` bounds it.
pub fn evaluate_point(problem: &InterpolationProblem, x: f64, depth: usize) -> Result<PointValue> {
    problem.ensure_valid()?;
    if !(0.0..=1.0).contains(&x) {
        return Err(FifError::Domain(format!("x = {x} outside [0, 1]")));
    }
    let mut weight = 1.0;
    let mut value = 0.0;
    let mut u = x;
    for _ in 0..depth {
        let (k, next) = problem.map_inverse(u)?;
        value += weight * problem.q[k - 1].eval(next);
        weight *= problem.gamma[k - 1];
        u = next;
    }
    // linear interpolant of the knot data
    let (k, t) = problem.map_inverse(u)?;
    let lin = problem.y[k - 1] + (problem.y[k] - problem.y[k - 1]) * t;
    value += weight * lin;

    let gmax = problem.gamma_max();
    let q_sup = problem.q.iter().map(|q| q.sup_bound()).fold(0.0, f64::max);
    let y_sup = problem.y.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    let spread = y_sup + q_sup / (1.0 - gmax);
    let error_bound = gmax.powi(depth as i32) * spread;
    Ok(PointValue { value, error_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{random_admissible, tent};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn first_refinement_of_tent() {
        let g = sample_grid(&tent(0.3), 2).unwrap();
        assert_eq!(g.values().len(), 5);
        assert!((g.values()[1] - 0.8).abs() < 1e-15);
        assert_eq!(g.values()[2], 1.0);
        assert!((g.values()[3] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn level_zero_and_one() {
        let p = tent(0.3);
        assert_eq!(sample_grid(&p, 0).unwrap().values(), &[0.0, 0.0]);
        assert_eq!(sample_grid(&p, 1).unwrap().values(), &p.y[..]);
    }

    #[test]
    fn zero_gamma_gives_linear_interpolant() {
        let g = sample_grid(&tent(0.0), 6).unwrap();
        for (i, v) in g.values().iter().enumerate() {
            let x = g.x(i);
            let hat = if x <= 0.5 { 2.0 * x } else { 2.0 - 2.0 * x };
            assert!((v - hat).abs() < 1e-15);
        }
        assert_eq!(g.values()[16], 0.5);
    }

    #[test]
    fn knots_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=4 {
            let p = random_admissible(&mut rng, n, 3, 0.9);
            let g = sample_grid(&p, 5).unwrap();
            let stride = n.pow(4);
            for (i, y) in p.y.iter().enumerate() {
                assert_eq!(g.values()[i * stride], *y);
            }
        }
    }

    #[test]
    fn restriction_is_exact() {
        let p = tent(0.6);
        let fine = sample_grid(&p, 10).unwrap();
        let coarse = sample_grid(&p, 9).unwrap();
        assert_eq!(fine.coarsen().unwrap(), coarse);
    }

    #[test]
    fn invalid_problem_is_rejected() {
        let mut p = tent(0.3);
        p.gamma[0] = 1.2;
        assert!(matches!(sample_grid(&p, 3), Err(FifError::Invalid(_))));
    }

    #[test]
    fn memory_guard() {
        assert!(matches!(sample_grid(&tent(0.3), 40), Err(FifError::Resource(_))));
    }

    #[test]
    fn rb_iteration_converges_to_grid() {
        let p = tent(0.3);
        let exact = sample_grid(&p, 8).unwrap();
        let start = FifGrid::zeros(2, 8).unwrap();
        let it = rb_iterate(&p, &start, 40).unwrap();
        assert!(it.sup_distance(&exact) <= 1e-12);
    }

    #[test]
    fn rb_iteration_contracts_geometrically() {
        let p = tent(0.3);
        let exact = sample_grid(&p, 6).unwrap();
        let start = FifGrid::from_values(2, 6, (0..=64).map(|i| ((i as f64) * 0.7).sin() * (i as f64 / 64.0) * (1.0 - i as f64 / 64.0)).collect()).unwrap();
        let d0 = start.sup_distance(&exact);
        for n in 1..6 {
            let d = rb_iterate(&p, &start, n).unwrap().sup_distance(&exact);
            assert!(d <= 0.3_f64.powi(n as i32) * d0 + 1e-15, "n={n}");
        }
    }

    #[test]
    fn rb_with_zero_gamma_converges_in_one_step() {
        let p = tent(0.0);
        let start = FifGrid::from_values(2, 3, vec![0.0, 5.0, -1.0, 2.0, 7.0, 1.0, 1.0, 3.0, 0.0]).unwrap();
        let one = rb_iterate(&p, &start, 1).unwrap();
        assert_eq!(one, sample_grid(&p, 3).unwrap());
        assert_eq!(rb_iterate(&p, &start, 0).unwrap(), start);
    }

    #[test]
    fn rb_rejects_mismatched_grid() {
        let start = FifGrid::zeros(3, 2).unwrap();
        assert!(matches!(rb_iterate(&tent(0.3), &start, 1), Err(FifError::Domain(_))));
    }

    #[test]
    fn point_evaluation() {
        let p = tent(0.3);
        for depth in 0..6 {
            assert_eq!(evaluate_point(&p, 0.5, depth).unwrap().value, 1.0);
        }
        let v = evaluate_point(&p, 0.25, 2).unwrap();
        assert!((v.value - 0.8).abs() < 1e-15);
        let b = v.error_bound / 0.09;
        assert!((v.error_bound - 0.09 * b).abs() < 1e-15);
        assert_eq!(sample_grid(&p, 2).unwrap().values()[1], v.value);

        let flat = tent(0.0);
        let v = evaluate_point(&flat, 0.3, 1).unwrap();
        assert!((v.value - 0.6).abs() < 1e-15);
        assert_eq!(v.error_bound, 0.0);
    }

    #[test]
    fn point_evaluation_is_within_bound_of_grid() {
        let p = tent(0.6);
        let g = sample_grid(&p, 12).unwrap();
        for i in (0..=g.cells()).step_by(37) {
            for depth in [1, 4, 8, 20] {
                let v = evaluate_point(&p, g.x(i), depth).unwrap();
                assert!((v.value - g.values()[i]).abs() <= v.error_bound + 1e-12);
            }
        }
    }

    #[test]
    fn adjacent_jumps_shrink_with_level() {
        let p = tent(0.3);
        let jumps: Vec<f64> = (1..=12).map(|j| sample_grid(&p, j).unwrap().max_adjacent_jump()).collect();
        for w in jumps.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = sample_grid(&tent(0.3), 3).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,f");
        assert_eq!(lines.len(), 10);
        let row: Vec<f64> = lines[5].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row, vec![0.5, 1.0]);
    }

    proptest! {
        #[test]
        fn functional_equation_residual(seed in 0u64..1000, n in 2usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_admissible(&mut rng, n, 3, 0.95);
            let level = match n { 2 => 9, 3 => 6, _ => 5 };
            let g = sample_grid(&p, level).unwrap();
            let coarse = n.pow(level - 1);
            let scale = 1.0 + g.sup_norm();
            for i in (0..=coarse).step_by(7) {
                for k in 0..n {
                    let fine = g.values()[k * coarse + i];
                    let rhs = p.gamma[k] * g.values()[i * n] + p.q[k].eval(i as f64 / coarse as f64);
                    prop_assert!((fine - rhs).abs() <= 1e-12 * scale);
                }
            }
        }
    }
}
