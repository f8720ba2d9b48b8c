//! Shared inputs for the criterion benches.

use fif_core::fixtures::tent;
use fif_core::{sample_grid, FifGrid, InterpolationProblem};

/// The tent problem with `γ = 0.3` and its grid at `level`.
pub fn tent_with_grid(level: u32) -> (InterpolationProblem, FifGrid) {
    let problem = tent(0.3);
    let grid = sample_grid(&problem, level).expect("tent fixture is valid");
    (problem, grid)
}
