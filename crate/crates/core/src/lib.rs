//! Fractal interpolation functions on uniform knots: exact sampling, the
//! Fourier transform as a factorized series, the continuous wavelet
//! transform by direct and Fourier-domain quadrature, and empirical checks
//! of the wavelet decay bounds.

pub mod acceptance;
pub mod cwt;
pub mod error;
pub mod fixtures;
mod format;
pub mod grid;
pub mod poly;
pub mod problem;
pub mod quadrature;
pub mod regularity;
pub mod spectrum;
pub mod wavelet;

pub use acceptance::{run_all, AcceptanceReport, Check, CriterionResult};
pub use cwt::{
    cwt_direct, cwt_fourier, cwt_q_piece, recursion_residual, scalogram, CwtMethod, DirectCwt,
    FourierCwt, ScalogramGrid, WaveletTransform,
};
pub use error::{FifError, Result};
pub use format::fmt_f64;
pub use grid::{evaluate_point, rb_iterate, sample_grid, FifGrid, PointValue};
pub use poly::Polynomial;
pub use problem::{InterpolationProblem, ValidationReport, Violation};
pub use regularity::{constants, fit_decay_exponent, verify_lip_bound, verify_o_of_s, RegularityReport};
pub use spectrum::{ft_quadrature, SeriesValue, SpectrumEvaluator, SpectrumMethod};
pub use wavelet::CauchyWavelet;
