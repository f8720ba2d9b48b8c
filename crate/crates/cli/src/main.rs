//! `fif`: sampling, spectra, scalograms and decay checks for fractal
//! interpolation functions.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use fif_core::cwt::{dyadic_scales, uniform_translations, DirectCwt, FourierCwt, ScalogramGrid};
use fif_core::regularity::{self, DEFAULT_TRANSLATIONS};
use fif_core::spectrum::{ft_quadrature, write_spectrum_csv, DEFAULT_TAIL_TOLERANCE};
use fif_core::{
    acceptance, rb_iterate, sample_grid, scalogram, CauchyWavelet, FifError, FifGrid, InterpolationProblem,
    SeriesValue, SpectrumEvaluator, SpectrumMethod,
};

use output::{sibling, write_atomic};

const EXIT_INVALID: u8 = 2;
const EXIT_GUARD: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "fif", version, about = "Fractal interpolation functions: samples, spectra, wavelet transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample f on the N-adic grid of a given level.
    Sample(SampleArgs),
    /// Fourier transform over a range of frequencies.
    Spectrum(SpectrumArgs),
    /// Wavelet scalogram over dyadic scales.
    Cwt(CwtArgs),
    /// Decay constants, bound check and exponent fit.
    Regularity(RegularityArgs),
    /// Run every acceptance criterion.
    VerifyAll(VerifyArgs),
}

#[derive(Debug, Args)]
struct ProblemArg {
    /// Problem file (JSON).
    #[arg(long, short = 'p')]
    problem: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SampleMethod {
    /// Exact N-adic recursion.
    Exact,
    /// Fixed-point iteration from the zero function.
    Iterate,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    problem: ProblemArg,
    #[arg(long, default_value_t = 10)]
    level: u32,
    #[arg(long, value_enum, default_value_t = SampleMethod::Exact)]
    method: SampleMethod,
    /// Iterations for `--method iterate`.
    #[arg(long, default_value_t = 40)]
    iterations: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OmegaScale {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpectrumChoice {
    Series,
    Brute,
    Closed,
    Linear,
    Quad,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    problem: ProblemArg,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    omega_start: f64,
    #[arg(long, default_value_t = 200.0, allow_negative_numbers = true)]
    omega_stop: f64,
    #[arg(long, default_value_t = 64)]
    omega_steps: usize,
    #[arg(long, value_enum, default_value_t = OmegaScale::Log)]
    omega_scale: OmegaScale,
    /// Series truncation J; by default the smallest J with tail below 1e-10.
    #[arg(long)]
    trunc: Option<usize>,
    #[arg(long, value_enum, default_value_t = SpectrumChoice::Series)]
    method: SpectrumChoice,
    /// Grid level for `--method quad`.
    #[arg(long, default_value_t = 16)]
    level: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CwtChoice {
    Direct,
    Fourier,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Debug, Args)]
struct ScaleArgs {
    /// Coarsest scale is 2^-min.
    #[arg(long, default_value_t = regularity::DEFAULT_SCALE_EXPONENTS.0, allow_negative_numbers = true)]
    scale_min_exp: i32,
    /// Finest scale is 2^-max.
    #[arg(long, default_value_t = regularity::DEFAULT_SCALE_EXPONENTS.1, allow_negative_numbers = true)]
    scale_max_exp: i32,
    /// Equally spaced translations over [0, 1].
    #[arg(long, default_value_t = DEFAULT_TRANSLATIONS)]
    t_steps: usize,
    #[arg(long, default_value_t = 4)]
    wavelet_order: u32,
    /// Grid level of the direct path.
    #[arg(long, default_value_t = 16)]
    level: u32,
}

#[derive(Debug, Args)]
struct CwtArgs {
    #[command(flatten)]
    problem: ProblemArg,
    #[command(flatten)]
    scales: ScaleArgs,
    #[arg(long, value_enum, default_value_t = CwtChoice::Direct)]
    method: CwtChoice,
    /// Integrate against conj ψ (on) or ψ (off); direct path only.
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    conjugate: Toggle,
    /// Direct output; `--method both` adds a `-fourier` sibling.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RegularityArgs {
    #[command(flatten)]
    problem: ProblemArg,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[command(flatten)]
    scales: ScaleArgs,
    #[arg(long, value_enum, default_value_t = CwtChoice::Direct)]
    method: CwtChoice,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Failure carrying its exit status.
#[derive(Debug)]
struct Exit(u8, String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(Exit(code, _)) = err.downcast_ref::<Exit>() {
        return *code;
    }
    match err.downcast_ref::<FifError>() {
        Some(FifError::Accuracy(_) | FifError::Precondition(_) | FifError::Resource(_)) => EXIT_GUARD,
        Some(_) => EXIT_INVALID,
        None => 1,
    }
}

fn load(path: &Path) -> anyhow::Result<InterpolationProblem> {
    let p = InterpolationProblem::load(path).with_context(|| format!("reading {}", path.display()))?;
    p.ensure_valid().with_context(|| format!("validating {}", path.display()))?;
    Ok(p)
}

fn omegas(args: &SpectrumArgs) -> anyhow::Result<Vec<f64>> {
    let (a, b, n) = (args.omega_start, args.omega_stop, args.omega_steps);
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(FifError::Domain("omega range needs finite ends and at least one step".into()).into());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let frac = |i: usize| i as f64 / (n - 1) as f64;
    match args.omega_scale {
        OmegaScale::Linear => Ok((0..n).map(|i| a + (b - a) * frac(i)).collect()),
        OmegaScale::Log => {
            if !(a > 0.0 && b > 0.0) {
                return Err(FifError::Domain("log spacing needs positive omega bounds".into()).into());
            }
            let (la, lb) = (a.ln(), b.ln());
            Ok((0..n).map(|i| (la + (lb - la) * frac(i)).exp()).collect())
        }
    }
}

fn run_sample(args: SampleArgs) -> anyhow::Result<()> {
    let p = load(&args.problem.problem)?;
    let grid = match args.method {
        SampleMethod::Exact => sample_grid(&p, args.level)?,
        SampleMethod::Iterate => rb_iterate(&p, &FifGrid::zeros(p.n, args.level)?, args.iterations)?,
    };
    write_atomic(args.out.as_deref(), |w| grid.write_csv(w))
}

fn run_spectrum(args: SpectrumArgs) -> anyhow::Result<()> {
    let p = load(&args.problem.problem)?;
    let ev = match args.trunc {
        Some(j) => SpectrumEvaluator::new(&p, j)?,
        None => SpectrumEvaluator::with_tail_tolerance(&p, DEFAULT_TAIL_TOLERANCE)?,
    };
    let oms = omegas(&args)?;
    let rows: Vec<(f64, SeriesValue)> = match args.method {
        SpectrumChoice::Quad => {
            let grid = sample_grid(&p, args.level)?;
            oms.iter()
                .map(|&om| {
                    ft_quadrature(&grid, om).map(|value| {
                        (
                            om,
                            SeriesValue {
                                value,
                                tail_bound: f64::NAN,
                            },
                        )
                    })
                })
                .collect::<Result<_, _>>()?
        }
        choice => {
            let method = match choice {
                SpectrumChoice::Series => SpectrumMethod::Series,
                SpectrumChoice::Brute => SpectrumMethod::Brute,
                SpectrumChoice::Closed => SpectrumMethod::Closed,
                _ => SpectrumMethod::Linear,
            };
            oms.iter()
                .map(|&om| ev.evaluate(method, om).map(|v| (om, v)))
                .collect::<Result<_, _>>()?
        }
    };
    write_atomic(args.out.as_deref(), |w| write_spectrum_csv(w, &rows))
}

struct Scalograms {
    direct: Option<ScalogramGrid>,
    fourier: Option<ScalogramGrid>,
}

fn compute_scalograms(
    p: &InterpolationProblem,
    args: &ScaleArgs,
    method: CwtChoice,
    conjugate: bool,
) -> anyhow::Result<Scalograms> {
    if args.scale_max_exp < args.scale_min_exp {
        return Err(FifError::Domain("--scale-max-exp must not be below --scale-min-exp".into()).into());
    }
    let w = CauchyWavelet::new(args.wavelet_order)?;
    let scales = dyadic_scales(args.scale_min_exp, args.scale_max_exp);
    let ts = uniform_translations(args.t_steps);
    let direct = if method != CwtChoice::Fourier {
        let grid = sample_grid(p, args.level)?;
        let engine = DirectCwt::new(&grid, w).with_conjugate(conjugate);
        Some(scalogram(&engine, &scales, &ts)?)
    } else {
        None
    };
    let fourier = if method != CwtChoice::Direct {
        let ev = SpectrumEvaluator::with_tail_tolerance(p, 1e-14)?;
        Some(scalogram(&FourierCwt::new(&ev, w), &scales, &ts)?)
    } else {
        None
    };
    Ok(Scalograms { direct, fourier })
}

fn run_cwt(args: CwtArgs) -> anyhow::Result<()> {
    let p = load(&args.problem.problem)?;
    let conjugate = args.conjugate == Toggle::On;
    if !conjugate && args.method != CwtChoice::Direct {
        return Err(FifError::Domain("--conjugate off applies to the direct path only".into()).into());
    }
    let sc = compute_scalograms(&p, &args.scales, args.method, conjugate)?;
    match (sc.direct, sc.fourier) {
        (Some(d), Some(f)) => {
            let dev = d.max_relative_deviation(&f)?;
            eprintln!("max relative deviation direct vs fourier: {dev:.3e}");
            let Some(out) = args.out.as_deref() else {
                return Err(FifError::Domain("--method both needs --out".into()).into());
            };
            write_atomic(Some(out), |w| d.write_csv(w))?;
            write_atomic(Some(&sibling(out, "fourier")), |w| f.write_csv(w))
        }
        (Some(g), None) | (None, Some(g)) => write_atomic(args.out.as_deref(), |w| g.write_csv(w)),
        (None, None) => unreachable!("at least one path is selected"),
    }
}

fn run_regularity(args: RegularityArgs) -> anyhow::Result<()> {
    let p = load(&args.problem.problem)?;
    if args.method == CwtChoice::Both {
        return Err(FifError::Domain("regularity takes a single method".into()).into());
    }
    let mut report = regularity::constants(&p, args.delta)?;
    let sc = compute_scalograms(&p, &args.scales, args.method, true)?;
    let grid = sc.direct.or(sc.fourier).expect("one path selected");
    let w = CauchyWavelet::new(args.scales.wavelet_order)?;
    let level = (args.method == CwtChoice::Direct).then_some(args.scales.level);
    regularity::annotate(&mut report, &p, &grid, &w, level);
    let json = report.to_json();
    write_atomic(args.report.as_deref(), |out| writeln!(out, "{json}"))?;
    if report.lip_bound_ok == Some(false) {
        return Err(Exit(
            EXIT_GUARD,
            format!(
                "decay bound exceeded: worst ratio {:.3e}",
                report.lip_worst_ratio.unwrap_or(f64::NAN)
            ),
        )
        .into());
    }
    Ok(())
}

fn run_verify(args: VerifyArgs) -> anyhow::Result<()> {
    let mut criteria = Vec::new();
    for (_, run) in acceptance::CRITERIA {
        let r = run();
        println!("{}", r.line());
        for note in &r.notes {
            println!("       {note}");
        }
        criteria.push(r);
    }
    let report = acceptance::AcceptanceReport {
        all_passed: criteria.iter().all(|c| c.passed),
        criteria,
    };
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    if let Some(path) = args.report.as_deref() {
        let json = report.to_json();
        write_atomic(Some(path), |out| writeln!(out, "{json}"))?;
    }
    println!("{} of {} criteria passed", report.criteria.len() - failed, report.criteria.len());
    if failed > 0 {
        return Err(Exit(EXIT_GUARD, format!("{failed} criteria failed")).into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => run_sample(a),
        Command::Spectrum(a) => run_spectrum(a),
        Command::Cwt(a) => run_cwt(a),
        Command::Regularity(a) => run_regularity(a),
        Command::VerifyAll(a) => run_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&FifError::Accuracy("x".into()).into()), EXIT_GUARD);
        assert_eq!(exit_code(&FifError::Domain("x".into()).into()), EXIT_INVALID);
        let io = FifError::Io(std::io::Error::from(std::io::ErrorKind::NotFound));
        assert_eq!(exit_code(&anyhow::Error::from(io).context("reading")), EXIT_INVALID);
        assert_eq!(exit_code(&Exit(EXIT_GUARD, "x".into()).into()), EXIT_GUARD);
    }
}
