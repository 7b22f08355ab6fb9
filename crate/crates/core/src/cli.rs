//! Command-line front end and experiment harness: argument parsing, n-sweeps,
//! the invariant suite, and report emission.
//!
//! Every JSON report is wrapped in an [`Envelope`] carrying the tool version,
//! seeds, budgets and formula ids, and nothing time-dependent, so equal
//! configurations produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, BoundInputs, BoundReport, FormulaId};
use crate::domains::{self, Domain, VolumeEstimate};
use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, Exponent, NormSpec};
use crate::pointopt::{self, Objective, OptimizerConfig};
use crate::points::PointSet;
use crate::spectral::{self, Boundary, BoundKind, Spectrum, WeylEstimate};
use crate::wce::{self, CoverMode, ErrorReport, InformationMap, Modulus, ReportKind};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const INVARIANT: i32 = 1;
    pub const CONFIG: i32 = 2;
}

/// Exit code for an error: bad input is a configuration error, anything that
/// fails during computation counts as an invariant failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged(_) | Error::NoPlateau(_) | Error::ThinDomain { .. } => exit::INVARIANT,
        _ => exit::CONFIG,
    }
}

#[derive(Debug, Parser)]
#[command(name = "lipbound", version, about = "Worst-case error bounds for Lipschitz approximation and integration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Domain JSON file (`box`, `ball_union` or builtin `mask`).
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Node CSV file, one point per row.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Norm exponent: a number ≥ 1 or `inf`.
    #[arg(long, default_value = "2")]
    pub norm_p: String,
    /// Node counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Monte Carlo sample budget.
    #[arg(long, default_value_t = 200_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for sweep items.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output file (or prefix for multi-file outputs); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volume of a domain.
    Volume(Common),
    /// Covering radius of a node set.
    Cover {
        #[command(flatten)]
        common: Common,
        /// Certification width.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Sample maximum instead of branch and bound.
        #[arg(long)]
        monte_carlo: bool,
    },
    /// Worst-case errors for L∞ recovery and integration.
    Wce {
        #[command(flatten)]
        common: Common,
        /// Hölder exponent of ω(h) = h^α.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Optimize a node set; writes CSV plus a JSON trace.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Covering)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 40)]
        iterations: usize,
    },
    /// n-sweep with bound brackets and a log-log fit; writes JSON and CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SweepKind::Optimized)]
        kind: SweepKind,
        #[arg(long, default_value_t = 2)]
        restarts: usize,
        #[arg(long, default_value_t = 30)]
        iterations: usize,
        /// Certification width relative to n^{-1/d}.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Evaluate a closed-form bound.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        d: Option<usize>,
        /// Alias of `--norm-p`.
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        vol: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        c_r: Option<f64>,
    },
    /// Laplacian eigenvalues on a masked grid.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value = "dirichlet")]
        bc: String,
        #[arg(long, default_value_t = 50)]
        k: usize,
    },
    /// Compare Weyl-constant estimates across spectra.
    Weyl {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 1.., required = true)]
        spectra: Vec<PathBuf>,
        /// Largest accepted relative spread.
        #[arg(long, default_value_t = 0.10)]
        tol: f64,
    },
    /// Run the invariant suite.
    Verify(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveArg {
    Covering,
    Quantization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// Optimized nodes on the given domain.
    Optimized,
    /// Cell-center grids on a box (n rounded to m^d).
    Grid,
    /// Extremal ball unions, where the uniform lower bounds are attained.
    Extremal,
}

/// Report wrapper shared by all commands.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seeds: Vec<u64>,
    pub budgets: Vec<usize>,
    pub formulas: Vec<FormulaId>,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &str, seeds: Vec<u64>, budgets: Vec<usize>, formulas: Vec<FormulaId>, result: T) -> Self {
        Self { tool: "lipbound", version: VERSION, command: command.into(), seeds, budgets, formulas, result }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Validated settings behind a command.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: String,
    pub domain: Option<Domain>,
    pub domain_path: Option<PathBuf>,
    pub points: Option<PointSet>,
    pub norm: NormSpec,
    pub ns: Vec<usize>,
    pub budget: usize,
    pub seed: u64,
    pub jobs: usize,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_common(command: &str, c: &Common) -> Result<Self> {
        let domain = match &c.domain {
            Some(p) => Some(Domain::from_json(&read_file(p)?)?),
            None => None,
        };
        let points = match &c.points {
            Some(p) => Some(PointSet::from_csv(&read_file(p)?)?),
            None => None,
        };
        let cfg = Self {
            command: command.into(),
            domain,
            domain_path: c.domain.clone(),
            points,
            norm: parse_norm(&c.norm_p)?,
            ns: c.n.clone(),
            budget: c.budget,
            seed: c.seed,
            jobs: c.jobs,
            out: c.out.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&bad) = self.ns.iter().find(|&&n| n == 0) {
            return Err(Error::InvalidArgument(format!("n values must be >= 1, got {bad}")));
        }
        if self.budget == 0 {
            return Err(Error::InvalidArgument("--budget must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be positive".into()));
        }
        if let (Some(d), Some(p)) = (&self.domain, &self.points) {
            crate::error::check_dim(d.dim(), p.dim())?;
        }
        Ok(())
    }

    fn need_domain(&self) -> Result<&Domain> {
        self.domain.as_ref().ok_or_else(|| Error::InvalidArgument("needs --domain".into()))
    }

    fn need_points(&self) -> Result<&PointSet> {
        self.points.as_ref().ok_or_else(|| Error::InvalidArgument("needs --points".into()))
    }

    fn need_n(&self) -> Result<usize> {
        match self.ns.as_slice() {
            [n] => Ok(*n),
            [] => Err(Error::InvalidArgument("needs --n".into())),
            _ => Err(Error::InvalidArgument("expects a single --n".into())),
        }
    }
}

pub fn parse_norm(p: &str) -> Result<NormSpec> {
    NormSpec::new(p.parse::<Exponent>()?, None)
}

fn read_file(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", p.display())))
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---- sweep ----

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub domain: Domain,
    pub norm: NormSpec,
    pub ns: Vec<usize>,
    pub seed: u64,
    pub budget: usize,
    pub jobs: usize,
    pub restarts: usize,
    pub iterations: usize,
    /// Certification width relative to `n^{-1/d}`.
    pub tol: f64,
}

impl SweepConfig {
    pub fn square_linf(ns: Vec<usize>) -> Self {
        Self {
            kind: SweepKind::Optimized,
            domain: Domain::unit_cube(2),
            norm: NormSpec::linf(),
            ns,
            seed: 1,
            budget: 200_000,
            jobs: 1,
            restarts: 2,
            iterations: 30,
            tol: 1e-4,
        }
    }
}

/// Radius of each extremal ball and the center spacing.
const EXTREMAL_DELTA: f64 = 0.1;
const EXTREMAL_SPACING: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    /// Covering radius (the L∞ worst-case error for ω = id).
    pub error: Option<f64>,
    pub error_kind: Option<ReportKind>,
    pub error_lo: Option<f64>,
    pub error_hi: Option<f64>,
    pub volume: Option<f64>,
    /// Uniform lower bound `(vol / (n λ(B)))^{1/d}`.
    pub lower: Option<f64>,
    /// Asymptote bracket for `e_n n^{1/d}`-scaled error, times `n^{-1/d}`.
    pub asymptote_lo: Option<f64>,
    pub asymptote_hi: Option<f64>,
    pub ratio: Option<f64>,
    /// `error · n^{1/d} · vol^{-1/d}`.
    pub scaled: Option<f64>,
    pub integration: Option<f64>,
    pub integration_stderr: Option<f64>,
    pub integration_lower: Option<f64>,
    pub integration_ratio: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub kind: SweepKind,
    pub domain: Option<String>,
    pub norm: NormSpec,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `log error` against `log n`.
    pub slope: Option<f64>,
    /// `exp(intercept)` of that fit.
    pub fit_prefactor: Option<f64>,
    /// `error · n^{1/d} · vol^{-1/d}` at the largest successful `n`.
    pub prefactor: Option<f64>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let f = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.12e}"));
        let mut s = String::from(
            "n,error,error_lo,error_hi,volume,lower,asymptote_lo,asymptote_hi,ratio,scaled,integration,integration_stderr,integration_lower,integration_ratio,failure\n",
        );
        for r in &self.rows {
            let cols = [
                r.n.to_string(),
                f(r.error),
                f(r.error_lo),
                f(r.error_hi),
                f(r.volume),
                f(r.lower),
                f(r.asymptote_lo),
                f(r.asymptote_hi),
                f(r.ratio),
                f(r.scaled),
                f(r.integration),
                f(r.integration_stderr),
                f(r.integration_lower),
                f(r.integration_ratio),
                r.failure.clone().unwrap_or_default().replace(',', ";"),
            ];
            s.push_str(&cols.join(","));
            s.push('\n');
        }
        s
    }
}

/// Least-squares `(slope, intercept)` of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn sweep_row(cfg: &SweepConfig, n: usize, idx: usize) -> Result<SweepRow> {
    let d = cfg.domain.dim();
    let df = d as f64;
    let seed = pointopt::derive_seed(cfg.seed, 0x5eeb, idx as u64);
    let (domain, nodes) = match cfg.kind {
        SweepKind::Optimized => {
            let oc = OptimizerConfig { seed, restarts: cfg.restarts, iterations: cfg.iterations, ..Default::default() };
            (cfg.domain.clone(), pointopt::optimize(&cfg.domain, n, &cfg.norm, &oc)?.points)
        }
        SweepKind::Grid => {
            let m = (n as f64).powf(1.0 / df).round().max(1.0) as usize;
            (cfg.domain.clone(), pointopt::make_grid_points(&cfg.domain, m)?)
        }
        SweepKind::Extremal => pointopt::make_extremal_ball_union(n, EXTREMAL_DELTA, d, &cfg.norm, EXTREMAL_SPACING)?,
    };
    let n_eff = nodes.len();
    let vol = domains::volume(&domain, cfg.budget, seed)?;
    let info = InformationMap::new(domain.clone(), nodes, cfg.norm.clone())?;
    let tol = cfg.tol * (vol.value / n_eff as f64).powf(1.0 / df);
    let cover = match wce::covering_radius(&info, CoverMode::certified(tol)) {
        Err(Error::Unsupported(_)) => wce::covering_radius(&info, CoverMode::MonteCarlo { budget: cfg.budget, seed })?,
        other => other?,
    };
    let nf = n_eff as f64;
    let lower = bounds::linf_uniform_lower(nf, d, &cfg.norm, vol.value)?;
    let asy = bounds::linf_asymptote(nf, d, &cfg.norm, vol.value)?;
    let mut row = SweepRow {
        n: n_eff,
        error: Some(cover.value),
        error_kind: Some(cover.kind),
        error_lo: cover.lo,
        error_hi: cover.hi,
        volume: Some(vol.value),
        lower: Some(lower.value),
        asymptote_lo: Some(asy.lo),
        asymptote_hi: Some(asy.hi),
        ratio: Some(cover.value / lower.value),
        scaled: Some(cover.value * (nf / vol.value).powf(1.0 / df)),
        integration: None,
        integration_stderr: None,
        integration_lower: None,
        integration_ratio: None,
        failure: None,
    };
    if cfg.kind == SweepKind::Extremal {
        let int = wce::wce_integration(&info, &Modulus::Identity, cfg.budget, seed ^ 1)?;
        let lo4 = bounds::int_uniform_lower(nf, d, &cfg.norm, vol.value)?;
        row.integration = Some(int.value);
        row.integration_stderr = int.stderr;
        row.integration_lower = Some(lo4.value);
        row.integration_ratio = Some(int.value / lo4.value);
    }
    Ok(row)
}

/// Runs every `n` (concurrently up to `jobs`); failures are recorded per row.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    if cfg.ns.is_empty() {
        return Err(Error::InvalidArgument("needs --n".into()));
    }
    if cfg.kind == SweepKind::Grid && !matches!(cfg.domain, Domain::Box(_)) {
        return Err(Error::InvalidArgument("grid sweeps need a box domain".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        cfg.ns
            .par_iter()
            .enumerate()
            .map(|(i, &n)| {
                sweep_row(cfg, n, i).unwrap_or_else(|e| SweepRow {
                    n,
                    error: None,
                    error_kind: None,
                    error_lo: None,
                    error_hi: None,
                    volume: None,
                    lower: None,
                    asymptote_lo: None,
                    asymptote_hi: None,
                    ratio: None,
                    scaled: None,
                    integration: None,
                    integration_stderr: None,
                    integration_lower: None,
                    integration_ratio: None,
                    failure: Some(e.to_string()),
                })
            })
            .collect()
    });
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.error.is_some()).collect();
    let xs: Vec<f64> = ok.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = ok.iter().map(|r| r.error.unwrap_or(f64::NAN).ln()).collect();
    let fit = linear_fit(&xs, &ys);
    let prefactor = ok.iter().max_by_key(|r| r.n).and_then(|r| r.scaled);
    Ok(SweepReport {
        kind: cfg.kind,
        domain: cfg.domain.to_json().ok(),
        norm: cfg.norm.clone(),
        rows,
        slope: fit.map(|f| f.0),
        fit_prefactor: fit.map(|f| f.1.exp()),
        prefactor,
    })
}

// ---- verify ----

/// Signature of a unit-ball volume formula, replaceable for mutation tests.
pub type BallVolumeFn = fn(usize, &NormSpec) -> Result<f64>;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub ball_volume: BallVolumeFn,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 0, ball_volume: unit_ball_volume }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifySummary {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn verdicts(&self) -> Vec<(&'static str, bool)> {
        self.checks.iter().map(|c| (c.name, c.pass)).collect()
    }
}

type Check = (&'static str, &'static str, fn(&VerifyOptions) -> Result<(bool, String)>);

const CHECKS: &[Check] = &[
    ("geometry", "ball-volume-closed-forms", check_ball_volumes),
    ("domains", "monte-carlo-volume", check_mc_volume),
    ("wce", "grid-covering-identity", check_grid_cover),
    ("wce", "extremal-lower-bound-sharpness", check_extremal_sharpness),
    ("wce", "extremal-integration-sharpness", check_extremal_integration),
    ("wce", "radius-of-information-inequality", check_radius_inequality),
    ("bounds", "lower-bound-never-violated", check_lower_never_violated),
    ("bounds", "curse-coefficient", check_curse),
    ("pointopt", "fooling-certificate", check_fooling),
    ("pointopt", "optimizer-beats-greedy", check_optimizer),
    ("spectral", "interval-closed-form", check_interval_spectrum),
    ("spectral", "li-yau-square", check_li_yau),
];

/// Runs every invariant check with fixed seeds derived from `opts.seed`.
pub fn run_verify(opts: &VerifyOptions) -> VerifySummary {
    let checks: Vec<CheckResult> = CHECKS
        .iter()
        .map(|(module, name, f)| {
            let (pass, detail) = f(opts).unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckResult { module, name, pass, detail }
        })
        .collect();
    let passed = checks.iter().filter(|c| c.pass).count();
    VerifySummary { seed: opts.seed, failed: checks.len() - passed, passed, checks }
}

fn check_ball_volumes(_: &VerifyOptions) -> Result<(bool, String)> {
    let pi = std::f64::consts::PI;
    let cases = [
        (unit_ball_volume(2, &NormSpec::l2())?, pi),
        (unit_ball_volume(3, &NormSpec::l2())?, 4.0 * pi / 3.0),
        (unit_ball_volume(4, &NormSpec::linf())?, 16.0),
        (unit_ball_volume(3, &NormSpec::l1())?, 8.0 / 6.0),
    ];
    let worst = cases.iter().map(|(a, b)| ((a - b) / b).abs()).fold(0.0, f64::max);
    Ok((worst < 1e-12, format!("max relative error {worst:.1e}")))
}

fn check_mc_volume(o: &VerifyOptions) -> Result<(bool, String)> {
    let disk = Domain::ball(vec![0.0, 0.0], 1.0, NormSpec::l2())?;
    let v = domains::volume_monte_carlo(&disk, 200_000, o.seed)?;
    let dev = (v.value - std::f64::consts::PI).abs();
    Ok((dev <= 4.0 * v.stderr, format!("{:.5} ± {:.5}", v.value, v.stderr)))
}

fn check_grid_cover(_: &VerifyOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for d in 1..=2 {
        for m in 1..=4 {
            let dom = Domain::unit_cube(d);
            let info = InformationMap::new(dom.clone(), pointopt::make_grid_points(&dom, m)?, NormSpec::linf())?;
            let r = wce::covering_radius(&info, CoverMode::certified(1e-7))?;
            worst = worst.max((r.value - 0.5 / m as f64).abs());
        }
    }
    Ok((worst <= 1e-6, format!("max deviation {worst:.1e}")))
}

fn check_extremal_sharpness(o: &VerifyOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for (n, d, p) in [(3usize, 2usize, "2"), (10, 2, "inf"), (3, 3, "2")] {
        let norm = parse_norm(p)?;
        let (dom, nodes) = pointopt::make_extremal_ball_union(n, EXTREMAL_DELTA, d, &norm, EXTREMAL_SPACING)?;
        let vol = dom.exact_volume().ok_or_else(|| Error::InvalidDomain("extremal union lost its volume".into()))?;
        let info = InformationMap::new(dom, nodes, norm.clone())?;
        let r = wce::covering_radius(&info, CoverMode::certified(1e-8))?;
        let formula = (vol / (n as f64 * (o.ball_volume)(d, &norm)?)).powf(1.0 / d as f64);
        worst = worst.max((r.value - formula).abs());
    }
    Ok((worst <= 1e-6, format!("max |radius − bound| {worst:.1e}")))
}

fn check_extremal_integration(o: &VerifyOptions) -> Result<(bool, String)> {
    let norm = NormSpec::l2();
    let (n, d) = (3usize, 2usize);
    let (dom, nodes) = pointopt::make_extremal_ball_union(n, EXTREMAL_DELTA, d, &norm, EXTREMAL_SPACING)?;
    let vol = dom.exact_volume().unwrap_or(f64::NAN);
    let info = InformationMap::new(dom, nodes, norm.clone())?;
    let rep = wce::wce_integration(&info, &Modulus::Identity, 200_000, o.seed)?;
    let lam = (o.ball_volume)(d, &norm)?;
    let formula = d as f64 / (d as f64 + 1.0) * vol * (vol / (n as f64 * lam)).powf(1.0 / d as f64);
    let se = rep.stderr.unwrap_or(0.0);
    let pass = (rep.value - formula).abs() <= (3.0 * se).max(1e-6);
    Ok((pass, format!("{:.6} vs {formula:.6} (stderr {se:.1e})", rep.value)))
}

fn random_configs(seed: u64, count: usize) -> Result<Vec<(Domain, PointSet, NormSpec)>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let d = 1 + i % 3;
        let norm = [NormSpec::l2(), NormSpec::linf(), NormSpec::l1()][rng.gen_range(0..3)].clone();
        let lo: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..0.0)).collect();
        let hi: Vec<f64> = lo.iter().map(|l| l + rng.gen_range(0.3..1.5)).collect();
        let dom = if i % 2 == 0 {
            Domain::new_box(lo, hi)?
        } else {
            Domain::ball(lo.clone(), rng.gen_range(0.3..1.0), norm.clone())?
        };
        let n = rng.gen_range(1..12);
        let nodes = domains::sample_uniform(&dom, n, rng.gen())?;
        out.push((dom, nodes, norm));
    }
    Ok(out)
}

fn check_radius_inequality(o: &VerifyOptions) -> Result<(bool, String)> {
    let mut worst = f64::NEG_INFINITY;
    for (i, (dom, nodes, norm)) in random_configs(o.seed ^ 0xa11, 10)?.into_iter().enumerate() {
        let d = dom.dim() as f64;
        let vol = dom.exact_volume().unwrap_or(f64::NAN);
        let info = InformationMap::new(dom, nodes, norm)?;
        let int = wce::wce_integration(&info, &Modulus::Identity, 50_000, o.seed.wrapping_add(i as u64))?;
        let cover = wce::covering_radius(&info, CoverMode::certified(1e-3))?;
        let bound = d / (d + 1.0) * vol * cover.hi.unwrap_or(cover.value) + 3.0 * int.stderr.unwrap_or(0.0);
        worst = worst.max(int.value - bound);
    }
    Ok((worst <= 0.0, format!("max excess {worst:.2e}")))
}

fn check_lower_never_violated(o: &VerifyOptions) -> Result<(bool, String)> {
    let mut worst = f64::NEG_INFINITY;
    for (dom, nodes, norm) in random_configs(o.seed ^ 0x10e, 10)? {
        let d = dom.dim();
        let vol = dom.exact_volume().unwrap_or(f64::NAN);
        let n = nodes.len() as f64;
        let info = InformationMap::new(dom, nodes, norm.clone())?;
        let cover = wce::covering_radius(&info, CoverMode::certified(1e-3))?;
        let lam = (o.ball_volume)(d, &norm)?;
        let lower = (vol / (n * lam)).powf(1.0 / d as f64);
        worst = worst.max(lower - cover.hi.unwrap_or(cover.value));
    }
    Ok((worst <= 0.0, format!("max violation {worst:.2e}")))
}

fn check_curse(_: &VerifyOptions) -> Result<(bool, String)> {
    let c = bounds::curse_coefficient(10, 2.0)?;
    let r = bounds::curse_min_n(0.1, 10, 2.0)?;
    Ok(((c - 0.2617).abs() < 5e-4 && r.value >= 1.4e4, format!("coefficient {c:.4}, n ≥ {}", r.value)))
}

fn check_fooling(_: &VerifyOptions) -> Result<(bool, String)> {
    let sq = Domain::unit_cube(2);
    let (_, a) = pointopt::fooling_function(&sq, 4)?;
    let (_, b) = pointopt::fooling_function(&sq, 8)?;
    let ratio = a.integral / b.integral;
    Ok((a.ok && b.ok && (ratio - 4.0).abs() < 0.04, format!("integral ratio {ratio:.4}")))
}

fn check_optimizer(o: &VerifyOptions) -> Result<(bool, String)> {
    let sq = Domain::unit_cube(2);
    let norm = NormSpec::linf();
    let cfg = OptimizerConfig { seed: o.seed, restarts: 2, iterations: 20, ..Default::default() };
    let opt = pointopt::optimize(&sq, 16, &norm, &cfg)?.points;
    let greedy = pointopt::greedy_farthest_point(&sq, 16, &norm, cfg.pool, o.seed)?;
    let r = |p: PointSet| -> Result<f64> {
        Ok(wce::covering_radius(&InformationMap::new(sq.clone(), p, norm.clone())?, CoverMode::certified(1e-6))?.value)
    };
    let (a, b) = (r(opt)?, r(greedy)?);
    Ok((a <= b + 1e-9 && a >= 0.125 - 1e-6, format!("optimized {a:.4}, greedy {b:.4}")))
}

fn check_interval_spectrum(_: &VerifyOptions) -> Result<(bool, String)> {
    let n = 100;
    let h = 1.0 / n as f64;
    let s = spectral::eigenvalues(&spectral::discretize(&Domain::unit_cube(1), h)?, Boundary::Dirichlet, 20)?;
    let worst = s
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(j, l)| {
            let exact = 4.0 / (h * h) * ((j + 1) as f64 * std::f64::consts::PI * h / 2.0).sin().powi(2);
            (l - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    Ok((worst <= 1e-8, format!("max relative error {worst:.1e}")))
}

fn check_li_yau(_: &VerifyOptions) -> Result<(bool, String)> {
    let g = spectral::discretize(&Domain::unit_cube(2), 1.0 / 40.0)?;
    let s = spectral::eigenvalues(&g, Boundary::Dirichlet, 40)?;
    let c = spectral::eigenvalue_bound_check(&s, 1.0, 2, BoundKind::LiYau)?;
    Ok((c.all_pass, format!("confirmed {}, min margin {:.3}", c.confirmed, c.min_margin)))
}

// ---- weyl comparison ----

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylEntry {
    pub source: String,
    pub bc: Boundary,
    pub h: f64,
    pub k: usize,
    pub volume: f64,
    pub heuristic: bool,
    pub estimate: Option<WeylEstimate>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylComparison {
    pub entries: Vec<WeylEntry>,
    /// `(max − min) / min` over the successful estimates.
    pub spread: Option<f64>,
    pub tol: f64,
    pub agree: bool,
    /// `1/(2√π)` in d = 2, `1/π` in d = 1: the limit of the normalized tail.
    pub reference: Option<f64>,
}

/// Weyl-constant estimates for each spectrum (normalized by its grid volume) and their spread.
pub fn compare_weyl(spectra: &[(String, Spectrum)], tol: f64) -> WeylComparison {
    let entries: Vec<WeylEntry> = spectra
        .iter()
        .map(|(src, s)| {
            let est = spectral::weyl_constant_estimate(s, s.volume, s.d, 1);
            WeylEntry {
                source: src.clone(),
                bc: s.bc,
                h: s.h,
                k: s.k,
                volume: s.volume,
                heuristic: s.heuristic,
                failure: est.as_ref().err().map(|e| e.to_string()),
                estimate: est.ok(),
            }
        })
        .collect();
    let vals: Vec<f64> = entries.iter().filter_map(|e| e.estimate.as_ref().map(|w| w.value)).collect();
    let spread = if vals.is_empty() {
        None
    } else {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some((hi - lo) / lo)
    };
    let reference = match spectra.first().map(|s| s.1.d) {
        Some(1) => Some(1.0 / std::f64::consts::PI),
        Some(2) => Some(0.5 / std::f64::consts::PI.sqrt()),
        _ => None,
    };
    let agree = entries.iter().all(|e| e.estimate.is_some()) && spread.is_some_and(|s| s <= tol);
    WeylComparison { entries, spread, tol, agree, reference }
}

// ---- dispatch ----

#[derive(Debug, Clone, Serialize)]
struct VolumeResult {
    estimate: VolumeEstimate,
    bounding_box_volume: f64,
}

#[derive(Debug, Clone, Serialize)]
struct WceResult {
    n: usize,
    alpha: f64,
    linf: ErrorReport,
    integration: ErrorReport,
    lower_linf: BoundReport,
    lower_integration: BoundReport,
}

#[derive(Debug, Clone, Serialize)]
struct OptimizeTrace {
    n: usize,
    objective: Objective,
    value: f64,
    restart: usize,
    certified_radius: Option<ErrorReport>,
    trace: Vec<pointopt::TraceEntry>,
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Volume(c) => {
            let cfg = ExperimentConfig::from_common("volume", &c)?;
            let dom = cfg.need_domain()?;
            let estimate = domains::volume(dom, cfg.budget, cfg.seed)?;
            let res = VolumeResult { estimate, bounding_box_volume: dom.bbox_volume() };
            emit(&cfg.out, &Envelope::new("volume", vec![cfg.seed], vec![cfg.budget], vec![], res).to_json()?)?;
            Ok(exit::SUCCESS)
        }
        Command::Cover { common, tol, monte_carlo } => {
            let cfg = ExperimentConfig::from_common("cover", &common)?;
            let info = InformationMap::new(cfg.need_domain()?.clone(), cfg.need_points()?.clone(), cfg.norm.clone())?;
            let mode = if monte_carlo {
                CoverMode::MonteCarlo { budget: cfg.budget, seed: cfg.seed }
            } else {
                CoverMode::certified(tol)
            };
            let rep = wce::covering_radius(&info, mode)?;
            emit(&cfg.out, &Envelope::new("cover", vec![cfg.seed], vec![cfg.budget], vec![], rep).to_json()?)?;
            Ok(exit::SUCCESS)
        }
        Command::Wce { common, alpha, tol } => {
            let cfg = ExperimentConfig::from_common("wce", &common)?;
            let dom = cfg.need_domain()?.clone();
            let pts = cfg.need_points()?.clone();
            let omega = if alpha == 1.0 { Modulus::Identity } else { Modulus::power(alpha)? };
            let info = InformationMap::new(dom.clone(), pts, cfg.norm.clone())?;
            let mode = match dom {
                Domain::Mask(_) => CoverMode::MonteCarlo { budget: cfg.budget, seed: cfg.seed },
                _ => CoverMode::certified(tol),
            };
            let linf = wce::wce_linf(&info, &omega, mode)?;
            let integration = wce::wce_integration(&info, &omega, cfg.budget, cfg.seed)?;
            let vol = domains::volume(&dom, cfg.budget, cfg.seed)?.value;
            let n = info.len() as f64;
            let res = WceResult {
                n: info.len(),
                alpha,
                linf,
                integration,
                lower_linf: bounds::linf_uniform_lower(n, dom.dim(), &cfg.norm, vol)?,
                lower_integration: bounds::int_uniform_lower(n, dom.dim(), &cfg.norm, vol)?,
            };
            let env = Envelope::new("wce", vec![cfg.seed], vec![cfg.budget], vec![FormulaId::Lower2, FormulaId::Lower4], res);
            emit(&cfg.out, &env.to_json()?)?;
            Ok(exit::SUCCESS)
        }
        Command::Optimize { common, objective, restarts, iterations } => {
            let cfg = ExperimentConfig::from_common("optimize", &common)?;
            let dom = cfg.need_domain()?.clone();
            let n = cfg.need_n()?;
            let objective = match objective {
                ObjectiveArg::Covering => Objective::Covering,
                ObjectiveArg::Quantization => Objective::Quantization,
            };
            let oc = OptimizerConfig { seed: cfg.seed, restarts, iterations, objective, ..Default::default() };
            let res = pointopt::optimize(&dom, n, &cfg.norm, &oc)?;
            let info = InformationMap::new(dom, res.points.clone(), cfg.norm.clone())?;
            let tol = 1e-4 * (1.0 / n as f64).powf(1.0 / info.domain().dim() as f64);
            let certified = wce::covering_radius(&info, CoverMode::certified(tol)).ok();
            let trace = OptimizeTrace { n, objective, value: res.objective, restart: res.restart, certified_radius: certified, trace: res.trace };
            let env = Envelope::new("optimize", vec![cfg.seed], vec![oc.pool, oc.cell_budget], vec![], trace);
            match &cfg.out {
                Some(p) => {
                    write_atomic(p, &res.points.to_csv())?;
                    write_atomic(&with_suffix(p, ".trace.json"), &env.to_json()?)?;
                }
                None => print!("{}", res.points.to_csv()),
            }
            Ok(exit::SUCCESS)
        }
        Command::Sweep { common, kind, restarts, iterations, tol } => {
            let cfg = ExperimentConfig::from_common("sweep", &common)?;
            let domain = match (&cfg.domain, kind) {
                (Some(d), _) => d.clone(),
                (None, SweepKind::Extremal) => Domain::unit_cube(2),
                (None, _) => return Err(Error::InvalidArgument("needs --domain".into())),
            };
            let sc = SweepConfig {
                kind,
                domain,
                norm: cfg.norm.clone(),
                ns: cfg.ns.clone(),
                seed: cfg.seed,
                budget: cfg.budget,
                jobs: cfg.jobs,
                restarts,
                iterations,
                tol,
            };
            let report = run_sweep(&sc)?;
            let failed = report.rows.iter().any(|r| r.failure.is_some());
            let formulas = vec![FormulaId::Lower2, FormulaId::Asy1, FormulaId::Lower4];
            let csv = report.to_csv();
            let env = Envelope::new("sweep", vec![cfg.seed], vec![cfg.budget], formulas, report);
            match &cfg.out {
                Some(p) => {
                    write_atomic(&with_suffix(p, ".json"), &env.to_json()?)?;
                    write_atomic(&with_suffix(p, ".csv"), &csv)?;
                }
                None => print!("{}", env.to_json()?),
            }
            Ok(if failed { exit::INVARIANT } else { exit::SUCCESS })
        }
        Command::Bounds { common, formula, d, p, vol, eps, r, c_r } => {
            let formula: FormulaId = formula.parse()?;
            let norm_p = p.unwrap_or_else(|| common.norm_p.clone());
            let cfg = ExperimentConfig::from_common("bounds", &Common { norm_p, ..common })?;
            let d = d.or_else(|| cfg.domain.as_ref().map(Domain::dim)).ok_or_else(|| Error::InvalidArgument("needs --d".into()))?;
            let n = match cfg.ns.as_slice() {
                [] => None,
                _ => Some(cfg.need_n()? as f64),
            };
            let vol = match (vol, &cfg.domain) {
                (Some(v), _) => Some(v),
                (None, Some(dom)) => Some(domains::volume(dom, cfg.budget, cfg.seed)?.value),
                (None, None) => None,
            };
            let inputs = BoundInputs { n, d, norm: Some(cfg.norm.clone()), vol, eps, r, c_r };
            let rep = bounds::compute(formula, &inputs)?;
            emit(&cfg.out, &Envelope::new("bounds", vec![cfg.seed], vec![], vec![formula], rep).to_json()?)?;
            Ok(exit::SUCCESS)
        }
        Command::Spectrum { common, h, bc, k } => {
            let cfg = ExperimentConfig::from_common("spectrum", &common)?;
            let bc: Boundary = bc.parse()?;
            let grid = spectral::discretize(cfg.need_domain()?, h)?;
            let s = spectral::eigenvalues(&grid, bc, k)?;
            emit(&cfg.out, &(s.to_json()? + "\n"))?;
            Ok(exit::SUCCESS)
        }
        Command::Weyl { common, spectra, tol } => {
            let cfg = ExperimentConfig::from_common("weyl", &common)?;
            let loaded = spectra
                .iter()
                .map(|p| Ok((p.display().to_string(), Spectrum::from_json(&read_file(p)?)?)))
                .collect::<Result<Vec<_>>>()?;
            let cmp = compare_weyl(&loaded, tol);
            let agree = cmp.agree;
            emit(&cfg.out, &Envelope::new("weyl", vec![], vec![], vec![], cmp).to_json()?)?;
            Ok(if agree { exit::SUCCESS } else { exit::INVARIANT })
        }
        Command::Verify(c) => {
            let cfg = ExperimentConfig::from_common("verify", &c)?;
            let summary = run_verify(&VerifyOptions { seed: cfg.seed, ..Default::default() });
            for ch in &summary.checks {
                eprintln!("{} {}::{} ({})", if ch.pass { "PASS" } else { "FAIL" }, ch.module, ch.name, ch.detail);
            }
            let ok = summary.all_pass();
            emit(&cfg.out, &Envelope::new("verify", vec![cfg.seed], vec![], FormulaId::ALL.to_vec(), summary).to_json()?)?;
            Ok(if ok { exit::SUCCESS } else { exit::INVARIANT })
        }
    }
}
