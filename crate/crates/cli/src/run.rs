use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rmcurve_core::curve::{edge_constants, Curve, CurveSpec};
use rmcurve_core::error::{CurveError, EvolutionError, McError};
use rmcurve_core::evolution::{critical_brackets, cut_count_timeline, default_scan, BridgeSnapshot, BridgeSpec};
use rmcurve_core::mc::{
    bulk_statistics, edge_statistics, empirical_density, moments, occupancy, poisson_spacings, sample_matrix, unfold,
    EnsembleSample, TwReference,
};
use rmcurve_core::rh::verify_model_rh;
use serde_json::{json, Value};

use crate::config::{load_config, ConfigError, RunConfig, TimeSpec};
use crate::output::{num, Writer};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Bulk KS threshold against the Wigner surmise.
pub const BULK_KS_MAX: f64 = 0.02;
/// Poisson spacings must sit at least this far from the surmise.
pub const POISSON_KS_MIN: f64 = 0.2;
/// Allowed deviation of edge mean and variance from the reference.
pub const EDGE_TOL: f64 = 0.1;
pub const RH_RESIDUAL_MAX: f64 = 1e-7;
pub const RH_SLOPE_TOL: f64 = 0.05;
/// Tolerance of the critical-time search in `evolve`.
pub const CRITICAL_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "rmcurve", version, about = "Spectral curve analysis and Monte Carlo checks for the Gaussian model with external source")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Branch points, cuts, masses, edge constants and the density profile.
    Analyze(CommonArgs),
    /// Cut count along the bridge flow and its transition times.
    Evolve(CommonArgs),
    /// Sample eigenvalues; write the histogram and moment checks.
    Sample(CommonArgs),
    /// Unfolded bulk spacings against the Wigner surmise.
    VerifyBulk(CommonArgs),
    /// Rescaled extreme eigenvalues against the Tracy–Widom reference.
    VerifyEdge(CommonArgs),
    /// Jump residuals and decay of the model RH solution.
    RhCheck(CommonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// JSON run configuration, or a summary.json from an earlier run.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Master seed; overrides `sampling.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Evolve(_) => "evolve",
            Command::Sample(_) => "sample",
            Command::VerifyBulk(_) => "verify-bulk",
            Command::VerifyEdge(_) => "verify-edge",
            Command::RhCheck(_) => "rh-check",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Analyze(a)
            | Command::Evolve(a)
            | Command::Sample(a)
            | Command::VerifyBulk(a)
            | Command::VerifyEdge(a)
            | Command::RhCheck(a) => a,
        }
    }
}

/// A failed run: machine-readable code, message and exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: &'static str,
    pub message: String,
    pub exit: i32,
}

impl Failure {
    fn invalid(code: &'static str, message: impl ToString) -> Self {
        Failure {
            code,
            message: message.to_string(),
            exit: EXIT_INVALID,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::invalid(e.code(), &e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::invalid("OUTPUT_IO", e)
    }
}

impl From<CurveError> for Failure {
    fn from(e: CurveError) -> Self {
        let code = match e {
            CurveError::Degenerate { .. } | CurveError::NearCriticalEdge { .. } => "DEGENERATE_CURVE",
            CurveError::PairOutsideCuts { .. } | CurveError::NoCrossing { .. } => "NON_GENERIC_CURVE",
            CurveError::ComplexBranchPoints { .. } => "COMPLEX_BRANCH_POINTS",
            _ => "NUMERICAL_FAILURE",
        };
        Failure {
            code,
            message: e.to_string(),
            exit: EXIT_NUMERICAL,
        }
    }
}

impl From<EvolutionError> for Failure {
    fn from(e: EvolutionError) -> Self {
        match e {
            EvolutionError::Curve(c) => c.into(),
            EvolutionError::AmbiguousBracket { .. } => Failure {
                code: "AMBIGUOUS_TRANSITION",
                message: e.to_string(),
                exit: EXIT_NUMERICAL,
            },
            other => Failure::invalid("CONFIG_INVALID", other),
        }
    }
}

impl From<McError> for Failure {
    fn from(e: McError) -> Self {
        match e {
            McError::Curve(c) => c.into(),
            McError::Numeric(_) | McError::Reference(_) => Failure {
                code: "NUMERICAL_FAILURE",
                message: e.to_string(),
                exit: EXIT_NUMERICAL,
            },
            McError::Window { .. } => Failure::invalid("INVALID_WINDOW", e),
            McError::EdgeIndex(_) => Failure::invalid("INVALID_EDGE", e),
            McError::TooFewDraws { .. } | McError::TooFewSpacings { .. } => Failure::invalid("INSUFFICIENT_DATA", e),
            other => Failure::invalid("CONFIG_INVALID", other),
        }
    }
}

/// Results of a successful run and whether its checks passed.
struct Outcome {
    results: Value,
    passed: bool,
}

impl Outcome {
    fn ok(results: Value) -> Self {
        Outcome { results, passed: true }
    }
}

/// Applies `RMCURVE_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("RMCURVE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Failure::invalid("CONFIG_INVALID", format!("RMCURVE_THREADS={v:?} is not a positive integer")))?;
    // A pool that already exists (as in tests) keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs one subcommand, writes `summary.json`, and returns the exit code.
pub fn run(command: &Command) -> i32 {
    let args = command.args();
    let loaded = load_config(&args.config).map(|mut cfg| {
        if let Some(seed) = args.seed {
            cfg.sampling.seed = seed;
        }
        if let Some(out) = &args.out {
            cfg.output.dir = out.clone();
        }
        cfg
    });
    let dir = match (&loaded, &args.out) {
        (Ok(cfg), _) => cfg.output.dir.clone(),
        (Err(_), Some(out)) => out.clone(),
        (Err(_), None) => crate::config::Output::default().dir,
    };
    let mut writer = match Writer::new(&dir) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error [OUTPUT_IO]: {}: {e}", dir.display());
            return EXIT_INVALID;
        }
    };
    let result = configure_threads().and_then(|_| {
        let cfg = loaded.as_ref().map_err(|e| Failure::invalid(e.code(), e))?;
        dispatch(command, cfg, &mut writer)
    });
    let (exit, status, results, error) = match result {
        Ok(o) if o.passed => (EXIT_OK, "ok", o.results, Value::Null),
        Ok(o) => (
            EXIT_CHECK_FAILED,
            "check_failed",
            o.results,
            json!({"code": "STATISTICAL_CHECK_FAILED", "message": "one or more checks are outside tolerance"}),
        ),
        Err(f) => (f.exit, "error", Value::Null, json!({"code": f.code, "message": f.message})),
    };
    if let Some(code) = error.get("code") {
        eprintln!("error [{}]: {}", code.as_str().unwrap_or(""), error["message"].as_str().unwrap_or(""));
    }
    let mut outputs = writer.written.clone();
    outputs.push("summary.json".into());
    let summary = json!({
        "tool": "rmcurve",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command.name(),
        "status": status,
        "exit_code": exit,
        "error": error,
        "config": loaded.as_ref().ok(),
        "outputs": outputs,
        "results": results,
    });
    if let Err(e) = writer.json("summary.json", &summary) {
        eprintln!("error [OUTPUT_IO]: {e}");
        return EXIT_INVALID;
    }
    exit
}

fn dispatch(command: &Command, cfg: &RunConfig, w: &mut Writer) -> Result<Outcome, Failure> {
    match command {
        Command::Analyze(_) => analyze(cfg, w),
        Command::Evolve(_) => evolve(cfg, w),
        Command::Sample(_) => sample(cfg, w),
        Command::VerifyBulk(_) => verify_bulk(cfg, w),
        Command::VerifyEdge(_) => verify_edge(cfg, w),
        Command::RhCheck(_) => rh_check(cfg, w),
    }
}

fn bridge(cfg: &RunConfig) -> Result<BridgeSpec, Failure> {
    let a = cfg.model.endpoints.iter().map(|e| e.a).collect();
    Ok(BridgeSpec::new(a, cfg.fractions(), cfg.sampling.n as u64)?)
}

fn analyze(cfg: &RunConfig, w: &mut Writer) -> Result<Outcome, Failure> {
    let (curve, scale, time) = match cfg.time {
        Some(TimeSpec::Single { t }) => {
            let snap = BridgeSnapshot::new(&bridge(cfg)?, t, cfg.convention())?;
            let time = json!({"t": t, "scale": snap.scale, "convention": cfg.analysis.convention});
            (snap.curve, snap.scale, time)
        }
        _ => (Curve::new(cfg.spec()?)?, 1.0, Value::Null),
    };
    let bps = curve.branch_points();
    let rho = edge_constants(curve.spec(), bps)?;
    let masses: Vec<f64> = (0..curve.cuts().len()).map(|c| curve.cut_mass(c)).collect();
    let (crossings, notes) = match curve.cut_structure() {
        Ok(s) => (json!(s.gamma_crossings), Vec::new()),
        Err(e) => (Value::Null, vec![format!("Γ crossings unavailable: {e}")]),
    };
    let profile = curve.density_profile(cfg.analysis.points_per_cut)?;
    if cfg.output.csv() {
        let rows = profile
            .grid
            .iter()
            .zip(&profile.rho)
            .map(|(&x, &r)| vec![num(scale * x), num(r / scale)]);
        w.csv("density.csv", &["x", "rho"], rows)?;
    }
    let cuts: Vec<[f64; 2]> = curve.cuts().iter().map(|&(a, b)| [scale * a, scale * b]).collect();
    Ok(Outcome::ok(json!({
        "time": time,
        "l": cuts.len(),
        "branch_points": {
            "real": bps.x_real().iter().map(|x| scale * x).collect::<Vec<_>>(),
            "complex": bps.pairs.iter().map(|p| [scale * p.upper.re, scale * p.upper.im]).collect::<Vec<_>>(),
            "min_separation": bps.min_separation,
        },
        "cuts": cuts,
        "mass": masses,
        "total_mass": masses.iter().sum::<f64>(),
        "edge_constants": rho,
        "gamma_crossings": crossings,
        "notes": notes,
    })))
}

fn evolve(cfg: &RunConfig, w: &mut Writer) -> Result<Outcome, Failure> {
    let b = bridge(cfg)?;
    let grid = match &cfg.time {
        Some(TimeSpec::Grid { grid }) => grid.clone(),
        _ => default_scan(),
    };
    let timeline = cut_count_timeline(&b, &grid)?;
    let critical = critical_brackets(&b, CRITICAL_TOL)?;
    if cfg.output.csv() {
        let rows = timeline
            .times
            .iter()
            .zip(&timeline.cut_counts)
            .map(|(&t, l)| vec![num(t), l.map_or(String::new(), |l| l.to_string())]);
        w.csv("timeline.csv", &["t", "l"], rows)?;
    }
    let times: Vec<f64> = critical.iter().map(|c| c.time).collect();
    let decreases = critical.iter().filter(|c| c.to < c.from).count();
    if cfg.output.json() {
        w.json(
            "critical_times.json",
            &json!({"critical_times": times, "transitions": critical, "tolerance": CRITICAL_TOL}),
        )?;
    }
    Ok(Outcome::ok(json!({
        "critical_times": times,
        "transitions": critical,
        "grid_points": grid.len(),
        "unresolved": timeline.notes,
        "monotonicity_violations": decreases,
    })))
}

fn draw(cfg: &RunConfig, spec: &CurveSpec) -> Result<EnsembleSample, Failure> {
    let s = &cfg.sampling;
    Ok(sample_matrix(spec, s.n, s.seed, s.draws)?)
}

fn sample(cfg: &RunConfig, w: &mut Writer) -> Result<Outcome, Failure> {
    let spec = cfg.spec()?;
    let curve = Curve::new(spec.clone())?;
    let smp = draw(cfg, &spec)?;
    let (lo, hi) = curve.support();
    let margin = (0.05 * (hi - lo)).max(0.3);
    let hist = empirical_density(&smp, cfg.sampling.bins, (lo - margin, hi + margin))?;
    let m = moments(&smp);
    let occ = occupancy(&smp, &curve);
    let sup = hist.sup_distance(&curve);
    if cfg.output.csv() {
        let rows = (0..hist.bins()).map(|b| {
            let (l, r) = hist.edges(b);
            let avg = (curve.integrated_density(r) - curve.integrated_density(l)) / (r - l);
            vec![num(l), num(r), hist.counts[b].to_string(), num(hist.density[b]), num(avg)]
        });
        w.csv("histogram.csv", &["x_lo", "x_hi", "count", "density", "rho_bin_average"], rows)?;
    }
    let results = json!({
        "moments": m,
        "moments_within_4se": m.within(4.0),
        "occupancy": occ,
        "occupancy_within_4se_plus_0.01": occ.within(4.0, 0.01),
        "histogram": {"range": [hist.lo, hist.hi], "bins": hist.bins(), "in_range": hist.in_range, "dropped": hist.dropped},
        "sup_distance": sup,
        "tail_mass": hist.mass_outside(lo - 0.2, hi + 0.2),
    });
    if cfg.output.json() {
        w.json("moments.json", &results)?;
    }
    Ok(Outcome::ok(results))
}

/// The configured window, or the middle half of the cut with the largest mass.
fn bulk_window(cfg: &RunConfig, curve: &Curve) -> (f64, f64) {
    if let Some([lo, hi]) = cfg.analysis.bulk_window {
        return (lo, hi);
    }
    let best = (0..curve.cuts().len())
        .max_by(|&i, &j| curve.cut_mass(i).total_cmp(&curve.cut_mass(j)))
        .unwrap_or(0);
    let (a, b) = curve.cuts()[best];
    let (mid, half) = (0.5 * (a + b), 0.25 * (b - a));
    (mid - half, mid + half)
}

fn verify_bulk(cfg: &RunConfig, w: &mut Writer) -> Result<Outcome, Failure> {
    let spec = cfg.spec()?;
    let curve = Curve::new(spec.clone())?;
    let window = bulk_window(cfg, &curve);
    let smp = draw(cfg, &spec)?;
    let spacings = unfold(&smp, &curve, window)?;
    let stats = bulk_statistics(&spacings)?;
    let control = bulk_statistics(&poisson_spacings(cfg.sampling.seed, spacings.len()))?;
    let ks = stats.ks_bulk.unwrap_or(f64::NAN);
    let ks_poisson = control.ks_bulk.unwrap_or(f64::NAN);
    if cfg.output.csv() {
        let rows = spacings
            .per_draw
            .iter()
            .enumerate()
            .flat_map(|(d, s)| s.iter().map(move |&x| vec![d.to_string(), num(x)]));
        w.csv("spacings.csv", &["draw", "spacing"], rows)?;
        let pc = stats.pair_correlation.clone().unwrap_or_else(|| unreachable!("bulk statistics fill it"));
        let rows = (0..pc.r.len()).map(|i| vec![num(pc.r[i]), num(pc.estimate[i]), num(pc.reference[i])]);
        w.csv("pair_correlation.csv", &["r", "estimate", "sine_kernel_reference"], rows)?;
    }
    let passed = ks < BULK_KS_MAX && ks_poisson > POISSON_KS_MIN;
    Ok(Outcome {
        results: json!({
            "window": [window.0, window.1],
            "spacings": spacings.len(),
            "mean_spacing": stats.mean_spacing,
            "ks_surmise": ks,
            "ks_threshold": BULK_KS_MAX,
            "ks_poisson_control": ks_poisson,
            "poisson_threshold": POISSON_KS_MIN,
            "passed": passed,
        }),
        passed,
    })
}

fn verify_edge(cfg: &RunConfig, w: &mut Writer) -> Result<Outcome, Failure> {
    let spec = cfg.spec()?;
    let curve = Curve::new(spec.clone())?;
    let z = curve.branch_points().x_real();
    let rho = edge_constants(&spec, curve.branch_points())?;
    let edges = cfg.analysis.edges.clone().unwrap_or_else(|| vec![1, z.len()]);
    if let Some(&bad) = edges.iter().find(|&&i| i > z.len()) {
        return Err(McError::EdgeIndex(bad).into());
    }
    let smp = draw(cfg, &spec)?;
    let reference = TwReference::shipped();
    let mut rows = Vec::new();
    let mut per_edge = Vec::new();
    let mut passed = true;
    for &i in &edges {
        let s = edge_statistics(&smp, i, z[i - 1], rho[i - 1])?;
        let (mean, var) = (s.edge_mean.unwrap_or(f64::NAN), s.edge_var.unwrap_or(f64::NAN));
        let ok = (mean - reference.mean).abs() <= EDGE_TOL && (var - reference.variance).abs() <= EDGE_TOL;
        passed &= ok;
        rows.extend(s.edge_values.iter().map(|&v| vec![i.to_string(), num(v)]));
        per_edge.push(json!({
            "edge": i,
            "z": z[i - 1],
            "rho": rho[i - 1],
            "samples": s.edge_values.len(),
            "mean": mean,
            "mean_se": s.edge_mean_se,
            "variance": var,
            "variance_se": s.edge_var_se,
            "passed": ok,
        }));
    }
    if cfg.output.csv() {
        w.csv("edge.csv", &["edge", "value"], rows)?;
    }
    Ok(Outcome {
        results: json!({"edges": per_edge, "reference": reference, "tolerance": EDGE_TOL, "passed": passed}),
        passed,
    })
}

fn rh_check(cfg: &RunConfig, w: &mut Writer) -> Result<Outcome, Failure> {
    let report = verify_model_rh(&cfg.spec()?, cfg.analysis.points_per_cut)?;
    let passed = report.max_residual < RH_RESIDUAL_MAX && (report.decay_slope + 1.0).abs() <= RH_SLOPE_TOL;
    if cfg.output.json() {
        w.json("rh_report.json", &report)?;
    }
    Ok(Outcome {
        results: json!({
            "max_residual": report.max_residual,
            "cut_residuals": report.cut_residuals,
            "decay_slope": report.decay_slope,
            "points": report.points,
            "passed": passed,
        }),
        passed,
    })
}
