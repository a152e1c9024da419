//! Command-line entry point: calibration, localisation, spatial sweeps,
//! heat-map classification, difference maps, trace evaluation and synthetic
//! trace generation.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or I/O errors.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lateration::calibration::{calibrate, CalibrationReport};
use lateration::error_model::{GammaErrorModel, NormalErrorModel};
use lateration::geom::{AnchorObservation, ObservationSet, Point2D};
use lateration::locate::{Algorithm, NormalParams, SolverOpts, TriangularMF};
use lateration::sim::{
    classify, diff, read_grid_csv, render_color_grid, render_diff_grid, sweep, write_grid_csv,
    Scenario,
};
use lateration::trace::gen::{generate_calibration, generate_trace, TraceGenConfig};
use lateration::trace::{
    evaluate, load_calibration_samples, load_trace, metrics_table, save_calibration_samples,
    save_trace,
};

#[derive(Parser)]
#[command(
    name = "lateration",
    version,
    about = "Range-based lateration toolkit: estimators, calibration, spatial error maps and trace metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit membership function and error models from calibration samples
    /// (JSON Lines of {"r": measured, "rbar": reference}).
    Calibrate {
        /// Calibration sample file.
        #[arg(long)]
        trace: PathBuf,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate one position from an observation file
    /// ({"obs": [{"a": [x, y], "r": range}, ...]}).
    Locate {
        #[arg(long)]
        algo: String,
        #[arg(long)]
        obs: PathBuf,
        #[command(flatten)]
        algo_opts: AlgoOpts,
    },
    /// Monte-Carlo sweep over a scenario grid; writes <out>.csv (raw means)
    /// and <out>.ppm (classified heat map).
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Estimator name; overrides the scenario's algorithm block.
        #[arg(long)]
        algo: Option<String>,
        #[command(flatten)]
        algo_opts: AlgoOpts,
        #[arg(long)]
        out: PathBuf,
        /// Override trials per cell.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Size of the rayon worker pool (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Classify a previously written raw grid CSV into a heat map.
    Classify {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        /// Classification unit; defaults to the scenario's expected error.
        #[arg(long)]
        expected_error: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cell-wise difference map of two raw grid CSVs from the same scenario.
    Diff {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        /// Equivalence threshold; defaults to 1.6% of the field width.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one estimator over a recorded trace and print metrics.
    Evaluate {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        algo: String,
        #[command(flatten)]
        algo_opts: AlgoOpts,
        /// Write the metrics JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic trace (and optionally a disjoint calibration
    /// sample) from a seeded anchor layout and shifted-gamma range errors.
    GenTrace {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 300)]
        fixes: usize,
        #[arg(long, default_value_t = 17)]
        anchors: usize,
        #[arg(long, default_value_t = 80.0)]
        field_width: f64,
        #[arg(long, default_value_t = 40.0)]
        field_height: f64,
        #[arg(long, default_value_t = 0.44)]
        visibility: f64,
        #[arg(long, default_value_t = 3)]
        min_visible: usize,
        /// Gamma error model as a calibration report or bare model JSON.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 3.3)]
        alpha: f64,
        #[arg(long, default_value_t = 0.58)]
        beta: f64,
        #[arg(long, default_value_t = -3.31, allow_hyphen_values = true)]
        location: f64,
        /// Also write calibration samples drawn from the same error model.
        #[arg(long)]
        calibration_out: Option<PathBuf>,
        #[arg(long, default_value_t = 20_000)]
        calibration_samples: usize,
    },
}

/// Flags shared by every command that names an estimator.
#[derive(Args)]
struct AlgoOpts {
    /// Membership function file: a calibration report or a bare
    /// [low, median, up] array.
    #[arg(long)]
    mf: Option<PathBuf>,
    /// Membership function inline: "low,median,up".
    #[arg(long, allow_hyphen_values = true)]
    mf_params: Option<String>,
    /// Error-model file: a calibration report or a bare model JSON.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Range offset for mle-gamma; defaults to max(0, -location).
    #[arg(long)]
    eta: Option<f64>,
    /// Solver starting points: "x1,y1;x2,y2;...".
    #[arg(long, allow_hyphen_values = true)]
    starts: Option<String>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
}

enum CliError {
    /// Wrong flags or flag combinations: exit 1.
    Usage(String),
    /// Broken files, bad data, failed I/O: exit 2.
    Data(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => write!(f, "{m}"),
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn data(message: impl fmt::Display) -> CliError {
    CliError::Data(message.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Calibrate { trace, out } => cmd_calibrate(&trace, out.as_deref()),
        Command::Locate {
            algo,
            obs,
            algo_opts,
        } => cmd_locate(&algo, &obs, &algo_opts),
        Command::Sweep {
            scenario,
            algo,
            algo_opts,
            out,
            trials,
            seed,
            workers,
        } => cmd_sweep(
            &scenario,
            algo.as_deref(),
            &algo_opts,
            &out,
            trials,
            seed,
            workers,
        ),
        Command::Classify {
            grid,
            scenario,
            expected_error,
            out,
        } => cmd_classify(&grid, &scenario, expected_error, &out),
        Command::Diff {
            a,
            b,
            scenario,
            threshold,
            out,
        } => cmd_diff(&a, &b, &scenario, threshold, &out),
        Command::Evaluate {
            trace,
            algo,
            algo_opts,
            out,
        } => cmd_evaluate(&trace, &algo, &algo_opts, out.as_deref()),
        Command::GenTrace {
            out,
            seed,
            fixes,
            anchors,
            field_width,
            field_height,
            visibility,
            min_visible,
            model,
            alpha,
            beta,
            location,
            calibration_out,
            calibration_samples,
        } => {
            let error = match model {
                Some(path) => load_gamma_model(&path)?,
                None => GammaErrorModel::new(alpha, beta, location).map_err(data)?,
            };
            let cfg = TraceGenConfig {
                field_width,
                field_height,
                n_anchors: anchors,
                n_fixes: fixes,
                visibility,
                min_visible,
                error,
                seed,
            };
            let trace = generate_trace(&cfg);
            save_trace(&out, &trace).map_err(data)?;
            eprintln!("wrote {} fixes to {}", trace.len(), out.display());
            if let Some(cal_path) = calibration_out {
                // Disjoint stream: calibration never shares draws with the trace.
                let samples = generate_calibration(&error, calibration_samples, seed ^ 0x5ca1ab1e);
                save_calibration_samples(&cal_path, &samples).map_err(data)?;
                eprintln!(
                    "wrote {} calibration samples to {}",
                    samples.len(),
                    cal_path.display()
                );
            }
            Ok(())
        }
    }
}

/// Print to stdout, ignoring a closed pipe (e.g. piping into `head`).
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn cmd_calibrate(trace: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let samples = load_calibration_samples(trace).map_err(data)?;
    let report = calibrate(&samples).map_err(data)?;
    let text = serde_json::to_string_pretty(&report).map_err(data)?;
    if let Some(path) = out {
        std::fs::write(path, &text).map_err(|e| data(format!("{}: {e}", path.display())))?;
    }
    emit(&text);
    Ok(())
}

fn cmd_locate(algo: &str, obs_path: &Path, opts: &AlgoOpts) -> Result<(), CliError> {
    let algorithm = build_algorithm(algo, opts)?;
    let obs = load_observations(obs_path)?;
    if obs.len() < algorithm.min_anchors() {
        return Err(data(format!(
            "{algo} needs at least {} anchors, file has {}",
            algorithm.min_anchors(),
            obs.len()
        )));
    }
    let estimate = algorithm.estimate(&obs);
    let out = json!({
        "x": estimate.position.x,
        "y": estimate.position.y,
        "status": estimate.status,
    });
    emit(&out.to_string());
    Ok(())
}

fn cmd_sweep(
    scenario_path: &Path,
    algo: Option<&str>,
    opts: &AlgoOpts,
    out: &Path,
    trials: Option<usize>,
    seed: Option<u64>,
    workers: Option<usize>,
) -> Result<(), CliError> {
    let (mut scenario, scenario_algo) = load_scenario(scenario_path)?;
    if let Some(t) = trials {
        scenario.trials_per_cell = t;
    }
    if let Some(s) = seed {
        scenario.seed = s;
    }
    let algorithm = match algo {
        Some(name) => build_algorithm(name, opts)?,
        None => scenario_algo
            .ok_or_else(|| usage("no --algo given and the scenario file has no algorithm block"))?,
    };
    let grid = match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(data)?;
            pool.install(|| sweep(&scenario, &algorithm))
        }
        None => sweep(&scenario, &algorithm),
    }
    .map_err(data)?;
    write_grid_csv(&grid, &out.with_extension("csv")).map_err(data)?;
    let color = classify(&grid, scenario.expected_error());
    render_color_grid(&color, out).map_err(data)?;
    eprintln!(
        "swept {} cells x {} trials with {}; wrote {}.csv and {}.ppm",
        scenario.n_cells(),
        scenario.trials_per_cell,
        algorithm.name(),
        out.display(),
        out.display()
    );
    Ok(())
}

fn cmd_classify(
    grid_path: &Path,
    scenario_path: &Path,
    expected_error: Option<f64>,
    out: &Path,
) -> Result<(), CliError> {
    let (scenario, _) = load_scenario(scenario_path)?;
    let grid = read_grid_csv(grid_path, &scenario).map_err(data)?;
    let unit = expected_error.unwrap_or_else(|| scenario.expected_error());
    if unit <= 0.0 {
        return Err(usage("expected error must be positive"));
    }
    let color = classify(&grid, unit);
    render_color_grid(&color, out).map_err(data)?;
    Ok(())
}

fn cmd_diff(
    a_path: &Path,
    b_path: &Path,
    scenario_path: &Path,
    threshold: Option<f64>,
    out: &Path,
) -> Result<(), CliError> {
    let (scenario, _) = load_scenario(scenario_path)?;
    let a = read_grid_csv(a_path, &scenario).map_err(data)?;
    let b = read_grid_csv(b_path, &scenario).map_err(data)?;
    let grid = diff(&a, &b, threshold).map_err(data)?;
    render_diff_grid(&grid, out).map_err(data)?;
    Ok(())
}

fn cmd_evaluate(
    trace_path: &Path,
    algo: &str,
    opts: &AlgoOpts,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let algorithm = build_algorithm(algo, opts)?;
    let trace = load_trace(trace_path).map_err(data)?;
    let (metrics, _) = evaluate(&trace, &algorithm).map_err(data)?;
    let text = serde_json::to_string_pretty(&metrics).map_err(data)?;
    if let Some(path) = out {
        std::fs::write(path, &text).map_err(|e| data(format!("{}: {e}", path.display())))?;
    }
    emit(metrics_table(&[(algorithm.name().to_string(), metrics.clone())]).trim_end());
    if out.is_none() {
        emit(&text);
    }
    Ok(())
}

/// Scenario file: the scenario fields plus an optional "algorithm" block.
#[derive(serde::Deserialize)]
struct ScenarioFile {
    #[serde(flatten)]
    scenario: Scenario,
    algorithm: Option<lateration::AlgorithmSpec>,
}

fn load_scenario(path: &Path) -> Result<(Scenario, Option<Algorithm>), CliError> {
    let text = read_file(path)?;
    let file: ScenarioFile =
        serde_json::from_str(&text).map_err(|e| data(format!("{}: {e}", path.display())))?;
    file.scenario.validate().map_err(data)?;
    let algorithm = file
        .algorithm
        .map(|spec| spec.build())
        .transpose()
        .map_err(data)?;
    Ok((file.scenario, algorithm))
}

#[derive(serde::Deserialize)]
struct ObservationFile {
    obs: Vec<AnchorObservation>,
}

fn load_observations(path: &Path) -> Result<ObservationSet, CliError> {
    let text = read_file(path)?;
    let file: ObservationFile =
        serde_json::from_str(&text).map_err(|e| data(format!("{}: {e}", path.display())))?;
    ObservationSet::new(file.obs).ok_or_else(|| data(format!("{}: no observations", path.display())))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn build_algorithm(name: &str, opts: &AlgoOpts) -> Result<Algorithm, CliError> {
    let solver = SolverOpts {
        max_iters: opts.max_iters,
        tolerance: opts.tolerance,
        starts: opts.starts.as_deref().map(parse_starts).transpose()?,
    };
    match name {
        "minmax" => Ok(Algorithm::MinMax),
        "eminmax-w2" => Ok(Algorithm::EMinMaxW2),
        "eminmax-w4" => Ok(Algorithm::EMinMaxW4),
        "mdminmax" => Ok(Algorithm::MdMinMax { mf: load_mf(opts)? }),
        "nlls" => Ok(Algorithm::Nlls { solver }),
        "mle-normal" => {
            let path = opts.model.as_deref().ok_or_else(|| {
                usage("mle-normal needs --model (calibration report or {\"mu\", \"sigma\"})")
            })?;
            Ok(Algorithm::MleNormal {
                params: NormalParams::Shared(load_normal_model(path)?),
                solver,
            })
        }
        "mle-gamma" => {
            let path = opts.model.as_deref().ok_or_else(|| {
                usage(
                    "mle-gamma needs --model (calibration report or {\"alpha\", \"beta\", \"location\"})",
                )
            })?;
            let model = load_gamma_model(path)?;
            let eta = opts.eta.unwrap_or((-model.location).max(0.0));
            if eta < 0.0 {
                return Err(usage("--eta must be non-negative"));
            }
            Ok(Algorithm::MleGamma { model, eta, solver })
        }
        other => Err(usage(format!(
            "unknown algorithm '{other}'; expected one of minmax, eminmax-w2, eminmax-w4, mdminmax, nlls, mle-normal, mle-gamma"
        ))),
    }
}

fn load_mf(opts: &AlgoOpts) -> Result<TriangularMF, CliError> {
    if let Some(params) = &opts.mf_params {
        return parse_mf_params(params);
    }
    let path = opts
        .mf
        .as_ref()
        .or(opts.model.as_ref())
        .ok_or_else(|| usage("mdminmax needs --mf, --mf-params or --model"))?;
    let text = read_file(path)?;
    if let Ok(report) = serde_json::from_str::<CalibrationReport>(&text) {
        return Ok(report.mf);
    }
    serde_json::from_str::<TriangularMF>(&text).map_err(|e| {
        data(format!(
            "{}: not a calibration report or [low, median, up]: {e}",
            path.display()
        ))
    })
}

fn load_normal_model(path: &Path) -> Result<NormalErrorModel, CliError> {
    let text = read_file(path)?;
    if let Ok(report) = serde_json::from_str::<CalibrationReport>(&text) {
        return Ok(report.normal);
    }
    let model: NormalErrorModel = serde_json::from_str(&text).map_err(|e| {
        data(format!(
            "{}: not a calibration report or normal model: {e}",
            path.display()
        ))
    })?;
    model.validate().map_err(data)?;
    Ok(model)
}

fn load_gamma_model(path: &Path) -> Result<GammaErrorModel, CliError> {
    let text = read_file(path)?;
    if let Ok(report) = serde_json::from_str::<CalibrationReport>(&text) {
        return Ok(report.gamma);
    }
    let model: GammaErrorModel = serde_json::from_str(&text).map_err(|e| {
        data(format!(
            "{}: not a calibration report or gamma model: {e}",
            path.display()
        ))
    })?;
    model.validate().map_err(data)?;
    Ok(model)
}

fn parse_starts(text: &str) -> Result<Vec<Point2D>, CliError> {
    let mut starts = Vec::new();
    for part in text.split(';') {
        let coords: Vec<&str> = part.split(',').map(str::trim).collect();
        if coords.len() != 2 {
            return Err(usage(format!("bad start '{part}'; expected x,y")));
        }
        let x: f64 = coords[0]
            .parse()
            .map_err(|e| usage(format!("bad start coordinate '{}': {e}", coords[0])))?;
        let y: f64 = coords[1]
            .parse()
            .map_err(|e| usage(format!("bad start coordinate '{}': {e}", coords[1])))?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(usage(format!("start '{part}' is not finite")));
        }
        starts.push(Point2D { x, y });
    }
    if starts.is_empty() {
        return Err(usage("--starts needs at least one x,y pair"));
    }
    Ok(starts)
}

fn parse_mf_params(text: &str) -> Result<TriangularMF, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(usage("--mf-params expects low,median,up"));
    }
    let mut values = [0.0f64; 3];
    for (i, p) in parts.iter().enumerate() {
        values[i] = p
            .parse()
            .map_err(|e| usage(format!("bad membership parameter '{p}': {e}")))?;
    }
    TriangularMF::new(values[0], values[1], values[2]).map_err(|e| usage(e.to_string()))
}
