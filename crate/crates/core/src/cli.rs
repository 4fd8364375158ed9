//! `chaoskit` command line: one subcommand per experiment, each writing its
//! data files plus a `<subcommand>_manifest.json` into the output directory.
//!
//! Exit codes: 0 when every output was produced, 2 for usage or validation
//! errors, 1 for run-time failures (reported as a JSON error object).

use std::f64::consts::{FRAC_PI_6, SQRT_2};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bifurcation::{bifurcation_diagram, estimate_feigenbaum, BifurcationError, MAX_LEVELS};
use crate::decay::{
    delay_series, fit_exponential, run_escape, DecayConfig, DecayError, Interval, Seeding,
    DEFAULT_MAX_ITERATIONS, DEFAULT_MIN_SURVIVORS, DEFAULT_SKIP_TRANSIENT,
};
use crate::entropy::{additivity_check, tsallis_entropy, Distribution};
use crate::maps::{MapKind, MapSpec};
use crate::output::{
    basin_ppm, flat_json, format_real, write_csv, write_json, RunManifest, SCHEMA_VERSION,
};
use crate::pendulum::{compute_basins, triangle_magnets, PendulumParams, Window};
use crate::quantum::{
    chsh_classical_max, chsh_quantum, ghz_contradiction, ghz_correlations, lhv_simulate,
    ConstantStrategy, GhzConfig, HiddenAxisStrategy, LocalStrategy, RandomTableStrategy,
};

pub const OUT_DIR_ENV: &str = "CHAOSKIT_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "chaoskit", version, about = "Chaotic maps, escape-time decay, pendulum basins, Bell/GHZ correlations, Tsallis entropy")]
pub struct Cli {
    /// Directory receiving all output files.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,
    /// Worker threads for parallel sections; never changes output bytes.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bifurcation diagram as CSV (`param,x`).
    Bifurcate(BifurcateArgs),
    /// Escape-time decay experiment: survivor CSV and exponential fit.
    Decay(DecayArgs),
    /// Magnetic pendulum basins of attraction as a P3 pixmap.
    Basins(BasinsArgs),
    /// CHSH / GHZ computations.
    Bell(BellArgs),
    /// Period-doubling points and Feigenbaum ratios.
    Feigenbaum(FeigenbaumArgs),
    /// Tsallis entropy and pseudo-additivity.
    Tsallis(TsallisArgs),
    /// Re-run the subcommand recorded in a manifest.
    Replay {
        manifest: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapArg {
    Logistic,
    Sine,
    Quadratic,
}

impl From<MapArg> for MapKind {
    fn from(m: MapArg) -> Self {
        match m {
            MapArg::Logistic => MapKind::Logistic,
            MapArg::Sine => MapKind::Sine,
            MapArg::Quadratic => MapKind::Quadratic,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BifurcateArgs {
    #[arg(long, value_enum, default_value = "logistic")]
    pub map: MapArg,
    #[arg(long, default_value_t = 2.9, allow_negative_numbers = true)]
    pub a_min: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub a_max: f64,
    #[arg(long, default_value_t = 2000)]
    pub n_param: usize,
    #[arg(long, default_value_t = 1000)]
    pub transient: usize,
    #[arg(long, default_value_t = 500)]
    pub keep: usize,
    /// Seed; defaults to 0.3 (logistic), 1.0 (sine), 0.0 (quadratic).
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedingArg {
    Even,
    Random,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DecayArgs {
    #[arg(long, value_enum, default_value = "logistic")]
    pub map: MapArg,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    pub i_lo: f64,
    #[arg(long, default_value_t = 0.2 + 1e-11, allow_negative_numbers = true)]
    pub i_hi: f64,
    #[arg(long, default_value_t = 0.53, allow_negative_numbers = true)]
    pub j_lo: f64,
    #[arg(long, default_value_t = 0.54, allow_negative_numbers = true)]
    pub j_hi: f64,
    #[arg(long, default_value_t = 10_000)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "even")]
    pub seeding: SeedingArg,
    /// PRNG seed for `--seeding random`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = DEFAULT_SKIP_TRANSIENT)]
    pub skip_transient: usize,
    #[arg(long, default_value_t = DEFAULT_MIN_SURVIVORS)]
    pub min_survivors: usize,
    /// Also write the delay plot of escape-event intervals at this lag.
    #[arg(long)]
    pub delay_lag: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BasinsArgs {
    #[arg(long, default_value_t = 600)]
    pub width: usize,
    #[arg(long, default_value_t = 600)]
    pub height: usize,
    /// x_lo x_hi y_lo y_hi
    #[arg(long, num_args = 4, allow_negative_numbers = true, default_values_t = [-2.0, 2.0, -2.0, 2.0])]
    pub window: Vec<f64>,
    #[arg(long, default_value_t = 0.2)]
    pub damping: f64,
    #[arg(long, default_value_t = 0.5)]
    pub restoring: f64,
    #[arg(long, default_value_t = 1.0)]
    pub strength: f64,
    /// Vertical bob-to-magnet offset d.
    #[arg(long, default_value_t = 0.25)]
    pub plane_offset: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 0.1)]
    pub capture_radius: f64,
    #[arg(long, default_value_t = 0.05)]
    pub capture_speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellMode {
    Classical,
    Quantum,
    Lhv,
    Ghz,
    GhzContradiction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyArg {
    Constant,
    Table,
    Axis,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BellArgs {
    #[arg(long, value_enum)]
    pub mode: BellMode,
    /// Phase settings φ1 φ2 φ3 for `--mode ghz`.
    #[arg(long, num_args = 3, allow_negative_numbers = true, default_values_t = [FRAC_PI_6, FRAC_PI_6, FRAC_PI_6])]
    pub phi: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "axis")]
    pub strategy: StrategyArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FeigenbaumArgs {
    #[arg(long, value_enum, default_value = "logistic")]
    pub map: MapArg,
    #[arg(long, default_value_t = 7)]
    pub levels: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TsallisArgs {
    /// Probabilities of system A.
    #[arg(long, num_args = 1.., required = true)]
    pub p: Vec<f64>,
    /// Probabilities of an independent system B (defaults to A).
    #[arg(long, num_args = 1..)]
    pub p2: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
}

#[derive(Debug)]
pub enum CliError {
    /// Invalid flags or parameter values (exit 2).
    Usage(String),
    /// The run failed; `error` is reported as JSON (exit 1).
    Run { kind: String, message: String, json_file: Option<PathBuf> },
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn run(kind: &str, message: impl ToString) -> Self {
        CliError::Run {
            kind: kind.into(),
            message: message.to_string(),
            json_file: None,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Result of one subcommand: files written (relative to the output
/// directory) and the seed, if any.
struct Produced {
    outputs: Vec<String>,
    seed: Option<u64>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn num(x: f64) -> Value {
    json!(x)
}

fn cmd_bifurcate(args: &BifurcateArgs, out: &Path) -> Result<Produced, CliError> {
    let kind = MapKind::from(args.map);
    if kind == MapKind::Logistic && (args.a_min < 0.0 || args.a_max > 4.0) {
        return Err(usage(format!(
            "the logistic map requires 0 <= A <= 4 (got --a-min {} --a-max {})",
            args.a_min, args.a_max
        )));
    }
    if !(args.a_min < args.a_max) {
        return Err(usage("--a-min must be below --a-max"));
    }
    if args.n_param < 2 || args.keep < 1 {
        return Err(usage("--n-param must be at least 2 and --keep at least 1"));
    }
    let x0 = args.x0.unwrap_or(match kind {
        MapKind::Logistic => 0.3,
        MapKind::Sine => 1.0,
        MapKind::Quadratic => 0.0,
    });
    let diagram = bifurcation_diagram(kind, args.a_min, args.a_max, args.n_param, x0, args.transient, args.keep)
        .map_err(|e| match e {
            BifurcationError::Map { .. } => CliError::run("Divergence", e),
            other => usage(other.to_string()),
        })?;
    let name = "bifurcation.csv";
    write_csv(
        &out.join(name),
        "param,x",
        diagram
            .points
            .iter()
            .map(|&(a, x)| format!("{},{}", format_real(a), format_real(x))),
    )?;
    Ok(Produced {
        outputs: vec![name.into()],
        seed: None,
    })
}

fn decay_config(args: &DecayArgs) -> Result<DecayConfig, CliError> {
    let spec = MapSpec::new(args.map.into(), args.a).map_err(|e| usage(e.to_string()))?;
    let config = DecayConfig {
        spec,
        initial: Interval::new(args.i_lo, args.i_hi),
        escape: Interval::new(args.j_lo, args.j_hi),
        n_points: args.points,
        seeding: match args.seeding {
            SeedingArg::Even => Seeding::EvenlySpaced,
            SeedingArg::Random => Seeding::UniformRandom(args.seed),
        },
        max_iterations: args.max_iterations,
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

fn decay_error_kind(e: &DecayError) -> &'static str {
    match e {
        DecayError::InvalidConfig(_) => "InvalidConfig",
        DecayError::Map { .. } => "Divergence",
        DecayError::NoEscapes { .. } => "NoEscapes",
        DecayError::NoDecay { .. } => "NoDecay",
        DecayError::InsufficientData { .. } => "InsufficientData",
        DecayError::NonMonotone { .. } => "NonMonotone",
        DecayError::TooFewEvents { .. } => "TooFewEvents",
    }
}

fn cmd_decay(args: &DecayArgs, out: &Path) -> Result<Produced, CliError> {
    let config = decay_config(args)?;
    let fit_name = "decay_fit.json";
    let fail = |e: DecayError| CliError::Run {
        kind: decay_error_kind(&e).into(),
        message: e.to_string(),
        json_file: Some(out.join(fit_name)),
    };
    let curve = run_escape(&config).map_err(fail)?;
    let surv_name = "decay_survivors.csv";
    write_csv(
        &out.join(surv_name),
        "iteration,survivors",
        curve.survivors.iter().enumerate().map(|(t, n)| format!("{t},{n}")),
    )?;
    let mut outputs = vec![surv_name.to_string()];

    if let Some(lag) = args.delay_lag {
        let series = delay_series(&curve.event_times(), lag).map_err(fail)?;
        let name = "decay_delay.csv";
        write_csv(
            &out.join(name),
            &format!("dt_m,dt_m_plus_{lag}"),
            series
                .pairs
                .iter()
                .map(|&(a, b)| format!("{},{}", format_real(a), format_real(b))),
        )?;
        outputs.push(name.into());
    }

    let fit = fit_exponential(&curve, args.skip_transient, args.min_survivors).map_err(fail)?;
    let summary = flat_json([
        ("lambda".to_string(), num(fit.lambda)),
        ("half_life".into(), num(fit.half_life)),
        ("n0".into(), num(fit.n0)),
        ("r_squared".into(), num(fit.r_squared)),
        ("fit_window".into(), json!([fit.fit_window.0, fit.fit_window.1])),
        ("n_points".into(), json!(curve.n_points)),
        ("never_escaped".into(), json!(curve.never_escaped())),
    ]);
    write_json(&out.join(fit_name), &summary)?;
    println!("{}", serde_json::to_string(&summary).unwrap_or_default());
    outputs.push(fit_name.into());
    Ok(Produced {
        outputs,
        seed: match config.seeding {
            Seeding::UniformRandom(s) => Some(s),
            Seeding::EvenlySpaced => None,
        },
    })
}

fn cmd_basins(args: &BasinsArgs, out: &Path) -> Result<Produced, CliError> {
    let params = PendulumParams {
        magnets: triangle_magnets(),
        damping: args.damping,
        restoring: args.restoring,
        strength: args.strength,
        height: args.plane_offset,
        step: args.step,
        max_steps: args.max_steps,
        capture_radius: args.capture_radius,
        capture_speed: args.capture_speed,
    };
    let [x_lo, x_hi, y_lo, y_hi] = args.window[..] else {
        return Err(usage("--window takes exactly four values"));
    };
    let image = compute_basins(&params, args.width, args.height, Window::new(x_lo, x_hi, y_lo, y_hi))
        .map_err(|e| usage(e.to_string()))?;
    let name = "basins.ppm";
    std::fs::write(out.join(name), basin_ppm(&image))?;
    Ok(Produced {
        outputs: vec![name.into()],
        seed: None,
    })
}

fn sign_label(s: [i8; 3]) -> String {
    s.iter().map(|&v| if v > 0 { '+' } else { '-' }).collect()
}

fn cmd_bell(args: &BellArgs, out: &Path) -> Result<Produced, CliError> {
    let mut entries: Vec<(String, Value)> = vec![("mode".into(), json!(args.mode))];
    let mut seed = None;
    match args.mode {
        BellMode::Classical => {
            let c = chsh_classical_max();
            entries.push(("max".into(), json!(c.max)));
            entries.push(("argmax_count".into(), json!(c.argmax.len())));
            let labels: Vec<String> = c
                .argmax
                .iter()
                .map(|a| {
                    a.iter()
                        .zip(["Q", "R", "S", "T"])
                        .map(|(v, n)| format!("{n}{}", if *v > 0 { '+' } else { '-' }))
                        .collect()
                })
                .collect();
            entries.push(("argmax".into(), json!(labels)));
        }
        BellMode::Quantum => {
            let r = chsh_quantum();
            entries.extend([
                ("e_qs".into(), num(r.e_qs)),
                ("e_rs".into(), num(r.e_rs)),
                ("e_rt".into(), num(r.e_rt)),
                ("e_qt".into(), num(r.e_qt)),
                ("s_value".into(), num(r.s_value)),
                ("tsirelson_bound".into(), num(2.0 * SQRT_2)),
            ]);
        }
        BellMode::Lhv => {
            let strategy: &dyn LocalStrategy = match args.strategy {
                StrategyArg::Constant => &ConstantStrategy,
                StrategyArg::Table => &RandomTableStrategy,
                StrategyArg::Axis => &HiddenAxisStrategy,
            };
            let e = lhv_simulate(strategy, args.trials, args.seed).map_err(|e| usage(e.to_string()))?;
            seed = Some(args.seed);
            entries.extend([
                ("strategy".into(), json!(args.strategy)),
                ("n_trials".into(), json!(e.n_trials)),
                ("seed".into(), json!(args.seed)),
                ("e_qs".into(), num(e.means[0])),
                ("e_rs".into(), num(e.means[1])),
                ("e_rt".into(), num(e.means[2])),
                ("e_qt".into(), num(e.means[3])),
                ("estimate".into(), num(e.estimate)),
                ("standard_error".into(), num(e.standard_error)),
            ]);
        }
        BellMode::Ghz => {
            let [p1, p2, p3] = args.phi[..] else {
                return Err(usage("--phi takes exactly three values"));
            };
            let r = ghz_correlations(&GhzConfig { phi: [p1, p2, p3] });
            entries.extend([
                ("phi1".into(), num(p1)),
                ("phi2".into(), num(p2)),
                ("phi3".into(), num(p3)),
                ("phi_sum".into(), num(p1 + p2 + p3)),
                ("expectation".into(), num(r.expectation)),
            ]);
            for (s, p) in &r.outcomes {
                entries.push((format!("p_{}", sign_label(*s)), num(*p)));
            }
        }
        BellMode::GhzContradiction => {
            let r = ghz_contradiction();
            entries.push(("total_assignments".into(), json!(r.total)));
            for (i, n) in r.per_constraint.iter().enumerate() {
                entries.push((format!("satisfying_constraint_{}", i + 1), json!(n)));
            }
            entries.push(("satisfying_first_three".into(), json!(r.satisfying_first_three)));
            entries.push(("satisfying_all_four".into(), json!(r.satisfying_all_four)));
        }
    }
    let summary = flat_json(entries);
    let name = "bell.json";
    write_json(&out.join(name), &summary)?;
    println!("{}", serde_json::to_string(&summary).unwrap_or_default());
    Ok(Produced {
        outputs: vec![name.into()],
        seed,
    })
}

fn cmd_feigenbaum(args: &FeigenbaumArgs, out: &Path) -> Result<Produced, CliError> {
    let name = "feigenbaum.json";
    if !(4..=MAX_LEVELS).contains(&args.levels) {
        return Err(usage(format!("--levels must lie in 4..={MAX_LEVELS}")));
    }
    let est = estimate_feigenbaum(args.map.into(), args.levels).map_err(|e| {
        let kind = match &e {
            BifurcationError::Bracket { level, .. } => format!("BracketFailure(level {level})"),
            BifurcationError::UnsupportedMap(_) => "UnsupportedMap".into(),
            _ => "BifurcationError".into(),
        };
        CliError::Run {
            kind,
            message: e.to_string(),
            json_file: Some(out.join(name)),
        }
    })?;
    let summary = flat_json([
        ("map".to_string(), json!(args.map)),
        ("levels".into(), json!(args.levels)),
        ("bifurcation_points".into(), json!(est.points.values)),
        ("ratios".into(), json!(est.ratios)),
        ("final_ratio".into(), num(est.last)),
    ]);
    write_json(&out.join(name), &summary)?;
    println!("{}", serde_json::to_string(&summary).unwrap_or_default());
    Ok(Produced {
        outputs: vec![name.into()],
        seed: None,
    })
}

fn cmd_tsallis(args: &TsallisArgs, out: &Path) -> Result<Produced, CliError> {
    let a = Distribution::new(args.p.clone()).map_err(|e| usage(format!("--p: {e}")))?;
    let b = match &args.p2 {
        Some(p2) => Distribution::new(p2.clone()).map_err(|e| usage(format!("--p2: {e}")))?,
        None => a.clone(),
    };
    let bad = |e: crate::entropy::EntropyError| usage(e.to_string());
    let s = tsallis_entropy(&a, args.q, args.k).map_err(bad)?;
    let shannon = tsallis_entropy(&a, 1.0, args.k).map_err(bad)?;
    let add = additivity_check(&a, &b, args.q, args.k).map_err(bad)?;
    let summary = flat_json([
        ("q".to_string(), num(args.q)),
        ("k".into(), num(args.k)),
        ("value".into(), num(s.value)),
        ("shannon".into(), num(shannon.value)),
        ("outside_tested_regime".into(), json!(s.outside_tested_regime)),
        ("additivity_lhs".into(), num(add.lhs)),
        ("additivity_rhs".into(), num(add.rhs)),
        ("additivity_residual".into(), num(add.residual)),
        ("cross_term".into(), num(add.cross_term())),
    ]);
    let name = "tsallis.json";
    write_json(&out.join(name), &summary)?;
    println!("{}", serde_json::to_string(&summary).unwrap_or_default());
    Ok(Produced {
        outputs: vec![name.into()],
        seed: None,
    })
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Bifurcate(_) => "bifurcate",
        Command::Decay(_) => "decay",
        Command::Basins(_) => "basins",
        Command::Bell(_) => "bell",
        Command::Feigenbaum(_) => "feigenbaum",
        Command::Tsallis(_) => "tsallis",
        Command::Replay { .. } => "replay",
    }
}

fn parameters(cmd: &Command) -> Value {
    let v = match cmd {
        Command::Bifurcate(a) => serde_json::to_value(a),
        Command::Decay(a) => serde_json::to_value(a),
        Command::Basins(a) => serde_json::to_value(a),
        Command::Bell(a) => serde_json::to_value(a),
        Command::Feigenbaum(a) => serde_json::to_value(a),
        Command::Tsallis(a) => serde_json::to_value(a),
        Command::Replay { manifest } => Ok(json!({ "manifest": manifest })),
    };
    v.unwrap_or(Value::Null)
}

fn command_from_manifest(m: &RunManifest) -> Result<Command, CliError> {
    let p = m.parameters.clone();
    let bad = |e: serde_json::Error| usage(format!("manifest parameters: {e}"));
    Ok(match m.subcommand.as_str() {
        "bifurcate" => Command::Bifurcate(serde_json::from_value(p).map_err(bad)?),
        "decay" => Command::Decay(serde_json::from_value(p).map_err(bad)?),
        "basins" => Command::Basins(serde_json::from_value(p).map_err(bad)?),
        "bell" => Command::Bell(serde_json::from_value(p).map_err(bad)?),
        "feigenbaum" => Command::Feigenbaum(serde_json::from_value(p).map_err(bad)?),
        "tsallis" => Command::Tsallis(serde_json::from_value(p).map_err(bad)?),
        other => return Err(usage(format!("manifest names unknown subcommand {other:?}"))),
    })
}

fn dispatch(cmd: &Command, out: &Path) -> Result<Produced, CliError> {
    match cmd {
        Command::Bifurcate(a) => cmd_bifurcate(a, out),
        Command::Decay(a) => cmd_decay(a, out),
        Command::Basins(a) => cmd_basins(a, out),
        Command::Bell(a) => cmd_bell(a, out),
        Command::Feigenbaum(a) => cmd_feigenbaum(a, out),
        Command::Tsallis(a) => cmd_tsallis(a, out),
        Command::Replay { .. } => unreachable!("replay is resolved before dispatch"),
    }
}

/// Run a parsed command line, writing outputs and the manifest.
pub fn run(cli: Cli) -> Result<RunManifest, CliError> {
    let started = Instant::now();
    let command = match &cli.command {
        Command::Replay { manifest } => {
            let text = std::fs::read_to_string(manifest)?;
            let m: RunManifest =
                serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", manifest.display())))?;
            command_from_manifest(&m)?
        }
        _ => cli.command,
    };
    std::fs::create_dir_all(&cli.out_dir)?;
    let out = cli.out_dir.as_path();
    let produced = match cli.threads {
        Some(0) => return Err(usage("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::run("ThreadPool", e))?
            .install(|| dispatch(&command, out)),
        None => dispatch(&command, out),
    }?;
    let name = subcommand_name(&command);
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        subcommand: name.into(),
        parameters: parameters(&command),
        seed: produced.seed,
        toolkit_version: env!("CARGO_PKG_VERSION").into(),
        outputs: produced.outputs,
        threads: cli.threads,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let value = serde_json::to_value(&manifest).map_err(|e| CliError::run("Serialize", e))?;
    write_json(&out.join(format!("{name}_manifest.json")), &value)?;
    Ok(manifest)
}

/// Parse `args`, run, report errors; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(_) => 0,
        Err(err) => {
            let code = err.exit_code();
            match err {
                CliError::Usage(msg) => {
                    eprintln!("error: {msg}");
                    let obj = flat_json([
                        ("error".to_string(), json!("Usage")),
                        ("message".into(), json!(msg)),
                    ]);
                    println!("{obj}");
                }
                CliError::Io(e) => {
                    let obj = flat_json([
                        ("error".to_string(), json!("Io")),
                        ("message".into(), json!(e.to_string())),
                    ]);
                    println!("{obj}");
                }
                CliError::Run { kind, message, json_file } => {
                    let obj = flat_json([
                        ("error".to_string(), json!(kind)),
                        ("message".into(), json!(message)),
                    ]);
                    if let Some(path) = json_file {
                        if let Err(e) = write_json(&path, &obj) {
                            eprintln!("error: could not write {}: {e}", path.display());
                        }
                    }
                    println!("{obj}");
                }
            }
            code
        }
    }
}
