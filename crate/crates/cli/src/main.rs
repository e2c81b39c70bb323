//! `hcburger`: samplers, word tools and the experiment catalog.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hcburger::bm::{
    endpoint_density_csv, sample_correlated_bm, sample_excursion, sample_meander, BmConfig,
    BmError, ExcursionWindow,
};
use hcburger::burger::{counts, match_indices, reduce, resolve_flex_partial, Word};
use hcburger::harness::{self, parse_config, ExperimentId, ExperimentSpec, HarnessError};
use hcburger::loops::loop_forest;
use hcburger::path::{cone_times_from_word, lattice_path};
use hcburger::rng::rng_from_seed;
use hcburger::sampler::{
    derive_params, iid_word, sample_empty_reduction, sample_no_burgers_backward, SamplerError,
};

#[derive(Parser)]
#[command(
    name = "hcburger",
    version,
    about = "Hamburger-cheeseburger model toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

/// Flags shared by all subcommands; each uses the ones it needs.
#[derive(clap::Args, Default)]
struct Opts {
    #[arg(long, global = true)]
    p: Option<f64>,
    /// A length, or a comma-separated grid for experiments.
    #[arg(long, global = true)]
    n: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    replicas: Option<u64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long = "cap-c", global = true)]
    cap_c: Option<f64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    id: Option<String>,
    #[arg(long = "max-trials", global = true)]
    max_trials: Option<u64>,
    /// Flat key=value file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Any other experiment key, as `key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WordMode {
    /// `X_1 ... X_2n` conditioned to reduce to nothing.
    Empty,
    /// `X_-n ... X_-1` conditioned to have no burger in any backward reduction.
    Backward,
    /// Unconditioned.
    Iid,
}

#[derive(Clone, Copy, ValueEnum)]
enum BmKind {
    Free,
    Meander,
    Excursion,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a word.
    Sample {
        #[arg(long, value_enum, default_value = "empty")]
        mode: WordMode,
    },
    /// Reduce a word and print the reduced word and its counts.
    Reduce {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        origin: i64,
    },
    /// Print the match pairs, unmatched indices and the Y-word.
    Match {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        origin: i64,
    },
    /// Lattice path of a word as CSV, rescaled when `--n` is given.
    Path {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        origin: i64,
        /// Print the cone records of the flexible orders as JSON instead.
        #[arg(long)]
        cones: bool,
    },
    /// Loop forest of a word as nested JSON.
    Loops {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        origin: i64,
    },
    /// Sample a Brownian path as CSV.
    BmSample {
        #[arg(long, value_enum, default_value = "meander")]
        kind: BmKind,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Endpoint density table `u,v,f` as CSV.
    Density {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 3.0)]
        extent: f64,
        #[arg(long, default_value_t = 41)]
        grid: usize,
    },
    /// Run one experiment and print its JSON report.
    Experiment,
    /// Summarize saved reports; fails if any of them failed.
    Report { files: Vec<PathBuf> },
}

enum Failure {
    Usage(String),
    ExperimentFailed(String),
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn parse_word(text: &str, origin: i64) -> Result<Word, Failure> {
    Word::parse(text.trim(), origin).map_err(usage)
}

fn emit(opts: &Opts, text: &str) -> Result<(), Failure> {
    match &opts.out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn emit_json(opts: &Opts, v: &Value) -> Result<(), Failure> {
    emit(opts, &serde_json::to_string_pretty(v).expect("json"))
}

fn single_n(opts: &Opts, default: usize) -> Result<usize, Failure> {
    match &opts.n {
        None => Ok(default),
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| usage(format!("--n expects a single length, got {s:?}"))),
    }
}

/// Config file first, then command-line flags on top.
fn experiment_spec(opts: &Opts) -> Result<ExperimentSpec, Failure> {
    let file = match &opts.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            parse_config(&text).map_err(usage)?
        }
        None => Default::default(),
    };
    let id = match (&opts.id, file.get("id")) {
        (Some(text), _) | (None, Some(text)) => text.parse::<ExperimentId>().map_err(usage)?,
        (None, None) => return Err(usage("experiment needs --id or an id key in --config")),
    };
    let mut spec = ExperimentSpec::new(id);
    for (k, v) in file.iter().filter(|(k, _)| k.as_str() != "id") {
        spec.set(k, v).map_err(usage)?;
    }
    let flags: [(&str, Option<String>); 8] = [
        ("p", opts.p.map(|x| x.to_string())),
        ("n", opts.n.clone()),
        ("seed", opts.seed.map(|x| x.to_string())),
        ("replicas", opts.replicas.map(|x| x.to_string())),
        ("dt", opts.dt.map(|x| x.to_string())),
        ("delta", opts.delta.map(|x| x.to_string())),
        ("cap-c", opts.cap_c.map(|x| x.to_string())),
        ("max-trials", opts.max_trials.map(|x| x.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            spec.set(k, &v).map_err(usage)?;
        }
    }
    for kv in &opts.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| usage(format!("--set expects key=value, got {kv:?}")))?;
        if k.trim() == "id" {
            return Err(usage("use --id to choose the experiment"));
        }
        spec.set(k.trim(), v.trim()).map_err(usage)?;
    }
    Ok(spec)
}

fn bm_config(opts: &Opts) -> Result<BmConfig, Failure> {
    BmConfig::new(
        opts.p.unwrap_or(1.0 / 3.0),
        opts.dt.unwrap_or(1e-3),
        opts.seed.unwrap_or(1),
    )
    .map_err(usage)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let opts = &cli.opts;
    if let Some(t) = opts.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(usage)?;
    }
    match cli.command {
        Command::Sample { mode } => {
            let params = derive_params(opts.p.unwrap_or(1.0 / 3.0)).map_err(usage)?;
            let n = single_n(opts, 10)?;
            let seed = opts.seed.unwrap_or(1);
            let max_trials = opts.max_trials.unwrap_or(1 << 32);
            let v = match mode {
                WordMode::Empty => serde_json::to_value(
                    sample_empty_reduction(&params, n, seed, max_trials).map_err(usage)?,
                ),
                WordMode::Backward => serde_json::to_value(
                    sample_no_burgers_backward(&params, n, seed, max_trials).map_err(usage)?,
                ),
                WordMode::Iid => {
                    Ok(json!({ "word": iid_word(&params, n, 1, seed).to_text(), "seed": seed }))
                }
            };
            emit_json(opts, &v.expect("json"))
        }
        Command::Reduce { word, origin } => {
            let w = parse_word(&word, origin)?;
            let r = reduce(&w);
            emit_json(
                opts,
                &json!({ "reduced": r.to_text(), "counts": counts(&w) }),
            )
        }
        Command::Match { word, origin } => {
            let w = parse_word(&word, origin)?;
            let m = match_indices(&w);
            emit_json(
                opts,
                &json!({
                    "pairs": m.pairs(),
                    "unmatched": m.unmatched(),
                    "y_word": resolve_flex_partial(&w, &m).to_text(),
                }),
            )
        }
        Command::Path {
            word,
            origin,
            cones,
        } => {
            let w = parse_word(&word, origin)?;
            let m = match_indices(&w);
            let scale = single_n(opts, 1)? as u64;
            if cones {
                let recs = cone_times_from_word(&w, &m, scale.max(1)).map_err(usage)?;
                return emit_json(opts, &serde_json::to_value(recs).expect("json"));
            }
            let y = resolve_flex_partial(&w, &m);
            let path = lattice_path(&y).map_err(usage)?;
            if opts.n.is_some() {
                emit(opts, &path.with_scale(scale.max(1)).to_scaled_csv())
            } else {
                emit(opts, &path.to_csv())
            }
        }
        Command::Loops { word, origin } => {
            let w = parse_word(&word, origin)?;
            let forest = loop_forest(&w, &match_indices(&w)).map_err(usage)?;
            emit_json(opts, &forest.to_json())
        }
        Command::BmSample { kind, t } => {
            let cfg = bm_config(opts)?;
            let mut rng = rng_from_seed(cfg.seed);
            let max_trials = opts.max_trials.unwrap_or(1 << 32);
            let path = match kind {
                BmKind::Free => sample_correlated_bm(&cfg, t, [0.0, 0.0], &mut rng),
                BmKind::Meander => {
                    sample_meander(&cfg, t, &mut rng, max_trials)
                        .map_err(usage)?
                        .path
                }
                BmKind::Excursion => {
                    let window =
                        ExcursionWindow::new(opts.delta.unwrap_or(0.02), opts.cap_c.unwrap_or(4.0))
                            .map_err(usage)?;
                    sample_excursion(&cfg, window, &mut rng, max_trials)
                        .map_err(usage)?
                        .path
                }
            };
            emit(opts, &path.to_csv())
        }
        Command::Density { t, extent, grid } => {
            if !(t > 0.0 && extent > 0.0 && grid >= 2) {
                return Err(usage("density needs t > 0, extent > 0 and grid >= 2"));
            }
            let cfg = bm_config(opts)?;
            emit(opts, &endpoint_density_csv(&cfg, t, extent, grid))
        }
        Command::Experiment => {
            let spec = experiment_spec(opts)?;
            let report = harness::run(&spec).map_err(|e| match e {
                HarnessError::InvalidSpec(_)
                | HarnessError::Sampler(SamplerError::OutOfRange(_) | SamplerError::ZeroLength)
                | HarnessError::Bm(
                    BmError::OutOfRange(_) | BmError::BadStep(_) | BmError::BadWindow,
                ) => usage(e),
                e => Failure::ExperimentFailed(e.to_string()),
            })?;
            emit_json(opts, &report.to_json())?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure::ExperimentFailed(format!(
                    "{} did not pass",
                    report.id
                )))
            }
        }
        Command::Report { files } => {
            if files.is_empty() {
                return Err(usage("report needs at least one report file"));
            }
            let mut rows = Vec::new();
            let mut all = true;
            for path in &files {
                let text = fs::read_to_string(path)
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                let v: Value = serde_json::from_str(&text)
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                let pass = v["pass"]
                    .as_bool()
                    .ok_or_else(|| usage(format!("{}: no pass field", path.display())))?;
                all &= pass;
                rows.push(json!({
                    "file": path.display().to_string(),
                    "id": v["id"],
                    "pass": pass,
                    "runtime_seconds": v["runtime_seconds"],
                }));
            }
            emit_json(opts, &json!({ "reports": rows, "pass": all }))?;
            if all {
                Ok(())
            } else {
                Err(Failure::ExperimentFailed("some reports failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ExperimentFailed(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
