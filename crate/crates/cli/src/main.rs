use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use harmean::asymptotics::{
    frobenius_sq_limit, limiting_law, op_error_limit, optimal_split_size, overlap_gap, spike_prediction,
};
use harmean::harness::{figure_configs, run_experiment, run_sweep, spike_experiment, summarize, write_csv_file, Figure};
use harmean::{selftest, Error, ExperimentConfig, Field, MeanKind, TrialRecord};

/// Environment variable naming the directory CSV files go to when no
/// `--output` is given.
const OUTPUT_DIR_VAR: &str = "HARMEAN_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "results";

#[derive(Parser)]
#[command(name = "harmean", version, about = "Harmonic and arithmetic means of Wishart matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print limiting spectral edges, error limits and spike predictions.
    Predict(PredictArgs),
    /// Run one experiment described by a config file.
    Simulate(SimulateArgs),
    /// Run a figure preset.
    Sweep(SweepArgs),
    /// Rank-one spike experiment over a list of spike strengths.
    Spike(SpikeArgs),
    /// Check closed forms and matrix identities on random inputs.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 2)]
    splits: usize,
    #[arg(long)]
    theta: Option<f64>,
    /// Restrict the output to one mean; both are printed otherwise.
    #[arg(long)]
    mean: Option<MeanKind>,
    /// Emit `quantity,value` rows instead of text.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Overrides the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    figure: Figure,
    /// Multiplies p and the trial count of every cell.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpikeArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    gamma: f64,
    /// Comma-separated spike strengths.
    #[arg(long, value_delimiter = ',', required = true)]
    theta: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value = "complex")]
    field: Field,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Numerical(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else if matches!(e, Error::Io(_) | Error::Csv(_)) {
            Failure::Other(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn output_path(explicit: Option<PathBuf>, configured: Option<&Path>, stem: &str) -> PathBuf {
    if let Some(p) = explicit {
        return p;
    }
    if let Some(p) = configured {
        return p.to_path_buf();
    }
    let dir = std::env::var_os(OUTPUT_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    dir.join(format!("{stem}.csv"))
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

fn print_summary(rows: &[TrialRecord], path: &Path) {
    for s in summarize(rows) {
        println!(
            "{:<24} {:<28} trials={:<3} op_rel={:.6} sd={:.6} frob={:.6} lambda1={:.6} overlap={} pred_op={}",
            s.experiment_id,
            s.estimator,
            s.trials,
            s.mean_op_rel_error,
            s.sd_op_rel_error,
            s.mean_frob_sq_per_p,
            s.mean_lambda1,
            opt(s.mean_overlap_sq),
            opt(s.pred_op_error),
        );
    }
    println!("wrote {} rows to {}", rows.len(), path.display());
}

fn write_rows(rows: &[TrialRecord], path: &Path) -> CliResult {
    write_csv_file(path, rows)?;
    print_summary(rows, path);
    Ok(())
}

enum Value {
    Count(usize),
    Real(f64),
}

/// Collects `(quantity, value)` pairs, printed as text or CSV.
struct Table {
    csv: bool,
    rows: Vec<(String, Value)>,
}

impl Table {
    fn push(&mut self, key: impl Into<String>, value: f64) {
        self.rows.push((key.into(), Value::Real(value)));
    }

    fn push_count(&mut self, key: impl Into<String>, value: usize) {
        self.rows.push((key.into(), Value::Count(value)));
    }

    fn print(&self) {
        if self.csv {
            println!("quantity,value");
            for (k, v) in &self.rows {
                match v {
                    Value::Count(n) => println!("{k},{n}"),
                    Value::Real(x) => println!("{k},{x}"),
                }
            }
        } else {
            let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in &self.rows {
                match v {
                    Value::Count(n) => println!("{k:<width$}  {n}"),
                    Value::Real(x) => println!("{k:<width$}  {x:.6}"),
                }
            }
        }
    }
}

fn predict(args: PredictArgs) -> CliResult {
    let kinds = match args.mean {
        Some(k) => vec![k],
        None => vec![MeanKind::Arithmetic, MeanKind::Harmonic],
    };
    let mut table = Table {
        csv: args.csv,
        rows: Vec::new(),
    };
    table.push("gamma", args.gamma);
    table.push_count("splits", args.splits);
    for &kind in &kinds {
        let law = limiting_law(args.gamma, kind, args.splits)?;
        table.push(format!("{kind}.lower"), law.lower);
        table.push(format!("{kind}.upper"), law.upper);
        table.push(format!("{kind}.op_limit"), op_error_limit(args.gamma, kind, args.splits)?);
        if kind == MeanKind::Arithmetic || args.splits == 2 {
            table.push(format!("{kind}.frob_limit"), frobenius_sq_limit(args.gamma, kind)?);
        }
    }
    if kinds.contains(&MeanKind::Harmonic) {
        let n_max = harmean::asymptotics::max_splits(args.gamma)?;
        let (best, _) = optimal_split_size(args.gamma, n_max)?;
        table.push_count("harmonic.optimal_splits", best);
    }
    if let Some(theta) = args.theta {
        if args.splits != 2 {
            return Err(Failure::Usage(format!(
                "spike predictions need --splits 2, got {}",
                args.splits
            )));
        }
        for &kind in &kinds {
            let s = spike_prediction(theta, args.gamma, kind)?;
            table.push(format!("{kind}.threshold"), s.threshold);
            table.push(format!("{kind}.lambda1"), s.lambda1_limit);
            table.push(format!("{kind}.overlap_sq"), s.overlap_sq_limit);
        }
        table.push("overlap_gap", overlap_gap(theta, args.gamma)?);
    }
    table.print();
    Ok(())
}

fn simulate(args: SimulateArgs) -> CliResult {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(s) = args.seed {
        config.base_seed = s;
    }
    config.validate()?;
    let path = output_path(args.output, config.output_path.as_deref(), &config.experiment_id);
    let rows = run_experiment(&config)?;
    write_rows(&rows, &path)
}

fn sweep(args: SweepArgs) -> CliResult {
    let configs = figure_configs(args.figure, args.scale)?;
    let path = output_path(args.output, None, &format!("fig{}", args.figure));
    let rows = run_sweep(&configs)?;
    write_rows(&rows, &path)
}

fn spike(args: SpikeArgs) -> CliResult {
    let path = output_path(args.output, None, &format!("spike_p{}", args.p));
    let rows = spike_experiment(args.p, args.gamma, &args.theta, args.trials, args.field, args.seed)?;
    write_rows(&rows, &path)
}

fn run_selftest(args: SelftestArgs) -> CliResult {
    let report = selftest::run(args.seed)?;
    for check in &report.checks {
        println!("{check}");
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Numerical("selftest failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Predict(a) => predict(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Spike(a) => spike(a),
        Command::Selftest(a) => run_selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
