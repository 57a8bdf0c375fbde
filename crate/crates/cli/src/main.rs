use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use amfem_cli::{bench_list, cmd_compare, cmd_run, cmd_table, CommandError, ConfigError, Settings, HISTORY_FILE};

#[derive(Parser)]
#[command(name = "amfem", version, about = "Adaptive mixed finite elements for convection-diffusion-reaction benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark and write history.csv (and optional VTK files).
    Run(RunArgs),
    /// Print a history CSV as a fixed-width table.
    Table { history: PathBuf },
    /// Merge two or more histories into one long-format CSV.
    Compare {
        #[arg(required = true, num_args = 2..)]
        histories: Vec<PathBuf>,
        /// Comma-separated series labels; defaults to the file stems.
        #[arg(long)]
        labels: Option<String>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available benchmarks and their defaults.
    BenchList,
}

#[derive(Args)]
struct RunArgs {
    /// key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    benchmark: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    /// Bisections per marked element.
    #[arg(long)]
    b: Option<String>,
    /// adaptive or uniform.
    #[arg(long)]
    mode: Option<String>,
    /// Number of meshes to solve on (alias of --max-iters).
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    max_dof: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    #[arg(long)]
    eta_target: Option<String>,
    /// Weights of the contraction quantity: divergence,estimator,data.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write mesh_<k>.vtk every N iterations (0 disables).
    #[arg(long)]
    vtk_every: Option<String>,
    #[arg(long)]
    dump_matrix: bool,
    #[arg(long, short)]
    quiet: bool,
}

fn settings(args: RunArgs) -> Result<Settings, ConfigError> {
    let mut s = match &args.config {
        Some(p) => Settings::parse_file(p)?,
        None => Settings::default(),
    };
    s.set("benchmark", args.benchmark);
    s.set("epsilon", args.epsilon);
    s.set("theta", args.theta);
    s.set("b", args.b);
    s.set("mode", args.mode);
    s.set("levels", args.levels);
    s.set("max-dof", args.max_dof);
    s.set("max-iters", args.max_iters);
    s.set("eta-target", args.eta_target);
    s.set("weights", args.weights);
    s.set("out", args.out.map(|p| p.display().to_string()));
    s.set("vtk-every", args.vtk_every);
    if args.dump_matrix {
        s.set("dump-matrix", Some("true".into()));
    }
    Ok(s)
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("AMFEM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("AMFEM_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn runtime_failure(e: CommandError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn usage_failure(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = init_threads() {
        return usage_failure(e);
    }
    match cli.command {
        Command::Run(args) => {
            let quiet = args.quiet;
            let config = match settings(args).and_then(Settings::into_config) {
                Ok(c) => c,
                Err(e) => return usage_failure(e),
            };
            let progress = |r: &amfem::adapt::IterationRecord| {
                if !quiet {
                    eprintln!(
                        "k={:<3} ndof={:<8} eta={:.4e} error={} ({:.2}s)",
                        r.k,
                        r.ndof,
                        r.eta,
                        r.error.map(|e| format!("{e:.4e}")).unwrap_or_else(|| "-".into()),
                        r.seconds
                    );
                }
            };
            match cmd_run(&config, progress) {
                Ok(_) => {
                    if !quiet {
                        eprintln!("wrote {}", config.out.join(HISTORY_FILE).display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => runtime_failure(e),
            }
        }
        Command::Table { history } => match cmd_table(&history) {
            Ok(t) => {
                print!("{t}");
                ExitCode::SUCCESS
            }
            Err(e) => runtime_failure(e),
        },
        Command::Compare { histories, labels, out } => {
            let labels: Vec<String> = match labels {
                Some(l) => l.split(',').map(|s| s.trim().to_string()).collect(),
                None => histories
                    .iter()
                    .map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
                    .collect(),
            };
            if labels.len() != histories.len() {
                return usage_failure("--labels must name every history");
            }
            let inputs: Vec<(String, PathBuf)> = labels.into_iter().zip(histories).collect();
            let text = match cmd_compare(&inputs) {
                Ok(t) => t,
                Err(e) => return runtime_failure(e),
            };
            match out {
                Some(path) => match amfem_cli::history::write_atomic(&path, |f| {
                    use std::io::Write;
                    f.write_all(text.as_bytes()).map_err(Into::into)
                }) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => runtime_failure(e.into()),
                },
                None => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
            }
        }
        Command::BenchList => {
            print!("{}", bench_list());
            ExitCode::SUCCESS
        }
    }
}
