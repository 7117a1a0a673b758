//! `bscsim` command line.
//!
//! ```text
//! bscsim roc      [--config FILE] [--out DIR] [--seed N] [KEY=VALUE ...]
//! bscsim dynrange [--config FILE] [--out DIR] [--seed N] [KEY=VALUE ...]
//! bscsim selftest
//! ```
//!
//! Exit status: 0 success, 1 selftest failure, 2 invalid configuration or
//! arguments, 3 I/O failure. Errors are reported as one line on stderr:
//! `error kind=<config|io|runtime> msg="..."`.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::Settings;
use crate::error::SimError;
use crate::exec::with_thread_cap;
use crate::harness::{run_dynrange, run_roc, write_dynrange_csv, write_roc_csv, ExperimentConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable capping the worker count (0 = automatic).
pub const THREADS_ENV: &str = "SIM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "bscsim", version, about = "Bistatic backscatter MIMO link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detection ROC: simulated and closed-form P_D over a P_FA grid.
    Roc(RunArgs),
    /// Dynamic range ζ versus BSD height for each projection scenario.
    Dynrange(RunArgs),
    /// Built-in consistency checks.
    Selftest,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Config file with dotted keys, e.g. `scene.M = 16`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory receiving the CSV output.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Master seed; overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
    /// `key=value` overrides applied after the config file.
    overrides: Vec<String>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Io(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Io(_) => EXIT_IO,
            Failure::Runtime(_) => EXIT_SELFTEST,
        }
    }

    fn report(&self) -> String {
        let (kind, msg) = match self {
            Failure::Config(m) => ("config", m),
            Failure::Io(m) => ("io", m),
            Failure::Runtime(m) => ("runtime", m),
        };
        format!("error kind={kind} msg={:?}", msg.replace('\n', " "))
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Io(_) | SimError::Csv(_) => Failure::Io(e.to_string()),
            SimError::Config(_) | SimError::Domain(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut settings = Settings::default();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
        settings.apply_file(&text)?;
    }
    for o in &args.overrides {
        settings.apply_override(o)?;
    }
    let mut cfg = settings.build()?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn thread_cap() -> Result<usize, Failure> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Config(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn create_output(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Io(format!("cannot create {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Roc(args) => {
            let cfg = load_config(&args)?;
            let threads = thread_cap()?;
            let points = with_thread_cap(threads, || run_roc(&cfg))?;
            write_roc_csv(create_output(&args.out, "roc.csv")?, &points)?;
            println!("wrote {} ({} rows)", args.out.join("roc.csv").display(), points.len());
        }
        Command::Dynrange(args) => {
            let cfg = load_config(&args)?;
            let threads = thread_cap()?;
            let points = with_thread_cap(threads, || run_dynrange(&cfg))?;
            write_dynrange_csv(create_output(&args.out, "dynrange.csv")?, &points)?;
            println!("wrote {} ({} rows)", args.out.join("dynrange.csv").display(), points.len());
        }
        Command::Selftest => {
            let mut failed = 0;
            for (name, outcome) in crate::selftest::run_all() {
                match outcome {
                    Ok(()) => println!("ok   {name}"),
                    Err(msg) => {
                        failed += 1;
                        println!("FAIL {name}: {msg}");
                    }
                }
            }
            if failed > 0 {
                return Err(Failure::Runtime(format!("{failed} selftest check(s) failed")));
            }
        }
    }
    Ok(())
}

/// Parses `argv` (including the program name), runs, and returns the exit status.
pub fn parse_and_run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return EXIT_OK;
        }
        Err(e) => {
            let first = e.to_string();
            let line = first.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", Failure::Config(line.to_string()).report());
            return EXIT_CONFIG;
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("{}", f.report());
            f.code()
        }
    }
}
