//! The `shapdb` command-line front end.
//!
//! Three subcommands: `shapq` (query attribution), `shapi` (inconsistency
//! attribution) and `classify` (classification only). Reports are JSON on
//! stdout or `--out`. Exit codes: 0 success, 1 input error, 2 work-budget
//! exceeded, 3 internal-consistency failure (an exact engine's efficiency
//! checksum did not match).

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::relational::{parse_database, parse_fds, parse_query, validate_fds, Database};
use crate::report::{
    checksum_violated, classify_report, shapi_report, shapq_report, QueryClassJson, ReportDocument,
};
use crate::shapi::{shapi_dispatch, tractability_report, Measure};
use crate::shapq::{classify_ucq, shapq_dispatch, ApproxMode, DispatchConfig, EngineChoice};

#[derive(Debug, Parser)]
#[command(
    name = "shapdb",
    version,
    about = "Shapley-value attribution of database facts to query answers and inconsistency"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Attribution of endogenous facts to a Boolean query answer
    Shapq(ShapqArgs),
    /// Attribution of facts to an inconsistency measure over FDs
    Shapi(ShapiArgs),
    /// Classification only: query shape and FD tractability
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
struct EngineArgs {
    /// Engine: auto, brute-perm, brute-subset, hierarchical, closed-form, sample
    #[arg(long, default_value = "auto")]
    engine: String,

    /// Sampling mode: additive or multiplicative
    #[arg(long, default_value = "additive")]
    approx: String,

    /// Additive error / multiplicative ratio parameter (sampling)
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,

    /// Failure probability (sampling)
    #[arg(long, default_value_t = 0.1)]
    delta: f64,

    /// Gap for multiplicative sampling; defaults to the heuristic
    /// 1/(n(n-1)) and is flagged as such in the report
    #[arg(long)]
    gap: Option<f64>,

    /// Random seed (reproducibility-first: randomness is opt-in)
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Player cap for the permutation engine
    #[arg(long, default_value_t = 9)]
    perm_cap: usize,

    /// Player cap for the subset engine
    #[arg(long, default_value_t = 20)]
    subset_cap: usize,

    /// Restrict the report to these fact ids (repeatable)
    #[arg(long = "fact")]
    facts: Vec<u64>,

    /// Write the JSON report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Include wall-clock timing in the report (makes output run-dependent)
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct ShapqArgs {
    /// Fact file (endo/exo lines)
    #[arg(long)]
    db: PathBuf,

    /// Query file (Boolean datalog rules)
    #[arg(long)]
    query: PathBuf,

    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Debug, Args)]
struct ShapiArgs {
    /// Fact file (endo/exo lines; all facts are players here)
    #[arg(long)]
    db: PathBuf,

    /// FD file (R: A B -> C lines)
    #[arg(long)]
    fds: PathBuf,

    /// Inconsistency measure: drastic, MI, P, R or MC
    #[arg(long)]
    measure: String,

    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Query file to classify
    #[arg(long)]
    query: Option<PathBuf>,

    /// FD file to classify (requires --measure)
    #[arg(long)]
    fds: Option<PathBuf>,

    /// Measure for the FD tractability row
    #[arg(long)]
    measure: Option<String>,

    /// Write the JSON report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Include wall-clock timing in the report
    #[arg(long)]
    timing: bool,
}

fn parse_engine(s: &str) -> Result<EngineChoice> {
    match s {
        "auto" => Ok(EngineChoice::Auto),
        "brute-perm" => Ok(EngineChoice::BrutePermutations),
        "brute-subset" => Ok(EngineChoice::BruteSubsets),
        "hierarchical" => Ok(EngineChoice::Hierarchical),
        "closed-form" => Ok(EngineChoice::ClosedForm),
        "sample" => Ok(EngineChoice::Sample),
        other => Err(Error::Input(format!(
            "unknown engine {other:?} (expected auto, brute-perm, brute-subset, \
             hierarchical, closed-form or sample)"
        ))),
    }
}

fn parse_approx(s: &str) -> Result<ApproxMode> {
    match s {
        "additive" => Ok(ApproxMode::Additive),
        "multiplicative" => Ok(ApproxMode::Multiplicative),
        other => Err(Error::Input(format!(
            "unknown sampling mode {other:?} (expected additive or multiplicative)"
        ))),
    }
}

fn dispatch_config(args: &EngineArgs) -> Result<DispatchConfig> {
    let engine = parse_engine(&args.engine)?;
    let approx = parse_approx(&args.approx)?;
    if engine == EngineChoice::Sample || engine == EngineChoice::Auto {
        if !(args.epsilon > 0.0) {
            return Err(Error::Input(format!(
                "epsilon must be positive, got {}",
                args.epsilon
            )));
        }
        if !(args.delta > 0.0 && args.delta < 1.0) {
            return Err(Error::Input(format!(
                "delta must lie in (0,1), got {}",
                args.delta
            )));
        }
    }
    if let Some(gap) = args.gap {
        if !(gap > 0.0) {
            return Err(Error::Input(format!("gap must be positive, got {gap}")));
        }
    }
    Ok(DispatchConfig {
        engine,
        approx,
        epsilon: args.epsilon,
        delta: args.delta,
        gap: args.gap,
        seed: args.seed,
        permutation_cap: args.perm_cap,
        subset_cap: args.subset_cap,
    })
}

fn load_database(path: &PathBuf) -> Result<Database> {
    parse_database(
        &std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?,
    )
}

fn selection(args: &EngineArgs) -> Option<Vec<u64>> {
    if args.facts.is_empty() {
        None
    } else {
        Some(args.facts.clone())
    }
}

fn execute(command: &Command) -> Result<ReportDocument> {
    let started = Instant::now();
    match command {
        Command::Shapq(args) => {
            let db = load_database(&args.db)?;
            let query_text = std::fs::read_to_string(&args.query)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", args.query.display())))?;
            let query = parse_query(&query_text)?;
            for cq in &query.disjuncts {
                for atom in &cq.atoms {
                    if let Some(arity) = db.schema().arity(&atom.relation) {
                        if arity != atom.terms.len() {
                            return Err(Error::Input(format!(
                                "relation {} has arity {arity} in the database but {} in the query",
                                atom.relation,
                                atom.terms.len()
                            )));
                        }
                    }
                }
            }
            let cfg = dispatch_config(&args.engine)?;
            let sel = selection(&args.engine);
            let run = shapq_dispatch(&query, &db, sel.as_deref(), &cfg)?;
            let complete = sel.is_none();
            let timing = args
                .engine
                .timing
                .then(|| started.elapsed().as_millis() as u64);
            Ok(shapq_report(&db, &run, cfg.seed, complete, timing))
        }
        Command::Shapi(args) => {
            let db = load_database(&args.db)?;
            let fd_text = std::fs::read_to_string(&args.fds)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", args.fds.display())))?;
            let fds = parse_fds(&fd_text)?;
            validate_fds(&db, &fds)?;
            let measure: Measure = args.measure.parse()?;
            let cfg = dispatch_config(&args.engine)?;
            let sel = selection(&args.engine);
            let budget = Budget::from_env()?;
            let run = shapi_dispatch(&db, &fds, measure, sel.as_deref(), &cfg, &budget)?;
            let complete = sel.is_none();
            let timing = args
                .engine
                .timing
                .then(|| started.elapsed().as_millis() as u64);
            Ok(shapi_report(&db, &run, cfg.seed, complete, timing))
        }
        Command::Classify(args) => {
            if args.query.is_none() && args.fds.is_none() {
                return Err(Error::Input("classify needs --query and/or --fds".into()));
            }
            let query_class = match &args.query {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| {
                        Error::Input(format!("cannot read {}: {e}", path.display()))
                    })?;
                    let q = parse_query(&text)?;
                    Some(QueryClassJson::from_classification(&classify_ucq(&q)))
                }
                None => None,
            };
            let fd_class = match &args.fds {
                Some(path) => {
                    let measure_name = args.measure.as_ref().ok_or_else(|| {
                        Error::Input("--fds classification needs --measure".into())
                    })?;
                    let measure: Measure = measure_name.parse()?;
                    let text = std::fs::read_to_string(path).map_err(|e| {
                        Error::Input(format!("cannot read {}: {e}", path.display()))
                    })?;
                    let fds = parse_fds(&text)?;
                    Some(tractability_report(&fds, measure))
                }
                None => None,
            };
            let timing = args.timing.then(|| started.elapsed().as_millis() as u64);
            Ok(classify_report(query_class, fd_class, timing))
        }
    }
}

fn out_path(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Shapq(a) => a.engine.out.as_ref(),
        Command::Shapi(a) => a.engine.out.as_ref(),
        Command::Classify(a) => a.out.as_ref(),
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BudgetExceeded(_) => 2,
        Error::Internal(_) => 3,
        _ => 1,
    }
}

/// Parses arguments, runs the selected mode, writes the report, and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(report) => {
            // internal-consistency tripwire: an exact engine whose values
            // do not sum to the wealth is a bug worth failing loudly over
            if let Some(c) = &report.checksum {
                if checksum_violated(c) {
                    eprintln!("shapdb: efficiency checksum failed: {c:?}");
                    return 3;
                }
            }
            let json = report.to_json();
            match out_path(&cli.command) {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &json) {
                        eprintln!("shapdb: cannot write {}: {e}", path.display());
                        return 1;
                    }
                }
                None => print!("{json}"),
            }
            0
        }
        Err(e) => {
            eprintln!("shapdb: {e}");
            exit_code(&e)
        }
    }
}
