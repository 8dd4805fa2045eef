//! `streetwalker`: validate street files, run the search strategies, batch
//! benchmarks to CSV and render trajectories to SVG.
//!
//! Exit codes: 0 success, 1 usage error, 2 geometry or street error,
//! 3 invariant violation.

mod target;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use streetwalker::harness::{
    family_seed, render_svg, run_batch, run_instance, write_csv, FamilyKind, InstanceFamily, DEFAULT_FAMILY_SEED,
};
use streetwalker::navigator::{NavError, StrategyConfig};
use streetwalker::street::shortest_path;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Street(String),
    Invariant(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Street(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Street(m) | CliError::Invariant(m) => m,
        }
    }
}

fn nav_error(instance: &str, e: NavError) -> CliError {
    let msg = format!("{instance}: {e}");
    if e.is_invariant_violation() {
        CliError::Invariant(msg)
    } else if matches!(e, NavError::BadStep(_)) {
        CliError::Usage(msg)
    } else {
        CliError::Street(msg)
    }
}

fn io_error(path: &str, e: io::Error) -> CliError {
    CliError::Usage(format!("{path}: {e}"))
}

#[derive(Parser)]
#[command(name = "streetwalker", version, about = "Gap-sensor navigation in street polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Det,
    Rand,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Corridor,
    Funnel,
    TwoPocket,
    Convex,
}

impl From<Family> for FamilyKind {
    fn from(f: Family) -> Self {
        match f {
            Family::Corridor => FamilyKind::Corridor,
            Family::Funnel => FamilyKind::Funnel,
            Family::TwoPocket => FamilyKind::TwoPocket,
            Family::Convex => FamilyKind::Convex,
        }
    }
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "det")]
    strategy: Strategy,
    /// Strategy seed; defaults to the family seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Step length; defaults to the instance's own or geodesic/1000.
    #[arg(long)]
    base_step: Option<f64>,
}

impl RunArgs {
    fn config(&self) -> StrategyConfig {
        let seed = self.seed.unwrap_or_else(|| family_seed(DEFAULT_FAMILY_SEED));
        let mut cfg = match self.strategy {
            Strategy::Det => StrategyConfig::deterministic(),
            Strategy::Rand => StrategyConfig::randomized(seed),
        };
        cfg.base_step = self.base_step;
        cfg
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check that a file describes a valid street.
    Validate { file: String },
    /// Walk one street: a file or corridor:<offset>, funnel:<deg>[:<depth>],
    /// single-gap:<seed>, convex:<seed>.
    Run {
        target: String,
        #[command(flatten)]
        args: RunArgs,
        /// Also render the run to this SVG file.
        #[arg(long)]
        svg: Option<String>,
    },
    /// Run a family and report per-run ratios as CSV.
    Bench {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, value_enum, default_value = "rand")]
        strategy: Strategy,
        /// Family seed; overrides STREETWALKER_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; CSV goes to stdout when absent.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Draw a run against the shortest path.
    Render {
        #[arg(long)]
        svg: String,
        #[arg(default_value = "corridor:17")]
        target: String,
        #[command(flatten)]
        args: RunArgs,
    },
}

fn validate(file: &str) -> Result<(), CliError> {
    let inst = target::resolve(file)?;
    let st = &inst.street;
    println!(
        "{file}: valid street, {} vertices, s={} t={}, geodesic length {}",
        st.polygon().len(),
        st.start(),
        st.target(),
        shortest_path(st).length
    );
    Ok(())
}

fn run(target: &str, args: &RunArgs, svg: Option<&str>) -> Result<(), CliError> {
    let inst = target::resolve(target)?;
    let (report, traj) = run_instance(&inst, &args.config()).map_err(|e| nav_error(&e.instance, e.source))?;
    let ev = report.events;
    println!(
        "{} {} seed={} path_len={} geo_len={} ratio={:.6} funnels={} events: appear={} disappear={} split={} merge={}",
        report.instance,
        report.strategy.name(),
        report.seed,
        report.path_len,
        report.geo_len,
        report.ratio,
        traj.funnels,
        ev.appear,
        ev.disappear,
        ev.split,
        ev.merge
    );
    if let Some(path) = svg {
        let doc = render_svg(&inst.street, Some(&traj), &shortest_path(&inst.street));
        std::fs::write(path, doc).map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

fn bench(family: Family, trials: usize, strategy: Strategy, seed: Option<u64>, csv: Option<&str>) -> Result<(), CliError> {
    let mut fam = InstanceFamily::new(family.into());
    if let Some(s) = seed {
        fam.seed = s;
    }
    let instances = fam.instances().map_err(|e| CliError::Street(e.to_string()))?;
    let cfg = match strategy {
        Strategy::Det => StrategyConfig::deterministic(),
        Strategy::Rand => StrategyConfig::randomized(fam.seed),
    };
    let batch = run_batch(&instances, &cfg, trials, fam.seed).map_err(|e| nav_error(&e.instance, e.source))?;
    let written = match csv {
        Some(path) => {
            let f = File::create(path).map_err(|e| io_error(path, e))?;
            write_csv(BufWriter::new(f), &batch.reports)
        }
        None => write_csv(io::stdout().lock(), &batch.reports),
    };
    written.map_err(|e| CliError::Usage(format!("writing CSV: {e}")))?;
    let a = batch.aggregate;
    eprintln!(
        "{} runs: mean ratio {:.4}, max {:.4}, stddev {:.4}",
        a.runs, a.mean, a.max, a.stddev
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Run { target, args, svg } => run(target, args, svg.as_deref()),
        Command::Bench {
            family,
            trials,
            strategy,
            seed,
            csv,
        } => bench(*family, *trials, *strategy, *seed, csv.as_deref()),
        Command::Render { svg, target, args } => run(target, args, Some(svg)),
    };
    match result {
        Ok(()) => {
            let _ = io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
