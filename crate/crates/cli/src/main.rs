//! `sfm`: run support feature machine experiments from the command line.
//!
//! Exit status is 0 on success, 2 on a usage or configuration error and 1
//! when a run fails (including a table with skipped or failed cells).

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use sfm_core::harness::{self, run_on, DatasetSpec};
use sfm_core::{dataset, derive_seed, model_io, FeatureSpace, Model};

use config::{FileConfig, Resolver};

#[derive(Debug, Parser)]
#[command(name = "sfm", version, about = "Support feature machine experiments")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cross-validate one classifier on one dataset and feature space.
    Run {
        #[command(flatten)]
        common: Common,
        /// Also fit on all rows and write model.txt and space.txt.
        #[arg(long)]
        save_model: bool,
    },
    /// Datasets x family combinations for one classifier.
    Table {
        #[command(flatten)]
        common: Common,
    },
    /// Kernel-anchor acceptance over an (alpha, delta) grid.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Write the n-bit parity dataset as CSV.
    GenParity {
        #[arg(long)]
        bits: usize,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// List the features of a saved model by decreasing |weight|.
    InspectModel {
        model: PathBuf,
        space: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment TOML file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

/// Bad input from the user rather than a failed run.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| Usage(e).into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();

    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { common, save_model } => run(&common, save_model),
        Command::Table { common } => table(&common),
        Command::Sweep { common } => sweep(&common),
        Command::GenParity { bits, out } => gen_parity(bits, &out),
        Command::InspectModel { model, space } => inspect(&model, &space),
    }
}

struct Prepared {
    file: FileConfig,
    resolver: Resolver,
    seed: u64,
}

fn prepare(common: &Common) -> Result<Prepared> {
    let file = usage(FileConfig::load(&common.config))?;
    setup_jobs(common.jobs)?;
    fs::create_dir_all(&common.out)
        .with_context(|| format!("creating output directory {}", common.out.display()))?;
    Ok(Prepared {
        seed: common.seed.or(file.seed).unwrap_or(0),
        resolver: Resolver::new(&common.config),
        file,
    })
}

#[cfg(feature = "parallel")]
fn setup_jobs(jobs: Option<usize>) -> Result<()> {
    if let Some(n) = jobs {
        if n == 0 {
            return usage(Err(anyhow::anyhow!("--jobs must be >= 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn setup_jobs(jobs: Option<usize>) -> Result<()> {
    if jobs.is_some_and(|n| n > 1) {
        log::warn!("built without the parallel feature; --jobs ignored");
    }
    Ok(())
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn run(common: &Common, save_model: bool) -> Result<()> {
    let p = prepare(common)?;
    let name = usage(p.file.single_dataset())?;
    let spec = p.resolver.resolve(name, p.seed);
    let config = usage(p.file.experiment(p.seed, spec))?;
    let named = config.dataset.load()?;
    let result = run_on(&config, &named)?;

    write(&common.out, "results.csv", &harness::results_csv([&result]))?;
    write(&common.out, "summary.csv", &harness::summary_csv([&result]))?;
    let acc = result.mean_accepted();
    println!(
        "{} {} {}: {}  (features X {:.1} Z {:.1} H {:.1} K {:.1}, {:.1}s)",
        result.dataset,
        result.classifier,
        result.families,
        result.cell(),
        acc[0],
        acc[1],
        acc[2],
        acc[3],
        result.wall_time.as_secs_f64()
    );
    if let Some(r) = &result.reference {
        println!("reference: {r}");
    }

    if save_model {
        let fitted = harness::fit_pipeline(&config, &named.data, derive_seed(p.seed, u64::MAX))?;
        write(&common.out, "model.txt", &fitted.model.to_text())?;
        write(&common.out, "space.txt", &fitted.space.to_text())?;
    }
    Ok(())
}

fn table(common: &Common) -> Result<()> {
    let p = prepare(common)?;
    let names = p.file.dataset_list();
    let specs: Vec<DatasetSpec> = names.iter().map(|n| p.resolver.resolve(n, p.seed)).collect();
    let combos = usage(p.file.combo_list())?;
    let base = usage(p.file.experiment(p.seed, DatasetSpec::Parity { bits: 2 }))?;
    let table = harness::run_table(&specs, &base, &combos).map_err(|e| Usage(e.into()))?;

    write(&common.out, "table.csv", &table.to_csv())?;
    write(&common.out, "table.txt", &table.to_text())?;
    write(&common.out, "results.csv", &harness::results_csv(table.results()))?;
    write(&common.out, "summary.csv", &harness::summary_csv(table.results()))?;
    print!("{}", table.to_text());
    if table.is_partial() {
        anyhow::bail!("table is incomplete; see skipped or failed cells");
    }
    Ok(())
}

fn sweep(common: &Common) -> Result<()> {
    let p = prepare(common)?;
    let grid = usage(
        p.file
            .sweep
            .as_ref()
            .context("config has no [sweep] section"),
    )?;
    let name = p.file.dataset.as_deref().unwrap_or("gaussians");
    let spec = match p.resolver.resolve(name, p.seed) {
        DatasetSpec::TwoGaussians { per_class, seed } => DatasetSpec::TwoGaussians {
            per_class: grid.per_class.unwrap_or(per_class),
            seed,
        },
        other => other,
    };
    let named = spec.load()?;
    let params = p.file.gen_params(p.seed);
    let sweep = harness::sweep_selection(&named.data, &grid.alphas, &grid.deltas, &params)
        .map_err(|e| Usage(e.into()))?;
    write(&common.out, "sweep.csv", &sweep.to_csv())?;
    println!("{:>8} {:>6} {:>9}", "alpha", "delta", "accepted");
    for pt in &sweep.points {
        println!("{:>8} {:>6} {:>9}", pt.alpha, pt.delta, pt.count());
    }
    Ok(())
}

fn gen_parity(bits: usize, out: &Path) -> Result<()> {
    let data = usage(dataset::generate_parity(bits).map_err(Into::into))?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    dataset::write_csv(&data, out)?;
    println!("wrote {} rows to {}", data.n_samples(), out.display());
    Ok(())
}

fn inspect(model_path: &Path, space_path: &Path) -> Result<()> {
    let read = |p: &Path| fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
    let model = Model::from_text(&read(model_path)?)
        .with_context(|| format!("parsing {}", model_path.display()))?;
    let space = FeatureSpace::from_text(&read(space_path)?)
        .with_context(|| format!("parsing {}", space_path.display()))?;
    print!("{}", model_io::inspect(&model, &space)?);
    Ok(())
}
