use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nowcast::data::{
    describe_panel, ingest_indicators, listwise_delete, load_panel, write_sites, PanelDataset,
};
use nowcast::evaluation::{correlation_rate, evaluate_with, render_table, Direction, FoldPair, Validation};
use nowcast::gpr::{fit, BasisExpansion, SearchConfig, DEFAULT_JITTER};
use nowcast::pipeline::{
    load_sites, panel_bytes, panel_from_sites, run_pipeline, to_json_bytes, write_file,
    PipelineConfig, RunReport,
};
use nowcast::synth::{synthesize, SynthConfig};
use nowcast::{Error, Result};

/// Gaussian-process nowcasting of unemployment rates from employment-website traffic.
#[derive(Debug, Parser)]
#[command(name = "nowcast", version)]
struct Cli {
    /// Worker threads for grid search, cross-validation folds, and fetching (0 = all cores).
    #[arg(long, global = true, default_value_t = 0, value_name = "K")]
    threads: usize,

    /// Log each dropped record and other progress to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read a sites file (optionally refreshing signals from a replay fixture) and write it back normalized.
    Ingest(IngestArgs),
    /// Apply listwise deletion to a sites file.
    Clean(CleanArgs),
    /// Standardize and combine site signals and join country unemployment rates into a panel.
    Score(ScoreArgs),
    /// Select hyperparameters and fit a model on a panel.
    Fit(PanelModelArgs),
    /// Cross-validate a model on a panel and report correlation rate, RMSE, and RAE.
    Evaluate(PanelModelArgs),
    /// Run every stage from raw inputs to the final report.
    Pipeline(PipelineArgs),
    /// Generate a synthetic panel with a known score/rate correlation.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Sites table with header `url,country,rank,trend,traffic`.
    #[arg(long, value_name = "PATH")]
    sites: PathBuf,
    /// JSON replay fixture mapping url to {rank, trend, traffic}.
    #[arg(long, value_name = "PATH")]
    fetch_fixture: Option<PathBuf>,
    /// Output directory; receives sites.csv.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CleanArgs {
    #[arg(long, value_name = "PATH")]
    sites: PathBuf,
    /// Output directory; receives clean.csv.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long, value_name = "PATH")]
    sites: PathBuf,
    /// Indicator table with header `country,unemployment_rate`.
    #[arg(long, value_name = "PATH")]
    indicators: PathBuf,
    /// Output directory; receives panel.csv.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    ScoreToRate,
    RateToScore,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::ScoreToRate => Direction::ScoreToRate,
            DirectionArg::RateToScore => Direction::RateToScore,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BasisArg {
    Const,
    Linear,
}

impl From<BasisArg> for BasisExpansion {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Const => BasisExpansion::Constant,
            BasisArg::Linear => BasisExpansion::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ThetaGrid {
    lo: f64,
    hi: f64,
    steps: usize,
}

fn parse_theta_grid(s: &str) -> std::result::Result<ThetaGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        return Err("expected LO:HI:STEPS".into());
    };
    let lo: f64 = lo.parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    let steps: usize = steps.parse().map_err(|_| format!("bad step count {steps:?}"))?;
    if !(lo > 0.0 && lo.is_finite() && hi.is_finite()) {
        return Err("bounds must be positive".into());
    }
    if lo >= hi {
        return Err("lower bound must be below upper bound".into());
    }
    if steps < 2 {
        return Err("need at least 2 steps".into());
    }
    Ok(ThetaGrid { lo, hi, steps })
}

fn parse_jitter(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("bad jitter {s:?}"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("jitter must be a non-negative number".into())
    }
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "score-to-rate")]
    direction: DirectionArg,
    /// Mean-function basis.
    #[arg(long, value_enum, default_value = "const")]
    basis: BasisArg,
    /// Logarithmic correlation-length grid.
    #[arg(long, value_name = "LO:HI:STEPS", default_value = "0.001:1000:31", value_parser = parse_theta_grid)]
    theta_grid: ThetaGrid,
    /// Diagonal nugget as a fraction of the process variance.
    #[arg(long, value_name = "X", default_value_t = DEFAULT_JITTER, value_parser = parse_jitter)]
    jitter: f64,
    /// Score the model on its own training points instead of leave-one-out.
    #[arg(long)]
    in_sample: bool,
    /// Average site scores per country before modelling.
    #[arg(long)]
    country_mean: bool,
}

impl ModelArgs {
    fn search(&self) -> SearchConfig<f64> {
        SearchConfig::new(self.theta_grid.lo, self.theta_grid.hi, self.theta_grid.steps)
            .with_jitter(self.jitter)
    }

    fn validation(&self) -> Validation {
        if self.in_sample {
            Validation::InSample
        } else {
            Validation::LeaveOneOut
        }
    }
}

#[derive(Debug, Args)]
struct PanelModelArgs {
    /// Panel with header `url,country,score,unemployment_rate`.
    #[arg(long, value_name = "PATH")]
    panel: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long, value_name = "PATH")]
    sites: PathBuf,
    #[arg(long, value_name = "PATH")]
    indicators: PathBuf,
    /// JSON replay fixture mapping url to {rank, trend, traffic}.
    #[arg(long, value_name = "PATH")]
    fetch_fixture: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    /// Output directory; receives panel.csv, model.json, report.json, report.txt.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Number of rows (at least 3).
    #[arg(long, value_name = "N")]
    n: usize,
    /// Score/rate correlation of the noiseless signal, in [0, 1].
    #[arg(long, value_name = "C")]
    coupling: f64,
    /// Standard deviation of additive rate noise (percentage points).
    #[arg(long, value_name = "SD", default_value_t = 0.0)]
    noise: f64,
    #[arg(long, value_name = "N", default_value_t = 42)]
    seed: u64,
    /// Output directory; receives panel.csv.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::config(format!("input file {} does not exist", path.display())))
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(name))
}

fn modelled(panel: PanelDataset, args: &ModelArgs) -> PanelDataset {
    if args.country_mean {
        panel.country_means()
    } else {
        panel
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(a) => {
            stage("ingest", require_file(&a.sites))?;
            if let Some(f) = &a.fetch_fixture {
                stage("ingest", require_file(f))?;
            }
            let records = stage("ingest", load_sites(&a.sites, a.fetch_fixture.as_deref(), cli.threads.max(1)))?;
            prepare_out(&a.out)?;
            let mut buf = Vec::new();
            write_sites(&mut buf, &records)?;
            write_file(&a.out.join("sites.csv"), &buf)?;
            println!("ingested {} sites", records.len());
        }
        Command::Clean(a) => {
            stage("clean", require_file(&a.sites))?;
            let records = stage("clean", load_sites(&a.sites, None, 1))?;
            let (kept, dropped) = listwise_delete(&records);
            prepare_out(&a.out)?;
            let mut buf = Vec::new();
            write_sites(&mut buf, &kept)?;
            write_file(&a.out.join("clean.csv"), &buf)?;
            println!("{} sites, {} complete, {dropped} dropped", records.len(), kept.len());
        }
        Command::Score(a) => {
            stage("score", require_file(&a.sites))?;
            stage("score", require_file(&a.indicators))?;
            let sites = stage("score", load_sites(&a.sites, None, 1))?;
            let indicators = stage("score", ingest_indicators(&a.indicators))?;
            let panel = stage("score", panel_from_sites(sites, &indicators))?;
            prepare_out(&a.out)?;
            write_file(&a.out.join("panel.csv"), &panel_bytes(&panel)?)?;
            println!("panel with {} rows", panel.len());
        }
        Command::Fit(a) => {
            stage("fit", require_file(&a.panel))?;
            let panel = modelled(stage("fit", load_panel(&a.panel))?, &a.model);
            let direction = Direction::from(a.model.direction);
            let basis = BasisExpansion::from(a.model.basis);
            let training = stage("fit", direction.training_set(&panel))?;
            let kernel = stage("fit", nowcast::gpr::fit_hyperparameters(&training, basis, &a.model.search()))?;
            let model = stage("fit", fit(training, basis, kernel))?;
            prepare_out(&a.out)?;
            write_file(&a.out.join("model.json"), &to_json_bytes(&model.to_document())?)?;
            println!(
                "fitted on {} rows: theta {:?}, sigma^2 {}",
                panel.len(),
                model.kernel().theta(),
                model.kernel().sigma_sq()
            );
        }
        Command::Evaluate(a) => {
            stage("evaluate", require_file(&a.panel))?;
            let panel = stage("evaluate", load_panel(&a.panel))?;
            let summary = stage("evaluate", describe_panel(&panel))?;
            let panel = modelled(panel, &a.model);
            let evaluation = stage(
                "evaluate",
                evaluate_with(
                    &panel,
                    a.model.direction.into(),
                    a.model.basis.into(),
                    &a.model.search(),
                    a.model.validation(),
                ),
            )?;
            let text = render_table(Some(&summary), &evaluation);
            let report = RunReport { summary: Some(summary), evaluation };
            prepare_out(&a.out)?;
            write_file(&a.out.join("report.json"), &to_json_bytes(&report)?)?;
            write_file(&a.out.join("report.txt"), text.as_bytes())?;
            print!("{text}");
        }
        Command::Pipeline(a) => {
            let cfg = PipelineConfig {
                sites: a.sites,
                indicators: a.indicators,
                fetch_fixture: a.fetch_fixture,
                direction: a.model.direction.into(),
                basis: a.model.basis.into(),
                search: a.model.search(),
                validation: a.model.validation(),
                country_mean: a.model.country_mean,
                fetch_parallelism: cli.threads.max(1),
                out: a.out,
            };
            let outcome = run_pipeline(&cfg)?;
            print!("{}", render_table(Some(&outcome.summary), &outcome.report.evaluation));
        }
        Command::Synth(a) => {
            let cfg = SynthConfig {
                n: a.n,
                coupling: a.coupling,
                noise: a.noise,
                seed: a.seed,
            };
            let panel = stage("synth", synthesize(&cfg))?;
            let pairs: Vec<_> = panel
                .rows
                .iter()
                .map(|r| FoldPair::new(r.score, r.unemployment_rate))
                .collect();
            prepare_out(&a.out)?;
            write_file(&a.out.join("panel.csv"), &panel_bytes(&panel)?)?;
            let sample = correlation_rate(&pairs).map_or_else(|_| "undefined".to_string(), |r| r.to_string());
            println!(
                "wrote {} rows; population correlation {}, sample correlation {sample}",
                panel.len(),
                cfg.population_correlation()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .format_timestamp(None)
        .init();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: cannot configure {} threads: {e}", cli.threads);
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
