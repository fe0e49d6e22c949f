//! End-to-end orchestration: ingest → clean → score → join → fit → evaluate → report.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{
    build_panel, describe_panel, fetch_signals, ingest_indicators, ingest_sites, listwise_delete,
    normalize_and_score, write_panel, PanelDataset, PanelSummary, ReplayFetcher, SiteRecord,
    SiteTarget,
};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_with, render_table, Direction, EvaluationReport, Validation};
use crate::gpr::{fit, BasisExpansion, GprModel, SearchConfig};

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub sites: PathBuf,
    pub indicators: PathBuf,
    /// Replay fixture whose signals replace the ones in the sites file.
    pub fetch_fixture: Option<PathBuf>,
    pub direction: Direction,
    pub basis: BasisExpansion,
    pub search: SearchConfig<f64>,
    pub validation: Validation,
    pub country_mean: bool,
    pub fetch_parallelism: usize,
    pub out: PathBuf,
}

/// Contents of `report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub summary: Option<PanelSummary>,
    pub evaluation: EvaluationReport<f64>,
}

pub struct PipelineOutcome {
    pub panel: PanelDataset,
    pub summary: PanelSummary,
    pub model: GprModel<f64>,
    pub report: RunReport,
}

/// Reads the sites file, optionally refreshing its signals from a replay fixture.
pub fn load_sites(
    sites: &Path,
    fetch_fixture: Option<&Path>,
    parallelism: usize,
) -> Result<Vec<SiteRecord>> {
    let records = ingest_sites(sites)?;
    let Some(fixture) = fetch_fixture else {
        return Ok(records);
    };
    let fetcher = ReplayFetcher::from_path(fixture)?;
    let targets: Vec<SiteTarget> = records
        .into_iter()
        .map(|r| SiteTarget {
            url: r.url,
            country_code: r.country_code,
        })
        .collect();
    fetch_signals(&targets, &fetcher, parallelism)
}

/// Clean, score, and join. `sites` is the raw list, in any order.
pub fn panel_from_sites(
    mut sites: Vec<SiteRecord>,
    indicators: &[crate::data::CountryIndicator],
) -> Result<PanelDataset> {
    sites.sort_by(|a, b| a.url.cmp(&b.url));
    let (clean, dropped) = listwise_delete(&sites);
    log::info!("listwise deletion kept {} of {} sites ({dropped} dropped)", clean.len(), sites.len());
    let scored = if clean.is_empty() {
        Vec::new()
    } else {
        normalize_and_score(&clean).map_err(|e| e.in_stage("score"))?
    };
    build_panel(&scored, &sites, indicators).map_err(|e| e.in_stage("join"))
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn panel_bytes(panel: &PanelDataset) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_panel(&mut buf, panel)?;
    Ok(buf)
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    for path in [&cfg.sites, &cfg.indicators].into_iter().chain(cfg.fetch_fixture.as_ref()) {
        if !path.is_file() {
            return Err(Error::config(format!("input file {} does not exist", path.display()))
                .in_stage("ingest"));
        }
    }
    let sites = load_sites(&cfg.sites, cfg.fetch_fixture.as_deref(), cfg.fetch_parallelism)
        .map_err(|e| e.in_stage("ingest"))?;
    let indicators = ingest_indicators(&cfg.indicators).map_err(|e| e.in_stage("ingest"))?;
    let panel = panel_from_sites(sites, &indicators).map_err(|e| e.in_stage("clean"))?;
    let summary = describe_panel(&panel).map_err(|e| e.in_stage("describe"))?;

    let modelled = if cfg.country_mean { panel.country_means() } else { panel.clone() };
    let evaluation = evaluate_with(&modelled, cfg.direction, cfg.basis, &cfg.search, cfg.validation)
        .map_err(|e| match e {
            e @ (Error::Fit(_) | Error::Config(_)) => e.in_stage("fit"),
            e => e.in_stage("evaluate"),
        })?;
    let training = cfg.direction.training_set(&modelled).map_err(|e| e.in_stage("fit"))?;
    let model = fit(training, cfg.basis, evaluation.kernel.clone()).map_err(|e| e.in_stage("fit"))?;

    let report = RunReport {
        summary: Some(summary.clone()),
        evaluation,
    };

    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e).in_stage("report"))?;
    let write = |name: &str, bytes: Vec<u8>| write_file(&cfg.out.join(name), &bytes).map_err(|e| e.in_stage("report"));
    write("panel.csv", panel_bytes(&panel)?)?;
    write("model.json", to_json_bytes(&model.to_document())?)?;
    write("report.json", to_json_bytes(&report)?)?;
    write("report.txt", render_table(Some(&summary), &report.evaluation).into_bytes())?;

    Ok(PipelineOutcome {
        panel,
        summary,
        model,
        report,
    })
}
