//! Site-signal ingestion, cleaning, scoring, and the country join that
//! produces the two-column panel.

mod clean;
mod fetch;
mod ingest;
mod panel;
mod record;
mod score;

pub use clean::listwise_delete;
pub use fetch::{fetch_signals, FetchFailure, ReplayFetcher, SignalFetcher, SiteTarget};
pub use ingest::{
    ingest_indicators, ingest_sites, read_indicators, read_sites, write_sites, INDICATORS_HEADER,
    SITES_HEADER,
};
pub use panel::{
    build_panel, describe_panel, load_panel, read_panel, write_panel, PanelDataset, PanelRow,
    PanelSummary, Provenance, PANEL_HEADER,
};
pub use record::{normalize_url, CountryCode, CountryIndicator, Signal, SiteRecord};
pub use score::{normalize_and_score, normalize_and_score_signals};
