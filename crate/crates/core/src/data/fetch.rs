//! Pluggable collection of site signals from third-party sources.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use super::record::{normalize_url, CountryCode, Signal, SiteRecord};
use crate::error::{Error, Result};

/// A single failed lookup. Never aborts a batch; the field is left missing.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct FetchFailure(pub String);

/// Source of per-site signals.
pub trait SignalFetcher: Sync {
    /// Validates endpoints/credentials. Called once before any lookup.
    fn check_config(&self) -> Result<()>;

    /// `Ok(None)` means the source has no value for this site.
    fn fetch(&self, url: &str, signal: Signal) -> Result<Option<f64>, FetchFailure>;
}

/// Site to look up, with the country it belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteTarget {
    pub url: String,
    pub country_code: CountryCode,
}

fn fetch_one<F: SignalFetcher + ?Sized>(target: &SiteTarget, fetcher: &F) -> Result<SiteRecord> {
    let url = normalize_url(&target.url);
    let get = |signal: Signal| match fetcher.fetch(&url, signal) {
        Ok(v) => v,
        Err(e) => {
            log::warn!("{url}: {signal} lookup failed: {e}");
            None
        }
    };
    let rank = get(Signal::Rank).and_then(|v| {
        if v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
            Some(v as u64)
        } else {
            log::warn!("{url}: discarding non-integer rank {v}");
            None
        }
    });
    let nonneg = |v: Option<f64>, signal: Signal| {
        v.filter(|x| {
            let ok = x.is_finite() && *x >= 0.0;
            if !ok {
                log::warn!("{url}: discarding invalid {signal} {x}");
            }
            ok
        })
    };
    let trend = nonneg(get(Signal::Trend), Signal::Trend);
    let traffic = nonneg(get(Signal::Traffic), Signal::Traffic);
    SiteRecord::new(&url, target.country_code.clone(), rank, trend, traffic)
}

/// Looks up all three signals for every target with at most `parallelism`
/// concurrent lookups. Output is sorted by url.
pub fn fetch_signals<F: SignalFetcher + ?Sized>(
    targets: &[SiteTarget],
    fetcher: &F,
    parallelism: usize,
) -> Result<Vec<SiteRecord>> {
    fetcher.check_config()?;
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start fetch workers: {e}")))?;
    let mut records = pool.install(|| {
        targets
            .par_iter()
            .map(|t| fetch_one(t, fetcher))
            .collect::<Result<Vec<_>>>()
    })?;
    records.sort_by(|a, b| a.url.cmp(&b.url));
    if let Some(w) = records.windows(2).find(|w| w[0].url == w[1].url) {
        return Err(Error::integrity(format!("duplicate url {}", w[0].url)));
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordedSignals {
    rank: Option<f64>,
    trend: Option<f64>,
    traffic: Option<f64>,
}

/// Replays signals recorded in a JSON fixture of the form
/// `{"url": {"rank": 12, "trend": 40.5, "traffic": null}, ...}`.
#[derive(Debug, Clone, Default)]
pub struct ReplayFetcher {
    recorded: BTreeMap<String, RecordedSignals>,
}

impl ReplayFetcher {
    pub fn from_json(json: &str) -> Result<Self> {
        let raw: BTreeMap<String, RecordedSignals> =
            serde_json::from_str(json).map_err(|e| Error::config(format!("replay fixture: {e}")))?;
        let recorded = raw.into_iter().map(|(k, v)| (normalize_url(&k), v)).collect();
        Ok(ReplayFetcher { recorded })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json)
    }

    pub fn len(&self) -> usize {
        self.recorded.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recorded.is_empty()
    }
}

impl SignalFetcher for ReplayFetcher {
    fn check_config(&self) -> Result<()> {
        Ok(())
    }

    fn fetch(&self, url: &str, signal: Signal) -> Result<Option<f64>, FetchFailure> {
        let entry = self
            .recorded
            .get(url)
            .ok_or_else(|| FetchFailure(format!("no recording for {url}")))?;
        Ok(match signal {
            Signal::Rank => entry.rank,
            Signal::Trend => entry.trend,
            Signal::Traffic => entry.traffic,
        })
    }
}
