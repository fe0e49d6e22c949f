use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ingest::{check_header, csv_error, finite, open, reader};
use super::record::{CountryCode, CountryIndicator, SiteRecord};
use crate::error::{Error, Result};
use crate::stats::{mean, sample_std};

pub const PANEL_HEADER: [&str; 4] = ["url", "country", "score", "unemployment_rate"];

/// One site's score next to its country's unemployment rate.
#[derive(Clone, Debug, PartialEq)]
pub struct PanelRow {
    pub url: String,
    pub country_code: CountryCode,
    pub score: f64,
    pub unemployment_rate: f64,
    /// Pre-normalization rank, when the panel was built from site records.
    pub raw_rank: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub raw_count: usize,
    pub clean_count: usize,
    pub dropped_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PanelDataset {
    pub rows: Vec<PanelRow>,
    pub provenance: Provenance,
}

impl PanelDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.score).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.unemployment_rate).collect()
    }

    /// Collapses the panel to one row per country carrying the mean site score.
    /// Rows are keyed by the country code.
    pub fn country_means(&self) -> PanelDataset {
        let mut groups: BTreeMap<&CountryCode, (Vec<f64>, f64)> = BTreeMap::new();
        for row in &self.rows {
            groups
                .entry(&row.country_code)
                .or_insert_with(|| (Vec::new(), row.unemployment_rate))
                .0
                .push(row.score);
        }
        let rows = groups
            .into_iter()
            .map(|(code, (scores, rate))| PanelRow {
                url: code.as_str().to_ascii_lowercase(),
                country_code: code.clone(),
                score: mean(&scores).expect("group is non-empty"),
                unemployment_rate: rate,
                raw_rank: None,
            })
            .collect();
        PanelDataset {
            rows,
            provenance: self.provenance,
        }
    }
}

/// Joins scores with country rates. `sites` is the full pre-deletion list, which
/// fixes the provenance counts; rows come out sorted by url.
pub fn build_panel(
    scored: &[(String, f64)],
    sites: &[SiteRecord],
    indicators: &[CountryIndicator],
) -> Result<PanelDataset> {
    let by_url: HashMap<&str, &SiteRecord> = sites.iter().map(|s| (s.url.as_str(), s)).collect();
    let rates: HashMap<&CountryCode, f64> = indicators
        .iter()
        .map(|i| (&i.country_code, i.unemployment_rate))
        .collect();

    let mut seen = HashSet::new();
    let mut missing_countries = BTreeSet::new();
    let mut rows = Vec::with_capacity(scored.len());
    for (url, score) in scored {
        if !seen.insert(url.as_str()) {
            return Err(Error::integrity(format!("url {url} scored twice")));
        }
        let site = by_url
            .get(url.as_str())
            .ok_or_else(|| Error::integrity(format!("scored url {url} is not among the sites")))?;
        match rates.get(&site.country_code) {
            Some(&rate) => rows.push(PanelRow {
                url: url.clone(),
                country_code: site.country_code.clone(),
                score: *score,
                unemployment_rate: rate,
                raw_rank: site.rank,
            }),
            None => {
                missing_countries.insert(site.country_code.to_string());
            }
        }
    }
    if !missing_countries.is_empty() {
        return Err(Error::Join {
            countries: missing_countries.into_iter().collect(),
        });
    }
    rows.sort_by(|a, b| a.url.cmp(&b.url));
    let clean_count = rows.len();
    Ok(PanelDataset {
        rows,
        provenance: Provenance {
            raw_count: sites.len(),
            clean_count,
            dropped_count: sites.len() - clean_count,
        },
    })
}

pub fn write_panel<W: Write>(output: W, panel: &PanelDataset) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(output);
    wtr.write_record(PANEL_HEADER).map_err(csv_error)?;
    for r in &panel.rows {
        wtr.write_record([
            r.url.clone(),
            r.country_code.to_string(),
            r.score.to_string(),
            r.unemployment_rate.to_string(),
        ])
        .map_err(csv_error)?;
    }
    wtr.flush().map_err(|e| Error::io("<panel output>", e))
}

/// Reads `panel.csv`. Provenance is reconstructed as "nothing dropped".
pub fn read_panel<R: Read>(input: R) -> Result<PanelDataset> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &PANEL_HEADER)?;
    let mut rows = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        let required = |i: usize, name: &str| {
            finite(&row[i], line, name)?.ok_or_else(|| Error::parse(line, format!("{name} is missing")))
        };
        let url = row[0].to_string();
        if url.is_empty() {
            return Err(Error::parse(line, "url is empty"));
        }
        rows.push(PanelRow {
            url,
            country_code: CountryCode::new(&row[1]).map_err(|e| Error::parse(line, e.to_string()))?,
            score: required(2, "score")?,
            unemployment_rate: required(3, "unemployment_rate")?,
            raw_rank: None,
        });
    }
    let n = rows.len();
    Ok(PanelDataset {
        rows,
        provenance: Provenance {
            raw_count: n,
            clean_count: n,
            dropped_count: 0,
        },
    })
}

pub fn load_panel(path: impl AsRef<Path>) -> Result<PanelDataset> {
    read_panel(open(path.as_ref())?)
}

/// Descriptive statistics of a panel, laid out like the dataset properties table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PanelSummary {
    pub sites_raw: usize,
    pub sites_clean: usize,
    /// Site-weighted mean of the rate column.
    pub rate_mean: f64,
    /// Unweighted mean over the distinct countries in the panel.
    pub country_rate_mean: f64,
    pub rate_std: Option<f64>,
    pub rank_mean: Option<f64>,
    pub rank_std: Option<f64>,
}

pub fn describe_panel(panel: &PanelDataset) -> Result<PanelSummary> {
    if panel.is_empty() {
        return Err(Error::domain("cannot describe an empty panel"));
    }
    let rates = panel.rates();
    let per_country: BTreeMap<&CountryCode, f64> = panel
        .rows
        .iter()
        .map(|r| (&r.country_code, r.unemployment_rate))
        .collect();
    let country_rates: Vec<f64> = per_country.into_values().collect();
    let ranks: Option<Vec<f64>> = panel.rows.iter().map(|r| r.raw_rank.map(|v| v as f64)).collect();
    Ok(PanelSummary {
        sites_raw: panel.provenance.raw_count,
        sites_clean: panel.provenance.clean_count,
        rate_mean: mean(&rates).expect("non-empty"),
        country_rate_mean: mean(&country_rates).expect("non-empty"),
        rate_std: sample_std(&rates),
        rank_mean: ranks.as_deref().and_then(mean),
        rank_std: ranks.as_deref().and_then(sample_std),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| v.to_string())
}

impl PanelSummary {
    pub fn table_rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("Number of Web Sites", self.sites_raw.to_string()),
            ("Number of Web Sites after Imputation", self.sites_clean.to_string()),
            ("Average Unemployment rate among the web sites", self.rate_mean.to_string()),
            ("Average Unemployment rate among the countries", self.country_rate_mean.to_string()),
            ("Standard Deviation of unemployment rate", opt(self.rate_std)),
            ("Average ranking of the web page", opt(self.rank_mean)),
            ("Standard Deviation of web page ranking", opt(self.rank_std)),
        ]
    }
}

impl fmt::Display for PanelSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, value) in self.table_rows() {
            writeln!(f, "{label:<48}{value}")?;
        }
        Ok(())
    }
}
