use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ISO-3166 alpha-2 country code, stored uppercase.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CountryCode(String);

impl CountryCode {
    pub fn new(code: &str) -> Result<Self> {
        let code = code.trim().to_ascii_uppercase();
        if code.len() != 2 || !code.bytes().all(|b| b.is_ascii_uppercase()) {
            return Err(Error::domain(format!(
                "country code must be two letters, got {code:?}"
            )));
        }
        Ok(CountryCode(code))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for CountryCode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        CountryCode::new(&s)
    }
}

impl From<CountryCode> for String {
    fn from(c: CountryCode) -> String {
        c.0
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The three per-site signals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signal {
    Rank,
    Trend,
    Traffic,
}

impl Signal {
    pub const ALL: [Signal; 3] = [Signal::Rank, Signal::Trend, Signal::Traffic];

    pub fn name(self) -> &'static str {
        match self {
            Signal::Rank => "rank",
            Signal::Trend => "trend",
            Signal::Traffic => "traffic",
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One employment website and whatever signals were collected for it.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteRecord {
    pub url: String,
    pub country_code: CountryCode,
    /// Site ranking, 1 = most visited.
    pub rank: Option<u64>,
    pub trend: Option<f64>,
    pub traffic: Option<f64>,
}

pub fn normalize_url(url: &str) -> String {
    url.trim().to_lowercase()
}

impl SiteRecord {
    pub fn new(
        url: &str,
        country_code: CountryCode,
        rank: Option<u64>,
        trend: Option<f64>,
        traffic: Option<f64>,
    ) -> Result<Self> {
        let url = normalize_url(url);
        if url.is_empty() {
            return Err(Error::domain("url must not be empty"));
        }
        if rank == Some(0) {
            return Err(Error::domain(format!("{url}: rank must be at least 1")));
        }
        for (name, v) in [("trend", trend), ("traffic", traffic)] {
            if let Some(v) = v {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::domain(format!(
                        "{url}: {name} must be a non-negative number, got {v}"
                    )));
                }
            }
        }
        Ok(SiteRecord {
            url,
            country_code,
            rank,
            trend,
            traffic,
        })
    }

    pub fn signal(&self, signal: Signal) -> Option<f64> {
        match signal {
            Signal::Rank => self.rank.map(|r| r as f64),
            Signal::Trend => self.trend,
            Signal::Traffic => self.traffic,
        }
    }

    pub fn missing_signals(&self) -> Vec<Signal> {
        Signal::ALL
            .into_iter()
            .filter(|&s| self.signal(s).is_none())
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.missing_signals().is_empty()
    }
}

/// Unemployment rate of one country, in percent.
#[derive(Clone, Debug, PartialEq)]
pub struct CountryIndicator {
    pub country_code: CountryCode,
    pub unemployment_rate: f64,
}

impl CountryIndicator {
    pub fn new(country_code: CountryCode, unemployment_rate: f64) -> Result<Self> {
        if !(0.0..=100.0).contains(&unemployment_rate) {
            return Err(Error::domain(format!(
                "{country_code}: unemployment rate {unemployment_rate} outside [0, 100]"
            )));
        }
        Ok(CountryIndicator {
            country_code,
            unemployment_rate,
        })
    }
}
