//! Synthetic panels with a known score/rate correlation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{CountryCode, PanelDataset, PanelRow, Provenance};
use crate::error::{Error, Result};

const BASE_RATE: f64 = 10.0;
const RATE_SPREAD: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthConfig {
    pub n: usize,
    /// Correlation between score and rate before measurement noise, in [0, 1].
    pub coupling: f64,
    /// Standard deviation of additive rate noise, in percentage points.
    pub noise: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::config(format!("n must be at least 3, got {}", self.n)));
        }
        if !(0.0..=1.0).contains(&self.coupling) {
            return Err(Error::config(format!("coupling must be in [0, 1], got {}", self.coupling)));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::config(format!("noise must be non-negative, got {}", self.noise)));
        }
        Ok(())
    }

    /// Population correlation between the emitted score and rate columns:
    /// `coupling · s / √(s² + noise²)`, which equals `coupling` when noise is 0.
    pub fn population_correlation(&self) -> f64 {
        self.coupling * RATE_SPREAD / (RATE_SPREAD * RATE_SPREAD + self.noise * self.noise).sqrt()
    }
}

fn country_for(i: usize) -> CountryCode {
    let i = i % (26 * 26);
    let code = [b'A' + (i / 26) as u8, b'A' + (i % 26) as u8];
    CountryCode::new(std::str::from_utf8(&code).expect("ascii")).expect("two letters")
}

/// score ~ N(0, 1); rate = 10 + 2·(c·score + √(1−c²)·e) + noise·η with e, η ~ N(0, 1).
pub fn synthesize(cfg: &SynthConfig) -> Result<PanelDataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let independent = (1.0 - cfg.coupling * cfg.coupling).sqrt();
    let rows = (0..cfg.n)
        .map(|i| {
            let score: f64 = StandardNormal.sample(&mut rng);
            let e: f64 = StandardNormal.sample(&mut rng);
            let eta: f64 = StandardNormal.sample(&mut rng);
            let rate = BASE_RATE + RATE_SPREAD * (cfg.coupling * score + independent * e) + cfg.noise * eta;
            PanelRow {
                url: format!("site-{i:05}.example"),
                country_code: country_for(i),
                score,
                unemployment_rate: rate,
                raw_rank: None,
            }
        })
        .collect();
    Ok(PanelDataset {
        rows,
        provenance: Provenance {
            raw_count: cfg.n,
            clean_count: cfg.n,
            dropped_count: 0,
        },
    })
}
