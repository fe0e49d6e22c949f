use super::record::{Signal, SiteRecord};
use crate::error::{Error, Result};
use crate::stats::{mean, sample_std};

/// Standardizes each signal to mean 0 / sample sd 1 and averages them into one
/// score per site. Rank is negated first so that higher is better for every signal.
///
/// Output follows input order. Column statistics are accumulated in url order,
/// so the result does not depend on how the input was ordered.
pub fn normalize_and_score(records: &[SiteRecord]) -> Result<Vec<(String, f64)>> {
    normalize_and_score_signals(records, &Signal::ALL)
}

/// [`normalize_and_score`] restricted to a subset of signals.
pub fn normalize_and_score_signals(
    records: &[SiteRecord],
    signals: &[Signal],
) -> Result<Vec<(String, f64)>> {
    if signals.is_empty() {
        return Err(Error::config("no signals selected for scoring"));
    }
    if records.len() < 2 {
        return Err(Error::domain(format!(
            "scoring needs at least 2 complete records, got {}",
            records.len()
        )));
    }
    let mut by_url: Vec<usize> = (0..records.len()).collect();
    by_url.sort_by(|&a, &b| records[a].url.cmp(&records[b].url));

    let mut totals = vec![0.0; records.len()];
    for &signal in signals {
        let column: Vec<f64> = records
            .iter()
            .map(|r| {
                let v = r.signal(signal).ok_or_else(|| {
                    Error::integrity(format!("{} has no {signal}; run listwise deletion first", r.url))
                })?;
                Ok(if signal == Signal::Rank { -v } else { v })
            })
            .collect::<Result<_>>()?;
        let ordered: Vec<f64> = by_url.iter().map(|&i| column[i]).collect();
        let m = mean(&ordered).expect("non-empty column");
        let sd = sample_std(&ordered).expect("at least two values");
        if !(sd > 0.0) {
            return Err(Error::Normalization {
                column: signal.name().to_string(),
            });
        }
        for (total, v) in totals.iter_mut().zip(&column) {
            *total += (v - m) / sd;
        }
    }
    let k = signals.len() as f64;
    Ok(records
        .iter()
        .zip(totals)
        .map(|(r, total)| (r.url.clone(), total / k))
        .collect())
}
