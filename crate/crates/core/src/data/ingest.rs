//! Reading and writing the tabular site and indicator files.
//!
//! Blank cells mean "missing"; any other non-numeric token (`NA`, `null`, ...)
//! is a parse error.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::record::{normalize_url, CountryCode, CountryIndicator, SiteRecord};
use crate::error::{Error, Result};

pub const SITES_HEADER: [&str; 5] = ["url", "country", "rank", "trend", "traffic"];
pub const INDICATORS_HEADER: [&str; 2] = ["country", "unemployment_rate"];

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::parse(line, e.to_string())
}

pub(crate) fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = rdr.headers().map_err(csv_error)?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::parse(
            1,
            format!("expected header `{}`, got `{}`", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(())
}

fn optional<T: std::str::FromStr>(cell: &str, line: u64, column: &str) -> Result<Option<T>> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse()
        .map(Some)
        .map_err(|_| Error::parse(line, format!("{column}: cannot parse {cell:?}")))
}

pub(crate) fn finite(cell: &str, line: u64, column: &str) -> Result<Option<f64>> {
    match optional::<f64>(cell, line, column)? {
        Some(v) if !v.is_finite() => Err(Error::parse(line, format!("{column}: non-finite value {cell:?}"))),
        v => Ok(v),
    }
}

/// Parses `url,country,rank,trend,traffic` rows. Urls are lowercased and must be unique.
pub fn read_sites<R: Read>(input: R) -> Result<Vec<SiteRecord>> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &SITES_HEADER)?;
    let mut seen: HashMap<String, u64> = HashMap::new();
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        let url = normalize_url(&row[0]);
        if url.is_empty() {
            return Err(Error::parse(line, "url is empty"));
        }
        let country = CountryCode::new(&row[1]).map_err(|e| Error::parse(line, e.to_string()))?;
        let rank = optional::<u64>(&row[2], line, "rank")?;
        let trend = finite(&row[3], line, "trend")?;
        let traffic = finite(&row[4], line, "traffic")?;
        let record = SiteRecord::new(&url, country, rank, trend, traffic)
            .map_err(|e| Error::parse(line, e.to_string()))?;
        if let Some(first) = seen.insert(url.clone(), line) {
            return Err(Error::integrity(format!(
                "duplicate url {url} on lines {first} and {line}"
            )));
        }
        records.push(record);
    }
    Ok(records)
}

pub fn ingest_sites(path: impl AsRef<Path>) -> Result<Vec<SiteRecord>> {
    read_sites(open(path.as_ref())?)
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_sites<W: Write>(output: W, records: &[SiteRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(output);
    wtr.write_record(SITES_HEADER).map_err(csv_error)?;
    for r in records {
        wtr.write_record([
            r.url.clone(),
            r.country_code.to_string(),
            cell(r.rank),
            cell(r.trend),
            cell(r.traffic),
        ])
        .map_err(csv_error)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv output>", e))
}

/// Parses `country,unemployment_rate` rows, one per country.
pub fn read_indicators<R: Read>(input: R) -> Result<Vec<CountryIndicator>> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &INDICATORS_HEADER)?;
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        let country = CountryCode::new(&row[0]).map_err(|e| Error::parse(line, e.to_string()))?;
        let rate = finite(&row[1], line, "unemployment_rate")?
            .ok_or_else(|| Error::parse(line, "unemployment_rate is missing"))?;
        let indicator =
            CountryIndicator::new(country.clone(), rate).map_err(|e| Error::parse(line, e.to_string()))?;
        if let Some(first) = seen.insert(country.clone(), line) {
            return Err(Error::integrity(format!(
                "duplicate country {country} on lines {first} and {line}"
            )));
        }
        out.push(indicator);
    }
    Ok(out)
}

pub fn ingest_indicators(path: impl AsRef<Path>) -> Result<Vec<CountryIndicator>> {
    read_indicators(open(path.as_ref())?)
}
