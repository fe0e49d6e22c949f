use super::record::SiteRecord;

/// Drops every record with at least one missing signal.
///
/// Returns the complete records in their original order and the number dropped.
pub fn listwise_delete(records: &[SiteRecord]) -> (Vec<SiteRecord>, usize) {
    let mut kept = Vec::with_capacity(records.len());
    let mut dropped = 0;
    for record in records {
        let missing = record.missing_signals();
        if missing.is_empty() {
            kept.push(record.clone());
        } else {
            dropped += 1;
            let names: Vec<&str> = missing.iter().map(|s| s.name()).collect();
            log::info!("dropping {}: missing {}", record.url, names.join(", "));
        }
    }
    (kept, dropped)
}
