//! Traffic time series: per-bin email and distinct-sender counts, and
//! per-weekday totals.

use std::collections::HashSet;

use chrono::{DateTime, Datelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::EmailRecord;

/// Fixed-width event counts over a half-open time window `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub start_epoch: i64,
    pub bin_width_seconds: i64,
    pub counts: Vec<u64>,
}

impl TimeSeries {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Serialize as CSV `bin_start_epoch,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_start_epoch,count\n");
        for (i, count) in self.counts.iter().enumerate() {
            let start = self.start_epoch + i as i64 * self.bin_width_seconds;
            out.push_str(&format!("{start},{count}\n"));
        }
        out
    }
}

fn bins_for(window: (i64, i64), bin_width: i64) -> Result<usize> {
    if bin_width <= 0 {
        return Err(Error::InvalidArgument("bin width must be positive".into()));
    }
    let (start, end) = window;
    if start > end {
        return Err(Error::InvalidArgument("window start after end".into()));
    }
    Ok(((end - start + bin_width - 1) / bin_width) as usize)
}

/// Emails per bin: each in-window record counts once, whatever its
/// recipient count. The window is half-open, so the sum of the counts is
/// exactly the number of in-window records.
pub fn emails_per_bin(
    records: &[EmailRecord],
    window: (i64, i64),
    bin_width: i64,
) -> Result<TimeSeries> {
    let bins = bins_for(window, bin_width)?;
    let mut counts = vec![0u64; bins];
    for record in records {
        if record.timestamp >= window.0 && record.timestamp < window.1 {
            counts[((record.timestamp - window.0) / bin_width) as usize] += 1;
        }
    }
    Ok(TimeSeries {
        start_epoch: window.0,
        bin_width_seconds: bin_width,
        counts,
    })
}

/// Distinct sender addresses per bin. A sender active in several bins is
/// counted once in each.
pub fn senders_per_bin(
    records: &[EmailRecord],
    window: (i64, i64),
    bin_width: i64,
) -> Result<TimeSeries> {
    let bins = bins_for(window, bin_width)?;
    let mut sets: Vec<HashSet<&crate::ingest::Address>> = vec![HashSet::new(); bins];
    for record in records {
        if record.timestamp >= window.0 && record.timestamp < window.1 {
            let bin = ((record.timestamp - window.0) / bin_width) as usize;
            sets[bin].insert(&record.sender);
        }
    }
    Ok(TimeSeries {
        start_epoch: window.0,
        bin_width_seconds: bin_width,
        counts: sets.iter().map(|s| s.len() as u64).collect(),
    })
}

/// Totals per local weekday plus the Friday-to-core-week ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeekdayProfile {
    /// Message totals Monday..Sunday.
    pub totals: [u64; 7],
    /// Friday total over the Monday-Thursday mean; absent when there is no
    /// Monday-Thursday traffic.
    pub friday_ratio: Option<f64>,
}

/// Per-weekday record totals in local time (`timezone_offset_seconds`
/// east of UTC).
pub fn weekday_profile(records: &[EmailRecord], timezone_offset_seconds: i32) -> WeekdayProfile {
    let mut totals = [0u64; 7];
    for record in records {
        let local = record.timestamp + timezone_offset_seconds as i64;
        if let Some(dt) = DateTime::from_timestamp(local, 0) {
            totals[dt.weekday().num_days_from_monday() as usize] += 1;
        }
    }
    let core: u64 = totals[0..4].iter().sum();
    let friday_ratio = if core > 0 {
        Some(totals[4] as f64 / (core as f64 / 4.0))
    } else {
        None
    };
    WeekdayProfile {
        totals,
        friday_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Address;

    fn record_at(timestamp: i64, sender: &str) -> EmailRecord {
        EmailRecord {
            timestamp,
            sender: Address::parse(sender).unwrap(),
            recipients: vec![Address::parse("r@x.gov").unwrap()],
        }
    }

    #[test]
    fn emails_count_per_bin() {
        let records: Vec<_> = (0..3).map(|_| record_at(5 * 60 + 10, "a@x.gov")).collect();
        let series = emails_per_bin(&records, (0, 600), 60).unwrap();
        assert_eq!(series.counts.len(), 10);
        assert_eq!(series.counts[5], 3);
        assert_eq!(series.total(), 3);
    }

    #[test]
    fn window_end_is_exclusive() {
        let records = vec![record_at(600, "a@x.gov"), record_at(599, "b@x.gov")];
        let series = emails_per_bin(&records, (0, 600), 60).unwrap();
        assert_eq!(series.total(), 1);
    }

    #[test]
    fn bin_sum_conservation() {
        let records: Vec<_> = (0..1000).map(|i| record_at(i % 600, "a@x.gov")).collect();
        let series = emails_per_bin(&records, (0, 600), 60).unwrap();
        assert_eq!(series.total(), 1000);
    }

    #[test]
    fn rejects_bad_bin_width() {
        assert!(emails_per_bin(&[], (0, 600), 0).is_err());
        assert!(emails_per_bin(&[], (600, 0), 60).is_err());
    }

    #[test]
    fn distinct_senders_per_bin() {
        let records = vec![
            record_at(10, "a@x.gov"),
            record_at(20, "a@x.gov"),
            record_at(30, "b@x.gov"),
        ];
        let series = senders_per_bin(&records, (0, 120), 60).unwrap();
        assert_eq!(series.counts[0], 2);
    }

    #[test]
    fn sender_counted_once_per_bin() {
        let records = vec![record_at(10, "a@x.gov"), record_at(70, "a@x.gov")];
        let series = senders_per_bin(&records, (0, 120), 60).unwrap();
        assert_eq!(series.counts, vec![1, 1]);
    }

    #[test]
    fn empty_window_is_zero() {
        let series = senders_per_bin(&[], (0, 300), 60).unwrap();
        assert!(series.counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn senders_never_exceed_emails() {
        let records: Vec<_> = (0..200)
            .map(|i| record_at(i * 3, if i % 2 == 0 { "a@x.gov" } else { "b@x.gov" }))
            .collect();
        let emails = emails_per_bin(&records, (0, 600), 60).unwrap();
        let senders = senders_per_bin(&records, (0, 600), 60).unwrap();
        for (s, e) in senders.counts.iter().zip(&emails.counts) {
            assert!(s <= e);
        }
    }

    #[test]
    fn rebinning_sums_groups() {
        let records: Vec<_> = (0..500)
            .map(|i| record_at(i * 7 % 600, "a@x.gov"))
            .collect();
        let fine = emails_per_bin(&records, (0, 600), 60).unwrap();
        let coarse = emails_per_bin(&records, (0, 600), 120).unwrap();
        let regrouped: Vec<u64> = fine.counts.chunks(2).map(|c| c.iter().sum()).collect();
        assert_eq!(coarse.counts, regrouped);
    }

    // Midnight of 2021-12-20, a Monday.
    const MONDAY: i64 = 1_640_000_000 - (1_640_000_000 % 86_400);

    #[test]
    fn uniform_week_has_unit_friday_ratio() {
        let mut records = Vec::new();
        for day in 0..7 {
            for k in 0..10 {
                records.push(record_at(MONDAY + day * 86_400 + k * 60, "a@x.gov"));
            }
        }
        let profile = weekday_profile(&records, 0);
        assert_eq!(profile.totals, [10; 7]);
        assert!((profile.friday_ratio.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn halved_friday_ratio() {
        let mut records = Vec::new();
        for day in 0..5 {
            let volume = if day == 4 { 5 } else { 10 };
            for k in 0..volume {
                records.push(record_at(MONDAY + day * 86_400 + k * 60, "a@x.gov"));
            }
        }
        let profile = weekday_profile(&records, 0);
        assert!((profile.friday_ratio.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weekend_only_has_no_ratio() {
        let records = vec![record_at(MONDAY + 5 * 86_400 + 30, "a@x.gov")];
        let profile = weekday_profile(&records, 0);
        assert_eq!(profile.friday_ratio, None);
        assert_eq!(profile.totals[5], 1);
    }

    #[test]
    fn timezone_offset_shifts_weekday() {
        // One second before local midnight Tuesday with a +1h offset.
        let records = vec![record_at(MONDAY + 86_400 - 3601, "a@x.gov")];
        let utc = weekday_profile(&records, 0);
        assert_eq!(utc.totals[0], 1);
        let shifted = weekday_profile(&records, 3600 + 1);
        assert_eq!(shifted.totals[1], 1);
    }
}
