//! Email log ingestion: parsing, address normalization, and cleaning.
//!
//! Two line-delimited formats are supported: a CSV schema with header
//! `timestamp,sender,recipients` (recipients `;`-separated inside one
//! quoted field) and a JSON-lines schema with keys `ts`, `from`, `to`.
//! Timestamps may be integer epoch seconds or RFC 3339.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A normalized email address, split into local part and domain.
///
/// Addresses, not people, are the unit of identity: two addresses of the
/// same person stay distinct, and plus-tag suffixes are kept.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Address {
    local: String,
    domain: String,
}

impl Address {
    /// Normalize a raw address: strip display names and angle brackets,
    /// trim whitespace, and fold to lowercase.
    pub fn parse(raw: &str) -> Result<Self> {
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            return Err(Error::AddressParse {
                raw: raw.to_string(),
                reason: "empty",
            });
        }
        // "Alice A. <alice@lab.gov>" -> "alice@lab.gov"
        let inner = match (trimmed.rfind('<'), trimmed.rfind('>')) {
            (Some(open), Some(close)) if open < close => &trimmed[open + 1..close],
            _ => trimmed,
        };
        let inner = inner.trim();
        let at = inner.rfind('@').ok_or(Error::AddressParse {
            raw: raw.to_string(),
            reason: "missing '@'",
        })?;
        let local = inner[..at].trim().to_lowercase();
        let domain = inner[at + 1..].trim().to_lowercase();
        if local.is_empty() {
            return Err(Error::AddressParse {
                raw: raw.to_string(),
                reason: "empty local part",
            });
        }
        if domain.is_empty() {
            return Err(Error::AddressParse {
                raw: raw.to_string(),
                reason: "empty domain",
            });
        }
        if local.chars().any(char::is_whitespace) || domain.chars().any(char::is_whitespace) {
            return Err(Error::AddressParse {
                raw: raw.to_string(),
                reason: "embedded whitespace",
            });
        }
        Ok(Address { local, domain })
    }

    pub fn local(&self) -> &str {
        &self.local
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    /// A bare domain has no dot (e.g. an unqualified host name).
    pub fn has_bare_domain(&self) -> bool {
        !self.domain.contains('.')
    }

    /// Domain-suffix match on label boundaries: `lab.gov` matches both
    /// `lab.gov` and `sub.lab.gov`, but not `slab.gov`.
    pub fn in_domain(&self, suffix: &str) -> bool {
        if suffix.is_empty() {
            return true;
        }
        let suffix = suffix.to_lowercase();
        self.domain == suffix || self.domain.ends_with(&format!(".{suffix}"))
    }

    /// Top-level domain: the last dot-separated label.
    pub fn tld(&self) -> &str {
        self.domain.rsplit('.').next().unwrap_or(&self.domain)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.local, self.domain)
    }
}

impl FromStr for Address {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Address::parse(s)
    }
}

impl TryFrom<String> for Address {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Address::parse(&value)
    }
}

impl From<Address> for String {
    fn from(a: Address) -> String {
        a.to_string()
    }
}

/// One logged message: when it was sent, by whom, to whom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmailRecord {
    /// Seconds since the Unix epoch.
    pub timestamp: i64,
    pub sender: Address,
    /// Distinct recipients, in original order. Never empty.
    pub recipients: Vec<Address>,
}

/// Cleaning rules for automatically generated traffic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleaningPolicy {
    /// Sender local parts treated as bounce/automation sources and dropped.
    pub bounce_local_parts: BTreeSet<String>,
    /// Domain suffix defining "internal" addresses, when restriction to the
    /// organization's own domain is requested.
    pub internal_domain_suffix: Option<String>,
    /// Retain internal addresses that do not map to a person in the
    /// directory (shared services, software support, role accounts).
    pub keep_non_person_domains: bool,
}

impl Default for CleaningPolicy {
    fn default() -> Self {
        CleaningPolicy {
            bounce_local_parts: [
                "mailer-daemon",
                "postmaster",
                "bounce",
                "no-reply",
                "noreply",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            internal_domain_suffix: None,
            keep_non_person_domains: true,
        }
    }
}

/// Input log encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogFormat {
    #[default]
    Csv,
    JsonLines,
}

impl LogFormat {
    pub fn parse(name: &str) -> Result<LogFormat> {
        match name.to_lowercase().as_str() {
            "csv" => Ok(LogFormat::Csv),
            "jsonl" | "jsonlines" | "json-lines" => Ok(LogFormat::JsonLines),
            other => Err(Error::InvalidArgument(format!(
                "unknown log format {other:?} (csv, jsonl)"
            ))),
        }
    }
}

/// A line that failed to parse, kept for reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalformedLine {
    pub line: u64,
    pub content: String,
}

/// Result of parsing a log stream: the good records plus a malformed tally.
#[derive(Debug, Clone, Default)]
pub struct ParsedLog {
    pub records: Vec<EmailRecord>,
    pub malformed: usize,
    pub first_malformed: Option<MalformedLine>,
}

/// Parse a line-delimited email log.
///
/// Malformed lines are counted, not fatal; if more than half of the data
/// lines are malformed the whole stream is rejected as a format mismatch.
pub fn parse_email_log(reader: impl Read, format: LogFormat) -> Result<ParsedLog> {
    let mut out = match format {
        LogFormat::Csv => parse_csv(reader)?,
        LogFormat::JsonLines => parse_json_lines(reader)?,
    };
    let total = out.records.len() + out.malformed;
    if out.malformed * 2 > total {
        let first = out.first_malformed.take().expect("malformed > 0");
        return Err(Error::FormatMismatch {
            line: first.line,
            content: first.content,
            malformed: out.malformed,
            total,
        });
    }
    Ok(out)
}

fn parse_timestamp(field: &str) -> Option<i64> {
    let field = field.trim();
    if let Ok(epoch) = field.parse::<i64>() {
        return (epoch >= 0).then_some(epoch);
    }
    chrono::DateTime::parse_from_rfc3339(field)
        .ok()
        .map(|dt| dt.timestamp())
}

fn parse_recipients(field: &str) -> Result<Vec<Address>> {
    let mut seen = BTreeSet::new();
    let mut recipients = Vec::new();
    for part in field.split(';') {
        if part.trim().is_empty() {
            continue;
        }
        let addr = Address::parse(part)?;
        // One message, one directed contact: duplicates count once.
        if seen.insert(addr.clone()) {
            recipients.push(addr);
        }
    }
    if recipients.is_empty() {
        return Err(Error::InvalidArgument("no recipients".into()));
    }
    Ok(recipients)
}

fn parse_csv(reader: impl Read) -> Result<ParsedLog> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    {
        let headers = csv_reader.headers()?;
        let got: Vec<String> = headers.iter().map(|h| h.trim().to_lowercase()).collect();
        if !headers.is_empty() && got != ["timestamp", "sender", "recipients"] {
            return Err(Error::FormatMismatch {
                line: 1,
                content: headers.iter().collect::<Vec<_>>().join(","),
                malformed: 1,
                total: 1,
            });
        }
    }
    let mut out = ParsedLog::default();
    let mut row = csv::StringRecord::new();
    loop {
        let line = csv_reader.position().line();
        match csv_reader.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {
                let parsed = (|| -> Option<EmailRecord> {
                    let timestamp = parse_timestamp(row.get(0)?)?;
                    let sender = Address::parse(row.get(1)?).ok()?;
                    let recipients = parse_recipients(row.get(2)?).ok()?;
                    Some(EmailRecord {
                        timestamp,
                        sender,
                        recipients,
                    })
                })();
                match parsed {
                    Some(record) => out.records.push(record),
                    None => {
                        note_malformed(&mut out, line, &row.iter().collect::<Vec<_>>().join(","))
                    }
                }
            }
            Err(err) => {
                if err.is_io_error() {
                    return Err(err.into());
                }
                note_malformed(&mut out, line, &err.to_string());
            }
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
struct JsonLine {
    ts: serde_json::Value,
    from: String,
    to: Vec<String>,
}

fn parse_json_lines(reader: impl Read) -> Result<ParsedLog> {
    let mut out = ParsedLog::default();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = (|| -> Option<EmailRecord> {
            let obj: JsonLine = serde_json::from_str(&line).ok()?;
            let timestamp = match &obj.ts {
                serde_json::Value::Number(n) => {
                    let epoch = n.as_i64()?;
                    (epoch >= 0).then_some(epoch)?
                }
                serde_json::Value::String(s) => parse_timestamp(s)?,
                _ => return None,
            };
            let sender = Address::parse(&obj.from).ok()?;
            let recipients = parse_recipients(&obj.to.join(";")).ok()?;
            Some(EmailRecord {
                timestamp,
                sender,
                recipients,
            })
        })();
        match parsed {
            Some(record) => out.records.push(record),
            None => note_malformed(&mut out, line_no, &line),
        }
    }
    Ok(out)
}

fn note_malformed(out: &mut ParsedLog, line: u64, content: &str) {
    out.malformed += 1;
    if out.first_malformed.is_none() {
        out.first_malformed = Some(MalformedLine {
            line,
            content: content.to_string(),
        });
    }
}

/// Serialize records back to the canonical CSV schema.
pub fn write_email_log_csv(records: &[EmailRecord], writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["timestamp", "sender", "recipients"])?;
    for record in records {
        let recipients = record
            .recipients
            .iter()
            .map(Address::to_string)
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            record.timestamp.to_string(),
            record.sender.to_string(),
            recipients,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Serialize records as JSON lines (`ts`, `from`, `to`).
pub fn write_email_log_jsonl(records: &[EmailRecord], mut writer: impl Write) -> Result<()> {
    for record in records {
        let to: Vec<String> = record.recipients.iter().map(Address::to_string).collect();
        let line = serde_json::json!({
            "ts": record.timestamp,
            "from": record.sender.to_string(),
            "to": to,
        });
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

/// Drop records sent by bounce/automation addresses.
///
/// Idempotent and order-preserving. Non-person senders (role accounts,
/// support services) are retained.
pub fn clean_records(records: Vec<EmailRecord>, policy: &CleaningPolicy) -> Vec<EmailRecord> {
    records
        .into_iter()
        .filter(|r| !policy.bounce_local_parts.contains(r.sender.local()))
        .collect()
}

/// Keep only traffic internal to `suffix`: external senders are dropped,
/// external recipients filtered out, and records left without recipients
/// removed. Idempotent and order-preserving.
pub fn restrict_to_domain(records: Vec<EmailRecord>, suffix: &str) -> Vec<EmailRecord> {
    records
        .into_iter()
        .filter_map(|mut record| {
            if !record.sender.in_domain(suffix) {
                return None;
            }
            record.recipients.retain(|a| a.in_domain(suffix));
            if record.recipients.is_empty() {
                None
            } else {
                Some(record)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn addr(s: &str) -> Address {
        Address::parse(s).unwrap()
    }

    #[test]
    fn normalize_display_name() {
        let a = addr("Alice A. <Alice@Lab.GOV>");
        assert_eq!(a.local(), "alice");
        assert_eq!(a.domain(), "lab.gov");
        assert_eq!(a.to_string(), "alice@lab.gov");
    }

    #[test]
    fn normalize_already_normal() {
        assert_eq!(addr("bob@lab.gov").to_string(), "bob@lab.gov");
    }

    #[test]
    fn normalize_rejects_empty_local() {
        assert!(matches!(
            Address::parse("@lab.gov"),
            Err(Error::AddressParse { .. })
        ));
    }

    #[test]
    fn normalize_rejects_missing_at() {
        assert!(matches!(
            Address::parse("nobody"),
            Err(Error::AddressParse { .. })
        ));
    }

    #[test]
    fn plus_tags_stay_distinct() {
        assert_ne!(addr("alice+tag@lab.gov"), addr("alice@lab.gov"));
    }

    #[test]
    fn bare_domain_is_flagged() {
        assert!(addr("a@localhost").has_bare_domain());
        assert!(!addr("a@lab.gov").has_bare_domain());
    }

    #[test]
    fn domain_suffix_respects_label_boundaries() {
        assert!(addr("a@lab.gov").in_domain("lab.gov"));
        assert!(addr("a@sub.lab.gov").in_domain("lab.gov"));
        assert!(!addr("a@slab.gov").in_domain("lab.gov"));
    }

    #[test]
    fn parse_csv_basic() {
        let data =
            "timestamp,sender,recipients\n1640000000,alice@lab.gov,\"bob@lab.gov;carol@lab.gov\"\n";
        let parsed = parse_email_log(data.as_bytes(), LogFormat::Csv).unwrap();
        assert_eq!(parsed.records.len(), 1);
        assert_eq!(parsed.malformed, 0);
        let record = &parsed.records[0];
        assert_eq!(record.timestamp, 1_640_000_000);
        assert_eq!(record.sender, addr("alice@lab.gov"));
        assert_eq!(record.recipients.len(), 2);
    }

    #[test]
    fn parse_empty_stream() {
        let parsed = parse_email_log(&b""[..], LogFormat::Csv).unwrap();
        assert!(parsed.records.is_empty());
        assert_eq!(parsed.malformed, 0);
    }

    #[test]
    fn parse_counts_malformed_lines() {
        let mut data = String::from("timestamp,sender,recipients\n");
        for i in 0..7 {
            data.push_str(&format!("164000000{i},a{i}@lab.gov,b@lab.gov\n"));
        }
        for _ in 0..3 {
            data.push_str("1640000000,x@lab.gov,\n");
        }
        let parsed = parse_email_log(data.as_bytes(), LogFormat::Csv).unwrap();
        assert_eq!(parsed.records.len(), 7);
        assert_eq!(parsed.malformed, 3);
        assert_eq!(parsed.first_malformed.as_ref().unwrap().line, 9);
    }

    #[test]
    fn parse_rejects_majority_malformed() {
        let data = "timestamp,sender,recipients\nnope,,\nnope,,\n1640000000,a@lab.gov,b@lab.gov\n";
        let err = parse_email_log(data.as_bytes(), LogFormat::Csv).unwrap_err();
        match err {
            Error::FormatMismatch {
                line, malformed, ..
            } => {
                assert_eq!(line, 2);
                assert_eq!(malformed, 2);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn parse_rfc3339_timestamp() {
        let data = "timestamp,sender,recipients\n2021-12-20T12:53:20+00:00,a@lab.gov,b@lab.gov\n";
        let parsed = parse_email_log(data.as_bytes(), LogFormat::Csv).unwrap();
        assert_eq!(parsed.records[0].timestamp, 1_640_004_800);
    }

    #[test]
    fn parse_json_lines_format() {
        let data = r#"{"ts": 1640000000, "from": "a@lab.gov", "to": ["b@lab.gov", "c@lab.gov"]}
{"ts": "2021-12-20T12:53:20Z", "from": "b@lab.gov", "to": ["a@lab.gov"]}
"#;
        let parsed = parse_email_log(data.as_bytes(), LogFormat::JsonLines).unwrap();
        assert_eq!(parsed.records.len(), 2);
        assert_eq!(parsed.records[1].timestamp, 1_640_004_800);
    }

    #[test]
    fn duplicate_recipient_counts_once() {
        let data = "timestamp,sender,recipients\n1,a@lab.gov,\"b@lab.gov;b@lab.gov\"\n";
        let parsed = parse_email_log(data.as_bytes(), LogFormat::Csv).unwrap();
        assert_eq!(parsed.records[0].recipients.len(), 1);
    }

    #[test]
    fn clean_drops_bounce_senders() {
        let records = vec![
            EmailRecord {
                timestamp: 1,
                sender: addr("mailer-daemon@lab.gov"),
                recipients: vec![addr("a@lab.gov")],
            },
            EmailRecord {
                timestamp: 2,
                sender: addr("support-service@lab.gov"),
                recipients: vec![addr("a@lab.gov")],
            },
        ];
        let cleaned = clean_records(records, &CleaningPolicy::default());
        assert_eq!(cleaned.len(), 1);
        assert_eq!(cleaned[0].sender, addr("support-service@lab.gov"));
    }

    #[test]
    fn clean_empty_input() {
        assert!(clean_records(Vec::new(), &CleaningPolicy::default()).is_empty());
    }

    #[test]
    fn restrict_filters_endpoints() {
        let records = vec![
            EmailRecord {
                timestamp: 1,
                sender: addr("a@lab.gov"),
                recipients: vec![addr("b@lab.gov"), addr("c@other.com")],
            },
            EmailRecord {
                timestamp: 2,
                sender: addr("x@other.com"),
                recipients: vec![addr("a@lab.gov")],
            },
        ];
        let kept = restrict_to_domain(records, "lab.gov");
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].recipients, vec![addr("b@lab.gov")]);
    }

    #[test]
    fn filters_are_idempotent() {
        let records = vec![
            EmailRecord {
                timestamp: 1,
                sender: addr("a@lab.gov"),
                recipients: vec![addr("b@lab.gov"), addr("c@other.com")],
            },
            EmailRecord {
                timestamp: 2,
                sender: addr("noreply@lab.gov"),
                recipients: vec![addr("a@lab.gov")],
            },
        ];
        let policy = CleaningPolicy::default();
        let once = restrict_to_domain(clean_records(records, &policy), "lab.gov");
        let twice = restrict_to_domain(clean_records(once.clone(), &policy), "lab.gov");
        assert_eq!(once, twice);
    }
}
