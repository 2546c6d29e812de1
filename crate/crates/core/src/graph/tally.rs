//! Commercial vs. non-commercial external traffic tallies per
//! organization type.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Address, EmailRecord};
use crate::orgmap::{AddressDirectory, OrgChart, Resolution, UnitCategory};

/// Top-level-domain classification sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TldConfig {
    pub commercial: BTreeSet<String>,
    pub noncommercial: BTreeSet<String>,
}

impl Default for TldConfig {
    fn default() -> Self {
        TldConfig {
            commercial: ["com", "net", "info"]
                .into_iter()
                .map(String::from)
                .collect(),
            noncommercial: ["gov", "edu", "mil"]
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }
}

impl TldConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(tld) = self.commercial.intersection(&self.noncommercial).next() {
            return Err(Error::TldOverlap(tld.clone()));
        }
        Ok(())
    }

    pub fn classify(&self, address: &Address) -> TldClass {
        let tld = address.tld();
        if self.commercial.contains(tld) {
            TldClass::Commercial
        } else if self.noncommercial.contains(tld) {
            TldClass::NonCommercial
        } else {
            TldClass::Other
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TldClass {
    Commercial,
    NonCommercial,
    /// Domains in neither configured set (country codes, bare hosts).
    Other,
}

/// Tally key: a unit category, or the bucket for internal endpoints whose
/// unit (and so category) is unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TallyKey {
    Category(UnitCategory),
    Uncategorized,
}

impl fmt::Display for TallyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TallyKey::Category(c) => f.write_str(c.name()),
            TallyKey::Uncategorized => f.write_str("uncategorized"),
        }
    }
}

// Serialized as the plain category name so the tally can be a JSON object.
impl Serialize for TallyKey {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TallyKey {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let label = String::deserialize(deserializer)?;
        if label == "uncategorized" {
            return Ok(TallyKey::Uncategorized);
        }
        UnitCategory::parse(&label)
            .map(TallyKey::Category)
            .ok_or_else(|| serde::de::Error::custom(format!("bad tally key {label:?}")))
    }
}

/// Message counts for one organization type, split by direction and
/// external-domain class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub sent_commercial: u64,
    pub sent_noncommercial: u64,
    pub sent_other: u64,
    pub received_commercial: u64,
    pub received_noncommercial: u64,
    pub received_other: u64,
}

impl CategoryCounts {
    pub fn total(&self) -> u64 {
        self.sent_commercial
            + self.sent_noncommercial
            + self.sent_other
            + self.received_commercial
            + self.received_noncommercial
            + self.received_other
    }
}

/// External traffic tally: one [`CategoryCounts`] per organization type.
///
/// Each internal<->external (endpoint, endpoint) pair counts once, so the
/// sum over all categories equals the total external message count.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CommTally {
    pub counts: std::collections::BTreeMap<TallyKey, CategoryCounts>,
}

impl CommTally {
    pub fn get(&self, key: TallyKey) -> CategoryCounts {
        self.counts.get(&key).copied().unwrap_or_default()
    }

    /// Total internal<->external endpoint pairs tallied.
    pub fn total(&self) -> u64 {
        self.counts.values().map(CategoryCounts::total).sum()
    }

    /// Serialize as CSV: the seven canonical categories always appear
    /// (zero rows included); other buckets appear when touched.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "category,sent_commercial,sent_noncommercial,sent_other,\
             received_commercial,received_noncommercial,received_other\n",
        );
        let mut keys: std::collections::BTreeSet<TallyKey> = UnitCategory::CANONICAL
            .iter()
            .map(|&c| TallyKey::Category(c))
            .collect();
        keys.extend(self.counts.keys());
        for key in keys {
            let c = self.get(key);
            out.push_str(&format!(
                "{key},{},{},{},{},{},{}\n",
                c.sent_commercial,
                c.sent_noncommercial,
                c.sent_other,
                c.received_commercial,
                c.received_noncommercial,
                c.received_other
            ));
        }
        out
    }
}

/// Count internal<->external traffic per organization type.
///
/// For every record, each (internal endpoint, external endpoint) pair
/// increments the internal side's category counter by one, classified by
/// the external endpoint's top-level domain. Internal<->internal and
/// external<->external traffic is ignored.
pub fn external_domain_tally(
    records: &[EmailRecord],
    directory: &AddressDirectory,
    chart: &OrgChart,
    tld_config: &TldConfig,
) -> Result<CommTally> {
    tld_config.validate()?;
    let mut tally = CommTally::default();
    let key_of = |resolution: &Resolution<'_>| -> Option<TallyKey> {
        match resolution {
            Resolution::Unit(unit_id) => Some(
                chart
                    .get(unit_id)
                    .map(|u| TallyKey::Category(u.category))
                    .unwrap_or(TallyKey::Uncategorized),
            ),
            Resolution::UnknownInternal => Some(TallyKey::Uncategorized),
            Resolution::External => None,
        }
    };
    for record in records {
        let sender_resolution = directory.resolve(&record.sender);
        match key_of(&sender_resolution) {
            Some(sender_key) => {
                // Internal sender: tally one per external recipient.
                for recipient in &record.recipients {
                    if let Resolution::External = directory.resolve(recipient) {
                        let counts = tally.counts.entry(sender_key).or_default();
                        match tld_config.classify(recipient) {
                            TldClass::Commercial => counts.sent_commercial += 1,
                            TldClass::NonCommercial => counts.sent_noncommercial += 1,
                            TldClass::Other => counts.sent_other += 1,
                        }
                    }
                }
            }
            None => {
                // External sender: tally one per internal recipient.
                let class = tld_config.classify(&record.sender);
                for recipient in &record.recipients {
                    if let Some(recipient_key) = key_of(&directory.resolve(recipient)) {
                        let counts = tally.counts.entry(recipient_key).or_default();
                        match class {
                            TldClass::Commercial => counts.received_commercial += 1,
                            TldClass::NonCommercial => counts.received_noncommercial += 1,
                            TldClass::Other => counts.received_other += 1,
                        }
                    }
                }
            }
        }
    }
    Ok(tally)
}
