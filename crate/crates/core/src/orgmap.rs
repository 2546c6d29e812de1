//! Formal organization structure: the unit hierarchy and the directory
//! mapping addresses to low-level units.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Address;

/// Organization-type classification of a unit.
///
/// The seven canonical values cover the technical/operations split crossed
/// with group/program/management, plus administration. Chart files may
/// declare further categories; they all fold into [`UnitCategory::Other`]
/// so that category-level aggregation stays a fixed small node set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitCategory {
    TechnicalGroup,
    TechnicalProgram,
    TechnicalManagement,
    OperationsGroup,
    OperationsProgram,
    OperationsManagement,
    Administration,
    Other,
}

impl UnitCategory {
    /// The seven canonical categories, in display order.
    pub const CANONICAL: [UnitCategory; 7] = [
        UnitCategory::TechnicalGroup,
        UnitCategory::TechnicalProgram,
        UnitCategory::TechnicalManagement,
        UnitCategory::OperationsGroup,
        UnitCategory::OperationsProgram,
        UnitCategory::OperationsManagement,
        UnitCategory::Administration,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            UnitCategory::TechnicalGroup => "technical-group",
            UnitCategory::TechnicalProgram => "technical-program",
            UnitCategory::TechnicalManagement => "technical-management",
            UnitCategory::OperationsGroup => "operations-group",
            UnitCategory::OperationsProgram => "operations-program",
            UnitCategory::OperationsManagement => "operations-management",
            UnitCategory::Administration => "administration",
            UnitCategory::Other => "other",
        }
    }

    /// Parse a category label. Unknown non-empty labels fold to `Other`;
    /// an empty label is an enumeration error (caller supplies context).
    pub fn parse(label: &str) -> Option<UnitCategory> {
        let label = label.trim().to_lowercase();
        if label.is_empty() {
            return None;
        }
        Some(match label.as_str() {
            "technical-group" => UnitCategory::TechnicalGroup,
            "technical-program" => UnitCategory::TechnicalProgram,
            "technical-management" => UnitCategory::TechnicalManagement,
            "operations-group" => UnitCategory::OperationsGroup,
            "operations-program" => UnitCategory::OperationsProgram,
            "operations-management" => UnitCategory::OperationsManagement,
            "administration" => UnitCategory::Administration,
            _ => UnitCategory::Other,
        })
    }
}

impl fmt::Display for UnitCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One organizational unit in the hierarchy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrgUnit {
    pub unit_id: String,
    pub name: String,
    /// Empty for roots.
    pub parent_id: Option<String>,
    /// 0 for roots, parent level + 1 otherwise. Computed on load.
    pub level: u32,
    pub category: UnitCategory,
}

/// The validated unit forest, with levels computed.
#[derive(Debug, Clone, Default)]
pub struct OrgChart {
    units: Vec<OrgUnit>,
    index: HashMap<String, usize>,
}

/// A raw chart row before validation.
#[derive(Debug, Clone)]
pub struct ChartRow {
    pub unit_id: String,
    pub name: String,
    pub parent_id: Option<String>,
    pub category: UnitCategory,
}

impl OrgChart {
    /// Load and validate a chart from CSV with header
    /// `unit_id,name,parent_id,category` (empty parent for roots).
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let mut rows = Vec::new();
        for record in csv_reader.records() {
            let record = record?;
            let unit_id = record.get(0).unwrap_or("").trim().to_string();
            if unit_id.is_empty() {
                return Err(Error::ChartEntry {
                    unit: String::new(),
                    reason: "empty unit_id".into(),
                });
            }
            let name = record.get(1).unwrap_or("").trim().to_string();
            let parent = record.get(2).unwrap_or("").trim();
            let parent_id = (!parent.is_empty()).then(|| parent.to_string());
            let category = UnitCategory::parse(record.get(3).unwrap_or("")).ok_or_else(|| {
                Error::ChartEntry {
                    unit: unit_id.clone(),
                    reason: "empty category".into(),
                }
            })?;
            rows.push(ChartRow {
                unit_id,
                name,
                parent_id,
                category,
            });
        }
        Self::from_rows(rows)
    }

    /// Validate rows into a chart: unique ids, existing parents, no cycles,
    /// levels computed from the roots down.
    pub fn from_rows(rows: Vec<ChartRow>) -> Result<Self> {
        let mut index = HashMap::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if index.insert(row.unit_id.clone(), i).is_some() {
                return Err(Error::ChartEntry {
                    unit: row.unit_id.clone(),
                    reason: "duplicate unit_id".into(),
                });
            }
        }
        for row in &rows {
            if let Some(parent) = &row.parent_id {
                if !index.contains_key(parent) {
                    return Err(Error::UnknownParent {
                        unit: row.unit_id.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        // Resolve levels; 0 = unvisited, 1 = in progress, 2 = done.
        let mut state = vec![0u8; rows.len()];
        let mut levels = vec![0u32; rows.len()];
        for start in 0..rows.len() {
            if state[start] == 2 {
                continue;
            }
            let mut chain: Vec<usize> = Vec::new();
            let mut current = start;
            loop {
                if state[current] == 1 {
                    // Reconstruct the cycle for the error message.
                    let pos = chain.iter().position(|&u| u == current).unwrap_or(0);
                    let mut names: Vec<&str> = chain[pos..]
                        .iter()
                        .map(|&u| rows[u].unit_id.as_str())
                        .collect();
                    names.push(rows[current].unit_id.as_str());
                    return Err(Error::ChartCycle(names.join(" -> ")));
                }
                if state[current] == 2 {
                    break;
                }
                state[current] = 1;
                chain.push(current);
                match &rows[current].parent_id {
                    Some(parent) => current = index[parent],
                    None => {
                        levels[current] = 0;
                        state[current] = 2;
                        break;
                    }
                }
            }
            // Unwind: children are one level below their parent.
            while let Some(unit) = chain.pop() {
                if state[unit] == 2 {
                    continue;
                }
                let parent = &rows[unit].parent_id;
                levels[unit] = match parent {
                    Some(p) => levels[index[p]] + 1,
                    None => 0,
                };
                state[unit] = 2;
            }
        }
        let units = rows
            .into_iter()
            .zip(levels)
            .map(|(row, level)| OrgUnit {
                unit_id: row.unit_id,
                name: row.name,
                parent_id: row.parent_id,
                level,
                category: row.category,
            })
            .collect();
        Ok(OrgChart { units, index })
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn units(&self) -> &[OrgUnit] {
        &self.units
    }

    pub fn get(&self, unit_id: &str) -> Option<&OrgUnit> {
        self.index.get(unit_id).map(|&i| &self.units[i])
    }

    /// The unique ancestor of `unit_id` at `target_level` (the unit itself
    /// when the levels are equal).
    pub fn lift_to_level(&self, unit_id: &str, target_level: u32) -> Result<&OrgUnit> {
        let mut unit = self.get(unit_id).ok_or_else(|| Error::ChartEntry {
            unit: unit_id.to_string(),
            reason: "unknown unit".into(),
        })?;
        if target_level > unit.level {
            return Err(Error::Level {
                unit: unit_id.to_string(),
                level: unit.level,
                target: target_level,
            });
        }
        while unit.level > target_level {
            let parent = unit.parent_id.as_deref().expect("level > 0 has a parent");
            unit = self.get(parent).expect("validated parent");
        }
        Ok(unit)
    }
}

/// Outcome of resolving an address against the directory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution<'a> {
    /// Mapped to a chart unit.
    Unit(&'a str),
    /// Outside the internal domain.
    External,
    /// Internal domain but absent from the directory (shared services,
    /// role accounts, secondary addresses).
    UnknownInternal,
}

/// Mapping of internal addresses to their low-level unit.
#[derive(Debug, Clone, Default)]
pub struct AddressDirectory {
    map: HashMap<Address, String>,
    internal_suffix: String,
}

/// Directory load outcome: the mapping plus non-fatal diagnostics.
#[derive(Debug, Clone, Default)]
pub struct DirectoryLoad {
    pub directory: AddressDirectory,
    /// Rows whose unit_id is not in the chart: (address, unit_id).
    pub unresolved: Vec<(Address, String)>,
    /// Addresses with more than one row; the first entry wins.
    pub duplicates: Vec<Address>,
}

impl AddressDirectory {
    pub fn new(internal_suffix: impl Into<String>) -> Self {
        AddressDirectory {
            map: HashMap::new(),
            internal_suffix: internal_suffix.into(),
        }
    }

    /// Load a directory from CSV with header `address,unit_id`, checking
    /// unit references against the chart. Bad references are reported,
    /// not fatal.
    pub fn from_reader(
        reader: impl Read,
        chart: &OrgChart,
        internal_suffix: impl Into<String>,
    ) -> Result<DirectoryLoad> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let mut out = DirectoryLoad {
            directory: AddressDirectory::new(internal_suffix),
            ..DirectoryLoad::default()
        };
        for record in csv_reader.records() {
            let record = record?;
            let address = Address::parse(record.get(0).unwrap_or(""))?;
            let unit_id = record.get(1).unwrap_or("").trim().to_string();
            if chart.get(&unit_id).is_none() {
                out.unresolved.push((address, unit_id));
                continue;
            }
            if out.directory.map.contains_key(&address) {
                out.duplicates.push(address);
                continue;
            }
            out.directory.map.insert(address, unit_id);
        }
        Ok(out)
    }

    pub fn insert(&mut self, address: Address, unit_id: impl Into<String>) {
        self.map.insert(address, unit_id.into());
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn internal_suffix(&self) -> &str {
        &self.internal_suffix
    }

    /// Classify an address as a mapped unit, unknown-internal, or external.
    ///
    /// With an empty internal suffix, every unmapped address is external.
    pub fn resolve(&self, address: &Address) -> Resolution<'_> {
        if let Some(unit_id) = self.map.get(address) {
            return Resolution::Unit(unit_id);
        }
        if !self.internal_suffix.is_empty() && address.in_domain(&self.internal_suffix) {
            Resolution::UnknownInternal
        } else {
            Resolution::External
        }
    }
}

/// Id of the per-domain pseudo-unit grouping unknown-internal addresses,
/// so their traffic is not silently dropped during aggregation.
pub fn unknown_internal_unit(domain: &str) -> String {
    format!("unknown:{domain}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart_from(csv: &str) -> Result<OrgChart> {
        OrgChart::from_reader(csv.as_bytes())
    }

    const CHAIN: &str = "unit_id,name,parent_id,category\n\
        A,Alpha,,administration\n\
        B,Beta,A,technical-management\n\
        C,Gamma,B,technical-group\n";

    #[test]
    fn chain_levels() {
        let chart = chart_from(CHAIN).unwrap();
        assert_eq!(chart.get("A").unwrap().level, 0);
        assert_eq!(chart.get("B").unwrap().level, 1);
        assert_eq!(chart.get("C").unwrap().level, 2);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let err =
            chart_from("unit_id,name,parent_id,category\nA,Alpha,A,administration\n").unwrap_err();
        assert!(matches!(err, Error::ChartCycle(_)), "{err}");
    }

    #[test]
    fn two_node_cycle_named() {
        let err = chart_from("unit_id,name,parent_id,category\nA,Alpha,B,other\nB,Beta,A,other\n")
            .unwrap_err();
        match err {
            Error::ChartCycle(path) => assert!(path.contains("A") && path.contains("B")),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn unknown_parent_rejected() {
        let err = chart_from("unit_id,name,parent_id,category\nA,Alpha,NOPE,other\n").unwrap_err();
        assert!(matches!(err, Error::UnknownParent { .. }));
    }

    #[test]
    fn duplicate_unit_rejected() {
        let err = chart_from("unit_id,name,parent_id,category\nA,Alpha,,other\nA,Again,,other\n")
            .unwrap_err();
        assert!(matches!(err, Error::ChartEntry { .. }));
    }

    #[test]
    fn empty_category_rejected() {
        let err = chart_from("unit_id,name,parent_id,category\nA,Alpha,,\n").unwrap_err();
        assert!(matches!(err, Error::ChartEntry { .. }));
    }

    #[test]
    fn unknown_category_folds_to_other() {
        let chart =
            chart_from("unit_id,name,parent_id,category\nA,Alpha,,special-task-force\n").unwrap();
        assert_eq!(chart.get("A").unwrap().category, UnitCategory::Other);
    }

    #[test]
    fn lift_walks_ancestry() {
        let chart = chart_from(CHAIN).unwrap();
        assert_eq!(chart.lift_to_level("C", 0).unwrap().unit_id, "A");
        assert_eq!(chart.lift_to_level("B", 1).unwrap().unit_id, "B");
        assert!(matches!(
            chart.lift_to_level("A", 2),
            Err(Error::Level { .. })
        ));
    }

    #[test]
    fn lift_is_transitive() {
        let chart = chart_from(CHAIN).unwrap();
        let via_b = chart.lift_to_level("C", 1).unwrap().unit_id.clone();
        let direct = chart.lift_to_level("C", 0).unwrap().unit_id.clone();
        assert_eq!(chart.lift_to_level(&via_b, 0).unwrap().unit_id, direct);
        assert_eq!(chart.lift_to_level("C", 2).unwrap().level, 2);
    }

    #[test]
    fn directory_load_and_resolve() {
        let chart = chart_from(CHAIN).unwrap();
        let csv = "address,unit_id\nalice@lab.gov,C\nbob@lab.gov,NOPE\n";
        let load = AddressDirectory::from_reader(csv.as_bytes(), &chart, "lab.gov").unwrap();
        assert_eq!(load.directory.len(), 1);
        assert_eq!(load.unresolved.len(), 1);
        let alice = Address::parse("alice@lab.gov").unwrap();
        assert_eq!(load.directory.resolve(&alice), Resolution::Unit("C"));
        let vendor = Address::parse("x@vendor.com").unwrap();
        assert_eq!(load.directory.resolve(&vendor), Resolution::External);
        let ghost = Address::parse("ghost@lab.gov").unwrap();
        assert_eq!(load.directory.resolve(&ghost), Resolution::UnknownInternal);
    }

    #[test]
    fn directory_duplicate_first_wins() {
        let chart = chart_from(CHAIN).unwrap();
        let csv = "address,unit_id\nalice@lab.gov,B\nalice@lab.gov,C\n";
        let load = AddressDirectory::from_reader(csv.as_bytes(), &chart, "lab.gov").unwrap();
        assert_eq!(load.duplicates.len(), 1);
        let alice = Address::parse("alice@lab.gov").unwrap();
        assert_eq!(load.directory.resolve(&alice), Resolution::Unit("B"));
    }

    #[test]
    fn empty_directory() {
        let chart = chart_from(CHAIN).unwrap();
        let load = AddressDirectory::from_reader("address,unit_id\n".as_bytes(), &chart, "lab.gov")
            .unwrap();
        assert!(load.directory.is_empty());
    }

    #[test]
    fn large_synthetic_chart_loads() {
        // Forest shaped like the real thing: a few roots, divisions,
        // many base-level groups, 456 units total across 7 categories.
        let mut csv = String::from("unit_id,name,parent_id,category\n");
        let roots = [
            ("R1", "technical-management"),
            ("R2", "technical-management"),
            ("R3", "operations-management"),
            ("R4", "operations-management"),
            ("R5", "administration"),
            ("R6", "administration"),
        ];
        for (id, cat) in roots {
            csv.push_str(&format!("{id},{id},,{cat}\n"));
        }
        let mut count = roots.len();
        let mut group = 0usize;
        'outer: for (r, (root, _)) in roots.iter().enumerate() {
            for d in 0..11 {
                let div = format!("D{r}-{d}");
                let div_cat = if r < 2 {
                    "technical-program"
                } else if r < 4 {
                    "operations-program"
                } else {
                    "administration"
                };
                csv.push_str(&format!("{div},{div},{root},{div_cat}\n"));
                count += 1;
                if count == 456 {
                    break 'outer;
                }
                for _ in 0..6 {
                    let g = format!("G{group}");
                    group += 1;
                    let g_cat = if r < 2 {
                        "technical-group"
                    } else {
                        "operations-group"
                    };
                    csv.push_str(&format!("{g},{g},{div},{g_cat}\n"));
                    count += 1;
                    if count == 456 {
                        break 'outer;
                    }
                }
            }
        }
        assert_eq!(count, 456);
        let chart = chart_from(&csv).unwrap();
        assert_eq!(chart.len(), 456);
        let seen: std::collections::BTreeSet<UnitCategory> =
            chart.units().iter().map(|u| u.category).collect();
        assert_eq!(seen.len(), 7);
    }
}
