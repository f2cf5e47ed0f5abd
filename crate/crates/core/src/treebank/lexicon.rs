use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MweKind {
    ProperNoun,
    StopWord,
    General,
}

impl fmt::Display for MweKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MweKind::ProperNoun => "proper-noun",
            MweKind::StopWord => "stop-word",
            MweKind::General => "general",
        })
    }
}

impl FromStr for MweKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proper-noun" => Ok(MweKind::ProperNoun),
            "stop-word" => Ok(MweKind::StopWord),
            "general" => Ok(MweKind::General),
            _ => Err(Error::Invalid(format!("unknown MWE kind {:?}", s))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub kind: MweKind,
    /// How often the expression occurs as a whole.
    pub mwe_count: u64,
    /// How often each unit occurs on its own, aligned with the units.
    pub unit_counts: Vec<u64>,
}

/// MWE index keyed by lowercased unit sequences.
#[derive(Debug, Clone, Default)]
pub struct MweLexicon {
    entries: BTreeMap<Vec<String>, LexiconEntry>,
    by_first_unit: HashMap<String, Vec<Vec<String>>>,
}

impl MweLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, units: Vec<String>, entry: LexiconEntry) -> Result<()> {
        let units: Vec<String> = units.iter().map(|u| u.to_lowercase()).collect();
        if units.len() < 2 {
            return Err(Error::Invalid("an MWE needs at least two units".into()));
        }
        if entry.unit_counts.len() != units.len() {
            return Err(Error::Invalid(format!(
                "{} units but {} unit counts",
                units.len(),
                entry.unit_counts.len()
            )));
        }
        if self.entries.contains_key(&units) {
            return Err(Error::Invalid(format!("duplicate entry {:?}", units.join(" "))));
        }
        let first = self.by_first_unit.entry(units[0].clone()).or_default();
        first.push(units.clone());
        first.sort();
        self.entries.insert(units, entry);
        Ok(())
    }

    pub fn get(&self, units: &[String]) -> Option<&LexiconEntry> {
        self.entries.get(units)
    }

    /// Entries whose first unit is `unit` (lowercased), sorted.
    pub fn starting_with(&self, unit: &str) -> &[Vec<String>] {
        self.by_first_unit.get(unit).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<String>, &LexiconEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Copy holding only the entries accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&[String], &LexiconEntry) -> bool) -> MweLexicon {
        let mut out = MweLexicon::new();
        for (units, entry) in self.iter() {
            if keep(units, entry) {
                out.insert(units.clone(), entry.clone())
                    .expect("entries are already valid");
            }
        }
        out
    }
}

/// Reads `unit1 unit2 ...<TAB>kind<TAB>mwe-count<TAB>c1;c2;...`. Blank
/// lines and lines starting with `#` are skipped.
pub fn read_lexicon(reader: impl BufRead) -> Result<MweLexicon> {
    let mut lexicon = MweLexicon::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let err = |message: String| Error::Lexicon { line: lineno, message };
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 tab-separated fields, found {}", fields.len())));
        }
        let units: Vec<String> = fields[0].split_whitespace().map(str::to_string).collect();
        let kind: MweKind = fields[1].parse().map_err(|e: Error| err(e.to_string()))?;
        let count = |s: &str| -> Result<u64> {
            let v: i64 = s.trim().parse().map_err(|_| err(format!("bad count {:?}", s)))?;
            u64::try_from(v).map_err(|_| err(format!("negative count {}", v)))
        };
        let mwe_count = count(fields[2])?;
        let unit_counts = fields[3].split(';').map(count).collect::<Result<Vec<_>>>()?;
        lexicon
            .insert(
                units,
                LexiconEntry {
                    kind,
                    mwe_count,
                    unit_counts,
                },
            )
            .map_err(|e| err(e.to_string()))?;
    }
    Ok(lexicon)
}
