//! MWE recognition as a detector -> filters -> resolver pipeline.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::treebank::{MweKind, MweLexicon};

/// Joiner for collapsed MWE units in tokens.
pub const JOINER: char = '+';

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MweOccurrence {
    /// Strictly increasing leaf indices of the units.
    pub indices: Vec<usize>,
    /// Unit tokens as they appear in the sentence.
    pub tokens: Vec<String>,
    pub kind: MweKind,
}

impl MweOccurrence {
    pub fn new(indices: Vec<usize>, tokens: Vec<String>, kind: MweKind) -> Self {
        debug_assert!(indices.len() >= 2 && indices.len() == tokens.len());
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        MweOccurrence { indices, tokens, kind }
    }

    /// Lowercased units joined by `+`.
    pub fn joined(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.to_lowercase())
            .collect::<Vec<_>>()
            .join(&JOINER.to_string())
    }

    pub fn start(&self) -> usize {
        self.indices[0]
    }

    pub fn end(&self) -> usize {
        *self.indices.last().unwrap() + 1
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_continuous(&self) -> bool {
        self.indices.windows(2).all(|w| w[1] == w[0] + 1)
    }

    pub fn overlaps(&self, other: &MweOccurrence) -> bool {
        self.indices.iter().any(|i| other.indices.binary_search(i).is_ok())
    }

    fn units_key(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.to_lowercase()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    Exhaustive,
    ProperNoun,
    StopWord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    Continuous,
    MoreFrequentAsMwe,
    ConstrainLength(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolver {
    Longest,
    Leftmost,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecognizerConfig {
    pub detector: Detector,
    filters: Vec<Filter>,
    pub resolver: Resolver,
}

impl RecognizerConfig {
    /// The continuity filter is always part of the chain; it is prepended
    /// when missing.
    pub fn new(detector: Detector, filters: Vec<Filter>, resolver: Resolver) -> Self {
        let mut filters = filters;
        if !filters.contains(&Filter::Continuous) {
            filters.insert(0, Filter::Continuous);
        }
        RecognizerConfig {
            detector,
            filters,
            resolver,
        }
    }

    pub fn filters(&self) -> &[Filter] {
        &self.filters
    }

    /// The five recognizer rows, `rec1` to `rec5`.
    pub fn preset(name: &str) -> Option<Self> {
        use Detector::*;
        use Filter::*;
        use Resolver::*;
        let (d, f, r) = match name {
            "rec1" => (Exhaustive, vec![MoreFrequentAsMwe], Longest),
            "rec2" => (Exhaustive, vec![MoreFrequentAsMwe], Leftmost),
            "rec3" => (ProperNoun, vec![], Longest),
            "rec4" => (Exhaustive, vec![ConstrainLength(2)], Leftmost),
            "rec5" => (StopWord, vec![], Longest),
            _ => return None,
        };
        Some(RecognizerConfig::new(d, f, r))
    }

    pub const PRESETS: [&'static str; 5] = ["rec1", "rec2", "rec3", "rec4", "rec5"];
}

impl FromStr for Detector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exhaustive" => Ok(Detector::Exhaustive),
            "propernoun" | "propernouns" | "proper-noun" => Ok(Detector::ProperNoun),
            "stopword" | "stopwords" | "stop-word" => Ok(Detector::StopWord),
            _ => Err(Error::Invalid(format!("unknown detector {:?}", s))),
        }
    }
}

impl FromStr for Filter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        if let Some(arg) = lower.strip_prefix("constrainlength") {
            let n = match arg.trim_matches(|c| c == '(' || c == ')') {
                "" => 2,
                n => n
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad length in {:?}", s)))?,
            };
            return Ok(Filter::ConstrainLength(n));
        }
        match lower.as_str() {
            "continuous" => Ok(Filter::Continuous),
            "morefrequentasmwe" => Ok(Filter::MoreFrequentAsMwe),
            _ => Err(Error::Invalid(format!("unknown filter {:?}", s))),
        }
    }
}

impl FromStr for Resolver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "longest" => Ok(Resolver::Longest),
            "leftmost" => Ok(Resolver::Leftmost),
            _ => Err(Error::Invalid(format!("unknown resolver {:?}", s))),
        }
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Detector::Exhaustive => "Exhaustive",
            Detector::ProperNoun => "ProperNoun",
            Detector::StopWord => "StopWords",
        })
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filter::Continuous => f.write_str("Continuous"),
            Filter::MoreFrequentAsMwe => f.write_str("MoreFrequentAsMWE"),
            Filter::ConstrainLength(n) => write!(f, "ConstrainLength({})", n),
        }
    }
}

impl fmt::Display for Resolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resolver::Longest => "Longest",
            Resolver::Leftmost => "Leftmost",
        })
    }
}

impl fmt::Display for RecognizerConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let filters: Vec<String> = self.filters.iter().map(Filter::to_string).collect();
        write!(f, "{} / {} / {}", self.detector, filters.join("+"), self.resolver)
    }
}

/// Every contiguous, case-insensitive match of a lexicon entry allowed by
/// the detector. Overlapping matches are all returned.
pub fn detect(lexicon: &MweLexicon, tokens: &[String], detector: Detector) -> Vec<MweOccurrence> {
    let lowered: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    let mut out = Vec::new();
    for start in 0..lowered.len() {
        for units in lexicon.starting_with(&lowered[start]) {
            let end = start + units.len();
            if end > lowered.len() || lowered[start..end] != units[..] {
                continue;
            }
            let kind = lexicon.get(units).expect("indexed entry").kind;
            let wanted = match detector {
                Detector::Exhaustive => true,
                Detector::ProperNoun => kind == MweKind::ProperNoun,
                Detector::StopWord => kind == MweKind::StopWord,
            };
            if wanted {
                out.push(MweOccurrence::new(
                    (start..end).collect(),
                    tokens[start..end].to_vec(),
                    kind,
                ));
            }
        }
    }
    out
}

fn passes(filter: Filter, occ: &MweOccurrence, lexicon: &MweLexicon) -> bool {
    match filter {
        Filter::Continuous => occ.is_continuous(),
        Filter::ConstrainLength(n) => occ.len() <= n,
        Filter::MoreFrequentAsMwe => match lexicon.get(&occ.units_key()) {
            Some(entry) => entry.unit_counts.iter().all(|&c| entry.mwe_count > c),
            None => false,
        },
    }
}

pub fn apply_filters(candidates: Vec<MweOccurrence>, filters: &[Filter], lexicon: &MweLexicon) -> Vec<MweOccurrence> {
    candidates
        .into_iter()
        .filter(|occ| filters.iter().all(|&f| passes(f, occ, lexicon)))
        .collect()
}

/// Greedy conflict resolution. The result is index-disjoint and sorted by
/// start position.
///
/// * `Longest`: longest first; ties go to the leftmost start, then to the
///   lexicographically smaller joined form.
/// * `Leftmost`: smallest start first; ties go to the longer candidate,
///   then to the smaller joined form.
pub fn resolve(candidates: &[MweOccurrence], resolver: Resolver) -> Vec<MweOccurrence> {
    let mut order: Vec<(&MweOccurrence, String)> = candidates.iter().map(|c| (c, c.joined())).collect();
    match resolver {
        Resolver::Longest => order.sort_by(|(a, ja), (b, jb)| {
            b.len()
                .cmp(&a.len())
                .then(a.start().cmp(&b.start()))
                .then(ja.cmp(jb))
                .then(a.indices.cmp(&b.indices))
        }),
        Resolver::Leftmost => order.sort_by(|(a, ja), (b, jb)| {
            a.start()
                .cmp(&b.start())
                .then(b.len().cmp(&a.len()))
                .then(ja.cmp(jb))
                .then(a.indices.cmp(&b.indices))
        }),
    }
    let mut chosen: Vec<MweOccurrence> = Vec::new();
    for (cand, _) in order {
        if !chosen.iter().any(|c| c.overlaps(cand)) {
            chosen.push(cand.clone());
        }
    }
    chosen.sort_by_key(|c| c.start());
    chosen
}

pub fn recognize(lexicon: &MweLexicon, tokens: &[String], config: &RecognizerConfig) -> Vec<MweOccurrence> {
    let candidates = detect(lexicon, tokens, config.detector);
    let kept = apply_filters(candidates, &config.filters, lexicon);
    resolve(&kept, config.resolver)
}

/// Occurrences per sentence id.
pub type OccurrenceMap = BTreeMap<String, Vec<MweOccurrence>>;

/// Reads lines `id<TAB>i1 i2 ...<TAB>unit tokens<TAB>kind` (1-based indices).
/// Sentences without occurrences simply have no lines.
pub fn read_occurrences(reader: impl BufRead) -> Result<OccurrenceMap> {
    let mut out = OccurrenceMap::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::format(
                lineno,
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        }
        let indices = fields[1]
            .split_whitespace()
            .map(|s| match s.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::format(lineno, format!("bad index {:?}", s))),
            })
            .collect::<Result<Vec<_>>>()?;
        let tokens: Vec<String> = fields[2].split_whitespace().map(str::to_string).collect();
        if indices.len() < 2 || indices.len() != tokens.len() {
            return Err(Error::format(
                lineno,
                "an occurrence needs at least two units, one token per index",
            ));
        }
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::format(lineno, "indices must be strictly increasing"));
        }
        let kind: MweKind = fields[3]
            .parse()
            .map_err(|e: Error| Error::format(lineno, e.to_string()))?;
        out.entry(fields[0].to_string())
            .or_default()
            .push(MweOccurrence::new(indices, tokens, kind));
    }
    Ok(out)
}

pub fn write_occurrences<'a>(
    mut writer: impl Write,
    sentences: impl IntoIterator<Item = (&'a str, &'a [MweOccurrence])>,
) -> Result<()> {
    for (id, occs) in sentences {
        for occ in occs {
            let idx: Vec<String> = occ.indices.iter().map(|i| (i + 1).to_string()).collect();
            writeln!(
                writer,
                "{}\t{}\t{}\t{}",
                id,
                idx.join(" "),
                occ.tokens.join(" "),
                occ.kind
            )?;
        }
    }
    Ok(())
}
