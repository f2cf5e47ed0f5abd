use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::treebank::{Dependency, DependencyCorpus, DependencySet};

/// Per-sentence or pooled edge counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Counts {
    pub correct: u64,
    pub attempted: u64,
    pub gold: u64,
}

impl Counts {
    pub fn new(correct: u64, attempted: u64, gold: u64) -> Self {
        Counts {
            correct,
            attempted,
            gold,
        }
    }

    pub fn precision(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.correct as f64 / self.attempted as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.gold == 0 {
            0.0
        } else {
            self.correct as f64 / self.gold as f64
        }
    }

    pub fn f1(&self) -> f64 {
        f1(self.precision(), self.recall())
    }
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts::new(
            self.correct + o.correct,
            self.attempted + o.attempted,
            self.gold + o.gold,
        )
    }
}

impl std::iter::Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Counts {
        iter.fold(Counts::default(), |a, b| a + b)
    }
}

/// Balanced F-score; 0 when both inputs are 0.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Micro-averaged precision, recall and F1 over a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub totals: Counts,
    /// Set when nothing was attempted, so precision is reported as 0.
    pub precision_undefined: bool,
    pub per_sentence: Vec<(String, Counts)>,
}

impl EvalReport {
    pub fn from_counts(per_sentence: Vec<(String, Counts)>) -> Self {
        let totals: Counts = per_sentence.iter().map(|(_, c)| *c).sum();
        EvalReport {
            precision: totals.precision(),
            recall: totals.recall(),
            f1: totals.f1(),
            totals,
            precision_undefined: totals.attempted == 0,
            per_sentence,
        }
    }

    pub fn write_tsv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "sentences\t{}", self.per_sentence.len())?;
        writeln!(w, "correct\t{}", self.totals.correct)?;
        writeln!(w, "attempted\t{}", self.totals.attempted)?;
        writeln!(w, "gold\t{}", self.totals.gold)?;
        writeln!(w, "precision\t{:.6}", self.precision)?;
        writeln!(w, "recall\t{:.6}", self.recall)?;
        writeln!(w, "f1\t{:.6}", self.f1)?;
        writeln!(w, "precision_undefined\t{}", self.precision_undefined)?;
        Ok(())
    }
}

type UnlabeledKey<'a> = (usize, &'a str, usize, &'a str);

/// Counts for one sentence. Unlabeled matching compares directed
/// `(index, word)` endpoints; labeled matching compares whole tuples.
pub fn score_sentence(system: &DependencySet, gold: &DependencySet, labeled: bool) -> Counts {
    if labeled {
        return Counts::new(
            system.intersection(gold).count() as u64,
            system.len() as u64,
            gold.len() as u64,
        );
    }
    let sk = unlabeled_keys(system);
    let gk = unlabeled_keys(gold);
    Counts::new(sk.intersection(&gk).count() as u64, sk.len() as u64, gk.len() as u64)
}

fn unlabeled_keys(deps: &DependencySet) -> BTreeSet<UnlabeledKey<'_>> {
    deps.iter().map(Dependency::unlabeled_key).collect()
}

/// Scores a system corpus against gold. Both must cover the same sentence
/// ids; the report follows gold order.
pub fn score(system: &DependencyCorpus, gold: &DependencyCorpus, labeled: bool) -> Result<EvalReport> {
    let sys: BTreeMap<&str, &DependencySet> = system.iter().map(|(id, d)| (id.as_str(), d)).collect();
    let gold_ids: BTreeSet<&str> = gold.iter().map(|(id, _)| id.as_str()).collect();
    let missing: Vec<&str> = gold_ids.iter().filter(|id| !sys.contains_key(*id)).copied().collect();
    let extra: Vec<&str> = sys.keys().filter(|id| !gold_ids.contains(*id)).copied().collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::SentenceMismatch(format!(
            "missing from system: [{}]; not in gold: [{}]",
            missing.join(", "),
            extra.join(", ")
        )));
    }
    let per_sentence = gold
        .iter()
        .map(|(id, g)| (id.clone(), score_sentence(sys[id.as_str()], g, labeled)))
        .collect();
    Ok(EvalReport::from_counts(per_sentence))
}

/// `id\tcorrect\tattempted\tgold` per line.
pub fn write_counts<'a>(mut w: impl Write, rows: impl IntoIterator<Item = &'a (String, Counts)>) -> Result<()> {
    for (id, c) in rows {
        writeln!(w, "{}\t{}\t{}\t{}", id, c.correct, c.attempted, c.gold)?;
    }
    Ok(())
}

pub fn read_counts(r: impl BufRead) -> Result<Vec<(String, Counts)>> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Error::format(n + 1, format!("bad count {:?}", s)))
        };
        match f.as_slice() {
            [id, c, a, g] => {
                let counts = Counts::new(num(c)?, num(a)?, num(g)?);
                if counts.correct > counts.attempted.min(counts.gold) {
                    return Err(Error::format(n + 1, "correct exceeds attempted or gold"));
                }
                out.push((id.to_string(), counts));
            }
            _ => return Err(Error::format(n + 1, "expected id, correct, attempted and gold")),
        }
    }
    Ok(out)
}
