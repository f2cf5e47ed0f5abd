use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use crate::category::Category;
use crate::error::{Error, Result};

/// A word-word dependency: the word at `argument` fills slot `slot` of the
/// functor word at `functor`, whose lexical category is `functor_category`.
/// Indices are 0-based leaf positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dependency {
    pub argument: usize,
    pub functor: usize,
    pub functor_category: Category,
    pub slot: usize,
    pub argument_word: String,
    pub functor_word: String,
}

pub type DependencySet = BTreeSet<Dependency>;

/// Dependencies for a sequence of sentences, in file order.
pub type DependencyCorpus = Vec<(String, DependencySet)>;

impl Dependency {
    pub fn new(
        argument: usize,
        functor: usize,
        functor_category: Category,
        slot: usize,
        argument_word: impl Into<String>,
        functor_word: impl Into<String>,
    ) -> Self {
        Dependency {
            argument,
            functor,
            functor_category,
            slot,
            argument_word: argument_word.into(),
            functor_word: functor_word.into(),
        }
    }

    /// The parts compared by unlabelled scoring.
    pub fn unlabeled_key(&self) -> (usize, &str, usize, &str) {
        (self.argument, &self.argument_word, self.functor, &self.functor_word)
    }

    /// Checks the per-edge invariants against a token sequence.
    pub fn check(&self, tokens: &[String]) -> Result<()> {
        let word = |i: usize| tokens.get(i).map(String::as_str);
        if self.argument == self.functor {
            return Err(Error::Inconsistent(format!("self-loop at {}", self.argument)));
        }
        if word(self.argument) != Some(self.argument_word.as_str())
            || word(self.functor) != Some(self.functor_word.as_str())
        {
            return Err(Error::Inconsistent(format!(
                "dependency {}:{} -> {}:{} does not match tokens",
                self.argument, self.argument_word, self.functor, self.functor_word
            )));
        }
        Ok(())
    }
}

/// Reads `ID <id>` headers followed by one tab-separated dependency per line:
/// `i j cat_j arg_k word_i word_j`, with 1-based indices on disk.
pub fn read_dependencies(reader: impl BufRead) -> Result<DependencyCorpus> {
    let mut out: DependencyCorpus = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(id) = line.strip_prefix("ID ") {
            out.push((id.trim().to_string(), DependencySet::new()));
            continue;
        }
        let Some((_, deps)) = out.last_mut() else {
            return Err(Error::format(lineno, "dependency before first ID header"));
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(Error::format(
                lineno,
                format!("expected 6 tab-separated fields, found {}", fields.len()),
            ));
        }
        let index = |s: &str, what: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::format(lineno, format!("bad {} {:?}", what, s))),
            }
        };
        let argument = index(fields[0], "argument index")?;
        let functor = index(fields[1], "functor index")?;
        let functor_category = Category::parse(fields[2]).map_err(|e| Error::format(lineno, e.to_string()))?;
        let slot = index(fields[3], "slot")? + 1;
        if argument == functor {
            return Err(Error::format(lineno, "argument and functor share an index"));
        }
        deps.insert(Dependency::new(
            argument,
            functor,
            functor_category,
            slot,
            fields[4],
            fields[5],
        ));
    }
    Ok(out)
}

pub fn write_dependencies<'a>(
    mut writer: impl Write,
    corpus: impl IntoIterator<Item = (&'a str, &'a DependencySet)>,
) -> Result<()> {
    for (id, deps) in corpus {
        writeln!(writer, "ID {}", id)?;
        for d in deps {
            writeln!(
                writer,
                "{}\t{}\t{}\t{}\t{}\t{}",
                d.argument + 1,
                d.functor + 1,
                d.functor_category,
                d.slot,
                d.argument_word,
                d.functor_word
            )?;
        }
    }
    Ok(())
}

/// Number of unordered node pairs joined by edges in both directions.
pub fn detect_cycles(deps: &DependencySet) -> usize {
    let edges: BTreeSet<(usize, usize)> = deps.iter().map(|d| (d.argument, d.functor)).collect();
    edges.iter().filter(|&&(a, b)| a < b && edges.contains(&(b, a))).count()
}
