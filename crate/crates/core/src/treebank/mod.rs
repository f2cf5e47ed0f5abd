//! Derivation trees, dependency files, MWE lexicons and token files.
//!
//! File formats (all UTF-8):
//!
//! * treebank: `ID <id>` followed by one bracketed tree per record,
//!   `(CAT child child)` for internal nodes and `(CAT token)` for leaves;
//! * dependencies: `ID <id>` followed by `i\tj\tcat_j\targ_k\tword_i\tword_j`
//!   lines with 1-based indices;
//! * lexicon: `units\tkind\tmwe-count\tunit-count;unit-count;...`;
//! * tokens: one sentence per line, space separated, optionally prefixed by
//!   `<id>\t`. Collapsed MWE units are joined with `+`.

mod dependency;
mod lexicon;
mod tree;

use std::io::{BufRead, Write};

pub use dependency::{
    detect_cycles, read_dependencies, write_dependencies, Dependency, DependencyCorpus, DependencySet,
};
pub use lexicon::{read_lexicon, LexiconEntry, MweKind, MweLexicon};
pub use tree::{DerivationTree, Node, NodePath, NodeRule};

use crate::error::{Error, Result};

/// One sentence with whatever annotation is available for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceRecord {
    pub id: String,
    pub tree: Option<DerivationTree>,
    pub tokens: Vec<String>,
    pub dependencies: Option<DependencySet>,
}

impl SentenceRecord {
    pub fn from_tree(id: impl Into<String>, tree: DerivationTree) -> Self {
        SentenceRecord {
            id: id.into(),
            tokens: tree.tokens(),
            tree: Some(tree),
            dependencies: None,
        }
    }

    pub fn from_tokens(id: impl Into<String>, tokens: Vec<String>) -> Self {
        SentenceRecord {
            id: id.into(),
            tree: None,
            tokens,
            dependencies: None,
        }
    }
}

pub fn read_treebank(reader: impl BufRead) -> Result<Vec<SentenceRecord>> {
    let mut out = Vec::new();
    let mut pending: Option<(String, usize)> = None;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(id) = trimmed.strip_prefix("ID ") {
            if let Some((prev, at)) = pending {
                return Err(Error::format(at, format!("record {:?} has no tree", prev)));
            }
            pending = Some((id.trim().to_string(), lineno));
            continue;
        }
        let Some((id, _)) = pending.take() else {
            return Err(Error::format(lineno, "tree without preceding ID header"));
        };
        let tree = DerivationTree::parse(trimmed, lineno)?;
        out.push(SentenceRecord::from_tree(id, tree));
    }
    if let Some((id, at)) = pending {
        return Err(Error::format(at, format!("record {:?} has no tree", id)));
    }
    Ok(out)
}

/// Writes every record that has a tree; records without one are skipped.
pub fn write_treebank<'a>(mut writer: impl Write, records: impl IntoIterator<Item = &'a SentenceRecord>) -> Result<()> {
    for r in records {
        if let Some(tree) = &r.tree {
            writeln!(writer, "ID {}", r.id)?;
            writeln!(writer, "{}", tree)?;
        }
    }
    Ok(())
}

/// Reads a token file. Lines without an explicit `<id>\t` prefix get their
/// 1-based line number as id.
pub fn read_tokens(reader: impl BufRead) -> Result<Vec<(String, Vec<String>)>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let (id, text) = match line.split_once('\t') {
            Some((id, rest)) => (id.trim().to_string(), rest),
            None => ((n + 1).to_string(), line.as_str()),
        };
        let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
        if tokens.is_empty() && line.trim().is_empty() {
            continue;
        }
        out.push((id, tokens));
    }
    Ok(out)
}

pub fn write_tokens<'a>(
    mut writer: impl Write,
    sentences: impl IntoIterator<Item = (&'a str, &'a [String])>,
) -> Result<()> {
    for (id, tokens) in sentences {
        writeln!(writer, "{}\t{}", id, tokens.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn treebank_round_trip() {
        let text =
            "ID 1\n(N (N/N Publishers) (N (N/N Information) (N Bureau)))\nID 2\n(N publishers+information+bureau)\n";
        let records = read_treebank(text.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].tokens, vec!["Publishers", "Information", "Bureau"]);
        assert_eq!(records[1].tokens.len(), 1);
        let mut out = Vec::new();
        write_treebank(&mut out, &records).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn empty_treebank() {
        assert!(read_treebank("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn treebank_errors_carry_line_numbers() {
        match read_treebank("ID 1\n(N a\n".as_bytes()) {
            Err(Error::Format { line: 2, .. }) => {}
            other => panic!("{:?}", other),
        }
        match read_treebank("ID 1\nID 2\n(N a)\n".as_bytes()) {
            Err(Error::Format { line: 1, .. }) => {}
            other => panic!("{:?}", other),
        }
        match read_treebank("(N a)\n".as_bytes()) {
            Err(Error::Format { line: 1, .. }) => {}
            other => panic!("{:?}", other),
        }
        match read_treebank("ID 1\n(N/ a)\n".as_bytes()) {
            Err(Error::Format { line: 2, message }) => assert!(message.contains("N/")),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn token_file_ids() {
        let toks = read_tokens("a b\ns7\tmr.+vinken is\n\n".as_bytes()).unwrap();
        assert_eq!(toks[0], ("1".to_string(), vec!["a".to_string(), "b".to_string()]));
        assert_eq!(toks[1].0, "s7");
        assert_eq!(toks[1].1, vec!["mr.+vinken", "is"]);
    }
}
