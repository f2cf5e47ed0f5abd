use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use crate::category::Category;
use crate::error::{Error, Result};
use crate::parser::tagger::coarse_pos;
use crate::treebank::{DerivationTree, Node, SentenceRecord};

/// Tokens seen fewer times than this in training are scored through the
/// POS back-off table instead of the lexical table.
pub const RARE_THRESHOLD: u64 = 2;

/// What a node with a given category expands to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expansion {
    Binary(Category, Category),
    Unary(Category),
    Lexical,
}

/// Generative model over derivations, conditioned on categories:
///
/// `P(T, S) = P(root) * prod_node P(expansion | category) * prod_leaf e(token | category)`
///
/// where the emission `e` is `P(token | category)` for frequent tokens and
/// `P(category | pos(token))` for rare or unseen ones.
#[derive(Debug, Clone)]
pub struct ParserModel {
    pub(crate) smoothing: f64,
    pub(crate) roots: BTreeMap<Category, f64>,
    pub(crate) rules: BTreeMap<Category, BTreeMap<Expansion, f64>>,
    pub(crate) lexicon: BTreeMap<Category, BTreeMap<String, f64>>,
    pub(crate) pos_backoff: BTreeMap<String, BTreeMap<Category, f64>>,
    pub(crate) token_pos: BTreeMap<String, BTreeMap<String, u64>>,
    pub(crate) grammar: Grammar,
}

/// Integer-indexed view of the rule table used by the chart parser.
#[derive(Debug, Clone, Default)]
pub(crate) struct Grammar {
    pub categories: Vec<Category>,
    pub ids: HashMap<Category, usize>,
    pub binary: HashMap<(usize, usize), Vec<(usize, f64)>>,
    pub unary: Vec<Vec<(usize, f64)>>,
    /// `(category, log P(Lexical | category))`
    pub lexical: Vec<(usize, f64)>,
    pub root: Vec<Option<f64>>,
}

fn normalise<K: Ord + Clone>(counts: &BTreeMap<K, u64>, smoothing: f64, support: usize) -> BTreeMap<K, f64> {
    let total: u64 = counts.values().sum();
    let denom = total as f64 + smoothing * support as f64;
    counts
        .iter()
        .map(|(k, &c)| (k.clone(), (c as f64 + smoothing) / denom))
        .collect()
}

pub fn train(records: &[SentenceRecord], smoothing: f64) -> Result<ParserModel> {
    if !(smoothing >= 0.0 && smoothing.is_finite()) {
        return Err(Error::Invalid(format!(
            "smoothing constant must be >= 0, got {}",
            smoothing
        )));
    }
    let trees: Vec<&DerivationTree> = records.iter().filter_map(|r| r.tree.as_ref()).collect();
    if trees.is_empty() {
        return Err(Error::Invalid("cannot train on an empty treebank".into()));
    }

    let mut roots: BTreeMap<Category, u64> = BTreeMap::new();
    let mut rules: BTreeMap<Category, BTreeMap<Expansion, u64>> = BTreeMap::new();
    let mut lexical: BTreeMap<Category, BTreeMap<String, u64>> = BTreeMap::new();
    let mut pos_cat: BTreeMap<String, BTreeMap<Category, u64>> = BTreeMap::new();
    let mut token_pos: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();

    fn walk(
        t: &DerivationTree,
        rules: &mut BTreeMap<Category, BTreeMap<Expansion, u64>>,
        lexical: &mut BTreeMap<Category, BTreeMap<String, u64>>,
        pos_cat: &mut BTreeMap<String, BTreeMap<Category, u64>>,
        token_pos: &mut BTreeMap<String, BTreeMap<String, u64>>,
    ) {
        let expansion = match &t.node {
            Node::Leaf { token, .. } => {
                *lexical
                    .entry(t.category.clone())
                    .or_default()
                    .entry(token.clone())
                    .or_default() += 1;
                let pos = coarse_pos(&t.category).to_string();
                *pos_cat
                    .entry(pos.clone())
                    .or_default()
                    .entry(t.category.clone())
                    .or_default() += 1;
                *token_pos.entry(token.clone()).or_default().entry(pos).or_default() += 1;
                Expansion::Lexical
            }
            Node::Unary(c) => {
                walk(c, rules, lexical, pos_cat, token_pos);
                Expansion::Unary(c.category.clone())
            }
            Node::Binary(l, r) => {
                walk(l, rules, lexical, pos_cat, token_pos);
                walk(r, rules, lexical, pos_cat, token_pos);
                Expansion::Binary(l.category.clone(), r.category.clone())
            }
        };
        *rules
            .entry(t.category.clone())
            .or_default()
            .entry(expansion)
            .or_default() += 1;
    }

    for t in &trees {
        *roots.entry(t.category.clone()).or_default() += 1;
        walk(t, &mut rules, &mut lexical, &mut pos_cat, &mut token_pos);
    }

    let vocabulary: BTreeSet<&String> = lexical.values().flat_map(|m| m.keys()).collect();
    let lexical_categories: Vec<&Category> = lexical.keys().collect();

    let lexicon = lexical
        .iter()
        .map(|(cat, words)| {
            let total: u64 = words.values().sum();
            let denom = total as f64 + smoothing * vocabulary.len() as f64;
            let probs = vocabulary
                .iter()
                .filter_map(|&w| {
                    let c = words.get(w).copied().unwrap_or(0);
                    let p = (c as f64 + smoothing) / denom;
                    (p > 0.0).then(|| (w.clone(), p))
                })
                .collect();
            (cat.clone(), probs)
        })
        .collect();

    let pos_backoff = pos_cat
        .iter()
        .map(|(pos, cats)| {
            let total: u64 = cats.values().sum();
            let denom = total as f64 + smoothing * lexical_categories.len() as f64;
            let probs = lexical_categories
                .iter()
                .filter_map(|&cat| {
                    let c = cats.get(cat).copied().unwrap_or(0);
                    let p = (c as f64 + smoothing) / denom;
                    (p > 0.0).then(|| (cat.clone(), p))
                })
                .collect();
            (pos.clone(), probs)
        })
        .collect();

    Ok(ParserModel::from_tables(
        smoothing,
        normalise(&roots, smoothing, roots.len()),
        rules
            .iter()
            .map(|(cat, ex)| (cat.clone(), normalise(ex, smoothing, ex.len())))
            .collect(),
        lexicon,
        pos_backoff,
        token_pos,
    ))
}

impl ParserModel {
    /// Builds a model from explicit probability tables.
    pub fn from_tables(
        smoothing: f64,
        roots: BTreeMap<Category, f64>,
        rules: BTreeMap<Category, BTreeMap<Expansion, f64>>,
        lexicon: BTreeMap<Category, BTreeMap<String, f64>>,
        pos_backoff: BTreeMap<String, BTreeMap<Category, f64>>,
        token_pos: BTreeMap<String, BTreeMap<String, u64>>,
    ) -> Self {
        let mut model = ParserModel {
            smoothing,
            roots,
            rules,
            lexicon,
            pos_backoff,
            token_pos,
            grammar: Grammar::default(),
        };
        model.grammar = Grammar::compile(&model);
        model
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn root_prob(&self, cat: &Category) -> f64 {
        self.roots.get(cat).copied().unwrap_or(0.0)
    }

    pub fn rule_prob(&self, parent: &Category, expansion: &Expansion) -> f64 {
        self.rules
            .get(parent)
            .and_then(|m| m.get(expansion))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn expansions(&self, parent: &Category) -> impl Iterator<Item = (&Expansion, f64)> {
        self.rules
            .get(parent)
            .into_iter()
            .flat_map(|m| m.iter().map(|(e, &p)| (e, p)))
    }

    pub fn categories(&self) -> impl Iterator<Item = &Category> {
        self.grammar.categories.iter()
    }

    pub fn lexical_prob(&self, cat: &Category, token: &str) -> f64 {
        self.lexicon.get(cat).and_then(|m| m.get(token)).copied().unwrap_or(0.0)
    }

    pub fn backoff_prob(&self, pos: &str, cat: &Category) -> f64 {
        self.pos_backoff
            .get(pos)
            .and_then(|m| m.get(cat))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn token_frequency(&self, token: &str) -> u64 {
        self.token_pos.get(token).map_or(0, |m| m.values().sum())
    }

    pub fn is_rare(&self, token: &str) -> bool {
        self.token_frequency(token) < RARE_THRESHOLD
    }

    /// Emission score of `token` under lexical category `cat`.
    pub fn emission(&self, cat: &Category, token: &str, pos: &str) -> f64 {
        if self.is_rare(token) {
            self.backoff_prob(pos, cat)
        } else {
            self.lexical_prob(cat, token)
        }
    }

    /// `log P(T, S)` of a complete derivation, or `None` if some factor is
    /// zero. `tags` holds one POS tag per leaf.
    pub fn tree_log_prob(&self, tree: &DerivationTree, tags: &[String]) -> Option<f64> {
        fn node(m: &ParserModel, t: &DerivationTree, tags: &[String]) -> Option<f64> {
            let (expansion, rest) = match &t.node {
                Node::Leaf { token, index } => {
                    let e = m.emission(&t.category, token, tags.get(*index)?);
                    (Expansion::Lexical, (e > 0.0).then(|| e.ln())?)
                }
                Node::Unary(c) => (Expansion::Unary(c.category.clone()), node(m, c, tags)?),
                Node::Binary(l, r) => (
                    Expansion::Binary(l.category.clone(), r.category.clone()),
                    node(m, l, tags)? + node(m, r, tags)?,
                ),
            };
            let p = m.rule_prob(&t.category, &expansion);
            (p > 0.0).then(|| p.ln() + rest)
        }
        let root = self.root_prob(&tree.category);
        if root <= 0.0 {
            return None;
        }
        Some(root.ln() + node(self, tree, tags)?)
    }

    pub fn write_tsv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "meta\tsmoothing\t-\t{}", self.smoothing)?;
        for (cat, p) in &self.roots {
            writeln!(w, "root\tTOP\t{}\t{}", cat, p)?;
        }
        for (parent, ex) in &self.rules {
            for (e, p) in ex {
                let outcome = match e {
                    Expansion::Binary(l, r) => format!("BIN {} {}", l, r),
                    Expansion::Unary(c) => format!("UN {}", c),
                    Expansion::Lexical => "LEX".to_string(),
                };
                writeln!(w, "rule\t{}\t{}\t{}", parent, outcome, p)?;
            }
        }
        for (cat, words) in &self.lexicon {
            for (word, p) in words {
                writeln!(w, "lex\t{}\t{}\t{}", cat, word, p)?;
            }
        }
        for (pos, cats) in &self.pos_backoff {
            for (cat, p) in cats {
                writeln!(w, "pos\t{}\t{}\t{}", pos, cat, p)?;
            }
        }
        for (tok, tags) in &self.token_pos {
            for (tag, c) in tags {
                writeln!(w, "tokpos\t{}\t{}\t{}", tok, tag, c)?;
            }
        }
        Ok(())
    }

    pub fn read_tsv(r: impl BufRead) -> Result<ParserModel> {
        let mut smoothing = None;
        let mut roots = BTreeMap::new();
        let mut rules: BTreeMap<Category, BTreeMap<Expansion, f64>> = BTreeMap::new();
        let mut lexicon: BTreeMap<Category, BTreeMap<String, f64>> = BTreeMap::new();
        let mut pos_backoff: BTreeMap<String, BTreeMap<Category, f64>> = BTreeMap::new();
        let mut token_pos: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = n + 1;
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(Error::format(lineno, "expected table, condition, outcome and value"));
            }
            let cat = |s: &str| Category::parse(s).map_err(|e| Error::format(lineno, e.to_string()));
            let prob = |s: &str| -> Result<f64> {
                match s.parse::<f64>() {
                    Ok(p) if p > 0.0 && p <= 1.0 => Ok(p),
                    _ => Err(Error::format(lineno, format!("bad probability {:?}", s))),
                }
            };
            match f[0] {
                "meta" if f[1] == "smoothing" => {
                    smoothing = Some(
                        f[3].parse::<f64>()
                            .map_err(|_| Error::format(lineno, "bad smoothing constant"))?,
                    )
                }
                "root" => {
                    roots.insert(cat(f[2])?, prob(f[3])?);
                }
                "rule" => {
                    let parts: Vec<&str> = f[2].split(' ').collect();
                    let e = match parts.as_slice() {
                        ["BIN", l, r] => Expansion::Binary(cat(l)?, cat(r)?),
                        ["UN", c] => Expansion::Unary(cat(c)?),
                        ["LEX"] => Expansion::Lexical,
                        _ => return Err(Error::format(lineno, format!("bad expansion {:?}", f[2]))),
                    };
                    rules.entry(cat(f[1])?).or_default().insert(e, prob(f[3])?);
                }
                "lex" => {
                    lexicon
                        .entry(cat(f[1])?)
                        .or_default()
                        .insert(f[2].to_string(), prob(f[3])?);
                }
                "pos" => {
                    pos_backoff
                        .entry(f[1].to_string())
                        .or_default()
                        .insert(cat(f[2])?, prob(f[3])?);
                }
                "tokpos" => {
                    let c = f[3].parse::<u64>().map_err(|_| Error::format(lineno, "bad count"))?;
                    token_pos
                        .entry(f[1].to_string())
                        .or_default()
                        .insert(f[2].to_string(), c);
                }
                other => return Err(Error::format(lineno, format!("unknown table {:?}", other))),
            }
        }
        let smoothing = smoothing.ok_or_else(|| Error::Invalid("model file lacks a smoothing row".into()))?;
        Ok(ParserModel::from_tables(
            smoothing,
            roots,
            rules,
            lexicon,
            pos_backoff,
            token_pos,
        ))
    }
}

impl Grammar {
    fn compile(m: &ParserModel) -> Grammar {
        let mut all: BTreeSet<&Category> = BTreeSet::new();
        all.extend(m.roots.keys());
        for (parent, ex) in &m.rules {
            all.insert(parent);
            for e in ex.keys() {
                match e {
                    Expansion::Binary(l, r) => {
                        all.insert(l);
                        all.insert(r);
                    }
                    Expansion::Unary(c) => {
                        all.insert(c);
                    }
                    Expansion::Lexical => {}
                }
            }
        }
        let categories: Vec<Category> = all.into_iter().cloned().collect();
        let ids: HashMap<Category, usize> = categories.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut g = Grammar {
            unary: vec![Vec::new(); categories.len()],
            root: vec![None; categories.len()],
            ..Grammar::default()
        };
        for (parent, ex) in &m.rules {
            let p = ids[parent];
            for (e, &prob) in ex {
                let lp = prob.ln();
                match e {
                    Expansion::Binary(l, r) => g.binary.entry((ids[l], ids[r])).or_default().push((p, lp)),
                    Expansion::Unary(c) => g.unary[ids[c]].push((p, lp)),
                    Expansion::Lexical => g.lexical.push((p, lp)),
                }
            }
        }
        for (cat, &prob) in &m.roots {
            g.root[ids[cat]] = Some(prob.ln());
        }
        g.categories = categories;
        g.ids = ids;
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::read_treebank;

    fn c(s: &str) -> Category {
        Category::parse(s).unwrap()
    }

    fn records(text: &str) -> Vec<SentenceRecord> {
        read_treebank(text.as_bytes()).unwrap()
    }

    const JOHN: &str = "ID 1\n(S (NP John) (S\\NP ((S\\NP)/NP buys) (NP shares)))\n";

    #[test]
    fn single_tree_gives_certain_rule() {
        let m = train(&records(JOHN), 0.0).unwrap();
        assert_eq!(m.rule_prob(&c("S"), &Expansion::Binary(c("NP"), c("S\\NP"))), 1.0);
        assert_eq!(m.root_prob(&c("S")), 1.0);
        assert_eq!(m.lexical_prob(&c("NP"), "John"), 0.5);
        assert_eq!(m.lexical_prob(&c("NP"), "buys"), 0.0);
    }

    #[test]
    fn expansions_follow_relative_frequency() {
        let m = train(&records("ID 1\n(N (N/N big) (N dog))\nID 2\n(N cat)\n"), 0.0).unwrap();
        assert_eq!(m.rule_prob(&c("N"), &Expansion::Lexical), 2.0 / 3.0);
        assert_eq!(m.rule_prob(&c("N"), &Expansion::Binary(c("N/N"), c("N"))), 1.0 / 3.0);
    }

    #[test]
    fn smoothing_reaches_unseen_pairs() {
        let m = train(&records(JOHN), 0.5).unwrap();
        assert!(m.lexical_prob(&c("NP"), "buys") > 0.0);
        for words in m.lexicon.values() {
            let s: f64 = words.values().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_treebank_is_an_error() {
        assert!(train(&[], 0.1).is_err());
        assert!(train(&records(JOHN), -1.0).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        let m = train(&records(JOHN), 0.25).unwrap();
        let mut buf = Vec::new();
        m.write_tsv(&mut buf).unwrap();
        let back = ParserModel::read_tsv(buf.as_slice()).unwrap();
        let mut again = Vec::new();
        back.write_tsv(&mut again).unwrap();
        assert_eq!(buf, again);
        assert_eq!(back.rules, m.rules);
        assert_eq!(back.lexicon, m.lexicon);
    }

    #[test]
    fn rejects_bad_model_rows() {
        assert!(ParserModel::read_tsv("meta\tsmoothing\t-\t0\nroot\tTOP\tS\t1.5\n".as_bytes()).is_err());
        assert!(ParserModel::read_tsv("root\tTOP\tS\t1\n".as_bytes()).is_err());
        assert!(ParserModel::read_tsv("meta\tsmoothing\t-\t0\nrule\tS\tTRI a b c\t0.5\n".as_bytes()).is_err());
    }
}
