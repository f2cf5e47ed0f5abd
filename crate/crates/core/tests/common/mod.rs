//! Generators and brute-force oracles shared by integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use mwe_ccg::mwe::MweOccurrence;
use mwe_ccg::parser::{Expansion, ParserModel};
use mwe_ccg::treebank::{Dependency, DependencySet, DerivationTree, MweKind, Node};
use mwe_ccg::Category;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

pub fn read_data(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

pub fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

const ATOMS: [&str; 4] = ["S", "NP", "N", "PP"];
const VOCAB: [&str; 3] = ["a", "b", "c"];
const TAGS: [&str; 2] = ["N", "V"];

/// Small random PCFG-style grammar held as plain tables, so scores can be
/// recomputed without the parser's compiled form.
#[derive(Debug, Clone)]
pub struct FuzzGrammar {
    pub roots: BTreeMap<Category, f64>,
    pub rules: BTreeMap<Category, BTreeMap<Expansion, f64>>,
    pub lexicon: BTreeMap<Category, BTreeMap<String, f64>>,
    pub pos_backoff: BTreeMap<String, BTreeMap<Category, f64>>,
    pub token_pos: BTreeMap<String, BTreeMap<String, u64>>,
}

fn weights<K: Ord>(keys: Vec<K>, rng: &mut impl Rng) -> BTreeMap<K, f64> {
    let raw: Vec<f64> = keys.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    keys.into_iter().zip(raw).map(|(k, w)| (k, w / total)).collect()
}

impl FuzzGrammar {
    pub fn random(rng: &mut impl Rng) -> FuzzGrammar {
        let k = rng.gen_range(1..=4);
        let mut atoms = ATOMS.to_vec();
        atoms.shuffle(rng);
        let cats: Vec<Category> = atoms[..k].iter().map(|a| Category::atom(a)).collect();

        let mut rules = BTreeMap::new();
        for p in &cats {
            let mut ex = Vec::new();
            if rng.gen_bool(0.7) {
                ex.push(Expansion::Lexical);
            }
            for l in &cats {
                for r in &cats {
                    if rng.gen_bool(0.3) {
                        ex.push(Expansion::Binary(l.clone(), r.clone()));
                    }
                }
                if l != p && rng.gen_bool(0.25) {
                    ex.push(Expansion::Unary(l.clone()));
                }
            }
            if !ex.is_empty() {
                rules.insert(p.clone(), weights(ex, rng));
            }
        }
        let roots = weights(cats.iter().filter(|_| rng.gen_bool(0.7)).cloned().collect(), rng);
        let lexicon = cats
            .iter()
            .map(|c| {
                let words = VOCAB
                    .iter()
                    .filter(|_| rng.gen_bool(0.6))
                    .map(|w| w.to_string())
                    .collect();
                (c.clone(), weights(words, rng))
            })
            .collect();
        let pos_backoff = TAGS
            .iter()
            .map(|t| {
                (
                    t.to_string(),
                    weights(cats.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect(), rng),
                )
            })
            .collect();
        // "c" stays rare so back-off scoring is exercised.
        let token_pos = VOCAB
            .iter()
            .map(|w| {
                let n = if *w == "c" { 1 } else { rng.gen_range(2..5) };
                (
                    w.to_string(),
                    BTreeMap::from([(TAGS[rng.gen_range(0..2)].to_string(), n)]),
                )
            })
            .collect();
        FuzzGrammar {
            roots,
            rules,
            lexicon,
            pos_backoff,
            token_pos,
        }
    }

    pub fn model(&self) -> ParserModel {
        ParserModel::from_tables(
            0.0,
            self.roots.clone(),
            self.rules.clone(),
            self.lexicon.clone(),
            self.pos_backoff.clone(),
            self.token_pos.clone(),
        )
    }

    pub fn random_sentence(rng: &mut impl Rng) -> (Vec<String>, Vec<String>) {
        let n = rng.gen_range(1..=5);
        (0..n)
            .map(|_| {
                (
                    VOCAB[rng.gen_range(0..3)].to_string(),
                    TAGS[rng.gen_range(0..2)].to_string(),
                )
            })
            .unzip()
    }

    fn rule(&self, parent: &Category, e: &Expansion) -> Option<f64> {
        self.rules.get(parent)?.get(e).copied()
    }

    fn emission(&self, cat: &Category, token: &str, tag: &str) -> Option<f64> {
        let freq: u64 = self.token_pos.get(token).map_or(0, |m| m.values().sum());
        if freq >= 2 {
            self.lexicon.get(cat)?.get(token).copied()
        } else {
            self.pos_backoff.get(tag)?.get(cat).copied()
        }
    }

    /// Log probability of a complete derivation from the raw tables.
    pub fn tree_score(&self, tree: &DerivationTree, tags: &[String]) -> Option<f64> {
        fn node(g: &FuzzGrammar, t: &DerivationTree, tags: &[String]) -> Option<f64> {
            match &t.node {
                Node::Leaf { token, index } => Some(
                    g.rule(&t.category, &Expansion::Lexical)?.ln()
                        + g.emission(&t.category, token, &tags[*index])?.ln(),
                ),
                Node::Unary(c) => {
                    Some(g.rule(&t.category, &Expansion::Unary(c.category.clone()))?.ln() + node(g, c, tags)?)
                }
                Node::Binary(l, r) => Some(
                    g.rule(&t.category, &Expansion::Binary(l.category.clone(), r.category.clone()))?
                        .ln()
                        + node(g, l, tags)?
                        + node(g, r, tags)?,
                ),
            }
        }
        Some(self.roots.get(&tree.category)?.ln() + node(self, tree, tags)?)
    }

    /// Scores of every derivation of `cat` over `tokens[i..j]`. Unary chains
    /// never revisit a category on the same span; such cycles only multiply
    /// in factors below one. `None` once more than `limit` are found.
    #[allow(clippy::too_many_arguments)]
    fn all_scores(
        &self,
        tokens: &[String],
        tags: &[String],
        i: usize,
        j: usize,
        cat: &Category,
        chain: &mut Vec<Category>,
        limit: usize,
    ) -> Option<Vec<f64>> {
        let mut out = Vec::new();
        let Some(expansions) = self.rules.get(cat) else {
            return Some(out);
        };
        chain.push(cat.clone());
        for (e, p) in expansions {
            let lp = p.ln();
            match e {
                Expansion::Lexical if j - i == 1 => {
                    if let Some(em) = self.emission(cat, &tokens[i], &tags[i]) {
                        out.push(lp + em.ln());
                    }
                }
                Expansion::Lexical => {}
                Expansion::Unary(c) => {
                    if !chain.contains(c) {
                        for s in self.all_scores(tokens, tags, i, j, c, chain, limit)? {
                            out.push(lp + s);
                        }
                    }
                }
                Expansion::Binary(l, r) => {
                    for k in i + 1..j {
                        let ls = self.all_scores(tokens, tags, i, k, l, &mut Vec::new(), limit)?;
                        if ls.is_empty() {
                            continue;
                        }
                        let rs = self.all_scores(tokens, tags, k, j, r, &mut Vec::new(), limit)?;
                        for a in &ls {
                            for b in &rs {
                                out.push(lp + a + b);
                            }
                        }
                    }
                }
            }
            if out.len() > limit {
                chain.pop();
                return None;
            }
        }
        chain.pop();
        Some(out)
    }

    /// Best log probability over an explicit enumeration of derivations.
    /// Outer `None` when the enumeration exceeds `limit`; inner `None`
    /// when the sentence has no derivation.
    pub fn brute_force_best(&self, tokens: &[String], tags: &[String], limit: usize) -> Option<Option<f64>> {
        let mut best: Option<f64> = None;
        for (root, p) in &self.roots {
            for s in self.all_scores(tokens, tags, 0, tokens.len(), root, &mut Vec::new(), limit)? {
                let total = p.ln() + s;
                if best.is_none_or(|b| total > b) {
                    best = Some(total);
                }
            }
        }
        Some(best)
    }
}

/// Random coordination-free derivation built top-down from application
/// steps over atomic arguments.
pub fn random_derivation(rng: &mut impl Rng, cat: Category, depth: usize, next_word: &mut usize) -> DerivationTree {
    if depth == 0 || rng.gen_bool(0.3) {
        *next_word += 1;
        return DerivationTree::leaf(cat, format!("w{}", *next_word));
    }
    let arg = Category::atom(ATOMS[rng.gen_range(0..ATOMS.len())]);
    if rng.gen_bool(0.5) {
        let f = Category::forward(cat.clone(), arg.clone());
        let l = random_derivation(rng, f, depth - 1, next_word);
        let r = random_derivation(rng, arg, depth - 1, next_word);
        DerivationTree::binary(cat, l, r)
    } else {
        let f = Category::backward(cat.clone(), arg.clone());
        let l = random_derivation(rng, arg, depth - 1, next_word);
        let r = random_derivation(rng, f, depth - 1, next_word);
        DerivationTree::binary(cat, l, r)
    }
}

/// Random tree with arbitrary (possibly non-derivable) labels, including
/// unary nodes and feature-bearing categories.
pub fn random_tree(rng: &mut impl Rng, depth: usize, next_word: &mut usize) -> DerivationTree {
    let cat = random_category(rng, 2);
    if depth == 0 || rng.gen_bool(0.25) {
        *next_word += 1;
        let word = ["the", "Mr.", "N.V.", "shore", "costs", ",", "and", "co-op"][rng.gen_range(0..8)];
        return DerivationTree::leaf(cat, format!("{}{}", word, *next_word));
    }
    if rng.gen_bool(0.15) {
        return DerivationTree::unary(cat, random_tree(rng, depth - 1, next_word));
    }
    let l = random_tree(rng, depth - 1, next_word);
    let r = random_tree(rng, depth - 1, next_word);
    DerivationTree::binary(cat, l, r)
}

pub fn random_category(rng: &mut impl Rng, depth: usize) -> Category {
    if depth == 0 || rng.gen_bool(0.5) {
        let a = ATOMS[rng.gen_range(0..ATOMS.len())];
        return if rng.gen_bool(0.2) {
            Category::atom_with_feature(a, "dcl")
        } else {
            Category::atom(a)
        };
    }
    let res = random_category(rng, depth - 1);
    let arg = random_category(rng, depth - 1);
    if rng.gen_bool(0.5) {
        Category::forward(res, arg)
    } else {
        Category::backward(res, arg)
    }
}

/// Random dependency graph over `n` tokens with a random set of disjoint
/// contiguous MWE occurrences.
pub fn random_graph_with_overlay(rng: &mut impl Rng) -> (Vec<String>, DependencySet, Vec<MweOccurrence>) {
    let n = rng.gen_range(2..12);
    let tokens: Vec<String> = (0..n).map(|i| format!("t{}", i)).collect();
    let cats = ["(S\\NP)/NP", "N/N", "NP\\NP", "(S\\NP)\\(S\\NP)"].map(|c| Category::parse(c).unwrap());
    let mut deps = DependencySet::new();
    for _ in 0..rng.gen_range(0..3 * n) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            let cat = cats[rng.gen_range(0..cats.len())].clone();
            let k = rng.gen_range(1..=cat.arity());
            deps.insert(Dependency::new(i, j, cat, k, tokens[i].clone(), tokens[j].clone()));
        }
    }
    let mut occs = Vec::new();
    let mut pos = 0;
    while pos + 1 < n {
        if rng.gen_bool(0.35) {
            let len = rng.gen_range(2..=3).min(n - pos);
            let indices: Vec<usize> = (pos..pos + len).collect();
            let units = indices.iter().map(|&i| tokens[i].clone()).collect();
            occs.push(MweOccurrence::new(indices, units, MweKind::General));
            pos += len;
        } else {
            pos += 1;
        }
    }
    (tokens, deps, occs)
}

/// Independent edge classification: 0 internal, 1 mediating, 2 external.
pub fn oracle_class(d: &Dependency, occs: &[MweOccurrence]) -> u8 {
    let owner = |i: usize| occs.iter().position(|o| o.indices.contains(&i));
    match (owner(d.argument), owner(d.functor)) {
        (Some(a), Some(b)) if a == b => 0,
        (None, None) => 2,
        _ => 1,
    }
}
