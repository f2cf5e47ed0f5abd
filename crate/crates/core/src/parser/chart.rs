use crate::parser::model::ParserModel;
use crate::parser::tagger::pos_tag;
use crate::treebank::DerivationTree;

#[derive(Debug, Clone, Copy)]
enum Back {
    Leaf,
    Unary(usize),
    Binary { split: usize, left: usize, right: usize },
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    score: f64,
    back: Back,
}

/// Dense per-span table over the model's category inventory.
struct Cell {
    entries: Vec<Option<Entry>>,
    active: Vec<usize>,
}

impl Cell {
    fn new(size: usize) -> Self {
        Cell {
            entries: vec![None; size],
            active: Vec::new(),
        }
    }

    /// Stores the candidate if it strictly beats the current entry.
    fn offer(&mut self, cat: usize, score: f64, back: Back) -> bool {
        match &mut self.entries[cat] {
            Some(e) if e.score >= score => false,
            Some(e) => {
                *e = Entry { score, back };
                true
            }
            slot @ None => {
                *slot = Some(Entry { score, back });
                self.active.push(cat);
                true
            }
        }
    }

    fn score(&self, cat: usize) -> Option<f64> {
        self.entries[cat].map(|e| e.score)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChartStats {
    /// Category entries over all cells once the chart is complete.
    pub entries: usize,
    pub cells: usize,
}

#[derive(Debug, Clone)]
pub struct ParseResult {
    /// Best derivation, `None` when no category spans the sentence with a
    /// non-zero root probability.
    pub tree: Option<DerivationTree>,
    pub log_prob: f64,
    pub stats: ChartStats,
}

impl ParseResult {
    pub fn is_success(&self) -> bool {
        self.tree.is_some()
    }
}

/// Viterbi CKY parse using the model's own POS tagger.
pub fn parse(model: &ParserModel, tokens: &[String]) -> ParseResult {
    let tags = pos_tag(model, tokens);
    parse_tagged(model, tokens, &tags)
}

/// Viterbi CKY parse with caller-supplied POS tags, one per token.
pub fn parse_tagged(model: &ParserModel, tokens: &[String], tags: &[String]) -> ParseResult {
    assert_eq!(tokens.len(), tags.len(), "one POS tag per token");
    let n = tokens.len();
    let g = &model.grammar;
    let size = g.categories.len();
    let failed = |stats| ParseResult {
        tree: None,
        log_prob: f64::NEG_INFINITY,
        stats,
    };
    if n == 0 || size == 0 {
        return failed(ChartStats::default());
    }

    // chart[start][len - 1]
    let mut chart: Vec<Vec<Cell>> = (0..n).map(|s| (0..n - s).map(|_| Cell::new(size)).collect()).collect();

    for (i, token) in tokens.iter().enumerate() {
        let cell = &mut chart[i][0];
        for &(cat, lex_lp) in &g.lexical {
            let e = model.emission(&g.categories[cat], token, &tags[i]);
            if e > 0.0 {
                cell.offer(cat, lex_lp + e.ln(), Back::Leaf);
            }
        }
        unary_closure(cell, &g.unary);
    }

    for len in 2..=n {
        for start in 0..=n - len {
            let mut cell = Cell::new(size);
            for split in 1..len {
                let left = &chart[start][split - 1];
                let right = &chart[start + split][len - split - 1];
                for &l in &left.active {
                    let ls = left.entries[l].unwrap().score;
                    for &r in &right.active {
                        let Some(parents) = g.binary.get(&(l, r)) else { continue };
                        let rs = right.entries[r].unwrap().score;
                        for &(p, lp) in parents {
                            cell.offer(
                                p,
                                lp + ls + rs,
                                Back::Binary {
                                    split,
                                    left: l,
                                    right: r,
                                },
                            );
                        }
                    }
                }
            }
            unary_closure(&mut cell, &g.unary);
            chart[start][len - 1] = cell;
        }
    }

    let stats = ChartStats {
        entries: chart.iter().flatten().map(|c| c.active.len()).sum(),
        cells: n * (n + 1) / 2,
    };

    let top = &chart[0][n - 1];
    let mut best: Option<(usize, f64)> = None;
    let mut candidates = top.active.clone();
    candidates.sort_unstable();
    for cat in candidates {
        let Some(root_lp) = g.root[cat] else { continue };
        let s = root_lp + top.score(cat).unwrap();
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((cat, s));
        }
    }
    let Some((root, log_prob)) = best else {
        return failed(stats);
    };
    let tree = build(model, &chart, tokens, 0, n, root);
    ParseResult {
        tree: Some(tree),
        log_prob,
        stats,
    }
}

fn unary_closure(cell: &mut Cell, unary: &[Vec<(usize, f64)>]) {
    // Strict improvement bounds the number of rounds by the inventory size
    // whenever all unary log-probabilities are non-positive.
    for _ in 0..=unary.len() {
        let mut changed = false;
        let mut order = cell.active.clone();
        order.sort_unstable();
        for c in order {
            let s = cell.score(c).unwrap();
            for &(p, lp) in &unary[c] {
                changed |= cell.offer(p, s + lp, Back::Unary(c));
            }
        }
        if !changed {
            break;
        }
    }
}

fn build(
    model: &ParserModel,
    chart: &[Vec<Cell>],
    tokens: &[String],
    start: usize,
    len: usize,
    cat: usize,
) -> DerivationTree {
    let g = &model.grammar;
    let entry = chart[start][len - 1].entries[cat].expect("back-pointer to missing entry");
    let category = g.categories[cat].clone();
    let mut t = match entry.back {
        Back::Leaf => DerivationTree::leaf(category, tokens[start].clone()),
        Back::Unary(child) => DerivationTree::unary(category, build(model, chart, tokens, start, len, child)),
        Back::Binary { split, left, right } => DerivationTree::binary(
            category,
            build(model, chart, tokens, start, split, left),
            build(model, chart, tokens, start + split, len - split, right),
        ),
    };
    t.reindex();
    t
}
