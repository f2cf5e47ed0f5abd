use std::fmt;

use crate::category::{binary_rule, BinaryRule, Category};
use crate::error::{Error, Result};

/// A CCG derivation: leaves carry tokens, internal nodes have one or two
/// children. Leaf indices run `0..n` left to right once [`reindex`] has
/// been called; every constructor that builds a whole tree does so.
///
/// [`reindex`]: DerivationTree::reindex
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTree {
    pub category: Category,
    pub node: Node,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Leaf { token: String, index: usize },
    Unary(Box<DerivationTree>),
    Binary(Box<DerivationTree>, Box<DerivationTree>),
}

/// How a node relates to its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRule {
    Lexical,
    Unary,
    Binary(BinaryRule),
    NonDerivable,
}

/// Child positions from the root down to a node.
pub type NodePath = Vec<usize>;

impl DerivationTree {
    pub fn leaf(category: Category, token: impl Into<String>) -> Self {
        DerivationTree {
            category,
            node: Node::Leaf {
                token: token.into(),
                index: 0,
            },
        }
    }

    pub fn unary(category: Category, child: DerivationTree) -> Self {
        let mut t = DerivationTree {
            category,
            node: Node::Unary(Box::new(child)),
        };
        t.reindex();
        t
    }

    pub fn binary(category: Category, left: DerivationTree, right: DerivationTree) -> Self {
        let mut t = DerivationTree {
            category,
            node: Node::Binary(Box::new(left), Box::new(right)),
        };
        t.reindex();
        t
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.node, Node::Leaf { .. })
    }

    pub fn children(&self) -> Vec<&DerivationTree> {
        match &self.node {
            Node::Leaf { .. } => vec![],
            Node::Unary(c) => vec![c],
            Node::Binary(l, r) => vec![l, r],
        }
    }

    /// Renumber leaves `0..n` left to right.
    pub fn reindex(&mut self) {
        fn walk(t: &mut DerivationTree, next: &mut usize) {
            match &mut t.node {
                Node::Leaf { index, .. } => {
                    *index = *next;
                    *next += 1;
                }
                Node::Unary(c) => walk(c, next),
                Node::Binary(l, r) => {
                    walk(l, next);
                    walk(r, next);
                }
            }
        }
        let mut next = 0;
        walk(self, &mut next);
    }

    /// Leaves in order as `(index, token)`.
    pub fn leaves(&self) -> Vec<(usize, &str)> {
        let mut out = Vec::new();
        self.visit_leaves(&mut |t| {
            if let Node::Leaf { token, index } = &t.node {
                out.push((*index, token.as_str()));
            }
        });
        out
    }

    pub fn tokens(&self) -> Vec<String> {
        self.leaves().into_iter().map(|(_, t)| t.to_string()).collect()
    }

    /// Category of every leaf, in leaf order.
    pub fn lexical_categories(&self) -> Vec<&Category> {
        let mut out = Vec::new();
        self.visit_leaves(&mut |t| out.push(&t.category));
        out
    }

    fn visit_leaves<'a>(&'a self, f: &mut impl FnMut(&'a DerivationTree)) {
        match &self.node {
            Node::Leaf { .. } => f(self),
            Node::Unary(c) => c.visit_leaves(f),
            Node::Binary(l, r) => {
                l.visit_leaves(f);
                r.visit_leaves(f);
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match &self.node {
            Node::Leaf { .. } => 1,
            Node::Unary(c) => c.leaf_count(),
            Node::Binary(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    /// Half-open leaf span `[start, end)`.
    pub fn span(&self) -> (usize, usize) {
        match &self.node {
            Node::Leaf { index, .. } => (*index, index + 1),
            Node::Unary(c) => c.span(),
            Node::Binary(l, r) => (l.span().0, r.span().1),
        }
    }

    pub fn rule(&self) -> NodeRule {
        match &self.node {
            Node::Leaf { .. } => NodeRule::Lexical,
            Node::Unary(_) => NodeRule::Unary,
            Node::Binary(l, r) => match binary_rule(&self.category, &l.category, &r.category) {
                Some(rule) => NodeRule::Binary(rule),
                None => NodeRule::NonDerivable,
            },
        }
    }

    pub fn is_derivable(&self) -> bool {
        self.rule() != NodeRule::NonDerivable
    }

    /// Number of binary nodes not licensed by any combinator.
    pub fn non_derivable_count(&self) -> usize {
        let own = usize::from(!self.is_derivable());
        own + self.children().iter().map(|c| c.non_derivable_count()).sum::<usize>()
    }

    pub fn node_at(&self, path: &[usize]) -> Option<&DerivationTree> {
        let mut cur = self;
        for &step in path {
            cur = *cur.children().get(step)?;
        }
        Some(cur)
    }

    /// Lowest node whose span contains every index, and whether that node
    /// covers exactly those leaves. Unary chains are skipped down to the
    /// lowest node of the chain.
    ///
    /// Panics if `indices` is empty or holds an index past the last leaf.
    pub fn lowest_dominating_node(&self, indices: &[usize]) -> (NodePath, bool) {
        let lo = *indices.iter().min().expect("empty index set");
        let hi = *indices.iter().max().unwrap();
        assert!(hi < self.leaf_count(), "leaf index {} out of range", hi);
        let mut path = Vec::new();
        let mut cur = self;
        'descend: loop {
            for (pos, child) in cur.children().into_iter().enumerate() {
                let (s, e) = child.span();
                if s <= lo && hi < e {
                    path.push(pos);
                    cur = child;
                    continue 'descend;
                }
            }
            break;
        }
        let mut distinct = indices.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        (path, cur.leaf_count() == distinct.len())
    }

    /// Replace the subtree at `path`. Leaf indices are not renumbered.
    pub(crate) fn replace_at(&mut self, path: &[usize], replacement: DerivationTree) {
        let mut cur = self;
        for &step in path {
            cur = match (&mut cur.node, step) {
                (Node::Unary(c), 0) | (Node::Binary(c, _), 0) | (Node::Binary(_, c), 1) => c,
                _ => panic!("invalid node path"),
            };
        }
        *cur = replacement;
    }

    /// Parse one bracketed tree, e.g. `(S (NP John) (S\NP walks))`.
    /// `line` is used for error messages only.
    pub fn parse(text: &str, line: usize) -> Result<DerivationTree> {
        let mut p = BracketParser {
            chars: text.chars().collect(),
            pos: 0,
            line,
        };
        p.skip_ws();
        let mut tree = p.node()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.err("trailing input after tree"));
        }
        tree.reindex();
        Ok(tree)
    }

    /// Bracketed form with `+` in tokens shown as `_`.
    pub fn display_form(&self) -> String {
        let mut t = self.clone();
        t.map_tokens(&mut |tok| tok.replace('+', "_"));
        t.to_string()
    }

    pub(crate) fn map_tokens(&mut self, f: &mut impl FnMut(&str) -> String) {
        match &mut self.node {
            Node::Leaf { token, .. } => *token = f(token),
            Node::Unary(c) => c.map_tokens(f),
            Node::Binary(l, r) => {
                l.map_tokens(f);
                r.map_tokens(f);
            }
        }
    }
}

impl fmt::Display for DerivationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.category)?;
        match &self.node {
            Node::Leaf { token, .. } => write!(f, " {}", token)?,
            Node::Unary(c) => write!(f, " {}", c)?,
            Node::Binary(l, r) => write!(f, " {} {}", l, r)?,
        }
        write!(f, ")")
    }
}

struct BracketParser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl BracketParser {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::format(self.line, format!("{} (column {})", message.into(), self.pos + 1))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn word(&mut self, stop_at_paren: bool) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || (stop_at_paren && (c == '(' || c == ')')) {
                break;
            }
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn node(&mut self) -> Result<DerivationTree> {
        if self.peek() != Some('(') {
            return Err(self.err("expected '('"));
        }
        self.pos += 1;
        // Category strings contain no whitespace but may contain parentheses.
        let cat_text = self.word(false);
        if cat_text.is_empty() {
            return Err(self.err("missing category"));
        }
        let category = Category::parse(&cat_text).map_err(|e| self.err(e.to_string()))?;
        self.skip_ws();
        let tree = match self.peek() {
            Some('(') => {
                let mut children = Vec::new();
                while self.peek() == Some('(') {
                    children.push(self.node()?);
                    self.skip_ws();
                }
                let mut it = children.into_iter();
                match (it.next(), it.next(), it.next()) {
                    (Some(c), None, None) => DerivationTree {
                        category,
                        node: Node::Unary(Box::new(c)),
                    },
                    (Some(l), Some(r), None) => DerivationTree {
                        category,
                        node: Node::Binary(Box::new(l), Box::new(r)),
                    },
                    _ => return Err(self.err("node has more than two children")),
                }
            }
            Some(')') | None => return Err(self.err("node has no children")),
            Some(_) => {
                let token = self.word(true);
                self.skip_ws();
                if self.peek() == Some('(') {
                    return Err(self.err("token followed by subtree"));
                }
                DerivationTree::leaf(category, token)
            }
        };
        if self.peek() != Some(')') {
            return Err(self.err("expected ')'"));
        }
        self.pos += 1;
        Ok(tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const ORIGINAL_SUBTREE: &str = "(N (N/N Publishers) (N (N/N Information) (N Bureau)))";
    pub const NON_SIBLING: &str = "((S\\NP)\\(S\\NP) (((S\\NP)\\(S\\NP))/PP according) (PP (PP/NP to) (NP (N (N/N Publishers) (N (N/N Information) (N Bureau))))))";

    #[test]
    fn reads_original_subtree() {
        let t = DerivationTree::parse(ORIGINAL_SUBTREE, 1).unwrap();
        assert_eq!(t.category, Category::atom("N"));
        assert_eq!(t.leaves(), vec![(0, "Publishers"), (1, "Information"), (2, "Bureau")]);
        assert_eq!(t.to_string(), ORIGINAL_SUBTREE);
        assert!(t.is_derivable());
        assert_eq!(t.non_derivable_count(), 0);
    }

    #[test]
    fn reads_collapsed_leaf() {
        let t = DerivationTree::parse("(N publishers_information_bureau)", 1).unwrap();
        assert_eq!(t.leaves(), vec![(0, "publishers_information_bureau")]);
    }

    #[test]
    fn canonicalises_categories() {
        let t = DerivationTree::parse("(S\\NP  (S\\NP/NP buys)   (NP shares) )", 1).unwrap();
        assert_eq!(t.to_string(), "(S\\NP ((S\\NP)/NP buys) (NP shares))");
    }

    #[test]
    fn malformed_trees_report_line() {
        for bad in [
            "(N",
            "(N a b)",
            "N a",
            "(N (N a) (N b) (N c))",
            "(N)",
            "(N a) x",
            "(S\\ x)",
        ] {
            match DerivationTree::parse(bad, 7) {
                Err(Error::Format { line: 7, .. }) => {}
                other => panic!("{:?} -> {:?}", bad, other),
            }
        }
    }

    #[test]
    fn non_derivable_nodes_are_flagged() {
        let t = DerivationTree::parse("(S (NP a) (NP b))", 1).unwrap();
        assert_eq!(t.rule(), NodeRule::NonDerivable);
        assert_eq!(t.non_derivable_count(), 1);
    }

    #[test]
    fn dominating_node_of_sibling_mwe() {
        let t = DerivationTree::parse(ORIGINAL_SUBTREE, 1).unwrap();
        assert_eq!(t.lowest_dominating_node(&[0, 1, 2]), (vec![], true));
        assert_eq!(t.lowest_dominating_node(&[1, 2]), (vec![1], true));
        assert_eq!(t.lowest_dominating_node(&[1]), (vec![1, 0], true));
        assert_eq!(t.lowest_dominating_node(&[0, 1]), (vec![], false));
    }

    #[test]
    fn dominating_node_of_non_sibling_mwe() {
        let t = DerivationTree::parse(NON_SIBLING, 1).unwrap();
        assert_eq!(t.lowest_dominating_node(&[0, 1]), (vec![], false));
        // publishers information bureau is a constituent below the NP unary
        let (path, only) = t.lowest_dominating_node(&[2, 3, 4]);
        assert!(only);
        assert_eq!(t.node_at(&path).unwrap().category, Category::atom("N"));
    }

    #[test]
    fn display_form_uses_underscores() {
        let t = DerivationTree::parse("(N publishers+information+bureau)", 1).unwrap();
        assert_eq!(t.display_form(), "(N publishers_information_bureau)");
    }
}
