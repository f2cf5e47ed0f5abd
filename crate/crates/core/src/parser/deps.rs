use crate::category::{BinaryRule, Category};
use crate::treebank::{Dependency, DependencySet, DerivationTree, Node, NodeRule};

/// Dependencies read off a derivation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub dependencies: Vec<Dependency>,
    /// Edges dropped because the argument slot does not exist on the
    /// head's lexical category.
    pub skipped_edges: usize,
    /// Binary nodes not licensed by any combinator.
    pub non_derivable: usize,
}

impl Extraction {
    pub fn into_set(self) -> DependencySet {
        self.dependencies.into_iter().collect()
    }
}

/// Predicate-argument dependencies of a derivation.
///
/// Each application or composition node links every head of the argument
/// child to every head of the functor child. Modifiers (`X|X`) and
/// determiners pass the argument's heads up; coordination unions the heads
/// of both conjuncts.
pub fn extract_dependencies(tree: &DerivationTree) -> Extraction {
    let leaves: Vec<(usize, &str)> = tree.leaves();
    let lexcats = tree.lexical_categories();
    let mut out = Extraction::default();
    walk(tree, &leaves, &lexcats, &mut out);
    out
}

fn walk(t: &DerivationTree, leaves: &[(usize, &str)], lexcats: &[&Category], out: &mut Extraction) -> Vec<usize> {
    match &t.node {
        Node::Leaf { index, .. } => vec![*index],
        Node::Unary(c) => walk(c, leaves, lexcats, out),
        Node::Binary(l, r) => {
            let lh = walk(l, leaves, lexcats, out);
            let rh = walk(r, leaves, lexcats, out);
            let (functor, fh, ah) = match t.rule() {
                NodeRule::Binary(BinaryRule::ForwardApplication | BinaryRule::ForwardComposition) => (l, lh, rh),
                NodeRule::Binary(BinaryRule::BackwardApplication | BinaryRule::BackwardComposition) => (r, rh, lh),
                NodeRule::Binary(BinaryRule::ConjunctMarking | BinaryRule::LeftPunctuation) => return rh,
                NodeRule::Binary(BinaryRule::RightPunctuation) => return lh,
                NodeRule::Binary(BinaryRule::Coordination) => {
                    let mut heads = lh;
                    heads.extend(rh);
                    heads.sort_unstable();
                    heads.dedup();
                    return heads;
                }
                NodeRule::NonDerivable => {
                    out.non_derivable += 1;
                    return lh;
                }
                NodeRule::Lexical | NodeRule::Unary => unreachable!("binary node"),
            };
            let slot = functor.category.arity();
            for &j in &fh {
                let cat_j = lexcats[j];
                if slot == 0 || slot > cat_j.arity() {
                    out.skipped_edges += ah.len();
                    continue;
                }
                for &i in &ah {
                    out.dependencies
                        .push(Dependency::new(i, j, cat_j.clone(), slot, leaves[i].1, leaves[j].1));
                }
            }
            if functor.category.is_modifier() || functor.category.is_determiner() {
                ah
            } else {
                fh
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(s: &str) -> DerivationTree {
        DerivationTree::parse(s, 1).unwrap()
    }

    fn triples(e: &Extraction) -> Vec<(usize, usize, usize)> {
        let mut v: Vec<_> = e.dependencies.iter().map(|d| (d.argument, d.functor, d.slot)).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn transitive_verb() {
        let e = extract_dependencies(&tree("(S (NP John) (S\\NP ((S\\NP)/NP buys) (NP shares)))"));
        assert_eq!(triples(&e), vec![(0, 1, 1), (2, 1, 2)]);
        assert_eq!(e.dependencies[0].functor_word, "buys");
    }

    #[test]
    fn modifier_and_determiner_pass_heads() {
        let e = extract_dependencies(&tree(
            "(S (NP (NP/N the) (N (N/N big) (N dog))) (S\\NP (S\\NP barks) ((S\\NP)\\(S\\NP) loudly)))",
        ));
        assert_eq!(triples(&e), vec![(2, 0, 1), (2, 1, 1), (2, 3, 1), (3, 4, 2)]);
    }

    #[test]
    fn coordination_distributes() {
        let e = extract_dependencies(&tree(
            "(S (NP (NP cats) (NP[conj] (conj and) (NP dogs))) (S\\NP sleep))",
        ));
        assert_eq!(triples(&e), vec![(0, 3, 1), (2, 3, 1)]);
    }

    #[test]
    fn non_derivable_nodes_are_counted() {
        let e = extract_dependencies(&tree("(S (NP a) (NP b))"));
        assert_eq!(e.non_derivable, 1);
        assert!(e.dependencies.is_empty());
    }

    #[test]
    fn composition_links_primary() {
        // will buy: (S\NP)/(S\NP) composed with (S\NP)/NP
        let e = extract_dependencies(&tree(
            "(S (NP I) (S\\NP ((S\\NP)/NP ((S\\NP)/(S\\NP) will) ((S\\NP)/NP buy)) (NP it)))",
        ));
        assert_eq!(triples(&e), vec![(0, 2, 1), (2, 1, 2), (3, 2, 2)]);
    }
}
