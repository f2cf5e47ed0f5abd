//! Collapsing MWE units into single tokens in trees, dependency graphs and
//! token sequences.
//!
//! Tree collapsing only merges MWEs whose units are exactly the leaves of
//! one constituent; the merged leaf takes that constituent's category and
//! the MWE's lowercased `+`-joined form as its token. Other MWEs are
//! discarded. Dependency collapsing then deletes edges inside a merged MWE,
//! redirects edges that touch one, and renumbers everything.

use std::collections::HashMap;

use crate::category::Category;
use crate::error::{Error, Result};
use crate::mwe::MweOccurrence;
use crate::treebank::{Dependency, DependencySet, DerivationTree};

pub use crate::treebank::detect_cycles;

/// An MWE merged into a single leaf, with the category that leaf received.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeptMwe {
    pub occurrence: MweOccurrence,
    pub category: Category,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollapseOutcome {
    pub tree: DerivationTree,
    pub kept: Vec<KeptMwe>,
    pub discarded: Vec<MweOccurrence>,
    /// `index_map[original leaf] == collapsed leaf`.
    pub index_map: Vec<usize>,
}

impl CollapseOutcome {
    pub fn kept_occurrences(&self) -> Vec<MweOccurrence> {
        self.kept.iter().map(|k| k.occurrence.clone()).collect()
    }
}

fn check_disjoint(occurrences: &[MweOccurrence], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    for occ in occurrences {
        for &i in &occ.indices {
            if i >= len {
                return Err(Error::OccurrenceOutOfRange { index: i, len });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::OverlappingOccurrences { index: i });
            }
        }
    }
    Ok(())
}

/// Maps every original index to its position once each occurrence has been
/// merged into the slot of its first unit.
fn merged_index_map(len: usize, merged: &[&MweOccurrence]) -> Vec<usize> {
    let mut owner: Vec<Option<usize>> = vec![None; len];
    for (n, occ) in merged.iter().enumerate() {
        for &i in &occ.indices {
            owner[i] = Some(n);
        }
    }
    let mut map = vec![0; len];
    let mut first_slot: HashMap<usize, usize> = HashMap::new();
    let mut next = 0;
    for i in 0..len {
        match owner[i] {
            Some(n) => match first_slot.get(&n) {
                Some(&slot) => map[i] = slot,
                None => {
                    first_slot.insert(n, next);
                    map[i] = next;
                    next += 1;
                }
            },
            None => {
                map[i] = next;
                next += 1;
            }
        }
    }
    map
}

pub fn collapse_tree(tree: &DerivationTree, occurrences: &[MweOccurrence]) -> Result<CollapseOutcome> {
    let len = tree.leaf_count();
    check_disjoint(occurrences, len)?;

    let mut ordered: Vec<&MweOccurrence> = occurrences.iter().collect();
    ordered.sort_by_key(|o| o.start());

    // Decisions are taken on the original tree: with disjoint occurrences a
    // node covering exactly one MWE never contains another.
    let mut kept = Vec::new();
    let mut discarded = Vec::new();
    let mut replacements = Vec::new();
    for occ in ordered {
        let (path, spans_only) = tree.lowest_dominating_node(&occ.indices);
        if spans_only {
            let category = tree.node_at(&path).expect("path from the same tree").category.clone();
            replacements.push((path, DerivationTree::leaf(category.clone(), occ.joined())));
            kept.push(KeptMwe {
                occurrence: occ.clone(),
                category,
            });
        } else {
            discarded.push(occ.clone());
        }
    }

    let mut collapsed = tree.clone();
    for (path, leaf) in replacements {
        collapsed.replace_at(&path, leaf);
    }
    collapsed.reindex();

    let merged: Vec<&MweOccurrence> = kept.iter().map(|k| &k.occurrence).collect();
    let index_map = merged_index_map(len, &merged);
    Ok(CollapseOutcome {
        tree: collapsed,
        kept,
        discarded,
        index_map,
    })
}

/// Rewrites edges given, for every original index that belongs to a merged
/// MWE, the MWE's number, joined form, and (optionally) its category.
fn rewrite_edges(
    deps: &DependencySet,
    members: &HashMap<usize, (usize, String, Option<Category>)>,
    index_map: &[usize],
) -> Result<Vec<Dependency>> {
    let remap = |i: usize| {
        index_map.get(i).copied().ok_or_else(|| {
            Error::Inconsistent(format!(
                "dependency index {} outside a sentence of {} leaves",
                i,
                index_map.len()
            ))
        })
    };
    let mut out = Vec::with_capacity(deps.len());
    for dep in deps {
        let arg = members.get(&dep.argument);
        let fun = members.get(&dep.functor);
        if let (Some(a), Some(f)) = (arg, fun) {
            if a.0 == f.0 {
                // internal edge
                continue;
            }
        }
        let mut d: Dependency = dep.clone();
        if let Some((_, joined, _)) = arg {
            d.argument_word = joined.clone();
        }
        if let Some((_, joined, category)) = fun {
            d.functor_word = joined.clone();
            if let Some(cat) = category {
                d.functor_category = cat.clone();
            }
        }
        d.argument = remap(dep.argument)?;
        d.functor = remap(dep.functor)?;
        out.push(d);
    }
    Ok(out)
}

/// Collapses a gold dependency graph to match the tree collapse in `outcome`.
/// A functor endpoint that is merged takes the MWE's category.
pub fn collapse_dependencies(deps: &DependencySet, outcome: &CollapseOutcome) -> Result<DependencySet> {
    let mut members = HashMap::new();
    for (n, k) in outcome.kept.iter().enumerate() {
        let joined = k.occurrence.joined();
        for &i in &k.occurrence.indices {
            members.insert(i, (n, joined.clone(), Some(k.category.clone())));
        }
    }
    Ok(rewrite_edges(deps, &members, &outcome.index_map)?.into_iter().collect())
}

/// Replaces each occurrence by its joined form at the position of its first
/// unit. Returns the new tokens and the original-to-collapsed index map.
pub fn collapse_tokens(tokens: &[String], occurrences: &[MweOccurrence]) -> Result<(Vec<String>, Vec<usize>)> {
    check_disjoint(occurrences, tokens.len())?;
    let merged: Vec<&MweOccurrence> = occurrences.iter().collect();
    let map = merged_index_map(tokens.len(), &merged);
    let n = map.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![String::new(); n];
    for (i, tok) in tokens.iter().enumerate() {
        if out[map[i]].is_empty() {
            out[map[i]] = tok.clone();
        }
    }
    for occ in occurrences {
        out[map[occ.start()]] = occ.joined();
    }
    Ok((out, map))
}

/// Collapses every occurrence in a dependency graph, whether or not it is a
/// constituent. Functor categories are left unchanged since there is no
/// collapsed tree to supply one. Edges that become identical are merged.
pub fn collapse_all_dependencies(
    deps: &DependencySet,
    tokens: &[String],
    occurrences: &[MweOccurrence],
) -> Result<DependencySet> {
    Ok(collapse_edge_list(deps, tokens, occurrences)?.into_iter().collect())
}

/// Like [`collapse_all_dependencies`] but yields one rewritten edge per
/// non-internal input edge, in input order, without merging duplicates.
pub fn collapse_edge_list(
    deps: &DependencySet,
    tokens: &[String],
    occurrences: &[MweOccurrence],
) -> Result<Vec<Dependency>> {
    let (_, map) = collapse_tokens(tokens, occurrences)?;
    let mut members = HashMap::new();
    for (n, occ) in occurrences.iter().enumerate() {
        let joined = occ.joined();
        for &i in &occ.indices {
            members.insert(i, (n, joined.clone(), None));
        }
    }
    rewrite_edges(deps, &members, &map)
}
