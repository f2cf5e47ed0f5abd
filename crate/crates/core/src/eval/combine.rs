use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::category::Category;
use crate::collapse::collapse_tokens;
use crate::error::{Error, Result};
use crate::mwe::{MweOccurrence, JOINER};
use crate::treebank::{Dependency, DependencySet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeClass {
    Internal,
    Mediating,
    External,
}

/// Which MWE, if any, each token position belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MweIndex {
    owner: Vec<Option<usize>>,
}

impl MweIndex {
    /// Positions on the original tokenization, from recognized occurrences.
    pub fn from_occurrences(len: usize, occurrences: &[MweOccurrence]) -> Self {
        let mut owner = vec![None; len];
        for (n, occ) in occurrences.iter().enumerate() {
            for &i in &occ.indices {
                if i < len {
                    owner[i] = Some(n);
                }
            }
        }
        MweIndex { owner }
    }

    /// Positions on a collapsed tokenization: every `+`-joined token is an MWE.
    pub fn from_collapsed_tokens(tokens: &[String]) -> Self {
        MweIndex {
            owner: tokens
                .iter()
                .enumerate()
                .map(|(i, t)| t.contains(JOINER).then_some(i))
                .collect(),
        }
    }

    pub fn mwe_of(&self, i: usize) -> Option<usize> {
        self.owner.get(i).copied().flatten()
    }
}

pub fn classify_edge(dep: &Dependency, index: &MweIndex) -> EdgeClass {
    match (index.mwe_of(dep.argument), index.mwe_of(dep.functor)) {
        (Some(a), Some(f)) if a == f => EdgeClass::Internal,
        (None, None) => EdgeClass::External,
        _ => EdgeClass::Mediating,
    }
}

/// How mediating edges are filled in when rebuilding an original-token
/// graph from a collapsed-token parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    MedFromA,
    RightmostMed,
    LeftmostMed,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::MedFromA, Scheme::RightmostMed, Scheme::LeftmostMed];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::MedFromA => "medFromA",
            Scheme::RightmostMed => "rightmostMed",
            Scheme::LeftmostMed => "leftmostMed",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scheme> {
        match s.trim().to_ascii_lowercase().as_str() {
            "medfroma" => Ok(Scheme::MedFromA),
            "rightmostmed" => Ok(Scheme::RightmostMed),
            "leftmostmed" => Ok(Scheme::LeftmostMed),
            _ => Err(Error::Invalid(format!("unknown combination scheme {:?}", s))),
        }
    }
}

/// Rebuilds a dependency graph over the original `tokens` from a baseline
/// parse `out_a` (original tokens) and a parse `out_b` of the tokens
/// collapsed with `occurrences`.
///
/// Internal edges always come from `out_a` and external edges from `out_b`.
/// Mediating edges come from `out_a` under [`Scheme::MedFromA`]; otherwise
/// `out_b`'s edge is reattached to the rightmost or leftmost unit, with the
/// functor category restored from `out_a` when that unit heads an edge there.
pub fn combine_models(
    out_a: &DependencySet,
    out_b: &DependencySet,
    tokens: &[String],
    occurrences: &[MweOccurrence],
    scheme: Scheme,
) -> Result<DependencySet> {
    let (collapsed, map) = collapse_tokens(tokens, occurrences)?;
    let mut units: Vec<Vec<usize>> = vec![Vec::new(); collapsed.len()];
    for (orig, &c) in map.iter().enumerate() {
        units[c].push(orig);
    }
    let index = MweIndex::from_occurrences(tokens.len(), occurrences);

    let mut out = DependencySet::new();
    for d in out_a {
        match classify_edge(d, &index) {
            EdgeClass::Internal => {
                out.insert(d.clone());
            }
            EdgeClass::Mediating if scheme == Scheme::MedFromA => {
                out.insert(d.clone());
            }
            _ => {}
        }
    }

    let lexcat_a: BTreeMap<usize, &Category> = out_a.iter().rev().map(|d| (d.functor, &d.functor_category)).collect();
    let expand = |c: usize| -> Result<(usize, bool)> {
        let u = units.get(c).filter(|u| !u.is_empty()).ok_or_else(|| {
            Error::Inconsistent(format!(
                "collapsed index {} outside a sentence of {} tokens",
                c,
                collapsed.len()
            ))
        })?;
        let pick = match scheme {
            Scheme::LeftmostMed => u[0],
            _ => *u.last().unwrap(),
        };
        Ok((pick, u.len() > 1))
    };
    for d in out_b {
        let (i, arg_mwe) = expand(d.argument)?;
        let (j, fun_mwe) = expand(d.functor)?;
        if (arg_mwe || fun_mwe) && scheme == Scheme::MedFromA {
            continue;
        }
        let category = if fun_mwe {
            lexcat_a
                .get(&j)
                .map_or_else(|| d.functor_category.clone(), |c| (*c).clone())
        } else {
            d.functor_category.clone()
        };
        out.insert(Dependency::new(
            i,
            j,
            category,
            d.slot,
            tokens[i].clone(),
            tokens[j].clone(),
        ));
    }
    Ok(out)
}
