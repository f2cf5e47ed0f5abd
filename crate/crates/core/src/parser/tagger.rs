//! Unigram POS tagging over a coarse tag set (N, V, P, D, ADV, PUNC).

use std::collections::BTreeMap;

use crate::category::{Category, Direction};
use crate::parser::model::ParserModel;

/// Coarse POS tag implied by a lexical category.
pub fn coarse_pos(cat: &Category) -> &'static str {
    if cat.is_punctuation() || cat.is_atom_named("conj") {
        return "PUNC";
    }
    if cat.is_determiner() {
        return "D";
    }
    if let (Some(result), Some(Direction::Forward), Some(arg)) = (cat.result(), cat.direction(), cat.argument()) {
        let takes_object = arg.is_atom_named("NP") || arg.is_atom_named("PP");
        if takes_object && (result.is_modifier() || result.is_atom_named("PP")) {
            return "P";
        }
    }
    if cat.is_modifier() {
        let base = cat.target();
        return if base.is_atom_named("N") || base.is_atom_named("NP") {
            "N"
        } else {
            "ADV"
        };
    }
    if cat.is_functor() && cat.target().is_atom_named("S") {
        return "V";
    }
    "N"
}

fn best_tag(counts: &BTreeMap<String, u64>) -> Option<&str> {
    // BTreeMap iterates tags in ascending order, so strict `>` keeps the
    // lexicographically smallest among equals.
    let mut best: Option<(&str, u64)> = None;
    for (tag, &c) in counts {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((tag, c));
        }
    }
    best.map(|(t, _)| t)
}

/// Most frequent training tag per token; unseen tokens fall back to their
/// lowercased form, then to the most frequent tag overall.
pub fn pos_tag(model: &ParserModel, tokens: &[String]) -> Vec<String> {
    let mut global: BTreeMap<String, u64> = BTreeMap::new();
    for tags in model.token_pos.values() {
        for (t, &c) in tags {
            *global.entry(t.clone()).or_default() += c;
        }
    }
    let fallback = best_tag(&global).unwrap_or("N").to_string();
    tokens
        .iter()
        .map(|tok| {
            model
                .token_pos
                .get(tok)
                .or_else(|| model.token_pos.get(&tok.to_lowercase()))
                .and_then(best_tag)
                .map_or_else(|| fallback.clone(), str::to_string)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Category {
        Category::parse(s).unwrap()
    }

    fn model(rows: &[(&str, &str, u64)]) -> ParserModel {
        let mut token_pos: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        for &(tok, tag, n) in rows {
            token_pos.entry(tok.into()).or_default().insert(tag.into(), n);
        }
        ParserModel::from_tables(
            0.0,
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
            token_pos,
        )
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn coarse_tags() {
        assert_eq!(coarse_pos(&c("N")), "N");
        assert_eq!(coarse_pos(&c("NP")), "N");
        assert_eq!(coarse_pos(&c("N/N")), "N");
        assert_eq!(coarse_pos(&c("NP/N")), "D");
        assert_eq!(coarse_pos(&c("(S\\NP)/NP")), "V");
        assert_eq!(coarse_pos(&c("S[dcl]\\NP")), "V");
        assert_eq!(coarse_pos(&c("(NP\\NP)/NP")), "P");
        assert_eq!(coarse_pos(&c("PP/NP")), "P");
        assert_eq!(coarse_pos(&c("((S\\NP)\\(S\\NP))/PP")), "P");
        assert_eq!(coarse_pos(&c("(S\\NP)\\(S\\NP)")), "ADV");
        assert_eq!(coarse_pos(&c(",")), "PUNC");
        assert_eq!(coarse_pos(&c(".")), "PUNC");
    }

    #[test]
    fn most_frequent_tag_wins() {
        let m = model(&[("run", "N", 3), ("run", "V", 1), ("the", "D", 9)]);
        assert_eq!(pos_tag(&m, &toks("run")), vec!["N"]);
    }

    #[test]
    fn unseen_tokens_use_lowercase_then_majority() {
        let m = model(&[("run", "V", 3), ("dog", "N", 2), ("cat", "N", 2)]);
        assert_eq!(pos_tag(&m, &toks("Run zebra")), vec!["V", "N"]);
    }

    #[test]
    fn ties_go_to_smallest_tag() {
        let m = model(&[("set", "V", 2), ("set", "N", 2), ("x", "ADV", 4), ("y", "P", 4)]);
        assert_eq!(pos_tag(&m, &toks("set unseen")), vec!["N", "ADV"]);
    }
}
