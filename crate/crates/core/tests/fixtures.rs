mod common;

use common::{data, read_data, toks};
use mwe_ccg::collapse::{collapse_dependencies, collapse_tree};
use mwe_ccg::mwe::{read_occurrences, recognize, MweOccurrence, RecognizerConfig};
use mwe_ccg::parser::extract_dependencies;
use mwe_ccg::treebank::{read_dependencies, read_lexicon, read_treebank, DerivationTree, MweKind};
use std::fs::File;
use std::io::BufReader;

fn tree(name: &str) -> DerivationTree {
    DerivationTree::parse(read_data(name).trim(), 1).unwrap()
}

fn occurrence(indices: &[usize], units: &str, kind: MweKind) -> MweOccurrence {
    MweOccurrence::new(indices.to_vec(), toks(units), kind)
}

#[test]
fn sibling_subtree_collapses_to_one_leaf() {
    let t = tree("fixtures/original_subtree.txt");
    let occ = occurrence(&[0, 1, 2], "Publishers Information Bureau", MweKind::ProperNoun);
    let out = collapse_tree(&t, &[occ]).unwrap();
    assert_eq!(
        out.tree.display_form(),
        read_data("fixtures/collapsed_subtree.txt").trim()
    );
    assert_eq!(out.tree.to_string(), "(N publishers+information+bureau)");
    assert_eq!(out.kept.len(), 1);
}

#[test]
fn non_sibling_units_are_discarded() {
    let t = tree("fixtures/non_sibling.txt");
    let according = occurrence(&[0, 1], "according to", MweKind::General);
    let out = collapse_tree(&t, std::slice::from_ref(&according)).unwrap();
    assert_eq!(out.discarded, vec![according]);
    assert!(out.kept.is_empty());
    assert_eq!(out.tree, t);
}

#[test]
fn dep1_tree_yields_the_dep1_graph() {
    let records = read_treebank(BufReader::new(File::open(data("fixtures/dep1_tree.txt")).unwrap())).unwrap();
    let ex = extract_dependencies(records[0].tree.as_ref().unwrap());
    let gold = read_dependencies(BufReader::new(File::open(data("fixtures/dep1.deps")).unwrap())).unwrap();
    assert_eq!(ex.dependencies.len(), 10);
    assert_eq!(ex.into_set(), gold[0].1);
}

#[test]
fn dep1_collapses_to_dep2() {
    let records = read_treebank(BufReader::new(File::open(data("fixtures/dep1_tree.txt")).unwrap())).unwrap();
    let dep1 = read_dependencies(BufReader::new(File::open(data("fixtures/dep1.deps")).unwrap())).unwrap();
    let dep2 = read_dependencies(BufReader::new(File::open(data("fixtures/dep2.deps")).unwrap())).unwrap();
    let occs = read_occurrences(BufReader::new(
        File::open(data("fixtures/dep1_occurrences.tsv")).unwrap(),
    ))
    .unwrap();
    let outcome = collapse_tree(records[0].tree.as_ref().unwrap(), &occs["dep1"]).unwrap();
    assert_eq!(outcome.kept.len(), 2);
    let collapsed = collapse_dependencies(&dep1[0].1, &outcome).unwrap();
    assert_eq!(collapsed.len(), 8);
    assert_eq!(collapsed, dep2[0].1);
}

#[test]
fn spoon_sentence_with_first_recognizer() {
    let lexicon = read_lexicon(BufReader::new(File::open(data("lexicon.tsv")).unwrap())).unwrap();
    let tokens = toks(&read_data("fixtures/spoon_sentence.txt"));
    let found = recognize(&lexicon, &tokens, &RecognizerConfig::preset("rec1").unwrap());
    let mut joined: Vec<String> = found.iter().map(MweOccurrence::joined).collect();
    joined.sort();
    assert_eq!(
        joined,
        ["according+to", "mr.+spoon", "publishers+information+bureau", "shore+up"]
    );
}
