mod common;

use common::FuzzGrammar;
use mwe_ccg::parser::parse_tagged;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn viterbi_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut checked, mut parsed) = (0, 0);
    while checked < 300 {
        let g = FuzzGrammar::random(&mut rng);
        let model = g.model();
        for _ in 0..4 {
            let (tokens, tags) = FuzzGrammar::random_sentence(&mut rng);
            let Some(best) = g.brute_force_best(&tokens, &tags, 50_000) else {
                continue;
            };
            let result = parse_tagged(&model, &tokens, &tags);
            match (best, &result.tree) {
                (None, None) => {}
                (Some(b), Some(tree)) => {
                    assert!(
                        (result.log_prob - b).abs() < 1e-9,
                        "{} vs {} on {:?}",
                        result.log_prob,
                        b,
                        tokens
                    );
                    let own = g
                        .tree_score(tree, &tags)
                        .expect("returned tree has non-zero probability");
                    assert!((own - b).abs() < 1e-9);
                    parsed += 1;
                }
                (b, t) => panic!("oracle {:?} vs parser {:?} on {:?}", b, t, tokens),
            }
            checked += 1;
        }
    }
    assert!(parsed > 30, "too few parseable cases: {}", parsed);
}
