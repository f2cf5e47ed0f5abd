//! Dependency scoring, model combination and significance testing.

mod combine;
mod score;
mod sigtest;

pub use combine::{classify_edge, combine_models, EdgeClass, MweIndex, Scheme};
pub use score::{f1, read_counts, score, score_sentence, write_counts, Counts, EvalReport};
pub use sigtest::{format_p, shuffle_rng, sig_test, sig_test_exhaustive, SigTestResult, MAX_EXHAUSTIVE};
