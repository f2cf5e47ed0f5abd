//! Probabilistic CKY parsing, model training and dependency extraction.

mod chart;
mod deps;
mod model;
mod tagger;

pub use chart::{parse, parse_tagged, ChartStats, ParseResult};
pub use deps::{extract_dependencies, Extraction};
pub use model::{train, Expansion, ParserModel, RARE_THRESHOLD};
pub use tagger::{coarse_pos, pos_tag};
