//! Multiword-expression recognition and collapsing for CCG treebanks, with
//! a PCFG-style CCG parser and dependency-based evaluation.

pub mod category;
pub mod collapse;
pub mod error;
pub mod eval;
pub mod exec;
pub mod mwe;
pub mod parser;
pub mod pipeline;
pub mod treebank;

pub use category::{BinaryRule, Category, Direction};
pub use error::{Error, Result};
