use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse category {text:?} at offset {offset}: {message}")]
    CategoryParse {
        text: String,
        offset: usize,
        message: String,
    },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },

    #[error("overlapping MWE occurrences at leaf {index}")]
    OverlappingOccurrences { index: usize },

    #[error("occurrence index {index} out of range for {len} leaves")]
    OccurrenceOutOfRange { index: usize, len: usize },

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("sentence ids differ between system and gold: {0}")]
    SentenceMismatch(String),

    #[error("{0}")]
    Invalid(String),

    #[error("stage {stage}{}: {source}", sentence.as_ref().map(|s| format!(", sentence {}", s)).unwrap_or_default())]
    Stage {
        stage: &'static str,
        sentence: Option<String>,
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Tags an error with the pipeline stage and sentence it came from.
    pub fn in_stage(self, stage: &'static str, sentence: Option<&str>) -> Self {
        Error::Stage {
            stage,
            sentence: sentence.map(str::to_string),
            source: Box::new(self),
        }
    }

    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }
}
