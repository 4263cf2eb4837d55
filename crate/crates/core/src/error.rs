use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("vacuous tree: nothing left after normalization")]
    VacuousTree,

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("empty sentence")]
    EmptySentence,

    #[error("illegal action {action}: {reason}")]
    IllegalAction { action: String, reason: String },

    #[error("underivable tree: {0}")]
    Underivable(String),

    #[error("none of the {0} training trees has a derivation")]
    NoDerivableTrees(usize),

    #[error("degenerate model for {0}: no feature survives the count cutoff")]
    DegenerateModel(String),

    #[error("{procedure} feature {feature} never fires on the training events")]
    UnsupportedFeature { procedure: String, feature: String },

    #[error("non-finite value during training of {procedure} at iteration {iteration}")]
    NonFinite { procedure: String, iteration: usize },

    #[error("model format: {0}")]
    ModelFormat(String),

    #[error("head rules: {0}")]
    HeadRules(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sentence {sentence}: tokens of proposed and gold trees differ after normalization")]
    Alignment { sentence: usize },

    #[error("no sentences to evaluate")]
    NoSentences,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
