use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("page {page}: undecodable bytes (not valid UTF-8)")]
    Undecodable { page: usize },

    #[error("expected {expected} corpus, got {actual}")]
    WrongSourceKind {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("line {line}: unknown entity type `{label}`")]
    UnknownEntityType { line: usize, label: String },

    #[error("mention `{surface}` ({doc_id}/{sentence_index} [{start}..{end}]): {message}")]
    OffsetMismatch {
        doc_id: String,
        sentence_index: usize,
        start: usize,
        end: usize,
        surface: String,
        message: String,
    },

    #[error("mixed entity types: {0} and {1}")]
    MixedTypes(String, String),

    #[error("no cluster for {etype} mention `{surface}`")]
    UnmappedMention { etype: String, surface: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown stream node `{0}`")]
    UnknownNode(String),

    #[error("GEXF: {0}")]
    Gexf(String),

    #[error("Sankey JSON: {0}")]
    Sankey(String),

    #[error("config: {0}")]
    Config(String),

    #[error("missing artifact {path}: run `{stage}` first")]
    MissingPrerequisite { stage: &'static str, path: PathBuf },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
