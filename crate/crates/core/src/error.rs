use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        /// 1-based data row (the header is row 0).
        row: usize,
        column: String,
        message: String,
    },

    #[error("dataset has no records")]
    EmptyDataset,

    #[error("invalid attribute classification: {0}")]
    Classification(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("generalisation level {level} out of range for hierarchy with {levels} levels")]
    LevelRange { level: usize, levels: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("k = {k} exceeds the number of records n = {n}")]
    Infeasible { k: usize, n: usize },

    #[error("no generalisation is {k}-anonymous within a suppression budget of {max_suppression}")]
    NoFeasibleNode { k: usize, max_suppression: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid hierarchy: {0}")]
    Hierarchy(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at_stage(stage))
    }
}
