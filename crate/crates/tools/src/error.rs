use chang_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_GATE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum ToolError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl ToolError {
    pub fn config(msg: impl Into<String>) -> Self {
        ToolError::Config(msg.into())
    }

    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ToolError::Core(Error::ResourceGate { .. } | Error::CapExceeded { .. }) => EXIT_GATE,
            _ => EXIT_CONFIG,
        }
    }
}
