use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration or input data; nothing was run.
    #[error("validation: {0}")]
    Validation(String),

    /// The ODE state became non-finite.
    #[error("integration diverged at t = {time_s:.6e} s")]
    IntegrationDiverged { time_s: f64 },

    /// No gain value satisfies the conservative envelope constraint.
    #[error("infeasible fit: {0}")]
    InfeasibleFit(String),

    /// A bracketing root solve found no sign change.
    #[error("no root in bracket [{lo:.6e}, {hi:.6e}]")]
    NoRoot { lo: f64, hi: f64 },

    /// Statistic undefined on this input (e.g. zero variance).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Entropy certification produced less than the required minimum.
    #[error("certification below threshold: {0}")]
    BelowThreshold(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Process exit code contract: 1 validation, 2 stage failure,
    /// 3 certification below threshold.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 1,
            Error::BelowThreshold(_) => 3,
            Error::Stage { source, .. } => match source.as_ref() {
                Error::BelowThreshold(_) => 3,
                _ => 2,
            },
            _ => 2,
        }
    }
}
