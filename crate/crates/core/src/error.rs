use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    /// Mass on cells whose dyadic-annulus tail sum diverges for the requested exponents.
    #[error("support error: {count} cell(s) carry mass where the annulus sum diverges ({reason}); first offending cells (ix, iy): {cells:?}")]
    Support { count: usize, cells: Vec<(usize, usize)>, reason: String },

    #[error("predicate {name} violated: requires {inequality}; {detail}")]
    Predicate { name: &'static str, inequality: &'static str, detail: String },

    #[error("cost error: {0}")]
    Cost(String),

    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),

    #[error("degenerate weight: {0}")]
    DegenerateWeight(String),

    #[error("degenerate symbol: {0}")]
    DegenerateSymbol(String),

    #[error("unknown operator: {0}")]
    UnknownOperator(String),

    #[error("unknown kernel: {0}")]
    UnknownKernel(String),
}
