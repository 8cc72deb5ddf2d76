use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),

    #[error("frequency {frequency_ghz} GHz is outside the tabulated range [{min_ghz}, {max_ghz}] GHz for {what}")]
    OutOfRange {
        what: String,
        frequency_ghz: f64,
        min_ghz: f64,
        max_ghz: f64,
    },

    #[error("no data for {0}")]
    MissingData(String),

    #[error("lossless medium has no finite penetration depth")]
    InfiniteDepth,

    #[error("depth {z_mm} mm lies outside the modelled domain")]
    OutsideDomain { z_mm: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("degenerate resonance in layer {layer}: 4α²k − h_b = {value:e}; use the finite-difference solver")]
    DegenerateResonance { layer: usize, value: f64 },

    #[error("{0}")]
    Usage(String),

    #[error("{standard} covers {min_ghz}-{max_ghz} GHz; {frequency_ghz} GHz is out of scope")]
    OutOfScope {
        standard: String,
        frequency_ghz: f64,
        min_ghz: f64,
        max_ghz: f64,
    },

    #[error("distance {distance_m} m is inside the far-field boundary at {boundary_m} m")]
    NearField { distance_m: f64, boundary_m: f64 },

    #[error("{what}: {message}")]
    Io { what: String, message: String },

    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
