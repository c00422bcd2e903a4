use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("c-function pole at lambda = {re} + {im}i (lambda in (tau/2)Z)")]
    Pole { re: f64, im: f64 },

    #[error("invalid vertex {word:?} for q = {q}: {detail}")]
    InvalidVertex { word: String, q: u32, detail: String },

    #[error("Helgason-Fourier sector at depth {depth} is not beyond support point {support}")]
    SectorTooShallow { depth: usize, support: String },

    #[error("tail certification failed: {0}")]
    Certification(String),

    #[error("quadrature did not converge: last change {last_change:e} with {nodes} nodes")]
    Quadrature { last_change: f64, nodes: usize },

    #[error("input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { op, detail: detail.into() }
}
