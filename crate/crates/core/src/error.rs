use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// A series or quadrature hit its iteration cap before meeting its tolerance.
    #[error("convergence error: {what} (reached {reached}, residual {residual:e})")]
    Convergence {
        what: &'static str,
        reached: usize,
        residual: f64,
    },

    /// A simulation configuration violates its invariants.
    #[error("configuration error: {0}")]
    Config(&'static str),
}
