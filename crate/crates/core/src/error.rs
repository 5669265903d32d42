use thiserror::Error;

use crate::shooting::{Cline, Rejection};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("x = {x} lies outside the habitat [{omega1}, {omega2}]")]
    OutOfDomain { x: f64, omega1: f64, omega2: f64 },

    #[error("energy is undefined at the weight discontinuity x = 0")]
    AtInterface,

    #[error("trajectory does not span the habitat: {0}")]
    IncompleteTrajectory(String),

    /// The solution left the box `|u|, |v| <= bound`.
    #[error("integration blew up at x = {x} (bound {bound})")]
    Blowup { x: f64, bound: f64 },

    #[error("bracket lost: integration from r = {r} blew up at x = {x}")]
    BracketLost { r: f64, x: f64 },

    /// A converged root whose profile is not a cline; the record is kept.
    #[error("root at c = {} rejected: {reason}", cline.c)]
    ValidationFailed {
        cline: Box<Cline>,
        reason: Rejection,
    },
}
