//! Clines of the one-dimensional indefinite-weight Neumann problem
//!
//! ```text
//! p'' + lambda w(x) f(p) = 0 on ]omega1, omega2[,   p'(omega1) = p'(omega2) = 0,
//! ```
//!
//! with a step weight `w = -alpha` left of 0 and `w = 1` right of 0, computed by
//! shooting in the phase plane `(u, v) = (p, p')`.
//!
//! ```no_run
//! use cline_core::{find_all_clines, proposition_1, IntegratorConfig, Tolerances};
//!
//! let inst = proposition_1();
//! let search = find_all_clines(&inst.problem, &IntegratorConfig::default(), 2001, &Tolerances::default())?;
//! for c in &search.clines {
//!     println!("p(omega1) = {:.6}, p(omega2) = {:.6}", c.c, c.terminal_u);
//! }
//! # Ok::<(), cline_core::Error>(())
//! ```

pub mod error;
pub mod integrator;
pub mod nonlinearity;
pub mod problem;
pub mod reproduction;
pub mod shooting;

mod quadrature;

pub use error::{Error, Result};
pub use integrator::{
    integrate, piece_energy, piecewise_energy, poincare_map, vector_field, IntegratorConfig,
    PhasePoint, Piece, Sample, Trajectory,
};
pub use nonlinearity::{check_f_star, FStarReport, Nonlinearity, DEFAULT_GRID_SIZE};
pub use problem::{
    neumann_necessary_integral, validate_conjecture_hypotheses, weight_at, weight_mean,
    ConjectureReport, Problem, StepWeight,
};
pub use reproduction::{
    compare, lambda_sweep, proposition_1, proposition_2, remark_instances, ComparisonReport,
    CountExpectation, NamedInstance,
};
pub use shooting::{
    bisect_cline, build_gamma, find_all_clines, find_brackets, Bracket, Cline, ClineSearch,
    GammaCurve, GammaEntry, Rejection, Tolerances, DEFAULT_RESOLUTION,
};
