//! Shooting from the segment `{0 <= u <= 1, v = 0}` and locating the initial
//! heights whose image lands back on `v = 0`.
//!
//! The pipeline is `build_gamma` (sample the image curve on a uniform grid of
//! initial heights), `find_brackets` (sign changes of the terminal `v`), and
//! `bisect_cline` (refine each bracket and certify the resulting profile).

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate, poincare_map, IntegratorConfig, PhasePoint, Trajectory};
use crate::problem::{neumann_necessary_integral, Problem};

pub const DEFAULT_RESOLUTION: usize = 2001;

/// Terminal `|v|` below which a grid entry is itself taken as a root.
pub const EXACT_ROOT_V: f64 = 1e-13;

/// Profiles whose `u` comes within this distance of 0 or 1 are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Bisection stops once the bracket is narrower than this.
    pub tol_r: f64,
    /// ... or once the terminal `|v|` drops below this.
    pub tol_v: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_r: 1e-12,
            tol_v: 1e-10,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        if !(self.tol_r > 0.0 && self.tol_v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerances {self:?} must be positive"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaEntry {
    pub r: f64,
    /// `None` when the integration from `(r, 0)` blew up.
    pub terminal: Option<PhasePoint>,
    /// Where the blow-up happened, if it did.
    pub blowup_x: Option<f64>,
}

impl GammaEntry {
    fn terminal_v(&self) -> Option<f64> {
        self.terminal.map(|z| z.v)
    }
}

/// Images of `(r, 0)` for `r` on a uniform grid of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaCurve {
    pub entries: Vec<GammaEntry>,
    pub resolution: usize,
}

impl GammaCurve {
    pub fn blowups(&self) -> usize {
        self.entries.iter().filter(|e| e.terminal.is_none()).count()
    }

    /// Number of sign alternations of the terminal `v` over interior entries.
    pub fn sign_changes(&self) -> usize {
        find_brackets(self).len()
    }

    /// `r,u_end,v_end,status` rows; blown-up rows carry `nan` and `blowup`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "r,u_end,v_end,status")?;
        for e in &self.entries {
            match e.terminal {
                Some(z) => writeln!(out, "{:.16e},{:.16e},{:.16e},ok", e.r, z.u, z.v)?,
                None => writeln!(out, "{:.16e},nan,nan,blowup", e.r)?,
            }
        }
        Ok(())
    }
}

/// Interval of initial heights over which the terminal `v` changes sign.
///
/// A degenerate bracket has `r_lo == r_hi` and marks a grid point that is a
/// root to within [`EXACT_ROOT_V`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub r_lo: f64,
    pub r_hi: f64,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl Bracket {
    pub fn is_degenerate(&self) -> bool {
        self.r_lo == self.r_hi
    }

    pub fn contains(&self, c: f64) -> bool {
        if self.is_degenerate() {
            c == self.r_lo
        } else {
            self.r_lo < c && c < self.r_hi
        }
    }
}

/// Why a converged root was not accepted as a cline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    /// The profile touches or leaves `(0, 1)`.
    LeavesUnitInterval,
    /// The terminal `|v|` stayed above `tol_v`.
    ResidualTooLarge,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::LeavesUnitInterval => write!(f, "profile leaves (0, 1)"),
            Rejection::ResidualTooLarge => write!(f, "terminal residual above tolerance"),
        }
    }
}

/// A Neumann solution with `p(omega1) = c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cline {
    pub c: f64,
    pub terminal_u: f64,
    pub terminal_v_residual: f64,
    #[serde(skip)]
    pub trajectory: Trajectory,
    pub min_u: f64,
    pub max_u: f64,
    pub necessary_integral: f64,
    pub bracket: Bracket,
}

pub fn build_gamma(p: &Problem, cfg: &IntegratorConfig, resolution: usize) -> Result<GammaCurve> {
    if resolution < 11 {
        return Err(Error::InvalidParameter(format!(
            "resolution {resolution} must be >= 11"
        )));
    }
    cfg.validate(p)?;
    let last = (resolution - 1) as f64;
    let entries = (0..resolution)
        .into_par_iter()
        .map(|i| {
            let r = i as f64 / last;
            match poincare_map(p, cfg, PhasePoint::new(r, 0.0)) {
                Ok(z) => Ok(GammaEntry {
                    r,
                    terminal: Some(z),
                    blowup_x: None,
                }),
                Err(Error::Blowup { x, .. }) => Ok(GammaEntry {
                    r,
                    terminal: None,
                    blowup_x: Some(x),
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaCurve {
        entries,
        resolution,
    })
}

/// Sign changes of the terminal `v` between adjacent interior entries.
///
/// The endpoints `r = 0` and `r = 1` are skipped, as are blown-up entries.
pub fn find_brackets(g: &GammaCurve) -> Vec<Bracket> {
    let n = g.entries.len();
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    let v_at = |i: usize| g.entries[i].terminal_v();
    let is_exact = |v: f64| v.abs() < EXACT_ROOT_V;
    for i in 1..n - 1 {
        let Some(v) = v_at(i) else { continue };
        let r = g.entries[i].r;
        if is_exact(v) {
            out.push(Bracket {
                r_lo: r,
                r_hi: r,
                v_lo: v,
                v_hi: v,
            });
            continue;
        }
        if i + 1 < n - 1 {
            if let Some(w) = v_at(i + 1) {
                if !is_exact(w) && v * w < 0.0 {
                    out.push(Bracket {
                        r_lo: r,
                        r_hi: g.entries[i + 1].r,
                        v_lo: v,
                        v_hi: w,
                    });
                }
            }
        }
    }
    out
}

fn terminal_v(p: &Problem, cfg: &IntegratorConfig, r: f64) -> Result<f64> {
    poincare_map(p, cfg, PhasePoint::new(r, 0.0))
        .map(|z| z.v)
        .map_err(|e| match e {
            Error::Blowup { x, .. } => Error::BracketLost { r, x },
            e => e,
        })
}

/// Bisects a bracket on `r -> terminal v` and certifies the resulting profile.
pub fn bisect_cline(
    p: &Problem,
    cfg: &IntegratorConfig,
    b: &Bracket,
    tol: &Tolerances,
) -> Result<Cline> {
    tol.validate()?;
    if !(b.r_lo <= b.r_hi && (b.is_degenerate() || b.v_lo * b.v_hi < 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "{b:?} is not a sign-change bracket"
        )));
    }
    let c = if b.is_degenerate() {
        b.r_lo
    } else {
        let (mut lo, mut hi, mut v_lo) = (b.r_lo, b.r_hi, b.v_lo);
        let mut root = None;
        for _ in 0..MAX_BISECTIONS {
            if hi - lo < tol.tol_r {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let v_mid = terminal_v(p, cfg, mid)?;
            if v_mid.abs() < tol.tol_v {
                root = Some(mid);
                break;
            }
            if (v_mid < 0.0) == (v_lo < 0.0) {
                lo = mid;
                v_lo = v_mid;
            } else {
                hi = mid;
            }
        }
        root.unwrap_or(0.5 * (lo + hi))
    };

    let trajectory = integrate(p, cfg, PhasePoint::new(c, 0.0)).map_err(|e| match e {
        Error::Blowup { x, .. } => Error::BracketLost { r: c, x },
        e => e,
    })?;
    let terminal = trajectory.terminal();
    let (min_u, max_u) = trajectory.u_range();
    let necessary_integral = neumann_necessary_integral(p, &trajectory)?;
    let cline = Cline {
        c,
        terminal_u: terminal.u,
        terminal_v_residual: terminal.v,
        trajectory,
        min_u,
        max_u,
        necessary_integral,
        bracket: *b,
    };
    let reason = if min_u <= BOUNDARY_MARGIN || max_u >= 1.0 - BOUNDARY_MARGIN {
        Some(Rejection::LeavesUnitInterval)
    } else if terminal.v.abs() >= tol.tol_v {
        Some(Rejection::ResidualTooLarge)
    } else {
        None
    };
    match reason {
        Some(reason) => Err(Error::ValidationFailed {
            cline: Box::new(cline),
            reason,
        }),
        None => Ok(cline),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedRoot {
    pub cline: Cline,
    pub reason: Rejection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketFailure {
    pub bracket: Bracket,
    pub error: String,
}

/// Result envelope of [`find_all_clines`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClineSearch {
    pub resolution: usize,
    pub gamma_blowups: usize,
    pub brackets: Vec<Bracket>,
    /// Validated clines sorted by `c`.
    pub clines: Vec<Cline>,
    pub rejected: Vec<RejectedRoot>,
    pub failures: Vec<BracketFailure>,
}

pub fn find_all_clines(
    p: &Problem,
    cfg: &IntegratorConfig,
    resolution: usize,
    tol: &Tolerances,
) -> Result<ClineSearch> {
    tol.validate()?;
    let gamma = build_gamma(p, cfg, resolution)?;
    let brackets = find_brackets(&gamma);

    let mut clines = Vec::new();
    let mut rejected = Vec::new();
    let mut failures = Vec::new();
    for b in &brackets {
        match bisect_cline(p, cfg, b, tol) {
            Ok(c) => clines.push(c),
            Err(Error::ValidationFailed { cline, reason }) => rejected.push(RejectedRoot {
                cline: *cline,
                reason,
            }),
            Err(e) => failures.push(BracketFailure {
                bracket: *b,
                error: e.to_string(),
            }),
        }
    }

    let min_gap = 10.0 * tol.tol_r;
    clines.sort_by(|a, b| a.c.total_cmp(&b.c));
    clines.dedup_by(|later, earlier| (later.c - earlier.c).abs() < min_gap);
    rejected.sort_by(|a, b| a.cline.c.total_cmp(&b.cline.c));
    rejected.dedup_by(|later, earlier| (later.cline.c - earlier.cline.c).abs() < min_gap);

    Ok(ClineSearch {
        resolution,
        gamma_blowups: gamma.blowups(),
        brackets,
        clines,
        rejected,
        failures,
    })
}
