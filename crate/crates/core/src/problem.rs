//! Step weight, problem instances and the necessary-condition diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::nonlinearity::{check_f_star, FStarReport, Nonlinearity};

/// Piecewise-constant weight: `-alpha` on `[omega1, 0)` and `1` on `(0, omega2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepWeight {
    pub alpha: f64,
    pub omega1: f64,
    pub omega2: f64,
}

impl StepWeight {
    pub fn new(alpha: f64, omega1: f64, omega2: f64) -> Result<Self> {
        let w = StepWeight {
            alpha,
            omega1,
            omega2,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha={} must be > 0",
                self.alpha
            )));
        }
        if !(self.omega1.is_finite()
            && self.omega2.is_finite()
            && self.omega1 < 0.0
            && self.omega2 > 0.0)
        {
            return Err(Error::InvalidParameter(format!(
                "habitat [{}, {}] must satisfy omega1 < 0 < omega2",
                self.omega1, self.omega2
            )));
        }
        Ok(())
    }

    /// Weight at `x`. The value at the interface `x = 0` is taken from the
    /// right piece.
    pub fn weight_at(&self, x: f64) -> Result<f64> {
        if !(self.omega1..=self.omega2).contains(&x) {
            return Err(Error::OutOfDomain {
                x,
                omega1: self.omega1,
                omega2: self.omega2,
            });
        }
        Ok(if x < 0.0 { -self.alpha } else { 1.0 })
    }

    /// `alpha * omega1 + omega2`, the integral of the weight over the habitat.
    pub fn mean(&self) -> f64 {
        self.alpha * self.omega1 + self.omega2
    }

    pub fn left_len(&self) -> f64 {
        -self.omega1
    }

    pub fn right_len(&self) -> f64 {
        self.omega2
    }
}

pub fn weight_at(w: &StepWeight, x: f64) -> Result<f64> {
    w.weight_at(x)
}

pub fn weight_mean(w: &StepWeight) -> f64 {
    w.mean()
}

/// One Neumann problem `p'' + lambda w(x) f(p) = 0`, `p'(omega1) = p'(omega2) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub weight: StepWeight,
    pub f: Nonlinearity,
    pub lambda: f64,
}

impl Problem {
    pub fn new(weight: StepWeight, f: Nonlinearity, lambda: f64) -> Result<Self> {
        let p = Problem { weight, f, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.weight.validate()?;
        self.f.validate()?;
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda={} must be > 0",
                self.lambda
            )));
        }
        Ok(())
    }

    pub fn omega1(&self) -> f64 {
        self.weight.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.weight.omega2
    }
}

/// Verdicts on the hypotheses of the uniqueness conjecture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub weight_mean: f64,
    /// `w > 0` on a set of positive measure.
    pub positive_part: bool,
    pub negative_mean: bool,
    pub f_star: bool,
    pub ratio_decreasing: bool,
    pub f_report: FStarReport,
}

impl ConjectureReport {
    pub fn in_scope(&self) -> bool {
        self.positive_part && self.negative_mean && self.f_star && self.ratio_decreasing
    }
}

pub fn validate_conjecture_hypotheses(p: &Problem, grid_size: usize) -> Result<ConjectureReport> {
    let f_report = check_f_star(&p.f, grid_size)?;
    let weight_mean = p.weight.mean();
    Ok(ConjectureReport {
        weight_mean,
        // exact for a step weight: the positive piece is (0, omega2]
        positive_part: p.weight.omega2 > 0.0,
        negative_mean: weight_mean < 0.0,
        f_star: f_report.satisfies_f_star(),
        ratio_decreasing: f_report.ratio_strictly_decreasing,
        f_report,
    })
}

/// Trapezoidal `∫ w(x) f(u(x)) dx` over the trajectory samples.
///
/// The sum is split at the interface sample so no panel straddles `x = 0`.
/// For a Neumann solution the exact value is zero.
pub fn neumann_necessary_integral(p: &Problem, traj: &Trajectory) -> Result<f64> {
    const SPAN_TOL: f64 = 1e-12;
    let samples = traj.samples();
    let (first, last) = match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => (a.x, b.x),
        _ => return Err(Error::IncompleteTrajectory("no samples".into())),
    };
    if (first - p.omega1()).abs() > SPAN_TOL || (last - p.omega2()).abs() > SPAN_TOL {
        return Err(Error::IncompleteTrajectory(format!(
            "samples cover [{first}, {last}], habitat is [{}, {}]",
            p.omega1(),
            p.omega2()
        )));
    }
    let split = traj.split_index();
    if samples[split].x != 0.0 {
        return Err(Error::IncompleteTrajectory(
            "no sample at the interface x = 0".into(),
        ));
    }

    let trapezoid = |piece: &[crate::integrator::Sample], w: f64| -> f64 {
        piece
            .windows(2)
            .map(|s| 0.5 * (s[1].x - s[0].x) * (p.f.eval(s[0].point.u) + p.f.eval(s[1].point.u)))
            .sum::<f64>()
            * w
    };
    Ok(trapezoid(&samples[..=split], -p.weight.alpha) + trapezoid(&samples[split..], 1.0))
}
