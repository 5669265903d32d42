//! Selection nonlinearities `f` and a grid-based checker for their structural
//! hypotheses.
//!
//! Every family is an analytic expression defined on the whole real line, so
//! trajectories that leave `[0, 1]` during shooting can still be integrated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Default number of interior grid points used by [`check_f_star`].
pub const DEFAULT_GRID_SIZE: usize = 10_001;

/// Tagged family of selection terms.
///
/// JSON form: `{"kind": "degree_of_dominance", "k": 0.0}`, `{"kind": "hat", "h": 3.0}`,
/// `{"kind": "arctan_damped", "m": 10.0}` or `{"kind": "poly", "coeffs": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Nonlinearity {
    /// `s(1-s)(1+k-2ks)` with degree of dominance `-1 <= k <= 1`.
    #[serde(rename = "degree_of_dominance")]
    DegreeOfDominance { k: f64 },
    /// `s(1-s)(1-hs+hs^2)`.
    #[serde(rename = "hat")]
    Hat { h: f64 },
    /// `(10 s exp(-25 s^2) + s/(|s|+1)) * atan(m(1-s))`.
    #[serde(rename = "arctan_damped")]
    ArctanDamped { m: f64 },
    /// `sum coeffs[i] * s^i`, ascending powers.
    #[serde(rename = "poly")]
    CustomPolynomial { coeffs: Vec<f64> },
}

impl Nonlinearity {
    pub fn validate(&self) -> Result<()> {
        match self {
            Nonlinearity::DegreeOfDominance { k } if !(-1.0..=1.0).contains(k) => Err(
                Error::InvalidParameter(format!("degree of dominance k={k} outside [-1, 1]")),
            ),
            Nonlinearity::Hat { h } if !(h.is_finite() && *h > 0.0) => Err(
                Error::InvalidParameter(format!("hat parameter h={h} must be > 0")),
            ),
            Nonlinearity::ArctanDamped { m } if !(m.is_finite() && *m > 0.0) => Err(
                Error::InvalidParameter(format!("arctan damping m={m} must be > 0")),
            ),
            Nonlinearity::CustomPolynomial { coeffs } if coeffs.is_empty() => Err(
                Error::InvalidParameter("polynomial needs at least one coefficient".into()),
            ),
            Nonlinearity::CustomPolynomial { coeffs } if coeffs.iter().any(|c| !c.is_finite()) => {
                Err(Error::InvalidParameter(
                    "polynomial coefficients must be finite".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    /// Value of `f` at `s`.
    ///
    /// The factored forms are used for the named families so that `f(0)` and
    /// `f(1)` come out as exact zeros.
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::DegreeOfDominance { k } => s * (1.0 - s) * (1.0 + k - 2.0 * k * s),
            Nonlinearity::Hat { h } => s * (1.0 - s) * (1.0 - h * s + h * s * s),
            Nonlinearity::ArctanDamped { m } => arctan_parts(*m, s).value(),
            Nonlinearity::CustomPolynomial { coeffs } => horner(coeffs, s),
        }
    }

    /// First derivative `f'(s)`.
    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::ArctanDamped { m } => arctan_parts(*m, s).first(),
            _ => horner(&differentiate(&self.coefficients()), s),
        }
    }

    /// Second derivative `f''(s)`.
    ///
    /// For [`Nonlinearity::ArctanDamped`] the `s/(|s|+1)` term has a jump in
    /// its second derivative at `s = 0`; the mean of the one-sided limits is
    /// returned there.
    pub fn second_derivative(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::ArctanDamped { m } => arctan_parts(*m, s).second(),
            _ => horner(&differentiate(&differentiate(&self.coefficients())), s),
        }
    }

    /// Derivative of the requested order (1 or 2).
    pub fn eval_deriv(&self, s: f64, order: u8) -> Result<f64> {
        match order {
            1 => Ok(self.derivative(s)),
            2 => Ok(self.second_derivative(s)),
            _ => Err(Error::InvalidParameter(format!(
                "derivative order {order} not in {{1, 2}}"
            ))),
        }
    }

    /// Antiderivative `F` with `F(0) = 0`.
    ///
    /// Exact for the polynomial families. The arctan family is integrated with
    /// composite Gauss-Legendre quadrature on panels no wider than 1/32, which
    /// is accurate to round-off for the smooth integrand on either side of 0.
    pub fn primitive(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::ArctanDamped { .. } => {
                if s == 0.0 {
                    return 0.0;
                }
                let panels = (s.abs() * 32.0).ceil().max(1.0) as usize;
                GaussLegendre::new(12).composite(|t| self.eval(t), 0.0, s, panels)
            }
            _ => horner(&integrate(&self.coefficients()), s),
        }
    }

    /// Ascending power-basis coefficients of a polynomial family.
    ///
    /// Returns an empty vector for the arctan family.
    pub fn coefficients(&self) -> Vec<f64> {
        match self {
            // (1+k)s - (1+3k)s^2 + 2k s^3
            Nonlinearity::DegreeOfDominance { k } => vec![0.0, 1.0 + k, -(1.0 + 3.0 * k), 2.0 * k],
            // s - (1+h)s^2 + 2h s^3 - h s^4
            Nonlinearity::Hat { h } => vec![0.0, 1.0, -(1.0 + h), 2.0 * h, -h],
            Nonlinearity::CustomPolynomial { coeffs } => coeffs.clone(),
            Nonlinearity::ArctanDamped { .. } => Vec::new(),
        }
    }
}

fn horner(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

fn differentiate(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect()
}

fn integrate(coeffs: &[f64]) -> Vec<f64> {
    std::iter::once(0.0)
        .chain(coeffs.iter().enumerate().map(|(i, c)| c / (i as f64 + 1.0)))
        .collect()
}

/// `g(s) = 10 s e^{-25 s^2} + s/(|s|+1)` and `a(s) = atan(m(1-s))` with their
/// first two derivatives, evaluated once and combined by the product rule.
struct ArctanParts {
    g: [f64; 3],
    a: [f64; 3],
}

fn arctan_parts(m: f64, s: f64) -> ArctanParts {
    let gauss = (-25.0 * s * s).exp();
    let d = s.abs() + 1.0;
    let sign = if s == 0.0 { 0.0 } else { s.signum() };
    let g = [
        10.0 * s * gauss + s / d,
        10.0 * gauss * (1.0 - 50.0 * s * s) + 1.0 / (d * d),
        10.0 * gauss * (2500.0 * s * s * s - 150.0 * s) - 2.0 * sign / (d * d * d),
    ];
    let t = m * (1.0 - s);
    let q = 1.0 + t * t;
    let a = [t.atan(), -m / q, -2.0 * m * m * t / (q * q)];
    ArctanParts { g, a }
}

impl ArctanParts {
    fn value(&self) -> f64 {
        self.g[0] * self.a[0]
    }

    fn first(&self) -> f64 {
        self.g[1] * self.a[0] + self.g[0] * self.a[1]
    }

    fn second(&self) -> f64 {
        self.g[2] * self.a[0] + 2.0 * self.g[1] * self.a[1] + self.g[0] * self.a[2]
    }
}

/// Grid verdicts on the structural hypotheses of a nonlinearity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FStarReport {
    pub f_at_0: f64,
    pub f_at_1: f64,
    pub fprime_at_0: f64,
    pub fprime_at_1: f64,
    pub positive_on_open_interval: bool,
    pub is_concave: bool,
    pub ratio_strictly_decreasing: bool,
    pub grid_size: usize,
}

impl FStarReport {
    /// `f(0) = f(1) = 0`, `f > 0` on the grid, and `f'(0) > 0 > f'(1)`.
    pub fn satisfies_f_star(&self) -> bool {
        const ZERO_TOL: f64 = 1e-12;
        self.f_at_0.abs() <= ZERO_TOL
            && self.f_at_1.abs() <= ZERO_TOL
            && self.positive_on_open_interval
            && self.fprime_at_0 > 0.0
            && self.fprime_at_1 < 0.0
    }
}

/// Checks the structural hypotheses on the interior grid `s_i = i/(n+1)`,
/// `i = 1..=n`.
pub fn check_f_star(f: &Nonlinearity, grid_size: usize) -> Result<FStarReport> {
    if grid_size < 100 {
        return Err(Error::InvalidParameter(format!(
            "grid_size {grid_size} must be >= 100"
        )));
    }
    let denom = (grid_size + 1) as f64;
    let grid = || (1..=grid_size).map(|i| i as f64 / denom);

    let positive_on_open_interval = grid().all(|s| f.eval(s) > 0.0);
    let is_concave = grid().all(|s| f.second_derivative(s) <= 0.0);
    let ratios: Vec<f64> = grid().map(|s| f.eval(s) / s).collect();
    let ratio_strictly_decreasing = ratios.windows(2).all(|w| w[1] < w[0]);

    Ok(FStarReport {
        f_at_0: f.eval(0.0),
        f_at_1: f.eval(1.0),
        fprime_at_0: f.derivative(0.0),
        fprime_at_1: f.derivative(1.0),
        positive_on_open_interval,
        is_concave,
        ratio_strictly_decreasing,
        grid_size,
    })
}
