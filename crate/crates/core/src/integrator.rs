//! Fixed-step RK4 for the planar system `u' = v`, `v' = -lambda w(x) f(u)`.
//!
//! The habitat is split at the weight discontinuity `x = 0`. Each side gets
//! its own uniform step, chosen as the largest value not above the target
//! that divides the side exactly, so `omega1`, `0` and `omega2` are all grid
//! nodes. The state is carried across the interface unchanged.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub u: f64,
    pub v: f64,
}

impl PhasePoint {
    pub const fn new(u: f64, v: f64) -> Self {
        PhasePoint { u, v }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    /// Euclidean distance.
    pub fn dist(&self, other: &PhasePoint) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }

    fn axpy(&self, h: f64, d: &PhasePoint) -> PhasePoint {
        PhasePoint::new(self.u + h * d.u, self.v + h * d.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: f64,
    pub point: PhasePoint,
}

/// Sampled solution from `omega1` to `omega2`, with one sample exactly at `x = 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    samples: Vec<Sample>,
    left_step: f64,
    right_step: f64,
    split_index: usize,
}

impl Trajectory {
    pub fn from_parts(
        samples: Vec<Sample>,
        left_step: f64,
        right_step: f64,
        split_index: usize,
    ) -> Self {
        Trajectory {
            samples,
            left_step,
            right_step,
            split_index,
        }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn left_step(&self) -> f64 {
        self.left_step
    }

    pub fn right_step(&self) -> f64 {
        self.right_step
    }

    /// Index of the sample at the interface `x = 0`.
    pub fn split_index(&self) -> usize {
        self.split_index
    }

    pub fn terminal(&self) -> PhasePoint {
        self.samples.last().map(|s| s.point).unwrap_or_default()
    }

    /// `(min u, max u)` over all samples.
    pub fn u_range(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.point.u), hi.max(s.point.u))
            })
    }

    /// Writes `x,u,v` rows, keeping every `decimate`-th sample plus the last one.
    /// Values carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W, decimate: usize) -> io::Result<()> {
        let decimate = decimate.max(1);
        writeln!(out, "x,u,v")?;
        let last = self.samples.len().saturating_sub(1);
        for (i, s) in self.samples.iter().enumerate() {
            if i % decimate == 0 || i == last {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", s.x, s.point.u, s.point.v)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub target_step: f64,
    /// Integration aborts once `|u|` or `|v|` exceeds this.
    pub blowup_bound: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            target_step: 1e-4,
            blowup_bound: 1e3,
        }
    }
}

impl IntegratorConfig {
    pub fn with_step(target_step: f64) -> Self {
        IntegratorConfig {
            target_step,
            ..Default::default()
        }
    }

    /// Largest admissible step for a problem: a hundredth of the habitat.
    pub fn max_step(p: &Problem) -> f64 {
        (p.omega2() - p.omega1()) / 100.0
    }

    pub fn validate(&self, p: &Problem) -> Result<()> {
        if !(self.target_step.is_finite() && self.target_step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step {} must be > 0",
                self.target_step
            )));
        }
        let max = Self::max_step(p);
        if self.target_step > max * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "step {} exceeds the largest admissible step {max} for this habitat",
                self.target_step
            )));
        }
        if self.blowup_bound.is_nan() || self.blowup_bound <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "blow-up bound {} must be > 0",
                self.blowup_bound
            )));
        }
        Ok(())
    }
}

/// The constant-weight pieces of the habitat.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    Left,
    Right,
}

impl Piece {
    pub fn weight(self, p: &Problem) -> f64 {
        match self {
            Piece::Left => -p.weight.alpha,
            Piece::Right => 1.0,
        }
    }
}

/// `(v, -lambda w(x) f(u))`, with the right piece's weight at `x = 0`.
pub fn vector_field(p: &Problem, x: f64, z: PhasePoint) -> PhasePoint {
    let piece = if x < 0.0 { Piece::Left } else { Piece::Right };
    field(p, piece.weight(p), z)
}

#[inline]
fn field(p: &Problem, w: f64, z: PhasePoint) -> PhasePoint {
    PhasePoint::new(z.v, -p.lambda * w * p.f.eval(z.u))
}

#[inline]
fn rk4_step(p: &Problem, w: f64, z: PhasePoint, h: f64) -> PhasePoint {
    let k1 = field(p, w, z);
    let k2 = field(p, w, z.axpy(0.5 * h, &k1));
    let k3 = field(p, w, z.axpy(0.5 * h, &k2));
    let k4 = field(p, w, z.axpy(h, &k3));
    PhasePoint::new(
        z.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
        z.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
    )
}

/// Number of equal steps covering `len` with a step no larger than `target`.
fn step_count(len: f64, target: f64) -> usize {
    // tolerate round-off in len/target so exact divisors are not bumped up
    ((len / target) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

struct PieceGrid {
    piece: Piece,
    start: f64,
    end: f64,
    steps: usize,
    h: f64,
}

impl PieceGrid {
    fn node(&self, i: usize) -> f64 {
        if i == self.steps {
            self.end
        } else {
            self.start + i as f64 * self.h
        }
    }
}

fn pieces(p: &Problem, cfg: &IntegratorConfig) -> [PieceGrid; 2] {
    let make = |piece, start: f64, end: f64| {
        let steps = step_count(end - start, cfg.target_step);
        PieceGrid {
            piece,
            start,
            end,
            steps,
            h: (end - start) / steps as f64,
        }
    };
    [
        make(Piece::Left, p.omega1(), 0.0),
        make(Piece::Right, 0.0, p.omega2()),
    ]
}

/// Marches from `omega1` to `omega2`, reporting every node after the first to `visit`.
fn march(
    p: &Problem,
    cfg: &IntegratorConfig,
    z0: PhasePoint,
    mut visit: impl FnMut(f64, PhasePoint),
) -> Result<PhasePoint> {
    cfg.validate(p)?;
    if !z0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "initial point {z0:?} is not finite"
        )));
    }
    let mut z = z0;
    for grid in pieces(p, cfg) {
        let w = grid.piece.weight(p);
        for i in 1..=grid.steps {
            z = rk4_step(p, w, z, grid.h);
            let x = grid.node(i);
            if !(z.u.abs() <= cfg.blowup_bound && z.v.abs() <= cfg.blowup_bound) {
                return Err(Error::Blowup {
                    x,
                    bound: cfg.blowup_bound,
                });
            }
            visit(x, z);
        }
    }
    Ok(z)
}

/// Solves the Cauchy problem from `z0` at `x = omega1` and keeps every node.
pub fn integrate(p: &Problem, cfg: &IntegratorConfig, z0: PhasePoint) -> Result<Trajectory> {
    let [left, right] = pieces(p, cfg);
    let mut samples = Vec::with_capacity(left.steps + right.steps + 1);
    samples.push(Sample {
        x: p.omega1(),
        point: z0,
    });
    march(p, cfg, z0, |x, point| samples.push(Sample { x, point }))?;
    Ok(Trajectory {
        samples,
        left_step: left.h,
        right_step: right.h,
        split_index: left.steps,
    })
}

/// Image of `z0` under the map from `x = omega1` to `x = omega2`.
pub fn poincare_map(p: &Problem, cfg: &IntegratorConfig, z0: PhasePoint) -> Result<PhasePoint> {
    march(p, cfg, z0, |_, _| {})
}

/// `v^2/2 + lambda w F(u)` on one constant-weight piece, `F' = f`, `F(0) = 0`.
/// Conserved by exact solutions within the piece.
pub fn piece_energy(p: &Problem, piece: Piece, z: PhasePoint) -> f64 {
    0.5 * z.v * z.v + p.lambda * piece.weight(p) * p.f.primitive(z.u)
}

/// [`piece_energy`] with the piece selected by the sign of `x`.
pub fn piecewise_energy(p: &Problem, x: f64, z: PhasePoint) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::AtInterface);
    }
    let piece = if x < 0.0 { Piece::Left } else { Piece::Right };
    Ok(piece_energy(p, piece, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::Nonlinearity;
    use crate::problem::StepWeight;

    fn prop1() -> Problem {
        Problem::new(
            StepWeight::new(1.0, -0.21, 0.2).unwrap(),
            Nonlinearity::Hat { h: 3.0 },
            45.0,
        )
        .unwrap()
    }

    fn prop2() -> Problem {
        Problem::new(
            StepWeight::new(2.4, -0.255, 0.6).unwrap(),
            Nonlinearity::ArctanDamped { m: 10.0 },
            3.0,
        )
        .unwrap()
    }

    #[test]
    fn field_values() {
        let p = prop1();
        assert_eq!(
            vector_field(&p, 0.1, PhasePoint::new(0.0, 0.0)),
            PhasePoint::new(0.0, 0.0)
        );
        assert_eq!(
            vector_field(&p, -0.1, PhasePoint::new(1.0, 0.0)),
            PhasePoint::new(0.0, -0.0)
        );
        let z = vector_field(&p, 0.1, PhasePoint::new(0.5, 0.0));
        assert_eq!(z.u, 0.0);
        assert!((z.v + 2.8125).abs() < 1e-14);
        // left piece flips the sign through w = -alpha
        let z = vector_field(&p, -0.1, PhasePoint::new(0.5, 0.3));
        assert_eq!(z.u, 0.3);
        assert!((z.v - 2.8125).abs() < 1e-14);
    }

    #[test]
    fn step_counts_divide_exactly() {
        assert_eq!(step_count(0.21, 1e-4), 2100);
        assert_eq!(step_count(0.2, 1e-4), 2000);
        assert_eq!(step_count(0.21, 0.01 / 3.0), 63);
        assert_eq!(step_count(0.255, 1e-4), 2550);
        assert_eq!(step_count(0.6, 7e-4), 858);
    }

    #[test]
    fn grid_layout() {
        let p = prop1();
        let t = integrate(&p, &IntegratorConfig::default(), PhasePoint::new(0.3, 0.0)).unwrap();
        let s = t.samples();
        assert_eq!(s.len(), 4101);
        assert_eq!(s[0].x, -0.21);
        assert_eq!(s[t.split_index()].x, 0.0);
        assert_eq!(s.last().unwrap().x, 0.2);
        for (i, w) in s.windows(2).enumerate() {
            let h = if i < t.split_index() {
                t.left_step()
            } else {
                t.right_step()
            };
            assert!((w[1].x - w[0].x - h).abs() < 1e-12);
        }
        assert_eq!(
            t.terminal(),
            poincare_map(&p, &IntegratorConfig::default(), PhasePoint::new(0.3, 0.0)).unwrap()
        );
    }

    #[test]
    fn equilibria_are_fixed() {
        for p in [prop1(), prop2()] {
            for u in [0.0, 1.0] {
                let t =
                    integrate(&p, &IntegratorConfig::default(), PhasePoint::new(u, 0.0)).unwrap();
                assert!(t
                    .samples()
                    .iter()
                    .all(|s| s.point == PhasePoint::new(u, 0.0)));
            }
        }
    }

    #[test]
    fn blowup_is_reported_with_exit_location() {
        let p = prop1();
        let cfg = IntegratorConfig {
            blowup_bound: 2.0,
            ..Default::default()
        };
        match integrate(&p, &cfg, PhasePoint::new(0.5, 5.0)) {
            Err(Error::Blowup { x, bound }) => {
                assert_eq!(bound, 2.0);
                assert!(x > p.omega1() && x <= p.omega2());
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
        assert!(matches!(
            poincare_map(
                &p,
                &IntegratorConfig::default(),
                PhasePoint::new(f64::NAN, 0.0)
            ),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn step_above_hundredth_of_habitat_is_rejected() {
        let p = prop1();
        assert!(IntegratorConfig::with_step(0.0041).validate(&p).is_ok());
        assert!(IntegratorConfig::with_step(0.005).validate(&p).is_err());
        assert!(IntegratorConfig::with_step(-1.0).validate(&p).is_err());
    }

    #[test]
    fn energy_at_interface_is_rejected() {
        let p = prop1();
        assert!(matches!(
            piecewise_energy(&p, 0.0, PhasePoint::new(0.1, 0.1)),
            Err(Error::AtInterface)
        ));
        assert_eq!(
            piecewise_energy(&p, -0.1, PhasePoint::default()).unwrap(),
            0.0
        );
        assert_eq!(
            piecewise_energy(&p, 0.1, PhasePoint::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn csv_layout() {
        let p = prop1();
        let t = integrate(&p, &IntegratorConfig::default(), PhasePoint::new(0.2, 0.0)).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf, 1000).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "x,u,v");
        // rows 0, 1000, ..., 4000 and the last sample 4100
        assert_eq!(lines.len(), 1 + 5 + 1);
        assert!(
            lines[1].starts_with("-2.1000000000000002e-1")
                || lines[1].starts_with("-2.0999999999999999e-1")
        );
        assert!(lines.last().unwrap().starts_with("2.0000000000000001e-1"));
    }
}
