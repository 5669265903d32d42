#![allow(dead_code)]

use cline_core::{
    integrate, piece_energy, poincare_map, IntegratorConfig, PhasePoint, Piece, Problem, Trajectory,
};

/// Terminal points from an adaptive DOP853 run (rtol 1e-13, atol 1e-15),
/// as `(r, u_end, v_end)`.
pub const PROP1_REFERENCE: [(f64, f64, f64); 4] = [
    (0.1, 0.230070661296682, -0.066490495164843),
    (0.4, 0.533355998561072, 0.055104917913590),
    (0.65, 0.790498810899061, -0.036479672881305),
    (0.75, 0.922471754008822, 0.164835225412672),
];

pub const PROP2_REFERENCE: [(f64, f64, f64); 4] = [
    (0.01, -0.106696028125790, -0.638990645631200),
    (0.1, 1.518915886801151, 2.159730597625921),
    (0.45, 0.807966968123612, -0.035502551717626),
    (0.9, 1.477331989372044, 1.39228174022522),
];

/// Roots of `r -> v_end` from the same adaptive integrator refined by Brent's
/// method, as `(c, u_end)`.
pub const PROP1_ROOTS: [(f64, f64); 3] = [
    (0.1249669019082, 0.2733701752695),
    (0.4794208114567, 0.6014283181159),
    (0.6832023330791, 0.8335026779670),
];

pub const PROP2_ROOTS: [(f64, f64); 4] = [
    (0.0021618826229, -0.0312450190945),
    (0.0181514667705, 0.4357255808005),
    (0.3834544194845, 0.7760111274889),
    (0.4875775941584, 0.8542873597858),
];

/// Largest relative energy drift `max |H - H0| / max(1, |H0|)` over the two
/// constant-weight pieces of a trajectory.
pub fn energy_drift(p: &Problem, t: &Trajectory) -> f64 {
    let s = t.samples();
    let split = t.split_index();
    [(Piece::Left, &s[..=split]), (Piece::Right, &s[split..])]
        .into_iter()
        .map(|(piece, part)| {
            let h0 = piece_energy(p, piece, part[0].point);
            part.iter()
                .map(|x| (piece_energy(p, piece, x.point) - h0).abs())
                .fold(0.0, f64::max)
                / h0.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

pub fn max_energy_drift(p: &Problem, heights: &[f64]) -> f64 {
    heights
        .iter()
        .map(|&r| {
            energy_drift(
                p,
                &integrate(p, &IntegratorConfig::default(), PhasePoint::new(r, 0.0)).unwrap(),
            )
        })
        .fold(0.0, f64::max)
}

/// `|z(h) - z(h/2)| / |z(h/2) - z(h/4)|` for the terminal point; 16 for a
/// fourth-order method.
pub fn richardson_ratio(p: &Problem, z0: PhasePoint, h: f64) -> f64 {
    let at = |step: f64| poincare_map(p, &IntegratorConfig::with_step(step), z0).unwrap();
    let (a, b, c) = (at(h), at(h / 2.0), at(h / 4.0));
    a.dist(&b) / b.dist(&c)
}
