mod common;

use cline_core::reproduction::{remark_1, remark_2};
use cline_core::{
    build_gamma, compare, find_all_clines, find_brackets, lambda_sweep, neumann_necessary_integral,
    proposition_1, proposition_2, IntegratorConfig, Rejection, Tolerances, DEFAULT_RESOLUTION,
};
use common::{PROP1_ROOTS, PROP2_ROOTS};

fn search(
    inst: &cline_core::NamedInstance,
    step: f64,
    resolution: usize,
) -> cline_core::ClineSearch {
    find_all_clines(
        &inst.problem,
        &IntegratorConfig::with_step(step),
        resolution,
        &Tolerances::default(),
    )
    .unwrap()
}

#[test]
fn first_instance_roots_match_reference() {
    let s = search(&proposition_1(), 1e-4, DEFAULT_RESOLUTION);
    assert_eq!(s.clines.len(), 3);
    assert!(s.rejected.is_empty() && s.failures.is_empty());
    for (cl, (c, u)) in s.clines.iter().zip(PROP1_ROOTS) {
        assert!((cl.c - c).abs() < 1e-9, "{} vs {c}", cl.c);
        assert!((cl.terminal_u - u).abs() < 1e-9);
        assert!(cl.bracket.contains(cl.c));
    }
}

#[test]
fn second_instance_rejects_root_leaving_unit_interval() {
    let s = search(&proposition_2(), 1e-4, DEFAULT_RESOLUTION);
    assert_eq!(s.brackets.len(), 4);
    assert_eq!(s.clines.len(), 3);
    assert_eq!(s.rejected.len(), 1);
    let rej = &s.rejected[0];
    assert_eq!(rej.reason, Rejection::LeavesUnitInterval);
    assert!((rej.cline.c - PROP2_ROOTS[0].0).abs() < 1e-9);
    assert!(rej.cline.min_u < 0.0);
    for (cl, (c, u)) in s.clines.iter().zip(&PROP2_ROOTS[1..]) {
        assert!((cl.c - c).abs() < 1e-9, "{} vs {c}", cl.c);
        assert!((cl.terminal_u - u).abs() < 1e-9);
    }
}

#[test]
fn brackets_sit_between_published_probe_heights() {
    let cfg = IntegratorConfig::default();
    let within = |b: &cline_core::Bracket, lo: f64, hi: f64| lo < b.r_lo && b.r_hi < hi;

    let g = build_gamma(&proposition_1().problem, &cfg, 401).unwrap();
    let b = find_brackets(&g);
    assert!(b.len() >= 3);
    for (lo, hi) in [(0.1, 0.4), (0.4, 0.65), (0.65, 0.75)] {
        assert!(
            b.iter().any(|b| within(b, lo, hi)),
            "no bracket in ({lo}, {hi})"
        );
    }

    let g = build_gamma(&proposition_2().problem, &cfg, 801).unwrap();
    let b = find_brackets(&g);
    assert!(b.len() >= 3);
    for (lo, hi) in [(0.01, 0.1), (0.1, 0.45), (0.45, 0.9)] {
        assert!(
            b.iter().any(|b| within(b, lo, hi)),
            "no bracket in ({lo}, {hi})"
        );
    }
}

#[test]
fn certificates_hold_for_every_validated_cline() {
    for inst in [proposition_1(), proposition_2()] {
        let s = search(&inst, 1e-4, DEFAULT_RESOLUTION);
        for cl in &s.clines {
            assert!(cl.terminal_v_residual.abs() < 1e-10);
            assert!(cl
                .trajectory
                .samples()
                .iter()
                .all(|x| x.point.u > 0.0 && x.point.u < 1.0));
            assert!(cl.necessary_integral.abs() < 1e-6);
            assert_eq!(
                cl.necessary_integral,
                neumann_necessary_integral(&inst.problem, &cl.trajectory).unwrap()
            );
            assert!(cl.c > 0.0 && cl.c < 1.0);
        }
    }
}

#[test]
fn conclusions_are_stable_under_refinement() {
    for inst in [proposition_1(), proposition_2()] {
        let base = search(&inst, 1e-4, DEFAULT_RESOLUTION);
        for fine in [
            search(&inst, 1e-4, 2 * DEFAULT_RESOLUTION - 1),
            search(&inst, 5e-5, DEFAULT_RESOLUTION),
        ] {
            assert_eq!(base.clines.len(), fine.clines.len());
            for (a, b) in base.clines.iter().zip(&fine.clines) {
                assert!((a.c - b.c).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn counts_survive_the_coarsest_admissible_step() {
    for inst in [proposition_1(), proposition_2()] {
        let step = IntegratorConfig::max_step(&inst.problem);
        let s = search(&inst, step, DEFAULT_RESOLUTION);
        let report = compare(&inst, &s.clines);
        assert_eq!(s.clines.len(), 3, "{report}");
    }
}

#[test]
fn coarse_sweep_results_are_still_certified() {
    // resolution only affects discovery; whatever is found is still certified
    for inst in [proposition_1(), proposition_2()] {
        let s = search(&inst, 1e-4, 51);
        assert!(s.clines.len() <= 3);
        assert!(s.clines.iter().all(|c| c.terminal_v_residual.abs() < 1e-10));
    }
}

#[test]
fn concave_instance_has_at_most_one_cline() {
    let inst = remark_1();
    let coarse = search(&inst, 1e-4, DEFAULT_RESOLUTION);
    let fine = search(&inst, 1e-4, 4 * DEFAULT_RESOLUTION);
    assert!(coarse.clines.len() <= 1);
    assert_eq!(coarse.clines.len(), fine.clines.len());
    assert!(compare(&inst, &coarse.clines).pass);
}

#[test]
fn dominance_sweep_reports_counts() {
    let inst = remark_2();
    let sweep = lambda_sweep(
        &inst,
        &[5.0, 20.0, 45.0, 150.0],
        &IntegratorConfig::default(),
        401,
        &Tolerances::default(),
    )
    .unwrap();
    assert_eq!(sweep.len(), 4);
    // two clines across this range of lambda
    assert!(sweep.iter().all(|s| s.clines == 2), "{sweep:?}");
}

#[test]
fn endpoints_are_never_reported() {
    for inst in [proposition_1(), proposition_2(), remark_1()] {
        let s = search(&inst, 1e-4, 101);
        assert!(s.clines.iter().all(|c| c.c != 0.0 && c.c != 1.0));
        assert!(s.brackets.iter().all(|b| b.r_lo > 0.0 && b.r_hi < 1.0));
    }
}
