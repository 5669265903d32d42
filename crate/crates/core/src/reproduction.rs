//! Named instances with published reference values, and a comparator that
//! scores a cline search against them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::integrator::IntegratorConfig;
use crate::nonlinearity::Nonlinearity;
use crate::problem::{Problem, StepWeight};
use crate::shooting::{find_all_clines, Cline, Tolerances};

/// Reference values are truncated to three significant digits.
pub const REFERENCE_TOLERANCE: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum CountExpectation {
    Exactly(usize),
    AtMost(usize),
    AtLeast(usize),
}

impl CountExpectation {
    pub fn holds(&self, n: usize) -> bool {
        match *self {
            CountExpectation::Exactly(k) => n == k,
            CountExpectation::AtMost(k) => n <= k,
            CountExpectation::AtLeast(k) => n >= k,
        }
    }
}

impl fmt::Display for CountExpectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountExpectation::Exactly(k) => write!(f, "= {k}"),
            CountExpectation::AtMost(k) => write!(f, "<= {k}"),
            CountExpectation::AtLeast(k) => write!(f, ">= {k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedInstance {
    pub name: String,
    pub problem: Problem,
    pub expected_count: CountExpectation,
    /// Reference initial heights `p(omega1)`, ascending.
    pub expected_c: Option<Vec<f64>>,
    /// Reference terminal values `p(omega2)`, ascending.
    pub expected_terminal_u: Option<Vec<f64>>,
    pub tolerance: f64,
}

/// `s(1-s)(1-3s+3s^2)`, `alpha = 1`, habitat `[-0.21, 0.2]`, `lambda = 45`.
pub fn proposition_1() -> NamedInstance {
    NamedInstance {
        name: "proposition-1".into(),
        problem: Problem {
            weight: StepWeight {
                alpha: 1.0,
                omega1: -0.21,
                omega2: 0.2,
            },
            f: Nonlinearity::Hat { h: 3.0 },
            lambda: 45.0,
        },
        expected_count: CountExpectation::Exactly(3),
        expected_c: Some(vec![0.125, 0.479, 0.683]),
        expected_terminal_u: Some(vec![0.273, 0.601, 0.833]),
        tolerance: REFERENCE_TOLERANCE,
    }
}

/// Arctan-damped nonlinearity with `m = 10`, `alpha = 2.4`, habitat
/// `[-0.255, 0.6]`, `lambda = 3`.
///
/// The published triple 0.436, 0.776, 0.854 coincides with the terminal
/// values `p(omega2)` of the three clines; the corresponding initial heights
/// are near 0.018, 0.383 and 0.488. It is therefore matched against terminal
/// `u`, and no reference initial heights are recorded.
pub fn proposition_2() -> NamedInstance {
    NamedInstance {
        name: "proposition-2".into(),
        problem: Problem {
            weight: StepWeight {
                alpha: 2.4,
                omega1: -0.255,
                omega2: 0.6,
            },
            f: Nonlinearity::ArctanDamped { m: 10.0 },
            lambda: 3.0,
        },
        expected_count: CountExpectation::Exactly(3),
        expected_c: None,
        expected_terminal_u: Some(vec![0.436, 0.776, 0.854]),
        tolerance: REFERENCE_TOLERANCE,
    }
}

/// No dominance (`k = 0`, concave `f`) on the first geometry: at most one cline.
pub fn remark_1() -> NamedInstance {
    NamedInstance {
        name: "remark-1-no-dominance".into(),
        problem: Problem {
            f: Nonlinearity::DegreeOfDominance { k: 0.0 },
            ..proposition_1().problem
        },
        expected_count: CountExpectation::AtMost(1),
        expected_c: None,
        expected_terminal_u: None,
        tolerance: REFERENCE_TOLERANCE,
    }
}

/// Complete dominance of the second allele (`k = -1`) on the first geometry.
/// At least two clines are expected once `lambda` is large enough; use
/// [`lambda_sweep`] to observe the count.
pub fn remark_2() -> NamedInstance {
    NamedInstance {
        name: "remark-2-dominant".into(),
        problem: Problem {
            f: Nonlinearity::DegreeOfDominance { k: -1.0 },
            ..proposition_1().problem
        },
        expected_count: CountExpectation::AtLeast(2),
        expected_c: None,
        expected_terminal_u: None,
        tolerance: REFERENCE_TOLERANCE,
    }
}

pub fn remark_instances() -> Vec<NamedInstance> {
    vec![remark_1(), remark_2()]
}

/// Every built-in instance, looked up by name.
pub fn instance_by_name(name: &str) -> Option<NamedInstance> {
    [proposition_1(), proposition_2(), remark_1(), remark_2()]
        .into_iter()
        .find(|i| i.name == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub clines: usize,
    pub rejected: usize,
}

/// Observed cline counts of `instance` as `lambda` varies. Nothing is asserted.
pub fn lambda_sweep(
    instance: &NamedInstance,
    lambdas: &[f64],
    cfg: &IntegratorConfig,
    resolution: usize,
    tol: &Tolerances,
) -> Result<Vec<SweepPoint>> {
    lambdas
        .iter()
        .map(|&lambda| {
            let p = Problem::new(instance.problem.weight, instance.problem.f.clone(), lambda)?;
            let s = find_all_clines(&p, cfg, resolution, tol)?;
            Ok(SweepPoint {
                lambda,
                clines: s.clines.len(),
                rejected: s.rejected.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKey {
    InitialHeight,
    TerminalU,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedRoot {
    pub expected: f64,
    pub found_c: f64,
    pub found_terminal_u: f64,
    /// Absolute deviation on the match key.
    pub deviation: f64,
    /// Deviation of the terminal value when both references exist.
    pub terminal_u_deviation: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub instance: String,
    pub key: Option<MatchKey>,
    pub tolerance: f64,
    pub expected_count: CountExpectation,
    pub found_count: usize,
    pub count_ok: bool,
    pub matches: Vec<MatchedRoot>,
    /// Reference values left without a partner.
    pub misses: Vec<f64>,
    /// Initial heights of found clines left without a partner.
    pub extras: Vec<f64>,
    pub pass: bool,
}

/// Pairs found clines with reference values by nearest neighbour.
///
/// Pairs are formed greedily in order of increasing distance, so every
/// reference and every found cline takes part in at most one match.
pub fn compare(instance: &NamedInstance, found: &[Cline]) -> ComparisonReport {
    let (key, expected) = match (&instance.expected_c, &instance.expected_terminal_u) {
        (Some(c), _) => (Some(MatchKey::InitialHeight), c.clone()),
        (None, Some(u)) => (Some(MatchKey::TerminalU), u.clone()),
        (None, None) => (None, Vec::new()),
    };
    let value = |cl: &Cline| match key {
        Some(MatchKey::TerminalU) => cl.terminal_u,
        _ => cl.c,
    };

    let mut pairs: Vec<(f64, usize, usize)> = expected
        .iter()
        .enumerate()
        .flat_map(|(i, e)| {
            found
                .iter()
                .enumerate()
                .map(move |(j, cl)| ((e - value(cl)).abs(), i, j))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut used_expected = vec![false; expected.len()];
    let mut used_found = vec![false; found.len()];
    let mut matches = Vec::new();
    for (deviation, i, j) in pairs {
        if used_expected[i] || used_found[j] {
            continue;
        }
        used_expected[i] = true;
        used_found[j] = true;
        let cl = &found[j];
        let terminal_u_deviation = match (key, &instance.expected_terminal_u) {
            (Some(MatchKey::InitialHeight), Some(u)) => u.get(i).map(|u| (u - cl.terminal_u).abs()),
            _ => None,
        };
        let pass = deviation <= instance.tolerance
            && terminal_u_deviation.is_none_or(|d| d <= instance.tolerance);
        matches.push(MatchedRoot {
            expected: expected[i],
            found_c: cl.c,
            found_terminal_u: cl.terminal_u,
            deviation,
            terminal_u_deviation,
            pass,
        });
    }
    matches.sort_by(|a, b| a.expected.total_cmp(&b.expected));

    let misses: Vec<f64> = expected
        .iter()
        .zip(&used_expected)
        .filter(|(_, u)| !**u)
        .map(|(e, _)| *e)
        .collect();
    let extras: Vec<f64> = found
        .iter()
        .zip(&used_found)
        .filter(|(_, u)| !**u)
        .map(|(c, _)| c.c)
        .collect();
    let count_ok = instance.expected_count.holds(found.len());
    let pass = count_ok && misses.is_empty() && matches.iter().all(|m| m.pass);

    ComparisonReport {
        instance: instance.name.clone(),
        key,
        tolerance: instance.tolerance,
        expected_count: instance.expected_count,
        found_count: found.len(),
        count_ok,
        matches,
        misses,
        extras,
        pass,
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.instance, verdict(self.pass))?;
        writeln!(
            f,
            "  clines found: {} (expected {}) {}",
            self.found_count,
            self.expected_count,
            verdict(self.count_ok)
        )?;
        let key = match self.key {
            Some(MatchKey::InitialHeight) => "c",
            Some(MatchKey::TerminalU) => "u(w2)",
            None => return Ok(()),
        };
        writeln!(
            f,
            "  {:>8} {:>10} {:>14} {:>14} {:>10} {:>10}  tol {}",
            "key", "reference", "c", "u(w2)", "dev", "dev u(w2)", self.tolerance
        )?;
        for m in &self.matches {
            let du = m
                .terminal_u_deviation
                .map_or("-".to_string(), |d| format!("{d:.2e}"));
            writeln!(
                f,
                "  {:>8} {:>10.3} {:>14.10} {:>14.10} {:>10.2e} {:>10}  {}",
                key,
                m.expected,
                m.found_c,
                m.found_terminal_u,
                m.deviation,
                du,
                verdict(m.pass)
            )?;
        }
        for miss in &self.misses {
            writeln!(f, "  unmatched expectation {key} = {miss}")?;
        }
        for extra in &self.extras {
            writeln!(f, "  extra cline at c = {extra:.10}")?;
        }
        Ok(())
    }
}
