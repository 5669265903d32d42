use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use cline_core::{
    build_gamma, compare, find_all_clines, integrate, proposition_1, proposition_2,
    validate_conjecture_hypotheses, ClineSearch, ComparisonReport, Error, IntegratorConfig,
    PhasePoint, Problem, Tolerances,
};
use serde::Serialize;

use crate::manifest::RunManifest;

pub const EXIT_OK: u8 = 0;
pub const EXIT_HYPOTHESES: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_BLOWUP: u8 = 3;
pub const EXIT_NOTHING_FOUND: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::new(EXIT_CONFIG, format!("{}: {e}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Blowup { .. } | Error::BracketLost { .. } => EXIT_BLOWUP,
            _ => EXIT_CONFIG,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

struct Config {
    problem: Problem,
    bytes: Vec<u8>,
    path: String,
}

fn load(path: &Path) -> Result<Config, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    let problem: Problem = serde_json::from_slice(&bytes).map_err(|e| {
        Failure::new(
            EXIT_CONFIG,
            format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()),
        )
    })?;
    problem
        .validate()
        .map_err(|e| Failure::new(EXIT_CONFIG, format!("{}: {e}", path.display())))?;
    Ok(Config {
        problem,
        bytes,
        path: path.display().to_string(),
    })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| Failure::io(&path, e))
}

fn write_with(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), Failure> {
    let mut out = create(dir, name)?;
    body(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Failure::io(&dir.join(name), e))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Failure> {
    write_with(dir, name, |out| {
        serde_json::to_writer_pretty(&mut *out, value)?;
        writeln!(out)
    })
}

fn finish_manifest(dir: &Path, mut manifest: RunManifest, started: Instant) -> Result<(), Failure> {
    manifest.wall_time_s = Some(started.elapsed().as_secs_f64());
    let name = format!("{}.manifest.json", manifest.command);
    write_json(dir, &name, &manifest)
}

pub fn check_f(path: &Path, grid_size: usize, json: bool) -> CmdResult {
    let cfg = load(path)?;
    let report = validate_conjecture_hypotheses(&cfg.problem, grid_size)?;
    let f = &report.f_report;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serialises")
        );
    } else {
        println!(
            "nonlinearity: {}",
            serde_json::to_string(&cfg.problem.f).expect("serialises")
        );
        println!("  f(0) = {:e}, f(1) = {:e}", f.f_at_0, f.f_at_1);
        println!("  f'(0) = {}, f'(1) = {}", f.fprime_at_0, f.fprime_at_1);
        println!(
            "  positive on (0,1):        {}",
            f.positive_on_open_interval
        );
        println!("  concave:                  {}", f.is_concave);
        println!(
            "  f(s)/s strictly decreasing: {}",
            f.ratio_strictly_decreasing
        );
        println!("  grid size:                {}", f.grid_size);
        println!("conjecture hypotheses:");
        println!(
            "  w > 0 on a set of positive measure: {}",
            report.positive_part
        );
        println!(
            "  mean weight {:.6} < 0: {}",
            report.weight_mean, report.negative_mean
        );
        println!(
            "  f satisfies f(0)=f(1)=0, f>0, f'(0)>0>f'(1): {}",
            report.f_star
        );
        println!("  f(s)/s decreasing: {}", report.ratio_decreasing);
        println!("in scope: {}", report.in_scope());
    }
    Ok(if report.in_scope() {
        EXIT_OK
    } else {
        EXIT_HYPOTHESES
    })
}

pub fn shoot(
    path: &Path,
    r: f64,
    decimate: usize,
    icfg: &IntegratorConfig,
    dir: &Path,
) -> CmdResult {
    let started = Instant::now();
    let cfg = load(path)?;
    let traj = match integrate(&cfg.problem, icfg, PhasePoint::new(r, 0.0)) {
        Ok(t) => t,
        Err(Error::Blowup { x, bound }) => {
            return Err(Failure::new(
                EXIT_BLOWUP,
                format!("trajectory from r = {r} left |u|,|v| <= {bound} at x = {x}"),
            ))
        }
        Err(e) => return Err(e.into()),
    };
    let mut manifest = RunManifest::new("shoot", Some(cfg.path), &cfg.bytes, *icfg);
    manifest.r = Some(r);
    manifest.outputs.push("shoot.csv".into());
    write_with(dir, "shoot.csv", |out| traj.write_csv(out, decimate))?;
    finish_manifest(dir, manifest, started)?;
    let z = traj.terminal();
    println!(
        "terminal point at x = {}: u = {:.12}, v = {:.12}",
        cfg.problem.omega2(),
        z.u,
        z.v
    );
    Ok(EXIT_OK)
}

pub fn gamma(path: &Path, resolution: usize, icfg: &IntegratorConfig, dir: &Path) -> CmdResult {
    let started = Instant::now();
    let cfg = load(path)?;
    let g = build_gamma(&cfg.problem, icfg, resolution)?;
    let mut manifest = RunManifest::new("gamma", Some(cfg.path), &cfg.bytes, *icfg);
    manifest.resolution = Some(resolution);
    manifest.outputs.push("gamma.csv".into());
    write_with(dir, "gamma.csv", |out| g.write_csv(out))?;
    finish_manifest(dir, manifest, started)?;
    println!(
        "{} samples, {} blow-ups, {} sign changes of v(w2)",
        g.entries.len(),
        g.blowups(),
        g.sign_changes()
    );
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct FindReport<'a> {
    manifest: &'a RunManifest,
    problem: &'a Problem,
    trajectory_files: Vec<String>,
    search: &'a ClineSearch,
}

pub fn find(
    path: &Path,
    resolution: usize,
    tol: &Tolerances,
    icfg: &IntegratorConfig,
    decimate: usize,
    dir: &Path,
) -> CmdResult {
    let started = Instant::now();
    let cfg = load(path)?;
    let search = find_all_clines(&cfg.problem, icfg, resolution, tol)?;

    let mut manifest = RunManifest::new("find", Some(cfg.path), &cfg.bytes, *icfg);
    manifest.resolution = Some(resolution);
    manifest.tolerances = Some(*tol);

    let files: Vec<String> = (1..=search.clines.len())
        .map(|j| format!("cline_{j}.csv"))
        .collect();
    for (cl, name) in search.clines.iter().zip(&files) {
        write_with(dir, name, |out| cl.trajectory.write_csv(out, decimate))?;
    }
    write_with(dir, "profiles.csv", |out| {
        write_profiles(out, &cfg.problem, icfg, &search, decimate)
    })?;
    manifest.outputs = files.clone();
    manifest
        .outputs
        .extend(["profiles.csv".to_string(), "clines.json".to_string()]);
    let report = FindReport {
        manifest: &manifest,
        problem: &cfg.problem,
        trajectory_files: files,
        search: &search,
    };
    write_json(dir, "clines.json", &report)?;
    finish_manifest(dir, manifest, started)?;

    println!(
        "{} brackets, {} validated clines, {} rejected, {} failed",
        search.brackets.len(),
        search.clines.len(),
        search.rejected.len(),
        search.failures.len()
    );
    for (j, cl) in search.clines.iter().enumerate() {
        println!(
            "  cline {}: p(w1) = {:.10}, p(w2) = {:.10}, |v(w2)| = {:.1e}, u in [{:.6}, {:.6}]",
            j + 1,
            cl.c,
            cl.terminal_u,
            cl.terminal_v_residual.abs(),
            cl.min_u,
            cl.max_u
        );
    }
    for rej in &search.rejected {
        println!("  rejected root c = {:.10}: {}", rej.cline.c, rej.reason);
    }
    for fail in &search.failures {
        println!(
            "  bracket [{}, {}] failed: {}",
            fail.bracket.r_lo, fail.bracket.r_hi, fail.error
        );
    }

    if search.brackets.is_empty() {
        return Err(Failure::new(
            EXIT_NOTHING_FOUND,
            format!("no sign change of v(w2) at resolution {resolution}"),
        ));
    }
    if search.clines.is_empty() {
        return Err(Failure::new(
            EXIT_NOTHING_FOUND,
            "brackets found but no root passed validation",
        ));
    }
    Ok(EXIT_OK)
}

/// `x`, the constant states `p = 0` and `p = 1`, and one `u` column per cline.
fn write_profiles<W: Write>(
    out: &mut W,
    p: &Problem,
    icfg: &IntegratorConfig,
    search: &ClineSearch,
    decimate: usize,
) -> std::io::Result<()> {
    write!(out, "x,trivial_0,trivial_1")?;
    for j in 1..=search.clines.len() {
        write!(out, ",cline_{j}")?;
    }
    writeln!(out)?;
    // the x grid depends only on the problem and step; take it from a constant state
    let grid = integrate(p, icfg, PhasePoint::new(0.0, 0.0)).expect("constant state integrates");
    let decimate = decimate.max(1);
    let last = grid.samples().len() - 1;
    for (i, s) in grid.samples().iter().enumerate() {
        if i % decimate != 0 && i != last {
            continue;
        }
        write!(out, "{:.16e},{:.16e},{:.16e}", s.x, 0.0, 1.0)?;
        for cl in &search.clines {
            write!(out, ",{:.16e}", cl.trajectory.samples()[i].point.u)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn reproduce(
    resolution: usize,
    tol: &Tolerances,
    icfg: &IntegratorConfig,
    json: bool,
) -> CmdResult {
    let mut reports: Vec<ComparisonReport> = Vec::new();
    for inst in [proposition_1(), proposition_2()] {
        let search = find_all_clines(&inst.problem, icfg, resolution, tol)?;
        reports.push(compare(&inst, &search.clines));
    }
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&reports).expect("reports serialise")
        );
    } else {
        for r in &reports {
            print!("{r}");
        }
        let verdicts: Vec<&str> = reports
            .iter()
            .map(|r| if r.pass { "PASS" } else { "FAIL" })
            .collect();
        println!("{}", verdicts.join("/"));
    }
    // a reference cline with no partner usually means the sweep was too coarse
    let missed = reports.iter().any(|r| !r.misses.is_empty());
    Ok(if reports.iter().all(|r| r.pass) {
        EXIT_OK
    } else if missed {
        EXIT_NOTHING_FOUND
    } else {
        EXIT_HYPOTHESES
    })
}
