//! The four subcommands. Each returns the process exit status on success
//! paths that are still worth reporting (e.g. a failed certification) and a
//! `CliError` otherwise.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use bnls_core::diagnostics::{evacuation_scan, spacetime_bound_fit, MIN_FIT_TIME};
use bnls_core::evolution::{evolve, Outcome};
use bnls_core::functionals::{Equation, MeValue};
use bnls_core::ground_state::{certification_report, from_profile, solve_ground_state, GroundStateResult};
use bnls_core::problem::{derive_exponents, theorem_window, DerivedExponents, TheoremWindow};
use bnls_core::{Error as CoreError, Field, ProblemSpec, RadialPlan, Space};

use crate::config::{Config, Initial};
use crate::error::{CliError, Result};
use crate::format::{g17, read_snapshot, write_series, write_snapshot};
use crate::manifest::{Evacuation, RunManifest, Status};

pub const PROFILE_FILE: &str = "profile.bnls";
pub const CERTIFICATION_FILE: &str = "certification.json";
pub const GROUND_STATE_FILE: &str = "ground_state.bnls";
pub const THRESHOLDS_FILE: &str = "thresholds.json";
pub const AGGREGATE_FILE: &str = "sweep.csv";

/// Creates a fresh output directory; an existing one is never reused.
pub fn create_out_dir(dir: &Path) -> Result<()> {
    if dir.exists() {
        return Err(CliError::OutputExists(dir.to_path_buf()));
    }
    std::fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))
}

fn check_spec(spec: &ProblemSpec) -> Result<()> {
    let v = spec.validate();
    if v.is_empty() {
        Ok(())
    } else {
        Err(CliError::Spec(v))
    }
}

fn build(cfg: &Config) -> Result<(RadialPlan, Equation)> {
    cfg.check_shape()?;
    check_spec(&cfg.problem)?;
    let plan = RadialPlan::new(cfg.problem.dim, cfg.grid.k, cfg.grid.r_max)?;
    let eq = Equation::new(cfg.problem, &plan)?;
    Ok((plan, eq))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub spec: ProblemSpec,
    pub violations: Vec<String>,
    pub exponents: Option<DerivedExponents>,
    pub window: Option<TheoremWindow>,
    pub errors: Vec<String>,
}

impl ThresholdReport {
    pub fn new(spec: &ProblemSpec) -> Self {
        let violations = spec.validate();
        let mut errors = Vec::new();
        let exponents = derive_exponents(spec).map_err(|e| errors.push(e.to_string())).ok();
        let window =
            if exponents.is_some() { theorem_window(spec).map_err(|e| errors.push(e.to_string())).ok() } else { None };
        Self { spec: *spec, violations, exponents, window, errors }
    }

    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() && self.errors.is_empty() {
            0
        } else {
            3
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut row = |k: &str, v: Option<f64>| {
            if let Some(v) = v {
                s.push_str(&format!("{k:<12} {}\n", g17(v)));
            }
        };
        if let Some(e) = &self.exponents {
            row("s_c", e.s_c);
            row("s_c'", e.s_c_prime);
            row("q_*", e.q_star);
            row("q^*", e.q_upper);
            row("p_*", e.p_star);
            row("p^*", e.p_upper);
            row("D", e.d);
            row("E", e.e);
            row("A", e.a);
            row("B", e.b_pair);
            row("x_0", e.x0);
            row("x_alpha", e.x_alpha);
        }
        if let Some(w) = &self.window {
            let open = if w.lower_inclusive { '[' } else { '(' };
            s.push_str(&format!(
                "{:<12} {open}{}, {})  contains exponent: {}\n",
                "window",
                g17(w.lower),
                g17(w.upper),
                w.contains
            ));
        }
        for v in &self.violations {
            s.push_str(&format!("violation    {v}\n"));
        }
        for e in &self.errors {
            s.push_str(&format!("error        {e}\n"));
        }
        s
    }
}

pub fn cmd_thresholds(cfg: &Config, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    cfg.check_shape()?;
    let report = ThresholdReport::new(&cfg.problem);
    stdout.write_all(report.render().as_bytes()).map_err(CliError::io("stdout"))?;
    if let Some(dir) = out {
        create_out_dir(dir)?;
        let path = dir.join(THRESHOLDS_FILE);
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(&path, text).map_err(CliError::io(format!("writing {}", path.display())))?;
    }
    Ok(report.exit_code())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    std::fs::write(path, text).map_err(CliError::io(format!("writing {}", path.display())))
}

/// Records a failed pipeline in the directory's manifest, then hands the
/// error back.
fn fail(mut manifest: RunManifest, dir: &Path, start: Instant, e: CliError) -> CliError {
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.status = Status::failed(&e);
    // a manifest that cannot be written must not mask the original error
    let _ = manifest.write(dir);
    e
}

pub fn cmd_ground_state(cfg: &Config, out: &Path, stdout: &mut dyn Write) -> Result<i32> {
    create_out_dir(out)?;
    let start = Instant::now();
    let mut manifest = RunManifest::new("ground-state", cfg);
    let (plan, eq) = match build(cfg) {
        Ok(x) => x,
        Err(e) => return Err(fail(manifest, out, start, e)),
    };
    let gs = match solve_ground_state(&eq, &plan, &cfg.run.solver) {
        Ok(gs) => gs,
        Err(e) => return Err(fail(manifest, out, start, e.into())),
    };
    write_snapshot(&out.join(PROFILE_FILE), plan.r_max(), 0.0, gs.profile.values())?;
    manifest.files.ground_state = Some(PROFILE_FILE.into());
    let report = match certification_report(&eq, &plan, &gs) {
        Ok(r) => r,
        Err(e) => return Err(fail(manifest, out, start, e.into())),
    };
    write_json(&out.join(CERTIFICATION_FILE), &report)?;
    manifest.files.certification = Some(CERTIFICATION_FILE.into());
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        writeln!(stdout, "{mark} {:<44} {} (tol {})", c.name, g17(c.value), g17(c.tolerance))
            .map_err(CliError::io("stdout"))?;
    }
    manifest.status =
        if report.passed { Status::Certified } else { Status::CertificationFailed { failures: report.failures() } };
    if gs.outside_window {
        manifest.notes.push("exponent lies outside the theorem window".into());
    }
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(out)?;
    Ok(if report.passed { 0 } else { CliError::from(CoreError::CertificationFailure(report.failures())).exit_code() })
}

/// Summary of one evolution pipeline, as it appears in sweep aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub me: Option<f64>,
    pub mg: Option<f64>,
    pub outcome: Status,
    pub fit_exponent: Option<f64>,
    pub exit_code: i32,
}

fn ground_state_for(cfg: &Config, plan: &RadialPlan, eq: &Equation) -> Result<GroundStateResult> {
    match &cfg.run.ground_state {
        Some(path) => {
            let snap = read_snapshot(path)?;
            if snap.values.len() != plan.len() || snap.r_max != plan.r_max() {
                return Err(CliError::Config(format!(
                    "{}: profile grid (K={}, R_max={}) differs from the config",
                    path.display(),
                    snap.values.len(),
                    snap.r_max
                )));
            }
            Ok(from_profile(eq, plan, &Field::new(Space::Position, snap.values)?)?)
        }
        None => Ok(solve_ground_state(eq, plan, &cfg.run.solver)?),
    }
}

fn initial_field(cfg: &Config, plan: &RadialPlan, gs: Option<&GroundStateResult>, seed: Option<u64>) -> Result<Field> {
    Ok(match cfg.run.initial {
        Initial::GroundState { amplitude } => gs
            .ok_or_else(|| CliError::Config("amplitude×Q data needs a ground state".into()))?
            .profile
            .scaled(amplitude),
        Initial::Gaussian { amplitude, width } => {
            Field::sample_real(plan, |r| amplitude * (-(r / width).powi(2)).exp())?
        }
        Initial::Random { amplitude, terms } => {
            let seed = seed.ok_or_else(|| CliError::Config("random initial data needs --seed or run.seed".into()))?;
            Field::random_smooth(plan, &mut ChaCha8Rng::seed_from_u64(seed), terms)?.scaled(amplitude)
        }
    })
}

/// The evolve pipeline writing into a directory that already exists.
fn evolve_into(cfg: &Config, out: &Path, seed: Option<u64>, command: &str) -> Result<PointSummary> {
    let start = Instant::now();
    let mut echo = cfg.clone();
    echo.run.seed = seed;
    if let Some(p) = &echo.run.ground_state {
        echo.run.ground_state = Some(std::fs::canonicalize(p).unwrap_or_else(|_| p.clone()));
    }
    let mut manifest = RunManifest::new(command, &echo);
    match evolve_pipeline(cfg, out, seed, &mut manifest) {
        Ok(summary) => {
            manifest.wall_time_s = start.elapsed().as_secs_f64();
            manifest.write(out)?;
            Ok(summary)
        }
        Err(e) => Err(fail(manifest, out, start, e)),
    }
}

fn evolve_pipeline(cfg: &Config, out: &Path, seed: Option<u64>, manifest: &mut RunManifest) -> Result<PointSummary> {
    let (plan, eq) = build(cfg)?;
    let run_cfg = cfg.run_config();
    run_cfg.validate(&plan)?;
    let needs_gs = matches!(cfg.run.initial, Initial::GroundState { .. }) || cfg.run.ground_state.is_some();
    let gs = match ground_state_for(cfg, &plan, &eq) {
        Ok(gs) => Some(gs),
        Err(e) if needs_gs => return Err(e),
        Err(e) => {
            manifest.notes.push(format!("no ground state, ME/MG not recorded: {e}"));
            None
        }
    };
    let u0 = initial_field(cfg, &plan, gs.as_ref(), seed)?;
    if let Some(gs) = &gs {
        write_snapshot(&out.join(GROUND_STATE_FILE), plan.r_max(), 0.0, gs.profile.values())?;
        manifest.files.ground_state = Some(GROUND_STATE_FILE.into());
        manifest.thresholds = Some(eq.me_mg(&plan, &u0, gs)?);
    }
    manifest.initial = Some(eq.report(&plan, &u0, gs.as_ref())?);

    let result = evolve(&eq, &plan, &u0, &run_cfg, gs.as_ref())?;
    let series_path = out.join(&cfg.output.series);
    write_series(&series_path, &result.series)?;
    manifest.files.series = Some(cfg.output.series.clone());
    for (i, snap) in result.snapshots.iter().enumerate() {
        let name = format!("snapshot_{i:05}.bnls");
        write_snapshot(&out.join(&name), plan.r_max(), snap.t, snap.field.values())?;
        manifest.files.snapshots.push(name);
    }
    manifest.status = Status::from(&result.outcome);

    let d = &cfg.diagnostics;
    match result.series.cutoff_index(d.evacuation_radius) {
        Some(idx) if !result.series.records.is_empty() => {
            let recs = &result.series.records;
            let initial = recs[0].local_mass[idx];
            let scan = evacuation_scan(&result.series, d.evacuation_radius, d.evacuation_fraction * initial)?;
            let last = recs.last().expect("nonempty").local_mass[idx];
            manifest.evacuation = Some(Evacuation::from_scan(&scan, initial, last));
        }
        _ => manifest.notes.push(format!("evacuation scan skipped: radius {} not recorded", d.evacuation_radius)),
    }
    let below = manifest.thresholds.map(|t| t.below()).unwrap_or(false);
    if matches!(result.outcome, Outcome::Completed) && cfg.run.t_end >= MIN_FIT_TIME && below {
        match spacetime_bound_fit(&result.series) {
            Ok(fit) => manifest.spacetime_fit = Some(fit),
            Err(e) => manifest.notes.push(format!("space-time fit skipped: {e}")),
        }
    }

    let exit_code = if matches!(result.outcome, Outcome::NonFinite { .. }) { 6 } else { 0 };
    Ok(PointSummary {
        me: manifest.thresholds.and_then(|t| match t.me {
            MeValue::Value(v) => Some(v),
            MeValue::NegativeEnergy => None,
        }),
        mg: manifest.thresholds.map(|t| t.mg),
        outcome: manifest.status.clone(),
        fit_exponent: manifest.spacetime_fit.map(|f| f.exponent),
        exit_code,
    })
}

pub fn cmd_evolve(cfg: &Config, out: &Path, seed: Option<u64>, stdout: &mut dyn Write) -> Result<i32> {
    create_out_dir(out)?;
    let s = evolve_into(cfg, out, seed.or(cfg.run.seed), "evolve")?;
    writeln!(stdout, "outcome {}", s.outcome.label()).map_err(CliError::io("stdout"))?;
    if let Status::BlowupSuspected { t, trigger } = &s.outcome {
        writeln!(stdout, "trigger {trigger} at t={}", g17(*t)).map_err(CliError::io("stdout"))?;
    }
    if let Some(e) = s.fit_exponent {
        writeln!(stdout, "spacetime fit exponent {}", g17(e)).map_err(CliError::io("stdout"))?;
    }
    Ok(s.exit_code)
}

/// Worker count from `BNLS_WORKERS`, defaulting to the available cores.
pub fn sweep_workers() -> usize {
    std::env::var("BNLS_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub amplitude: f64,
    pub exponent: f64,
    pub dir: PathBuf,
    pub result: std::result::Result<PointSummary, (i32, String)>,
}

pub fn cmd_sweep(cfg: &Config, out: &Path, seed: Option<u64>, stdout: &mut dyn Write) -> Result<i32> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("missing [sweep] section".into()))?;
    if sweep.amplitudes.is_empty() {
        return Err(CliError::Config("sweep.amplitudes is empty".into()));
    }
    cfg.check_shape()?;
    let exponents = if sweep.exponents.is_empty() {
        vec![cfg.problem.exponent().map_err(|e| CliError::Config(e.to_string()))?]
    } else {
        sweep.exponents.clone()
    };
    create_out_dir(out)?;
    let seed = seed.or(cfg.run.seed);
    let points: Vec<(usize, f64, f64)> = exponents
        .iter()
        .flat_map(|&e| sweep.amplitudes.iter().map(move |&a| (a, e)))
        .enumerate()
        .map(|(i, (a, e))| (i, a, e))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep_workers())
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .map(|&(index, amplitude, exponent)| {
                let mut point = cfg.with_exponent(exponent);
                point.sweep = None;
                point.run.initial = point.run.initial.with_amplitude(amplitude);
                let dir = out.join(format!("point_{index:03}"));
                let result = create_out_dir(&dir)
                    .and_then(|_| evolve_into(&point, &dir, seed.map(|s| s.wrapping_add(index as u64)), "sweep"))
                    .map_err(|e| (e.exit_code(), e.to_string()));
                SweepRow { index, amplitude, exponent, dir, result }
            })
            .collect()
    });

    write_aggregate(&out.join(AGGREGATE_FILE), &rows)?;
    let ok = rows.iter().filter(|r| matches!(&r.result, Ok(s) if s.exit_code == 0)).count();
    writeln!(stdout, "{ok}/{} points succeeded", rows.len()).map_err(CliError::io("stdout"))?;
    if ok > 0 {
        return Ok(0);
    }
    let codes: Vec<i32> = rows
        .iter()
        .map(|r| match &r.result {
            Ok(s) => s.exit_code,
            Err((c, _)) => *c,
        })
        .collect();
    let code = if codes.iter().all(|&c| c == codes[0]) { codes[0] } else { 1 };
    Err(CliError::SweepFailed { code })
}

fn write_aggregate(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let ctx = format!("writing {}", path.display());
    let io = |e: csv::Error| CliError::Io { context: ctx.clone(), source: std::io::Error::other(e) };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record([
        "index",
        "amplitude",
        "exponent",
        "me",
        "mg",
        "outcome",
        "fit_exponent",
        "exit_code",
        "dir",
        "error",
    ])
    .map_err(io)?;
    let opt = |x: Option<f64>| x.map(g17).unwrap_or_else(|| "nan".into());
    for r in rows {
        let dir = r.dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let (me, mg, outcome, fit, code, err) = match &r.result {
            Ok(s) => {
                (opt(s.me), opt(s.mg), s.outcome.label().to_string(), opt(s.fit_exponent), s.exit_code, String::new())
            }
            Err((c, m)) => ("nan".into(), "nan".into(), "Failed".into(), "nan".into(), *c, m.clone()),
        };
        w.write_record([
            r.index.to_string(),
            g17(r.amplitude),
            g17(r.exponent),
            me,
            mg,
            outcome,
            fit,
            code.to_string(),
            dir,
            err,
        ])
        .map_err(io)?;
    }
    w.flush().map_err(CliError::io(ctx.clone()))
}
