//! Strang splitting for i u_t + Δ²u - V(|u|)u = 0 with both substeps exact,
//! the free propagator e^{itΔ²}, and a run driver with a blow-up guard.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{local_mass, morawetz_m, spacetime_density, CutoffProfile};
use crate::error::{Error, Result};
use crate::functionals::{boundary_mass, lebesgue_norm, spectral_kinetic, Equation};
use crate::ground_state::GroundStateResult;
use crate::radial::{Field, RadialPlan, Space};

/// Damping e^{-η(r)dt} with η = strength·((r - r_a)/(R_max - r_a))² beyond
/// r_a = start_fraction·R_max. Removes outgoing waves before they reach the
/// Dirichlet wall; off by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Absorber {
    pub start_fraction: f64,
    pub strength: f64,
}

impl Absorber {
    pub fn rate(&self, r: f64, r_max: f64) -> f64 {
        let ra = self.start_fraction * r_max;
        if r <= ra {
            0.0
        } else {
            self.strength * ((r - ra) / (r_max - ra)).powi(2)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between snapshots; 0 keeps only the initial and final states.
    pub snapshot_every: usize,
    pub diagnostics_every: usize,
    pub blowup_kinetic_factor: f64,
    pub sup_norm_limit: f64,
    pub morawetz_r: Vec<f64>,
    pub cutoff_r: Vec<f64>,
    /// Lebesgue exponents of the monitored grid norms; `inf` is allowed.
    pub norm_exponents: Vec<f64>,
    pub absorber: Option<Absorber>,
    /// Drop the nonlinear substep (free flow).
    pub linear_only: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            snapshot_every: 0,
            diagnostics_every: 100,
            blowup_kinetic_factor: 1e4,
            sup_norm_limit: 1e6,
            morawetz_r: Vec::new(),
            cutoff_r: vec![5.0],
            norm_exponents: Vec::new(),
            absorber: None,
            linear_only: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self, plan: &RadialPlan) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidRunConfig(m));
        if !(self.dt > 0.0 && self.dt <= 0.5) {
            return bad(format!("dt={} must lie in (0, 0.5]", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end={} must be finite and nonnegative", self.t_end));
        }
        if self.diagnostics_every == 0 {
            return bad("diagnostics_every must be positive".into());
        }
        if !(self.blowup_kinetic_factor > 0.0 && self.sup_norm_limit > 0.0) {
            return bad("blow-up factors must be positive".into());
        }
        for &r in self.morawetz_r.iter().chain(&self.cutoff_r) {
            if !(r > 0.0 && r < plan.r_max()) {
                return bad(format!("radius {r} must lie in (0, R_max)"));
            }
        }
        if self.norm_exponents.iter().any(|&r| !(r >= 1.0)) {
            return bad("norm exponents must be ≥ 1".into());
        }
        if let Some(a) = self.absorber {
            if !(a.start_fraction > 0.0 && a.start_fraction < 1.0 && a.strength >= 0.0) {
                return bad("absorber needs 0 < start_fraction < 1 and strength ≥ 0".into());
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub constraint_k: f64,
    /// M with the unlocalized weight r²/2.
    pub virial: f64,
    /// M_R per configured Morawetz radius.
    pub morawetz: Vec<f64>,
    /// ∫ψ_R|u|² per configured cutoff radius.
    pub local_mass: Vec<f64>,
    pub sup_norm: f64,
    pub boundary_mass: f64,
    pub norms: Vec<f64>,
    /// Integrand of the space-time bound at this time.
    pub spacetime_density: f64,
    pub me: Option<f64>,
    pub mg: Option<f64>,
    /// |E(t) - E(0)| / (|E(0)| + ‖Δu(0)‖²).
    pub energy_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub morawetz_r: Vec<f64>,
    pub cutoff_r: Vec<f64>,
    pub norm_exponents: Vec<f64>,
    pub records: Vec<TimeSeriesRecord>,
}

impl TimeSeries {
    pub fn cutoff_index(&self, r: f64) -> Option<usize> {
        self.cutoff_r.iter().position(|&c| (c - r).abs() <= 1e-12 * r.abs().max(1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum Outcome {
    Completed,
    BlowupSuspected { t: f64, trigger: String },
    NonFinite { t: f64 },
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub series: TimeSeries,
    pub snapshots: Vec<Snapshot>,
    pub outcome: Outcome,
}

/// e^{itΔ²}u.
pub fn linear_propagate(plan: &RadialPlan, u: &Field, t: f64) -> Result<Field> {
    let f = plan.hankel_forward(u)?;
    plan.hankel_inverse(&plan.apply_multiplier(&f, |p| Complex64::from_polar(1.0, t * p.powi(4)))?)
}

/// d/dt of M with weight r²/2, which equals -8K[u].
pub fn virial_rhs_global(eq: &Equation, plan: &RadialPlan, u: &Field) -> Result<f64> {
    Ok(-8.0 * eq.constraint_k(plan, u)?)
}

/// Spectral-state Strang stepper with its phases cached for one dt.
pub struct Stepper<'a> {
    eq: &'a Equation,
    plan: &'a RadialPlan,
    dt: f64,
    half_phase: Vec<Complex64>,
    damping: Option<Vec<f64>>,
    linear_only: bool,
}

impl<'a> Stepper<'a> {
    pub fn new(eq: &'a Equation, plan: &'a RadialPlan, dt: f64) -> Self {
        let half_phase =
            plan.spectral_nodes().iter().map(|p| Complex64::from_polar(1.0, 0.5 * dt * p.powi(4))).collect();
        Self { eq, plan, dt, half_phase, damping: None, linear_only: false }
    }

    pub fn with_absorber(mut self, absorber: Option<Absorber>) -> Self {
        self.damping = absorber
            .map(|a| self.plan.nodes().iter().map(|&r| (-self.dt * a.rate(r, self.plan.r_max())).exp()).collect());
        self
    }

    pub fn linear_only(mut self, on: bool) -> Self {
        self.linear_only = on;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances Hankel coefficients by dt; returns sup|u| at the midpoint.
    pub fn advance(&self, uh: &mut [Complex64]) -> f64 {
        uh.iter_mut().zip(&self.half_phase).for_each(|(z, e)| *z *= e);
        let mut w = self.plan.inverse_raw(uh);
        if !self.linear_only {
            let sq: Vec<f64> = w.iter().map(|z| z.norm_sqr()).collect();
            let v = self.eq.potential_density(self.plan, &sq);
            // i u_t = V u gives the rotation e^{-iV dt}
            w.iter_mut().zip(&v).for_each(|(z, v)| *z *= Complex64::from_polar(1.0, -self.dt * v));
        }
        if let Some(d) = &self.damping {
            w.iter_mut().zip(d).for_each(|(z, d)| *z *= d);
        }
        let sup = w.iter().map(|z| z.norm()).fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
        let next = self.plan.forward_raw(&w);
        uh.iter_mut().zip(next).zip(&self.half_phase).for_each(|((z, n), e)| *z = n * e);
        sup
    }
}

/// One Strang step: half free flow, exact rotation, half free flow.
pub fn step_strang(eq: &Equation, plan: &RadialPlan, u: &Field, dt: f64) -> Result<Field> {
    let mut uh = plan.hankel_forward(u)?.into_values();
    Stepper::new(eq, plan, dt).advance(&mut uh);
    let out = Field::from_parts(Space::Position, plan.inverse_raw(&uh));
    if !out.is_finite() {
        return Err(Error::NonFinite("Strang step".into()));
    }
    Ok(out)
}

struct Recorder<'a> {
    eq: &'a Equation,
    plan: &'a RadialPlan,
    gs: Option<&'a GroundStateResult>,
    global: CutoffProfile,
    morawetz: Vec<CutoffProfile>,
    cutoff: Vec<CutoffProfile>,
    norm_exponents: Vec<f64>,
    reference: Option<(f64, f64)>,
}

impl Recorder<'_> {
    fn record(&mut self, t: f64, uh: &[Complex64]) -> Result<(TimeSeriesRecord, Field)> {
        let plan = self.plan;
        let u = Field::from_parts(Space::Position, plan.inverse_raw(uh));
        let kin = spectral_kinetic(plan, &Field::from_parts(Space::Spectral, uh.to_vec()))?;
        let mass = plan.radial_integral(&u.abs_sq())?;
        let pot = self.eq.potential(plan, &u)?;
        let energy = kin - pot / self.eq.exponent();
        let (e0, k0) = *self.reference.get_or_insert((energy, kin));
        let s = self.eq.exponents().critical_index();
        let (me, mg) = match self.gs {
            Some(g) => (
                (energy >= 0.0).then(|| (energy / g.energy).powf(s) * (mass / g.mass).powf(2.0 - s)),
                Some((kin / g.kinetic).powf(0.5 * s) * (mass / g.mass).powf(0.5 * (2.0 - s))),
            ),
            None => (None, None),
        };
        let rec = TimeSeriesRecord {
            t,
            mass,
            energy,
            kinetic: kin,
            potential: pot,
            constraint_k: kin - self.eq.constraint_weight() * pot,
            virial: morawetz_m(plan, &u, &self.global)?,
            morawetz: self.morawetz.iter().map(|p| morawetz_m(plan, &u, p)).collect::<Result<_>>()?,
            local_mass: self.cutoff.iter().map(|p| local_mass(plan, &u, p)).collect::<Result<_>>()?,
            sup_norm: u.values().iter().map(|z| z.norm()).fold(0.0, f64::max),
            boundary_mass: boundary_mass(plan, &u)?,
            norms: self.norm_exponents.iter().map(|&r| lebesgue_norm(plan, &u, r)).collect::<Result<_>>()?,
            spacetime_density: spacetime_density(self.eq, plan, &u)?,
            me,
            mg,
            energy_defect: (energy - e0).abs() / (e0.abs() + k0),
        };
        Ok((rec, u))
    }
}

/// Runs the scheme from `u0` to `cfg.t_end`. Failures of the solution
/// (blow-up, loss of finiteness) are reported through the outcome and the
/// series collected so far is always returned.
pub fn evolve(
    eq: &Equation,
    plan: &RadialPlan,
    u0: &Field,
    cfg: &RunConfig,
    gs: Option<&GroundStateResult>,
) -> Result<RunResult> {
    cfg.validate(plan)?;
    let mut uh = plan.hankel_forward(u0)?.into_values();
    let stepper = Stepper::new(eq, plan, cfg.dt).with_absorber(cfg.absorber).linear_only(cfg.linear_only);
    let mut rec = Recorder {
        eq,
        plan,
        gs,
        global: CutoffProfile::global(plan),
        morawetz: cfg.morawetz_r.iter().map(|&r| CutoffProfile::new(plan, r)).collect::<Result<_>>()?,
        cutoff: cfg.cutoff_r.iter().map(|&r| CutoffProfile::new(plan, r)).collect::<Result<_>>()?,
        norm_exponents: cfg.norm_exponents.clone(),
        reference: None,
    };
    let mut series = TimeSeries {
        morawetz_r: cfg.morawetz_r.clone(),
        cutoff_r: cfg.cutoff_r.clone(),
        norm_exponents: cfg.norm_exponents.clone(),
        records: Vec::new(),
    };
    let (first, u) = rec.record(0.0, &uh)?;
    let kin0 = first.kinetic;
    series.records.push(first);
    let mut snapshots = vec![Snapshot { t: 0.0, field: u }];
    let steps = cfg.steps();
    let mut outcome = Outcome::Completed;
    for i in 1..=steps {
        let t = i as f64 * cfg.dt;
        let sup = stepper.advance(&mut uh);
        if !sup.is_finite() || uh.iter().any(|z| !z.is_finite()) {
            outcome = Outcome::NonFinite { t };
            break;
        }
        let kin: f64 = plan
            .spectral_weights()
            .iter()
            .zip(plan.spectral_nodes())
            .zip(uh.iter())
            .map(|((w, p), z)| w * p.powi(4) * z.norm_sqr())
            .sum();
        let trigger = if sup > cfg.sup_norm_limit {
            Some(format!("sup norm {sup:e} > {:e}", cfg.sup_norm_limit))
        } else if kin0 > 0.0 && kin > cfg.blowup_kinetic_factor * kin0 {
            Some(format!("kinetic {kin:e} > {:e} × initial", cfg.blowup_kinetic_factor))
        } else {
            None
        };
        let last = i == steps || trigger.is_some();
        if i % cfg.diagnostics_every == 0 || last {
            let (r, u) = rec.record(t, &uh)?;
            series.records.push(r);
            if last || (cfg.snapshot_every > 0 && i % cfg.snapshot_every == 0) {
                snapshots.push(Snapshot { t, field: u });
            }
        } else if cfg.snapshot_every > 0 && i % cfg.snapshot_every == 0 {
            snapshots.push(Snapshot { t, field: Field::from_parts(Space::Position, plan.inverse_raw(&uh)) });
        }
        if let Some(trigger) = trigger {
            outcome = Outcome::BlowupSuspected { t, trigger };
            break;
        }
    }
    Ok(RunResult { series, snapshots, outcome })
}
