//! Cutoffs, localized virial quantities, coercivity, evacuation and
//! space-time bound fits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::TimeSeries;
use crate::functionals::{kinetic, lebesgue_norm, Equation, Thresholds};
use crate::problem::Family;
use crate::radial::{Field, RadialPlan, Space};

/// 3s² - 2s³ clamped to [0, 1].
fn smoothstep3(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

fn smoothstep3_prime(s: f64) -> f64 {
    if (0.0..=1.0).contains(&s) {
        6.0 * s * (1.0 - s)
    } else {
        0.0
    }
}

/// 10s³ - 15s⁴ + 6s⁵ clamped to [0, 1].
fn smoothstep5(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
}

/// ψ_R and the Morawetz weight f_R sampled on the plan nodes.
///
/// f_R' = r·φ((r/R - 1/2)·2) with φ = 1 - smoothstep, so f_R = r²/2 inside
/// R/2, f_R' = 0 beyond R, f_R' ≤ r and f_R'' ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffProfile {
    pub radius: f64,
    pub psi: Vec<f64>,
    pub f: Vec<f64>,
    pub f_prime: Vec<f64>,
    pub f_second: Vec<f64>,
}

impl CutoffProfile {
    pub fn new(plan: &RadialPlan, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < plan.r_max()) {
            return Err(Error::RangeError { r: radius, r_max: plan.r_max() });
        }
        let blend = |r: f64| 2.0 * (r / radius - 0.5);
        let psi = plan.nodes().iter().map(|&r| 1.0 - smoothstep5(blend(r))).collect();
        let f_prime: Vec<f64> = plan.nodes().iter().map(|&r| r * (1.0 - smoothstep3(blend(r)))).collect();
        let f_second = plan
            .nodes()
            .iter()
            .map(|&r| 1.0 - smoothstep3(blend(r)) - r * smoothstep3_prime(blend(r)) * 2.0 / radius)
            .collect();
        let f = plan.nodes().iter().map(|&r| weight_primitive(r, radius)).collect();
        Ok(Self { radius, psi, f, f_prime, f_second })
    }

    /// The unlocalized weight a = r²/2.
    pub fn global(plan: &RadialPlan) -> Self {
        let nodes = plan.nodes();
        Self {
            radius: f64::INFINITY,
            psi: vec![1.0; nodes.len()],
            f: nodes.iter().map(|r| 0.5 * r * r).collect(),
            f_prime: nodes.to_vec(),
            f_second: vec![1.0; nodes.len()],
        }
    }
}

/// ∫_0^r f_R'(s) ds, in closed form per piece.
fn weight_primitive(r: f64, radius: f64) -> f64 {
    let inner = 0.5 * radius;
    if r <= inner {
        return 0.5 * r * r;
    }
    // on the blend f' = s(1 - σ(2(s/R - 1/2))); integrate with Gauss-Legendre,
    // exact for this degree-4 polynomial
    let upper = r.min(radius);
    let nodes = [-0.906179845938664, -0.5384693101056831, 0.0, 0.5384693101056831, 0.906179845938664];
    let weights = [0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665, 0.2369268850561891];
    let (a, b) = (inner, upper);
    let blend: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(x, w)| {
            let s = 0.5 * (a + b) + 0.5 * (b - a) * x;
            w * s * (1.0 - smoothstep3(2.0 * (s / radius - 0.5)))
        })
        .sum::<f64>()
        * 0.5
        * (b - a);
    0.5 * inner * inner + blend
}

/// M_R = 2∫ f_R'(r) Im(∂_r u · ū) dx.
pub fn morawetz_m(plan: &RadialPlan, u: &Field, prof: &CutoffProfile) -> Result<f64> {
    u.expect(plan, Space::Position)?;
    let du = plan.radial_derivative(u)?;
    let s: Vec<f64> = du
        .values()
        .iter()
        .zip(u.values())
        .zip(&prof.f_prime)
        .map(|((d, z), fp)| 2.0 * fp * (d * z.conj()).im)
        .collect();
    plan.radial_integral(&s)
}

/// ∫ ψ_R |u|².
pub fn local_mass(plan: &RadialPlan, u: &Field, prof: &CutoffProfile) -> Result<f64> {
    u.expect(plan, Space::Position)?;
    let s: Vec<f64> = u.values().iter().zip(&prof.psi).map(|(z, p)| p * z.norm_sqr()).collect();
    plan.radial_integral(&s)
}

/// sup over r > R/2 of r^{(N-1)/2}|u(r)|.
pub fn strauss_tail(plan: &RadialPlan, u: &Field, radius: f64) -> Result<f64> {
    u.expect(plan, Space::Position)?;
    let e = 0.5 * (plan.dim() as f64 - 1.0);
    Ok(plan
        .nodes()
        .iter()
        .zip(u.values())
        .filter(|(r, _)| **r > 0.5 * radius)
        .map(|(r, z)| r.powf(e) * z.norm())
        .fold(0.0, f64::max))
}

/// Lebesgue exponent 2Np/(N+α+2b) of the Choquard space-time bound.
pub fn choquard_bound_exponent(eq: &Equation) -> Result<f64> {
    let s = eq.spec();
    let n = s.dim as f64;
    Ok(2.0 * n * eq.exponent() / (n + s.alpha()? + 2.0 * s.b))
}

/// The integrand of the space-time bound: ∫|x|^{2b}|u|^{2q} (local) or
/// ‖u‖²_{2Np/(N+α+2b)} (Choquard).
pub fn spacetime_density(eq: &Equation, plan: &RadialPlan, u: &Field) -> Result<f64> {
    match eq.spec().family {
        Family::LocalPower => eq.potential(plan, u),
        Family::Choquard => Ok(lebesgue_norm(plan, u, choquard_bound_exponent(eq)?)?.powi(2)),
    }
}

/// ‖Δ(ψ_R u)‖² - ‖ψ_R Δu‖².
pub fn commutator(plan: &RadialPlan, u: &Field, prof: &CutoffProfile) -> Result<f64> {
    let cut = cutoff_field(u, prof);
    let a = kinetic(plan, &cut)?;
    let spec = plan.hankel_forward(u)?;
    let lap = plan.hankel_inverse(&plan.apply_multiplier(&spec, |p| Complex64::new(-p * p, 0.0))?)?;
    let s: Vec<f64> = lap.values().iter().zip(&prof.psi).map(|(z, p)| (p * z).norm_sqr()).collect();
    Ok(a - plan.radial_integral(&s)?)
}

fn cutoff_field(u: &Field, prof: &CutoffProfile) -> Field {
    Field::from_parts(Space::Position, u.values().iter().zip(&prof.psi).map(|(z, p)| z * p).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoercivityCheck {
    /// ‖Δ(ψ_R u)‖² - (D/2q)∫|x|^{2b}|ψ_R u|^{2q} (or the Choquard analogue).
    pub lhs: f64,
    /// ∫|x|^{2b}|ψ_R u|^{2q} (or ‖ψ_R u‖²_{2Np/(N+α+2b)}).
    pub rhs: f64,
    /// Measured δ' = lhs/rhs.
    pub delta: f64,
    pub holds: bool,
    /// Radii at which the commutator was compared.
    pub commutator_radii: (f64, f64),
    pub commutator: (f64, f64),
    /// Commutator at the smaller radius over the larger one.
    pub commutator_ratio: f64,
}

/// Localized coercivity below the ground-state threshold. The commutator is
/// compared at R and 2R, or at R/2 and R when 2R does not fit in the grid.
pub fn coercivity_check(
    eq: &Equation,
    plan: &RadialPlan,
    u: &Field,
    radius: f64,
    thresholds: &Thresholds,
) -> Result<CoercivityCheck> {
    if !thresholds.below() {
        return Err(Error::NotApplicable(format!("thresholds {thresholds:?} are not both below 1")));
    }
    let prof = CutoffProfile::new(plan, radius)?;
    let cut = cutoff_field(u, &prof);
    let kin = kinetic(plan, &cut)?;
    let pot = eq.potential(plan, &cut)?;
    let lhs = kin - eq.constraint_weight() * pot;
    let rhs = match eq.spec().family {
        Family::LocalPower => pot,
        Family::Choquard => spacetime_density(eq, plan, &cut)?,
    };
    let (r1, r2) = if 2.0 * radius < plan.r_max() { (radius, 2.0 * radius) } else { (0.5 * radius, radius) };
    let c1 = commutator(plan, u, &CutoffProfile::new(plan, r1)?)?;
    let c2 = commutator(plan, u, &CutoffProfile::new(plan, r2)?)?;
    Ok(CoercivityCheck {
        lhs,
        rhs,
        delta: lhs / rhs,
        holds: lhs > 0.0 && rhs > 0.0,
        commutator_radii: (r1, r2),
        commutator: (c1, c2),
        commutator_ratio: c1.abs() / c2.abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvacuationScan {
    pub radius: f64,
    pub eps: f64,
    /// Times at which the local mass is below eps.
    pub times: Vec<f64>,
    /// (t, min over s ≤ t of local mass).
    pub running_min: Vec<(f64, f64)>,
}

pub fn evacuation_scan(series: &TimeSeries, radius: f64, eps: f64) -> Result<EvacuationScan> {
    let idx = series.cutoff_index(radius).ok_or(Error::MissingDiagnostic { r: radius })?;
    let mut min = f64::INFINITY;
    let mut times = Vec::new();
    let mut running_min = Vec::with_capacity(series.records.len());
    for rec in &series.records {
        let m = rec.local_mass[idx];
        if m < eps {
            times.push(rec.t);
        }
        min = min.min(m);
        running_min.push((rec.t, min));
    }
    Ok(EvacuationScan { radius, eps, times, running_min })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeFit {
    /// Slope of log ∫_0^T density dt against log T.
    pub exponent: f64,
    pub r2: f64,
    pub t_end: f64,
}

/// Minimum run length for the fit.
pub const MIN_FIT_TIME: f64 = 20.0;

/// Least-squares fit of log ∫_0^T density against log T over the second half
/// of the run.
pub fn spacetime_bound_fit(series: &TimeSeries) -> Result<SpacetimeFit> {
    let recs = &series.records;
    let t_end = recs.last().map(|r| r.t).unwrap_or(0.0);
    if t_end < MIN_FIT_TIME || recs.len() < 4 {
        return Err(Error::RunTooShort(format!("run ends at t={t_end}, need t ≥ {MIN_FIT_TIME}")));
    }
    let mut cum = 0.0;
    let mut pts = Vec::new();
    for w in recs.windows(2) {
        cum += 0.5 * (w[0].spacetime_density + w[1].spacetime_density) * (w[1].t - w[0].t);
        if w[1].t >= 0.5 * t_end {
            pts.push((w[1].t.ln(), cum));
        }
    }
    if !(cum > 0.0) || pts.len() < 3 {
        return Err(Error::RunTooShort("cumulative integral vanishes".into()));
    }
    let pts: Vec<(f64, f64)> = pts.into_iter().map(|(x, c)| (x, c.ln())).collect();
    let (exponent, r2) = linear_fit(&pts);
    Ok(SpacetimeFit { exponent, r2, t_end })
}

/// Slope and coefficient of determination of a least-squares line.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_matches_inner_parabola_and_is_flat_outside() {
        let r = 10.0;
        assert_eq!(weight_primitive(2.0, r), 2.0);
        let a = weight_primitive(r, r);
        assert_eq!(weight_primitive(1.5 * r, r), a);
        assert!(a > 0.5 * 25.0 && a < 50.0);
    }

    #[test]
    fn cutoff_rejects_large_radius() {
        let plan = RadialPlan::new(5, 64, 10.0).unwrap();
        assert!(matches!(CutoffProfile::new(&plan, 10.0), Err(Error::RangeError { .. })));
    }

    #[test]
    fn fit_of_a_power_law() {
        let pts: Vec<(f64, f64)> = (1..10).map(|i| ((i as f64).ln(), 0.3 * (i as f64).ln() + 2.0)).collect();
        let (s, r2) = linear_fit(&pts);
        assert!((s - 0.3).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }
}
