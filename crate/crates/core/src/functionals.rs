//! Conserved and variational quantities: mass, energy, potential term,
//! constraint, Gagliardo-Nirenberg ratio and the scale-invariant thresholds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground_state::GroundStateResult;
use crate::problem::{derive_exponents, DerivedExponents, Family, ProblemSpec};
use crate::radial::{Field, RadialPlan, RieszOperator, Space};

/// A validated spec bound to a plan, with the Riesz operator prebuilt for the
/// Choquard family.
#[derive(Debug, Clone)]
pub struct Equation {
    spec: ProblemSpec,
    exponents: DerivedExponents,
    riesz: Option<RieszOperator>,
    /// Endpoint-corrected weight factors for |x|^{2b} (local family).
    site_factors: Vec<f64>,
}

impl Equation {
    pub fn new(spec: ProblemSpec, plan: &RadialPlan) -> Result<Self> {
        let exponents = derive_exponents(&spec)?;
        if spec.dim != plan.dim() {
            return Err(Error::InvalidSpec(vec![format!(
                "spec dimension {} differs from plan dimension {}",
                spec.dim,
                plan.dim()
            )]));
        }
        let (riesz, site_factors) = match spec.family {
            Family::Choquard => (Some(RieszOperator::new(plan, spec.alpha()?)?), vec![1.0; plan.len()]),
            Family::LocalPower => (None, plan.singular_factors(2.0 * spec.b)?),
        };
        Ok(Self { spec, exponents, riesz, site_factors })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn exponents(&self) -> &DerivedExponents {
        &self.exponents
    }

    /// q or p.
    pub fn exponent(&self) -> f64 {
        self.spec.exponent().expect("validated")
    }

    /// D/(2q) or B/(2p), the weight of the potential term in the constraint.
    pub fn constraint_weight(&self) -> f64 {
        self.exponents.kinetic_exponent() / (2.0 * self.exponent())
    }

    /// V(|u|) such that the nonlinearity is V·u: |x|^{2b}|u|^{2(q-1)} or
    /// (I_α * |·|^b|u|^p)|x|^b|u|^{p-2}. In the local case the first few
    /// nodes carry the singular-weight quadrature factors, so that the
    /// discrete flow and ground-state equation derive from the corrected
    /// potential Σ c_k w_k r_k^{2b}|u_k|^{2q}.
    pub fn potential_density(&self, plan: &RadialPlan, modulus_sq: &[f64]) -> Vec<f64> {
        let b = self.spec.b;
        let e = self.exponent();
        match &self.riesz {
            None => plan
                .nodes()
                .iter()
                .zip(modulus_sq)
                .zip(&self.site_factors)
                .map(|((r, a), c)| c * r.powf(2.0 * b) * a.powf(e - 1.0))
                .collect(),
            Some(riesz) => {
                let g: Vec<f64> =
                    plan.nodes().iter().zip(modulus_sq).map(|(r, a)| r.powf(b) * a.powf(0.5 * e)).collect();
                let ig = riesz.apply(plan, &g);
                plan.nodes()
                    .iter()
                    .zip(modulus_sq)
                    .zip(&ig)
                    .map(|((r, a), i)| i * r.powf(b) * a.powf(0.5 * e - 1.0))
                    .collect()
            }
        }
    }

    /// ∫|x|^{2b}|u|^{2q} or ∫(I_α * |·|^b|u|^p)|x|^b|u|^p.
    pub fn potential(&self, plan: &RadialPlan, u: &Field) -> Result<f64> {
        u.expect(plan, Space::Position)?;
        let a = u.abs_sq();
        let v = self.potential_density(plan, &a);
        let integrand: Vec<f64> = v.iter().zip(&a).map(|(v, a)| v * a).collect();
        plan.radial_integral(&integrand)
    }

    /// ‖Δu‖² - P/q (local) or ‖Δu‖² - P/p (Choquard).
    pub fn energy(&self, plan: &RadialPlan, u: &Field) -> Result<f64> {
        Ok(kinetic(plan, u)? - self.potential(plan, u)? / self.exponent())
    }

    /// ‖Δu‖² - (D/2q)P or ‖Δu‖² - (B/2p)P.
    pub fn constraint_k(&self, plan: &RadialPlan, u: &Field) -> Result<f64> {
        Ok(kinetic(plan, u)? - self.constraint_weight() * self.potential(plan, u)?)
    }

    /// P / (‖u‖^E ‖Δu‖^D) or P / (‖u‖^A ‖Δu‖^B).
    pub fn gn_ratio(&self, plan: &RadialPlan, u: &Field) -> Result<f64> {
        let m = mass(plan, u)?;
        let k = kinetic(plan, u)?;
        if m == 0.0 || k == 0.0 {
            return Err(Error::ZeroField);
        }
        let (me, ke) = self.exponents.gn_pair();
        Ok(self.potential(plan, u)? / (m.powf(0.5 * me) * k.powf(0.5 * ke)))
    }

    /// Closed-form sharp Gagliardo-Nirenberg constant for a ground state of
    /// mass `gs_mass`: (2q/E)(E/D)^{D/2}‖Q‖^{-2(q-1)}.
    pub fn sharp_constant_formula(&self, gs_mass: f64) -> f64 {
        let (me, ke) = self.exponents.gn_pair();
        let e = self.exponent();
        2.0 * e / me * (me / ke).powf(0.5 * ke) * gs_mass.powf(-(e - 1.0))
    }

    pub fn report(&self, plan: &RadialPlan, u: &Field, gs: Option<&GroundStateResult>) -> Result<FunctionalReport> {
        let m = mass(plan, u)?;
        let k = kinetic(plan, u)?;
        let p = self.potential(plan, u)?;
        let energy = k - p / self.exponent();
        let (me, ke) = self.exponents.gn_pair();
        let gn = if m > 0.0 && k > 0.0 { Some(p / (m.powf(0.5 * me) * k.powf(0.5 * ke))) } else { None };
        let thresholds = gs.map(|g| thresholds_from_parts(self.exponents.critical_index(), m, k, energy, g));
        Ok(FunctionalReport {
            mass: m,
            energy,
            kinetic: k,
            potential: p,
            action: m + energy,
            constraint_k: k - self.constraint_weight() * p,
            gn_ratio: gn,
            me: thresholds.map(|t| t.me),
            mg: thresholds.map(|t| t.mg),
            boundary_mass: boundary_mass(plan, u)?,
        })
    }

    pub fn me_mg(&self, plan: &RadialPlan, u: &Field, gs: &GroundStateResult) -> Result<Thresholds> {
        let m = mass(plan, u)?;
        let k = kinetic(plan, u)?;
        let e = k - self.potential(plan, u)? / self.exponent();
        Ok(thresholds_from_parts(self.exponents.critical_index(), m, k, e, gs))
    }
}

fn thresholds_from_parts(s: f64, m: f64, k: f64, e: f64, gs: &GroundStateResult) -> Thresholds {
    let mg = (k / gs.kinetic).powf(0.5 * s) * (m / gs.mass).powf(0.5 * (2.0 - s));
    let me = if e < 0.0 {
        MeValue::NegativeEnergy
    } else {
        MeValue::Value((e / gs.energy).powf(s) * (m / gs.mass).powf(2.0 - s))
    };
    Thresholds { me, mg }
}

/// ME may be undefined as a real power when the energy is negative; such data
/// lies below the threshold on the blow-up side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
pub enum MeValue {
    Value(f64),
    NegativeEnergy,
}

impl MeValue {
    pub fn value(self) -> Option<f64> {
        match self {
            MeValue::Value(v) => Some(v),
            MeValue::NegativeEnergy => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub me: MeValue,
    pub mg: f64,
}

impl Thresholds {
    /// Both ratios strictly below one.
    pub fn below(&self) -> bool {
        self.mg < 1.0 && self.me.value().is_some_and(|v| v < 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub mass: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub action: f64,
    pub constraint_k: f64,
    pub gn_ratio: Option<f64>,
    pub me: Option<MeValue>,
    pub mg: Option<f64>,
    pub boundary_mass: f64,
}

/// ∫|u|².
pub fn mass(plan: &RadialPlan, u: &Field) -> Result<f64> {
    u.expect(plan, Space::Position)?;
    plan.radial_integral(&u.abs_sq())
}

/// ‖Δu‖², evaluated spectrally.
pub fn kinetic(plan: &RadialPlan, u: &Field) -> Result<f64> {
    let f = plan.hankel_forward(u)?;
    spectral_kinetic(plan, &f)
}

pub fn spectral_kinetic(plan: &RadialPlan, f: &Field) -> Result<f64> {
    f.expect(plan, Space::Spectral)?;
    let s: Vec<f64> = f.values().iter().zip(plan.spectral_nodes()).map(|(z, p)| p.powi(4) * z.norm_sqr()).collect();
    plan.spectral_integral(&s)
}

/// ‖∇u‖², evaluated spectrally.
pub fn gradient_sq(plan: &RadialPlan, u: &Field) -> Result<f64> {
    let f = plan.hankel_forward(u)?;
    let s: Vec<f64> = f.values().iter().zip(plan.spectral_nodes()).map(|(z, p)| p * p * z.norm_sqr()).collect();
    plan.spectral_integral(&s)
}

/// ∫_{r > 0.9 R_max}|u|².
pub fn boundary_mass(plan: &RadialPlan, u: &Field) -> Result<f64> {
    u.expect(plan, Space::Position)?;
    let edge = 0.9 * plan.r_max();
    let s: Vec<f64> =
        u.values().iter().zip(plan.nodes()).map(|(z, &r)| if r > edge { z.norm_sqr() } else { 0.0 }).collect();
    plan.radial_integral(&s)
}

/// ∫|u|^r as a grid quantity (‖u‖_r^r).
pub fn lebesgue_norm(plan: &RadialPlan, u: &Field, r: f64) -> Result<f64> {
    u.expect(plan, Space::Position)?;
    if r.is_infinite() {
        return Ok(u.values().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let s: Vec<f64> = u.values().iter().map(|z| z.norm().powf(r)).collect();
    Ok(plan.radial_integral(&s)?.powf(1.0 / r))
}
