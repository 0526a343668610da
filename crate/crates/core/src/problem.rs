//! Static data of the two equations: exponents, critical indices, theorem
//! hypotheses and Strichartz admissibility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scaling relations are checked to this absolute tolerance.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "local")]
    LocalPower,
    #[serde(rename = "choquard")]
    Choquard,
}

/// `i u_t + Δ²u - |x|^{2b}|u|^{2(q-1)}u = 0` or its Choquard counterpart
/// `i u_t + Δ²u - (I_α * |·|^b|u|^p)|x|^b|u|^{p-2}u = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub family: Family,
    pub dim: usize,
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl ProblemSpec {
    pub fn local(dim: usize, b: f64, q: f64) -> Self {
        Self { family: Family::LocalPower, dim, b, q: Some(q), p: None, alpha: None }
    }

    pub fn choquard(dim: usize, alpha: f64, b: f64, p: f64) -> Self {
        Self { family: Family::Choquard, dim, b, q: None, p: Some(p), alpha: Some(alpha) }
    }

    /// The nonlinearity exponent of the active family (q or p).
    pub fn exponent(&self) -> Result<f64> {
        match self.family {
            Family::LocalPower => self.q.ok_or(Error::SpecMismatch("LocalPower")),
            Family::Choquard => self.p.ok_or(Error::SpecMismatch("Choquard")),
        }
    }

    pub fn alpha(&self) -> Result<f64> {
        self.alpha.ok_or(Error::SpecMismatch("Choquard"))
    }

    /// Homogeneity degree of the nonlinearity 𝒩(u), 2q-1 or 2p-1.
    pub fn degree(&self) -> Result<f64> {
        Ok(2.0 * self.exponent()? - 1.0)
    }

    /// Violated invariants, each named by the failed inequality.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.dim as f64;
        let two_b = 2.0 * self.b;
        if self.dim < 3 {
            out.push("N≥3".to_string());
        }
        match self.family {
            Family::LocalPower => {
                if self.p.is_some() || self.alpha.is_some() {
                    out.push("LocalPower sets only q".to_string());
                }
                match self.q {
                    None => out.push("q is set".to_string()),
                    Some(q) if !(q > 1.0) => out.push("q>1".to_string()),
                    _ => {}
                }
                if !((-4.0f64).max(-n / 2.0) < two_b) {
                    out.push("max{−4,−N/2}<2b".to_string());
                }
                if !(two_b < 0.0) {
                    out.push("2b<0".to_string());
                }
            }
            Family::Choquard => {
                if self.q.is_some() {
                    out.push("Choquard sets only p and α".to_string());
                }
                match self.p {
                    None => out.push("p is set".to_string()),
                    Some(p) if !(p >= 2.0) => out.push("p≥2".to_string()),
                    _ => {}
                }
                let Some(a) = self.alpha else {
                    out.push("α is set".to_string());
                    return out;
                };
                if !(0.0 < a && a < n) {
                    out.push("0<α<N".to_string());
                }
                let lower = (-(n + a)).max(-4.0 * (1.0 + a / n)).max(n - 8.0 - a);
                if !(lower < two_b) {
                    out.push("max{−(N+α),−4(1+α/N),N−8−α}<2b".to_string());
                }
                if !(two_b < 0.0) {
                    out.push("2b<0".to_string());
                }
                if (3..=4).contains(&self.dim) && !(2.0 * a + 4.0 * self.b + n > 0.0) {
                    out.push("2α+4b+N>0".to_string());
                }
            }
        }
        if !self.b.is_finite() || self.q.is_some_and(|v| !v.is_finite()) || self.p.is_some_and(|v| !v.is_finite()) {
            out.push("parameters are finite".to_string());
        }
        out
    }
}

/// Derived exponents of a spec. Fields of the inactive family are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedExponents {
    pub family: Family,
    pub s_c: Option<f64>,
    pub s_c_prime: Option<f64>,
    pub q_star: Option<f64>,
    pub q_upper: Option<f64>,
    pub p_star: Option<f64>,
    pub p_upper: Option<f64>,
    pub d: Option<f64>,
    pub e: Option<f64>,
    pub a: Option<f64>,
    #[serde(rename = "B")]
    pub b_pair: Option<f64>,
    pub x0: Option<f64>,
    pub x_alpha: Option<f64>,
}

impl DerivedExponents {
    /// Critical Sobolev index of the active family.
    pub fn critical_index(&self) -> f64 {
        self.s_c.or(self.s_c_prime).expect("one family is always set")
    }

    /// Exponents (mass, kinetic) of the Gagliardo-Nirenberg inequality:
    /// (E, D) for the local power, (A, B) for Choquard.
    pub fn gn_pair(&self) -> (f64, f64) {
        match self.family {
            Family::LocalPower => (self.e.unwrap(), self.d.unwrap()),
            Family::Choquard => (self.a.unwrap(), self.b_pair.unwrap()),
        }
    }

    /// Kinetic exponent of the Gagliardo-Nirenberg pair, D or B.
    pub fn kinetic_exponent(&self) -> f64 {
        self.gn_pair().1
    }
}

pub fn derive_exponents(spec: &ProblemSpec) -> Result<DerivedExponents> {
    let violations = spec.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidSpec(violations));
    }
    let n = spec.dim as f64;
    let b = spec.b;
    let upper = |c: f64| if spec.dim >= 5 { 1.0 + c / (n - 4.0) } else { f64::INFINITY };
    let root = threshold_root(spec).ok();
    let mut out = DerivedExponents {
        family: spec.family,
        s_c: None,
        s_c_prime: None,
        q_star: None,
        q_upper: None,
        p_star: None,
        p_upper: None,
        d: None,
        e: None,
        a: None,
        b_pair: None,
        x0: None,
        x_alpha: None,
    };
    match spec.family {
        Family::LocalPower => {
            let q = spec.q.unwrap();
            let d = (n * q - n - 2.0 * b) / 2.0;
            out.s_c = Some(n / 2.0 - (2.0 + b) / (q - 1.0));
            out.q_star = Some(1.0 + (4.0 + 2.0 * b) / n);
            out.q_upper = Some(upper(4.0 + 2.0 * b));
            out.d = Some(d);
            out.e = Some(2.0 * q - d);
            out.x0 = root;
        }
        Family::Choquard => {
            let p = spec.p.unwrap();
            let a = spec.alpha.unwrap();
            let bb = (n * p - n - a - 2.0 * b) / 2.0;
            out.s_c_prime = Some(n / 2.0 - (4.0 + 2.0 * b + a) / (2.0 * (p - 1.0)));
            out.p_star = Some(1.0 + (4.0 + 2.0 * b + a) / n);
            out.p_upper = Some(upper(4.0 + 2.0 * b + a));
            out.b_pair = Some(bb);
            out.a = Some(2.0 * p - bb);
            out.x_alpha = root;
        }
    }
    Ok(out)
}

/// Constant term c of the threshold polynomial 2X² - 3X + 1 - c.
fn threshold_constant(spec: &ProblemSpec) -> Result<f64> {
    if spec.dim < 5 {
        return Err(Error::DimensionTooSmall { dim: spec.dim });
    }
    let n4 = spec.dim as f64 - 4.0;
    Ok(match spec.family {
        Family::LocalPower => 2.0 * (2.0 + spec.b) / n4,
        Family::Choquard => (4.0 + 2.0 * spec.b + spec.alpha()?) / n4,
    })
}

/// The threshold polynomial P(X) = (2X-1)(X-1) - c evaluated at `x`.
pub fn threshold_polynomial(spec: &ProblemSpec, x: f64) -> Result<f64> {
    let c = threshold_constant(spec)?;
    Ok((2.0 * x - 1.0) * (x - 1.0) - c)
}

/// Larger root x₀ (or x_α) of the threshold polynomial; P > 0 above it.
pub fn threshold_root(spec: &ProblemSpec) -> Result<f64> {
    let c = threshold_constant(spec)?;
    // 2X² - 3X + (1 - c) = 0
    let disc = 9.0 - 8.0 * (1.0 - c);
    if disc < 0.0 {
        return Err(Error::InvalidSpec(vec!["threshold polynomial has real roots".to_string()]));
    }
    Ok((3.0 + disc.sqrt()) / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremWindow {
    pub lower: f64,
    /// The lower bound is attained (it comes from q ≥ 3/2 or p ≥ max{2, 3/2+α/N}).
    pub lower_inclusive: bool,
    pub upper: f64,
    pub contains: bool,
}

/// Range of nonlinearity exponents for which the scattering theorems apply.
pub fn theorem_window(spec: &ProblemSpec) -> Result<TheoremWindow> {
    let ex = derive_exponents(spec)?;
    let root = threshold_root(spec)?;
    let (strict, closed, upper) = match spec.family {
        Family::LocalPower => (ex.q_star.unwrap().max(root), 1.5, ex.q_upper.unwrap()),
        Family::Choquard => {
            let a = spec.alpha()?;
            (ex.p_star.unwrap().max(root), 2.0f64.max(1.5 + a / spec.dim as f64), ex.p_upper.unwrap())
        }
    };
    let (lower, lower_inclusive) = if closed > strict { (closed, true) } else { (strict, false) };
    if lower >= upper {
        return Err(Error::EmptyWindow { lo: lower, hi: upper });
    }
    let x = spec.exponent()?;
    let above = if lower_inclusive { x >= lower } else { x > lower };
    Ok(TheoremWindow { lower, lower_inclusive, upper, contains: above && x < upper })
}

/// Whether (qt, r) is s-admissible in dimension N: 2 ≤ qt, r ≤ ∞,
/// 2N/(N-2s) ≤ r < 2N/(N-4) and N(1/2 - 1/r) = 4/qt + s.
pub fn is_admissible_pair(qt: f64, r: f64, s: f64, dim: usize) -> bool {
    if dim == 0 || !(0.0..2.0).contains(&s) || qt.is_nan() || r.is_nan() {
        return false;
    }
    let n = dim as f64;
    if qt < 2.0 || r < 2.0 {
        return false;
    }
    if n - 2.0 * s <= 0.0 || r < 2.0 * n / (n - 2.0 * s) {
        return false;
    }
    if dim > 4 && r >= 2.0 * n / (n - 4.0) {
        return false;
    }
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    (n * (0.5 - inv(r)) - 4.0 * inv(qt) - s).abs() <= IDENTITY_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn local_flagship_exponents() {
        let ex = derive_exponents(&ProblemSpec::local(5, -0.5, 2.5)).unwrap();
        assert_abs_diff_eq!(ex.s_c.unwrap(), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.d.unwrap(), 4.25, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.e.unwrap(), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.q_star.unwrap(), 1.6, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.q_upper.unwrap(), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.x0.unwrap(), 2.0, epsilon = 1e-12);
        assert!(ex.p_star.is_none() && ex.a.is_none());
    }

    #[test]
    fn choquard_flagship_exponents() {
        let ex = derive_exponents(&ProblemSpec::choquard(5, 2.0, -0.5, 2.5)).unwrap();
        assert_abs_diff_eq!(ex.s_c_prime.unwrap(), 5.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.b_pair.unwrap(), 3.25, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.a.unwrap(), 1.75, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.p_star.unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.p_upper.unwrap(), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.x_alpha.unwrap(), (3.0 + 41f64.sqrt()) / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn windows() {
        let w = theorem_window(&ProblemSpec::local(5, -0.5, 2.5)).unwrap();
        assert_abs_diff_eq!(w.lower, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.upper, 4.0, epsilon = 1e-12);
        assert!(w.contains);
        assert!(!theorem_window(&ProblemSpec::local(5, -0.5, 1.7)).unwrap().contains);
        let w = theorem_window(&ProblemSpec::choquard(5, 2.0, -0.5, 2.5)).unwrap();
        assert_abs_diff_eq!(w.lower, (3.0 + 41f64.sqrt()) / 4.0, epsilon = 1e-12);
        assert!(w.contains);
    }

    #[test]
    fn low_dimension_has_no_threshold_root() {
        let spec = ProblemSpec::local(4, -0.5, 2.0);
        assert_eq!(threshold_root(&spec), Err(Error::DimensionTooSmall { dim: 4 }));
        assert!(derive_exponents(&spec).unwrap().q_upper.unwrap().is_infinite());
    }

    #[test]
    fn violations_are_named() {
        assert!(ProblemSpec::choquard(5, 2.0, -0.5, 2.5).validate().is_empty());
        assert_eq!(ProblemSpec::choquard(3, 0.5, -1.2, 2.0).validate(), vec!["2α+4b+N>0"]);
        assert_eq!(ProblemSpec::local(5, -2.1, 2.0).validate(), vec!["max{−4,−N/2}<2b"]);
        assert!(matches!(derive_exponents(&ProblemSpec::local(5, 0.1, 2.0)), Err(Error::InvalidSpec(_))));
        let mut mixed = ProblemSpec::local(5, -0.5, 2.5);
        mixed.alpha = Some(1.0);
        assert!(!mixed.validate().is_empty());
    }

    #[test]
    fn admissible_examples() {
        assert!(is_admissible_pair(f64::INFINITY, 2.0, 0.0, 5));
        assert!(is_admissible_pair(4.0, 10.0 / 3.0, 0.0, 5));
        assert!(!is_admissible_pair(2.0, 10.0, 0.0, 5));
    }
}
