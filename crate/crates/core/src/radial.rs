//! Radial functions on a Bessel-zero grid: discrete Hankel transform of order
//! N/2 - 1, quadrature over ℝᴺ, spectral multipliers, a radial derivative and
//! the Riesz potential.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{bessel_j, bessel_zeros, fd_weights, gauss_legendre, sphere_area, BesselOrder};

/// Rows per rayon task in the transform matrix-vector products.
const ROW_CHUNK: usize = 32;

/// Points per finite-difference stencil (order STENCIL - 1).
const STENCIL: usize = 9;

/// Nodes next to the origin whose weights are adjusted for singular
/// integrands.
const SINGULAR_NODES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Position,
    Spectral,
}

/// Complex samples of a radial function at the plan nodes r_k, or its Hankel
/// coefficients at the spectral nodes ρ_k.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    space: Space,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(space: Space, values: Vec<Complex64>) -> Result<Self> {
        if values.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("field samples".into()));
        }
        Ok(Self { space, values })
    }

    pub fn from_real(space: Space, values: &[f64]) -> Result<Self> {
        Self::new(space, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub(crate) fn from_parts(space: Space, values: Vec<Complex64>) -> Self {
        Self { space, values }
    }

    pub fn zeros(space: Space, k: usize) -> Self {
        Self { space, values: vec![Complex64::new(0.0, 0.0); k] }
    }

    /// Samples f(r_k) of a radial function given as a closure of r.
    pub fn sample(plan: &RadialPlan, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(Space::Position, plan.nodes().iter().map(|&r| f(r)).collect())
    }

    pub fn sample_real(plan: &RadialPlan, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::sample(plan, |r| Complex64::new(f(r), 0.0))
    }

    /// A smooth radial test field: a sum of `terms` pieces c·r^{2m}e^{-r²/w²}
    /// with complex c in the unit square, m ∈ {0,1,2} and w ∈ [0.6, 3].
    /// Even in r, so it is smooth at the origin of ℝᴺ.
    pub fn random_smooth<R: Rng + ?Sized>(plan: &RadialPlan, rng: &mut R, terms: usize) -> Result<Self> {
        let pieces: Vec<(Complex64, i32, f64)> = (0..terms)
            .map(|_| {
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                (c, rng.gen_range(0..3), rng.gen_range(0.6..3.0))
            })
            .collect();
        Self::sample(plan, |r| pieces.iter().map(|&(c, m, w)| c * r.powi(2 * m) * (-(r / w).powi(2)).exp()).sum())
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { space: self.space, values: self.values.iter().map(|z| z * c).collect() }
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn abs_sq(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.is_finite())
    }

    pub(crate) fn expect(&self, plan: &RadialPlan, space: Space) -> Result<()> {
        if self.values.len() != plan.len() {
            return Err(Error::PlanMismatch { expected: plan.len(), found: self.values.len() });
        }
        if self.space != space {
            return Err(Error::SpaceMismatch { expected: space, found: self.space });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Stencil {
    start: usize,
    weights: [f64; STENCIL],
}

/// Discretization of radial functions on ℝᴺ truncated to r < R_max.
#[derive(Debug, Clone)]
pub struct RadialPlan {
    dim: usize,
    r_max: f64,
    order: BesselOrder,
    omega: f64,
    zeros: Vec<f64>,
    nodes: Vec<f64>,
    rho: Vec<f64>,
    weights: Vec<f64>,
    spectral_weights: Vec<f64>,
    scale_pos: Vec<f64>,
    scale_spec: Vec<f64>,
    matrix: Vec<f64>,
    stencils: Vec<Stencil>,
}

impl RadialPlan {
    pub fn new(dim: usize, k: usize, r_max: f64) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidGrid(format!("dimension {dim} < 3")));
        }
        if k < 64 {
            return Err(Error::InvalidGrid(format!("K={k} < 64")));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidGrid(format!("R_max={r_max} must be positive")));
        }
        let order = BesselOrder::for_dimension(dim);
        let nu = order.value();
        let all = bessel_zeros(order, k + 1)?;
        let s = all[k];
        let zeros = all[..k].to_vec();
        let v = s / r_max;
        let omega = sphere_area(dim);
        let nodes: Vec<f64> = zeros.iter().map(|j| j / v).collect();
        let rho: Vec<f64> = zeros.iter().map(|j| j / r_max).collect();
        let jnext: Vec<f64> = zeros.iter().map(|&j| bessel_j(order.next(), j).abs()).collect();
        let scale_pos: Vec<f64> = nodes.iter().zip(&jnext).map(|(r, j1)| 2f64.sqrt() * r.powf(nu) / (v * j1)).collect();
        let scale_spec: Vec<f64> =
            rho.iter().zip(&jnext).map(|(p, j1)| 2f64.sqrt() * p.powf(nu) / (r_max * j1)).collect();
        let weights = scale_pos.iter().map(|a| omega * a * a).collect();
        let spectral_weights = scale_spec.iter().map(|a| omega * a * a).collect();

        let mut matrix = vec![0.0; k * k];
        matrix.par_chunks_mut(k).enumerate().for_each(|(m, row)| {
            for (kk, out) in row.iter_mut().enumerate() {
                let x = zeros[m] * zeros[kk] / s;
                *out = 2.0 * bessel_j(order, x) / (s * jnext[m] * jnext[kk]);
            }
        });

        orthogonalize(&mut matrix, k);

        let stencils = (0..k)
            .map(|i| {
                let start = i.saturating_sub(STENCIL / 2).min(k - STENCIL);
                let w = fd_weights(nodes[i], &nodes[start..start + STENCIL], 1);
                Stencil { start, weights: std::array::from_fn(|j| w[j]) }
            })
            .collect();

        Ok(Self {
            dim,
            r_max,
            order,
            omega,
            zeros,
            nodes,
            rho,
            weights,
            spectral_weights,
            scale_pos,
            scale_spec,
            matrix,
            stencils,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn order(&self) -> BesselOrder {
        self.order
    }

    /// ω_{N-1} = 2π^{N/2}/Γ(N/2).
    pub fn sphere_area(&self) -> f64 {
        self.omega
    }

    /// Positive zeros j_{ν,1..K} of J_ν.
    pub fn bessel_zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spectral_nodes(&self) -> &[f64] {
        &self.rho
    }

    /// Position-space quadrature weights: ∫_{ℝᴺ} f dx ≈ Σ w_k f(r_k).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Spectral weights, so that Σ w_k |f_k|² = Σ ŵ_m |F_m|².
    pub fn spectral_weights(&self) -> &[f64] {
        &self.spectral_weights
    }

    /// Transform matrix entry T_{mk}.
    pub fn matrix_entry(&self, m: usize, k: usize) -> f64 {
        self.matrix[m * self.len() + k]
    }

    fn matvec(&self, input: &[Complex64]) -> Vec<Complex64> {
        let k = self.len();
        let mut out = vec![Complex64::new(0.0, 0.0); k];
        out.par_chunks_mut(ROW_CHUNK).enumerate().for_each(|(c, chunk)| {
            for (i, o) in chunk.iter_mut().enumerate() {
                let row = &self.matrix[(c * ROW_CHUNK + i) * k..][..k];
                let (mut re, mut im) = (0.0, 0.0);
                for (t, z) in row.iter().zip(input) {
                    re += t * z.re;
                    im += t * z.im;
                }
                *o = Complex64::new(re, im);
            }
        });
        out
    }

    fn matvec_real(&self, input: &[f64]) -> Vec<f64> {
        let k = self.len();
        let mut out = vec![0.0; k];
        out.par_chunks_mut(ROW_CHUNK).enumerate().for_each(|(c, chunk)| {
            for (i, o) in chunk.iter_mut().enumerate() {
                let row = &self.matrix[(c * ROW_CHUNK + i) * k..][..k];
                *o = row.iter().zip(input).map(|(t, x)| t * x).sum();
            }
        });
        out
    }

    pub(crate) fn forward_raw(&self, f: &[Complex64]) -> Vec<Complex64> {
        let g: Vec<Complex64> = f.iter().zip(&self.scale_pos).map(|(z, a)| z * a).collect();
        let mut out = self.matvec(&g);
        out.iter_mut().zip(&self.scale_spec).for_each(|(z, b)| *z /= b);
        out
    }

    pub(crate) fn inverse_raw(&self, f: &[Complex64]) -> Vec<Complex64> {
        let g: Vec<Complex64> = f.iter().zip(&self.scale_spec).map(|(z, b)| z * b).collect();
        let mut out = self.matvec(&g);
        out.iter_mut().zip(&self.scale_pos).for_each(|(z, a)| *z /= a);
        out
    }

    pub(crate) fn forward_real(&self, f: &[f64]) -> Vec<f64> {
        let g: Vec<f64> = f.iter().zip(&self.scale_pos).map(|(x, a)| x * a).collect();
        let mut out = self.matvec_real(&g);
        out.iter_mut().zip(&self.scale_spec).for_each(|(x, b)| *x /= b);
        out
    }

    pub(crate) fn inverse_real(&self, f: &[f64]) -> Vec<f64> {
        let g: Vec<f64> = f.iter().zip(&self.scale_spec).map(|(x, b)| x * b).collect();
        let mut out = self.matvec_real(&g);
        out.iter_mut().zip(&self.scale_pos).for_each(|(x, a)| *x /= a);
        out
    }

    pub fn hankel_forward(&self, f: &Field) -> Result<Field> {
        f.expect(self, Space::Position)?;
        Ok(Field::from_parts(Space::Spectral, self.forward_raw(f.values())))
    }

    pub fn hankel_inverse(&self, f: &Field) -> Result<Field> {
        f.expect(self, Space::Spectral)?;
        Ok(Field::from_parts(Space::Position, self.inverse_raw(f.values())))
    }

    /// Σ w_k s_k.
    pub fn radial_integral(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.len() {
            return Err(Error::PlanMismatch { expected: self.len(), found: samples.len() });
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("integrand".into()));
        }
        Ok(self.weights.iter().zip(samples).map(|(w, s)| w * s).sum())
    }

    /// Σ ŵ_m s_m, the spectral-side counterpart of `radial_integral`.
    pub fn spectral_integral(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.len() {
            return Err(Error::PlanMismatch { expected: self.len(), found: samples.len() });
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("spectral integrand".into()));
        }
        Ok(self.spectral_weights.iter().zip(samples).map(|(w, s)| w * s).sum())
    }

    /// Pointwise product F(ρ_k)·m(ρ_k).
    pub fn apply_multiplier(&self, f: &Field, m: impl Fn(f64) -> Complex64) -> Result<Field> {
        f.expect(self, Space::Spectral)?;
        let mut out = Vec::with_capacity(self.len());
        for (z, &p) in f.values().iter().zip(&self.rho) {
            let mk = m(p);
            if !mk.is_finite() {
                return Err(Error::NonFinite(format!("multiplier at ρ={p}")));
            }
            out.push(z * mk);
        }
        Ok(Field::from_parts(Space::Spectral, out))
    }

    /// Weight factors c_k (1 beyond the first few nodes) such that
    /// Σ c_k w_k f(r_k) integrates f = r^β g(r²) with g smooth. The plain
    /// weights are spectrally accurate only for even integrands; an r^β
    /// factor leaves an O(h^{N+β}) endpoint error, h the node spacing. The
    /// factors make r^{β+2j}e^{-r²}, j < 4, integrate exactly, which removes
    /// the leading terms of that error.
    pub fn singular_factors(&self, beta: f64) -> Result<Vec<f64>> {
        let n = self.dim as f64;
        if !(beta > -n) {
            return Err(Error::InvalidGrid(format!("r^{beta} is not integrable in dimension {}", self.dim)));
        }
        let m = SINGULAR_NODES;
        let test = |j: usize, r: f64| r.powf(beta + 2.0 * j as f64) * (-r * r).exp();
        let mut a = [[0.0; SINGULAR_NODES]; SINGULAR_NODES];
        let mut rhs = [0.0; SINGULAR_NODES];
        for j in 0..m {
            for k in 0..m {
                a[j][k] = self.weights[k] * test(j, self.nodes[k]);
            }
            let exact = 0.5 * self.omega * libm::tgamma(0.5 * (n + beta) + j as f64);
            let plain: f64 = self.nodes.iter().zip(&self.weights).map(|(&r, w)| w * test(j, r)).sum();
            rhs[j] = exact - plain;
        }
        let delta = solve_small(a, rhs);
        let mut c = vec![1.0; self.len()];
        for (ck, d) in c.iter_mut().zip(delta) {
            *ck += d;
        }
        if c.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::NonFinite(format!("singular weight factors for β={beta}")));
        }
        Ok(c)
    }

    /// ∂_r f by nine-point finite differences on the node set.
    pub fn radial_derivative(&self, f: &Field) -> Result<Field> {
        f.expect(self, Space::Position)?;
        Ok(Field::from_parts(Space::Position, self.derivative_raw(f.values())))
    }

    pub(crate) fn derivative_raw(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.stencils
            .iter()
            .map(|s| s.weights.iter().zip(&f[s.start..s.start + STENCIL]).map(|(w, z)| z * w).sum())
            .collect()
    }

    /// Δf = f'' + (N-1)/r f' by repeated finite differences.
    pub fn laplacian_fd(&self, f: &Field) -> Result<Field> {
        let d1 = self.radial_derivative(f)?;
        let d2 = self.derivative_raw(d1.values());
        let c = self.dim as f64 - 1.0;
        let out = d2.iter().zip(d1.values()).zip(&self.nodes).map(|((a, b), r)| a + b * (c / r)).collect();
        Ok(Field::from_parts(Space::Position, out))
    }
}

/// One Newton-Schulz step T ← T + T(I - T²)/2 toward the nearest orthogonal
/// matrix. The sampled kernel is orthogonal only to ~1e-11 at K=512, and
/// operators like 1 + ρ⁴ amplify that round-trip defect by ~1e7; after the
/// step T is what the continuous transform is, a symmetric involution, to
/// rounding.
fn orthogonalize(t: &mut [f64], k: usize) {
    let defect = matmul(t, t, k);
    let mut e = defect;
    e.iter_mut().enumerate().for_each(|(i, x)| *x = if i % (k + 1) == 0 { 1.0 - *x } else { -*x });
    let c = matmul(t, &e, k);
    t.iter_mut().zip(&c).for_each(|(x, c)| *x += 0.5 * c);
    // restore exact symmetry
    for i in 0..k {
        for j in i + 1..k {
            let m = 0.5 * (t[i * k + j] + t[j * k + i]);
            t[i * k + j] = m;
            t[j * k + i] = m;
        }
    }
}

fn matmul(a: &[f64], b: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k * k];
    out.par_chunks_mut(k).enumerate().for_each(|(i, row)| {
        for (l, &x) in a[i * k..(i + 1) * k].iter().enumerate() {
            row.iter_mut().zip(&b[l * k..(l + 1) * k]).for_each(|(o, y)| *o += x * y);
        }
    });
    out
}

/// Gaussian elimination with partial pivoting for the tiny correction system.
fn solve_small<const M: usize>(mut a: [[f64; M]; M], mut b: [f64; M]) -> [f64; M] {
    for i in 0..M {
        let p = (i..M).max_by(|&x, &y| a[x][i].abs().total_cmp(&a[y][i].abs())).unwrap_or(i);
        a.swap(i, p);
        b.swap(i, p);
        for j in i + 1..M {
            let f = a[j][i] / a[i][i];
            for k in i..M {
                a[j][k] -= f * a[i][k];
            }
            b[j] -= f * b[i];
        }
    }
    let mut x = [0.0; M];
    for i in (0..M).rev() {
        let s: f64 = (i + 1..M).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Normalization of the Riesz kernel: I_α f = c |x|^{α-N} * f with
/// c = Γ((N-α)/2)/(Γ(α/2)π^{N/2}2^α), which makes the multiplier |ξ|^{-α}.
pub fn riesz_constant(dim: usize, alpha: f64) -> f64 {
    let n = dim as f64;
    libm::tgamma((n - alpha) / 2.0)
        / (libm::tgamma(alpha / 2.0) * std::f64::consts::PI.powf(n / 2.0) * 2f64.powf(alpha))
}

/// Riesz potential I_α on a plan.
///
/// A bare ρ^{-α} multiplier on the Dirichlet basis misses the low-frequency
/// singularity of the continuous symbol. The potential is split with a smooth
/// partition χ: frequencies above ρ_c/2 use the discrete multiplier, the rest
/// is integrated with Gauss-Legendre in the continuous radial Fourier transform
/// after the substitution ρ = ρ_c s^m, which removes the ρ^{N-1-α} corner.
#[derive(Debug, Clone)]
pub struct RieszOperator {
    alpha: f64,
    high: Vec<f64>,
    low_kernel: Vec<f64>,
    low_weights: Vec<f64>,
    low_nodes: usize,
}

impl RieszOperator {
    pub const LOW_NODES: usize = 96;
    pub const CUTOFF: f64 = 3.0;

    pub fn new(plan: &RadialPlan, alpha: f64) -> Result<Self> {
        let n = plan.dim() as f64;
        if !(alpha > 0.0 && alpha < n) {
            return Err(Error::InvalidSpec(vec!["0<α<N".to_string()]));
        }
        let rho_max = *plan.spectral_nodes().last().unwrap();
        let rc = Self::CUTOFF.min(rho_max / 4.0);
        let high = plan.spectral_nodes().iter().map(|&p| (1.0 - partition(p, rc)) * p.powf(-alpha)).collect();
        let m = (4.0 / (n - alpha)).ceil().max(1.0);
        let (x, w) = gauss_legendre(Self::LOW_NODES);
        let nu = plan.order().value();
        let k = plan.len();
        let mut low_kernel = vec![0.0; Self::LOW_NODES * k];
        let mut low_weights = vec![0.0; Self::LOW_NODES];
        for (j, (xj, wj)) in x.iter().zip(&w).enumerate() {
            let s = 0.5 * (xj + 1.0);
            let p = rc * s.powf(m);
            let dp = rc * m * s.powf(m - 1.0) * 0.5 * wj;
            low_weights[j] = dp * p.powf(n - 1.0 - alpha) * partition(p, rc) / plan.sphere_area();
            for (kk, &r) in plan.nodes().iter().enumerate() {
                let z = p * r;
                low_kernel[j * k + kk] = bessel_j(plan.order(), z) * z.powf(-nu);
            }
        }
        Ok(Self { alpha, high, low_kernel, low_weights, low_nodes: Self::LOW_NODES })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// I_α g for real radial samples g.
    pub fn apply(&self, plan: &RadialPlan, g: &[f64]) -> Vec<f64> {
        let k = plan.len();
        let mut spec = plan.forward_real(g);
        spec.iter_mut().zip(&self.high).for_each(|(x, m)| *x *= m);
        let mut out = plan.inverse_real(&spec);
        let wg: Vec<f64> = plan.weights().iter().zip(g).map(|(w, x)| w * x).collect();
        let coef: Vec<f64> = (0..self.low_nodes)
            .map(|j| {
                let row = &self.low_kernel[j * k..][..k];
                self.low_weights[j] * row.iter().zip(&wg).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect();
        for (j, c) in coef.iter().enumerate() {
            let row = &self.low_kernel[j * k..][..k];
            out.iter_mut().zip(row).for_each(|(o, a)| *o += c * a);
        }
        out
    }
}

/// Smooth partition equal to 1 on [0, rc/2] and 0 on [rc, ∞).
fn partition(p: f64, rc: f64) -> f64 {
    let s = (p - 0.5 * rc) / (0.5 * rc);
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        b / (a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plan() -> RadialPlan {
        RadialPlan::new(5, 256, 30.0).unwrap()
    }

    #[test]
    fn first_zero_and_node_layout() {
        let p = plan();
        assert_relative_eq!(p.bessel_zeros()[0], 4.493409457909064, epsilon = 1e-12);
        assert!(p.nodes()[0] > 0.0);
        assert!(p.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(p.weights().iter().all(|&w| w > 0.0));
        assert!(*p.nodes().last().unwrap() < p.r_max());
    }

    #[test]
    fn transform_is_orthogonal() {
        let p = plan();
        let k = p.len();
        let mut worst: f64 = 0.0;
        for a in [0, 7, 100, 255] {
            for b in [0, 3, 100, 200, 255] {
                let s: f64 = (0..k).map(|c| p.matrix_entry(a, c) * p.matrix_entry(c, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn rejects_wrong_space() {
        let p = plan();
        let f = Field::zeros(Space::Spectral, p.len());
        assert!(p.hankel_inverse(&f).is_ok());
        assert!(matches!(p.hankel_forward(&f), Err(Error::SpaceMismatch { .. })));
        let short = Field::zeros(Space::Position, 10);
        assert!(matches!(p.hankel_forward(&short), Err(Error::PlanMismatch { .. })));
    }

    #[test]
    fn rejects_small_grids() {
        assert!(matches!(RadialPlan::new(5, 32, 30.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(RadialPlan::new(5, 64, -1.0), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let p = plan();
        let f = Field::sample_real(&p, |_| 2.5).unwrap();
        let d = p.radial_derivative(&f).unwrap();
        assert!(d.values().iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn partition_is_monotone() {
        let xs: Vec<f64> = (0..200).map(|i| i as f64 * 0.02).collect();
        let v: Vec<f64> = xs.iter().map(|&x| partition(x, 3.0)).collect();
        assert!(v.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(v[0], 1.0);
        assert_eq!(*v.last().unwrap(), 0.0);
    }

    #[test]
    fn riesz_constant_for_newtonian_kernel() {
        // I_2 in ℝ³ is (4π|x|)^{-1}
        assert_relative_eq!(riesz_constant(3, 2.0), 1.0 / (4.0 * std::f64::consts::PI), epsilon = 1e-14);
    }
}
