//! Bessel functions of integer and half-integer order, their zeros, Gauss-Legendre
//! rules and finite-difference weights.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Order of a Bessel function. Radial problems in dimension N only need
/// ν = N/2 - 1 and ν + 1, which are always integers or half-integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Integer(i32),
    /// `HalfInteger(n)` is the order n + 1/2.
    HalfInteger(u32),
}

impl BesselOrder {
    /// ν = N/2 - 1.
    pub fn for_dimension(dim: usize) -> Self {
        assert!(dim >= 2, "dimension must be at least 2");
        if dim.is_multiple_of(2) {
            BesselOrder::Integer(dim as i32 / 2 - 1)
        } else {
            BesselOrder::HalfInteger((dim as u32 - 3) / 2)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            BesselOrder::Integer(n) => n as f64,
            BesselOrder::HalfInteger(n) => n as f64 + 0.5,
        }
    }

    pub fn next(self) -> Self {
        match self {
            BesselOrder::Integer(n) => BesselOrder::Integer(n + 1),
            BesselOrder::HalfInteger(n) => BesselOrder::HalfInteger(n + 1),
        }
    }
}

/// J_ν(x) for x ≥ 0.
pub fn bessel_j(order: BesselOrder, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    match order {
        BesselOrder::Integer(n) => libm::jn(n, x),
        BesselOrder::HalfInteger(n) => {
            if x == 0.0 {
                0.0
            } else {
                (2.0 * x / PI).sqrt() * spherical_jn(n, x)
            }
        }
    }
}

/// Derivative J'_ν(x) = (ν/x) J_ν(x) - J_{ν+1}(x).
pub fn bessel_j_prime(order: BesselOrder, x: f64) -> f64 {
    order.value() / x * bessel_j(order, x) - bessel_j(order.next(), x)
}

/// Spherical Bessel function j_n(x).
pub fn spherical_jn(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    if x < nf + 2.0 {
        // ascending series, no cancellation trouble this close to the origin
        let mut lead = 1.0;
        for m in 0..n {
            lead *= x / (2 * m + 3) as f64;
        }
        let mut term = 1.0;
        let mut sum = 1.0;
        let y = -0.5 * x * x;
        for k in 0..200 {
            term *= y / ((k + 1) as f64 * (2.0 * nf + 2.0 * k as f64 + 3.0));
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return lead * sum;
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if n == 0 {
        return j0;
    }
    let mut prev = j0;
    let mut cur = s / (x * x) - c / x;
    for m in 1..n {
        let next = (2 * m + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// First `count` positive zeros of J_ν, by Newton iteration from McMahon's
/// asymptotic guesses.
pub fn bessel_zeros(order: BesselOrder, count: usize) -> Result<Vec<f64>> {
    let nu = order.value();
    let mu = 4.0 * nu * nu;
    let mut zeros = Vec::with_capacity(count);
    for k in 1..=count {
        let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
        let e = 8.0 * beta;
        let mut x = beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3));
        if let Some(&last) = zeros.last() {
            // the asymptotic guess is poor for low k and large ν
            if x <= last + 0.5 * PI {
                x = last + PI;
            }
        }
        let fail = Error::BesselZeroFailure { order: nu, index: k };
        let mut converged = false;
        for _ in 0..100 {
            let f = bessel_j(order, x);
            let dx = f / bessel_j_prime(order, x);
            x -= dx;
            if !x.is_finite() || x <= 0.0 {
                return Err(fail);
            }
            if dx.abs() <= 4.0 * f64::EPSILON * x {
                converged = true;
                break;
            }
        }
        if !converged || bessel_j(order, x).abs() > 1e-12 {
            return Err(fail);
        }
        let gap_ok = match zeros.last() {
            Some(&last) => x - last > 0.75 * PI && x - last < 2.0 * PI,
            None => x > nu,
        };
        if !gap_ok {
            return Err(fail);
        }
        zeros.push(x);
    }
    Ok(zeros)
}

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Finite-difference weights for the derivative of order `m` at `z` from
/// values at `xs` (Fornberg's recursion).
pub fn fd_weights(z: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Surface area of the unit sphere in ℝᴺ, 2π^{N/2}/Γ(N/2).
pub fn sphere_area(dim: usize) -> f64 {
    let h = 0.5 * dim as f64;
    2.0 * PI.powf(h) / libm::tgamma(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_integer_closed_forms() {
        for &x in &[0.1, 1.0, 3.7, 12.0, 250.0] {
            let j12 = (2.0 / (PI * x)).sqrt() * x.sin();
            assert_relative_eq!(bessel_j(BesselOrder::HalfInteger(0), x), j12, max_relative = 1e-13);
            let j32 = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
            assert_relative_eq!(bessel_j(BesselOrder::HalfInteger(1), x), j32, epsilon = 1e-14, max_relative = 1e-11);
        }
    }

    #[test]
    fn series_and_recurrence_agree_at_switch() {
        for n in 0..5u32 {
            let x = n as f64 + 2.0;
            let below = spherical_jn(n, x - 1e-9);
            let above = spherical_jn(n, x);
            assert!((below - above).abs() < 1e-8, "n={n}");
        }
    }

    #[test]
    fn zeros_of_j32_solve_tan_x_eq_x() {
        let z = bessel_zeros(BesselOrder::HalfInteger(1), 5).unwrap();
        for &x in &z {
            assert!((x.tan() - x).abs() < 1e-9 * x.abs().max(1.0) * (1.0 + x.tan().powi(2)));
        }
        assert_relative_eq!(z[0], 4.493409457909064, epsilon = 1e-12);
    }

    #[test]
    fn integer_zeros() {
        let z = bessel_zeros(BesselOrder::Integer(1), 3).unwrap();
        assert_relative_eq!(z[0], 3.8317059702075125, epsilon = 1e-12);
        assert_relative_eq!(z[2], 10.173468135062722, epsilon = 1e-12);
        let z0 = bessel_zeros(BesselOrder::Integer(0), 1).unwrap();
        assert_relative_eq!(z0[0], 2.404825557695773, epsilon = 1e-12);
    }

    #[test]
    fn many_zeros_are_spaced_by_pi() {
        let z = bessel_zeros(BesselOrder::HalfInteger(1), 2000).unwrap();
        let gap = z[1999] - z[1998];
        assert!((gap - PI).abs() < 1e-6);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        let s: f64 = w.iter().sum();
        assert_relative_eq!(s, 2.0, epsilon = 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert_relative_eq!(m, 2.0 / 23.0, epsilon = 1e-14);
        let (x, w) = gauss_legendre(7);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(6)).sum();
        assert_relative_eq!(m, 2.0 / 7.0, epsilon = 1e-14);
    }

    #[test]
    fn fornberg_first_derivative() {
        let xs = [0.0, 0.3, 0.7, 1.2, 1.5];
        let w = fd_weights(0.7, &xs, 1);
        let d: f64 = xs.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert_relative_eq!(d, 4.0 * 0.7f64.powi(3), epsilon = 1e-12);
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(3), 4.0 * PI, epsilon = 1e-13);
        assert_relative_eq!(sphere_area(5), 8.0 * PI * PI / 3.0, epsilon = 1e-13);
    }
}
