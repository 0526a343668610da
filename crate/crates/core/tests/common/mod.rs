//! Independent numerical oracles for the integration tests. Nothing here
//! calls into the crate under test.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson quadrature on [a, b].
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 48)
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton on P_n.
pub fn legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Composite Gauss-Legendre over `panels` equal panels of [a, b].
pub fn composite(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * h;
            x.iter().zip(&w).map(|(xi, wi)| wi * f(lo + 0.5 * h * (xi + 1.0))).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// n-th positive root of tan x = x, the n-th zero of J_{3/2}.
pub fn tan_root(n: usize) -> f64 {
    let g = |x: f64| x.sin() - x * x.cos();
    let (mut lo, mut hi) = (n as f64 * PI + 1e-9, n as f64 * PI + 0.5 * PI - 1e-9);
    assert!(g(lo) * g(hi) < 0.0);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if g(lo) * g(m) <= 0.0 {
            hi = m;
        } else {
            lo = m;
        }
    }
    0.5 * (lo + hi)
}

/// Lanczos Γ for the test-side constants.
pub fn gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let s: f64 = G[0] + (1..9).map(|i| G[i] / (x + i as f64)).sum::<f64>();
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * s
}

/// |S^{N-1}|.
pub fn sphere(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0)
}

/// ∫_{ℝᴺ} f(|x|) dx for a radial f decaying well before `r_max`, via the
/// substitution r = s² which tames r^β-type origin behavior.
pub fn radial(f: &dyn Fn(f64) -> f64, n: usize, r_max: f64) -> f64 {
    let g = |s: f64| {
        let r = s * s;
        f(r) * r.powi(n as i32 - 1) * 2.0 * s
    };
    sphere(n) * composite(&g, 0.0, r_max.sqrt(), 400, 16)
}

/// (-Δ)^{-1} g in ℝᴺ for radial g, from the radial Green's function:
/// ( r^{2-N}∫_0^r g s^{N-1} ds + ∫_r^∞ g s ds ) / (N-2).
pub fn newton_potential(g: &dyn Fn(f64) -> f64, n: usize, r: f64, r_max: f64) -> f64 {
    let nf = n as f64;
    let inner = |s: f64| g(s) * s.powi(n as i32 - 1);
    let outer = |s: f64| g(s) * s;
    let a = composite(&|t: f64| inner(t * t) * 2.0 * t, 0.0, r.sqrt(), 64, 16);
    let b = composite(&|t: f64| outer(t * t) * 2.0 * t, r.sqrt(), r_max.sqrt(), 256, 16);
    (r.powf(2.0 - nf) * a + b) / (nf - 2.0)
}

/// J_{3/2} in closed form.
pub fn j32(x: f64) -> f64 {
    ((x.sin() / x - x.cos()) / x) * (2.0 * x / PI).sqrt()
}
