mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bnls_core::radial::RieszOperator;
use bnls_core::special::{bessel_zeros, BesselOrder};
use bnls_core::{Error, Field, RadialPlan, Space};

fn plan(k: usize, r_max: f64) -> RadialPlan {
    RadialPlan::new(5, k, r_max).unwrap()
}

fn rel_l2(plan: &RadialPlan, a: &Field, b: &Field) -> f64 {
    let d: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).collect();
    (plan.radial_integral(&d).unwrap() / plan.radial_integral(&b.abs_sq()).unwrap()).sqrt()
}

#[test]
fn first_zeros_are_roots_of_tan_x_equals_x() {
    let p = plan(256, 30.0);
    assert_eq!(p.order(), BesselOrder::HalfInteger(1));
    for (n, j) in p.bessel_zeros().iter().take(40).enumerate() {
        let oracle = common::tan_root(n + 1);
        assert!((j - oracle).abs() < 1e-11, "zero {}: {j} vs {oracle}", n + 1);
    }
    assert!((p.bessel_zeros()[0] - 4.4934).abs() < 1e-4);
}

#[test]
fn grid_invariants() {
    let p = plan(256, 30.0);
    assert!(p.nodes()[0] > 0.0);
    assert!(p.nodes().windows(2).all(|w| w[1] > w[0]));
    assert!(*p.nodes().last().unwrap() < 30.0);
    assert!(p.weights().iter().all(|&w| w > 0.0));
    // r_k = j_k R / j_{K+1}
    let j = bessel_zeros(BesselOrder::HalfInteger(1), 257).unwrap();
    for k in [0, 100, 255] {
        assert!((p.nodes()[k] - j[k] * 30.0 / j[256]).abs() < 1e-12);
        assert!((p.spectral_nodes()[k] - j[k] / 30.0).abs() < 1e-12);
    }
}

#[test]
fn construction_guards() {
    assert!(matches!(RadialPlan::new(2, 256, 30.0), Err(Error::InvalidGrid(_))));
    assert!(RadialPlan::new(5, 63, 30.0).is_err());
    assert!(RadialPlan::new(5, 128, -1.0).is_err());
}

#[test]
fn gaussian_round_trip() {
    for (n, k) in [(3, 256), (4, 256), (5, 512), (7, 256)] {
        let p = RadialPlan::new(n, k, 30.0).unwrap();
        let f = Field::sample_real(&p, |r| (-r * r).exp()).unwrap();
        let back = p.hankel_inverse(&p.hankel_forward(&f).unwrap()).unwrap();
        assert!(rel_l2(&p, &back, &f) < 1e-9, "N={n}");
    }
}

#[test]
fn gaussian_self_transform_against_oscillatory_quadrature() {
    let p = plan(512, 30.0);
    let f = Field::sample_real(&p, |r| (-0.5 * r * r).exp()).unwrap();
    let big_f = p.hankel_forward(&f).unwrap();
    let max_err = big_f
        .values()
        .iter()
        .zip(p.spectral_nodes())
        .map(|(z, &rho)| (z - (-0.5 * rho * rho).exp()).norm())
        .fold(0.0, f64::max);
    assert!(max_err < 1e-8, "{max_err:e}");

    // F(ρ) = ρ^{-ν} ∫ f(r) J_ν(ρr) r^{ν+1} dr for ν = 3/2, by direct quadrature
    let j32 = |x: f64| ((x.sin() / x - x.cos()) / x) * (2.0 * x / PI).sqrt();
    for m in (0..100).step_by(10) {
        let rho = p.spectral_nodes()[m];
        let integrand = |r: f64| (-0.5 * r * r).exp() * j32(rho * r) * r.powf(2.5);
        let oracle = rho.powf(-1.5) * common::composite(&integrand, 1e-12, 14.0, 400, 16);
        assert!((big_f.values()[m].re - oracle).abs() < 1e-8, "ρ={rho}: {} vs {oracle}", big_f.values()[m].re);
    }
}

#[test]
fn zero_maps_to_zero_and_space_tags_are_checked() {
    let p = plan(128, 20.0);
    let z = Field::zeros(Space::Position, 128);
    let fz = p.hankel_forward(&z).unwrap();
    assert!(fz.values().iter().all(|v| v.norm() == 0.0));
    assert!(matches!(p.hankel_inverse(&z), Err(Error::SpaceMismatch { .. })));
    assert!(matches!(p.hankel_forward(&fz), Err(Error::SpaceMismatch { .. })));
    assert!(matches!(p.hankel_forward(&Field::zeros(Space::Position, 64)), Err(Error::PlanMismatch { .. })));
}

#[test]
fn parseval() {
    let p = plan(512, 30.0);
    let f = Field::sample(&p, |r| Complex64::new((-r * r).exp(), 0.3 * r * (-0.5 * r * r).exp())).unwrap();
    let m = p.radial_integral(&f.abs_sq()).unwrap();
    let ms = p.spectral_integral(&p.hankel_forward(&f).unwrap().abs_sq()).unwrap();
    assert!((m - ms).abs() <= 1e-9 * m);
}

#[test]
fn gaussian_mass_and_zero_integral() {
    let p = plan(512, 30.0);
    let u = Field::sample_real(&p, |r| (-r * r).exp()).unwrap();
    let m = p.radial_integral(&u.abs_sq()).unwrap();
    assert!((m / (PI / 2.0).powf(2.5) - 1.0).abs() < 1e-8);
    assert_eq!(p.radial_integral(&vec![0.0; 512]).unwrap(), 0.0);
    let mut bad = vec![1.0; 512];
    bad[7] = f64::NAN;
    assert!(matches!(p.radial_integral(&bad), Err(Error::NonFinite(_))));
}

#[test]
fn singular_weight_integral_against_adaptive_quadrature() {
    // ∫ |x|^{-1} e^{-5r²} dx over ℝ⁵ = ω₄/50
    let p = plan(512, 30.0);
    let samples: Vec<f64> = p.nodes().iter().map(|r| (-5.0 * r * r).exp() / r).collect();
    let got = p.radial_integral(&samples).unwrap();
    let omega = common::sphere(5);
    let adaptive = omega * common::simpson(&|r: f64| r.powi(3) * (-5.0 * r * r).exp(), 0.0, 8.0, 1e-14);
    assert!((adaptive / (omega / 50.0) - 1.0).abs() < 1e-10);
    // The plain weights see the odd r³ factor of the radial integrand and
    // land near 3e-5; the endpoint-corrected factors fix that.
    let plain = (got / adaptive - 1.0).abs();
    assert!(plain > 1e-6 && plain < 1e-4, "{plain:e}");
    let c = p.singular_factors(-1.0).unwrap();
    let fixed: Vec<f64> = samples.iter().zip(&c).map(|(s, c)| s * c).collect();
    let err = (p.radial_integral(&fixed).unwrap() / adaptive - 1.0).abs();
    assert!(err < 1e-6, "{err:e}");
}

#[test]
fn singular_factors_are_mild_and_local() {
    // The first uncorrected error term goes like h^{N+β+8} times a Taylor
    // coefficient of the smooth factor; (1+r²)^{-6} has large ones, so
    // K=256 only reaches ~5e-6 and is left out.
    for (beta, k) in [(-1.0, 512), (-1.5, 512), (-0.6, 1024)] {
        let p = plan(k, 30.0);
        let c = p.singular_factors(beta).unwrap();
        assert!(c[..4].iter().all(|x| (x - 1.0).abs() < 0.1), "{:?}", &c[..4]);
        assert!(c[4..].iter().all(|&x| x == 1.0));
        // a different smooth factor than the ones the factors were fit to
        let f = |r: f64| r.powf(beta) / (1.0 + r * r).powi(6);
        let samples: Vec<f64> = p.nodes().iter().zip(&c).map(|(&r, c)| c * f(r)).collect();
        let got = p.radial_integral(&samples).unwrap();
        let want = common::radial(&f, 5, 30.0);
        assert!((got / want - 1.0).abs() < 1e-6, "β={beta}: {:e}", got / want - 1.0);
    }
    assert!(plan(128, 30.0).singular_factors(-5.0).is_err());
}

#[test]
fn ball_volume_quadrature_is_first_order_in_the_cell_size() {
    // The indicator of the whole domain jumps at the wall. The quadrature
    // effectively stops half a cell early, so the relative defect is about
    // N·h/(2R) with h = π/V the node spacing. At K=256, R=30 that is 9.6e-3,
    // well above 1e-3.
    for (k, r) in [(256, 30.0), (512, 30.0), (1024, 30.0)] {
        let p = plan(k, r);
        let vol: f64 = p.weights().iter().sum();
        let exact = PI.powf(2.5) * r.powi(5) / common::gamma(3.5);
        let defect = (vol / exact - 1.0).abs();
        let h = p.nodes()[k - 1] - p.nodes()[k - 2];
        let predicted = 5.0 * h / (2.0 * r);
        assert!(defect < 1.2 * predicted && defect > 0.5 * predicted, "K={k}: {defect:e} vs {predicted:e}");
    }
}

#[test]
fn multipliers() {
    let p = plan(256, 30.0);
    let f = Field::sample_real(&p, |r| (1.0 + r * r) * (-r * r).exp()).unwrap();
    let big_f = p.hankel_forward(&f).unwrap();
    let id = p.apply_multiplier(&big_f, |_| Complex64::new(1.0, 0.0)).unwrap();
    assert_eq!(id, big_f);
    let t = 3.7;
    let rotated = p.apply_multiplier(&big_f, |rho| Complex64::from_polar(1.0, t * rho.powi(4))).unwrap();
    for (a, b) in rotated.values().iter().zip(big_f.values()) {
        assert!((a.norm() - b.norm()).abs() <= 1e-15 * b.norm().max(1e-300));
    }
    let m0 = p.spectral_integral(&big_f.abs_sq()).unwrap();
    let m1 = p.spectral_integral(&rotated.abs_sq()).unwrap();
    assert!((m1 - m0).abs() <= 1e-14 * m0);
    assert!(matches!(p.apply_multiplier(&f, |_| Complex64::new(1.0, 0.0)), Err(Error::SpaceMismatch { .. })));
    assert!(matches!(p.apply_multiplier(&big_f, |_| Complex64::new(f64::INFINITY, 0.0)), Err(Error::NonFinite(_))));
}

#[test]
fn riesz_two_is_the_newtonian_potential() {
    let p = plan(512, 30.0);
    let riesz = RieszOperator::new(&p, 2.0).unwrap();
    let g: Vec<f64> = p.nodes().iter().map(|r| (-r * r).exp()).collect();
    let ig = riesz.apply(&p, &g);
    let worst = p
        .nodes()
        .iter()
        .zip(&ig)
        .filter(|(r, _)| **r < 7.5)
        .step_by(4)
        .map(|(&r, v)| {
            let oracle = common::newton_potential(&|s: f64| (-s * s).exp(), 5, r, 12.0);
            (v / oracle - 1.0).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-5, "{worst:e}");
}

#[test]
fn riesz_selfadjoint() {
    let p = plan(256, 30.0);
    for alpha in [0.5, 2.0, 3.5] {
        let riesz = RieszOperator::new(&p, alpha).unwrap();
        let f: Vec<f64> = p.nodes().iter().map(|r| (-r * r).exp()).collect();
        let g: Vec<f64> = p.nodes().iter().map(|r| (1.0 + r) * (-0.5 * r * r).exp() / r.sqrt()).collect();
        let a: Vec<f64> = riesz.apply(&p, &f).iter().zip(&g).map(|(x, y)| x * y).collect();
        let b: Vec<f64> = riesz.apply(&p, &g).iter().zip(&f).map(|(x, y)| x * y).collect();
        let (a, b) = (p.radial_integral(&a).unwrap(), p.radial_integral(&b).unwrap());
        assert!((a - b).abs() <= 1e-8 * a.abs(), "α={alpha}: {a} vs {b}");
    }
}

#[test]
fn radial_derivative_examples() {
    let p = plan(512, 30.0);
    let gauss = Field::sample_real(&p, |r| (-r * r).exp()).unwrap();
    let d = p.radial_derivative(&gauss).unwrap();
    let e = p
        .nodes()
        .iter()
        .zip(d.values())
        .filter(|(r, _)| **r < 15.0)
        .map(|(r, z)| (z.re + 2.0 * r * (-r * r).exp()).abs())
        .fold(0.0, f64::max);
    assert!(e < 1e-6, "{e:e}");

    let one = Field::sample_real(&p, |_| 1.0).unwrap();
    assert!(p.radial_derivative(&one).unwrap().values().iter().all(|z| z.norm() < 1e-10));

    let s = Field::sample_real(&p, f64::sin).unwrap();
    let ds = p.radial_derivative(&s).unwrap();
    let e =
        p.nodes().iter().zip(ds.values()).skip(3).take(505).map(|(r, z)| (z.re - r.cos()).abs()).fold(0.0, f64::max);
    assert!(e < 1e-5, "{e:e}");
}

#[test]
fn laplacian_consistency() {
    let p = plan(512, 30.0);
    let u = Field::sample_real(&p, |r| (1.0 + 0.5 * r * r) * (-0.7 * r * r).exp()).unwrap();
    let uh = p.hankel_forward(&u).unwrap();
    let spectral: Vec<f64> = uh.abs_sq().iter().zip(p.spectral_nodes()).map(|(a, r)| a * r.powi(4)).collect();
    let spectral = p.spectral_integral(&spectral).unwrap();
    let lap = p.laplacian_fd(&u).unwrap();
    let fd = p.radial_integral(&lap.abs_sq()).unwrap();
    assert!((fd / spectral - 1.0).abs() < 1e-4, "{fd} vs {spectral}");
}

fn band_limited(p: &RadialPlan, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Field::random_smooth(p, &mut rng, 6).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn unitarity_on_random_fields(seed in any::<u64>()) {
        let p = plan(256, 30.0);
        let f = band_limited(&p, seed);
        let n0 = p.radial_integral(&f.abs_sq()).unwrap().sqrt();
        let n1 = p.spectral_integral(&p.hankel_forward(&f).unwrap().abs_sq()).unwrap().sqrt();
        prop_assert!((n1 - n0).abs() <= 1e-9 * n0);
    }

    #[test]
    fn multiplier_composition_is_exact(seed in any::<u64>(), t in -3.0f64..3.0, a in 0.1f64..2.0) {
        let p = plan(128, 20.0);
        let big_f = p.hankel_forward(&band_limited(&p, seed)).unwrap();
        let m1 = |rho: f64| Complex64::from_polar(1.0, t * rho.powi(4));
        let m2 = |rho: f64| Complex64::new(1.0 / (1.0 + a * rho * rho), 0.0);
        let two = p.apply_multiplier(&p.apply_multiplier(&big_f, m2).unwrap(), m1).unwrap();
        let one = p.apply_multiplier(&big_f, |rho| m1(rho) * m2(rho)).unwrap();
        for (x, y) in two.values().iter().zip(one.values()) {
            prop_assert!((x - y).norm() <= 4.0 * f64::EPSILON * y.norm());
        }
    }
}
