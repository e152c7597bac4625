use super::*;
use crate::exact::QMatrix;
use crate::lie::builtin;
use crate::scalar::{int, rat};

fn close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
    // θ lives in [0, π).
    let dt = (a[2] - b[2]).abs();
    (a[0] - b[0]).abs() < tol && (a[1] - b[1]).abs() < tol * a[1].max(1.0) && dt.min(PI - dt) < tol
}

#[test]
fn reduction_is_idempotent_and_in_domain() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        let p = ModularPoint::random(&mut rng).flow(rng.gen_range(-50.0..50.0));
        let (x, y, t) = p.coordinates();
        assert!(x.abs() <= 0.5 + 1e-12 && x * x + y * y >= 1.0 - 1e-9 && (0.0..PI).contains(&t));
        assert!((p.rep().determinant() - 1.0).abs() < 1e-9);
        let again = ModularPoint::new(&p.rep()).unwrap();
        assert_eq!(again, p);
    }
    let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
    assert!(ModularPoint::new(&bad).is_err());
}

#[test]
fn gamma_translates_reduce_to_the_same_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let gammas = [[2.0, 1.0, 1.0, 1.0], [1.0, 3.0, 0.0, 1.0], [0.0, -1.0, 1.0, 0.0], [5.0, 2.0, 2.0, 1.0]];
    for _ in 0..200 {
        let p = ModularPoint::random(&mut rng);
        for g in gammas {
            let gm = DMatrix::from_row_slice(2, 2, &g);
            let q = ModularPoint::new(&(gm * p.rep())).unwrap();
            assert!(close(p.fingerprint(), q.fingerprint(), 1e-9));
        }
    }
}

#[test]
fn flow_is_a_one_parameter_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let p = ModularPoint::random(&mut rng);
        assert_eq!(p.flow(0.0), p);
        let (s, t) = (rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
        assert!(close(p.flow(s).flow(t).fingerprint(), p.flow(s + t).fingerprint(), 1e-9));
        // Same coset without intermediate reductions.
        let direct = ModularPoint::new(&(p.rep() * DMatrix::from_row_slice(2, 2, &[1.0, s + t, 0.0, 1.0]))).unwrap();
        assert!(close(direct.fingerprint(), p.flow(s + t).fingerprint(), 1e-9));
    }
}

#[test]
fn haar_sampler_matches_cusp_tail() {
    // μ(y > Y) = 3/(πY) for Y ≥ 1.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 200_000;
    let ys: Vec<f64> = (0..n).map(|_| ModularPoint::random(&mut rng).cusp_height()).collect();
    for level in [1.0, 2.0, 5.0] {
        let frac = ys.iter().filter(|&&y| y > level).count() as f64 / n as f64;
        let expect = 3.0 / (PI * level);
        let sigma = (expect * (1.0 - expect) / n as f64).sqrt();
        assert!((frac - expect).abs() < 4.0 * sigma, "Y = {level}: {frac} vs {expect}");
    }
}

#[test]
fn height_tracks_cusp_coordinate() {
    let alg = builtin("sl2").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for _ in 0..500 {
        let p = ModularPoint::random(&mut rng);
        let r = p.height(&alg).unwrap() / p.cusp_height();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    assert!(hi / lo < 4.0, "{lo} {hi}");
}

#[test]
fn flow_from_the_cusp_comes_back() {
    let start = ModularPoint::from_coordinates(0.1, 30.0, 0.4).unwrap();
    let h0 = start.cusp_height();
    let hs: Vec<f64> = (0..=1000).map(|k| start.flow(f64::from(k)).cusp_height()).collect();
    assert!(hs.iter().any(|&h| h < 2.0 * h0));
    assert!(hs[hs.len() - 1] < 2.0 * h0);
}

#[test]
fn mu_integral_normalization_and_oracles() {
    assert!((mu_integral(&TestFunction::constant(1.0), 10) - 1.0).abs() < 1e-15);
    let one = TestFunction::new(TestFunctionKind::CuspIndicator { level: 1.0 }).unwrap();
    for level in [1.0, 2.0, 4.0, 8.0] {
        let f = TestFunction::new(TestFunctionKind::CuspIndicator { level }).unwrap();
        let m = mu_integral(&f, 800);
        assert!((m - 3.0 / (PI * level)).abs() < 5e-3, "{level}: {m}");
    }
    assert!(mu_integral(&one, 400) < 1.0);
    // Height bump: (3/π) ∫ ψ(log(y/c)/w) y⁻² dy, all of its support above y = 1.
    let (c, w) = (2.0, 0.5);
    let f = TestFunction::height_bump(c, w).unwrap();
    let n = 200_000;
    let (a, b) = (c * (-w as f64).exp(), c * (w as f64).exp());
    let h = (b - a) / n as f64;
    let oracle: f64 = (0..n).map(|i| {
        let y = a + (i as f64 + 0.5) * h;
        bump((y / c).ln() / w) / (y * y)
    }).sum::<f64>() * h * 3.0 / PI;
    assert!((mu_integral(&f, 800) - oracle).abs() < 1e-4 * oracle.max(1e-3));
    for g in default_family() {
        let m = mu_integral(&g, 400);
        assert!(m > 0.0 && m <= 1.0);
    }
}

#[test]
fn surrogate_bounds_sup() {
    for f in default_family() {
        assert!(f.sobolev_surrogate >= 1.0 - 1e-9, "{:?}", f.kind);
        assert!(f.sobolev_surrogate.is_finite());
    }
    assert!(TestFunction::coordinate_bump(0.4, 1.2, 0.0, 0.3).is_err());
    assert!(TestFunction::height_bump(-1.0, 0.5).is_err());
}

#[test]
fn discrepancy_trivial_cases() {
    let p = ModularPoint::from_coordinates(0.123, 1.7, 0.3).unwrap();
    assert_eq!(discrepancy(&p, &TestFunction::constant(0.0), 3, 3, 0.0).unwrap(), 0.0);
    let c = TestFunction::constant(2.5);
    assert!(discrepancy(&p, &c, 3, 3, mu_integral(&c, 10)).unwrap().abs() < 1e-12);
    let vacuous = genericity_test(&p, &default_family(), &[0.0, 0.0, 0.0], 5, 4, 3).unwrap();
    assert!(vacuous.generic && vacuous.rows.is_empty());
}

#[test]
fn orbit_average_decays_toward_mean() {
    let family = default_family();
    let mus: Vec<f64> = family.iter().map(|f| mu_integral(f, 400)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let p = ModularPoint::random(&mut rng);
    let rep = genericity_test(&p, &family, &mus, 2, 12, 3).unwrap();
    assert_eq!(rep.rows.len(), 11 * 3);
    assert!(rep.worst.is_some());
    let long = orbit_averages(&p, &family, 0.0, 20_000.0).unwrap();
    for (a, m) in long.iter().zip(&mus) {
        assert!((a - m).abs() < 0.05, "{a} vs {m}");
    }
}

#[test]
fn divergence_polynomial_sl2_exact() {
    let alg = builtin("sl2").unwrap();
    let idx = |n: &str| alg.basis_index(n).unwrap();
    let f = GVector::<Rational>::basis(3, idx("E21"));
    let p = divergence_polynomial(&alg, &f).unwrap();
    assert_eq!(p.len(), 3);
    let e = GVector::<Rational>::basis(3, idx("E12"));
    let h = GVector::<Rational>::basis(3, idx("H1"));
    assert_eq!(p[0], f);
    assert_eq!(p[1], h.neg());
    assert_eq!(p[2], e.neg());
    assert_eq!(divergence_polynomial(&alg, &e).unwrap(), vec![e.clone()]);
    // Exact conjugation oracle: u(−t) R u(t).
    let real = alg.realization().unwrap();
    for t in [int(1), int(2), rat(-7, 3)] {
        let u = QMatrix::from_rows(&[vec![int(1), -t.clone()], vec![int(0), int(1)]], 2).unwrap();
        let direct = real.adjoint_action(&u, &f).unwrap();
        assert_eq!(eval_polynomial(&p, &t), direct);
    }
}

#[test]
fn divergence_polynomial_matches_conjugation_in_sl3() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for alg in [builtin("sl3").unwrap(), builtin("sl3-principal").unwrap()] {
        let real = alg.realization().unwrap();
        let e = real.to_matrix_f64(&alg.sl2_triple().unwrap().e.to_f64());
        for _ in 0..100 {
            let r = GVector::new((0..8).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let p = divergence_polynomial(&alg, &r).unwrap();
            assert!(p.len() <= 9);
            // 𝔤₀ is fixed by the flow, so r₀ contributes a constant polynomial.
            let (r0, r1) = alg.weight_decompose(&r).unwrap();
            let p0 = divergence_polynomial(&alg, &r0).unwrap();
            assert!(eval_polynomial(&p0, &1.7).sub(&r0).euclidean_norm() < 1e-12);
            let p1 = divergence_polynomial(&alg, &r1).unwrap();
            let split = eval_polynomial(&p0, &2.5).add(&eval_polynomial(&p1, &2.5));
            assert!(split.sub(&eval_polynomial(&p, &2.5)).euclidean_norm() < 1e-10);
            for t in [1.0, 2.0, 3.0] {
                // exp(−tE) by its finite series.
                let mut u = DMatrix::<f64>::identity(3, 3);
                let mut term = DMatrix::<f64>::identity(3, 3);
                for k in 1..=3 {
                    term = &term * &e * (-t / k as f64);
                    u += &term;
                }
                let direct = real.adjoint_action_f64(&u, &r).unwrap();
                let poly = eval_polynomial(&p, &t);
                assert!(poly.sub(&direct).euclidean_norm() < 1e-10);
            }
        }
    }
}

#[test]
fn divergence_time_scaling() {
    let alg = builtin("sl3").unwrap();
    let f = GVector::<f64>::basis(8, alg.basis_index("E21").unwrap());
    let mut pts = Vec::new();
    let mut prev: Option<f64> = None;
    for k in 2..=6 {
        let eps = 10f64.powi(-k);
        let d = divergence_time(&alg, &f.scale(&eps), 1.0, None).unwrap();
        pts.push((eps.ln(), d.time.ln()));
        if let Some(p) = prev {
            assert!(d.time > p);
        }
        prev = Some(d.time);
        let d2 = divergence_time(&alg, &f.scale(&(2.0 * eps)), 1.0, None).unwrap();
        assert!((d.time / d2.time - 2f64.sqrt()).abs() < 0.02 * 2f64.sqrt());
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let slope = least_squares_slope(&xs, &ys);
    assert!((slope + 0.5).abs() < 0.01, "{slope}");
    let e = GVector::<f64>::basis(8, alg.basis_index("E12").unwrap());
    assert!(divergence_time(&alg, &e.scale(&1e-3), 1.0, None).is_err());
}

#[test]
fn escape_of_mass_decays() {
    let alg = builtin("sl2").unwrap();
    let radii: Vec<f64> = (0..6).map(|k| 2.0 * 25f64.powf(f64::from(k) / 5.0)).collect();
    let rep = escape_of_mass(&alg, &radii, 40_000, 7).unwrap();
    assert!(rep.fractions.windows(2).all(|w| w[0] >= w[1]));
    assert!(rep.slope < 0.0);
}
