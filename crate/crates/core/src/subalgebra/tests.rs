use super::*;
use crate::exact::QMatrix;
use crate::lie::builtin;
use crate::scalar::Rational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn named(alg: &LieAlgebraModel, name: &str) -> GVector<f64> {
    GVector::basis(alg.dim(), alg.basis_index(name).unwrap())
}

fn unit(alg: &LieAlgebraModel, v: GVector<f64>) -> GVector<f64> {
    let s = 1.0 / alg.norm(&v);
    v.scale(&s)
}

fn block_frame(alg: &LieAlgebraModel) -> SubspaceFrame {
    let vs: Vec<_> = ["E12", "H1", "E21"].iter().map(|n| named(alg, n)).collect();
    SubspaceFrame::orthonormalize(alg, &vs, 1e-12)
}

fn random_unit(alg: &LieAlgebraModel, rng: &mut ChaCha8Rng) -> GVector<f64> {
    unit(alg, GVector::new((0..alg.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect()))
}

#[test]
fn self_brackets_vanish() {
    let sl2 = builtin("sl2").unwrap();
    let c = iterated_brackets(&sl2, &[named(&sl2, "H1")], 3, DEFAULT_CLOSURE_CAP).unwrap();
    assert_eq!(c.len(), 1);
}

#[test]
fn depth_two_contains_h() {
    let sl2 = builtin("sl2").unwrap();
    let c = iterated_brackets(&sl2, &[named(&sl2, "E12"), named(&sl2, "E21")], 2, DEFAULT_CLOSURE_CAP).unwrap();
    let h = named(&sl2, "H1");
    assert!(c.elements.iter().any(|e| e.vector == h || e.vector == h.neg()));
    assert_eq!(c.elements[2].expr.to_string(), "[t0,t1]");
}

#[test]
fn cap_is_enforced() {
    let sl3 = builtin("sl3").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t: Vec<_> = (0..3).map(|_| random_unit(&sl3, &mut rng)).collect();
    assert!(matches!(iterated_brackets(&sl3, &t, 6, 50), Err(Error::ClosureCap { cap: 50 })));
}

#[test]
fn transverse_vector_generates_sl3() {
    let sl3 = builtin("sl3").unwrap();
    let names = ["E12", "H1", "E21"];
    let sym = named(&sl3, "E13").add(&named(&sl3, "E31"));
    let mut t: Vec<_> = names.iter().map(|n| unit(&sl3, named(&sl3, n))).collect();
    t.push(unit(&sl3, sym));
    let c = iterated_brackets(&sl3, &t, 3, DEFAULT_CLOSURE_CAP).unwrap();
    let a = DMatrix::from_fn(8, c.len(), |i, j| c.elements[j].vector.coords[i]);
    let numeric_rank = a.svd(false, false).singular_values.iter().filter(|&&s| s > 1e-9).count();
    // Oracle: exact closure of depth ≤ 3 over ℚ.
    let mut ex: Vec<GVector<Rational>> = names.iter().map(|n| GVector::basis(8, sl3.basis_index(n).unwrap())).collect();
    ex.push(GVector::basis(8, sl3.basis_index("E13").unwrap()).add(&GVector::basis(8, sl3.basis_index("E31").unwrap())));
    let mut all = ex.clone();
    let mut d2 = Vec::new();
    for a in &ex {
        for b in &ex {
            d2.push(sl3.bracket(a, b).unwrap());
        }
    }
    all.extend(d2.iter().cloned());
    for a in &ex {
        for b in &d2 {
            all.push(sl3.bracket(a, b).unwrap());
        }
    }
    let rows: Vec<Vec<Rational>> = all.iter().map(|v| v.coords.clone()).collect();
    let exact_rank = QMatrix::from_rows(&rows, 8).unwrap().rank();
    assert_eq!(exact_rank, 8);
    assert_eq!(numeric_rank, exact_rank);
}

#[test]
fn filter_on_exact_subalgebra() {
    let sl3 = builtin("sl3").unwrap();
    let b = block_frame(&sl3);
    let c = iterated_brackets(&sl3, b.vectors(), 3, DEFAULT_CLOSURE_CAP).unwrap();
    let w = svd_filter(&sl3, &c.elements, 3, 1e-6).unwrap();
    assert_eq!(w.dim(), 3);
    assert!(b.max_distance_of(&w.frame) < 1e-12);
}

#[test]
fn filter_drops_small_singular_direction() {
    let sl2 = builtin("sl2").unwrap();
    let e = named(&sl2, "E12");
    let f = named(&sl2, "E21");
    let mut e2 = e.clone();
    e2.axpy(1e-6, &f);
    let elems: Vec<BracketElement> = [e.clone(), e2]
        .into_iter()
        .enumerate()
        .map(|(i, v)| BracketElement { vector: v, expr: Arc::new(BracketExpr::Leaf(i)), depth: 1, sign: 1.0 })
        .collect();
    let w = svd_filter(&sl2, &elems, 1, 1e-3).unwrap();
    // Oracle: σ of L·[[1,1],[0,1e-6]] from the closed 2×2 formula.
    let l = sl2.norm_scale();
    let (a, b, d) = (l, l, l * 1e-6);
    let t = a * a + b * b + d * d;
    let det = a * d;
    let s1 = ((t + (t * t - 4.0 * det * det).sqrt()) / 2.0).sqrt();
    let s2 = det / s1;
    assert!(s2 < 1e-3);
    assert!((w.singular_values[1] - s2).abs() < 1e-9 * s2.max(1e-9) + 1e-15);
    assert_eq!(w.dim(), 1);
    let ef = SubspaceFrame::orthonormalize(&sl2, &[e], 1e-12);
    assert!(ef.max_distance_of(&w.frame) < 1e-6);
}

#[test]
fn filtered_space_satisfies_distance_bound() {
    let sl3 = builtin("sl3").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..5 {
        let t: Vec<_> = (0..2).map(|_| random_unit(&sl3, &mut rng)).collect();
        let t = SubspaceFrame::orthonormalize(&sl3, &t, 1e-9).vectors().to_vec();
        let c = iterated_brackets(&sl3, &t, 3, DEFAULT_CLOSURE_CAP).unwrap();
        let delta = [0.3, 0.1, 0.05, 0.2, 0.5][trial];
        let w = svd_filter(&sl3, &c.elements, 3, delta).unwrap();
        for _ in 0..1000 {
            let mut v: Vec<f64> = (0..c.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= nv);
            // f(v) by direct summation, independent of the SVD factors.
            let mut fv = GVector::zeros(8);
            for (c, e) in v.iter().zip(&c.elements) {
                fv.axpy(*c, &e.vector);
            }
            assert!(w.frame.distance(&fv) <= delta + 1e-12);
            assert!(sl3.norm(&fv.sub(&w.apply(&v))) < 1e-10);
        }
        // Lower-threshold filters contain higher-threshold ones.
        let w_small = svd_filter(&sl3, &c.elements, 3, delta / 10.0).unwrap();
        assert!(w_small.frame.max_distance_of(&w.frame) < 1e-10);
        assert!(w_small.dim() >= w.dim());
        // A coefficient subspace on which ‖f(v)‖ ≥ δ‖v‖ has dimension ≤ dim W[δ].
        let (vr, sig) = w.right_singular_vectors();
        let v1: Vec<usize> = (0..sig.len()).filter(|&j| sig[j] >= delta).collect();
        for _ in 0..100 {
            let coeff: Vec<f64> = v1.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut v = vec![0.0; c.len()];
            for (a, &j) in coeff.iter().zip(&v1) {
                for (vi, x) in v.iter_mut().zip(vr.column(j).iter()) {
                    *vi += a * x;
                }
            }
            let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(sl3.norm(&w.apply(&v)) >= delta * nv * (1.0 - 1e-12));
        }
        assert!(w.dim() >= v1.len());
    }
}

#[test]
fn stabilize_on_exact_subalgebra_stops_at_depth_one() {
    let sl3 = builtin("sl3").unwrap();
    let b = block_frame(&sl3);
    let s = stabilize(&sl3, b.vectors(), 1e-2, DEFAULT_CLOSURE_CAP).unwrap();
    assert_eq!(s.m, 1);
    assert_eq!(s.iterations, 0);
    assert_eq!(s.space.dim(), 3);
    assert!(b.max_distance_of(&s.space.frame) < 1e-12);
}

#[test]
fn stabilize_on_small_transverse_perturbation() {
    let sl3 = builtin("sl3").unwrap();
    let t = perturbed_block_sl2(&sl3, 1e-4).unwrap();
    let s = stabilize(&sl3, &t, 0.1, DEFAULT_CLOSURE_CAP).unwrap();
    assert_eq!(s.space.dim(), 3);
    // Defect measured directly from brackets of the frame.
    let f = &s.space.frame;
    let mut worst = 0.0f64;
    for a in f.vectors() {
        for b in f.vectors() {
            worst = worst.max(f.distance(&GVector::new(sl3.bracket_f64(&a.coords, &b.coords))));
        }
    }
    assert!(worst <= 1e-2, "defect {worst}");
}

#[test]
fn perturbation_at_the_threshold_scale_is_absorbed() {
    // With ε = δ the transverse bracket directions survive the δ³ filter and the
    // loop grows past the 3-dimensional block.
    let sl3 = builtin("sl3").unwrap();
    let delta = 1e-2;
    let t = perturbed_block_sl2(&sl3, delta).unwrap();
    let s = stabilize(&sl3, &t, delta, DEFAULT_CLOSURE_CAP).unwrap();
    assert!(s.space.dim() > 3);
}

#[test]
fn stabilize_iteration_count_is_bounded_by_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for name in ["sl2", "sl3"] {
        let alg = builtin(name).unwrap();
        for _ in 0..500 {
            let k = rng.gen_range(1..=3);
            let t: Vec<_> = (0..k).map(|_| random_unit(&alg, &mut rng)).collect();
            let t = SubspaceFrame::orthonormalize(&alg, &t, 1e-6).vectors().to_vec();
            let delta = 10f64.powf(rng.gen_range(-3.0..-0.3));
            let s = stabilize(&alg, &t, delta, DEFAULT_CLOSURE_CAP).unwrap();
            assert!(s.iterations <= alg.dim());
        }
    }
}

#[test]
fn nearest_subalgebra_leaves_subalgebras_alone() {
    let sl3 = builtin("sl3").unwrap();
    let b = block_frame(&sl3);
    let out = nearest_subalgebra(&sl3, &b, None, NearestOptions::default()).unwrap();
    assert_eq!(out.iterations, 0);
    for (x, y) in out.frame.vectors().iter().zip(b.vectors()) {
        assert_eq!(x, y);
    }
}

#[test]
fn nearest_subalgebra_recovers_block() {
    let sl3 = builtin("sl3").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let b = block_frame(&sl3);
    let pert: Vec<_> = b
        .vectors()
        .iter()
        .map(|v| {
            let mut w = v.clone();
            let noise = random_unit(&sl3, &mut rng);
            w.axpy(1e-3, &noise);
            w
        })
        .collect();
    let w = SubspaceFrame::orthonormalize(&sl3, &pert, 1e-9);
    assert!(w.closure_defect(&sl3) > 1e-6);
    let out = nearest_subalgebra(&sl3, &w, None, NearestOptions::default()).unwrap();
    assert!(out.closure_defect <= 1e-9);
    assert!(b.max_distance_of(&out.frame) < 5e-3);
    assert!(out.frame.orthonormality_error() < 1e-12);
}

#[test]
fn constrained_projection_keeps_contained_subalgebra() {
    let sl3 = builtin("sl3").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let b = block_frame(&sl3);
    // Near gl2 = block sl2 + diag(1,1,-2).
    let mut vs: Vec<_> = b.vectors().to_vec();
    vs.push(GVector::new(vec![0.0, 0.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0]));
    let vs: Vec<_> = vs
        .into_iter()
        .map(|mut v| {
            let noise = random_unit(&sl3, &mut rng);
            v.axpy(2e-3, &noise);
            v
        })
        .collect();
    let w = SubspaceFrame::orthonormalize(&sl3, &vs, 1e-9);
    let out = nearest_subalgebra(&sl3, &w, Some(&b), NearestOptions::default()).unwrap();
    assert_eq!(out.frame.dim(), 4);
    assert!(out.closure_defect <= 1e-9);
    assert!(out.frame.max_distance_of(&b) <= 1e-9);
}

#[test]
fn objective_gradient_matches_finite_differences() {
    let sl3 = builtin("sl3").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let x: Vec<_> = (0..3).map(|_| random_unit(&sl3, &mut rng)).collect();
        let g = frame_objective_gradient(&sl3, &x);
        let h = 1e-6;
        for c in 0..3 {
            for p in 0..8 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[c].coords[p] += h;
                xm[c].coords[p] -= h;
                let fd = (frame_objective(&sl3, &xp) - frame_objective(&sl3, &xm)) / (2.0 * h);
                let an = g[c].coords[p];
                let scale = an.abs().max(fd.abs()).max(1e-3);
                assert!((fd - an).abs() / scale < 1e-6, "fd {fd} analytic {an}");
            }
        }
    }
}

#[test]
fn objective_vanishes_exactly_on_subalgebras() {
    let sl3 = builtin("sl3").unwrap();
    assert!(frame_objective(&sl3, block_frame(&sl3).vectors()).abs() < 1e-28);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<_> = (0..3).map(|_| random_unit(&sl3, &mut rng)).collect();
    assert!(frame_objective(&sl3, &x) > 1e-6);
}

#[test]
fn prop_e_on_exact_subalgebra() {
    let sl3 = builtin("sl3").unwrap();
    let b = block_frame(&sl3);
    let r = prop_e(&sl3, b.vectors(), 1e-2, None, DEFAULT_CLOSURE_CAP, NearestOptions::default()).unwrap();
    assert_eq!(r.output_dim, 3);
    assert!(r.max_residual() < 1e-12);
    assert!(r.max_generator_distance() < 1e-12);
}

#[test]
fn prop_e_on_perturbed_block() {
    let sl3 = builtin("sl3").unwrap();
    let delta: f64 = 1e-2;
    let t = perturbed_block_sl2(&sl3, delta.powi(3) / 10.0).unwrap();
    let r = prop_e(&sl3, &t, delta, None, DEFAULT_CLOSURE_CAP, NearestOptions::default()).unwrap();
    assert_eq!(r.output_dim, 3);
    assert!(r.closure_defect <= 1e-9);
    assert!(r.max_generator_distance() <= delta);
    assert!(r.max_residual() <= 0.1);
    for c in &r.certificates {
        assert!(c.max_coefficient <= c.coefficient_bound);
    }
    let json = serde_json::to_value(&r).unwrap();
    for key in ["input_dim", "k", "m", "delta", "delta1", "output_dim", "closure_defect", "certificates"] {
        assert!(json.get(key).is_some());
    }
    let _ = Rational::zero();
}
