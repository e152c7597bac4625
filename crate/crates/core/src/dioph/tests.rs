use super::*;
use crate::scalar::{int, rat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng) -> ExactMatrix {
    loop {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=5);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(-10..=10)).collect()).collect();
        let a = ExactMatrix::from_i64(&rows).unwrap();
        if !a.is_zero() {
            return a;
        }
    }
}

#[test]
fn zero_matrix_keeps_vector() {
    let a = ExactMatrix::from_i64(&[vec![0, 0], vec![0, 0]]).unwrap();
    let p = kernel_project(&a, &[0.25, -3.0], 1e-3).unwrap();
    assert_eq!(p.v0, vec![0.25, -3.0]);
    assert_eq!(p.distance, 0.0);
    assert!(p.bound < 1e-18);
}

#[test]
fn two_by_two_hand_example() {
    let delta = 1e-3;
    let a = ExactMatrix::from_i64(&[vec![1, 0], vec![0, 0]]).unwrap();
    let p = kernel_project(&a, &[delta, 1.0], delta).unwrap();
    assert_eq!(p.v0_exact, vec![int(0), int(1)]);
    assert!((p.distance - delta).abs() < 1e-15);
    assert!((a.lemma_radius(delta) - 4.0 * delta).abs() < 1e-15);
    assert!(p.distance <= p.bound);
    assert!(!p.delta_replaced);
}

#[test]
fn violated_precondition_replaces_delta() {
    let a = ExactMatrix::from_i64(&[vec![1, 0]]).unwrap();
    let p = kernel_project(&a, &[0.5, 1.0], 1e-3).unwrap();
    assert!(p.delta_replaced);
    assert!((p.delta_used - 0.5).abs() < 1e-15);
    assert!(p.distance <= p.bound);
}

#[test]
fn rational_matrices_clear_denominators() {
    let a = ExactMatrix::from_rationals(&[vec![rat(1, 2), rat(1, 3)]]).unwrap();
    assert_eq!(a.denominator(), &BigInt::from(6));
    assert_eq!(a.entries()[0], vec![BigInt::from(3), BigInt::from(2)]);
    assert_eq!(a.entry_bound(), &BigInt::from(3));
}

#[test]
fn randomized_projection_respects_both_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..500 {
        let a = random_matrix(&mut rng);
        let delta = 10f64.powf(rng.gen_range(-8.0..-1.0));
        let kernel = a.to_qmatrix().kernel();
        let mut v = vec![0.0; a.cols()];
        for k in &kernel {
            let c = rng.gen_range(-2.0..2.0);
            for (vi, x) in v.iter_mut().zip(k) {
                *vi += c * rational_to_f64(x);
            }
        }
        let noise: Vec<f64> = (0..a.cols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nn = noise.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (vi, x) in v.iter_mut().zip(&noise) {
            *vi += delta * x / nn;
        }
        let p = kernel_project(&a, &v, delta).unwrap();
        assert!(annihilates(&a, &p.v0_exact).unwrap());
        assert!(p.distance <= p.bound);
        let s = singular_value_floor(&a).unwrap();
        let slack = 1e-15;
        assert!(p.distance <= p.delta_used / s.sigma_interval.0 * (1.0 + 1e-9) + slack);
        assert!(p.delta_used / s.sigma_interval.0 <= a.lemma_radius(p.delta_used) * (1.0 + 1e-12));
    }
}

#[test]
fn singular_value_examples() {
    let id = ExactMatrix::from_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
    let r = singular_value_floor(&id).unwrap();
    assert!((r.sigma_min - 1.0).abs() < 1e-12);
    assert!(r.floor_certified);
    let ones = ExactMatrix::from_i64(&[vec![1, 1], vec![1, 1]]).unwrap();
    let r = singular_value_floor(&ones).unwrap();
    assert_eq!(r.rank, 1);
    assert!((r.sigma_min - 2.0).abs() < 1e-12);
    assert!(r.sigma_interval.0 <= 2.0 && 2.0 <= r.sigma_interval.1);
    assert!((r.floor - 0.25).abs() < 1e-15);
    assert!(r.floor_certified);
    assert!(singular_value_floor(&ExactMatrix::from_i64(&[vec![0]]).unwrap()).is_err());
}

#[test]
fn floor_never_violated_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..1000 {
        let a = random_matrix(&mut rng);
        let r = singular_value_floor(&a).unwrap();
        assert!(r.floor_certified, "{:?} {:?}", a.entries(), r);
        assert!(r.sigma_interval.0 >= r.floor);
        assert!(r.sigma_interval.0 <= r.sigma_min && r.sigma_min <= r.sigma_interval.1);
    }
}

#[test]
fn charpoly_matches_determinant_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let n = rng.gen_range(1..=4);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect()).collect();
        let m = QMatrix::from_i64_rows(&rows);
        let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let p = charpoly(&ints);
        for x in [-3, 0, 2, 7] {
            let mut xm = m.clone();
            for i in 0..n {
                for j in 0..n {
                    xm[(i, j)] = -xm[(i, j)].clone();
                }
                xm[(i, i)] += int(x);
            }
            assert_eq!(eval_poly(&p, &int(x)), xm.det().unwrap());
        }
    }
}

#[test]
fn cutting_set_examples() {
    let same = vec![integer_rows(&[vec![1, 0, 0], vec![0, 1, 0]]); 4];
    let c = minimal_cutting_set(&same, 3).unwrap();
    assert_eq!(c.indices, vec![0]);
    assert!(c.verified);

    let xy = integer_rows(&[vec![1, 0, 0], vec![0, 1, 0]]);
    let yz = integer_rows(&[vec![0, 1, 0], vec![0, 0, 1]]);
    let xz = integer_rows(&[vec![1, 0, 0], vec![0, 0, 1]]);
    let c = minimal_cutting_set(&[xy.clone(), xy.clone(), yz.clone(), xz.clone(), yz, xy], 3).unwrap();
    assert_eq!(c.indices, vec![0, 2, 3]);
    assert_eq!(c.intersection_dim, 0);
    assert!(c.verified);
}

#[test]
fn random_hyperplanes_in_dimension_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let planes: Vec<Vec<Vec<Rational>>> = (0..50)
            .map(|_| {
                let normal: Vec<i64> = (0..6).map(|_| rng.gen_range(-3..=3)).collect();
                let nq = integer_rows(&[normal]);
                QMatrix::from_rows(&nq, 6).unwrap().kernel()
            })
            .collect();
        let c = minimal_cutting_set(&planes, 6).unwrap();
        assert!(c.indices.len() <= 6);
        assert!(c.verified);
        // Oracle: intersect the chosen planes and all planes independently.
        let normals = |idx: &[usize]| -> usize {
            let rows: Vec<Vec<Rational>> = idx
                .iter()
                .flat_map(|&i| QMatrix::from_rows(&planes[i], 6).unwrap().kernel())
                .collect();
            if rows.is_empty() { 6 } else { 6 - QMatrix::from_rows(&rows, 6).unwrap().rank() }
        };
        let all: Vec<usize> = (0..50).collect();
        assert_eq!(normals(&c.indices), normals(&all));
    }
}

