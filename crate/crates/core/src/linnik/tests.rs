use super::*;
use crate::heights::{diag, int_det};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

// Six-entry sweep: m33 over a wide window instead of solving for it. Tuples with
// m11·m22 = m12² are off the chart (det does not depend on m33 there).
fn brute_force(d: i64, region: &RegionBox) -> BTreeSet<[[i64; 3]; 3]> {
    let s = (d as f64).cbrt();
    let r: Vec<(i64, i64)> = (0..5).map(|k| integer_range(region.lower[k], region.upper[k], s)).collect();
    // |m33| ≤ |num| / |A| ≤ |num| since A is a nonzero integer.
    let big = r.iter().map(|&(a, b)| a.abs().max(b.abs())).max().unwrap();
    let b = d.abs() + 5 * big.pow(3);
    let mut out = BTreeSet::new();
    for m11 in r[0].0..=r[0].1 {
        for m12 in r[1].0..=r[1].1 {
            for m13 in r[2].0..=r[2].1 {
                for m22 in r[3].0..=r[3].1 {
                    for m23 in r[4].0..=r[4].1 {
                        if m11 * m22 == m12 * m12 {
                            continue;
                        }
                        for m33 in -b..=b {
                            let m = [[m11, m12, m13], [m12, m22, m23], [m13, m23, m33]];
                            if det3(&m) == i128::from(d) {
                                out.insert(m);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn point_set(s: &LevelSetSample) -> BTreeSet<[[i64; 3]; 3]> {
    s.points.iter().map(|p| p.m).collect()
}

fn to_i64(y: &[Vec<BigInt>]) -> [[i64; 3]; 3] {
    let mut m = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = i64::try_from(&y[i][j]).unwrap();
        }
    }
    m
}

#[test]
fn identity_level_one() {
    let region = RegionBox::around([1.0, 0.0, 0.0, 1.0, 0.0], 0.2).unwrap();
    let s = enumerate_levelset(1, &region, DEFAULT_CANDIDATE_CAP).unwrap();
    assert!(point_set(&s).contains(&[[1, 0, 0], [0, 1, 0], [0, 0, 1]]));
}

#[test]
fn indefinite_level_one_and_conjugates() {
    let region = RegionBox::case_a();
    let y = diag(&[1, -1, -1]);
    let s = enumerate_levelset(1, &region, DEFAULT_CANDIDATE_CAP).unwrap();
    let set = point_set(&s);
    assert!(set.contains(&to_i64(&y)));
    // Small unimodular conjugates that land in the box must be found.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut hits = 0;
    for _ in 0..300 {
        let g = random_unimodular(&mut rng, 2);
        let z = to_i64(&congruence(&y, &g));
        let p = LevelPoint { m: z, square_part: 1, cell: None };
        if region.contains(&p.projected(1)) {
            assert!(set.contains(&z), "{z:?}");
            hits += 1;
        }
    }
    assert!(hits > 0);
}

#[test]
fn enumeration_matches_six_entry_sweep() {
    let region = RegionBox::case_a();
    for d in [1, 2, 3, 5, 6, 7, 8, 12, 30, 64, 100, 210] {
        let s = enumerate_levelset(d, &region, DEFAULT_CANDIDATE_CAP).unwrap();
        assert_eq!(point_set(&s), brute_force(d, &region), "d = {d}");
    }
    let wide = RegionBox::around([0.0, 0.0, 0.0, 0.5, 0.0], 1.0).unwrap();
    for d in [-7, -1, 1, 4, 11] {
        let s = enumerate_levelset(d, &wide, DEFAULT_CANDIDATE_CAP).unwrap();
        assert_eq!(point_set(&s), brute_force(d, &wide), "d = {d}");
    }
}

fn per_level(levels: &[i64], grid: &RegionGrid) -> Vec<(i64, Vec<LevelPoint>)> {
    enumerate_levels(levels, grid, DEFAULT_CANDIDATE_CAP).unwrap().into_iter().map(|s| (s.d, s.points)).collect()
}

fn same_samples(a: &[LevelSetSample], b: &[(i64, Vec<LevelPoint>)]) {
    assert_eq!(a.len(), b.len());
    for (s, (d, pts)) in a.iter().zip(b) {
        assert_eq!(s.d, *d);
        let x: Vec<_> = s.points.iter().map(|p| (p.m, p.square_part, p.cell)).collect();
        let y: Vec<_> = pts.iter().map(|p| (p.m, p.square_part, p.cell)).collect();
        assert_eq!(x, y, "d = {d}");
    }
}

#[test]
fn joint_sweep_matches_per_level() {
    let grid = RegionGrid::new(RegionBox::case_a(), 3).unwrap();
    let levels: Vec<i64> = (1..=600).collect();
    same_samples(&sweep_levels(&levels, &grid, DEFAULT_CANDIDATE_CAP).unwrap(), &per_level(&levels, &grid));
    // Sparse, unsorted, with a repeat.
    let levels = vec![997, 2, 1000, 31, 2];
    same_samples(&sweep_levels(&levels, &grid, DEFAULT_CANDIDATE_CAP).unwrap(), &per_level(&levels, &grid));
    // Box straddling zero in every coordinate and containing degenerate tuples.
    let wide = RegionGrid::new(RegionBox::around([0.0, 0.0, 0.0, 0.5, 0.0], 1.0).unwrap(), 2).unwrap();
    let levels: Vec<i64> = (1..=40).collect();
    same_samples(&sweep_levels(&levels, &wide, DEFAULT_CANDIDATE_CAP).unwrap(), &per_level(&levels, &wide));
    assert!(matches!(sweep_levels(&[0, 3], &grid, DEFAULT_CANDIDATE_CAP), Err(Error::InvalidArgument(_))));
    assert!(matches!(sweep_levels(&[10_000_000], &grid, DEFAULT_CANDIDATE_CAP), Err(Error::EnumerationCap { .. })));
    assert!(sweep_levels(&[], &grid, DEFAULT_CANDIDATE_CAP).unwrap().is_empty());
}

#[test]
fn points_satisfy_level_and_square_part() {
    let region = RegionBox::case_a();
    for d in [8, 27, 54, 216, 1000, 1001] {
        let s = enumerate_levelset(d, &region, DEFAULT_CANDIDATE_CAP).unwrap();
        for p in &s.points {
            assert_eq!(det3(&p.m), i128::from(d));
            assert_eq!(int_det(&p.to_big()), BigInt::from(d));
            let q = p.square_part;
            assert_eq!(d % (q * q * q), 0);
            assert!(region.contains(&p.projected(d)));
        }
    }
    // 2·diag(1,−1,−1) has level 8 and square part 2.
    let s = enumerate_levelset(8, &region, DEFAULT_CANDIDATE_CAP).unwrap();
    assert!(s.points.iter().any(|p| p.m == [[2, 0, 0], [0, -2, 0], [0, 0, -2]] && p.square_part == 2));
    for d in [2, 3, 5, 6, 7, 10, 11, 13, 30, 101, 1001] {
        assert!(is_squarefree(d as u64));
        let s = enumerate_levelset(d, &region, DEFAULT_CANDIDATE_CAP).unwrap();
        assert!(s.points.iter().all(|p| p.square_part == 1));
    }
    assert!(!is_squarefree(12) && !is_squarefree(49) && !is_squarefree(0));
}

#[test]
fn cap_and_errors() {
    let region = RegionBox::case_a();
    assert!(matches!(enumerate_levelset(0, &region, DEFAULT_CANDIDATE_CAP), Err(Error::InvalidArgument(_))));
    assert!(matches!(enumerate_levelset(10_000_000, &region, DEFAULT_CANDIDATE_CAP), Err(Error::EnumerationCap { .. })));
    let dmax = max_level_for_cap(&region, DEFAULT_CANDIDATE_CAP, 1 << 40);
    assert!(candidate_count(dmax, &region) <= DEFAULT_CANDIDATE_CAP);
    assert!(candidate_count(dmax + 1, &region) > DEFAULT_CANDIDATE_CAP || candidate_count(dmax + 2, &region) > DEFAULT_CANDIDATE_CAP);
    assert!(RegionBox::new([0.0; 5], [0.0; 5]).is_err());
    assert_eq!(RegionBox::parse("case-a").unwrap(), region);
    let parsed = RegionBox::parse("0.7:1.3, -0.3:0.3, -0.3:0.3, -1.3:-0.7, -0.3:0.3").unwrap();
    assert_eq!(parsed, region);
    assert!(RegionBox::parse("1:2,3:4").is_err());
}

#[test]
fn sweep_is_squarefree_and_increasing() {
    let sweep = squarefree_sweep(10_000, 40);
    assert!(sweep.len() >= 30);
    assert!(sweep.windows(2).all(|w| w[0] < w[1]));
    assert!(sweep.iter().all(|&d| is_squarefree(d as u64) && d <= 10_000));
    assert_eq!(sweep[0], 2);
}

#[test]
fn chart_solves_determinant() {
    let x = [1.1, 0.2, -0.1, -0.9, 0.05];
    let m33 = chart_m33(&x, 1.0).unwrap();
    let m = nalgebra::Matrix3::new(x[0], x[1], x[2], x[1], x[3], x[4], x[2], x[4], m33);
    assert!((m.determinant() - 1.0).abs() < 1e-12);
    assert!(chart_m33(&[1.0, 1.0, 0.0, 1.0, 0.0], 1.0).is_none());
}

#[test]
fn cell_classification() {
    let grid = RegionGrid::new(RegionBox::case_a(), 2).unwrap();
    assert_eq!(grid.cells.len(), 32);
    assert!(grid.cells.iter().all(|c| c.status == CellStatus::Indefinite));
    let definite = RegionGrid::new(RegionBox::around([1.0, 0.0, 0.0, 1.0, 0.0], 0.2).unwrap(), 2).unwrap();
    assert!(definite.cells.iter().all(|c| c.status == CellStatus::Definite));
    assert!(reference_masses(&definite, 4).is_err());
    // m11 crosses zero with m22 > 0: the minor changes sign.
    let mixed = RegionGrid::new(RegionBox::new([-0.5, -0.1, -0.1, 0.5, -0.1], [0.5, 0.1, 0.1, 1.0, 0.1]).unwrap(), 1).unwrap();
    assert_eq!(mixed.cells[0].status, CellStatus::Degenerate);
    let neg = RegionGrid::new(RegionBox::new([-1.3, -0.1, -0.1, -1.3, -0.1], [-0.7, 0.1, 0.1, -0.7, 0.1]).unwrap(), 1).unwrap();
    assert_eq!(neg.cells[0].status, CellStatus::Indefinite);
    // pointwise: every indefinite cell's sampled points have indefinite signature at det 1.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for c in grid.cells.iter() {
        for _ in 0..20 {
            let x: [f64; 5] = std::array::from_fn(|k| rng.gen_range(c.lower[k]..c.upper[k]));
            let m33 = chart_m33(&x, 1.0).unwrap();
            let m = nalgebra::Matrix3::new(x[0], x[1], x[2], x[1], x[3], x[4], x[2], x[4], m33);
            let ev = m.symmetric_eigenvalues();
            assert!(ev.iter().any(|&e| e > 0.0) && ev.iter().any(|&e| e < 0.0));
        }
    }
}

#[test]
fn cell_lookup_round_trip() {
    let grid = RegionGrid::new(RegionBox::case_a(), 3).unwrap();
    for (i, c) in grid.cells.iter().enumerate() {
        let mid: [f64; 5] = std::array::from_fn(|k| 0.5 * (c.lower[k] + c.upper[k]));
        assert_eq!(grid.cell_of(&mid), Some(i));
    }
    assert_eq!(grid.cell_of(&[0.0; 5]), None);
}

#[test]
fn masses_normalized_and_symmetric() {
    let grid = reference_masses(&RegionGrid::new(RegionBox::case_a(), 2).unwrap(), 8).unwrap();
    let total: f64 = grid.masses().iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(grid.cells.iter().all(|c| c.mass > 0.0));
    // Signed diagonal P = diag(ε1, ε2, ε3) maps (m12, m13, m23) to (ε1ε2 m12, ε1ε3 m13, ε2ε3 m23).
    for eps in [[1, -1, 1], [1, 1, -1], [-1, 1, 1], [1, -1, -1]] {
        let f = [(eps[0] * eps[1]) as f64, (eps[0] * eps[2]) as f64, (eps[1] * eps[2]) as f64];
        for c in grid.cells.iter() {
            let mid: [f64; 5] = std::array::from_fn(|k| 0.5 * (c.lower[k] + c.upper[k]));
            let img = [mid[0], f[0] * mid[1], f[1] * mid[2], mid[3], f[2] * mid[4]];
            let j = grid.cell_of(&img).unwrap();
            assert!((grid.cells[j].mass - c.mass).abs() < 1e-14);
        }
    }
    let fine = reference_masses(&RegionGrid::new(RegionBox::case_a(), 4).unwrap(), 8).unwrap();
    assert!((fine.total_mass - grid.total_mass).abs() < 1e-6 * grid.total_mass);
    // Gelfand–Leray volume against a direct 5D midpoint rule.
    let n = 24;
    let b = RegionBox::case_a();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x = [
                    b.lower[0] + (i as f64 + 0.5) * 0.6 / n as f64,
                    b.lower[1] + (j as f64 + 0.5) * 0.6 / n as f64,
                    0.0,
                    b.lower[3] + (k as f64 + 0.5) * 0.6 / n as f64,
                    0.0,
                ];
                s += chart_density(&x);
            }
        }
    }
    let direct = s * (0.6f64 / n as f64).powi(3) * 0.36;
    assert!((direct - grid.total_mass).abs() < 1e-3 * direct);
}

#[test]
fn masses_match_rejection_sampling() {
    let grid = reference_masses(&RegionGrid::new(RegionBox::case_a(), 2).unwrap(), 8).unwrap();
    let b = &grid.region;
    let cap = 1.0 / (0.7 * 0.7 - 0.09);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut counts = vec![0u64; grid.cells.len()];
    let mut accepted = 0u64;
    while accepted < 200_000 {
        let x: [f64; 5] = std::array::from_fn(|k| rng.gen_range(b.lower[k]..b.upper[k]));
        if rng.gen::<f64>() * cap < chart_density(&x) {
            counts[grid.cell_of(&x).unwrap()] += 1;
            accepted += 1;
        }
    }
    for (c, cell) in counts.iter().zip(&grid.cells) {
        let f = *c as f64 / accepted as f64;
        let sigma = (cell.mass * (1.0 - cell.mass) / accepted as f64).sqrt();
        assert!((f - cell.mass).abs() <= 3.0 * sigma, "{f} vs {} (σ {sigma})", cell.mass);
    }
}

#[test]
fn distance_of_proportional_counts_is_zero() {
    let counts = vec![1u64, 2, 3, 4, 0, 6];
    let total: u64 = counts.iter().sum();
    let masses: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let (tv, chi2) = distribution_distance(&counts, &masses).unwrap();
    assert!(tv < 1e-15 && chi2 < 1e-15);
    let (tv, _) = distribution_distance(&[1, 0], &[0.0, 1.0]).unwrap();
    assert!((tv - 1.0).abs() < 1e-15);
    assert!(distribution_distance(&[0, 0], &[0.5, 0.5]).is_err());
    assert!(distribution_distance(&[1], &[0.5, 0.5]).is_err());
}

#[test]
fn report_on_small_sweep() {
    let grid = reference_masses(&RegionGrid::new(RegionBox::case_a(), 2).unwrap(), 8).unwrap();
    let levels = squarefree_sweep(3000, 12);
    let samples = enumerate_levels(&levels, &grid, DEFAULT_CANDIDATE_CAP).unwrap();
    let rep = equidistribution_report(&samples, &grid, 1).unwrap();
    assert!(!rep.rows.is_empty());
    for row in &rep.rows {
        assert_eq!(row.counts.iter().sum::<u64>(), row.n_d);
        assert!(row.total_variation >= 0.0 && row.total_variation <= 1.0);
        assert!((row.c_d - row.n_d as f64 / grid.total_mass).abs() < 1e-12 * row.c_d);
    }
    assert!(rep.first_quartile_d >= levels[0]);
    let big = rep.rows.last().unwrap();
    assert!(big.n_d > 50, "{}", big.n_d);
    assert!(equidistribution_report(&[], &grid, 1).is_err());
    let bare = RegionGrid::new(RegionBox::case_a(), 2).unwrap();
    assert!(equidistribution_report(&samples, &bare, 1).is_err());
}

#[test]
fn audit_anchor_and_invariance() {
    let anchor = OrbitRecord::compute(diag(&[1, 1, -1])).unwrap();
    let again = OrbitRecord::compute(diag(&[1, 1, -1])).unwrap();
    assert_eq!(anchor.disc, again.disc);
    assert!(anchor.disc >= BigInt::from(1));
    assert_eq!(line_height(&diag(&[1, 1, -1])).unwrap(), 3f64.sqrt());
    assert_eq!(line_height(&diag(&[2, 2, -2])).unwrap(), 3f64.sqrt());

    let region = RegionBox::case_a();
    let s = enumerate_levelset(30, &region, DEFAULT_CANDIDATE_CAP).unwrap();
    let entries = orbit_audit(&s, 10).unwrap();
    assert_eq!(entries.len(), 10.min(s.points.len()));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let chk = conjugation_invariance(&entries, &mut rng).unwrap();
    assert_eq!(chk.mismatches, 0);
}

#[test]
fn audit_regression_positive_across_levels() {
    let region = RegionBox::case_a();
    let mut entries = Vec::new();
    for d in squarefree_sweep(5000, 15) {
        let s = enumerate_levelset(d, &region, DEFAULT_CANDIDATE_CAP).unwrap();
        entries.extend(orbit_audit(&s, 2).unwrap());
    }
    assert!(entries.len() >= 10);
    assert!(audit_regression(&entries).unwrap() > 0.0);
    assert!(audit_regression(&entries[..1]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn larger_box_gives_superset(d in 1i64..400, grow in 0.01f64..0.3) {
        let small = RegionBox::case_a();
        let big = RegionBox::new(small.lower.map(|l| l - grow), small.upper.map(|u| u + grow)).unwrap();
        let a = point_set(&enumerate_levelset(d, &small, DEFAULT_CANDIDATE_CAP).unwrap());
        let b = point_set(&enumerate_levelset(d, &big, DEFAULT_CANDIDATE_CAP).unwrap());
        prop_assert!(a.is_subset(&b));
    }

    #[test]
    fn unimodular_moves_have_det_one(seed in 0u64..1000, steps in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_unimodular(&mut rng, steps);
        prop_assert_eq!(int_det(&g), BigInt::from(1));
    }
}
