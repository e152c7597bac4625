//! Integral symmetric 3×3 matrices on determinant level sets.
//!
//! Level-d points are projected to det = 1 by M ↦ M/d^{1/3}. The region is a box in
//! the chart (m11, m12, m13, m22, m23) with m33 solved from the determinant. The
//! invariant measure on det = 1 is the Gelfand–Leray form, which in this chart has
//! density 1/|∂det/∂m33| = 1/|m11·m22 − m12²|.

use std::collections::HashMap;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_bigint::BigInt;
use num_integer::Integer;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::QMatrix;
use crate::heights::{big_to_f64, congruence, subspace_height, OrbitRecord};
use crate::lattice_count::least_squares_slope;
use crate::scalar::Rational;

pub const DEFAULT_CANDIDATE_CAP: u128 = 1_000_000;

/// Free chart coordinates, in this order.
pub const CHART: [&str; 5] = ["m11", "m12", "m13", "m22", "m23"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionBox {
    pub lower: [f64; 5],
    pub upper: [f64; 5],
}

impl RegionBox {
    pub fn new(lower: [f64; 5], upper: [f64; 5]) -> Result<Self> {
        for k in 0..5 {
            if !(lower[k].is_finite() && upper[k].is_finite() && lower[k] < upper[k]) {
                return Err(Error::InvalidArgument(format!("box side {} is empty or not finite", CHART[k])));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Box around diag(1, −1, −1): m11 ∈ [0.7, 1.3], m22 ∈ [−1.3, −0.7], off-diagonals in [−0.3, 0.3].
    pub fn case_a() -> Self {
        Self { lower: [0.7, -0.3, -0.3, -1.3, -0.3], upper: [1.3, 0.3, 0.3, -0.7, 0.3] }
    }

    /// Cube of half-width `radius` around the chart point `center`.
    pub fn around(center: [f64; 5], radius: f64) -> Result<Self> {
        Self::new(center.map(|c| c - radius), center.map(|c| c + radius))
    }

    /// Parse "l1:u1,l2:u2,…" (five sides, chart order) or the name "case-a".
    pub fn parse(spec: &str) -> Result<Self> {
        if spec.trim() == "case-a" {
            return Ok(Self::case_a());
        }
        let sides: Vec<&str> = spec.split(',').map(str::trim).collect();
        if sides.len() != 5 {
            return Err(Error::Parse(format!("box needs 5 sides, got {}", sides.len())));
        }
        let mut lower = [0.0; 5];
        let mut upper = [0.0; 5];
        for (k, side) in sides.iter().enumerate() {
            let (l, u) = side.split_once(':').ok_or_else(|| Error::Parse(format!("side '{side}' is not l:u")))?;
            lower[k] = l.trim().parse().map_err(|_| Error::Parse(format!("bad bound '{l}'")))?;
            upper[k] = u.trim().parse().map_err(|_| Error::Parse(format!("bad bound '{u}'")))?;
        }
        Self::new(lower, upper)
    }

    pub fn contains(&self, x: &[f64; 5]) -> bool {
        (0..5).all(|k| self.lower[k] <= x[k] && x[k] <= self.upper[k])
    }

    pub fn volume(&self) -> f64 {
        (0..5).map(|k| self.upper[k] - self.lower[k]).product()
    }
}

/// m33 on the level set det = level, if the chart is regular there.
pub fn chart_m33(x: &[f64; 5], level: f64) -> Option<f64> {
    let [m11, m12, m13, m22, m23] = *x;
    let a = m11 * m22 - m12 * m12;
    if a == 0.0 {
        return None;
    }
    Some((level + m11 * m23 * m23 - 2.0 * m12 * m13 * m23 + m22 * m13 * m13) / a)
}

/// Gelfand–Leray density 1/|m11·m22 − m12²|.
pub fn chart_density(x: &[f64; 5]) -> f64 {
    1.0 / (x[0] * x[3] - x[1] * x[1]).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CellStatus {
    /// Every point has indefinite signature; the cell is in the region.
    Indefinite,
    /// Every point is positive definite (compact stabilizer); excluded.
    Definite,
    /// m11·m22 − m12² vanishes somewhere in the cell; excluded.
    Degenerate,
    /// Signature changes inside the cell; excluded.
    Mixed,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub lower: [f64; 5],
    pub upper: [f64; 5],
    pub status: CellStatus,
    /// Normalized reference mass (0 for excluded cells).
    pub mass: f64,
    /// Unnormalized Gelfand–Leray mass.
    pub raw_mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionGrid {
    pub region: RegionBox,
    pub divisions: usize,
    pub cells: Vec<Cell>,
    /// Gelfand–Leray volume of the included cells.
    pub total_mass: f64,
}

fn interval_mul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let p = [a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1];
    (p.iter().copied().fold(f64::INFINITY, f64::min), p.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

fn classify(lower: &[f64; 5], upper: &[f64; 5]) -> CellStatus {
    let m11 = (lower[0], upper[0]);
    let m12 = (lower[1], upper[1]);
    let m22 = (lower[3], upper[3]);
    let prod = interval_mul(m11, m22);
    let sq = if m12.0 <= 0.0 && 0.0 <= m12.1 {
        (0.0, m12.0.powi(2).max(m12.1.powi(2)))
    } else {
        let (a, b) = (m12.0.powi(2), m12.1.powi(2));
        (a.min(b), a.max(b))
    };
    let a = (prod.0 - sq.1, prod.1 - sq.0);
    if a.0 <= 0.0 && 0.0 <= a.1 {
        return CellStatus::Degenerate;
    }
    // At det = 1: positive definite iff m11 > 0 and m11·m22 − m12² > 0; negative definite is impossible.
    if a.1 < 0.0 {
        CellStatus::Indefinite
    } else if m11.0 > 0.0 {
        CellStatus::Definite
    } else if m11.1 < 0.0 {
        CellStatus::Indefinite
    } else {
        CellStatus::Mixed
    }
}

impl RegionGrid {
    /// Uniform grid with `divisions` steps per chart coordinate; masses are left at zero.
    pub fn new(region: RegionBox, divisions: usize) -> Result<Self> {
        if divisions == 0 || divisions > 12 {
            return Err(Error::InvalidArgument(format!("grid divisions must be in 1..=12, got {divisions}")));
        }
        let n = divisions;
        let h: Vec<f64> = (0..5).map(|k| (region.upper[k] - region.lower[k]) / n as f64).collect();
        let mut cells = Vec::with_capacity(n.pow(5));
        for idx in 0..n.pow(5) {
            let mut rem = idx;
            let mut lower = [0.0; 5];
            let mut upper = [0.0; 5];
            for k in (0..5).rev() {
                let i = rem % n;
                rem /= n;
                lower[k] = region.lower[k] + i as f64 * h[k];
                upper[k] = if i + 1 == n { region.upper[k] } else { region.lower[k] + (i + 1) as f64 * h[k] };
            }
            let status = classify(&lower, &upper);
            cells.push(Cell { lower, upper, status, mass: 0.0, raw_mass: 0.0 });
        }
        Ok(Self { region, divisions, cells, total_mass: 0.0 })
    }

    pub fn cell_of(&self, x: &[f64; 5]) -> Option<usize> {
        if !self.region.contains(x) {
            return None;
        }
        let n = self.divisions;
        let mut idx = 0;
        for k in 0..5 {
            let w = self.region.upper[k] - self.region.lower[k];
            let i = (((x[k] - self.region.lower[k]) / w) * n as f64).floor() as isize;
            idx = idx * n + i.clamp(0, n as isize - 1) as usize;
        }
        Some(idx)
    }

    pub fn included(&self, cell: usize) -> bool {
        self.cells[cell].status == CellStatus::Indefinite
    }

    pub fn masses(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.mass).collect()
    }
}

/// Per-cell Gelfand–Leray mass by tensor Gauss–Legendre in (m11, m12, m22); the density
/// does not depend on m13, m23. Excluded cells get mass 0.
pub fn reference_masses(grid: &RegionGrid, quad_points: usize) -> Result<RegionGrid> {
    let order = NonZeroUsize::new(quad_points).ok_or_else(|| Error::InvalidArgument("quad_points must be positive".into()))?;
    let rule = GaussLegendre::new(order);
    let pairs = rule.as_node_weight_pairs();
    let mut out = grid.clone();
    let mut total = 0.0;
    for cell in out.cells.iter_mut() {
        if cell.status != CellStatus::Indefinite {
            cell.raw_mass = 0.0;
            continue;
        }
        let map = |k: usize, node: f64| 0.5 * (cell.lower[k] + cell.upper[k]) + 0.5 * (cell.upper[k] - cell.lower[k]) * node;
        let mut s = 0.0;
        for &(n0, w0) in pairs.iter() {
            let m11 = map(0, n0);
            for &(n1, w1) in pairs.iter() {
                let m12 = map(1, n1);
                for &(n3, w3) in pairs.iter() {
                    let m22 = map(3, n3);
                    s += w0 * w1 * w3 / (m11 * m22 - m12 * m12).abs();
                }
            }
        }
        let jac: f64 = [0, 1, 3].iter().map(|&k| 0.5 * (cell.upper[k] - cell.lower[k])).product();
        let flat: f64 = [2, 4].iter().map(|&k| cell.upper[k] - cell.lower[k]).product();
        cell.raw_mass = s * jac * flat;
        total += cell.raw_mass;
    }
    if total <= 0.0 {
        return Err(Error::Empty("region has no indefinite cells"));
    }
    for cell in out.cells.iter_mut() {
        cell.mass = cell.raw_mass / total;
    }
    out.total_mass = total;
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelPoint {
    /// Row-major symmetric matrix.
    pub m: [[i64; 3]; 3],
    /// gcd of the entries.
    pub square_part: i64,
    pub cell: Option<usize>,
}

impl LevelPoint {
    /// Chart coordinates of M/d^{1/3}.
    pub fn projected(&self, d: i64) -> [f64; 5] {
        let s = (d as f64).cbrt();
        let m = &self.m;
        [m[0][0], m[0][1], m[0][2], m[1][1], m[1][2]].map(|x| x as f64 / s)
    }

    pub fn to_big(&self) -> Vec<Vec<BigInt>> {
        self.m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSetSample {
    pub d: i64,
    pub points: Vec<LevelPoint>,
    /// Number of (m11, m12, m13, m22, m23) tuples swept.
    pub candidates: u128,
}

impl LevelSetSample {
    pub fn assign_cells(&mut self, grid: &RegionGrid) {
        let d = self.d;
        for p in self.points.iter_mut() {
            p.cell = grid.cell_of(&p.projected(d));
        }
    }
}

pub fn det3(m: &[[i64; 3]; 3]) -> i128 {
    let e = |i: usize, j: usize| i128::from(m[i][j]);
    e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
}

fn integer_range(lo: f64, hi: f64, s: f64) -> (i64, i64) {
    let (a, b) = if s > 0.0 { (lo * s, hi * s) } else { (hi * s, lo * s) };
    (a.ceil() as i64, b.floor() as i64)
}

/// Number of chart tuples swept for level d.
pub fn candidate_count(d: i64, region: &RegionBox) -> u128 {
    let s = (d as f64).cbrt();
    (0..5)
        .map(|k| {
            let (a, b) = integer_range(region.lower[k], region.upper[k], s);
            if b >= a { (b - a + 1) as u128 } else { 0 }
        })
        .product()
}

/// All integral symmetric M with det M = d and M/d^{1/3} in the chart box. The five
/// free entries are swept exhaustively; m33 is the exact quotient when it exists and
/// det M = d is rechecked in integer arithmetic.
pub fn enumerate_levelset(d: i64, region: &RegionBox, cap: u128) -> Result<LevelSetSample> {
    if d == 0 {
        return Err(Error::InvalidArgument("level d must be nonzero".into()));
    }
    let candidates = candidate_count(d, region);
    if candidates > cap {
        return Err(Error::EnumerationCap { needed: candidates, cap });
    }
    let s = (d as f64).cbrt();
    let r: Vec<(i64, i64)> = (0..5).map(|k| integer_range(region.lower[k], region.upper[k], s)).collect();
    let dd = i128::from(d);
    let mut points = Vec::new();
    for m11 in r[0].0..=r[0].1 {
        for m12 in r[1].0..=r[1].1 {
            for m22 in r[3].0..=r[3].1 {
                let a = i128::from(m11) * i128::from(m22) - i128::from(m12) * i128::from(m12);
                if a == 0 {
                    continue;
                }
                for m13 in r[2].0..=r[2].1 {
                    for m23 in r[4].0..=r[4].1 {
                        let (x11, x12, x13, x22, x23) = (m11 as i128, m12 as i128, m13 as i128, m22 as i128, m23 as i128);
                        let num = dd + x11 * x23 * x23 - 2 * x12 * x13 * x23 + x22 * x13 * x13;
                        if num % a != 0 {
                            continue;
                        }
                        let Ok(m33) = i64::try_from(num / a) else { continue };
                        let m = [[m11, m12, m13], [m12, m22, m23], [m13, m23, m33]];
                        if det3(&m) != dd {
                            continue;
                        }
                        let g = [m11, m12, m13, m22, m23, m33].iter().fold(0i64, |acc, x| acc.gcd(x));
                        points.push(LevelPoint { m, square_part: g, cell: None });
                    }
                }
            }
        }
    }
    points.sort_by(|a, b| a.m.cmp(&b.m));
    Ok(LevelSetSample { d, points, candidates })
}

/// Enumerate several levels in parallel; output order follows `levels`.
pub fn enumerate_levels(levels: &[i64], grid: &RegionGrid, cap: u128) -> Result<Vec<LevelSetSample>> {
    levels
        .par_iter()
        .map(|&d| {
            let mut s = enumerate_levelset(d, &grid.region, cap)?;
            s.assign_cells(grid);
            Ok(s)
        })
        .collect()
}

/// Window of t > 0 with lower ≤ x/t ≤ upper, intersected with `cur`. Empty windows have lo > hi.
fn t_window(x: i64, lower: f64, upper: f64, cur: (f64, f64)) -> (f64, f64) {
    const EMPTY: (f64, f64) = (1.0, 0.0);
    let xf = x as f64;
    let (mut lo, mut hi) = cur;
    if x > 0 {
        if upper <= 0.0 {
            return EMPTY;
        }
        lo = lo.max(xf / upper);
        if lower > 0.0 {
            hi = hi.min(xf / lower);
        }
    } else if x < 0 {
        if lower >= 0.0 {
            return EMPTY;
        }
        lo = lo.max(xf / lower);
        if upper < 0.0 {
            hi = hi.min(xf / upper);
        }
    } else if lower > 0.0 || upper < 0.0 {
        return EMPTY;
    }
    (lo, hi)
}

/// Integers x with lower ≤ x/t ≤ upper for some t in the window, padded by one.
fn window_range(lower: f64, upper: f64, w: (f64, f64)) -> (i64, i64) {
    let lo = (lower * w.0).min(lower * w.1);
    let hi = (upper * w.0).max(upper * w.1);
    (lo.floor() as i64 - 1, hi.ceil() as i64 + 1)
}

fn in_level_box(x: &[i64; 5], d: i64, region: &RegionBox) -> bool {
    let s = (d as f64).cbrt();
    (0..5).all(|k| {
        let (a, b) = integer_range(region.lower[k], region.upper[k], s);
        a <= x[k] && x[k] <= b
    })
}

/// Same output as [`enumerate_levels`] for positive levels, computed in one pass.
///
/// Each chart tuple fixes an interval of admissible d (from the box condition on
/// M/d^{1/3}) and a residue class d ≡ −q mod |A|, so the work is proportional to the
/// number of points rather than to the sum of per-level box sizes. Box membership is
/// rechecked per level with the same rounding as the per-level sweep.
pub fn sweep_levels(levels: &[i64], grid: &RegionGrid, cap: u128) -> Result<Vec<LevelSetSample>> {
    if levels.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(&d) = levels.iter().find(|&&d| d <= 0) {
        return Err(Error::InvalidArgument(format!("joint sweep needs positive levels, got {d}")));
    }
    let region = &grid.region;
    let d_min = *levels.iter().min().expect("nonempty");
    let d_max = *levels.iter().max().expect("nonempty");
    let needed = candidate_count(d_max, region);
    if needed > cap {
        return Err(Error::EnumerationCap { needed, cap });
    }
    let span = (d_max - d_min + 1) as usize;
    let mut slot = vec![usize::MAX; span];
    let mut order: Vec<i64> = levels.to_vec();
    order.sort_unstable();
    order.dedup();
    for (i, &d) in order.iter().enumerate() {
        slot[(d - d_min) as usize] = i;
    }
    let pad = 1e-9;
    let start = ((d_min as f64).cbrt() * (1.0 - pad), (d_max as f64).cbrt() * (1.0 + pad));
    let (lo, up) = (&region.lower, &region.upper);
    let (r11a, r11b) = window_range(lo[0], up[0], start);

    let buckets = (r11a..=r11b)
        .into_par_iter()
        .fold(
            || vec![Vec::new(); order.len()],
            |mut out: Vec<Vec<LevelPoint>>, m11| {
                let w1 = t_window(m11, lo[0], up[0], start);
                if w1.0 > w1.1 {
                    return out;
                }
                let (a12, b12) = window_range(lo[1], up[1], w1);
                for m12 in a12..=b12 {
                    let w2 = t_window(m12, lo[1], up[1], w1);
                    if w2.0 > w2.1 {
                        continue;
                    }
                    let (a22, b22) = window_range(lo[3], up[3], w2);
                    for m22 in a22..=b22 {
                        let w3 = t_window(m22, lo[3], up[3], w2);
                        if w3.0 > w3.1 {
                            continue;
                        }
                        let a = i128::from(m11) * i128::from(m22) - i128::from(m12) * i128::from(m12);
                        if a == 0 {
                            continue;
                        }
                        let (a13, b13) = window_range(lo[2], up[2], w3);
                        for m13 in a13..=b13 {
                            let w4 = t_window(m13, lo[2], up[2], w3);
                            if w4.0 > w4.1 {
                                continue;
                            }
                            let (a23, b23) = window_range(lo[4], up[4], w4);
                            for m23 in a23..=b23 {
                                let w5 = t_window(m23, lo[4], up[4], w4);
                                if w5.0 > w5.1 {
                                    continue;
                                }
                                let x = [m11, m12, m13, m22, m23];
                                let (x11, x12, x13, x22, x23) = (m11 as i128, m12 as i128, m13 as i128, m22 as i128, m23 as i128);
                                let q = x11 * x23 * x23 - 2 * x12 * x13 * x23 + x22 * x13 * x13;
                                let d_lo = ((w5.0 * (1.0 - pad)).powi(3).floor() as i64 - 1).max(d_min);
                                let d_hi = ((w5.1 * (1.0 + pad)).powi(3).ceil() as i64 + 1).min(d_max);
                                if d_lo > d_hi {
                                    continue;
                                }
                                let modulus = a.abs();
                                let mut d = i128::from(d_lo) + (-q - i128::from(d_lo)).rem_euclid(modulus);
                                while d <= i128::from(d_hi) {
                                    let di = d as i64;
                                    let idx = slot[(di - d_min) as usize];
                                    if idx != usize::MAX && in_level_box(&x, di, region) {
                                        if let Ok(m33) = i64::try_from((d + q) / a) {
                                            let m = [[m11, m12, m13], [m12, m22, m23], [m13, m23, m33]];
                                            if det3(&m) == d {
                                                let g = [m11, m12, m13, m22, m23, m33].iter().fold(0i64, |acc, v| acc.gcd(v));
                                                out[idx].push(LevelPoint { m, square_part: g, cell: None });
                                            }
                                        }
                                    }
                                    d += modulus;
                                }
                            }
                        }
                    }
                }
                out
            },
        )
        .reduce(
            || vec![Vec::new(); order.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.extend(y);
                }
                a
            },
        );

    let samples: Vec<LevelSetSample> = order
        .iter()
        .zip(buckets)
        .map(|(&d, mut points)| {
            points.sort_by(|a, b| a.m.cmp(&b.m));
            let mut s = LevelSetSample { d, points, candidates: candidate_count(d, region) };
            s.assign_cells(grid);
            s
        })
        .collect();
    if order.as_slice() == levels {
        return Ok(samples);
    }
    // Restore the caller's order (duplicates included).
    Ok(levels.iter().map(|d| samples[order.binary_search(d).expect("level present")].clone()).collect())
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        if n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

/// Largest d ≤ limit whose candidate count stays within the cap.
pub fn max_level_for_cap(region: &RegionBox, cap: u128, limit: i64) -> i64 {
    let (mut lo, mut hi) = (1i64, limit);
    if candidate_count(hi, region) <= cap {
        return hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if candidate_count(mid, region) <= cap {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Up to `count` distinct squarefree levels, roughly log-spaced in [2, d_max].
pub fn squarefree_sweep(d_max: i64, count: usize) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::new();
    if d_max < 2 || count == 0 {
        return out;
    }
    let span = (d_max as f64 / 2.0).ln();
    for i in 0..count {
        let t = if count == 1 { 1.0 } else { i as f64 / (count - 1) as f64 };
        let mut d = (2.0 * (span * t).exp()).round() as i64;
        while d <= d_max && (!is_squarefree(d as u64) || out.contains(&d)) {
            d += 1;
        }
        if d <= d_max && out.last().map_or(true, |&l| d > l) {
            out.push(d);
        }
    }
    out
}

/// (total variation, chi-square distance) between cell counts and reference masses.
pub fn distribution_distance(counts: &[u64], masses: &[f64]) -> Result<(f64, f64)> {
    if counts.len() != masses.len() {
        return Err(Error::DimensionMismatch { expected: masses.len(), got: counts.len() });
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::Empty("cell counts"));
    }
    let mut tv = 0.0;
    let mut chi2 = 0.0;
    for (&c, &p) in counts.iter().zip(masses) {
        let f = c as f64 / n as f64;
        tv += (f - p).abs();
        if p > 0.0 {
            chi2 += (f - p).powi(2) / p;
        } else if c > 0 {
            chi2 = f64::INFINITY;
        }
    }
    Ok((0.5 * tv, chi2))
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelRow {
    pub d: i64,
    /// Points with square part within the bound that fall in included cells.
    pub n_d: u64,
    pub enumerated: usize,
    pub counts: Vec<u64>,
    pub total_variation: f64,
    pub chi_square: f64,
    /// N_d divided by the Gelfand–Leray volume of the region.
    pub c_d: f64,
    /// log C_d / log d (None for d ≤ 1 or C_d = 0).
    pub log_ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquidistributionReport {
    pub rows: Vec<LevelRow>,
    /// Least-squares slope of total variation against d.
    pub tv_slope: f64,
    /// Least-squares slope of total variation against log d.
    pub tv_slope_log: f64,
    /// Levels strictly past this one form the last three quartiles of the sweep.
    pub first_quartile_d: i64,
    pub min_log_ratio_past_quartile: f64,
    pub max_square_part: i64,
}

pub fn equidistribution_report(samples: &[LevelSetSample], grid: &RegionGrid, max_square_part: i64) -> Result<EquidistributionReport> {
    if grid.total_mass <= 0.0 {
        return Err(Error::InvalidArgument("grid has no reference masses; run reference_masses first".into()));
    }
    let masses = grid.masses();
    let mut rows = Vec::new();
    for s in samples {
        let mut counts = vec![0u64; grid.cells.len()];
        for p in &s.points {
            if p.square_part.abs() > max_square_part {
                continue;
            }
            if let Some(c) = grid.cell_of(&p.projected(s.d)) {
                if grid.included(c) {
                    counts[c] += 1;
                }
            }
        }
        let n_d: u64 = counts.iter().sum();
        if n_d == 0 {
            continue;
        }
        let (tv, chi2) = distribution_distance(&counts, &masses)?;
        let c_d = n_d as f64 / grid.total_mass;
        let log_ratio = (s.d > 1 && c_d > 0.0).then(|| c_d.ln() / (s.d as f64).ln());
        rows.push(LevelRow { d: s.d, n_d, enumerated: s.points.len(), counts, total_variation: tv, chi_square: chi2, c_d, log_ratio });
    }
    if rows.is_empty() {
        return Err(Error::Empty("all level samples are empty"));
    }
    let ds: Vec<f64> = rows.iter().map(|r| r.d as f64).collect();
    let tvs: Vec<f64> = rows.iter().map(|r| r.total_variation).collect();
    let (tv_slope, tv_slope_log) = if rows.len() >= 2 {
        (least_squares_slope(&ds, &tvs), least_squares_slope(&ds.iter().map(|d| d.ln()).collect::<Vec<_>>(), &tvs))
    } else {
        (0.0, 0.0)
    };
    let mut all: Vec<i64> = samples.iter().map(|s| s.d).collect();
    all.sort_unstable();
    let first_quartile_d = all[(all.len() - 1) / 4];
    // A level past the quartile with no points counts as log C_d = −∞.
    let ratio: HashMap<i64, Option<f64>> = rows.iter().map(|r| (r.d, r.log_ratio)).collect();
    let min_log_ratio_past_quartile = all
        .iter()
        .filter(|&&d| d > first_quartile_d)
        .map(|&d| ratio.get(&d).copied().flatten().unwrap_or(f64::NEG_INFINITY))
        .fold(f64::INFINITY, f64::min);
    Ok(EquidistributionReport { rows, tv_slope, tv_slope_log, first_quartile_d, min_log_ratio_past_quartile, max_square_part })
}

#[derive(Clone, Debug)]
pub struct AuditEntry {
    pub record: OrbitRecord,
    /// Height of the line ℚ·y in the lattice of integral symmetric matrices.
    pub line_height: f64,
}

/// ht(ℚ·y): length of the primitive vector on the line, entries (m11, m12, m13, m22, m23, m33).
pub fn line_height(y: &[Vec<BigInt>]) -> Result<f64> {
    let r = y.len();
    let mut v = Vec::new();
    for i in 0..r {
        for j in i..r {
            v.push(Rational::from_integer(y[i][j].clone()));
        }
    }
    let n = v.len();
    Ok(subspace_height(&[v], &QMatrix::identity(n))?.height)
}

/// Stabilizer, disc and heights for up to `limit` points of the sample (in order).
pub fn orbit_audit(sample: &LevelSetSample, limit: usize) -> Result<Vec<AuditEntry>> {
    sample
        .points
        .iter()
        .take(limit)
        .map(|p| {
            let y = p.to_big();
            let line_height = line_height(&y)?;
            Ok(AuditEntry { record: OrbitRecord::compute(y)?, line_height })
        })
        .collect()
}

/// Slope of log disc against log ht(ℚ·y).
pub fn audit_regression(entries: &[AuditEntry]) -> Result<f64> {
    if entries.len() < 2 {
        return Err(Error::Empty("need at least two audited orbits"));
    }
    let xs: Vec<f64> = entries.iter().map(|e| e.line_height.ln()).collect();
    let ys: Vec<f64> = entries.iter().map(|e| big_to_f64(&e.record.disc).ln()).collect();
    Ok(least_squares_slope(&xs, &ys))
}

/// Random element of SL₃(ℤ) as a product of `steps` elementary moves I ± E_ij.
pub fn random_unimodular<R: Rng>(rng: &mut R, steps: usize) -> Vec<Vec<BigInt>> {
    let mut g = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]];
    for _ in 0..steps {
        let i = rng.gen_range(0..3);
        let mut j = rng.gen_range(0..2);
        if j >= i {
            j += 1;
        }
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        // column op: col_j += sign·col_i
        for row in g.iter_mut() {
            row[j] += sign * row[i];
        }
    }
    g.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugationCheck {
    pub checked: usize,
    pub mismatches: usize,
}

/// Recompute disc on gᵗyg for a random small g ∈ SL₃(ℤ) and compare with the audited value.
pub fn conjugation_invariance<R: Rng>(entries: &[AuditEntry], rng: &mut R) -> Result<ConjugationCheck> {
    let mut mismatches = 0;
    for e in entries {
        let g = random_unimodular(rng, 4);
        let moved = OrbitRecord::compute(congruence(&e.record.y, &g))?;
        if moved.disc != e.record.disc || moved.level != e.record.level {
            mismatches += 1;
        }
    }
    Ok(ConjugationCheck { checked: entries.len(), mismatches })
}

#[cfg(test)]
mod tests;
