//! Heights of points of Γ\G and of rational subspaces, infinitesimal stabilizers of
//! integral symmetric matrices, and discriminants of the corresponding closed orbits.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{combinations, saturate, to_rational_vec, QMatrix};
use crate::lie::{sl_n, ExactFrame, GVector, LieAlgebraModel};
use crate::scalar::{rational_to_f64, Rational};

/// Largest rank accepted by [`shortest_vector`].
pub const SVP_RANK_CAP: usize = 10;
pub const LLL_DELTA: f64 = 0.99;

/// A full-rank lattice given by basis vectors in Euclidean coordinates.
#[derive(Clone, Debug)]
pub struct LatticeFrame {
    basis: Vec<Vec<f64>>,
    gram: DMatrix<f64>,
}

impl LatticeFrame {
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::Empty("lattice basis"));
        }
        let dim = basis[0].len();
        if let Some(b) = basis.iter().find(|b| b.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: b.len() });
        }
        let k = basis.len();
        let gram = DMatrix::from_fn(k, k, |i, j| basis[i].iter().zip(&basis[j]).map(|(a, b)| a * b).sum());
        if k > dim || gram.clone().cholesky().is_none() {
            return Err(Error::Singular("lattice basis is not linearly independent".into()));
        }
        Ok(Self { basis, gram })
    }

    pub fn from_rational(basis: &[Vec<Rational>]) -> Result<Self> {
        Self::new(basis.iter().map(|b| b.iter().map(rational_to_f64).collect()).collect())
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Covolume sqrt(det gram).
    pub fn covolume(&self) -> f64 {
        self.gram.determinant().abs().sqrt()
    }

    /// LLL-reduced copy and the integer transform T with reduced = T · basis.
    pub fn lll_reduced(&self, delta: f64) -> (LatticeFrame, Vec<Vec<i64>>) {
        let (b, t) = lll(&self.basis, delta);
        (LatticeFrame::new(b).expect("unimodular image of a basis"), t)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = b.len();
    let mut mu = vec![vec![0.0; k]; k];
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut norms = Vec::with_capacity(k);
    for i in 0..k {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &bstar[j]) / norms[j];
            for (vx, bx) in v.iter_mut().zip(&bstar[j]) {
                *vx -= mu[i][j] * bx;
            }
        }
        norms.push(dot(&v, &v));
        bstar.push(v);
    }
    (mu, norms)
}

/// Textbook LLL with recomputed Gram–Schmidt data (ranks here are ≤ 15).
fn lll(basis: &[Vec<f64>], delta: f64) -> (Vec<Vec<f64>>, Vec<Vec<i64>>) {
    let k = basis.len();
    let mut b = basis.to_vec();
    let mut t: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
    let mut i = 1;
    let mut guard = 0usize;
    while i < k && guard < 100_000 {
        guard += 1;
        for j in (0..i).rev() {
            let (mu, _) = gram_schmidt(&b);
            let q = mu[i][j].round();
            if q != 0.0 {
                let bj = b[j].clone();
                for (x, y) in b[i].iter_mut().zip(&bj) {
                    *x -= q * y;
                }
                let tj = t[j].clone();
                for (x, y) in t[i].iter_mut().zip(&tj) {
                    *x -= q as i64 * y;
                }
            }
        }
        let (mu, norms) = gram_schmidt(&b);
        if norms[i] >= (delta - mu[i][i - 1] * mu[i][i - 1]) * norms[i - 1] {
            i += 1;
        } else {
            b.swap(i, i - 1);
            t.swap(i, i - 1);
            i = (i - 1).max(1);
        }
    }
    (b, t)
}

#[derive(Clone, Debug, Serialize)]
pub struct ShortestVector {
    /// Coefficients with respect to the input basis.
    pub coefficients: Vec<i64>,
    pub vector: Vec<f64>,
    pub length: f64,
    /// Lattice points visited by the enumeration.
    pub visited: u64,
}

/// Exact shortest nonzero vector: LLL preprocessing then Fincke–Pohst enumeration.
pub fn shortest_vector(l: &LatticeFrame) -> Result<ShortestVector> {
    let k = l.rank();
    if k > SVP_RANK_CAP {
        return Err(Error::RankCap { rank: k, cap: SVP_RANK_CAP });
    }
    let (red, t) = l.lll_reduced(LLL_DELTA);
    let (mu, norms) = gram_schmidt(red.basis());
    let first = red.basis().iter().map(|b| dot(b, b)).fold(f64::INFINITY, f64::min);
    let mut best_sq = first * (1.0 + 1e-12);
    let mut best: Option<Vec<i64>> = None;
    let mut x = vec![0i64; k];
    let mut visited = 0u64;
    enumerate(k, k, &mu, &norms, &mut x, 0.0, &mut best_sq, &mut best, &mut visited);
    let xr = best.ok_or_else(|| Error::Singular("enumeration found no nonzero vector".into()))?;
    // Map coefficients back to the input basis: v = Σ x_i red_i = Σ x_i T_ij b_j.
    let coefficients: Vec<i64> = (0..k).map(|j| (0..k).map(|i| xr[i] * t[i][j]).sum()).collect();
    let dim = l.basis()[0].len();
    let mut vector = vec![0.0; dim];
    for (c, b) in coefficients.iter().zip(l.basis()) {
        for (v, bx) in vector.iter_mut().zip(b) {
            *v += *c as f64 * bx;
        }
    }
    let length = dot(&vector, &vector).sqrt();
    Ok(ShortestVector { coefficients, vector, length, visited })
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    level: usize,
    k: usize,
    mu: &[Vec<f64>],
    norms: &[f64],
    x: &mut Vec<i64>,
    partial: f64,
    best_sq: &mut f64,
    best: &mut Option<Vec<i64>>,
    visited: &mut u64,
) {
    if level == 0 {
        *visited += 1;
        if x.iter().any(|&v| v != 0) && partial > 0.0 && partial < *best_sq {
            *best_sq = partial;
            *best = Some(x.clone());
        }
        return;
    }
    let i = level - 1;
    let center: f64 = -(i + 1..k).map(|j| mu[j][i] * x[j] as f64).sum::<f64>();
    let budget = (*best_sq - partial) / norms[i];
    if budget < 0.0 {
        return;
    }
    let r = budget.sqrt();
    let lo = (center - r).ceil() as i64;
    let hi = (center + r).floor() as i64;
    for v in lo..=hi {
        let d = v as f64 - center;
        let p = partial + d * d * norms[i];
        if p >= *best_sq {
            continue;
        }
        x[i] = v;
        enumerate(i, k, mu, norms, x, p, best_sq, best, visited);
    }
    x[i] = 0;
}

/// Lattice Ad(g⁻¹)𝔤_ℤ in isometric coordinates (Euclidean = algebra norm).
pub fn adjoint_lattice(alg: &LieAlgebraModel, g: &DMatrix<f64>) -> Result<LatticeFrame> {
    let real = alg.realization().ok_or_else(|| Error::InvalidArgument("algebra has no matrix realization".into()))?;
    let ginv = g.clone().try_inverse().ok_or_else(|| Error::Singular("group element is not invertible".into()))?;
    let l = alg.norm_scale();
    let basis = alg
        .lattice_basis()
        .iter()
        .map(|v| Ok(real.adjoint_action_f64(&ginv, &v.to_f64())?.coords.into_iter().map(|x| x * l).collect()))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    LatticeFrame::new(basis)
}

/// ht(Γg) = 1 / (shortest nonzero vector of Ad(g⁻¹)𝔤_ℤ).
pub fn height_of_point(alg: &LieAlgebraModel, g: &DMatrix<f64>) -> Result<f64> {
    Ok(1.0 / shortest_vector(&adjoint_lattice(alg, g)?)?.length)
}

#[derive(Clone, Debug)]
pub struct SubspaceHeight {
    pub height: f64,
    /// det of the Gram matrix of the saturated basis (exact).
    pub height_squared: Rational,
    /// ℤ-basis of W ∩ ℤⁿ.
    pub basis: Vec<Vec<BigInt>>,
}

/// Height of a rational subspace of ℚⁿ relative to ℤⁿ and the inner product `gram`.
pub fn subspace_height(span: &[Vec<Rational>], gram: &QMatrix) -> Result<SubspaceHeight> {
    let n = gram.nrows();
    let basis = saturate(span, n)?;
    if basis.is_empty() {
        return Err(Error::Empty("subspace"));
    }
    let b = QMatrix::from_rows(&basis.iter().map(|v| to_rational_vec(v)).collect::<Vec<_>>(), n)?;
    let g = b.mul(gram)?.mul(&b.transpose())?;
    let det = g.det()?;
    Ok(SubspaceHeight { height: rational_to_f64(&det).sqrt(), height_squared: det, basis })
}

/// Height of a subspace of 𝔤 relative to 𝔤_ℤ in the calibrated algebra norm.
pub fn algebra_subspace_height(alg: &LieAlgebraModel, w: &ExactFrame) -> Result<SubspaceHeight> {
    let n = alg.dim();
    let lat_cols: Vec<Vec<Rational>> = alg.lattice_basis().iter().map(|v| v.coords.clone()).collect();
    let lat = QMatrix::from_columns(&lat_cols, n)?;
    let to_lat = lat.inverse()?;
    let span: Vec<Vec<Rational>> = w.vectors().iter().map(|v| to_lat.mul_vec(&v.coords)).collect::<Result<_>>()?;
    // Euclidean e-coordinate Gram in lattice coordinates; the norm factor L is applied in floats.
    let gram = lat.transpose().mul(&lat)?;
    let mut h = subspace_height(&span, &gram)?;
    h.height *= alg.norm_scale().powi(h.basis.len() as i32);
    Ok(h)
}

fn sym_from_entries(y: &[Vec<BigInt>]) -> Result<QMatrix> {
    let r = y.len();
    for i in 0..r {
        if y[i].len() != r {
            return Err(Error::DimensionMismatch { expected: r, got: y[i].len() });
        }
        for j in 0..r {
            if y[i][j] != y[j][i] {
                return Err(Error::InvalidArgument("matrix is not symmetric".into()));
            }
        }
    }
    QMatrix::from_rows(&y.iter().map(|row| to_rational_vec(row)).collect::<Vec<_>>(), r)
}

/// ℤ-basis of {X ∈ sl_r(ℤ) : Xᵗy + yX = 0} in the coordinates of [`sl_n`]`(r)`.
pub fn stabilizer_algebra(y: &[Vec<BigInt>]) -> Result<(LieAlgebraModel, ExactFrame)> {
    let r = y.len();
    let ym = sym_from_entries(y)?;
    if ym.det()?.is_zero() {
        return Err(Error::Singular("symmetric matrix is degenerate".into()));
    }
    let alg = sl_n(r)?;
    let real = alg.realization().expect("sl_n is realized");
    let dim = alg.dim();
    let mut rows = Vec::new();
    for i in 0..r {
        for j in i..r {
            rows.push(
                (0..dim)
                    .map(|k| {
                        let b = &real.basis()[k];
                        let lhs = b.transpose().mul(&ym).unwrap();
                        let rhs = ym.mul(b).unwrap();
                        &lhs[(i, j)] + &rhs[(i, j)]
                    })
                    .collect::<Vec<Rational>>(),
            );
        }
    }
    let kernel = QMatrix::from_rows(&rows, dim)?.kernel();
    let basis = saturate(&kernel, dim)?;
    let frame = ExactFrame::new(dim, basis.iter().map(|v| GVector::new(to_rational_vec(v))).collect())?;
    if frame.dim() != r * (r - 1) / 2 {
        return Err(Error::InvalidArgument(format!("stabilizer has dimension {}, expected {}", frame.dim(), r * (r - 1) / 2)));
    }
    Ok((alg, frame))
}

#[derive(Clone, Debug)]
pub struct Discriminant {
    pub disc: BigInt,
    /// det B(e_i, e_j) for the given basis.
    pub killing_det: Rational,
    /// Plücker coordinates of e_1∧…∧e_r in the lattice basis of ∧ʳ𝔤_ℤ.
    pub plucker: Vec<Rational>,
    /// v = p ⊗ p / det B, row-major over pairs of Plücker indices.
    pub v: Vec<Rational>,
}

/// disc = min{m ≥ 1 : m·v ∈ (∧ʳ𝔤_ℤ)^{⊗2}} for v = (e_1∧…∧e_r)^{⊗2}/det B(e_i,e_j).
pub fn orbit_discriminant(alg: &LieAlgebraModel, stab: &ExactFrame) -> Result<Discriminant> {
    let r = stab.dim();
    let n = alg.dim();
    if r == 0 {
        return Err(Error::Empty("stabilizer frame"));
    }
    let mut gram = QMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            gram[(i, j)] = alg.killing_form(&stab.vectors()[i], &stab.vectors()[j])?;
        }
    }
    let killing_det = gram.det()?;
    if killing_det.is_zero() {
        return Err(Error::DegenerateKilling(0.0));
    }
    let lat_cols: Vec<Vec<Rational>> = alg.lattice_basis().iter().map(|v| v.coords.clone()).collect();
    let to_lat = QMatrix::from_columns(&lat_cols, n)?.inverse()?;
    let coords: Vec<Vec<Rational>> = stab.vectors().iter().map(|v| to_lat.mul_vec(&v.coords)).collect::<Result<_>>()?;
    let plucker: Vec<Rational> = combinations(n, r)
        .iter()
        .map(|s| {
            let m: Vec<Vec<Rational>> = coords.iter().map(|c| s.iter().map(|&j| c[j].clone()).collect()).collect();
            QMatrix::from_rows(&m, r).and_then(|q| q.det())
        })
        .collect::<Result<_>>()?;
    let mut v = Vec::with_capacity(plucker.len() * plucker.len());
    let mut disc = BigInt::one();
    for a in &plucker {
        for b in &plucker {
            let x = a * b / &killing_det;
            disc = disc.lcm(x.denom());
            v.push(x);
        }
    }
    Ok(Discriminant { disc, killing_det, plucker, v })
}

/// Square part: gcd of the entries.
pub fn square_part(y: &[Vec<BigInt>]) -> BigInt {
    y.iter().flatten().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// det of a square integer matrix.
pub fn int_det(y: &[Vec<BigInt>]) -> BigInt {
    crate::exact::bareiss_det(y.to_vec())
}

/// Integral point y of V_ℤ (symmetric r×r) with its stabilizer, height and discriminant.
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub y: Vec<Vec<BigInt>>,
    pub level: BigInt,
    pub stabilizer: ExactFrame,
    pub disc: BigInt,
    pub subspace_height: f64,
    pub square_part: BigInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecordJson {
    pub y: Vec<Vec<String>>,
    pub level: String,
    pub stabilizer: Vec<Vec<String>>,
    pub disc: String,
    pub subspace_height: f64,
    pub square_part: String,
}

impl OrbitRecord {
    pub fn compute(y: Vec<Vec<BigInt>>) -> Result<Self> {
        let (alg, stab) = stabilizer_algebra(&y)?;
        let d = orbit_discriminant(&alg, &stab)?;
        let h = algebra_subspace_height(&alg, &stab)?;
        Ok(Self {
            level: int_det(&y),
            square_part: square_part(&y),
            stabilizer: stab,
            disc: d.disc,
            subspace_height: h.height,
            y,
        })
    }

    pub fn from_i64(y: &[Vec<i64>]) -> Result<Self> {
        Self::compute(y.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn to_json(&self) -> OrbitRecordJson {
        OrbitRecordJson {
            y: self.y.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            level: self.level.to_string(),
            stabilizer: self
                .stabilizer
                .vectors()
                .iter()
                .map(|v| v.coords.iter().map(crate::scalar::format_rational).collect())
                .collect(),
            disc: self.disc.to_string(),
            subspace_height: self.subspace_height,
            square_part: self.square_part.to_string(),
        }
    }

    /// subspace_height / disc^{1/2}.
    pub fn ratio(&self) -> f64 {
        self.subspace_height / rational_to_f64(&Rational::from_integer(self.disc.clone())).sqrt()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightDiscReport {
    pub count: usize,
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    /// max / min.
    pub band: f64,
}

pub fn check_heightdisc(records: &[OrbitRecord]) -> Result<HeightDiscReport> {
    if records.is_empty() {
        return Err(Error::Empty("orbit records"));
    }
    let ratios: Vec<f64> = records.iter().map(OrbitRecord::ratio).collect();
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 { sorted[mid] } else { 0.5 * (sorted[mid - 1] + sorted[mid]) };
    Ok(HeightDiscReport { count: ratios.len(), ratios, min, max, median, band: max / min })
}

/// Diagonal integer matrix helper.
pub fn diag(entries: &[i64]) -> Vec<Vec<BigInt>> {
    let r = entries.len();
    (0..r).map(|i| (0..r).map(|j| if i == j { BigInt::from(entries[i]) } else { BigInt::zero() }).collect()).collect()
}

/// gᵗ y g for integer matrices.
pub fn congruence(y: &[Vec<BigInt>], g: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let r = y.len();
    let mut yg = vec![vec![BigInt::zero(); r]; r];
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                yg[i][j] += &y[i][k] * &g[k][j];
            }
        }
    }
    let mut out = vec![vec![BigInt::zero(); r]; r];
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                out[i][j] += &g[k][i] * &yg[k][j];
            }
        }
    }
    out
}

/// Positive part of a signed integer as f64 (for logs).
pub fn big_to_f64(x: &BigInt) -> f64 {
    rational_to_f64(&Rational::from_integer(x.abs()))
}
