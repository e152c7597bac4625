//! Exact diophantine tools: projection onto the kernel of an integer matrix with
//! the certified radius δ(nm)^{n/2}Eⁿ, a certified lower bound for the smallest
//! nonzero singular value, and greedy minimal cutting sets of subspaces.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{common_denominator, QMatrix};
use crate::scalar::{format_rational, rational_to_f64, snap_to_rational, Rational};

/// Bits of the dyadic grid real inputs are snapped to before exact projection.
pub const SNAPSHOT_BITS: u32 = 64;

/// Integer matrix A = numerators / denominator, with E = max |numerator|.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<BigInt>>,
    denominator: BigInt,
    entry_bound: BigInt,
}

impl ExactMatrix {
    pub fn from_integers(entries: Vec<Vec<BigInt>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        if rows == 0 || cols == 0 {
            return Err(Error::Empty("matrix"));
        }
        if let Some(r) = entries.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
        }
        let entry_bound = entries.iter().flatten().map(|x| x.abs()).max().unwrap_or_default();
        Ok(Self { rows, cols, entries, denominator: BigInt::one(), entry_bound })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_integers(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    /// Clears a common denominator; kernels are unaffected.
    pub fn from_rationals(rows: &[Vec<Rational>]) -> Result<Self> {
        let flat: Vec<Rational> = rows.iter().flatten().cloned().collect();
        let d = common_denominator(&flat);
        let ints = rows
            .iter()
            .map(|r| r.iter().map(|q| (q * Rational::from_integer(d.clone())).to_integer()).collect())
            .collect();
        let mut m = Self::from_integers(ints)?;
        m.denominator = d;
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// E = max |a_ij| of the integer (denominator-cleared) entries.
    pub fn entry_bound(&self) -> &BigInt {
        &self.entry_bound
    }

    pub fn is_zero(&self) -> bool {
        self.entry_bound.is_zero()
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        let rows: Vec<Vec<Rational>> =
            self.entries.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
        QMatrix::from_rows(&rows, self.cols).expect("rectangular")
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        self.to_qmatrix().to_f64()
    }

    /// δ(nm)^{n/2}Eⁿ.
    pub fn lemma_radius(&self, delta: f64) -> f64 {
        let (n, m) = (self.rows as f64, self.cols as f64);
        let e = rational_to_f64(&Rational::from_integer(self.entry_bound.clone()));
        delta * (n * m).powf(n / 2.0) * e.powi(self.rows as i32)
    }

    /// (nmE²)^{−n/2}.
    pub fn singular_floor(&self) -> f64 {
        let (n, m) = (self.rows as f64, self.cols as f64);
        let e = rational_to_f64(&Rational::from_integer(self.entry_bound.clone()));
        (n * m * e * e).powf(-n / 2.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelProjection {
    pub v0: Vec<f64>,
    #[serde(serialize_with = "ser_rationals")]
    pub v0_exact: Vec<Rational>,
    /// ‖Av‖ on the rational snapshot of v.
    pub residual: f64,
    pub delta_requested: f64,
    /// δ actually used: the requested one, or the residual when ‖Av‖ exceeded it.
    pub delta_used: f64,
    pub delta_replaced: bool,
    /// ‖v − v0‖.
    pub distance: f64,
    /// δ(nm)^{n/2}Eⁿ plus the snapshot slack.
    pub bound: f64,
    pub snapshot_bits: u32,
    pub kernel_dim: usize,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for q in v {
        seq.serialize_element(&format_rational(q))?;
    }
    seq.end()
}

fn norm_q(v: &[Rational]) -> f64 {
    v.iter().map(|q| rational_to_f64(&(q * q))).sum::<f64>().sqrt()
}

/// Orthogonal projection of v onto ker(A), computed exactly from a rational snapshot of v.
pub fn kernel_project(a: &ExactMatrix, v: &[f64], delta: f64) -> Result<KernelProjection> {
    if v.len() != a.cols {
        return Err(Error::DimensionMismatch { expected: a.cols, got: v.len() });
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be nonnegative, got {delta}")));
    }
    let q: Vec<Rational> = v.iter().map(|&x| snap_to_rational(x, SNAPSHOT_BITS)).collect::<Result<_>>()?;
    let aq = a.to_qmatrix();
    let residual = norm_q(&aq.mul_vec(&q)?);
    let (delta_used, delta_replaced) = if residual > delta { (residual, true) } else { (delta, false) };
    let kernel = aq.kernel();
    let v0_exact = if kernel.is_empty() {
        vec![Rational::zero(); a.cols]
    } else {
        // v0 = K (KᵀK)⁻¹ Kᵀ q with K the kernel basis as columns.
        let k = QMatrix::from_columns(&kernel, a.cols)?;
        let kt = k.transpose();
        let coeff = kt.mul(&k)?.inverse()?.mul_vec(&kt.mul_vec(&q)?)?;
        k.mul_vec(&coeff)?
    };
    let diff: Vec<Rational> = q.iter().zip(&v0_exact).map(|(x, y)| x - y).collect();
    let snap_slack = (a.cols as f64).sqrt() * 2f64.powi(-(SNAPSHOT_BITS as i32) - 1);
    let distance = norm_q(&diff);
    Ok(KernelProjection {
        v0: v0_exact.iter().map(rational_to_f64).collect(),
        residual,
        delta_requested: delta,
        delta_used,
        delta_replaced,
        distance,
        bound: a.lemma_radius(delta_used) + snap_slack,
        snapshot_bits: SNAPSHOT_BITS,
        kernel_dim: kernel.len(),
        v0_exact,
    })
}

/// Whether A·v0 = 0 holds exactly.
pub fn annihilates(a: &ExactMatrix, v0: &[Rational]) -> Result<bool> {
    Ok(a.to_qmatrix().mul_vec(v0)?.iter().all(Zero::is_zero))
}

/// Characteristic polynomial det(xI − M) of an integer matrix by Faddeev–LeVerrier,
/// coefficients in increasing degree. All intermediate quantities are integers.
pub fn charpoly(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = m.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mul = |a: &[Vec<BigInt>], b: &[Vec<BigInt>]| -> Vec<Vec<BigInt>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).fold(BigInt::zero(), |acc, k| acc + &a[i][k] * &b[k][j])).collect())
            .collect()
    };
    let mut mk = vec![vec![BigInt::zero(); n]; n];
    let mut c = BigInt::one();
    for k in 1..=n {
        mk = mul(m, &mk);
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &c;
        }
        let am = mul(m, &mk);
        let tr = (0..n).fold(BigInt::zero(), |acc, i| acc + &am[i][i]);
        c = -tr / BigInt::from(k);
        coeffs[n - k] = c.clone();
    }
    coeffs
}

pub fn eval_poly(p: &[BigInt], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + Rational::from_integer(c.clone()))
}

/// Number of roots (with multiplicity) of a real-rooted integer polynomial that are
/// strictly greater than `c`, by Descartes' rule on the shifted polynomial
/// q(c + y)·den^d, which is exact for real-rooted polynomials.
fn roots_above(p: &[BigInt], c: &Rational) -> usize {
    let d = p.len() - 1;
    let (num, den) = (c.numer().clone(), c.denom().clone());
    // Σ_k p_k (num + den·y)^k den^{d−k}
    let mut shifted = vec![BigInt::zero(); d + 1];
    let mut power = vec![BigInt::one()]; // (num + den·y)^k
    for (k, pk) in p.iter().enumerate() {
        let scale = pk * num_traits::pow(den.clone(), d - k);
        for (i, c) in power.iter().enumerate() {
            shifted[i] += &scale * c;
        }
        let mut next = vec![BigInt::zero(); power.len() + 1];
        for (i, c) in power.iter().enumerate() {
            next[i] += c * &num;
            next[i + 1] += c * &den;
        }
        power = next;
    }
    let signs: Vec<bool> = shifted.iter().filter(|x| !x.is_zero()).map(|x| x.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularValueReport {
    pub rank: usize,
    pub sigma_min: f64,
    /// Certified enclosure of σ_min.
    pub sigma_interval: (f64, f64),
    /// (nmE²)^{−n/2}.
    pub floor: f64,
    /// No eigenvalue of AAᵗ lies in (0, floor²), certified by an exact root count.
    /// When set, the interval's lower end is at least `floor`.
    pub floor_certified: bool,
}

fn to_rational_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Smallest nonzero singular value with an exact certificate and the floor check.
pub fn singular_value_floor(a: &ExactMatrix) -> Result<SingularValueReport> {
    if a.is_zero() {
        return Err(Error::InvalidArgument("matrix must be nonzero".into()));
    }
    let ent = &a.entries;
    let aat: Vec<Vec<BigInt>> = (0..a.rows)
        .map(|i| (0..a.rows).map(|j| (0..a.cols).fold(BigInt::zero(), |acc, k| acc + &ent[i][k] * &ent[j][k])).collect())
        .collect();
    let p = charpoly(&aat);
    // Strip the x^z factor of the zero eigenvalues; the rest has only positive roots.
    let z = p.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let reduced = p[z..].to_vec();
    let deg = reduced.len() - 1;
    let rank = a.rows - z;
    // Roots of `reduced` in (0, c].
    let count_le = |c: &Rational| deg - roots_above(&reduced, c);
    let svals = a.to_f64().singular_values();
    let smax = svals.iter().cloned().fold(0.0, f64::max);
    let mut est: Vec<f64> = svals.iter().cloned().filter(|&s| s > smax * 1e-12).collect();
    est.sort_by(f64::total_cmp);
    let guess = est.first().copied().unwrap_or(smax);
    let mut width = 1e-9;
    let (lo, hi) = loop {
        let lo2 = to_rational_f64((guess * guess) * (1.0 - width));
        let hi2 = to_rational_f64((guess * guess) * (1.0 + width));
        if count_le(&lo2) == 0 && count_le(&hi2) >= 1 {
            break (lo2, hi2);
        }
        width *= 100.0;
        if width > 0.5 {
            return Err(Error::Certification("could not isolate the smallest nonzero eigenvalue of AAᵗ".into()));
        }
    };
    let (n, m) = (a.rows as i64, a.cols as i64);
    let e = Rational::from_integer(a.entry_bound.clone());
    let base = Rational::from_integer(BigInt::from(n * m)) * &e * &e;
    let floor_sq = num_traits::pow(base.recip(), a.rows);
    let at_floor = usize::from(eval_poly(&reduced, &floor_sq).is_zero());
    let floor_certified = count_le(&floor_sq) == at_floor;
    let floor = a.singular_floor();
    let mut lower = rational_to_f64(&lo).sqrt();
    if floor_certified {
        lower = lower.max(floor);
    }
    Ok(SingularValueReport {
        rank,
        sigma_min: guess,
        sigma_interval: (lower, rational_to_f64(&hi).sqrt()),
        floor,
        floor_certified,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CuttingSet {
    pub indices: Vec<usize>,
    pub intersection_dim: usize,
    /// The selected intersection equals the intersection of all inputs (exact).
    pub verified: bool,
}

/// Constraint rows whose common kernel is the span of `span`.
fn constraints(span: &[Vec<Rational>], d: usize) -> Result<Vec<Vec<Rational>>> {
    if span.is_empty() {
        return Ok((0..d)
            .map(|i| (0..d).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect());
    }
    Ok(QMatrix::from_rows(span, d)?.kernel())
}

fn stacked_rank(rows: &[Vec<Rational>], d: usize) -> Result<usize> {
    if rows.is_empty() {
        return Ok(0);
    }
    Ok(QMatrix::from_rows(rows, d)?.rank())
}

/// Greedy choice of ≤ d subspaces whose intersection equals the intersection of all.
pub fn minimal_cutting_set(subspaces: &[Vec<Vec<Rational>>], d: usize) -> Result<CuttingSet> {
    let cons: Vec<Vec<Vec<Rational>>> = subspaces.iter().map(|s| constraints(s, d)).collect::<Result<_>>()?;
    let mut stack: Vec<Vec<Rational>> = Vec::new();
    let mut rank = 0;
    let mut indices = Vec::new();
    for (i, c) in cons.iter().enumerate() {
        let mut trial = stack.clone();
        trial.extend(c.iter().cloned());
        let r = stacked_rank(&trial, d)?;
        if r > rank {
            stack = trial;
            rank = r;
            indices.push(i);
        }
    }
    let all: Vec<Vec<Rational>> = cons.into_iter().flatten().collect();
    let verified = stacked_rank(&all, d)? == rank;
    Ok(CuttingSet { indices, intersection_dim: d - rank, verified })
}

/// Helper for integer inputs.
pub fn integer_rows(v: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    v.iter().map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect()).collect()
}

#[cfg(test)]
mod tests;
