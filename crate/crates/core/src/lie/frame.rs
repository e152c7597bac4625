use num_traits::Zero;

use super::{GVector, LieAlgebraModel};
use crate::error::{Error, Result};
use crate::exact::QMatrix;
use crate::scalar::Rational;

/// Orthonormal basis (in the calibrated algebra norm) of a subspace of 𝔤.
#[derive(Clone, Debug)]
pub struct SubspaceFrame {
    ambient: usize,
    norm_scale: f64,
    vectors: Vec<GVector<f64>>,
}

impl SubspaceFrame {
    pub fn empty(alg: &LieAlgebraModel) -> Self {
        Self { ambient: alg.dim(), norm_scale: alg.norm_scale(), vectors: Vec::new() }
    }

    pub fn full(alg: &LieAlgebraModel) -> Self {
        let n = alg.dim();
        let s = 1.0 / alg.norm_scale();
        Self {
            ambient: n,
            norm_scale: alg.norm_scale(),
            vectors: (0..n).map(|i| GVector::<f64>::basis(n, i).scale(&s)).collect(),
        }
    }

    /// Gram–Schmidt (applied twice) in the algebra inner product. A vector is dropped
    /// when its remaining component is below `rel_tol` times its original norm.
    pub fn orthonormalize(alg: &LieAlgebraModel, input: &[GVector<f64>], rel_tol: f64) -> Self {
        let mut frame = Self::empty(alg);
        for v in input {
            frame.push_orthogonalized(v, rel_tol);
        }
        frame
    }

    /// Accepts vectors that are already orthonormal to within 1e-12.
    pub fn from_orthonormal(alg: &LieAlgebraModel, vectors: Vec<GVector<f64>>) -> Result<Self> {
        let f = Self { ambient: alg.dim(), norm_scale: alg.norm_scale(), vectors };
        if let Some(v) = f.vectors.iter().find(|v| v.dim() != f.ambient) {
            return Err(Error::DimensionMismatch { expected: f.ambient, got: v.dim() });
        }
        let e = f.orthonormality_error();
        if e > 1e-12 {
            return Err(Error::InvalidArgument(format!("frame is not orthonormal (error {e:e})")));
        }
        Ok(f)
    }

    pub fn from_exact(alg: &LieAlgebraModel, exact: &ExactFrame) -> Self {
        let v: Vec<GVector<f64>> = exact.vectors().iter().map(GVector::to_f64).collect();
        Self::orthonormalize(alg, &v, 1e-12)
    }

    /// Appends the normalized component of `v` orthogonal to the frame; returns whether it was kept.
    pub fn push_orthogonalized(&mut self, v: &GVector<f64>, rel_tol: f64) -> bool {
        let n0 = self.norm(v);
        if n0 == 0.0 {
            return false;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &self.vectors {
                let c = self.inner(&w, u);
                w.axpy(-c, u);
            }
        }
        let nw = self.norm(&w);
        if nw <= rel_tol * n0 {
            return false;
        }
        self.vectors.push(w.scale(&(1.0 / nw)));
        true
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn vectors(&self) -> &[GVector<f64>] {
        &self.vectors
    }

    pub fn norm(&self, x: &GVector<f64>) -> f64 {
        self.norm_scale * x.euclidean_norm()
    }

    pub fn inner(&self, x: &GVector<f64>, y: &GVector<f64>) -> f64 {
        let s: f64 = x.coords.iter().zip(&y.coords).map(|(a, b)| a * b).sum();
        self.norm_scale * self.norm_scale * s
    }

    pub fn project(&self, x: &GVector<f64>) -> GVector<f64> {
        let mut p = GVector::zeros(self.ambient);
        for u in &self.vectors {
            p.axpy(self.inner(x, u), u);
        }
        p
    }

    /// Distance in the algebra norm from `x` to the span.
    pub fn distance(&self, x: &GVector<f64>) -> f64 {
        self.norm(&x.sub(&self.project(x)))
    }

    /// Maximum over frame pairs of the distance of their bracket to the span.
    pub fn closure_defect(&self, alg: &LieAlgebraModel) -> f64 {
        let mut worst = 0.0f64;
        let mut buf = vec![0.0; self.ambient];
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                alg.bracket_into(&self.vectors[i].coords, &self.vectors[j].coords, &mut buf);
                worst = worst.max(self.distance(&GVector::new(buf.clone())));
            }
        }
        worst
    }

    /// max |⟨v_i, v_j⟩ − δ_ij|.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.inner(&self.vectors[i], &self.vectors[j]) - target).abs());
            }
        }
        worst
    }

    /// Largest distance from a vector of `other` to this span.
    pub fn max_distance_of(&self, other: &SubspaceFrame) -> f64 {
        other.vectors.iter().map(|v| self.distance(v)).fold(0.0, f64::max)
    }
}

/// Linearly independent exact-rational basis of a subspace of 𝔤.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactFrame {
    ambient: usize,
    vectors: Vec<GVector<Rational>>,
}

impl ExactFrame {
    pub fn new(ambient: usize, vectors: Vec<GVector<Rational>>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.dim() != ambient) {
            return Err(Error::DimensionMismatch { expected: ambient, got: v.dim() });
        }
        let f = Self { ambient, vectors };
        if f.matrix().rank() != f.vectors.len() {
            return Err(Error::InvalidArgument("frame vectors are linearly dependent".into()));
        }
        Ok(f)
    }

    /// Extracts a basis (reduced echelon rows) from a spanning set.
    pub fn from_spanning(ambient: usize, span: &[GVector<Rational>]) -> Result<Self> {
        let rows: Vec<Vec<Rational>> = span.iter().map(|v| v.coords.clone()).collect();
        let basis = if rows.is_empty() { Vec::new() } else { QMatrix::from_rows(&rows, ambient)?.row_space() };
        Ok(Self { ambient, vectors: basis.into_iter().map(GVector::new).collect() })
    }

    pub fn full(ambient: usize) -> Self {
        Self { ambient, vectors: (0..ambient).map(|i| GVector::basis(ambient, i)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn vectors(&self) -> &[GVector<Rational>] {
        &self.vectors
    }

    /// Rows are the basis vectors.
    pub fn matrix(&self) -> QMatrix {
        let rows: Vec<Vec<Rational>> = self.vectors.iter().map(|v| v.coords.clone()).collect();
        QMatrix::from_rows(&rows, self.ambient).expect("checked lengths")
    }

    pub fn contains(&self, x: &GVector<Rational>) -> Result<bool> {
        if x.is_zero() {
            return Ok(true);
        }
        if self.vectors.is_empty() {
            return Ok(false);
        }
        Ok(self.matrix().transpose().solve(&x.coords)?.is_some())
    }

    pub fn same_span(&self, other: &ExactFrame) -> Result<bool> {
        if self.dim() != other.dim() {
            return Ok(false);
        }
        for v in &other.vectors {
            if !self.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the span is closed under the bracket (exact).
    pub fn is_subalgebra(&self, alg: &LieAlgebraModel) -> Result<bool> {
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                if !self.contains(&alg.bracket(&self.vectors[i], &self.vectors[j])?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn is_zero_dim(&self) -> bool {
        self.vectors.iter().all(|v| v.coords.iter().all(Zero::is_zero))
    }
}

/// Euclidean orthonormal basis of {x : r·x = 0 for all rows r}.
pub(crate) fn euclidean_null_space(rows: &[Vec<f64>], n: usize) -> Vec<GVector<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    let push = |q: &mut Vec<Vec<f64>>, v: &[f64]| -> bool {
        let n0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n0 == 0.0 {
            return false;
        }
        let mut w = v.to_vec();
        for _ in 0..2 {
            for u in q.iter() {
                let c: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nw <= 1e-10 * n0 {
            return false;
        }
        q.push(w.into_iter().map(|x| x / nw).collect());
        true
    };
    for r in rows {
        push(&mut q, r);
    }
    let row_rank = q.len();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        push(&mut q, &e);
    }
    q.into_iter().skip(row_rank).map(GVector::new).collect()
}
