//! Finite-dimensional real Lie algebras given by exact structure constants.

mod builtin;
mod frame;
mod json;

pub use builtin::{builtin, builtin_names, sl_n, sl3_with_principal_triple};
pub use frame::{ExactFrame, SubspaceFrame};
pub use json::{AlgebraDocument, TripleDocument};

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::QMatrix;
use crate::scalar::{rational_to_f64, Rational, Scalar};

/// An element of 𝔤 in the coordinates of the basis e_i.
#[derive(Clone, Debug, PartialEq)]
pub struct GVector<T = f64> {
    pub coords: Vec<T>,
}

impl<T: Scalar> GVector<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { coords: vec![T::zero(); dim] }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[i] = T::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { coords: self.coords.iter().map(|a| a.clone() * s.clone()).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { coords: self.coords.iter().map(|a| -a.clone()).collect() }
    }

    pub fn to_f64(&self) -> GVector<f64> {
        GVector { coords: self.coords.iter().map(Scalar::to_f64).collect() }
    }
}

impl GVector<f64> {
    pub fn euclidean_norm(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn axpy(&mut self, a: f64, x: &GVector<f64>) {
        for (s, v) in self.coords.iter_mut().zip(&x.coords) {
            *s += a * v;
        }
    }
}

impl GVector<Rational> {
    pub fn from_ints(v: &[i64]) -> Self {
        Self { coords: v.iter().map(|&x| Rational::from_i64(x)).collect() }
    }

    pub fn from_f64_lossy(&self) -> GVector<f64> {
        self.to_f64()
    }
}

/// A fixed (E, H, F) with [H,E] = 2E, [H,F] = −2F, [E,F] = H.
#[derive(Clone, Debug, PartialEq)]
pub struct Sl2Triple {
    pub e: GVector<Rational>,
    pub h: GVector<Rational>,
    pub f: GVector<Rational>,
}

/// Exact splitting 𝔤 = 𝔤₀ ⊕ 𝔤₁ with 𝔤₀ = ker(ad E) and 𝔤₁ = im(ad F).
#[derive(Clone, Debug)]
struct WeightSplit {
    g0_dim: usize,
    projector: QMatrix,
    projector_f64: DMatrix<f64>,
}

/// Linear realization of 𝔤 inside gl_N by exact basis matrices.
#[derive(Clone, Debug)]
pub struct MatrixRealization {
    size: usize,
    basis: Vec<QMatrix>,
    /// Left inverse of the n²×dim vectorization of the basis.
    coord_map: QMatrix,
    coord_map_f64: DMatrix<f64>,
}

impl MatrixRealization {
    pub fn new(size: usize, basis: Vec<QMatrix>) -> Result<Self> {
        let dim = basis.len();
        let mut vecs = QMatrix::zeros(size * size, dim);
        for (k, b) in basis.iter().enumerate() {
            if b.nrows() != size || b.ncols() != size {
                return Err(Error::DimensionMismatch { expected: size, got: b.nrows() });
            }
            for i in 0..size {
                for j in 0..size {
                    vecs[(i * size + j, k)] = b[(i, j)].clone();
                }
            }
        }
        let vt = vecs.transpose();
        let gram = vt.mul(&vecs)?;
        let coord_map = gram
            .inverse()
            .map_err(|_| Error::InvalidAlgebra("realization basis matrices are linearly dependent".into()))?
            .mul(&vt)?;
        let coord_map_f64 = coord_map.to_f64();
        Ok(Self { size, basis, coord_map, coord_map_f64 })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn basis(&self) -> &[QMatrix] {
        &self.basis
    }

    pub fn to_matrix(&self, x: &GVector<Rational>) -> QMatrix {
        let mut m = QMatrix::zeros(self.size, self.size);
        for (c, b) in x.coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for i in 0..self.size {
                for j in 0..self.size {
                    if !b[(i, j)].is_zero() {
                        m[(i, j)] += c * &b[(i, j)];
                    }
                }
            }
        }
        m
    }

    pub fn to_matrix_f64(&self, x: &GVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for (c, b) in x.coords.iter().zip(&self.basis) {
            if *c == 0.0 {
                continue;
            }
            for i in 0..self.size {
                for j in 0..self.size {
                    if !b[(i, j)].is_zero() {
                        m[(i, j)] += c * rational_to_f64(&b[(i, j)]);
                    }
                }
            }
        }
        m
    }

    /// Coordinates of a matrix that lies in the realized algebra.
    pub fn from_matrix(&self, m: &QMatrix) -> Result<GVector<Rational>> {
        let n = self.size;
        let flat: Vec<Rational> = (0..n * n).map(|k| m[(k / n, k % n)].clone()).collect();
        let coords = self.coord_map.mul_vec(&flat)?;
        let back = self.to_matrix(&GVector::new(coords.clone()));
        if &back != m {
            return Err(Error::InvalidArgument("matrix is not in the realized algebra".into()));
        }
        Ok(GVector::new(coords))
    }

    /// Least-squares coordinates of a real matrix.
    pub fn from_matrix_f64(&self, m: &DMatrix<f64>) -> GVector<f64> {
        let n = self.size;
        let flat = nalgebra::DVector::from_fn(n * n, |k, _| m[(k / n, k % n)]);
        GVector::new((&self.coord_map_f64 * flat).iter().copied().collect())
    }

    /// Ad(g)x = g X g⁻¹ for an exact invertible g.
    pub fn adjoint_action(&self, g: &QMatrix, x: &GVector<Rational>) -> Result<GVector<Rational>> {
        let ginv = g.inverse()?;
        let m = g.mul(&self.to_matrix(x))?.mul(&ginv)?;
        self.from_matrix(&m)
    }

    pub fn adjoint_action_f64(&self, g: &DMatrix<f64>, x: &GVector<f64>) -> Result<GVector<f64>> {
        let ginv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("group element is not invertible".into()))?;
        Ok(self.from_matrix_f64(&(g * self.to_matrix_f64(x) * ginv)))
    }
}

#[derive(Clone, Debug)]
pub struct LieAlgebraModel {
    name: String,
    dim: usize,
    basis_names: Vec<String>,
    /// Nonzero c[i][j][k], both orders (i,j) and (j,i) present.
    constants: Vec<(usize, usize, usize, Rational)>,
    constants_f64: Vec<(usize, usize, usize, f64)>,
    norm_scale: f64,
    lattice: Vec<GVector<Rational>>,
    killing: QMatrix,
    killing_f64: DMatrix<f64>,
    triple: Option<Sl2Triple>,
    split: Option<WeightSplit>,
    realization: Option<MatrixRealization>,
}

impl LieAlgebraModel {
    /// Builds and validates a model. `constants` lists c[i][j][k] for any subset of ordered
    /// pairs; the antisymmetric partner is filled in and conflicts are rejected.
    pub fn new(
        name: impl Into<String>,
        basis_names: Vec<String>,
        constants: &[(usize, usize, usize, Rational)],
        lattice: Option<Vec<GVector<Rational>>>,
        triple: Option<Sl2Triple>,
        realization: Option<MatrixRealization>,
    ) -> Result<Self> {
        let dim = basis_names.len();
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        let mut dense = vec![Rational::zero(); dim * dim * dim];
        let mut set = vec![false; dim * dim * dim];
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for (i, j, k, c) in constants {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidAlgebra(format!("index ({i},{j},{k}) out of range")));
            }
            if i == j && !c.is_zero() {
                return Err(Error::InvalidAlgebra(format!("[e{i},e{i}] must vanish")));
            }
            for (a, b, v) in [(i, j, c.clone()), (j, i, -c.clone())] {
                let p = idx(a, b, k);
                if set[p] && dense[p] != v {
                    return Err(Error::InvalidAlgebra(format!(
                        "conflicting constants for [e{a},e{b}] in coordinate {k}"
                    )));
                }
                set[p] = true;
                dense[p] = v;
            }
        }
        let mut sparse = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let c = &dense[idx(i, j, k)];
                    if !c.is_zero() {
                        sparse.push((i, j, k, c.clone()));
                    }
                }
            }
        }
        let constants_f64 = sparse.iter().map(|(i, j, k, c)| (*i, *j, *k, rational_to_f64(c))).collect();

        // Norm calibration: L = spectral norm of the dim × dim² unfolding.
        let unfold = DMatrix::from_fn(dim, dim * dim, |k, p| rational_to_f64(&dense[p * dim + k]));
        let sigma = unfold.singular_values().iter().cloned().fold(0.0, f64::max);
        let norm_scale = if sigma > 0.0 { sigma } else { 1.0 };

        let mut model = Self {
            name: name.into(),
            dim,
            basis_names,
            constants: sparse,
            constants_f64,
            norm_scale,
            lattice: Vec::new(),
            killing: QMatrix::zeros(dim, dim),
            killing_f64: DMatrix::zeros(dim, dim),
            triple: None,
            split: None,
            realization,
        };
        model.check_jacobi()?;
        let mut killing = QMatrix::zeros(dim, dim);
        let ads: Vec<QMatrix> = (0..dim).map(|i| model.ad_exact(&GVector::basis(dim, i))).collect();
        for i in 0..dim {
            for j in i..dim {
                let t = trace_of_product(&ads[i], &ads[j]);
                killing[(i, j)] = t.clone();
                killing[(j, i)] = t;
            }
        }
        model.killing_f64 = killing.to_f64();
        model.killing = killing;

        let lattice = lattice.unwrap_or_else(|| (0..dim).map(|i| GVector::basis(dim, i)).collect());
        model.set_lattice(lattice)?;
        if let Some(r) = &model.realization {
            if r.basis.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.basis.len() });
            }
            for i in 0..dim {
                for j in i + 1..dim {
                    let (a, b) = (&r.basis[i], &r.basis[j]);
                    let comm = sub_q(&a.mul(b)?, &b.mul(a)?);
                    let want = r.to_matrix(&model.bracket(&GVector::basis(dim, i), &GVector::basis(dim, j))?);
                    if comm != want {
                        return Err(Error::InvalidAlgebra(format!(
                            "realization does not match the bracket on ({i},{j})"
                        )));
                    }
                }
            }
        }
        if let Some(t) = triple {
            model.set_triple(t)?;
        }
        Ok(model)
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (x, y, z) = (GVector::<Rational>::basis(n, i), GVector::basis(n, j), GVector::basis(n, k));
                    let a = self.bracket(&self.bracket(&x, &y)?, &z)?;
                    let b = self.bracket(&self.bracket(&y, &z)?, &x)?;
                    let c = self.bracket(&self.bracket(&z, &x)?, &y)?;
                    if !a.add(&b).add(&c).is_zero() {
                        return Err(Error::InvalidAlgebra(format!("Jacobi identity fails on ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }

    fn set_lattice(&mut self, lattice: Vec<GVector<Rational>>) -> Result<()> {
        let n = self.dim;
        if lattice.len() != n || lattice.iter().any(|v| v.dim() != n) {
            return Err(Error::InvalidAlgebra("lattice basis must have dim vectors of length dim".into()));
        }
        let cols: Vec<Vec<Rational>> = lattice.iter().map(|v| v.coords.clone()).collect();
        let basis = QMatrix::from_columns(&cols, n)?;
        let inv = basis
            .inverse()
            .map_err(|_| Error::InvalidAlgebra("lattice basis is not full rank".into()))?;
        for a in &lattice {
            for b in &lattice {
                let c = inv.mul_vec(&self.bracket(a, b)?.coords)?;
                if c.iter().any(|q| !q.is_integer()) {
                    return Err(Error::InvalidAlgebra("lattice is not closed under the bracket".into()));
                }
            }
        }
        self.lattice = lattice;
        Ok(())
    }

    fn set_triple(&mut self, t: Sl2Triple) -> Result<()> {
        let two = Rational::from_i64(2);
        let he = self.bracket(&t.h, &t.e)?;
        let hf = self.bracket(&t.h, &t.f)?;
        let ef = self.bracket(&t.e, &t.f)?;
        if he != t.e.scale(&two) || hf != t.f.scale(&-two) || ef != t.h {
            return Err(Error::InvalidAlgebra("sl2 triple relations fail".into()));
        }
        let n = self.dim;
        let ad_e = self.ad_exact(&t.e);
        let ad_f = self.ad_exact(&t.f);
        let g0 = ad_e.kernel();
        let g1 = ad_f.transpose().row_space(); // column space of ad F
        if g0.len() + g1.len() != n {
            return Err(Error::InvalidAlgebra("ker(ad E) and im(ad F) are not complementary".into()));
        }
        let mut cols = g0.clone();
        cols.extend(g1);
        let q = QMatrix::from_columns(&cols, n)?;
        let qinv = q
            .inverse()
            .map_err(|_| Error::InvalidAlgebra("ker(ad E) and im(ad F) intersect".into()))?;
        let mut keep = QMatrix::zeros(n, n);
        for i in 0..g0.len() {
            keep[(i, i)] = Rational::one();
        }
        let projector = q.mul(&keep)?.mul(&qinv)?;
        self.split = Some(WeightSplit { g0_dim: g0.len(), projector_f64: projector.to_f64(), projector });
        self.triple = Some(t);
        Ok(())
    }

    /// Returns a copy of this model with a different sl2 triple.
    pub fn with_triple(&self, name: impl Into<String>, t: Sl2Triple) -> Result<Self> {
        let mut m = self.clone();
        m.name = name.into();
        m.set_triple(t)?;
        Ok(m)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.basis_names.iter().position(|n| n == name)
    }

    /// λ such that ‖x‖ = λ·|x|₂ satisfies ‖[u,v]‖ ≤ ‖u‖‖v‖.
    pub fn norm_scale(&self) -> f64 {
        self.norm_scale
    }

    pub fn structure_constants(&self) -> &[(usize, usize, usize, Rational)] {
        &self.constants
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.constants
            .iter()
            .find(|(a, b, c, _)| (*a, *b, *c) == (i, j, k))
            .map(|t| t.3.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn lattice_basis(&self) -> &[GVector<Rational>] {
        &self.lattice
    }

    pub fn sl2_triple(&self) -> Option<&Sl2Triple> {
        self.triple.as_ref()
    }

    pub fn realization(&self) -> Option<&MatrixRealization> {
        self.realization.as_ref()
    }

    pub fn killing_matrix(&self) -> &QMatrix {
        &self.killing
    }

    fn check_dim<T>(&self, x: &GVector<T>) -> Result<()> {
        if x.coords.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.coords.len() });
        }
        Ok(())
    }

    pub fn bracket<T: Scalar>(&self, x: &GVector<T>, y: &GVector<T>) -> Result<GVector<T>> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let mut out = vec![T::zero(); self.dim];
        for (i, j, k, c) in &self.constants {
            let (xi, yj) = (&x.coords[*i], &y.coords[*j]);
            if xi.is_zero() || yj.is_zero() {
                continue;
            }
            out[*k] = out[*k].clone() + xi.clone() * yj.clone() * T::from_rational(c);
        }
        Ok(GVector::new(out))
    }

    /// Floating bracket on raw coordinate slices; `out` is overwritten.
    pub fn bracket_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(i, j, k, c) in &self.constants_f64 {
            out[k] += x[i] * y[j] * c;
        }
    }

    pub fn bracket_f64(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.bracket_into(x, y, &mut out);
        out
    }

    /// Matrix of ad x: column j holds [x, e_j].
    pub fn adjoint_matrix<T: Scalar>(&self, x: &GVector<T>) -> Result<Vec<Vec<T>>> {
        self.check_dim(x)?;
        let mut m = vec![vec![T::zero(); self.dim]; self.dim];
        for (i, j, k, c) in &self.constants {
            let xi = &x.coords[*i];
            if !xi.is_zero() {
                m[*k][*j] = m[*k][*j].clone() + xi.clone() * T::from_rational(c);
            }
        }
        Ok(m)
    }

    pub fn ad_exact(&self, x: &GVector<Rational>) -> QMatrix {
        let m = self.adjoint_matrix(x).expect("dimension checked by caller");
        QMatrix::from_rows(&m, self.dim).expect("square")
    }

    pub fn ad_f64(&self, x: &GVector<f64>) -> Result<DMatrix<f64>> {
        let m = self.adjoint_matrix(x)?;
        Ok(DMatrix::from_fn(self.dim, self.dim, |i, j| m[i][j]))
    }

    /// B(x,y) = tr(ad x ∘ ad y).
    pub fn killing_form<T: Scalar>(&self, x: &GVector<T>, y: &GVector<T>) -> Result<T> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let mut s = T::zero();
        for i in 0..self.dim {
            if x.coords[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                let k = &self.killing[(i, j)];
                if !k.is_zero() && !y.coords[j].is_zero() {
                    s = s + x.coords[i].clone() * y.coords[j].clone() * T::from_rational(k);
                }
            }
        }
        Ok(s)
    }

    pub fn killing_form_f64(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += x[i] * self.killing_f64[(i, j)] * y[j];
            }
        }
        s
    }

    pub fn norm(&self, x: &GVector<f64>) -> f64 {
        self.norm_scale * x.euclidean_norm()
    }

    pub fn inner(&self, x: &GVector<f64>, y: &GVector<f64>) -> f64 {
        let s: f64 = x.coords.iter().zip(&y.coords).map(|(a, b)| a * b).sum();
        self.norm_scale * self.norm_scale * s
    }

    /// Splits r = r0 + r1 with r0 ∈ ker(ad E) and r1 ∈ im(ad F).
    pub fn weight_decompose<T: Scalar>(&self, r: &GVector<T>) -> Result<(GVector<T>, GVector<T>)> {
        self.check_dim(r)?;
        let split = self.split.as_ref().ok_or(Error::NoSl2Triple)?;
        let n = self.dim;
        let r0: Vec<T> = if T::is_exact() {
            (0..n)
                .map(|i| {
                    let mut s = T::zero();
                    for j in 0..n {
                        let p = &split.projector[(i, j)];
                        if !p.is_zero() && !r.coords[j].is_zero() {
                            s = s + T::from_rational(p) * r.coords[j].clone();
                        }
                    }
                    s
                })
                .collect()
        } else {
            (0..n)
                .map(|i| {
                    let mut s = T::zero();
                    for j in 0..n {
                        let p = split.projector_f64[(i, j)];
                        if p != 0.0 {
                            s = s + T::from_f64(p) * r.coords[j].clone();
                        }
                    }
                    s
                })
                .collect()
        };
        let r0 = GVector::new(r0);
        let r1 = r.sub(&r0);
        Ok((r0, r1))
    }

    /// Dimension of the fixed subspace ker(ad E).
    pub fn fixed_dim(&self) -> Option<usize> {
        self.split.as_ref().map(|s| s.g0_dim)
    }

    /// Killing-orthogonal complement of the span of `h`, checked for ad(𝔥)-invariance.
    pub fn invariant_complement(&self, h: &SubspaceFrame) -> Result<SubspaceFrame> {
        let n = self.dim;
        let k = h.dim();
        if k == 0 {
            return Ok(SubspaceFrame::full(self));
        }
        let gram = DMatrix::from_fn(k, k, |i, j| self.killing_form_f64(&h.vectors()[i].coords, &h.vectors()[j].coords));
        let scale = self.killing_f64.iter().fold(0.0f64, |m, v| m.max(v.abs())) / self.norm_scale.powi(2);
        let det = gram.determinant();
        if det.abs() <= 1e-10 * scale.max(1.0).powi(k as i32) {
            return Err(Error::DegenerateKilling(det.abs()));
        }
        // Constraint rows: x ↦ B(h_i, x).
        let rows: Vec<Vec<f64>> = h
            .vectors()
            .iter()
            .map(|v| (0..n).map(|j| (0..n).map(|i| v.coords[i] * self.killing_f64[(i, j)]).sum()).collect())
            .collect();
        let null = frame::euclidean_null_space(&rows, n);
        let r = SubspaceFrame::orthonormalize(self, &null, 1e-10);
        for hv in h.vectors() {
            for rv in r.vectors() {
                let b = GVector::new(self.bracket_f64(&hv.coords, &rv.coords));
                let d = r.distance(&b);
                if d > 1e-10 {
                    return Err(Error::InvalidArgument(format!(
                        "complement is not ad-invariant (defect {d:e}); input frame is not a subalgebra"
                    )));
                }
            }
        }
        Ok(r)
    }

    /// Exact Killing-orthogonal complement with exact invariance check.
    pub fn invariant_complement_exact(&self, h: &ExactFrame) -> Result<ExactFrame> {
        let k = h.dim();
        let n = self.dim;
        if k == 0 {
            return Ok(ExactFrame::full(n));
        }
        let mut gram = QMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                gram[(i, j)] = self.killing_form(&h.vectors()[i], &h.vectors()[j])?;
            }
        }
        if gram.det()?.is_zero() {
            return Err(Error::DegenerateKilling(0.0));
        }
        let rows: Vec<Vec<Rational>> = h.vectors().iter().map(|v| self.killing.transpose().mul_vec(&v.coords)).collect::<Result<_>>()?;
        let r = ExactFrame::new(n, QMatrix::from_rows(&rows, n)?.kernel().into_iter().map(GVector::new).collect())?;
        for hv in h.vectors() {
            for rv in r.vectors() {
                if !r.contains(&self.bracket(hv, rv)?)? {
                    return Err(Error::InvalidArgument("complement is not ad-invariant".into()));
                }
            }
        }
        Ok(r)
    }
}

fn trace_of_product(a: &QMatrix, b: &QMatrix) -> Rational {
    let n = a.nrows();
    let mut t = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            if !a[(i, j)].is_zero() && !b[(j, i)].is_zero() {
                t += &a[(i, j)] * &b[(j, i)];
            }
        }
    }
    t
}

fn sub_q(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let mut c = a.clone();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            c[(i, j)] -= &b[(i, j)];
        }
    }
    c
}
