//! Effective generation of Lie subalgebras from nearly closed sets of vectors:
//! iterated brackets, singular-value filtering, the depth/threshold stabilization
//! loop and projection onto a nearby genuine subalgebra.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::combinations;
use crate::lie::{GVector, LieAlgebraModel, SubspaceFrame};

pub const DEFAULT_CLOSURE_CAP: usize = 100_000;
const DEDUP_TOL: f64 = 1e-12;
/// Singular values below this multiple of the largest one are numerical noise.
const NUMERICAL_RANK_FLOOR: f64 = 1e-13;

/// A bracket monomial in the generators t_0, t_1, ...
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BracketExpr {
    Leaf(usize),
    Bracket(Arc<BracketExpr>, Arc<BracketExpr>),
}

impl fmt::Display for BracketExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketExpr::Leaf(i) => write!(f, "t{i}"),
            BracketExpr::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BracketElement {
    pub vector: GVector<f64>,
    pub expr: Arc<BracketExpr>,
    pub depth: usize,
    /// −1 when the stored vector is the negative of the monomial.
    pub sign: f64,
}

/// T^(k): all bracket monomials of depth ≤ k, deduplicated up to sign.
#[derive(Clone, Debug)]
pub struct BracketClosure {
    pub depth: usize,
    pub elements: Vec<BracketElement>,
    generators: usize,
    levels: Vec<std::ops::Range<usize>>,
    keys: HashMap<Vec<i64>, usize>,
    cap: usize,
}

fn dedup_key(v: &[f64]) -> Option<Vec<i64>> {
    let lead = v.iter().find(|x| x.abs() > DEDUP_TOL)?;
    let s = if *lead < 0.0 { -1.0 } else { 1.0 };
    Some(v.iter().map(|x| (s * x / DEDUP_TOL).round() as i64).collect())
}

impl BracketClosure {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    /// Elements of depth ≤ `k` (a prefix, since levels are stored in order).
    pub fn up_to_depth(&self, k: usize) -> &[BracketElement] {
        let end = self.levels.get(k.saturating_sub(1)).map_or(self.elements.len(), |r| r.end);
        &self.elements[..end]
    }

    fn push(&mut self, v: Vec<f64>, expr: Arc<BracketExpr>, depth: usize) -> Result<()> {
        let Some(key) = dedup_key(&v) else { return Ok(()) };
        if self.keys.contains_key(&key) {
            return Ok(());
        }
        if self.elements.len() >= self.cap {
            return Err(Error::ClosureCap { cap: self.cap });
        }
        self.keys.insert(key, self.elements.len());
        self.elements.push(BracketElement { vector: GVector::new(v), expr, depth, sign: 1.0 });
        Ok(())
    }

    /// Adds the levels up to depth `k`.
    pub fn extend_to(&mut self, alg: &LieAlgebraModel, k: usize) -> Result<()> {
        let mut buf = vec![0.0; alg.dim()];
        while self.depth < k {
            let d = self.depth + 1;
            let start = self.elements.len();
            for i in 1..=d / 2 {
                let j = d - i;
                let (ri, rj) = (self.levels[i - 1].clone(), self.levels[j - 1].clone());
                for a in ri.clone() {
                    let b_start = if i == j { a + 1 } else { rj.start };
                    for b in b_start..rj.end {
                        alg.bracket_into(&self.elements[a].vector.coords, &self.elements[b].vector.coords, &mut buf);
                        let expr = Arc::new(BracketExpr::Bracket(self.elements[a].expr.clone(), self.elements[b].expr.clone()));
                        self.push(buf.clone(), expr, d)?;
                    }
                }
            }
            self.levels.push(start..self.elements.len());
            self.depth = d;
        }
        Ok(())
    }
}

/// All bracket monomials of depth ≤ k in the generators `t`.
pub fn iterated_brackets(alg: &LieAlgebraModel, t: &[GVector<f64>], k: usize, cap: usize) -> Result<BracketClosure> {
    if t.is_empty() {
        return Err(Error::Empty("generator set"));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if let Some(v) = t.iter().find(|v| v.dim() != alg.dim()) {
        return Err(Error::DimensionMismatch { expected: alg.dim(), got: v.dim() });
    }
    let mut c = BracketClosure {
        depth: 1,
        elements: Vec::new(),
        generators: t.len(),
        levels: Vec::new(),
        keys: HashMap::new(),
        cap,
    };
    for (i, v) in t.iter().enumerate() {
        if c.elements.len() >= cap {
            return Err(Error::ClosureCap { cap });
        }
        if let Some(key) = dedup_key(&v.coords) {
            c.keys.entry(key).or_insert(c.elements.len());
        }
        c.elements.push(BracketElement { vector: v.clone(), expr: Arc::new(BracketExpr::Leaf(i)), depth: 1, sign: 1.0 });
    }
    c.levels.push(0..t.len());
    c.extend_to(alg, k)?;
    Ok(c)
}

/// Thin SVD of the map f: coefficients ↦ Σ c_t t, with 𝔤 carrying the algebra norm.
#[derive(Clone, Debug)]
struct FilterSvd {
    /// Left singular vectors in isometric coordinates (columns), descending σ.
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    /// Right singular vectors (columns).
    v: DMatrix<f64>,
}

fn thin_svd(a: &DMatrix<f64>) -> FilterSvd {
    let (n, big_n) = a.shape();
    let (u, sigma, v) = if big_n > n {
        // Aᵀ = QR, R = U_R Σ V_Rᵀ  ⇒  A = V_R Σ (Q U_R)ᵀ.
        let qr = a.transpose().qr();
        let (q, r) = (qr.q(), qr.r());
        let svd = r.svd(true, true);
        let ur = svd.u.unwrap();
        let vt = svd.v_t.unwrap();
        (vt.transpose(), svd.singular_values.iter().copied().collect::<Vec<_>>(), q * ur)
    } else {
        let svd = a.clone().svd(true, true);
        (svd.u.unwrap(), svd.singular_values.iter().copied().collect::<Vec<_>>(), svd.v_t.unwrap().transpose())
    };
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    FilterSvd {
        u: DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]),
        sigma: order.iter().map(|&i| sigma[i]).collect(),
        v: DMatrix::from_fn(v.nrows(), order.len(), |r, c| v[(r, order[c])]),
    }
}

/// W_m[δ] with the singular value data of f_m.
#[derive(Clone, Debug)]
pub struct FilteredSpace {
    pub m: usize,
    pub delta: f64,
    /// Threshold actually applied: max(δ, numerical rank floor).
    pub effective_threshold: f64,
    pub frame: SubspaceFrame,
    pub singular_values: Vec<f64>,
    svd: FilterSvd,
    norm_scale: f64,
    columns: usize,
}

impl FilteredSpace {
    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// Number of monomials the map f_m is defined on.
    pub fn domain_dim(&self) -> usize {
        self.columns
    }

    /// f_m(c) = Σ c_t t in e-coordinates, using the singular factors.
    pub fn apply(&self, c: &[f64]) -> GVector<f64> {
        let cv = DVector::from_column_slice(c);
        let y = &self.svd.u * DMatrix::from_diagonal(&DVector::from_vec(self.svd.sigma.clone())) * (self.svd.v.transpose() * cv);
        GVector::new(y.iter().map(|x| x / self.norm_scale).collect())
    }

    /// Right singular vectors (columns) and their singular values.
    pub fn right_singular_vectors(&self) -> (&DMatrix<f64>, &[f64]) {
        (&self.svd.v, &self.svd.sigma)
    }

    /// Coefficients c over the monomials with f(c) = P_W x, using only σ ≥ threshold;
    /// |c| ≤ ‖x‖ / threshold.
    pub fn coefficients_for(&self, x: &GVector<f64>) -> Vec<f64> {
        let y = DVector::from_iterator(x.dim(), x.coords.iter().map(|v| v * self.norm_scale));
        let mut c = DVector::zeros(self.svd.v.nrows());
        for j in 0..self.dim() {
            let uj = self.svd.u.column(j);
            c += self.svd.v.column(j) * (uj.dot(&y) / self.svd.sigma[j]);
        }
        c.iter().copied().collect()
    }
}

pub fn svd_filter(alg: &LieAlgebraModel, closure: &[BracketElement], m: usize, delta: f64) -> Result<FilteredSpace> {
    if closure.is_empty() {
        return Err(Error::Empty("bracket closure"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0,1), got {delta}")));
    }
    let n = alg.dim();
    let l = alg.norm_scale();
    let a = DMatrix::from_fn(n, closure.len(), |i, j| l * closure[j].vector.coords[i]);
    let svd = thin_svd(&a);
    let smax = svd.sigma.first().copied().unwrap_or(0.0);
    let threshold = delta.max(NUMERICAL_RANK_FLOOR * smax.max(1.0));
    let keep = svd.sigma.iter().take_while(|&&s| s >= threshold).count();
    let vectors: Vec<GVector<f64>> =
        (0..keep).map(|j| GVector::new(svd.u.column(j).iter().map(|x| x / l).collect())).collect();
    let frame = SubspaceFrame::from_orthonormal(alg, vectors)
        .or_else(|_| Ok::<_, Error>(SubspaceFrame::orthonormalize(alg, &(0..keep).map(|j| GVector::new(svd.u.column(j).iter().map(|x| x / l).collect())).collect::<Vec<_>>(), 1e-8)))?;
    Ok(FilteredSpace {
        m,
        delta,
        effective_threshold: threshold,
        frame,
        singular_values: svd.sigma.clone(),
        svd,
        norm_scale: l,
        columns: closure.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizeStep {
    pub m: usize,
    pub delta1: f64,
    pub dim_m: usize,
    pub dim_2m: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Stabilized {
    pub m: usize,
    pub delta1: f64,
    pub space: FilteredSpace,
    pub closure: BracketClosure,
    /// Number of (m, δ₁) ← (2m, δ₁³) updates performed.
    pub iterations: usize,
    pub history: Vec<StabilizeStep>,
}

fn check_generators(alg: &LieAlgebraModel, t: &[GVector<f64>]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::Empty("generator set"));
    }
    if let Some(v) = t.iter().find(|v| v.dim() != alg.dim()) {
        return Err(Error::DimensionMismatch { expected: alg.dim(), got: v.dim() });
    }
    for (i, a) in t.iter().enumerate() {
        for (j, b) in t.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            if (alg.inner(a, b) - target).abs() > 1e-9 {
                return Err(Error::InvalidArgument("generators must be orthonormal in the algebra norm".into()));
            }
        }
    }
    Ok(())
}

/// Runs (m, δ₁) = (1, δ); while dim W_m[δ₁] < dim W_{2m}[δ₁³] set (m, δ₁) ← (2m, δ₁³).
pub fn stabilize(alg: &LieAlgebraModel, t: &[GVector<f64>], delta: f64, cap: usize) -> Result<Stabilized> {
    check_generators(alg, t)?;
    let mut m = 1;
    let mut d1 = delta;
    let mut closure = iterated_brackets(alg, t, 1, cap)?;
    let mut w = svd_filter(alg, closure.up_to_depth(1), 1, d1)?;
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        if w.dim() == alg.dim() {
            history.push(StabilizeStep { m, delta1: d1, dim_m: w.dim(), dim_2m: None });
            break;
        }
        closure.extend_to(alg, 2 * m)?;
        let w2 = svd_filter(alg, closure.up_to_depth(2 * m), 2 * m, d1.powi(3))?;
        history.push(StabilizeStep { m, delta1: d1, dim_m: w.dim(), dim_2m: Some(w2.dim()) });
        if w.dim() >= w2.dim() {
            break;
        }
        iterations += 1;
        m *= 2;
        d1 = d1.powi(3);
        w = w2;
    }
    Ok(Stabilized { m, delta1: d1, space: w, closure, iterations, history })
}

#[derive(Clone, Copy, Debug)]
pub struct NearestOptions {
    pub closure_tol: f64,
    pub max_iter: usize,
}

impl Default for NearestOptions {
    fn default() -> Self {
        Self { closure_tol: 1e-9, max_iter: 500 }
    }
}

#[derive(Clone, Debug)]
pub struct NearestOutcome {
    pub frame: SubspaceFrame,
    pub iterations: usize,
    pub initial_defect: f64,
    pub closure_defect: f64,
    pub objective: f64,
}

/// Frame in isometric coordinates (y = L·x) as columns.
fn to_iso(alg: &LieAlgebraModel, vs: &[GVector<f64>]) -> Vec<Vec<f64>> {
    vs.iter().map(|v| v.coords.iter().map(|x| x * alg.norm_scale()).collect()).collect()
}

fn iso_bracket(alg: &LieAlgebraModel, a: &[f64], b: &[f64], out: &mut [f64]) {
    alg.bracket_into(a, b, out);
    let l = alg.norm_scale();
    out.iter_mut().for_each(|x| *x /= l);
}

fn det_small(m: &mut [f64], k: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..k {
        let p = (c..k).max_by(|&a, &b| m[a * k + c].abs().total_cmp(&m[b * k + c].abs())).unwrap();
        if m[p * k + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..k {
                m.swap(p * k + j, c * k + j);
            }
            det = -det;
        }
        let piv = m[c * k + c];
        det *= piv;
        for i in c + 1..k {
            let f = m[i * k + c] / piv;
            if f != 0.0 {
                for j in c..k {
                    m[i * k + j] -= f * m[c * k + j];
                }
            }
        }
    }
    det
}

/// Residuals and Jacobian of F(Y) = Σ_{i,j} |Y_1∧…∧Y_r∧[Y_i,Y_j]|² in isometric
/// coordinates. Residuals are the Plücker coordinates for i<j scaled by √2 (the
/// ordered sum counts each pair twice). Variables are the entries of the columns
/// `free_from..r`, column-major.
struct Plucker<'a> {
    alg: &'a LieAlgebraModel,
    n: usize,
    subsets: Vec<Vec<usize>>,
}

impl<'a> Plucker<'a> {
    fn new(alg: &'a LieAlgebraModel, r: usize) -> Self {
        let n = alg.dim();
        Self { alg, n, subsets: if r < n { combinations(n, r + 1) } else { Vec::new() } }
    }

    fn residuals(&self, y: &[Vec<f64>]) -> Vec<f64> {
        let r = y.len();
        let k = r + 1;
        let mut out = Vec::new();
        let mut b = vec![0.0; self.n];
        let mut m = vec![0.0; k * k];
        for i in 0..r {
            for j in i + 1..r {
                iso_bracket(self.alg, &y[i], &y[j], &mut b);
                for s in &self.subsets {
                    for (row, &p) in s.iter().enumerate() {
                        for c in 0..r {
                            m[row * k + c] = y[c][p];
                        }
                        m[row * k + r] = b[p];
                    }
                    out.push(std::f64::consts::SQRT_2 * det_small(&mut m, k));
                }
            }
        }
        out
    }

    fn objective(&self, y: &[Vec<f64>]) -> f64 {
        self.residuals(y).iter().map(|x| x * x).sum()
    }

    /// Jacobian rows per residual, columns per variable (free columns only).
    fn jacobian(&self, y: &[Vec<f64>], free_from: usize) -> DMatrix<f64> {
        let r = y.len();
        let k = r + 1;
        let n = self.n;
        let nvar = (r - free_from) * n;
        let nres = r * (r.saturating_sub(1)) / 2 * self.subsets.len();
        let mut jac = DMatrix::zeros(nres, nvar);
        let mut b = vec![0.0; n];
        let mut m = vec![0.0; k * k];
        let mut tmp = vec![0.0; n];
        // cof[row][col] = ∂det/∂M[row][col]
        let mut cof = vec![0.0; k * k];
        let mut row_idx = 0;
        let unit = |p: usize| {
            let mut e = vec![0.0; n];
            e[p] = 1.0;
            e
        };
        // db/dY_c[p] for the pair (i,j), cached per pair.
        for i in 0..r {
            for j in i + 1..r {
                iso_bracket(self.alg, &y[i], &y[j], &mut b);
                let mut db: Vec<Vec<f64>> = vec![vec![0.0; n]; nvar];
                for p in 0..n {
                    if i >= free_from {
                        iso_bracket(self.alg, &unit(p), &y[j], &mut tmp);
                        db[(i - free_from) * n + p].iter_mut().zip(&tmp).for_each(|(d, t)| *d += t);
                    }
                    if j >= free_from {
                        iso_bracket(self.alg, &y[i], &unit(p), &mut tmp);
                        db[(j - free_from) * n + p].iter_mut().zip(&tmp).for_each(|(d, t)| *d += t);
                    }
                }
                for s in &self.subsets {
                    let fill = |m: &mut [f64]| {
                        for (row, &p) in s.iter().enumerate() {
                            for c in 0..r {
                                m[row * k + c] = y[c][p];
                            }
                            m[row * k + r] = b[p];
                        }
                    };
                    for rr in 0..k {
                        for cc in 0..k {
                            fill(&mut m);
                            for q in 0..k {
                                m[q * k + cc] = if q == rr { 1.0 } else { 0.0 };
                            }
                            cof[rr * k + cc] = det_small(&mut m, k);
                        }
                    }
                    for var in 0..nvar {
                        let c = free_from + var / n;
                        let p = var % n;
                        let mut g = 0.0;
                        if let Some(row) = s.iter().position(|&x| x == p) {
                            g += cof[row * k + c];
                        }
                        for (row, &q) in s.iter().enumerate() {
                            g += cof[row * k + r] * db[var][q];
                        }
                        jac[(row_idx, var)] = std::f64::consts::SQRT_2 * g;
                    }
                    row_idx += 1;
                }
            }
        }
        jac
    }
}

/// F evaluated on e-coordinate vectors (algebra-norm wedges).
pub fn frame_objective(alg: &LieAlgebraModel, x: &[GVector<f64>]) -> f64 {
    let y = to_iso(alg, x);
    Plucker::new(alg, y.len()).objective(&y)
}

/// ∇F with respect to the e-coordinates of each vector, computed as 2Jᵀr.
pub fn frame_objective_gradient(alg: &LieAlgebraModel, x: &[GVector<f64>]) -> Vec<GVector<f64>> {
    let y = to_iso(alg, x);
    let p = Plucker::new(alg, y.len());
    let n = alg.dim();
    if p.subsets.is_empty() || y.len() < 2 {
        return vec![GVector::zeros(n); y.len()];
    }
    let res = DVector::from_vec(p.residuals(&y));
    let g = p.jacobian(&y, 0).transpose() * res * 2.0;
    (0..y.len())
        .map(|c| GVector::new((0..n).map(|q| g[c * n + q] * alg.norm_scale()).collect()))
        .collect()
}

fn orthonormalize_iso(y: &mut Vec<Vec<f64>>, fixed: usize) {
    for c in fixed..y.len() {
        for _ in 0..2 {
            for d in 0..c {
                let dot: f64 = y[c].iter().zip(&y[d]).map(|(a, b)| a * b).sum();
                let (head, tail) = y.split_at_mut(c);
                tail[0].iter_mut().zip(&head[d]).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let nrm = y[c].iter().map(|a| a * a).sum::<f64>().sqrt();
        y[c].iter_mut().for_each(|a| *a /= nrm);
    }
}

/// Damped Gauss–Newton on F over orthonormal frames near `w`. With `contain`, the
/// frame is parameterized as contain's basis plus free complementary vectors.
pub fn nearest_subalgebra(
    alg: &LieAlgebraModel,
    w: &SubspaceFrame,
    contain: Option<&SubspaceFrame>,
    opts: NearestOptions,
) -> Result<NearestOutcome> {
    let initial_defect = w.closure_defect(alg);
    let (start, fixed) = match contain {
        Some(h) => {
            let mut f = SubspaceFrame::empty(alg);
            for v in h.vectors() {
                f.push_orthogonalized(v, 1e-10);
            }
            let fixed = f.dim();
            if w.max_distance_of(h) > 0.5 {
                return Err(Error::InvalidArgument("contained frame is not nearly inside W".into()));
            }
            // Complete by the directions of W farthest from contain's span.
            let mut rest: Vec<(f64, GVector<f64>)> = w.vectors().iter().map(|v| (f.distance(v), v.clone())).collect();
            rest.sort_by(|a, b| b.0.total_cmp(&a.0));
            for (_, v) in rest {
                if f.dim() == w.dim() {
                    break;
                }
                f.push_orthogonalized(&v, 1e-6);
            }
            (f, fixed)
        }
        None => (w.clone(), 0),
    };
    if start.dim() < 2 || start.dim() == alg.dim() || initial_defect <= opts.closure_tol && contain.is_none() {
        let d = start.closure_defect(alg);
        return Ok(NearestOutcome { objective: frame_objective(alg, start.vectors()), frame: start, iterations: 0, initial_defect, closure_defect: d });
    }
    let p = Plucker::new(alg, start.dim());
    let mut y = to_iso(alg, start.vectors());
    let frame_of = |y: &[Vec<f64>]| {
        let v: Vec<GVector<f64>> = y.iter().map(|c| GVector::new(c.iter().map(|x| x / alg.norm_scale()).collect())).collect();
        SubspaceFrame::orthonormalize(alg, &v, 1e-10)
    };
    let mut frame = frame_of(&y);
    let mut defect = frame.closure_defect(alg);
    let mut fval = p.objective(&y);
    let mut mu = 1e-6;
    let n = alg.dim();
    let mut it = 0;
    while defect > opts.closure_tol {
        if it >= opts.max_iter {
            return Err(Error::NonConvergence { iterations: it, defect });
        }
        it += 1;
        let res = DVector::from_vec(p.residuals(&y));
        let jac = p.jacobian(&y, fixed);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &res;
        let mut accepted = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            let scale = jtj.diagonal().max().max(1e-300);
            for d in 0..a.nrows() {
                a[(d, d)] += mu * scale;
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                mu *= 10.0;
                continue;
            };
            let mut cand = y.clone();
            for var in 0..step.len() {
                cand[fixed + var / n][var % n] += step[var];
            }
            orthonormalize_iso(&mut cand, fixed);
            let fc = p.objective(&cand);
            if fc < fval {
                y = cand;
                fval = fc;
                mu = (mu / 3.0).max(1e-15);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        frame = frame_of(&y);
        defect = frame.closure_defect(alg);
        if !accepted {
            if defect <= opts.closure_tol {
                break;
            }
            return Err(Error::NonConvergence { iterations: it, defect });
        }
    }
    Ok(NearestOutcome { frame, iterations: it, initial_defect, closure_defect: defect, objective: fval })
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub index: usize,
    pub coefficients: Vec<f64>,
    pub max_coefficient: f64,
    /// δ₁^{-k}.
    pub coefficient_bound: f64,
    /// ‖w_i − Σ c_t t‖.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorDistance {
    pub index: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropEReport {
    pub input_dim: usize,
    pub k: usize,
    pub m: usize,
    pub delta: f64,
    pub delta1: f64,
    pub output_dim: usize,
    pub closure_defect: f64,
    pub stabilize_iterations: usize,
    pub newton_iterations: usize,
    pub monomials: usize,
    pub certificates: Vec<Certificate>,
    pub generator_distances: Vec<GeneratorDistance>,
    pub history: Vec<StabilizeStep>,
    #[serde(skip)]
    pub frame: Option<SubspaceFrame>,
}

impl PropEReport {
    pub fn max_residual(&self) -> f64 {
        self.certificates.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn max_generator_distance(&self) -> f64 {
        self.generator_distances.iter().map(|g| g.distance).fold(0.0, f64::max)
    }
}

/// stabilize → nearest_subalgebra, with coefficient certificates over T^(m).
pub fn prop_e(
    alg: &LieAlgebraModel,
    t: &[GVector<f64>],
    delta: f64,
    h: Option<&SubspaceFrame>,
    cap: usize,
    opts: NearestOptions,
) -> Result<PropEReport> {
    let st = stabilize(alg, t, delta, cap)?;
    let near = nearest_subalgebra(alg, &st.space.frame, h, opts)?;
    let k = st.m;
    let bound = st.delta1.powi(-(k as i32));
    let elements = st.closure.up_to_depth(k);
    let certificates = near
        .frame
        .vectors()
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let c = st.space.coefficients_for(w);
            let mut comb = GVector::zeros(alg.dim());
            for (ct, e) in c.iter().zip(elements) {
                comb.axpy(*ct, &e.vector);
            }
            Certificate {
                index: i,
                max_coefficient: c.iter().fold(0.0f64, |m, x| m.max(x.abs())),
                coefficient_bound: bound,
                residual: alg.norm(&w.sub(&comb)),
                coefficients: c,
            }
        })
        .collect();
    let generator_distances =
        t.iter().enumerate().map(|(i, v)| GeneratorDistance { index: i, distance: near.frame.distance(v) }).collect();
    Ok(PropEReport {
        input_dim: t.len(),
        k,
        m: st.m,
        delta,
        delta1: st.delta1,
        output_dim: near.frame.dim(),
        closure_defect: near.closure_defect,
        stabilize_iterations: st.iterations,
        newton_iterations: near.iterations,
        monomials: elements.len(),
        certificates,
        generator_distances,
        history: st.history,
        frame: Some(near.frame),
    })
}

/// Block sl2 ⊂ sl3 with each of E, H, F tilted by `eps` toward a fixed transverse
/// direction, then orthonormalized. Returns generators in e-coordinates.
pub fn perturbed_block_sl2(alg: &LieAlgebraModel, eps: f64) -> Result<Vec<GVector<f64>>> {
    let idx = |s: &str| alg.basis_index(s).ok_or_else(|| Error::InvalidArgument(format!("algebra lacks basis vector {s}")));
    let n = alg.dim();
    let pairs = [("E12", "E13"), ("H1", "E23"), ("E21", "E32")];
    let mut vs = Vec::new();
    for (base, tilt) in pairs {
        let mut v = GVector::<f64>::zeros(n);
        v.coords[idx(base)?] = 1.0;
        v.coords[idx(tilt)?] = eps;
        vs.push(v);
    }
    let f = SubspaceFrame::orthonormalize(alg, &vs, 1e-14);
    Ok(f.vectors().to_vec())
}

#[cfg(test)]
mod tests;
