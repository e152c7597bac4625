//! Horocycle flow on SL₂(ℤ)\SL₂(ℝ): reduced points, test functions, discrepancy of orbit
//! averages, genericity windows, escape of mass and polynomial divergence of nearby orbits.
//!
//! A point Γg is stored through the lattice ℤ²g spanned by the rows of g. Its Gauss-reduced
//! basis (b₁, b₂) gives fundamental-domain coordinates τ = x + iy with y = 1/|b₁|²,
//! x = b₁·b₂/|b₁|² and the angle θ ∈ [0, π) of b₁. Haar probability measure is
//! (3/π²) dx dy/y² dθ on F × [0, π).

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heights::height_of_point;
use crate::lattice_count::least_squares_slope;
use crate::lie::{GVector, LieAlgebraModel, SubspaceFrame};
use crate::scalar::{Rational, Scalar};

pub const DEFAULT_M: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModularPoint {
    /// Rows b₁, b₂ of the reduced representative, det = 1.
    rep: [[f64; 2]; 2],
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn gauss_reduce(mut b1: [f64; 2], mut b2: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    for _ in 0..10_000 {
        let n1 = dot2(b1, b1);
        let mu = (dot2(b1, b2) / n1).round();
        if mu != 0.0 {
            b2 = [b2[0] - mu * b1[0], b2[1] - mu * b1[1]];
        }
        if dot2(b2, b2) < n1 {
            // (b₁, b₂) ↦ (b₂, −b₁) keeps the orientation.
            let t = b1;
            b1 = b2;
            b2 = [-t[0], -t[1]];
        } else {
            break;
        }
    }
    // ±(b₁, b₂) is the same point; put b₁ in the half-plane θ ∈ [0, π).
    if b1[1] < 0.0 || (b1[1] == 0.0 && b1[0] < 0.0) {
        b1 = [-b1[0], -b1[1]];
        b2 = [-b2[0], -b2[1]];
    }
    (b1, b2)
}

impl ModularPoint {
    pub fn new(g: &DMatrix<f64>) -> Result<Self> {
        if g.nrows() != 2 || g.ncols() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: g.nrows() });
        }
        let det = g.determinant();
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("representative has determinant {det}")));
        }
        Ok(Self::from_rows([g[(0, 0)], g[(0, 1)]], [g[(1, 0)], g[(1, 1)]]))
    }

    fn from_rows(b1: [f64; 2], b2: [f64; 2]) -> Self {
        let (b1, b2) = gauss_reduce(b1, b2);
        Self { rep: [b1, b2] }
    }

    /// Point with fundamental-domain coordinates (x, y, θ).
    pub fn from_coordinates(x: f64, y: f64, theta: f64) -> Result<Self> {
        if y <= 0.0 {
            return Err(Error::InvalidArgument("y must be positive".into()));
        }
        let s = 1.0 / y.sqrt();
        let (st, ct) = theta.sin_cos();
        let b1 = [s * ct, s * st];
        // b₂ = τ·b₁ as complex numbers.
        let b2 = [x * b1[0] - y * b1[1], x * b1[1] + y * b1[0]];
        Ok(Self::from_rows(b1, b2))
    }

    pub fn identity() -> Self {
        Self::from_rows([1.0, 0.0], [0.0, 1.0])
    }

    /// Haar-distributed point.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        loop {
            let x: f64 = rng.gen_range(-0.5..0.5);
            let y0 = (1.0 - x * x).sqrt();
            // The y-mass over x is 1/y₀(x) ≤ 2/√3.
            if rng.gen::<f64>() * 2.0 / 3f64.sqrt() > 1.0 / y0 {
                continue;
            }
            let u: f64 = 1.0 - rng.gen::<f64>();
            let theta = rng.gen_range(0.0..PI);
            return Self::from_coordinates(x, y0 / u, theta).expect("positive y");
        }
    }

    pub fn rep(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[self.rep[0][0], self.rep[0][1], self.rep[1][0], self.rep[1][1]])
    }

    /// (x, y, θ).
    pub fn coordinates(&self) -> (f64, f64, f64) {
        let [b1, b2] = self.rep;
        let n1 = dot2(b1, b1);
        let theta = b1[1].atan2(b1[0]).rem_euclid(PI);
        (dot2(b1, b2) / n1, 1.0 / n1, theta)
    }

    /// y = Im τ = 1/λ₁(ℤ²g)².
    pub fn cusp_height(&self) -> f64 {
        1.0 / dot2(self.rep[0], self.rep[0])
    }

    /// ht(x) in the calibrated norm of `alg` (sl₂).
    pub fn height(&self, alg: &LieAlgebraModel) -> Result<f64> {
        height_of_point(alg, &self.rep())
    }

    /// x·u(t), reduced.
    pub fn flow(&self, t: f64) -> Self {
        let [b1, b2] = self.rep;
        Self::from_rows([b1[0], t * b1[0] + b1[1]], [b2[0], t * b2[0] + b2[1]])
    }

    /// x·g, reduced.
    pub fn act(&self, g: &DMatrix<f64>) -> Self {
        let [b1, b2] = self.rep;
        let m = |b: [f64; 2]| [b[0] * g[(0, 0)] + b[1] * g[(1, 0)], b[0] * g[(0, 1)] + b[1] * g[(1, 1)]];
        Self::from_rows(m(b1), m(b2))
    }

    /// Coset-invariant summary used to compare representatives.
    pub fn fingerprint(&self) -> [f64; 3] {
        let (x, y, t) = self.coordinates();
        [x, y, t]
    }
}

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunctionKind {
    /// ψ(log(y/center)/width).
    HeightBump { center: f64, width: f64 },
    /// ψ(d(τ, τ_c)/radius)·(1 + cos 2(θ − θ_c))/2, support inside the interior of F.
    CoordinateBump { x: f64, y: f64, theta: f64, radius: f64 },
    Constant { value: f64 },
    /// Indicator of y > level (not compactly supported; used for cusp mass).
    CuspIndicator { level: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct TestFunction {
    pub kind: TestFunctionKind,
    pub sobolev_surrogate: f64,
}

const SOBOLEV_STEP: f64 = 1e-4;
const SOBOLEV_WEIGHT_POWER: i32 = 2;

impl TestFunction {
    pub fn new(kind: TestFunctionKind) -> Result<Self> {
        match kind {
            TestFunctionKind::HeightBump { center, width } if center <= 0.0 || width <= 0.0 => {
                return Err(Error::InvalidArgument("height bump needs positive center and width".into()))
            }
            TestFunctionKind::CoordinateBump { x, y, radius, .. } => {
                if y <= 0.0 || radius <= 0.0 {
                    return Err(Error::InvalidArgument("coordinate bump needs positive y and radius".into()));
                }
                // Hyperbolic disc = Euclidean disc with center (x, y cosh r), radius y sinh r.
                let (cy, rr) = (y * radius.cosh(), y * radius.sinh());
                if x.abs() + rr >= 0.5 || (x * x + cy * cy).sqrt() - rr <= 1.0 {
                    return Err(Error::InvalidArgument("coordinate bump support leaves the fundamental domain".into()));
                }
            }
            TestFunctionKind::CuspIndicator { level } if level < 1.0 => {
                return Err(Error::InvalidArgument("cusp level must be ≥ 1".into()))
            }
            _ => {}
        }
        let mut f = Self { kind, sobolev_surrogate: 0.0 };
        f.sobolev_surrogate = f.compute_surrogate();
        Ok(f)
    }

    pub fn height_bump(center: f64, width: f64) -> Result<Self> {
        Self::new(TestFunctionKind::HeightBump { center, width })
    }

    pub fn coordinate_bump(x: f64, y: f64, theta: f64, radius: f64) -> Result<Self> {
        Self::new(TestFunctionKind::CoordinateBump { x, y, theta, radius })
    }

    pub fn constant(value: f64) -> Self {
        Self::new(TestFunctionKind::Constant { value }).expect("constant")
    }

    pub fn eval_coordinates(&self, x: f64, y: f64, theta: f64) -> f64 {
        match self.kind {
            TestFunctionKind::HeightBump { center, width } => bump((y / center).ln() / width),
            TestFunctionKind::CoordinateBump { x: xc, y: yc, theta: tc, radius } => {
                let d2 = (x - xc).powi(2) + (y - yc).powi(2);
                let d = (1.0 + d2 / (2.0 * y * yc)).acosh();
                bump(d / radius) * 0.5 * (1.0 + (2.0 * (theta - tc)).cos())
            }
            TestFunctionKind::Constant { value } => value,
            TestFunctionKind::CuspIndicator { level } => f64::from(u8::from(y > level)),
        }
    }

    pub fn eval(&self, p: &ModularPoint) -> f64 {
        let (x, y, t) = p.coordinates();
        self.eval_coordinates(x, y, t)
    }

    /// Box in (x, y, θ) containing the support.
    fn support_box(&self) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let full_theta = [0.0, PI];
        match self.kind {
            TestFunctionKind::HeightBump { center, width } => {
                ([-0.5, 0.5], [(center * (-width).exp()).max(0.5), center * width.exp()], full_theta)
            }
            TestFunctionKind::CoordinateBump { x, y, radius, .. } => {
                let (cy, rr) = (y * radius.cosh(), y * radius.sinh());
                ([x - rr, x + rr], [cy - rr, cy + rr], full_theta)
            }
            TestFunctionKind::Constant { .. } => ([-0.5, 0.5], [0.5, 4.0], full_theta),
            TestFunctionKind::CuspIndicator { level } => ([-0.5, 0.5], [level, 4.0 * level], full_theta),
        }
    }

    /// sup over a grid of the support of max(1, y)² · (|f| + Σ|D_X f| + Σ|D²_X f|), X ∈ {E, H, F}.
    fn compute_surrogate(&self) -> f64 {
        if let TestFunctionKind::Constant { value } = self.kind {
            return value.abs();
        }
        let (bx, by, bt) = self.support_box();
        let n = 20;
        let h = SOBOLEV_STEP;
        let dirs = [
            [[1.0, h], [0.0, 1.0]],
            [[(h / 2.0).exp(), 0.0], [0.0, (-h / 2.0).exp()]],
            [[1.0, 0.0], [h, 1.0]],
        ];
        let dirs_inv = [
            [[1.0, -h], [0.0, 1.0]],
            [[(-h / 2.0).exp(), 0.0], [0.0, (h / 2.0).exp()]],
            [[1.0, 0.0], [-h, 1.0]],
        ];
        let to_m = |a: [[f64; 2]; 2]| DMatrix::from_row_slice(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]]);
        let mut best: f64 = 0.0;
        for i in 0..=n {
            let x = bx[0] + (bx[1] - bx[0]) * i as f64 / n as f64;
            for j in 0..=n {
                let y = by[0] * (by[1] / by[0]).powf(j as f64 / n as f64);
                for k in 0..8 {
                    let th = bt[0] + (bt[1] - bt[0]) * k as f64 / 8.0;
                    let Ok(p) = ModularPoint::from_coordinates(x, y, th) else { continue };
                    let f0 = self.eval(&p);
                    let mut s = f0.abs();
                    for (d, di) in dirs.iter().zip(&dirs_inv) {
                        let fp = self.eval(&p.act(&to_m(*d)));
                        let fm = self.eval(&p.act(&to_m(*di)));
                        s += ((fp - fm) / (2.0 * h)).abs() + ((fp - 2.0 * f0 + fm) / (h * h)).abs();
                    }
                    best = best.max(p.cusp_height().max(1.0).powi(SOBOLEV_WEIGHT_POWER) * s);
                }
            }
        }
        best
    }
}

/// Three-function family used by the genericity experiments.
pub fn default_family() -> Vec<TestFunction> {
    vec![
        TestFunction::height_bump(2.0, 0.5).expect("valid"),
        TestFunction::coordinate_bump(0.0, 1.6, 0.0, 0.3).expect("valid"),
        TestFunction::coordinate_bump(0.1, 2.5, PI / 3.0, 0.12).expect("valid"),
    ]
}

/// ∫ f dμ for the Haar probability measure: midpoint rule in x and s = 1/y, trapezoid in θ.
pub fn mu_integral(f: &TestFunction, samples: usize) -> f64 {
    if let TestFunctionKind::Constant { value } = f.kind {
        return value;
    }
    let n = samples.max(2);
    let nt = 8;
    let hx = 1.0 / n as f64;
    let total: f64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = -0.5 + (i as f64 + 0.5) * hx;
            let smax = 1.0 / (1.0 - x * x).sqrt();
            let hs = smax / n as f64;
            let mut acc = 0.0;
            for j in 0..n {
                let y = 1.0 / ((j as f64 + 0.5) * hs);
                for k in 0..nt {
                    acc += f.eval_coordinates(x, y, PI * k as f64 / nt as f64);
                }
            }
            acc * hs * hx * PI / nt as f64
        })
        .sum();
    3.0 / (PI * PI) * total
}

const PANEL: f64 = 1.0;
const PANEL_TOL: f64 = 1e-7;
const MAX_SPLIT_DEPTH: u32 = 24;
const GL_ORDER: usize = 8;

struct PanelRule {
    pairs: Vec<(f64, f64)>,
}

impl PanelRule {
    fn new() -> Self {
        let gl = GaussLegendre::new(NonZeroUsize::new(GL_ORDER).expect("positive order"));
        Self { pairs: gl.as_node_weight_pairs().to_vec() }
    }

    /// Gauss–Legendre sums over [a, b] ⊂ [0, len] of every family member along the orbit from `start`.
    fn apply(&self, start: &ModularPoint, family: &[TestFunction], a: f64, b: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for &(x, w) in &self.pairs {
            let p = start.flow(c + h * x);
            let (px, py, pt) = p.coordinates();
            for (f, o) in family.iter().zip(out.iter_mut()) {
                *o += w * h * f.eval_coordinates(px, py, pt);
            }
        }
    }

    /// Bisects until the whole-interval rule and the two half-interval rules agree to tol·length.
    fn adaptive(&self, start: &ModularPoint, family: &[TestFunction], a: f64, b: f64, whole: &[f64], depth: u32, acc: &mut [f64]) -> Result<()> {
        let m = 0.5 * (a + b);
        let mut left = vec![0.0; family.len()];
        let mut right = vec![0.0; family.len()];
        self.apply(start, family, a, m, &mut left);
        self.apply(start, family, m, b, &mut right);
        let err = whole.iter().zip(left.iter().zip(&right)).map(|(w, (l, r))| (w - l - r).abs()).fold(0.0, f64::max);
        if err <= PANEL_TOL * (b - a) {
            for (o, (l, r)) in acc.iter_mut().zip(left.iter().zip(&right)) {
                *o += l + r;
            }
            return Ok(());
        }
        if depth >= MAX_SPLIT_DEPTH {
            return Err(Error::Quadrature(format!("orbit panel [{a}, {b}]: disagreement {err:.3e}")));
        }
        self.adaptive(start, family, a, m, &left, depth + 1, acc)?;
        self.adaptive(start, family, m, b, &right, depth + 1, acc)
    }
}

/// (1/|I|) ∫_I f(x u(t)) dt for I = [a, b] and every f in the family: adaptive Gauss–Legendre
/// on unit panels, restarting the orbit from a reduced point at each panel.
pub fn orbit_averages(x: &ModularPoint, family: &[TestFunction], a: f64, b: f64) -> Result<Vec<f64>> {
    if b <= a {
        return Err(Error::InvalidArgument("empty orbit segment".into()));
    }
    let rule = PanelRule::new();
    let panels = ((b - a) / PANEL).ceil() as usize;
    let mut sums = vec![0.0; family.len()];
    let mut whole = vec![0.0; family.len()];
    let mut start = x.flow(a);
    let mut t0 = a;
    for _ in 0..panels {
        let t1 = (t0 + PANEL).min(b);
        rule.apply(&start, family, 0.0, t1 - t0, &mut whole);
        rule.adaptive(&start, family, 0.0, t1 - t0, &whole, 0, &mut sums)?;
        start = start.flow(t1 - t0);
        t0 = t1;
    }
    Ok(sums.into_iter().map(|s| s / (b - a)).collect())
}

/// D_n(f)(x) with the block [n^M, (n+1)^M].
pub fn discrepancy(x: &ModularPoint, f: &TestFunction, n: u32, m: u32, mu_ref: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be ≥ 1".into()));
    }
    let (a, b) = (f64::from(n).powi(m as i32), f64::from(n + 1).powi(m as i32));
    Ok(orbit_averages(x, std::slice::from_ref(f), a, b)?[0] - mu_ref)
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyRow {
    pub n: u32,
    pub function: usize,
    pub discrepancy: f64,
    pub abs: f64,
    /// n·|D_n(f)| / 𝒮(f).
    pub normalized: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    pub point: [f64; 3],
    pub m: u32,
    pub t0: u32,
    pub t1: u32,
    pub surrogates: Vec<f64>,
    pub mu_refs: Vec<f64>,
    pub rows: Vec<DiscrepancyRow>,
    pub generic: bool,
    /// Worst (n, function index, normalized value).
    pub worst: Option<(u32, usize, f64)>,
    /// Least-squares slope of the family-mean |D_n| against n.
    pub slope: f64,
}

/// Checks |D_n(f)(x)| ≤ n⁻¹ 𝒮(f) for all n ∈ [t0, t1] and all f in the family.
pub fn genericity_test(
    x: &ModularPoint,
    family: &[TestFunction],
    mu_refs: &[f64],
    t0: u32,
    t1: u32,
    m: u32,
) -> Result<DiscrepancyReport> {
    if family.len() != mu_refs.len() {
        return Err(Error::DimensionMismatch { expected: family.len(), got: mu_refs.len() });
    }
    let mut rows = Vec::new();
    let mut worst: Option<(u32, usize, f64)> = None;
    let mut generic = true;
    let mut ns = Vec::new();
    let mut means = Vec::new();
    if t0 >= 1 {
        for n in t0..=t1 {
            let (a, b) = (f64::from(n).powi(m as i32), f64::from(n + 1).powi(m as i32));
            let avg = orbit_averages(x, family, a, b)?;
            let mut mean = 0.0;
            for (i, (f, (av, mu))) in family.iter().zip(avg.iter().zip(mu_refs)).enumerate() {
                let d = av - mu;
                let normalized = f64::from(n) * d.abs() / f.sobolev_surrogate;
                if normalized > 1.0 {
                    generic = false;
                }
                if worst.map_or(true, |w| normalized > w.2) {
                    worst = Some((n, i, normalized));
                }
                mean += d.abs() / family.len() as f64;
                rows.push(DiscrepancyRow { n, function: i, discrepancy: d, abs: d.abs(), normalized });
            }
            ns.push(f64::from(n));
            means.push(mean);
        }
    }
    let slope = if ns.len() >= 2 { least_squares_slope(&ns, &means) } else { 0.0 };
    Ok(DiscrepancyReport {
        point: x.fingerprint(),
        m,
        t0,
        t1,
        surrogates: family.iter().map(|f| f.sobolev_surrogate).collect(),
        mu_refs: mu_refs.to_vec(),
        rows,
        generic,
        worst,
        slope,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EscapeReport {
    pub radii: Vec<f64>,
    pub fractions: Vec<f64>,
    pub samples: usize,
    /// Slope of log μ(ht > R) against log R.
    pub slope: f64,
}

/// Monte Carlo tail μ(ht > R) of the calibrated height over Haar-random points.
pub fn escape_of_mass(alg: &LieAlgebraModel, radii: &[f64], samples: usize, seed: u64) -> Result<EscapeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<ModularPoint> = (0..samples).map(|_| ModularPoint::random(&mut rng)).collect();
    let hts = pts.par_iter().map(|p| p.height(alg)).collect::<Result<Vec<f64>>>()?;
    let fractions: Vec<f64> =
        radii.iter().map(|&r| hts.iter().filter(|&&h| h > r).count() as f64 / samples as f64).collect();
    if fractions.iter().any(|&f| f == 0.0) {
        return Err(Error::InvalidArgument("tail is empty at the largest radius; raise the sample count".into()));
    }
    let slope = least_squares_slope(
        &radii.iter().map(|r| r.ln()).collect::<Vec<_>>(),
        &fractions.iter().map(|f| f.ln()).collect::<Vec<_>>(),
    );
    Ok(EscapeReport { radii: radii.to_vec(), fractions, samples, slope })
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i))
}

/// Coefficients p_k with Ad(u(−t))r = Σ t^k p_k, p_k = (−1)^k/k! (ad E)^k r.
pub fn divergence_polynomial<T: Scalar>(alg: &LieAlgebraModel, r: &GVector<T>) -> Result<Vec<GVector<T>>> {
    let triple = alg.sl2_triple().ok_or(Error::NoSl2Triple)?;
    let e = GVector::new(triple.e.coords.iter().map(T::from_rational).collect());
    let mut out = vec![r.clone()];
    let mut cur = r.clone();
    for k in 1..=alg.dim() {
        cur = alg.bracket(&e, &cur)?;
        if cur.is_zero() {
            break;
        }
        let sign = if k % 2 == 0 { BigInt::from(1) } else { BigInt::from(-1) };
        let c = T::from_rational(&Rational::new(sign, factorial(k)));
        out.push(cur.scale(&c));
    }
    Ok(out)
}

pub fn eval_polynomial<T: Scalar>(coeffs: &[GVector<T>], t: &T) -> GVector<T> {
    let mut acc = coeffs.last().expect("nonempty").clone();
    for c in coeffs.iter().rev().skip(1) {
        acc = acc.scale(t).add(c);
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceTime {
    pub time: f64,
    pub threshold: f64,
    pub coefficients: Vec<Vec<f64>>,
}

const DIVERGENCE_GRID: usize = 400;

fn max_on_window(alg: &LieAlgebraModel, coeffs: &[GVector<f64>], proj: Option<&SubspaceFrame>, t: f64) -> f64 {
    (0..=DIVERGENCE_GRID)
        .map(|i| {
            let s = 2.0 * i as f64 / DIVERGENCE_GRID as f64;
            let v = eval_polynomial(coeffs, &(s * t));
            match proj {
                Some(w) => w.norm(&w.project(&v)),
                None => alg.norm(&v),
            }
        })
        .fold(0.0, f64::max)
}

/// Smallest T with max_{s∈[0,2]} ‖q(sT)‖ = threshold, q projected to `complement` when given.
pub fn divergence_time(
    alg: &LieAlgebraModel,
    r: &GVector<f64>,
    threshold: f64,
    complement: Option<&SubspaceFrame>,
) -> Result<DivergenceTime> {
    let (_, r1) = alg.weight_decompose(r)?;
    if r1.euclidean_norm() <= 1e-14 * r.euclidean_norm().max(f64::MIN_POSITIVE) || r1.is_zero() {
        return Err(Error::InvalidArgument("r lies in the centralizer of E; the orbits never separate".into()));
    }
    let coeffs = divergence_polynomial(alg, r)?;
    let g = |t: f64| max_on_window(alg, &coeffs, complement, t);
    let coefficients = coeffs.iter().map(|c| c.coords.clone()).collect();
    if g(0.0) >= threshold {
        return Ok(DivergenceTime { time: 0.0, threshold, coefficients });
    }
    let mut hi = 1.0;
    let mut guard = 0;
    while g(hi) < threshold {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(Error::NonConvergence { iterations: guard, defect: g(hi) });
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid) < threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DivergenceTime { time: hi, threshold, coefficients })
}

#[cfg(test)]
mod tests;
