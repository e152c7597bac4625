//! Norm balls in SL₂(ℝ), lattice points of SL₂(ℤ) inside them, Haar volumes in Cartan
//! coordinates and the spherical function φ₀.
//!
//! Haar measure is normalized as dg = ½ sinh t dt dθ dφ for g = k_θ a_t k_φ with
//! a_t = diag(e^{t/2}, e^{-t/2}) and θ, φ ∈ [0, 2π). Every report records this.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub const HAAR_NORMALIZATION: &str = "dg = 1/2 sinh(t) dt dtheta dphi, g = k_theta a_t k_phi, a_t = diag(e^(t/2), e^(-t/2))";
pub const RADIUS_CAP: u64 = 500;

/// ‖g‖ = max over entries of g and g⁻¹.
pub fn group_norm(g: &DMatrix<f64>) -> Result<f64> {
    let inv = g.clone().try_inverse().ok_or_else(|| Error::Singular("group element is not invertible".into()))?;
    Ok(g.iter().chain(inv.iter()).fold(0.0f64, |m, x| m.max(x.abs())))
}

/// ‖γ‖ for γ = [a, b, c, d] in SL₂(ℤ); γ⁻¹ has the same entries up to sign.
pub fn sl2z_norm(g: &[i64; 4]) -> i64 {
    g.iter().map(|x| x.abs()).max().unwrap_or(0)
}

pub fn sl2z_inverse(g: &[i64; 4]) -> [i64; 4] {
    [g[3], -g[1], -g[2], g[0]]
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormBall {
    pub radius: f64,
}

impl NormBall {
    pub fn new(radius: f64) -> Self {
        Self { radius }
    }

    pub fn contains(&self, g: &DMatrix<f64>) -> Result<bool> {
        Ok(group_norm(g)? <= self.radius)
    }

    pub fn contains_sl2z(&self, g: &[i64; 4]) -> bool {
        sl2z_norm(g) as f64 <= self.radius
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    (e.gcd, e.x, e.y)
}

fn elements_with_first_row(a: i64, b: i64, t: i64, out: &mut Vec<[i64; 4]>) {
    let (g, x, y) = ext_gcd(a, b);
    if g != 1 {
        return;
    }
    // a·d − b·c = 1 with (c, d) = (−y, x) + k(a, b).
    let (c0, d0) = (-y, x);
    let range = |base: i64, step: i64| -> (i64, i64) {
        if step == 0 {
            if base.abs() <= t { (i64::MIN, i64::MAX) } else { (1, 0) }
        } else if step > 0 {
            (Integer::div_ceil(&(-t - base), &step), Integer::div_floor(&(t - base), &step))
        } else {
            (Integer::div_ceil(&(t - base), &step), Integer::div_floor(&(-t - base), &step))
        }
    };
    let (lc, hc) = range(c0, a);
    let (ld, hd) = range(d0, b);
    let (lo, hi) = (lc.max(ld), hc.min(hd));
    if lo > hi {
        return;
    }
    for k in lo..=hi {
        out.push([a, b, c0 + k * a, d0 + k * b]);
    }
}

/// All γ ∈ SL₂(ℤ) with ‖γ‖ ≤ t, sorted lexicographically.
pub fn enumerate_sl2z(t: u64) -> Result<Vec<[i64; 4]>> {
    if t > RADIUS_CAP {
        return Err(Error::RadiusCap { radius: t as f64, cap: RADIUS_CAP as f64 });
    }
    let ti = t as i64;
    let mut all: Vec<[i64; 4]> = (-ti..=ti)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut out = Vec::new();
            for b in -ti..=ti {
                elements_with_first_row(a, b, ti, &mut out);
            }
            out
        })
        .collect();
    all.sort_unstable();
    Ok(all)
}

pub fn count_sl2z(t: u64) -> Result<usize> {
    Ok(enumerate_sl2z(t)?.len())
}

/// Entries of k_θ diag(x, 1/x) k_φ as α x + β / x.
fn cartan_coefficients(theta: f64, phi: f64) -> [(f64, f64); 4] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [(ct * cp, -st * sp), (-ct * sp, -st * cp), (st * cp, ct * sp), (-st * sp, ct * cp)]
}

/// Intervals of x = e^{t/2} ≥ 1 on which ‖k_θ a_t k_φ‖ ≤ radius.
fn sublevel_intervals(theta: f64, phi: f64, radius: f64) -> Vec<(f64, f64)> {
    let coef = cartan_coefficients(theta, phi);
    let mut cuts = vec![1.0];
    for &(a, b) in &coef {
        for s in [1.0, -1.0] {
            // a x² − s·R·x + b = 0
            if a.abs() < 1e-300 {
                let x = b / (s * radius);
                if x > 1.0 {
                    cuts.push(x);
                }
                continue;
            }
            let disc = radius * radius - 4.0 * a * b;
            if disc < 0.0 {
                continue;
            }
            let q = -0.5 * (-s * radius + (-s * radius).signum() * disc.sqrt());
            for x in [q / a, if q != 0.0 { b / q } else { f64::NAN }] {
                if x.is_finite() && x > 1.0 {
                    cuts.push(x);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let inside = |x: f64| coef.iter().all(|&(a, b)| (a * x + b / x).abs() <= radius);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        if inside(0.5 * (w[0] + w[1])) {
            match out.last_mut() {
                Some(last) if last.1 == w[0] => last.1 = w[1],
                _ => out.push((w[0], w[1])),
            }
        }
    }
    out
}

fn cosh_from_x(x: f64) -> f64 {
    0.5 * (x * x + 1.0 / (x * x))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct VolumeEstimate {
    pub radius: f64,
    pub value: f64,
    /// |V(n) − V(n/2)| for the angular grid.
    pub error: f64,
    pub points: usize,
}

/// Quarter-period reduction: the max-entry norm is invariant under θ, φ ↦ θ, φ + π/2.
fn angular_integral<F: Fn(f64, f64) -> f64 + Sync>(n: usize, f: F) -> f64 {
    let h = FRAC_PI_2 / n as f64;
    let s: f64 = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| f(i as f64 * h, j as f64 * h)).sum::<f64>())
        .sum();
    // ½ · 16 · h² Σ
    8.0 * h * h * s
}

fn ball_volume_at(radius: f64, n: usize) -> f64 {
    angular_integral(n, |th, ph| {
        sublevel_intervals(th, ph, radius).iter().map(|&(a, b)| cosh_from_x(b) - cosh_from_x(a)).sum()
    })
}

/// Haar volume of {g ∈ SL₂(ℝ) : ‖g‖ ≤ radius}; `points` is the angular grid size per quarter period.
pub fn ball_volume(radius: f64, points: usize) -> Result<VolumeEstimate> {
    if radius < 1.0 || points < 4 {
        return Err(Error::InvalidArgument("ball_volume needs radius ≥ 1 and at least 4 points".into()));
    }
    let value = ball_volume_at(radius, points);
    let coarse = ball_volume_at(radius, points / 2);
    Ok(VolumeEstimate { radius, value, error: (value - coarse).abs(), points })
}

/// Cartan parameter t ≥ 0 of g ∈ SL₂(ℝ): ‖g‖_F² = 2 cosh t.
pub fn cartan_parameter(g: &DMatrix<f64>) -> f64 {
    let f2: f64 = g.iter().map(|x| x * x).sum();
    (0.5 * f2).max(1.0).acosh()
}

pub fn unipotent(t: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, t, 0.0, 1.0])
}

pub fn cartan_element(t: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[(t / 2.0).exp(), 0.0, 0.0, (-t / 2.0).exp()])
}

/// φ₀(g) straight from the K-integral: periodic trapezoid over θ with the A-part of the
/// Iwasawa decomposition k_θ g = n a k.
pub fn phi0_iwasawa(g: &DMatrix<f64>, points: usize) -> f64 {
    let h = 2.0 * PI / points as f64;
    (0..points)
        .map(|j| {
            let (s, c) = (j as f64 * h).sin_cos();
            // bottom row of k_θ g equals (a⁻¹) times the bottom row of k.
            let r0 = s * g[(0, 0)] + c * g[(1, 0)];
            let r1 = s * g[(0, 1)] + c * g[(1, 1)];
            1.0 / (r0 * r0 + r1 * r1).sqrt()
        })
        .sum::<f64>()
        / points as f64
}

const PHI0_TOL: f64 = 1e-13;

/// φ₀(a_t). The K-integral is rewritten with tan θ = e^{t/2} tan ψ, which spreads the
/// e^{-t}-wide peak to width e^{-t/2}, and integrated by double-exponential quadrature.
pub fn phi0_cartan(t: f64) -> Result<f64> {
    let t = t.abs();
    let r = (t / 2.0).exp();
    let f = |psi: f64| {
        let (s, c) = psi.sin_cos();
        r / ((c * c + r * r * s * s) * (r * r * c * c + s * s)).sqrt()
    };
    // Past ψ ~ 1/r the integrand behaves like 1/(r sin 2ψ); split geometrically.
    let mut cuts = vec![0.0];
    let mut w = 1.0 / r;
    while w < FRAC_PI_4 {
        cuts.push(w);
        w *= 4.0;
    }
    cuts.push(FRAC_PI_4);
    // φ₀(a_t) ≥ e^{-t/2}, so this target is relative.
    let target = PHI0_TOL / r;
    let mut total = 0.0;
    for seg in cuts.windows(2) {
        if seg[1] <= seg[0] {
            continue;
        }
        let o = quadrature::double_exponential::integrate(f, seg[0], seg[1], target);
        if !(o.error_estimate <= 1e3 * target) {
            return Err(Error::Quadrature(format!("phi0 at t = {t}: error estimate {:.3e}", o.error_estimate)));
        }
        total += o.integral;
    }
    Ok(4.0 / PI * total)
}

/// φ₀(g) via bi-K-invariance.
pub fn spherical_phi0(g: &DMatrix<f64>) -> Result<f64> {
    if g.nrows() != 2 || g.ncols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: g.nrows() });
    }
    phi0_cartan(cartan_parameter(g))
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    /// Least-squares slope of log φ₀(u(t)) against log(1+t) on the integer grid t = t_min..=t_max.
    pub exponent: f64,
    /// Same slope on a log-spaced grid of the same size.
    pub exponent_log_grid: f64,
    /// Smallest C with φ₀(u(t)) ≤ C(1+t)^{-1+ε} on the grid.
    pub constant: f64,
    pub epsilon: f64,
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Sweep of φ₀ along u(t).
pub fn phi0_decay_fit(t_min: u32, t_max: u32, epsilon: f64) -> Result<DecayFit> {
    if t_min == 0 || t_max <= t_min {
        return Err(Error::InvalidArgument("decay sweep needs 1 ≤ t_min < t_max".into()));
    }
    let ts: Vec<f64> = (t_min..=t_max).map(f64::from).collect();
    let vals = ts.iter().map(|&t| spherical_phi0(&unipotent(t))).collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = ts.iter().map(|t| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    let exponent = least_squares_slope(&xs, &ys);
    let (l0, l1) = (f64::from(t_min).ln(), f64::from(t_max).ln());
    let m = ts.len();
    let lts: Vec<f64> = (0..m).map(|i| (l0 + (l1 - l0) * i as f64 / (m - 1) as f64).exp()).collect();
    let lvals = lts.iter().map(|&t| spherical_phi0(&unipotent(t))).collect::<Result<Vec<_>>>()?;
    let exponent_log_grid = least_squares_slope(
        &lts.iter().map(|t| (1.0 + t).ln()).collect::<Vec<_>>(),
        &lvals.iter().map(|v| v.ln()).collect::<Vec<_>>(),
    );
    let constant = ts.iter().zip(&vals).map(|(t, v)| v * (1.0 + t).powf(1.0 - epsilon)).fold(0.0, f64::max);
    Ok(DecayFit { t_min: ts[0], t_max: ts[m - 1], samples: m, exponent, exponent_log_grid, constant, epsilon })
}

#[derive(Clone, Debug, Serialize)]
pub struct CountRow {
    pub radius: u64,
    pub count: usize,
    pub volume: f64,
    pub volume_error: f64,
    pub ratio: f64,
    pub phi0_avg: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub haar: &'static str,
    pub rows: Vec<CountRow>,
    /// Slope of log vol against log T.
    pub volume_exponent: f64,
    /// Slope of log count against log T.
    pub count_exponent: f64,
    /// Residual log-power after removing T^{volume_exponent}, from a fit of log vol − A log T on log log T.
    pub log_power: f64,
}

/// Radial tabulation of φ₀(a_t) and of ∫₀^t φ₀(a_s)^ρ sinh s ds.
#[derive(Clone, Debug)]
pub struct RadialTable {
    step: f64,
    phi: Vec<f64>,
    cumulative: Vec<f64>,
}

impl RadialTable {
    pub fn new(t_max: f64, step: f64, rho: f64) -> Result<Self> {
        let n = (t_max / step).ceil() as usize + 1;
        let phi = (0..n).into_par_iter().map(|i| phi0_cartan(i as f64 * step)).collect::<Result<Vec<_>>>()?;
        let mut cumulative = vec![0.0; n];
        for i in 1..n {
            // Simpson with the midpoint interpolated in log φ₀.
            let (a, b) = ((i - 1) as f64 * step, i as f64 * step);
            let m = 0.5 * (a + b);
            let pm = (0.5 * (phi[i - 1].ln() + phi[i].ln())).exp();
            let seg = step / 6.0
                * (phi[i - 1].powf(rho) * a.sinh() + 4.0 * pm.powf(rho) * m.sinh() + phi[i].powf(rho) * b.sinh());
            cumulative[i] = cumulative[i - 1] + seg;
        }
        Ok(Self { step, phi, cumulative })
    }

    pub fn t_max(&self) -> f64 {
        (self.phi.len() - 1) as f64 * self.step
    }

    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        if !(0.0..=self.t_max()).contains(&t) {
            return Err(Error::InvalidArgument(format!("t = {t} outside radial table")));
        }
        let i = ((t / self.step) as usize).min(self.phi.len() - 2);
        Ok((i, t / self.step - i as f64))
    }

    pub fn phi0(&self, t: f64) -> Result<f64> {
        let (i, f) = self.locate(t)?;
        Ok(((1.0 - f) * self.phi[i].ln() + f * self.phi[i + 1].ln()).exp())
    }

    pub fn integral_to(&self, t: f64) -> Result<f64> {
        let (i, f) = self.locate(t)?;
        Ok(self.cumulative[i] + f * (self.cumulative[i + 1] - self.cumulative[i]))
    }
}

fn x_to_t(x: f64) -> f64 {
    2.0 * x.ln()
}

/// ∫ over the ball of φ₀ (Haar measure as above).
pub fn ball_phi0_integral(radius: f64, points: usize, table: &RadialTable) -> Result<f64> {
    let t_needed = x_to_t(2.0 * radius + 2.0);
    if t_needed > table.t_max() {
        return Err(Error::InvalidArgument(format!("radial table too short for radius {radius}")));
    }
    Ok(angular_integral(points, |th, ph| {
        sublevel_intervals(th, ph, radius)
            .iter()
            .map(|&(a, b)| table.integral_to(x_to_t(b)).unwrap() - table.integral_to(x_to_t(a)).unwrap())
            .sum()
    }))
}

pub fn count_report(radii: &[u64], points: usize) -> Result<CountReport> {
    if radii.len() < 2 {
        return Err(Error::InvalidArgument("count report needs at least two radii".into()));
    }
    let t_max = x_to_t(2.0 * *radii.iter().max().unwrap() as f64 + 2.0) + 0.5;
    let table = RadialTable::new(t_max, 0.01, 1.0)?;
    let mut rows = Vec::new();
    for &r in radii {
        let count = count_sl2z(r)?;
        let v = ball_volume(r as f64, points)?;
        let i = ball_phi0_integral(r as f64, points, &table)?;
        rows.push(CountRow { radius: r, count, volume: v.value, volume_error: v.error, ratio: count as f64 / v.value, phi0_avg: i / v.value });
    }
    let lt: Vec<f64> = rows.iter().map(|r| (r.radius as f64).ln()).collect();
    let lv: Vec<f64> = rows.iter().map(|r| r.volume.ln()).collect();
    let lc: Vec<f64> = rows.iter().map(|r| (r.count as f64).ln()).collect();
    let volume_exponent = least_squares_slope(&lt, &lv);
    let log_power = if lt.iter().all(|&x| x > 0.0) {
        let llt: Vec<f64> = lt.iter().map(|x| x.ln()).collect();
        let resid: Vec<f64> = lv.iter().zip(&lt).map(|(v, t)| v - 2.0 * t).collect();
        least_squares_slope(&llt, &resid)
    } else {
        f64::NAN
    };
    Ok(CountReport { haar: HAAR_NORMALIZATION, rows, volume_exponent, count_exponent: least_squares_slope(&lt, &lc), log_power })
}

/// vol(Γ\G) measured from the counting limit vol(B(T)) / |Γ ∩ B(T)|.
pub fn quotient_volume(radius: u64, points: usize) -> Result<f64> {
    Ok(ball_volume(radius as f64, points)?.value / count_sl2z(radius)? as f64)
}

/// Haar-distributed sample of the ball.
fn sample_ball(radius: f64, n: usize, rng: &mut ChaCha8Rng) -> Vec<(DMatrix<f64>, f64)> {
    (0..n)
        .map(|_| {
            let th = rng.gen_range(0.0..2.0 * PI);
            let ph = rng.gen_range(0.0..2.0 * PI);
            let iv = sublevel_intervals(th, ph, radius);
            let masses: Vec<f64> = iv.iter().map(|&(a, b)| cosh_from_x(b) - cosh_from_x(a)).collect();
            let total: f64 = masses.iter().sum();
            let mut u = rng.gen_range(0.0..total.max(f64::MIN_POSITIVE));
            let mut t = 0.0;
            for (&(a, _), &m) in iv.iter().zip(&masses) {
                if u <= m {
                    t = (cosh_from_x(a) + u).acosh();
                    break;
                }
                u -= m;
            }
            let k = |a: f64| {
                let (s, c) = a.sin_cos();
                DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
            };
            (k(th) * cartan_element(t) * k(ph), total)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Sl32Report {
    pub haar: &'static str,
    pub radius: u64,
    /// Radius of the thickened ball B̃ = B(e·T).
    pub thick_radius: u64,
    pub count_ball: usize,
    pub count_thick: usize,
    pub vol_ball: f64,
    pub vol_thick: f64,
    pub vol_quotient: f64,
    pub rho: f64,
    /// ∫_{B̃} φ₀^ρ.
    pub spherical_integral: f64,
    /// vol(B̃)⁻² ∫∫ φ₀(s s'⁻¹)^ρ, Monte Carlo.
    pub double_average: f64,
    /// vol(B̃)⁻² ∫∫ φ₀(s s'⁻¹)^{1/2}, Monte Carlo.
    pub double_average_sqrt: f64,
    pub mc_samples: usize,
    /// Smallest C ≥ 0 with |Λ ∩ B̃| ≥ vol(B)/vol(Λ\S) − C ∫_{B̃} φ₀^ρ.
    pub lower_constant: f64,
    pub lower_holds: bool,
    /// |Λ ∩ B|² divided by vol(B̃)²/vol(Λ\S) + ∫∫ φ₀(s s'⁻¹)^ρ.
    pub upper_constant: f64,
    pub upper_holds: bool,
    /// vol(B̃)^{1/3} · vol(B̃)⁻¹ ∫_{B̃} φ₀.
    pub ball_average_constant: f64,
    pub lower_bound_constant_cap: f64,
    pub upper_bound_constant_cap: f64,
}

#[derive(Clone, Debug)]
pub struct Sl32Options {
    pub points: usize,
    pub rho: f64,
    pub mc_samples: usize,
    pub seed: u64,
    pub vol_quotient: f64,
    pub lower_cap: f64,
    pub upper_cap: f64,
}

pub fn check_sl32_bounds(radius: u64, opts: &Sl32Options) -> Result<Sl32Report> {
    let thick = (std::f64::consts::E * radius as f64).floor() as u64;
    let count_ball = count_sl2z(radius)?;
    let count_thick = count_sl2z(thick)?;
    let vol_ball = ball_volume(radius as f64, opts.points)?.value;
    let vol_thick = ball_volume(thick as f64, opts.points)?.value;
    // s s'⁻¹ has norm at most 2‖s‖‖s'‖.
    let t_max = x_to_t(2.0 * (2.0 * (thick * thick) as f64) + 2.0) + 0.5;
    let table = RadialTable::new(t_max, 0.01, 1.0)?;
    let rho_table = RadialTable::new(x_to_t(2.0 * thick as f64 + 2.0) + 0.5, 0.01, opts.rho)?;
    let spherical_integral = ball_phi0_integral(thick as f64, opts.points, &rho_table)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let s1 = sample_ball(thick as f64, opts.mc_samples, &mut rng);
    let s2 = sample_ball(thick as f64, opts.mc_samples, &mut rng);
    let (mut wsum, mut acc, mut acc_sqrt) = (0.0, 0.0, 0.0);
    for ((a, wa), (b, wb)) in s1.iter().zip(&s2) {
        let binv = b.clone().try_inverse().expect("SL2 element");
        let p = table.phi0(cartan_parameter(&(a * binv)))?;
        let w = wa * wb;
        wsum += w;
        acc += w * p.powf(opts.rho);
        acc_sqrt += w * p.sqrt();
    }
    let double_average = acc / wsum;
    let double_average_sqrt = acc_sqrt / wsum;
    let main = vol_ball / opts.vol_quotient;
    let lower_constant = ((main - count_thick as f64) / spherical_integral).max(0.0);
    let upper_rhs = vol_thick * vol_thick / opts.vol_quotient + double_average * vol_thick * vol_thick;
    let upper_constant = (count_ball as f64).powi(2) / upper_rhs;
    let phi_int = ball_phi0_integral(thick as f64, opts.points, &table)?;
    Ok(Sl32Report {
        haar: HAAR_NORMALIZATION,
        radius,
        thick_radius: thick,
        count_ball,
        count_thick,
        vol_ball,
        vol_thick,
        vol_quotient: opts.vol_quotient,
        rho: opts.rho,
        spherical_integral,
        double_average,
        double_average_sqrt,
        mc_samples: opts.mc_samples,
        lower_constant,
        lower_holds: lower_constant <= opts.lower_cap,
        upper_constant,
        upper_holds: upper_constant <= opts.upper_cap,
        ball_average_constant: phi_int / vol_thick * vol_thick.cbrt(),
        lower_bound_constant_cap: opts.lower_cap,
        upper_bound_constant_cap: opts.upper_cap,
    })
}
