use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use num_traits::Zero;
use serde_json::json;

use equidist_core::dioph::{annihilates, kernel_project, singular_value_floor, ExactMatrix, KernelProjection, SingularValueReport};
use equidist_core::heights::{check_heightdisc, OrbitRecord};
use equidist_core::lattice_count::{count_report, phi0_decay_fit, spherical_phi0, unipotent};
use equidist_core::lie::builtin;
use equidist_core::linnik::{
    enumerate_levels, equidistribution_report, is_squarefree, orbit_audit, reference_masses, sweep_levels, RegionBox,
    RegionGrid,
};
use equidist_core::scalar::rational_to_f64;
use equidist_core::subalgebra::{perturbed_block_sl2, prop_e, NearestOptions};
use equidist_core::unipotent::{default_family, genericity_test, mu_integral, ModularPoint, TestFunction};
use equidist_core::{Error, GVector, LieAlgebraModel, SubspaceFrame};

use crate::config::{CountArgs, DiophArgs, FlowArgs, HeightsArgs, LinnikArgs, SubalgArgs};
use crate::output::{fmt_float, Writer};
use crate::Failure;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Parse(_) | Error::Json(_) | Error::DimensionMismatch { .. } | Error::RadiusCap { .. } | Error::EnumerationCap { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Internal(other.to_string()),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{} is malformed: {e}", path.display())))
}

fn load_algebra(spec: &str) -> Result<LieAlgebraModel, Failure> {
    let p = Path::new(spec);
    if p.extension().is_some_and(|e| e == "json") {
        if !p.exists() {
            return Err(Failure::Usage(format!("algebra file {spec} does not exist")));
        }
        Ok(LieAlgebraModel::from_json_file(p)?)
    } else {
        Ok(builtin(spec)?)
    }
}

pub fn subalg(a: &SubalgArgs, w: &mut Writer) -> Result<(), Failure> {
    let alg = load_algebra(&a.algebra)?;
    let gens: Vec<GVector<f64>> = match &a.generators {
        Some(path) => {
            let rows: Vec<Vec<f64>> = read_json(path)?;
            rows.into_iter()
                .map(|r| {
                    if r.len() == alg.dim() {
                        Ok(GVector::new(r))
                    } else {
                        Err(Failure::Usage(format!("generator has {} coordinates, algebra has dimension {}", r.len(), alg.dim())))
                    }
                })
                .collect::<Result<Vec<_>, _>>()
                // Only the span matters; the nearest-subalgebra step wants an orthonormal frame.
                .map(|raw| SubspaceFrame::orthonormalize(&alg, &raw, 1e-14).vectors().to_vec())?
        }
        None => perturbed_block_sl2(&alg, a.eps.unwrap_or(a.delta.powi(3) / 10.0))?,
    };
    if gens.is_empty() {
        return Err(Failure::Usage("no generators".into()));
    }
    let opts = NearestOptions { closure_tol: a.closure_tol, ..NearestOptions::default() };
    let rep = prop_e(&alg, &gens, a.delta, None, a.cap, opts)?;
    let frame: Vec<Vec<f64>> = rep.frame.as_ref().map(|f| f.vectors().iter().map(|v| v.coords.clone()).collect()).unwrap_or_default();
    w.json("subalg.json", &json!({ "algebra": alg.name(), "report": rep, "frame": frame }))?;
    if rep.closure_defect > a.closure_tol {
        return Err(Failure::Invariant(format!("closure_defect {:e} exceeds closure_tol {:e}", rep.closure_defect, a.closure_tol)));
    }
    if rep.max_generator_distance() > a.delta {
        return Err(Failure::Invariant(format!("generator distance {:e} exceeds delta {:e}", rep.max_generator_distance(), a.delta)));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiophFixture {
    matrix: Vec<Vec<i64>>,
    vector: Vec<f64>,
    delta: f64,
    /// Claimed bound on ‖v − v0‖; defaults to the computed one.
    #[serde(default)]
    bound: Option<f64>,
}

#[derive(Serialize)]
struct DiophCase {
    projection: KernelProjection,
    singular: SingularValueReport,
    checked_bound: f64,
}

fn dioph_case(a: &ExactMatrix, v: &[f64], delta: f64, claimed: Option<f64>) -> Result<(DiophCase, Vec<String>), Failure> {
    let p = kernel_project(a, v, delta)?;
    let s = singular_value_floor(a)?;
    let bound = claimed.unwrap_or(p.bound);
    let mut failed = Vec::new();
    if !annihilates(a, &p.v0_exact)? {
        failed.push("A·v0 = 0".to_string());
    }
    if p.distance > bound {
        failed.push(format!("‖v − v0‖ ≤ bound ({:e} > {:e})", p.distance, bound));
    }
    if !s.floor_certified {
        failed.push(format!("singular value floor (nmE²)^(−n/2) = {:e}", s.floor));
    }
    Ok((DiophCase { projection: p, singular: s, checked_bound: bound }, failed))
}

pub fn dioph(a: &DiophArgs, seed: u64, w: &mut Writer) -> Result<(), Failure> {
    let mut failures = Vec::new();
    if let Some(path) = &a.fixture {
        let fx: DiophFixture = read_json(path)?;
        let m = ExactMatrix::from_i64(&fx.matrix)?;
        let (case, failed) = dioph_case(&m, &fx.vector, fx.delta, fx.bound)?;
        w.json("dioph.json", &json!({ "fixture": path.display().to_string(), "case": case, "failed": failed }))?;
        failures.extend(failed);
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut worst_ratio = 0.0f64;
        for trial in 0..a.trials {
            let m = loop {
                let n = rng.gen_range(1..=5);
                let k = rng.gen_range(1..=5);
                let r: Vec<Vec<i64>> = (0..n).map(|_| (0..k).map(|_| rng.gen_range(-10..=10)).collect()).collect();
                let m = ExactMatrix::from_i64(&r)?;
                if !m.is_zero() {
                    break m;
                }
            };
            let kernel = m.to_qmatrix().kernel();
            let mut v = vec![0.0; m.cols()];
            for kv in &kernel {
                let c = rng.gen_range(-2.0..2.0);
                for (vi, x) in v.iter_mut().zip(kv) {
                    *vi += c * rational_to_f64(x);
                }
            }
            let noise: Vec<f64> = (0..m.cols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let nn = noise.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            for (vi, x) in v.iter_mut().zip(&noise) {
                *vi += a.delta * x / nn;
            }
            let (case, failed) = dioph_case(&m, &v, a.delta, None)?;
            worst_ratio = worst_ratio.max(case.projection.distance / case.projection.bound.max(f64::MIN_POSITIVE));
            rows.push(vec![
                trial.to_string(),
                m.rows().to_string(),
                m.cols().to_string(),
                fmt_float(case.projection.distance),
                fmt_float(case.projection.bound),
                fmt_float(case.singular.sigma_min),
                fmt_float(case.singular.floor),
            ]);
            failures.extend(failed.into_iter().map(|f| format!("trial {trial}: {f}")));
        }
        w.csv("dioph.csv", &["trial", "rows", "cols", "distance", "bound", "sigma_min", "floor"], &rows)?;
        w.json("dioph.json", &json!({ "trials": a.trials, "delta": a.delta, "worst_distance_over_bound": worst_ratio, "failed": failures }))?;
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(failures.join("; ")))
    }
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<i64>>, Failure> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| Failure::Usage(format!("bad matrix entry '{x}' in '{s}'"))))
                .collect()
        })
        .collect()
}

pub fn heights(a: &HeightsArgs, w: &mut Writer) -> Result<(), Failure> {
    let mut ys: Vec<Vec<Vec<i64>>> = a.y.iter().map(|s| parse_matrix(s)).collect::<Result<_, _>>()?;
    if let Some(path) = &a.y_file {
        let more: Vec<Vec<Vec<i64>>> = read_json(path)?;
        ys.extend(more);
    }
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for y in &ys {
        let r = y.len();
        if r < 2 || y.iter().any(|row| row.len() != r) {
            return Err(Failure::Usage(format!("matrix {y:?} is not square of size ≥ 2")));
        }
        let rec = OrbitRecord::from_i64(y)?;
        let spr = rec.square_part.pow(r as u32);
        if !(&rec.level % &spr).is_zero() {
            failures.push(format!("square part^r does not divide det for {y:?}"));
        }
        records.push(rec);
    }
    let band = if records.len() >= 2 { Some(check_heightdisc(&records)?) } else { None };
    let json_records: Vec<_> = records.iter().map(|r| json!({ "record": r.to_json(), "ratio": r.ratio() })).collect();
    w.json("heights.json", &json!({ "records": json_records, "height_disc": band }))?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(failures.join("; ")))
    }
}

pub fn count(a: &CountArgs, gnuplot: bool, w: &mut Writer) -> Result<(), Failure> {
    let mut radii = a.radii.clone();
    radii.sort_unstable();
    radii.dedup();
    let rep = count_report(&radii, a.points)?;
    let fit = if a.decay_max >= 2 { Some(phi0_decay_fit(1, a.decay_max, a.eps)?) } else { None };
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|r| vec![r.radius.to_string(), r.count.to_string(), fmt_float(r.volume), fmt_float(r.ratio), fmt_float(r.phi0_avg)])
        .collect();
    w.csv("count.csv", &["radius", "count", "volume", "ratio", "phi0_avg"], &rows)?;
    if a.decay_max >= 2 {
        let decay: Vec<Vec<String>> = (1..=a.decay_max)
            .map(|t| Ok(vec![t.to_string(), fmt_float(spherical_phi0(&unipotent(f64::from(t)))?)]))
            .collect::<Result<_, Failure>>()?;
        w.csv("decay.csv", &["t", "phi0"], &decay)?;
    }
    w.json("count.json", &json!({ "counting": rep, "decay": fit }))?;
    if gnuplot {
        w.text(
            "count.gp",
            "set datafile separator ','\nset logscale xy\nset key left\nplot 'count.csv' using 1:2 skip 2 with linespoints title 'count', \\\n     'count.csv' using 1:3 skip 2 with lines title 'volume'\npause -1\nplot 'decay.csv' using 1:2 skip 2 with lines title 'phi0(u(t))'\npause -1\n",
        )?;
    }
    if rep.rows.windows(2).any(|p| p[0].count > p[1].count) {
        return Err(Failure::Invariant("lattice point count is not monotone in the radius".into()));
    }
    Ok(())
}

fn parse_family(spec: &str) -> Result<Vec<TestFunction>, Failure> {
    if spec.trim() == "default" {
        return Ok(default_family());
    }
    spec.split(';')
        .map(|item| {
            let (kind, args) = item.split_once(':').ok_or_else(|| Failure::Usage(format!("test function '{item}' is not kind:args")))?;
            let nums: Vec<f64> = args
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("bad number '{x}' in '{item}'"))))
                .collect::<Result<_, _>>()?;
            match (kind.trim(), nums.as_slice()) {
                ("height", [c, wd]) => Ok(TestFunction::height_bump(*c, *wd)?),
                ("bump", [x, y, t, r]) => Ok(TestFunction::coordinate_bump(*x, *y, *t, *r)?),
                ("const", [v]) => Ok(TestFunction::constant(*v)),
                _ => Err(Failure::Usage(format!("unknown test function '{item}'"))),
            }
        })
        .collect()
}

pub fn flow(a: &FlowArgs, seed: u64, gnuplot: bool, w: &mut Writer) -> Result<(), Failure> {
    let x = if a.x.trim() == "random" {
        ModularPoint::random(&mut ChaCha8Rng::seed_from_u64(seed))
    } else {
        let c: Vec<f64> = a
            .x
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("bad coordinate '{s}'"))))
            .collect::<Result<_, _>>()?;
        match c.as_slice() {
            [x, y, t] => ModularPoint::from_coordinates(*x, *y, *t)?,
            _ => return Err(Failure::Usage("--x needs 'random' or 'x,y,theta'".into())),
        }
    };
    let family = parse_family(&a.f)?;
    let mus: Vec<f64> = family.iter().map(|f| mu_integral(f, a.mu_samples)).collect();
    let rep = genericity_test(&x, &family, &mus, a.t0, a.t1, a.m)?;
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|r| vec![r.n.to_string(), r.function.to_string(), fmt_float(r.abs), fmt_float(r.normalized)])
        .collect();
    w.csv("flow.csv", &["n", "function", "abs_discrepancy", "normalized"], &rows)?;
    w.json("flow.json", &rep)?;
    if gnuplot {
        w.text(
            "flow.gp",
            "set datafile separator ','\nset logscale y\nplot for [k=0:9] 'flow.csv' using ($2==k ? $1 : 1/0):3 skip 2 with linespoints title sprintf('f%d', k)\npause -1\n",
        )?;
    }
    Ok(())
}

fn parse_levels(spec: &str, all_levels: bool) -> Result<Vec<i64>, Failure> {
    let text;
    let spec = if Path::new(spec).is_file() {
        text = std::fs::read_to_string(spec).map_err(|e| Failure::Usage(format!("cannot read {spec}: {e}")))?;
        text.as_str()
    } else {
        spec
    };
    let bad = |s: &str| Failure::Usage(format!("bad level '{s}'"));
    let mut out = Vec::new();
    if let Some((lo, hi)) = spec.trim().split_once("..") {
        let (lo, hi): (i64, i64) = (lo.trim().parse().map_err(|_| bad(lo))?, hi.trim().parse().map_err(|_| bad(hi))?);
        out.extend((lo..=hi).filter(|&d| d != 0 && (all_levels || is_squarefree(d.unsigned_abs()))));
    } else {
        for tok in spec.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            out.push(tok.parse::<i64>().map_err(|_| bad(tok))?);
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() || out.contains(&0) {
        return Err(Failure::Usage("level list is empty or contains 0".into()));
    }
    Ok(out)
}

pub fn linnik(a: &LinnikArgs, gnuplot: bool, w: &mut Writer) -> Result<(), Failure> {
    let levels = parse_levels(&a.d_list, a.all_levels)?;
    let region = RegionBox::parse(&a.region)?;
    let grid = reference_masses(&RegionGrid::new(region, a.grid)?, a.quad_points)?;
    // Both routes give identical samples; the joint sweep wins once there are many levels.
    let samples = if levels.len() >= 8 && levels.iter().all(|&d| d > 0) {
        sweep_levels(&levels, &grid, u128::from(a.cap))?
    } else {
        enumerate_levels(&levels, &grid, u128::from(a.cap))?
    };
    let mut failures = Vec::new();
    for s in &samples {
        for p in &s.points {
            let q = p.square_part;
            if s.d % (q * q * q) != 0 {
                failures.push(format!("d = {}: square part {q} with q³ ∤ d", s.d));
            }
            if is_squarefree(s.d.unsigned_abs()) && q != 1 {
                failures.push(format!("d = {}: non-primitive point on a squarefree level", s.d));
            }
        }
        let mut counts = vec![0u64; grid.cells.len()];
        for p in &s.points {
            if let Some(c) = p.cell {
                if p.square_part.abs() <= a.max_square_part {
                    counts[c] += 1;
                }
            }
        }
        let rows: Vec<Vec<String>> = grid
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| vec![i.to_string(), counts[i].to_string(), fmt_float(c.mass)])
            .collect();
        w.csv(&format!("linnik/d_{}.csv", s.d), &["cell", "count", "ref_mass"], &rows)?;
    }
    let rep = equidistribution_report(&samples, &grid, a.max_square_part)?;
    let summary: Vec<_> = rep
        .rows
        .iter()
        .map(|r| json!({ "d": r.d, "N_d": r.n_d, "C_d": r.c_d, "distance": r.total_variation, "chi_square": r.chi_square, "log_ratio": r.log_ratio }))
        .collect();
    let mut audit = Vec::new();
    if a.audit > 0 {
        for s in &samples {
            for e in orbit_audit(s, a.audit)? {
                audit.push(json!({
                    "d": s.d,
                    "record": e.record.to_json(),
                    "line_height": e.line_height,
                }));
            }
        }
    }
    w.json(
        "linnik.json",
        &json!({
            "region": grid.region,
            "grid": a.grid,
            "total_mass": grid.total_mass,
            "levels": summary,
            "tv_slope": rep.tv_slope,
            "tv_slope_log": rep.tv_slope_log,
            "first_quartile_d": rep.first_quartile_d,
            "min_log_ratio_past_quartile": rep.min_log_ratio_past_quartile,
            "audit": audit,
        }),
    )?;
    let trend: Vec<Vec<String>> = rep.rows.iter().map(|r| vec![r.d.to_string(), r.n_d.to_string(), fmt_float(r.total_variation), fmt_float(r.c_d)]).collect();
    w.csv("linnik/summary.csv", &["d", "N_d", "tv", "C_d"], &trend)?;
    if gnuplot {
        w.text("linnik.gp", "set datafile separator ','\nset logscale x\nplot 'linnik/summary.csv' using 1:3 skip 2 with linespoints title 'total variation'\npause -1\n")?;
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(failures.join("; ")))
    }
}
