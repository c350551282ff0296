//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use warpgeom::monotonic::{asymptotic_check, growth_classify, trace_v2, GrowthModel};
use warpgeom::quadrature::ball_volume;
use warpgeom::regions::{rn_thresholds, ss_thresholds};
use warpgeom::submanifolds::{SubmanifoldFamily, SubmanifoldMesh};
use warpgeom::suite::{
    full_suite, geodesic_sphere_suite, monotonicity_suite, random_spec, right_cone_suite, slice_suite, SpecKind,
};
use warpgeom::verifiers::{check_hsiung_minkowski, check_theo2, Theo2Case, Tolerances, Verdict};
use warpgeom::{Family, ManifoldSpec, ProfileRange, WarpProfile};

const SEED: u64 = 20240611;
const MESH_RESOLUTION: usize = 4096;

const SLICE_EQ_TOL: f64 = 1e-6;
const SLICE_TIME: Duration = Duration::from_secs(30);
const SPHERE_EQ_TOL: f64 = 1e-6;
const CONE_TOL: f64 = 1e-6;
const ODE_TOL: f64 = 1e-9;
const ROUND_TRIP_TOL: f64 = 1e-9;
const S2_TOL: f64 = 1e-12;
const FLAT_V2_TOL: f64 = 1e-4;
const ORDER_TOL: f64 = 0.2;
const COEFFICIENT_TOL: f64 = 0.02;
const ASYMPTOTIC_TIME: Duration = Duration::from_secs(60);
const MINKOWSKI_TOL: f64 = 1e-6;
const FLAT_ORDER_TOL: f64 = 0.01;
const RATE_FRACTION: f64 = 0.9;
const RN_ORDER_TOL: f64 = 0.1;
const DISK_TOL: f64 = 1e-6;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn slice_equality() -> Outcome {
    let start = Instant::now();
    let recs = slice_suite(SEED, 20, MESH_RESOLUTION, &Tolerances::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let worst = recs.iter().map(|r| r.worst_equality_gap()).fold(0.0, f64::max);
    let mut names: Vec<&str> = recs.iter().flat_map(|r| r.reports.iter().map(|x| x.name.as_str())).collect();
    names.sort();
    names.dedup();
    let wanted = ["fundamental", "ss_i", "ss_ii", "ss_iii", "rn_i", "rn_ii"];
    let covered = wanted.iter().all(|w| names.contains(w));
    let violated = recs.iter().any(|r| r.any_violated());
    check(
        worst < SLICE_EQ_TOL && covered && !violated && elapsed < SLICE_TIME,
        format!("worst |slack|/|lhs| = {worst:.2e}, cases {names:?}, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn geodesic_spheres() -> Outcome {
    let recs = geodesic_sphere_suite(SEED + 1, 10, MESH_RESOLUTION, &Tolerances::default()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for r in &recs {
        let report = r
            .reports
            .iter()
            .find(|x| x.name == "hyperbolic" || x.name == "hemisphere")
            .ok_or_else(|| format!("no space-form report for {:?}", r.spec))?;
        worst = worst.max(report.slack.abs() / report.lhs.abs());
    }
    check(worst < SPHERE_EQ_TOL && recs.len() == 20, format!("{} spheres, worst {worst:.2e}", recs.len()))
}

fn right_cones() -> Outcome {
    let recs = right_cone_suite(SEED + 2, 10, MESH_RESOLUTION, &Tolerances::default()).map_err(|e| e.to_string())?;
    let worst = recs
        .iter()
        .map(|r| {
            let a = (r.area - r.expected_area).abs() / r.expected_area;
            let b = (r.area - r.half_boundary_quotient).abs() / r.area;
            a.max(b)
        })
        .fold(0.0, f64::max);
    check(worst < CONE_TOL, format!("worst relative gap {worst:.2e}"))
}

/// `h'²` and `h''` from the defining lapse, written out independently.
fn lapse_and_half_derivative(spec: &ManifoldSpec<f64>, s: f64) -> (f64, f64) {
    let n = spec.n as f64;
    match spec.family {
        Family::DeSitterSchwarzschild { m, c } => {
            (1.0 - m * s.powf(2.0 - n) - c * s * s, 0.5 * (n - 2.0) * m * s.powf(1.0 - n) - c * s)
        }
        Family::ReissnerNordstrom { m, q } => (
            1.0 - m * s.powf(2.0 - n) + q * q * s.powf(4.0 - 2.0 * n),
            0.5 * (n - 2.0) * m * s.powf(1.0 - n) - (n - 2.0) * q * q * s.powf(3.0 - 2.0 * n),
        ),
        _ => unreachable!(),
    }
}

fn ode_residuals() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let (mut worst_ode, mut worst_trip) = (0.0f64, 0.0f64);
    for i in 0..12 {
        let kind = [SpecKind::SsHyperbolic, SpecKind::SsFlat, SpecKind::SsSpherical, SpecKind::Rn][i % 4];
        let spec = random_spec(&mut rng, kind);
        let p = WarpProfile::with_default_range(&spec).map_err(|e| e.to_string())?;
        let len = p.r_grid().len();
        for j in 1..len - 1 {
            let (h, hp, hpp) = (p.h_values()[j], p.h_prime_values()[j], p.h_second_values()[j]);
            let (lapse, half) = lapse_and_half_derivative(&spec, h);
            worst_ode = worst_ode.max((hp * hp - lapse).abs()).max((hpp - half).abs());
        }
        for j in (1..len - 1).step_by(37) {
            let r = p.r_grid()[j];
            let back = p.radial_coordinate(p.h_values()[j]).map_err(|e| e.to_string())?;
            worst_trip = worst_trip.max((back - r).abs() / r);
        }
    }
    check(
        worst_ode < ODE_TOL && worst_trip < ROUND_TRIP_TOL,
        format!("ODE residual {worst_ode:.2e}, round trip {worst_trip:.2e}"),
    )
}

fn rn_ordering() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n: usize = rng.random_range(3..=6);
        let q: f64 = rng.random_range(0.01..2.0);
        let m = 2.0 * q * rng.random_range(1.001..10.0);
        let th = rn_thresholds(&ManifoldSpec::new(n, Family::ReissnerNordstrom { m, q })).map_err(|e| e.to_string())?;
        if !(th.s3 < th.s0 && th.s0 < th.s2) {
            return Err(format!("ordering fails at n={n} m={m} q={q}: {th:?}"));
        }
        let nf = n as f64;
        let closed = (4.0 * q * q * (nf - 1.0) / (m * nf - (m * m * nf * nf - 16.0 * q * q * (nf - 1.0)).sqrt()))
            .powf(1.0 / (nf - 2.0));
        worst = worst.max((closed - th.s2).abs() / th.s2);
    }
    check(worst < S2_TOL, format!("200 draws ordered, s2 gap {worst:.2e}"))
}

fn monotonicity() -> Outcome {
    let recs = monotonicity_suite(SEED + 5, 50, 512).map_err(|e| e.to_string())?;
    let dirty = recs.iter().filter(|r| !r.is_clean()).count();
    let flat = WarpProfile::with_default_range(&ManifoldSpec::new(4, Family::SpaceForm { c: 0.0 })).unwrap();
    let mut flat_gap = 0.0f64;
    for k in [2, 3] {
        let fam = SubmanifoldFamily::RadialCone { k, cap_angle: PI / 2.0, r_lo: 0.0, r_hi: 8.0 };
        let mesh = SubmanifoldMesh::build(&flat, &fam, 1024).unwrap();
        let grid: Vec<f64> = (1..=64).map(|i| 8.0 * i as f64 / 64.0).collect();
        let t = trace_v2(&mesh, &flat, 0.0, &grid).map_err(|e| e.to_string())?;
        let omega = ball_volume::<f64>(k);
        flat_gap = t.v_values.iter().fold(flat_gap, |a, v| a.max((v - omega).abs() / omega));
    }
    check(
        dirty == 0 && flat_gap < FLAT_V2_TOL,
        format!("{} configurations, {dirty} with violations; flat V2 gap {flat_gap:.2e}", recs.len()),
    )
}

fn asymptotics() -> Outcome {
    let start = Instant::now();
    let rn = WarpProfile::with_default_range(&ManifoldSpec::new(4, Family::ReissnerNordstrom { m: 1.0, q: 0.25 }))
        .map_err(|e| e.to_string())?;
    let rn = asymptotic_check(&rn).map_err(|e| e.to_string())?;
    let ss = WarpProfile::with_default_range(&ManifoldSpec::new(3, Family::DeSitterSchwarzschild { m: 1.0, c: -1.0 }))
        .map_err(|e| e.to_string())?;
    let ss = asymptotic_check(&ss).map_err(|e| e.to_string())?;
    let rn_order = rn.fitted_order.unwrap_or(f64::NAN);
    let ss_order = ss.fitted_order.unwrap_or(f64::NAN);
    let coef_gap = (ss.fitted_coefficient / ss.expected_coefficient - 1.0).abs();
    let elapsed = start.elapsed();
    check(
        (rn_order - (-3.0)).abs() <= ORDER_TOL
            && (ss_order - (-4.0)).abs() <= ORDER_TOL
            && coef_gap <= COEFFICIENT_TOL
            && elapsed < ASYMPTOTIC_TIME,
        format!(
            "RN order {rn_order:.3}, SS order {ss_order:.3}, coefficient gap {:.2}%, {:.2}s",
            100.0 * coef_gap,
            elapsed.as_secs_f64()
        ),
    )
}

fn minkowski() -> Outcome {
    let tol = Tolerances::default();
    let cases: Vec<(ManifoldSpec<f64>, SubmanifoldFamily<f64>)> = vec![
        (ManifoldSpec::new(3, Family::DeSitterSchwarzschild { m: 0.5, c: -1.0 }), SubmanifoldFamily::Slice { s: 2.0 }),
        (ManifoldSpec::new(4, Family::DeSitterSchwarzschild { m: 0.2, c: 0.3 }), SubmanifoldFamily::Slice { s: 1.0 }),
        (ManifoldSpec::new(5, Family::ReissnerNordstrom { m: 1.0, q: 0.3 }), SubmanifoldFamily::Slice { s: 3.0 }),
        (ManifoldSpec::new(3, Family::SpaceForm { c: -1.0 }), SubmanifoldFamily::GeodesicSphere { radius: 2.0 }),
        (ManifoldSpec::new(4, Family::SpaceForm { c: 1.0 }), SubmanifoldFamily::GeodesicSphere { radius: 1.2 }),
        (ManifoldSpec::new(3, Family::SpaceForm { c: 0.0 }), SubmanifoldFamily::GeodesicSphere { radius: 3.0 }),
    ];
    let mut worst = 0.0f64;
    for (spec, fam) in &cases {
        let p = WarpProfile::with_default_range(spec).map_err(|e| e.to_string())?;
        let mesh = SubmanifoldMesh::build(&p, fam, MESH_RESOLUTION).map_err(|e| e.to_string())?;
        let rep = check_hsiung_minkowski(&mesh, &p, &tol).map_err(|e| e.to_string())?;
        worst = worst.max(rep.lhs / rep.terms["vol"]);
    }
    let (spec, fam) = &cases[0];
    let p = WarpProfile::with_default_range(spec).unwrap();
    let forced = SubmanifoldMesh::build(&p, fam, MESH_RESOLUTION).unwrap().with_forced_minimal();
    let rep = check_hsiung_minkowski(&forced, &p, &tol).map_err(|e| e.to_string())?;
    check(
        worst < MINKOWSKI_TOL && rep.lhs > 0.0 && rep.verdict == Verdict::Violated,
        format!("worst residual/vol {worst:.2e}; forced-minimal residual {:.4e} ({:?})", rep.lhs, rep.verdict),
    )
}

fn volumes_of(profile: &WarpProfile<f64>, fam: &SubmanifoldFamily<f64>, lo: f64, hi: f64) -> Result<(Vec<f64>, Vec<f64>), String> {
    let mesh = SubmanifoldMesh::build(profile, fam, 1024).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..120).map(|i| lo + (hi - lo) * i as f64 / 119.0).collect();
    let t = trace_v2(&mesh, profile, 0.0, &grid).map_err(|e| e.to_string())?;
    Ok((grid, t.volumes))
}

fn growth() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    // flat planes
    let flat = WarpProfile::with_default_range(&ManifoldSpec::new(4, Family::SpaceForm { c: 0.0 })).unwrap();
    for k in [2usize, 3] {
        let fam = SubmanifoldFamily::RadialCone { k, cap_angle: PI / 2.0, r_lo: 0.0, r_hi: 10.0 };
        let (grid, vols) = volumes_of(&flat, &fam, 0.05, 10.0)?;
        let fit = growth_classify(&grid, &vols, &flat, GrowthModel::Polynomial, k as f64).map_err(|e| e.to_string())?;
        ok &= (fit.value - k as f64).abs() <= FLAT_ORDER_TOL * k as f64;
        lines.push(format!("flat k={k}: {:.4}", fit.value));
    }
    // minimal cones in SS c = -1
    for (n, k) in [(3usize, 2usize), (4, 3)] {
        let spec = ManifoldSpec::<f64>::new(n, Family::DeSitterSchwarzschild { m: 2.0, c: -1.0 });
        let p = WarpProfile::with_default_range(&spec).unwrap();
        let th = ss_thresholds(&spec).unwrap().quotient;
        let r_lo = p.radial_coordinate(1.1 * th.max(p.s_min())).unwrap();
        let fam = SubmanifoldFamily::RadialCone { k, cap_angle: PI / 2.0, r_lo, r_hi: p.r_max() };
        let (grid, vols) = volumes_of(&p, &fam, r_lo, p.r_max())?;
        let fit = growth_classify(&grid, &vols, &p, GrowthModel::Exponential, (k - 1) as f64).map_err(|e| e.to_string())?;
        ok &= fit.value >= RATE_FRACTION * (k - 1) as f64;
        lines.push(format!("SS n={n} k={k}: rate {:.4}", fit.value));
    }
    // minimal cones in RN n = 4
    for k in [2usize, 3] {
        let spec = ManifoldSpec::<f64>::new(4, Family::ReissnerNordstrom { m: 1.0, q: 0.25 });
        let p = WarpProfile::build(&spec, ProfileRange::SMax(200.0), 4096).unwrap();
        let s2 = rn_thresholds(&spec).unwrap().s2;
        let r_lo = p.radial_coordinate(1.1 * s2).unwrap();
        let fam = SubmanifoldFamily::RadialCone { k, cap_angle: PI / 2.0, r_lo, r_hi: p.r_max() };
        let (grid, vols) = volumes_of(&p, &fam, r_lo, p.r_max())?;
        let fit = growth_classify(&grid, &vols, &p, GrowthModel::Polynomial, k as f64).map_err(|e| e.to_string())?;
        ok &= (fit.value - k as f64).abs() <= RN_ORDER_TOL * k as f64;
        lines.push(format!("RN k={k}: order {:.4}", fit.value));
    }
    check(ok, lines.join("; "))
}

fn theo2_disks() -> Outcome {
    let tol = Tolerances::default();
    let mut min_slack = f64::INFINITY;
    let mut count = 0;
    for (c, top) in [(-1.0f64, 3.0f64), (1.0, PI / 4.0)] {
        let spec = ManifoldSpec::new(3, Family::SpaceForm { c });
        let p = WarpProfile::with_default_range(&spec).unwrap();
        for i in 1..=20 {
            let rho = top * i as f64 / 20.0 * 0.999;
            let fam = SubmanifoldFamily::RadialCone { k: 2, cap_angle: PI / 2.0, r_lo: 0.0, r_hi: rho };
            let mesh = SubmanifoldMesh::build(&p, &fam, 2048).map_err(|e| e.to_string())?;
            let rep = check_theo2(&mesh, &p, Theo2Case::I, &tol).map_err(|e| e.to_string())?;
            min_slack = min_slack.min(rep.slack);
            count += 1;
        }
    }
    let flat = WarpProfile::with_default_range(&ManifoldSpec::new(3, Family::SpaceForm { c: 0.0 })).unwrap();
    let mut flat_gap = 0.0f64;
    for rho in [0.5, 1.0, 2.5, 7.0] {
        let fam = SubmanifoldFamily::RadialCone { k: 2, cap_angle: PI / 2.0, r_lo: 0.0, r_hi: rho };
        let mesh = SubmanifoldMesh::build(&flat, &fam, 2048).unwrap();
        let rep = check_theo2(&mesh, &flat, Theo2Case::I, &tol).map_err(|e| e.to_string())?;
        let expected = 2.0 * PI * PI * rho * rho;
        flat_gap = flat_gap.max((rep.slack - expected).abs() / expected);
    }
    check(
        min_slack >= 0.0 && flat_gap < DISK_TOL,
        format!("{count} curved disks, min slack {min_slack:.4e}; flat slack gap {flat_gap:.2e}"),
    )
}

fn determinism() -> Outcome {
    let tol = Tolerances::default();
    let a = serde_json::to_string_pretty(&full_suite(SEED, &tol).map_err(|e| e.to_string())?).unwrap();
    let b = serde_json::to_string_pretty(&full_suite(SEED, &tol).map_err(|e| e.to_string())?).unwrap();
    check(a.as_bytes() == b.as_bytes(), format!("{} bytes per run", a.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("slice equality suite", slice_equality),
        ("geodesic-sphere equality", geodesic_spheres),
        ("right cone in R3", right_cones),
        ("defining ODE residuals", ode_residuals),
        ("RN root ordering", rn_ordering),
        ("monotonicity traces", monotonicity),
        ("asymptotic expansions", asymptotics),
        ("Hsiung-Minkowski", minkowski),
        ("growth classification", growth),
        ("minimal disks", theo2_disks),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
