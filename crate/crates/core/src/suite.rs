//! Seeded randomized check suites over `f64`, shared by the command line and
//! the acceptance run. Every suite is a pure function of its seed.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::monotonic::{admissible_alpha, lower_bounds, trace_v1, trace_v2, LowerBounds};
use crate::regions::{rn_thresholds, ss_params, ss_thresholds};
use crate::submanifolds::{moments, SubmanifoldFamily, SubmanifoldMesh};
use crate::verifiers::{
    check_cor_spaceform, check_fundamental, check_hsiung_minkowski, check_thm_rn, check_thm_ss, ss_case_region,
    InequalityReport, RnCase, SpaceFormCase, SsCase, Tolerances, Verdict,
};
use crate::warping::{Family, ManifoldSpec, ProfileRange, WarpProfile};

/// Kinds of randomly drawn manifolds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpecKind {
    SsHyperbolic,
    SsFlat,
    SsSpherical,
    Rn,
    Hyperbolic,
    Hemisphere,
    Euclidean,
}

pub fn random_spec(rng: &mut impl Rng, kind: SpecKind) -> ManifoldSpec<f64> {
    match kind {
        SpecKind::SsHyperbolic => ManifoldSpec::new(
            rng.random_range(3..=5),
            Family::DeSitterSchwarzschild { m: rng.random_range(0.05..1.0), c: -rng.random_range(0.3..1.5) },
        ),
        SpecKind::SsFlat => ManifoldSpec::new(
            rng.random_range(3..=5),
            Family::DeSitterSchwarzschild { m: rng.random_range(0.05..1.0), c: 0.0 },
        ),
        SpecKind::SsSpherical => {
            let n: usize = rng.random_range(3..=5);
            let c: f64 = rng.random_range(0.05..0.5);
            let nf = n as f64;
            // keep n^n m² c^{n-2} / (4 (n-2)^{n-2}) well below 1
            let m_max = (4.0 * (nf - 2.0).powf(nf - 2.0) / (nf.powf(nf) * c.powf(nf - 2.0))).sqrt();
            ManifoldSpec::new(n, Family::DeSitterSchwarzschild { m: rng.random_range(0.1..0.7) * m_max, c })
        }
        SpecKind::Rn => {
            let q = rng.random_range(0.05..0.5);
            ManifoldSpec::new(
                rng.random_range(3..=6),
                Family::ReissnerNordstrom { m: 2.0 * q * rng.random_range(1.05..2.0), q },
            )
        }
        SpecKind::Hyperbolic => {
            ManifoldSpec::new(rng.random_range(2..=5), Family::SpaceForm { c: -rng.random_range(0.2..1.5) })
        }
        SpecKind::Hemisphere => {
            ManifoldSpec::new(rng.random_range(2..=5), Family::SpaceForm { c: rng.random_range(0.2..1.5) })
        }
        SpecKind::Euclidean => ManifoldSpec::new(rng.random_range(2..=5), Family::SpaceForm { c: 0.0 }),
    }
}

/// Every applicable check on one mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshRecord {
    pub spec: ManifoldSpec<f64>,
    pub family: SubmanifoldFamily<f64>,
    pub reports: Vec<InequalityReport<f64>>,
}

impl MeshRecord {
    /// Largest `|slack| / |lhs|` over reports that expect equality; the
    /// Minkowski residual is scaled by the volume instead.
    pub fn worst_equality_gap(&self) -> f64 {
        self.reports
            .iter()
            .filter(|r| r.equality_expected && r.verdict != Verdict::PreconditionUnmet)
            .map(|r| match r.terms.get("vol") {
                Some(vol) if r.name == "hsiung_minkowski" => r.lhs / vol,
                _ => r.slack.abs() / r.lhs.abs(),
            })
            .fold(0.0, f64::max)
    }

    pub fn any_violated(&self) -> bool {
        self.reports.iter().any(|r| r.verdict == Verdict::Violated)
    }
}

fn keep(out: &mut Vec<InequalityReport<f64>>, res: Result<InequalityReport<f64>>) -> Result<()> {
    match res {
        Ok(r) if r.verdict != Verdict::PreconditionUnmet => out.push(r),
        Ok(_) => {}
        Err(
            GeomError::ConstantInapplicable(_)
            | GeomError::WrongFamily(_)
            | GeomError::RegionViolation(_)
            | GeomError::HemisphereViolation { .. }
            | GeomError::OpenBoundary
            | GeomError::NotMinimal(_),
        ) => {}
        Err(e) => return Err(e),
    }
    Ok(())
}

/// Runs every check whose hypotheses hold on `mesh`; the rest are dropped.
pub fn applicable_reports(
    mesh: &SubmanifoldMesh<f64>,
    profile: &WarpProfile<f64>,
    tol: &Tolerances,
) -> Result<Vec<InequalityReport<f64>>> {
    let mut out = Vec::new();
    keep(&mut out, check_fundamental(mesh, profile, tol))?;
    if mesh.is_closed() {
        keep(&mut out, check_hsiung_minkowski(mesh, profile, tol))?;
    }
    if ss_params(&mesh.spec).is_some() {
        for case in SsCase::ALL {
            keep(&mut out, check_thm_ss(mesh, profile, case, tol))?;
        }
    }
    if matches!(mesh.spec.family, Family::ReissnerNordstrom { .. }) {
        for case in RnCase::ALL {
            keep(&mut out, check_thm_rn(mesh, profile, case, tol))?;
        }
    }
    if let Family::SpaceForm { c } = mesh.spec.family {
        if c < 0.0 {
            keep(&mut out, check_cor_spaceform(mesh, profile, SpaceFormCase::Hyperbolic, tol))?;
        } else if c > 0.0 {
            keep(&mut out, check_cor_spaceform(mesh, profile, SpaceFormCase::Hemisphere, tol))?;
        }
    }
    Ok(out)
}

/// Area-radius bands in which the slice theorems apply, clipped to the profile.
fn slice_bands(profile: &WarpProfile<f64>) -> Result<Vec<(f64, f64)>> {
    let spec = profile.spec();
    let (lo, hi) = (profile.s_min(), profile.s_max());
    let mut bands = Vec::new();
    if let Family::ReissnerNordstrom { .. } = spec.family {
        let th = rn_thresholds(spec)?;
        bands.push((th.s0, th.s2));
        bands.push((th.s2, f64::INFINITY));
    } else if ss_params(spec).is_some() {
        for case in [SsCase::I, SsCase::II, SsCase::III, SsCase::IV] {
            if let Some(band) = ss_case_region(spec, case)? {
                bands.push(band);
            }
        }
    }
    if bands.is_empty() {
        bands.push((lo, hi));
    }
    Ok(bands
        .into_iter()
        .map(|(a, b)| (a.max(lo), b.min(hi)))
        .filter(|(a, b)| b > a && (b - a) > 1e-6 * b)
        .collect())
}

/// `count` slices of `profile`, cycling through the theorem bands.
pub fn random_slices(profile: &WarpProfile<f64>, seed: u64, count: usize) -> Result<Vec<SubmanifoldFamily<f64>>> {
    let bands = slice_bands(profile)?;
    if bands.is_empty() {
        return Err(GeomError::EmptyResult("no slice band inside the profile".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|i| {
            let (a, b) = bands[i % bands.len()];
            SubmanifoldFamily::Slice { s: a + (b - a) * rng.random_range(0.05..0.95) }
        })
        .collect())
}

fn run_records(
    jobs: Vec<(WarpProfile<f64>, SubmanifoldFamily<f64>)>,
    resolution: usize,
    tol: &Tolerances,
) -> Result<Vec<MeshRecord>> {
    jobs.par_iter()
        .map(|(profile, family)| {
            let mesh = SubmanifoldMesh::build(profile, family, resolution)?;
            Ok(MeshRecord {
                spec: *profile.spec(),
                family: family.clone(),
                reports: applicable_reports(&mesh, profile, tol)?,
            })
        })
        .collect()
}

/// Slice equality suite over de Sitter–Schwarzschild manifolds of every sign
/// of `c` and Reissner–Nordström manifolds.
pub fn slice_suite(seed: u64, count: usize, resolution: usize, tol: &Tolerances) -> Result<Vec<MeshRecord>> {
    let kinds = [SpecKind::SsHyperbolic, SpecKind::SsFlat, SpecKind::SsSpherical, SpecKind::Rn];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::with_capacity(count);
    let per_spec = 4;
    let mut i = 0;
    while jobs.len() < count {
        let spec = random_spec(&mut rng, kinds[i % kinds.len()]);
        let profile = WarpProfile::build(&spec, ProfileRange::Default, crate::warping::DEFAULT_RESOLUTION)?;
        let take = per_spec.min(count - jobs.len());
        for family in random_slices(&profile, rng.random(), take)? {
            jobs.push((profile.clone(), family));
        }
        i += 1;
    }
    run_records(jobs, resolution, tol)
}

/// Geodesic spheres in hyperbolic spaces and open hemispheres, `count` each.
pub fn geodesic_sphere_suite(seed: u64, count: usize, resolution: usize, tol: &Tolerances) -> Result<Vec<MeshRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::with_capacity(2 * count);
    for kind in [SpecKind::Hyperbolic, SpecKind::Hemisphere] {
        for _ in 0..count {
            let spec = random_spec(&mut rng, kind);
            let Family::SpaceForm { c } = spec.family else { unreachable!() };
            let radius = match kind {
                SpecKind::Hyperbolic => rng.random_range(0.1..4.0) / (-c).sqrt(),
                _ => rng.random_range(0.05..0.95) * PI / (2.0 * c.sqrt()),
            };
            let profile = WarpProfile::with_default_range(&spec)?;
            jobs.push((profile, SubmanifoldFamily::GeodesicSphere { radius }));
        }
    }
    run_records(jobs, resolution, tol)
}

/// Measured quantities of a right circular cone in `R³`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RightConeRecord {
    pub alpha: f64,
    pub radius: f64,
    pub area: f64,
    /// `π R² sin α`.
    pub expected_area: f64,
    /// `½ ∫_∂Σ h/h'`.
    pub half_boundary_quotient: f64,
    pub fundamental: InequalityReport<f64>,
}

pub fn right_cone_suite(seed: u64, count: usize, resolution: usize, tol: &Tolerances) -> Result<Vec<RightConeRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<(f64, f64)> =
        (0..count).map(|_| (rng.random_range(0.05..0.95) * PI / 2.0, rng.random_range(0.2..8.0))).collect();
    let profile = WarpProfile::with_default_range(&ManifoldSpec::new(3, Family::SpaceForm { c: 0.0 }))?;
    params
        .par_iter()
        .map(|&(alpha, radius)| {
            let mesh = SubmanifoldMesh::build(&profile, &SubmanifoldFamily::RightCone3D { alpha, radius }, resolution)?;
            let mo = moments(&mesh, &profile)?;
            Ok(RightConeRecord {
                alpha,
                radius,
                area: mo.vol,
                expected_area: PI * radius * radius * alpha.sin(),
                half_boundary_quotient: 0.5 * mo.int_boundary_quot,
                fundamental: check_fundamental(&mesh, &profile, tol)?,
            })
        })
        .collect()
}

/// Outcome of one monotonicity configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub spec: ManifoldSpec<f64>,
    pub family: SubmanifoldFamily<f64>,
    pub alpha: f64,
    pub v1_violations: Vec<usize>,
    pub v2_violations: Vec<usize>,
    pub v1_range: (f64, f64),
    pub v2_range: (f64, f64),
    pub bounds: LowerBounds<f64>,
}

impl TraceRecord {
    pub fn is_clean(&self) -> bool {
        self.v1_violations.is_empty() && self.v2_violations.is_empty() && self.bounds.bounds.values().all(|b| b.pass)
    }
}

/// Trace points per configuration.
pub const TRACE_POINTS: usize = 40;

/// A random admissible cone: through the pole in space forms, above the
/// quotient threshold (or `s2`) in the horizon families.
fn random_cone(rng: &mut impl Rng, kind: SpecKind) -> Result<(WarpProfile<f64>, SubmanifoldFamily<f64>)> {
    let mut spec = random_spec(rng, kind);
    spec.n = spec.n.max(3);
    let profile = WarpProfile::with_default_range(&spec)?;
    let k = rng.random_range(2..spec.n);
    let cap_angle = rng.random_range(0.3..1.0) * PI / 2.0;
    let top = profile.r_max();
    let (r_lo, r_hi) = match kind {
        SpecKind::Euclidean | SpecKind::Hyperbolic | SpecKind::Hemisphere => (0.0, top * rng.random_range(0.3..0.9)),
        SpecKind::Rn => {
            let s2 = rn_thresholds(&spec)?.s2;
            (profile.radial_coordinate(s2 * rng.random_range(1.05..1.5))?, top * 0.95)
        }
        _ => {
            let th = ss_thresholds(&spec)?.quotient.max(profile.s_min());
            let s_hi = profile.s_max();
            let s_lo = th + (s_hi - th) * rng.random_range(0.02..0.2);
            (profile.radial_coordinate(s_lo)?, top * 0.95)
        }
    };
    Ok((profile, SubmanifoldFamily::RadialCone { k, cap_angle, r_lo, r_hi }))
}

/// `count` random admissible (manifold, cone, `α`) configurations with `α`
/// between `k max|H|` and twice that.
pub fn monotonicity_suite(seed: u64, count: usize, resolution: usize) -> Result<Vec<TraceRecord>> {
    let kinds = [
        SpecKind::Euclidean,
        SpecKind::Hyperbolic,
        SpecKind::Hemisphere,
        SpecKind::SsHyperbolic,
        SpecKind::SsFlat,
        SpecKind::SsSpherical,
        SpecKind::Rn,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::with_capacity(count);
    for i in 0..count {
        let (profile, family) = random_cone(&mut rng, kinds[i % kinds.len()])?;
        jobs.push((profile, family, rng.random_range(1.0..2.0)));
    }
    jobs.par_iter()
        .map(|(profile, family, stretch)| {
            let mesh = SubmanifoldMesh::build(profile, family, resolution)?;
            let SubmanifoldFamily::RadialCone { r_lo, r_hi, .. } = *family else { unreachable!() };
            let alpha = admissible_alpha(&mesh) * stretch;
            let start = r_lo + 0.02 * (r_hi - r_lo);
            let grid: Vec<f64> = (0..TRACE_POINTS)
                .map(|i| start + (r_hi - start) * i as f64 / (TRACE_POINTS - 1) as f64)
                .collect();
            let v1 = trace_v1(&mesh, profile, alpha, &grid)?;
            let v2 = trace_v2(&mesh, profile, alpha, &grid)?;
            let span = |v: &[f64]| (v[0], v[v.len() - 1]);
            Ok(TraceRecord {
                spec: *profile.spec(),
                family: family.clone(),
                alpha,
                v1_range: span(&v1.v_values),
                v2_range: span(&v2.v_values),
                v1_violations: v1.violations,
                v2_violations: v2.violations,
                bounds: lower_bounds(&mesh, profile, alpha, grid[4], grid[TRACE_POINTS - 4])?,
            })
        })
        .collect()
}

/// Everything above under one seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullSuite {
    pub seed: u64,
    pub slices: Vec<MeshRecord>,
    pub geodesic_spheres: Vec<MeshRecord>,
    pub right_cones: Vec<RightConeRecord>,
    pub traces: Vec<TraceRecord>,
}

pub fn full_suite(seed: u64, tol: &Tolerances) -> Result<FullSuite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: [u64; 4] = rng.random();
    Ok(FullSuite {
        seed,
        slices: slice_suite(seeds[0], 20, 4096, tol)?,
        geodesic_spheres: geodesic_sphere_suite(seeds[1], 10, 4096, tol)?,
        right_cones: right_cone_suite(seeds[2], 10, 4096, tol)?,
        traces: monotonicity_suite(seeds[3], 50, 512)?,
    })
}
