use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use warpgeom::curvature::curvature_table;
use warpgeom::monotonic::{admissible_alpha, asymptotic_check, growth_classify, lower_bounds, trace_v1, trace_v2, GrowthModel};
use warpgeom::regions::{c1_at_threshold, c1_constant, c2_constant, rn_thresholds, ss_thresholds, u_monotonicity};
use warpgeom::submanifolds::moments;
use warpgeom::suite::{applicable_reports, random_slices};
use warpgeom::verifiers::{
    check_cor_spaceform, check_domain_corollaries, check_fundamental, check_hsiung_minkowski, check_theo2,
    check_thm_rn, check_thm_ss, ss_case_region, RnCase, SpaceFormCase, SsCase, Theo2Case,
};
use warpgeom::{
    Family, GeomError, InequalityReport, ProfileRange, SubmanifoldFamily, SubmanifoldMesh, Verdict, WarpProfile,
};

use crate::config::{GrowthChoice, RunConfig};
use crate::CliError;

/// Files produced by a command, in write order, and whether any check failed.
pub struct Output {
    pub files: Vec<(String, String)>,
    pub violated: bool,
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn profile_for(cfg: &RunConfig) -> Result<WarpProfile<f64>, CliError> {
    Ok(WarpProfile::build(&cfg.spec, ProfileRange::Default, cfg.resolution)?)
}

/// Largest geodesic radius (or area radius for slices) a family reaches.
fn reach(family: &SubmanifoldFamily<f64>) -> Option<ProfileRange<f64>> {
    match family {
        SubmanifoldFamily::Slice { s } => Some(ProfileRange::SMax(*s)),
        SubmanifoldFamily::RadialCone { r_hi, .. } => Some(ProfileRange::RMax(*r_hi)),
        SubmanifoldFamily::GeodesicSphere { radius } => Some(ProfileRange::RMax(*radius)),
        SubmanifoldFamily::RightCone3D { radius, .. } => Some(ProfileRange::RMax(*radius)),
        SubmanifoldFamily::RadialGraph { phi } => phi.iter().copied().reduce(f64::max).map(ProfileRange::RMax),
    }
}

/// Profile covering the mesh: the default range when it suffices, otherwise
/// stretched 2% past the mesh.
fn profile_for_mesh(cfg: &RunConfig, family: &SubmanifoldFamily<f64>) -> Result<WarpProfile<f64>, CliError> {
    let base = profile_for(cfg)?;
    let grow = 1.02;
    let range = match reach(family) {
        Some(ProfileRange::SMax(s)) if s >= base.s_max() => ProfileRange::SMax(s * grow),
        Some(ProfileRange::RMax(r)) if r >= base.r_max() => ProfileRange::RMax(r * grow),
        _ => return Ok(base),
    };
    Ok(WarpProfile::build(&cfg.spec, range, cfg.resolution)?)
}

fn mesh_for(cfg: &RunConfig, profile: &WarpProfile<f64>, family: &SubmanifoldFamily<f64>) -> Result<SubmanifoldMesh<f64>, CliError> {
    let mesh = SubmanifoldMesh::build(profile, family, cfg.resolution)?;
    Ok(if cfg.force_minimal { mesh.with_forced_minimal() } else { mesh })
}

fn thresholds(profile: &WarpProfile<f64>) -> Value {
    let spec = profile.spec();
    if let Ok(th) = ss_thresholds(spec) {
        json!({ "ss": th })
    } else if let Ok(th) = rn_thresholds(spec) {
        json!({ "rn": th })
    } else {
        Value::Null
    }
}

pub fn info(cfg: &RunConfig) -> Result<Output, CliError> {
    let profile = profile_for(cfg)?;
    let validated = cfg.spec.validate()?;
    let rows = curvature_table(&profile, cfg.points)?;
    let summary = json!({
        "spec": cfg.spec,
        "checks": validated.checks,
        "domain": profile.domain(),
        "r_max": profile.r_max(),
        "s_min": profile.s_min(),
        "s_max": profile.s_max(),
        "regular_origin": cfg.spec.has_regular_origin(),
        "thresholds": thresholds(&profile),
        "curvature_samples": rows.iter().step_by((rows.len() / 8).max(1)).collect::<Vec<_>>(),
    });
    let mut csv = String::from("r,ric_radial,scal,k_tan,k_rad\n");
    for row in &rows {
        csv.push_str(&format!("{},{},{},{},{}\n", row.r, row.ric_radial, row.scal, row.k_tan, row.k_rad));
    }
    Ok(Output {
        files: vec![("manifold.json".into(), pretty(&summary)), ("curvature.csv".into(), csv)],
        violated: false,
    })
}

pub fn regions(cfg: &RunConfig) -> Result<Output, CliError> {
    let profile = profile_for(cfg)?;
    let spec = &cfg.spec;
    let mut cases = BTreeMap::new();
    if ss_thresholds(spec).is_ok() {
        for case in SsCase::ALL {
            cases.insert(case.name().to_string(), ss_case_region(spec, case)?);
        }
    }
    if let Ok(th) = rn_thresholds(spec) {
        for case in RnCase::ALL {
            let band = match case {
                RnCase::I | RnCase::IMod => (th.s0, th.s2),
                RnCase::II | RnCase::IIMod => (th.s2, f64::INFINITY),
            };
            cases.insert(case.name().to_string(), Some(band));
        }
    }
    let lo = profile.r_grid().first().copied().unwrap_or(0.0);
    let c1 = if ss_thresholds(spec).is_ok() { c1_at_threshold(spec, spec.n - 1).ok() } else { None };
    let summary = json!({
        "spec": spec,
        "thresholds": thresholds(&profile),
        "case_regions": cases,
        "u_monotonicity": u_monotonicity(&profile, lo, profile.r_max())?,
        "c1_at_threshold": c1,
    });
    Ok(Output { files: vec![("regions.json".into(), pretty(&summary))], violated: false })
}

/// Errors that mean "not applicable here" when running every check.
fn inapplicable(e: &GeomError) -> bool {
    matches!(
        e,
        GeomError::ConstantInapplicable(_)
            | GeomError::WrongFamily(_)
            | GeomError::RegionViolation(_)
            | GeomError::HemisphereViolation { .. }
            | GeomError::OpenBoundary
            | GeomError::NotMinimal(_)
            | GeomError::InvalidParameter(_)
    )
}

fn named_check(
    cfg: &RunConfig,
    name: &str,
    mesh: &SubmanifoldMesh<f64>,
    profile: &WarpProfile<f64>,
) -> Result<Vec<InequalityReport<f64>>, CliError> {
    let tol = &cfg.tolerances;
    let one = |r: warpgeom::Result<InequalityReport<f64>>| r.map(|x| vec![x]).map_err(CliError::from);
    if let Some(case) = SsCase::ALL.into_iter().find(|c| c.name() == name) {
        return one(check_thm_ss(mesh, profile, case, tol));
    }
    if let Some(case) = RnCase::ALL.into_iter().find(|c| c.name() == name) {
        return one(check_thm_rn(mesh, profile, case, tol));
    }
    match name {
        "fundamental" => one(check_fundamental(mesh, profile, tol)),
        "hsiung_minkowski" => one(check_hsiung_minkowski(mesh, profile, tol)),
        "hyperbolic" => one(check_cor_spaceform(mesh, profile, SpaceFormCase::Hyperbolic, tol)),
        "hemisphere" => one(check_cor_spaceform(mesh, profile, SpaceFormCase::Hemisphere, tol)),
        "theo2_i" => one(check_theo2(mesh, profile, Theo2Case::I, tol)),
        "theo2_ii" => one(check_theo2(mesh, profile, Theo2Case::II, tol)),
        "domain" => {
            let (a, b) = cfg.band.ok_or_else(|| CliError::Config("case 'domain' needs --band s_a:s_b".into()))?;
            Ok(check_domain_corollaries(profile, a, b, tol)?)
        }
        other => Err(CliError::Config(format!("unknown case '{other}'"))),
    }
}

fn mesh_reports(
    cfg: &RunConfig,
    mesh: &SubmanifoldMesh<f64>,
    profile: &WarpProfile<f64>,
) -> Result<Vec<InequalityReport<f64>>, CliError> {
    if cfg.cases.is_empty() {
        let mut out = applicable_reports(mesh, profile, &cfg.tolerances)?;
        if mesh.k == 2 && !mesh.is_forced_minimal() {
            for case in [Theo2Case::I, Theo2Case::II] {
                match check_theo2(mesh, profile, case, &cfg.tolerances) {
                    Ok(r) if r.verdict != Verdict::PreconditionUnmet => out.push(r),
                    Ok(_) => {}
                    Err(e) if inapplicable(&e) => {}
                    Err(e) => return Err(e.into()),
                }
            }
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    for name in &cfg.cases {
        out.extend(named_check(cfg, name, mesh, profile)?);
    }
    Ok(out)
}

fn any_violated(reports: &[InequalityReport<f64>]) -> bool {
    reports.iter().any(|r| r.verdict == Verdict::Violated)
}

pub fn verify(cfg: &RunConfig) -> Result<Output, CliError> {
    if let Some(family) = &cfg.mesh {
        let profile = profile_for_mesh(cfg, family)?;
        let mesh = mesh_for(cfg, &profile, family)?;
        let reports = mesh_reports(cfg, &mesh, &profile)?;
        let violated = any_violated(&reports);
        return Ok(Output { files: vec![("reports.json".into(), pretty(&reports))], violated });
    }
    // no mesh: seeded random slices of this manifold
    let profile = profile_for(cfg)?;
    let families = random_slices(&profile, cfg.seed, cfg.count)?;
    let records: Vec<Result<Value, CliError>> = families
        .par_iter()
        .map(|family| {
            let mesh = mesh_for(cfg, &profile, family)?;
            let reports = mesh_reports(cfg, &mesh, &profile)?;
            Ok(json!({ "family": family, "reports": reports }))
        })
        .collect();
    let records = records.into_iter().collect::<Result<Vec<_>, _>>()?;
    let violated = records.iter().any(|r| r["reports"].as_array().is_some_and(|a| a.iter().any(|x| x["verdict"] == "Violated")));
    Ok(Output { files: vec![("reports.json".into(), pretty(&records))], violated })
}

pub fn monotonicity(cfg: &RunConfig) -> Result<Output, CliError> {
    let family = cfg.mesh.as_ref().ok_or_else(|| CliError::Config("monotonicity needs --mesh".into()))?;
    let profile = profile_for_mesh(cfg, family)?;
    let mesh = mesh_for(cfg, &profile, family)?;
    let mo = moments(&mesh, &profile)?;
    let alpha = cfg.alpha.unwrap_or_else(|| admissible_alpha(&mesh));
    let (lo, hi) = (mo.r_min, mo.r_max.max(mesh.boundary.iter().fold(0.0, |a, b| a.max(b.r))));
    let start = if lo > 0.0 { lo } else { hi / cfg.points as f64 };
    let grid: Vec<f64> = (0..cfg.points).map(|i| start + (hi - start) * i as f64 / (cfg.points - 1) as f64).collect();
    let v1 = trace_v1(&mesh, &profile, alpha, &grid)?;
    let v2 = trace_v2(&mesh, &profile, alpha, &grid)?;
    let bounds = lower_bounds(&mesh, &profile, alpha, grid[cfg.points / 8], grid[cfg.points - 1])?;
    let growth = match cfg.growth {
        None => None,
        Some(choice) => {
            let k = mesh.k as f64;
            let (model, reference) = match choice {
                GrowthChoice::Polynomial => (GrowthModel::Polynomial, k),
                GrowthChoice::Exponential => {
                    let curvature = match cfg.spec.family {
                        Family::SpaceForm { c } | Family::DeSitterSchwarzschild { c, .. } if c < 0.0 => -c,
                        _ => return Err(CliError::Config("exponential growth needs negative curvature c".into())),
                    };
                    (GrowthModel::Exponential, (k - 1.0) * curvature.sqrt())
                }
            };
            Some(growth_classify(&grid, &v1.volumes, &profile, model, reference)?)
        }
    };
    let violated = !v1.is_monotone()
        || !v2.is_monotone()
        || bounds.bounds.values().any(|b| !b.pass)
        || growth.as_ref().is_some_and(|g| !g.matches);
    let summary = json!({
        "spec": cfg.spec,
        "family": family,
        "alpha": alpha,
        "v1_violations": v1.violations,
        "v2_violations": v2.violations,
        "lower_bounds": bounds,
        "growth": growth,
    });
    Ok(Output {
        files: vec![
            ("trace_v1.csv".into(), v1.to_csv()),
            ("trace_v2.csv".into(), v2.to_csv()),
            ("monotonicity.json".into(), pretty(&summary)),
        ],
        violated,
    })
}

pub fn asymptotics(cfg: &RunConfig) -> Result<Output, CliError> {
    let profile = profile_for(cfg)?;
    let report = asymptotic_check(&profile)?;
    Ok(Output { files: vec![("asymptotics.json".into(), pretty(&report))], violated: false })
}

fn report_row(x: f64, r: &InequalityReport<f64>) -> String {
    format!("{x},{},{},{},{:?}\n", r.lhs, r.rhs, r.slack, r.verdict)
}

pub fn sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("sweep needs --sweep param=lo:hi:count".into()))?;
    let values = sweep.values()?;
    let spec = &cfg.spec;
    let case = cfg.cases.first().cloned().unwrap_or_else(|| "fundamental".into());
    let header = |param: &str| format!("{param},{case}.lhs,{case}.rhs,{case}.slack,{case}.verdict\n");
    let (csv, violated) = match sweep.param.as_str() {
        "s" => {
            let top = values[values.len() - 1];
            let profile = profile_for_mesh(cfg, &SubmanifoldFamily::Slice { s: top })?;
            let rows: Vec<Result<(String, bool), CliError>> = values
                .par_iter()
                .map(|&s| {
                    let mesh = mesh_for(cfg, &profile, &SubmanifoldFamily::Slice { s })?;
                    let reports = named_check(cfg, &case, &mesh, &profile)?;
                    Ok((report_row(s, &reports[0]), any_violated(&reports)))
                })
                .collect();
            collect_rows(header("s"), rows)?
        }
        "alpha" | "cap_angle" => {
            let Some(SubmanifoldFamily::RadialCone { k, r_lo, r_hi, .. }) = cfg.mesh.clone() else {
                return Err(CliError::Config("an alpha sweep needs a RadialCone --mesh".into()));
            };
            if !(values[0] > 0.0 && values[values.len() - 1] <= PI / 2.0) {
                return Err(CliError::Config("cone cap angles must lie in (0, pi/2]".into()));
            }
            let profile = profile_for_mesh(cfg, &SubmanifoldFamily::RadialCone { k, cap_angle: 1.0, r_lo, r_hi })?;
            let rows: Vec<Result<(String, bool), CliError>> = values
                .par_iter()
                .map(|&cap_angle| {
                    let mesh = mesh_for(cfg, &profile, &SubmanifoldFamily::RadialCone { k, cap_angle, r_lo, r_hi })?;
                    let reports = named_check(cfg, &case, &mesh, &profile)?;
                    Ok((report_row(cap_angle, &reports[0]), any_violated(&reports)))
                })
                .collect();
            collect_rows(header("alpha"), rows)?
        }
        "d" => {
            let k = match &cfg.mesh {
                Some(SubmanifoldFamily::RadialCone { k, .. }) => *k,
                _ => spec.n - 1,
            };
            let mut out = String::new();
            if let Family::ReissnerNordstrom { .. } = spec.family {
                out.push_str("d,c2,c2_minus_k\n");
                for &d in &values {
                    let c2 = c2_constant(spec, d)?;
                    out.push_str(&format!("{d},{c2},{}\n", c2 - k as f64));
                }
            } else {
                out.push_str("d,c1,c1_sign\n");
                for &d in &values {
                    let c1 = c1_constant(spec, d, k)?;
                    out.push_str(&format!("{d},{},{:?}\n", c1.value, c1.sign));
                }
            }
            (out, false)
        }
        other => return Err(CliError::Config(format!("unknown sweep parameter '{other}' (s, alpha, d)"))),
    };
    Ok(Output { files: vec![("sweep.csv".into(), csv)], violated })
}

fn collect_rows(header: String, rows: Vec<Result<(String, bool), CliError>>) -> Result<(String, bool), CliError> {
    let mut csv = header;
    let mut violated = false;
    for row in rows {
        let (line, bad) = row?;
        csv.push_str(&line);
        violated |= bad;
    }
    Ok((csv, violated))
}
