//! Inequality and identity checks on meshes, with slack and verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::curvature::{fiber_scalar_curvature, ricci_from_jet, scalar_from_jet};
use crate::error::{GeomError, Result};
use crate::quadrature::{gauss_legendre, integrate, sphere_area};
use crate::regions::{c1_constant, c2_constant, rn_thresholds, ss_params, ss_thresholds, u_monotonicity, Sign};
use crate::scalar::Real;
use crate::submanifolds::{moments, GeometricMoments, SubmanifoldFamily, SubmanifoldMesh};
use crate::warping::{Endpoint, Family, ManifoldSpec, WarpProfile};

/// Relative tolerances for classifying a slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `|slack| < eq_tol |lhs|` counts as equality.
    pub eq_tol: f64,
    /// `slack < -check_tol |lhs|` counts as a violation.
    pub check_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eq_tol: 1e-6, check_tol: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Equality,
    Violated,
    PreconditionUnmet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Precondition {
    pub name: String,
    pub pass: bool,
}

/// Outcome of one inequality check: `lhs <= rhs`, `slack = rhs - lhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct InequalityReport<T> {
    pub name: String,
    pub lhs: T,
    pub rhs: T,
    pub terms: BTreeMap<String, T>,
    pub slack: T,
    pub verdict: Verdict,
    pub equality_expected: bool,
    pub preconditions: Vec<Precondition>,
}

impl<T: Real> InequalityReport<T> {
    fn new(
        name: &str,
        lhs: T,
        terms: Vec<(&str, T)>,
        preconditions: Vec<(&str, bool)>,
        equality_expected: bool,
        tol: &Tolerances,
    ) -> Self {
        let rhs = terms.iter().filter(|(k, _)| !k.starts_with('_')).fold(T::zero(), |a, (_, v)| a + *v);
        let terms = terms.into_iter().map(|(k, v)| (k.trim_start_matches('_').to_string(), v)).collect();
        let preconditions: Vec<Precondition> =
            preconditions.into_iter().map(|(name, pass)| Precondition { name: name.into(), pass }).collect();
        let slack = rhs - lhs;
        let verdict = classify(slack, lhs.abs(), preconditions.iter().all(|p| p.pass), tol);
        InequalityReport { name: name.into(), lhs, rhs, terms, slack, verdict, equality_expected, preconditions }
    }
}

fn classify<T: Real>(slack: T, scale: T, preconditions_pass: bool, tol: &Tolerances) -> Verdict {
    if !preconditions_pass {
        Verdict::PreconditionUnmet
    } else if !slack.is_finite() {
        Verdict::Violated
    } else if slack.abs() < T::of(tol.eq_tol) * scale {
        Verdict::Equality
    } else if slack < -T::of(tol.check_tol) * scale {
        Verdict::Violated
    } else {
        Verdict::Holds
    }
}

fn same_spec<T: Real>(mesh: &SubmanifoldMesh<T>, profile: &WarpProfile<T>) -> Result<GeometricMoments<T>> {
    if profile.spec() != &mesh.spec {
        return Err(GeomError::SpecMismatch);
    }
    moments(mesh, profile)
}

fn is_slice<T: Real>(mesh: &SubmanifoldMesh<T>) -> bool {
    matches!(mesh.family, SubmanifoldFamily::Slice { .. } | SubmanifoldFamily::GeodesicSphere { .. })
        && !mesh.is_forced_minimal()
}

fn positive_slope<T: Real>(mesh: &SubmanifoldMesh<T>) -> bool {
    mesh.nodes.iter().all(|x| x.hp > T::zero())
}

/// Bracket `[|∂Σ| + k ∫|H|]` shared by the isoperimetric bounds.
fn bracket<T: Real>(mo: &GeometricMoments<T>, k: usize) -> T {
    mo.bvol + T::of_usize(k) * mo.int_abs_h
}

/// `|Σ| <= (1/k)[∫_∂Σ h/h' + ∫ <-kH,∇r> h/h'] - 1/(k(n-1)) ∫ Ric(∇r)(h/h')² |∇_Σ r|²`.
///
/// Equality is expected whenever the boundary is empty or meets the slices
/// orthogonally with outward conormal `∇r`.
pub fn check_fundamental<T: Real>(
    mesh: &SubmanifoldMesh<T>,
    profile: &WarpProfile<T>,
    tol: &Tolerances,
) -> Result<InequalityReport<T>> {
    let mo = same_spec(mesh, profile)?;
    let k = T::of_usize(mesh.k);
    let nm1 = T::of_usize(mesh.spec.n - 1);
    let one = T::one();
    let orthogonal = mesh.boundary.iter().all(|b| (b.conormal_radial - one).abs() <= T::of(1e-12));
    let equality_expected = orthogonal && !mesh.is_forced_minimal();
    Ok(InequalityReport::new(
        "fundamental",
        mo.vol,
        vec![
            ("boundary", mo.int_boundary_quot / k),
            ("mean_curvature", -mo.int_hdot_quot),
            ("ricci", -mo.int_ric_quot_sq / (k * nm1)),
            ("_boundary_conormal", mo.int_boundary_conormal_quot / k),
        ],
        vec![("h_prime_positive", positive_slope(mesh))],
        equality_expected,
        tol,
    ))
}

/// `∫ (h' + h <H,∇r>) = 0` on closed submanifolds. `lhs` is the absolute
/// residual, compared with `eq_tol |Σ|` and `check_tol |Σ|`.
pub fn check_hsiung_minkowski<T: Real>(
    mesh: &SubmanifoldMesh<T>,
    profile: &WarpProfile<T>,
    tol: &Tolerances,
) -> Result<InequalityReport<T>> {
    if !mesh.is_closed() {
        return Err(GeomError::OpenBoundary);
    }
    let mo = same_spec(mesh, profile)?;
    let residual = mo.int_minkowski.abs();
    let verdict = if !positive_slope(mesh) {
        Verdict::PreconditionUnmet
    } else if residual < T::of(tol.eq_tol) * mo.vol {
        Verdict::Equality
    } else if residual <= T::of(tol.check_tol) * mo.vol {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    let mut terms = BTreeMap::new();
    terms.insert("int_hprime".to_string(), mo.int_hprime);
    terms.insert("int_h_hdot".to_string(), mo.int_minkowski - mo.int_hprime);
    terms.insert("vol".to_string(), mo.vol);
    Ok(InequalityReport {
        name: "hsiung_minkowski".into(),
        lhs: residual,
        rhs: T::zero(),
        terms,
        slack: -residual,
        verdict,
        equality_expected: !mesh.is_forced_minimal(),
        preconditions: vec![Precondition { name: "h_prime_positive".into(), pass: positive_slope(mesh) }],
    })
}

/// Cases of the de Sitter–Schwarzschild isoperimetric bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SsCase {
    /// `Σ` below the quotient threshold, bound in `d_Σ`.
    I,
    /// Case I in the `C1(d_Σ)` form.
    IC1,
    /// `c > 0`, `Σ` above the Ricci threshold; `R_Σ` first term, `d_Σ` Ricci term.
    II,
    /// `Σ` above the quotient threshold (and below the Ricci threshold when `c > 0`).
    III,
    /// `Σ` above the quotient threshold, `1/(k-1)` form.
    IV,
    /// Case IV with `c < 0`, bound `1/(sqrt(-c)(k-1))`.
    IVHyperbolic,
}

impl SsCase {
    pub const ALL: [SsCase; 6] = [SsCase::I, SsCase::IC1, SsCase::II, SsCase::III, SsCase::IV, SsCase::IVHyperbolic];

    pub fn name(self) -> &'static str {
        match self {
            SsCase::I => "ss_i",
            SsCase::IC1 => "ss_i_c1",
            SsCase::II => "ss_ii",
            SsCase::III => "ss_iii",
            SsCase::IV => "ss_iv",
            SsCase::IVHyperbolic => "ss_iv_hyperbolic",
        }
    }

    /// Whether slices give equality.
    pub fn slice_equality(self) -> bool {
        matches!(self, SsCase::I | SsCase::II | SsCase::III)
    }
}

/// Upper end of the area-radius domain for the families read as de Sitter–Schwarzschild.
fn ss_upper<T: Real>(spec: &ManifoldSpec<T>) -> Result<T> {
    Ok(match spec.family {
        Family::SpaceForm { c } if c > T::zero() => T::one() / c.sqrt(),
        Family::SpaceForm { .. } => T::infinity(),
        _ => match spec.domain_endpoints()?.s1 {
            Endpoint::Finite(s1) => s1,
            Endpoint::Infinite => T::infinity(),
        },
    })
}

/// Region in which each case applies, as an open interval of area radii.
pub fn ss_case_region<T: Real>(spec: &ManifoldSpec<T>, case: SsCase) -> Result<Option<(T, T)>> {
    let (_, c) = ss_params(spec).ok_or_else(|| GeomError::WrongFamily(spec.family.name().into()))?;
    let th = ss_thresholds(spec)?;
    let s0 = if spec.is_horizon_family() { spec.domain_endpoints()?.s0 } else { T::zero() };
    let s1 = ss_upper(spec)?;
    Ok(match case {
        SsCase::I | SsCase::IC1 => Some((s0, th.quotient)),
        SsCase::II => th.ricci.map(|r| (r, s1)),
        SsCase::III => Some((th.quotient, th.ricci.unwrap_or(s1))),
        SsCase::IV => Some((th.quotient, s1)),
        SsCase::IVHyperbolic => (c < T::zero()).then_some((th.quotient, s1)),
    })
}

fn inside<T: Real>(mo: &GeometricMoments<T>, region: Option<(T, T)>) -> bool {
    region.is_some_and(|(a, b)| mo.d_sigma > a && mo.r_sigma < b)
}

/// De Sitter–Schwarzschild isoperimetric bound for one case; space forms are
/// read as `m = 0`.
pub fn check_thm_ss<T: Real>(
    mesh: &SubmanifoldMesh<T>,
    profile: &WarpProfile<T>,
    case: SsCase,
    tol: &Tolerances,
) -> Result<InequalityReport<T>> {
    let mo = same_spec(mesh, profile)?;
    let spec = &mesh.spec;
    let (m, c) = ss_params(spec).ok_or_else(|| GeomError::WrongFamily(spec.family.name().into()))?;
    let nf = spec.nf();
    let kk = mesh.k;
    let k = T::of_usize(kk);
    let lapse = |s: T| T::one() - m * s.powf(T::of(2.0) - nf) - c * s * s;
    let (d, big_r) = (mo.d_sigma, mo.r_sigma);
    let br = bracket(&mo, kk);
    let ricci_term = |s: T| -s * s / (k * (nf - T::one()) * lapse(s)) * mo.int_ric_grad;
    let region = ss_case_region(spec, case)?;
    let mut pre = vec![("region", inside(&mo, region)), ("h_prime_positive", positive_slope(mesh))];
    let terms = match case {
        SsCase::I => vec![("first", d / (k * lapse(d).sqrt()) * br), ("ricci", ricci_term(d))],
        SsCase::IC1 => {
            let c1 = c1_constant(spec, d, kk)?.value;
            pre.push(("c1_positive", c1 > T::zero()));
            vec![("first", c1 * br), ("_c1", c1)]
        }
        SsCase::II => vec![("first", big_r / (k * lapse(big_r).sqrt()) * br), ("ricci", ricci_term(d))],
        SsCase::III => vec![("first", big_r / (k * lapse(big_r).sqrt()) * br), ("ricci", ricci_term(big_r))],
        SsCase::IV => vec![("first", big_r / ((k - T::one()) * lapse(big_r).sqrt()) * br)],
        SsCase::IVHyperbolic => {
            let root = if c < T::zero() { (-c).sqrt() } else { T::nan() };
            vec![("first", br / (root * (k - T::one())))]
        }
    };
    Ok(InequalityReport::new(case.name(), mo.vol, terms, pre, case.slice_equality() && is_slice(mesh), tol))
}

/// Cases of the Reissner–Nordström bounds. The `*Mod` forms use the
/// denominator `k - C2(d_Σ)`; the opposite-sign `C2(d_Σ) - k` form is reported as
/// the term `flipped_sign`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RnCase {
    I,
    IMod,
    II,
    IIMod,
}

impl RnCase {
    pub const ALL: [RnCase; 4] = [RnCase::I, RnCase::IMod, RnCase::II, RnCase::IIMod];

    pub fn name(self) -> &'static str {
        match self {
            RnCase::I => "rn_i",
            RnCase::IMod => "rn_i_mod",
            RnCase::II => "rn_ii",
            RnCase::IIMod => "rn_ii_mod",
        }
    }
}

pub fn check_thm_rn<T: Real>(
    mesh: &SubmanifoldMesh<T>,
    profile: &WarpProfile<T>,
    case: RnCase,
    tol: &Tolerances,
) -> Result<InequalityReport<T>> {
    let mo = same_spec(mesh, profile)?;
    let spec = &mesh.spec;
    let Family::ReissnerNordstrom { m, q } = spec.family else {
        return Err(GeomError::WrongFamily(spec.family.name().into()));
    };
    let th = rn_thresholds(spec)?;
    let nf = spec.nf();
    let kk = mesh.k;
    let k = T::of_usize(kk);
    let two = T::of(2.0);
    let lapse = |s: T| {
        let u = s.powf(two - nf);
        T::one() - m * u + q * q * u * u
    };
    let (d, big_r) = (mo.d_sigma, mo.r_sigma);
    let br = bracket(&mo, kk);
    let ricci_term = |s: T| -s * s / (k * (nf - T::one()) * lapse(s)) * mo.int_ric_grad;
    let region = match case {
        RnCase::I | RnCase::IMod => (th.s0, th.s2),
        RnCase::II | RnCase::IIMod => (th.s2, T::infinity()),
    };
    let pre = vec![("region", inside(&mo, Some(region))), ("h_prime_positive", positive_slope(mesh))];
    let mod_terms = |s: T| -> Result<Vec<(&'static str, T)>> {
        let c2 = c2_constant(spec, d)?;
        if !(c2 < k) {
            return Err(GeomError::ConstantInapplicable(format!("C2(d) = {} is not below k = {kk}", c2.as_f64())));
        }
        let root = lapse(s).sqrt();
        Ok(vec![("first", s / ((k - c2) * root) * br), ("_c2", c2), ("_flipped_sign", s / ((c2 - k) * root) * br)])
    };
    let terms = match case {
        RnCase::I => vec![("first", d / (k * lapse(d).sqrt()) * br), ("ricci", ricci_term(d))],
        RnCase::II => vec![("first", big_r / (k * lapse(big_r).sqrt()) * br), ("ricci", ricci_term(big_r))],
        RnCase::IMod => mod_terms(d)?,
        RnCase::IIMod => mod_terms(big_r)?,
    };
    let expected = matches!(case, RnCase::I | RnCase::II) && is_slice(mesh);
    Ok(InequalityReport::new(case.name(), mo.vol, terms, pre, expected, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceFormCase {
    Hyperbolic,
    Hemisphere,
}

/// Space-form bounds in `tanh` (`c < 0`) or `tan` (`c > 0`) form. The
/// enclosing ball is taken about the pole, so `R~` is the largest node radius.
pub fn check_cor_spaceform<T: Real>(
    mesh: &SubmanifoldMesh<T>,
    profile: &WarpProfile<T>,
    which: SpaceFormCase,
    tol: &Tolerances,
) -> Result<InequalityReport<T>> {
    let mo = same_spec(mesh, profile)?;
    let Family::SpaceForm { c } = mesh.spec.family else {
        return Err(GeomError::WrongFamily(mesh.spec.family.name().into()));
    };
    let kk = mesh.k;
    let k = T::of_usize(kk);
    let br = bracket(&mo, kk);
    let r_tilde = mo.r_max.max(mesh.boundary.iter().fold(T::zero(), |a, b| a.max(b.r)));
    let (name, terms) = match which {
        SpaceFormCase::Hyperbolic => {
            if !(c < T::zero()) {
                return Err(GeomError::WrongFamily("hyperbolic bound needs c < 0".into()));
            }
            let a = (-c).sqrt();
            let grad = mesh.integrate(|x| (a * x.r).tanh().powi(2) * x.grad_r_sq);
            ("hyperbolic", vec![("first", (a * r_tilde).tanh() / (a * k) * br), ("gradient", grad / k)])
        }
        SpaceFormCase::Hemisphere => {
            if !(c > T::zero()) {
                return Err(GeomError::WrongFamily("hemisphere bound needs c > 0".into()));
            }
            let a = c.sqrt();
            let limit = T::FRAC_PI_2() / a;
            if !(r_tilde < limit) {
                return Err(GeomError::HemisphereViolation { r: r_tilde.as_f64(), limit: limit.as_f64() });
            }
            let grad = mesh.integrate(|x| (a * x.r).tan().powi(2) * x.grad_r_sq);
            ("hemisphere", vec![("first", (a * r_tilde).tan() / (k * a) * br), ("gradient", -grad / k)])
        }
    };
    Ok(InequalityReport::new(name, mo.vol, terms, vec![], is_slice(mesh), tol))
}

/// Isoperimetric bounds for the radial band `Ω = {s_a < h < s_b}`, every form
/// whose region contains the band. `s_a = 0` is allowed for families with a pole.
pub fn check_domain_corollaries<T: Real>(
    profile: &WarpProfile<T>,
    s_a: T,
    s_b: T,
    tol: &Tolerances,
) -> Result<Vec<InequalityReport<T>>> {
    let spec = profile.spec();
    if !(s_a < s_b) {
        return Err(GeomError::InvalidParameter("band needs s_a < s_b".into()));
    }
    let n = spec.n;
    let nf = spec.nf();
    let r_a = if s_a == T::zero() && spec.has_regular_origin() { T::zero() } else { profile.radial_coordinate(s_a)? };
    let r_b = profile.radial_coordinate(s_b)?;
    let fiber = sphere_area::<T>(n - 1);
    let rule = gauss_legendre::<T>(16);
    profile.jet(r_b)?;
    let vol = fiber * integrate(|r| profile.h_at(r).map_or(T::nan(), |h| h.powi(n as i32 - 1)), r_a, r_b, 64, &rule);
    if !vol.is_finite() {
        return Err(GeomError::IntegrationFailure("band volume is not finite".into()));
    }
    let bvol = fiber * (s_a.powi(n as i32 - 1) + s_b.powi(n as i32 - 1));
    let lapse = |s: T| spec.lapse(s).expect("lapse family");
    let mut out = Vec::new();
    let pre = |ok: bool| vec![("region", ok)];
    if let Some((_, c)) = ss_params(spec) {
        let th = ss_thresholds(spec)?;
        let s1 = ss_upper(spec)?;
        if s_b < th.quotient {
            let c1 = c1_constant(spec, s_a, n)?.value;
            out.push(InequalityReport::new(
                "ss_domain_i",
                vol,
                vec![("first", c1 * bvol), ("_c1", c1)],
                vec![("region", true), ("c1_positive", c1 > T::zero())],
                false,
                tol,
            ));
        }
        if s_a >= th.quotient && s_b < s1 {
            let first = s_b / ((nf - T::one()) * lapse(s_b).sqrt()) * bvol;
            out.push(InequalityReport::new("ss_domain_ii", vol, vec![("first", first)], pre(true), false, tol));
            if c < T::zero() {
                let first = bvol / ((-c).sqrt() * (nf - T::one()));
                out.push(InequalityReport::new("ss_domain_ii_hyperbolic", vol, vec![("first", first)], pre(true), false, tol));
            }
        }
    } else if matches!(spec.family, Family::ReissnerNordstrom { .. }) {
        let th = rn_thresholds(spec)?;
        let c2 = c2_constant(spec, s_a)?;
        let mut push = |name: &str, s: T| {
            let root = lapse(s).sqrt();
            out.push(InequalityReport::new(
                name,
                vol,
                vec![
                    ("first", s / ((nf - c2) * root) * bvol),
                    ("_c2", c2),
                    ("_flipped_sign", s / ((c2 - nf) * root) * bvol),
                ],
                vec![("region", true), ("c2_below_n", c2 < nf)],
                false,
                tol,
            ));
        };
        if s_a > th.s0 && s_b < th.s2 {
            push("rn_domain_i", s_a);
        }
        if s_a > th.s2 {
            push("rn_domain_ii", s_b);
        }
    } else {
        return Err(GeomError::WrongFamily(spec.family.name().into()));
    }
    if out.is_empty() {
        return Err(GeomError::RegionViolation(format!(
            "band ({}, {}) lies in no region of a domain bound",
            s_a.as_f64(),
            s_b.as_f64()
        )));
    }
    for report in &mut out {
        report.terms.insert("volume".into(), vol);
        report.terms.insert("boundary_volume".into(), bvol);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theo2Case {
    /// `u` nondecreasing: `2πA <= L² + A/(n-1) ∫ Ric(∇r)`.
    I,
    /// `u` nonincreasing, `scal_N >= 0`: `2πA <= L² + 2A/((n-1)(n-2)) ∫ (scal - 2 Ric(∇r))`.
    II,
}

/// Isoperimetric bound for minimal surfaces; `u(r) = r + h/h'`.
pub fn check_theo2<T: Real>(
    mesh: &SubmanifoldMesh<T>,
    profile: &WarpProfile<T>,
    case: Theo2Case,
    tol: &Tolerances,
) -> Result<InequalityReport<T>> {
    let mo = same_spec(mesh, profile)?;
    let spec = &mesh.spec;
    if mesh.k != 2 {
        return Err(GeomError::InvalidParameter(format!("surface needed, got k = {}", mesh.k)));
    }
    if mo.max_abs_h > T::of(1e-10) {
        return Err(GeomError::NotMinimal(mo.max_abs_h.as_f64()));
    }
    let (n, nf) = (spec.n, spec.nf());
    let lo = mesh.boundary.iter().fold(mo.r_min, |a, b| a.min(b.r));
    let hi = mesh.boundary.iter().fold(mo.r_max, |a, b| a.max(b.r));
    let unwanted = match case {
        Theo2Case::I => Sign::Negative,
        Theo2Case::II => Sign::Positive,
    };
    if hi > lo && u_monotonicity(profile, lo, hi)?.iter().any(|iv| iv.sign == unwanted) {
        return Err(GeomError::RegionViolation(format!(
            "u is not {} on [{}, {}]",
            if case == Theo2Case::I { "nondecreasing" } else { "nonincreasing" },
            lo.as_f64(),
            hi.as_f64()
        )));
    }
    let (a, l) = (mo.vol, mo.bvol);
    let two_pi = T::of(2.0) * T::PI();
    let int_ric = mesh.integrate(|x| ricci_from_jet(n, x.h, x.hpp));
    let pre = vec![
        ("regular_origin", spec.has_regular_origin()),
        ("nonempty_boundary", !mesh.boundary.is_empty()),
        ("fiber_scalar_nonnegative", fiber_scalar_curvature::<T>(n, spec.fiber) >= T::zero()),
    ];
    let (name, terms) = match case {
        Theo2Case::I => ("theo2_i", vec![("length_sq", l * l), ("ricci", a / (nf - T::one()) * int_ric)]),
        Theo2Case::II => {
            let int_scal = mesh.integrate(|x| scalar_from_jet(n, spec.fiber, x.h, x.hp, x.hpp));
            let coef = T::of(2.0) * a / ((nf - T::one()) * (nf - T::of(2.0)));
            ("theo2_ii", vec![("length_sq", l * l), ("curvature", coef * (int_scal - T::of(2.0) * int_ric))])
        }
    };
    let mut report = InequalityReport::new(name, two_pi * a, terms, pre, false, tol);
    report.terms.insert("area".into(), a);
    report.terms.insert("length".into(), l);
    Ok(report)
}
