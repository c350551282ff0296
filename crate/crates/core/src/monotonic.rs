//! Monotone volume functionals, lower volume bounds, growth fits, and the
//! large-radius expansions of the horizon families.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::quadrature::gauss_legendre;
use crate::regions::quotient_nondecreasing_on;
use crate::scalar::Real;
use crate::submanifolds::SubmanifoldMesh;
use crate::warping::{Family, WarpProfile};

/// Relative per-step decrease tolerated in a trace.
pub const TRACE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TraceKind {
    /// `e^{αr} h(r)^{-k} ∫_{Σ∩B_r} h`.
    V1,
    /// `e^{αr} h(r)^{-k} ∫_{Σ∩B_r} h'`.
    V2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct MonotoneTrace<T> {
    pub kind: TraceKind,
    pub alpha: T,
    pub r_values: Vec<T>,
    pub h_values: Vec<T>,
    pub v_values: Vec<T>,
    /// `|Σ ∩ B_r|`.
    pub volumes: Vec<T>,
    /// Lower bound for `|Σ ∩ B_r|` from the first nonzero `V`: `V(r0) e^{-αr} h^{k-1}`
    /// (V1) or `V(r0) e^{-αr} h^k / sup h'` (V2); zero before `r0`.
    pub lower_bounds: Vec<T>,
    /// Indices `i` with `V_i < V_{i-1}` beyond tolerance.
    pub violations: Vec<usize>,
}

impl<T: Real> MonotoneTrace<T> {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }

    /// `r,h,V,volume,lower_bound` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,h,V,volume,lower_bound\n");
        for i in 0..self.r_values.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.r_values[i], self.h_values[i], self.v_values[i], self.volumes[i], self.lower_bounds[i]
            ));
        }
        out
    }
}

/// Smallest admissible `α`: `k max |H|` over the mesh.
pub fn admissible_alpha<T: Real>(mesh: &SubmanifoldMesh<T>) -> T {
    let max_h = mesh.nodes.iter().fold(T::zero(), |a, x| a.max(x.mean_curvature));
    T::of_usize(mesh.k) * max_h
}

/// Hypotheses of the monotonicity statements on `[lo, hi]`: `h' > 0`,
/// `h/h'` nondecreasing, and either `k|H| <= α` or `<H, ∇r> >= 0`.
pub fn check_admissible<T: Real>(mesh: &SubmanifoldMesh<T>, profile: &WarpProfile<T>, alpha: T, lo: T, hi: T) -> Result<()> {
    if profile.spec() != &mesh.spec {
        return Err(GeomError::SpecMismatch);
    }
    if !(alpha >= T::zero()) {
        return Err(GeomError::InvalidParameter("alpha must be nonnegative".into()));
    }
    let bound = admissible_alpha(mesh);
    let star = mesh.nodes.iter().all(|x| x.mean_curvature_radial >= T::zero());
    if !(alpha >= bound * (T::one() - T::of(1e-12)) || star) {
        return Err(GeomError::PreconditionUnmet(format!(
            "alpha = {} below k max|H| = {} and <H, ∇r> changes sign",
            alpha.as_f64(),
            bound.as_f64()
        )));
    }
    let lo = lo.max(T::zero());
    if mesh.nodes.iter().any(|x| !(x.hp > T::zero())) {
        return Err(GeomError::PreconditionUnmet("h' vanishes on the mesh".into()));
    }
    if hi > lo && !quotient_nondecreasing_on(profile, lo, hi)? {
        return Err(GeomError::PreconditionUnmet(format!(
            "h/h' decreases somewhere on [{}, {}]",
            lo.as_f64(),
            hi.as_f64()
        )));
    }
    Ok(())
}

fn trace<T: Real>(
    mesh: &SubmanifoldMesh<T>,
    profile: &WarpProfile<T>,
    alpha: T,
    r_grid: &[T],
    kind: TraceKind,
) -> Result<MonotoneTrace<T>> {
    if r_grid.is_empty() || r_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(GeomError::InvalidParameter("trace radii must be strictly increasing".into()));
    }
    let lo = mesh.nodes.iter().fold(r_grid[0], |a, x| a.min(x.r));
    check_admissible(mesh, profile, alpha, lo, r_grid[r_grid.len() - 1])?;
    let k = mesh.k as i32;
    let rows: Vec<Result<(T, T, T)>> = r_grid
        .par_iter()
        .map(|&r| {
            let h = profile.h_at(r)?;
            let (vol, integral) = match mesh.truncate(profile, r) {
                Ok(cut) => {
                    let integral = match kind {
                        TraceKind::V1 => cut.integrate(|x| x.h),
                        TraceKind::V2 => cut.integrate(|x| x.hp),
                    };
                    (cut.integrate(|_| T::one()), integral)
                }
                Err(GeomError::EmptyResult(_)) => (T::zero(), T::zero()),
                Err(e) => return Err(e),
            };
            Ok((h, (alpha * r).exp() / h.powi(k) * integral, vol))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    if rows.iter().all(|row| row.2 == T::zero()) {
        return Err(GeomError::EmptyResult("no trace radius meets the mesh".into()));
    }
    let v_values: Vec<T> = rows.iter().map(|row| row.1).collect();
    let tol = T::of(TRACE_TOL);
    let violations = (1..v_values.len()).filter(|&i| v_values[i] - v_values[i - 1] < -tol * v_values[i - 1].abs()).collect();
    let start = rows.iter().position(|row| row.2 > T::zero()).unwrap_or(0);
    let mut lower_bounds = vec![T::zero(); r_grid.len()];
    let mut slope = T::zero();
    for i in start..r_grid.len() {
        let lo = if i == start { r_grid[i] } else { r_grid[i - 1] };
        for &x in profile.r_grid().iter().filter(|&&x| x > lo && x < r_grid[i]).chain([&lo, &r_grid[i]]) {
            slope = slope.max(profile.h_prime_at(x)?);
        }
        let h = rows[i].0;
        let decay = (-alpha * r_grid[i]).exp() * v_values[start];
        lower_bounds[i] = match kind {
            TraceKind::V1 => decay * h.powi(k - 1),
            TraceKind::V2 => decay * h.powi(k) / slope,
        };
    }
    Ok(MonotoneTrace {
        kind,
        alpha,
        r_values: r_grid.to_vec(),
        h_values: rows.iter().map(|row| row.0).collect(),
        v_values,
        volumes: rows.iter().map(|row| row.2).collect(),
        lower_bounds,
        violations,
    })
}

pub fn trace_v1<T: Real>(mesh: &SubmanifoldMesh<T>, profile: &WarpProfile<T>, alpha: T, r_grid: &[T]) -> Result<MonotoneTrace<T>> {
    trace(mesh, profile, alpha, r_grid, TraceKind::V1)
}

pub fn trace_v2<T: Real>(mesh: &SubmanifoldMesh<T>, profile: &WarpProfile<T>, alpha: T, r_grid: &[T]) -> Result<MonotoneTrace<T>> {
    trace(mesh, profile, alpha, r_grid, TraceKind::V2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct LowerBound<T> {
    pub value: T,
    pub applicable: bool,
    /// `value <= measured` (vacuous when not applicable).
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct LowerBounds<T> {
    pub r0: T,
    pub r: T,
    /// `|Σ ∩ B_r|`.
    pub measured: T,
    /// `sup h'` on `[r0, r]`, the constant `B`.
    pub slope_bound: T,
    pub bounds: BTreeMap<String, LowerBound<T>>,
}

/// The three lower bounds for `|Σ ∩ B_r|` in terms of `h(r)`, built from
/// `C1(r0)` and `C2(r0)`.
pub fn lower_bounds<T: Real>(
    mesh: &SubmanifoldMesh<T>,
    profile: &WarpProfile<T>,
    alpha: T,
    r0: T,
    r: T,
) -> Result<LowerBounds<T>> {
    if !(r > r0) {
        return Err(GeomError::PreconditionUnmet("need r > r0".into()));
    }
    let lo = mesh.nodes.iter().fold(r0, |a, x| a.min(x.r));
    check_admissible(mesh, profile, alpha, lo, r)?;
    let k = mesh.k as i32;
    let at0 = mesh.truncate(profile, r0)?;
    let cut = mesh.truncate(profile, r)?;
    let (h0, h) = (profile.h_at(r0)?, profile.h_at(r)?);
    let c1 = (alpha * r0).exp() / h0.powi(k) * at0.integrate(|x| x.h);
    let c2 = (alpha * r0).exp() / h0.powi(k) * at0.integrate(|x| x.hp);
    let measured = cut.integrate(|_| T::one());
    let decay = (-alpha * r).exp();
    // sup of h' and inf of h'' over the tabulated nodes in [r0, r] and the ends
    let mut radii: Vec<T> = profile.r_grid().iter().copied().filter(|&x| x > r0 && x < r).collect();
    radii.push(r0);
    radii.push(r);
    let mut slope_bound = T::zero();
    let mut convex = true;
    for &x in &radii {
        let (_, hp, hpp) = profile.jet(x)?;
        slope_bound = slope_bound.max(hp);
        convex &= hpp > T::zero();
    }
    let hp_r = profile.h_prime_at(r)?;
    // equality cases (flat planes) land on the bound up to quadrature roundoff
    let slack = T::of(TRACE_TOL) * measured.abs();
    let entry = |value: T, applicable: bool| LowerBound { value, applicable, pass: !applicable || value <= measured + slack };
    let mut bounds = BTreeMap::new();
    bounds.insert("est_mono_1".to_string(), entry(c1 * decay * h.powi(k - 1), true));
    bounds.insert("est_mono_2".to_string(), entry(c2 / slope_bound * decay * h.powi(k), slope_bound > T::zero()));
    bounds.insert("est_mono_3".to_string(), entry(c2 / hp_r * decay * h.powi(k), convex));
    Ok(LowerBounds { r0, r, measured, slope_bound, bounds })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GrowthModel {
    /// `log |Σ∩B_r|` linear in `r`.
    Exponential,
    /// `log |Σ∩B_r|` linear in `log h(r)`.
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct GrowthFit<T> {
    pub model: GrowthModel,
    /// Fitted rate (exponential) or order (polynomial).
    pub value: T,
    pub fit_window: (T, T),
    /// Root-mean-square residual of the log fit.
    pub residual: T,
    pub reference: T,
    /// Polynomial: `|value - reference| <= 0.1 reference`. Exponential:
    /// `value >= 0.9 reference`, since only a lower rate is asserted.
    pub matches: bool,
}

/// Least-squares line `y = a + b x`; returns `(a, b, rms)`.
pub(crate) fn fit_line<T: Real>(xs: &[T], ys: &[T]) -> (T, T, T) {
    let nf = T::of_usize(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / nf;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / nf;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss = xs.iter().zip(ys).fold(T::zero(), |acc, (&x, &y)| {
        let e = y - a - b * x;
        acc + e * e
    });
    (a, b, (ss / nf).sqrt())
}

/// Fits the growth of `volumes` over `r_values`. Polynomial fits use the last
/// decade of `h`; exponential fits use the last half of the radii.
pub fn growth_classify<T: Real>(
    r_values: &[T],
    volumes: &[T],
    profile: &WarpProfile<T>,
    model: GrowthModel,
    reference: T,
) -> Result<GrowthFit<T>> {
    if r_values.len() != volumes.len() || r_values.len() < 4 {
        return Err(GeomError::WindowTooSmall("need at least 4 trace points".into()));
    }
    let r_last = r_values[r_values.len() - 1];
    let keep: Vec<usize> = match model {
        GrowthModel::Polynomial => {
            let h_last = profile.h_at(r_last)?;
            let h_first = profile.h_at(r_values[0])?;
            if !(h_last >= T::of(10.0) * h_first) {
                return Err(GeomError::WindowTooSmall(format!(
                    "h spans {} to {}, less than a decade",
                    h_first.as_f64(),
                    h_last.as_f64()
                )));
            }
            let floor = h_last / T::of(10.0);
            (0..r_values.len()).filter(|&i| profile.h_at(r_values[i]).is_ok_and(|h| h >= floor)).collect()
        }
        GrowthModel::Exponential => {
            let mid = (r_values[0] + r_last) / T::of(2.0);
            (0..r_values.len()).filter(|&i| r_values[i] >= mid).collect()
        }
    };
    let keep: Vec<usize> = keep.into_iter().filter(|&i| volumes[i] > T::zero()).collect();
    if keep.len() < 4 {
        return Err(GeomError::WindowTooSmall(format!("{} usable points in the fit window", keep.len())));
    }
    let xs: Vec<T> = keep
        .iter()
        .map(|&i| match model {
            GrowthModel::Polynomial => profile.h_at(r_values[i]).map(|h| h.ln()),
            GrowthModel::Exponential => Ok(r_values[i]),
        })
        .collect::<Result<_>>()?;
    let ys: Vec<T> = keep.iter().map(|&i| volumes[i].ln()).collect();
    let (_, slope, rms) = fit_line(&xs, &ys);
    Ok(GrowthFit {
        model,
        value: slope,
        fit_window: (r_values[keep[0]], r_values[keep[keep.len() - 1]]),
        residual: rms,
        reference,
        matches: match model {
            GrowthModel::Polynomial => (slope - reference).abs() <= T::of(0.1) * reference.abs(),
            GrowthModel::Exponential => slope >= T::of(0.9) * reference,
        },
    })
}

/// Decay of `h` minus its leading large-radius terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct AsymptoticReport<T> {
    pub family: String,
    /// `C = lim (r(s) - L^{-1}(s))`, where `L` is the leading term; the
    /// expansion variable is `ρ = r - C`.
    pub shift: T,
    /// Window of the expansion variable (`S = sinh(√-c ρ)/√-c` or `ρ`).
    pub window: (T, T),
    pub expected_order: T,
    /// Log-log slope of the residual; `None` when the residual vanishes.
    pub fitted_order: Option<T>,
    pub expected_coefficient: T,
    /// Intercept of `(h - L)/L^{p}` regressed on `L^{-2}` (`p = 1-n` or `3-n`).
    pub fitted_coefficient: T,
    pub max_residual: T,
}

/// `∫_a^∞ g` via `t = a/u`.
fn tail_integral<T: Real>(g: impl Fn(T) -> T, a: T) -> T {
    let rule = gauss_legendre::<T>(32);
    let panels = 16;
    let width = T::one() / T::of_usize(panels);
    let mut acc = T::zero();
    for p in 0..panels {
        let lo = width * T::of_usize(p);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let u = lo + width * (x + T::one()) / T::of(2.0);
            acc = acc + w * width / T::of(2.0) * g(a / u) * a / (u * u);
        }
    }
    acc
}

const ASYMPTOTIC_SAMPLES: usize = 64;

/// Checks `h = S + m/(2n√-c) sinh^{1-n}(√-c ρ) + O(S^{-n-1})` (de Sitter–
/// Schwarzschild, `c < 0`) or `h = ρ + m/(2(n-3)) ρ^{3-n} + O(ρ^{5-2n})`
/// (Reissner–Nordström, `n >= 4`) over the outer part of the profile.
pub fn asymptotic_check<T: Real>(profile: &WarpProfile<T>) -> Result<AsymptoticReport<T>> {
    let spec = *profile.spec();
    let (n, nf) = (spec.n, spec.nf());
    let two = T::of(2.0);
    let family = spec.family.name().to_string();
    if let Family::SpaceForm { .. } = spec.family {
        let max_residual = profile
            .r_grid()
            .iter()
            .zip(profile.h_values())
            .map(|(&r, &h)| (h - crate::warping::closed_h(&spec.family, r)).abs())
            .fold(T::zero(), T::max);
        let s = profile.s_max();
        return Ok(AsymptoticReport {
            family,
            shift: T::zero(),
            window: (s / T::of(10.0), s),
            expected_order: T::zero(),
            fitted_order: None,
            expected_coefficient: T::zero(),
            fitted_coefficient: T::zero(),
            max_residual,
        });
    }
    let s0 = profile.s_min();
    let s_top = profile.s_max();
    if !(s_top >= T::of(49.0) * s0) {
        return Err(GeomError::WindowTooSmall(format!("profile reaches h = {}, need 50 s0", s_top.as_f64())));
    }
    // leading term L, its inverse, and F' - (L^{-1})' written without cancellation
    type Map<T> = Box<dyn Fn(T) -> T>;
    let (lead, lead_inv, diff, coef, expected_order, power): (Map<T>, Map<T>, Map<T>, T, T, T) = match spec.family {
        Family::DeSitterSchwarzschild { m, c } if c < T::zero() => {
            let a = (-c).sqrt();
            (
                Box::new(move |rho: T| (a * rho).sinh() / a),
                Box::new(move |s: T| (a * s).asinh() / a),
                Box::new(move |t: T| {
                    let big = T::one() - c * t * t;
                    let small = big - m * t.powf(two - nf);
                    m * t.powf(two - nf) / (small.sqrt() * big.sqrt() * (small.sqrt() + big.sqrt()))
                }),
                m / (two * nf * a.powf(nf)),
                -(nf + T::one()),
                T::one() - nf,
            )
        }
        Family::ReissnerNordstrom { m, q } if n >= 4 => (
            Box::new(|rho: T| rho),
            Box::new(|s: T| s),
            Box::new(move |t: T| {
                let u = t.powf(two - nf);
                let lapse = T::one() - m * u + q * q * u * u;
                (m * u - q * q * u * u) / (lapse.sqrt() * (T::one() + lapse.sqrt()))
            }),
            m / (two * (nf - T::of(3.0))),
            T::of(5.0) - two * nf,
            T::of(3.0) - nf,
        ),
        _ => return Err(GeomError::WrongFamily(format!("no expansion for {family} with these parameters"))),
    };
    let shift = profile.radial_coordinate(s_top)? - lead_inv(s_top) + tail_integral(&diff, s_top);
    // window in h: last decade, kept clear of the horizon
    let h_lo = (s_top / T::of(10.0)).max(T::of(4.0) * s0);
    let r_lo = profile.radial_coordinate(h_lo)?;
    let r_hi = profile.r_max();
    let (mut xs, mut ys, mut cx, mut cy) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut max_residual = T::zero();
    for i in 0..ASYMPTOTIC_SAMPLES {
        let frac = T::of_usize(i) / T::of_usize(ASYMPTOTIC_SAMPLES - 1);
        let r = (r_lo.ln() + frac * (r_hi.ln() - r_lo.ln())).exp();
        let h = profile.h_at(r)?;
        let big = lead(r - shift);
        let first = h - big;
        let residual = first - coef * big.powf(power);
        max_residual = max_residual.max(residual.abs());
        xs.push(big.ln());
        ys.push(residual.abs().ln());
        cx.push(big.powi(-2));
        cy.push(first / big.powf(power));
    }
    let (_, order, _) = fit_line(&xs, &ys);
    let (intercept, _, _) = fit_line(&cx, &cy);
    Ok(AsymptoticReport {
        family,
        shift,
        window: (lead(r_lo - shift), lead(r_hi - shift)),
        expected_order,
        fitted_order: Some(order),
        expected_coefficient: coef,
        fitted_coefficient: intercept,
        max_residual,
    })
}
