use crate::error::{GeomError, Result};
use crate::interp::MonotoneCubic;
use crate::quadrature::{gauss_legendre, Rule};
use crate::roots::bisect;
use crate::scalar::Real;

use super::spec::{ConstraintCheck, DomainEndpoints, Endpoint, Family, ManifoldSpec};

/// Smallest accepted tabulation size.
pub const MIN_RESOLUTION: usize = 64;
/// Default tabulation size.
pub const DEFAULT_RESOLUTION: usize = 4096;
/// Default outer area radius of horizon families, in units of `s0`.
pub const DEFAULT_EXTENT_FACTOR: f64 = 50.0;
/// Fraction of `(s0, s1)` usable when the outer horizon `s1` is finite.
const OUTER_HORIZON_MARGIN: f64 = 1e-2;
/// Relative margin kept from a finite end of a closed-form radial domain.
const CLOSED_FORM_MARGIN: f64 = 1e-6;
const PANEL_RULE: usize = 8;

/// How far the profile extends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileRange<T> {
    /// Family default: `h(r_max) = 50 s0` for horizon families.
    Default,
    /// Explicit outer geodesic radius.
    RMax(T),
    /// Explicit outer area radius `h(r_max)`.
    SMax(T),
}

/// Stable evaluation of the lapse `f(s) = h'(r)²` near its inner zero `s0`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Lapse<T> {
    n: T,
    m: T,
    c: T,
    q2: T,
    s0: T,
}

impl<T: Real> Lapse<T> {
    /// `f(s0 + δ) / δ`, written with `expm1`/`ln1p` so the cancellation
    /// against `f(s0) = 0` never happens in floating point.
    fn ratio(&self, delta: T) -> T {
        let two = T::of(2.0);
        let s0 = self.s0;
        let n = self.n;
        if delta == T::zero() {
            return self.m * (n - two) * s0.powf(T::one() - n) - two * self.c * s0
                - (two * n - T::of(4.0)) * self.q2 * s0.powf(T::of(3.0) - two * n);
        }
        let l = (delta / s0).ln_1p();
        let a = s0.powf(two - n) * ((two - n) * l).exp_m1();
        let b = s0.powf(T::of(4.0) - two * n) * ((T::of(4.0) - two * n) * l).exp_m1();
        (-self.m * a - self.c * delta * (two * s0 + delta) + self.q2 * b) / delta
    }

    /// `dr/dτ` with `s = s0 + τ²`.
    fn dr_dtau(&self, tau: T) -> T {
        T::of(2.0) / self.ratio(tau * tau).sqrt()
    }

    /// `h''/h` at area radius `s`.
    fn second_over_h(&self, s: T) -> T {
        let two = T::of(2.0);
        let n = self.n;
        let u = s.powf(two - n);
        (n - two) / two * u / (s * s) * (self.m - two * self.q2 * u) - self.c
    }
}

#[derive(Debug, Clone, PartialEq)]
struct RadialTable<T> {
    lapse: Lapse<T>,
    tau: Vec<T>,
    r: Vec<T>,
    inverse: MonotoneCubic<T>,
    rule: Rule<T>,
}

impl<T: Real> RadialTable<T> {
    fn build(lapse: Lapse<T>, tau_max: T, nodes: usize) -> Self {
        let rule = gauss_legendre(PANEL_RULE);
        let tau: Vec<T> = (0..nodes).map(|i| tau_max * T::of_usize(i) / T::of_usize(nodes - 1)).collect();
        let mut r = Vec::with_capacity(nodes);
        r.push(T::zero());
        for i in 1..nodes {
            let prev = r[i - 1];
            r.push(prev + partial(&lapse, &rule, tau[i - 1], tau[i]));
        }
        let slopes = tau.iter().map(|&t| T::one() / lapse.dr_dtau(t)).collect();
        let inverse = MonotoneCubic::with_slopes(r.clone(), tau.clone(), slopes);
        RadialTable { lapse, tau, r, inverse, rule }
    }

    fn r_max(&self) -> T {
        *self.r.last().expect("nonempty table")
    }

    fn tau_of_r(&self, r: T) -> T {
        let i = self.inverse.locate(r);
        let (lo, hi) = (self.tau[i], self.tau[i + 1]);
        let mut t = self.inverse.eval(r).max(lo).min(hi);
        for _ in 0..8 {
            let residual = self.r[i] + partial(&self.lapse, &self.rule, lo, t) - r;
            let step = residual / self.lapse.dr_dtau(t);
            let next = (t - step).max(lo).min(hi);
            let done = (next - t).abs() <= T::epsilon() * T::of(2.0) * hi;
            t = next;
            if done {
                break;
            }
        }
        t
    }

    fn r_of_tau(&self, tau: T) -> T {
        let i = match self.tau.binary_search_by(|v| v.partial_cmp(&tau).expect("finite")) {
            Ok(i) => return self.r[i],
            Err(i) => (i.max(1) - 1).min(self.tau.len() - 2),
        };
        self.r[i] + partial(&self.lapse, &self.rule, self.tau[i], tau)
    }
}

fn partial<T: Real>(lapse: &Lapse<T>, rule: &Rule<T>, a: T, b: T) -> T {
    let half = (b - a) / T::of(2.0);
    let mid = (a + b) / T::of(2.0);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .fold(T::zero(), |acc, (&x, &w)| acc + w * lapse.dr_dtau(mid + half * x))
        * half
}

#[derive(Debug, Clone, PartialEq)]
enum Model<T> {
    Closed,
    Radial(RadialTable<T>),
}

/// Tabulated warping function `h` on `[0, r_max]`.
///
/// Horizon families store `r = F(s)` on a grid uniform in `τ = sqrt(s - s0)`,
/// invert it with a monotone cubic, and polish by Newton iteration against the
/// exact integral. Closed-form families evaluate directly.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpProfile<T> {
    spec: ManifoldSpec<T>,
    checks: Vec<ConstraintCheck>,
    model: Model<T>,
    r_grid: Vec<T>,
    h: Vec<T>,
    h_prime: Vec<T>,
    h_second: Vec<T>,
    r_max: T,
    domain: DomainEndpoints<T>,
}

impl<T: Real> WarpProfile<T> {
    pub fn build(spec: &ManifoldSpec<T>, range: ProfileRange<T>, resolution: usize) -> Result<Self> {
        let validated = spec.validate()?;
        if resolution < MIN_RESOLUTION {
            return Err(GeomError::InvalidParameter(format!(
                "resolution {resolution} below minimum {MIN_RESOLUTION}"
            )));
        }
        if spec.is_horizon_family() {
            Self::build_radial(spec, validated.checks, range, resolution)
        } else {
            Self::build_closed(spec, validated.checks, range, resolution)
        }
    }

    pub fn with_default_range(spec: &ManifoldSpec<T>) -> Result<Self> {
        Self::build(spec, ProfileRange::Default, DEFAULT_RESOLUTION)
    }

    fn build_radial(
        spec: &ManifoldSpec<T>,
        checks: Vec<ConstraintCheck>,
        range: ProfileRange<T>,
        resolution: usize,
    ) -> Result<Self> {
        let domain = spec.domain_endpoints()?;
        let s0 = domain.s0;
        let (m, c, q2) = match spec.family {
            Family::DeSitterSchwarzschild { m, c } => (m, c, T::zero()),
            Family::ReissnerNordstrom { m, q } => (m, T::zero(), q * q),
            _ => unreachable!("horizon family"),
        };
        let lapse = Lapse { n: spec.nf(), m, c, q2, s0 };
        let s_cap = match domain.s1 {
            Endpoint::Finite(s1) => s0 + (T::one() - T::of(OUTER_HORIZON_MARGIN)) * (s1 - s0),
            Endpoint::Infinite => T::infinity(),
        };
        let exceeded = |what: String| Err(GeomError::DomainExceeded(what));
        let tau_max = match range {
            ProfileRange::Default => (s_cap.min(T::of(DEFAULT_EXTENT_FACTOR) * s0) - s0).sqrt(),
            ProfileRange::SMax(s) => {
                if !(s > s0) || s > s_cap {
                    return exceeded(format!("s_max {} not in ({}, {}]", s.as_f64(), s0.as_f64(), s_cap.as_f64()));
                }
                (s - s0).sqrt()
            }
            ProfileRange::RMax(r) => {
                if !(r > T::zero()) || !r.is_finite() {
                    return exceeded(format!("r_max {} must be positive", r.as_f64()));
                }
                // grow the coarse table until it reaches r
                let mut s_try = s_cap.min(s0 + r);
                let coarse = loop {
                    let table = RadialTable::build(lapse, (s_try - s0).sqrt(), 257);
                    if table.r_max() >= r {
                        break table;
                    }
                    if s_try >= s_cap || !s_try.is_finite() {
                        return exceeded(format!(
                            "r_max {} beyond usable radius {}",
                            r.as_f64(),
                            table.r_max().as_f64()
                        ));
                    }
                    s_try = s_cap.min(s0 + T::of(4.0) * (s_try - s0));
                };
                let tau_cap = (s_try - s0).sqrt();
                bisect(|t| coarse.r_of_tau(t) - r, T::zero(), tau_cap, T::zero())?
            }
        };
        let table = RadialTable::build(lapse, tau_max, resolution);
        let r_grid = table.r.clone();
        let h: Vec<T> = table.tau.iter().map(|&t| s0 + t * t).collect();
        let h_prime = table.tau.iter().map(|&t| t * lapse.ratio(t * t).sqrt()).collect();
        let h_second = h.iter().map(|&s| s * lapse.second_over_h(s)).collect();
        if !r_grid.iter().all(|r| r.is_finite()) {
            return Err(GeomError::IntegrationFailure("non-finite radial coordinate".into()));
        }
        let r_max = table.r_max();
        Ok(WarpProfile { spec: *spec, checks, model: Model::Radial(table), r_grid, h, h_prime, h_second, r_max, domain })
    }

    fn build_closed(
        spec: &ManifoldSpec<T>,
        checks: Vec<ConstraintCheck>,
        range: ProfileRange<T>,
        resolution: usize,
    ) -> Result<Self> {
        let end = closed_radial_end(&spec.family);
        let default_r = match spec.family {
            Family::SpaceForm { c } if c < T::zero() => T::of(10.0) / (-c).sqrt(),
            Family::SpaceForm { c } if c == T::zero() => T::of(10.0),
            Family::PowerPerturbed { b, p } if b > T::zero() => T::of(2.0) * b.powf(-T::one() / p),
            Family::ArctanCylinder { k } => T::of(20.0) / k,
            Family::RationalDecayCylinder { a, p } => T::of(20.0) * a.powf(-T::one() / p),
            Family::LogFactor { a } => T::of(20.0) / a.sqrt(),
            _ => end,
        };
        let mut skeleton = WarpProfile {
            spec: *spec,
            checks,
            model: Model::Closed,
            r_grid: Vec::new(),
            h: Vec::new(),
            h_prime: Vec::new(),
            h_second: Vec::new(),
            r_max: end,
            domain: DomainEndpoints { s0: T::zero(), s1: Endpoint::Infinite },
        };
        let r_max = match range {
            ProfileRange::Default => default_r,
            ProfileRange::RMax(r) => {
                if !(r > T::zero()) || r > end {
                    return Err(GeomError::DomainExceeded(format!(
                        "r_max {} not in (0, {}]",
                        r.as_f64(),
                        end.as_f64()
                    )));
                }
                r
            }
            ProfileRange::SMax(s) => {
                let top = if end.is_finite() { closed_h(&spec.family, end) } else { T::infinity() };
                if !(s > T::zero()) || s > top {
                    return Err(GeomError::DomainExceeded(format!("s_max {} not in (0, {}]", s.as_f64(), top.as_f64())));
                }
                skeleton.r_max = if end.is_finite() { end } else { T::max_value() };
                skeleton.invert_closed(s)?
            }
        };
        let s1 = if end.is_finite() { Endpoint::Finite(closed_h(&spec.family, end)) } else { Endpoint::Infinite };
        let f = spec.family;
        let r_grid: Vec<T> = (0..resolution).map(|i| r_max * T::of_usize(i) / T::of_usize(resolution - 1)).collect();
        let h = r_grid.iter().map(|&r| closed_h(&f, r)).collect();
        let h_prime = r_grid.iter().map(|&r| closed_hp(&f, r)).collect();
        let h_second = r_grid.iter().map(|&r| closed_hpp(&f, r)).collect();
        Ok(WarpProfile {
            r_grid,
            h,
            h_prime,
            h_second,
            r_max,
            domain: DomainEndpoints { s0: T::zero(), s1 },
            ..skeleton
        })
    }

    fn invert_closed(&self, s: T) -> Result<T> {
        let f = self.spec.family;
        match f {
            Family::SpaceForm { c } if c == T::zero() => Ok(s),
            Family::SpaceForm { c } if c < T::zero() => Ok((s * (-c).sqrt()).asinh() / (-c).sqrt()),
            Family::SpaceForm { c } => Ok((s * c.sqrt()).asin() / c.sqrt()),
            Family::ArctanCylinder { k } => Ok((k * s).tan() / k),
            _ => {
                let mut hi = if self.r_max.is_finite() && self.r_max < T::max_value() { self.r_max } else { T::one() };
                while closed_h(&f, hi) < s {
                    hi = hi * T::of(2.0);
                    if !hi.is_finite() {
                        return Err(GeomError::RootBracketingFailure("area radius not reached".into()));
                    }
                }
                bisect(|r| closed_h(&f, r) - s, T::zero(), hi, T::zero())
            }
        }
    }

    pub fn spec(&self) -> &ManifoldSpec<T> {
        &self.spec
    }

    pub fn checks(&self) -> &[ConstraintCheck] {
        &self.checks
    }

    pub fn r_grid(&self) -> &[T] {
        &self.r_grid
    }

    pub fn h_values(&self) -> &[T] {
        &self.h
    }

    pub fn h_prime_values(&self) -> &[T] {
        &self.h_prime
    }

    pub fn h_second_values(&self) -> &[T] {
        &self.h_second
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    pub fn resolution(&self) -> usize {
        self.r_grid.len()
    }

    /// Area radii where the model lives: `(s0, s1)` for horizon families,
    /// `(0, sup h)` otherwise.
    pub fn domain(&self) -> DomainEndpoints<T> {
        self.domain
    }

    /// `h(0)`.
    pub fn s_min(&self) -> T {
        self.h[0]
    }

    /// `h(r_max)`.
    pub fn s_max(&self) -> T {
        *self.h.last().expect("nonempty grid")
    }

    fn check_r(&self, r: T) -> Result<T> {
        let slack = self.r_max * T::epsilon() * T::of(16.0);
        if !(r >= T::zero()) || r > self.r_max + slack {
            return Err(GeomError::OutOfDomain { value: r.as_f64(), lo: 0.0, hi: self.r_max.as_f64() });
        }
        Ok(r.min(self.r_max))
    }

    pub fn h_at(&self, r: T) -> Result<T> {
        let r = self.check_r(r)?;
        Ok(match &self.model {
            Model::Closed => closed_h(&self.spec.family, r),
            Model::Radial(t) => {
                let tau = t.tau_of_r(r);
                t.lapse.s0 + tau * tau
            }
        })
    }

    pub fn h_prime_at(&self, r: T) -> Result<T> {
        let r = self.check_r(r)?;
        Ok(match &self.model {
            Model::Closed => closed_hp(&self.spec.family, r),
            Model::Radial(t) => {
                let tau = t.tau_of_r(r);
                tau * t.lapse.ratio(tau * tau).sqrt()
            }
        })
    }

    pub fn h_second_at(&self, r: T) -> Result<T> {
        let r = self.check_r(r)?;
        Ok(match &self.model {
            Model::Closed => closed_hpp(&self.spec.family, r),
            Model::Radial(t) => {
                let tau = t.tau_of_r(r);
                let s = t.lapse.s0 + tau * tau;
                s * t.lapse.second_over_h(s)
            }
        })
    }

    /// `(h, h', h'')` at `r`, sharing one inversion for horizon families.
    pub fn jet(&self, r: T) -> Result<(T, T, T)> {
        let r = self.check_r(r)?;
        Ok(match &self.model {
            Model::Closed => {
                let f = &self.spec.family;
                (closed_h(f, r), closed_hp(f, r), closed_hpp(f, r))
            }
            Model::Radial(t) => {
                let tau = t.tau_of_r(r);
                let s = t.lapse.s0 + tau * tau;
                (s, tau * t.lapse.ratio(tau * tau).sqrt(), s * t.lapse.second_over_h(s))
            }
        })
    }

    /// Geodesic radius `r` with `h(r) = s`.
    pub fn radial_coordinate(&self, s: T) -> Result<T> {
        let (lo, hi) = (self.s_min(), self.s_max());
        let slack = hi * T::epsilon() * T::of(16.0);
        if !(s >= lo - slack) || s > hi + slack {
            return Err(GeomError::OutOfDomain { value: s.as_f64(), lo: lo.as_f64(), hi: hi.as_f64() });
        }
        let s = s.max(lo).min(hi);
        match &self.model {
            Model::Closed => self.invert_closed(s).map(|r| r.min(self.r_max)),
            Model::Radial(t) => Ok(t.r_of_tau((s - t.lapse.s0).max(T::zero()).sqrt())),
        }
    }

    /// Whether the profile is from a horizon family.
    pub fn is_tabulated(&self) -> bool {
        matches!(self.model, Model::Radial(_))
    }
}

/// End of the radial domain of a closed-form family, inset by a relative margin
/// where finite. For positive curvature this is the hemisphere radius, past
/// which `h'` turns negative.
fn closed_radial_end<T: Real>(f: &Family<T>) -> T {
    let inset = T::one() - T::of(CLOSED_FORM_MARGIN);
    match *f {
        Family::SpaceForm { c } if c > T::zero() => inset * T::FRAC_PI_2() / c.sqrt(),
        Family::PowerPerturbed { b, p } if b < T::zero() => {
            inset * ((p + T::one()) * (-b)).powf(-T::one() / p)
        }
        _ => T::infinity(),
    }
}

pub(crate) fn closed_h<T: Real>(f: &Family<T>, r: T) -> T {
    match *f {
        Family::SpaceForm { c } => {
            if c == T::zero() {
                r
            } else if c < T::zero() {
                let k = (-c).sqrt();
                (k * r).sinh() / k
            } else {
                let k = c.sqrt();
                (k * r).sin() / k
            }
        }
        Family::PowerPerturbed { b, p } => r + b * r.powf(p + T::one()),
        Family::ArctanCylinder { k } => (k * r).atan() / k,
        Family::RationalDecayCylinder { a, p } => r / (T::one() + a * r.powf(p)).powf(T::one() / p),
        Family::LogFactor { a } => r * (a * r * r + T::E()).ln(),
        _ => unreachable!("closed-form family"),
    }
}

fn closed_hp<T: Real>(f: &Family<T>, r: T) -> T {
    match *f {
        Family::SpaceForm { c } => {
            if c == T::zero() {
                T::one()
            } else if c < T::zero() {
                ((-c).sqrt() * r).cosh()
            } else {
                (c.sqrt() * r).cos()
            }
        }
        Family::PowerPerturbed { b, p } => T::one() + b * (p + T::one()) * r.powf(p),
        Family::ArctanCylinder { k } => T::one() / (T::one() + k * k * r * r),
        Family::RationalDecayCylinder { a, p } => (T::one() + a * r.powf(p)).powf(-T::one() - T::one() / p),
        Family::LogFactor { a } => {
            let w = a * r * r + T::E();
            w.ln() + T::of(2.0) * a * r * r / w
        }
        _ => unreachable!("closed-form family"),
    }
}

fn closed_hpp<T: Real>(f: &Family<T>, r: T) -> T {
    let two = T::of(2.0);
    match *f {
        Family::SpaceForm { c } => -c * closed_h(f, r),
        Family::PowerPerturbed { b, p } => {
            if r == T::zero() {
                return T::zero();
            }
            b * (p + T::one()) * p * r.powf(p - T::one())
        }
        Family::ArctanCylinder { k } => {
            let w = T::one() + k * k * r * r;
            -two * k * k * r / (w * w)
        }
        Family::RationalDecayCylinder { a, p } => {
            if r == T::zero() {
                return T::zero();
            }
            -(p + T::one()) * a * r.powf(p - T::one()) / (T::one() + a * r.powf(p)).powf(two + T::one() / p)
        }
        Family::LogFactor { a } => {
            let w = a * r * r + T::E();
            two * a * r / w + T::of(4.0) * a * r * T::E() / (w * w)
        }
        _ => unreachable!("closed-form family"),
    }
}
