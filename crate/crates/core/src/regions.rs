//! Radial thresholds, sign regions, and the constants `C1`, `C2`.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::roots::{scan_roots, SCAN_SAMPLES};
use crate::scalar::Real;
use crate::warping::{Family, ManifoldSpec, WarpProfile};

/// Bisection tolerance for sign-change points.
pub const SIGN_CHANGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of<T: Real>(x: T) -> Sign {
        if x > T::zero() {
            Sign::Positive
        } else if x < T::zero() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// `(m, c)` for de Sitter–Schwarzschild, with space forms read as `m = 0`.
pub(crate) fn ss_params<T: Real>(spec: &ManifoldSpec<T>) -> Option<(T, T)> {
    match spec.family {
        Family::DeSitterSchwarzschild { m, c } => Some((m, c)),
        Family::SpaceForm { c } => Some((T::zero(), c)),
        _ => None,
    }
}

fn rn_params<T: Real>(spec: &ManifoldSpec<T>) -> Result<(T, T)> {
    match spec.family {
        Family::ReissnerNordstrom { m, q } => Ok((m, q)),
        _ => Err(GeomError::WrongFamily(spec.family.name().into())),
    }
}

/// Area radii where the de Sitter–Schwarzschild bounds change form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct SsThresholds<T> {
    /// `(mn/2)^{1/(n-2)}`: `h/h'` decreases below it and increases above.
    pub quotient: T,
    /// `(m(n-2)/(2c))^{1/n}` when `c > 0`: `Ric(∇r,∇r) >= 0` below, `<= 0` above.
    pub ricci: Option<T>,
}

pub fn ss_thresholds<T: Real>(spec: &ManifoldSpec<T>) -> Result<SsThresholds<T>> {
    spec.validate()?;
    let (m, c) = ss_params(spec).ok_or_else(|| GeomError::WrongFamily(spec.family.name().into()))?;
    let nf = spec.nf();
    let two = T::of(2.0);
    let quotient = if m == T::zero() { T::zero() } else { (m * nf / two).powf(T::one() / (nf - two)) };
    let ricci = (c > T::zero()).then(|| (m * (nf - two) / (two * c)).powf(T::one() / nf));
    Ok(SsThresholds { quotient, ricci })
}

/// Roots of `P(u) = 1 - (mn/2)u + (n-1)q²u²` and `Q(u) = 1 - mu + q²u²` and
/// the area radii they induce, `s = u^{-1/(n-2)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct RnThresholds<T> {
    pub alpha1: T,
    pub alpha2: T,
    pub beta1: T,
    pub beta2: T,
    /// Inner horizon, `beta1^{-1/(n-2)}`.
    pub s0: T,
    /// `alpha1^{-1/(n-2)}`: `h/h'` decreases on `(s0, s2)`, increases beyond.
    pub s2: T,
    /// `alpha2^{-1/(n-2)}`, inside the horizon.
    pub s3: T,
}

pub fn rn_thresholds<T: Real>(spec: &ManifoldSpec<T>) -> Result<RnThresholds<T>> {
    spec.validate()?;
    let (m, q) = rn_params(spec)?;
    let nf = spec.nf();
    let (one, two, four) = (T::one(), T::of(2.0), T::of(4.0));
    let q2 = q * q;
    let disc_p = m * m * nf * nf - T::of(16.0) * (nf - one) * q2;
    if !(disc_p > T::zero()) {
        return Err(GeomError::OrderingViolation(format!("P has no real roots (discriminant {})", disc_p.as_f64())));
    }
    let sp = disc_p.sqrt();
    // smaller roots via the product of roots, avoiding cancellation
    let alpha2 = (m * nf + sp) / (four * (nf - one) * q2);
    let alpha1 = four / (m * nf + sp);
    let sq = (m * m - four * q2).sqrt();
    let beta2 = (m + sq) / (two * q2);
    let beta1 = two / (m + sq);
    if !(alpha1 < beta1 && beta1 < alpha2 && alpha2 < beta2) {
        return Err(GeomError::OrderingViolation(format!(
            "alpha1={} beta1={} alpha2={} beta2={}",
            alpha1.as_f64(),
            beta1.as_f64(),
            alpha2.as_f64(),
            beta2.as_f64()
        )));
    }
    let e = -one / (nf - two);
    Ok(RnThresholds { alpha1, alpha2, beta1, beta2, s0: beta1.powf(e), s2: alpha1.powf(e), s3: alpha2.powf(e) })
}

/// Numerator of `d/dr (h/h') = (h'² - h h'')/h'²`.
///
/// Horizon families use the closed polynomial in `h`, which stays finite at
/// the horizon where `h' = 0`.
pub fn quotient_derivative_numerator<T: Real>(profile: &WarpProfile<T>, r: T) -> Result<T> {
    let spec = profile.spec();
    let nf = spec.nf();
    let two = T::of(2.0);
    let (h, hp, hpp) = profile.jet(r)?;
    Ok(match spec.family {
        Family::DeSitterSchwarzschild { m, .. } => T::one() - m * nf / two * h.powf(two - nf),
        Family::ReissnerNordstrom { m, q } => {
            let u = h.powf(two - nf);
            T::one() - m * nf / two * u + (nf - T::one()) * q * q * u * u
        }
        _ => hp * hp - h * hpp,
    })
}

pub fn quotient_derivative_sign<T: Real>(profile: &WarpProfile<T>, r: T) -> Result<Sign> {
    quotient_derivative_numerator(profile, r).map(Sign::of)
}

/// Whether `h/h'` is nondecreasing on `[a, b]`, judged on the scan grid.
pub fn quotient_nondecreasing_on<T: Real>(profile: &WarpProfile<T>, a: T, b: T) -> Result<bool> {
    let tol = T::of(1e-12);
    for i in 0..=SCAN_SAMPLES {
        let r = a + (b - a) * T::of_usize(i) / T::of_usize(SCAN_SAMPLES);
        if quotient_derivative_numerator(profile, r)? < -tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `u'(r) = 2 - h h''/h'²`, the derivative of `u(r) = 2r - ∫ h h''/h'²`.
pub fn u_prime<T: Real>(profile: &WarpProfile<T>, r: T) -> Result<T> {
    let (h, hp, hpp) = profile.jet(r)?;
    Ok(T::of(2.0) - h * hpp / (hp * hp))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct SignInterval<T> {
    pub lo: T,
    pub hi: T,
    pub sign: Sign,
}

/// Maximal subintervals of `[a, b]` on which `u'` keeps one sign.
pub fn u_monotonicity<T: Real>(profile: &WarpProfile<T>, a: T, b: T) -> Result<Vec<SignInterval<T>>> {
    if !(a < b) {
        return Err(GeomError::InvalidParameter("interval must satisfy a < b".into()));
    }
    profile.jet(a)?;
    profile.jet(b)?;
    let f = |r: T| u_prime(profile, r).unwrap_or_else(|_| T::nan());
    let roots = scan_roots(f, a, b, SCAN_SAMPLES, T::of(SIGN_CHANGE_TOL));
    let mut cuts = vec![a];
    cuts.extend(roots.into_iter().filter(|&x| x > a && x < b));
    cuts.push(b);
    let mut out: Vec<SignInterval<T>> = Vec::new();
    for w in cuts.windows(2) {
        let sign = Sign::of(f((w[0] + w[1]) / T::of(2.0)));
        match out.last_mut() {
            Some(last) if last.sign == sign => last.hi = w[1],
            _ => out.push(SignInterval { lo: w[0], hi: w[1], sign }),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct ConstantValue<T> {
    pub value: T,
    pub sign: Sign,
}

/// `1 - m d^{2-n} - c d²`, the de Sitter–Schwarzschild lapse.
fn ss_lapse<T: Real>(n: T, m: T, c: T, d: T) -> T {
    T::one() - m * d.powf(T::of(2.0) - n) - c * d * d
}

/// `C1(d) = d sqrt(Q) / ((1 - (mn/2) d^{2-n}) + (k-1) Q)` with `Q` the lapse at `d`.
pub fn c1_constant<T: Real>(spec: &ManifoldSpec<T>, d: T, k: usize) -> Result<ConstantValue<T>> {
    let (m, c) = ss_params(spec).ok_or_else(|| GeomError::WrongFamily(spec.family.name().into()))?;
    let nf = spec.nf();
    let q = ss_lapse(nf, m, c, d);
    if !(d > T::zero()) || !(q > T::zero()) {
        return Err(GeomError::OutOfDomain { value: d.as_f64(), lo: f64::NAN, hi: f64::NAN });
    }
    let denom = (T::one() - m * nf / T::of(2.0) * d.powf(T::of(2.0) - nf)) + T::of_usize(k - 1) * q;
    let value = d * q.sqrt() / denom;
    Ok(ConstantValue { value, sign: Sign::of(value) })
}

/// `C1` at the quotient threshold: the formula's value `d/((k-1) sqrt(Q(d)))`
/// next to the simpler `1/(k-1)`. They differ in general.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct ThresholdC1<T> {
    pub d: T,
    pub formula: T,
    pub simple: T,
}

pub fn c1_at_threshold<T: Real>(spec: &ManifoldSpec<T>, k: usize) -> Result<ThresholdC1<T>> {
    let d = ss_thresholds(spec)?.quotient;
    let formula = c1_constant(spec, d, k)?.value;
    Ok(ThresholdC1 { d, formula, simple: T::one() / T::of_usize(k - 1) })
}

/// `C2(d) = (n-2)/(2 d^{n-2}) (m - 2q²/d^{n-2}) / (1 - m d^{2-n} + q² d^{4-2n})`.
pub fn c2_constant<T: Real>(spec: &ManifoldSpec<T>, d: T) -> Result<T> {
    let (m, q) = rn_params(spec)?;
    let nf = spec.nf();
    let two = T::of(2.0);
    let u = d.powf(two - nf);
    let lapse = T::one() - m * u + q * q * u * u;
    if !(d > T::zero()) || !(lapse > T::zero()) {
        return Err(GeomError::OutOfDomain { value: d.as_f64(), lo: f64::NAN, hi: f64::NAN });
    }
    Ok((nf - two) / two * u * (m - two * q * q * u) / lapse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warping::ProfileRange;
    use proptest::prelude::*;

    fn ss(n: usize, m: f64, c: f64) -> ManifoldSpec<f64> {
        ManifoldSpec::new(n, Family::DeSitterSchwarzschild { m, c })
    }

    fn rn(n: usize, m: f64, q: f64) -> ManifoldSpec<f64> {
        ManifoldSpec::new(n, Family::ReissnerNordstrom { m, q })
    }

    #[test]
    fn ss_threshold_values() {
        let t = ss_thresholds(&ss(3, 0.1, 0.0)).unwrap();
        assert!((t.quotient - 0.15).abs() < 1e-15);
        assert_eq!(t.ricci, None);
        let t = ss_thresholds(&ss(3, 0.1, 1.0)).unwrap();
        assert!((t.ricci.unwrap() - 0.05f64.powf(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn rn_example_roots() {
        let t = rn_thresholds(&rn(3, 1.0, 0.25)).unwrap();
        // roots of 1 - 1.5u + 0.125u²
        assert!((t.alpha1 - (6.0 - 28f64.sqrt())).abs() < 1e-14);
        assert!((t.alpha2 - (6.0 + 28f64.sqrt())).abs() < 1e-13);
        assert!(t.s3 < t.s0 && t.s0 < t.s2);
        let horizon = rn(3, 1.0, 0.25).domain_endpoints().unwrap().s0;
        assert!((t.s0 - horizon).abs() < 1e-14);
    }

    #[test]
    fn rn_threshold_tends_to_schwarzschild() {
        let t = rn_thresholds(&rn(4, 1.0, 1e-6)).unwrap();
        assert!((t.s2 - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn quotient_sign_flips_at_threshold() {
        let p = WarpProfile::build(&ss(3, 0.1, 0.0), ProfileRange::Default, 512).unwrap();
        let r_thr = p.radial_coordinate(0.15).unwrap();
        assert_eq!(quotient_derivative_sign(&p, 0.5 * r_thr).unwrap(), Sign::Negative);
        assert_eq!(quotient_derivative_sign(&p, 1.5 * r_thr).unwrap(), Sign::Positive);
        let p = WarpProfile::build(&rn(4, 1.0, 0.25), ProfileRange::Default, 512).unwrap();
        let s2 = rn_thresholds(p.spec()).unwrap().s2;
        let r2 = p.radial_coordinate(s2).unwrap();
        assert!(quotient_derivative_numerator(&p, r2).unwrap().abs() < 1e-12);
        assert_eq!(quotient_derivative_sign(&p, 0.9 * r2).unwrap(), Sign::Negative);
        assert_eq!(quotient_derivative_sign(&p, 1.1 * r2).unwrap(), Sign::Positive);
    }

    #[test]
    fn quotient_numerator_matches_jet() {
        let p = WarpProfile::build(&rn(5, 1.2, 0.3), ProfileRange::Default, 512).unwrap();
        for r in [0.2, 1.0, 3.0] {
            let (h, hp, hpp) = p.jet(r).unwrap();
            let direct = hp * hp - h * hpp;
            assert!((quotient_derivative_numerator(&p, r).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn u_monotone_on_space_forms() {
        for c in [-1.0, 0.0, 1.0] {
            let p = WarpProfile::build(&ManifoldSpec::new(3, Family::SpaceForm { c }), ProfileRange::Default, 256)
                .unwrap();
            let iv = u_monotonicity(&p, 0.0, p.r_max()).unwrap();
            assert_eq!(iv.len(), 1);
            assert_eq!(iv[0].sign, Sign::Positive);
        }
    }

    #[test]
    fn arctan_u_prime_closed_form() {
        let p = WarpProfile::build(&ManifoldSpec::new(3, Family::ArctanCylinder { k: 1.5 }), ProfileRange::Default, 256)
            .unwrap();
        for r in [0.1, 1.0, 4.0] {
            let expected = 2.0 + 2.0 * 1.5 * r * (1.5f64 * r).atan();
            assert!((u_prime(&p, r).unwrap() - expected).abs() < 1e-10);
        }
    }

    /// `t = r^p` roots of `B²(p+1)(p+2)t² - B(p+1)(p-4)t + 2`, in the form
    /// `[(p-4) ± p sqrt((p-7)/(p+1))] / (2B(p+2))`.
    fn power_change_points(b: f64, p: f64) -> (f64, f64) {
        let rad = p * ((p - 7.0) / (p + 1.0)).sqrt();
        let den = 2.0 * b * (p + 2.0);
        (((p - 4.0) - rad) / den, ((p - 4.0) + rad) / den)
    }

    #[test]
    fn power_perturbed_change_points() {
        for (b, p) in [(0.5, 8.0), (2.0, 10.0), (0.1, 12.5)] {
            let prof = WarpProfile::build(
                &ManifoldSpec::new(3, Family::PowerPerturbed { b, p }),
                ProfileRange::Default,
                1024,
            )
            .unwrap();
            let iv = u_monotonicity(&prof, 0.0, prof.r_max()).unwrap();
            let signs: Vec<Sign> = iv.iter().map(|i| i.sign).collect();
            assert_eq!(signs, vec![Sign::Positive, Sign::Negative, Sign::Positive], "B={b} p={p}");
            let (t0, t1) = power_change_points(b, p);
            assert!((iv[0].hi - t0.powf(1.0 / p)).abs() < 1e-9);
            assert!((iv[1].hi - t1.powf(1.0 / p)).abs() < 1e-9);
        }
    }

    #[test]
    fn power_perturbed_below_critical_exponent_is_monotone() {
        for p in [1.0, 4.0, 6.5] {
            let prof = WarpProfile::build(
                &ManifoldSpec::new(3, Family::PowerPerturbed { b: 1.0, p }),
                ProfileRange::Default,
                256,
            )
            .unwrap();
            let iv = u_monotonicity(&prof, 0.0, prof.r_max()).unwrap();
            assert_eq!(iv.len(), 1);
            assert_eq!(iv[0].sign, Sign::Positive);
        }
    }

    #[test]
    fn c1_examples() {
        let spec = ss(3, 0.1, 0.0);
        let at = c1_at_threshold(&spec, 2).unwrap();
        let q: f64 = 1.0 - 0.1 / 0.15;
        assert!((at.formula - 0.15 / q.sqrt()).abs() < 1e-12);
        assert_eq!(at.simple, 1.0);
        // m → 0, c = 0: C1 = d/k
        let flat = ManifoldSpec::<f64>::new(3, Family::SpaceForm { c: 0.0 });
        assert!((c1_constant(&flat, 2.0, 3).unwrap().value - 2.0 / 3.0).abs() < 1e-15);
        assert!(c1_constant(&spec, 0.05, 2).is_err());
    }

    #[test]
    fn c2_values() {
        let spec = rn(4, 1.0, 0.25);
        let t = rn_thresholds(&spec).unwrap();
        let d = 1.5 * t.s2;
        let u = d.powi(-2);
        let expected = u * (1.0 - 0.125 * u) / (1.0 - u + 0.0625 * u * u);
        assert!((c2_constant(&spec, d).unwrap() - expected).abs() < 1e-15);
        assert!(matches!(c2_constant(&ss(4, 1.0, 0.0), d), Err(GeomError::WrongFamily(_))));
    }

    proptest! {
        #[test]
        fn rn_ordering_holds(n in 3usize..7, m in 0.1f64..5.0, frac in 0.01f64..0.499) {
            let t = rn_thresholds(&rn(n, m, frac * m)).unwrap();
            prop_assert!(t.alpha1 < t.beta1 && t.beta1 < t.alpha2 && t.alpha2 < t.beta2);
            prop_assert!(t.s3 < t.s0 && t.s0 < t.s2);
        }

        #[test]
        fn c1_positive_above_threshold(n in 3usize..6, m in 0.05f64..1.0, k in 2usize..5, f in 1.01f64..20.0) {
            let spec = ss(n, m, 0.0);
            let d = ss_thresholds(&spec).unwrap().quotient * f;
            prop_assert_eq!(c1_constant(&spec, d, k).unwrap().sign, Sign::Positive);
        }
    }
}
