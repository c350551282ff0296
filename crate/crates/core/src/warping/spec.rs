use serde::{Deserialize, Serialize, Serializer};

use crate::error::{GeomError, Result};
use crate::roots::bisect;
use crate::scalar::Real;

/// Fiber of the warped product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Fiber {
    /// Unit round sphere `S^{n-1}`.
    #[default]
    Sphere,
    /// Flat torus `T^{n-1}`; only the curvature quantities support it.
    FlatTorus,
}

/// Warping-function family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", bound = "T: Real")]
pub enum Family<T> {
    /// Constant curvature `c`.
    SpaceForm { c: T },
    /// `h' = sqrt(1 - m h^{2-n} - c h^2)`.
    DeSitterSchwarzschild { m: T, c: T },
    /// `h' = sqrt(1 - m h^{2-n} + q^2 h^{4-2n})`.
    ReissnerNordstrom { m: T, q: T },
    /// `h = r + B r^{p+1}`.
    PowerPerturbed {
        #[serde(rename = "B")]
        b: T,
        p: T,
    },
    /// `h = arctan(K r) / K`.
    ArctanCylinder {
        #[serde(rename = "K")]
        k: T,
    },
    /// `h = r / (1 + a r^p)^{1/p}`.
    RationalDecayCylinder { a: T, p: T },
    /// `h = r ln(a r^2 + e)`.
    LogFactor { a: T },
}

impl<T: Real> Family<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Family::SpaceForm { .. } => "SpaceForm",
            Family::DeSitterSchwarzschild { .. } => "DeSitterSchwarzschild",
            Family::ReissnerNordstrom { .. } => "ReissnerNordstrom",
            Family::PowerPerturbed { .. } => "PowerPerturbed",
            Family::ArctanCylinder { .. } => "ArctanCylinder",
            Family::RationalDecayCylinder { .. } => "RationalDecayCylinder",
            Family::LogFactor { .. } => "LogFactor",
        }
    }
}

/// A rotationally symmetric model `[0, R) × N` with metric `dr² + h(r)² g_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ManifoldSpec<T> {
    pub n: usize,
    #[serde(flatten)]
    pub family: Family<T>,
    #[serde(default)]
    pub fiber: Fiber,
}

/// Upper end of an area-radius interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Endpoint<T> {
    pub fn value(self) -> T {
        match self {
            Endpoint::Finite(v) => v,
            Endpoint::Infinite => T::infinity(),
        }
    }
}

impl<T: Real> Serialize for Endpoint<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Endpoint::Finite(v) => v.serialize(s),
            Endpoint::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Area-radius interval `(s0, s1)` on which the lapse is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct DomainEndpoints<T> {
    pub s0: T,
    pub s1: Endpoint<T>,
}

/// One constraint checked during validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// Whether the constraint applies to these parameters at all.
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct ValidatedSpec<T> {
    pub spec: ManifoldSpec<T>,
    pub checks: Vec<ConstraintCheck>,
}

fn check(name: &str, value: f64, limit: f64, active: bool) -> ConstraintCheck {
    ConstraintCheck { name: name.to_string(), value, limit, active }
}

impl<T: Real> ManifoldSpec<T> {
    pub fn new(n: usize, family: Family<T>) -> Self {
        ManifoldSpec { n, family, fiber: Fiber::Sphere }
    }

    pub fn nf(&self) -> T {
        T::of_usize(self.n)
    }

    /// Checks the parameter constraints of the family.
    pub fn validate(&self) -> Result<ValidatedSpec<T>> {
        let n = self.n;
        let mut checks = Vec::new();
        let fail = |c: &ConstraintCheck| {
            GeomError::InvalidParameter(format!("{} (value {}, limit {})", c.name, c.value, c.limit))
        };
        let all_finite = match self.family {
            Family::SpaceForm { c } => c.is_finite(),
            Family::DeSitterSchwarzschild { m, c } => m.is_finite() && c.is_finite(),
            Family::ReissnerNordstrom { m, q } => m.is_finite() && q.is_finite(),
            Family::PowerPerturbed { b, p } => b.is_finite() && p.is_finite(),
            Family::ArctanCylinder { k } => k.is_finite(),
            Family::RationalDecayCylinder { a, p } => a.is_finite() && p.is_finite(),
            Family::LogFactor { a } => a.is_finite(),
        };
        if !all_finite {
            return Err(GeomError::InvalidParameter("parameters must be finite".into()));
        }
        let min_n = match self.family {
            Family::DeSitterSchwarzschild { .. } | Family::ReissnerNordstrom { .. } => 3,
            _ => 2,
        };
        let dim = check("n >= minimum dimension", n as f64, min_n as f64, true);
        if n < min_n {
            return Err(fail(&dim));
        }
        checks.push(dim);
        let mut require = |c: ConstraintCheck, ok: bool| -> Result<()> {
            if !ok {
                return Err(fail(&c));
            }
            checks.push(c);
            Ok(())
        };
        match self.family {
            Family::SpaceForm { .. } => {}
            Family::DeSitterSchwarzschild { m, c } => {
                require(check("m > 0", m.as_f64(), 0.0, true), m > T::zero())?;
                let active = c > T::zero();
                let disc = if active { ss_discriminant(n, m, c).as_f64() } else { 0.0 };
                require(
                    check("n^n/(4(n-2)^(n-2)) m^2 c^(n-2) < 1", disc, 1.0, active),
                    !active || disc < 1.0,
                )?;
            }
            Family::ReissnerNordstrom { m, q } => {
                require(check("q > 0", q.as_f64(), 0.0, true), q > T::zero())?;
                require(check("m > 2q", m.as_f64(), 2.0 * q.as_f64(), true), m > T::of(2.0) * q)?;
            }
            Family::PowerPerturbed { b, p } => {
                require(check("B != 0", b.abs().as_f64(), 0.0, true), b != T::zero())?;
                require(check("p > 0", p.as_f64(), 0.0, true), p > T::zero())?;
            }
            Family::ArctanCylinder { k } => {
                require(check("K > 0", k.as_f64(), 0.0, true), k > T::zero())?;
            }
            Family::RationalDecayCylinder { a, p } => {
                require(check("a > 0", a.as_f64(), 0.0, true), a > T::zero())?;
                require(check("p > 0", p.as_f64(), 0.0, true), p > T::zero())?;
            }
            Family::LogFactor { a } => {
                require(check("a > 0", a.as_f64(), 0.0, true), a > T::zero())?;
            }
        }
        Ok(ValidatedSpec { spec: *self, checks })
    }

    /// Whether `r` is generated from an area radius by the lapse ODE.
    pub fn is_horizon_family(&self) -> bool {
        matches!(self.family, Family::DeSitterSchwarzschild { .. } | Family::ReissnerNordstrom { .. })
    }

    /// Whether `h(0) = 0` and `h'(0) = 1`.
    pub fn has_regular_origin(&self) -> bool {
        !self.is_horizon_family()
    }

    /// Whether `h` extends to an odd function of `r`, the parity condition for
    /// smoothness at the pole. `None` when the family has no pole.
    pub fn odd_warping(&self) -> Option<bool> {
        let even_integer = |p: T| p.fract() == T::zero() && (p / T::of(2.0)).fract() == T::zero();
        match self.family {
            Family::DeSitterSchwarzschild { .. } | Family::ReissnerNordstrom { .. } => None,
            Family::SpaceForm { .. } | Family::ArctanCylinder { .. } | Family::LogFactor { .. } => Some(true),
            Family::PowerPerturbed { p, .. } | Family::RationalDecayCylinder { p, .. } => Some(even_integer(p)),
        }
    }

    /// `h'^2` as a function of the area radius `s = h`, for the families where
    /// it is one: `1 - m s^{2-n} - c s^2`, `1 - m s^{2-n} + q^2 s^{4-2n}`, or
    /// `1 - c s^2` for space forms.
    pub fn lapse(&self, s: T) -> Option<T> {
        let nf = self.nf();
        let two = T::of(2.0);
        match self.family {
            Family::SpaceForm { c } => Some(T::one() - c * s * s),
            Family::DeSitterSchwarzschild { m, c } => Some(T::one() - m * s.powf(two - nf) - c * s * s),
            Family::ReissnerNordstrom { m, q } => {
                let u = s.powf(two - nf);
                Some(T::one() - m * u + q * q * u * u)
            }
            _ => None,
        }
    }

    /// Interval of area radii where the lapse is positive.
    pub fn domain_endpoints(&self) -> Result<DomainEndpoints<T>> {
        self.validate()?;
        let nf = self.nf();
        let two = T::of(2.0);
        match self.family {
            Family::DeSitterSchwarzschild { m, c } => {
                let phi = |s: T| T::one() - m * s.powf(two - nf) - c * s * s;
                let scale = m.powf(T::one() / (nf - two));
                let (lo_hi, s1) = if c > T::zero() {
                    let peak = (m * (nf - two) / (two * c)).powf(T::one() / nf);
                    let s1 = bisect(phi, peak, T::one() / c.sqrt(), T::zero())?;
                    (peak, Endpoint::Finite(s1))
                } else {
                    (two * scale, Endpoint::Infinite)
                };
                let mut lo = lo_hi / two;
                let mut guard = 0;
                while phi(lo) >= T::zero() {
                    lo = lo / two;
                    guard += 1;
                    if guard > 2000 || lo == T::zero() {
                        return Err(GeomError::RootBracketingFailure("inner horizon not bracketed".into()));
                    }
                }
                let s0 = bisect(phi, lo, lo_hi, T::zero())?;
                Ok(DomainEndpoints { s0, s1 })
            }
            Family::ReissnerNordstrom { m, q } => {
                // 2q²/(m - sqrt(m² - 4q²)) rewritten without cancellation
                let root = (m + (m * m - T::of(4.0) * q * q).sqrt()) / two;
                Ok(DomainEndpoints { s0: root.powf(T::one() / (nf - two)), s1: Endpoint::Infinite })
            }
            _ => Err(GeomError::WrongFamily(self.family.name().into())),
        }
    }
}

/// `n^n / (4 (n-2)^{n-2}) m² c^{n-2}`; the de Sitter–Schwarzschild model has a
/// nonempty domain iff this is below one when `c > 0`.
pub fn ss_discriminant<T: Real>(n: usize, m: T, c: T) -> T {
    let nf = T::of_usize(n);
    let two = T::of(2.0);
    nf.powi(n as i32) / (T::of(4.0) * (nf - two).powi(n as i32 - 2)) * m * m * c.powi(n as i32 - 2)
}
