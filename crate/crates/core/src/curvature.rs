//! Curvature of the warped metric and of the distance function `r`.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::scalar::Real;
use crate::warping::{Fiber, WarpProfile};

/// Scalar curvature of the fiber.
pub fn fiber_scalar_curvature<T: Real>(n: usize, fiber: Fiber) -> T {
    match fiber {
        Fiber::Sphere => T::of_usize((n - 1) * (n - 2)),
        Fiber::FlatTorus => T::zero(),
    }
}

/// `Ric(∇r, ∇r) = -(n-1) h''/h`.
pub fn ricci_radial<T: Real>(profile: &WarpProfile<T>, r: T) -> Result<T> {
    let (h, _, hpp) = profile.jet(r)?;
    Ok(ricci_from_jet(profile.spec().n, h, hpp))
}

pub(crate) fn ricci_from_jet<T: Real>(n: usize, h: T, hpp: T) -> T {
    -T::of_usize(n - 1) * hpp / h
}

/// `scal = (scal_N - (n-1)(n-2) h'²)/h² - 2(n-1) h''/h`.
pub fn scalar_curvature<T: Real>(profile: &WarpProfile<T>, r: T) -> Result<T> {
    let (h, hp, hpp) = profile.jet(r)?;
    let spec = profile.spec();
    Ok(scalar_from_jet(spec.n, spec.fiber, h, hp, hpp))
}

pub(crate) fn scalar_from_jet<T: Real>(n: usize, fiber: Fiber, h: T, hp: T, hpp: T) -> T {
    let n1 = T::of_usize(n - 1);
    let n2 = T::of_usize(n - 2);
    (fiber_scalar_curvature::<T>(n, fiber) - n1 * n2 * hp * hp) / (h * h) - T::of(2.0) * n1 * hpp / h
}

/// Sectional curvatures of planes tangent to the fiber and of radial planes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct SectionalCurvatures<T> {
    /// `(1 - h'²)/h²`.
    pub tangential: T,
    /// `-h''/h`.
    pub radial: T,
}

/// Sectional curvatures for a round-sphere fiber.
pub fn sectional_curvatures<T: Real>(profile: &WarpProfile<T>, r: T) -> Result<SectionalCurvatures<T>> {
    if profile.spec().fiber != Fiber::Sphere {
        return Err(GeomError::UnsupportedFiber(
            "tangential curvature needs a round fiber; use flat_fiber_sectional_curvatures".into(),
        ));
    }
    let (h, hp, hpp) = profile.jet(r)?;
    Ok(SectionalCurvatures { tangential: (T::one() - hp * hp) / (h * h), radial: -hpp / h })
}

/// Sectional curvatures for a flat-torus fiber: tangential is `-h'²/h²`.
pub fn flat_fiber_sectional_curvatures<T: Real>(profile: &WarpProfile<T>, r: T) -> Result<SectionalCurvatures<T>> {
    let (h, hp, hpp) = profile.jet(r)?;
    Ok(SectionalCurvatures { tangential: -hp * hp / (h * h), radial: -hpp / h })
}

/// Tangent vector split into its `∂r` component and fiber components in an
/// orthonormal frame of the slice.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<T> {
    pub radial: T,
    pub fiber: Vec<T>,
}

impl<T: Real> TangentVector<T> {
    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.fiber.len(), other.fiber.len(), "fiber dimensions differ");
        self.fiber.iter().zip(&other.fiber).fold(self.radial * other.radial, |acc, (&a, &b)| acc + a * b)
    }
}

/// `Hess r(U, V) = (h'/h)(<U,V> - <∇r,U><∇r,V>)`.
pub fn hessian_r<T: Real>(profile: &WarpProfile<T>, r: T, u: &TangentVector<T>, v: &TangentVector<T>) -> Result<T> {
    let (h, hp, _) = profile.jet(r)?;
    Ok(hp / h * (u.dot(v) - u.radial * v.radial))
}

/// `Δ_Σ r = (h'/h)(k - |∇_Σ r|²) + k <H, ∇r>` on a k-dimensional submanifold.
pub fn laplacian_r_on_submanifold<T: Real>(
    profile: &WarpProfile<T>,
    r: T,
    k: usize,
    grad_r_sq: T,
    mean_curvature_radial: T,
) -> Result<T> {
    let (h, hp, _) = profile.jet(r)?;
    let kf = T::of_usize(k);
    Ok(hp / h * (kf - grad_r_sq) + kf * mean_curvature_radial)
}

/// One row of the curvature table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct CurvatureRow<T> {
    pub r: T,
    pub ric_radial: T,
    pub scal: T,
    pub k_tan: T,
    pub k_rad: T,
}

/// Curvature sampled at `samples` evenly spaced radii in `(0, r_max]`.
pub fn curvature_table<T: Real>(profile: &WarpProfile<T>, samples: usize) -> Result<Vec<CurvatureRow<T>>> {
    let spec = profile.spec();
    (1..=samples)
        .map(|i| {
            let r = profile.r_max() * T::of_usize(i) / T::of_usize(samples);
            let (h, hp, hpp) = profile.jet(r)?;
            let k_tan = match spec.fiber {
                Fiber::Sphere => (T::one() - hp * hp) / (h * h),
                Fiber::FlatTorus => -hp * hp / (h * h),
            };
            Ok(CurvatureRow {
                r,
                ric_radial: ricci_from_jet(spec.n, h, hpp),
                scal: scalar_from_jet(spec.n, spec.fiber, h, hp, hpp),
                k_tan,
                k_rad: -hpp / h,
            })
        })
        .collect()
}
