use serde::Serialize;

use crate::curvature::ricci_from_jet;
use crate::error::{GeomError, Result};
use crate::scalar::Real;
use crate::warping::WarpProfile;

use super::SubmanifoldMesh;

/// Integrals of a mesh consumed by the verifiers. `quot` is `h/h'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct GeometricMoments<T> {
    /// `|Σ|`.
    pub vol: T,
    /// `|∂Σ|`.
    pub bvol: T,
    /// `∫ |H|`.
    pub int_abs_h: T,
    /// `∫ ric(∇r) |∇_Σ r|²`.
    pub int_ric_grad: T,
    /// `∫ h`.
    pub int_h: T,
    /// `∫ h'`.
    pub int_hprime: T,
    /// `∫ <H, ∇r> quot`.
    pub int_hdot_quot: T,
    /// `∫ |H| quot`.
    pub int_abs_h_quot: T,
    /// `∫ ric(∇r) quot² |∇_Σ r|²`.
    pub int_ric_quot_sq: T,
    /// `∫_∂Σ quot`.
    pub int_boundary_quot: T,
    /// `∫_∂Σ quot <∇_Σ r, ν>`.
    pub int_boundary_conormal_quot: T,
    /// `∫ (h' + h <H, ∇r>)`.
    pub int_minkowski: T,
    /// Smallest area radius over the nodes.
    pub d_sigma: T,
    /// Largest area radius over the nodes.
    pub r_sigma: T,
    pub r_min: T,
    pub r_max: T,
    pub max_abs_h: T,
    pub min_hdot: T,
}

/// Moments of `mesh`; `profile` must describe the same manifold.
pub fn moments<T: Real>(mesh: &SubmanifoldMesh<T>, profile: &WarpProfile<T>) -> Result<GeometricMoments<T>> {
    if profile.spec() != &mesh.spec {
        return Err(GeomError::SpecMismatch);
    }
    if mesh.nodes.is_empty() {
        return Err(GeomError::EmptyResult("mesh has no nodes".into()));
    }
    let n = mesh.spec.n;
    let quot = |h: T, hp: T| h / hp;
    let ric = |h: T, hpp: T| ricci_from_jet(n, h, hpp);
    let (mut d_sigma, mut r_sigma) = (T::infinity(), T::neg_infinity());
    let (mut r_min, mut r_max) = (T::infinity(), T::neg_infinity());
    let (mut max_abs_h, mut min_hdot) = (T::zero(), T::infinity());
    for node in &mesh.nodes {
        d_sigma = d_sigma.min(node.h);
        r_sigma = r_sigma.max(node.h);
        r_min = r_min.min(node.r);
        r_max = r_max.max(node.r);
        max_abs_h = max_abs_h.max(node.mean_curvature);
        min_hdot = min_hdot.min(node.mean_curvature_radial);
    }
    Ok(GeometricMoments {
        vol: mesh.integrate(|_| T::one()),
        bvol: mesh.integrate_boundary(|_| T::one()),
        int_abs_h: mesh.integrate(|x| x.mean_curvature),
        int_ric_grad: mesh.integrate(|x| ric(x.h, x.hpp) * x.grad_r_sq),
        int_h: mesh.integrate(|x| x.h),
        int_hprime: mesh.integrate(|x| x.hp),
        int_hdot_quot: mesh.integrate(|x| x.mean_curvature_radial * quot(x.h, x.hp)),
        int_abs_h_quot: mesh.integrate(|x| x.mean_curvature * quot(x.h, x.hp)),
        int_ric_quot_sq: mesh.integrate(|x| {
            let q = quot(x.h, x.hp);
            ric(x.h, x.hpp) * q * q * x.grad_r_sq
        }),
        int_boundary_quot: mesh.integrate_boundary(|b| quot(b.h, b.hp)),
        int_boundary_conormal_quot: mesh.integrate_boundary(|b| quot(b.h, b.hp) * b.conormal_radial),
        int_minkowski: mesh.integrate(|x| x.hp + x.h * x.mean_curvature_radial),
        d_sigma,
        r_sigma,
        r_min,
        r_max,
        max_abs_h,
        min_hdot,
    })
}
