//! Zonal radial graphs `r = φ(θ)` over the fiber.
//!
//! With `ρ = h(r) sin θ` the orbit radius, the hypersurface is a curve in the
//! `(r, θ)` half-plane with metric `dr² + h² dθ²`, rotated by `S^{n-2}`. Its
//! unit normal is `N = (h ∂r - (φ'/h) ∂θ)/sqrt(φ'² + h²)` and
//!
//! `div_Σ N = -(h φ'' - h² h' - 2 h' φ'²)/A^{3/2} + (n-2)(h' - φ' cot θ / h)/A^{1/2}`
//!
//! with `A = φ'² + h²`. Derivatives of `φ` are central differences on the
//! chart grid, reflected evenly at the poles.

use crate::error::{GeomError, Result};
use crate::quadrature::sphere_area;
use crate::scalar::Real;
use crate::warping::WarpProfile;

use super::{BoundaryNode, Layout, MeshNode, SubmanifoldFamily, SubmanifoldMesh};

#[derive(Debug, Clone, PartialEq)]
pub(super) struct GraphLayout<T> {
    theta: Vec<T>,
    phi: Vec<T>,
    dphi: Vec<T>,
    step: T,
}

fn reflect(i: isize, len: usize) -> usize {
    let len = len as isize;
    let j = if i < 0 { -i - 1 } else if i >= len { 2 * len - i - 1 } else { i };
    j.clamp(0, len - 1) as usize
}

/// Cubic Lagrange resampling of a midpoint-grid table onto `count` midpoints.
fn resample<T: Real>(table: &[T], count: usize) -> Vec<T> {
    let len = table.len();
    if len == count {
        return table.to_vec();
    }
    (0..count)
        .map(|j| {
            // position in units of the source grid
            let x = (T::of_usize(j) + T::of(0.5)) * T::of_usize(len) / T::of_usize(count) - T::of(0.5);
            let base = x.floor();
            let t = x - base;
            let i0 = base.to_isize().expect("finite index");
            let p = |o: isize| table[reflect(i0 + o, len)];
            let (one, two, six) = (T::one(), T::of(2.0), T::of(6.0));
            let w_m1 = -t * (t - one) * (t - two) / six;
            let w_0 = (t + one) * (t - one) * (t - two) / two;
            let w_1 = -(t + one) * t * (t - two) / two;
            let w_2 = (t + one) * t * (t - one) / six;
            w_m1 * p(-1) + w_0 * p(0) + w_1 * p(1) + w_2 * p(2)
        })
        .collect()
}

pub(super) fn build<T: Real>(
    profile: &WarpProfile<T>,
    family: SubmanifoldFamily<T>,
    table: &[T],
    resolution: usize,
) -> Result<SubmanifoldMesh<T>> {
    if table.len() < 4 {
        return Err(GeomError::InvalidParameter("graph table needs at least 4 values".into()));
    }
    let n = profile.spec().n;
    let count = resolution;
    let step = T::PI() / T::of_usize(count);
    let theta: Vec<T> = (0..count).map(|j| (T::of_usize(j) + T::of(0.5)) * step).collect();
    let phi = resample(table, count);
    let at = |i: isize| phi[reflect(i, count)];
    let two = T::of(2.0);
    let dphi: Vec<T> = (0..count as isize).map(|j| (at(j + 1) - at(j - 1)) / (two * step)).collect();
    let ddphi: Vec<T> =
        (0..count as isize).map(|j| (at(j + 1) - two * at(j) + at(j - 1)) / (step * step)).collect();
    let orbit = sphere_area::<T>(n - 2);
    let nm1 = T::of_usize(n - 1);
    let nm2 = T::of_usize(n - 2);
    let mut nodes = Vec::with_capacity(count);
    for j in 0..count {
        let (r, d1, d2, th) = (phi[j], dphi[j], ddphi[j], theta[j]);
        let (h, hp, hpp) = profile.jet(r)?;
        let a = d1 * d1 + h * h;
        if !(a > T::of(1e-12)) {
            return Err(GeomError::DegenerateMetric(format!("φ'² + h² = {} at θ = {}", a.as_f64(), th.as_f64())));
        }
        let root = a.sqrt();
        let div_n = -(h * d2 - h * h * hp - two * hp * d1 * d1) / (a * root)
            + nm2 * (hp - d1 * th.cos() / (th.sin() * h)) / root;
        let weight = orbit * root * (h * th.sin()).powi(n as i32 - 2) * step;
        nodes.push(MeshNode {
            r,
            h,
            hp,
            hpp,
            angles: vec![th],
            weight,
            mean_curvature: div_n.abs() / nm1,
            mean_curvature_radial: -div_n / nm1 * h / root,
            grad_r_sq: d1 * d1 / a,
        });
    }
    Ok(SubmanifoldMesh {
        spec: *profile.spec(),
        family,
        k: n - 1,
        resolution,
        nodes,
        boundary: Vec::new(),
        layout: Layout::Graph(GraphLayout { theta, phi, dphi, step }),
        forced_minimal: false,
    })
}

/// Fraction of `t ∈ [0, 1]` with `a + t (b - a) <= cut`.
fn fraction_below<T: Real>(a: T, b: T, cut: T) -> (T, Option<T>) {
    match (a <= cut, b <= cut) {
        (true, true) => (T::one(), None),
        (false, false) => (T::zero(), None),
        (true, false) => {
            let t = (cut - a) / (b - a);
            (t, Some(t))
        }
        (false, true) => {
            let t = (cut - a) / (b - a);
            (T::one() - t, Some(t))
        }
    }
}

pub(super) fn truncate<T: Real>(
    mesh: &SubmanifoldMesh<T>,
    layout: &GraphLayout<T>,
    profile: &WarpProfile<T>,
    r_cut: T,
) -> Result<SubmanifoldMesh<T>> {
    let count = layout.phi.len();
    let n = mesh.spec.n;
    let half = T::of(0.5);
    let at = |i: isize| layout.phi[reflect(i, count)];
    let orbit = sphere_area::<T>(n - 2);
    let mut out = mesh.clone();
    out.nodes.clear();
    out.boundary.clear();
    for (j, node) in mesh.nodes.iter().enumerate() {
        let ji = j as isize;
        let left = (at(ji - 1) + at(ji)) * half;
        let right = (at(ji) + at(ji + 1)) * half;
        let (f1, c1) = fraction_below(left, at(ji), r_cut);
        let (f2, c2) = fraction_below(at(ji), right, r_cut);
        let frac = (f1 + f2) * half;
        if frac > T::zero() {
            let mut kept = node.clone();
            kept.weight = node.weight * frac;
            out.nodes.push(kept);
        }
        let th = layout.theta[j];
        for (cross, offset) in [(c1, -half), (c2, T::zero())] {
            let Some(t) = cross else { continue };
            let theta_star = th + (offset + t * half) * layout.step;
            let (h, hp, _) = profile.jet(r_cut)?;
            let d1 = layout.dphi[j];
            let conormal = d1.abs() / (d1 * d1 + h * h).sqrt();
            out.boundary.push(BoundaryNode {
                r: r_cut,
                h,
                hp,
                angles: vec![theta_star],
                weight: orbit * (h * theta_star.sin()).powi(n as i32 - 2),
                conormal_radial: conormal,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warping::{Family, ManifoldSpec, ProfileRange};
    use std::f64::consts::PI;

    fn profile(n: usize, c: f64) -> WarpProfile<f64> {
        WarpProfile::build(&ManifoldSpec::new(n, Family::SpaceForm { c }), ProfileRange::Default, 256).unwrap()
    }

    fn cosine_graph(base: f64, amp: f64, count: usize) -> SubmanifoldFamily<f64> {
        let phi = (0..count).map(|j| base + amp * ((j as f64 + 0.5) * PI / count as f64).cos()).collect();
        SubmanifoldFamily::RadialGraph { phi }
    }

    /// Area of `r = φ(θ)` in `R^n` by composite Simpson with analytic `φ'`.
    fn oracle_area(n: usize, base: f64, amp: f64) -> f64 {
        let f = |th: f64| {
            let phi = base + amp * th.cos();
            let d = -amp * th.sin();
            (d * d + phi * phi).sqrt() * (phi * th.sin()).powi(n as i32 - 2)
        };
        let m = 20000;
        let hstep = PI / m as f64;
        let mut acc = f(0.0) + f(PI);
        for i in 1..m {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * hstep);
        }
        acc * hstep / 3.0 * sphere_area::<f64>(n - 2)
    }

    #[test]
    fn constant_graph_matches_slice() {
        let p = profile(4, -1.0);
        let g = SubmanifoldMesh::build(&p, &cosine_graph(1.3, 0.0, 64), 4096).unwrap();
        let s = SubmanifoldMesh::build(&p, &SubmanifoldFamily::GeodesicSphere { radius: 1.3 }, 512).unwrap();
        let (vg, vs) = (g.integrate(|_| 1.0), s.integrate(|_| 1.0));
        assert!((vg - vs).abs() < 1e-6 * vs);
        let hg = g.nodes[100].mean_curvature;
        assert!((hg - s.nodes[0].mean_curvature).abs() < 1e-8);
    }

    #[test]
    fn perturbed_graph_area_matches_oracle() {
        for n in [3, 4] {
            let p = profile(n, 0.0);
            let mesh = SubmanifoldMesh::build(&p, &cosine_graph(1.0, 0.2, 4096), 4096).unwrap();
            let area = mesh.integrate(|_| 1.0);
            let expected = oracle_area(n, 1.0, 0.2);
            assert!((area - expected).abs() < 1e-4 * expected, "n={n}: {area} vs {expected}");
        }
    }

    #[test]
    fn shifted_sphere_mean_curvature() {
        // r = cos θ + sqrt(cos²θ + 3): sphere of radius 2 centred at distance 1 from the pole
        let count = 4096;
        let phi: Vec<f64> = (0..count)
            .map(|j| {
                let c = ((j as f64 + 0.5) * PI / count as f64).cos();
                c + (c * c + 3.0).sqrt()
            })
            .collect();
        let p = profile(3, 0.0);
        let mesh = SubmanifoldMesh::build(&p, &SubmanifoldFamily::RadialGraph { phi }, count).unwrap();
        for node in mesh.nodes.iter().step_by(97) {
            assert!((node.mean_curvature - 0.5).abs() < 1e-4, "{}", node.mean_curvature);
        }
        let area = mesh.integrate(|_| 1.0);
        assert!((area - 16.0 * PI).abs() < 1e-5 * area);
    }

    #[test]
    fn truncation_of_a_sphere() {
        // shifted sphere of radius 2 about (1,0,0); the part inside B_2
        let count = 2048;
        let phi: Vec<f64> = (0..count)
            .map(|j| {
                let c = ((j as f64 + 0.5) * PI / count as f64).cos();
                c + (c * c + 3.0).sqrt()
            })
            .collect();
        let p = profile(3, 0.0);
        let mesh = SubmanifoldMesh::build(&p, &SubmanifoldFamily::RadialGraph { phi }, count).unwrap();
        let cut = mesh.truncate(&p, 2.0).unwrap();
        // the part inside B_2 is a cap of height 1.5
        let expected = 2.0 * PI * 2.0 * 1.5;
        let area = cut.integrate(|_| 1.0);
        assert!((area - expected).abs() < 1e-5 * expected, "{area} vs {expected}");
        // boundary circle of radius sqrt(4 - 1/4)
        let len = cut.integrate_boundary(|_| 1.0);
        assert!((len - 2.0 * PI * 3.75f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn resample_is_exact_for_cubics_in_interior() {
        let len = 40;
        let table: Vec<f64> = (0..len).map(|j| ((j as f64 + 0.5) / len as f64).powi(3)).collect();
        let out = resample(&table, 80);
        for (j, v) in out.iter().enumerate().skip(4).take(70) {
            let x = (j as f64 + 0.5) / 80.0;
            assert!((v - x.powi(3)).abs() < 1e-14);
        }
    }
}
