//! Quadrature meshes of parametric submanifolds and their integral moments.
//!
//! Every family is invariant under rotations about an axis of the fiber, so
//! the extrinsic data at a node (|H|, <H,∇r>, |∇_Σ r|²) is known in closed
//! form or from one-dimensional finite differences.

mod graph;
mod moments;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::quadrature::{gauss_legendre, SphereRule};
use crate::scalar::Real;
use crate::warping::{Family, ManifoldSpec, WarpProfile};

pub use moments::{moments, GeometricMoments};

/// Default node budget of a mesh.
pub const DEFAULT_MESH_RESOLUTION: usize = 4096;
const RADIAL_RULE: usize = 8;

/// Parametric submanifold families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", bound = "T: Real")]
pub enum SubmanifoldFamily<T> {
    /// The slice `{h = s}`, a closed hypersurface.
    Slice { s: T },
    /// `{(r, ω) : r_lo <= r <= r_hi, ω ∈ Γ}`, with `Γ` a round `(k-1)`-sphere
    /// of angular radius `cap_angle` inside a great `k`-sphere of the fiber.
    /// `cap_angle = π/2` gives a totally geodesic cone.
    RadialCone { k: usize, cap_angle: T, r_lo: T, r_hi: T },
    /// Closed hypersurface `r = φ(θ)` with `θ` the polar angle of the fiber;
    /// `phi` holds values at the midpoints `θ_j = (j + 1/2) π / len`.
    RadialGraph { phi: Vec<T> },
    /// Geodesic sphere about the pole of a space form.
    GeodesicSphere { radius: T },
    /// Right circular cone in `R³` with half-angle `alpha` and slant length `R`.
    RightCone3D {
        alpha: T,
        #[serde(rename = "R")]
        radius: T,
    },
}

impl<T: Real> SubmanifoldFamily<T> {
    pub fn name(&self) -> &'static str {
        match self {
            SubmanifoldFamily::Slice { .. } => "Slice",
            SubmanifoldFamily::RadialCone { .. } => "RadialCone",
            SubmanifoldFamily::RadialGraph { .. } => "RadialGraph",
            SubmanifoldFamily::GeodesicSphere { .. } => "GeodesicSphere",
            SubmanifoldFamily::RightCone3D { .. } => "RightCone3D",
        }
    }
}

/// Interior quadrature node.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshNode<T> {
    pub r: T,
    pub h: T,
    pub hp: T,
    pub hpp: T,
    /// Chart coordinates: hyperspherical angles of the fiber point, or the
    /// polar angle alone for graphs, whose nodes stand for a whole orbit.
    pub angles: Vec<T>,
    pub weight: T,
    /// `|H|`.
    pub mean_curvature: T,
    /// `<H, ∇r>`.
    pub mean_curvature_radial: T,
    /// `|∇_Σ r|²`.
    pub grad_r_sq: T,
}

/// Boundary quadrature node.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryNode<T> {
    pub r: T,
    pub h: T,
    pub hp: T,
    pub angles: Vec<T>,
    pub weight: T,
    /// `<∇_Σ r, ν>` with `ν` the outward conormal.
    pub conormal_radial: T,
}

#[derive(Debug, Clone, PartialEq)]
enum Layout<T> {
    Slice,
    Cone { cap_angle: T, panels: Vec<(T, T)>, gamma_target: usize },
    Graph(graph::GraphLayout<T>),
}

/// Quadrature mesh of a k-dimensional submanifold.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmanifoldMesh<T> {
    pub spec: ManifoldSpec<T>,
    pub family: SubmanifoldFamily<T>,
    pub k: usize,
    pub resolution: usize,
    pub nodes: Vec<MeshNode<T>>,
    pub boundary: Vec<BoundaryNode<T>>,
    layout: Layout<T>,
    forced_minimal: bool,
}

fn angles_of<T: Real>(x: &[T]) -> Vec<T> {
    let d = x.len() - 1;
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        if i + 1 == d {
            out.push(x[d].atan2(x[d - 1]));
        } else {
            let tail = x[i + 1..].iter().fold(T::zero(), |a, &v| a + v * v).sqrt();
            out.push(tail.atan2(x[i]));
        }
    }
    out
}

impl<T: Real> SubmanifoldMesh<T> {
    /// Builds the mesh of `family` inside the model described by `profile`.
    pub fn build(profile: &WarpProfile<T>, family: &SubmanifoldFamily<T>, resolution: usize) -> Result<Self> {
        if resolution < 16 {
            return Err(GeomError::InvalidParameter(format!("mesh resolution {resolution} below 16")));
        }
        let spec = *profile.spec();
        match family {
            SubmanifoldFamily::Slice { s } => {
                let r = profile.radial_coordinate(*s)?;
                Self::slice(profile, family.clone(), r, resolution)
            }
            SubmanifoldFamily::GeodesicSphere { radius } => {
                if !matches!(spec.family, Family::SpaceForm { .. }) {
                    return Err(GeomError::WrongFamily(spec.family.name().into()));
                }
                if !(*radius > T::zero()) {
                    return Err(GeomError::InvalidParameter("radius must be positive".into()));
                }
                Self::slice(profile, family.clone(), *radius, resolution)
            }
            SubmanifoldFamily::RadialCone { k, cap_angle, r_lo, r_hi } => {
                Self::cone(profile, family.clone(), *k, *cap_angle, *r_lo, *r_hi, resolution)
            }
            SubmanifoldFamily::RightCone3D { alpha, radius } => {
                let flat = matches!(spec.family, Family::SpaceForm { c } if c == T::zero());
                if !flat || spec.n != 3 {
                    return Err(GeomError::WrongFamily("right cone needs flat R³".into()));
                }
                Self::cone(profile, family.clone(), 2, *alpha, T::zero(), *radius, resolution)
            }
            SubmanifoldFamily::RadialGraph { phi } => graph::build(profile, family.clone(), phi, resolution),
        }
    }

    fn slice(profile: &WarpProfile<T>, family: SubmanifoldFamily<T>, r: T, resolution: usize) -> Result<Self> {
        let spec = *profile.spec();
        let n = spec.n;
        let (h, hp, hpp) = profile.jet(r)?;
        if !(h > T::zero()) {
            return Err(GeomError::DegenerateMetric("slice through the pole".into()));
        }
        let rule: SphereRule<T> = SphereRule::with_target(n - 1, resolution);
        let scale = h.powi(n as i32 - 1);
        let curv = hp / h;
        let nodes = rule
            .angles
            .iter()
            .zip(&rule.weights)
            .map(|(a, &w)| MeshNode {
                r,
                h,
                hp,
                hpp,
                angles: a.clone(),
                weight: w * scale,
                mean_curvature: curv.abs(),
                mean_curvature_radial: -curv,
                grad_r_sq: T::zero(),
            })
            .collect();
        Ok(SubmanifoldMesh {
            spec,
            family,
            k: n - 1,
            resolution,
            nodes,
            boundary: Vec::new(),
            layout: Layout::Slice,
            forced_minimal: false,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn cone(
        profile: &WarpProfile<T>,
        family: SubmanifoldFamily<T>,
        k: usize,
        cap_angle: T,
        r_lo: T,
        r_hi: T,
        resolution: usize,
    ) -> Result<Self> {
        let n = profile.spec().n;
        if k < 2 || k + 1 > n {
            return Err(GeomError::InvalidParameter(format!("cone dimension {k} must lie in [2, n-1]")));
        }
        if !(cap_angle > T::zero() && cap_angle <= T::FRAC_PI_2()) {
            return Err(GeomError::InvalidParameter("cap angle must lie in (0, π/2]".into()));
        }
        if !(r_lo >= T::zero() && r_hi > r_lo) {
            return Err(GeomError::InvalidParameter("need 0 <= r_lo < r_hi".into()));
        }
        let (_, hp_lo, _) = profile.jet(r_lo)?;
        profile.jet(r_hi)?;
        if profile.s_min() > T::zero() && !(hp_lo > T::zero()) {
            return Err(GeomError::OutOfDomain { value: r_lo.as_f64(), lo: 0.0, hi: profile.r_max().as_f64() });
        }
        let panels_n = (resolution / 256).max(2);
        let width = (r_hi - r_lo) / T::of_usize(panels_n);
        let panels = (0..panels_n)
            .map(|i| {
                let lo = r_lo + width * T::of_usize(i);
                let hi = if i + 1 == panels_n { r_hi } else { r_lo + width * T::of_usize(i + 1) };
                (lo, hi)
            })
            .collect();
        let gamma_target = (resolution / (RADIAL_RULE * panels_n)).max(8);
        let mut mesh = SubmanifoldMesh {
            spec: *profile.spec(),
            family,
            k,
            resolution,
            nodes: Vec::new(),
            boundary: Vec::new(),
            layout: Layout::Cone { cap_angle, panels, gamma_target },
            forced_minimal: false,
        };
        mesh.fill_cone(profile)?;
        Ok(mesh)
    }

    fn fill_cone(&mut self, profile: &WarpProfile<T>) -> Result<()> {
        let Layout::Cone { cap_angle, panels, gamma_target } = &self.layout else {
            unreachable!("cone layout")
        };
        let (k, n) = (self.k, self.spec.n);
        let (sin_a, cos_a) = (cap_angle.sin(), cap_angle.cos());
        let gamma: SphereRule<T> = SphereRule::with_target(k - 1, *gamma_target);
        // Γ ⊂ S^{n-1} ⊂ R^n: ω = cos α e0 + sin α y with y in span(e1..ek)
        let gamma_angles: Vec<Vec<T>> = gamma
            .points
            .iter()
            .map(|y| {
                let mut x = vec![T::zero(); n];
                x[0] = cos_a;
                for (i, &v) in y.iter().enumerate() {
                    x[i + 1] = sin_a * v;
                }
                angles_of(&x)
            })
            .collect();
        let gamma_scale = sin_a.powi(k as i32 - 1);
        let cot = if cos_a.abs() <= T::epsilon() { T::zero() } else { cos_a / sin_a };
        let kf = T::of_usize(k);
        let rule = gauss_legendre::<T>(RADIAL_RULE);
        let mut nodes = Vec::with_capacity(panels.len() * RADIAL_RULE * gamma.len());
        for &(lo, hi) in panels {
            let half = (hi - lo) / T::of(2.0);
            let mid = (lo + hi) / T::of(2.0);
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let r = mid + half * x;
                let (h, hp, hpp) = profile.jet(r)?;
                let base = w * half * h.powi(k as i32 - 1) * gamma_scale;
                let curv = T::of_usize(k - 1) * cot.abs() / (kf * h);
                for (a, &wg) in gamma_angles.iter().zip(&gamma.weights) {
                    nodes.push(MeshNode {
                        r,
                        h,
                        hp,
                        hpp,
                        angles: a.clone(),
                        weight: base * wg,
                        mean_curvature: if self.forced_minimal { T::zero() } else { curv },
                        mean_curvature_radial: T::zero(),
                        grad_r_sq: T::one(),
                    });
                }
            }
        }
        let mut boundary = Vec::new();
        let r_lo = panels.first().expect("nonempty").0;
        let r_hi = panels.last().expect("nonempty").1;
        for (r, sign) in [(r_lo, -T::one()), (r_hi, T::one())] {
            let (h, hp, _) = profile.jet(r)?;
            if !(h > T::zero()) {
                continue;
            }
            let scale = h.powi(k as i32 - 1) * gamma_scale;
            for (a, &wg) in gamma_angles.iter().zip(&gamma.weights) {
                boundary.push(BoundaryNode { r, h, hp, angles: a.clone(), weight: scale * wg, conormal_radial: sign });
            }
        }
        self.nodes = nodes;
        self.boundary = boundary;
        Ok(())
    }

    /// `Σ ∩ B_r`: keeps the part with radius at most `r_cut`.
    ///
    /// Cones clip their radial panels exactly; graphs scale straddling cells
    /// by the linearly interpolated fraction inside the ball; slices are kept
    /// whole or not at all.
    pub fn truncate(&self, profile: &WarpProfile<T>, r_cut: T) -> Result<Self> {
        if profile.spec() != &self.spec {
            return Err(GeomError::SpecMismatch);
        }
        let empty = || GeomError::EmptyResult(format!("no part of the mesh within r <= {}", r_cut.as_f64()));
        match &self.layout {
            Layout::Slice => {
                if self.nodes[0].r <= r_cut {
                    Ok(self.clone())
                } else {
                    Err(empty())
                }
            }
            Layout::Cone { cap_angle, panels, gamma_target } => {
                let kept: Vec<(T, T)> = panels
                    .iter()
                    .filter(|p| p.0 < r_cut)
                    .map(|&(lo, hi)| (lo, hi.min(r_cut)))
                    .collect();
                if kept.is_empty() {
                    return Err(empty());
                }
                let mut out = self.clone();
                out.layout = Layout::Cone { cap_angle: *cap_angle, panels: kept, gamma_target: *gamma_target };
                out.fill_cone(profile)?;
                Ok(out)
            }
            Layout::Graph(layout) => {
                let out = graph::truncate(self, layout, profile, r_cut)?;
                if out.nodes.is_empty() {
                    return Err(empty());
                }
                Ok(out)
            }
        }
    }

    /// Copy with the mean curvature zeroed, for exercising the verifiers on a
    /// surface that violates the identities.
    pub fn with_forced_minimal(&self) -> Self {
        let mut out = self.clone();
        out.forced_minimal = true;
        for node in &mut out.nodes {
            node.mean_curvature = T::zero();
            node.mean_curvature_radial = T::zero();
        }
        out
    }

    pub fn is_forced_minimal(&self) -> bool {
        self.forced_minimal
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty() && !matches!(self.layout, Layout::Cone { .. })
    }

    /// `∫_Σ f dΣ` with deterministic summation.
    pub fn integrate(&self, f: impl Fn(&MeshNode<T>) -> T) -> T {
        let terms: Vec<T> = self.nodes.iter().map(|node| node.weight * f(node)).collect();
        crate::quadrature::pairwise_sum(&terms)
    }

    /// `∫_∂Σ f dS` with deterministic summation.
    pub fn integrate_boundary(&self, f: impl Fn(&BoundaryNode<T>) -> T) -> T {
        let terms: Vec<T> = self.boundary.iter().map(|node| node.weight * f(node)).collect();
        crate::quadrature::pairwise_sum(&terms)
    }

    /// Plain-text export: a header line, then one `r angles... weight` line
    /// per interior node and one `b r angles... weight` line per boundary node.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "mesh {} n={} k={} nodes={} boundary={}\n",
            self.family.name(),
            self.spec.n,
            self.k,
            self.nodes.len(),
            self.boundary.len()
        );
        let row = |prefix: &str, r: T, angles: &[T], w: T| {
            let mut line = String::from(prefix);
            line.push_str(&r.to_string());
            for a in angles {
                line.push(' ');
                line.push_str(&a.to_string());
            }
            line.push(' ');
            line.push_str(&w.to_string());
            line.push('\n');
            line
        };
        for node in &self.nodes {
            out.push_str(&row("", node.r, &node.angles, node.weight));
        }
        for node in &self.boundary {
            out.push_str(&row("b ", node.r, &node.angles, node.weight));
        }
        out
    }
}
