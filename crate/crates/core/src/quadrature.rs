//! Quadrature rules and deterministic summation.

use crate::scalar::Real;

/// A one-dimensional rule on a reference interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

/// Gauss–Legendre rule with `m` nodes on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(m: usize) -> Rule<T> {
    assert!(m >= 1, "rule needs at least one node");
    let mut nodes = vec![T::zero(); m];
    let mut weights = vec![T::zero(); m];
    let one = T::one();
    let two = T::of(2.0);
    let tol = T::epsilon() * T::of(4.0);
    for i in 0..m.div_ceil(2) {
        let mut x = (T::PI() * (T::of_usize(i) + T::of(0.75)) / (T::of_usize(m) + T::of(0.5))).cos();
        let mut dp = one;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= tol {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != T::zero() {
            dp = d;
        }
        let w = two / ((one - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = T::zero();
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative<T: Real>(m: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if m == 0 {
        return (p0, T::zero());
    }
    for j in 2..=m {
        let jf = T::of_usize(j);
        let p2 = ((T::of(2.0) * jf - T::one()) * x * p1 - (jf - T::one()) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let mf = T::of_usize(m);
    let d = mf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// `∫_0^π sin^p θ dθ`.
pub fn sine_power_integral<T: Real>(p: usize) -> T {
    let mut w = if p.is_multiple_of(2) { T::PI() } else { T::of(2.0) };
    let mut j = if p.is_multiple_of(2) { 2 } else { 3 };
    while j <= p {
        w = w * T::of_usize(j - 1) / T::of_usize(j);
        j += 2;
    }
    w
}

/// Gauss rule in `t = cos θ` for `∫_0^π f(θ) sin^p θ dθ`, `p >= 1`.
///
/// The weight `(1 - t²)^{(p-1)/2}` is Gegenbauer; nodes are the eigenvalues of
/// its Jacobi matrix, found by Sturm-sequence bisection.
pub fn gauss_gegenbauer<T: Real>(m: usize, p: usize) -> Rule<T> {
    assert!(m >= 1 && p >= 1);
    let pf = T::of_usize(p);
    let two = T::of(2.0);
    // b[j] = sqrt(beta_j), j = 1..m-1
    let b: Vec<T> = (0..m)
        .map(|j| {
            if j == 0 {
                return T::zero();
            }
            let jf = T::of_usize(j);
            let beta = jf * (jf + pf - T::one()) / ((two * jf + pf) * (two * jf + pf - two));
            beta.sqrt()
        })
        .collect();
    let mu0: T = sine_power_integral(p);

    let count_below = |lambda: T| -> usize {
        let tiny = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut q = -lambda;
        if q == T::zero() {
            q = -tiny;
        }
        if q < T::zero() {
            count += 1;
        }
        for &bj in &b[1..m] {
            q = -lambda - bj * bj / q;
            if q == T::zero() {
                q = -tiny;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    };

    let mut nodes = Vec::with_capacity(m);
    for i in 0..m {
        let (mut lo, mut hi) = (-T::one(), T::one());
        for _ in 0..200 {
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            if count_below(mid) > i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        nodes.push((lo + hi) / two);
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let mut prev = T::zero();
            let mut cur = T::one() / mu0.sqrt();
            let mut acc = cur * cur;
            for j in 1..m {
                let next = (x * cur - b[j - 1] * prev) / b[j];
                prev = cur;
                cur = next;
                acc = acc + cur * cur;
            }
            T::one() / acc
        })
        .collect();
    Rule { nodes, weights }
}

/// Product rule on the unit sphere `S^d ⊂ R^{d+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule<T> {
    pub dim: usize,
    /// Unit vectors in `R^{d+1}`.
    pub points: Vec<Vec<T>>,
    /// Hyperspherical angles, polar angles first and azimuth last.
    pub angles: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

impl<T: Real> SphereRule<T> {
    /// `m` nodes per polar angle and `2m` in azimuth.
    pub fn new(dim: usize, m: usize) -> Self {
        assert!(dim >= 1 && m >= 1);
        if dim == 1 {
            let count = 2 * m;
            let step = T::of(2.0) * T::PI() / T::of_usize(count);
            let mut points = Vec::with_capacity(count);
            let mut angles = Vec::with_capacity(count);
            for j in 0..count {
                let phi = step * (T::of_usize(j) + T::of(0.5));
                points.push(vec![phi.cos(), phi.sin()]);
                angles.push(vec![phi]);
            }
            return SphereRule { dim, points, angles, weights: vec![step; count] };
        }
        let inner = SphereRule::new(dim - 1, m);
        let polar: Rule<T> = gauss_gegenbauer(m, dim - 1);
        let mut points = Vec::new();
        let mut angles = Vec::new();
        let mut weights = Vec::new();
        for (&t, &wt) in polar.nodes.iter().zip(&polar.weights) {
            let st = (T::one() - t * t).max(T::zero()).sqrt();
            let theta = t.acos();
            for ((y, a), &wy) in inner.points.iter().zip(&inner.angles).zip(&inner.weights) {
                let mut x = Vec::with_capacity(dim + 1);
                x.push(t);
                x.extend(y.iter().map(|&v| st * v));
                points.push(x);
                let mut ang = Vec::with_capacity(dim);
                ang.push(theta);
                ang.extend_from_slice(a);
                angles.push(ang);
                weights.push(wt * wy);
            }
        }
        SphereRule { dim, points, angles, weights }
    }

    /// Rule whose node count is close to `target`.
    pub fn with_target(dim: usize, target: usize) -> Self {
        let m = ((target.max(2) as f64 / 2.0).powf(1.0 / dim as f64)).round() as usize;
        Self::new(dim, m.max(2))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Area of the unit sphere `S^d`.
pub fn sphere_area<T: Real>(d: usize) -> T {
    // |S^d| = |S^{d-1}| * ∫ sin^{d-1}
    let mut area = T::of(2.0); // |S^0|
    for j in 1..=d {
        area = area * sine_power_integral::<T>(j - 1);
    }
    area
}

/// Volume of the unit ball in `R^k`.
pub fn ball_volume<T: Real>(k: usize) -> T {
    sphere_area::<T>(k - 1) / T::of_usize(k)
}

/// Composite Gauss–Legendre integral of `f` over `[a, b]`.
pub fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T, panels: usize, rule: &Rule<T>) -> T {
    let width = (b - a) / T::of_usize(panels);
    let half = width / T::of(2.0);
    let mut terms = Vec::with_capacity(panels * rule.nodes.len());
    for p in 0..panels {
        let mid = a + width * (T::of_usize(p) + T::of(0.5));
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            terms.push(w * half * f(mid + half * x));
        }
    }
    pairwise_sum(&terms)
}

const SERIAL_BLOCK: usize = 64;
const PARALLEL_CUTOFF: usize = 1 << 14;

/// Pairwise sum over a fixed binary tree.
///
/// The tree depends only on the slice length, so the result is bit-identical
/// whatever the thread count.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    if xs.len() <= SERIAL_BLOCK {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    let (left, right) = xs.split_at(mid);
    if xs.len() >= PARALLEL_CUTOFF {
        let (a, b) = rayon::join(|| pairwise_sum(left), || pairwise_sum(right));
        a + b
    } else {
        pairwise_sum(left) + pairwise_sum(right)
    }
}
