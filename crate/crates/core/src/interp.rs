//! Monotone cubic Hermite interpolation (Fritsch–Carlson).

use crate::scalar::Real;

/// Piecewise cubic Hermite interpolant on strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> MonotoneCubic<T> {
    /// Interpolant with slopes estimated from the data.
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Self {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n);
        let secants: Vec<T> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut slopes = vec![T::zero(); n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if secants[i - 1] * secants[i] <= T::zero() {
                T::zero()
            } else {
                (secants[i - 1] + secants[i]) / T::of(2.0)
            };
        }
        Self::with_slopes(xs, ys, slopes)
    }

    /// Interpolant with caller-supplied slopes, limited so each piece stays monotone.
    pub fn with_slopes(xs: Vec<T>, ys: Vec<T>, mut slopes: Vec<T>) -> Self {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n && slopes.len() == n);
        for i in 0..n - 1 {
            let delta = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            if delta == T::zero() {
                slopes[i] = T::zero();
                slopes[i + 1] = T::zero();
                continue;
            }
            if slopes[i] / delta < T::zero() {
                slopes[i] = T::zero();
            }
            if slopes[i + 1] / delta < T::zero() {
                slopes[i + 1] = T::zero();
            }
            let a = slopes[i] / delta;
            let b = slopes[i + 1] / delta;
            let r2 = a * a + b * b;
            let nine = T::of(9.0);
            if r2 > nine {
                let t = T::of(3.0) / r2.sqrt();
                slopes[i] = t * a * delta;
                slopes[i + 1] = t * b * delta;
            }
        }
        MonotoneCubic { xs, ys, slopes }
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    /// Index `i` with `xs[i] <= x <= xs[i+1]`, clamped to the table.
    pub fn locate(&self, x: T) -> usize {
        let n = self.xs.len();
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).expect("finite abscissa")) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    pub fn eval(&self, x: T) -> T {
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let two = T::of(2.0);
        let three = T::of(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_cubic_with_exact_slopes() {
        let xs: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x * x + x).collect();
        let ds: Vec<f64> = xs.iter().map(|x| 3.0 * x * x + 1.0).collect();
        let p = MonotoneCubic::with_slopes(xs, ys, ds);
        for x in [0.05, 0.333, 0.77, 0.999] {
            assert!((p.eval(x) - (x * x * x + x)).abs() < 1e-14);
        }
    }

    #[test]
    fn flat_data_stays_flat() {
        let p = MonotoneCubic::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 1.0, 2.0]);
        for i in 0..=100 {
            let x = 1.0 + i as f64 / 100.0;
            assert!((p.eval(x) - 1.0).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn monotone_data_gives_monotone_interpolant(
            steps in proptest::collection::vec((0.01f64..2.0, 0.0f64..5.0), 2..20)
        ) {
            let mut xs = vec![0.0];
            let mut ys = vec![0.0];
            for (dx, dy) in &steps {
                xs.push(xs.last().unwrap() + dx);
                ys.push(ys.last().unwrap() + dy);
            }
            let p = MonotoneCubic::new(xs.clone(), ys);
            let end = *xs.last().unwrap();
            let mut prev = p.eval(0.0);
            for i in 1..=500 {
                let v = p.eval(end * i as f64 / 500.0);
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
        }
    }
}
