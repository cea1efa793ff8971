//! Simpson quadrature over trajectory grids.
//!
//! A trajectory's integrand is sampled at "nodes": one per grid point, plus
//! one extra node per generator switch carrying the left-limit value. Each
//! smooth segment is integrated separately, so a jump at a switch never sits
//! inside a Simpson panel.

use crate::dynamics::Trajectory;
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

/// Node weights for the integral on the full grid and on every other point.
#[derive(Debug, Clone)]
pub struct QuadratureRule<T> {
    fine: Vec<T>,
    coarse: Vec<T>,
}

/// An integral and its relative change when the grid is halved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub residual: T,
}

impl<T: Real> QuadratureRule<T> {
    pub fn for_trajectory(traj: &Trajectory<T>) -> Self {
        let times = traj.times();
        let k = times.len();
        let node_count = k + traj.breaks().len();
        let mut fine = vec![T::zero(); node_count];
        let mut coarse = vec![T::zero(); node_count];
        for (a, b) in traj.segments() {
            let right_node = traj
                .breaks()
                .iter()
                .position(|br| br.index == b)
                .map(|i| k + i)
                .unwrap_or(b);
            let node = |i: usize| if i == b { right_node } else { i };

            let all: Vec<usize> = (a..=b).collect();
            let f = simpson_weights(&all.iter().map(|&i| times[i]).collect::<Vec<_>>());
            for (&i, w) in all.iter().zip(f) {
                fine[node(i)] = fine[node(i)] + w;
            }

            let mut every_other: Vec<usize> = (a..=b).step_by(2).collect();
            if *every_other.last().expect("non-empty") != b {
                every_other.push(b);
            }
            let sub = if every_other.len() >= 3 { &every_other } else { &all };
            let c = simpson_weights(&sub.iter().map(|&i| times[i]).collect::<Vec<_>>());
            for (&i, w) in sub.iter().zip(c) {
                coarse[node(i)] = coarse[node(i)] + w;
            }
        }
        Self { fine, coarse }
    }

    pub fn node_count(&self) -> usize {
        self.fine.len()
    }

    /// Integral of node values, with `|S_h - S_2h| / |S_h|` as the residual.
    pub fn integrate(&self, values: &[T]) -> Integral<T> {
        debug_assert_eq!(values.len(), self.fine.len());
        let mut s_fine = T::zero();
        let mut s_coarse = T::zero();
        for ((&v, &f), &c) in values.iter().zip(&self.fine).zip(&self.coarse) {
            s_fine = s_fine + f * v;
            s_coarse = s_coarse + c * v;
        }
        let diff = (s_fine - s_coarse).abs();
        let residual = if diff == T::zero() {
            T::zero()
        } else if s_fine == T::zero() {
            T::infinity()
        } else {
            diff / s_fine.abs()
        };
        Integral {
            value: s_fine,
            residual,
        }
    }
}

/// Derivative values at the quadrature nodes of a trajectory.
pub fn derivative_nodes<T: Real>(traj: &Trajectory<T>) -> Vec<&ComplexMatrix<T>> {
    traj.derivatives()
        .iter()
        .chain(traj.breaks().iter().map(|b| &b.left_derivative))
        .collect()
}

/// Time of each quadrature node.
pub fn node_times<T: Real>(traj: &Trajectory<T>) -> Vec<T> {
    let t = traj.times();
    t.iter().copied().chain(traj.breaks().iter().map(|b| t[b.index])).collect()
}

/// Composite Simpson weights on possibly non-uniform points.
///
/// Pairs of intervals use the three-point rule; an odd interval count is
/// closed with the three-point rule restricted to the last interval.
pub fn simpson_weights<T: Real>(x: &[T]) -> Vec<T> {
    let m = x.len() - 1;
    let mut w = vec![T::zero(); x.len()];
    if m == 0 {
        return w;
    }
    if m == 1 {
        let h = (x[1] - x[0]) * T::lit(0.5);
        return vec![h, h];
    }
    let six = T::lit(6.0);
    let two = T::lit(2.0);
    let pairs_end = if m % 2 == 0 { m } else { m - 1 };
    let mut i = 0;
    while i < pairs_end {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let s = (h0 + h1) / six;
        w[i] = w[i] + s * (two - h1 / h0);
        w[i + 1] = w[i + 1] + s * (h0 + h1) * (h0 + h1) / (h0 * h1);
        w[i + 2] = w[i + 2] + s * (two - h0 / h1);
        i += 2;
    }
    if m % 2 == 1 {
        let h0 = x[m - 1] - x[m - 2];
        let h1 = x[m] - x[m - 1];
        w[m] = w[m] + h1 * (two * h1 + T::lit(3.0) * h0) / (six * (h0 + h1));
        w[m - 1] = w[m - 1] + h1 * (h1 + T::lit(3.0) * h0) / (six * h0);
        w[m - 2] = w[m - 2] - h1 * h1 * h1 / (six * h0 * (h0 + h1));
    }
    w
}

/// Integral of samples over their abscissae.
pub fn simpson<T: Real>(x: &[T], y: &[T]) -> T {
    simpson_weights(x).iter().zip(y).map(|(&w, &v)| w * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    #[test]
    fn exact_on_cubics_even_and_odd() {
        let f = |t: f64| 2.0 * t * t * t - t * t + 3.0;
        let exact = 0.5 * 16.0 - 8.0 / 3.0 + 6.0;
        for n in [2, 3, 4, 5, 8, 9] {
            let x = grid(n, 0.0, 2.0);
            let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
            let s = simpson(&x, &y);
            // the odd-count end panel is exact for quadratics only; its cubic error is h^4 / 2 here
            let h = 2.0 / n as f64;
            let tol = if n % 2 == 0 { 1e-12 } else { 0.51 * h.powi(4) };
            assert!((s - exact).abs() < tol, "n={n} s={s}");
        }
    }

    #[test]
    fn exact_on_quadratics_nonuniform() {
        let x = vec![0.0, 0.1, 0.5, 0.6, 1.3, 2.0];
        let y: Vec<f64> = x.iter().map(|&t| 1.0 + t - 3.0 * t * t).collect();
        let exact = 2.0 + 2.0 - 8.0;
        assert!((simpson(&x, &y) - exact).abs() < 1e-12);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let x = grid(n, 0.0, 1.0);
            let y: Vec<f64> = x.iter().map(|t| t.exp()).collect();
            (simpson(&x, &y) - (1f64.exp() - 1.0)).abs()
        };
        let ratio = err(16) / err(32);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
