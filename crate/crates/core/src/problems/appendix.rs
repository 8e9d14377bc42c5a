//! Ackley, Levy, Styblinski-Tang and Rastrigin combinations.

use std::f64::consts::{E, PI};

use crate::problem::Objectives;

/// Levy form `(pi / n) [k sin^2(pi z_1) + sum (z_i - a)^2 (1 + k sin^2(pi z_{i+1})) + (z_n - a)^2]`
/// with `k = 10`, `a = 1`.
pub(crate) fn levy(z: &[f64]) -> (f64, Vec<f64>) {
    let (k, a) = (10.0, 1.0);
    let n = z.len();
    let scale = PI / n as f64;
    let mut value = k * (PI * z[0]).sin().powi(2);
    let mut grad = vec![0.0; n];
    grad[0] += k * PI * (2.0 * PI * z[0]).sin();
    for i in 0..n - 1 {
        let w = 1.0 + k * (PI * z[i + 1]).sin().powi(2);
        let d = z[i] - a;
        value += d * d * w;
        grad[i] += 2.0 * d * w;
        grad[i + 1] += d * d * k * PI * (2.0 * PI * z[i + 1]).sin();
    }
    let d = z[n - 1] - a;
    value += d * d;
    grad[n - 1] += 2.0 * d;
    (scale * value, grad.into_iter().map(|g| scale * g).collect())
}

/// Levy variant `k1 [sin^2(pi l0 z_1) + sum (z_i - a)^2 (1 + k0 sin^2(pi l1 z_{i+1}))
/// + (z_n - a)^2 (1 + k0 sin^2(2 pi l1 z_n))]`.
pub(crate) fn levy_scaled(z: &[f64]) -> (f64, Vec<f64>) {
    let (l0, l1, k0, k1, a) = (3.0, 2.0, 1.0, 0.1, 1.0);
    let n = z.len();
    let mut value = (PI * l0 * z[0]).sin().powi(2);
    let mut grad = vec![0.0; n];
    grad[0] += PI * l0 * (2.0 * PI * l0 * z[0]).sin();
    for i in 0..n - 1 {
        let w = 1.0 + k0 * (PI * l1 * z[i + 1]).sin().powi(2);
        let d = z[i] - a;
        value += d * d * w;
        grad[i] += 2.0 * d * w;
        grad[i + 1] += d * d * k0 * PI * l1 * (2.0 * PI * l1 * z[i + 1]).sin();
    }
    let d = z[n - 1] - a;
    let w = 1.0 + k0 * (2.0 * PI * l1 * z[n - 1]).sin().powi(2);
    value += d * d * w;
    grad[n - 1] += 2.0 * d * w + d * d * k0 * 2.0 * PI * l1 * (4.0 * PI * l1 * z[n - 1]).sin();
    (k1 * value, grad.into_iter().map(|g| k1 * g).collect())
}

/// Ackley `c1 + e - c1 exp(-c2 sqrt(mean z^2)) - exp(mean cos(c3 z))` with
/// `c1 = 20`, `c2 = 0.2`, `c3 = 2 pi`.
pub(crate) fn ackley(z: &[f64]) -> (f64, Vec<f64>) {
    let (c1, c2, c3) = (20.0, 0.2, 2.0 * PI);
    let n = z.len() as f64;
    let r = (z.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    let s = z.iter().map(|x| (c3 * x).cos()).sum::<f64>() / n;
    let e1 = (-c2 * r).exp();
    let e2 = s.exp();
    let value = c1 + E - c1 * e1 - e2;
    let grad = z
        .iter()
        .map(|&x| {
            let radial = if r > 0.0 {
                c1 * c2 * e1 * x / (n * r)
            } else {
                0.0
            };
            radial + e2 * c3 * (c3 * x).sin() / n
        })
        .collect();
    (value, grad)
}

/// `0.5 sum (z^4 - 16 z^2 + 5 z)`.
pub(crate) fn styblinski_tang(z: &[f64]) -> (f64, Vec<f64>) {
    let value = 0.5
        * z.iter()
            .map(|x| x.powi(4) - 16.0 * x * x + 5.0 * x)
            .sum::<f64>();
    let grad = z
        .iter()
        .map(|x| 0.5 * (4.0 * x.powi(3) - 32.0 * x + 5.0))
        .collect();
    (value, grad)
}

/// `A n + sum (z^2 - A cos(omega z))` with `A = 10`, `omega = 2 pi`.
pub(crate) fn rastrigin(z: &[f64]) -> (f64, Vec<f64>) {
    let (a, w) = (10.0, 2.0 * PI);
    let value = a * z.len() as f64 + z.iter().map(|x| x * x - a * (w * x).cos()).sum::<f64>();
    let grad = z.iter().map(|x| 2.0 * x + a * w * (w * x).sin()).collect();
    (value, grad)
}

type Scalar = fn(&[f64]) -> (f64, Vec<f64>);

/// Two scalar functions with analytic gradients stacked into a bi-objective map.
pub(crate) struct Pair(pub Scalar, pub Scalar);

impl Objectives for Pair {
    fn eval(&self, z: &[f64]) -> Vec<f64> {
        vec![(self.0)(z).0, (self.1)(z).0]
    }

    fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        vec![(self.0)(z).1, (self.1)(z).1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levy_vanishes_at_ones() {
        let (v, g) = levy(&[1.0; 20]);
        assert!(v.abs() < 1e-28);
        assert!(g.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn ackley_vanishes_at_origin() {
        let (v, g) = ackley(&[0.0; 20]);
        assert!(v.abs() < 1e-14);
        assert!(g.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn rastrigin_vanishes_at_origin() {
        assert_eq!(rastrigin(&[0.0; 50]).0, 0.0);
    }

    #[test]
    fn styblinski_tang_single_coordinate() {
        // 0.5 (1 - 16 + 5) = -5
        assert_eq!(styblinski_tang(&[1.0]).0, -5.0);
    }
}
