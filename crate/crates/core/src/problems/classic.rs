//! Small smooth problems: Fonseca-Fleming and two convex quadratic pairs.

use crate::problem::Objectives;

/// `f_{1,2} = 1 - exp(-sum (z_i -/+ 1/sqrt(n))^2)`.
pub(crate) struct FonsecaFleming;

impl Objectives for FonsecaFleming {
    fn eval(&self, z: &[f64]) -> Vec<f64> {
        let s = 1.0 / (z.len() as f64).sqrt();
        let a: f64 = z.iter().map(|x| (x - s).powi(2)).sum();
        let b: f64 = z.iter().map(|x| (x + s).powi(2)).sum();
        vec![1.0 - (-a).exp(), 1.0 - (-b).exp()]
    }

    fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        let s = 1.0 / (z.len() as f64).sqrt();
        let ea = (-z.iter().map(|x| (x - s).powi(2)).sum::<f64>()).exp();
        let eb = (-z.iter().map(|x| (x + s).powi(2)).sum::<f64>()).exp();
        vec![
            z.iter().map(|x| 2.0 * (x - s) * ea).collect(),
            z.iter().map(|x| 2.0 * (x + s) * eb).collect(),
        ]
    }
}

/// Front points `z_i = t` for `t` evenly spaced in `[-1/sqrt(n), 1/sqrt(n)]`.
pub(crate) fn fonseca_front(n: usize, count: usize) -> Vec<Vec<f64>> {
    let s = 1.0 / (n as f64).sqrt();
    (0..count)
        .map(|i| {
            let t = if count <= 1 {
                0.0
            } else {
                -s + 2.0 * s * i as f64 / (count - 1) as f64
            };
            FonsecaFleming.eval(&vec![t; n])
        })
        .collect()
}

/// `(||z||^2, ||z - e||^2)` with `e` the all-ones vector.
pub(crate) struct ConvexPair;

impl Objectives for ConvexPair {
    fn eval(&self, z: &[f64]) -> Vec<f64> {
        vec![
            z.iter().map(|x| x * x).sum(),
            z.iter().map(|x| (x - 1.0).powi(2)).sum(),
        ]
    }

    fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        vec![
            z.iter().map(|x| 2.0 * x).collect(),
            z.iter().map(|x| 2.0 * (x - 1.0)).collect(),
        ]
    }
}

/// Front `(n t^2, n (1 - t)^2)` for `t` evenly spaced in `[0, 1]`.
pub(crate) fn convex_front(n: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let t = if count <= 1 {
                0.0
            } else {
                i as f64 / (count - 1) as f64
            };
            ConvexPair.eval(&vec![t; n])
        })
        .collect()
}
