//! Small problems with a dominated local front, for exercising escapes.
//!
//! Both share the one-dimensional landscape `phi` below, tilted by `+/- t z_1`.
//! Reading left to right on `[0, 3]`:
//!
//! ```text
//!  wall | global plateau | cliff | gentle ridge | local plateau | wall
//!  0   0.3              0.9     0.9           1.4             2.6     3
//! ```
//!
//! Both plateaus are critical (`|phi'| < t`), so each is a weakly efficient
//! segment. The local plateau sits `0.04` above the global one, which is more
//! than the tilt can make up across the box, so the global plateau dominates
//! it. The ridge climbs gently (slope 0.02) toward the cliff so the global
//! phase can walk over it, while everything right of the cliff drains into the
//! local plateau during local search.

use crate::problem::Objectives;

pub(crate) const TILT: f64 = 0.01;
/// `z_1` range of the global plateau shared by GDTEST1 and GDTEST2.
pub const GLOBAL_PLATEAU: (f64, f64) = (0.3, 0.9);
/// `z_1` range of the dominated local plateau.
pub const LOCAL_PLATEAU: (f64, f64) = (1.4, 2.6);
const CLIFF_HEIGHT: f64 = 0.05;
const CLIFF_WIDTH: f64 = 0.005;
const RIDGE_SLOPE: f64 = 0.02;
const SOFTNESS: f64 = 0.01;
const WALL: f64 = 0.5;

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Softplus `s ln(1 + e^(x/s))` and its derivative.
fn softplus(x: f64) -> (f64, f64) {
    let y = x / SOFTNESS;
    let v = if y > 30.0 {
        x
    } else {
        SOFTNESS * y.exp().ln_1p()
    };
    (v, logistic(y))
}

/// Landscape value and derivative.
pub(crate) fn phi(z: f64) -> (f64, f64) {
    let (g_l, g_r) = GLOBAL_PLATEAU;
    let (l_l, l_r) = LOCAL_PLATEAU;
    let c = logistic((z - g_r) / CLIFF_WIDTH);
    let cliff = (CLIFF_HEIGHT * c, CLIFF_HEIGHT * c * (1.0 - c) / CLIFF_WIDTH);
    let (r1, dr1) = softplus(z - g_r);
    let (r2, dr2) = softplus(z - l_l);
    let ridge = (-RIDGE_SLOPE * (r1 - r2), -RIDGE_SLOPE * (dr1 - dr2));
    let (wl, dwl) = softplus(g_l - z);
    let (wr, dwr) = softplus(z - l_r);
    let walls = (
        WALL * (wl * wl + wr * wr),
        WALL * (-2.0 * wl * dwl + 2.0 * wr * dwr),
    );
    (cliff.0 + ridge.0 + walls.0, cliff.1 + ridge.1 + walls.1)
}

/// `(phi(z) + t z, phi(z) - t z)`.
pub(crate) struct Escape1;

impl Objectives for Escape1 {
    fn eval(&self, z: &[f64]) -> Vec<f64> {
        let (p, _) = phi(z[0]);
        vec![p + TILT * z[0], p - TILT * z[0]]
    }

    fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        let (_, dp) = phi(z[0]);
        vec![vec![dp + TILT], vec![dp - TILT]]
    }
}

/// The same landscape in `z_1` plus quadratics in `z_2` centered at 0.3 and
/// 0.7, so both fronts are segments along `z_1` at `z_2 = 0.5`.
pub(crate) struct Escape2;

const Q: f64 = 0.05;

impl Objectives for Escape2 {
    fn eval(&self, z: &[f64]) -> Vec<f64> {
        let (p, _) = phi(z[0]);
        vec![
            p + TILT * z[0] + Q * (z[1] - 0.3).powi(2),
            p - TILT * z[0] + Q * (z[1] - 0.7).powi(2),
        ]
    }

    fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        let (_, dp) = phi(z[0]);
        vec![
            vec![dp + TILT, 2.0 * Q * (z[1] - 0.3)],
            vec![dp - TILT, 2.0 * Q * (z[1] - 0.7)],
        ]
    }
}

/// Global front of `Escape1`: the plateau image, sampled evenly in `z`.
pub(crate) fn front1(count: usize) -> Vec<Vec<f64>> {
    let (a, b) = GLOBAL_PLATEAU;
    (0..count)
        .map(|i| {
            let z = if count <= 1 {
                a
            } else {
                a + (b - a) * i as f64 / (count - 1) as f64
            };
            Escape1.eval(&[z])
        })
        .collect()
}

/// Global front of `Escape2` (at `z_2 = 0.5`).
pub(crate) fn front2(count: usize) -> Vec<Vec<f64>> {
    let (a, b) = GLOBAL_PLATEAU;
    (0..count)
        .map(|i| {
            let z = if count <= 1 {
                a
            } else {
                a + (b - a) * i as f64 / (count - 1) as f64
            };
            Escape2.eval(&[z, 0.5])
        })
        .collect()
}
