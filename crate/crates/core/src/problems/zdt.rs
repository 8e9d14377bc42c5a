//! ZDT1-3 on `[0, 1]^n`.

use std::f64::consts::PI;

use crate::problem::Objectives;

/// Gradients use `max(x_1, 1e-12)` to stay finite on the face `x_1 = 0`.
const X1_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Zdt {
    One,
    Two,
    Three,
}

impl Zdt {
    fn g(z: &[f64]) -> f64 {
        let n = z.len();
        1.0 + 9.0 * z[1..].iter().sum::<f64>() / (n - 1) as f64
    }

    /// Objective pair on the analytic front as a function of `x_1`.
    pub(crate) fn front_point(self, x1: f64) -> Vec<f64> {
        let f2 = match self {
            Zdt::One => 1.0 - x1.sqrt(),
            Zdt::Two => 1.0 - x1 * x1,
            Zdt::Three => 1.0 - x1.sqrt() - x1 * (10.0 * PI * x1).sin(),
        };
        vec![x1, f2]
    }
}

impl Objectives for Zdt {
    fn eval(&self, z: &[f64]) -> Vec<f64> {
        let x1 = z[0];
        let g = Self::g(z);
        let f2 = match self {
            Zdt::One => g - (x1 * g).sqrt(),
            Zdt::Two => g - x1 * x1 / g,
            Zdt::Three => g - (x1 * g).sqrt() - x1 * (10.0 * PI * x1).sin(),
        };
        vec![x1, f2]
    }

    fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        let n = z.len();
        let c = 9.0 / (n - 1) as f64;
        let x1 = z[0].max(X1_FLOOR);
        let g = Self::g(z);
        let (d1, dg) = match self {
            Zdt::One => (-0.5 * (g / x1).sqrt(), 1.0 - 0.5 * (x1 / g).sqrt()),
            Zdt::Two => (-2.0 * z[0] / g, 1.0 + z[0] * z[0] / (g * g)),
            Zdt::Three => (
                -0.5 * (g / x1).sqrt()
                    - (10.0 * PI * z[0]).sin()
                    - 10.0 * PI * z[0] * (10.0 * PI * z[0]).cos(),
                1.0 - 0.5 * (x1 / g).sqrt(),
            ),
        };
        let mut row1 = vec![0.0; n];
        row1[0] = 1.0;
        let mut row2 = vec![c * dg; n];
        row2[0] = d1;
        vec![row1, row2]
    }
}

/// `x_1` intervals that map onto the disconnected ZDT3 front.
pub(crate) const ZDT3_SEGMENTS: [(f64, f64); 5] = [
    (0.0, 0.083_001_534_9),
    (0.182_228_728_0, 0.257_762_363_4),
    (0.409_313_674_8, 0.453_882_104_1),
    (0.618_396_794_4, 0.652_511_703_8),
    (0.823_331_798_3, 0.851_832_865_4),
];

/// `count` front points. ZDT1 is sampled evenly in `sqrt(f_1)`, ZDT2 in `f_1`
/// and ZDT3 evenly along the total length of its segments.
pub(crate) fn front(kind: Zdt, count: usize) -> Vec<Vec<f64>> {
    let unit = |i: usize| {
        if count <= 1 {
            0.0
        } else {
            i as f64 / (count - 1) as f64
        }
    };
    match kind {
        Zdt::One => (0..count)
            .map(|i| kind.front_point(unit(i).powi(2)))
            .collect(),
        Zdt::Two => (0..count).map(|i| kind.front_point(unit(i))).collect(),
        Zdt::Three => {
            let total: f64 = ZDT3_SEGMENTS.iter().map(|(a, b)| b - a).sum();
            (0..count)
                .map(|i| {
                    let mut s = unit(i) * total;
                    for (a, b) in ZDT3_SEGMENTS {
                        if s <= b - a {
                            return kind.front_point(a + s);
                        }
                        s -= b - a;
                    }
                    let (_, b) = ZDT3_SEGMENTS[4];
                    kind.front_point(b)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zdt1_origin_is_on_the_front() {
        assert_eq!(Zdt::One.eval(&[0.0; 30]), vec![0.0, 1.0]);
    }

    #[test]
    fn zdt1_front_sample() {
        assert_eq!(
            front(Zdt::One, 3),
            vec![vec![0.0, 1.0], vec![0.25, 0.5], vec![1.0, 0.0]]
        );
    }

    #[test]
    fn zdt3_front_follows_closed_form() {
        for p in front(Zdt::Three, 57) {
            let expect = 1.0 - p[0].sqrt() - p[0] * (10.0 * PI * p[0]).sin();
            assert!((p[1] - expect).abs() < 1e-15);
        }
    }
}
