//! DTLZ1-3 on `[0, 1]^n` with `k = n - m + 1` distance variables.

use std::f64::consts::PI;

use crate::problem::Objectives;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dtlz {
    One,
    Two,
    Three,
}

#[derive(Debug, Clone, Copy)]
enum Factor {
    Linear,
    OneMinus,
    Cos,
    Sin,
}

impl Factor {
    fn value(self, x: f64) -> f64 {
        match self {
            Factor::Linear => x,
            Factor::OneMinus => 1.0 - x,
            Factor::Cos => (0.5 * PI * x).cos(),
            Factor::Sin => (0.5 * PI * x).sin(),
        }
    }

    fn derivative(self, x: f64) -> f64 {
        match self {
            Factor::Linear => 1.0,
            Factor::OneMinus => -1.0,
            Factor::Cos => -0.5 * PI * (0.5 * PI * x).sin(),
            Factor::Sin => 0.5 * PI * (0.5 * PI * x).cos(),
        }
    }
}

pub(crate) struct DtlzProblem {
    pub kind: Dtlz,
    pub m: usize,
}

impl DtlzProblem {
    /// Rastrigin-like distance function of DTLZ1 and DTLZ3.
    fn g_multimodal(xm: &[f64]) -> (f64, Vec<f64>) {
        let k = xm.len() as f64;
        let w = 20.0 * PI;
        let value = 100.0
            * (k + xm
                .iter()
                .map(|x| (x - 0.5).powi(2) - (w * (x - 0.5)).cos())
                .sum::<f64>());
        let grad = xm
            .iter()
            .map(|x| 100.0 * (2.0 * (x - 0.5) + w * (w * (x - 0.5)).sin()))
            .collect();
        (value, grad)
    }

    fn g_sphere(xm: &[f64]) -> (f64, Vec<f64>) {
        let value = xm.iter().map(|x| (x - 0.5).powi(2)).sum();
        let grad = xm.iter().map(|x| 2.0 * (x - 0.5)).collect();
        (value, grad)
    }

    fn g(&self, xm: &[f64]) -> (f64, Vec<f64>) {
        match self.kind {
            Dtlz::Two => Self::g_sphere(xm),
            Dtlz::One | Dtlz::Three => Self::g_multimodal(xm),
        }
    }

    /// Position factors of objective `i` as `(variable, factor)` pairs, plus
    /// the constant scale.
    fn shape(&self, i: usize) -> (f64, Vec<(usize, Factor)>) {
        let m = self.m;
        let (scale, inner, last) = match self.kind {
            Dtlz::One => (0.5, Factor::Linear, Factor::OneMinus),
            Dtlz::Two | Dtlz::Three => (1.0, Factor::Cos, Factor::Sin),
        };
        let mut factors: Vec<(usize, Factor)> = (0..m - 1 - i).map(|p| (p, inner)).collect();
        if i > 0 {
            factors.push((m - 1 - i, last));
        }
        (scale, factors)
    }
}

impl Objectives for DtlzProblem {
    fn eval(&self, z: &[f64]) -> Vec<f64> {
        let (g, _) = self.g(&z[self.m - 1..]);
        (0..self.m)
            .map(|i| {
                let (scale, factors) = self.shape(i);
                scale * (1.0 + g) * factors.iter().map(|&(p, f)| f.value(z[p])).product::<f64>()
            })
            .collect()
    }

    fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        let n = z.len();
        let split = self.m - 1;
        let (g, dg) = self.g(&z[split..]);
        (0..self.m)
            .map(|i| {
                let (scale, factors) = self.shape(i);
                let h: f64 = factors.iter().map(|&(p, f)| f.value(z[p])).product();
                let mut row = vec![0.0; n];
                for (a, &(p, f)) in factors.iter().enumerate() {
                    let others: f64 = factors
                        .iter()
                        .enumerate()
                        .filter(|&(b, _)| b != a)
                        .map(|(_, &(q, fq))| fq.value(z[q]))
                        .product();
                    row[p] = scale * (1.0 + g) * f.derivative(z[p]) * others;
                }
                for (r, d) in row[split..].iter_mut().zip(&dg) {
                    *r = scale * h * d;
                }
                row
            })
            .collect()
    }
}

/// Simplex lattice points with `sum = 1` for `m` components and `h` divisions.
fn lattice(m: usize, h: usize) -> Vec<Vec<f64>> {
    fn rec(m: usize, left: usize, h: usize, cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == m - 1 {
            cur.push(left as f64 / h as f64);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=left).rev() {
            cur.push(a as f64 / h as f64);
            rec(m, left - a, h, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, h, h, &mut Vec::new(), &mut out);
    out
}

/// `count` points of the DTLZ front: the simplex `sum f = 1/2` for DTLZ1 and
/// the positive unit sphere otherwise.
pub(crate) fn front(kind: Dtlz, m: usize, count: usize) -> Vec<Vec<f64>> {
    if count == 0 {
        return Vec::new();
    }
    let mut h = 1;
    let points = loop {
        let l = lattice(m, h);
        if l.len() >= count || count == 1 {
            break l;
        }
        h += 1;
    };
    let picked: Vec<Vec<f64>> = if count == 1 {
        vec![points[0].clone()]
    } else {
        (0..count)
            .map(|i| points[i * (points.len() - 1) / (count - 1)].clone())
            .collect()
    };
    picked
        .into_iter()
        .map(|w| match kind {
            Dtlz::One => w.iter().map(|x| 0.5 * x).collect(),
            Dtlz::Two | Dtlz::Three => {
                let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                w.iter().map(|x| x / norm).collect()
            }
        })
        .collect()
}
