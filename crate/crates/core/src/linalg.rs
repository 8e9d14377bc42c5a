//! Small dense-vector helpers. Vectors are plain `&[f64]` slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Projects `v` onto the unit simplex {x >= 0, sum x = 1}.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Minimum-norm element of the convex hull of `vectors`.
///
/// Returns the simplex weights `lambda` minimizing `|| sum_j lambda_j v_j ||`.
/// Two vectors use the closed-form segment minimizer. Up to
/// [`EXACT_HULL_LIMIT`] vectors enumerate the faces of the simplex: the
/// minimizer over the affine hull of each subset, kept when its weights are
/// nonnegative. More use projected gradient on the simplex.
pub fn min_norm_weights(vectors: &[Vec<f64>]) -> Vec<f64> {
    let m = vectors.len();
    match m {
        0 => Vec::new(),
        1 => vec![1.0],
        2 => {
            let (a, b) = (&vectors[0], &vectors[1]);
            let diff = sub(a, b);
            let dd = dot(&diff, &diff);
            if dd <= f64::MIN_POSITIVE {
                return vec![0.5, 0.5];
            }
            // weight on `a`: minimize || b + t (a - b) ||
            let t = (-dot(b, &diff) / dd).clamp(0.0, 1.0);
            vec![t, 1.0 - t]
        }
        _ if m <= EXACT_HULL_LIMIT => face_enumeration(vectors),
        _ => simplex_projected_gradient(vectors, 1e-10, 20_000),
    }
}

/// Largest vector count solved by face enumeration.
pub const EXACT_HULL_LIMIT: usize = 8;

fn face_enumeration(vectors: &[Vec<f64>]) -> Vec<f64> {
    let m = vectors.len();
    let gram: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| dot(&vectors[i], &vectors[j])).collect())
        .collect();
    let value = |lambda: &[f64]| -> f64 {
        (0..m)
            .map(|i| lambda[i] * (0..m).map(|j| gram[i][j] * lambda[j]).sum::<f64>())
            .sum()
    };
    let mut best = vec![0.0; m];
    let first = (0..m)
        .min_by(|&a, &b| gram[a][a].total_cmp(&gram[b][b]))
        .unwrap_or(0);
    best[first] = 1.0;
    let mut best_value = gram[first][first];
    for mask in 1u32..(1 << m) {
        let face: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        let k = face.len();
        if k < 2 {
            continue;
        }
        // [G_F 1; 1' 0] [lambda; nu] = [0; 1]
        let mut a = vec![vec![0.0; k + 1]; k + 1];
        for (r, &i) in face.iter().enumerate() {
            for (c, &j) in face.iter().enumerate() {
                a[r][c] = gram[i][j];
            }
            a[r][k] = 1.0;
            a[k][r] = 1.0;
        }
        let mut rhs = vec![0.0; k + 1];
        rhs[k] = 1.0;
        let Some(x) = solve_dense(a, rhs) else {
            continue;
        };
        if x[..k].iter().any(|&w| !(w >= -1e-12)) {
            continue;
        }
        let mut lambda = vec![0.0; m];
        let total: f64 = x[..k].iter().map(|w| w.max(0.0)).sum();
        for (r, &i) in face.iter().enumerate() {
            lambda[i] = x[r].max(0.0) / total;
        }
        let v = value(&lambda);
        if v < best_value {
            best_value = v;
            best = lambda;
        }
    }
    best
}

/// Gaussian elimination with partial pivoting; `None` for a (numerically)
/// singular matrix.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn simplex_projected_gradient(vectors: &[Vec<f64>], tol: f64, max_iter: usize) -> Vec<f64> {
    let m = vectors.len();
    let mut gram = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let g = dot(&vectors[i], &vectors[j]);
            gram[i][j] = g;
            gram[j][i] = g;
        }
    }
    // trace bounds the largest eigenvalue of a PSD matrix
    let lipschitz: f64 = (0..m)
        .map(|i| gram[i][i])
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    let step = 1.0 / lipschitz;

    // start from the best vertex
    let best = (0..m)
        .min_by(|&a, &b| gram[a][a].total_cmp(&gram[b][b]))
        .unwrap_or(0);
    let mut lambda = vec![0.0; m];
    lambda[best] = 1.0;

    for _ in 0..max_iter {
        let grad: Vec<f64> = (0..m).map(|i| dot(&gram[i], &lambda)).collect();
        let trial: Vec<f64> = lambda
            .iter()
            .zip(&grad)
            .map(|(l, g)| l - step * g)
            .collect();
        let next = project_simplex(&trial);
        let change = dist(&next, &lambda);
        lambda = next;
        if change < tol {
            break;
        }
    }
    lambda
}

/// Steepest common descent direction inside a box: the minimizer `d` of
/// `max_j v_j . d + |d|^2 / 2` subject to `lo <= d <= hi`, with its simplex
/// multipliers.
pub fn box_steepest_direction(
    vectors: &[Vec<f64>],
    lo: &[f64],
    hi: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let start = min_norm_weights(vectors);
    let d: Vec<f64> = (0..lo.len())
        .map(|i| {
            -start
                .iter()
                .zip(vectors)
                .map(|(l, g)| l * g[i])
                .sum::<f64>()
        })
        .collect();
    if vectors.is_empty() || d.iter().zip(lo).zip(hi).all(|((x, l), h)| x > l && x < h) {
        return (d, start);
    }
    let unit = vec![vec![1.0; lo.len()]; vectors.len()];
    box_model_direction(vectors, &unit, lo, hi)
}

/// Minimizer `d` of `max_j (v_j . d + d' diag(curv_j) d / 2)` subject to
/// `lo <= d <= hi`, with its simplex multipliers. Every curvature entry must
/// be positive.
///
/// Solved through the concave dual over the simplex, whose inner minimizer is
/// `d_i = clip(-sum_j lambda_j v_ji / sum_j lambda_j curv_ji, lo_i, hi_i)`.
/// Two objectives use bisection on the dual slope, more use accelerated
/// projected gradient.
pub fn box_model_direction(
    vectors: &[Vec<f64>],
    curv: &[Vec<f64>],
    lo: &[f64],
    hi: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let m = vectors.len();
    let inner = |lambda: &[f64]| -> Vec<f64> {
        (0..lo.len())
            .map(|i| {
                let mut v = 0.0;
                let mut w = 0.0;
                for j in 0..m {
                    v += lambda[j] * vectors[j][i];
                    w += lambda[j] * curv[j][i];
                }
                (-v / w).clamp(lo[i], hi[i])
            })
            .collect()
    };
    let models = |d: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|j| {
                (0..d.len())
                    .map(|i| d[i] * (vectors[j][i] + 0.5 * curv[j][i] * d[i]))
                    .sum()
            })
            .collect()
    };
    match m {
        0 => (vec![0.0; lo.len()], Vec::new()),
        1 => (inner(&[1.0]), vec![1.0]),
        2 => {
            // the dual slope along lambda = (t, 1 - t) is decreasing in t
            let t = bisect_decreasing(0.0, 1.0, |t| {
                let s = models(&inner(&[t, 1.0 - t]));
                s[0] - s[1]
            });
            let lambda = vec![t, 1.0 - t];
            (inner(&lambda), lambda)
        }
        3 => {
            // lambda = (a, b, 1 - a - b); the inner maximum over b is concave
            // in a with slope m_1 - m_3 at an inner maximizer below 1 - a, and
            // m_1 - m_2 once b sits on 1 - a and moves with a
            let best_b = |a: f64| {
                bisect_decreasing(0.0, 1.0 - a, |b| {
                    let s = models(&inner(&[a, b, (1.0 - a - b).max(0.0)]));
                    s[1] - s[2]
                })
            };
            let a = bisect_decreasing(0.0, 1.0, |a| {
                // at a = 1 the interval for b collapses; take the left slope
                let a = a.min(1.0 - 1e-12);
                let b = best_b(a);
                let s = models(&inner(&[a, b, (1.0 - a - b).max(0.0)]));
                if b >= 1.0 - a {
                    s[0] - s[1]
                } else {
                    s[0] - s[2]
                }
            });
            let b = best_b(a);
            let lambda = vec![a, b, (1.0 - a - b).max(0.0)];
            (inner(&lambda), lambda)
        }
        _ => {
            // the clipped inner minimizer is primal feasible, so
            // max_j m_j(d) - lambda . m(d) is a duality gap
            let min_curv = curv.iter().flatten().copied().fold(f64::INFINITY, f64::min);
            let lipschitz =
                (vectors.iter().map(|g| dot(g, g)).sum::<f64>() / min_curv).max(f64::MIN_POSITIVE);
            let mut lambda = vec![1.0 / m as f64; m];
            let mut y = lambda.clone();
            let mut t = 1.0_f64;
            let mut dual = f64::NEG_INFINITY;
            let mut best = (f64::INFINITY, inner(&lambda), lambda.clone());
            for _ in 0..20_000 {
                let d = inner(&y);
                let s = models(&d);
                let primal = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if primal < best.0 {
                    best = (primal, d, y.clone());
                }
                if best.0 - dot(&y, &s) <= 1e-13 * (1.0 + primal.abs()) {
                    break;
                }
                let next = project_simplex(
                    &y.iter()
                        .zip(&s)
                        .map(|(l, g)| l + g / lipschitz)
                        .collect::<Vec<_>>(),
                );
                let next_dual = dot(&next, &models(&inner(&next)));
                if next_dual < dual {
                    // restart the momentum
                    t = 1.0;
                    y = lambda.clone();
                    continue;
                }
                dual = next_dual;
                let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
                y = project_simplex(
                    &next
                        .iter()
                        .zip(&lambda)
                        .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
                        .collect::<Vec<_>>(),
                );
                lambda = next;
                t = t_next;
            }
            (best.1, best.2)
        }
    }
}

/// Root of a nonincreasing `slope` on `[lo, hi]`, or the endpoint where the
/// sign never changes.
fn bisect_decreasing(lo: f64, hi: f64, slope: impl Fn(f64) -> f64) -> f64 {
    if hi <= lo || slope(lo) <= 0.0 {
        return lo;
    }
    if slope(hi) >= 0.0 {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if slope(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Norm of the minimum-norm element of the convex hull of `vectors`.
pub fn min_norm(vectors: &[Vec<f64>]) -> f64 {
    let lambda = min_norm_weights(vectors);
    let n = vectors.first().map_or(0, Vec::len);
    let mut v = vec![0.0; n];
    for (l, g) in lambda.iter().zip(vectors) {
        for (vi, gi) in v.iter_mut().zip(g) {
            *vi += l * gi;
        }
    }
    norm(&v)
}
