//! Lowest eigenpairs of a dense real symmetric matrix.
//!
//! Householder reduction to tridiagonal form, Sturm-sequence bisection for the
//! wanted eigenvalues, inverse iteration on the tridiagonal matrix for their
//! vectors, then back-transformation through the stored reflectors. Only the
//! reduction is cubic in the matrix size; everything after it is linear or
//! quadratic per eigenpair.

use super::matrix::DenseMatrix;
use crate::error::GridError;

pub(crate) const BISECTION_CAP: usize = 256;
pub(crate) const INVERSE_ITERATION_CAP: usize = 12;
/// `‖A v − λ v‖₂ ≤ RESIDUAL_BOUND · ‖A‖` for every returned pair.
pub const RESIDUAL_BOUND: f64 = 1e-8;

struct Reflector {
    start: usize,
    v: Vec<f64>,
    beta: f64,
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    off: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn tridiagonalize(a: &DenseMatrix) -> (Tridiagonal, Vec<Reflector>) {
    let n = a.size();
    let mut w = a.clone();
    let data = w.data_mut();
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut reflectors = Vec::new();

    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let m = n - start;
        let mut v: Vec<f64> = (start..n).map(|i| data[i * n + k]).collect();
        let tail: f64 = v[1..].iter().map(|x| x * x).sum();
        if tail == 0.0 {
            off[k] = v[0];
            continue;
        }
        let alpha = {
            let len = (v[0] * v[0] + tail).sqrt();
            if v[0] > 0.0 {
                -len
            } else {
                len
            }
        };
        v[0] -= alpha;
        let beta = 2.0 / dot(&v, &v);

        // p = β A₂₂ v, then w = p − (β/2)(pᵀv) v, then A₂₂ ← A₂₂ − v wᵀ − w vᵀ
        let mut p: Vec<f64> = (0..m)
            .map(|i| {
                let row = (start + i) * n + start;
                beta * dot(&data[row..row + m], &v)
            })
            .collect();
        let kappa = 0.5 * beta * dot(&p, &v);
        p.iter_mut().zip(&v).for_each(|(pi, vi)| *pi -= kappa * vi);
        for i in 0..m {
            let row = (start + i) * n + start;
            let (vi, pi) = (v[i], p[i]);
            for (j, x) in data[row..row + m].iter_mut().enumerate() {
                *x -= vi * p[j] + pi * v[j];
            }
        }
        off[k] = alpha;
        reflectors.push(Reflector { start, v, beta });
    }
    if n >= 2 {
        off[n - 2] = data[(n - 1) * n + (n - 2)];
    }
    let diag = (0..n).map(|i| data[i * n + i]).collect();
    (Tridiagonal { diag, off }, reflectors)
}

impl Tridiagonal {
    fn len(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin interval containing the whole spectrum.
    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    fn count_below(&self, x: f64, pivmin: f64) -> usize {
        let mut count = 0;
        let mut q = 0.0;
        for i in 0..self.len() {
            q = if i == 0 {
                self.diag[0] - x
            } else {
                self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q
            };
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn kth_eigenvalue(&self, k: usize, bounds: (f64, f64), abs_tol: f64, pivmin: f64) -> Result<f64, GridError> {
        let (mut lo, mut hi) = bounds;
        for _ in 0..BISECTION_CAP {
            let tol = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + abs_tol;
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.count_below(mid, pivmin) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(GridError::NonConvergence {
            size: self.len(),
            cap: BISECTION_CAP,
        })
    }

    fn apply_shifted(&self, x: &[f64], shift: f64) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = (self.diag[i] - shift) * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

/// LU factorization of `T − σI` with partial pivoting (LAPACK `gttrf` layout).
struct ShiftedLu {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    upper2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(t: &Tridiagonal, shift: f64, tiny_pivot: f64) -> Self {
        let n = t.len();
        let mut lower = t.off.clone();
        let mut upper = t.off.clone();
        let mut diag: Vec<f64> = t.diag.iter().map(|d| d - shift).collect();
        let mut upper2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if diag[i].abs() >= lower[i].abs() {
                if diag[i] != 0.0 {
                    let fact = lower[i] / diag[i];
                    lower[i] = fact;
                    diag[i + 1] -= fact * upper[i];
                }
            } else {
                let fact = diag[i] / lower[i];
                diag[i] = lower[i];
                lower[i] = fact;
                let temp = upper[i];
                upper[i] = diag[i + 1];
                diag[i + 1] = temp - fact * diag[i + 1];
                if i + 2 < n {
                    upper2[i] = upper[i + 1];
                    upper[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        for d in diag.iter_mut() {
            if d.abs() < tiny_pivot {
                *d = if *d < 0.0 { -tiny_pivot } else { tiny_pivot };
            }
        }
        ShiftedLu {
            lower,
            diag,
            upper,
            upper2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.lower[i] * b[i];
            } else {
                b[i + 1] -= self.lower[i] * b[i];
            }
        }
        b[n - 1] /= self.diag[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.upper[n - 2] * b[n - 1]) / self.diag[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.upper[i] * b[i + 1] - self.upper2[i] * b[i + 2]) / self.diag[i];
        }
    }
}

/// Deterministic pseudo-random start vector (xorshift).
fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ seed.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    let len = norm(&v);
    v.iter_mut().for_each(|x| *x /= len);
    v
}

fn orthogonalize(y: &mut [f64], basis: &[Vec<f64>]) {
    // two passes of modified Gram-Schmidt
    for _ in 0..2 {
        for q in basis {
            let c = dot(y, q);
            y.iter_mut().zip(q).for_each(|(yi, qi)| *yi -= c * qi);
        }
    }
}

fn tridiagonal_vectors(t: &Tridiagonal, values: &[f64], tnorm: f64) -> Result<Vec<Vec<f64>>, GridError> {
    let n = t.len();
    if tnorm == 0.0 {
        return Ok((0..values.len())
            .map(|k| {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                e
            })
            .collect());
    }
    let tol = 4.0 * n as f64 * f64::EPSILON * tnorm;
    let tiny_pivot = f64::EPSILON * tnorm;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for (k, &lambda) in values.iter().enumerate() {
        let lu = ShiftedLu::new(t, lambda, tiny_pivot);
        let mut b = start_vector(n, k as u64);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for it in 0..INVERSE_ITERATION_CAP {
            let mut y = b.clone();
            lu.solve(&mut y);
            orthogonalize(&mut y, &vectors);
            let len = norm(&y);
            if !(len.is_finite() && len > 0.0) {
                b = start_vector(n, (k + 1000 * (it + 1)) as u64);
                continue;
            }
            y.iter_mut().for_each(|x| *x /= len);
            b = y;
            let r = norm(&t.apply_shifted(&b, lambda));
            if best.as_ref().is_none_or(|(rb, _)| r < *rb) {
                best = Some((r, b.clone()));
            }
            if r <= tol {
                break;
            }
        }
        // Inside a cluster at roundoff level the iteration stalls; the best
        // iterate is kept if it still meets the residual contract.
        match best {
            Some((r, v)) if r <= RESIDUAL_BOUND * tnorm => vectors.push(v),
            _ => {
                return Err(GridError::NonConvergence {
                    size: n,
                    cap: INVERSE_ITERATION_CAP,
                })
            }
        }
    }
    Ok(vectors)
}

/// Lowest `count` eigenpairs of symmetric `a`, eigenvalues ascending.
///
/// Each eigenvector has unit norm and its largest-magnitude entry positive.
pub(crate) fn lowest_eigenpairs(a: &DenseMatrix, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>), GridError> {
    let n = a.size();
    if count > n {
        return Err(GridError::TooManyEigenpairs { count, size: n });
    }
    if count == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let (t, reflectors) = tridiagonalize(a);
    let (lo, hi) = t.gershgorin();
    let tnorm = lo.abs().max(hi.abs());
    let pivmin = f64::MIN_POSITIVE * t.off.iter().fold(1.0_f64, |m, e| m.max(e * e));
    let abs_tol = f64::EPSILON * tnorm;
    let bounds = (lo - abs_tol - pivmin, hi + abs_tol + pivmin);

    let values = if tnorm == 0.0 {
        vec![0.0; count]
    } else {
        (0..count)
            .map(|k| t.kth_eigenvalue(k, bounds, abs_tol, pivmin))
            .collect::<Result<Vec<_>, _>>()?
    };
    let mut vectors = tridiagonal_vectors(&t, &values, tnorm)?;

    for z in vectors.iter_mut() {
        for r in reflectors.iter().rev() {
            let tail = &mut z[r.start..];
            let s = r.beta * dot(&r.v, tail);
            tail.iter_mut().zip(&r.v).for_each(|(x, v)| *x -= s * v);
        }
        let len = norm(z);
        let pivot = z.iter().fold(0.0_f64, |m, x| if x.abs() > m.abs() { *x } else { m });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        z.iter_mut().for_each(|x| *x *= sign / len);
    }

    let bound = RESIDUAL_BOUND * a.norm_inf();
    for (index, (lambda, v)) in values.iter().zip(&vectors).enumerate() {
        let av = a.matvec(v);
        let residual = av
            .iter()
            .zip(v)
            .map(|(x, y)| (x - lambda * y).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual > bound {
            return Err(GridError::Residual { index, residual, bound });
        }
    }
    Ok((values, vectors))
}
