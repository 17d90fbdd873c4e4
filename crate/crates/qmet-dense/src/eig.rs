use num_complex::Complex64 as C64;

use crate::matrix::{inner, CMatrix};
use crate::tolerances::{EIG_HERMITIAN_TOL, JACOBI_MAX_SWEEPS, JACOBI_OFFDIAG_REL};
use crate::{DenseError, Result};

/// Eigenvalues ascending, eigenvectors as the matching columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// V diag(f(λ)) V^dagger
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        CMatrix::from_fn(d, |i, j| {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..d {
                if fv[k] != 0.0 {
                    s += v[(i, k)] * v[(j, k)].conj() * fv[k];
                }
            }
            s
        })
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| l)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Runs cyclic Jacobi on the real symmetric embedding [[A, -B], [B, A]] of
/// H = A + iB. Every eigenvalue of the embedding appears twice, so the real
/// eigenvectors are grouped into even-sized clusters and half of each cluster
/// is kept after a complex Gram-Schmidt pass.
pub fn hermitian_eig(h: &CMatrix) -> Result<Spectrum> {
    let d = h.dim();
    let scale = h.max_abs();
    let dev = h.hermitian_deviation();
    if dev > EIG_HERMITIAN_TOL * scale.max(1.0) {
        return Err(DenseError::NonHermitian(dev));
    }
    if d == 1 {
        return Ok(Spectrum { values: vec![h[(0, 0)].re], vectors: CMatrix::identity(1) });
    }
    let n = 2 * d;
    let mut a = vec![0.0f64; n * n];
    for i in 0..d {
        for j in 0..d {
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[i * n + j] = z.re;
            a[(i + d) * n + (j + d)] = z.re;
            a[i * n + (j + d)] = -z.im;
            a[(i + d) * n + j] = z.im;
        }
    }
    let (vals, vecs) = jacobi_symmetric(&mut a, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| vals[x].total_cmp(&vals[y]));

    let norm = h.frobenius().max(f64::MIN_POSITIVE);
    let cluster_tol = 1e-10 * norm;
    let mut values = Vec::with_capacity(d);
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(d);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && ((end - start) % 2 == 1 || vals[order[end]] - vals[order[end - 1]] <= cluster_tol)
        {
            end += 1;
        }
        let candidates: Vec<Vec<C64>> = order[start..end]
            .iter()
            .map(|&c| (0..d).map(|i| C64::new(vecs[i * n + c], vecs[(i + d) * n + c])).collect())
            .collect();
        let want = (end - start) / 2;
        let mut picked: Vec<Vec<C64>> = Vec::with_capacity(want);
        let mut used = vec![false; candidates.len()];
        for _ in 0..want {
            let mut best: Option<(usize, Vec<C64>, f64)> = None;
            for (ci, cand) in candidates.iter().enumerate() {
                if used[ci] {
                    continue;
                }
                let mut r = cand.clone();
                for p in picked.iter() {
                    let ov = inner(p, &r);
                    for (x, y) in r.iter_mut().zip(p) {
                        *x -= ov * y;
                    }
                }
                let rn = r.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if best.as_ref().is_none_or(|b| rn > b.2) {
                    best = Some((ci, r, rn));
                }
            }
            let (ci, mut r, rn) = best.expect("cluster has candidates");
            used[ci] = true;
            for x in r.iter_mut() {
                *x /= rn;
            }
            picked.push(r);
        }
        let mut local: Vec<(f64, Vec<C64>)> = picked
            .into_iter()
            .map(|u| {
                let hu = h.apply(&u);
                (inner(&u, &hu).re, u)
            })
            .collect();
        local.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (l, u) in local {
            values.push(l);
            columns.push(u);
        }
        start = end;
    }

    let mut vectors = CMatrix::zeros(d);
    for (k, col) in columns.iter().enumerate() {
        for i in 0..d {
            vectors[(i, k)] = col[i];
        }
    }
    Ok(Spectrum { values, vectors })
}

/// Cyclic Jacobi for a real symmetric n x n matrix stored row-major.
/// Returns the diagonal and the row-major matrix of eigenvector columns.
fn jacobi_symmetric(a: &mut [f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if total == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let target = JACOBI_OFFDIAG_REL * total;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() < target {
            let diag = (0..n).map(|i| a[i * n + i]).collect();
            return Ok((diag, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(DenseError::NoConvergence(JACOBI_MAX_SWEEPS))
}
