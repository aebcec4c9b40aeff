//! Hermitian eigendecomposition.
//!
//! The matrix is reduced to Hermitian tridiagonal form with Householder
//! reflections, the complex off-diagonal is rotated to real non-negative
//! values by a diagonal phase matrix, and the resulting real symmetric
//! tridiagonal problem is solved with the implicit QL algorithm. Eigenvectors
//! are accumulated through all three stages.

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::tolerances;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Real eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `Σ_k f(λ_k) |v_k⟩⟨v_k|`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..d {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..d {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    /// Matrix elements `⟨v_m| op |v_l⟩` of `op` in the eigenbasis.
    pub fn transform(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.vectors.dagger().matmul(op)?.matmul(&self.vectors)
    }
}

/// Eigendecomposition of a Hermitian matrix (eigenvalues descending).
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("eigendecomposition of a {}x{} matrix", m.rows(), m.cols())));
    }
    let defect = m.hermitian_defect();
    if defect > tolerances::EIG_HERMITIAN {
        return Err(Error::Validation(format!("matrix is not Hermitian (defect {defect:.3e})")));
    }
    let d = m.rows();
    // work on the exactly Hermitian part
    let mut a = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }

    let mut q = ComplexMatrix::identity(d);
    tridiagonalize(&mut a, &mut q);

    let mut diag: Vec<f64> = (0..d).map(|i| a[(i, i)].re).collect();
    let mut off = vec![0.0; d];
    let mut phase = vec![ONE; d];
    for k in 0..d.saturating_sub(1) {
        let e = a[(k + 1, k)];
        let r = e.norm();
        off[k] = r;
        phase[k + 1] = if r > 0.0 { phase[k] * (e / r) } else { phase[k] };
    }

    let mut w = vec![0.0; d * d];
    for i in 0..d {
        w[i * d + i] = 1.0;
    }
    tql2(&mut diag, &mut off, &mut w, d)?;

    // columns of Q · diag(phase)
    for i in 0..d {
        for k in 0..d {
            q[(i, k)] *= phase[k];
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));

    let mut vectors = ComplexMatrix::zeros(d, d);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..d {
            let mut acc = ZERO;
            for k in 0..d {
                let wk = w[k * d + src];
                if wk != 0.0 {
                    acc += q[(i, k)] * wk;
                }
            }
            vectors[(i, col)] = acc;
        }
    }
    let values = order.iter().map(|&k| diag[k]).collect();
    Ok(EigenDecomposition { values, vectors })
}

/// In-place Householder reduction of a Hermitian matrix to tridiagonal form,
/// accumulating the unitary into `q` so that `m = q · a · q†`.
fn tridiagonalize(a: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let d = a.rows();
    if d < 3 {
        return;
    }
    let mut v = vec![ZERO; d];
    let mut w = vec![ZERO; d];
    for k in 0..d - 2 {
        let lo = k + 1;
        let tail_norm2: f64 = (lo + 1..d).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail_norm2 == 0.0 {
            continue;
        }
        let x0 = a[(lo, k)];
        let xnorm = (x0.norm_sqr() + tail_norm2).sqrt();
        let unit = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -unit * xnorm;

        v[lo] = x0 - alpha;
        for i in lo + 1..d {
            v[i] = a[(i, k)];
        }
        let vnorm = (lo..d).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        for vi in &mut v[lo..d] {
            *vi /= vnorm;
        }

        a[(lo, k)] = alpha;
        a[(k, lo)] = alpha.conj();
        for i in lo + 1..d {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }

        // trailing block: B ← H B H with H = I − 2 v v†
        for i in lo..d {
            w[i] = (lo..d).map(|j| a[(i, j)] * v[j]).sum();
        }
        let beta: f64 = (lo..d).map(|i| (v[i].conj() * w[i]).re).sum();
        for i in lo..d {
            for j in lo..d {
                let upd = v[i] * w[j].conj() * 2.0 + w[i] * v[j].conj() * 2.0 - v[i] * v[j].conj() * (4.0 * beta);
                a[(i, j)] -= upd;
            }
        }

        // Q ← Q H
        for i in 0..d {
            let s: C64 = (lo..d).map(|j| q[(i, j)] * v[j]).sum();
            for j in lo..d {
                q[(i, j)] -= s * v[j].conj() * 2.0;
            }
        }
    }
}

/// Implicit QL on the symmetric tridiagonal matrix with diagonal `d` and
/// sub-diagonal `e` (`e[i]` couples `i` and `i+1`, `e[n-1]` unused).
/// Eigenvectors are accumulated into the row-major `n×n` matrix `z`.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Numeric(format!("QL iteration did not converge for eigenvalue {l}")));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk1 = z[k * n + i + 1];
                        let zk = z[k * n + i];
                        z[k * n + i + 1] = s * zk + c * zk1;
                        z[k * n + i] = c * zk - s * zk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
