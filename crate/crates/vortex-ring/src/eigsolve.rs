//! Sparse symmetric-structure eigensolver used by the grid Laplacian:
//! a banded direct factorization supplies the inverse, and block inverse
//! subspace iteration with Rayleigh-Ritz extraction converges the smallest
//! eigenvalues. The block form keeps degenerate pairs together, which
//! single-vector Krylov iterations cannot recover from one start vector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Compressed sparse rows; row i holds columns `col[ptr[i]..ptr[i+1]]`.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.dim {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            out[i] = acc;
        }
    }

    pub fn bandwidth(&self) -> usize {
        let mut b = 0;
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                b = b.max(self.col_idx[k].abs_diff(i));
            }
        }
        b
    }
}

/// In-place banded LU without pivoting. The grid operators are diagonally
/// dominant M-matrices, for which pivot-free elimination is stable.
pub struct BandLu {
    dim: usize,
    bw: usize,
    /// Row-major packed band: entry (i, j) lives at data[i*(2bw+1) + j - i + bw].
    data: Vec<f64>,
}

impl BandLu {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let dim = a.dim;
        let bw = a.bandwidth();
        let width = 2 * bw + 1;
        let mut data = vec![0.0; dim * width];
        for i in 0..dim {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.col_idx[k];
                data[i * width + (j + bw - i)] = a.values[k];
            }
        }
        for k in 0..dim {
            let pivot = data[k * width + bw];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::EigenConvergence {
                    iterations: 0,
                    residual: f64::INFINITY,
                });
            }
            let imax = (k + bw).min(dim - 1);
            for i in (k + 1)..=imax {
                let lik = data[i * width + (k + bw - i)] / pivot;
                data[i * width + (k + bw - i)] = lik;
                if lik == 0.0 {
                    continue;
                }
                let jmax = (k + bw).min(dim - 1);
                for j in (k + 1)..=jmax {
                    let ukj = data[k * width + (j + bw - k)];
                    if ukj != 0.0 {
                        data[i * width + (j + bw - i)] -= lik * ukj;
                    }
                }
            }
        }
        Ok(BandLu { dim, bw, data })
    }

    pub fn solve(&self, b: &[f64], x: &mut [f64]) {
        let width = 2 * self.bw + 1;
        x.copy_from_slice(b);
        for i in 0..self.dim {
            let kmin = i.saturating_sub(self.bw);
            let mut acc = x[i];
            for k in kmin..i {
                acc -= self.data[i * width + (k + self.bw - i)] * x[k];
            }
            x[i] = acc;
        }
        for i in (0..self.dim).rev() {
            let kmax = (i + self.bw).min(self.dim - 1);
            let mut acc = x[i];
            for k in (i + 1)..=kmax {
                acc -= self.data[i * width + (k + self.bw - i)] * x[k];
            }
            x[i] = acc / self.data[i * width + self.bw];
        }
    }
}

/// Eigen decomposition of a small symmetric matrix by cyclic Jacobi.
/// Returns (values ascending, column vectors).
pub fn jacobi_symmetric(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p][q] * m[p][q];
            }
        }
        if off.sqrt() < 1e-14 * frobenius(&m).max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].partial_cmp(&m[j][j]).unwrap());
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row][col]).collect())
        .collect();
    (values, vectors)
}

fn frobenius(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Dense LU with partial pivoting for the small projected systems.
struct DenseLu {
    n: usize,
    data: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    fn factor(a: &[Vec<f64>]) -> Option<Self> {
        let n = a.len();
        let mut data: Vec<f64> = a.iter().flat_map(|r| r.iter().copied()).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (mut imax, mut vmax) = (k, data[k * n + k].abs());
            for i in (k + 1)..n {
                let v = data[i * n + k].abs();
                if v > vmax {
                    imax = i;
                    vmax = v;
                }
            }
            if vmax == 0.0 {
                return None;
            }
            if imax != k {
                for j in 0..n {
                    data.swap(k * n + j, imax * n + j);
                }
                perm.swap(k, imax);
            }
            let pivot = data[k * n + k];
            for i in (k + 1)..n {
                let l = data[i * n + k] / pivot;
                data[i * n + k] = l;
                for j in (k + 1)..n {
                    data[i * n + j] -= l * data[k * n + j];
                }
            }
        }
        Some(DenseLu { n, data, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let update = self.data[i * n + k] * x[k];
                x[i] -= update;
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let update = self.data[i * n + k] * x[k];
                x[i] -= update;
            }
            x[i] /= self.data[i * n + i];
        }
        x
    }
}

/// Inverse iteration on the projected matrix `t` near the estimate `theta`;
/// the start vector comes from the symmetrized extraction. Returns the
/// refined right eigenvector.
fn refine_projected_vector(t: &[Vec<f64>], theta: f64, start: &[f64]) -> Vec<f64> {
    let p = t.len();
    let mut w = start.to_vec();
    let mut shift = theta;
    for _ in 0..5 {
        let scale = shift.abs().max(1.0);
        let mut shifted = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in 0..p {
                shifted[i][j] = t[i][j];
            }
            shifted[i][i] -= shift + 1e-13 * scale;
        }
        let Some(lu) = DenseLu::factor(&shifted) else {
            return w;
        };
        let mut next = lu.solve(&w);
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return w;
        }
        for x in &mut next {
            *x /= norm;
        }
        w = next;
        // Rayleigh-quotient shift update and projected residual check
        let tw: Vec<f64> = (0..p)
            .map(|i| (0..p).map(|j| t[i][j] * w[j]).sum())
            .collect();
        shift = w.iter().zip(&tw).map(|(a, b)| a * b).sum();
        let res: f64 = tw
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - shift * b) * (a - shift * b))
            .sum::<f64>()
            .sqrt();
        if res <= 1e-14 * shift.abs().max(1e-300) {
            break;
        }
    }
    w
}

fn orthonormalize(cols: &mut [Vec<f64>]) {
    let p = cols.len();
    for i in 0..p {
        // two Gram-Schmidt passes keep orthogonality near machine precision
        for _ in 0..2 {
            for j in 0..i {
                let dot: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
                let (head, tail) = cols.split_at_mut(i);
                for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                    *a -= dot * b;
                }
            }
        }
        let norm: f64 = cols[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in cols[i].iter_mut() {
            *x /= norm;
        }
    }
}

/// Smallest `m` eigenvalues of the (structurally symmetric) operator `a`,
/// each converged to `tol` relative residual.
pub fn smallest_eigenvalues(a: &SparseMatrix, m: usize, tol: f64) -> Result<Vec<f64>> {
    let dim = a.dim;
    if m == 0 {
        return Ok(Vec::new());
    }
    if m > dim {
        return Err(Error::validation(
            "M",
            format!("requested {m} eigenvalues of a {dim}-dimensional operator"),
        ));
    }
    let p = (m + 4 + m / 2).min(dim);
    let lu = BandLu::factor(a)?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x7652_494e_4721);
    let mut basis: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    orthonormalize(&mut basis);

    let max_iter = 400;
    let mut worst = f64::INFINITY;
    for iter in 1..=max_iter {
        // Z = A^{-1} X, orthonormalized
        let mut z: Vec<Vec<f64>> = basis
            .iter()
            .map(|x| {
                let mut out = vec![0.0; dim];
                lu.solve(x, &mut out);
                out
            })
            .collect();
        orthonormalize(&mut z);

        // Rayleigh-Ritz on the true operator
        let az: Vec<Vec<f64>> = z
            .iter()
            .map(|col| {
                let mut out = vec![0.0; dim];
                a.matvec(col, &mut out);
                out
            })
            .collect();
        let mut t = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in 0..p {
                t[i][j] = z[i].iter().zip(&az[j]).map(|(a, b)| a * b).sum();
            }
        }
        // the grid operator is symmetric away from the boundary closure;
        // extract with the symmetric part and verify residuals on A itself
        let mut ts = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in 0..p {
                ts[i][j] = 0.5 * (t[i][j] + t[j][i]);
            }
        }
        let (theta, w) = jacobi_symmetric(&ts);

        // rotate the basis and measure residuals of the first m Ritz pairs
        let rotate = |cols: &[Vec<f64>], wi: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; dim];
            for (c, &wc) in cols.iter().zip(wi) {
                for (o, &v) in out.iter_mut().zip(c) {
                    *o += wc * v;
                }
            }
            out
        };
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(p);
        let mut ok = true;
        let mut values = vec![0.0; m];
        worst = 0.0;
        for (idx, wi) in w.iter().enumerate() {
            if idx < m {
                // polish against the unsymmetrized projection, then measure
                // the Ritz residual on the full operator
                let wr = refine_projected_vector(&t, theta[idx], wi);
                let v = rotate(&z, &wr);
                let av = rotate(&az, &wr);
                let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                let ritz = v.iter().zip(&av).map(|(a, b)| a * b).sum::<f64>() / (vn * vn);
                let mut res = 0.0;
                for (x, y) in av.iter().zip(&v) {
                    let d = x - ritz * y;
                    res += d * d;
                }
                let rel = res.sqrt() / vn / ritz.abs().max(1e-300);
                worst = worst.max(rel);
                if rel > tol {
                    ok = false;
                }
                values[idx] = ritz;
                next.push(v);
            } else {
                next.push(rotate(&z, wi));
            }
        }
        if ok {
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            return Ok(values);
        }
        let _ = iter;
        basis = next;
    }
    Err(Error::EigenConvergence {
        iterations: max_iter,
        residual: worst,
    })
}
