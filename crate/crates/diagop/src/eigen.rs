//! Dense Hermitian eigendecomposition for small matrices (N ≤ 512).
//!
//! Householder reduction to real symmetric tridiagonal form (with complex
//! reflectors and a final diagonal phase similarity), followed by the
//! implicit-shift QL iteration with accumulated transformations. Real
//! symmetric input is the zero-imaginary special case of the same path.

use num_complex::Complex64;

use crate::DiagopError;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real(n: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), n * n);
        CMatrix { n, data: rows.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn from_parts(n: usize, re: &[f64], im: &[f64]) -> Self {
        assert_eq!(re.len(), n * n);
        assert_eq!(im.len(), n * n);
        CMatrix {
            n,
            data: re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect(),
        }
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    /// Operator-norm estimate by power iteration on `A* A`.
    pub fn op_norm_est(&self, iters: usize) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + (i as f64 * 0.7).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let adj = self.adjoint();
        let mut norm2 = 0.0f64;
        for _ in 0..iters {
            let w = adj.mul_vec(&self.mul_vec(&v));
            let len = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if len == 0.0 {
                return 0.0;
            }
            norm2 = len;
            v = w.into_iter().map(|z| z / len).collect();
        }
        norm2.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Full eigendecomposition of a Hermitian matrix: eigenvalues ascending and
/// a unitary whose columns are the matching eigenvectors.
pub fn eigh(a: &CMatrix, hermitian_tol: f64) -> Result<(Vec<f64>, CMatrix), DiagopError> {
    let defect = a.hermitian_defect();
    if defect > hermitian_tol {
        return Err(DiagopError::NotHermitian(defect));
    }
    let n = a.n;
    if n == 0 {
        return Ok((vec![], CMatrix::zeros(0)));
    }
    let mut work = a.clone();
    // Symmetrize exactly so roundoff in the input cannot bias the reduction.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (work[(i, j)] + work[(j, i)].conj());
            work[(i, j)] = avg;
            work[(j, i)] = avg.conj();
        }
        let d = work[(i, i)].re;
        work[(i, i)] = Complex64::new(d, 0.0);
    }

    let mut q = CMatrix::identity(n);
    // Householder reduction of columns 0..n-2.
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1; // size of the trailing block
        let mut x = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            x[i] = work[(k + 1 + i, k)];
        }
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // w = A_sub v ; u = tau w - (tau^2 (v* w) / 2) v ; A_sub -= v u* + u v*
        let mut w = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                acc += work[(k + 1 + i, k + 1 + j)] * v[j];
            }
            w[i] = acc;
        }
        let vw: Complex64 = v.iter().zip(&w).map(|(vi, wi)| vi.conj() * wi).sum();
        let sigma = 0.5 * tau * tau * vw;
        let u: Vec<Complex64> = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| tau * wi - sigma * vi)
            .collect();
        for i in 0..m {
            for j in 0..m {
                let upd = v[i] * u[j].conj() + u[i] * v[j].conj();
                work[(k + 1 + i, k + 1 + j)] -= upd;
            }
        }
        // Column k collapses to (.., alpha, 0, ..).
        work[(k + 1, k)] = alpha;
        work[(k, k + 1)] = alpha.conj();
        for i in 1..m {
            work[(k + 1 + i, k)] = Complex64::new(0.0, 0.0);
            work[(k, k + 1 + i)] = Complex64::new(0.0, 0.0);
        }
        // Q <- Q H (right-multiply on trailing columns).
        for row in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for j in 0..m {
                dot += q[(row, k + 1 + j)] * v[j];
            }
            let scale = tau * dot;
            for j in 0..m {
                let sub = scale * v[j].conj();
                q[(row, k + 1 + j)] -= sub;
            }
        }
    }

    // Extract tridiagonal data and rotate complex phases off the subdiagonal.
    let mut d: Vec<f64> = (0..n).map(|i| work[(i, i)].re).collect();
    let mut e = vec![0.0f64; n];
    let mut ph = vec![Complex64::new(1.0, 0.0); n];
    for k in 0..n - 1 {
        let ek = work[(k + 1, k)];
        let r = ek.norm();
        e[k] = r;
        ph[k + 1] = if r == 0.0 { ph[k] } else { ek * ph[k] / r };
    }
    for j in 0..n {
        if ph[j] != Complex64::new(1.0, 0.0) {
            for i in 0..n {
                q[(i, j)] *= ph[j];
            }
        }
    }

    tqli(&mut d, &mut e, &mut q)?;

    // Sort ascending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vecs = CMatrix::zeros(n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vecs[(i, new_j)] = q[(i, old_j)];
        }
    }
    Ok((vals, vecs))
}

fn sign_like(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Implicit-shift QL on a real symmetric tridiagonal, accumulating the
/// rotations into the complex columns of `z`.
fn tqli(d: &mut [f64], e: &mut [f64], z: &mut CMatrix) -> Result<(), DiagopError> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    // e[k] couples d[k] and d[k+1]; e[n-1] is scratch.
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(DiagopError::InvalidSpec(
                    "QL iteration failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + sign_like(r, g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in 0..n {
                    let zf = z[(row, i + 1)];
                    let zi = z[(row, i)];
                    z[(row, i + 1)] = zi * s + zf * c;
                    z[(row, i)] = zi * c - zf * s;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
