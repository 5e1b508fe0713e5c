//! Spectral rounding of a finite Hermitian matrix onto an ε-net.
//!
//! Diagonalize `A = u diag(λ) u*`, round every eigenvalue to the nearest net
//! point `j·ε`, and set `K = u diag(μ - λ) u*`. Then `A + K` has all its
//! eigenvalues on the net and `‖K‖ = max |μ - λ| ≤ ε/2`, a finite-dimensional
//! sharpening of the small-compact-perturbation statement.

use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::{eigh, CMatrix};
use crate::DiagopError;

/// Largest matrix size accepted.
pub const MAX_DIM: usize = 512;
/// Input must be Hermitian to this tolerance.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Result of the ε-net rounding.
#[derive(Debug, Clone)]
pub struct EpsNetResult {
    /// The Hermitian perturbation, `‖K‖ ≤ ε/2`.
    pub k: CMatrix,
    /// Rounded eigenvalues (ascending), all at integer multiples of ε.
    pub rounded: Vec<f64>,
    /// Original eigenvalues (ascending).
    pub original: Vec<f64>,
    /// Orthonormal eigenbasis, columns matching `rounded`.
    pub basis: CMatrix,
    pub eps: f64,
}

/// Summary for serialization (the matrices are reported separately).
#[derive(Debug, Clone, Serialize)]
pub struct EpsNetSummary {
    pub eps: f64,
    pub k_norm: f64,
    pub rounded: Vec<f64>,
    pub original: Vec<f64>,
}

impl EpsNetResult {
    pub fn k_norm(&self) -> f64 {
        self.original
            .iter()
            .zip(&self.rounded)
            .map(|(l, m)| (m - l).abs())
            .fold(0.0, f64::max)
    }

    pub fn summary(&self) -> EpsNetSummary {
        EpsNetSummary {
            eps: self.eps,
            k_norm: self.k_norm(),
            rounded: self.rounded.clone(),
            original: self.original.clone(),
        }
    }
}

/// Rounds the spectrum of a Hermitian matrix onto the net `{j·ε : j ∈ ℤ}`.
pub fn eps_net_diagonalize(a: &CMatrix, eps: f64) -> Result<EpsNetResult, DiagopError> {
    if eps <= 0.0 || !eps.is_finite() {
        return Err(DiagopError::ParamRange(format!("eps must be positive, got {eps}")));
    }
    if a.n > MAX_DIM {
        return Err(DiagopError::ParamRange(format!(
            "matrix dimension {} exceeds {MAX_DIM}",
            a.n
        )));
    }
    let (vals, basis) = eigh(a, HERMITIAN_TOL)?;
    let rounded: Vec<f64> = vals.iter().map(|l| (l / eps).round() * eps).collect();
    let n = a.n;
    let mut k = CMatrix::zeros(n);
    for j in 0..n {
        let shift = rounded[j] - vals[j];
        if shift == 0.0 {
            continue;
        }
        let col = basis.column(j);
        for r in 0..n {
            for c in 0..n {
                k[(r, c)] += Complex64::new(shift, 0.0) * col[r] * col[c].conj();
            }
        }
    }
    Ok(EpsNetResult { k, rounded, original: vals, basis, eps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn on_net_diagonal_needs_no_perturbation() {
        let a = CMatrix::from_real(3, &[1.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.5]);
        let r = eps_net_diagonalize(&a, 0.5).unwrap();
        assert_eq!(r.k_norm(), 0.0);
        assert!(r.k.data.iter().all(|z| z.norm() == 0.0));
        assert_eq!(r.rounded, vec![-2.0, 0.5, 1.0]);
    }

    #[test]
    fn flip_matrix_rounding() {
        let a = CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]);
        // eps = 0.5: eigenvalues ±1 are already net points
        let r = eps_net_diagonalize(&a, 0.5).unwrap();
        assert!(r.k_norm() < 1e-14);
        // eps = 3: both round to 0, so A + K = 0 and ‖K‖ = 1 ≤ 1.5
        let r = eps_net_diagonalize(&a, 3.0).unwrap();
        assert_eq!(r.rounded, vec![0.0, 0.0]);
        assert!((r.k_norm() - 1.0).abs() < 1e-12);
        for i in 0..2 {
            for j in 0..2 {
                let apk = a[(i, j)] + r.k[(i, j)];
                assert!(apk.norm() < 1e-12, "A+K should vanish, entry {i}{j} = {apk}");
            }
        }
    }

    #[test]
    fn k_is_hermitian_and_small() {
        let mut state = 7u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let n = 24;
        let mut a = CMatrix::zeros(n);
        for i in 0..n {
            a[(i, i)] = Complex64::new(3.0 * next(), 0.0);
            for j in (i + 1)..n {
                let z = Complex64::new(next(), next());
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        let eps = 0.1;
        let r = eps_net_diagonalize(&a, eps).unwrap();
        assert!(r.k.hermitian_defect() < 1e-12);
        assert!(r.k_norm() <= eps / 2.0 + 1e-12);
        for m in &r.rounded {
            let nearest = (m / eps).round() * eps;
            assert!((m - nearest).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian_and_bad_eps() {
        let a = CMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(eps_net_diagonalize(&a, 0.5).is_err());
        let h = CMatrix::from_real(1, &[1.0]);
        assert!(eps_net_diagonalize(&h, 0.0).is_err());
    }
}
