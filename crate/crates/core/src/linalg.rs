//! Small-matrix complex linear algebra shared by every module.
//!
//! Factorizations are delegated to nalgebra; this module fixes the
//! conventions the rest of the crate relies on: row-major vectorization,
//! the Kronecker product paired with it, and the SVD normal form
//! `Z = U (Σ λ_k E_kk) V` with descending singular values and a *full*
//! right unitary factor.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub(crate) fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Kronecker product `(A ⊗ B)[(j,l),(k,r)] = a_jk b_lr`, with the pair
/// `(j,l)` flattened row-major. With this convention, for the row-major
/// vectorization `vec` used throughout the crate,
/// `vec(A X B) = (A ⊗ Bᵀ) vec(X)`.
pub fn kronecker(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (am, an) = a.shape();
    let (bm, bn) = b.shape();
    let mut out = DMatrix::zeros(am * bm, an * bn);
    for j in 0..am {
        for k in 0..an {
            let ajk = a[(j, k)];
            for l in 0..bm {
                for r in 0..bn {
                    out[(j * bm + l, k * bn + r)] = ajk * b[(l, r)];
                }
            }
        }
    }
    out
}

/// SVD normal form of a wide matrix: `Z = U (Σ λ_k E_kk) V` with `U` m×m and
/// `V` n×n unitary and `λ_1 ≥ … ≥ λ_m ≥ 0`.
#[derive(Debug, Clone)]
pub struct SvdNormalForm {
    pub u: DMatrix<C64>,
    pub lambdas: Vec<f64>,
    pub v: DMatrix<C64>,
}

impl SvdNormalForm {
    /// Reconstructs `U (Σ λ_k E_kk) V`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let m = self.u.nrows();
        let n = self.v.nrows();
        let mut sigma = DMatrix::zeros(m, n);
        for (k, &l) in self.lambdas.iter().enumerate() {
            sigma[(k, k)] = cr(l);
        }
        &self.u * sigma * &self.v
    }
}

/// Computes the SVD normal form of an m×n matrix with m ≤ n.
pub fn svd_normal_form(z: &DMatrix<C64>) -> Result<SvdNormalForm> {
    let (m, n) = z.shape();
    if m > n {
        return Err(Error::InvalidParameter(format!(
            "svd normal form expects m <= n, got {m}x{n}"
        )));
    }
    let svd = z.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("singular values are finite")
    });

    let lambdas: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut u_sorted = DMatrix::zeros(m, m);
    for (dst, &src) in order.iter().enumerate() {
        u_sorted.set_column(dst, &u.column(src));
    }
    let mut v_rows: Vec<DVector<C64>> = order.iter().map(|&src| v_t.row(src).transpose()).collect();
    complete_orthonormal(&mut v_rows, n);
    let mut v = DMatrix::zeros(n, n);
    for (i, row) in v_rows.iter().enumerate() {
        for j in 0..n {
            v[(i, j)] = row[j];
        }
    }
    Ok(SvdNormalForm {
        u: u_sorted,
        lambdas,
        v,
    })
}

// Greedy modified Gram-Schmidt completion of an orthonormal set to a basis
// of C^n, with a re-orthogonalization pass. Deterministic: candidates are
// canonical basis vectors, the largest residual wins each round.
fn complete_orthonormal(rows: &mut Vec<DVector<C64>>, n: usize) {
    while rows.len() < n {
        let mut best: Option<(f64, DVector<C64>)> = None;
        for j in 0..n {
            let mut cand: DVector<C64> = DVector::zeros(n);
            cand[j] = cr(1.0);
            for pass in 0..2 {
                let _ = pass;
                for row in rows.iter() {
                    let coeff: C64 = row.iter().zip(cand.iter()).map(|(r, c)| r.conj() * c).sum();
                    cand -= row * coeff;
                }
            }
            let norm = cand.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, cand));
            }
        }
        let (norm, cand) = best.expect("n > 0");
        debug_assert!(norm > 1e-8, "orthonormal completion degenerated");
        rows.push(cand / cr(norm));
    }
}

/// Hermitian part `(A + A†)/2`; used to scrub rounding off matrices that are
/// Hermitian by construction before factorizing them.
pub(crate) fn hermitian_part(a: &DMatrix<C64>) -> DMatrix<C64> {
    (a + a.adjoint()) * cr(0.5)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues(h: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = h
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    ev
}

pub(crate) fn smallest_eigenvalue(h: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(h)
        .first()
        .copied()
        .expect("nonempty matrix")
}

/// Largest singular value, via the largest eigenvalue of `Z†Z`.
pub(crate) fn largest_singular_value(z: &DMatrix<C64>) -> f64 {
    let gram = hermitian_part(&(z.adjoint() * z));
    hermitian_eigenvalues(&gram)
        .last()
        .copied()
        .expect("nonempty matrix")
        .max(0.0)
        .sqrt()
}

/// Inverse of a Hermitian positive definite matrix through its Cholesky
/// factor, symmetrized on the way out.
pub(crate) fn cholesky_inverse(f: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let chol = f
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Conditioning("Cholesky factorization failed".into()))?;
    Ok(hermitian_part(&chol.inverse()))
}

/// `v† G v` with a fixed double-loop summation order, so that block-diagonal
/// forms decompose into factor forms with bit-identical floating point.
pub(crate) fn quadratic_form(g: &DMatrix<C64>, v: &DVector<C64>) -> C64 {
    let n = v.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = C64::new(0.0, 0.0);
        for j in 0..n {
            row += g[(i, j)] * v[j];
        }
        acc += v[i].conj() * row;
    }
    acc
}

/// Frobenius-relative distance of `U†U` from the identity.
pub(crate) fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - DMatrix::<C64>::identity(n, n)).norm()
}
