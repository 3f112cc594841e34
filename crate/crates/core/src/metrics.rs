//! Bergman metric Gram matrices of the Cartan domains, the quadratic form
//! `H_z(u,u)`, and the closed-form Rayleigh quotient behind Bloch seminorms.
//!
//! The Gram matrix is stored in the column convention `H_z(v,v) = v† G(z) v`
//! for intrinsic tangent columns `v`. In the row convention with `u = vᵀ`
//! this is the familiar `u T(z,z) ū′` with `G = T̄`; all scalar outputs are
//! convention independent.
//!
//! Closed forms, in intrinsic coordinates:
//! - type I: `G = (m+n) · (I_m − ZZ̄′)⁻¹ ⊗ conj((I_n − Z̄′Z)⁻¹)` in row-major
//!   vec order;
//! - types II/III: the analogous p×p ambient form of
//!   `(p+1)(I_p − ZZ̄)⁻¹ ⊗ (I_p − Z̄Z)⁻¹` resp.
//!   `2(q−1)(I_q + ZZ̄)⁻¹ ⊗ (I_q + Z̄Z)⁻¹`, restricted to the
//!   symmetric/antisymmetric subspace via the embedding `S`,
//!   `G_int = S† G_amb S`;
//! - type IV: the rank-one-corrected form
//!   `(2N/ρ²)[ρI − 2((1−2zz̄′) ζ̄ζᵀ + s̄ ζζᵀ + s ζ̄ζ̄ᵀ − ζζ̄ᵀ)]` with
//!   `s = zz′`, `ρ = 1 + |s|² − 2zz̄′`;
//! - products: block diagonal in the factor metrics.
//!
//! Inverses of the Hermitian positive definite factors go through Cholesky,
//! which keeps the structure accurate near the boundary where the metric
//! grows like the inverse square of the boundary distance.

use nalgebra::{DMatrix, DVector};

use crate::domains::{ambient_embedding, lie_ball_invariants, DomainDescriptor, Point, Tangent};
use crate::error::{Error, Result};
use crate::linalg::{self, cr, kronecker, C64};
use crate::MIN_BOUNDARY_DISTANCE;

/// The Bergman metric Gram matrix at an interior point.
#[derive(Debug, Clone)]
pub struct MetricMatrix {
    gram: DMatrix<C64>,
    at: Point,
}

impl MetricMatrix {
    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    pub fn at(&self) -> &Point {
        &self.at
    }

    /// `(λ_min, λ_max)` of the Gram matrix.
    pub fn eigen_range(&self) -> (f64, f64) {
        let ev = linalg::hermitian_eigenvalues(&self.gram);
        (ev[0], ev[ev.len() - 1])
    }

    /// `v† G v` for an intrinsic tangent, with the imaginary rounding
    /// residue checked and discarded.
    ///
    /// Block-diagonal product Grams are accumulated factor by factor, the
    /// same floating-point operations as summing the factor forms; the
    /// product additivity `H^Ω = Σ H^{Ω_k}` is therefore exact.
    pub fn form(&self, v: &Tangent) -> Result<f64> {
        if v.descriptor() != self.at.descriptor() {
            return Err(Error::TypeMismatch(
                "tangent domain differs from metric domain".into(),
            ));
        }
        let mut total = 0.0;
        for (off, len) in self.at.descriptor().factor_spans() {
            let block = self.gram.view((off, off), (len, len));
            let sub = DVector::from(v.coords().rows(off, len));
            total += real_part_checked(linalg::quadratic_form(&block.into_owned(), &sub));
        }
        Ok(total)
    }
}

fn real_part_checked(value: C64) -> f64 {
    debug_assert!(
        value.im.abs() <= 1e-12 * (1.0 + value.re.abs()),
        "Hermitian form produced imaginary residue {:e}",
        value.im
    );
    value.re
}

fn guard_interior(z: &Point) -> Result<()> {
    let distance = z.boundary_distance()?; // OutsideDomain if not interior
    if distance < MIN_BOUNDARY_DISTANCE {
        return Err(Error::TooCloseToBoundary { distance });
    }
    Ok(())
}

/// The Gram matrix `G(z)` of the Bergman metric in intrinsic coordinates.
pub fn metric_matrix(z: &Point) -> Result<MetricMatrix> {
    guard_interior(z)?;
    let gram = gram_at(z.descriptor(), z)?;
    Ok(MetricMatrix {
        gram,
        at: z.clone(),
    })
}

fn gram_at(d: &DomainDescriptor, z: &Point) -> Result<DMatrix<C64>> {
    match d {
        DomainDescriptor::TypeI { rows, cols } => {
            let zm = z.to_matrix()?;
            let id_m = DMatrix::<C64>::identity(*rows, *rows);
            let id_n = DMatrix::<C64>::identity(*cols, *cols);
            let left = linalg::cholesky_inverse(&(id_m - &zm * zm.adjoint()))?;
            let right = linalg::cholesky_inverse(&(id_n - zm.adjoint() * &zm))?;
            Ok(kronecker(&left, &right.conjugate()) * cr((rows + cols) as f64))
        }
        DomainDescriptor::TypeII { size } => restricted_gram(d, z, *size, (*size + 1) as f64, -1.0),
        DomainDescriptor::TypeIII { size } => {
            restricted_gram(d, z, *size, 2.0 * (*size - 1) as f64, 1.0)
        }
        DomainDescriptor::TypeIV { dim } => Ok(lie_ball_gram(*dim, z.coords())),
        DomainDescriptor::Product(_) => {
            let n = d.dimension();
            let mut gram = DMatrix::zeros(n, n);
            for (index, (off, len)) in d.factor_spans().iter().copied().enumerate() {
                let factor_gram = gram_at(z.factor(index)?.descriptor(), &z.factor(index)?)?;
                gram.view_mut((off, off), (len, len))
                    .copy_from(&factor_gram);
            }
            Ok(gram)
        }
    }
}

// Ambient Kronecker form restricted to the symmetric (`sign = 1`) or
// antisymmetric (`sign = -1`) subspace: G_int = S† G_amb S.
fn restricted_gram(
    d: &DomainDescriptor,
    z: &Point,
    p: usize,
    constant: f64,
    sign: f64,
) -> Result<DMatrix<C64>> {
    let zm = z.to_matrix()?;
    let id = DMatrix::<C64>::identity(p, p);
    let zc = zm.conjugate();
    let left = linalg::cholesky_inverse(&(&id + &zm * &zc * cr(sign)))?;
    let right = linalg::cholesky_inverse(&(&id + &zc * &zm * cr(sign)))?;
    let ambient = kronecker(&left, &right.conjugate()) * cr(constant);
    let s = ambient_embedding(d).expect("restricted kinds have an embedding");
    Ok(linalg::hermitian_part(&(s.adjoint() * ambient * &s)))
}

fn lie_ball_gram(dim: usize, coords: &DVector<C64>) -> DMatrix<C64> {
    let (s_abs, rho) = lie_ball_invariants(coords);
    let s: C64 = coords.iter().map(|z| z * z).sum();
    let n2: f64 = coords.iter().map(|z| z.norm_sqr()).sum();
    let _ = s_abs;
    let zc = coords.conjugate();
    let zbar_zt = &zc * coords.transpose();
    let z_zt = coords * coords.transpose();
    let zbar_zbart = &zc * zc.transpose();
    let z_zbart = coords * zc.transpose();
    let correction = &zbar_zt * cr(1.0 - 2.0 * n2) + z_zt * s.conj() + zbar_zbart * s - z_zbart;
    let id = DMatrix::<C64>::identity(dim, dim);
    (id * cr(rho) - correction * cr(2.0)) * cr(2.0 * dim as f64 / (rho * rho))
}

/// A square factor `S` with `S S† = G(z)`, along with `S^{-†}`, used to
/// whiten generalized eigenproblems against the metric.
///
/// For type I the Kronecker structure is exploited: with Cholesky factors
/// `I − ZZ̄′ = CC†` and `conj(I − Z̄′Z) = ĒĒ†`, the matrix
/// `S = √(m+n) · C^{-†} ⊗ Ē^{-†}` satisfies `SS† = G` while only ever
/// touching the well-conditioned defining factors, whose condition number is
/// the square root of the metric's. The other kinds fall back to the
/// Cholesky factor of the Gram matrix; products recurse blockwise.
#[derive(Debug, Clone)]
pub(crate) struct WhitenedFactor {
    /// `S` with `S S† = G`.
    pub s: DMatrix<C64>,
    /// `S^{-†}`.
    pub s_inv_adjoint: DMatrix<C64>,
}

pub(crate) fn whitened_factor(z: &Point) -> Result<WhitenedFactor> {
    guard_interior(z)?;
    whitened_factor_unchecked(z)
}

fn whitened_factor_unchecked(z: &Point) -> Result<WhitenedFactor> {
    match z.descriptor() {
        DomainDescriptor::TypeI { rows, cols } => {
            let zm = z.to_matrix()?;
            let id_m = DMatrix::<C64>::identity(*rows, *rows);
            let id_n = DMatrix::<C64>::identity(*cols, *cols);
            let c = (id_m.clone() - &zm * zm.adjoint())
                .cholesky()
                .ok_or_else(|| Error::Conditioning("defining factor not PD".into()))?
                .l();
            let e = (id_n.clone() - zm.adjoint() * &zm)
                .cholesky()
                .ok_or_else(|| Error::Conditioning("defining factor not PD".into()))?
                .l();
            let e_bar = e.conjugate();
            let c_inv = c
                .solve_lower_triangular(&id_m)
                .ok_or_else(|| Error::Conditioning("triangular solve failed".into()))?;
            let e_bar_inv = e_bar
                .solve_lower_triangular(&id_n)
                .ok_or_else(|| Error::Conditioning("triangular solve failed".into()))?;
            let scale = ((rows + cols) as f64).sqrt();
            Ok(WhitenedFactor {
                s: kronecker(&c_inv.adjoint(), &e_bar_inv.adjoint()) * cr(scale),
                s_inv_adjoint: kronecker(&c, &e_bar) * cr(1.0 / scale),
            })
        }
        DomainDescriptor::Product(_) => {
            let d = z.descriptor();
            let n = d.dimension();
            let mut s = DMatrix::zeros(n, n);
            let mut s_inv_adjoint = DMatrix::zeros(n, n);
            for (index, (off, len)) in d.factor_spans().iter().copied().enumerate() {
                let block = whitened_factor_unchecked(&z.factor(index)?)?;
                s.view_mut((off, off), (len, len)).copy_from(&block.s);
                s_inv_adjoint
                    .view_mut((off, off), (len, len))
                    .copy_from(&block.s_inv_adjoint);
            }
            Ok(WhitenedFactor { s, s_inv_adjoint })
        }
        _ => {
            let gram = gram_at(z.descriptor(), z)?;
            let n = gram.nrows();
            let l = gram
                .cholesky()
                .ok_or_else(|| Error::Conditioning("metric Cholesky failed".into()))?
                .l();
            let l_inv = l
                .solve_lower_triangular(&DMatrix::<C64>::identity(n, n))
                .ok_or_else(|| Error::Conditioning("triangular solve failed".into()))?;
            Ok(WhitenedFactor {
                s: l,
                s_inv_adjoint: l_inv.adjoint(),
            })
        }
    }
}

/// The Bergman quadratic form `H_z(v,v) = v† G(z) v`. Additive over product
/// factors with the identical floating-point operations as the factor calls.
pub fn bergman_form(z: &Point, v: &Tangent) -> Result<f64> {
    if v.descriptor() != z.descriptor() {
        return Err(Error::TypeMismatch(
            "tangent domain differs from point domain".into(),
        ));
    }
    if let DomainDescriptor::Product(_) = z.descriptor() {
        guard_interior(z)?;
        let nfactors = z.descriptor().factors().count();
        let mut total = 0.0;
        for k in 0..nfactors {
            total += bergman_form(&z.factor(k)?, &v.factor(k)?)?;
        }
        return Ok(total);
    }
    metric_matrix(z)?.form(v)
}

/// The closed-form supremum `sup_v |grad·v|² / H_z(v,v) = grad G(z)⁻¹ grad†`,
/// the square of the Bloch quotient `Q_f(z)` for a function with the given
/// holomorphic gradient row.
pub fn rayleigh_sup(z: &Point, grad: &DVector<C64>) -> Result<f64> {
    let dim = z.descriptor().dimension();
    if grad.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: grad.len(),
        });
    }
    let metric = metric_matrix(z)?;
    let (lam_min, _) = metric.eigen_range();
    let trace: f64 = metric.gram().diagonal().iter().map(|c| c.re).sum();
    if lam_min < 1e-14 * trace {
        return Err(Error::Conditioning(format!(
            "metric numerically singular (λ_min {lam_min:.3e}, trace {trace:.3e})"
        )));
    }
    let chol = metric
        .gram()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Conditioning("metric Cholesky failed".into()))?;
    let rhs = grad.conjugate();
    let x = chol.solve(&rhs);
    let value: C64 = grad.iter().zip(x.iter()).map(|(g, xi)| g * xi).sum();
    Ok(real_part_checked(value).max(0.0))
}
