//! Matrix Möbius automorphisms of the type-I ball.
//!
//! For an interior point `P = U (Σ λ_k E_kk) V` the factors
//!
//! ```text
//! Q = U diag(1/√(1−λ_k²)) Ū′,
//! R = V̄′ [diag(1/√(1−λ_k²)) ⊕ I_{n−m}] V
//! ```
//!
//! define the automorphism `Φ_P(Z) = Q (P − Z)(I_n − P̄′Z)⁻¹ R⁻¹`, an
//! involution exchanging `P` and `0`. The equivalent right-handed form
//! `Φ_P(Z) = Q⁻¹ (I_m − ZP̄′)⁻¹ (P − Z) R` is kept as a cross-check, and the
//! differential in vec coordinates is assembled from the closed form
//! `DΦ[W] = Q (S P̄′ − I) W (I − P̄′Z)⁻¹ R⁻¹` with `S = (P−Z)(I−P̄′Z)⁻¹`.

use nalgebra::{DMatrix, DVector};

use crate::domains::{DomainDescriptor, Point};
use crate::error::{Error, Result};
use crate::linalg::{cr, kronecker, svd_normal_form, C64};
use crate::maps::HoloMap;

/// The SVD-derived factors of a Möbius automorphism of `R_I(m,n)`.
#[derive(Debug, Clone)]
pub struct MobiusFactors {
    descriptor: DomainDescriptor,
    p: DMatrix<C64>,
    u: DMatrix<C64>,
    v: DMatrix<C64>,
    lambdas: Vec<f64>,
    q: DMatrix<C64>,
    r: DMatrix<C64>,
}

impl MobiusFactors {
    pub fn descriptor(&self) -> &DomainDescriptor {
        &self.descriptor
    }

    /// The base point `P` exchanged with the origin.
    pub fn base_point(&self) -> &DMatrix<C64> {
        &self.p
    }

    pub fn q(&self) -> &DMatrix<C64> {
        &self.q
    }

    pub fn r(&self) -> &DMatrix<C64> {
        &self.r
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn unitaries(&self) -> (&DMatrix<C64>, &DMatrix<C64>) {
        (&self.u, &self.v)
    }

    /// Builds the factors from explicit SVD data, without re-factorizing.
    /// Used to confirm that degenerate singular values leave the
    /// automorphism well defined whichever factorization is chosen.
    pub fn from_svd_parts(
        descriptor: DomainDescriptor,
        u: DMatrix<C64>,
        lambdas: Vec<f64>,
        v: DMatrix<C64>,
    ) -> Result<Self> {
        let (m, n) = descriptor
            .matrix_shape()
            .filter(|_| matches!(descriptor, DomainDescriptor::TypeI { .. }))
            .ok_or_else(|| Error::InvalidParameter("Möbius maps live on type I".into()))?;
        if u.shape() != (m, m) || v.shape() != (n, n) || lambdas.len() != m {
            return Err(Error::InvalidParameter("SVD part shapes mismatch".into()));
        }
        if lambdas.iter().any(|&l| !(0.0..1.0).contains(&l)) {
            return Err(Error::OutsideDomain);
        }
        let mut sigma = DMatrix::<C64>::zeros(m, n);
        for (k, &l) in lambdas.iter().enumerate() {
            sigma[(k, k)] = cr(l);
        }
        let p = &u * sigma * &v;

        let stretch = DMatrix::<C64>::from_fn(m, m, |i, j| {
            if i == j {
                cr(1.0 / (1.0 - lambdas[i] * lambdas[i]).sqrt())
            } else {
                cr(0.0)
            }
        });
        let q = &u * &stretch * u.adjoint();
        let mut padded = DMatrix::<C64>::identity(n, n);
        padded.view_mut((0, 0), (m, m)).copy_from(&stretch);
        let r = v.adjoint() * padded * &v;
        Ok(MobiusFactors {
            descriptor,
            p,
            u,
            v,
            lambdas,
            q,
            r,
        })
    }

    /// `Φ_P(Z)` on coordinate matrices.
    pub fn apply_matrix(&self, z: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let m = self.resolvent(z)?;
        // X = (P − Z)(I − P̄′Z)⁻¹ via the transposed system
        let x = transpose_solve(&m, &(&self.p - z))?;
        let y = &self.q * x;
        // result R = Y
        right_divide(&y, &self.r)
    }

    /// The right-handed form `Q⁻¹ (I − ZP̄′)⁻¹ (P − Z) R`; agrees with
    /// [`apply_matrix`](Self::apply_matrix) and is exercised as a
    /// dual-evaluation cross-check.
    pub fn apply_matrix_dual(&self, z: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let mrows = self.p.nrows();
        let m = DMatrix::<C64>::identity(mrows, mrows) - z * self.p.adjoint();
        let lu = m.lu();
        let x = lu
            .solve(&(&self.p - z))
            .ok_or_else(|| Error::Conditioning("I - ZP̄′ numerically singular".into()))?;
        let qlu = self.q.clone().lu();
        let y = qlu
            .solve(&x)
            .ok_or_else(|| Error::Conditioning("Q numerically singular".into()))?;
        Ok(y * &self.r)
    }

    /// The differential of `Φ_P` at `Z` as an mn×mn matrix acting on
    /// row-major vec coordinates.
    pub fn jacobian_matrix(&self, z: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let (m, n) = self.p.shape();
        let resolvent = self.resolvent(z)?;
        let s = transpose_solve(&resolvent, &(&self.p - z))?;
        let a = &self.q * (&s * self.p.adjoint() - DMatrix::<C64>::identity(m, m));
        // B = (I − P̄′Z)⁻¹ R⁻¹
        let r_inv = self
            .r
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::Conditioning("R numerically singular".into()))?;
        let b = resolvent
            .lu()
            .solve(&r_inv)
            .ok_or_else(|| Error::Conditioning("I - P̄′Z numerically singular".into()))?;
        let _ = n;
        Ok(kronecker(&a, &b.transpose()))
    }

    fn resolvent(&self, z: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let n = self.p.ncols();
        if z.shape() != self.p.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.p.nrows() * self.p.ncols(),
                got: z.nrows() * z.ncols(),
            });
        }
        Ok(DMatrix::<C64>::identity(n, n) - self.p.adjoint() * z)
    }
}

// X M = B  solved as  Mᵀ Xᵀ = Bᵀ.
fn transpose_solve(m: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let lu = m.transpose().lu();
    let xt = lu
        .solve(&b.transpose())
        .ok_or_else(|| Error::Conditioning("I - P̄′Z numerically singular".into()))?;
    Ok(xt.transpose())
}

// Y R⁻¹ solved as Rᵀ Xᵀ = Yᵀ.
fn right_divide(y: &DMatrix<C64>, r: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let lu = r.transpose().lu();
    let xt = lu
        .solve(&y.transpose())
        .ok_or_else(|| Error::Conditioning("R numerically singular".into()))?;
    Ok(xt.transpose())
}

/// Computes the Möbius factors of an interior type-I point.
pub fn mobius_factors(p: &Point) -> Result<MobiusFactors> {
    let descriptor = p.descriptor().clone();
    if !matches!(descriptor, DomainDescriptor::TypeI { .. }) {
        return Err(Error::InvalidParameter(
            "Möbius automorphisms are implemented on type I".into(),
        ));
    }
    let pm = p.to_matrix()?;
    let svd = svd_normal_form(&pm)?;
    if svd.lambdas.first().copied().unwrap_or(0.0) >= 1.0 {
        return Err(Error::OutsideDomain);
    }
    MobiusFactors::from_svd_parts(descriptor, svd.u, svd.lambdas, svd.v)
}

/// `Φ_P(Z)` on points.
pub fn mobius_apply(p: &Point, z: &Point) -> Result<Point> {
    let factors = mobius_factors(p)?;
    let out = factors.apply_matrix(&z.to_matrix()?)?;
    Point::from_matrix(p.descriptor().clone(), &out)
}

/// The vec-coordinate differential of `Φ_P` at `Z`.
pub fn mobius_jacobian(p: &Point, z: &Point) -> Result<DMatrix<C64>> {
    let factors = mobius_factors(p)?;
    factors.jacobian_matrix(&z.to_matrix()?)
}

/// The reduction `Ψ = Φ_{λ_keep E_kk} ∘ Φ_D` collapsing the diagonal point
/// `D = Σ λ_k E_kk` onto its rank-one part `λ_keep E_kk`: `Φ_D` sends `D`
/// to the origin and the outer involution sends the origin on to
/// `λ_keep E_kk`.
pub fn collapse_map(domain: &DomainDescriptor, lambdas: &[f64], keep: usize) -> Result<HoloMap> {
    let (m, n) = domain
        .matrix_shape()
        .filter(|_| matches!(domain, DomainDescriptor::TypeI { .. }))
        .ok_or_else(|| Error::InvalidParameter("collapse map lives on type I".into()))?;
    if lambdas.is_empty() || lambdas.len() > m || keep >= lambdas.len() {
        return Err(Error::InvalidParameter(
            "need 1..=m singular values and a kept index among them".into(),
        ));
    }
    for w in lambdas.windows(2) {
        if w[1] > w[0] {
            return Err(Error::InvalidParameter(
                "singular values must be descending".into(),
            ));
        }
    }
    if lambdas[0] >= 1.0 || lambdas[lambdas.len() - 1] < 0.0 {
        return Err(Error::InvalidParameter(
            "singular values must lie in [0, 1)".into(),
        ));
    }

    let mut d_coords = DVector::<C64>::zeros(m * n);
    for (k, &l) in lambdas.iter().enumerate() {
        d_coords[k * n + k] = cr(l);
    }
    let diag = Point::from_vector(domain.clone(), d_coords)?;
    let mut kept = DVector::<C64>::zeros(m * n);
    kept[keep * n + keep] = cr(lambdas[keep]);
    let kept = Point::from_vector(domain.clone(), kept)?;

    HoloMap::compose(vec![HoloMap::mobius(&diag)?, HoloMap::mobius(&kept)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainDescriptor as D;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn scalar_factors() {
        let disc = D::type_i(1, 1).unwrap();
        let p = Point::interior(disc, vec![c(0.6, 0.0)]).unwrap();
        let f = mobius_factors(&p).unwrap();
        assert!((f.q()[(0, 0)] - cr(1.25)).norm() < 1e-12);
        assert!((f.r()[(0, 0)] - cr(1.25)).norm() < 1e-12);
    }

    #[test]
    fn origin_gives_identity_factors() {
        let d = D::type_i(2, 3).unwrap();
        let f = mobius_factors(&Point::origin(d)).unwrap();
        assert!((f.q() - DMatrix::<C64>::identity(2, 2)).norm() < 1e-14);
        assert!((f.r() - DMatrix::<C64>::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn rank_one_factors() {
        // λ = (0.5, 0) gives diag(2/√3, 1) on both sides
        let d = D::type_i(2, 2).unwrap();
        let p = Point::new(d, vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let f = mobius_factors(&p).unwrap();
        let s = 2.0 / 3.0f64.sqrt();
        assert!((f.q()[(0, 0)] - cr(s)).norm() < 1e-12);
        assert!((f.q()[(1, 1)] - cr(1.0)).norm() < 1e-12);
        assert!((f.r()[(0, 0)] - cr(s)).norm() < 1e-12);
        assert!((f.r()[(1, 1)] - cr(1.0)).norm() < 1e-12);
    }

    #[test]
    fn exchange_behaviour() {
        let d = D::type_i(2, 3).unwrap();
        let mut rng = crate::sampling::stream_rng(21, 0);
        for _ in 0..20 {
            let p = crate::sampling::random_interior(&d, &mut rng, 0.1, 0.8);
            let at_p = mobius_apply(&p, &p).unwrap();
            assert!(at_p.coords().norm() < 1e-12);
            let at_zero = mobius_apply(&p, &Point::origin(d.clone())).unwrap();
            assert!((at_zero.coords() - p.coords()).norm() < 1e-11);
        }
    }

    #[test]
    fn scalar_mobius_matches_disc_formula() {
        let disc = D::type_i(1, 1).unwrap();
        let p = Point::interior(disc.clone(), vec![c(0.5, 0.0)]).unwrap();
        let z = Point::interior(disc, vec![c(0.8, 0.0)]).unwrap();
        let out = mobius_apply(&p, &z).unwrap();
        assert!((out.coords()[0] - c(-0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn scalar_jacobian_value() {
        let disc = D::type_i(1, 1).unwrap();
        let p = Point::interior(disc.clone(), vec![c(0.5, 0.0)]).unwrap();
        let z = Point::interior(disc, vec![c(0.5, 0.0)]).unwrap();
        let j = mobius_jacobian(&p, &z).unwrap();
        assert!((j[(0, 0)] - c(-4.0 / 3.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn boundary_point_rejected() {
        let d = D::type_i(2, 2).unwrap();
        let p = Point::new(d, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(mobius_factors(&p).is_err());
    }

    #[test]
    fn collapse_map_fixes_rank_one() {
        let d = D::type_i(2, 2).unwrap();
        let psi = collapse_map(&d, &[0.8, 0.5], 0).unwrap();
        let mut coords = DVector::<C64>::zeros(4);
        coords[0] = cr(0.8);
        coords[3] = cr(0.5);
        let diag = Point::from_vector(d.clone(), coords).unwrap();
        let image = psi.evaluate(&diag).unwrap();
        let mut want = DVector::<C64>::zeros(4);
        want[0] = cr(0.8);
        assert!((image.coords() - want).norm() < 1e-10);

        // rank-one input: the two factors cancel
        let psi = collapse_map(&d, &[0.7, 0.0], 0).unwrap();
        let mut coords = DVector::<C64>::zeros(4);
        coords[0] = cr(0.7);
        let p = Point::from_vector(d.clone(), coords.clone()).unwrap();
        let image = psi.evaluate(&p).unwrap();
        assert!((image.coords() - coords).norm() < 1e-11);
    }
}
