//! A closed registry of holomorphic maps between Cartan domains, with
//! evaluation, analytic Jacobians in intrinsic coordinates, and a
//! finite-difference Jacobian used as an independent oracle.
//!
//! The registry covers every qualitative regime of the compactness
//! diagnostic: automorphisms (distortion ratio identically one), strict
//! contractions (image bounded away from the boundary), boundary-touching
//! affine disc maps (ratio approaching one along the boundary), unitary
//! rotations, products, compositions and factor embeddings. Arbitrary maps
//! are deliberately not accepted as code: compositions of these families
//! keep Jacobians analytic and the self-map contract checkable.

use nalgebra::{DMatrix, DVector};

use crate::automorphisms::{mobius_factors, MobiusFactors};
use crate::domains::{DomainDescriptor, Point};
use crate::error::{Error, Result};
use crate::linalg::{self, cr, kronecker, C64};

#[derive(Debug, Clone)]
enum Family {
    Identity,
    Constant(Point),
    Scale(f64),
    DiscAffine {
        a: C64,
        b: C64,
    },
    UnitaryPair {
        left: DMatrix<C64>,
        right: DMatrix<C64>,
    },
    Mobius(MobiusFactors),
    Product(Vec<HoloMap>),
    Compose(Vec<HoloMap>),
    FactorEmbed {
        index: usize,
        base: Box<HoloMap>,
    },
}

/// A composable holomorphic map descriptor with evaluation and Jacobian.
#[derive(Debug, Clone)]
pub struct HoloMap {
    source: DomainDescriptor,
    target: DomainDescriptor,
    family: Family,
}

/// Central-difference Jacobian together with the Cauchy-Riemann residual
/// between the real-axis and imaginary-axis difference quotients.
#[derive(Debug, Clone)]
pub struct FdJacobian {
    pub matrix: DMatrix<C64>,
    pub cauchy_riemann_residual: f64,
}

impl HoloMap {
    pub fn identity(domain: DomainDescriptor) -> Self {
        HoloMap {
            source: domain.clone(),
            target: domain,
            family: Family::Identity,
        }
    }

    /// The constant map onto an interior point of its own domain.
    pub fn constant(value: Point) -> Result<Self> {
        if !value.is_interior()? {
            return Err(Error::OutsideDomain);
        }
        Ok(HoloMap {
            source: value.descriptor().clone(),
            target: value.descriptor().clone(),
            family: Family::Constant(value),
        })
    }

    /// `z ↦ c·z` with `0 < c ≤ 1`; a self-map because the domains are
    /// complete circular.
    pub fn scale(domain: DomainDescriptor, c: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must satisfy 0 < c <= 1, got {c}"
            )));
        }
        Ok(HoloMap {
            source: domain.clone(),
            target: domain,
            family: Family::Scale(c),
        })
    }

    /// `z ↦ a + b·z` on the disc `R_I(1,1)`, with `|a| + |b| ≤ 1`. Touches
    /// the boundary exactly when `|a| + |b| = 1`.
    pub fn disc_affine(a: C64, b: C64) -> Result<Self> {
        if a.norm() + b.norm() > 1.0 {
            return Err(Error::InvalidParameter(
                "disc affine map requires |a| + |b| <= 1".into(),
            ));
        }
        let disc = DomainDescriptor::TypeI { rows: 1, cols: 1 };
        Ok(HoloMap {
            source: disc.clone(),
            target: disc,
            family: Family::DiscAffine { a, b },
        })
    }

    /// `Z ↦ L·Z·R` on a type-I domain for unitary `L`, `R`.
    pub fn unitary_pair(
        domain: DomainDescriptor,
        left: DMatrix<C64>,
        right: DMatrix<C64>,
    ) -> Result<Self> {
        let (m, n) = match &domain {
            DomainDescriptor::TypeI { rows, cols } => (*rows, *cols),
            _ => {
                return Err(Error::InvalidParameter(
                    "unitary pairs act on type I".into(),
                ))
            }
        };
        if left.shape() != (m, m) || right.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: m * m + n * n,
                got: left.nrows() * left.ncols() + right.nrows() * right.ncols(),
            });
        }
        if linalg::unitarity_defect(&left) > 1e-12 || linalg::unitarity_defect(&right) > 1e-12 {
            return Err(Error::InvalidParameter("factors are not unitary".into()));
        }
        Ok(HoloMap {
            source: domain.clone(),
            target: domain,
            family: Family::UnitaryPair { left, right },
        })
    }

    /// The Möbius automorphism exchanging `p` with the origin.
    pub fn mobius(p: &Point) -> Result<Self> {
        let factors = mobius_factors(p)?;
        Ok(HoloMap {
            source: p.descriptor().clone(),
            target: p.descriptor().clone(),
            family: Family::Mobius(factors),
        })
    }

    /// Factor-wise map between product domains.
    pub fn product(children: Vec<HoloMap>) -> Result<Self> {
        if children.is_empty() {
            return Err(Error::InvalidParameter("empty product map".into()));
        }
        let source =
            DomainDescriptor::product(children.iter().map(|c| c.source.clone()).collect())?;
        let target =
            DomainDescriptor::product(children.iter().map(|c| c.target.clone()).collect())?;
        Ok(HoloMap {
            source,
            target,
            family: Family::Product(children),
        })
    }

    /// Pipeline composition: the first map is applied first, so
    /// `compose([g, f])` is the function `f ∘ g`.
    pub fn compose(children: Vec<HoloMap>) -> Result<Self> {
        if children.is_empty() {
            return Err(Error::InvalidParameter("empty composition".into()));
        }
        for pair in children.windows(2) {
            if pair[0].target != pair[1].source {
                return Err(Error::TypeMismatch(
                    "composition stages do not chain".into(),
                ));
            }
        }
        let source = children.first().unwrap().source.clone();
        let target = children.last().unwrap().target.clone();
        Ok(HoloMap {
            source,
            target,
            family: Family::Compose(children),
        })
    }

    /// Embeds the image of `base` into factor `index` of a product, putting
    /// every other factor at its center.
    pub fn factor_embed(product: DomainDescriptor, index: usize, base: HoloMap) -> Result<Self> {
        let factors: Vec<_> = product.factors().cloned().collect();
        if !matches!(product, DomainDescriptor::Product(_)) || index >= factors.len() {
            return Err(Error::InvalidParameter(
                "factor embedding needs a product target and a valid index".into(),
            ));
        }
        if base.target != factors[index] {
            return Err(Error::TypeMismatch(
                "embedded map does not land in the chosen factor".into(),
            ));
        }
        Ok(HoloMap {
            source: base.source.clone(),
            target: product,
            family: Family::FactorEmbed {
                index,
                base: Box::new(base),
            },
        })
    }

    pub fn source(&self) -> &DomainDescriptor {
        &self.source
    }

    pub fn target(&self) -> &DomainDescriptor {
        &self.target
    }

    pub fn is_self_map(&self) -> bool {
        self.source == self.target
    }

    /// The children of a factor-wise product map.
    pub fn product_factors(&self) -> Option<&[HoloMap]> {
        match &self.family {
            Family::Product(children) => Some(children),
            _ => None,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match &self.family {
            Family::Identity => "identity",
            Family::Constant(_) => "constant",
            Family::Scale(_) => "scale",
            Family::DiscAffine { .. } => "disc_affine",
            Family::UnitaryPair { .. } => "unitary_pair",
            Family::Mobius(_) => "mobius",
            Family::Product(_) => "product",
            Family::Compose(_) => "compose",
            Family::FactorEmbed { .. } => "factor_embed",
        }
    }

    /// Applies the map to a point of its source domain.
    pub fn evaluate(&self, z: &Point) -> Result<Point> {
        if z.descriptor() != &self.source {
            return Err(Error::TypeMismatch(
                "point does not live in the map's source".into(),
            ));
        }
        match &self.family {
            Family::Identity => Ok(z.clone()),
            Family::Constant(c) => Ok(c.clone()),
            Family::Scale(c) => Point::from_vector(self.target.clone(), z.coords() * cr(*c)),
            Family::DiscAffine { a, b } => Point::from_vector(
                self.target.clone(),
                DVector::from_vec(vec![a + b * z.coords()[0]]),
            ),
            Family::UnitaryPair { left, right } => {
                let out = left * z.to_matrix()? * right;
                Point::from_matrix(self.target.clone(), &out)
            }
            Family::Mobius(factors) => {
                let out = factors.apply_matrix(&z.to_matrix()?)?;
                Point::from_matrix(self.target.clone(), &out)
            }
            Family::Product(children) => {
                let mut coords = DVector::zeros(self.target.dimension());
                let spans = self.target.factor_spans();
                for (k, child) in children.iter().enumerate() {
                    let out = child.evaluate(&z.factor(k)?)?;
                    let (off, len) = spans[k];
                    coords.rows_mut(off, len).copy_from(out.coords());
                }
                Point::from_vector(self.target.clone(), coords)
            }
            Family::Compose(children) => {
                let mut point = z.clone();
                for child in children {
                    point = child.evaluate(&point)?;
                }
                Ok(point)
            }
            Family::FactorEmbed { index, base } => {
                let mut coords = DVector::zeros(self.target.dimension());
                let (off, len) = self.target.factor_spans()[*index];
                let out = base.evaluate(z)?;
                coords.rows_mut(off, len).copy_from(out.coords());
                Point::from_vector(self.target.clone(), coords)
            }
        }
    }

    /// The analytic Jacobian in intrinsic coordinates, target × source.
    pub fn jacobian(&self, z: &Point) -> Result<DMatrix<C64>> {
        if z.descriptor() != &self.source {
            return Err(Error::TypeMismatch(
                "point does not live in the map's source".into(),
            ));
        }
        let (nt, ns) = (self.target.dimension(), self.source.dimension());
        match &self.family {
            Family::Identity => Ok(DMatrix::identity(nt, ns)),
            Family::Constant(_) => Ok(DMatrix::zeros(nt, ns)),
            Family::Scale(c) => Ok(DMatrix::identity(nt, ns) * cr(*c)),
            Family::DiscAffine { b, .. } => Ok(DMatrix::from_element(1, 1, *b)),
            Family::UnitaryPair { left, right } => Ok(kronecker(left, &right.transpose())),
            Family::Mobius(factors) => factors.jacobian_matrix(&z.to_matrix()?),
            Family::Product(children) => {
                let mut j = DMatrix::zeros(nt, ns);
                let tspans = self.target.factor_spans();
                let sspans = self.source.factor_spans();
                for (k, child) in children.iter().enumerate() {
                    let jk = child.jacobian(&z.factor(k)?)?;
                    j.view_mut((tspans[k].0, sspans[k].0), (tspans[k].1, sspans[k].1))
                        .copy_from(&jk);
                }
                Ok(j)
            }
            Family::Compose(children) => {
                let mut point = z.clone();
                let mut j = children[0].jacobian(&point)?;
                point = children[0].evaluate(&point)?;
                for child in &children[1..] {
                    j = child.jacobian(&point)? * j;
                    point = child.evaluate(&point)?;
                }
                Ok(j)
            }
            Family::FactorEmbed { index, base } => {
                let mut j = DMatrix::zeros(nt, ns);
                let (off, len) = self.target.factor_spans()[*index];
                let jb = base.jacobian(z)?;
                j.view_mut((off, 0), (len, ns)).copy_from(&jb);
                Ok(j)
            }
        }
    }

    /// Central-difference Jacobian with step `h`, differenced along both the
    /// real and imaginary axis of every coordinate; the two estimates are
    /// averaged and their disagreement reported as the Cauchy-Riemann
    /// residual.
    pub fn jacobian_fd(&self, z: &Point, h: f64) -> Result<FdJacobian> {
        if h <= 0.0 {
            return Err(Error::InvalidParameter("step must be positive".into()));
        }
        if z.descriptor() != &self.source {
            return Err(Error::TypeMismatch(
                "point does not live in the map's source".into(),
            ));
        }
        let ns = self.source.dimension();
        let nt = self.target.dimension();
        let mut jx = DMatrix::<C64>::zeros(nt, ns);
        let mut jy = DMatrix::<C64>::zeros(nt, ns);
        for k in 0..ns {
            let eval_at = |dk: C64| -> Result<DVector<C64>> {
                let mut coords = z.coords().clone();
                coords[k] += dk;
                if !self.source.contains(&coords)? {
                    return Err(Error::OutsideDomain);
                }
                let p = Point::from_vector(self.source.clone(), coords)?;
                Ok(self.evaluate(&p)?.coords().clone())
            };
            let fxp = eval_at(cr(h))?;
            let fxm = eval_at(cr(-h))?;
            let fyp = eval_at(C64::new(0.0, h))?;
            let fym = eval_at(C64::new(0.0, -h))?;
            let col_x = (fxp - fxm) / cr(2.0 * h);
            let col_y = (fyp - fym) / C64::new(0.0, 2.0 * h);
            jx.set_column(k, &col_x);
            jy.set_column(k, &col_y);
        }
        let residual = (&jx - &jy).norm() / (1.0 + jx.norm());
        Ok(FdJacobian {
            matrix: (jx + jy) * cr(0.5),
            cauchy_riemann_residual: residual,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainDescriptor as D;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn evaluate_basics() {
        let disc = D::type_i(1, 1).unwrap();
        let id = HoloMap::identity(disc.clone());
        let z = Point::interior(disc.clone(), vec![c(0.8, 0.0)]).unwrap();
        assert_eq!(id.evaluate(&z).unwrap(), z);

        let half = HoloMap::scale(disc.clone(), 0.5).unwrap();
        assert!((half.evaluate(&z).unwrap().coords()[0] - c(0.4, 0.0)).norm() < 1e-15);

        // the boundary-touching map (1+z)/2
        let aff = HoloMap::disc_affine(c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        let r = Point::interior(disc, vec![c(0.6, 0.0)]).unwrap();
        assert!((aff.evaluate(&r).unwrap().coords()[0] - c(0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn jacobian_basics() {
        let d = D::type_i(2, 2).unwrap();
        let id = HoloMap::identity(d.clone());
        let z = Point::origin(d.clone());
        assert_eq!(id.jacobian(&z).unwrap(), DMatrix::identity(4, 4));

        let s = HoloMap::scale(d.clone(), 0.3).unwrap();
        assert!((s.jacobian(&z).unwrap() - DMatrix::identity(4, 4) * cr(0.3)).norm() < 1e-15);

        let aff = HoloMap::disc_affine(c(0.5, 0.0), c(0.25, 0.25)).unwrap();
        let w = Point::origin(D::type_i(1, 1).unwrap());
        assert_eq!(aff.jacobian(&w).unwrap()[(0, 0)], c(0.25, 0.25));
    }

    #[test]
    fn parameter_validation() {
        assert!(HoloMap::scale(D::type_iv(2).unwrap(), 0.0).is_err());
        assert!(HoloMap::scale(D::type_iv(2).unwrap(), 1.5).is_err());
        assert!(HoloMap::disc_affine(c(0.8, 0.0), c(0.3, 0.0)).is_err());
        let not_unitary = DMatrix::from_element(2, 2, c(0.5, 0.0));
        assert!(HoloMap::unitary_pair(
            D::type_i(2, 2).unwrap(),
            not_unitary,
            DMatrix::identity(2, 2)
        )
        .is_err());
    }

    #[test]
    fn compose_type_checks() {
        let disc = D::type_i(1, 1).unwrap();
        let ball = D::type_iv(2).unwrap();
        let a = HoloMap::scale(disc.clone(), 0.5).unwrap();
        let b = HoloMap::scale(ball, 0.5).unwrap();
        assert!(HoloMap::compose(vec![a.clone(), b]).is_err());
        assert!(HoloMap::compose(vec![a.clone(), a]).is_ok());
    }

    #[test]
    fn fd_jacobian_matches_identity_and_scale() {
        let d = D::type_ii(2).unwrap();
        let z = Point::origin(d.clone());
        let id = HoloMap::identity(d.clone());
        let fd = id.jacobian_fd(&z, 1e-5).unwrap();
        assert!((fd.matrix - DMatrix::identity(3, 3)).norm() < 1e-9);
        assert!(fd.cauchy_riemann_residual < 1e-9);

        let s = HoloMap::scale(d, 0.3).unwrap();
        let fd = s.jacobian_fd(&z, 1e-5).unwrap();
        assert!((fd.matrix - DMatrix::identity(3, 3) * cr(0.3)).norm() < 1e-9);
    }

    #[test]
    fn fd_jacobian_matches_mobius() {
        let disc = D::type_i(1, 1).unwrap();
        let p = Point::interior(disc.clone(), vec![c(0.5, 0.0)]).unwrap();
        let phi = HoloMap::mobius(&p).unwrap();
        let z = Point::origin(disc);
        let fd = phi.jacobian_fd(&z, 1e-5).unwrap();
        let analytic = phi.jacobian(&z).unwrap();
        assert!((fd.matrix - analytic).norm() < 1e-6);
    }

    #[test]
    fn fd_stencil_must_stay_inside() {
        let disc = D::type_i(1, 1).unwrap();
        let id = HoloMap::identity(disc.clone());
        let z = Point::new(disc, vec![c(1.0 - 1e-7, 0.0)]).unwrap();
        assert!(matches!(
            id.jacobian_fd(&z, 1e-5),
            Err(Error::OutsideDomain)
        ));
    }

    #[test]
    fn product_and_embed_shapes() {
        let disc = D::type_i(1, 1).unwrap();
        let ball = D::type_iv(2).unwrap();
        let pm = HoloMap::product(vec![
            HoloMap::scale(disc.clone(), 0.5).unwrap(),
            HoloMap::identity(ball.clone()),
        ])
        .unwrap();
        let prod = pm.source().clone();
        let z = Point::interior(prod.clone(), vec![c(0.4, 0.0), c(0.1, 0.0), c(0.2, 0.0)]).unwrap();
        let out = pm.evaluate(&z).unwrap();
        assert!((out.coords()[0] - c(0.2, 0.0)).norm() < 1e-15);
        assert_eq!(out.coords()[2], c(0.2, 0.0));
        let j = pm.jacobian(&z).unwrap();
        assert_eq!(j[(0, 0)], c(0.5, 0.0));
        assert_eq!(j[(1, 1)], c(1.0, 0.0));
        assert_eq!(j[(0, 1)], c(0.0, 0.0));

        let embed =
            HoloMap::factor_embed(prod, 0, HoloMap::scale(disc.clone(), 0.9).unwrap()).unwrap();
        let w = Point::interior(disc, vec![c(0.5, 0.0)]).unwrap();
        let out = embed.evaluate(&w).unwrap();
        assert!((out.coords()[0] - c(0.45, 0.0)).norm() < 1e-15);
        assert_eq!(out.coords()[1], c(0.0, 0.0));
        let j = embed.jacobian(&w).unwrap();
        assert_eq!(j.shape(), (3, 1));
        assert_eq!(j[(0, 0)], c(0.9, 0.0));
    }
}
