//! The four classical Cartan domains, their products, and coordinate
//! plumbing: intrinsic/matrix conversions, membership tests and a
//! boundary-distance surrogate.
//!
//! Membership:
//! - `R_I(m,n)`: m×n complex matrices with `I_m − ZZ̄′ > 0` (m ≤ n),
//! - `R_II(p)`: symmetric p×p with `I_p − ZZ̄ > 0`,
//! - `R_III(q)`: antisymmetric q×q with `I_q + ZZ̄ > 0`,
//! - `R_IV(N)`: vectors with `1 + |zz′|² − 2zz̄′ > 0` and `|zz′| < 1`.
//!
//! Positive definiteness is decided by the smallest eigenvalue of the
//! Hermitian defining matrix, compared exactly against zero.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, cr, C64};

/// Which Cartan domain (or finite product of them) a point lives in.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainDescriptor {
    /// `R_I(m,n)`, m×n matrices, `1 ≤ m ≤ n`.
    TypeI { rows: usize, cols: usize },
    /// `R_II(p)`, symmetric p×p matrices, `p ≥ 1`.
    TypeII { size: usize },
    /// `R_III(q)`, antisymmetric q×q matrices, `q ≥ 2`.
    TypeIII { size: usize },
    /// `R_IV(N)`, the Lie ball in `C^N`, `N ≥ 1`.
    TypeIV { dim: usize },
    /// A product of factors; never nested, never empty.
    Product(Vec<DomainDescriptor>),
}

impl DomainDescriptor {
    pub fn type_i(rows: usize, cols: usize) -> Result<Self> {
        if rows < 1 || rows > cols {
            return Err(Error::InvalidDescriptor(format!(
                "type I requires 1 <= m <= n, got ({rows},{cols})"
            )));
        }
        Ok(DomainDescriptor::TypeI { rows, cols })
    }

    pub fn type_ii(size: usize) -> Result<Self> {
        if size < 1 {
            return Err(Error::InvalidDescriptor("type II requires p >= 1".into()));
        }
        Ok(DomainDescriptor::TypeII { size })
    }

    pub fn type_iii(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidDescriptor("type III requires q >= 2".into()));
        }
        Ok(DomainDescriptor::TypeIII { size })
    }

    pub fn type_iv(dim: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidDescriptor("type IV requires N >= 1".into()));
        }
        Ok(DomainDescriptor::TypeIV { dim })
    }

    /// Builds a product descriptor, flattening nested products.
    pub fn product(factors: Vec<DomainDescriptor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDescriptor("empty product".into()));
        }
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            match f {
                DomainDescriptor::Product(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        Ok(DomainDescriptor::Product(flat))
    }

    /// Intrinsic complex dimension.
    pub fn dimension(&self) -> usize {
        match self {
            DomainDescriptor::TypeI { rows, cols } => rows * cols,
            DomainDescriptor::TypeII { size } => size * (size + 1) / 2,
            DomainDescriptor::TypeIII { size } => size * (size - 1) / 2,
            DomainDescriptor::TypeIV { dim } => *dim,
            DomainDescriptor::Product(fs) => fs.iter().map(|f| f.dimension()).sum(),
        }
    }

    /// Matrix shape of the coordinate matrix, for the matrix kinds.
    pub fn matrix_shape(&self) -> Option<(usize, usize)> {
        match self {
            DomainDescriptor::TypeI { rows, cols } => Some((*rows, *cols)),
            DomainDescriptor::TypeII { size } | DomainDescriptor::TypeIII { size } => {
                Some((*size, *size))
            }
            _ => None,
        }
    }

    pub fn factors(&self) -> std::slice::Iter<'_, DomainDescriptor> {
        match self {
            DomainDescriptor::Product(fs) => fs.iter(),
            _ => std::slice::from_ref(self).iter(),
        }
    }

    /// `(offset, length)` of each factor's slice of the intrinsic vector.
    pub fn factor_spans(&self) -> Vec<(usize, usize)> {
        let mut spans = Vec::new();
        let mut off = 0;
        for f in self.factors() {
            let d = f.dimension();
            spans.push((off, d));
            off += d;
        }
        spans
    }

    fn kind_name(&self) -> &'static str {
        match self {
            DomainDescriptor::TypeI { .. } => "type I",
            DomainDescriptor::TypeII { .. } => "type II",
            DomainDescriptor::TypeIII { .. } => "type III",
            DomainDescriptor::TypeIV { .. } => "type IV",
            DomainDescriptor::Product(_) => "product",
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        let expected = self.dimension();
        if len != expected {
            return Err(Error::DimensionMismatch { expected, got: len });
        }
        Ok(())
    }

    /// Fills the coordinate matrix from the intrinsic vector (kinds I-III).
    ///
    /// Type I fills row-major; type II mirrors the upper-triangle entries
    /// `z_kl`, `k ≤ l`; type III mirrors the strict upper triangle with a
    /// sign flip and zero diagonal.
    pub fn to_matrix(&self, v: &DVector<C64>) -> Result<DMatrix<C64>> {
        self.check_len(v.len())?;
        match self {
            DomainDescriptor::TypeI { rows, cols } => {
                Ok(DMatrix::from_fn(*rows, *cols, |i, j| v[i * cols + j]))
            }
            DomainDescriptor::TypeII { size } => {
                let mut z = DMatrix::zeros(*size, *size);
                for (idx, (k, l)) in sym_indices(*size).enumerate() {
                    z[(k, l)] = v[idx];
                    z[(l, k)] = v[idx];
                }
                Ok(z)
            }
            DomainDescriptor::TypeIII { size } => {
                let mut z = DMatrix::zeros(*size, *size);
                for (idx, (k, l)) in antisym_indices(*size).enumerate() {
                    z[(k, l)] = v[idx];
                    z[(l, k)] = -v[idx];
                }
                Ok(z)
            }
            other => Err(Error::NoMatrixForm(other.kind_name())),
        }
    }

    /// Reads the intrinsic vector back out of a coordinate matrix. Exact
    /// round trip of [`to_matrix`](Self::to_matrix).
    pub fn from_matrix(&self, z: &DMatrix<C64>) -> Result<DVector<C64>> {
        let shape = self
            .matrix_shape()
            .ok_or(Error::NoMatrixForm(self.kind_name()))?;
        if z.shape() != shape {
            return Err(Error::DimensionMismatch {
                expected: shape.0 * shape.1,
                got: z.nrows() * z.ncols(),
            });
        }
        match self {
            DomainDescriptor::TypeI { rows, cols } => Ok(DVector::from_fn(rows * cols, |i, _| {
                z[(i / cols, i % cols)]
            })),
            DomainDescriptor::TypeII { size } => Ok(DVector::from_iterator(
                self.dimension(),
                sym_indices(*size).map(|(k, l)| z[(k, l)]),
            )),
            DomainDescriptor::TypeIII { size } => Ok(DVector::from_iterator(
                self.dimension(),
                antisym_indices(*size).map(|(k, l)| z[(k, l)]),
            )),
            _ => unreachable!("matrix_shape filtered the kinds"),
        }
    }

    /// Whether the coordinates describe an interior point.
    pub fn contains(&self, coords: &DVector<C64>) -> Result<bool> {
        self.check_len(coords.len())?;
        Ok(match self {
            DomainDescriptor::TypeI { .. }
            | DomainDescriptor::TypeII { .. }
            | DomainDescriptor::TypeIII { .. } => {
                let f = self.defining_matrix(coords)?;
                linalg::smallest_eigenvalue(&f) > 0.0
            }
            DomainDescriptor::TypeIV { .. } => {
                let (s_abs, rho) = lie_ball_invariants(coords);
                rho > 0.0 && s_abs < 1.0
            }
            DomainDescriptor::Product(_) => {
                let mut ok = true;
                for (f, (off, len)) in self.factors().zip(self.factor_spans()) {
                    ok &= f.contains(&DVector::from(coords.rows(off, len)))?;
                }
                ok
            }
        })
    }

    /// The Hermitian matrix whose positive definiteness defines membership
    /// (kinds I-III): `I − ZZ̄′`, `I − ZZ̄`, `I + ZZ̄` respectively.
    pub(crate) fn defining_matrix(&self, coords: &DVector<C64>) -> Result<DMatrix<C64>> {
        let z = self.to_matrix(coords)?;
        let m = z.nrows();
        let id = DMatrix::<C64>::identity(m, m);
        Ok(match self {
            DomainDescriptor::TypeI { .. } => id - &z * z.adjoint(),
            DomainDescriptor::TypeII { .. } => id - &z * z.conjugate(),
            DomainDescriptor::TypeIII { .. } => id + &z * z.conjugate(),
            _ => unreachable!("matrix kinds only"),
        })
    }

    /// A computable surrogate for the distance to the boundary: positive on
    /// the interior and tending to zero exactly at the boundary. For the
    /// matrix kinds this is `1 − σ_max(Z)`; for the Lie ball,
    /// `min(1 − |zz′|, (1 + |zz′|² − 2zz̄′)/2)`; for products the minimum
    /// over factors.
    pub fn boundary_distance(&self, coords: &DVector<C64>) -> Result<f64> {
        if !self.contains(coords)? {
            return Err(Error::OutsideDomain);
        }
        self.boundary_distance_unchecked(coords)
    }

    fn boundary_distance_unchecked(&self, coords: &DVector<C64>) -> Result<f64> {
        Ok(match self {
            DomainDescriptor::TypeI { .. }
            | DomainDescriptor::TypeII { .. }
            | DomainDescriptor::TypeIII { .. } => {
                let z = self.to_matrix(coords)?;
                1.0 - linalg::largest_singular_value(&z)
            }
            DomainDescriptor::TypeIV { .. } => {
                let (s_abs, rho) = lie_ball_invariants(coords);
                (1.0 - s_abs).min(rho / 2.0)
            }
            DomainDescriptor::Product(_) => {
                let mut d = f64::INFINITY;
                for (f, (off, len)) in self.factors().zip(self.factor_spans()) {
                    let fd =
                        f.boundary_distance_unchecked(&DVector::from(coords.rows(off, len)))?;
                    d = d.min(fd);
                }
                d
            }
        })
    }
}

/// `(|zz′|, 1 + |zz′|² − 2zz̄′)` for a Lie-ball coordinate vector.
pub(crate) fn lie_ball_invariants(coords: &DVector<C64>) -> (f64, f64) {
    let s: C64 = coords.iter().map(|z| z * z).sum();
    let n2: f64 = coords.iter().map(|z| z.norm_sqr()).sum();
    let s_abs = s.norm();
    (s_abs, 1.0 + s_abs * s_abs - 2.0 * n2)
}

pub(crate) fn sym_indices(p: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..p).flat_map(move |k| (k..p).map(move |l| (k, l)))
}

pub(crate) fn antisym_indices(q: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..q).flat_map(move |k| (k + 1..q).map(move |l| (k, l)))
}

/// Linear embedding of intrinsic coordinates into the ambient row-major
/// p×p vectorization: symmetric kinds duplicate the mirrored entry,
/// antisymmetric kinds mirror with a sign flip.
pub(crate) fn ambient_embedding(d: &DomainDescriptor) -> Option<DMatrix<C64>> {
    match d {
        DomainDescriptor::TypeII { size } => {
            let p = *size;
            let mut s = DMatrix::zeros(p * p, d.dimension());
            for (idx, (k, l)) in sym_indices(p).enumerate() {
                s[(k * p + l, idx)] = cr(1.0);
                s[(l * p + k, idx)] = cr(1.0);
            }
            Some(s)
        }
        DomainDescriptor::TypeIII { size } => {
            let q = *size;
            let mut s = DMatrix::zeros(q * q, d.dimension());
            for (idx, (k, l)) in antisym_indices(q).enumerate() {
                s[(k * q + l, idx)] = cr(1.0);
                s[(l * q + k, idx)] = cr(-1.0);
            }
            Some(s)
        }
        _ => None,
    }
}

/// An intrinsic coordinate vector tied to its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    descriptor: DomainDescriptor,
    coords: DVector<C64>,
}

impl Point {
    /// A point with length-checked coordinates; membership is not checked.
    pub fn new(descriptor: DomainDescriptor, coords: Vec<C64>) -> Result<Self> {
        descriptor.check_len(coords.len())?;
        Ok(Point {
            descriptor,
            coords: DVector::from_vec(coords),
        })
    }

    /// A point verified to lie in the interior of its domain.
    pub fn interior(descriptor: DomainDescriptor, coords: Vec<C64>) -> Result<Self> {
        let p = Point::new(descriptor, coords)?;
        if !p.descriptor.contains(&p.coords)? {
            return Err(Error::OutsideDomain);
        }
        Ok(p)
    }

    /// The center of the domain.
    pub fn origin(descriptor: DomainDescriptor) -> Self {
        let n = descriptor.dimension();
        Point {
            descriptor,
            coords: DVector::zeros(n),
        }
    }

    /// Builds a point of a matrix kind from its coordinate matrix.
    pub fn from_matrix(descriptor: DomainDescriptor, z: &DMatrix<C64>) -> Result<Self> {
        let coords = descriptor.from_matrix(z)?;
        Ok(Point { descriptor, coords })
    }

    pub fn from_vector(descriptor: DomainDescriptor, coords: DVector<C64>) -> Result<Self> {
        descriptor.check_len(coords.len())?;
        Ok(Point { descriptor, coords })
    }

    pub fn descriptor(&self) -> &DomainDescriptor {
        &self.descriptor
    }

    pub fn coords(&self) -> &DVector<C64> {
        &self.coords
    }

    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        self.descriptor.to_matrix(&self.coords)
    }

    pub fn is_interior(&self) -> Result<bool> {
        self.descriptor.contains(&self.coords)
    }

    pub fn boundary_distance(&self) -> Result<f64> {
        self.descriptor.boundary_distance(&self.coords)
    }

    /// The slice of this point living in factor `index` of a product.
    pub fn factor(&self, index: usize) -> Result<Point> {
        let spans = self.descriptor.factor_spans();
        let factor = self
            .descriptor
            .factors()
            .nth(index)
            .ok_or_else(|| Error::InvalidParameter(format!("no factor {index}")))?;
        let (off, len) = spans[index];
        Ok(Point {
            descriptor: factor.clone(),
            coords: DVector::from(self.coords.rows(off, len)),
        })
    }
}

/// A tangent vector in the intrinsic coordinates of its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    descriptor: DomainDescriptor,
    coords: DVector<C64>,
}

impl Tangent {
    pub fn new(descriptor: DomainDescriptor, coords: Vec<C64>) -> Result<Self> {
        descriptor.check_len(coords.len())?;
        Ok(Tangent {
            descriptor,
            coords: DVector::from_vec(coords),
        })
    }

    pub fn from_vector(descriptor: DomainDescriptor, coords: DVector<C64>) -> Result<Self> {
        descriptor.check_len(coords.len())?;
        Ok(Tangent { descriptor, coords })
    }

    pub fn descriptor(&self) -> &DomainDescriptor {
        &self.descriptor
    }

    pub fn coords(&self) -> &DVector<C64> {
        &self.coords
    }

    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        self.descriptor.to_matrix(&self.coords)
    }

    pub fn factor(&self, index: usize) -> Result<Tangent> {
        let spans = self.descriptor.factor_spans();
        let factor = self
            .descriptor
            .factors()
            .nth(index)
            .ok_or_else(|| Error::InvalidParameter(format!("no factor {index}")))?;
        let (off, len) = spans[index];
        Ok(Tangent {
            descriptor: factor.clone(),
            coords: DVector::from(self.coords.rows(off, len)),
        })
    }
}
