//! Numerics for the Bergman geometry of the classical Cartan domains.
//!
//! The crate implements the four classical bounded symmetric domains (the
//! matrix balls `R_I`, `R_II`, `R_III` and the Lie ball `R_IV`) together with
//! their Bergman metrics, the matrix Möbius automorphisms of `R_I`, the
//! extremal test functions used to probe Bloch seminorms near the boundary,
//! and a sampled diagnostic for compactness of composition operators
//! `f ↦ f ∘ φ` on the Bloch space.
//!
//! Coordinates are intrinsic complex vectors throughout: a point of
//! `R_I(m,n)` is the row-major vector of its matrix, a point of `R_II(p)`
//! lists the upper-triangle entries `z_kl` with `k ≤ l`, a point of
//! `R_III(q)` the strict upper triangle, and a point of `R_IV(N)` is an
//! `N`-vector. Metric Gram matrices use the column convention
//! `H_z(u,u) = u† G(z) u`.

pub mod automorphisms;
pub mod compactness;
pub mod domains;
mod error;
pub mod linalg;
pub mod maps;
pub mod metrics;
pub mod sampling;
pub mod testfns;

pub use domains::{DomainDescriptor, Point, Tangent};
pub use error::{Error, Result};
pub use linalg::{kronecker, svd_normal_form, SvdNormalForm, C64};

/// Operations refuse points closer to the boundary than this: the metric
/// grows like the inverse square of the boundary distance, and doubles hold
/// the resulting 1e16 range inaccurately.
pub const MIN_BOUNDARY_DISTANCE: f64 = 1e-8;
