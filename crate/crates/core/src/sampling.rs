//! Deterministic random sampling of interior points and tangent directions.
//!
//! Every sampled quantity in the crate is derived from a `(seed, index)`
//! pair, so parallel reductions stay reproducible regardless of worker
//! count: the stream for a given index never depends on who computed the
//! other indices.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::domains::{lie_ball_invariants, DomainDescriptor, Point, Tangent};
use crate::linalg::{self, cr, C64};

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The RNG for sample `index` of the stream identified by `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut state = seed;
    let a = splitmix64(&mut state);
    state ^= index.wrapping_mul(0xD129_0F15_85A2_21BD) ^ 0xA5A5_A5A5_A5A5_A5A5;
    let b = splitmix64(&mut state);
    ChaCha8Rng::seed_from_u64(a ^ b.rotate_left(17) ^ index)
}

/// Standard complex Gaussian coordinates of the intrinsic dimension.
pub fn gaussian_coords(dim: usize, rng: &mut impl Rng) -> DVector<C64> {
    DVector::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// The supremum of `t ≥ 0` with `t·coords` interior; the domains are
/// complete circular, so membership along the ray is an interval.
pub fn boundary_scale_factor(d: &DomainDescriptor, coords: &DVector<C64>) -> f64 {
    match d {
        DomainDescriptor::TypeI { .. }
        | DomainDescriptor::TypeII { .. }
        | DomainDescriptor::TypeIII { .. } => {
            let z = d.to_matrix(coords).expect("matrix kinds");
            let sigma = linalg::largest_singular_value(&z);
            if sigma == 0.0 {
                f64::INFINITY
            } else {
                1.0 / sigma
            }
        }
        DomainDescriptor::TypeIV { .. } => {
            let (s_abs, _) = lie_ball_invariants(coords);
            let n2: f64 = coords.iter().map(|z| z.norm_sqr()).sum();
            if n2 == 0.0 {
                f64::INFINITY
            } else if s_abs < 1e-14 * n2 {
                (1.0 / (2.0 * n2)).sqrt()
            } else {
                // Cauchy-Schwarz gives |zz'| <= z z̄', so the discriminant
                // is nonnegative and the defining quadratic has the first
                // root no later than |zz'| reaching 1.
                let disc = (n2 * n2 - s_abs * s_abs).max(0.0);
                let x = (n2 - disc.sqrt()) / (s_abs * s_abs);
                x.sqrt()
            }
        }
        DomainDescriptor::Product(_) => d
            .factors()
            .zip(d.factor_spans())
            .map(|(f, (off, len))| boundary_scale_factor(f, &DVector::from(coords.rows(off, len))))
            .fold(f64::INFINITY, f64::min),
    }
}

/// A random interior point at a uniformly drawn fraction of the boundary
/// scale, `fill ∈ [min_fill, max_fill)` with `max_fill < 1`.
pub fn random_interior(
    d: &DomainDescriptor,
    rng: &mut impl Rng,
    min_fill: f64,
    max_fill: f64,
) -> Point {
    assert!(0.0 <= min_fill && min_fill < max_fill && max_fill < 1.0);
    let raw = gaussian_coords(d.dimension(), rng);
    let t_star = boundary_scale_factor(d, &raw);
    let fill = rng.random_range(min_fill..max_fill);
    Point::from_vector(d.clone(), raw * cr(fill * t_star)).expect("length preserved")
}

/// A random tangent with standard complex Gaussian coordinates.
pub fn random_tangent(d: &DomainDescriptor, rng: &mut impl Rng) -> Tangent {
    Tangent::from_vector(d.clone(), gaussian_coords(d.dimension(), rng)).expect("length matches")
}
