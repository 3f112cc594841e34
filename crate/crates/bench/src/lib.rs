//! Shared fixtures for the criterion benchmarks.

use bergman_core::domains::{DomainDescriptor, Point, Tangent};
use bergman_core::maps::HoloMap;
use bergman_core::sampling::{random_interior, random_tangent, stream_rng};

pub struct Fixture {
    pub domain: DomainDescriptor,
    pub point: Point,
    pub tangent: Tangent,
    pub mobius: HoloMap,
}

/// Deterministic mid-domain fixture on `R_I(2,3)`.
pub fn type_i_fixture() -> Fixture {
    let domain = DomainDescriptor::type_i(2, 3).expect("valid descriptor");
    let mut rng = stream_rng(0xbe9c, 0);
    let point = random_interior(&domain, &mut rng, 0.3, 0.6);
    let tangent = random_tangent(&domain, &mut rng);
    let base = random_interior(&domain, &mut rng, 0.2, 0.5);
    let mobius = HoloMap::mobius(&base).expect("interior base point");
    Fixture {
        domain,
        point,
        tangent,
        mobius,
    }
}

/// A near-boundary point exercising the ill-conditioned regime.
pub fn near_boundary_point(fixture: &Fixture, delta: f64) -> Point {
    let scale =
        bergman_core::sampling::boundary_scale_factor(&fixture.domain, fixture.point.coords());
    let coords = fixture.point.coords() * bergman_core::C64::new((1.0 - delta) * scale, 0.0);
    Point::from_vector(fixture.domain.clone(), coords).expect("length preserved")
}
