//! Jacobian validation for the whole map registry: analytic versus central
//! differences, holomorphy of the difference quotients, the chain rule, the
//! self-map contract, and the empirical metric-contraction bound.

mod common;

use bergman_core::domains::DomainDescriptor;
use bergman_core::maps::HoloMap;
use bergman_core::metrics::bergman_form;
use bergman_core::sampling::{random_interior, random_tangent, stream_rng};
use bergman_core::{Point, Tangent, C64};
use common::cr;
use nalgebra::DMatrix;
use rand::Rng;

fn random_unitary(n: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    DMatrix::<C64>::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
    .qr()
    .q()
}

fn registry(rng: &mut impl Rng) -> Vec<HoloMap> {
    let i23 = DomainDescriptor::type_i(2, 3).unwrap();
    let i22 = DomainDescriptor::type_i(2, 2).unwrap();
    let disc = DomainDescriptor::type_i(1, 1).unwrap();
    let sym = DomainDescriptor::type_ii(2).unwrap();
    let ball = DomainDescriptor::type_iv(3).unwrap();

    let mobius_23 = HoloMap::mobius(&random_interior(&i23, rng, 0.2, 0.6)).unwrap();
    let mobius_22 = HoloMap::mobius(&random_interior(&i22, rng, 0.2, 0.6)).unwrap();
    let unitary =
        HoloMap::unitary_pair(i23.clone(), random_unitary(2, rng), random_unitary(3, rng)).unwrap();
    let product = HoloMap::product(vec![
        HoloMap::scale(disc.clone(), 0.7).unwrap(),
        mobius_22.clone(),
    ])
    .unwrap();
    let compose = HoloMap::compose(vec![
        unitary.clone(),
        mobius_23.clone(),
        HoloMap::scale(i23.clone(), 0.9).unwrap(),
    ])
    .unwrap();
    let embed_target = DomainDescriptor::product(vec![disc.clone(), ball.clone()]).unwrap();
    let embed = HoloMap::factor_embed(
        embed_target,
        0,
        HoloMap::disc_affine(C64::new(0.2, 0.1), C64::new(0.5, 0.0)).unwrap(),
    )
    .unwrap();

    vec![
        HoloMap::identity(i23.clone()),
        HoloMap::identity(ball.clone()),
        HoloMap::constant(random_interior(&i22, rng, 0.1, 0.5)).unwrap(),
        HoloMap::scale(sym, 0.5).unwrap(),
        HoloMap::scale(ball, 0.95).unwrap(),
        HoloMap::disc_affine(cr(0.5), cr(0.5)).unwrap(),
        HoloMap::disc_affine(C64::new(0.0, 0.3), C64::new(0.6, 0.1)).unwrap(),
        unitary,
        mobius_23,
        HoloMap::mobius(&random_interior(&disc, rng, 0.2, 0.6)).unwrap(),
        product,
        compose,
        embed,
    ]
}

#[test]
fn analytic_jacobian_matches_finite_differences() {
    let mut rng = stream_rng(51, 0);
    for map in registry(&mut rng) {
        let mut worst_fd: f64 = 0.0;
        let mut worst_cr: f64 = 0.0;
        for _ in 0..100 {
            let z = random_interior(map.source(), &mut rng, 0.05, 0.8);
            let analytic = map.jacobian(&z).unwrap();
            let fd = map.jacobian_fd(&z, 1e-5).unwrap();
            worst_fd = worst_fd.max((&fd.matrix - &analytic).norm() / (1.0 + analytic.norm()));
            worst_cr = worst_cr.max(fd.cauchy_riemann_residual);
        }
        assert!(
            worst_fd < 1e-6,
            "{}: fd disagreement {worst_fd:.3e}",
            map.family_name()
        );
        assert!(
            worst_cr < 1e-6,
            "{}: Cauchy-Riemann residual {worst_cr:.3e}",
            map.family_name()
        );
    }
}

#[test]
fn chain_rule() {
    let mut rng = stream_rng(52, 0);
    let i23 = DomainDescriptor::type_i(2, 3).unwrap();
    for _ in 0..20 {
        let g = HoloMap::mobius(&random_interior(&i23, &mut rng, 0.1, 0.6)).unwrap();
        let f = HoloMap::mobius(&random_interior(&i23, &mut rng, 0.1, 0.6)).unwrap();
        let fg = HoloMap::compose(vec![g.clone(), f.clone()]).unwrap();
        let z = random_interior(&i23, &mut rng, 0.05, 0.85);
        let lhs = fg.jacobian(&z).unwrap();
        let rhs = f.jacobian(&g.evaluate(&z).unwrap()).unwrap() * g.jacobian(&z).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }
}

#[test]
fn self_map_contract_on_samples() {
    let mut rng = stream_rng(53, 0);
    for map in registry(&mut rng) {
        if !map.is_self_map() {
            continue;
        }
        for _ in 0..1000 {
            let z = random_interior(map.source(), &mut rng, 0.02, 0.98);
            let out = map.evaluate(&z).unwrap();
            assert!(
                out.is_interior().unwrap(),
                "{} left the domain",
                map.family_name()
            );
        }
    }
}

fn distortion(map: &HoloMap, z: &Point, u: &Tangent) -> f64 {
    let num_v = map.jacobian(z).unwrap() * u.coords();
    let image = map.evaluate(z).unwrap();
    let pushed = Tangent::from_vector(image.descriptor().clone(), num_v).unwrap();
    let num = bergman_form(&image, &pushed).unwrap();
    let den = bergman_form(z, u).unwrap();
    num / den
}

// Every registered self-map contracts the metric up to a finite constant;
// automorphisms achieve exactly one. The sampled maximum must not keep
// growing when the sample count is multiplied by ten.
#[test]
fn metric_contraction_is_bounded_per_family() {
    let mut rng = stream_rng(54, 0);
    for map in registry(&mut rng) {
        if !map.is_self_map() {
            continue;
        }
        let mut max_small: f64 = 0.0;
        let mut max_large: f64 = 0.0;
        for i in 0..10_000 {
            let z = random_interior(map.source(), &mut rng, 0.02, 0.95);
            if map.evaluate(&z).unwrap().boundary_distance().unwrap() < 1e-7 {
                continue;
            }
            let u = random_tangent(map.source(), &mut rng);
            let ratio = distortion(&map, &z, &u);
            assert!(ratio.is_finite());
            if i < 1000 {
                max_small = max_small.max(ratio);
            }
            max_large = max_large.max(ratio);
        }
        assert!(
            max_large <= max_small * 1.05 + 1e-12,
            "{}: sampled max grew from {max_small} to {max_large}",
            map.family_name()
        );
        match map.family_name() {
            "identity" | "mobius" | "unitary_pair" => {
                assert!(
                    max_large <= 1.0 + 1e-8,
                    "{}: automorphism ratio {max_large}",
                    map.family_name()
                );
            }
            _ => {}
        }
    }
}
