//! The Möbius automorphism identity battery behind `check-identities`:
//! involution, origin exchange, agreement of the two closed forms, the
//! conjugation identity, and the differential's special values, each
//! reported as a max residual over sampled automorphisms.

use bergman_core::automorphisms::mobius_factors;
use bergman_core::domains::DomainDescriptor;
use bergman_core::sampling::{gaussian_coords, random_interior, stream_rng};
use bergman_core::{Result, C64};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl IdentityResidual {
    pub fn pass(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

pub fn battery_passes(residuals: &[IdentityResidual]) -> bool {
    residuals.iter().all(IdentityResidual::pass)
}

pub fn run_battery(
    domain: &DomainDescriptor,
    samples: usize,
    seed: u64,
) -> Result<Vec<IdentityResidual>> {
    let (m, n) = match domain {
        DomainDescriptor::TypeI { rows, cols } => (*rows, *cols),
        _ => {
            return Err(bergman_core::Error::InvalidParameter(
                "the identity battery runs on type I".into(),
            ))
        }
    };
    let mut involution: f64 = 0.0;
    let mut exchange: f64 = 0.0;
    let mut dual_form: f64 = 0.0;
    let mut conjugation: f64 = 0.0;
    let mut differential: f64 = 0.0;

    for i in 0..samples {
        let mut rng = stream_rng(seed, i as u64);
        let p = random_interior(domain, &mut rng, 0.05, 0.85);
        let z = random_interior(domain, &mut rng, 0.05, 0.9);
        let f = mobius_factors(&p)?;
        let pm = p.to_matrix()?;
        let zm = z.to_matrix()?;

        let phi_z = f.apply_matrix(&zm)?;
        involution = involution.max((f.apply_matrix(&phi_z)? - &zm).norm());

        exchange = exchange.max(f.apply_matrix(&pm)?.norm());
        exchange = exchange.max((f.apply_matrix(&DMatrix::zeros(m, n))? - &pm).norm());

        dual_form = dual_form.max((f.apply_matrix_dual(&zm)? - &phi_z).norm());

        let id = DMatrix::<C64>::identity(m, m);
        let lhs = (&id - &zm * pm.adjoint())
            * f.q()
            * (&id - &phi_z * phi_z.adjoint())
            * f.q().adjoint()
            * (&id - &pm * zm.adjoint());
        let rhs = &id - &zm * zm.adjoint();
        conjugation = conjugation.max((lhs - rhs).norm());

        let j_at_p = f.jacobian_matrix(&pm)?;
        let j_at_zero = f.jacobian_matrix(&DMatrix::zeros(m, n))?;
        let q_inv = f
            .q()
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| bergman_core::Error::Conditioning("Q singular".into()))?;
        let r_inv = f
            .r()
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| bergman_core::Error::Conditioning("R singular".into()))?;
        let w_coords = gaussian_coords(m * n, &mut rng);
        let w = DMatrix::<C64>::from_fn(m, n, |i, j| w_coords[i * n + j]);
        let w_vec = DVector::from_iterator(m * n, w.transpose().iter().copied());
        let want_p = -(f.q() * &w * f.r());
        let want_p = DVector::from_iterator(m * n, want_p.transpose().iter().copied());
        differential = differential.max((&j_at_p * &w_vec - want_p).norm());
        let want_0 = -(&q_inv * &w * &r_inv);
        let want_0 = DVector::from_iterator(m * n, want_0.transpose().iter().copied());
        differential = differential.max((&j_at_zero * &w_vec - want_0).norm());
    }

    Ok(vec![
        IdentityResidual {
            name: "involution",
            max_residual: involution,
            tolerance: 1e-9,
        },
        IdentityResidual {
            name: "exchange",
            max_residual: exchange,
            tolerance: 1e-9,
        },
        IdentityResidual {
            name: "dual_form",
            max_residual: dual_form,
            tolerance: 1e-9,
        },
        IdentityResidual {
            name: "conjugation",
            max_residual: conjugation,
            tolerance: 1e-9,
        },
        IdentityResidual {
            name: "differential_special_values",
            max_residual: differential,
            tolerance: 1e-10,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(values: [f64; 2]) -> Vec<IdentityResidual> {
        vec![
            IdentityResidual {
                name: "a",
                max_residual: values[0],
                tolerance: 1e-9,
            },
            IdentityResidual {
                name: "b",
                max_residual: values[1],
                tolerance: 1e-10,
            },
        ]
    }

    // rule firing on injected residuals
    #[test]
    fn verdict_rule() {
        assert!(battery_passes(&synthetic([1e-12, 1e-12])));
        assert!(!battery_passes(&synthetic([1e-6, 1e-12])));
        assert!(!battery_passes(&synthetic([1e-12, 5e-10])));
    }

    #[test]
    fn real_battery_is_clean() {
        let d = DomainDescriptor::type_i(2, 3).unwrap();
        let residuals = run_battery(&d, 25, 7).unwrap();
        assert_eq!(residuals.len(), 5);
        assert!(battery_passes(&residuals), "{residuals:?}");
    }
}
