//! Shared oracles for the integration suites. Everything here recomputes
//! reference values from first principles, independent of the library's
//! own code paths.
#![allow(dead_code)] // each suite uses its own slice of the oracles

use bergman_core::{DomainDescriptor, Point, C64};
use nalgebra::{DMatrix, DVector};

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `-log` of the defining function whose complex Hessian yields the metric,
/// as a real function of the intrinsic coordinates.
fn neg_log_defining(d: &DomainDescriptor, coords: &DVector<C64>) -> f64 {
    match d {
        DomainDescriptor::TypeI { rows, .. } => {
            let z = d.to_matrix(coords).unwrap();
            let f = DMatrix::<C64>::identity(*rows, *rows) - &z * z.adjoint();
            let det = f.determinant();
            assert!(det.im.abs() < 1e-10 * (1.0 + det.re.abs()));
            -det.re.ln()
        }
        DomainDescriptor::TypeII { size } => {
            let z = d.to_matrix(coords).unwrap();
            let f = DMatrix::<C64>::identity(*size, *size) - &z * z.conjugate();
            let det = f.determinant();
            assert!(det.im.abs() < 1e-10 * (1.0 + det.re.abs()));
            -det.re.ln()
        }
        DomainDescriptor::TypeIII { size } => {
            let z = d.to_matrix(coords).unwrap();
            let f = DMatrix::<C64>::identity(*size, *size) + &z * z.conjugate();
            let det = f.determinant();
            assert!(det.im.abs() < 1e-10 * (1.0 + det.re.abs()));
            -det.re.ln()
        }
        DomainDescriptor::TypeIV { .. } => {
            let s: C64 = coords.iter().map(|z| z * z).sum();
            let n2: f64 = coords.iter().map(|z| z.norm_sqr()).sum();
            -(1.0 + s.norm_sqr() - 2.0 * n2).ln()
        }
        DomainDescriptor::Product(_) => panic!("factor-wise oracle only"),
    }
}

fn metric_constant(d: &DomainDescriptor) -> f64 {
    match d {
        DomainDescriptor::TypeI { rows, cols } => (rows + cols) as f64,
        DomainDescriptor::TypeII { size } => (size + 1) as f64,
        DomainDescriptor::TypeIII { size } => 2.0 * (size - 1) as f64,
        DomainDescriptor::TypeIV { dim } => *dim as f64,
        DomainDescriptor::Product(_) => panic!("factor-wise oracle only"),
    }
}

// Second central difference of g along the real directions a and b
// (4-point stencil off the diagonal, 3-point on it).
fn mixed_second(
    g: &dyn Fn(&DVector<f64>) -> f64,
    x: &DVector<f64>,
    a: usize,
    b: usize,
    h: f64,
) -> f64 {
    if a == b {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[a] += h;
        xm[a] -= h;
        (g(&xp) - 2.0 * g(x) + g(&xm)) / (h * h)
    } else {
        let eval = |da: f64, db: f64| {
            let mut y = x.clone();
            y[a] += da;
            y[b] += db;
            g(&y)
        };
        (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4.0 * h * h)
    }
}

/// Finite-difference Gram matrix of the Bergman metric: the Wirtinger
/// Hessian `∂² (−c·log F) / ∂z_l ∂z̄_k` of the scaled defining function,
/// arranged in the column convention `G[k,l]`.
pub fn fd_metric_gram(z: &Point, h: f64) -> DMatrix<C64> {
    let d = z.descriptor().clone();
    let n = d.dimension();
    let constant = metric_constant(&d);
    let to_real = |coords: &DVector<C64>| -> DVector<f64> {
        DVector::from_fn(2 * n, |i, _| {
            if i < n {
                coords[i].re
            } else {
                coords[i - n].im
            }
        })
    };
    let g = move |x: &DVector<f64>| -> f64 {
        let coords = DVector::from_fn(n, |i, _| C64::new(x[i], x[i + n]));
        neg_log_defining(&d, &coords)
    };
    let x0 = to_real(z.coords());

    let mut gram = DMatrix::<C64>::zeros(n, n);
    for l in 0..n {
        for k in 0..n {
            let dxx = mixed_second(&g, &x0, l, k, h);
            let dyy = mixed_second(&g, &x0, n + l, n + k, h);
            let dxy = mixed_second(&g, &x0, l, n + k, h);
            let dyx = mixed_second(&g, &x0, n + l, k, h);
            let wirt = C64::new(dxx + dyy, dxy - dyx) * cr(0.25);
            gram[(k, l)] = wirt * cr(constant);
        }
    }
    gram
}

/// Relative Frobenius distance.
pub fn rel_fro(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}
