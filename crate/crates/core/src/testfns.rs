//! Extremal test functions on the type-I ball: direction classification at
//! diagonal base points, the per-case closed forms with analytic gradients,
//! and the reduction pipeline that handles arbitrary near-boundary points by
//! unitary rotation and diagonal collapse.
//!
//! At a base point `r E_11` a nonzero direction `w` splits the metric value
//! into three weighted pieces,
//!
//! ```text
//! A = |w_11|²/(1−r²)²,
//! B = (Σ_{l≥2} |w_1l|² + Σ_{k≥2} |w_k1|²)/(1−r²),
//! C = Σ_{k,l≥2} |w_kl|²,
//! ```
//!
//! so that `H_{rE11}(w,w) = (m+n)(A+B+C)`. The dominating piece selects one
//! of three holomorphic functions of `z_11` (log quotient, inverse-root
//! difference against the off-diagonal linear form, or the root-damped bulk
//! linear form), each bounded in Bloch seminorm uniformly in `r`, each
//! vanishing on compact subsets as `r → 1`, and each keeping the gradient
//! pairing with `w` bounded away from zero.
//!
//! Principal branches throughout: both `1 − z_11` and `1 − β z_11` have
//! positive real part on the domain, so log and square root are holomorphic.

use nalgebra::{DMatrix, DVector};

use crate::automorphisms::collapse_map;
use crate::domains::{DomainDescriptor, Point, Tangent};
use crate::error::{Error, Result};
use crate::linalg::{cr, svd_normal_form, C64};
use crate::maps::HoloMap;
use crate::metrics::{bergman_form, rayleigh_sup};
use crate::sampling::{boundary_scale_factor, gaussian_coords, stream_rng};

/// Which of the three closed forms a direction selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFnCase {
    /// `log(1 − β z_11) − log(1 − z_11)`: the (1,1) weight dominates.
    LogCase1,
    /// Off-diagonal linear form times an inverse-root difference.
    RootCase2,
    /// Bulk linear form times the root-damped difference.
    RootCase3,
}

/// The three metric weights of a direction at a diagonal base point,
/// together with the selected case (ties go to the smaller case index).
#[derive(Debug, Clone, Copy)]
pub struct DirectionSplit {
    pub case: TestFnCase,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Splits a direction at base point `r E_11` and selects the dominating
/// case.
pub fn classify_direction(r: f64, w: &Tangent) -> Result<DirectionSplit> {
    let (m, n) = type_i_shape(w.descriptor())?;
    if !(0.0 < r && r < 1.0) {
        return Err(Error::InvalidParameter("need 0 < r < 1".into()));
    }
    if w.coords().norm() == 0.0 {
        return Err(Error::InvalidParameter("direction must be nonzero".into()));
    }
    let wm = w.to_matrix()?;
    let denom = 1.0 - r * r;
    let a = wm[(0, 0)].norm_sqr() / (denom * denom);
    let mut b = 0.0;
    for l in 1..n {
        b += wm[(0, l)].norm_sqr();
    }
    for k in 1..m {
        b += wm[(k, 0)].norm_sqr();
    }
    b /= denom;
    let mut c = 0.0;
    for k in 1..m {
        for l in 1..n {
            c += wm[(k, l)].norm_sqr();
        }
    }
    let case = if a >= b && a >= c {
        TestFnCase::LogCase1
    } else if b >= c {
        TestFnCase::RootCase2
    } else {
        TestFnCase::RootCase3
    };
    Ok(DirectionSplit { case, a, b, c })
}

fn type_i_shape(d: &DomainDescriptor) -> Result<(usize, usize)> {
    match d {
        DomainDescriptor::TypeI { rows, cols } => Ok((*rows, *cols)),
        _ => Err(Error::InvalidParameter(
            "test functions are constructed on type I".into(),
        )),
    }
}

#[derive(Debug, Clone)]
struct Lift {
    domain: DomainDescriptor,
    factor: usize,
}

/// A bounded holomorphic function tuned to a near-boundary point and
/// direction, evaluated as `base ∘ pre_maps` (optionally through a product
/// factor projection).
#[derive(Debug, Clone)]
pub struct TestFunction {
    base_domain: DomainDescriptor,
    case: TestFnCase,
    r: f64,
    a_param: f64,
    beta: f64,
    coeffs: DVector<C64>,
    pre_maps: Vec<HoloMap>,
    lift: Option<Lift>,
}

impl TestFunction {
    pub fn case(&self) -> TestFnCase {
        self.case
    }

    /// The base-point radius `r` the function is tuned to.
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn a_param(&self) -> f64 {
        self.a_param
    }

    pub fn pre_maps(&self) -> &[HoloMap] {
        &self.pre_maps
    }

    /// The domain evaluation expects points from.
    pub fn domain(&self) -> &DomainDescriptor {
        if let Some(lift) = &self.lift {
            &lift.domain
        } else if let Some(first) = self.pre_maps.first() {
            first.source()
        } else {
            &self.base_domain
        }
    }

    /// Reinterprets the function on a product domain by composing with the
    /// coordinate projection onto `factor`.
    pub fn lift_to_product(mut self, product: DomainDescriptor, factor: usize) -> Result<Self> {
        if self.lift.is_some() {
            return Err(Error::InvalidParameter("function is already lifted".into()));
        }
        let factors: Vec<_> = product.factors().cloned().collect();
        if !matches!(product, DomainDescriptor::Product(_))
            || factor >= factors.len()
            || &factors[factor] != self.domain()
        {
            return Err(Error::TypeMismatch(
                "product factor does not match the function's domain".into(),
            ));
        }
        self.lift = Some(Lift {
            domain: product,
            factor,
        });
        Ok(self)
    }

    pub fn evaluate(&self, z: &Point) -> Result<C64> {
        let z = self.project(z)?;
        let mut cur = z;
        for map in &self.pre_maps {
            cur = map.evaluate(&cur)?;
        }
        Ok(self.base_value(cur.coords()))
    }

    /// Holomorphic gradient row in the intrinsic coordinates of
    /// [`domain`](Self::domain), by the chain rule through the pre-maps.
    pub fn gradient(&self, z: &Point) -> Result<DVector<C64>> {
        let inner = self.project(z)?;
        let mut stations = Vec::with_capacity(self.pre_maps.len());
        let mut cur = inner;
        for map in &self.pre_maps {
            stations.push(cur.clone());
            cur = map.evaluate(&cur)?;
        }
        let mut grad = self.base_gradient(cur.coords());
        for (map, at) in self.pre_maps.iter().zip(stations.iter()).rev() {
            grad = map.jacobian(at)?.transpose() * grad;
        }
        if let Some(lift) = &self.lift {
            let mut full = DVector::zeros(lift.domain.dimension());
            let (off, len) = lift.domain.factor_spans()[lift.factor];
            full.rows_mut(off, len).copy_from(&grad);
            return Ok(full);
        }
        Ok(grad)
    }

    fn project(&self, z: &Point) -> Result<Point> {
        if z.descriptor() != self.domain() {
            return Err(Error::TypeMismatch(
                "point does not live in the function's domain".into(),
            ));
        }
        match &self.lift {
            Some(lift) => z.factor(lift.factor),
            None => Ok(z.clone()),
        }
    }

    fn linear_form(&self, coords: &DVector<C64>) -> C64 {
        self.coeffs
            .iter()
            .zip(coords.iter())
            .map(|(c, z)| c * z)
            .sum()
    }

    fn base_value(&self, coords: &DVector<C64>) -> C64 {
        let one = cr(1.0);
        let zeta = coords[0];
        let beta = cr(self.beta);
        match self.case {
            TestFnCase::LogCase1 => (one - beta * zeta).ln() - (one - zeta).ln(),
            TestFnCase::RootCase2 => {
                let g = inv_sqrt(one - beta * zeta) - inv_sqrt(one - zeta);
                self.linear_form(coords) * g
            }
            TestFnCase::RootCase3 => {
                let h = (one - zeta).sqrt() * (inv_sqrt(one - beta * zeta) - inv_sqrt(one - zeta));
                self.linear_form(coords) * h
            }
        }
    }

    fn base_gradient(&self, coords: &DVector<C64>) -> DVector<C64> {
        let one = cr(1.0);
        let zeta = coords[0];
        let beta = cr(self.beta);
        let dim = coords.len();
        match self.case {
            TestFnCase::LogCase1 => {
                let mut grad = DVector::zeros(dim);
                grad[0] = one / (one - zeta) - beta / (one - beta * zeta);
                grad
            }
            TestFnCase::RootCase2 => {
                let g = inv_sqrt(one - beta * zeta) - inv_sqrt(one - zeta);
                let g_prime = beta * cr(0.5) * pow_neg_3_2(one - beta * zeta)
                    - cr(0.5) * pow_neg_3_2(one - zeta);
                let mut grad = &self.coeffs * g;
                grad[0] += self.linear_form(coords) * g_prime;
                grad
            }
            TestFnCase::RootCase3 => {
                let root = (one - zeta).sqrt();
                let diff = inv_sqrt(one - beta * zeta) - inv_sqrt(one - zeta);
                let h = root * diff;
                let diff_prime = beta * cr(0.5) * pow_neg_3_2(one - beta * zeta)
                    - cr(0.5) * pow_neg_3_2(one - zeta);
                let h_prime = -cr(0.5) * inv_sqrt(one - zeta) * diff + root * diff_prime;
                let mut grad = &self.coeffs * h;
                grad[0] += self.linear_form(coords) * h_prime;
                grad
            }
        }
    }

    /// Sampled sup of `|f|` over points whose coordinates stay at a scale
    /// fraction at most `rho` of the boundary; the sup over such a compact
    /// set must shrink as the family parameter `r` approaches one.
    pub fn decay_on_compact(&self, rho: f64, samples: usize, seed: u64) -> Result<f64> {
        if !(0.0 < rho && rho < 1.0) {
            return Err(Error::InvalidParameter("need 0 < rho < 1".into()));
        }
        let d = self.domain().clone();
        let mut sup: f64 = 0.0;
        for i in 0..samples {
            let mut rng = stream_rng(seed, i as u64);
            let raw = gaussian_coords(d.dimension(), &mut rng);
            let t_star = boundary_scale_factor(&d, &raw);
            let fill: f64 = rand::Rng::random_range(&mut rng, 0.0..1.0) * rho;
            let z = Point::from_vector(d.clone(), raw * cr(fill * t_star))?;
            sup = sup.max(self.evaluate(&z)?.norm());
        }
        Ok(sup)
    }
}

fn inv_sqrt(x: C64) -> C64 {
    cr(1.0) / x.sqrt()
}

fn pow_neg_3_2(x: C64) -> C64 {
    let s = x.sqrt();
    cr(1.0) / (s * s * s)
}

/// Builds the case function tuned to the diagonal base point `r E_11` and
/// the direction `w`. Zero components of `w` contribute zero coefficients,
/// nonzero ones the unit phase `e^{−i arg w_kl}`.
pub fn build_diagonal(r: f64, w: &Tangent, a_param: f64) -> Result<TestFunction> {
    if a_param <= 0.0 {
        return Err(Error::InvalidParameter("need a_param > 0".into()));
    }
    let split = classify_direction(r, w)?;
    let (m, n) = type_i_shape(w.descriptor())?;
    let wm = w.to_matrix()?;
    let mut coeffs = DMatrix::<C64>::zeros(m, n);
    match split.case {
        TestFnCase::LogCase1 => {}
        TestFnCase::RootCase2 => {
            for l in 1..n {
                coeffs[(0, l)] = unit_phase(wm[(0, l)]);
            }
            for k in 1..m {
                coeffs[(k, 0)] = unit_phase(wm[(k, 0)]);
            }
        }
        TestFnCase::RootCase3 => {
            for k in 1..m {
                for l in 1..n {
                    coeffs[(k, l)] = unit_phase(wm[(k, l)]);
                }
            }
        }
    }
    Ok(TestFunction {
        base_domain: w.descriptor().clone(),
        case: split.case,
        r,
        a_param,
        beta: (-a_param * (1.0 - r)).exp(),
        coeffs: w.descriptor().from_matrix(&coeffs)?,
        pre_maps: Vec::new(),
        lift: None,
    })
}

fn unit_phase(w: C64) -> C64 {
    let norm = w.norm();
    if norm == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        w.conj() / cr(norm)
    }
}

/// Builds a test function for an arbitrary near-boundary point: a unitary
/// rotation takes the point to its diagonal normal form, the collapse map
/// reduces the diagonal to its leading rank-one part, the direction is
/// pushed through the pre-map differentials, and the diagonal construction
/// finishes the job at `r = λ_1`. Both pre-maps are isometries, so the
/// quotient against `w` matches the diagonal case exactly.
pub fn build_general(a_point: &Point, w: &Tangent, a_param: f64) -> Result<TestFunction> {
    let d = a_point.descriptor().clone();
    type_i_shape(&d)?;
    if w.descriptor() != &d {
        return Err(Error::TypeMismatch(
            "direction domain differs from point domain".into(),
        ));
    }
    let distance = a_point.boundary_distance()?;
    if distance >= 0.5 {
        return Err(Error::InvalidParameter(format!(
            "intended for near-boundary points (distance {distance:.3})"
        )));
    }

    let am = a_point.to_matrix()?;
    let mut pre_maps: Vec<HoloMap> = Vec::new();
    let lambdas: Vec<f64> = if let Some(diag) = nonneg_descending_diagonal(&am) {
        diag
    } else {
        let svd = svd_normal_form(&am)?;
        pre_maps.push(HoloMap::unitary_pair(
            d.clone(),
            svd.u.adjoint(),
            svd.v.adjoint(),
        )?);
        svd.lambdas
    };
    let r = lambdas[0];
    if r >= 1.0 - 1e-8 {
        return Err(Error::TooCloseToBoundary { distance: 1.0 - r });
    }
    if lambdas.iter().skip(1).any(|&l| l > 0.0) {
        pre_maps.push(collapse_map(&d, &lambdas, 0)?);
    }

    // push the direction through the pre-map differentials
    let mut v = w.coords().clone();
    let mut at = a_point.clone();
    for map in &pre_maps {
        v = map.jacobian(&at)? * v;
        at = map.evaluate(&at)?;
    }
    let transformed = Tangent::from_vector(d.clone(), v)?;
    let mut f = build_diagonal(r, &transformed, a_param)?;
    f.pre_maps = pre_maps;
    Ok(f)
}

fn nonneg_descending_diagonal(a: &DMatrix<C64>) -> Option<Vec<f64>> {
    let (m, n) = a.shape();
    let mut diag = Vec::with_capacity(m);
    for i in 0..m {
        for j in 0..n {
            if i != j && a[(i, j)] != C64::new(0.0, 0.0) {
                return None;
            }
        }
        let d = a[(i, i)];
        if d.im != 0.0 || d.re < 0.0 {
            return None;
        }
        diag.push(d.re);
    }
    if diag.windows(2).any(|w| w[1] > w[0]) {
        return None;
    }
    Some(diag)
}

/// The Bloch quotient of `f` against direction `w` at `a_point`:
/// `|∇f(a)·w| / H_a(w,w)^{1/2}`.
pub fn ratio_at(f: &TestFunction, a_point: &Point, w: &Tangent) -> Result<f64> {
    if w.coords().norm() == 0.0 {
        return Err(Error::InvalidParameter("direction must be nonzero".into()));
    }
    let grad = f.gradient(a_point)?;
    let pairing: C64 = grad.iter().zip(w.coords().iter()).map(|(g, u)| g * u).sum();
    let form = bergman_form(a_point, w)?;
    Ok(pairing.norm() / form.sqrt())
}

/// Sampled Bloch seminorm estimate: the sup of `rayleigh_sup(z, ∇f)^{1/2}`
/// over random interior points and any extra points supplied.
pub fn seminorm_estimate(
    f: &TestFunction,
    samples: usize,
    seed: u64,
    extra: &[Point],
) -> Result<f64> {
    let d = f.domain().clone();
    let mut sup: f64 = 0.0;
    for i in 0..samples {
        let mut rng = stream_rng(seed, i as u64);
        let z = crate::sampling::random_interior(&d, &mut rng, 0.0, 0.98);
        sup = sup.max(rayleigh_sup(&z, &f.gradient(&z)?)?.sqrt());
    }
    for z in extra {
        sup = sup.max(rayleigh_sup(z, &f.gradient(z)?)?.sqrt());
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainDescriptor as D;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn e_kl(d: &D, k: usize, l: usize) -> Tangent {
        let n = match d {
            D::TypeI { cols, .. } => *cols,
            _ => unreachable!(),
        };
        let mut coords = DVector::zeros(d.dimension());
        coords[k * n + l] = c(1.0, 0.0);
        Tangent::from_vector(d.clone(), coords).unwrap()
    }

    #[test]
    fn classification_examples() {
        let d = D::type_i(2, 3).unwrap();
        let s = classify_direction(0.5, &e_kl(&d, 0, 0)).unwrap();
        assert_eq!(s.case, TestFnCase::LogCase1);
        assert_eq!(s.b, 0.0);
        assert_eq!(s.c, 0.0);

        let s = classify_direction(0.9, &e_kl(&d, 0, 1)).unwrap();
        assert_eq!(s.case, TestFnCase::RootCase2);
        assert_eq!(s.a, 0.0);
        assert_eq!(s.c, 0.0);
        assert!((s.b - 1.0 / (1.0 - 0.81)).abs() < 1e-12);

        let s = classify_direction(0.5, &e_kl(&d, 1, 1)).unwrap();
        assert_eq!(s.case, TestFnCase::RootCase3);
        assert_eq!(s.a, 0.0);
        assert_eq!(s.b, 0.0);
        assert_eq!(s.c, 1.0);

        let zero = Tangent::from_vector(d, DVector::zeros(6)).unwrap();
        assert!(classify_direction(0.5, &zero).is_err());
    }

    // the (1,1) derivative of the log case at the base point
    #[test]
    fn log_case_gradient_at_base_point() {
        let d = D::type_i(2, 2).unwrap();
        let r = 0.83;
        let a_param = 1.0;
        let f = build_diagonal(r, &e_kl(&d, 0, 0), a_param).unwrap();
        let beta = (-a_param * (1.0 - r)).exp();
        let mut coords = DVector::zeros(4);
        coords[0] = c(r, 0.0);
        let base = Point::from_vector(d, coords).unwrap();
        let grad = f.gradient(&base).unwrap();
        let want = 1.0 / (1.0 - r) - beta / (1.0 - beta * r);
        assert!((grad[0] - c(want, 0.0)).norm() < 1e-13);
        for k in 1..4 {
            assert_eq!(grad[k], c(0.0, 0.0));
        }
    }

    #[test]
    fn zero_components_drop_their_phase_terms() {
        let d = D::type_i(2, 3).unwrap();
        let mut coords = DVector::zeros(6);
        coords[1] = c(0.0, 2.0); // w_12 only
        let w = Tangent::from_vector(d.clone(), coords).unwrap();
        let f = build_diagonal(0.9, &w, 1.0).unwrap();
        assert_eq!(f.case(), TestFnCase::RootCase2);
        assert!((f.coeffs[1].norm() - 1.0).abs() < 1e-15);
        assert_eq!(f.coeffs[2], c(0.0, 0.0));
        assert_eq!(f.coeffs[5], c(0.0, 0.0));
    }

    // |f| at a fixed interior point shrinks as r -> 1 for the log case
    #[test]
    fn log_case_vanishes_pointwise() {
        let d = D::type_i(1, 1).unwrap();
        let z = Point::interior(d.clone(), vec![c(0.5, 0.0)]).unwrap();
        let w = Tangent::new(d, vec![c(1.0, 0.0)]).unwrap();
        let mut prev = f64::INFINITY;
        for r in [0.9, 0.99, 0.999, 0.9999] {
            let f = build_diagonal(r, &w, 1.0).unwrap();
            let val = f.evaluate(&z).unwrap().norm();
            let beta = (-(1.0 - r)).exp();
            let explicit = ((1.0 - beta * 0.5) / (1.0 - 0.5)).ln().abs();
            assert!((val - explicit).abs() < 1e-14);
            assert!(val < prev);
            prev = val;
        }
        assert!(prev < 2e-4);
    }

    #[test]
    fn ratio_rejects_zero_direction() {
        let d = D::type_i(2, 2).unwrap();
        let f = build_diagonal(0.9, &e_kl(&d, 0, 0), 1.0).unwrap();
        let zero = Tangent::from_vector(d.clone(), DVector::zeros(4)).unwrap();
        let base = Point::origin(d);
        assert!(ratio_at(&f, &base, &zero).is_err());
    }

    #[test]
    fn general_build_on_diagonal_point_is_the_diagonal_build() {
        let d = D::type_i(2, 2).unwrap();
        let r = 0.9;
        let mut coords = DVector::zeros(4);
        coords[0] = c(r, 0.0);
        let a_point = Point::from_vector(d.clone(), coords).unwrap();
        let w = e_kl(&d, 0, 1);
        let f = build_general(&a_point, &w, 1.0).unwrap();
        assert!(f.pre_maps.is_empty());
        let g = build_diagonal(r, &w, 1.0).unwrap();
        let ra = ratio_at(&f, &a_point, &w).unwrap();
        let rb = ratio_at(&g, &a_point, &w).unwrap();
        assert_eq!(ra, rb);
    }

    #[test]
    fn general_build_requires_near_boundary() {
        let d = D::type_i(2, 2).unwrap();
        let a_point = Point::origin(d.clone());
        assert!(build_general(&a_point, &e_kl(&d, 0, 0), 1.0).is_err());
    }

    #[test]
    fn lift_evaluates_through_the_factor() {
        let disc = D::type_i(1, 1).unwrap();
        let ball = D::type_iv(2).unwrap();
        let prod = D::product(vec![disc.clone(), ball]).unwrap();
        let w = Tangent::new(disc.clone(), vec![c(1.0, 0.0)]).unwrap();
        let f = build_diagonal(0.9, &w, 1.0).unwrap();
        let lifted = f.clone().lift_to_product(prod.clone(), 0).unwrap();
        let z = Point::interior(prod, vec![c(0.4, 0.1), c(0.1, 0.0), c(0.0, 0.2)]).unwrap();
        let inner = Point::interior(disc, vec![c(0.4, 0.1)]).unwrap();
        assert_eq!(lifted.evaluate(&z).unwrap(), f.evaluate(&inner).unwrap());
        let grad = lifted.gradient(&z).unwrap();
        assert_eq!(grad.len(), 3);
        assert_eq!(grad[1], c(0.0, 0.0));
        assert_eq!(grad[2], c(0.0, 0.0));
    }
}
