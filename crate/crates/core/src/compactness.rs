//! Sampled compactness diagnostic for composition operators on the Bloch
//! space: the distortion ratio
//!
//! ```text
//! sup_u H_{φ(z)}(Jφ(z)u, Jφ(z)u) / H_z(u,u)
//! ```
//!
//! as the largest eigenvalue of a Hermitian-definite pair, boundary-approach
//! sampling over a log grid of image boundary distances, decade-based
//! verdict rules, and a probe that composes extremal test functions with the
//! map and watches their Bloch seminorms.
//!
//! A verdict is evidence at the sampled scale, never a proof: the underlying
//! criterion quantifies over every ε and δ, which no finite sample certifies.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::domains::{DomainDescriptor, Point, Tangent};
use crate::error::{Error, Result};
use crate::linalg::{cr, C64};
use crate::maps::HoloMap;
use crate::metrics::{bergman_form, rayleigh_sup, whitened_factor};
use crate::sampling::{boundary_scale_factor, gaussian_coords, random_interior, stream_rng};
use crate::testfns::{build_general, TestFunction};

/// Verdict of a sampled profile. The two evidence verdicts describe the
/// behaviour of ratios as the image approaches the boundary; maps whose
/// image never gets near the boundary are flagged separately because the
/// criterion is vacuous for them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    EvidenceCompact,
    EvidenceNonCompact,
    ImageBoundedAway,
    Inconclusive,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::EvidenceCompact => "EvidenceCompact",
            Verdict::EvidenceNonCompact => "EvidenceNonCompact",
            Verdict::ImageBoundedAway => "ImageBoundedAway",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (evidence at sampled scale)", self.label())
    }
}

/// One profiled point: where the map was probed, how close its image sits
/// to the boundary, and the worst-direction distortion ratio there.
#[derive(Debug, Clone)]
pub struct RatioSample {
    pub index: u64,
    pub z: Point,
    pub delta: f64,
    pub ratio: f64,
    pub direction: Tangent,
}

/// A profile of distortion ratios sorted by image boundary distance
/// (descending), with the decade-rule verdict attached.
#[derive(Debug, Clone)]
pub struct RatioProfile {
    pub map: HoloMap,
    pub samples: Vec<RatioSample>,
    pub verdict: Verdict,
}

/// Sampling strategy for [`ratio_profile`].
#[derive(Debug, Clone)]
pub struct SamplerSpec {
    /// Image boundary distances are targeted on the log grid
    /// `10^{-1} … 10^{-min_delta_exponent}`.
    pub min_delta_exponent: u32,
    /// Independent boundary-approach rays.
    pub rays: usize,
    /// Additional uniform interior samples.
    pub random_samples: usize,
    /// Thresholds the compact-evidence rule is tested against.
    pub epsilons: Vec<f64>,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec {
            min_delta_exponent: 6,
            rays: 8,
            random_samples: 48,
            epsilons: vec![1e-1, 1e-2],
        }
    }
}

// Sources and images closer to the boundary than this are discarded by the
// samplers; the metric modules refuse at 1e-8 and the sweep floor is 1e-6.
const SAMPLER_FLOOR: f64 = 1e-7;

/// The supremum of the distortion quotient over nonzero directions,
/// computed exactly as the largest eigenvalue of the Hermitian-definite
/// pair `(Jφ† G(φ(z)) Jφ, G(z))`, together with the direction achieving it.
///
/// The pair is reduced through the whitened Jacobian `K = S_t† · Jφ · S_s^{-†}`
/// built from square factors `G = S S†` of the two metrics; the ratio is
/// `σ_max(K)²`. The `1/δ²`-sized pullback `Jφ† G(φ(z)) Jφ` is never formed
/// and the type-I factors come from the Kronecker structure of the metric,
/// so the rounding error of near-boundary ratios scales with the square
/// root of the defining factors' condition number rather than with the
/// metric's.
pub fn distortion_ratio(map: &HoloMap, z: &Point) -> Result<(f64, Tangent)> {
    let image = map.evaluate(z)?;
    let source = whitened_factor(z)?;
    let target = whitened_factor(&image)?;
    let j = map.jacobian(z)?;

    let k = target.s.adjoint() * j * &source.s_inv_adjoint;
    let svd = k.svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let mut best = 0usize;
    for i in 1..svd.singular_values.len() {
        if svd.singular_values[i] > svd.singular_values[best] {
            best = i;
        }
    }
    let sigma = svd.singular_values[best];
    let v = v_t.row(best).adjoint();
    let mut direction = &source.s_inv_adjoint * v;
    let norm = direction.norm();
    if norm > 0.0 {
        direction /= cr(norm);
    }
    Ok((
        sigma * sigma,
        Tangent::from_vector(z.descriptor().clone(), direction)?,
    ))
}

// The image of a map may approach the boundary only along special source
// directions (an affine disc map touches the boundary at a single point).
// Starting from the best of a batch of random directions, a shrinking
// Gaussian perturbation search minimizes the image measure at a deep probe
// radius; the search is deterministic given the rng stream.
fn refine_direction(
    source: &DomainDescriptor,
    delta_of: &dyn Fn(&Point) -> Result<f64>,
    stop_below: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Option<DVector<C64>>> {
    const DEEP: f64 = 1.0 - 1e-7;
    let dim = source.dimension();
    let deep_point = |dir: &DVector<C64>| -> Result<Option<(f64, DVector<C64>)>> {
        let t_star = boundary_scale_factor(source, dir);
        if !t_star.is_finite() {
            return Ok(None);
        }
        let z = Point::from_vector(source.clone(), dir * cr(DEEP * t_star))?;
        Ok(Some((delta_of(&z)?, dir.clone())))
    };

    let mut best: Option<(f64, DVector<C64>)> = None;
    for _ in 0..8 {
        if let Some((delta, dir)) = deep_point(&gaussian_coords(dim, rng))? {
            if best.as_ref().is_none_or(|(b, _)| delta < *b) {
                best = Some((delta, dir));
            }
        }
    }
    let Some((mut best_delta, mut best_dir)) = best else {
        return Ok(None);
    };
    let mut amplitude = 0.5;
    for _ in 0..70 {
        if best_delta < stop_below {
            break;
        }
        let mut improved = false;
        for _ in 0..4 {
            let cand_dir = &best_dir + gaussian_coords(dim, rng) * cr(amplitude);
            if let Some((delta, dir)) = deep_point(&cand_dir)? {
                if delta < best_delta {
                    best_delta = delta;
                    best_dir = dir;
                    improved = true;
                }
            }
        }
        if !improved {
            amplitude *= 0.5;
            if amplitude < 1e-14 {
                break;
            }
        }
    }
    Ok(Some(best_dir))
}

// Bisects the ray `s ↦ s·t*·dir` for a point whose image measure `delta_of`
// hits `target` within a factor of two. The measure need not be monotone;
// any adjacent coarse-grid bracket is refined.
fn ray_bisect(
    source: &DomainDescriptor,
    dir: &DVector<C64>,
    delta_of: &dyn Fn(&Point) -> Result<f64>,
    target: f64,
) -> Result<Option<Point>> {
    let t_star = boundary_scale_factor(source, dir);
    if !t_star.is_finite() {
        return Ok(None);
    }
    let point_at =
        |s: f64| -> Result<Point> { Point::from_vector(source.clone(), dir * cr(s * t_star)) };
    let mut grid: Vec<(f64, f64)> = Vec::new();
    for j in 0..=28 {
        let s = 1.0 - 10f64.powf(-(j as f64) / 4.0);
        if 1.0 - s < SAMPLER_FLOOR {
            break;
        }
        let g = delta_of(&point_at(s)?)?;
        grid.push((s, g));
    }
    let mut bracket = None;
    for pair in grid.windows(2) {
        let (s0, g0) = pair[0];
        let (s1, g1) = pair[1];
        if (g0 - target) * (g1 - target) <= 0.0 {
            bracket = Some((s0, g0, s1, g1));
            break;
        }
    }
    let Some((mut s_lo, mut g_lo, mut s_hi, _)) = bracket else {
        return Ok(None);
    };
    for _ in 0..80 {
        let mid = 0.5 * (s_lo + s_hi);
        let g_mid = delta_of(&point_at(mid)?)?;
        if (g_lo - target) * (g_mid - target) <= 0.0 {
            s_hi = mid;
        } else {
            s_lo = mid;
            g_lo = g_mid;
        }
    }
    let s = 0.5 * (s_lo + s_hi);
    let z = point_at(s)?;
    let achieved = delta_of(&z)?;
    if achieved >= target / 2.0 && achieved <= target * 2.0 && achieved > SAMPLER_FLOOR {
        Ok(Some(z))
    } else {
        Ok(None)
    }
}

fn image_boundary_distance(map: &HoloMap, z: &Point) -> Result<f64> {
    map.evaluate(z)?.boundary_distance()
}

fn sample_at(map: &HoloMap, z: Point, index: u64) -> Result<Option<RatioSample>> {
    if z.boundary_distance()? < SAMPLER_FLOOR {
        return Ok(None);
    }
    let delta = image_boundary_distance(map, &z)?;
    if delta <= SAMPLER_FLOOR {
        return Ok(None);
    }
    let (ratio, direction) = distortion_ratio(map, &z)?;
    Ok(Some(RatioSample {
        index,
        z,
        delta,
        ratio,
        direction,
    }))
}

/// Profiles a self-map: boundary-approach rays (their directions refined
/// toward the image boundary, then bisected onto each target decade of
/// image boundary distance) plus uniform interior samples. Deterministic
/// for a fixed seed regardless of how many workers run the sampling loop;
/// the reduction is an ordered merge keyed by task index.
pub fn ratio_profile(map: &HoloMap, spec: &SamplerSpec, seed: u64) -> Result<RatioProfile> {
    if !map.is_self_map() {
        return Err(Error::TypeMismatch("profiles need a self-map".into()));
    }
    let source = map.source().clone();
    let floor = 10f64.powi(-(spec.min_delta_exponent as i32));
    let targets: Vec<f64> = (1..=spec.min_delta_exponent)
        .map(|exp| 10f64.powi(-(exp as i32)))
        .collect();

    // one task per ray (refine once, bisect each target), one per draw
    let ray_results: Vec<Vec<Option<RatioSample>>> = (0..spec.rays as u64)
        .into_par_iter()
        .map(|ray| -> Result<Vec<Option<RatioSample>>> {
            let mut rng = stream_rng(seed, 1 + ray);
            let delta_of = |z: &Point| image_boundary_distance(map, z);
            let Some(dir) = refine_direction(&source, &delta_of, floor / 3.0, &mut rng)? else {
                return Ok(Vec::new());
            };
            let mut out = Vec::with_capacity(targets.len());
            for (t_idx, &target) in targets.iter().enumerate() {
                let index = ray * targets.len() as u64 + t_idx as u64;
                match ray_bisect(&source, &dir, &delta_of, target)? {
                    Some(z) => out.push(sample_at(map, z, index)?),
                    None => out.push(None),
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let random_base = spec.rays as u64 * targets.len() as u64;
    let random_results: Vec<Option<RatioSample>> = (0..spec.random_samples as u64)
        .into_par_iter()
        .map(|draw| -> Result<Option<RatioSample>> {
            let mut rng = stream_rng(seed, 1_000_003 + draw);
            let z = random_interior(&source, &mut rng, 0.05, 0.95);
            sample_at(map, z, random_base + draw)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut samples: Vec<RatioSample> = ray_results
        .into_iter()
        .flatten()
        .chain(random_results)
        .flatten()
        .collect();
    samples.sort_by(|a, b| {
        b.delta
            .partial_cmp(&a.delta)
            .expect("finite deltas")
            .then(a.index.cmp(&b.index))
    });
    let verdict = compactness_verdict(&samples, &spec.epsilons);
    Ok(RatioProfile {
        map: map.clone(),
        samples,
        verdict,
    })
}

/// Decade-based verdict rules over a sampled profile:
///
/// * no sample with image boundary distance below `10⁻²`: the image stays
///   away from the boundary and the criterion is vacuous
///   ([`Verdict::ImageBoundedAway`]);
/// * per-decade maxima non-increasing toward the boundary and below every
///   requested ε over the two finest decades: [`Verdict::EvidenceCompact`];
/// * the finest decade still carries at least half the overall maximum and
///   at least `10⁻²`: [`Verdict::EvidenceNonCompact`];
/// * anything else: [`Verdict::Inconclusive`].
pub fn compactness_verdict(samples: &[RatioSample], epsilons: &[f64]) -> Verdict {
    if !samples.iter().any(|s| s.delta < 1e-2) {
        return Verdict::ImageBoundedAway;
    }
    let mut decade_max: std::collections::BTreeMap<i32, f64> = std::collections::BTreeMap::new();
    for s in samples {
        let decade = s.delta.log10().floor() as i32;
        let entry = decade_max.entry(decade).or_insert(0.0);
        *entry = entry.max(s.ratio);
    }
    // descending boundary distance = descending decade key
    let maxima: Vec<f64> = decade_max.values().rev().copied().collect();
    let overall = maxima.iter().cloned().fold(0.0, f64::max);
    let finest = *maxima.last().expect("nonempty");

    let min_eps = epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
    let decreasing = maxima.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let fine_two = maxima.iter().rev().take(2).cloned().fold(0.0, f64::max);
    if maxima.len() >= 2 && decreasing && fine_two < min_eps {
        return Verdict::EvidenceCompact;
    }
    if finest >= 0.5 * overall && finest >= 1e-2 {
        return Verdict::EvidenceNonCompact;
    }
    Verdict::Inconclusive
}

/// One step of the vanishing-seminorm probe.
#[derive(Debug, Clone)]
pub struct ProbePoint {
    /// Family parameter: the image point sits at boundary distance ≈ 1−r.
    pub r: f64,
    /// Image boundary distance actually achieved.
    pub delta: f64,
    /// Sampled Bloch seminorm estimate of `f ∘ φ`.
    pub seminorm: f64,
}

/// For each `r` in the grid, drives the image of the map to boundary
/// distance `1 − r`, builds the extremal test function at the image point
/// against the worst distortion direction, and estimates the Bloch seminorm
/// of `f ∘ φ` by sampling (always including the driving point itself).
/// Returns an empty list when no boundary-approaching points exist.
pub fn sequence_probe(
    map: &HoloMap,
    a_param: f64,
    r_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<ProbePoint>> {
    if !map.is_self_map() {
        return Err(Error::TypeMismatch("the probe needs a self-map".into()));
    }
    let target = map.target().clone();
    let type_i_factors: Vec<usize> = target
        .factors()
        .enumerate()
        .filter(|(_, f)| matches!(f, DomainDescriptor::TypeI { .. }))
        .map(|(i, _)| i)
        .collect();
    if type_i_factors.is_empty() {
        return Err(Error::InvalidParameter(
            "the probe needs a type-I factor in the target".into(),
        ));
    }
    let is_product = matches!(target, DomainDescriptor::Product(_));

    // drive the type-I slots toward the boundary: only a factor a test
    // function can live on counts as boundary approach
    let probe_distance = |z: &Point| -> Result<f64> {
        let image = map.evaluate(z)?;
        if !is_product {
            return image.boundary_distance();
        }
        let mut best = f64::INFINITY;
        for &k in &type_i_factors {
            best = best.min(image.factor(k)?.boundary_distance()?);
        }
        Ok(best)
    };

    let mut out = Vec::new();
    for (step, &r) in r_grid.iter().enumerate() {
        if !(0.0 < r && r < 1.0) {
            return Err(Error::InvalidParameter("r grid must sit in (0,1)".into()));
        }
        let delta_target = 1.0 - r;
        let mut found = None;
        for ray in 0..8u64 {
            let mut rng = stream_rng(seed, (step as u64) * 64 + ray);
            let Some(dir) =
                refine_direction(map.source(), &probe_distance, delta_target / 3.0, &mut rng)?
            else {
                continue;
            };
            if let Some(z) = ray_bisect(map.source(), &dir, &probe_distance, delta_target)? {
                found = Some(z);
                break;
            }
        }
        let Some(z_r) = found else { continue };

        let image = map.evaluate(&z_r)?;
        let (_, u_worst) = distortion_ratio(map, &z_r)?;
        let w_coords = map.jacobian(&z_r)? * u_worst.coords();
        let w = Tangent::from_vector(target.clone(), w_coords)?;

        // among the type-I factors the targeting actually drove toward the
        // boundary, take the one carrying the largest share of the form
        let near_cap = (2.0 * delta_target).min(0.499);
        let mut factor = type_i_factors[0];
        if is_product {
            let mut best = f64::NEG_INFINITY;
            for &k in &type_i_factors {
                if image.factor(k)?.boundary_distance()? > near_cap {
                    continue;
                }
                let term = bergman_form(&image.factor(k)?, &w.factor(k)?)?;
                if term > best {
                    best = term;
                    factor = k;
                }
            }
            if best == f64::NEG_INFINITY {
                continue;
            }
        }
        let (a_pt, w_factor) = if is_product {
            (image.factor(factor)?, w.factor(factor)?)
        } else {
            (image.clone(), w.clone())
        };
        if w_factor.coords().norm() < 1e-12 {
            continue;
        }
        let f = build_general(&a_pt, &w_factor, a_param)?;
        let f = if is_product {
            f.lift_to_product(target.clone(), factor)?
        } else {
            f
        };

        let estimate =
            composed_seminorm_estimate(&f, map, samples, seed ^ 0x5eed, std::slice::from_ref(&z_r))?;
        out.push(ProbePoint {
            r,
            delta: probe_distance(&z_r)?,
            seminorm: estimate,
        });
    }
    Ok(out)
}

fn composed_seminorm_estimate(
    f: &TestFunction,
    map: &HoloMap,
    samples: usize,
    seed: u64,
    extra: &[Point],
) -> Result<f64> {
    let source = map.source().clone();
    let grad_composed = |z: &Point| -> Result<DVector<C64>> {
        let g = f.gradient(&map.evaluate(z)?)?;
        Ok(map.jacobian(z)?.transpose() * g)
    };
    let mut sup: f64 = 0.0;
    for i in 0..samples {
        let mut rng = stream_rng(seed, i as u64);
        let z = random_interior(&source, &mut rng, 0.0, 0.98);
        sup = sup.max(rayleigh_sup(&z, &grad_composed(&z)?)?.sqrt());
    }
    for z in extra {
        sup = sup.max(rayleigh_sup(z, &grad_composed(z)?)?.sqrt());
    }
    Ok(sup)
}

/// Factor-wise split of the pulled-back form on a product: the individual
/// factor terms, their sum (the full form, exactly), the index of the
/// dominating factor and the selection bound `total ≤ n · max term`.
#[derive(Debug, Clone)]
pub struct ProductRatioDecomposition {
    pub factor_terms: Vec<f64>,
    pub total: f64,
    pub argmax: usize,
    pub bound: f64,
}

impl ProductRatioDecomposition {
    pub fn selection_inequality_holds(&self) -> bool {
        self.total <= self.bound * (1.0 + 1e-12) + f64::MIN_POSITIVE
    }
}

/// Splits `H_{φ(z)}(Jφ u, Jφ u)` over the factors of a product map.
pub fn product_ratio_decomposition(
    map: &HoloMap,
    z: &Point,
    u: &Tangent,
) -> Result<ProductRatioDecomposition> {
    if map.product_factors().is_none() {
        return Err(Error::TypeMismatch(
            "decomposition needs a factor-wise product map".into(),
        ));
    }
    let image = map.evaluate(z)?;
    let w_coords = map.jacobian(z)? * u.coords();
    let w = Tangent::from_vector(map.target().clone(), w_coords)?;
    let nfactors = map.target().factors().count();
    let mut factor_terms = Vec::with_capacity(nfactors);
    for k in 0..nfactors {
        factor_terms.push(bergman_form(&image.factor(k)?, &w.factor(k)?)?);
    }
    let total = bergman_form(&image, &w)?;
    let argmax = factor_terms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite terms"))
        .map(|(i, _)| i)
        .expect("nonempty product");
    let bound = nfactors as f64 * factor_terms[argmax];
    Ok(ProductRatioDecomposition {
        factor_terms,
        total,
        argmax,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainDescriptor as D;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_ratio_is_one() {
        let d = D::type_i(2, 2).unwrap();
        let id = HoloMap::identity(d.clone());
        let mut rng = stream_rng(61, 0);
        for _ in 0..20 {
            let z = random_interior(&d, &mut rng, 0.05, 0.9);
            let (ratio, _) = distortion_ratio(&id, &z).unwrap();
            assert!((ratio - 1.0).abs() < 1e-12);
        }
    }

    // 1-D closed form for φ(z) = (1+z)/2: ratio = 4(1+r)²/(3+r)² on the
    // real axis.
    #[test]
    fn disc_affine_ratio_closed_form() {
        let disc = D::type_i(1, 1).unwrap();
        let map = HoloMap::disc_affine(c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        for r in [0.0, 0.5, 0.9, 0.99] {
            let z = Point::new(disc.clone(), vec![c(r, 0.0)]).unwrap();
            let (ratio, _) = distortion_ratio(&map, &z).unwrap();
            let want = 4.0 * (1.0 + r).powi(2) / (3.0 + r).powi(2);
            assert!((ratio - want).abs() < 1e-9, "r={r}: {ratio} vs {want}");
        }
    }

    #[test]
    fn verdict_rules_fire_on_synthetic_profiles() {
        let d = D::type_i(1, 1).unwrap();
        let z = Point::origin(d.clone());
        let t = Tangent::new(d.clone(), vec![c(1.0, 0.0)]).unwrap();
        let mk = |delta: f64, ratio: f64, index: u64| RatioSample {
            index,
            z: z.clone(),
            delta,
            ratio,
            direction: t.clone(),
        };

        // ratios ≡ 1 near the boundary
        let flat: Vec<_> = (0..6)
            .map(|i| mk(10f64.powi(-i - 1), 1.0, i as u64))
            .collect();
        assert_eq!(
            compactness_verdict(&flat, &[0.1, 0.01]),
            Verdict::EvidenceNonCompact
        );

        // ratios decaying like delta
        let decaying: Vec<_> = (0..6)
            .map(|i| {
                let delta = 10f64.powi(-i - 1);
                mk(delta, delta, i as u64)
            })
            .collect();
        assert_eq!(
            compactness_verdict(&decaying, &[0.1, 0.01]),
            Verdict::EvidenceCompact
        );

        // nothing near the boundary
        let far: Vec<_> = (0..4).map(|i| mk(0.3, 1.0, i as u64)).collect();
        assert_eq!(
            compactness_verdict(&far, &[0.1, 0.01]),
            Verdict::ImageBoundedAway
        );

        // big ratios at coarse decades, middling at the finest
        let mixed = vec![mk(0.05, 1.0, 0), mk(5e-3, 0.2, 1), mk(5e-4, 0.4, 2)];
        assert_eq!(
            compactness_verdict(&mixed, &[0.1, 0.01]),
            Verdict::Inconclusive
        );
    }

    #[test]
    fn profile_flags_contractions() {
        let d = D::type_i(1, 1).unwrap();
        let map = HoloMap::scale(d, 0.5).unwrap();
        let profile = ratio_profile(&map, &SamplerSpec::default(), 5).unwrap();
        assert_eq!(profile.verdict, Verdict::ImageBoundedAway);
    }

    #[test]
    fn product_decomposition_basics() {
        let disc = D::type_i(1, 1).unwrap();
        let map = HoloMap::product(vec![
            HoloMap::identity(disc.clone()),
            HoloMap::identity(disc.clone()),
        ])
        .unwrap();
        let prod = map.source().clone();
        let z = Point::origin(prod.clone());
        let u = Tangent::new(prod.clone(), vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let dec = product_ratio_decomposition(&map, &z, &u).unwrap();
        assert_eq!(dec.factor_terms.len(), 2);
        assert_eq!(dec.factor_terms[0], dec.factor_terms[1]);
        assert_eq!(dec.total, dec.factor_terms[0] * 2.0);
        assert!(dec.selection_inequality_holds());

        // constant second component: total carried by the first factor
        let map = HoloMap::product(vec![
            HoloMap::identity(disc.clone()),
            HoloMap::constant(Point::origin(disc.clone())).unwrap(),
        ])
        .unwrap();
        let dec = product_ratio_decomposition(&map, &z, &u).unwrap();
        assert_eq!(dec.factor_terms[1], 0.0);
        assert_eq!(dec.total, dec.factor_terms[0]);
        assert_eq!(dec.argmax, 0);
        assert!(dec.selection_inequality_holds());

        let not_product = HoloMap::identity(prod);
        assert!(product_ratio_decomposition(&not_product, &z, &u).is_err());
    }
}
