//! Run configuration: JSON schema and conversion into core types.
//!
//! Complex numbers are `[re, im]` pairs, points and tangents are arrays of
//! pairs in intrinsic coordinate order, matrices are arrays of rows.

use bergman_core::domains::{DomainDescriptor, Point};
use bergman_core::maps::HoloMap;
use bergman_core::C64;
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    #[serde(default)]
    pub map: Option<MapSpec>,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind")]
pub enum DomainSpec {
    #[serde(rename = "I")]
    TypeI { m: usize, n: usize },
    #[serde(rename = "II")]
    TypeII { p: usize },
    #[serde(rename = "III")]
    TypeIII { q: usize },
    #[serde(rename = "IV")]
    TypeIV { n: usize },
    #[serde(rename = "product")]
    Product { factors: Vec<DomainSpec> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub family: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub children: Vec<MapSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    // metric
    pub z: Option<Vec<[f64; 2]>>,
    pub u: Option<Vec<[f64; 2]>>,
    // shared sampling knobs
    pub samples: Option<usize>,
    // ratio profile
    pub min_delta_exponent: Option<u32>,
    pub rays: Option<usize>,
    pub random_samples: Option<usize>,
    pub epsilons: Option<Vec<f64>>,
    // test functions and the probe
    pub a_point: Option<Vec<[f64; 2]>>,
    pub w: Option<Vec<[f64; 2]>>,
    pub a_param: Option<f64>,
    pub rho: Option<f64>,
    pub r_grid: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<String>,
    pub format: Option<String>,
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::input("parse-error", e.to_string()))
}

pub fn build_domain(spec: &DomainSpec) -> Result<DomainDescriptor, CliError> {
    let invalid = |e: bergman_core::Error| CliError::input("invalid-descriptor", e.to_string());
    match spec {
        DomainSpec::TypeI { m, n } => DomainDescriptor::type_i(*m, *n).map_err(invalid),
        DomainSpec::TypeII { p } => DomainDescriptor::type_ii(*p).map_err(invalid),
        DomainSpec::TypeIII { q } => DomainDescriptor::type_iii(*q).map_err(invalid),
        DomainSpec::TypeIV { n } => DomainDescriptor::type_iv(*n).map_err(invalid),
        DomainSpec::Product { factors } => {
            let built: Result<Vec<_>, _> = factors.iter().map(build_domain).collect();
            DomainDescriptor::product(built?).map_err(invalid)
        }
    }
}

pub fn coords_from_pairs(pairs: &[[f64; 2]]) -> DVector<C64> {
    DVector::from_iterator(pairs.len(), pairs.iter().map(|p| C64::new(p[0], p[1])))
}

fn param<'a>(
    params: &'a serde_json::Map<String, serde_json::Value>,
    key: &str,
) -> Result<&'a serde_json::Value, CliError> {
    params
        .get(key)
        .ok_or_else(|| CliError::input("invalid-parameter", format!("missing map param `{key}`")))
}

fn complex_param(value: &serde_json::Value) -> Result<C64, CliError> {
    let pair: [f64; 2] = serde_json::from_value(value.clone())
        .map_err(|e| CliError::input("parse-error", e.to_string()))?;
    Ok(C64::new(pair[0], pair[1]))
}

fn coords_param(value: &serde_json::Value) -> Result<DVector<C64>, CliError> {
    let pairs: Vec<[f64; 2]> = serde_json::from_value(value.clone())
        .map_err(|e| CliError::input("parse-error", e.to_string()))?;
    Ok(coords_from_pairs(&pairs))
}

fn matrix_param(value: &serde_json::Value) -> Result<DMatrix<C64>, CliError> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(value.clone())
        .map_err(|e| CliError::input("parse-error", e.to_string()))?;
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::input("parse-error", "ragged matrix".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// Builds the map tree rooted at `spec` as a map out of `domain`.
pub fn build_map(spec: &MapSpec, domain: &DomainDescriptor) -> Result<HoloMap, CliError> {
    let core_err = CliError::from_core;
    match spec.family.as_str() {
        "identity" => Ok(HoloMap::identity(domain.clone())),
        "scale" => {
            let c = param(&spec.params, "c")?.as_f64().ok_or_else(|| {
                CliError::input("invalid-parameter", "scale c must be a number".into())
            })?;
            HoloMap::scale(domain.clone(), c).map_err(core_err)
        }
        "constant" => {
            let coords = coords_param(param(&spec.params, "value")?)?;
            let point = Point::interior(domain.clone(), coords.iter().copied().collect())
                .map_err(core_err)?;
            HoloMap::constant(point).map_err(core_err)
        }
        "disc_affine" => {
            let a = complex_param(param(&spec.params, "a")?)?;
            let b = complex_param(param(&spec.params, "b")?)?;
            if !matches!(domain, DomainDescriptor::TypeI { rows: 1, cols: 1 }) {
                return Err(CliError::input(
                    "type-mismatch",
                    "disc_affine needs domain I(1,1)".into(),
                ));
            }
            HoloMap::disc_affine(a, b).map_err(core_err)
        }
        "unitary_pair" => {
            let left = matrix_param(param(&spec.params, "p")?)?;
            let right = matrix_param(param(&spec.params, "q")?)?;
            HoloMap::unitary_pair(domain.clone(), left, right).map_err(core_err)
        }
        "mobius" => {
            let coords = coords_param(param(&spec.params, "p")?)?;
            let point = Point::interior(domain.clone(), coords.iter().copied().collect())
                .map_err(core_err)?;
            HoloMap::mobius(&point).map_err(core_err)
        }
        "product" => {
            let factors: Vec<DomainDescriptor> = domain.factors().cloned().collect();
            if !matches!(domain, DomainDescriptor::Product(_))
                || factors.len() != spec.children.len()
            {
                return Err(CliError::input(
                    "type-mismatch",
                    "product map needs a product domain with one child per factor".into(),
                ));
            }
            let children: Result<Vec<_>, _> = spec
                .children
                .iter()
                .zip(factors.iter())
                .map(|(child, fd)| build_map(child, fd))
                .collect();
            HoloMap::product(children?).map_err(core_err)
        }
        "compose" => {
            if spec.children.is_empty() {
                return Err(CliError::input(
                    "invalid-parameter",
                    "compose needs children".into(),
                ));
            }
            let mut stage_domain = domain.clone();
            let mut built = Vec::with_capacity(spec.children.len());
            for child in &spec.children {
                let map = build_map(child, &stage_domain)?;
                stage_domain = map.target().clone();
                built.push(map);
            }
            HoloMap::compose(built).map_err(core_err)
        }
        "factor_embed" => {
            let index = param(&spec.params, "index")?.as_u64().ok_or_else(|| {
                CliError::input("invalid-parameter", "index must be an integer".into())
            })? as usize;
            let factors: Vec<DomainDescriptor> = domain.factors().cloned().collect();
            if !matches!(domain, DomainDescriptor::Product(_)) || index >= factors.len() {
                return Err(CliError::input(
                    "type-mismatch",
                    "factor_embed needs a product domain and a valid index".into(),
                ));
            }
            let [child] = spec.children.as_slice() else {
                return Err(CliError::input(
                    "invalid-parameter",
                    "factor_embed takes exactly one child".into(),
                ));
            };
            let base = build_map(child, &factors[index])?;
            HoloMap::factor_embed(domain.clone(), index, base).map_err(core_err)
        }
        other => Err(CliError::input(
            "invalid-parameter",
            format!("unknown map family `{other}`"),
        )),
    }
}
