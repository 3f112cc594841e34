//! The five analyses behind the subcommands, each rendering a deterministic
//! report.

use std::path::PathBuf;

use bergman_core::compactness::{ratio_profile, sequence_probe, SamplerSpec};
use bergman_core::domains::{DomainDescriptor, Point, Tangent};
use bergman_core::maps::HoloMap;
use bergman_core::metrics::{bergman_form, metric_matrix};
use bergman_core::testfns::{
    build_general, classify_direction, ratio_at, seminorm_estimate, TestFnCase,
};

use crate::battery::{battery_passes, run_battery};
use crate::config::{build_domain, build_map, coords_from_pairs, RunConfig};
use crate::report::{self, Json};
use crate::{Cli, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub struct Context {
    pub config: RunConfig,
    pub domain: DomainDescriptor,
    pub hash: String,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub format: Format,
    pub out_path: Option<PathBuf>,
}

pub struct Rendered {
    pub text: String,
    pub failure: Option<CliError>,
}

impl Rendered {
    fn ok(text: String) -> Self {
        Rendered {
            text,
            failure: None,
        }
    }
}

impl Context {
    pub fn new(cli: &Cli, config: RunConfig, hash: String) -> Result<Self, CliError> {
        let domain = build_domain(&config.domain)?;
        let seed = cli.seed.or(config.seed);
        let format = match cli
            .format
            .as_deref()
            .or(config.output.as_ref().and_then(|o| o.format.as_deref()))
            .unwrap_or("json")
        {
            "json" => Format::Json,
            "csv" => Format::Csv,
            other => {
                return Err(CliError::input(
                    "invalid-parameter",
                    format!("unknown format `{other}`"),
                ))
            }
        };
        let out_path = cli.out.clone().or_else(|| {
            config
                .output
                .as_ref()
                .and_then(|o| o.path.as_ref())
                .map(PathBuf::from)
        });
        Ok(Context {
            samples: cli.samples,
            config,
            domain,
            hash,
            seed,
            format,
            out_path,
        })
    }

    // provenance comment ahead of the fixed CSV columns
    fn csv_provenance(&self) -> String {
        format!(
            "# bergman {} config={} seed={}\n",
            env!("CARGO_PKG_VERSION"),
            self.hash,
            self.seed.map_or("none".to_string(), |s| s.to_string())
        )
    }

    fn require_seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| {
            CliError::input(
                "invalid-parameter",
                "sampling analyses need a seed (config `seed` or --seed)".into(),
            )
        })
    }

    fn require_map(&self) -> Result<HoloMap, CliError> {
        let spec = self.config.map.as_ref().ok_or_else(|| {
            CliError::input("invalid-parameter", "this analysis needs a `map`".into())
        })?;
        build_map(spec, &self.domain)
    }

    fn require_json(&self) -> Result<(), CliError> {
        if self.format != Format::Json {
            return Err(CliError::input(
                "invalid-parameter",
                "this report is json-only".into(),
            ));
        }
        Ok(())
    }

    fn point(&self, pairs: &Option<Vec<[f64; 2]>>, what: &str) -> Result<Point, CliError> {
        let pairs = pairs.as_ref().ok_or_else(|| {
            CliError::input("invalid-parameter", format!("analysis needs `{what}`"))
        })?;
        Point::from_vector(self.domain.clone(), coords_from_pairs(pairs))
            .map_err(CliError::from_core)
    }

    fn tangent(&self, pairs: &Option<Vec<[f64; 2]>>, what: &str) -> Result<Tangent, CliError> {
        let pairs = pairs.as_ref().ok_or_else(|| {
            CliError::input("invalid-parameter", format!("analysis needs `{what}`"))
        })?;
        Tangent::from_vector(self.domain.clone(), coords_from_pairs(pairs))
            .map_err(CliError::from_core)
    }
}

pub fn cmd_metric(ctx: &Context) -> Result<Rendered, CliError> {
    ctx.require_json()?;
    let z = ctx.point(&ctx.config.analysis.z, "z")?;
    let u = ctx.tangent(&ctx.config.analysis.u, "u")?;
    let metric = metric_matrix(&z).map_err(CliError::from_core)?;
    let (lam_min, lam_max) = metric.eigen_range();
    let h = bergman_form(&z, &u).map_err(CliError::from_core)?;

    let mut obj = report::envelope("metric", &ctx.hash, ctx.seed);
    obj.push("gram", report::matrix_json(metric.gram()));
    let mut range = Json::object();
    range
        .push("min", Json::Float(lam_min))
        .push("max", Json::Float(lam_max));
    obj.push("eigenvalue_range", range);
    obj.push("h", Json::Float(h));
    Ok(Rendered::ok(report::to_string(&obj)))
}

pub fn cmd_check_identities(ctx: &Context) -> Result<Rendered, CliError> {
    ctx.require_json()?;
    let seed = ctx.require_seed()?;
    let samples = ctx.samples.or(ctx.config.analysis.samples).unwrap_or(100);
    let residuals = run_battery(&ctx.domain, samples, seed).map_err(CliError::from_core)?;
    let pass = battery_passes(&residuals);

    let mut obj = report::envelope("check-identities", &ctx.hash, ctx.seed);
    obj.push("samples", Json::Int(samples as i64));
    let items = residuals
        .iter()
        .map(|r| {
            let mut item = Json::object();
            item.push("name", Json::Str(r.name.into()))
                .push("max_residual", Json::Float(r.max_residual))
                .push("tolerance", Json::Float(r.tolerance))
                .push("pass", Json::Bool(r.pass()));
            item
        })
        .collect();
    obj.push("identities", Json::Array(items));
    obj.push("pass", Json::Bool(pass));
    let failure = (!pass).then(|| {
        CliError::failure(
            "identity-residual",
            "an automorphism identity residual exceeded its tolerance".into(),
        )
    });
    Ok(Rendered {
        text: report::to_string(&obj),
        failure,
    })
}

pub fn cmd_ratio_profile(ctx: &Context) -> Result<Rendered, CliError> {
    let seed = ctx.require_seed()?;
    let map = ctx.require_map()?;
    let analysis = &ctx.config.analysis;
    let defaults = SamplerSpec::default();
    let spec = SamplerSpec {
        min_delta_exponent: analysis
            .min_delta_exponent
            .unwrap_or(defaults.min_delta_exponent),
        rays: analysis.rays.unwrap_or(defaults.rays),
        random_samples: ctx
            .samples
            .or(analysis.random_samples)
            .unwrap_or(defaults.random_samples),
        epsilons: analysis.epsilons.clone().unwrap_or(defaults.epsilons),
    };
    let profile = ratio_profile(&map, &spec, seed).map_err(CliError::from_core)?;

    match ctx.format {
        Format::Csv => {
            let mut text = ctx.csv_provenance();
            text.push_str("sample_index,delta,ratio,verdict_flag\n");
            for s in &profile.samples {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    s.index,
                    report::format_float(s.delta),
                    report::format_float(s.ratio),
                    profile.verdict.label()
                ));
            }
            Ok(Rendered::ok(text))
        }
        Format::Json => {
            let mut obj = report::envelope("ratio-profile", &ctx.hash, ctx.seed);
            obj.push("map_family", Json::Str(map.family_name().into()));
            obj.push("verdict", Json::Str(profile.verdict.label().into()));
            obj.push(
                "verdict_note",
                Json::Str("evidence at the sampled scale, not a proof".into()),
            );
            let samples = profile
                .samples
                .iter()
                .map(|s| {
                    let mut item = Json::object();
                    item.push("index", Json::Int(s.index as i64))
                        .push("delta", Json::Float(s.delta))
                        .push("ratio", Json::Float(s.ratio));
                    item
                })
                .collect();
            obj.push("samples", Json::Array(samples));
            Ok(Rendered::ok(report::to_string(&obj)))
        }
    }
}

fn case_name(case: TestFnCase) -> &'static str {
    match case {
        TestFnCase::LogCase1 => "LogCase1",
        TestFnCase::RootCase2 => "RootCase2",
        TestFnCase::RootCase3 => "RootCase3",
    }
}

// Direction-independent lower bounds for the Bloch quotient at the tuned
// point: the dominating split piece bounds the form by 3(m+n) times itself,
// and the gradient pairing has the per-case closed value.
fn case_floor(case: TestFnCase, r: f64, a_param: f64, m: usize, n: usize) -> f64 {
    let beta = (-a_param * (1.0 - r)).exp();
    let third = 1.0 / (3.0 * (m + n) as f64);
    match case {
        TestFnCase::LogCase1 => (1.0 - beta) / (1.0 - beta * r) * third.sqrt(),
        TestFnCase::RootCase2 => {
            let g = 1.0 / (1.0 - beta * r).sqrt() - 1.0 / (1.0 - r).sqrt();
            g.abs() * ((1.0 - r * r) * third).sqrt()
        }
        TestFnCase::RootCase3 => {
            let h = (1.0 - r).sqrt() * (1.0 / (1.0 - beta * r).sqrt() - 1.0 / (1.0 - r).sqrt());
            h.abs() * third.sqrt()
        }
    }
}

pub fn cmd_testfn(ctx: &Context) -> Result<Rendered, CliError> {
    ctx.require_json()?;
    let seed = ctx.require_seed()?;
    let (m, n) = match &ctx.domain {
        DomainDescriptor::TypeI { rows, cols } => (*rows, *cols),
        _ => {
            return Err(CliError::input(
                "type-mismatch",
                "test functions need a type-I domain".into(),
            ))
        }
    };
    let analysis = &ctx.config.analysis;
    let a_point = ctx.point(&analysis.a_point, "a_point")?;
    let w = ctx.tangent(&analysis.w, "w")?;
    let a_param = analysis.a_param.unwrap_or(1.0);
    let samples = ctx.samples.or(analysis.samples).unwrap_or(400);
    let rho = analysis.rho.unwrap_or(0.5);
    let r_grid = analysis
        .r_grid
        .clone()
        .unwrap_or_else(|| vec![0.9, 0.99, 0.999, 0.9999]);

    let f = build_general(&a_point, &w, a_param).map_err(CliError::from_core)?;

    // direction pushed through the reduction pre-maps
    let mut v = w.coords().clone();
    let mut at = a_point.clone();
    for map in f.pre_maps() {
        v = map.jacobian(&at).map_err(CliError::from_core)? * v;
        at = map.evaluate(&at).map_err(CliError::from_core)?;
    }
    let v = Tangent::from_vector(ctx.domain.clone(), v).map_err(CliError::from_core)?;
    let split = classify_direction(f.r(), &v).map_err(CliError::from_core)?;

    let ratio = ratio_at(&f, &a_point, &w).map_err(CliError::from_core)?;
    let floor = case_floor(f.case(), f.r(), a_param, m, n);
    let ratio_ok = ratio >= floor * (1.0 - 1e-9);

    let seminorm = seminorm_estimate(&f, samples, seed, std::slice::from_ref(&a_point))
        .map_err(CliError::from_core)?;
    let seminorm_cap = match f.case() {
        TestFnCase::LogCase1 => Some(4.0 / ((m + n) as f64).sqrt()),
        _ => None,
    };
    let seminorm_ok =
        seminorm_cap.map_or(seminorm.is_finite(), |cap| seminorm <= cap * (1.0 + 1e-12));

    let mut decay = Vec::new();
    let mut decay_values = Vec::new();
    for (i, &r) in r_grid.iter().enumerate() {
        let g =
            bergman_core::testfns::build_diagonal(r, &v, a_param).map_err(CliError::from_core)?;
        let sup = g
            .decay_on_compact(rho, samples, seed ^ (0x4bed + i as u64))
            .map_err(CliError::from_core)?;
        decay_values.push(sup);
        let mut item = Json::object();
        item.push("r", Json::Float(r)).push("sup", Json::Float(sup));
        decay.push(item);
    }
    let decay_ok = decay_values.windows(2).all(|w| w[1] < w[0]);

    let pass = ratio_ok && seminorm_ok && decay_ok;
    let mut obj = report::envelope("testfn", &ctx.hash, ctx.seed);
    obj.push("case", Json::Str(case_name(f.case()).into()));
    obj.push("r", Json::Float(f.r()));
    obj.push("a_param", Json::Float(a_param));
    let mut split_json = Json::object();
    split_json
        .push("a", Json::Float(split.a))
        .push("b", Json::Float(split.b))
        .push("c", Json::Float(split.c));
    obj.push("direction_split", split_json);
    let mut checks = Json::object();
    checks
        .push("ratio_at", Json::Float(ratio))
        .push("ratio_floor", Json::Float(floor))
        .push("ratio_ok", Json::Bool(ratio_ok))
        .push("seminorm_estimate", Json::Float(seminorm))
        .push("seminorm_cap", seminorm_cap.map_or(Json::Null, Json::Float))
        .push("seminorm_ok", Json::Bool(seminorm_ok))
        .push("decay", Json::Array(decay))
        .push("decay_ok", Json::Bool(decay_ok));
    obj.push("checks", checks);
    obj.push("pass", Json::Bool(pass));

    let failure = (!pass).then(|| {
        CliError::failure(
            "testfn-check",
            "a test-function contract check failed".into(),
        )
    });
    Ok(Rendered {
        text: report::to_string(&obj),
        failure,
    })
}

pub fn cmd_sequence_probe(ctx: &Context) -> Result<Rendered, CliError> {
    let seed = ctx.require_seed()?;
    let map = ctx.require_map()?;
    let analysis = &ctx.config.analysis;
    let a_param = analysis.a_param.unwrap_or(1.0);
    let samples = ctx.samples.or(analysis.samples).unwrap_or(200);
    let r_grid = analysis
        .r_grid
        .clone()
        .unwrap_or_else(|| vec![0.9, 0.99, 0.999]);
    let probe =
        sequence_probe(&map, a_param, &r_grid, samples, seed).map_err(CliError::from_core)?;

    match ctx.format {
        Format::Csv => {
            let mut text = ctx.csv_provenance();
            text.push_str("index,r,delta,seminorm\n");
            for (i, p) in probe.iter().enumerate() {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    i,
                    report::format_float(p.r),
                    report::format_float(p.delta),
                    report::format_float(p.seminorm)
                ));
            }
            Ok(Rendered::ok(text))
        }
        Format::Json => {
            let mut obj = report::envelope("sequence-probe", &ctx.hash, ctx.seed);
            obj.push("map_family", Json::Str(map.family_name().into()));
            obj.push(
                "empty_means",
                Json::Str("no boundary-approaching image points were found".into()),
            );
            let points = probe
                .iter()
                .map(|p| {
                    let mut item = Json::object();
                    item.push("r", Json::Float(p.r))
                        .push("delta", Json::Float(p.delta))
                        .push("seminorm", Json::Float(p.seminorm));
                    item
                })
                .collect();
            obj.push("points", Json::Array(points));
            Ok(Rendered::ok(report::to_string(&obj)))
        }
    }
}
