//! JSON problem files.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "name": "example",
//!   "distribution": {
//!     "supply": [460, [440, 450, 470, 480], {"mean": 610, "sigma": 10}],
//!     "demand": [{"histogram": "demand1.csv"}, ...],
//!     "min_purchase": [...], "min_sale": [...],
//!     "purchase_price": [...], "sale_price": [...],
//!     "transport_cost": [[...], ...],
//!     "contract_purchase_price": [...], "contract_sale_price": [...]
//!   }
//! }
//! ```
//!
//! A parameter is a number, a trapezoid quadruple, a Gaussian
//! `{"mean", "sigma"}`, or a sidecar file reference `{"histogram": path}`
//! (CSV `bin_lo,bin_hi,count`) or `{"samples": path}` (one value per line).
//! Sidecar paths are relative to the problem file. A classical
//! transportation instance uses a `"transport"` section with `supplies`,
//! `demands`, `costs` and an optional `sense`.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::error::Error as CoreError;
use crate::fuzzy::Trapezoid;
use crate::ingest::{gaussian_to_trapezoid, BinnedHistogram, ConfidenceLevels, EmpiricalCdf, SampleSet};
use crate::model::DistributionProblem;
use crate::monte_carlo::{GaussianSpec, ProblemSpecs};
use crate::simplex::Sense;
use crate::transport::TransportInstance;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum ProblemFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

fn schema(path: &str, message: impl Display) -> ProblemFileError {
    ProblemFileError::Schema {
        path: path.to_string(),
        message: message.to_string(),
    }
}

/// A parsed problem file.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemDocument {
    Distribution {
        name: Option<String>,
        problem: DistributionProblem,
        /// Present when every objective-relevant parameter is crisp or Gaussian.
        specs: Option<ProblemSpecs>,
    },
    Transport {
        name: Option<String>,
        instance: TransportInstance,
        sense: Sense,
    },
}

struct Ctx<'a> {
    base_dir: &'a Path,
    levels: ConfidenceLevels,
}

/// One parameter after normalization.
struct Param {
    trapezoid: Trapezoid,
    gaussian: Option<GaussianSpec>,
}

impl Ctx<'_> {
    fn param(&self, path: &str, v: &Value) -> Result<Param, ProblemFileError> {
        let invalid = |e: CoreError| schema(path, e);
        match v {
            Value::Number(_) => {
                let x = number(path, v)?;
                Ok(Param {
                    trapezoid: Trapezoid::crisp(x),
                    gaussian: Some(GaussianSpec::crisp(x)),
                })
            }
            Value::Array(items) => {
                if items.len() != 4 {
                    return Err(schema(path, format!("expected a quadruple [a, b, c, d], got {} entries", items.len())));
                }
                let q: Vec<f64> = items
                    .iter()
                    .enumerate()
                    .map(|(k, x)| number(&format!("{path}[{k}]"), x))
                    .collect::<Result<_, _>>()?;
                let trapezoid = Trapezoid::new(q[0], q[1], q[2], q[3]).map_err(invalid)?;
                let gaussian = trapezoid.is_crisp().then(|| GaussianSpec::crisp(q[0]));
                Ok(Param { trapezoid, gaussian })
            }
            Value::Object(obj) => {
                if obj.contains_key("mean") || obj.contains_key("sigma") {
                    expect_keys(path, obj, &["mean", "sigma"])?;
                    let mean = number(&format!("{path}.mean"), field(path, obj, "mean")?)?;
                    let sigma = number(&format!("{path}.sigma"), field(path, obj, "sigma")?)?;
                    let spec = GaussianSpec::new(mean, sigma).map_err(invalid)?;
                    let trapezoid = gaussian_to_trapezoid(mean, sigma, self.levels).map_err(invalid)?;
                    Ok(Param {
                        trapezoid,
                        gaussian: Some(spec),
                    })
                } else if let Some(file) = obj.get("histogram") {
                    expect_keys(path, obj, &["histogram"])?;
                    let text = self.sidecar(&format!("{path}.histogram"), file)?;
                    let hist = BinnedHistogram::parse_csv(&text).map_err(invalid)?;
                    let trapezoid = EmpiricalCdf::from_histogram(&hist).to_trapezoid(self.levels).map_err(invalid)?;
                    Ok(Param { trapezoid, gaussian: None })
                } else if let Some(file) = obj.get("samples") {
                    expect_keys(path, obj, &["samples"])?;
                    let text = self.sidecar(&format!("{path}.samples"), file)?;
                    let samples = SampleSet::parse(&text).map_err(invalid)?;
                    let trapezoid = EmpiricalCdf::from_samples(&samples).to_trapezoid(self.levels).map_err(invalid)?;
                    Ok(Param { trapezoid, gaussian: None })
                } else {
                    Err(schema(path, "expected {mean, sigma}, {histogram} or {samples}"))
                }
            }
            _ => Err(schema(path, "expected a number, a quadruple or an object")),
        }
    }

    fn sidecar(&self, path: &str, v: &Value) -> Result<String, ProblemFileError> {
        let rel = v.as_str().ok_or_else(|| schema(path, "expected a file path string"))?;
        let full = self.base_dir.join(rel);
        std::fs::read_to_string(&full).map_err(|source| ProblemFileError::Io { path: full, source })
    }

    fn vector(&self, path: &str, v: &Value) -> Result<Vec<Param>, ProblemFileError> {
        let items = v.as_array().ok_or_else(|| schema(path, "expected an array"))?;
        items
            .iter()
            .enumerate()
            .map(|(k, x)| self.param(&format!("{path}[{k}]"), x))
            .collect()
    }

    fn matrix(&self, path: &str, v: &Value) -> Result<Vec<Vec<Param>>, ProblemFileError> {
        let rows = v.as_array().ok_or_else(|| schema(path, "expected an array of rows"))?;
        rows.iter()
            .enumerate()
            .map(|(i, row)| self.vector(&format!("{path}[{i}]"), row))
            .collect()
    }
}

fn number(path: &str, v: &Value) -> Result<f64, ProblemFileError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| schema(path, "expected a finite number"))
}

fn field<'v>(path: &str, obj: &'v Map<String, Value>, key: &str) -> Result<&'v Value, ProblemFileError> {
    obj.get(key)
        .ok_or_else(|| schema(&format!("{path}.{key}"), "missing required field"))
}

fn expect_keys(path: &str, obj: &Map<String, Value>, allowed: &[&str]) -> Result<(), ProblemFileError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(&format!("{path}.{k}"), "unknown field")),
        None => Ok(()),
    }
}

fn numbers(path: &str, v: &Value) -> Result<Vec<f64>, ProblemFileError> {
    let items = v.as_array().ok_or_else(|| schema(path, "expected an array of numbers"))?;
    items
        .iter()
        .enumerate()
        .map(|(k, x)| number(&format!("{path}[{k}]"), x))
        .collect()
}

fn split(params: Vec<Param>) -> (Vec<Trapezoid>, Option<Vec<GaussianSpec>>) {
    let trapezoids = params.iter().map(|p| p.trapezoid).collect();
    let gaussians = params.into_iter().map(|p| p.gaussian).collect();
    (trapezoids, gaussians)
}

const DISTRIBUTION_KEYS: [&str; 9] = [
    "supply",
    "demand",
    "min_purchase",
    "min_sale",
    "purchase_price",
    "sale_price",
    "transport_cost",
    "contract_purchase_price",
    "contract_sale_price",
];

/// Parses a problem document. Sidecar files resolve against `base_dir`.
pub fn parse_problem(text: &str, base_dir: &Path, levels: ConfidenceLevels) -> Result<ProblemDocument, ProblemFileError> {
    let root: Value = serde_json::from_str(text)?;
    let obj = root.as_object().ok_or_else(|| schema("$", "expected a JSON object"))?;
    expect_keys("$", obj, &["schema_version", "name", "distribution", "transport"])?;
    let version = field("$", obj, "schema_version")?
        .as_u64()
        .ok_or_else(|| schema("$.schema_version", "expected an integer"))?;
    if version != SCHEMA_VERSION {
        return Err(schema("$.schema_version", format!("unsupported version {version}, expected {SCHEMA_VERSION}")));
    }
    let name = match obj.get("name") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(schema("$.name", "expected a string")),
    };
    let ctx = Ctx { base_dir, levels };

    match (obj.get("distribution"), obj.get("transport")) {
        (Some(section), None) => {
            let path = "$.distribution";
            let sec = section.as_object().ok_or_else(|| schema(path, "expected an object"))?;
            expect_keys(path, sec, &DISTRIBUTION_KEYS)?;
            let vec_of = |key: &str| ctx.vector(&format!("{path}.{key}"), field(path, sec, key)?);
            let (supply, g_supply) = split(vec_of("supply")?);
            let (demand, g_demand) = split(vec_of("demand")?);
            let (min_purchase, g_purchase) = split(vec_of("min_purchase")?);
            let (min_sale, g_sale) = split(vec_of("min_sale")?);
            let (purchase_price, g_k) = split(vec_of("purchase_price")?);
            let (sale_price, g_r) = split(vec_of("sale_price")?);
            let cost_rows = ctx.matrix(&format!("{path}.transport_cost"), field(path, sec, "transport_cost")?)?;
            let (transport_cost, g_c): (Vec<_>, Vec<_>) = cost_rows.into_iter().map(split).unzip();
            let optional = |key: &str| -> Result<Option<Vec<Trapezoid>>, ProblemFileError> {
                sec.get(key)
                    .map(|v| ctx.vector(&format!("{path}.{key}"), v).map(|p| split(p).0))
                    .transpose()
            };
            let problem = DistributionProblem {
                supply,
                demand,
                min_purchase,
                min_sale,
                purchase_price,
                sale_price,
                transport_cost,
                contract_purchase_price: optional("contract_purchase_price")?,
                contract_sale_price: optional("contract_sale_price")?,
            };
            problem.validate().map_err(|e| schema(path, e))?;
            let specs = (|| {
                Some(ProblemSpecs {
                    supply: g_supply?,
                    demand: g_demand?,
                    min_purchase: g_purchase?,
                    min_sale: g_sale?,
                    purchase_price: g_k?,
                    sale_price: g_r?,
                    transport_cost: g_c.into_iter().collect::<Option<_>>()?,
                })
            })();
            Ok(ProblemDocument::Distribution { name, problem, specs })
        }
        (None, Some(section)) => {
            let path = "$.transport";
            let sec = section.as_object().ok_or_else(|| schema(path, "expected an object"))?;
            expect_keys(path, sec, &["supplies", "demands", "costs", "sense"])?;
            let supplies = numbers(&format!("{path}.supplies"), field(path, sec, "supplies")?)?;
            let demands = numbers(&format!("{path}.demands"), field(path, sec, "demands")?)?;
            let rows = field(path, sec, "costs")?
                .as_array()
                .ok_or_else(|| schema(&format!("{path}.costs"), "expected an array of rows"))?;
            let costs = rows
                .iter()
                .enumerate()
                .map(|(i, r)| numbers(&format!("{path}.costs[{i}]"), r))
                .collect::<Result<Vec<_>, _>>()?;
            let sense = match sec.get("sense").map(|s| s.as_str()) {
                None | Some(Some("minimize")) => Sense::Minimize,
                Some(Some("maximize")) => Sense::Maximize,
                _ => return Err(schema(&format!("{path}.sense"), "expected \"minimize\" or \"maximize\"")),
            };
            let instance = TransportInstance::new(supplies, demands, costs).map_err(|e| schema(path, e))?;
            Ok(ProblemDocument::Transport { name, instance, sense })
        }
        (Some(_), Some(_)) => Err(schema("$", "expected exactly one of \"distribution\" or \"transport\", got both")),
        (None, None) => Err(schema("$", "expected a \"distribution\" or \"transport\" section")),
    }
}

/// Reads and parses a problem file; sidecars resolve next to it.
pub fn load_problem(path: &Path, levels: ConfidenceLevels) -> Result<ProblemDocument, ProblemFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProblemFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_problem(&text, base, levels)
}

fn param_value(t: &Trapezoid) -> Value {
    let q = t.quadruple();
    if q.iter().all(|&x| x == q[0]) {
        json!(q[0])
    } else {
        json!(q)
    }
}

fn params_value(v: &[Trapezoid]) -> Value {
    Value::Array(v.iter().map(param_value).collect())
}

/// Writes a problem with every parameter in trapezoid (or crisp) form.
pub fn export_problem(problem: &DistributionProblem, name: Option<&str>) -> Value {
    let mut sec = Map::new();
    sec.insert("supply".into(), params_value(&problem.supply));
    sec.insert("demand".into(), params_value(&problem.demand));
    sec.insert("min_purchase".into(), params_value(&problem.min_purchase));
    sec.insert("min_sale".into(), params_value(&problem.min_sale));
    sec.insert("purchase_price".into(), params_value(&problem.purchase_price));
    sec.insert("sale_price".into(), params_value(&problem.sale_price));
    sec.insert(
        "transport_cost".into(),
        Value::Array(problem.transport_cost.iter().map(|r| params_value(r)).collect()),
    );
    if let Some(t) = &problem.contract_purchase_price {
        sec.insert("contract_purchase_price".into(), params_value(t));
    }
    if let Some(s) = &problem.contract_sale_price {
        sec.insert("contract_sale_price".into(), params_value(s));
    }
    let mut root = Map::new();
    root.insert("schema_version".into(), json!(SCHEMA_VERSION));
    if let Some(name) = name {
        root.insert("name".into(), json!(name));
    }
    root.insert("distribution".into(), Value::Object(sec));
    Value::Object(root)
}
