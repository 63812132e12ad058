//! Run orchestration for the `ftopt` binary.
//!
//! [`run`] loads a problem or sample file, dispatches on [`Mode`] and writes
//! CSV and JSON files into the output directory. Every float in the output
//! is rounded to 9 significant digits so repeated runs diff cleanly.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use ftopt_core::fuzzy_solver::fit_trapezoid;
use ftopt_core::ingest::{BinnedHistogram, EmpiricalCdf};
use ftopt_core::monte_carlo::{self, compare, quantities, quantity_label, McResult};
use ftopt_core::problem_file::{export_problem, load_problem, ProblemDocument, ProblemFileError, SCHEMA_VERSION};
use ftopt_core::transport::{modi_optimize, north_west_corner, vogel_approximation};
use ftopt_core::{solve_fuzzy, AlphaGrid, ConfidenceLevels, DistributionProblem, FuzzySolution, SampleSet, Sense, Status};
use ftopt_core::{ProblemSpecs, TransportInstance};
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

pub const DEFAULT_ALPHA_LEVELS: usize = 11;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Crisp,
    Fuzzy,
    MonteCarlo,
    Compare,
    Ingest,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Crisp => "crisp",
            Mode::Fuzzy => "fuzzy",
            Mode::MonteCarlo => "montecarlo",
            Mode::Compare => "compare",
            Mode::Ingest => "ingest",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    /// Problem file, or a sample/histogram file in ingest mode.
    pub input: PathBuf,
    pub alpha_levels: usize,
    pub mc_steps: usize,
    pub seed: u64,
    pub gamma_core: f64,
    pub gamma_support: f64,
    pub out_dir: PathBuf,
    /// Writes the normalized problem back out as a trapezoid-only file.
    pub export_problem: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(mode: Mode, input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            mode,
            input: input.into(),
            alpha_levels: DEFAULT_ALPHA_LEVELS,
            mc_steps: monte_carlo::DEFAULT_STEPS,
            seed: DEFAULT_SEED,
            gamma_core: ftopt_core::ingest::DEFAULT_CORE_LEVEL,
            gamma_support: ftopt_core::ingest::DEFAULT_SUPPORT_LEVEL,
            out_dir: out_dir.into(),
            export_problem: None,
        }
    }

    pub fn validate(&self) -> Result<ConfidenceLevels, CliError> {
        if self.alpha_levels < 2 {
            return Err(CliError::Config("at least 2 alpha levels are required".into()));
        }
        if matches!(self.mode, Mode::MonteCarlo | Mode::Compare) && self.mc_steps == 0 {
            return Err(CliError::Config("--mc-steps must be positive".into()));
        }
        ConfidenceLevels::new(self.gamma_core, self.gamma_support)
            .map_err(|e| CliError::Config(format!("confidence levels: {e}")))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

impl CliError {
    /// Process exit status: 2 configuration, 3 I/O, 4 input, 5 infeasible,
    /// 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Input(_) => 4,
            CliError::Infeasible(_) => 5,
            CliError::Solver(_) => 1,
        }
    }
}

impl From<ProblemFileError> for CliError {
    fn from(e: ProblemFileError) -> Self {
        match e {
            ProblemFileError::Io { path, source } => CliError::Io { path, source },
            other => CliError::Input(other.to_string()),
        }
    }
}

fn core_err(e: ftopt_core::Error) -> CliError {
    match e {
        ftopt_core::Error::Infeasible(msg) => CliError::Infeasible(msg),
        ftopt_core::Error::IterationLimit(_) => CliError::Solver(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

/// Rounds to 9 significant digits; `-0` becomes `0`.
pub fn round9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// CSV cell for a float.
pub fn fmt9(x: f64) -> String {
    round9(x).to_string()
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                let r = round9(x);
                *v = if r.fract() == 0.0 && r.abs() < 1e15 {
                    json!(r as i64)
                } else {
                    json!(r)
                };
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded by [`round9`].
pub fn to_json_string(value: &impl Serialize) -> String {
    let mut v = serde_json::to_value(value).expect("output types serialize");
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.written.push(path);
        Ok(())
    }
}

/// Outcome of a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    /// One-line human summary.
    pub summary: String,
}

pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    let levels = config.validate()?;
    fs::create_dir_all(&config.out_dir).map_err(|source| CliError::Io {
        path: config.out_dir.clone(),
        source,
    })?;
    let mut out = Writer {
        dir: &config.out_dir,
        written: Vec::new(),
    };
    let summary = if config.mode == Mode::Ingest {
        if config.export_problem.is_some() {
            return Err(CliError::Config("--export-problem needs a problem file".into()));
        }
        run_ingest(config, levels, &mut out)?
    } else {
        match load_problem(&config.input, levels)? {
            ProblemDocument::Transport { name, instance, sense } => {
                if config.mode != Mode::Crisp {
                    return Err(CliError::Config(format!(
                        "a transport instance only supports crisp mode, not {}",
                        config.mode
                    )));
                }
                if config.export_problem.is_some() {
                    return Err(CliError::Config("--export-problem needs a distribution problem".into()));
                }
                run_transport(name.as_deref(), &instance, sense, &mut out)?
            }
            ProblemDocument::Distribution { name, problem, specs } => {
                if let Some(path) = &config.export_problem {
                    let text = to_json_string(&export_problem(&problem, name.as_deref()));
                    fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
                    out.written.push(path.clone());
                }
                run_distribution(config, levels, name.as_deref(), &problem, specs.as_ref(), &mut out)?
            }
        }
    };
    Ok(RunReport {
        files: out.written,
        summary,
    })
}

fn run_distribution(
    config: &RunConfig,
    levels: ConfidenceLevels,
    name: Option<&str>,
    problem: &DistributionProblem,
    specs: Option<&ProblemSpecs>,
    out: &mut Writer,
) -> Result<String, CliError> {
    match config.mode {
        Mode::Crisp => run_crisp(name, problem, out),
        Mode::Fuzzy => {
            let fz = fuzzy(config, problem)?;
            write_fuzzy(name, &fz, out)?;
            Ok(fuzzy_summary(&fz))
        }
        Mode::MonteCarlo => {
            let mc = monte_carlo(config, specs)?;
            write_monte_carlo(name, &mc, out)?;
            Ok(mc_summary(&mc))
        }
        Mode::Compare => {
            let fz = fuzzy(config, problem)?;
            let mc = monte_carlo(config, specs)?;
            write_fuzzy(name, &fz, out)?;
            write_monte_carlo(name, &mc, out)?;
            let report = compare(&fz, &mc, levels).map_err(core_err)?;
            out.write(
                "comparison.json",
                &to_json_string(&json!({
                    "name": name,
                    "alpha_levels": fz.levels.len(),
                    "steps": mc.steps,
                    "seed": mc.seed,
                    "report": report,
                })),
            )?;
            let ratio = report
                .entry("D")
                .and_then(|e| e.width_ratio)
                .map_or("n/a".to_string(), fmt9);
            Ok(format!("{}; {}; D width ratio {ratio}", fuzzy_summary(&fz), mc_summary(&mc)))
        }
        Mode::Ingest => unreachable!("ingest does not load a problem"),
    }
}

fn run_crisp(name: Option<&str>, problem: &DistributionProblem, out: &mut Writer) -> Result<String, CliError> {
    let inst = problem.core_midpoint_instance();
    let precheck = inst.feasibility_precheck();
    let sol = inst.solve().map_err(core_err)?;
    out.write(
        "crisp_solution.json",
        &to_json_string(&json!({
            "name": name,
            "kind": "distribution",
            "status": sol.status,
            "benefit": sol.is_optimal().then_some(sol.benefit),
            "shipments": sol.is_optimal().then_some(&sol.shipments),
            "iterations": sol.iterations,
            "instance": inst,
            "precheck": precheck,
        })),
    )?;
    match sol.status {
        Status::Optimal => Ok(format!("crisp: D = {}", fmt9(sol.benefit))),
        Status::Infeasible => {
            let detail = if precheck.passed() {
                "no shipment plan meets the minimum purchase and sale bounds".to_string()
            } else {
                format!("{} bound violation(s), see crisp_solution.json", precheck.violations.len())
            };
            Err(CliError::Infeasible(detail))
        }
        Status::Unbounded => Err(CliError::Solver("LP reported unbounded".into())),
    }
}

fn run_transport(
    name: Option<&str>,
    inst: &TransportInstance,
    sense: Sense,
    out: &mut Writer,
) -> Result<String, CliError> {
    let nw = north_west_corner(inst).map_err(core_err)?;
    let vam = vogel_approximation(inst).map_err(core_err)?;
    let best = modi_optimize(inst, &vam, sense).map_err(core_err)?;
    let value = inst.cost_of(&best);
    out.write(
        "crisp_solution.json",
        &to_json_string(&json!({
            "name": name,
            "kind": "transport",
            "sense": match sense { Sense::Maximize => "maximize", Sense::Minimize => "minimize" },
            "objective": value,
            "shipments": best.shipments,
            "basis": best.basis,
            "north_west_corner_objective": inst.cost_of(&nw),
            "vogel_objective": inst.cost_of(&vam),
        })),
    )?;
    Ok(format!("transport: objective = {}", fmt9(value)))
}

fn fuzzy(config: &RunConfig, problem: &DistributionProblem) -> Result<FuzzySolution, CliError> {
    let grid = AlphaGrid::uniform(config.alpha_levels).map_err(|e| CliError::Config(e.to_string()))?;
    let sol = solve_fuzzy(problem, &grid).map_err(core_err)?;
    if sol.levels.iter().all(|l| !l.feasible) {
        return Err(CliError::Infeasible("every alpha level is infeasible".into()));
    }
    Ok(sol)
}

fn monte_carlo(config: &RunConfig, specs: Option<&ProblemSpecs>) -> Result<McResult, CliError> {
    let specs = specs.ok_or_else(|| {
        CliError::Input("Monte Carlo needs every parameter given as a number or {mean, sigma}".into())
    })?;
    let mc = monte_carlo::run(specs, config.mc_steps, config.seed).map_err(core_err)?;
    if mc.feasible == 0 {
        return Err(CliError::Infeasible(format!("all {} Monte Carlo scenarios are infeasible", mc.steps)));
    }
    Ok(mc)
}

fn write_fuzzy(name: Option<&str>, fz: &FuzzySolution, out: &mut Writer) -> Result<(), CliError> {
    let (m, n) = (fz.wholesalers, fz.consumers);
    let labels: Vec<String> = quantities(m, n).map(|q| quantity_label(q, m, n)).collect();
    let mut csv = String::from("alpha");
    for label in &labels {
        csv.push_str(&format!(",{label}_lo,{label}_hi"));
    }
    csv.push_str(",feasible,repaired\n");
    for (k, level) in fz.levels.iter().enumerate() {
        csv.push_str(&fmt9(level.alpha));
        for q in quantities(m, n) {
            match fz.interval(k, q) {
                Some(iv) => csv.push_str(&format!(",{},{}", fmt9(iv.lo()), fmt9(iv.hi()))),
                None => csv.push_str(",,"),
            }
        }
        csv.push_str(&format!(",{},{}\n", level.feasible, level.repaired()));
    }
    out.write("fuzzy_alpha_table.csv", &csv)?;

    let mut fitted = Map::new();
    for (q, label) in quantities(m, n).zip(&labels) {
        let value = fit_trapezoid(fz, q).map_or(Value::Null, |t| json!(t));
        fitted.insert(label.clone(), value);
    }
    let repairs: Vec<Value> = fz
        .levels
        .iter()
        .filter(|l| l.repaired())
        .map(|l| {
            json!({
                "alpha": l.alpha,
                "optimistic": l.optimistic_repair,
                "pessimistic": l.pessimistic_repair,
            })
        })
        .collect();
    out.write(
        "fuzzy_quadruples.json",
        &to_json_string(&json!({
            "name": name,
            "alpha_levels": fz.levels.len(),
            "quadruples": fitted,
            "nesting_widened": fz.nesting_widened,
            "infeasible_levels": fz.levels.iter().filter(|l| !l.feasible).map(|l| l.alpha).collect::<Vec<_>>(),
            "repairs": repairs,
        })),
    )
}

fn write_monte_carlo(name: Option<&str>, mc: &McResult, out: &mut Writer) -> Result<(), CliError> {
    let (m, n) = (mc.wholesalers, mc.consumers);
    let mut stats = Map::new();
    for q in quantities(m, n) {
        let label = quantity_label(q, m, n);
        let s = mc.summary(q).expect("feasible runs carry summaries");
        out.write(&format!("mc_hist_{label}.csv"), &histogram_csv(&s.histogram))?;
        stats.insert(
            label,
            json!({
                "mean": s.mean,
                "std_dev": s.std_dev,
                "min": s.min,
                "max": s.max,
                "bins": s.histogram.counts().len(),
            }),
        );
    }
    out.write(
        "mc_summary.json",
        &to_json_string(&json!({
            "name": name,
            "steps": mc.steps,
            "seed": mc.seed,
            "feasible": mc.feasible,
            "infeasible": mc.infeasible,
            "quantities": stats,
        })),
    )
}

fn histogram_csv(h: &BinnedHistogram) -> String {
    h.to_csv_with(fmt9)
}

fn fuzzy_summary(fz: &FuzzySolution) -> String {
    let last = fz.levels.len() - 1;
    let show = |k: usize| {
        fz.levels[k]
            .benefit
            .map_or("infeasible".to_string(), |d| format!("[{}, {}]", fmt9(d.lo()), fmt9(d.hi())))
    };
    format!("fuzzy: D support {}, core {}", show(0), show(last))
}

fn mc_summary(mc: &McResult) -> String {
    let mean = mc.benefit.as_ref().map_or(f64::NAN, |s| s.mean);
    format!(
        "montecarlo: {} of {} scenarios feasible, mean D = {}",
        mc.feasible,
        mc.steps,
        fmt9(mean)
    )
}

fn run_ingest(config: &RunConfig, levels: ConfidenceLevels, out: &mut Writer) -> Result<String, CliError> {
    let path = &config.input;
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let is_histogram = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let (kind, count, cdf) = if is_histogram {
        let h = BinnedHistogram::parse_csv(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        ("histogram", h.total(), EmpiricalCdf::from_histogram(&h))
    } else {
        let s = SampleSet::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        ("samples", s.values().len() as f64, EmpiricalCdf::from_samples(&s))
    };
    let t = cdf.to_trapezoid(levels).map_err(core_err)?;
    out.write(
        "ingest_quadruple.json",
        &to_json_string(&json!({
            "schema_version": SCHEMA_VERSION,
            "source": path.file_name().map(|f| f.to_string_lossy().into_owned()),
            "kind": kind,
            "count": count,
            "gamma_core": levels.core,
            "gamma_support": levels.support,
            "quadruple": t,
        })),
    )?;
    let q = t.quadruple();
    Ok(format!(
        "ingest: ({}, {}, {}, {})",
        fmt9(q[0]),
        fmt9(q[1]),
        fmt9(q[2]),
        fmt9(q[3])
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_nine_digits() {
        assert_eq!(round9(781030.0000001), 781030.0);
        assert_eq!(round9(1.23456789012), 1.23456789);
        assert_eq!(round9(-0.0), 0.0);
        assert_eq!(round9(-1e-30), -1e-30);
        assert_eq!(fmt9(0.1 + 0.2), "0.3");
    }

    #[test]
    fn json_rounding_reaches_nested_values() {
        let s = to_json_string(&json!({"a": [1.0000000001, {"b": 2.5}], "c": -0.0}));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v, json!({"a": [1, {"b": 2.5}], "c": 0}));
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            CliError::Config(String::new()).exit_code(),
            CliError::Io {
                path: PathBuf::new(),
                source: std::io::Error::other("x"),
            }
            .exit_code(),
            CliError::Input(String::new()).exit_code(),
            CliError::Infeasible(String::new()).exit_code(),
            CliError::Solver(String::new()).exit_code(),
        ];
        let mut sorted = codes.to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), codes.len());
        assert!(codes.iter().all(|&c| c != 0));
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(Mode::Fuzzy, "p.json", "out");
        assert!(c.validate().is_ok());
        c.gamma_core = 0.95;
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
        c.gamma_core = 0.3;
        c.alpha_levels = 1;
        assert!(c.validate().is_err());
    }
}
