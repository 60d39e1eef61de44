//! Experiment registry, parameter validation and reproducible runs.

mod report;
mod runs;
pub mod selftest;

use std::collections::BTreeMap;
use std::path::PathBuf;

use chrono::Utc;

use crate::error::{LabError, Result};

pub use report::{format_real, real_json, write_atomic, Cell, ExperimentOutput, ExperimentReport, OutputFormat};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Int,
    Real,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamDefault {
    Required,
    Value(&'static str),
    /// Optional; when absent the experiment derives a value from the others.
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: ParamDefault,
    pub help: &'static str,
}

const fn required(name: &'static str, kind: ParamKind, help: &'static str) -> ParamSpec {
    ParamSpec { name, kind, default: ParamDefault::Required, help }
}

const fn optional(name: &'static str, kind: ParamKind, value: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec { name, kind, default: ParamDefault::Value(value), help }
}

const fn derived(name: &'static str, kind: ParamKind, help: &'static str) -> ParamSpec {
    ParamSpec { name, kind, default: ParamDefault::Derived, help }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Text(String),
}

impl ParamValue {
    fn parse(key: &str, kind: ParamKind, raw: &str) -> Result<Self> {
        let raw = raw.trim();
        match kind {
            ParamKind::Int => {
                if let Ok(v) = raw.parse::<i64>() {
                    return Ok(ParamValue::Int(v));
                }
                // Accept integral values written like `1e6`.
                match raw.parse::<f64>() {
                    Ok(v) if v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15 => Ok(ParamValue::Int(v as i64)),
                    _ => Err(LabError::param(key, format!("expected an integer, got {raw:?}"))),
                }
            }
            ParamKind::Real => match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(ParamValue::Real(v)),
                _ => Err(LabError::param(key, format!("expected a finite real number, got {raw:?}"))),
            },
            ParamKind::Text => {
                if raw.is_empty() {
                    Err(LabError::param(key, "must not be empty"))
                } else {
                    Ok(ParamValue::Text(raw.to_owned()))
                }
            }
        }
    }

    fn to_cell(&self) -> Cell {
        match self {
            ParamValue::Int(v) => Cell::Int(*v),
            ParamValue::Real(v) => Cell::Real(*v),
            ParamValue::Text(s) => Cell::Text(s.clone()),
        }
    }
}

/// Type-checked parameters, in declaration order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params {
    values: Vec<(String, ParamValue)>,
}

impl Params {
    fn get(&self, key: &str) -> Option<&ParamValue> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn opt_int(&self, key: &str) -> Option<i64> {
        match self.get(key) {
            Some(ParamValue::Int(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn int(&self, key: &str) -> i64 {
        self.opt_int(key).unwrap_or_else(|| panic!("integer parameter `{key}` not declared"))
    }

    /// Integer parameter constrained to `≥ min`.
    pub fn uint_min(&self, key: &str, min: u64) -> Result<u64> {
        let v = self.int(key);
        if v < 0 || (v as u64) < min {
            return Err(LabError::param(key, format!("must be at least {min}, got {v}")));
        }
        Ok(v as u64)
    }

    pub fn opt_real(&self, key: &str) -> Option<f64> {
        match self.get(key) {
            Some(ParamValue::Real(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn real(&self, key: &str) -> f64 {
        self.opt_real(key).unwrap_or_else(|| panic!("real parameter `{key}` not declared"))
    }

    /// Real parameter constrained to `≥ min`.
    pub fn real_min(&self, key: &str, min: f64) -> Result<f64> {
        let v = self.real(key);
        if v < min {
            return Err(LabError::param(key, format!("must be at least {min}, got {v}")));
        }
        Ok(v)
    }

    pub fn text(&self, key: &str) -> &str {
        match self.get(key) {
            Some(ParamValue::Text(s)) => s,
            _ => panic!("text parameter `{key}` not declared"),
        }
    }

    pub fn echo(&self) -> Vec<(String, Cell)> {
        self.values.iter().map(|(k, v)| (k.clone(), v.to_cell())).collect()
    }
}

type RunFn = fn(&Params, u64) -> Result<ExperimentOutput>;

#[derive(Debug)]
pub struct ExperimentSpec {
    pub name: &'static str,
    pub description: &'static str,
    pub params: &'static [ParamSpec],
    /// CSV header, in order.
    pub columns: &'static [&'static str],
    run: RunFn,
}

impl ExperimentSpec {
    pub fn required_params(&self) -> Vec<&'static str> {
        self.params
            .iter()
            .filter(|p| p.default == ParamDefault::Required)
            .map(|p| p.name)
            .collect()
    }

    /// Check names and types of `raw` against the declaration and fill defaults.
    pub fn validate(&self, raw: &BTreeMap<String, String>) -> Result<Params> {
        if let Some(key) = raw.keys().find(|k| !self.params.iter().any(|p| p.name == k.as_str())) {
            let known: Vec<&str> = self.params.iter().map(|p| p.name).collect();
            return Err(LabError::param(
                key.clone(),
                format!("not a parameter of {} (expected one of: {})", self.name, known.join(", ")),
            ));
        }
        let mut values = Vec::new();
        for p in self.params {
            let text = match (raw.get(p.name), p.default) {
                (Some(v), _) => v.as_str(),
                (None, ParamDefault::Value(d)) => d,
                (None, ParamDefault::Derived) => continue,
                (None, ParamDefault::Required) => {
                    return Err(LabError::param(p.name, "required parameter is missing"));
                }
            };
            values.push((p.name.to_owned(), ParamValue::parse(p.name, p.kind, text)?));
        }
        Ok(Params { values })
    }
}

static REGISTRY: &[ExperimentSpec] = &[
    ExperimentSpec {
        name: "moment-verify",
        description: "Both sides of the 2k-th moment identity over all characters, with optional random-model estimate",
        params: &[
            required("q", ParamKind::Int, "modulus"),
            required("x", ParamKind::Real, "summation length"),
            required("k", ParamKind::Int, "moment order"),
            optional("weight", ParamKind::Text, "unit", "unit | moebius | divisor | smooth:<y> | phase:<t>"),
            optional("samples", ParamKind::Int, "0", "random-model samples (0 to skip, otherwise ≥ 100)"),
        ],
        columns: &["n", "d_re", "d_im", "coprime"],
        run: runs::moment_verify,
    },
    ExperimentSpec {
        name: "conjecture1-scan",
        description: "Per-character distance between the full sum and its smooth part",
        params: &[
            required("q", ParamKind::Int, "modulus"),
            required("x", ParamKind::Real, "summation length"),
            derived("y", ParamKind::Real, "smoothness bound (default (log q + log²x)(log log q)^A)"),
            optional("A", ParamKind::Real, "1", "exponent in the default smoothness bound"),
        ],
        columns: &["index", "sum_abs", "psi_abs", "diff_abs"],
        run: runs::conjecture1_scan,
    },
    ExperimentSpec {
        name: "rho-table",
        description: "Dickman's function on a uniform grid",
        params: &[
            optional("max_u", ParamKind::Real, "10", "largest u (at most 50)"),
            optional("step", ParamKind::Real, "0.25", "grid spacing"),
        ],
        columns: &["u", "rho"],
        run: runs::rho_table,
    },
    ExperimentSpec {
        name: "delta-table",
        description: "Measured maximal character sum against the prediction shapes of each x-regime",
        params: &[
            required("q", ParamKind::Int, "modulus"),
            derived("x_max", ParamKind::Real, "largest x (default q − 1)"),
            optional("points", ParamKind::Int, "24", "number of log-spaced x values"),
            optional("c", ParamKind::Real, "1", "constant in k = [c/η·√(log q/log log q)]"),
        ],
        columns: &[
            "x",
            "delta",
            "witness",
            "sqrt_x",
            "delta_over_sqrt_x",
            "B",
            "shape_small_x",
            "tau",
            "k_mid",
            "shape_mid",
            "shape_upper_mid",
            "k_power",
            "shape_power",
        ],
        run: runs::delta_table,
    },
    ExperimentSpec {
        name: "paley-search",
        description: "Tail sums of real characters from negative discriminants in a smooth-splitting class",
        params: &[
            required("q", ParamKind::Real, "discriminants satisfy q ≤ |D| ≤ 2q"),
            optional("N", ParamKind::Real, "2", "sum up to |D|/N"),
            derived("y", ParamKind::Int, "splitting bound (default the smallest prime above (log q)/3)"),
        ],
        columns: &["d", "sum", "normalized", "paley_ratio"],
        run: runs::paley_search,
    },
    ExperimentSpec {
        name: "polya-residual",
        description: "Truncated Fourier expansion of character sums against direct summation",
        params: &[
            required("q", ParamKind::Int, "modulus"),
            derived("x", ParamKind::Real, "summation length (default ⌊q/2⌋)"),
            derived("H", ParamKind::Int, "truncation (default q)"),
        ],
        columns: &[
            "index",
            "direct_re",
            "direct_im",
            "expansion_re",
            "expansion_im",
            "residual",
            "bound_shape",
            "ratio",
        ],
        run: runs::polya_residual,
    },
    ExperimentSpec {
        name: "poisson-harness",
        description: "Poisson summation with B-spline kernels and the smoothing chain for even primitive characters",
        params: &[
            required("q", ParamKind::Int, "prime modulus"),
            optional("r", ParamKind::Int, "2", "kernel fold count (even, ≥ 2)"),
            optional("N", ParamKind::Int, "2", "X = q/(rN)"),
            optional("k", ParamKind::Int, "1", "moment order for the lower bound"),
        ],
        columns: &[
            "index",
            "lhs_re",
            "lhs_im",
            "rhs_re",
            "rhs_im",
            "gap",
            "smoothed",
            "partial_max",
            "chain_holds",
        ],
        run: runs::poisson_harness,
    },
    ExperimentSpec {
        name: "theorem9-search",
        description: "Largest real character sum over positive discriminants in a smooth-splitting class",
        params: &[
            required("q", ParamKind::Real, "discriminants satisfy q ≤ D ≤ 2q"),
            required("x", ParamKind::Real, "summation length"),
            derived("y", ParamKind::Int, "splitting bound (default the smallest prime above (log q)/3)"),
        ],
        columns: &[
            "y",
            "b",
            "scanned",
            "best_d",
            "best_sum",
            "target",
            "achieved",
            "class_violations",
            "smooth_part_mismatches",
        ],
        run: runs::theorem9,
    },
    ExperimentSpec {
        name: "round-census",
        description: "Counts of integers with exactly y distinct prime factors against asymptotic shapes",
        params: &[optional("x", ParamKind::Real, "1e6", "census bound")],
        columns: &["y", "count", "hr_shape", "hr_ratio", "asymptotic_shape", "asymptotic_ratio", "in_range"],
        run: runs::round_census,
    },
    ExperimentSpec {
        name: "smooth-vs-rho",
        description: "Density of x^{1/u}-smooth integers against Dickman's function",
        params: &[
            optional("x", ParamKind::Real, "1e6", "range"),
            optional("u_max", ParamKind::Real, "4", "largest u"),
            optional("step", ParamKind::Real, "0.5", "u spacing, starting at u = 1"),
        ],
        columns: &["u", "y", "psi", "density", "rho", "rel_dev"],
        run: runs::smooth_vs_rho,
    },
    ExperimentSpec {
        name: "model-tail",
        description: "Random-model moments of the non-smooth part of Σ X_n (reported, not asserted)",
        params: &[
            required("x", ParamKind::Real, "summation length"),
            required("y", ParamKind::Real, "smoothness bound"),
            optional("k", ParamKind::Int, "2", "moment order"),
            optional("samples", ParamKind::Int, "1000", "number of samples (≥ 100)"),
        ],
        columns: &["ell", "count", "moment_root"],
        run: runs::model_tail,
    },
];

pub fn registry() -> &'static [ExperimentSpec] {
    REGISTRY
}

/// `(name, description, required params)` for every experiment, in registry order.
pub fn list_experiments() -> Vec<(&'static str, &'static str, Vec<&'static str>)> {
    REGISTRY
        .iter()
        .map(|e| (e.name, e.description, e.required_params()))
        .collect()
}

pub fn find_experiment(name: &str) -> Result<&'static ExperimentSpec> {
    REGISTRY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| LabError::UnknownExperiment(name.to_owned()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    /// Raw values, type-checked by [`ExperimentConfig::validate`].
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>) -> Self {
        ExperimentConfig {
            name: name.into(),
            params: BTreeMap::new(),
            seed: 0,
            output_dir: PathBuf::from("."),
            format: OutputFormat::Csv,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn output_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.output_dir = dir.into();
        self
    }

    pub fn format(mut self, format: OutputFormat) -> Self {
        self.format = format;
        self
    }

    pub fn validate(&self) -> Result<(&'static ExperimentSpec, Params)> {
        let spec = find_experiment(&self.name)?;
        let params = spec.validate(&self.params)?;
        Ok((spec, params))
    }
}

/// Validate and run, without writing anything.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let (spec, params) = config.validate()?;
    let started_at = Utc::now();
    let output = (spec.run)(&params, config.seed)?;
    debug_assert_eq!(output.columns, spec.columns);
    Ok(ExperimentReport {
        experiment: spec.name.to_owned(),
        params: params.echo(),
        seed: config.seed,
        version: VERSION.to_owned(),
        started_at,
        finished_at: Utc::now(),
        output,
    })
}

/// Run and persist to `config.output_dir`; returns the report and the data files written.
pub fn execute(config: &ExperimentConfig) -> Result<(ExperimentReport, Vec<PathBuf>)> {
    let report = run_experiment(config)?;
    let files = report.write(&config.output_dir, config.format)?;
    Ok((report, files))
}

/// JSON Schema for the report files.
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");
