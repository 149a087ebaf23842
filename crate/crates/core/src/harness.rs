//! Batch verification sweeps.
//!
//! A [`SweepConfig`] lists generator templates; each template expands into
//! `count` work items `(template, index)` whose matrix seed is
//! [`derive_seed`]`(seed, template, index)`. Items run on a fixed-size
//! worker pool and their reports are merged in item order, so a replayed
//! config yields the same [`SweepReport`] for any number of workers.
//!
//! Config example:
//!
//! ```json
//! {
//!   "seed": 7,
//!   "bounds": ["all"],
//!   "generators": [
//!     {"kind": "ginibre", "dims": [2, 3, 4], "count": 30},
//!     {"kind": "named", "tag": "ex_2_11"}
//!   ]
//! }
//! ```

use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    evaluate_primitive_check, radius_bound_instances, BoundContext, BoundId, BoundParams, BoundReport,
    EvalOptions, PrimitiveOperands, Tolerance, CATALOG_VERSION, DEFAULT_R_VALUES,
};
use crate::error::{Error, Result};
use crate::generators::{derive_seed, generate, GeneratorKind, GeneratorSpec, NamedExample, SampleStream};
use crate::linalg::{abs_value, ComplexMatrix};
use crate::sphere::{OptOptions, OracleMode};

/// Environment variable overriding [`SweepConfig::threads`].
pub const THREADS_ENV: &str = "RADIUS_LAB_THREADS";

/// Exponents used for the `norm_power` instances derived from each matrix.
pub const NORM_POWER_R_VALUES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// Entry of the `bounds` list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BoundSelector {
    /// Every radius bound and every primitive.
    All,
    Radius,
    Primitives,
    One(BoundId),
}

impl BoundSelector {
    fn covers(&self, id: BoundId) -> bool {
        match self {
            BoundSelector::All => true,
            BoundSelector::Radius => !id.is_primitive(),
            BoundSelector::Primitives => id.is_primitive(),
            BoundSelector::One(x) => *x == id,
        }
    }
}

impl FromStr for BoundSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => BoundSelector::All,
            "radius" => BoundSelector::Radius,
            "primitives" => BoundSelector::Primitives,
            id => BoundSelector::One(id.parse()?),
        })
    }
}

impl TryFrom<String> for BoundSelector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Display for BoundSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundSelector::All => f.write_str("all"),
            BoundSelector::Radius => f.write_str("radius"),
            BoundSelector::Primitives => f.write_str("primitives"),
            BoundSelector::One(id) => f.write_str(id.as_str()),
        }
    }
}

impl From<BoundSelector> for String {
    fn from(b: BoundSelector) -> String {
        b.to_string()
    }
}

/// One generator template: `count` matrices of `kind`, with dimensions
/// cycling through `dims`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorTemplate {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dims: Vec<usize>,
    #[serde(default = "one")]
    pub count: usize,
    /// Fixture name for `kind = "named"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

fn one() -> usize {
    1
}

impl GeneratorTemplate {
    pub fn random(kind: &str, dims: impl IntoIterator<Item = usize>, count: usize) -> Self {
        Self {
            kind: kind.to_string(),
            dims: dims.into_iter().collect(),
            count,
            tag: None,
        }
    }

    pub fn named(tag: &str) -> Self {
        Self {
            kind: "named".into(),
            dims: Vec::new(),
            count: 1,
            tag: Some(tag.to_string()),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.kind == "named" {
            let tag = self.tag.as_deref().ok_or_else(|| Error::Config("named generator needs a `tag`".into()))?;
            tag.parse::<NamedExample>().map_err(|e| Error::Config(e.to_string()))?;
            return Ok(());
        }
        let kind = GeneratorKind::parse_random(&self.kind).map_err(|e| Error::Config(e.to_string()))?;
        if self.tag.is_some() {
            return Err(Error::Config(format!("`tag` is only valid for named generators, not `{}`", self.kind)));
        }
        if self.count > 0 && self.dims.is_empty() {
            return Err(Error::Config(format!("generator `{}` needs a non-empty `dims` list", self.kind)));
        }
        for &d in &self.dims {
            let ok = match kind {
                GeneratorKind::UpperTriangular2x2 | GeneratorKind::Nilpotent2x2 => d == 2,
                _ => d >= 1,
            };
            if !ok {
                return Err(Error::Config(format!("dimension {d} is not valid for `{}`", self.kind)));
            }
        }
        Ok(())
    }

    fn spec(&self, master: u64, template: usize, index: usize) -> GeneratorSpec {
        if self.kind == "named" {
            let tag = self.tag.as_deref().expect("validated");
            return GeneratorSpec::named(tag.parse().expect("validated"));
        }
        let kind = GeneratorKind::parse_random(&self.kind).expect("validated");
        let dim = self.dims[index % self.dims.len()];
        GeneratorSpec::new(kind, dim, derive_seed(master, template as u64, index as u64))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleSetting {
    Auto,
    Always,
    Never,
}

/// Optimizer settings used for the sphere infima inside a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub oracle: OracleSetting,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 8,
            max_iters: 500,
            grad_tol: 1e-9,
            oracle: OracleSetting::Never,
        }
    }
}

impl OptimizerConfig {
    fn options(&self, seed: u64) -> OptOptions {
        OptOptions {
            starts: self.starts,
            seed,
            grad_tol: self.grad_tol,
            max_iters: self.max_iters,
            oracle: match self.oracle {
                OracleSetting::Auto => OracleMode::Auto,
                OracleSetting::Always => OracleMode::Always,
                OracleSetting::Never => OracleMode::Never,
            },
            oracle_resolution: None,
        }
    }
}

fn default_bounds() -> Vec<BoundSelector> {
    vec![BoundSelector::All]
}

fn default_r_values() -> Vec<f64> {
    DEFAULT_R_VALUES.to_vec()
}

fn default_radius_tol() -> f64 {
    1e-12
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub seed: u64,
    /// Worker count; `None` uses all cores. Overridden by `RADIUS_LAB_THREADS`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "default_bounds")]
    pub bounds: Vec<BoundSelector>,
    #[serde(default = "default_r_values")]
    pub r_values: Vec<f64>,
    #[serde(default)]
    pub tolerance: Tolerance,
    #[serde(default = "default_radius_tol")]
    pub radius_tol: f64,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub generators: Vec<GeneratorTemplate>,
}

impl Default for SweepConfig {
    /// 1000 Ginibre matrices with `n` cycling through 2..=8, every bound.
    fn default() -> Self {
        Self {
            seed: 0,
            threads: None,
            output: None,
            bounds: default_bounds(),
            r_values: default_r_values(),
            tolerance: Tolerance::default(),
            radius_tol: default_radius_tol(),
            optimizer: OptimizerConfig::default(),
            generators: vec![GeneratorTemplate::random("ginibre", 2..=8, 1000)],
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SweepConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Config(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.generators {
            t.validate()?;
        }
        if self.r_values.iter().any(|r| !(1.0..=2.0).contains(r)) {
            return Err(Error::Config("r_values must lie in [1, 2]".into()));
        }
        if !(self.radius_tol > 0.0) {
            return Err(Error::Config("radius_tol must be positive".into()));
        }
        if !(self.tolerance.abs >= 0.0 && self.tolerance.rel >= 0.0) {
            return Err(Error::Config("tolerances must be non-negative".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.optimizer.starts == 0 {
            return Err(Error::Config("optimizer.starts must be at least 1".into()));
        }
        Ok(())
    }

    fn selected(&self, id: BoundId) -> bool {
        self.bounds.iter().any(|b| b.covers(id))
    }

    /// Worker count after applying the environment override.
    pub fn effective_threads(&self) -> Result<Option<usize>> {
        match std::env::var(THREADS_ENV) {
            Ok(v) => {
                let n: usize = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("{THREADS_ENV}={v} is not a positive integer")))?;
                if n == 0 {
                    return Err(Error::Config(format!("{THREADS_ENV} must be at least 1")));
                }
                Ok(Some(n))
            }
            Err(_) => Ok(self.threads),
        }
    }

    fn work_items(&self) -> Vec<GeneratorSpec> {
        let mut items = Vec::new();
        for (t, template) in self.generators.iter().enumerate() {
            let count = if template.kind == "named" { template.count.min(1) } else { template.count };
            items.extend((0..count).map(|i| template.spec(self.seed, t, i)));
        }
        items
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundSummary {
    pub label: String,
    pub id: BoundId,
    pub evaluated: usize,
    pub applicable: usize,
    pub passed: usize,
    pub failed: usize,
    pub not_applicable: usize,
    /// Smallest slack among applicable evaluations.
    pub worst_slack: Option<f64>,
    pub worst_spec: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub spec: String,
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub allowance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub version: String,
    pub config: SweepConfig,
    pub samples: usize,
    pub bounds: Vec<BoundSummary>,
    pub violations: Vec<Violation>,
}

impl SweepReport {
    pub fn summary(&self, label: &str) -> Option<&BoundSummary> {
        self.bounds.iter().find(|b| b.label == label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep report serializes")
    }
}

/// Outcome of one (matrix, bound) evaluation.
enum Outcome {
    Report(BoundReport),
    Failed { id: BoundId, label: String, error: String },
}

fn sample_outcomes(config: &SweepConfig, spec: &GeneratorSpec) -> Vec<Outcome> {
    let a = match generate(spec) {
        Ok(a) => a,
        Err(e) => {
            return vec![Outcome::Failed {
                id: BoundId::Eq7Upper,
                label: "generate".into(),
                error: e.to_string(),
            }]
        }
    };
    let opts = EvalOptions {
        radius_tol: config.radius_tol,
        opt: config.optimizer.options(spec.seed),
    };
    let mut out = Vec::new();
    let wanted_radius: Vec<(BoundId, BoundParams)> = radius_bound_instances(&config.r_values)
        .into_iter()
        .filter(|(id, _)| config.selected(*id))
        .collect();
    if !wanted_radius.is_empty() {
        match BoundContext::new(&a, &opts) {
            Ok(mut ctx) => {
                ctx.set_digest(spec.to_string());
                for (id, p) in &wanted_radius {
                    out.push(match ctx.evaluate(*id, p) {
                        Ok(r) => Outcome::Report(r),
                        Err(e) => Outcome::Failed {
                            id: *id,
                            label: id.to_string(),
                            error: e.to_string(),
                        },
                    });
                }
            }
            Err(e) => {
                for (id, _) in &wanted_radius {
                    out.push(Outcome::Failed {
                        id: *id,
                        label: id.to_string(),
                        error: e.to_string(),
                    });
                }
            }
        }
    }
    for (id, operands) in primitive_instances(&a, spec.seed) {
        if !config.selected(id) {
            continue;
        }
        out.push(match evaluate_primitive_check(id, &operands, &opts) {
            Ok(mut r) => {
                r.inputs_digest = spec.to_string();
                Outcome::Report(r)
            }
            Err(e) => Outcome::Failed {
                id,
                label: id.to_string(),
                error: e.to_string(),
            },
        });
    }
    out
}

/// Lemma instances built from one matrix the way the radius bounds use
/// them: `|A|` and `|A*|` as the positive pair, `(Ax, A*x, x)` as the
/// vector family, and the ratio `⟨|A|x,x⟩ / ⟨|A*|x,x⟩` as the scalar.
pub fn primitive_instances(a: &ComplexMatrix, seed: u64) -> Vec<(BoundId, PrimitiveOperands)> {
    let mut out = Vec::new();
    let (Ok(abs_a), Ok(abs_adj)) = (abs_value(a), abs_value(&a.adjoint())) else {
        return out;
    };
    let mut stream = SampleStream::new(seed, 2);
    let x = stream.unit_vector(a.dim());
    let y = stream.unit_vector(a.dim());

    let p = abs_a.quad_form(&x).re;
    let q = abs_adj.quad_form(&x).re;
    if p > 0.0 && q > 0.0 {
        out.push((BoundId::LemLog, PrimitiveOperands::Scalar(p.max(q) / p.min(q))));
        out.push((BoundId::Zou, PrimitiveOperands::ScalarPair(p, q)));
    }
    out.push((
        BoundId::MixedSchwarz,
        PrimitiveOperands::MatrixVectors {
            a: a.clone(),
            x: x.clone(),
            y: y.clone(),
        },
    ));
    out.push((
        BoundId::NormSum,
        PrimitiveOperands::PsdPair {
            a: abs_a.clone(),
            b: abs_adj.clone(),
        },
    ));
    for r in NORM_POWER_R_VALUES {
        out.push((
            BoundId::NormPower,
            PrimitiveOperands::PsdPairPower {
                a: abs_a.clone(),
                b: abs_adj.clone(),
                r,
            },
        ));
    }
    let ax = a.mul_vec(&x);
    let adj_x = a.adjoint().mul_vec(&x);
    if ax.norm() > 0.0 {
        out.push((
            BoundId::VecCs,
            PrimitiveOperands::VectorPair {
                x: ax.clone(),
                y: x.clone(),
            },
        ));
        if adj_x.norm() > 0.0 {
            out.push((
                BoundId::GramLemma,
                PrimitiveOperands::GramFamily {
                    x: ax,
                    y: adj_x,
                    z: vec![x.clone()],
                },
            ));
        }
    }
    out.push((
        BoundId::KianLemma,
        PrimitiveOperands::Weighted {
            ops: vec![abs_a, abs_adj],
            weights: vec![0.5, 0.5],
            r: 2.0,
        },
    ));
    out
}

/// Run every (sample, bound) evaluation of `config`.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let items = config.work_items();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.effective_threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let per_item: Vec<Vec<Outcome>> =
        pool.install(|| items.par_iter().map(|spec| sample_outcomes(config, spec)).collect());

    let mut bounds: Vec<BoundSummary> = Vec::new();
    let mut violations = Vec::new();
    for (spec, outcomes) in items.iter().zip(per_item) {
        for outcome in outcomes {
            let (id, label) = match &outcome {
                Outcome::Report(r) => (r.id, r.label.clone()),
                Outcome::Failed { id, label, .. } => (*id, label.clone()),
            };
            let pos = match bounds.iter().position(|b| b.label == label) {
                Some(p) => p,
                None => {
                    bounds.push(BoundSummary {
                        label: label.clone(),
                        id,
                        evaluated: 0,
                        applicable: 0,
                        passed: 0,
                        failed: 0,
                        not_applicable: 0,
                        worst_slack: None,
                        worst_spec: None,
                    });
                    bounds.len() - 1
                }
            };
            let summary = &mut bounds[pos];
            summary.evaluated += 1;
            match outcome {
                Outcome::Failed { error, .. } => {
                    summary.failed += 1;
                    violations.push(Violation {
                        spec: spec.to_string(),
                        label,
                        lhs: f64::NAN,
                        rhs: f64::NAN,
                        slack: f64::NAN,
                        allowance: 0.0,
                        error: Some(error),
                    });
                }
                Outcome::Report(r) if !r.applicable => summary.not_applicable += 1,
                Outcome::Report(r) => {
                    summary.applicable += 1;
                    if summary.worst_slack.is_none_or(|w| r.slack < w) {
                        summary.worst_slack = Some(r.slack);
                        summary.worst_spec = Some(spec.to_string());
                    }
                    if config.tolerance.violated(&r) {
                        summary.failed += 1;
                        violations.push(Violation {
                            spec: spec.to_string(),
                            label,
                            lhs: r.lhs,
                            rhs: r.rhs,
                            slack: r.slack,
                            allowance: config.tolerance.allowance(&r),
                            error: None,
                        });
                    } else {
                        summary.passed += 1;
                    }
                }
            }
        }
    }
    Ok(SweepReport {
        version: CATALOG_VERSION.to_string(),
        config: config.clone(),
        samples: items.len(),
        bounds,
        violations,
    })
}

/// Write the report next to `path` and rename it into place.
pub fn write_report(report: &SweepReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(report.to_json().as_bytes())?;
    tmp.write_all(b"\n")?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepConfig {
        SweepConfig {
            seed: 3,
            generators: vec![
                GeneratorTemplate::random("ginibre", [2, 3], 4),
                GeneratorTemplate::random("normal", [3], 2),
                GeneratorTemplate::named("ex_2_11"),
            ],
            ..SweepConfig::default()
        }
    }

    #[test]
    fn parses_and_rejects() {
        let c = SweepConfig::from_json(r#"{"seed": 1, "bounds": ["thm29", "radius"], "generators": [{"kind": "named", "tag": "ex_3_4"}]}"#)
            .unwrap();
        assert_eq!(c.bounds, vec![BoundSelector::One(BoundId::Thm29), BoundSelector::Radius]);
        for bad in [
            r#"{"bounds": ["thm99"]}"#,
            r#"{"generators": [{"kind": "gauss", "dims": [2]}]}"#,
            r#"{"generators": [{"kind": "ginibre", "dims": []}]}"#,
            r#"{"generators": [{"kind": "nilpotent_2x2", "dims": [3]}]}"#,
            r#"{"generators": [{"kind": "named", "tag": "ex_9"}]}"#,
            r#"{"colour": 1}"#,
            r#"{"r_values": [3]}"#,
            "not json",
        ] {
            assert!(matches!(SweepConfig::from_json(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn empty_generator_list() {
        let report = run_sweep(&SweepConfig::from_json("{}").unwrap()).unwrap();
        assert_eq!(report.samples, 0);
        assert!(report.bounds.is_empty() && report.violations.is_empty());
    }

    #[test]
    fn counts_add_up() {
        let report = run_sweep(&small()).unwrap();
        assert_eq!(report.samples, 7);
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        for b in &report.bounds {
            assert_eq!(b.passed + b.failed + b.not_applicable, b.evaluated, "{}", b.label);
        }
        let thm29 = report.summary("thm29").unwrap();
        assert_eq!(thm29.evaluated, 7);
    }

    #[test]
    fn named_thm29_is_tight() {
        let config = SweepConfig {
            bounds: vec![BoundSelector::One(BoundId::Thm29)],
            generators: vec![GeneratorTemplate::named("ex_2_11")],
            ..SweepConfig::default()
        };
        let report = run_sweep(&config).unwrap();
        let s = report.summary("thm29").unwrap();
        assert!(s.worst_slack.unwrap().abs() <= 1e-8);
        assert_eq!(s.worst_spec.as_deref(), Some("named:ex_2_11"));
        assert_eq!(report.bounds.len(), 1);
    }

    #[test]
    fn thread_count_does_not_change_the_report() {
        let mut one = small();
        one.threads = Some(1);
        let mut four = small();
        four.threads = Some(4);
        let (a, b) = (run_sweep(&one).unwrap(), run_sweep(&four).unwrap());
        assert_eq!(a.bounds, b.bounds);
        assert_eq!(a.violations, b.violations);
    }

    #[test]
    fn report_is_written_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let report = run_sweep(&SweepConfig::from_json("{}").unwrap()).unwrap();
        write_report(&report, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["version"], CATALOG_VERSION);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
