//! Catalog of numerical radius inequalities and the lemmas behind them.
//!
//! Every entry evaluates to a [`BoundReport`] with `slack = rhs − lhs`; a
//! valid inequality has non-negative slack up to rounding. Matrix bounds
//! share one [`BoundContext`] per matrix so that ω(A), `|A|`, `|A*|` and the
//! sphere infima are computed once.
//!
//! Where an infimum over the sphere enters a bound, the report uses a
//! rigorous lower estimate of it, never the optimizer's value, so a
//! reported violation cannot come from an unconverged search.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{
    abs_value, hyponormality_defect, psd_eig, psd_power, spectral_norm, sqrt_psd, CVector, ComplexMatrix,
    ScalarFn, HYPONORMAL_TOL,
};
use crate::numrange::{numerical_radius, RadiusResult};
use crate::sphere::{concave_joint_range_bracket, inf_xi_variance_ratio, kian_deficiency, xi_pencil, OptOptions};

/// Tag written into every report so readers can detect catalog changes.
pub const CATALOG_VERSION: &str = "radius-lab-catalog/1";

/// Exponents used for the parametrized entries when none is given.
pub const DEFAULT_R_VALUES: [f64; 3] = [1.0, 1.5, 2.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundId {
    Eq7Lower,
    Eq7Upper,
    Eq5Kittaneh,
    Eq3Lower,
    Eq3Upper,
    Dragomir,
    HalfAbsSum,
    Thm24,
    CorPower,
    CorC1,
    CorC1Sq,
    Thm29,
    Thm31Sq,
    Thm31Lin,
    Thm35,
    LemLog,
    Zou,
    MixedSchwarz,
    NormSum,
    NormPower,
    VecCs,
    GramLemma,
    KianLemma,
}

impl BoundId {
    pub const ALL: [BoundId; 23] = [
        BoundId::Eq7Lower,
        BoundId::Eq7Upper,
        BoundId::Eq5Kittaneh,
        BoundId::Eq3Lower,
        BoundId::Eq3Upper,
        BoundId::Dragomir,
        BoundId::HalfAbsSum,
        BoundId::Thm24,
        BoundId::CorPower,
        BoundId::CorC1,
        BoundId::CorC1Sq,
        BoundId::Thm29,
        BoundId::Thm31Sq,
        BoundId::Thm31Lin,
        BoundId::Thm35,
        BoundId::LemLog,
        BoundId::Zou,
        BoundId::MixedSchwarz,
        BoundId::NormSum,
        BoundId::NormPower,
        BoundId::VecCs,
        BoundId::GramLemma,
        BoundId::KianLemma,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundId::Eq7Lower => "eq7_lower",
            BoundId::Eq7Upper => "eq7_upper",
            BoundId::Eq5Kittaneh => "eq5_kittaneh",
            BoundId::Eq3Lower => "eq3_lower",
            BoundId::Eq3Upper => "eq3_upper",
            BoundId::Dragomir => "dragomir",
            BoundId::HalfAbsSum => "half_abs_sum",
            BoundId::Thm24 => "thm24",
            BoundId::CorPower => "cor_power",
            BoundId::CorC1 => "cor_c1",
            BoundId::CorC1Sq => "cor_c1_sq",
            BoundId::Thm29 => "thm29",
            BoundId::Thm31Sq => "thm31_sq",
            BoundId::Thm31Lin => "thm31_lin",
            BoundId::Thm35 => "thm35",
            BoundId::LemLog => "lem_log",
            BoundId::Zou => "zou",
            BoundId::MixedSchwarz => "mixed_schwarz",
            BoundId::NormSum => "norm_sum",
            BoundId::NormPower => "norm_power",
            BoundId::VecCs => "vec_cs",
            BoundId::GramLemma => "gram_lemma",
            BoundId::KianLemma => "kian_lemma",
        }
    }

    /// Scalar, vector and operator lemmas, as opposed to radius bounds.
    pub fn is_primitive(&self) -> bool {
        matches!(
            self,
            BoundId::LemLog
                | BoundId::Zou
                | BoundId::MixedSchwarz
                | BoundId::NormSum
                | BoundId::NormPower
                | BoundId::VecCs
                | BoundId::GramLemma
                | BoundId::KianLemma
        )
    }

    /// Entries taking an exponent `r` (or a scalar function for `thm24`).
    pub fn is_parametrized(&self) -> bool {
        matches!(self, BoundId::Thm24 | BoundId::CorPower | BoundId::CorC1 | BoundId::CorC1Sq)
    }

    /// Entries whose hypothesis is hyponormality.
    pub fn needs_hyponormal(&self) -> bool {
        self.is_parametrized()
    }

    pub fn radius_bounds() -> impl Iterator<Item = BoundId> {
        Self::ALL.into_iter().filter(|b| !b.is_primitive())
    }

    pub fn primitives() -> impl Iterator<Item = BoundId> {
        Self::ALL.into_iter().filter(|b| b.is_primitive())
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|b| b.as_str() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown bound id `{s}`")))
    }
}

impl Serialize for BoundId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotApplicable {
    NotHyponormal,
    NotInvertible,
    ZeroMatrix,
}

impl fmt::Display for NotApplicable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NotApplicable::NotHyponormal => "not-hyponormal",
            NotApplicable::NotInvertible => "not-invertible",
            NotApplicable::ZeroMatrix => "zero-matrix",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub id: BoundId,
    /// `id` plus its parameter, e.g. `cor_power(1.5)`.
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// Homogeneity degree in `A` (primitives: 0).
    pub degree: f64,
    /// Magnitude the relative tolerance is measured against.
    pub scale: f64,
    pub applicable: bool,
    pub reason: Option<NotApplicable>,
    pub witness: BTreeMap<String, Value>,
    pub inputs_digest: String,
}

impl BoundReport {
    fn new(id: BoundId, label: String, lhs: f64, rhs: f64, degree: f64, scale: f64, digest: &str) -> Self {
        Self {
            id,
            label,
            lhs,
            rhs,
            slack: rhs - lhs,
            degree,
            scale,
            applicable: true,
            reason: None,
            witness: BTreeMap::new(),
            inputs_digest: digest.to_string(),
        }
    }

    fn not_applicable(mut self, reason: NotApplicable) -> Self {
        self.applicable = false;
        self.reason = Some(reason);
        self
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.witness.insert(key.to_string(), value);
        self
    }
}

/// Slack floor `−(abs + rel · scale)` below which a report is a violation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-8 }
    }
}

impl Tolerance {
    pub fn allowance(&self, report: &BoundReport) -> f64 {
        self.abs + self.rel * report.scale
    }

    /// True when an applicable report's slack is below the floor.
    pub fn violated(&self, report: &BoundReport) -> bool {
        report.applicable && !(report.slack >= -self.allowance(report))
    }
}

/// Parameter of the `thm24` / `cor_*` entries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    pub r: f64,
    /// Scalar function for `thm24`; defaults to `power(r)`.
    pub f: Option<ScalarFn>,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self { r: 1.0, f: None }
    }
}

impl BoundParams {
    pub fn with_r(r: f64) -> Self {
        Self { r, f: None }
    }

    fn scalar_fn(&self) -> Result<ScalarFn> {
        match self.f {
            Some(f) => Ok(f),
            None => ScalarFn::power(self.r),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    /// Absolute tolerance for every numerical radius computation.
    pub radius_tol: f64,
    pub opt: OptOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            radius_tol: 1e-12,
            opt: OptOptions::default(),
        }
    }
}

/// FNV-1a over the bit patterns of the entries.
pub fn matrix_digest(a: &ComplexMatrix) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |x: u64| {
        for byte in x.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    feed(a.dim() as u64);
    for z in a.as_dmatrix().iter() {
        feed(z.re.to_bits());
        feed(z.im.to_bits());
    }
    format!("fnv1a:{h:016x}")
}

fn vector_json(x: &CVector) -> Value {
    Value::Array(x.iter().map(|z| json!([z.re, z.im])).collect())
}

fn lazy<T: Clone>(cell: &OnceLock<T>, f: impl FnOnce() -> Result<T>) -> Result<T> {
    if let Some(v) = cell.get() {
        return Ok(v.clone());
    }
    let v = f()?;
    Ok(cell.get_or_init(|| v).clone())
}

#[derive(Clone, Debug)]
struct QuadraticInf {
    lower: f64,
    upper: f64,
    minimizer: CVector,
}

#[derive(Clone, Debug)]
struct VarianceInf {
    estimate: f64,
    lower: f64,
    certified: bool,
    minimizer: CVector,
}

/// Shared quantities for evaluating many bounds on one matrix.
pub struct BoundContext {
    a: ComplexMatrix,
    opts: EvalOptions,
    digest: String,
    norm: f64,
    radius: RadiusResult,
    abs_a: ComplexMatrix,
    abs_adj: ComplexMatrix,
    defect: f64,
    radius_sq: OnceLock<f64>,
    norm_a2: OnceLock<f64>,
    pencil: OnceLock<(f64, CVector)>,
    quadratic: OnceLock<QuadraticInf>,
    variance: OnceLock<Option<VarianceInf>>,
}

impl BoundContext {
    pub fn new(a: &ComplexMatrix, opts: &EvalOptions) -> Result<Self> {
        Ok(Self {
            digest: matrix_digest(a),
            norm: spectral_norm(a),
            radius: numerical_radius(a, opts.radius_tol)?,
            abs_a: abs_value(a)?,
            abs_adj: abs_value(&a.adjoint())?,
            defect: hyponormality_defect(a),
            a: a.clone(),
            opts: *opts,
            radius_sq: OnceLock::new(),
            norm_a2: OnceLock::new(),
            pencil: OnceLock::new(),
            quadratic: OnceLock::new(),
            variance: OnceLock::new(),
        })
    }

    /// Replace the matrix fingerprint in reports (e.g. by a generator spec).
    pub fn set_digest(&mut self, digest: impl Into<String>) {
        self.digest = digest.into();
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn omega(&self) -> f64 {
        self.radius.omega
    }

    pub fn radius(&self) -> &RadiusResult {
        &self.radius
    }

    pub fn is_hyponormal(&self) -> bool {
        self.defect >= -HYPONORMAL_TOL * self.norm * self.norm
    }

    fn omega_of_square(&self) -> Result<f64> {
        lazy(&self.radius_sq, || Ok(numerical_radius(&(&self.a * &self.a), self.opts.radius_tol)?.omega))
    }

    fn norm_of_square(&self) -> Result<f64> {
        lazy(&self.norm_a2, || Ok(spectral_norm(&(&self.a * &self.a))))
    }

    /// `ξ_{|A|}` and its minimizer.
    pub fn xi_pencil(&self) -> Result<(f64, CVector)> {
        lazy(&self.pencil, || {
            let r = xi_pencil(&self.a)?;
            Ok((r.value, r.minimizer))
        })
    }

    fn quadratic_inf(&self) -> Result<QuadraticInf> {
        lazy(&self.quadratic, || {
            let s = (&(&self.abs_a * &self.abs_a) + &(&self.abs_adj * &self.abs_adj)).hermitian_part();
            let t = (&self.abs_a + &self.abs_adj).hermitian_part();
            let tol = 1e-13 * spectral_norm(&s).max(1.0);
            let (lower, upper, minimizer) = concave_joint_range_bracket(&s, &t, 0.5, tol);
            // Each term of the functional is a squared modulus, so 0 is a floor.
            Ok(QuadraticInf {
                lower: lower.max(0.0),
                upper,
                minimizer,
            })
        })
    }

    fn variance_inf(&self) -> Result<Option<VarianceInf>> {
        lazy(&self.variance, || match inf_xi_variance_ratio(&self.a, &self.opts.opt) {
            Ok(r) => Ok(Some(VarianceInf {
                estimate: r.value,
                lower: r.certified_lower.unwrap_or(0.0).clamp(0.0, r.value.max(0.0)),
                certified: r.certified,
                minimizer: r.minimizer,
            })),
            Err(Error::NotInvertible { .. }) => Ok(None),
            Err(e) => Err(e),
        })
    }

    fn report(&self, id: BoundId, label: String, lhs: f64, rhs: f64, degree: f64) -> BoundReport {
        let scale = self.norm.powf(degree).max(1.0);
        BoundReport::new(id, label, lhs, rhs, degree, scale, &self.digest)
    }

    fn refinement_factor(&self) -> Result<(f64, f64)> {
        let (xi, _) = self.xi_pencil()?;
        Ok((xi, 1.0 + xi * xi / 8.0))
    }

    /// Evaluate one radius bound.
    pub fn evaluate(&self, id: BoundId, params: &BoundParams) -> Result<BoundReport> {
        if id.is_primitive() {
            return Err(Error::InvalidArgument(format!("`{id}` is a primitive check, not a radius bound")));
        }
        let omega = self.omega();
        let norm = self.norm;
        let r = params.r;
        let label = if id == BoundId::Thm24 {
            format!("{id}({})", params.scalar_fn()?)
        } else if id.is_parametrized() {
            if !(1.0..=2.0).contains(&r) {
                return Err(Error::BadExponent(r));
            }
            format!("{id}({r})")
        } else {
            id.to_string()
        };
        let report = match id {
            BoundId::Eq7Lower => self.report(id, label, 0.5 * norm, omega, 1.0),
            BoundId::Eq7Upper => self.report(id, label, omega, norm, 1.0),
            BoundId::Eq5Kittaneh => {
                let rhs = 0.5 * (norm + self.norm_of_square()?.sqrt());
                self.report(id, label, omega, rhs, 1.0)
            }
            BoundId::Eq3Lower | BoundId::Eq3Upper => {
                let s = spectral_norm(&(&(&self.abs_a * &self.abs_a) + &(&self.abs_adj * &self.abs_adj)));
                if id == BoundId::Eq3Lower {
                    self.report(id, label, 0.25 * s, omega * omega, 2.0)
                } else {
                    self.report(id, label, omega * omega, 0.5 * s, 2.0)
                }
            }
            BoundId::Dragomir => {
                let rhs = 0.5 * (self.omega_of_square()? + norm * norm);
                self.report(id, label, omega * omega, rhs, 2.0)
            }
            BoundId::HalfAbsSum => {
                let rhs = 0.5 * spectral_norm(&(&self.abs_a + &self.abs_adj));
                self.report(id, label, omega, rhs, 1.0)
            }
            BoundId::Thm24 | BoundId::CorPower | BoundId::CorC1 | BoundId::CorC1Sq => {
                return self.hyponormal_family(id, label, params);
            }
            BoundId::Thm29 => {
                let s = spectral_norm(&(&(&self.abs_a * &self.abs_a) + &(&self.abs_adj * &self.abs_adj)));
                let q = self.quadratic_inf()?;
                self.report(id, label, omega * omega, 0.5 * (s - q.lower), 2.0)
                    .with("inf_xi_lower", json!(q.lower))
                    .with("inf_xi_upper", json!(q.upper))
                    .with("inf_xi_certified", json!(q.upper - q.lower <= 1e-9 * s.max(1.0)))
                    .with("minimizer", vector_json(&q.minimizer))
            }
            BoundId::Thm31Sq | BoundId::Thm31Lin => {
                if self.a.is_zero() {
                    return Ok(self.report(id, label, 0.0, 0.0, 1.0).not_applicable(NotApplicable::ZeroMatrix));
                }
                let d = self.distance_to_norm_identity();
                let lhs = if id == BoundId::Thm31Sq {
                    norm * (1.0 - 0.5 * d * d)
                } else {
                    norm * (1.0 - 0.5 * d)
                };
                self.report(id, label, lhs, omega, 1.0).with("distance", json!(d))
            }
            BoundId::Thm35 => match self.variance_inf()? {
                None => self
                    .report(id, label, omega * omega, norm * norm, 2.0)
                    .not_applicable(NotApplicable::NotInvertible),
                Some(v) => self
                    .report(id, label, v.lower * v.lower + omega * omega, norm * norm, 2.0)
                    .with("inf_xi_estimate", json!(v.estimate))
                    .with("inf_xi_lower", json!(v.lower))
                    .with("inf_xi_certified", json!(v.certified))
                    .with("minimizer", vector_json(&v.minimizer)),
            },
            _ => unreachable!(),
        };
        Ok(self.dress(report))
    }

    fn dress(&self, report: BoundReport) -> BoundReport {
        let report = report
            .with("theta_star", json!(self.radius.theta_star))
            .with("omega_certified_error", json!(self.radius.certified_error));
        if self.radius.witness.is_some() {
            report
        } else {
            report.with("zero_matrix", json!(true))
        }
    }

    /// `‖I − A/‖A‖‖`.
    pub fn distance_to_norm_identity(&self) -> f64 {
        let n = self.a.dim();
        spectral_norm(&(&ComplexMatrix::identity(n) - &self.a.scale_real(1.0 / self.norm)))
    }

    fn hyponormal_family(&self, id: BoundId, label: String, params: &BoundParams) -> Result<BoundReport> {
        let f = params.scalar_fn()?;
        let r = if id == BoundId::Thm24 { f.exponent() } else { params.r };
        if self.a.is_zero() {
            return Ok(self.report(id, label, 0.0, 0.0, r).not_applicable(NotApplicable::ZeroMatrix));
        }
        let omega = self.omega();
        let (xi, factor) = self.refinement_factor()?;
        let (lhs, rhs) = match id {
            BoundId::Thm24 => {
                let c = 1.0 / factor;
                let fa = psd_eig(&self.abs_a.scale_real(c))?.map_spectrum(|t| f.eval(t));
                let fb = psd_eig(&self.abs_adj.scale_real(c))?.map_spectrum(|t| f.eval(t));
                (f.eval(omega), 0.5 * spectral_norm(&(&fa + &fb)))
            }
            BoundId::CorPower => {
                let sum = &psd_power(&self.abs_a, r)? + &psd_power(&self.abs_adj, r)?;
                (omega.powf(r), spectral_norm(&sum) / (2.0 * factor.powf(r)))
            }
            BoundId::CorC1 => {
                let mixed = &psd_power(&self.abs_a, 0.5 * r)? * &psd_power(&self.abs_adj, 0.5 * r)?;
                (
                    omega.powf(r),
                    (self.norm.powf(r) + spectral_norm(&mixed)) / (2.0 * factor.powf(r)),
                )
            }
            BoundId::CorC1Sq => (
                omega.powf(r),
                (self.norm.powf(r) + self.norm_of_square()?.powf(0.5 * r)) / (2.0 * factor.powf(r)),
            ),
            _ => unreachable!(),
        };
        let report = self
            .report(id, label, lhs, rhs, r)
            .with("xi_pencil", json!(xi))
            .with("hyponormality_defect", json!(self.defect));
        let report = if self.is_hyponormal() {
            report
        } else {
            report.not_applicable(NotApplicable::NotHyponormal)
        };
        Ok(self.dress(report))
    }
}

/// One-shot evaluation of a radius bound.
pub fn evaluate_radius_bound(a: &ComplexMatrix, id: BoundId, params: &BoundParams, opts: &EvalOptions) -> Result<BoundReport> {
    BoundContext::new(a, opts)?.evaluate(id, params)
}

/// Every radius bound, with the parametrized entries at each of `r_values`.
pub fn radius_bound_instances(r_values: &[f64]) -> Vec<(BoundId, BoundParams)> {
    let mut out = Vec::new();
    for id in BoundId::radius_bounds() {
        if id.is_parametrized() {
            out.extend(r_values.iter().map(|&r| (id, BoundParams::with_r(r))));
        } else {
            out.push((id, BoundParams::default()));
        }
    }
    out
}

/// Inputs for [`evaluate_primitive_check`].
#[derive(Clone, Debug)]
pub enum PrimitiveOperands {
    /// `lem_log`: α ≥ 1.
    Scalar(f64),
    /// `zou`: a, b > 0.
    ScalarPair(f64, f64),
    /// `mixed_schwarz`: any `A`, vectors `x`, `y`.
    MatrixVectors { a: ComplexMatrix, x: CVector, y: CVector },
    /// `norm_sum`: PSD `A`, `B`.
    PsdPair { a: ComplexMatrix, b: ComplexMatrix },
    /// `norm_power`: PSD `A`, `B`, `0 ≤ r ≤ 1`.
    PsdPairPower { a: ComplexMatrix, b: ComplexMatrix, r: f64 },
    /// `vec_cs`: nonzero `x`, `y`.
    VectorPair { x: CVector, y: CVector },
    /// `gram_lemma`: nonzero `x`, `y`, `zᵢ` with `⟨zⱼ, zᵢ⟩ ≠ 0`.
    GramFamily { x: CVector, y: CVector, z: Vec<CVector> },
    /// `kian_lemma`: PSD `Aᵢ`, weights summing to 1, `r ≥ 2`.
    Weighted { ops: Vec<ComplexMatrix>, weights: Vec<f64>, r: f64 },
}

fn operand_error(id: BoundId, msg: impl fmt::Display) -> Error {
    Error::OperandError(format!("{id}: {msg}"))
}

fn require_psd(id: BoundId, m: &ComplexMatrix) -> Result<()> {
    psd_eig(m).map(|_| ()).map_err(|e| operand_error(id, e))
}

fn require_nonzero(id: BoundId, x: &CVector) -> Result<()> {
    if x.norm() == 0.0 || !x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(operand_error(id, "vectors must be finite and nonzero"));
    }
    Ok(())
}

fn require_dims(id: BoundId, n: usize, vs: &[&CVector]) -> Result<()> {
    if vs.iter().any(|v| v.len() != n) {
        return Err(operand_error(id, format!("vectors must have length {n}")));
    }
    Ok(())
}

/// Inner product, linear in the first slot: `⟨x, y⟩ = Σ xᵢ ȳᵢ`.
fn inner(x: &CVector, y: &CVector) -> Complex64 {
    y.dotc(x)
}

/// Evaluate a scalar, vector or operator lemma.
pub fn evaluate_primitive_check(id: BoundId, operands: &PrimitiveOperands, opts: &EvalOptions) -> Result<BoundReport> {
    let mismatch = || operand_error(id, "operands of the wrong shape");
    let primitive = |label: String, lhs: f64, rhs: f64, digest: String| {
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        BoundReport::new(id, label, lhs, rhs, 0.0, scale, &digest)
    };
    let report = match (id, operands) {
        (BoundId::LemLog, &PrimitiveOperands::Scalar(alpha)) => {
            if !(alpha >= 1.0) || !alpha.is_finite() {
                return Err(operand_error(id, format!("alpha = {alpha} must be a finite number ≥ 1")));
            }
            primitive(id.to_string(), (alpha - 1.0) / (alpha + 1.0), alpha.ln(), format!("alpha={alpha}"))
        }
        (BoundId::Zou, &PrimitiveOperands::ScalarPair(a, b)) => {
            if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
                return Err(operand_error(id, format!("a = {a}, b = {b} must be positive")));
            }
            let log_ratio = a.ln() - b.ln();
            let lhs = (1.0 + log_ratio * log_ratio / 8.0) * (a * b).sqrt();
            primitive(id.to_string(), lhs, 0.5 * (a + b), format!("a={a},b={b}"))
        }
        (BoundId::MixedSchwarz, PrimitiveOperands::MatrixVectors { a, x, y }) => {
            require_dims(id, a.dim(), &[x, y])?;
            let abs_a = abs_value(a)?;
            let abs_adj = abs_value(&a.adjoint())?;
            let lhs = inner(&a.mul_vec(x), y).norm();
            let rhs = (abs_a.quad_form(x).re.max(0.0) * abs_adj.quad_form(y).re.max(0.0)).sqrt();
            primitive(id.to_string(), lhs, rhs, matrix_digest(a))
        }
        (BoundId::NormSum, PrimitiveOperands::PsdPair { a, b }) => {
            require_psd(id, a)?;
            require_psd(id, b)?;
            if a.dim() != b.dim() {
                return Err(mismatch());
            }
            let lhs = spectral_norm(&(a + b));
            let mixed = &sqrt_psd(a)? * &sqrt_psd(b)?;
            let rhs = spectral_norm(a).max(spectral_norm(b)) + spectral_norm(&mixed);
            primitive(id.to_string(), lhs, rhs, matrix_digest(&(a + b)))
        }
        (BoundId::NormPower, PrimitiveOperands::PsdPairPower { a, b, r }) => {
            require_psd(id, a)?;
            require_psd(id, b)?;
            if a.dim() != b.dim() {
                return Err(mismatch());
            }
            if !(0.0..=1.0).contains(r) {
                return Err(operand_error(id, format!("r = {r} must lie in [0, 1]")));
            }
            let lhs = spectral_norm(&(&psd_power(a, *r)? * &psd_power(b, *r)?));
            let rhs = spectral_norm(&(a * b)).powf(*r);
            primitive(format!("{id}({r})"), lhs, rhs, matrix_digest(&(a * b)))
        }
        (BoundId::VecCs, PrimitiveOperands::VectorPair { x, y }) => {
            require_nonzero(id, x)?;
            require_nonzero(id, y)?;
            require_dims(id, x.len(), &[y])?;
            let (nx, ny) = (x.norm(), y.norm());
            let diff = (x * Complex64::new(1.0 / nx, 0.0) - y * Complex64::new(1.0 / ny, 0.0)).norm();
            let lhs = 1.0 - 0.5 * diff * diff;
            let rhs = inner(x, y).norm() / (nx * ny);
            primitive(id.to_string(), lhs, rhs, format!("dim={}", x.len()))
        }
        (BoundId::GramLemma, PrimitiveOperands::GramFamily { x, y, z }) => {
            require_nonzero(id, x)?;
            require_nonzero(id, y)?;
            if z.is_empty() {
                return Err(operand_error(id, "at least one z vector is required"));
            }
            require_dims(id, x.len(), &[y])?;
            for zi in z {
                require_nonzero(id, zi)?;
                require_dims(id, x.len(), &[zi])?;
            }
            let gram: Vec<Vec<f64>> = z.iter().map(|zi| z.iter().map(|zj| inner(zj, zi).norm()).collect()).collect();
            if gram.iter().flatten().any(|&g| g == 0.0) {
                return Err(operand_error(id, "the z vectors must have nonzero pairwise inner products"));
            }
            let mut u = x.clone();
            let mut removed = 0.0;
            for (i, zi) in z.iter().enumerate() {
                let row: f64 = gram[i].iter().sum();
                let c = inner(x, zi);
                u -= zi * (c / row);
                removed += c.norm_sqr() / row;
            }
            let lhs = inner(&u, y).norm_sqr();
            let rhs = y.norm_squared() * (x.norm_squared() - removed);
            primitive(id.to_string(), lhs, rhs, format!("dim={},n={}", x.len(), z.len()))
        }
        (BoundId::KianLemma, PrimitiveOperands::Weighted { ops, weights, r }) => {
            let deficiency = kian_deficiency(ops, weights, *r, &opts.opt).map_err(|e| match e {
                Error::WeightError(_) | Error::BadExponent(_) | Error::NotPsd { .. } | Error::DimensionMismatch { .. } => {
                    operand_error(id, e)
                }
                other => other,
            })?;
            let n = ops[0].dim();
            let mut mean = ComplexMatrix::zeros(n);
            let mut mean_pow = ComplexMatrix::zeros(n);
            for (op, &w) in ops.iter().zip(weights) {
                mean = &mean + &op.scale_real(w);
                mean_pow = &mean_pow + &psd_power(op, *r)?.scale_real(w);
            }
            let lower = deficiency.certified_lower.unwrap_or(0.0).clamp(0.0, deficiency.value.max(0.0));
            let lhs = spectral_norm(&mean).powf(*r);
            let rhs = spectral_norm(&mean_pow) - lower;
            primitive(format!("{id}({r})"), lhs, rhs, matrix_digest(&mean))
                .with("inf_deficiency_estimate", json!(deficiency.value))
                .with("inf_deficiency_lower", json!(lower))
                .with("inf_deficiency_certified", json!(deficiency.certified))
        }
        (id, _) if !id.is_primitive() => {
            return Err(Error::InvalidArgument(format!("`{id}` is a radius bound, not a primitive check")));
        }
        _ => return Err(mismatch()),
    };
    Ok(report)
}

/// Result of one refinement ordering in [`verify_chain`].
#[derive(Clone, Debug, Serialize)]
pub struct OrderingCheck {
    pub name: String,
    pub smaller: f64,
    pub larger: f64,
    pub applicable: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub reports: Vec<BoundReport>,
    pub orderings: Vec<OrderingCheck>,
}

fn find<'a>(reports: &'a [BoundReport], label: &str) -> &'a BoundReport {
    reports.iter().find(|r| r.label == label).expect("catalog entry evaluated")
}

/// Evaluate every radius bound on `A` and check the refinement orderings:
///
/// 1. `rhs(thm29) ≤ rhs(eq3_upper)`;
/// 2. when `‖A − ‖A‖I‖ ≤ ‖A‖`, both `thm31` lower bounds are at least
///    `lhs(eq7_lower)`;
/// 3. for hyponormal `A`, `rhs(cor_power(1)) ≤ rhs(half_abs_sum)`;
/// 4. `rhs(cor_power(r)) ≤ rhs(cor_c1(r)) ≤ rhs(cor_c1_sq(r))`.
pub fn verify_chain(a: &ComplexMatrix, r_values: &[f64], opts: &EvalOptions, tol: &Tolerance) -> Result<ChainReport> {
    if a.is_zero() {
        return Err(Error::DegenerateInput("verify_chain needs a nonzero matrix"));
    }
    let ctx = BoundContext::new(a, opts)?;
    let mut rs: Vec<f64> = r_values.to_vec();
    if !rs.contains(&1.0) {
        rs.insert(0, 1.0);
    }
    let reports = radius_bound_instances(&rs)
        .into_iter()
        .map(|(id, p)| ctx.evaluate(id, &p))
        .collect::<Result<Vec<_>>>()?;
    let slack_allowance = |deg: f64| tol.abs + tol.rel * ctx.norm().powf(deg).max(1.0);
    let check = |name: String, smaller: f64, larger: f64, applicable: bool, deg: f64| OrderingCheck {
        name,
        smaller,
        larger,
        applicable,
        holds: smaller <= larger + slack_allowance(deg),
    };
    let mut orderings = vec![check(
        "thm29_refines_eq3_upper".into(),
        find(&reports, "thm29").rhs,
        find(&reports, "eq3_upper").rhs,
        true,
        2.0,
    )];
    let near_norm = ctx.distance_to_norm_identity() <= 1.0;
    for variant in ["thm31_sq", "thm31_lin"] {
        orderings.push(check(
            format!("{variant}_refines_eq7_lower"),
            find(&reports, "eq7_lower").lhs,
            find(&reports, variant).lhs,
            near_norm,
            1.0,
        ));
    }
    orderings.push(check(
        "cor_power_refines_half_abs_sum".into(),
        find(&reports, "cor_power(1)").rhs,
        find(&reports, "half_abs_sum").rhs,
        ctx.is_hyponormal(),
        1.0,
    ));
    for &r in &rs {
        let power = find(&reports, &format!("cor_power({r})")).rhs;
        let c1 = find(&reports, &format!("cor_c1({r})")).rhs;
        let c1_sq = find(&reports, &format!("cor_c1_sq({r})")).rhs;
        orderings.push(check(format!("cor_power_refines_cor_c1({r})"), power, c1, true, r));
        orderings.push(check(format!("cor_c1_refines_cor_c1_sq({r})"), c1, c1_sq, true, r));
    }
    Ok(ChainReport { reports, orderings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ex_2_11() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[0.0, 0.0], &[3.0, 0.0]]).unwrap()
    }

    fn ex_3_4() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[2.0, 1.0], &[0.0, 4.0]]).unwrap()
    }

    fn eval(a: &ComplexMatrix, id: BoundId) -> BoundReport {
        evaluate_radius_bound(a, id, &BoundParams::default(), &EvalOptions::default()).unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for id in BoundId::ALL {
            assert_eq!(id.as_str().parse::<BoundId>().unwrap(), id);
        }
        assert!("thm99".parse::<BoundId>().is_err());
        assert_eq!(BoundId::radius_bounds().count(), 15);
        assert_eq!(BoundId::primitives().count(), 8);
    }

    #[test]
    fn thm31_lin_on_upper_triangular() {
        let r = eval(&ex_3_4(), BoundId::Thm31Lin);
        assert_abs_diff_eq!(r.lhs, 2.968, epsilon = 5e-3);
        assert_abs_diff_eq!(r.rhs, 4.118, epsilon = 5e-3);
        assert!(r.slack > 0.0);
        let r = eval(&ex_3_4(), BoundId::Thm31Sq);
        assert!(r.slack > 0.0 && r.lhs > 2.968);
    }

    #[test]
    fn thm29_is_tight_on_nilpotent() {
        let r = eval(&ex_2_11(), BoundId::Thm29);
        assert_abs_diff_eq!(r.rhs, 2.25, epsilon = 1e-9);
        assert_abs_diff_eq!(r.lhs, 2.25, epsilon = 1e-9);
        assert!(r.slack.abs() < 1e-8);
        assert_eq!(r.witness["inf_xi_certified"], json!(true));
    }

    #[test]
    fn eq7_upper_identity() {
        let r = eval(&ComplexMatrix::identity(3), BoundId::Eq7Upper);
        assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.rhs, 1.0, epsilon = 1e-12);
        assert!(r.slack.abs() < 1e-12);
    }

    #[test]
    fn gates() {
        let r = eval(&ex_3_4(), BoundId::CorPower);
        assert!(!r.applicable);
        assert_eq!(r.reason, Some(NotApplicable::NotHyponormal));
        assert!(r.lhs.is_finite() && r.rhs.is_finite());
        let r = eval(&ex_2_11(), BoundId::Thm35);
        assert_eq!(r.reason, Some(NotApplicable::NotInvertible));
        let r = eval(&ComplexMatrix::zeros(2), BoundId::Thm31Sq);
        assert_eq!(r.reason, Some(NotApplicable::ZeroMatrix));
        let r = eval(&ComplexMatrix::zeros(2), BoundId::Eq7Upper);
        assert!(r.applicable && r.slack == 0.0);
    }

    #[test]
    fn thm24_matches_cor_power() {
        let a = ComplexMatrix::diagonal(&[Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.1)]);
        let opts = EvalOptions::default();
        let ctx = BoundContext::new(&a, &opts).unwrap();
        for r in DEFAULT_R_VALUES {
            let t = ctx.evaluate(BoundId::Thm24, &BoundParams::with_r(r)).unwrap();
            let c = ctx.evaluate(BoundId::CorPower, &BoundParams::with_r(r)).unwrap();
            assert!(t.applicable);
            assert_abs_diff_eq!(t.rhs, c.rhs, epsilon = 1e-12);
            assert_eq!(t.label, format!("thm24(power:{r})"));
        }
        assert!(ctx.evaluate(BoundId::CorC1, &BoundParams::with_r(2.5)).is_err());
        assert!(ctx.evaluate(BoundId::Zou, &BoundParams::default()).is_err());
    }

    #[test]
    fn primitive_examples() {
        let opts = EvalOptions::default();
        let r = evaluate_primitive_check(BoundId::LemLog, &PrimitiveOperands::Scalar(1.0), &opts).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (0.0, 0.0, 0.0));
        let e = std::f64::consts::E;
        let r = evaluate_primitive_check(BoundId::Zou, &PrimitiveOperands::ScalarPair(e * e, 1.0), &opts).unwrap();
        assert_abs_diff_eq!(r.lhs, 1.5 * e, epsilon = 1e-12);
        assert_abs_diff_eq!(r.rhs, (e * e + 1.0) / 2.0, epsilon = 1e-12);
        assert!(r.slack > 0.0);
        let x = CVector::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
        let r = evaluate_primitive_check(BoundId::VecCs, &PrimitiveOperands::VectorPair { x: x.clone(), y: x }, &opts).unwrap();
        assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.rhs, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn primitive_operand_errors() {
        let opts = EvalOptions::default();
        let err = |id, ops| evaluate_primitive_check(id, &ops, &opts).unwrap_err();
        assert!(matches!(err(BoundId::LemLog, PrimitiveOperands::Scalar(0.5)), Error::OperandError(_)));
        assert!(matches!(err(BoundId::Zou, PrimitiveOperands::ScalarPair(0.0, 1.0)), Error::OperandError(_)));
        let indefinite = ComplexMatrix::real_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            err(BoundId::NormSum, PrimitiveOperands::PsdPair { a: indefinite.clone(), b: indefinite }),
            Error::OperandError(_)
        ));
        let e1 = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let e2 = CVector::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(matches!(
            err(BoundId::GramLemma, PrimitiveOperands::GramFamily { x: e1.clone(), y: e1.clone(), z: vec![e1.clone(), e2] }),
            Error::OperandError(_)
        ));
        assert!(matches!(err(BoundId::Zou, PrimitiveOperands::Scalar(2.0)), Error::OperandError(_)));
        assert!(matches!(err(BoundId::Eq7Lower, PrimitiveOperands::Scalar(2.0)), Error::InvalidArgument(_)));
    }

    #[test]
    fn kian_lemma_on_diagonal_pair() {
        let ops = vec![ComplexMatrix::real_diagonal(&[3.0, 0.0]), ComplexMatrix::real_diagonal(&[0.0, 3.0])];
        let r = evaluate_primitive_check(
            BoundId::KianLemma,
            &PrimitiveOperands::Weighted { ops, weights: vec![0.5, 0.5], r: 2.0 },
            &EvalOptions::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.lhs, 2.25, epsilon = 1e-12);
        assert_abs_diff_eq!(r.rhs, 2.25, epsilon = 1e-9);
        assert_eq!(r.label, "kian_lemma(2)");
    }

    #[test]
    fn chain_examples() {
        let tol = Tolerance::default();
        let opts = EvalOptions::default();
        let chain = verify_chain(&ex_2_11(), &DEFAULT_R_VALUES, &opts, &tol).unwrap();
        let first = &chain.orderings[0];
        assert_abs_diff_eq!(first.smaller, 2.25, epsilon = 1e-9);
        assert_abs_diff_eq!(first.larger, 4.5, epsilon = 1e-9);
        assert!(chain.orderings.iter().all(|o| o.holds || !o.applicable));

        let chain = verify_chain(&ex_3_4(), &DEFAULT_R_VALUES, &opts, &tol).unwrap();
        let lin = chain.orderings.iter().find(|o| o.name == "thm31_lin_refines_eq7_lower").unwrap();
        assert!(lin.applicable && lin.holds);
        assert_abs_diff_eq!(lin.smaller, 2.079, epsilon = 5e-3);
        assert_abs_diff_eq!(lin.larger, 2.968, epsilon = 5e-3);

        let normal = ComplexMatrix::diagonal(&[Complex64::new(2.0, -1.0), Complex64::new(0.0, 3.0)]);
        let chain = verify_chain(&normal, &DEFAULT_R_VALUES, &opts, &tol).unwrap();
        let iii = chain.orderings.iter().find(|o| o.name == "cor_power_refines_half_abs_sum").unwrap();
        assert!(iii.applicable);
        assert!((iii.smaller - iii.larger).abs() <= 1e-10);
        assert!(verify_chain(&ComplexMatrix::zeros(2), &DEFAULT_R_VALUES, &opts, &tol).is_err());
    }
}
