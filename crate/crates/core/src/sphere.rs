//! Infima of phase-invariant functionals over the complex unit sphere.
//!
//! Four functionals are supported:
//!
//! * `pencil_ratio`: `⟨Px,x⟩/⟨Qx,x⟩` with `P = |A| − |A*|`, `Q = |A| + |A*|`.
//!   Its infimum is the smallest eigenvalue of the pencil `(P, Q)` on the
//!   range of `Q` and is solved directly by [`xi_pencil`].
//! * `quadratic_deviation`: `⟨(||A| − c|² + ||A*| − c|²)x,x⟩` with
//!   `c = ½⟨(|A| + |A*|)x,x⟩`.
//! * `variance_ratio`: `|⟨A²x,x⟩ − ⟨Ax,x⟩²| / ‖A*x‖`.
//! * `kian_deficiency`: `Σᵢ wᵢ ⟨|Aᵢ − m|^r x,x⟩` with `m = Σⱼ wⱼ⟨Aⱼx,x⟩`.
//!
//! The last three are minimized by multi-start projected gradient descent.
//! Two independent checks back the descent: a brute-force net over the
//! sphere modulo phase (dimension 2 and 3), and, for the two functionals
//! of the form `⟨Sx,x⟩ − κ⟨Tx,x⟩²`, an exact bracket obtained from the
//! convex joint range `W(S + iT)` on which `s − κt²` is concave.
//!
//! Gradients are real gradients on `C^n ≅ R^{2n}` stored as complex vectors,
//! `∇f = 2 ∂f/∂x̄`, of the formulas extended verbatim to non-unit `x`.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::SampleStream;
use crate::linalg::{
    abs_value, check_invertible, co_gram, general_eig, gram, hermitian_eig, normalized, psd_eig,
    spectral_norm, CVector, ComplexMatrix, HermitianEig,
};
use crate::numrange::{maximize_convex_over_range, SweepOptions};

/// Smoothing of `|N|` inside the variance-ratio gradient.
pub const VARIANCE_SMOOTHING: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionalKind {
    PencilRatio,
    QuadraticDeviation,
    VarianceRatio,
    KianDeficiency,
}

impl FunctionalKind {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionalKind::PencilRatio => "pencil_ratio",
            FunctionalKind::QuadraticDeviation => "quadratic_deviation",
            FunctionalKind::VarianceRatio => "variance_ratio",
            FunctionalKind::KianDeficiency => "kian_deficiency",
        }
    }
}

#[derive(Clone, Debug)]
enum Data {
    Pencil {
        p: ComplexMatrix,
        q: ComplexMatrix,
    },
    Quadratic {
        abs_a: ComplexMatrix,
        abs_adj: ComplexMatrix,
        /// `|A|² + |A*|²`
        s: ComplexMatrix,
        /// `|A| + |A*|`
        t: ComplexMatrix,
    },
    Variance {
        a: ComplexMatrix,
        a_adj: ComplexMatrix,
        a2: ComplexMatrix,
        a2_adj: ComplexMatrix,
        aa_adj: ComplexMatrix,
    },
    Kian {
        ops: Vec<ComplexMatrix>,
        eigs: Vec<HermitianEig>,
        weights: Vec<f64>,
        r: f64,
    },
}

/// A functional on the unit sphere of `C^n`, invariant under `x ↦ e^{iφ}x`.
#[derive(Clone, Debug)]
pub struct SphereFunctional {
    data: Data,
    dim: usize,
    lipschitz: f64,
}

fn re_dot(x: &CVector, y: &CVector) -> f64 {
    x.dotc(y).re
}

fn cr(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl SphereFunctional {
    /// `⟨(|A| − |A*|)x,x⟩ / ⟨(|A| + |A*|)x,x⟩`.
    pub fn pencil_ratio(a: &ComplexMatrix) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::DegenerateInput("pencil ratio of the zero matrix (Q = 0)"));
        }
        let abs_a = abs_value(a)?;
        let abs_adj = abs_value(&a.adjoint())?;
        let p = (&abs_a - &abs_adj).hermitian_part();
        let q = (&abs_a + &abs_adj).hermitian_part();
        let q_eig = psd_eig(&q)?;
        let q_min = q_eig.min_eigenvalue();
        let lipschitz = if q_min > 1e-12 * q_eig.max_eigenvalue() {
            2.0 * (spectral_norm(&p) + q_eig.max_eigenvalue()) / q_min
        } else {
            f64::INFINITY
        };
        Ok(Self {
            dim: a.dim(),
            data: Data::Pencil { p, q },
            lipschitz,
        })
    }

    /// Deviation functional with `c(x) = ½⟨(|A| + |A*|)x,x⟩`.
    pub fn quadratic_deviation(a: &ComplexMatrix) -> Result<Self> {
        let abs_a = abs_value(a)?;
        let abs_adj = abs_value(&a.adjoint())?;
        let s = (&gram(a) + &co_gram(a)).hermitian_part();
        let t = (&abs_a + &abs_adj).hermitian_part();
        let (ns, nt) = (spectral_norm(&s), spectral_norm(&t));
        Ok(Self {
            dim: a.dim(),
            lipschitz: 2.0 * ns + 3.0 * nt * nt,
            data: Data::Quadratic { abs_a, abs_adj, s, t },
        })
    }

    /// `|⟨A²x,x⟩ − ⟨Ax,x⟩²| / ‖A*x‖`; requires invertible `A`.
    pub fn variance_ratio(a: &ComplexMatrix) -> Result<Self> {
        let sigma_min = check_invertible(a)?;
        let a2 = a * a;
        let (na, na2) = (spectral_norm(a), spectral_norm(&a2));
        let lipschitz = 2.0 * (na2 + 2.0 * na * na) / sigma_min
            + (na2 + na * na) * na * na / sigma_min.powi(3);
        Ok(Self {
            dim: a.dim(),
            lipschitz,
            data: Data::Variance {
                a: a.clone(),
                a_adj: a.adjoint(),
                a2_adj: a2.adjoint(),
                a2,
                aa_adj: co_gram(a),
            },
        })
    }

    /// Deficiency term `Σᵢ wᵢ ⟨|Aᵢ − m(x)|^r x,x⟩`, `m(x) = Σⱼ wⱼ⟨Aⱼx,x⟩`.
    pub fn kian_deficiency(ops: &[ComplexMatrix], weights: &[f64], r: f64) -> Result<Self> {
        if ops.is_empty() || ops.len() != weights.len() {
            return Err(Error::WeightError(format!(
                "{} operators but {} weights",
                ops.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::WeightError("weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::WeightError(format!("weights sum to {total}, not 1")));
        }
        if !(r >= 2.0) || !r.is_finite() {
            return Err(Error::BadExponent(r));
        }
        let dim = ops[0].dim();
        if let Some(bad) = ops.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let eigs = ops.iter().map(psd_eig).collect::<Result<Vec<_>>>()?;
        let radius = eigs.iter().map(|e| e.max_eigenvalue()).fold(0.0, f64::max);
        Ok(Self {
            dim,
            lipschitz: 2.0 * (r + 1.0) * radius.powf(r),
            data: Data::Kian {
                ops: ops.to_vec(),
                eigs,
                weights: weights.to_vec(),
                r,
            },
        })
    }

    pub fn kind(&self) -> FunctionalKind {
        match self.data {
            Data::Pencil { .. } => FunctionalKind::PencilRatio,
            Data::Quadratic { .. } => FunctionalKind::QuadraticDeviation,
            Data::Variance { .. } => FunctionalKind::VarianceRatio,
            Data::Kian { .. } => FunctionalKind::KianDeficiency,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper bound on the Riemannian gradient norm over the sphere.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn value(&self, x: &CVector) -> f64 {
        match &self.data {
            Data::Pencil { p, q } => p.quad_form(x).re / q.quad_form(x).re,
            Data::Quadratic { s, t, .. } => {
                let nu = x.norm_squared();
                let sv = s.quad_form(x).re;
                let q = t.quad_form(x).re;
                sv - q * q + 0.5 * q * q * nu
            }
            Data::Variance { a, a2, a_adj, .. } => {
                let h1 = a.quad_form(x);
                let n = a2.quad_form(x) - h1 * h1;
                n.norm() / a_adj.mul_vec(x).norm()
            }
            Data::Kian { ops, eigs, weights, r } => {
                let m: f64 = ops
                    .iter()
                    .zip(weights)
                    .map(|(op, w)| w * op.quad_form(x).re)
                    .sum();
                let mut total = 0.0;
                for (eig, w) in eigs.iter().zip(weights) {
                    let v = eig.eigenvectors.as_dmatrix();
                    let y = v.adjoint() * x;
                    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
                        total += w * (lambda - m).abs().powf(*r) * y[k].norm_sqr();
                    }
                }
                total
            }
        }
    }

    /// Real gradient `2 ∂f/∂x̄` of the ambient formula.
    pub fn gradient(&self, x: &CVector) -> CVector {
        match &self.data {
            Data::Pencil { p, q } => {
                let qx = q.mul_vec(x);
                let px = p.mul_vec(x);
                let den = re_dot(x, &qx);
                let ratio = re_dot(x, &px) / den;
                (px - qx * cr(ratio)) * cr(2.0 / den)
            }
            Data::Quadratic { s, t, .. } => {
                let nu = x.norm_squared();
                let tx = t.mul_vec(x);
                let q = re_dot(x, &tx);
                s.mul_vec(x) * cr(2.0) + tx * cr(2.0 * q * nu - 4.0 * q) + x * cr(q * q)
            }
            Data::Variance {
                a,
                a_adj,
                a2,
                a2_adj,
                aa_adj,
            } => {
                let ax = a.mul_vec(x);
                let adj_x = a_adj.mul_vec(x);
                let h1 = x.dotc(&ax);
                let n = x.dotc(&a2.mul_vec(x)) - h1 * h1;
                let dn = a2.mul_vec(x) - &ax * (h1 * 2.0);
                let dn_conj = a2_adj.mul_vec(x) - &adj_x * (h1.conj() * 2.0);
                let d_abs2 = dn * n.conj() + dn_conj * n;
                let abs_n = (n.norm_sqr() + VARIANCE_SMOOTHING * VARIANCE_SMOOTHING).sqrt();
                let d_abs = d_abs2 * cr(0.5 / abs_n);
                let d = adj_x.norm();
                let d_d = aa_adj.mul_vec(x) * cr(0.5 / d);
                (d_abs * cr(1.0 / d) - d_d * cr(abs_n / (d * d))) * cr(2.0)
            }
            Data::Kian { ops, eigs, weights, r } => {
                let opx: Vec<CVector> = ops.iter().map(|op| op.mul_vec(x)).collect();
                let m: f64 = opx.iter().zip(weights).map(|(ax, w)| w * re_dot(x, ax)).sum();
                let grad_m = opx
                    .iter()
                    .zip(weights)
                    .fold(CVector::zeros(self.dim), |acc, (ax, w)| acc + ax * cr(2.0 * w));
                let mut coeff_m = 0.0;
                let mut direct = CVector::zeros(self.dim);
                for (eig, w) in eigs.iter().zip(weights) {
                    let v = eig.eigenvectors.as_dmatrix();
                    let mut y = v.adjoint() * x;
                    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
                        let dev = lambda - m;
                        let weight = y[k].norm_sqr();
                        coeff_m -= w * r * dev.abs().powf(r - 1.0) * dev.signum() * weight;
                        y[k] *= cr(2.0 * w * dev.abs().powf(*r));
                    }
                    direct += v * y;
                }
                grad_m * cr(coeff_m) + direct
            }
        }
    }

    /// Tangential part of the gradient at a unit vector.
    pub fn riemannian_gradient(&self, x: &CVector) -> CVector {
        let g = self.gradient(x);
        let radial = re_dot(x, &g);
        g - x * cr(radial)
    }

    /// Structured starting points: eigenvectors of the matrices that define
    /// the functional.
    pub fn context_starts(&self) -> Vec<CVector> {
        let hermitian_vectors = |m: &ComplexMatrix| -> Vec<CVector> {
            match hermitian_eig(m) {
                Ok(e) => (0..e.dim()).map(|k| e.eigenvector(k)).collect(),
                Err(_) => Vec::new(),
            }
        };
        match &self.data {
            Data::Pencil { p, q } => [p, q].into_iter().flat_map(hermitian_vectors).collect(),
            Data::Quadratic { abs_a, abs_adj, s, t } => [abs_a, abs_adj, t, s]
                .into_iter()
                .flat_map(hermitian_vectors)
                .collect(),
            Data::Variance { a, .. } => {
                let mut v = general_eig(a).map(|e| e.vectors).unwrap_or_default();
                v.extend(hermitian_vectors(&gram(a)));
                v
            }
            Data::Kian { ops, weights, .. } => {
                let mean = ops
                    .iter()
                    .zip(weights)
                    .fold(ComplexMatrix::zeros(self.dim), |acc, (op, w)| &acc + &op.scale_real(*w));
                let mut v = hermitian_vectors(&mean);
                for op in ops {
                    v.extend(hermitian_vectors(op));
                }
                v
            }
        }
    }

    /// Matrices `(S, T, κ)` with `f(x) = ⟨Sx,x⟩ − κ⟨Tx,x⟩²` on the sphere,
    /// when the functional has that shape.
    fn concave_form(&self) -> Option<(ComplexMatrix, ComplexMatrix, f64)> {
        match &self.data {
            Data::Quadratic { s, t, .. } => Some((s.clone(), t.clone(), 0.5)),
            Data::Kian { ops, weights, r, .. } if *r == 2.0 => {
                let mut s = ComplexMatrix::zeros(self.dim);
                let mut t = ComplexMatrix::zeros(self.dim);
                for (op, w) in ops.iter().zip(weights) {
                    s = &s + &(op * op).scale_real(*w);
                    t = &t + &op.scale_real(*w);
                }
                Some((s.hermitian_part(), t.hermitian_part(), 1.0))
            }
            _ => None,
        }
    }
}

/// `(||A| − c|² + ||A*| − c|²)` at `c = ½⟨(|A| + |A*|)x,x⟩`, for unit `x`.
pub fn deviation_operator(a: &ComplexMatrix, x: &CVector) -> Result<ComplexMatrix> {
    let abs_a = abs_value(a)?;
    let abs_adj = abs_value(&a.adjoint())?;
    let c = 0.5 * (&abs_a + &abs_adj).quad_form(x).re;
    let shift = ComplexMatrix::identity(a.dim()).scale_real(c);
    let d1 = &abs_a - &shift;
    let d2 = &abs_adj - &shift;
    Ok(&(&d1.adjoint() * &d1) + &(&d2.adjoint() * &d2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Run the grid oracle when `dim ≤ 3`.
    Auto,
    /// Always run it; dimensions above 3 are an error.
    Always,
    Never,
}

#[derive(Clone, Copy, Debug)]
pub struct OptOptions {
    /// Total number of descents (structured starts first, then random).
    pub starts: usize,
    pub seed: u64,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub oracle: OracleMode,
    /// Net spacing; `None` picks [`default_resolution`].
    pub oracle_resolution: Option<f64>,
}

impl Default for OptOptions {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            grad_tol: 1e-9,
            max_iters: 2000,
            oracle: OracleMode::Auto,
            oracle_resolution: None,
        }
    }
}

/// Default grid-oracle spacing by dimension.
pub fn default_resolution(dim: usize) -> f64 {
    if dim <= 2 {
        5e-3
    } else {
        0.1
    }
}

#[derive(Clone, Debug)]
pub struct SphereOptResult {
    pub minimizer: CVector,
    pub value: f64,
    pub gradient_norm: f64,
    pub starts_used: usize,
    pub iterations: usize,
    pub oracle_value: Option<f64>,
    /// Rigorous lower bound on the infimum, when one is available.
    pub certified_lower: Option<f64>,
    pub certified: bool,
}

struct Descent {
    x: CVector,
    value: f64,
    gradient_norm: f64,
    iterations: usize,
}

fn descend(f: &SphereFunctional, start: &CVector, opts: &OptOptions) -> Descent {
    let mut x = normalized(start);
    let mut fx = f.value(&x);
    let mut g = f.riemannian_gradient(&x);
    let mut gn = g.norm();
    let mut step = 1.0 / gn.max(1e-300);
    let mut iterations = 0;
    while iterations < opts.max_iters && gn > opts.grad_tol && fx.is_finite() {
        let mut t = step;
        let accepted = loop {
            let cand = normalized(&(&x - &g * cr(t)));
            let fc = f.value(&cand);
            if fc <= fx - 1e-4 * t * gn * gn {
                break Some((cand, fc));
            }
            t *= 0.5;
            if t * gn < 1e-17 {
                break None;
            }
        };
        let Some((x_new, f_new)) = accepted else { break };
        let g_new = f.riemannian_gradient(&x_new);
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = re_dot(&s, &y);
        step = if sy > 0.0 { s.norm_squared() / sy } else { 2.0 * t };
        step = step.clamp(1e-12, 1e12);
        x = x_new;
        fx = f_new;
        g = g_new;
        gn = g.norm();
        iterations += 1;
    }
    Descent {
        x,
        value: fx,
        gradient_norm: gn,
        iterations,
    }
}

/// Best local minimum over all starts. Descents run concurrently; the
/// argmin is taken in start order so the result is schedule-independent.
pub fn projected_gradient_min(f: &SphereFunctional, starts: &[CVector], opts: &OptOptions) -> Result<SphereOptResult> {
    if starts.is_empty() {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    let runs: Vec<Descent> = starts.par_iter().map(|s| descend(f, s, opts)).collect();
    let iterations = runs.iter().map(|d| d.iterations).sum();
    let best = runs
        .into_iter()
        .reduce(|best, d| if d.value < best.value || best.value.is_nan() { d } else { best })
        .expect("non-empty");
    Ok(SphereOptResult {
        minimizer: best.x,
        value: best.value,
        gradient_norm: best.gradient_norm,
        starts_used: starts.len(),
        iterations,
        oracle_value: None,
        certified_lower: None,
        certified: false,
    })
}

fn start_set(f: &SphereFunctional, opts: &OptOptions) -> Vec<CVector> {
    let total = opts.starts.max(1);
    let mut starts = f.context_starts();
    starts.truncate(total);
    let mut stream = SampleStream::new(opts.seed, 1);
    while starts.len() < total {
        starts.push(stream.unit_vector(f.dim()));
    }
    starts
}

/// Outcome of [`sphere_grid_oracle`].
#[derive(Clone, Debug)]
pub struct GridOracle {
    /// Smallest value found on the net (after local zooming).
    pub value: f64,
    pub minimizer: CVector,
    pub resolution: f64,
    /// Every sphere point lies within this path length of a net point.
    pub covering_length: f64,
    pub lipschitz: f64,
    /// `min over the uniform net − lipschitz · covering_length`.
    pub lower_bound: f64,
}

fn sphere_point(params: &[f64]) -> CVector {
    match *params {
        [t, phi] => CVector::from_vec(vec![cr(t.cos()), Complex64::from_polar(t.sin(), phi)]),
        [t1, t2, p1, p2] => CVector::from_vec(vec![
            cr(t1.cos()),
            Complex64::from_polar(t1.sin() * t2.cos(), p1),
            Complex64::from_polar(t1.sin() * t2.sin(), p2),
        ]),
        _ => unreachable!("sphere parametrization only for dim 2 and 3"),
    }
}

fn axis_points(extent: f64, res: f64, periodic: bool) -> Vec<f64> {
    if periodic {
        let n = (extent / res).ceil().max(1.0) as usize;
        (0..n).map(|k| extent * k as f64 / n as f64).collect()
    } else {
        let n = (extent / res).ceil().max(1.0) as usize;
        (0..=n).map(|k| extent * k as f64 / n as f64).collect()
    }
}

fn finite_or_inf(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Minimum of `f` over a net on the unit sphere of `C^2` or `C^3` modulo
/// global phase.
///
/// Points are written as `(cos t, e^{iφ} sin t)` in dimension 2 and
/// `(cos t₁, e^{iφ₁} sin t₁ cos t₂, e^{iφ₂} sin t₁ sin t₂)` in dimension 3,
/// with angle steps of at most `resolution`. Every coordinate curve has
/// speed at most 1, so each sphere point is reachable from the net by a
/// path of length `(#angles / 2) · resolution`. The best net points are
/// then zoomed into with successively finer local grids; this can only
/// lower `value`, while `lower_bound` stays tied to the uniform net.
pub fn sphere_grid_oracle(f: &SphereFunctional, resolution: f64) -> Result<GridOracle> {
    let dim = f.dim();
    if !(2..=3).contains(&dim) {
        return Err(Error::DimensionTooLarge(dim));
    }
    if !(resolution > 0.0) {
        return Err(Error::InvalidArgument(format!("resolution must be positive, got {resolution}")));
    }
    let axes: Vec<(Vec<f64>, bool)> = if dim == 2 {
        vec![
            (axis_points(FRAC_PI_2, resolution, false), false),
            (axis_points(TAU, resolution, true), true),
        ]
    } else {
        vec![
            (axis_points(FRAC_PI_2, resolution, false), false),
            (axis_points(FRAC_PI_2, resolution, false), false),
            (axis_points(TAU, resolution, true), true),
            (axis_points(TAU, resolution, true), true),
        ]
    };
    let sizes: Vec<usize> = axes.iter().map(|(a, _)| a.len()).collect();
    let total: usize = sizes.iter().product();
    let unravel = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0; sizes.len()];
        for d in (0..sizes.len()).rev() {
            out[d] = idx % sizes[d];
            idx /= sizes[d];
        }
        out
    };
    let params_of = |multi: &[usize]| -> Vec<f64> { multi.iter().zip(&axes).map(|(&i, (a, _))| a[i]).collect() };
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .with_min_len(1024)
        .map(|idx| finite_or_inf(f.value(&sphere_point(&params_of(&unravel(idx))))))
        .collect();

    let (best_idx, net_min) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });

    // Local minima of the net, best first.
    let strides: Vec<usize> = (0..sizes.len()).map(|d| sizes[d + 1..].iter().product()).collect();
    let mut minima: Vec<usize> = (0..total)
        .into_par_iter()
        .with_min_len(1024)
        .filter(|&idx| {
            let v = values[idx];
            if !v.is_finite() {
                return false;
            }
            let multi = unravel(idx);
            (0..sizes.len()).all(|d| {
                let (n, periodic) = (sizes[d], axes[d].1);
                [-1i64, 1].iter().all(|&step| {
                    let j = multi[d] as i64 + step;
                    let j = if periodic {
                        j.rem_euclid(n as i64)
                    } else if j < 0 || j >= n as i64 {
                        return true;
                    } else {
                        j
                    };
                    let neighbour = idx as i64 + (j - multi[d] as i64) * strides[d] as i64;
                    v <= values[neighbour as usize]
                })
            })
        })
        .collect();
    minima.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    minima.truncate(8);
    if minima.is_empty() {
        minima.push(best_idx);
    }

    let zoomed: Vec<(f64, Vec<f64>)> = minima
        .par_iter()
        .map(|&idx| zoom(f, params_of(&unravel(idx)), values[idx], resolution))
        .collect();
    let (mut value, mut params) = (net_min, params_of(&unravel(best_idx)));
    for (v, p) in zoomed {
        if v < value {
            value = v;
            params = p;
        }
    }
    let covering_length = 0.5 * sizes.len() as f64 * resolution;
    Ok(GridOracle {
        value,
        minimizer: sphere_point(&params),
        resolution,
        covering_length,
        lipschitz: f.lipschitz(),
        lower_bound: net_min - f.lipschitz() * covering_length,
    })
}

fn zoom(f: &SphereFunctional, mut center: Vec<f64>, mut best: f64, resolution: f64) -> (f64, Vec<f64>) {
    const PER_AXIS: usize = 7;
    let k = center.len();
    let mut half = resolution;
    while half > 1e-10 {
        let step = 2.0 * half / (PER_AXIS - 1) as f64;
        let count = PER_AXIS.pow(k as u32);
        let mut improved = center.clone();
        for idx in 0..count {
            let mut rem = idx;
            let p: Vec<f64> = (0..k)
                .map(|d| {
                    let i = rem % PER_AXIS;
                    rem /= PER_AXIS;
                    center[d] - half + step * i as f64
                })
                .collect();
            let v = finite_or_inf(f.value(&sphere_point(&p)));
            if v < best {
                best = v;
                improved = p;
            }
        }
        center = improved;
        half /= 3.0;
    }
    (best, center)
}

/// Rigorous bracket `[lower, upper]` on `inf (⟨Sx,x⟩ − κ⟨Tx,x⟩²)` over
/// unit `x`, plus the unit vector attaining `upper`.
pub fn concave_joint_range_bracket(
    s: &ComplexMatrix,
    t: &ComplexMatrix,
    kappa: f64,
    tol: f64,
) -> (f64, f64, CVector) {
    let joint = s + &t.scale(Complex64::i());
    let sweep = maximize_convex_over_range(
        &joint,
        |z| -(z.re - kappa * z.im * z.im),
        &SweepOptions {
            tol,
            ..SweepOptions::default()
        },
    );
    (-sweep.upper, -sweep.lower, sweep.best.vector)
}

fn scale_of(f: &SphereFunctional) -> f64 {
    match &f.data {
        Data::Pencil { .. } => 1.0,
        Data::Quadratic { s, .. } => spectral_norm(s).max(1.0),
        Data::Variance { a, .. } => spectral_norm(a).max(1.0),
        Data::Kian { eigs, r, .. } => eigs
            .iter()
            .map(|e| e.max_eigenvalue())
            .fold(1.0, f64::max)
            .powf(*r),
    }
}

/// Multi-start descent followed by whichever certificates apply.
pub fn minimize(f: &SphereFunctional, opts: &OptOptions) -> Result<SphereOptResult> {
    let mut result = projected_gradient_min(f, &start_set(f, opts), opts)?;
    let scale = scale_of(f);
    let agree = 1e-6 * scale;

    let run_oracle = match opts.oracle {
        OracleMode::Never => false,
        OracleMode::Auto => f.dim() <= 3 && f.dim() >= 2,
        OracleMode::Always => {
            if f.dim() > 3 || f.dim() < 2 {
                return Err(Error::DimensionTooLarge(f.dim()));
            }
            true
        }
    };
    let mut lower: Option<f64> = None;
    if run_oracle {
        let res = opts.oracle_resolution.unwrap_or_else(|| default_resolution(f.dim()));
        let oracle = sphere_grid_oracle(f, res)?;
        result.oracle_value = Some(oracle.value);
        if result.value <= oracle.value + agree {
            result.certified = true;
        }
        lower = Some(oracle.lower_bound);
    }
    if let Some((s, t, kappa)) = f.concave_form() {
        let (lo, _, _) = concave_joint_range_bracket(&s, &t, kappa, 1e-13 * scale);
        lower = Some(lower.map_or(lo, |l| l.max(lo)));
        if result.value - lo <= 1e-9 * scale {
            result.certified = true;
        }
    }
    result.certified_lower = lower.map(|l| l.min(result.value));
    Ok(result)
}

/// `ξ_{|A|} = inf ⟨(|A| − |A*|)x,x⟩ / ⟨(|A| + |A*|)x,x⟩`, solved as the
/// smallest eigenvalue of `Q^{-1/2} P Q^{-1/2}` on the range of `Q`.
pub fn xi_pencil(a: &ComplexMatrix) -> Result<SphereOptResult> {
    let f = SphereFunctional::pencil_ratio(a)?;
    let Data::Pencil { p, q } = &f.data else { unreachable!() };
    let q_eig = psd_eig(q)?;
    let cutoff = 1e-10 * q_eig.max_eigenvalue();
    let range: Vec<usize> = (0..q_eig.dim()).filter(|&k| q_eig.eigenvalues[k] > cutoff).collect();
    if range.is_empty() {
        return Err(Error::DegenerateInput("|A| + |A*| vanishes"));
    }
    let n = a.dim();
    let w = nalgebra::DMatrix::from_fn(n, range.len(), |i, j| {
        let k = range[j];
        q_eig.eigenvectors.entry(i, k) / q_eig.eigenvalues[k].sqrt()
    });
    let reduced = ComplexMatrix::from_unchecked(w.adjoint() * p.as_dmatrix() * &w).hermitian_part();
    let eig = hermitian_eig(&reduced)?;
    let x = normalized(&(&w * eig.eigenvector(0)));
    let value = f.value(&x).clamp(-1.0, 1.0);
    Ok(SphereOptResult {
        gradient_norm: f.riemannian_gradient(&x).norm(),
        minimizer: x,
        value,
        starts_used: 0,
        iterations: 0,
        oracle_value: None,
        certified_lower: Some(eig.min_eigenvalue().clamp(-1.0, 1.0).min(value)),
        certified: true,
    })
}

/// Infimum of the quadratic-deviation functional.
pub fn inf_xi_quadratic_deviation(a: &ComplexMatrix, opts: &OptOptions) -> Result<SphereOptResult> {
    minimize(&SphereFunctional::quadratic_deviation(a)?, opts)
}

/// Infimum of the variance-ratio functional; `A` must be invertible.
pub fn inf_xi_variance_ratio(a: &ComplexMatrix, opts: &OptOptions) -> Result<SphereOptResult> {
    minimize(&SphereFunctional::variance_ratio(a)?, opts)
}

/// Infimum of the deficiency term for PSD operators, weights summing to 1
/// and `r ≥ 2`.
pub fn kian_deficiency(ops: &[ComplexMatrix], weights: &[f64], r: f64, opts: &OptOptions) -> Result<SphereOptResult> {
    minimize(&SphereFunctional::kian_deficiency(ops, weights, r)?, opts)
}
