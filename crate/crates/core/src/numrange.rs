//! Numerical radius and numerical-range boundary.
//!
//! For `H_θ = (e^{iθ}A + e^{−iθ}A*)/2` the top eigenpair `(λ_θ, x_θ)` gives a
//! supporting line `Re(e^{iθ}z) = λ_θ` of `W(A)` touching it at
//! `z_θ = ⟨Ax_θ, x_θ⟩`. Sampling θ yields two polygons: the hull of the
//! touching points lies inside `W(A)`, and the intersection of the
//! half-planes contains it. Maximizing a convex function (such as `|z|`)
//! over both polygons brackets its maximum over `W(A)`; gaps between
//! consecutive angles are bisected until the bracket is narrower than the
//! requested tolerance.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, spectral_norm, CVector, ComplexMatrix};

/// Default number of equally spaced angles in the coarse sweep.
pub const DEFAULT_GRID: usize = 1024;

/// `(e^{iθ}A + (e^{iθ}A)*)/2`.
pub fn rotated_real_part(a: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    a.scale(Complex64::from_polar(1.0, theta)).hermitian_part()
}

/// Point of `W(A)` where the supporting line with inner normal angle θ touches.
#[derive(Clone, Debug)]
pub struct SupportPoint {
    pub theta: f64,
    pub lambda_max: f64,
    pub point: Complex64,
    pub vector: CVector,
    /// Distance from `lambda_max` to the next eigenvalue (`∞` in dimension 1).
    pub gap: f64,
}

impl SupportPoint {
    /// Derivative of `θ ↦ λ_max(H_θ)`, valid where the top eigenvalue is simple.
    pub fn slope(&self) -> f64 {
        -(Complex64::from_polar(1.0, self.theta) * self.point).im
    }
}

pub fn support_point(a: &ComplexMatrix, theta: f64) -> SupportPoint {
    let eig = hermitian_eig(&rotated_real_part(a, theta))
        .expect("rotated real part is Hermitian by construction");
    let n = eig.dim();
    let vector = eig.eigenvector(n - 1);
    SupportPoint {
        theta,
        lambda_max: eig.max_eigenvalue(),
        gap: if n > 1 { eig.eigenvalues[n - 1] - eig.eigenvalues[n - 2] } else { f64::INFINITY },
        point: a.quad_form(&vector),
        vector,
    }
}

/// Intersection of the supporting lines at `p` and `q` (`0 < q.θ − p.θ < π`
/// modulo 2π).
///
/// The triangle `p, q, v` has angle `π − Δθ` at `v`, so `|v − p| ≤ |q − p|`;
/// enforcing this keeps rounding in nearly parallel lines from moving `v`.
fn outer_vertex(p: &SupportPoint, q: &SupportPoint) -> Complex64 {
    let tangent = Complex64::i() * Complex64::from_polar(1.0, -p.theta);
    let gap = (q.theta - p.theta).rem_euclid(TAU);
    let along = (Complex64::from_polar(1.0, q.theta) * (q.point - p.point)).re;
    let offset = tangent * (along / -gap.sin());
    let limit = (q.point - p.point).norm();
    if offset.norm() > limit {
        p.point + offset * (limit / offset.norm())
    } else {
        p.point + offset
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub grid: usize,
    /// Absolute width at which the bracket counts as converged.
    pub tol: f64,
    /// Hard cap on eigen-solves; the bracket is returned as-is when hit.
    pub max_samples: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            tol: 1e-12,
            max_samples: 1 << 16,
        }
    }
}

/// Bracket `[lower, upper]` on `max_{z ∈ W(M)} φ(z)` for convex φ, with the
/// support point attaining `lower`.
#[derive(Clone, Debug)]
pub struct RangeMaximum {
    pub lower: f64,
    pub upper: f64,
    pub best: SupportPoint,
    pub samples: usize,
}

fn supports_at(a: &ComplexMatrix, thetas: &[f64]) -> Vec<SupportPoint> {
    thetas
        .par_iter()
        .with_min_len(16)
        .map(|&t| support_point(a, t))
        .collect()
}

/// Maximize a convex function of `z = ⟨Mx, x⟩` over unit `x`.
pub fn maximize_convex_over_range<F>(m: &ComplexMatrix, objective: F, opts: &SweepOptions) -> RangeMaximum
where
    F: Fn(Complex64) -> f64 + Sync,
{
    sweep(m, objective, |_, _, _| f64::INFINITY, opts)
}

/// Upper bound on `max λ_max(H_θ)` for θ between `p` and `q` from a
/// second-order expansion of the top eigenvalue.
///
/// Where `λ_max` is simple, `λ'' = −λ + 2 Σₖ |⟨H'x, xₖ⟩|² / (λ − λₖ)` with
/// `H' = H_{θ+π/2}`, so `λ'' ≤ −λ + 2ω²/gap`. Eigenvalues move at speed at
/// most `‖H'‖ ≤ ω`, which bounds the gap and `λ` across the interval.
fn taylor_gap_bound(p: &SupportPoint, q: &SupportPoint, omega_up: f64) -> f64 {
    let width = (q.theta - p.theta).rem_euclid(TAU);
    let gap = 0.5 * (p.gap + q.gap) - omega_up * width;
    if !(gap > 0.0) {
        return f64::INFINITY;
    }
    let lambda_lo = p.lambda_max.min(q.lambda_max) - omega_up * width;
    let curv = if gap.is_finite() {
        -lambda_lo + 2.0 * omega_up * omega_up / gap
    } else {
        -lambda_lo
    };
    let (dp, dq) = (p.slope(), q.slope());
    let left = |t: f64| p.lambda_max + dp * t + 0.5 * curv * t * t;
    let right = |t: f64| {
        let s = width - t;
        q.lambda_max - dq * s + 0.5 * curv * s * s
    };
    let mut candidates = vec![0.0, width];
    // left − right is affine in t.
    let (d0, d1) = (left(0.0) - right(0.0), left(width) - right(width));
    if d0 != d1 {
        candidates.push(d0 / (d0 - d1) * width);
    }
    if curv < 0.0 {
        candidates.push(-dp / curv);
        candidates.push(width + dq / curv);
    }
    candidates
        .into_iter()
        .filter(|t| (0.0..=width).contains(t))
        .map(|t| left(t).min(right(t)))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn sweep<F, G>(m: &ComplexMatrix, objective: F, gap_bound: G, opts: &SweepOptions) -> RangeMaximum
where
    F: Fn(Complex64) -> f64 + Sync,
    G: Fn(&SupportPoint, &SupportPoint, f64) -> f64,
{
    let grid = opts.grid.max(3);
    let thetas: Vec<f64> = (0..grid).map(|k| TAU * k as f64 / grid as f64).collect();
    let mut pts = supports_at(m, &thetas);
    loop {
        let (best_idx, best) = pts
            .iter()
            .enumerate()
            .map(|(k, p)| (k, objective(p.point)))
            .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
        let n = pts.len();
        let vertex_values: Vec<f64> = (0..n).map(|k| objective(outer_vertex(&pts[k], &pts[(k + 1) % n]))).collect();
        let coarse_upper = vertex_values.iter().fold(best, |u, &v| u.max(v));
        let mut upper = best;
        let mut split = Vec::new();
        for k in 0..n {
            let (p, q) = (&pts[k], &pts[(k + 1) % n]);
            let bound = vertex_values[k].min(gap_bound(p, q, coarse_upper));
            upper = upper.max(bound);
            let width = (q.theta - p.theta).rem_euclid(TAU);
            if bound > best + opts.tol && width > 1e-13 {
                split.push(p.theta + 0.5 * width);
            }
        }
        if split.is_empty() || n + split.len() > opts.max_samples {
            return RangeMaximum {
                lower: best,
                upper,
                best: pts[best_idx].clone(),
                samples: n,
            };
        }
        let fresh = supports_at(m, &split);
        pts.extend(fresh);
        for p in &mut pts {
            p.theta = p.theta.rem_euclid(TAU);
        }
        pts.sort_by(|x, y| x.theta.total_cmp(&y.theta));
    }
}

/// Outcome of [`numerical_radius`].
#[derive(Clone, Debug)]
pub struct RadiusResult {
    pub omega: f64,
    /// Angle in `[0, 2π)` of the supporting line through the witness point.
    pub theta_star: f64,
    /// Unit vector with `|⟨Ax, x⟩| = omega`; `None` for the zero matrix.
    pub witness: Option<CVector>,
    /// Width of the certified bracket: `ω(A) ∈ [omega, omega + certified_error]`.
    pub certified_error: f64,
    pub samples: usize,
}

/// `ω(A) = sup_{‖x‖=1} |⟨Ax, x⟩|`, certified to within `tol` (absolute).
///
/// When the range is close to a disk about the origin and the top eigenvalue
/// of `H_θ` is nearly degenerate, the sample cap can be reached first; the
/// returned `certified_error` is then the actual bracket width and may exceed
/// `tol`.
pub fn numerical_radius(a: &ComplexMatrix, tol: f64) -> Result<RadiusResult> {
    numerical_radius_with(
        a,
        &SweepOptions {
            tol,
            ..SweepOptions::default()
        },
    )
}

pub fn numerical_radius_with(a: &ComplexMatrix, opts: &SweepOptions) -> Result<RadiusResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if a.is_zero() {
        return Ok(RadiusResult {
            omega: 0.0,
            theta_star: 0.0,
            witness: None,
            certified_error: 0.0,
            samples: 0,
        });
    }
    let max = sweep(a, |z| z.norm(), taylor_gap_bound, opts);
    let x = &max.best.vector;
    let omega = a.quad_form(x).norm();
    debug_assert!({
        let norm = spectral_norm(a);
        omega <= norm * (1.0 + 1e-12) + opts.tol && max.upper >= 0.5 * norm - opts.tol
    });
    Ok(RadiusResult {
        omega,
        theta_star: max.best.theta,
        witness: Some(x.clone()),
        certified_error: (max.upper - omega).max(0.0),
        samples: max.samples,
    })
}

/// One sample of the boundary of `W(A)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeBoundarySample {
    pub theta: f64,
    pub lambda_max: f64,
    pub boundary_point: Complex64,
}

/// Boundary points at `samples` equally spaced angles.
pub fn numerical_range_boundary(a: &ComplexMatrix, samples: usize) -> Result<Vec<RangeBoundarySample>> {
    if samples < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 samples, got {samples}")));
    }
    let thetas: Vec<f64> = (0..samples).map(|k| TAU * k as f64 / samples as f64).collect();
    Ok(supports_at(a, &thetas)
        .into_iter()
        .map(|p| RangeBoundarySample {
            theta: p.theta,
            lambda_max: p.lambda_max,
            boundary_point: p.point,
        })
        .collect())
}

/// Exact `ω` of a 2×2 matrix from its elliptical numerical range.
///
/// `W(A)` is the ellipse with foci at the eigenvalues `λ₁, λ₂`, minor axis
/// `sqrt(‖A‖_F² − |λ₁|² − |λ₂|²)` and major axis
/// `sqrt(|λ₁ − λ₂|² + minor²)`. Its farthest point from the origin maximizes
/// a trigonometric polynomial of degree two in the ellipse parameter.
pub fn omega_2x2_oracle(a: &ComplexMatrix) -> Result<f64> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: a.dim(),
        });
    }
    let (p, q, r, s) = (a.entry(0, 0), a.entry(0, 1), a.entry(1, 0), a.entry(1, 1));
    let half_trace = (p + s) * 0.5;
    let disc = (half_trace * half_trace - (p * s - q * r)).sqrt();
    let (l1, l2) = (half_trace + disc, half_trace - disc);
    let frob2 = p.norm_sqr() + q.norm_sqr() + r.norm_sqr() + s.norm_sqr();
    let minor2 = (frob2 - l1.norm_sqr() - l2.norm_sqr()).max(0.0);
    let semi_minor = minor2.sqrt() / 2.0;
    let semi_major = ((l1 - l2).norm_sqr() + minor2).sqrt() / 2.0;
    let focal = l1 - l2;
    let axis = if focal.norm() > 0.0 {
        focal / focal.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    // Work in coordinates where the major axis is real.
    let c = half_trace * axis.conj();
    let g = |t: f64| {
        let x = c.re + semi_major * t.cos();
        let y = c.im + semi_minor * t.sin();
        x * x + y * y
    };
    const N: usize = 720;
    let h = TAU / N as f64;
    let vals: Vec<f64> = (0..N).map(|k| g(k as f64 * h)).collect();
    let mut best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for k in 0..N {
        let (prev, next) = (vals[(k + N - 1) % N], vals[(k + 1) % N]);
        if vals[k] >= prev && vals[k] >= next {
            best = best.max(golden_max(&g, (k as f64 - 1.0) * h, (k as f64 + 1.0) * h));
        }
    }
    Ok(best.sqrt())
}

fn golden_max(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = g(x1);
        }
    }
    f1.max(f2)
}

/// CSV with header `theta,lambda_max,re,im`.
pub fn boundary_csv(samples: &[RangeBoundarySample]) -> String {
    let mut out = String::from("theta,lambda_max,re,im\n");
    for s in samples {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            s.theta, s.lambda_max, s.boundary_point.re, s.boundary_point.im
        )
        .unwrap();
    }
    out
}

/// Standalone SVG of the boundary polygon with the spectrum drawn as crosses.
pub fn boundary_svg(samples: &[RangeBoundarySample], spectrum: &[Complex64]) -> String {
    let pts: Vec<Complex64> = samples.iter().map(|s| s.boundary_point).collect();
    let all = pts.iter().chain(spectrum.iter());
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in all {
        xmin = xmin.min(z.re);
        xmax = xmax.max(z.re);
        ymin = ymin.min(z.im);
        ymax = ymax.max(z.im);
    }
    let span = (xmax - xmin).max(ymax - ymin).max(1e-9);
    let margin = 0.1 * span;
    let (x0, y0, w) = (xmin - margin, ymin - margin, span + 2.0 * margin);
    let size = 480.0;
    let map = |z: Complex64| ((z.re - x0) / w * size, size - (z.im - y0) / w * size);
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (ox, oy) = map(Complex64::new(0.0, 0.0));
    writeln!(
        svg,
        r##"<g stroke="#bbbbbb" stroke-width="1"><line x1="0" y1="{oy:.3}" x2="{size}" y2="{oy:.3}"/><line x1="{ox:.3}" y1="0" x2="{ox:.3}" y2="{size}"/></g>"##
    )
    .unwrap();
    let poly: Vec<String> = pts
        .iter()
        .map(|&z| {
            let (x, y) = map(z);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    writeln!(
        svg,
        r##"<polygon points="{}" fill="#dde8f7" stroke="#1f4e9c" stroke-width="1.5"/>"##,
        poly.join(" ")
    )
    .unwrap();
    for &z in spectrum {
        let (x, y) = map(z);
        let d = 6.0;
        writeln!(
            svg,
            r##"<g stroke="#c0392b" stroke-width="2"><line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/><line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/></g>"##,
            x - d,
            y - d,
            x + d,
            y + d,
            x - d,
            y + d,
            x + d,
            y - d
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn nilpotent() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[0.0, 0.0], &[3.0, 0.0]]).unwrap()
    }

    fn upper() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[2.0, 1.0], &[0.0, 4.0]]).unwrap()
    }

    #[test]
    fn rotated_real_part_examples() {
        let h = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, -1.0)], vec![c(2.0, 1.0), c(-3.0, 0.0)]]).unwrap();
        assert!(rotated_real_part(&h, 0.0).max_abs_diff(&h) < 1e-15);
        let expected = ComplexMatrix::from_real(&[&[0.0, 1.5], &[1.5, 0.0]]).unwrap();
        assert!(rotated_real_part(&nilpotent(), 0.0).max_abs_diff(&expected) < 1e-15);
        let a = upper();
        let flipped = rotated_real_part(&a, std::f64::consts::PI);
        assert!(flipped.max_abs_diff(&(-&rotated_real_part(&a, 0.0))) < 1e-14);
    }

    #[test]
    fn radius_of_worked_examples() {
        let r = numerical_radius(&upper(), 1e-12).unwrap();
        assert_abs_diff_eq!(r.omega, 3.0 + 1.25f64.sqrt(), epsilon = 1e-11);
        assert!(r.certified_error <= 1e-12);
        let r = numerical_radius(&nilpotent(), 1e-12).unwrap();
        assert_abs_diff_eq!(r.omega, 1.5, epsilon = 1e-11);
        let r = numerical_radius(&ComplexMatrix::identity(3), 1e-12).unwrap();
        assert_abs_diff_eq!(r.omega, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn witness_attains_omega() {
        let a = upper();
        let r = numerical_radius(&a, 1e-12).unwrap();
        let x = r.witness.unwrap();
        assert_abs_diff_eq!(x.norm(), 1.0, epsilon = 1e-12);
        assert!(a.quad_form(&x).norm() >= r.omega - r.certified_error - 1e-12);
        let h = rotated_real_part(&a, r.theta_star);
        assert!(h.quad_form(&x).re <= a.quad_form(&x).norm() + 1e-12);
    }

    #[test]
    fn zero_matrix_has_zero_radius() {
        let r = numerical_radius(&ComplexMatrix::zeros(3), 1e-12).unwrap();
        assert_eq!(r.omega, 0.0);
        assert_eq!(r.certified_error, 0.0);
        assert!(r.witness.is_none());
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(numerical_radius(&upper(), 0.0).is_err());
    }

    #[test]
    fn boundary_of_normal_segment() {
        let a = ComplexMatrix::real_diagonal(&[0.0, 1.0]);
        let b = numerical_range_boundary(&a, 4).unwrap();
        assert_eq!(b.len(), 4);
        for s in &b {
            assert!(s.boundary_point.im.abs() < 1e-14);
            assert!((-1e-14..=1.0 + 1e-14).contains(&s.boundary_point.re));
        }
    }

    #[test]
    fn boundary_of_nilpotent_is_a_circle() {
        for s in numerical_range_boundary(&nilpotent(), 36).unwrap() {
            assert_abs_diff_eq!(s.boundary_point.norm(), 1.5, epsilon = 1e-12);
            let support = (Complex64::from_polar(1.0, s.theta) * s.boundary_point).re;
            assert_abs_diff_eq!(support, s.lambda_max, epsilon = 1e-12);
        }
    }

    #[test]
    fn boundary_of_identity_is_a_point() {
        for s in numerical_range_boundary(&ComplexMatrix::identity(2), 8).unwrap() {
            assert!((s.boundary_point - c(1.0, 0.0)).norm() < 1e-14);
        }
        assert!(numerical_range_boundary(&ComplexMatrix::identity(2), 2).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert_abs_diff_eq!(omega_2x2_oracle(&upper()).unwrap(), 3.0 + 1.25f64.sqrt(), epsilon = 1e-13);
        assert_abs_diff_eq!(omega_2x2_oracle(&nilpotent()).unwrap(), 1.5, epsilon = 1e-13);
        assert_abs_diff_eq!(omega_2x2_oracle(&ComplexMatrix::real_diagonal(&[2.0, 4.0])).unwrap(), 4.0, epsilon = 1e-13);
        assert!(matches!(
            omega_2x2_oracle(&ComplexMatrix::identity(3)),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn oracle_with_off_axis_center() {
        // Circle of radius 1/2 centered at i: ω = 1.5.
        let a = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1.0)]]).unwrap();
        assert_abs_diff_eq!(omega_2x2_oracle(&a).unwrap(), 1.5, epsilon = 1e-13);
        assert_abs_diff_eq!(numerical_radius(&a, 1e-12).unwrap().omega, 1.5, epsilon = 1e-11);
    }

    #[test]
    fn csv_and_svg_shapes() {
        let b = numerical_range_boundary(&nilpotent(), 5).unwrap();
        let csv = boundary_csv(&b);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "theta,lambda_max,re,im");
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[1].split(',').count(), 4);
        let svg = boundary_svg(&b, &[c(0.0, 0.0)]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polygon"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
