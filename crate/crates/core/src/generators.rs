//! Seeded matrix and vector generators.
//!
//! Randomness comes from ChaCha20 in counter mode: a `(seed, stream)` pair
//! selects the key and the stream id, so any sample can be regenerated in
//! isolation and concurrent sweeps do not depend on scheduling. Normal
//! deviates use the Marsaglia polar method; one accepted pair gives one
//! standard complex Gaussian `(g₁ + i g₂)/√2` with `E|z|² = 1`.
//!
//! Matrix entries are drawn in row-major order.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::linalg::{CVector, ComplexMatrix};

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index` of template `template` under `master`.
pub fn derive_seed(master: u64, template: u64, index: u64) -> u64 {
    let a = mix64(master ^ 0x9E37_79B9_7F4A_7C15);
    let b = mix64(a ^ template.wrapping_mul(0xD134_2543_DE82_EF95));
    mix64(b ^ index.wrapping_mul(0xA076_1D64_78BD_642F))
}

/// Deterministic random stream.
#[derive(Clone, Debug)]
pub struct SampleStream {
    rng: ChaCha20Rng,
}

impl SampleStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Pair of independent standard normal deviates.
    pub fn next_gaussian_pair(&mut self) -> (f64, f64) {
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                return (u * f, v * f);
            }
        }
    }

    pub fn next_complex_gaussian(&mut self) -> Complex64 {
        let (a, b) = self.next_gaussian_pair();
        Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Haar-uniform point on the unit sphere of `C^dim`.
    pub fn unit_vector(&mut self, dim: usize) -> CVector {
        loop {
            let x = CVector::from_fn(dim, |_, _| self.next_complex_gaussian());
            let n = x.norm();
            if n > 0.0 {
                return x / Complex64::new(n, 0.0);
            }
        }
    }

    fn ginibre(&mut self, dim: usize) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = self.next_complex_gaussian();
            }
        }
        m
    }

    /// Haar unitary from the QR factorization of a Ginibre matrix, with
    /// the phases of `diag(R)` moved into `Q`.
    fn unitary(&mut self, dim: usize) -> DMatrix<Complex64> {
        let qr = self.ginibre(dim).qr();
        let (mut q, r) = (qr.q(), qr.r());
        for k in 0..dim {
            let d = r[(k, k)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
            for i in 0..dim {
                q[(i, k)] *= phase;
            }
        }
        q
    }
}

/// Fixtures taken from worked examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedExample {
    /// `[[0, 0], [3, 0]]`.
    Ex2_11,
    /// `[[2, 1], [0, 4]]`.
    Ex3_4,
    /// `n×n` truncated unilateral shift (ones on the subdiagonal).
    Shift(usize),
}

impl NamedExample {
    pub fn dim(&self) -> usize {
        match *self {
            NamedExample::Ex2_11 | NamedExample::Ex3_4 => 2,
            NamedExample::Shift(n) => n,
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        match *self {
            NamedExample::Ex2_11 => ComplexMatrix::from_real(&[&[0.0, 0.0], &[3.0, 0.0]]).unwrap(),
            NamedExample::Ex3_4 => ComplexMatrix::from_real(&[&[2.0, 1.0], &[0.0, 4.0]]).unwrap(),
            NamedExample::Shift(n) => {
                let m = DMatrix::from_fn(n, n, |i, j| {
                    Complex64::new(if i == j + 1 { 1.0 } else { 0.0 }, 0.0)
                });
                ComplexMatrix::from_unchecked(m)
            }
        }
    }
}

impl fmt::Display for NamedExample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedExample::Ex2_11 => write!(f, "ex_2_11"),
            NamedExample::Ex3_4 => write!(f, "ex_3_4"),
            NamedExample::Shift(n) => write!(f, "shift_{n}"),
        }
    }
}

impl FromStr for NamedExample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex_2_11" => Ok(NamedExample::Ex2_11),
            "ex_3_4" => Ok(NamedExample::Ex3_4),
            _ => {
                let n = s
                    .strip_prefix("shift_")
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| Error::Spec(format!("unknown named example `{s}`")))?;
                Ok(NamedExample::Shift(n))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Ginibre,
    Normal,
    Psd,
    Unitary,
    UpperTriangular2x2,
    Nilpotent2x2,
    Named(NamedExample),
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Ginibre => "ginibre",
            GeneratorKind::Normal => "normal",
            GeneratorKind::Psd => "psd",
            GeneratorKind::Unitary => "unitary",
            GeneratorKind::UpperTriangular2x2 => "upper_triangular_2x2",
            GeneratorKind::Nilpotent2x2 => "nilpotent_2x2",
            GeneratorKind::Named(_) => "named",
        }
    }

    pub fn parse_random(name: &str) -> Result<Self> {
        Ok(match name {
            "ginibre" => GeneratorKind::Ginibre,
            "normal" => GeneratorKind::Normal,
            "psd" => GeneratorKind::Psd,
            "unitary" => GeneratorKind::Unitary,
            "upper_triangular_2x2" => GeneratorKind::UpperTriangular2x2,
            "nilpotent_2x2" => GeneratorKind::Nilpotent2x2,
            other => return Err(Error::Spec(format!("unknown generator kind `{other}`"))),
        })
    }
}

/// `(kind, dim, seed)`; textual form `kind:dim:seed` or `named:tag`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub dim: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, dim: usize, seed: u64) -> Self {
        Self { kind, dim, seed }
    }

    pub fn named(example: NamedExample) -> Self {
        Self {
            kind: GeneratorKind::Named(example),
            dim: example.dim(),
            seed: 0,
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeneratorKind::Named(ex) => write!(f, "named:{ex}"),
            kind => write!(f, "{}:{}:{}", kind.name(), self.dim, self.seed),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["named", tag] => Ok(GeneratorSpec::named(tag.parse()?)),
            [kind, dim, seed] => {
                let kind = GeneratorKind::parse_random(kind)?;
                let dim = dim
                    .parse()
                    .map_err(|_| Error::Spec(format!("bad dimension in `{s}`")))?;
                let seed = seed
                    .parse()
                    .map_err(|_| Error::Spec(format!("bad seed in `{s}`")))?;
                Ok(GeneratorSpec { kind, dim, seed })
            }
            _ => Err(Error::Spec(format!("expected `kind:dim:seed` or `named:tag`, got `{s}`"))),
        }
    }
}

/// Build the matrix described by `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<ComplexMatrix> {
    let n = spec.dim;
    if n == 0 {
        return Err(Error::Spec("dimension must be at least 1".into()));
    }
    if matches!(spec.kind, GeneratorKind::UpperTriangular2x2 | GeneratorKind::Nilpotent2x2) && n != 2 {
        return Err(Error::Spec(format!("{} requires dim 2, got {n}", spec.kind.name())));
    }
    let mut rng = SampleStream::new(spec.seed, 0);
    let m = match spec.kind {
        GeneratorKind::Named(ex) => {
            if ex.dim() != n {
                return Err(Error::Spec(format!("{ex} has dim {}, got {n}", ex.dim())));
            }
            return Ok(ex.matrix());
        }
        GeneratorKind::Ginibre => rng.ginibre(n),
        GeneratorKind::Unitary => rng.unitary(n),
        GeneratorKind::Normal => {
            let u = rng.unitary(n);
            let d: Vec<Complex64> = (0..n).map(|_| rng.next_complex_gaussian()).collect();
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d));
            &u * d * u.adjoint()
        }
        GeneratorKind::Psd => {
            let g = rng.ginibre(n);
            let p = g.adjoint() * &g;
            (&p + p.adjoint()) * Complex64::new(0.5, 0.0)
        }
        GeneratorKind::UpperTriangular2x2 => {
            let (a, c, b) = (
                rng.next_complex_gaussian(),
                rng.next_complex_gaussian(),
                rng.next_complex_gaussian(),
            );
            DMatrix::from_row_slice(2, 2, &[a, c, Complex64::new(0.0, 0.0), b])
        }
        GeneratorKind::Nilpotent2x2 => {
            let u = rng.unitary(2);
            let c = rng.next_complex_gaussian();
            let zero = Complex64::new(0.0, 0.0);
            let core = DMatrix::from_row_slice(2, 2, &[zero, zero, c, zero]);
            &u * core * u.adjoint()
        }
    };
    ComplexMatrix::from_dmatrix(m)
}

/// Haar-uniform unit vector in `C^dim` from stream `(seed, 0)`.
///
/// # Panics
/// If `dim == 0`.
pub fn generate_unit_vector(dim: usize, seed: u64) -> CVector {
    assert!(dim >= 1, "unit vectors need dim >= 1");
    SampleStream::new(seed, 0).unit_vector(dim)
}
