//! Numerical radius experiments for complex square matrices.
//!
//! The crate computes the numerical radius `ω(A)` with a certified error,
//! minimizes the sphere functionals that appear in refined radius bounds,
//! evaluates a catalog of such bounds, and sweeps them over random
//! matrix ensembles.
//!
//! ```
//! use radius_lab::{numerical_radius, ComplexMatrix};
//!
//! let a = ComplexMatrix::from_real(&[&[0.0, 0.0], &[3.0, 0.0]]).unwrap();
//! let r = numerical_radius(&a, 1e-12).unwrap();
//! assert!((r.omega - 1.5).abs() < 1e-10);
//! ```

pub mod bounds;
pub mod error;
pub mod generators;
pub mod harness;
pub mod linalg;
pub mod matrix_file;
pub mod numrange;
pub mod sphere;

pub use bounds::{BoundId, BoundParams, BoundReport, EvalOptions, Tolerance};
pub use error::{Error, Result};
pub use generators::{generate, generate_unit_vector, GeneratorKind, GeneratorSpec, NamedExample};
pub use harness::{run_sweep, SweepConfig, SweepReport};
pub use linalg::{CVector, ComplexMatrix, HermitianEig, ScalarFn};
pub use matrix_file::{matrix_from_json, matrix_to_json, read_matrix_file, write_matrix_file};
pub use numrange::{numerical_radius, numerical_range_boundary, RadiusResult};
pub use sphere::{OptOptions, SphereFunctional, SphereOptResult};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/numerical-range.md")]
    mod numerical_range {}
    #[doc = include_str!("../../../book/src/sphere-functionals.md")]
    mod sphere_functionals {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
