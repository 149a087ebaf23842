use num_complex::Complex64;
use proptest::prelude::*;

use radius_lab::bounds::{evaluate_radius_bound, verify_chain, BoundId, BoundParams, EvalOptions, Tolerance};
use radius_lab::linalg::{abs_value, hermitian_eig, spectral_norm, sqrt_psd};
use radius_lab::numrange::{numerical_radius, numerical_range_boundary};
use radius_lab::sphere::{OptOptions, OracleMode, SphereFunctional};
use radius_lab::{generate, generate_unit_vector, ComplexMatrix, GeneratorKind, GeneratorSpec};

fn gen(kind: GeneratorKind, dim: usize, seed: u64) -> ComplexMatrix {
    generate(&GeneratorSpec::new(kind, dim, seed)).unwrap()
}

fn quick_opts() -> EvalOptions {
    EvalOptions {
        radius_tol: 1e-12,
        opt: OptOptions {
            starts: 8,
            max_iters: 500,
            oracle: OracleMode::Never,
            ..OptOptions::default()
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigendecomposition_reconstructs(dim in 1usize..7, seed in any::<u64>()) {
        let a = gen(GeneratorKind::Ginibre, dim, seed);
        let h = a.hermitian_part();
        let eig = hermitian_eig(&h).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&h) <= 1e-12 * (1.0 + spectral_norm(&h)));
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn modulus_keeps_the_norm(dim in 1usize..7, seed in any::<u64>()) {
        let a = gen(GeneratorKind::Ginibre, dim, seed);
        let norm = spectral_norm(&a);
        prop_assert!((spectral_norm(&abs_value(&a).unwrap()) - norm).abs() <= 1e-12 * norm);
        prop_assert!((spectral_norm(&abs_value(&a.adjoint()).unwrap()) - norm).abs() <= 1e-12 * norm);
    }

    #[test]
    fn square_root_squares_back(dim in 1usize..7, seed in any::<u64>()) {
        let h = gen(GeneratorKind::Psd, dim, seed);
        let s = sqrt_psd(&h).unwrap();
        prop_assert!((&s * &s).max_abs_diff(&h) <= 1e-10 * (1.0 + spectral_norm(&h)));
    }

    #[test]
    fn radius_between_half_norm_and_norm(dim in 1usize..7, seed in any::<u64>()) {
        let a = gen(GeneratorKind::Ginibre, dim, seed);
        let r = numerical_radius(&a, 1e-12).unwrap();
        let norm = spectral_norm(&a);
        prop_assert!(r.omega <= norm * (1.0 + 1e-12));
        prop_assert!(r.omega + r.certified_error >= 0.5 * norm * (1.0 - 1e-12));
        let x = r.witness.unwrap();
        prop_assert!((a.quad_form(&x).norm() - r.omega).abs() <= 1e-12 * (1.0 + norm));
    }

    #[test]
    fn radius_is_absolutely_homogeneous(dim in 1usize..6, seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let a = gen(GeneratorKind::Ginibre, dim, seed);
        let c = Complex64::new(re, im);
        let w = numerical_radius(&a, 1e-12).unwrap().omega;
        let wc = numerical_radius(&a.scale(c), 1e-12).unwrap().omega;
        prop_assert!((wc - c.norm() * w).abs() <= 1e-10 * (1.0 + c.norm() * w));
    }

    #[test]
    fn radius_is_unitarily_invariant(dim in 1usize..6, seed in any::<u64>()) {
        let a = gen(GeneratorKind::Ginibre, dim, seed);
        let u = gen(GeneratorKind::Unitary, dim, seed ^ 0x5555);
        let b = &(&u * &a) * &u.adjoint();
        let wa = numerical_radius(&a, 1e-12).unwrap().omega;
        let wb = numerical_radius(&b, 1e-12).unwrap().omega;
        prop_assert!((wa - wb).abs() <= 1e-10 * (1.0 + wa));
    }

    #[test]
    fn boundary_stays_inside_radius(dim in 1usize..6, seed in any::<u64>(), samples in 3usize..64) {
        let a = gen(GeneratorKind::Ginibre, dim, seed);
        let w = numerical_radius(&a, 1e-12).unwrap().omega;
        let boundary = numerical_range_boundary(&a, samples).unwrap();
        prop_assert_eq!(boundary.len(), samples);
        for s in boundary {
            prop_assert!(s.boundary_point.norm() <= w + 1e-10);
            prop_assert!(s.lambda_max <= w + 1e-10);
        }
    }

    #[test]
    fn pencil_ratio_ignores_scale(dim in 1usize..6, seed in any::<u64>(), c in 0.01f64..100.0) {
        let a = gen(GeneratorKind::Ginibre, dim, seed);
        let x = generate_unit_vector(dim, seed);
        let f = SphereFunctional::pencil_ratio(&a).unwrap();
        let g = SphereFunctional::pencil_ratio(&a.scale_real(c)).unwrap();
        prop_assert!((f.value(&x) - g.value(&x)).abs() <= 1e-10);
        prop_assert!(f.value(&x).abs() <= 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn slack_scales_with_degree(dim in 2usize..5, seed in any::<u64>()) {
        let a = gen(GeneratorKind::Ginibre, dim, seed);
        let b = a.scale_real(2.0);
        for id in [BoundId::Eq7Upper, BoundId::Eq3Upper, BoundId::Dragomir, BoundId::Thm31Lin] {
            let ra = evaluate_radius_bound(&a, id, &BoundParams::default(), &quick_opts()).unwrap();
            let rb = evaluate_radius_bound(&b, id, &BoundParams::default(), &quick_opts()).unwrap();
            let expected = 2f64.powf(ra.degree) * ra.slack;
            prop_assert!((rb.slack - expected).abs() <= 1e-9 * (1.0 + rb.scale), "{}: {} vs {}", id, rb.slack, expected);
        }
    }

    #[test]
    fn refinement_chain_holds(dim in 2usize..5, seed in any::<u64>()) {
        let a = gen(GeneratorKind::Ginibre, dim, seed);
        let chain = verify_chain(&a, &[1.0, 1.5, 2.0], &quick_opts(), &Tolerance::default()).unwrap();
        for o in chain.orderings.iter().filter(|o| o.applicable) {
            prop_assert!(o.holds, "{}: {} > {}", o.name, o.smaller, o.larger);
        }
    }

    #[test]
    fn normal_matrices_attain_the_norm(dim in 1usize..8, seed in any::<u64>()) {
        let a = gen(GeneratorKind::Normal, dim, seed);
        let w = numerical_radius(&a, 1e-12).unwrap().omega;
        let norm = spectral_norm(&a);
        prop_assert!((w - norm).abs() <= 1e-9 * norm);
    }
}

#[test]
fn commutator_trace_vanishes() {
    for seed in 0..20 {
        let a = gen(GeneratorKind::Ginibre, 5, seed);
        let c = &(&a.adjoint() * &a) - &(&a * &a.adjoint());
        assert!(c.trace().norm() <= 1e-12 * (1.0 + spectral_norm(&a).powi(2)));
    }
}
