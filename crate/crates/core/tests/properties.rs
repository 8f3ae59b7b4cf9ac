use hopf_collapse::collapse::{
    born_probabilities, collapse_transition, measure_particle2, monte_carlo_correlation,
    exact_correlation, schmidt_coefficients, singlet, ExperimentConfig, Outcome,
};
use hopf_collapse::connection::{
    chern_number, connection_form, holonomy, parallel_transport, phase_distance, split_tangent,
    LatitudeLoop, LineBundleModel, TangentVector,
};
use hopf_collapse::hopf::{
    bloch_point, fiber_at, hopf_project, inclusion_square_defect, ray_from_bloch,
};
use hopf_collapse::line_bundle::{bundle_projection, psi, psi_inverse, AssociatedPoint};
use hopf_collapse::ray::{
    fubini_study_distance, hermitian_inner, inner, ray_of, spinor_of, tensor_product, Sign,
};
use hopf_collapse::{rng, Execution};
use num_complex::Complex64;
use proptest::prelude::*;

const TRIALS: usize = 1000;

#[test]
fn rays_are_phase_invariant_projectors() {
    let mut r = rng::stream(100, 0);
    for dim in [1, 2, 3, 4, 6] {
        for _ in 0..TRIALS {
            let z = rng::state(&mut r, dim);
            let p = ray_of(&z);
            assert!(p.max_abs_diff(&ray_of(&z.phase_shift(rng::phase(&mut r)))) <= 1e-12);
            assert!(p.projector_defect() <= 1e-12);
        }
    }
}

#[test]
fn spinor_pairs_are_orthogonal() {
    let mut r = rng::stream(101, 0);
    for _ in 0..TRIALS {
        let n = rng::direction(&mut r);
        let ip = hermitian_inner(&spinor_of(&n, Sign::Plus), &spinor_of(&n, Sign::Minus)).unwrap();
        assert!(ip.norm() <= 1e-12);
    }
}

#[test]
fn fubini_study_is_a_metric() {
    let mut r = rng::stream(102, 0);
    for _ in 0..TRIALS {
        let [p, q, s] = [0, 1, 2].map(|_| ray_of(&rng::state(&mut r, 3)));
        let pq = fubini_study_distance(&p, &q).unwrap();
        let qs = fubini_study_distance(&q, &s).unwrap();
        let ps = fubini_study_distance(&p, &s).unwrap();
        assert!((pq - fubini_study_distance(&q, &p).unwrap()).abs() <= 1e-9);
        assert!(ps <= pq + qs + 1e-9);
        assert!((0.0..=std::f64::consts::FRAC_PI_2 + 1e-15).contains(&pq));
    }
}

#[test]
fn hopf_fibration_and_collapse_square() {
    let mut r = rng::stream(103, 0);
    for n in [2, 4] {
        for _ in 0..TRIALS {
            let z = rng::state(&mut r, n);
            let p = hopf_project(&z);
            assert!(hopf_project(&z.phase_shift(rng::phase(&mut r))).max_abs_diff(&p) <= 1e-12);
        }
    }
    for _ in 0..TRIALS {
        let z = rng::state(&mut r, 2);
        assert!(inclusion_square_defect(&z).unwrap() <= 1e-12);
    }
}

#[test]
fn bloch_inverse_roundtrip_and_fibres() {
    let mut r = rng::stream(104, 0);
    for _ in 0..TRIALS {
        let d = rng::direction(&mut r);
        assert!(bloch_point(&ray_from_bloch(&d)).unwrap().distance(&d) <= 1e-10);
        let p = hopf_project(&rng::state(&mut r, 4));
        for w in fiber_at(&p, 7).unwrap() {
            assert!(hopf_project(&w).max_abs_diff(&p) <= 1e-12);
        }
    }
}

#[test]
fn psi_is_well_defined_and_invertible() {
    let mut r = rng::stream(105, 0);
    for l in [2, 4] {
        for _ in 0..TRIALS {
            let z = rng::state(&mut r, l);
            let w = rng::complex_vector(&mut r, 1)[0];
            let a = AssociatedPoint::new(z.clone(), w);
            let b = a.act(rng::phase(&mut r));
            assert!(psi(&a).approx_eq(&psi(&b), 1e-12));
            let back = psi_inverse(&psi(&a));
            assert!(back.approx_eq(&a, 1e-12));
            assert!(psi(&back).approx_eq(&psi(&a), 1e-12));
            assert!(bundle_projection(&psi(&a)).max_abs_diff(&hopf_project(&z)) <= 1e-12);
        }
    }
}

#[test]
fn psi_is_linear_on_fibres() {
    let mut r = rng::stream(106, 0);
    for _ in 0..TRIALS {
        let z = rng::state(&mut r, 4);
        let ws = rng::complex_vector(&mut r, 4);
        let (w1, w2, alpha, beta) = (ws[0], ws[1], ws[2], ws[3]);
        let lhs = psi(&AssociatedPoint::new(z.clone(), alpha * w1 + beta * w2));
        let t1 = psi(&AssociatedPoint::new(z.clone(), w1));
        let t2 = psi(&AssociatedPoint::new(z.clone(), w2));
        let rhs = t1.combine(alpha, &t2, beta).unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }
}

#[test]
fn connection_splitting_properties() {
    let mut r = rng::stream(107, 0);
    for n in [2, 4] {
        for _ in 0..TRIALS {
            let z = rng::state(&mut r, n);
            let t = TangentVector::project(z.clone(), &rng::complex_vector(&mut r, n)).unwrap();
            let s = split_tangent(&t);
            assert!(inner(&s.vertical, &s.horizontal).re.abs() <= 1e-12);
            assert!(inner(z.components(), &s.horizontal).norm() <= 1e-12);
            for k in 0..n {
                assert!((s.vertical[k] + s.horizontal[k] - t.vec()[k]).norm() <= 1e-12);
            }
            // vertical part is i t z with real t
            let ratio = inner(z.components(), &s.vertical);
            assert!(ratio.re.abs() <= 1e-12);
            for k in 0..n {
                assert!((s.vertical[k] - z.components()[k] * ratio).norm() <= 1e-12);
            }
            let h = TangentVector::new(z.clone(), s.horizontal.clone()).unwrap();
            let again = split_tangent(&h);
            assert!(again.vertical.iter().all(|v| v.norm() <= 1e-12));
            assert!(connection_form(&h).norm() <= 1e-12);
            let v = TangentVector::new(z.clone(), s.vertical.clone()).unwrap();
            assert!((connection_form(&v) - connection_form(&t)).norm() <= 1e-12);
        }
    }
}

#[test]
fn transport_preserves_norm_and_is_equivariant() {
    let mut r = rng::stream(108, 0);
    for _ in 0..5 {
        let axis = rng::direction(&mut r);
        let l = LatitudeLoop::new(axis, 0.3 + 2.5 * rng::uniform(&mut r), 10_000).unwrap();
        let path = l.path();
        let z0 = path.points()[0].representative();
        let end = parallel_transport(&z0, &path).unwrap();
        let norm: f64 = end.components().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-9);
        let rho = rng::phase(&mut r);
        let shifted = parallel_transport(&z0.phase_shift(rho), &path).unwrap();
        assert!(shifted.max_abs_diff(&end.phase_shift(rho)) <= 1e-9);
    }
}

#[test]
fn holonomy_converges_quadratically() {
    for theta in [0.5, 1.0, 2.3] {
        let err = |steps| {
            let l = LatitudeLoop::new(hopf_collapse::Direction::Y, theta, steps).unwrap();
            phase_distance(holonomy(&l.path()).unwrap(), l.expected_holonomy())
        };
        let ratio = err(1000) / err(10_000);
        assert!(ratio >= 50.0, "theta {theta}: ratio {ratio}");
    }
}

#[test]
fn chern_is_mesh_independent_and_additive() {
    let bundles: Vec<LineBundleModel> = (-2..=2).map(LineBundleModel::Power).collect();
    for b in &bundles {
        let values: Vec<i64> = [16, 32, 64]
            .iter()
            .map(|&m| chern_number(b, m, Execution::Parallel).unwrap())
            .collect();
        assert!(values.iter().all(|&v| v == b.degree()), "{b:?}: {values:?}");
    }
    for x in &bundles {
        for y in &bundles {
            let t = LineBundleModel::Tensor(vec![x.clone(), y.clone()]);
            let sum = chern_number(x, 16, Execution::Sequential).unwrap()
                + chern_number(y, 16, Execution::Sequential).unwrap();
            assert_eq!(chern_number(&t, 16, Execution::Sequential).unwrap(), sum);
        }
    }
}

#[test]
fn chern_parallel_is_bit_identical() {
    let b = LineBundleModel::Tensor(vec![LineBundleModel::Power(2), LineBundleModel::Tautological]);
    let s = hopf_collapse::connection::chern_report(&b, 48, Execution::Sequential).unwrap();
    let p = hopf_collapse::connection::chern_report(&b, 48, Execution::Parallel).unwrap();
    assert_eq!(s.flux.to_bits(), p.flux.to_bits());
}

#[test]
fn born_rule_and_branch_law() {
    let mut r = rng::stream(109, 0);
    for _ in 0..TRIALS {
        let state = rng::state(&mut r, 4);
        let axis = rng::direction(&mut r);
        let (p, m) = born_probabilities(&state, &axis).unwrap();
        assert!((p + m - 1.0).abs() <= 1e-12);
        let rec = measure_particle2(&state, &axis, rng::uniform(&mut r)).unwrap();
        assert!(schmidt_coefficients(&rec.post_product_state).1 <= 1e-12);
    }
    for _ in 0..100 {
        let axis = rng::direction(&mut r);
        let (p, m) = born_probabilities(&singlet(), &axis).unwrap();
        assert!((p - 0.5).abs() <= 1e-12 && (m - 0.5).abs() <= 1e-12);
        for (draw, outcome) in [(0.25, Outcome::Up), (0.75, Outcome::Down)] {
            let rec = measure_particle2(&singlet(), &axis, draw).unwrap();
            assert_eq!(rec.outcome, outcome);
            let s = outcome.sign();
            let expected = tensor_product(&spinor_of(&axis, s.flip()), &spinor_of(&axis, s));
            assert!(hopf_project(&rec.post_product_state).max_abs_diff(&hopf_project(&expected)) <= 1e-12);
        }
    }
}

#[test]
fn collapse_diagram_commutes() {
    let mut r = rng::stream(110, 0);
    for _ in 0..TRIALS {
        let axis = rng::direction(&mut r);
        let rec = measure_particle2(&singlet(), &axis, rng::uniform(&mut r)).unwrap();
        let t = collapse_transition(&rec).unwrap();
        assert!(t.commutes, "deviation {}", t.diagram_deviation);
        assert!((t.jump_distance - std::f64::consts::FRAC_PI_4).abs() <= 1e-12);
    }
}

#[test]
fn monte_carlo_tracks_exact_and_ignores_workers() {
    let mut r = rng::stream(111, 0);
    for _ in 0..3 {
        let config = ExperimentConfig {
            axis_a: rng::direction(&mut r),
            axis_b: rng::direction(&mut r),
            shots: 200_000,
            seed: 9,
        };
        let seq = monte_carlo_correlation(&config, Execution::Sequential).unwrap();
        let par = hopf_collapse::exec::with_workers(3, |e| monte_carlo_correlation(&config, e))
            .unwrap()
            .unwrap();
        assert_eq!(seq, par);
        let exact = exact_correlation(&singlet(), &config.axis_a, &config.axis_b).unwrap();
        assert!((seq.mean - exact).abs() <= 3.5 / (config.shots as f64).sqrt());
    }
}

proptest! {
    #[test]
    fn psi_roundtrip_any_representative(
        re in proptest::collection::vec(-1.0f64..1.0, 8),
        w_re in -5.0f64..5.0, w_im in -5.0f64..5.0, rho in 0.0f64..std::f64::consts::TAU,
    ) {
        let raw: Vec<Complex64> = re.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
        prop_assume!(raw.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3);
        let z = hopf_collapse::StateVector::normalize(raw).unwrap();
        let a = AssociatedPoint::new(z, Complex64::new(w_re, w_im));
        let back = psi_inverse(&psi(&a.act(rho)));
        prop_assert!(back.approx_eq(&a, 1e-11));
    }

    #[test]
    fn holonomy_of_rotated_loops_depends_only_on_theta(
        x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0, theta in 0.2f64..2.9,
    ) {
        prop_assume!(x * x + y * y + z * z > 1e-2);
        let axis = hopf_collapse::Direction::normalize(x, y, z).unwrap();
        let l = LatitudeLoop::new(axis, theta, 4000).unwrap();
        let h = holonomy(&l.path()).unwrap();
        prop_assert!(phase_distance(h, l.expected_holonomy()) < 1e-5);
    }
}
