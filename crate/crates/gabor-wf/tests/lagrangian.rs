use gabor_wf::hamiltonian::{hamilton_map, QuadraticHamiltonian};
use gabor_wf::lagrangian::*;
use gabor_wf::linalg::{self, c64, CMat, Subspace, I};
use gabor_wf::random;
use num_complex::Complex64;
use proptest::prelude::*;

fn scalar(z: Complex64) -> CMat {
    CMat::from_element(1, 1, z)
}

fn xtheta() -> GaussianGenerator {
    let p = CMat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.5, 0.0), c64(0.5, 0.0), c64(0.0, 0.0)]);
    validate_generator(&p, 1, 1).unwrap()
}

#[test]
fn reduction_for_identity_theta_block() {
    let mut p = CMat::zeros(3, 3);
    p[(0, 0)] = c64(0.3, 0.1);
    p[(0, 1)] = c64(0.0, 0.0);
    p[(1, 1)] = c64(1.0, 0.0);
    p[(2, 2)] = c64(1.0, 0.0);
    let g = validate_generator(&p, 1, 2).unwrap();
    let rc = reduction_coefficients(&g);
    assert!(rc.b.norm() < 1e-14);
    assert!((rc.c.clone() - CMat::identity(2, 2) * c64(0.5, 0.0)).norm() < 1e-14);
    assert!((rc.a.clone() + g.p_tx()).norm() < 1e-14);
    assert!(rc.left_inverse_residual(&g) < 1e-14);
}

#[test]
fn reduction_for_x_theta() {
    let rc = reduction_coefficients(&xtheta());
    assert!((rc.b[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-14);
    assert!(rc.c[(0, 0)].norm() < 1e-14);
    assert!(rc.a[(0, 0)].norm() < 1e-14);
}

#[test]
fn x_theta_gives_vertical_line() {
    let lam = lagrangian_of_generator(&xtheta());
    assert!(lam.z()[(0, 0)].norm() < 1e-14);
    let p = normal_form(&lam).unwrap();
    assert_eq!(p.k, 0);
    assert!((p.l[(0, 0)].abs() - 1.0).abs() < 1e-14);
    let rp = real_points(&p);
    assert!(rp.unrefined.same_as(&Subspace::coordinate(2, &[1]), 1e-12));
    assert_eq!(tilde_refine(&lam).dim(), 1);
}

#[test]
fn real_phase_gives_graph() {
    let g = validate_generator(&scalar(c64(0.5, 0.0)), 1, 0).unwrap();
    let lam = lagrangian_of_generator(&g);
    let p = normal_form(&lam).unwrap();
    assert!((p.r_r[(0, 0)] - 0.5).abs() < 1e-14);
    assert!(p.r_i[(0, 0)].abs() < 1e-14);
    let diag = Subspace::from_spanning(&gabor_wf::linalg::RMat::from_column_slice(2, 1, &[1.0, 1.0]), 1e-12);
    assert!(real_points(&p).refined.same_as(&diag, 1e-12));
    assert!(tilde_refine(&lam).distance(&lam) < 1e-12);
}

#[test]
fn graph_at_zero_is_diagonal() {
    let h = QuadraticHamiltonian::new(CMat::identity(2, 2) * I).unwrap();
    let lam = graph_lagrangian(&hamilton_map(&h), 0.0).unwrap();
    assert!(lam.is_lagrangian(1e-12));
    assert_eq!(lam.min_positivity().abs() < 1e-12, true);
    // (y, y, η, −η)
    let mut z = CMat::zeros(4, 2);
    z[(0, 0)] = c64(1.0, 0.0);
    z[(1, 0)] = c64(1.0, 0.0);
    z[(2, 1)] = c64(1.0, 0.0);
    z[(3, 1)] = c64(-1.0, 0.0);
    let want = ComplexLagrangian::from_spanning(&z).unwrap();
    assert!(lam.distance(&want) < 1e-12);
}

#[test]
fn heat_kernel_bound() {
    let mut q = CMat::zeros(2, 2);
    q[(1, 1)] = c64(1.0, 0.0);
    let fm = hamilton_map(&QuadraticHamiltonian::new(q).unwrap());
    let b = kernel_wf_bound(&fm, 0.3).unwrap();
    let want = Subspace::from_spanning(&gabor_wf::linalg::RMat::from_column_slice(4, 1, &[1.0, 1.0, 0.0, 0.0]), 1e-12);
    assert!(b.same_as(&want, 1e-12));
    let lam = graph_lagrangian(&fm, 0.3).unwrap();
    let rp = real_points(&normal_form(&lam).unwrap()).refined;
    assert!(rp.same_as(&b, 1e-8));
}

#[test]
fn harmonic_potential_kernel_is_smooth() {
    let q = CMat::identity(2, 2) * c64(1.0, 0.0);
    let fm = hamilton_map(&QuadraticHamiltonian::new(q).unwrap());
    assert_eq!(kernel_wf_bound(&fm, 0.5).unwrap().dim(), 0);
}

#[test]
fn harmonic_oscillator_kernel_is_full_graph() {
    let q = CMat::identity(2, 2) * I;
    let fm = hamilton_map(&QuadraticHamiltonian::new(q).unwrap());
    let t = 0.4;
    let b = kernel_wf_bound(&fm, t).unwrap();
    assert_eq!(b.dim(), 2);
    let lam = graph_lagrangian(&fm, t).unwrap();
    assert!(lam.real_points_direct().same_as(&b, 1e-10));
}

#[test]
fn twist_is_involution() {
    let mut rng = random::rng(3);
    let z = CMat::from_fn(8, 4, |_, _| c64(rand::Rng::random_range(&mut rng, -1.0..1.0), 0.0));
    assert_eq!(twist(&twist(&z).unwrap()).unwrap(), z);
    assert!(twist(&CMat::zeros(6, 1)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generator_lagrangians_are_positive(seed in any::<u64>(), d in 1usize..=3, n in 0usize..=3) {
        let mut rng = random::rng(seed);
        let g = random::random_generator(&mut rng, d, n);
        let lam = lagrangian_of_generator(&g);
        prop_assert!(lam.is_lagrangian(1e-10));
        prop_assert!(lam.is_positive(1e-10));
    }

    #[test]
    fn reduction_identity(seed in any::<u64>(), d in 1usize..=3, n in 0usize..=3) {
        let mut rng = random::rng(seed);
        let g = random::random_generator(&mut rng, d, n);
        let rc = reduction_coefficients(&g);
        for _ in 0..20 {
            let x = random::random_complex_vec(&mut rng, d);
            let th = random::random_complex_vec(&mut rng, n);
            prop_assert!(rc.identity_residual(&g, &x, &th) < 1e-10);
        }
    }

    #[test]
    fn normal_form_round_trip(seed in any::<u64>(), d in 1usize..=3, n in 0usize..=3) {
        let mut rng = random::rng(seed);
        let g = random::random_generator(&mut rng, d, n);
        let lam = lagrangian_of_generator(&g);
        let p = normal_form(&lam).unwrap();
        prop_assert!(param_lagrangian(&p).distance(&lam) < 1e-8);
        prop_assert!(p.orthorange_defect() < 1e-8);
        let direct = lam.real_points_direct();
        prop_assert!(real_points(&p).refined.distance(&direct) < 1e-8);
        let tilde = tilde_refine(&lam).real_points_direct();
        prop_assert!(tilde.distance(&direct) < 1e-8);
    }

    #[test]
    fn graph_lagrangian_positive(seed in any::<u64>(), d in 1usize..=2, t in 0.01f64..2.0) {
        let mut rng = random::rng(seed);
        let h = random::random_q(&mut rng, d);
        let lam = graph_lagrangian(&hamilton_map(&h), t).unwrap();
        prop_assert!(lam.is_lagrangian(1e-10));
        prop_assert!(lam.is_positive(1e-10));
    }

    #[test]
    fn kernel_bound_matches_normal_form(seed in any::<u64>(), d in 1usize..=2, t in 0.05f64..1.5) {
        let mut rng = random::rng(seed);
        let h = random::random_q(&mut rng, d);
        let fm = hamilton_map(&h);
        // a singular value of Im M near the kernel threshold has no well-defined rank
        let sv = linalg::singular_values(&fm.propagator_matrix(t).map(|z| z.im));
        prop_assume!(sv.iter().all(|&s| s < 1e-15 * sv[0] || s > 1e-9 * sv[0]));
        let b = kernel_wf_bound(&fm, t).unwrap();
        let lam = graph_lagrangian(&fm, t).unwrap();
        let rp = real_points(&normal_form(&lam).unwrap()).refined;
        prop_assert!(rp.distance(&b) < 1e-8, "dims {} vs {}", rp.dim(), b.dim());
    }
}
