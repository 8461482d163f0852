use gabor_wf::hamiltonian::*;
use gabor_wf::linalg::{self, c64, CMat, RMat, RVec, Subspace, DEFAULT_TOL, I};
use gabor_wf::random;
use gabor_wf::scenario::{catalog_hamiltonian, degenerate_diffusion_q};
use proptest::prelude::*;

fn space(name: &str) -> Subspace {
    let h = QuadraticHamiltonian::new(catalog_hamiltonian(name).unwrap()).unwrap();
    singular_space(&hamilton_map(&h), DEFAULT_TOL).s
}

#[test]
fn singular_spaces_of_the_worked_examples() {
    let x = Subspace::coordinate(2, &[0]);
    let xi = Subspace::coordinate(2, &[1]);
    assert!(space("heat").distance(&x) < 1e-9);
    assert!(space("multiplication").distance(&xi) < 1e-9);
    assert!(space("complex_heat").distance(&x) < 1e-9);
    assert_eq!(space("harmonic_potential").dim(), 0);
    assert_eq!(space("mixed").dim(), 0);
    assert_eq!(space("free_schrodinger").dim(), 2);
    assert_eq!(space("harmonic_oscillator").dim(), 2);
    assert_eq!(space("degenerate_diffusion").dim(), 0);
    let d3 = Subspace::coordinate(6, &[2, 5]);
    assert!(space("degenerate_diffusion_d3").distance(&d3) < 1e-9);
}

#[test]
fn degenerate_hamilton_map_matches_closed_form() {
    // y_j = i(ξ_j + x_{j+1}), y_d = iξ_d, η_1 = −x_1, η_j = −iξ_{j−1}
    let d = 4;
    let fm = hamilton_map(&QuadraticHamiltonian::new(degenerate_diffusion_q(d)).unwrap());
    let mut want = CMat::zeros(2 * d, 2 * d);
    for j in 0..d {
        want[(j, d + j)] = I;
        if j + 1 < d {
            want[(j, j + 1)] = I;
        }
    }
    want[(d, 0)] = c64(-1.0, 0.0);
    for j in 1..d {
        want[(d + j, d + j - 1)] = -I;
    }
    assert!((&fm.f - want).norm() < 1e-15);
    assert_eq!(singular_space(&fm, DEFAULT_TOL).s.dim(), 0);
}

#[test]
fn kernel_dimensions_shrink() {
    let fm = hamilton_map(&QuadraticHamiltonian::new(degenerate_diffusion_q(3)).unwrap());
    let r = singular_space(&fm, DEFAULT_TOL);
    assert_eq!(r.kernel_dims[0], 5);
    assert!(r.kernel_dims.windows(2).all(|w| w[1] <= 6));
}

#[test]
fn normal_symbol_reduces_to_real_kernel() {
    let mut rng = random::rng(7);
    for _ in 0..20 {
        let h = random::random_normal_q(&mut rng, 2);
        let fm = hamilton_map(&h);
        assert!(normality_defect(&fm) < 1e-10);
        let s = singular_space(&fm, DEFAULT_TOL).s;
        let k = linalg::nullspace(&fm.f_re, DEFAULT_TOL);
        assert!(s.distance(&k) < 1e-9);
    }
}

#[test]
fn flow_identity_sign_on_s() {
    let h = QuadraticHamiltonian::new(catalog_hamiltonian("complex_heat").unwrap()).unwrap();
    let fm = hamilton_map(&h);
    let x = linalg::to_complex(&RMat::from_column_slice(2, 1, &[1.0, 0.0]));
    let t = 0.7;
    let lhs = fm.propagator_matrix(t) * &x;
    let rhs = linalg::to_complex(&fm.im_flow(t)) * &x;
    assert!((lhs - rhs).norm() < 1e-12);
}

fn classify_agrees(h: &QuadraticHamiltonian, s: &Subspace, rng: &mut impl rand::Rng) -> bool {
    let n = 2 * h.d();
    let ts = default_flow_times(h.d(), 1.0);
    let v = random::random_real_vec(rng, n);
    let inside = s.project(&v);
    let outside = v - &inside;
    let mut ok = true;
    if inside.norm() > 1e-6 {
        ok &= flow_vanishing_membership(h, &inside.normalize(), &ts).unwrap();
    }
    if outside.norm() > 1e-6 {
        ok &= !flow_vanishing_membership(h, &outside.normalize(), &ts).unwrap();
    }
    ok
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn propagator_is_symplectic_and_positive(seed in any::<u64>(), d in 1usize..=3) {
        // rounding M alone moves MᵀJM by ~eps·‖M‖², so the bound scales with ‖M‖²
        let mut rng = random::rng(seed);
        let h = random::random_q(&mut rng, d);
        let fm = hamilton_map(&h);
        let samples: Vec<_> = (0..8).map(|_| random::random_complex_vec(&mut rng, 2 * d)).collect();
        for k in 0..50 {
            let t = 5.0 * k as f64 / 49.0;
            let m = fm.propagator_matrix(t);
            let scale = linalg::opnorm(&m).powi(2).max(1.0);
            let res = linalg::symplectic_residual(&m).unwrap();
            prop_assert!(res < 1e-13 * scale, "t {t}: residual {res:e}, ‖M‖² {scale:e}");
            let def = linalg::graph_positivity_defect(&fm.f, t, &samples).unwrap();
            prop_assert!(def >= -1e-12 * scale, "t {t}: defect {def:e}, ‖M‖² {scale:e}");
            if scale < 1e3 {
                prop_assert!(res < 1e-10 && def >= -1e-10);
            }
        }
    }

    #[test]
    fn singular_space_routes_agree(seed in any::<u64>(), d in 1usize..=3) {
        let mut rng = random::rng(seed);
        let h = random::random_q(&mut rng, d);
        let fm = hamilton_map(&h);
        let s = singular_space(&fm, DEFAULT_TOL).s;
        let k = singular_space_via_flow_kernels(&fm, 1.0, 4 * d + 1, DEFAULT_TOL).unwrap();
        prop_assert!(s.distance(&k) < 1e-8, "distance {}", s.distance(&k));
        prop_assert!(classify_agrees(&h, &s, &mut rng));
    }

    #[test]
    fn singular_space_is_stable(seed in any::<u64>(), d in 1usize..=3) {
        let mut rng = random::rng(seed);
        let h = random::random_q(&mut rng, d);
        let fm = hamilton_map(&h);
        let s = singular_space(&fm, DEFAULT_TOL).s;
        let (a, b) = stability_residuals(&fm, &s);
        prop_assert!(a < 1e-9 && b < 1e-9);
        // flow identity on S
        for c in s.basis().column_iter() {
            let x = linalg::to_complex(&RMat::from_column_slice(2 * d, 1, c.as_slice()));
            let lhs = fm.propagator_matrix(0.4) * &x;
            let rhs = linalg::to_complex(&fm.im_flow(0.4)) * &x;
            prop_assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn flow_oracle_is_scale_invariant(seed in any::<u64>(), c in 1e-3f64..1e3) {
        let mut rng = random::rng(seed);
        let h = random::random_q(&mut rng, 2);
        let s = singular_space(&hamilton_map(&h), DEFAULT_TOL).s;
        if s.dim() > 0 {
            let v: RVec = s.basis().column(0).into();
            let ts = default_flow_times(2, 1.0);
            prop_assert!(flow_vanishing_membership(&h, &(v * c), &ts).unwrap());
        }
    }
}
