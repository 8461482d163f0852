//! Seeded random admissible Hamiltonians, generators and vectors.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hamiltonian::QuadraticHamiltonian;
use crate::lagrangian::{validate_generator, GaussianGenerator};
use crate::linalg::{expm, j_matrix, re_part, to_complex, CMat, CVec, RMat, RVec};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_mat<R: Rng>(rng: &mut R, r: usize, c: usize) -> RMat {
    RMat::from_fn(r, c, |_, _| rng.random_range(-1.0..=1.0))
}

pub fn sym(g: &RMat) -> RMat {
    (g + g.transpose()) * 0.5
}

pub fn random_real_vec<R: Rng>(rng: &mut R, n: usize) -> RVec {
    RVec::from_fn(n, |_, _| rng.random_range(-1.0..=1.0))
}

pub fn random_complex_vec<R: Rng>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| {
        Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
    })
}

/// `AᵀA` with each row of A zeroed with probability `p_zero`, so the rank
/// varies.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize, p_zero: f64) -> RMat {
    let mut a = uniform_mat(rng, n, n);
    for i in 0..n {
        if rng.random_bool(p_zero) {
            a.row_mut(i).fill(0.0);
        }
    }
    a.transpose() * a
}

/// Random real symplectic matrix `e^{J·Sym(G)·scale}`.
pub fn random_symplectic<R: Rng>(rng: &mut R, d: usize, scale: f64) -> RMat {
    let g = sym(&uniform_mat(rng, 2 * d, 2 * d)) * scale;
    (j_matrix(d) * g).exp()
}

/// Generic admissible Q: `Re Q = AᵀA` with random rank, `Im Q` symmetric.
pub fn random_admissible_q<R: Rng>(rng: &mut R, d: usize) -> QuadraticHamiltonian {
    let re = random_psd(rng, 2 * d, 0.4);
    let im = sym(&uniform_mat(rng, 2 * d, 2 * d));
    QuadraticHamiltonian::from_parts(&re, &im).expect("admissible by construction")
}

/// Q conjugated by a real symplectic map from a block form in which the
/// first `d1` coordinate pairs carry a purely imaginary part. The singular
/// space then tends to be nontrivial.
pub fn random_structured_q<R: Rng>(rng: &mut R, d: usize) -> QuadraticHamiltonian {
    let d1 = rng.random_range(1..=d);
    let n = 2 * d;
    let a_idx: Vec<usize> = (0..d1).chain(d..d + d1).collect();
    let b_idx: Vec<usize> = (d1..d).chain(d + d1..n).collect();
    let mut re = RMat::zeros(n, n);
    let mut im = RMat::zeros(n, n);
    let ga = sym(&uniform_mat(rng, a_idx.len(), a_idx.len()));
    for (i, &p) in a_idx.iter().enumerate() {
        for (j, &q) in a_idx.iter().enumerate() {
            im[(p, q)] = ga[(i, j)];
        }
    }
    if !b_idx.is_empty() {
        let rb = random_psd(rng, b_idx.len(), 0.3);
        let gb = sym(&uniform_mat(rng, b_idx.len(), b_idx.len()));
        for (i, &p) in b_idx.iter().enumerate() {
            for (j, &q) in b_idx.iter().enumerate() {
                re[(p, q)] = rb[(i, j)];
                im[(p, q)] = gb[(i, j)];
            }
        }
    }
    let s = random_symplectic(rng, d, 0.3);
    let st = s.transpose();
    let re = sym(&(&st * re * &s));
    let im = sym(&(&st * im * &s));
    QuadraticHamiltonian::from_parts(&re, &im).expect("admissible by construction")
}

/// `Q = (a + ib)·B` with B real PSD, so `Re F` and `Im F` commute.
pub fn random_normal_q<R: Rng>(rng: &mut R, d: usize) -> QuadraticHamiltonian {
    let b = random_psd(rng, 2 * d, 0.3);
    let a: f64 = rng.random_range(0.0..=1.0);
    let c: f64 = rng.random_range(-1.0..=1.0);
    QuadraticHamiltonian::from_parts(&(&b * a), &(&b * c)).expect("admissible by construction")
}

/// One of the three families above, chosen at random.
pub fn random_q<R: Rng>(rng: &mut R, d: usize) -> QuadraticHamiltonian {
    match rng.random_range(0..3) {
        0 => random_admissible_q(rng, d),
        1 => random_structured_q(rng, d),
        _ => random_normal_q(rng, d),
    }
}

/// Random valid generator with `n` phase variables.
///
/// Either a generic `Sym(G₁) + i·BᵀB`, or (when `n ≤ d`) the normal form
/// `⟨x,Rx⟩ + ⟨Lθ,x⟩` with `Im R ⪰ 0`, which has a vanishing θθ block.
pub fn random_generator<R: Rng>(rng: &mut R, d: usize, n: usize) -> GaussianGenerator {
    loop {
        let p = if n <= d && rng.random_bool(0.5) {
            normal_form_generator(rng, d, n)
        } else {
            let m = d + n;
            let re = sym(&uniform_mat(rng, m, m));
            let im = random_psd(rng, m, 0.3);
            re.zip_map(&im, Complex64::new)
        };
        if let Ok(g) = validate_generator(&p, d, n) {
            return g;
        }
    }
}

fn normal_form_generator<R: Rng>(rng: &mut R, d: usize, n: usize) -> CMat {
    // L: d×n with orthonormal columns from a random orthogonal matrix
    let g = uniform_mat(rng, d, d);
    let o = re_part(&expm(&to_complex(&(&g - g.transpose()))).expect("square"));
    let l = o.columns(0, n).into_owned();
    let pi = RMat::identity(d, d) - &l * l.transpose();
    let rr = &pi * sym(&uniform_mat(rng, d, d)) * &pi;
    let ri = &pi * random_psd(rng, d, 0.4) * &pi;
    let r = rr.zip_map(&ri, Complex64::new);
    let m = d + n;
    let mut p = CMat::zeros(m, m);
    p.view_mut((0, 0), (d, d)).copy_from(&r);
    let lc = to_complex(&l) * Complex64::new(0.5, 0.0);
    p.view_mut((0, d), (d, n)).copy_from(&lc);
    p.view_mut((d, 0), (n, d)).copy_from(&lc.transpose());
    p
}
