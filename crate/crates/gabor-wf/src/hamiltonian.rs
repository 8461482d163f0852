//! Quadratic forms `q(X) = ⟨X, QX⟩`, the Hamilton map `F = JQ` and the
//! singular space.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, expm, im_part, is_psd_real, j_complex, re_part, stack_normalized, CMat, RMat, RVec,
    Subspace, DEFAULT_TOL,
};

/// Symmetric complex 2d×2d matrix Q with `Re Q ⪰ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticHamiltonian {
    d: usize,
    q: CMat,
}

impl QuadraticHamiltonian {
    pub fn new(q: CMat) -> Result<Self> {
        let (r, c) = q.shape();
        if r != c || r % 2 != 0 || r == 0 {
            return Err(Error::InvalidHamiltonian(format!(
                "Q must be a nonempty square matrix of even size, got {r}x{c}"
            )));
        }
        let scale = q.norm();
        let asym = (&q - q.transpose()).norm();
        if asym > 1e-12 * scale.max(1e-300) && asym > 0.0 {
            return Err(Error::InvalidHamiltonian(format!(
                "Q is not symmetric (defect {asym:e})"
            )));
        }
        let q = (&q + q.transpose()) * Complex64::new(0.5, 0.0);
        if !is_psd_real(&re_part(&q), 1e-10).map_err(|e| Error::InvalidHamiltonian(e.to_string()))? {
            return Err(Error::InvalidHamiltonian(format!(
                "Re Q is not positive semidefinite (min eigenvalue {:e})",
                linalg::min_eigenvalue(&linalg::to_complex(&re_part(&q)))
            )));
        }
        Ok(QuadraticHamiltonian { d: r / 2, q })
    }

    pub fn from_parts(re: &RMat, im: &RMat) -> Result<Self> {
        if re.shape() != im.shape() {
            return Err(Error::Dimension("real and imaginary parts differ in shape".into()));
        }
        Self::new(re.zip_map(im, Complex64::new))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> &CMat {
        &self.q
    }

    /// `q(X)` for complex X (bilinear, no conjugation).
    pub fn eval(&self, x: &linalg::CVec) -> Complex64 {
        (x.transpose() * &self.q * x)[(0, 0)]
    }

    /// `Re q(X)` for real X.
    pub fn re_eval(&self, x: &RVec) -> f64 {
        (x.transpose() * re_part(&self.q) * x)[(0, 0)]
    }

    pub fn re_norm(&self) -> f64 {
        re_part(&self.q).norm()
    }

    /// The form −q, admissible only when `Re Q = 0`.
    pub fn negated(&self) -> Result<Self> {
        Self::new(-self.q.clone())
    }
}

/// `F = JQ` with its real and imaginary parts.
#[derive(Clone, Debug)]
pub struct HamiltonMap {
    pub f: CMat,
    pub f_re: RMat,
    pub f_im: RMat,
}

impl HamiltonMap {
    pub fn d(&self) -> usize {
        self.f.nrows() / 2
    }

    /// `e^{-2itF}`.
    pub fn propagator_matrix(&self, t: f64) -> CMat {
        expm(&(&self.f * Complex64::new(0.0, -2.0 * t))).expect("square")
    }

    /// `e^{2t Im F}`, the flow of the Hamilton field of Im q.
    pub fn im_flow(&self, t: f64) -> RMat {
        let e = expm(&linalg::to_complex(&(&self.f_im * (2.0 * t)))).expect("square");
        re_part(&e)
    }
}

pub fn hamilton_map(h: &QuadraticHamiltonian) -> HamiltonMap {
    let f = j_complex(h.d()) * h.q();
    HamiltonMap {
        f_re: re_part(&f),
        f_im: im_part(&f),
        f,
    }
}

#[derive(Clone, Debug)]
pub struct SingularSpaceResult {
    pub s: Subspace,
    pub j_max_used: usize,
    /// `dim Ker[Re F (Im F)^j]` for j = 0..=j_max_used.
    pub kernel_dims: Vec<usize>,
}

const NOISE: f64 = 1e-12;

/// `S = ∩_{j<2d} Ker[Re F (Im F)^j] ∩ ℝ^{2d}`.
pub fn singular_space(fm: &HamiltonMap, tol: f64) -> SingularSpaceResult {
    singular_space_depth(fm, tol, 2 * fm.d() - 1)
}

/// Same as [`singular_space`] with the kernel stack running to `j_max`.
pub fn singular_space_depth(fm: &HamiltonMap, tol: f64, j_max: usize) -> SingularSpaceResult {
    let mut blocks = Vec::with_capacity(j_max + 1);
    let mut k = fm.f_re.clone();
    let im_norm = fm.f_im.norm();
    let mut scale = fm.f_re.norm();
    for _ in 0..=j_max {
        // products that cancel to rounding noise must not be rescaled to unit size
        let mut b = k.clone();
        if b.norm() <= NOISE * scale {
            b.fill(0.0);
        }
        blocks.push(b);
        k = &k * &fm.f_im;
        scale *= im_norm;
    }
    let kernel_dims = blocks
        .iter()
        .map(|b| linalg::nullspace(b, tol).dim())
        .collect();
    let s = linalg::nullspace(&stack_normalized(&blocks), tol);
    SingularSpaceResult {
        s,
        j_max_used: j_max,
        kernel_dims,
    }
}

/// `(‖Re F·B‖, ‖(I − P_S) Im F·B‖)` for the basis B of S.
pub fn stability_residuals(fm: &HamiltonMap, s: &Subspace) -> (f64, f64) {
    if s.dim() == 0 {
        return (0.0, 0.0);
    }
    let b = s.basis();
    let n = s.ambient_dim();
    let a = (&fm.f_re * b).norm();
    let c = ((RMat::identity(n, n) - s.projector()) * &fm.f_im * b).norm();
    (a, c)
}

/// `‖[Re F, Im F]‖`; zero iff q and q̄ Poisson-commute.
pub fn normality_defect(fm: &HamiltonMap) -> f64 {
    (&fm.f_re * &fm.f_im - &fm.f_im * &fm.f_re).norm()
}

/// `4d + 1` equally spaced times in (0, t].
pub fn default_flow_times(d: usize, t: f64) -> Vec<f64> {
    let n = 4 * d + 1;
    (1..=n).map(|k| t * k as f64 / n as f64).collect()
}

fn distinct_count(ts: &[f64]) -> usize {
    let mut v: Vec<f64> = ts.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v.len()
}

/// Brute-force membership in S: `Re q(e^{2s Im F} X) ≤ tol(1 + ‖X‖²)` for all
/// sampled s.
pub fn flow_vanishing_membership(
    h: &QuadraticHamiltonian,
    x: &RVec,
    t_grid: &[f64],
) -> Result<bool> {
    flow_vanishing_membership_tol(h, x, t_grid, DEFAULT_TOL)
}

pub fn flow_vanishing_membership_tol(
    h: &QuadraticHamiltonian,
    x: &RVec,
    t_grid: &[f64],
    tol: f64,
) -> Result<bool> {
    let need = 4 * h.d() + 1;
    if distinct_count(t_grid) < need {
        return Err(Error::Domain(format!(
            "need at least {need} distinct sample times, got {}",
            distinct_count(t_grid)
        )));
    }
    if x.len() != 2 * h.d() {
        return Err(Error::Dimension(format!(
            "vector of length {} for d = {}",
            x.len(),
            h.d()
        )));
    }
    let fm = hamilton_map(h);
    let bound = tol * (1.0 + x.norm_squared());
    Ok(t_grid.iter().all(|&s| {
        let y = fm.im_flow(s) * x;
        h.re_eval(&y) <= bound
    }))
}

/// S as the intersection over sampled s ∈ (0, t] of `Ker_ℝ Im e^{2isF}`.
pub fn singular_space_via_flow_kernels(
    fm: &HamiltonMap,
    t: f64,
    n_samples: usize,
    tol: f64,
) -> Result<Subspace> {
    let d = fm.d();
    if n_samples < 4 * d + 1 {
        return Err(Error::Domain(format!(
            "n_samples = {n_samples} < 4d + 1 = {}",
            4 * d + 1
        )));
    }
    if t <= 0.0 {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let blocks: Vec<RMat> = (1..=n_samples)
        .map(|k| {
            let s = t * k as f64 / n_samples as f64;
            let e = expm(&(&fm.f * Complex64::new(0.0, 2.0 * s))).expect("square");
            let mut b = im_part(&e);
            if b.norm() <= NOISE * e.norm() {
                b.fill(0.0);
            }
            b
        })
        .collect();
    Ok(linalg::nullspace(&stack_normalized(&blocks), tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn diag(entries: &[Complex64]) -> CMat {
        CMat::from_diagonal(&linalg::CVec::from_vec(entries.to_vec()))
    }

    #[test]
    fn heat_map_and_space() {
        let h = QuadraticHamiltonian::new(diag(&[c64(0.0, 0.0), c64(1.0, 0.0)])).unwrap();
        let fm = hamilton_map(&h);
        assert_eq!(fm.f_re, RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        let s = singular_space(&fm, DEFAULT_TOL).s;
        assert!(s.same_as(&Subspace::coordinate(2, &[0]), 1e-12));
        assert_eq!(normality_defect(&fm), 0.0);
    }

    #[test]
    fn rejects_bad_q() {
        let mut q = CMat::zeros(2, 2);
        q[(0, 1)] = c64(1.0, 0.0);
        assert!(QuadraticHamiltonian::new(q).is_err());
        assert!(QuadraticHamiltonian::new(diag(&[c64(-1.0, 0.0), c64(1.0, 0.0)])).is_err());
        assert!(QuadraticHamiltonian::new(CMat::zeros(3, 3)).is_err());
    }

    #[test]
    fn flow_membership_requires_samples() {
        let h = QuadraticHamiltonian::new(diag(&[c64(0.0, 0.0), c64(1.0, 0.0)])).unwrap();
        let x = RVec::from_vec(vec![1.0, 0.0]);
        assert!(flow_vanishing_membership(&h, &x, &[0.1, 0.2]).is_err());
        assert!(flow_vanishing_membership(&h, &x, &default_flow_times(1, 1.0)).unwrap());
    }
}
