//! Positive Lagrangians in complex phase space: Gaussian generators, the
//! normal form `{(x, 2Rx + Lθ) : Lᵀx = 0}`, real points and the twisted graph
//! of the propagator.

use nalgebra::ColPivQR;
use num_complex::Complex64;

use crate::error::{Error, GeneratorError, Result};
use crate::hamiltonian::HamiltonMap;
use crate::linalg::{
    self, im_part, is_psd, j_complex, pinv, re_part, real_kernel, span_basis_scaled, to_complex,
    CMat, CVec, RMat, Subspace, I,
};

const GEN_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-9;

/// Complex symmetric `(d+N)×(d+N)` matrix P with `Im P ⪰ 0` and `[P_θx P_θθ]`
/// of full row rank. The phase is `p(x,θ) = ⟨(x,θ), P(x,θ)⟩`.
#[derive(Clone, Debug)]
pub struct GaussianGenerator {
    d: usize,
    n: usize,
    p: CMat,
}

impl GaussianGenerator {
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn p(&self) -> &CMat {
        &self.p
    }
    pub fn p_xx(&self) -> CMat {
        self.p.view((0, 0), (self.d, self.d)).into_owned()
    }
    pub fn p_xt(&self) -> CMat {
        self.p.view((0, self.d), (self.d, self.n)).into_owned()
    }
    pub fn p_tx(&self) -> CMat {
        self.p.view((self.d, 0), (self.n, self.d)).into_owned()
    }
    pub fn p_tt(&self) -> CMat {
        self.p.view((self.d, self.d), (self.n, self.n)).into_owned()
    }
    /// `[P_θx P_θθ]`.
    pub fn theta_rows(&self) -> CMat {
        self.p.rows(self.d, self.n).into_owned()
    }

    /// `(p′_x, p′_θ)` at a point.
    pub fn gradient(&self, x: &CVec, theta: &CVec) -> (CVec, CVec) {
        let mut v = CVec::zeros(self.d + self.n);
        v.rows_mut(0, self.d).copy_from(x);
        v.rows_mut(self.d, self.n).copy_from(theta);
        let g = &self.p * v * Complex64::new(2.0, 0.0);
        (g.rows(0, self.d).into_owned(), g.rows(self.d, self.n).into_owned())
    }
}

pub fn validate_generator(p: &CMat, d: usize, n: usize) -> Result<GaussianGenerator> {
    let m = d + n;
    if p.shape() != (m, m) {
        return Err(GeneratorError::Shape(p.nrows(), p.ncols(), m).into());
    }
    let scale = p.norm().max(1.0);
    let asym = (p - p.transpose()).norm();
    if asym > GEN_TOL * scale {
        return Err(GeneratorError::NotSymmetric(asym).into());
    }
    let p = (p + p.transpose()) * Complex64::new(0.5, 0.0);
    let im = im_part(&p);
    if m > 0 {
        let min = linalg::min_eigenvalue(&to_complex(&im));
        if min < -GEN_TOL * scale {
            return Err(GeneratorError::ImPartNotPsd(min).into());
        }
    }
    if n > 0 {
        let rows = p.rows(d, n).into_owned();
        let s = linalg::singular_values(&rows);
        let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
        if smin <= GEN_TOL * scale {
            return Err(GeneratorError::ThetaRowsDependent(smin).into());
        }
    }
    Ok(GaussianGenerator { d, n, p })
}

/// Coefficients with `θ = Ax + B p′_x + C p′_θ` identically.
#[derive(Clone, Debug)]
pub struct ReductionCoefficients {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
}

/// `[B C] = ½·pinv([P_xθ; P_θθ])`, the minimum-norm left inverse, and
/// `A = −2(B P_xx + C P_θx)`.
pub fn reduction_coefficients(g: &GaussianGenerator) -> ReductionCoefficients {
    let (d, n) = (g.d, g.n);
    let w = g.p.columns(d, n).into_owned();
    let bc = pinv(&w, 1e-14) * Complex64::new(0.5, 0.0);
    let b = bc.columns(0, d).into_owned();
    let c = bc.columns(d, n).into_owned();
    let a = (&b * g.p_xx() + &c * g.p_tx()) * Complex64::new(-2.0, 0.0);
    ReductionCoefficients { a, b, c }
}

impl ReductionCoefficients {
    /// `‖2[B C]·[P_xθ; P_θθ] − I‖`.
    pub fn left_inverse_residual(&self, g: &GaussianGenerator) -> f64 {
        let n = g.n;
        let w = g.p.columns(g.d, n).into_owned();
        let mut bc = CMat::zeros(n, g.d + n);
        bc.columns_mut(0, g.d).copy_from(&self.b);
        bc.columns_mut(g.d, n).copy_from(&self.c);
        (bc * w * Complex64::new(2.0, 0.0) - CMat::identity(n, n)).norm()
    }

    /// `‖θ − (Ax + B p′_x + C p′_θ)‖` at one point.
    pub fn identity_residual(&self, g: &GaussianGenerator, x: &CVec, theta: &CVec) -> f64 {
        let (px, pt) = g.gradient(x, theta);
        (theta - (&self.a * x + &self.b * px + &self.c * pt)).norm()
    }
}

/// Complex Lagrangian subspace of `ℂ^{2n}` spanned by the columns of Z.
#[derive(Clone, Debug)]
pub struct ComplexLagrangian {
    half_dim: usize,
    z: CMat,
}

impl ComplexLagrangian {
    /// Orthonormal span of the columns via QR with column pivoting.
    pub fn from_spanning(z: &CMat) -> Result<Self> {
        let (r, c) = z.shape();
        if r % 2 != 0 {
            return Err(Error::Dimension(format!("odd ambient dimension {r}")));
        }
        if c == 0 {
            return Ok(ComplexLagrangian {
                half_dim: r / 2,
                z: CMat::zeros(r, 0),
            });
        }
        let qr = ColPivQR::new(z.clone());
        let rr = qr.r();
        let r00 = rr[(0, 0)].norm();
        let rank = (0..rr.nrows().min(rr.ncols()))
            .filter(|&i| r00 > 0.0 && rr[(i, i)].norm() > RANK_TOL * r00)
            .count();
        let q = qr.q().columns(0, rank).into_owned();
        Ok(ComplexLagrangian { half_dim: r / 2, z: q })
    }

    pub fn half_dim(&self) -> usize {
        self.half_dim
    }
    pub fn dim(&self) -> usize {
        self.z.ncols()
    }
    pub fn z(&self) -> &CMat {
        &self.z
    }

    /// `‖ZᵀJZ‖`.
    pub fn lagrangian_defect(&self) -> f64 {
        (self.z.transpose() * j_complex(self.half_dim) * &self.z).norm()
    }

    /// `−i·Z^H J Z`, whose quadratic form is `iσ(X̄, X)` on λ.
    pub fn positivity_matrix(&self) -> CMat {
        let h = self.z.adjoint() * j_complex(self.half_dim) * &self.z * Complex64::new(0.0, -1.0);
        (&h + h.adjoint()) * Complex64::new(0.5, 0.0)
    }

    pub fn min_positivity(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        linalg::min_eigenvalue(&self.positivity_matrix())
    }

    pub fn is_lagrangian(&self, tol: f64) -> bool {
        self.dim() == self.half_dim && self.lagrangian_defect() < tol
    }

    pub fn is_positive(&self, tol: f64) -> bool {
        self.dim() == 0 || is_psd(&self.positivity_matrix(), tol).unwrap_or(false)
    }

    pub fn projector(&self) -> CMat {
        &self.z * self.z.adjoint()
    }

    /// Spectral norm of the projector difference; infinite on dimension mismatch.
    pub fn distance(&self, other: &ComplexLagrangian) -> f64 {
        if self.half_dim != other.half_dim || self.dim() != other.dim() {
            return f64::INFINITY;
        }
        linalg::opnorm(&(self.projector() - other.projector()))
    }

    /// `λ ∩ ℝ^{2n}` computed directly as the real kernel of `I − P`.
    pub fn real_points_direct(&self) -> Subspace {
        let n = 2 * self.half_dim;
        real_kernel(&(CMat::identity(n, n) - self.projector()), RANK_TOL)
    }
}

/// Flip the sign of the fourth coordinate block of a `4d`-row matrix.
pub fn twist(z: &CMat) -> Result<CMat> {
    let r = z.nrows();
    if r % 4 != 0 {
        return Err(Error::Dimension(format!("{r} rows is not a multiple of 4")));
    }
    let d = r / 4;
    let mut out = z.clone();
    for i in 3 * d..4 * d {
        for v in out.row_mut(i).iter_mut() {
            *v = -*v;
        }
    }
    Ok(out)
}

/// `{(x, p′_x) : p′_θ = 0}`.
pub fn lagrangian_of_generator(g: &GaussianGenerator) -> ComplexLagrangian {
    let (d, n) = (g.d, g.n);
    let k = if n == 0 {
        CMat::identity(d, d)
    } else {
        linalg::null_basis(&g.theta_rows(), RANK_TOL)
    };
    let mut z = CMat::zeros(2 * d, k.ncols());
    z.rows_mut(0, d).copy_from(&k.rows(0, d));
    let px = g.p.rows(0, d).into_owned();
    z.rows_mut(d, d).copy_from(&(px * &k * Complex64::new(2.0, 0.0)));
    ComplexLagrangian::from_spanning(&z).expect("even ambient dimension")
}

/// Normal form `λ = {(x, 2Rx + Lθ) : Lᵀx = 0, θ ∈ ℂ^N}` with
/// `R = R_r + iR_i`, `R_i ⪰ 0` and `Ran R ⊥ Ran L`.
#[derive(Clone, Debug)]
pub struct LagrangianParam {
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub r_r: RMat,
    pub r_i: RMat,
    pub l: RMat,
    /// Orthonormal basis of the real first-coordinate projection.
    pub u: RMat,
    /// Smallest singular value kept and largest dropped when fixing k.
    pub rank_gap: (f64, f64),
    /// Smallest eigenvalue of the imaginary part of the auxiliary matrix.
    pub aux_min_positivity: f64,
}

impl LagrangianParam {
    pub fn r(&self) -> CMat {
        self.r_r.zip_map(&self.r_i, Complex64::new)
    }

    /// `‖Lᵀ R‖`.
    pub fn orthorange_defect(&self) -> f64 {
        (to_complex(&self.l.transpose()) * self.r()).norm()
    }
}

pub fn normal_form(lam: &ComplexLagrangian) -> Result<LagrangianParam> {
    let d = lam.half_dim;
    if lam.dim() != d {
        return Err(Error::Dimension(format!(
            "expected a {d}-dimensional Lagrangian, got dimension {}",
            lam.dim()
        )));
    }
    let h = lam.positivity_matrix();
    let hscale = linalg::opnorm(&h).max(1.0);
    if !is_psd(&h, 1e-9 * hscale)? {
        return Err(Error::NotPositive(linalg::min_eigenvalue(&h)));
    }
    let z = lam.z();
    let zx = z.rows(0, d).into_owned();
    let (b1, sv) = span_basis_scaled(&zx, RANK_TOL, 1.0);
    let k = b1.ncols();
    let kept = if k > 0 { sv[k - 1] } else { 0.0 };
    let dropped = sv.get(k).cloned().unwrap_or(0.0);

    let mut reim = RMat::zeros(d, 2 * k);
    reim.columns_mut(0, k).copy_from(&re_part(&b1));
    reim.columns_mut(k, k).copy_from(&im_part(&b1));
    let (u, _) = span_basis_scaled(&reim, RANK_TOL, 1.0);
    if u.ncols() != k {
        return Err(Error::Domain(format!(
            "first-coordinate projection is not real: real span has dimension {} != {k}",
            u.ncols()
        )));
    }
    let l = Subspace::new(u.clone(), 1e-8)?.complement().basis().clone();
    let n = d - k;
    if k == 0 {
        return Ok(LagrangianParam {
            d,
            n,
            k,
            r_r: RMat::zeros(d, d),
            r_i: RMat::zeros(d, d),
            l,
            u,
            rank_gap: (kept, dropped),
            aux_min_positivity: f64::NAN,
        });
    }
    let mut t = RMat::zeros(d, d);
    t.columns_mut(0, k).copy_from(&u);
    t.columns_mut(k, n).copy_from(&l);
    let tt = to_complex(&t.transpose());
    let xt = &tt * z.rows(0, d);
    let xi = &tt * z.rows(d, d);

    // auxiliary strictly positive Λ: (x′,0) ↦ i(x′,0) + (ξ′,0), plus (e_j, i e_j) for j ≥ k
    let cols = z.ncols() + n;
    let mut xs = CMat::zeros(d, cols);
    let mut ys = CMat::zeros(d, cols);
    for c in 0..z.ncols() {
        for r in 0..k {
            xs[(r, c)] = xt[(r, c)];
            ys[(r, c)] = I * xt[(r, c)] + xi[(r, c)];
        }
    }
    for j in 0..n {
        xs[(k + j, z.ncols() + j)] = Complex64::new(1.0, 0.0);
        ys[(k + j, z.ncols() + j)] = I;
    }
    let a = &ys * pinv(&xs, 1e-12);
    let a = (&a + a.transpose()) * Complex64::new(0.5, 0.0);
    let aux_min_positivity = linalg::min_eigenvalue(&to_complex(&im_part(&a)));
    let mut q = a.view((0, 0), (k, k)).into_owned();
    for i in 0..k {
        q[(i, i)] -= I;
    }
    let uc = to_complex(&u);
    let r = &uc * q * uc.transpose() * Complex64::new(0.5, 0.0);
    let r = (&r + r.transpose()) * Complex64::new(0.5, 0.0);
    Ok(LagrangianParam {
        d,
        n,
        k,
        r_r: re_part(&r),
        r_i: im_part(&r),
        l,
        u,
        rank_gap: (kept, dropped),
        aux_min_positivity,
    })
}

/// The Lagrangian `{(Ua, 2RUa + Lθ)}` described by a normal form.
pub fn param_lagrangian(p: &LagrangianParam) -> ComplexLagrangian {
    let d = p.d;
    let mut z = CMat::zeros(2 * d, d);
    let uc = to_complex(&p.u);
    z.view_mut((0, 0), (d, p.k)).copy_from(&uc);
    z.view_mut((d, 0), (d, p.k))
        .copy_from(&(p.r() * &uc * Complex64::new(2.0, 0.0)));
    z.view_mut((d, p.k), (d, p.n)).copy_from(&to_complex(&p.l));
    ComplexLagrangian::from_spanning(&z).expect("even ambient dimension")
}

/// Real points read off a normal form.
#[derive(Clone, Debug)]
pub struct RealPoints {
    /// `{(x, 2R_r x + Lθ) : Lᵀx = 0, θ ∈ ℝ^N}`.
    pub unrefined: Subspace,
    /// The same set restricted to `R_i x = 0`; this is exactly `λ ∩ ℝ^{2d}`.
    pub refined: Subspace,
}

pub fn real_points(p: &LagrangianParam) -> RealPoints {
    let d = p.d;
    let build = |a: &RMat| {
        let m = a.ncols();
        let mut s = RMat::zeros(2 * d, m + p.n);
        s.view_mut((0, 0), (d, m)).copy_from(a);
        s.view_mut((d, 0), (d, m)).copy_from(&(&p.r_r * a * 2.0));
        s.view_mut((d, m), (d, p.n)).copy_from(&p.l);
        Subspace::from_spanning(&s, RANK_TOL)
    };
    let unrefined = build(&p.u);
    let ri_u = &p.r_i * &p.u;
    let scale = p.r_i.norm().max(1.0);
    let ker = linalg::nullspace_scaled(&ri_u, linalg::KERNEL_TOL, scale);
    let refined = build(&(&p.u * ker.basis()));
    RealPoints { unrefined, refined }
}

/// `λ̃ = {X ∈ λ : σ(X̄, X) = 0}`, the kernel of the positivity matrix.
pub fn tilde_refine(lam: &ComplexLagrangian) -> ComplexLagrangian {
    if lam.dim() == 0 {
        return lam.clone();
    }
    let h = lam.positivity_matrix();
    let scale = linalg::opnorm(&h).max(1.0);
    let c = linalg::null_basis_scaled(&h, RANK_TOL, scale);
    if c.ncols() == 0 {
        return ComplexLagrangian {
            half_dim: lam.half_dim,
            z: CMat::zeros(2 * lam.half_dim, 0),
        };
    }
    ComplexLagrangian::from_spanning(&(lam.z() * c)).expect("even ambient dimension")
}

/// Twisted graph `{(x, y, ξ, −η) : (x, ξ) = e^{−2itF}(y, η)}` in `ℂ^{4d}`.
pub fn graph_lagrangian(fm: &HamiltonMap, t: f64) -> Result<ComplexLagrangian> {
    if t < 0.0 {
        return Err(Error::Domain(format!("t = {t} < 0")));
    }
    let d = fm.d();
    let m = fm.propagator_matrix(t);
    let mut z = CMat::zeros(4 * d, 2 * d);
    z.view_mut((0, 0), (d, 2 * d)).copy_from(&m.rows(0, d));
    z.view_mut((d, 0), (d, d)).fill_with_identity();
    z.view_mut((2 * d, 0), (d, 2 * d)).copy_from(&m.rows(d, d));
    z.view_mut((3 * d, d), (d, d)).fill_with_identity();
    let z = twist(&z)?;
    ComplexLagrangian::from_spanning(&z)
}

/// Real subspace of `ℝ^{4d}`: `(Re M(y,η)_x, y, Re M(y,η)_ξ, −η)` for
/// `(y, η) ∈ Ker_ℝ Im M`, `M = e^{−2itF}`.
pub fn kernel_wf_bound(fm: &HamiltonMap, t: f64) -> Result<Subspace> {
    if t <= 0.0 {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let d = fm.d();
    let m = fm.propagator_matrix(t);
    let scale = linalg::opnorm(&m);
    let ker = linalg::nullspace_scaled(&im_part(&m), linalg::KERNEL_TOL, scale);
    let k = ker.basis();
    let img = re_part(&m) * k;
    let mut s = RMat::zeros(4 * d, k.ncols());
    s.view_mut((0, 0), (d, k.ncols())).copy_from(&img.rows(0, d));
    s.view_mut((d, 0), (d, k.ncols())).copy_from(&k.rows(0, d));
    s.view_mut((2 * d, 0), (d, k.ncols())).copy_from(&img.rows(d, d));
    s.view_mut((3 * d, 0), (d, k.ncols())).copy_from(&(-k.rows(d, d)));
    Ok(Subspace::from_spanning(&s, RANK_TOL))
}
