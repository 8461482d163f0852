//! Dense linear algebra kernel: matrix exponential, null spaces, subspaces,
//! PSD tests and the complex symplectic form.

use nalgebra::{ComplexField, DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;
pub type CVec = DVector<Complex64>;
pub type RVec = DVector<f64>;

/// Default relative singular-value threshold for null spaces.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Threshold for real kernels of blocks of `e^{-2itF}`, whose smallest
/// nonzero singular values can sit far below `DEFAULT_TOL` for small t.
pub const KERNEL_TOL: f64 = 1e-12;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_complex(a: &RMat) -> CMat {
    a.map(|x| Complex64::new(x, 0.0))
}

pub fn re_part(a: &CMat) -> RMat {
    a.map(|z| z.re)
}

pub fn im_part(a: &CMat) -> RMat {
    a.map(|z| z.im)
}

/// `J = [[0, I], [-I, 0]]` of size 2d.
pub fn j_matrix(d: usize) -> RMat {
    let mut j = RMat::zeros(2 * d, 2 * d);
    for k in 0..d {
        j[(k, d + k)] = 1.0;
        j[(d + k, k)] = -1.0;
    }
    j
}

pub fn j_complex(d: usize) -> CMat {
    to_complex(&j_matrix(d))
}

/// Singular value decomposition `A V = U Σ` with square unitary `V`.
/// `s` has one entry per column of A, in decreasing order, and column j of
/// `u` is `A v_j / s_j` (zero where `s_j = 0`).
pub struct Svd<T: ComplexField<RealField = f64>> {
    pub u: DMatrix<T>,
    pub s: Vec<f64>,
    pub v: DMatrix<T>,
}

/// One-sided Jacobi SVD. nalgebra's bidiagonal complex SVD loses up to
/// ~1e-8 relative accuracy on some small structured matrices (exact zero
/// blocks, nearly real entries); Jacobi rotations stay at rounding level.
pub fn svd<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Svd<T> {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<T>::identity(n, n);
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, T::zero());
                for i in 0..m {
                    let (x, y) = (w[(i, p)].clone(), w[(i, q)].clone());
                    alpha += x.clone().modulus_squared();
                    beta += y.clone().modulus_squared();
                    gamma += x.conjugate() * y;
                }
                let g = gamma.clone().modulus();
                if g < f64::MIN_POSITIVE || g <= f64::EPSILON * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                // make the inner product real, then rotate as in the real case
                let phase = gamma.unscale(g).conjugate();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                rotate(&mut w, p, q, c, c * t, &phase);
                rotate(&mut v, p, q, c, c * t, &phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = w.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = DMatrix::<T>::zeros(m, n);
    let mut vs = DMatrix::<T>::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            u.set_column(k, &w.column(j).unscale(norms[j]));
        }
        vs.set_column(k, &v.column(j));
    }
    Svd {
        u,
        s: order.iter().map(|&j| norms[j]).collect(),
        v: vs,
    }
}

fn rotate<T: ComplexField<RealField = f64>>(a: &mut DMatrix<T>, p: usize, q: usize, c: f64, s: f64, phase: &T) {
    for i in 0..a.nrows() {
        let x = a[(i, p)].clone();
        let y = a[(i, q)].clone() * phase.clone();
        a[(i, p)] = x.clone().scale(c) - y.clone().scale(s);
        a[(i, q)] = x.scale(s) + y.scale(c);
    }
}

/// The `min(m, n)` singular values, largest first.
pub fn singular_values<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Vec<f64> {
    let k = a.nrows().min(a.ncols());
    if k == 0 {
        return vec![];
    }
    // Jacobi on the short side
    let mut s = if a.nrows() < a.ncols() { svd(&a.adjoint()).s } else { svd(a).s };
    s.truncate(k);
    s
}

/// Largest singular value.
pub fn opnorm<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    singular_values(a).first().cloned().unwrap_or(0.0)
}

fn check_square<T>(a: &DMatrix<T>, what: &str) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "{what}: expected square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

/// `‖AA^H − A^H A‖_F ≤ 1e-12 ‖A‖_F²`.
pub fn is_normal(a: &CMat) -> bool {
    let ah = a.adjoint();
    let defect = (a * &ah - &ah * a).norm();
    defect <= 1e-12 * a.norm_squared().max(f64::MIN_POSITIVE)
}

/// Matrix exponential.
///
/// Normal complex matrices go through a complex Schur form, which is diagonal
/// with a unitary factor. Real input and everything else uses Padé scaling
/// and squaring, so real input gives an exactly real result.
pub fn expm(a: &CMat) -> Result<CMat> {
    let n = check_square(a, "expm")?;
    if n == 0 {
        return Ok(a.clone());
    }
    if a.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(CMat::identity(n, n));
    }
    if a.iter().all(|z| z.im == 0.0) {
        return Ok(to_complex(&re_part(a).exp()));
    }
    if n > 1 && is_normal(a) {
        if let Some(e) = expm_normal(a) {
            return Ok(e);
        }
    }
    Ok(a.exp())
}

fn expm_normal(a: &CMat) -> Option<CMat> {
    let n = a.nrows();
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 10_000)?;
    let (q, t) = schur.unpack();
    let scale = a.norm().max(1.0);
    for j in 0..n {
        for i in 0..j {
            if t[(i, j)].norm() > 1e-10 * scale {
                return None;
            }
        }
    }
    let mut qd = q.clone();
    for j in 0..n {
        let e = t[(j, j)].exp();
        for i in 0..n {
            qd[(i, j)] *= e;
        }
    }
    Some(qd * q.adjoint())
}

fn canonical_sign<T: ComplexField<RealField = f64>>(m: &mut DMatrix<T>) {
    for mut col in m.column_iter_mut() {
        let mut best = 0usize;
        let mut best_mod = -1.0;
        for (i, v) in col.iter().enumerate() {
            let md = v.clone().modulus();
            if md > best_mod + 1e-12 {
                best_mod = md;
                best = i;
            }
        }
        if best_mod <= 0.0 {
            continue;
        }
        let pivot = col[best].clone();
        let phase = pivot.clone().conjugate().scale(1.0 / pivot.modulus());
        for v in col.iter_mut() {
            *v = v.clone() * phase.clone();
        }
    }
}

/// Orthonormal basis (columns) of `{v : ‖Av‖ ≤ tol·‖A‖·‖v‖}`.
pub fn null_basis<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    null_basis_scaled(a, tol, 0.0)
}

/// As [`null_basis`] with the threshold `tol·max(σ_max, scale)`, for inputs
/// whose natural size is known and which may be pure rounding noise.
pub fn null_basis_scaled<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    tol: f64,
    scale: f64,
) -> DMatrix<T> {
    let (m, n) = a.shape();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m == 0 {
        return DMatrix::identity(n, n);
    }
    let dec = svd(a);
    let smax = dec.s.first().cloned().unwrap_or(0.0).max(scale);
    if smax == 0.0 {
        return DMatrix::identity(n, n);
    }
    let rank = dec.s.iter().filter(|&&x| x > tol * smax).count().min(m);
    let mut out = dec.v.columns(rank, n - rank).into_owned();
    canonical_sign(&mut out);
    out
}

/// Orthonormal basis of the column span, dropping singular values below
/// `tol·σ_max`. Returns the basis and the singular values.
pub fn span_basis<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    tol: f64,
) -> (DMatrix<T>, Vec<f64>) {
    span_basis_scaled(a, tol, 0.0)
}

/// As [`span_basis`] with the threshold `tol·max(σ_max, scale)`.
pub fn span_basis_scaled<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    tol: f64,
    scale: f64,
) -> (DMatrix<T>, Vec<f64>) {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return (DMatrix::zeros(m, 0), vec![]);
    }
    let dec = svd(a);
    let mut s = dec.s;
    s.truncate(m.min(n));
    let smax = s.first().cloned().unwrap_or(0.0).max(scale);
    if smax == 0.0 {
        return (DMatrix::zeros(m, 0), s);
    }
    let rank = s.iter().filter(|&&x| x > tol * smax).count();
    let mut out = dec.u.columns(0, rank).into_owned();
    canonical_sign(&mut out);
    (out, s)
}

/// Moore–Penrose pseudo-inverse with relative cutoff `tol`.
pub fn pinv<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return DMatrix::zeros(n, m);
    }
    let dec = svd(a);
    let thr = tol * dec.s[0].max(f64::MIN_POSITIVE);
    let mut out = DMatrix::<T>::zeros(n, m);
    for (k, &sk) in dec.s.iter().enumerate().take_while(|(_, &sk)| sk > thr) {
        out += (dec.v.column(k) * dec.u.column(k).adjoint()).unscale(sk);
    }
    out
}

/// A real linear subspace of ℝⁿ stored as an orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: RMat,
    tol: f64,
}

impl Subspace {
    /// Wrap a basis that is already orthonormal.
    pub fn new(basis: RMat, tol: f64) -> Result<Self> {
        let k = basis.ncols();
        let gram = basis.transpose() * &basis;
        let defect = (gram - RMat::identity(k, k)).norm();
        if defect > 1e-8_f64.max(tol) {
            return Err(Error::Shape(format!(
                "basis is not orthonormal (defect {defect:e})"
            )));
        }
        Ok(Subspace {
            ambient_dim: basis.nrows(),
            basis,
            tol,
        })
    }

    /// Span of the columns of `m`.
    pub fn from_spanning(m: &RMat, tol: f64) -> Self {
        let (b, _) = span_basis(m, tol);
        Subspace {
            ambient_dim: m.nrows(),
            basis: b,
            tol,
        }
    }

    pub fn zero(n: usize) -> Self {
        Subspace {
            ambient_dim: n,
            basis: RMat::zeros(n, 0),
            tol: DEFAULT_TOL,
        }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            ambient_dim: n,
            basis: RMat::identity(n, n),
            tol: DEFAULT_TOL,
        }
    }

    /// Span of the listed coordinate axes.
    pub fn coordinate(n: usize, axes: &[usize]) -> Self {
        let mut b = RMat::zeros(n, axes.len());
        for (k, &a) in axes.iter().enumerate() {
            b[(a, k)] = 1.0;
        }
        Subspace {
            ambient_dim: n,
            basis: b,
            tol: DEFAULT_TOL,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &RMat {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn projector(&self) -> RMat {
        &self.basis * self.basis.transpose()
    }

    /// Spectral norm of the projector difference; infinite on dimension mismatch.
    pub fn distance(&self, other: &Subspace) -> f64 {
        if self.ambient_dim != other.ambient_dim {
            return f64::INFINITY;
        }
        opnorm(&(self.projector() - other.projector()))
    }

    pub fn same_as(&self, other: &Subspace, tol: f64) -> bool {
        self.distance(other) < tol
    }

    pub fn project(&self, v: &RVec) -> RVec {
        &self.basis * (self.basis.transpose() * v)
    }

    /// `‖v − Pv‖ / ‖v‖` (0 for v = 0).
    pub fn residual(&self, v: &RVec) -> f64 {
        let nv = v.norm();
        if nv == 0.0 {
            return 0.0;
        }
        (v - self.project(v)).norm() / nv
    }

    pub fn contains(&self, v: &RVec, tol: f64) -> bool {
        self.residual(v) <= tol
    }

    /// Angle between a nonzero vector and the subspace (π/2 for the zero space).
    pub fn angle_to(&self, v: &RVec) -> f64 {
        let nv = v.norm();
        if nv == 0.0 || self.dim() == 0 {
            return std::f64::consts::FRAC_PI_2;
        }
        let pv = self.project(v);
        (v - &pv).norm().atan2(pv.norm())
    }

    pub fn complement(&self) -> Subspace {
        let b = null_basis(&self.basis.transpose(), self.tol);
        let b = if self.dim() == 0 {
            RMat::identity(self.ambient_dim, self.ambient_dim)
        } else {
            b
        };
        Subspace {
            ambient_dim: self.ambient_dim,
            basis: b,
            tol: self.tol,
        }
    }

    /// Image `{Mv : v ∈ S}`.
    pub fn image(&self, m: &RMat) -> Subspace {
        Subspace::from_spanning(&(m * &self.basis), self.tol)
    }
}

/// Real null space of a real matrix.
pub fn nullspace(a: &RMat, tol: f64) -> Subspace {
    nullspace_scaled(a, tol, 0.0)
}

pub fn nullspace_scaled(a: &RMat, tol: f64, scale: f64) -> Subspace {
    let b = null_basis_scaled(a, tol, scale);
    Subspace {
        ambient_dim: a.ncols(),
        basis: b,
        tol,
    }
}

/// Real vectors annihilated by a complex matrix: null space of `[Re M; Im M]`.
pub fn real_kernel(m: &CMat, tol: f64) -> Subspace {
    real_kernel_scaled(m, tol, 0.0)
}

pub fn real_kernel_scaled(m: &CMat, tol: f64, scale: f64) -> Subspace {
    let (r, c) = m.shape();
    let mut stacked = RMat::zeros(2 * r, c);
    stacked.rows_mut(0, r).copy_from(&re_part(m));
    stacked.rows_mut(r, r).copy_from(&im_part(m));
    nullspace_scaled(&stacked, tol, scale)
}

/// Stack row blocks, each scaled to unit Frobenius norm, so that a relative
/// threshold is not dominated by the largest block.
pub fn stack_normalized(blocks: &[RMat]) -> RMat {
    let cols = blocks.first().map(|b| b.ncols()).unwrap_or(0);
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = RMat::zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        let n = b.norm();
        let s = if n > 0.0 { 1.0 / n } else { 0.0 };
        out.rows_mut(r0, b.nrows()).copy_from(&(b * s));
        r0 += b.nrows();
    }
    out
}

/// Intersection, computed as the null space of the stacked `I − P_i`.
pub fn intersect(subspaces: &[Subspace]) -> Result<Subspace> {
    let first = subspaces
        .first()
        .ok_or_else(|| Error::Dimension("intersect of an empty list".into()))?;
    let n = first.ambient_dim;
    if let Some(s) = subspaces.iter().find(|s| s.ambient_dim != n) {
        return Err(Error::Dimension(format!(
            "intersect: ambient dimensions {} and {} differ",
            n, s.ambient_dim
        )));
    }
    let tol = subspaces.iter().map(|s| s.tol).fold(0.0, f64::max);
    if subspaces.iter().any(|s| s.dim() == 0) {
        return Ok(Subspace {
            ambient_dim: n,
            basis: RMat::zeros(n, 0),
            tol,
        });
    }
    let blocks: Vec<RMat> = subspaces
        .iter()
        .map(|s| RMat::identity(n, n) - s.projector())
        .collect();
    let mut stacked = RMat::zeros(n * blocks.len(), n);
    for (k, b) in blocks.iter().enumerate() {
        stacked.rows_mut(k * n, n).copy_from(b);
    }
    if stacked.norm() == 0.0 {
        return Ok(Subspace {
            ambient_dim: n,
            basis: RMat::identity(n, n),
            tol,
        });
    }
    Ok(nullspace(&stacked, tol))
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(h: &CMat) -> f64 {
    if h.is_empty() {
        return 0.0;
    }
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// True iff the smallest eigenvalue is ≥ −tol·max(1, ‖H‖).
pub fn is_psd(h: &CMat, tol: f64) -> Result<bool> {
    check_square(h, "is_psd")?;
    if h.is_empty() {
        return Ok(true);
    }
    let defect = (h - h.adjoint()).norm();
    let scale = h.norm().max(1.0);
    if defect > tol * scale {
        return Err(Error::Shape(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm).eigenvalues;
    let norm = eig.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(min >= -tol * norm.max(1.0))
}

pub fn is_psd_real(h: &RMat, tol: f64) -> Result<bool> {
    is_psd(&to_complex(h), tol)
}

/// `‖MᵀJM − J‖_F` with the plain transpose.
pub fn symplectic_residual(m: &CMat) -> Result<f64> {
    let n = check_square(m, "symplectic_residual")?;
    if n % 2 != 0 {
        return Err(Error::Dimension(format!(
            "symplectic_residual: odd dimension {n}"
        )));
    }
    let j = j_complex(n / 2);
    Ok((m.transpose() * &j * m - j).norm())
}

/// Bilinear symplectic form `σ(X, Y) = ⟨JX, Y⟩ = ξ·y − x·η`.
pub fn sigma(x: &CVec, y: &CVec) -> Complex64 {
    let d = x.len() / 2;
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..d {
        s += x[d + k] * y[k] - x[k] * y[d + k];
    }
    s
}

/// `iσ(X̄, X) = 2 Σ Im(x̄_k ξ_k)`, real.
pub fn positivity_form(x: &CVec) -> f64 {
    let d = x.len() / 2;
    (0..d).map(|k| 2.0 * (x[k].conj() * x[d + k]).im).sum()
}

/// Minimum over the samples of `iσ(conj(MX), MX) − iσ(X̄, X)` with `M = e^{-2itF}`.
pub fn graph_positivity_defect(f: &CMat, t: f64, samples: &[CVec]) -> Result<f64> {
    let n = check_square(f, "graph_positivity_defect")?;
    if t < 0.0 {
        return Err(Error::Domain(format!("t = {t} < 0")));
    }
    if n % 2 != 0 {
        return Err(Error::Dimension(format!("odd dimension {n}")));
    }
    let m = expm(&(f * Complex64::new(0.0, -2.0 * t)))?;
    Ok(samples
        .iter()
        .map(|x| positivity_form(&(&m * x)) - positivity_form(x))
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_is_symplectic() {
        let j = j_complex(2);
        assert!(symplectic_residual(&j).unwrap() < 1e-15);
        let jr = j_matrix(2);
        assert_eq!(&jr * &jr, -RMat::identity(4, 4));
    }

    #[test]
    fn expm_basic_cases() {
        let z = CMat::zeros(3, 3);
        assert_eq!(expm(&z).unwrap(), CMat::identity(3, 3));
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c64(1.0, 0.0), c64(-0.5, 2.0)]));
        let e = expm(&d).unwrap();
        assert!((e[(0, 0)] - c64(1.0, 0.0).exp()).norm() < 1e-14);
        assert!((e[(1, 1)] - c64(-0.5, 2.0).exp()).norm() < 1e-14);
        assert!(expm(&CMat::zeros(2, 3)).is_err());
    }

    #[test]
    fn expm_nilpotent() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = c64(0.0, -3.0);
        let e = expm(&a).unwrap();
        assert!((e[(0, 1)] - c64(0.0, -3.0)).norm() < 1e-14);
        assert!((e[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(nullspace(&RMat::identity(3, 3), DEFAULT_TOL).dim(), 0);
        let a = RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let k = nullspace(&a, DEFAULT_TOL);
        assert_eq!(k.dim(), 1);
        assert!((k.basis()[(0, 0)] - 1.0).abs() < 1e-14);
        assert_eq!(nullspace(&RMat::zeros(0, 3), DEFAULT_TOL).dim(), 3);
        assert_eq!(nullspace(&RMat::zeros(2, 3), DEFAULT_TOL).dim(), 3);
    }

    #[test]
    fn intersect_planes() {
        let xy = Subspace::coordinate(3, &[0, 1]);
        let yz = Subspace::coordinate(3, &[1, 2]);
        let y = intersect(&[xy.clone(), yz]).unwrap();
        assert!(y.same_as(&Subspace::coordinate(3, &[1]), 1e-12));
        assert!(intersect(&[xy.clone()]).unwrap().same_as(&xy, 1e-12));
        assert!(intersect(&[xy, Subspace::full(2)]).is_err());
        assert!(intersect(&[]).is_err());
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&CMat::identity(2, 2), 1e-12).unwrap());
        let d = to_complex(&RMat::from_diagonal(&RVec::from_vec(vec![1.0, -1.0])));
        assert!(!is_psd(&d, 1e-12).unwrap());
        let d = to_complex(&RMat::from_diagonal(&RVec::from_vec(vec![0.0, 1.0])));
        assert!(is_psd(&d, 1e-12).unwrap());
        let mut nh = CMat::zeros(2, 2);
        nh[(0, 1)] = c64(1.0, 0.0);
        assert!(is_psd(&nh, 1e-12).is_err());
    }

    #[test]
    fn positivity_of_ix_graph() {
        let x = CVec::from_vec(vec![c64(1.0, 0.0), c64(0.0, 1.0)]);
        assert!((positivity_form(&x) - 2.0).abs() < 1e-15);
        let s = sigma(&x.map(|z| z.conj()), &x) * I;
        assert!((s.re - 2.0).abs() < 1e-15 && s.im.abs() < 1e-15);
    }

    #[test]
    fn svd_is_accurate_on_structured_matrices() {
        use rand::Rng;
        let mut rng = crate::random::rng(11);
        for shape in [(4, 5), (5, 4), (6, 6), (3, 8)] {
            for _ in 0..300 {
                // nearly real block plus an exact identity corner, the shape of
                // the auxiliary systems in the normal form
                let (m, n) = shape;
                let mut a = CMat::from_fn(m, n, |_, _| c64(rng.random::<f64>() - 0.5, 0.02 * (rng.random::<f64>() - 0.5)));
                a.row_mut(m - 1).fill(c64(0.0, 0.0));
                a.column_mut(n - 1).fill(c64(0.0, 0.0));
                a[(m - 1, n - 1)] = c64(1.0, 0.0);
                let dec = svd(&a);
                let sigma = CMat::from_diagonal(&CVec::from_iterator(n, dec.s.iter().map(|&x| c64(x, 0.0))));
                let rec = (&dec.u * sigma * dec.v.adjoint() - &a).norm() / a.norm();
                assert!(rec < 1e-13, "{shape:?} {rec:e}");
                let orth = (dec.v.adjoint() * &dec.v - CMat::identity(n, n)).norm();
                assert!(orth < 1e-13, "{shape:?} {orth:e}");
                assert!(dec.s.windows(2).all(|w| w[0] >= w[1]));
                if m <= n {
                    assert!((&a * pinv(&a, 1e-12) - CMat::identity(m, m)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn odd_dimension_rejected() {
        assert!(symplectic_residual(&CMat::identity(3, 3)).is_err());
    }
}
