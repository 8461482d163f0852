//! Numerical realization of `e^{-tq^w(x,D)}` in one dimension: a
//! Hermite–Galerkin matrix semigroup and closed-form grid propagators.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::hamiltonian::QuadraticHamiltonian;
use crate::linalg::{self, expm, CMat, CVec};
use crate::par;

/// Complex samples on `x_j = −X + j·2X/n`, `j = 0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledDistribution {
    half_width: f64,
    values: Vec<Complex64>,
    pub label: String,
}

impl SampledDistribution {
    pub fn new(half_width: f64, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        let n = values.len();
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Resolution(format!(
                "sample count {n} must be a power of two ≥ 16"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Domain(format!("half-width {half_width} must be positive")));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("samples must be finite".into()));
        }
        Ok(SampledDistribution {
            half_width,
            values,
            label: label.into(),
        })
    }

    /// Samples of `f` on the grid.
    pub fn from_fn(
        half_width: f64,
        n: usize,
        label: impl Into<String>,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let dx = 2.0 * half_width / n as f64;
        let values = (0..n).map(|j| f(-half_width + j as f64 * dx)).collect();
        Self::new(half_width, values, label)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }
    pub fn n(&self) -> usize {
        self.values.len()
    }
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n() as f64
    }
    /// `Ξ = π/dx`.
    pub fn xi_max(&self) -> f64 {
        PI / self.dx()
    }
    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }
    pub fn grid(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.x(j)).collect()
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn with_values(&self, values: Vec<Complex64>) -> Self {
        SampledDistribution {
            half_width: self.half_width,
            values,
            label: self.label.clone(),
        }
    }

    /// Discrete L² norm `(Σ|u_j|² dx)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx()).sqrt()
    }

    /// Relative discrete L² distance.
    pub fn rel_error(&self, other: &SampledDistribution) -> f64 {
        let num: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = other.values.iter().map(|v| v.norm_sqr()).sum();
        (num / den.max(f64::MIN_POSITIVE)).sqrt()
    }
}

/// Coefficients in the orthonormal basis `s^{-1/2} h_n(x/s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteRep {
    pub coeffs: CVec,
    pub scale: f64,
}

impl HermiteRep {
    pub fn new(coeffs: CVec, scale: f64) -> Result<Self> {
        if coeffs.len() < 4 {
            return Err(Error::Resolution(format!(
                "Hermite order {} < 4",
                coeffs.len()
            )));
        }
        if !(scale > 0.0) {
            return Err(Error::Domain(format!("Hermite scale {scale} must be positive")));
        }
        Ok(HermiteRep { coeffs, scale })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// Norm of everything but the top two modes.
    pub fn interior_norm(&self) -> f64 {
        let n = self.order();
        self.coeffs.rows(0, n - 2).norm()
    }

    /// Relative weight in the top two modes.
    pub fn eps_trunc(&self) -> f64 {
        let n = self.order();
        self.coeffs.rows(n - 2, 2).norm() / self.norm().max(f64::MIN_POSITIVE)
    }
}

/// `s^{-1/2} h_k(x/s)` for `k < n_h`, one row per k.
pub fn hermite_functions(xs: &[f64], n_h: usize, scale: f64) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; xs.len()]; n_h];
    let norm = scale.sqrt().recip();
    for (j, &x0) in xs.iter().enumerate() {
        let x = x0 / scale;
        let mut prev = 0.0;
        let mut cur = PI.powf(-0.25) * (-x * x / 2.0).exp();
        for (k, row) in out.iter_mut().enumerate() {
            row[j] = cur * norm;
            let kf = k as f64;
            let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
    }
    out
}

/// Quadrature projection onto the first `n_h` Hermite functions.
pub fn hermite_analysis(u: &SampledDistribution, n_h: usize, scale: f64) -> Result<HermiteRep> {
    if u.n() < 4 * n_h {
        return Err(Error::Resolution(format!(
            "{} grid points cannot resolve {n_h} Hermite modes (need {})",
            u.n(),
            4 * n_h
        )));
    }
    let h = hermite_functions(&u.grid(), n_h, scale);
    let dx = u.dx();
    let coeffs = par::map_slice(&h, |row| {
        row.iter()
            .zip(u.values())
            .map(|(hk, v)| v * *hk)
            .sum::<Complex64>()
            * dx
    });
    HermiteRep::new(CVec::from_vec(coeffs), scale)
}

/// Evaluate a Hermite expansion on the grid `[−X, X)` with n points.
pub fn hermite_synthesis(r: &HermiteRep, half_width: f64, n: usize) -> Result<SampledDistribution> {
    let dx = 2.0 * half_width / n as f64;
    let xs: Vec<f64> = (0..n).map(|j| -half_width + j as f64 * dx).collect();
    let h = hermite_functions(&xs, r.order(), r.scale);
    let values = (0..n)
        .map(|j| {
            h.iter()
                .zip(r.coeffs.iter())
                .map(|(row, c)| c * row[j])
                .sum::<Complex64>()
        })
        .collect();
    SampledDistribution::new(half_width, values, "hermite synthesis")
}

/// Matrix of `q^w` in the Hermite basis with its `e^{-tM}` cache.
#[derive(Debug)]
pub struct GalerkinOperator {
    h: QuadraticHamiltonian,
    m: CMat,
    scale: f64,
    dissipativity_margin: f64,
    cache: RwLock<HashMap<u64, Arc<CMat>>>,
}

/// `q^w = a·x² + b·(xD + Dx) + c·D²` for `Q = [[a, b], [b, c]]`, assembled
/// from the ladder operators. This is the exact Galerkin projection, so the
/// Hermitian part is the projection of `(Re q)^w`.
pub fn hermite_matrix(h: &QuadraticHamiltonian, n_h: usize, scale: f64) -> Result<GalerkinOperator> {
    if h.d() != 1 {
        return Err(Error::Unsupported(format!(
            "Galerkin propagator needs d = 1, got d = {}",
            h.d()
        )));
    }
    if n_h < 4 {
        return Err(Error::Resolution(format!("Hermite order {n_h} < 4")));
    }
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("Hermite scale {scale} must be positive")));
    }
    let q = h.q();
    let (a, b, c) = (q[(0, 0)], q[(0, 1)], q[(1, 1)]);
    let s2 = scale * scale;
    let mut m = CMat::zeros(n_h, n_h);
    for n in 0..n_h {
        let diag = (2 * n + 1) as f64 / 2.0;
        m[(n, n)] = a * (s2 * diag) + c * (diag / s2);
        if n + 2 < n_h {
            let r = (((n + 1) * (n + 2)) as f64).sqrt();
            let x2 = a * (s2 * r / 2.0);
            let d2 = c * (-r / (2.0 * s2));
            let i = Complex64::new(0.0, 1.0);
            m[(n, n + 2)] = x2 + d2 - b * i * r;
            m[(n + 2, n)] = x2 + d2 + b * i * r;
        }
    }
    let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let interior = herm.view((0, 0), (n_h - 2, n_h - 2)).into_owned();
    let dissipativity_margin = linalg::min_eigenvalue(&interior);
    Ok(GalerkinOperator {
        h: h.clone(),
        m,
        scale,
        dissipativity_margin,
        cache: RwLock::new(HashMap::new()),
    })
}

impl GalerkinOperator {
    pub fn matrix(&self) -> &CMat {
        &self.m
    }
    pub fn hamiltonian(&self) -> &QuadraticHamiltonian {
        &self.h
    }
    pub fn order(&self) -> usize {
        self.m.nrows()
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    /// Smallest eigenvalue of the Hermitian part on the interior modes.
    pub fn dissipativity_margin(&self) -> f64 {
        self.dissipativity_margin
    }

    /// `e^{-tM}`, computed once per t.
    pub fn semigroup(&self, t: f64) -> Result<Arc<CMat>> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("t = {t} < 0")));
        }
        let key = t.to_bits();
        if let Some(e) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(e.clone());
        }
        let e = Arc::new(expm(&(&self.m * Complex64::new(-t, 0.0)))?);
        self.cache
            .write()
            .expect("cache lock")
            .entry(key)
            .or_insert_with(|| e.clone());
        Ok(e)
    }
}

pub fn evolve(op: &GalerkinOperator, u0: &HermiteRep, t: f64) -> Result<HermiteRep> {
    if u0.order() != op.order() || (u0.scale - op.scale).abs() > 1e-14 * op.scale {
        return Err(Error::Dimension(format!(
            "representation (order {}, scale {}) does not match operator (order {}, scale {})",
            u0.order(),
            u0.scale,
            op.order(),
            op.scale
        )));
    }
    let e = op.semigroup(t)?;
    HermiteRep::new(e.as_ref() * &u0.coeffs, u0.scale)
}

/// In-place DFT, forward unnormalized, inverse scaled by 1/n.
pub fn fft_inplace(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let n = buf.len();
    if inverse {
        planner.plan_fft_inverse(n).process(buf);
        let s = 1.0 / n as f64;
        buf.iter_mut().for_each(|v| *v *= s);
    } else {
        planner.plan_fft_forward(n).process(buf);
    }
}

/// Angular frequency of DFT bin j on a grid of spacing dx.
pub fn bin_frequency(j: usize, n: usize, dx: f64) -> f64 {
    let f = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
    2.0 * PI * f / (n as f64 * dx)
}

/// Apply the Fourier multiplier `m(k)`.
pub fn fourier_multiplier(u: &SampledDistribution, m: impl Fn(f64) -> Complex64) -> SampledDistribution {
    let n = u.n();
    let dx = u.dx();
    let mut buf = u.values().to_vec();
    fft_inplace(&mut buf, false);
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= m(bin_frequency(j, n, dx));
    }
    fft_inplace(&mut buf, true);
    u.with_values(buf)
}

fn multiply(u: &SampledDistribution, f: impl Fn(f64) -> Complex64) -> SampledDistribution {
    let vals = u
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| v * f(u.x(j)))
        .collect();
    u.with_values(vals)
}

/// Outcome of a closed-form attempt.
#[derive(Clone, Debug, PartialEq)]
pub enum FastPath {
    Applied(SampledDistribution),
    Unsupported,
}

/// Which closed form applies to Q, if any.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FastPathKind {
    /// `Q = diag(a, 0)`: multiplication by `e^{-t a x²}`.
    Multiplication(Complex64),
    /// `Q = diag(0, c)`: Fourier multiplier `e^{-t c k²}`.
    FourierMultiplier(Complex64),
    /// `Q = iκ I`: rotation of phase space by `2κt`.
    Harmonic(f64),
}

pub fn classify_fast_path(h: &QuadraticHamiltonian) -> Option<FastPathKind> {
    if h.d() != 1 {
        return None;
    }
    let q = h.q();
    let (a, b, c) = (q[(0, 0)], q[(0, 1)], q[(1, 1)]);
    let tol = 1e-12 * q.norm().max(1.0);
    if b.norm() > tol {
        return None;
    }
    if c.norm() <= tol {
        return Some(FastPathKind::Multiplication(a));
    }
    if a.norm() <= tol {
        return Some(FastPathKind::FourierMultiplier(c));
    }
    if (a - c).norm() <= tol && a.re.abs() <= tol {
        return Some(FastPathKind::Harmonic(a.im));
    }
    None
}

pub fn fast_path(h: &QuadraticHamiltonian, u0: &SampledDistribution, t: f64) -> Result<FastPath> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} < 0")));
    }
    let Some(kind) = classify_fast_path(h) else {
        return Ok(FastPath::Unsupported);
    };
    let out = match kind {
        FastPathKind::Multiplication(a) => multiply(u0, |x| (-a * t * x * x).exp()),
        FastPathKind::FourierMultiplier(c) => fourier_multiplier(u0, |k| (-c * t * k * k).exp()),
        FastPathKind::Harmonic(kappa) => rotate(u0, 2.0 * kappa * t),
    };
    Ok(FastPath::Applied(out))
}

/// `e^{-iαH}`, `H = (x² + D²)/2`, by chirp–multiplier–chirp factors.
fn rotate(u: &SampledDistribution, alpha: f64) -> SampledDistribution {
    // full turns act as −1 on every Hermite mode
    let turns = ((alpha + PI) / (2.0 * PI)).floor();
    let r = alpha - 2.0 * PI * turns;
    let sign = if (turns as i64).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    let mut v = if sign < 0.0 {
        u.with_values(u.values().iter().map(|z| -z).collect())
    } else {
        u.clone()
    };
    let pieces = if r.abs() >= PI / 2.0 { 2 } else { 1 };
    let step = r / pieces as f64;
    for _ in 0..pieces {
        v = shear_rotate(&v, step);
    }
    v
}

fn shear_rotate(u: &SampledDistribution, alpha: f64) -> SampledDistribution {
    if alpha == 0.0 {
        return u.clone();
    }
    let tau = (alpha / 2.0).tan();
    let sigma = alpha.sin();
    let chirp = |x: f64| Complex64::new(0.0, -tau * x * x / 2.0).exp();
    let v = multiply(u, chirp);
    let v = fourier_multiplier(&v, |k| Complex64::new(0.0, -sigma * k * k / 2.0).exp());
    multiply(&v, chirp)
}
