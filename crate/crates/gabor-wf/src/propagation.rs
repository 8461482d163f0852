//! Conic sets as finite unions of angular caps, and the propagation bounds
//! for `e^{-tq^w(x,D)}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{hamilton_map, singular_space, QuadraticHamiltonian};
use crate::lagrangian::kernel_wf_bound;
use crate::linalg::{self, re_part, RMat, RVec, Subspace, DEFAULT_TOL};
use crate::par;

/// Angular tolerance for purely algebraic pipelines.
pub const ANG_TOL: f64 = 1e-6;
/// Angular tolerance when bounds are matched against detector output.
pub const DETECTOR_ANG_TOL: f64 = 0.05;

/// `{v : angle(v, direction) ≤ half_angle}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub direction: Vec<f64>,
    pub half_angle: f64,
}

impl Patch {
    pub fn new(direction: &RVec, half_angle: f64) -> Result<Self> {
        let n = direction.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Domain("patch direction must be nonzero".into()));
        }
        if !(0.0..=std::f64::consts::PI).contains(&half_angle) {
            return Err(Error::Range(format!("half-angle {half_angle} outside [0, π]")));
        }
        Ok(Patch {
            direction: (direction / n).iter().cloned().collect(),
            half_angle,
        })
    }

    pub fn ray(direction: &RVec) -> Result<Self> {
        Self::new(direction, 0.0)
    }

    pub fn dir(&self) -> RVec {
        RVec::from_column_slice(&self.direction)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConicSet {
    pub ambient_dim: usize,
    pub patches: Vec<Patch>,
}

// acos of the cosine cannot resolve angles below ~1e-8
fn angle_between(a: &RVec, b: &RVec) -> f64 {
    let (a, b) = (a / a.norm(), b / b.norm());
    2.0 * (&a - &b).norm().atan2((&a + &b).norm())
}

impl ConicSet {
    pub fn empty(ambient_dim: usize) -> Self {
        ConicSet {
            ambient_dim,
            patches: vec![],
        }
    }

    pub fn from_patches(ambient_dim: usize, patches: Vec<Patch>) -> Result<Self> {
        if let Some(p) = patches.iter().find(|p| p.direction.len() != ambient_dim) {
            return Err(Error::Dimension(format!(
                "patch of length {} in ambient dimension {ambient_dim}",
                p.direction.len()
            )));
        }
        Ok(ConicSet {
            ambient_dim,
            patches,
        })
    }

    /// Union of rays.
    pub fn rays(ambient_dim: usize, dirs: &[RVec]) -> Result<Self> {
        let patches = dirs.iter().map(Patch::ray).collect::<Result<Vec<_>>>()?;
        Self::from_patches(ambient_dim, patches)
    }

    /// `V \ {0}` for a subspace V of dimension k, covered by the caps of
    /// half-angle `acos(1/√k)` around ± each basis vector (some coordinate of
    /// a unit vector in V is at least `1/√k` in size). Exact for k = 1.
    pub fn subspace_cone(v: &Subspace) -> Self {
        let k = v.dim();
        let alpha = if k > 1 { (1.0 / (k as f64).sqrt()).acos() } else { 0.0 };
        let patches = v
            .basis()
            .column_iter()
            .flat_map(|c| {
                let u = c.into_owned();
                [Patch::new(&u, alpha).expect("unit"), Patch::new(&-u, alpha).expect("unit")]
            })
            .collect();
        ConicSet {
            ambient_dim: v.ambient_dim(),
            patches,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }
}

/// True iff v lies in some patch (boundary inclusive).
pub fn cone_membership(c: &ConicSet, v: &RVec) -> bool {
    cone_membership_tol(c, v, 0.0)
}

pub fn cone_membership_tol(c: &ConicSet, v: &RVec, tol: f64) -> bool {
    c.patches
        .iter()
        .any(|p| angle_between(&p.dir(), v) <= p.half_angle + tol + 1e-12)
}

/// Half-angle of a guaranteed cover of `M·cap(u, α)`, the cap taken inside a
/// subspace whose orthogonal projector is `p` (identity for the whole space).
///
/// Writing `v = u cos a + w sin a` with `w ⟂ u`, `|w| = 1`,
/// `tan ∠(Mv, Mu) ≤ tan a · c⊥ / (|Mu| − tan a · c∥)` where c∥ and c⊥ bound
/// the components of `Mw` along and across `Mu`. Orthogonal maps give back α.
/// When the denominator is not positive the cover is the whole space.
pub fn cap_image_half_angle(m: &RMat, p: &RMat, u: &RVec, alpha: f64) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    if alpha >= std::f64::consts::FRAC_PI_2 {
        return std::f64::consts::PI;
    }
    let mu = m * u;
    let nmu = mu.norm();
    let hat = &mu / nmu;
    let tangent = p - u * u.transpose();
    let mw = m * tangent;
    let par = (hat.transpose() * &mw).norm();
    let n = hat.len();
    let perp = linalg::opnorm(&((RMat::identity(n, n) - &hat * hat.transpose()) * &mw));
    let ta = alpha.tan();
    let den = nmu - ta * par;
    if den <= 0.0 {
        return std::f64::consts::PI;
    }
    (ta * perp / den).atan()
}

fn condition_number(m: &RMat) -> f64 {
    let s = linalg::singular_values(m);
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Image of a conic set under an invertible real matrix.
pub fn map_conic(m: &RMat, c: &ConicSet) -> Result<ConicSet> {
    if m.nrows() != m.ncols() || m.nrows() != c.ambient_dim {
        return Err(Error::Dimension(format!(
            "{}x{} matrix applied to ambient dimension {}",
            m.nrows(),
            m.ncols(),
            c.ambient_dim
        )));
    }
    let kappa = condition_number(m);
    if !kappa.is_finite() || kappa > 1e14 {
        return Err(Error::Singular(format!("condition number {kappa:e}")));
    }
    let id = RMat::identity(m.nrows(), m.nrows());
    let patches = par::map_slice(&c.patches, |p| {
        let u = p.dir();
        let img = m * &u;
        Patch::new(&img, cap_image_half_angle(m, &id, &u, p.half_angle)).expect("invertible")
    });
    Ok(ConicSet {
        ambient_dim: c.ambient_dim,
        patches,
    })
}

/// Image of a conic set whose patches lie in the subspace K under a map that
/// is injective on K. Caps are read as caps within K.
pub fn map_conic_on_subspace(m: &RMat, k: &Subspace, c: &ConicSet) -> Result<ConicSet> {
    if k.dim() == 0 {
        return Ok(ConicSet::empty(m.nrows()));
    }
    let mk = m * k.basis();
    let kappa = condition_number(&mk);
    if !kappa.is_finite() || kappa > 1e14 {
        return Err(Error::Singular(format!(
            "map is not injective on the subspace (condition number {kappa:e})"
        )));
    }
    let proj = k.projector();
    let patches = par::map_slice(&c.patches, |p| {
        let u = k.project(&p.dir()).normalize();
        let img = m * &u;
        Patch::new(&img, cap_image_half_angle(m, &proj, &u, p.half_angle)).expect("injective on K")
    });
    Ok(ConicSet {
        ambient_dim: m.nrows(),
        patches,
    })
}

/// Conservative `c ∩ (S \ {0})`.
///
/// A patch `(u, α)` at angle γ from S survives iff `γ ≤ α + ang_tol`. It is
/// re-centered on the projection of u with half-angle `acos(cos α / cos γ)`,
/// the exact radius of the cap's trace on S.
pub fn intersect_conic_with_subspace(c: &ConicSet, s: &Subspace, ang_tol: f64) -> Result<ConicSet> {
    if c.ambient_dim != s.ambient_dim() {
        return Err(Error::Dimension(format!(
            "conic set in dimension {} vs subspace in {}",
            c.ambient_dim,
            s.ambient_dim()
        )));
    }
    if s.dim() == 0 {
        return Ok(ConicSet::empty(c.ambient_dim));
    }
    let per_patch = par::map_slice(&c.patches, |p| {
        let u = p.dir();
        let gamma = s.angle_to(&u);
        if gamma > p.half_angle + ang_tol {
            return vec![];
        }
        let proj = s.project(&u);
        if proj.norm() < 1e-12 {
            // u ⟂ S and the cap reaches S: keep all of S
            return (0..s.dim())
                .map(|j| Patch::new(&s.basis().column(j).into_owned(), std::f64::consts::PI).expect("unit"))
                .collect();
        }
        let half = if gamma <= p.half_angle {
            (p.half_angle.cos() / gamma.cos()).min(1.0).acos()
        } else {
            0.0
        };
        vec![Patch::new(&proj, half).expect("nonzero")]
    });
    Ok(ConicSet {
        ambient_dim: c.ambient_dim,
        patches: per_patch.into_iter().flatten().collect(),
    })
}

#[derive(Clone, Debug)]
pub struct PropagationReport {
    /// Real image of `wf0 ∩ Ker_ℝ Im e^{-2itF}` under `e^{-2itF}`.
    pub bound_general: ConicSet,
    /// `e^{2t Im F}(wf0 ∩ S)`.
    pub bound_singular: ConicSet,
    pub s_used: Subspace,
    pub kernel: Subspace,
    pub exact: bool,
}

pub fn propagate(h: &QuadraticHamiltonian, wf0: &ConicSet, t: f64) -> Result<PropagationReport> {
    propagate_tol(h, wf0, t, ANG_TOL)
}

pub fn propagate_tol(
    h: &QuadraticHamiltonian,
    wf0: &ConicSet,
    t: f64,
    ang_tol: f64,
) -> Result<PropagationReport> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t}: propagation needs t > 0")));
    }
    let d = h.d();
    if wf0.ambient_dim != 2 * d {
        return Err(Error::Dimension(format!(
            "initial set in dimension {}, expected {}",
            wf0.ambient_dim,
            2 * d
        )));
    }
    let fm = hamilton_map(h);
    let s = singular_space(&fm, DEFAULT_TOL).s;
    let flow = fm.im_flow(t);
    let exact = h.re_norm() < 1e-12;
    let m = fm.propagator_matrix(t);
    let scale = linalg::opnorm(&m);
    let kernel = linalg::nullspace_scaled(&linalg::im_part(&m), linalg::KERNEL_TOL, scale);
    if exact {
        let b = map_conic(&flow, wf0)?;
        return Ok(PropagationReport {
            bound_general: b.clone(),
            bound_singular: b,
            s_used: s,
            kernel,
            exact,
        });
    }
    let on_s = intersect_conic_with_subspace(wf0, &s, ang_tol)?;
    let bound_singular = if s.dim() == 0 {
        ConicSet::empty(2 * d)
    } else {
        map_conic_on_subspace(&flow, &s, &on_s)?
    };
    let on_k = intersect_conic_with_subspace(wf0, &kernel, ang_tol)?;
    let bound_general = map_conic_on_subspace(&re_part(&m), &kernel, &on_k)?;
    Ok(PropagationReport {
        bound_general,
        bound_singular,
        s_used: s,
        kernel,
        exact,
    })
}

/// Dimension of the kernel bound's intersection with `{x = 0, ξ = 0}`; the
/// composition calculus needs this to be 0.
pub fn kernel_precondition_dim(h: &QuadraticHamiltonian, t: f64) -> Result<usize> {
    let fm = hamilton_map(h);
    let d = h.d();
    let b = kernel_wf_bound(&fm, t)?;
    let axes: Vec<usize> = (d..2 * d).chain(3 * d..4 * d).collect();
    let yeta = Subspace::coordinate(4 * d, &axes);
    Ok(linalg::intersect(&[b, yeta])?.dim())
}

/// Propagate to `t2`, then by `t1`.
pub fn compose_semigroup_bound(
    h: &QuadraticHamiltonian,
    wf0: &ConicSet,
    t1: f64,
    t2: f64,
) -> Result<ConicSet> {
    let first = propagate(h, wf0, t2)?.bound_singular;
    Ok(propagate(h, &first, t1)?.bound_singular)
}

/// Every direction of `inner` lies in `outer` up to `tol`.
pub fn directions_contained(inner: &ConicSet, outer: &ConicSet, tol: f64) -> bool {
    inner
        .patches
        .iter()
        .all(|p| cone_membership_tol(outer, &p.dir(), tol))
}
