//! Scenario configurations, the built-in catalog and the run pipeline
//! (Hamilton map → singular space → propagation bounds → numerical
//! propagation and detection when d = 1).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::data::Datum;
use crate::detector::{self, DetectorConfig, DirectionScan, Spectrogram};
use crate::error::{Error, Result};
use crate::hamiltonian::{self, hamilton_map, singular_space, QuadraticHamiltonian};
use crate::lagrangian;
use crate::linalg::{self, c64, CMat, RVec, Subspace, DEFAULT_TOL};
use crate::propagation::{self, ConicSet, Patch, DETECTOR_ANG_TOL};
use crate::propagator::{self, FastPath, SampledDistribution};
use crate::random;

pub const FORMAT_VERSION: u32 = 1;

/// Initial datum: a builtin name, an expression such as `chirp(2)`, or a
/// file of samples (read by the caller).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialDatum {
    Builtin(String),
    Expression(String),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub half_width: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            half_width: 40.0,
            n: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HermiteConfig {
    pub order: usize,
    pub scale: f64,
}

impl Default for HermiteConfig {
    fn default() -> Self {
        HermiteConfig {
            order: 256,
            scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedBound {
    pub t: f64,
    /// Unit directions; empty means the bound is empty.
    pub rays: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedFlags {
    pub t: f64,
    pub rays_deg: Vec<f64>,
}

/// Results a scenario must reproduce, tied to the worked example it comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub reference: String,
    /// Spanning vectors of S; empty means S = {0}.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singular_space: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<ExpectedBound>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<ExpectedFlags>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub d: usize,
    /// Q as rows of `[re, im]` pairs.
    pub q: Vec<Vec<[f64; 2]>>,
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_datum: Option<InitialDatum>,
    /// Known wave front set of the datum, used for propagation bounds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub initial_wf: Vec<Patch>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub detector: DetectorConfig,
    #[serde(default)]
    pub hermite: HermiteConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

pub fn q_to_pairs(q: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..q.nrows())
        .map(|i| (0..q.ncols()).map(|j| [q[(i, j)].re, q[(i, j)].im]).collect())
        .collect()
}

impl ScenarioConfig {
    pub fn q_matrix(&self) -> Result<CMat> {
        let n = 2 * self.d;
        if self.d == 0 || self.q.len() != n || self.q.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!(
                "Q must be {n}x{n} for d = {}, got {} rows",
                self.d,
                self.q.len()
            )));
        }
        Ok(CMat::from_fn(n, n, |i, j| c64(self.q[i][j][0], self.q[i][j][1])))
    }

    pub fn hamiltonian(&self) -> Result<QuadraticHamiltonian> {
        QuadraticHamiltonian::new(self.q_matrix()?)
    }

    pub fn initial_wf_set(&self) -> Result<Option<ConicSet>> {
        if self.initial_wf.is_empty() {
            return Ok(None);
        }
        ConicSet::from_patches(2 * self.d, self.initial_wf.clone()).map(Some)
    }

    pub fn validate(&self) -> Result<()> {
        self.hamiltonian()?;
        if self.times.is_empty() {
            return Err(Error::Config("no times given".into()));
        }
        if self.times.iter().any(|t| !(t.is_finite() && *t > 0.0))
            || self.times.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Config(format!(
                "times must be positive and strictly ascending, got {:?}",
                self.times
            )));
        }
        self.initial_wf_set()?;
        if let Some(datum) = &self.initial_datum {
            if self.d != 1 {
                return Err(Error::Unsupported(format!(
                    "numerical propagation needs d = 1, got d = {}",
                    self.d
                )));
            }
            match datum {
                InitialDatum::Builtin(e) | InitialDatum::Expression(e) => {
                    Datum::parse(e)?;
                }
                InitialDatum::File(_) => {}
            }
            if self.grid.n < 16 || !self.grid.n.is_power_of_two() || !(self.grid.half_width > 0.0) {
                return Err(Error::Resolution(format!(
                    "grid needs a power of two n ≥ 16 and X > 0, got n = {}, X = {}",
                    self.grid.n, self.grid.half_width
                )));
            }
            self.detector.validate()?;
        }
        Ok(())
    }

    /// Sample the datum unless it lives in a file.
    pub fn builtin_datum(&self) -> Result<Option<SampledDistribution>> {
        match &self.initial_datum {
            Some(InitialDatum::Builtin(e)) | Some(InitialDatum::Expression(e)) => {
                Datum::parse(e)?.sample(self.grid.half_width, self.grid.n).map(Some)
            }
            _ => Ok(None),
        }
    }
}

// ---------------------------------------------------------------------------
// Report

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceRecord {
    pub dim: usize,
    /// Orthonormal basis vectors.
    pub basis: Vec<Vec<f64>>,
}

impl From<&Subspace> for SubspaceRecord {
    fn from(s: &Subspace) -> Self {
        SubspaceRecord {
            dim: s.dim(),
            basis: s.basis().column_iter().map(|c| c.iter().cloned().collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonRecord {
    pub normality_defect: f64,
    pub singular_space: SubspaceRecord,
    pub kernel_dims: Vec<usize>,
    /// `‖Re F·B_S‖` and `‖(I − P_S) Im F·B_S‖`.
    pub stability_residuals: [f64; 2],
    /// Distance from S to the intersection of flow kernels.
    pub flow_kernel_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationRecord {
    pub exact: bool,
    pub kernel_dim: usize,
    pub bound_general: ConicSet,
    pub bound_singular: ConicSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GalerkinRecord {
    pub order: usize,
    pub scale: f64,
    pub dissipativity_margin: f64,
    pub eps_trunc: f64,
    pub norm_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagRecord {
    pub theta_deg: f64,
    pub direction: [f64; 2],
    pub exponent: f64,
    pub confidence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapRecord {
    pub center_deg: f64,
    pub half_width_deg: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorRecord {
    /// `fast_path` or `galerkin`.
    pub route: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub galerkin: Option<GalerkinRecord>,
    pub windows: Vec<f64>,
    /// Largest exponent over all directions and windows; `None` when every
    /// direction is below the floor.
    pub max_exponent: Option<f64>,
    pub flagged: Vec<FlagRecord>,
    pub caps: Vec<CapRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeRecord {
    pub t: f64,
    pub symplectic_residual: f64,
    pub positivity_defect: f64,
    pub kernel_bound: SubspaceRecord,
    /// Distance between the kernel bound and the real points of the graph
    /// Lagrangian's normal form.
    pub kernel_bound_consistency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propagation: Option<PropagationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector: Option<DetectorRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub scenario: String,
    pub d: usize,
    pub q: Vec<Vec<[f64; 2]>>,
    pub seed: u64,
    pub hamilton: HamiltonRecord,
    pub times: Vec<TimeRecord>,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

impl RunReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Bulk numeric output kept out of the JSON report.
#[derive(Clone, Debug, Default)]
pub struct RunArtifacts {
    /// Per time, one scan per window.
    pub scans: Vec<(f64, Vec<DirectionScan>)>,
    /// Per time, the spectrogram of the first window.
    pub spectrograms: Vec<(f64, Spectrogram)>,
    pub singular_space: Option<Subspace>,
    pub kernel_bounds: Vec<(f64, Subspace)>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

struct Checks(Vec<CheckRecord>);

impl Checks {
    fn below(&mut self, name: String, value: f64, tol: f64) {
        self.0.push(CheckRecord {
            passed: value < tol,
            value: finite(value),
            tolerance: Some(tol),
            detail: String::new(),
            name,
        });
    }

    fn above(&mut self, name: String, value: f64, tol: f64) {
        self.0.push(CheckRecord {
            passed: value >= tol,
            value: finite(value),
            tolerance: Some(tol),
            detail: String::new(),
            name,
        });
    }

    fn flag(&mut self, name: String, passed: bool, detail: String) {
        self.0.push(CheckRecord {
            name,
            passed,
            value: None,
            tolerance: None,
            detail,
        });
    }
}

// ---------------------------------------------------------------------------
// Run

/// Run a scenario. `datum` overrides the configured initial datum (used for
/// data read from files); otherwise builtin data is sampled here.
pub fn run(cfg: &ScenarioConfig, seed: u64, datum: Option<SampledDistribution>) -> Result<(RunReport, RunArtifacts)> {
    cfg.validate()?;
    let h = cfg.hamiltonian()?;
    let d = h.d();
    let fm = hamilton_map(&h);
    let ss = singular_space(&fm, DEFAULT_TOL);
    let s = ss.s.clone();
    let (r1, r2) = hamiltonian::stability_residuals(&fm, &s);
    let via_flow = hamiltonian::singular_space_via_flow_kernels(&fm, 1.0, 4 * d + 1, DEFAULT_TOL)?;
    let mut checks = Checks(vec![]);
    let flow_dist = s.distance(&via_flow);
    checks.below("singular_space_flow_kernels".into(), flow_dist, 1e-8);
    checks.below("singular_space_stability".into(), r1.max(r2), 1e-8);
    let hamilton = HamiltonRecord {
        normality_defect: hamiltonian::normality_defect(&fm),
        singular_space: (&s).into(),
        kernel_dims: ss.kernel_dims.clone(),
        stability_residuals: [r1, r2],
        flow_kernel_distance: flow_dist,
    };

    let mut rng = random::rng(seed);
    let samples: Vec<_> = (0..16).map(|_| random::random_complex_vec(&mut rng, 2 * d)).collect();
    let wf0 = cfg.initial_wf_set()?;
    let u0 = match datum {
        Some(u) => Some(u),
        None => cfg.builtin_datum()?,
    };
    if u0.is_none() && matches!(cfg.initial_datum, Some(InitialDatum::File(_))) {
        return Err(Error::Config("datum file was not loaded".into()));
    }

    let mut artifacts = RunArtifacts {
        singular_space: Some(s.clone()),
        ..Default::default()
    };
    let mut times = Vec::with_capacity(cfg.times.len());
    for &t in &cfg.times {
        let m = fm.propagator_matrix(t);
        let symp = linalg::symplectic_residual(&m)?;
        checks.below(format!("symplectic_residual@{t}"), symp, 1e-10);
        let pos = linalg::graph_positivity_defect(&fm.f, t, &samples)?;
        checks.above(format!("graph_positivity@{t}"), pos, -1e-10);
        let kb = lagrangian::kernel_wf_bound(&fm, t)?;
        let consistency = lagrangian::graph_lagrangian(&fm, t)
            .and_then(|g| lagrangian::normal_form(&g))
            .map(|p| lagrangian::real_points(&p).refined.distance(&kb));
        let consistency = match consistency {
            Ok(v) => {
                checks.below(format!("kernel_bound_consistency@{t}"), v, 1e-8);
                Some(v)
            }
            Err(e) => {
                checks.flag(format!("kernel_bound_consistency@{t}"), false, e.to_string());
                None
            }
        };
        artifacts.kernel_bounds.push((t, kb.clone()));

        let propagation = match &wf0 {
            Some(w) => {
                let r = propagation::propagate(&h, w, t)?;
                Some(PropagationRecord {
                    exact: r.exact,
                    kernel_dim: r.kernel.dim(),
                    bound_general: r.bound_general,
                    bound_singular: r.bound_singular,
                })
            }
            None => None,
        };

        let detector = match &u0 {
            Some(u) => {
                let (rec, scans, sp) = detect_evolved(cfg, &h, u, t)?;
                if let Some(p) = &propagation {
                    for (label, bound) in [("general", &p.bound_general), ("singular", &p.bound_singular)] {
                        let outside: Vec<f64> = rec
                            .flagged
                            .iter()
                            .filter(|f| {
                                let v = RVec::from_vec(f.direction.to_vec());
                                !propagation::cone_membership_tol(bound, &v, DETECTOR_ANG_TOL)
                            })
                            .map(|f| f.theta_deg)
                            .collect();
                        checks.flag(
                            format!("detector_within_{label}_bound@{t}"),
                            outside.is_empty(),
                            if outside.is_empty() {
                                String::new()
                            } else {
                                format!("flags outside the bound at {outside:?} degrees")
                            },
                        );
                    }
                }
                artifacts.scans.push((t, scans));
                artifacts.spectrograms.push((t, sp));
                Some(rec)
            }
            None => None,
        };

        times.push(TimeRecord {
            t,
            symplectic_residual: symp,
            positivity_defect: pos,
            kernel_bound: (&kb).into(),
            kernel_bound_consistency: consistency,
            propagation,
            detector,
        });
    }

    if let Some(exp) = &cfg.expected {
        check_expected(exp, &s, &times, &mut checks);
    }

    let passed = checks.0.iter().all(|c| c.passed);
    let report = RunReport {
        format_version: FORMAT_VERSION,
        scenario: cfg.name.clone(),
        d,
        q: q_to_pairs(h.q()),
        seed,
        hamilton,
        times,
        checks: checks.0,
        passed,
    };
    Ok((report, artifacts))
}

/// Evolve the datum to time t and run the detector.
pub fn evolve_datum(
    cfg: &ScenarioConfig,
    h: &QuadraticHamiltonian,
    u: &SampledDistribution,
    t: f64,
) -> Result<(SampledDistribution, Option<GalerkinRecord>)> {
    if let FastPath::Applied(v) = propagator::fast_path(h, u, t)? {
        return Ok((v, None));
    }
    let HermiteConfig { order, scale } = cfg.hermite;
    let op = propagator::hermite_matrix(h, order, scale)?;
    let r = propagator::hermite_analysis(u, order, scale)?;
    let e = propagator::evolve(&op, &r, t)?;
    let v = propagator::hermite_synthesis(&e, u.half_width(), u.n())?;
    let rec = GalerkinRecord {
        order,
        scale,
        dissipativity_margin: op.dissipativity_margin(),
        eps_trunc: e.eps_trunc(),
        norm_ratio: if r.norm() > 0.0 { e.norm() / r.norm() } else { 0.0 },
    };
    Ok((v, Some(rec)))
}

fn detect_evolved(
    cfg: &ScenarioConfig,
    h: &QuadraticHamiltonian,
    u: &SampledDistribution,
    t: f64,
) -> Result<(DetectorRecord, Vec<DirectionScan>, Spectrogram)> {
    let (v, galerkin) = evolve_datum(cfg, h, u, t)?;
    let first = detector::stft(&v, cfg.detector.windows[0])?;
    let est = detector::estimate_wf(&v, &cfg.detector)?;
    let rec = DetectorRecord {
        route: if galerkin.is_some() { "galerkin" } else { "fast_path" }.into(),
        galerkin,
        windows: cfg.detector.windows.clone(),
        max_exponent: finite(est.max_exponent()),
        flagged: est
            .flagged
            .iter()
            .map(|f| FlagRecord {
                theta_deg: f.theta.to_degrees(),
                direction: f.direction,
                exponent: f.exponent,
                confidence: f.confidence,
            })
            .collect(),
        caps: est
            .caps
            .iter()
            .map(|c| CapRecord {
                center_deg: c.center.to_degrees(),
                half_width_deg: c.half_width.to_degrees(),
                count: c.count,
            })
            .collect(),
    };
    Ok((rec, est.scans, first))
}

fn rays_set(n: usize, rays: &[Vec<f64>]) -> Result<ConicSet> {
    let dirs = rays
        .iter()
        .map(|r| {
            if r.len() != n {
                Err(Error::Dimension(format!("expected ray of length {n}, got {}", r.len())))
            } else {
                Ok(RVec::from_vec(r.clone()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ConicSet::rays(n, &dirs)
}

fn check_expected(exp: &Expected, s: &Subspace, times: &[TimeRecord], checks: &mut Checks) {
    let n = s.ambient_dim();
    if let Some(vs) = &exp.singular_space {
        let m = linalg::RMat::from_fn(n, vs.len(), |i, j| vs[j].get(i).cloned().unwrap_or(f64::NAN));
        let want = Subspace::from_spanning(&m, DEFAULT_TOL);
        checks.below("expected_singular_space".into(), s.distance(&want), 1e-9);
    }
    for b in &exp.bounds {
        let name = format!("expected_bound@{}", b.t);
        let Some(rec) = times.iter().find(|r| r.t == b.t).and_then(|r| r.propagation.as_ref()) else {
            checks.flag(name, false, "no propagation record at this time".into());
            continue;
        };
        match rays_set(n, &b.rays) {
            Ok(want) => {
                let got = &rec.bound_singular;
                let ok = got.patches.iter().all(|p| p.half_angle < 1e-8)
                    && propagation::directions_contained(got, &want, 1e-8)
                    && propagation::directions_contained(&want, got, 1e-8)
                    && propagation::directions_contained(&rec.bound_general, &want, 1e-8);
                checks.flag(
                    name,
                    ok,
                    if ok {
                        String::new()
                    } else {
                        format!("got {} patches, expected {:?}", got.len(), b.rays)
                    },
                );
            }
            Err(e) => checks.flag(name, false, e.to_string()),
        }
    }
    for f in &exp.flags {
        let name = format!("expected_flags@{}", f.t);
        let Some(rec) = times.iter().find(|r| r.t == f.t).and_then(|r| r.detector.as_ref()) else {
            checks.flag(name, false, "no detector record at this time".into());
            continue;
        };
        let got: Vec<f64> = rec.flagged.iter().map(|x| x.theta_deg.to_radians()).collect();
        let want: Vec<f64> = f.rays_deg.iter().map(|x| x.to_radians()).collect();
        let a = detector::ray_agreement(&got, &want);
        let ok = a.worst_spurious <= 3f64.to_radians() + 1e-12 && a.worst_missed <= 1.5f64.to_radians() + 1e-12;
        checks.flag(
            name,
            ok,
            format!(
                "worst spurious {:.2}°, worst missed {}",
                a.worst_spurious.to_degrees(),
                if a.worst_missed.is_finite() {
                    format!("{:.2}°", a.worst_missed.to_degrees())
                } else {
                    "(no flags)".into()
                }
            ),
        );
    }
}

// ---------------------------------------------------------------------------
// Catalog

fn diag_q(entries: &[Complex64]) -> CMat {
    let n = entries.len();
    CMat::from_fn(n, n, |i, j| if i == j { entries[i] } else { c64(0.0, 0.0) })
}

/// `x₁² + i(|ξ|² + 2 Σ_{j<d} x_{j+1} ξ_j)`.
pub fn degenerate_diffusion_q(d: usize) -> CMat {
    let mut q = CMat::zeros(2 * d, 2 * d);
    q[(0, 0)] = c64(1.0, 0.0);
    for j in 0..d {
        q[(d + j, d + j)] = c64(0.0, 1.0);
    }
    for j in 0..d - 1 {
        q[(j + 1, d + j)] = c64(0.0, 1.0);
        q[(d + j, j + 1)] = c64(0.0, 1.0);
    }
    q
}

/// `x₁² + i(|ξ|² + 2 Σ_{j<d−1} x_{j+1} ξ_j + x_d²)`.
pub fn degenerate_oscillator_q(d: usize) -> CMat {
    let mut q = CMat::zeros(2 * d, 2 * d);
    q[(0, 0)] = c64(1.0, 0.0);
    for j in 0..d {
        q[(d + j, d + j)] = c64(0.0, 1.0);
    }
    for j in 0..d.saturating_sub(2) {
        q[(j + 1, d + j)] = c64(0.0, 1.0);
        q[(d + j, j + 1)] = c64(0.0, 1.0);
    }
    q[(d - 1, d - 1)] += c64(0.0, 1.0);
    q
}

/// The 1d symbols of the catalog, keyed by scenario name.
pub fn catalog_hamiltonian(name: &str) -> Option<CMat> {
    let r = |v: f64| c64(v, 0.0);
    let i = |v: f64| c64(0.0, v);
    Some(match name {
        "multiplication" => diag_q(&[r(1.0), r(0.0)]),
        "heat" => diag_q(&[r(0.0), r(1.0)]),
        "harmonic_potential" => diag_q(&[r(1.0), r(1.0)]),
        "free_schrodinger" => diag_q(&[r(0.0), i(1.0)]),
        "harmonic_oscillator" => diag_q(&[i(1.0), i(1.0)]),
        "complex_heat" => diag_q(&[r(0.0), c64(1.0, 1.0)]),
        "mixed" => diag_q(&[r(1.0), i(1.0)]),
        "degenerate_diffusion" => degenerate_diffusion_q(2),
        "degenerate_diffusion_d3" => degenerate_oscillator_q(3),
        _ => return None,
    })
}

fn rays_deg(t: f64, deg: &[f64]) -> ExpectedFlags {
    ExpectedFlags {
        t,
        rays_deg: deg.to_vec(),
    }
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

fn ray_patch(v: &[f64]) -> Patch {
    Patch::ray(&RVec::from_vec(v.to_vec())).expect("nonzero ray")
}

fn bound(t: f64, rays: Vec<Vec<f64>>) -> ExpectedBound {
    ExpectedBound { t, rays }
}

struct Builder(ScenarioConfig);

impl Builder {
    fn new(name: &str, description: &str, q: CMat, times: &[f64]) -> Self {
        Builder(ScenarioConfig {
            name: name.into(),
            description: description.into(),
            d: q.nrows() / 2,
            q: q_to_pairs(&q),
            times: times.to_vec(),
            initial_datum: None,
            initial_wf: vec![],
            grid: GridConfig::default(),
            detector: DetectorConfig::default(),
            hermite: HermiteConfig::default(),
            expected: None,
        })
    }

    fn datum(mut self, e: &str) -> Self {
        self.0.initial_datum = Some(if e.contains('(') {
            InitialDatum::Expression(e.into())
        } else {
            InitialDatum::Builtin(e.into())
        });
        self
    }

    fn wf(mut self, rays: &[&[f64]]) -> Self {
        self.0.initial_wf = rays.iter().map(|r| ray_patch(r)).collect();
        self
    }

    fn grid(mut self, half_width: f64, n: usize) -> Self {
        self.0.grid = GridConfig { half_width, n };
        self
    }

    fn expect(mut self, e: Expected) -> ScenarioConfig {
        self.0.expected = Some(e);
        self.0
    }
}

fn expected(reference: &str) -> Expected {
    Expected {
        reference: reference.into(),
        singular_space: None,
        bounds: vec![],
        flags: vec![],
    }
}

/// Static wave front scenario: `q = 0`, so the datum is left unchanged.
fn static_wf(name: &str, description: &str, datum: &str, wf: &[&[f64]], flags: &[f64], reference: &str) -> ScenarioConfig {
    let q = CMat::zeros(2, 2);
    let t = 1.0;
    Builder::new(name, description, q, &[t])
        .datum(datum)
        .wf(wf)
        .expect(Expected {
            singular_space: Some(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            bounds: vec![bound(t, wf.iter().map(|r| unit(r)).collect())],
            flags: vec![rays_deg(t, flags)],
            ..expected(reference)
        })
}

/// Built-in scenarios.
pub fn catalog() -> Vec<ScenarioConfig> {
    let h = |n: &str| catalog_hamiltonian(n).expect("catalog symbol");
    let x_axis = vec![vec![1.0, 0.0]];
    let xi_axis = vec![vec![0.0, 1.0]];
    let dirac_rays: &[&[f64]] = &[&[0.0, 1.0], &[0.0, -1.0]];
    let sym_half_width = crate::data::symmetric_half_width(4096);
    let mut out = vec![];

    out.push(
        Builder::new(
            "multiplication",
            "q = x²: multiplication by e^{-tx²} removes the horizontal part of WF(H)",
            h("multiplication"),
            &[0.1, 0.5],
        )
        .datum("heaviside")
        .wf(&[&[0.0, 1.0], &[0.0, -1.0], &[1.0, 0.0]])
        .expect(Expected {
            singular_space: Some(xi_axis.clone()),
            bounds: [0.1, 0.5]
                .iter()
                .map(|&t| bound(t, vec![vec![0.0, 1.0], vec![0.0, -1.0]]))
                .collect(),
            flags: vec![rays_deg(0.1, &[90.0, 270.0]), rays_deg(0.5, &[90.0, 270.0])],
            ..expected("multiplication operator")
        }),
    );

    out.push(
        Builder::new("heat", "q = ξ²: the heat semigroup smooths δ completely", h("heat"), &[0.1, 0.5])
            .datum("dirac")
            .wf(dirac_rays)
            .expect(Expected {
                singular_space: Some(x_axis.clone()),
                bounds: vec![bound(0.1, vec![]), bound(0.5, vec![])],
                flags: vec![rays_deg(0.1, &[]), rays_deg(0.5, &[])],
                ..expected("heat equation")
            }),
    );

    out.push(
        Builder::new(
            "harmonic_potential",
            "q = x² + ξ²: S = {0}, every datum becomes Schwartz (Galerkin route)",
            h("harmonic_potential"),
            &[0.5, 1.0],
        )
        .datum("chirp(1)")
        .wf(&[&[1.0, 1.0], &[-1.0, -1.0]])
        .grid(12.0, 2048)
        .expect(Expected {
            singular_space: Some(vec![]),
            bounds: vec![bound(0.5, vec![]), bound(1.0, vec![])],
            flags: vec![rays_deg(0.5, &[]), rays_deg(1.0, &[])],
            ..expected("harmonic potential")
        }),
    );

    let fs_times = [0.05, 0.1];
    let fs_angle = |t: f64| (1.0f64).atan2(2.0 * t).to_degrees();
    out.push(
        Builder::new(
            "free_schrodinger",
            "q = iξ²: singularities of δ move along (2tξ, ξ)",
            h("free_schrodinger"),
            &fs_times,
        )
        .datum("dirac(0.97)")
        .wf(dirac_rays)
        .expect(Expected {
            singular_space: Some(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            bounds: fs_times
                .iter()
                .map(|&t| bound(t, vec![unit(&[2.0 * t, 1.0]), unit(&[-2.0 * t, -1.0])]))
                .collect(),
            flags: fs_times
                .iter()
                .map(|&t| rays_deg(t, &[fs_angle(t), fs_angle(t) + 180.0]))
                .collect(),
            ..expected("free Schrödinger equation")
        }),
    );

    out.push(
        Builder::new(
            "harmonic_oscillator",
            "q = i(x² + ξ²): phase space rotates by 2t",
            h("harmonic_oscillator"),
            &[FRAC_PI_4, FRAC_PI_2],
        )
        .datum("dirac(0.97)")
        .wf(dirac_rays)
        .grid(sym_half_width, 4096)
        .expect(Expected {
            singular_space: Some(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            bounds: [FRAC_PI_4, FRAC_PI_2]
                .iter()
                .map(|&t| {
                    let (s, c) = (2.0 * t).sin_cos();
                    bound(t, vec![vec![s, c], vec![-s, -c]])
                })
                .collect(),
            flags: vec![rays_deg(FRAC_PI_4, &[0.0, 180.0]), rays_deg(FRAC_PI_2, &[90.0, 270.0])],
            ..expected("harmonic oscillator")
        }),
    );

    out.push(
        Builder::new(
            "complex_heat",
            "q = (1 + i)ξ²: S = ℝ × {0}, only the horizontal part of WF(H) survives",
            h("complex_heat"),
            &[0.1, 0.5],
        )
        .datum("heaviside")
        .wf(&[&[0.0, 1.0], &[0.0, -1.0], &[1.0, 0.0]])
        .expect(Expected {
            singular_space: Some(x_axis.clone()),
            bounds: [0.1, 0.5].iter().map(|&t| bound(t, vec![vec![1.0, 0.0]])).collect(),
            flags: vec![rays_deg(0.1, &[0.0]), rays_deg(0.5, &[0.0])],
            ..expected("complex heat equation")
        }),
    );

    out.push(
        Builder::new(
            "mixed",
            "q = x² + iξ²: S = {0} (Galerkin route)",
            h("mixed"),
            &[0.5, 1.0],
        )
        .datum("chirp(1)")
        .wf(&[&[1.0, 1.0], &[-1.0, -1.0]])
        .grid(12.0, 2048)
        .expect(Expected {
            singular_space: Some(vec![]),
            bounds: vec![bound(0.5, vec![]), bound(1.0, vec![])],
            flags: vec![rays_deg(0.5, &[]), rays_deg(1.0, &[])],
            ..expected("Schrödinger equation with a harmonic damping potential")
        }),
    );

    out.push(
        Builder::new(
            "degenerate_diffusion",
            "x₁² + i(|ξ|² + 2x₂ξ₁) in d = 2: S = {0} (algebraic only)",
            h("degenerate_diffusion"),
            &[0.1, 0.5],
        )
        .wf(&[&[0.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 0.0]])
        .expect(Expected {
            singular_space: Some(vec![]),
            bounds: vec![bound(0.1, vec![]), bound(0.5, vec![])],
            ..expected("very degenerate diffusion")
        }),
    );

    let d3_times = [0.1, 0.5];
    out.push(
        Builder::new(
            "degenerate_diffusion_d3",
            "x₁² + i(|ξ|² + 2x₂ξ₁ + x₃²) in d = 3: only (x₃, ξ₃) survives and rotates (algebraic only)",
            h("degenerate_diffusion_d3"),
            &d3_times,
        )
        .wf(&[&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]])
        .expect(Expected {
            singular_space: Some(vec![vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]]),
            bounds: d3_times
                .iter()
                .map(|&t| {
                    let (s, c) = (2.0 * t).sin_cos();
                    bound(t, vec![vec![0.0, 0.0, s, 0.0, 0.0, c]])
                })
                .collect(),
            ..expected("very degenerate diffusion with an oscillator")
        }),
    );

    out.push(static_wf(
        "chirp",
        "WF(e^{ix²/2}) is the graph of ξ = x",
        "chirp(1)",
        &[&[1.0, 1.0], &[-1.0, -1.0]],
        &[45.0, 225.0],
        "wave front examples: chirp",
    ));
    out.push(static_wf(
        "cubic_phase",
        "WF(e^{ix³}) = {0} × ℝ₊",
        "power_phase(3,4.5)",
        &[&[0.0, 1.0]],
        &[90.0],
        "examples: cubic phase",
    ));
    out.push(static_wf(
        "quartic_phase",
        "WF(e^{ix⁴}) = {0} × (ℝ \\ 0)",
        "power_phase(4,3.6)",
        dirac_rays,
        &[90.0, 270.0],
        "examples: quartic phase",
    ));
    out.push(static_wf(
        "heaviside",
        "WF(H) = {0} × (ℝ \\ 0) ∪ ℝ₊ × {0}",
        "heaviside",
        &[&[0.0, 1.0], &[0.0, -1.0], &[1.0, 0.0]],
        &[90.0, 270.0, 0.0],
        "examples: Heaviside function",
    ));
    out.push(static_wf(
        "airy",
        "WF(Ai) = ℝ₋ × {0}",
        "airy_fourier(100)",
        &[&[-1.0, 0.0]],
        &[180.0],
        "examples: Airy function",
    ));
    out.push(static_wf(
        "dirac",
        "WF(δ) = {0} × (ℝ \\ 0)",
        "dirac",
        dirac_rays,
        &[90.0, 270.0],
        "wave front examples: Dirac measure",
    ));
    out.push(static_wf(
        "monomial",
        "WF(x²) = (ℝ \\ 0) × {0}",
        "monomial(2)",
        &[&[1.0, 0.0], &[-1.0, 0.0]],
        &[0.0, 180.0],
        "wave front examples: polynomials",
    ));

    let mut heat_airy = Builder::new(
        "heat_airy",
        "heat applied to the Airy function is immediately Schwartz",
        h("heat"),
        &[0.1, 0.5],
    )
    .datum("airy_fourier(1)")
    .wf(&[&[-1.0, 0.0]])
    .grid(1600.0, 131072)
    .expect(Expected {
        singular_space: Some(x_axis),
        bounds: vec![bound(0.1, vec![vec![-1.0, 0.0]]), bound(0.5, vec![vec![-1.0, 0.0]])],
        flags: vec![rays_deg(0.1, &[]), rays_deg(0.5, &[])],
        ..expected("heat equation applied to the Airy function")
    });
    heat_airy.detector.windows = vec![3.5];
    heat_airy.detector.half_angle = Some(0.026);
    out.push(heat_airy);

    out
}

pub fn catalog_entry(name: &str) -> Option<ScenarioConfig> {
    catalog().into_iter().find(|c| c.name == name)
}
