//! Gabor wave-front detection: Gaussian-window STFT magnitudes and decay
//! rates of the spectrogram along dyadic shells in narrow cones.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::propagator::SampledDistribution;

/// `|V_φ u|` on columns `x_c = x0 + c·dx_col` and rows `ξ_r = ξ0 + r·dξ`.
#[derive(Clone, Debug)]
pub struct Spectrogram {
    pub window: f64,
    pub half_width: f64,
    pub xi_max: f64,
    pub x0: f64,
    pub dx_col: f64,
    pub xi0: f64,
    pub dxi: f64,
    pub n_cols: usize,
    pub n_rows: usize,
    /// Column-major magnitudes.
    mags: Vec<f64>,
}

impl Spectrogram {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.mags[col * self.n_rows + row]
    }

    pub fn column(&self, col: usize) -> &[f64] {
        &self.mags[col * self.n_rows..(col + 1) * self.n_rows]
    }

    pub fn peak(&self) -> f64 {
        self.mags.iter().cloned().fold(0.0, f64::max)
    }

    pub fn x_at(&self, col: usize) -> f64 {
        self.x0 + col as f64 * self.dx_col
    }

    pub fn xi_at(&self, row: usize) -> f64 {
        self.xi0 + row as f64 * self.dxi
    }

    /// Bilinear interpolation, zero outside the sampled box.
    pub fn sample(&self, x: f64, xi: f64) -> f64 {
        let ci = (x - self.x0) / self.dx_col;
        let ri = (xi - self.xi0) / self.dxi;
        let c0 = ci.floor();
        let r0 = ri.floor();
        let fc = ci - c0;
        let fr = ri - r0;
        let at = |r: f64, c: f64| -> f64 {
            if r < 0.0 || c < 0.0 || r >= self.n_rows as f64 || c >= self.n_cols as f64 {
                0.0
            } else {
                self.get(r as usize, c as usize)
            }
        };
        (1.0 - fr) * ((1.0 - fc) * at(r0, c0) + fc * at(r0, c0 + 1.0))
            + fr * ((1.0 - fc) * at(r0 + 1.0, c0) + fc * at(r0 + 1.0, c0 + 1.0))
    }

    /// Downsample by max-pooling to at most `max_rows × max_cols`.
    pub fn downsampled(&self, max_rows: usize, max_cols: usize) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
        let rs = self.n_rows.div_ceil(max_rows.max(1));
        let cs = self.n_cols.div_ceil(max_cols.max(1));
        let nr = self.n_rows.div_ceil(rs);
        let nc = self.n_cols.div_ceil(cs);
        let xs = (0..nc).map(|c| self.x_at(c * cs)).collect();
        let xis = (0..nr).map(|r| self.xi_at(r * rs)).collect();
        let mut out = vec![vec![0.0; nc]; nr];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                for rr in r * rs..((r + 1) * rs).min(self.n_rows) {
                    for cc in c * cs..((c + 1) * cs).min(self.n_cols) {
                        *v = f64::max(*v, self.get(rr, cc));
                    }
                }
            }
        }
        (xis, xs, out)
    }
}

/// `|V_φ u|` with `φ(y) = (πs²)^{-1/4} e^{-y²/(2s²)}`.
///
/// The window is cut at ±7s, columns are 0.25s apart and the DFT length is
/// the smallest power of two giving ξ-spacing ≤ 0.25/s. The grid function is
/// taken as zero outside `[−X, X)`.
pub fn stft(u: &SampledDistribution, window: f64) -> Result<Spectrogram> {
    if !(window > 0.0) {
        return Err(Error::Window(format!("window scale {window} must be positive")));
    }
    let x_half = u.half_width();
    if window > x_half / 4.0 {
        return Err(Error::Window(format!(
            "window scale {window} wider than X/4 = {}",
            x_half / 4.0
        )));
    }
    let n = u.n();
    let dx = u.dx();
    let half = (7.0 * window / dx).ceil() as usize;
    let step = ((0.25 * window / dx).round() as usize).max(1);
    let mut len = 1usize;
    while len < 2 * half + 1 || 2.0 * PI / (len as f64 * dx) > 0.25 / window {
        len *= 2;
    }
    let n_cols = n.div_ceil(step);
    let norm = (PI * window * window).powf(-0.25);
    let fft = FftPlanner::new().plan_fft_forward(len);
    let values = u.values();
    let cols = par::map_range(n_cols, |c| {
        let j0 = (c * step) as isize;
        let mut seg = vec![Complex64::new(0.0, 0.0); len];
        for (k, o) in (-(half as isize)..=half as isize).enumerate() {
            let j = j0 + o;
            if j < 0 || j >= n as isize {
                continue;
            }
            let y = o as f64 * dx;
            let w = norm * (-y * y / (2.0 * window * window)).exp();
            seg[k] = values[j as usize] * (w * dx);
        }
        fft.process(&mut seg);
        // fftshift so that row 0 is ξ = −π/dx
        let mut out = vec![0.0; len];
        for (r, v) in out.iter_mut().enumerate() {
            *v = seg[(r + len / 2) % len].norm();
        }
        out
    });
    let mut mags = Vec::with_capacity(n_cols * len);
    for c in cols {
        mags.extend_from_slice(&c);
    }
    let dxi = 2.0 * PI / (len as f64 * dx);
    Ok(Spectrogram {
        window,
        half_width: x_half,
        xi_max: u.xi_max(),
        x0: -x_half,
        dx_col: step as f64 * dx,
        xi0: -(len as f64 / 2.0) * dxi,
        dxi,
        n_cols,
        n_rows: len,
        mags,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    pub n_directions: usize,
    /// Decay order separating flagged from Schwartz-like directions.
    pub n_det: f64,
    pub min_confidence: f64,
    pub n_shells: usize,
    /// Number of outer shells in the log–log fit.
    pub n_fit: usize,
    /// Largest shell radius as a fraction of the distance to the grid edge.
    pub radius_frac: f64,
    /// Relative radial half-thickness of each shell.
    pub shell_thickness: f64,
    /// Cone half-angle in radians; `None` means half the angular step.
    pub half_angle: Option<f64>,
    /// A direction is flagged only when every window flags it.
    pub windows: Vec<f64>,
    /// Relative floor applied to shell maxima before taking logs.
    pub floor: f64,
    /// Outer-shell magnitude required for a flag.
    pub min_outer: f64,
    /// Cap on the samples per shell along each axis.
    pub sample_cap: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            n_directions: 720,
            n_det: 3.0,
            min_confidence: 0.8,
            n_shells: 6,
            n_fit: 4,
            radius_frac: 0.7,
            shell_thickness: 0.1,
            half_angle: None,
            windows: vec![1.0, 2.0],
            floor: 1e-10,
            min_outer: 1e-6,
            sample_cap: 400,
        }
    }
}

impl DetectorConfig {
    pub fn cone_half_angle(&self) -> f64 {
        self.half_angle.unwrap_or(PI / self.n_directions as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_directions < 4 {
            return Err(Error::Config("need at least 4 directions".into()));
        }
        if self.n_shells < 4 || self.n_fit < 2 || self.n_fit > self.n_shells {
            return Err(Error::Config(format!(
                "need ≥ 4 shells and 2 ≤ n_fit ≤ n_shells, got {} and {}",
                self.n_shells, self.n_fit
            )));
        }
        if self.windows.is_empty() {
            return Err(Error::Config("no window scales".into()));
        }
        if !(self.radius_frac > 0.0 && self.radius_frac * (1.0 + self.shell_thickness) <= 1.0) {
            return Err(Error::Config(format!(
                "radius fraction {} with thickness {} leaves the grid",
                self.radius_frac, self.shell_thickness
            )));
        }
        Ok(())
    }
}

/// Decay fit of one direction.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellDecay {
    pub exponent: f64,
    pub confidence: f64,
    /// Shell maxima relative to the spectrogram peak.
    pub maxima: Vec<f64>,
}

/// Distance from the origin to the edge of `[−X, X]×[−Ξ, Ξ]` along θ.
pub fn box_radius(theta: f64, half_width: f64, xi_max: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let rx = if c.abs() > 1e-12 { half_width / c.abs() } else { f64::INFINITY };
    let rxi = if s.abs() > 1e-12 { xi_max / s.abs() } else { f64::INFINITY };
    rx.min(rxi)
}

/// Dyadic radii `r_max / 2^j`, innermost first.
pub fn dyadic_radii(r_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| r_max / 2f64.powi((n - 1 - j) as i32)).collect()
}

/// Least-squares slope of `log max(m, floor)` against `log r` over the outer
/// `n_fit` shells. Confidence is `exp(−rms residual)`; exponent is −∞ when
/// the outer shell is below ten times the floor.
pub fn fit_decay(radii: &[f64], maxima: &[f64], n_fit: usize, floor: f64) -> (f64, f64) {
    let k = radii.len();
    let lr: Vec<f64> = radii[k - n_fit..].iter().map(|r| r.ln()).collect();
    let lm: Vec<f64> = maxima[k - n_fit..].iter().map(|m| m.max(floor).ln()).collect();
    let mr = lr.iter().sum::<f64>() / n_fit as f64;
    let mm = lm.iter().sum::<f64>() / n_fit as f64;
    let sxx: f64 = lr.iter().map(|r| (r - mr) * (r - mr)).sum();
    let sxy: f64 = lr.iter().zip(&lm).map(|(r, m)| (r - mr) * (m - mm)).sum();
    let slope = sxy / sxx;
    let rms = (lr
        .iter()
        .zip(&lm)
        .map(|(r, m)| {
            let e = (m - mm) - slope * (r - mr);
            e * e
        })
        .sum::<f64>()
        / n_fit as f64)
        .sqrt();
    let conf = (-rms).exp();
    if maxima[k - 1] < 10.0 * floor {
        (f64::NEG_INFINITY, conf)
    } else {
        (slope, conf)
    }
}

fn shell_max(sp: &Spectrogram, theta: f64, r: f64, alpha: f64, cfg: &DetectorConfig) -> f64 {
    let (s, c) = theta.sin_cos();
    let hx = 0.5 * sp.window;
    let hxi = 0.5 / sp.window;
    let th = cfg.shell_thickness;
    let cap = cfg.sample_cap as f64;
    let nr = (2.0 * th * r * (c.abs() / hx).max(s.abs() / hxi)).ceil().max(3.0).min(cap) as usize + 1;
    let na = (2.0 * alpha * r * (s.abs() / hx).max(c.abs() / hxi)).ceil().max(3.0).min(cap) as usize + 1;
    let mut best = 0.0f64;
    for ia in 0..na {
        let a = theta - alpha + 2.0 * alpha * ia as f64 / (na - 1) as f64;
        let (sa, ca) = a.sin_cos();
        for ir in 0..nr {
            let rr = r * (1.0 - th + 2.0 * th * ir as f64 / (nr - 1) as f64);
            best = best.max(sp.sample(rr * ca, rr * sa));
        }
    }
    best
}

/// Decay of the spectrogram in the cone of half-angle `alpha` around θ.
pub fn shell_decay(sp: &Spectrogram, theta: f64, alpha: f64, radii: &[f64], cfg: &DetectorConfig) -> Result<ShellDecay> {
    shell_decay_with_peak(sp, theta, alpha, radii, cfg, sp.peak())
}

fn shell_decay_with_peak(
    sp: &Spectrogram,
    theta: f64,
    alpha: f64,
    radii: &[f64],
    cfg: &DetectorConfig,
    peak: f64,
) -> Result<ShellDecay> {
    if radii.len() < 4 || cfg.n_fit > radii.len() {
        return Err(Error::Config(format!("need ≥ 4 shells, got {}", radii.len())));
    }
    let outer = radii.iter().cloned().fold(0.0, f64::max) * (1.0 + cfg.shell_thickness);
    // cone edges near a box corner may poke out; those samples read as 0
    if outer > box_radius(theta, sp.half_width, sp.xi_max) * (1.0 + 1e-12) {
        return Err(Error::Range(format!(
            "shell around θ = {theta:.4} leaves the grid at radius {outer:.3}"
        )));
    }
    let peak = if peak > 0.0 { peak } else { 1.0 };
    let maxima: Vec<f64> = radii
        .iter()
        .map(|&r| shell_max(sp, theta, r, alpha, cfg) / peak)
        .collect();
    let (exponent, confidence) = fit_decay(radii, &maxima, cfg.n_fit, cfg.floor);
    Ok(ShellDecay {
        exponent,
        confidence,
        maxima,
    })
}

/// Per-direction results for one window.
#[derive(Clone, Debug)]
pub struct DirectionScan {
    pub window: f64,
    pub thetas: Vec<f64>,
    pub radii: Vec<Vec<f64>>,
    pub decays: Vec<ShellDecay>,
    pub flagged: Vec<bool>,
}

pub fn scan_directions(sp: &Spectrogram, cfg: &DetectorConfig) -> Result<DirectionScan> {
    cfg.validate()?;
    let nd = cfg.n_directions;
    let alpha = cfg.cone_half_angle();
    let peak = sp.peak();
    let thetas: Vec<f64> = (0..nd).map(|k| 2.0 * PI * k as f64 / nd as f64).collect();
    let results = par::map_slice(&thetas, |&th| {
        let radii = dyadic_radii(cfg.radius_frac * box_radius(th, sp.half_width, sp.xi_max), cfg.n_shells);
        let d = shell_decay_with_peak(sp, th, alpha, &radii, cfg, peak);
        (radii, d)
    });
    let mut radii = Vec::with_capacity(nd);
    let mut decays = Vec::with_capacity(nd);
    for (r, d) in results {
        radii.push(r);
        decays.push(d?);
    }
    let flagged = decays
        .iter()
        .map(|d| {
            d.exponent > -cfg.n_det
                && d.confidence > cfg.min_confidence
                && d.maxima.last().cloned().unwrap_or(0.0) > cfg.min_outer
        })
        .collect();
    Ok(DirectionScan {
        window: sp.window,
        thetas,
        radii,
        decays,
        flagged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlaggedDirection {
    pub theta: f64,
    pub direction: [f64; 2],
    /// Smallest exponent over the windows.
    pub exponent: f64,
    /// Smallest confidence over the windows.
    pub confidence: f64,
}

/// Contiguous run of flagged directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub center: f64,
    pub half_width: f64,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct WFEstimate {
    pub flagged: Vec<FlaggedDirection>,
    pub caps: Vec<Cap>,
    pub n_det: f64,
    pub scans: Vec<DirectionScan>,
}

impl WFEstimate {
    pub fn flagged_angles(&self) -> Vec<f64> {
        self.flagged.iter().map(|f| f.theta).collect()
    }

    /// Largest exponent over all directions of the first window.
    pub fn max_exponent(&self) -> f64 {
        self.scans
            .iter()
            .flat_map(|s| s.decays.iter().map(|d| d.exponent))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn estimate_wf(u: &SampledDistribution, cfg: &DetectorConfig) -> Result<WFEstimate> {
    cfg.validate()?;
    let scans = cfg
        .windows
        .iter()
        .map(|&s| stft(u, s).and_then(|sp| scan_directions(&sp, cfg)))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(scans, cfg))
}

fn combine(scans: Vec<DirectionScan>, cfg: &DetectorConfig) -> WFEstimate {
    let nd = cfg.n_directions;
    let mask: Vec<bool> = (0..nd).map(|k| scans.iter().all(|s| s.flagged[k])).collect();
    let flagged = (0..nd)
        .filter(|&k| mask[k])
        .map(|k| {
            let th = scans[0].thetas[k];
            FlaggedDirection {
                theta: th,
                direction: [th.cos(), th.sin()],
                exponent: scans.iter().map(|s| s.decays[k].exponent).fold(f64::INFINITY, f64::min),
                confidence: scans.iter().map(|s| s.decays[k].confidence).fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    WFEstimate {
        flagged,
        caps: merge_caps(&mask),
        n_det: cfg.n_det,
        scans,
    }
}

/// Merge cyclically adjacent flagged directions into caps.
pub fn merge_caps(mask: &[bool]) -> Vec<Cap> {
    let nd = mask.len();
    if nd == 0 || !mask.iter().any(|&m| m) {
        return vec![];
    }
    let step = 2.0 * PI / nd as f64;
    if mask.iter().all(|&m| m) {
        return vec![Cap {
            center: 0.0,
            half_width: PI,
            count: nd,
        }];
    }
    // start right after an unflagged direction so runs do not wrap
    let start = (0..nd).find(|&k| !mask[k]).expect("some unflagged") + 1;
    let mut caps = vec![];
    let mut run: Option<(usize, usize)> = None;
    for i in 0..nd {
        let k = (start + i) % nd;
        if mask[k] {
            run = Some(match run {
                Some((s, c)) => (s, c + 1),
                None => (start + i, 1),
            });
        } else if let Some((s, c)) = run.take() {
            caps.push(cap_of(s, c, step, nd));
        }
    }
    if let Some((s, c)) = run {
        caps.push(cap_of(s, c, step, nd));
    }
    caps.sort_by(|a, b| a.center.partial_cmp(&b.center).expect("finite"));
    caps
}

fn cap_of(first: usize, count: usize, step: f64, nd: usize) -> Cap {
    let mid = first as f64 + (count as f64 - 1.0) / 2.0;
    let center = (mid * step).rem_euclid(2.0 * PI);
    let _ = nd;
    Cap {
        center,
        half_width: (count as f64 - 1.0) / 2.0 * step,
        count,
    }
}

/// Smallest angular distance between two angles.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Agreement between flagged angles and a set of true ray angles, all in
/// radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayAgreement {
    /// Largest distance from a flagged angle to the nearest true ray.
    pub worst_spurious: f64,
    /// Largest distance from a true ray to the nearest flagged angle.
    pub worst_missed: f64,
}

pub fn ray_agreement(flagged: &[f64], truth: &[f64]) -> RayAgreement {
    let nearest = |a: f64, set: &[f64]| set.iter().map(|&b| angle_diff(a, b)).fold(f64::INFINITY, f64::min);
    RayAgreement {
        worst_spurious: flagged.iter().map(|&a| nearest(a, truth)).fold(0.0, f64::max),
        worst_missed: truth.iter().map(|&a| nearest(a, flagged)).fold(0.0, f64::max),
    }
}
