use std::f64::consts::PI;

use gabor_wf::data::{self, Datum};
use gabor_wf::detector::*;
use gabor_wf::propagator::SampledDistribution;
use gabor_wf::scenario::catalog_entry;
use gabor_wf::Complex64;

const SPURIOUS: f64 = 3.0;
const MISSED: f64 = 1.5;

fn within(flags: &[f64], truth_deg: &[f64], spurious_deg: f64, missed_deg: f64) -> Result<(), String> {
    let truth: Vec<f64> = truth_deg.iter().map(|d| d.to_radians()).collect();
    let a = ray_agreement(flags, &truth);
    let missed_ok = truth.is_empty() || a.worst_missed <= missed_deg.to_radians() + 1e-12;
    if a.worst_spurious <= spurious_deg.to_radians() + 1e-12 && missed_ok {
        Ok(())
    } else {
        Err(format!(
            "spurious {:.2}°, missed {:.2}°",
            a.worst_spurious.to_degrees(),
            a.worst_missed.to_degrees()
        ))
    }
}

fn flags_of(u: &SampledDistribution, cfg: &DetectorConfig) -> Vec<f64> {
    estimate_wf(u, cfg).unwrap().flagged_angles()
}

fn sample(expr: &str, half_width: f64, n: usize) -> SampledDistribution {
    Datum::parse(expr).unwrap().sample(half_width, n).unwrap()
}

#[test]
fn static_examples_match_known_wave_fronts() {
    for name in ["chirp", "cubic_phase", "quartic_phase", "heaviside", "airy", "dirac", "monomial"] {
        let cfg = catalog_entry(name).unwrap();
        let u = cfg.builtin_datum().unwrap().unwrap();
        let want = &cfg.expected.as_ref().unwrap().flags[0].rays_deg;
        let got = flags_of(&u, &cfg.detector);
        within(&got, want, SPURIOUS, MISSED).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn combined_flags_are_the_window_intersection() {
    for (name, want) in [("heaviside", vec![0.0, 90.0, 270.0]), ("chirp", vec![45.0, 225.0])] {
        let cfg = catalog_entry(name).unwrap();
        let u = cfg.builtin_datum().unwrap().unwrap();
        let mut single = vec![];
        for s in [1.0, 2.0] {
            let one = DetectorConfig {
                windows: vec![s],
                ..cfg.detector.clone()
            };
            let f = flags_of(&u, &one);
            // a single window may over-flag but must not miss
            within(&f, &want, 180.0, MISSED).unwrap_or_else(|e| panic!("{name}, s = {s}: {e}"));
            single.push(f);
        }
        let both: Vec<f64> = single[0].iter().filter(|a| single[1].contains(a)).cloned().collect();
        assert_eq!(flags_of(&u, &cfg.detector), both);
    }
}

#[test]
fn gaussian_spectrogram_closed_form() {
    // |V_φ e^{-x²/2}|(x, ξ) = π^{1/4} e^{-(x² + ξ²)/4} for s = 1
    let u = sample("gaussian", 20.0, 2048);
    let sp = stft(&u, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for c in (0..sp.n_cols).step_by(7) {
        for r in (0..sp.n_rows).step_by(5) {
            let (x, xi) = (sp.x_at(c), sp.xi_at(r));
            let want = PI.powf(0.25) * (-(x * x + xi * xi) / 4.0).exp();
            worst = worst.max((sp.get(r, c) - want).abs());
        }
    }
    assert!(worst < 1e-10, "{worst:e}");
}

#[test]
fn dirac_spectrogram_is_window_profile() {
    let u = sample("dirac", 20.0, 2048);
    for s in [0.5, 1.0, 2.0] {
        let sp = stft(&u, s).unwrap();
        for c in 0..sp.n_cols {
            let x = sp.x_at(c);
            let want = (PI * s * s).powf(-0.25) * (-x * x / (2.0 * s * s)).exp();
            let want = if x.abs() > 7.0 * s + 1e-9 { 0.0 } else { want };
            for r in [0, sp.n_rows / 3, sp.n_rows - 1] {
                assert!((sp.get(r, c) - want).abs() < 1e-12, "s {s}, x {x}");
            }
        }
    }
}

#[test]
fn time_frequency_shift_translates_spectrogram() {
    let u = sample("heaviside", 40.0, 4096);
    let sp = stft(&u, 1.0).unwrap();
    let step = (sp.dx_col / u.dx()).round() as usize;
    let (kc, mr) = (9usize, 40usize);
    let v = data::time_frequency_shift(&u, (kc * step) as isize, mr as f64 * sp.dxi);
    let sv = stft(&v, 1.0).unwrap();
    let peak = sp.peak();
    let half = (7.0 / u.dx()).ceil() as usize / step + 1;
    let mut worst: f64 = 0.0;
    for c in half + kc..sp.n_cols - half {
        for r in mr..sp.n_rows {
            worst = worst.max((sv.get(r, c) - sp.get(r - mr, c - kc)).abs() / peak);
        }
    }
    assert!(worst < 1e-12, "{worst:e}");
}

#[test]
fn conjugation_and_reflection_mirror_flags() {
    let cfg = catalog_entry("cubic_phase").unwrap();
    let u = cfg.builtin_datum().unwrap().unwrap();
    let base = flags_of(&u, &cfg.detector);
    let deg: Vec<f64> = base.iter().map(|a| a.to_degrees()).collect();

    // conj: (x, ξ) ↦ (x, −ξ)
    let conj = u.with_values(u.values().iter().map(|z| z.conj()).collect());
    let want: Vec<f64> = deg.iter().map(|d| 360.0 - d).collect();
    within(&flags_of(&conj, &cfg.detector), &want, MISSED, MISSED).unwrap();

    // u(−x): (x, ξ) ↦ (−x, −ξ)
    let n = u.n();
    let refl: Vec<Complex64> = (0..n)
        .map(|j| if j == 0 { Complex64::new(0.0, 0.0) } else { u.values()[n - j] })
        .collect();
    let want: Vec<f64> = deg.iter().map(|d| d + 180.0).collect();
    within(&flags_of(&u.with_values(refl), &cfg.detector), &want, MISSED, MISSED).unwrap();
}

#[test]
fn fourier_transform_rotates_flags() {
    // WF(𝓕u) = {(ξ, −x) : (x, ξ) ∈ WF(u)}, a clockwise quarter turn
    let n = 4096;
    let x = data::symmetric_half_width(n);
    let cfg = DetectorConfig::default();
    for (expr, truth) in [("heaviside", vec![0.0, 90.0, 270.0]), ("chirp(0.5)", vec![26.565, 206.565])] {
        let u = sample(expr, x, n);
        within(&flags_of(&u, &cfg), &truth, SPURIOUS, MISSED).unwrap_or_else(|e| panic!("{expr}: {e}"));
        let fu = data::fourier_transform(&u).unwrap();
        let rotated: Vec<f64> = truth.iter().map(|d| d - 90.0).collect();
        within(&flags_of(&fu, &cfg), &rotated, SPURIOUS, MISSED).unwrap_or_else(|e| panic!("F[{expr}]: {e}"));
    }
}

#[test]
fn smooth_data_flag_nothing() {
    let u = sample("gaussian", 40.0, 4096);
    let est = estimate_wf(&u, &DetectorConfig::default()).unwrap();
    assert!(est.flagged.is_empty());
    assert!(est.caps.is_empty());
}

#[test]
fn window_limits_are_enforced() {
    let u = sample("gaussian", 8.0, 256);
    assert!(stft(&u, 0.0).is_err());
    assert!(stft(&u, -1.0).is_err());
    assert!(stft(&u, 2.5).is_err());
    assert!(stft(&u, 2.0).is_ok());
}

#[test]
fn radii_and_box() {
    let r = dyadic_radii(64.0, 6);
    assert_eq!(r, vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0]);
    assert!((box_radius(0.0, 3.0, 5.0) - 3.0).abs() < 1e-15);
    assert!((box_radius(PI / 2.0, 3.0, 5.0) - 5.0).abs() < 1e-12);
}
