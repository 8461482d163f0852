//! Sampled initial data on the grid `[−X, X)` and a small expression syntax
//! naming them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::{bin_frequency, fft_inplace, SampledDistribution};

/// Raised-cosine cutoff: 1 for `|x| ≤ a`, 0 for `|x| ≥ b`.
pub fn taper(x: f64, a: f64, b: f64) -> f64 {
    let t = ((x.abs() - a) / (b - a)).clamp(0.0, 1.0);
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        0.5 * (1.0 + (PI * t).cos())
    }
}

/// Cutoff applied to data without compact support.
pub const TAPER_START: f64 = 0.8;
pub const TAPER_END: f64 = 0.97;

fn edge_taper(x: f64, half_width: f64) -> f64 {
    taper(x, TAPER_START * half_width, TAPER_END * half_width)
}

/// Builtin initial data.
#[derive(Clone, Debug, PartialEq)]
pub enum Datum {
    Gaussian,
    /// Single sample of height 1/dx at x = 0.
    Dirac,
    /// δ with spectrum cut off between `0.8·b·Ξ` and `b·Ξ`.
    DiracBand(f64),
    Constant,
    /// `e^{iαx²/2}`.
    Chirp(f64),
    Heaviside,
    /// `x^k`.
    Monomial(u32),
    /// `e^{i(κx)^p}`.
    PowerPhase { p: u32, kappa: f64 },
    /// `𝓕^{-1}(e^{iβξ³})`, ξ-support ending where the ridge reaches `0.85·X`.
    Airy { beta: f64 },
}

impl Datum {
    /// Parse `name` or `name(args)`.
    pub fn parse(expr: &str) -> Result<Self> {
        let expr = expr.trim();
        let (name, args) = match expr.find('(') {
            Some(i) => {
                let inner = expr[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Config(format!("unbalanced parentheses in `{expr}`")))?;
                let args = inner
                    .split(',')
                    .map(|a| {
                        a.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Config(format!("bad argument `{a}` in `{expr}`")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                (expr[..i].trim(), args)
            }
            None => (expr, vec![]),
        };
        let want = |k: &[usize]| -> Result<()> {
            if k.contains(&args.len()) {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "`{name}` takes {k:?} arguments, got {}",
                    args.len()
                )))
            }
        };
        let as_int = |v: f64| -> Result<u32> {
            if v >= 0.0 && v.fract() == 0.0 && v <= 64.0 {
                Ok(v as u32)
            } else {
                Err(Error::Config(format!("`{name}` needs a small nonnegative integer, got {v}")))
            }
        };
        match name {
            "gaussian" => want(&[0]).map(|_| Datum::Gaussian),
            "dirac" | "delta" => {
                want(&[0, 1])?;
                Ok(match args.first() {
                    Some(&b) if b > 0.0 && b <= 1.0 => Datum::DiracBand(b),
                    Some(&b) => return Err(Error::Config(format!("band fraction {b} outside (0, 1]"))),
                    None => Datum::Dirac,
                })
            }
            "constant" | "one" => want(&[0]).map(|_| Datum::Constant),
            "chirp" => {
                want(&[0, 1])?;
                Ok(Datum::Chirp(args.first().cloned().unwrap_or(1.0)))
            }
            "heaviside" => want(&[0]).map(|_| Datum::Heaviside),
            "monomial" => {
                want(&[1])?;
                Ok(Datum::Monomial(as_int(args[0])?))
            }
            "power_phase" => {
                want(&[1, 2])?;
                let p = as_int(args[0])?;
                if p < 2 {
                    return Err(Error::Config(format!("power_phase needs p ≥ 2, got {p}")));
                }
                Ok(Datum::PowerPhase {
                    p,
                    kappa: args.get(1).cloned().unwrap_or(1.0),
                })
            }
            "airy_fourier" | "airy" => {
                want(&[0, 1])?;
                Ok(Datum::Airy {
                    beta: args.first().cloned().unwrap_or(1.0),
                })
            }
            _ => Err(Error::Config(format!("unknown datum `{name}`"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Datum::Gaussian => "gaussian".into(),
            Datum::Dirac => "dirac".into(),
            Datum::DiracBand(b) => format!("dirac({b})"),
            Datum::Constant => "constant".into(),
            Datum::Chirp(a) => format!("chirp({a})"),
            Datum::Heaviside => "heaviside".into(),
            Datum::Monomial(k) => format!("monomial({k})"),
            Datum::PowerPhase { p, kappa } => format!("power_phase({p},{kappa})"),
            Datum::Airy { beta } => format!("airy_fourier({beta})"),
        }
    }

    /// Sample on `n` points of `[−X, X)`.
    pub fn sample(&self, half_width: f64, n: usize) -> Result<SampledDistribution> {
        let label = self.name();
        let dx = 2.0 * half_width / n as f64;
        let xi = PI / dx;
        let c = |v: f64| Complex64::new(v, 0.0);
        match *self {
            Datum::Gaussian => SampledDistribution::from_fn(half_width, n, label, |x| c((-x * x / 2.0).exp())),
            Datum::Dirac => {
                let mut v = vec![c(0.0); n];
                if n > 0 {
                    v[n / 2] = c(1.0 / dx);
                }
                SampledDistribution::new(half_width, v, label)
            }
            Datum::DiracBand(b) => from_spectrum(half_width, n, label, |k| c(taper(k, 0.8 * b * xi, b * xi))),
            Datum::Constant => SampledDistribution::from_fn(half_width, n, label, |x| c(edge_taper(x, half_width))),
            Datum::Chirp(a) => SampledDistribution::from_fn(half_width, n, label, |x| {
                Complex64::new(0.0, a * x * x / 2.0).exp() * edge_taper(x, half_width)
            }),
            Datum::Heaviside => SampledDistribution::from_fn(half_width, n, label, |x| {
                c(if x >= 0.0 { edge_taper(x, half_width) } else { 0.0 })
            }),
            Datum::Monomial(k) => SampledDistribution::from_fn(half_width, n, label, |x| {
                c(x.powi(k as i32) * edge_taper(x, half_width))
            }),
            Datum::PowerPhase { p, kappa } => {
                // cut off where the local frequency p κ^p x^{p−1} runs from 0.75Ξ to 0.92Ξ
                let pf = p as f64;
                let reach = |f: f64| (f * xi / (pf * kappa.powf(pf))).powf(1.0 / (pf - 1.0));
                let (a, b) = (reach(0.75).min(TAPER_START * half_width), reach(0.92).min(TAPER_END * half_width));
                SampledDistribution::from_fn(half_width, n, label, |x| {
                    Complex64::new(0.0, (kappa * x).powi(p as i32)).exp() * taper(x, a, b)
                })
            }
            Datum::Airy { beta } => {
                let kc = (0.85 * half_width / (3.0 * beta)).sqrt().min(xi);
                from_spectrum(half_width, n, label, |k| {
                    Complex64::new(0.0, beta * k * k * k).exp() * taper(k, 0.8 * kc, kc)
                })
            }
        }
    }
}

/// Inverse DFT of `û(k)` placed so that x = 0 sits at index n/2, scaled by
/// 1/dx so that a flat spectrum gives the grid δ.
pub fn from_spectrum(
    half_width: f64,
    n: usize,
    label: String,
    uhat: impl Fn(f64) -> Complex64,
) -> Result<SampledDistribution> {
    if n < 16 || !n.is_power_of_two() {
        return Err(Error::Resolution(format!("sample count {n} must be a power of two ≥ 16")));
    }
    let dx = 2.0 * half_width / n as f64;
    let mut buf: Vec<Complex64> = (0..n).map(|j| uhat(bin_frequency(j, n, dx))).collect();
    fft_inplace(&mut buf, true);
    buf.rotate_right(n / 2);
    let s = 1.0 / dx;
    buf.iter_mut().for_each(|v| *v *= s);
    SampledDistribution::new(half_width, buf, label)
}

/// Discrete Fourier transform as a grid function: `û` sampled on the
/// frequency grid `k ∈ [−Ξ, Ξ)` mapped onto `[−X′, X′)` with `X′ = Ξ`. Used
/// for the symplectic covariance check `WF(𝓕u) = J·WF(u)`; requires
/// `X = Ξ`, i.e. `X² = πn/2`.
pub fn fourier_transform(u: &SampledDistribution) -> Result<SampledDistribution> {
    let n = u.n();
    let xi = u.xi_max();
    if (xi - u.half_width()).abs() > 1e-9 * xi {
        return Err(Error::Domain(format!(
            "Fourier transform on the grid needs X = Ξ (X = {}, Ξ = {xi})",
            u.half_width()
        )));
    }
    let mut buf = u.values().to_vec();
    buf.rotate_left(n / 2);
    fft_inplace(&mut buf, false);
    buf.rotate_right(n / 2);
    let s = u.dx() / (2.0 * PI).sqrt();
    buf.iter_mut().for_each(|v| *v *= s);
    SampledDistribution::new(u.half_width(), buf, format!("F[{}]", u.label))
}

/// Half-width X with `X = Ξ` for n samples.
pub fn symmetric_half_width(n: usize) -> f64 {
    (PI * n as f64 / 2.0).sqrt()
}

/// `Π(x0, ξ0)u(x) = e^{iξ0 x} u(x − x0)` for a shift by a whole number of samples.
pub fn time_frequency_shift(u: &SampledDistribution, shift: isize, xi0: f64) -> SampledDistribution {
    let n = u.n() as isize;
    let vals = (0..n)
        .map(|j| {
            let src = j - shift;
            let v = if (0..n).contains(&src) {
                u.values()[src as usize]
            } else {
                Complex64::new(0.0, 0.0)
            };
            v * Complex64::new(0.0, xi0 * u.x(j as usize)).exp()
        })
        .collect();
    u.with_values(vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taper_profile() {
        assert_eq!(taper(0.5, 1.0, 2.0), 1.0);
        assert_eq!(taper(-3.0, 1.0, 2.0), 0.0);
        assert!((taper(1.5, 1.0, 2.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn parse_round_trip() {
        for e in ["gaussian", "dirac", "dirac(0.97)", "chirp(1)", "heaviside", "monomial(2)", "power_phase(3,4.5)", "airy_fourier(100)", "constant"] {
            let d = Datum::parse(e).unwrap();
            assert_eq!(Datum::parse(&d.name()).unwrap(), d);
        }
        assert!(Datum::parse("sin(x)").is_err());
        assert!(Datum::parse("chirp(1").is_err());
        assert!(Datum::parse("monomial(1.5)").is_err());
        assert!(Datum::parse("power_phase(1)").is_err());
    }

    #[test]
    fn flat_spectrum_is_grid_delta() {
        let u = from_spectrum(4.0, 64, "d".into(), |_| Complex64::new(1.0, 0.0)).unwrap();
        let d = Datum::Dirac.sample(4.0, 64).unwrap();
        assert!(u.rel_error(&d) < 1e-12);
    }
}
