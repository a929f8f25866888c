//! Model signals and distributions, Gaussian windows, sampling and seminorms.

use crate::airy::airy_ai;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTerm {
    pub order: u32,
    pub coeff: Complex64,
}

/// Closed-form signals. `DeltaComb` is Σ c_k D^k δ₀ with D = −i d/dx.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticSignal {
    /// e^{icx^m}
    PowerChirp { c: f64, m: u32 },
    /// e^{ic|x|^α}
    ModulusChirp { c: f64, alpha: f64 },
    /// e^{ixξ₀}
    PlaneWave { xi0: f64 },
    /// e^{zx}
    Exponential { z: Complex64 },
    /// (πσ²)^{−1/4} e^{−(x−center)²/(2σ²)} e^{ix·modulation}
    Gaussian { sigma: f64, center: f64, modulation: f64 },
    DeltaComb { terms: Vec<DeltaTerm> },
    /// Σ coeffs[k] x^k
    Polynomial { coeffs: Vec<Complex64> },
    /// e^{zx + icx^m}
    ExpChirp { z: Complex64, c: f64, m: u32 },
    /// (2π)^{−1/2} e^{−i·time·x^m}
    FreqChirp { time: f64, m: u32 },
    Airy,
    Scaled { factor: Complex64, inner: Box<AnalyticSignal> },
    /// e^{ixξ₀} u(x − x₀)
    Shifted { x0: f64, xi0: f64, inner: Box<AnalyticSignal> },
    Sum(Vec<AnalyticSignal>),
    /// The signal whose Fourier transform is `spectrum`.
    FourierSide { spectrum: Box<AnalyticSignal> },
}

fn nonzero(name: &str, v: f64) -> Result<()> {
    if v == 0.0 || !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be finite and nonzero, got {v}")));
    }
    Ok(())
}

fn finite(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
    }
    Ok(())
}

fn degree(m: u32) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("degree m must be at least 2, got {m}")));
    }
    Ok(())
}

impl AnalyticSignal {
    pub fn power_chirp(c: f64, m: u32) -> Result<Self> {
        let s = Self::PowerChirp { c, m };
        s.validate()?;
        Ok(s)
    }

    pub fn modulus_chirp(c: f64, alpha: f64) -> Result<Self> {
        let s = Self::ModulusChirp { c, alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn plane_wave(xi0: f64) -> Self {
        Self::PlaneWave { xi0 }
    }

    pub fn exponential(z: Complex64) -> Self {
        Self::Exponential { z }
    }

    pub fn gaussian(sigma: f64, center: f64, modulation: f64) -> Result<Self> {
        let s = Self::Gaussian { sigma, center, modulation };
        s.validate()?;
        Ok(s)
    }

    /// D^k δ₀.
    pub fn delta_derivative(k: u32) -> Self {
        Self::DeltaComb { terms: vec![DeltaTerm { order: k, coeff: Complex64::new(1.0, 0.0) }] }
    }

    pub fn exp_chirp(z: Complex64, c: f64, m: u32) -> Result<Self> {
        let s = Self::ExpChirp { z, c, m };
        s.validate()?;
        Ok(s)
    }

    pub fn freq_chirp(time: f64, m: u32) -> Result<Self> {
        let s = Self::FreqChirp { time, m };
        s.validate()?;
        Ok(s)
    }

    pub fn scaled(factor: Complex64, inner: AnalyticSignal) -> Self {
        Self::Scaled { factor, inner: Box::new(inner) }
    }

    /// Π(x₀, ξ₀)u = e^{ixξ₀}u(x − x₀).
    pub fn shifted(x0: f64, xi0: f64, inner: AnalyticSignal) -> Self {
        Self::Shifted { x0, xi0, inner: Box::new(inner) }
    }

    pub fn fourier_side(spectrum: AnalyticSignal) -> Self {
        Self::FourierSide { spectrum: Box::new(spectrum) }
    }

    /// Ai written as F⁻¹ of the frequency-side cubic chirp (2π)^{−1/2}e^{iξ³/3}.
    pub fn airy_fourier() -> Self {
        Self::fourier_side(Self::scaled(
            Complex64::new(INV_SQRT_2PI, 0.0),
            Self::PowerChirp { c: 1.0 / 3.0, m: 3 },
        ))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::PowerChirp { c, m } => {
                nonzero("c", *c)?;
                degree(*m)
            }
            Self::ModulusChirp { c, alpha } => {
                nonzero("c", *c)?;
                if !(*alpha > 1.0) || !alpha.is_finite() {
                    return Err(Error::InvalidParameter(format!("alpha must exceed 1, got {alpha}")));
                }
                if alpha.fract() == 0.0 && (*alpha as i64) % 2 == 0 {
                    return Err(Error::InvalidParameter(format!("alpha must not be an even integer, got {alpha}")));
                }
                Ok(())
            }
            Self::PlaneWave { xi0 } => finite("xi0", *xi0),
            Self::Exponential { z } => {
                finite("Re z", z.re)?;
                finite("Im z", z.im)
            }
            Self::Gaussian { sigma, center, modulation } => {
                if !(*sigma > 0.0) || !sigma.is_finite() {
                    return Err(Error::NonPositiveSigma(*sigma));
                }
                finite("center", *center)?;
                finite("modulation", *modulation)
            }
            Self::DeltaComb { terms } => {
                for t in terms {
                    finite("coefficient", t.coeff.norm())?;
                }
                Ok(())
            }
            Self::Polynomial { coeffs } => {
                for c in coeffs {
                    finite("coefficient", c.norm())?;
                }
                Ok(())
            }
            Self::ExpChirp { z, c, m } => {
                finite("Re z", z.re)?;
                finite("Im z", z.im)?;
                nonzero("c", *c)?;
                degree(*m)
            }
            Self::FreqChirp { time, m } => {
                finite("time", *time)?;
                degree(*m)
            }
            Self::Airy => Ok(()),
            Self::Scaled { factor, inner } => {
                finite("factor", factor.norm())?;
                inner.validate()
            }
            Self::Shifted { x0, xi0, inner } => {
                finite("x0", *x0)?;
                finite("xi0", *xi0)?;
                inner.validate()
            }
            Self::Sum(parts) => parts.iter().try_for_each(|p| p.validate()),
            Self::FourierSide { spectrum } => spectrum.validate(),
        }
    }

    pub fn is_pointwise(&self) -> bool {
        match self {
            Self::DeltaComb { .. } | Self::FourierSide { .. } => false,
            Self::Scaled { inner, .. } | Self::Shifted { inner, .. } => inner.is_pointwise(),
            Self::Sum(parts) => parts.iter().all(|p| p.is_pointwise()),
            _ => true,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PowerChirp { .. } => "PowerChirp",
            Self::ModulusChirp { .. } => "ModulusChirp",
            Self::PlaneWave { .. } => "PlaneWave",
            Self::Exponential { .. } => "Exponential",
            Self::Gaussian { .. } => "Gaussian",
            Self::DeltaComb { .. } => "DeltaComb",
            Self::Polynomial { .. } => "Polynomial",
            Self::ExpChirp { .. } => "ExpChirp",
            Self::FreqChirp { .. } => "FreqChirp",
            Self::Airy => "Airy",
            Self::Scaled { .. } => "Scaled",
            Self::Shifted { .. } => "Shifted",
            Self::Sum(_) => "Sum",
            Self::FourierSide { .. } => "FourierSide",
        }
    }

    /// Instantaneous-frequency range and envelope data over [a, b], used to pick quadrature steps.
    pub(crate) fn local_spectrum(&self, a: f64, b: f64) -> LocalSpectrum {
        let poly_range = |coef: f64, p: i32| {
            // coef·y^p is monotone on each side of 0.
            let mut vals = vec![coef * a.powi(p), coef * b.powi(p)];
            if a < 0.0 && b > 0.0 {
                vals.push(0.0);
            }
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        };
        match self {
            Self::PowerChirp { c, m } => {
                let (lo, hi) = poly_range(c * *m as f64, *m as i32 - 1);
                LocalSpectrum::new(lo, hi)
            }
            Self::ModulusChirp { c, alpha } => {
                let f = |y: f64| c * alpha * y.signum() * y.abs().powf(alpha - 1.0);
                let (fa, fb) = (f(a), f(b));
                LocalSpectrum::new(fa.min(fb), fa.max(fb))
            }
            Self::PlaneWave { xi0 } => LocalSpectrum::new(*xi0, *xi0),
            Self::Exponential { z } => LocalSpectrum { growth: z.re.abs(), ..LocalSpectrum::new(z.im, z.im) },
            Self::Gaussian { sigma, modulation, .. } => {
                LocalSpectrum { env_step: sigma / 4.0, ..LocalSpectrum::new(*modulation, *modulation) }
            }
            Self::Polynomial { coeffs } => {
                let deg = coeffs.len().saturating_sub(1) as f64;
                let span = a.abs().max(b.abs()).max(1.0);
                LocalSpectrum { env_step: (span / (deg + 1.0)).min(1.0), ..LocalSpectrum::new(0.0, 0.0) }
            }
            Self::ExpChirp { z, c, m } => {
                let (lo, hi) = poly_range(c * *m as f64, *m as i32 - 1);
                LocalSpectrum { growth: z.re.abs(), ..LocalSpectrum::new(lo + z.im, hi + z.im) }
            }
            Self::FreqChirp { time, m } => {
                let (lo, hi) = poly_range(-time * *m as f64, *m as i32 - 1);
                LocalSpectrum::new(lo, hi)
            }
            Self::Airy => {
                let f = (-a).max(0.0).sqrt();
                LocalSpectrum { growth: b.max(0.0).sqrt(), env_step: 0.25, ..LocalSpectrum::new(-f, f) }
            }
            Self::Scaled { inner, .. } => inner.local_spectrum(a, b),
            Self::Shifted { x0, xi0, inner } => {
                let mut l = inner.local_spectrum(a - x0, b - x0);
                l.fmin += xi0;
                l.fmax += xi0;
                l
            }
            Self::Sum(parts) => parts.iter().fold(LocalSpectrum::empty(), |acc, p| acc.union(p.local_spectrum(a, b))),
            Self::DeltaComb { .. } | Self::FourierSide { .. } => LocalSpectrum::new(0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LocalSpectrum {
    pub fmin: f64,
    pub fmax: f64,
    /// Bound on |d/dy log|u||.
    pub growth: f64,
    /// Largest step that resolves the amplitude.
    pub env_step: f64,
}

impl LocalSpectrum {
    fn new(fmin: f64, fmax: f64) -> Self {
        Self { fmin, fmax, growth: 0.0, env_step: f64::INFINITY }
    }

    fn empty() -> Self {
        Self { fmin: f64::INFINITY, fmax: f64::NEG_INFINITY, growth: 0.0, env_step: f64::INFINITY }
    }

    fn union(self, o: Self) -> Self {
        Self {
            fmin: self.fmin.min(o.fmin),
            fmax: self.fmax.max(o.fmax),
            growth: self.growth.max(o.growth),
            env_step: self.env_step.min(o.env_step),
        }
    }
}

pub fn eval_signal(sig: &AnalyticSignal, x: f64) -> Result<Complex64> {
    use AnalyticSignal::*;
    Ok(match sig {
        PowerChirp { c, m } => Complex64::cis(c * x.powi(*m as i32)),
        ModulusChirp { c, alpha } => Complex64::cis(c * x.abs().powf(*alpha)),
        PlaneWave { xi0 } => Complex64::cis(xi0 * x),
        Exponential { z } => (z * x).exp(),
        Gaussian { sigma, center, modulation } => {
            let amp = (PI * sigma * sigma).powf(-0.25) * (-(x - center).powi(2) / (2.0 * sigma * sigma)).exp();
            Complex64::from_polar(amp, modulation * x)
        }
        Polynomial { coeffs } => coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c),
        ExpChirp { z, c, m } => (z * x + Complex64::new(0.0, c * x.powi(*m as i32))).exp(),
        FreqChirp { time, m } => Complex64::from_polar(INV_SQRT_2PI, -time * x.powi(*m as i32)),
        Airy => Complex64::new(airy_ai(x), 0.0),
        Scaled { factor, inner } => factor * eval_signal(inner, x)?,
        Shifted { x0, xi0, inner } => Complex64::cis(xi0 * x) * eval_signal(inner, x - x0)?,
        Sum(parts) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in parts {
                acc += eval_signal(p, x)?;
            }
            acc
        }
        DeltaComb { .. } | FourierSide { .. } => return Err(Error::NotPointwise(sig.name().into())),
    })
}

/// ln|u(x)|, computed without forming |u(x)| where overflow or underflow is possible.
pub fn eval_log_abs(sig: &AnalyticSignal, x: f64) -> Result<f64> {
    use AnalyticSignal::*;
    Ok(match sig {
        PowerChirp { .. } | ModulusChirp { .. } | PlaneWave { .. } => 0.0,
        Exponential { z } => z.re * x,
        ExpChirp { z, .. } => z.re * x,
        Gaussian { sigma, center, .. } => {
            -0.25 * (PI * sigma * sigma).ln() - (x - center).powi(2) / (2.0 * sigma * sigma)
        }
        FreqChirp { .. } => INV_SQRT_2PI.ln(),
        Scaled { factor, inner } => factor.norm().ln() + eval_log_abs(inner, x)?,
        Shifted { x0, inner, .. } => eval_log_abs(inner, x - x0)?,
        _ => eval_signal(sig, x)?.norm().ln(),
    })
}

/// ln u(z) off the real axis, for variants that extend to entire functions.
pub(crate) fn log_entire(sig: &AnalyticSignal, z: Complex64) -> Option<Complex64> {
    use AnalyticSignal::*;
    let i = Complex64::i();
    Some(match sig {
        PowerChirp { c, m } => i * c * z.powu(*m),
        PlaneWave { xi0 } => i * xi0 * z,
        Exponential { z: a } => a * z,
        ExpChirp { z: a, c, m } => a * z + i * c * z.powu(*m),
        FreqChirp { time, m } => INV_SQRT_2PI.ln() - i * time * z.powu(*m),
        Gaussian { sigma, center, modulation } => {
            let d = z - center;
            -0.25 * (PI * sigma * sigma).ln() - d * d / (2.0 * sigma * sigma) + i * modulation * z
        }
        Polynomial { coeffs } => coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c).ln(),
        Scaled { factor, inner } => factor.ln() + log_entire(inner, z)?,
        Shifted { x0, xi0, inner } => i * xi0 * z + log_entire(inner, z - x0)?,
        _ => return None,
    })
}

/// ln|u(z)| off the real axis.
pub(crate) fn log_abs_entire(sig: &AnalyticSignal, z: Complex64) -> Option<f64> {
    log_entire(sig, z).map(|l| l.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub sigma: f64,
    pub unit: bool,
}

pub fn make_window(sigma: f64) -> Result<Window> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::NonPositiveSigma(sigma));
    }
    Ok(Window { sigma, unit: true })
}

impl Window {
    /// Window with peak value 1 instead of unit L² norm.
    pub fn unnormalized(sigma: f64) -> Result<Self> {
        make_window(sigma).map(|w| Self { unit: false, ..w })
    }

    pub fn amplitude(&self) -> f64 {
        if self.unit {
            (PI * self.sigma * self.sigma).powf(-0.25)
        } else {
            1.0
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.amplitude() * (-y * y / (2.0 * self.sigma * self.sigma)).exp()
    }

    pub fn log_eval(&self, y: f64) -> f64 {
        self.amplitude().ln() - y * y / (2.0 * self.sigma * self.sigma)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.amplitude().powi(2) * self.sigma * PI.sqrt()
    }

    /// The Fourier transform φ̂ = factor · window.
    pub fn fourier_dual(&self) -> (Window, f64) {
        let w = Window { sigma: 1.0 / self.sigma, unit: self.unit };
        let factor = if self.unit { 1.0 } else { self.sigma };
        (w, factor)
    }
}

/// Probabilists' Hermite polynomials He_0..=He_n at u.
pub(crate) fn hermite_he(n: usize, u: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(1.0);
    if n >= 1 {
        h.push(u);
    }
    for k in 1..n {
        let next = u * h[k] - k as f64 * h[k - 1];
        h.push(next);
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !start.is_finite() {
            return Err(Error::InvalidParameter(format!("grid step must be positive, got {step}")));
        }
        if count < 2 {
            return Err(Error::InvalidParameter(format!("grid needs at least 2 points, got {count}")));
        }
        Ok(Self { start, step, count })
    }

    /// `count` points covering [lo, hi] with both endpoints included.
    pub fn covering(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi}]")));
        }
        if count < 2 {
            return Err(Error::InvalidParameter(format!("grid needs at least 2 points, got {count}")));
        }
        Self::new(lo, (hi - lo) / (count - 1) as f64, count)
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }

    pub fn end(&self) -> f64 {
        self.point(self.count - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub grid: UniformGrid,
    pub values: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.count {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values })
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.step
    }
}

pub fn sample(sig: &AnalyticSignal, grid: UniformGrid) -> Result<SampledSignal> {
    if !sig.is_pointwise() {
        return Err(Error::NotPointwise(sig.name().into()));
    }
    let values = (0..grid.count).map(|k| eval_signal(sig, grid.point(k))).collect::<Result<Vec<_>>>()?;
    SampledSignal::new(grid, values)
}

/// Angular frequencies of an FFT of length n with sample step h, in FFT order.
pub(crate) fn fft_frequencies(n: usize, h: f64) -> Vec<f64> {
    let dxi = 2.0 * PI / (n as f64 * h);
    (0..n)
        .map(|k| {
            let kk = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
            kk * dxi
        })
        .collect()
}

/// D^β f by spectral differentiation, D = −i d/dx.
pub fn spectral_derivative(f: &SampledSignal, beta: u32) -> Vec<Complex64> {
    let n = f.values.len();
    if beta == 0 {
        return f.values.clone();
    }
    let mut planner = FftPlanner::new();
    let mut buf = f.values.clone();
    planner.plan_fft_forward(n).process(&mut buf);
    let freqs = fft_frequencies(n, f.grid.step);
    for (k, v) in buf.iter_mut().enumerate() {
        if n % 2 == 0 && k == n / 2 && beta % 2 == 1 {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v *= freqs[k].powi(beta as i32);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let inv = 1.0 / n as f64;
    buf.iter().map(|v| v * inv).collect()
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// sup over the grid of |x^α D^β f| / (h^{α+β} α!ᵗ β!ˢ).
pub fn gs_seminorm_estimate(f: &SampledSignal, alpha: u32, beta: u32, t: f64, s: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::NonPositiveArgument(h));
    }
    let max = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edge = f.values[0].norm().max(f.values[f.values.len() - 1].norm());
    if edge >= 1e-12 * max && max > 0.0 {
        return Err(Error::BoundaryMass);
    }
    let d = spectral_derivative(f, beta);
    let sup = d
        .iter()
        .enumerate()
        .map(|(k, v)| f.grid.point(k).abs().powi(alpha as i32) * v.norm())
        .fold(0.0, f64::max);
    let log_den = (alpha + beta) as f64 * h.ln() + t * ln_factorial(alpha) + s * ln_factorial(beta);
    Ok(sup * (-log_den).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_recursion() {
        let h = hermite_he(4, 2.0);
        // He_4(u) = u⁴ − 6u² + 3
        assert_eq!(h[4], 16.0 - 24.0 + 3.0);
    }

    #[test]
    fn modulus_chirp_rejects_even_alpha() {
        assert!(AnalyticSignal::modulus_chirp(1.0, 4.0).is_err());
        assert!(AnalyticSignal::modulus_chirp(1.0, 2.5).is_ok());
    }

    #[test]
    fn fft_frequency_layout() {
        let f = fft_frequencies(4, 1.0);
        assert_eq!(f[1], PI / 2.0);
        assert_eq!(f[3], -PI / 2.0);
    }
}
