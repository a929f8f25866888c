//! Short-time Fourier transform V_φu(x,ξ) = (2π)^{−1/2}∫u(y)e^{−iyξ}φ(y−x)dy.

mod analytic;
mod grid;
mod logc;
mod quadrature;

pub use analytic::has_closed_form;
pub use grid::{cross_wigner, moyal_check, stft_grid, MoyalCheck, StftMatrix};
pub use quadrature::stft_quadrature_reference;

use crate::error::{Error, Result};
use crate::geometry::PhasePoint;
use crate::signal::{AnalyticSignal, SampledSignal, Window, INV_SQRT_2PI};
use num_complex::Complex64;

/// Values below this fraction of the integrand's absolute mass are not resolvable.
pub const FLOOR_REL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    Analytic,
    Quadrature { tol: f64 },
    Grid,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignalSource {
    Analytic(AnalyticSignal),
    Sampled(SampledSignal),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StftEvaluator {
    signal: SignalSource,
    window: Window,
    backend: Backend,
}

impl StftEvaluator {
    pub fn new(signal: SignalSource, window: Window, backend: Backend) -> Result<Self> {
        match (&signal, backend) {
            (SignalSource::Analytic(s), Backend::Analytic) => {
                s.validate()?;
                if !has_closed_form(s) {
                    return Err(Error::BackendMismatch(format!("{} has no closed-form STFT", s.name())));
                }
            }
            (SignalSource::Analytic(s), Backend::Quadrature { tol }) => {
                s.validate()?;
                if !(tol > 0.0) {
                    return Err(Error::NonPositiveArgument(tol));
                }
                if !quadrature::supported(s) {
                    return Err(Error::BackendMismatch(format!("{} cannot be integrated pointwise", s.name())));
                }
            }
            (SignalSource::Sampled(_), Backend::Grid) => {}
            (SignalSource::Sampled(_), _) => {
                return Err(Error::BackendMismatch("sampled signals need the grid backend".into()))
            }
            (SignalSource::Analytic(_), Backend::Grid) => {
                return Err(Error::BackendMismatch("the grid backend needs a sampled signal".into()))
            }
        }
        Ok(Self { signal, window, backend })
    }

    pub fn analytic(sig: AnalyticSignal, window: Window) -> Result<Self> {
        Self::new(SignalSource::Analytic(sig), window, Backend::Analytic)
    }

    pub fn quadrature(sig: AnalyticSignal, window: Window, tol: f64) -> Result<Self> {
        Self::new(SignalSource::Analytic(sig), window, Backend::Quadrature { tol })
    }

    pub fn grid(sig: SampledSignal, window: Window) -> Result<Self> {
        Self::new(SignalSource::Sampled(sig), window, Backend::Grid)
    }

    pub fn signal(&self) -> &SignalSource {
        &self.signal
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Same signal and backend with another window.
    pub fn with_window(&self, window: Window) -> Self {
        Self { window, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StftValue {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub below_floor: bool,
    /// ln|V|; finite even where `value` under- or overflows.
    pub log_abs: f64,
    /// ln of the absolute integrand mass the floor is measured against. A value is also below
    /// the floor when it does not exceed twice its error estimate.
    pub log_scale: f64,
}

impl StftValue {
    pub(crate) fn from_logs(log_value: Complex64, log_scale: f64, abs_error_estimate: f64) -> Self {
        let log_abs = log_value.re;
        Self {
            value: if log_abs == f64::NEG_INFINITY { Complex64::new(0.0, 0.0) } else { log_value.exp() },
            abs_error_estimate,
            below_floor: log_abs < log_scale + FLOOR_REL.ln()
                || log_scale == f64::NEG_INFINITY
                || log_abs <= (2.0 * abs_error_estimate).ln(),
            log_abs,
            log_scale,
        }
    }

    pub(crate) fn scale_by(self, factor: Complex64) -> Self {
        let lf = logc::ln(factor);
        Self {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.norm(),
            below_floor: self.below_floor,
            log_abs: self.log_abs + lf.re,
            log_scale: self.log_scale + lf.re,
        }
    }

    /// Keeps the bound in `log_abs` but reports no value.
    pub(crate) fn zeroed(self) -> Self {
        Self { value: Complex64::new(0.0, 0.0), below_floor: true, ..self }
    }

    pub(crate) fn log_value(&self) -> Complex64 {
        Complex64::new(self.log_abs, self.value.arg())
    }
}

pub fn stft_eval(ev: &StftEvaluator, p: PhasePoint) -> Result<StftValue> {
    match (&ev.signal, ev.backend) {
        (SignalSource::Analytic(s), Backend::Analytic) => analytic::eval(s, &ev.window, p.x, p.xi),
        (SignalSource::Analytic(s), Backend::Quadrature { tol }) => quadrature::eval(s, &ev.window, p.x, p.xi, tol),
        (SignalSource::Sampled(f), Backend::Grid) => Ok(grid::eval_direct(f, &ev.window, p.x, p.xi)),
        _ => Err(Error::BackendMismatch("invalid evaluator".into())),
    }
}

pub(crate) fn prefactor(window: &Window) -> f64 {
    INV_SQRT_2PI * window.amplitude()
}
