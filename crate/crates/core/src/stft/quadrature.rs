//! Trapezoid quadrature of the windowed Fourier integral with step halving.

use super::{logc, StftValue, FLOOR_REL};
use crate::error::{Error, Result};
use crate::geometry::PhasePoint;
use crate::signal::{eval_signal, log_abs_entire, log_entire, AnalyticSignal, Window, INV_SQRT_2PI};
use num_complex::Complex64;
use std::f64::consts::PI;

const MAX_HALVINGS: usize = 12;
/// Truncation radius in window widths.
const RADIUS: f64 = 10.0;
const MAX_NODES: usize = 1 << 23;
/// Node count above which a contour-shift bound is tried before summing.
const CERTIFY_NODES: usize = 1 << 12;
const CERTIFY_SAMPLES: usize = 1024;

pub(crate) fn supported(s: &AnalyticSignal) -> bool {
    use AnalyticSignal::*;
    match s {
        DeltaComb { .. } => false,
        FourierSide { spectrum } => supported(spectrum),
        Scaled { inner, .. } | Shifted { inner, .. } => supported(inner),
        Sum(parts) => parts.iter().all(supported),
        _ => true,
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
struct Acc {
    sum: Complex64,
    comp: Complex64,
}

impl Acc {
    fn add(&mut self, v: Complex64) {
        fn two_sum(s: f64, v: f64, c: &mut f64) -> f64 {
            let t = s + v;
            *c += if s.abs() >= v.abs() { (s - t) + v } else { (v - t) + s };
            t
        }
        self.sum.re = two_sum(self.sum.re, v.re, &mut self.comp.re);
        self.sum.im = two_sum(self.sum.im, v.im, &mut self.comp.im);
    }

    fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

pub fn stft_quadrature_reference(sig: &AnalyticSignal, window: &Window, p: PhasePoint, tol: f64) -> Result<StftValue> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveArgument(tol));
    }
    eval_with(sig, window, p.x, p.xi, tol, true)
}

pub(crate) fn eval(s: &AnalyticSignal, w: &Window, x: f64, xi: f64, tol: f64) -> Result<StftValue> {
    eval_with(s, w, x, xi, tol, false)
}

/// `strict` refines until the relative tolerance holds; otherwise a refinement delta at the
/// rounding-noise level of the absolute integrand mass is also accepted.
fn eval_with(s: &AnalyticSignal, w: &Window, x: f64, xi: f64, tol: f64, strict: bool) -> Result<StftValue> {
    use AnalyticSignal::*;
    match s {
        FourierSide { spectrum } => {
            let (dual, factor) = w.fourier_dual();
            let v = eval_with(spectrum, &dual, xi, -x, tol, strict)?;
            Ok(v.scale_by(Complex64::from_polar(factor, -x * xi)))
        }
        Scaled { factor, inner } if !inner.is_pointwise() => Ok(eval_with(inner, w, x, xi, tol, strict)?.scale_by(*factor)),
        Shifted { x0, xi0, inner } if !inner.is_pointwise() => {
            let v = eval_with(inner, w, x - x0, xi - xi0, tol, strict)?;
            let phase = -x0 * (xi - xi0);
            Ok(StftValue {
                value: v.value * Complex64::cis(phase),
                ..v
            })
        }
        Sum(parts) if !s.is_pointwise() => {
            let mut logs = Vec::new();
            let mut scales = Vec::new();
            let mut err = 0.0;
            for p in parts {
                let v = eval_with(p, w, x, xi, tol, strict)?;
                logs.push(v.log_value());
                scales.push(v.log_scale);
                err += v.abs_error_estimate;
            }
            Ok(StftValue::from_logs(logc::sum(&logs), logc::sum_real(&scales), err))
        }
        DeltaComb { .. } => Err(Error::BackendMismatch("delta combs have no pointwise integrand".into())),
        _ => direct(s, w, x, xi, tol, strict),
    }
}

fn direct(s: &AnalyticSignal, w: &Window, x: f64, xi: f64, tol: f64, strict: bool) -> Result<StftValue> {
    if strict {
        if let Some(v) = shifted_reference(s, w, x, xi, tol) {
            return Ok(v);
        }
    }
    let sigma = w.sigma;
    let probe = s.local_spectrum(x - RADIUS * sigma, x + RADIUS * sigma);
    let half = RADIUS * sigma + sigma * sigma * probe.growth.min(RADIUS / sigma);
    let (a, b) = (x - half, x + half);
    let loc = s.local_spectrum(a, b);
    let dev = (loc.fmin - xi).abs().max((loc.fmax - xi).abs());
    let mut h = (sigma / 4.0).min(loc.env_step);
    if dev > 0.0 && dev.is_finite() {
        h = h.min(PI / (2.0 * dev));
    }
    // Rounding in the phase arguments bounds the attainable absolute accuracy.
    let phase_bound = loc.fmin.abs().max(loc.fmax.abs()) * a.abs().max(b.abs()) + xi.abs() * half;
    let noise_rel = f64::EPSILON * (1.0 + phase_bound);
    let mut n = (((b - a) / h).ceil() as usize).max(16);
    if n > CERTIFY_NODES {
        let dir = if xi < loc.fmin { 1.0 } else if xi > loc.fmax { -1.0 } else { 0.0 };
        if dir != 0.0 {
            if let Some(v) = shifted_bound(s, w, x, xi, half, dir) {
                return Ok(v);
            }
        }
    }
    if n > MAX_NODES {
        return Err(Error::QuadratureNonConvergent { x, xi, delta: f64::INFINITY, value: f64::NAN });
    }
    h = (b - a) / n as f64;

    // Integrand relative to the centre: u(x+v) e^{−ivξ} φ(v); the factor e^{−ixξ} is applied at the end.
    let f = |v: f64| -> Result<Complex64> {
        let u = eval_signal(s, x + v)?;
        Ok(u * Complex64::cis(-v * xi) * w.eval(v))
    };

    let mut acc = Acc::default();
    let mut l1 = 0.0;
    for k in 0..=n {
        let weight = if k == 0 || k == n { 0.5 } else { 1.0 };
        let v = f(-half + k as f64 * h)? * weight;
        l1 += v.norm();
        acc.add(v);
    }
    let mut sum = acc.total() * h;
    let mut l1_int = l1 * h;
    let mut delta = f64::INFINITY;
    let mut converged = false;
    for _ in 0..MAX_HALVINGS {
        if 2 * n > MAX_NODES {
            break;
        }
        let mut mid = Acc::default();
        let mut mid_l1 = 0.0;
        for k in 0..n {
            let v = f(-half + (k as f64 + 0.5) * h)?;
            mid_l1 += v.norm();
            mid.add(v);
        }
        let new_sum = 0.5 * sum + mid.total() * (0.5 * h);
        l1_int = 0.5 * l1_int + mid_l1 * 0.5 * h;
        delta = (new_sum - sum).norm();
        sum = new_sum;
        h *= 0.5;
        n *= 2;
        let noise = !strict && delta <= 4.0 * noise_rel * l1_int;
        let floor = sum.norm() + delta < FLOOR_REL * l1_int;
        if delta <= tol * sum.norm() || noise || floor {
            converged = true;
            break;
        }
    }
    let pre = INV_SQRT_2PI;
    let value = sum * pre;
    let scale = l1_int * pre;
    if !converged && delta * pre > FLOOR_REL * scale {
        return Err(Error::QuadratureNonConvergent { x, xi, delta: delta * pre, value: value.norm() });
    }
    let err = noise_rel * scale + delta * pre;
    let lv = logc::ln(value) + Complex64::new(0.0, -x * xi);
    Ok(StftValue::from_logs(lv, scale.ln(), err))
}

/// Log of a trapezoid estimate of ∫|integrand| along y + iη over [x−half, x+half], including
/// the two vertical connectors. Returns None if the signal is not entire.
fn log_shifted_mass(s: &AnalyticSignal, w: &Window, x: f64, xi: f64, half: f64, eta: f64) -> Option<f64> {
    let sig2 = w.sigma * w.sigma;
    let la = w.amplitude().ln();
    let point = |v: f64, e: f64| -> Option<f64> {
        let z = Complex64::new(x + v, e);
        Some(log_abs_entire(s, z)? + e * xi + la - (v * v - e * e) / (2.0 * sig2))
    };
    let h = 2.0 * half / CERTIFY_SAMPLES as f64;
    let mut logs = Vec::with_capacity(CERTIFY_SAMPLES + 5);
    for k in 0..=CERTIFY_SAMPLES {
        logs.push(point(-half + k as f64 * h, eta)? + h.ln());
    }
    // Connectors are bounded by their length times the larger endpoint modulus.
    for v in [-half, half] {
        let m = point(v, 0.0)?.max(point(v, eta)?).max(point(v, 0.5 * eta)?);
        logs.push(m + eta.abs().ln());
    }
    Some(logc::sum_real(&logs))
}

/// Far from every stationary point the integrand continues analytically to a strip where it is
/// exponentially smaller; when the shifted mass drops below the floor the value is certified
/// negligible without resolving the oscillation.
fn shifted_bound(s: &AnalyticSignal, w: &Window, x: f64, xi: f64, half: f64, dir: f64) -> Option<StftValue> {
    let base = log_shifted_mass(s, w, x, xi, half, 0.0)?;
    let mut best = f64::INFINITY;
    for k in 0..16 {
        let eta = dir * w.sigma * 0.5f64.powi(k);
        if let Some(l) = log_shifted_mass(s, w, x, xi, half, eta) {
            best = best.min(l);
        }
    }
    let pre = INV_SQRT_2PI.ln();
    if best < base + FLOOR_REL.ln() - 1.0 {
        let bound = (best + pre).exp();
        return Some(StftValue::from_logs(Complex64::new(best + pre, 0.0), base + pre, bound).zeroed());
    }
    None
}

/// Largest line shift tried by the reference mode, in window widths.
const SHIFT_RANGE: f64 = 10.0;
const SHIFT_STEPS: i32 = 80;

/// Reference evaluation along the horizontal line y + iη with the least absolute mass. For
/// entire signals the line integral equals the real one up to the two vertical connectors,
/// which are bounded and must be negligible. Where the real line cancels heavily this keeps
/// the full relative accuracy. None when no shift helps or the shift cannot be justified.
fn shifted_reference(s: &AnalyticSignal, w: &Window, x: f64, xi: f64, tol: f64) -> Option<StftValue> {
    let sig2 = w.sigma * w.sigma;
    let la = w.amplitude().ln();
    let i = Complex64::i();
    // ln of u(z)e^{−i(z−x)ξ}φ(z−x) at z = x + v + iη.
    let g = |v: f64, eta: f64| -> Option<Complex64> {
        let d = Complex64::new(v, eta);
        Some(log_entire(s, d + x)? - i * d * xi + la - d * d / (2.0 * sig2))
    };
    g(0.0, 0.0)?;
    let reach = |eta: f64| RADIUS * w.sigma + 2.0 * eta.abs();
    // Log mass on the line, or None if the line does not decay at both ends.
    let mass = |eta: f64| -> Option<f64> {
        let l = reach(eta);
        let h = 2.0 * l / CERTIFY_SAMPLES as f64;
        let logs: Vec<f64> = (0..=CERTIFY_SAMPLES).map(|k| g(-l + k as f64 * h, eta).map(|c| c.re)).collect::<Option<_>>()?;
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ends = logs[0].max(logs[CERTIFY_SAMPLES]);
        if !(top.is_finite() && ends < top - 40.0) {
            return None;
        }
        Some(logc::sum_real(&logs) + h.ln())
    };
    let real = mass(0.0)?;
    let (mut best_eta, mut best) = (0.0, real);
    for k in -SHIFT_STEPS..=SHIFT_STEPS {
        let eta = w.sigma * SHIFT_RANGE * k as f64 / SHIFT_STEPS as f64;
        if let Some(m) = mass(eta) {
            if m < best {
                best = m;
                best_eta = eta;
            }
        }
    }
    if best > real - 2.0 {
        return None;
    }
    let eta = best_eta;
    let l = reach(eta);
    // Connectors at v = ±l from 0 to η, bounded by length times the sampled maximum.
    let mut connector = f64::NEG_INFINITY;
    for v in [-l, l] {
        for k in 0..=32 {
            connector = connector.max(g(v, eta * k as f64 / 32.0)?.re);
        }
    }
    let connector = 2.0 * eta.abs() * connector.exp();

    let f = |v: f64| g(v, eta).map(|c| c.exp());
    let mut n = 64usize;
    let mut h = 2.0 * l / n as f64;
    let mut acc = Acc::default();
    let mut l1 = 0.0;
    for k in 0..=n {
        let weight = if k == 0 || k == n { 0.5 } else { 1.0 };
        let v = f(-l + k as f64 * h)? * weight;
        l1 += v.norm();
        acc.add(v);
    }
    let mut sum = acc.total() * h;
    let mut l1_int = l1 * h;
    for _ in 0..2 * MAX_HALVINGS {
        let mut mid = Acc::default();
        let mut mid_l1 = 0.0;
        for k in 0..n {
            let v = f(-l + (k as f64 + 0.5) * h)?;
            mid_l1 += v.norm();
            mid.add(v);
        }
        let new_sum = 0.5 * sum + mid.total() * (0.5 * h);
        l1_int = 0.5 * l1_int + mid_l1 * 0.5 * h;
        let delta = (new_sum - sum).norm();
        sum = new_sum;
        h *= 0.5;
        n *= 2;
        if delta <= tol * sum.norm() && n >= 256 {
            let err = delta + connector + f64::EPSILON * l1_int * (1.0 + (xi.abs() + x.abs()) * l);
            if err > tol * sum.norm() {
                return None;
            }
            let pre = INV_SQRT_2PI;
            let lv = logc::ln(sum * pre) + Complex64::new(0.0, -x * xi);
            return Some(StftValue::from_logs(lv, (l1_int * pre).ln(), err * pre));
        }
        if n > MAX_NODES / 2 {
            break;
        }
    }
    None
}
