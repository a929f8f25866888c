//! STFTs and cross-Wigner distributions of sampled signals.

use super::{logc, StftValue};
use crate::error::{Error, Result};
use crate::signal::{fft_frequencies, SampledSignal, UniformGrid, Window, INV_SQRT_2PI};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::fmt::Write;

/// Complex values over an (x-grid × ξ-grid), row-major in x.
#[derive(Debug, Clone, PartialEq)]
pub struct StftMatrix {
    pub x_grid: UniformGrid,
    pub xi_grid: UniformGrid,
    pub values: Vec<Complex64>,
}

impl StftMatrix {
    pub fn get(&self, j: usize, l: usize) -> Complex64 {
        self.values[j * self.xi_grid.count + l]
    }

    /// (row, column, |value|) of the largest magnitude.
    pub fn peak(&self) -> (usize, usize, f64) {
        let (idx, v) = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, f64::MIN), |acc, it| if it.1 > acc.1 { it } else { acc });
        (idx / self.xi_grid.count, idx % self.xi_grid.count, v)
    }

    /// One row per x, one magnitude column per ξ.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.x_grid.count {
            let row: Vec<String> = (0..self.xi_grid.count).map(|l| format!("{:.16e}", self.get(j, l).norm())).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn metadata_json(&self) -> String {
        let mut out = String::new();
        let g = |gr: &UniformGrid| format!("{{\"start\":{:.16e},\"step\":{:.16e},\"count\":{}}}", gr.start, gr.step, gr.count);
        let _ = writeln!(out, "{{\"x_grid\":{},\"xi_grid\":{},\"cell\":\"magnitude\"}}", g(&self.x_grid), g(&self.xi_grid));
        out
    }
}

fn conjugate_grid(grid: &UniformGrid) -> UniformGrid {
    let n = grid.count;
    let dxi = 2.0 * PI / (n as f64 * grid.step);
    UniformGrid { start: -((n / 2) as f64) * dxi, step: dxi, count: n }
}

/// Position of FFT bin `k` in increasing-frequency order.
fn shifted_index(k: usize, n: usize) -> usize {
    (k + n / 2) % n
}

fn check_resolution(f: &SampledSignal, window: &Window) -> Result<()> {
    if f.grid.step > window.sigma / 4.0 * (1.0 + 1e-12) {
        return Err(Error::UnderResolved(format!(
            "step {} exceeds a quarter of the window width {}",
            f.grid.step, window.sigma
        )));
    }
    let max = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    // A lone jump is a sign change through a zero; an oscillation turns fast on consecutive steps.
    let mut last_fast = false;
    for pair in f.values.windows(2) {
        let fast = pair[0].norm() > 1e-8 * max
            && pair[1].norm() > 1e-8 * max
            && (pair[1] * pair[0].conj()).arg().abs() > PI / 2.0;
        if fast && last_fast {
            return Err(Error::UnderResolved("signal phase advances more than π/2 per sample".into()));
        }
        last_fast = fast;
    }
    Ok(())
}

pub fn stft_grid(f: &SampledSignal, window: &Window) -> Result<StftMatrix> {
    check_resolution(f, window)?;
    let n = f.grid.count;
    let h = f.grid.step;
    let xi_grid = conjugate_grid(&f.grid);
    let freqs = fft_frequencies(n, h);
    let fft = FftPlanner::new().plan_fft_forward(n);
    let phase: Vec<Complex64> = freqs.iter().map(|xi| Complex64::cis(-f.grid.start * xi) * (h * INV_SQRT_2PI)).collect();
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let reach = 9.0 * window.sigma;
    for j in 0..n {
        let xj = f.grid.point(j);
        for (k, b) in buf.iter_mut().enumerate() {
            let d = f.grid.point(k) - xj;
            *b = if d.abs() <= reach { f.values[k] * window.eval(d) } else { Complex64::new(0.0, 0.0) };
        }
        fft.process(&mut buf);
        for (k, b) in buf.iter().enumerate() {
            values[j * n + shifted_index(k, n)] = b * phase[k];
        }
    }
    Ok(StftMatrix { x_grid: f.grid, xi_grid, values })
}

/// The discretized STFT integral at one point.
pub(crate) fn eval_direct(f: &SampledSignal, window: &Window, x: f64, xi: f64) -> StftValue {
    let h = f.grid.step;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    for (k, v) in f.values.iter().enumerate() {
        let y = f.grid.point(k);
        let term = v * Complex64::cis(-y * xi) * window.eval(y - x);
        l1 += term.norm();
        sum += term;
    }
    let value = sum * (h * INV_SQRT_2PI);
    let scale = l1 * h * INV_SQRT_2PI;
    StftValue::from_logs(logc::ln(value), scale.ln(), 4.0 * f64::EPSILON * scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoyalCheck {
    pub ratio: f64,
    /// Set when f = 0 and the ratio is 1 by convention.
    pub degenerate: bool,
}

/// ‖V_φf‖² over the grid divided by ‖f‖².
pub fn moyal_check(f: &SampledSignal, window: &Window) -> Result<MoyalCheck> {
    if !window.unit {
        return Err(Error::InvalidParameter("the Moyal check needs a unit window".into()));
    }
    let norm = f.norm_sq();
    if norm == 0.0 {
        check_resolution(f, window)?;
        return Ok(MoyalCheck { ratio: 1.0, degenerate: true });
    }
    let m = stft_grid(f, window)?;
    let cell = m.x_grid.step * m.xi_grid.step;
    let total: f64 = m.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell;
    Ok(MoyalCheck { ratio: total / norm, degenerate: false })
}

/// Band-limited interpolation onto the half-step grid (2N points).
fn upsample2(f: &SampledSignal) -> Vec<Complex64> {
    let n = f.values.len();
    let mut planner = FftPlanner::new();
    let mut spectrum = f.values.clone();
    planner.plan_fft_forward(n).process(&mut spectrum);
    let mut big = vec![Complex64::new(0.0, 0.0); 2 * n];
    let half = n / 2;
    for k in 0..n {
        if n % 2 == 0 && k == half {
            big[half] += spectrum[k] * 0.5;
            big[2 * n - half] += spectrum[k] * 0.5;
        } else if k < n.div_ceil(2) {
            big[k] = spectrum[k];
        } else {
            big[k + n] = spectrum[k];
        }
    }
    planner.plan_fft_inverse(2 * n).process(&mut big);
    let inv = 1.0 / n as f64;
    big.iter().map(|v| v * inv).collect()
}

/// W(g,f)(x,ξ) = ∫g(x+y/2) conj(f(x−y/2)) e^{−iyξ} dy on the signal grid × conjugate grid.
pub fn cross_wigner(g: &SampledSignal, f: &SampledSignal) -> Result<StftMatrix> {
    if g.grid != f.grid {
        return Err(Error::GridMismatch);
    }
    let n = f.grid.count;
    let h = f.grid.step;
    let gu = upsample2(g);
    let fu = upsample2(f);
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let lo = -((n / 2) as isize);
    let hi = lo + n as isize;
    for j in 0..n {
        let c = 2 * j as isize;
        for k in lo..hi {
            let (p, q) = (c + k, c - k);
            let v = if p >= 0 && q >= 0 && (p as usize) < 2 * n && (q as usize) < 2 * n {
                gu[p as usize] * fu[q as usize].conj()
            } else {
                Complex64::new(0.0, 0.0)
            };
            buf[k.rem_euclid(n as isize) as usize] = v;
        }
        fft.process(&mut buf);
        for (k, b) in buf.iter().enumerate() {
            values[j * n + shifted_index(k, n)] = b * h;
        }
    }
    Ok(StftMatrix { x_grid: f.grid, xi_grid: conjugate_grid(&f.grid), values })
}
