//! Operators on catalog signals: Fourier transform, dilation, phase-space shifts, pointwise
//! factors, Weyl quantization on grids and the power propagator.

use crate::detector::{MapEntry, WavefrontMap};
use crate::error::{Error, Result};
use crate::geometry::{anisotropic_decompose, AnisotropicIndex, PhasePoint, QuasiSphereDirection};
use crate::signal::{eval_signal, fft_frequencies, AnalyticSignal, DeltaTerm, SampledSignal, INV_SQRT_2PI};
use crate::stft::{cross_wigner, StftMatrix};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
/// Largest grid for the dense Weyl path.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolDescriptor {
    /// a(x, ξ) = f(x)
    MultiplyBy(AnalyticSignal),
    /// a(x, ξ) = g(ξ)
    FourierMultiplier(AnalyticSignal),
    SeparableProduct(AnalyticSignal, AnalyticSignal),
    /// Samples on the operand grid × its conjugate frequency grid.
    DenseGrid(StftMatrix),
}

impl SymbolDescriptor {
    fn eval(&self, x: f64, xi: f64) -> Result<Complex64> {
        match self {
            Self::MultiplyBy(a) => eval_signal(a, x),
            Self::FourierMultiplier(b) => eval_signal(b, xi),
            Self::SeparableProduct(a, b) => Ok(eval_signal(a, x)? * eval_signal(b, xi)?),
            Self::DenseGrid(_) => Err(Error::InvalidParameter("dense symbols have no off-grid values".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapTransform {
    /// (x, ξ) ↦ (ξ, −x), the action of the Fourier transform.
    SwapJ,
    /// (x, ξ) ↦ (−ξ, x), the action of the inverse Fourier transform.
    SwapJInverse,
    /// (x, ξ) ↦ (x/A, Aξ), the action of u ↦ |A|^{1/2}u(A·).
    Dilate(f64),
    Identity,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The catalog descriptor of û, û(ξ) = (2π)^{−1/2}∫u(x)e^{−ixξ}dx.
pub fn apply_fourier(sig: &AnalyticSignal) -> Result<AnalyticSignal> {
    use AnalyticSignal::*;
    Ok(match sig {
        Gaussian { sigma, center, modulation } => AnalyticSignal::scaled(
            Complex64::cis(center * modulation),
            AnalyticSignal::gaussian(1.0 / sigma, *modulation, -center)?,
        ),
        PlaneWave { xi0 } => {
            AnalyticSignal::shifted(*xi0, 0.0, AnalyticSignal::scaled(c(SQRT_2PI, 0.0), AnalyticSignal::delta_derivative(0)))
        }
        PowerChirp { c: cc, m: 2 } => AnalyticSignal::scaled(
            Complex64::from_polar((2.0 * cc.abs()).powf(-0.5), PI / 4.0 * cc.signum()),
            AnalyticSignal::power_chirp(-1.0 / (4.0 * cc), 2)?,
        ),
        DeltaComb { terms } => {
            let deg = terms.iter().map(|t| t.order as usize).max().unwrap_or(0);
            let mut coeffs = vec![c(0.0, 0.0); deg + 1];
            for t in terms {
                coeffs[t.order as usize] += t.coeff * INV_SQRT_2PI;
            }
            Polynomial { coeffs }
        }
        Polynomial { coeffs } => DeltaComb {
            terms: coeffs
                .iter()
                .enumerate()
                .filter(|(_, v)| v.norm() != 0.0)
                .map(|(k, v)| DeltaTerm { order: k as u32, coeff: v * SQRT_2PI * if k % 2 == 0 { 1.0 } else { -1.0 } })
                .collect(),
        },
        Scaled { factor, inner } => AnalyticSignal::scaled(*factor, apply_fourier(inner)?),
        // F[e^{ixξ₀}u(x−x₀)](ξ) = e^{ix₀ξ₀} e^{−ix₀ξ} û(ξ−ξ₀)
        Shifted { x0, xi0, inner } => {
            AnalyticSignal::scaled(Complex64::cis(x0 * xi0), AnalyticSignal::shifted(*xi0, -x0, apply_fourier(inner)?))
        }
        Sum(parts) => Sum(parts.iter().map(apply_fourier).collect::<Result<_>>()?),
        FourierSide { spectrum } => (**spectrum).clone(),
        other => return Err(Error::NoClosedForm(format!("Fourier transform of {}", other.name()))),
    })
}

fn transform_point(p: PhasePoint, tr: MapTransform) -> PhasePoint {
    match tr {
        MapTransform::SwapJ => PhasePoint::new(p.xi, -p.x),
        MapTransform::SwapJInverse => PhasePoint::new(-p.xi, p.x),
        MapTransform::Dilate(a) => PhasePoint::new(p.x / a, a * p.xi),
        MapTransform::Identity => p,
    }
}

/// Moves every direction of the map by `tr` and renormalizes onto the target quasi-sphere.
/// The swaps exchange the roles of t and s; labels are kept.
pub fn map_transform(m: &WavefrontMap, tr: MapTransform) -> Result<WavefrontMap> {
    if let MapTransform::Dilate(a) = tr {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("dilation factor must be nonzero, got {a}")));
        }
    }
    let idx = match tr {
        MapTransform::SwapJ | MapTransform::SwapJInverse => m.idx.swapped(),
        _ => m.idx,
    };
    let entries = m
        .entries
        .iter()
        .map(|e| {
            let dir = anisotropic_decompose(transform_point(e.dir.point(), tr), idx)?.dir;
            Ok(MapEntry { dir, verdict: e.verdict.clone() })
        })
        .collect::<Result<_>>()?;
    Ok(WavefrontMap { idx, policy: m.policy, entries })
}

/// Every IN direction of `a` lies within `tol` of an IN direction of `b` and vice versa.
pub fn in_sets_match(a: &[QuasiSphereDirection], b: &[QuasiSphereDirection], tol: f64) -> bool {
    let covered = |x: &[QuasiSphereDirection], y: &[QuasiSphereDirection]| {
        x.iter().all(|p| y.iter().any(|q| p.distance(*q) <= tol))
    };
    covered(a, b) && covered(b, a)
}

fn with_exponential(sig: &AnalyticSignal, z: Complex64) -> Result<AnalyticSignal> {
    use AnalyticSignal::*;
    if z == c(0.0, 0.0) {
        return Ok(sig.clone());
    }
    Ok(match sig {
        PowerChirp { c: cc, m } => AnalyticSignal::exp_chirp(z, *cc, *m)?,
        Exponential { z: w } => Exponential { z: z + w },
        PlaneWave { xi0 } => Exponential { z: z + c(0.0, *xi0) },
        ExpChirp { z: w, c: cc, m } => AnalyticSignal::exp_chirp(z + w, *cc, *m)?,
        // Completing the square moves the centre by Re z·σ².
        Gaussian { sigma, center, modulation } => {
            let s2 = sigma * sigma;
            AnalyticSignal::scaled(
                c((z.re * center + 0.5 * z.re * z.re * s2).exp(), 0.0),
                AnalyticSignal::gaussian(*sigma, center + z.re * s2, modulation + z.im)?,
            )
        }
        Scaled { factor, inner } => AnalyticSignal::scaled(*factor, with_exponential(inner, z)?),
        Sum(parts) => Sum(parts.iter().map(|p| with_exponential(p, z)).collect::<Result<_>>()?),
        other => return Err(Error::NotRepresentable(format!("e^{{zx}} times {}", other.name()))),
    })
}

fn with_chirp(sig: &AnalyticSignal, cf: f64, mf: u32) -> Result<AnalyticSignal> {
    use AnalyticSignal::*;
    Ok(match sig {
        PowerChirp { c: cc, m } if *m == mf => {
            if cc + cf == 0.0 {
                PlaneWave { xi0: 0.0 }
            } else {
                AnalyticSignal::power_chirp(cc + cf, mf)?
            }
        }
        // e^{ixξ₀}e^{icx²} = e^{−iξ₀²/(4c)} e^{ic(x + ξ₀/(2c))²}
        PlaneWave { xi0 } if mf == 2 => AnalyticSignal::scaled(
            Complex64::cis(-xi0 * xi0 / (4.0 * cf)),
            AnalyticSignal::shifted(-xi0 / (2.0 * cf), 0.0, AnalyticSignal::power_chirp(cf, 2)?),
        ),
        PlaneWave { xi0 } => AnalyticSignal::exp_chirp(c(0.0, *xi0), cf, mf)?,
        Exponential { z } => AnalyticSignal::exp_chirp(*z, cf, mf)?,
        ExpChirp { z, c: cc, m } if *m == mf => {
            if cc + cf == 0.0 {
                Exponential { z: *z }
            } else {
                AnalyticSignal::exp_chirp(*z, cc + cf, mf)?
            }
        }
        Scaled { factor, inner } => AnalyticSignal::scaled(*factor, with_chirp(inner, cf, mf)?),
        Sum(parts) => Sum(parts.iter().map(|p| with_chirp(p, cf, mf)).collect::<Result<_>>()?),
        other => return Err(Error::NotRepresentable(format!("chirp of degree {mf} times {}", other.name()))),
    })
}

/// The catalog descriptor of factor·sig for factor ∈ {Exponential, PlaneWave, PowerChirp}.
pub fn apply_pointwise_factor(sig: &AnalyticSignal, factor: &AnalyticSignal) -> Result<AnalyticSignal> {
    match factor {
        AnalyticSignal::Exponential { z } => with_exponential(sig, *z),
        AnalyticSignal::PlaneWave { xi0 } => with_exponential(sig, c(0.0, *xi0)),
        AnalyticSignal::PowerChirp { c: cf, m } => with_chirp(sig, *cf, *m),
        other => Err(Error::InvalidParameter(format!("{} is not a pointwise factor", other.name()))),
    }
}

/// u_A(x) = |A|^{1/2} u(Ax) as a catalog descriptor.
pub fn dilate(sig: &AnalyticSignal, a: f64) -> Result<AnalyticSignal> {
    use AnalyticSignal::*;
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("dilation factor must be nonzero, got {a}")));
    }
    let unit = c(a.abs().sqrt(), 0.0);
    let am = |m: u32| a.powi(m as i32);
    Ok(match sig {
        Gaussian { sigma, center, modulation } => AnalyticSignal::gaussian(sigma / a.abs(), center / a, a * modulation)?,
        PowerChirp { c: cc, m } => AnalyticSignal::scaled(unit, AnalyticSignal::power_chirp(cc * am(*m), *m)?),
        ModulusChirp { c: cc, alpha } => {
            AnalyticSignal::scaled(unit, AnalyticSignal::modulus_chirp(cc * a.abs().powf(*alpha), *alpha)?)
        }
        PlaneWave { xi0 } => AnalyticSignal::scaled(unit, PlaneWave { xi0: a * xi0 }),
        Exponential { z } => AnalyticSignal::scaled(unit, Exponential { z: z * a }),
        ExpChirp { z, c: cc, m } => AnalyticSignal::scaled(unit, AnalyticSignal::exp_chirp(z * a, cc * am(*m), *m)?),
        FreqChirp { time, m } => AnalyticSignal::scaled(unit, AnalyticSignal::freq_chirp(time * am(*m), *m)?),
        // (D^kδ)(Ax) = A^{−k}|A|^{−1} D^kδ
        DeltaComb { terms } => DeltaComb {
            terms: terms
                .iter()
                .map(|t| DeltaTerm { order: t.order, coeff: t.coeff * unit / (a.abs() * am(t.order)) })
                .collect(),
        },
        Polynomial { coeffs } => Polynomial { coeffs: coeffs.iter().enumerate().map(|(k, v)| v * unit * am(k as u32)).collect() },
        Scaled { factor, inner } => AnalyticSignal::scaled(*factor, dilate(inner, a)?),
        Shifted { x0, xi0, inner } => AnalyticSignal::shifted(x0 / a, a * xi0, dilate(inner, a)?),
        Sum(parts) => Sum(parts.iter().map(|p| dilate(p, a)).collect::<Result<_>>()?),
        FourierSide { spectrum } => AnalyticSignal::fourier_side(dilate(spectrum, 1.0 / a)?),
        Airy => return Err(Error::NotRepresentable("dilated Airy function".into())),
    })
}

/// Π(x₀, ξ₀)u = e^{ixξ₀}u(x − x₀).
pub fn translate_modulate(sig: &AnalyticSignal, x0: f64, xi0: f64) -> AnalyticSignal {
    AnalyticSignal::shifted(x0, xi0, sig.clone())
}

/// Frequency-side solution of the power free-particle equation with initial datum δ₀:
/// ŵ_t(ξ) = (2π)^{−1/2} e^{−i·time·ξ^m}. Analyze with swapped indices and map back with
/// [`MapTransform::SwapJInverse`].
pub fn propagate_power(m: u32, time: f64) -> Result<AnalyticSignal> {
    AnalyticSignal::freq_chirp(time, m)
}

/// Rejects samples with visible energy in the top eighth of the discrete spectrum.
fn check_bandlimit(f: &SampledSignal) -> Result<()> {
    let n = f.values.len();
    let mut buf = f.values.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let max = buf.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let band = n / 8;
    let top = (n / 2 - band..n / 2 + band + 1).map(|k| buf[k % n].norm()).fold(0.0, f64::max);
    if max > 0.0 && top > 1e-6 * max {
        return Err(Error::UnderResolved("samples carry energy near the Nyquist frequency".into()));
    }
    Ok(())
}

/// a^w f on the sampled grid.
pub fn weyl_apply(sym: &SymbolDescriptor, f: &SampledSignal) -> Result<SampledSignal> {
    let n = f.values.len();
    let grid = f.grid;
    match sym {
        SymbolDescriptor::MultiplyBy(a) => {
            let values = f.values.iter().enumerate().map(|(k, v)| Ok(v * eval_signal(a, grid.point(k))?)).collect::<Result<_>>()?;
            SampledSignal::new(grid, values)
        }
        SymbolDescriptor::FourierMultiplier(b) => {
            check_bandlimit(f)?;
            let mut planner = FftPlanner::new();
            let mut buf = f.values.clone();
            planner.plan_fft_forward(n).process(&mut buf);
            for (v, xi) in buf.iter_mut().zip(fft_frequencies(n, grid.step)) {
                *v *= eval_signal(b, xi)?;
            }
            planner.plan_fft_inverse(n).process(&mut buf);
            let inv = 1.0 / n as f64;
            SampledSignal::new(grid, buf.into_iter().map(|v| v * inv).collect())
        }
        SymbolDescriptor::SeparableProduct(..) | SymbolDescriptor::DenseGrid(_) => weyl_dense(sym, f),
    }
}

/// (a^w f)_j = Σ_k A_{j+k}(j−k) f_k, where A_p(d) = N^{−1} Σ_l a(x_p/2, ξ_l) e^{i d h ξ_l} and
/// x_p/2 is the midpoint of samples j and k. Dense symbols are interpolated to odd midpoints
/// with the four-point rule.
fn weyl_dense(sym: &SymbolDescriptor, f: &SampledSignal) -> Result<SampledSignal> {
    let n = f.values.len();
    if n > DENSE_LIMIT {
        return Err(Error::GridTooLarge(n));
    }
    if let SymbolDescriptor::DenseGrid(m) = sym {
        if m.x_grid != f.grid || m.xi_grid.count != n {
            return Err(Error::GridMismatch);
        }
    }
    check_bandlimit(f)?;
    let grid = f.grid;
    let freqs = fft_frequencies(n, grid.step);
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    let inv = 1.0 / n as f64;
    // Column of FFT bin k in an increasing-frequency matrix.
    let col = |k: usize| (k + n / 2) % n;

    let separable_kernel = if let SymbolDescriptor::SeparableProduct(_, b) = sym {
        let mut buf = freqs.iter().map(|&xi| eval_signal(b, xi)).collect::<Result<Vec<_>>>()?;
        ifft.process(&mut buf);
        Some(buf.into_iter().map(|v| v * inv).collect::<Vec<_>>())
    } else {
        None
    };

    let mut out = vec![c(0.0, 0.0); n];
    let mut row = vec![c(0.0, 0.0); n];
    for p in 0..2 * n - 1 {
        let mid = grid.start + 0.5 * p as f64 * grid.step;
        let kernel: &[Complex64] = match (sym, &separable_kernel) {
            (SymbolDescriptor::SeparableProduct(a, _), Some(kern)) => {
                let av = eval_signal(a, mid)?;
                for (r, k) in row.iter_mut().zip(kern) {
                    *r = av * k;
                }
                &row
            }
            (SymbolDescriptor::DenseGrid(m), _) => {
                let (lo, hi) = (p / 2, p.div_ceil(2));
                let cubic = p % 2 == 1 && lo >= 1 && hi + 1 < n;
                for (k, r) in row.iter_mut().enumerate() {
                    let g = |j: usize| m.get(j, col(k));
                    *r = if cubic {
                        (9.0 * (g(lo) + g(hi)) - g(lo - 1) - g(hi + 1)) / 16.0
                    } else {
                        0.5 * (g(lo) + g(hi))
                    };
                }
                ifft.process(&mut row);
                for r in row.iter_mut() {
                    *r *= inv;
                }
                &row
            }
            _ => unreachable!("dense path only handles separable and grid symbols"),
        };
        let j_lo = p.saturating_sub(n - 1);
        let j_hi = p.min(n - 1);
        for j in j_lo..=j_hi {
            let k = p - j;
            let d = (j as isize - k as isize).rem_euclid(n as isize) as usize;
            out[j] += kernel[d] * f.values[k];
        }
    }
    SampledSignal::new(grid, out)
}

/// |(a^w f, g) − (2π)^{−1}(a, W(g,f))| / (1 + |(a^w f, g)|).
pub fn weyl_weak_form_check(sym: &SymbolDescriptor, f: &SampledSignal, g: &SampledSignal) -> Result<f64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    let h = f.grid.step;
    let af = weyl_apply(sym, f)?;
    let lhs: Complex64 = af.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).sum::<Complex64>() * h;
    let w = cross_wigner(g, f)?;
    let mut pair = c(0.0, 0.0);
    for j in 0..w.x_grid.count {
        let x = w.x_grid.point(j);
        for l in 0..w.xi_grid.count {
            let a = match sym {
                SymbolDescriptor::DenseGrid(m) => m.get(j, l),
                _ => sym.eval(x, w.xi_grid.point(l))?,
            };
            pair += a * w.get(j, l).conj();
        }
    }
    let rhs = pair * (h * w.xi_grid.step / (2.0 * PI));
    Ok((lhs - rhs).norm() / (1.0 + lhs.norm()))
}

/// Direction of the curve point (x, ξ) on the index's quasi-sphere.
pub fn direction_of(x: f64, xi: f64, idx: AnisotropicIndex) -> Result<QuasiSphereDirection> {
    Ok(anisotropic_decompose(PhasePoint::new(x, xi), idx)?.dir)
}
