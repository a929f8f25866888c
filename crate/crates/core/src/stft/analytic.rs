//! Closed-form STFTs: the quadratic-exponential family, delta combs and their combinations.

use super::{logc, prefactor, StftValue};
use crate::error::{Error, Result};
use crate::signal::{hermite_he, AnalyticSignal, DeltaTerm, Window, INV_SQRT_2PI};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

pub fn has_closed_form(s: &AnalyticSignal) -> bool {
    use AnalyticSignal::*;
    match s {
        Gaussian { .. } | PlaneWave { .. } | Exponential { .. } | DeltaComb { .. } | Polynomial { .. } => true,
        PowerChirp { m, .. } | ExpChirp { m, .. } => *m == 2,
        FreqChirp { time, m } => *m == 2 || *time == 0.0,
        Scaled { inner, .. } | Shifted { inner, .. } => has_closed_form(inner),
        Sum(parts) => parts.iter().all(has_closed_form),
        FourierSide { spectrum } => has_closed_form(spectrum),
        _ => false,
    }
}

/// u(y) = e^{κ} P(y) e^{−ay² + by} with Re a ≥ 0.
struct QuadExp {
    poly: Vec<Complex64>,
    a: Complex64,
    b: Complex64,
    kappa: Complex64,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn quad_form(s: &AnalyticSignal) -> Option<QuadExp> {
    use AnalyticSignal::*;
    let one = vec![c(1.0, 0.0)];
    let zero = c(0.0, 0.0);
    Some(match s {
        Gaussian { sigma, center, modulation } => {
            let v = sigma * sigma;
            QuadExp {
                poly: one,
                a: c(0.5 / v, 0.0),
                b: c(center / v, *modulation),
                kappa: c(-0.25 * (PI * v).ln() - center * center / (2.0 * v), 0.0),
            }
        }
        PlaneWave { xi0 } => QuadExp { poly: one, a: zero, b: c(0.0, *xi0), kappa: zero },
        Exponential { z } => QuadExp { poly: one, a: zero, b: *z, kappa: zero },
        Polynomial { coeffs } => QuadExp { poly: coeffs.clone(), a: zero, b: zero, kappa: zero },
        PowerChirp { c: cc, m: 2 } => QuadExp { poly: one, a: c(0.0, -cc), b: zero, kappa: zero },
        ExpChirp { z, c: cc, m: 2 } => QuadExp { poly: one, a: c(0.0, -cc), b: *z, kappa: zero },
        FreqChirp { time, m } if *m == 2 || *time == 0.0 => QuadExp {
            poly: one,
            a: if *m == 2 { c(0.0, *time) } else { zero },
            b: zero,
            kappa: c(INV_SQRT_2PI.ln(), 0.0),
        },
        _ => return None,
    })
}

/// Taylor coefficients of P around `at`: P(at + w) = Σ q_j w^j.
fn taylor_shift(poly: &[Complex64], at: Complex64) -> Vec<Complex64> {
    let mut q = poly.to_vec();
    let n = q.len();
    for k in 0..n {
        for j in (k..n - 1).rev() {
            let next = q[j + 1];
            q[j] += at * next;
        }
    }
    q
}

fn gamma_half(j: usize) -> f64 {
    // Γ((j+1)/2)
    let mut g = if j % 2 == 0 { PI.sqrt() } else { 1.0 };
    let mut z = if j % 2 == 0 { 0.5 } else { 1.0 };
    while z < (j as f64 + 1.0) / 2.0 - 1e-9 {
        g *= z;
        z += 1.0;
    }
    g
}

fn quad_stft(q: &QuadExp, w: &Window, x: f64, xi: f64) -> (Complex64, f64) {
    let v = w.sigma * w.sigma;
    let a = q.a + 0.5 / v;
    let b = q.b + c(x / v, -xi);
    let mu = b / (2.0 * a);
    let coeffs = taylor_shift(&q.poly, mu);
    // ∫ w^{2i} e^{−Aw²} dw = √(π/A) (2i−1)!! / (2A)^i
    let mut moment = c(1.0, 0.0);
    let mut g = c(0.0, 0.0);
    for (j, qj) in coeffs.iter().enumerate() {
        if j % 2 == 1 {
            continue;
        }
        if j > 0 {
            moment *= (j as f64 - 1.0) / (2.0 * a);
        }
        g += qj * moment;
    }
    let base = prefactor(w).ln() - x * x / (2.0 * v);
    let lv = c(base, 0.0) + q.kappa + b * b / (4.0 * a) + 0.5 * (c(PI, 0.0) / a).ln() + logc::ln(g);

    let ar = a.re;
    let br = b.re;
    let mur = br / (2.0 * ar);
    let abs_coeffs = taylor_shift(&q.poly, c(mur, 0.0));
    let s: f64 = abs_coeffs
        .iter()
        .enumerate()
        .map(|(j, qj)| qj.norm() * gamma_half(j) / ar.powf((j as f64 + 1.0) / 2.0))
        .sum();
    let ls = base + q.kappa.re + br * br / (4.0 * ar) + s.ln();
    (lv, ls)
}

const HERMITE_TABLE: usize = 160;

/// sup_u |He_j(u)| e^{−u²/2}.
fn hermite_sup(j: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let scan = |n: usize| {
        let mut best = vec![0.0f64; n + 1];
        let umax = (2.0 * n as f64 + 1.0).sqrt() + 4.0;
        let steps = (umax / 2e-3) as usize;
        for k in 0..=steps {
            let u = k as f64 * 2e-3;
            let e = (-u * u / 2.0).exp();
            for (jj, h) in hermite_he(n, u).iter().enumerate() {
                best[jj] = best[jj].max(h.abs() * e);
            }
        }
        best
    };
    if j <= HERMITE_TABLE {
        TABLE.get_or_init(|| scan(HERMITE_TABLE))[j]
    } else {
        scan(j)[j]
    }
}

fn ln_binom(n: u32, k: u32) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

fn delta_stft(terms: &[DeltaTerm], w: &Window, x: f64, xi: f64) -> (Complex64, f64) {
    let max_order = terms.iter().map(|t| t.order).max().unwrap_or(0) as usize;
    let he = hermite_he(max_order, -x / w.sigma);
    let log_phi = w.log_eval(x);
    let ln_sigma = w.sigma.ln();
    let ln_xi = logc::ln(c(xi, 0.0));
    let mut logs = Vec::new();
    let mut scales = Vec::new();
    for t in terms {
        let lc = logc::ln(t.coeff);
        if lc.re == f64::NEG_INFINITY {
            continue;
        }
        let k = t.order;
        for beta in 0..=k {
            let j = k - beta;
            let lb = ln_binom(k, beta);
            // ξ^β i^j (−1/σ)^j He_j(−x/σ) φ(−x)
            let xi_part = if beta == 0 { c(0.0, 0.0) } else { ln_xi * beta as f64 };
            let phase = c(-(j as f64) * ln_sigma, j as f64 * (PI / 2.0 + PI));
            let l = lc + lb + xi_part + phase + logc::ln(c(he[j as usize], 0.0)) + log_phi;
            logs.push(l);
            let xi_abs = if beta == 0 { 0.0 } else { beta as f64 * xi.abs().ln() };
            scales.push(lc.re + lb + xi_abs - j as f64 * ln_sigma + hermite_sup(j as usize).ln());
        }
    }
    let pre = INV_SQRT_2PI.ln();
    let lv = logc::sum(&logs);
    let ls = logc::sum_real(&scales);
    (c(lv.re + pre, lv.im), ls + pre + w.amplitude().ln())
}

fn eval_log(s: &AnalyticSignal, w: &Window, x: f64, xi: f64) -> Result<(Complex64, f64)> {
    use AnalyticSignal::*;
    if let Some(q) = quad_form(s) {
        return Ok(quad_stft(&q, w, x, xi));
    }
    match s {
        DeltaComb { terms } => Ok(delta_stft(terms, w, x, xi)),
        Scaled { factor, inner } => {
            let (lv, ls) = eval_log(inner, w, x, xi)?;
            let lf = logc::ln(*factor);
            Ok((lv + lf, ls + lf.re))
        }
        Shifted { x0, xi0, inner } => {
            let (lv, ls) = eval_log(inner, w, x - x0, xi - xi0)?;
            Ok((lv + c(0.0, -x0 * (xi - xi0)), ls))
        }
        Sum(parts) => {
            let mut lvs = Vec::with_capacity(parts.len());
            let mut lss = Vec::with_capacity(parts.len());
            for p in parts {
                let (lv, ls) = eval_log(p, w, x, xi)?;
                lvs.push(lv);
                lss.push(ls);
            }
            Ok((logc::sum(&lvs), logc::sum_real(&lss)))
        }
        FourierSide { spectrum } => {
            let (dual, factor) = w.fourier_dual();
            let (lv, ls) = eval_log(spectrum, &dual, xi, -x)?;
            Ok((lv + c(factor.ln(), -x * xi), ls + factor.ln()))
        }
        _ => Err(Error::BackendMismatch(format!("{} has no closed-form STFT", s.name()))),
    }
}

pub fn eval(s: &AnalyticSignal, w: &Window, x: f64, xi: f64) -> Result<StftValue> {
    let (lv, ls) = eval_log(s, w, x, xi)?;
    let err = 8.0 * f64::EPSILON * ls.exp();
    Ok(StftValue::from_logs(lv, ls, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_shift_matches_direct_expansion() {
        // P(y) = 1 + 2y + 3y², P(1 + w) = 6 + 8w + 3w²
        let q = taylor_shift(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], c(1.0, 0.0));
        assert_eq!(q, vec![c(6.0, 0.0), c(8.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn hermite_sup_low_orders() {
        assert!((hermite_sup(0) - 1.0).abs() < 1e-12);
        // |u e^{−u²/2}| peaks at u = 1
        assert!((hermite_sup(1) - (-0.5f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn gamma_half_values() {
        assert!((gamma_half(0) - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(1), 1.0);
        assert!((gamma_half(2) - PI.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(gamma_half(3), 1.0);
    }
}
