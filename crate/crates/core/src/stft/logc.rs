//! Complex numbers held as their logarithms, so products and sums survive extreme magnitudes.

use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(f64::NEG_INFINITY, 0.0);

pub fn ln(v: Complex64) -> Complex64 {
    if v.re == 0.0 && v.im == 0.0 {
        ZERO
    } else {
        Complex64::new(v.norm().ln(), v.arg())
    }
}

pub fn exp(l: Complex64) -> Complex64 {
    if l.re == f64::NEG_INFINITY {
        Complex64::new(0.0, 0.0)
    } else {
        l.exp()
    }
}

/// ln Σ exp(terms).
pub fn sum(terms: &[Complex64]) -> Complex64 {
    let m = terms.iter().map(|t| t.re).fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return ZERO;
    }
    let s: Complex64 = terms.iter().map(|t| exp(Complex64::new(t.re - m, t.im))).sum();
    let l = ln(s);
    Complex64::new(l.re + m, l.im)
}

/// ln Σ exp(terms) for real terms.
pub fn sum_real(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}
