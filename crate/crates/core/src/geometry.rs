//! Phase-space geometry for the anisotropic curves λ ↦ (λᵗx, λˢξ).

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnisotropicIndex {
    pub t: f64,
    pub s: f64,
}

impl AnisotropicIndex {
    pub fn new(t: f64, s: f64) -> Result<Self> {
        if !(t > 0.0 && s > 0.0 && t + s > 1.0) || !t.is_finite() || !s.is_finite() {
            return Err(Error::InvalidIndex { t, s });
        }
        Ok(Self { t, s })
    }

    /// The index with the roles of space and frequency exchanged.
    pub fn swapped(self) -> Self {
        Self { t: self.s, s: self.t }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub x: f64,
    pub xi: f64,
}

impl PhasePoint {
    pub fn new(x: f64, xi: f64) -> Self {
        Self { x, xi }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.xi)
    }
}

/// A point of the quasi-sphere |x0|^{1/t} + |ξ0|^{1/s} = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiSphereDirection {
    pub x0: f64,
    pub xi0: f64,
}

impl QuasiSphereDirection {
    /// Builds the direction with parameters (w, σx, σξ): x0 = σx·wᵗ, ξ0 = σξ·(1−w)ˢ.
    pub fn from_params(w: f64, sigma_x: f64, sigma_xi: f64, idx: AnisotropicIndex) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("w = {w} outside [0, 1]")));
        }
        if sigma_x.abs() != 1.0 || sigma_xi.abs() != 1.0 {
            return Err(Error::InvalidParameter("direction signs must be +1 or -1".into()));
        }
        Ok(Self {
            x0: sigma_x * w.powf(idx.t),
            xi0: sigma_xi * (1.0 - w).powf(idx.s),
        })
    }

    /// Recovers (w, σx, σξ); a zero coordinate gets the sign +1.
    pub fn params(self, idx: AnisotropicIndex) -> (f64, f64, f64) {
        let w = self.x0.abs().powf(1.0 / idx.t);
        let sx = if self.x0 < 0.0 { -1.0 } else { 1.0 };
        let sxi = if self.xi0 < 0.0 { -1.0 } else { 1.0 };
        (w, sx, sxi)
    }

    pub fn quasi_norm(self, idx: AnisotropicIndex) -> f64 {
        self.x0.abs().powf(1.0 / idx.t) + self.xi0.abs().powf(1.0 / idx.s)
    }

    pub fn point(self) -> PhasePoint {
        PhasePoint::new(self.x0, self.xi0)
    }

    pub fn distance(self, other: QuasiSphereDirection) -> f64 {
        (self.x0 - other.x0).hypot(self.xi0 - other.xi0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecomposedPoint {
    pub lambda: f64,
    pub dir: QuasiSphereDirection,
}

pub fn anisotropic_decompose(z: PhasePoint, idx: AnisotropicIndex) -> Result<DecomposedPoint> {
    if z.x == 0.0 && z.xi == 0.0 {
        return Err(Error::ZeroPoint);
    }
    let lambda = z.x.abs().powf(1.0 / idx.t) + z.xi.abs().powf(1.0 / idx.s);
    let mut x0 = z.x / lambda.powf(idx.t);
    let mut xi0 = z.xi / lambda.powf(idx.s);
    // Snap the dominant coordinate so the quasi-norm is 1 to rounding.
    let wx = x0.abs().powf(1.0 / idx.t);
    let wxi = xi0.abs().powf(1.0 / idx.s);
    if wx >= wxi {
        x0 = x0.signum() * (1.0 - wxi).max(0.0).powf(idx.t);
    } else {
        xi0 = xi0.signum() * (1.0 - wx).max(0.0).powf(idx.s);
    }
    Ok(DecomposedPoint { lambda, dir: QuasiSphereDirection { x0, xi0 } })
}

pub fn anisotropic_scale(dir: QuasiSphereDirection, lambda: f64, idx: AnisotropicIndex) -> Result<PhasePoint> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    Ok(PhasePoint::new(lambda.powf(idx.t) * dir.x0, lambda.powf(idx.s) * dir.xi0))
}

/// `count` directions swept once around the quasi-sphere, counter-clockwise from (1, 0).
///
/// The four axis directions sit at k = 0, N/4, N/2, 3N/4 when N is a multiple of 4.
pub fn direction_sweep(idx: AnisotropicIndex, count: usize) -> Result<Vec<QuasiSphereDirection>> {
    if count < 4 {
        return Err(Error::InvalidParameter(format!("sweep of {count} directions, need at least 4")));
    }
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let theta = 4.0 * k as f64 / count as f64;
        let q = theta.floor() as usize;
        let f = theta - q as f64;
        let (w, sx, sxi) = match q {
            0 => (1.0 - f, 1.0, 1.0),
            1 => (f, -1.0, 1.0),
            2 => (1.0 - f, -1.0, -1.0),
            _ => (f, 1.0, -1.0),
        };
        out.push(QuasiSphereDirection::from_params(w, sx, sxi, idx)?);
    }
    Ok(out)
}

/// The quotient (1+|x+y|²)/((1+|x|²)(1+|y|²)) for vectors of equal length.
pub fn peetre_ratio(x: &[f64], y: &[f64]) -> f64 {
    let nx: f64 = x.iter().map(|v| v * v).sum();
    let ny: f64 = y.iter().map(|v| v * v).sum();
    let nxy: f64 = x.iter().zip(y).map(|(a, b)| (a + b) * (a + b)).sum();
    (1.0 + nxy) / ((1.0 + nx) * (1.0 + ny))
}

/// Estimates sup over x, y ∈ Rᵈ of the Peetre quotient.
pub fn peetre_sup_estimate(dim: usize, refine_tol: f64) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if !(refine_tol > 0.0) {
        return Err(Error::NonPositiveArgument(refine_tol));
    }
    const N: usize = 64;
    const R_MAX: f64 = 4.0;
    let radius = |i: usize| R_MAX * i as f64 / (N - 1) as f64;
    // The quotient depends only on |x|, |y| and the angle between them.
    let angles: Vec<f64> = if dim == 1 {
        vec![0.0, std::f64::consts::PI]
    } else {
        (0..N).map(|k| std::f64::consts::PI * k as f64 / (N - 1) as f64).collect()
    };
    let mut best = f64::MIN;
    let mut best_r = 0.0;
    for i in 0..N {
        for j in 0..N {
            for &a in &angles {
                let (r1, r2) = (radius(i), radius(j));
                let x = [r1, 0.0];
                let y = [r2 * a.cos(), r2 * a.sin()];
                let v = peetre_ratio(&x[..dim.min(2)], &y[..dim.min(2)]);
                if v > best {
                    best = v;
                    best_r = 0.5 * (r1 + r2);
                }
            }
        }
    }
    // Golden-section search on the diagonal x = y = r·e₁.
    let diag = |r: f64| (1.0 + 4.0 * r * r) / ((1.0 + r * r) * (1.0 + r * r));
    let step = R_MAX / (N - 1) as f64;
    let (mut a, mut b) = ((best_r - 2.0 * step).max(0.0), best_r + 2.0 * step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (diag(c), diag(d));
    while (b - a) > refine_tol.min(1e-4) * 1e-3 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = diag(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = diag(d);
        }
    }
    Ok(best.max(diag(0.5 * (a + b))))
}

/// κ(u) = 1 for u ≤ 1 and 2^{u−1} otherwise.
pub fn kappa(u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::NonPositiveArgument(u));
    }
    Ok(if u <= 1.0 { 1.0 } else { 2f64.powf(u - 1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_examples() {
        let d = anisotropic_decompose(PhasePoint::new(4.0, 3.0), AnisotropicIndex::new(2.0, 1.0).unwrap()).unwrap();
        assert!((d.lambda - 5.0).abs() < 1e-14);
        assert!((d.dir.x0 - 4.0 / 25.0).abs() < 1e-15 && (d.dir.xi0 - 0.6).abs() < 1e-15);
        let d = anisotropic_decompose(PhasePoint::new(0.0, -2.0), AnisotropicIndex::new(1.0, 2.0).unwrap()).unwrap();
        assert!((d.lambda - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.dir.xi0, -1.0);
    }

    #[test]
    fn sweep_hits_axes_once() {
        let idx = AnisotropicIndex::new(1.5, 0.8).unwrap();
        let dirs = direction_sweep(idx, 64).unwrap();
        let axes = dirs.iter().filter(|d| d.x0 == 0.0 || d.xi0 == 0.0).count();
        assert_eq!(axes, 4);
        for d in &dirs {
            assert!((d.quasi_norm(idx) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_rejects_zero() {
        assert!(kappa(0.0).is_err());
        assert_eq!(kappa(2.0).unwrap(), 2.0);
    }
}
