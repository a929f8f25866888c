//! Decay profiles along anisotropic curves and wave front verdicts.

mod export;

use crate::error::{Error, Result};
use crate::geometry::{anisotropic_scale, direction_sweep, AnisotropicIndex, QuasiSphereDirection};
use crate::signal::{eval_log_abs, make_window, AnalyticSignal};
use crate::stft::{stft_eval, StftEvaluator};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassificationPolicy {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Points of the geometric λ grid.
    pub lambda_count: usize,
    pub neighborhood_radius: f64,
    /// Stencil size; an odd square (1, 9, 25, ...).
    pub neighborhood_samples: usize,
    pub r_star: f64,
    pub monotone_window: usize,
    pub stabilization_tol: f64,
}

impl Default for ClassificationPolicy {
    fn default() -> Self {
        Self {
            lambda_min: 1.0,
            lambda_max: 10.0,
            lambda_count: 40,
            neighborhood_radius: 0.05,
            neighborhood_samples: 9,
            r_star: 1.5,
            monotone_window: 3,
            stabilization_tol: 0.1,
        }
    }
}

impl ClassificationPolicy {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.lambda_min > 0.0 && self.lambda_max.is_finite()) || !(self.lambda_min < self.lambda_max) {
            return bad(format!("need 0 < lambda_min < lambda_max, got {} and {}", self.lambda_min, self.lambda_max));
        }
        if self.monotone_window == 0 {
            return bad("monotone_window must be positive".into());
        }
        if self.lambda_count < self.monotone_window + 1 {
            return bad(format!(
                "lambda_count {} leaves fewer than {} points",
                self.lambda_count,
                self.monotone_window + 1
            ));
        }
        if !(self.neighborhood_radius > 0.0 && self.r_star > 0.0 && self.stabilization_tol > 0.0) {
            return bad("radius, r_star and stabilization_tol must be positive".into());
        }
        let side = (self.neighborhood_samples as f64).sqrt().round() as usize;
        if side * side != self.neighborhood_samples || side % 2 == 0 {
            return bad(format!("neighborhood_samples must be an odd square, got {}", self.neighborhood_samples));
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        let n = self.lambda_count;
        let ratio = self.lambda_max / self.lambda_min;
        (0..n).map(|i| self.lambda_min * ratio.powf(i as f64 / (n - 1) as f64)).collect()
    }

    /// Offsets of the square stencil; its corners lie on the circle of radius ρ.
    fn stencil(&self) -> Vec<(f64, f64)> {
        let k = ((self.neighborhood_samples as f64).sqrt().round() as i64 - 1) / 2;
        if k == 0 {
            return vec![(0.0, 0.0)];
        }
        let d = self.neighborhood_radius / (std::f64::consts::SQRT_2 * k as f64);
        let mut out = Vec::new();
        for i in -k..=k {
            for j in -k..=k {
                out.push((i as f64 * d, j as f64 * d));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    #[serde(rename = "OUT")]
    Out,
    #[serde(rename = "IN")]
    In,
    #[serde(rename = "OUT_FLOOR")]
    OutFloor,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl Label {
    pub fn code(self) -> u8 {
        match self {
            Label::Out => 0,
            Label::In => 1,
            Label::OutFloor => 2,
            Label::Inconclusive => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Out => "OUT",
            Label::In => "IN",
            Label::OutFloor => "OUT_FLOOR",
            Label::Inconclusive => "INCONCLUSIVE",
        }
    }

    pub fn is_out(self) -> bool {
        matches!(self, Label::Out | Label::OutFloor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub label: Label,
    pub fitted_terminal_rate: f64,
    pub confidence_notes: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    pub dir: QuasiSphereDirection,
    pub idx: AnisotropicIndex,
    pub lambdas: Vec<f64>,
    /// Neighborhood suprema of |V|.
    pub m: Vec<f64>,
    /// ln M, finite where M itself under- or overflows.
    pub log_m: Vec<f64>,
    /// Index of the first λ at which every stencil value was below the floor; the profile ends there.
    pub floor_hit_at: Option<usize>,
    pub rates: Vec<f64>,
    /// Stencil samples the evaluator could not resolve (quadrature over budget or stalled).
    /// M is then only a lower bound, which still supports IN but not OUT.
    pub unresolved: usize,
}

impl DecayProfile {
    fn usable(&self) -> usize {
        self.floor_hit_at.unwrap_or(self.lambdas.len())
    }
}

pub fn decay_profile(
    ev: &StftEvaluator,
    dir: QuasiSphereDirection,
    idx: AnisotropicIndex,
    pol: &ClassificationPolicy,
) -> Result<DecayProfile> {
    pol.validate()?;
    let stencil = pol.stencil();
    let mut p = DecayProfile {
        dir,
        idx,
        lambdas: Vec::new(),
        m: Vec::new(),
        log_m: Vec::new(),
        floor_hit_at: None,
        rates: Vec::new(),
        unresolved: 0,
    };
    for (i, lambda) in pol.lambdas().into_iter().enumerate() {
        let mut best_resolved = f64::NEG_INFINITY;
        let mut best_any = f64::NEG_INFINITY;
        let mut all_floor = true;
        let mut resolved = 0;
        for &(dx, dxi) in &stencil {
            let q = QuasiSphereDirection { x0: dir.x0 + dx, xi0: dir.xi0 + dxi };
            let v = match stft_eval(ev, anisotropic_scale(q, lambda, idx)?) {
                Ok(v) => v,
                Err(Error::QuadratureNonConvergent { .. }) => {
                    p.unresolved += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            resolved += 1;
            best_any = best_any.max(v.log_abs);
            if !v.below_floor {
                all_floor = false;
                best_resolved = best_resolved.max(v.log_abs);
            }
        }
        if resolved == 0 {
            break;
        }
        let log_m = if all_floor { best_any } else { best_resolved };
        p.lambdas.push(lambda);
        p.log_m.push(log_m);
        p.m.push(log_m.exp());
        p.rates.push(-log_m / lambda);
        if all_floor {
            p.floor_hit_at = Some(i);
            break;
        }
    }
    Ok(p)
}

fn classify_rates(rates: &[f64], usable: usize, floor: Option<f64>, pol: &ClassificationPolicy) -> Result<Verdict> {
    let k = pol.monotone_window;
    let note = |extra: String| format!("rho={}; usable={}; {}", pol.neighborhood_radius, usable, extra);
    if usable >= k + 1 {
        let tail = &rates[usable - k - 1..usable];
        let terminal = tail[k];
        if tail.windows(2).all(|w| w[1] > w[0]) && terminal >= pol.r_star {
            return Ok(Verdict {
                label: Label::Out,
                fitted_terminal_rate: terminal,
                confidence_notes: note("rates increasing past r_star".into()),
            });
        }
    }
    if let Some(lambda_floor) = floor {
        let rate_at_floor = rates[usable];
        return Ok(Verdict {
            label: Label::OutFloor,
            fitted_terminal_rate: rate_at_floor,
            confidence_notes: note(format!("floor reached at lambda={lambda_floor:.6e}")),
        });
    }
    if usable < k + 1 {
        return Err(Error::TooFewPoints { have: usable, need: k + 1 });
    }
    let tail = &rates[usable - k - 1..usable];
    let (first, terminal) = (tail[0], tail[k]);
    let scale = first.abs().max(terminal.abs());
    let stable = scale <= 1e-9 || (terminal - first).abs() < pol.stabilization_tol * scale;
    let falling = tail.windows(2).all(|w| w[1] <= w[0]);
    let settling = tail.windows(2).all(|w| w[1].abs() <= w[0].abs());
    let (label, why) = if stable {
        (Label::In, "rates stabilized")
    } else if falling {
        (Label::In, "rates non-increasing")
    } else if settling {
        (Label::In, "rates tending to zero")
    } else {
        (Label::Inconclusive, "rates neither settled nor increasing past r_star")
    };
    Ok(Verdict { label, fitted_terminal_rate: terminal, confidence_notes: note(why.into()) })
}

pub fn classify(p: &DecayProfile, pol: &ClassificationPolicy) -> Result<Verdict> {
    let floor = p.floor_hit_at.map(|i| p.lambdas[i]);
    if p.unresolved == 0 {
        return classify_rates(&p.rates, p.usable(), floor, pol);
    }
    let partial = format!("{} stencil samples unresolved", p.unresolved);
    match classify_rates(&p.rates, p.usable(), floor, pol) {
        Ok(v) if v.label == Label::In => Ok(Verdict { confidence_notes: format!("{}; {partial}", v.confidence_notes), ..v }),
        Ok(v) => Ok(Verdict {
            label: Label::Inconclusive,
            confidence_notes: format!("{}; {partial}; {} withheld", v.confidence_notes, v.label.as_str()),
            ..v
        }),
        Err(Error::TooFewPoints { .. }) => Ok(Verdict {
            label: Label::Inconclusive,
            fitted_terminal_rate: p.rates.last().copied().unwrap_or(f64::NAN),
            confidence_notes: format!("rho={}; {partial}", pol.neighborhood_radius),
        }),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapEntry {
    pub dir: QuasiSphereDirection,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavefrontMap {
    pub idx: AnisotropicIndex,
    pub policy: ClassificationPolicy,
    pub entries: Vec<MapEntry>,
}

impl WavefrontMap {
    pub fn in_directions(&self) -> Vec<QuasiSphereDirection> {
        self.entries.iter().filter(|e| e.verdict.label == Label::In).map(|e| e.dir).collect()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.entries.iter().map(|e| e.verdict.label).collect()
    }
}

/// Classifies each of `dirs`; the order of `dirs` is kept.
pub fn classify_directions(
    ev: &StftEvaluator,
    idx: AnisotropicIndex,
    dirs: &[QuasiSphereDirection],
    pol: &ClassificationPolicy,
) -> Result<WavefrontMap> {
    pol.validate()?;
    let entries = dirs
        .par_iter()
        .map(|&dir| {
            let p = decay_profile(ev, dir, idx, pol)?;
            Ok(MapEntry { dir, verdict: classify(&p, pol)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WavefrontMap { idx, policy: *pol, entries })
}

pub fn wavefront_map(
    ev: &StftEvaluator,
    idx: AnisotropicIndex,
    sweep: usize,
    pol: &ClassificationPolicy,
) -> Result<WavefrontMap> {
    classify_directions(ev, idx, &direction_sweep(idx, sweep)?, pol)
}

pub const GLOBAL_SWEEP: usize = 32;

/// True iff every direction of the 32-direction sweep is OUT or OUT_FLOOR.
pub fn global_membership_test(ev: &StftEvaluator, idx: AnisotropicIndex, pol: &ClassificationPolicy) -> Result<bool> {
    pol.validate()?;
    let dirs = direction_sweep(idx, GLOBAL_SWEEP)?;
    let witness = dirs
        .par_iter()
        .map(|&dir| -> Result<bool> {
            let p = decay_profile(ev, dir, idx, pol)?;
            Ok(!classify(&p, pol)?.label.is_out())
        })
        .find_any(|r| !matches!(r, Ok(false)));
    match witness {
        None => Ok(true),
        Some(Ok(_)) => Ok(false),
        Some(Err(e)) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowInvarianceReport {
    pub sigmas: Vec<f64>,
    pub agreeing: usize,
    pub total: usize,
    pub disagreeing: Vec<QuasiSphereDirection>,
}

impl WindowInvarianceReport {
    pub fn fraction(&self) -> f64 {
        self.agreeing as f64 / self.total as f64
    }
}

/// Runs one map per window width and compares IN membership direction by direction.
pub fn window_invariance_check(
    ev: &StftEvaluator,
    idx: AnisotropicIndex,
    sigmas: &[f64],
    sweep: usize,
    pol: &ClassificationPolicy,
) -> Result<WindowInvarianceReport> {
    if sigmas.len() < 2 {
        return Err(Error::InvalidParameter("need at least two window widths".into()));
    }
    let mut maps = Vec::with_capacity(sigmas.len());
    for &s in sigmas {
        maps.push(wavefront_map(&ev.with_window(make_window(s)?), idx, sweep, pol)?);
    }
    let mut agreeing = 0;
    let mut disagreeing = Vec::new();
    for (i, e) in maps[0].entries.iter().enumerate() {
        let inside = e.verdict.label == Label::In;
        if maps.iter().all(|m| (m.entries[i].verdict.label == Label::In) == inside) {
            agreeing += 1;
        } else {
            disagreeing.push(e.dir);
        }
    }
    Ok(WindowInvarianceReport { sigmas: sigmas.to_vec(), agreeing, total: maps[0].entries.len(), disagreeing })
}

/// Classifies the ray through `dir` ∈ {+1, −1} by the decay of |f(λˢx)| near x = dir.
pub fn ray_decay_classify(f: &AnalyticSignal, s: f64, dir: f64, pol: &ClassificationPolicy) -> Result<Verdict> {
    pol.validate()?;
    if !(s > 1.0) {
        return Err(Error::InvalidParameter(format!("ray exponent s must exceed 1, got {s}")));
    }
    if dir.abs() != 1.0 {
        return Err(Error::InvalidParameter(format!("ray direction must be +1 or -1, got {dir}")));
    }
    if !f.is_pointwise() {
        return Err(Error::NotPointwise(f.name().into()));
    }
    let n = pol.neighborhood_samples;
    let offsets: Vec<f64> = if n == 1 {
        vec![0.0]
    } else {
        (0..n).map(|i| -pol.neighborhood_radius + 2.0 * pol.neighborhood_radius * i as f64 / (n - 1) as f64).collect()
    };
    let lambdas = pol.lambdas();
    let mut rates = Vec::with_capacity(lambdas.len());
    for &lambda in &lambdas {
        let scale = lambda.powf(s);
        let mut best = f64::NEG_INFINITY;
        for o in &offsets {
            best = best.max(eval_log_abs(f, scale * (dir + o))?);
        }
        rates.push(-best / lambda);
    }
    classify_rates(&rates, rates.len(), None, pol)
}
