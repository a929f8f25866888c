//! Named experiments. Each one builds its signals, runs the detector and checks the
//! expected wave front picture.

use crate::detector::{
    classify_directions, ray_decay_classify, wavefront_map, window_invariance_check, ClassificationPolicy, Label,
    Verdict, WavefrontMap,
};
use crate::error::{Error, Result};
use crate::geometry::{anisotropic_decompose, direction_sweep, peetre_sup_estimate, AnisotropicIndex, PhasePoint};
use crate::operators::{
    apply_fourier, apply_pointwise_factor, dilate, in_sets_match, map_transform, propagate_power, translate_modulate,
    MapTransform,
};
use crate::signal::{make_window, sample, AnalyticSignal, DeltaTerm, SampledSignal, UniformGrid};
use crate::stft::{moyal_check, StftEvaluator};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::time::{Duration, Instant};

pub const PRESET_NAMES: [&str; 19] = [
    "peetre",
    "moyal",
    "delta-axis",
    "planewave-axis",
    "chirp-m2",
    "chirp-m3",
    "chirp-regime-44",
    "chirp-regime-45",
    "modulus-chirp-axis",
    "exponential-axis",
    "expchirp",
    "airy",
    "propagator-m3",
    "fourier-swap",
    "dilation",
    "shift-invariance",
    "window-invariance",
    "microlocal-expmult",
    "delta-series-trunc",
];

const SWEEP: usize = 64;
const QUAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expectation {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// One classified probe point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe {
    pub name: String,
    pub point: PhasePoint,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub preset: String,
    pub expectations: Vec<Expectation>,
    pub duration: Duration,
    /// The policy of the detector runs, when the preset has any.
    pub policy: Option<ClassificationPolicy>,
    pub maps: Vec<(String, WavefrontMap)>,
    pub probes: Vec<Probe>,
    pub values: Vec<(String, f64)>,
}

impl RunReport {
    fn new(preset: &str) -> Self {
        Self {
            preset: preset.into(),
            expectations: Vec::new(),
            duration: Duration::ZERO,
            policy: None,
            maps: Vec::new(),
            probes: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.expectations.iter().all(|e| e.pass)
    }

    fn expect(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.expectations.push(Expectation { name: name.into(), pass, detail: detail.into() });
    }

    pub fn map(&self, name: &str) -> Option<&WavefrontMap> {
        self.maps.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn to_json(&self) -> String {
        let maps: serde_json::Map<String, Value> = self
            .maps
            .iter()
            .map(|(n, m)| (n.clone(), serde_json::to_value(m).unwrap_or(Value::Null)))
            .collect();
        let values: serde_json::Map<String, Value> = self.values.iter().map(|(n, v)| (n.clone(), json!(v))).collect();
        let v = json!({
            "preset": self.preset,
            "pass": self.passed(),
            "duration_s": self.duration.as_secs_f64(),
            "policy": self.policy,
            "expectations": self.expectations,
            "values": values,
            "probes": self.probes,
            "maps": maps,
        });
        serde_json::to_string_pretty(&v).unwrap_or_default()
    }

    /// One line per expectation.
    pub fn summary(&self) -> String {
        let mut out = format!("{} ({:.1} s)\n", self.preset, self.duration.as_secs_f64());
        for e in &self.expectations {
            out.push_str(&format!("  {} {}: {}\n", if e.pass { "PASS" } else { "FAIL" }, e.name, e.detail));
        }
        out
    }
}

/// Compact picture of a map: I, '.', '_' and '?' for IN, OUT, OUT_FLOOR and INCONCLUSIVE.
pub fn label_string(m: &WavefrontMap) -> String {
    m.labels()
        .iter()
        .map(|l| match l {
            Label::In => 'I',
            Label::Out => '.',
            Label::OutFloor => '_',
            Label::Inconclusive => '?',
        })
        .collect()
}

/// The policy a preset runs with.
pub fn preset_policy(name: &str) -> Result<ClassificationPolicy> {
    let base = ClassificationPolicy::default();
    Ok(match name {
        "peetre" | "moyal" => base,
        "delta-axis" | "planewave-axis" | "exponential-axis" | "chirp-m2" | "chirp-regime-44" | "fourier-swap"
        | "dilation" | "shift-invariance" | "window-invariance" | "microlocal-expmult" | "delta-series-trunc"
        | "propagator-m3" | "airy" => ClassificationPolicy { lambda_max: 400.0, ..base },
        "chirp-m3" | "expchirp" => ClassificationPolicy { lambda_max: 400.0, neighborhood_radius: 0.01, ..base },
        "chirp-regime-45" => ClassificationPolicy { lambda_max: 60.0, ..base },
        "modulus-chirp-axis" => ClassificationPolicy { lambda_max: 50.0, ..base },
        other => return Err(Error::UnknownPreset(other.into())),
    })
}

pub fn run_experiment(name: &str) -> Result<RunReport> {
    let pol = preset_policy(name)?;
    let start = Instant::now();
    let mut r = RunReport::new(name);
    if !matches!(name, "peetre" | "moyal") {
        r.policy = Some(pol);
    }
    match name {
        "peetre" => peetre(&mut r)?,
        "moyal" => moyal(&mut r)?,
        "delta-axis" => delta_axis(&mut r, &pol)?,
        "planewave-axis" => planewave_axis(&mut r, &pol)?,
        "chirp-m2" => chirp_m2(&mut r, &pol)?,
        "chirp-m3" => curve_m3(&mut r, &pol, AnalyticSignal::power_chirp(1.0, 3)?)?,
        "chirp-regime-44" => regime_44(&mut r, &pol)?,
        "chirp-regime-45" => regime_45(&mut r, &pol)?,
        "modulus-chirp-axis" => modulus_axis(&mut r, &pol)?,
        "exponential-axis" => exponential_axis(&mut r, &pol)?,
        "expchirp" => curve_m3(&mut r, &pol, AnalyticSignal::exp_chirp(Complex64::new(1.0, 0.0), 1.0, 3)?)?,
        "airy" => airy(&mut r, &pol)?,
        "propagator-m3" => propagator(&mut r, &pol)?,
        "fourier-swap" => fourier_swap(&mut r, &pol)?,
        "dilation" => dilation(&mut r, &pol)?,
        "shift-invariance" => shift_invariance(&mut r, &pol)?,
        "window-invariance" => window_invariance(&mut r, &pol)?,
        "microlocal-expmult" => microlocal(&mut r, &pol)?,
        "delta-series-trunc" => delta_series_trunc(&mut r, &pol)?,
        _ => unreachable!(),
    }
    r.duration = start.elapsed();
    Ok(r)
}

fn unit_window_analytic(sig: AnalyticSignal) -> Result<StftEvaluator> {
    StftEvaluator::analytic(sig, make_window(1.0)?)
}

fn unit_window_quadrature(sig: AnalyticSignal) -> Result<StftEvaluator> {
    StftEvaluator::quadrature(sig, make_window(1.0)?, QUAD_TOL)
}

#[derive(Clone, Copy)]
enum Axis {
    Space,
    Frequency,
}

/// Directions exactly on `axis` are IN; directions farther than ρ from it are not.
fn axis_pattern(m: &WavefrontMap, axis: Axis, rho: f64) -> (bool, String) {
    let mut missing = 0;
    let mut stray = 0;
    for e in &m.entries {
        let off = match axis {
            Axis::Space => e.dir.xi0.abs(),
            Axis::Frequency => e.dir.x0.abs(),
        };
        let inside = e.verdict.label == Label::In;
        if off < 1e-12 && !inside {
            missing += 1;
        }
        if off > rho && inside {
            stray += 1;
        }
    }
    (missing == 0 && stray == 0, format!("{} (missing {missing}, stray {stray})", label_string(m)))
}

fn probe(
    r: &mut RunReport,
    ev: &StftEvaluator,
    idx: AnisotropicIndex,
    pol: &ClassificationPolicy,
    points: &[(String, PhasePoint)],
) -> Result<Vec<Verdict>> {
    let dirs = points
        .iter()
        .map(|(_, p)| Ok(anisotropic_decompose(*p, idx)?.dir))
        .collect::<Result<Vec<_>>>()?;
    let m = classify_directions(ev, idx, &dirs, pol)?;
    let verdicts: Vec<Verdict> = m.entries.into_iter().map(|e| e.verdict).collect();
    for ((name, p), v) in points.iter().zip(&verdicts) {
        r.probes.push(Probe { name: name.clone(), point: *p, verdict: v.clone() });
    }
    Ok(verdicts)
}

fn count_expect(r: &mut RunReport, name: &str, verdicts: &[Verdict], want_in: bool) {
    let good = verdicts.iter().filter(|v| if want_in { v.label == Label::In } else { v.label.is_out() }).count();
    let labels: Vec<&str> = verdicts.iter().map(|v| v.label.as_str()).collect();
    r.expect(name, good == verdicts.len(), format!("{good}/{} as expected: {}", verdicts.len(), labels.join(" ")));
}

fn peetre(r: &mut RunReport) -> Result<()> {
    for dim in [1, 2] {
        let v = peetre_sup_estimate(dim, 1e-10)?;
        r.values.push((format!("sup_dim{dim}"), v));
        let err = (v - 4.0 / 3.0).abs();
        r.expect(&format!("supremum in dimension {dim} is 4/3"), err <= 1e-6, format!("{v:.12} (error {err:.1e})"));
    }
    Ok(())
}

fn moyal(r: &mut RunReport) -> Result<()> {
    let grid = UniformGrid::covering(-16.0, 16.0, 512)?;
    let window = make_window(1.0)?;
    let gauss = sample(&AnalyticSignal::gaussian(1.0, 0.0, 0.0)?, grid)?;
    let norm = std::f64::consts::SQRT_2 * std::f64::consts::PI.powf(-0.25);
    let hermite = SampledSignal::new(
        grid,
        grid.points().iter().map(|&x| Complex64::new(norm * x * (-x * x / 2.0).exp(), 0.0)).collect(),
    )?;
    for (name, f) in [("gaussian", &gauss), ("hermite1", &hermite)] {
        let c = moyal_check(f, &window)?;
        r.values.push((format!("ratio_{name}"), c.ratio));
        let err = (c.ratio - 1.0).abs();
        r.expect(&format!("norm ratio for {name}"), err <= 1e-6, format!("{:.12} (error {err:.1e})", c.ratio));
    }
    let zero = SampledSignal::new(grid, vec![Complex64::new(0.0, 0.0); grid.count])?;
    let c = moyal_check(&zero, &window)?;
    r.expect("zero signal is degenerate", c.degenerate && c.ratio == 1.0, format!("ratio {}", c.ratio));
    Ok(())
}

fn axis_maps(
    r: &mut RunReport,
    pol: &ClassificationPolicy,
    idx: AnisotropicIndex,
    axis: Axis,
    signals: Vec<(&str, AnalyticSignal)>,
) -> Result<()> {
    for (name, sig) in signals {
        let m = wavefront_map(&unit_window_analytic(sig)?, idx, SWEEP, pol)?;
        let (pass, detail) = axis_pattern(&m, axis, pol.neighborhood_radius);
        r.expect(&format!("{name} sits on the axis"), pass, detail);
        r.maps.push((name.into(), m));
    }
    Ok(())
}

fn delta_axis(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(1.0, 1.0)?;
    let sigs = vec![
        ("delta", AnalyticSignal::delta_derivative(0)),
        ("delta_d1", AnalyticSignal::delta_derivative(1)),
        ("delta_d2", AnalyticSignal::delta_derivative(2)),
    ];
    axis_maps(r, pol, idx, Axis::Frequency, sigs)
}

fn planewave_axis(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(1.0, 1.0)?;
    let sigs = vec![("plane_wave_2", AnalyticSignal::plane_wave(2.0)), ("plane_wave_5", AnalyticSignal::plane_wave(5.0))];
    axis_maps(r, pol, idx, Axis::Space, sigs)
}

fn exponential_axis(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(0.9, 1.0)?;
    let sigs = vec![("exponential", AnalyticSignal::exponential(Complex64::new(1.0, 1.0)))];
    axis_maps(r, pol, idx, Axis::Space, sigs)
}

/// Off-curve probes (x, ξ(x)·(1 + o)) for x = ±1.
fn off_curve(curve: impl Fn(f64) -> f64, offsets: &[f64]) -> Vec<(String, PhasePoint)> {
    let mut out = Vec::new();
    for x in [1.0, -1.0] {
        for &o in offsets {
            out.push((format!("off x={x} offset={o}"), PhasePoint::new(x, curve(x) * (1.0 + o))));
        }
    }
    out
}

fn chirp_m2(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(1.0, 1.0)?;
    let ev = unit_window_analytic(AnalyticSignal::power_chirp(0.5, 2)?)?;
    let m = wavefront_map(&ev, idx, SWEEP, pol)?;
    let exact = m
        .entries
        .iter()
        .all(|e| ((e.dir.x0 - e.dir.xi0).abs() < 1e-12) == (e.verdict.label == Label::In));
    r.expect("IN set is the diagonal", exact, label_string(&m));
    r.maps.push(("chirp".into(), m));
    let points = off_curve(|x| x, &[-0.5, -0.25, 0.25, 0.5, 1.0]);
    let v = probe(r, &ev, idx, pol, &points)?;
    count_expect(r, "off-diagonal probes are OUT", &v, false);
    Ok(())
}

/// Probes along ξ = 3x² and off it, for e^{ix³} and its exponential multiple.
fn curve_m3(r: &mut RunReport, pol: &ClassificationPolicy, sig: AnalyticSignal) -> Result<()> {
    let idx = AnisotropicIndex::new(1.0, 2.0)?;
    let ev = unit_window_quadrature(sig)?;
    let on: Vec<(String, PhasePoint)> = [1.0, 0.5, 2.0, -1.0, -2.0]
        .iter()
        .map(|&x| (format!("on x={x}"), PhasePoint::new(x, 3.0 * x * x)))
        .collect();
    let v = probe(r, &ev, idx, pol, &on)?;
    count_expect(r, "curve probes are IN", &v, true);
    let off = off_curve(|x| 3.0 * x * x, &[-2.0, -0.5, -0.25, 0.25, 0.5]);
    let v = probe(r, &ev, idx, pol, &off)?;
    count_expect(r, "off-curve probes are OUT", &v, false);
    Ok(())
}

fn regime_44(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(0.8, 2.5)?;
    let m = wavefront_map(&unit_window_quadrature(AnalyticSignal::power_chirp(1.0, 3)?)?, idx, SWEEP, pol)?;
    let stray = m.in_directions().iter().filter(|d| d.xi0.abs() > pol.neighborhood_radius).count();
    r.values.push(("in_count".into(), m.in_directions().len() as f64));
    r.expect("IN set lies on the space axis", stray == 0, format!("{} (stray {stray})", label_string(&m)));
    r.maps.push(("chirp".into(), m));
    Ok(())
}

fn regime_45(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(2.0, 1.5)?;
    let m = wavefront_map(&unit_window_quadrature(AnalyticSignal::power_chirp(1.0, 4)?)?, idx, SWEEP, pol)?;
    let (pass, detail) = axis_pattern(&m, Axis::Frequency, pol.neighborhood_radius);
    r.expect("IN set is the frequency axis", pass, detail);
    r.maps.push(("chirp".into(), m));
    Ok(())
}

fn modulus_axis(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(1.0, 1.5)?;
    let ev = unit_window_quadrature(AnalyticSignal::modulus_chirp(1.0, 2.5)?)?;
    let axis = vec![
        ("axis up".to_string(), PhasePoint::new(0.0, 1.0)),
        ("axis down".to_string(), PhasePoint::new(0.0, -1.0)),
    ];
    let v = probe(r, &ev, idx, pol, &axis)?;
    count_expect(r, "frequency axis is IN", &v, true);
    // The smooth part of the curve, reported only.
    let curve = vec![
        ("curve x=1".to_string(), PhasePoint::new(1.0, 2.5)),
        ("curve x=-1".to_string(), PhasePoint::new(-1.0, -2.5)),
    ];
    probe(r, &ev, idx, pol, &curve)?;
    Ok(())
}

fn airy(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(1.5, 0.75)?;
    let ev = unit_window_quadrature(AnalyticSignal::airy_fourier())?;
    let on = vec![
        ("on (-1, 1)".to_string(), PhasePoint::new(-1.0, 1.0)),
        ("on (-1, -1)".to_string(), PhasePoint::new(-1.0, -1.0)),
    ];
    let v = probe(r, &ev, idx, pol, &on)?;
    count_expect(r, "oscillatory side is IN", &v, true);
    let off = vec![
        ("off (1, 1)".to_string(), PhasePoint::new(1.0, 1.0)),
        ("off (1, -1)".to_string(), PhasePoint::new(1.0, -1.0)),
    ];
    let v = probe(r, &ev, idx, pol, &off)?;
    count_expect(r, "decaying side is OUT", &v, false);
    Ok(())
}

/// w_τ = F⁻¹(e^{−iτξ³}) is analyzed on the frequency side with the swapped index.
fn propagator(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(2.4, 1.2)?;
    let freq_idx = idx.swapped();
    let initial = unit_window_analytic(propagate_power(3, 0.0)?)?;
    let m = map_transform(&wavefront_map(&initial, freq_idx, SWEEP, pol)?, MapTransform::SwapJInverse)?;
    let axis_in = [1.0, -1.0].iter().all(|&sgn| {
        m.entries.iter().any(|e| e.dir.x0.abs() < 1e-12 && e.dir.xi0 * sgn > 0.0 && e.verdict.label == Label::In)
    });
    let stray = m.in_directions().iter().filter(|d| d.x0.abs() > pol.neighborhood_radius).count();
    r.expect(
        "time 0 gives the frequency axis",
        axis_in && stray == 0,
        format!("{} (stray {stray})", label_string(&m)),
    );
    r.maps.push(("time_0".into(), m));
    for time in [0.5, 1.0] {
        let ev = unit_window_quadrature(propagate_power(3, time)?)?;
        // (3τξ², ξ) seen through J is (ξ, −3τξ²).
        let to_freq = |x: f64, xi: f64| PhasePoint::new(xi, -x);
        let on: Vec<(String, PhasePoint)> = [1.0, 0.5, 2.0, -1.0, -2.0]
            .iter()
            .map(|&xi| (format!("time {time} on xi={xi}"), to_freq(3.0 * time * xi * xi, xi)))
            .collect();
        let v = probe(r, &ev, freq_idx, pol, &on)?;
        count_expect(r, &format!("time {time}: curve probes are IN"), &v, true);
        let off: Vec<(String, PhasePoint)> = [(1.0, -0.5), (1.0, 0.5), (-1.0, -0.5), (-1.0, 0.5)]
            .iter()
            .map(|&(xi, o)| (format!("time {time} off xi={xi} offset={o}"), to_freq(3.0 * time * xi * xi * (1.0 + o), xi)))
            .collect();
        let v = probe(r, &ev, freq_idx, pol, &off)?;
        count_expect(r, &format!("time {time}: off-curve probes are OUT"), &v, false);
    }
    Ok(())
}

fn fourier_swap(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let cases = [
        ("chirp", AnalyticSignal::power_chirp(0.5, 2)?, AnisotropicIndex::new(1.0, 1.0)?),
        ("delta", AnalyticSignal::delta_derivative(0), AnisotropicIndex::new(1.0, 1.5)?),
    ];
    for (name, sig, idx) in cases {
        let m = wavefront_map(&unit_window_analytic(sig.clone())?, idx, SWEEP, pol)?;
        let hat = wavefront_map(&unit_window_analytic(apply_fourier(&sig)?)?, idx.swapped(), SWEEP, pol)?;
        let moved = map_transform(&m, MapTransform::SwapJ)?;
        let pass = !hat.in_directions().is_empty() && in_sets_match(&moved.in_directions(), &hat.in_directions(), 1e-9);
        r.expect(
            &format!("{name}: transform swaps the IN set"),
            pass,
            format!("{} vs {}", label_string(&m), label_string(&hat)),
        );
        r.maps.push((name.into(), m));
        r.maps.push((format!("{name}_hat"), hat));
    }
    Ok(())
}

fn dilation(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    const A: f64 = 2.0;
    const N: usize = 80;
    let idx = AnisotropicIndex::new(1.0, 1.0)?;
    let sig = AnalyticSignal::power_chirp(0.5, 2)?;
    let m = wavefront_map(&unit_window_analytic(sig.clone())?, idx, N, pol)?;
    let d = wavefront_map(&unit_window_analytic(dilate(&sig, A)?)?, idx, N, pol)?;
    let moved = map_transform(&m, MapTransform::Dilate(A))?;
    let dirs = direction_sweep(idx, N)?;
    let spacing = dirs.windows(2).map(|w| w[0].distance(w[1])).fold(0.0, f64::max);
    let pass = !d.in_directions().is_empty() && in_sets_match(&moved.in_directions(), &d.in_directions(), spacing);
    r.expect(
        "dilated IN set follows the map",
        pass,
        format!("{} (matching within {spacing:.4})", label_string(&d)),
    );
    r.maps.push(("chirp".into(), m));
    r.maps.push(("dilated".into(), d));
    Ok(())
}

fn shift_invariance(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(1.0, 1.0)?;
    let shifts = [(0.7, -1.3), (-2.1, 0.4)];
    for (name, sig) in [("delta", AnalyticSignal::delta_derivative(0)), ("chirp", AnalyticSignal::power_chirp(0.5, 2)?)] {
        let m = wavefront_map(&unit_window_analytic(sig.clone())?, idx, SWEEP, pol)?;
        let base: Vec<bool> = m.labels().iter().map(|l| *l == Label::In).collect();
        for (x0, xi0) in shifts {
            let s = wavefront_map(&unit_window_analytic(translate_modulate(&sig, x0, xi0))?, idx, SWEEP, pol)?;
            let same = s.labels().iter().map(|l| *l == Label::In).eq(base.iter().copied());
            r.expect(
                &format!("{name} shifted by ({x0}, {xi0})"),
                same,
                format!("{} vs {}", label_string(&m), label_string(&s)),
            );
        }
        r.maps.push((name.into(), m));
    }
    Ok(())
}

fn window_invariance(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(1.0, 1.0)?;
    let cases = [
        ("chirp", AnalyticSignal::power_chirp(0.5, 2)?, vec![1.0, 2.0], 62),
        ("delta", AnalyticSignal::delta_derivative(0), vec![0.5, 1.0, 2.0], SWEEP),
        ("gaussian", AnalyticSignal::gaussian(1.0, 0.0, 0.0)?, vec![1.0, 2.0], SWEEP),
    ];
    for (name, sig, sigmas, need) in cases {
        let rep = window_invariance_check(&unit_window_analytic(sig)?, idx, &sigmas, SWEEP, pol)?;
        r.values.push((format!("{name}_agreeing"), rep.agreeing as f64));
        r.expect(
            &format!("{name} agrees across window widths"),
            rep.agreeing >= need,
            format!("{}/{} (need {need})", rep.agreeing, rep.total),
        );
    }
    Ok(())
}

fn microlocal(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(1.0, 2.0)?;
    let pol = ClassificationPolicy { neighborhood_radius: 0.05, ..*pol };
    r.policy = Some(pol);
    let chirp = AnalyticSignal::power_chirp(1.0, 3)?;
    let product = apply_pointwise_factor(&chirp, &AnalyticSignal::exponential(Complex64::new(1.0, 0.0)))?;
    let m = wavefront_map(&unit_window_quadrature(chirp)?, idx, SWEEP, &pol)?;
    let p = wavefront_map(&unit_window_quadrature(product)?, idx, SWEEP, &pol)?;
    let same = !m.in_directions().is_empty() && m.in_directions() == p.in_directions();
    r.expect("exponential factor keeps the IN set", same, format!("{} vs {}", label_string(&m), label_string(&p)));
    r.maps.push(("chirp".into(), m));
    r.maps.push(("product".into(), p));
    Ok(())
}

/// Σ_{k<n} D^kδ / (k!)².
fn delta_series(n: u32) -> AnalyticSignal {
    let mut fact = 1.0;
    let terms = (0..n)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            DeltaTerm { order: k, coeff: Complex64::new(1.0 / (fact * fact), 0.0) }
        })
        .collect();
    AnalyticSignal::DeltaComb { terms }
}

fn delta_series_trunc(r: &mut RunReport, pol: &ClassificationPolicy) -> Result<()> {
    let idx = AnisotropicIndex::new(1.0, 1.0)?;
    let mut maps = Vec::new();
    for n in [16, 32] {
        let sig = delta_series(n);
        let m = wavefront_map(&unit_window_analytic(sig.clone())?, idx, SWEEP, pol)?;
        let (pass, detail) = axis_pattern(&m, Axis::Frequency, pol.neighborhood_radius);
        r.expect(&format!("{n} terms sit on the frequency axis"), pass, detail);
        // The transform is the polynomial (2π)^{−1/2}Σ ξ^k/(k!)².
        let poly = match apply_fourier(&sig)? {
            AnalyticSignal::Polynomial { coeffs } => coeffs,
            other => return Err(Error::NoClosedForm(other.name().into())),
        };
        let rays = [1.0, -1.0]
            .iter()
            .map(|&d| ray_decay_classify(&AnalyticSignal::Polynomial { coeffs: poly.clone() }, 1.5, d, pol))
            .collect::<Result<Vec<_>>>()?;
        maps.push((m, rays));
    }
    let same_map = maps[0].0.labels() == maps[1].0.labels();
    r.expect("map is stable under doubling the order", same_map, label_string(&maps[1].0));
    let rays = |i: usize| maps[i].1.iter().map(|v| v.label).collect::<Vec<_>>();
    r.expect(
        "ray verdicts are stable under doubling the order",
        rays(0) == rays(1),
        format!("{:?} vs {:?}", rays(0), rays(1)),
    );
    for (i, (m, _)) in maps.into_iter().enumerate() {
        r.maps.push((format!("terms_{}", 16 << i), m));
    }
    Ok(())
}
