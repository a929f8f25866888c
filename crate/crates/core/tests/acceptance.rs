//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and fails if any
//! gated criterion fails.

use aniso_wf::detector::{classify_directions, global_membership_test, ClassificationPolicy, Label};
use aniso_wf::geometry::*;
use aniso_wf::operators::{dilate, weyl_weak_form_check, SymbolDescriptor};
use aniso_wf::presets::{preset_policy, run_experiment};
use aniso_wf::signal::*;
use aniso_wf::stft::{stft_eval, stft_quadrature_reference, StftEvaluator};
use num_complex::Complex64;
use proptest::test_runner::{RngAlgorithm, TestRng};
use rand::RngExt;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

const MIN: u64 = 60;

// Pinned tolerances.
const ORACLE_REL_TOL: f64 = 1e-8;
const ORACLE_MIN_ABS: f64 = 1e-10;
const ROUND_TRIP_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-10;
const PEETRE_BOUND: f64 = 4.0 / 3.0;
const WEAK_FORM_TOL: f64 = 1e-6;

fn criterion(id: u32, title: &str, limit_s: u64, f: impl FnOnce() -> (bool, String)) -> bool {
    let start = Instant::now();
    let (ok, detail) = f();
    let took = start.elapsed();
    let in_time = took <= Duration::from_secs(limit_s);
    let pass = ok && in_time;
    let late = if in_time { String::new() } else { format!(" [over the {limit_s} s budget]") };
    println!(
        "criterion {id:>2} {} {title} ({:.1} s){late}: {detail}",
        if pass { "PASS" } else { "FAIL" },
        took.as_secs_f64()
    );
    pass
}

/// Runs named experiments; each must pass and finish within `limit_s`.
fn presets(names: &[&str], limit_s: u64) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        match run_experiment(name) {
            Ok(r) => {
                let fast = r.duration <= Duration::from_secs(limit_s);
                ok &= r.passed() && fast;
                let failed: Vec<String> =
                    r.expectations.iter().filter(|e| !e.pass).map(|e| format!("{}: {}", e.name, e.detail)).collect();
                parts.push(if failed.is_empty() {
                    format!("{name} ok in {:.1} s", r.duration.as_secs_f64())
                } else {
                    format!("{name} failed [{}]", failed.join("; "))
                });
                if !fast {
                    parts.push(format!("{name} took {:.1} s", r.duration.as_secs_f64()));
                }
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name} error: {e}"));
            }
        }
    }
    (ok, parts.join(", "))
}

/// Closed-form V_φ of e^{icy²}: a complete Gaussian integral.
fn chirp2_oracle(c: f64, sigma: f64, x: f64, xi: f64) -> Complex64 {
    let a = Complex64::new(1.0 / (2.0 * sigma * sigma), -c);
    let b = Complex64::new(x / (sigma * sigma), -xi);
    let c0 = -x * x / (2.0 * sigma * sigma);
    let amp = (PI * sigma * sigma).powf(-0.25) / (2.0 * PI).sqrt();
    (Complex64::new(PI, 0.0) / a).sqrt() * (b * b / (4.0 * a) + c0).exp() * amp
}

fn backend_oracle() -> (bool, String) {
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let sig = AnalyticSignal::power_chirp(0.5, 2).unwrap();
    let window = make_window(1.0).unwrap();
    let analytic = StftEvaluator::analytic(sig.clone(), window).unwrap();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..100 {
        let p = PhasePoint::new(rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0));
        let want = chirp2_oracle(0.5, 1.0, p.x, p.xi);
        if want.norm() <= ORACLE_MIN_ABS {
            continue;
        }
        let q = match stft_quadrature_reference(&sig, &window, p, 1e-12) {
            Ok(v) => v.value,
            Err(e) => return (false, format!("quadrature failed at {p:?}: {e}")),
        };
        let a = stft_eval(&analytic, p).unwrap().value;
        worst = worst.max((q - want).norm() / want.norm()).max((a - want).norm() / want.norm());
        checked += 1;
    }
    (worst < ORACLE_REL_TOL, format!("{checked} points, worst relative error {worst:.2e}"))
}

fn emptiness() -> (bool, String) {
    let w = make_window(1.0).unwrap();
    let q = |s: AnalyticSignal| StftEvaluator::quadrature(s, w, 1e-8).unwrap();
    let a = |s: AnalyticSignal| StftEvaluator::analytic(s, w).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let gauss_pol = ClassificationPolicy { lambda_max: 400.0, ..Default::default() };
    let gauss = global_membership_test(
        &a(AnalyticSignal::gaussian(1.0, 0.0, 0.0).unwrap()),
        AnisotropicIndex::new(1.0, 1.0).unwrap(),
        &gauss_pol,
    );
    let mut ok = gauss == Ok(true);
    let mut parts = vec![format!("gaussian {gauss:?}")];
    // The global sweep is coarse, so every run uses the map radius 0.05.
    let chirps: Vec<(&str, StftEvaluator, f64, f64, bool)> = vec![
        ("chirp-m2", a(AnalyticSignal::power_chirp(0.5, 2).unwrap()), 1.0, 1.0, true),
        ("chirp-m3", q(AnalyticSignal::power_chirp(1.0, 3).unwrap()), 1.0, 2.0, true),
        ("expchirp", q(AnalyticSignal::exp_chirp(one, 1.0, 3).unwrap()), 1.0, 2.0, true),
        ("modulus-chirp-axis", q(AnalyticSignal::modulus_chirp(1.0, 2.5).unwrap()), 1.0, 1.5, true),
        ("chirp-regime-45", q(AnalyticSignal::power_chirp(1.0, 4).unwrap()), 2.0, 1.5, true),
        // Its detected IN set may be empty, so this one is reported only.
        ("chirp-regime-44", q(AnalyticSignal::power_chirp(1.0, 3).unwrap()), 0.8, 2.5, false),
    ];
    for (name, ev, t, s, gated) in chirps {
        let pol = ClassificationPolicy { neighborhood_radius: 0.05, ..preset_policy(name).unwrap() };
        let r = global_membership_test(&ev, AnisotropicIndex::new(t, s).unwrap(), &pol);
        if gated {
            ok &= r == Ok(false);
            parts.push(format!("{name} {r:?}"));
        } else {
            parts.push(format!("{name} {r:?} (not gated)"));
        }
    }
    (ok, parts.join(", "))
}

fn core_invariants() -> (bool, String) {
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut fails: Vec<String> = Vec::new();

    // Round trip through the quasi-sphere decomposition.
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let idx = AnisotropicIndex::new(rng.random_range(0.3..3.0), rng.random_range(0.8..3.0)).unwrap();
        let z = PhasePoint::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let d = anisotropic_decompose(z, idx).unwrap();
        let back = anisotropic_scale(d.dir, d.lambda, idx).unwrap();
        worst = worst.max((back.x - z.x).hypot(back.xi - z.xi) / z.norm());
        worst = worst.max((d.dir.quasi_norm(idx) - 1.0).abs());
    }
    if worst > ROUND_TRIP_TOL {
        fails.push(format!("round trip {worst:.1e}"));
    }

    // Verdicts depend only on the direction: scaled points classify alike.
    let idx = AnisotropicIndex::new(1.0, 1.0).unwrap();
    let pol = ClassificationPolicy { lambda_max: 400.0, ..Default::default() };
    let w = make_window(1.0).unwrap();
    for sig in [AnalyticSignal::delta_derivative(0), AnalyticSignal::power_chirp(0.5, 2).unwrap()] {
        let ev = StftEvaluator::analytic(sig, w).unwrap();
        let pts = [PhasePoint::new(0.0, 1.0), PhasePoint::new(1.0, 1.0), PhasePoint::new(1.0, -0.4)];
        let dirs = |mu: f64| -> Vec<QuasiSphereDirection> {
            pts.iter().map(|p| anisotropic_decompose(PhasePoint::new(mu * p.x, mu * p.xi), idx).unwrap().dir).collect()
        };
        let a = classify_directions(&ev, idx, &dirs(1.0), &pol).unwrap().labels();
        let b = classify_directions(&ev, idx, &dirs(7.5), &pol).unwrap().labels();
        if a != b {
            fails.push(format!("scaling changed verdicts {a:?} vs {b:?}"));
        }
        if !a.contains(&Label::In) {
            fails.push("scaling check saw no IN direction".into());
        }
    }

    // Covariance, reflection and conjugation of V_φ.
    let base = AnalyticSignal::gaussian(0.8, 0.4, 1.1).unwrap();
    let ev = |s: AnalyticSignal| StftEvaluator::analytic(s, w).unwrap();
    let v = |e: &StftEvaluator, x: f64, xi: f64| stft_eval(e, PhasePoint::new(x, xi)).unwrap().value;
    let u = ev(base.clone());
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (x, xi) = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
        let (x0, xi0) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let shifted = ev(AnalyticSignal::shifted(x0, xi0, base.clone()));
        let want = Complex64::cis(-x0 * (xi - xi0)) * v(&u, x - x0, xi - xi0);
        worst = worst.max((v(&shifted, x, xi) - want).norm());
        let reflected = ev(dilate(&base, -1.0).unwrap());
        worst = worst.max((v(&reflected, x, xi) - v(&u, -x, -xi)).norm());
        let chirp = ev(AnalyticSignal::power_chirp(0.3, 2).unwrap());
        let conj = ev(AnalyticSignal::power_chirp(-0.3, 2).unwrap());
        worst = worst.max((v(&conj, x, xi) - v(&chirp, x, -xi).conj()).norm());
    }
    if worst > IDENTITY_TOL {
        fails.push(format!("STFT identities {worst:.1e}"));
    }

    // κ and Peetre pointwise bounds.
    for _ in 0..1000 {
        let (a, b, p): (f64, f64, f64) = (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0), rng.random_range(0.1..4.0));
        let lhs = (a + b).powf(p);
        if lhs > kappa(p).unwrap() * (a.powf(p) + b.powf(p)) * (1.0 + 1e-12) {
            fails.push(format!("kappa bound at ({a}, {b}, {p})"));
            break;
        }
        let x = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let y = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        if peetre_ratio(&x, &y) > PEETRE_BOUND * (1.0 + 1e-12) {
            fails.push(format!("Peetre bound at {x:?}, {y:?}"));
            break;
        }
    }

    // Weak-form Weyl residuals.
    let grid = UniformGrid::covering(-12.0, 12.0, 256).unwrap();
    let f = sample(&AnalyticSignal::gaussian(1.0, 0.0, 1.5).unwrap(), grid).unwrap();
    let g = sample(&AnalyticSignal::gaussian(1.3, 0.0, -0.5).unwrap(), grid).unwrap();
    let xi = AnalyticSignal::Polynomial { coeffs: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)] };
    let syms = [
        SymbolDescriptor::MultiplyBy(xi.clone()),
        SymbolDescriptor::FourierMultiplier(xi),
        SymbolDescriptor::SeparableProduct(
            AnalyticSignal::gaussian(3.0, 0.2, 0.0).unwrap(),
            AnalyticSignal::gaussian(2.0, 0.0, 0.0).unwrap(),
        ),
    ];
    let mut worst = 0.0f64;
    for s in &syms {
        worst = worst.max(weyl_weak_form_check(s, &f, &g).unwrap());
    }
    if worst > WEAK_FORM_TOL {
        fails.push(format!("weak form {worst:.1e}"));
    }

    (fails.is_empty(), if fails.is_empty() { "all invariants hold".into() } else { fails.join("; ") })
}

#[test]
fn acceptance() {
    let results = [
        criterion(1, "Peetre constant", 5, || presets(&["peetre"], 5)),
        criterion(2, "Moyal identity", 10, || presets(&["moyal"], 10)),
        criterion(3, "backend oracle", 30, backend_oracle),
        criterion(4, "axis patterns", 6 * MIN, || presets(&["delta-axis", "planewave-axis", "exponential-axis"], 2 * MIN)),
        criterion(5, "chirp curve", 10 * MIN, || presets(&["chirp-m2", "chirp-m3"], 5 * MIN)),
        criterion(6, "regime collapse", 10 * MIN, || presets(&["chirp-regime-44", "chirp-regime-45"], 5 * MIN)),
        criterion(7, "modulus chirp", 5 * MIN, || presets(&["modulus-chirp-axis"], 5 * MIN)),
        criterion(8, "invariances", 20 * MIN, || {
            presets(&["window-invariance", "shift-invariance", "fourier-swap", "dilation"], 5 * MIN)
        }),
        criterion(9, "microlocality", 10 * MIN, || presets(&["microlocal-expmult", "expchirp"], 5 * MIN)),
        criterion(10, "propagation", 10 * MIN, || presets(&["propagator-m3", "airy"], 5 * MIN)),
        criterion(11, "emptiness", MIN, emptiness),
        criterion(12, "core invariants", 5 * MIN, core_invariants),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
