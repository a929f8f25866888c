use aniso_wf::detector::{Label, MapEntry, Verdict, WavefrontMap};
use aniso_wf::geometry::{AnisotropicIndex, QuasiSphereDirection};
use aniso_wf::operators::*;
use aniso_wf::signal::*;
use aniso_wf::stft::StftMatrix;
use aniso_wf::Error;
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Independent oracle: (2π)^{−1/2}∫u(x)e^{−ixξ}dx by a plain Riemann sum over [−L, L].
fn fourier_oracle(u: &AnalyticSignal, xi: f64, l: f64) -> Complex64 {
    let n = 40_000;
    let h = 2.0 * l / n as f64;
    let mut s = c(0.0, 0.0);
    for k in 0..=n {
        let x = -l + k as f64 * h;
        s += eval_signal(u, x).unwrap() * Complex64::cis(-x * xi);
    }
    s * h / (2.0 * PI).sqrt()
}

#[test]
fn fourier_of_gaussians_matches_numerical_transform() {
    for g in [
        AnalyticSignal::gaussian(1.0, 0.0, 0.0).unwrap(),
        AnalyticSignal::gaussian(0.7, 1.3, -2.0).unwrap(),
        AnalyticSignal::shifted(0.5, 1.5, AnalyticSignal::gaussian(1.2, -0.4, 0.3).unwrap()),
    ] {
        let gh = apply_fourier(&g).unwrap();
        for xi in [-2.5, -0.3, 0.0, 1.1, 2.7] {
            let want = fourier_oracle(&g, xi, 20.0);
            let got = eval_signal(&gh, xi).unwrap();
            assert!((got - want).norm() < 1e-12, "{g:?} at {xi}: {got} vs {want}");
        }
    }
}

#[test]
fn unit_gaussian_is_self_dual() {
    let g = AnalyticSignal::gaussian(1.0, 0.0, 0.0).unwrap();
    let gh = apply_fourier(&g).unwrap();
    for x in [-1.0, 0.0, 0.5, 2.0] {
        assert!((eval_signal(&gh, x).unwrap() - eval_signal(&g, x).unwrap()).norm() < 1e-15);
    }
}

#[test]
fn quadratic_chirp_transform() {
    let u = AnalyticSignal::power_chirp(0.5, 2).unwrap();
    let uh = apply_fourier(&u).unwrap();
    match &uh {
        AnalyticSignal::Scaled { factor, inner } => {
            assert!((factor - Complex64::cis(PI / 4.0)).norm() < 1e-15);
            assert_eq!(**inner, AnalyticSignal::power_chirp(-0.5, 2).unwrap());
        }
        other => panic!("unexpected {other:?}"),
    }
    // Damped oracle: the transform of e^{icx²}e^{−εx²} tends to the chirp transform as ε → 0;
    // instead compare through a Gaussian-weighted pairing, which is exact for both sides.
    let w = AnalyticSignal::gaussian(1.0, 0.3, 0.0).unwrap();
    let wh = apply_fourier(&w).unwrap();
    // Parseval: (u, ŵ conj-free form) ∫u(x) w(x) dx = ∫û(ξ) ŵ(−ξ) dξ.
    let l = 30.0;
    let n = 200_000;
    let h = 2.0 * l / n as f64;
    let (mut lhs, mut rhs) = (c(0.0, 0.0), c(0.0, 0.0));
    for k in 0..=n {
        let x = -l + k as f64 * h;
        lhs += eval_signal(&u, x).unwrap() * eval_signal(&w, x).unwrap();
        rhs += eval_signal(&uh, x).unwrap() * eval_signal(&wh, -x).unwrap();
    }
    assert!((lhs - rhs).norm() * h < 1e-9, "{} vs {}", lhs * h, rhs * h);
}

#[test]
fn delta_and_polynomial_transforms() {
    let d = apply_fourier(&AnalyticSignal::delta_derivative(0)).unwrap();
    assert_eq!(d, AnalyticSignal::Polynomial { coeffs: vec![c(INV_SQRT_2PI, 0.0)] });
    let d2 = apply_fourier(&AnalyticSignal::delta_derivative(2)).unwrap();
    assert!((eval_signal(&d2, 3.0).unwrap() - c(9.0 * INV_SQRT_2PI, 0.0)).norm() < 1e-15);
    // F F⁻¹ round trip through the polynomial and back to D^1 δ with the reflection sign.
    let back = apply_fourier(&apply_fourier(&AnalyticSignal::delta_derivative(1)).unwrap()).unwrap();
    match back {
        AnalyticSignal::DeltaComb { terms } => {
            assert_eq!(terms.len(), 1);
            assert_eq!(terms[0].order, 1);
            assert!((terms[0].coeff - c(-1.0, 0.0)).norm() < 1e-15);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        apply_fourier(&AnalyticSignal::power_chirp(1.0, 3).unwrap()),
        Err(Error::NoClosedForm(_))
    ));
}

#[test]
fn pointwise_factor_rewrites() {
    let chirp = AnalyticSignal::power_chirp(1.0, 3).unwrap();
    let e1 = AnalyticSignal::exponential(c(1.0, 0.0));
    assert_eq!(apply_pointwise_factor(&chirp, &e1).unwrap(), AnalyticSignal::exp_chirp(c(1.0, 0.0), 1.0, 3).unwrap());
    assert_eq!(
        apply_pointwise_factor(&AnalyticSignal::plane_wave(1.5), &AnalyticSignal::plane_wave(-0.25)).unwrap(),
        AnalyticSignal::Exponential { z: c(0.0, 1.25) }
    );
    let g = AnalyticSignal::gaussian(0.8, 0.2, 1.0).unwrap();
    assert_eq!(apply_pointwise_factor(&g, &AnalyticSignal::exponential(c(0.0, 0.0))).unwrap(), g);

    // Every rewrite agrees with the pointwise product.
    let cases = [
        (chirp.clone(), e1.clone()),
        (g.clone(), AnalyticSignal::exponential(c(0.7, -0.4))),
        (AnalyticSignal::plane_wave(2.0), AnalyticSignal::power_chirp(0.5, 2).unwrap()),
        (AnalyticSignal::plane_wave(2.0), AnalyticSignal::power_chirp(0.5, 3).unwrap()),
        (AnalyticSignal::power_chirp(0.5, 2).unwrap(), AnalyticSignal::power_chirp(-0.25, 2).unwrap()),
    ];
    for (u, f) in cases {
        let p = apply_pointwise_factor(&u, &f).unwrap();
        for x in [-1.7, -0.2, 0.0, 0.9, 2.4] {
            let want = eval_signal(&u, x).unwrap() * eval_signal(&f, x).unwrap();
            let got = eval_signal(&p, x).unwrap();
            assert!((got - want).norm() < 1e-12 * want.norm().max(1.0), "{u:?}·{f:?} at {x}");
        }
    }
    assert!(matches!(
        apply_pointwise_factor(&AnalyticSignal::delta_derivative(0), &e1),
        Err(Error::NotRepresentable(_))
    ));
}

#[test]
fn dilation_matches_definition() {
    let a = -1.7;
    for u in [
        AnalyticSignal::gaussian(0.9, 0.4, 1.1).unwrap(),
        AnalyticSignal::power_chirp(0.5, 2).unwrap(),
        AnalyticSignal::power_chirp(1.0, 3).unwrap(),
        AnalyticSignal::exp_chirp(c(0.3, 0.2), 1.0, 3).unwrap(),
        AnalyticSignal::shifted(0.7, -1.2, AnalyticSignal::plane_wave(0.4)),
        AnalyticSignal::Polynomial { coeffs: vec![c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.0)] },
    ] {
        let ua = dilate(&u, a).unwrap();
        for x in [-1.3, 0.0, 0.6, 2.2] {
            let want = eval_signal(&u, a * x).unwrap() * a.abs().sqrt();
            let got = eval_signal(&ua, x).unwrap();
            assert!((got - want).norm() < 1e-12 * want.norm().max(1.0), "{u:?} at {x}: {got} vs {want}");
        }
    }
}

#[test]
fn propagator_spectra() {
    let w = propagate_power(3, 1.0).unwrap();
    let v = eval_signal(&w, 1.5).unwrap();
    assert!((v - Complex64::from_polar(INV_SQRT_2PI, -(1.5f64).powi(3))).norm() < 1e-15);
    let w0 = propagate_power(4, 0.0).unwrap();
    for x in [-3.0, 0.0, 2.0] {
        assert!((eval_signal(&w0, x).unwrap() - c(INV_SQRT_2PI, 0.0)).norm() < 1e-15);
    }
    let w2 = propagate_power(2, 1.0).unwrap();
    assert!(aniso_wf::stft::has_closed_form(&w2));
}

fn entry(x0: f64, xi0: f64, label: Label) -> MapEntry {
    MapEntry {
        dir: QuasiSphereDirection { x0, xi0 },
        verdict: Verdict { label, fitted_terminal_rate: 0.0, confidence_notes: String::new() },
    }
}

#[test]
fn map_transforms() {
    let idx = AnisotropicIndex::new(1.0, 1.0).unwrap();
    let m = WavefrontMap { idx, policy: Default::default(), entries: vec![entry(0.5, 0.5, Label::In)] };
    let j = map_transform(&m, MapTransform::SwapJ).unwrap();
    assert!((j.entries[0].dir.x0 - 0.5).abs() < 1e-15 && (j.entries[0].dir.xi0 + 0.5).abs() < 1e-15);
    let ji = map_transform(&j, MapTransform::SwapJInverse).unwrap();
    assert!(ji.entries[0].dir.distance(m.entries[0].dir) < 1e-15);
    assert_eq!(map_transform(&m, MapTransform::Identity).unwrap(), m);

    let axis = WavefrontMap { idx, policy: Default::default(), entries: vec![entry(0.0, 1.0, Label::In)] };
    let d = map_transform(&axis, MapTransform::Dilate(2.0)).unwrap();
    assert_eq!(d.entries[0].dir, QuasiSphereDirection { x0: 0.0, xi0: 1.0 });

    let aniso = AnisotropicIndex::new(1.0, 2.0).unwrap();
    let m2 = WavefrontMap { idx: aniso, policy: Default::default(), entries: vec![entry(0.5, 0.25, Label::Out)] };
    let j2 = map_transform(&m2, MapTransform::SwapJ).unwrap();
    assert_eq!(j2.idx, aniso.swapped());
    assert!((j2.entries[0].dir.quasi_norm(j2.idx) - 1.0).abs() < 1e-12);
    assert_eq!(j2.entries[0].verdict.label, Label::Out);
}

fn gaussian_samples(n: usize, sigma: f64, modulation: f64) -> SampledSignal {
    let grid = UniformGrid::covering(-12.0, 12.0, n).unwrap();
    sample(&AnalyticSignal::gaussian(sigma, 0.0, modulation).unwrap(), grid).unwrap()
}

#[test]
fn weyl_multiplication_and_multiplier_paths() {
    let f = gaussian_samples(256, 1.0, 0.0);
    let id = weyl_apply(&SymbolDescriptor::MultiplyBy(AnalyticSignal::plane_wave(0.0)), &f).unwrap();
    assert_eq!(id.values, f.values);

    let ex = weyl_apply(&SymbolDescriptor::MultiplyBy(AnalyticSignal::exponential(c(1.0, 0.0))), &f).unwrap();
    for (k, v) in ex.values.iter().enumerate() {
        let x = f.grid.point(k);
        assert!((v - f.values[k] * x.exp()).norm() < 1e-12);
    }

    // A plane wave completing whole periods on the grid is an eigenfunction of D.
    let n = 128;
    let h = 0.1;
    let omega = 2.0 * PI * 5.0 / (n as f64 * h);
    let pw = sample(&AnalyticSignal::plane_wave(omega), UniformGrid::new(0.0, h, n).unwrap()).unwrap();
    let xi = AnalyticSignal::Polynomial { coeffs: vec![c(0.0, 0.0), c(1.0, 0.0)] };
    let d = weyl_apply(&SymbolDescriptor::FourierMultiplier(xi), &pw).unwrap();
    for (a, b) in d.values.iter().zip(&pw.values) {
        assert!((a - b * omega).norm() < 1e-10);
    }
}

#[test]
fn dense_path_reduces_to_the_exact_paths() {
    let f = gaussian_samples(128, 1.0, 0.5);
    let one = AnalyticSignal::plane_wave(0.0);
    let xi = AnalyticSignal::Polynomial { coeffs: vec![c(0.0, 0.0), c(1.0, 0.0)] };
    let ex = AnalyticSignal::exponential(c(0.3, 0.0));
    let sep = weyl_apply(&SymbolDescriptor::SeparableProduct(one.clone(), xi.clone()), &f).unwrap();
    let mult = weyl_apply(&SymbolDescriptor::FourierMultiplier(xi), &f).unwrap();
    for (a, b) in sep.values.iter().zip(&mult.values) {
        assert!((a - b).norm() < 1e-12);
    }
    let sep = weyl_apply(&SymbolDescriptor::SeparableProduct(ex.clone(), one), &f).unwrap();
    let mult = weyl_apply(&SymbolDescriptor::MultiplyBy(ex), &f).unwrap();
    for (a, b) in sep.values.iter().zip(&mult.values) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn dense_grid_symbol_matches_separable_symbol() {
    let f = gaussian_samples(128, 1.0, 0.0);
    let a = AnalyticSignal::gaussian(2.0, 0.5, 0.0).unwrap();
    let b = AnalyticSignal::Polynomial { coeffs: vec![c(1.0, 0.0), c(0.0, 0.0), c(0.1, 0.0)] };
    let w = aniso_wf::stft::cross_wigner(&f, &f).unwrap();
    let mut values = Vec::with_capacity(128 * 128);
    for j in 0..128 {
        for l in 0..128 {
            values.push(eval_signal(&a, w.x_grid.point(j)).unwrap() * eval_signal(&b, w.xi_grid.point(l)).unwrap());
        }
    }
    let dense = StftMatrix { x_grid: w.x_grid, xi_grid: w.xi_grid, values };
    let sd = weyl_apply(&SymbolDescriptor::DenseGrid(dense), &f).unwrap();
    let ss = weyl_apply(&SymbolDescriptor::SeparableProduct(a, b), &f).unwrap();
    // Odd midpoints are interpolated on the dense path.
    let err = sd.values.iter().zip(&ss.values).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    assert!(err < 1e-4, "{err}");
}

#[test]
fn weak_form_residuals() {
    let f = gaussian_samples(256, 1.0, 0.0);
    let one = SymbolDescriptor::MultiplyBy(AnalyticSignal::plane_wave(0.0));
    assert!(weyl_weak_form_check(&one, &f, &f).unwrap() < 1e-8);
    let x = SymbolDescriptor::MultiplyBy(AnalyticSignal::Polynomial { coeffs: vec![c(0.0, 0.0), c(1.0, 0.0)] });
    assert!(weyl_weak_form_check(&x, &f, &f).unwrap() < 1e-8);
    let fm = gaussian_samples(256, 1.0, 1.5);
    let xi = SymbolDescriptor::FourierMultiplier(AnalyticSignal::Polynomial { coeffs: vec![c(0.0, 0.0), c(1.0, 0.0)] });
    assert!(weyl_weak_form_check(&xi, &fm, &fm).unwrap() < 1e-6);
    let g = gaussian_samples(256, 1.3, -0.5);
    let sep = SymbolDescriptor::SeparableProduct(
        AnalyticSignal::gaussian(3.0, 0.2, 0.0).unwrap(),
        AnalyticSignal::gaussian(2.0, 0.0, 0.0).unwrap(),
    );
    assert!(weyl_weak_form_check(&sep, &fm, &g).unwrap() < 1e-6);
}

#[test]
fn dense_limit_and_grid_checks() {
    let big = SampledSignal::new(UniformGrid::new(0.0, 0.01, DENSE_LIMIT + 1).unwrap(), vec![c(0.0, 0.0); DENSE_LIMIT + 1]).unwrap();
    let sym = SymbolDescriptor::SeparableProduct(AnalyticSignal::plane_wave(0.0), AnalyticSignal::plane_wave(0.0));
    assert_eq!(weyl_apply(&sym, &big), Err(Error::GridTooLarge(DENSE_LIMIT + 1)));
    let f = gaussian_samples(64, 1.0, 0.0);
    let g = gaussian_samples(128, 1.0, 0.0);
    let one = SymbolDescriptor::MultiplyBy(AnalyticSignal::plane_wave(0.0));
    assert_eq!(weyl_weak_form_check(&one, &f, &g), Err(Error::GridMismatch));
    // A chirp sampled too coarsely aliases to the Nyquist band.
    let coarse = sample(&AnalyticSignal::power_chirp(4.0, 2).unwrap(), UniformGrid::covering(-6.0, 6.0, 64).unwrap()).unwrap();
    let xi = SymbolDescriptor::FourierMultiplier(AnalyticSignal::plane_wave(0.0));
    assert!(matches!(weyl_apply(&xi, &coarse), Err(Error::UnderResolved(_))));
}
