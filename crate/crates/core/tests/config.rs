use aniso_wf::config::*;
use aniso_wf::signal::AnalyticSignal;
use aniso_wf::Error;

fn line_of(text: &str) -> usize {
    match parse_config(text) {
        Err(Error::Config { line, .. }) => line,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn full_config() {
    let text = r#"
# chirp along the diagonal
signal.kind = "PowerChirp"
signal.c = 0.5   # half
signal.m = 2
signal.shift = [1.0, -2.0]
index.t = 2
index.s = 1.5
window.sigma = 0.5
backend.kind = "quadrature"
backend.tol = 1e-9
policy.lambda_max = 400
policy.lambda_count = 50
map.sweep = 32
decay.w = 0.25
decay.sigma_x = -1
"#;
    let cfg = parse_config(text).unwrap();
    let base = AnalyticSignal::power_chirp(0.5, 2).unwrap();
    assert_eq!(cfg.signal, AnalyticSignal::shifted(1.0, -2.0, base));
    assert_eq!((cfg.idx.t, cfg.idx.s), (2.0, 1.5));
    assert_eq!(cfg.window_sigma, 0.5);
    assert_eq!(cfg.backend, BackendChoice::Quadrature);
    assert_eq!(cfg.tol, 1e-9);
    assert_eq!((cfg.policy.lambda_max, cfg.policy.lambda_count), (400.0, 50));
    assert_eq!(cfg.policy.lambda_min, 1.0);
    assert_eq!(cfg.sweep, 32);
    assert_eq!(cfg.direction, Some((0.25, -1.0, 1.0)));
    let d = cfg.direction_dir(cfg.direction.unwrap()).unwrap();
    assert!(d.x0 < 0.0 && d.xi0 > 0.0);
    assert!(cfg.evaluator().is_ok());
}

#[test]
fn defaults_and_signal_kinds() {
    let cfg = parse_config("signal.kind = \"delta\"\n").unwrap();
    assert_eq!(cfg.signal, AnalyticSignal::delta_derivative(0));
    assert_eq!((cfg.idx.t, cfg.idx.s, cfg.sweep), (1.0, 1.0, 64));
    assert_eq!(cfg.backend, BackendChoice::Auto);
    assert_eq!(cfg.direction, None);
    for text in [
        "signal.kind = \"Gaussian\"\nsignal.sigma = 2",
        "signal.kind = \"exponential\"\nsignal.z = [0, 1]",
        "signal.kind = \"ExpChirp\"\nsignal.z = 1\nsignal.c = 1\nsignal.m = 3",
        "signal.kind = \"FreqChirp\"\nsignal.time = 0.5\nsignal.m = 3",
        "signal.kind = \"DeltaComb\"\nsignal.coeffs = [1, [0, 1]]",
        "signal.kind = \"polynomial\"\nsignal.coeffs = [1, 0, 1]",
        "signal.kind = \"ModulusChirp\"\nsignal.c = 1\nsignal.alpha = 2.5",
        "signal.kind = \"PlaneWave\"\nsignal.xi0 = 2",
        "signal.kind = \"airy\"",
    ] {
        parse_config(text).unwrap_or_else(|e| panic!("{text}: {e}"));
    }
}

#[test]
fn errors_carry_line_numbers() {
    assert_eq!(line_of("signal.kind = \"delta\"\n\nbogus line\n"), 3);
    assert_eq!(line_of("signal.kind = \"delta\"\nindex.t = nope\n"), 2);
    assert_eq!(line_of("signal.kind = \"delta\"\nwindow.sigma = 1\nwindow.sigma = 2\n"), 3);
    assert_eq!(line_of("signal.kind = \"delta\"\nmystery.key = 1\n"), 2);
    assert_eq!(line_of("signal.kind = \"wobble\"\n"), 1);
    assert_eq!(line_of("signal.kind = \"delta\"\nindex.t = 0.2\nindex.s = 0.3\n"), 2);
    assert_eq!(line_of("signal.kind = \"PowerChirp\"\nsignal.c = 1\nsignal.m = 1\n"), 1);
    assert_eq!(line_of("signal.kind = \"delta\"\nwindow.sigma = -1\n"), 2);
    assert_eq!(line_of("signal.kind = \"delta\"\ndecay.sigma_x = 1\n"), 2);
    // A `#` inside a string is not a comment.
    assert_eq!(line_of("signal.kind = \"de#lta\"\n"), 1);
}

#[test]
fn rejected_values() {
    let msg = |text: &str| match parse_config(text) {
        Err(Error::Config { msg, .. }) => msg,
        other => panic!("expected a config error, got {other:?}"),
    };
    assert!(msg("index.t = 1\n").contains("signal.kind"));
    assert!(msg("signal.kind = \"DeltaComb\"\nsignal.coeffs = []\n").contains("empty"));
    assert!(msg("signal.kind = \"delta\"\npolicy.lambda_count = 1\n").contains("lambda_count"));
    assert!(msg("signal.kind = \"delta\"\nwindow.sigma = 1\nwindow.sigma = 1\n").contains("duplicate"));
    assert!(msg("signal.kind = \"delta\"\nfoo.bar = 1\n").contains("unknown key"));
    assert!(msg("signal.kind = \"airy\"\nbackend.kind = \"analytic\"\n").contains("closed form"));
    assert!(msg("signal.kind = \"delta\"\nmap.sweep = 2\n").contains("map.sweep"));
}

#[test]
fn load_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "signal.kind = \"Gaussian\"\n").unwrap();
    assert!(load_config(&path).is_ok());
    assert!(matches!(load_config(&dir.path().join("missing.cfg")), Err(Error::Config { line: 0, .. })));
}
