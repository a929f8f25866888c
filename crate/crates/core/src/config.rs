//! Flat `section.key = value` run descriptions. Values are JSON literals; `#` starts a comment.
//!
//! ```text
//! signal.kind = "PowerChirp"
//! signal.c = 0.5
//! signal.m = 2
//! index.t = 1
//! index.s = 1
//! policy.lambda_max = 400
//! map.sweep = 64
//! ```

use crate::detector::ClassificationPolicy;
use crate::error::{Error, Result};
use crate::geometry::{AnisotropicIndex, QuasiSphereDirection};
use crate::signal::{make_window, AnalyticSignal, DeltaTerm};
use crate::stft::{has_closed_form, StftEvaluator};
use num_complex::Complex64;
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackendChoice {
    /// Closed form when available, quadrature otherwise.
    Auto,
    Analytic,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub signal: AnalyticSignal,
    pub idx: AnisotropicIndex,
    pub window_sigma: f64,
    pub backend: BackendChoice,
    pub tol: f64,
    pub policy: ClassificationPolicy,
    pub sweep: usize,
    /// Direction for `decay` as (w, σx, σξ), when given in the file.
    pub direction: Option<(f64, f64, f64)>,
}

impl RunConfig {
    pub fn evaluator(&self) -> Result<StftEvaluator> {
        let w = make_window(self.window_sigma)?;
        let analytic = match self.backend {
            BackendChoice::Auto => has_closed_form(&self.signal),
            BackendChoice::Analytic => true,
            BackendChoice::Quadrature => false,
        };
        if analytic {
            StftEvaluator::analytic(self.signal.clone(), w)
        } else {
            StftEvaluator::quadrature(self.signal.clone(), w, self.tol)
        }
    }

    pub fn direction_dir(&self, params: (f64, f64, f64)) -> Result<QuasiSphereDirection> {
        QuasiSphereDirection::from_params(params.0, params.1, params.2, self.idx)
    }
}

struct Entries {
    map: BTreeMap<String, (usize, Value)>,
    last_line: usize,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, Value)> {
        self.map.remove(key)
    }

    fn f64(&mut self, key: &str) -> Result<Option<(usize, f64)>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v.as_f64().map(|x| Some((line, x))).ok_or_else(|| err(line, format!("{key} must be a number"))),
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.map_or(default, |(_, x)| x))
    }

    fn req_f64(&mut self, key: &str) -> Result<f64> {
        self.f64(key)?.map(|(_, x)| x).ok_or_else(|| err(self.last_line, format!("missing {key}")))
    }

    fn uint(&mut self, key: &str) -> Result<Option<(usize, u64)>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v.as_u64().map(|x| Some((line, x))).ok_or_else(|| err(line, format!("{key} must be a non-negative integer"))),
        }
    }

    fn req_degree(&mut self, key: &str) -> Result<u32> {
        let (line, m) = self.uint(key)?.ok_or_else(|| err(self.last_line, format!("missing {key}")))?;
        u32::try_from(m).map_err(|_| err(line, format!("{key} is too large")))
    }

    fn complex(&mut self, key: &str) -> Result<Option<Complex64>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => parse_complex(&v).map(Some).ok_or_else(|| err(line, format!("{key} must be a number or [re, im]"))),
        }
    }

    fn complex_list(&mut self, key: &str) -> Result<Option<(usize, Vec<Complex64>)>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, Value::Array(items))) => {
                let vals = items.iter().map(parse_complex).collect::<Option<Vec<_>>>();
                vals.map(|v| Some((line, v))).ok_or_else(|| err(line, format!("{key} entries must be numbers or [re, im]")))
            }
            Some((line, _)) => Err(err(line, format!("{key} must be a list"))),
        }
    }
}

fn parse_complex(v: &Value) -> Option<Complex64> {
    match v {
        Value::Number(n) => Some(Complex64::new(n.as_f64()?, 0.0)),
        Value::Array(a) if a.len() == 2 => Some(Complex64::new(a[0].as_f64()?, a[1].as_f64()?)),
        _ => None,
    }
}

fn tokenize(text: &str) -> Result<Entries> {
    let mut map = BTreeMap::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| err(line, "expected `key = value`"))?;
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(err(line, format!("malformed key `{key}`")));
        }
        let value: Value = serde_json::from_str(value.trim()).map_err(|e| err(line, format!("value of {key}: {e}")))?;
        if map.insert(key.to_string(), (line, value)).is_some() {
            return Err(err(line, format!("duplicate key {key}")));
        }
    }
    Ok(Entries { map, last_line })
}

/// Drops a trailing `#` comment that is not inside a string literal.
fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    let mut escaped = false;
    for (i, ch) in line.char_indices() {
        if in_str {
            in_str = !(ch == '"' && !escaped);
            escaped = ch == '\\' && !escaped;
        } else if ch == '"' {
            in_str = true;
        } else if ch == '#' {
            return &line[..i];
        }
    }
    line
}

fn parse_signal(e: &mut Entries) -> Result<AnalyticSignal> {
    let (line, kind) = e.take("signal.kind").ok_or_else(|| err(e.last_line, "missing signal.kind"))?;
    let kind = kind.as_str().ok_or_else(|| err(line, "signal.kind must be a string"))?.to_ascii_lowercase();
    let at = |r: Result<AnalyticSignal>| r.map_err(|x| err(line, x.to_string()));
    let sig = match kind.as_str() {
        "powerchirp" => {
            let c = e.req_f64("signal.c")?;
            at(AnalyticSignal::power_chirp(c, e.req_degree("signal.m")?))?
        }
        "moduluschirp" => {
            let c = e.req_f64("signal.c")?;
            at(AnalyticSignal::modulus_chirp(c, e.req_f64("signal.alpha")?))?
        }
        "planewave" => AnalyticSignal::plane_wave(e.req_f64("signal.xi0")?),
        "exponential" => AnalyticSignal::exponential(e.complex("signal.z")?.ok_or_else(|| err(line, "missing signal.z"))?),
        "gaussian" => {
            let sigma = e.f64_or("signal.sigma", 1.0)?;
            let center = e.f64_or("signal.center", 0.0)?;
            at(AnalyticSignal::gaussian(sigma, center, e.f64_or("signal.modulation", 0.0)?))?
        }
        "delta" => {
            let k = e.uint("signal.order")?.map_or(0, |(_, k)| k);
            AnalyticSignal::delta_derivative(u32::try_from(k).map_err(|_| err(line, "signal.order is too large"))?)
        }
        "deltacomb" => {
            let (cl, coeffs) = e.complex_list("signal.coeffs")?.ok_or_else(|| err(line, "missing signal.coeffs"))?;
            // coeffs[k] multiplies D^k δ₀.
            if coeffs.is_empty() {
                return Err(err(cl, "signal.coeffs is empty"));
            }
            let terms = coeffs.into_iter().enumerate().map(|(k, c)| DeltaTerm { order: k as u32, coeff: c }).collect();
            AnalyticSignal::DeltaComb { terms }
        }
        "polynomial" => {
            let (_, coeffs) = e.complex_list("signal.coeffs")?.ok_or_else(|| err(line, "missing signal.coeffs"))?;
            AnalyticSignal::Polynomial { coeffs }
        }
        "expchirp" => {
            let z = e.complex("signal.z")?.ok_or_else(|| err(line, "missing signal.z"))?;
            let c = e.req_f64("signal.c")?;
            at(AnalyticSignal::exp_chirp(z, c, e.req_degree("signal.m")?))?
        }
        "freqchirp" => {
            let time = e.req_f64("signal.time")?;
            at(AnalyticSignal::freq_chirp(time, e.req_degree("signal.m")?))?
        }
        "airy" => AnalyticSignal::airy_fourier(),
        other => return Err(err(line, format!("unknown signal kind `{other}`"))),
    };
    let sig = match e.take("signal.shift") {
        None => sig,
        Some((l, v)) => match parse_complex(&v) {
            Some(z) if matches!(v, Value::Array(_)) => AnalyticSignal::shifted(z.re, z.im, sig),
            _ => return Err(err(l, "signal.shift must be [x0, xi0]")),
        },
    };
    sig.validate().map_err(|x| err(line, x.to_string()))?;
    Ok(sig)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut e = tokenize(text)?;
    let signal = parse_signal(&mut e)?;

    let t = e.f64("index.t")?;
    let s = e.f64("index.s")?;
    let idx_line = t.or(s).map_or(e.last_line, |(l, _)| l);
    let idx = AnisotropicIndex::new(t.map_or(1.0, |x| x.1), s.map_or(1.0, |x| x.1)).map_err(|x| err(idx_line, x.to_string()))?;

    let window_sigma = match e.f64("window.sigma")? {
        None => 1.0,
        Some((l, v)) if !(v > 0.0) => return Err(err(l, "window.sigma must be positive")),
        Some((_, v)) => v,
    };
    let backend = match e.take("backend.kind") {
        None => BackendChoice::Auto,
        Some((l, v)) => match v.as_str() {
            Some("auto") => BackendChoice::Auto,
            Some("analytic") => BackendChoice::Analytic,
            Some("quadrature") => BackendChoice::Quadrature,
            _ => return Err(err(l, "backend.kind must be \"auto\", \"analytic\" or \"quadrature\"")),
        },
    };
    if backend == BackendChoice::Analytic && !has_closed_form(&signal) {
        return Err(err(e.last_line, format!("no closed form for {}", signal.name())));
    }
    let tol = match e.f64("backend.tol")? {
        None => 1e-8,
        Some((l, v)) if !(v > 0.0) => return Err(err(l, "backend.tol must be positive")),
        Some((_, v)) => v,
    };

    let mut policy = ClassificationPolicy::default();
    let mut policy_line = None;
    for key in ["lambda_min", "lambda_max", "neighborhood_radius", "r_star", "stabilization_tol"] {
        if let Some((l, v)) = e.f64(&format!("policy.{key}"))? {
            policy_line.get_or_insert(l);
            match key {
                "lambda_min" => policy.lambda_min = v,
                "lambda_max" => policy.lambda_max = v,
                "neighborhood_radius" => policy.neighborhood_radius = v,
                "r_star" => policy.r_star = v,
                _ => policy.stabilization_tol = v,
            }
        }
    }
    for key in ["lambda_count", "neighborhood_samples", "monotone_window"] {
        if let Some((l, v)) = e.uint(&format!("policy.{key}"))? {
            policy_line.get_or_insert(l);
            let v = v as usize;
            match key {
                "lambda_count" => policy.lambda_count = v,
                "neighborhood_samples" => policy.neighborhood_samples = v,
                _ => policy.monotone_window = v,
            }
        }
    }
    policy.validate().map_err(|x| err(policy_line.unwrap_or(e.last_line), x.to_string()))?;

    let sweep = match e.uint("map.sweep")? {
        None => 64,
        Some((l, v)) if v < 4 => return Err(err(l, "map.sweep must be at least 4")),
        Some((_, v)) => v as usize,
    };
    let direction = match (e.f64("decay.w")?, e.f64("decay.sigma_x")?, e.f64("decay.sigma_xi")?) {
        (None, None, None) => None,
        (Some((l, w)), sx, sxi) => {
            let d = (w, sx.map_or(1.0, |x| x.1), sxi.map_or(1.0, |x| x.1));
            QuasiSphereDirection::from_params(d.0, d.1, d.2, idx).map_err(|x| err(l, x.to_string()))?;
            Some(d)
        }
        (None, Some((l, _)), _) | (None, None, Some((l, _))) => return Err(err(l, "decay.w is required with a direction")),
    };

    if let Some((key, (line, _))) = e.map.iter().next() {
        return Err(err(*line, format!("unknown key {key}")));
    }
    Ok(RunConfig { signal, idx, window_sigma, backend, tol, policy, sweep, direction })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| err(0, format!("{}: {e}", path.display())))?;
    parse_config(&text)
}
