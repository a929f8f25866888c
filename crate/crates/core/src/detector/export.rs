//! CSV and JSON renderings of maps and profiles; numbers use 17 significant digits.

use super::{DecayProfile, WavefrontMap};
use std::fmt::Write;

pub(crate) fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_num(v: f64) -> String {
    if v.is_finite() {
        num(v)
    } else {
        "null".into()
    }
}

impl WavefrontMap {
    /// Columns w, sigma_x, sigma_xi, label_code, terminal_rate.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("w,sigma_x,sigma_xi,label_code,terminal_rate\n");
        for e in &self.entries {
            let (w, sx, sxi) = e.dir.params(self.idx);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                num(w),
                num(sx),
                num(sxi),
                e.verdict.label.code(),
                num(e.verdict.fitted_terminal_rate)
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let p = &self.policy;
        let mut out = String::new();
        let _ = write!(out, "{{\"index\":{{\"t\":{},\"s\":{}}},", num(self.idx.t), num(self.idx.s));
        let _ = write!(
            out,
            "\"policy\":{{\"lambda_min\":{},\"lambda_max\":{},\"lambda_count\":{},\"neighborhood_radius\":{},\
             \"neighborhood_samples\":{},\"r_star\":{},\"monotone_window\":{},\"stabilization_tol\":{}}},",
            num(p.lambda_min),
            num(p.lambda_max),
            p.lambda_count,
            num(p.neighborhood_radius),
            p.neighborhood_samples,
            num(p.r_star),
            p.monotone_window,
            num(p.stabilization_tol)
        );
        out.push_str("\"entries\":[");
        for (i, e) in self.entries.iter().enumerate() {
            let (w, sx, sxi) = e.dir.params(self.idx);
            if i > 0 {
                out.push(',');
            }
            let _ = write!(
                out,
                "{{\"w\":{},\"sx\":{},\"sxi\":{},\"label\":\"{}\",\"rate\":{}}}",
                num(w),
                num(sx),
                num(sxi),
                e.verdict.label.as_str(),
                json_num(e.verdict.fitted_terminal_rate)
            );
        }
        out.push_str("]}\n");
        out
    }
}

impl DecayProfile {
    /// Columns lambda, M, R, floor.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,M,R,floor\n");
        for i in 0..self.lambdas.len() {
            let floor = u8::from(self.floor_hit_at == Some(i));
            let _ = writeln!(out, "{},{},{},{}", num(self.lambdas[i]), num(self.m[i]), num(self.rates[i]), floor);
        }
        out
    }
}
