//! Rendering of results as JSON or plain text.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::maxent::{FitResult, PolySystem};
use crate::ratpoly::{Polynomial, Rational};
use crate::toric::BinomialGenerators;

/// 17 significant digits in scientific notation; round-trips every `f64`.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// A JSON number carrying [`format_real`] digits; `null` when not finite.
pub fn real(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&format_real(x)).expect("valid JSON number"))
}

pub fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| real(x)).collect())
}

pub fn rationals(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(|q| Value::String(q.to_string())).collect())
}

fn polys(ps: &[Polynomial]) -> Value {
    Value::Array(ps.iter().map(|p| Value::String(p.to_string())).collect())
}

pub struct Object(Map<String, Value>);

impl Object {
    pub fn new() -> Self {
        Self(Map::new())
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }
}

impl Default for Object {
    fn default() -> Self {
        Self::new()
    }
}

pub fn fit_json(fit: &FitResult, moments: &[f64]) -> Value {
    let mut obj = Object::new()
        .with(
            "solver",
            serde_json::to_value(fit.solver).expect("plain enum"),
        )
        .with("iterations", fit.iterations)
        .with("residual", real(fit.residual))
        .with("log_z", real(fit.log_z))
        .with("xi", reals(&fit.xi))
        .with("p", reals(&fit.p))
        .with("moments", reals(moments));
    if let Some(t) = &fit.xi_tilde {
        obj = obj.with("xi_tilde", reals(t));
    }
    if let Some(p) = &fit.p_exact {
        obj = obj.with("p_exact", rationals(p));
    }
    obj.into_value()
}

pub fn fit_text(fit: &FitResult, moments: &[f64]) -> String {
    let join = |xs: &[f64]| {
        xs.iter()
            .map(|&x| format_real(x))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = format!(
        "solver: {}\niterations: {}\nresidual: {}\nlog_z: {}\nxi: {}\np: {}\nmoments: {}\n",
        serde_json::to_value(fit.solver)
            .expect("plain enum")
            .as_str()
            .expect("string tag"),
        fit.iterations,
        format_real(fit.residual),
        format_real(fit.log_z),
        join(&fit.xi),
        join(&fit.p),
        join(moments),
    );
    if let Some(t) = &fit.xi_tilde {
        out.push_str(&format!("xi_tilde: {}\n", join(t)));
    }
    if let Some(p) = &fit.p_exact {
        let s: Vec<String> = p.iter().map(|q| q.to_string()).collect();
        out.push_str(&format!("p_exact: {}\n", s.join(" ")));
    }
    out
}

pub fn system_json(s: &PolySystem) -> Value {
    let vars: Vec<Value> = s.vars().iter().map(|v| Value::String(v.clone())).collect();
    let mut obj = Object::new()
        .with(
            "provenance",
            serde_json::to_value(s.provenance()).expect("plain enum"),
        )
        .with("vars", vars)
        .with("equations", polys(s.equations()))
        .with("cleared", polys(s.cleared()));
    if let Some(psi) = s.objective() {
        obj = obj.with("objective", psi.to_string());
    }
    obj.into_value()
}

/// Cleared equations, one per line.
pub fn system_text(s: &PolySystem) -> String {
    lines(s.cleared())
}

pub fn ideal_json(g: &BinomialGenerators) -> Value {
    let vars: Vec<Value> = g.vars().iter().map(|v| Value::String(v.clone())).collect();
    Object::new()
        .with("vars", vars)
        .with("generators", polys(g.binomials()))
        .into_value()
}

pub fn ideal_text(g: &BinomialGenerators) -> String {
    lines(g.binomials())
}

fn lines(ps: &[Polynomial]) -> String {
    ps.iter().map(|p| format!("{p}\n")).collect()
}

pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}
