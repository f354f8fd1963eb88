//! JSON problem specifications.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::maxent::{sample_sums, MaxEntProblem, Targets};
use crate::ratpoly::Rational;
use crate::toric::ConstraintMatrix;

/// One constraint function `t_i` with its optional target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSpec {
    pub name: String,
    pub values: Vec<i64>,
    pub target: Option<Rational>,
}

/// A validated problem file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    pub m: usize,
    pub constraints: Vec<ConstraintSpec>,
    pub samples: Option<Vec<usize>>,
    pub prior: Option<Vec<Rational>>,
}

/// The literal digits of a JSON number or string.
fn literal(v: &Value) -> std::result::Result<String, String> {
    match v {
        Value::String(s) => Ok(s.trim().to_string()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(format!("expected a number or a string, got {other}")),
    }
}

fn rational_at(v: &Value, path: &str) -> Result<Rational> {
    literal(v)
        .and_then(|lit| parse_rational(&lit))
        .map_err(|e| input(path, e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    #[serde(default)]
    name: Option<String>,
    values: Vec<Value>,
    #[serde(default)]
    target: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    m: usize,
    constraints: Vec<RawConstraint>,
    #[serde(default)]
    samples: Option<Vec<usize>>,
    #[serde(default)]
    prior: Option<Vec<Value>>,
}

/// Parses `a/b`, integers and decimals with optional exponent, exactly.
pub fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| format!("invalid numerator in `{s}`"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| format!("invalid denominator in `{s}`"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => {
            let e: i32 = s[k + 1..]
                .parse()
                .map_err(|_| format!("invalid exponent in `{s}`"))?;
            (&s[..k], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let valid = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !valid(int_part) || !valid(frac_part) {
        return Err(format!("`{s}` is not a number"));
    }
    if exp.unsigned_abs() > 1000 {
        return Err(format!("exponent out of range in `{s}`"));
    }
    let all: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .expect("validated digits");
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        Rational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

fn input(path: impl std::fmt::Display, msg: impl std::fmt::Display) -> Error {
    Error::Input(format!("{path}: {msg}"))
}

/// Reads and validates a problem document.
///
/// Targets must be given for every constraint or for none; samples and
/// targets exclude each other. A spec with neither still describes a model
/// family and is accepted for commands that only need the matrix.
pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    let raw: RawSpec =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("invalid problem: {e}")))?;
    if raw.m < 2 {
        return Err(input("m", "the alphabet needs at least 2 cells"));
    }
    if raw.constraints.is_empty() {
        return Err(input("constraints", "at least one constraint is required"));
    }
    let mut constraints = Vec::with_capacity(raw.constraints.len());
    for (i, c) in raw.constraints.iter().enumerate() {
        if c.values.len() != raw.m {
            return Err(input(
                format!("constraints[{i}].values"),
                format!("expected {} entries, got {}", raw.m, c.values.len()),
            ));
        }
        let values = c
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let path = format!("constraints[{i}].values[{j}]");
                let q = rational_at(v, &path)?;
                if !q.is_integer() {
                    return Err(input(
                        &path,
                        format!("integer-valued constraint required, got {v}"),
                    ));
                }
                i64::try_from(q.to_integer()).map_err(|_| input(&path, "value out of range"))
            })
            .collect::<Result<Vec<i64>>>()?;
        let target = c
            .target
            .as_ref()
            .map(|t| rational_at(t, &format!("constraints[{i}].target")))
            .transpose()?;
        constraints.push(ConstraintSpec {
            name: c.name.clone().unwrap_or_else(|| format!("t{}", i + 1)),
            values,
            target,
        });
    }
    let with_target = constraints.iter().filter(|c| c.target.is_some()).count();
    if with_target != 0 && with_target != constraints.len() {
        return Err(input(
            "constraints",
            "either every constraint has a target or none does",
        ));
    }
    if with_target != 0 && raw.samples.is_some() {
        return Err(input(
            "samples",
            "targets and samples are mutually exclusive",
        ));
    }
    if let Some(samples) = &raw.samples {
        if samples.is_empty() {
            return Err(input("samples", "at least one observation is required"));
        }
        if let Some((k, o)) = samples
            .iter()
            .enumerate()
            .find(|(_, &o)| o == 0 || o > raw.m)
        {
            return Err(input(
                format!("samples[{k}]"),
                format!("observation {o} outside 1..={}", raw.m),
            ));
        }
    }
    let prior = match &raw.prior {
        None => None,
        Some(p) => {
            if p.len() != raw.m {
                return Err(input(
                    "prior",
                    format!("expected {} entries, got {}", raw.m, p.len()),
                ));
            }
            let values = p
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let path = format!("prior[{j}]");
                    let q = rational_at(v, &path)?;
                    if !q.is_positive() {
                        return Err(input(&path, "must be strictly positive"));
                    }
                    Ok(q)
                })
                .collect::<Result<Vec<_>>>()?;
            Some(values)
        }
    };
    Ok(ProblemSpec {
        m: raw.m,
        constraints,
        samples: raw.samples,
        prior,
    })
}

impl ProblemSpec {
    pub fn matrix(&self) -> Result<ConstraintMatrix> {
        ConstraintMatrix::new(self.constraints.iter().map(|c| c.values.clone()).collect())
    }

    pub fn has_targets(&self) -> bool {
        self.samples.is_some() || self.constraints.iter().all(|c| c.target.is_some())
    }

    /// The estimation problem; fails when the spec has neither targets nor
    /// samples.
    pub fn to_problem(&self) -> Result<MaxEntProblem> {
        let a = self.matrix()?;
        let targets = match &self.samples {
            Some(obs) => Targets::Samples(sample_sums(obs, &a)?),
            None => Targets::Moments(
                self.constraints
                    .iter()
                    .map(|c| {
                        c.target.clone().ok_or_else(|| {
                            Error::Input("the problem needs targets or samples".into())
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        MaxEntProblem::new(a, targets, self.prior.clone())
    }

    /// The prior weights, or all ones.
    pub fn prior_or_ones(&self) -> Vec<Rational> {
        self.prior
            .clone()
            .unwrap_or_else(|| vec![Rational::one(); self.m])
    }
}
