//! Numerical results with their error estimate and provenance.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "quadrature" => Ok(Method::Quadrature),
            "monte-carlo" | "mc" => Ok(Method::MonteCarlo),
            other => Err(Error::invalid("method", format!("unknown method `{other}`"))),
        }
    }
}

/// A computed number: value, nonnegative error estimate (a standard error
/// for Monte Carlo, an embedded-rule difference for quadrature), the method,
/// how many nodes or samples were used, and the seed for random runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error: f64,
    pub method: Method,
    pub samples: u64,
    pub seed: Option<u64>,
}

impl IntegralResult {
    pub fn exact(value: f64) -> Self {
        IntegralResult {
            value,
            error: 0.0,
            method: Method::Exact,
            samples: 0,
            seed: None,
        }
    }

    pub fn quadrature(value: f64, error: f64, nodes: u64) -> Self {
        IntegralResult {
            value,
            error: error.abs(),
            method: Method::Quadrature,
            samples: nodes,
            seed: None,
        }
    }

    pub fn monte_carlo(value: f64, error: f64, samples: u64, seed: u64) -> Self {
        IntegralResult {
            value,
            error: error.abs(),
            method: Method::MonteCarlo,
            samples,
            seed: Some(seed),
        }
    }

    /// Same provenance, value and error multiplied by `s`.
    pub fn scaled(self, s: f64) -> Self {
        IntegralResult {
            value: self.value * s,
            error: self.error * s.abs(),
            ..self
        }
    }

    /// Sum of independent results; errors add linearly and the weakest
    /// method wins the label.
    pub fn combine(self, other: IntegralResult) -> Self {
        let method = match (self.method, other.method) {
            (Method::MonteCarlo, _) | (_, Method::MonteCarlo) => Method::MonteCarlo,
            (Method::Quadrature, _) | (_, Method::Quadrature) => Method::Quadrature,
            _ => Method::Exact,
        };
        IntegralResult {
            value: self.value + other.value,
            error: self.error + other.error,
            method,
            samples: self.samples + other.samples,
            seed: self.seed.or(other.seed),
        }
    }
}

impl fmt::Display for IntegralResult {
    /// One-line record: `value=... error=... method=... samples=... seed=...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "value={:e} error={:e} method={} samples={}",
            self.value, self.error, self.method, self.samples
        )?;
        match self.seed {
            Some(s) => write!(f, " seed={s}"),
            None => write!(f, " seed=none"),
        }
    }
}

impl FromStr for IntegralResult {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut value = None;
        let mut error = None;
        let mut method = None;
        let mut samples = None;
        let mut seed = None;
        for token in s.split_whitespace() {
            let (key, val) = token
                .split_once('=')
                .ok_or_else(|| Error::parse(1, format!("expected key=value, got `{token}`")))?;
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| Error::parse(1, format!("bad number for `{key}`: `{v}`")))
            };
            let slot_taken = || Error::parse(1, format!("duplicate key `{key}`"));
            match key {
                "value" => {
                    if value.replace(num(val)?).is_some() {
                        return Err(slot_taken());
                    }
                }
                "error" => {
                    if error.replace(num(val)?).is_some() {
                        return Err(slot_taken());
                    }
                }
                "method" => {
                    if method.replace(val.parse::<Method>()?).is_some() {
                        return Err(slot_taken());
                    }
                }
                "samples" => {
                    let n = val
                        .parse::<u64>()
                        .map_err(|_| Error::parse(1, format!("bad sample count `{val}`")))?;
                    if samples.replace(n).is_some() {
                        return Err(slot_taken());
                    }
                }
                "seed" => {
                    let s = match val {
                        "none" => None,
                        v => Some(v.parse::<u64>().map_err(|_| Error::parse(1, format!("bad seed `{v}`")))?),
                    };
                    if seed.replace(s).is_some() {
                        return Err(slot_taken());
                    }
                }
                other => return Err(Error::parse(1, format!("unknown key `{other}`"))),
            }
        }
        let missing = |k: &str| Error::parse(1, format!("missing `{k}`"));
        let result = IntegralResult {
            value: value.ok_or_else(|| missing("value"))?,
            error: error.ok_or_else(|| missing("error"))?,
            method: method.ok_or_else(|| missing("method"))?,
            samples: samples.ok_or_else(|| missing("samples"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
        };
        if !result.value.is_finite() || !(result.error >= 0.0) || !result.error.is_finite() {
            return Err(Error::parse(1, "value must be finite and error finite and nonnegative"));
        }
        if result.method == Method::MonteCarlo && result.seed.is_none() {
            return Err(Error::parse(1, "monte-carlo results need a seed"));
        }
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_round_trip() {
        for r in [
            IntegralResult::exact(-0.02),
            IntegralResult::quadrature(1.0 / 3.0, 1e-12, 40),
            IntegralResult::monte_carlo(-4.188, 0.01, 1 << 20, 7),
        ] {
            assert_eq!(r.to_string().parse::<IntegralResult>().unwrap(), r);
        }
    }

    #[test]
    fn malformed_records_are_rejected() {
        for bad in [
            "value=1",
            "value=1 error=-1 method=exact samples=0 seed=none",
            "value=1 error=0 method=monte-carlo samples=3 seed=none",
            "value=nan error=0 method=exact samples=0 seed=none",
            "value=1 value=2 error=0 method=exact samples=0 seed=none",
            "value=1 error=0 method=exact samples=0 seed=none extra=1",
        ] {
            assert!(bad.parse::<IntegralResult>().is_err(), "{bad}");
        }
    }
}
