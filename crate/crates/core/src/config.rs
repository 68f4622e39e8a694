//! Run configuration: a flat `key = value` text with `[section]` headers,
//! overridable entry by entry, and the polymer-system file format.
//!
//! ```text
//! [system]
//! potential = kind=hard_rod sigma=0.1
//! dim = 1
//! side = 10
//! beta = 1
//! particles = 4
//!
//! [expansion]
//! n_max = 3
//! truncation = 8
//!
//! [integrals]
//! method = quadrature
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::expansion::{ExpansionParams, MAX_B_FACTOR_ORDER, MAX_CERTIFIED_PARTICLES, MAX_TRUNCATION};
use crate::integrals::{Integrator, Sampling, MAX_BETA_ORDER};
use crate::polymer::{Polymer, PolymerSystem, Weight};
use crate::potential::{parse_potential_spec, BoxGeometry, PairPotential};

const MAX_CONFIG_LEN: usize = 1 << 16;
const MAX_POLYMERS: usize = 64;

/// Parsed sections, each a map from key to `(value, line)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, (String, usize)>>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        if text.len() > MAX_CONFIG_LEN {
            return Err(Error::parse(1, "configuration too long"));
        }
        let mut config = Config::default();
        let mut section = String::from("global");
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::parse(line, "unterminated section header"))?
                    .trim();
                if !valid_name(name) {
                    return Err(Error::parse(line, format!("bad section name `{name}`")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::parse(line, format!("expected key = value, got `{body}`")))?;
            let key = key.trim();
            if !valid_name(key) {
                return Err(Error::parse(line, format!("bad key `{key}`")));
            }
            let entries = config.sections.entry(section.clone()).or_default();
            if entries.insert(key.to_string(), (value.trim().to_string(), line)).is_some() {
                return Err(Error::parse(line, format!("duplicate key `{section}.{key}`")));
            }
        }
        Ok(config)
    }

    /// Applies `section.key=value`, replacing any value from the file.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (path, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::invalid("--set", format!("expected section.key=value, got `{assignment}`")))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| Error::invalid("--set", format!("expected section.key, got `{path}`")))?;
        if !valid_name(section) || !valid_name(key) {
            return Err(Error::invalid("--set", format!("bad name `{path}`")));
        }
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), (value.trim().to_string(), 0));
        Ok(())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(|(v, _)| v.as_str())
    }

    fn field_error(&self, section: &str, key: &str, reason: impl Into<String>) -> Error {
        let line = self.sections.get(section).and_then(|s| s.get(key)).map_or(0, |e| e.1);
        let name = format!("{section}.{key}");
        if line > 0 {
            Error::invalid(name, format!("{} (line {line})", reason.into()))
        } else {
            Error::invalid(name, reason.into())
        }
    }

    pub fn parsed<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| self.field_error(section, key, format!("cannot parse `{v}`"))),
        }
    }

    pub fn required<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<T> {
        self.parsed(section, key)?
            .ok_or_else(|| self.field_error(section, key, "missing"))
    }

    /// Comma- or space-separated numbers.
    pub fn list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| self.field_error(section, key, format!("cannot parse `{t}`")))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    /// Keys present in `section`, for rejecting unknown ones.
    pub fn keys(&self, section: &str) -> Vec<&str> {
        self.sections
            .get(section)
            .map(|s| s.keys().map(String::as_str).collect())
            .unwrap_or_default()
    }

    pub fn sections(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str)
    }

    /// Rejects keys outside `known`.
    pub fn check_keys(&self, section: &str, known: &[&str]) -> Result<()> {
        for key in self.keys(section) {
            if !known.contains(&key) {
                return Err(self.field_error(section, key, "unknown key"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Config {
    /// Canonical text: sections and keys sorted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, entries) in &self.sections {
            writeln!(f, "[{name}]")?;
            for (k, (v, _)) in entries {
                writeln!(f, "{k} = {v}")?;
            }
        }
        Ok(())
    }
}

const SECTIONS: &[&str] = &["system", "expansion", "integrals", "virial", "kp", "validate"];
const SYSTEM_KEYS: &[&str] = &["potential", "dim", "side", "beta", "particles", "lattice_cutoff"];
const EXPANSION_KEYS: &[&str] = &["n_max", "truncation", "a", "c"];
const INTEGRAL_KEYS: &[&str] = &["method", "samples", "seed", "sampling"];
const VIRIAL_KEYS: &[&str] = &["orders", "rho", "domain_radius"];
const KP_KEYS: &[&str] = &["system", "a", "c", "delta", "truncation"];
const VALIDATE_KEYS: &[&str] = &["tolerance", "particles", "sides"];

/// The physical system: potential, box and temperature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemConfig {
    pub potential: PairPotential,
    pub dim: usize,
    pub side: Option<f64>,
    pub beta: f64,
    pub particles: usize,
    pub lattice_cutoff: usize,
}

impl SystemConfig {
    pub fn geometry(&self) -> Result<BoxGeometry> {
        let side = self.side.ok_or_else(|| Error::invalid("system.side", "missing"))?;
        BoxGeometry::new(self.dim, side)
    }
}

/// `a` and `c` fixed, or left to the search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionConfig {
    pub n_max: Option<usize>,
    pub truncation: usize,
    pub parameters: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VirialConfig {
    /// Largest `m` of `β_m`.
    pub orders: usize,
    pub rho: Vec<f64>,
    pub domain_radius: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KpConfig {
    /// Path of a polymer-system file.
    pub system: Option<String>,
    /// Uniform `a`, `c`; searched when absent.
    pub parameters: Option<(f64, f64)>,
    pub delta: Option<f64>,
    pub truncation: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidateConfig {
    pub tolerance: f64,
    /// Particle numbers audited against the reference.
    pub particles: Vec<usize>,
    /// Box sides of the thermodynamic-limit sweep.
    pub sides: Vec<f64>,
}

/// Every section, typed and checked.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub expansion: ExpansionConfig,
    pub integrator: Integrator,
    pub virial: VirialConfig,
    pub kp: KpConfig,
    pub validate: ValidateConfig,
}

impl RunConfig {
    pub fn from_config(config: &Config) -> Result<Self> {
        for section in config.sections() {
            if !SECTIONS.contains(&section) {
                return Err(Error::invalid(section.to_string(), "unknown section"));
            }
        }
        Ok(RunConfig {
            system: system_from_config(config)?,
            expansion: expansion_settings(config)?,
            integrator: integrator_from_config(config)?,
            virial: virial_from_config(config)?,
            kp: kp_from_config(config)?,
            validate: validate_from_config(config)?,
        })
    }

    /// Expansion parameters for the configured system; `n_max` defaults to
    /// `min(N - 1, 4)`.
    pub fn expansion_params(&self) -> Result<ExpansionParams> {
        let system = &self.system;
        let n_max = self
            .expansion
            .n_max
            .unwrap_or_else(|| system.particles.saturating_sub(1).clamp(1, 4));
        let params = ExpansionParams::new(system.particles, system.geometry()?, system.beta, n_max, self.expansion.truncation)?
            .with_lattice_cutoff(system.lattice_cutoff);
        match self.expansion.parameters {
            Some((a, c)) => params.with_parameters(a, c),
            None => Ok(params),
        }
    }
}

fn positive(config: &Config, section: &str, key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(config.field_error(section, key, format!("{v} must be finite and positive")))
    }
}

fn system_from_config(config: &Config) -> Result<SystemConfig> {
    config.check_keys("system", SYSTEM_KEYS)?;
    let spec = config.get("system", "potential").unwrap_or("kind=zero");
    let potential = parse_potential_spec(spec).map_err(|e| config.field_error("system", "potential", e.to_string()))?;
    let dim: usize = config.parsed("system", "dim")?.unwrap_or(1);
    if !(1..=3).contains(&dim) {
        return Err(config.field_error("system", "dim", "must be 1, 2 or 3"));
    }
    let side = match config.parsed::<f64>("system", "side")? {
        Some(v) => Some(positive(config, "system", "side", v)?),
        None => None,
    };
    let beta = positive(config, "system", "beta", config.parsed("system", "beta")?.unwrap_or(1.0))?;
    let particles: usize = config.parsed("system", "particles")?.unwrap_or(2);
    if particles == 0 {
        return Err(config.field_error("system", "particles", "must be at least 1"));
    }
    let system = SystemConfig {
        potential,
        dim,
        side,
        beta,
        particles,
        lattice_cutoff: config.parsed("system", "lattice_cutoff")?.unwrap_or(2),
    };
    if side.is_some() {
        system.geometry().map_err(|e| config.field_error("system", "side", e.to_string()))?;
    }
    Ok(system)
}

fn pair(config: &Config, section: &str) -> Result<Option<(f64, f64)>> {
    let a = config.get(section, "a").filter(|v| *v != "auto");
    let c = config.get(section, "c").filter(|v| *v != "auto");
    match (a, c) {
        (None, None) => Ok(None),
        (Some(_), Some(_)) => {
            let a = positive(config, section, "a", config.required(section, "a")?)?;
            let c = positive(config, section, "c", config.required(section, "c")?)?;
            Ok(Some((a, c)))
        }
        _ => Err(config.field_error(section, "c", "give both a and c, or neither")),
    }
}

fn expansion_settings(config: &Config) -> Result<ExpansionConfig> {
    config.check_keys("expansion", EXPANSION_KEYS)?;
    let n_max: Option<usize> = config.parsed("expansion", "n_max")?;
    if let Some(n) = n_max {
        if !(1..=MAX_B_FACTOR_ORDER).contains(&n) {
            return Err(config.field_error("expansion", "n_max", format!("must be in 1..={MAX_B_FACTOR_ORDER}")));
        }
    }
    let truncation: usize = config.parsed("expansion", "truncation")?.unwrap_or(MAX_TRUNCATION);
    if truncation < n_max.unwrap_or(1) + 1 || truncation > MAX_TRUNCATION {
        return Err(config.field_error(
            "expansion",
            "truncation",
            format!("must be in n_max+1..={MAX_TRUNCATION}"),
        ));
    }
    Ok(ExpansionConfig {
        n_max,
        truncation,
        parameters: pair(config, "expansion")?,
    })
}

/// Integrator settings; Monte Carlo requires an explicit seed.
pub fn integrator_from_config(config: &Config) -> Result<Integrator> {
    config.check_keys("integrals", INTEGRAL_KEYS)?;
    let method = config.get("integrals", "method").unwrap_or("quadrature");
    let mut integrator = match method {
        "quadrature" => Integrator::quadrature(),
        "monte-carlo" | "monte_carlo" | "mc" => {
            let seed: u64 = config
                .parsed("integrals", "seed")?
                .ok_or_else(|| config.field_error("integrals", "seed", "required for Monte Carlo"))?;
            let samples: u64 = config.parsed("integrals", "samples")?.unwrap_or(1 << 18);
            if samples < 2 {
                return Err(config.field_error("integrals", "samples", "need at least two samples"));
            }
            Integrator::monte_carlo(samples, seed)
        }
        other => return Err(config.field_error("integrals", "method", format!("unknown method `{other}`"))),
    };
    if let Some(seed) = config.parsed::<u64>("integrals", "seed")? {
        integrator = integrator.with_seed(seed);
    }
    if let Some(s) = config.get("integrals", "sampling") {
        let sampling = match s {
            "tree" => Sampling::Tree,
            "uniform" => Sampling::Uniform,
            other => return Err(config.field_error("integrals", "sampling", format!("unknown sampling `{other}`"))),
        };
        integrator = integrator.with_sampling(sampling);
    }
    Ok(integrator)
}

fn positive_list(config: &Config, section: &str, key: &str, default: &[f64]) -> Result<Vec<f64>> {
    let values = config.list(section, key)?.unwrap_or_else(|| default.to_vec());
    if values.is_empty() {
        return Err(config.field_error(section, key, "empty list"));
    }
    for &v in &values {
        positive(config, section, key, v)?;
    }
    Ok(values)
}

fn virial_from_config(config: &Config) -> Result<VirialConfig> {
    config.check_keys("virial", VIRIAL_KEYS)?;
    let orders: usize = config.parsed("virial", "orders")?.unwrap_or(2);
    if !(1..=MAX_BETA_ORDER).contains(&orders) {
        return Err(config.field_error("virial", "orders", format!("must be in 1..={MAX_BETA_ORDER}")));
    }
    let domain_radius = match config.parsed::<f64>("virial", "domain_radius")? {
        Some(v) => Some(positive(config, "virial", "domain_radius", v)?),
        None => None,
    };
    Ok(VirialConfig {
        orders,
        rho: positive_list(config, "virial", "rho", &[0.1, 0.2, 0.5, 1.0])?,
        domain_radius,
    })
}

fn kp_from_config(config: &Config) -> Result<KpConfig> {
    config.check_keys("kp", KP_KEYS)?;
    let delta = match config.parsed::<f64>("kp", "delta")? {
        Some(d) if d > 0.0 && d < 1.0 => Some(d),
        Some(_) => return Err(config.field_error("kp", "delta", "must be in (0, 1)")),
        None => None,
    };
    let truncation: usize = config.parsed("kp", "truncation")?.unwrap_or(MAX_TRUNCATION);
    if !(1..=MAX_TRUNCATION).contains(&truncation) {
        return Err(config.field_error("kp", "truncation", format!("must be in 1..={MAX_TRUNCATION}")));
    }
    Ok(KpConfig {
        system: config.get("kp", "system").map(str::to_string),
        parameters: pair(config, "kp")?,
        delta,
        truncation,
    })
}

fn validate_from_config(config: &Config) -> Result<ValidateConfig> {
    config.check_keys("validate", VALIDATE_KEYS)?;
    let tolerance = positive(config, "validate", "tolerance", config.parsed("validate", "tolerance")?.unwrap_or(1e-3))?;
    let particles = match config.list("validate", "particles")? {
        None => vec![3, 4, 5],
        Some(v) => v
            .iter()
            .map(|&x| {
                if x >= 1.0 && x.fract() == 0.0 && x <= MAX_CERTIFIED_PARTICLES as f64 {
                    Ok(x as usize)
                } else {
                    Err(config.field_error("validate", "particles", format!("{x} is not a particle number")))
                }
            })
            .collect::<Result<_>>()?,
    };
    Ok(ValidateConfig {
        tolerance,
        particles,
        sides: positive_list(config, "validate", "sides", &[5.0, 10.0, 20.0, 40.0])?,
    })
}

/// Parses a polymer system, one statement per line:
///
/// ```text
/// polymer a 1/40
/// polymer b -0.01 support 1 2
/// incompatible a b
/// ```
///
/// With `incompatible` lines the relation is exactly the listed pairs and
/// supports are not allowed; otherwise, if every polymer has a support,
/// polymers are incompatible when their supports meet; otherwise no two
/// distinct polymers are incompatible.
pub fn parse_polymer_system<W: Weight>(text: &str) -> Result<PolymerSystem<W>> {
    if text.len() > MAX_CONFIG_LEN {
        return Err(Error::parse(1, "polymer system too long"));
    }
    let mut polymers: Vec<Polymer<W>> = Vec::new();
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match tokens[0] {
            "polymer" => {
                if tokens.len() < 3 {
                    return Err(Error::parse(line, "expected `polymer <name> <weight>`"));
                }
                if polymers.len() == MAX_POLYMERS {
                    return Err(Error::parse(line, format!("more than {MAX_POLYMERS} polymers")));
                }
                let name = tokens[1];
                if !valid_name(name) {
                    return Err(Error::parse(line, format!("bad polymer name `{name}`")));
                }
                let weight = W::parse_weight(tokens[2]).map_err(|e| Error::parse(line, e.to_string()))?;
                let polymer = match tokens.get(3) {
                    None => Polymer::new(name, weight),
                    Some(&"support") => {
                        let labels = tokens[4..]
                            .iter()
                            .map(|t| {
                                t.parse::<u32>()
                                    .map_err(|_| Error::parse(line, format!("bad support label `{t}`")))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        if labels.is_empty() {
                            return Err(Error::parse(line, "empty support"));
                        }
                        Polymer::with_support(name, weight, labels)
                    }
                    Some(other) => return Err(Error::parse(line, format!("unexpected `{other}`"))),
                };
                polymers.push(polymer);
            }
            "incompatible" => {
                if tokens.len() != 3 {
                    return Err(Error::parse(line, "expected `incompatible <name> <name>`"));
                }
                pairs.push((tokens[1].to_string(), tokens[2].to_string()));
            }
            other => return Err(Error::parse(line, format!("unknown statement `{other}`"))),
        }
    }
    if polymers.is_empty() {
        return Err(Error::parse(1, "no polymers"));
    }
    let with_support = polymers.iter().filter(|p| p.support.is_some()).count();
    if !pairs.is_empty() {
        if with_support > 0 {
            return Err(Error::parse(1, "supports and explicit incompatibilities cannot be mixed"));
        }
        let named: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        PolymerSystem::from_named_pairs(polymers, &named)
    } else if with_support == polymers.len() {
        PolymerSystem::from_supports(polymers)
    } else if with_support == 0 {
        PolymerSystem::new(polymers, &[])
    } else {
        Err(Error::parse(1, "either every polymer has a support or none does"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::Convergence;
    use num_rational::BigRational;

    const SAMPLE: &str = "\
# acceptance run
[system]
potential = kind=hard_rod sigma=0.1
side = 10
particles = 4

[expansion]
n_max = 3
truncation = 8   # M
";

    #[test]
    fn parses_and_overrides() {
        let mut c = Config::parse(SAMPLE).unwrap();
        assert_eq!(c.get("system", "side"), Some("10"));
        assert_eq!(c.get("expansion", "truncation"), Some("8"));
        c.set("system.side=20").unwrap();
        let run = RunConfig::from_config(&c).unwrap();
        assert_eq!(run.system.side, Some(20.0));
        let p = run.expansion_params().unwrap();
        assert_eq!((p.n_max, p.max_norm), (3, 8));
        assert_eq!(p.convergence, Convergence::Search);
        let round = Config::parse(&c.to_string()).unwrap();
        assert_eq!(round.get("system", "side"), Some("20"));
    }

    #[test]
    fn errors_name_the_field() {
        let c = Config::parse("[system]\nside = ten\n").unwrap();
        let e = RunConfig::from_config(&c).unwrap_err().to_string();
        assert!(e.contains("system.side") && e.contains("line 2"), "{e}");
        assert!(Config::parse("[system\n").is_err());
        assert!(Config::parse("a = 1\na = 2\n").is_err());
        let mc = Config::parse("[integrals]\nmethod = monte-carlo\n").unwrap();
        assert!(integrator_from_config(&mc).unwrap_err().to_string().contains("integrals.seed"));
        let unknown = Config::parse("[expansion]\nm = 3\n").unwrap();
        assert!(RunConfig::from_config(&unknown).unwrap_err().to_string().contains("expansion.m"));
        let section = Config::parse("[sytem]\nside = 3\n").unwrap();
        assert!(RunConfig::from_config(&section).is_err());
        let half = Config::parse("[expansion]\na = 0.5\n").unwrap();
        assert!(RunConfig::from_config(&half).is_err());
        let no_side = RunConfig::from_config(&Config::default()).unwrap();
        assert!(no_side.expansion_params().unwrap_err().to_string().contains("system.side"));
    }

    #[test]
    fn polymer_files() {
        let s: PolymerSystem<BigRational> =
            parse_polymer_system("polymer a 1/40\npolymer b -0.01\nincompatible a b\n").unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.incompatible(0, 1));
        let t: PolymerSystem<f64> =
            parse_polymer_system("polymer x 0.1 support 1 2\npolymer y 0.1 support 2 3\npolymer z 0.1 support 4\n").unwrap();
        assert!(t.incompatible(0, 1) && !t.incompatible(0, 2));
        assert!(parse_polymer_system::<f64>("polymer a 1 support 1\nincompatible a a\n").is_err());
        assert!(parse_polymer_system::<f64>("").is_err());
        assert!(parse_polymer_system::<f64>("polymer a x\n").is_err());
    }
}
