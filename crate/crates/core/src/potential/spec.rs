use std::collections::BTreeMap;

use super::PairPotential;
use crate::error::{Error, Result};

const MAX_SPEC_LEN: usize = 4096;

/// Parses `kind=square_well sigma=0.1 epsilon=1 lambda=1.5` (entries split
/// on whitespace, commas or semicolons). Kinds: `zero` (or `ideal`),
/// `hard_rod`, `hard_sphere`, `square_well`, `gaussian` (`epsilon`,
/// `width`), `lennard_jones` (`epsilon`, `sigma`, optional `cutoff` and
/// `r_min`, defaulting to `2.5 sigma` and `0.8 sigma`). Any kind accepts
/// `stability_b` to override the declared constant.
pub fn parse_potential_spec(text: &str) -> Result<PairPotential> {
    if text.len() > MAX_SPEC_LEN {
        return Err(Error::parse(1, "potential description too long"));
    }
    let mut map = BTreeMap::new();
    for token in text.split(|c: char| c.is_whitespace() || c == ',' || c == ';') {
        if token.is_empty() {
            continue;
        }
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| Error::parse(1, format!("expected key=value, got `{token}`")))?;
        if map.insert(key.trim(), value.trim()).is_some() {
            return Err(Error::parse(1, format!("duplicate key `{key}`")));
        }
    }
    let kind = map.remove("kind").ok_or_else(|| Error::parse(1, "missing `kind`"))?;
    let mut take = |name: &'static str| -> Result<Option<f64>> {
        match map.remove(name) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::parse(1, format!("bad number for `{name}`: `{v}`"))),
        }
    };
    let b = take("stability_b")?;
    let potential = {
        let mut need = |name: &'static str| take(name)?.ok_or_else(|| Error::parse(1, format!("`{kind}` needs `{name}`")));
        match kind {
            "zero" | "ideal" => PairPotential::zero(),
            "hard_rod" | "hard_sphere" | "hard_core" => PairPotential::hard_core(need("sigma")?)?,
            "square_well" => {
                let sigma = need("sigma")?;
                let epsilon = need("epsilon")?;
                PairPotential::square_well(sigma, epsilon, need("lambda")?)?
            }
            "gaussian" => {
                let epsilon = need("epsilon")?;
                PairPotential::gaussian(epsilon, need("width")?)?
            }
            "lennard_jones" => {
                let epsilon = need("epsilon")?;
                let sigma = need("sigma")?;
                let cutoff = take("cutoff")?.unwrap_or(2.5 * sigma);
                let r_min = take("r_min")?.unwrap_or(0.8 * sigma);
                PairPotential::lennard_jones(epsilon, sigma, cutoff, r_min)?
            }
            other => return Err(Error::parse(1, format!("unknown potential kind `{other}`"))),
        }
    };
    if let Some(extra) = map.keys().next() {
        return Err(Error::parse(1, format!("unknown key `{extra}` for `{kind}`")));
    }
    match b {
        Some(b) => potential.with_stability_b(b),
        None => Ok(potential),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialKind;

    #[test]
    fn parses_each_kind() {
        assert!(parse_potential_spec("kind=ideal").unwrap().is_zero());
        let rod = parse_potential_spec("kind=hard_rod, sigma=0.1").unwrap();
        assert_eq!(rod.kind(), PotentialKind::HardCore { sigma: 0.1 });
        let sw = parse_potential_spec("kind=square_well sigma=0.1 epsilon=1 lambda=1.5").unwrap();
        assert!(sw.stability_b() > 0.0);
        let g = parse_potential_spec("kind=gaussian; epsilon=-0.1; width=1; stability_b=0.05").unwrap();
        assert_eq!(g.stability_b(), 0.05);
        let lj = parse_potential_spec("kind=lennard_jones epsilon=1 sigma=1").unwrap();
        assert_eq!(lj.range(), 2.5);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "sigma=1",
            "kind=hard_rod",
            "kind=hard_rod sigma=x",
            "kind=hard_rod sigma=1 sigma=2",
            "kind=hard_rod sigma=1 lambda=2",
            "kind=plasma",
            "kind=square_well sigma=1 epsilon=1 lambda=0.5",
            "kind=zero stability_b=-1",
            "kind zero",
        ] {
            assert!(parse_potential_spec(bad).is_err(), "{bad}");
        }
    }
}
