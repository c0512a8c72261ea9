use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maximal::RadiiSet;
use crate::nfunc::Exponent;
use crate::oscillation::{Modulus, ModulusFamily};
use crate::rearrange::YoungFunction;

/// Parameters shared by all experiments.
///
/// The text form is one `key = value` per line with `#` comments. Keys:
/// `p`, `M`, `N` (comma lists), `seed`, `seeds`, `r_min`, `r_max`, `theta`,
/// `radius`, `delta`, `modulus`, `young`, `stability`, `assert`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub p: Vec<f64>,
    #[serde(rename = "M")]
    pub m: Vec<usize>,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub seed: u64,
    pub seeds: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub theta: f64,
    /// The radius `R` of the localized estimates.
    pub radius: f64,
    pub delta: f64,
    pub modulus: Option<String>,
    pub young: String,
    pub stability: f64,
    pub assert: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            p: vec![1.5, 2.0, 3.0],
            m: vec![32, 64],
            n: vec![1],
            seed: 1,
            seeds: 5,
            r_min: 1.0 / 16.0,
            r_max: 0.25,
            theta: 0.5,
            radius: 0.125,
            delta: 0.5,
            modulus: None,
            young: "power:4".into(),
            stability: 2.0,
            assert: false,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key = value, found {content:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let real = |v: &str| v.trim().parse::<f64>().map_err(|_| bad(format!("{key}: not a number: {v:?}")));
            let count = |v: &str| v.trim().parse::<usize>().map_err(|_| bad(format!("{key}: not a count: {v:?}")));
            match key {
                "p" => cfg.p = value.split(',').map(real).collect::<Result<_>>()?,
                "M" | "m" => cfg.m = value.split(',').map(count).collect::<Result<_>>()?,
                "N" | "n" => cfg.n = value.split(',').map(count).collect::<Result<_>>()?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad(format!("seed: not an integer: {value:?}")))?,
                "seeds" => cfg.seeds = count(value)?,
                "r_min" => cfg.r_min = real(value)?,
                "r_max" => cfg.r_max = real(value)?,
                "theta" => cfg.theta = real(value)?,
                "radius" | "R" => cfg.radius = real(value)?,
                "delta" => cfg.delta = real(value)?,
                "modulus" => cfg.modulus = Some(value.to_owned()),
                "young" => cfg.young = value.to_owned(),
                "stability" => cfg.stability = real(value)?,
                "assert" => {
                    cfg.assert = value
                        .parse()
                        .map_err(|_| bad(format!("assert: expected true or false, found {value:?}")))?
                }
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidArgument(m));
        if self.p.is_empty() || self.m.is_empty() || self.n.is_empty() || self.seeds == 0 {
            return fail("config needs at least one p, one M, one N and one seed".into());
        }
        for &p in &self.p {
            Exponent::new(p)?;
        }
        if self.m.iter().any(|&m| m < 2) || self.n.contains(&0) {
            return fail(format!("grid sizes must be >= 2 and N >= 1, got M = {:?}, N = {:?}", self.m, self.n));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return fail(format!("theta must lie in (0, 1), got {}", self.theta));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.stability > 1.0) || !(self.radius > 0.0) {
            return fail("stability factor must exceed 1 and R must be positive".into());
        }
        RadiiSet::new(self.r_min, self.r_max, self.theta)?;
        if let Some(spec) = &self.modulus {
            parse_modulus(spec)?;
        }
        parse_young(&self.young)?;
        Ok(())
    }

    pub fn radii(&self) -> RadiiSet {
        RadiiSet::new(self.r_min, self.r_max, self.theta).expect("validated")
    }

    pub fn exponents(&self) -> Vec<Exponent> {
        self.p.iter().map(|&p| Exponent::new(p).expect("validated")).collect()
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|k| self.seed + k).collect()
    }

    /// Grid sizes with their refinement partner `2M`.
    pub fn refinement_pairs(&self) -> Vec<(usize, usize)> {
        self.m.iter().map(|&m| (m, 2 * m)).collect()
    }
}

fn numbers(spec: &str, params: &str) -> Result<Vec<f64>> {
    params
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number {s:?} in {spec:?}")))
        })
        .collect()
}

/// `family:params[@beta,c_omega]`, e.g. `power:0.5`, `log_inverse:2,10@0.2,3`,
/// `constant:1`, `dini_log:7.389`. Without a certificate, `beta` is the power
/// exponent (or 0.1) and `c_omega` is fitted.
pub fn parse_modulus(spec: &str) -> Result<Modulus> {
    let (body, cert) = match spec.split_once('@') {
        Some((b, c)) => (b, Some(numbers(spec, c)?)),
        None => (spec, None),
    };
    let (name, params) = body.split_once(':').unwrap_or((body, ""));
    let v = numbers(spec, params)?;
    let arity = |n: usize| {
        if v.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{name} takes {n} parameter(s) in {spec:?}")))
        }
    };
    let family = match name.trim() {
        "power" => {
            arity(1)?;
            ModulusFamily::Power(v[0])
        }
        "log_inverse" => {
            arity(2)?;
            ModulusFamily::LogInverse { sigma: v[0], scale: v[1] }
        }
        "constant" => {
            arity(1)?;
            ModulusFamily::Constant(v[0])
        }
        "dini_log" => {
            arity(1)?;
            ModulusFamily::DiniLog { scale: v[0] }
        }
        other => return Err(Error::InvalidArgument(format!("unknown modulus family {other:?}"))),
    };
    match cert.as_deref() {
        Some([beta, c]) => Modulus::new(family, *beta, *c, 1.0),
        Some(_) => Err(Error::InvalidArgument(format!("certificate needs beta,c_omega in {spec:?}"))),
        None => {
            let beta = match family {
                ModulusFamily::Power(b) => b,
                _ => 0.1,
            };
            Modulus::fitted(family, beta, 1.0)
        }
    }
}

/// `power:q`, `power:q,scale`, `exp:gamma,q` or `linf:q`.
pub fn parse_young(spec: &str) -> Result<YoungFunction> {
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    let v = numbers(spec, params)?;
    match (name.trim(), v.as_slice()) {
        ("power", [q]) => YoungFunction::power(*q),
        ("power", [q, s]) => YoungFunction::power_scaled(*q, *s),
        ("exp", [g, q]) => YoungFunction::exp_type(*g, *q),
        ("linf", [q]) => YoungFunction::linf_cap(*q),
        _ => Err(Error::InvalidArgument(format!("unrecognized Young function {spec:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_files() {
        let cfg = ExperimentConfig::parse(
            "# desk scale\np = 1.5, 2\nM = 16,32\nseed = 9\nseeds = 2\nmodulus = power:0.25\nyoung = exp:1,3\nassert = true\n",
        )
        .unwrap();
        assert_eq!(cfg.p, vec![1.5, 2.0]);
        assert_eq!(cfg.m, vec![16, 32]);
        assert_eq!(cfg.seed_list(), vec![9, 10]);
        assert!(cfg.assert);
        assert_eq!(parse_modulus("power:0.25").unwrap().beta, 0.25);
    }

    #[test]
    fn reports_bad_lines() {
        match ExperimentConfig::parse("p = 2\nM = 8\ntheta = x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(ExperimentConfig::parse("colour = red"), Err(Error::Parse { line: 1, .. })));
        assert!(ExperimentConfig::parse("theta = 1.5").is_err());
        assert!(ExperimentConfig::parse("p = ").is_err());
        assert!(parse_modulus("power:0.7@0.5,1").is_err());
        assert!(parse_young("cosh:1").is_err());
    }
}
