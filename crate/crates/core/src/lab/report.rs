use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// One `(p, M, seed)` run and what was measured on it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseRecord {
    pub case_id: String,
    pub p: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
    pub fitted_constant: Option<f64>,
    pub stability_factor: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CaseRecord {
    pub fn new(case_id: impl Into<String>, p: f64, m: usize, seed: u64) -> Self {
        Self {
            case_id: case_id.into(),
            p,
            m,
            seed,
            metrics: BTreeMap::new(),
            fitted_constant: None,
            stability_factor: None,
            pass: true,
            note: None,
        }
    }

    pub fn metric(mut self, name: &str, value: f64) -> Self {
        self.metrics.insert(name.to_owned(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }
}

/// A named check with its tolerance, stated in words.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub tolerance: String,
    pub value: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub cases: Vec<CaseRecord>,
    pub assertions: Vec<Assertion>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_owned(),
            cases: Vec::new(),
            assertions: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, tolerance: &str, value: f64, pass: bool) -> bool {
        self.assertions.push(Assertion {
            name: name.to_owned(),
            tolerance: tolerance.to_owned(),
            value,
            pass,
        });
        pass
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    /// Every assertion passed. Cases carry their own flags, which the assertions aggregate.
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `case_id,p,M,seed,fitted_constant,stability_factor,pass`
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["case_id", "p", "M", "seed", "fitted_constant", "stability_factor", "pass"])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for c in &self.cases {
            w.write_record([
                c.case_id.clone(),
                c.p.to_string(),
                c.m.to_string(),
                c.seed.to_string(),
                opt(c.fitted_constant),
                opt(c.stability_factor),
                c.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `<experiment>.json` and `<experiment>.csv` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.json", self.experiment)), self.to_json()?)?;
        self.write_csv(std::fs::File::create(dir.join(format!("{}.csv", self.experiment)))?)
    }
}

/// `max(a, b) / min(a, b)`, infinite when either side is zero or not finite.
pub fn stability_factor(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if lo > 0.0 && hi.is_finite() {
        hi / lo
    } else if lo == 0.0 && hi == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(sx, sy), (a, b)| (sx + a / n, sy + b / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(c, d), (a, b)| (c + (a - mx) * (b - my), d + (a - mx) * (a - mx)));
    sxy / sxx
}
