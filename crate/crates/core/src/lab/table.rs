use std::fmt;
use std::io::Write;
use std::str::FromStr;

use super::{parse_modulus, parse_young};
use crate::error::{Error, Result};
use crate::mesh::{ElemField, Mesh};
use crate::oscillation::{self, BallFamily, Modulus};
use crate::rearrange::{self, YoungFunction};

/// One requested norm or seminorm of a field.
///
/// Textual forms: `lebesgue:q` (`q` may be `inf`), `lorentz:q,r`, `orlicz:<young>`,
/// `marcinkiewicz:a` with `eta(s) = s^a`, `bmo:q`, `campanato:q:<modulus>`,
/// `holder:<modulus>` and `vmo:q`.
#[derive(Clone, Debug)]
pub enum NormSpec {
    Lebesgue(f64),
    Lorentz(f64, f64),
    Orlicz(String, YoungFunction),
    Marcinkiewicz(f64),
    Bmo(f64),
    Campanato(f64, String, Modulus),
    Holder(String, Modulus),
    Vmo(f64),
}

fn number(spec: &str, s: &str) -> Result<f64> {
    let s = s.trim();
    if s == "inf" {
        return Ok(f64::INFINITY);
    }
    s.parse()
        .map_err(|_| Error::InvalidArgument(format!("bad number `{s}` in norm spec `{spec}`")))
}

impl FromStr for NormSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let rest = rest.trim();
        Ok(match name.trim() {
            "lebesgue" => Self::Lebesgue(number(spec, rest)?),
            "lorentz" => {
                let (q, r) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidArgument(format!("`{spec}` needs q,r")))?;
                Self::Lorentz(number(spec, q)?, number(spec, r)?)
            }
            "orlicz" => Self::Orlicz(rest.to_owned(), parse_young(rest)?),
            "marcinkiewicz" => Self::Marcinkiewicz(number(spec, rest)?),
            "bmo" => Self::Bmo(number(spec, rest)?),
            "campanato" => {
                let (q, m) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidArgument(format!("`{spec}` needs q:<modulus>")))?;
                Self::Campanato(number(spec, q)?, m.to_owned(), parse_modulus(m)?)
            }
            "holder" => Self::Holder(rest.to_owned(), parse_modulus(rest)?),
            "vmo" => Self::Vmo(number(spec, rest)?),
            other => return Err(Error::InvalidArgument(format!("unknown norm `{other}` in `{spec}`"))),
        })
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lebesgue(q) => write!(f, "lebesgue:{q}"),
            Self::Lorentz(q, r) => write!(f, "lorentz:{q},{r}"),
            Self::Orlicz(s, _) => write!(f, "orlicz:{s}"),
            Self::Marcinkiewicz(a) => write!(f, "marcinkiewicz:{a}"),
            Self::Bmo(q) => write!(f, "bmo:{q}"),
            Self::Campanato(q, s, _) => write!(f, "campanato:{q}:{s}"),
            Self::Holder(s, _) => write!(f, "holder:{s}"),
            Self::Vmo(q) => write!(f, "vmo:{q}"),
        }
    }
}

impl NormSpec {
    /// Whether the value depends only on the distribution of `|f|`.
    pub fn is_rearrangement_invariant(&self) -> bool {
        matches!(self, Self::Lebesgue(_) | Self::Lorentz(..) | Self::Orlicz(..) | Self::Marcinkiewicz(_))
    }
}

/// Specs used when none are requested.
pub fn default_specs() -> Vec<NormSpec> {
    ["lebesgue:1", "lebesgue:2", "lebesgue:inf", "lorentz:2,1", "orlicz:power:2", "marcinkiewicz:0.5", "bmo:1", "campanato:1:power:0.5", "holder:power:0.5", "vmo:1"]
        .iter()
        .map(|s| s.parse().expect("valid default"))
        .collect()
}

/// A row of the norm table.
#[derive(Clone, Debug, PartialEq)]
pub struct NormRow {
    pub norm: String,
    pub parameter: String,
    pub value: f64,
}

/// Every requested quantity of `field`. Rearrangement-invariant norms act on the
/// pointwise Frobenius norm; a VMO spec contributes one row per radius.
pub fn norm_table(mesh: &Mesh, field: &ElemField, specs: &[NormSpec]) -> Result<Vec<NormRow>> {
    let sf = rearrange::rearrange(mesh, &field.norms())?;
    let family = BallFamily::standard(mesh);
    let mut rows = Vec::new();
    for spec in specs {
        let text = spec.to_string();
        let (norm, parameter) = text.split_once(':').map(|(a, b)| (a.to_owned(), b.to_owned())).unwrap_or_default();
        let mut row = |value: f64, parameter: String| rows.push(NormRow { norm: norm.clone(), parameter, value });
        match spec {
            NormSpec::Lebesgue(q) => row(sf.lebesgue_norm(*q)?, parameter),
            NormSpec::Lorentz(q, r) => row(sf.lorentz_norm(*q, *r)?, parameter),
            NormSpec::Orlicz(_, phi) => row(sf.luxemburg_norm(phi)?, parameter),
            NormSpec::Marcinkiewicz(a) => row(sf.marcinkiewicz_norm(|s| s.powf(*a)), parameter),
            NormSpec::Bmo(q) => row(
                oscillation::campanato_seminorm(mesh, field, &Modulus::constant(1.0)?, *q, &family)?,
                parameter,
            ),
            NormSpec::Campanato(q, _, omega) => row(oscillation::campanato_seminorm(mesh, field, omega, *q, &family)?, parameter),
            NormSpec::Holder(_, omega) => row(oscillation::holder_seminorm(mesh, field, omega)?, parameter),
            NormSpec::Vmo(q) => {
                let vmo = oscillation::vmo_modulus(mesh, field, *q, &family)?;
                for (r, v) in vmo.radii.iter().zip(&vmo.values) {
                    row(*v, format!("{q}@r={r}"));
                }
            }
        }
    }
    Ok(rows)
}

/// `norm,parameter,value`
pub fn write_table<W: Write>(rows: &[NormRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["norm", "parameter", "value"])?;
    for r in rows {
        w.write_record([r.norm.as_str(), r.parameter.as_str(), &r.value.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_is_zero_everywhere() {
        let mesh = Mesh::unit_square(8).unwrap();
        let rows = norm_table(&mesh, &ElemField::zeros(&mesh, 1, 2), &default_specs()).unwrap();
        assert!(rows.len() > 10);
        assert!(rows.iter().all(|r| r.value == 0.0), "{rows:?}");
    }

    #[test]
    fn indicator_lorentz_rows_match_closed_form() {
        let mesh = Mesh::unit_square(8).unwrap();
        let data: Vec<f64> = (0..mesh.element_count()).map(|e| if e < 40 { 1.0 } else { 0.0 }).collect();
        let f = ElemField::scalar(&mesh, data).unwrap();
        let t: f64 = 40.0 / 128.0;
        let specs: Vec<NormSpec> = ["lorentz:3,2", "lorentz:2,1.5"].iter().map(|s| s.parse().unwrap()).collect();
        let rows = norm_table(&mesh, &f, &specs).unwrap();
        for (row, (q, r)) in rows.iter().zip([(3.0f64, 2.0f64), (2.0, 1.5)]) {
            let exact = (q / r).powf(1.0 / r) * t.powf(1.0 / q);
            assert!((row.value - exact).abs() < 1e-12, "{row:?} vs {exact}");
        }
    }

    #[test]
    fn permuted_field_has_identical_invariant_rows() {
        let mesh = Mesh::unit_square(8).unwrap();
        let n = mesh.element_count();
        let data: Vec<f64> = (0..n).map(|e| ((e * 37) % 11) as f64 - 4.0).collect();
        let permuted: Vec<f64> = (0..n).map(|e| data[(e * 5 + 3) % n]).collect();
        let specs: Vec<NormSpec> = default_specs().into_iter().filter(NormSpec::is_rearrangement_invariant).collect();
        let a = norm_table(&mesh, &ElemField::scalar(&mesh, data).unwrap(), &specs).unwrap();
        let b = norm_table(&mesh, &ElemField::scalar(&mesh, permuted).unwrap(), &specs).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn specs_round_trip_and_reject_unknown() {
        for s in ["lebesgue:inf", "lorentz:2,1", "campanato:1:power:0.5", "holder:log_inverse:2,3"] {
            let spec: NormSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<NormSpec>().unwrap().to_string(), spec.to_string());
        }
        assert!("sobolev:2".parse::<NormSpec>().is_err());
        assert!("lorentz:2".parse::<NormSpec>().is_err());
    }
}
