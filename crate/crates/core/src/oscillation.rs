//! Moduli of continuity, Campanato-type seminorms and the oscillation potential.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{self, ElemField, Mesh};
use crate::nfunc::Exponent;
use crate::rearrange::StepFunction;

/// The shape of a modulus of continuity `omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModulusFamily {
    /// `r^beta`
    Power(f64),
    /// `log(scale / r)^{-sigma}` on `(0, scale)`
    LogInverse { sigma: f64, scale: f64 },
    /// `c`
    Constant(f64),
    /// `1 / log(scale / r)` on `(0, scale)`
    DiniLog { scale: f64 },
}

impl ModulusFamily {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Self::Power(beta) => r.powf(beta),
            Self::LogInverse { sigma, scale } => (scale / r).ln().powf(-sigma),
            Self::Constant(c) => c,
            Self::DiniLog { scale } => 1.0 / (scale / r).ln(),
        }
    }

    /// `omega(e^x)`, evaluated without forming `e^x`.
    fn value_at_log(&self, x: f64) -> f64 {
        match *self {
            Self::Power(beta) => (beta * x).exp(),
            Self::LogInverse { sigma, scale } => (scale.ln() - x).powf(-sigma),
            Self::Constant(c) => c,
            Self::DiniLog { scale } => 1.0 / (scale.ln() - x),
        }
    }

    /// Upper end of the natural domain.
    pub fn domain_end(&self) -> f64 {
        match *self {
            Self::LogInverse { scale, .. } | Self::DiniLog { scale } => scale,
            _ => f64::INFINITY,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Power(beta) => beta > 0.0 && beta.is_finite(),
            Self::LogInverse { sigma, scale } => sigma > 0.0 && scale > 0.0,
            Self::Constant(c) => c > 0.0 && c.is_finite(),
            Self::DiniLog { scale } => scale > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid modulus {self:?}")))
        }
    }

    /// An antiderivative of `omega(rho) / rho`.
    fn log_antiderivative(&self, rho: f64) -> f64 {
        match *self {
            Self::Power(beta) => rho.powf(beta) / beta,
            Self::Constant(c) => c * rho.ln(),
            Self::LogInverse { sigma, scale } if (sigma - 1.0).abs() > 1e-12 => {
                (scale / rho).ln().powf(1.0 - sigma) / (sigma - 1.0)
            }
            Self::LogInverse { scale, .. } | Self::DiniLog { scale } => -(scale / rho).ln().ln(),
        }
    }
}

/// A modulus with a certificate `(beta, c_omega)` for the almost-decreasing property
/// `omega(r) <= c_omega rho^{-beta} omega(r rho)` on `r in (0, range)`, `rho in (0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Modulus {
    pub family: ModulusFamily,
    pub beta: f64,
    pub c_omega: f64,
    pub range: f64,
}

const CERT_GRID: usize = 100;

impl Modulus {
    /// Checks the certificate on a 100 x 100 grid of `(r, rho)`.
    pub fn new(family: ModulusFamily, beta: f64, c_omega: f64, range: f64) -> Result<Self> {
        family.validate()?;
        if !(beta > 0.0 && c_omega >= 1.0 && range > 0.0 && range < family.domain_end()) {
            return Err(Error::InvalidArgument(format!(
                "bad certificate beta = {beta}, c_omega = {c_omega}, range = {range} for {family:?}"
            )));
        }
        let m = Self {
            family,
            beta,
            c_omega,
            range,
        };
        let worst = m.certificate_ratio();
        if worst > c_omega * (1.0 + 1e-12) {
            return Err(Error::Hypothesis(format!(
                "almost-decreasing certificate fails: needs c_omega >= {worst}, declared {c_omega}"
            )));
        }
        Ok(m)
    }

    /// The smallest `c_omega >= 1` that certifies `beta` on the sample grid.
    pub fn fitted(family: ModulusFamily, beta: f64, range: f64) -> Result<Self> {
        family.validate()?;
        let probe = Self {
            family,
            beta,
            c_omega: 1.0,
            range,
        };
        Self::new(family, beta, probe.certificate_ratio().max(1.0), range)
    }

    pub fn power(beta: f64) -> Result<Self> {
        Self::new(ModulusFamily::Power(beta), beta, 1.0, 1.0)
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(ModulusFamily::Constant(c), 1.0, 1.0, 1.0)
    }

    /// `max omega(r) rho^beta / omega(r rho)` over the sample grid.
    pub fn certificate_ratio(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..CERT_GRID {
            let r = self.range * 10f64.powf(-6.0 * i as f64 / (CERT_GRID - 1) as f64) * (1.0 - 1e-9);
            for j in 0..CERT_GRID {
                let rho = 10f64.powf(-6.0 * (j + 1) as f64 / CERT_GRID as f64);
                let ratio = self.value(r) * rho.powf(self.beta) / self.value(r * rho);
                worst = worst.max(ratio);
            }
        }
        worst
    }

    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        self.family.value(r)
    }
}

/// `varpi(r) = int_0^r omega(rho) / rho d rho`, in closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiniTransform {
    family: ModulusFamily,
}

impl DiniTransform {
    pub fn value(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match self.family {
            ModulusFamily::Power(beta) => r.powf(beta) / beta,
            ModulusFamily::LogInverse { sigma, scale } => (scale / r).ln().powf(1.0 - sigma) / (sigma - 1.0),
            _ => unreachable!("divergent families are rejected on construction"),
        }
    }
}

pub fn dini_transform(omega: &Modulus) -> Result<DiniTransform> {
    match omega.family {
        ModulusFamily::Power(_) => Ok(DiniTransform { family: omega.family }),
        ModulusFamily::LogInverse { sigma, .. } if sigma > 1.0 => Ok(DiniTransform { family: omega.family }),
        ModulusFamily::LogInverse { sigma, .. } => Err(Error::DiniDivergence(format!(
            "log-inverse modulus with sigma = {sigma} <= 1"
        ))),
        ModulusFamily::DiniLog { .. } => Err(Error::DiniDivergence(
            "omega(r) = 1/log(scale/r): the integral grows like log log(1/r)".into(),
        )),
        ModulusFamily::Constant(_) => Err(Error::DiniDivergence("constant modulus".into())),
    }
}

/// `int_0^r omega(rho) / rho d rho` by quadrature in `x = ln rho` over windows
/// `[ln r - 2^{k+1}, ln r - 2^k]`; divergence is reported when the window
/// contributions have not become negligible by `k = 40`.
pub fn dini_integral_numeric(family: &ModulusFamily, r: f64) -> Result<f64> {
    let top = r.ln();
    let panel = |a: f64, b: f64| {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        const X: [f64; 4] = [0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363];
        const W: [f64; 4] = [0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];
        X.iter()
            .zip(W)
            .map(|(x, w)| half * w * (family.value_at_log(mid - half * x) + family.value_at_log(mid + half * x)))
            .sum::<f64>()
    };
    let window = |a: f64, b: f64| {
        let n = 64;
        let width = (b - a) / n as f64;
        (0..n).map(|k| panel(a + k as f64 * width, a + (k + 1) as f64 * width)).sum::<f64>()
    };
    let mut total = window(top - 1.0, top);
    for k in 0..40 {
        let lo = 2f64.powi(k + 1);
        let hi = 2f64.powi(k);
        let add = window(top - lo, top - hi);
        total += add;
        if add <= 1e-13 * total {
            return Ok(total);
        }
    }
    Err(Error::DiniDivergence(format!(
        "partial integrals still growing (value {total} over 2^40 log-units)"
    )))
}

/// `zeta(r) = (int_{r^{1/n}}^{R0^{1/n}} omega(rho)/rho d rho)^{-1}` on `(0, R0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaTransform {
    family: ModulusFamily,
    n: u32,
    r0: f64,
}

pub fn zeta_transform(omega: &Modulus, n: u32, r0: f64) -> Result<ZetaTransform> {
    if n == 0 || !(r0 > 0.0) || r0.powf(1.0 / n as f64) >= omega.family.domain_end() {
        return Err(Error::InvalidArgument(format!(
            "zeta needs n >= 1 and R0^(1/n) inside the modulus domain (n = {n}, R0 = {r0})"
        )));
    }
    Ok(ZetaTransform {
        family: omega.family,
        n,
        r0,
    })
}

impl ZetaTransform {
    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < self.r0) {
            return Err(Error::InvalidArgument(format!("zeta is defined on (0, {}), got {r}", self.r0)));
        }
        let e = 1.0 / self.n as f64;
        let w = &self.family;
        Ok(1.0 / (w.log_antiderivative(self.r0.powf(e)) - w.log_antiderivative(r.powf(e))))
    }

    /// `zeta_p = zeta^{1/(p-1)}`.
    pub fn value_p(&self, r: f64, p: Exponent) -> Result<f64> {
        Ok(self.value(r)?.powf(1.0 / (p.p() - 1.0)))
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }
}

/// Balls `B_r(c)` with centers on a coarsened barycenter lattice and dyadic radii.
#[derive(Clone, Debug, PartialEq)]
pub struct BallFamily {
    pub centers: Vec<[f64; 2]>,
    /// Increasing radii.
    pub radii: Vec<f64>,
}

impl BallFamily {
    /// Lower-triangle barycenters of every second cell in each direction; radii
    /// `R_in 2^{-k} >= 2h` with `R_in` the inscribed radius of the rectangle.
    pub fn standard(mesh: &Mesh) -> Self {
        let m = mesh.cells_per_side();
        let mut centers = Vec::new();
        for j in (0..m).step_by(2) {
            for i in (0..m).step_by(2) {
                centers.push(mesh.barycenter(2 * (i + j * m)));
            }
        }
        let b = mesh.bounds();
        let r_in = 0.5 * b.width().min(b.height());
        let mut radii = Vec::new();
        let mut r = r_in;
        while r >= 2.0 * mesh.h() {
            radii.push(r);
            r *= 0.5;
        }
        radii.reverse();
        Self { centers, radii }
    }

    /// Members `(center, radius)` whose ball lies inside the mesh rectangle.
    pub fn members(&self, mesh: &Mesh) -> Vec<([f64; 2], f64)> {
        let b = mesh.bounds();
        let mut out = Vec::new();
        for &c in &self.centers {
            let d = b.boundary_distance(c);
            for &r in &self.radii {
                if r <= d {
                    out.push((c, r));
                }
            }
        }
        out
    }
}

fn ball_osc(mesh: &Mesh, f: &ElemField, center: [f64; 2], r: f64, q: f64) -> Option<f64> {
    let elements = mesh.ball_elements(center, r).ok()?;
    let mean = mesh::weighted_mean(mesh, f, &elements);
    Some(mesh::oscillation_about(mesh, f, &elements, &mean, q))
}

/// `sup_{B_r in family} osc_q(f; B_r) / omega(r)`.
pub fn campanato_seminorm(mesh: &Mesh, f: &ElemField, omega: &Modulus, q: f64, family: &BallFamily) -> Result<f64> {
    mesh::check_q(q)?;
    let members = family.members(mesh);
    if members.is_empty() {
        return Err(Error::InvalidArgument("ball family has no ball inside the mesh".into()));
    }
    Ok(members
        .par_iter()
        .filter_map(|&(c, r)| ball_osc(mesh, f, c, r, q).map(|o| o / omega.value(r)))
        .reduce(|| 0.0, f64::max))
}

/// `rho -> sup of osc_q over family balls of radius <= rho`, on the family's radii.
#[derive(Clone, Debug, PartialEq)]
pub struct VmoModulus {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl VmoModulus {
    /// Value at `rho` (0 below the smallest radius).
    pub fn at(&self, rho: f64) -> f64 {
        let k = self.radii.partition_point(|&r| r <= rho);
        if k == 0 {
            0.0
        } else {
            self.values[k - 1]
        }
    }
}

pub fn vmo_modulus(mesh: &Mesh, f: &ElemField, q: f64, family: &BallFamily) -> Result<VmoModulus> {
    mesh::check_q(q)?;
    let members = family.members(mesh);
    let per_radius: Vec<f64> = family
        .radii
        .iter()
        .map(|&r| {
            members
                .par_iter()
                .filter(|m| m.1 == r)
                .filter_map(|&(c, r)| ball_osc(mesh, f, c, r, q))
                .reduce(|| 0.0, f64::max)
        })
        .collect();
    let mut values = Vec::with_capacity(per_radius.len());
    let mut running: f64 = 0.0;
    for v in per_radius {
        running = running.max(v);
        values.push(running);
    }
    Ok(VmoModulus {
        radii: family.radii.clone(),
        values,
    })
}

/// Budget of barycenter pairs examined by [`holder_seminorm`].
pub const HOLDER_PAIR_BUDGET: usize = 1_000_000;

/// `sup |f(x) - f(y)| / omega(|x - y|)` over barycenter pairs: every pair of elements
/// in neighbouring cells, plus a deterministic strided sample of distant pairs.
pub fn holder_seminorm(mesh: &Mesh, f: &ElemField, omega: &Modulus) -> Result<f64> {
    let ne = mesh.element_count();
    let m = mesh.cells_per_side();
    let ratio = |a: usize, b: usize| {
        let (x, y) = (mesh.barycenter(a), mesh.barycenter(b));
        let d = (x[0] - y[0]).hypot(x[1] - y[1]);
        let diff: f64 = f.at(a).iter().zip(f.at(b)).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
        diff / omega.value(d)
    };
    let local = (0..ne)
        .into_par_iter()
        .map(|a| {
            let cell = a / 2;
            let (i, j) = ((cell % m) as isize, (cell / m) as isize);
            let mut best: f64 = 0.0;
            for dj in -1..=1 {
                for di in -1..=1 {
                    let (ni, nj) = (i + di, j + dj);
                    if ni < 0 || nj < 0 || ni >= m as isize || nj >= m as isize {
                        continue;
                    }
                    let c = (ni as usize) + (nj as usize) * m;
                    for b in [2 * c, 2 * c + 1] {
                        if b > a {
                            best = best.max(ratio(a, b));
                        }
                    }
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    let local_pairs = 9 * ne;
    let budget = HOLDER_PAIR_BUDGET.saturating_sub(local_pairs).max(2);
    let mut stride = 1;
    while (ne / stride) * (ne / stride) / 2 > budget {
        stride += 1;
    }
    let sample: Vec<usize> = (0..ne).step_by(stride).collect();
    let far = (0..sample.len())
        .into_par_iter()
        .map(|k| {
            let a = sample[k];
            sample[k + 1..].iter().map(|&b| ratio(a, b)).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(local.max(far))
}

/// Parameters of the dyadic oscillation potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialParams {
    pub radius: f64,
    pub theta: f64,
    pub p: Exponent,
}

impl PotentialParams {
    pub fn new(radius: f64, theta: f64, p: Exponent) -> Result<Self> {
        if !(radius > 0.0 && theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "need R > 0 and theta in (0, 1), got R = {radius}, theta = {theta}"
            )));
        }
        Ok(Self { radius, theta, p })
    }

    /// The dyadic radii `theta^i R >= 2h`.
    pub fn radii(&self, h: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut r = self.radius;
        while r >= 2.0 * h * (1.0 - 1e-12) {
            out.push(r);
            r *= self.theta;
        }
        out
    }
}

/// `sum_i osc_{p'}(F; B_{theta^i R}(x)) log(1/theta)` over `theta^i R >= 2h`.
pub fn oscillation_potential(mesh: &Mesh, f: &ElemField, x: [f64; 2], params: &PotentialParams) -> Result<f64> {
    Ok(potential_terms(mesh, f, x, params)?.iter().sum())
}

/// The individual dyadic terms of [`oscillation_potential`], largest radius first.
pub fn potential_terms(mesh: &Mesh, f: &ElemField, x: [f64; 2], params: &PotentialParams) -> Result<Vec<f64>> {
    let margin = mesh.bounds().boundary_distance(x);
    if margin < params.radius {
        return Err(Error::TooCloseToBoundary {
            x: x[0],
            y: x[1],
            margin: params.radius,
        });
    }
    let radii = params.radii(mesh.h());
    if radii.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "R = {} is below twice the mesh width {}",
            params.radius,
            mesh.h()
        )));
    }
    let q = params.p.pprime();
    let weight = (1.0 / params.theta).ln();
    radii
        .iter()
        .map(|&r| Ok(mesh::ball_oscillation(mesh, f, x, r, q)?.1 * weight))
        .collect()
}

/// `sup_k zeta(b_k) (f - <f>)*(b_k) / seminorm` over the breakpoints of the rearrangement
/// of the centered field, a discrete form of the Campanato to Marcinkiewicz embedding.
pub fn zeta_embedding_ratio(mesh: &Mesh, f: &ElemField, zeta: &ZetaTransform, seminorm: f64) -> Result<f64> {
    let mean = f.mean(mesh);
    let centered: Vec<f64> = (0..f.len())
        .map(|e| f.at(e).iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .collect();
    let sf: StepFunction = crate::rearrange::rearrange(mesh, &centered)?;
    let mut worst: f64 = 0.0;
    for (_, b, v) in sf.intervals() {
        if v > 0.0 && b < zeta.r0() {
            worst = worst.max(zeta.value(b)? * v);
        }
    }
    Ok(worst / seminorm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;
    use approx::assert_relative_eq;

    fn linear_field(mesh: &Mesh, b: [f64; 2]) -> ElemField {
        ElemField::from_fn(mesh, 1, 1, |x, t| t[0] = b[0] * x[0] + b[1] * x[1])
    }

    #[test]
    fn certificates() {
        assert!(Modulus::power(0.5).is_ok());
        assert!(Modulus::new(ModulusFamily::Power(0.7), 0.5, 1.0, 1.0).is_err());
        let log = Modulus::fitted(ModulusFamily::LogInverse { sigma: 2.0, scale: 10.0 }, 0.2, 1.0).unwrap();
        assert!(log.c_omega >= 1.0 && log.c_omega.is_finite());
        let dini = Modulus::fitted(ModulusFamily::DiniLog { scale: std::f64::consts::E.powi(2) }, 0.1, 1.0).unwrap();
        assert!(dini.value(0.5) > 0.0);
        assert!(Modulus::new(ModulusFamily::DiniLog { scale: 1.0 }, 0.1, 2.0, 2.0).is_err());
    }

    #[test]
    fn dini_closed_forms_and_divergence() {
        let beta = 0.3;
        let d = dini_transform(&Modulus::power(beta).unwrap()).unwrap();
        for &r in &[1e-6, 0.01, 0.5, 1.0] {
            assert_relative_eq!(d.value(r), r.powf(beta) / beta, max_relative = 1e-10);
            let numeric = dini_integral_numeric(&ModulusFamily::Power(beta), r).unwrap();
            assert_relative_eq!(numeric, d.value(r), max_relative = 1e-8);
        }
        assert_eq!(d.value(0.0), 0.0);
        let log2 = ModulusFamily::LogInverse { sigma: 3.0, scale: 5.0 };
        let lm = Modulus::fitted(log2, 0.1, 1.0).unwrap();
        let dl = dini_transform(&lm).unwrap();
        assert_relative_eq!(
            dini_integral_numeric(&log2, 0.5).unwrap(),
            dl.value(0.5),
            max_relative = 1e-6
        );
        let e = std::f64::consts::E;
        let dini = Modulus::fitted(ModulusFamily::DiniLog { scale: e }, 0.1, 0.9).unwrap();
        assert!(matches!(dini_transform(&dini), Err(Error::DiniDivergence(_))));
        assert!(dini_integral_numeric(&dini.family, 0.5).is_err());
        assert!(dini_transform(&Modulus::constant(1.0).unwrap()).is_err());
    }

    #[test]
    fn zeta_closed_forms() {
        let z = zeta_transform(&Modulus::constant(1.0).unwrap(), 2, 4.0).unwrap();
        for &r in &[1e-6, 0.1, 1.0, 3.9] {
            assert_relative_eq!(z.value(r).unwrap(), 2.0 / (4.0 / r).ln(), max_relative = 1e-10);
        }
        assert!(z.value(4.0).is_err());
        let e = std::f64::consts::E;
        let m = Modulus::fitted(ModulusFamily::LogInverse { sigma: 1.0, scale: 10.0 * e }, 0.1, 1.0).unwrap();
        let z = zeta_transform(&m, 2, 4.0).unwrap();
        let mut last = 0.0;
        for k in 1..30 {
            let r = 4.0 * 0.5f64.powi(k);
            let v = z.value(r).unwrap();
            // int_{r^{1/2}}^{2} d rho / (rho log(s/rho)) = log log(s/r^{1/2}) - log log(s/2)
            let s: f64 = 10.0 * e;
            let expected = 1.0 / ((s / r.sqrt()).ln().ln() - (s / 2.0).ln().ln());
            assert_relative_eq!(v, expected, max_relative = 1e-10);
            if k > 1 {
                assert!(v <= last);
            }
            last = v;
        }
        let p = Exponent::new(3.0).unwrap();
        assert_relative_eq!(z.value_p(0.1, p).unwrap(), z.value(0.1).unwrap().sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn seminorms_vanish_on_constants() {
        let mesh = Mesh::unit_square(16).unwrap();
        let f = ElemField::from_fn(&mesh, 2, 2, |_, t| t.copy_from_slice(&[1.0, 2.0, 3.0, 4.0]));
        let fam = BallFamily::standard(&mesh);
        let omega = Modulus::power(0.5).unwrap();
        assert_eq!(campanato_seminorm(&mesh, &f, &omega, 2.0, &fam).unwrap(), 0.0);
        assert_eq!(holder_seminorm(&mesh, &f, &omega).unwrap(), 0.0);
        assert!(vmo_modulus(&mesh, &f, 1.0, &fam).unwrap().values.iter().all(|v| *v == 0.0));
        let params = PotentialParams::new(0.25, 0.5, Exponent::new(2.0).unwrap()).unwrap();
        assert_eq!(oscillation_potential(&mesh, &f, [0.5, 0.5], &params).unwrap(), 0.0);
    }

    #[test]
    fn linear_field_seminorms() {
        let mesh = Mesh::unit_square(32).unwrap();
        let b = [0.6, -0.8];
        let f = linear_field(&mesh, b);
        let omega = Modulus::power(1.0).unwrap();
        let holder = holder_seminorm(&mesh, &f, &omega).unwrap();
        assert!((holder - 1.0).abs() < 0.05 && holder <= 1.0 + 1e-12);
        let fam = BallFamily::standard(&mesh);
        let camp = campanato_seminorm(&mesh, &f, &omega, 1.0, &fam).unwrap();
        let brute = fam
            .members(&mesh)
            .iter()
            .filter_map(|&(c, r)| mesh::ball_oscillation(&mesh, &f, c, r, 1.0).ok().map(|o| o.1 / r))
            .fold(0.0, f64::max);
        assert_relative_eq!(camp, brute, max_relative = 1e-14);
        assert!(camp <= 2.0 * holder);
        let vmo = vmo_modulus(&mesh, &f, 1.0, &fam).unwrap();
        assert!(vmo.values.windows(2).all(|w| w[0] <= w[1]));
        let slope = |k: usize| vmo.values[k] / vmo.radii[k];
        assert!((slope(0) / slope(2) - 1.0).abs() < 0.1, "{:?}", vmo.values);
    }

    #[test]
    fn sign_pattern_is_not_vmo() {
        let mesh = Mesh::new(Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap(), 32).unwrap();
        let f = ElemField::from_fn(&mesh, 1, 1, |x, t| t[0] = x[0].signum());
        let fam = BallFamily {
            centers: vec![[0.0, 0.0], [0.0, 0.3]],
            radii: BallFamily::standard(&mesh).radii,
        };
        let vmo = vmo_modulus(&mesh, &f, 1.0, &fam).unwrap();
        assert!(vmo.values[0] > 0.9, "{:?}", vmo.values);
    }

    #[test]
    fn potential_of_linear_field_is_geometric() {
        let mesh = Mesh::unit_square(128).unwrap();
        let f = ElemField::from_fn(&mesh, 1, 2, |x, t| {
            t[0] = 0.5 * x[0] + x[1];
            t[1] = 0.0;
        });
        let params = PotentialParams::new(0.25, 0.5, Exponent::new(2.0).unwrap()).unwrap();
        let terms = potential_terms(&mesh, &f, [0.5, 0.5], &params).unwrap();
        for w in terms.windows(2) {
            assert!((w[1] / w[0] - 0.5).abs() < 0.06);
        }
        assert!(oscillation_potential(&mesh, &f, [0.1, 0.5], &params).is_err());
        let tiny = PotentialParams::new(mesh.h(), 0.5, Exponent::new(2.0).unwrap()).unwrap();
        assert!(oscillation_potential(&mesh, &f, [0.5, 0.5], &tiny).is_err());
    }
}
