//! Decreasing rearrangements and rearrangement-invariant norms.
//!
//! Rearrangements of piecewise-constant data are kept exact as [`StepFunction`]s.
//! Functions that are no longer piecewise constant (running averages, Hardy tails)
//! are evaluated by composite Gauss-Legendre quadrature in logarithmic variables,
//! with power-law tails integrated in closed form.

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// A nonincreasing, nonnegative step function on `(0, total_measure)`, zero beyond.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    /// `(measure, value)` with strictly decreasing values and positive measures.
    pieces: Vec<(f64, f64)>,
}

impl StepFunction {
    /// Rearranges `|values|` carried by the given measures.
    pub fn from_values(values: &[f64], measures: &[f64]) -> Result<Self> {
        if values.len() != measures.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values with {} measures",
                values.len(),
                measures.len()
            )));
        }
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(values.len());
        for (&v, &m) in values.iter().zip(measures) {
            if !v.is_finite() || !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidArgument(format!("bad piece (measure {m}, value {v})")));
            }
            pairs.push((m, v.abs()));
        }
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1));
        Ok(Self::merged(pairs))
    }

    /// Builds from `(measure, value)` pieces that must already be nonincreasing.
    pub fn from_pieces(pieces: Vec<(f64, f64)>) -> Result<Self> {
        for w in pieces.windows(2) {
            if w[1].1 > w[0].1 {
                return Err(Error::InvalidArgument("piece values must be nonincreasing".into()));
            }
        }
        for &(m, v) in &pieces {
            if !(m > 0.0 && m.is_finite() && v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("bad piece (measure {m}, value {v})")));
            }
        }
        Ok(Self::merged(pieces))
    }

    /// `v * chi_(0, m)`.
    pub fn indicator(measure: f64, value: f64) -> Result<Self> {
        Self::from_pieces(vec![(measure, value)])
    }

    fn merged(sorted: Vec<(f64, f64)>) -> Self {
        let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (m, v) in sorted {
            match pieces.last_mut() {
                Some(last) if last.1 == v => last.0 += m,
                _ => pieces.push((m, v)),
            }
        }
        Self { pieces }
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    pub fn total_measure(&self) -> f64 {
        self.pieces.iter().map(|p| p.0).sum()
    }

    pub fn sup(&self) -> f64 {
        self.pieces.first().map_or(0.0, |p| p.1)
    }

    pub fn is_zero(&self) -> bool {
        self.sup() == 0.0
    }

    /// `int_0^inf f*`.
    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(|(m, v)| m * v).sum()
    }

    /// `[(a_k, b_k, v_k)]`, the pieces as intervals.
    pub fn intervals(&self) -> Vec<(f64, f64, f64)> {
        let mut a = 0.0;
        self.pieces
            .iter()
            .map(|&(m, v)| {
                let b = a + m;
                let out = (a, b, v);
                a = b;
                out
            })
            .collect()
    }

    /// Right-continuous `f*(s)`.
    pub fn value_at(&self, s: f64) -> f64 {
        let mut b = 0.0;
        for &(m, v) in &self.pieces {
            b += m;
            if s < b {
                return v;
            }
        }
        0.0
    }

    /// `|{f* > t}|`.
    pub fn distribution(&self, t: f64) -> f64 {
        self.pieces.iter().filter(|p| p.1 > t).map(|p| p.0).sum()
    }

    /// `f**(s) = (1/s) int_0^s f*`.
    pub fn double_star(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::InvalidArgument(format!("f** needs s > 0, got {s}")));
        }
        let mut acc = 0.0;
        let mut a = 0.0;
        for &(m, v) in &self.pieces {
            if s <= a + m {
                return Ok((acc + v * (s - a)) / s);
            }
            acc += m * v;
            a += m;
        }
        Ok(acc / s)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let factor = factor.abs();
        if factor == 0.0 {
            return Self::merged(vec![(self.total_measure(), 0.0)]);
        }
        Self {
            pieces: self.pieces.iter().map(|&(m, v)| (m, factor * v)).collect(),
        }
    }

    /// `(f*)^a` for `a > 0`.
    pub fn powf(&self, a: f64) -> Self {
        Self::merged(self.pieces.iter().map(|&(m, v)| (m, v.powf(a))).collect())
    }

    /// `f* chi_(0, s)`.
    pub fn truncated(&self, s: f64) -> Self {
        let mut out = Vec::new();
        let mut a = 0.0;
        for &(m, v) in &self.pieces {
            if a >= s {
                break;
            }
            out.push(((a + m).min(s) - a, v));
            a += m;
        }
        Self::merged(out)
    }

    /// `int s^{r/q - 1} f*(s)^r ds` piece by piece, or `sup s^{1/q} f*(s)` for `r = inf`.
    pub fn lorentz_norm(&self, q: f64, r: f64) -> Result<f64> {
        check_lorentz(q, r)?;
        if q.is_infinite() {
            return Ok(self.sup());
        }
        if r.is_infinite() {
            return Ok(self
                .intervals()
                .iter()
                .map(|&(_, b, v)| v * b.powf(1.0 / q))
                .fold(0.0, f64::max));
        }
        let e = r / q;
        let total: f64 = self
            .intervals()
            .iter()
            .map(|&(a, b, v)| v.powf(r) * (b.powf(e) - a.powf(e)))
            .sum();
        Ok((total / e).powf(1.0 / r))
    }

    pub fn lebesgue_norm(&self, q: f64) -> Result<f64> {
        if q.is_infinite() {
            return Ok(self.sup());
        }
        if !(q >= 1.0) {
            return Err(Error::InvalidArgument(format!("Lebesgue exponent must be >= 1, got {q}")));
        }
        Ok(self
            .pieces
            .iter()
            .map(|(m, v)| m * v.powf(q))
            .sum::<f64>()
            .powf(1.0 / q))
    }

    /// `int Phi(f* / lambda)`.
    pub fn modular(&self, phi: &YoungFunction, lambda: f64) -> f64 {
        self.pieces.iter().map(|&(m, v)| m * phi.value(v / lambda)).sum()
    }

    pub fn luxemburg_norm(&self, phi: &YoungFunction) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        luxemburg(|lambda| self.modular(phi, lambda), self.sup())
    }

    /// `sup_k eta(b_k) v_k` over the right endpoints `b_k` of the pieces.
    pub fn marcinkiewicz_norm(&self, eta: impl Fn(f64) -> f64) -> f64 {
        self.intervals()
            .iter()
            .filter(|p| p.2 > 0.0)
            .map(|&(_, b, v)| eta(b) * v)
            .fold(0.0, f64::max)
    }
}

/// Decreasing rearrangement of a per-element scalar field.
pub fn rearrange(mesh: &Mesh, f: &[f64]) -> Result<StepFunction> {
    let areas: Vec<f64> = (0..f.len()).map(|e| mesh.element_area(e)).collect();
    if f.len() != mesh.element_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} values for {} elements",
            f.len(),
            mesh.element_count()
        )));
    }
    StepFunction::from_values(f, &areas)
}

pub fn double_star(sf: &StepFunction, s: f64) -> Result<f64> {
    sf.double_star(s)
}

pub fn lorentz_norm(sf: &StepFunction, q: f64, r: f64) -> Result<f64> {
    sf.lorentz_norm(q, r)
}

pub fn luxemburg_norm(sf: &StepFunction, phi: &YoungFunction) -> Result<f64> {
    sf.luxemburg_norm(phi)
}

pub fn marcinkiewicz_norm(sf: &StepFunction, eta: impl Fn(f64) -> f64) -> f64 {
    sf.marcinkiewicz_norm(eta)
}

fn check_lorentz(q: f64, r: f64) -> Result<()> {
    let ok = (q > 1.0 && q.is_finite() && r >= 1.0) || (q == 1.0 && r == 1.0) || (q.is_infinite() && r.is_infinite());
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("inadmissible Lorentz exponents ({q}, {r})")))
    }
}

/// Smallest `lambda` with `modular(lambda) <= 1`, by bisection in `log lambda`.
fn luxemburg(modular: impl Fn(f64) -> f64, start: f64) -> Result<f64> {
    let mut hi = start.max(f64::MIN_POSITIVE);
    let mut steps = 0;
    while !(modular(hi) <= 1.0) {
        hi *= 2.0;
        steps += 1;
        if steps > 2100 || !hi.is_finite() {
            return Err(Error::NoFiniteNorm(format!("modular stays above 1 up to lambda = {hi:e}")));
        }
    }
    let mut lo = hi;
    steps = 0;
    while modular(lo) <= 1.0 {
        lo *= 0.5;
        steps += 1;
        if steps > 2100 || lo == 0.0 {
            return Err(Error::NoFiniteNorm("modular stays below 1 as lambda -> 0".into()));
        }
    }
    while hi - lo > 1e-12 * hi {
        let mid = (lo * hi).sqrt();
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// A nonnegative step function on `(0, inf)` that need not be monotone.
#[derive(Clone, Debug, PartialEq)]
pub struct StepProfile {
    /// Disjoint `(a, b, value)` intervals sorted by `a`.
    pieces: Vec<(f64, f64, f64)>,
}

impl StepProfile {
    pub fn new(mut pieces: Vec<(f64, f64, f64)>) -> Result<Self> {
        pieces.retain(|p| p.2 != 0.0);
        pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
        for &(a, b, v) in &pieces {
            if b.is_infinite() && v > 0.0 {
                return Err(Error::InvalidArgument(
                    "profile with a nonzero tail at infinity has a divergent tail integral".into(),
                ));
            }
            if !(a >= 0.0 && b > a && v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("bad profile piece ({a}, {b}, {v})")));
            }
        }
        for w in pieces.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(Error::InvalidArgument("profile pieces overlap".into()));
            }
        }
        Ok(Self { pieces })
    }

    pub fn from_step(sf: &StepFunction) -> Self {
        Self {
            pieces: sf.intervals().into_iter().filter(|p| p.2 > 0.0).collect(),
        }
    }

    pub fn pieces(&self) -> &[(f64, f64, f64)] {
        &self.pieces
    }

    pub fn rearranged(&self) -> StepFunction {
        let values: Vec<f64> = self.pieces.iter().map(|p| p.2).collect();
        let measures: Vec<f64> = self.pieces.iter().map(|p| p.1 - p.0).collect();
        StepFunction::from_values(&values, &measures).expect("validated pieces")
    }

    /// `int_s^inf phi(r) dr / r`.
    pub fn tail_integral(&self, s: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|p| p.1 > s)
            .map(|&(a, b, v)| v * (b / a.max(s)).ln())
            .sum()
    }
}

/// A Young function: convex, nondecreasing, vanishing at 0, possibly `+inf` beyond a cap.
#[derive(Clone, Debug, PartialEq)]
pub enum YoungFunction {
    /// `scale * t^q`, `q >= 1`.
    Power { q: f64, scale: f64 },
    /// `scale * t^q exp(t^gamma)`, behaving like `t^q` near 0 and `exp(t^gamma)` at infinity.
    ExpType { gamma: f64, q: f64, scale: f64 },
    /// `scale * t^q` for `t <= 1`, `+inf` beyond.
    LinfCap { q: f64, scale: f64 },
    Sampled(SampledYoung),
}

/// A Young function given by values on a grid, interpolated log-log between
/// grid points and extended by power laws, `+inf` beyond `cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledYoung {
    t: Vec<f64>,
    v: Vec<f64>,
    cap: Option<f64>,
}

/// Points per decade of the default log grid.
pub const GRID_PER_DECADE: usize = 64;
pub const GRID_MIN: f64 = 1e-8;
pub const GRID_MAX: f64 = 1e8;

/// The log grid `[1e-8, 1e8]` with 64 points per decade.
pub fn default_grid() -> Vec<f64> {
    log_grid(GRID_MIN, GRID_MAX, GRID_PER_DECADE)
}

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = hi.log10() - lo.log10();
    let n = (decades * per_decade as f64).round() as usize;
    (0..=n)
        .map(|k| lo * 10f64.powf(k as f64 * decades / n as f64))
        .collect()
}

impl SampledYoung {
    /// Validates monotonicity, nonnegativity and a discrete convexity scan.
    pub fn new(t: Vec<f64>, v: Vec<f64>, cap: Option<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != v.len() {
            return Err(Error::ShapeMismatch("need at least two matching grid points".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) || !(t[0] > 0.0) {
            return Err(Error::InvalidArgument("grid must be positive and increasing".into()));
        }
        if v.iter().any(|x| !(*x >= 0.0) || x.is_nan()) {
            return Err(Error::InvalidArgument("Young function values must be >= 0".into()));
        }
        let finite: Vec<usize> = (0..v.len()).filter(|&k| v[k].is_finite()).collect();
        let slopes: Vec<f64> = finite
            .windows(2)
            .map(|w| (v[w[1]] - v[w[0]]) / (t[w[1]] - t[w[0]]))
            .collect();
        if slopes.iter().any(|s| *s < -1e-12 * s.abs().max(f64::MIN_POSITIVE)) {
            return Err(Error::InvalidArgument("Young function must be nondecreasing".into()));
        }
        for w in slopes.windows(2) {
            if w[1] < w[0] * (1.0 - 1e-6) - 1e-300 {
                return Err(Error::InvalidArgument(format!(
                    "convexity scan failed: slope {} after slope {}",
                    w[1], w[0]
                )));
            }
        }
        Ok(Self { t, v, cap })
    }

    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn cap(&self) -> Option<f64> {
        self.cap
    }

    fn segment_exponent(&self, j: usize) -> Option<f64> {
        let (v0, v1) = (self.v[j], self.v[j + 1]);
        (v0 > 0.0 && v1 > 0.0 && v1.is_finite()).then(|| (v1 / v0).ln() / (self.t[j + 1] / self.t[j]).ln())
    }

    fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if self.cap.is_some_and(|c| t > c) {
            return f64::INFINITY;
        }
        let n = self.t.len();
        let j = match self.t.partition_point(|&x| x <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (t0, t1, v0, v1) = (self.t[j], self.t[j + 1], self.v[j], self.v[j + 1]);
        match self.segment_exponent(j) {
            Some(a) => v0 * (t / t0).powf(a),
            None if t < t0 && v0 == 0.0 => 0.0,
            None => (v0 + (v1 - v0) * (t - t0) / (t1 - t0)).max(0.0),
        }
    }

    fn log_slope(&self, t: f64) -> f64 {
        let n = self.t.len();
        let j = self.t.partition_point(|&x| x <= t).clamp(1, n - 1) - 1;
        self.segment_exponent(j).unwrap_or(f64::NAN)
    }

    fn min_log_slope(&self) -> f64 {
        (0..self.t.len() - 1)
            .filter_map(|j| self.segment_exponent(j))
            .fold(f64::INFINITY, f64::min)
    }

    fn scaled(&self, k: f64) -> Self {
        Self {
            t: self.t.clone(),
            v: self.v.iter().map(|x| k * x).collect(),
            cap: self.cap,
        }
    }
}

impl YoungFunction {
    pub fn power(q: f64) -> Result<Self> {
        Self::power_scaled(q, 1.0)
    }

    pub fn power_scaled(q: f64, scale: f64) -> Result<Self> {
        check_power(q)?;
        check_scale(scale)?;
        Ok(Self::Power { q, scale })
    }

    pub fn exp_type(gamma: f64, q: f64) -> Result<Self> {
        check_power(q)?;
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma must be > 0, got {gamma}")));
        }
        Ok(Self::ExpType { gamma, q, scale: 1.0 })
    }

    pub fn linf_cap(q: f64) -> Result<Self> {
        check_power(q)?;
        Ok(Self::LinfCap { q, scale: 1.0 })
    }

    pub fn sampled(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        Ok(Self::Sampled(SampledYoung::new(t, v, None)?))
    }

    /// `k * Phi`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        check_scale(k)?;
        Ok(match self {
            Self::Power { q, scale } => Self::Power { q: *q, scale: scale * k },
            Self::ExpType { gamma, q, scale } => Self::ExpType {
                gamma: *gamma,
                q: *q,
                scale: scale * k,
            },
            Self::LinfCap { q, scale } => Self::LinfCap { q: *q, scale: scale * k },
            Self::Sampled(s) => Self::Sampled(s.scaled(k)),
        })
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Power { q, scale } => scale * t.powf(*q),
            Self::ExpType { gamma, q, scale } => scale * t.powf(*q) * t.powf(*gamma).exp(),
            Self::LinfCap { q, scale } => {
                if t <= 1.0 {
                    scale * t.powf(*q)
                } else {
                    f64::INFINITY
                }
            }
            Self::Sampled(s) => s.value(t),
        }
    }

    /// `t Phi'(t) / Phi(t)`.
    pub fn log_slope(&self, t: f64) -> f64 {
        match self {
            Self::Power { q, .. } => *q,
            Self::ExpType { gamma, q, .. } => q + gamma * t.powf(*gamma),
            Self::LinfCap { q, .. } => {
                if t < 1.0 {
                    *q
                } else {
                    f64::INFINITY
                }
            }
            Self::Sampled(s) => s.log_slope(t),
        }
    }

    /// Infimum of `t Phi'(t) / Phi(t)` over `(0, inf)` (over the grid for sampled forms).
    pub fn min_log_slope(&self) -> f64 {
        match self {
            Self::Power { q, .. } | Self::ExpType { q, .. } | Self::LinfCap { q, .. } => *q,
            Self::Sampled(s) => s.min_log_slope(),
        }
    }

    /// The point beyond which the function is `+inf`, if any.
    pub fn cap(&self) -> Option<f64> {
        match self {
            Self::LinfCap { .. } => Some(1.0),
            Self::Sampled(s) => s.cap,
            _ => None,
        }
    }

    /// The Young conjugate `sup_s (t s - Phi(s))`.
    pub fn conjugate(&self) -> YoungFunction {
        match self {
            Self::Power { q, scale } if *q > 1.0 => {
                let qp = q / (q - 1.0);
                Self::Power {
                    q: qp,
                    scale: (scale * q).powf(1.0 - qp) / qp,
                }
            }
            Self::Power { scale, .. } => {
                let t = default_grid();
                let v = vec![0.0; t.len()];
                Self::Sampled(SampledYoung { t, v, cap: Some(*scale) })
            }
            _ => Self::Sampled(conjugate_numeric(self)),
        }
    }

    /// Samples this function on the default grid.
    pub fn sample(&self) -> SampledYoung {
        let t = default_grid();
        let cap = self.cap();
        let v = t
            .iter()
            .map(|&x| if cap.is_some_and(|c| x > c) { f64::INFINITY } else { self.value(x) })
            .collect();
        SampledYoung { t, v, cap }
    }
}

fn check_power(q: f64) -> Result<()> {
    if q >= 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("Young power must be >= 1, got {q}")))
    }
}

fn check_scale(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("scale must be > 0, got {k}")))
    }
}

/// Conjugation on the default grid by a monotone scan over a wide log grid of `s`,
/// refined by golden-section search around the discrete maximizer.
fn conjugate_numeric(phi: &YoungFunction) -> SampledYoung {
    let s_grid = log_grid(1e-160, 1e160, 32);
    let phi_s: Vec<f64> = s_grid.iter().map(|&s| phi.value(s)).collect();
    let t_grid = default_grid();
    let mut values = Vec::with_capacity(t_grid.len());
    let mut cap = None;
    let mut i = 0;
    let last = s_grid.len() - 1;
    for &t in &t_grid {
        if cap.is_some() {
            values.push(f64::INFINITY);
            continue;
        }
        let gap = |k: usize| t * s_grid[k] - phi_s[k];
        while i < last && gap(i + 1) >= gap(i) {
            i += 1;
        }
        if i == last {
            cap = Some(t);
            values.push(f64::INFINITY);
            continue;
        }
        let lo = s_grid[i.saturating_sub(1)].ln();
        let hi = s_grid[i + 1].ln();
        let best = golden_max(|x| t * x.exp() - phi.value(x.exp()), lo, hi);
        values.push(best.max(gap(i)).max(0.0));
    }
    // The cap sits between the last finite grid point and the first infinite one.
    let cap = cap.map(|c| {
        let k = t_grid.iter().position(|&x| x == c).unwrap_or(0);
        if k > 0 {
            t_grid[k - 1]
        } else {
            c
        }
    });
    if let Some(c) = cap {
        for (t, v) in t_grid.iter().zip(values.iter_mut()) {
            if *t > c {
                *v = f64::INFINITY;
            }
        }
    }
    SampledYoung { t: t_grid, v: values, cap }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-15 * a.abs().max(1.0) {
            break;
        }
    }
    fc.max(fd)
}

/// Measured quantities of the two hypotheses of the Orlicz transform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrliczHypotheses {
    /// `inf t Phi'(t) / Phi(t)`, required to exceed `p'`.
    pub index: f64,
    /// Local power of `Phi~` at the bottom of the grid, required to exceed 1.
    pub conjugate_power_at_zero: f64,
}

/// The target Young function `Psi` with `Psi(t^{1/(p-1)}) = (t int_0^t Phi~(r) / r^2 dr)~`.
pub fn orlicz_target(phi: &YoungFunction, p: crate::nfunc::Exponent) -> Result<YoungFunction> {
    let (psi, _) = orlicz_target_with_report(phi, p)?;
    Ok(psi)
}

pub fn orlicz_target_with_report(
    phi: &YoungFunction,
    p: crate::nfunc::Exponent,
) -> Result<(YoungFunction, OrliczHypotheses)> {
    let index = phi.min_log_slope();
    if !(index > p.pprime() * (1.0 + 1e-9)) {
        return Err(Error::Hypothesis(format!(
            "index condition fails: inf t Phi'/Phi = {index} is not above p' = {}",
            p.pprime()
        )));
    }
    let conj = phi.conjugate();
    let t = default_grid();
    let (t0, t1) = (t[0], t[1]);
    let (c0, c1) = (conj.value(t0), conj.value(t1));
    let power_at_zero = if c0 > 0.0 && c1 > 0.0 {
        (c1 / c0).ln() / (t1 / t0).ln()
    } else {
        f64::INFINITY
    };
    if !(power_at_zero > 1.0 + 1e-9) {
        return Err(Error::Hypothesis(format!(
            "integrability at 0 fails: Phi~ behaves like r^{power_at_zero} near 0"
        )));
    }
    let g = cumulative_transform(&conj, &t, power_at_zero);
    let theta = conjugate_numeric(&YoungFunction::Sampled(g));
    let e = p.p() - 1.0;
    let theta_fn = YoungFunction::Sampled(theta);
    let cap = theta_fn.cap().map(|c| c.powf(1.0 / e));
    let v: Vec<f64> = t
        .iter()
        .map(|&s| if cap.is_some_and(|c| s > c) { f64::INFINITY } else { theta_fn.value(s.powf(e)) })
        .collect();
    Ok((
        YoungFunction::Sampled(SampledYoung { t, v, cap }),
        OrliczHypotheses {
            index,
            conjugate_power_at_zero: power_at_zero,
        },
    ))
}

/// `G(t) = t int_0^t Phi~(r) / r^2 dr` on the grid, integrating the log-log interpolant exactly.
fn cumulative_transform(conj: &YoungFunction, t: &[f64], power_at_zero: f64) -> SampledYoung {
    let cap = conj.cap();
    let phi: Vec<f64> = t.iter().map(|&x| conj.value(x)).collect();
    let mut integral = if phi[0] > 0.0 && power_at_zero.is_finite() {
        phi[0] / (t[0] * (power_at_zero - 1.0))
    } else {
        0.0
    };
    let mut v = Vec::with_capacity(t.len());
    v.push(t[0] * integral);
    for j in 0..t.len() - 1 {
        let (a, b, fa, fb) = (t[j], t[j + 1], phi[j], phi[j + 1]);
        let piece = if !fb.is_finite() {
            f64::INFINITY
        } else if fa > 0.0 && fb > 0.0 {
            let k = (fb / fa).ln() / (b / a).ln();
            if (k - 1.0).abs() < 1e-12 {
                fa / a * (b / a).ln()
            } else {
                fa * a.powf(-k) * (b.powf(k - 1.0) - a.powf(k - 1.0)) / (k - 1.0)
            }
        } else if fa == 0.0 && fb == 0.0 {
            0.0
        } else {
            // Linear interpolant between the two values.
            let slope = (fb - fa) / (b - a);
            let intercept = fa - slope * a;
            slope * (b / a).ln() + intercept * (1.0 / a - 1.0 / b)
        };
        integral += piece;
        v.push(t[j + 1] * integral);
    }
    SampledYoung {
        t: t.to_vec(),
        v,
        cap,
    }
}

const GL_NODES: [f64; 4] = [0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363];
const GL_WEIGHTS: [f64; 4] = [0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];

/// Eight-point Gauss-Legendre nodes on `[a, b]`, pushed as `(x, weight)`.
fn gauss_panel(a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        out.push((mid - half * x, half * w));
        out.push((mid + half * x, half * w));
    }
}

/// A nonincreasing function on `(0, inf)` known through quadrature nodes, plus an
/// optional exact tail `c s^{-e}` on `(s0, inf)`.
#[derive(Clone, Debug, Default)]
pub struct DecreasingSamples {
    /// `(s, weight, value)`; zero-weight nodes mark right endpoints for suprema.
    nodes: Vec<(f64, f64, f64)>,
    tail: Option<(f64, f64, f64)>,
}

impl DecreasingSamples {
    fn map_values(&self, f: impl Fn(f64) -> f64, tail_power: f64) -> Self {
        Self {
            nodes: self.nodes.iter().map(|&(s, w, g)| (s, w, f(g))).collect(),
            tail: self.tail.map(|(s0, c, e)| (s0, f(c), e * tail_power)),
        }
    }

    /// `int g^q`, or its supremum for `q = inf`.
    fn lebesgue(&self, q: f64) -> f64 {
        if q.is_infinite() {
            let node_sup = self.nodes.iter().map(|n| n.2).fold(0.0, f64::max);
            let tail_sup = self.tail.map_or(0.0, |(s0, c, e)| c * s0.powf(-e));
            return node_sup.max(tail_sup);
        }
        let body: f64 = self.nodes.iter().map(|&(_, w, g)| w * g.powf(q)).sum();
        let tail = self.tail.map_or(0.0, |(s0, c, e)| {
            let k = e * q;
            if k > 1.0 {
                c.powf(q) * s0.powf(1.0 - k) / (k - 1.0)
            } else {
                f64::INFINITY
            }
        });
        (body + tail).powf(1.0 / q)
    }

    fn lorentz(&self, q: f64, r: f64) -> f64 {
        if q.is_infinite() {
            return self.lebesgue(f64::INFINITY);
        }
        if r.is_infinite() {
            let node_sup = self.nodes.iter().map(|&(s, _, g)| s.powf(1.0 / q) * g).fold(0.0, f64::max);
            let tail_sup = self.tail.map_or(0.0, |(s0, c, e)| {
                if 1.0 / q > e {
                    f64::INFINITY
                } else {
                    c * s0.powf(1.0 / q - e)
                }
            });
            return node_sup.max(tail_sup);
        }
        let k = r / q;
        let body: f64 = self.nodes.iter().map(|&(s, w, g)| w * s.powf(k - 1.0) * g.powf(r)).sum();
        let tail = self.tail.map_or(0.0, |(s0, c, e)| {
            let decay = e * r - k;
            if decay > 0.0 {
                c.powf(r) * s0.powf(-decay) / decay
            } else {
                f64::INFINITY
            }
        });
        ((body + tail) / k).powf(1.0 / r)
    }

    fn modular(&self, phi: &YoungFunction, lambda: f64) -> f64 {
        let body: f64 = self.nodes.iter().map(|&(_, w, g)| w * phi.value(g / lambda)).sum();
        let tail = self.tail.map_or(0.0, |(s0, c, e)| {
            let x = c * s0.powf(-e) / lambda;
            let k = phi.log_slope(x) * e;
            if k > 1.0 {
                phi.value(x) * s0 / (k - 1.0)
            } else {
                f64::INFINITY
            }
        });
        body + tail
    }

    fn sup(&self) -> f64 {
        self.lebesgue(f64::INFINITY)
    }
}

/// A rearrangement-invariant norm on functions of `(0, inf)`.
#[derive(Clone, Debug, PartialEq)]
pub enum RiNorm {
    Lebesgue(f64),
    Lorentz { q: f64, r: f64 },
    Orlicz(YoungFunction),
}

impl RiNorm {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Lebesgue(q) if *q >= 1.0 => Ok(()),
            Self::Lebesgue(q) => Err(Error::InvalidArgument(format!("Lebesgue exponent {q} < 1"))),
            Self::Lorentz { q, r } => check_lorentz(*q, *r),
            Self::Orlicz(_) => Ok(()),
        }
    }

    pub fn of_step(&self, sf: &StepFunction) -> Result<f64> {
        match self {
            Self::Lebesgue(q) => sf.lebesgue_norm(*q),
            Self::Lorentz { q, r } => sf.lorentz_norm(*q, *r),
            Self::Orlicz(phi) => sf.luxemburg_norm(phi),
        }
    }

    fn of_samples(&self, g: &DecreasingSamples) -> Result<f64> {
        match self {
            Self::Lebesgue(q) => Ok(g.lebesgue(*q)),
            Self::Lorentz { q, r } => {
                check_lorentz(*q, *r)?;
                Ok(g.lorentz(*q, *r))
            }
            Self::Orlicz(phi) => {
                let sup = g.sup();
                if sup == 0.0 {
                    Ok(0.0)
                } else {
                    luxemburg(|lambda| g.modular(phi, lambda), sup)
                }
            }
        }
    }

    /// The functional `||f||_{X^a} = || |f|^a ||_X^{1/a}` on a step function.
    pub fn power_functional_step(&self, sf: &StepFunction, a: f64) -> Result<f64> {
        Ok(self.of_step(&sf.powf(a))?.powf(1.0 / a))
    }

    fn power_functional_samples(&self, g: &DecreasingSamples, a: f64) -> Result<f64> {
        Ok(self.of_samples(&g.map_values(|x| x.powf(a), a))?.powf(1.0 / a))
    }
}

/// Quadrature representation of `f**` for a step function, on `(0, horizon)`.
fn double_star_samples(sf: &StepFunction, horizon: Option<f64>) -> DecreasingSamples {
    let end = horizon.unwrap_or(f64::INFINITY);
    let mut out = DecreasingSamples::default();
    let mut acc = 0.0;
    let mut panel = Vec::new();
    for (a, b, v) in sf.intervals() {
        if a >= end {
            break;
        }
        let b_eff = b.min(end);
        if a == 0.0 {
            out.nodes.push((0.5 * b_eff, b_eff, v));
        } else {
            log_panels(a, b_eff, &mut panel);
            for &(s, w) in &panel {
                out.nodes.push((s, w, (acc + v * (s - a)) / s));
            }
        }
        out.nodes.push((b_eff, 0.0, (acc + v * (b_eff - a)) / b_eff));
        acc += v * (b - a);
    }
    let total = sf.total_measure();
    if total < end && acc > 0.0 {
        match horizon {
            None => out.tail = Some((total, acc, 1.0)),
            Some(h) => {
                log_panels(total, h, &mut panel);
                for &(s, w) in &panel {
                    out.nodes.push((s, w, acc / s));
                }
            }
        }
    }
    out
}

/// Gauss-Legendre nodes in `ln s` over `[a, b]`, as `(s, ds-weight)` pairs.
fn log_panels(a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
    out.clear();
    let (la, lb) = (a.ln(), b.ln());
    let panels = ((lb - la) / 0.5).ceil().max(1.0) as usize;
    let width = (lb - la) / panels as f64;
    let mut raw = Vec::new();
    for k in 0..panels {
        gauss_panel(la + k as f64 * width, la + (k + 1) as f64 * width, &mut raw);
    }
    out.extend(raw.into_iter().map(|(x, w)| {
        let s = x.exp();
        (s, w * s)
    }));
}

/// For each `phi` in the family, `||phi**||_{X^{1/p'}} / ||phi||_{X^{1/p'}}`, where the
/// running average of a nonincreasing `phi` is `phi**`. With a finite horizon both sides
/// are restricted to `(0, horizon)`.
pub fn hardy_check_avg(
    norm: &RiNorm,
    p: crate::nfunc::Exponent,
    family: &[StepFunction],
    horizon: Option<f64>,
) -> Result<Vec<f64>> {
    norm.validate()?;
    let a = 1.0 / p.pprime();
    family
        .iter()
        .map(|phi| {
            let phi = horizon.map_or_else(|| phi.clone(), |h| phi.truncated(h));
            let denom = norm.power_functional_step(&phi, a)?;
            if denom == 0.0 {
                return Ok(0.0);
            }
            let avg = double_star_samples(&phi, horizon);
            Ok(norm.power_functional_samples(&avg, a)? / denom)
        })
        .collect()
}

/// Quadrature representation of `int_s^inf phi(r) dr / r`, which is nonincreasing.
fn tail_samples(profile: &StepProfile) -> DecreasingSamples {
    let mut out = DecreasingSamples::default();
    let mut panel = Vec::new();
    let mut above = 0.0;
    for &(a, b, v) in profile.pieces.iter().rev() {
        let base = above;
        if a > 0.0 {
            log_panels(a, b, &mut panel);
            for &(s, w) in &panel {
                out.nodes.push((s, w, base + v * (b / s).ln()));
            }
        } else {
            // s = b e^{-u} on (0, b): integrate in u up to where s underflows.
            let mut raw = Vec::new();
            for k in 0..700 {
                gauss_panel(k as f64, (k + 1) as f64, &mut raw);
            }
            for (u, w) in raw {
                let s = b * (-u).exp();
                out.nodes.push((s, w * s, base + v * u));
            }
        }
        out.nodes.push((b, 0.0, base));
        if a == 0.0 {
            break;
        }
        above = base + v * (b / a).ln();
        // Between pieces the tail integral is constant.
        let gap_end = profile.pieces.iter().rev().find(|p| p.1 <= a).map_or(0.0, |p| p.1);
        if gap_end < a {
            out.nodes.push((0.5 * (gap_end + a), a - gap_end, above));
            out.nodes.push((a, 0.0, above));
        }
    }
    out
}

/// For each `phi`, `||int_s^inf phi dr/r||_Y / ||phi||_X`.
pub fn hardy_check_tail(norm_x: &RiNorm, norm_y: &RiNorm, family: &[StepProfile]) -> Result<Vec<f64>> {
    norm_x.validate()?;
    norm_y.validate()?;
    family
        .iter()
        .map(|phi| {
            let denom = norm_x.of_step(&phi.rearranged())?;
            if denom == 0.0 {
                return Ok(0.0);
            }
            Ok(norm_y.of_samples(&tail_samples(phi))? / denom)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfunc::Exponent;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn random_step(values: &[f64]) -> StepFunction {
        let measures: Vec<f64> = (0..values.len()).map(|k| 0.1 + 0.05 * (k % 7) as f64).collect();
        StepFunction::from_values(values, &measures).unwrap()
    }

    #[test]
    fn sorting_oracle() {
        let sf = StepFunction::from_values(&[3.0, 1.0, 2.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(sf.pieces(), &[(1.0, 3.0), (1.0, 2.0), (1.0, 1.0)]);
        let c = StepFunction::from_values(&[-2.0, 2.0, 2.0], &[0.5, 0.25, 0.25]).unwrap();
        assert_eq!(c.pieces(), &[(1.0, 2.0)]);
        assert!(StepFunction::from_pieces(vec![(1.0, 1.0), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn double_star_cases() {
        let ind = StepFunction::indicator(1.0, 1.0).unwrap();
        assert_eq!(ind.double_star(2.0).unwrap(), 0.5);
        assert_eq!(ind.double_star(0.5).unwrap(), 1.0);
        assert!(ind.double_star(0.0).is_err());
    }

    #[test]
    fn lorentz_closed_forms() {
        let t = 0.37;
        let ind = StepFunction::indicator(t, 1.0).unwrap();
        for &(q, r) in &[(2.0f64, 1.0f64), (3.0, 5.0), (1.5, 1.5), (4.0, 2.0)] {
            let expected = (q / r).powf(1.0 / r) * t.powf(1.0 / q);
            assert_relative_eq!(ind.lorentz_norm(q, r).unwrap(), expected, max_relative = 1e-12);
        }
        assert_relative_eq!(ind.lorentz_norm(2.0, f64::INFINITY).unwrap(), t.sqrt(), max_relative = 1e-14);
        assert_eq!(ind.lorentz_norm(f64::INFINITY, f64::INFINITY).unwrap(), 1.0);
        assert!(ind.lorentz_norm(0.5, 1.0).is_err());
        assert!(ind.lorentz_norm(1.0, 2.0).is_err());
        assert!(ind.lorentz_norm(f64::INFINITY, 2.0).is_err());
    }

    #[test]
    fn marcinkiewicz_cases() {
        let c = StepFunction::indicator(2.5, 3.0).unwrap();
        assert_eq!(c.marcinkiewicz_norm(|s| s), 7.5);
        let f = random_step(&[4.0, 1.0, 2.0]);
        assert_eq!(f.marcinkiewicz_norm(|_| 1.0), 4.0);
        let zero = StepFunction::indicator(1.0, 0.0).unwrap();
        assert_eq!(zero.marcinkiewicz_norm(|s| s), 0.0);
    }

    #[test]
    fn luxemburg_cases() {
        let sf = random_step(&[0.3, 2.0, 1.1, 0.7, 5.0]);
        for &q in &[1.0, 2.0, 3.5] {
            let phi = YoungFunction::power(q).unwrap();
            assert_relative_eq!(
                sf.luxemburg_norm(&phi).unwrap(),
                sf.lebesgue_norm(q).unwrap(),
                max_relative = 1e-10
            );
        }
        let m = 0.2;
        let ind = StepFunction::indicator(m, 1.0).unwrap();
        let got = ind.luxemburg_norm(&YoungFunction::power(3.0).unwrap()).unwrap();
        assert_relative_eq!(got, m.powf(1.0 / 3.0), max_relative = 1e-10);
        let zero = StepFunction::indicator(1.0, 0.0).unwrap();
        assert_eq!(zero.luxemburg_norm(&YoungFunction::power(2.0).unwrap()).unwrap(), 0.0);
        let capped = ind.luxemburg_norm(&YoungFunction::linf_cap(2.0).unwrap()).unwrap();
        assert!(capped >= 1.0 - 1e-10);
    }

    #[test]
    fn power_conjugates() {
        let p = 3.0;
        let phi = YoungFunction::power_scaled(p, 1.0 / p).unwrap();
        match phi.conjugate() {
            YoungFunction::Power { q, scale } => {
                let pp = p / (p - 1.0);
                assert_relative_eq!(q, pp, max_relative = 1e-14);
                assert_relative_eq!(scale, 1.0 / pp, max_relative = 1e-14);
            }
            other => panic!("expected closed form, got {other:?}"),
        }
        let lin = YoungFunction::power(1.0).unwrap().conjugate();
        assert_eq!(lin.value(0.5), 0.0);
        assert_eq!(lin.value(1.0), 0.0);
        assert!(lin.value(1.01).is_infinite());
    }

    #[test]
    fn numeric_conjugate_matches_closed_form() {
        let q = 2.5;
        let sampled = YoungFunction::Sampled(YoungFunction::power(q).unwrap().sample());
        let numeric = sampled.conjugate();
        let exact = YoungFunction::power(q).unwrap().conjugate();
        for &t in &[1e-4, 0.1, 1.0, 10.0, 1e4] {
            assert_relative_eq!(numeric.value(t), exact.value(t), max_relative = 1e-6);
        }
        let bi = numeric.conjugate();
        for &t in &[1e-3, 1.0, 1e3] {
            assert_relative_eq!(bi.value(t), t.powf(q), max_relative = 1e-2);
        }
    }

    #[test]
    fn conjugate_of_capped_power() {
        let phi = YoungFunction::linf_cap(2.0).unwrap();
        let c = phi.conjugate();
        // t <= 2: t^2 / 4; beyond, t - 1 (sup attained at s = 1).
        assert_relative_eq!(c.value(1.0), 0.25, max_relative = 1e-8);
        assert_relative_eq!(c.value(10.0), 9.0, max_relative = 1e-8);
    }

    #[test]
    fn exp_type_is_convex_and_superpower() {
        let phi = YoungFunction::exp_type(1.0, 2.0).unwrap();
        assert!(SampledYoung::new(
            log_grid(1e-4, 1e2, 16),
            log_grid(1e-4, 1e2, 16).iter().map(|&t| phi.value(t)).collect(),
            None
        )
        .is_ok());
        assert_eq!(phi.min_log_slope(), 2.0);
        assert!(phi.log_slope(3.0) > 4.0);
    }

    #[test]
    fn sampled_rejects_concave_data() {
        let t = vec![1.0, 2.0, 3.0];
        assert!(YoungFunction::sampled(t.clone(), vec![1.0, 3.0, 4.0]).is_err());
        assert!(YoungFunction::sampled(t, vec![1.0, 2.0, 4.0]).is_ok());
    }

    #[test]
    fn orlicz_target_of_power_is_power() {
        let p = Exponent::new(3.0).unwrap();
        let q = 2.0;
        let psi = orlicz_target(&YoungFunction::power(q).unwrap(), p).unwrap();
        for &t in &[1e-3, 1.0, 1e3] {
            assert!((psi.log_slope(t) - q * (p.p() - 1.0)).abs() < 0.02 * q * (p.p() - 1.0));
        }
        let fails = orlicz_target(&YoungFunction::power(p.pprime()).unwrap(), p);
        assert!(matches!(fails, Err(Error::Hypothesis(_))));
    }

    #[test]
    fn hardy_avg_indicator_closed_form() {
        let p = Exponent::new(2.0).unwrap();
        let q = 3.0;
        let beta = q / p.pprime();
        let r = hardy_check_avg(&RiNorm::Lebesgue(q), p, &[StepFunction::indicator(1.0, 1.0).unwrap()], None).unwrap();
        assert_relative_eq!(r[0], (beta / (beta - 1.0)).powf(1.0 / beta), max_relative = 1e-10);
        let flat = hardy_check_avg(&RiNorm::Lebesgue(q), p, &[StepFunction::indicator(2.0, 1.0).unwrap()], Some(2.0)).unwrap();
        assert_relative_eq!(flat[0], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn hardy_tail_of_shifted_indicator() {
        let phi = StepProfile::new(vec![(1.0, 2.0, 1.0)]).unwrap();
        assert_relative_eq!(phi.tail_integral(0.5), 2f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(phi.tail_integral(1.5), (2.0f64 / 1.5).ln(), max_relative = 1e-15);
        assert_eq!(phi.tail_integral(3.0), 0.0);
        // ||T||_1 = int_0^1 ln 2 + int_1^2 ln(2/s) = ln 2 + (1 - ln 2); ||phi||_1 = 1.
        let r = hardy_check_tail(&RiNorm::Lebesgue(1.0), &RiNorm::Lebesgue(1.0), &[phi]).unwrap();
        assert_relative_eq!(r[0], 1.0, max_relative = 1e-10);
        assert!(StepProfile::new(vec![(1.0, f64::INFINITY, 1.0)]).is_err());
        let zero = StepProfile::new(vec![]).unwrap();
        assert_eq!(hardy_check_tail(&RiNorm::Lebesgue(2.0), &RiNorm::Lebesgue(2.0), &[zero]).unwrap()[0], 0.0);
    }

    #[test]
    fn tail_integral_matches_quadrature_nodes() {
        let phi = StepProfile::new(vec![(0.0, 0.5, 2.0), (1.0, 3.0, 0.5), (4.0, 4.5, 1.0)]).unwrap();
        let samples = tail_samples(&phi);
        for &(s, _, g) in &samples.nodes {
            assert_relative_eq!(g, phi.tail_integral(s), max_relative = 1e-10, epsilon = 1e-14);
        }
        // Total measure of the quadrature equals the support of the tail.
        let measure: f64 = samples.nodes.iter().map(|n| n.1).sum();
        assert_relative_eq!(measure, 4.5, max_relative = 1e-9);
    }

    proptest! {
        #[test]
        fn star_below_double_star(values in proptest::collection::vec(0.0..10.0f64, 1..30), s in 1e-3..5.0f64) {
            let sf = random_step(&values);
            prop_assert!(sf.value_at(s) <= sf.double_star(s).unwrap() * (1.0 + 1e-14) + 1e-300);
        }

        #[test]
        fn lorentz_diagonal_is_lebesgue(values in proptest::collection::vec(0.0..10.0f64, 1..30), q in 1.0..6.0f64) {
            let sf = random_step(&values);
            let l = sf.lorentz_norm(q, q).unwrap();
            let direct = sf.lebesgue_norm(q).unwrap();
            prop_assert!((l - direct).abs() <= 1e-12 * direct.max(1e-300));
        }

        #[test]
        fn norms_are_homogeneous(values in proptest::collection::vec(0.01..10.0f64, 1..20), lambda in 0.01..100.0f64) {
            let sf = random_step(&values);
            let scaled = sf.scale(lambda);
            let a = sf.lorentz_norm(3.0, 2.0).unwrap();
            prop_assert!((scaled.lorentz_norm(3.0, 2.0).unwrap() - lambda * a).abs() <= 1e-12 * lambda * a);
            let phi = YoungFunction::exp_type(1.0, 2.0).unwrap();
            let b = sf.luxemburg_norm(&phi).unwrap();
            prop_assert!((scaled.luxemburg_norm(&phi).unwrap() - lambda * b).abs() <= 1e-9 * lambda * b);
        }

        #[test]
        fn lattice_property(values in proptest::collection::vec(0.0..10.0f64, 1..20), bumps in proptest::collection::vec(0.0..3.0f64, 20)) {
            let measures: Vec<f64> = (0..values.len()).map(|k| 0.1 + 0.01 * k as f64).collect();
            let bigger: Vec<f64> = values.iter().zip(&bumps).map(|(v, b)| v + b).collect();
            let f = StepFunction::from_values(&values, &measures).unwrap();
            let g = StepFunction::from_values(&bigger, &measures).unwrap();
            let phi = YoungFunction::power(2.5).unwrap();
            prop_assert!(f.lorentz_norm(2.0, 3.0).unwrap() <= g.lorentz_norm(2.0, 3.0).unwrap() * (1.0 + 1e-12));
            prop_assert!(f.lebesgue_norm(1.5).unwrap() <= g.lebesgue_norm(1.5).unwrap() * (1.0 + 1e-12));
            if !g.is_zero() && !f.is_zero() {
                prop_assert!(f.luxemburg_norm(&phi).unwrap() <= g.luxemburg_norm(&phi).unwrap() * (1.0 + 1e-9));
            }
            prop_assert!(f.marcinkiewicz_norm(|s| s.sqrt()) <= g.marcinkiewicz_norm(|s| s.sqrt()) * (1.0 + 1e-12));
        }
    }
}
