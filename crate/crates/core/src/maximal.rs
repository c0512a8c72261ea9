//! Centered discrete maximal operators on element fields.
//!
//! All operators take the supremum over a finite set of radii of a ball average
//! built from the elements whose barycenters lie in the open ball.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{self, ElemField, Mesh};
use crate::oscillation::Modulus;
use crate::rearrange;

/// How balls that leave the mesh rectangle are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Containment {
    /// Evaluation points closer than `r_max` to the boundary are rejected.
    #[default]
    Strict,
    /// Balls are intersected with the mesh.
    Clip,
}

/// Radii `r_max ratio^k >= r_min`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiiSet {
    pub r_min: f64,
    pub r_max: f64,
    pub ratio: f64,
    pub containment: Containment,
}

impl RadiiSet {
    pub fn new(r_min: f64, r_max: f64, ratio: f64) -> Result<Self> {
        if !(r_min > 0.0 && r_min <= r_max && r_max.is_finite() && ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "radii need 0 < r_min <= r_max and ratio in (0, 1), got {r_min}, {r_max}, {ratio}"
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            ratio,
            containment: Containment::Strict,
        })
    }

    pub fn dyadic(r_min: f64, r_max: f64) -> Result<Self> {
        Self::new(r_min, r_max, 0.5)
    }

    pub fn clipped(mut self) -> Self {
        self.containment = Containment::Clip;
        self
    }

    /// Decreasing list of radii.
    pub fn radii(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut r = self.r_max;
        while r >= self.r_min * (1.0 - 1e-12) {
            out.push(r);
            r *= self.ratio;
        }
        out
    }

    fn admit(&self, mesh: &Mesh, x: [f64; 2], needed: f64) -> Result<()> {
        if self.containment == Containment::Strict && mesh.bounds().boundary_distance(x) < needed {
            return Err(Error::TooCloseToBoundary {
                x: x[0],
                y: x[1],
                margin: needed,
            });
        }
        Ok(())
    }
}

fn sup_over_radii(
    mesh: &Mesh,
    q: f64,
    radii: &[f64],
    x: [f64; 2],
    value: impl Fn(f64, &[usize]) -> f64,
) -> Result<f64> {
    mesh::check_q(q)?;
    let mut best: f64 = 0.0;
    for &r in radii {
        let elements = mesh.ball_elements(x, r)?;
        best = best.max(value(r, &elements));
    }
    Ok(best)
}

/// `max_r osc_q(f; B_r(x))`.
pub fn sharp_maximal(mesh: &Mesh, f: &ElemField, q: f64, radii: &RadiiSet, x: [f64; 2]) -> Result<f64> {
    radii.admit(mesh, x, radii.r_max)?;
    sup_over_radii(mesh, q, &radii.radii(), x, |_, els| {
        let mean = mesh::weighted_mean(mesh, f, els);
        mesh::oscillation_about(mesh, f, els, &mean, q)
    })
}

/// `max_{r < R} osc_q(f; B_r(x)) / omega(r)`; requires `dist(x, boundary) > R`.
pub fn weighted_local_sharp(
    mesh: &Mesh,
    f: &ElemField,
    q: f64,
    omega: &Modulus,
    big_r: f64,
    radii: &RadiiSet,
    x: [f64; 2],
) -> Result<f64> {
    if !(radii.r_max < big_r) {
        return Err(Error::InvalidArgument(format!(
            "largest radius {} must be below R = {big_r}",
            radii.r_max
        )));
    }
    let margin = mesh.bounds().boundary_distance(x);
    if radii.containment == Containment::Strict && margin <= big_r {
        return Err(Error::TooCloseToBoundary {
            x: x[0],
            y: x[1],
            margin: big_r,
        });
    }
    sup_over_radii(mesh, q, &radii.radii(), x, |r, els| {
        let mean = mesh::weighted_mean(mesh, f, els);
        mesh::oscillation_about(mesh, f, els, &mean, q) / omega.value(r)
    })
}

/// `max_r (mean of |f|^q over B_r(x))^{1/q}`.
pub fn plain_maximal(mesh: &Mesh, f: &ElemField, q: f64, radii: &RadiiSet, x: [f64; 2]) -> Result<f64> {
    radii.admit(mesh, x, radii.r_max)?;
    let zero = vec![0.0; f.stride()];
    sup_over_radii(mesh, q, &radii.radii(), x, |_, els| {
        mesh::oscillation_about(mesh, f, els, &zero, q)
    })
}

/// Elements whose barycenter is at least `margin` from the boundary.
pub fn interior_elements(mesh: &Mesh, margin: f64) -> Vec<usize> {
    let b = mesh.bounds();
    (0..mesh.element_count())
        .filter(|&e| b.boundary_distance(mesh.barycenter(e)) >= margin)
        .collect()
}

/// Evaluates a pointwise operator at the barycenters of `elements` in parallel.
pub fn at_barycenters(
    mesh: &Mesh,
    elements: &[usize],
    op: impl Fn([f64; 2]) -> Result<f64> + Sync,
) -> Result<Vec<f64>> {
    elements.par_iter().map(|&e| op(mesh.barycenter(e))).collect()
}

/// Smallest `C` with `(M^q f)^*(s) <= C ((|f|^q)^{**}(s))^{1/q}` at every breakpoint of the
/// left side, where `M^q f` is evaluated at all barycenters with clipped balls.
pub fn riesz_constant(mesh: &Mesh, f: &ElemField, q: f64, radii: &RadiiSet) -> Result<f64> {
    let radii = radii.clipped();
    let all: Vec<usize> = (0..mesh.element_count()).collect();
    let maximal = at_barycenters(mesh, &all, |x| plain_maximal(mesh, f, q, &radii, x))?;
    let lhs = rearrange::rearrange(mesh, &maximal)?;
    let powered: Vec<f64> = f.norms().iter().map(|n| n.powf(q)).collect();
    let rhs = rearrange::rearrange(mesh, &powered)?;
    let mut worst: f64 = 0.0;
    for (_, b, v) in lhs.intervals() {
        if v == 0.0 {
            continue;
        }
        let avg = rhs.double_star(b)?.powf(1.0 / q);
        if avg == 0.0 {
            return Err(Error::Hypothesis(format!("maximal function positive where f** vanishes (s = {b})")));
        }
        worst = worst.max(v / avg);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn indicator(mesh: &Mesh, cell: usize) -> ElemField {
        let data = (0..mesh.element_count()).map(|e| if e / 2 == cell { 1.0 } else { 0.0 }).collect();
        ElemField::scalar(mesh, data).unwrap()
    }

    /// Brute force: scan every element, mean of |f - mu| over the ball.
    fn brute_sharp(mesh: &Mesh, f: &ElemField, radii: &[f64], x: [f64; 2]) -> f64 {
        let mut best: f64 = 0.0;
        for &r in radii {
            let inside: Vec<usize> = (0..mesh.element_count())
                .filter(|&e| {
                    let c = mesh.barycenter(e);
                    (c[0] - x[0]).powi(2) + (c[1] - x[1]).powi(2) < r * r
                })
                .collect();
            assert_eq!(inside, mesh.ball_elements(x, r).unwrap());
            let covered = inside.iter().filter(|&&e| f.at(e)[0] == 1.0).count() as f64;
            let mu = covered / inside.len() as f64;
            best = best.max(2.0 * mu * (1.0 - mu));
        }
        best
    }

    #[test]
    fn indicator_cases_match_enumeration() {
        for m in [4, 6] {
            let mesh = Mesh::unit_square(m).unwrap();
            let h = mesh.h();
            let radii = RadiiSet::new(h, 4.0 * h, 0.5).unwrap().clipped();
            for cell in 0..m * m {
                let f = indicator(&mesh, cell);
                for e in [2 * cell, 2 * cell + 1] {
                    let x = mesh.barycenter(e);
                    let got = sharp_maximal(&mesh, &f, 1.0, &radii, x).unwrap();
                    let want = brute_sharp(&mesh, &f, &radii.radii(), x);
                    assert!((got - want).abs() <= 1e-15, "m={m} cell={cell}: {got} vs {want}");
                    let plain = plain_maximal(&mesh, &f, 1.0, &radii, x).unwrap();
                    let smallest = mesh.ball_elements(x, h).unwrap();
                    let frac = smallest.iter().filter(|&&k| k / 2 == cell).count() as f64 / smallest.len() as f64;
                    assert!(plain >= frac - 1e-15);
                }
            }
        }
    }

    #[test]
    fn strict_containment_rejects_boundary_points() {
        let mesh = Mesh::unit_square(8).unwrap();
        let f = indicator(&mesh, 0);
        let radii = RadiiSet::dyadic(0.125, 0.5).unwrap();
        assert!(matches!(
            sharp_maximal(&mesh, &f, 1.0, &radii, [0.1, 0.5]),
            Err(Error::TooCloseToBoundary { .. })
        ));
        let omega = Modulus::constant(1.0).unwrap();
        assert!(weighted_local_sharp(&mesh, &f, 1.0, &omega, 0.4, &radii, [0.5, 0.5]).is_err());
    }

    #[test]
    fn weighted_reduces_to_sharp_and_linear_is_flat() {
        let mesh = Mesh::unit_square(64).unwrap();
        let f = ElemField::from_fn(&mesh, 1, 1, |x, t| t[0] = 0.3 * x[0] - 1.2 * x[1]);
        let radii = RadiiSet::dyadic(2.0 * mesh.h(), 0.2).unwrap();
        let x = [0.5, 0.5];
        let one = Modulus::constant(1.0).unwrap();
        assert_eq!(
            weighted_local_sharp(&mesh, &f, 2.0, &one, 0.25, &radii, x).unwrap(),
            sharp_maximal(&mesh, &f, 2.0, &radii, x).unwrap()
        );
        let lin = Modulus::power(1.0).unwrap();
        let per_radius: Vec<f64> = radii
            .radii()
            .iter()
            .map(|&r| mesh::ball_oscillation(&mesh, &f, x, r, 2.0).unwrap().1 / r)
            .collect();
        let max = per_radius.iter().cloned().fold(0.0, f64::max);
        let min = per_radius.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 1.1, "{per_radius:?}");
        let w = weighted_local_sharp(&mesh, &f, 2.0, &lin, 0.25, &radii, x).unwrap();
        assert_eq!(w, max);
    }

    #[test]
    fn constants_and_sharp_bound() {
        let mesh = Mesh::unit_square(16).unwrap();
        let radii = RadiiSet::dyadic(mesh.h(), 0.25).unwrap();
        let c = ElemField::from_fn(&mesh, 1, 2, |_, t| t.copy_from_slice(&[3.0, -4.0]));
        assert_eq!(sharp_maximal(&mesh, &c, 1.5, &radii, [0.5, 0.5]).unwrap(), 0.0);
        assert!((plain_maximal(&mesh, &c, 1.5, &radii, [0.5, 0.5]).unwrap() - 5.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let inner = interior_elements(&mesh, 0.25);
        for _ in 0..20 {
            let data: Vec<f64> = (0..2 * mesh.element_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = ElemField::from_values(&mesh, 1, 2, data).unwrap();
            for q in [1.0, 2.0, 3.5] {
                let s = at_barycenters(&mesh, &inner, |x| sharp_maximal(&mesh, &f, q, &radii, x)).unwrap();
                let p = at_barycenters(&mesh, &inner, |x| plain_maximal(&mesh, &f, q, &radii, x)).unwrap();
                assert!(s.iter().zip(&p).all(|(s, p)| *s <= 2.0 * p));
            }
        }
    }

    #[test]
    fn riesz_constant_is_moderate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mesh = Mesh::unit_square(12).unwrap();
        let data: Vec<f64> = (0..mesh.element_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = ElemField::scalar(&mesh, data).unwrap();
        let radii = RadiiSet::dyadic(mesh.h(), 0.5).unwrap();
        let c = riesz_constant(&mesh, &f, 2.0, &radii).unwrap();
        assert!(c > 0.5 && c < 10.0, "{c}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn translation_scaling_and_jensen(seed in 0u64..1000, lambda in 0.01f64..100.0, shift in -5.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mesh = Mesh::unit_square(8).unwrap();
            let data: Vec<f64> = (0..mesh.element_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = ElemField::scalar(&mesh, data).unwrap();
            let radii = RadiiSet::dyadic(mesh.h(), 0.25).unwrap();
            let x = [0.5, 0.5];
            let base = sharp_maximal(&mesh, &f, 2.0, &radii, x).unwrap();
            let moved = sharp_maximal(&mesh, &f.shifted(&[shift]), 2.0, &radii, x).unwrap();
            prop_assert!((moved - base).abs() <= 1e-9 * (1.0 + base));
            let scaled = sharp_maximal(&mesh, &f.scale(lambda), 2.0, &radii, x).unwrap();
            prop_assert!((scaled - lambda * base).abs() <= 1e-10 * lambda * base.max(1e-300));
            let omega = Modulus::power(0.5).unwrap();
            let w = weighted_local_sharp(&mesh, &f, 2.0, &omega, 0.3, &radii, x).unwrap();
            let w2 = weighted_local_sharp(&mesh, &f.shifted(&[shift]).scale(lambda), 2.0, &omega, 0.3, &radii, x).unwrap();
            prop_assert!((w2 - lambda * w).abs() <= 1e-9 * lambda * (1.0 + w));
            let q1 = sharp_maximal(&mesh, &f, 1.0, &radii, x).unwrap();
            let q3 = sharp_maximal(&mesh, &f, 3.0, &radii, x).unwrap();
            prop_assert!(q1 <= base * (1.0 + 1e-12) && base <= q3 * (1.0 + 1e-12));
        }
    }
}
