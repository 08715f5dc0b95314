//! Dilatation of the identity map from the base metric to a hyperbolic-type
//! metric: sphere-probe estimates, closed-form envelope ratios and small-r
//! extrapolation.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::family::{bound_lower_global, bound_upper_near, rho_unchecked, MetricFamily, Variant};
use crate::obstacle::ObstacleSet;
use crate::sampling::sample_rng;

/// Default probe counts on the circle and on higher-dimensional spheres.
pub const PROBES_2D: usize = 512;
pub const PROBES_ND: usize = 2048;

/// `r / F` values `1e-1, 1e-2, ..., 1e-6`.
pub fn default_grid() -> Vec<f64> {
    (1..=6).map(|k| 10f64.powi(-k)).collect()
}

pub fn default_probes(dim: usize) -> usize {
    if dim == 2 {
        PROBES_2D
    } else {
        PROBES_ND
    }
}

/// `bound_upper_near / bound_lower_global` at radius `r`; requires `0 < r < fx`.
pub fn envelope_ratio(family: MetricFamily, fx: f64, r: f64, variant: Variant) -> Result<f64> {
    if !(r > 0.0 && r < fx) {
        return Err(domain(format!(
            "envelope ratio needs 0 < r < F(x), got r = {r}, F(x) = {fx}"
        )));
    }
    Ok(bound_upper_near(family, r, fx)? / bound_lower_global(family, r, fx, variant)?)
}

/// Weight used by the sphere probes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeightField {
    DistToObstacle { obstacle: ObstacleSet },
    Constant { value: f64 },
}

impl WeightField {
    pub fn at(&self, x: &[f64]) -> Result<f64> {
        match self {
            WeightField::DistToObstacle { obstacle } => obstacle.dist_to_set(x),
            WeightField::Constant { value } => Ok(*value),
        }
    }
}

/// Unit direction number `k` of `n` in dimension `dim`.
fn direction(dim: usize, k: usize, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = sample_rng(seed, k as u64);
    match dim {
        1 => vec![if k.is_multiple_of(2) { 1.0 } else { -1.0 }],
        2 => {
            let theta = 2.0 * PI * (k as f64 + rng.random::<f64>()) / n as f64;
            vec![theta.cos(), theta.sin()]
        }
        _ => loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break v.into_iter().map(|a| a / norm).collect();
            }
        },
    }
}

/// Ratio of the largest to the smallest `rho(x, p)` over `n_probes` points
/// `p` at distance exactly `r` from `x`.
///
/// With an obstacle weight `r` must be below `dist(x, M)`; probes falling in
/// `M` are discarded.
pub fn dilatation_empirical(
    family: MetricFamily,
    field: &WeightField,
    x: &[f64],
    r: f64,
    n_probes: usize,
    seed: u64,
) -> Result<f64> {
    if x.is_empty() {
        return Err(domain("center must have at least one coordinate"));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(domain(format!("probe radius must be positive, got {r}")));
    }
    let fx = field.at(x)?;
    if !(fx > 0.0) {
        return Err(domain("center lies in the obstacle"));
    }
    if matches!(field, WeightField::DistToObstacle { .. }) && r >= fx {
        return Err(domain(format!(
            "probe radius {r} must be below dist(x, M) = {fx}"
        )));
    }
    let values: Vec<Option<f64>> = (0..n_probes)
        .into_par_iter()
        .map(|k| -> Result<Option<f64>> {
            let u = direction(x.len(), k, n_probes, seed);
            let p: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + r * b).collect();
            let fp = field.at(&p)?;
            Ok((fp > 0.0).then(|| rho_unchecked(family, r, fx, fp)))
        })
        .collect::<Result<_>>()?;
    let (lo, hi) = values
        .into_iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return Err(Error::Probe(n_probes));
    }
    Ok(hi / lo)
}

/// Estimate of `lim_{r -> 0}` from values on a geometric radius grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrapolation {
    /// Value at the smallest radius.
    pub value: f64,
    pub converged: bool,
}

/// Takes the value at the smallest radius of a decreasing geometric grid
/// with ratio `ratio > 1`. It is flagged converged when every successive
/// difference shrinks by at least `√ratio` without changing sign, or is at
/// rounding level.
pub fn extrapolate_limit(values: &[f64], ratio: f64) -> Result<Extrapolation> {
    if values.len() < 3 {
        return Err(domain(format!(
            "extrapolation needs at least 3 radii, got {}",
            values.len()
        )));
    }
    if !(ratio > 1.0) {
        return Err(domain(format!("grid ratio must exceed 1, got {ratio}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(domain("profile values must be finite"));
    }
    let value = *values.last().unwrap();
    let floor = 1e-12 * value.abs().max(1.0);
    let shrink = ratio.sqrt();
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let converged = diffs.windows(2).all(|d| {
        let (prev, next) = (d[0], d[1]);
        if next.abs() <= floor {
            return true;
        }
        prev.abs() > floor && prev.signum() == next.signum() && next.abs() * shrink <= prev.abs()
    });
    Ok(Extrapolation { value, converged })
}

/// Empirical and envelope dilatation over a radius grid at one center.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilatationProfile {
    pub family: MetricFamily,
    pub variant: Variant,
    pub center: Vec<f64>,
    pub fx: f64,
    /// Radii as fractions of `F(center)`, strictly decreasing.
    pub radii: Vec<f64>,
    pub h_hat: Vec<f64>,
    pub h_env: Vec<f64>,
    pub envelope_limit: Extrapolation,
    pub empirical_limit: Extrapolation,
    /// Certified limit of the envelope ratio.
    pub expected_limit: f64,
}

/// Evaluates [`dilatation_empirical`] and [`envelope_ratio`] at `r = s F(x)`
/// for every fraction `s` of the grid.
pub fn dilatation_profile(
    family: MetricFamily,
    variant: Variant,
    field: &WeightField,
    x: &[f64],
    fractions: &[f64],
    n_probes: usize,
    seed: u64,
) -> Result<DilatationProfile> {
    if fractions.iter().any(|s| !(*s > 0.0 && *s < 1.0)) {
        return Err(domain("radius fractions must lie in (0, 1)"));
    }
    if fractions.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(domain("radius fractions must be strictly decreasing"));
    }
    let fx = field.at(x)?;
    let mut h_hat = Vec::with_capacity(fractions.len());
    let mut h_env = Vec::with_capacity(fractions.len());
    for &s in fractions {
        let r = s * fx;
        h_hat.push(dilatation_empirical(family, field, x, r, n_probes, seed)?);
        h_env.push(envelope_ratio(family, fx, r, variant)?);
    }
    let grid_ratio = match fractions {
        [a, b, ..] => a / b,
        _ => 10.0,
    };
    let extrapolate = |v: &[f64]| {
        extrapolate_limit(v, grid_ratio).unwrap_or(Extrapolation {
            value: *v.last().unwrap_or(&f64::NAN),
            converged: false,
        })
    };
    Ok(DilatationProfile {
        family,
        variant,
        center: x.to_vec(),
        fx,
        radii: fractions.to_vec(),
        envelope_limit: extrapolate(&h_env),
        empirical_limit: extrapolate(&h_hat),
        h_hat,
        h_env,
        expected_limit: family.dilatation_limit(variant),
    })
}
