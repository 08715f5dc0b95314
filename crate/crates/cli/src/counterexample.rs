//! Triangle-violation search for the DHV metric on the unit disk.
//!
//! Triples are enumerated by a global index: first the diametral triples
//! `(-a, 0), (a, 0), (0, 0)` for the sweep radii, then seeded random triples.
//! Even random indices draw three sample points of the space, odd ones draw
//! three fresh points whose distance to the boundary is log-uniform in
//! `[1e-6, 1]`. Every triple depends only on its index and the seed.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use hyptype_core::obstacle::ObstacleSet;
use hyptype_core::sampling::{distinct_indices, sample_rng, Extremum};
use hyptype_core::spaces::DISK_HARD_LIMIT;
use hyptype_core::{rho_unchecked, MetricFamily, Result, SampledSpace, TOL_ABS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Diametral,
    Sample,
    Random,
}

/// A triple with `h(x, z) + h(z, y) - h(x, y) = defect`, `z` the middle point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub index: u64,
    pub stage: Stage,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub h_xy: f64,
    pub h_xz: f64,
    pub h_zy: f64,
    pub defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub c: f64,
    pub budget: u64,
    pub checked: u64,
    pub sweep_radii: Vec<f64>,
    pub violations: u64,
    pub found: bool,
    /// Violation with the smallest index.
    pub first: Option<Violation>,
    /// Most negative defect.
    pub worst: Option<Violation>,
    /// Whether a violation is expected (`c < 2`).
    pub expected: bool,
}

impl SearchOutcome {
    pub fn matches_theory(&self) -> bool {
        self.found == self.expected
    }
}

/// Sweep radii: the ring radii of the sample, then `1 - 10^-s` for
/// `s = 1, 1.25, ..., 6`.
pub fn sweep_radii(space: &SampledSpace) -> Vec<f64> {
    let mut radii: Vec<f64> = space
        .points()
        .unwrap_or(&[])
        .iter()
        .map(|p| p.iter().map(|a| a * a).sum::<f64>().sqrt())
        .filter(|r| *r > 0.0 && *r <= DISK_HARD_LIMIT)
        .collect();
    radii.sort_unstable_by(f64::total_cmp);
    radii.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    radii.extend((0..=20).map(|k| 1.0 - 10f64.powf(-(1.0 + 0.25 * k as f64))));
    radii
}

struct Search<'a> {
    family: MetricFamily,
    space: &'a SampledSpace,
    obstacle: &'a ObstacleSet,
    radii: Vec<f64>,
    seed: u64,
}

type Triple = ([Vec<f64>; 3], Stage, Option<f64>);

impl Search<'_> {
    fn triple(&self, index: u64) -> Triple {
        if let Some(&a) = self.radii.get(index as usize) {
            return (
                [vec![-a, 0.0], vec![a, 0.0], vec![0.0, 0.0]],
                Stage::Diametral,
                Some(a),
            );
        }
        let mut rng = sample_rng(self.seed, index);
        let n = self.space.len();
        if index.is_multiple_of(2) && n >= 3 {
            let [i, j, k] = distinct_indices::<3>(&mut rng, n);
            let p = |i| {
                self.space
                    .point(i)
                    .expect("disk spaces have coordinates")
                    .to_vec()
            };
            return ([p(i), p(j), p(k)], Stage::Sample, None);
        }
        let mut point = || {
            let r = 1.0 - 10f64.powf(-6.0 * rng.random::<f64>());
            let theta = 2.0 * PI * rng.random::<f64>();
            let r = r.min(DISK_HARD_LIMIT);
            vec![r * theta.cos(), r * theta.sin()]
        };
        ([point(), point(), point()], Stage::Random, None)
    }

    /// Worst of the three triangle inequalities, as `(defect, middle index)`.
    fn evaluate(&self, pts: &[Vec<f64>; 3]) -> Result<(f64, usize, [f64; 3])> {
        let f = [
            self.obstacle.dist_to_set(&pts[0])?,
            self.obstacle.dist_to_set(&pts[1])?,
            self.obstacle.dist_to_set(&pts[2])?,
        ];
        let d = |a: usize, b: usize| -> f64 {
            pts[a]
                .iter()
                .zip(&pts[b])
                .map(|(u, v)| (u - v) * (u - v))
                .sum::<f64>()
                .sqrt()
        };
        let h = |a: usize, b: usize| rho_unchecked(self.family, d(a, b), f[a], f[b]);
        // h[k] is the side opposite point k.
        let sides = [h(1, 2), h(0, 2), h(0, 1)];
        let mut best = (f64::INFINITY, 0);
        for mid in 0..3 {
            let defect = sides.iter().sum::<f64>() - 2.0 * sides[mid];
            if defect < best.0 {
                best = (defect, mid);
            }
        }
        Ok((best.0, best.1, sides))
    }

    fn violation(&self, index: u64) -> Result<Violation> {
        let (pts, stage, endpoint_radius) = self.triple(index);
        let (defect, mid, sides) = self.evaluate(&pts)?;
        let (a, b) = match mid {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let [x, y, z] = [pts[a].clone(), pts[b].clone(), pts[mid].clone()];
        Ok(Violation {
            index,
            stage,
            x,
            y,
            z,
            h_xy: sides[mid],
            h_xz: sides[b],
            h_zy: sides[a],
            defect,
            endpoint_radius,
        })
    }
}

#[derive(Clone)]
struct Acc {
    worst: Extremum<1>,
    first: Extremum<1>,
    violations: u64,
}

impl Acc {
    fn new() -> Self {
        Self {
            worst: Extremum::min(),
            first: Extremum::min(),
            violations: 0,
        }
    }

    fn merge(self, other: Self) -> Self {
        Self {
            worst: self.worst.merge(other.worst),
            first: self.first.merge(other.first),
            violations: self.violations + other.violations,
        }
    }
}

/// Scans up to `budget` triples for `h(x,z) + h(z,y) < h(x,y) - TOL_ABS`.
pub fn search(
    family: MetricFamily,
    space: &SampledSpace,
    obstacle: &ObstacleSet,
    budget: u64,
    seed: u64,
) -> Result<SearchOutcome> {
    let MetricFamily::Dhv { c } = family else {
        return Err(hyptype_core::Error::UnsupportedFamily(
            family.tag().to_uppercase(),
        ));
    };
    let search = Search {
        family,
        space,
        obstacle,
        radii: sweep_radii(space),
        seed,
    };
    let acc = (0..budget)
        .into_par_iter()
        .map(|index| -> Result<Acc> {
            let (pts, _, _) = search.triple(index);
            let (defect, _, _) = search.evaluate(&pts)?;
            let mut acc = Acc::new();
            acc.worst.offer(defect, [index as usize]);
            if defect < -TOL_ABS {
                acc.violations = 1;
                acc.first.offer(index as f64, [index as usize]);
            }
            Ok(acc)
        })
        .try_fold(Acc::new, |a, b| b.map(|b| a.merge(b)))
        .try_reduce(Acc::new, |a, b| Ok(a.merge(b)))?;
    let found = acc.violations > 0;
    let first = if found {
        Some(search.violation(acc.first.witness[0] as u64)?)
    } else {
        None
    };
    let worst = if found {
        Some(search.violation(acc.worst.witness[0] as u64)?)
    } else {
        None
    };
    Ok(SearchOutcome {
        c,
        budget,
        checked: budget,
        sweep_radii: search.radii,
        violations: acc.violations,
        found,
        first,
        worst,
        expected: c < 2.0,
    })
}
