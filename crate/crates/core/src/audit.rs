//! Metric-axiom and Lipschitz audits over finite spaces.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampling::{distinct_indices, sample_rng, Extremum, SearchMode};
use crate::space::{SampledSpace, WeightFunction, TOL_ABS, TOL_REL};

/// Outcome of an audit over pairs, triples or quadruples.
///
/// `worst_defect` is the most negative slack found, on the audit's own
/// scale; `violations == 0` exactly when `worst_defect >= -tolerance`.
/// Identity, symmetry and positivity failures of a metric audit are counted
/// separately in `axiom_failures`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub checked: u64,
    pub violations: u64,
    pub worst_defect: f64,
    pub witness: Vec<usize>,
    pub mode: SearchMode,
    pub tolerance: f64,
    pub axiom_failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_ratio: Option<f64>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.axiom_failures == 0
    }
}

#[derive(Clone)]
struct Partial<const K: usize> {
    checked: u64,
    violations: u64,
    axiom_failures: u64,
    worst: Extremum<K>,
}

impl<const K: usize> Partial<K> {
    fn new() -> Self {
        Self {
            checked: 0,
            violations: 0,
            axiom_failures: 0,
            worst: Extremum::min(),
        }
    }

    fn merge(self, other: Self) -> Self {
        Self {
            checked: self.checked + other.checked,
            violations: self.violations + other.violations,
            axiom_failures: self.axiom_failures + other.axiom_failures,
            worst: self.worst.merge(other.worst),
        }
    }

    fn offer(&mut self, defect: f64, witness: [usize; K], tolerance: f64) {
        self.checked += 1;
        if defect < -tolerance {
            self.violations += 1;
        }
        self.worst.offer(defect, witness);
    }

    fn into_report(self, mode: SearchMode, tolerance: f64) -> AuditReport {
        let (worst_defect, witness) = if self.worst.is_set() {
            (self.worst.value, self.worst.witness.to_vec())
        } else {
            (0.0, Vec::new())
        };
        AuditReport {
            checked: self.checked,
            violations: self.violations,
            worst_defect,
            witness,
            mode,
            tolerance,
            axiom_failures: self.axiom_failures,
            worst_ratio: None,
        }
    }
}

/// Lipschitz slack `d(i, j) - |F(i) - F(j)|` of one pair.
pub fn lipschitz_slack(space: &SampledSpace, weights: &WeightFunction, i: usize, j: usize) -> f64 {
    space.dist(i, j) - (weights.get(i) - weights.get(j)).abs()
}

/// Checks `|F(i) - F(j)| <= d(i, j)` over pairs, at absolute tolerance [`TOL_ABS`].
pub fn lipschitz_audit(
    space: &SampledSpace,
    weights: &WeightFunction,
    mode: SearchMode,
) -> Result<AuditReport> {
    let n = space.len();
    if weights.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: weights.len(),
        });
    }
    let partial = match mode {
        SearchMode::Exhaustive => (0..n)
            .into_par_iter()
            .map(|i| {
                let mut p = Partial::<2>::new();
                for j in i + 1..n {
                    p.offer(lipschitz_slack(space, weights, i, j), [i, j], TOL_ABS);
                }
                p
            })
            .reduce(Partial::new, Partial::merge),
        SearchMode::Sampled { samples, seed } if n >= 2 => (0..samples)
            .into_par_iter()
            .map(|s| {
                let [i, j] = distinct_indices::<2>(&mut sample_rng(seed, s), n);
                let mut p = Partial::<2>::new();
                p.offer(lipschitz_slack(space, weights, i, j), [i, j], TOL_ABS);
                p
            })
            .reduce(Partial::new, Partial::merge),
        SearchMode::Sampled { .. } => Partial::new(),
    };
    Ok(partial.into_report(mode, TOL_ABS))
}

impl WeightFunction {
    /// Runs [`lipschitz_audit`] and, for custom tables, records a pass as a
    /// Lipschitz certification.
    pub fn certify_lipschitz(
        &mut self,
        space: &SampledSpace,
        mode: SearchMode,
    ) -> Result<AuditReport> {
        let report = lipschitz_audit(space, self, mode)?;
        self.set_certified(report.passed());
        Ok(report)
    }
}

/// Scaled triangle slack `(rho(x,z) + rho(z,y) - rho(x,y)) / max(1, rho(x,y))`
/// for the witness `[x, y, z]`.
pub fn triangle_slack(rho: impl Fn(usize, usize) -> f64, witness: [usize; 3]) -> f64 {
    let [x, y, z] = witness;
    let direct = rho(x, y);
    (rho(x, z) + rho(z, y) - direct) / direct.max(1.0)
}

fn checked_eval(rho: &impl Fn(usize, usize) -> f64, i: usize, j: usize) -> Result<f64> {
    let v = rho(i, j);
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::Evaluation {
            value: v,
            witness: vec![i, j],
        })
    }
}

/// Identity, symmetry and positivity failures of one unordered pair (or of
/// the diagonal entry when `i == j`).
fn pair_axioms(rho: &impl Fn(usize, usize) -> f64, i: usize, j: usize) -> Result<(f64, u64)> {
    let ij = checked_eval(rho, i, j)?;
    if i == j {
        return Ok((ij, u64::from(ij > TOL_ABS)));
    }
    let ji = checked_eval(rho, j, i)?;
    let asymmetric = (ij - ji).abs() > TOL_REL * ij.max(1.0);
    let degenerate = !(ij > 0.0);
    Ok((ij, u64::from(asymmetric) + u64::from(degenerate)))
}

fn offer_triple(p: &mut Partial<3>, t: impl Fn(usize, usize) -> f64, i: usize, j: usize, k: usize) {
    for w in [[i, j, k], [i, k, j], [j, k, i]] {
        p.offer(triangle_slack(&t, w), w, TOL_REL);
    }
}

/// Audits the metric axioms of `rho` on the points of `space`.
///
/// Exhaustive mode checks the diagonal, every unordered pair and the three
/// triangle inequalities of every unordered triple (`checked` counts
/// inequalities). Sampled mode draws triples from the seeded stream.
pub fn metric_axiom_audit<F>(space: &SampledSpace, rho: F, mode: SearchMode) -> Result<AuditReport>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let n = space.len();
    let partial = match mode {
        SearchMode::Exhaustive => {
            let rows: Vec<Result<(Vec<f64>, u64)>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut row = vec![0.0; n];
                    let mut failures = 0;
                    for (j, slot) in row.iter_mut().enumerate().skip(i) {
                        let (v, f) = pair_axioms(&rho, i, j)?;
                        *slot = v;
                        failures += f;
                    }
                    Ok((row, failures))
                })
                .collect();
            let mut table = vec![0.0; n * n];
            let mut axiom_failures = 0;
            for (i, row) in rows.into_iter().enumerate() {
                let (row, f) = row?;
                axiom_failures += f;
                for j in i + 1..n {
                    table[i * n + j] = row[j];
                    table[j * n + i] = row[j];
                }
            }
            let t = |a: usize, b: usize| table[a * n + b];
            let mut p = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut p = Partial::<3>::new();
                    for j in i + 1..n {
                        for k in j + 1..n {
                            offer_triple(&mut p, t, i, j, k);
                        }
                    }
                    p
                })
                .reduce(Partial::new, Partial::merge);
            p.axiom_failures = axiom_failures;
            p
        }
        SearchMode::Sampled { samples, seed } => {
            let mut diag = 0;
            for i in 0..n {
                diag += pair_axioms(&rho, i, i)?.1;
            }
            let mut p = if n >= 3 {
                (0..samples)
                    .into_par_iter()
                    .map(|s| -> Result<Partial<3>> {
                        let [i, j, k] = distinct_indices::<3>(&mut sample_rng(seed, s), n);
                        let mut p = Partial::<3>::new();
                        let (ij, f1) = pair_axioms(&rho, i, j)?;
                        let (ik, f2) = pair_axioms(&rho, i, k)?;
                        let (jk, f3) = pair_axioms(&rho, j, k)?;
                        p.axiom_failures = f1 + f2 + f3;
                        let t = |a: usize, b: usize| match (a.min(b), a.max(b)) {
                            (a, b) if (a, b) == (i, j) => ij,
                            (a, b) if (a, b) == (i, k) => ik,
                            _ => jk,
                        };
                        offer_triple(&mut p, t, i, j, k);
                        Ok(p)
                    })
                    .try_reduce(Partial::new, |a, b| Ok(a.merge(b)))?
            } else {
                Partial::new()
            };
            p.axiom_failures += diag;
            p
        }
    };
    Ok(partial.into_report(mode, TOL_REL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::WeightFunction;

    fn line(xs: &[f64]) -> SampledSpace {
        SampledSpace::euclidean(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn constant_weights_have_no_violations() {
        let s = line(&[0.0, 0.3, 2.0, 7.5]);
        let w = WeightFunction::custom(vec![1.0; 4]).unwrap();
        let r = lipschitz_audit(&s, &w, SearchMode::Exhaustive).unwrap();
        assert_eq!((r.checked, r.violations), (6, 0));
    }

    #[test]
    fn doubled_norm_violates_lipschitz() {
        let s = line(&[1.0, 2.0]);
        let mut w = WeightFunction::custom(vec![2.0, 4.0]).unwrap();
        let r = w.certify_lipschitz(&s, SearchMode::Exhaustive).unwrap();
        assert_eq!(r.violations, 1);
        assert_eq!(r.worst_defect, -1.0);
        assert_eq!(r.witness, vec![0, 1]);
        assert!(!w.lipschitz_certified());
    }

    #[test]
    fn passing_custom_table_becomes_certified() {
        let s = line(&[1.0, 2.0, 4.0]);
        let mut w = WeightFunction::custom(vec![1.0, 2.0, 4.0]).unwrap();
        assert!(w
            .certify_lipschitz(&s, SearchMode::Exhaustive)
            .unwrap()
            .passed());
        assert!(w.lipschitz_certified());
    }

    #[test]
    fn single_point_space_passes_metric_audit() {
        let s = line(&[3.0]);
        let r = metric_axiom_audit(&s, |i, j| s.dist(i, j), SearchMode::Exhaustive).unwrap();
        assert!(r.passed());
        assert_eq!(r.checked, 0);
    }

    #[test]
    fn squared_distance_is_not_a_metric() {
        let s = line(&[0.0, 1.0, 2.0]);
        let r =
            metric_axiom_audit(&s, |i, j| s.dist(i, j).powi(2), SearchMode::Exhaustive).unwrap();
        assert_eq!(r.violations, 1);
        assert_eq!(r.witness, vec![0, 2, 1]);
        assert_eq!(r.worst_defect, (1.0 + 1.0 - 4.0) / 4.0);
        let again = triangle_slack(|i, j| s.dist(i, j).powi(2), [0, 2, 1]);
        assert_eq!(again, r.worst_defect);
    }

    #[test]
    fn asymmetry_and_identity_failures_are_counted() {
        let s = line(&[0.0, 1.0]);
        let r = metric_axiom_audit(
            &s,
            |i, j| if i == j { 0.5 } else { (i * 2 + j) as f64 },
            SearchMode::Exhaustive,
        )
        .unwrap();
        assert_eq!(r.axiom_failures, 3);
        assert!(!r.passed());
    }

    #[test]
    fn nan_distance_is_an_evaluation_error() {
        let s = line(&[0.0, 1.0, 2.0]);
        let err = metric_axiom_audit(
            &s,
            |i, j| if i + j == 3 { f64::NAN } else { 1.0 },
            SearchMode::Exhaustive,
        );
        assert!(matches!(err, Err(Error::Evaluation { .. })));
    }

    #[test]
    fn sampled_audit_is_reproducible() {
        let s = line(&(0..30).map(|i| (i * i) as f64).collect::<Vec<_>>());
        let mode = SearchMode::Sampled {
            samples: 500,
            seed: 9,
        };
        let a = metric_axiom_audit(&s, |i, j| s.dist(i, j).sqrt(), mode).unwrap();
        let b = metric_axiom_audit(&s, |i, j| s.dist(i, j).sqrt(), mode).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.checked, 1500);
        assert!(a.passed());
    }
}
