//! Gromov products, base-point hyperbolicity, the symmetric four-point
//! condition and δ estimation over finite spaces.
//!
//! Every quadruple scan runs over a precomputed [`PairTable`]. Exhaustive
//! scans split the outer index across workers; sampled scans draw quadruple
//! `s` from the generator keyed on `(seed, s)`. Both merge through
//! [`Extremum`], so results do not depend on the worker count.

use rayon::prelude::*;
use serde::Serialize;

use crate::audit::AuditReport;
use crate::error::{Error, Result};
use crate::family::{functional_unchecked, rho_unchecked, MetricFamily};
use crate::sampling::{binomial, distinct_indices, sample_rng, Extremum, SearchMode};
use crate::space::{PairTable, SampledSpace, WeightFunction, TOL_ABS};

/// Largest number of unordered quadruples scanned exhaustively by default.
pub const QUAD_BUDGET: u64 = 500_000;
/// Default number of sampled quadruples above [`QUAD_BUDGET`].
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

/// `(x|y)_w = ½(d(x,w) + d(y,w) - d(x,y))`.
#[inline]
pub fn gromov_product(d_xw: f64, d_yw: f64, d_xy: f64) -> f64 {
    0.5 * (d_xw + d_yw - d_xy)
}

/// Exhaustive below [`QUAD_BUDGET`] quadruples, sampled with `samples` and
/// `seed` above it.
pub fn default_mode(n: usize, samples: u64, seed: u64) -> SearchMode {
    SearchMode::auto(binomial(n as u64, 4), QUAD_BUDGET, samples, seed)
}

/// Table of the base distance of `space`.
pub fn base_table(space: &SampledSpace) -> Result<PairTable> {
    PairTable::build(space.len(), |i, j| space.dist(i, j))
}

fn check_weights(space: &SampledSpace, weights: &WeightFunction) -> Result<()> {
    if weights.len() == space.len() {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: space.len(),
            got: weights.len(),
        })
    }
}

/// Table of `rho(i, j)` for the family with the given weights.
pub fn rho_table(
    family: MetricFamily,
    space: &SampledSpace,
    weights: &WeightFunction,
) -> Result<PairTable> {
    check_weights(space, weights)?;
    PairTable::build(space.len(), |i, j| {
        rho_unchecked(family, space.dist(i, j), weights.get(i), weights.get(j))
    })
}

/// Table of the comparison functional (`λ`, `ν` or `μ`) of the family.
pub fn functional_table(
    family: MetricFamily,
    space: &SampledSpace,
    weights: &WeightFunction,
) -> Result<PairTable> {
    check_weights(space, weights)?;
    if matches!(family, MetricFamily::GehringOsgood) {
        return Err(Error::UnsupportedFamily("GO".into()));
    }
    PairTable::build(space.len(), |i, j| {
        functional_unchecked(family, space.dist(i, j), weights.get(i), weights.get(j))
            .unwrap_or(f64::NAN)
    })
}

/// Base-point defect at `w`: the largest `min{(x|y)_w, (y|z)_w} - (x|z)_w`
/// over triples, clamped at 0, with the maximizing triple `[x, y, z]`.
pub fn basepoint_defect(
    table: &PairTable,
    w: usize,
    mode: SearchMode,
) -> Result<(f64, Option<[usize; 3]>)> {
    let n = table.len();
    if w >= n {
        return Err(Error::Index { index: w, n });
    }
    let prod =
        |a: usize, b: usize| gromov_product(table.get(a, w), table.get(b, w), table.get(a, b));
    let defect = |[x, y, z]: [usize; 3]| prod(x, y).min(prod(y, z)) - prod(x, z);
    let best = match mode {
        SearchMode::Exhaustive => (0..n)
            .into_par_iter()
            .map(|x| {
                let mut e = Extremum::max();
                for z in x + 1..n {
                    for y in 0..n {
                        e.offer(defect([x, y, z]), [x, y, z]);
                    }
                }
                e
            })
            .reduce(Extremum::max, Extremum::merge),
        SearchMode::Sampled { samples, seed } if n >= 3 => (0..samples)
            .into_par_iter()
            .fold(Extremum::max, |mut e, s| {
                let [a, b, c] = distinct_indices::<3>(&mut sample_rng(seed, s), n);
                for t in [[a, b, c], [a, c, b], [b, a, c]] {
                    e.offer(defect(t), t);
                }
                e
            })
            .reduce(Extremum::max, Extremum::merge),
        SearchMode::Sampled { .. } => Extremum::max(),
    };
    if best.is_set() && best.value > 0.0 {
        Ok((best.value, Some(best.witness)))
    } else {
        Ok((0.0, best.is_set().then_some(best.witness)))
    }
}

/// Pair values of a quadruple `{x, y, z, w}` in the order
/// `[xy, xz, xw, yz, yw, zw]`.
pub type Quad = [f64; 6];

fn sorted_sums(q: &Quad) -> [f64; 3] {
    let [xy, xz, xw, yz, yw, zw] = *q;
    let mut s = [xz + yw, xw + yz, xy + zw];
    s.sort_unstable_by(f64::total_cmp);
    s
}

/// `(max - median) / 2` of the pair-sums `ρ(x,z)+ρ(y,w)`, `ρ(x,w)+ρ(y,z)`,
/// `ρ(x,y)+ρ(z,w)`: the smallest δ satisfying the four-point condition for
/// every labeling of the quadruple.
#[inline]
pub fn four_point_defect(q: &Quad) -> f64 {
    let s = sorted_sums(q);
    0.5 * (s[2] - s[1])
}

/// `max / median` of the three pair-products of a positive functional.
#[inline]
pub fn four_point_ratio(q: &Quad) -> f64 {
    let [xy, xz, xw, yz, yw, zw] = *q;
    let mut p = [xz * yw, xw * yz, xy * zw];
    p.sort_unstable_by(f64::total_cmp);
    p[2] / p[1]
}

fn quad(table: &PairTable, [a, b, c, d]: [usize; 4]) -> Quad {
    [
        table.get(a, b),
        table.get(a, c),
        table.get(a, d),
        table.get(b, c),
        table.get(b, d),
        table.get(c, d),
    ]
}

#[derive(Clone)]
struct QuadScan {
    best: Extremum<4>,
    checked: u64,
    above: u64,
}

impl QuadScan {
    fn new() -> Self {
        Self {
            best: Extremum::max(),
            checked: 0,
            above: 0,
        }
    }

    #[inline]
    fn offer(&mut self, value: f64, witness: [usize; 4], threshold: f64) {
        self.checked += 1;
        self.above += u64::from(value > threshold);
        self.best.offer(value, witness);
    }

    fn merge(self, other: Self) -> Self {
        Self {
            best: self.best.merge(other.best),
            checked: self.checked + other.checked,
            above: self.above + other.above,
        }
    }
}

fn scan_quads(
    table: &PairTable,
    mode: SearchMode,
    threshold: f64,
    f: impl Fn(&Quad) -> f64 + Sync,
) -> QuadScan {
    let n = table.len();
    match mode {
        SearchMode::Exhaustive => (0..n)
            .into_par_iter()
            .flat_map_iter(|a| (a + 1..n).map(move |b| (a, b)))
            .fold(QuadScan::new, |mut acc, (a, b)| {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let w = [a, b, c, d];
                        acc.offer(f(&quad(table, w)), w, threshold);
                    }
                }
                acc
            })
            .reduce(QuadScan::new, QuadScan::merge),
        SearchMode::Sampled { samples, seed } if n >= 4 => (0..samples)
            .into_par_iter()
            .fold(QuadScan::new, |mut acc, s| {
                let w = distinct_indices::<4>(&mut sample_rng(seed, s), n);
                acc.offer(f(&quad(table, w)), w, threshold);
                acc
            })
            .reduce(QuadScan::new, QuadScan::merge),
        SearchMode::Sampled { .. } => QuadScan::new(),
    }
}

/// Largest four-point defect of an arbitrary pair table, its witness and the
/// number of quadruples examined.
pub fn table_delta(table: &PairTable, mode: SearchMode) -> (f64, Option<[usize; 4]>, u64) {
    let scan = scan_quads(table, mode, f64::INFINITY, four_point_defect);
    if scan.best.is_set() {
        (
            scan.best.value.max(0.0),
            Some(scan.best.witness),
            scan.checked,
        )
    } else {
        (0.0, None, scan.checked)
    }
}

/// Empirical Gromov constant of a family on a finite space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaEstimate {
    pub family: MetricFamily,
    /// Largest four-point defect found; a lower bound on the best δ.
    pub delta_hat: f64,
    pub witness: Option<[usize; 4]>,
    pub mode: SearchMode,
    pub checked: u64,
    pub certified_bound: Option<f64>,
    /// False when the family needs 1-Lipschitz weights and they are not
    /// certified; the bound is then reported but not claimed.
    pub bound_applies: bool,
    /// `delta_hat > certified_bound + TOL_ABS` while the bound applies.
    pub exceeds_bound: bool,
}

/// Maximizes the four-point defect of `rho` over quadruples of the space and
/// attaches the family's certified constant.
pub fn delta_estimate(
    family: MetricFamily,
    space: &SampledSpace,
    weights: &WeightFunction,
    mode: SearchMode,
) -> Result<DeltaEstimate> {
    let table = rho_table(family, space, weights)?;
    let (delta_hat, witness, checked) = table_delta(&table, mode);
    let bound = family.certified_delta();
    let bound_applies = !family.requires_lipschitz() || weights.lipschitz_certified();
    Ok(DeltaEstimate {
        family,
        delta_hat,
        witness,
        mode,
        checked,
        certified_bound: Some(bound),
        bound_applies,
        exceeds_bound: bound_applies && delta_hat > bound + TOL_ABS,
    })
}

/// Checks `Φ(x,z)Φ(y,w) <= K max{Φ(x,w)Φ(y,z), Φ(x,y)Φ(z,w)}` for the
/// family's comparison functional over quadruples, with the family's factor
/// `K`. `worst_defect` is `K` minus the worst ratio.
pub fn multiplicative_four_point_check(
    family: MetricFamily,
    space: &SampledSpace,
    weights: &WeightFunction,
    mode: SearchMode,
) -> Result<AuditReport> {
    let factor = family.multiplicative_factor()?;
    let table = functional_table(family, space, weights)?;
    let scan = scan_quads(&table, mode, factor + TOL_ABS, four_point_ratio);
    let (worst_ratio, witness) = if scan.best.is_set() {
        (Some(scan.best.value), scan.best.witness.to_vec())
    } else {
        (None, Vec::new())
    };
    Ok(AuditReport {
        checked: scan.checked,
        violations: scan.above,
        worst_defect: worst_ratio.map_or(0.0, |r| factor - r),
        witness,
        mode,
        tolerance: TOL_ABS,
        axiom_failures: 0,
        worst_ratio,
    })
}

/// Computes the base-point defect at every `w` and checks
/// `max_w δ_w <= 2 min_w δ_w`. The witness is `[argmax w, argmin w]` and
/// `worst_defect` is `2 min - max`. In sampled mode the per-point defects are
/// lower bounds and the check is only indicative.
pub fn basepoint_transfer_check(table: &PairTable, mode: SearchMode) -> Result<AuditReport> {
    let n = table.len();
    let per_w = (0..n)
        .map(|w| basepoint_defect(table, w, mode).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    let mut hi = Extremum::<1>::max();
    let mut lo = Extremum::<1>::min();
    for (w, &d) in per_w.iter().enumerate() {
        hi.offer(d, [w]);
        lo.offer(d, [w]);
    }
    let (worst_defect, witness) = if n == 0 {
        (0.0, Vec::new())
    } else {
        (
            2.0 * lo.value - hi.value,
            vec![hi.witness[0], lo.witness[0]],
        )
    };
    Ok(AuditReport {
        checked: n as u64,
        violations: u64::from(worst_defect < -TOL_ABS),
        worst_defect,
        witness,
        mode,
        tolerance: TOL_ABS,
        axiom_failures: 0,
        worst_ratio: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn line(xs: &[f64]) -> SampledSpace {
        SampledSpace::euclidean(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    fn cycle4() -> PairTable {
        let m = [
            0.0, 1.0, 2.0, 1.0, 1.0, 0.0, 1.0, 2.0, 2.0, 1.0, 0.0, 1.0, 1.0, 2.0, 1.0, 0.0,
        ];
        let space = SampledSpace::from_matrix(4, m.to_vec()).unwrap();
        base_table(&space).unwrap()
    }

    #[test]
    fn gromov_product_examples() {
        // w = 1, x = 2, y = 3 on the line.
        assert_eq!(gromov_product(1.0, 2.0, 1.0), 1.0);
        assert_eq!(gromov_product(2.5, 2.5, 0.0), 2.5);
        assert_eq!(gromov_product(0.0, 3.0, 3.0), 0.0);
    }

    #[test]
    fn four_point_defect_examples() {
        // 1, 2, 3, 4 on the line.
        assert_eq!(four_point_defect(&[1.0, 2.0, 3.0, 1.0, 2.0, 1.0]), 0.0);
        // x = z = 1, y = 2, w = 3.
        assert_eq!(four_point_defect(&[1.0, 0.0, 2.0, 1.0, 1.0, 2.0]), 0.0);
        // Unit square a, b, c, d in cyclic order.
        let s = 2f64.sqrt();
        assert_relative_eq!(
            four_point_defect(&[1.0, s, 1.0, 1.0, s, 1.0]),
            (2.0 * s - 2.0) / 2.0,
            epsilon = 1e-15
        );
        assert_eq!(four_point_ratio(&[1.0; 6]), 1.0);
    }

    #[test]
    fn unit_square_delta() {
        let sq = SampledSpace::euclidean(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        let (d, w, checked) = table_delta(&base_table(&sq).unwrap(), SearchMode::Exhaustive);
        assert_relative_eq!(d, 2f64.sqrt() - 1.0, epsilon = 1e-15);
        assert_eq!((w, checked), (Some([0, 1, 2, 3]), 1));
    }

    #[test]
    fn line_is_zero_hyperbolic() {
        let xs: Vec<f64> = (0..20).map(|i| (i * i % 37) as f64).collect();
        let t = base_table(&line(&xs)).unwrap();
        assert_eq!(table_delta(&t, SearchMode::Exhaustive).0, 0.0);
        for w in [0, 7, 19] {
            assert_eq!(
                basepoint_defect(&t, w, SearchMode::Exhaustive).unwrap().0,
                0.0
            );
        }
        assert!(basepoint_transfer_check(&t, SearchMode::Exhaustive)
            .unwrap()
            .passed());
    }

    #[test]
    fn four_cycle_basepoint_defect() {
        let t = cycle4();
        for w in 0..4 {
            let (d, witness) = basepoint_defect(&t, w, SearchMode::Exhaustive).unwrap();
            assert_eq!(d, 1.0, "w = {w}");
            let [x, y, z] = witness.unwrap();
            let p = |a, b| gromov_product(t.get(a, w), t.get(b, w), t.get(a, b));
            assert_eq!(p(x, y).min(p(y, z)) - p(x, z), 1.0);
        }
        let report = basepoint_transfer_check(&t, SearchMode::Exhaustive).unwrap();
        assert!(report.passed());
        assert_eq!(report.worst_defect, 1.0);
        assert_eq!(table_delta(&t, SearchMode::Exhaustive).0, 1.0);
    }

    #[test]
    fn small_spaces() {
        let t = base_table(&line(&[0.0, 1.0])).unwrap();
        assert_eq!(
            basepoint_defect(&t, 1, SearchMode::Exhaustive).unwrap().0,
            0.0
        );
        assert!(basepoint_defect(&t, 2, SearchMode::Exhaustive).is_err());
        let s = line(&[0.0, 1.0]);
        let w = WeightFunction::from_obstacle_distances(vec![1.0, 2.0]).unwrap();
        let e =
            delta_estimate(MetricFamily::GehringOsgood, &s, &w, SearchMode::Exhaustive).unwrap();
        assert_eq!((e.delta_hat, e.witness, e.checked), (0.0, None, 0));
        let e = delta_estimate(
            MetricFamily::GehringOsgood,
            &s,
            &w,
            SearchMode::Sampled {
                samples: 10,
                seed: 1,
            },
        )
        .unwrap();
        assert_eq!(e.delta_hat, 0.0);
    }

    fn cloud(n: usize) -> (SampledSpace, WeightFunction) {
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                vec![
                    (i as f64 * 0.71).sin() * 2.0,
                    (i as f64 * 1.3).cos() * 2.0 + 3.0,
                ]
            })
            .collect();
        let w =
            WeightFunction::from_obstacle_distances(pts.iter().map(|p| p[1]).collect()).unwrap();
        (SampledSpace::euclidean(pts).unwrap(), w)
    }

    #[test]
    fn estimate_reports_bound_and_witness() {
        let (s, w) = cloud(14);
        let e =
            delta_estimate(MetricFamily::NikolovAndreev, &s, &w, SearchMode::Exhaustive).unwrap();
        assert_eq!(e.checked, 1001);
        assert!(e.bound_applies && !e.exceeds_bound);
        assert_eq!(e.certified_bound, Some(9f64.ln()));
        let t = rho_table(MetricFamily::NikolovAndreev, &s, &w).unwrap();
        assert_eq!(
            four_point_defect(&quad(&t, e.witness.unwrap())),
            e.delta_hat
        );

        let custom = WeightFunction::custom(w.values().to_vec()).unwrap();
        let e = delta_estimate(
            MetricFamily::GehringOsgood,
            &s,
            &custom,
            SearchMode::Exhaustive,
        )
        .unwrap();
        assert!(!e.bound_applies);
        let e =
            delta_estimate(MetricFamily::Ibragimov, &s, &custom, SearchMode::Exhaustive).unwrap();
        assert!(e.bound_applies);
    }

    #[test]
    fn sampled_is_below_exhaustive_and_reproducible() {
        let (s, w) = cloud(25);
        let fam = MetricFamily::Dhv { c: 1.0 };
        let full = delta_estimate(fam, &s, &w, SearchMode::Exhaustive).unwrap();
        let mode = SearchMode::Sampled {
            samples: 5000,
            seed: 42,
        };
        let a = delta_estimate(fam, &s, &w, mode).unwrap();
        assert!(a.delta_hat <= full.delta_hat);
        assert_eq!(a.checked, 5000);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = one.install(|| delta_estimate(fam, &s, &w, mode).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn multiplicative_check() {
        let (s, w) = cloud(12);
        let r = multiplicative_four_point_check(
            MetricFamily::Ibragimov,
            &s,
            &w,
            SearchMode::Exhaustive,
        )
        .unwrap();
        assert!(r.passed());
        let ratio = r.worst_ratio.unwrap();
        assert!((1.0..=4.0).contains(&ratio));
        assert_eq!(r.worst_defect, 4.0 - ratio);
        assert!(matches!(
            multiplicative_four_point_check(
                MetricFamily::GehringOsgood,
                &s,
                &w,
                SearchMode::Exhaustive
            ),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    fn relabel(q: &Quad, p: [usize; 4]) -> Quad {
        let pair = |a: usize, b: usize| -> f64 {
            let (a, b) = (a.min(b), a.max(b));
            match (a, b) {
                (0, 1) => q[0],
                (0, 2) => q[1],
                (0, 3) => q[2],
                (1, 2) => q[3],
                (1, 3) => q[4],
                _ => q[5],
            }
        };
        [
            pair(p[0], p[1]),
            pair(p[0], p[2]),
            pair(p[0], p[3]),
            pair(p[1], p[2]),
            pair(p[1], p[3]),
            pair(p[2], p[3]),
        ]
    }

    fn permutations() -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let p = [a, b, c, d];
                        if (0..4).all(|v| p.contains(&v)) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn four_point_defect_is_relabeling_invariant(q in prop::array::uniform6(0.0f64..10.0)) {
            let perms = permutations();
            prop_assert_eq!(perms.len(), 24);
            let base = four_point_defect(&q);
            let ratio = four_point_ratio(&q.map(|v| v + 0.5));
            for p in perms {
                prop_assert_eq!(four_point_defect(&relabel(&q, p)), base);
                prop_assert_eq!(four_point_ratio(&relabel(&q, p).map(|v| v + 0.5)), ratio);
            }
        }
    }
}
