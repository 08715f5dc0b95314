//! Search modes and seeded, worker-count independent sampling.
//!
//! Every sampled tuple is drawn from a generator keyed on `(seed, index)`, so
//! the tuple at a given index never depends on how the index range is split
//! across threads. Partial results merge through [`Extremum`], which breaks
//! ties on the witness so the merge is order independent.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How a tuple space is explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

impl SearchMode {
    /// Exhaustive when `total` tuples fit in `budget`, sampled otherwise.
    pub fn auto(total: u64, budget: u64, samples: u64, seed: u64) -> Self {
        if total <= budget {
            SearchMode::Exhaustive
        } else {
            SearchMode::Sampled { samples, seed }
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self, SearchMode::Exhaustive)
    }
}

/// Generator for sample `index` of the stream identified by `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `K` distinct indices in `0..n`, sorted ascending. Requires `n >= K`.
pub fn distinct_indices<const K: usize>(rng: &mut impl Rng, n: usize) -> [usize; K] {
    debug_assert!(n >= K);
    let mut out = [0usize; K];
    let mut filled = 0;
    while filled < K {
        let candidate = rng.random_range(0..n);
        if !out[..filled].contains(&candidate) {
            out[filled] = candidate;
            filled += 1;
        }
    }
    out.sort_unstable();
    out
}

/// Number of `k`-subsets of an `n`-set, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// A running extremum with its witness tuple.
///
/// `Max` keeps the largest value, `Min` the smallest; equal values keep the
/// lexicographically smaller witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremum<const K: usize> {
    pub value: f64,
    pub witness: [usize; K],
    maximize: bool,
}

impl<const K: usize> Extremum<K> {
    pub fn max() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            witness: [usize::MAX; K],
            maximize: true,
        }
    }

    pub fn min() -> Self {
        Self {
            value: f64::INFINITY,
            witness: [usize::MAX; K],
            maximize: false,
        }
    }

    pub fn is_set(&self) -> bool {
        self.value.is_finite()
    }

    #[inline]
    pub fn offer(&mut self, value: f64, witness: [usize; K]) {
        let better = if self.maximize {
            value > self.value
        } else {
            value < self.value
        };
        if better || (value == self.value && witness < self.witness) {
            self.value = value;
            self.witness = witness;
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.offer(other.value, other.witness);
        self
    }
}
