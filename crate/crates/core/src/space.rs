//! Finite sampled metric spaces, weight functions and dense pair tables.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::obstacle::euclidean;

/// Absolute tolerance for audits of quantities computed without exact arithmetic.
pub const TOL_ABS: f64 = 1e-9;
/// Relative slack for triangle audits, scaled by `max(1, rho(i, j))`.
pub const TOL_REL: f64 = 1e-12;
/// Largest point count whose base distance matrix is materialized.
pub const MATERIALIZE_LIMIT: usize = 4096;

/// A finite set of labeled points with a base distance.
///
/// Euclidean spaces keep their coordinates and materialize the distance
/// matrix up to [`MATERIALIZE_LIMIT`] points; matrix spaces (graphs) always
/// carry the matrix.
#[derive(Debug, Clone)]
pub struct SampledSpace {
    labels: Vec<String>,
    points: Option<Vec<Vec<f64>>>,
    matrix: Option<Vec<f64>>,
}

impl SampledSpace {
    pub fn euclidean(points: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(first) = points.first() {
            for p in &points {
                if p.len() != first.len() {
                    return Err(Error::Dimension {
                        expected: first.len(),
                        got: p.len(),
                    });
                }
                if p.iter().any(|a| !a.is_finite()) {
                    return Err(domain("point coordinates must be finite"));
                }
            }
        }
        let n = points.len();
        let matrix = (n <= MATERIALIZE_LIMIT).then(|| {
            let mut m = vec![0.0; n * n];
            m.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = euclidean(&points[i], &points[j]);
                }
            });
            m
        });
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        Ok(Self {
            labels,
            points: Some(points),
            matrix,
        })
    }

    /// Space from a dense row-major `n x n` matrix. The matrix must be finite,
    /// nonnegative, symmetric and zero on the diagonal; the triangle
    /// inequality is left to [`crate::audit::metric_axiom_audit`].
    pub fn from_matrix(n: usize, matrix: Vec<f64>) -> Result<Self> {
        if matrix.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: matrix.len(),
            });
        }
        for i in 0..n {
            if matrix[i * n + i] != 0.0 {
                return Err(domain(format!("base_dist({i},{i}) is not zero")));
            }
            for j in 0..n {
                let v = matrix[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Evaluation {
                        value: v,
                        witness: vec![i, j],
                    });
                }
                if v != matrix[j * n + i] {
                    return Err(domain(format!("base_dist is not symmetric at ({i},{j})")));
                }
            }
        }
        let labels = (0..n).map(|i| format!("v{i}")).collect();
        Ok(Self {
            labels,
            points: None,
            matrix: Some(matrix),
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                got: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_materialized(&self) -> bool {
        self.matrix.is_some()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn point(&self, i: usize) -> Option<&[f64]> {
        self.points.as_ref().map(|p| p[i].as_slice())
    }

    pub fn points(&self) -> Option<&[Vec<f64>]> {
        self.points.as_deref()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match (&self.matrix, &self.points) {
            (Some(m), _) => m[i * self.len() + j],
            (None, Some(p)) => euclidean(&p[i], &p[j]),
            (None, None) => unreachable!("space without matrix or coordinates"),
        }
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::Index {
                index: i,
                n: self.len(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    DistToObstacle,
    CustomTable,
}

/// Positive per-point weights `F(p_i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightFunction {
    values: Vec<f64>,
    source: WeightSource,
    lipschitz_certified: bool,
}

fn check_positive(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        Some(index) => Err(Error::Weight {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

impl WeightFunction {
    /// Distance-to-obstacle weights; 1-Lipschitz by construction.
    pub fn from_obstacle_distances(values: Vec<f64>) -> Result<Self> {
        check_positive(&values)?;
        Ok(Self {
            values,
            source: WeightSource::DistToObstacle,
            lipschitz_certified: true,
        })
    }

    /// Arbitrary positive weights, uncertified until a passing Lipschitz audit.
    pub fn custom(values: Vec<f64>) -> Result<Self> {
        check_positive(&values)?;
        Ok(Self {
            values,
            source: WeightSource::CustomTable,
            lipschitz_certified: false,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source(&self) -> WeightSource {
        self.source
    }

    pub fn lipschitz_certified(&self) -> bool {
        self.lipschitz_certified
    }

    pub(crate) fn set_certified(&mut self, certified: bool) {
        if self.source == WeightSource::CustomTable {
            self.lipschitz_certified = certified;
        }
    }
}

/// Dense symmetric table of pair values, row-major `n x n`.
#[derive(Debug, Clone)]
pub struct PairTable {
    n: usize,
    values: Vec<f64>,
}

impl PairTable {
    /// Evaluates `f(i, j)` for `i < j` and mirrors it. Non-finite or negative
    /// values are reported with their witness pair.
    pub fn build<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let mut values = vec![0.0; n * n];
        let rows: Vec<Result<()>> = values
            .par_chunks_mut(n.max(1))
            .enumerate()
            .map(|(i, row)| {
                for (j, slot) in row.iter_mut().enumerate().skip(i + 1) {
                    let v = f(i, j);
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::Evaluation {
                            value: v,
                            witness: vec![i, j],
                        });
                    }
                    *slot = v;
                }
                Ok(())
            })
            .collect();
        rows.into_iter().collect::<Result<Vec<()>>>()?;
        for i in 0..n {
            for j in 0..i {
                values[i * n + j] = values[j * n + i];
            }
        }
        Ok(Self { n, values })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}
