//! The excluded closed set `M` and exact distance-to-set queries.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A closed shape in Euclidean space with an exact point-to-shape distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Primitive {
    Point {
        at: Vec<f64>,
    },
    Points {
        points: Vec<Vec<f64>>,
    },
    /// Closed ball `|x - center| <= radius`.
    Disc {
        center: Vec<f64>,
        radius: f64,
    },
    /// Closed half-space `normal . x <= offset`.
    HalfSpace {
        normal: Vec<f64>,
        offset: f64,
    },
    /// Closed complement of the open ball, `|x - center| >= radius`.
    BallExterior {
        center: Vec<f64>,
        radius: f64,
    },
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}

impl Primitive {
    pub fn point(at: Vec<f64>) -> Self {
        Primitive::Point { at }
    }

    pub fn disc(center: Vec<f64>, radius: f64) -> Self {
        Primitive::Disc { center, radius }
    }

    pub fn half_space(normal: Vec<f64>, offset: f64) -> Self {
        Primitive::HalfSpace { normal, offset }
    }

    pub fn ball_exterior(center: Vec<f64>, radius: f64) -> Self {
        Primitive::BallExterior { center, radius }
    }

    fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|a| a.is_finite());
        match self {
            Primitive::Point { at } if at.is_empty() || !finite(at) => {
                Err(domain("obstacle point must be a nonempty finite vector"))
            }
            Primitive::Points { points } => {
                let Some(first) = points.first() else {
                    return Err(domain("obstacle point set is empty"));
                };
                for p in points {
                    check_dim(first.len(), p.len())?;
                    if !finite(p) {
                        return Err(domain("obstacle point has non-finite coordinates"));
                    }
                }
                Ok(())
            }
            Primitive::Disc { center, radius } | Primitive::BallExterior { center, radius } => {
                if center.is_empty() || !finite(center) || !radius.is_finite() || *radius < 0.0 {
                    Err(domain(
                        "ball needs a finite center and a finite nonnegative radius",
                    ))
                } else {
                    Ok(())
                }
            }
            Primitive::HalfSpace { normal, offset } => {
                if !finite(normal) || !offset.is_finite() || !(norm(normal) > 0.0) {
                    Err(domain(
                        "half-space needs a finite nonzero normal and finite offset",
                    ))
                } else {
                    Ok(())
                }
            }
            Primitive::Point { .. } => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Primitive::Point { at } => at.len(),
            Primitive::Points { points } => points.first().map_or(0, Vec::len),
            Primitive::Disc { center, .. } | Primitive::BallExterior { center, .. } => center.len(),
            Primitive::HalfSpace { normal, .. } => normal.len(),
        }
    }

    /// Exact Euclidean distance from `x` to this shape.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            Primitive::Point { at } => euclidean(x, at),
            Primitive::Points { points } => points
                .iter()
                .map(|p| euclidean(x, p))
                .fold(f64::INFINITY, f64::min),
            Primitive::Disc { center, radius } => (euclidean(x, center) - radius).max(0.0),
            Primitive::BallExterior { center, radius } => (radius - euclidean(x, center)).max(0.0),
            Primitive::HalfSpace { normal, offset } => {
                let dot: f64 = normal.iter().zip(x).map(|(n, a)| n * a).sum();
                ((dot - offset) / norm(normal)).max(0.0)
            }
        })
    }
}

/// Union of closed primitives. Always nonempty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstacleSet {
    primitives: Vec<Primitive>,
}

impl ObstacleSet {
    pub fn new(primitives: Vec<Primitive>) -> Result<Self> {
        if primitives.is_empty() {
            return Err(domain("obstacle set must contain at least one primitive"));
        }
        for p in &primitives {
            p.validate()?;
        }
        Ok(Self { primitives })
    }

    pub fn single(primitive: Primitive) -> Result<Self> {
        Self::new(vec![primitive])
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    /// Distance from `x` to the union: the minimum over primitives.
    pub fn dist_to_set(&self, x: &[f64]) -> Result<f64> {
        let mut best = f64::INFINITY;
        for p in &self.primitives {
            best = best.min(p.distance(x)?);
        }
        Ok(best)
    }
}

/// Free-function form of [`ObstacleSet::dist_to_set`].
pub fn dist_to_set(x: &[f64], obstacle: &ObstacleSet) -> Result<f64> {
    obstacle.dist_to_set(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_to_single_point_on_line() {
        let m = ObstacleSet::single(Primitive::point(vec![0.0])).unwrap();
        assert_eq!(dist_to_set(&[3.0], &m).unwrap(), 3.0);
        assert_eq!(dist_to_set(&[0.0], &m).unwrap(), 0.0);
    }

    #[test]
    fn distance_to_closed_unit_disc() {
        let m = ObstacleSet::single(Primitive::disc(vec![0.0, 0.0], 1.0)).unwrap();
        assert_eq!(m.dist_to_set(&[2.0, 0.0]).unwrap(), 1.0);
        assert_eq!(m.dist_to_set(&[0.5, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn half_space_and_ball_exterior() {
        let h = Primitive::half_space(vec![0.0, 2.0], 0.0);
        assert!((h.distance(&[0.3, 0.5]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(h.distance(&[0.3, -1.0]).unwrap(), 0.0);
        let e = Primitive::ball_exterior(vec![0.0, 0.0], 1.0);
        assert!((e.distance(&[0.0, 0.25]).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(e.distance(&[3.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn union_takes_minimum() {
        let m = ObstacleSet::new(vec![
            Primitive::point(vec![0.0, 0.0]),
            Primitive::Points {
                points: vec![vec![5.0, 0.0], vec![10.0, 0.0]],
            },
        ])
        .unwrap();
        assert_eq!(m.dist_to_set(&[4.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let m = ObstacleSet::single(Primitive::point(vec![0.0, 0.0])).unwrap();
        assert_eq!(
            m.dist_to_set(&[1.0]),
            Err(Error::Dimension {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn empty_and_degenerate_obstacles_rejected() {
        assert!(ObstacleSet::new(vec![]).is_err());
        assert!(ObstacleSet::single(Primitive::half_space(vec![0.0, 0.0], 1.0)).is_err());
        assert!(ObstacleSet::single(Primitive::disc(vec![0.0], -1.0)).is_err());
        assert!(ObstacleSet::single(Primitive::Points { points: vec![] }).is_err());
    }
}
