//! Builders for the concrete test geometries: Euclidean clouds, the upper
//! half-plane lattice, the punctured plane, the unit disk and weighted graphs.
//!
//! A [`SpaceSpec`] is the declarative (and serializable) description; [`build`]
//! resolves it into the sampled space, its obstacle and its weights.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::obstacle::{ObstacleSet, Primitive};
use crate::space::{SampledSpace, WeightFunction};

/// Default ring-radius ceiling for the unit disk.
pub const DISK_MAX_RADIUS: f64 = 1.0 - 1e-4;
/// Largest ring radius any disk spec may request.
pub const DISK_HARD_LIMIT: f64 = 1.0 - 1e-6;
/// Default rejection clearance of random clouds, as a fraction of the box diameter.
pub const CLEARANCE_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomCloud {
    pub count: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_clearance: Option<f64>,
}

/// Geometry of a space spec, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    EuclideanCloud {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        random: Option<RandomCloud>,
    },
    /// Points `(i * spacing, j * spacing)` for `0 <= i < nx`, `1 <= j <= ny`.
    HalfplaneLattice {
        nx: usize,
        ny: usize,
        #[serde(default = "default_spacing")]
        spacing: f64,
    },
    /// Rings around the origin, `angular` points each; odd rings are rotated
    /// by half a step.
    PuncturedPlane {
        radii: Vec<f64>,
        angular: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        extra_points: Vec<Vec<f64>>,
    },
    /// Concentric rings in the unit disk, phase zero, plus the center.
    UnitDisk {
        radii: Vec<f64>,
        angular: usize,
        #[serde(default = "default_true")]
        center: bool,
        #[serde(default = "default_max_radius")]
        max_radius: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        extra_points: Vec<Vec<f64>>,
    },
    /// Undirected graph with positive edge weights; the sampled space is every
    /// vertex outside `obstacle_vertices`.
    Graph {
        vertices: usize,
        edges: Vec<(usize, usize, f64)>,
        obstacle_vertices: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
}

fn default_spacing() -> f64 {
    0.1
}

fn default_true() -> bool {
    true
}

fn default_max_radius() -> f64 {
    DISK_MAX_RADIUS
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeightSpec {
    #[default]
    DistToObstacle,
    CustomTable {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(flatten)]
    pub kind: SpaceKind,
    /// Obstacle primitives; defaults per kind (half-space `y <= 0`, origin,
    /// exterior of the unit disk). Required for Euclidean clouds, unused for graphs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle: Option<Vec<Primitive>>,
    #[serde(default)]
    pub weight_source: WeightSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SpaceSpec {
    pub fn new(kind: SpaceKind) -> Self {
        Self {
            kind,
            obstacle: None,
            weight_source: WeightSpec::DistToObstacle,
            seed: None,
        }
    }

    pub fn cloud(points: Vec<Vec<f64>>, obstacle: Vec<Primitive>) -> Self {
        Self::new(SpaceKind::EuclideanCloud {
            points: Some(points),
            random: None,
        })
        .with_obstacle(obstacle)
    }

    pub fn random_cloud(
        count: usize,
        lower: Vec<f64>,
        upper: Vec<f64>,
        obstacle: Vec<Primitive>,
        seed: u64,
    ) -> Self {
        let random = RandomCloud {
            count,
            lower,
            upper,
            min_clearance: None,
        };
        let mut spec = Self::new(SpaceKind::EuclideanCloud {
            points: None,
            random: Some(random),
        });
        spec.obstacle = Some(obstacle);
        spec.seed = Some(seed);
        spec
    }

    pub fn halfplane_lattice(nx: usize, ny: usize, spacing: f64) -> Self {
        Self::new(SpaceKind::HalfplaneLattice { nx, ny, spacing })
    }

    pub fn punctured_plane(radii: Vec<f64>, angular: usize) -> Self {
        Self::new(SpaceKind::PuncturedPlane {
            radii,
            angular,
            extra_points: Vec::new(),
        })
    }

    pub fn unit_disk(radii: Vec<f64>, angular: usize) -> Self {
        Self::new(SpaceKind::UnitDisk {
            radii,
            angular,
            center: true,
            max_radius: DISK_MAX_RADIUS,
            extra_points: Vec::new(),
        })
    }

    pub fn graph(
        vertices: usize,
        edges: Vec<(usize, usize, f64)>,
        obstacle_vertices: Vec<usize>,
    ) -> Self {
        Self::new(SpaceKind::Graph {
            vertices,
            edges,
            obstacle_vertices,
            labels: None,
        })
    }

    pub fn with_obstacle(mut self, obstacle: Vec<Primitive>) -> Self {
        self.obstacle = Some(obstacle);
        self
    }

    pub fn with_weights(mut self, weights: WeightSpec) -> Self {
        self.weight_source = weights;
        self
    }

    /// Rejects NaN and infinite numbers anywhere in the spec.
    pub fn validate_finite(&self) -> Result<()> {
        let mut bad = false;
        let mut check = |v: f64| bad |= !v.is_finite();
        match &self.kind {
            SpaceKind::EuclideanCloud { points, random } => {
                points.iter().flatten().flatten().for_each(|&v| check(v));
                if let Some(r) = random {
                    r.lower
                        .iter()
                        .chain(&r.upper)
                        .chain(&r.min_clearance)
                        .for_each(|&v| check(v));
                }
            }
            SpaceKind::HalfplaneLattice { spacing, .. } => check(*spacing),
            SpaceKind::PuncturedPlane {
                radii,
                extra_points,
                ..
            } => {
                radii
                    .iter()
                    .chain(extra_points.iter().flatten())
                    .for_each(|&v| check(v));
            }
            SpaceKind::UnitDisk {
                radii,
                max_radius,
                extra_points,
                ..
            } => {
                radii
                    .iter()
                    .chain(extra_points.iter().flatten())
                    .for_each(|&v| check(v));
                check(*max_radius);
            }
            SpaceKind::Graph { edges, .. } => edges.iter().for_each(|e| check(e.2)),
        }
        if let WeightSpec::CustomTable { values } = &self.weight_source {
            values.iter().for_each(|&v| check(v));
        }
        if bad {
            Err(Error::Spec(
                "numbers must be finite (NaN and infinities are rejected)".into(),
            ))
        } else {
            Ok(())
        }
    }
}

/// The excluded set of a built space.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Obstacle {
    Geometric { set: ObstacleSet },
    GraphVertices { vertices: Vec<usize> },
}

impl Obstacle {
    pub fn geometric(&self) -> Option<&ObstacleSet> {
        match self {
            Obstacle::Geometric { set } => Some(set),
            Obstacle::GraphVertices { .. } => None,
        }
    }
}

/// A resolved space: points, obstacle and weights.
#[derive(Debug, Clone)]
pub struct BuiltSpace {
    pub space: SampledSpace,
    pub obstacle: Obstacle,
    pub weights: WeightFunction,
    /// Seed actually used by randomized builders.
    pub seed: Option<u64>,
}

fn ring(radius: f64, angular: usize, phase: f64) -> impl Iterator<Item = Vec<f64>> {
    (0..angular).map(move |a| {
        let theta = 2.0 * PI * a as f64 / angular as f64 + phase;
        vec![radius * theta.cos(), radius * theta.sin()]
    })
}

/// Resolves a spec into points, obstacle and weights.
pub fn build(spec: &SpaceSpec) -> Result<BuiltSpace> {
    spec.validate_finite()?;
    if let SpaceKind::Graph {
        vertices,
        edges,
        obstacle_vertices,
        labels,
    } = &spec.kind
    {
        return build_graph(
            *vertices,
            edges,
            obstacle_vertices,
            labels.as_deref(),
            &spec.weight_source,
        );
    }

    let obstacle = match (&spec.obstacle, &spec.kind) {
        (Some(prims), _) => ObstacleSet::new(prims.clone())?,
        (None, SpaceKind::HalfplaneLattice { .. }) => {
            ObstacleSet::single(Primitive::half_space(vec![0.0, 1.0], 0.0))?
        }
        (None, SpaceKind::PuncturedPlane { .. }) => {
            ObstacleSet::single(Primitive::point(vec![0.0, 0.0]))?
        }
        (None, SpaceKind::UnitDisk { .. }) => {
            ObstacleSet::single(Primitive::ball_exterior(vec![0.0, 0.0], 1.0))?
        }
        (None, _) => {
            return Err(Error::Spec(
                "euclidean_cloud needs an explicit obstacle".into(),
            ))
        }
    };

    let mut seed = None;
    let points: Vec<Vec<f64>> = match &spec.kind {
        SpaceKind::EuclideanCloud { points, random } => match (points, random) {
            (Some(p), None) => p.clone(),
            (None, Some(r)) => {
                let s = spec.seed.unwrap_or(0);
                seed = Some(s);
                random_cloud(r, &obstacle, s)?
            }
            _ => {
                return Err(Error::Spec(
                    "euclidean_cloud needs exactly one of `points` or `random`".into(),
                ))
            }
        },
        SpaceKind::HalfplaneLattice { nx, ny, spacing } => {
            if !(*spacing > 0.0) {
                return Err(Error::Spec("lattice spacing must be positive".into()));
            }
            (0..*nx)
                .flat_map(|i| (1..=*ny).map(move |j| vec![i as f64 * spacing, j as f64 * spacing]))
                .collect()
        }
        SpaceKind::PuncturedPlane {
            radii,
            angular,
            extra_points,
        } => {
            if radii.iter().any(|r| !(*r > 0.0)) {
                return Err(Error::Spec("punctured-plane radii must be positive".into()));
            }
            let step = PI / (*angular).max(1) as f64;
            radii
                .iter()
                .enumerate()
                .flat_map(|(k, &r)| ring(r, *angular, if k % 2 == 1 { step } else { 0.0 }))
                .chain(extra_points.iter().cloned())
                .collect()
        }
        SpaceKind::UnitDisk {
            radii,
            angular,
            center,
            max_radius,
            extra_points,
        } => {
            if !(*max_radius > 0.0 && *max_radius <= DISK_HARD_LIMIT) {
                return Err(Error::Spec(format!(
                    "max_radius must lie in (0, {DISK_HARD_LIMIT}]"
                )));
            }
            if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r <= *max_radius)) {
                return Err(Error::Spec(format!(
                    "disk ring radius {r} outside (0, {max_radius}]"
                )));
            }
            center
                .then(|| vec![0.0, 0.0])
                .into_iter()
                .chain(radii.iter().flat_map(|&r| ring(r, *angular, 0.0)))
                .chain(extra_points.iter().cloned())
                .collect()
        }
        SpaceKind::Graph { .. } => unreachable!(),
    };

    let space = SampledSpace::euclidean(points)?;
    let mut distances = Vec::with_capacity(space.len());
    for i in 0..space.len() {
        let p = space.point(i).expect("euclidean space has coordinates");
        let f = obstacle.dist_to_set(p)?;
        if !(f > 0.0) {
            return Err(Error::PointInObstacle {
                index: i,
                label: format!("{p:?}"),
            });
        }
        distances.push(f);
    }
    let weights = resolve_weights(distances, &spec.weight_source)?;
    Ok(BuiltSpace {
        space,
        obstacle: Obstacle::Geometric { set: obstacle },
        weights,
        seed,
    })
}

fn resolve_weights(distances: Vec<f64>, source: &WeightSpec) -> Result<WeightFunction> {
    match source {
        WeightSpec::DistToObstacle => WeightFunction::from_obstacle_distances(distances),
        WeightSpec::CustomTable { values } => {
            if values.len() != distances.len() {
                return Err(Error::Dimension {
                    expected: distances.len(),
                    got: values.len(),
                });
            }
            WeightFunction::custom(values.clone())
        }
    }
}

fn random_cloud(r: &RandomCloud, obstacle: &ObstacleSet, seed: u64) -> Result<Vec<Vec<f64>>> {
    if r.lower.len() != r.upper.len() || r.lower.is_empty() {
        return Err(Error::Spec(
            "random cloud bounds must have equal nonzero dimension".into(),
        ));
    }
    if r.lower.iter().zip(&r.upper).any(|(lo, hi)| !(lo < hi)) {
        return Err(Error::Spec(
            "random cloud needs lower < upper in every coordinate".into(),
        ));
    }
    let diameter = r
        .lower
        .iter()
        .zip(&r.upper)
        .map(|(lo, hi)| (hi - lo).powi(2))
        .sum::<f64>()
        .sqrt();
    let clearance = r.min_clearance.unwrap_or(CLEARANCE_FRACTION * diameter);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(r.count);
    let max_attempts = 1000 * r.count.max(1);
    let mut attempts = 0;
    while points.len() < r.count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Spec(format!(
                "random cloud: only {} of {} points found with clearance {clearance}",
                points.len(),
                r.count
            )));
        }
        let p: Vec<f64> = r
            .lower
            .iter()
            .zip(&r.upper)
            .map(|(lo, hi)| rng.random_range(*lo..*hi))
            .collect();
        if obstacle.dist_to_set(&p)? >= clearance {
            points.push(p);
        }
    }
    Ok(points)
}

#[derive(Copy, Clone, PartialEq)]
struct Frontier {
    cost: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| self.node.cmp(&other.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All-pairs shortest-path distances (row-major) by Dijkstra from every
/// vertex. Unreachable pairs are `f64::INFINITY`.
pub fn all_pairs_shortest_paths(
    vertices: usize,
    edges: &[(usize, usize, f64)],
) -> Result<Vec<f64>> {
    let mut adjacency = vec![Vec::new(); vertices];
    for &(u, v, w) in edges {
        if u >= vertices || v >= vertices {
            return Err(Error::Index {
                index: u.max(v),
                n: vertices,
            });
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Spec(format!(
                "edge ({u},{v}) has nonpositive weight {w}"
            )));
        }
        adjacency[u].push((v, w));
        adjacency[v].push((u, w));
    }
    let mut out = vec![f64::INFINITY; vertices * vertices];
    let mut heap = BinaryHeap::new();
    for source in 0..vertices {
        let dist = &mut out[source * vertices..(source + 1) * vertices];
        dist[source] = 0.0;
        heap.push(Frontier {
            cost: 0.0,
            node: source,
        });
        while let Some(Frontier { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            for &(next, w) in &adjacency[node] {
                let candidate = cost + w;
                if candidate < dist[next] {
                    dist[next] = candidate;
                    heap.push(Frontier {
                        cost: candidate,
                        node: next,
                    });
                }
            }
        }
    }
    // Path sums can differ in the last bit between directions.
    for i in 0..vertices {
        for j in i + 1..vertices {
            let m = out[i * vertices + j].min(out[j * vertices + i]);
            out[i * vertices + j] = m;
            out[j * vertices + i] = m;
        }
    }
    Ok(out)
}

fn build_graph(
    vertices: usize,
    edges: &[(usize, usize, f64)],
    obstacle_vertices: &[usize],
    labels: Option<&[String]>,
    source: &WeightSpec,
) -> Result<BuiltSpace> {
    if obstacle_vertices.is_empty() {
        return Err(Error::Spec(
            "graph needs at least one obstacle vertex".into(),
        ));
    }
    if let Some(&bad) = obstacle_vertices.iter().find(|&&v| v >= vertices) {
        return Err(Error::Index {
            index: bad,
            n: vertices,
        });
    }
    let labels: Vec<String> = match labels {
        Some(l) if l.len() == vertices => l.to_vec(),
        Some(l) => {
            return Err(Error::Dimension {
                expected: vertices,
                got: l.len(),
            })
        }
        None => (0..vertices).map(|v| format!("v{v}")).collect(),
    };
    let full = all_pairs_shortest_paths(vertices, edges)?;
    if let Some(v) = (0..vertices).find(|&v| !full[v].is_finite()) {
        return Err(Error::Disconnected(labels[v].clone()));
    }
    let kept: Vec<usize> = (0..vertices)
        .filter(|v| !obstacle_vertices.contains(v))
        .collect();
    if kept.is_empty() {
        return Err(Error::Spec(
            "every graph vertex is an obstacle vertex".into(),
        ));
    }
    let n = kept.len();
    let mut matrix = vec![0.0; n * n];
    for (a, &u) in kept.iter().enumerate() {
        for (b, &v) in kept.iter().enumerate() {
            matrix[a * n + b] = full[u * vertices + v];
        }
    }
    let distances: Vec<f64> = kept
        .iter()
        .map(|&u| {
            obstacle_vertices
                .iter()
                .map(|&m| full[u * vertices + m])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let space = SampledSpace::from_matrix(n, matrix)?
        .with_labels(kept.iter().map(|&v| labels[v].clone()).collect())?;
    let weights = resolve_weights(distances, source)?;
    Ok(BuiltSpace {
        space,
        obstacle: Obstacle::GraphVertices {
            vertices: obstacle_vertices.to_vec(),
        },
        weights,
        seed: None,
    })
}

/// Three points on the vertical line over `horizontal`, at heights
/// `(x_n, y_n, z_n)`, in the upper half-space.
pub fn collinear_halfspace_triple(heights: [f64; 3], horizontal: &[f64]) -> Result<[Vec<f64>; 3]> {
    if heights.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
        return Err(domain(format!("heights must be positive, got {heights:?}")));
    }
    if heights[0] == heights[1] || heights[1] == heights[2] || heights[0] == heights[2] {
        return Err(domain(format!(
            "heights must be pairwise distinct, got {heights:?}"
        )));
    }
    Ok(heights.map(|h| {
        let mut p = horizontal.to_vec();
        p.push(h);
        p
    }))
}
