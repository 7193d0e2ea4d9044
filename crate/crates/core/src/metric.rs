//! Finite pseudometric spaces and their scale graphs.

use std::collections::VecDeque;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SPACE_SCHEMA: &str = "ec-space/1";

/// Relative slack allowed when checking the triangle inequality on matrix
/// input, so that rounded decimal matrices are not rejected.
const TRIANGLE_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("a space needs at least one point")]
    Empty,
    #[error("basepoint {basepoint} out of range for {len} points")]
    Basepoint { basepoint: usize, len: usize },
    #[error("point {point} has {found} coordinates, expected {expected}")]
    Dimension { point: usize, expected: usize, found: usize },
    #[error("non-finite value at ({0},{1})")]
    NonFinite(usize, usize),
    #[error("distance matrix row {row} has length {found}, expected {expected}")]
    NotSquare { row: usize, expected: usize, found: usize },
    #[error("asymmetric at ({0},{1})")]
    Asymmetric(usize, usize),
    #[error("negative distance at ({0},{1})")]
    Negative(usize, usize),
    #[error("nonzero self-distance at ({0},{0})")]
    Diagonal(usize),
    #[error("triangle inequality fails: d({0},{2}) > d({0},{1}) + d({1},{2})")]
    Triangle(usize, usize, usize),
    #[error("{labels} labels for {points} points")]
    Labels { labels: usize, points: usize },
    #[error("unsupported schema {0:?}")]
    Schema(String),
    #[error("metric {0:?} requires the {1:?} field")]
    MissingField(String, &'static str),
    #[error("unknown metric type {0:?}")]
    MetricType(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    #[default]
    Metric,
    Pseudometric,
}

#[derive(Clone, Debug, PartialEq)]
enum Distances {
    Euclidean { dim: usize, coords: Vec<f64> },
    Matrix { data: Vec<f64> },
}

/// Points with a pseudometric and a basepoint.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    len: usize,
    distances: Distances,
    basepoint: usize,
    labels: Option<Vec<String>>,
    kind: MetricKind,
}

/// On-disk form of a space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceFile {
    #[serde(default = "space_schema")]
    pub schema: String,
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    pub basepoint: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "is_metric")]
    pub kind: MetricKind,
}

fn space_schema() -> String {
    SPACE_SCHEMA.to_string()
}

fn is_metric(kind: &MetricKind) -> bool {
    *kind == MetricKind::Metric
}

impl FiniteMetricSpace {
    /// Euclidean space on the given coordinates.
    pub fn from_points(points: &[Vec<f64>], basepoint: usize) -> Result<Self, SpaceError> {
        let len = points.len();
        if len == 0 {
            return Err(SpaceError::Empty);
        }
        check_basepoint(basepoint, len)?;
        let dim = points[0].len();
        let mut coords = Vec::with_capacity(len * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(SpaceError::Dimension { point: i, expected: dim, found: p.len() });
            }
            if let Some(j) = p.iter().position(|x| !x.is_finite()) {
                return Err(SpaceError::NonFinite(i, j));
            }
            coords.extend_from_slice(p);
        }
        Ok(FiniteMetricSpace {
            len,
            distances: Distances::Euclidean { dim, coords },
            basepoint,
            labels: None,
            kind: MetricKind::Metric,
        })
    }

    /// Space given by a full distance matrix. Declared metrics are checked
    /// against the triangle inequality; pseudometrics are not.
    pub fn from_matrix(matrix: &[Vec<f64>], basepoint: usize, kind: MetricKind) -> Result<Self, SpaceError> {
        let len = matrix.len();
        if len == 0 {
            return Err(SpaceError::Empty);
        }
        check_basepoint(basepoint, len)?;
        let mut data = Vec::with_capacity(len * len);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != len {
                return Err(SpaceError::NotSquare { row: i, expected: len, found: row.len() });
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() {
                    return Err(SpaceError::NonFinite(i, j));
                }
                if d < 0.0 {
                    return Err(SpaceError::Negative(i, j));
                }
            }
            data.extend_from_slice(row);
        }
        for i in 0..len {
            if data[i * len + i] != 0.0 {
                return Err(SpaceError::Diagonal(i));
            }
            for j in i + 1..len {
                if data[i * len + j] != data[j * len + i] {
                    return Err(SpaceError::Asymmetric(i, j));
                }
            }
        }
        if kind == MetricKind::Metric {
            let d = |i: usize, j: usize| data[i * len + j];
            for i in 0..len {
                for k in 0..len {
                    for j in 0..len {
                        let direct = d(i, j);
                        let via = d(i, k) + d(k, j);
                        if direct > via + TRIANGLE_SLACK * direct.max(1.0) {
                            return Err(SpaceError::Triangle(i, k, j));
                        }
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { len, distances: Distances::Matrix { data }, basepoint, labels: None, kind })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, SpaceError> {
        if labels.len() != self.len {
            return Err(SpaceError::Labels { labels: labels.len(), points: self.len });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_basepoint(mut self, basepoint: usize) -> Result<Self, SpaceError> {
        check_basepoint(basepoint, self.len)?;
        self.basepoint = basepoint;
        Ok(self)
    }

    pub fn from_file(file: SpaceFile) -> Result<Self, SpaceError> {
        if file.schema != SPACE_SCHEMA {
            return Err(SpaceError::Schema(file.schema));
        }
        let space = match file.metric.as_str() {
            "euclidean" => {
                let points = file.points.ok_or_else(|| SpaceError::MissingField(file.metric.clone(), "points"))?;
                Self::from_points(&points, file.basepoint)?
            }
            "matrix" => {
                let matrix = file.matrix.ok_or_else(|| SpaceError::MissingField(file.metric.clone(), "matrix"))?;
                Self::from_matrix(&matrix, file.basepoint, file.kind)?
            }
            other => return Err(SpaceError::MetricType(other.to_string())),
        };
        match file.labels {
            Some(labels) => space.with_labels(labels),
            None => Ok(space),
        }
    }

    pub fn to_file(&self) -> SpaceFile {
        let (metric, points, matrix) = match &self.distances {
            Distances::Euclidean { dim, coords } => {
                let points = if *dim == 0 {
                    vec![Vec::new(); self.len]
                } else {
                    coords.chunks(*dim).map(<[f64]>::to_vec).collect()
                };
                ("euclidean", Some(points), None)
            }
            Distances::Matrix { data } => ("matrix", None, Some(data.chunks(self.len).map(<[f64]>::to_vec).collect())),
        };
        SpaceFile {
            schema: SPACE_SCHEMA.to_string(),
            metric: metric.to_string(),
            points,
            matrix,
            basepoint: self.basepoint,
            labels: self.labels.clone(),
            kind: self.kind,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SpaceError> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("space serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SpaceError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn coords(&self, i: usize) -> Option<&[f64]> {
        match &self.distances {
            Distances::Euclidean { dim, coords } => Some(&coords[i * dim..(i + 1) * dim]),
            Distances::Matrix { .. } => None,
        }
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.distances {
            Distances::Euclidean { dim, coords } => {
                let a = &coords[i * dim..(i + 1) * dim];
                let b = &coords[j * dim..(j + 1) * dim];
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }
            Distances::Matrix { data } => data[i * self.len + j],
        }
    }

    pub fn diameter(&self) -> f64 {
        (0..self.len)
            .into_par_iter()
            .map(|i| (i + 1..self.len).map(|j| self.dist(i, j)).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max)
    }

    /// Smallest positive pairwise distance, if any pair is at positive distance.
    pub fn min_spacing(&self) -> Option<f64> {
        let m = (0..self.len)
            .into_par_iter()
            .map(|i| (i + 1..self.len).map(|j| self.dist(i, j)).filter(|&d| d > 0.0).fold(f64::INFINITY, f64::min))
            .reduce(|| f64::INFINITY, f64::min);
        m.is_finite().then_some(m)
    }

    /// The same points in a different order: point `i` of the result is point
    /// `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.len);
        let distances = match &self.distances {
            Distances::Euclidean { dim, coords } => Distances::Euclidean {
                dim: *dim,
                coords: order.iter().flat_map(|&i| coords[i * dim..(i + 1) * dim].iter().copied()).collect(),
            },
            Distances::Matrix { data } => Distances::Matrix {
                data: order.iter().flat_map(|&i| order.iter().map(move |&j| data[i * self.len + j])).collect(),
            },
        };
        let basepoint = order.iter().position(|&i| i == self.basepoint).expect("order is a permutation");
        FiniteMetricSpace {
            len: self.len,
            distances,
            basepoint,
            labels: self.labels.as_ref().map(|l| order.iter().map(|&i| l[i].clone()).collect()),
            kind: self.kind,
        }
    }
}

fn check_basepoint(basepoint: usize, len: usize) -> Result<(), SpaceError> {
    if basepoint >= len {
        Err(SpaceError::Basepoint { basepoint, len })
    } else {
        Ok(())
    }
}

/// The entourage at scale `ε`: pairs at distance `< ε`, in compressed
/// adjacency form. Triangles (3-cliques) are enumerated on demand.
#[derive(Clone, Debug)]
pub struct ScaleGraph {
    space: Arc<FiniteMetricSpace>,
    scale: f64,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    /// Edge id of each adjacency slot.
    slot_edge: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl ScaleGraph {
    pub fn new(space: Arc<FiniteMetricSpace>, scale: f64) -> Self {
        assert!(scale > 0.0 && scale.is_finite(), "scale must be positive, got {scale}");
        let n = space.len();
        let upper: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|i| (i + 1..n).filter(|&j| space.dist(i, j) < scale).map(|j| j as u32).collect())
            .collect();
        let mut edges = Vec::with_capacity(upper.iter().map(Vec::len).sum());
        for (i, row) in upper.iter().enumerate() {
            edges.extend(row.iter().map(|&j| (i as u32, j)));
        }
        let mut degree = vec![0usize; n];
        for &(a, b) in &edges {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; offsets[n]];
        let mut slot_edge = vec![0u32; offsets[n]];
        // Edges are sorted lexicographically, so every row ends up sorted.
        for (id, &(a, b)) in edges.iter().enumerate() {
            let (a, b) = (a as usize, b as usize);
            neighbors[fill[b]] = a as u32;
            slot_edge[fill[b]] = id as u32;
            fill[b] += 1;
        }
        for (id, &(a, b)) in edges.iter().enumerate() {
            let (a, b) = (a as usize, b as usize);
            neighbors[fill[a]] = b as u32;
            slot_edge[fill[a]] = id as u32;
            fill[a] += 1;
        }
        ScaleGraph { space, scale, offsets, neighbors, slot_edge, edges }
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn basepoint(&self) -> usize {
        self.space.basepoint()
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted neighbors of `i`.
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Edge ids parallel to [`Self::neighbors`].
    pub fn neighbor_edges(&self, i: usize) -> &[u32] {
        &self.slot_edge[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        let row = self.neighbors(a);
        row.binary_search(&(b as u32)).ok().map(|k| self.slot_edge[self.offsets[a] + k] as usize)
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.edge_id(a, b).is_some()
    }

    /// Whether `(a, b)` lies in the entourage: equal points or an edge.
    pub fn admissible(&self, a: usize, b: usize) -> bool {
        a == b || self.is_edge(a, b)
    }

    /// Common neighbors of `a` and `b` greater than `floor`, ascending.
    pub fn common_neighbors_above(&self, a: usize, b: usize, floor: Option<usize>) -> Vec<u32> {
        let (x, y) = (self.neighbors(a), self.neighbors(b));
        let start = |row: &[u32]| floor.map_or(0, |f| row.partition_point(|&v| v as usize <= f));
        let (mut i, mut j) = (start(x), start(y));
        let mut out = Vec::new();
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(x[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// Triangles `[a, b, c]` with `a < b < c` whose smallest edge is `(a, b)`.
    pub fn triangles_on_edge(&self, edge: usize) -> impl Iterator<Item = [u32; 3]> + '_ {
        let (a, b) = self.edges[edge];
        self.common_neighbors_above(a as usize, b as usize, Some(b as usize)).into_iter().map(move |c| [a, b, c])
    }

    /// All triangles in lexicographic order.
    pub fn triangles(&self) -> Vec<[u32; 3]> {
        let per_edge: Vec<Vec<[u32; 3]>> =
            (0..self.edges.len()).into_par_iter().map(|e| self.triangles_on_edge(e).collect()).collect();
        per_edge.into_iter().flatten().collect()
    }

    pub fn triangle_count(&self) -> usize {
        (0..self.edges.len()).into_par_iter().map(|e| self.triangles_on_edge(e).count()).sum()
    }

    /// Points whose distance from `x` is below the scale, including `x`.
    pub fn ball(&self, x: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.neighbors(x).iter().map(|&v| v as usize).collect();
        let pos = out.partition_point(|&v| v < x);
        out.insert(pos, x);
        out
    }
}

/// Connected components with the smallest index of each as representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Components {
    pub connected: bool,
    pub count: usize,
    pub representative: Vec<usize>,
}

impl Components {
    pub fn same(&self, a: usize, b: usize) -> bool {
        self.representative[a] == self.representative[b]
    }
}

pub fn chain_connected(graph: &ScaleGraph) -> Components {
    let n = graph.len();
    let mut representative = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if representative[s] != usize::MAX {
            continue;
        }
        count += 1;
        representative[s] = s;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in graph.neighbors(u) {
                let v = v as usize;
                if representative[v] == usize::MAX {
                    representative[v] = s;
                    queue.push_back(v);
                }
            }
        }
    }
    Components { connected: count <= 1, count, representative }
}

/// Points reachable from `x` by a chain with at most `n` steps.
pub fn power_reach(graph: &ScaleGraph, x: usize, n: usize) -> Vec<usize> {
    let mut depth = vec![usize::MAX; graph.len()];
    depth[x] = 0;
    let mut queue = VecDeque::from([x]);
    while let Some(u) = queue.pop_front() {
        if depth[u] == n {
            continue;
        }
        for &v in graph.neighbors(u) {
            let v = v as usize;
            if depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                queue.push_back(v);
            }
        }
    }
    (0..graph.len()).filter(|&i| depth[i] != usize::MAX).collect()
}

/// Hop distance from `x` to every point (`usize::MAX` when unreachable).
pub fn hop_distances(graph: &ScaleGraph, x: usize) -> Vec<usize> {
    let mut depth = vec![usize::MAX; graph.len()];
    depth[x] = 0;
    let mut queue = VecDeque::from([x]);
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            let v = v as usize;
            if depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                queue.push_back(v);
            }
        }
    }
    depth
}

/// Greedy net: the basepoint first, then every point at distance at least
/// `radius` from all points chosen so far, in index order. Every point lies
/// within `radius` of the net.
pub fn dense_net(space: &FiniteMetricSpace, radius: f64) -> Vec<usize> {
    let mut net = vec![space.basepoint()];
    for x in 0..space.len() {
        if net.iter().all(|&y| space.dist(x, y) >= radius) {
            net.push(x);
        }
    }
    net
}

/// First point whose ball in `graph` is not connected in `finer`, if any.
pub fn disconnected_ball(graph: &ScaleGraph, finer: &ScaleGraph) -> Option<usize> {
    assert!(
        Arc::ptr_eq(graph.space_arc(), finer.space_arc()) || graph.space() == finer.space(),
        "graphs must share a space"
    );
    assert!(finer.scale() <= graph.scale(), "finer scale exceeds coarse scale");
    (0..graph.len()).into_par_iter().find_first(|&x| !ball_connected(graph, finer, x))
}

/// Whether every ball of `graph` is connected in the graph `finer` induces on it.
pub fn balls_chain_connected(graph: &ScaleGraph, finer: &ScaleGraph) -> bool {
    disconnected_ball(graph, finer).is_none()
}

fn ball_connected(graph: &ScaleGraph, finer: &ScaleGraph, x: usize) -> bool {
    let ball = graph.ball(x);
    if ball.len() <= 1 {
        return true;
    }
    let mut slot = vec![u32::MAX; graph.len()];
    for (k, &y) in ball.iter().enumerate() {
        slot[y] = k as u32;
    }
    let mut seen = vec![false; ball.len()];
    seen[slot[x] as usize] = true;
    let mut stack = vec![x];
    let mut reached = 1;
    while let Some(u) = stack.pop() {
        for &v in finer.neighbors(u) {
            let k = slot[v as usize];
            if k != u32::MAX && !seen[k as usize] {
                seen[k as usize] = true;
                reached += 1;
                if reached == ball.len() {
                    return true;
                }
                stack.push(v as usize);
            }
        }
    }
    reached == ball.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn square() -> Arc<FiniteMetricSpace> {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        Arc::new(FiniteMetricSpace::from_points(&pts, 0).unwrap())
    }

    #[test]
    fn square_distances() {
        let s = square();
        assert!((s.dist(0, 2) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.dist(1, 1), 0.0);
    }

    #[test]
    fn square_graphs() {
        let s = square();
        let g = ScaleGraph::new(s.clone(), 1.2);
        assert_eq!(g.edges(), &[(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert_eq!(g.triangle_count(), 0);
        let g = ScaleGraph::new(s.clone(), 1.5);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.triangles(), vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]);
        let g = ScaleGraph::new(s, 1.0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn matrix_validation() {
        let bad = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.5, 0.0]];
        let err = FiniteMetricSpace::from_matrix(&bad, 0, MetricKind::Metric).unwrap_err();
        assert_eq!(err.to_string(), "asymmetric at (1,2)");
        let tri = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]];
        assert!(matches!(FiniteMetricSpace::from_matrix(&tri, 0, MetricKind::Metric), Err(SpaceError::Triangle(..))));
        assert!(FiniteMetricSpace::from_matrix(&tri, 0, MetricKind::Pseudometric).is_ok());
        let neg = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
        assert!(matches!(FiniteMetricSpace::from_matrix(&neg, 0, MetricKind::Metric), Err(SpaceError::Negative(0, 1))));
        assert!(matches!(FiniteMetricSpace::from_points(&[vec![0.0]], 1), Err(SpaceError::Basepoint { .. })));
        assert!(matches!(FiniteMetricSpace::from_points(&[], 0), Err(SpaceError::Empty)));
    }

    #[test]
    fn json_round_trip() {
        let s = square();
        let back = FiniteMetricSpace::from_json(&s.to_json()).unwrap();
        assert_eq!(*s, back);
        let missing = r#"{"schema":"ec-space/1","metric":"euclidean","points":[[0,0]]}"#;
        assert!(FiniteMetricSpace::from_json(missing).is_err());
        let schema = r#"{"schema":"ec-space/9","metric":"euclidean","points":[[0,0]],"basepoint":0}"#;
        assert!(matches!(FiniteMetricSpace::from_json(schema), Err(SpaceError::Schema(_))));
    }

    #[test]
    fn connectivity_and_reach() {
        let g = ScaleGraph::new(square(), 1.2);
        assert!(chain_connected(&g).connected);
        assert_eq!(power_reach(&g, 0, 0), vec![0]);
        assert_eq!(power_reach(&g, 0, 1), vec![0, 1, 3]);
        assert_eq!(power_reach(&g, 0, 2), vec![0, 1, 2, 3]);

        let mut pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        pts.extend(pts.clone().into_iter().map(|p| vec![p[0] + 10.0, p[1]]));
        let two = Arc::new(FiniteMetricSpace::from_points(&pts, 0).unwrap());
        let c = chain_connected(&ScaleGraph::new(two, 1.2));
        assert!(!c.connected);
        assert_eq!(c.count, 2);
        assert_eq!(c.representative[5], 4);

        let one = Arc::new(FiniteMetricSpace::from_points(&[vec![3.0]], 0).unwrap());
        assert!(chain_connected(&ScaleGraph::new(one, 0.1)).connected);
    }

    #[test]
    fn ball_connectivity_detects_gap() {
        // Two clusters 1.0 apart, both inside one ball at scale 3.
        let pts = vec![vec![0.0], vec![0.1], vec![1.1], vec![1.2]];
        let s = Arc::new(FiniteMetricSpace::from_points(&pts, 0).unwrap());
        let coarse = ScaleGraph::new(s.clone(), 3.0);
        let fine = ScaleGraph::new(s, 0.5);
        assert!(!balls_chain_connected(&coarse, &fine));
        assert!(balls_chain_connected(&coarse, &coarse));
    }

    #[test]
    fn pseudometric_zero_distance_points_stay_joined() {
        let m = vec![vec![0.0, 0.0, 2.0], vec![0.0, 0.0, 2.0], vec![2.0, 2.0, 0.0]];
        let s = Arc::new(FiniteMetricSpace::from_matrix(&m, 0, MetricKind::Pseudometric).unwrap());
        let g = ScaleGraph::new(s, 1e-9);
        assert_eq!(g.edges(), &[(0, 1)]);
    }
}
