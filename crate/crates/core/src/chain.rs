//! Chains at a scale, the add/remove moves between them, certificates made of
//! such moves, and a brute-force equivalence oracle for tiny spaces.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{hop_distances, ScaleGraph};

pub const CERT_SCHEMA: &str = "ec-cert/1";
pub const DEFAULT_ORACLE_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("a chain needs at least one point")]
    Empty,
    #[error("point {point} out of range for {len} points")]
    PointOutOfRange { point: usize, len: usize },
    #[error("{{{0},{1}}} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("position {position} out of range for a chain with {steps} steps")]
    PositionOutOfRange { position: usize, steps: usize },
    #[error("position {0} is an endpoint; endpoints stay fixed")]
    Endpoint(usize),
    #[error("chains have different endpoints")]
    EndpointMismatch,
}

/// A sequence of points whose consecutive pairs are equal or adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chain(Vec<usize>);

impl Chain {
    pub fn new(graph: &ScaleGraph, vertices: Vec<usize>) -> Result<Self, ChainError> {
        if vertices.is_empty() {
            return Err(ChainError::Empty);
        }
        if let Some(&p) = vertices.iter().find(|&&p| p >= graph.len()) {
            return Err(ChainError::PointOutOfRange { point: p, len: graph.len() });
        }
        if let Some(w) = vertices.windows(2).find(|w| !graph.admissible(w[0], w[1])) {
            return Err(ChainError::NotAnEdge(w[0].min(w[1]), w[0].max(w[1])));
        }
        Ok(Chain(vertices))
    }

    /// Wraps a vertex list without checking admissibility.
    pub fn new_unchecked(vertices: Vec<usize>) -> Self {
        assert!(!vertices.is_empty());
        Chain(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vertices(self) -> Vec<usize> {
        self.0
    }

    /// Number of steps `n` of `x_0, …, x_n`.
    pub fn steps(&self) -> usize {
        self.0.len() - 1
    }

    pub fn start(&self) -> usize {
        self.0[0]
    }

    pub fn end(&self) -> usize {
        *self.0.last().unwrap()
    }

    pub fn reversed(&self) -> Chain {
        Chain(self.0.iter().rev().copied().collect())
    }

    /// `self ∗ other`; the end of `self` must equal the start of `other`.
    pub fn concat(&self, other: &Chain) -> Chain {
        assert_eq!(self.end(), other.start(), "chains do not meet");
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0[1..]);
        Chain(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HomotopyMove {
    /// Insert `point` between `x_position` and `x_{position+1}`.
    Add { position: usize, point: usize },
    /// Delete the interior point `x_position`.
    Remove { position: usize },
}

impl HomotopyMove {
    /// The move undoing `self` when applied to `before`.
    pub fn inverse(self, before: &Chain) -> HomotopyMove {
        match self {
            HomotopyMove::Add { position, .. } => HomotopyMove::Remove { position: position + 1 },
            HomotopyMove::Remove { position } => {
                HomotopyMove::Add { position: position - 1, point: before.vertices()[position] }
            }
        }
    }
}

pub fn apply_move(graph: &ScaleGraph, chain: &Chain, mv: HomotopyMove) -> Result<Chain, ChainError> {
    let v = chain.vertices();
    let steps = chain.steps();
    match mv {
        HomotopyMove::Add { position, point } => {
            if position >= steps {
                return Err(ChainError::PositionOutOfRange { position, steps });
            }
            if point >= graph.len() {
                return Err(ChainError::PointOutOfRange { point, len: graph.len() });
            }
            for &other in &[v[position], v[position + 1]] {
                if !graph.admissible(other, point) {
                    return Err(ChainError::NotAnEdge(other.min(point), other.max(point)));
                }
            }
            let mut out = v.to_vec();
            out.insert(position + 1, point);
            Ok(Chain(out))
        }
        HomotopyMove::Remove { position } => {
            if position > steps {
                return Err(ChainError::PositionOutOfRange { position, steps });
            }
            if position == 0 || position == steps {
                return Err(ChainError::Endpoint(position));
            }
            let (a, b) = (v[position - 1], v[position + 1]);
            if !graph.admissible(a, b) {
                return Err(ChainError::NotAnEdge(a.min(b), a.max(b)));
            }
            let mut out = v.to_vec();
            out.remove(position);
            Ok(Chain(out))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomotopyCertificate {
    pub start: Chain,
    pub moves: Vec<HomotopyMove>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("start chain invalid: {0}")]
    Start(ChainError),
    /// `step` counts moves from 1.
    #[error("move {step} invalid: {source}")]
    Move { step: usize, source: ChainError },
}

impl HomotopyCertificate {
    pub fn identity(start: Chain) -> Self {
        HomotopyCertificate { start, moves: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Every intermediate chain, starting with `start`. Assumes the
    /// certificate verifies.
    pub fn trace(&self, graph: &ScaleGraph) -> Result<Vec<Chain>, CertificateError> {
        let mut out = vec![self.start.clone()];
        for (i, &mv) in self.moves.iter().enumerate() {
            let next = apply_move(graph, out.last().unwrap(), mv)
                .map_err(|source| CertificateError::Move { step: i + 1, source })?;
            out.push(next);
        }
        Ok(out)
    }

    /// The certificate running from the end chain back to the start.
    pub fn reversed(&self, graph: &ScaleGraph) -> Result<HomotopyCertificate, CertificateError> {
        let chains = self.trace(graph)?;
        let moves = self.moves.iter().zip(&chains).rev().map(|(&mv, before)| mv.inverse(before)).collect();
        Ok(HomotopyCertificate { start: chains.last().unwrap().clone(), moves })
    }
}

/// Replays a certificate, returning the final chain. Each intermediate chain
/// is checked from scratch.
pub fn verify_certificate(graph: &ScaleGraph, cert: &HomotopyCertificate) -> Result<Chain, CertificateError> {
    let mut chain = Chain::new(graph, cert.start.vertices().to_vec()).map_err(CertificateError::Start)?;
    for (i, &mv) in cert.moves.iter().enumerate() {
        chain = apply_move(graph, &chain, mv).map_err(|source| CertificateError::Move { step: i + 1, source })?;
        debug_assert!(Chain::new(graph, chain.vertices().to_vec()).is_ok());
    }
    Ok(chain)
}

/// On-disk certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema: String,
    pub scale: f64,
    pub start: Chain,
    pub moves: Vec<HomotopyMove>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<Chain>,
}

impl CertificateFile {
    pub fn new(scale: f64, cert: &HomotopyCertificate, end: Option<Chain>) -> Self {
        CertificateFile {
            schema: CERT_SCHEMA.to_string(),
            scale,
            start: cert.start.clone(),
            moves: cert.moves.clone(),
            end,
        }
    }

    pub fn certificate(&self) -> HomotopyCertificate {
        HomotopyCertificate { start: self.start.clone(), moves: self.moves.clone() }
    }
}

/// Removes consecutive duplicates and backtracks `x, y, x`, recording the
/// moves. A two-point chain `(x, x)` has no interior and is left as is.
pub fn normalize(graph: &ScaleGraph, chain: &Chain) -> (Chain, HomotopyCertificate) {
    let input = chain.vertices();
    let last = input.len() - 1;
    let mut moves = Vec::new();
    let mut stack: Vec<usize> = Vec::with_capacity(input.len());
    for (k, &v) in input.iter().enumerate() {
        // The current chain is `stack ++ input[k..]`; `v` sits at `stack.len()`.
        let is_last = k == last;
        let mut keep = true;
        loop {
            let top = stack.len();
            if top >= 1 && stack[top - 1] == v {
                if top - 1 > 0 {
                    moves.push(HomotopyMove::Remove { position: top - 1 });
                    stack.pop();
                    continue;
                }
                if !is_last {
                    moves.push(HomotopyMove::Remove { position: top });
                    keep = false;
                }
                break;
            }
            if top >= 2 && stack[top - 2] == v {
                // x, y, x: drop y; the duplicate is handled on the next turn.
                moves.push(HomotopyMove::Remove { position: top - 1 });
                stack.pop();
                continue;
            }
            break;
        }
        if keep {
            stack.push(v);
        }
    }
    let out = Chain(stack);
    let cert = HomotopyCertificate { start: chain.clone(), moves };
    debug_assert_eq!(verify_certificate(graph, &cert).as_ref(), Ok(&out));
    (out, cert)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("more than {budget} chains to enumerate")]
    Budget { budget: usize },
    #[error("point {0} out of range")]
    Point(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleClass {
    /// Lexicographically least chain of the class with at most `maxlen` steps.
    pub representative: Chain,
    pub size: usize,
}

/// Partition of chains from the basepoint to an endpoint with `1..=maxlen`
/// steps, under moves that may pass through chains of `maxlen + 1` steps.
#[derive(Clone, Debug)]
pub struct OracleClasses {
    pub endpoint: usize,
    pub maxlen: usize,
    pub classes: Vec<OracleClass>,
    /// The partition of chains with at most `maxlen - 1` steps is the same
    /// whether the closure is capped at `maxlen` or at `maxlen + 1` steps.
    pub stable: bool,
    pub chains_examined: usize,
    membership: HashMap<Vec<usize>, usize>,
}

impl OracleClasses {
    pub fn class_of(&self, chain: &Chain) -> Option<usize> {
        self.membership.get(chain.vertices()).copied()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Every enumerated chain with its class index, in lexicographic order.
    pub fn chains(&self) -> Vec<(Chain, usize)> {
        let mut v: Vec<(Chain, usize)> = self.membership.iter().map(|(c, &k)| (Chain(c.clone()), k)).collect();
        v.sort();
        v
    }
}

/// Brute-force equivalence classes of chains.
///
/// The single-point chain is not enumerated: both moves need at least one
/// step, so it is isolated from every other chain.
pub fn oracle_classes(
    graph: &ScaleGraph,
    endpoint: usize,
    maxlen: usize,
    budget: usize,
) -> Result<OracleClasses, OracleError> {
    if endpoint >= graph.len() {
        return Err(OracleError::Point(endpoint));
    }
    let to_end = hop_distances(graph, endpoint);
    let start = graph.basepoint();
    let chains = enumerate_chains(graph, start, endpoint, maxlen + 1, &to_end, budget)?;
    let index: HashMap<&[usize], usize> = chains.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();

    let wide = closure(graph, &chains, &index, maxlen + 1);
    let narrow = closure(graph, &chains, &index, maxlen);

    // Compare the two partitions on chains with at most maxlen - 1 steps.
    let short: Vec<usize> = (0..chains.len()).filter(|&i| chains[i].len() <= maxlen).collect();
    let mut pairing: HashMap<usize, usize> = HashMap::new();
    let mut reverse: HashMap<usize, usize> = HashMap::new();
    let mut stable = true;
    for &i in &short {
        let (a, b) = (wide[i], narrow[i]);
        if *pairing.entry(a).or_insert(b) != b || *reverse.entry(b).or_insert(a) != a {
            stable = false;
            break;
        }
    }

    let mut reps: HashMap<usize, (usize, usize)> = HashMap::new();
    for (i, c) in chains.iter().enumerate() {
        if c.len() > maxlen + 1 {
            continue;
        }
        let e = reps.entry(wide[i]).or_insert((i, 0));
        if chains[i] < chains[e.0] {
            e.0 = i;
        }
        e.1 += 1;
    }
    let mut ordered: Vec<(usize, (usize, usize))> = reps.into_iter().collect();
    ordered.sort_by(|x, y| chains[x.1 .0].cmp(&chains[y.1 .0]));
    let class_index: HashMap<usize, usize> = ordered.iter().enumerate().map(|(k, (root, _))| (*root, k)).collect();
    let classes = ordered
        .iter()
        .map(|(_, (rep, size))| OracleClass { representative: Chain(chains[*rep].clone()), size: *size })
        .collect();
    let membership = chains
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() <= maxlen + 1)
        .map(|(i, c)| (c.clone(), class_index[&wide[i]]))
        .collect();
    Ok(OracleClasses { endpoint, maxlen, classes, stable, chains_examined: chains.len(), membership })
}

fn enumerate_chains(
    graph: &ScaleGraph,
    start: usize,
    end: usize,
    max_steps: usize,
    to_end: &[usize],
    budget: usize,
) -> Result<Vec<Vec<usize>>, OracleError> {
    let mut out = Vec::new();
    if to_end[start] == usize::MAX {
        return Ok(out);
    }
    for steps in 1..=max_steps {
        let mut current = vec![start];
        walk(graph, end, steps, to_end, &mut current, &mut out, budget)?;
    }
    Ok(out)
}

fn walk(
    graph: &ScaleGraph,
    end: usize,
    steps: usize,
    to_end: &[usize],
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    budget: usize,
) -> Result<(), OracleError> {
    let u = *current.last().unwrap();
    let left = steps + 1 - current.len();
    if left == 0 {
        if u == end {
            if out.len() >= budget {
                return Err(OracleError::Budget { budget });
            }
            out.push(current.clone());
        }
        return Ok(());
    }
    let mut next: Vec<usize> = graph.neighbors(u).iter().map(|&v| v as usize).collect();
    let pos = next.partition_point(|&v| v < u);
    next.insert(pos, u);
    for v in next {
        if to_end[v] < left {
            current.push(v);
            walk(graph, end, steps, to_end, current, out, budget)?;
            current.pop();
        }
    }
    Ok(())
}

/// Union-find closure of Remove moves among chains with at most `cap` steps.
/// Add moves are inverse Removes, so this is the full move closure.
fn closure(graph: &ScaleGraph, chains: &[Vec<usize>], index: &HashMap<&[usize], usize>, cap: usize) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..chains.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut scratch = Vec::new();
    for (i, c) in chains.iter().enumerate() {
        if c.len() - 1 > cap {
            continue;
        }
        for p in 1..c.len() - 1 {
            if !graph.admissible(c[p - 1], c[p + 1]) {
                continue;
            }
            scratch.clear();
            scratch.extend_from_slice(&c[..p]);
            scratch.extend_from_slice(&c[p + 1..]);
            let j = index[scratch.as_slice()];
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..chains.len()).map(|i| find(&mut parent, i)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(HomotopyCertificate),
    /// Nothing found among `explored` chains; this says nothing about
    /// inequivalence.
    NotFoundWithinBudget {
        explored: usize,
    },
}

/// Breadth-first search for a certificate from `a` to `b`, visiting at most
/// `budget` chains of at most `max(|a|, |b|) + 2` steps.
pub fn search_homotopy(graph: &ScaleGraph, a: &Chain, b: &Chain, budget: usize) -> Result<SearchOutcome, ChainError> {
    if a.start() != b.start() || a.end() != b.end() {
        return Err(ChainError::EndpointMismatch);
    }
    Chain::new(graph, a.vertices().to_vec())?;
    Chain::new(graph, b.vertices().to_vec())?;
    if a == b {
        return Ok(SearchOutcome::Found(HomotopyCertificate::identity(a.clone())));
    }
    let cap = a.steps().max(b.steps()) + 2;
    let mut parent: HashMap<Chain, Option<(Chain, HomotopyMove)>> = HashMap::new();
    parent.insert(a.clone(), None);
    let mut queue = VecDeque::from([a.clone()]);
    while let Some(c) = queue.pop_front() {
        for mv in candidate_moves(graph, &c, cap) {
            let next = apply_move(graph, &c, mv).expect("candidate moves are admissible");
            if parent.contains_key(&next) {
                continue;
            }
            parent.insert(next.clone(), Some((c.clone(), mv)));
            if &next == b {
                let mut moves = Vec::new();
                let mut cur = next;
                while let Some(Some((prev, mv))) = parent.get(&cur) {
                    moves.push(*mv);
                    cur = prev.clone();
                }
                moves.reverse();
                return Ok(SearchOutcome::Found(HomotopyCertificate { start: a.clone(), moves }));
            }
            if parent.len() >= budget {
                return Ok(SearchOutcome::NotFoundWithinBudget { explored: parent.len() });
            }
            queue.push_back(next);
        }
    }
    Ok(SearchOutcome::NotFoundWithinBudget { explored: parent.len() })
}

fn candidate_moves(graph: &ScaleGraph, c: &Chain, cap: usize) -> Vec<HomotopyMove> {
    let v = c.vertices();
    let steps = c.steps();
    let mut out = Vec::new();
    for p in 1..steps {
        if graph.admissible(v[p - 1], v[p + 1]) {
            out.push(HomotopyMove::Remove { position: p });
        }
    }
    if steps < cap {
        for p in 0..steps {
            let common = graph.common_neighbors_above(v[p], v[p + 1], None);
            let mut points: Vec<usize> = common.into_iter().map(|x| x as usize).collect();
            for &x in &[v[p], v[p + 1]] {
                if graph.admissible(v[p], x) && graph.admissible(x, v[p + 1]) {
                    points.push(x);
                }
            }
            points.sort_unstable();
            points.dedup();
            out.extend(points.into_iter().map(|point| HomotopyMove::Add { position: p, point }));
        }
    }
    out
}
