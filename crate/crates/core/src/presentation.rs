//! Presentations of the deck group at one scale: a BFS spanning tree of the
//! basepoint component, one generator per non-tree edge and one relator per
//! triangle.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{Chain, ChainError, OracleClasses};
use crate::group::{tietze_simplify, FPGroup, GroupError, Simplification};
use crate::metric::ScaleGraph;
use crate::word::{Letter, Word};

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScaleError {
    #[error("chain starts at {0}, not at the basepoint")]
    NotBased(usize),
    #[error("loop must start and end at the basepoint")]
    NotALoop,
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("mesh too coarse: samples {position} and {next} ({a} and {b}) are not within the scale", next = position + 1)]
    MeshTooCoarse { position: usize, a: usize, b: usize },
    #[error("fine scale {fine} exceeds a third of the scale ({limit})")]
    FineScaleTooCoarse { fine: f64, limit: f64 },
    #[error("the basepoint is not in the dense set")]
    BasepointNotDense,
    #[error("point {witness} is not within the fine scale of the dense set")]
    NotDense { witness: usize },
    #[error("graphs are over different spaces")]
    SpaceMismatch,
}

/// `(endpoint, word)`: the class of a chain from the basepoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainClass {
    pub endpoint: usize,
    pub word: Word,
}

#[derive(Clone, Debug)]
pub struct PresentationAtScale {
    graph: Arc<ScaleGraph>,
    parent: Vec<u32>,
    depth: Vec<u32>,
    generators: Vec<(usize, usize)>,
    edge_generator: Vec<u32>,
    tree_edge: Vec<bool>,
    component: Vec<usize>,
}

impl PresentationAtScale {
    pub fn new(graph: Arc<ScaleGraph>) -> Self {
        let n = graph.len();
        let root = graph.basepoint();
        let mut parent = vec![NONE; n];
        let mut depth = vec![NONE; n];
        let mut tree_edge = vec![false; graph.edge_count()];
        depth[root] = 0;
        let mut order = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for (&v, &e) in graph.neighbors(u).iter().zip(graph.neighbor_edges(u)) {
                let v = v as usize;
                if depth[v] == NONE {
                    depth[v] = depth[u] + 1;
                    parent[v] = u as u32;
                    tree_edge[e as usize] = true;
                    order.push(v);
                    queue.push_back(v);
                }
            }
        }
        order.sort_unstable();
        if order.len() < n {
            log::warn!(
                "scale {}: {} of {} points are not chain connected to the basepoint and are ignored",
                graph.scale(),
                n - order.len(),
                n
            );
        }
        let mut generators = Vec::new();
        let mut edge_generator = vec![NONE; graph.edge_count()];
        for (id, &(a, b)) in graph.edges().iter().enumerate() {
            if depth[a as usize] != NONE && !tree_edge[id] {
                edge_generator[id] = generators.len() as u32;
                generators.push((a as usize, b as usize));
            }
        }
        PresentationAtScale { graph, parent, depth, generators, edge_generator, tree_edge, component: order }
    }

    pub fn graph(&self) -> &ScaleGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<ScaleGraph> {
        &self.graph
    }

    pub fn scale(&self) -> f64 {
        self.graph.scale()
    }

    pub fn basepoint(&self) -> usize {
        self.graph.basepoint()
    }

    /// Non-tree edges `(a, b)`, `a < b`; generator `i` traverses `a → b`.
    pub fn generators(&self) -> &[(usize, usize)] {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Points of the basepoint component, ascending.
    pub fn component(&self) -> &[usize] {
        &self.component
    }

    pub fn in_component(&self, x: usize) -> bool {
        self.depth[x] != NONE
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        (self.parent[x] != NONE).then_some(self.parent[x] as usize)
    }

    pub fn is_tree_edge(&self, edge: usize) -> bool {
        self.tree_edge[edge]
    }

    pub fn edge_generator(&self, edge: usize) -> Option<usize> {
        (self.edge_generator[edge] != NONE).then_some(self.edge_generator[edge] as usize)
    }

    /// The letter read along the step `a → b` (none for tree edges and stays).
    pub fn step_letter(&self, a: usize, b: usize) -> Option<Letter> {
        if a == b {
            return None;
        }
        let e = self.graph.edge_id(a, b)?;
        let g = self.edge_generator(e)?;
        Some(Letter::new(g, a > b))
    }

    fn read(&self, vertices: &[usize]) -> Word {
        let mut w = Word::empty();
        for s in vertices.windows(2) {
            if let Some(l) = self.step_letter(s[0], s[1]) {
                w.push_reduced(l);
            }
        }
        w
    }

    /// The boundary word of triangle `[a, b, c]`.
    pub fn triangle_relator(&self, t: [u32; 3]) -> Word {
        let [a, b, c] = t.map(|x| x as usize);
        self.read(&[a, b, c, a])
    }

    /// One relator per triangle of the basepoint component, in triangle order
    /// (trivial words included).
    pub fn relators(&self) -> Vec<Word> {
        self.graph
            .triangles()
            .into_par_iter()
            .filter(|t| self.in_component(t[0] as usize))
            .map(|t| self.triangle_relator(t))
            .collect()
    }

    pub fn group(&self) -> FPGroup {
        FPGroup::new(self.generators.len(), self.relators()).expect("relators use presentation generators")
    }

    /// Path `x, parent(x), …, basepoint` in the tree.
    pub fn path_to_root(&self, x: usize) -> Vec<usize> {
        assert!(self.in_component(x), "point {x} is outside the basepoint component");
        let mut out = vec![x];
        let mut u = x;
        while self.parent[u] != NONE {
            u = self.parent[u] as usize;
            out.push(u);
        }
        out
    }

    /// The loop `∗ ⇝ a → b ⇝ ∗` defining generator `g`.
    pub fn generator_loop(&self, g: usize) -> Chain {
        let (a, b) = self.generators[g];
        let mut v: Vec<usize> = self.path_to_root(a).into_iter().rev().collect();
        v.extend(self.path_to_root(b));
        Chain::new_unchecked(v)
    }

    /// A loop whose class is `word`, built from generator loops.
    pub fn loop_of_word(&self, word: &Word) -> Chain {
        let mut chain = Chain::new_unchecked(vec![self.basepoint()]);
        for l in word.letters() {
            let lp = self.generator_loop(l.generator());
            let lp = if l.is_inverse() { lp.reversed() } else { lp };
            chain = chain.concat(&lp);
        }
        chain
    }

    pub fn chain_class(&self, chain: &Chain) -> Result<ChainClass, ScaleError> {
        if chain.start() != self.basepoint() {
            return Err(ScaleError::NotBased(chain.start()));
        }
        let checked = Chain::new(&self.graph, chain.vertices().to_vec())?;
        Ok(ChainClass { endpoint: checked.end(), word: self.read(checked.vertices()) })
    }

    /// Class of a sampled loop at the basepoint.
    pub fn loop_class(&self, samples: &[usize]) -> Result<ChainClass, ScaleError> {
        let base = self.basepoint();
        if samples.first() != Some(&base) || samples.last() != Some(&base) {
            return Err(ScaleError::NotALoop);
        }
        for (position, s) in samples.windows(2).enumerate() {
            if !self.graph.admissible(s[0], s[1]) {
                return Err(ScaleError::MeshTooCoarse { position, a: s[0], b: s[1] });
            }
        }
        Ok(ChainClass { endpoint: base, word: self.read(samples) })
    }

    /// Simplifies the presentation.
    ///
    /// The first pass is a triangle collapse: starting from the tree edges,
    /// any triangle with two trivial edges makes its third edge trivial. This
    /// is a sequence of length-one relator eliminations, run without
    /// materializing the relators of collapsed triangles. The triangles
    /// with two or more surviving edges are then handed to
    /// [`tietze_simplify`] with the remaining budget.
    pub fn simplify(&self, pass_budget: usize) -> Simplification {
        if pass_budget == 0 {
            return tietze_simplify(&self.group(), 0);
        }
        let graph = &*self.graph;
        let trivial = self.collapse();

        let mut live_index = vec![NONE; self.generators.len()];
        let mut live = Vec::new();
        for (e, &g) in self.edge_generator.iter().enumerate() {
            if g != NONE && !trivial[e] {
                live_index[g as usize] = live.len() as u32;
                live.push(g as usize);
            }
        }
        let live_letter = |a: usize, b: usize| -> Option<Letter> {
            let e = graph.edge_id(a, b).unwrap();
            if trivial[e] {
                return None;
            }
            let g = live_index[self.edge_generator[e] as usize] as usize;
            Some(Letter::new(g, a > b))
        };
        let trivial = &trivial;
        let live_letter = &live_letter;
        let live_edges: Vec<usize> =
            (0..trivial.len()).filter(|&e| !trivial[e] && self.edge_generator[e] != NONE).collect();
        let relators: Vec<Word> = live_edges
            .par_iter()
            .flat_map_iter(|&e| {
                let (a, b) = graph.edges()[e];
                let (a, b) = (a as usize, b as usize);
                graph.common_neighbors_above(a, b, None).into_iter().filter_map(move |c| {
                    let c = c as usize;
                    let ea = graph.edge_id(a, c).unwrap();
                    let eb = graph.edge_id(b, c).unwrap();
                    // Count each triangle once, from its smallest live edge.
                    let others_live = [ea, eb].iter().filter(|&&x| !trivial[x]).count();
                    if others_live == 0 || [ea, eb].iter().any(|&x| !trivial[x] && x < e) {
                        return None;
                    }
                    let mut w = Word::empty();
                    for (x, y) in [(a, b), (b, c), (c, a)] {
                        if let Some(l) = live_letter(x, y) {
                            w.push_reduced(l);
                        }
                    }
                    Some(w)
                })
            })
            .collect();
        let reduced = FPGroup::new(live.len(), relators).expect("live relators in range");
        let inner = tietze_simplify(&reduced, pass_budget - 1);
        let substitution = live_index
            .iter()
            .map(|&k| if k == NONE { Word::empty() } else { inner.substitution[k as usize].clone() })
            .collect();
        Simplification {
            survivors: inner.survivors.iter().map(|&k| live[k]).collect(),
            group: inner.group,
            substitution,
            certification: inner.certification,
            passes: inner.passes + 1,
        }
    }
}

impl PresentationAtScale {
    /// Edges made trivial by the tree and repeated triangle collapse.
    ///
    /// Live edges are swept in order of depth until a sweep changes nothing.
    /// Each edge tries the triangles through its endpoints' parents first and
    /// stops at the first triangle whose other two edges are trivial, so dense
    /// graphs never enumerate their full triangle set.
    fn collapse(&self) -> Vec<bool> {
        let graph = &*self.graph;
        let mut trivial = self.tree_edge.clone();
        let mut pending: Vec<usize> = (0..trivial.len()).filter(|&e| self.edge_generator[e] != NONE).collect();
        pending.sort_by_key(|&e| {
            let (a, b) = graph.edges()[e];
            let (da, db) = (self.depth[a as usize], self.depth[b as usize]);
            (da.max(db), da.min(db), e)
        });
        loop {
            let before = pending.len();
            pending.retain(|&e| {
                if self.collapses(e, &trivial) {
                    trivial[e] = true;
                    false
                } else {
                    true
                }
            });
            if pending.len() == before {
                return trivial;
            }
        }
    }

    fn collapses(&self, e: usize, trivial: &[bool]) -> bool {
        let graph = &*self.graph;
        let (a, b) = graph.edges()[e];
        let (a, b) = (a as usize, b as usize);
        for c in [self.parent[a], self.parent[b]] {
            if c == NONE || c as usize == a || c as usize == b {
                continue;
            }
            let c = c as usize;
            if let (Some(x), Some(y)) = (graph.edge_id(a, c), graph.edge_id(b, c)) {
                if trivial[x] && trivial[y] {
                    return true;
                }
            }
        }
        let (na, nb) = (graph.neighbors(a), graph.neighbors(b));
        let (ea, eb) = (graph.neighbor_edges(a), graph.neighbor_edges(b));
        let (mut i, mut j) = (0, 0);
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if trivial[ea[i] as usize] && trivial[eb[j] as usize] {
                        return true;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        false
    }
}

/// How the oracle partition of short chains compares with the partition by
/// canonical words in a certified-free presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleComparison {
    /// Chains with at most `maxlen - 1` steps, where the oracle is checked.
    pub chains: usize,
    pub oracle_classes: usize,
    pub group_classes: usize,
    /// Whether the two partitions coincide chain by chain.
    pub partitions_agree: bool,
}

/// Compares `oracle` with the words of `simplification` on the chains whose
/// partition the oracle's stability flag covers.
pub fn compare_with_oracle(
    pres: &PresentationAtScale,
    simplification: &Simplification,
    oracle: &OracleClasses,
) -> Result<OracleComparison, GroupError> {
    if !simplification.certification.is_free() {
        return Err(GroupError::NotCertified);
    }
    let mut by_class: HashMap<usize, Word> = HashMap::new();
    let mut by_word: HashMap<Word, usize> = HashMap::new();
    let mut agree = true;
    let mut chains = 0;
    for (chain, class) in oracle.chains() {
        if chain.steps() + 1 > oracle.maxlen {
            continue;
        }
        chains += 1;
        let word =
            simplification.rewrite(&pres.chain_class(&chain).expect("oracle chains start at the basepoint").word);
        agree &= *by_class.entry(class).or_insert_with(|| word.clone()) == word;
        agree &= *by_word.entry(word).or_insert(class) == class;
    }
    Ok(OracleComparison {
        chains,
        oracle_classes: by_class.len(),
        group_classes: by_word.len(),
        partitions_agree: agree,
    })
}

/// Loops and words of the minimal elements spanned by a dense set.
#[derive(Clone, Debug)]
pub struct MinimalGenerators {
    pub loops: Vec<Chain>,
    pub words: Vec<Word>,
}

/// Generators of the deck group at `pres`'s scale built from a dense subset.
///
/// `fine` must be at most a third of the scale and `dense_set` must meet
/// every ball of the fine scale. Each returned loop runs out along a tree of
/// dense points, crosses one edge between dense points, and returns.
pub fn minimal_generators(
    pres: &PresentationAtScale,
    dense_set: &[usize],
    fine: &ScaleGraph,
) -> Result<MinimalGenerators, ScaleError> {
    let graph = pres.graph();
    if graph.space() != fine.space() {
        return Err(ScaleError::SpaceMismatch);
    }
    let limit = graph.scale() / 3.0;
    if fine.scale() > limit {
        return Err(ScaleError::FineScaleTooCoarse { fine: fine.scale(), limit });
    }
    let n = graph.len();
    let mut dense = vec![false; n];
    for &d in dense_set {
        dense[d] = true;
    }
    let base = pres.basepoint();
    if !dense[base] {
        return Err(ScaleError::BasepointNotDense);
    }
    for x in 0..n {
        if !dense[x] && !fine.neighbors(x).iter().any(|&y| dense[y as usize]) {
            return Err(ScaleError::NotDense { witness: x });
        }
    }

    // BFS tree on the dense points in the scale graph.
    let mut parent = vec![NONE; n];
    let mut seen = vec![false; n];
    seen[base] = true;
    let mut order = vec![base];
    let mut queue = VecDeque::from([base]);
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            let v = v as usize;
            if dense[v] && !seen[v] {
                seen[v] = true;
                parent[v] = u as u32;
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    let stem = |x: usize| -> Vec<usize> {
        let mut out = vec![x];
        let mut u = x;
        while parent[u] != NONE {
            u = parent[u] as usize;
            out.push(u);
        }
        out
    };
    order.sort_unstable();
    let mut loops = Vec::new();
    for &a in &order {
        for &b in graph.neighbors(a) {
            let b = b as usize;
            if b <= a || !seen[b] || parent[a] == b as u32 || parent[b] == a as u32 {
                continue;
            }
            let mut v: Vec<usize> = stem(a).into_iter().rev().collect();
            v.extend(stem(b));
            loops.push(Chain::new_unchecked(v));
        }
    }
    let words = loops.iter().map(|c| pres.chain_class(c).map(|k| k.word)).collect::<Result<_, _>>()?;
    Ok(MinimalGenerators { loops, words })
}
