//! Stallings folding: subgroups of free groups as folded core graphs.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::word::{Letter, Word};

/// A folded, pruned, based graph labeled by generators of a free group.
///
/// States are numbered breadth-first from the base (state 0), exploring
/// letters in the order `g0, g0⁻¹, g1, g1⁻¹, …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldedSubgroupGraph {
    ambient_rank: usize,
    adjacency: Vec<BTreeMap<i32, usize>>,
}

/// One positively labeled edge `from --g--> to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub from: usize,
    pub generator: usize,
    pub to: usize,
}

impl FoldedSubgroupGraph {
    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn states(&self) -> usize {
        self.adjacency.len()
    }

    pub fn transitions(&self) -> Vec<Transition> {
        let mut out = Vec::new();
        for (from, row) in self.adjacency.iter().enumerate() {
            for (&l, &to) in row {
                if l > 0 {
                    out.push(Transition { from, generator: (l - 1) as usize, to });
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|r| r.keys().filter(|&&l| l > 0).count()).sum()
    }

    /// Rank of the subgroup: edges − states + 1.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.states()
    }

    pub fn step(&self, state: usize, letter: Letter) -> Option<usize> {
        self.adjacency[state].get(&letter.signed()).copied()
    }

    pub fn is_folded(&self) -> bool {
        // Each state keeps one target per label by construction; check the
        // inverse edges agree.
        self.adjacency
            .iter()
            .enumerate()
            .all(|(s, row)| row.iter().all(|(&l, &t)| self.adjacency[t].get(&-l) == Some(&s)))
    }

    pub fn is_core(&self) -> bool {
        self.adjacency.iter().enumerate().skip(1).all(|(_, row)| row.len() >= 2)
    }
}

/// Folds the subgroup generated by `words` (over `ambient_rank` generators).
pub fn fold(words: &[Word], ambient_rank: usize) -> FoldedSubgroupGraph {
    let mut f = Folder::default();
    f.new_state();
    for w in words {
        let w = w.reduced();
        if w.is_empty() {
            continue;
        }
        assert!(w.max_generator().unwrap() < ambient_rank, "word {w} outside the ambient rank");
        let mut u = 0;
        let letters = w.letters();
        for (i, &l) in letters.iter().enumerate() {
            let v = if i + 1 == letters.len() { 0 } else { f.new_state() };
            f.add_edge(u, l.signed(), v);
            u = v;
        }
        f.settle();
    }
    f.finish(ambient_rank)
}

pub fn member(graph: &FoldedSubgroupGraph, word: &Word) -> bool {
    let mut s = 0;
    for &l in word.letters() {
        match graph.step(s, l) {
            Some(t) => s = t,
            None => return false,
        }
    }
    s == 0
}

/// Whether the subgroup is the whole ambient free group.
pub fn surjective(graph: &FoldedSubgroupGraph) -> bool {
    (0..graph.ambient_rank).all(|g| member(graph, &Word::generator(g)))
}

#[derive(Default)]
struct Folder {
    parent: Vec<usize>,
    adjacency: Vec<BTreeMap<i32, usize>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new_state(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.adjacency.push(BTreeMap::new());
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn add_edge(&mut self, u: usize, label: i32, v: usize) {
        let (u, v) = (self.find(u), self.find(v));
        self.insert_half(u, label, v);
        self.insert_half(v, -label, u);
    }

    fn insert_half(&mut self, u: usize, label: i32, v: usize) {
        match self.adjacency[u].get(&label).copied() {
            Some(w) => {
                let w = self.find(w);
                if w != v {
                    self.pending.push((w, v));
                }
            }
            None => {
                self.adjacency[u].insert(label, v);
            }
        }
    }

    fn settle(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            // Keep the smaller index so the base (state 0) is never absorbed.
            let (root, other) = (a.min(b), a.max(b));
            self.parent[other] = root;
            let moved = std::mem::take(&mut self.adjacency[other]);
            for (label, t) in moved {
                let t = self.find(t);
                self.insert_half(root, label, t);
            }
        }
    }

    fn finish(mut self, ambient_rank: usize) -> FoldedSubgroupGraph {
        self.settle();
        let n = self.parent.len();
        let mut adj: Vec<BTreeMap<i32, usize>> = vec![BTreeMap::new(); n];
        for (s, out) in adj.iter_mut().enumerate() {
            if self.find(s) != s {
                continue;
            }
            let row: Vec<(i32, usize)> = self.adjacency[s].iter().map(|(&l, &t)| (l, t)).collect();
            for (l, t) in row {
                out.insert(l, self.find(t));
            }
        }
        // Prune hanging trees, keeping the base.
        let mut alive: Vec<bool> = (0..n).map(|s| self.find(s) == s).collect();
        let mut queue: VecDeque<usize> = (1..n).filter(|&s| alive[s] && adj[s].len() < 2).collect();
        while let Some(s) = queue.pop_front() {
            if !alive[s] || adj[s].len() >= 2 {
                continue;
            }
            alive[s] = false;
            let row = std::mem::take(&mut adj[s]);
            for (l, t) in row {
                if t != s {
                    adj[t].remove(&-l);
                    if t != 0 && alive[t] && adj[t].len() < 2 {
                        queue.push_back(t);
                    }
                }
            }
        }
        // Breadth-first renumbering from the base.
        let mut index = vec![usize::MAX; n];
        index[0] = 0;
        let mut order = vec![0];
        let mut q = VecDeque::from([0]);
        while let Some(s) = q.pop_front() {
            let mut labels: Vec<(i32, usize)> = adj[s].iter().map(|(&l, &t)| (l, t)).collect();
            labels.sort_by_key(|&(l, _)| Letter::from_signed(l).unwrap().rank_index());
            for (_, t) in labels {
                if index[t] == usize::MAX {
                    index[t] = order.len();
                    order.push(t);
                    q.push_back(t);
                }
            }
        }
        let adjacency = order.iter().map(|&s| adj[s].iter().map(|(&l, &t)| (l, index[t])).collect()).collect();
        FoldedSubgroupGraph { ambient_rank, adjacency }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum InjectivityProbe {
    NoKernelWordUpTo { length: usize },
    KernelWitness { word: Word },
}

/// Outcome of [`probe_injectivity`] with the bound actually searched.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub probe: InjectivityProbe,
    pub requested_length: usize,
    pub searched_length: usize,
}

/// Searches reduced domain words of length `1..=max_word_length` in shortlex
/// order for one whose image under `images` reduces to the identity. The bound
/// is lowered until the number of words is within `budget`.
pub fn probe_injectivity(images: &[Word], max_word_length: usize, budget: u128) -> ProbeReport {
    let rank = images.len();
    let mut length = max_word_length;
    while length > 0 {
        let total: u128 = (1..=length).map(|n| crate::word::reduced_word_count(rank, n)).sum();
        if total <= budget {
            break;
        }
        length -= 1;
    }
    if length < max_word_length {
        log::info!("injectivity probe bound lowered from {max_word_length} to {length}");
    }
    let mut probe = InjectivityProbe::NoKernelWordUpTo { length };
    'outer: for len in 1..=length {
        let mut letters = Vec::with_capacity(len);
        let mut stack = vec![Word::empty()];
        if let Some(w) = search(images, len, &mut letters, &mut stack) {
            probe = InjectivityProbe::KernelWitness { word: w };
            break 'outer;
        }
    }
    ProbeReport { probe, requested_length: max_word_length, searched_length: length }
}

fn search(images: &[Word], len: usize, letters: &mut Vec<Letter>, stack: &mut Vec<Word>) -> Option<Word> {
    if letters.len() == len {
        return stack.last().unwrap().is_empty().then(|| Word::from_letters(letters.clone()));
    }
    for idx in 0..2 * images.len() {
        let l = Letter::from_rank_index(idx);
        if letters.last() == Some(&l.inverse()) {
            continue;
        }
        let image = &images[l.generator()];
        let next =
            if l.is_inverse() { stack.last().unwrap().mul(&image.inverse()) } else { stack.last().unwrap().mul(image) };
        letters.push(l);
        stack.push(next);
        let found = search(images, len, letters, stack);
        stack.pop();
        letters.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}
