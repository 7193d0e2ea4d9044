//! Truncated covers at a scale and the deck action on them.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::group::{AbelianCoordinates, Simplification};
use crate::presentation::PresentationAtScale;
use crate::word::{reduced_words, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("the presentation is not certified free; use the abelianized cover instead")]
    NotCertified,
}

/// Position of a cover vertex in its fiber.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FiberLabel {
    /// Reduced word over the surviving generators.
    Word(Word),
    /// Free abelian coordinates (abelianized mode).
    Vector(Vec<BigInt>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMode {
    Exact,
    Abelianized,
}

/// Breadth-first truncation of the cover around the base vertex.
#[derive(Clone, Debug)]
pub struct TruncatedCover {
    pub scale: f64,
    pub radius: usize,
    pub mode: CoverMode,
    /// Deck generators (surviving generators of the simplified presentation).
    pub rank: usize,
    points: Vec<usize>,
    labels: Vec<FiberLabel>,
    depth: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
    index: HashMap<(usize, FiberLabel), usize>,
    coordinates: Option<AbelianCoordinates>,
}

impl TruncatedCover {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Projection to the base space.
    pub fn point(&self, v: usize) -> usize {
        self.points[v]
    }

    pub fn label(&self, v: usize) -> &FiberLabel {
        &self.labels[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, row) in self.adjacency.iter().enumerate() {
            out.extend(row.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    /// Longest word among exact-mode labels.
    pub fn max_word_length(&self) -> usize {
        self.labels
            .iter()
            .map(|l| match l {
                FiberLabel::Word(w) => w.len(),
                FiberLabel::Vector(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn vertex(&self, point: usize, label: &FiberLabel) -> Option<usize> {
        self.index.get(&(point, label.clone())).copied()
    }

    /// `g · v`, when it lies inside the truncation.
    pub fn deck_act(&self, g: &Word, v: usize) -> DeckImage {
        let label = match &self.labels[v] {
            FiberLabel::Word(w) => FiberLabel::Word(g.reduced().mul(w)),
            FiberLabel::Vector(x) => {
                let c = self.coordinates.as_ref().expect("abelianized cover has coordinates");
                let shift = c.project(g);
                FiberLabel::Vector(x.iter().zip(&shift).map(|(a, b)| a + b).collect())
            }
        };
        match self.vertex(self.points[v], &label) {
            Some(u) => DeckImage::Inside(u),
            None => DeckImage::OutsideTruncation,
        }
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeckImage {
    Inside(usize),
    OutsideTruncation,
}

/// Builds the truncated cover of radius `radius` at a certified-free scale.
pub fn build_cover(
    pres: &PresentationAtScale,
    simplification: &Simplification,
    radius: usize,
) -> Result<TruncatedCover, CoverError> {
    if !simplification.certification.is_free() {
        return Err(CoverError::NotCertified);
    }
    let step = |l: Option<crate::word::Letter>| -> Word {
        match l {
            None => Word::empty(),
            Some(l) => {
                let w = &simplification.substitution[l.generator()];
                if l.is_inverse() {
                    w.inverse()
                } else {
                    w.clone()
                }
            }
        }
    };
    Ok(bfs(
        pres,
        radius,
        CoverMode::Exact,
        simplification.rank(),
        None,
        FiberLabel::Word(Word::empty()),
        |label, a, b| {
            let FiberLabel::Word(w) = label else { unreachable!() };
            FiberLabel::Word(w.mul(&step(pres.step_letter(a, b))))
        },
    ))
}

/// Cover whose fiber coordinate is the image in the free part of the
/// abelianization; an approximation of the true cover for scales that are not
/// certified free.
pub fn build_abelianized_cover(
    pres: &PresentationAtScale,
    simplification: &Simplification,
    radius: usize,
) -> TruncatedCover {
    let coords = AbelianCoordinates::of(&simplification.group);
    let betti = coords.betti();
    let letter_shift: Vec<Vec<BigInt>> = simplification.substitution.iter().map(|w| coords.project(w)).collect();
    let zero = vec![BigInt::from(0); betti];
    bfs(
        pres,
        radius,
        CoverMode::Abelianized,
        simplification.rank(),
        Some(coords.clone()),
        FiberLabel::Vector(zero),
        |label, a, b| {
            let FiberLabel::Vector(x) = label else { unreachable!() };
            match pres.step_letter(a, b) {
                None => FiberLabel::Vector(x.clone()),
                Some(l) => {
                    let s = &letter_shift[l.generator()];
                    FiberLabel::Vector(
                        x.iter().zip(s).map(|(p, q)| if l.is_inverse() { p - q } else { p + q }).collect(),
                    )
                }
            }
        },
    )
}

fn bfs<F>(
    pres: &PresentationAtScale,
    radius: usize,
    mode: CoverMode,
    rank: usize,
    coordinates: Option<AbelianCoordinates>,
    base_label: FiberLabel,
    extend: F,
) -> TruncatedCover
where
    F: Fn(&FiberLabel, usize, usize) -> FiberLabel,
{
    let graph = pres.graph();
    let base = pres.basepoint();
    let mut points = vec![base];
    let mut labels = vec![base_label.clone()];
    let mut depth = vec![0];
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new()];
    let mut index = HashMap::from([((base, base_label), 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let x = points[u];
        for &y in graph.neighbors(x) {
            let y = y as usize;
            let label = extend(&labels[u], x, y);
            let key = (y, label);
            let v = match index.get(&key) {
                Some(&v) => v,
                None if depth[u] < radius => {
                    let v = points.len();
                    points.push(y);
                    labels.push(key.1.clone());
                    depth.push(depth[u] + 1);
                    adjacency.push(Vec::new());
                    index.insert(key, v);
                    queue.push_back(v);
                    v
                }
                None => continue,
            };
            if !adjacency[u].contains(&v) {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
    }
    for row in &mut adjacency {
        row.sort_unstable();
    }
    TruncatedCover { scale: pres.scale(), radius, mode, rank, points, labels, depth, adjacency, index, coordinates }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    FixedPoint,
    Adjacent,
    EndpointMoved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub word: Word,
    pub vertex: usize,
    pub image: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DiscretenessReport {
    pub words_checked: usize,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

impl DiscretenessReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every nonidentity deck word of length `≤ words_up_to` moves
/// every vertex it keeps inside the truncation to a distinct, non-adjacent
/// vertex over the same point.
pub fn check_discreteness(cover: &TruncatedCover, words_up_to: usize) -> DiscretenessReport {
    check_discreteness_with(cover, words_up_to, |g, v| match cover.deck_act(g, v) {
        DeckImage::Inside(u) => Some(u),
        DeckImage::OutsideTruncation => None,
    })
}

/// [`check_discreteness`] with a caller-supplied action, so a faulty action
/// can be shown to be caught.
pub fn check_discreteness_with<A>(cover: &TruncatedCover, words_up_to: usize, act: A) -> DiscretenessReport
where
    A: Fn(&Word, usize) -> Option<usize> + Sync,
{
    let words = reduced_words(cover.rank, words_up_to);
    let results: Vec<(usize, Vec<Violation>)> = words
        .par_iter()
        .map(|g| {
            let mut pairs = 0;
            let mut found = Vec::new();
            for v in 0..cover.len() {
                let Some(u) = act(g, v) else { continue };
                pairs += 1;
                let mut push = |kind| found.push(Violation { word: g.clone(), vertex: v, image: u, kind });
                if u == v {
                    push(ViolationKind::FixedPoint);
                } else if cover.is_adjacent(u, v) {
                    push(ViolationKind::Adjacent);
                }
                if cover.point(u) != cover.point(v) {
                    push(ViolationKind::EndpointMoved);
                }
            }
            (pairs, found)
        })
        .collect();
    let mut report = DiscretenessReport { words_checked: words.len(), ..Default::default() };
    for (pairs, found) in results {
        report.pairs_checked += pairs;
        report.violations.extend(found);
    }
    report
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FiberReport {
    /// Pairs of vertices over a common point whose connecting deck word is
    /// within the bound.
    pub pairs_checked: usize,
    /// Pairs no deck word of the bound maps one onto the other.
    pub failures: Vec<(usize, usize)>,
    /// Vertices with two neighbors over the same point.
    pub injectivity_failures: Vec<usize>,
}

impl FiberReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty() && self.injectivity_failures.is_empty()
    }
}

/// Fiber-equals-orbit and local injectivity of the projection, over the
/// whole truncation of an exact cover.
pub fn check_fibers(cover: &TruncatedCover, words_up_to: usize) -> FiberReport {
    let mut by_point: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in 0..cover.len() {
        by_point.entry(cover.point(v)).or_default().push(v);
    }
    let mut report = FiberReport::default();
    let mut fibers: Vec<_> = by_point.into_iter().collect();
    fibers.sort();
    for (_, fiber) in fibers {
        for &v in &fiber {
            for &u in &fiber {
                if u == v {
                    continue;
                }
                let (FiberLabel::Word(a), FiberLabel::Word(b)) = (cover.label(v), cover.label(u)) else {
                    continue;
                };
                let g = b.mul(&a.inverse());
                if g.len() > words_up_to {
                    continue;
                }
                report.pairs_checked += 1;
                if cover.deck_act(&g, v) != DeckImage::Inside(u) {
                    report.failures.push((v, u));
                }
            }
        }
    }
    for v in 0..cover.len() {
        let mut seen: Vec<usize> = cover.neighbors(v).iter().map(|&u| cover.point(u)).collect();
        seen.push(cover.point(v));
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            report.injectivity_failures.push(v);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::metric::{FiniteMetricSpace, ScaleGraph};

    fn pres(scale: f64) -> PresentationAtScale {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let s = Arc::new(FiniteMetricSpace::from_points(&pts, 0).unwrap());
        PresentationAtScale::new(Arc::new(ScaleGraph::new(s, scale)))
    }

    #[test]
    fn line_over_cycle() {
        let p = pres(1.2);
        let s = p.simplify(8);
        for r in 1..=9 {
            assert_eq!(build_cover(&p, &s, r).unwrap().len(), 2 * r + 1);
        }
        let c = build_cover(&p, &s, 9).unwrap();
        assert_eq!(c.len(), 19);
        assert_eq!(c.edges().len(), 18);
    }

    #[test]
    fn deck_action_examples() {
        let p = pres(1.2);
        let s = p.simplify(8);
        let c = build_cover(&p, &s, 9).unwrap();
        let g = Word::generator(0);
        let base = c.vertex(0, &FiberLabel::Word(Word::empty())).unwrap();
        let moved = c.vertex(0, &FiberLabel::Word(g.clone())).unwrap();
        assert_eq!(c.deck_act(&g, base), DeckImage::Inside(moved));
        assert_eq!(c.deck_act(&g.inverse(), moved), DeckImage::Inside(base));
        for v in 0..c.len() {
            assert_eq!(c.deck_act(&Word::empty(), v), DeckImage::Inside(v));
        }
        assert!(check_discreteness(&c, 3).is_clean());
        assert!(check_fibers(&c, 4).is_clean());
    }

    #[test]
    fn trivial_group_cover_is_base() {
        let p = pres(1.5);
        let s = p.simplify(8);
        let c = build_cover(&p, &s, 3).unwrap();
        assert_eq!(c.len(), 4);
        let r = check_discreteness(&c, 4);
        assert_eq!(r.words_checked, 0);
        assert!(r.is_clean());
    }

    #[test]
    fn broken_action_is_caught() {
        let p = pres(1.2);
        let s = p.simplify(8);
        let c = build_cover(&p, &s, 9).unwrap();
        // Shift along cover edges instead of along fibers.
        let r = check_discreteness_with(&c, 1, |_, v| c.neighbors(v).first().copied());
        assert!(!r.is_clean());
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::EndpointMoved));
    }

    #[test]
    fn uncertified_is_rejected() {
        let p = pres(1.5);
        let s = p.simplify(0);
        assert_eq!(build_cover(&p, &s, 2).unwrap_err(), CoverError::NotCertified);
        let a = build_abelianized_cover(&p, &s, 3);
        assert_eq!(a.mode, CoverMode::Abelianized);
        assert_eq!(a.len(), 4);
    }
}
