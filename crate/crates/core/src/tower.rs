//! Towers of scales: per-scale analysis, the coarsening homomorphisms between
//! consecutive scales, critical intervals and stabilization.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chain::Chain;
use crate::folding::{fold, probe_injectivity, surjective, ProbeReport};
use crate::group::{
    is_unimodular, matrix_surjectivity, AbelianCoordinates, AbelianInvariants, Certification, Simplification,
};
use crate::metric::{balls_chain_connected, chain_connected, FiniteMetricSpace, ScaleGraph};
use crate::presentation::PresentationAtScale;
use crate::snf::IntMatrix;
use crate::word::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TowerError {
    #[error("schedule must be nonempty")]
    EmptySchedule,
    #[error("scale {0} is not a positive finite number")]
    BadScale(f64),
    #[error("schedule is not strictly decreasing at position {0}")]
    NotDecreasing(usize),
    #[error("fine scale {fine} exceeds coarse scale {coarse}")]
    NotNested { coarse: f64, fine: f64 },
    #[error("scales are over different spaces")]
    SpaceMismatch,
}

#[derive(Clone, Debug)]
pub struct TowerConfig {
    pub pass_budget: usize,
    /// Number of trailing maps that must be isomorphisms for a stable verdict.
    pub stabilization_window: usize,
    pub probe_length: usize,
    pub probe_budget: u128,
}

impl Default for TowerConfig {
    fn default() -> Self {
        TowerConfig { pass_budget: 64, stabilization_window: 3, probe_length: 3, probe_budget: 200_000 }
    }
}

/// Everything computed at one scale.
#[derive(Clone, Debug)]
pub struct ScaleAnalysis {
    pub presentation: PresentationAtScale,
    pub simplification: Simplification,
    pub coordinates: AbelianCoordinates,
    pub components: usize,
}

impl ScaleAnalysis {
    pub fn new(space: Arc<FiniteMetricSpace>, scale: f64, pass_budget: usize) -> Self {
        let graph = Arc::new(ScaleGraph::new(space, scale));
        let components = chain_connected(&graph).count;
        let presentation = PresentationAtScale::new(graph);
        let simplification = presentation.simplify(pass_budget);
        let coordinates = AbelianCoordinates::of(&simplification.group);
        ScaleAnalysis { presentation, simplification, coordinates, components }
    }

    pub fn scale(&self) -> f64 {
        self.presentation.scale()
    }

    pub fn invariants(&self) -> &AbelianInvariants {
        &self.coordinates.invariants
    }

    pub fn betti(&self) -> usize {
        self.coordinates.betti()
    }

    pub fn certification(&self) -> Certification {
        self.simplification.certification
    }

    pub fn chain_connected(&self) -> bool {
        self.components <= 1
    }

    /// Class of a loop at this scale, in surviving generators.
    pub fn loop_word(&self, chain: &Chain) -> Word {
        let class = self.presentation.chain_class(chain).expect("loop is a chain at this scale");
        self.simplification.rewrite(&class.word)
    }
}

/// The coarsening homomorphism from a fine scale to a coarse one.
#[derive(Clone, Debug)]
pub struct Theta {
    pub coarse_scale: f64,
    pub fine_scale: f64,
    /// Image of each surviving fine generator, over surviving coarse generators.
    pub images: Vec<Word>,
    /// Abelianized map on free parts: coarse betti rows, fine betti columns.
    pub matrix: IntMatrix,
    pub surjective: bool,
    pub kernel_rank: usize,
    pub isomorphism: bool,
    /// Folding check, available when both scales are certified free.
    pub folding: Option<FoldingCheck>,
    pub probe: Option<ProbeReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoldingCheck {
    pub surjective: bool,
    pub image_rank: usize,
}

/// Image of every fine generator's defining loop, read at the coarse scale, as
/// a word over the coarse generators.
pub fn theta_words(coarse: &PresentationAtScale, fine: &PresentationAtScale) -> Result<Vec<Word>, TowerError> {
    check_nested(coarse, fine)?;
    Ok((0..fine.generator_count())
        .into_par_iter()
        .map(|g| coarse.chain_class(&fine.generator_loop(g)).expect("fine loops are coarse chains").word)
        .collect())
}

fn check_nested(coarse: &PresentationAtScale, fine: &PresentationAtScale) -> Result<(), TowerError> {
    if coarse.graph().space() != fine.graph().space() {
        return Err(TowerError::SpaceMismatch);
    }
    if fine.scale() > coarse.scale() {
        return Err(TowerError::NotNested { coarse: coarse.scale(), fine: fine.scale() });
    }
    debug_assert!(fine.graph().edges().iter().all(|&(a, b)| coarse.graph().is_edge(a as usize, b as usize)));
    Ok(())
}

pub fn theta(coarse: &ScaleAnalysis, fine: &ScaleAnalysis, config: &TowerConfig) -> Result<Theta, TowerError> {
    check_nested(&coarse.presentation, &fine.presentation)?;
    let images: Vec<Word> = fine
        .simplification
        .survivors
        .par_iter()
        .map(|&g| {
            let lp = fine.presentation.generator_loop(g);
            coarse.loop_word(&lp)
        })
        .collect();
    let matrix = abelian_matrix(coarse, fine, &images);
    let (onto, kernel_rank) = matrix_surjectivity(&matrix);
    let both_free = coarse.certification().is_free() && fine.certification().is_free();
    let folding = both_free.then(|| {
        let g = fold(&images, coarse.simplification.rank());
        FoldingCheck { surjective: surjective(&g), image_rank: g.rank() }
    });
    let probe = (both_free && config.probe_length > 0)
        .then(|| probe_injectivity(&images, config.probe_length, config.probe_budget));
    Ok(Theta {
        coarse_scale: coarse.scale(),
        fine_scale: fine.scale(),
        images,
        isomorphism: is_unimodular(&matrix),
        matrix,
        surjective: onto,
        kernel_rank,
        folding,
        probe,
    })
}

fn abelian_matrix(coarse: &ScaleAnalysis, fine: &ScaleAnalysis, images: &[Word]) -> IntMatrix {
    let cb = coarse.betti();
    let fb = fine.betti();
    let coarse_gens = coarse.simplification.rank();
    let lift = &fine.coordinates.lift;
    let mut m = IntMatrix::zeros(cb, fb);
    let image_vectors: Vec<Vec<BigInt>> =
        images.iter().map(|w| w.exponent_vector(coarse_gens).into_iter().map(BigInt::from).collect()).collect();
    for j in 0..fb {
        let mut v = vec![BigInt::zero(); coarse_gens];
        for (s, image) in image_vectors.iter().enumerate() {
            let c = lift.get(j, s);
            if c.is_zero() {
                continue;
            }
            for (slot, x) in v.iter_mut().zip(image) {
                *slot += c * x;
            }
        }
        let coords = coarse.coordinates.projection.left_apply(&v);
        for (k, x) in coords.into_iter().enumerate() {
            m.set(k, j, x);
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalInterval {
    /// The interval `(lower, upper]` between consecutive schedule points.
    pub upper: f64,
    pub lower: f64,
    pub betti_upper: usize,
    pub betti_lower: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Stabilization {
    Stable { rank: usize },
    NotStable,
}

#[derive(Clone, Debug)]
pub struct ScaleTower {
    pub scales: Vec<ScaleAnalysis>,
    /// `maps[i]` goes from `scales[i + 1]` to `scales[i]`.
    pub maps: Vec<Theta>,
    /// Whether every ball at scale `i` is connected at scale `i + 1`.
    pub balls_connected: Vec<bool>,
    pub critical: Vec<CriticalInterval>,
    pub stabilization: Stabilization,
    pub config: TowerConfig,
}

impl ScaleTower {
    /// Covering-like: balls connected at the next finer scale and the map
    /// from it surjective. `None` for the finest scale.
    pub fn covering_like(&self, i: usize) -> Option<bool> {
        let map = self.maps.get(i)?;
        let onto = map.surjective && map.folding.as_ref().is_none_or(|f| f.surjective);
        Some(self.balls_connected[i] && onto)
    }

    /// The abelianized map from scale `k` directly to scale `i`.
    pub fn direct_matrix(&self, i: usize, k: usize) -> IntMatrix {
        assert!(i <= k);
        if i == k {
            return IntMatrix::identity(self.scales[i].betti());
        }
        theta(&self.scales[i], &self.scales[k], &TowerConfig { probe_length: 0, ..self.config.clone() })
            .expect("schedule is nested")
            .matrix
    }

    /// Product of consecutive maps from scale `k` to scale `i`.
    pub fn composed_matrix(&self, i: usize, k: usize) -> IntMatrix {
        assert!(i <= k);
        let mut m = IntMatrix::identity(self.scales[i].betti());
        for map in &self.maps[i..k] {
            m = m.mul(&map.matrix);
        }
        m
    }
}

pub fn validate_schedule(schedule: &[f64]) -> Result<(), TowerError> {
    if schedule.is_empty() {
        return Err(TowerError::EmptySchedule);
    }
    if let Some(&s) = schedule.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(TowerError::BadScale(s));
    }
    if let Some(i) = schedule.windows(2).position(|w| w[1] >= w[0]) {
        return Err(TowerError::NotDecreasing(i + 1));
    }
    Ok(())
}

/// Geometric schedule with ratio 1/2 from half the diameter down to twice the
/// smallest positive spacing.
pub fn auto_schedule(space: &FiniteMetricSpace) -> Vec<f64> {
    let top = space.diameter() / 2.0;
    let Some(floor) = space.min_spacing().map(|m| 2.0 * m) else {
        return vec![1.0];
    };
    let mut out = Vec::new();
    let mut s = top;
    while s >= floor {
        out.push(s);
        s /= 2.0;
    }
    if out.is_empty() {
        out.push(top.max(floor));
    }
    out
}

pub fn run_tower(
    space: Arc<FiniteMetricSpace>,
    schedule: &[f64],
    config: &TowerConfig,
) -> Result<ScaleTower, TowerError> {
    validate_schedule(schedule)?;
    if let Some(m) = space.min_spacing() {
        let finest = *schedule.last().unwrap();
        if finest <= m {
            log::warn!("finest scale {finest} is at or below the smallest spacing {m}; the graph there is discrete");
        }
    }
    let scales: Vec<ScaleAnalysis> =
        schedule.par_iter().map(|&s| ScaleAnalysis::new(space.clone(), s, config.pass_budget)).collect();
    for s in &scales {
        if !s.chain_connected() {
            log::warn!("scale {} is not chain connected ({} components)", s.scale(), s.components);
        }
    }
    let pairs: Vec<(Theta, bool)> = (0..scales.len().saturating_sub(1))
        .into_par_iter()
        .map(|i| {
            let map = theta(&scales[i], &scales[i + 1], config).expect("schedule is nested");
            let balls = balls_chain_connected(scales[i].presentation.graph(), scales[i + 1].presentation.graph());
            (map, balls)
        })
        .collect();
    let (maps, balls_connected): (Vec<Theta>, Vec<bool>) = pairs.into_iter().unzip();

    let critical = scales
        .windows(2)
        .filter(|w| w[0].invariants() != w[1].invariants())
        .map(|w| CriticalInterval {
            upper: w[0].scale(),
            lower: w[1].scale(),
            betti_upper: w[0].betti(),
            betti_lower: w[1].betti(),
        })
        .collect();

    let k = config.stabilization_window;
    let stabilization = if k == 0 || maps.len() < k {
        Stabilization::NotStable
    } else {
        let start = maps.len() - k;
        let tail = &scales[start..];
        let rank = tail[0].betti();
        let ok = tail.iter().all(|s| s.chain_connected() && s.certification().is_free() && s.betti() == rank)
            && maps[start..].iter().all(|m| m.isomorphism);
        if ok {
            Stabilization::Stable { rank }
        } else {
            Stabilization::NotStable
        }
    };
    Ok(ScaleTower { scales, maps, balls_connected, critical, stabilization, config: config.clone() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Universality {
    Certified,
    /// A loop of infinite or finite nontrivial order; `word` is over the raw
    /// generators of the presentation.
    Refuted {
        word: Word,
        witness: Chain,
    },
    Inconclusive,
}

/// Whether every loop at the scale is trivial.
pub fn universality_check(pres: &PresentationAtScale, pass_budget: usize) -> Universality {
    let s = pres.simplify(pass_budget);
    if s.certification == Certification::TrivialCertified {
        return Universality::Certified;
    }
    let coords = AbelianCoordinates::of(&s.group);
    let row: Option<Vec<BigInt>> =
        if coords.betti() > 0 { Some(coords.lift.row(0).to_vec()) } else { coords.torsion_lift.first().cloned() };
    let Some(mut row) = row else { return Universality::Inconclusive };
    if row.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        row.iter_mut().for_each(|x| *x = -x.clone());
    }
    let survivor_word = AbelianCoordinates::word_of_vector(&row);
    let word: Word =
        survivor_word.letters().iter().map(|l| Letter::new(s.survivors[l.generator()], l.is_inverse())).collect();
    let witness = pres.loop_of_word(&word);
    Universality::Refuted { word, witness }
}
