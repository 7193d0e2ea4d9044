//! JSON reports written by the subcommands.

use ec_core::folding::ProbeReport;
use ec_core::group::AbelianInvariants;
use ec_core::tower::{CriticalInterval, FoldingCheck, Stabilization, Theta};
use ec_core::{
    Certification, FiniteMetricSpace, IntMatrix, MetricKind, ScaleAnalysis, ScaleTower, TowerConfig, Universality,
};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::Value;

pub const TOWER_SCHEMA: &str = "ec-tower/1";
pub const ANALYSIS_SCHEMA: &str = "ec-analysis/1";
pub const PRESENTATION_SCHEMA: &str = "ec-presentation/1";
pub const THETA_SCHEMA: &str = "ec-theta/1";
pub const COVER_SCHEMA: &str = "ec-cover/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct SpaceDigest {
    pub points: usize,
    pub basepoint: usize,
    pub kind: MetricKind,
    pub diameter: f64,
    pub min_spacing: Option<f64>,
}

impl SpaceDigest {
    pub fn of(space: &FiniteMetricSpace) -> Self {
        SpaceDigest {
            points: space.len(),
            basepoint: space.basepoint(),
            kind: space.kind(),
            diameter: space.diameter(),
            min_spacing: space.min_spacing(),
        }
    }
}

#[derive(Serialize)]
pub struct ScaleReport {
    pub scale: f64,
    pub edges: usize,
    pub generators: usize,
    pub survivors: usize,
    pub relators: usize,
    #[serde(flatten)]
    pub invariants: AbelianInvariants,
    pub certification: Certification,
    pub certified: bool,
    pub components: usize,
    pub chain_connected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covering_like: Option<Option<bool>>,
}

impl ScaleReport {
    pub fn of(a: &ScaleAnalysis) -> Self {
        ScaleReport {
            scale: a.scale(),
            edges: a.presentation.graph().edge_count(),
            generators: a.presentation.generator_count(),
            survivors: a.simplification.rank(),
            relators: a.simplification.group.relators().len(),
            invariants: a.invariants().clone(),
            certification: a.certification(),
            certified: a.certification().is_free(),
            components: a.components,
            chain_connected: a.chain_connected(),
            covering_like: None,
        }
    }
}

/// Integer matrix entries as JSON numbers, or strings when too large.
pub fn matrix_json(m: &IntMatrix) -> Vec<Vec<Value>> {
    (0..m.rows())
        .map(|i| {
            m.row(i).iter().map(|x| x.to_i64().map_or_else(|| Value::String(x.to_string()), Value::from)).collect()
        })
        .collect()
}

#[derive(Serialize)]
pub struct MapReport {
    pub coarse_scale: f64,
    pub fine_scale: f64,
    /// Coarse betti rows by fine betti columns.
    pub matrix: Vec<Vec<Value>>,
    pub surjective: bool,
    pub kernel_rank: usize,
    pub isomorphism: bool,
    pub folding: Option<FoldingCheck>,
    pub probe: Option<ProbeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub balls_connected: Option<bool>,
    /// Images of the fine survivors as words over the coarse survivors.
    pub images: Vec<String>,
}

impl MapReport {
    pub fn of(t: &Theta, balls_connected: Option<bool>) -> Self {
        MapReport {
            coarse_scale: t.coarse_scale,
            fine_scale: t.fine_scale,
            matrix: matrix_json(&t.matrix),
            surjective: t.surjective,
            kernel_rank: t.kernel_rank,
            isomorphism: t.isomorphism,
            folding: t.folding.clone(),
            probe: t.probe.clone(),
            balls_connected,
            images: t.images.iter().map(|w| w.to_string()).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct ConfigReport {
    pub pass_budget: usize,
    pub stabilization_window: usize,
    pub probe_length: usize,
    pub probe_budget: u128,
}

impl From<&TowerConfig> for ConfigReport {
    fn from(c: &TowerConfig) -> Self {
        ConfigReport {
            pass_budget: c.pass_budget,
            stabilization_window: c.stabilization_window,
            probe_length: c.probe_length,
            probe_budget: c.probe_budget,
        }
    }
}

#[derive(Serialize)]
pub struct TowerReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub space: SpaceDigest,
    pub config: ConfigReport,
    pub scales: Vec<ScaleReport>,
    pub maps: Vec<MapReport>,
    pub critical: Vec<CriticalInterval>,
    pub stabilization: Stabilization,
}

impl TowerReport {
    pub fn of(space: &FiniteMetricSpace, t: &ScaleTower) -> Self {
        let scales = t
            .scales
            .iter()
            .enumerate()
            .map(|(i, a)| ScaleReport { covering_like: Some(t.covering_like(i)), ..ScaleReport::of(a) })
            .collect();
        let maps = t.maps.iter().zip(&t.balls_connected).map(|(m, &b)| MapReport::of(m, Some(b))).collect();
        TowerReport {
            schema: TOWER_SCHEMA,
            tool_version: TOOL_VERSION,
            space: SpaceDigest::of(space),
            config: (&t.config).into(),
            scales,
            maps,
            critical: t.critical.clone(),
            stabilization: t.stabilization.clone(),
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum UniversalityReport {
    Certified,
    Refuted { word: Vec<i32>, witness: Vec<usize> },
    Inconclusive,
}

impl From<&Universality> for UniversalityReport {
    fn from(u: &Universality) -> Self {
        match u {
            Universality::Certified => UniversalityReport::Certified,
            Universality::Refuted { word, witness } => {
                UniversalityReport::Refuted { word: word.to_signed(), witness: witness.vertices().to_vec() }
            }
            Universality::Inconclusive => UniversalityReport::Inconclusive,
        }
    }
}

#[derive(Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub space: SpaceDigest,
    pub result: ScaleReport,
    pub universality: UniversalityReport,
}

#[derive(Serialize)]
pub struct PresentationReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub scale: f64,
    pub basepoint: usize,
    /// Endpoints of the non-tree edge behind each generator.
    pub generators: Vec<(usize, usize)>,
    /// One relator per triangle, as signed 1-based generator indices.
    pub relators: Vec<Vec<i32>>,
    /// Generators minus the rank of the relator matrix.
    pub rank_upper: usize,
    pub simplified: SimplifiedReport,
}

#[derive(Serialize)]
pub struct SimplifiedReport {
    pub survivors: Vec<usize>,
    pub relators: Vec<Vec<i32>>,
    pub certification: Certification,
    pub passes: usize,
}

#[derive(Serialize)]
pub struct ThetaReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub coarse: ScaleReport,
    pub fine: ScaleReport,
    pub map: MapReport,
}

#[derive(Serialize)]
pub struct CoverReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub scale: f64,
    pub radius: usize,
    pub mode: &'static str,
    pub rank: usize,
    pub vertices: usize,
    pub edges: usize,
    pub max_word_length: usize,
    pub words_checked: usize,
    pub pairs_checked: usize,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fiber_failures: Option<usize>,
}
