//! Scale-dependent deck groups of finite metric samples.
//!
//! At a scale `ε`, chains are point sequences with consecutive points closer
//! than `ε`, and two chains are equivalent when one can be turned into the
//! other by adding or removing single points. The classes of loops at the
//! basepoint form the deck group at that scale; this crate presents it from
//! the scale graph, simplifies it, builds truncated covers with the deck
//! action, and follows the groups across a decreasing schedule of scales.

pub mod chain;
pub mod cover;
pub mod folding;
pub mod group;
pub mod metric;
pub mod presentation;
pub mod snf;
pub mod spaces;
pub mod tower;
pub mod word;

pub use chain::{
    apply_move, normalize, oracle_classes, search_homotopy, verify_certificate, Chain, HomotopyCertificate,
    HomotopyMove, OracleClasses, SearchOutcome,
};
pub use cover::{build_abelianized_cover, build_cover, check_discreteness, check_fibers, DeckImage, TruncatedCover};
pub use folding::{fold, member, probe_injectivity, surjective, FoldedSubgroupGraph, InjectivityProbe};
pub use group::{
    abelianize, tietze_simplify, word_equal_free, AbelianCoordinates, AbelianInvariants, Certification, FPGroup,
    Simplification,
};
pub use metric::{
    balls_chain_connected, chain_connected, dense_net, power_reach, Components, FiniteMetricSpace, MetricKind,
    ScaleGraph,
};
pub use presentation::{compare_with_oracle, minimal_generators, ChainClass, OracleComparison, PresentationAtScale};
pub use snf::{smith_normal_form, IntMatrix};
pub use spaces::{sample, Family, SamplerSpec};
pub use tower::{run_tower, theta, universality_check, ScaleAnalysis, ScaleTower, Theta, TowerConfig, Universality};
pub use word::{free_reduce, Letter, Word};
