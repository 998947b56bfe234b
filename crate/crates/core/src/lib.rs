//! Finite ultrametric spaces and the labeled star graphs that generate
//! them.
//!
//! All distances are exact [`Rational`]s. The main entry point is
//! [`diagnose`], which decides whether a finite ultrametric space is
//! generated by a labeled star graph and returns either the star or a
//! forbidden four-point subspace as a witness.

pub mod decision;
pub mod diametrical;
pub mod error;
pub mod generate;
pub mod io;
pub mod isometry;
pub mod lab;
pub mod models;
pub mod rational;
mod search;
pub mod space;
pub mod star;
pub mod weak;

pub use decision::{
    diagnose, dplus_space, embeds_in_dplus, find_center, forbidden_scan, forbidden_scan_parallel, shift, unshift,
    CenterWitness, DiagnosisReport, DplusEmbedding, ForbiddenWitness, Verdict,
};
pub use diametrical::{
    classify_four_point, diametrical_graph, multipartite_signature, FourPointClass, MultipartiteSignature, SimpleGraph,
};
pub use error::{Error, Result};
pub use generate::{enumerate_ultrametrics, sample_dendrogram, sample_dendrogram_at, GeneratorMode, GeneratorSpec};
pub use io::{parse_space_file, parse_space_str, SpaceFormat};
pub use isometry::{are_isometric, swap_isometry, Permutation, PointMap};
pub use lab::{
    check_agreement, check_equidistant, check_k112_conjecture, check_k13_conjecture, run_campaign, CampaignStatus,
    ConjectureId, ConjectureReport,
};
pub use models::ModelName;
pub use rational::Rational;
pub use space::{FiniteMetricSpace, Spectrum, UltraDiagnosis};
pub use star::{star_from_center, star_metric, LabeledStarGraph, LabeledTree};
pub use weak::{classify_forbidden, weakly_similar, ForbiddenClassification, ForbiddenMap, ForbiddenModel};
