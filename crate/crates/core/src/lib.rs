//! Belief-function fusion of uncertain, conflicting expert annotations and a
//! multilayer perceptron trained on belief-derived targets.
//!
//! The pipeline goes from expert annotations of image tiles to fused mass
//! functions ([`expert`], [`combination`], [`belief`]), from tile pixels to
//! co-occurrence texture features ([`texture`]), and trains and evaluates a
//! sigmoid network on both ([`mlp`], [`harness`]).

pub mod belief;
pub mod cli;
pub mod combination;
pub mod error;
pub mod expert;
pub mod harness;
pub mod mlp;
pub mod texture;

pub use belief::{decide, vacuous, validate_mass, Criterion, FocalSet, Frame, MassFunction};
pub use combination::{
    auto_conflict, conflict, conjunctive_combine, dubois_prade_combine, pcr_breakdown, pcr_combine,
    CombinationRule, PcrBreakdown,
};
pub use error::{BeliefError, CombinationError, FusionError, HarnessError, MlpError, TextureError};
