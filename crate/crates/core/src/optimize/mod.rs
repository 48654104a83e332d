//! Molecular search over the language of a grammar: fingerprints, scoring,
//! rule-histogram features, GP-based global optimization and
//! similarity-constrained local optimization.

pub mod fingerprint;
pub mod global;
pub mod gp;
pub mod local;
pub mod mutate;
pub mod oracle;
pub mod pca;
pub mod property;

use std::collections::HashMap;

use thiserror::Error;

use crate::grammar::{GrammarError, ParseSequence, RuleId, MHG};
use crate::hypergraph::{dec_h, HypergraphError};
use crate::inference::InferenceError;
use crate::molgraph::{invariant_hash, isomorphic, MolecularGraph};

pub use fingerprint::{morgan_fingerprint, tanimoto, Fingerprint};
pub use global::{global_optimize, random_baseline, Candidate, GlobalConfig, Labeled};
pub use gp::{expected_improvement, gp_fit, GpHyper, GpModel};
pub use local::{local_optimize, LocalConfig, LocalHit, LocalResult};
pub use mutate::{mutate, mutate_with};
pub use oracle::{CommandOracle, Oracle, PropertyOracle};
pub use pca::{pca_fit, pca_fit_reduced, PcaModel};
pub use property::{cycle_score, logp_proxy, penalized_logp, sa_proxy, PropertySpec, ScoreMode, Standardizer};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("rule id {0} is not in the grammar")]
    UnknownRule(RuleId),
    #[error("fingerprint widths differ ({0} vs {1})")]
    WidthMismatch(usize, usize),
    #[error("standardized score requested before fitting")]
    UnfittedStandardizer,
    #[error("PCA dimension {requested} exceeds numeric rank {rank}")]
    RankDeficient { requested: usize, rank: usize },
    #[error("kernel matrix not positive definite even with jitter")]
    NotPositiveDefinite,
    #[error("inputs and targets differ in length or are empty")]
    DimensionMismatch,
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error("oracle failed: {0}")]
    Oracle(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

/// Count of each rule id in `seq`, indexed by rule id.
pub fn rule_histogram(seq: &ParseSequence, mhg: &MHG) -> Result<Vec<f64>, OptimizeError> {
    let mut h = vec![0.0; mhg.len()];
    for &r in seq.iter() {
        *h.get_mut(r).ok_or(OptimizeError::UnknownRule(r))? += 1.0;
    }
    Ok(h)
}

/// Molecule of a parse sequence.
pub fn decode(mhg: &MHG, seq: &ParseSequence) -> Result<MolecularGraph, OptimizeError> {
    Ok(dec_h(mhg.derive(seq)?.as_hypergraph())?)
}

/// Set of molecules up to isomorphism.
#[derive(Debug, Clone, Default)]
pub struct MoleculeSet {
    buckets: HashMap<u64, Vec<MolecularGraph>>,
    len: usize,
}

impl MoleculeSet {
    pub fn new() -> MoleculeSet {
        MoleculeSet::default()
    }

    pub fn contains(&self, g: &MolecularGraph) -> bool {
        self.buckets.get(&invariant_hash(g)).is_some_and(|b| b.iter().any(|x| isomorphic(x, g)))
    }

    /// Adds `g`; false if an isomorphic molecule was already present.
    pub fn insert(&mut self, g: &MolecularGraph) -> bool {
        let bucket = self.buckets.entry(invariant_hash(g)).or_default();
        if bucket.iter().any(|x| isomorphic(x, g)) {
            return false;
        }
        bucket.push(g.clone());
        self.len += 1;
        true
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}
