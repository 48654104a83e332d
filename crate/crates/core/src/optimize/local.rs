//! Similarity-constrained local search.
//!
//! A walk over parse sequences starting from the input molecule. Each step
//! mutates the current sequence; the walk moves only to molecules whose
//! Tanimoto similarity to the input is at least `tau`. The best such molecule
//! that differs from the input and beats its score is reported.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chem_io::write_smiles;
use crate::grammar::{ParseSequence, Sampler, SamplerConfig, MHG};
use crate::hypergraph::enc_h;
use crate::inference::encode;
use crate::molgraph::{isomorphic, MolecularGraph};

use super::fingerprint::{morgan_fingerprint, tanimoto, DEFAULT_BITS, DEFAULT_RADIUS};
use super::mutate::mutate_with;
use super::oracle::Oracle;
use super::{decode, OptimizeError};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalConfig {
    pub tau: f64,
    pub iterations: usize,
    pub radius: usize,
    pub bits: usize,
    pub sampler: SamplerConfig,
    pub seed: u64,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig {
            tau: 0.4,
            iterations: 250,
            radius: DEFAULT_RADIUS,
            bits: DEFAULT_BITS,
            sampler: SamplerConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LocalHit {
    pub graph: MolecularGraph,
    pub seq: ParseSequence,
    pub smiles: String,
    pub score: f64,
    pub similarity: f64,
    pub improvement: f64,
}

#[derive(Debug, Clone)]
pub struct LocalResult {
    pub start_score: f64,
    /// None when no feasible improving molecule was found.
    pub best: Option<LocalHit>,
}

impl LocalResult {
    pub fn success(&self) -> bool {
        self.best.is_some()
    }
}

pub fn local_optimize(g0: &MolecularGraph, mhg: &MHG, oracle: &dyn Oracle, cfg: &LocalConfig) -> Result<LocalResult, OptimizeError> {
    if !(0.0..=1.0).contains(&cfg.tau) {
        return Err(OptimizeError::InvalidConfig("tau must lie in [0, 1]"));
    }
    if cfg.bits == 0 {
        return Err(OptimizeError::InvalidConfig("fingerprint width must be positive"));
    }
    let seq0 = encode(mhg, &enc_h(g0)?)?;
    let fp0 = morgan_fingerprint(g0, cfg.radius, cfg.bits);
    let start_score = oracle.evaluate(g0)?;
    let sampler = Sampler::new(mhg, cfg.sampler);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut current = seq0;
    let mut best: Option<LocalHit> = None;
    for _ in 0..cfg.iterations {
        let cand = mutate_with(&sampler, mhg, &current, &mut rng)?;
        let g = decode(mhg, &cand)?;
        let similarity = tanimoto(&fp0, &morgan_fingerprint(&g, cfg.radius, cfg.bits))?;
        if similarity < cfg.tau {
            continue;
        }
        current = cand;
        if isomorphic(&g, g0) {
            continue;
        }
        let score = oracle.evaluate(&g)?;
        let bar = best.as_ref().map_or(start_score, |b| b.score);
        if score > bar {
            best = Some(LocalHit {
                smiles: write_smiles(&g).unwrap_or_default(),
                graph: g,
                seq: current.clone(),
                score,
                similarity,
                improvement: score - start_score,
            });
        }
    }
    Ok(LocalResult { start_score, best })
}
