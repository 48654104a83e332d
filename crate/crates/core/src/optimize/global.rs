//! Candidate-pool Bayesian optimization over the grammar's language.
//!
//! Every round projects the rule histograms of all evaluated molecules with
//! PCA, fits a GP to the standardized scores, builds a pool of grammar samples
//! and mutations of the current best molecules, and sends the pool members
//! with the highest expected improvement to the oracle.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chem_io::write_smiles;
use crate::grammar::{ParseSequence, Sampler, SamplerConfig, MHG};
use crate::molgraph::MolecularGraph;

use super::gp::{expected_improvement, gp_fit, GpHyper};
use super::mutate::mutate_with;
use super::oracle::Oracle;
use super::pca::{pca_fit_reduced, PcaModel};
use super::property::Standardizer;
use super::{decode, rule_histogram, MoleculeSet, OptimizeError};

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalConfig {
    /// Rounds (K).
    pub rounds: usize,
    /// Oracle calls per round (M).
    pub per_round: usize,
    pub pca_dim: usize,
    /// Fresh grammar samples per pool.
    pub pool_samples: usize,
    /// Best molecules mutated per round.
    pub top_for_mutation: usize,
    pub mutations_per_top: usize,
    pub hyper: GpHyper,
    pub sampler: SamplerConfig,
    pub seed: u64,
}

impl Default for GlobalConfig {
    fn default() -> Self {
        GlobalConfig {
            rounds: 5,
            per_round: 50,
            pca_dim: 40,
            pool_samples: 200,
            top_for_mutation: 10,
            mutations_per_top: 10,
            hyper: GpHyper::default(),
            sampler: SamplerConfig::default(),
            seed: 0,
        }
    }
}

/// A starting molecule with its parse sequence and known score.
#[derive(Debug, Clone)]
pub struct Labeled {
    pub graph: MolecularGraph,
    pub seq: ParseSequence,
    pub score: f64,
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub graph: MolecularGraph,
    pub seq: ParseSequence,
    pub smiles: String,
    pub score: f64,
    /// 1-based round in which the oracle evaluated it.
    pub round: usize,
    /// Not isomorphic to any starting molecule.
    pub novel: bool,
}

struct Point {
    features: Vec<f64>,
    seq: ParseSequence,
    score: f64,
}

/// PCA projection followed by per-coordinate standardization.
struct Embedding {
    pca: PcaModel,
    scalers: Vec<Standardizer>,
}

impl Embedding {
    fn fit(points: &[Point], dim: usize) -> Embedding {
        let p = points[0].features.len();
        let x = DMatrix::from_fn(points.len(), p, |i, j| points[i].features[j]);
        let pca = pca_fit_reduced(&x, dim.min(points.len()).min(p));
        let projected: Vec<DVector<f64>> = points.iter().map(|pt| pca.project(&DVector::from_column_slice(&pt.features))).collect();
        let scalers =
            (0..pca.dim()).map(|k| Standardizer::fit(&projected.iter().map(|z| z[k]).collect::<Vec<_>>())).collect();
        Embedding { pca, scalers }
    }

    fn embed(&self, features: &[f64]) -> DVector<f64> {
        let z = self.pca.project(&DVector::from_column_slice(features));
        DVector::from_iterator(z.len(), z.iter().zip(&self.scalers).map(|(v, s)| s.transform(*v)))
    }
}

fn validate(cfg: &GlobalConfig) -> Result<(), OptimizeError> {
    if cfg.pca_dim == 0 {
        return Err(OptimizeError::InvalidConfig("pca_dim must be positive"));
    }
    if cfg.sampler.max_expansions == 0 {
        return Err(OptimizeError::InvalidConfig("max_expansions must be positive"));
    }
    Ok(())
}

/// Runs `cfg.rounds` rounds of `cfg.per_round` oracle calls. Returns the
/// evaluated molecules, best score first.
pub fn global_optimize(
    mhg: &MHG,
    corpus: &[Labeled],
    oracle: &dyn Oracle,
    cfg: &GlobalConfig,
) -> Result<Vec<Candidate>, OptimizeError> {
    validate(cfg)?;
    if cfg.rounds == 0 || cfg.per_round == 0 {
        return Ok(Vec::new());
    }
    if corpus.is_empty() {
        return Err(OptimizeError::InvalidConfig("global optimization needs a labeled corpus"));
    }
    let sampler = Sampler::new(mhg, cfg.sampler);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut known = MoleculeSet::new();
    let mut points = Vec::with_capacity(corpus.len() + cfg.rounds * cfg.per_round);
    for l in corpus {
        known.insert(&l.graph);
        points.push(Point { features: rule_histogram(&l.seq, mhg)?, seq: l.seq.clone(), score: l.score });
    }
    let starting = known.clone();
    let mut out = Vec::new();

    for round in 1..=cfg.rounds {
        let embedding = Embedding::fit(&points, cfg.pca_dim);
        let ys = Standardizer::fit(&points.iter().map(|p| p.score).collect::<Vec<_>>());
        let xs: Vec<DVector<f64>> = points.iter().map(|p| embedding.embed(&p.features)).collect();
        let y: Vec<f64> = points.iter().map(|p| ys.transform(p.score)).collect();
        let gp = gp_fit(&xs, &y, cfg.hyper)?;
        let best = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        // pool: fresh samples, then mutations of the best points so far
        let mut seqs = Vec::with_capacity(cfg.pool_samples + cfg.top_for_mutation * cfg.mutations_per_top);
        for _ in 0..cfg.pool_samples {
            seqs.push(sampler.sample(&mut rng)?);
        }
        let mut ranked: Vec<usize> = (0..points.len()).collect();
        ranked.sort_by(|&a, &b| points[b].score.total_cmp(&points[a].score).then(a.cmp(&b)));
        for &i in ranked.iter().take(cfg.top_for_mutation) {
            for _ in 0..cfg.mutations_per_top {
                seqs.push(mutate_with(&sampler, mhg, &points[i].seq, &mut rng)?);
            }
        }
        let mut pool_set = MoleculeSet::new();
        let mut pool = Vec::new();
        for seq in seqs {
            let g = decode(mhg, &seq)?;
            if known.contains(&g) || !pool_set.insert(&g) {
                continue;
            }
            let features = rule_histogram(&seq, mhg)?;
            let (mean, var) = gp.predict(&embedding.embed(&features));
            pool.push((expected_improvement(mean, var, best), g, seq, features));
        }
        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.sort_by(|&a, &b| pool[b].0.total_cmp(&pool[a].0).then(a.cmp(&b)));
        let picked: Vec<usize> = order.into_iter().take(cfg.per_round).collect();
        let mut pool: Vec<_> = pool.into_iter().map(Some).collect();
        for i in picked {
            let (_, g, seq, features) = pool[i].take().expect("picked once");
            let score = oracle.evaluate(&g)?;
            known.insert(&g);
            out.push(Candidate {
                smiles: write_smiles(&g).unwrap_or_default(),
                novel: !starting.contains(&g),
                graph: g,
                seq: seq.clone(),
                score,
                round,
            });
            points.push(Point { features, seq, score });
        }
        log::info!("round {round}: {} evaluated, best {:.4}", out.len(), out.iter().map(|c| c.score).fold(f64::NEG_INFINITY, f64::max));
    }
    out.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(out)
}

/// Evaluates `budget` distinct grammar samples not isomorphic to `exclude`.
pub fn random_baseline(
    mhg: &MHG,
    exclude: &[MolecularGraph],
    oracle: &dyn Oracle,
    budget: usize,
    sampler: SamplerConfig,
    seed: u64,
) -> Result<Vec<Candidate>, OptimizeError> {
    let s = Sampler::new(mhg, sampler);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut known = MoleculeSet::new();
    for g in exclude {
        known.insert(g);
    }
    let mut out = Vec::with_capacity(budget);
    let mut attempts = 0;
    while out.len() < budget && attempts < budget.saturating_mul(50) {
        attempts += 1;
        let seq = s.sample(&mut rng)?;
        let g = decode(mhg, &seq)?;
        if !known.insert(&g) {
            continue;
        }
        let score = oracle.evaluate(&g)?;
        out.push(Candidate { smiles: write_smiles(&g).unwrap_or_default(), graph: g, seq, score, round: 1, novel: true });
    }
    out.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem_io::parse_smiles;
    use crate::hypergraph::enc_h;
    use crate::inference::infer;
    use crate::molgraph::check_molecular_graph;

    fn setup() -> (MHG, Vec<Labeled>) {
        let gs: Vec<_> = ["CCO", "CC(C)O", "CCCN", "OC1=CC=CC=C1", "CC1=CC=CC=C1", "CCCl", "ClC1=CC=CC=C1"]
            .iter()
            .map(|s| parse_smiles(s).unwrap())
            .collect();
        let hs: Vec<_> = gs.iter().map(|g| enc_h(g).unwrap()).collect();
        let (mhg, seqs) = infer(&hs);
        let corpus = gs
            .into_iter()
            .zip(seqs)
            .map(|(graph, seq)| Labeled { score: graph.atom_count() as f64, graph, seq })
            .collect();
        (mhg, corpus)
    }

    #[test]
    fn zero_rounds_is_empty() {
        let (mhg, corpus) = setup();
        let cfg = GlobalConfig { rounds: 0, ..GlobalConfig::default() };
        let size = |g: &MolecularGraph| g.atom_count() as f64;
        assert!(global_optimize(&mhg, &corpus, &size, &cfg).unwrap().is_empty());
    }

    #[test]
    fn outputs_are_valid_and_novel() {
        let (mhg, corpus) = setup();
        let cfg = GlobalConfig { rounds: 2, per_round: 3, pool_samples: 30, pca_dim: 4, seed: 5, ..GlobalConfig::default() };
        let size = |g: &MolecularGraph| g.atom_count() as f64;
        let out = global_optimize(&mhg, &corpus, &size, &cfg).unwrap();
        assert_eq!(out.len(), 6);
        assert!(out.iter().all(|c| c.novel && check_molecular_graph(&c.graph).is_empty()));
        assert!(out.windows(2).all(|w| w[0].score >= w[1].score));
        let again = global_optimize(&mhg, &corpus, &size, &cfg).unwrap();
        assert_eq!(out.iter().map(|c| &c.smiles).collect::<Vec<_>>(), again.iter().map(|c| &c.smiles).collect::<Vec<_>>());
    }

    #[test]
    fn baseline_respects_budget() {
        let (mhg, corpus) = setup();
        let size = |g: &MolecularGraph| g.atom_count() as f64;
        let exclude: Vec<_> = corpus.iter().map(|l| l.graph.clone()).collect();
        let out = random_baseline(&mhg, &exclude, &size, 5, SamplerConfig::default(), 1).unwrap();
        assert_eq!(out.len(), 5);
    }
}
