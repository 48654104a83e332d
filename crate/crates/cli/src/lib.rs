//! `mhg` command-line tool: grammar inference, encoding, sampling and
//! molecular optimization over SMILES files.
//!
//! Exit codes: 0 success, 1 partial (some molecules failed, report still
//! written), 2 usage, configuration or I/O error.

pub mod files;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mhg_core::chem_io::{parse_corpus, CorpusEntry};
use mhg_core::grammar::{sample_derivation, SamplerConfig};
use mhg_core::inference::grammar_stats;
use mhg_core::molgraph::{check_molecular_graph, isomorphic};
use mhg_core::optimize::{
    decode, global_optimize, local_optimize, CommandOracle, GlobalConfig, GpHyper, Labeled, LocalConfig, Oracle,
    PropertyOracle, PropertySpec,
};
use mhg_core::{dec_h, enc_h, encode, infer, write_smiles, MolecularGraph, MolecularHypergraph, MHG};

use files::{emit, fmt_f64, load_grammar, load_sequences, save_grammar, save_sequences, SequenceEntry, Tsv};

#[derive(Debug, Parser)]
#[command(name = "mhg", version, about = "Molecular hypergraph grammar toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infer a grammar from a SMILES file.
    Infer(InferArgs),
    /// Encode molecules as parse sequences of an existing grammar.
    Encode(EncodeArgs),
    /// Decode parse sequences to SMILES.
    Decode(DecodeArgs),
    /// Sample random molecules from a grammar.
    Sample(SampleArgs),
    /// Check encode/derive/decode reconstruction on a SMILES file.
    Roundtrip(RoundtripArgs),
    /// Grammar statistics, optionally with held-out coverage.
    Stats(StatsArgs),
    /// Bayesian optimization over the grammar's language.
    OptimizeGlobal(GlobalArgs),
    /// Similarity-constrained improvement of each input molecule.
    OptimizeLocal(LocalArgs),
}

#[derive(Debug, Args)]
pub struct InferArgs {
    /// One SMILES per line.
    pub corpus: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Parse sequence of every accepted molecule.
    #[arg(long)]
    pub sequences: Option<PathBuf>,
    /// Stats report; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(short, long)]
    pub grammar: PathBuf,
    pub smiles: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(short, long)]
    pub grammar: PathBuf,
    pub sequences: PathBuf,
    /// SMILES lines; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(short, long)]
    pub grammar: PathBuf,
    #[arg(short = 'n', long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, env = "MHG_SEED")]
    pub seed: u64,
    #[arg(long, default_value_t = SamplerConfig::default().max_expansions)]
    pub max_expansions: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Validity report; stderr when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(short, long)]
    pub grammar: PathBuf,
    pub smiles: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(short, long)]
    pub grammar: PathBuf,
    /// Training molecules, for rule frequencies and sequence lengths.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Held-out molecules, for coverage.
    #[arg(long)]
    pub heldout: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Property {
    /// logP − SA − cycle, each standardized on the fit set.
    PenalizedLogpStd,
    /// logP − SA without standardization.
    PenalizedLogpRaw,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value_t = Property::PenalizedLogpStd)]
    pub property: Property,
    /// External command reading SMILES on stdin and printing a score;
    /// overrides --property.
    #[arg(long)]
    pub oracle_cmd: Option<String>,
    /// Molecules used to fit the standardizers; defaults to the input file.
    #[arg(long)]
    pub fit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    #[arg(short, long)]
    pub grammar: PathBuf,
    /// Starting molecules; those outside the grammar's language are skipped.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, env = "MHG_SEED")]
    pub seed: u64,
    /// Rounds (K).
    #[arg(short = 'k', long, default_value_t = 5)]
    pub rounds: usize,
    /// Oracle calls per round (M).
    #[arg(short = 'm', long, default_value_t = 50)]
    pub per_round: usize,
    #[arg(long, default_value_t = 40)]
    pub pca_dim: usize,
    #[arg(long, default_value_t = 200)]
    pub pool_samples: usize,
    #[arg(long, default_value_t = GpHyper::default().length_scale)]
    pub length_scale: f64,
    #[arg(long, default_value_t = GpHyper::default().noise_variance)]
    pub noise: f64,
    #[arg(long, default_value_t = SamplerConfig::default().max_expansions)]
    pub max_expansions: usize,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LocalArgs {
    #[arg(short, long)]
    pub grammar: PathBuf,
    /// Molecules to improve.
    pub inputs: PathBuf,
    #[arg(long, env = "MHG_SEED")]
    pub seed: u64,
    /// Similarity threshold in [0, 1].
    #[arg(long, default_value_t = 0.4)]
    pub tau: f64,
    /// Mutation steps per molecule (K).
    #[arg(short = 'k', long, default_value_t = 250)]
    pub iterations: usize,
    #[arg(long, default_value_t = mhg_core::optimize::fingerprint::DEFAULT_RADIUS)]
    pub radius: usize,
    #[arg(long, default_value_t = mhg_core::optimize::fingerprint::DEFAULT_BITS)]
    pub bits: usize,
    #[arg(long, default_value_t = SamplerConfig::default().max_expansions)]
    pub max_expansions: usize,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    Partial,
}

impl Status {
    fn from_failures(n: usize) -> Status {
        if n == 0 {
            Status::Success
        } else {
            Status::Partial
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Partial => 1,
        }
    }
}

pub fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Infer(a) => cmd_infer(&a),
        Command::Encode(a) => cmd_encode(&a),
        Command::Decode(a) => cmd_decode(&a),
        Command::Sample(a) => cmd_sample(&a),
        Command::Roundtrip(a) => cmd_roundtrip(&a),
        Command::Stats(a) => cmd_stats(&a),
        Command::OptimizeGlobal(a) => cmd_optimize_global(&a),
        Command::OptimizeLocal(a) => cmd_optimize_local(&a),
    }
}

fn read_corpus(path: &Path) -> Result<(Vec<CorpusEntry>, mhg_core::chem_io::CorpusReport)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_corpus(&text))
}

fn rejection_rows(t: &mut Tsv, report: &mhg_core::chem_io::CorpusReport) {
    for r in &report.rejected {
        t.row(["rejected".to_string(), r.line.to_string(), r.smiles.clone(), r.reason.to_string()]);
    }
}

fn hypergraphs(entries: &[CorpusEntry]) -> Result<Vec<MolecularHypergraph>> {
    entries
        .iter()
        .map(|e| enc_h(&e.graph).with_context(|| format!("line {}: {}", e.line, e.smiles)))
        .collect()
}

fn smiles_of(g: &MolecularGraph) -> Result<String> {
    Ok(write_smiles(g)?)
}

pub fn cmd_infer(a: &InferArgs) -> Result<Status> {
    let (entries, report) = read_corpus(&a.corpus)?;
    if entries.is_empty() {
        bail!("{}: no usable molecules ({} rejected)", a.corpus.display(), report.rejected.len());
    }
    let hs = hypergraphs(&entries)?;
    let (mhg, seqs) = infer(&hs);
    let stats = grammar_stats(&mhg, &hs, &[]);
    save_grammar(&a.output, &mhg)?;
    if let Some(p) = &a.sequences {
        let rows = entries
            .iter()
            .zip(seqs)
            .map(|(e, rules)| SequenceEntry { line: e.line, smiles: e.smiles.clone(), rules })
            .collect();
        save_sequences(p, rows)?;
    }
    let mut t = Tsv::new();
    t.row(["accepted", &report.accepted.to_string()]);
    t.row(["rejected", &report.rejected.len().to_string()]);
    stats_rows(&mut t, &stats, false);
    rejection_rows(&mut t, &report);
    emit(a.report.as_deref(), t.as_str())?;
    // rejected lines are filtered input, not failed molecules
    Ok(Status::Success)
}

fn stats_rows(t: &mut Tsv, s: &mhg_core::GrammarStats, with_coverage: bool) {
    t.row(["total_rules", &s.total_rules.to_string()]);
    t.row(["start_rules", &s.start_rules.to_string()]);
    t.row(["train_molecules", &s.train_molecules.to_string()]);
    t.row(["mean_rules_per_molecule", &fmt_f64(s.mean_rules_per_molecule)]);
    if with_coverage {
        t.row(["heldout_total", &s.heldout_total.to_string()]);
        t.row(["heldout_parsed", &s.heldout_parsed.to_string()]);
        let cov = if s.coverage_vacuous { "NA".to_string() } else { fmt_f64(s.coverage) };
        t.row(["coverage", &cov]);
    }
}

pub fn cmd_encode(a: &EncodeArgs) -> Result<Status> {
    let mhg = load_grammar(&a.grammar)?;
    let (entries, report) = read_corpus(&a.smiles)?;
    let mut t = Tsv::new();
    let mut rows = Vec::new();
    for e in &entries {
        let h = enc_h(&e.graph).with_context(|| format!("line {}", e.line))?;
        match encode(&mhg, &h) {
            Ok(rules) => rows.push(SequenceEntry { line: e.line, smiles: e.smiles.clone(), rules }),
            Err(err) => t.row(["not_in_language".to_string(), e.line.to_string(), e.smiles.clone(), err.to_string()]),
        }
    }
    let failures = entries.len() - rows.len() + report.rejected.len();
    rejection_rows(&mut t, &report);
    let mut head = Tsv::new();
    head.row(["encoded", &rows.len().to_string()]);
    head.row(["failed", &failures.to_string()]);
    save_sequences(&a.output, rows)?;
    report_to(a.report.as_deref(), &(head.as_str().to_owned() + t.as_str()))?;
    Ok(Status::from_failures(failures))
}

/// Writes `text` to `path`, or to stderr when `path` is None.
fn report_to(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_decode(a: &DecodeArgs) -> Result<Status> {
    let mhg = load_grammar(&a.grammar)?;
    let entries = load_sequences(&a.sequences)?;
    let mut out = String::new();
    let mut failures = 0;
    for e in &entries {
        match decode(&mhg, &e.rules).map_err(anyhow::Error::from).and_then(|g| smiles_of(&g)) {
            Ok(s) => {
                out.push_str(&s);
                out.push('\n');
            }
            Err(err) => {
                failures += 1;
                log::warn!("line {}: {err}", e.line);
            }
        }
    }
    emit(a.output.as_deref(), &out)?;
    Ok(Status::from_failures(failures))
}

pub fn cmd_sample(a: &SampleArgs) -> Result<Status> {
    if a.max_expansions == 0 {
        bail!("--max-expansions must be positive");
    }
    let mhg = load_grammar(&a.grammar)?;
    let mut out = String::new();
    let mut invalid = 0;
    for i in 0..a.count {
        // one seed per sample, so sample i does not depend on --count
        let seq = sample_derivation(&mhg, a.seed.wrapping_add(i as u64), a.max_expansions)?;
        let g = decode(&mhg, &seq)?;
        if !check_molecular_graph(&g).is_empty() {
            invalid += 1;
            continue;
        }
        out.push_str(&smiles_of(&g)?);
        out.push('\n');
    }
    emit(a.output.as_deref(), &out)?;
    let mut t = Tsv::new();
    t.row(["samples", &a.count.to_string()]);
    t.row(["valid", &(a.count - invalid).to_string()]);
    let rate = if a.count == 0 { "NA".to_string() } else { fmt_f64((a.count - invalid) as f64 / a.count as f64) };
    t.row(["validity", &rate]);
    report_to(a.report.as_deref(), t.as_str())?;
    Ok(Status::from_failures(invalid))
}

pub fn cmd_roundtrip(a: &RoundtripArgs) -> Result<Status> {
    let mhg = load_grammar(&a.grammar)?;
    let (entries, report) = read_corpus(&a.smiles)?;
    let (mut ok, mut not_in_language, mut mismatch) = (0usize, 0usize, 0usize);
    let mut rows = Tsv::new();
    for e in &entries {
        let status = roundtrip_one(&mhg, &e.graph).with_context(|| format!("line {}", e.line))?;
        match status {
            "ok" => ok += 1,
            "not_in_language" => not_in_language += 1,
            _ => mismatch += 1,
        }
        rows.row([e.line.to_string(), e.smiles.clone(), status.to_string()]);
    }
    let mut t = Tsv::new();
    t.row(["molecules", &entries.len().to_string()]);
    t.row(["reconstructed", &ok.to_string()]);
    t.row(["not_in_language", &not_in_language.to_string()]);
    t.row(["mismatch", &mismatch.to_string()]);
    t.row(["rejected", &report.rejected.len().to_string()]);
    let rate = if entries.is_empty() { "NA".to_string() } else { fmt_f64(ok as f64 / entries.len() as f64) };
    t.row(["reconstruction_rate", &rate]);
    t.row(["line", "smiles", "status"]);
    emit(a.output.as_deref(), &(t.as_str().to_owned() + rows.as_str()))?;
    Ok(Status::from_failures(not_in_language + mismatch + report.rejected.len()))
}

fn roundtrip_one(mhg: &MHG, g: &MolecularGraph) -> Result<&'static str> {
    let h = enc_h(g)?;
    let Ok(seq) = encode(mhg, &h) else {
        return Ok("not_in_language");
    };
    let back = dec_h(mhg.derive(&seq)?.as_hypergraph())?;
    Ok(if isomorphic(&back, g) { "ok" } else { "mismatch" })
}

pub fn cmd_stats(a: &StatsArgs) -> Result<Status> {
    let mhg = load_grammar(&a.grammar)?;
    let load = |p: &Option<PathBuf>| -> Result<Vec<MolecularHypergraph>> {
        match p {
            Some(p) => hypergraphs(&read_corpus(p)?.0),
            None => Ok(Vec::new()),
        }
    };
    let train = load(&a.train)?;
    let heldout = load(&a.heldout)?;
    let stats = grammar_stats(&mhg, &train, &heldout);
    let mut t = Tsv::new();
    stats_rows(&mut t, &stats, true);
    t.row(["rule", "lhs_rank", "terminals", "nonterminals", "frequency"]);
    for (id, rule) in mhg.rules().iter().enumerate() {
        let nts = rule.nonterminal_count();
        t.row([
            id.to_string(),
            if rule.is_start() { "start".to_string() } else { rule.external_nodes().len().to_string() },
            (rule.rhs().edge_count() - nts).to_string(),
            nts.to_string(),
            stats.rule_frequency[id].to_string(),
        ]);
    }
    emit(a.output.as_deref(), t.as_str())?;
    Ok(Status::Success)
}

fn build_oracle(o: &OracleArgs, default_fit: &[MolecularGraph]) -> Result<Box<dyn Oracle>> {
    if let Some(cmd) = &o.oracle_cmd {
        let oracle = CommandOracle::parse(cmd).context("--oracle-cmd is empty")?;
        return Ok(Box::new(oracle));
    }
    let spec = match o.property {
        Property::PenalizedLogpRaw => PropertySpec::raw(),
        Property::PenalizedLogpStd => match &o.fit {
            Some(p) => {
                let fit: Vec<_> = read_corpus(p)?.0.into_iter().map(|e| e.graph).collect();
                if fit.is_empty() {
                    bail!("{}: no usable molecules to fit the standardizers", p.display());
                }
                PropertySpec::fit(&fit)
            }
            None => PropertySpec::fit(default_fit),
        },
    };
    Ok(Box::new(PropertyOracle(spec)))
}

fn sampler_config(max_expansions: usize) -> Result<SamplerConfig> {
    if max_expansions == 0 {
        bail!("--max-expansions must be positive");
    }
    Ok(SamplerConfig { max_expansions, ..SamplerConfig::default() })
}

pub fn cmd_optimize_global(a: &GlobalArgs) -> Result<Status> {
    if a.pca_dim == 0 {
        bail!("--pca-dim must be positive");
    }
    if !(a.length_scale > 0.0) || !(a.noise >= 0.0) {
        bail!("--length-scale must be positive and --noise non-negative");
    }
    let sampler = sampler_config(a.max_expansions)?;
    let mhg = load_grammar(&a.grammar)?;
    let (entries, _) = read_corpus(&a.corpus)?;
    let graphs: Vec<MolecularGraph> = entries.iter().map(|e| e.graph.clone()).collect();
    let oracle = build_oracle(&a.oracle, &graphs)?;
    let mut corpus = Vec::new();
    for e in &entries {
        match encode(&mhg, &enc_h(&e.graph)?) {
            Ok(seq) => corpus.push(Labeled { score: oracle.evaluate(&e.graph)?, graph: e.graph.clone(), seq }),
            Err(err) => log::warn!("line {}: skipped, {err}", e.line),
        }
    }
    if corpus.is_empty() {
        bail!("{}: no starting molecule is in the grammar's language", a.corpus.display());
    }
    let cfg = GlobalConfig {
        rounds: a.rounds,
        per_round: a.per_round,
        pca_dim: a.pca_dim,
        pool_samples: a.pool_samples,
        hyper: GpHyper { length_scale: a.length_scale, noise_variance: a.noise, ..GpHyper::default() },
        sampler,
        seed: a.seed,
        ..GlobalConfig::default()
    };
    let out = global_optimize(&mhg, &corpus, oracle.as_ref(), &cfg)?;
    let mut t = Tsv::new();
    t.row(["smiles", "score", "round", "novel"]);
    for c in &out {
        t.row([c.smiles.clone(), fmt_f64(c.score), c.round.to_string(), c.novel.to_string()]);
    }
    emit(a.output.as_deref(), t.as_str())?;
    let expected = a.rounds * a.per_round;
    if out.len() < expected {
        log::warn!("pool exhausted: {} of {expected} evaluations", out.len());
    }
    Ok(Status::from_failures(expected - out.len()))
}

pub fn cmd_optimize_local(a: &LocalArgs) -> Result<Status> {
    if !(0.0..=1.0).contains(&a.tau) {
        bail!("--tau must lie in [0, 1], got {}", a.tau);
    }
    if a.bits == 0 {
        bail!("--bits must be positive");
    }
    let sampler = sampler_config(a.max_expansions)?;
    let mhg = load_grammar(&a.grammar)?;
    let (entries, _) = read_corpus(&a.inputs)?;
    let graphs: Vec<MolecularGraph> = entries.iter().map(|e| e.graph.clone()).collect();
    let oracle = build_oracle(&a.oracle, &graphs)?;
    let mut t = Tsv::new();
    t.row(["smiles", "start_score", "best_smiles", "best_score", "improvement", "similarity", "success"]);
    let (mut failures, mut successes, mut total_improvement) = (0usize, 0usize, 0.0);
    for (i, e) in entries.iter().enumerate() {
        let cfg = LocalConfig {
            tau: a.tau,
            iterations: a.iterations,
            radius: a.radius,
            bits: a.bits,
            sampler,
            seed: a.seed.wrapping_add(i as u64),
        };
        match local_optimize(&e.graph, &mhg, oracle.as_ref(), &cfg) {
            Ok(r) => match r.best {
                Some(hit) => {
                    successes += 1;
                    total_improvement += hit.improvement;
                    t.row([
                        e.smiles.clone(),
                        fmt_f64(r.start_score),
                        hit.smiles,
                        fmt_f64(hit.score),
                        fmt_f64(hit.improvement),
                        fmt_f64(hit.similarity),
                        "true".to_string(),
                    ]);
                }
                None => t.row([&e.smiles, &fmt_f64(r.start_score), "", "", "0.000000", "", "false"]),
            },
            Err(mhg_core::optimize::OptimizeError::Inference(err)) => {
                failures += 1;
                log::warn!("line {}: {err}", e.line);
                t.row([e.smiles.as_str(), "", "", "", "", "", "false"]);
            }
            Err(err) => return Err(err.into()),
        }
    }
    emit(a.output.as_deref(), t.as_str())?;
    let mean = if successes == 0 { 0.0 } else { total_improvement / successes as f64 };
    log::info!("{successes}/{} improved, mean improvement {mean:.4}", entries.len());
    Ok(Status::from_failures(failures))
}
