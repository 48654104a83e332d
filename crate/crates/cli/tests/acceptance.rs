//! End-to-end acceptance checks on the bundled desk corpus. Prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mhg_core::grammar::{sample_derivation, SamplerConfig};
use mhg_core::hypergraph::Hypergraph;
use mhg_core::inference::check_condition1;
use mhg_core::molgraph::{check_molecular_graph, isomorphic};
use mhg_core::optimize::{
    expected_improvement, global_optimize, gp_fit, local_optimize, pca_fit, penalized_logp, random_baseline,
    GlobalConfig, GpHyper, Labeled, LocalConfig, PropertyOracle, PropertySpec, Standardizer,
};
use mhg_core::treedecomp::{decompose, verify_decomposition, verify_irredundant};
use mhg_core::{dec_h, enc_h, encode, infer, load_dataset, HyperedgeLabel, MolecularGraph, MolecularHypergraph, MHG};
use nalgebra::{DMatrix, DVector};

type Outcome = Result<String, String>;

struct Ctx {
    corpus: Vec<MolecularGraph>,
    hs: Vec<MolecularHypergraph>,
    mhg: MHG,
    seqs: Vec<mhg_core::ParseSequence>,
    infer_time: Duration,
}

fn corpus_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/desk_corpus.smi")
}

fn setup() -> Ctx {
    let (corpus, report) = load_dataset(corpus_path()).expect("desk corpus");
    assert!(report.rejected.is_empty());
    let t = Instant::now();
    let hs: Vec<_> = corpus.iter().map(|g| enc_h(g).unwrap()).collect();
    let (mhg, seqs) = infer(&hs);
    Ctx { corpus, hs, mhg, seqs, infer_time: t.elapsed() }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// degree and weighted-cardinality checks written against the raw fields
fn two_regular(h: &Hypergraph) -> bool {
    let mut deg = vec![0usize; h.nodes.len()];
    for e in &h.edges {
        for &m in &e.members {
            deg[m] += 1;
        }
    }
    deg.iter().all(|&d| d == 2)
}

fn cardinality_consistent(h: &Hypergraph) -> bool {
    h.edges.iter().all(|e| match &e.label {
        HyperedgeLabel::Terminal(a) => {
            let sum: u32 = e.members.iter().map(|&m| h.nodes[m].weight() as u32).sum();
            sum + a.implicit_h as u32 == a.valence as u32
        }
        _ => false,
    })
}

fn c1_validity(c: &Ctx) -> Outcome {
    let t = Instant::now();
    let mut bad = 0;
    for seed in 0..1000u64 {
        let seq = sample_derivation(&c.mhg, seed, SamplerConfig::default().max_expansions).map_err(|e| e.to_string())?;
        let ok = c
            .mhg
            .derive(&seq)
            .ok()
            .and_then(|h| dec_h(h.as_hypergraph()).ok())
            .is_some_and(|g| check_molecular_graph(&g).is_empty());
        bad += usize::from(!ok);
    }
    let elapsed = t.elapsed() + c.infer_time;
    check(bad == 0 && elapsed < Duration::from_secs(60), format!("{} valid of 1000 in {elapsed:.1?}", 1000 - bad))
}

fn c2_reconstruction(c: &Ctx) -> Outcome {
    let mut ok = 0;
    for (g, h) in c.corpus.iter().zip(&c.hs) {
        let good = encode(&c.mhg, h)
            .ok()
            .and_then(|s| c.mhg.derive(&s).ok())
            .and_then(|d| dec_h(d.as_hypergraph()).ok())
            .is_some_and(|back| isomorphic(&back, g));
        ok += usize::from(good);
    }
    check(ok == c.corpus.len(), format!("{ok}/{} reconstructed", c.corpus.len()))
}

fn c3_lemmas(c: &Ctx) -> Outcome {
    let c1 = c.mhg.rules().iter().filter(|r| check_condition1(r)).count();
    let mut regular = 0;
    let mut cardinal = 0;
    for seed in 0..1000u64 {
        let seq = sample_derivation(&c.mhg, 1_000_000 + seed, 500).map_err(|e| e.to_string())?;
        let h = c.mhg.derive_hypergraph(&seq).map_err(|e| e.to_string())?;
        regular += usize::from(two_regular(&h));
        cardinal += usize::from(cardinality_consistent(&h));
    }
    check(
        c1 == c.mhg.len() && regular == 1000 && cardinal == 1000,
        format!("condition 1 {c1}/{} rules; 2-regular {regular}/1000; cardinality {cardinal}/1000", c.mhg.len()),
    )
}

fn c4_irredundancy(c: &Ctx) -> Outcome {
    let ok = c
        .hs
        .iter()
        .filter(|h| {
            let td = decompose(h);
            verify_decomposition(&td, h.as_hypergraph()).is_empty() && verify_irredundant(&td, h.as_hypergraph())
        })
        .count();
    check(ok == c.hs.len(), format!("{ok}/{} decompositions valid and irredundant", c.hs.len()))
}

fn c5_encoding_roundtrip(c: &Ctx) -> Outcome {
    let roundtrip = |g: &MolecularGraph| enc_h(g).ok().and_then(|h| dec_h(h.as_hypergraph()).ok()).is_some_and(|b| isomorphic(&b, g));
    let corpus_ok = c.corpus.iter().filter(|g| roundtrip(g)).count();
    let mut sampled_ok = 0;
    for seed in 0..500u64 {
        let seq = sample_derivation(&c.mhg, 2_000_000 + seed, 500).map_err(|e| e.to_string())?;
        let g = dec_h(c.mhg.derive(&seq).map_err(|e| e.to_string())?.as_hypergraph()).map_err(|e| e.to_string())?;
        sampled_ok += usize::from(roundtrip(&g));
    }
    check(
        corpus_ok == c.corpus.len() && sampled_ok == 500,
        format!("corpus {corpus_ok}/{}; sampled {sampled_ok}/500", c.corpus.len()),
    )
}

fn c6_coverage(c: &Ctx) -> Outcome {
    let (mut train, mut held) = (Vec::new(), Vec::new());
    for (i, h) in c.hs.iter().enumerate() {
        if i % 5 == 0 { held.push(h.clone()) } else { train.push(h.clone()) }
    }
    let (mhg, _) = infer(&train);
    let parsed = held.iter().filter(|h| encode(&mhg, h).is_ok()).count();
    let rate = parsed as f64 / held.len() as f64;
    check(rate >= 0.85, format!("{parsed}/{} held-out molecules encode (coverage {rate:.4})", held.len()))
}

fn c7_numerics(_: &Ctx) -> Outcome {
    // GP through 12 points of a 2-d function, no noise
    let xs: Vec<DVector<f64>> =
        (0..12).map(|i| DVector::from_vec(vec![i as f64 * 0.7, (i as f64 * 1.3).sin() * 2.0])).collect();
    let y: Vec<f64> = xs.iter().map(|x| x[0].cos() + 0.5 * x[1]).collect();
    let gp = gp_fit(&xs, &y, GpHyper { noise_variance: 0.0, ..GpHyper::default() }).map_err(|e| e.to_string())?;
    let gp_err = xs.iter().zip(&y).map(|(x, t)| (gp.predict(x).0 - t).abs()).fold(0.0, f64::max);
    let ei = expected_improvement(1.5, 0.0, 1.5);

    let x = DMatrix::from_fn(30, 6, |i, j| ((i * 7 + j * 3) % 11) as f64 + (i as f64 * 0.37 + j as f64).sin());
    let pca = pca_fit(&x, 4).map_err(|e| e.to_string())?;
    let gram = &pca.components * pca.components.transpose();
    let orth = (gram - DMatrix::<f64>::identity(4, 4)).abs().max();

    let col: Vec<f64> = (0..50).map(|i| (i as f64 * 0.91).sin() * 3.0 + 7.0).collect();
    let s = Standardizer::fit(&col);
    let z: Vec<f64> = col.iter().map(|&v| s.transform(v)).collect();
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    let std = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / z.len() as f64).sqrt();

    check(
        gp_err <= 1e-6 && ei == 0.0 && orth <= 1e-8 && mean.abs() <= 1e-9 && (std - 1.0).abs() <= 1e-9,
        format!("gp max err {gp_err:.2e}; EI {ei}; PCA orth err {orth:.2e}; std mean {mean:.1e} std {std:.12}"),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 }
}

fn c8_optimization(c: &Ctx) -> Outcome {
    let t = Instant::now();
    let spec = PropertySpec::fit(&c.corpus);
    let oracle = PropertyOracle(spec.clone());
    let labeled: Vec<Labeled> = c
        .corpus
        .iter()
        .zip(&c.seqs)
        .map(|(g, s)| Labeled { graph: g.clone(), seq: s.clone(), score: penalized_logp(g, &spec).unwrap() })
        .collect();
    let (mut bo, mut rnd) = (Vec::new(), Vec::new());
    for seed in 0..10u64 {
        let cfg = GlobalConfig { rounds: 10, per_round: 5, seed, ..GlobalConfig::default() };
        let out = global_optimize(&c.mhg, &labeled, &oracle, &cfg).map_err(|e| e.to_string())?;
        let base = random_baseline(&c.mhg, &c.corpus, &oracle, 50, SamplerConfig::default(), seed).map_err(|e| e.to_string())?;
        if out.len() != 50 || base.len() != 50 {
            return Err(format!("seed {seed}: unequal budgets ({} vs {})", out.len(), base.len()));
        }
        bo.push(out[0].score);
        rnd.push(base[0].score);
    }
    let (b, r) = (median(bo), median(rnd));
    let elapsed = t.elapsed();
    check(b >= r && elapsed < Duration::from_secs(300), format!("median best BO {b:.4} vs random {r:.4} in {elapsed:.1?}"))
}

fn c9_local(c: &Ctx) -> Outcome {
    let oracle = PropertyOracle(PropertySpec::fit(&c.corpus));
    let (mut successes, mut violations, mut total) = (0usize, 0usize, 0.0);
    for (i, g) in c.corpus.iter().take(100).enumerate() {
        let cfg = LocalConfig { tau: 0.4, seed: i as u64, ..LocalConfig::default() };
        let r = local_optimize(g, &c.mhg, &oracle, &cfg).map_err(|e| e.to_string())?;
        if let Some(hit) = r.best {
            successes += 1;
            total += hit.improvement;
            violations += usize::from(hit.similarity < 0.4);
        }
    }
    let mean = if successes == 0 { 0.0 } else { total / successes as f64 };
    check(
        violations == 0 && mean > 0.0,
        format!("{successes}/100 improved; mean improvement {mean:.4}; similarity violations {violations}"),
    )
}

fn mhg(args: &[&str]) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_mhg")).args(args).env_remove("MHG_SEED").output().map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("mhg {}: {}", args[0], String::from_utf8_lossy(&o.stderr)));
    }
    Ok(o.stdout)
}

fn c10_determinism(_: &Ctx) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = corpus_path();
    let corpus = corpus.to_str().unwrap();
    let g = dir.path().join("g.json");
    let g = g.to_str().unwrap();
    mhg(&["infer", corpus, "-o", g])?;
    let inputs = dir.path().join("inputs.smi");
    let text: String = fs::read_to_string(corpus).unwrap().lines().filter(|l| !l.starts_with('#')).take(20).map(|l| format!("{l}\n")).collect();
    fs::write(&inputs, text).unwrap();
    let inputs = inputs.to_str().unwrap();
    let commands: [&[&str]; 3] = [
        &["sample", "-g", g, "-n", "500", "--seed", "42"],
        &["optimize-global", "-g", g, "--corpus", corpus, "--seed", "42", "-k", "3", "-m", "10"],
        &["optimize-local", "-g", g, inputs, "--seed", "42", "-k", "100"],
    ];
    let mut same = 0;
    for args in commands {
        let a = mhg(args)?;
        let b = mhg(args)?;
        if a == b && !a.is_empty() {
            same += 1;
        }
    }
    check(same == commands.len(), format!("{same}/{} commands byte-identical across reruns", commands.len()))
}

fn main() -> ExitCode {
    let ctx = setup();
    let criteria: [(&str, fn(&Ctx) -> Outcome); 10] = [
        ("1 validity", c1_validity),
        ("2 reconstruction", c2_reconstruction),
        ("3 rule and derivation lemmas", c3_lemmas),
        ("4 irredundancy", c4_irredundancy),
        ("5 encoding round-trip", c5_encoding_roundtrip),
        ("6 held-out coverage", c6_coverage),
        ("7 GP and numerics", c7_numerics),
        ("8 optimization direction", c8_optimization),
        ("9 local optimization", c9_local),
        ("10 determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f(&ctx) {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
