mod common;

use std::collections::BTreeSet;

use mhg_core::grammar::{sample_derivation, ParseTree, Sampler, SamplerConfig};
use mhg_core::molgraph::{check_molecular_graph, invariant_hash, isomorphic, ring_sizes};
use mhg_core::optimize::{decode, morgan_fingerprint, mutate, MoleculeSet};
use mhg_core::treedecomp::{decompose, verify_decomposition, verify_irredundant};
use mhg_core::{dec_h, enc_h, encode, infer, parse_smiles, write_smiles, MolecularGraph};
use proptest::prelude::*;
use proptest::sample::Index;

use common::desk;

fn corpus_molecule() -> impl Strategy<Value = &'static MolecularGraph> {
    any::<Index>().prop_map(|i| i.get(&desk().graphs))
}

/// A corpus molecule together with a random atom permutation.
fn permuted_molecule() -> impl Strategy<Value = (&'static MolecularGraph, MolecularGraph)> {
    corpus_molecule().prop_flat_map(|g| {
        Just((0..g.atom_count()).collect::<Vec<_>>()).prop_shuffle().prop_map(move |p| (g, g.permuted(&p)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn permutation_preserves_identity((g, p) in permuted_molecule()) {
        prop_assert!(isomorphic(g, &p));
        prop_assert_eq!(invariant_hash(g), invariant_hash(&p));
        prop_assert_eq!(ring_sizes(g), ring_sizes(&p));
        prop_assert_eq!(morgan_fingerprint(g, 2, 2048), morgan_fingerprint(&p, 2, 2048));
    }

    #[test]
    fn smiles_write_parse_roundtrip((_, p) in permuted_molecule()) {
        let text = write_smiles(&p).unwrap();
        prop_assert!(isomorphic(&parse_smiles(&text).unwrap(), &p), "{}", text);
    }

    #[test]
    fn hypergraph_encoding_roundtrip((_, p) in permuted_molecule()) {
        let h = enc_h(&p).unwrap();
        prop_assert!(isomorphic(&dec_h(h.as_hypergraph()).unwrap(), &p));
    }

    #[test]
    fn grammar_parses_permuted_training_molecules((g, p) in permuted_molecule()) {
        let d = desk();
        let seq = encode(&d.mhg, &enc_h(&p).unwrap()).unwrap();
        prop_assert!(isomorphic(&decode(&d.mhg, &seq).unwrap(), g));
    }

    #[test]
    fn smiles_parser_is_total(s in "[CNOSFIBrcl()=#\\[\\]@+\\-/\\\\0-9H%.]{0,24}") {
        // any outcome is fine as long as it is not a panic
        if let Ok(g) = parse_smiles(&s) {
            prop_assert!(check_molecular_graph(&g).is_empty());
        }
    }

    #[test]
    fn samples_are_valid_and_reencode(seed in any::<u64>()) {
        let d = desk();
        let seq = sample_derivation(&d.mhg, seed, 500).unwrap();
        let g = decode(&d.mhg, &seq).unwrap();
        prop_assert!(check_molecular_graph(&g).is_empty());
        let again = encode(&d.mhg, &enc_h(&g).unwrap()).unwrap();
        prop_assert!(isomorphic(&decode(&d.mhg, &again).unwrap(), &g));
    }

    #[test]
    fn mutations_stay_in_language(i in any::<Index>(), seed in any::<u64>()) {
        let d = desk();
        let m = mutate(i.get(&d.seqs), &d.mhg, seed).unwrap();
        prop_assert!(check_molecular_graph(&decode(&d.mhg, &m).unwrap()).is_empty());
    }
}

#[test]
fn every_corpus_decomposition_is_irredundant() {
    for h in &desk().hypergraphs {
        let td = decompose(h);
        assert!(verify_decomposition(&td, h.as_hypergraph()).is_empty());
        assert!(verify_irredundant(&td, h.as_hypergraph()));
    }
}

#[test]
fn inference_is_monotone() {
    let d = desk();
    let half = d.hypergraphs.len() / 2;
    let (small, _) = infer(&d.hypergraphs[..half]);
    let keys = |m: &mhg_core::MHG| (0..m.len()).map(|i| m.key(i).to_vec()).collect::<BTreeSet<_>>();
    assert!(keys(&small).is_subset(&keys(&d.mhg)));
    assert!(small.len() < d.mhg.len());
}

#[test]
fn swapping_a_subtree_for_a_same_lhs_derivation() {
    // replace the subtree under each node by a fresh derivation of its label
    let d = desk();
    let sampler = Sampler::new(&d.mhg, SamplerConfig::default());
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
    for seq in d.seqs.iter().take(60) {
        let tree = ParseTree::build(&d.mhg, seq).unwrap();
        for i in 0..tree.len() {
            let range = tree.subtree(i);
            let sub = sampler.sample_from(&tree.nodes[i].label, 500, &mut rng).unwrap();
            let mut out = seq.0[..range.start].to_vec();
            out.extend_from_slice(&sub.0);
            out.extend_from_slice(&seq.0[range.end..]);
            let g = decode(&d.mhg, &out.into()).unwrap();
            assert!(check_molecular_graph(&g).is_empty());
        }
    }
}

#[test]
fn mutation_explores() {
    let d = desk();
    let idx = d.seqs.iter().position(|s| s.len() >= 8).unwrap();
    let mut seen = MoleculeSet::new();
    seen.insert(&d.graphs[idx]);
    for seed in 0..100 {
        let m = mutate(&d.seqs[idx], &d.mhg, seed).unwrap();
        seen.insert(&decode(&d.mhg, &m).unwrap());
    }
    assert!(seen.len() > 1);
}

#[test]
fn dedup_is_sound() {
    let d = desk();
    let mut set = MoleculeSet::new();
    for g in &d.graphs {
        set.insert(g);
    }
    let distinct = set.len();
    // no corpus pair is isomorphic exactly when every insert succeeds
    let iso_pairs = (0..d.graphs.len())
        .flat_map(|i| (i + 1..d.graphs.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| isomorphic(&d.graphs[i], &d.graphs[j]))
        .count();
    assert_eq!(distinct + iso_pairs, d.graphs.len());
    for g in &d.graphs {
        let mut p: Vec<usize> = (0..g.atom_count()).collect();
        p.reverse();
        assert!(set.contains(&g.permuted(&p)));
        assert!(!set.insert(&g.permuted(&p)));
    }
}

#[test]
fn sample_length_tracks_corpus() {
    let d = desk();
    let corpus_mean = d.seqs.iter().map(|s| s.len()).sum::<usize>() as f64 / d.seqs.len() as f64;
    let n = 500;
    let sample_mean = (0..n).map(|s| sample_derivation(&d.mhg, s, 500).unwrap().len()).sum::<usize>() as f64 / n as f64;
    let ratio = sample_mean / corpus_mean;
    assert!((1.0 / 3.0..=3.0).contains(&ratio), "sample mean {sample_mean}, corpus mean {corpus_mean}");
}
