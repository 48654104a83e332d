//! Fixtures shared by the benchmarks.

use mhg_core::{enc_h, load_dataset, MolecularHypergraph};

pub const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/desk_corpus.smi");

/// Hypergraphs of the bundled corpus.
pub fn corpus() -> Vec<MolecularHypergraph> {
    let (graphs, _) = load_dataset(CORPUS).expect("bundled corpus loads");
    graphs.iter().map(|g| enc_h(g).expect("corpus molecules encode")).collect()
}
