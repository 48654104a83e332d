#![allow(dead_code)]

use std::sync::OnceLock;

use mhg_core::{enc_h, infer, load_dataset, MolecularGraph, MolecularHypergraph, ParseSequence, MHG};

pub struct Desk {
    pub graphs: Vec<MolecularGraph>,
    pub hypergraphs: Vec<MolecularHypergraph>,
    pub mhg: MHG,
    pub seqs: Vec<ParseSequence>,
}

/// Desk corpus and its grammar, built once per test binary.
pub fn desk() -> &'static Desk {
    static DESK: OnceLock<Desk> = OnceLock::new();
    DESK.get_or_init(|| {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/desk_corpus.smi");
        let (graphs, _) = load_dataset(path).expect("desk corpus");
        let hypergraphs: Vec<_> = graphs.iter().map(|g| enc_h(g).unwrap()).collect();
        let (mhg, seqs) = infer(&hypergraphs);
        Desk { graphs, hypergraphs, mhg, seqs }
    })
}

/// Every permutation of `0..n`, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
