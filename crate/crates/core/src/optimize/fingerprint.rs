//! ECFP-style circular fingerprints and Tanimoto similarity.

use std::collections::BTreeSet;

use crate::hashing::{atom_label_bytes, bond_label_bytes, Fnv64};
use crate::molgraph::MolecularGraph;

use super::OptimizeError;

pub const DEFAULT_RADIUS: usize = 2;
pub const DEFAULT_BITS: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    words: Vec<u64>,
    width: usize,
}

impl Fingerprint {
    pub fn empty(width: usize) -> Fingerprint {
        Fingerprint { words: vec![0; width.div_ceil(64)], width }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn set(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(|&b| self.get(b))
    }
}

/// All substructure identifiers from rounds `0..=radius`.
pub fn identifiers(g: &MolecularGraph, radius: usize) -> BTreeSet<u64> {
    let mut ids: Vec<u64> = g
        .atoms()
        .iter()
        .map(|a| {
            let mut h = Fnv64::new();
            h.write(b"ecfp0");
            h.write(&atom_label_bytes(a));
            h.finish()
        })
        .collect();
    let mut all: BTreeSet<u64> = ids.iter().copied().collect();
    for round in 1..=radius {
        let next: Vec<u64> = (0..g.atom_count())
            .map(|v| {
                let mut env: Vec<([u8; 2], u64)> =
                    g.neighbors(v).iter().map(|&(w, b)| (bond_label_bytes(&g.bond(b).label), ids[w])).collect();
                env.sort_unstable();
                let mut h = Fnv64::new();
                h.write_u64(round as u64);
                h.write_u64(ids[v]);
                for (bond, id) in env {
                    h.write(&bond);
                    h.write_u64(id);
                }
                h.finish()
            })
            .collect();
        all.extend(next.iter().copied());
        ids = next;
    }
    all
}

pub fn morgan_fingerprint(g: &MolecularGraph, radius: usize, bits: usize) -> Fingerprint {
    let mut fp = Fingerprint::empty(bits);
    for id in identifiers(g, radius) {
        fp.set((id % bits as u64) as usize);
    }
    fp
}

/// |a ∧ b| / |a ∨ b|, and 1 for two empty fingerprints.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, OptimizeError> {
    if a.width != b.width {
        return Err(OptimizeError::WidthMismatch(a.width, b.width));
    }
    let (mut inter, mut union) = (0u32, 0u32);
    for (x, y) in a.words.iter().zip(&b.words) {
        inter += (x & y).count_ones();
        union += (x | y).count_ones();
    }
    Ok(if union == 0 { 1.0 } else { f64::from(inter) / f64::from(union) })
}
