//! Molecular graph data model.
//!
//! Atoms are labeled nodes and bonds are labeled edges. Hydrogens are folded
//! into [`AtomLabel::implicit_h`], so the degree condition is checked on the
//! heavy-atom degree weighted by bond order.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MolError {
    #[error("unsupported element/charge combination {symbol}{charge:+}")]
    UnknownElement { symbol: String, charge: i8 },
    #[error("atom index {0} out of range")]
    AtomOutOfRange(usize),
    #[error("self-loop on atom {0}")]
    SelfLoop(usize),
    #[error("atoms {0} and {1} are already bonded")]
    ParallelBond(usize, usize),
    #[error("E/Z tag on a bond that is not double")]
    StereoOnNonDouble,
    #[error("no valence of {symbol}{charge:+} accommodates {required} bonding units")]
    NoValence { symbol: String, charge: i8, required: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Element {
    B,
    C,
    N,
    O,
    F,
    P,
    S,
    Cl,
    Br,
    I,
    H,
}

impl Element {
    pub const ALL: [Element; 11] = [
        Element::B,
        Element::C,
        Element::N,
        Element::O,
        Element::F,
        Element::P,
        Element::S,
        Element::Cl,
        Element::Br,
        Element::I,
        Element::H,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::F => "F",
            Element::P => "P",
            Element::S => "S",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
            Element::H => "H",
        }
    }

    pub fn from_symbol(symbol: &str) -> Result<Element, MolError> {
        Element::ALL
            .iter()
            .copied()
            .find(|e| e.symbol() == symbol)
            .ok_or_else(|| MolError::UnknownElement {
                symbol: symbol.to_string(),
                charge: 0,
            })
    }

    pub fn is_halogen(self) -> bool {
        matches!(self, Element::F | Element::Cl | Element::Br | Element::I)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Allowed total valences (heavy bond orders plus hydrogens), ascending.
pub fn allowed_valences(element: Element, charge: i8) -> Option<&'static [u8]> {
    use Element::*;
    let v: &'static [u8] = match (element, charge) {
        (B, 0) => &[3],
        (B, -1) => &[4],
        (C, 0) => &[4],
        (C, 1) | (C, -1) => &[3],
        (N, 0) => &[3],
        (N, 1) => &[4],
        (N, -1) => &[2],
        (O, 0) => &[2],
        (O, 1) => &[3],
        (O, -1) => &[1],
        (F | Cl | Br | I, 0) => &[1],
        (P, 0) => &[3, 5],
        (P, 1) => &[4],
        (S, 0) => &[2, 4, 6],
        (S, 1) => &[3],
        (S, -1) => &[1],
        (H, 0) => &[1],
        _ => return None,
    };
    Some(v)
}

/// Lowest allowed valence that is at least `required`.
pub fn lowest_valence(element: Element, charge: i8, required: u32) -> Result<u8, MolError> {
    let table = allowed_valences(element, charge).ok_or_else(|| MolError::UnknownElement {
        symbol: element.symbol().to_string(),
        charge,
    })?;
    table
        .iter()
        .copied()
        .find(|&v| u32::from(v) >= required)
        .ok_or_else(|| MolError::NoValence {
            symbol: element.symbol().to_string(),
            charge,
            required,
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
pub enum Chirality {
    #[default]
    None,
    /// `@`
    Ccw,
    /// `@@`
    Cw,
}

/// Node label. `valence` is the resolved total valence, which matters for
/// multivalent elements (S, P) where the element and charge alone do not fix it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomLabel {
    pub element: Element,
    pub charge: i8,
    pub implicit_h: u8,
    pub valence: u8,
    pub chirality: Chirality,
}

impl AtomLabel {
    /// Label with the lowest valence that accommodates `implicit_h`.
    pub fn new(element: Element, charge: i8, implicit_h: u8) -> Result<AtomLabel, MolError> {
        let valence = lowest_valence(element, charge, u32::from(implicit_h))?;
        Ok(AtomLabel {
            element,
            charge,
            implicit_h,
            valence,
            chirality: Chirality::None,
        })
    }

    pub fn with_valence(mut self, valence: u8) -> AtomLabel {
        self.valence = valence;
        self
    }

    pub fn with_chirality(mut self, chirality: Chirality) -> AtomLabel {
        self.chirality = chirality;
        self
    }

    pub fn is_supported(&self) -> bool {
        allowed_valences(self.element, self.charge)
            .is_some_and(|t| t.contains(&self.valence) && self.implicit_h <= self.valence)
    }
}

impl fmt::Display for AtomLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.element)?;
        match self.chirality {
            Chirality::None => {}
            Chirality::Ccw => f.write_str("@")?,
            Chirality::Cw => f.write_str("@@")?,
        }
        if self.implicit_h > 0 {
            write!(f, "H{}", self.implicit_h)?;
        }
        if self.charge != 0 {
            write!(f, "{:+}", self.charge)?;
        }
        write!(f, "/v{}", self.valence)
    }
}

/// Bonding units a label must receive from heavy-atom bonds.
pub fn heavy_degree_target(label: &AtomLabel) -> Result<u8, MolError> {
    if !label.is_supported() {
        return Err(MolError::UnknownElement {
            symbol: label.element.symbol().to_string(),
            charge: label.charge,
        });
    }
    Ok(label.valence - label.implicit_h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
}

impl BondOrder {
    pub fn weight(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
pub enum EzTag {
    #[default]
    None,
    E,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BondLabel {
    pub order: BondOrder,
    pub ez: EzTag,
}

impl BondLabel {
    pub const SINGLE: BondLabel = BondLabel {
        order: BondOrder::Single,
        ez: EzTag::None,
    };
    pub const DOUBLE: BondLabel = BondLabel {
        order: BondOrder::Double,
        ez: EzTag::None,
    };
    pub const TRIPLE: BondLabel = BondLabel {
        order: BondOrder::Triple,
        ez: EzTag::None,
    };

    pub fn new(order: BondOrder, ez: EzTag) -> Result<BondLabel, MolError> {
        if ez != EzTag::None && order != BondOrder::Double {
            return Err(MolError::StereoOnNonDouble);
        }
        Ok(BondLabel { order, ez })
    }

    pub fn weight(&self) -> u8 {
        self.order.weight()
    }

    pub fn is_valid(&self) -> bool {
        self.ez == EzTag::None || self.order == BondOrder::Double
    }
}

impl fmt::Display for BondLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.order {
            BondOrder::Single => "-",
            BondOrder::Double => "=",
            BondOrder::Triple => "#",
        })?;
        match self.ez {
            EzTag::None => Ok(()),
            EzTag::E => f.write_str("E"),
            EzTag::Z => f.write_str("Z"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub label: BondLabel,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MolecularGraph {
    atoms: Vec<AtomLabel>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl MolecularGraph {
    pub fn new() -> MolecularGraph {
        MolecularGraph::default()
    }

    pub fn add_atom(&mut self, label: AtomLabel) -> usize {
        self.atoms.push(label);
        self.adjacency.push(Vec::new());
        self.atoms.len() - 1
    }

    /// Adds an undirected bond; rejects self-loops and parallel bonds.
    pub fn add_bond(&mut self, a: usize, b: usize, label: BondLabel) -> Result<usize, MolError> {
        let n = self.atoms.len();
        if a >= n {
            return Err(MolError::AtomOutOfRange(a));
        }
        if b >= n {
            return Err(MolError::AtomOutOfRange(b));
        }
        if a == b {
            return Err(MolError::SelfLoop(a));
        }
        if self.bond_between(a, b).is_some() {
            return Err(MolError::ParallelBond(a.min(b), a.max(b)));
        }
        let idx = self.bonds.len();
        self.bonds.push(Bond {
            a: a.min(b),
            b: a.max(b),
            label,
        });
        self.adjacency[a].push((b, idx));
        self.adjacency[b].push((a, idx));
        Ok(idx)
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn atoms(&self) -> &[AtomLabel] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &AtomLabel {
        &self.atoms[i]
    }

    pub fn atom_mut(&mut self, i: usize) -> &mut AtomLabel {
        &mut self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    pub fn set_bond_label(&mut self, i: usize, label: BondLabel) {
        self.bonds[i].label = label;
    }

    /// `(neighbor, bond index)` pairs in insertion order.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency
            .get(a)?
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, e)| e)
    }

    /// Sum of bond orders at `atom`.
    pub fn weighted_degree(&self, atom: usize) -> u32 {
        self.adjacency[atom]
            .iter()
            .map(|&(_, e)| u32::from(self.bonds[e].label.weight()))
            .sum()
    }

    pub fn heavy_neighbor_count(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn connected_components(&self) -> usize {
        let mut seen = vec![false; self.atoms.len()];
        let mut count = 0;
        for start in 0..self.atoms.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &(n, _) in &self.adjacency[v] {
                    if !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
        count
    }

    pub fn to_petgraph(&self) -> UnGraph<AtomLabel, BondLabel> {
        let mut g = UnGraph::with_capacity(self.atoms.len(), self.bonds.len());
        let idx: Vec<_> = self.atoms.iter().map(|&l| g.add_node(l)).collect();
        for b in &self.bonds {
            g.add_edge(idx[b.a], idx[b.b], b.label);
        }
        g
    }

    /// Copy with atoms reordered so that old atom `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> MolecularGraph {
        assert_eq!(perm.len(), self.atoms.len());
        let mut atoms = vec![self.atoms[0]; self.atoms.len()];
        for (old, &new) in perm.iter().enumerate() {
            atoms[new] = self.atoms[old];
        }
        let mut g = MolecularGraph::new();
        for a in atoms {
            g.add_atom(a);
        }
        let mut bonds: Vec<_> = self
            .bonds
            .iter()
            .map(|b| (perm[b.a].min(perm[b.b]), perm[b.a].max(perm[b.b]), b.label))
            .collect();
        bonds.sort();
        for (a, b, l) in bonds {
            g.add_bond(a, b, l).expect("permutation preserves simplicity");
        }
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Fewer bonding units than the label requires.
    Deficit,
    /// More bonding units than the label allows.
    Excess,
    UnsupportedLabel,
    StereoOnNonDouble,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValenceViolation {
    /// Atom index, or bond index for [`ViolationKind::StereoOnNonDouble`].
    pub index: usize,
    pub kind: ViolationKind,
    pub expected: u32,
    pub actual: u32,
}

impl fmt::Display for ValenceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::Deficit | ViolationKind::Excess => write!(
                f,
                "atom {}: {:?} (expected {}, found {})",
                self.index, self.kind, self.expected, self.actual
            ),
            ViolationKind::UnsupportedLabel => write!(f, "atom {}: unsupported label", self.index),
            ViolationKind::StereoOnNonDouble => {
                write!(f, "bond {}: E/Z tag on non-double bond", self.index)
            }
        }
    }
}

/// Lists every atom whose weighted heavy degree differs from its label's target.
pub fn check_molecular_graph(g: &MolecularGraph) -> Vec<ValenceViolation> {
    let mut out = Vec::new();
    for (i, label) in g.atoms().iter().enumerate() {
        let actual = g.weighted_degree(i);
        match heavy_degree_target(label) {
            Err(_) => out.push(ValenceViolation {
                index: i,
                kind: ViolationKind::UnsupportedLabel,
                expected: 0,
                actual,
            }),
            Ok(target) => {
                let expected = u32::from(target);
                if actual != expected {
                    out.push(ValenceViolation {
                        index: i,
                        kind: if actual < expected {
                            ViolationKind::Deficit
                        } else {
                            ViolationKind::Excess
                        },
                        expected,
                        actual,
                    });
                }
            }
        }
    }
    for (i, b) in g.bonds().iter().enumerate() {
        if !b.label.is_valid() {
            out.push(ValenceViolation {
                index: i,
                kind: ViolationKind::StereoOnNonDouble,
                expected: 0,
                actual: 0,
            });
        }
    }
    out
}

fn label_multiset(g: &MolecularGraph) -> (Vec<AtomLabel>, Vec<BondLabel>) {
    let mut a = g.atoms().to_vec();
    a.sort();
    let mut b: Vec<_> = g.bonds().iter().map(|b| b.label).collect();
    b.sort();
    (a, b)
}

/// Label-preserving graph isomorphism (VF2 behind a label-multiset prefilter).
pub fn isomorphic(g1: &MolecularGraph, g2: &MolecularGraph) -> bool {
    if g1.atom_count() != g2.atom_count() || g1.bond_count() != g2.bond_count() {
        return false;
    }
    if label_multiset(g1) != label_multiset(g2) {
        return false;
    }
    if invariant_hash(g1) != invariant_hash(g2) {
        return false;
    }
    petgraph::algo::is_isomorphic_matching(
        &g1.to_petgraph(),
        &g2.to_petgraph(),
        |a, b| a == b,
        |a, b| a == b,
    )
}

/// Isomorphism-invariant 64-bit hash from three rounds of neighborhood refinement.
/// Equal graphs hash equal; distinct hashes imply non-isomorphic graphs.
pub fn invariant_hash(g: &MolecularGraph) -> u64 {
    use crate::hashing::{hash_atom_label, hash_bond_label, Fnv64};
    let mut ids: Vec<u64> = g.atoms().iter().map(hash_atom_label).collect();
    for _ in 0..3 {
        ids = (0..g.atom_count())
            .map(|v| {
                let mut env: Vec<(u64, u64)> = g
                    .neighbors(v)
                    .iter()
                    .map(|&(n, e)| (hash_bond_label(&g.bond(e).label), ids[n]))
                    .collect();
                env.sort_unstable();
                let mut h = Fnv64::new();
                h.write_u64(ids[v]);
                for (b, n) in env {
                    h.write_u64(b);
                    h.write_u64(n);
                }
                h.finish()
            })
            .collect();
    }
    ids.sort_unstable();
    let mut h = Fnv64::new();
    h.write_u64(g.atom_count() as u64);
    h.write_u64(g.bond_count() as u64);
    for id in ids {
        h.write_u64(id);
    }
    h.finish()
}

/// Cycle lengths of a minimum cycle basis, ascending.
///
/// Candidates are the Horton cycles (shortest path `v..x`, edge `x-y`, shortest
/// path `y..v`), taken greedily by length while independent over GF(2).
pub fn ring_sizes(g: &MolecularGraph) -> Vec<usize> {
    let n = g.atom_count();
    let m = g.bond_count();
    if n == 0 || m + g.connected_components() <= n {
        return Vec::new();
    }
    let rank = m + g.connected_components() - n;
    let words = m.div_ceil(64);

    let mut candidates: BTreeMap<(usize, Vec<u64>), ()> = BTreeMap::new();
    for root in 0..n {
        // BFS tree from root with deterministic parent choice.
        let mut dist = vec![usize::MAX; n];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let mut nbrs: Vec<_> = g.neighbors(v).to_vec();
            nbrs.sort_unstable();
            for (w, e) in nbrs {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = Some((v, e));
                    queue.push_back(w);
                }
            }
        }
        let path_to_root = |mut v: usize| {
            let mut nodes = vec![v];
            let mut edges = Vec::new();
            while let Some((p, e)) = parent[v] {
                edges.push(e);
                nodes.push(p);
                v = p;
            }
            (nodes, edges)
        };
        for (ei, bond) in g.bonds().iter().enumerate() {
            let (x, y) = (bond.a, bond.b);
            if dist[x] == usize::MAX || dist[y] == usize::MAX {
                continue;
            }
            if parent[x].is_some_and(|(_, e)| e == ei) || parent[y].is_some_and(|(_, e)| e == ei) {
                continue;
            }
            let (px, ex) = path_to_root(x);
            let (py, ey) = path_to_root(y);
            // Paths must meet only at the root.
            let shared = px.iter().filter(|v| py.contains(v)).count();
            if shared != 1 {
                continue;
            }
            let mut bits = vec![0u64; words];
            for &e in ex.iter().chain(ey.iter()).chain(std::iter::once(&ei)) {
                bits[e / 64] |= 1 << (e % 64);
            }
            let len = ex.len() + ey.len() + 1;
            candidates.insert((len, bits), ());
        }
    }

    // Greedy GF(2) independence with a reduced basis keyed by pivot bit.
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut sizes = Vec::new();
    for ((len, bits), ()) in candidates {
        if sizes.len() == rank {
            break;
        }
        let mut v = bits.clone();
        for (pivot, b) in &basis {
            if v[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x ^= y;
                }
            }
        }
        if let Some(pivot) = lowest_bit(&v) {
            basis.push((pivot, v));
            sizes.push(len);
        }
    }
    sizes.sort_unstable();
    sizes
}

fn lowest_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn carbon(h: u8) -> AtomLabel {
        AtomLabel::new(Element::C, 0, h).unwrap()
    }

    pub(crate) fn ring(n: usize) -> MolecularGraph {
        let mut g = MolecularGraph::new();
        for _ in 0..n {
            g.add_atom(carbon(2));
        }
        for i in 0..n {
            g.add_bond(i, (i + 1) % n, BondLabel::SINGLE).unwrap();
        }
        g
    }

    #[test]
    fn heavy_degree_targets() {
        assert_eq!(heavy_degree_target(&carbon(3)).unwrap(), 1);
        let o = AtomLabel::new(Element::O, 0, 0).unwrap();
        assert_eq!(heavy_degree_target(&o).unwrap(), 2);
        let n_plus = AtomLabel::new(Element::N, 1, 0).unwrap();
        assert_eq!(heavy_degree_target(&n_plus).unwrap(), 4);
    }

    #[test]
    fn unsupported_charge_is_unknown_element() {
        assert!(matches!(
            AtomLabel::new(Element::F, 2, 0),
            Err(MolError::UnknownElement { .. })
        ));
        let bogus = carbon(0).with_valence(5);
        assert!(heavy_degree_target(&bogus).is_err());
    }

    #[test]
    fn ethane_is_valid() {
        let mut g = MolecularGraph::new();
        let a = g.add_atom(carbon(3));
        let b = g.add_atom(carbon(3));
        g.add_bond(a, b, BondLabel::SINGLE).unwrap();
        assert!(check_molecular_graph(&g).is_empty());
    }

    #[test]
    fn pentavalent_carbon_reports_excess() {
        let mut g = MolecularGraph::new();
        let c = g.add_atom(carbon(0));
        for _ in 0..5 {
            let x = g.add_atom(carbon(3));
            g.add_bond(c, x, BondLabel::SINGLE).unwrap();
        }
        let v = check_molecular_graph(&g);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].index, c);
        assert_eq!(v[0].kind, ViolationKind::Excess);
        assert_eq!((v[0].expected, v[0].actual), (4, 5));
    }

    #[test]
    fn disubstituted_aromatic_carbon_violates_valence() {
        // Kekulé graph of c1c(O)(O)cccc1: ring carbon 1 carries a double bond,
        // a ring single bond and two hydroxyls.
        let mut g = MolecularGraph::new();
        let ring: Vec<_> = (0..6).map(|i| g.add_atom(carbon(if i == 1 { 0 } else { 1 }))).collect();
        for i in 0..6 {
            let l = if i % 2 == 0 { BondLabel::DOUBLE } else { BondLabel::SINGLE };
            g.add_bond(ring[i], ring[(i + 1) % 6], l).unwrap();
        }
        for _ in 0..2 {
            let o = g.add_atom(AtomLabel::new(Element::O, 0, 1).unwrap());
            g.add_bond(ring[1], o, BondLabel::SINGLE).unwrap();
        }
        let v = check_molecular_graph(&g);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].index, ring[1]);
        assert_eq!(v[0].kind, ViolationKind::Excess);
    }

    #[test]
    fn rejects_self_loops_and_parallel_bonds() {
        let mut g = MolecularGraph::new();
        let a = g.add_atom(carbon(2));
        let b = g.add_atom(carbon(2));
        assert_eq!(g.add_bond(a, a, BondLabel::SINGLE), Err(MolError::SelfLoop(a)));
        g.add_bond(a, b, BondLabel::DOUBLE).unwrap();
        assert!(matches!(g.add_bond(b, a, BondLabel::SINGLE), Err(MolError::ParallelBond(..))));
    }

    #[test]
    fn ring_sizes_basic() {
        let mut ethane = MolecularGraph::new();
        ethane.add_atom(carbon(3));
        ethane.add_atom(carbon(3));
        ethane.add_bond(0, 1, BondLabel::SINGLE).unwrap();
        assert!(ring_sizes(&ethane).is_empty());
        assert_eq!(ring_sizes(&ring(6)), vec![6]);
        assert_eq!(ring_sizes(&ring(8)), vec![8]);
    }

    #[test]
    fn ez_requires_double() {
        assert!(BondLabel::new(BondOrder::Single, EzTag::E).is_err());
        assert!(BondLabel::new(BondOrder::Double, EzTag::Z).is_ok());
    }

    #[test]
    fn isomorphic_detects_label_difference() {
        let mut g1 = ring(6);
        let g2 = ring(6);
        assert!(isomorphic(&g1, &g2));
        g1.atom_mut(0).charge = 0;
        g1.set_bond_label(0, BondLabel::DOUBLE);
        assert!(!isomorphic(&g1, &g2));
    }
}
