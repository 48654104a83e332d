//! Hypergraphs and the molecular graph ⇄ hypergraph codec.
//!
//! In a molecular hypergraph every bond is a node and every atom is a
//! hyperedge over the nodes of its bonds. A bond of order k stays a single
//! node but contributes weight k to the cardinality of each incident atom.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::{check_molecular_graph, heavy_degree_target, AtomLabel, BondLabel, MolecularGraph};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergraphError {
    #[error("molecule has no bonds")]
    EmptyBondSet,
    #[error("input graph violates valence: {0}")]
    InvalidGraph(String),
    #[error("node {node} has degree {degree}, expected 2")]
    NotTwoRegular { node: NodeId, degree: usize },
    #[error("hyperedge {edge} has weighted cardinality {actual}, expected {expected}")]
    CardinalityMismatch { edge: EdgeId, expected: u32, actual: u32 },
    #[error("hypergraph is not molecular: {0}")]
    NotMolecular(String),
    #[error("member {node} of hyperedge {edge} does not exist")]
    MissingNode { edge: EdgeId, node: NodeId },
    #[error("hyperedge {0} has no members")]
    EmptyHyperedge(EdgeId),
    #[error("decoded graph is not simple: {0}")]
    NotSimple(String),
}

/// Non-terminal label: the ordered labels of the nodes it attaches to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NonTerminal {
    pub node_labels: Vec<BondLabel>,
}

impl NonTerminal {
    pub fn new(node_labels: Vec<BondLabel>) -> NonTerminal {
        NonTerminal { node_labels }
    }

    pub fn rank(&self) -> usize {
        self.node_labels.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HyperedgeLabel {
    Start,
    NonTerminal(NonTerminal),
    Terminal(AtomLabel),
}

impl HyperedgeLabel {
    pub fn is_terminal(&self) -> bool {
        matches!(self, HyperedgeLabel::Terminal(_))
    }

    pub fn is_nonterminal(&self) -> bool {
        !self.is_terminal()
    }

    pub fn rank(&self) -> usize {
        match self {
            HyperedgeLabel::Start => 0,
            HyperedgeLabel::NonTerminal(nt) => nt.rank(),
            HyperedgeLabel::Terminal(a) => heavy_degree_target(a).map_or(0, usize::from),
        }
    }
}

impl fmt::Display for HyperedgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperedgeLabel::Start => f.write_str("S"),
            HyperedgeLabel::Terminal(a) => write!(f, "{a}"),
            HyperedgeLabel::NonTerminal(nt) => {
                f.write_str("N[")?;
                for (i, l) in nt.node_labels.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{l}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperedge {
    pub label: HyperedgeLabel,
    /// Ordered for non-terminals; terminal membership is a set.
    pub members: Vec<NodeId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub nodes: Vec<BondLabel>,
    pub edges: Vec<Hyperedge>,
}

impl Hypergraph {
    pub fn new() -> Hypergraph {
        Hypergraph::default()
    }

    pub fn add_node(&mut self, label: BondLabel) -> NodeId {
        self.nodes.push(label);
        self.nodes.len() - 1
    }

    pub fn add_edge(&mut self, label: HyperedgeLabel, members: Vec<NodeId>) -> Result<EdgeId, HypergraphError> {
        let id = self.edges.len();
        if members.is_empty() {
            return Err(HypergraphError::EmptyHyperedge(id));
        }
        if let Some(&node) = members.iter().find(|&&m| m >= self.nodes.len()) {
            return Err(HypergraphError::MissingNode { edge: id, node });
        }
        self.edges.push(Hyperedge { label, members });
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of hyperedge memberships of every node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for e in &self.edges {
            for &m in &e.members {
                d[m] += 1;
            }
        }
        d
    }

    /// Hyperedges incident to each node, in edge order.
    pub fn incidence(&self) -> Vec<Vec<EdgeId>> {
        let mut inc = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            for &m in &e.members {
                inc[m].push(i);
            }
        }
        inc
    }

    pub fn nonterminal_count(&self) -> usize {
        self.edges.iter().filter(|e| e.label.is_nonterminal()).count()
    }

    pub fn first_nonterminal(&self) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.label.is_nonterminal())
    }

    pub fn is_terminal(&self) -> bool {
        self.edges.iter().all(|e| e.label.is_terminal())
    }

    /// Sum of member bond orders.
    pub fn weighted_cardinality(&self, edge: EdgeId) -> u32 {
        self.edges[edge]
            .members
            .iter()
            .map(|&m| u32::from(self.nodes[m].weight()))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HypergraphViolation {
    Regularity { node: NodeId, degree: usize },
    Cardinality { edge: EdgeId, expected: u32, actual: u32 },
    NotTerminal { edge: EdgeId },
    UnsupportedLabel { edge: EdgeId },
    RepeatedMember { edge: EdgeId, node: NodeId },
    MissingNode { edge: EdgeId, node: NodeId },
}

impl fmt::Display for HypergraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypergraphViolation::Regularity { node, degree } => {
                write!(f, "node {node} has degree {degree}")
            }
            HypergraphViolation::Cardinality { edge, expected, actual } => {
                write!(f, "hyperedge {edge} has cardinality {actual}, expected {expected}")
            }
            HypergraphViolation::NotTerminal { edge } => write!(f, "hyperedge {edge} is not terminal"),
            HypergraphViolation::UnsupportedLabel { edge } => {
                write!(f, "hyperedge {edge} has an unsupported atom label")
            }
            HypergraphViolation::RepeatedMember { edge, node } => {
                write!(f, "node {node} repeated in hyperedge {edge}")
            }
            HypergraphViolation::MissingNode { edge, node } => {
                write!(f, "hyperedge {edge} references missing node {node}")
            }
        }
    }
}

/// Checks 2-regularity, weighted cardinality and that every label is terminal.
pub fn check_molecular_hypergraph(h: &Hypergraph) -> Vec<HypergraphViolation> {
    let mut out = Vec::new();
    let mut degree = vec![0usize; h.nodes.len()];
    for (ei, e) in h.edges.iter().enumerate() {
        let mut seen = Vec::with_capacity(e.members.len());
        for &m in &e.members {
            if m >= h.nodes.len() {
                out.push(HypergraphViolation::MissingNode { edge: ei, node: m });
                continue;
            }
            if seen.contains(&m) {
                out.push(HypergraphViolation::RepeatedMember { edge: ei, node: m });
            }
            seen.push(m);
            degree[m] += 1;
        }
        match &e.label {
            HyperedgeLabel::Terminal(atom) => match heavy_degree_target(atom) {
                Ok(target) => {
                    let actual: u32 = e
                        .members
                        .iter()
                        .filter(|&&m| m < h.nodes.len())
                        .map(|&m| u32::from(h.nodes[m].weight()))
                        .sum();
                    if actual != u32::from(target) {
                        out.push(HypergraphViolation::Cardinality {
                            edge: ei,
                            expected: u32::from(target),
                            actual,
                        });
                    }
                }
                Err(_) => out.push(HypergraphViolation::UnsupportedLabel { edge: ei }),
            },
            _ => out.push(HypergraphViolation::NotTerminal { edge: ei }),
        }
    }
    for (node, &d) in degree.iter().enumerate() {
        if d != 2 {
            out.push(HypergraphViolation::Regularity { node, degree: d });
        }
    }
    out
}

/// A hypergraph known to satisfy [`check_molecular_hypergraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolecularHypergraph(Hypergraph);

impl MolecularHypergraph {
    pub fn new(h: Hypergraph) -> Result<MolecularHypergraph, HypergraphError> {
        let v = check_molecular_hypergraph(&h);
        if v.is_empty() {
            Ok(MolecularHypergraph(h))
        } else {
            Err(HypergraphError::NotMolecular(
                v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
            ))
        }
    }

    pub fn as_hypergraph(&self) -> &Hypergraph {
        &self.0
    }

    pub fn into_inner(self) -> Hypergraph {
        self.0
    }

    pub fn atom_label(&self, edge: EdgeId) -> &AtomLabel {
        match &self.0.edges[edge].label {
            HyperedgeLabel::Terminal(a) => a,
            _ => unreachable!("molecular hypergraphs are terminal"),
        }
    }
}

impl std::ops::Deref for MolecularHypergraph {
    type Target = Hypergraph;

    fn deref(&self) -> &Hypergraph {
        &self.0
    }
}

/// Bonds become nodes, atoms become hyperedges over their bonds.
pub fn enc_h(g: &MolecularGraph) -> Result<MolecularHypergraph, HypergraphError> {
    if g.bond_count() == 0 {
        return Err(HypergraphError::EmptyBondSet);
    }
    let violations = check_molecular_graph(g);
    if !violations.is_empty() {
        return Err(HypergraphError::InvalidGraph(
            violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        ));
    }
    let mut h = Hypergraph::new();
    for b in g.bonds() {
        h.add_node(b.label);
    }
    for (atom, label) in g.atoms().iter().enumerate() {
        let mut members: Vec<NodeId> = g.neighbors(atom).iter().map(|&(_, e)| e).collect();
        members.sort_unstable();
        h.add_edge(HyperedgeLabel::Terminal(*label), members)
            .map_err(|_| HypergraphError::EmptyBondSet)?;
    }
    MolecularHypergraph::new(h)
}

/// Inverse of [`enc_h`]: each degree-2 node becomes a bond between its two atoms.
pub fn dec_h(h: &Hypergraph) -> Result<MolecularGraph, HypergraphError> {
    if let Some(v) = check_molecular_hypergraph(h).into_iter().next() {
        return Err(match v {
            HypergraphViolation::Regularity { node, degree } => HypergraphError::NotTwoRegular { node, degree },
            HypergraphViolation::Cardinality { edge, expected, actual } => {
                HypergraphError::CardinalityMismatch { edge, expected, actual }
            }
            other => HypergraphError::NotMolecular(other.to_string()),
        });
    }
    let mut g = MolecularGraph::new();
    for e in &h.edges {
        match &e.label {
            HyperedgeLabel::Terminal(a) => g.add_atom(*a),
            _ => unreachable!("checked terminal"),
        };
    }
    for (node, inc) in h.incidence().into_iter().enumerate() {
        g.add_bond(inc[0], inc[1], h.nodes[node])
            .map_err(|e| HypergraphError::NotSimple(e.to_string()))?;
    }
    Ok(g)
}
