//! Grammar inference from tree decompositions, encoding, and grammar statistics.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::grammar::{canonical_ranks, orient_nonterminals, ParseSequence, ProductionRule, RuleId, MHG};
use crate::hypergraph::{EdgeId, Hyperedge, HyperedgeLabel, Hypergraph, MolecularHypergraph, NodeId, NonTerminal};
use crate::treedecomp::{decompose_ranked, default_root, TreeDecomposition, TreeNodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("molecule needs a rule the grammar lacks (bag {bag}, lhs {lhs})")]
    NotInLanguage { bag: TreeNodeId, lhs: HyperedgeLabel },
}

/// Builds the rule of bag `t`: its nodes and hyperedges, `external` (the
/// nodes shared with the parent, in the parent's order) and one non-terminal
/// per child over the nodes shared with that child. Child interfaces start
/// ordered by bond label, then `node_rank`, and are then reoriented with
/// [`orient_nonterminals`] so the order among equal-label nodes depends only
/// on the rule. Non-terminals follow the tree's child order. Also returns
/// each child's interface in `h`'s node ids, in the order the rule uses.
pub fn extract_rule(
    td: &TreeDecomposition,
    t: TreeNodeId,
    h: &Hypergraph,
    external: &[NodeId],
    node_rank: &[usize],
) -> (ProductionRule, Vec<Vec<NodeId>>) {
    let bag = &td.bags[t];
    let local: Vec<NodeId> = bag.nodes.iter().copied().collect();
    let id_of = |v: NodeId| local.binary_search(&v).expect("shared node in bag");
    let mut rhs = Hypergraph::new();
    for &v in &local {
        rhs.add_node(h.nodes[v]);
    }
    for &e in &bag.edges {
        let edge = &h.edges[e];
        rhs.edges.push(Hyperedge { label: edge.label.clone(), members: edge.members.iter().map(|&v| id_of(v)).collect() });
    }
    let nt_label = |shared: &[NodeId]| HyperedgeLabel::NonTerminal(NonTerminal::new(shared.iter().map(|&v| h.nodes[v]).collect()));
    let mut nonterminal_order = Vec::new();
    for &c in &bag.children {
        let mut shared: Vec<NodeId> = bag.nodes.intersection(&td.bags[c].nodes).copied().collect();
        shared.sort_by_key(|&v| (h.nodes[v], node_rank[v]));
        nonterminal_order.push(rhs.edges.len());
        rhs.edges.push(Hyperedge { label: nt_label(&shared), members: shared.iter().map(|&v| id_of(v)).collect() });
    }
    let lhs = match bag.parent {
        None => HyperedgeLabel::Start,
        Some(_) => nt_label(external),
    };
    let ext = external.iter().map(|&v| id_of(v)).collect();
    let rule = orient_nonterminals(&ProductionRule::new(lhs, rhs, ext, nonterminal_order).expect("bag rules are well formed"));
    let interfaces = rule.nonterminal_order().iter().map(|&e| rule.rhs().edges[e].members.iter().map(|&i| local[i]).collect()).collect();
    (rule, interfaces)
}

/// External nodes of the rhs have degree one, internal nodes degree two.
pub fn check_condition1(rule: &ProductionRule) -> bool {
    let degrees = rule.rhs().degrees();
    let external: BTreeSet<NodeId> = rule.external_nodes().iter().copied().collect();
    degrees.iter().enumerate().all(|(v, &d)| d == if external.contains(&v) { 1 } else { 2 })
}

/// Walks the decomposition in pre-order, resolving each bag's rule with
/// `resolve` and ordering children as the resolved rule expands them.
fn sequence_of(
    td: &TreeDecomposition,
    h: &Hypergraph,
    node_rank: &[usize],
    mut resolve: impl FnMut(TreeNodeId, &ProductionRule) -> Result<(RuleId, Vec<usize>), InferenceError>,
) -> Result<ParseSequence, InferenceError> {
    let mut seq = Vec::with_capacity(td.len());
    let mut stack = vec![(td.root, Vec::new())];
    while let Some((t, external)) = stack.pop() {
        let (rule, mut interfaces) = extract_rule(td, t, h, &external, node_rank);
        let (id, source_position) = resolve(t, &rule)?;
        seq.push(id);
        let children = &td.bags[t].children;
        stack.extend(source_position.iter().rev().map(|&p| (children[p], std::mem::take(&mut interfaces[p]))));
    }
    Ok(ParseSequence(seq))
}

/// Infers a grammar and the parse sequence of every input.
pub fn infer(hypergraphs: &[MolecularHypergraph]) -> (MHG, Vec<ParseSequence>) {
    let mut mhg = MHG::new();
    let seqs = hypergraphs.iter().map(|h| add_molecule(&mut mhg, h)).collect();
    (mhg, seqs)
}

/// Adds the rules of one molecule to `mhg` and returns its parse sequence.
pub fn add_molecule(mhg: &mut MHG, h: &MolecularHypergraph) -> ParseSequence {
    let ranks = canonical_ranks(h.as_hypergraph());
    let td = decompose_ranked(h, &ranks, None);
    sequence_of(&td, h, &ranks.nodes, |_, rule| Ok(mhg.insert(rule))).expect("insertion cannot fail")
}

/// Parse sequence of `h` under `mhg`. The decomposition rooted as in
/// training is tried first, then the one rooted at every other hyperedge in
/// canonical order; the first whose rules are all in the grammar wins. The
/// error reports the first missing rule of the default decomposition.
pub fn encode(mhg: &MHG, h: &MolecularHypergraph) -> Result<ParseSequence, InferenceError> {
    let hg = h.as_hypergraph();
    let ranks = canonical_ranks(hg);
    let first = default_root(hg, &ranks);
    let attempt = |root| {
        let td = decompose_ranked(h, &ranks, Some(root));
        sequence_of(&td, h, &ranks.nodes, |t, rule| {
            mhg.lookup(rule).ok_or_else(|| InferenceError::NotInLanguage { bag: t, lhs: rule.lhs().clone() })
        })
    };
    let err = match attempt(first) {
        Ok(seq) => return Ok(seq),
        Err(e) => e,
    };
    let mut others: Vec<EdgeId> = (0..hg.edge_count()).filter(|&e| e != first).collect();
    others.sort_by_key(|&e| ranks.edges[e]);
    others.into_iter().find_map(|e| attempt(e).ok()).ok_or(err)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrammarStats {
    pub total_rules: usize,
    pub start_rules: usize,
    pub train_molecules: usize,
    pub mean_rules_per_molecule: f64,
    pub heldout_total: usize,
    pub heldout_parsed: usize,
    /// Fraction of held-out molecules that encode; 1.0 when there are none.
    pub coverage: f64,
    pub coverage_vacuous: bool,
    /// Uses of each rule id across the training parse sequences.
    pub rule_frequency: Vec<usize>,
}

pub fn grammar_stats(mhg: &MHG, train: &[MolecularHypergraph], heldout: &[MolecularHypergraph]) -> GrammarStats {
    let mut rule_frequency = vec![0; mhg.len()];
    let mut total_len = 0usize;
    let mut encoded = 0usize;
    for h in train {
        if let Ok(seq) = encode(mhg, h) {
            encoded += 1;
            total_len += seq.len();
            for &r in seq.iter() {
                rule_frequency[r] += 1;
            }
        }
    }
    let heldout_parsed = heldout.iter().filter(|h| encode(mhg, h).is_ok()).count();
    let coverage_vacuous = heldout.is_empty();
    GrammarStats {
        total_rules: mhg.len(),
        start_rules: mhg.start_rules().len(),
        train_molecules: train.len(),
        mean_rules_per_molecule: if encoded == 0 { 0.0 } else { total_len as f64 / encoded as f64 },
        heldout_total: heldout.len(),
        heldout_parsed,
        coverage: if coverage_vacuous { 1.0 } else { heldout_parsed as f64 / heldout.len() as f64 },
        coverage_vacuous,
        rule_frequency,
    }
}
