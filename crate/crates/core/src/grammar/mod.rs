//! Hyperedge replacement rules, grammars and leftmost derivation.

mod canon;
mod parse_tree;
mod sample;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{EdgeId, Hyperedge, HyperedgeLabel, Hypergraph, HypergraphError, MolecularHypergraph, NodeId};

pub use canon::{canonical_key, canonical_ranks, canonicalize, label_bytes, orient_nonterminals, CanonicalRanks, CanonicalRule};
pub use parse_tree::{ParseNode, ParseTree};
pub use sample::{sample_derivation, sample_from, Sampler, SamplerConfig};

pub type RuleId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("rule lhs {expected} does not match occurrence label {found}")]
    LabelMismatch { expected: HyperedgeLabel, found: HyperedgeLabel },
    #[error("hyperedge {0} is not a non-terminal of the hypergraph")]
    OccurrenceNotFound(EdgeId),
    #[error("invalid parse sequence at position {position}: {reason}")]
    InvalidSequence { position: usize, reason: &'static str },
    #[error("derived hypergraph is not molecular: {0}")]
    NotMolecular(HypergraphError),
    #[error("unknown rule id {0}")]
    UnknownRule(RuleId),
    #[error("no derivation fits in {max} expansions (at least {needed} needed)")]
    BudgetExceeded { needed: usize, max: usize },
    #[error("malformed rule: {0}")]
    InvalidRule(&'static str),
    #[error("stored key of rule {0} does not match its canonical form")]
    KeyMismatch(RuleId),
}

/// A production rule `lhs -> rhs`. The i-th external node of the rhs is glued
/// to the i-th member of the replaced hyperedge; non-terminals are expanded
/// in `nonterminal_order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductionRule {
    lhs: HyperedgeLabel,
    rhs: Hypergraph,
    external_nodes: Vec<NodeId>,
    nonterminal_order: Vec<EdgeId>,
}

impl ProductionRule {
    pub fn new(
        lhs: HyperedgeLabel,
        rhs: Hypergraph,
        external_nodes: Vec<NodeId>,
        nonterminal_order: Vec<EdgeId>,
    ) -> Result<ProductionRule, GrammarError> {
        match &lhs {
            HyperedgeLabel::Terminal(_) => return Err(GrammarError::InvalidRule("terminal lhs")),
            HyperedgeLabel::Start if !external_nodes.is_empty() => {
                return Err(GrammarError::InvalidRule("start rule with external nodes"))
            }
            HyperedgeLabel::NonTerminal(nt) => {
                if nt.rank() != external_nodes.len() {
                    return Err(GrammarError::InvalidRule("external node count differs from lhs rank"));
                }
                for (label, &x) in nt.node_labels.iter().zip(&external_nodes) {
                    if rhs.nodes.get(x) != Some(label) {
                        return Err(GrammarError::InvalidRule("external node label differs from lhs"));
                    }
                }
            }
            HyperedgeLabel::Start => {}
        }
        let mut seen = vec![false; rhs.node_count()];
        for &x in &external_nodes {
            if x >= seen.len() || std::mem::replace(&mut seen[x], true) {
                return Err(GrammarError::InvalidRule("external nodes out of range or repeated"));
            }
        }
        for e in &rhs.edges {
            if e.label == HyperedgeLabel::Start {
                return Err(GrammarError::InvalidRule("start label inside rhs"));
            }
            if e.members.is_empty() || e.members.iter().any(|&m| m >= rhs.node_count()) {
                return Err(GrammarError::InvalidRule("hyperedge member out of range"));
            }
            if let HyperedgeLabel::NonTerminal(nt) = &e.label {
                if nt.rank() != e.members.len() || nt.node_labels.iter().zip(&e.members).any(|(l, &m)| rhs.nodes[m] != *l) {
                    return Err(GrammarError::InvalidRule("non-terminal label inconsistent with members"));
                }
            }
        }
        let mut nts: Vec<EdgeId> = (0..rhs.edge_count()).filter(|&e| rhs.edges[e].label.is_nonterminal()).collect();
        let mut order = nonterminal_order.clone();
        order.sort_unstable();
        nts.sort_unstable();
        if order != nts {
            return Err(GrammarError::InvalidRule("nonterminal_order is not a permutation of the rhs non-terminals"));
        }
        Ok(ProductionRule { lhs, rhs, external_nodes, nonterminal_order })
    }

    pub fn lhs(&self) -> &HyperedgeLabel {
        &self.lhs
    }

    pub fn rhs(&self) -> &Hypergraph {
        &self.rhs
    }

    pub fn external_nodes(&self) -> &[NodeId] {
        &self.external_nodes
    }

    pub fn nonterminal_order(&self) -> &[EdgeId] {
        &self.nonterminal_order
    }

    pub fn is_start(&self) -> bool {
        self.lhs == HyperedgeLabel::Start
    }

    /// Labels of the rhs non-terminals in expansion order.
    pub fn nonterminals(&self) -> impl Iterator<Item = &HyperedgeLabel> + '_ {
        self.nonterminal_order.iter().map(|&e| &self.rhs.edges[e].label)
    }

    pub fn nonterminal_count(&self) -> usize {
        self.nonterminal_order.len()
    }

    pub fn internal_node_count(&self) -> usize {
        self.rhs.node_count() - self.external_nodes.len()
    }
}

/// Replaces non-terminal `occurrence` of `h` by `rule.rhs`. The new edges take
/// the occurrence's position: terminals first, then non-terminals in
/// expansion order.
pub fn apply_rule(h: &Hypergraph, occurrence: EdgeId, rule: &ProductionRule) -> Result<Hypergraph, GrammarError> {
    let mut out = h.clone();
    apply_in_place(&mut out, occurrence, rule)?;
    Ok(out)
}

fn apply_in_place(h: &mut Hypergraph, occurrence: EdgeId, rule: &ProductionRule) -> Result<(), GrammarError> {
    let occ = match h.edges.get(occurrence) {
        Some(e) if e.label.is_nonterminal() => e,
        _ => return Err(GrammarError::OccurrenceNotFound(occurrence)),
    };
    if occ.label != rule.lhs {
        return Err(GrammarError::LabelMismatch { expected: rule.lhs.clone(), found: occ.label.clone() });
    }
    let occ = h.edges.remove(occurrence);
    let glued = splice_nodes(h, rule, &occ.members);
    h.edges.splice(occurrence..occurrence, glued);
    Ok(())
}

/// Adds internal nodes of the rhs to `h` and returns the rhs edges rewritten
/// to `h` node ids, in splice order.
fn splice_nodes(h: &mut Hypergraph, rule: &ProductionRule, attach: &[NodeId]) -> Vec<Hyperedge> {
    let mut map = vec![usize::MAX; rule.rhs.node_count()];
    for (&x, &target) in rule.external_nodes.iter().zip(attach) {
        map[x] = target;
    }
    for (x, label) in rule.rhs.nodes.iter().enumerate() {
        if map[x] == usize::MAX {
            map[x] = h.add_node(*label);
        }
    }
    let rewrite = |e: &Hyperedge| Hyperedge { label: e.label.clone(), members: e.members.iter().map(|&m| map[m]).collect() };
    let terminals = rule.rhs.edges.iter().filter(|e| e.label.is_terminal()).map(rewrite);
    let nts = rule.nonterminal_order.iter().map(|&e| rewrite(&rule.rhs.edges[e]));
    terminals.chain(nts).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParseSequence(pub Vec<RuleId>);

impl ParseSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RuleId> {
        self.0.iter()
    }
}

impl From<Vec<RuleId>> for ParseSequence {
    fn from(v: Vec<RuleId>) -> Self {
        ParseSequence(v)
    }
}

/// A set of canonical production rules, deduplicated by canonical key.
#[derive(Debug, Clone, Default)]
pub struct MHG {
    rules: Vec<ProductionRule>,
    keys: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, RuleId>,
    by_lhs: BTreeMap<HyperedgeLabel, Vec<RuleId>>,
}

impl MHG {
    pub fn new() -> MHG {
        MHG::default()
    }

    /// Rebuilds a grammar from stored rules, checking that every rule is in
    /// canonical form and matches its key.
    pub fn from_canonical_rules(rules: Vec<(ProductionRule, Vec<u8>)>) -> Result<MHG, GrammarError> {
        let mut g = MHG::new();
        for (id, (rule, key)) in rules.into_iter().enumerate() {
            // deserialized rules bypass `new`
            ProductionRule::new(rule.lhs.clone(), rule.rhs.clone(), rule.external_nodes.clone(), rule.nonterminal_order.clone())?;
            let canon = canonicalize(&rule);
            if canon.key != key || canon.rule != rule || g.index.contains_key(&key) {
                return Err(GrammarError::KeyMismatch(id));
            }
            g.push(rule, key);
        }
        Ok(g)
    }

    fn push(&mut self, rule: ProductionRule, key: Vec<u8>) -> RuleId {
        let id = self.rules.len();
        self.by_lhs.entry(rule.lhs.clone()).or_default().push(id);
        self.index.insert(key.clone(), id);
        self.keys.push(key);
        self.rules.push(rule);
        id
    }

    /// Canonicalizes and adds `rule` unless an isomorphic rule is present.
    /// Returns the rule id and, for each canonical non-terminal position, the
    /// position it had in `rule`.
    pub fn insert(&mut self, rule: &ProductionRule) -> (RuleId, Vec<usize>) {
        let canon = canonicalize(rule);
        let id = match self.index.get(&canon.key) {
            Some(&id) => id,
            None => self.push(canon.rule, canon.key),
        };
        (id, canon.source_position)
    }

    /// Looks up a rule isomorphic to `rule`, with the non-terminal mapping of
    /// [`MHG::insert`].
    pub fn lookup(&self, rule: &ProductionRule) -> Option<(RuleId, Vec<usize>)> {
        let canon = canonicalize(rule);
        self.index.get(&canon.key).map(|&id| (id, canon.source_position))
    }

    pub fn id_of_key(&self, key: &[u8]) -> Option<RuleId> {
        self.index.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rule(&self, id: RuleId) -> Option<&ProductionRule> {
        self.rules.get(id)
    }

    pub fn rules(&self) -> &[ProductionRule] {
        &self.rules
    }

    pub fn key(&self, id: RuleId) -> &[u8] {
        &self.keys[id]
    }

    pub fn rules_for(&self, label: &HyperedgeLabel) -> &[RuleId] {
        self.by_lhs.get(label).map_or(&[], Vec::as_slice)
    }

    pub fn start_rules(&self) -> &[RuleId] {
        self.rules_for(&HyperedgeLabel::Start)
    }

    /// All left-hand-side labels, `Start` first.
    pub fn lhs_labels(&self) -> impl Iterator<Item = &HyperedgeLabel> + '_ {
        self.by_lhs.keys()
    }

    /// Non-terminal labels used in some rhs but rewritten by no rule.
    pub fn missing_labels(&self) -> Vec<HyperedgeLabel> {
        let mut out: Vec<_> = self
            .rules
            .iter()
            .flat_map(ProductionRule::nonterminals)
            .filter(|l| !self.by_lhs.contains_key(*l))
            .cloned()
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Replays `seq` by leftmost derivation.
    pub fn derive_hypergraph(&self, seq: &ParseSequence) -> Result<Hypergraph, GrammarError> {
        let mut ids = seq.iter().enumerate();
        let first = match ids.next() {
            Some((_, &id)) => self.rule(id).ok_or(GrammarError::UnknownRule(id))?,
            None => return Err(GrammarError::InvalidSequence { position: 0, reason: "empty sequence" }),
        };
        if !first.is_start() {
            return Err(GrammarError::InvalidSequence { position: 0, reason: "first rule is not a start rule" });
        }
        let mut h = Hypergraph::new();
        let edges = splice_nodes(&mut h, first, &[]);
        h.edges = edges;
        for (position, &id) in ids {
            let rule = self.rule(id).ok_or(GrammarError::UnknownRule(id))?;
            let occ = h
                .first_nonterminal()
                .ok_or(GrammarError::InvalidSequence { position, reason: "no non-terminal left to expand" })?;
            if h.edges[occ].label != rule.lhs {
                return Err(GrammarError::InvalidSequence { position, reason: "rule lhs differs from leftmost non-terminal" });
            }
            apply_in_place(&mut h, occ, rule)?;
        }
        if !h.is_terminal() {
            return Err(GrammarError::InvalidSequence { position: seq.len(), reason: "non-terminals remain" });
        }
        Ok(h)
    }

    /// Replays `seq` and checks the result is a molecular hypergraph.
    pub fn derive(&self, seq: &ParseSequence) -> Result<MolecularHypergraph, GrammarError> {
        MolecularHypergraph::new(self.derive_hypergraph(seq)?).map_err(GrammarError::NotMolecular)
    }
}

/// Free-function form of [`MHG::derive`].
pub fn derive(mhg: &MHG, seq: &ParseSequence) -> Result<MolecularHypergraph, GrammarError> {
    mhg.derive(seq)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::hypergraph::NonTerminal;
    use crate::molgraph::{AtomLabel, BondLabel, Element};

    pub(crate) fn methyl() -> HyperedgeLabel {
        HyperedgeLabel::Terminal(AtomLabel::new(Element::C, 0, 3).unwrap())
    }

    pub(crate) fn nt_single() -> HyperedgeLabel {
        HyperedgeLabel::NonTerminal(NonTerminal::new(vec![BondLabel::SINGLE]))
    }

    /// S -> CH3-[N], N -> CH3 and N -> CH2-[N]: the linear alkanes.
    pub(crate) fn alkane_grammar() -> MHG {
        let ch2 = HyperedgeLabel::Terminal(AtomLabel::new(Element::C, 0, 2).unwrap());
        let mut g = MHG::new();

        let mut s = Hypergraph::new();
        s.add_node(BondLabel::SINGLE);
        s.add_edge(methyl(), vec![0]).unwrap();
        s.add_edge(nt_single(), vec![0]).unwrap();
        g.insert(&ProductionRule::new(HyperedgeLabel::Start, s, vec![], vec![1]).unwrap());

        let mut end = Hypergraph::new();
        end.add_node(BondLabel::SINGLE);
        end.add_edge(methyl(), vec![0]).unwrap();
        g.insert(&ProductionRule::new(nt_single(), end, vec![0], vec![]).unwrap());

        let mut grow = Hypergraph::new();
        grow.add_node(BondLabel::SINGLE);
        grow.add_node(BondLabel::SINGLE);
        grow.add_edge(ch2, vec![0, 1]).unwrap();
        grow.add_edge(nt_single(), vec![1]).unwrap();
        g.insert(&ProductionRule::new(nt_single(), grow, vec![0], vec![1]).unwrap());
        g
    }

    fn id_where(g: &MHG, f: impl Fn(&ProductionRule) -> bool) -> RuleId {
        (0..g.len()).find(|&i| f(g.rule(i).unwrap())).unwrap()
    }

    #[test]
    fn rule_validation() {
        let mut r = Hypergraph::new();
        r.add_node(BondLabel::DOUBLE);
        r.add_edge(methyl(), vec![0]).unwrap();
        assert!(ProductionRule::new(nt_single(), r.clone(), vec![0], vec![]).is_err());
        assert!(ProductionRule::new(HyperedgeLabel::Start, r.clone(), vec![0], vec![]).is_err());
        assert!(ProductionRule::new(HyperedgeLabel::Start, r, vec![], vec![0]).is_err());
    }

    #[test]
    fn derive_propane_and_butane() {
        let g = alkane_grammar();
        let start = g.start_rules()[0];
        let end = id_where(&g, |r| !r.is_start() && r.nonterminal_count() == 0);
        let grow = id_where(&g, |r| !r.is_start() && r.nonterminal_count() == 1);
        let ethane = g.derive(&vec![start, end].into()).unwrap();
        assert_eq!((ethane.node_count(), ethane.edge_count()), (1, 2));
        let butane = g.derive(&vec![start, grow, grow, end].into()).unwrap();
        assert_eq!((butane.node_count(), butane.edge_count()), (3, 4));
    }

    #[test]
    fn invalid_sequences() {
        let g = alkane_grammar();
        let start = g.start_rules()[0];
        let end = id_where(&g, |r| !r.is_start() && r.nonterminal_count() == 0);
        let bad = |s: Vec<RuleId>| matches!(g.derive(&s.into()), Err(GrammarError::InvalidSequence { .. }));
        assert!(bad(vec![]));
        assert!(bad(vec![end]));
        assert!(bad(vec![start]));
        assert!(bad(vec![start, end, end]));
        assert!(bad(vec![start, start]));
        assert!(matches!(g.derive(&vec![start, 99].into()), Err(GrammarError::UnknownRule(99))));
    }

    #[test]
    fn apply_rule_is_local() {
        let g = alkane_grammar();
        let grow = id_where(&g, |r| !r.is_start() && r.nonterminal_count() == 1);
        let mut h = Hypergraph::new();
        h.add_node(BondLabel::SINGLE);
        h.add_edge(methyl(), vec![0]).unwrap();
        h.add_edge(nt_single(), vec![0]).unwrap();
        let before = h.degrees();
        let out = apply_rule(&h, 1, g.rule(grow).unwrap()).unwrap();
        let rule = g.rule(grow).unwrap();
        assert_eq!(out.node_count(), h.node_count() + rule.internal_node_count());
        assert_eq!(out.nonterminal_count(), h.nonterminal_count() - 1 + rule.nonterminal_count());
        assert_eq!(out.degrees()[0], before[0]);
        assert!(matches!(apply_rule(&h, 0, rule), Err(GrammarError::OccurrenceNotFound(0))));
        assert!(matches!(apply_rule(&h, 7, rule), Err(GrammarError::OccurrenceNotFound(7))));
    }

    #[test]
    fn label_mismatch_rejected() {
        let g = alkane_grammar();
        let mut h = Hypergraph::new();
        h.add_node(BondLabel::DOUBLE);
        h.add_edge(HyperedgeLabel::NonTerminal(NonTerminal::new(vec![BondLabel::DOUBLE])), vec![0]).unwrap();
        let end = id_where(&g, |r| !r.is_start() && r.nonterminal_count() == 0);
        assert!(matches!(apply_rule(&h, 0, g.rule(end).unwrap()), Err(GrammarError::LabelMismatch { .. })));
    }

    #[test]
    fn insert_deduplicates() {
        let mut g = alkane_grammar();
        let n = g.len();
        let mut end = Hypergraph::new();
        end.add_node(BondLabel::SINGLE);
        end.add_edge(methyl(), vec![0]).unwrap();
        g.insert(&ProductionRule::new(nt_single(), end, vec![0], vec![]).unwrap());
        assert_eq!(g.len(), n);
        assert!(g.missing_labels().is_empty());
    }

    #[test]
    fn reload_checks_keys() {
        let g = alkane_grammar();
        let stored: Vec<_> = (0..g.len()).map(|i| (g.rule(i).unwrap().clone(), g.key(i).to_vec())).collect();
        let back = MHG::from_canonical_rules(stored.clone()).unwrap();
        assert_eq!(back.len(), g.len());
        let mut broken = stored;
        broken[0].1[0] ^= 1;
        assert!(matches!(MHG::from_canonical_rules(broken), Err(GrammarError::KeyMismatch(0))));
    }
}
