use std::ops::Range;

use crate::hypergraph::HyperedgeLabel;

use super::{GrammarError, ParseSequence, RuleId, MHG};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseNode {
    pub rule: RuleId,
    /// Label this node rewrites (`Start` at the root).
    pub label: HyperedgeLabel,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// One past the last sequence position of the subtree.
    pub end: usize,
}

/// Parse tree of a sequence. Node `i` is the rule at sequence position `i`,
/// so the subtree of `i` occupies positions `i..nodes[i].end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    pub nodes: Vec<ParseNode>,
}

impl ParseTree {
    pub fn build(mhg: &MHG, seq: &ParseSequence) -> Result<ParseTree, GrammarError> {
        let mut tree = ParseTree { nodes: Vec::with_capacity(seq.len()) };
        if seq.is_empty() {
            return Err(GrammarError::InvalidSequence { position: 0, reason: "empty sequence" });
        }
        let end = tree.visit(mhg, seq, 0, HyperedgeLabel::Start, None)?;
        if end != seq.len() {
            return Err(GrammarError::InvalidSequence { position: end, reason: "rules after the derivation completed" });
        }
        Ok(tree)
    }

    fn visit(
        &mut self,
        mhg: &MHG,
        seq: &ParseSequence,
        pos: usize,
        label: HyperedgeLabel,
        parent: Option<usize>,
    ) -> Result<usize, GrammarError> {
        let &id = seq
            .0
            .get(pos)
            .ok_or(GrammarError::InvalidSequence { position: pos, reason: "sequence ends with non-terminals pending" })?;
        let rule = mhg.rule(id).ok_or(GrammarError::UnknownRule(id))?;
        if *rule.lhs() != label {
            return Err(GrammarError::InvalidSequence { position: pos, reason: "rule lhs differs from leftmost non-terminal" });
        }
        self.nodes.push(ParseNode { rule: id, label, parent, children: Vec::new(), end: pos + 1 });
        let mut next = pos + 1;
        for child in rule.nonterminals() {
            self.nodes[pos].children.push(next);
            next = self.visit(mhg, seq, next, child.clone(), Some(pos))?;
        }
        self.nodes[pos].end = next;
        Ok(next)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn subtree(&self, i: usize) -> Range<usize> {
        i..self.nodes[i].end
    }

    pub fn depth(&self, mut i: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.nodes[i].parent {
            d += 1;
            i = p;
        }
        d
    }

    pub fn height(&self) -> usize {
        (0..self.len()).map(|i| self.depth(i)).max().map_or(0, |d| d + 1)
    }
}
