//! Parse-tree subtree resampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grammar::{GrammarError, ParseSequence, ParseTree, Sampler, SamplerConfig, MHG};

/// Replaces the subtree of a uniformly chosen parse-tree node (root
/// included) by a fresh derivation of the same label.
pub fn mutate_with(sampler: &Sampler<'_>, mhg: &MHG, seq: &ParseSequence, rng: &mut impl Rng) -> Result<ParseSequence, GrammarError> {
    let tree = ParseTree::build(mhg, seq)?;
    let i = rng.random_range(0..tree.len());
    let range = tree.subtree(i);
    let outside = seq.len() - range.len();
    let budget = sampler.config().max_expansions.saturating_sub(outside).max(range.len());
    let sub = sampler.sample_from(&tree.nodes[i].label, budget, rng)?;
    let mut out = Vec::with_capacity(outside + sub.len());
    out.extend_from_slice(&seq.0[..range.start]);
    out.extend_from_slice(&sub.0);
    out.extend_from_slice(&seq.0[range.end..]);
    Ok(ParseSequence(out))
}

pub fn mutate(seq: &ParseSequence, mhg: &MHG, seed: u64) -> Result<ParseSequence, GrammarError> {
    let sampler = Sampler::new(mhg, SamplerConfig::default());
    mutate_with(&sampler, mhg, seq, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::tests::alkane_grammar;
    use crate::grammar::ProductionRule;
    use crate::hypergraph::{HyperedgeLabel, Hypergraph};
    use crate::molgraph::{AtomLabel, BondLabel, Element};

    #[test]
    fn mutations_replay() {
        let g = alkane_grammar();
        let start = g.start_rules()[0];
        let grow = (0..g.len()).find(|&i| g.rule(i).unwrap().nonterminal_count() == 1 && !g.rule(i).unwrap().is_start()).unwrap();
        let end = (0..g.len()).find(|&i| g.rule(i).unwrap().nonterminal_count() == 0).unwrap();
        let seq: ParseSequence = vec![start, grow, grow, end].into();
        let mut distinct = std::collections::BTreeSet::new();
        for seed in 0..100 {
            let m = mutate(&seq, &g, seed).unwrap();
            g.derive(&m).unwrap();
            distinct.insert(m);
        }
        assert!(distinct.len() > 1);
    }

    #[test]
    fn single_rule_grammar_is_fixed() {
        let mut h = Hypergraph::new();
        h.add_node(BondLabel::SINGLE);
        let f = HyperedgeLabel::Terminal(AtomLabel::new(Element::F, 0, 0).unwrap());
        h.add_edge(f.clone(), vec![0]).unwrap();
        h.add_edge(f, vec![0]).unwrap();
        let mut g = MHG::new();
        let (id, _) = g.insert(&ProductionRule::new(HyperedgeLabel::Start, h, vec![], vec![]).unwrap());
        let seq: ParseSequence = vec![id].into();
        assert_eq!(mutate(&seq, &g, 3).unwrap(), seq);
    }
}
