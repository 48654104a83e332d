//! Uniform rule sampling with guaranteed termination.
//!
//! Every label gets a minimal completion cost (fewest rule applications to an
//! all-terminal result) and a minimal height. A rule is only eligible when the
//! expansions already made, the cost of the rule and the minimal cost of all
//! pending non-terminals fit in the budget. Past the depth threshold only
//! rules whose children are strictly lower than their lhs are eligible.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypergraph::HyperedgeLabel;

use super::{GrammarError, ParseSequence, RuleId, MHG};

const UNREACHABLE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub max_expansions: usize,
    pub depth_threshold: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { max_expansions: 500, depth_threshold: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct Sampler<'a> {
    mhg: &'a MHG,
    config: SamplerConfig,
    label_cost: HashMap<HyperedgeLabel, usize>,
    label_height: HashMap<HyperedgeLabel, usize>,
    rule_cost: Vec<usize>,
    rule_height: Vec<usize>,
}

impl<'a> Sampler<'a> {
    pub fn new(mhg: &'a MHG, config: SamplerConfig) -> Sampler<'a> {
        let (label_cost, rule_cost) = fixpoint(mhg, |children| children.iter().try_fold(1usize, |a, &c| a.checked_add(c)));
        let (label_height, rule_height) = fixpoint(mhg, |children| Some(1 + children.iter().copied().max().unwrap_or(0)));
        Sampler { mhg, config, label_cost, label_height, rule_cost, rule_height }
    }

    pub fn config(&self) -> SamplerConfig {
        self.config
    }

    /// Fewest rule applications that rewrite `label` to terminals.
    pub fn min_cost(&self, label: &HyperedgeLabel) -> Option<usize> {
        self.label_cost.get(label).copied().filter(|&c| c != UNREACHABLE)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Result<ParseSequence, GrammarError> {
        self.sample_from(&HyperedgeLabel::Start, self.config.max_expansions, rng)
    }

    /// Samples a derivation of `label` using at most `budget` rules.
    pub fn sample_from(&self, label: &HyperedgeLabel, budget: usize, rng: &mut impl Rng) -> Result<ParseSequence, GrammarError> {
        let needed = self.min_cost(label).unwrap_or(UNREACHABLE);
        if needed > budget {
            return Err(GrammarError::BudgetExceeded { needed, max: budget });
        }
        let mut seq = Vec::new();
        let mut stack = vec![(label.clone(), 0usize)];
        let mut pending = needed;
        let mut candidates = Vec::new();
        while let Some((label, depth)) = stack.pop() {
            let own = self.label_cost[&label];
            pending -= own;
            let slack = budget - seq.len() - pending;
            let height = self.label_height[&label];
            let rules = self.mhg.rules_for(&label);
            candidates.clear();
            candidates.extend(rules.iter().copied().filter(|&r| self.rule_cost[r] <= slack));
            if depth >= self.config.depth_threshold {
                let before = candidates.len();
                candidates.retain(|&r| self.rule_height[r] == height);
                if candidates.is_empty() && before > 0 {
                    candidates.extend(rules.iter().copied().filter(|&r| self.rule_cost[r] == own));
                }
            }
            let r: RuleId = candidates[rng.random_range(0..candidates.len())];
            seq.push(r);
            let rule = self.mhg.rule(r).expect("rule ids come from the grammar");
            let children: Vec<_> = rule.nonterminals().cloned().collect();
            for child in children.into_iter().rev() {
                pending += self.label_cost[&child];
                stack.push((child, depth + 1));
            }
        }
        Ok(ParseSequence(seq))
    }
}

/// Per-label minimum of `combine` over the rules rewriting it, iterated to a
/// fixed point. Labels without finite value map to `UNREACHABLE`.
fn fixpoint(mhg: &MHG, combine: impl Fn(&[usize]) -> Option<usize>) -> (HashMap<HyperedgeLabel, usize>, Vec<usize>) {
    let mut label_value: HashMap<HyperedgeLabel, usize> = mhg.lhs_labels().map(|l| (l.clone(), UNREACHABLE)).collect();
    for rule in mhg.rules() {
        for l in rule.nonterminals() {
            label_value.entry(l.clone()).or_insert(UNREACHABLE);
        }
    }
    let mut rule_value = vec![UNREACHABLE; mhg.len()];
    loop {
        let mut changed = false;
        for (id, rule) in mhg.rules().iter().enumerate() {
            let children: Vec<usize> = rule.nonterminals().map(|l| label_value[l]).collect();
            let v = if children.contains(&UNREACHABLE) { UNREACHABLE } else { combine(&children).unwrap_or(UNREACHABLE) };
            if v < rule_value[id] {
                rule_value[id] = v;
                let lv = label_value.get_mut(rule.lhs()).expect("lhs registered");
                if v < *lv {
                    *lv = v;
                }
                changed = true;
            }
        }
        if !changed {
            return (label_value, rule_value);
        }
    }
}

/// Samples one derivation from the start symbol with a seeded ChaCha8 stream.
pub fn sample_derivation(mhg: &MHG, seed: u64, max_expansions: usize) -> Result<ParseSequence, GrammarError> {
    let sampler = Sampler::new(mhg, SamplerConfig { max_expansions, ..SamplerConfig::default() });
    sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Samples a derivation of `label` with a fresh sampler.
pub fn sample_from(mhg: &MHG, label: &HyperedgeLabel, budget: usize, rng: &mut impl Rng) -> Result<ParseSequence, GrammarError> {
    Sampler::new(mhg, SamplerConfig { max_expansions: budget, ..SamplerConfig::default() }).sample_from(label, budget, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::tests::{alkane_grammar, nt_single};

    #[test]
    fn costs_of_alkane_grammar() {
        let g = alkane_grammar();
        let s = Sampler::new(&g, SamplerConfig::default());
        assert_eq!(s.min_cost(&nt_single()), Some(1));
        assert_eq!(s.min_cost(&HyperedgeLabel::Start), Some(2));
    }

    #[test]
    fn samples_replay_and_respect_budget() {
        let g = alkane_grammar();
        for seed in 0..200 {
            let seq = sample_derivation(&g, seed, 6).unwrap();
            assert!(seq.len() <= 6);
            g.derive(&seq).unwrap();
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        let g = alkane_grammar();
        assert_eq!(sample_derivation(&g, 42, 100).unwrap(), sample_derivation(&g, 42, 100).unwrap());
    }

    #[test]
    fn budget_too_small() {
        let g = alkane_grammar();
        assert_eq!(sample_derivation(&g, 0, 1), Err(GrammarError::BudgetExceeded { needed: 2, max: 1 }));
    }

    #[test]
    fn depth_threshold_forces_termination() {
        let g = alkane_grammar();
        let s = Sampler::new(&g, SamplerConfig { max_expansions: 10_000, depth_threshold: 3 });
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(s.sample(&mut rng).unwrap().len() <= 4);
        }
    }
}
