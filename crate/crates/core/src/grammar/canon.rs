//! Canonical forms of production rules.
//!
//! A rule is viewed as a colored bipartite graph of rhs nodes and rhs
//! hyperedges. Colors are refined to a stable partition; remaining ties are
//! broken by individualizing each vertex of the first non-singleton cell in
//! turn, and the lexicographically smallest certificate over all branches is
//! the key. Non-terminal members are ordered (incidences carry their
//! position), terminal members are not, and the expansion order of the rhs
//! non-terminals is ignored.

use std::collections::BTreeMap;

use crate::hashing::{atom_label_bytes, bond_label_bytes, Fnv64};
use crate::hypergraph::{EdgeId, Hyperedge, HyperedgeLabel, Hypergraph};

use super::ProductionRule;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalRule {
    pub rule: ProductionRule,
    pub key: Vec<u8>,
    /// For each non-terminal of `rule` in expansion order, its position in
    /// the source rule's expansion order.
    pub source_position: Vec<usize>,
}

pub fn label_bytes(label: &HyperedgeLabel) -> Vec<u8> {
    match label {
        HyperedgeLabel::Start => vec![0],
        HyperedgeLabel::Terminal(a) => {
            let mut v = vec![1];
            v.extend_from_slice(&atom_label_bytes(a));
            v
        }
        HyperedgeLabel::NonTerminal(nt) => {
            let mut v = vec![2, nt.rank() as u8];
            for l in &nt.node_labels {
                v.extend_from_slice(&bond_label_bytes(l));
            }
            v
        }
    }
}

struct ColoredGraph<'a> {
    rule: &'a ProductionRule,
    /// (port, neighbor) per vertex; nodes are `0..n`, edges `n..n+m`.
    adj: Vec<Vec<(u32, usize)>>,
    n: usize,
    /// Members of a non-terminal with equal node labels are interchangeable.
    loose: bool,
}

impl<'a> ColoredGraph<'a> {
    fn new(rule: &'a ProductionRule, loose: bool) -> ColoredGraph<'a> {
        let rhs = rule.rhs();
        let n = rhs.node_count();
        let mut adj = vec![Vec::new(); n + rhs.edge_count()];
        for (j, e) in rhs.edges.iter().enumerate() {
            let ordered = e.label.is_nonterminal();
            for (i, &m) in e.members.iter().enumerate() {
                let port = match (ordered, loose) {
                    (false, _) => 0,
                    (true, false) => i as u32 + 1,
                    (true, true) => label_group(e)[i] as u32 + 1,
                };
                adj[n + j].push((port, m));
                adj[m].push((port, n + j));
            }
        }
        ColoredGraph { rule, adj, n, loose }
    }

    fn initial_colors(&self) -> Vec<u64> {
        let rhs = self.rule.rhs();
        let mut ext = vec![0u64; self.n];
        for (i, &x) in self.rule.external_nodes().iter().enumerate() {
            ext[x] = i as u64 + 1;
        }
        let mut colors = Vec::with_capacity(self.adj.len());
        for (x, l) in rhs.nodes.iter().enumerate() {
            let mut h = Fnv64::new();
            h.write(b"node");
            h.write(&bond_label_bytes(l));
            h.write_u64(ext[x]);
            colors.push(h.finish());
        }
        for e in &rhs.edges {
            let mut h = Fnv64::new();
            h.write(b"edge");
            h.write(&label_bytes(&e.label));
            colors.push(h.finish());
        }
        colors
    }

    fn refine(&self, mut colors: Vec<u64>) -> Vec<u64> {
        let mut classes = count_classes(&colors);
        loop {
            let next: Vec<u64> = (0..colors.len())
                .map(|v| {
                    let mut nb: Vec<(u32, u64)> = self.adj[v].iter().map(|&(p, u)| (p, colors[u])).collect();
                    nb.sort_unstable();
                    let mut h = Fnv64::new();
                    h.write_u64(colors[v]);
                    for (p, c) in nb {
                        h.write_u64(u64::from(p));
                        h.write_u64(c);
                    }
                    h.finish()
                })
                .collect();
            let next_classes = count_classes(&next);
            colors = next;
            if next_classes == classes {
                return colors;
            }
            classes = next_classes;
        }
    }

    fn search(&self, colors: Vec<u64>, path: &mut Vec<usize>, st: &mut Search) {
        let colors = self.refine(colors);
        let mut cells: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate() {
            cells.entry(c).or_default().push(v);
        }
        match cells.values().find(|cell| cell.len() > 1) {
            None => {
                let mut order: Vec<usize> = (0..colors.len()).collect();
                order.sort_by_key(|&v| colors[v]);
                let cert = self.certificate(&order);
                match &st.best {
                    Some((b, _)) if cert > *b => {}
                    Some((b, best_order)) if cert == *b => {
                        // equal certificates differ by an automorphism
                        let mut gamma = vec![0; order.len()];
                        for (&a, &b) in best_order.iter().zip(&order) {
                            gamma[a] = b;
                        }
                        st.automorphisms.push(gamma);
                    }
                    _ => st.best = Some((cert, order)),
                }
            }
            Some(cell) => {
                let mut explored: Vec<usize> = Vec::new();
                for &v in cell {
                    if !explored.is_empty() && st.same_orbit(v, &explored, path) {
                        continue;
                    }
                    explored.push(v);
                    let mut c = colors.clone();
                    let mut h = Fnv64::new();
                    h.write(b"individual");
                    h.write_u64(colors[v]);
                    c[v] = h.finish();
                    path.push(v);
                    self.search(c, path, st);
                    path.pop();
                }
            }
        }
    }

    /// Nodes and edges in the given vertex order, as canonical ids.
    fn relabel(&self, order: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let node_order: Vec<usize> = order.iter().copied().filter(|&v| v < self.n).collect();
        let edge_order: Vec<usize> = order.iter().copied().filter(|&v| v >= self.n).map(|v| v - self.n).collect();
        let mut new_id = vec![0; self.n];
        for (i, &x) in node_order.iter().enumerate() {
            new_id[x] = i;
        }
        (node_order, edge_order, new_id)
    }

    fn certificate(&self, order: &[usize]) -> Vec<u8> {
        let (node_order, edge_order, new_id) = self.relabel(order);
        let rhs = self.rule.rhs();
        let mut out = label_bytes(self.rule.lhs());
        push_u16(&mut out, node_order.len());
        push_u16(&mut out, edge_order.len());
        for &x in &node_order {
            out.extend_from_slice(&bond_label_bytes(&rhs.nodes[x]));
        }
        for &x in self.rule.external_nodes() {
            push_u16(&mut out, new_id[x]);
        }
        for &e in &edge_order {
            let edge = &rhs.edges[e];
            out.extend_from_slice(&label_bytes(&edge.label));
            push_u16(&mut out, edge.members.len());
            for m in canonical_members(edge, &new_id, self.loose) {
                push_u16(&mut out, m);
            }
        }
        out
    }
}

#[derive(Default)]
struct Search {
    best: Option<(Vec<u8>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search {
    /// Whether `v` is mapped onto an explored vertex by the group generated
    /// by the known automorphisms that fix `path` pointwise. Such branches
    /// lead to the same certificates and can be skipped.
    fn same_orbit(&self, v: usize, explored: &[usize], path: &[usize]) -> bool {
        let gens: Vec<&Vec<usize>> =
            self.automorphisms.iter().filter(|g| path.iter().all(|&p| g[p] == p)).collect();
        if gens.is_empty() {
            return false;
        }
        let mut seen = vec![false; gens[0].len()];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(x) = stack.pop() {
            if explored.contains(&x) {
                return true;
            }
            for g in &gens {
                if !seen[g[x]] {
                    seen[g[x]] = true;
                    stack.push(g[x]);
                }
            }
        }
        false
    }
}

/// For each member position of a non-terminal, the first position holding
/// the same node label.
fn label_group(edge: &Hyperedge) -> Vec<usize> {
    let HyperedgeLabel::NonTerminal(nt) = &edge.label else { return vec![0; edge.members.len()] };
    let labels = &nt.node_labels;
    (0..labels.len()).map(|i| labels.iter().position(|l| *l == labels[i]).expect("own label")).collect()
}

/// `members` with values sorted within each group of equal-label positions.
fn sort_within_groups(edge: &Hyperedge, members: &mut [usize]) {
    let group = label_group(edge);
    for g in 0..members.len() {
        let pos: Vec<usize> = (0..members.len()).filter(|&i| group[i] == g).collect();
        let mut vals: Vec<usize> = pos.iter().map(|&i| members[i]).collect();
        vals.sort_unstable();
        for (&i, v) in pos.iter().zip(vals) {
            members[i] = v;
        }
    }
}

fn canonical_members(edge: &Hyperedge, new_id: &[usize], loose: bool) -> Vec<usize> {
    let mut m: Vec<usize> = edge.members.iter().map(|&x| new_id[x]).collect();
    if edge.label.is_terminal() {
        m.sort_unstable();
    } else if loose {
        sort_within_groups(edge, &mut m);
    }
    m
}

fn push_u16(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u16).to_be_bytes());
}

fn count_classes(colors: &[u64]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Equal for two rules iff they are isomorphic (same lhs, external order
/// respected, non-terminal expansion order ignored).
pub fn canonical_key(rule: &ProductionRule) -> Vec<u8> {
    canonicalize(rule).key
}

pub fn canonicalize(rule: &ProductionRule) -> CanonicalRule {
    let g = ColoredGraph::new(rule, false);
    let mut st = Search::default();
    g.search(g.initial_colors(), &mut Vec::new(), &mut st);
    let (key, order) = st.best.expect("search visits at least one leaf");
    let (node_order, edge_order, new_id) = g.relabel(&order);

    let src = rule.rhs();
    let mut rhs = Hypergraph::new();
    for &x in &node_order {
        rhs.add_node(src.nodes[x]);
    }
    let mut nonterminal_order = Vec::new();
    let mut source_edges = Vec::new();
    for &e in &edge_order {
        let edge = &src.edges[e];
        if edge.label.is_nonterminal() {
            nonterminal_order.push(rhs.edges.len());
            source_edges.push(e);
        }
        rhs.edges.push(Hyperedge { label: edge.label.clone(), members: canonical_members(edge, &new_id, false) });
    }
    let source_position = source_edges
        .iter()
        .map(|e| rule.nonterminal_order().iter().position(|x| x == e).expect("rhs non-terminal is ordered"))
        .collect();
    let external_nodes = rule.external_nodes().iter().map(|&x| new_id[x]).collect();
    let rule = ProductionRule::new(rule.lhs().clone(), rhs, external_nodes, nonterminal_order)
        .expect("relabeling preserves rule validity");
    CanonicalRule { rule, key, source_position }
}

/// Positions of nodes and hyperedges in a canonical ordering of a
/// hypergraph. Isomorphic hypergraphs get equal ranks on corresponding
/// elements, up to automorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalRanks {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

pub fn canonical_ranks(h: &Hypergraph) -> CanonicalRanks {
    let nts: Vec<EdgeId> = (0..h.edge_count()).filter(|&e| h.edges[e].label.is_nonterminal()).collect();
    let rule = ProductionRule::new(HyperedgeLabel::Start, h.clone(), Vec::new(), nts)
        .expect("hypergraph without Start hyperedges is a valid Start rhs");
    let g = ColoredGraph::new(&rule, false);
    let mut st = Search::default();
    g.search(g.initial_colors(), &mut Vec::new(), &mut st);
    let (_, order) = st.best.expect("search visits at least one leaf");
    let (node_order, edge_order, _) = g.relabel(&order);
    let rank_of = |order: &[usize]| {
        let mut rank = vec![0; order.len()];
        for (i, &x) in order.iter().enumerate() {
            rank[x] = i;
        }
        rank
    };
    CanonicalRanks { nodes: rank_of(&node_order), edges: rank_of(&edge_order) }
}

/// Reorders the members of each rhs non-terminal within its equal-label
/// positions, following a canonical labeling of the rule in which those
/// members are interchangeable. Rules that differ only in such orders come
/// out isomorphic.
pub fn orient_nonterminals(rule: &ProductionRule) -> ProductionRule {
    let g = ColoredGraph::new(rule, true);
    let mut st = Search::default();
    g.search(g.initial_colors(), &mut Vec::new(), &mut st);
    let (_, order) = st.best.expect("search visits at least one leaf");
    let (node_order, _, new_id) = g.relabel(&order);
    let mut rhs = rule.rhs().clone();
    for edge in rhs.edges.iter_mut().filter(|e| e.label.is_nonterminal()) {
        let mut m: Vec<usize> = edge.members.iter().map(|&x| new_id[x]).collect();
        sort_within_groups(edge, &mut m);
        edge.members = m.into_iter().map(|i| node_order[i]).collect();
    }
    ProductionRule::new(rule.lhs().clone(), rhs, rule.external_nodes().to_vec(), rule.nonterminal_order().to_vec())
        .expect("reordering equal-label members keeps the rule valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::tests::{methyl, nt_single};
    use crate::hypergraph::NonTerminal;
    use crate::molgraph::{AtomLabel, BondLabel, Element};

    /// Hub of a 4-ring with one substituent: nodes 0..4 ring bonds, node 4
    /// the bridge to the parent (external).
    fn ring_hub(perm: &[usize]) -> ProductionRule {
        let mut h = Hypergraph::new();
        let labels = [BondLabel::SINGLE, BondLabel::DOUBLE, BondLabel::SINGLE, BondLabel::DOUBLE, BondLabel::SINGLE];
        let mut inv = vec![0; 5];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        for &old in &inv {
            h.add_node(labels[old]);
        }
        let nt = |ls: &[usize]| HyperedgeLabel::NonTerminal(NonTerminal::new(ls.iter().map(|&i| labels[i]).collect()));
        let atoms: [&[usize]; 4] = [&[0, 1, 4], &[1, 2], &[2, 3], &[3, 0]];
        for a in atoms {
            h.add_edge(nt(a), a.iter().map(|&x| perm[x]).collect()).unwrap();
        }
        ProductionRule::new(nt(&[4]), h, vec![perm[4]], vec![0, 1, 2, 3]).unwrap()
    }

    #[test]
    fn permuted_copies_share_a_key() {
        let base = canonical_key(&ring_hub(&[0, 1, 2, 3, 4]));
        for p in [[4, 3, 2, 1, 0], [1, 2, 3, 4, 0], [2, 0, 4, 1, 3]] {
            assert_eq!(canonical_key(&ring_hub(&p)), base);
        }
    }

    #[test]
    fn nonterminal_order_is_ignored() {
        let r = ring_hub(&[0, 1, 2, 3, 4]);
        let reordered =
            ProductionRule::new(r.lhs().clone(), r.rhs().clone(), r.external_nodes().to_vec(), vec![3, 1, 0, 2]).unwrap();
        let a = canonicalize(&r);
        let b = canonicalize(&reordered);
        assert_eq!(a.key, b.key);
        assert_eq!(a.rule, b.rule);
        // the same canonical non-terminal traces back to the same rhs edge
        for j in 0..4 {
            assert_eq!(r.nonterminal_order()[a.source_position[j]], reordered.nonterminal_order()[b.source_position[j]]);
        }
    }

    #[test]
    fn canonical_form_is_a_fixed_point() {
        let c = canonicalize(&ring_hub(&[2, 0, 4, 1, 3]));
        let again = canonicalize(&c.rule);
        assert_eq!(again.rule, c.rule);
        assert_eq!(again.key, c.key);
        assert_eq!(again.source_position, (0..4).collect::<Vec<_>>());
    }

    #[test]
    fn terminal_label_changes_key() {
        let mk = |label: HyperedgeLabel| {
            let mut h = Hypergraph::new();
            h.add_node(BondLabel::SINGLE);
            h.add_edge(label, vec![0]).unwrap();
            ProductionRule::new(nt_single(), h, vec![0], vec![]).unwrap()
        };
        let f = HyperedgeLabel::Terminal(AtomLabel::new(Element::F, 0, 0).unwrap());
        assert_ne!(canonical_key(&mk(methyl())), canonical_key(&mk(f)));
    }

    #[test]
    fn external_order_matters() {
        // N[S,S] -> CH2 over both nodes vs. the same with swapped external order
        // is isomorphic (terminal membership is a set); with an asymmetric
        // rhs the two orders differ.
        let lhs = HyperedgeLabel::NonTerminal(NonTerminal::new(vec![BondLabel::SINGLE, BondLabel::SINGLE]));
        let mk = |ext: Vec<usize>| {
            let mut h = Hypergraph::new();
            h.add_node(BondLabel::SINGLE);
            h.add_node(BondLabel::SINGLE);
            h.add_node(BondLabel::SINGLE);
            let ch2 = HyperedgeLabel::Terminal(AtomLabel::new(Element::C, 0, 2).unwrap());
            let oh = HyperedgeLabel::Terminal(AtomLabel::new(Element::O, 0, 0).unwrap());
            h.add_edge(ch2, vec![0, 2]).unwrap();
            h.add_edge(oh, vec![1, 2]).unwrap();
            ProductionRule::new(lhs.clone(), h, ext, vec![]).unwrap()
        };
        assert_ne!(canonical_key(&mk(vec![0, 1])), canonical_key(&mk(vec![1, 0])));
    }

    /// All-single 4-ring hub; `flip[k]` reverses the members of the k-th
    /// ring-atom non-terminal.
    fn single_ring_hub(flip: [bool; 4]) -> ProductionRule {
        let s = BondLabel::SINGLE;
        let mut h = Hypergraph::new();
        for _ in 0..5 {
            h.add_node(s);
        }
        h.add_edge(HyperedgeLabel::NonTerminal(NonTerminal::new(vec![s; 3])), vec![0, 1, 4]).unwrap();
        for (k, pair) in [[1, 2], [2, 3], [3, 0]].into_iter().enumerate() {
            let members = if flip[k + 1] { vec![pair[1], pair[0]] } else { pair.to_vec() };
            h.add_edge(HyperedgeLabel::NonTerminal(NonTerminal::new(vec![s; 2])), members).unwrap();
        }
        if flip[0] {
            h.edges[0].members = vec![4, 1, 0];
        }
        ProductionRule::new(HyperedgeLabel::Start, h, vec![], vec![0, 1, 2, 3]).unwrap()
    }

    #[test]
    fn orientation_removes_member_order() {
        let flips = (0..16u8).map(|b| [b & 1 != 0, b & 2 != 0, b & 4 != 0, b & 8 != 0]);
        let raw: std::collections::BTreeSet<_> = flips.clone().map(|f| canonical_key(&single_ring_hub(f))).collect();
        assert!(raw.len() > 1);
        let oriented: std::collections::BTreeSet<_> =
            flips.map(|f| canonical_key(&orient_nonterminals(&single_ring_hub(f)))).collect();
        assert_eq!(oriented.len(), 1);
    }

    #[test]
    fn orientation_keeps_distinct_labels_in_place() {
        let r = ring_hub(&[0, 1, 2, 3, 4]);
        let o = orient_nonterminals(&r);
        // every ring non-terminal mixes S and D, so only the S,S pair of the
        // first one may move
        assert_eq!(o.rhs().edges[1..], r.rhs().edges[1..]);
        assert_eq!(o.rhs().edges[0].members[1], 1);
        assert_eq!(o.lhs(), r.lhs());
    }

    #[test]
    fn ranks_follow_relabeling() {
        let base = canonical_ranks(ring_hub(&[0, 1, 2, 3, 4]).rhs());
        for p in [[4, 3, 2, 1, 0], [2, 0, 4, 1, 3]] {
            let r = canonical_ranks(ring_hub(&p).rhs());
            for v in 0..5 {
                assert_eq!(r.nodes[p[v]], base.nodes[v]);
            }
        }
    }
}
