//! Tree decompositions of molecular hypergraphs.
//!
//! [`decompose`] cuts the hypergraph at every node whose removal disconnects
//! it (a bridge bond, duplicated into both sides) and then splits each
//! remaining ring system into a hub bag holding all of its nodes with one
//! child bag per atom hyperedge.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::grammar::{canonical_ranks, CanonicalRanks};
use crate::hypergraph::{EdgeId, Hypergraph, MolecularHypergraph, NodeId};

pub type TreeNodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("tree edges do not form a tree over {0} bags")]
    NotATree(usize),
    #[error("cannot make decomposition irredundant: node {node} passes through bag {bag} which holds hyperedges")]
    IrreparableDecomposition { node: NodeId, bag: TreeNodeId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    /// Hypergraph nodes in this bag.
    pub nodes: BTreeSet<NodeId>,
    /// Hyperedges assigned to this bag.
    pub edges: BTreeSet<EdgeId>,
    pub parent: Option<TreeNodeId>,
    pub children: Vec<TreeNodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<TreeNode>,
    pub root: TreeNodeId,
}

impl TreeDecomposition {
    /// Builds a rooted tree from bags and undirected tree edges. Children are
    /// ordered by ascending bag id.
    pub fn from_bags(
        bags: Vec<(BTreeSet<NodeId>, BTreeSet<EdgeId>)>,
        tree_edges: &[(TreeNodeId, TreeNodeId)],
        root: TreeNodeId,
    ) -> Result<TreeDecomposition, DecompositionError> {
        let n = bags.len();
        if n == 0 || root >= n || tree_edges.len() + 1 != n {
            return Err(DecompositionError::NotATree(n));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in tree_edges {
            if a >= n || b >= n || a == b {
                return Err(DecompositionError::NotATree(n));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut children = vec![Vec::new(); n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    children[v].push(w);
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(DecompositionError::NotATree(n));
        }
        let bags = bags
            .into_iter()
            .zip(parent)
            .zip(children)
            .map(|(((nodes, edges), parent), children)| TreeNode {
                nodes,
                edges,
                parent,
                children,
            })
            .collect();
        Ok(TreeDecomposition { bags, root })
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Tree neighbors (parent first, then children).
    pub fn neighbors(&self, t: TreeNodeId) -> impl Iterator<Item = TreeNodeId> + '_ {
        self.bags[t].parent.into_iter().chain(self.bags[t].children.iter().copied())
    }

    /// Bags in pre-order from the root.
    pub fn preorder(&self) -> Vec<TreeNodeId> {
        let mut out = Vec::with_capacity(self.bags.len());
        let mut stack = vec![self.root];
        while let Some(t) = stack.pop() {
            out.push(t);
            stack.extend(self.bags[t].children.iter().rev());
        }
        out
    }

    /// Bags containing hypergraph node `v`.
    pub fn bags_with(&self, v: NodeId) -> BTreeSet<TreeNodeId> {
        self.bags
            .iter()
            .enumerate()
            .filter(|(_, b)| b.nodes.contains(&v))
            .map(|(i, _)| i)
            .collect()
    }

    fn induced_degree(&self, t: TreeNodeId, within: &BTreeSet<TreeNodeId>) -> usize {
        self.neighbors(t).filter(|w| within.contains(w)).count()
    }
}

/// Splits the hypergraph at bridge nodes, then rips atoms off ring systems.
/// A ring system's parent attaches to its hub; its children attach to the
/// ring atom they are bonded to, and irredundancy repair then drops the child
/// bridge nodes from the hub.
/// The result is irredundant. It is rooted at the bag of the hyperedge with
/// the smallest terminal label, or at the hub of its ring system. Label ties
/// are broken by canonical rank, so the result does not depend on the atom
/// order of the input. A ring atom never becomes the root, so rank-2+
/// non-terminals are only ever rewritten by single ring atoms.
pub fn decompose(h: &MolecularHypergraph) -> TreeDecomposition {
    decompose_ranked(h, &canonical_ranks(h.as_hypergraph()), None)
}

/// Hyperedge whose bag [`decompose`] roots at (directly, or through the hub of
/// its ring system).
pub fn default_root(hg: &Hypergraph, ranks: &CanonicalRanks) -> EdgeId {
    (0..hg.edge_count())
        .min_by(|&a, &b| hg.edges[a].label.cmp(&hg.edges[b].label).then(ranks.edges[a].cmp(&ranks.edges[b])))
        .expect("molecular hypergraphs have at least two hyperedges")
}

/// [`decompose`] with precomputed canonical ranks of `h`, rooted at the bag
/// of `root` (or its ring hub) instead of the default root when given.
pub fn decompose_ranked(h: &MolecularHypergraph, ranks: &CanonicalRanks, root: Option<EdgeId>) -> TreeDecomposition {
    let hg = h.as_hypergraph();
    let incidence = hg.incidence();
    let bridges = bridge_nodes(hg, &incidence);

    // Parts: hyperedges connected through non-bridge nodes.
    let m = hg.edge_count();
    let mut part_of = vec![usize::MAX; m];
    let mut parts: Vec<Vec<EdgeId>> = Vec::new();
    for start in 0..m {
        if part_of[start] != usize::MAX {
            continue;
        }
        let id = parts.len();
        let mut members = vec![start];
        part_of[start] = id;
        let mut stack = vec![start];
        while let Some(e) = stack.pop() {
            for &v in &hg.edges[e].members {
                if bridges[v] {
                    continue;
                }
                for &f in &incidence[v] {
                    if part_of[f] == usize::MAX {
                        part_of[f] = id;
                        members.push(f);
                        stack.push(f);
                    }
                }
            }
        }
        members.sort_unstable();
        parts.push(members);
    }

    let root_edge = match root {
        Some(e) => e,
        None => default_root(hg, ranks),
    };

    // Orient the part tree from the root part.
    let bridge_list: Vec<NodeId> = (0..hg.node_count()).filter(|&v| bridges[v]).collect();
    let mut part_adj = vec![Vec::new(); parts.len()];
    for &v in &bridge_list {
        let (p, q) = (part_of[incidence[v][0]], part_of[incidence[v][1]]);
        part_adj[p].push(q);
        part_adj[q].push(p);
    }
    let mut part_parent = vec![usize::MAX; parts.len()];
    let root_part = part_of[root_edge];
    part_parent[root_part] = root_part;
    let mut queue = VecDeque::from([root_part]);
    while let Some(p) = queue.pop_front() {
        for &q in &part_adj[p] {
            if part_parent[q] == usize::MAX {
                part_parent[q] = p;
                queue.push_back(q);
            }
        }
    }

    let mut bags: Vec<(BTreeSet<NodeId>, BTreeSet<EdgeId>)> = Vec::new();
    let mut tree_edges = Vec::new();
    let mut entry = vec![0; parts.len()];
    let mut bag_of_edge = vec![0; m];
    for (pi, part) in parts.iter().enumerate() {
        if let [e] = part.as_slice() {
            entry[pi] = bags.len();
            bag_of_edge[*e] = bags.len();
            bags.push((hg.edges[*e].members.iter().copied().collect(), BTreeSet::from([*e])));
        } else {
            let hub = bags.len();
            entry[pi] = hub;
            let all: BTreeSet<NodeId> = part.iter().flat_map(|&e| hg.edges[e].members.iter().copied()).collect();
            bags.push((all, BTreeSet::new()));
            for &e in part {
                tree_edges.push((hub, bags.len()));
                bag_of_edge[e] = bags.len();
                bags.push((hg.edges[e].members.iter().copied().collect(), BTreeSet::from([e])));
            }
        }
    }
    // A part is entered through its hub and leaves through the atom bag on
    // its side of each child bridge.
    for &v in &bridge_list {
        let (e1, e2) = (incidence[v][0], incidence[v][1]);
        let (outer, inner) = if part_parent[part_of[e2]] == part_of[e1] { (e1, e2) } else { (e2, e1) };
        tree_edges.push((bag_of_edge[outer], entry[part_of[inner]]));
    }

    let td = TreeDecomposition::from_bags(bags, &tree_edges, entry[root_part])
        .expect("bridge-block tree of a connected hypergraph is a tree");
    make_irredundant(&td, hg).expect("bridge-block decompositions are irredundant")
}

/// Nodes whose two incident hyperedges are disconnected once the node is cut.
fn bridge_nodes(hg: &Hypergraph, incidence: &[Vec<EdgeId>]) -> Vec<bool> {
    let m = hg.edge_count();
    let mut is_bridge = vec![false; hg.node_count()];
    let mut disc = vec![usize::MAX; m];
    let mut low = vec![0; m];
    let mut timer = 0;
    for start in 0..m {
        if disc[start] != usize::MAX {
            continue;
        }
        // (hyperedge, node used to enter it, next member index)
        let mut stack: Vec<(EdgeId, Option<NodeId>, usize)> = vec![(start, None, 0)];
        disc[start] = timer;
        low[start] = timer;
        timer += 1;
        while let Some(&mut (e, via, ref mut i)) = stack.last_mut() {
            if let Some(&v) = hg.edges[e].members.get(*i) {
                *i += 1;
                if Some(v) == via {
                    continue;
                }
                for &f in &incidence[v] {
                    if f == e {
                        continue;
                    }
                    if disc[f] == usize::MAX {
                        disc[f] = timer;
                        low[f] = timer;
                        timer += 1;
                        stack.push((f, Some(v), 0));
                    } else {
                        low[e] = low[e].min(disc[f]);
                    }
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[e]);
                    if low[e] > disc[p] {
                        is_bridge[via.expect("non-root entered via a node")] = true;
                    }
                }
            }
        }
    }
    is_bridge
}

/// Removes every node from the bags where it is not needed to connect the
/// bags holding its hyperedges. Fails when a needed connecting bag holds
/// hyperedges, which no removal can fix.
pub fn make_irredundant(td: &TreeDecomposition, h: &Hypergraph) -> Result<TreeDecomposition, DecompositionError> {
    let mut out = td.clone();
    let incidence = h.incidence();
    for (v, inc) in incidence.iter().enumerate() {
        let mut keep = td.bags_with(v);
        let needed: BTreeSet<TreeNodeId> = keep
            .iter()
            .copied()
            .filter(|&t| td.bags[t].edges.iter().any(|e| inc.contains(e)))
            .collect();
        if needed.is_empty() {
            continue;
        }
        // Prune leaves of the induced subtree that hold none of v's hyperedges.
        loop {
            let prune: Vec<_> = keep
                .iter()
                .copied()
                .filter(|t| !needed.contains(t) && td.induced_degree(*t, &keep) <= 1)
                .collect();
            if prune.is_empty() {
                break;
            }
            for t in prune {
                keep.remove(&t);
            }
        }
        for t in td.bags_with(v) {
            if !keep.contains(&t) {
                out.bags[t].nodes.remove(&v);
            }
        }
        for &t in &keep {
            let leaf = td.induced_degree(t, &keep) <= 1;
            if !leaf && !td.bags[t].edges.is_empty() {
                return Err(DecompositionError::IrreparableDecomposition { node: v, bag: t });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionViolation {
    /// Condition 1: node in no bag.
    NodeUncovered(NodeId),
    /// Condition 2: hyperedge assigned to `bags.len()` bags instead of one.
    EdgeAssignment { edge: EdgeId, bags: Vec<TreeNodeId> },
    /// Condition 2: assigned bag lacks some members of the hyperedge.
    EdgeNotContained { edge: EdgeId, bag: TreeNodeId },
    /// Condition 3: bags holding the node are disconnected.
    Disconnected(NodeId),
    UnknownEdge { edge: EdgeId, bag: TreeNodeId },
}

impl fmt::Display for DecompositionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Checks node cover, unique hyperedge assignment with containment, and
/// connectivity of every node's bags.
pub fn verify_decomposition(td: &TreeDecomposition, h: &Hypergraph) -> Vec<DecompositionViolation> {
    let mut out = Vec::new();
    for v in 0..h.node_count() {
        let bags = td.bags_with(v);
        if bags.is_empty() {
            out.push(DecompositionViolation::NodeUncovered(v));
            continue;
        }
        let start = *bags.iter().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            for w in td.neighbors(t) {
                if bags.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        if seen.len() != bags.len() {
            out.push(DecompositionViolation::Disconnected(v));
        }
    }
    let mut assigned = vec![Vec::new(); h.edge_count()];
    for (t, bag) in td.bags.iter().enumerate() {
        for &e in &bag.edges {
            match assigned.get_mut(e) {
                Some(list) => list.push(t),
                None => out.push(DecompositionViolation::UnknownEdge { edge: e, bag: t }),
            }
        }
    }
    for (e, bags) in assigned.into_iter().enumerate() {
        if bags.len() != 1 {
            out.push(DecompositionViolation::EdgeAssignment { edge: e, bags });
            continue;
        }
        let t = bags[0];
        if !h.edges[e].members.iter().all(|m| td.bags[t].nodes.contains(m)) {
            out.push(DecompositionViolation::EdgeNotContained { edge: e, bag: t });
        }
    }
    out
}

/// A bag holding `v` carries hyperedges iff it is a leaf of the subtree
/// induced by the bags holding `v`, for every node `v`.
pub fn verify_irredundant(td: &TreeDecomposition, h: &Hypergraph) -> bool {
    (0..h.node_count()).all(|v| {
        let bags = td.bags_with(v);
        bags.iter().all(|&t| {
            let leaf = td.induced_degree(t, &bags) <= 1;
            leaf == !td.bags[t].edges.is_empty()
        })
    })
}
