//! D-ary Huffman construction, code lengths, average length, redundancy.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::dist::ProbabilityMultiset;
use crate::{Error, Result};

/// Position of a node in a built tree: depth below the root and
/// left-to-right index within that depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId {
    pub depth: u32,
    pub index: u32,
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.depth, self.index)
    }
}

#[derive(Debug, Clone)]
enum NodeKind {
    /// `symbol` is the index into the sorted-descending distribution;
    /// `None` marks a padding dummy.
    Leaf { symbol: Option<usize> },
    Internal { children: Vec<usize> },
}

#[derive(Debug, Clone)]
struct Node {
    prob: f64,
    depth: u32,
    kind: NodeKind,
}

/// An immutable code tree produced by [`build_huffman`]. Every internal
/// node has exactly `radix` children; leaves carry source-symbol indices
/// or are zero-probability padding.
#[derive(Debug, Clone)]
pub struct CodeTree {
    radix: u32,
    nodes: Vec<Node>,
    root: usize,
    /// BFS layout: `levels[d][i]` is the arena index of node (d, i).
    levels: Vec<Vec<usize>>,
    symbols: usize,
}

/// Per-symbol codeword lengths, aligned to the sorted-descending symbol
/// order of the source distribution. Dummy leaves are excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeLengths {
    lengths: Vec<u32>,
}

impl CodeLengths {
    pub fn as_slice(&self) -> &[u32] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// Σ pᵢ·lᵢ for probabilities given in the same (sorted-descending)
    /// order.
    pub fn expected_length(&self, probs: &[f64]) -> f64 {
        self.lengths
            .iter()
            .zip(probs)
            .map(|(&l, &p)| p * l as f64)
            .sum()
    }

    /// Σ radix^(−lᵢ) over the real symbols only.
    pub fn kraft_sum(&self, radix: u32) -> f64 {
        let d = radix as f64;
        self.lengths.iter().map(|&l| d.powi(-(l as i32))).sum()
    }
}

/// Merge queue entry. Orders by probability; at equal probability merged
/// nodes come before original leaves (this keeps a maximal symbol of
/// weight exactly 0.4 at depth 1, which the verification sweeps rely
/// on), and within each class the earlier-created node wins.
#[derive(PartialEq)]
struct Pending {
    prob: f64,
    merged: bool,
    seq: usize,
}

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.prob
            .total_cmp(&other.prob)
            .then(other.merged.cmp(&self.merged))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Builds an optimal prefix code over `radix` letters. Pads with the
/// fewest zero-probability dummies so the leaf count is ≡ 1 (mod radix−1),
/// then repeatedly merges the `radix` smallest nodes. A single-symbol
/// source is padded to a full root so its codeword has length 1.
pub fn build_huffman(dist: &ProbabilityMultiset, radix: u32) -> Result<CodeTree> {
    if radix < 2 {
        return Err(Error::BadRadix(radix));
    }
    let probs = dist.probs();
    let n = probs.len();
    let m = (radix - 1) as usize;
    let dummies = if n == 1 { m } else { (m - (n - 1) % m) % m };

    let mut nodes: Vec<Node> = Vec::with_capacity(2 * (n + dummies));
    let mut heap: BinaryHeap<Reverse<Pending>> = BinaryHeap::new();
    // Creation order (= arena index) fixes the tie-break: dummies first,
    // then real symbols from smallest to largest probability.
    for _ in 0..dummies {
        let seq = nodes.len();
        nodes.push(Node {
            prob: 0.0,
            depth: 0,
            kind: NodeKind::Leaf { symbol: None },
        });
        heap.push(Reverse(Pending {
            prob: 0.0,
            merged: false,
            seq,
        }));
    }
    for symbol in (0..n).rev() {
        let seq = nodes.len();
        nodes.push(Node {
            prob: probs[symbol],
            depth: 0,
            kind: NodeKind::Leaf {
                symbol: Some(symbol),
            },
        });
        heap.push(Reverse(Pending {
            prob: probs[symbol],
            merged: false,
            seq,
        }));
    }

    while heap.len() > 1 {
        let mut children = Vec::with_capacity(radix as usize);
        let mut prob = 0.0;
        for _ in 0..radix {
            let Reverse(p) = heap.pop().expect("leaf count ≡ 1 mod radix−1");
            prob += p.prob;
            children.push(p.seq);
        }
        let seq = nodes.len();
        nodes.push(Node {
            prob,
            depth: 0,
            kind: NodeKind::Internal { children },
        });
        heap.push(Reverse(Pending {
            prob,
            merged: true,
            seq,
        }));
    }

    let root = nodes.len() - 1;
    assert!(
        (nodes[root].prob - 1.0).abs() <= 1e-9,
        "root probability {} drifted from 1",
        nodes[root].prob
    );

    let mut levels: Vec<Vec<usize>> = Vec::new();
    let mut frontier = vec![root];
    let mut depth = 0u32;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &idx in &frontier {
            nodes[idx].depth = depth;
            if let NodeKind::Internal { children } = &nodes[idx].kind {
                next.extend_from_slice(children);
            }
        }
        levels.push(frontier);
        frontier = next;
        depth += 1;
    }

    let tree = CodeTree {
        radix,
        nodes,
        root,
        levels,
        symbols: n,
    };
    assert!(tree.kraft_identity(), "constructed tree is not full");
    Ok(tree)
}

impl CodeTree {
    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn root(&self) -> NodeId {
        NodeId { depth: 0, index: 0 }
    }

    pub fn root_prob(&self) -> f64 {
        self.nodes[self.root].prob
    }

    pub fn real_leaf_count(&self) -> usize {
        self.symbols
    }

    pub fn dummy_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Leaf { symbol: None }))
            .count()
    }

    fn arena(&self, id: NodeId) -> Result<usize> {
        self.levels
            .get(id.depth as usize)
            .and_then(|row| row.get(id.index as usize))
            .copied()
            .ok_or(Error::NotInternal(format!("no node at {id}")))
    }

    fn id_of(&self, arena: usize) -> NodeId {
        let depth = self.nodes[arena].depth;
        let index = self.levels[depth as usize]
            .iter()
            .position(|&i| i == arena)
            .unwrap() as u32;
        NodeId { depth, index }
    }

    pub fn node_prob(&self, id: NodeId) -> Result<f64> {
        Ok(self.nodes[self.arena(id)?].prob)
    }

    pub fn is_internal(&self, id: NodeId) -> Result<bool> {
        Ok(matches!(
            self.nodes[self.arena(id)?].kind,
            NodeKind::Internal { .. }
        ))
    }

    pub fn children(&self, id: NodeId) -> Result<Vec<NodeId>> {
        let idx = self.arena(id)?;
        match &self.nodes[idx].kind {
            NodeKind::Internal { children } => {
                Ok(children.iter().map(|&c| self.id_of(c)).collect())
            }
            NodeKind::Leaf { .. } => Err(Error::NotInternal(format!("{id} is a leaf"))),
        }
    }

    /// All internal nodes in breadth-first order (shallowest first,
    /// left to right within a depth).
    pub fn internal_nodes(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        for (depth, row) in self.levels.iter().enumerate() {
            for (index, &idx) in row.iter().enumerate() {
                if matches!(self.nodes[idx].kind, NodeKind::Internal { .. }) {
                    out.push(NodeId {
                        depth: depth as u32,
                        index: index as u32,
                    });
                }
            }
        }
        out
    }

    /// All leaves in breadth-first order with their symbol index
    /// (`None` for dummies) and probability.
    pub fn leaves(&self) -> Vec<(NodeId, Option<usize>, f64)> {
        let mut out = Vec::new();
        for (depth, row) in self.levels.iter().enumerate() {
            for (index, &idx) in row.iter().enumerate() {
                if let NodeKind::Leaf { symbol } = self.nodes[idx].kind {
                    out.push((
                        NodeId {
                            depth: depth as u32,
                            index: index as u32,
                        },
                        symbol,
                        self.nodes[idx].prob,
                    ));
                }
            }
        }
        out
    }

    /// Probabilities of the real leaves below `id` (inclusive).
    pub fn subtree_real_probs(&self, id: NodeId) -> Result<Vec<f64>> {
        let start = self.arena(id)?;
        let mut out = Vec::new();
        let mut stack = vec![start];
        while let Some(idx) = stack.pop() {
            match &self.nodes[idx].kind {
                NodeKind::Leaf { symbol: Some(_) } => out.push(self.nodes[idx].prob),
                NodeKind::Leaf { symbol: None } => {}
                NodeKind::Internal { children } => stack.extend_from_slice(children),
            }
        }
        Ok(out)
    }

    /// Whether `leaf` lies in the subtree rooted at `node`.
    pub fn contains_leaf(&self, node: NodeId, leaf: NodeId) -> Result<bool> {
        let top = self.arena(node)?;
        let target = self.arena(leaf)?;
        let mut stack = vec![top];
        while let Some(idx) = stack.pop() {
            if idx == target {
                return Ok(true);
            }
            if let NodeKind::Internal { children } = &self.nodes[idx].kind {
                stack.extend_from_slice(children);
            }
        }
        Ok(false)
    }

    /// Shallowest, then leftmost, real leaf whose probability is within
    /// `tol` of `p`.
    pub fn find_leaf(&self, p: f64, tol: f64) -> Option<NodeId> {
        self.leaves()
            .into_iter()
            .find(|&(_, symbol, prob)| symbol.is_some() && (prob - p).abs() <= tol)
            .map(|(id, _, _)| id)
    }

    /// Codeword length of each real symbol, i.e. its leaf depth.
    pub fn code_lengths(&self) -> CodeLengths {
        let mut lengths = vec![0u32; self.symbols];
        for node in &self.nodes {
            if let NodeKind::Leaf {
                symbol: Some(symbol),
            } = node.kind
            {
                lengths[symbol] = node.depth;
            }
        }
        CodeLengths { lengths }
    }

    /// Average codeword length, computed two ways: Σ pᵢ·lᵢ over real
    /// leaves, and the sum of internal-node probabilities. The two must
    /// agree within 1e-9; the first is returned.
    pub fn average_length(&self) -> f64 {
        let mut by_leaves = 0.0;
        let mut by_internal = 0.0;
        for node in &self.nodes {
            match node.kind {
                NodeKind::Leaf { symbol: Some(_) } => by_leaves += node.prob * node.depth as f64,
                NodeKind::Leaf { symbol: None } => {}
                NodeKind::Internal { .. } => by_internal += node.prob,
            }
        }
        assert!(
            (by_leaves - by_internal).abs() <= 1e-9,
            "length accounting mismatch: {by_leaves} vs {by_internal}"
        );
        by_leaves
    }

    /// Exact fullness check: leaf depths must collapse, radix children at
    /// a time, to a single root. Counts stay in integers throughout.
    pub fn kraft_identity(&self) -> bool {
        let mut counts: Vec<u64> = vec![0; self.levels.len()];
        for node in &self.nodes {
            if let NodeKind::Leaf { .. } = node.kind {
                counts[node.depth as usize] += 1;
            }
        }
        let d = self.radix as u64;
        for depth in (1..counts.len()).rev() {
            if counts[depth] % d != 0 {
                return false;
            }
            counts[depth - 1] += counts[depth] / d;
        }
        counts[0] == 1
    }

    /// Internal-node probabilities each equal the sum of their children's
    /// within `tol`.
    pub fn sums_consistent(&self, tol: f64) -> bool {
        self.nodes.iter().all(|node| match &node.kind {
            NodeKind::Leaf { .. } => true,
            NodeKind::Internal { children } => {
                let s: f64 = children.iter().map(|&c| self.nodes[c].prob).sum();
                (s - node.prob).abs() <= tol
            }
        })
    }
}

/// Average codeword length of the Huffman code for `dist` minus the
/// base-`radix` entropy of `dist`.
pub fn redundancy(dist: &ProbabilityMultiset, radix: u32) -> Result<f64> {
    let tree = build_huffman(dist, radix)?;
    Ok(tree.average_length() - dist.entropy(radix)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(p: &[f64]) -> ProbabilityMultiset {
        ProbabilityMultiset::new(p).unwrap()
    }

    #[test]
    fn dyadic_three_symbols() {
        let tree = build_huffman(&dist(&[0.5, 0.25, 0.25]), 2).unwrap();
        assert_eq!(tree.code_lengths().as_slice(), &[1, 2, 2]);
        assert!((tree.average_length() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn binary_three_symbols() {
        let tree = build_huffman(&dist(&[0.4, 0.3, 0.3]), 2).unwrap();
        assert_eq!(tree.code_lengths().as_slice(), &[1, 2, 2]);
        assert!((tree.average_length() - 1.6).abs() < 1e-12);
    }

    #[test]
    fn ternary_five_uniform() {
        let tree = build_huffman(&dist(&[0.2; 5]), 3).unwrap();
        assert_eq!(tree.code_lengths().as_slice(), &[1, 1, 2, 2, 2]);
        assert!((tree.average_length() - 1.6).abs() < 1e-12);
        assert_eq!(tree.dummy_count(), 0);
    }

    #[test]
    fn maximal_symbol_at_two_fifths_stays_shallow() {
        // Merged nodes win ties, so the 0.4 leaf is not pulled down when a
        // merged pair reaches the same weight.
        let tree = build_huffman(&dist(&[0.4, 0.2, 0.2, 0.2]), 2).unwrap();
        assert_eq!(tree.code_lengths().as_slice()[0], 1);
        assert!((tree.average_length() - 2.0).abs() < 1e-12);
        let tree = build_huffman(&dist(&[0.4, 0.2, 0.2, 0.1, 0.1]), 2).unwrap();
        assert_eq!(tree.code_lengths().as_slice()[0], 1);
    }

    #[test]
    fn single_symbol_gets_length_one() {
        for radix in 2..=4 {
            let tree = build_huffman(&dist(&[1.0]), radix).unwrap();
            assert_eq!(tree.code_lengths().as_slice(), &[1]);
            assert!((tree.average_length() - 1.0).abs() < 1e-12);
            assert_eq!(tree.dummy_count(), (radix - 1) as usize);
        }
    }

    #[test]
    fn padding_count_is_minimal() {
        // 6 symbols, radix 3: one dummy brings the count to 7 ≡ 1 (mod 2).
        let tree = build_huffman(&dist(&[1.0 / 6.0; 6]), 3).unwrap();
        assert_eq!(tree.dummy_count(), 1);
        assert!(tree.kraft_identity());
        // 5 symbols, radix 4: two dummies bring the count to 7 ≡ 1 (mod 3).
        let tree = build_huffman(&dist(&[0.2; 5]), 4).unwrap();
        assert_eq!(tree.dummy_count(), 2);
        assert!(tree.kraft_identity());
    }

    #[test]
    fn rejects_bad_radix() {
        assert!(matches!(
            build_huffman(&dist(&[1.0]), 1),
            Err(Error::BadRadix(1))
        ));
    }

    #[test]
    fn zero_probability_symbols_get_codewords() {
        let tree = build_huffman(&dist(&[0.5, 0.5, 0.0]), 2).unwrap();
        let lengths = tree.code_lengths();
        assert_eq!(lengths.len(), 3);
        assert!(lengths.as_slice().iter().all(|&l| l >= 1));
        assert!((tree.average_length() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn redundancy_known_values() {
        assert!(redundancy(&dist(&[0.5, 0.25, 0.25]), 2).unwrap().abs() < 1e-12);
        let r = redundancy(&dist(&[0.4, 0.3, 0.3]), 2).unwrap();
        assert!((r - 0.02905).abs() < 1e-4);
        let u3 = dist(&[1.0 / 3.0; 3]);
        assert!(redundancy(&u3, 3).unwrap().abs() < 1e-12);
        assert!((redundancy(&dist(&[1.0]), 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn node_navigation() {
        let tree = build_huffman(&dist(&[0.4, 0.3, 0.3]), 2).unwrap();
        let root = tree.root();
        assert!(tree.is_internal(root).unwrap());
        assert!((tree.node_prob(root).unwrap() - 1.0).abs() < 1e-12);
        let internals = tree.internal_nodes();
        assert_eq!(internals.len(), 2);
        let merged = internals[1];
        assert!((tree.node_prob(merged).unwrap() - 0.6).abs() < 1e-12);
        let mut below = tree.subtree_real_probs(merged).unwrap();
        below.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(below, vec![0.3, 0.3]);
        let leaf = tree.find_leaf(0.4, 1e-12).unwrap();
        assert_eq!(leaf.depth, 1);
        assert!(!tree.contains_leaf(merged, leaf).unwrap());
        assert!(tree.contains_leaf(root, leaf).unwrap());
    }

    /// All nondecreasing length profiles satisfying binary Kraft equality.
    fn length_profiles(n: usize) -> Vec<Vec<u32>> {
        fn go(n: usize, min_len: u32, budget: u64, unit: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if n == 0 {
                if budget == 0 {
                    out.push(acc.clone());
                }
                return;
            }
            for l in min_len..=unit {
                let w = 1u64 << (unit - l);
                if w > budget {
                    break;
                }
                // Remaining symbols each contribute at least 1 unit.
                if budget - w < (n as u64 - 1) {
                    continue;
                }
                acc.push(l);
                go(n - 1, l, budget - w, unit, acc, out);
                acc.pop();
            }
        }
        if n == 1 {
            return vec![vec![1]];
        }
        let unit = (n - 1) as u32;
        let mut out = Vec::new();
        go(n, 1, 1u64 << unit, unit, &mut Vec::new(), &mut out);
        out
    }

    /// Minimum average length over every full binary tree on these
    /// probabilities: scan all Kraft-tight length profiles and pair
    /// longer codewords with smaller probabilities.
    fn brute_force_best_length(probs: &[f64]) -> f64 {
        let mut sorted = probs.to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        length_profiles(probs.len())
            .into_iter()
            .map(|profile| {
                sorted
                    .iter()
                    .zip(&profile)
                    .map(|(&p, &l)| p * l as f64)
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn partitions(total: u32, max_part: u32, max_parts: usize) -> Vec<Vec<u32>> {
        fn go(rem: u32, cap: u32, slots: usize, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if rem == 0 {
                if !acc.is_empty() {
                    out.push(acc.clone());
                }
                return;
            }
            if slots == 0 {
                return;
            }
            for part in (1..=cap.min(rem)).rev() {
                acc.push(part);
                go(rem - part, part, slots - 1, acc, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        go(total, max_part, max_parts, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn optimal_against_exhaustive_tree_search() {
        for q in [8u32, 12] {
            for parts in partitions(q, q, 8) {
                if parts.len() < 2 {
                    continue;
                }
                let probs: Vec<f64> = parts.iter().map(|&k| k as f64 / q as f64).collect();
                let d = dist(&probs);
                let tree = build_huffman(&d, 2).unwrap();
                let best = brute_force_best_length(d.probs());
                assert!(
                    tree.average_length() <= best + 1e-9,
                    "suboptimal on {probs:?}: {} vs {best}",
                    tree.average_length()
                );
                assert!(
                    tree.average_length() >= best - 1e-9,
                    "impossible length on {probs:?}"
                );
            }
        }
    }

    fn arb_dist(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(1e-3..1.0f64, 2..=max_len).prop_map(|w| {
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #[test]
        fn redundancy_in_unit_interval(raw in arb_dist(12)) {
            let d = dist(&raw);
            let r = redundancy(&d, 2).unwrap();
            prop_assert!(r >= -1e-9);
            prop_assert!(r < 1.0);
        }

        #[test]
        fn redundancy_nonnegative_all_radixes(raw in arb_dist(10), radix in 2u32..=5) {
            let d = dist(&raw);
            prop_assert!(redundancy(&d, radix).unwrap() >= -1e-9);
        }

        #[test]
        fn longer_codewords_for_smaller_probs(raw in arb_dist(12), radix in 2u32..=4) {
            let d = dist(&raw);
            let tree = build_huffman(&d, radix).unwrap();
            let lengths = tree.code_lengths();
            let l = lengths.as_slice();
            let p = d.probs();
            for i in 0..p.len() {
                for j in (i + 1)..p.len() {
                    if p[i] > p[j] {
                        prop_assert!(l[i] <= l[j], "p {} > {} but l {} > {}", p[i], p[j], l[i], l[j]);
                    }
                }
            }
        }

        #[test]
        fn structural_invariants(raw in arb_dist(12), radix in 2u32..=5) {
            let d = dist(&raw);
            let tree = build_huffman(&d, radix).unwrap();
            prop_assert!(tree.kraft_identity());
            prop_assert!(tree.sums_consistent(1e-9));
            prop_assert!((tree.root_prob() - 1.0).abs() <= 1e-9);
            let padded = tree.real_leaf_count() + tree.dummy_count();
            prop_assert_eq!(padded % (radix as usize - 1), 1 % (radix as usize - 1));
            // Real-symbol Kraft sum never exceeds 1, and is 1 when no padding.
            let ks = tree.code_lengths().kraft_sum(radix);
            prop_assert!(ks <= 1.0 + 1e-9);
            if tree.dummy_count() == 0 {
                prop_assert!((ks - 1.0).abs() <= 1e-9);
            }
        }
    }
}
