//! Tree surgery: subtree decomposition, backbone canonicalization, and
//! redundancy-preserving leaf splits.

use crate::dist::{entropy_of, ProbabilityMultiset};
use crate::huffman::{build_huffman, CodeTree, NodeId};
use crate::{Error, Result};

const MATCH_TOL: f64 = 1e-9;

/// Split of a code tree at an internal node of probability `u`: `upper`
/// is the source with the subtree contracted to one symbol of weight
/// `u`; `lower` is the subtree's distribution rescaled to sum 1.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub u: f64,
    pub upper: ProbabilityMultiset,
    pub lower: ProbabilityMultiset,
}

/// Decomposes `tree` at `node`. The node must be internal and must not
/// be the root (contracting the root is the identity).
pub fn decompose(tree: &CodeTree, node: NodeId) -> Result<Decomposition> {
    if node == tree.root() {
        return Err(Error::RootNode);
    }
    if !tree.is_internal(node)? {
        return Err(Error::NotInternal(format!("{node} is a leaf")));
    }
    let u = tree.node_prob(node)?;
    if u <= 0.0 || u >= 1.0 {
        return Err(Error::OutOfRange {
            name: "u",
            value: u,
            range: "(0, 1)",
        });
    }
    let under = tree.subtree_real_probs(node)?;
    let lower: Vec<f64> = under.iter().map(|&q| q / u).collect();
    let mut upper = Vec::new();
    for (leaf, symbol, prob) in tree.leaves() {
        if symbol.is_some() && !tree.contains_leaf(node, leaf)? {
            upper.push(prob);
        }
    }
    upper.push(u);
    Ok(Decomposition {
        u,
        upper: ProbabilityMultiset::new(&upper)?,
        lower: ProbabilityMultiset::new(&lower)?,
    })
}

/// Contracts subtrees that avoid the designated symbol until every
/// internal node of the binary Huffman tree has that symbol below it.
/// The result has the shape {x₁, …, x_m, p} and never has larger
/// Huffman redundancy than the input.
pub fn canonicalize(dist: &ProbabilityMultiset, p: f64) -> Result<ProbabilityMultiset> {
    if !dist.contains(p, MATCH_TOL) {
        return Err(Error::MissingSymbol { p, tol: MATCH_TOL });
    }
    let mut cur = dist.clone();
    loop {
        let tree = build_huffman(&cur, 2)?;
        let leaf = tree
            .find_leaf(p, MATCH_TOL)
            .ok_or(Error::MissingSymbol { p, tol: MATCH_TOL })?;
        let mut missing: Vec<(NodeId, f64)> = Vec::new();
        for id in tree.internal_nodes() {
            if !tree.contains_leaf(id, leaf)? {
                missing.push((id, tree.node_prob(id)?));
            }
        }
        let Some(&(node, u)) = missing.iter().min_by(|a, b| {
            a.0.depth
                .cmp(&b.0.depth)
                .then(b.1.total_cmp(&a.1))
                .then(a.0.index.cmp(&b.0.index))
        }) else {
            return Ok(cur);
        };
        let under = tree.subtree_real_probs(node)?;
        let mut rest = cur.probs().to_vec();
        for q in under {
            let at = rest
                .iter()
                .position(|&x| x == q)
                .expect("subtree leaves come from the current multiset");
            rest.remove(at);
        }
        rest.push(u);
        cur = ProbabilityMultiset::new(&rest)?;
    }
}

/// Replaces the symbol at `leaf_index` (into the sorted-descending
/// order) by two halves. Entropy grows by exactly the split probability,
/// in bits.
pub fn split_leaf(dist: &ProbabilityMultiset, leaf_index: usize) -> Result<ProbabilityMultiset> {
    let probs = dist.probs();
    if leaf_index >= probs.len() {
        return Err(Error::IndexOutOfRange {
            index: leaf_index,
            len: probs.len(),
        });
    }
    let q = probs[leaf_index];
    if q <= 0.0 {
        return Err(Error::ZeroLeaf);
    }
    let mut next = probs.to_vec();
    next.remove(leaf_index);
    next.push(q / 2.0);
    next.push(q / 2.0);
    let out = ProbabilityMultiset::new(&next)?;
    let gain = entropy_of(out.probs(), 2) - entropy_of(probs, 2);
    assert!(
        (gain - q).abs() <= 1e-9,
        "splitting {q} changed entropy by {gain}"
    );
    Ok(out)
}
