//! Indices (compositions), the weight-`w` index set and trees of indices.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite sequence of positive integers. Formats as `(a,b,c)`; the empty
/// index is `()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Index {
    parts: Vec<u32>,
    weight: u32,
}

impl Index {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Parse(format!(
                "index parts must be positive: {parts:?}"
            )));
        }
        let weight = parts.iter().sum();
        Ok(Index { parts, weight })
    }

    pub fn empty() -> Self {
        Index::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The index with `part` appended.
    pub fn child(&self, part: u32) -> Index {
        assert!(part > 0);
        let mut parts = self.parts.clone();
        parts.push(part);
        Index {
            parts,
            weight: self.weight + part,
        }
    }

    /// Prefix of the given length.
    pub fn prefix(&self, len: usize) -> Index {
        let parts = self.parts[..len].to_vec();
        let weight = parts.iter().sum();
        Index { parts, weight }
    }
}

/// Shorthand for literal indices in tests and fixtures. Panics on a zero part.
#[macro_export]
macro_rules! idx {
    ($($p:expr),* $(,)?) => {
        $crate::indices::Index::new(vec![$($p),*]).expect("positive parts")
    };
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Index {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("index must be parenthesised: `{s}`")))?;
        if inner.trim().is_empty() {
            return Ok(Index::empty());
        }
        let parts = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad index part `{t}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Index::new(parts)
    }
}

impl Serialize for Index {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Index {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All compositions of `w` in canonical order: descending lexicographic, so
/// `(w)` comes first and `(1,…,1)` last.
pub fn enumerate_k(w: u32) -> Vec<Index> {
    fn rec(rest: u32, prefix: &mut Vec<u32>, out: &mut Vec<Index>) {
        if rest == 0 {
            out.push(Index::new(prefix.clone()).expect("positive parts"));
            return;
        }
        for first in (1..=rest).rev() {
            prefix.push(first);
            rec(rest - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(if w == 0 { 1 } else { 1 << (w - 1).min(30) });
    rec(w, &mut Vec::new(), &mut out);
    out
}

/// `#K_w`.
pub fn k_count(w: u32) -> u64 {
    if w == 0 {
        1
    } else {
        1u64 << (w - 1)
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone)]
struct Node {
    parent: Option<NodeId>,
    /// Last part of the node's index; 0 for the root.
    label: u32,
    depth: usize,
    weight: u32,
    /// `(appended part, child id)`, in insertion order.
    children: Vec<(u32, NodeId)>,
}

/// A prefix-closed rooted tree of indices. Node 0 is the empty index.
#[derive(Debug, Clone)]
pub struct IndexTree {
    nodes: Vec<Node>,
}

impl Default for IndexTree {
    fn default() -> Self {
        Self::new()
    }
}

impl IndexTree {
    /// The single-node tree `()`.
    pub fn new() -> Self {
        IndexTree {
            nodes: vec![Node {
                parent: None,
                label: 0,
                depth: 0,
                weight: 0,
                children: Vec::new(),
            }],
        }
    }

    pub const ROOT: NodeId = 0;

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn child(&self, node: NodeId, part: u32) -> Option<NodeId> {
        self.nodes[node]
            .children
            .iter()
            .find(|&&(p, _)| p == part)
            .map(|&(_, id)| id)
    }

    /// Returns the child `node ⌢ part`, creating it if absent.
    pub fn add_child(&mut self, node: NodeId, part: u32) -> NodeId {
        assert!(part > 0, "index parts are positive");
        if let Some(id) = self.child(node, part) {
            return id;
        }
        let id = self.nodes.len();
        let parent = &self.nodes[node];
        let new = Node {
            parent: Some(node),
            label: part,
            depth: parent.depth + 1,
            weight: parent.weight + part,
            children: Vec::new(),
        };
        self.nodes[node].children.push((part, id));
        self.nodes.push(new);
        id
    }

    /// Inserts `k` and all its prefixes; returns the node of `k`.
    pub fn insert(&mut self, k: &Index) -> NodeId {
        k.parts()
            .iter()
            .fold(Self::ROOT, |node, &part| self.add_child(node, part))
    }

    /// Prefix closure of the given indices.
    pub fn from_indices<'a>(indices: impl IntoIterator<Item = &'a Index>) -> Self {
        let mut t = IndexTree::new();
        for k in indices {
            t.insert(k);
        }
        t
    }

    pub fn find(&self, k: &Index) -> Option<NodeId> {
        k.parts()
            .iter()
            .try_fold(Self::ROOT, |node, &part| self.child(node, part))
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.nodes[node].parent
    }

    pub fn label(&self, node: NodeId) -> u32 {
        self.nodes[node].label
    }

    pub fn depth(&self, node: NodeId) -> usize {
        self.nodes[node].depth
    }

    pub fn weight(&self, node: NodeId) -> u32 {
        self.nodes[node].weight
    }

    pub fn children(&self, node: NodeId) -> impl Iterator<Item = (u32, NodeId)> + '_ {
        self.nodes[node].children.iter().copied()
    }

    pub fn max_label(&self) -> u32 {
        self.nodes.iter().map(|n| n.label).max().unwrap_or(0)
    }

    /// Reconstructs the index of a node by walking to the root.
    pub fn index(&self, node: NodeId) -> Index {
        let mut parts = Vec::with_capacity(self.nodes[node].depth);
        let mut cur = node;
        while let Some(parent) = self.nodes[cur].parent {
            parts.push(self.nodes[cur].label);
            cur = parent;
        }
        parts.reverse();
        Index::new(parts).expect("tree labels are positive")
    }

    /// Node ids in depth-first pre-order (children in insertion order).
    pub fn dfs_preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![Self::ROOT];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.nodes[n].children.iter().rev().map(|&(_, c)| c));
        }
        out
    }

    /// Edges `(parent, child, label)` in the order a post-order DFS performs
    /// its updates: every edge below a child precedes the edge into it.
    pub fn postorder_edges(&self) -> Vec<(NodeId, NodeId, u32)> {
        let mut out = Vec::with_capacity(self.nodes.len().saturating_sub(1));
        // (node, next child position)
        let mut stack: Vec<(NodeId, usize)> = vec![(Self::ROOT, 0)];
        while let Some(top) = stack.last_mut() {
            let (node, pos) = *top;
            if let Some(&(_, child)) = self.nodes[node].children.get(pos) {
                top.1 += 1;
                stack.push((child, 0));
            } else {
                stack.pop();
                if let Some(parent) = self.nodes[node].parent {
                    out.push((parent, node, self.nodes[node].label));
                }
            }
        }
        out
    }

    /// Map from index to node id.
    pub fn index_map(&self) -> HashMap<Index, NodeId> {
        (0..self.nodes.len()).map(|n| (self.index(n), n)).collect()
    }
}

/// The chain of all prefixes of `k`.
pub fn prefix_tree(k: &Index) -> IndexTree {
    let mut t = IndexTree::new();
    t.insert(k);
    t
}

/// The tree on `K_{<=w}`, built depth first with children `k⌢a` for
/// `a = 1..=w - weight(k)` in ascending order.
pub fn bounded_weight_tree(w: u32) -> IndexTree {
    let mut t = IndexTree::new();
    let mut stack = vec![IndexTree::ROOT];
    while let Some(node) = stack.pop() {
        let rest = w - t.weight(node);
        let first_child = t.len();
        for a in 1..=rest {
            t.add_child(node, a);
        }
        stack.extend((first_child..t.len()).rev());
    }
    t
}

/// Sum of node depths.
pub fn depth_sum(t: &IndexTree) -> u64 {
    (0..t.len()).map(|n| t.depth(n) as u64).sum()
}
