//! Ordered rooted trees with per-vertex generation indices.

use crate::error::{Error, Result};

/// Highest generation index the data model accepts; exceeding it is a
/// parse error (it guards against corrupt input).
pub const MAX_GENERATION: u32 = u16::MAX as u32;

/// One vertex of an [`OrderedTree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    /// Parent index, `None` for the root.
    pub parent: Option<usize>,
    /// Distance from the root in edges.
    pub generation: u32,
    /// Child indices in order of appearance. The order is significant.
    pub children: Vec<usize>,
}

/// An ordered rooted tree. Vertex 0 is the root; every vertex's parent
/// precedes it, and a vertex's children are ordered by appearance.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedTree {
    vertices: Vec<Vertex>,
}

/// Descriptive statistics of a single tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSummary {
    /// Total number of vertices.
    pub total_vertices: usize,
    /// Largest generation index present (0 for a single vertex).
    pub height: u32,
    /// Number of vertices with no offspring.
    pub leaves: usize,
    /// Vertices per generation, starting at generation 0.
    pub per_generation_counts: Vec<usize>,
}

impl OrderedTree {
    /// Builds a tree from a parent-pointer array: entry 0 must be -1 (the
    /// root) and entry `j >= 1` must point at an earlier vertex.
    pub fn from_parents(parents: &[i64]) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidParameter(reason);
        if parents.is_empty() {
            return Err(invalid("a tree needs at least a root vertex".into()));
        }
        if parents[0] != -1 {
            return Err(invalid(format!(
                "vertex 0 must be the root (parent -1), got {}",
                parents[0]
            )));
        }
        let mut vertices = Vec::with_capacity(parents.len());
        vertices.push(Vertex { parent: None, generation: 0, children: Vec::new() });
        for (j, &p) in parents.iter().enumerate().skip(1) {
            if p == -1 {
                return Err(invalid(format!("vertex {j} is a second root")));
            }
            if p < 0 || p as usize >= j {
                return Err(invalid(format!(
                    "vertex {j} has parent {p}, which does not precede it"
                )));
            }
            let p = p as usize;
            let generation = vertices[p].generation + 1;
            if generation > MAX_GENERATION {
                return Err(invalid(format!(
                    "generation {generation} exceeds the supported maximum {MAX_GENERATION}"
                )));
            }
            vertices.push(Vertex { parent: Some(p), generation, children: Vec::new() });
            vertices[p].children.push(j);
        }
        Ok(OrderedTree { vertices })
    }

    /// The parent-pointer array this tree round-trips through.
    pub fn parents(&self) -> Vec<i64> {
        self.vertices
            .iter()
            .map(|v| v.parent.map_or(-1, |p| p as i64))
            .collect()
    }

    /// A tree consisting of a single root vertex.
    pub fn single_vertex() -> Self {
        OrderedTree::from_parents(&[-1]).expect("single root is valid")
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a tree always has a root
    }

    pub fn vertex(&self, index: usize) -> &Vertex {
        &self.vertices[index]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter()
    }

    /// Number of offspring of vertex `index`.
    pub fn offspring_count(&self, index: usize) -> usize {
        self.vertices[index].children.len()
    }

    /// Largest generation index present.
    pub fn max_generation(&self) -> u32 {
        self.vertices.iter().map(|v| v.generation).max().unwrap_or(0)
    }

    /// Per-tree descriptive statistics.
    pub fn summary(&self) -> TreeSummary {
        let height = self.max_generation();
        let mut per_generation_counts = vec![0usize; height as usize + 1];
        let mut leaves = 0usize;
        for v in &self.vertices {
            per_generation_counts[v.generation as usize] += 1;
            if v.children.is_empty() {
                leaves += 1;
            }
        }
        TreeSummary {
            total_vertices: self.vertices.len(),
            height,
            leaves,
            per_generation_counts,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex_summary() {
        let t = OrderedTree::single_vertex();
        let s = t.summary();
        assert_eq!(s.total_vertices, 1);
        assert_eq!(s.height, 0);
        assert_eq!(s.leaves, 1);
        assert_eq!(s.per_generation_counts, vec![1]);
    }

    #[test]
    fn hand_counted_summary() {
        // root, two children, two grandchildren under vertex 1
        let t = OrderedTree::from_parents(&[-1, 0, 0, 1, 1]).unwrap();
        let s = t.summary();
        assert_eq!(s.total_vertices, 5);
        assert_eq!(s.height, 2);
        assert_eq!(s.leaves, 3); // vertices 2, 3, 4
        assert_eq!(s.per_generation_counts, vec![1, 2, 2]);
    }

    #[test]
    fn generations_follow_parents() {
        let t = OrderedTree::from_parents(&[-1, 0, 1]).unwrap();
        assert_eq!(t.vertex(0).generation, 0);
        assert_eq!(t.vertex(1).generation, 1);
        assert_eq!(t.vertex(2).generation, 2);
        assert_eq!(t.summary().per_generation_counts, vec![1, 1, 1]);
    }

    #[test]
    fn child_order_is_appearance_order() {
        let t = OrderedTree::from_parents(&[-1, 0, 0, 0]).unwrap();
        assert_eq!(t.vertex(0).children, vec![1, 2, 3]);
    }

    #[test]
    fn invalid_parent_arrays_rejected() {
        assert!(OrderedTree::from_parents(&[]).is_err());
        assert!(OrderedTree::from_parents(&[0]).is_err()); // root not marked
        assert!(OrderedTree::from_parents(&[-1, -1]).is_err()); // two roots
        assert!(OrderedTree::from_parents(&[-1, 1]).is_err()); // self-parent
        assert!(OrderedTree::from_parents(&[-1, 2, 1]).is_err()); // forward ref
        assert!(OrderedTree::from_parents(&[-1, -2]).is_err()); // nonsense marker
    }

    #[test]
    fn generation_cap_is_enforced() {
        // a path of MAX_GENERATION + 1 vertices is the deepest legal tree
        let path = |len: usize| {
            let mut parents = vec![-1i64];
            parents.extend((0..len as i64 - 1).collect::<Vec<_>>());
            parents
        };
        let deepest = OrderedTree::from_parents(&path(MAX_GENERATION as usize + 1)).unwrap();
        assert_eq!(deepest.max_generation(), MAX_GENERATION);
        assert!(OrderedTree::from_parents(&path(MAX_GENERATION as usize + 2)).is_err());
    }
}
