//! Breadth-first search bounded by a number of steps.
//!
//! Instead of a per-vertex distance array, a single level counter travels
//! through the queue: the queue starts with `Level(0)` followed by the seeds,
//! and every time a level marker is dequeued the next one is appended behind
//! the current frontier. Per vertex we keep only a mark (membership in the
//! vertex table) and a parent link for path reconstruction.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

/// A step bound `k ∈ ℕ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KBound {
    Finite(u64),
    Infinite,
}

impl KBound {
    pub const MAX_FINITE: u64 = i64::MAX as u64;

    pub fn finite(k: u64) -> Self {
        assert!(k <= Self::MAX_FINITE, "k exceeds 2^63 - 1");
        KBound::Finite(k)
    }

    /// Whether a walk of `steps` edges stays within the bound.
    pub fn allows(self, steps: u64) -> bool {
        match self {
            KBound::Finite(k) => steps <= k,
            KBound::Infinite => true,
        }
    }

    /// Maps finite bounds larger than `limit` to [`KBound::Infinite`].
    pub fn clamp(self, limit: u64) -> Self {
        match self {
            KBound::Finite(k) if k > limit => KBound::Infinite,
            other => other,
        }
    }

    pub fn min_with(self, cap: u64) -> u64 {
        match self {
            KBound::Finite(k) => k.min(cap),
            KBound::Infinite => cap,
        }
    }
}

impl fmt::Display for KBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KBound::Finite(k) => write!(f, "{k}"),
            KBound::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid step bound `{0}` (expected a number up to 2^63 - 1 or `inf`)")]
pub struct KBoundParseError(String);

impl FromStr for KBound {
    type Err = KBoundParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(KBound::Infinite);
        }
        match s.parse::<u64>() {
            Ok(k) if k <= Self::MAX_FINITE => Ok(KBound::Finite(k)),
            _ => Err(KBoundParseError(s.to_string())),
        }
    }
}

/// A graph explored on demand.
pub trait Successors {
    type Vertex: Copy + Eq + Hash;
    type Label: Copy;

    /// Appends the labelled out-edges of `v` to `out`.
    fn successors(&mut self, v: Self::Vertex, out: &mut Vec<(Self::Label, Self::Vertex)>);
}

enum Item {
    Level(u64),
    Vertex(usize),
}

/// Vertices marked by [`bounded_bfs`], in marking order, with parent links.
#[derive(Debug, Clone)]
pub struct Marking<V, L> {
    vertices: Vec<V>,
    index: HashMap<V, usize>,
    parent: Vec<Option<(usize, L)>>,
    depth: u64,
    stopped_at: Option<usize>,
}

impl<V: Copy + Eq + Hash, L: Copy> Marking<V, L> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_marked(&self, v: &V) -> bool {
        self.index.contains_key(v)
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    /// Largest distance from a seed among the marked vertices.
    pub fn depth(&self) -> u64 {
        self.depth
    }

    /// The vertex that satisfied the stop predicate, if the search ended early.
    pub fn stopped_at(&self) -> Option<V> {
        self.stopped_at.map(|i| self.vertices[i])
    }

    /// Labels of a shortest path from some seed to `v`, plus that seed.
    pub fn path_to(&self, v: &V) -> Option<(V, Vec<L>)> {
        let mut cur = *self.index.get(v)?;
        let mut labels = Vec::new();
        while let Some((prev, label)) = self.parent[cur] {
            labels.push(label);
            cur = prev;
        }
        labels.reverse();
        Some((self.vertices[cur], labels))
    }
}

/// Marks every vertex within distance `k` of `seeds`.
///
/// `stop` is consulted for every newly marked vertex (seeds included); when it
/// returns true the search ends immediately and the vertex is reported by
/// [`Marking::stopped_at`]. Without an early stop the marked set is exactly
/// `{v : dist(seeds, v) ≤ k}`.
pub fn bounded_bfs<G, F>(
    graph: &mut G,
    seeds: &[G::Vertex],
    k: KBound,
    mut stop: F,
) -> Marking<G::Vertex, G::Label>
where
    G: Successors,
    F: FnMut(&G::Vertex) -> bool,
{
    let mut marking = Marking {
        vertices: Vec::new(),
        index: HashMap::new(),
        parent: Vec::new(),
        depth: 0,
        stopped_at: None,
    };
    let mut queue = VecDeque::new();
    queue.push_back(Item::Level(0));
    for &s in seeds {
        if let Entry::Vacant(slot) = marking.index.entry(s) {
            let i = marking.vertices.len();
            slot.insert(i);
            marking.vertices.push(s);
            marking.parent.push(None);
            queue.push_back(Item::Vertex(i));
            if stop(&s) {
                marking.stopped_at = Some(i);
                return marking;
            }
        }
    }

    let mut level = 0u64;
    let mut out = Vec::new();
    while let Some(item) = queue.pop_front() {
        match item {
            Item::Level(u) => {
                if k == KBound::Finite(u) || queue.is_empty() {
                    break;
                }
                level = u;
                queue.push_back(Item::Level(u + 1));
            }
            Item::Vertex(i) => {
                out.clear();
                graph.successors(marking.vertices[i], &mut out);
                for &(label, v) in &out {
                    if let Entry::Vacant(slot) = marking.index.entry(v) {
                        let j = marking.vertices.len();
                        slot.insert(j);
                        marking.vertices.push(v);
                        marking.parent.push(Some((i, label)));
                        marking.depth = level + 1;
                        queue.push_back(Item::Vertex(j));
                        if stop(&v) {
                            marking.stopped_at = Some(j);
                            return marking;
                        }
                    }
                }
            }
        }
    }
    marking
}
