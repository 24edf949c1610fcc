//! Product of the projected automaton with the full observer.

use crate::bfs::Successors;
use crate::des::{Des, EventId};
use crate::observer::{full_observer_step, Estimate, FullObserver, Projection};
use crate::stateset::StateId;

/// A state `(q, Z)` of `P(G) × H`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductState {
    pub nfa_state: StateId,
    pub set_state: Estimate,
}

/// Successors of `state` under `event` in the product of a fully observable
/// (projected) automaton `pg` with its own full observer.
pub fn product_step(pg: &Des, state: &ProductState, event: EventId) -> Vec<ProductState> {
    let targets = pg.successors(state.nfa_state, event);
    if targets.is_empty() {
        return Vec::new();
    }
    let set_state = full_observer_step(pg, &state.set_state, event);
    targets
        .iter()
        .map(|&q| ProductState {
            nfa_state: q,
            set_state: set_state.clone(),
        })
        .collect()
}

/// Compact product vertex: NFA state plus interned full-observer id.
pub(crate) type Vertex = (StateId, u32);

/// The product explored on demand. Labels are positions in the observable
/// alphabet.
pub(crate) struct LazyProduct<'p> {
    projection: &'p Projection,
    pub full: FullObserver<'p>,
}

impl<'p> LazyProduct<'p> {
    pub fn new(projection: &'p Projection) -> Self {
        LazyProduct {
            projection,
            full: FullObserver::new(projection),
        }
    }
}

impl Successors for LazyProduct<'_> {
    type Vertex = Vertex;
    type Label = usize;

    fn successors(&mut self, (q, z): Vertex, out: &mut Vec<(usize, Vertex)>) {
        for pos in 0..self.projection.alphabet.len() {
            let targets = &self.projection.rows[q][pos];
            if targets.is_empty() {
                continue;
            }
            let next = self.full.step(z, pos);
            out.extend(targets.iter().map(|r| (pos, (r, next))));
        }
    }
}
