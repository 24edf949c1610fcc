//! Projected automaton and (full) observer construction.

use std::collections::{HashMap, VecDeque};

use crate::des::{Des, EventId, EventTable};
use crate::stateset::{StateId, StateSet};

/// A state of the full observer: a nonempty estimate, or the empty-set sink.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Estimate {
    Set(StateSet),
    Sink,
}

impl Estimate {
    /// Wraps a set, mapping the empty set to [`Estimate::Sink`].
    pub fn from_set(set: StateSet) -> Self {
        if set.is_empty() {
            Estimate::Sink
        } else {
            Estimate::Set(set)
        }
    }

    pub fn is_sink(&self) -> bool {
        matches!(self, Estimate::Sink)
    }

    pub fn as_set(&self) -> Option<&StateSet> {
        match self {
            Estimate::Set(s) => Some(s),
            Estimate::Sink => None,
        }
    }
}

/// Transition rows of the projected automaton: `rows[q][i]` is
/// `UR(δ(UR({q}), alphabet[i]))`.
#[derive(Debug, Clone)]
pub(crate) struct Projection {
    pub alphabet: Vec<EventId>,
    pub rows: Vec<Vec<StateSet>>,
    pub initial: StateSet,
}

impl Projection {
    pub fn new(des: &Des) -> Self {
        let n = des.state_count();
        let alphabet = des.events().observable();
        let closures: Vec<StateSet> = (0..n)
            .map(|q| des.unobservable_reach(&StateSet::singleton(n, q)))
            .collect();
        let close = |set: &StateSet| {
            let mut out = StateSet::empty(n);
            for r in set.iter() {
                out.union_with(&closures[r]);
            }
            out
        };
        let rows = (0..n)
            .map(|q| {
                alphabet
                    .iter()
                    .map(|&a| close(&des.post(&closures[q], a)))
                    .collect()
            })
            .collect();
        Projection {
            alphabet,
            rows,
            initial: close(des.initial()),
        }
    }

    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    /// `δ(Z, P⁻¹(alphabet[pos]))` for an arbitrary (not necessarily closed) `Z`.
    pub fn step_set(&self, set: &StateSet, pos: usize) -> StateSet {
        let mut out = StateSet::empty(self.state_count());
        for q in set.iter() {
            out.union_with(&self.rows[q][pos]);
        }
        out
    }
}

/// The projected automaton: same states, observable events only, initial
/// set `UR(I)` and transitions `γ(q,a) = δ(q, P⁻¹(a))`.
///
/// The event table of the result lists the observable events of `des` in
/// their original order. Secret and nonsecret sets are carried over.
pub fn project(des: &Des) -> Des {
    let projection = Projection::new(des);
    // An event table cannot be empty: without observable events the
    // projection keeps the source table and has no transitions.
    let events = EventTable::new(
        projection
            .alphabet
            .iter()
            .map(|&e| des.events().get(e).clone()),
    )
    .unwrap_or_else(|_| des.events().clone());
    let mut builder = Des::builder(events, des.state_count())
        .initial(projection.initial.iter())
        .secret(des.secret().iter())
        .nonsecret(des.nonsecret().iter());
    if let Some(names) = des.state_names() {
        builder = builder.names(names.to_vec());
    }
    for (q, row) in projection.rows.iter().enumerate() {
        for (pos, targets) in row.iter().enumerate() {
            for r in targets.iter() {
                builder.add_transition(q, pos, r);
            }
        }
    }
    builder.build().expect("projection of a valid DES is valid")
}

/// `γ(q, a)` for an observable event `a` of `des`.
pub fn projected_successors(des: &Des, state: StateId, event: EventId) -> StateSet {
    assert!(des.events().is_observable(event), "event must be observable");
    let n = des.state_count();
    let start = des.unobservable_reach(&StateSet::singleton(n, state));
    des.unobservable_reach(&des.post(&start, event))
}

/// One step of the full observer: `δ(Z, P⁻¹(a))`, with the empty set reported
/// as [`Estimate::Sink`]. The sink is absorbing.
pub fn full_observer_step(des: &Des, estimate: &Estimate, event: EventId) -> Estimate {
    assert!(des.events().is_observable(event), "event must be observable");
    match estimate {
        Estimate::Sink => Estimate::Sink,
        Estimate::Set(z) => {
            let closed = des.unobservable_reach(z);
            Estimate::from_set(des.unobservable_reach(&des.post(&closed, event)))
        }
    }
}

/// The accessible part of the subset construction over observable events.
///
/// Every stored estimate is nonempty; a missing transition leads to the
/// implicit empty-set sink. States are numbered in breadth-first discovery
/// order (events tried in table order), so [`ObserverAutomaton::access_word`]
/// returns the shortest, then lexicographically least, observation reaching
/// each state.
#[derive(Debug, Clone)]
pub struct ObserverAutomaton {
    alphabet: Vec<EventId>,
    states: Vec<StateSet>,
    index: HashMap<StateSet, usize>,
    next: Vec<Vec<Option<usize>>>,
    parent: Vec<Option<(usize, usize)>>,
}

impl ObserverAutomaton {
    pub(crate) fn from_projection(projection: &Projection) -> Self {
        let mut obs = ObserverAutomaton {
            alphabet: projection.alphabet.clone(),
            states: vec![projection.initial.clone()],
            index: HashMap::from([(projection.initial.clone(), 0)]),
            next: Vec::new(),
            parent: vec![None],
        };
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let mut row = Vec::with_capacity(obs.alphabet.len());
            for pos in 0..obs.alphabet.len() {
                let target = projection.step_set(&obs.states[i], pos);
                if target.is_empty() {
                    row.push(None);
                    continue;
                }
                let j = match obs.index.get(&target) {
                    Some(&j) => j,
                    None => {
                        let j = obs.states.len();
                        obs.index.insert(target.clone(), j);
                        obs.states.push(target);
                        obs.parent.push(Some((i, pos)));
                        queue.push_back(j);
                        j
                    }
                };
                row.push(Some(j));
            }
            obs.next.push(row);
        }
        obs
    }

    /// Observable events, as indices into the source event table.
    pub fn alphabet(&self) -> &[EventId] {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn state(&self, i: usize) -> &StateSet {
        &self.states[i]
    }

    pub fn states(&self) -> &[StateSet] {
        &self.states
    }

    pub fn find(&self, set: &StateSet) -> Option<usize> {
        self.index.get(set).copied()
    }

    /// Successor of state `i` under the observable event at `pos` in
    /// [`alphabet`](Self::alphabet); `None` is the sink.
    pub fn next(&self, i: usize, pos: usize) -> Option<usize> {
        self.next[i][pos]
    }

    /// Successor under a source event id; `None` when the event is not in
    /// the alphabet or leads to the sink.
    pub fn next_event(&self, i: usize, event: EventId) -> Option<usize> {
        let pos = self.alphabet.iter().position(|&a| a == event)?;
        self.next(i, pos)
    }

    /// State reached by an observation string, or `None` for the sink.
    pub fn run(&self, word: &[EventId]) -> Option<usize> {
        word.iter()
            .try_fold(self.initial(), |i, &a| self.next_event(i, a))
    }

    /// Shortest (then lexicographically least) observation reaching state `i`.
    pub fn access_word(&self, i: usize) -> Vec<EventId> {
        let mut word = Vec::new();
        let mut cur = i;
        while let Some((prev, pos)) = self.parent[cur] {
            word.push(self.alphabet[pos]);
            cur = prev;
        }
        word.reverse();
        word
    }

    pub fn transition_count(&self) -> usize {
        self.next.iter().flatten().filter(|t| t.is_some()).count()
    }

    /// All stored transitions as `(source, event, target)` triples.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, EventId, usize)> + '_ {
        self.next.iter().enumerate().flat_map(move |(i, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(pos, t)| t.map(|j| (i, self.alphabet[pos], j)))
        })
    }
}

/// Builds the observer of `des`.
pub fn observer(des: &Des) -> ObserverAutomaton {
    ObserverAutomaton::from_projection(&Projection::new(des))
}

/// Lazily explored part of the full observer, with interned estimates.
///
/// Identifiers are dense `u32`s; [`FullObserver::SINK`] stands for `∅`.
#[derive(Debug)]
pub(crate) struct FullObserver<'p> {
    projection: &'p Projection,
    sets: Vec<StateSet>,
    index: HashMap<StateSet, u32>,
    next: Vec<Vec<Option<u32>>>,
}

impl<'p> FullObserver<'p> {
    pub const SINK: u32 = u32::MAX;

    pub fn new(projection: &'p Projection) -> Self {
        FullObserver {
            projection,
            sets: Vec::new(),
            index: HashMap::new(),
            next: Vec::new(),
        }
    }

    pub fn intern(&mut self, set: StateSet) -> u32 {
        if set.is_empty() {
            return Self::SINK;
        }
        if let Some(&id) = self.index.get(&set) {
            return id;
        }
        let id = u32::try_from(self.sets.len()).expect("full observer exceeds u32 states");
        assert!(id != Self::SINK);
        self.index.insert(set.clone(), id);
        self.sets.push(set);
        self.next.push(vec![None; self.projection.alphabet.len()]);
        id
    }

    pub fn step(&mut self, id: u32, pos: usize) -> u32 {
        if id == Self::SINK {
            return Self::SINK;
        }
        if let Some(t) = self.next[id as usize][pos] {
            return t;
        }
        let target = self
            .projection
            .step_set(&self.sets[id as usize], pos);
        let t = self.intern(target);
        self.next[id as usize][pos] = Some(t);
        t
    }

    /// Number of distinct nonempty estimates seen so far.
    pub fn len(&self) -> usize {
        self.sets.len()
    }
}
