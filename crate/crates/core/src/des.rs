//! The discrete-event system model: a finite automaton whose events are
//! split into observable and unobservable ones, with secret and nonsecret
//! state sets.

use std::borrow::Cow;
use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::stateset::{StateId, StateSet};

/// Index of an event inside an [`EventTable`].
pub type EventId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub name: String,
    pub observable: bool,
}

/// Ordered, nonempty list of uniquely named events.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventTable {
    entries: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesError {
    #[error("the event table is empty")]
    NoEvents,
    #[error("event names must be nonempty")]
    EmptyEventName,
    #[error("duplicate event name `{0}`")]
    DuplicateEvent(String),
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("state names must be nonempty")]
    EmptyStateName,
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("a DES needs at least one state")]
    NoStates,
    #[error("state index {index} out of range (state count {count})")]
    StateOutOfRange { index: StateId, count: usize },
    #[error("event index {index} out of range (event count {count})")]
    EventOutOfRange { index: EventId, count: usize },
    #[error("expected {expected} state names, got {got}")]
    NameCountMismatch { expected: usize, got: usize },
    #[error("the set of initial states is empty")]
    EmptyInitial,
    #[error("state `{0}` is declared both secret and nonsecret")]
    SecretNonsecretOverlap(String),
}

impl EventTable {
    pub fn new<I: IntoIterator<Item = Event>>(entries: I) -> Result<Self, DesError> {
        let entries: Vec<Event> = entries.into_iter().collect();
        if entries.is_empty() {
            return Err(DesError::NoEvents);
        }
        let mut seen = HashSet::new();
        for e in &entries {
            if e.name.is_empty() {
                return Err(DesError::EmptyEventName);
            }
            if !seen.insert(e.name.as_str()) {
                return Err(DesError::DuplicateEvent(e.name.clone()));
            }
        }
        Ok(EventTable { entries })
    }

    /// Convenience constructor from `(name, observable)` pairs.
    pub fn from_pairs<'a, I: IntoIterator<Item = (&'a str, bool)>>(
        pairs: I,
    ) -> Result<Self, DesError> {
        Self::new(pairs.into_iter().map(|(name, observable)| Event {
            name: name.to_string(),
            observable,
        }))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, event: EventId) -> &Event {
        &self.entries[event]
    }

    pub fn name(&self, event: EventId) -> &str {
        &self.entries[event].name
    }

    pub fn is_observable(&self, event: EventId) -> bool {
        self.entries[event].observable
    }

    pub fn find(&self, name: &str) -> Option<EventId> {
        self.entries.iter().position(|e| e.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.entries.iter()
    }

    /// Observable events in table order.
    pub fn observable(&self) -> Vec<EventId> {
        (0..self.len()).filter(|&e| self.is_observable(e)).collect()
    }

    pub fn unobservable(&self) -> Vec<EventId> {
        (0..self.len()).filter(|&e| !self.is_observable(e)).collect()
    }

    /// Returns a table with `event` appended; fails on a name collision.
    pub fn with_event(&self, event: Event) -> Result<Self, DesError> {
        let mut entries = self.entries.clone();
        entries.push(event);
        Self::new(entries)
    }

    /// Renders an event string as space-separated names.
    pub fn render(&self, word: &[EventId]) -> String {
        word.iter()
            .map(|&e| self.name(e))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub source: StateId,
    pub event: EventId,
    pub target: StateId,
}

/// A discrete-event system.
///
/// Values are immutable once built; construct them with [`DesBuilder`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Des {
    events: EventTable,
    state_count: usize,
    /// Transitions in insertion order, without duplicates.
    transitions: Vec<Transition>,
    /// `successors[q][e]` is the sorted target list of `(q, e)`.
    successors: Vec<Vec<Vec<StateId>>>,
    initial: StateSet,
    secret: StateSet,
    nonsecret: StateSet,
    state_names: Option<Vec<String>>,
}

/// Incremental constructor for [`Des`]. Validation happens in [`DesBuilder::build`].
#[derive(Debug, Clone)]
pub struct DesBuilder {
    events: EventTable,
    state_count: usize,
    transitions: Vec<Transition>,
    initial: Vec<StateId>,
    secret: Vec<StateId>,
    nonsecret: Vec<StateId>,
    state_names: Option<Vec<String>>,
}

impl DesBuilder {
    pub fn new(events: EventTable, state_count: usize) -> Self {
        DesBuilder {
            events,
            state_count,
            transitions: Vec::new(),
            initial: Vec::new(),
            secret: Vec::new(),
            nonsecret: Vec::new(),
            state_names: None,
        }
    }

    pub fn transition(mut self, source: StateId, event: EventId, target: StateId) -> Self {
        self.add_transition(source, event, target);
        self
    }

    pub fn add_transition(&mut self, source: StateId, event: EventId, target: StateId) {
        self.transitions.push(Transition {
            source,
            event,
            target,
        });
    }

    pub fn initial<I: IntoIterator<Item = StateId>>(mut self, states: I) -> Self {
        self.initial.extend(states);
        self
    }

    pub fn secret<I: IntoIterator<Item = StateId>>(mut self, states: I) -> Self {
        self.secret.extend(states);
        self
    }

    pub fn nonsecret<I: IntoIterator<Item = StateId>>(mut self, states: I) -> Self {
        self.nonsecret.extend(states);
        self
    }

    /// Marks every state that is not secret as nonsecret (no neutral states).
    pub fn nonsecret_complement(mut self) -> Self {
        let secret: HashSet<_> = self.secret.iter().copied().collect();
        self.nonsecret = (0..self.state_count)
            .filter(|q| !secret.contains(q))
            .collect();
        self
    }

    pub fn names(mut self, names: Vec<String>) -> Self {
        self.state_names = Some(names);
        self
    }

    pub fn build(self) -> Result<Des, DesError> {
        let n = self.state_count;
        if n == 0 {
            return Err(DesError::NoStates);
        }
        let check_state = |q: StateId| {
            if q < n {
                Ok(q)
            } else {
                Err(DesError::StateOutOfRange { index: q, count: n })
            }
        };
        if let Some(names) = &self.state_names {
            if names.len() != n {
                return Err(DesError::NameCountMismatch {
                    expected: n,
                    got: names.len(),
                });
            }
            let mut seen = HashSet::new();
            for name in names {
                if name.is_empty() {
                    return Err(DesError::EmptyStateName);
                }
                if !seen.insert(name.as_str()) {
                    return Err(DesError::DuplicateState(name.clone()));
                }
            }
        }

        let mut successors = vec![vec![Vec::new(); self.events.len()]; n];
        let mut seen = HashSet::new();
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for t in self.transitions {
            check_state(t.source)?;
            check_state(t.target)?;
            if t.event >= self.events.len() {
                return Err(DesError::EventOutOfRange {
                    index: t.event,
                    count: self.events.len(),
                });
            }
            if seen.insert(t) {
                transitions.push(t);
                successors[t.source][t.event].push(t.target);
            }
        }
        for row in &mut successors {
            for targets in row {
                targets.sort_unstable();
            }
        }

        let to_set = |states: &[StateId]| -> Result<StateSet, DesError> {
            let mut set = StateSet::empty(n);
            for &q in states {
                set.insert(check_state(q)?);
            }
            Ok(set)
        };
        let initial = to_set(&self.initial)?;
        let secret = to_set(&self.secret)?;
        let nonsecret = to_set(&self.nonsecret)?;
        if initial.is_empty() {
            return Err(DesError::EmptyInitial);
        }
        if let Some(q) = secret.intersection(&nonsecret).first() {
            let name = match &self.state_names {
                Some(names) => names[q].clone(),
                None => q.to_string(),
            };
            return Err(DesError::SecretNonsecretOverlap(name));
        }

        Ok(Des {
            events: self.events,
            state_count: n,
            transitions,
            successors,
            initial,
            secret,
            nonsecret,
            state_names: self.state_names,
        })
    }
}

impl Des {
    pub fn builder(events: EventTable, state_count: usize) -> DesBuilder {
        DesBuilder::new(events, state_count)
    }

    pub fn events(&self) -> &EventTable {
        &self.events
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn successors(&self, state: StateId, event: EventId) -> &[StateId] {
        &self.successors[state][event]
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn secret(&self) -> &StateSet {
        &self.secret
    }

    pub fn nonsecret(&self) -> &StateSet {
        &self.nonsecret
    }

    /// States that are neither secret nor nonsecret.
    pub fn neutral(&self) -> StateSet {
        let mut out = self.secret.complement();
        out.difference_with(&self.nonsecret);
        out
    }

    pub fn state_names(&self) -> Option<&[String]> {
        self.state_names.as_deref()
    }

    /// Display label of a state: its name when names are present, else its index.
    pub fn state_name(&self, state: StateId) -> Cow<'_, str> {
        match &self.state_names {
            Some(names) => Cow::Borrowed(names[state].as_str()),
            None => Cow::Owned(state.to_string()),
        }
    }

    pub fn find_state(&self, name: &str) -> Option<StateId> {
        match &self.state_names {
            Some(names) => names.iter().position(|n| n == name),
            None => name.parse().ok().filter(|&q| q < self.state_count),
        }
    }

    /// Labels of every state, falling back to indices.
    pub fn labels(&self) -> Vec<String> {
        (0..self.state_count)
            .map(|q| self.state_name(q).into_owned())
            .collect()
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::empty(self.state_count)
    }

    /// Least superset of `states` closed under unobservable transitions.
    pub fn unobservable_reach(&self, states: &StateSet) -> StateSet {
        let unobservable = self.events.unobservable();
        let mut reach = states.clone();
        if unobservable.is_empty() {
            return reach;
        }
        let mut work: Vec<StateId> = states.iter().collect();
        while let Some(q) = work.pop() {
            for &u in &unobservable {
                for &r in self.successors(q, u) {
                    if reach.insert(r) {
                        work.push(r);
                    }
                }
            }
        }
        reach
    }

    /// One-step image of a set under a single event.
    pub fn post(&self, states: &StateSet, event: EventId) -> StateSet {
        let mut out = self.empty_set();
        for q in states.iter() {
            for &r in self.successors(q, event) {
                out.insert(r);
            }
        }
        out
    }

    /// Single initial state and at most one successor per `(state, event)`.
    pub fn is_deterministic(&self) -> bool {
        self.initial.len() == 1
            && self
                .successors
                .iter()
                .all(|row| row.iter().all(|targets| targets.len() <= 1))
    }

    /// The single initial state of a deterministic DES.
    pub fn initial_state(&self) -> Option<StateId> {
        if self.initial.len() == 1 {
            self.initial.first()
        } else {
            None
        }
    }

    /// The state reached from `state` under `event` in a deterministic DES.
    pub fn step(&self, state: StateId, event: EventId) -> Option<StateId> {
        self.successors(state, event).first().copied()
    }

    /// States reachable from the initial set under any events.
    pub fn reachable(&self) -> StateSet {
        let mut seen = self.initial.clone();
        let mut queue: VecDeque<StateId> = self.initial.iter().collect();
        while let Some(q) = queue.pop_front() {
            for targets in &self.successors[q] {
                for &r in targets {
                    if seen.insert(r) {
                        queue.push_back(r);
                    }
                }
            }
        }
        seen
    }

    /// Removes states unreachable from the initial set.
    ///
    /// Surviving states keep their relative order and are reindexed densely.
    /// Returns the pruned system and, for every old index, its new index.
    pub fn accessible_with_map(&self) -> (Des, Vec<Option<StateId>>) {
        let keep = self.reachable();
        let mut map = vec![None; self.state_count];
        for (new, old) in keep.iter().enumerate() {
            map[old] = Some(new);
        }
        let m = keep.len();
        let remap = |set: &StateSet| {
            StateSet::from_states(m, set.iter().filter_map(|q| map[q]))
        };
        let mut successors = vec![vec![Vec::new(); self.events.len()]; m];
        let mut transitions = Vec::new();
        for t in &self.transitions {
            if let (Some(s), Some(d)) = (map[t.source], map[t.target]) {
                transitions.push(Transition {
                    source: s,
                    event: t.event,
                    target: d,
                });
                successors[s][t.event].push(d);
            }
        }
        for row in &mut successors {
            for targets in row {
                targets.sort_unstable();
            }
        }
        let state_names = self
            .state_names
            .as_ref()
            .map(|names| keep.iter().map(|q| names[q].clone()).collect());
        let des = Des {
            events: self.events.clone(),
            state_count: m,
            transitions,
            successors,
            initial: remap(&self.initial),
            secret: remap(&self.secret),
            nonsecret: remap(&self.nonsecret),
            state_names,
        };
        (des, map)
    }

    pub fn accessible(&self) -> Des {
        self.accessible_with_map().0
    }

    /// Same system with different secret/nonsecret sets.
    pub fn with_secrets(&self, secret: StateSet, nonsecret: StateSet) -> Result<Des, DesError> {
        assert_eq!(secret.universe(), self.state_count);
        assert_eq!(nonsecret.universe(), self.state_count);
        if let Some(q) = secret.intersection(&nonsecret).first() {
            return Err(DesError::SecretNonsecretOverlap(
                self.state_name(q).into_owned(),
            ));
        }
        Ok(Des {
            secret,
            nonsecret,
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn chain() -> Des {
        // 0 -a-> 1 -u-> 2 -a-> 3
        let events = EventTable::from_pairs([("a", true), ("u", false)]).unwrap();
        Des::builder(events, 4)
            .transition(0, 0, 1)
            .transition(1, 1, 2)
            .transition(2, 0, 3)
            .initial([0])
            .secret([1])
            .nonsecret_complement()
            .build()
            .unwrap()
    }

    #[test]
    fn event_table_rejects_bad_entries() {
        assert_eq!(EventTable::new([]), Err(DesError::NoEvents));
        assert_eq!(
            EventTable::from_pairs([("a", true), ("a", false)]),
            Err(DesError::DuplicateEvent("a".into()))
        );
        assert_eq!(
            EventTable::from_pairs([("", true)]),
            Err(DesError::EmptyEventName)
        );
    }

    #[test]
    fn builder_validates() {
        let ev = EventTable::from_pairs([("a", true)]).unwrap();
        assert_eq!(
            Des::builder(ev.clone(), 2).build(),
            Err(DesError::EmptyInitial)
        );
        assert_eq!(
            Des::builder(ev.clone(), 2)
                .initial([0])
                .secret([1])
                .nonsecret([1])
                .build(),
            Err(DesError::SecretNonsecretOverlap("1".into()))
        );
        assert!(matches!(
            Des::builder(ev.clone(), 2).initial([0]).transition(0, 0, 5).build(),
            Err(DesError::StateOutOfRange { index: 5, .. })
        ));
        assert!(matches!(
            Des::builder(ev, 2).initial([0]).transition(0, 3, 1).build(),
            Err(DesError::EventOutOfRange { index: 3, .. })
        ));
    }

    #[test]
    fn duplicate_transitions_collapse() {
        let ev = EventTable::from_pairs([("a", true)]).unwrap();
        let des = Des::builder(ev, 2)
            .initial([0])
            .transition(0, 0, 1)
            .transition(0, 0, 1)
            .build()
            .unwrap();
        assert_eq!(des.transitions().len(), 1);
        assert!(des.is_deterministic());
    }

    #[test]
    fn unobservable_reach_on_chain() {
        let des = chain();
        assert_eq!(
            des.unobservable_reach(&StateSet::singleton(4, 1)),
            StateSet::from_states(4, [1, 2])
        );
        assert!(des.unobservable_reach(&des.empty_set()).is_empty());
    }

    #[test]
    fn unobservable_reach_is_identity_without_unobservable_events() {
        let des = fixtures::fig1();
        for bits in 0u32..(1 << des.state_count()) {
            let s = StateSet::from_states(
                des.state_count(),
                (0..des.state_count()).filter(|q| bits >> q & 1 == 1),
            );
            assert_eq!(des.unobservable_reach(&s), s);
        }
    }

    #[test]
    fn determinism_checks() {
        assert!(chain().is_deterministic());
        assert!(fixtures::fig5().is_deterministic());
        let ev = EventTable::from_pairs([("a", true)]).unwrap();
        let two_initial = Des::builder(ev.clone(), 2).initial([0, 1]).build().unwrap();
        assert!(!two_initial.is_deterministic());
        let branching = Des::builder(ev, 3)
            .initial([0])
            .transition(0, 0, 1)
            .transition(0, 0, 2)
            .build()
            .unwrap();
        assert!(!branching.is_deterministic());
    }

    #[test]
    fn accessible_drops_isolated_state_and_keeps_order() {
        let ev = EventTable::from_pairs([("a", true)]).unwrap();
        let names: Vec<String> = (0..8).map(|i| format!("s{i}")).collect();
        let mut b = Des::builder(ev, 8).names(names).initial([0]).secret([7, 3]);
        for q in 0..6 {
            b.add_transition(q, 0, q + 1);
        }
        let des = b.build().unwrap();
        let (acc, map) = des.accessible_with_map();
        assert_eq!(acc.state_count(), 7);
        assert_eq!(map[7], None);
        assert_eq!(map[3], Some(3));
        assert!(acc.find_state("s7").is_none());
        assert_eq!(acc.state_name(6), "s6");
        assert_eq!(acc.secret(), &StateSet::singleton(7, 3));
    }

    #[test]
    fn accessible_is_identity_on_reachable_des() {
        let des = fixtures::fig5();
        assert_eq!(des.accessible(), des);
    }
}
