#![allow(dead_code)]

use std::collections::BTreeSet;

use kstep_opacity::oracle::{random_des, GeneratorParams};
use kstep_opacity::{Des, EventId, StateId, StateSet};
use proptest::prelude::*;

pub fn small_des(
    max_states: usize,
    deterministic: bool,
    neutral: bool,
) -> impl Strategy<Value = Des> {
    (
        1..=max_states,
        0..=2usize,
        0..=1usize,
        0.2f64..0.9,
        0.0f64..0.6,
        any::<u64>(),
    )
        .prop_filter_map("no events", move |(n, obs, unobs, density, secret, seed)| {
            if obs + unobs == 0 {
                return None;
            }
            let params = GeneratorParams {
                state_count: n,
                observable_event_count: obs,
                unobservable_event_count: unobs,
                transition_density: if deterministic { density } else { density * 2.0 },
                secret_fraction: secret,
                neutral_fraction: if neutral { 0.3 } else { 0.0 },
                deterministic,
                rng_seed: seed,
            };
            Some(random_des(&params).unwrap())
        })
}

/// Sets reached by direct simulation over the raw transition list.
pub fn closure(des: &Des, from: &BTreeSet<StateId>) -> BTreeSet<StateId> {
    let mut out = from.clone();
    let mut stack: Vec<_> = from.iter().copied().collect();
    while let Some(q) = stack.pop() {
        for t in des.transitions() {
            if t.source == q && !des.events().is_observable(t.event) && out.insert(t.target) {
                stack.push(t.target);
            }
        }
    }
    out
}

pub fn image(des: &Des, from: &BTreeSet<StateId>, event: EventId) -> BTreeSet<StateId> {
    des.transitions()
        .iter()
        .filter(|t| t.event == event && from.contains(&t.source))
        .map(|t| t.target)
        .collect()
}

pub fn simulate(des: &Des, word: &[EventId]) -> BTreeSet<StateId> {
    let mut cur = closure(des, &des.initial().iter().collect());
    for &a in word {
        cur = closure(des, &image(des, &cur, a));
    }
    cur
}

pub fn to_btree(set: &StateSet) -> BTreeSet<StateId> {
    set.iter().collect()
}

/// All words over `alphabet` of length at most `max_len`, shortest first.
pub fn words(alphabet: &[EventId], max_len: usize) -> Vec<Vec<EventId>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &a in alphabet {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Runs a word in a deterministic system.
pub fn run(des: &Des, word: &[EventId]) -> Option<StateId> {
    let mut q = des.initial_state()?;
    for &e in word {
        q = des.step(q, e)?;
    }
    Some(q)
}
