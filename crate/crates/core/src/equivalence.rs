use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::des::Des;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivalenceError {
    #[error("language equivalence needs deterministic inputs")]
    Nondeterministic,
    #[error("the two systems have different event tables")]
    AlphabetMismatch,
}

/// Decides `L(a) = L(b)` for deterministic systems over the same events.
///
/// Walks the synchronized pair graph from the initial pair and compares, at
/// every reachable pair, which events are enabled.
pub fn language_equivalent(a: &Des, b: &Des) -> Result<bool, EquivalenceError> {
    if !a.is_deterministic() || !b.is_deterministic() {
        return Err(EquivalenceError::Nondeterministic);
    }
    if a.events() != b.events() {
        return Err(EquivalenceError::AlphabetMismatch);
    }
    let start = (a.initial_state().unwrap(), b.initial_state().unwrap());
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        for e in 0..a.events().len() {
            match (a.step(p, e), b.step(q, e)) {
                (None, None) => {}
                (Some(p2), Some(q2)) => {
                    if seen.insert((p2, q2)) {
                        queue.push_back((p2, q2));
                    }
                }
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}
