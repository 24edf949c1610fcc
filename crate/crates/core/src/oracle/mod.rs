//! Definition-level checkers, independent of the observer, product and
//! reduction code, for differential testing and witness validation.
//!
//! Sets are plain `BTreeSet`s and every image is computed by scanning the raw
//! transition list, so nothing here shares a code path with the verifiers.

mod generator;

pub use generator::{random_des, GeneratorError, GeneratorParams};

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::bfs::KBound;
use crate::des::{Des, EventId};
use crate::stateset::StateId;

type Set = BTreeSet<StateId>;

/// Length limits for the bounded quantifiers of the opacity definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBounds {
    /// Longest prefix enumerated (observations for weak, strings for strong).
    pub mu_max: usize,
    /// Longest continuation `ν` enumerated by the weak search.
    pub nu_max: usize,
    /// Multiplier on `(n+1)·(|P(s)|+1)` in the length cap for matching runs.
    pub w_cap_factor: usize,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds {
            mu_max: 8,
            nu_max: 8,
            w_cap_factor: 1,
        }
    }
}

impl OracleBounds {
    /// Bounds under which the weak search is exhaustive for an `n`-state
    /// system: `2^n` for the prefix and `n·2^n` for the continuation.
    pub fn exhaustive_weak(n: usize) -> Self {
        assert!(n < 30, "exhaustive bounds only for small systems");
        OracleBounds {
            mu_max: 1 << n,
            nu_max: n << n,
            w_cap_factor: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("strong opacity is defined for deterministic systems only")]
    Nondeterministic,
    #[error("strong opacity does not allow neutral states")]
    NeutralStates,
}

/// A weak-opacity violation at the observation level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakFind {
    pub mu: Vec<EventId>,
    pub secret_state: StateId,
    pub nu: Vec<EventId>,
}

/// Raw-transition view used by all oracle computations.
struct Sim<'a> {
    des: &'a Des,
    observable: Vec<EventId>,
    is_observable: Vec<bool>,
}

impl<'a> Sim<'a> {
    fn new(des: &'a Des) -> Self {
        let is_observable: Vec<bool> = des.events().iter().map(|e| e.observable).collect();
        let observable = (0..is_observable.len()).filter(|&e| is_observable[e]).collect();
        Sim {
            des,
            observable,
            is_observable,
        }
    }

    fn image(&self, from: &Set, event: EventId) -> Set {
        self.des
            .transitions()
            .iter()
            .filter(|t| t.event == event && from.contains(&t.source))
            .map(|t| t.target)
            .collect()
    }

    /// Closure under unobservable transitions, restricted to states accepted
    /// by `allowed` (the start states are kept only if allowed).
    fn closure_within(&self, from: &Set, allowed: impl Fn(StateId) -> bool) -> Set {
        let mut out: Set = from.iter().copied().filter(|&q| allowed(q)).collect();
        loop {
            let before = out.len();
            for t in self.des.transitions() {
                if !self.is_observable[t.event] && out.contains(&t.source) && allowed(t.target) {
                    out.insert(t.target);
                }
            }
            if out.len() == before {
                return out;
            }
        }
    }

    fn closure(&self, from: &Set) -> Set {
        self.closure_within(from, |_| true)
    }

    /// `δ(from, P⁻¹(a))`.
    fn observe(&self, from: &Set, event: EventId) -> Set {
        self.closure(&self.image(&self.closure(from), event))
    }

    /// `δ(from, P⁻¹(word))`; `None` if `word` contains an unobservable event.
    fn observe_word(&self, from: &Set, word: &[EventId]) -> Option<Set> {
        let mut cur = self.closure(from);
        for &a in word {
            if a >= self.is_observable.len() || !self.is_observable[a] {
                return None;
            }
            cur = self.observe(&cur, a);
        }
        Some(cur)
    }

    fn initial(&self) -> Set {
        self.des.initial().iter().collect()
    }

    fn secret(&self, q: StateId) -> bool {
        self.des.secret().contains(q)
    }

    fn nonsecret(&self, q: StateId) -> bool {
        self.des.nonsecret().contains(q)
    }
}

/// Searches for `(μ, x, ν)` with `|μ| ≤ mu_max`, `|ν| ≤ min(k, nu_max)`,
/// `x ∈ δ(I,P⁻¹(μ)) ∩ Q_S`, `δ({x},P⁻¹(ν)) ≠ ∅` and
/// `δ(δ(I,P⁻¹(μ)) ∩ Q_NS, P⁻¹(ν)) = ∅`.
///
/// Observations are enumerated breadth-first in length-lexicographic order.
/// A prefix whose estimate already appeared for a shorter (or earlier)
/// prefix is skipped, and likewise for continuation pairs, since everything
/// that follows depends only on those sets. Any find is a true violation.
pub fn weak_violation_search(des: &Des, k: KBound, bounds: OracleBounds) -> Option<WeakFind> {
    let sim = Sim::new(des);
    let nu_limit = k.min_with(bounds.nu_max as u64) as usize;
    let start = sim.closure(&sim.initial());
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, Vec::new())]);
    while let Some((estimate, mu)) = queue.pop_front() {
        let nonsecret: Set = estimate.iter().copied().filter(|&q| sim.nonsecret(q)).collect();
        for &x in estimate.iter().filter(|&&q| sim.secret(q)) {
            if let Some(nu) = continuation_search(&sim, x, &nonsecret, nu_limit) {
                return Some(WeakFind {
                    mu,
                    secret_state: x,
                    nu,
                });
            }
        }
        if mu.len() < bounds.mu_max {
            for &a in &sim.observable {
                let next = sim.observe(&estimate, a);
                if !next.is_empty() && seen.insert(next.clone()) {
                    let mut word = mu.clone();
                    word.push(a);
                    queue.push_back((next, word));
                }
            }
        }
    }
    None
}

fn continuation_search(sim: &Sim, x: StateId, nonsecret: &Set, limit: usize) -> Option<Vec<EventId>> {
    let start = (sim.closure(&Set::from([x])), sim.closure(nonsecret));
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, Vec::new())]);
    while let Some(((from_x, from_ns), nu)) = queue.pop_front() {
        if from_ns.is_empty() {
            return Some(nu);
        }
        if nu.len() >= limit {
            continue;
        }
        for &a in &sim.observable {
            let next_x = sim.observe(&from_x, a);
            if next_x.is_empty() {
                continue;
            }
            let pair = (next_x, sim.observe(&from_ns, a));
            if seen.insert(pair.clone()) {
                let mut word = nu.clone();
                word.push(a);
                queue.push_back((pair, word));
            }
        }
    }
    None
}

/// Checks a weak-opacity witness by direct simulation.
pub fn validate_weak_witness(
    des: &Des,
    k: KBound,
    mu: &[EventId],
    secret_state: StateId,
    nu: &[EventId],
) -> bool {
    if !k.allows(nu.len() as u64) || secret_state >= des.state_count() {
        return false;
    }
    let sim = Sim::new(des);
    let Some(estimate) = sim.observe_word(&sim.initial(), mu) else {
        return false;
    };
    if !estimate.contains(&secret_state) || !sim.secret(secret_state) {
        return false;
    }
    let Some(from_x) = sim.observe_word(&Set::from([secret_state]), nu) else {
        return false;
    };
    let nonsecret: Set = estimate.iter().copied().filter(|&q| sim.nonsecret(q)).collect();
    let from_ns = sim
        .observe_word(&nonsecret, nu)
        .expect("nu already checked observable");
    !from_x.is_empty() && from_ns.is_empty()
}

fn require_strong_input(des: &Des) -> Result<(), OracleError> {
    if !des.is_deterministic() {
        return Err(OracleError::Nondeterministic);
    }
    if !des.neutral().is_empty() {
        return Err(OracleError::NeutralStates);
    }
    Ok(())
}

/// Length cap for matching runs `w` of an observation of length `obs_len`.
fn w_cap(n: usize, obs_len: usize, factor: usize) -> usize {
    factor * (n + 1) * (obs_len + 1) + n
}

/// Whether some `w ∈ L(G)` with `P(w) = observation` and `|w| ≤ cap` keeps
/// every prefix `w'` with `|P(w)| − |P(w')| ≤ k` out of the secret states.
///
/// Runs of a deterministic system are determined by their strings, so the
/// search walks configurations (observed prefix length, state); a shortest
/// string reaching each configuration is found first, which is exactly the
/// enumeration of strings up to the cap with repeated configurations cut.
fn has_concealing_run(sim: &Sim, q0: StateId, observation: &[EventId], k: KBound, cap: usize) -> bool {
    let len = observation.len();
    let in_window = |i: usize| k.allows((len - i) as u64);
    let ok = |i: usize, q: StateId| !(in_window(i) && sim.secret(q));
    if !ok(0, q0) {
        return false;
    }
    let mut seen = HashSet::from([(0usize, q0)]);
    let mut frontier = vec![(0usize, q0)];
    for _ in 0..=cap {
        if frontier.iter().any(|&(i, _)| i == len) {
            return true;
        }
        let mut next = Vec::new();
        for &(i, q) in &frontier {
            for t in sim.des.transitions().iter().filter(|t| t.source == q) {
                let j = if sim.is_observable[t.event] {
                    if i < len && observation[i] == t.event {
                        i + 1
                    } else {
                        continue;
                    }
                } else {
                    i
                };
                if ok(j, t.target) && seen.insert((j, t.target)) {
                    next.push((j, t.target));
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        frontier = next;
    }
    false
}

fn project_word(sim: &Sim, word: &[EventId]) -> Vec<EventId> {
    word.iter().copied().filter(|&e| sim.is_observable[e]).collect()
}

/// Whether the string `s` violates strong k-step opacity: `s ∈ L(G)` and every
/// run with the same observation visits a secret state within the last `k`
/// observations.
pub fn is_strong_violation(
    des: &Des,
    k: KBound,
    s: &[EventId],
    bounds: OracleBounds,
) -> Result<bool, OracleError> {
    require_strong_input(des)?;
    let sim = Sim::new(des);
    let q0 = des.initial_state().unwrap();
    let mut q = q0;
    for &e in s {
        match des.step(q, e) {
            Some(r) => q = r,
            None => return Ok(false),
        }
    }
    let observation = project_word(&sim, s);
    let cap = w_cap(des.state_count(), observation.len(), bounds.w_cap_factor);
    Ok(!has_concealing_run(&sim, q0, &observation, k, cap))
}

/// Observation summary that determines the verdict of every extension: the
/// full estimate and, for window sizes `0..=k`, the states reachable by runs
/// that avoid secrets inside that window. Trailing equal entries are dropped,
/// so the last entry stands for every larger window up to `k`.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Summary {
    reach: Set,
    safe: Vec<Set>,
}

impl Summary {
    fn initial(sim: &Sim, q0: StateId) -> Self {
        let reach = sim.closure(&Set::from([q0]));
        let safe = vec![sim.closure_within(&Set::from([q0]), |q| !sim.secret(q))];
        Summary { reach, safe }
    }

    fn advance(&self, sim: &Sim, event: EventId, k: KBound) -> Self {
        let avoid = |q: StateId| !sim.secret(q);
        let step = |from: &Set| sim.closure_within(&sim.image(from, event), avoid);
        let width = k.min_with(self.safe.len() as u64) as usize + 1;
        let mut safe = Vec::with_capacity(width);
        safe.push(step(&self.reach));
        for j in 1..width {
            safe.push(step(&self.safe[(j - 1).min(self.safe.len() - 1)]));
        }
        while safe.len() > 1 && safe[safe.len() - 1] == safe[safe.len() - 2] {
            safe.pop();
        }
        Summary {
            reach: sim.closure(&sim.image(&self.reach, event)),
            safe,
        }
    }
}

/// Searches strings `s ∈ L(G)` with `|s| ≤ mu_max` in length-lexicographic
/// order and returns the first one violating strong k-step opacity.
///
/// Each candidate is checked with [`is_strong_violation`]'s run search; a
/// string whose (state, observation summary) pair already occurred for an
/// earlier string is not extended, because every extension repeats an
/// earlier candidate's verdict.
pub fn strong_violation_search(
    des: &Des,
    k: KBound,
    bounds: OracleBounds,
) -> Result<Option<Vec<EventId>>, OracleError> {
    require_strong_input(des)?;
    let sim = Sim::new(des);
    let n = des.state_count();
    let q0 = des.initial_state().unwrap();
    let mut verdicts: HashMap<Vec<EventId>, bool> = HashMap::new();
    let start = (q0, Summary::initial(&sim, q0));
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(Vec::new(), Vec::new(), start)]);
    while let Some((s, observation, (q, summary))) = queue.pop_front() {
        let violated = *verdicts.entry(observation.clone()).or_insert_with(|| {
            let cap = w_cap(n, observation.len(), bounds.w_cap_factor);
            !has_concealing_run(&sim, q0, &observation, k, cap)
        });
        if violated {
            return Ok(Some(s));
        }
        if s.len() >= bounds.mu_max {
            continue;
        }
        for e in 0..des.events().len() {
            let Some(r) = des.step(q, e) else { continue };
            let (next_obs, next_summary) = if sim.is_observable[e] {
                let mut o = observation.clone();
                o.push(e);
                (o, summary.advance(&sim, e, k))
            } else {
                (observation.clone(), summary.clone())
            };
            let key = (r, next_summary);
            if seen.insert(key.clone()) {
                let mut word = s.clone();
                word.push(e);
                queue.push_back((word, next_obs, key));
            }
        }
    }
    Ok(None)
}
