//! Strong k-step opacity, decided by reduction to weak k-step opacity.
//!
//! A deterministic system is first made normal (no unobservable transition
//! from a secret to a nonsecret state) by redirecting such transitions into
//! secret primed copies. The normal system is then joined with a copy of its
//! nonsecret part through a fresh unobservable event; the original states
//! become secret and the copies nonsecret. The input is strongly k-step opaque
//! iff the joined system is weakly k-step opaque.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::bfs::KBound;
use crate::des::{Des, DesBuilder, Event, EventId};
use crate::stateset::StateId;
use crate::weak::{verify_weak, Verdict};

/// The step that rejected an input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Normalization,
    Reduction,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construction::Normalization => "normalization",
            Construction::Reduction => "strong-to-weak reduction",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrongError {
    #[error("{0}: the system must be deterministic")]
    Nondeterministic(Construction),
    #[error("{0}: state `{1}` is neutral; strong opacity needs every non-secret state to be nonsecret")]
    NeutralState(Construction, String),
    #[error("{0}: the system is not normal (unobservable transition `{1}` leaves a secret state into a nonsecret one)")]
    NotNormal(Construction, String),
    #[error("{0}: internal invariant violated: {1}")]
    Invariant(Construction, &'static str),
}

#[derive(Debug, Clone)]
pub struct NormalizationResult {
    pub des: Des,
    /// `prime_map[q]` is the index of the surviving copy `q'`, if any.
    pub prime_map: Vec<Option<StateId>>,
    /// `original_map[q]` is the index of `q` itself after pruning.
    pub original_map: Vec<Option<StateId>>,
    pub original_count: usize,
}

impl NormalizationResult {
    pub fn surviving_primes(&self) -> usize {
        self.prime_map.iter().flatten().count()
    }
}

#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub des: Des,
    pub fresh_event: EventId,
    /// `copy_map[q]` is the copy `q'` of a nonsecret original `q`.
    pub copy_map: Vec<Option<StateId>>,
}

#[derive(Debug, Clone)]
pub struct StrongVerdict {
    pub verdict: Verdict,
    /// Whether normalization had to run.
    pub normalized: bool,
    /// The system on which weak opacity was decided; witness states index it.
    pub reduction: ReductionResult,
}

fn require_strong_input(des: &Des, stage: Construction) -> Result<(), StrongError> {
    if !des.is_deterministic() {
        return Err(StrongError::Nondeterministic(stage));
    }
    if let Some(q) = des.neutral().first() {
        return Err(StrongError::NeutralState(stage, des.state_name(q).into_owned()));
    }
    Ok(())
}

/// First unobservable transition from a secret into a non-secret state.
fn first_abnormal(des: &Des) -> Option<String> {
    des.transitions()
        .iter()
        .find(|t| {
            !des.events().is_observable(t.event)
                && des.secret().contains(t.source)
                && !des.secret().contains(t.target)
        })
        .map(|t| {
            format!(
                "({}, {}, {})",
                des.state_name(t.source),
                des.events().name(t.event),
                des.state_name(t.target)
            )
        })
}

/// True iff no unobservable transition goes from a secret state to a state
/// outside the secret set.
pub fn is_normal(des: &Des) -> bool {
    first_abnormal(des).is_none()
}

/// Appends `'` to `base` until the result is not in `taken`.
fn fresh_label(base: &str, taken: &mut HashSet<String>) -> String {
    let mut label = format!("{base}'");
    while taken.contains(&label) {
        label.push('\'');
    }
    taken.insert(label.clone());
    label
}

/// Makes a deterministic system normal without changing its language or its
/// strong opacity.
///
/// Unobservable transitions from secret to nonsecret states are redirected
/// to primed copies; primed copies replay the unobservable transitions among
/// themselves and return to the originals on observable events. Unreachable
/// states are pruned last. The secret set becomes the old one plus every
/// surviving prime.
pub fn normalize(des: &Des) -> Result<NormalizationResult, StrongError> {
    const STAGE: Construction = Construction::Normalization;
    require_strong_input(des, STAGE)?;
    let n = des.state_count();
    let prime = |q: StateId| n + q;
    let events = des.events();
    let secret = des.secret();
    let nonsecret = des.nonsecret();

    let mut labels = des.labels();
    let mut taken: HashSet<String> = labels.iter().cloned().collect();
    for q in 0..n {
        let label = fresh_label(&labels[q], &mut taken);
        labels.push(label);
    }

    let mut builder = DesBuilder::new(events.clone(), 2 * n)
        .names(labels)
        .initial(des.initial().iter())
        .secret(secret.iter().chain(n..2 * n))
        .nonsecret(nonsecret.iter());
    for t in des.transitions() {
        if !events.is_observable(t.event) && secret.contains(t.source) && nonsecret.contains(t.target) {
            builder.add_transition(t.source, t.event, prime(t.target));
        } else {
            builder.add_transition(t.source, t.event, t.target);
        }
    }
    for t in des.transitions() {
        if !events.is_observable(t.event) {
            builder.add_transition(prime(t.source), t.event, prime(t.target));
        }
    }
    for t in des.transitions() {
        if events.is_observable(t.event) {
            builder.add_transition(prime(t.source), t.event, t.target);
        }
    }
    let full = builder
        .build()
        .map_err(|_| StrongError::Invariant(STAGE, "normalized system is malformed"))?;
    let (pruned, map) = full.accessible_with_map();

    if !pruned.is_deterministic() {
        return Err(StrongError::Invariant(STAGE, "normalization broke determinism"));
    }
    let closure = pruned.unobservable_reach(pruned.secret());
    if !closure.is_disjoint(pruned.nonsecret()) {
        return Err(StrongError::Invariant(
            STAGE,
            "a nonsecret state is unobservably reachable from a secret state",
        ));
    }

    Ok(NormalizationResult {
        prime_map: (0..n).map(|q| map[prime(q)]).collect(),
        original_map: map[..n].to_vec(),
        original_count: n,
        des: pruned,
    })
}

/// Name for a new event that collides with nothing in `des`: `u`, `u1`, `u2`, …
fn fresh_event_name(des: &Des) -> String {
    let events = des.events();
    std::iter::once("u".to_string())
        .chain((1..).map(|i| format!("u{i}")))
        .find(|name| events.find(name).is_none())
        .expect("some suffix is free")
}

/// Joins a normal deterministic system with a copy of its nonsecret part.
///
/// Every nonsecret state `q` gets a copy `q'` and a transition `(q, u, q')`
/// under a fresh unobservable event `u`. Copies keep only the transitions
/// between nonsecret states. All original states become secret and the
/// copies are the nonsecret states.
pub fn strong_to_weak(des: &Des) -> Result<ReductionResult, StrongError> {
    const STAGE: Construction = Construction::Reduction;
    require_strong_input(des, STAGE)?;
    if let Some(t) = first_abnormal(des) {
        return Err(StrongError::NotNormal(STAGE, t));
    }
    let n = des.state_count();
    let nonsecret = des.nonsecret();

    let mut copy_map = vec![None; n];
    let mut labels = des.labels();
    let mut taken: HashSet<String> = labels.iter().cloned().collect();
    for q in nonsecret.iter() {
        copy_map[q] = Some(labels.len());
        let label = fresh_label(&labels[q], &mut taken);
        labels.push(label);
    }
    let total = labels.len();

    let fresh_name = fresh_event_name(des);
    let events = des
        .events()
        .with_event(Event {
            name: fresh_name,
            observable: false,
        })
        .map_err(|_| StrongError::Invariant(STAGE, "fresh event name collides"))?;
    let fresh = events.len() - 1;

    let mut builder = DesBuilder::new(events, total)
        .names(labels)
        .initial(des.initial().iter())
        .secret(0..n)
        .nonsecret(n..total);
    for t in des.transitions() {
        builder.add_transition(t.source, t.event, t.target);
    }
    for t in des.transitions() {
        if let (Some(p), Some(q)) = (copy_map[t.source], copy_map[t.target]) {
            builder.add_transition(p, t.event, q);
        }
    }
    for q in nonsecret.iter() {
        builder.add_transition(q, fresh, copy_map[q].unwrap());
    }
    let reduced = builder
        .build()
        .map_err(|_| StrongError::Invariant(STAGE, "reduced system is malformed"))?;

    Ok(ReductionResult {
        des: reduced,
        fresh_event: fresh,
        copy_map,
    })
}

/// Decides strong k-step opacity of a deterministic system without neutral
/// states.
pub fn verify_strong(des: &Des, k: KBound) -> Result<StrongVerdict, StrongError> {
    let (normal, normalized) = if is_normal(des) {
        (None, false)
    } else {
        (Some(normalize(des)?.des), true)
    };
    let reduction = strong_to_weak(normal.as_ref().unwrap_or(des))?;
    let verdict = verify_weak(&reduction.des, k);
    Ok(StrongVerdict {
        verdict,
        normalized,
        reduction,
    })
}
