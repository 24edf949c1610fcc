//! Weak k-step opacity.
//!
//! Every observer state `X` contributes seeds `(x, X ∩ Q_NS)` for its secret
//! members `x`. From the seeds we explore the product of the projected
//! automaton with the full observer for at most `k` steps; the system is
//! opaque iff no product state `(q, ∅)` is reached. The work done is bounded
//! by the size of the product, never by `k`.

use std::collections::HashMap;

use crate::bfs::{bounded_bfs, KBound};
use crate::des::{Des, EventId};
use crate::observer::{Estimate, FullObserver, ObserverAutomaton, Projection};
use crate::product::LazyProduct;
use crate::stateset::{StateId, StateSet};

/// An element of the seed set, with the observation that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    pub secret_state: StateId,
    /// `origin_estimate ∩ Q_NS`, or the sink when that is empty.
    pub nonsecret_estimate: Estimate,
    pub origin_estimate: StateSet,
    /// Shortest observation reaching `origin_estimate` in the observer.
    pub mu: Vec<EventId>,
}

/// Observation-level counterexample: after observing `mu` the system may be
/// in secret state `secret_state`, from which `nu` can be generated, while no
/// nonsecret state of the estimate can generate `nu`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub mu: Vec<EventId>,
    pub secret_state: StateId,
    pub nu: Vec<EventId>,
    pub origin_estimate: StateSet,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub observer_states: usize,
    pub h_states: usize,
    pub product_states_explored: usize,
    pub bfs_depth_reached: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub opaque: bool,
    /// Present iff `opaque` is false.
    pub witness: Option<Witness>,
    pub stats: Stats,
}

impl Verdict {
    fn opaque(stats: Stats) -> Self {
        Verdict {
            opaque: true,
            witness: None,
            stats,
        }
    }

    fn violated(witness: Witness, stats: Stats) -> Self {
        Verdict {
            opaque: false,
            witness: Some(witness),
            stats,
        }
    }
}

/// `n · 2^n`, saturating.
pub fn product_bound(n: usize) -> u64 {
    if n >= 58 {
        u64::MAX
    } else {
        (n as u64) << n
    }
}

/// Seeds in observer discovery order, secret states ascending within a state.
pub fn compute_seeds(obs: &ObserverAutomaton, secret: &StateSet, nonsecret: &StateSet) -> Vec<Seed> {
    let mut seeds = Vec::new();
    for (i, x_set) in obs.states().iter().enumerate() {
        let secrets = x_set.intersection(secret);
        if secrets.is_empty() {
            continue;
        }
        let z = Estimate::from_set(x_set.intersection(nonsecret));
        let mu = obs.access_word(i);
        for x in secrets.iter() {
            seeds.push(Seed {
                secret_state: x,
                nonsecret_estimate: z.clone(),
                origin_estimate: x_set.clone(),
                mu: mu.clone(),
            });
        }
    }
    seeds
}

/// Decides weak k-step opacity of `des` with respect to its secret and
/// nonsecret sets. Neutral states are allowed.
pub fn verify_weak(des: &Des, k: KBound) -> Verdict {
    let n = des.state_count();
    let k = k.clamp(product_bound(n));
    let projection = Projection::new(des);
    let obs = ObserverAutomaton::from_projection(&projection);
    let seeds = compute_seeds(&obs, des.secret(), des.nonsecret());
    let mut stats = Stats {
        observer_states: obs.state_count(),
        ..Stats::default()
    };

    if let Some(seed) = seeds.iter().find(|s| s.nonsecret_estimate.is_sink()) {
        let witness = Witness {
            mu: seed.mu.clone(),
            secret_state: seed.secret_state,
            nu: Vec::new(),
            origin_estimate: seed.origin_estimate.clone(),
        };
        return Verdict::violated(witness, stats);
    }

    let mut product = LazyProduct::new(&projection);
    let mut roots = Vec::with_capacity(seeds.len());
    let mut origin: HashMap<(StateId, u32), usize> = HashMap::new();
    for (i, seed) in seeds.iter().enumerate() {
        let z = seed
            .nonsecret_estimate
            .as_set()
            .expect("sink seeds handled above");
        let v = (seed.secret_state, product.full.intern(z.clone()));
        // Seeds arrive in shortlex order of mu, so the first one wins.
        origin.entry(v).or_insert_with(|| {
            roots.push(v);
            i
        });
    }

    let marking = bounded_bfs(&mut product, &roots, k, |&(_, z)| z == FullObserver::SINK);
    stats.h_states = product.full.len();
    stats.product_states_explored = marking.len();
    stats.bfs_depth_reached = marking.depth();
    assert!(
        (stats.product_states_explored as u64) <= product_bound(n),
        "explored {} product states, above n·2^n for n = {n}",
        stats.product_states_explored
    );

    match marking.stopped_at() {
        None => Verdict::opaque(stats),
        Some(bad) => {
            let (root, labels) = marking.path_to(&bad).expect("stopped vertex is marked");
            let seed = &seeds[origin[&root]];
            let witness = Witness {
                mu: seed.mu.clone(),
                secret_state: seed.secret_state,
                nu: labels.into_iter().map(|pos| projection.alphabet[pos]).collect(),
                origin_estimate: seed.origin_estimate.clone(),
            };
            Verdict::violated(witness, stats)
        }
    }
}

/// Current-state opacity, decided directly on the observer: every reachable
/// estimate that contains a secret state must also contain a nonsecret one.
///
/// Equivalent to `verify_weak(des, KBound::Finite(0))`, computed without the
/// product.
pub fn verify_current_state_opacity(des: &Des) -> Verdict {
    let obs = ObserverAutomaton::from_projection(&Projection::new(des));
    let stats = Stats {
        observer_states: obs.state_count(),
        ..Stats::default()
    };
    for (i, x_set) in obs.states().iter().enumerate() {
        let secret = x_set.intersection(des.secret());
        if let Some(x) = secret.first() {
            if x_set.is_disjoint(des.nonsecret()) {
                let witness = Witness {
                    mu: obs.access_word(i),
                    secret_state: x,
                    nu: Vec::new(),
                    origin_estimate: x_set.clone(),
                };
                return Verdict::violated(witness, stats);
            }
        }
    }
    Verdict::opaque(stats)
}
