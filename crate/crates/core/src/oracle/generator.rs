use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::des::{Des, Event, EventTable};

/// Parameters of the random system generator. Equal parameters give equal
/// systems.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub state_count: usize,
    pub observable_event_count: usize,
    pub unobservable_event_count: usize,
    /// Deterministic: probability that a state has a transition on an event.
    /// Otherwise: expected number of targets per (state, event).
    pub transition_density: f64,
    /// Probability that a state is secret.
    pub secret_fraction: f64,
    /// Probability that a non-secret state is left neutral.
    pub neutral_fraction: f64,
    pub deterministic: bool,
    pub rng_seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            state_count: 4,
            observable_event_count: 2,
            unobservable_event_count: 1,
            transition_density: 0.5,
            secret_fraction: 0.3,
            neutral_fraction: 0.0,
            deterministic: true,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("state_count must be positive")]
    NoStates,
    #[error("at least one event is required")]
    NoEvents,
    #[error("{0} must lie in [0, 1], got {1}")]
    Fraction(&'static str, f64),
    #[error("transition_density must be finite and non-negative, got {0}")]
    Density(f64),
    #[error("a deterministic system cannot have transition_density {0} > 1")]
    DeterministicDensity(f64),
}

fn event_name(observable: bool, i: usize) -> String {
    const OBS: &[u8] = b"abcdefghijklmnopqrst";
    const UNOBS: &[u8] = b"uvwxyz";
    let (letters, prefix) = if observable { (OBS, "o") } else { (UNOBS, "u") };
    match letters.get(i) {
        Some(&c) => (c as char).to_string(),
        None => format!("{prefix}{i}"),
    }
}

fn check_fraction(name: &'static str, v: f64) -> Result<(), GeneratorError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(GeneratorError::Fraction(name, v))
    }
}

/// Draws a random system with initial state 0.
///
/// Observable events are named `a`, `b`, … and unobservable ones `u`, `v`, ….
pub fn random_des(params: &GeneratorParams) -> Result<Des, GeneratorError> {
    let n = params.state_count;
    if n == 0 {
        return Err(GeneratorError::NoStates);
    }
    if params.observable_event_count + params.unobservable_event_count == 0 {
        return Err(GeneratorError::NoEvents);
    }
    check_fraction("secret_fraction", params.secret_fraction)?;
    check_fraction("neutral_fraction", params.neutral_fraction)?;
    let density = params.transition_density;
    if !density.is_finite() || density < 0.0 {
        return Err(GeneratorError::Density(density));
    }
    if params.deterministic && density > 1.0 {
        return Err(GeneratorError::DeterministicDensity(density));
    }

    let events = EventTable::new(
        (0..params.observable_event_count)
            .map(|i| (i, true))
            .chain((0..params.unobservable_event_count).map(|i| (i, false)))
            .map(|(i, observable)| Event {
                name: event_name(observable, i),
                observable,
            }),
    )
    .expect("generated names are distinct");
    let event_count = events.len();

    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut builder = Des::builder(events, n).initial([0]);
    let per_target = (density / n as f64).min(1.0);
    for q in 0..n {
        for e in 0..event_count {
            if params.deterministic {
                if rng.gen_bool(density) {
                    builder.add_transition(q, e, rng.gen_range(0..n));
                }
            } else {
                for r in 0..n {
                    if rng.gen_bool(per_target) {
                        builder.add_transition(q, e, r);
                    }
                }
            }
        }
    }
    let mut secret = Vec::new();
    let mut nonsecret = Vec::new();
    for q in 0..n {
        if rng.gen_bool(params.secret_fraction) {
            secret.push(q);
        } else if !rng.gen_bool(params.neutral_fraction) {
            nonsecret.push(q);
        }
    }
    Ok(builder
        .secret(secret)
        .nonsecret(nonsecret)
        .build()
        .expect("generated systems are well formed"))
}
