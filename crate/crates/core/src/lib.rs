//! Verification of weak and strong k-step opacity for discrete-event
//! systems with partially observed events.
//!
//! ```
//! use kstep_opacity::{fixtures, verify_strong, verify_weak, KBound};
//!
//! assert!(!verify_weak(&fixtures::fig1(), KBound::Finite(1)).opaque);
//! assert!(verify_weak(&fixtures::fig5(), KBound::Finite(1)).opaque);
//! assert!(!verify_strong(&fixtures::fig5(), KBound::Finite(1)).unwrap().verdict.opaque);
//! ```

pub mod bfs;
pub mod des;
pub mod dot;
pub mod equivalence;
pub mod fixtures;
pub mod io;
pub mod observer;
pub mod oracle;
pub mod product;
pub mod stateset;
pub mod strong;
pub mod weak;

pub use bfs::{KBound, KBoundParseError};
pub use des::{Des, DesBuilder, DesError, Event, EventId, EventTable, Transition};
pub use equivalence::language_equivalent;
pub use io::{parse_des, serialize_des, DesDocument, ParseError};
pub use observer::{observer, project, Estimate, ObserverAutomaton};
pub use stateset::{StateId, StateSet};
pub use strong::{is_normal, normalize, strong_to_weak, verify_strong, StrongError, StrongVerdict};
pub use weak::{product_bound, verify_current_state_opacity, verify_weak, Stats, Verdict, Witness};
