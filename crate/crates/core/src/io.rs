//! JSON document format for discrete-event systems.
//!
//! ```json
//! {
//!   "states": ["1", "2"],
//!   "initial": ["1"],
//!   "events": [{ "name": "a", "observable": true }],
//!   "transitions": [["1", "a", "2"]],
//!   "secret": ["2"],
//!   "nonsecret": ["1"]
//! }
//! ```
//!
//! States and events are indexed in document order. When `nonsecret` is
//! omitted, every state that is not secret is nonsecret.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::des::{Des, DesError, Event, EventTable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesDocument {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub events: Vec<EventEntry>,
    pub transitions: Vec<[String; 3]>,
    #[serde(default)]
    pub secret: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonsecret: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventEntry {
    pub name: String,
    pub observable: bool,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] DesError),
}

impl DesDocument {
    pub fn from_des(des: &Des) -> Self {
        let labels = des.labels();
        let names = |set: &crate::StateSet| set.iter().map(|q| labels[q].clone()).collect();
        DesDocument {
            states: labels.clone(),
            initial: names(des.initial()),
            events: des
                .events()
                .iter()
                .map(|e| EventEntry {
                    name: e.name.clone(),
                    observable: e.observable,
                })
                .collect(),
            transitions: des
                .transitions()
                .iter()
                .map(|t| {
                    [
                        labels[t.source].clone(),
                        des.events().name(t.event).to_string(),
                        labels[t.target].clone(),
                    ]
                })
                .collect(),
            secret: names(des.secret()),
            nonsecret: Some(names(des.nonsecret())),
        }
    }

    pub fn to_des(&self) -> Result<Des, DesError> {
        let events = EventTable::new(self.events.iter().map(|e| Event {
            name: e.name.clone(),
            observable: e.observable,
        }))?;
        let mut index = HashMap::new();
        for (i, name) in self.states.iter().enumerate() {
            if name.is_empty() {
                return Err(DesError::EmptyStateName);
            }
            if index.insert(name.as_str(), i).is_some() {
                return Err(DesError::DuplicateState(name.clone()));
            }
        }
        let state = |name: &String| {
            index
                .get(name.as_str())
                .copied()
                .ok_or_else(|| DesError::UnknownState(name.clone()))
        };
        let states = |names: &[String]| names.iter().map(state).collect::<Result<Vec<_>, _>>();

        let mut builder = Des::builder(events.clone(), self.states.len())
            .names(self.states.clone())
            .initial(states(&self.initial)?)
            .secret(states(&self.secret)?);
        builder = match &self.nonsecret {
            Some(ns) => builder.nonsecret(states(ns)?),
            None => builder.nonsecret_complement(),
        };
        for [src, ev, dst] in &self.transitions {
            let e = events
                .find(ev)
                .ok_or_else(|| DesError::UnknownEvent(ev.clone()))?;
            builder.add_transition(state(src)?, e, state(dst)?);
        }
        builder.build()
    }
}

pub fn parse_des(text: &str) -> Result<Des, ParseError> {
    let doc: DesDocument = serde_json::from_str(text)?;
    Ok(doc.to_des()?)
}

pub fn serialize_des(des: &Des) -> String {
    let mut out = serde_json::to_string_pretty(&DesDocument::from_des(des))
        .expect("document serialization cannot fail");
    out.push('\n');
    out
}
