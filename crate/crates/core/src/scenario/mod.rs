//! Event schedules, frame orderings and their exact evaluation.
//!
//! A scenario is a set of local device events with a causal partial order.
//! A frame is one total ordering of those events; it must be a linear
//! extension of the causal order. Frames differ only in which order the
//! detections and second beam splitters happen.

mod builtin;
pub mod elements;
mod outcome;
mod run;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optics::{DeviceError, DeviceKind, DeviceOp};
use crate::state::{Arm, Mode, StateError, Superposition, TermJson};

pub use builtin::{builtin, BUILTIN_NAMES};
pub use elements::{extract_elements, Fact, FactSet};
pub use outcome::{sample_outcome, Outcome, OutcomeTable};
pub use run::{
    collapse_table, order_invariance_check, order_invariance_check_with, run_collapse,
    run_collapse_with, run_tracked, run_unitary, run_unitary_with, DeviceModel, Discrepancy,
    History, IdealDevices, InvarianceReport, Step, UnitaryRun,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("unknown event id {0:?}")]
    UnknownEvent(String),
    #[error("duplicate event id {0:?}")]
    DuplicateEvent(String),
    #[error("causal order has a cycle through {0:?}")]
    Cycle(String),
    #[error("events {0:?} and {1:?} share a worldline but are causally unordered")]
    UnorderedWorldline(String, String),
    #[error("frame {frame}: {before:?} must precede {after:?}")]
    CausalityViolation {
        frame: String,
        before: String,
        after: String,
    },
    #[error("frame {frame}: order is not a permutation of the events ({detail})")]
    NotAPermutation { frame: String, detail: String },
    #[error("unknown frame {0:?}")]
    UnknownFrame(String),
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("post-selection {post_select} has probability 0 (at event {event:?})")]
    ZeroProbability { post_select: String, event: String },
    #[error("invalid post-selection {0:?}")]
    InvalidPostSelection(String),
    #[error("invalid scenario file: {0}")]
    File(String),
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// A device acting locally on one worldline (two, for annihilation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub id: String,
    pub device: DeviceOp,
    pub after: Vec<String>,
}

impl Event {
    pub fn new(id: &str, device: DeviceOp, after: &[&str]) -> Self {
        Self {
            id: id.to_string(),
            device,
            after: after.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn worldlines(&self) -> Vec<Arm> {
        self.device.arms()
    }
}

/// One total order of the events, as seen from some inertial frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    /// Identifier used on the command line (`lab`, `s-plus`).
    pub name: String,
    /// Display name (`LAB`, `S+`).
    pub label: String,
    pub order: Vec<String>,
}

impl Frame {
    pub fn new(name: &str, label: &str, order: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            label: label.to_string(),
            order: order.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn position(&self) -> BTreeMap<&str, usize> {
        self.order
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub initial: Superposition,
    pub events: Vec<Event>,
    pub frames: Vec<Frame>,
}

impl Scenario {
    /// Builds a scenario and checks its causal structure.
    pub fn new(
        name: &str,
        initial: Superposition,
        events: Vec<Event>,
        frames: Vec<Frame>,
    ) -> Result<Self, ScenarioError> {
        let scenario = Self {
            name: name.to_string(),
            initial,
            events,
            frames,
        };
        scenario.check_causal_order()?;
        Ok(scenario)
    }

    pub fn event(&self, id: &str) -> Option<&Event> {
        self.events.iter().find(|e| e.id == id)
    }

    pub fn frame(&self, name: &str) -> Result<&Frame, ScenarioError> {
        self.frames
            .iter()
            .find(|f| f.name.eq_ignore_ascii_case(name) || f.label == name)
            .ok_or_else(|| ScenarioError::UnknownFrame(name.to_string()))
    }

    /// Arms carrying a detector event.
    pub fn detected_arms(&self) -> BTreeSet<Arm> {
        self.events
            .iter()
            .filter(|e| e.device.kind == DeviceKind::Detect)
            .filter_map(|e| e.device.arm)
            .collect()
    }

    /// Transitive predecessors of every event.
    fn ancestors(&self) -> Result<BTreeMap<String, BTreeSet<String>>, ScenarioError> {
        let mut ids = BTreeSet::new();
        for e in &self.events {
            if !ids.insert(e.id.clone()) {
                return Err(ScenarioError::DuplicateEvent(e.id.clone()));
            }
        }
        for e in &self.events {
            if let Some(bad) = e.after.iter().find(|p| !ids.contains(*p)) {
                return Err(ScenarioError::UnknownEvent(bad.clone()));
            }
        }
        let direct: BTreeMap<&str, &[String]> = self
            .events
            .iter()
            .map(|e| (e.id.as_str(), e.after.as_slice()))
            .collect();
        let mut out = BTreeMap::new();
        for e in &self.events {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<&str> = e.after.iter().map(String::as_str).collect();
            while let Some(id) = stack.pop() {
                if id == e.id {
                    return Err(ScenarioError::Cycle(e.id.clone()));
                }
                if seen.insert(id.to_string()) {
                    stack.extend(direct[id].iter().map(String::as_str));
                }
            }
            out.insert(e.id.clone(), seen);
        }
        Ok(out)
    }

    /// Acyclic, and every worldline totally ordered.
    pub fn check_causal_order(&self) -> Result<(), ScenarioError> {
        let anc = self.ancestors()?;
        for arm in Arm::ALL {
            let on_line: Vec<&Event> = self
                .events
                .iter()
                .filter(|e| e.worldlines().contains(&arm))
                .collect();
            for (i, a) in on_line.iter().enumerate() {
                for b in &on_line[i + 1..] {
                    if !anc[&a.id].contains(&b.id) && !anc[&b.id].contains(&a.id) {
                        return Err(ScenarioError::UnorderedWorldline(
                            a.id.clone(),
                            b.id.clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Accepts iff `frame` is a linear extension of the causal order.
    pub fn validate_frame(&self, frame: &Frame) -> Result<(), ScenarioError> {
        let anc = self.ancestors()?;
        let pos = frame.position();
        let not_perm = |detail: String| ScenarioError::NotAPermutation {
            frame: frame.name.clone(),
            detail,
        };
        if pos.len() != frame.order.len() {
            return Err(not_perm("repeated event".into()));
        }
        if let Some(extra) = frame.order.iter().find(|id| self.event(id).is_none()) {
            return Err(not_perm(format!("unknown event {extra:?}")));
        }
        if let Some(missing) = self
            .events
            .iter()
            .find(|e| !pos.contains_key(e.id.as_str()))
        {
            return Err(not_perm(format!("missing event {:?}", missing.id)));
        }
        for id in &frame.order {
            for pred in &anc[id] {
                if pos[pred.as_str()] > pos[id.as_str()] {
                    return Err(ScenarioError::CausalityViolation {
                        frame: frame.name.clone(),
                        before: pred.clone(),
                        after: id.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Every linear extension of the causal order, in lexicographic id order.
    pub fn linear_extensions(&self) -> Result<Vec<Vec<String>>, ScenarioError> {
        let anc = self.ancestors()?;
        let mut ids: Vec<String> = self.events.iter().map(|e| e.id.clone()).collect();
        ids.sort();
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        let mut placed = BTreeSet::new();
        extend(&ids, &anc, &mut prefix, &mut placed, &mut out);
        Ok(out)
    }

    pub fn from_json(name: &str, text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| ScenarioError::File(e.to_string()))?;
        file.into_scenario(name)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::File(format!("{}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("scenario");
        Self::from_json(name, &text)
    }

    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            events: self
                .events
                .iter()
                .map(|e| EventJson {
                    id: e.id.clone(),
                    kind: e.device.kind,
                    arm: e.device.arm,
                    after: e.after.clone(),
                })
                .collect(),
            frames: self
                .frames
                .iter()
                .map(|f| FrameJson {
                    name: f.name.clone(),
                    label: Some(f.label.clone()),
                    order: f.order.clone(),
                })
                .collect(),
            initial: Some(self.initial.to_json_terms()),
        };
        serde_json::to_string_pretty(&file).expect("plain data")
    }
}

fn extend(
    ids: &[String],
    anc: &BTreeMap<String, BTreeSet<String>>,
    prefix: &mut Vec<String>,
    placed: &mut BTreeSet<String>,
    out: &mut Vec<Vec<String>>,
) {
    if prefix.len() == ids.len() {
        out.push(prefix.clone());
        return;
    }
    for id in ids {
        if placed.contains(id) || !anc[id].iter().all(|p| placed.contains(p)) {
            continue;
        }
        placed.insert(id.clone());
        prefix.push(id.clone());
        extend(ids, anc, prefix, placed, out);
        prefix.pop();
        placed.remove(id);
    }
}

/// On-disk scenario: `{events: [{id, kind, arm, after}], frames: [{name, label, order}]}`
/// with an optional `initial` state in the superposition JSON format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub events: Vec<EventJson>,
    pub frames: Vec<FrameJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<TermJson>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventJson {
    pub id: String,
    pub kind: DeviceKind,
    #[serde(default)]
    pub arm: Option<Arm>,
    #[serde(default)]
    pub after: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameJson {
    pub name: String,
    /// Display label; defaults to the name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub order: Vec<String>,
}

impl ScenarioFile {
    pub fn into_scenario(self, name: &str) -> Result<Scenario, ScenarioError> {
        let events = self
            .events
            .into_iter()
            .map(|e| {
                Ok(Event {
                    device: DeviceOp::new(e.kind, e.arm)?,
                    id: e.id,
                    after: e.after,
                })
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        let initial = match self.initial {
            Some(terms) => Superposition::from_json_terms(&terms)?,
            None => {
                // every worldline starts in its input mode
                let arms: BTreeSet<Arm> = events.iter().flat_map(|e| e.worldlines()).collect();
                arms.into_iter()
                    .try_fold(Superposition::identity(), |s, arm| {
                        s.tensor(&crate::state::ket(arm, Mode::E))
                    })?
            }
        };
        let frames = self
            .frames
            .into_iter()
            .map(|f| Frame {
                label: f.label.unwrap_or_else(|| f.name.clone()),
                name: f.name,
                order: f.order,
            })
            .collect();
        let scenario = Scenario::new(name, initial, events, frames)?;
        for f in &scenario.frames {
            scenario.validate_frame(f)?;
        }
        Ok(scenario)
    }
}
