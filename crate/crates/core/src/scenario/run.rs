//! Frame-ordered evolution: unitary to the end, or collapsing at detections.

use std::collections::BTreeSet;

use super::elements::{extract_elements, FactSet};
use super::outcome::{Outcome, OutcomeTable};
use super::{Event, Frame, Scenario, ScenarioError};
use crate::field::Real;
use crate::optics::{DeviceError, DeviceKind};
use crate::state::{Arm, Click, Slot, StateError, Superposition, Symbol};

/// How events act on states. The ideal model applies each event's device;
/// alternative models exist to exercise the invariance checks.
pub trait DeviceModel {
    fn apply(&self, event: &Event, state: &Superposition) -> Result<Superposition, DeviceError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdealDevices;

impl DeviceModel for IdealDevices {
    fn apply(&self, event: &Event, state: &Superposition) -> Result<Superposition, DeviceError> {
        event.device.apply(state)
    }
}

/// Records each touched arm's current path mode in a trail slot before
/// delegating, so that final amplitudes stay resolved by path.
struct Tracked<'a, M: DeviceModel>(&'a M);

impl<M: DeviceModel> DeviceModel for Tracked<'_, M> {
    fn apply(&self, event: &Event, state: &Superposition) -> Result<Superposition, DeviceError> {
        let tagged = event
            .worldlines()
            .into_iter()
            .fold(state.clone(), |s, arm| {
                Superposition::from_terms(s.terms().map(|(l, a)| match l.mode(arm) {
                    Some(m) if m.is_path_like() => {
                        (l.set(Slot::Trail(arm), Symbol::Mode(m)), a.clone())
                    }
                    _ => (l.clone(), a.clone()),
                }))
            });
        self.0.apply(event, &tagged)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitaryRun {
    pub frame: String,
    /// State after each event, in frame order.
    pub steps: Vec<(String, Superposition)>,
    pub final_state: Superposition,
    pub table: OutcomeTable,
}

fn ordered_events<'a>(
    scenario: &'a Scenario,
    frame: &Frame,
) -> Result<Vec<&'a Event>, ScenarioError> {
    scenario.validate_frame(frame)?;
    Ok(frame
        .order
        .iter()
        .map(|id| scenario.event(id).expect("validated"))
        .collect())
}

pub fn run_unitary(scenario: &Scenario, frame: &Frame) -> Result<UnitaryRun, ScenarioError> {
    run_unitary_with(&IdealDevices, scenario, frame)
}

pub fn run_unitary_with<M: DeviceModel>(
    model: &M,
    scenario: &Scenario,
    frame: &Frame,
) -> Result<UnitaryRun, ScenarioError> {
    let mut state = scenario.initial.clone();
    let mut steps = Vec::new();
    for event in ordered_events(scenario, frame)? {
        state = model.apply(event, &state)?;
        steps.push((event.id.clone(), state.clone()));
    }
    let table = OutcomeTable::from_state(&state);
    Ok(UnitaryRun {
        frame: frame.name.clone(),
        steps,
        final_state: state,
        table,
    })
}

/// Unitary evolution whose final terms also carry the last path mode of
/// every arm. Dropping the trails recovers [`run_unitary`]'s final state.
pub fn run_tracked(scenario: &Scenario, frame: &Frame) -> Result<Superposition, ScenarioError> {
    Ok(run_unitary_with(&Tracked(&IdealDevices), scenario, frame)?.final_state)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub event: String,
    /// Post-event state, renormalized when the weight has an exact root in
    /// ℚ(√2); otherwise the unnormalized projection (see `normalized`).
    pub state: Superposition,
    pub normalized: bool,
    /// Conditional probability of the post-selected reading, for detections
    /// that were conditioned on.
    pub probability: Option<Real>,
    pub elements: FactSet,
}

/// One frame's conditioned history. Path inferences drawn from it are
/// counterfactual: no path was ever measured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    pub frame: String,
    pub frame_label: String,
    pub post_select: Outcome,
    pub steps: Vec<Step>,
    /// Product of the conditional probabilities.
    pub weight: Real,
}

impl History {
    /// Facts of the latest step that has any: the most informed inference
    /// before the paths are erased by the second splitters.
    pub fn inferred(&self) -> FactSet {
        self.steps
            .iter()
            .rev()
            .find(|s| !s.elements.is_empty())
            .map(|s| s.elements.clone())
            .unwrap_or_default()
    }

    /// Every fact established at some step.
    pub fn all_facts(&self) -> FactSet {
        self.steps
            .iter()
            .flat_map(|s| s.elements.iter().cloned())
            .collect()
    }

    pub fn probabilities(&self) -> Vec<Real> {
        self.steps
            .iter()
            .filter_map(|s| s.probability.clone())
            .collect()
    }

    pub fn final_state(&self) -> &Superposition {
        &self.steps.last().expect("nonempty history").state
    }
}

pub fn run_collapse(
    scenario: &Scenario,
    frame: &Frame,
    post_select: &Outcome,
) -> Result<History, ScenarioError> {
    run_collapse_with(&IdealDevices, scenario, frame, post_select)
}

pub fn run_collapse_with<M: DeviceModel>(
    model: &M,
    scenario: &Scenario,
    frame: &Frame,
    post_select: &Outcome,
) -> Result<History, ScenarioError> {
    let detected = scenario.detected_arms();
    if let Some(arm) = post_select
        .arms()
        .into_iter()
        .find(|a| !detected.contains(a))
    {
        return Err(ScenarioError::InvalidPostSelection(format!(
            "{post_select}: no detector on arm {arm}"
        )));
    }
    // `projected` is never rescaled, so its squared norm is the running weight
    let mut projected = scenario.initial.clone();
    let mut weight = projected.squared_norm();
    let mut steps = Vec::new();
    for event in ordered_events(scenario, frame)? {
        projected = model.apply(event, &projected)?;
        let mut probability = None;
        if let (DeviceKind::Detect, Some(arm)) = (event.device.kind, event.device.arm) {
            if let Some(click) = post_select.get(arm) {
                let cond = projected
                    .condition(&Slot::Register(arm), &Symbol::Click(click))
                    .map_err(|_| ScenarioError::ZeroProbability {
                        post_select: post_select.detector_string(),
                        event: event.id.clone(),
                    })?;
                probability = Some(
                    cond.probability
                        .checked_div(&weight)
                        .map_err(StateError::from)?,
                );
                weight = cond.probability;
                projected = cond.state;
            }
        }
        let (state, normalized) = match projected.renormalize(&weight) {
            Ok(s) => (s, true),
            Err(StateError::NoExactRoot(_)) => (projected.clone(), false),
            Err(e) => return Err(e.into()),
        };
        steps.push(Step {
            event: event.id.clone(),
            elements: extract_elements(&projected),
            state,
            normalized,
            probability,
        });
    }
    let weight = steps
        .iter()
        .filter_map(|s| s.probability.as_ref())
        .fold(Real::one(), |acc, p| acc * p);
    Ok(History {
        frame: frame.name.clone(),
        frame_label: frame.label.clone(),
        post_select: post_select.clone(),
        steps,
        weight,
    })
}

/// Table assembled from collapse histories alone: every complete reading
/// assignment is post-selected in turn and its history weight recorded.
pub fn collapse_table(scenario: &Scenario, frame: &Frame) -> Result<OutcomeTable, ScenarioError> {
    let arms: Vec<Arm> = scenario.detected_arms().into_iter().collect();
    let clicks = [Click::Null, Click::C, Click::D, Click::Up, Click::Down];
    let mut assignments: Vec<Vec<(Arm, Click)>> = vec![vec![]];
    for arm in &arms {
        assignments = assignments
            .into_iter()
            .flat_map(|a| {
                clicks.iter().map(move |c| {
                    let mut next = a.clone();
                    next.push((*arm, *c));
                    next
                })
            })
            .collect();
    }
    let mut entries = Vec::new();
    for assignment in assignments {
        let ps = Outcome::new(assignment);
        match run_collapse(scenario, frame, &ps) {
            Ok(h) => entries.push((ps, h.weight)),
            Err(ScenarioError::ZeroProbability { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(OutcomeTable::from_entries(entries))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub left_frame: String,
    pub right_frame: String,
    pub outcome: String,
    pub left: Real,
    pub right: Real,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceReport {
    pub tables: Vec<(String, OutcomeTable)>,
    pub discrepancy: Option<Discrepancy>,
}

impl InvarianceReport {
    pub fn passes(&self) -> bool {
        self.discrepancy.is_none()
    }
}

pub fn order_invariance_check(
    scenario: &Scenario,
    frames: &[&Frame],
) -> Result<InvarianceReport, ScenarioError> {
    order_invariance_check_with(&IdealDevices, scenario, frames)
}

/// Runs every frame unitarily and compares the tables exactly, reporting
/// the first row that differs from the first frame's table.
pub fn order_invariance_check_with<M: DeviceModel>(
    model: &M,
    scenario: &Scenario,
    frames: &[&Frame],
) -> Result<InvarianceReport, ScenarioError> {
    let tables = frames
        .iter()
        .map(|f| Ok((f.name.clone(), run_unitary_with(model, scenario, f)?.table)))
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    let mut discrepancy = None;
    if let Some((first_name, first)) = tables.first() {
        'outer: for (name, table) in &tables[1..] {
            let keys: BTreeSet<&Outcome> = first
                .entries()
                .chain(table.entries())
                .map(|(o, _)| o)
                .collect();
            for key in keys {
                let (l, r) = (first.get(key), table.get(key));
                if l != r {
                    discrepancy = Some(Discrepancy {
                        left_frame: first_name.clone(),
                        right_frame: name.clone(),
                        outcome: key.to_string(),
                        left: l,
                        right: r,
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(InvarianceReport {
        tables,
        discrepancy,
    })
}
