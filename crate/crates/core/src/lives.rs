//! Branch-level bookkeeping of lives: relative worlds, live-sets and their
//! merge, per-frame world graphs and the cross-frame perspective check.
//!
//! Lives are tracked at branch granularity. A live-set's memory is a
//! key/value record; two live-sets whose memories disagree on a key cannot
//! interact and are mutually hidden.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::field::Real;
use crate::scenario::{
    run_collapse, run_tracked, run_unitary, Fact, FactSet, Frame, Outcome, Scenario, ScenarioError,
};
use crate::state::{Arm, ArmMode, BasisLabel, Mode, Reading, Slot, Superposition, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LivesError {
    #[error("state has no apparatus register to split on")]
    NoApparatus,
    #[error("contradictory memories on {key:?}: {left:?} vs {right:?}")]
    ContradictoryMemory {
        key: String,
        left: String,
        right: String,
    },
    #[error("agent {0} appears both first-person and third-person")]
    ConflictingPerspective(String),
    #[error("world graphs come from different scenarios: {0:?} and {1:?}")]
    MixedScenarios(String, String),
    #[error("world graphs use different post-selections: {0} and {1}")]
    MixedPostSelections(String, String),
    #[error("frame {0:?} appears more than once")]
    DuplicateFrame(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Person {
    First,
    Third,
}

/// An agent symbol together with the perspective it is seen from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PerspectiveTag {
    pub agent: String,
    pub person: Person,
}

impl PerspectiveTag {
    pub fn new(agent: &str, person: Person) -> Self {
        Self {
            agent: agent.to_string(),
            person,
        }
    }
}

impl fmt::Display for PerspectiveTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.person {
            Person::First => f.write_str(&self.agent),
            Person::Third => write!(f, "{}_{{3.}}", self.agent),
        }
    }
}

pub type Memory = BTreeMap<String, String>;

/// A set of lives that have interacted, sharing one memory record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiveSet {
    pub constituents: BTreeSet<PerspectiveTag>,
    pub memory: Memory,
}

impl LiveSet {
    pub fn single(agent: &str, person: Person, memory: Memory) -> Self {
        Self {
            constituents: BTreeSet::from([PerspectiveTag::new(agent, person)]),
            memory,
        }
    }

    /// Canonical id: the constituents in order, joined by `⊕`.
    pub fn id(&self) -> String {
        let parts: Vec<String> = self.constituents.iter().map(|t| t.to_string()).collect();
        parts.join("⊕")
    }

    pub fn contains_agent(&self, agent: &str) -> bool {
        self.constituents.iter().any(|t| t.agent == agent)
    }

    /// Detector and spin readings with a positive value, e.g. `D+=1;D−=1`.
    fn readings_summary(&self) -> String {
        let shown: Vec<String> = self
            .memory
            .iter()
            .filter(|(_, v)| matches!(v.as_str(), "1" | "↑" | "↓"))
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        if shown.is_empty() {
            "∅".to_string()
        } else {
            shown.join(";")
        }
    }
}

impl fmt::Display for LiveSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let summary = self.readings_summary();
        let parts: Vec<String> = self
            .constituents
            .iter()
            .map(|t| match t.person {
                Person::First => format!("{}({summary})", t.agent),
                Person::Third => format!("{}({summary})_{{3.}}", t.agent),
            })
            .collect();
        f.write_str(&parts.join(" ⊕ "))
    }
}

/// Union of two memories; a key with two different values rejects the union.
pub fn merge_memory(x: &Memory, y: &Memory) -> Result<Memory, LivesError> {
    let mut out = x.clone();
    for (k, v) in y {
        match out.get(k) {
            Some(existing) if existing != v => {
                return Err(LivesError::ContradictoryMemory {
                    key: k.clone(),
                    left: existing.clone(),
                    right: v.clone(),
                })
            }
            Some(_) => {}
            None => {
                out.insert(k.clone(), v.clone());
            }
        }
    }
    Ok(out)
}

/// `x ⊕ y`. Associative and commutative; rejected when memories contradict
/// or one agent would carry both perspectives.
pub fn merge_lives(x: &LiveSet, y: &LiveSet) -> Result<LiveSet, LivesError> {
    let memory = merge_memory(&x.memory, &y.memory)?;
    let constituents: BTreeSet<PerspectiveTag> =
        x.constituents.union(&y.constituents).cloned().collect();
    let mut persons: BTreeMap<&str, Person> = BTreeMap::new();
    for tag in &constituents {
        if let Some(p) = persons.insert(&tag.agent, tag.person) {
            if p != tag.person {
                return Err(LivesError::ConflictingPerspective(tag.agent.clone()));
            }
        }
    }
    Ok(LiveSet {
        constituents,
        memory,
    })
}

/// One orthogonal branch (or group of branches sharing the keyed values).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeWorld {
    pub id: String,
    /// Values of the keyed slots shared by every term of the branch.
    pub key: BasisLabel,
    pub branch: Superposition,
    pub probability: Real,
    pub lives: Vec<LiveSet>,
    pub visible: BTreeSet<ArmMode>,
    pub hidden: BTreeSet<ArmMode>,
}

impl RelativeWorld {
    /// Whether the lives of the two worlds can never meet.
    pub fn hidden_from(&self, other: &RelativeWorld) -> bool {
        self.lives.iter().any(|a| {
            other
                .lives
                .iter()
                .any(|b| merge_memory(&a.memory, &b.memory).is_err())
        })
    }
}

/// Memory entries of one register reading: `C−=0`, `D−=1`, or `A=↑`.
fn reading_memory(r: Reading) -> Vec<(String, String)> {
    r.to_string()
        .split(';')
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn key_memory(key: &BasisLabel) -> Memory {
    let mut memory = Memory::new();
    for (slot, sym) in key.entries() {
        match (slot, sym) {
            (Slot::Register(arm), Symbol::Click(c)) => {
                memory.extend(reading_memory(Reading::new(*arm, *c)));
            }
            (Slot::Pair, _) => {
                for arm in [Arm::Plus, Arm::Minus] {
                    memory.insert(Slot::Particle(arm).to_string(), sym.to_string());
                }
            }
            (slot, sym) => {
                memory.insert(slot.to_string(), sym.to_string());
            }
        }
    }
    memory
}

fn term_segments(label: &BasisLabel) -> impl Iterator<Item = ArmMode> + '_ {
    Arm::ALL.into_iter().flat_map(move |arm| {
        [label.mode(arm), label.trail(arm)]
            .into_iter()
            .flatten()
            .filter(|m| m.is_path_like())
            .map(move |m| ArmMode::new(arm, m))
    })
}

fn with_siblings(modes: impl IntoIterator<Item = ArmMode>) -> BTreeSet<ArmMode> {
    modes
        .into_iter()
        .flat_map(|m| {
            m.mode
                .siblings()
                .iter()
                .map(move |&s| ArmMode::new(m.arm, s))
        })
        .collect()
}

/// Splits a state into relative worlds, one per distinct assignment of the
/// given slots. Weights are exact and sum to 1.
pub fn split_worlds(
    s: &Superposition,
    slots: &BTreeSet<Slot>,
) -> Result<Vec<RelativeWorld>, LivesError> {
    if !s.slots().iter().any(|sl| matches!(sl, Slot::Register(_))) {
        return Err(LivesError::NoApparatus);
    }
    let total = s.squared_norm();
    let segments = with_siblings(s.terms().flat_map(|(l, _)| term_segments(l)));
    let mut groups: BTreeMap<BasisLabel, Vec<(BasisLabel, crate::field::Amplitude)>> =
        BTreeMap::new();
    for (label, amp) in s.terms() {
        let keyed = |sl: &Slot| match sl {
            Slot::Pair => [
                Slot::Pair,
                Slot::Particle(Arm::Plus),
                Slot::Particle(Arm::Minus),
            ]
            .iter()
            .any(|c| slots.contains(c)),
            other => slots.contains(other),
        };
        let key = label
            .entries()
            .filter(|(sl, _)| keyed(sl))
            .fold(BasisLabel::empty(), |k, (sl, sym)| {
                k.set(sl.clone(), sym.clone())
            });
        groups
            .entry(key)
            .or_default()
            .push((label.clone(), amp.clone()));
    }
    groups
        .into_iter()
        .map(|(key, terms)| {
            let branch = Superposition::from_terms(terms);
            let probability = branch
                .squared_norm()
                .checked_div(&total)
                .map_err(|e| ScenarioError::State(e.into()))?;
            let visible: BTreeSet<ArmMode> =
                branch.terms().flat_map(|(l, _)| term_segments(l)).collect();
            let hidden = segments.difference(&visible).copied().collect();
            let memory = key_memory(&key);
            let mut lives = vec![LiveSet::single("A", Person::First, memory.clone())];
            for (slot, sym) in key.entries() {
                if let Slot::Observer(name) = slot {
                    let mut own = memory.clone();
                    own.insert(format!("@{name}"), sym.to_string());
                    lives.push(LiveSet::single(
                        &format!("O_{{{name}}}"),
                        Person::First,
                        own,
                    ));
                }
            }
            Ok(RelativeWorld {
                id: key.to_string(),
                key,
                branch,
                probability,
                lives,
                visible,
                hidden,
            })
        })
        .collect()
}

pub fn observer_symbol(frame: &Frame) -> String {
    format!("O_{{{}}}", frame.label)
}

pub fn apparatus_symbol(frame: &Frame) -> String {
    format!("A_{{{}}}", frame.label)
}

fn key_outcome(key: &BasisLabel) -> Outcome {
    Outcome::new(key.readings().iter().map(|r| (r.arm, r.click)))
}

/// Path segments the scenario's particles can travel, e.g. `u+ v+ u− v−`.
fn scenario_segments(scenario: &Scenario, frame: &Frame) -> Result<BTreeSet<ArmMode>, LivesError> {
    let run = run_unitary(scenario, frame)?;
    let states = std::iter::once(&scenario.initial).chain(run.steps.iter().map(|(_, s)| s));
    Ok(with_siblings(states.flat_map(|s| {
        s.terms()
            .flat_map(|(l, _)| term_segments(l).collect::<Vec<_>>())
    })))
}

/// Segments the frame's world sees. A certain mode (given, or forced by a
/// certain partner and a joint exclusion) is visible and its siblings hidden;
/// on arms without one, excluded modes are hidden and the rest visible.
pub fn visibility(
    facts: &FactSet,
    segments: &BTreeSet<ArmMode>,
) -> (BTreeSet<ArmMode>, BTreeSet<ArmMode>) {
    let mut certain: BTreeMap<Arm, Mode> = facts
        .iter()
        .filter_map(|f| match f {
            Fact::Certain(m) => Some((m.arm, m.mode)),
            _ => None,
        })
        .collect();
    let other = |m: Mode| -> Option<Mode> {
        match m.siblings() {
            [a, b] => Some(if *a == m { *b } else { *a }),
            _ => None,
        }
    };
    loop {
        let mut changed = false;
        for f in facts {
            if let Fact::JointExcluded(x, y) = f {
                for (p, q) in [(x, y), (y, x)] {
                    if certain.get(&p.arm) == Some(&p.mode) && !certain.contains_key(&q.arm) {
                        if let Some(alt) = other(q.mode) {
                            certain.insert(q.arm, alt);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let excluded: BTreeSet<ArmMode> = facts
        .iter()
        .flat_map(|f| match f {
            Fact::Excluded(m) => vec![*m],
            Fact::JointExcluded(a, b) => vec![*a, *b],
            Fact::Certain(_) => vec![],
        })
        .collect();
    segments
        .iter()
        .partition(|seg| match certain.get(&seg.arm) {
            Some(&mode) => seg.mode == mode,
            None => !excluded.contains(seg),
        })
}

/// The first-person world of one frame's observer under a post-selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldGraph {
    pub scenario: String,
    pub frame: String,
    pub frame_label: String,
    pub post_select: Outcome,
    /// Path facts inferred from the frame's conditioned history.
    pub facts: FactSet,
    /// Event after which `facts` were established, with the state there.
    pub evidence: Option<(String, Superposition)>,
    pub world: RelativeWorld,
    /// Other outcome worlds of the final split, hidden from `world`.
    pub parallel: Vec<RelativeWorld>,
    /// `world`'s lives merged into one set.
    pub joint: LiveSet,
    /// Unitary final state with path trails, used for support queries.
    pub tracked_final: Superposition,
}

impl WorldGraph {
    pub fn tags(&self) -> &BTreeSet<PerspectiveTag> {
        &self.joint.constituents
    }

    pub fn first_person_observer(&self) -> String {
        format!("O_{{{}}}", self.frame_label)
    }

    /// Life of `agent` in this world, if present.
    pub fn life_of(&self, agent: &str) -> Option<&LiveSet> {
        self.world.lives.iter().find(|l| l.contains_agent(agent))
    }

    /// Graphviz rendering: one cluster per world, lives as nodes, solid
    /// edges for visible interactions, dashed for hidden ones.
    pub fn to_dot(&self) -> String {
        let q = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
        let f = &self.frame_label;
        let mut out = String::new();
        let _ = writeln!(out, "digraph {} {{", q(&format!("{}/{f}", self.scenario)));
        let _ = writeln!(out, "  rankdir=LR;");
        let _ = writeln!(out, "  node [fontname=\"Helvetica\"];");
        let _ = writeln!(out, "  subgraph cluster_0 {{");
        let _ = writeln!(
            out,
            "    label={};",
            q(&format!(
                "world of {} ({}), weight {}",
                self.first_person_observer(),
                self.post_select.detector_string(),
                self.world.probability
            ))
        );
        let apparatus = self
            .world
            .lives
            .iter()
            .flat_map(|l| l.constituents.iter())
            .find(|t| t.agent.starts_with("A_"))
            .map(|t| t.agent.clone())
            .unwrap_or_else(|| "A".to_string());
        let node = |name: &str| q(&format!("{f}/{name}"));
        let segments: BTreeSet<&ArmMode> = self
            .world
            .visible
            .iter()
            .chain(&self.world.hidden)
            .collect();
        for seg in &segments {
            let style = if self.world.visible.contains(seg) {
                "solid"
            } else {
                "dashed"
            };
            let _ = writeln!(
                out,
                "    {} [label={}, shape=ellipse, style={style}];",
                node(&seg.to_string()),
                q(&seg.to_string())
            );
        }
        for life in &self.world.lives {
            for tag in &life.constituents {
                let label = LiveSet {
                    constituents: BTreeSet::from([tag.clone()]),
                    memory: life.memory.clone(),
                }
                .to_string();
                let _ = writeln!(
                    out,
                    "    {} [label={}, shape=box];",
                    node(&tag.agent),
                    q(&label)
                );
            }
        }
        for seg in &segments {
            let style = if self.world.visible.contains(seg) {
                "solid"
            } else {
                "dashed"
            };
            let _ = writeln!(
                out,
                "    {} -> {} [style={style}];",
                node(&seg.to_string()),
                node(&apparatus)
            );
        }
        for life in &self.world.lives {
            for tag in life.constituents.iter().filter(|t| t.agent != apparatus) {
                let _ = writeln!(
                    out,
                    "    {} -> {} [style=solid];",
                    node(&apparatus),
                    node(&tag.agent)
                );
            }
        }
        let _ = writeln!(out, "  }}");
        for (i, w) in self.parallel.iter().enumerate() {
            let n = i + 1;
            let _ = writeln!(out, "  subgraph cluster_{n} {{");
            let _ = writeln!(
                out,
                "    label={};",
                q(&format!(
                    "parallel world {}, weight {}",
                    key_outcome(&w.key),
                    w.probability
                ))
            );
            let _ = writeln!(out, "    style=dashed;");
            for life in &w.lives {
                let _ = writeln!(
                    out,
                    "    {} [label={}, shape=box, style=dashed];",
                    node(&format!("world{n}/{}", life.id())),
                    q(&life.to_string())
                );
            }
            let _ = writeln!(out, "  }}");
            for life in &w.lives {
                let _ = writeln!(
                    out,
                    "  {} -> {} [style=dashed, dir=none];",
                    node(&apparatus),
                    node(&format!("world{n}/{}", life.id()))
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// World graph in which every other frame of the scenario contributes a
/// third-person observer.
pub fn world_graph(
    scenario: &Scenario,
    frame: &Frame,
    post_select: &Outcome,
) -> Result<WorldGraph, LivesError> {
    let peers: Vec<&Frame> = scenario.frames.iter().collect();
    world_graph_among(scenario, frame, &peers, post_select)
}

/// World graph whose third-person observers are those of `peers`.
pub fn world_graph_among(
    scenario: &Scenario,
    frame: &Frame,
    peers: &[&Frame],
    post_select: &Outcome,
) -> Result<WorldGraph, LivesError> {
    let history = run_collapse(scenario, frame, post_select)?;
    let tracked_final = run_tracked(scenario, frame)?;
    let segments = scenario_segments(scenario, frame)?;
    let (visible, hidden) = visibility(&history.all_facts(), &segments);

    // Every life in the world shares the world's record; a third-person
    // observer holds only what this history established.
    let mut memory = Memory::new();
    for r in post_select.readings() {
        memory.extend(reading_memory(r));
    }
    for seg in &segments {
        let v = if visible.contains(seg) {
            "visible"
        } else {
            "hidden"
        };
        memory.insert(seg.to_string(), v.to_string());
    }
    let mut lives = vec![
        LiveSet::single(&observer_symbol(frame), Person::First, memory.clone()),
        LiveSet::single(&apparatus_symbol(frame), Person::First, memory.clone()),
    ];
    for peer in peers.iter().filter(|p| p.name != frame.name) {
        lives.push(LiveSet::single(
            &observer_symbol(peer),
            Person::Third,
            memory.clone(),
        ));
    }
    let joint = lives[1..]
        .iter()
        .try_fold(lives[0].clone(), |acc, l| merge_lives(&acc, l))?;

    let key = post_select.readings().fold(BasisLabel::empty(), |k, r| {
        k.set(Slot::Register(r.arm), Symbol::Click(r.click))
    });
    let world = RelativeWorld {
        id: format!("{}:{}", frame.label, post_select),
        key,
        branch: history.final_state().clone(),
        probability: history.weight.clone(),
        lives,
        visible,
        hidden,
    };

    let registers: BTreeSet<Slot> = scenario
        .detected_arms()
        .into_iter()
        .map(Slot::Register)
        .collect();
    // Weights come from the interfering state; trails only name the
    // segments that feed each world. Without a post-selection the world is
    // the whole state.
    let final_state = tracked_final.without_trails();
    let parallel = match split_worlds(&final_state, &registers) {
        Ok(worlds) if !post_select.is_empty() => worlds
            .into_iter()
            .filter(|w| !post_select.matches(&key_outcome(&w.key)))
            .map(|mut w| {
                w.visible = tracked_final
                    .terms()
                    .filter(|(l, _)| w.key.entries().all(|(sl, sym)| l.get(sl) == Some(sym)))
                    .flat_map(|(l, _)| term_segments(l).collect::<Vec<_>>())
                    .collect();
                w.hidden = segments.difference(&w.visible).copied().collect();
                w
            })
            .collect(),
        Ok(_) | Err(LivesError::NoApparatus) => Vec::new(),
        Err(e) => return Err(e),
    };

    let evidence = history
        .steps
        .iter()
        .rev()
        .find(|s| !s.elements.is_empty())
        .map(|s| (s.event.clone(), s.state.clone()));

    Ok(WorldGraph {
        scenario: scenario.name.clone(),
        frame: frame.name.clone(),
        frame_label: frame.label.clone(),
        post_select: post_select.clone(),
        facts: history.inferred(),
        evidence,
        world,
        parallel,
        joint,
        tracked_final,
    })
}

/// A final term that matches the post-selection and whose recorded paths
/// admit every fact, if one exists.
pub fn supporting_term<'a, I>(
    tracked_final: &'a Superposition,
    post_select: &Outcome,
    facts: I,
) -> Option<&'a BasisLabel>
where
    I: IntoIterator<Item = &'a Fact> + Clone,
{
    tracked_final
        .terms()
        .map(|(l, _)| l)
        .filter(|l| {
            post_select
                .readings()
                .all(|r| l.click(r.arm) == Some(r.click))
        })
        .find(|l| {
            let path: BTreeMap<Arm, Mode> = Arm::ALL
                .into_iter()
                .filter_map(|a| l.trail(a).map(|m| (a, m)))
                .collect();
            facts.clone().into_iter().all(|f| f.admits(&path))
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameFacts {
    pub frame: String,
    pub label: String,
    pub facts: FactSet,
    /// Some final branch supports these facts on their own.
    pub supported: bool,
    pub evidence: Option<(String, Superposition)>,
}

/// An observer whose first-person world and whose third-person copy in
/// another frame's world disagree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Conflict {
    pub agent: String,
    pub first_person_frame: String,
    pub third_person_world: String,
    pub key: String,
    pub first_value: String,
    pub third_value: String,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{a} first-person vs {a} third-person in {w}'s world ({k}: {x} vs {y})",
            a = self.agent,
            w = self.third_person_world,
            k = self.key,
            x = self.first_value,
            y = self.third_value
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadoxReport {
    pub scenario: String,
    pub post_select: Outcome,
    /// Per-frame facts, ordered by frame name.
    pub frames: Vec<FrameFacts>,
    /// `matrix[i][j]`: facts of frames `i` and `j` are jointly supported.
    pub matrix: Vec<Vec<bool>>,
    /// A final branch supporting every frame's facts at once.
    pub joint_witness: Option<BasisLabel>,
    pub paradox: bool,
    pub conflicts: Vec<Conflict>,
}

impl ParadoxReport {
    pub fn joint_supported(&self) -> bool {
        self.joint_witness.is_some()
    }

    pub fn verdict(&self) -> &'static str {
        if self.paradox {
            "paradox"
        } else {
            "consistent"
        }
    }

    /// `frame label → facts`, for direct comparison.
    pub fn fact_map(&self) -> BTreeMap<String, FactSet> {
        self.frames
            .iter()
            .map(|f| (f.label.clone(), f.facts.clone()))
            .collect()
    }
}

impl fmt::Display for ParadoxReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.post_select.is_empty() {
            writeln!(f, "scenario {} without post-selection", self.scenario)?;
        } else {
            writeln!(
                f,
                "scenario {} post-selected on {}",
                self.scenario,
                self.post_select.detector_string()
            )?;
        }
        writeln!(f, "path facts (counterfactual inferences per frame):")?;
        for ff in &self.frames {
            let facts: Vec<String> = ff.facts.iter().map(|x| x.to_string()).collect();
            let facts = if facts.is_empty() {
                "none".to_string()
            } else {
                facts.join("; ")
            };
            write!(f, "  {}: {facts}", ff.label)?;
            if let Some((event, state)) = &ff.evidence {
                write!(f, "  [after {event}: {state}]")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "pairwise support:")?;
        let width = self
            .frames
            .iter()
            .map(|x| x.label.chars().count())
            .max()
            .unwrap_or(0)
            .max(3);
        write!(f, "  {:width$}", "")?;
        for ff in &self.frames {
            write!(f, " {:>width$}", ff.label)?;
        }
        writeln!(f)?;
        for (i, ff) in self.frames.iter().enumerate() {
            write!(f, "  {:width$}", ff.label)?;
            for ok in &self.matrix[i] {
                write!(f, " {:>width$}", if *ok { "yes" } else { "no" })?;
            }
            writeln!(f)?;
        }
        if !self.conflicts.is_empty() {
            writeln!(f, "conflicting perspectives:")?;
            for c in &self.conflicts {
                writeln!(f, "  {c}")?;
            }
        }
        match &self.joint_witness {
            Some(w) => write!(f, "CONSISTENT: joint facts supported by branch {w}"),
            None if self.paradox => write!(f, "PARADOX: joint facts unsupported"),
            None => write!(
                f,
                "CONSISTENT: some frame's facts are unsupported on their own"
            ),
        }
    }
}

/// Compares the frames' inferred facts against the unitary final state.
/// The verdict is a paradox when every frame's facts hold on their own but
/// no single branch supports them all.
pub fn perspective_compare(graphs: &[WorldGraph]) -> Result<ParadoxReport, LivesError> {
    let mut sorted: Vec<&WorldGraph> = graphs.iter().collect();
    sorted.sort_by(|a, b| a.frame.cmp(&b.frame));
    if let Some(first) = sorted.first() {
        for g in &sorted[1..] {
            if g.scenario != first.scenario {
                return Err(LivesError::MixedScenarios(
                    first.scenario.clone(),
                    g.scenario.clone(),
                ));
            }
            if g.post_select != first.post_select {
                return Err(LivesError::MixedPostSelections(
                    first.post_select.detector_string(),
                    g.post_select.detector_string(),
                ));
            }
        }
    }
    for pair in sorted.windows(2) {
        if pair[0].frame == pair[1].frame {
            return Err(LivesError::DuplicateFrame(pair[0].frame.clone()));
        }
    }
    let Some(first) = sorted.first() else {
        return Ok(ParadoxReport {
            scenario: String::new(),
            post_select: Outcome::default(),
            frames: Vec::new(),
            matrix: Vec::new(),
            joint_witness: Some(BasisLabel::empty()),
            paradox: false,
            conflicts: Vec::new(),
        });
    };
    let state = &first.tracked_final;
    let ps = &first.post_select;
    let supported = |facts: Vec<&Fact>| supporting_term(state, ps, facts).cloned();

    let frames: Vec<FrameFacts> = sorted
        .iter()
        .map(|g| FrameFacts {
            frame: g.frame.clone(),
            label: g.frame_label.clone(),
            facts: g.facts.clone(),
            supported: supported(g.facts.iter().collect()).is_some(),
            evidence: g.evidence.clone(),
        })
        .collect();
    let matrix: Vec<Vec<bool>> = frames
        .iter()
        .map(|a| {
            frames
                .iter()
                .map(|b| supported(a.facts.iter().chain(&b.facts).collect()).is_some())
                .collect()
        })
        .collect();
    let joint_witness = supported(frames.iter().flat_map(|f| f.facts.iter()).collect());
    let paradox = joint_witness.is_none() && frames.iter().all(|f| f.supported);

    let mut conflicts = Vec::new();
    for owner in &sorted {
        let agent = owner.first_person_observer();
        let Some(own) = owner.life_of(&agent) else {
            continue;
        };
        for host in sorted.iter().filter(|h| h.frame != owner.frame) {
            let Some(copy) = host.life_of(&agent) else {
                continue;
            };
            if let Err(LivesError::ContradictoryMemory { key, left, right }) =
                merge_memory(&own.memory, &copy.memory)
            {
                conflicts.push(Conflict {
                    agent: agent.clone(),
                    first_person_frame: owner.frame_label.clone(),
                    third_person_world: host.frame_label.clone(),
                    key,
                    first_value: left,
                    third_value: right,
                });
            }
        }
    }
    conflicts.sort();

    Ok(ParadoxReport {
        scenario: first.scenario.clone(),
        post_select: ps.clone(),
        frames,
        matrix,
        joint_witness,
        paradox,
        conflicts,
    })
}
