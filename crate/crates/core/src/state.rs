//! Labelled superpositions over a sparse tensor basis.
//!
//! A basis label is a map from subsystem slot to symbol. Slots sort in a fixed
//! global order (particle pair, positron, electron, photon, detector registers,
//! observers, path trails), which makes labels, their text form and the JSON
//! form canonical.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{parse_rational, rational_to_string, Amplitude, FieldError, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("subsystem slots overlap: {0}")]
    OverlappingSlots(String),
    #[error("states live on different subsystem slots: {left} vs {right}")]
    SlotMismatch { left: String, right: String },
    #[error("conditioning on {slot}={value} has probability 0")]
    ImpossibleCondition { slot: String, value: String },
    #[error("cannot renormalize by non-positive probability {0}")]
    NonPositiveProbability(String),
    #[error("probability {0} has no exact square root in Q(√2); use the floating-point path")]
    NoExactRoot(String),
    #[error("invalid basis label {0:?}")]
    InvalidLabel(String),
    #[error("invalid state json: {0}")]
    Json(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A particle worldline. In the `hardy` scenario `Plus` is the positron and
/// `Minus` the electron; in the spin scenario they are the particles sent to
/// observers A and B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Arm {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "photon")]
    Photon,
}

impl Arm {
    pub const ALL: [Arm; 3] = [Arm::Plus, Arm::Minus, Arm::Photon];

    pub fn suffix(self) -> &'static str {
        match self {
            Arm::Plus => "+",
            Arm::Minus => "−",
            Arm::Photon => "",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Arm::Plus => "positron",
            Arm::Minus => "electron",
            Arm::Photon => "photon",
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arm::Plus => "+",
            Arm::Minus => "−",
            Arm::Photon => "photon",
        })
    }
}

impl FromStr for Arm {
    type Err = StateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "plus" | "positron" => Ok(Arm::Plus),
            "-" | "−" | "minus" | "electron" => Ok(Arm::Minus),
            "photon" | "" => Ok(Arm::Photon),
            _ => Err(StateError::InvalidLabel(s.to_string())),
        }
    }
}

/// Which group of modes a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeFamily {
    Input,
    Path,
    Port,
    Spin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    E,
    U,
    V,
    C,
    D,
    Up,
    Down,
}

impl Mode {
    pub fn family(self) -> ModeFamily {
        match self {
            Mode::E => ModeFamily::Input,
            Mode::U | Mode::V => ModeFamily::Path,
            Mode::C | Mode::D => ModeFamily::Port,
            Mode::Up | Mode::Down => ModeFamily::Spin,
        }
    }

    /// Every mode of the same family.
    pub fn siblings(self) -> &'static [Mode] {
        match self.family() {
            ModeFamily::Input => &[Mode::E],
            ModeFamily::Path => &[Mode::U, Mode::V],
            ModeFamily::Port => &[Mode::C, Mode::D],
            ModeFamily::Spin => &[Mode::Up, Mode::Down],
        }
    }

    /// Path and spin modes carry which-way facts; the others do not.
    pub fn is_path_like(self) -> bool {
        matches!(self.family(), ModeFamily::Path | ModeFamily::Spin)
    }

    fn symbol(self) -> &'static str {
        match self {
            Mode::E => "e",
            Mode::U => "u",
            Mode::V => "v",
            Mode::C => "c",
            Mode::D => "d",
            Mode::Up => "↑",
            Mode::Down => "↓",
        }
    }

    fn from_symbol(s: &str) -> Option<Mode> {
        Some(match s {
            "e" => Mode::E,
            "u" => Mode::U,
            "v" => Mode::V,
            "c" => Mode::C,
            "d" => Mode::D,
            "↑" | "up" => Mode::Up,
            "↓" | "down" => Mode::Down,
            _ => return None,
        })
    }
}

/// A mode on a particular arm, e.g. `u+` or `d−`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArmMode {
    pub arm: Arm,
    pub mode: Mode,
}

impl ArmMode {
    pub fn new(arm: Arm, mode: Mode) -> Self {
        Self { arm, mode }
    }
}

impl fmt::Display for ArmMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.mode.symbol(), self.arm.suffix())
    }
}

impl FromStr for ArmMode {
    type Err = StateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || StateError::InvalidLabel(s.to_string());
        let split = ["+", "-", "−"]
            .iter()
            .filter_map(|suf| s.strip_suffix(suf).map(|m| (m, *suf)))
            .next();
        let (mode, arm) = match split {
            Some((m, suf)) => (m, suf.parse::<Arm>()?),
            None => (s, Arm::Photon),
        };
        let mode = Mode::from_symbol(mode).ok_or_else(bad)?;
        Ok(ArmMode::new(arm, mode))
    }
}

/// The reading of one detector register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Click {
    /// No detector fired (the annihilation branch).
    Null,
    C,
    D,
    Up,
    Down,
}

impl Click {
    pub fn from_mode(mode: Mode) -> Option<Click> {
        match mode {
            Mode::C => Some(Click::C),
            Mode::D => Some(Click::D),
            Mode::Up => Some(Click::Up),
            Mode::Down => Some(Click::Down),
            _ => None,
        }
    }

    pub fn mode(self) -> Option<Mode> {
        match self {
            Click::Null => None,
            Click::C => Some(Mode::C),
            Click::D => Some(Mode::D),
            Click::Up => Some(Mode::Up),
            Click::Down => Some(Mode::Down),
        }
    }
}

/// Detector register of one arm together with its reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Reading {
    pub arm: Arm,
    pub click: Click,
}

impl Reading {
    pub fn new(arm: Arm, click: Click) -> Self {
        Self { arm, click }
    }

    fn spin_observer(arm: Arm) -> &'static str {
        match arm {
            Arm::Plus => "A",
            Arm::Minus => "B",
            Arm::Photon => "P",
        }
    }

    /// The pair of detector names used for port readings on this arm.
    pub fn detector_names(arm: Arm) -> (String, String) {
        match arm {
            Arm::Photon => ("D1".into(), "D2".into()),
            _ => (format!("C{}", arm.suffix()), format!("D{}", arm.suffix())),
        }
    }

    /// Short outcome key: `c+`, `d−`, `D1`, `A↑`; empty for a null reading.
    pub fn short(&self) -> String {
        match (self.arm, self.click) {
            (_, Click::Null) => String::new(),
            (Arm::Photon, Click::C) => "D1".into(),
            (Arm::Photon, Click::D) => "D2".into(),
            (arm, Click::C) => format!("c{}", arm.suffix()),
            (arm, Click::D) => format!("d{}", arm.suffix()),
            (arm, Click::Up) => format!("{}↑", Self::spin_observer(arm)),
            (arm, Click::Down) => format!("{}↓", Self::spin_observer(arm)),
        }
    }
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, d) = Self::detector_names(self.arm);
        match self.click {
            Click::Null => write!(f, "{c}=0;{d}=0"),
            Click::C => write!(f, "{c}=1;{d}=0"),
            Click::D => write!(f, "{c}=0;{d}=1"),
            Click::Up => write!(f, "{}=↑", Self::spin_observer(self.arm)),
            Click::Down => write!(f, "{}=↓", Self::spin_observer(self.arm)),
        }
    }
}

impl FromStr for Reading {
    type Err = StateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || StateError::InvalidLabel(s.to_string());
        let norm = s.replace('−', "-");
        if let Some((who, val)) = norm.split_once('=') {
            if !norm.contains(';') {
                let arm = match who {
                    "A" => Arm::Plus,
                    "B" => Arm::Minus,
                    "P" => Arm::Photon,
                    _ => return Err(bad()),
                };
                let click = match val {
                    "↑" | "up" => Click::Up,
                    "↓" | "down" => Click::Down,
                    _ => return Err(bad()),
                };
                return Ok(Reading::new(arm, click));
            }
        }
        let (first, second) = norm.split_once(';').ok_or_else(bad)?;
        let (c_name, c_val) = first.split_once('=').ok_or_else(bad)?;
        let (d_name, d_val) = second.split_once('=').ok_or_else(bad)?;
        let arm = Arm::ALL
            .into_iter()
            .find(|&arm| {
                let (c, d) = Self::detector_names(arm);
                c.replace('−', "-") == c_name && d.replace('−', "-") == d_name
            })
            .ok_or_else(bad)?;
        let click = match (c_val, d_val) {
            ("0", "0") => Click::Null,
            ("1", "0") => Click::C,
            ("0", "1") => Click::D,
            _ => return Err(bad()),
        };
        Ok(Reading::new(arm, click))
    }
}

/// Subsystem slot. The derived order is the canonical label order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    /// Joint positron/electron slot holding `γ` after annihilation.
    Pair,
    Particle(Arm),
    Register(Arm),
    Observer(String),
    /// Last path-like mode an arm travelled through; bookkeeping only.
    Trail(Arm),
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Pair => write!(f, "pair"),
            Slot::Particle(arm) => write!(f, "{}", arm.name()),
            Slot::Register(arm) => write!(f, "register{}", arm.suffix()),
            Slot::Observer(name) => write!(f, "observer {name}"),
            Slot::Trail(arm) => write!(f, "trail{}", arm.suffix()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Gamma,
    Mode(Mode),
    Click(Click),
    Word(String),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Gamma => f.write_str("γ"),
            Symbol::Mode(m) => f.write_str(m.symbol()),
            Symbol::Click(c) => write!(f, "{c:?}"),
            Symbol::Word(w) => f.write_str(w),
        }
    }
}

/// A canonical tensor word such as `u+,d−,C−=0;D−=1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel {
    entries: BTreeMap<Slot, Symbol>,
}

impl BasisLabel {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn gamma() -> Self {
        Self::empty()
            .with(Slot::Pair, Symbol::Gamma)
            .expect("fresh label")
    }

    /// Label with one mode per listed arm.
    pub fn modes(modes: &[ArmMode]) -> Result<Self, StateError> {
        modes.iter().try_fold(Self::empty(), |l, m| {
            l.with(Slot::Particle(m.arm), Symbol::Mode(m.mode))
        })
    }

    /// Adds a slot, enforcing slot/symbol kinds and γ exclusivity.
    pub fn with(mut self, slot: Slot, symbol: Symbol) -> Result<Self, StateError> {
        let kind_ok = matches!(
            (&slot, &symbol),
            (Slot::Pair, Symbol::Gamma)
                | (Slot::Particle(_), Symbol::Mode(_))
                | (Slot::Trail(_), Symbol::Mode(_))
                | (Slot::Register(_), Symbol::Click(_))
                | (Slot::Observer(_), Symbol::Word(_))
        );
        if !kind_ok {
            return Err(StateError::InvalidLabel(format!(
                "{slot} cannot hold {symbol}"
            )));
        }
        let covered = self.coverage();
        let clash = slot_coverage(&slot).iter().any(|s| covered.contains(s));
        if clash {
            return Err(StateError::OverlappingSlots(format!("{slot} in {self}")));
        }
        self.entries.insert(slot, symbol);
        Ok(self)
    }

    pub fn get(&self, slot: &Slot) -> Option<&Symbol> {
        self.entries.get(slot)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Slot, &Symbol)> {
        self.entries.iter()
    }

    pub fn is_gamma(&self) -> bool {
        self.entries.contains_key(&Slot::Pair)
    }

    pub fn mode(&self, arm: Arm) -> Option<Mode> {
        match self.entries.get(&Slot::Particle(arm)) {
            Some(Symbol::Mode(m)) => Some(*m),
            _ => None,
        }
    }

    pub fn trail(&self, arm: Arm) -> Option<Mode> {
        match self.entries.get(&Slot::Trail(arm)) {
            Some(Symbol::Mode(m)) => Some(*m),
            _ => None,
        }
    }

    pub fn click(&self, arm: Arm) -> Option<Click> {
        match self.entries.get(&Slot::Register(arm)) {
            Some(Symbol::Click(c)) => Some(*c),
            _ => None,
        }
    }

    /// Registers present on this label, in arm order.
    pub fn readings(&self) -> Vec<Reading> {
        Arm::ALL
            .into_iter()
            .filter_map(|arm| self.click(arm).map(|c| Reading::new(arm, c)))
            .collect()
    }

    /// Replaces (or sets) a slot's symbol without the exclusivity check.
    pub(crate) fn set(&self, slot: Slot, symbol: Symbol) -> Self {
        let mut next = self.clone();
        next.entries.insert(slot, symbol);
        next
    }

    pub(crate) fn remove(&self, slot: &Slot) -> Self {
        let mut next = self.clone();
        next.entries.remove(slot);
        next
    }

    /// Slots this label occupies; `γ` occupies both particle slots.
    pub fn coverage(&self) -> BTreeSet<Slot> {
        self.entries.keys().flat_map(slot_coverage).collect()
    }

    /// Label with bookkeeping trail slots removed.
    pub fn without_trails(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|(s, _)| !matches!(s, Slot::Trail(_)))
                .map(|(s, v)| (s.clone(), v.clone()))
                .collect(),
        }
    }

    fn merge(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|(s, v)| (s.clone(), v.clone())));
        Self { entries }
    }
}

fn slot_coverage(slot: &Slot) -> Vec<Slot> {
    match slot {
        Slot::Pair => vec![Slot::Particle(Arm::Plus), Slot::Particle(Arm::Minus)],
        s => vec![s.clone()],
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<String> = self
            .entries
            .iter()
            .map(|(slot, sym)| match (slot, sym) {
                (Slot::Pair, _) => "γ".to_string(),
                (Slot::Particle(arm), Symbol::Mode(m)) => ArmMode::new(*arm, *m).to_string(),
                (Slot::Register(arm), Symbol::Click(c)) => Reading::new(*arm, *c).to_string(),
                (Slot::Observer(name), sym) => format!("@{name}={sym}"),
                (Slot::Trail(arm), Symbol::Mode(m)) => format!("was:{}", ArmMode::new(*arm, *m)),
                (slot, sym) => format!("{slot}?{sym}"),
            })
            .collect();
        if tokens.is_empty() {
            f.write_str("∅")
        } else {
            f.write_str(&tokens.join(","))
        }
    }
}

impl FromStr for BasisLabel {
    type Err = StateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || StateError::InvalidLabel(s.to_string());
        if s == "∅" || s.is_empty() {
            return Ok(Self::empty());
        }
        s.split(',').try_fold(Self::empty(), |label, token| {
            let token = token.trim();
            if token == "γ" || token == "gamma" {
                label.with(Slot::Pair, Symbol::Gamma)
            } else if let Some(obs) = token.strip_prefix('@') {
                let (name, value) = obs.split_once('=').ok_or_else(bad)?;
                label.with(
                    Slot::Observer(name.to_string()),
                    Symbol::Word(value.to_string()),
                )
            } else if let Some(trail) = token.strip_prefix("was:") {
                let m: ArmMode = trail.parse()?;
                label.with(Slot::Trail(m.arm), Symbol::Mode(m.mode))
            } else if token.contains('=') {
                let r: Reading = token.parse()?;
                label.with(Slot::Register(r.arm), Symbol::Click(r.click))
            } else {
                let m: ArmMode = token.parse()?;
                label.with(Slot::Particle(m.arm), Symbol::Mode(m.mode))
            }
        })
    }
}

/// Result of projecting onto one slot value: unnormalized state and its weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conditioned {
    pub state: Superposition,
    pub probability: Real,
}

/// A finite linear combination of basis labels with exact amplitudes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Superposition {
    terms: BTreeMap<BasisLabel, Amplitude>,
}

impl Superposition {
    /// The zero vector.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The one-term state on no slots; neutral for [`Superposition::tensor`].
    pub fn identity() -> Self {
        Self::basis(BasisLabel::empty())
    }

    pub fn basis(label: BasisLabel) -> Self {
        Self::from_terms([(label, Amplitude::one())])
    }

    /// Sums repeated labels and drops zero amplitudes.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (BasisLabel, Amplitude)>,
    {
        let mut map: BTreeMap<BasisLabel, Amplitude> = BTreeMap::new();
        for (label, amp) in terms {
            let entry = map.entry(label).or_insert_with(Amplitude::zero);
            *entry = &*entry + &amp;
        }
        map.retain(|_, a| !a.is_zero());
        Self { terms: map }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisLabel, &Amplitude)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Amplitude {
        self.terms
            .get(label)
            .cloned()
            .unwrap_or_else(Amplitude::zero)
    }

    pub fn squared_norm(&self) -> Real {
        self.terms
            .values()
            .fold(Real::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn is_normalized(&self) -> bool {
        self.squared_norm().is_one()
    }

    pub fn scale(&self, k: &Amplitude) -> Self {
        Self::from_terms(self.terms.iter().map(|(l, a)| (l.clone(), a * k)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(l, a)| (l.clone(), a.clone())),
        )
    }

    /// Applies a linear map given by its action on each basis label.
    pub fn map_terms<E, F>(&self, mut f: F) -> Result<Self, E>
    where
        F: FnMut(&BasisLabel) -> Result<Vec<(BasisLabel, Amplitude)>, E>,
    {
        let mut out = Vec::with_capacity(self.terms.len() * 2);
        for (label, amp) in &self.terms {
            for (image, coeff) in f(label)? {
                out.push((image, amp * &coeff));
            }
        }
        Ok(Self::from_terms(out))
    }

    /// Keeps only the terms matching `keep`.
    pub fn filter<F: Fn(&BasisLabel) -> bool>(&self, keep: F) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(l, _)| keep(l))
                .map(|(l, a)| (l.clone(), a.clone()))
                .collect(),
        }
    }

    /// Union of the slots occupied by any term.
    pub fn slots(&self) -> BTreeSet<Slot> {
        self.terms.keys().flat_map(|l| l.coverage()).collect()
    }

    pub fn tensor(&self, other: &Self) -> Result<Self, StateError> {
        let mine = self.slots();
        let theirs = other.slots();
        if let Some(clash) = mine.intersection(&theirs).next() {
            return Err(StateError::OverlappingSlots(clash.to_string()));
        }
        let mut out = Vec::with_capacity(self.len() * other.len());
        for (l1, a1) in &self.terms {
            for (l2, a2) in &other.terms {
                out.push((l1.merge(l2), a1 * a2));
            }
        }
        Ok(Self::from_terms(out))
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<Amplitude, StateError> {
        if !self.is_zero() && !other.is_zero() && self.slots() != other.slots() {
            return Err(StateError::SlotMismatch {
                left: format_slots(&self.slots()),
                right: format_slots(&other.slots()),
            });
        }
        Ok(self
            .terms
            .iter()
            .filter_map(|(l, a)| other.terms.get(l).map(|b| a.conj() * b))
            .fold(Amplitude::zero(), |acc, x| acc + x))
    }

    /// Projects onto `slot = value`. Returns the unnormalized projection and
    /// its exact weight.
    pub fn condition(&self, slot: &Slot, value: &Symbol) -> Result<Conditioned, StateError> {
        let state = self.filter(|l| l.get(slot) == Some(value));
        if state.is_zero() {
            return Err(StateError::ImpossibleCondition {
                slot: slot.to_string(),
                value: value.to_string(),
            });
        }
        let probability = state.squared_norm();
        Ok(Conditioned { state, probability })
    }

    /// Divides by `√probability`, exactly.
    pub fn renormalize(&self, probability: &Real) -> Result<Self, StateError> {
        if !probability.is_positive() {
            return Err(StateError::NonPositiveProbability(probability.to_string()));
        }
        let root = probability
            .sqrt()
            .ok_or_else(|| StateError::NoExactRoot(probability.to_string()))?;
        let k = root.inv()?;
        Ok(self.scale(&Amplitude::from_real(k)))
    }

    /// Float fallback for weights without an exact root.
    pub fn to_f64_terms(&self, probability: &Real) -> Vec<(BasisLabel, (f64, f64))> {
        let k = 1.0 / probability.to_f64().sqrt();
        self.terms
            .iter()
            .map(|(l, a)| {
                let (re, im) = a.to_f64_pair();
                (l.clone(), (re * k, im * k))
            })
            .collect()
    }

    /// True iff `self = λ·other` with `|λ| = 1`.
    pub fn equal_up_to_phase(&self, other: &Self) -> bool {
        if self.len() != other.len() || self.is_zero() {
            return false;
        }
        let (first, a) = self.terms.iter().next().expect("nonempty");
        let Some(b) = other.terms.get(first) else {
            return false;
        };
        let Ok(lambda) = a.checked_div(b) else {
            return false;
        };
        lambda.norm_sqr().is_one()
            && self
                .terms
                .iter()
                .all(|(l, a)| other.terms.get(l).is_some_and(|b| &(&lambda * b) == a))
    }

    /// Sums amplitudes of labels that agree after dropping trail slots.
    pub fn without_trails(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(l, a)| (l.without_trails(), a.clone())),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_terms()).expect("plain data")
    }

    pub fn to_json_terms(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(l, a)| TermJson {
                label: l.to_string(),
                amp: AmpJson {
                    a: rational_to_string(a.a()),
                    b: rational_to_string(a.b()),
                    c: rational_to_string(a.c()),
                    d: rational_to_string(a.d()),
                },
            })
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self, StateError> {
        let terms: Vec<TermJson> =
            serde_json::from_str(text).map_err(|e| StateError::Json(e.to_string()))?;
        Self::from_json_terms(&terms)
    }

    pub fn from_json_terms(terms: &[TermJson]) -> Result<Self, StateError> {
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let label: BasisLabel = t.label.parse()?;
            let amp = Amplitude::from_coords(
                parse_rational(&t.amp.a)?,
                parse_rational(&t.amp.b)?,
                parse_rational(&t.amp.c)?,
                parse_rational(&t.amp.d)?,
            );
            out.push((label, amp));
        }
        Ok(Self::from_terms(out))
    }
}

fn format_slots(slots: &BTreeSet<Slot>) -> String {
    let names: Vec<String> = slots.iter().map(|s| s.to_string()).collect();
    format!("{{{}}}", names.join(", "))
}

impl fmt::Display for Superposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (label, amp)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({amp})|{label}⟩")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub label: String,
    pub amp: AmpJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmpJson {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
}

/// `|m⟩` on one arm.
pub fn ket(arm: Arm, mode: Mode) -> Superposition {
    Superposition::basis(BasisLabel::modes(&[ArmMode::new(arm, mode)]).expect("single slot"))
}

/// `|m1, m2⟩` on two arms.
pub fn ket2(first: ArmMode, second: ArmMode) -> Superposition {
    Superposition::basis(BasisLabel::modes(&[first, second]).expect("distinct arms"))
}
