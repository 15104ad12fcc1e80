//! Optical devices as exact linear maps on labelled states.
//!
//! Beam splitters use the `i`-on-reflection convention:
//! BS1 sends `|e⟩ ↦ (i|u⟩ + |v⟩)/√2`, BS2 sends `|u⟩ ↦ (i|d⟩ + |c⟩)/√2` and
//! `|v⟩ ↦ (i|c⟩ + |d⟩)/√2`. Mirrors are identities. Annihilation relabels
//! `|u+, u−⟩` to `|γ⟩`. Detection attaches an ideal pointer register.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::Amplitude;
use crate::state::{Arm, BasisLabel, Click, Mode, Slot, Superposition, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeviceError {
    #[error("{device} on arm {arm}: unexpected input mode {mode} in term |{label}⟩")]
    UnexpectedMode {
        device: DeviceKind,
        arm: Arm,
        mode: String,
        label: String,
    },
    #[error("detector on arm {arm}: arm has not passed its second beam splitter in |{label}⟩")]
    NotYetSplit { arm: Arm, label: String },
    #[error("detector on arm {arm}: term |{label}⟩ is already detected")]
    AlreadyDetected { arm: Arm, label: String },
    #[error("detector on arm {arm}: term |{label}⟩ has no particle on this arm")]
    ArmAbsent { arm: Arm, label: String },
    #[error("{0} requires an arm")]
    MissingArm(DeviceKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviceKind {
    Bs1,
    Bs2,
    Mirror,
    Annihilate,
    Detect,
}

impl fmt::Display for DeviceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeviceKind::Bs1 => "BS1",
            DeviceKind::Bs2 => "BS2",
            DeviceKind::Mirror => "mirror",
            DeviceKind::Annihilate => "annihilate",
            DeviceKind::Detect => "detect",
        })
    }
}

impl FromStr for DeviceKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bs1" => Ok(DeviceKind::Bs1),
            "bs2" => Ok(DeviceKind::Bs2),
            "mirror" => Ok(DeviceKind::Mirror),
            "annihilate" | "p" => Ok(DeviceKind::Annihilate),
            "detect" => Ok(DeviceKind::Detect),
            other => Err(format!("unknown device kind {other:?}")),
        }
    }
}

/// Linear action of a device on the modes of one arm.
pub type ModeMap = BTreeMap<Mode, Vec<(Mode, Amplitude)>>;

/// A device placed on an arm (or on both arms, for annihilation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceOp {
    pub kind: DeviceKind,
    pub arm: Option<Arm>,
}

impl DeviceOp {
    pub fn new(kind: DeviceKind, arm: Option<Arm>) -> Result<Self, DeviceError> {
        if kind != DeviceKind::Annihilate && arm.is_none() {
            return Err(DeviceError::MissingArm(kind));
        }
        let arm = if kind == DeviceKind::Annihilate {
            None
        } else {
            arm
        };
        Ok(Self { kind, arm })
    }

    pub fn on(kind: DeviceKind, arm: Arm) -> Self {
        Self::new(kind, Some(arm)).expect("arm given")
    }

    pub fn annihilate() -> Self {
        Self {
            kind: DeviceKind::Annihilate,
            arm: None,
        }
    }

    /// Arms whose slots this device reads or writes.
    pub fn arms(&self) -> Vec<Arm> {
        match self.arm {
            Some(arm) => vec![arm],
            None => vec![Arm::Plus, Arm::Minus],
        }
    }

    /// Mode map for the splitters; `None` for the other kinds.
    pub fn mode_map(&self) -> Option<ModeMap> {
        match self.kind {
            DeviceKind::Bs1 => Some(bs1_map()),
            DeviceKind::Bs2 => Some(bs2_map()),
            _ => None,
        }
    }

    pub fn apply(&self, s: &Superposition) -> Result<Superposition, DeviceError> {
        match (self.kind, self.arm) {
            (DeviceKind::Bs1, Some(arm)) => apply_bs1(s, arm),
            (DeviceKind::Bs2, Some(arm)) => apply_bs2(s, arm),
            (DeviceKind::Mirror, Some(arm)) => Ok(apply_mirror(s, arm)),
            (DeviceKind::Detect, Some(arm)) => detect(s, arm),
            (DeviceKind::Annihilate, _) => Ok(annihilate(s)),
            (kind, None) => Err(DeviceError::MissingArm(kind)),
        }
    }
}

impl fmt::Display for DeviceOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.arm) {
            (DeviceKind::Annihilate, _) => write!(f, "P"),
            (kind, Some(Arm::Photon)) => write!(f, "{kind}"),
            (kind, Some(arm)) => write!(f, "{kind}{}", arm.suffix()),
            (kind, None) => write!(f, "{kind}"),
        }
    }
}

fn half_splitter(straight: Mode, reflected: Mode) -> Vec<(Mode, Amplitude)> {
    let h = Amplitude::frac_1_sqrt2();
    vec![(straight, h.clone()), (reflected, Amplitude::i() * h)]
}

fn bs1_map() -> ModeMap {
    ModeMap::from([(Mode::E, half_splitter(Mode::V, Mode::U))])
}

fn bs2_map() -> ModeMap {
    ModeMap::from([
        (Mode::U, half_splitter(Mode::C, Mode::D)),
        (Mode::V, half_splitter(Mode::D, Mode::C)),
    ])
}

/// 50/50 splitter taking `inputs` to `outputs`: the first input is
/// transmitted to the first output and reflected (with `i`) to the second.
pub fn splitter_map(inputs: (Mode, Mode), outputs: (Mode, Mode)) -> ModeMap {
    ModeMap::from([
        (inputs.0, half_splitter(outputs.0, outputs.1)),
        (inputs.1, half_splitter(outputs.1, outputs.0)),
    ])
}

/// Applies `map` to `arm`. Terms whose arm mode is not in the map pass
/// through when `passes` accepts them, otherwise the map fails.
pub fn apply_mode_map<P>(
    s: &Superposition,
    arm: Arm,
    map: &ModeMap,
    device: DeviceKind,
    passes: P,
) -> Result<Superposition, DeviceError>
where
    P: Fn(&BasisLabel) -> bool,
{
    s.map_terms(|label| match label.mode(arm) {
        Some(mode) if map.contains_key(&mode) => Ok(map[&mode]
            .iter()
            .map(|(out, k)| {
                (
                    label.set(Slot::Particle(arm), Symbol::Mode(*out)),
                    k.clone(),
                )
            })
            .collect()),
        _ if passes(label) => Ok(vec![(label.clone(), Amplitude::one())]),
        mode => Err(DeviceError::UnexpectedMode {
            device,
            arm,
            mode: mode.map_or("none".into(), |m| Symbol::Mode(m).to_string()),
            label: label.to_string(),
        }),
    })
}

pub fn apply_bs1(s: &Superposition, arm: Arm) -> Result<Superposition, DeviceError> {
    apply_mode_map(s, arm, &bs1_map(), DeviceKind::Bs1, |l| {
        l.mode(arm).is_none()
    })
}

pub fn apply_bs2(s: &Superposition, arm: Arm) -> Result<Superposition, DeviceError> {
    apply_mode_map(s, arm, &bs2_map(), DeviceKind::Bs2, |l| {
        l.mode(arm).is_none() || l.click(arm).is_some()
    })
}

/// Mirrors contribute only a per-arm constant phase, taken to be 1.
pub fn apply_mirror(s: &Superposition, _arm: Arm) -> Superposition {
    s.clone()
}

pub fn annihilate(s: &Superposition) -> Superposition {
    Superposition::from_terms(s.terms().map(|(label, amp)| {
        if label.mode(Arm::Plus) == Some(Mode::U) && label.mode(Arm::Minus) == Some(Mode::U) {
            let gamma = label
                .remove(&Slot::Particle(Arm::Plus))
                .remove(&Slot::Particle(Arm::Minus))
                .set(Slot::Pair, Symbol::Gamma);
            (gamma, amp.clone())
        } else {
            (label.clone(), amp.clone())
        }
    }))
}

/// Entangles an ideal detector register with the arm's output mode.
pub fn detect(s: &Superposition, arm: Arm) -> Result<Superposition, DeviceError> {
    s.map_terms(|label| {
        if label.click(arm).is_some() {
            return Err(DeviceError::AlreadyDetected {
                arm,
                label: label.to_string(),
            });
        }
        let click = match label.mode(arm) {
            Some(mode) => Click::from_mode(mode).ok_or_else(|| DeviceError::NotYetSplit {
                arm,
                label: label.to_string(),
            })?,
            None if label.is_gamma() => Click::Null,
            None => {
                return Err(DeviceError::ArmAbsent {
                    arm,
                    label: label.to_string(),
                })
            }
        };
        Ok(vec![(
            label.set(Slot::Register(arm), Symbol::Click(click)),
            Amplitude::one(),
        )])
    })
}

/// Copies the arm's register reading into an observer's memory slot, using
/// `actions` to name what the observer does for each reading.
pub fn record_observer(
    s: &Superposition,
    arm: Arm,
    observer: &str,
    actions: &BTreeMap<Click, String>,
) -> Result<Superposition, DeviceError> {
    s.map_terms(|label| {
        let click = label.click(arm).ok_or_else(|| DeviceError::NotYetSplit {
            arm,
            label: label.to_string(),
        })?;
        let word = actions
            .get(&click)
            .cloned()
            .unwrap_or_else(|| format!("{click:?}"));
        Ok(vec![(
            label.set(Slot::Observer(observer.to_string()), Symbol::Word(word)),
            Amplitude::one(),
        )])
    })
}
