//! Detector configurations and exact outcome tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use super::ScenarioError;
use crate::field::Real;
use crate::state::{Arm, Click, Reading, Superposition};

/// Final reading of every detector register, keyed by arm. Also used as a
/// (possibly partial) post-selection.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome(BTreeMap<Arm, Click>);

impl Outcome {
    pub fn new(readings: impl IntoIterator<Item = (Arm, Click)>) -> Self {
        Self(readings.into_iter().collect())
    }

    pub fn get(&self, arm: Arm) -> Option<Click> {
        self.0.get(&arm).copied()
    }

    pub fn readings(&self) -> impl Iterator<Item = Reading> + '_ {
        self.0.iter().map(|(a, c)| Reading::new(*a, *c))
    }

    pub fn arms(&self) -> BTreeSet<Arm> {
        self.0.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True if every reading fixed here agrees with `other`.
    pub fn matches(&self, other: &Outcome) -> bool {
        self.0
            .iter()
            .all(|(arm, click)| other.get(*arm) == Some(*click))
    }

    /// Detector-style rendering, e.g. `D+=1;D−=1`.
    pub fn detector_string(&self) -> String {
        let parts: Vec<String> = self
            .readings()
            .map(|r| match r.click {
                Click::C | Click::D => {
                    let (c, d) = Reading::detector_names(r.arm);
                    if r.click == Click::C {
                        format!("{c}=1")
                    } else {
                        format!("{d}=1")
                    }
                }
                _ => r.to_string(),
            })
            .collect();
        parts.join(";")
    }

    /// Parses `D+=1,D-=1`, `D1=1`, `A=up,B=down` or `gamma`.
    pub fn parse_post_selection(text: &str) -> Result<Self, ScenarioError> {
        let bad = || ScenarioError::InvalidPostSelection(text.to_string());
        let mut port_bits: BTreeMap<Arm, (Option<bool>, Option<bool>)> = BTreeMap::new();
        let mut out = BTreeMap::new();
        for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if token == "γ" || token.eq_ignore_ascii_case("gamma") {
                out.insert(Arm::Plus, Click::Null);
                out.insert(Arm::Minus, Click::Null);
                continue;
            }
            let token = token.replace('−', "-");
            let (name, value) = token.split_once('=').ok_or_else(bad)?;
            let (name, value) = (name.trim(), value.trim());
            let spin_arm = match name {
                "A" => Some(Arm::Plus),
                "B" => Some(Arm::Minus),
                _ => None,
            };
            if let Some(arm) = spin_arm {
                let click = match value {
                    "up" | "↑" => Click::Up,
                    "down" | "↓" => Click::Down,
                    _ => return Err(bad()),
                };
                out.insert(arm, click);
                continue;
            }
            let bit = match value {
                "1" => true,
                "0" => false,
                _ => return Err(bad()),
            };
            let (arm, second) = Arm::ALL
                .into_iter()
                .find_map(|arm| {
                    let (c, d) = Reading::detector_names(arm);
                    if c.replace('−', "-") == name {
                        Some((arm, false))
                    } else if d.replace('−', "-") == name {
                        Some((arm, true))
                    } else {
                        None
                    }
                })
                .ok_or_else(bad)?;
            let entry = port_bits.entry(arm).or_default();
            let slot = if second { &mut entry.1 } else { &mut entry.0 };
            if slot.is_some_and(|b| b != bit) {
                return Err(bad());
            }
            *slot = Some(bit);
        }
        for (arm, bits) in port_bits {
            let click = match bits {
                (Some(true), Some(true)) => return Err(bad()),
                (Some(true), _) => Click::C,
                (_, Some(true)) => Click::D,
                (Some(false), Some(false)) => Click::Null,
                _ => return Err(bad()),
            };
            if out.insert(arm, click).is_some_and(|c| c != click) {
                return Err(bad());
            }
        }
        if out.is_empty() {
            return Err(bad());
        }
        Ok(Self(out))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let key: String = self.readings().map(|r| r.short()).collect();
        if key.is_empty() {
            f.write_str("γ")
        } else {
            f.write_str(&key)
        }
    }
}

/// Exact probability of every detector configuration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OutcomeTable {
    entries: BTreeMap<Outcome, Real>,
}

impl OutcomeTable {
    pub fn from_entries(entries: impl IntoIterator<Item = (Outcome, Real)>) -> Self {
        Self {
            entries: entries.into_iter().collect(),
        }
    }

    /// Reads the table off the register slots of a final state. Every
    /// combination of output ports is listed, with exact zeros where the
    /// amplitude vanishes.
    pub fn from_state(s: &Superposition) -> Self {
        let mut entries: BTreeMap<Outcome, Real> = BTreeMap::new();
        let mut ports: BTreeMap<Arm, BTreeSet<Click>> = BTreeMap::new();
        for (label, amp) in s.terms() {
            let outcome = Outcome::new(label.readings().into_iter().map(|r| (r.arm, r.click)));
            for r in label.readings() {
                let family = ports.entry(r.arm).or_default();
                if let Some(mode) = r.click.mode() {
                    family.extend(mode.siblings().iter().filter_map(|m| Click::from_mode(*m)));
                }
            }
            let p = entries.entry(outcome).or_insert_with(Real::zero);
            *p = &*p + &amp.norm_sqr();
        }
        let mut combos: Vec<Outcome> = vec![Outcome::default()];
        for (arm, clicks) in &ports {
            combos = combos
                .into_iter()
                .flat_map(|o| {
                    clicks.iter().map(move |c| {
                        let mut next = o.0.clone();
                        next.insert(*arm, *c);
                        Outcome(next)
                    })
                })
                .collect();
        }
        for combo in combos.into_iter().filter(|o| !o.is_empty()) {
            entries.entry(combo).or_insert_with(Real::zero);
        }
        Self { entries }
    }

    pub fn get(&self, outcome: &Outcome) -> Real {
        self.entries
            .get(outcome)
            .cloned()
            .unwrap_or_else(Real::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Outcome, &Real)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> Real {
        self.entries.values().fold(Real::zero(), |acc, p| acc + p)
    }

    /// The same table with zero rows removed.
    pub fn support(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|(_, p)| !p.is_zero())
                .map(|(o, p)| (o.clone(), p.clone()))
                .collect(),
        }
    }

    /// Looks up a row by its rendered key (`d+d−`, `D2`, `γ`).
    pub fn by_key(&self, key: &str) -> Option<&Real> {
        let key = key.replace('-', "−");
        self.entries
            .iter()
            .find(|(o, _)| o.to_string() == key)
            .map(|(_, p)| p)
    }
}

impl fmt::Display for OutcomeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (outcome, p) in &self.entries {
            writeln!(f, "{outcome} : {p}")?;
        }
        Ok(())
    }
}

/// Draws one outcome with the table's probabilities. For demonstration runs;
/// analysis always conditions on an explicit post-selection instead.
pub fn sample_outcome<R: Rng + ?Sized>(table: &OutcomeTable, rng: &mut R) -> Option<Outcome> {
    let support = table.support();
    let x: f64 = rng.gen::<f64>() * support.total().to_f64();
    let mut acc = 0.0;
    let mut last = None;
    for (o, p) in support.entries() {
        acc += p.to_f64();
        last = Some(o.clone());
        if x < acc {
            return last;
        }
    }
    last
}
