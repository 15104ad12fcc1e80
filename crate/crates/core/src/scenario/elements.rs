//! Path facts that hold with certainty in a given state.
//!
//! A fact is emitted only when the state is an exact eigenstate of the
//! relevant path projector: eigenvalue 1 gives a certainty, eigenvalue 0 an
//! exclusion. Facts implied by simpler ones are not repeated.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::state::{Arm, ArmMode, Mode, ModeFamily, Superposition};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fact {
    /// The arm is on this path in every term.
    Certain(ArmMode),
    /// No term has the arm on this path.
    Excluded(ArmMode),
    /// No term has both arms on these paths together.
    JointExcluded(ArmMode, ArmMode),
}

impl Fact {
    /// Whether a concrete path assignment is compatible with this fact.
    pub fn admits(&self, path: &BTreeMap<Arm, Mode>) -> bool {
        let on = |m: &ArmMode| path.get(&m.arm) == Some(&m.mode);
        match self {
            Fact::Certain(m) => on(m),
            Fact::Excluded(m) => !on(m),
            Fact::JointExcluded(a, b) => !(on(a) && on(b)),
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let subject = |m: &ArmMode| match m.mode.family() {
            ModeFamily::Spin => "spin".to_string(),
            _ => format!("{} path", m.arm.name()),
        };
        match self {
            Fact::Certain(m) => write!(f, "{} {m} certain", subject(m)),
            Fact::Excluded(m) => write!(f, "{} {m} excluded", subject(m)),
            Fact::JointExcluded(a, b) => write!(f, "joint ({a},{b}) excluded"),
        }
    }
}

pub type FactSet = BTreeSet<Fact>;

fn path_modes(s: &Superposition, arm: Arm) -> BTreeSet<Mode> {
    s.terms()
        .filter_map(|(l, _)| l.mode(arm))
        .filter(|m| m.is_path_like())
        .collect()
}

/// Certain and excluded path facts of a nonzero state.
pub fn extract_elements(s: &Superposition) -> FactSet {
    let mut facts = FactSet::new();
    if s.is_zero() {
        return facts;
    }
    let total = s.len();
    let mut candidates: BTreeMap<Arm, Vec<Mode>> = BTreeMap::new();
    let mut absent: BTreeSet<ArmMode> = BTreeSet::new();

    for arm in Arm::ALL {
        let present = path_modes(s, arm);
        let Some(first) = present.iter().next() else {
            continue;
        };
        let siblings = first.siblings().to_vec();
        let mut certain = None;
        for &mode in &siblings {
            let count = s.terms().filter(|(l, _)| l.mode(arm) == Some(mode)).count();
            if count == total {
                certain = Some(mode);
            } else if count == 0 {
                absent.insert(ArmMode::new(arm, mode));
            }
        }
        match certain {
            Some(mode) => {
                facts.insert(Fact::Certain(ArmMode::new(arm, mode)));
            }
            None => {
                for &mode in &siblings {
                    let m = ArmMode::new(arm, mode);
                    if absent.contains(&m) {
                        facts.insert(Fact::Excluded(m));
                    }
                }
            }
        }
        candidates.insert(arm, siblings);
    }

    let arms: Vec<Arm> = candidates.keys().copied().collect();
    for (i, &a) in arms.iter().enumerate() {
        for &b in &arms[i + 1..] {
            for &ma in &candidates[&a] {
                for &mb in &candidates[&b] {
                    let x = ArmMode::new(a, ma);
                    let y = ArmMode::new(b, mb);
                    if absent.contains(&x) || absent.contains(&y) {
                        continue;
                    }
                    let together = s
                        .terms()
                        .any(|(l, _)| l.mode(a) == Some(ma) && l.mode(b) == Some(mb));
                    if !together {
                        facts.insert(Fact::JointExcluded(x, y));
                    }
                }
            }
        }
    }
    facts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Amplitude;
    use crate::state::{ket, ket2, BasisLabel};

    fn am(arm: Arm, mode: Mode) -> ArmMode {
        ArmMode::new(arm, mode)
    }

    #[test]
    fn collapsed_state_gives_a_certain_path() {
        let s = ket2(am(Arm::Plus, Mode::U), am(Arm::Minus, Mode::D));
        assert_eq!(
            extract_elements(&s),
            FactSet::from([Fact::Certain(am(Arm::Plus, Mode::U))])
        );
    }

    #[test]
    fn post_annihilation_state_excludes_the_meeting_pair() {
        let half = Amplitude::from_ratio(1, 2);
        let s = Superposition::from_terms([
            (BasisLabel::gamma(), -half.clone()),
            (
                BasisLabel::modes(&[am(Arm::Plus, Mode::U), am(Arm::Minus, Mode::V)]).unwrap(),
                Amplitude::i() * &half,
            ),
            (
                BasisLabel::modes(&[am(Arm::Plus, Mode::V), am(Arm::Minus, Mode::U)]).unwrap(),
                Amplitude::i() * &half,
            ),
            (
                BasisLabel::modes(&[am(Arm::Plus, Mode::V), am(Arm::Minus, Mode::V)]).unwrap(),
                half,
            ),
        ]);
        assert_eq!(
            extract_elements(&s),
            FactSet::from([Fact::JointExcluded(
                am(Arm::Plus, Mode::U),
                am(Arm::Minus, Mode::U)
            )])
        );
    }

    #[test]
    fn balanced_superposition_has_no_facts() {
        let s = ket(Arm::Plus, Mode::U)
            .scale(&Amplitude::i())
            .add(&ket(Arm::Plus, Mode::V));
        assert!(extract_elements(&s).is_empty());
    }

    #[test]
    fn gamma_branch_blocks_certainty_but_not_exclusion() {
        let s = Superposition::basis(BasisLabel::gamma())
            .add(&ket2(am(Arm::Plus, Mode::U), am(Arm::Minus, Mode::V)));
        let facts = extract_elements(&s);
        assert!(facts.contains(&Fact::Excluded(am(Arm::Plus, Mode::V))));
        assert!(facts.contains(&Fact::Excluded(am(Arm::Minus, Mode::U))));
        assert!(!facts.iter().any(|f| matches!(f, Fact::Certain(_))));
    }

    #[test]
    fn output_ports_carry_no_path_facts() {
        assert!(
            extract_elements(&ket2(am(Arm::Plus, Mode::D), am(Arm::Minus, Mode::D))).is_empty()
        );
    }

    #[test]
    fn fact_admission() {
        let path = BTreeMap::from([(Arm::Plus, Mode::U), (Arm::Minus, Mode::V)]);
        assert!(Fact::Certain(am(Arm::Plus, Mode::U)).admits(&path));
        assert!(!Fact::Excluded(am(Arm::Minus, Mode::V)).admits(&path));
        assert!(Fact::JointExcluded(am(Arm::Plus, Mode::U), am(Arm::Minus, Mode::U)).admits(&path));
        assert_eq!(
            Fact::Certain(am(Arm::Plus, Mode::U)).to_string(),
            "positron path u+ certain"
        );
        assert_eq!(
            Fact::Certain(am(Arm::Minus, Mode::Down)).to_string(),
            "spin ↓− certain"
        );
        assert_eq!(
            Fact::JointExcluded(am(Arm::Plus, Mode::U), am(Arm::Minus, Mode::U)).to_string(),
            "joint (u+,u−) excluded"
        );
    }
}
