//! Compiled-in scenarios.

use super::{Event, Frame, Scenario, ScenarioError};
use crate::field::Amplitude;
use crate::optics::{DeviceKind, DeviceOp};
use crate::state::{ket, ket2, Arm, ArmMode, Mode, Superposition};

pub const BUILTIN_NAMES: [&str; 4] = ["beamsplitter", "mzi", "epr", "hardy"];

pub fn builtin(name: &str) -> Result<Scenario, ScenarioError> {
    let scenario = match name {
        "hardy" => hardy(),
        "mzi" => mzi(),
        "beamsplitter" => beamsplitter(),
        "epr" => epr(),
        other => return Err(ScenarioError::UnknownScenario(other.to_string())),
    }?;
    for f in &scenario.frames {
        scenario.validate_frame(f)?;
    }
    Ok(scenario)
}

fn on(kind: DeviceKind, arm: Arm) -> DeviceOp {
    DeviceOp::on(kind, arm)
}

/// Two overlapping interferometers whose inner `u` arms meet at P.
fn hardy() -> Result<Scenario, ScenarioError> {
    use DeviceKind::*;
    let (p, m) = (Arm::Plus, Arm::Minus);
    let events = vec![
        Event::new("bs1+", on(Bs1, p), &[]),
        Event::new("m1+", on(Mirror, p), &["bs1+"]),
        Event::new("m2+", on(Mirror, p), &["m1+"]),
        Event::new("bs1-", on(Bs1, m), &[]),
        Event::new("m1-", on(Mirror, m), &["bs1-"]),
        Event::new("m2-", on(Mirror, m), &["m1-"]),
        Event::new("p", DeviceOp::annihilate(), &["m2+", "m2-"]),
        Event::new("bs2+", on(Bs2, p), &["p"]),
        Event::new("det+", on(Detect, p), &["bs2+"]),
        Event::new("bs2-", on(Bs2, m), &["p"]),
        Event::new("det-", on(Detect, m), &["bs2-"]),
    ];
    let prefix = ["bs1+", "bs1-", "m1+", "m1-", "m2+", "m2-", "p"];
    let with = |tail: [&'static str; 4]| -> Vec<&'static str> {
        prefix.iter().copied().chain(tail).collect()
    };
    let frames = vec![
        Frame::new("lab", "LAB", &with(["bs2+", "bs2-", "det+", "det-"])),
        Frame::new("s-plus", "S+", &with(["bs2+", "det+", "bs2-", "det-"])),
        Frame::new("s-minus", "S−", &with(["bs2-", "det-", "bs2+", "det+"])),
    ];
    let initial = ket2(ArmMode::new(p, Mode::E), ArmMode::new(m, Mode::E));
    Scenario::new("hardy", initial, events, frames)
}

/// Single photon through a balanced Mach-Zehnder interferometer.
fn mzi() -> Result<Scenario, ScenarioError> {
    use DeviceKind::*;
    let ph = Arm::Photon;
    let events = vec![
        Event::new("bs1", on(Bs1, ph), &[]),
        Event::new("m1", on(Mirror, ph), &["bs1"]),
        Event::new("m2", on(Mirror, ph), &["m1"]),
        Event::new("bs2", on(Bs2, ph), &["m2"]),
        Event::new("det", on(Detect, ph), &["bs2"]),
    ];
    let frames = vec![Frame::new("lab", "LAB", &["bs1", "m1", "m2", "bs2", "det"])];
    Scenario::new("mzi", ket(ph, Mode::E), events, frames)
}

/// Single photon on one 50/50 splitter, a detector on each outgoing path.
fn beamsplitter() -> Result<Scenario, ScenarioError> {
    use DeviceKind::*;
    let ph = Arm::Photon;
    let events = vec![
        Event::new("bs", on(Bs2, ph), &[]),
        Event::new("det", on(Detect, ph), &["bs"]),
    ];
    let frames = vec![Frame::new("lab", "LAB", &["bs", "det"])];
    Scenario::new("beamsplitter", ket(ph, Mode::U), events, frames)
}

/// Spin singlet shared by spacelike-separated observers A (`+`) and B (`−`).
fn epr() -> Result<Scenario, ScenarioError> {
    let (a, b) = (Arm::Plus, Arm::Minus);
    let up_down = ket2(ArmMode::new(a, Mode::Up), ArmMode::new(b, Mode::Down));
    let down_up = ket2(ArmMode::new(a, Mode::Down), ArmMode::new(b, Mode::Up));
    let singlet: Superposition = up_down
        .add(&down_up.scale(&Amplitude::from_ratio(-1, 1)))
        .scale(&Amplitude::frac_1_sqrt2());
    let events = vec![
        Event::new("det-a", on(DeviceKind::Detect, a), &[]),
        Event::new("det-b", on(DeviceKind::Detect, b), &[]),
    ];
    let frames = vec![
        Frame::new("a-first", "SA", &["det-a", "det-b"]),
        Frame::new("b-first", "SB", &["det-b", "det-a"]),
    ];
    Scenario::new("epr", singlet, events, frames)
}
