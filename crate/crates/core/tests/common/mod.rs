//! Strategies and reference constructions shared by the integration targets.
#![allow(dead_code)]

use num_rational::BigRational;
use plsim::field::{ratio, Amplitude, Real};
use plsim::lives::{LiveSet, Memory, Person};
use plsim::optics::{DeviceKind, DeviceOp};
use plsim::state::{Arm, ArmMode, BasisLabel, Mode, Slot, Superposition, Symbol};
use proptest::prelude::*;

pub fn arb_rational() -> impl Strategy<Value = BigRational> {
    (-12i64..=12, 1i64..=9).prop_map(|(n, d)| ratio(n, d))
}

pub fn arb_real() -> impl Strategy<Value = Real> {
    (arb_rational(), arb_rational()).prop_map(|(r, q)| Real::new(r, q))
}

pub fn arb_amplitude() -> impl Strategy<Value = Amplitude> {
    (arb_real(), arb_real()).prop_map(|(re, im)| Amplitude::new(re, im))
}

pub fn arb_nonzero_amplitude() -> impl Strategy<Value = Amplitude> {
    arb_amplitude().prop_filter("nonzero", |a| !a.is_zero())
}

/// Unit-modulus phases available exactly: powers of i and of (1+i)/√2.
pub fn arb_phase() -> impl Strategy<Value = Amplitude> {
    (0u32..8).prop_map(|k| {
        let eighth = Amplitude::new(Real::frac_1_sqrt2(), Real::frac_1_sqrt2());
        (0..k).fold(Amplitude::one(), |acc, _| acc * &eighth)
    })
}

/// Where a device's input lives on its arm, and what the other arm may hold.
#[derive(Debug, Clone)]
pub struct Domain {
    pub own: Vec<Mode>,
    pub other: Vec<Mode>,
    pub gamma: bool,
}

pub fn domain(op: &DeviceOp) -> Domain {
    use Mode::*;
    let any = vec![E, U, V, C, D];
    match op.kind {
        DeviceKind::Bs1 => Domain {
            own: vec![E],
            other: any,
            gamma: false,
        },
        DeviceKind::Bs2 => Domain {
            own: vec![U, V],
            other: any,
            gamma: true,
        },
        DeviceKind::Mirror => Domain {
            own: vec![E, U, V, C, D],
            other: any,
            gamma: true,
        },
        DeviceKind::Annihilate => Domain {
            own: vec![U, V],
            other: vec![U, V],
            gamma: false,
        },
        DeviceKind::Detect => Domain {
            own: vec![C, D, Up, Down],
            other: any,
            gamma: true,
        },
    }
}

/// A random nonzero two-arm state whose `arm` modes lie in `dom`.
pub fn arb_state_on(arm: Arm, dom: Domain) -> impl Strategy<Value = Superposition> {
    let other_arm = if arm == Arm::Plus {
        Arm::Minus
    } else {
        Arm::Plus
    };
    let own = dom.own.clone();
    let other = dom.other.clone();
    let gamma = dom.gamma;
    proptest::collection::vec(
        (
            0..own.len(),
            0..other.len(),
            arb_nonzero_amplitude(),
            proptest::bool::weighted(0.15),
        ),
        1..6,
    )
    .prop_map(move |raw| {
        let terms = raw.into_iter().map(|(i, j, amp, as_gamma)| {
            let label = if gamma && as_gamma {
                BasisLabel::gamma()
            } else {
                BasisLabel::modes(&[ArmMode::new(arm, own[i]), ArmMode::new(other_arm, other[j])])
                    .expect("distinct arms")
            };
            (label, amp)
        });
        Superposition::from_terms(terms)
    })
    .prop_filter("nonzero", |s| !s.is_zero())
}

/// Every device of the `hardy` layout; detectors also take spin inputs.
pub fn device_ops() -> Vec<DeviceOp> {
    let mut ops = vec![DeviceOp::annihilate()];
    for arm in [Arm::Plus, Arm::Minus] {
        for kind in [
            DeviceKind::Bs1,
            DeviceKind::Bs2,
            DeviceKind::Mirror,
            DeviceKind::Detect,
        ] {
            ops.push(DeviceOp::on(kind, arm));
        }
    }
    ops
}

/// A device with two random states from its input domain.
pub fn arb_device_and_pair() -> impl Strategy<Value = (DeviceOp, Superposition, Superposition)> {
    proptest::sample::select(device_ops()).prop_flat_map(|op| {
        let arm = op.arms()[0];
        let dom = domain(&op);
        (
            Just(op),
            arb_state_on(arm, dom.clone()),
            arb_state_on(arm, dom),
        )
    })
}

pub fn arb_memory() -> impl Strategy<Value = Memory> {
    proptest::collection::btree_map(
        proptest::sample::select(vec!["C+", "D+", "C−", "D−", "u+", "u−", "v+", "v−"]),
        proptest::sample::select(vec!["0", "1"]),
        0..4,
    )
    .prop_map(|m| {
        m.into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    })
}

pub fn arb_live_set() -> impl Strategy<Value = LiveSet> {
    (
        proptest::sample::select(vec!["O_{LAB}", "O_{S+}", "O_{S−}", "A_{S−}", "A_{S+}"]),
        proptest::bool::ANY,
        arb_memory(),
    )
        .prop_map(|(agent, third, memory)| {
            let person = if third { Person::Third } else { Person::First };
            LiveSet::single(agent, person, memory)
        })
}

/// Random state with one or two apparatus registers, for world splitting.
pub fn arb_register_state() -> impl Strategy<Value = Superposition> {
    use plsim::state::Click;
    proptest::collection::vec(
        (
            proptest::sample::select(vec![Mode::U, Mode::V, Mode::C, Mode::D]),
            proptest::sample::select(vec![Click::Null, Click::C, Click::D]),
            proptest::sample::select(vec![Click::Null, Click::C, Click::D]),
            arb_nonzero_amplitude(),
        ),
        1..8,
    )
    .prop_map(|raw| {
        Superposition::from_terms(raw.into_iter().map(|(m, c1, c2, amp)| {
            let label = BasisLabel::modes(&[ArmMode::new(Arm::Plus, m)])
                .and_then(|l| l.with(Slot::Register(Arm::Plus), Symbol::Click(c1)))
                .and_then(|l| l.with(Slot::Register(Arm::Minus), Symbol::Click(c2)))
                .expect("distinct slots");
            (label, amp)
        }))
    })
    .prop_filter("nonzero", |s| !s.is_zero())
}

pub fn label(text: &str) -> BasisLabel {
    text.parse().expect("valid label")
}

pub fn amp(n: i64, d: i64) -> Amplitude {
    Amplitude::from_ratio(n, d)
}

pub fn times_i(a: Amplitude) -> Amplitude {
    Amplitude::i() * &a
}

/// `a / √2`
pub fn over_root2(a: Amplitude) -> Amplitude {
    a * &Amplitude::frac_1_sqrt2()
}

pub fn state(terms: Vec<(&str, Amplitude)>) -> Superposition {
    Superposition::from_terms(terms.into_iter().map(|(l, a)| (label(l), a)))
}

/// `⟨Uψ|Uφ⟩ = ⟨ψ|φ⟩` and `‖Uψ‖ = ‖ψ‖`, exactly.
pub fn check_isometry(
    op: &DeviceOp,
    psi: &Superposition,
    phi: &Superposition,
) -> Result<(), TestCaseError> {
    let (u_psi, u_phi) = (
        op.apply(psi)
            .map_err(|e| TestCaseError::fail(e.to_string()))?,
        op.apply(phi)
            .map_err(|e| TestCaseError::fail(e.to_string()))?,
    );
    let before = psi.inner_product(phi).expect("same slots");
    let after = u_psi.inner_product(&u_phi).expect("same slots");
    prop_assert_eq!(&after, &before, "{} on {} / {}", op, psi, phi);
    prop_assert_eq!(u_psi.squared_norm(), psi.squared_norm());
    Ok(())
}

/// Field axioms on three amplitudes, exactly.
pub fn check_field_axioms(
    x: &Amplitude,
    y: &Amplitude,
    z: &Amplitude,
) -> Result<(), TestCaseError> {
    prop_assert_eq!(x + y, y + x);
    prop_assert_eq!(x * y, y * x);
    prop_assert_eq!((x + y) + z, x + (y + z));
    prop_assert_eq!((x * y) * z, x * (y * z));
    prop_assert_eq!(x * (y + z), x * y + x * z);
    prop_assert_eq!(x + &Amplitude::zero(), x.clone());
    prop_assert_eq!(x * &Amplitude::one(), x.clone());
    prop_assert!((x + &(-x)).is_zero());
    prop_assert_eq!((x * y).conj(), x.conj() * y.conj());
    prop_assert_eq!((x * y).norm_sqr(), x.norm_sqr() * y.norm_sqr());
    if !x.is_zero() {
        prop_assert_eq!(x * &x.inv().expect("nonzero"), Amplitude::one());
        prop_assert!(x.norm_sqr().is_positive());
        prop_assert_eq!((y * x).checked_div(x).expect("nonzero"), y.clone());
    } else {
        prop_assert!(x.inv().is_err());
    }
    Ok(())
}

/// World weights of a register split are positive and sum to exactly 1.
pub fn check_split_weights(s: &Superposition) -> Result<(), TestCaseError> {
    use plsim::lives::split_worlds;
    use std::collections::BTreeSet;
    let registers: BTreeSet<Slot> = s
        .slots()
        .into_iter()
        .filter(|sl| matches!(sl, Slot::Register(_)))
        .collect();
    for keyed in [registers, s.slots()] {
        let worlds = split_worlds(s, &keyed).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let total = worlds
            .iter()
            .fold(Real::zero(), |acc, w| acc + &w.probability);
        prop_assert!(total.is_one(), "weights sum to {}", total);
        prop_assert!(worlds.iter().all(|w| w.probability.is_positive()));
        for w in &worlds {
            prop_assert!(w.visible.is_disjoint(&w.hidden));
        }
    }
    Ok(())
}

/// `⊕` is commutative and associative, and rejects exactly the
/// contradictory memories.
pub fn check_merge_laws(a: &LiveSet, b: &LiveSet, c: &LiveSet) -> Result<(), TestCaseError> {
    use plsim::lives::{merge_lives, LivesError};
    let ab = merge_lives(a, b);
    let ba = merge_lives(b, a);
    prop_assert_eq!(ab.is_ok(), ba.is_ok());
    if let (Ok(x), Ok(y)) = (&ab, &ba) {
        prop_assert_eq!(x, y);
    }
    let contradicts = a
        .memory
        .iter()
        .any(|(k, v)| b.memory.get(k).is_some_and(|w| w != v));
    if contradicts {
        let rejected = matches!(ab, Err(LivesError::ContradictoryMemory { .. }));
        prop_assert!(rejected, "contradictory memories merged");
    }
    let left = merge_lives(a, b).and_then(|ab| merge_lives(&ab, c));
    let right = merge_lives(b, c).and_then(|bc| merge_lives(a, &bc));
    prop_assert_eq!(left.is_ok(), right.is_ok());
    if let (Ok(x), Ok(y)) = (&left, &right) {
        prop_assert_eq!(x, y);
        prop_assert_eq!(x.id(), y.id());
    }
    Ok(())
}
