//! Acceptance criteria 1 to 8, one PASS/FAIL line each.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::*;
use plsim::field::Real;
use plsim::lives::{perspective_compare, world_graph, WorldGraph};
use plsim::optics::{DeviceKind, DeviceOp};
use plsim::scenario::{
    builtin, collapse_table, order_invariance_check, run_collapse, run_unitary, Fact, FactSet,
    Frame, Outcome, OutcomeTable, Scenario,
};
use plsim::state::{Arm, ArmMode, Mode, Superposition};
use proptest::test_runner::{Config, TestRunner};

type Check = Result<(), String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn hardy() -> Scenario {
    builtin("hardy").expect("builtin")
}

fn frame<'a>(s: &'a Scenario, name: &str) -> &'a Frame {
    s.frame(name).expect("builtin frame")
}

fn outcome(text: &str) -> Outcome {
    Outcome::parse_post_selection(text).expect("valid post-selection")
}

fn am(arm: Arm, mode: Mode) -> ArmMode {
    ArmMode::new(arm, mode)
}

fn r(n: i64, d: i64) -> Real {
    Real::from_ratio(n, d)
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("plsim").chain(args.iter().copied());
    let code = plsim::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).expect("utf-8 output"))
}

fn within(limit: Duration, start: Instant) -> Check {
    let spent = start.elapsed();
    ensure(spent < limit, || format!("took {spent:?}, limit {limit:?}"))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let s = hardy();
    let table = run_unitary(&s, frame(&s, "lab"))
        .map_err(|e| e.to_string())?
        .table;
    let expected: BTreeMap<String, Real> = [
        ("γ", r(1, 4)),
        ("c+c−", r(9, 16)),
        ("c+d−", r(1, 16)),
        ("d+c−", r(1, 16)),
        ("d+d−", r(1, 16)),
    ]
    .into_iter()
    .map(|(k, p)| (k.to_string(), p))
    .collect();
    let actual: BTreeMap<String, Real> = table
        .entries()
        .map(|(o, p)| (o.to_string(), p.clone()))
        .collect();
    ensure(actual == expected, || format!("table {actual:?}"))?;
    let (code, text) = run_cli(&["run", "--scenario", "hardy"]);
    ensure(code == 0, || format!("exit {code}"))?;
    ensure(text.contains("d+d− : 1/16"), || {
        format!("missing d+d− row in\n{text}")
    })?;
    within(Duration::from_secs(1), start)
}

fn step_state(s: &Scenario, frame_name: &str, event: &str) -> Result<Superposition, String> {
    let run = run_unitary(s, frame(s, frame_name)).map_err(|e| e.to_string())?;
    run.steps
        .into_iter()
        .find(|(id, _)| id == event)
        .map(|(_, st)| st)
        .ok_or_else(|| format!("no step {event}"))
}

fn collapsed_state(
    s: &Scenario,
    frame_name: &str,
    ps: &str,
    event: &str,
) -> Result<Superposition, String> {
    let h = run_collapse(s, frame(s, frame_name), &outcome(ps)).map_err(|e| e.to_string())?;
    h.steps
        .into_iter()
        .find(|st| st.event == event)
        .map(|st| st.state.without_trails())
        .ok_or_else(|| format!("no step {event}"))
}

fn same_ray(name: &str, actual: &Superposition, expected: &Superposition) -> Check {
    ensure(actual.equal_up_to_phase(expected), || {
        format!("{name}: got {actual}, expected {expected}")
    })
}

/// `½(−|γ⟩ − 1/√2|x,c⟩ + i/√2|x,d⟩ + i√2|y,c⟩)` with `x`,`y` the undisturbed
/// arm's `u`,`v` and `c`,`d` the measured arm's outputs.
fn half_split(measured: Arm) -> Superposition {
    let (xc, xd, yc) = if measured == Arm::Minus {
        ("u+,c−", "u+,d−", "v+,c−")
    } else {
        ("c+,u−", "d+,u−", "c+,v−")
    };
    let half = amp(1, 2);
    state(vec![
        ("γ", -half.clone()),
        (xc, -over_root2(half.clone())),
        (xd, times_i(over_root2(half))),
        (yc, times_i(over_root2(amp(1, 1)))),
    ])
}

/// `−½|γ,0;0⟩ − 1/(2√2)|x,c,1;0⟩ + i/(2√2)|x,d,0;1⟩ + i/√2|y,c,1;0⟩`
fn detector_entangled(measured: Arm) -> Superposition {
    let s = measured.suffix();
    let reg = |c: u8, d: u8| format!("C{s}={c};D{s}={d}");
    let (xc, xd, yc) = if measured == Arm::Minus {
        ("u+,c−", "u+,d−", "v+,c−")
    } else {
        ("c+,u−", "d+,u−", "c+,v−")
    };
    let half = amp(1, 2);
    let terms = vec![
        (format!("γ,{}", reg(0, 0)), -half.clone()),
        (format!("{xc},{}", reg(1, 0)), -over_root2(half.clone())),
        (
            format!("{xd},{}", reg(0, 1)),
            times_i(over_root2(half.clone())),
        ),
        (
            format!("{yc},{}", reg(1, 0)),
            times_i(over_root2(amp(1, 1))),
        ),
    ];
    Superposition::from_terms(terms.into_iter().map(|(l, a)| (label(&l), a)))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let s = hardy();
    let half = amp(1, 2);

    let after_p = state(vec![
        ("γ", -half.clone()),
        ("u+,v−", times_i(half.clone())),
        ("v+,u−", times_i(half.clone())),
        ("v+,v−", half.clone()),
    ]);
    same_ray("annihilation", &step_state(&s, "lab", "p")?, &after_p)?;
    for f in ["lab", "s-plus", "s-minus"] {
        let st = step_state(&s, f, "p")?;
        ensure(st == after_p, || format!("{f}: after p {st}"))?;
    }

    same_ray(
        "electron splitter",
        &step_state(&s, "s-minus", "bs2-")?,
        &half_split(Arm::Minus),
    )?;
    same_ray(
        "positron splitter",
        &step_state(&s, "s-plus", "bs2+")?,
        &half_split(Arm::Plus),
    )?;

    same_ray(
        "electron at D−",
        &collapsed_state(&s, "s-minus", "D+=1,D-=1", "det-")?,
        &state(vec![("u+,d−,C−=0;D−=1", amp(1, 1))]),
    )?;
    same_ray(
        "positron at D+",
        &collapsed_state(&s, "s-plus", "D+=1,D-=1", "det+")?,
        &state(vec![("d+,u−,C+=0;D+=1", amp(1, 1))]),
    )?;

    let detect = DeviceOp::on(DeviceKind::Detect, Arm::Photon);
    let two_paths = state(vec![
        ("c", over_root2(amp(1, 1))),
        ("d", over_root2(amp(1, 1))),
    ]);
    let measured = detect.apply(&two_paths).map_err(|e| e.to_string())?;
    let photon_apparatus = state(vec![
        ("c,D1=1;D2=0", over_root2(amp(1, 1))),
        ("d,D1=0;D2=1", over_root2(amp(1, 1))),
    ]);
    ensure(measured == photon_apparatus, || {
        format!("photon detection: {measured}")
    })?;
    let bs = builtin("beamsplitter").map_err(|e| e.to_string())?;
    let bs_final = run_unitary(&bs, &bs.frames[0])
        .map_err(|e| e.to_string())?
        .final_state;
    let moduli: Vec<Real> = bs_final.terms().map(|(_, a)| a.norm_sqr()).collect();
    ensure(moduli == vec![r(1, 2), r(1, 2)], || {
        format!("beamsplitter branches {bs_final}")
    })?;

    same_ray(
        "S− apparatus",
        &step_state(&s, "s-minus", "det-")?,
        &detector_entangled(Arm::Minus),
    )?;
    same_ray(
        "S+ apparatus",
        &step_state(&s, "s-plus", "det+")?,
        &detector_entangled(Arm::Plus),
    )?;
    within(Duration::from_secs(1), start)
}

fn criterion_3() -> Check {
    let s = hardy();
    let named: Vec<&Frame> = ["lab", "s-plus", "s-minus"]
        .iter()
        .map(|n| frame(&s, n))
        .collect();
    let report = order_invariance_check(&s, &named).map_err(|e| e.to_string())?;
    ensure(report.passes(), || format!("{:?}", report.discrepancy))?;
    let extensions = s.linear_extensions().map_err(|e| e.to_string())?;
    ensure(extensions.len() == 120, || {
        format!("{} linear extensions", extensions.len())
    })?;
    let frames: Vec<Frame> = extensions
        .into_iter()
        .enumerate()
        .map(|(i, order)| Frame {
            name: format!("ext{i:03}"),
            label: format!("E{i}"),
            order,
        })
        .collect();
    let refs: Vec<&Frame> = frames.iter().collect();
    let report = order_invariance_check(&s, &refs).map_err(|e| e.to_string())?;
    ensure(report.passes(), || format!("{:?}", report.discrepancy))
}

fn criterion_4() -> Check {
    for name in ["hardy", "mzi", "beamsplitter", "epr"] {
        let s = builtin(name).map_err(|e| e.to_string())?;
        for f in &s.frames {
            let unitary = run_unitary(&s, f).map_err(|e| e.to_string())?.table;
            let collapsed = collapse_table(&s, f).map_err(|e| e.to_string())?;
            ensure(collapsed == unitary.support(), || {
                format!("{name}/{}: {collapsed:?} vs {unitary:?}", f.name)
            })?;
            let mut weights = Vec::new();
            for (o, p) in unitary.entries() {
                if o.is_empty() || p.is_zero() {
                    continue;
                }
                let h = run_collapse(&s, f, o).map_err(|e| e.to_string())?;
                let product = h.probabilities().iter().fold(Real::one(), |acc, q| acc * q);
                ensure(&product == p && &h.weight == p, || {
                    format!("{name}/{}/{o}: {product} vs {p}", f.name)
                })?;
                weights.push((o.clone(), product));
            }
            let summed = OutcomeTable::from_entries(weights);
            ensure(
                summed.total() + &unitary.get(&Outcome::new([])) == Real::one(),
                || format!("{name}/{}: weights sum to {}", f.name, summed.total()),
            )?;
        }
    }
    let s = hardy();
    let h =
        run_collapse(&s, frame(&s, "s-minus"), &outcome("D+=1,D-=1")).map_err(|e| e.to_string())?;
    ensure(h.probabilities() == vec![r(1, 8), r(1, 2)], || {
        format!("S− factors {:?}", h.probabilities())
    })?;
    ensure(h.weight == r(1, 16), || format!("S− weight {}", h.weight))
}

fn criterion_5() -> Check {
    let s = builtin("mzi").map_err(|e| e.to_string())?;
    let table = run_unitary(&s, &s.frames[0])
        .map_err(|e| e.to_string())?
        .table;
    let dark = table.by_key("D2").cloned().unwrap_or_else(Real::zero);
    let bright = table.by_key("D1").cloned().unwrap_or_else(Real::zero);
    ensure(dark.is_zero() && bright.is_one(), || {
        format!("D2 = {dark}, D1 = {bright}")
    })?;
    let (code, text) = run_cli(&["run", "--scenario", "mzi"]);
    ensure(
        code == 0 && text.contains("D2 : 0") && text.contains("D1 : 1"),
        || format!("exit {code}\n{text}"),
    )?;
    let (code, _) = run_cli(&["run", "--scenario", "mzi", "--post-select", "D2=1"]);
    ensure(code == 3, || {
        format!("dark-port post-selection exit {code}")
    })
}

fn graphs(s: &Scenario, ps: &Outcome) -> Result<Vec<WorldGraph>, String> {
    s.frames
        .iter()
        .map(|f| world_graph(s, f, ps).map_err(|e| e.to_string()))
        .collect()
}

fn criterion_6() -> Check {
    let s = hardy();
    let report =
        perspective_compare(&graphs(&s, &outcome("D+=1,D-=1"))?).map_err(|e| e.to_string())?;
    let expected: BTreeMap<String, FactSet> = [
        ("S−", FactSet::from([Fact::Certain(am(Arm::Plus, Mode::U))])),
        (
            "S+",
            FactSet::from([Fact::Certain(am(Arm::Minus, Mode::U))]),
        ),
        (
            "LAB",
            FactSet::from([Fact::JointExcluded(
                am(Arm::Plus, Mode::U),
                am(Arm::Minus, Mode::U),
            )]),
        ),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    ensure(report.fact_map() == expected, || {
        format!("facts {:?}", report.fact_map())
    })?;
    ensure(report.verdict() == "paradox", || report.to_string())?;
    let rendered: BTreeSet<String> = report
        .frames
        .iter()
        .flat_map(|f| f.facts.iter().map(move |x| format!("{}: {x}", f.label)))
        .collect();
    let wanted: BTreeSet<String> = [
        "S−: positron path u+ certain",
        "S+: electron path u− certain",
        "LAB: joint (u+,u−) excluded",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    ensure(rendered == wanted, || format!("rendered {rendered:?}"))?;

    let epr = builtin("epr").map_err(|e| e.to_string())?;
    for ps in ["A=up,B=down", "A=down,B=up"] {
        let report =
            perspective_compare(&graphs(&epr, &outcome(ps))?).map_err(|e| e.to_string())?;
        ensure(report.verdict() == "consistent", || report.to_string())?;
    }
    let (code, text) = run_cli(&[
        "paradox",
        "--scenario",
        "hardy",
        "--post-select",
        "D+=1,D-=1",
    ]);
    ensure(code == 0 && text.contains("PARADOX"), || {
        format!("exit {code}\n{text}")
    })
}

fn golden(name: &str) -> Result<String, String> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name]
        .iter()
        .collect();
    std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))
}

fn criterion_7() -> Check {
    let s = hardy();
    let ps = outcome("D+=1,D-=1");
    let segments = |pairs: &[(Arm, Mode)]| -> BTreeSet<ArmMode> {
        pairs.iter().map(|(a, m)| am(*a, *m)).collect()
    };
    let (p, m) = (Arm::Plus, Arm::Minus);
    let cases = [
        (
            "lab",
            [(p, Mode::V), (m, Mode::V)],
            [(p, Mode::U), (m, Mode::U)],
        ),
        (
            "s-minus",
            [(p, Mode::U), (m, Mode::V)],
            [(p, Mode::V), (m, Mode::U)],
        ),
        (
            "s-plus",
            [(p, Mode::V), (m, Mode::U)],
            [(p, Mode::U), (m, Mode::V)],
        ),
    ];
    for (name, visible, hidden) in cases {
        let f = frame(&s, name);
        let g = world_graph(&s, f, &ps).map_err(|e| e.to_string())?;
        ensure(g.world.visible == segments(&visible), || {
            format!("{name} visible {:?}", g.world.visible)
        })?;
        ensure(g.world.hidden == segments(&hidden), || {
            format!("{name} hidden {:?}", g.world.hidden)
        })?;
        let dot = g.to_dot();
        let again = world_graph(&s, f, &ps).map_err(|e| e.to_string())?.to_dot();
        ensure(dot == again, || format!("{name}: DOT differs between runs"))?;
        let expected = golden(&format!("hardy-{name}.dot"))?;
        let (code, cli_dot) = run_cli(&[
            "run",
            "--scenario",
            "hardy",
            "--frame",
            name,
            "--post-select",
            "D+=1,D-=1",
            "--output",
            "dot",
        ]);
        ensure(code == 0, || format!("{name}: exit {code}"))?;
        ensure(cli_dot == expected, || {
            format!("{name}: CLI DOT differs from golden")
        })?;
        ensure(expected.starts_with(&dot), || {
            format!("{name}: graph DOT differs from golden")
        })?;
        for seg in &visible {
            let edge = format!("/{}\" -> \"{}/A_", am(seg.0, seg.1), g.frame_label);
            ensure(
                dot.contains(&format!("{edge}{{{}}}\" [style=solid]", g.frame_label)),
                || format!("{name}: {edge} not solid"),
            )?;
        }
        for seg in &hidden {
            let edge = format!("/{}\" -> \"{}/A_", am(seg.0, seg.1), g.frame_label);
            ensure(
                dot.contains(&format!("{edge}{{{}}}\" [style=dashed]", g.frame_label)),
                || format!("{name}: {edge} not dashed"),
            )?;
        }
    }
    Ok(())
}

fn prop<T: std::fmt::Display>(result: Result<(), T>) -> Check {
    result.map_err(|e| e.to_string())
}

fn exact_runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        failure_persistence: None,
        ..Config::with_cases(cases)
    })
}

fn criterion_8() -> Check {
    let mut runner = exact_runner(1000);
    let unitarity = runner.run(&arb_device_and_pair(), |(op, psi, phi)| {
        check_isometry(&op, &psi, &phi)
    });
    prop(unitarity)?;
    let mut runner = exact_runner(500);
    let field = runner.run(
        &(arb_amplitude(), arb_amplitude(), arb_amplitude()),
        |(x, y, z)| check_field_axioms(&x, &y, &z),
    );
    prop(field)?;
    let split = runner.run(&arb_register_state(), |s| check_split_weights(&s));
    prop(split)?;
    let merge = runner.run(
        &(arb_live_set(), arb_live_set(), arb_live_set()),
        |(a, b, c)| check_merge_laws(&a, &b, &c),
    );
    prop(merge)
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 8] = [
        ("hardy joint-detection table", criterion_1),
        ("state oracles", criterion_2),
        ("frame-order invariance", criterion_3),
        ("collapse/unitary consistency", criterion_4),
        ("Mach-Zehnder dark port", criterion_5),
        ("paradox verdict", criterion_6),
        ("world-graph fidelity", criterion_7),
        ("exact property suites", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("criterion {}: {name} ... PASS", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: {name} ... FAIL ({why})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
