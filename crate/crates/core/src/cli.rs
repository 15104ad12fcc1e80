//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 when the requested
//! post-selection has probability zero.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{Amplitude, Real};
use crate::lives::{perspective_compare, world_graph_among, LivesError, WorldGraph};
use crate::scenario::{
    builtin, order_invariance_check, run_collapse, run_unitary, sample_outcome, Frame, History,
    Outcome, OutcomeTable, Scenario, ScenarioError, BUILTIN_NAMES,
};
use crate::state::{Click, Mode, Superposition, TermJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ZERO_PROBABILITY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Config { field: String, message: String },
    #[error("{0}")]
    ZeroProbability(String),
    #[error("failed to write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn config(field: &str, message: impl ToString) -> Self {
        CliError::Config {
            field: field.to_string(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ZeroProbability(_) => EXIT_ZERO_PROBABILITY,
            _ => EXIT_CONFIG,
        }
    }

    /// Maps evaluation errors, attributing them to the flag they came from.
    fn from_scenario(field: &str, e: ScenarioError) -> Self {
        match e {
            ScenarioError::ZeroProbability { .. } => CliError::ZeroProbability(e.to_string()),
            other => CliError::config(field, other),
        }
    }

    fn from_lives(field: &str, e: LivesError) -> Self {
        match e {
            LivesError::Scenario(s) => Self::from_scenario(field, s),
            other => CliError::config(field, other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "plsim",
    version,
    about = "Exact two-interferometer simulator with parallel-lives world bookkeeping"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a scenario in one or more frames and print the results.
    Run(RunArgs),
    /// Compare the frames' path facts and report whether they conflict.
    Paradox(ParadoxArgs),
    /// List the built-in scenarios and their frames.
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
    Dot,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ScenarioSource {
    /// Built-in scenario name.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Scenario JSON file.
    #[arg(long = "scenario-file")]
    pub scenario_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: ScenarioSource,
    /// Frame name or label; repeatable. `all` (the default) selects every frame.
    #[arg(long = "frame")]
    pub frames: Vec<String>,
    /// Detector configuration to condition on, e.g. `D+=1,D-=1`.
    #[arg(long = "post-select")]
    pub post_select: Option<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub output: OutputFormat,
    /// Render numbers as 15-significant-digit decimals in table output.
    #[arg(long)]
    pub float: bool,
    /// Seed for drawing one demonstration outcome per frame.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ParadoxArgs {
    #[command(flatten)]
    pub source: ScenarioSource,
    /// Frame name or label; repeatable. `all` (the default) selects every frame.
    #[arg(long = "frame")]
    pub frames: Vec<String>,
    #[arg(long = "post-select")]
    pub post_select: Option<String>,
}

/// Resolved configuration of a `run` invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub frames: Vec<Frame>,
    pub post_select: Option<Outcome>,
    pub output: OutputFormat,
    pub float: bool,
    pub seed: Option<u64>,
    pub color: bool,
}

fn load_scenario(source: &ScenarioSource) -> Result<Scenario, CliError> {
    match (&source.scenario, &source.scenario_file) {
        (Some(name), _) => builtin(name).map_err(|e| {
            CliError::config(
                "--scenario",
                format!("{e}; built-in scenarios: {}", BUILTIN_NAMES.join(", ")),
            )
        }),
        (None, Some(path)) => Scenario::load(path)
            .map_err(|e| CliError::config("--scenario-file", format!("{}: {e}", path.display()))),
        (None, None) => Err(CliError::config(
            "--scenario",
            "one of --scenario or --scenario-file is required",
        )),
    }
}

/// Selected frames, deduplicated and ordered by frame name.
fn select_frames(scenario: &Scenario, names: &[String]) -> Result<Vec<Frame>, CliError> {
    let mut chosen: Vec<Frame> = if names.is_empty() || names.iter().any(|n| n == "all") {
        scenario.frames.clone()
    } else {
        names
            .iter()
            .map(|n| {
                scenario.frame(n).cloned().map_err(|_| {
                    let known: Vec<&str> =
                        scenario.frames.iter().map(|f| f.name.as_str()).collect();
                    CliError::config(
                        "--frame",
                        format!("unknown frame {n:?}; known: {}, all", known.join(", ")),
                    )
                })
            })
            .collect::<Result<_, _>>()?
    };
    chosen.sort_by(|a, b| a.name.cmp(&b.name));
    chosen.dedup_by(|a, b| a.name == b.name);
    if chosen.is_empty() {
        return Err(CliError::config("--frame", "scenario defines no frames"));
    }
    Ok(chosen)
}

/// Parses the post-selection and checks it names detectors of this scenario
/// with readings they can produce.
fn parse_post_select(scenario: &Scenario, text: &str) -> Result<Outcome, CliError> {
    let field = "--post-select";
    let ps = Outcome::parse_post_selection(text).map_err(|e| CliError::config(field, e))?;
    let detected = scenario.detected_arms();
    let frame = scenario
        .frames
        .first()
        .ok_or_else(|| CliError::config("--frame", "scenario defines no frames"))?;
    let table = run_unitary(scenario, frame)
        .map_err(|e| CliError::from_scenario("--scenario", e))?
        .table;
    for r in ps.readings() {
        if !detected.contains(&r.arm) {
            return Err(CliError::config(
                field,
                format!("{text:?}: scenario has no detector on arm {}", r.arm),
            ));
        }
        let possible: BTreeSet<Click> = table.entries().filter_map(|(o, _)| o.get(r.arm)).collect();
        let family = |c: Click| c.mode().map(|m: Mode| m.family());
        let fits = r.click == Click::Null || possible.iter().any(|c| family(*c) == family(r.click));
        if !fits {
            return Err(CliError::config(
                field,
                format!("{text:?}: detector on arm {} cannot read {r}", r.arm),
            ));
        }
    }
    Ok(ps)
}

fn color_from_env() -> Result<bool, CliError> {
    match std::env::var("PLSIM_COLOR") {
        Err(_) => Ok(false),
        Ok(v) => match v.as_str() {
            "" | "0" => Ok(false),
            "1" => Ok(true),
            other => Err(CliError::config(
                "PLSIM_COLOR",
                format!("expected 0 or 1, got {other:?}"),
            )),
        },
    }
}

fn paint(color: bool, code: &str, text: &str) -> String {
    if color {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

/// Decimal with 15 significant digits, trailing zeros trimmed.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (14 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

fn render_real(x: &Real, float: bool) -> String {
    if float {
        format_float(x.to_f64())
    } else {
        x.to_string()
    }
}

fn render_amplitude(a: &Amplitude, float: bool) -> String {
    if !float {
        return a.to_string();
    }
    let (re, im) = a.to_f64_pair();
    match (re == 0.0, im == 0.0) {
        (_, true) => format_float(re),
        (true, false) => format!("{}i", format_float(im)),
        (false, false) => {
            let sign = if im < 0.0 { "-" } else { "+" };
            format!("{} {sign} {}i", format_float(re), format_float(im.abs()))
        }
    }
}

fn render_state(s: &Superposition, float: bool) -> String {
    if s.is_zero() {
        return "0".to_string();
    }
    let terms: Vec<String> = s
        .terms()
        .map(|(l, a)| format!("({})|{l}⟩", render_amplitude(a, float)))
        .collect();
    terms.join(" + ")
}

fn render_table(table: &OutcomeTable, float: bool) -> String {
    table
        .entries()
        .map(|(o, p)| format!("{o} : {}\n", render_real(p, float)))
        .collect()
}

#[derive(Serialize)]
struct TableRowJson {
    outcome: String,
    detectors: String,
    probability: String,
}

#[derive(Serialize)]
struct StepJson {
    event: String,
    state: Vec<TermJson>,
    normalized: bool,
    probability: Option<String>,
    facts: Vec<String>,
}

#[derive(Serialize)]
struct HistoryJson {
    post_select: String,
    counterfactual: bool,
    weight: String,
    inferred: Vec<String>,
    steps: Vec<StepJson>,
}

#[derive(Serialize)]
struct FrameJson {
    frame: String,
    label: String,
    order: Vec<String>,
    final_state: Vec<TermJson>,
    table: Vec<TableRowJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    history: Option<HistoryJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample: Option<String>,
}

#[derive(Serialize)]
struct RunJson {
    scenario: String,
    frame_order_invariant: bool,
    frames: Vec<FrameJson>,
}

fn table_json(table: &OutcomeTable) -> Vec<TableRowJson> {
    table
        .entries()
        .map(|(o, p)| TableRowJson {
            outcome: o.to_string(),
            detectors: o.detector_string(),
            probability: p.to_string(),
        })
        .collect()
}

fn history_json(h: &History) -> HistoryJson {
    HistoryJson {
        post_select: h.post_select.detector_string(),
        counterfactual: true,
        weight: h.weight.to_string(),
        inferred: h.inferred().iter().map(|f| f.to_string()).collect(),
        steps: h
            .steps
            .iter()
            .map(|s| StepJson {
                event: s.event.clone(),
                state: s.state.to_json_terms(),
                normalized: s.normalized,
                probability: s.probability.as_ref().map(|p| p.to_string()),
                facts: s.elements.iter().map(|f| f.to_string()).collect(),
            })
            .collect(),
    }
}

fn sample(table: &OutcomeTable, seed: u64, frame_index: usize) -> Option<Outcome> {
    let mut rng = StdRng::seed_from_u64(seed.wrapping_add(frame_index as u64));
    sample_outcome(table, &mut rng)
}

pub fn cmd_run(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let scenario = &config.scenario;
    let frame_refs: Vec<&Frame> = config.frames.iter().collect();
    let invariance = order_invariance_check(scenario, &frame_refs)
        .map_err(|e| CliError::from_scenario("--frame", e))?;
    let histories: Vec<Option<History>> = config
        .frames
        .iter()
        .map(|f| {
            config
                .post_select
                .as_ref()
                .map(|ps| run_collapse(scenario, f, ps))
                .transpose()
                .map_err(|e| CliError::from_scenario("--post-select", e))
        })
        .collect::<Result<_, _>>()?;

    match config.output {
        OutputFormat::Table => {
            writeln!(out, "scenario {}", scenario.name)?;
            for (i, frame) in config.frames.iter().enumerate() {
                let run = run_unitary(scenario, frame)
                    .map_err(|e| CliError::from_scenario("--frame", e))?;
                writeln!(out)?;
                let title = format!("frame {} ({})", frame.label, frame.name);
                writeln!(out, "{}", paint(config.color, "1", &title))?;
                writeln!(out, "order: {}", frame.order.join(" "))?;
                writeln!(
                    out,
                    "final state: {}",
                    render_state(&run.final_state, config.float)
                )?;
                writeln!(out, "outcome table:")?;
                write!(out, "{}", render_table(&run.table, config.float))?;
                if let Some(seed) = config.seed {
                    let drawn = sample(&run.table, seed, i)
                        .map(|o| o.to_string())
                        .unwrap_or_else(|| "none".to_string());
                    writeln!(out, "sampled outcome (seed {seed}): {drawn}")?;
                }
                if let Some(h) = &histories[i] {
                    write_history(out, h, config.float)?;
                }
            }
            writeln!(out)?;
            let line = match &invariance.discrepancy {
                None => format!(
                    "frame-order invariance: identical tables across {} frame(s)",
                    config.frames.len()
                ),
                Some(d) => format!(
                    "frame-order invariance: VIOLATED at {} ({} in {}, {} in {})",
                    d.outcome, d.left, d.left_frame, d.right, d.right_frame
                ),
            };
            let code = if invariance.passes() { "32" } else { "31" };
            writeln!(out, "{}", paint(config.color, code, &line))?;
        }
        OutputFormat::Json => {
            let frames = config
                .frames
                .iter()
                .enumerate()
                .map(|(i, frame)| {
                    let run = run_unitary(scenario, frame)
                        .map_err(|e| CliError::from_scenario("--frame", e))?;
                    Ok(FrameJson {
                        frame: frame.name.clone(),
                        label: frame.label.clone(),
                        order: frame.order.clone(),
                        final_state: run.final_state.to_json_terms(),
                        table: table_json(&run.table),
                        history: histories[i].as_ref().map(history_json),
                        sample: config
                            .seed
                            .and_then(|seed| sample(&run.table, seed, i))
                            .map(|o| o.to_string()),
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let doc = RunJson {
                scenario: scenario.name.clone(),
                frame_order_invariant: invariance.passes(),
                frames,
            };
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&doc).expect("plain data")
            )?;
        }
        OutputFormat::Dot => {
            let ps = config.post_select.clone().unwrap_or_default();
            let peers: Vec<&Frame> = scenario.frames.iter().collect();
            for frame in &config.frames {
                let graph = world_graph_among(scenario, frame, &peers, &ps)
                    .map_err(|e| CliError::from_lives("--post-select", e))?;
                write!(out, "{}", graph.to_dot())?;
            }
        }
    }
    Ok(())
}

fn write_history(out: &mut dyn Write, h: &History, float: bool) -> Result<(), CliError> {
    writeln!(
        out,
        "history post-selected on {} (path facts are counterfactual inferences):",
        h.post_select.detector_string()
    )?;
    for step in &h.steps {
        write!(
            out,
            "  after {}: {}",
            step.event,
            render_state(&step.state, float)
        )?;
        if !step.normalized {
            write!(out, " (unnormalized)")?;
        }
        if let Some(p) = &step.probability {
            write!(out, " [p = {}]", render_real(p, float))?;
        }
        if !step.elements.is_empty() {
            let facts: Vec<String> = step.elements.iter().map(|f| f.to_string()).collect();
            write!(out, " {{{}}}", facts.join("; "))?;
        }
        writeln!(out)?;
    }
    let factors: Vec<String> = h
        .probabilities()
        .iter()
        .map(|p| render_real(p, float))
        .collect();
    writeln!(
        out,
        "history weight: {} = {}",
        factors.join(" × "),
        render_real(&h.weight, float)
    )?;
    Ok(())
}

pub fn cmd_paradox(
    scenario: &Scenario,
    frames: &[Frame],
    post_select: &Outcome,
    color: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if frames.len() < 2 {
        return Err(CliError::config(
            "--frame",
            format!("paradox needs at least two frames, got {}", frames.len()),
        ));
    }
    let peers: Vec<&Frame> = frames.iter().collect();
    let graphs: Vec<WorldGraph> = frames
        .iter()
        .map(|f| world_graph_among(scenario, f, &peers, post_select))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::from_lives("--post-select", e))?;
    let report = perspective_compare(&graphs).map_err(|e| CliError::from_lives("--frame", e))?;
    let text = report.to_string();
    let (body, verdict) = text.rsplit_once('\n').unwrap_or(("", text.as_str()));
    if !body.is_empty() {
        writeln!(out, "{body}")?;
    }
    let code = if report.paradox { "31" } else { "32" };
    writeln!(out, "{}", paint(color, code, verdict))?;
    Ok(())
}

fn cmd_list(out: &mut dyn Write) -> Result<(), CliError> {
    for name in BUILTIN_NAMES {
        let s = builtin(name).map_err(|e| CliError::config("--scenario", e))?;
        let frames: Vec<String> = s
            .frames
            .iter()
            .map(|f| format!("{} ({})", f.name, f.label))
            .collect();
        writeln!(out, "{name}: {}", frames.join(", "))?;
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let color = color_from_env()?;
    match cli.command {
        Command::Run(args) => {
            let scenario = load_scenario(&args.source)?;
            let frames = select_frames(&scenario, &args.frames)?;
            let post_select = args
                .post_select
                .as_deref()
                .map(|t| parse_post_select(&scenario, t))
                .transpose()?;
            let config = RunConfig {
                scenario,
                frames,
                post_select,
                output: args.output,
                float: args.float,
                seed: args.seed,
                color,
            };
            cmd_run(&config, out)
        }
        Command::Paradox(args) => {
            let scenario = load_scenario(&args.source)?;
            let frames = select_frames(&scenario, &args.frames)?;
            let post_select = match args.post_select.as_deref() {
                Some(t) => parse_post_select(&scenario, t)?,
                None => Outcome::default(),
            };
            cmd_paradox(&scenario, &frames, &post_select, color, out)
        }
        Command::List => cmd_list(out),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("plsim").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn hardy_table_lists_the_joint_detection() {
        let (code, out, _) = invoke(&[
            "run",
            "--scenario",
            "hardy",
            "--frame",
            "all",
            "--post-select",
            "D+=1,D-=1",
            "--output",
            "table",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("d+d− : 1/16\n"));
        assert!(out.contains("history weight: 1/8 × 1/2 = 1/16"));
        assert!(out.contains("identical tables across 3 frame(s)"));
    }

    #[test]
    fn mzi_dark_port_is_zero() {
        let (code, out, _) = invoke(&["run", "--scenario", "mzi", "--output", "table"]);
        assert_eq!(code, 0);
        assert!(out.contains("D2 : 0\n"));
        assert!(out.contains("D1 : 1\n"));
    }

    #[test]
    fn dark_port_post_selection_exits_3() {
        let (code, _, err) = invoke(&["run", "--scenario", "mzi", "--post-select", "D2=1"]);
        assert_eq!(code, EXIT_ZERO_PROBABILITY);
        assert!(err.contains("probability 0"));
    }

    #[test]
    fn config_errors_exit_2_and_name_the_field() {
        for (args, field) in [
            (vec!["run", "--scenario", "nope"], "--scenario"),
            (
                vec!["run", "--scenario", "hardy", "--frame", "s-zero"],
                "--frame",
            ),
            (
                vec!["run", "--scenario", "hardy", "--post-select", "X=1"],
                "--post-select",
            ),
            (
                vec!["run", "--scenario", "hardy", "--post-select", "D1=1"],
                "--post-select",
            ),
            (
                vec!["run", "--scenario", "hardy", "--post-select", "A=up"],
                "--post-select",
            ),
            (
                vec!["paradox", "--scenario", "hardy", "--frame", "lab"],
                "--frame",
            ),
        ] {
            let (code, _, err) = invoke(&args);
            assert_eq!(code, EXIT_CONFIG, "{args:?}");
            assert!(err.contains(field), "{args:?}: {err}");
        }
        let (code, _, _) = invoke(&["run", "--output", "svg", "--scenario", "hardy"]);
        assert_eq!(code, EXIT_CONFIG);
        let (code, _, _) = invoke(&["run"]);
        assert_eq!(code, EXIT_CONFIG);
    }

    #[test]
    fn paradox_verdicts() {
        let (code, out, _) = invoke(&[
            "paradox",
            "--scenario",
            "hardy",
            "--frame",
            "lab",
            "--frame",
            "s-plus",
            "--frame",
            "s-minus",
            "--post-select",
            "D+=1,D-=1",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("S−: positron path u+ certain"));
        assert!(out.contains("S+: electron path u− certain"));
        assert!(out.contains("LAB: joint (u+,u−) excluded"));
        assert!(out.trim_end().ends_with("PARADOX: joint facts unsupported"));

        let (code, out, _) = invoke(&[
            "paradox",
            "--scenario",
            "epr",
            "--post-select",
            "A=up,B=down",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("CONSISTENT"));
    }

    #[test]
    fn json_final_state_round_trips() {
        let (code, out, _) = invoke(&[
            "run",
            "--scenario",
            "hardy",
            "--frame",
            "lab",
            "--output",
            "json",
        ]);
        assert_eq!(code, 0);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        let terms = doc["frames"][0]["final_state"].to_string();
        let parsed = Superposition::from_json(&terms).unwrap();
        let s = builtin("hardy").unwrap();
        let expected = run_unitary(&s, s.frame("lab").unwrap())
            .unwrap()
            .final_state;
        assert_eq!(parsed, expected);
        assert_eq!(parsed.to_json(), expected.to_json());
    }

    #[test]
    fn dot_output_is_deterministic() {
        let args = [
            "run",
            "--scenario",
            "hardy",
            "--frame",
            "s-minus",
            "--post-select",
            "D+=1,D-=1",
            "--output",
            "dot",
        ];
        let (code, first, _) = invoke(&args);
        assert_eq!(code, 0);
        assert!(first.contains("\"S−/u+\" -> \"S−/A_{S−}\" [style=solid];"));
        assert!(first.contains("\"S−/u−\" -> \"S−/A_{S−}\" [style=dashed];"));
        assert_eq!(invoke(&args).1, first);
    }

    #[test]
    fn float_rendering() {
        assert_eq!(format_float(0.0625), "0.0625");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333333");
        assert_eq!(format_float(std::f64::consts::SQRT_2), "1.4142135623731");
        assert_eq!(format_float(-0.5), "-0.5");
        assert_eq!(format_float(0.0), "0");
        let (_, out, _) = invoke(&["run", "--scenario", "hardy", "--frame", "lab", "--float"]);
        assert!(out.contains("d+d− : 0.0625\n"));
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let args = ["run", "--scenario", "beamsplitter", "--seed", "7"];
        let (code, first, _) = invoke(&args);
        assert_eq!(code, 0);
        assert!(first.contains("sampled outcome (seed 7): D"));
        assert_eq!(invoke(&args).1, first);
    }

    #[test]
    fn scenario_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hardy.json");
        std::fs::write(&path, builtin("hardy").unwrap().to_json()).unwrap();
        let (code, out, _) = invoke(&[
            "run",
            "--scenario-file",
            path.to_str().unwrap(),
            "--frame",
            "s-minus",
        ]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("d+d− : 1/16"));
        let (code, _, err) = invoke(&["run", "--scenario-file", "/nonexistent.json"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("--scenario-file"));
    }
}
