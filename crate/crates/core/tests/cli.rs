use std::process::{Command, Output};

fn plsim(args: &[&str], color: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_plsim"));
    cmd.args(args).env_remove("PLSIM_COLOR");
    if let Some(c) = color {
        cmd.env("PLSIM_COLOR", c);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

#[test]
fn hardy_table_exits_zero() {
    let o = plsim(&["run", "--scenario", "hardy"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("d+d− : 1/16"));
}

#[test]
fn dark_port_post_selection_exits_three() {
    let o = plsim(&["run", "--scenario", "mzi", "--post-select", "D2=1"], None);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        vec!["run", "--scenario", "nonesuch"],
        vec!["run", "--scenario", "hardy", "--frame", "s-zero"],
        vec!["run", "--scenario", "hardy", "--post-select", "Q+=1"],
        vec!["run"],
        vec!["paradox", "--scenario", "hardy", "--frame", "lab"],
    ] {
        let o = plsim(&args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = plsim(&["list"], Some("maybe"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("PLSIM_COLOR"));
}

#[test]
fn color_is_opt_in() {
    let args = [
        "paradox",
        "--scenario",
        "hardy",
        "--post-select",
        "D+=1,D-=1",
    ];
    let plain = stdout(&plsim(&args, None));
    let off = stdout(&plsim(&args, Some("0")));
    let on = stdout(&plsim(&args, Some("1")));
    assert_eq!(plain, off);
    assert!(!plain.contains('\u{1b}'));
    assert!(on.contains('\u{1b}'));
}

#[test]
fn dot_output_is_byte_identical_across_processes() {
    let args = [
        "run",
        "--scenario",
        "hardy",
        "--frame",
        "all",
        "--post-select",
        "D+=1,D-=1",
        "--output",
        "dot",
    ];
    let a = plsim(&args, None);
    let b = plsim(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
