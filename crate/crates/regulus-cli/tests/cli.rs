//! End-to-end coverage of the session: evaluation, every command, report
//! shapes in both modes, the printed-form round trip, and the installed
//! binary driving scripts and a REPL.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use regulus::{rational, Algebra};
use regulus_cli::error::CliError;
use regulus_cli::session::Session;
use regulus_cli::value::Value;

fn data(name: &str) -> String {
    format!("{}/data/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn temp_file(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("regulus-cli-tests");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

/// Session with one of the checked-in algebra files loaded.
fn session(file: &str) -> Session {
    let mut s = Session::new();
    s.run_line(&format!("load-algebra {}", data(file))).unwrap();
    s
}

fn lines(s: &mut Session, line: &str) -> Vec<String> {
    s.run_line(line).unwrap().lines
}

fn eval_display(s: &Session, src: &str) -> String {
    s.eval_str(src).unwrap().to_string()
}

#[test]
fn evaluation_examples_from_the_surface() {
    let mut s = session("two_atoms.alg");
    lines(&mut s, "let x = [t; 0]");
    assert_eq!(eval_display(&s, "support(x)"), "{1}");
    assert_eq!(eval_display(&s, "pinv(0)"), "0");
    assert_eq!(eval_display(&s, "rho(x, x)"), "0");
    assert_eq!(eval_display(&s, "x * pinv(x)"), "[1; 0]");
    assert_eq!(eval_display(&s, "(t + 1/2)^2"), "t^2 + t + 1/4");
}

#[test]
fn an_expression_line_prints_its_value() {
    let mut s = session("one_atom.alg");
    assert_eq!(lines(&mut s, "t + 1/2"), vec!["t + 1/2"]);
    assert_eq!(lines(&mut s, "i*i"), vec!["-1"]);
}

#[test]
fn lattice_builtins_compute_exactly() {
    let s = session("three_atoms.alg");
    assert_eq!(eval_display(&s, "complement({1})"), "{2, 3}");
    assert_eq!(eval_display(&s, "meet({1, 2}, {2, 3})"), "{2}");
    assert_eq!(eval_display(&s, "join({1}, {3})"), "{1, 3}");
    assert_eq!(eval_display(&s, "sup({1}, {2})"), "{1, 2}");
    assert_eq!(eval_display(&s, "leq({1}, {1, 2})"), "true");
    assert_eq!(eval_display(&s, "leq({1, 3}, {1})"), "false");
    assert_eq!(eval_display(&s, "measure({1, 2})"), "5/6");
    assert_eq!(eval_display(&s, "{}"), "{}");
    // idempotents embed as indicator elements under the ring operators
    assert_eq!(eval_display(&s, "{1}*t"), "[t; 0; 0]");
    assert_eq!(eval_display(&s, "{1} + {2}"), "[1; 1; 0]");
    assert_eq!(eval_display(&s, "mask([t; s; 1], {2})"), "[0; s; 0]");
}

#[test]
fn membership_and_independence_builtins() {
    let s = session("one_atom.alg");
    assert_eq!(eval_display(&s, "memb(t^2, t)"), "{1}");
    assert_eq!(eval_display(&s, "memb(s, t)"), "{}");
    assert_eq!(eval_display(&s, "jac(t, s)"), "{1}");
    assert_eq!(eval_display(&s, "jac(t, t^2)"), "{}");
    assert_eq!(eval_display(&s, "jac(t + s, s)"), "{1}");
    assert_eq!(eval_display(&s, "isfv(3)"), "true");
    assert_eq!(eval_display(&s, "isfv(t)"), "false");
}

#[test]
fn stalkwise_queries_use_one_based_atoms() {
    let s = session("two_atoms.alg");
    assert_eq!(eval_display(&s, "depends([t; s], t, 1)"), "true");
    assert_eq!(eval_display(&s, "depends([t; s], t, 2)"), "false");
    let err = s.eval_str("depends(t, t, 3)").unwrap_err();
    assert!(err.to_string().contains("valid values are 1..=2"), "{err}");
}

#[test]
fn derivations_extend_and_apply() {
    let mut s = session("one_atom.alg");
    lines(&mut s, "let D = der{t: 1}");
    assert_eq!(eval_display(&s, "apply(D, t^2)"), "2*t");
    assert_eq!(eval_display(&s, "apply(extend(D, s, 0, t), t + s)"), "1");
    // module action: (f*D)(x) = f*D(x)
    assert_eq!(eval_display(&s, "apply(t*D, t)"), "t");
}

#[test]
fn matrix_builtins_compose() {
    let s = session("one_atom.alg");
    assert_eq!(eval_display(&s, "identity(2)"), "mat[[1, 0], [0, 1]]");
    assert_eq!(
        eval_display(&s, "commutator(halving(2), unit(2, 1, 2))"),
        "mat[[0, 1/2], [0, 0]]"
    );
    assert_eq!(eval_display(&s, "entry(unit(2, 1, 2), 1, 2)"), "1");
    assert_eq!(eval_display(&s, "shift(2)"), "mat[[0, 1], [0, 0]]");
    assert_eq!(
        eval_display(&s, "central(2, t) * unit(2, 1, 2)"),
        "mat[[0, t], [0, 0]]"
    );
    let err = s.eval_str("unit(2, 0, 1)").unwrap_err();
    assert!(err.to_string().contains("valid values are 1..=2"), "{err}");
    let err = s.eval_str("mat[[t, s]]").unwrap_err();
    assert!(err.to_string().contains("square"), "{err}");
}

#[test]
fn type_errors_name_the_offender() {
    let s = session("one_atom.alg");
    let err = s.eval_str("support(der{})").unwrap_err();
    assert_eq!(
        err.to_string(),
        "argument 1 of support must be an element, got a derivation"
    );
    let err = s.eval_str("meet(t, s)").unwrap_err();
    assert_eq!(
        err.to_string(),
        "argument 1 of meet must be an idempotent, got an element"
    );
    let err = s.eval_str("t + mat[[t]]").unwrap_err();
    assert_eq!(
        err.to_string(),
        "operator '+' is not defined between an element and a matrix"
    );
    let err = s.eval_str("nosuch(t)").unwrap_err();
    assert!(err.to_string().contains("unknown function"), "{err}");
    assert_eq!(s.eval_str("zz + 1").unwrap_err(), CliError::Unbound("zz".into()));
}

#[test]
fn an_algebra_is_required_before_evaluation() {
    let s = Session::new();
    assert_eq!(s.eval_str("t").unwrap_err(), CliError::NoAlgebra);
}

#[test]
fn division_by_a_vanishing_stalk_is_rejected() {
    let s = session("two_atoms.alg");
    assert!(s.eval_str("1/0").is_err());
    assert!(s.eval_str("t / [t; 0]").is_err());
    // nonzero on every atom, so this one divides fine
    assert_eq!(eval_display(&s, "t / (t + 0)"), "1");
}

#[test]
fn printed_forms_parse_back_to_the_same_value() {
    for (file, weights) in [
        ("one_atom.alg", vec![rational(1, 1)]),
        (
            "three_atoms.alg",
            vec![rational(1, 2), rational(1, 3), rational(1, 6)],
        ),
    ] {
        let alg = Algebra::build(weights, &["t", "s"]).unwrap();
        let s = session(file);
        let mut rng = regulus::sample::rng(0xC1C1);
        for _ in 0..25 {
            let x = regulus::sample::flavored_element(&mut rng, &alg);
            let v = s.eval_str(&x.to_string()).unwrap();
            assert_eq!(v.to_string(), x.to_string());
            assert!(matches!(v, Value::Element(e) if e == x));
        }
        for _ in 0..10 {
            let m = regulus::sample::matrix(&mut rng, &alg, 2);
            let v = s.eval_str(&m.to_string()).unwrap();
            assert!(matches!(v, Value::Matrix(got) if got == m));
        }
        for _ in 0..10 {
            let d = regulus::sample::abelian_derivation(&mut rng, &alg);
            let v = s.eval_str(&d.to_string()).unwrap();
            assert!(matches!(v, Value::Deriv(got) if got == d));
        }
        for _ in 0..6 {
            let d = regulus::sample::matrix_derivation(&mut rng, &alg, 2);
            let v = s.eval_str(&d.to_string()).unwrap();
            assert!(matches!(v, Value::MatDeriv(got) if got == d));
        }
        for _ in 0..6 {
            let e = regulus::sample::idempotent(&mut rng, &alg);
            let v = s.eval_str(&e.to_string()).unwrap();
            assert!(matches!(v, Value::Idem(got) if got == e));
        }
    }
}

#[test]
fn counterexample_and_additivity_report_the_pair() {
    let mut s = session("one_atom.alg");
    assert_eq!(
        lines(&mut s, "counterexample t s"),
        vec![
            "cex = 2-local map built from the pair (t, s)",
            "cex(t) = 1",
            "cex(s) = 1",
            "cex(t + s) = 0",
        ]
    );
    assert_eq!(
        lines(&mut s, "check-additivity cex"),
        vec![
            "not additive",
            "x = t",
            "y = s",
            "value(x) + value(y) = 2",
            "value(x + y) = 0",
        ]
    );
}

#[test]
fn certify_verifies_witnesses_at_both_points() {
    let mut s = session("one_atom.alg");
    lines(&mut s, "counterexample t s");
    for pair in ["certify cex t s", "certify cex t t+s", "certify cex t^2 s^3"] {
        let out = lines(&mut s, pair);
        assert_eq!(
            out[0],
            "certified: the witness agrees with the map at both points"
        );
        assert!(out[1].starts_with("witness = der{"), "{}", out[1]);
    }
    // an honest derivation certifies everywhere and stays additive
    lines(&mut s, "let H = twolocal(der{t: s, s: t})");
    lines(&mut s, "certify H t*s t+s");
    assert_eq!(
        lines(&mut s, "check-additivity H"),
        vec![format!(
            "additive on 64 sampled pairs (seed {})",
            regulus_cli::DEFAULT_SEED
        )]
    );
}

#[test]
fn decompose_round_trips_including_the_zero_table() {
    let mut s = session("one_atom.alg");
    lines(&mut s, "let Z = matder(mat[[0, 0], [0, 0]])");
    assert_eq!(
        lines(&mut s, "decompose Z"),
        vec![
            "inner = mat[[0, 0], [0, 0]]",
            "center = der{}",
            "round-trip: exact",
        ]
    );
    lines(&mut s, "let D = matder(mat[[0, 1], [t, s]], der{t: 1, s: t})");
    assert_eq!(
        lines(&mut s, "decompose D"),
        vec![
            "inner = mat[[0, 1], [t, s]]",
            "center = der{t: 1, s: t}",
            "round-trip: exact",
        ]
    );
}

#[test]
fn linearize_recovers_the_derivation_exactly() {
    let mut s = session("one_atom.alg");
    lines(&mut s, "let D = matder(mat[[0, 1], [t, 0]], der{t: 1})");
    lines(&mut s, "let T = twolocal(D)");
    assert_eq!(
        lines(&mut s, "linearize T"),
        vec![
            "derivation recovered",
            "inner = mat[[0, 1], [t, 0]]",
            "center = der{t: 1}",
        ]
    );
    // the counterexample map lives on the wrong structure for linearize
    lines(&mut s, "counterexample t s");
    let err = s.run_line("linearize cex").unwrap_err();
    assert!(err.to_string().contains("2-local matrix map"), "{err}");
}

#[test]
fn let_guards_names_and_load_clears_bindings() {
    let mut s = session("one_atom.alg");
    let err = s.run_line("let t = 1").unwrap_err();
    assert!(err.to_string().contains("algebra variable"), "{err}");
    let err = s.run_line("let mat = 1").unwrap_err();
    assert!(err.to_string().contains("reserved word"), "{err}");
    lines(&mut s, "let x = t");
    assert_eq!(
        lines(&mut s, &format!("load-algebra {}", data("two_atoms.alg"))),
        vec![
            "algebra: 2 atom(s), weights 1/2 1/2, variables t s",
            "cleared 1 binding(s)",
        ]
    );
    assert_eq!(s.eval_str("x").unwrap_err(), CliError::Unbound("x".into()));
}

#[test]
fn algebra_files_validate_their_shape() {
    let cases = [
        ("empty.alg", "", "algebra file is empty"),
        ("head.alg", "atomic 2\n1 1\nvars t\n", "must start with a line `atoms K`"),
        ("count.alg", "atoms 3\n1/2 1/2\nvars t\n", "expected 3 weight(s), got 2"),
        ("weight.alg", "atoms 1\nhalf\nvars t\n", "bad weight \"half\""),
        ("vars.alg", "atoms 1\n1\nt s\n", "must be `vars NAME ...`"),
        ("extra.alg", "atoms 1\n1\nvars t\nmore\n", "unexpected extra line"),
        ("zero.alg", "atoms 1\n0\nvars t\n", "strictly positive"),
        ("resword.alg", "atoms 1\n1\nvars der\n", "invalid variable name"),
    ];
    for (name, content, needle) in cases {
        let path = temp_file(name, content);
        let err = Session::new()
            .run_line(&format!("load-algebra {}", path.display()))
            .unwrap_err();
        assert!(err.to_string().contains(needle), "{name}: {err}");
    }
    let err = Session::new().run_line("load-algebra /no/such/file.alg").unwrap_err();
    assert!(err.to_string().contains("cannot read"), "{err}");
}

#[test]
fn machine_mode_quotes_every_field() {
    let mut s = Session::new();
    s.set_machine(true);
    assert_eq!(
        lines(&mut s, &format!("load-algebra {}", data("one_atom.alg"))),
        vec![r#"algebra atoms="1" weights="1" vars="t s""#]
    );
    assert_eq!(
        lines(&mut s, "let x = t + 1/2"),
        vec![r#"bind name="x" kind="element" value="t + 1/2""#]
    );
    assert_eq!(lines(&mut s, "x*x"), vec![r#"value kind="element" value="t^2 + t + 1/4""#]);
    lines(&mut s, "counterexample t s");
    assert_eq!(
        lines(&mut s, "check-additivity cex"),
        vec![
            r#"additivity status="counterexample" x="t" y="s" sum_of_values="2" value_of_sum="0""#
        ]
    );
    assert_eq!(
        lines(&mut s, "certify cex t s"),
        vec![r#"certify status="ok" witness="der{t: 1, s: 1}""#]
    );
}

#[test]
fn identical_sessions_give_byte_identical_reports() {
    let script = [
        "let x = (t + 1/2)^3",
        "x - x",
        "counterexample t s",
        "check-additivity cex",
        "certify cex t t+s",
        "let D = matder(mat[[0, t], [s, 0]], der{s: 1})",
        "decompose D",
        "let T = twolocal(D)",
        "linearize T",
        "check-additivity T",
    ];
    let transcript = || {
        let mut s = session("one_atom.alg");
        let mut all = Vec::new();
        for line in script {
            all.extend(lines(&mut s, line));
        }
        all.join("\n")
    };
    assert_eq!(transcript(), transcript());
}

#[test]
fn help_lists_commands_and_every_builtin() {
    let mut s = session("one_atom.alg");
    let text = lines(&mut s, "help").join("\n");
    for cmd in ["load-algebra", "decompose", "counterexample", "certify", "linearize"] {
        assert!(text.contains(cmd), "missing {cmd}");
    }
    for b in regulus_cli::builtins::registry() {
        assert!(text.contains(b.signature), "missing {}", b.signature);
    }
}

#[test]
fn binary_runs_scripts_end_to_end() {
    let script = temp_file(
        "ok.rgl",
        &format!(
            "load-algebra {}\nlet x = t + 1/2\nx*x\nquit\nunreached\n",
            data("one_atom.alg")
        ),
    );
    let out = Command::new(env!("CARGO_BIN_EXE_regulus"))
        .args(["run", script.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("x = t + 1/2"), "{stdout}");
    assert!(stdout.contains("t^2 + t + 1/4"), "{stdout}");

    let bad = temp_file(
        "bad.rgl",
        &format!("load-algebra {}\nlet y = t\n(t+s)/(t-s\n", data("one_atom.alg")),
    );
    let out = Command::new(env!("CARGO_BIN_EXE_regulus"))
        .args(["run", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("line 3: syntax error at offset 6: unmatched '('"),
        "{stderr}"
    );
}

#[test]
fn binary_repl_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_regulus"))
        .args(["repl", &data("two_atoms.alg")])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    {
        use std::io::Write as _;
        let stdin = child.stdin.as_mut().unwrap();
        stdin
            .write_all(b"support([t; 0])\nbroken(\nquit\n")
            .unwrap();
    }
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("regulus> "), "{stdout}");
    assert!(stdout.contains("{1}"), "{stdout}");
    assert!(stdout.contains("error: syntax error"), "{stdout}");
}
