use airy_formal::operator::{validate, AiryOperator};
use airy_formal::{q, AiryError, Rational};
use airy_formal_cli::parse::{parse_operator, OperatorTextError};
use airy_formal_cli::report::Report;
use airy_formal_cli::{execute, render, run, Command, Format, JobConfig, OperatorSource, Precision};
use proptest::prelude::*;
use std::process::Command as Proc;

fn job(command: Command, ops: &[&str]) -> JobConfig {
    let mut cfg = JobConfig::new(command);
    cfg.operators = ops.iter().map(|s| OperatorSource::Text(s.to_string())).collect();
    cfg
}

fn airy(args: &[&str]) -> (i32, String, String) {
    let out = Proc::new(env!("CARGO_BIN_EXE_airy")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn parser_examples() {
    let l = parse_operator("d^2 - x").unwrap();
    assert_eq!((l.n(), l.m()), (2, 1));
    assert_eq!(l, AiryOperator::classical());

    let l = parse_operator("d^3 + 2*d - x^2 - 1").unwrap();
    assert_eq!((l.n(), l.m()), (3, 2));
    assert_eq!(l.a_coeffs(), &[q(2, 1), q(0, 1), q(1, 1)]);
    assert_eq!(l.b_coeffs(), &[q(1, 1), q(0, 1), q(1, 1)]);

    match parse_operator("x^2 - d") {
        Err(OperatorTextError::Invalid(AiryError::BadLeading(c))) => assert_eq!(c, q(-1, 1)),
        other => panic!("expected BadLeading, got {other:?}"),
    }
    let l = parse_operator("  d^2+ 1/2 * x^3 -x^3 - 2*d^0 ").unwrap();
    assert_eq!(l.b_coeffs(), &[q(2, 1), q(0, 1), q(0, 1), q(1, 2)]);
}

#[test]
fn parser_rejections() {
    let pos = |t: &str| match parse_operator(t) {
        Err(OperatorTextError::Parse(p)) => p.pos,
        other => panic!("`{t}` should not parse: {other:?}"),
    };
    assert_eq!(pos("d^2 - x^"), 8);
    assert_eq!(pos("d^2 -- x"), 5);
    assert_eq!(pos("d^2 - 2*"), 8);
    assert_eq!(pos("- x"), 0);
    assert!(matches!(parse_operator("d^2 - x + x"), Err(OperatorTextError::Invalid(AiryError::BadDegree { .. }))));
    assert!(matches!(parse_operator("d^2 - 3"), Err(OperatorTextError::Invalid(AiryError::BadDegree { .. }))));
}

#[test]
fn reports_round_trip_through_json() {
    let cases: Vec<JobConfig> = vec![
        job(Command::Factors, &["d^3 + 1/2*d^2 - 2*x^4 + x"]),
        job(Command::Monodromy, &["d^4 - 3*d - x^3 + 1/3"]),
        job(Command::Canonical, &["d^2 + d - x^3 + 2*x - 1"]),
        job(Command::Canonical, &["d^2 - x^4 + x"]),
        job(Command::Equiv, &["d^3 - x^4", "d^3 + d - x^4 + 2"]),
        job(Command::Selftest, &[]),
    ];
    for cfg in cases {
        let report = execute(&cfg).unwrap();
        let json = render(&report, Format::Json);
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report, "{json}");
        assert_eq!(render(&back, Format::Json), json);
    }
}

#[test]
fn big_precision_agrees_with_double() {
    let mut cfg = job(Command::Monodromy, &["d^3 + 2*d - x^2 - 1"]);
    let double = execute(&cfg).unwrap();
    cfg.precision = Precision::Big(128);
    let big = execute(&cfg).unwrap();
    let (Report::Monodromy(d), Report::Monodromy(b)) = (double, big) else { panic!() };
    assert_eq!(d.lambda, b.lambda);
    assert!((d.eigenvalue.re - b.eigenvalue.re).abs() < 1e-15);
    assert!((d.eigenvalue.im - b.eigenvalue.im).abs() < 1e-15);
}

#[test]
fn order_and_strict_flags() {
    let mut cfg = job(Command::Factors, &["d^2 - x"]);
    cfg.order = Some(q(1, 2));
    assert_eq!(run(&cfg).unwrap_err().exit_code(), 2);
    cfg.order = Some(q(6, 1));
    let Report::Factors(f) = execute(&cfg).unwrap() else { panic!() };
    assert_eq!(f.truncation, 6);

    let mut cfg = job(Command::Canonical, &["d^2 - x"]);
    cfg.strict = true;
    assert_eq!(run(&cfg).unwrap_err().exit_code(), 1);
    cfg.strict = false;
    cfg.order = Some(q(3, 2));
    assert_eq!(run(&cfg).unwrap_err().exit_code(), 1);
    cfg.order = Some(q(13, 2));
    let Report::Canonical(c) = execute(&cfg).unwrap() else { panic!() };
    assert_eq!(c.reduction.order, q(13, 2));
}

#[test]
fn eps_must_be_a_fraction() {
    let mut cfg = job(Command::Factors, &["d^2 - x"]);
    cfg.eps = Some(0.0);
    assert_eq!(run(&cfg).unwrap_err().exit_code(), 2);
    cfg.eps = Some(1e-10);
    assert!(run(&cfg).is_ok());
}

#[test]
fn binary_output_is_deterministic() {
    for args in [
        ["factors", "d^3 + 2*d - x^2 - 1", "--format", "json"],
        ["canonical", "d^3 + 1/2*d^2 - 2*x^4 + x", "--format", "json"],
        ["monodromy", "d^2 - x", "--format", "text"],
    ] {
        let (c1, o1, _) = airy(&args);
        let (c2, o2, _) = airy(&args);
        assert_eq!(c1, 0);
        assert_eq!(c2, 0);
        assert_eq!(o1, o2);
    }
}

#[test]
fn json_keys_are_sorted() {
    let (code, out, _) = airy(&["monodromy", "d^2 - x"]);
    assert_eq!(code, 0);
    let keys: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted);
    assert!(keys.contains(&"lambda"));
}

#[test]
fn exit_codes() {
    assert_eq!(airy(&["factors", "d^2 - x"]).0, 0);
    assert_eq!(airy(&["selftest"]).0, 0);
    let (code, _, err) = airy(&["factors", "x^2 - d"]);
    assert_eq!(code, 1);
    assert!(err.contains("leading coefficient"));
    assert_eq!(airy(&["canonical", "--strict", "d^2 - x"]).0, 1);
    let (code, _, err) = airy(&["factors", "d^2 - y"]);
    assert_eq!(code, 2);
    assert!(err.contains("position 6"));
    assert_eq!(airy(&["frobnicate"]).0, 2);
    assert_eq!(airy(&["equiv", "d^2 - x"]).0, 2);
    assert_eq!(airy(&["factors", "d^2 - x", "--precision", "quad"]).0, 2);
    assert_eq!(airy(&["factors", "--file", "/nonexistent/ops.json"]).0, 2);
}

#[test]
fn operators_from_file() {
    let dir = std::env::temp_dir().join(format!("airy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ops.json");
    let ops = vec![parse_operator("d^3 - x^4").unwrap(), parse_operator("d^3 + d - x^4 + 2").unwrap()];
    std::fs::write(&path, serde_json::to_string(&ops).unwrap()).unwrap();
    let (code, out, _) = airy(&["equiv", "--file", path.to_str().unwrap(), "--format", "text"]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: equivalent"), "{out}");
    let (code, from_text, _) = airy(&["equiv", "d^3 - x^4", "d^3 + d - x^4 + 2", "--format", "text"]);
    assert_eq!(code, 0);
    assert_eq!(out, from_text);
    std::fs::remove_dir_all(&dir).unwrap();
}

fn small() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(p, d)| Rational::new(p, d))
}

proptest! {
    #[test]
    fn display_then_parse_is_identity(
        n in 1usize..=4,
        m in 1usize..=5,
        a in proptest::collection::vec(small(), 4),
        b in proptest::collection::vec(small(), 6),
        lead in small().prop_filter("nonzero", |r| !r.is_zero()),
    ) {
        let mut av: Vec<Rational> = a[..n].to_vec();
        av[n - 1] = Rational::ONE;
        let mut bv: Vec<Rational> = b[..=m].to_vec();
        bv[m] = lead;
        let l = validate(n as i64, m as i64, av, bv).unwrap();
        prop_assert_eq!(parse_operator(&l.to_string()).unwrap(), l);
    }
}
