//! Plain-text rendering of reports.

use crate::report::*;
use airy_formal::linalg::ComplexRepr;
use airy_formal::series::TermRepr;
use airy_formal::Rational;
use std::fmt::Write;

fn real(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn tiny(x: f64, scale: f64) -> bool {
    x.abs() <= 1e-12 * scale.max(1.0)
}

/// `a`, `bi` or `(a+bi)`, dropping a part that is negligible next to the other.
pub fn complex(re: f64, im: f64) -> String {
    let scale = re.abs().max(im.abs());
    match (tiny(re, scale), tiny(im, scale)) {
        (_, true) => real(re),
        (true, false) => format!("{}i", real(im)),
        _ => {
            let sign = if im < 0.0 { '-' } else { '+' };
            format!("({}{sign}{}i)", real(re), real(im.abs()))
        }
    }
}

fn c(v: &ComplexRepr) -> String {
    complex(v.re, v.im)
}

fn power(var: &str, e: Rational) -> String {
    if e.is_zero() {
        String::new()
    } else if e == Rational::ONE {
        var.to_string()
    } else if e.is_integer() && !e.is_negative() {
        format!("{var}^{}", e.numer())
    } else if e.is_integer() {
        format!("{var}^({})", e.numer())
    } else {
        format!("{var}^({e})")
    }
}

fn polynomial(var: &str, terms: &[TermRepr]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|t| {
            let p = power(var, t.exponent);
            if p.is_empty() { complex(t.re, t.im) } else { format!("{}*{p}", complex(t.re, t.im)) }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn header(out: &mut String, op: &str, n: usize, m: usize) {
    let _ = writeln!(out, "operator: {op}  (n = {n}, m = {m})");
}

pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    match r {
        Report::Factors(f) => {
            header(&mut out, &f.operator, f.n, f.m);
            let _ = writeln!(out, "branch truncation: {}", f.truncation);
            for (i, e) in f.factors.iter().enumerate() {
                let _ = writeln!(out, "factor {} (branch {}, multiplicity {}):", i + 1, e.source_branch, e.multiplicity);
                let _ = writeln!(out, "  Q(z) = {}", polynomial("z", &e.z.terms));
                let _ = writeln!(out, "  Q(x) = {}", polynomial("x", &e.x));
            }
        }
        Report::Monodromy(mr) => {
            header(&mut out, &mr.operator, mr.n, mr.m);
            let _ = writeln!(out, "lambda = {:?}", mr.lambda);
            let _ = writeln!(out, "eigenvalue = {}", c(&mr.eigenvalue));
            for b in &mr.per_branch {
                let _ = writeln!(
                    out,
                    "branch {}: lambda = {:?}, sigma = {}, linear = {}",
                    b.branch,
                    b.lambda,
                    c(&b.sigma),
                    c(&b.linear)
                );
            }
            for note in &mr.notes {
                let _ = writeln!(out, "note: {note}");
            }
        }
        Report::Canonical(cr) => {
            let red = &cr.reduction;
            let can = &red.canonical;
            header(&mut out, &cr.operator, can.n, can.m);
            let _ = writeln!(out, "order {:?}, truncation {:?}, twisted residue: {}", red.order, red.truncation, can.twisted);
            let levels: Vec<String> = can.levels.iter().map(|e| format!("{e:?}")).collect();
            let _ = writeln!(out, "levels: {}", levels.join(", "));
            for (e, d) in can.levels.iter().zip(&can.d) {
                let diag: Vec<String> = d.iter().map(c).collect();
                let _ = writeln!(out, "D[{}] = diag({})", power("z", *e), diag.join(", "));
            }
            for row in &can.c {
                let row: Vec<String> = row.iter().map(c).collect();
                let _ = writeln!(out, "C: [{}]", row.join(", "));
            }
            let raw: Vec<String> = can.raw_residues.iter().map(c).collect();
            let _ = writeln!(out, "raw residues: {}", raw.join(", "));
            let kinds: Vec<&str> = red.gauge_steps.iter().map(step_kind).collect();
            let _ = writeln!(out, "gauge steps ({}): {}", kinds.len(), kinds.join(" "));
            for note in &can.notes {
                let _ = writeln!(out, "note: {note}");
            }
        }
        Report::Equiv(er) => {
            let rep = &er.report;
            let _ = writeln!(out, "left:  {}", er.left);
            let _ = writeln!(out, "right: {}", er.right);
            let _ = writeln!(out, "verdict: {}", serde_json::to_value(rep.verdict).unwrap_or_default().as_str().unwrap_or("?"));
            if let Some(case) = rep.case {
                let _ = writeln!(out, "case: {}", case.label());
            }
            for ch in &rep.coefficient_checks {
                let mark = if ch.holds { "ok" } else { "differs" };
                let _ = writeln!(out, "  {}: {:?} vs {:?} {mark}", ch.name, ch.left, ch.right);
            }
            let opt = |o: Option<bool>| o.map_or("n/a".to_string(), |b| b.to_string());
            let _ = writeln!(out, "factors match: {}", opt(rep.factors_match));
            let _ = writeln!(out, "canonical models match: {}", opt(rep.canonical_orbit_match));
            for note in &rep.notes {
                let _ = writeln!(out, "note: {note}");
            }
        }
        Report::Selftest(s) => {
            for ch in &s.checks {
                let mark = if ch.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "{mark} {}: {}", ch.name, ch.detail);
            }
            let failed = s.checks.iter().filter(|c| !c.passed).count();
            let _ = writeln!(out, "{} checks, {failed} failed", s.checks.len());
        }
    }
    out
}

fn step_kind(s: &airy_formal::reduction::GaugeStepRepr) -> &'static str {
    use airy_formal::reduction::GaugeStepRepr::*;
    match s {
        Shear { .. } => "shear",
        Unipotent { .. } => "unipotent",
        Ramified { .. } => "ramified",
        Constant { .. } => "constant",
        Holomorphic { .. } => "holomorphic",
    }
}
