use std::path::PathBuf;

use iff_core::checks::{atomicity_profile, check_unit, check_units, classify_form, CheckOptions, FormClass};
use iff_core::modelcheck::{check_theory, parse_interpretation, write_interpretation};
use iff_core::syntax::{parse_expr_str, parse_unit, print_canonical, print_unit, SourceUnit};

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "corpus", name].iter().collect();
    std::fs::read_to_string(p).unwrap()
}

fn unit(name: &str) -> SourceUnit {
    parse_unit(&corpus(name)).unwrap().with_file(name)
}

#[test]
fn corpus_round_trips() {
    for f in ["example_code.iff", "group.iff", "group_laws.iff"] {
        let u = unit(f);
        let printed = print_unit(&u);
        let again = parse_unit(&printed).unwrap();
        assert_eq!(print_unit(&again), printed, "{f}");
        assert_eq!(again.axiom_count(), u.axiom_count());
        for (a, b) in u.namespaces.iter().zip(&again.namespaces) {
            let xs: Vec<_> = a.axioms.iter().map(|x| &x.expr).collect();
            let ys: Vec<_> = b.axioms.iter().map(|x| &x.expr).collect();
            assert_eq!(xs, ys, "{f}");
        }
    }
}

#[test]
fn tutorial_rows_round_trip() {
    let text = corpus("syntax_tutorial.sexp");
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with(';')).collect();
    assert_eq!(rows.len(), 13);
    for row in rows {
        let e = parse_expr_str(row).unwrap();
        assert_eq!(parse_expr_str(&print_canonical(&e)).unwrap(), e, "{row}");
    }
}

#[test]
fn corpus_checks_without_errors() {
    let units = [unit("example_code.iff"), unit("group.iff")];
    let diags = check_units(&units, &CheckOptions::default());
    let errors: Vec<String> = diags.iter().filter(|d| d.is_error()).map(|d| d.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}");
    for d in &diags {
        println!("{d}");
    }
}

#[test]
fn example_code_profile() {
    let u = unit("example_code.iff");
    let profile = atomicity_profile(&u);
    let names: Vec<&str> = profile.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["iff", "type.ftn", "type.pred", "#n.set", "#n.ftn", "abc"]);
    let natural: Vec<_> = profile[3..].iter().map(|(_, p)| *p).collect();
    assert!(natural.iter().all(|p| p.is_atomic()));
    assert_eq!(natural.iter().map(|p| p.negated_atomic).sum::<usize>(), 1);
    for ns in &u.namespaces[..3] {
        for ax in &ns.axioms {
            let c = classify_form(&ax.expr);
            assert!(matches!(c, FormClass::FirstOrder | FormClass::Declaration), "{c:?}");
        }
    }
}

#[test]
fn strict_atomic_flags_the_negation() {
    let u = unit("example_code.iff");
    let strict = CheckOptions {
        strict_atomic: true,
        ..Default::default()
    };
    let errs: Vec<_> = check_unit(&u, &strict).into_iter().filter(|d| d.is_error()).collect();
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0].code, "NOT-ATOMIC");
    assert_eq!(errs[0].site.namespace, "#n.set");
}

#[test]
fn injected_downref_is_reported() {
    let mut text = corpus("example_code.iff");
    text.push_str("\n(namespace late (level meta) (#1.set:set thing))\n");
    let u = parse_unit(&text).unwrap();
    let diags = check_unit(&u, &CheckOptions::default());
    assert!(diags.iter().any(|d| d.code == "LEVEL-DOWNREF" && d.is_error()), "{diags:#?}");
}

#[test]
fn z3_satisfies_the_group_laws() {
    let i = parse_interpretation(&corpus("z3.interp")).unwrap();
    for f in ["group.iff", "group_laws.iff"] {
        let report = check_theory(&unit(f), &i).unwrap();
        assert!(report.iter().all(|r| r.holds), "{f}");
    }
}

#[test]
fn broken_tables_are_caught() {
    for (interp, laws_failing) in [("z3_broken_cell.interp", 2), ("z3_broken_inverse.interp", 1)] {
        let i = parse_interpretation(&corpus(interp)).unwrap();
        let report = check_theory(&unit("group.iff"), &i).unwrap();
        assert_eq!(report.len(), 1);
        assert!(!report[0].holds);
        let cx = report[0].counterexample.as_ref().unwrap();
        assert!(cx.contains_key("?G") && cx.contains_key("?a"), "{interp}");
        let laws = check_theory(&unit("group_laws.iff"), &i).unwrap();
        assert_eq!(laws.iter().filter(|r| !r.holds).count(), laws_failing, "{interp}");
    }
}

#[test]
fn interpretations_round_trip() {
    for f in ["z3.interp", "z3_broken_cell.interp", "z3_broken_inverse.interp"] {
        let i = parse_interpretation(&corpus(f)).unwrap();
        assert_eq!(parse_interpretation(&write_interpretation(&i)).unwrap(), i);
    }
}
