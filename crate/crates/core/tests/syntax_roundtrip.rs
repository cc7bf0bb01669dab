use iff_core::syntax::{
    parse_expr_str, parse_unit, print_canonical, print_unit, Binding, ConnectiveOp, Expr, QuantKind,
};
use proptest::prelude::*;

fn name() -> impl Strategy<Value = Expr> {
    prop::sample::select(vec![
        "A", "f", "set", "group", "2-cell", "o.i:a", "#n.set:set", "#n+1.ftn:source", "type.ftn:function",
        "#0.abc:f", "meta.set:set", "iff:set",
    ])
    .prop_map(Expr::name)
}

fn var() -> impl Strategy<Value = Expr> {
    prop::sample::select(vec!["?x", "?y", "?G", "?xy"]).prop_map(Expr::var)
}

fn term() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![name(), var()];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            (prop_oneof![name(), var()], prop::collection::vec(inner.clone(), 1..3))
                .prop_map(|(h, args)| Expr::apply(h, args)),
            prop::collection::vec(inner, 2..4).prop_map(Expr::Tuple),
        ]
    })
}

fn atom() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (term(), term()).prop_map(|(a, b)| Expr::eq(a, b)),
        (prop_oneof![name(), var()], prop::collection::vec(term(), 1..3))
            .prop_map(|(h, args)| Expr::apply(h, args)),
    ]
}

fn sentence() -> impl Strategy<Value = Expr> {
    atom().prop_recursive(3, 24, 2, |inner| {
        let binding = (prop::option::of(prop_oneof![name(), var()]), var()).prop_map(|(s, v)| {
            let Expr::Variable(v) = v else { unreachable!() };
            Binding { sort: s, variable: v }
        });
        prop_oneof![
            inner.clone().prop_map(Expr::not),
            (
                prop::sample::select(vec![
                    ConnectiveOp::And,
                    ConnectiveOp::Or,
                    ConnectiveOp::Implies,
                    ConnectiveOp::Iff
                ]),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Expr::Connective { op, args: vec![a, b] }),
            (
                prop::sample::select(vec![QuantKind::Forall, QuantKind::Exists]),
                prop::collection::vec(binding, 1..3),
                inner
            )
                .prop_map(|(kind, bindings, body)| Expr::Quantifier {
                    kind,
                    bindings,
                    body: Box::new(body)
                }),
        ]
    })
}

proptest! {
    #[test]
    fn printed_sentences_reparse_equal(e in sentence()) {
        let text = print_canonical(&e);
        let back = parse_expr_str(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(print_canonical(&back), text);
    }

    #[test]
    fn printed_units_reparse_equal(axioms in prop::collection::vec(sentence(), 0..4)) {
        let body: Vec<String> = axioms.iter().map(print_canonical).collect();
        let text = format!("(namespace grp (level 0)\n{})\n", body.join("\n"));
        let unit = parse_unit(&text).unwrap();
        let printed = print_unit(&unit);
        let again = parse_unit(&printed).unwrap();
        prop_assert_eq!(print_unit(&again), printed);
        let exprs: Vec<&Expr> = again.namespaces[0].axioms.iter().map(|a| &a.expr).collect();
        prop_assert_eq!(exprs, axioms.iter().collect::<Vec<_>>());
    }
}

#[test]
fn long_conjunctions_print_nested() {
    let e = parse_expr_str("(and (P a) (P b) (P c))").unwrap();
    assert_eq!(print_canonical(&e), "(and (and (P a) (P b)) (P c))");
}
