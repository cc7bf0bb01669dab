//! Finite categories, the pullback of composable pairs and pointwise
//! (generalized) composition of families of morphisms.

use std::collections::BTreeMap;

use super::{compose, FinFunction, FinSet, FinsetError, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: FinSet,
    morphisms: FinSet,
    src: FinFunction,
    tgt: FinFunction,
    ident: FinFunction,
    comp: BTreeMap<(Value, Value), Value>,
}

fn law(msg: String) -> FinsetError {
    FinsetError::CategoryLaw(msg)
}

impl FinCategory {
    /// Validates every category law exhaustively.
    pub fn new(
        src: FinFunction,
        tgt: FinFunction,
        ident: FinFunction,
        comp: BTreeMap<(Value, Value), Value>,
    ) -> Result<FinCategory, FinsetError> {
        let morphisms = src.source().clone();
        let objects = src.target().clone();
        if tgt.source() != &morphisms || tgt.target() != &objects {
            return Err(law("source and target maps disagree on their sets".into()));
        }
        if ident.source() != &objects || ident.target() != &morphisms {
            return Err(law("identity map must send objects to morphisms".into()));
        }
        for o in objects.iter() {
            let i = &ident.graph()[o];
            if &src.graph()[i] != o || &tgt.graph()[i] != o {
                return Err(law(format!("identity of {o} is not an endomorphism of {o}")));
            }
        }
        for ((f, g), h) in &comp {
            if !morphisms.contains(f) || !morphisms.contains(g) || !morphisms.contains(h) {
                return Err(law(format!("composite ({f}, {g}) mentions an unknown morphism")));
            }
        }
        for f in morphisms.iter() {
            for g in morphisms.iter() {
                let composable = tgt.graph()[f] == src.graph()[g];
                match comp.get(&(f.clone(), g.clone())) {
                    Some(h) if composable => {
                        if src.graph()[h] != src.graph()[f] || tgt.graph()[h] != tgt.graph()[g] {
                            return Err(law(format!("composite of {f} and {g} has the wrong endpoints")));
                        }
                    }
                    Some(_) => return Err(law(format!("{f} and {g} are not composable"))),
                    None if composable => return Err(law(format!("composite of {f} and {g} is missing"))),
                    None => {}
                }
            }
        }
        let c = FinCategory {
            objects,
            morphisms,
            src,
            tgt,
            ident,
            comp,
        };
        for f in c.morphisms.iter() {
            let left = c.identity(&c.src.graph()[f]);
            let right = c.identity(&c.tgt.graph()[f]);
            if c.compose(&left, f) != Some(f.clone()) || c.compose(f, &right) != Some(f.clone()) {
                return Err(law(format!("identity law fails at {f}")));
            }
        }
        for ((f, g), fg) in &c.comp {
            for h in c.morphisms.iter() {
                if let Some(gh) = c.compose(g, h) {
                    if c.compose(fg, h) != c.compose(f, &gh) {
                        return Err(law(format!("associativity fails at ({f}, {g}, {h})")));
                    }
                }
            }
        }
        Ok(c)
    }

    /// Builds a category from named arrows `(name, source, target)` and the
    /// non-trivial composites `(f, g, f;g)`. Identities are named `id_<object>`.
    pub fn generate(
        objects: &[&str],
        arrows: &[(&str, &str, &str)],
        compositions: &[(&str, &str, &str)],
    ) -> Result<FinCategory, FinsetError> {
        let a = |s: &str| Value::atom(s);
        let objs = FinSet::of_atoms(objects.iter().copied());
        let id_name = |o: &str| format!("id_{o}");
        let mut src_g = BTreeMap::new();
        let mut tgt_g = BTreeMap::new();
        let mut ident_g = BTreeMap::new();
        for o in objects {
            src_g.insert(a(&id_name(o)), a(o));
            tgt_g.insert(a(&id_name(o)), a(o));
            ident_g.insert(a(o), a(&id_name(o)));
        }
        for (name, s, t) in arrows {
            src_g.insert(a(name), a(s));
            tgt_g.insert(a(name), a(t));
        }
        let mors = FinSet::new(src_g.keys().cloned());
        let mut comp = BTreeMap::new();
        for f in mors.iter() {
            for o in objects {
                let id = a(&id_name(o));
                if src_g[f] == a(o) {
                    comp.insert((id.clone(), f.clone()), f.clone());
                }
                if tgt_g[f] == a(o) {
                    comp.insert((f.clone(), id), f.clone());
                }
            }
        }
        for (f, g, h) in compositions {
            comp.insert((a(f), a(g)), a(h));
        }
        FinCategory::new(
            FinFunction::new(mors.clone(), objs.clone(), src_g)?,
            FinFunction::new(mors.clone(), objs.clone(), tgt_g)?,
            FinFunction::new(objs, mors, ident_g)?,
            comp,
        )
    }

    pub fn discrete(objects: &[&str]) -> FinCategory {
        FinCategory::generate(objects, &[], &[]).expect("discrete categories are lawful")
    }

    pub fn objects(&self) -> &FinSet {
        &self.objects
    }

    pub fn morphisms(&self) -> &FinSet {
        &self.morphisms
    }

    pub fn src(&self) -> &FinFunction {
        &self.src
    }

    pub fn tgt(&self) -> &FinFunction {
        &self.tgt
    }

    pub fn ident(&self) -> &FinFunction {
        &self.ident
    }

    pub fn identity(&self, o: &Value) -> Value {
        self.ident.graph()[o].clone()
    }

    /// Diagrammatic composite `f ; g`, when defined.
    pub fn compose(&self, f: &Value, g: &Value) -> Option<Value> {
        self.comp.get(&(f.clone(), g.clone())).cloned()
    }
}

/// `mor x_obj mor` with its projections: the pullback of `tgt` and `src`.
pub fn composable_pairs(c: &FinCategory) -> (FinSet, FinFunction, FinFunction) {
    let carrier = FinSet::new(c.comp.keys().map(|(f, g)| Value::pair(f.clone(), g.clone())));
    let p0 = FinFunction::from_fn(&carrier, &c.morphisms, |p| p.as_pair().unwrap().0.clone()).unwrap();
    let p1 = FinFunction::from_fn(&carrier, &c.morphisms, |p| p.as_pair().unwrap().1.clone()).unwrap();
    (carrier, p0, p1)
}

/// The composition map `mor x_obj mor -> mor`.
pub fn composition_map(c: &FinCategory) -> FinFunction {
    let (carrier, _, _) = composable_pairs(c);
    FinFunction::from_fn(&carrier, &c.morphisms, |p| {
        let (f, g) = p.as_pair().unwrap();
        c.comp[&(f.clone(), g.clone())].clone()
    })
    .unwrap()
}

/// Pointwise composite of two `X`-indexed families of morphisms.
pub fn gen_compose(f: &FinFunction, g: &FinFunction, c: &FinCategory) -> Result<FinFunction, FinsetError> {
    if f.source() != g.source() {
        return Err(FinsetError::SourceMismatch("families must share a parameter set".into()));
    }
    if f.target() != &c.morphisms || g.target() != &c.morphisms {
        return Err(FinsetError::TargetMismatch);
    }
    let mut graph = BTreeMap::new();
    for x in f.source().iter() {
        let h = c
            .compose(&f.graph()[x], &g.graph()[x])
            .ok_or_else(|| FinsetError::NotPointwiseComposable(x.clone()))?;
        graph.insert(x.clone(), h);
    }
    FinFunction::new(f.source().clone(), c.morphisms.clone(), graph)
}

/// `<f, g>` as a map into the composable pairs.
pub fn pair_into_composable(f: &FinFunction, g: &FinFunction, c: &FinCategory) -> Result<FinFunction, FinsetError> {
    let (carrier, _, _) = composable_pairs(c);
    let graph = f
        .source()
        .iter()
        .map(|x| (x.clone(), Value::pair(f.graph()[x].clone(), g.graph()[x].clone())))
        .collect();
    FinFunction::new(f.source().clone(), carrier, graph).map_err(|e| match e {
        FinsetError::OutOfTarget(v) => FinsetError::NotPointwiseComposable(v),
        other => other,
    })
}

/// `gen_compose` routed through the pullback: `<f, g> ; comp`.
pub fn gen_compose_via_pullback(f: &FinFunction, g: &FinFunction, c: &FinCategory) -> Result<FinFunction, FinsetError> {
    compose(&pair_into_composable(f, g, c)?, &composition_map(c))
}

#[cfg(test)]
mod tests {
    use super::super::{all_functions, check_pullback, terminal, DEFAULT_ENUMERATION_CAP};
    use super::*;

    fn arrow() -> FinCategory {
        FinCategory::generate(&["a", "b"], &[("f", "a", "b")], &[]).unwrap()
    }

    /// a --f--> b --g--> c with h = f;g
    fn chain() -> FinCategory {
        FinCategory::generate(
            &["a", "b", "c"],
            &[("f", "a", "b"), ("g", "b", "c"), ("h", "a", "c")],
            &[("f", "g", "h")],
        )
        .unwrap()
    }

    fn pairs_of(c: &FinCategory) -> Vec<(String, String)> {
        composable_pairs(c)
            .0
            .iter()
            .map(|p| {
                let (f, g) = p.as_pair().unwrap();
                (f.to_string(), g.to_string())
            })
            .collect()
    }

    #[test]
    fn discrete_pairs_are_identities() {
        let c = FinCategory::discrete(&["x", "y"]);
        assert_eq!(
            pairs_of(&c),
            [("id_x".to_string(), "id_x".to_string()), ("id_y".into(), "id_y".into())]
        );
    }

    #[test]
    fn single_arrow_pairs() {
        let got = pairs_of(&arrow());
        let mut want = vec![
            ("f".to_string(), "id_b".to_string()),
            ("id_a".into(), "f".into()),
            ("id_a".into(), "id_a".into()),
            ("id_b".into(), "id_b".into()),
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(!got.contains(&("f".into(), "f".into())));
    }

    #[test]
    fn pair_count_matches_in_out_degrees() {
        for c in [arrow(), chain(), FinCategory::discrete(&["p"])] {
            let mut total = 0;
            for o in c.objects().iter() {
                let ins = c.tgt().preimage(o).len();
                let outs = c.src().preimage(o).len();
                total += ins * outs;
            }
            assert_eq!(composable_pairs(&c).0.len(), total);
        }
    }

    #[test]
    fn composable_pairs_form_a_pullback() {
        for c in [arrow(), chain()] {
            let (_, p0, p1) = composable_pairs(&c);
            assert!(check_pullback(&p0, &p1, c.tgt(), c.src(), 2, DEFAULT_ENUMERATION_CAP).unwrap());
        }
    }

    #[test]
    fn law_violations_are_rejected() {
        // missing composite f;g
        assert!(matches!(
            FinCategory::generate(&["a", "b", "c"], &[("f", "a", "b"), ("g", "b", "c")], &[]),
            Err(FinsetError::CategoryLaw(_))
        ));
        // composite with the wrong endpoints
        assert!(matches!(
            FinCategory::generate(
                &["a", "b", "c"],
                &[("f", "a", "b"), ("g", "b", "c"), ("h", "a", "b")],
                &[("f", "g", "h")]
            ),
            Err(FinsetError::CategoryLaw(_))
        ));
        // associativity: (e;e);k = k;k = e but e;(e;k) = e;e = k
        assert!(matches!(
            FinCategory::generate(
                &["a"],
                &[("e", "a", "a"), ("k", "a", "a")],
                &[("e", "e", "k"), ("k", "k", "e"), ("e", "k", "e"), ("k", "e", "k")]
            ),
            Err(FinsetError::CategoryLaw(_))
        ));
    }

    #[test]
    fn idempotent_monoid_is_lawful() {
        let c = FinCategory::generate(&["a"], &[("e", "a", "a")], &[("e", "e", "e")]).unwrap();
        assert_eq!(c.compose(&Value::atom("e"), &Value::atom("e")), Some(Value::atom("e")));
    }

    #[test]
    fn generalized_composition() {
        let c = chain();
        let mors = c.morphisms().clone();
        let pick = |m: &str| FinFunction::constant(&terminal(), &mors, Value::atom(m)).unwrap();
        let h = gen_compose(&pick("f"), &pick("g"), &c).unwrap();
        assert_eq!(h, pick("h"));
        assert!(matches!(
            gen_compose(&pick("g"), &pick("f"), &c),
            Err(FinsetError::NotPointwiseComposable(_))
        ));

        let x = FinSet::range(2);
        for f in all_functions(&x, &mors) {
            let ids = FinFunction::from_fn(&x, &mors, |p| c.identity(&c.src().graph()[&f.graph()[p]])).unwrap();
            assert_eq!(gen_compose(&ids, &f, &c).unwrap(), f);
            for g in all_functions(&x, &mors) {
                match gen_compose(&f, &g, &c) {
                    Ok(h) => assert_eq!(gen_compose_via_pullback(&f, &g, &c).unwrap(), h),
                    Err(_) => assert!(gen_compose_via_pullback(&f, &g, &c).is_err()),
                }
            }
        }
    }
}
