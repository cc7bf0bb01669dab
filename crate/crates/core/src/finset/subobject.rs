//! Parts, predicates, relations and spans, and the element theory built on
//! proof morphisms.

use super::{
    all_functions, compose, omega, pairing, product, FinFunction, FinSet, FinsetError, Value,
};

/// A part of `genus`, canonicalized as the subset it picks out.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinPredicate {
    genus: FinSet,
    extent: FinSet,
}

impl FinPredicate {
    pub fn new(genus: FinSet, extent: FinSet) -> Result<FinPredicate, FinsetError> {
        if let Some(x) = extent.iter().find(|x| !genus.contains(x)) {
            return Err(FinsetError::ExtentOutOfRange(x.clone()));
        }
        Ok(FinPredicate { genus, extent })
    }

    pub fn full(genus: &FinSet) -> FinPredicate {
        FinPredicate {
            genus: genus.clone(),
            extent: genus.clone(),
        }
    }

    pub fn empty(genus: &FinSet) -> FinPredicate {
        FinPredicate {
            genus: genus.clone(),
            extent: FinSet::empty(),
        }
    }

    pub fn genus(&self) -> &FinSet {
        &self.genus
    }

    pub fn extent(&self) -> &FinSet {
        &self.extent
    }

    /// The canonical mono `extent >-> genus`.
    pub fn inclusion(&self) -> FinFunction {
        FinFunction::from_fn(&self.extent, &self.genus, Value::clone).expect("extent lies in genus")
    }

    pub fn holds_at(&self, x: &Value) -> bool {
        self.extent.contains(x)
    }
}

/// Every part of `a`, in order of the bitmask over `a`'s elements.
pub fn subobjects(a: &FinSet) -> Vec<FinPredicate> {
    let n = a.len();
    assert!(n < 32, "too many parts to enumerate");
    (0u32..(1u32 << n))
        .map(|mask| FinPredicate {
            genus: a.clone(),
            extent: FinSet::new(
                a.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, v)| v.clone()),
            ),
        })
        .collect()
}

/// `chi_p: genus -> Omega`.
pub fn characteristic(p: &FinPredicate) -> FinFunction {
    FinFunction::from_fn(&p.genus, &omega(), |x| Value::bool(p.extent.contains(x))).unwrap()
}

/// The part of `chi.source` sent to `true`.
pub fn fiber(chi: &FinFunction) -> Result<FinPredicate, FinsetError> {
    if chi.target() != &omega() {
        return Err(FinsetError::TargetNotOmega);
    }
    Ok(FinPredicate {
        genus: chi.source().clone(),
        extent: FinSet::new(chi.graph().iter().filter(|(_, v)| v.is_true()).map(|(k, _)| k.clone())),
    })
}

pub fn binary_meet(p: &FinPredicate, q: &FinPredicate) -> Result<FinPredicate, FinsetError> {
    if p.genus != q.genus {
        return Err(FinsetError::GenusMismatch);
    }
    Ok(FinPredicate {
        genus: p.genus.clone(),
        extent: p.extent.intersection(&q.extent),
    })
}

/// Pullback of a part along `h`: `h^-1(p)`.
pub fn inverse_image(p: &FinPredicate, h: &FinFunction) -> Result<FinPredicate, FinsetError> {
    if h.target() != &p.genus {
        return Err(FinsetError::GenusMismatch);
    }
    Ok(FinPredicate {
        genus: h.source().clone(),
        extent: FinSet::new(
            h.graph()
                .iter()
                .filter(|(_, y)| p.extent.contains(y))
                .map(|(x, _)| x.clone()),
        ),
    })
}

/// The image part of `f` and the corestriction onto it; the corestriction
/// followed by the part's inclusion is `f` again.
pub fn image_factorization(f: &FinFunction) -> (FinPredicate, FinFunction) {
    let part = FinPredicate {
        genus: f.target().clone(),
        extent: f.image(),
    };
    let core = FinFunction::new(f.source().clone(), part.extent.clone(), f.graph().clone())
        .expect("corestriction onto the image");
    (part, core)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinRelation {
    comp0: FinSet,
    comp1: FinSet,
    extent: FinSet,
}

impl FinRelation {
    pub fn new(comp0: FinSet, comp1: FinSet, extent: FinSet) -> Result<FinRelation, FinsetError> {
        for p in extent.iter() {
            match p.as_pair() {
                Some((a, b)) if comp0.contains(a) && comp1.contains(b) => {}
                _ => return Err(FinsetError::ExtentOutOfRange(p.clone())),
            }
        }
        Ok(FinRelation { comp0, comp1, extent })
    }

    pub fn full(comp0: &FinSet, comp1: &FinSet) -> FinRelation {
        let (carrier, _, _) = product(comp0, comp1);
        FinRelation {
            comp0: comp0.clone(),
            comp1: comp1.clone(),
            extent: carrier,
        }
    }

    pub fn identity(x: &FinSet) -> FinRelation {
        FinRelation {
            comp0: x.clone(),
            comp1: x.clone(),
            extent: FinSet::new(x.iter().map(|v| Value::pair(v.clone(), v.clone()))),
        }
    }

    pub fn comp0(&self) -> &FinSet {
        &self.comp0
    }

    pub fn comp1(&self) -> &FinSet {
        &self.comp1
    }

    pub fn extent(&self) -> &FinSet {
        &self.extent
    }

    pub fn relates(&self, a: &Value, b: &Value) -> bool {
        self.extent.contains(&Value::pair(a.clone(), b.clone()))
    }

    /// The relation as a part of `comp0 x comp1`.
    pub fn as_predicate(&self) -> FinPredicate {
        let (carrier, _, _) = product(&self.comp0, &self.comp1);
        FinPredicate {
            genus: carrier,
            extent: self.extent.clone(),
        }
    }
}

/// `{y : (x, y) in r}` for `x` in component 0.
pub fn relation_fiber01(r: &FinRelation, x: &Value) -> Result<FinSet, FinsetError> {
    if !r.comp0.contains(x) {
        return Err(FinsetError::NotInComponent(x.clone()));
    }
    Ok(FinSet::new(r.comp1.iter().filter(|y| r.relates(x, y)).cloned()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSpan {
    vertex: FinSet,
    leg0: FinFunction,
    leg1: FinFunction,
}

impl FinSpan {
    pub fn new(leg0: FinFunction, leg1: FinFunction) -> Result<FinSpan, FinsetError> {
        if leg0.source() != leg1.source() {
            return Err(FinsetError::LegMismatch);
        }
        Ok(FinSpan {
            vertex: leg0.source().clone(),
            leg0,
            leg1,
        })
    }

    pub fn vertex(&self) -> &FinSet {
        &self.vertex
    }

    pub fn leg0(&self) -> &FinFunction {
        &self.leg0
    }

    pub fn leg1(&self) -> &FinFunction {
        &self.leg1
    }
}

/// The image of `<leg0, leg1>`.
pub fn span_to_relation(s: &FinSpan) -> FinRelation {
    let paired = pairing(&s.leg0, &s.leg1).expect("legs share the vertex");
    FinRelation {
        comp0: s.leg0.target().clone(),
        comp1: s.leg1.target().clone(),
        extent: paired.image(),
    }
}

/// The extent as vertex, with the component projections as legs.
pub fn relation_to_span(r: &FinRelation) -> FinSpan {
    let leg0 = FinFunction::from_fn(&r.extent, &r.comp0, |p| p.as_pair().unwrap().0.clone()).unwrap();
    let leg1 = FinFunction::from_fn(&r.extent, &r.comp1, |p| p.as_pair().unwrap().1.clone()).unwrap();
    FinSpan {
        vertex: r.extent.clone(),
        leg0,
        leg1,
    }
}

// ---------------------------------------------------------------------------
// Element theory

/// `x` is an element of `X` when `X` is its target.
pub fn is_element(x: &FinFunction, big_x: &FinSet) -> bool {
    x.target() == big_x
}

/// A part is a monomorphism, decided by injectivity.
pub fn is_part(b: &FinFunction) -> bool {
    b.is_injective()
}

/// Some proof `p` with `compose(p, y) = x`, if `x` belongs to `y`. When `y` is
/// a part the proof is unique.
pub fn belongs(x: &FinFunction, y: &FinFunction) -> Result<Option<FinFunction>, FinsetError> {
    if x.target() != y.target() {
        return Err(FinsetError::TargetMismatch);
    }
    let mut graph = std::collections::BTreeMap::new();
    for (s, xs) in x.graph() {
        match y.graph().iter().find(|(_, v)| *v == xs) {
            Some((pre, _)) => {
                graph.insert(s.clone(), pre.clone());
            }
            None => return Ok(None),
        }
    }
    Ok(Some(FinFunction::new(x.source().clone(), y.source().clone(), graph)?))
}

/// `a` is included in `b`: both parts, and `a` belongs to `b`.
pub fn includes(a: &FinFunction, b: &FinFunction) -> Result<bool, FinsetError> {
    if a.target() != b.target() {
        return Err(FinsetError::TargetMismatch);
    }
    if !is_part(a) || !is_part(b) {
        return Err(FinsetError::NotAPart);
    }
    Ok(belongs(a, b)?.is_some())
}

/// `x` is a member of the part `b`.
pub fn member(x: &FinFunction, b: &FinFunction) -> Result<bool, FinsetError> {
    if x.target() != b.target() {
        return Err(FinsetError::TargetMismatch);
    }
    if !is_part(b) {
        return Err(FinsetError::NotAPart);
    }
    Ok(belongs(x, b)?.is_some())
}

/// Every proof `p` with `compose(p, y) = x`, by enumeration.
pub fn all_proofs(x: &FinFunction, y: &FinFunction) -> Vec<FinFunction> {
    all_functions(x.source(), y.source())
        .filter(|p| compose(p, y).map(|py| &py == x).unwrap_or(false))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::{bang, terminal};
    use super::*;

    fn set(n: usize) -> FinSet {
        FinSet::range(n)
    }

    #[test]
    fn subobject_counts_and_classifier() {
        let a = set(3);
        let subs = subobjects(&a);
        assert_eq!(subs.len(), 8);
        for p in &subs {
            assert_eq!(&fiber(&characteristic(p)).unwrap(), p);
        }
        let full = characteristic(&FinPredicate::full(&a));
        assert!(full.graph().values().all(Value::is_true));
        assert_eq!(fiber(&FinFunction::identity(&a)), Err(FinsetError::TargetNotOmega));
    }

    #[test]
    fn meet_is_greatest_lower_bound() {
        let a = set(3);
        let subs = subobjects(&a);
        for p in &subs {
            assert_eq!(&binary_meet(p, &FinPredicate::full(&a)).unwrap(), p);
            for q in &subs {
                let m = binary_meet(p, q).unwrap();
                assert!(m.extent().is_subset(p.extent()) && m.extent().is_subset(q.extent()));
                for r in &subs {
                    if r.extent().is_subset(p.extent()) && r.extent().is_subset(q.extent()) {
                        assert!(r.extent().is_subset(m.extent()));
                    }
                }
            }
        }
        let p = FinPredicate::new(a.clone(), FinSet::of_atoms(["0"])).unwrap();
        let q = FinPredicate::new(a.clone(), FinSet::of_atoms(["1", "2"])).unwrap();
        assert!(binary_meet(&p, &q).unwrap().extent().is_empty());
        assert_eq!(
            binary_meet(&p, &FinPredicate::full(&set(2))),
            Err(FinsetError::GenusMismatch)
        );
    }

    #[test]
    fn fiber01_cases() {
        let x = set(3);
        let id = FinRelation::identity(&x);
        assert_eq!(relation_fiber01(&id, &Value::atom("1")).unwrap(), FinSet::of_atoms(["1"]));
        assert_eq!(relation_fiber01(&FinRelation::full(&x, &set(2)), &Value::atom("0")).unwrap(), set(2));
        let empty = FinRelation::new(x.clone(), x.clone(), FinSet::empty()).unwrap();
        assert!(relation_fiber01(&empty, &Value::atom("2")).unwrap().is_empty());
        assert!(matches!(
            relation_fiber01(&id, &Value::atom("7")),
            Err(FinsetError::NotInComponent(_))
        ));
    }

    #[test]
    fn image_factorization_cases() {
        for n in 0..=3 {
            for m in 0..=3 {
                for f in all_functions(&set(n), &set(m)) {
                    let (part, core) = image_factorization(&f);
                    assert_eq!(compose(&core, &part.inclusion()).unwrap(), f);
                    if f.is_injective() {
                        assert_eq!(part.extent().len(), n);
                        assert!(core.is_bijective());
                    }
                }
            }
        }
        let c = FinFunction::constant(&set(3), &set(3), Value::atom("2")).unwrap();
        assert_eq!(image_factorization(&c).0.extent().len(), 1);
        for p in subobjects(&set(3)) {
            assert_eq!(image_factorization(&p.inclusion()).0, p);
        }
    }

    #[test]
    fn relation_span_reflection() {
        let x = set(2);
        let (carrier, _, _) = product(&x, &x);
        for p in subobjects(&carrier) {
            let r = FinRelation::new(x.clone(), x.clone(), p.extent().clone()).unwrap();
            assert_eq!(span_to_relation(&relation_to_span(&r)), r);
        }
        let diag = FinSpan::new(FinFunction::identity(&x), FinFunction::identity(&x)).unwrap();
        assert_eq!(span_to_relation(&diag), FinRelation::identity(&x));
        assert_eq!(
            FinSpan::new(FinFunction::identity(&x), FinFunction::identity(&set(3))),
            Err(FinsetError::LegMismatch)
        );
    }

    #[test]
    fn injective_span_keeps_cardinality() {
        let v = set(2);
        for l0 in all_functions(&v, &set(2)) {
            for l1 in all_functions(&v, &set(2)) {
                let s = FinSpan::new(l0.clone(), l1.clone()).unwrap();
                let injective = pairing(&l0, &l1).unwrap().is_injective();
                if injective {
                    assert_eq!(span_to_relation(&s).extent().len(), v.len());
                }
            }
        }
    }

    #[test]
    fn elements_and_parts() {
        let x = set(3);
        let id = FinFunction::identity(&x);
        assert!(is_element(&id, &x) && is_part(&id));
        let c = FinFunction::constant(&set(2), &x, Value::atom("0")).unwrap();
        assert!(is_element(&c, &x) && !is_part(&c));
    }

    #[test]
    fn mono_agrees_with_left_cancellation() {
        for n in 0..=3 {
            for m in 0..=3 {
                for b in all_functions(&set(n), &set(m)) {
                    let mut cancels = true;
                    'outer: for t in 0..=2 {
                        for g in all_functions(&set(t), &set(n)) {
                            for h in all_functions(&set(t), &set(n)) {
                                if g != h && compose(&g, &b).unwrap() == compose(&h, &b).unwrap() {
                                    cancels = false;
                                    break 'outer;
                                }
                            }
                        }
                    }
                    assert_eq!(is_part(&b), cancels, "{b}");
                }
            }
        }
    }

    #[test]
    fn belonging_examples() {
        let x = set(2);
        let pick = |v: &str| FinFunction::constant(&terminal(), &x, Value::atom(v)).unwrap();
        let id = FinFunction::identity(&x);
        assert_eq!(belongs(&pick("0"), &id).unwrap(), Some(pick("0")));
        let part = FinPredicate::new(x.clone(), FinSet::of_atoms(["0"])).unwrap().inclusion();
        let proofs = all_proofs(&pick("0"), &part);
        assert_eq!(proofs.len(), 1);
        assert_eq!(belongs(&pick("0"), &part).unwrap(), Some(proofs[0].clone()));
        assert!(all_proofs(&pick("1"), &part).is_empty());
        assert_eq!(belongs(&pick("1"), &part).unwrap(), None);
        assert_eq!(belongs(&pick("1"), &bang(&x)), Err(FinsetError::TargetMismatch));
    }

    #[test]
    fn belonging_agrees_with_enumeration() {
        let x = set(3);
        for n in 0..=2 {
            for m in 0..=2 {
                for a in all_functions(&set(n), &x) {
                    for b in all_functions(&set(m), &x) {
                        let proofs = all_proofs(&a, &b);
                        let found = belongs(&a, &b).unwrap();
                        assert_eq!(found.is_some(), !proofs.is_empty());
                        if let Some(p) = found {
                            assert!(proofs.contains(&p));
                        }
                        if is_part(&b) {
                            assert!(proofs.len() <= 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn inclusion_matches_subsets_and_membership() {
        let x = set(3);
        let parts: Vec<_> = subobjects(&x).iter().map(FinPredicate::inclusion).collect();
        let globals: Vec<_> = all_functions(&terminal(), &x).collect();
        for a in &parts {
            assert!(includes(a, a).unwrap());
            for b in &parts {
                let inc = includes(a, b).unwrap();
                assert_eq!(inc, a.image().is_subset(&b.image()));
                let universal = globals
                    .iter()
                    .all(|g| !member(g, a).unwrap() || member(g, b).unwrap());
                assert_eq!(inc, universal);
                for c in &parts {
                    if inc && includes(b, c).unwrap() {
                        assert!(includes(a, c).unwrap());
                    }
                }
            }
        }
        let c = FinFunction::constant(&set(2), &x, Value::atom("0")).unwrap();
        assert_eq!(member(&globals[0], &c), Err(FinsetError::NotAPart));
        assert_eq!(includes(&c, &parts[1]), Err(FinsetError::NotAPart));
    }
}
