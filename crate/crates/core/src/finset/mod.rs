//! Finite sets and functions with their topos structure: products, the
//! truth-value object, power sets, exponentials and hom-sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub mod category;
pub mod laws;
pub mod subobject;

pub use category::{composable_pairs, composition_map, gen_compose, FinCategory};
pub use subobject::{
    belongs, binary_meet, characteristic, fiber, image_factorization, includes, inverse_image, is_element,
    is_part, member, relation_fiber01, relation_to_span, span_to_relation, subobjects, FinPredicate,
    FinRelation, FinSpan,
};

/// Default bound on the number of candidates any exhaustive search may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinsetError {
    #[error("cannot compose: target of the first map is not the source of the second")]
    NotComposable,
    #[error("function is not total: {0} has no image")]
    NotTotal(Value),
    #[error("{0} is not in the source")]
    OutOfDomain(Value),
    #[error("image {0} lies outside the target")]
    OutOfTarget(Value),
    #[error("graph assigns {0}, which is not in the source")]
    ExtraneousKey(Value),
    #[error("source does not match: {0}")]
    SourceMismatch(String),
    #[error("target is not the truth-value set")]
    TargetNotOmega,
    #[error("predicates have different genus")]
    GenusMismatch,
    #[error("{0} is not in component 0")]
    NotInComponent(Value),
    #[error("extent element {0} is not in the genus or components")]
    ExtentOutOfRange(Value),
    #[error("legs of a span must share their source")]
    LegMismatch,
    #[error("operands do not share a target")]
    TargetMismatch,
    #[error("the second operand is not a part (monomorphism)")]
    NotAPart,
    #[error("families are not pointwise composable at {0}")]
    NotPointwiseComposable(Value),
    #[error("category law violated: {0}")]
    CategoryLaw(String),
    #[error("{0} is not a function value")]
    NotAFunctionValue(Value),
    #[error("enumeration of {needed} candidates exceeds the cap of {cap}")]
    CapExceeded { needed: u128, cap: u128 },
}

// ---------------------------------------------------------------------------
// Values

/// Canonical element representation. The derived order is the canonical
/// element order used for enumeration and counterexamples.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Atom(Arc<str>),
    Pair(Arc<(Value, Value)>),
    Set(Arc<BTreeSet<Value>>),
    Fn(Arc<BTreeMap<Value, Value>>),
}

impl Value {
    pub fn atom(s: impl AsRef<str>) -> Value {
        Value::Atom(Arc::from(s.as_ref()))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Arc::new((a, b)))
    }

    pub fn set(items: impl IntoIterator<Item = Value>) -> Value {
        Value::Set(Arc::new(items.into_iter().collect()))
    }

    pub fn func(graph: BTreeMap<Value, Value>) -> Value {
        Value::Fn(Arc::new(graph))
    }

    pub fn bool(b: bool) -> Value {
        Value::atom(if b { "true" } else { "false" })
    }

    /// Right-associated pairs for more than two items.
    pub fn tuple(mut items: Vec<Value>) -> Value {
        assert!(items.len() >= 2, "a tuple needs at least two items");
        let mut acc = items.pop().unwrap();
        while let Some(v) = items.pop() {
            acc = Value::pair(v, acc);
        }
        acc
    }

    pub fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Value::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_true(&self) -> bool {
        self.as_atom() == Some("true")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(a) => f.write_str(a),
            Value::Pair(p) => write!(f, "[{} {}]", p.0, p.1),
            Value::Set(s) => {
                f.write_str("{")?;
                for (i, v) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
            Value::Fn(g) => {
                f.write_str("{")?;
                for (i, (k, v)) in g.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{k}->{v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// Sets

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FinSet {
    elements: Vec<Value>,
}

impl FinSet {
    pub fn new(items: impl IntoIterator<Item = Value>) -> FinSet {
        let mut elements: Vec<Value> = items.into_iter().collect();
        elements.sort();
        elements.dedup();
        FinSet { elements }
    }

    pub fn empty() -> FinSet {
        FinSet::default()
    }

    /// The atoms `0`, `1`, ..., `n-1`.
    pub fn range(n: usize) -> FinSet {
        FinSet::new((0..n).map(|i| Value::atom(i.to_string())))
    }

    pub fn of_atoms<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> FinSet {
        FinSet::new(names.into_iter().map(Value::atom))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.elements.binary_search(v).is_ok()
    }

    pub fn index_of(&self, v: &Value) -> Option<usize> {
        self.elements.binary_search(v).ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Value> {
        self.elements.iter()
    }

    pub fn elements(&self) -> &[Value] {
        &self.elements
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        self.elements.iter().all(|v| other.contains(v))
    }

    pub fn union(&self, other: &FinSet) -> FinSet {
        FinSet::new(self.iter().chain(other.iter()).cloned())
    }

    pub fn intersection(&self, other: &FinSet) -> FinSet {
        FinSet::new(self.iter().filter(|v| other.contains(v)).cloned())
    }

    pub fn to_value(&self) -> Value {
        Value::set(self.elements.iter().cloned())
    }

    pub fn from_value(v: &Value) -> Option<FinSet> {
        v.as_set().map(|s| FinSet::new(s.iter().cloned()))
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_value(), f)
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromIterator<Value> for FinSet {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Self {
        FinSet::new(iter)
    }
}

impl<'a> IntoIterator for &'a FinSet {
    type Item = &'a Value;
    type IntoIter = std::slice::Iter<'a, Value>;
    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

// ---------------------------------------------------------------------------
// Functions

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinFunction {
    source: FinSet,
    target: FinSet,
    graph: BTreeMap<Value, Value>,
}

impl FinFunction {
    /// Validates totality and that every image lies in the target.
    pub fn new(source: FinSet, target: FinSet, graph: BTreeMap<Value, Value>) -> Result<FinFunction, FinsetError> {
        for x in source.iter() {
            match graph.get(x) {
                None => return Err(FinsetError::NotTotal(x.clone())),
                Some(y) if !target.contains(y) => return Err(FinsetError::OutOfTarget(y.clone())),
                Some(_) => {}
            }
        }
        if graph.len() != source.len() {
            let extra = graph.keys().find(|k| !source.contains(k)).unwrap();
            return Err(FinsetError::ExtraneousKey(extra.clone()));
        }
        Ok(FinFunction { source, target, graph })
    }

    pub fn from_fn(source: &FinSet, target: &FinSet, f: impl Fn(&Value) -> Value) -> Result<FinFunction, FinsetError> {
        let graph = source.iter().map(|x| (x.clone(), f(x))).collect();
        FinFunction::new(source.clone(), target.clone(), graph)
    }

    pub fn from_pairs(source: &FinSet, target: &FinSet, pairs: &[(&str, &str)]) -> Result<FinFunction, FinsetError> {
        let graph = pairs.iter().map(|(a, b)| (Value::atom(a), Value::atom(b))).collect();
        FinFunction::new(source.clone(), target.clone(), graph)
    }

    pub fn identity(a: &FinSet) -> FinFunction {
        FinFunction {
            source: a.clone(),
            target: a.clone(),
            graph: a.iter().map(|x| (x.clone(), x.clone())).collect(),
        }
    }

    pub fn constant(source: &FinSet, target: &FinSet, y: Value) -> Result<FinFunction, FinsetError> {
        FinFunction::from_fn(source, target, |_| y.clone())
    }

    pub fn source(&self) -> &FinSet {
        &self.source
    }

    pub fn target(&self) -> &FinSet {
        &self.target
    }

    pub fn graph(&self) -> &BTreeMap<Value, Value> {
        &self.graph
    }

    pub fn apply(&self, x: &Value) -> Result<&Value, FinsetError> {
        self.graph.get(x).ok_or_else(|| FinsetError::OutOfDomain(x.clone()))
    }

    pub fn image(&self) -> FinSet {
        FinSet::new(self.graph.values().cloned())
    }

    pub fn is_injective(&self) -> bool {
        self.image().len() == self.source.len()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.target.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Preimage of a single target element.
    pub fn preimage(&self, y: &Value) -> FinSet {
        FinSet::new(self.graph.iter().filter(|(_, v)| *v == y).map(|(k, _)| k.clone()))
    }

    /// The graph as a function value, the element of the exponential.
    pub fn to_value(&self) -> Value {
        Value::func(self.graph.clone())
    }

    /// Rebuilds a function from an element of the exponential `target^source`.
    pub fn from_value(v: &Value, source: &FinSet, target: &FinSet) -> Result<FinFunction, FinsetError> {
        match v {
            Value::Fn(g) => FinFunction::new(source.clone(), target.clone(), (**g).clone()),
            other => Err(FinsetError::NotAFunctionValue(other.clone())),
        }
    }

    /// Same graph, with a larger target.
    pub fn widen(&self, target: &FinSet) -> Result<FinFunction, FinsetError> {
        FinFunction::new(self.source.clone(), target.clone(), self.graph.clone())
    }
}

impl fmt::Display for FinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.to_value(), self.source, self.target)
    }
}

impl fmt::Debug for FinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Diagrammatic composition: `compose(f, g)(x) = g(f(x))`.
pub fn compose(f: &FinFunction, g: &FinFunction) -> Result<FinFunction, FinsetError> {
    if f.target != g.source {
        return Err(FinsetError::NotComposable);
    }
    let graph = f
        .graph
        .iter()
        .map(|(x, y)| (x.clone(), g.graph[y].clone()))
        .collect();
    Ok(FinFunction {
        source: f.source.clone(),
        target: g.target.clone(),
        graph,
    })
}

// ---------------------------------------------------------------------------
// Enumeration

/// `|b|^|a|`, or `None` on overflow.
pub fn function_count(a: usize, b: usize) -> Option<u128> {
    if a == 0 {
        return Some(1);
    }
    (b as u128).checked_pow(u32::try_from(a).ok()?)
}

pub fn ensure_within(needed: Option<u128>, cap: u128) -> Result<(), FinsetError> {
    match needed {
        Some(n) if n <= cap => Ok(()),
        Some(n) => Err(FinsetError::CapExceeded { needed: n, cap }),
        None => Err(FinsetError::CapExceeded { needed: u128::MAX, cap }),
    }
}

/// All functions `a -> b` in canonical order of their graphs.
pub struct Functions {
    source: FinSet,
    target: FinSet,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for Functions {
    type Item = FinFunction;

    fn next(&mut self) -> Option<FinFunction> {
        if self.done {
            return None;
        }
        let graph = self
            .source
            .iter()
            .zip(&self.digits)
            .map(|(x, &d)| (x.clone(), self.target.elements[d].clone()))
            .collect();
        let f = FinFunction {
            source: self.source.clone(),
            target: self.target.clone(),
            graph,
        };
        // odometer with the first source element most significant
        let base = self.target.len();
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < base {
                break;
            }
            self.digits[i] = 0;
        }
        Some(f)
    }
}

pub fn all_functions(a: &FinSet, b: &FinSet) -> Functions {
    Functions {
        source: a.clone(),
        target: b.clone(),
        digits: vec![0; a.len()],
        done: b.is_empty() && !a.is_empty(),
    }
}

/// Like `all_functions`, refusing when the count exceeds `cap`.
pub fn all_functions_capped(a: &FinSet, b: &FinSet, cap: u128) -> Result<Functions, FinsetError> {
    ensure_within(function_count(a.len(), b.len()), cap)?;
    Ok(all_functions(a, b))
}

// ---------------------------------------------------------------------------
// Topos structure

pub fn terminal() -> FinSet {
    FinSet::new([Value::atom("•")])
}

pub fn initial() -> FinSet {
    FinSet::empty()
}

/// The truth values, `{false, true}`.
pub fn omega() -> FinSet {
    FinSet::new([Value::bool(false), Value::bool(true)])
}

/// The unique map into the terminal set.
pub fn bang(a: &FinSet) -> FinFunction {
    FinFunction::from_fn(a, &terminal(), |_| Value::atom("•")).expect("terminal map is total")
}

/// The unique map out of the initial set.
pub fn from_initial(b: &FinSet) -> FinFunction {
    FinFunction::identity(&initial()).widen(b).expect("empty graph")
}

/// Product carrier with its two projections.
pub fn product(a: &FinSet, b: &FinSet) -> (FinSet, FinFunction, FinFunction) {
    let carrier = FinSet::new(
        a.iter()
            .flat_map(|x| b.iter().map(move |y| Value::pair(x.clone(), y.clone()))),
    );
    let p0 = FinFunction::from_fn(&carrier, a, |p| p.as_pair().unwrap().0.clone()).unwrap();
    let p1 = FinFunction::from_fn(&carrier, b, |p| p.as_pair().unwrap().1.clone()).unwrap();
    (carrier, p0, p1)
}

/// `<f, g>: T -> A x B`.
pub fn pairing(f: &FinFunction, g: &FinFunction) -> Result<FinFunction, FinsetError> {
    if f.source != g.source {
        return Err(FinsetError::SourceMismatch("pairing needs a common source".into()));
    }
    let (carrier, _, _) = product(&f.target, &g.target);
    FinFunction::from_fn(&f.source, &carrier, |x| Value::pair(f.graph[x].clone(), g.graph[x].clone()))
}

/// `f x g: A x B -> A' x B'`.
pub fn product_map(f: &FinFunction, g: &FinFunction) -> FinFunction {
    let (src, _, _) = product(&f.source, &g.source);
    let (tgt, _, _) = product(&f.target, &g.target);
    FinFunction::from_fn(&src, &tgt, |p| {
        let (x, y) = p.as_pair().unwrap();
        Value::pair(f.graph[x].clone(), g.graph[y].clone())
    })
    .unwrap()
}

pub fn power_set(a: &FinSet) -> FinSet {
    let n = a.len();
    assert!(n < 64, "power set of a set with {n} elements");
    FinSet::new((0u64..(1u64 << n)).map(|mask| {
        Value::set(
            a.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, v)| v.clone()),
        )
    }))
}

/// Direct image `P(f): P(A) -> P(B)`.
pub fn power_map(f: &FinFunction) -> FinFunction {
    let src = power_set(&f.source);
    let tgt = power_set(&f.target);
    FinFunction::from_fn(&src, &tgt, |s| {
        Value::set(s.as_set().unwrap().iter().map(|x| f.graph[x].clone()))
    })
    .unwrap()
}

/// All function graphs `a -> b`.
pub fn hom_set(a: &FinSet, b: &FinSet) -> FinSet {
    FinSet::new(all_functions(a, b).map(|f| f.to_value()))
}

/// The exponential `B^A`; its elements are the function values of `hom_set`.
pub fn exponent(a: &FinSet, b: &FinSet) -> FinSet {
    hom_set(a, b)
}

/// `eval: B^A x A -> B`.
pub fn evaluation(a: &FinSet, b: &FinSet) -> FinFunction {
    let (carrier, _, _) = product(&exponent(a, b), a);
    FinFunction::from_fn(&carrier, b, |p| {
        let (g, x) = p.as_pair().unwrap();
        match g {
            Value::Fn(g) => g[x].clone(),
            _ => unreachable!("exponent elements are function values"),
        }
    })
    .unwrap()
}

/// `curry(f): C -> B^A` for `f: C x A -> B`.
pub fn curry(f: &FinFunction, c: &FinSet, a: &FinSet, b: &FinSet) -> Result<FinFunction, FinsetError> {
    curry_in(f, c, a, b, &exponent(a, b))
}

/// `curry` with the exponential `B^A` already built.
pub fn curry_in(f: &FinFunction, c: &FinSet, a: &FinSet, b: &FinSet, exp: &FinSet) -> Result<FinFunction, FinsetError> {
    if f.source.len() != c.len() * a.len() || !c.iter().all(|z| a.iter().all(|x| f.graph.contains_key(&Value::pair(z.clone(), x.clone())))) {
        return Err(FinsetError::SourceMismatch("curry expects a map out of C x A".into()));
    }
    if &f.target != b {
        return Err(FinsetError::SourceMismatch("curry expects a map into B".into()));
    }
    FinFunction::from_fn(c, exp, |z| {
        Value::func(
            a.iter()
                .map(|x| (x.clone(), f.graph[&Value::pair(z.clone(), x.clone())].clone()))
                .collect(),
        )
    })
}

/// Inverse of `curry`: `g: C -> B^A` becomes `C x A -> B`.
pub fn uncurry(g: &FinFunction, a: &FinSet, b: &FinSet) -> Result<FinFunction, FinsetError> {
    uncurry_in(g, a, b, &exponent(a, b))
}

/// `uncurry` with the exponential `B^A` already built.
pub fn uncurry_in(g: &FinFunction, a: &FinSet, b: &FinSet, exp: &FinSet) -> Result<FinFunction, FinsetError> {
    if &g.target != exp {
        return Err(FinsetError::SourceMismatch("uncurry expects a map into B^A".into()));
    }
    let (ca, _, _) = product(&g.source, a);
    FinFunction::from_fn(&ca, b, |p| {
        let (z, x) = p.as_pair().unwrap();
        match &g.graph[z] {
            Value::Fn(h) => h[x].clone(),
            _ => unreachable!("exponent elements are function values"),
        }
    })
}

/// `B^h: B^A -> B^A'` for `h: A' -> A`, by precomposition.
pub fn exp_precompose(h: &FinFunction, b: &FinSet) -> FinFunction {
    let src = exponent(&h.target, b);
    let tgt = exponent(&h.source, b);
    FinFunction::from_fn(&src, &tgt, |g| match g {
        Value::Fn(g) => Value::func(h.graph.iter().map(|(x, y)| (x.clone(), g[y].clone())).collect()),
        _ => unreachable!(),
    })
    .unwrap()
}

/// Checks that `(p, p0, p1)` is a pullback of `f: X -> Z <- Y: g` against
/// every cone with apex of size at most `max_apex`.
pub fn check_pullback(
    p0: &FinFunction,
    p1: &FinFunction,
    f: &FinFunction,
    g: &FinFunction,
    max_apex: usize,
    cap: u128,
) -> Result<bool, FinsetError> {
    if p0.source != p1.source || p0.target != f.source || p1.target != g.source || f.target != g.target {
        return Err(FinsetError::NotComposable);
    }
    if compose(p0, f)? != compose(p1, g)? {
        return Ok(false);
    }
    let apex_set = &p0.source;
    for n in 0..=max_apex {
        let t = FinSet::range(n);
        for a in all_functions_capped(&t, &f.source, cap)? {
            let af = compose(&a, f)?;
            for b in all_functions_capped(&t, &g.source, cap)? {
                if af != compose(&b, g)? {
                    continue;
                }
                let mut mediators = 0;
                for u in all_functions_capped(&t, apex_set, cap)? {
                    if compose(&u, p0)? == a && compose(&u, p1)? == b {
                        mediators += 1;
                    }
                }
                if mediators != 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(n: usize) -> FinSet {
        FinSet::range(n)
    }

    #[test]
    fn finset_dedups_and_sorts() {
        let s = FinSet::of_atoms(["b", "a", "b"]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.elements()[0], Value::atom("a"));
    }

    #[test]
    fn totality_is_enforced() {
        let a = set(2);
        assert!(matches!(
            FinFunction::from_pairs(&a, &a, &[("0", "1")]),
            Err(FinsetError::NotTotal(_))
        ));
        assert!(matches!(
            FinFunction::from_pairs(&a, &set(1), &[("0", "0"), ("1", "1")]),
            Err(FinsetError::OutOfTarget(_))
        ));
        assert!(matches!(
            FinFunction::from_pairs(&set(1), &a, &[("0", "0"), ("1", "1")]),
            Err(FinsetError::ExtraneousKey(_))
        ));
    }

    #[test]
    fn swap_twice_is_identity() {
        let a = set(2);
        let swap = FinFunction::from_pairs(&a, &a, &[("0", "1"), ("1", "0")]).unwrap();
        assert_eq!(compose(&swap, &swap).unwrap(), FinFunction::identity(&a));
    }

    #[test]
    fn compose_checks_endpoints() {
        let f = FinFunction::identity(&set(2));
        let g = FinFunction::identity(&set(3));
        assert_eq!(compose(&f, &g), Err(FinsetError::NotComposable));
    }

    #[test]
    fn composition_laws_exhaustive() {
        for n in 0..=2 {
            for m in 0..=2 {
                let (a, b) = (set(n), set(m));
                for f in all_functions(&a, &b) {
                    assert_eq!(compose(&f, &FinFunction::identity(&b)).unwrap(), f);
                    assert_eq!(compose(&FinFunction::identity(&a), &f).unwrap(), f);
                    for g in all_functions(&b, &a) {
                        for h in all_functions(&a, &b) {
                            let l = compose(&compose(&f, &g).unwrap(), &h).unwrap();
                            let r = compose(&f, &compose(&g, &h).unwrap()).unwrap();
                            assert_eq!(l, r);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        for n in 0..=3 {
            for m in 0..=3 {
                let all: Vec<_> = all_functions(&set(n), &set(m)).collect();
                assert_eq!(all.len() as u128, function_count(n, m).unwrap());
                assert!(all.windows(2).all(|w| w[0].to_value() < w[1].to_value()));
            }
        }
        assert!(matches!(
            all_functions_capped(&set(5), &set(5), 100),
            Err(FinsetError::CapExceeded { needed: 3125, cap: 100 })
        ));
    }

    #[test]
    fn special_objects() {
        assert_eq!(initial().len(), 0);
        assert_eq!(terminal().len(), 1);
        assert_eq!(omega().len(), 2);
        for n in 0..=3 {
            let a = set(n);
            assert!(from_initial(&a).graph().is_empty());
            assert_eq!(all_functions(&a, &terminal()).count(), 1);
            assert_eq!(all_functions(&a, &terminal()).next().unwrap(), bang(&a));
            assert_eq!(all_functions(&initial(), &a).count(), 1);
        }
    }

    #[test]
    fn product_carrier_and_terminal_unit() {
        let (c, p0, _) = product(&set(2), &set(3));
        assert_eq!(c.len(), 6);
        assert_eq!(p0.target(), &set(2));
        // A x 1 is isomorphic to A via the first projection
        let a = set(3);
        let (c, p0, _) = product(&a, &terminal());
        assert!(p0.is_bijective());
        let back = pairing(&FinFunction::identity(&a), &bang(&a)).unwrap();
        assert_eq!(compose(&back, &p0).unwrap(), FinFunction::identity(&a));
        assert_eq!(compose(&p0, &back).unwrap(), FinFunction::identity(&c));
    }

    #[test]
    fn pairing_projects_back() {
        let t = set(2);
        for f in all_functions(&t, &set(2)) {
            for g in all_functions(&t, &set(3)) {
                let (_, p0, p1) = product(f.target(), g.target());
                let fg = pairing(&f, &g).unwrap();
                assert_eq!(compose(&fg, &p0).unwrap(), f);
                assert_eq!(compose(&fg, &p1).unwrap(), g);
            }
        }
    }

    #[test]
    fn power_set_sizes() {
        for (n, expect) in [(0, 1), (1, 2), (2, 4), (3, 8)] {
            assert_eq!(power_set(&set(n)).len(), expect);
        }
    }

    #[test]
    fn power_map_is_functorial() {
        for n in 0..=2 {
            for m in 0..=2 {
                assert_eq!(power_map(&FinFunction::identity(&set(n))), FinFunction::identity(&power_set(&set(n))));
                for f in all_functions(&set(n), &set(m)) {
                    for g in all_functions(&set(m), &set(n)) {
                        let fg = compose(&f, &g).unwrap();
                        assert_eq!(power_map(&fg), compose(&power_map(&f), &power_map(&g)).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn exponent_and_hom_sizes() {
        for n in 0..=3 {
            for m in 0..=3 {
                let e = exponent(&set(n), &set(m));
                assert_eq!(e.len() as u128, function_count(n, m).unwrap());
                assert_eq!(hom_set(&set(n), &set(m)).len(), e.len());
            }
        }
        assert_eq!(hom_set(&initial(), &set(2)).len(), 1);
        assert!(hom_set(&set(2), &initial()).is_empty());
    }

    #[test]
    fn exponential_law_and_hom_counts() {
        let (c, a, b) = (set(2), set(2), set(2));
        let (ca, _, p1) = product(&c, &a);
        assert_eq!(hom_set(&ca, &b).len(), 16);
        assert_eq!(hom_set(&c, &exponent(&a, &b)).len(), 16);
        let ev = evaluation(&a, &b);
        for f in all_functions(&ca, &b) {
            let cf = curry(&f, &c, &a, &b).unwrap();
            let lhs = compose(&product_map(&cf, &FinFunction::identity(&a)), &ev).unwrap();
            assert_eq!(lhs, f);
            assert_eq!(uncurry(&cf, &a, &b).unwrap(), f);
        }
        // currying the second projection gives the constant identity family
        let cp = curry(&p1, &c, &a, &a).unwrap();
        let id = FinFunction::identity(&a).to_value();
        assert!(cp.graph().values().all(|v| *v == id));
        assert!(matches!(
            curry(&p1, &a, &set(3), &a),
            Err(FinsetError::SourceMismatch(_))
        ));
    }

    #[test]
    fn product_is_a_pullback_over_terminal() {
        let (a, b) = (set(2), set(2));
        let (_, p0, p1) = product(&a, &b);
        assert!(check_pullback(&p0, &p1, &bang(&a), &bang(&b), 2, DEFAULT_ENUMERATION_CAP).unwrap());
        // a non-universal square: A with the diagonal legs
        let id = FinFunction::identity(&a);
        assert!(!check_pullback(&id, &id, &bang(&a), &bang(&a), 2, DEFAULT_ENUMERATION_CAP).unwrap());
    }

    proptest! {
        #[test]
        fn tuples_right_associate(items in prop::collection::vec("[a-c]", 2..5)) {
            let vals: Vec<Value> = items.iter().map(Value::atom).collect();
            let t = Value::tuple(vals.clone());
            let (first, rest) = t.as_pair().unwrap();
            prop_assert_eq!(first, &vals[0]);
            if vals.len() > 2 {
                prop_assert_eq!(rest.clone(), Value::tuple(vals[1..].to_vec()));
            }
        }

        #[test]
        fn compose_is_associative(
            f in prop::collection::vec(0usize..4, 4),
            g in prop::collection::vec(0usize..4, 4),
            h in prop::collection::vec(0usize..4, 4),
        ) {
            let a = set(4);
            let mk = |d: &Vec<usize>| FinFunction::new(
                a.clone(), a.clone(),
                a.iter().cloned().zip(d.iter().map(|i| a.elements()[*i].clone())).collect(),
            ).unwrap();
            let (f, g, h) = (mk(&f), mk(&g), mk(&h));
            prop_assert_eq!(
                compose(&compose(&f, &g).unwrap(), &h).unwrap(),
                compose(&f, &compose(&g, &h).unwrap()).unwrap()
            );
        }
    }
}
