//! Evaluation of IFF sentences over finite interpretations, and exhaustive
//! verification of the diagonal theorems.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::finset::{
    ensure_within, function_count, FinFunction, FinPredicate, FinRelation, FinSet, FinsetError, Value,
};
use crate::names::{resolve, NamespaceContext};
use crate::syntax::{print_canonical, ConnectiveOp, Expr, QuantKind, Site, SourceUnit};

pub mod cantor;
pub mod interp_format;

pub use cantor::{
    fixed_points, has_fpp, verify_cantor, verify_fpp_transfer, CantorReport, FppReport, FppTransferReport,
};
pub use interp_format::{parse_interpretation, write_interpretation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unbound name `{0}`")]
    UnboundName(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("`{0}` does not denote a function")]
    NotAFunction(String),
    #[error("`{0}` does not denote a set, predicate or relation")]
    NotAPredicate(String),
    #[error("{arg} is outside the domain of `{function}`")]
    OutOfDomain { function: String, arg: Value },
    #[error("sort `{0}` does not denote anything enumerable")]
    SortNotFinite(String),
    #[error("`{0}` is not a formula")]
    NotAFormula(String),
    #[error("not an endofunction")]
    NotEndofunction,
    #[error("enumeration of {needed} candidates exceeds the cap of {cap}")]
    SizeCapExceeded { needed: u128, cap: u128 },
    #[error("`{0}` is bound twice")]
    DuplicateBinding(String),
    #[error("{line}:{column}: {message}")]
    Format { line: u32, column: u32, message: String },
    #[error(transparent)]
    Finset(FinsetError),
    #[error("{site} [{}]: {source}", site.namespace)]
    At { site: Site, source: Box<ModelError> },
}

impl From<FinsetError> for ModelError {
    fn from(e: FinsetError) -> Self {
        match e {
            FinsetError::CapExceeded { needed, cap } => ModelError::SizeCapExceeded { needed, cap },
            other => ModelError::Finset(other),
        }
    }
}

pub(crate) fn cap_check(needed: Option<u128>, cap: u128) -> Result<(), ModelError> {
    ensure_within(needed, cap).map_err(ModelError::from)
}

pub(crate) fn count(a: usize, b: usize) -> Option<u128> {
    function_count(a, b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Denotation {
    Set(FinSet),
    Function(FinFunction),
    Predicate(FinPredicate),
    Relation(FinRelation),
    Individual(Value),
}

impl Denotation {
    /// The denotation as a first-class value. Function graphs become sets of
    /// pairs so that they can be written in interpretation files.
    pub fn to_value(&self) -> Value {
        match self {
            Denotation::Set(s) => s.to_value(),
            Denotation::Function(f) => graph_value(f),
            Denotation::Predicate(p) => p.extent().to_value(),
            Denotation::Relation(r) => r.extent().to_value(),
            Denotation::Individual(v) => v.clone(),
        }
    }

    /// The elements a quantifier over this sort ranges across.
    fn domain(&self) -> Option<Vec<Value>> {
        match self {
            Denotation::Set(s) => Some(s.elements().to_vec()),
            Denotation::Predicate(p) => Some(p.extent().elements().to_vec()),
            Denotation::Relation(r) => Some(r.extent().elements().to_vec()),
            Denotation::Individual(v) => value_members(v),
            Denotation::Function(_) => None,
        }
    }
}

pub fn graph_value(f: &FinFunction) -> Value {
    Value::set(f.graph().iter().map(|(x, y)| Value::pair(x.clone(), y.clone())))
}

fn value_members(v: &Value) -> Option<Vec<Value>> {
    v.as_set().map(|s| s.iter().cloned().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Interpretation {
    bindings: BTreeMap<String, Denotation>,
}

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, d: Denotation) -> Result<(), ModelError> {
        let name = name.into();
        if self.bindings.contains_key(&name) {
            return Err(ModelError::DuplicateBinding(name));
        }
        self.bindings.insert(name, d);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Denotation> {
        self.bindings.get(name)
    }

    pub fn bindings(&self) -> &BTreeMap<String, Denotation> {
        &self.bindings
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

pub type Valuation = BTreeMap<String, Value>;

/// Evaluates against an interpretation, resolving names in an optional
/// namespace context before falling back to their raw spelling.
pub struct Evaluator<'a> {
    pub interp: &'a Interpretation,
    pub ctx: Option<&'a NamespaceContext>,
}

impl<'a> Evaluator<'a> {
    pub fn new(interp: &'a Interpretation) -> Self {
        Evaluator { interp, ctx: None }
    }

    pub fn in_namespace(interp: &'a Interpretation, ctx: &'a NamespaceContext) -> Self {
        Evaluator { interp, ctx: Some(ctx) }
    }

    fn lookup(&self, name: &str) -> Option<&'a Denotation> {
        if let Some(ctx) = self.ctx {
            if let Ok(q) = resolve(name, ctx) {
                if let Some(d) = self.interp.get(&q.render()) {
                    return Some(d);
                }
            }
        }
        self.interp.get(name)
    }

    fn base_of(name: &str) -> &str {
        name.rsplit([':', '.']).next().unwrap_or(name)
    }

    pub fn eval_term(&self, t: &Expr, v: &Valuation) -> Result<Value, ModelError> {
        match t {
            Expr::Name(n) => self
                .lookup(n)
                .map(Denotation::to_value)
                .ok_or_else(|| ModelError::UnboundName(n.clone())),
            Expr::Variable(x) => v.get(x).cloned().ok_or_else(|| ModelError::UnboundVariable(x.clone())),
            Expr::Tuple(items) => Ok(Value::tuple(
                items.iter().map(|i| self.eval_term(i, v)).collect::<Result<_, _>>()?,
            )),
            Expr::Apply { head, args } => {
                let arg = if args.len() == 1 {
                    self.eval_term(&args[0], v)?
                } else {
                    Value::tuple(args.iter().map(|a| self.eval_term(a, v)).collect::<Result<_, _>>()?)
                };
                self.apply(head, arg, args, v)
            }
            other => Err(ModelError::NotAFunction(print_canonical(other))),
        }
    }

    fn apply(&self, head: &Expr, arg: Value, args: &[Expr], v: &Valuation) -> Result<Value, ModelError> {
        let label = print_canonical(head);
        if let Expr::Name(n) = head {
            match self.lookup(n) {
                Some(Denotation::Function(f)) => {
                    return f.apply(&arg).cloned().map_err(|_| ModelError::OutOfDomain { function: label, arg });
                }
                Some(d) => return apply_value(&d.to_value(), &arg, &label),
                None => {
                    // boundary maps of a function-denoting argument
                    let base = Self::base_of(n);
                    if let (true, [Expr::Name(a)]) = (base == "source" || base == "target", args) {
                        if let Some(Denotation::Function(f)) = self.lookup(a) {
                            let s = if base == "source" { f.source() } else { f.target() };
                            return Ok(s.to_value());
                        }
                    }
                    return Err(ModelError::UnboundName(n.clone()));
                }
            }
        }
        let hv = self.eval_term(head, v)?;
        apply_value(&hv, &arg, &label)
    }

    /// Membership of `x` in whatever `head` denotes.
    fn member(&self, head: &Expr, x: &Value, v: &Valuation) -> Result<bool, ModelError> {
        let label = print_canonical(head);
        let d = match head {
            Expr::Name(n) => match self.lookup(n) {
                Some(Denotation::Set(s)) => return Ok(s.contains(x)),
                Some(Denotation::Predicate(p)) => return Ok(p.holds_at(x)),
                Some(Denotation::Relation(r)) => return Ok(r.extent().contains(x)),
                Some(Denotation::Function(_)) => return Err(ModelError::NotAPredicate(label)),
                Some(Denotation::Individual(val)) => val.clone(),
                None => return Err(ModelError::UnboundName(n.clone())),
            },
            other => self.eval_term(other, v)?,
        };
        match d.as_set() {
            Some(s) => Ok(s.contains(x)),
            None => Err(ModelError::NotAPredicate(label)),
        }
    }

    fn sort_domain(&self, sort: &Expr, v: &Valuation) -> Result<Vec<Value>, ModelError> {
        let label = print_canonical(sort);
        let found = match sort {
            Expr::Name(n) => match self.lookup(n) {
                Some(d) => d.domain(),
                None => return Err(ModelError::UnboundName(n.clone())),
            },
            other => value_members(&self.eval_term(other, v)?),
        };
        found.ok_or(ModelError::SortNotFinite(label))
    }

    pub fn holds(&self, s: &Expr, v: &Valuation) -> Result<bool, ModelError> {
        match s {
            Expr::Apply { head, args } => {
                let x = if args.len() == 1 {
                    self.eval_term(&args[0], v)?
                } else {
                    Value::tuple(args.iter().map(|a| self.eval_term(a, v)).collect::<Result<_, _>>()?)
                };
                self.member(head, &x, v)
            }
            Expr::Equation(l, r) => Ok(self.eval_term(l, v)? == self.eval_term(r, v)?),
            Expr::Connective { op, args } => match op {
                ConnectiveOp::Not => Ok(!self.holds(&args[0], v)?),
                ConnectiveOp::And => {
                    for a in args {
                        if !self.holds(a, v)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
                ConnectiveOp::Or => {
                    for a in args {
                        if self.holds(a, v)? {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                }
                ConnectiveOp::Implies => Ok(!self.holds(&args[0], v)? || self.holds(&args[1], v)?),
                ConnectiveOp::Iff => Ok(self.holds(&args[0], v)? == self.holds(&args[1], v)?),
            },
            Expr::Quantifier { kind, bindings, body } => {
                let mut vals = v.clone();
                self.quantify(*kind, bindings, body, &mut vals)
            }
            Expr::Name(_) | Expr::Variable(_) => {
                let val = self.eval_term(s, v)?;
                match val.as_atom() {
                    Some("true") => Ok(true),
                    Some("false") => Ok(false),
                    _ => Err(ModelError::NotAFormula(print_canonical(s))),
                }
            }
            Expr::Tuple(_) => Err(ModelError::NotAFormula(print_canonical(s))),
        }
    }

    fn quantify(
        &self,
        kind: QuantKind,
        bindings: &[crate::syntax::Binding],
        body: &Expr,
        v: &mut Valuation,
    ) -> Result<bool, ModelError> {
        let Some((first, rest)) = bindings.split_first() else {
            return self.holds(body, v);
        };
        let sort = first
            .sort
            .as_ref()
            .ok_or_else(|| ModelError::SortNotFinite(first.variable.clone()))?;
        let domain = self.sort_domain(sort, v)?;
        let saved = v.get(&first.variable).cloned();
        let mut result = kind == QuantKind::Forall;
        for x in domain {
            v.insert(first.variable.clone(), x);
            let inner = self.quantify(kind, rest, body, v)?;
            if inner != result {
                result = inner;
                break;
            }
        }
        match saved {
            Some(old) => v.insert(first.variable.clone(), old),
            None => v.remove(&first.variable),
        };
        Ok(result)
    }

    /// The first falsifying valuation of a false sentence, following
    /// universal quantifiers and conjunctions in canonical element order.
    pub fn counterexample(&self, s: &Expr, v: &Valuation) -> Result<Valuation, ModelError> {
        match s {
            Expr::Quantifier {
                kind: QuantKind::Forall,
                bindings,
                body,
            } => {
                let mut vals = v.clone();
                match self.first_falsifier(bindings, body, &mut vals)? {
                    Some(found) => self.counterexample(body, &found),
                    None => Ok(v.clone()),
                }
            }
            Expr::Connective {
                op: ConnectiveOp::And,
                args,
            } => {
                for a in args {
                    if !self.holds(a, v)? {
                        return self.counterexample(a, v);
                    }
                }
                Ok(v.clone())
            }
            _ => Ok(v.clone()),
        }
    }

    fn first_falsifier(
        &self,
        bindings: &[crate::syntax::Binding],
        body: &Expr,
        v: &mut Valuation,
    ) -> Result<Option<Valuation>, ModelError> {
        let Some((first, rest)) = bindings.split_first() else {
            return Ok(if self.holds(body, v)? { None } else { Some(v.clone()) });
        };
        let sort = first
            .sort
            .as_ref()
            .ok_or_else(|| ModelError::SortNotFinite(first.variable.clone()))?;
        for x in self.sort_domain(sort, v)? {
            v.insert(first.variable.clone(), x);
            if let Some(found) = self.first_falsifier(rest, body, v)? {
                return Ok(Some(found));
            }
        }
        v.remove(&first.variable);
        Ok(None)
    }
}

fn apply_value(f: &Value, arg: &Value, label: &str) -> Result<Value, ModelError> {
    match f {
        Value::Fn(g) => g.get(arg).cloned().ok_or_else(|| ModelError::OutOfDomain {
            function: label.to_string(),
            arg: arg.clone(),
        }),
        Value::Set(pairs) if pairs.iter().all(|p| p.as_pair().is_some()) => pairs
            .iter()
            .filter_map(Value::as_pair)
            .find(|(x, _)| *x == arg)
            .map(|(_, y)| y.clone())
            .ok_or_else(|| ModelError::OutOfDomain {
                function: label.to_string(),
                arg: arg.clone(),
            }),
        _ => Err(ModelError::NotAFunction(label.to_string())),
    }
}

pub fn eval_term(t: &Expr, i: &Interpretation, v: &Valuation) -> Result<Value, ModelError> {
    Evaluator::new(i).eval_term(t, v)
}

pub fn holds(s: &Expr, i: &Interpretation, v: &Valuation) -> Result<bool, ModelError> {
    Evaluator::new(i).holds(s, v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomResult {
    pub site: Site,
    pub axiom: String,
    pub holds: bool,
    pub counterexample: Option<Valuation>,
}

impl fmt::Display for AxiomResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} [{}] {}",
            if self.holds { "TRUE " } else { "FALSE" },
            self.site,
            self.site.namespace,
            self.axiom
        )?;
        if let Some(cx) = &self.counterexample {
            if !cx.is_empty() {
                f.write_str("\n    counterexample:")?;
                for (k, v) in cx {
                    write!(f, " {k}={v}")?;
                }
            }
        }
        Ok(())
    }
}

/// Evaluates every axiom; false axioms carry their first counterexample.
pub fn check_theory(unit: &SourceUnit, i: &Interpretation) -> Result<Vec<AxiomResult>, ModelError> {
    let mut out = Vec::new();
    for ns in &unit.namespaces {
        let ctx = NamespaceContext::of_block(ns);
        let ev = Evaluator::in_namespace(i, &ctx);
        for ax in &ns.axioms {
            let site = unit.site(ns, ax);
            let wrap = |e: ModelError| ModelError::At {
                site: site.clone(),
                source: Box::new(e),
            };
            let empty = Valuation::new();
            let ok = ev.holds(&ax.expr, &empty).map_err(wrap)?;
            let counterexample = if ok {
                None
            } else {
                Some(ev.counterexample(&ax.expr, &empty).map_err(wrap)?)
            };
            out.push(AxiomResult {
                site,
                axiom: print_canonical(&ax.expr),
                holds: ok,
                counterexample,
            });
        }
    }
    Ok(out)
}

/// Names in `unit` with no binding in `i`, after resolution.
pub fn unbound_names(unit: &SourceUnit, i: &Interpretation) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for ns in &unit.namespaces {
        let ctx = NamespaceContext::of_block(ns);
        let ev = Evaluator::in_namespace(i, &ctx);
        for ax in &ns.axioms {
            ax.expr.for_each_name(&mut |n| {
                if ev.lookup(n).is_none() {
                    out.insert(n.to_string());
                }
            });
        }
    }
    out
}
