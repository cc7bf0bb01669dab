//! Static checks: atomic-form classification, restricted quantification,
//! level stratification and conceptual warrant.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::diagnostic::{sort_diagnostics, Diagnostic};
use crate::names::{
    as_declaration, build_symbol_table_all, level_leq, resolve, Level, NamesError, NamespaceContext,
    SymbolTable,
};
use crate::syntax::{ConnectiveOp, Expr, Site, SourceUnit};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FormClass {
    Declaration,
    EquationForm,
    RelationalExpr,
    NegatedAtomic,
    FirstOrder,
    Illformed(String),
}

impl FormClass {
    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            FormClass::Declaration | FormClass::EquationForm | FormClass::RelationalExpr
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            FormClass::Declaration => "declaration",
            FormClass::EquationForm => "equation",
            FormClass::RelationalExpr => "relational",
            FormClass::NegatedAtomic => "negated-atomic",
            FormClass::FirstOrder => "first-order",
            FormClass::Illformed(_) => "illformed",
        }
    }
}

impl fmt::Display for FormClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormClass::Illformed(r) => write!(f, "illformed ({r})"),
            other => f.write_str(other.label()),
        }
    }
}

fn has_variable_or_binder(e: &Expr) -> bool {
    match e {
        Expr::Name(_) => false,
        Expr::Variable(_) | Expr::Quantifier { .. } => true,
        Expr::Tuple(items) => items.iter().any(has_variable_or_binder),
        Expr::Apply { head, args } => has_variable_or_binder(head) || args.iter().any(has_variable_or_binder),
        Expr::Equation(l, r) => has_variable_or_binder(l) || has_variable_or_binder(r),
        Expr::Connective { args, .. } => args.iter().any(has_variable_or_binder),
    }
}

/// A name or a nested unary application; a tuple argument counts as one.
fn is_unary_term(e: &Expr) -> bool {
    match e {
        Expr::Name(_) => true,
        Expr::Apply { head, args } => {
            matches!(head.as_ref(), Expr::Name(_))
                && match args.as_slice() {
                    [Expr::Tuple(items)] => items.iter().all(is_unary_term),
                    [a] => is_unary_term(a),
                    _ => false,
                }
        }
        _ => false,
    }
}

pub fn classify_form(e: &Expr) -> FormClass {
    match e {
        Expr::Connective {
            op: ConnectiveOp::Not,
            args,
        } if args.len() == 1 && classify_form(&args[0]).is_atomic() => FormClass::NegatedAtomic,
        Expr::Connective { .. } | Expr::Quantifier { .. } | Expr::Variable(_) => FormClass::FirstOrder,
        _ if has_variable_or_binder(e) => FormClass::FirstOrder,
        Expr::Apply { head, args } => {
            if !matches!(head.as_ref(), Expr::Name(_)) {
                return FormClass::Illformed("compound head in an atomic formula".into());
            }
            match args.as_slice() {
                [Expr::Tuple(items)] if items.len() == 2 => FormClass::RelationalExpr,
                [Expr::Tuple(items)] => {
                    FormClass::Illformed(format!("declaration over a {}-tuple", items.len()))
                }
                [_] => FormClass::Declaration,
                [_, _] => FormClass::RelationalExpr,
                more => FormClass::Illformed(format!("atom with {} arguments", more.len())),
            }
        }
        Expr::Equation(l, r) => {
            if is_unary_term(l) && is_unary_term(r) {
                FormClass::EquationForm
            } else {
                FormClass::Illformed("equation term is not built from unary functions".into())
            }
        }
        Expr::Name(_) => FormClass::Illformed("a bare name is not a formula".into()),
        Expr::Tuple(_) => FormClass::Illformed("a tuple is not a formula".into()),
    }
}

// ---------------------------------------------------------------------------
// Restricted quantification

struct QuantChecker<'a> {
    site: &'a Site,
    scope: Vec<String>,
    /// Variables bound later in the binding list currently being read.
    pending: Vec<String>,
    reported: BTreeSet<String>,
    out: Vec<Diagnostic>,
}

impl QuantChecker<'_> {
    fn use_var(&mut self, v: &str) {
        if self.scope.iter().any(|s| s == v) || !self.reported.insert(v.to_string()) {
            return;
        }
        if self.pending.iter().any(|p| p == v) {
            self.out.push(Diagnostic::error(
                "USE-BEFORE-BINDING",
                self.site.clone(),
                format!("variable {v} is used in a sort before it is bound"),
            ));
        } else {
            self.out.push(Diagnostic::error(
                "FREE-VARIABLE",
                self.site.clone(),
                format!("variable {v} is not bound by any enclosing quantifier"),
            ));
        }
    }

    fn walk(&mut self, e: &Expr) {
        match e {
            Expr::Variable(v) => self.use_var(v),
            Expr::Name(_) => {}
            Expr::Tuple(items) => items.iter().for_each(|i| self.walk(i)),
            Expr::Apply { head, args } => {
                self.walk(head);
                args.iter().for_each(|a| self.walk(a));
            }
            Expr::Equation(l, r) => {
                self.walk(l);
                self.walk(r);
            }
            Expr::Connective { args, .. } => args.iter().for_each(|a| self.walk(a)),
            Expr::Quantifier { bindings, body, .. } => {
                let depth = self.scope.len();
                for (i, b) in bindings.iter().enumerate() {
                    match &b.sort {
                        None => self.out.push(Diagnostic::error(
                            "UNSORTED-BINDING",
                            self.site.clone(),
                            format!("binding of {} has no sort", b.variable),
                        )),
                        Some(sort) => {
                            let saved = self.pending.len();
                            self.pending.extend(bindings[i..].iter().map(|l| l.variable.clone()));
                            self.walk(sort);
                            self.pending.truncate(saved);
                        }
                    }
                    self.scope.push(b.variable.clone());
                }
                self.walk(body);
                self.scope.truncate(depth);
            }
        }
    }
}

/// Restricted-quantification diagnostics for one axiom, at `site`.
pub fn check_restricted_quantifiers_at(e: &Expr, site: &Site) -> Vec<Diagnostic> {
    let mut c = QuantChecker {
        site,
        scope: Vec::new(),
        pending: Vec::new(),
        reported: BTreeSet::new(),
        out: Vec::new(),
    };
    c.walk(e);
    c.out
}

pub fn check_restricted_quantifiers(e: &Expr) -> Vec<Diagnostic> {
    check_restricted_quantifiers_at(e, &Site::default())
}

// ---------------------------------------------------------------------------
// Stratification

fn compare_reference(ctx: &NamespaceContext, text: &str, site: &Site, out: &mut Vec<Diagnostic>) {
    let name = match resolve(text, ctx) {
        Ok(n) => n,
        Err(e) => {
            out.push(Diagnostic::error("MALFORMED-NAME", site.clone(), e.to_string()));
            return;
        }
    };
    match level_leq(ctx.level, name.level()) {
        Ok(true) => {}
        Ok(false) => out.push(Diagnostic::error(
            "LEVEL-DOWNREF",
            site.clone(),
            format!(
                "{} references {} at the more concrete level {}",
                ctx.level,
                name.render(),
                name.level()
            ),
        )),
        Err(_) => out.push(Diagnostic::warning(
            "LEVEL-INCOMPARABLE",
            site.clone(),
            format!(
                "{} and the level of {} are not comparable without fixing n",
                ctx.level,
                name.render()
            ),
        )),
    }
}

/// Level discipline: no reference to a more concrete level, classifiers
/// strictly above their subjects, namespace prefixes matching declarations.
pub fn check_stratification(unit: &SourceUnit, _table: &SymbolTable) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for ns in &unit.namespaces {
        let ctx = NamespaceContext::of_block(ns);
        if let Some(prefix) = ctx.mismatch {
            out.push(Diagnostic::error(
                "LEVEL-MISMATCH",
                Site::new(unit.file.clone(), ns.line, ns.column, ns.name.clone()),
                format!(
                    "namespace {} is declared at level {} but its prefix names level {}",
                    ns.name, ns.level, prefix
                ),
            ));
        }
        for ax in &ns.axioms {
            let site = unit.site(ns, ax);
            let mut names = Vec::new();
            ax.expr.for_each_name(&mut |n| names.push(n));
            let mut seen = BTreeSet::new();
            for n in names {
                if seen.insert(n) {
                    compare_reference(&ctx, n, &site, &mut out);
                }
            }
            if let Some((c, s)) = as_declaration(&ax.expr) {
                let (Ok(c), Ok(s)) = (resolve(c, &ctx), resolve(s, &ctx)) else {
                    continue;
                };
                if ctx.level == Level::Obj && c.level() == Level::Obj {
                    out.push(Diagnostic::error(
                        "OBJ-CLASSIFIER",
                        site.clone(),
                        format!("object-level namespace uses its own classifier {}", c.render()),
                    ));
                } else if c.level() == s.level() {
                    out.push(Diagnostic::warning(
                        "SAME-LEVEL-CLASSIFIER",
                        site.clone(),
                        format!(
                            "classifier {} is at the same level as its subject {}",
                            c.render(),
                            s.render()
                        ),
                    ));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Warrant

/// One diagnostic per defined non-object name: WARRANT-OK with the witnessing
/// site, or UNWARRANTED-TERM when no lower-level or peripheral reference exists.
pub fn warrant_report(_units: &[SourceUnit], table: &SymbolTable) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (key, entry) in &table.entries {
        if entry.level() == Level::Obj {
            continue;
        }
        let Some(home) = table.namespaces.get(&entry.namespace) else {
            continue;
        };
        let witness = entry.references.iter().find(|r| {
            let lower = matches!(level_leq(r.from_level, r.instance_level), Ok(true))
                && r.from_level != r.instance_level;
            let peripheral = table
                .namespaces
                .get(&r.site.namespace)
                .map(|c| !home.contains(c))
                .unwrap_or(false);
            lower || peripheral
        });
        let site = entry.definitions.first().cloned().unwrap_or_default();
        out.push(match witness {
            Some(r) => Diagnostic::info(
                "WARRANT-OK",
                site,
                format!("{key} is warranted by a reference at {} [{}]", r.site, r.site.namespace),
            ),
            None => Diagnostic::warning(
                "UNWARRANTED-TERM",
                site,
                format!("{key} is never used from a lower level or a peripheral namespace"),
            ),
        });
    }
    out
}

// ---------------------------------------------------------------------------
// Profiles and the full pipeline

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FormProfile {
    pub declaration: usize,
    pub equation: usize,
    pub relational: usize,
    pub negated_atomic: usize,
    pub first_order: usize,
    pub illformed: usize,
}

impl FormProfile {
    pub fn add(&mut self, c: &FormClass) {
        match c {
            FormClass::Declaration => self.declaration += 1,
            FormClass::EquationForm => self.equation += 1,
            FormClass::RelationalExpr => self.relational += 1,
            FormClass::NegatedAtomic => self.negated_atomic += 1,
            FormClass::FirstOrder => self.first_order += 1,
            FormClass::Illformed(_) => self.illformed += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.declaration + self.equation + self.relational + self.negated_atomic + self.first_order + self.illformed
    }

    /// Every axiom is atomic or a single negated atom.
    pub fn is_atomic(&self) -> bool {
        self.first_order == 0 && self.illformed == 0
    }
}

/// Form counts per namespace, in source order.
pub fn atomicity_profile(unit: &SourceUnit) -> Vec<(String, FormProfile)> {
    unit.namespaces
        .iter()
        .map(|ns| {
            let mut p = FormProfile::default();
            for ax in &ns.axioms {
                p.add(&classify_form(&ax.expr));
            }
            (ns.name.clone(), p)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CheckOptions {
    /// Negated atoms and first-order axioms in the natural part are errors.
    pub strict_atomic: bool,
    /// Report WARRANT-OK and treat UNWARRANTED-TERM as an error.
    pub warrant: bool,
}

fn form_diagnostics(unit: &SourceUnit, opts: &CheckOptions, out: &mut Vec<Diagnostic>) {
    for ns in &unit.namespaces {
        for ax in &ns.axioms {
            let site = unit.site(ns, ax);
            let class = classify_form(&ax.expr);
            match &class {
                FormClass::Illformed(reason) => {
                    out.push(Diagnostic::error("ILLFORMED-AXIOM", site, reason.clone()));
                }
                FormClass::FirstOrder if ns.level.is_natural() => {
                    let msg = format!("natural-part axiom is {class}");
                    out.push(if opts.strict_atomic {
                        Diagnostic::error("NOT-ATOMIC", site, msg)
                    } else {
                        Diagnostic::warning("NOT-ATOMIC", site, msg)
                    });
                }
                FormClass::NegatedAtomic if ns.level.is_natural() && opts.strict_atomic => {
                    out.push(Diagnostic::error("NOT-ATOMIC", site, "natural-part axiom is a negation"));
                }
                _ => {}
            }
        }
    }
}

/// Runs every check over the given units and returns sorted diagnostics.
pub fn check_units(units: &[SourceUnit], opts: &CheckOptions) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for unit in units {
        for ns in &unit.namespaces {
            for ax in &ns.axioms {
                out.extend(check_restricted_quantifiers_at(&ax.expr, &unit.site(ns, ax)));
            }
        }
        form_diagnostics(unit, opts, &mut out);
    }
    match build_symbol_table_all(units) {
        Ok(table) => {
            for unit in units {
                out.extend(check_stratification(unit, &table));
            }
            for k in &table.kind_conflicts {
                out.push(Diagnostic::warning(
                    "KIND-CONFLICT",
                    k.site.clone(),
                    format!(
                        "{} is used as a {} but was already a {}",
                        k.name,
                        k.second.as_str(),
                        k.first.as_str()
                    ),
                ));
            }
            for d in warrant_report(units, &table) {
                match d.code {
                    "WARRANT-OK" if !opts.warrant => {}
                    "UNWARRANTED-TERM" if opts.warrant => {
                        out.push(Diagnostic::error(d.code, d.site, d.message));
                    }
                    _ => out.push(d),
                }
            }
        }
        Err(NamesError::DuplicateDefinition { name, first, second, site }) => {
            out.push(Diagnostic::error(
                "DUPLICATE-DEFINITION",
                site,
                format!("{name} is defined in both {first} and {second}"),
            ));
            for unit in units {
                out.extend(check_stratification(unit, &SymbolTable::default()));
            }
        }
        Err(other) => out.push(Diagnostic::error("MALFORMED-NAME", Site::default(), other.to_string())),
    }
    sort_diagnostics(&mut out);
    out
}

pub fn check_unit(unit: &SourceUnit, opts: &CheckOptions) -> Vec<Diagnostic> {
    check_units(std::slice::from_ref(unit), opts)
}

/// Counts diagnostics by code.
pub fn code_counts(diags: &[Diagnostic]) -> BTreeMap<&'static str, usize> {
    let mut m = BTreeMap::new();
    for d in diags {
        *m.entry(d.code).or_insert(0) += 1;
    }
    m
}
