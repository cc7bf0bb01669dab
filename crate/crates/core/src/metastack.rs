//! Desk-scale simulation of the stratified set hierarchy.
//!
//! Level `k` holds `set_k`: every set value of cardinality at most the
//! breadth cap whose members are atoms or level `k - 1` sets. Levels are
//! described intensionally; a level's members are enumerated only when its
//! size stays within the universe bound.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::diagnostic::Diagnostic;
use crate::finset::{
    all_functions, FinFunction, FinPredicate, FinRelation, FinSet, FinsetError, Value,
};
use crate::syntax::Site;

/// Largest level collection that is enumerated explicitly.
pub const DEFAULT_LEVEL_BOUND: u128 = 1 << 16;

/// Largest number of instances one analog row scans before it reports
/// TRUNCATED.
pub const SCAN_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetastackError {
    #[error("invalid universe configuration: {0}")]
    InvalidConfig(String),
    #[error("level {level} is outside 1..={depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("{0} is not a family of sets")]
    NotAFamily(String),
    #[error("{0} is not a level set of level sets")]
    NotInPTilde(String),
    #[error("cannot compare a {left} with a {right}")]
    KindMismatch { left: &'static str, right: &'static str },
    #[error("needs {needed} values, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error(transparent)]
    Finset(#[from] FinsetError),
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n);
    let mut c: u128 = 1;
    for i in 0..k {
        c = match c.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    c
}

/// Number of subsets of an `n`-set with at most `b` members, saturating.
fn bounded_subsets(n: u128, b: usize) -> u128 {
    let mut total: u128 = 0;
    for i in 0..=(b as u128).min(n) {
        total = total.saturating_add(binomial(n, i));
        if total == u128::MAX {
            break;
        }
    }
    total
}

/// All subsets of `ground` with at most `b` members, in canonical order.
fn subsets_up_to(ground: &[Value], b: usize) -> FinSet {
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn go(ground: &[Value], start: usize, b: usize, pick: &mut Vec<Value>, out: &mut Vec<Value>) {
        out.push(Value::set(pick.iter().cloned()));
        if pick.len() == b {
            return;
        }
        for i in start..ground.len() {
            pick.push(ground[i].clone());
            go(ground, i + 1, b, pick, out);
            pick.pop();
        }
    }
    go(ground, 0, b, &mut pick, &mut out);
    FinSet::new(out)
}

fn atom_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("a{i}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub level: usize,
    /// `|atoms| + |set_{k-1}|`, saturating.
    pub ground: u128,
    /// `|set_k|`, saturating.
    pub count: u128,
    members: Option<FinSet>,
}

impl Stratum {
    pub fn members(&self) -> Option<&FinSet> {
        self.members.as_ref()
    }

    pub fn is_enumerated(&self) -> bool {
        self.members.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratifiedUniverse {
    atoms: FinSet,
    breadth: usize,
    bound: u128,
    levels: Vec<Stratum>,
}

pub fn build_universe(atoms: usize, depth: usize, breadth: usize) -> Result<StratifiedUniverse, MetastackError> {
    StratifiedUniverse::build(atoms, depth, breadth, DEFAULT_LEVEL_BOUND)
}

impl StratifiedUniverse {
    pub fn build(atoms: usize, depth: usize, breadth: usize, bound: u128) -> Result<Self, MetastackError> {
        if atoms == 0 || depth == 0 {
            return Err(MetastackError::InvalidConfig(format!(
                "atoms and depth must be positive (atoms={atoms}, depth={depth})"
            )));
        }
        let atoms = FinSet::of_atoms((0..atoms).map(atom_name));
        let mut levels: Vec<Stratum> = Vec::with_capacity(depth);
        for level in 1..=depth {
            let below = levels.last();
            let ground = match below {
                None => atoms.len() as u128,
                Some(s) => (atoms.len() as u128).saturating_add(s.count),
            };
            let count = bounded_subsets(ground, breadth);
            let members = match below {
                _ if count > bound => None,
                None => Some(subsets_up_to(atoms.elements(), breadth)),
                Some(Stratum { members: Some(m), .. }) => {
                    let g: Vec<Value> = atoms.union(m).elements().to_vec();
                    Some(subsets_up_to(&g, breadth))
                }
                Some(_) => None,
            };
            levels.push(Stratum {
                level,
                ground,
                count,
                members,
            });
        }
        Ok(StratifiedUniverse {
            atoms,
            breadth,
            bound,
            levels,
        })
    }

    pub fn atoms(&self) -> &FinSet {
        &self.atoms
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn breadth(&self) -> usize {
        self.breadth
    }

    pub fn bound(&self) -> u128 {
        self.bound
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.levels
    }

    pub fn stratum(&self, k: usize) -> Result<&Stratum, MetastackError> {
        if k == 0 || k > self.depth() {
            return Err(MetastackError::LevelOutOfRange {
                level: k,
                depth: self.depth(),
            });
        }
        Ok(&self.levels[k - 1])
    }

    /// Explicit members of `set_k` when enumerated.
    pub fn members(&self, k: usize) -> Result<Option<&FinSet>, MetastackError> {
        Ok(self.stratum(k)?.members())
    }

    /// `v ∈ set_k`, decided from the definition for any `k`, including
    /// levels past the built depth.
    pub fn in_level(&self, k: usize, v: &Value) -> bool {
        if k == 0 {
            return false;
        }
        match v.as_set() {
            Some(s) if s.len() <= self.breadth => s
                .iter()
                .all(|m| self.atoms.contains(m) || (m.as_set().is_some() && self.in_level(k - 1, m))),
            _ => false,
        }
    }

    /// The set value of the whole collection `set_k`.
    pub fn level_value(&self, k: usize) -> Result<Option<Value>, MetastackError> {
        Ok(self.members(k)?.map(FinSet::to_value))
    }
}

/// `univ_k`: everything that occurs in some level `k` set.
pub fn universe(u: &StratifiedUniverse, k: usize) -> Result<FinSet, MetastackError> {
    let s = u.stratum(k)?;
    if let Some(m) = s.members() {
        let mut all = Vec::new();
        for x in m.iter() {
            all.extend(x.as_set().into_iter().flatten().cloned());
        }
        return Ok(FinSet::new(all));
    }
    if u.breadth == 0 {
        return Ok(FinSet::empty());
    }
    // with breadth ≥ 1 every ground element sits in its own singleton
    if k == 1 {
        return Ok(u.atoms.clone());
    }
    match u.members(k - 1)? {
        Some(below) => Ok(u.atoms.union(below)),
        None => Err(MetastackError::CapExceeded {
            needed: s.ground,
            cap: u.bound,
        }),
    }
}

fn family(z: &Value) -> Result<Vec<&std::collections::BTreeSet<Value>>, MetastackError> {
    let outer = z.as_set().ok_or_else(|| MetastackError::NotAFamily(z.to_string()))?;
    outer
        .iter()
        .map(|y| y.as_set().ok_or_else(|| MetastackError::NotAFamily(z.to_string())))
        .collect()
}

/// `{x ∈ X | x ∈ Y ∈ Z for some Y}`.
pub fn bounded_union(x: &FinSet, z: &Value) -> Result<Value, MetastackError> {
    let fam = family(z)?;
    Ok(Value::set(
        x.iter().filter(|v| fam.iter().any(|y| y.contains(*v))).cloned(),
    ))
}

/// `{x | x ∈ Y ∈ Z for some Y}` for `Z` a collection of level `k` sets.
pub fn unbounded_union(z: &Value, u: &StratifiedUniverse, k: usize) -> Result<Value, MetastackError> {
    u.stratum(k)?;
    let outer = z.as_set().ok_or_else(|| MetastackError::NotInPTilde(z.to_string()))?;
    if let Some(bad) = outer.iter().find(|y| !u.in_level(k, y)) {
        return Err(MetastackError::NotInPTilde(format!("{z} (member {bad})")));
    }
    Ok(Value::set(family(z)?.into_iter().flatten().cloned()))
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Truncated,
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Truncated => "TRUNCATED",
            Verdict::Violated => "VIOLATED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckRow {
    pub check: String,
    pub level: usize,
    pub instances: u128,
    pub truncated: u128,
    pub violations: u128,
    pub witness: Option<String>,
}

impl CheckRow {
    fn new(check: impl Into<String>, level: usize) -> Self {
        CheckRow {
            check: check.into(),
            level,
            instances: 0,
            truncated: 0,
            violations: 0,
            witness: None,
        }
    }

    fn truncated_row(check: impl Into<String>, level: usize) -> Self {
        let mut r = CheckRow::new(check, level);
        r.truncated = 1;
        r
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn verdict(&self) -> Verdict {
        if self.violations > 0 {
            Verdict::Violated
        } else if self.truncated > 0 {
            Verdict::Truncated
        } else {
            Verdict::Pass
        }
    }

    /// TRUNCATED counts as a pass.
    pub fn ok(&self) -> bool {
        self.verdict() != Verdict::Violated
    }

    pub fn to_sexp(&self) -> String {
        format!(
            "(check {:?} (level {}) (verdict {}) (instances {}) (truncated {}) (violations {}){})",
            self.check,
            self.level,
            self.verdict(),
            self.instances,
            self.truncated,
            self.violations,
            self.witness.as_ref().map(|w| format!(" (witness {w:?})")).unwrap_or_default()
        )
    }
}

impl fmt::Display for CheckRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<9} {} [level {}]: {} instances", self.verdict(), self.check, self.level, self.instances)?;
        if self.truncated > 0 {
            write!(f, ", {} truncated", self.truncated)?;
        }
        if let Some(w) = &self.witness {
            write!(f, "; witness {w}")?;
        }
        Ok(())
    }
}

/// Chain invariants between consecutive levels: `set_k ⊆ set_{k+1}` and
/// strictly so, `set_k ∈ set_{k+1}` where representable, and
/// `set_k ∉ set_k`.
pub fn chain_checks(u: &StratifiedUniverse) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for k in 1..=u.depth() {
        let s = &u.levels[k - 1];
        if k < u.depth() {
            let next = &u.levels[k];
            let name = format!("set_{k} subset set_{}", k + 1);
            match s.members() {
                Some(m) => {
                    let mut r = CheckRow::new(name, k);
                    for x in m.iter() {
                        r.record(u.in_level(k + 1, x), || x.to_string());
                    }
                    rows.push(r);
                }
                None => rows.push(CheckRow::truncated_row(name, k)),
            }

            let name = format!("set_{k} proper subset set_{}", k + 1);
            if s.count == u128::MAX && next.count == u128::MAX {
                rows.push(CheckRow::truncated_row(name, k));
            } else {
                let mut r = CheckRow::new(name, k);
                r.record(next.count > s.count, || format!("|set_{k}| = |set_{}| = {}", k + 1, s.count));
                rows.push(r);
            }

            let name = format!("set_{k} in set_{}", k + 1);
            match s.members() {
                Some(m) if s.count <= u.breadth as u128 => {
                    let mut r = CheckRow::new(name, k);
                    r.record(u.in_level(k + 1, &m.to_value()), || format!("set_{k}"));
                    rows.push(r);
                }
                _ => rows.push(CheckRow::truncated_row(name, k)),
            }
        }

        let name = format!("set_{k} notin set_{k}");
        let mut r = CheckRow::new(name.clone(), k);
        if s.count > u.breadth as u128 {
            // too many members to be a level set at all
            r.record(true, String::new);
            rows.push(r);
        } else if let Some(m) = s.members() {
            r.record(!u.in_level(k, &m.to_value()), || format!("set_{k}"));
            rows.push(r);
        } else {
            rows.push(CheckRow::truncated_row(name, k));
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogReport {
    pub rows: Vec<CheckRow>,
    pub diagnostics: Vec<Diagnostic>,
}

impl AnalogReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(CheckRow::ok)
    }
}

fn analog_site(k: usize) -> Site {
    Site::new("<metastack>", 0, 0, format!("set_{k}"))
}

/// Closure properties of each level, the finite analogs of a universe's
/// closure under membership, subsets, singletons, doubletons, powers and
/// unions.
pub fn check_grothendieck_analogs(u: &StratifiedUniverse) -> AnalogReport {
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    let b = u.breadth;
    for k in 1..=u.depth() {
        let site = analog_site(k);
        let mut level_rows = Vec::new();
        let mut violate = |row: &str, w: String| {
            diagnostics.push(Diagnostic::error("ANALOG-VIOLATED", site.clone(), format!("{row}: {w}")));
        };
        let members = u.levels[k - 1].members();
        let univ = universe(u, k).ok();

        let name = "membership closure";
        match (members, &univ) {
            (Some(m), Some(univ)) => {
                let mut r = CheckRow::new(name, k);
                for x in m.iter() {
                    for y in x.as_set().into_iter().flatten() {
                        let ok = univ.contains(y);
                        r.record(ok, || format!("{y} in {x}"));
                        if !ok {
                            violate(name, format!("{y} in {x} but not in univ_{k}"));
                        }
                    }
                }
                level_rows.push(r);
            }
            _ => level_rows.push(CheckRow::truncated_row(name, k)),
        }

        let name = "subset closure";
        match members {
            Some(m) => {
                let mut r = CheckRow::new(name, k);
                for x in m.iter() {
                    let elems: Vec<Value> = x.as_set().into_iter().flatten().cloned().collect();
                    for y in subsets_up_to(&elems, elems.len()).iter() {
                        let ok = u.in_level(k, y);
                        r.record(ok, || format!("{y} subset of {x}"));
                        if !ok {
                            violate(name, format!("{y} is a subset of {x} outside set_{k}"));
                        }
                    }
                }
                level_rows.push(r);
            }
            None => level_rows.push(CheckRow::truncated_row(name, k)),
        }

        let name = "singletons";
        match &univ {
            Some(univ) => {
                let mut r = CheckRow::new(name, k);
                for x in univ.iter() {
                    if b < 1 {
                        r.truncated += 1;
                        continue;
                    }
                    let s = Value::set([x.clone()]);
                    let ok = u.in_level(k, &s);
                    r.record(ok, || s.to_string());
                    if !ok {
                        violate(name, format!("{s} outside set_{k}"));
                    }
                }
                level_rows.push(r);
            }
            None => level_rows.push(CheckRow::truncated_row(name, k)),
        }

        let name = "doubletons";
        match &univ {
            Some(univ) if (univ.len() as u128).pow(2) <= SCAN_CAP => {
                let mut r = CheckRow::new(name, k);
                let e = univ.elements();
                for i in 0..e.len() {
                    for j in i + 1..e.len() {
                        if b < 2 {
                            r.truncated += 1;
                            continue;
                        }
                        let d = Value::set([e[i].clone(), e[j].clone()]);
                        let ok = u.in_level(k, &d);
                        r.record(ok, || d.to_string());
                        if !ok {
                            violate(name, format!("{d} outside set_{k}"));
                        }
                    }
                }
                level_rows.push(r);
            }
            _ => level_rows.push(CheckRow::truncated_row(name, k)),
        }

        let name = "power sets";
        match members {
            Some(m) => {
                let mut r = CheckRow::new(name, k);
                for x in m.iter() {
                    let elems: Vec<Value> = x.as_set().into_iter().flatten().cloned().collect();
                    if elems.len() >= 64 || (1u128 << elems.len()) > b as u128 {
                        r.truncated += 1;
                        continue;
                    }
                    let p = subsets_up_to(&elems, elems.len()).to_value();
                    let ok = u.in_level(k + 1, &p);
                    r.record(ok, || format!("P({x})"));
                    if !ok {
                        violate(name, format!("P({x}) outside set_{}", k + 1));
                    }
                }
                level_rows.push(r);
            }
            None => level_rows.push(CheckRow::truncated_row(name, k)),
        }

        let name = "bounded unions";
        match members {
            Some(m) if (m.len() as u128).pow(2) <= SCAN_CAP => {
                let mut r = CheckRow::new(name, k);
                let families: Vec<&Value> = m.iter().filter(|z| family(z).is_ok()).collect();
                for x in m.iter() {
                    let Some(xs) = FinSet::from_value(x) else { continue };
                    for z in &families {
                        let un = bounded_union(&xs, z).expect("filtered to families");
                        let ok = u.in_level(k, &un);
                        r.record(ok, || format!("X = {x}, Z = {z}"));
                        if !ok {
                            violate(name, format!("union of {z} bounded by {x} outside set_{k}"));
                        }
                    }
                }
                level_rows.push(r);
            }
            _ => level_rows.push(CheckRow::truncated_row(name, k)),
        }

        for r in &level_rows {
            if r.verdict() == Verdict::Truncated {
                diagnostics.push(Diagnostic::info(
                    "ANALOG-TRUNCATED",
                    site.clone(),
                    format!("{}: witnesses exceed the simulated bounds", r.check),
                ));
            }
        }
        rows.extend(level_rows);
    }
    crate::diagnostic::sort_diagnostics(&mut diagnostics);
    AnalogReport { rows, diagnostics }
}

// ---------------------------------------------------------------------------
// Kernel orders

pub fn order_subset(a: &FinSet, b: &FinSet) -> bool {
    a.is_subset(b)
}

/// `f ⊑ g`: smaller source and target, and `g` agrees with `f` on its source.
pub fn order_restriction(f: &FinFunction, g: &FinFunction) -> bool {
    f.source().is_subset(g.source())
        && f.target().is_subset(g.target())
        && f.graph().iter().all(|(x, y)| g.graph().get(x) == Some(y))
}

/// `f ⊑̇ g`: a restriction whose source is the whole `g`-preimage of its
/// image, so nothing of `g` mapping into the image is cut away.
pub fn order_opt_restriction(f: &FinFunction, g: &FinFunction) -> bool {
    if !order_restriction(f, g) {
        return false;
    }
    let im = f.image();
    g.graph().values().filter(|y| im.contains(y)).count() == f.source().len()
}

/// `p ≤ q`: smaller genus and smaller extent.
pub fn order_delimitation(p: &FinPredicate, q: &FinPredicate) -> bool {
    p.genus().is_subset(q.genus()) && p.extent().is_subset(q.extent())
}

/// `r ⪯ s`: componentwise smaller, with smaller extent.
pub fn order_abridgment(r: &FinRelation, s: &FinRelation) -> bool {
    r.comp0().is_subset(s.comp0()) && r.comp1().is_subset(s.comp1()) && r.extent().is_subset(s.extent())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelObject {
    Set(FinSet),
    Function(FinFunction),
    Predicate(FinPredicate),
    Relation(FinRelation),
}

impl KernelObject {
    pub fn kind(&self) -> &'static str {
        match self {
            KernelObject::Set(_) => "set",
            KernelObject::Function(_) => "function",
            KernelObject::Predicate(_) => "predicate",
            KernelObject::Relation(_) => "relation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelOrder {
    Subset,
    Restriction,
    OptRestriction,
    Delimitation,
    Abridgment,
}

impl KernelOrder {
    pub fn holds(self, a: &KernelObject, b: &KernelObject) -> Result<bool, MetastackError> {
        use KernelObject as K;
        use KernelOrder as O;
        Ok(match (self, a, b) {
            (O::Subset, K::Set(a), K::Set(b)) => order_subset(a, b),
            (O::Restriction, K::Function(f), K::Function(g)) => order_restriction(f, g),
            (O::OptRestriction, K::Function(f), K::Function(g)) => order_opt_restriction(f, g),
            (O::Delimitation, K::Predicate(p), K::Predicate(q)) => order_delimitation(p, q),
            (O::Abridgment, K::Relation(r), K::Relation(s)) => order_abridgment(r, s),
            _ => {
                return Err(MetastackError::KindMismatch {
                    left: a.kind(),
                    right: b.kind(),
                })
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Source and target chains

/// `|ftn_k|`: functions between level sets, counted by member cardinality.
fn ftn_count(m: &FinSet) -> u128 {
    let mut by_size: BTreeMap<usize, u128> = BTreeMap::new();
    for x in m.iter() {
        *by_size.entry(x.as_set().map_or(0, |s| s.len())).or_default() += 1;
    }
    let mut total: u128 = 0;
    for (&a, &na) in &by_size {
        for (&b, &nb) in &by_size {
            let per = u32::try_from(a).ok().and_then(|a| (b as u128).checked_pow(a)).unwrap_or(u128::MAX);
            total = total.saturating_add(per.saturating_mul(na).saturating_mul(nb));
        }
    }
    total
}

/// A function value `[source [target graph]]`.
pub fn function_value(f: &FinFunction) -> Value {
    Value::pair(f.source().to_value(), Value::pair(f.target().to_value(), f.to_value()))
}

/// `ftn_k` with its boundary maps `∂_0, ∂_1: ftn_k -> set_k`.
pub fn boundary_maps(level: &FinSet) -> Result<(FinFunction, FinFunction), MetastackError> {
    let mut ftn = Vec::new();
    for a in level.iter() {
        let sa = FinSet::from_value(a).ok_or_else(|| MetastackError::NotAFamily(a.to_string()))?;
        for b in level.iter() {
            let sb = FinSet::from_value(b).ok_or_else(|| MetastackError::NotAFamily(b.to_string()))?;
            ftn.extend(all_functions(&sa, &sb).map(|f| function_value(&f)));
        }
    }
    let ftn = FinSet::new(ftn);
    let d0 = FinFunction::from_fn(&ftn, level, |v| v.as_pair().expect("function value").0.clone())?;
    let d1 = FinFunction::from_fn(&ftn, level, |v| {
        v.as_pair().and_then(|(_, r)| r.as_pair()).expect("function value").0.clone()
    })?;
    Ok((d0, d1))
}

/// Largest `ftn_k` realized as an explicit function by `verify_source_chain`.
pub const DEFAULT_REALIZE_CAP: u128 = 1 << 12;

/// `∂_0^k ⊑ ∂_0^{k+1}` and `∂_1^k ⊑ ∂_1^{k+1}` for consecutive built levels.
///
/// When both function collections fit in `realize_cap` the boundary maps are
/// built and compared with `order_restriction`. Otherwise `ftn_k` is checked
/// fiber by fiber: the functions `A -> B` are the same at both levels, so the
/// restriction holds exactly when every level `k` pair `A, B` is also a
/// level `k + 1` pair. A level that is not enumerated is TRUNCATED.
pub fn verify_source_chain(u: &StratifiedUniverse, realize_cap: u128) -> Result<Vec<CheckRow>, MetastackError> {
    if u.depth() < 2 {
        return Err(MetastackError::LevelOutOfRange {
            level: 2,
            depth: u.depth(),
        });
    }
    let mut realized: Vec<Option<(FinFunction, FinFunction)>> = vec![None; u.depth()];
    for (slot, s) in realized.iter_mut().zip(&u.levels) {
        if let Some(m) = s.members() {
            if ftn_count(m) <= realize_cap {
                *slot = Some(boundary_maps(m)?);
            }
        }
    }
    let mut rows = Vec::new();
    for k in 1..u.depth() {
        let names = [
            format!("d0^{k} restricts d0^{}", k + 1),
            format!("d1^{k} restricts d1^{}", k + 1),
        ];
        if let (Some(lo), Some(hi)) = (&realized[k - 1], &realized[k]) {
            for (name, (f, g)) in names.into_iter().zip([(&lo.0, &hi.0), (&lo.1, &hi.1)]) {
                let mut r = CheckRow::new(name, k);
                r.record(order_restriction(f, g), || format!("|ftn_{k}| = {}", f.source().len()));
                r.instances = f.source().len() as u128;
                rows.push(r);
            }
            continue;
        }
        let Some(m) = u.levels[k - 1].members() else {
            rows.extend(names.into_iter().map(|n| CheckRow::truncated_row(n, k)));
            continue;
        };
        let mut r = CheckRow::new(String::new(), k);
        let lifted: Vec<bool> = m.iter().map(|a| u.in_level(k + 1, a)).collect();
        for (i, a) in m.iter().enumerate() {
            let na = a.as_set().map_or(0, |s| s.len());
            for (j, b) in m.iter().enumerate() {
                let nb = b.as_set().map_or(0, |s| s.len()) as u128;
                let fiber = u32::try_from(na).ok().and_then(|e| nb.checked_pow(e)).unwrap_or(u128::MAX);
                r.record(lifted[i] && lifted[j], || format!("functions {a} -> {b}"));
                r.instances = r.instances - 1 + fiber;
            }
        }
        for name in names {
            let mut row = r.clone();
            row.check = name;
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset::{power_set, subobjects, DEFAULT_ENUMERATION_CAP as CAP};

    fn set_of(names: &[&str]) -> Value {
        Value::set(names.iter().map(Value::atom))
    }

    #[test]
    fn first_level_over_two_atoms() {
        let u = build_universe(2, 1, 2).unwrap();
        let m = u.members(1).unwrap().unwrap();
        assert_eq!(m.len(), 4);
        assert!(m.contains(&set_of(&[])));
        assert!(m.contains(&set_of(&["a", "b"])));
        assert_eq!(u.stratum(1).unwrap().count, 4);
    }

    #[test]
    fn counts_match_enumeration() {
        for atoms in 1..=3 {
            for breadth in 0..=4 {
                let u = build_universe(atoms, 3, breadth).unwrap();
                for s in u.strata() {
                    if let Some(m) = s.members() {
                        assert_eq!(m.len() as u128, s.count);
                        assert!(m.iter().all(|x| u.in_level(s.level, x)));
                    }
                }
            }
        }
    }

    #[test]
    fn bad_configs() {
        assert!(matches!(build_universe(0, 1, 1), Err(MetastackError::InvalidConfig(_))));
        assert!(matches!(build_universe(1, 0, 1), Err(MetastackError::InvalidConfig(_))));
        let u = build_universe(1, 1, 1).unwrap();
        assert!(matches!(universe(&u, 2), Err(MetastackError::LevelOutOfRange { .. })));
    }

    #[test]
    fn first_level_is_not_its_own_member() {
        for atoms in 1..=3 {
            for breadth in 0..=4 {
                let u = build_universe(atoms, 2, breadth).unwrap();
                let s1 = u.level_value(1).unwrap().unwrap();
                assert!(!u.in_level(1, &s1));
                let n = u.members(1).unwrap().unwrap().len();
                assert_eq!(u.in_level(2, &s1), n <= breadth);
            }
        }
    }

    #[test]
    fn bounded_union_examples() {
        let x = FinSet::of_atoms(["a", "b", "c"]);
        assert_eq!(bounded_union(&x, &Value::set([])).unwrap(), Value::set([]));
        let z = Value::set([set_of(&["a"]), set_of(&["b", "d"])]);
        assert_eq!(bounded_union(&x, &z).unwrap(), set_of(&["a", "b"]));
        assert_eq!(bounded_union(&x, &power_set(&x).to_value()).unwrap(), x.to_value());
        assert!(matches!(
            bounded_union(&x, &Value::set([Value::atom("a")])),
            Err(MetastackError::NotAFamily(_))
        ));
    }

    #[test]
    fn unbounded_union_examples() {
        let u = build_universe(3, 2, 3).unwrap();
        let single = Value::set([set_of(&["a"])]);
        assert_eq!(unbounded_union(&single, &u, 1).unwrap(), set_of(&["a"]));
        let s1 = u.level_value(1).unwrap().unwrap();
        assert_eq!(unbounded_union(&s1, &u, 1).unwrap(), universe(&u, 1).unwrap().to_value());
        let bad = Value::set([Value::set([set_of(&["a"])])]);
        assert!(matches!(unbounded_union(&bad, &u, 1), Err(MetastackError::NotInPTilde(_))));
        assert!(unbounded_union(&bad, &u, 2).is_ok());
    }

    #[test]
    fn bounded_is_restricted_unbounded() {
        let u = build_universe(3, 1, 3).unwrap();
        for n in 0..=3 {
            let x = FinSet::of_atoms(["a", "b", "c"].into_iter().take(n));
            let px: Vec<Value> = power_set(&x).elements().to_vec();
            for mask in 0u32..1 << px.len() {
                let z = Value::set((0..px.len()).filter(|i| mask >> i & 1 == 1).map(|i| px[i].clone()));
                let b = bounded_union(&x, &z).unwrap();
                let ub = unbounded_union(&z, &u, 1).unwrap();
                let restricted = FinSet::from_value(&ub).unwrap().intersection(&x).to_value();
                assert_eq!(b, restricted);
                assert_eq!(b, ub);
            }
        }
    }

    #[test]
    fn universes() {
        let u = build_universe(2, 3, 2).unwrap();
        let u1 = universe(&u, 1).unwrap();
        assert!(u.atoms().is_subset(&u1));
        let mut prev = FinSet::empty();
        for k in 1..=3 {
            let uk = universe(&u, k).unwrap();
            assert!(prev.is_subset(&uk));
            prev = uk;
        }
        let empty = build_universe(2, 2, 0).unwrap();
        assert!(universe(&empty, 1).unwrap().is_empty());
        assert!(universe(&empty, 2).unwrap().is_empty());
    }

    #[test]
    fn universe_formula_matches_union() {
        for breadth in 1..=3 {
            let u = build_universe(2, 2, breadth).unwrap();
            let by_union = universe(&u, 2).unwrap();
            let ground = u.atoms().union(u.members(1).unwrap().unwrap());
            assert_eq!(by_union, ground);
        }
    }

    #[test]
    fn chains_hold_on_small_universes() {
        for atoms in 1..=2 {
            for breadth in 1..=4 {
                let u = build_universe(atoms, 3, breadth).unwrap();
                for r in chain_checks(&u) {
                    assert!(r.ok(), "{r}");
                }
            }
        }
    }

    #[test]
    fn zero_breadth_collapses_the_chain() {
        let u = build_universe(1, 2, 0).unwrap();
        let rows = chain_checks(&u);
        let strict = rows.iter().find(|r| r.check.contains("proper")).unwrap();
        assert_eq!(strict.verdict(), Verdict::Violated);
    }

    #[test]
    fn default_universe_has_no_analog_violations() {
        let u = build_universe(2, 2, 4).unwrap();
        let rep = check_grothendieck_analogs(&u);
        assert!(rep.passed(), "{:?}", rep.rows);
        assert!(rep.diagnostics.iter().all(|d| !d.is_error()));
        let membership: Vec<_> = rep.rows.iter().filter(|r| r.check == "membership closure").collect();
        assert!(membership.iter().all(|r| r.verdict() == Verdict::Pass));
    }

    #[test]
    fn small_breadth_truncates_powers() {
        let u = build_universe(2, 2, 1).unwrap();
        let rep = check_grothendieck_analogs(&u);
        let power = rep.rows.iter().find(|r| r.check == "power sets" && r.level == 1).unwrap();
        assert_eq!(power.verdict(), Verdict::Truncated);
        assert!(rep.passed());
        assert!(rep.diagnostics.iter().any(|d| d.code == "ANALOG-TRUNCATED"));
    }

    fn functions_over(n: usize) -> Vec<FinFunction> {
        let subs: Vec<FinSet> = subobjects(&FinSet::range(n)).into_iter().map(|p| p.extent().clone()).collect();
        let mut out = Vec::new();
        for a in &subs {
            for b in &subs {
                out.extend(all_functions(a, b));
            }
        }
        out
    }

    fn predicates_over(n: usize) -> Vec<FinPredicate> {
        subobjects(&FinSet::range(n))
            .into_iter()
            .flat_map(|g| subobjects(g.extent()))
            .collect()
    }

    fn relations_over(n: usize) -> Vec<FinRelation> {
        let subs: Vec<FinSet> = subobjects(&FinSet::range(n)).into_iter().map(|p| p.extent().clone()).collect();
        let mut out = Vec::new();
        for c0 in &subs {
            for c1 in &subs {
                let full = FinRelation::full(c0, c1);
                for e in subobjects(full.extent()) {
                    out.push(FinRelation::new(c0.clone(), c1.clone(), e.extent().clone()).unwrap());
                }
            }
        }
        out
    }

    fn is_preorder<T>(xs: &[T], le: impl Fn(&T, &T) -> bool) -> bool {
        xs.iter().all(|a| le(a, a))
            && xs.iter().all(|a| {
                xs.iter()
                    .filter(|b| le(a, b))
                    .all(|b| xs.iter().filter(|c| le(b, c)).all(|c| le(a, c)))
            })
    }

    fn is_antisymmetric<T: PartialEq>(xs: &[T], le: impl Fn(&T, &T) -> bool) -> bool {
        xs.iter().all(|a| xs.iter().all(|b| !(le(a, b) && le(b, a)) || a == b))
    }

    #[test]
    fn kernel_orders_are_preorders() {
        let sets: Vec<FinSet> = subobjects(&FinSet::range(3)).into_iter().map(|p| p.extent().clone()).collect();
        assert!(is_preorder(&sets, order_subset));
        assert!(is_antisymmetric(&sets, order_subset));
        let fs = functions_over(2);
        assert!(is_preorder(&fs, order_restriction));
        assert!(is_preorder(&fs, order_opt_restriction));
        let ps = predicates_over(3);
        assert!(is_preorder(&ps, order_delimitation));
        assert!(is_antisymmetric(&ps, order_delimitation));
        let rs = relations_over(2);
        assert!(is_preorder(&rs, order_abridgment));
    }

    #[test]
    fn restricting_to_a_sub_source() {
        let a = FinSet::range(3);
        for g in all_functions(&a, &a) {
            for sub in subobjects(&a) {
                let f = FinFunction::from_fn(sub.extent(), &a, |x| g.apply(x).unwrap().clone()).unwrap();
                assert!(order_restriction(&f, &g));
            }
        }
    }

    #[test]
    fn opt_restriction_is_stricter() {
        let a = FinSet::range(2);
        let g = FinFunction::constant(&a, &a, Value::atom("0")).unwrap();
        let one = FinSet::of_atoms(["0"]);
        let f = FinFunction::constant(&one, &a, Value::atom("0")).unwrap();
        assert!(order_restriction(&f, &g));
        assert!(!order_opt_restriction(&f, &g));
        assert!(order_opt_restriction(&g, &g));
    }

    #[test]
    fn delimitation_agrees_with_opt_restriction_on_inclusions() {
        let ps = predicates_over(3);
        for p in &ps {
            for q in &ps {
                assert_eq!(
                    order_delimitation(p, q),
                    order_opt_restriction(&p.inclusion(), &q.inclusion()),
                    "{p:?} {q:?}"
                );
            }
        }
    }

    #[test]
    fn abridgment_implies_delimitation() {
        let rs = relations_over(2);
        for r in &rs {
            for s in &rs {
                if order_abridgment(r, s) {
                    assert!(order_delimitation(&r.as_predicate(), &s.as_predicate()));
                }
            }
        }
    }

    #[test]
    fn dynamic_orders_reject_mixed_kinds() {
        let s = KernelObject::Set(FinSet::range(1));
        let f = KernelObject::Function(FinFunction::identity(&FinSet::range(1)));
        assert!(KernelOrder::Subset.holds(&s, &s).unwrap());
        assert!(KernelOrder::Restriction.holds(&f, &f).unwrap());
        assert_eq!(
            KernelOrder::Subset.holds(&s, &f),
            Err(MetastackError::KindMismatch {
                left: "set",
                right: "function"
            })
        );
        assert!(KernelOrder::Delimitation.holds(&f, &f).is_err());
    }

    #[test]
    fn source_chain_single_atom() {
        let u = build_universe(1, 3, 2).unwrap();
        let rows = verify_source_chain(&u, CAP).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.verdict() == Verdict::Pass), "{rows:?}");
    }

    #[test]
    fn boundary_map_restricts_itself() {
        let u = build_universe(2, 1, 2).unwrap();
        let (d0, d1) = boundary_maps(u.members(1).unwrap().unwrap()).unwrap();
        assert!(order_restriction(&d0, &d0));
        assert!(order_restriction(&d1, &d1));
        // 4 sets of sizes 0,1,1,2: sum of |B|^|A|
        assert_eq!(d0.source().len(), 4 + 2 * 4 + 6);
    }

    #[test]
    fn source_chain_needs_two_levels() {
        let u = build_universe(1, 1, 1).unwrap();
        assert!(verify_source_chain(&u, CAP).is_err());
    }

    #[test]
    fn fibered_check_matches_realized_maps() {
        for (atoms, breadth) in [(1, 2), (2, 2), (2, 3)] {
            let u = build_universe(atoms, 2, breadth).unwrap();
            let realized = verify_source_chain(&u, CAP).unwrap();
            let fibered = verify_source_chain(&u, 0).unwrap();
            assert_eq!(realized, fibered);
            assert!(realized.iter().all(|r| r.verdict() == Verdict::Pass));
            let (d0, _) = boundary_maps(u.members(1).unwrap().unwrap()).unwrap();
            assert_eq!(fibered[0].instances, d0.source().len() as u128);
        }
    }

    #[test]
    fn unenumerated_levels_truncate_the_chain() {
        let u = StratifiedUniverse::build(2, 2, 2, 3).unwrap();
        assert!(u.members(1).unwrap().is_none());
        let rows = verify_source_chain(&u, CAP).unwrap();
        assert!(rows.iter().all(|r| r.verdict() == Verdict::Truncated));
    }
}
