//! Metalevels, qualified names and the symbol table.
//!
//! A qualified name renders as `<level>.<path>:<base>`, e.g. `type.ftn:belonging`,
//! `iff:set` or `#n+1.ftn:source`. Levels are ordered by abstraction:
//! `#0 < #1 < #2 < ... < meta < type < iff`, with the parametric levels
//! `#n+k` sitting above `#0` and below `meta`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Expr, NamespaceBlock, Site, SourceUnit};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NamesError {
    #[error("malformed name `{text}`: {reason}")]
    MalformedName { text: String, reason: &'static str },
    #[error("levels {a} and {b} are incomparable without instantiating n")]
    IncomparableLevels { a: Level, b: Level },
    #[error("`{0}` is not at a parametric level")]
    NotGeneric(String),
    #[error("`{name}` is defined in both `{first}` and `{second}`")]
    DuplicateDefinition {
        name: String,
        first: String,
        second: String,
        site: Site,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Obj,
    Finite(u32),
    /// `#n+k`, for an unbound parameter n.
    Generic(u32),
    Meta,
    Type,
    Iff,
}

impl Level {
    fn band(self) -> u8 {
        match self {
            Level::Obj => 0,
            Level::Finite(_) | Level::Generic(_) => 1,
            Level::Meta => 2,
            Level::Type => 3,
            Level::Iff => 4,
        }
    }

    /// Parses a name prefix: `iff`, `type`, `meta`, `#n`, `#n+K` or `#D`.
    pub fn parse_prefix(s: &str) -> Option<Level> {
        match s {
            "iff" => return Some(Level::Iff),
            "type" => return Some(Level::Type),
            "meta" => return Some(Level::Meta),
            "#n" => return Some(Level::Generic(0)),
            _ => {}
        }
        let rest = s.strip_prefix('#')?;
        if let Some(k) = rest.strip_prefix("n+") {
            return parse_digits(k).map(Level::Generic);
        }
        parse_digits(rest).map(|d| if d == 0 { Level::Obj } else { Level::Finite(d) })
    }

    pub fn prefix(self) -> String {
        match self {
            Level::Obj => "#0".into(),
            Level::Finite(n) => format!("#{n}"),
            Level::Generic(0) => "#n".into(),
            Level::Generic(k) => format!("#n+{k}"),
            Level::Meta => "meta".into(),
            Level::Type => "type".into(),
            Level::Iff => "iff".into(),
        }
    }

    /// Parses the argument of a `(level ...)` declaration.
    pub fn parse_decl(s: &str) -> Option<Level> {
        match s {
            "generic" | "n" => Some(Level::Generic(0)),
            "meta" => Some(Level::Meta),
            "type" => Some(Level::Type),
            "iff" => Some(Level::Iff),
            _ => {
                if let Some(k) = s.strip_prefix("n+") {
                    return parse_digits(k).map(Level::Generic);
                }
                parse_digits(s).map(|d| if d == 0 { Level::Obj } else { Level::Finite(d) })
            }
        }
    }

    pub fn decl_text(self) -> String {
        match self {
            Level::Obj => "0".into(),
            Level::Finite(n) => n.to_string(),
            Level::Generic(0) => "generic".into(),
            Level::Generic(k) => format!("n+{k}"),
            Level::Meta => "meta".into(),
            Level::Type => "type".into(),
            Level::Iff => "iff".into(),
        }
    }

    pub fn is_generic(self) -> bool {
        matches!(self, Level::Generic(_))
    }

    /// Levels of the natural part: object, numbered and parametric levels.
    pub fn is_natural(self) -> bool {
        matches!(self, Level::Obj | Level::Finite(_) | Level::Generic(_))
    }

    pub fn instantiate(self, n: u32) -> Result<Level, NamesError> {
        match self {
            Level::Generic(k) => Ok(Level::Finite(n + k)),
            other => Err(NamesError::NotGeneric(other.prefix())),
        }
    }
}

fn parse_digits(s: &str) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (*self, *other) {
            (Level::Finite(a), Level::Finite(b)) => Some(a.cmp(&b)),
            (Level::Generic(a), Level::Generic(b)) => Some(a.cmp(&b)),
            (Level::Finite(_), Level::Generic(_)) | (Level::Generic(_), Level::Finite(_)) => None,
            (a, b) => Some(a.band().cmp(&b.band())),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.prefix())
    }
}

/// `a` is at most as abstract as `b`.
pub fn level_leq(a: Level, b: Level) -> Result<bool, NamesError> {
    a.partial_cmp(&b)
        .map(|o| o != Ordering::Greater)
        .ok_or(NamesError::IncomparableLevels { a, b })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QualifiedName {
    pub level: LevelKey,
    pub path: Vec<String>,
    pub base: String,
}

/// A `Level` wrapper with a total (non-semantic) order so names can be map keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LevelKey(pub Level);

impl LevelKey {
    fn sort_key(self) -> (u8, u32) {
        match self.0 {
            Level::Obj => (0, 0),
            Level::Finite(n) => (1, n),
            Level::Generic(k) => (2, k),
            Level::Meta => (3, 0),
            Level::Type => (4, 0),
            Level::Iff => (5, 0),
        }
    }
}

impl PartialOrd for LevelKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LevelKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl QualifiedName {
    pub fn new(level: Level, path: Vec<String>, base: impl Into<String>) -> Self {
        QualifiedName {
            level: LevelKey(level),
            path,
            base: base.into(),
        }
    }

    pub fn level(&self) -> Level {
        self.level.0
    }

    pub fn render(&self) -> String {
        let mut s = self.level.0.prefix();
        for seg in &self.path {
            s.push('.');
            s.push_str(seg);
        }
        s.push(':');
        s.push_str(&self.base);
        s
    }

    pub fn with_level(&self, level: Level) -> Self {
        QualifiedName {
            level: LevelKey(level),
            ..self.clone()
        }
    }

    /// The rendered name of the namespace housing this name.
    pub fn namespace_text(&self) -> String {
        let mut s = self.level.0.prefix();
        for seg in &self.path {
            s.push('.');
            s.push_str(seg);
        }
        s
    }
}

impl fmt::Display for QualifiedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn malformed(text: &str, reason: &'static str) -> NamesError {
    NamesError::MalformedName {
        text: text.to_string(),
        reason,
    }
}

fn split_segments<'a>(text: &str, part: &'a str) -> Result<Vec<&'a str>, NamesError> {
    let segs: Vec<&str> = part.split('.').collect();
    if segs.iter().any(|s| s.is_empty()) {
        return Err(malformed(text, "empty path segment"));
    }
    Ok(segs)
}

/// The leading level prefix of `text`, if it carries one.
fn leading_level(text: &str) -> Option<Level> {
    if !text.contains(':') && !text.contains('.') {
        return None;
    }
    let first = text.split(['.', ':']).next()?;
    Level::parse_prefix(first)
}

/// Splits `text` into (path, base) parts, ignoring level prefixes.
fn split_path_base<'a>(text: &str, body: &'a str) -> Result<(Vec<&'a str>, &'a str), NamesError> {
    let colons = body.matches(':').count();
    if colons > 1 {
        return Err(malformed(text, "more than one `:`"));
    }
    if let Some((path, base)) = body.split_once(':') {
        if base.is_empty() {
            return Err(malformed(text, "empty base"));
        }
        if base.contains('.') {
            return Err(malformed(text, "`.` after `:`"));
        }
        let path = if path.is_empty() {
            Vec::new()
        } else {
            split_segments(text, path)?
        };
        Ok((path, base))
    } else {
        let mut segs = split_segments(text, body)?;
        let base = segs.pop().ok_or_else(|| malformed(text, "empty base"))?;
        Ok((segs, base))
    }
}

/// Parses a fully prefixed name such as `type.ftn:belonging`.
pub fn parse_name(text: &str) -> Result<QualifiedName, NamesError> {
    if text.is_empty() {
        return Err(malformed(text, "empty base"));
    }
    if text.matches(':').count() > 1 {
        return Err(malformed(text, "more than one `:`"));
    }
    let level = leading_level(text).ok_or_else(|| malformed(text, "missing level prefix"))?;
    let first_len = text.split(['.', ':']).next().map(str::len).unwrap_or(0);
    let rest = &text[first_len..];
    let (path, base) = if let Some(r) = rest.strip_prefix(':') {
        if r.is_empty() {
            return Err(malformed(text, "empty base"));
        }
        if r.contains('.') {
            return Err(malformed(text, "`.` after `:`"));
        }
        (Vec::new(), r)
    } else {
        let r = rest.strip_prefix('.').ok_or_else(|| malformed(text, "empty base"))?;
        if r.starts_with(':') {
            return Err(malformed(text, "empty path segment"));
        }
        split_path_base(text, r)?
    };
    Ok(QualifiedName::new(
        level,
        path.into_iter().map(String::from).collect(),
        base,
    ))
}

/// The resolution context of one namespace block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamespaceContext {
    pub name: String,
    pub level: Level,
    pub path: Vec<String>,
    /// The level named by the namespace prefix, when it disagrees with the
    /// declared level.
    pub mismatch: Option<Level>,
}

impl NamespaceContext {
    pub fn new(name: &str, declared: Level) -> Self {
        let mut mismatch = None;
        let (level, path) = match leading_level(name).or_else(|| Level::parse_prefix(name)) {
            Some(prefix_level) => {
                if prefix_level != declared {
                    mismatch = Some(prefix_level);
                }
                let path: Vec<String> = name
                    .split('.')
                    .skip(1)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect();
                (declared, path)
            }
            None => (
                declared,
                name.split('.').filter(|s| !s.is_empty()).map(String::from).collect(),
            ),
        };
        NamespaceContext {
            name: name.to_string(),
            level,
            path,
            mismatch,
        }
    }

    pub fn of_block(block: &NamespaceBlock) -> Self {
        Self::new(&block.name, block.level)
    }

    /// `true` when `other` lies inside this namespace's segment subtree.
    pub fn contains(&self, other: &NamespaceContext) -> bool {
        self.level == other.level && other.path.starts_with(&self.path)
    }

    pub fn houses(&self, name: &QualifiedName) -> bool {
        name.level() == self.level && name.path == self.path
    }
}

/// Resolves a symbol against a namespace: prefixed names parse as written,
/// `p:x` takes the context's level, bare `x` takes its level and path.
pub fn resolve(text: &str, ctx: &NamespaceContext) -> Result<QualifiedName, NamesError> {
    if leading_level(text).is_some() {
        return parse_name(text);
    }
    if text.is_empty() {
        return Err(malformed(text, "empty base"));
    }
    if !text.contains(':') && !text.contains('.') {
        return Ok(QualifiedName::new(ctx.level, ctx.path.clone(), text));
    }
    let (path, base) = split_path_base(text, text)?;
    Ok(QualifiedName::new(
        ctx.level,
        path.into_iter().map(String::from).collect(),
        base,
    ))
}

pub fn instantiate(name: &QualifiedName, n: u32) -> Result<QualifiedName, NamesError> {
    match name.level() {
        Level::Generic(_) => Ok(name.with_level(name.level().instantiate(n)?)),
        _ => Err(NamesError::NotGeneric(name.render())),
    }
}

// ---------------------------------------------------------------------------
// Symbol table

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Set,
    Function,
    Predicate,
    Relation,
    Element,
    Unknown,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Set => "set",
            Kind::Function => "function",
            Kind::Predicate => "predicate",
            Kind::Relation => "relation",
            Kind::Element => "element",
            Kind::Unknown => "unknown",
        }
    }

    fn of_classifier(base: &str) -> Kind {
        match base {
            "set" | "class" => Kind::Set,
            "function" => Kind::Function,
            "predicate" => Kind::Predicate,
            "relation" => Kind::Relation,
            _ => Kind::Element,
        }
    }

    /// Element and Unknown are compatible with anything; sets and predicates
    /// both classify.
    pub fn compatible(self, other: Kind) -> bool {
        use Kind::*;
        match (self, other) {
            (Unknown, _) | (_, Unknown) | (Element, _) | (_, Element) => true,
            (Set, Predicate) | (Predicate, Set) => true,
            (a, b) => a == b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reference {
    pub site: Site,
    /// Level of the referencing namespace.
    pub from_level: Level,
    /// Level written on the occurrence (`#n+1` for a reference to `#n.x:y`).
    pub instance_level: Level,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolEntry {
    pub name: QualifiedName,
    pub namespace: String,
    pub kind: Kind,
    pub definitions: Vec<Site>,
    pub references: Vec<Reference>,
}

impl SymbolEntry {
    pub fn level(&self) -> Level {
        self.name.level()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KindConflict {
    pub name: String,
    pub first: Kind,
    pub second: Kind,
    pub site: Site,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolTable {
    pub entries: BTreeMap<String, SymbolEntry>,
    /// Referenced names with no definition in the analysed units.
    pub external: BTreeMap<String, Vec<Reference>>,
    pub namespaces: BTreeMap<String, NamespaceContext>,
    pub kind_conflicts: Vec<KindConflict>,
    pub malformed: Vec<(String, Site, NamesError)>,
    external_kinds: BTreeMap<String, Kind>,
}

impl SymbolTable {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, rendered: &str) -> Option<&SymbolEntry> {
        self.entries.get(rendered)
    }

    /// The table key a name's occurrences are filed under: the name itself
    /// when defined, otherwise the `#n` definition of a `#n+k` instance.
    pub fn definition_key(&self, name: &QualifiedName) -> Option<String> {
        let r = name.render();
        if self.entries.contains_key(&r) {
            return Some(r);
        }
        if let Level::Generic(k) = name.level() {
            if k > 0 {
                let base = name.with_level(Level::Generic(0)).render();
                if self.entries.contains_key(&base) {
                    return Some(base);
                }
            }
        }
        None
    }

    fn note_kind(&mut self, name: &QualifiedName, kind: Kind, site: &Site) {
        let key = self.definition_key(name);
        let slot = match &key {
            Some(k) => &mut self.entries.get_mut(k).unwrap().kind,
            None => self.external_kinds.entry(name.render()).or_insert(Kind::Unknown),
        };
        if *slot == Kind::Unknown || *slot == Kind::Element {
            if kind != Kind::Element {
                *slot = kind;
            }
        } else if !slot.compatible(kind) {
            let first = *slot;
            self.kind_conflicts.push(KindConflict {
                name: key.unwrap_or_else(|| name.render()),
                first,
                second: kind,
                site: site.clone(),
            });
        }
    }

    pub fn kind_of(&self, rendered: &str) -> Kind {
        self.entries
            .get(rendered)
            .map(|e| e.kind)
            .or_else(|| self.external_kinds.get(rendered).copied())
            .unwrap_or(Kind::Unknown)
    }
}

/// A positive declaration `(C s)` with both parts plain names.
pub fn as_declaration(e: &Expr) -> Option<(&str, &str)> {
    if let Expr::Apply { head, args } = e {
        if let (Expr::Name(c), [Expr::Name(s)]) = (head.as_ref(), args.as_slice()) {
            return Some((c, s));
        }
    }
    None
}

/// `Some((classifier, subject))` when the axiom defines its subject in `ctx`.
pub fn defining_declaration(e: &Expr, ctx: &NamespaceContext) -> Option<(QualifiedName, QualifiedName)> {
    let (c, s) = as_declaration(e)?;
    let c = resolve(c, ctx).ok()?;
    let s = resolve(s, ctx).ok()?;
    if !ctx.houses(&s) {
        return None;
    }
    match level_leq(s.level(), c.level()) {
        Ok(true) => Some((c, s)),
        _ => None,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Position {
    Formula,
    Term,
}

struct Collector<'a> {
    table: &'a mut SymbolTable,
    ctx: &'a NamespaceContext,
    site: Site,
}

impl Collector<'_> {
    fn reference(&mut self, text: &str, kind: Option<Kind>) {
        let name = match resolve(text, self.ctx) {
            Ok(n) => n,
            Err(e) => {
                self.table.malformed.push((text.to_string(), self.site.clone(), e));
                return;
            }
        };
        let r = Reference {
            site: self.site.clone(),
            from_level: self.ctx.level,
            instance_level: name.level(),
        };
        match self.table.definition_key(&name) {
            Some(k) => self.table.entries.get_mut(&k).unwrap().references.push(r),
            None => self.table.external.entry(name.render()).or_default().push(r),
        }
        if let Some(kind) = kind {
            let site = self.site.clone();
            self.table.note_kind(&name, kind, &site);
        }
    }

    fn walk(&mut self, e: &Expr, pos: Position, skip_subject: bool) {
        match e {
            Expr::Name(n) => self.reference(n, None),
            Expr::Variable(_) => {}
            Expr::Tuple(items) => items.iter().for_each(|i| self.walk(i, Position::Term, false)),
            Expr::Apply { head, args } => {
                let head_kind = match (pos, args.len()) {
                    (Position::Term, _) => Kind::Function,
                    (Position::Formula, 1) => Kind::Set,
                    (Position::Formula, 2) => Kind::Relation,
                    _ => Kind::Unknown,
                };
                match head.as_ref() {
                    Expr::Name(n) => self.reference(n, Some(head_kind)),
                    other => self.walk(other, Position::Term, false),
                }
                for (i, a) in args.iter().enumerate() {
                    if skip_subject && i == 0 {
                        continue;
                    }
                    self.walk(a, Position::Term, false);
                }
            }
            Expr::Equation(l, r) => {
                self.walk(l, Position::Term, false);
                self.walk(r, Position::Term, false);
            }
            Expr::Connective { args, .. } => args.iter().for_each(|a| self.walk(a, Position::Formula, false)),
            Expr::Quantifier { bindings, body, .. } => {
                for b in bindings {
                    match &b.sort {
                        Some(Expr::Name(n)) => self.reference(n, Some(Kind::Set)),
                        Some(other) => self.walk(other, Position::Term, false),
                        None => {}
                    }
                }
                self.walk(body, Position::Formula, false);
            }
        }
    }
}

pub fn build_symbol_table(unit: &SourceUnit) -> Result<SymbolTable, NamesError> {
    build_symbol_table_all(std::slice::from_ref(unit))
}

/// Builds one table over several units: definitions first, then references.
pub fn build_symbol_table_all(units: &[SourceUnit]) -> Result<SymbolTable, NamesError> {
    let mut table = SymbolTable::default();
    for unit in units {
        for ns in &unit.namespaces {
            let ctx = NamespaceContext::of_block(ns);
            table.namespaces.insert(ns.name.clone(), ctx.clone());
            for ax in &ns.axioms {
                let Some((classifier, subject)) = defining_declaration(&ax.expr, &ctx) else {
                    continue;
                };
                let site = unit.site(ns, ax);
                let key = subject.render();
                let kind = Kind::of_classifier(&classifier.base);
                match table.entries.get_mut(&key) {
                    Some(entry) if entry.namespace != ns.name => {
                        return Err(NamesError::DuplicateDefinition {
                            name: key,
                            first: entry.namespace.clone(),
                            second: ns.name.clone(),
                            site,
                        });
                    }
                    Some(entry) => {
                        entry.definitions.push(site);
                        if entry.kind == Kind::Element {
                            entry.kind = kind;
                        }
                    }
                    None => {
                        table.entries.insert(
                            key,
                            SymbolEntry {
                                name: subject,
                                namespace: ns.name.clone(),
                                kind,
                                definitions: vec![site],
                                references: Vec::new(),
                            },
                        );
                    }
                }
            }
        }
    }
    for unit in units {
        for ns in &unit.namespaces {
            let ctx = table.namespaces[&ns.name].clone();
            for ax in &ns.axioms {
                let defining = defining_declaration(&ax.expr, &ctx).is_some();
                let mut c = Collector {
                    table: &mut table,
                    ctx: &ctx,
                    site: unit.site(ns, ax),
                };
                c.walk(&ax.expr, Position::Formula, defining);
            }
        }
    }
    Ok(table)
}
