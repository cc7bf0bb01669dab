//! Reading and writing `.interp` files:
//!
//! ```text
//! (interpretation
//!   (set G (0 1 2))
//!   (element e G 0)
//!   (function inv (G G) ((0 0) (1 2) (2 1)))
//!   (predicate even G (0 2))
//!   (relation le (G G) ((0 0) (0 1))))
//! ```
//!
//! Values are atoms, pairs `[v v]` or sets `{v ...}`.

use std::collections::BTreeMap;

use super::{Denotation, Interpretation, ModelError};
use crate::finset::{FinFunction, FinPredicate, FinRelation, FinSet, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open(char),
    Close(char),
    Sym(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: u32,
    column: u32,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ModelError> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1u32, 1u32);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut advance = |c: char| {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        };
        match c {
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    advance(c);
                    chars.next();
                }
            }
            c if c.is_whitespace() => {
                advance(c);
                chars.next();
            }
            '(' | '[' | '{' => {
                advance(c);
                chars.next();
                out.push(Spanned {
                    tok: Tok::Open(c),
                    line: l,
                    column: col,
                });
            }
            ')' | ']' | '}' => {
                advance(c);
                chars.next();
                out.push(Spanned {
                    tok: Tok::Close(c),
                    line: l,
                    column: col,
                });
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || "()[]{};".contains(c) {
                        break;
                    }
                    s.push(c);
                    advance(c);
                    chars.next();
                }
                out.push(Spanned {
                    tok: Tok::Sym(s),
                    line: l,
                    column: col,
                });
            }
        }
    }
    Ok(out)
}

/// Generic tree over the token stream.
#[derive(Debug, Clone)]
enum Node {
    Sym(String, u32, u32),
    List(char, Vec<Node>, u32, u32),
}

impl Node {
    fn pos(&self) -> (u32, u32) {
        match self {
            Node::Sym(_, l, c) | Node::List(_, _, l, c) => (*l, *c),
        }
    }
}

fn err_at(pos: (u32, u32), message: impl Into<String>) -> ModelError {
    ModelError::Format {
        line: pos.0,
        column: pos.1,
        message: message.into(),
    }
}

fn closer(open: char) -> char {
    match open {
        '(' => ')',
        '[' => ']',
        _ => '}',
    }
}

fn tree(tokens: &[Spanned], pos: &mut usize) -> Result<Node, ModelError> {
    let t = tokens
        .get(*pos)
        .ok_or_else(|| err_at(tokens.last().map(|t| (t.line, t.column)).unwrap_or((1, 1)), "unexpected end"))?;
    *pos += 1;
    match &t.tok {
        Tok::Sym(s) => Ok(Node::Sym(s.clone(), t.line, t.column)),
        Tok::Close(c) => Err(err_at((t.line, t.column), format!("unexpected `{c}`"))),
        Tok::Open(o) => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => return Err(err_at((t.line, t.column), format!("unclosed `{o}`"))),
                    Some(Spanned { tok: Tok::Close(c), line, column }) => {
                        if *c != closer(*o) {
                            return Err(err_at((*line, *column), format!("`{o}` closed by `{c}`")));
                        }
                        *pos += 1;
                        return Ok(Node::List(*o, items, t.line, t.column));
                    }
                    Some(_) => items.push(tree(tokens, pos)?),
                }
            }
        }
    }
}

fn value(n: &Node) -> Result<Value, ModelError> {
    match n {
        Node::Sym(s, ..) => Ok(Value::atom(s)),
        Node::List('[', items, ..) if items.len() >= 2 => {
            Ok(Value::tuple(items.iter().map(value).collect::<Result<_, _>>()?))
        }
        Node::List('[', ..) => Err(err_at(n.pos(), "a pair needs two values")),
        Node::List('{', items, ..) => Ok(Value::set(items.iter().map(value).collect::<Result<Vec<_>, _>>()?)),
        Node::List(..) => Err(err_at(n.pos(), "expected a value")),
    }
}

fn sym(n: &Node, what: &str) -> Result<String, ModelError> {
    match n {
        Node::Sym(s, ..) => Ok(s.clone()),
        _ => Err(err_at(n.pos(), format!("expected {what}"))),
    }
}

fn paren_list<'n>(n: &'n Node, what: &str) -> Result<&'n [Node], ModelError> {
    match n {
        Node::List('(', items, ..) => Ok(items),
        _ => Err(err_at(n.pos(), format!("expected a parenthesized {what}"))),
    }
}

fn value_list(n: &Node) -> Result<Vec<Value>, ModelError> {
    paren_list(n, "value list")?.iter().map(value).collect()
}

fn pair_list(n: &Node) -> Result<Vec<(Value, Value)>, ModelError> {
    paren_list(n, "list of pairs")?
        .iter()
        .map(|p| match paren_list(p, "pair")? {
            [a, b] => Ok((value(a)?, value(b)?)),
            _ => Err(err_at(p.pos(), "expected `(x y)`")),
        })
        .collect()
}

fn two_names(n: &Node) -> Result<(String, String), ModelError> {
    match paren_list(n, "(A B) signature")? {
        [a, b] => Ok((sym(a, "a set name")?, sym(b, "a set name")?)),
        _ => Err(err_at(n.pos(), "expected `(A B)`")),
    }
}

pub fn parse_interpretation(text: &str) -> Result<Interpretation, ModelError> {
    let tokens = lex(text)?;
    if tokens.is_empty() {
        return Err(err_at((1, 1), "expected `(interpretation ...)`"));
    }
    let mut pos = 0;
    let root = tree(&tokens, &mut pos)?;
    if let Some(extra) = tokens.get(pos) {
        return Err(err_at((extra.line, extra.column), "text after the interpretation"));
    }
    let entries = match &root {
        Node::List('(', items, ..) if matches!(items.first(), Some(Node::Sym(s, ..)) if s == "interpretation") => {
            &items[1..]
        }
        other => return Err(err_at(other.pos(), "expected `(interpretation ...)`")),
    };

    let mut sets: BTreeMap<String, FinSet> = BTreeMap::new();
    let mut interp = Interpretation::new();
    let bind = |interp: &mut Interpretation, name: String, d: Denotation, at: (u32, u32)| {
        interp.bind(name, d).map_err(|e| err_at(at, e.to_string()))
    };
    // sets first, so the other entries can refer to them in any order
    for e in entries {
        let items = paren_list(e, "entry")?;
        let head = items.first().map(|h| sym(h, "an entry head")).transpose()?;
        match head.as_deref() {
            Some("set") => {
                let [_, name, vals] = items else {
                    return Err(err_at(e.pos(), "expected `(set NAME (v ...))`"));
                };
                let name = sym(name, "a set name")?;
                let s = FinSet::new(value_list(vals)?);
                sets.insert(name.clone(), s.clone());
                bind(&mut interp, name, Denotation::Set(s), e.pos())?;
            }
            Some("element" | "function" | "predicate" | "relation") => {}
            Some(other) => return Err(err_at(e.pos(), format!("unknown entry `{other}`"))),
            None => return Err(err_at(e.pos(), "empty entry")),
        }
    }
    let lookup = |name: &str, at: (u32, u32)| {
        sets.get(name)
            .cloned()
            .ok_or_else(|| err_at(at, format!("unknown set `{name}`")))
    };
    for e in entries {
        let items = paren_list(e, "entry")?;
        let at = e.pos();
        let head = sym(&items[0], "an entry head")?;
        let d = match head.as_str() {
            "set" => continue,
            "element" => {
                let [_, name, set, v] = items else {
                    return Err(err_at(at, "expected `(element NAME SET v)`"));
                };
                let s = lookup(&sym(set, "a set name")?, set.pos())?;
                let v = value(v)?;
                if !s.contains(&v) {
                    return Err(err_at(at, format!("{v} is not in the set")));
                }
                (sym(name, "a name")?, Denotation::Individual(v))
            }
            "function" => {
                let [_, name, sig, graph] = items else {
                    return Err(err_at(at, "expected `(function NAME (SRC TGT) ((x y) ...))`"));
                };
                let (s, t) = two_names(sig)?;
                let (s, t) = (lookup(&s, sig.pos())?, lookup(&t, sig.pos())?);
                let mut g = BTreeMap::new();
                for (x, y) in pair_list(graph)? {
                    if g.insert(x.clone(), y).is_some() {
                        return Err(err_at(graph.pos(), format!("{x} is assigned twice")));
                    }
                }
                let f = FinFunction::new(s, t, g).map_err(|e| err_at(at, e.to_string()))?;
                (sym(name, "a name")?, Denotation::Function(f))
            }
            "predicate" => {
                let [_, name, genus, vals] = items else {
                    return Err(err_at(at, "expected `(predicate NAME GENUS (v ...))`"));
                };
                let g = lookup(&sym(genus, "a set name")?, genus.pos())?;
                let p = FinPredicate::new(g, FinSet::new(value_list(vals)?)).map_err(|e| err_at(at, e.to_string()))?;
                (sym(name, "a name")?, Denotation::Predicate(p))
            }
            "relation" => {
                let [_, name, sig, pairs] = items else {
                    return Err(err_at(at, "expected `(relation NAME (C0 C1) ((x y) ...))`"));
                };
                let (c0, c1) = two_names(sig)?;
                let (c0, c1) = (lookup(&c0, sig.pos())?, lookup(&c1, sig.pos())?);
                let extent = FinSet::new(pair_list(pairs)?.into_iter().map(|(x, y)| Value::pair(x, y)));
                let r = FinRelation::new(c0, c1, extent).map_err(|e| err_at(at, e.to_string()))?;
                (sym(name, "a name")?, Denotation::Relation(r))
            }
            _ => unreachable!("heads were validated in the first pass"),
        };
        bind(&mut interp, d.0, d.1, at)?;
    }
    Ok(interp)
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Atom(a) => out.push_str(a),
        Value::Pair(p) => {
            out.push('[');
            write_value(&p.0, out);
            out.push(' ');
            write_value(&p.1, out);
            out.push(']');
        }
        Value::Set(s) => {
            out.push('{');
            for (i, x) in s.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_value(x, out);
            }
            out.push('}');
        }
        Value::Fn(g) => {
            // written as its graph
            let pairs = Value::set(g.iter().map(|(x, y)| Value::pair(x.clone(), y.clone())));
            write_value(&pairs, out);
        }
    }
}

fn values(vs: &FinSet) -> String {
    let mut s = String::from("(");
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write_value(v, &mut s);
    }
    s.push(')');
    s
}

fn pairs<'a>(it: impl Iterator<Item = (&'a Value, &'a Value)>) -> String {
    let mut s = String::from("(");
    for (i, (x, y)) in it.enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push('(');
        write_value(x, &mut s);
        s.push(' ');
        write_value(y, &mut s);
        s.push(')');
    }
    s.push(')');
    s
}

/// Serializes an interpretation. Sets referenced by functions, predicates,
/// relations and elements must themselves be bound; anonymous ones are
/// emitted under generated names `_s0`, `_s1`, ...
pub fn write_interpretation(i: &Interpretation) -> String {
    let mut names: BTreeMap<FinSet, String> = BTreeMap::new();
    for (n, d) in i.bindings() {
        if let Denotation::Set(s) = d {
            names.entry(s.clone()).or_insert_with(|| n.clone());
        }
    }
    let mut extra = Vec::new();
    let mut name_of = |s: &FinSet, names: &mut BTreeMap<FinSet, String>| {
        if let Some(n) = names.get(s) {
            return n.clone();
        }
        let n = format!("_s{}", extra.len());
        extra.push((n.clone(), s.clone()));
        names.insert(s.clone(), n.clone());
        n
    };
    let mut body = Vec::new();
    for (n, d) in i.bindings() {
        let line = match d {
            Denotation::Set(s) => format!("(set {n} {})", values(s)),
            Denotation::Individual(v) => {
                let home = names.iter().find(|(s, _)| s.contains(v)).map(|(_, n)| n.clone());
                let sn = match home {
                    Some(n) => n,
                    None => name_of(&FinSet::new([v.clone()]), &mut names),
                };
                let mut vs = String::new();
                write_value(v, &mut vs);
                format!("(element {n} {sn} {vs})")
            }
            Denotation::Function(f) => {
                let s = name_of(f.source(), &mut names);
                let t = name_of(f.target(), &mut names);
                format!("(function {n} ({s} {t}) {})", pairs(f.graph().iter()))
            }
            Denotation::Predicate(p) => {
                let g = name_of(p.genus(), &mut names);
                format!("(predicate {n} {g} {})", values(p.extent()))
            }
            Denotation::Relation(r) => {
                let c0 = name_of(r.comp0(), &mut names);
                let c1 = name_of(r.comp1(), &mut names);
                let ps = r.extent().iter().filter_map(Value::as_pair);
                format!("(relation {n} ({c0} {c1}) {})", pairs(ps))
            }
        };
        body.push(line);
    }
    let mut out = String::from("(interpretation");
    for (n, s) in &extra {
        out.push_str(&format!("\n  (set {n} {})", values(s)));
    }
    for l in body {
        out.push_str("\n  ");
        out.push_str(&l);
    }
    out.push_str(")\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "; a small interpretation
        (interpretation
          (set G (0 1 2))
          (element e G 0)
          (function inv (G G) ((0 0) (1 2) (2 1)))
          (predicate even G (0 2))
          (relation le (G G) ((0 0) (0 1) (1 1)))
          (set fam ({0 1} {} [0 1])))";

    #[test]
    fn parses_every_entry_kind() {
        let i = parse_interpretation(SAMPLE).unwrap();
        assert_eq!(i.len(), 6);
        assert!(matches!(i.get("e"), Some(Denotation::Individual(v)) if *v == Value::atom("0")));
        let Some(Denotation::Function(f)) = i.get("inv") else { panic!() };
        assert_eq!(f.apply(&Value::atom("1")).unwrap(), &Value::atom("2"));
        let Some(Denotation::Set(fam)) = i.get("fam") else { panic!() };
        assert!(fam.contains(&Value::set([])));
        assert!(fam.contains(&Value::pair(Value::atom("0"), Value::atom("1"))));
    }

    #[test]
    fn round_trips_through_text() {
        let i = parse_interpretation(SAMPLE).unwrap();
        let text = write_interpretation(&i);
        assert_eq!(parse_interpretation(&text).unwrap(), i);
    }

    #[test]
    fn format_errors() {
        let cases = [
            ("(interpretation (color G (0)))", "unknown entry"),
            ("(interpretation (set G (0)) (element e G 5))", "not in the set"),
            ("(interpretation (function f (G G) ()))", "unknown set"),
            ("(interpretation (set G (0 1)) (function f (G G) ((0 1))))", "no image"),
            ("(interpretation (set G (0)) (set G (1)))", "bound twice"),
            ("(interpretation (set G (0))", "unclosed"),
            ("(model)", "expected `(interpretation"),
            ("", "expected `(interpretation"),
            ("(interpretation (set G (0 [1])))", "pair needs two"),
            ("(interpretation (set G (0 1)) (function f (G G) ((0 1) (0 0) (1 1))))", "assigned twice"),
        ];
        for (text, needle) in cases {
            let e = parse_interpretation(text).unwrap_err().to_string();
            assert!(e.contains(needle), "{text}: {e}");
        }
    }
}
