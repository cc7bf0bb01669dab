//! Lexing, parsing and canonical printing of IFF source text.
//!
//! The surface syntax is a small LISP-like notation: names and `?variables`,
//! applications `(f x)`, equations `(= s t)`, the connectives
//! `and or implies iff not`, restricted quantifiers
//! `(forall ((X0 ?x0) (X1 ?x1)) P)` and bracketed tuples `[?x ?y]`.
//!
//! Source files are framed as a sequence of namespace blocks:
//!
//! ```text
//! (namespace abc (level 0)
//!   (#n.set:set A)
//!   (= (#n.ftn:source f) A))
//! ```

use std::fmt;

use thiserror::Error;

use crate::names::Level;

/// Words that are keywords when they appear directly after `(`.
pub const KEYWORDS: [&str; 8] = ["forall", "exists", "and", "or", "implies", "iff", "not", "="];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Symbol,
    Variable,
    Keyword,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: u32,
    pub column: u32,
}

/// A location in a source file, used by diagnostics and symbol tables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Site {
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub namespace: String,
}

impl Site {
    pub fn new(file: impl Into<String>, line: u32, column: u32, namespace: impl Into<String>) -> Self {
        Site {
            file: file.into(),
            line,
            column,
            namespace: namespace.into(),
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{line}:{column}: illegal character {ch:?}")]
    IllegalCharacter { ch: char, line: u32, column: u32 },
    #[error("{line}:{column}: malformed symbol `{text}`")]
    MalformedSymbol { text: String, line: u32, column: u32 },
    #[error("{line}:{column}: unbalanced parentheses")]
    UnbalancedParens { line: u32, column: u32 },
    #[error("{line}:{column}: malformed quantifier: {reason}")]
    MalformedQuantifier { reason: String, line: u32, column: u32 },
    #[error("{line}:{column}: `{op}` applied to {found} argument(s)")]
    ArityError { op: String, found: usize, line: u32, column: u32 },
    #[error("{line}:{column}: unexpected `{text}`")]
    UnexpectedToken { text: String, line: u32, column: u32 },
    #[error("{line}:{column}: empty list")]
    EmptyList { line: u32, column: u32 },
    #[error("{line}:{column}: application of `{head}` has no arguments")]
    EmptyApplication { head: String, line: u32, column: u32 },
    #[error("{line}:{column}: a tuple needs at least two items")]
    TupleArity { line: u32, column: u32 },
    #[error("{line}:{column}: unexpected end of input")]
    UnexpectedEnd { line: u32, column: u32 },
    #[error("{line}:{column}: duplicate namespace `{name}`")]
    DuplicateNamespace { name: String, line: u32, column: u32 },
    #[error("{line}:{column}: {reason}")]
    MalformedUnit { reason: String, line: u32, column: u32 },
}

impl SyntaxError {
    pub fn position(&self) -> (u32, u32) {
        use SyntaxError::*;
        match self {
            IllegalCharacter { line, column, .. }
            | MalformedSymbol { line, column, .. }
            | UnbalancedParens { line, column }
            | MalformedQuantifier { line, column, .. }
            | ArityError { line, column, .. }
            | UnexpectedToken { line, column, .. }
            | EmptyList { line, column }
            | EmptyApplication { line, column, .. }
            | TupleArity { line, column }
            | UnexpectedEnd { line, column }
            | DuplicateNamespace { line, column, .. }
            | MalformedUnit { line, column, .. } => (*line, *column),
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '#' | '+' | '.' | ':' | '_' | '-')
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
    tokens: Vec<Token>,
    operator_position: bool,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            tokens: Vec::new(),
            operator_position: false,
            _src: src,
        }
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn push(&mut self, kind: TokenKind, text: String, line: u32, column: u32) {
        self.operator_position = kind == TokenKind::LParen;
        self.tokens.push(Token {
            kind,
            text,
            line,
            column,
        });
    }

    fn read_symbol_chars(&mut self, out: &mut String) {
        while let Some(c) = self.peek_at(0) {
            if !is_symbol_char(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
    }

    /// Recognizes the grouped level prefix `(#n+1).rest` and returns its
    /// length in chars (through the closing paren) when present.
    fn grouped_prefix_len(&self) -> Option<usize> {
        if self.peek_at(1) != Some('#') {
            return None;
        }
        let mut i = 2;
        while let Some(c) = self.peek_at(i) {
            if is_symbol_char(c) && c != '.' && c != ':' {
                i += 1;
            } else {
                break;
            }
        }
        if i > 2 && self.peek_at(i) == Some(')') && self.peek_at(i + 1) == Some('.') {
            Some(i + 1)
        } else {
            None
        }
    }

    fn check_symbol(&self, text: &str, line: u32, column: u32) -> Result<(), SyntaxError> {
        if text.matches(':').count() > 1 {
            return Err(SyntaxError::MalformedSymbol {
                text: text.to_string(),
                line,
                column,
            });
        }
        Ok(())
    }

    fn run(mut self) -> Result<Vec<Token>, SyntaxError> {
        while let Some(c) = self.peek_at(0) {
            let (line, column) = (self.line, self.column);
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                ';' => {
                    while let Some(c) = self.peek_at(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '(' => {
                    if let Some(len) = self.grouped_prefix_len() {
                        self.bump();
                        let mut text = String::new();
                        for _ in 1..len - 1 {
                            text.push(self.bump().unwrap());
                        }
                        self.bump();
                        self.read_symbol_chars(&mut text);
                        self.check_symbol(&text, line, column)?;
                        self.push(TokenKind::Symbol, text, line, column);
                    } else {
                        self.bump();
                        self.push(TokenKind::LParen, "(".into(), line, column);
                    }
                }
                ')' => {
                    self.bump();
                    self.push(TokenKind::RParen, ")".into(), line, column);
                }
                '[' => {
                    self.bump();
                    self.push(TokenKind::LBracket, "[".into(), line, column);
                }
                ']' => {
                    self.bump();
                    self.push(TokenKind::RBracket, "]".into(), line, column);
                }
                '=' => {
                    self.bump();
                    self.push(TokenKind::Keyword, "=".into(), line, column);
                }
                '?' => {
                    let mut text = String::from("?");
                    self.bump();
                    self.read_symbol_chars(&mut text);
                    if text.len() == 1 {
                        return Err(SyntaxError::MalformedSymbol { text, line, column });
                    }
                    self.check_symbol(&text, line, column)?;
                    self.push(TokenKind::Variable, text, line, column);
                }
                c if is_symbol_char(c) => {
                    let mut text = String::new();
                    self.read_symbol_chars(&mut text);
                    self.check_symbol(&text, line, column)?;
                    let kind = if self.operator_position && KEYWORDS.contains(&text.as_str()) {
                        TokenKind::Keyword
                    } else {
                        TokenKind::Symbol
                    };
                    self.push(kind, text, line, column);
                }
                ch => return Err(SyntaxError::IllegalCharacter { ch, line, column }),
            }
        }
        Ok(self.tokens)
    }
}

/// Splits IFF source text into tokens with 1-based line/column positions.
pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    Lexer::new(text).run()
}

// ---------------------------------------------------------------------------
// Syntax tree

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConnectiveOp {
    And,
    Or,
    Implies,
    Iff,
    Not,
}

impl ConnectiveOp {
    pub fn keyword(self) -> &'static str {
        match self {
            ConnectiveOp::And => "and",
            ConnectiveOp::Or => "or",
            ConnectiveOp::Implies => "implies",
            ConnectiveOp::Iff => "iff",
            ConnectiveOp::Not => "not",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "and" => ConnectiveOp::And,
            "or" => ConnectiveOp::Or,
            "implies" => ConnectiveOp::Implies,
            "iff" => ConnectiveOp::Iff,
            "not" => ConnectiveOp::Not,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantKind {
    Forall,
    Exists,
}

impl QuantKind {
    pub fn keyword(self) -> &'static str {
        match self {
            QuantKind::Forall => "forall",
            QuantKind::Exists => "exists",
        }
    }
}

/// One `(sort ?var)` entry of a quantifier. A missing sort is representable so
/// that the restricted-quantification check can report it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binding {
    pub sort: Option<Expr>,
    pub variable: String,
}

impl Binding {
    pub fn sorted(sort: Expr, variable: impl Into<String>) -> Self {
        Binding {
            sort: Some(sort),
            variable: variable.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Name(String),
    Variable(String),
    Tuple(Vec<Expr>),
    Apply { head: Box<Expr>, args: Vec<Expr> },
    Equation(Box<Expr>, Box<Expr>),
    Connective { op: ConnectiveOp, args: Vec<Expr> },
    Quantifier { kind: QuantKind, bindings: Vec<Binding>, body: Box<Expr> },
}

impl Expr {
    pub fn name(s: impl Into<String>) -> Self {
        Expr::Name(s.into())
    }

    pub fn var(s: impl Into<String>) -> Self {
        Expr::Variable(s.into())
    }

    pub fn apply(head: Expr, args: Vec<Expr>) -> Self {
        Expr::Apply {
            head: Box::new(head),
            args,
        }
    }

    pub fn eq(lhs: Expr, rhs: Expr) -> Self {
        Expr::Equation(Box::new(lhs), Box::new(rhs))
    }

    pub fn not(e: Expr) -> Self {
        Expr::Connective {
            op: ConnectiveOp::Not,
            args: vec![e],
        }
    }

    /// True when the expression contains no variables.
    pub fn is_ground(&self) -> bool {
        match self {
            Expr::Name(_) => true,
            Expr::Variable(_) => false,
            Expr::Tuple(items) => items.iter().all(Expr::is_ground),
            Expr::Apply { head, args } => head.is_ground() && args.iter().all(Expr::is_ground),
            Expr::Equation(l, r) => l.is_ground() && r.is_ground(),
            Expr::Connective { args, .. } => args.iter().all(Expr::is_ground),
            Expr::Quantifier { .. } => false,
        }
    }

    /// Visits every `Name` occurrence in the expression, left to right.
    pub fn for_each_name<'e>(&'e self, f: &mut impl FnMut(&'e str)) {
        match self {
            Expr::Name(n) => f(n),
            Expr::Variable(_) => {}
            Expr::Tuple(items) => items.iter().for_each(|e| e.for_each_name(f)),
            Expr::Apply { head, args } => {
                head.for_each_name(f);
                args.iter().for_each(|e| e.for_each_name(f));
            }
            Expr::Equation(l, r) => {
                l.for_each_name(f);
                r.for_each_name(f);
            }
            Expr::Connective { args, .. } => args.iter().for_each(|e| e.for_each_name(f)),
            Expr::Quantifier { bindings, body, .. } => {
                for b in bindings {
                    if let Some(s) = &b.sort {
                        s.for_each_name(f);
                    }
                }
                body.for_each_name(f);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_canonical(self))
    }
}

// ---------------------------------------------------------------------------
// Parser

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    /// Bare-symbol variables bound by enclosing quantifiers, innermost last.
    scopes: Vec<Vec<String>>,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        Parser {
            tokens,
            pos: 0,
            scopes: Vec::new(),
        }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_position(&self) -> (u32, u32) {
        self.tokens
            .last()
            .map(|t| (t.line, t.column + t.text.chars().count() as u32))
            .unwrap_or((1, 1))
    }

    fn unexpected_end(&self) -> SyntaxError {
        let (line, column) = self.end_position();
        SyntaxError::UnexpectedEnd { line, column }
    }

    fn is_bound_symbol(&self, text: &str) -> bool {
        self.scopes.iter().rev().any(|s| s.iter().any(|v| v == text))
    }

    fn parse_one(&mut self) -> Result<Expr, SyntaxError> {
        let tok = self.next().ok_or_else(|| self.unexpected_end())?;
        match tok.kind {
            TokenKind::Symbol => {
                if self.is_bound_symbol(&tok.text) {
                    Ok(Expr::Variable(tok.text.clone()))
                } else {
                    Ok(Expr::Name(tok.text.clone()))
                }
            }
            TokenKind::Variable => Ok(Expr::Variable(tok.text.clone())),
            TokenKind::Keyword => Err(SyntaxError::UnexpectedToken {
                text: tok.text.clone(),
                line: tok.line,
                column: tok.column,
            }),
            TokenKind::RParen | TokenKind::RBracket => Err(SyntaxError::UnbalancedParens {
                line: tok.line,
                column: tok.column,
            }),
            TokenKind::LBracket => self.parse_tuple(tok),
            TokenKind::LParen => self.parse_list(tok),
        }
    }

    /// Parses items until the closer of `open`; an exhausted stream means the
    /// opener was never closed.
    fn parse_until_close(&mut self, open: &Token, close: TokenKind) -> Result<Vec<Expr>, SyntaxError> {
        let mut items = Vec::new();
        loop {
            match self.peek() {
                None => {
                    return Err(SyntaxError::UnbalancedParens {
                        line: open.line,
                        column: open.column,
                    })
                }
                Some(t) if t.kind == close => {
                    self.pos += 1;
                    return Ok(items);
                }
                Some(t) if matches!(t.kind, TokenKind::RParen | TokenKind::RBracket) => {
                    return Err(SyntaxError::UnbalancedParens {
                        line: t.line,
                        column: t.column,
                    })
                }
                Some(_) => items.push(self.parse_one()?),
            }
        }
    }

    fn parse_tuple(&mut self, open: &Token) -> Result<Expr, SyntaxError> {
        let items = self.parse_until_close(open, TokenKind::RBracket)?;
        if items.len() < 2 {
            return Err(SyntaxError::TupleArity {
                line: open.line,
                column: open.column,
            });
        }
        Ok(Expr::Tuple(items))
    }

    fn parse_list(&mut self, open: &Token) -> Result<Expr, SyntaxError> {
        let first = match self.peek() {
            None => {
                return Err(SyntaxError::UnbalancedParens {
                    line: open.line,
                    column: open.column,
                })
            }
            Some(t) => t,
        };
        match first.kind {
            TokenKind::RParen => Err(SyntaxError::EmptyList {
                line: open.line,
                column: open.column,
            }),
            TokenKind::Keyword => {
                self.pos += 1;
                match first.text.as_str() {
                    "forall" => self.parse_quantifier(QuantKind::Forall, open, first),
                    "exists" => self.parse_quantifier(QuantKind::Exists, open, first),
                    "=" => {
                        let args = self.parse_until_close(open, TokenKind::RParen)?;
                        if args.len() != 2 {
                            return Err(SyntaxError::ArityError {
                                op: "=".into(),
                                found: args.len(),
                                line: first.line,
                                column: first.column,
                            });
                        }
                        let mut it = args.into_iter();
                        let lhs = it.next().unwrap();
                        let rhs = it.next().unwrap();
                        Ok(Expr::eq(lhs, rhs))
                    }
                    kw => {
                        let op = ConnectiveOp::from_keyword(kw).expect("keyword table covers connectives");
                        let args = self.parse_until_close(open, TokenKind::RParen)?;
                        let ok = match op {
                            ConnectiveOp::Not => args.len() == 1,
                            ConnectiveOp::Implies | ConnectiveOp::Iff => args.len() == 2,
                            ConnectiveOp::And | ConnectiveOp::Or => args.len() >= 2,
                        };
                        if !ok {
                            return Err(SyntaxError::ArityError {
                                op: kw.to_string(),
                                found: args.len(),
                                line: first.line,
                                column: first.column,
                            });
                        }
                        Ok(fold_connective(op, args))
                    }
                }
            }
            _ => {
                let head = self.parse_one()?;
                let args = self.parse_until_close(open, TokenKind::RParen)?;
                if args.is_empty() {
                    return Err(SyntaxError::EmptyApplication {
                        head: print_canonical(&head),
                        line: first.line,
                        column: first.column,
                    });
                }
                Ok(Expr::apply(head, args))
            }
        }
    }

    fn malformed(&self, reason: &str, at: &Token) -> SyntaxError {
        SyntaxError::MalformedQuantifier {
            reason: reason.to_string(),
            line: at.line,
            column: at.column,
        }
    }

    fn bound_name(&self, tok: &Token) -> Result<String, SyntaxError> {
        match tok.kind {
            TokenKind::Variable => Ok(tok.text.clone()),
            TokenKind::Symbol if !KEYWORDS.contains(&tok.text.as_str()) => Ok(tok.text.clone()),
            _ => Err(self.malformed("expected a variable", tok)),
        }
    }

    fn parse_quantifier(&mut self, kind: QuantKind, open: &Token, kw: &Token) -> Result<Expr, SyntaxError> {
        let list_open = match self.next() {
            Some(t) if t.kind == TokenKind::LParen => t,
            Some(t) => return Err(self.malformed("bindings must be a parenthesized list", t)),
            None => return Err(self.unexpected_end()),
        };
        self.scopes.push(Vec::new());
        let result = self.parse_quantifier_rest(kind, open, kw, list_open);
        self.scopes.pop();
        result
    }

    fn parse_quantifier_rest(
        &mut self,
        kind: QuantKind,
        open: &Token,
        kw: &Token,
        list_open: &Token,
    ) -> Result<Expr, SyntaxError> {
        let mut bindings = Vec::new();
        loop {
            let tok = match self.next() {
                Some(t) => t,
                None => {
                    return Err(SyntaxError::UnbalancedParens {
                        line: list_open.line,
                        column: list_open.column,
                    })
                }
            };
            match tok.kind {
                TokenKind::RParen => break,
                TokenKind::Variable => bindings.push(Binding {
                    sort: None,
                    variable: tok.text.clone(),
                }),
                TokenKind::LParen => {
                    let b = self.parse_binding(tok)?;
                    if !b.variable.starts_with('?') {
                        self.scopes.last_mut().unwrap().push(b.variable.clone());
                    }
                    bindings.push(b);
                }
                _ => return Err(self.malformed("a binding must be `(sort ?var)`", tok)),
            }
        }
        if bindings.is_empty() {
            return Err(self.malformed("empty binding list", list_open));
        }
        let body = match self.peek() {
            None => {
                return Err(SyntaxError::UnbalancedParens {
                    line: open.line,
                    column: open.column,
                })
            }
            Some(t) if t.kind == TokenKind::RParen => {
                return Err(self.malformed("missing body", t));
            }
            Some(_) => self.parse_one()?,
        };
        match self.next() {
            Some(t) if t.kind == TokenKind::RParen => Ok(Expr::Quantifier {
                kind,
                bindings,
                body: Box::new(body),
            }),
            Some(t) => Err(self.malformed("a quantifier takes exactly one body", t)),
            None => Err(SyntaxError::UnbalancedParens {
                line: kw.line,
                column: kw.column,
            }),
        }
    }

    fn parse_binding(&mut self, open: &Token) -> Result<Binding, SyntaxError> {
        let first = self.peek().ok_or_else(|| self.unexpected_end())?;
        if first.kind == TokenKind::Keyword {
            return Err(self.malformed("a keyword cannot be a sort", first));
        }
        // `(?x)`: a binding without a sort.
        if first.kind == TokenKind::Variable {
            if let Some(close) = self.tokens.get(self.pos + 1) {
                if close.kind == TokenKind::RParen {
                    self.pos += 2;
                    return Ok(Binding {
                        sort: None,
                        variable: first.text.clone(),
                    });
                }
            }
        }
        if first.kind == TokenKind::RParen {
            return Err(self.malformed("empty binding", open));
        }
        let sort = self.parse_one()?;
        let var_tok = self.next().ok_or_else(|| self.unexpected_end())?;
        let variable = self.bound_name(var_tok)?;
        match self.next() {
            Some(t) if t.kind == TokenKind::RParen => Ok(Binding::sorted(sort, variable)),
            Some(t) => Err(self.malformed("a binding pairs one sort with one variable", t)),
            None => Err(SyntaxError::UnbalancedParens {
                line: open.line,
                column: open.column,
            }),
        }
    }
}

fn fold_connective(op: ConnectiveOp, args: Vec<Expr>) -> Expr {
    if matches!(op, ConnectiveOp::And | ConnectiveOp::Or) && args.len() > 2 {
        let mut it = args.into_iter();
        let first = it.next().unwrap();
        it.fold(first, |acc, e| Expr::Connective {
            op,
            args: vec![acc, e],
        })
    } else {
        Expr::Connective { op, args }
    }
}

/// Parses exactly one expression from a token stream.
pub fn parse_expr(tokens: &[Token]) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(tokens);
    let e = p.parse_one()?;
    if let Some(t) = p.peek() {
        return Err(match t.kind {
            TokenKind::RParen | TokenKind::RBracket => SyntaxError::UnbalancedParens {
                line: t.line,
                column: t.column,
            },
            _ => SyntaxError::UnexpectedToken {
                text: t.text.clone(),
                line: t.line,
                column: t.column,
            },
        });
    }
    Ok(e)
}

/// Tokenizes and parses a single expression.
pub fn parse_expr_str(text: &str) -> Result<Expr, SyntaxError> {
    parse_expr(&tokenize(text)?)
}

// ---------------------------------------------------------------------------
// Source units

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub expr: Expr,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamespaceBlock {
    pub name: String,
    pub level: Level,
    pub axioms: Vec<Axiom>,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceUnit {
    pub file: String,
    pub namespaces: Vec<NamespaceBlock>,
}

impl SourceUnit {
    pub fn with_file(mut self, file: impl Into<String>) -> Self {
        self.file = file.into();
        self
    }

    pub fn namespace(&self, name: &str) -> Option<&NamespaceBlock> {
        self.namespaces.iter().find(|n| n.name == name)
    }

    pub fn axiom_count(&self) -> usize {
        self.namespaces.iter().map(|n| n.axioms.len()).sum()
    }

    pub fn site(&self, ns: &NamespaceBlock, axiom: &Axiom) -> Site {
        Site::new(self.file.clone(), axiom.line, axiom.column, ns.name.clone())
    }
}

fn expect_symbol<'t>(p: &mut Parser<'t>, what: &str) -> Result<&'t Token, SyntaxError> {
    match p.next() {
        Some(t) if t.kind == TokenKind::Symbol => Ok(t),
        Some(t) => Err(SyntaxError::MalformedUnit {
            reason: format!("expected {what}, found `{}`", t.text),
            line: t.line,
            column: t.column,
        }),
        None => Err(p.unexpected_end()),
    }
}

fn expect_kind<'t>(p: &mut Parser<'t>, kind: TokenKind, what: &str) -> Result<&'t Token, SyntaxError> {
    match p.next() {
        Some(t) if t.kind == kind => Ok(t),
        Some(t) => Err(SyntaxError::MalformedUnit {
            reason: format!("expected {what}, found `{}`", t.text),
            line: t.line,
            column: t.column,
        }),
        None => Err(p.unexpected_end()),
    }
}

/// Parses a `.iff` source file into its namespace blocks.
pub fn parse_unit(text: &str) -> Result<SourceUnit, SyntaxError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(&tokens);
    let mut unit = SourceUnit {
        file: "<input>".to_string(),
        namespaces: Vec::new(),
    };
    while p.peek().is_some() {
        let open = expect_kind(&mut p, TokenKind::LParen, "`(namespace ...)`")?;
        let kw = expect_symbol(&mut p, "`namespace`")?;
        if kw.text != "namespace" {
            return Err(SyntaxError::MalformedUnit {
                reason: format!("expected `namespace`, found `{}`", kw.text),
                line: kw.line,
                column: kw.column,
            });
        }
        let name = expect_symbol(&mut p, "a namespace name")?;
        let lopen = expect_kind(&mut p, TokenKind::LParen, "`(level ...)`")?;
        let lkw = expect_symbol(&mut p, "`level`")?;
        if lkw.text != "level" {
            return Err(SyntaxError::MalformedUnit {
                reason: format!("expected `level`, found `{}`", lkw.text),
                line: lkw.line,
                column: lkw.column,
            });
        }
        let lvl = expect_symbol(&mut p, "a level")?;
        let level = Level::parse_decl(&lvl.text).ok_or_else(|| SyntaxError::MalformedUnit {
            reason: format!("unknown level `{}`", lvl.text),
            line: lvl.line,
            column: lvl.column,
        })?;
        match p.next() {
            Some(t) if t.kind == TokenKind::RParen => {}
            Some(t) => {
                return Err(SyntaxError::MalformedUnit {
                    reason: "a level declaration has exactly one level".into(),
                    line: t.line,
                    column: t.column,
                })
            }
            None => {
                return Err(SyntaxError::UnbalancedParens {
                    line: lopen.line,
                    column: lopen.column,
                })
            }
        }
        let mut axioms = Vec::new();
        loop {
            match p.peek() {
                None => {
                    return Err(SyntaxError::UnbalancedParens {
                        line: open.line,
                        column: open.column,
                    })
                }
                Some(t) if t.kind == TokenKind::RParen => {
                    p.pos += 1;
                    break;
                }
                Some(t) => {
                    let (line, column) = (t.line, t.column);
                    let expr = p.parse_one()?;
                    axioms.push(Axiom { expr, line, column });
                }
            }
        }
        if unit.namespaces.iter().any(|n| n.name == name.text) {
            return Err(SyntaxError::DuplicateNamespace {
                name: name.text.clone(),
                line: name.line,
                column: name.column,
            });
        }
        unit.namespaces.push(NamespaceBlock {
            name: name.text.clone(),
            level,
            axioms,
            line: open.line,
            column: open.column,
        });
    }
    Ok(unit)
}

// ---------------------------------------------------------------------------
// Printing

fn write_canonical(e: &Expr, out: &mut String) {
    match e {
        Expr::Name(n) | Expr::Variable(n) => out.push_str(n),
        Expr::Tuple(items) => {
            out.push('[');
            write_joined(items, out);
            out.push(']');
        }
        Expr::Apply { head, args } => {
            out.push('(');
            write_canonical(head, out);
            for a in args {
                out.push(' ');
                write_canonical(a, out);
            }
            out.push(')');
        }
        Expr::Equation(l, r) => {
            out.push_str("(= ");
            write_canonical(l, out);
            out.push(' ');
            write_canonical(r, out);
            out.push(')');
        }
        Expr::Connective { op, args } => {
            out.push('(');
            out.push_str(op.keyword());
            for a in args {
                out.push(' ');
                write_canonical(a, out);
            }
            out.push(')');
        }
        Expr::Quantifier { kind, bindings, body } => {
            out.push('(');
            out.push_str(kind.keyword());
            out.push_str(" (");
            for (i, b) in bindings.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                match &b.sort {
                    Some(s) => {
                        out.push('(');
                        write_canonical(s, out);
                        out.push(' ');
                        out.push_str(&b.variable);
                        out.push(')');
                    }
                    None => out.push_str(&b.variable),
                }
            }
            out.push_str(") ");
            write_canonical(body, out);
            out.push(')');
        }
    }
}

fn write_joined(items: &[Expr], out: &mut String) {
    for (i, e) in items.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write_canonical(e, out);
    }
}

/// Renders an expression on one line with single spaces between siblings.
pub fn print_canonical(e: &Expr) -> String {
    let mut out = String::new();
    write_canonical(e, &mut out);
    out
}

/// Renders a whole unit in canonical layout: one axiom per line, two-space
/// indent, a blank line between namespace blocks.
pub fn print_unit(unit: &SourceUnit) -> String {
    let mut out = String::new();
    for (i, ns) in unit.namespaces.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("(namespace {} (level {})", ns.name, ns.level.decl_text()));
        for ax in &ns.axioms {
            out.push_str("\n  ");
            out.push_str(&print_canonical(&ax.expr));
        }
        out.push_str(")\n");
    }
    out
}
