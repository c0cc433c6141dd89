//! Concrete syntax: a hand-rolled lexer and recursive-descent parser for
//! terms, store terms, types, and derivation files.
//!
//! Term grammar (ASCII):
//!
//! ```text
//! term  ::= bind (';' term)?                    -- sequencing, right assoc
//! bind  ::= app ('>>=' value)*                  -- left assoc
//! app   ::= atom+                               -- application, left assoc
//! atom  ::= ident | '\' ident '.' term | 'unit' atom
//!         | 'get' '[' loc ']' '(' '\' ident '.' term ')'
//!         | 'set' '[' loc ']' '(' term ')' '.' term
//!         | 'let' ident '=' term 'in' term
//!         | '(' term ')'
//! ```
//!
//! Lambdas and the set continuation extend maximally to the right. Stores
//! are `emp`, `upd(l, u, s)` and lookup arguments `lkp(l, s)`, the latter
//! well-formed only when `l` is in the domain of `s`. Types follow
//! `wD | d -> t | d /\ d'` and friends, with `/\` binding tighter than `x`,
//! which binds tighter than the right-associative `->`.

use std::fmt;

use lamgs_core::store::{dom_store, LookupTerm, StoreTerm};
use lamgs_core::syntax::Computation;
use lamgs_core::syntax::{desugar, Location, Name, Surface, Value};
use lamgs_core::types::{normalize_type, AnyType, RawType};
use lamgs_core::typing::{Context, Derivation, Judgment, Rule, Subject};

/// Byte offsets plus line and column of an error position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub begin: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at line {}, column {}: expected {}, found {}",
            self.span.line, self.span.column, self.expected, self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Loc(u32),
    Lambda,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    Comma,
    Semi,
    Colon,
    Equals,
    BindOp,    // >>=
    Arrow,     // ->
    And,       // /\
    Turnstile, // |-
    Unit,
    Get,
    Set,
    Let,
    In,
    Emp,
    Upd,
    Lkp,
    WD,
    WS,
    WC,
    WT,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Loc(n) => format!("location `l{n}`"),
            Tok::Lambda => "`\\`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LAngle => "`<`".into(),
            Tok::RAngle => "`>`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Equals => "`=`".into(),
            Tok::BindOp => "`>>=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::And => "`/\\`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Unit => "`unit`".into(),
            Tok::Get => "`get`".into(),
            Tok::Set => "`set`".into(),
            Tok::Let => "`let`".into(),
            Tok::In => "`in`".into(),
            Tok::Emp => "`emp`".into(),
            Tok::Upd => "`upd`".into(),
            Tok::Lkp => "`lkp`".into(),
            Tok::WD => "`wD`".into(),
            Tok::WS => "`wS`".into(),
            Tok::WC => "`wC`".into(),
            Tok::WT => "`wT`".into(),
        }
    }
}

struct Lexer;

impl Lexer {
    fn lex(input: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
        let bytes = input.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        let (mut line, mut col) = (1usize, 1usize);
        let span_at = |begin: usize, end: usize, line: usize, column: usize| SourceSpan {
            begin,
            end,
            line,
            column,
        };
        while i < bytes.len() {
            let c = bytes[i] as char;
            let (l0, c0) = (line, col);
            match c {
                ' ' | '\t' | '\r' => {
                    i += 1;
                    col += 1;
                }
                '\n' => {
                    i += 1;
                    line += 1;
                    col = 1;
                }
                '\\' => {
                    out.push((Tok::Lambda, span_at(i, i + 1, l0, c0)));
                    i += 1;
                    col += 1;
                }
                '.' => {
                    out.push((Tok::Dot, span_at(i, i + 1, l0, c0)));
                    i += 1;
                    col += 1;
                }
                '(' => {
                    out.push((Tok::LParen, span_at(i, i + 1, l0, c0)));
                    i += 1;
                    col += 1;
                }
                ')' => {
                    out.push((Tok::RParen, span_at(i, i + 1, l0, c0)));
                    i += 1;
                    col += 1;
                }
                '[' => {
                    out.push((Tok::LBracket, span_at(i, i + 1, l0, c0)));
                    i += 1;
                    col += 1;
                }
                ']' => {
                    out.push((Tok::RBracket, span_at(i, i + 1, l0, c0)));
                    i += 1;
                    col += 1;
                }
                '<' => {
                    out.push((Tok::LAngle, span_at(i, i + 1, l0, c0)));
                    i += 1;
                    col += 1;
                }
                ',' => {
                    out.push((Tok::Comma, span_at(i, i + 1, l0, c0)));
                    i += 1;
                    col += 1;
                }
                ';' => {
                    out.push((Tok::Semi, span_at(i, i + 1, l0, c0)));
                    i += 1;
                    col += 1;
                }
                ':' => {
                    out.push((Tok::Colon, span_at(i, i + 1, l0, c0)));
                    i += 1;
                    col += 1;
                }
                '=' => {
                    out.push((Tok::Equals, span_at(i, i + 1, l0, c0)));
                    i += 1;
                    col += 1;
                }
                '>' => {
                    if input[i..].starts_with(">>=") {
                        out.push((Tok::BindOp, span_at(i, i + 3, l0, c0)));
                        i += 3;
                        col += 3;
                    } else {
                        out.push((Tok::RAngle, span_at(i, i + 1, l0, c0)));
                        i += 1;
                        col += 1;
                    }
                }
                '-' => {
                    if input[i..].starts_with("->") {
                        out.push((Tok::Arrow, span_at(i, i + 2, l0, c0)));
                        i += 2;
                        col += 2;
                    } else {
                        return Err(ParseError {
                            span: span_at(i, i + 1, l0, c0),
                            expected: "`->`".into(),
                            found: "`-`".into(),
                        });
                    }
                }
                '/' => {
                    if input[i..].starts_with("/\\") {
                        out.push((Tok::And, span_at(i, i + 2, l0, c0)));
                        i += 2;
                        col += 2;
                    } else {
                        return Err(ParseError {
                            span: span_at(i, i + 1, l0, c0),
                            expected: "`/\\`".into(),
                            found: "`/`".into(),
                        });
                    }
                }
                '|' => {
                    if input[i..].starts_with("|-") {
                        out.push((Tok::Turnstile, span_at(i, i + 2, l0, c0)));
                        i += 2;
                        col += 2;
                    } else {
                        return Err(ParseError {
                            span: span_at(i, i + 1, l0, c0),
                            expected: "`|-`".into(),
                            found: "`|`".into(),
                        });
                    }
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < bytes.len()
                        && ((bytes[i] as char).is_ascii_alphanumeric()
                            || bytes[i] == b'_'
                            || bytes[i] == b'\'')
                    {
                        i += 1;
                        col += 1;
                    }
                    let word = &input[start..i];
                    let tok = match word {
                        "unit" => Tok::Unit,
                        "get" => Tok::Get,
                        "set" => Tok::Set,
                        "let" => Tok::Let,
                        "in" => Tok::In,
                        "emp" => Tok::Emp,
                        "upd" => Tok::Upd,
                        "lkp" => Tok::Lkp,
                        "wD" => Tok::WD,
                        "wS" => Tok::WS,
                        "wC" => Tok::WC,
                        "wT" => Tok::WT,
                        _ => {
                            // Locations look like l0, l1, ...
                            if let Some(rest) = word.strip_prefix('l') {
                                if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                                    out.push((
                                        Tok::Loc(rest.parse().unwrap()),
                                        span_at(start, i, l0, c0),
                                    ));
                                    continue;
                                }
                            }
                            Tok::Ident(word.to_string())
                        }
                    };
                    out.push((tok, span_at(start, i, l0, c0)));
                }
                other => {
                    return Err(ParseError {
                        span: span_at(i, i + 1, l0, c0),
                        expected: "a token".into(),
                        found: format!("`{other}`"),
                    })
                }
            }
        }
        Ok(out)
    }
}

pub struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    eof: SourceSpan,
}

impl Parser {
    pub fn new(input: &str) -> Result<Parser, ParseError> {
        let toks = Lexer::lex(input)?;
        let lines = input.lines().count().max(1);
        let last_line_len = input.lines().last().map(str::len).unwrap_or(0);
        let eof = SourceSpan {
            begin: input.len(),
            end: input.len(),
            line: lines,
            column: last_line_len + 1,
        };
        Ok(Parser { toks, pos: 0, eof })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map(|(_, s)| *s).unwrap_or(self.eof)
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            span: self.span(),
            expected: expected.into(),
            found: self
                .peek()
                .map(|t| t.describe())
                .unwrap_or_else(|| "end of input".into()),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let n = Name::new(s.clone());
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn location(&mut self) -> Result<Location, ParseError> {
        match self.peek() {
            Some(Tok::Loc(n)) => {
                let l = Location(*n);
                self.pos += 1;
                Ok(l)
            }
            _ => Err(self.error("a location like `l0`")),
        }
    }

    // -- terms ------------------------------------------------------------

    pub fn surface(&mut self) -> Result<Surface, ParseError> {
        let head = self.surface_bind()?;
        if self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            let rest = self.surface()?;
            return Ok(Surface::Seq(Box::new(head), Box::new(rest)));
        }
        Ok(head)
    }

    fn surface_bind(&mut self) -> Result<Surface, ParseError> {
        let mut acc = self.surface_app()?;
        while self.peek() == Some(&Tok::BindOp) {
            self.pos += 1;
            let rhs = if self.peek() == Some(&Tok::Lambda) {
                // A lambda extends maximally right and ends the chain.
                let v = self.surface_lambda()?;
                acc = Surface::Bind(Box::new(acc), Box::new(v));
                return Ok(acc);
            } else {
                self.surface_atom()?
            };
            acc = Surface::Bind(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn surface_app(&mut self) -> Result<Surface, ParseError> {
        let mut acc = self.surface_atom_or_lambda()?;
        while self.starts_atom() {
            let arg = self.surface_atom_or_lambda()?;
            acc = Surface::App(Box::new(acc), Box::new(arg));
        }
        Ok(acc)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(
                Tok::Ident(_)
                    | Tok::Lambda
                    | Tok::Unit
                    | Tok::Get
                    | Tok::Set
                    | Tok::Let
                    | Tok::LParen
            )
        )
    }

    fn surface_atom_or_lambda(&mut self) -> Result<Surface, ParseError> {
        if self.peek() == Some(&Tok::Lambda) {
            self.surface_lambda()
        } else {
            self.surface_atom()
        }
    }

    fn surface_lambda(&mut self) -> Result<Surface, ParseError> {
        self.expect(Tok::Lambda, "`\\`")?;
        let x = self.ident()?;
        self.expect(Tok::Dot, "`.` after the binder")?;
        let body = self.surface()?;
        Ok(Surface::Lam(x, Box::new(body)))
    }

    fn surface_atom(&mut self) -> Result<Surface, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => Ok(Surface::Var(self.ident()?)),
            Some(Tok::Unit) => {
                self.pos += 1;
                let v = self.surface_atom_or_lambda()?;
                Ok(Surface::Unit(Box::new(v)))
            }
            Some(Tok::Get) => {
                self.pos += 1;
                self.expect(Tok::LBracket, "`[` after `get`")?;
                let l = self.location()?;
                self.expect(Tok::RBracket, "`]`")?;
                self.expect(Tok::LParen, "`(`")?;
                self.expect(Tok::Lambda, "`\\`: get takes an abstraction")?;
                let x = self.ident()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.surface()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Surface::Get(l, x, Box::new(body)))
            }
            Some(Tok::Set) => {
                self.pos += 1;
                self.expect(Tok::LBracket, "`[` after `set`")?;
                let l = self.location()?;
                self.expect(Tok::RBracket, "`]`")?;
                self.expect(Tok::LParen, "`(`")?;
                let v = self.surface()?;
                self.expect(Tok::RParen, "`)`")?;
                self.expect(Tok::Dot, "`.` after the written value")?;
                let rest = self.surface()?;
                Ok(Surface::Set(l, Box::new(v), Box::new(rest)))
            }
            Some(Tok::Let) => {
                self.pos += 1;
                let x = self.ident()?;
                self.expect(Tok::Equals, "`=`")?;
                let m = self.surface()?;
                self.expect(Tok::In, "`in`")?;
                let n = self.surface()?;
                Ok(Surface::Let(x, Box::new(m), Box::new(n)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.surface()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("a term")),
        }
    }

    // -- stores -----------------------------------------------------------

    pub fn store(&mut self) -> Result<StoreTerm, ParseError> {
        match self.peek() {
            Some(Tok::Emp) => {
                self.pos += 1;
                Ok(StoreTerm::Emp)
            }
            Some(Tok::Upd) => {
                self.pos += 1;
                self.expect(Tok::LParen, "`(` after `upd`")?;
                let l = self.location()?;
                self.expect(Tok::Comma, "`,`")?;
                let u = self.lookup_arg()?;
                self.expect(Tok::Comma, "`,`")?;
                let s = self.store()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(StoreTerm::Upd(l, u, std::sync::Arc::new(s)))
            }
            _ => Err(self.error("a store (`emp` or `upd(..)`)")),
        }
    }

    fn lookup_arg(&mut self) -> Result<LookupTerm, ParseError> {
        if self.peek() == Some(&Tok::Lkp) {
            let span = self.span();
            self.pos += 1;
            self.expect(Tok::LParen, "`(` after `lkp`")?;
            let l = self.location()?;
            self.expect(Tok::Comma, "`,`")?;
            let s = self.store()?;
            self.expect(Tok::RParen, "`)`")?;
            if !dom_store(&s).contains(&l) {
                return Err(ParseError {
                    span,
                    expected: format!("a store defining {l} under the lookup"),
                    found: "a store that does not".into(),
                });
            }
            Ok(LookupTerm::Lkp(l, std::sync::Arc::new(s)))
        } else {
            let surface = self.surface()?;
            let v = to_value(&surface, self.span())?;
            Ok(LookupTerm::Val(v))
        }
    }

    // -- types ------------------------------------------------------------

    pub fn raw_type(&mut self) -> Result<RawType, ParseError> {
        // arrow level, right associative
        let lhs = self.type_prod()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.raw_type()?;
            return Ok(RawType::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn type_prod(&mut self) -> Result<RawType, ParseError> {
        let lhs = self.type_and()?;
        if let Some(Tok::Ident(s)) = self.peek() {
            if s == "x" {
                self.pos += 1;
                let rhs = self.type_and()?;
                return Ok(RawType::prod(lhs, rhs));
            }
        }
        Ok(lhs)
    }

    fn type_and(&mut self) -> Result<RawType, ParseError> {
        let mut acc = self.type_atom()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.type_atom()?;
            acc = RawType::and(acc, rhs);
        }
        Ok(acc)
    }

    fn type_atom(&mut self) -> Result<RawType, ParseError> {
        match self.peek() {
            Some(Tok::WD) => {
                self.pos += 1;
                Ok(RawType::WD)
            }
            Some(Tok::WS) => {
                self.pos += 1;
                Ok(RawType::WS)
            }
            Some(Tok::WC) => {
                self.pos += 1;
                Ok(RawType::WC)
            }
            Some(Tok::WT) => {
                self.pos += 1;
                Ok(RawType::WT)
            }
            Some(Tok::LAngle) => {
                self.pos += 1;
                let l = self.location()?;
                self.expect(Tok::Colon, "`:`")?;
                let d = self.raw_type()?;
                self.expect(Tok::RAngle, "`>`")?;
                Ok(RawType::entry(l, d))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.raw_type()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("a type")),
        }
    }

    // -- judgments and derivations ------------------------------------------

    fn subject(&mut self) -> Result<Subject, ParseError> {
        match self.peek() {
            Some(Tok::Emp | Tok::Upd) => Ok(Subject::Store(self.store()?)),
            Some(Tok::Lkp) => match self.lookup_arg()? {
                LookupTerm::Lkp(l, s) => Ok(Subject::Lookup(LookupTerm::Lkp(l, s))),
                LookupTerm::Val(_) => unreachable!("lkp token parses a lookup"),
            },
            Some(Tok::LParen) => {
                // Either a configuration `(M, s)` or a parenthesized term.
                let save = self.pos;
                self.pos += 1;
                let surface = self.surface()?;
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    let store = self.store()?;
                    self.expect(Tok::RParen, "`)`")?;
                    let m = to_comp(&surface, self.span())?;
                    return Ok(Subject::Config(m, store));
                }
                self.pos = save;
                let surface = self.surface()?;
                self.classify_term(surface)
            }
            _ => {
                let surface = self.surface()?;
                self.classify_term(surface)
            }
        }
    }

    fn classify_term(&self, surface: Surface) -> Result<Subject, ParseError> {
        if matches!(surface, Surface::Var(_) | Surface::Lam(_, _)) {
            Ok(Subject::Val(to_value(&surface, self.span())?))
        } else {
            Ok(Subject::Comp(to_comp(&surface, self.span())?))
        }
    }

    fn judgment(&mut self) -> Result<Judgment, ParseError> {
        self.expect(Tok::LBracket, "`[` opening the context")?;
        let mut pairs = Vec::new();
        if self.peek() != Some(&Tok::RBracket) {
            loop {
                let x = self.ident()?;
                self.expect(Tok::Colon, "`:`")?;
                let raw = self.raw_type()?;
                let ty = self.normalize(raw)?;
                let AnyType::D(d) = ty else {
                    return Err(self.error("a value type in the context"));
                };
                pairs.push((x, d));
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBracket, "`]` closing the context")?;
        self.expect(Tok::Turnstile, "`|-`")?;
        let subject = self.subject()?;
        self.expect(Tok::Colon, "`:` before the type")?;
        let raw = self.raw_type()?;
        let ty = self.normalize(raw)?;
        Ok(Judgment {
            ctx: Context::from_pairs(pairs),
            subject,
            ty,
        })
    }

    fn normalize(&self, raw: RawType) -> Result<AnyType, ParseError> {
        normalize_type(&raw).map_err(|e| ParseError {
            span: self.span(),
            expected: "a well-sorted type".into(),
            found: e.to_string(),
        })
    }

    pub fn derivation(&mut self) -> Result<Derivation, ParseError> {
        self.expect(Tok::LParen, "`(` opening a derivation node")?;
        let rule = match self.bump() {
            Some(Tok::Ident(s)) => Rule::from_name(&s).ok_or_else(|| self.error("a rule name"))?,
            Some(Tok::Unit) => Rule::Unit,
            Some(Tok::Get) => Rule::Get,
            Some(Tok::Set) => Rule::Set,
            _ => return Err(self.error("a rule name")),
        };
        let conclusion = self.judgment()?;
        let mut premises = Vec::new();
        while self.peek() == Some(&Tok::LParen) {
            premises.push(self.derivation()?);
        }
        self.expect(Tok::RParen, "`)` closing the derivation node")?;
        Ok(Derivation {
            rule,
            conclusion,
            premises,
        })
    }
}

fn to_value(surface: &Surface, span: SourceSpan) -> Result<Value, ParseError> {
    match surface {
        Surface::Var(x) => Ok(Value::Var(x.clone())),
        Surface::Lam(x, body) => {
            let m = to_comp(body, span)?;
            Ok(Value::Lam(x.clone(), std::sync::Arc::new(m)))
        }
        _ => Err(ParseError {
            span,
            expected: "a value (a variable or an abstraction)".into(),
            found: "a computation".into(),
        }),
    }
}

fn to_comp(surface: &Surface, span: SourceSpan) -> Result<Computation, ParseError> {
    desugar(surface).map_err(|e| ParseError {
        span,
        expected: "a computation".into(),
        found: e.to_string(),
    })
}

/// Parses a computation, desugaring the surface forms.
pub fn parse_computation(input: &str) -> Result<Computation, ParseError> {
    let mut p = Parser::new(input)?;
    let s = p.surface()?;
    p.expect_end()?;
    to_comp(&s, p.span())
}

/// Parses a value.
pub fn parse_value(input: &str) -> Result<Value, ParseError> {
    let mut p = Parser::new(input)?;
    let s = p.surface()?;
    p.expect_end()?;
    to_value(&s, p.span())
}

/// Parses a store term, enforcing lookup well-formedness.
pub fn parse_store(input: &str) -> Result<StoreTerm, ParseError> {
    let mut p = Parser::new(input)?;
    let s = p.store()?;
    p.expect_end()?;
    Ok(s)
}

/// Parses a type and canonicalizes it.
pub fn parse_type(input: &str) -> Result<AnyType, ParseError> {
    let mut p = Parser::new(input)?;
    let raw = p.raw_type()?;
    p.expect_end()?;
    p.normalize(raw)
}

/// Parses a derivation file.
pub fn parse_derivation(input: &str) -> Result<Derivation, ParseError> {
    let mut p = Parser::new(input)?;
    let d = p.derivation()?;
    p.expect_end()?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lamgs_core::syntax::Computation;

    #[test]
    fn parses_core_forms() {
        let m = parse_computation("unit (\\x. unit x)").unwrap();
        assert_eq!(m, Computation::unit(Value::identity()));
        let m = parse_computation("set[l0](\\x. unit x). get[l0](\\x. unit x)").unwrap();
        assert_eq!(
            m,
            Computation::set(
                Location(0),
                Value::identity(),
                Computation::get(Location(0), "x", Computation::unit(Value::var("x")))
            )
        );
    }

    #[test]
    fn bind_is_left_associative() {
        let m = parse_computation("unit x >>= f >>= g").unwrap();
        assert_eq!(
            m,
            Computation::bind(
                Computation::bind(Computation::unit(Value::var("x")), Value::var("f")),
                Value::var("g")
            )
        );
    }

    #[test]
    fn lambda_extends_right() {
        let m = parse_computation("unit x >>= \\y. unit y >>= f").unwrap();
        // The lambda body swallows the second bind.
        let Computation::Bind(_, Value::Lam(_, body)) = &m else {
            panic!("expected bind with lambda: {m:?}");
        };
        assert!(matches!(&**body, Computation::Bind(_, _)));
    }

    #[test]
    fn sugar_forms_desugar() {
        let m = parse_computation("let y = unit x in unit y").unwrap();
        assert_eq!(
            m,
            Computation::bind(
                Computation::unit(Value::var("x")),
                Value::lam("y", Computation::unit(Value::var("y")))
            )
        );
        let m = parse_computation("f a").unwrap();
        assert_eq!(
            m,
            Computation::bind(Computation::unit(Value::var("a")), Value::var("f"))
        );
        let m = parse_computation("unit v ; unit w").unwrap();
        let Computation::Bind(_, Value::Lam(dummy, _)) = &m else {
            panic!();
        };
        assert_eq!(dummy.0, "_");
    }

    #[test]
    fn ill_formed_lookup_rejected() {
        let err = parse_store("upd(l0, lkp(l0, emp), emp)").unwrap_err();
        assert!(err.expected.contains("defining"), "{err}");
    }

    #[test]
    fn store_with_nested_lookup() {
        let s = parse_store("upd(l0, lkp(l1, upd(l1, \\x. unit x, emp)), emp)").unwrap();
        assert!(s.is_well_formed());
    }

    #[test]
    fn type_precedences() {
        // /\ tighter than x tighter than ->
        let t = parse_type("wS -> wD x wS").unwrap();
        assert_eq!(t, AnyType::T(lamgs_core::types::CompType::convergent()));
        let t = parse_type("<l0 : wD> /\\ <l1 : wD> -> wD x wS").unwrap();
        let AnyType::T(ct) = &t else { panic!() };
        let (src, _) = ct.as_single_arrow().unwrap();
        assert_eq!(lamgs_core::types::dom_sigma(src).len(), 2);
    }

    #[test]
    fn parse_error_carries_position() {
        let err = parse_computation("unit (\\x. unit x").unwrap_err();
        assert_eq!(err.span.line, 1);
        assert!(err.expected.contains(")"));
    }
}
