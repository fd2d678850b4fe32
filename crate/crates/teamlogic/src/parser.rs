//! ASCII concrete syntax and a round-tripping printer.
//!
//! ```text
//! formula := bor ("->" formula)?
//! bor     := or ("||" or)*
//! or      := and ("\/" and)*
//! and     := pre ("/\" pre)*
//! pre     := ("E" | "A" | "E1" | "A1") var "." pre | "wneg" pre | "!" pre | prim
//! prim    := "bot" | "top" | "(" formula ")"
//!          | "=(" varlist [";" varlist] ")" | "inc(" varlist ";" varlist ")"
//!          | "ind(" varlist ";" varlist ";" varlist ")" | "@" name "(" varlist ")"
//!          | name "(" termlist ")" | terms ("=" | "!=") terms
//! ```
//!
//! Constants are written `'c`, or bare when declared in [`ParseOptions::constants`].

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{expand_sugar, fo_negate, Formula, Term, Var};
use crate::genatom::{builtin_registry, AtomRegistry};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message} at {}..{}", span.start, span.end)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Bare identifiers read as constants.
    pub constants: BTreeSet<String>,
    /// Accept `$` in variable names (translation output).
    pub allow_reserved: bool,
    /// Keep `->`, sequence equalities and inequalities as sugar nodes.
    pub keep_sugar: bool,
}

impl ParseOptions {
    pub fn raw() -> ParseOptions {
        ParseOptions { keep_sugar: true, ..Default::default() }
    }

    pub fn reserved() -> ParseOptions {
        ParseOptions { allow_reserved: true, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Const(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
    Eq,
    Neq,
    Bang,
    And,
    Or,
    BOr,
    Arrow,
    At,
}

const KEYWORDS: &[&str] = &["E", "A", "E1", "A1", "wneg", "bot", "top", "inc", "ind"];

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '$'
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err =
        |s: usize, e: usize, m: &str| ParseError { message: m.to_string(), span: SourceSpan { start: s, end: e } };
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = bytes.get(i + 1).map(|p| p.1);
        let single = |t: Tok| (t, SourceSpan { start: pos, end: pos + 1 });
        let double = |t: Tok| (t, SourceSpan { start: pos, end: pos + 2 });
        match c {
            '(' => {
                out.push(single(Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push(single(Tok::RParen));
                i += 1;
            }
            ',' => {
                out.push(single(Tok::Comma));
                i += 1;
            }
            ';' => {
                out.push(single(Tok::Semi));
                i += 1;
            }
            '.' => {
                out.push(single(Tok::Dot));
                i += 1;
            }
            '=' => {
                out.push(single(Tok::Eq));
                i += 1;
            }
            '@' => {
                out.push(single(Tok::At));
                i += 1;
            }
            '!' if next == Some('=') => {
                out.push(double(Tok::Neq));
                i += 2;
            }
            '!' => {
                out.push(single(Tok::Bang));
                i += 1;
            }
            '/' if next == Some('\\') => {
                out.push(double(Tok::And));
                i += 2;
            }
            '\\' if next == Some('/') => {
                out.push(double(Tok::Or));
                i += 2;
            }
            '|' if next == Some('|') => {
                out.push(double(Tok::BOr));
                i += 2;
            }
            '-' if next == Some('>') => {
                out.push(double(Tok::Arrow));
                i += 2;
            }
            '\'' => {
                let start = pos;
                i += 1;
                let mut name = String::new();
                while i < bytes.len() && ident_char(bytes[i].1) {
                    name.push(bytes[i].1);
                    i += 1;
                }
                let end = bytes.get(i).map_or(text.len(), |p| p.0);
                if name.is_empty() {
                    return Err(err(start, end, "empty constant name"));
                }
                out.push((Tok::Const(name), SourceSpan { start, end }));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = pos;
                let mut name = String::new();
                while i < bytes.len() && ident_char(bytes[i].1) {
                    name.push(bytes[i].1);
                    i += 1;
                }
                let end = bytes.get(i).map_or(text.len(), |p| p.0);
                out.push((Tok::Ident(name), SourceSpan { start, end }));
            }
            _ => return Err(err(pos, pos + c.len_utf8(), &format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    len: usize,
    opts: &'a ParseOptions,
    registry: &'a AtomRegistry,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(SourceSpan { start: self.len, end: self.len })
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { message: msg.into(), span: self.span() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.bor()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn bor(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.or()?;
        while self.eat(&Tok::BOr) {
            acc = Formula::bor(acc, self.or()?);
        }
        Ok(acc)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and()?;
        while self.eat(&Tok::Or) {
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.pre()?;
        while self.eat(&Tok::And) {
            acc = Formula::and(acc, self.pre()?);
        }
        Ok(acc)
    }

    fn variable(&mut self) -> Result<Var, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                if KEYWORDS.contains(&name.as_str()) {
                    return self.err(format!("keyword {name} used as a variable"));
                }
                if self.opts.constants.contains(&name) {
                    return self.err(format!("constant {name} used as a variable"));
                }
                if name.contains('$') && !self.opts.allow_reserved {
                    return self.err(format!("variable {name} uses the reserved character '$'"));
                }
                self.pos += 1;
                Ok(Var::new(name))
            }
            _ => self.err("expected a variable"),
        }
    }

    fn pre(&mut self) -> Result<Formula, ParseError> {
        if let Some(Tok::Ident(kw)) = self.peek().cloned() {
            let quant: Option<fn(Var, Formula) -> Formula> = match kw.as_str() {
                "E" => Some(Formula::exists),
                "A" => Some(Formula::forall),
                "E1" => Some(Formula::exists1),
                "A1" => Some(Formula::forall1),
                _ => None,
            };
            if let Some(q) = quant {
                self.pos += 1;
                let v = self.variable()?;
                self.expect(&Tok::Dot, "'.' after quantified variable")?;
                let body = self.pre()?;
                return Ok(q(v, body));
            }
            if kw == "wneg" {
                self.pos += 1;
                return Ok(Formula::wneg(self.pre()?));
            }
        }
        if self.peek() == Some(&Tok::Bang) {
            let span = self.span();
            self.pos += 1;
            let body = self.pre()?;
            return fo_negate(&body)
                .map_err(|e| ParseError { message: format!("'!' applied to a non-first-order formula: {e}"), span });
        }
        self.prim()
    }

    fn varlist(&mut self) -> Result<Vec<Var>, ParseError> {
        let mut out = Vec::new();
        while let Some(Tok::Ident(_)) = self.peek() {
            out.push(self.variable()?);
            self.eat(&Tok::Comma);
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Const(c)) => {
                self.pos += 1;
                Ok(Term::Const(Arc::from(c.as_str())))
            }
            Some(Tok::Ident(name)) if self.opts.constants.contains(&name) => {
                self.pos += 1;
                Ok(Term::Const(Arc::from(name.as_str())))
            }
            _ => Ok(Term::Var(self.variable()?)),
        }
    }

    fn prim(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(f)
            }
            Some(Tok::Eq) => {
                self.pos += 1;
                self.expect(&Tok::LParen, "'(' after '=' in a dependence atom")?;
                let first = self.varlist()?;
                let (det, dep) = if self.eat(&Tok::Semi) {
                    (first, self.varlist()?)
                } else {
                    let mut det = first;
                    match det.pop() {
                        Some(last) => (det, vec![last]),
                        None => return self.err("dependence atom needs a dependent variable"),
                    }
                };
                if dep.is_empty() {
                    return self.err("dependence atom needs a dependent variable");
                }
                self.expect(&Tok::RParen, "')'")?;
                Ok(Formula::dep(det, dep))
            }
            Some(Tok::At) => {
                self.pos += 1;
                let span = self.span();
                let name = match self.peek().cloned() {
                    Some(Tok::Ident(n)) => {
                        self.pos += 1;
                        n
                    }
                    _ => return self.err("expected an atom name after '@'"),
                };
                self.expect(&Tok::LParen, "'('")?;
                let args = self.varlist()?;
                self.expect(&Tok::RParen, "')'")?;
                match self.registry.get(&name) {
                    None => Err(ParseError { message: format!("unknown atom @{name}"), span }),
                    Some(def) if def.m != args.len() => Err(ParseError {
                        message: format!("atom @{name} takes {} arguments, got {}", def.m, args.len()),
                        span,
                    }),
                    Some(_) => Ok(Formula::gen(&name, args)),
                }
            }
            Some(Tok::Ident(kw)) if kw == "bot" => {
                self.pos += 1;
                Ok(Formula::Bot)
            }
            Some(Tok::Ident(kw)) if kw == "top" => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(Tok::Ident(kw)) if kw == "inc" && self.peek_at(1) == Some(&Tok::LParen) => {
                let span = self.span();
                self.pos += 2;
                let xs = self.varlist()?;
                self.expect(&Tok::Semi, "';' in inclusion atom")?;
                let ys = self.varlist()?;
                self.expect(&Tok::RParen, "')'")?;
                if xs.len() != ys.len() {
                    return Err(ParseError {
                        message: format!("inclusion atom sides differ in length ({} vs {})", xs.len(), ys.len()),
                        span,
                    });
                }
                Ok(Formula::inc(xs, ys))
            }
            Some(Tok::Ident(kw)) if kw == "ind" && self.peek_at(1) == Some(&Tok::LParen) => {
                self.pos += 2;
                let xs = self.varlist()?;
                self.expect(&Tok::Semi, "';' in independence atom")?;
                let zs = self.varlist()?;
                self.expect(&Tok::Semi, "second ';' in independence atom")?;
                let ys = self.varlist()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(Formula::ind(xs, zs, ys))
            }
            Some(Tok::Ident(name)) if self.peek_at(1) == Some(&Tok::LParen) && !KEYWORDS.contains(&name.as_str()) => {
                self.pos += 2;
                let mut args = Vec::new();
                if !self.eat(&Tok::RParen) {
                    loop {
                        args.push(self.term()?);
                        if self.eat(&Tok::RParen) {
                            break;
                        }
                        self.expect(&Tok::Comma, "',' or ')'")?;
                    }
                }
                Ok(Formula::rel(&name, args))
            }
            Some(Tok::Ident(_)) | Some(Tok::Const(_)) => self.comparison(),
            Some(_) => self.err("expected a formula"),
            None => self.err("unexpected end of input"),
        }
    }

    fn comparison(&mut self) -> Result<Formula, ParseError> {
        let start = self.span();
        let mut lhs = vec![self.term()?];
        while matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Const(_))) {
            lhs.push(self.term()?);
        }
        let negated = if self.eat(&Tok::Eq) {
            false
        } else if self.eat(&Tok::Neq) {
            true
        } else {
            return self.err("expected '=' or '!='");
        };
        let mut rhs = vec![self.term()?];
        while matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Const(_))) {
            if let Some(Tok::Ident(n)) = self.peek() {
                if KEYWORDS.contains(&n.as_str()) {
                    break;
                }
            }
            rhs.push(self.term()?);
        }
        if lhs.len() != rhs.len() {
            return Err(ParseError {
                message: format!("sequence sides differ in length ({} vs {})", lhs.len(), rhs.len()),
                span: SourceSpan { start: start.start, end: self.span().start },
            });
        }
        Ok(if negated { Formula::seq_neq(lhs, rhs) } else { Formula::seq_eq(lhs, rhs) })
    }
}

pub fn parse_formula_with(text: &str, opts: &ParseOptions, registry: &AtomRegistry) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, len: text.len(), opts, registry };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    if opts.keep_sugar {
        Ok(f)
    } else {
        expand_sugar(&f)
            .map_err(|e| ParseError { message: e.to_string(), span: SourceSpan { start: 0, end: text.len() } })
    }
}

/// Parses with the builtin atom registry and sugar expanded.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, &ParseOptions::default(), builtin_registry())
}

/// Parses keeping sugar nodes, as proof scripts need.
pub fn parse_formula_raw(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, &ParseOptions::raw(), builtin_registry())
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 0,
        Formula::BoolOr(..) => 1,
        Formula::SplitOr(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    }
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) => out.push_str(v.name()),
        Term::Const(c) => {
            out.push('\'');
            out.push_str(c);
        }
    }
}

fn write_terms(out: &mut String, ts: &[Term], sep: &str) {
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        write_term(out, t);
    }
}

fn join(vs: &[Var]) -> String {
    vs.iter().map(Var::name).collect::<Vec<_>>().join(", ")
}

fn write(out: &mut String, f: &Formula, min: u8) {
    let paren = prec(f) < min;
    if paren {
        out.push('(');
    }
    match f {
        Formula::Rel(r, ts) | Formula::NegRel(r, ts) => {
            if matches!(f, Formula::NegRel(..)) {
                out.push('!');
            }
            out.push_str(r);
            out.push('(');
            write_terms(out, ts, ", ");
            out.push(')');
        }
        Formula::Eq(a, b) | Formula::NegEq(a, b) => {
            write_term(out, a);
            out.push_str(if matches!(f, Formula::Eq(..)) { " = " } else { " != " });
            write_term(out, b);
        }
        Formula::SeqEq(a, b) | Formula::SeqNeq(a, b) => {
            write_terms(out, a, " ");
            out.push_str(if matches!(f, Formula::SeqEq(..)) { " = " } else { " != " });
            write_terms(out, b, " ");
        }
        Formula::Bot => out.push_str("bot"),
        Formula::Top => out.push_str("top"),
        Formula::Dep { det, dep } => {
            let _ = write!(out, "=({}; {})", join(det), join(dep));
        }
        Formula::Ind { xs, zs, ys } => {
            let _ = write!(out, "ind({}; {}; {})", join(xs), join(zs), join(ys));
        }
        Formula::Inc { xs, ys } => {
            let _ = write!(out, "inc({}; {})", join(xs), join(ys));
        }
        Formula::Gen { name, args } => {
            let _ = write!(out, "@{}({})", name, join(args));
        }
        Formula::And(a, b) => {
            write(out, a, 3);
            out.push_str(" /\\ ");
            write(out, b, 4);
        }
        Formula::SplitOr(a, b) => {
            write(out, a, 2);
            out.push_str(" \\/ ");
            write(out, b, 3);
        }
        Formula::BoolOr(a, b) => {
            write(out, a, 1);
            out.push_str(" || ");
            write(out, b, 2);
        }
        Formula::Implies(a, b) => {
            write(out, a, 1);
            out.push_str(" -> ");
            write(out, b, 0);
        }
        Formula::Exists(v, b) | Formula::Forall(v, b) | Formula::Exists1(v, b) | Formula::Forall1(v, b) => {
            let q = match f {
                Formula::Exists(..) => "E",
                Formula::Forall(..) => "A",
                Formula::Exists1(..) => "E1",
                _ => "A1",
            };
            let _ = write!(out, "{q} {}. ", v.name());
            write(out, b, 4);
        }
        Formula::WNeg(b) => {
            out.push_str("wneg ");
            write(out, b, 4);
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(&mut out, f, 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::vars;

    #[test]
    fn atoms_parse() {
        assert_eq!(parse_formula("=(x,y)").unwrap(), Formula::dep(vars(&["x"]), vars(&["y"])));
        assert_eq!(parse_formula("=(x y; u v)").unwrap(), Formula::dep(vars(&["x", "y"]), vars(&["u", "v"])));
        assert_eq!(parse_formula("=(x)").unwrap(), Formula::dep(vec![], vars(&["x"])));
        assert_eq!(parse_formula("ind(x ; ; y)").unwrap(), Formula::ind(vars(&["x"]), vec![], vars(&["y"])));
        assert_eq!(parse_formula("wneg (x = y)").unwrap(), Formula::wneg(Formula::eq(Var::new("x"), Var::new("y"))));
        assert_eq!(parse_formula("inc(x, y; u, v)").unwrap(), Formula::inc(vars(&["x", "y"]), vars(&["u", "v"])));
    }

    #[test]
    fn precedence() {
        let f = parse_formula("x = y /\\ y = z \\/ bot || top").unwrap();
        let xy = Formula::eq(Var::new("x"), Var::new("y"));
        let yz = Formula::eq(Var::new("y"), Var::new("z"));
        assert_eq!(f, Formula::bor(Formula::or(Formula::and(xy.clone(), yz), Formula::Bot), Formula::Top));
        let g = parse_formula("E x. x = y /\\ bot").unwrap();
        assert_eq!(
            g,
            Formula::and(Formula::exists(Var::new("x"), Formula::eq(Var::new("x"), Var::new("y"))), Formula::Bot)
        );
    }

    #[test]
    fn sugar_is_expanded_unless_raw() {
        let f = parse_formula("x y = u v -> a != b").unwrap();
        assert_eq!(print_formula(&f), "x != u \\/ y != v \\/ a != b");
        let raw = parse_formula_raw("x y = u v -> a != b").unwrap();
        assert!(matches!(raw, Formula::Implies(..)));
        assert_eq!(print_formula(&raw), "x y = u v -> a != b");
    }

    #[test]
    fn constants_and_negation() {
        let opts = ParseOptions { constants: ["a".to_string()].into_iter().collect(), ..Default::default() };
        let f = parse_formula_with("x = a \\/ !R(x, 'b)", &opts, builtin_registry()).unwrap();
        assert_eq!(print_formula(&f), "x = 'a \\/ !R(x, 'b)");
        assert!(parse_formula("!=(x,y)").is_err());
    }

    #[test]
    fn errors_have_spans() {
        let e = parse_formula("x = ").unwrap_err();
        assert_eq!(e.span.start, 4);
        assert!(parse_formula("inc(x, y; z)").is_err());
        assert!(parse_formula("w$1 = x").is_err());
        assert!(parse_formula("@dep1(x)").is_err());
        assert!(parse_formula("@nosuch(x)").is_err());
        assert!(parse_formula("x = y )").is_err());
    }

    #[test]
    fn printing_round_trips() {
        for text in [
            "=(x,y)",
            "ind(x ; ; y)",
            "wneg (x = y)",
            "bot",
            "E x. (x = y /\\ A y. R(y))",
            "(x = y || y = z) /\\ E1 u. A1 v. u != v",
            "@dep1(x, y) \\/ inc(x; y) \\/ (top /\\ bot)",
            "x = y /\\ (y = z /\\ z = x)",
        ] {
            let f = parse_formula(text).unwrap();
            assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f, "{text}");
        }
        assert_eq!(print_formula(&Formula::Bot), "bot");
    }
}
