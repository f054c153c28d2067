//! Surface syntax for types, terms, contexts and fixture lines.
//!
//! ```text
//! ty   ::= tyat ("->" ty)?            tyat ::= IDENT | "(" ty ")"
//! tm   ::= "app" at at | "abs" tyat "(" IDENT "\" tm ")"
//!        | "let" tyat at "(" IDENT "\" tm ")" | at
//! at   ::= IDENT | "(" tm ")"
//! ctx  ::= cons ("++" cons)*          cons ::= cat ("::" cons)? | elem "::" cons
//! cat  ::= "nil" | "[" (elem ("," elem)*)? "]" | "(" ctx ")"
//! ```
//!
//! Identifiers in terms resolve to the innermost enclosing binder, then to
//! a declared nominal constant; anything else is unbound.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ctx::Ctx;
use crate::syntax::{Name, Tm, Ty, TyAssoc, VarAssoc};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unbound identifier `{ident}`")]
    Unbound { line: usize, col: usize, ident: String },
}

impl ParseError {
    /// Shifts the reported line, for errors found inside one line of a file.
    pub fn at_line(self, line: usize) -> ParseError {
        match self {
            ParseError::Syntax { col, msg, .. } => ParseError::Syntax { line, col, msg },
            ParseError::Unbound { col, ident, .. } => ParseError::Unbound { line, col, ident },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Longest symbols first so that prefixes do not win.
const SYMBOLS: [&str; 19] = [
    "_|_", "->", "::", "++", "|-", "~>", "=>", "-|", "\\/", "/\\", "(", ")", "[", "]", ",", "\\", ":", ".", "=",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits `src` into tokens; `%` and `#` start comments running to the end
/// of the line.
pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (off, c) = chars[i];
            let col = i + 1;
            if c == '%' || c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let rest = &line[off..];
            if let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                out.push(Token {
                    tok: Tok::Sym(sym),
                    line: li + 1,
                    col,
                });
                i += sym.chars().count();
                continue;
            }
            if is_ident_start(c) || c.is_ascii_digit() {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j].1) {
                    j += 1;
                }
                let end = chars.get(j).map_or(line.len(), |(o, _)| *o);
                out.push(Token {
                    tok: Tok::Ident(line[off..end].to_string()),
                    line: li + 1,
                    col,
                });
                i = j;
                continue;
            }
            return Err(ParseError::Syntax {
                line: li + 1,
                col,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

/// A cursor over a token stream.
pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    /// A position to [`Parser::reset`] to when backtracking.
    pub fn mark(&self) -> usize {
        self.pos
    }

    pub fn reset(&mut self, mark: usize) {
        self.pos = mark;
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) if self.pos < self.toks.len() => (t.line, t.col),
            Some(t) => (t.line, t.col + 1),
            None => (1, 1),
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        let found = match self.peek() {
            Some(t) => format!(", found {t}"),
            None => ", found end of input".to_string(),
        };
        ParseError::Syntax {
            line,
            col,
            msg: format!("{}{found}", msg.into()),
        }
    }

    pub fn unbound(&self, ident: &str) -> ParseError {
        let (line, col) = self
            .toks
            .get(self.pos.saturating_sub(1))
            .map_or((1, 1), |t| (t.line, t.col));
        ParseError::Unbound {
            line,
            col,
            ident: ident.to_string(),
        }
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    pub fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == s)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_ident(&mut self, s: &str) -> bool {
        if self.is_ident(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    pub fn expect_keyword(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_ident(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("expected end of input"))
        }
    }

    pub fn ty(&mut self) -> Result<Ty, ParseError> {
        let dom = self.ty_atom()?;
        if self.eat_sym("->") {
            Ok(Ty::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    pub fn ty_atom(&mut self) -> Result<Ty, ParseError> {
        if self.eat_sym("(") {
            let t = self.ty()?;
            self.expect_sym(")")?;
            Ok(t)
        } else {
            let l = self.ident().map_err(|_| self.error("expected a type"))?;
            Ok(Ty::base(&l))
        }
    }

    /// A term whose free identifiers must be in `declared`.
    pub fn term(&mut self, declared: &BTreeSet<Name>) -> Result<Tm, ParseError> {
        let mut scope = Vec::new();
        self.tm(declared, &mut scope)
    }

    fn tm(&mut self, declared: &BTreeSet<Name>, scope: &mut Vec<Name>) -> Result<Tm, ParseError> {
        if self.eat_ident("app") {
            let m = self.tm_atom(declared, scope)?;
            let n = self.tm_atom(declared, scope)?;
            Ok(Tm::app(m, n))
        } else if self.eat_ident("abs") {
            let ty = self.ty_atom()?;
            let body = self.binder(declared, scope)?;
            Ok(Tm::abs(ty, body))
        } else if self.eat_ident("let") {
            let ty = self.ty_atom()?;
            let val = self.tm_atom(declared, scope)?;
            let body = self.binder(declared, scope)?;
            Ok(Tm::let_(ty, val, body))
        } else {
            self.tm_atom(declared, scope)
        }
    }

    fn tm_atom(&mut self, declared: &BTreeSet<Name>, scope: &mut Vec<Name>) -> Result<Tm, ParseError> {
        if self.eat_sym("(") {
            let t = self.tm(declared, scope)?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "app" || s == "abs" || s == "let") {
            return Err(self.error("compound term in argument position needs parentheses"));
        }
        let id = self.ident().map_err(|_| self.error("expected a term"))?;
        let name = Name::new(&id);
        if let Some(pos) = scope.iter().rposition(|x| *x == name) {
            Ok(Tm::Bound(scope.len() - 1 - pos))
        } else if declared.contains(&name) {
            Ok(Tm::Free(name))
        } else {
            Err(self.unbound(&id))
        }
    }

    /// `(x\ tm)`; the result binds `x` at index 0.
    fn binder(&mut self, declared: &BTreeSet<Name>, scope: &mut Vec<Name>) -> Result<Tm, ParseError> {
        self.expect_sym("(")?;
        let x = Name::new(&self.ident()?);
        self.expect_sym("\\")?;
        scope.push(x);
        let body = self.tm(declared, scope);
        scope.pop();
        let body = body?;
        self.expect_sym(")")?;
        Ok(body)
    }

    /// A context whose elements are read by `elem`.
    pub fn ctx<E>(&mut self, elem: &mut dyn FnMut(&mut Parser) -> Result<E, ParseError>) -> Result<Ctx<E>, ParseError> {
        let mut acc = self.ctx_cons(elem)?;
        while self.eat_sym("++") {
            let r = self.ctx_cons(elem)?;
            acc = Ctx::union(acc, r);
        }
        Ok(acc)
    }

    fn ctx_cons<E>(
        &mut self,
        elem: &mut dyn FnMut(&mut Parser) -> Result<E, ParseError>,
    ) -> Result<Ctx<E>, ParseError> {
        if self.eat_ident("nil") {
            return Ok(Ctx::Empty);
        }
        if self.eat_sym("[") {
            let mut items = Vec::new();
            if !self.eat_sym("]") {
                loop {
                    items.push(elem(self)?);
                    if self.eat_sym("]") {
                        break;
                    }
                    self.expect_sym(",")?;
                }
            }
            return self.cons_tail(Ctx::from_list(items), elem);
        }
        if self.is_sym("(") {
            // Either a parenthesized context or a parenthesized element.
            let save = self.pos;
            self.pos += 1;
            if let Ok(g) = self.ctx(elem) {
                if self.eat_sym(")") {
                    return self.cons_tail(g, elem);
                }
            }
            self.pos = save;
        }
        let h = elem(self)?;
        self.expect_sym("::")?;
        let t = self.ctx_cons(elem)?;
        Ok(Ctx::cons(h, t))
    }

    /// A bracketed or parenthesized context may not be followed by `::`.
    fn cons_tail<E>(
        &mut self,
        g: Ctx<E>,
        _elem: &mut dyn FnMut(&mut Parser) -> Result<E, ParseError>,
    ) -> Result<Ctx<E>, ParseError> {
        if self.is_sym("::") {
            return Err(self.error("`::` needs an element on its left"));
        }
        Ok(g)
    }

    pub fn ty_assoc(&mut self) -> Result<TyAssoc, ParseError> {
        let paren = self.eat_sym("(");
        self.expect_keyword("ty_of")?;
        let n = Name::new(&self.ident()?);
        let t = self.ty_atom()?;
        if paren {
            self.expect_sym(")")?;
        }
        Ok(TyAssoc::new(n, t))
    }

    pub fn var_assoc(&mut self) -> Result<VarAssoc, ParseError> {
        let paren = self.eat_sym("(");
        self.expect_keyword("trans_to")?;
        let x = Name::new(&self.ident()?);
        let y = Name::new(&self.ident()?);
        if paren {
            self.expect_sym(")")?;
        }
        Ok(VarAssoc::new(x, y))
    }
}

pub fn parse_ty(src: &str) -> Result<Ty, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

/// Parses a term whose free identifiers must all be in `declared`.
pub fn parse_term(src: &str, declared: &BTreeSet<Name>) -> Result<Tm, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term(declared)?;
    p.finish()?;
    Ok(t)
}

/// Parses a term, declaring every identifier that is not bound.
pub fn parse_open_term(src: &str) -> Result<Tm, ParseError> {
    let mut declared = BTreeSet::new();
    loop {
        match parse_term(src, &declared) {
            Err(ParseError::Unbound { ident, .. }) => {
                declared.insert(Name::new(&ident));
            }
            other => return other,
        }
    }
}

pub fn parse_ty_ctx(src: &str) -> Result<Ctx<TyAssoc>, ParseError> {
    let mut p = Parser::new(src)?;
    let g = p.ctx(&mut |p| p.ty_assoc())?;
    p.finish()?;
    Ok(g)
}

pub fn parse_var_ctx(src: &str) -> Result<Ctx<VarAssoc>, ParseError> {
    let mut p = Parser::new(src)?;
    let g = p.ctx(&mut |p| p.var_assoc())?;
    p.finish()?;
    Ok(g)
}

/// A context over bare identifiers, as used for generic examples.
pub fn parse_atom_ctx(src: &str) -> Result<Ctx<String>, ParseError> {
    let mut p = Parser::new(src)?;
    let g = p.ctx(&mut |p| p.ident())?;
    p.finish()?;
    Ok(g)
}

pub fn ty_ctx_names(g: &Ctx<TyAssoc>) -> BTreeSet<Name> {
    g.elems().into_iter().map(|a| a.name.clone()).collect()
}

/// `CTX |- TERM : TY => yes|no`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgmentLine {
    pub line: usize,
    pub ctx: Ctx<TyAssoc>,
    pub term: Tm,
    pub ty: Ty,
    pub expected: bool,
}

/// `CTX |- SRC ~> DST => yes|no`, or a bare closed `SRC` to translate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransLine {
    Translate {
        line: usize,
        src: Tm,
    },
    Judge {
        line: usize,
        ctx: Ctx<VarAssoc>,
        src: Tm,
        dst: Tm,
        expected: bool,
    },
}

fn verdict(p: &mut Parser) -> Result<bool, ParseError> {
    p.expect_sym("=>")?;
    let v = if p.eat_ident("yes") {
        true
    } else if p.eat_ident("no") {
        false
    } else {
        return Err(p.error("expected `yes` or `no`"));
    };
    p.finish()?;
    Ok(v)
}

fn content_lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines().enumerate().filter_map(|(i, l)| {
        let t = l.trim();
        (!t.is_empty() && !t.starts_with('%') && !t.starts_with('#')).then_some((i + 1, l))
    })
}

pub fn parse_judgment_line(text: &str) -> Result<(Ctx<TyAssoc>, Tm, Ty, bool), ParseError> {
    let mut p = Parser::new(text)?;
    let ctx = p.ctx(&mut |p| p.ty_assoc())?;
    p.expect_sym("|-")?;
    let term = p.term(&ty_ctx_names(&ctx))?;
    p.expect_sym(":")?;
    let ty = p.ty()?;
    let expected = verdict(&mut p)?;
    Ok((ctx, term, ty, expected))
}

pub fn parse_judgment_file(src: &str) -> Result<Vec<JudgmentLine>, ParseError> {
    content_lines(src)
        .map(|(line, text)| {
            let (ctx, term, ty, expected) = parse_judgment_line(text).map_err(|e| e.at_line(line))?;
            Ok(JudgmentLine {
                line,
                ctx,
                term,
                ty,
                expected,
            })
        })
        .collect()
}

pub fn parse_translation_file(src: &str) -> Result<Vec<TransLine>, ParseError> {
    content_lines(src)
        .map(|(line, text)| parse_translation_line(line, text).map_err(|e| e.at_line(line)))
        .collect()
}

fn parse_translation_line(line: usize, text: &str) -> Result<TransLine, ParseError> {
    if !text.contains("|-") {
        let mut p = Parser::new(text)?;
        let src = p.term(&BTreeSet::new())?;
        p.finish()?;
        return Ok(TransLine::Translate { line, src });
    }
    let mut p = Parser::new(text)?;
    let ctx = p.ctx(&mut |p| p.var_assoc())?;
    p.expect_sym("|-")?;
    let srcs: BTreeSet<Name> = ctx.elems().iter().map(|a| a.src.clone()).collect();
    let dsts: BTreeSet<Name> = ctx.elems().iter().map(|a| a.dst.clone()).collect();
    let src = p.term(&srcs)?;
    p.expect_sym("~>")?;
    let dst = p.term(&dsts)?;
    let expected = verdict(&mut p)?;
    Ok(TransLine::Judge {
        line,
        ctx,
        src,
        dst,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::print_term;

    fn none() -> BTreeSet<Name> {
        BTreeSet::new()
    }

    #[test]
    fn parses_the_composition_example() {
        let t = parse_term("abs (i -> i) (x\\ abs i (y\\ app x y))", &none()).unwrap();
        let i = Ty::base("i");
        assert_eq!(
            t,
            Tm::abs(
                Ty::arrow(i.clone(), i.clone()),
                Tm::abs(i, Tm::app(Tm::Bound(1), Tm::Bound(0)))
            )
        );
    }

    #[test]
    fn undeclared_identifier_is_unbound() {
        let e = parse_term("app x", &none()).unwrap_err();
        assert!(matches!(e, ParseError::Unbound { ref ident, .. } if ident == "x"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_term("abs i (x\\ x", &none()).unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 1, col: 12, .. }), "{e}");
        assert!(matches!(
            parse_term("app x $", &none()),
            Err(ParseError::Syntax { col: 7, .. })
        ));
    }

    #[test]
    fn shadowing_and_constants() {
        let declared: BTreeSet<Name> = [Name::new("x")].into_iter().collect();
        let t = parse_term("app x (abs i (x\\ x))", &declared).unwrap();
        assert_eq!(
            t,
            Tm::app(Tm::free(&Name::new("x")), Tm::abs(Ty::base("i"), Tm::Bound(0)))
        );
        let t = parse_term("abs i (x\\ abs i (x\\ x))", &none()).unwrap();
        assert_eq!(t, Tm::abs(Ty::base("i"), Tm::abs(Ty::base("i"), Tm::Bound(0))));
        let t = parse_term("abs i (x\\ abs i (y\\ x))", &none()).unwrap();
        assert_eq!(t, Tm::abs(Ty::base("i"), Tm::abs(Ty::base("i"), Tm::Bound(1))));
    }

    #[test]
    fn alpha_variants_parse_equal() {
        let pairs = [
            ("abs i (x\\ x)", "abs i (y\\ y)"),
            (
                "abs (i -> o) (f\\ abs i (a\\ app f a))",
                "abs (i -> o) (g\\ abs i (b\\ app g b))",
            ),
            ("let i (abs o (z\\ z)) (x\\ x)", "let i (abs o (w\\ w)) (v\\ v)"),
        ];
        for (a, b) in pairs {
            assert_eq!(parse_term(a, &none()).unwrap(), parse_term(b, &none()).unwrap());
        }
        assert_ne!(
            parse_term("abs i (x\\ abs i (y\\ x))", &none()).unwrap(),
            parse_term("abs i (x\\ abs i (y\\ y))", &none()).unwrap()
        );
    }

    #[test]
    fn print_parse_round_trip() {
        for s in [
            "abs (i -> i) (x\\ abs i (y\\ app x y))",
            "let i n0 (x\\ app (abs i (y\\ y)) x)",
            "app (app n0 n1) (abs o (x\\ x))",
        ] {
            let t = parse_open_term(s).unwrap();
            assert_eq!(print_term(&t), s);
            assert_eq!(parse_open_term(&print_term(&t)).unwrap(), t);
        }
    }

    #[test]
    fn types_are_right_associative() {
        let i = Ty::base("i");
        assert_eq!(
            parse_ty("i -> i -> i").unwrap(),
            Ty::arrow(i.clone(), Ty::arrow(i.clone(), i.clone()))
        );
        assert_eq!(
            parse_ty("(i -> i) -> i").unwrap(),
            Ty::arrow(Ty::arrow(i.clone(), i.clone()), i)
        );
    }

    #[test]
    fn context_literals() {
        let a = |s: &str| s.to_string();
        assert_eq!(parse_atom_ctx("nil").unwrap(), Ctx::Empty);
        assert_eq!(parse_atom_ctx("[a, b]").unwrap(), Ctx::from_list(vec![a("a"), a("b")]));
        assert_eq!(
            parse_atom_ctx("a :: b :: nil ++ [c]").unwrap(),
            Ctx::union(Ctx::from_list(vec![a("a"), a("b")]), Ctx::from_list(vec![a("c")]))
        );
        assert_eq!(
            parse_atom_ctx("a :: (nil ++ [b])").unwrap(),
            Ctx::cons(a("a"), Ctx::union(Ctx::Empty, Ctx::from_list(vec![a("b")])))
        );
        let g = parse_ty_ctx("[ty_of n1 i, ty_of n2 (i -> o)] ++ (ty_of n3 o) :: nil").unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.to_string(), "[ty_of n1 i, ty_of n2 (i -> o)] ++ [ty_of n3 o]");
        assert_eq!(parse_ty_ctx(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn context_display_round_trips() {
        let univ = crate::ctx::gen_ctxs(&["a".to_string(), "b".to_string()], 3, 2);
        for g in univ {
            assert_eq!(parse_atom_ctx(&g.to_string()).unwrap(), g, "{g}");
        }
    }

    #[test]
    fn judgment_files() {
        let src = "% comment\n[ty_of n1 i] |- n1 : i => yes\n\nnil |- abs i (x\\ x) : i -> i => no\n";
        let js = parse_judgment_file(src).unwrap();
        assert_eq!(js.len(), 2);
        assert_eq!(js[0].line, 2);
        assert!(js[0].expected);
        assert_eq!(js[1].line, 4);
        let err = parse_judgment_file("nil |- n1 : i => yes").unwrap_err();
        assert!(matches!(err, ParseError::Unbound { line: 1, .. }));
        let err = parse_judgment_file("\n\nnil |- : i => yes").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, .. }));
    }

    #[test]
    fn translation_files() {
        let src = "let i (abs o (z\\ z)) (x\\ x)\n[trans_to n1 m1] |- n1 ~> m1 => yes\n";
        let ls = parse_translation_file(src).unwrap();
        assert!(matches!(ls[0], TransLine::Translate { line: 1, .. }));
        assert!(matches!(
            ls[1],
            TransLine::Judge {
                line: 2,
                expected: true,
                ..
            }
        ));
    }
}
