//! Surface syntax for context commands and lemmas.
//!
//! ```text
//! command ::= "Context" IDENT "with" "elems" "as" clause ("\/" clause)* "."
//! clause  ::= ("nabla" IDENT+)? "(" pat ("_|_" pat)* ("-|" formula)? ")"
//! pat     ::= IDENT arg* | "(" pat ")"          arg ::= IDENT | "(" pat ")"
//! formula ::= conj ("\/" formula)?              conj ::= atom ("/\" conj)?
//! atom    ::= "true" | "name" IDENT | pat "=" pat | "(" formula ")"
//!
//! lemma   ::= ("Lemma" | "Theorem") IDENT ":" "forall" IDENT+ ","
//!             PRED IDENT+ "->" ("member" arg IDENT "->")*
//!             ("exists" IDENT+ ",")? item ("/\" item)* "."
//! item    ::= "member" arg IDENT | atom
//! ```
//!
//! In a clause, nabla variables and capitalized identifiers are variables.
//! In a lemma, the quantified identifiers are.

use std::collections::BTreeSet;

use super::lemma::{LemmaForm, LemmaStmt};
use super::{Clause, ContextSpec, Pat, SideFormula, SpecError};
use crate::parse::{ParseError, Parser, Tok};

type IsVar<'a> = &'a dyn Fn(&str) -> bool;

fn pat_arg(p: &mut Parser, is_var: IsVar) -> Result<Pat, ParseError> {
    if p.eat_sym("(") {
        let t = pat(p, is_var)?;
        p.expect_sym(")")?;
        return Ok(t);
    }
    let id = p.ident().map_err(|_| p.error("expected a term"))?;
    Ok(if is_var(&id) {
        Pat::Var(id)
    } else {
        Pat::Con(id, Vec::new())
    })
}

fn starts_arg(p: &Parser) -> bool {
    matches!(p.peek(), Some(Tok::Ident(_))) || p.is_sym("(")
}

fn pat(p: &mut Parser, is_var: IsVar) -> Result<Pat, ParseError> {
    if p.is_sym("(") {
        return pat_arg(p, is_var);
    }
    let head = p.ident().map_err(|_| p.error("expected a term"))?;
    if is_var(&head) {
        return Ok(Pat::Var(head));
    }
    let mut args = Vec::new();
    while starts_arg(p) {
        args.push(pat_arg(p, is_var)?);
    }
    Ok(Pat::Con(head, args))
}

fn formula(p: &mut Parser, is_var: IsVar) -> Result<SideFormula, ParseError> {
    let lhs = conj(p, is_var)?;
    if p.eat_sym("\\/") {
        Ok(SideFormula::Disj(Box::new(lhs), Box::new(formula(p, is_var)?)))
    } else {
        Ok(lhs)
    }
}

fn conj(p: &mut Parser, is_var: IsVar) -> Result<SideFormula, ParseError> {
    let lhs = atom(p, is_var)?;
    if p.eat_sym("/\\") {
        Ok(SideFormula::Conj(Box::new(lhs), Box::new(conj(p, is_var)?)))
    } else {
        Ok(lhs)
    }
}

fn atom(p: &mut Parser, is_var: IsVar) -> Result<SideFormula, ParseError> {
    if p.eat_ident("true") {
        return Ok(SideFormula::Truth);
    }
    if p.eat_ident("name") {
        let v = p.ident()?;
        if !is_var(&v) {
            return Err(p.unbound(&v));
        }
        return Ok(SideFormula::IsName(v));
    }
    if p.is_sym("(") {
        // Either a parenthesized formula or the left side of an equation.
        let m = p.mark();
        p.expect_sym("(")?;
        if let Ok(f) = formula(p, is_var) {
            if p.eat_sym(")") && !p.is_sym("=") {
                return Ok(f);
            }
        }
        p.reset(m);
    }
    let lhs = pat(p, is_var)?;
    p.expect_sym("=")?;
    Ok(SideFormula::Eq(lhs, pat(p, is_var)?))
}

fn clause(p: &mut Parser) -> Result<Clause, ParseError> {
    let mut nabla_vars = Vec::new();
    if p.eat_ident("nabla") {
        while let Some(Tok::Ident(_)) = p.peek() {
            nabla_vars.push(p.ident()?);
        }
        if nabla_vars.is_empty() {
            return Err(p.error("expected nabla variables"));
        }
    }
    let is_var = |s: &str| nabla_vars.iter().any(|v| v == s) || s.starts_with(|c: char| c.is_ascii_uppercase());
    p.expect_sym("(")?;
    let mut patterns = vec![pat(p, &is_var)?];
    while p.eat_sym("_|_") {
        patterns.push(pat(p, &is_var)?);
    }
    let formula = if p.eat_sym("-|") {
        formula(p, &is_var)?
    } else {
        SideFormula::Truth
    };
    p.expect_sym(")")?;
    Ok(Clause {
        nabla_vars,
        patterns,
        formula,
    })
}

fn command(p: &mut Parser) -> Result<ContextSpec, SpecError> {
    p.expect_keyword("Context")?;
    let name = p.ident()?;
    for kw in ["with", "elems", "as"] {
        p.expect_keyword(kw)?;
    }
    let mut clauses = vec![clause(p)?];
    while p.eat_sym("\\/") {
        clauses.push(clause(p)?);
    }
    p.expect_sym(".")?;
    ContextSpec::new(&name, clauses)
}

/// One `Context` command.
pub fn parse_spec(src: &str) -> Result<ContextSpec, SpecError> {
    let mut p = Parser::new(src)?;
    let s = command(&mut p)?;
    p.finish()?;
    Ok(s)
}

/// Every `Context` command in a file.
pub fn parse_spec_file(src: &str) -> Result<Vec<ContextSpec>, SpecError> {
    let mut p = Parser::new(src)?;
    let mut out = Vec::new();
    while !p.at_end() {
        out.push(command(&mut p)?);
    }
    Ok(out)
}

/// A side formula whose variables are exactly `vars`.
pub fn parse_formula_str(src: &str, vars: &[&str]) -> Result<SideFormula, SpecError> {
    let mut p = Parser::new(src)?;
    let f = formula(&mut p, &|s: &str| vars.contains(&s))?;
    p.finish()?;
    Ok(f)
}

fn idents_until(p: &mut Parser, stop: &str) -> Result<Vec<String>, ParseError> {
    let mut out = Vec::new();
    while !p.is_sym(stop) {
        out.push(p.ident()?);
    }
    Ok(out)
}

fn lemma(p: &mut Parser, specs: &[ContextSpec]) -> Result<LemmaStmt, SpecError> {
    if !p.eat_ident("Lemma") {
        p.expect_keyword("Theorem")?;
    }
    let name = p.ident()?;
    let shape = |msg: String| SpecError::ShapeViolation {
        lemma: name.clone(),
        msg,
    };
    p.expect_sym(":")?;
    p.expect_keyword("forall")?;
    let forall = idents_until(p, ",")?;
    p.expect_sym(",")?;
    let pred = p.ident()?;
    let ctx_vars = idents_until(p, "->")?;
    p.expect_sym("->")?;
    let (spec, form) = specs
        .iter()
        .find_map(|s| {
            if s.name == pred {
                Some((s, LemmaForm::Mset))
            } else if s.list_name() == pred {
                Some((s, LemmaForm::List))
            } else {
                None
            }
        })
        .ok_or_else(|| SpecError::UnknownContext(pred.clone()))?;
    if ctx_vars.len() != spec.arity {
        return Err(shape(format!(
            "{pred} takes {} contexts, got {}",
            spec.arity,
            ctx_vars.len()
        )));
    }
    if let Some(c) = ctx_vars.iter().find(|c| !forall.contains(c)) {
        return Err(SpecError::UnboundVar {
            var: c.clone(),
            place: format!("lemma {name}"),
        });
    }
    let distinct: BTreeSet<&String> = ctx_vars.iter().collect();
    if distinct.len() != ctx_vars.len() {
        return Err(shape("a context variable is repeated".into()));
    }
    let vars: Vec<String> = forall.iter().filter(|v| !ctx_vars.contains(v)).cloned().collect();
    let ctx_index = |p: &mut Parser| -> Result<usize, SpecError> {
        let c = p.ident()?;
        ctx_vars
            .iter()
            .position(|x| *x == c)
            .ok_or_else(|| shape(format!("`member` needs a context variable, got `{c}`")))
    };

    let mut bound: Vec<String> = vars.clone();
    let mut hyp_members = Vec::new();
    let mut first = None;
    while p.is_ident("member") {
        p.expect_keyword("member")?;
        let is_var = |s: &str| bound.iter().any(|v| v == s);
        let t = pat_arg(p, &is_var)?;
        let i = ctx_index(p)?;
        if p.eat_sym("->") {
            hyp_members.push((t, i));
        } else {
            first = Some((t, i));
            break;
        }
    }
    let mut exist_vars = Vec::new();
    if first.is_none() && p.eat_ident("exists") {
        exist_vars = idents_until(p, ",")?;
        p.expect_sym(",")?;
        bound.extend(exist_vars.iter().cloned());
    }
    let is_var = |s: &str| bound.iter().any(|v| v == s);
    let mut concl_members = Vec::new();
    let mut concl_formulas = Vec::new();
    let mut concl_eqs = Vec::new();
    concl_members.extend(first);
    let more = !concl_members.is_empty();
    if !more || p.eat_sym("/\\") {
        loop {
            if p.eat_ident("member") {
                let t = pat_arg(p, &is_var)?;
                concl_members.push((t, ctx_index(p)?));
            } else {
                match atom(p, &is_var)? {
                    SideFormula::Truth => {}
                    SideFormula::Eq(a, b) => concl_eqs.push((a, b)),
                    f => concl_formulas.push(f),
                }
            }
            if !p.eat_sym("/\\") {
                break;
            }
        }
    }
    p.expect_sym(".")?;
    let stmt = LemmaStmt {
        name: name.clone(),
        spec: spec.name.clone(),
        form,
        ctx_vars,
        vars,
        hyp_members,
        exist_vars,
        concl_members,
        concl_formulas,
        concl_eqs,
    };
    stmt.check_shape()?;
    Ok(stmt)
}

/// One lemma about one of `specs`.
pub fn parse_lemma(src: &str, specs: &[ContextSpec]) -> Result<LemmaStmt, SpecError> {
    let mut p = Parser::new(src)?;
    let l = lemma(&mut p, specs)?;
    p.finish()?;
    Ok(l)
}

/// Every lemma in a file.
pub fn parse_lemma_file(src: &str, specs: &[ContextSpec]) -> Result<Vec<LemmaStmt>, SpecError> {
    let mut p = Parser::new(src)?;
    let mut out = Vec::new();
    while !p.at_end() {
        out.push(lemma(&mut p, specs)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctxspec::{trans_rel_spec, ty_ctx_spec, TRANS_REL_COMMAND, TY_CTX_COMMAND};

    fn v(s: &str) -> Pat {
        Pat::Var(s.into())
    }

    fn c(h: &str, args: Vec<Pat>) -> Pat {
        Pat::Con(h.into(), args)
    }

    #[test]
    fn typing_command() {
        let s = parse_spec(TY_CTX_COMMAND).unwrap();
        assert_eq!(s.name, "ty_ctx'");
        assert_eq!(s.arity, 1);
        assert_eq!(s.clauses.len(), 1);
        assert_eq!(s.clauses[0].nabla_vars, vec!["x"]);
        assert_eq!(s.clauses[0].patterns, vec![c("ty_of", vec![v("x"), v("T")])]);
        assert_eq!(s.clauses[0].formula, SideFormula::Truth);
        assert_eq!(s.to_string(), TY_CTX_COMMAND);
    }

    #[test]
    fn translation_command() {
        let s = parse_spec(TRANS_REL_COMMAND).unwrap();
        assert_eq!(s.arity, 3);
        assert_eq!(s.clauses[0].patterns[1], c("trans_to", vec![v("x"), v("y")]));
        assert_eq!(s.clauses[0].metavars(), vec!["T"]);
        assert_eq!(s.to_string(), TRANS_REL_COMMAND);
    }

    #[test]
    fn several_clauses_and_formulas() {
        let s = parse_spec("Context c with elems as nabla x (p x A -| A = i \\/ name A) \\/ (q (arrow B B) -| true).")
            .unwrap();
        assert_eq!(s.clauses.len(), 2);
        assert!(s.clauses[1].nabla_vars.is_empty());
        assert_eq!(s.clauses[1].patterns[0], c("q", vec![c("arrow", vec![v("B"), v("B")])]));
        assert!(matches!(s.clauses[0].formula, SideFormula::Disj(..)));
    }

    #[test]
    fn arity_mismatch() {
        let e = parse_spec("Context c with elems as (p A _|_ p A) \\/ (p A _|_ p A _|_ p A).").unwrap_err();
        assert!(matches!(
            e,
            SpecError::ArityMismatch {
                expected: 2,
                found: 3,
                ..
            }
        ));
    }

    #[test]
    fn unbound_formula_variable() {
        let e = parse_spec("Context c with elems as nabla x (p x -| T = i).").unwrap_err();
        assert!(matches!(e, SpecError::UnboundVar { ref var, .. } if var == "T"));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_spec("Context c with elems (p A)."),
            Err(SpecError::Syntax(_))
        ));
        assert!(matches!(
            parse_spec("Context c with elems as (p A"),
            Err(SpecError::Syntax(_))
        ));
    }

    #[test]
    fn file_with_two_commands() {
        let src = format!("{TY_CTX_COMMAND}\n% comment\n{TRANS_REL_COMMAND}\n");
        let specs = parse_spec_file(&src).unwrap();
        assert_eq!(specs.iter().map(|s| s.arity).collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn lemma_with_existential() {
        let specs = [ty_ctx_spec()];
        let l = parse_lemma(
            "Theorem ty_ctx_mem : forall L X, ty_ctx'_list L -> member X L -> exists n T, name n /\\ X = ty_of n T.",
            &specs,
        )
        .unwrap();
        assert_eq!(l.form, LemmaForm::List);
        assert_eq!(l.ctx_vars, vec!["L"]);
        assert_eq!(l.vars, vec!["X"]);
        assert_eq!(l.hyp_members, vec![(v("X"), 0)]);
        assert_eq!(l.exist_vars, vec!["n", "T"]);
        assert_eq!(l.concl_formulas, vec![SideFormula::IsName("n".into())]);
        assert_eq!(l.concl_eqs, vec![(v("X"), c("ty_of", vec![v("n"), v("T")]))]);
    }

    #[test]
    fn lemma_with_member_conclusion_first() {
        let specs = [trans_rel_spec()];
        let l = parse_lemma(
            "Lemma m : forall G1 G2 G3 X Y, trans_rel G1 G2 G3 -> member (trans_to X Y) G2 -> member (ty_of X i) G1 /\\ true.",
            &specs,
        )
        .unwrap();
        assert_eq!(l.form, LemmaForm::Mset);
        assert_eq!(l.concl_members, vec![(c("ty_of", vec![v("X"), c("i", vec![])]), 0)]);
    }

    #[test]
    fn lemma_shape_errors() {
        let specs = [ty_ctx_spec()];
        let e = parse_lemma("Lemma a : forall L X, ty_ctx'_list L -> member X X -> true.", &specs).unwrap_err();
        assert!(matches!(e, SpecError::ShapeViolation { .. }));
        let e = parse_lemma("Lemma a : forall L X, ty_ctx'_list L -> member L L -> true.", &specs).unwrap_err();
        assert!(matches!(e, SpecError::ShapeViolation { .. }));
        let e = parse_lemma("Lemma a : forall L, other L -> true.", &specs).unwrap_err();
        assert!(matches!(e, SpecError::UnknownContext(_)));
    }
}
