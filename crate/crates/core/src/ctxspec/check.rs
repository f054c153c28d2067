//! The list and multiset predicates a command stands for.

use std::sync::Arc;

use super::{CheckOpts, Clause, ContextSpec, Pat, SideFormula, SpecError, Val};
use crate::ctx::Ctx;

#[derive(Debug, Clone)]
pub(crate) enum CPat {
    Var(usize),
    Con(Arc<str>, Vec<CPat>),
}

/// A clause with its variables numbered.
#[derive(Debug, Clone)]
pub(crate) struct Rule {
    pub(crate) var_names: Vec<String>,
    pub(crate) is_nabla: Vec<bool>,
    pub(crate) pats: Vec<CPat>,
    pub(crate) formula: SideFormula,
}

impl Rule {
    fn compile(c: &Clause) -> Rule {
        let mut var_names: Vec<String> = c.nabla_vars.clone();
        var_names.extend(c.metavars());
        let is_nabla = var_names.iter().map(|v| c.is_nabla(v)).collect();
        let pats = c.patterns.iter().map(|p| cpat(p, &var_names)).collect();
        Rule {
            var_names,
            is_nabla,
            pats,
            formula: c.formula.clone(),
        }
    }

    pub(crate) fn nvars(&self) -> usize {
        self.var_names.len()
    }
}

fn cpat(p: &Pat, vars: &[String]) -> CPat {
    match p {
        Pat::Var(v) => CPat::Var(
            vars.iter()
                .position(|x| x == v)
                .expect("clause variables are collected"),
        ),
        Pat::Con(h, args) => CPat::Con(Arc::from(h.as_str()), args.iter().map(|a| cpat(a, vars)).collect()),
    }
}

pub(crate) type Subst<'a> = Vec<Option<&'a Val>>;

fn match_val<'a>(p: &CPat, v: &'a Val, s: &mut Subst<'a>, is_nabla: &[bool]) -> bool {
    match p {
        CPat::Var(i) => {
            if is_nabla[*i] && !matches!(v, Val::Nom(_)) {
                return false;
            }
            match s[*i] {
                Some(b) => b == v,
                None => {
                    s[*i] = Some(v);
                    true
                }
            }
        }
        CPat::Con(h, args) => match v {
            Val::Con(g, vs) if g == h && vs.len() == args.len() => {
                args.iter().zip(vs.iter()).all(|(a, x)| match_val(a, x, s, is_nabla))
            }
            _ => false,
        },
    }
}

pub(crate) fn instantiate(p: &CPat, s: &Subst<'_>) -> Val {
    match p {
        CPat::Var(i) => s[*i].expect("every pattern variable is bound").clone(),
        CPat::Con(h, args) => Val::Con(h.clone(), args.iter().map(|a| instantiate(a, s)).collect()),
    }
}

/// A command ready for checking under fixed nabla semantics.
#[derive(Debug, Clone)]
pub struct Elaborated<'s> {
    pub spec: &'s ContextSpec,
    pub opts: CheckOpts,
    pub(crate) rules: Vec<Rule>,
}

impl<'s> Elaborated<'s> {
    pub fn new(spec: &'s ContextSpec, opts: CheckOpts) -> Elaborated<'s> {
        Elaborated {
            spec,
            opts,
            rules: spec.clauses.iter().map(Rule::compile).collect(),
        }
    }

    fn arity_ok<E>(&self, gs: &[Ctx<E>]) -> Result<(), SpecError> {
        if gs.len() == self.spec.arity {
            Ok(())
        } else {
            Err(SpecError::WrongTupleSize {
                expected: self.spec.arity,
                found: gs.len(),
            })
        }
    }

    /// Whether a fully matched head row may sit in front of `tails`.
    pub(crate) fn row_ok<'b>(&self, rule: &Rule, s: &Subst<'_>, tails: impl Iterator<Item = &'b Val> + Clone) -> bool {
        if self.opts.nabla_fresh {
            let noms: Vec<&Val> = (0..rule.nvars())
                .filter(|&i| rule.is_nabla[i])
                .filter_map(|i| s[i])
                .collect();
            for (k, a) in noms.iter().enumerate() {
                let Val::Nom(n) = a else { return false };
                if noms[..k].contains(a) {
                    return false;
                }
                let in_metas = (0..rule.nvars()).any(|i| !rule.is_nabla[i] && s[i].is_some_and(|v| v.mentions(n)));
                if in_metas || tails.clone().any(|t| t.mentions(n)) {
                    return false;
                }
            }
        }
        if rule.formula == SideFormula::Truth {
            return true;
        }
        let lookup = |v: &str| {
            let i = rule.var_names.iter().position(|x| x == v)?;
            s[i].cloned()
        };
        rule.formula.eval(&lookup).unwrap_or(false)
    }

    pub(crate) fn match_row<'a>(&self, rule: &Rule, heads: &[&'a Val]) -> Option<Subst<'a>> {
        let mut s = vec![None; rule.nvars()];
        rule.pats
            .iter()
            .zip(heads)
            .all(|(p, v)| match_val(p, v, &mut s, &rule.is_nabla))
            .then_some(s)
    }

    /// The list predicate: rows are read front to back, each matched by
    /// some clause against the rows behind it.
    pub fn check_list(&self, ls: &[Ctx<Val>]) -> Result<bool, SpecError> {
        self.arity_ok(ls)?;
        if let Some(i) = ls.iter().position(|l| !l.is_list()) {
            return Err(SpecError::NotAList(i + 1));
        }
        let cols: Vec<Vec<&Val>> = ls.iter().map(Ctx::elems).collect();
        Ok(self.columns_ok(&cols))
    }

    pub(crate) fn columns_ok(&self, cols: &[Vec<&Val>]) -> bool {
        let len = cols[0].len();
        if cols.iter().any(|c| c.len() != len) {
            return false;
        }
        (0..len).all(|r| {
            let heads: Vec<&Val> = cols.iter().map(|c| c[r]).collect();
            let tails = cols.iter().flat_map(|c| c[r + 1..].iter().copied());
            self.rules.iter().any(|rule| {
                self.match_row(rule, &heads)
                    .is_some_and(|s| self.row_ok(rule, &s, tails.clone()))
            })
        })
    }

    /// Lists `Li ~ Gi` satisfying the list predicate, if there are any.
    pub fn align(&self, gs: &[Ctx<Val>]) -> Result<Option<Vec<Ctx<Val>>>, SpecError> {
        self.arity_ok(gs)?;
        let cols: Vec<Vec<&Val>> = gs.iter().map(Ctx::elems).collect();
        if cols.iter().any(|c| c.len() != cols[0].len()) {
            return Ok(None);
        }
        Ok(self.search(&cols).map(|rows| {
            rows.into_iter()
                .map(|c| Ctx::from_list(c.into_iter().cloned()))
                .collect()
        }))
    }

    pub fn check_mset(&self, gs: &[Ctx<Val>]) -> Result<bool, SpecError> {
        Ok(self.align(gs)?.is_some())
    }

    fn search<'a>(&self, cols: &[Vec<&'a Val>]) -> Option<Vec<Vec<&'a Val>>> {
        if cols[0].is_empty() {
            return Some(vec![Vec::new(); cols.len()]);
        }
        let distinct = |c: &Vec<&Val>| {
            let mut d = c.clone();
            d.sort();
            d.dedup();
            d.len()
        };
        let mut order: Vec<usize> = (0..cols.len()).collect();
        order.sort_by_key(|&i| distinct(&cols[i]));
        let mut chosen = vec![0; cols.len()];
        self.rules.iter().find_map(|rule| {
            let s = vec![None; rule.nvars()];
            self.choose(rule, cols, &order, 0, &mut chosen, s)
        })
    }

    /// Picks one element per context, pivot first, consistently with one
    /// substitution; then checks freshness against the residuals and
    /// recurses on them.
    fn choose<'a>(
        &self,
        rule: &Rule,
        cols: &[Vec<&'a Val>],
        order: &[usize],
        k: usize,
        chosen: &mut Vec<usize>,
        s: Subst<'a>,
    ) -> Option<Vec<Vec<&'a Val>>> {
        if k == order.len() {
            let residual: Vec<Vec<&'a Val>> = cols
                .iter()
                .zip(chosen.iter())
                .map(|(c, &j)| c.iter().enumerate().filter(|(x, _)| *x != j).map(|(_, v)| *v).collect())
                .collect();
            if !self.row_ok(rule, &s, residual.iter().flatten().copied()) {
                return None;
            }
            let mut rest = self.search(&residual)?;
            for (i, col) in rest.iter_mut().enumerate() {
                col.insert(0, cols[i][chosen[i]]);
            }
            return Some(rest);
        }
        let i = order[k];
        let mut seen: Vec<&Val> = Vec::new();
        for (j, v) in cols[i].iter().enumerate() {
            if seen.contains(v) {
                continue;
            }
            seen.push(v);
            let mut s2 = s.clone();
            if !match_val(&rule.pats[i], v, &mut s2, &rule.is_nabla) {
                continue;
            }
            chosen[i] = j;
            if let Some(r) = self.choose(rule, cols, order, k + 1, chosen, s2) {
                return Some(r);
            }
        }
        None
    }
}

pub fn check_list_pred(spec: &ContextSpec, ls: &[Ctx<Val>]) -> Result<bool, SpecError> {
    Elaborated::new(spec, CheckOpts::default()).check_list(ls)
}

pub fn check_mset_pred(spec: &ContextSpec, gs: &[Ctx<Val>]) -> Result<bool, SpecError> {
    Elaborated::new(spec, CheckOpts::default()).check_mset(gs)
}

pub fn mset_align(spec: &ContextSpec, gs: &[Ctx<Val>]) -> Result<Option<Vec<Ctx<Val>>>, SpecError> {
    Elaborated::new(spec, CheckOpts::default()).align(gs)
}
