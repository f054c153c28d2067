//! Member-based lemmas about context relations, their lifting from lists
//! to multisets, and bounded verification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::check::{CPat, Elaborated};
use super::gen::{columns, gen_tuples, layouts, value_universe, Tuple};
use super::{ContextSpec, Pat, SideFormula, SpecError, Val};
use crate::ctx::{mem_transport, Ctx};
use crate::gen::GenBounds;
use crate::report::{check_all, check_seq, CheckReport, Counterexample, Outcome};
use crate::syntax::NameSupply;

/// Whether a lemma quantifies over lists or over contexts with unions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LemmaForm {
    List,
    Mset,
}

/// `forall ctx_vars vars, PRED ctx_vars -> member .. -> .. -> exists
/// exist_vars, member .. /\ formula .. /\ lhs = rhs ..`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaStmt {
    pub name: String,
    pub spec: String,
    pub form: LemmaForm,
    pub ctx_vars: Vec<String>,
    pub vars: Vec<String>,
    pub hyp_members: Vec<(Pat, usize)>,
    pub exist_vars: Vec<String>,
    pub concl_members: Vec<(Pat, usize)>,
    pub concl_formulas: Vec<SideFormula>,
    pub concl_eqs: Vec<(Pat, Pat)>,
}

fn pat_heads<'a>(p: &'a Pat, out: &mut Vec<&'a str>) {
    if let Pat::Con(h, args) = p {
        out.push(h);
        args.iter().for_each(|a| pat_heads(a, out));
    }
}

fn formula_heads<'a>(f: &'a SideFormula, out: &mut Vec<&'a str>) {
    match f {
        SideFormula::Eq(a, b) => {
            pat_heads(a, out);
            pat_heads(b, out);
        }
        SideFormula::Conj(a, b) | SideFormula::Disj(a, b) => {
            formula_heads(a, out);
            formula_heads(b, out);
        }
        SideFormula::Truth | SideFormula::IsName(_) => {}
    }
}

impl LemmaStmt {
    pub fn pred_name(&self) -> String {
        match self.form {
            LemmaForm::List => format!("{}_list", self.spec),
            LemmaForm::Mset => self.spec.clone(),
        }
    }

    /// Terms and formulas may mention element variables only.
    pub fn check_shape(&self) -> Result<(), SpecError> {
        let shape = |msg: String| SpecError::ShapeViolation {
            lemma: self.name.clone(),
            msg,
        };
        let mut heads = Vec::new();
        for (p, _) in self.hyp_members.iter().chain(&self.concl_members) {
            pat_heads(p, &mut heads);
        }
        for (a, b) in &self.concl_eqs {
            pat_heads(a, &mut heads);
            pat_heads(b, &mut heads);
        }
        self.concl_formulas.iter().for_each(|f| formula_heads(f, &mut heads));
        for h in heads {
            if self.ctx_vars.iter().any(|c| c == h) {
                return Err(shape(format!("a term mentions the context variable `{h}`")));
            }
            if h.starts_with(|c: char| c.is_ascii_uppercase()) {
                return Err(SpecError::UnboundVar {
                    var: h.to_string(),
                    place: format!("lemma {}", self.name),
                });
            }
        }
        let mut seen = BTreeSet::new();
        for v in self.ctx_vars.iter().chain(&self.vars).chain(&self.exist_vars) {
            if !seen.insert(v) {
                return Err(shape(format!("`{v}` is bound twice")));
            }
        }
        Ok(())
    }

    fn renamed(&self, f: &dyn Fn(&str) -> String) -> LemmaStmt {
        LemmaStmt {
            name: self.name.clone(),
            spec: self.spec.clone(),
            form: self.form,
            ctx_vars: self.ctx_vars.iter().map(|v| f(v)).collect(),
            vars: self.vars.iter().map(|v| f(v)).collect(),
            hyp_members: self.hyp_members.iter().map(|(p, c)| (p.rename(f), *c)).collect(),
            exist_vars: self.exist_vars.iter().map(|v| f(v)).collect(),
            concl_members: self.concl_members.iter().map(|(p, c)| (p.rename(f), *c)).collect(),
            concl_formulas: self.concl_formulas.iter().map(|x| x.rename(f)).collect(),
            concl_eqs: self.concl_eqs.iter().map(|(a, b)| (a.rename(f), b.rename(f))).collect(),
        }
    }

    /// The statement with bound variables renamed by position, conjuncts
    /// and hypotheses sorted, equations oriented, and the name dropped.
    pub fn canonical(&self) -> LemmaStmt {
        let mut map = BTreeMap::new();
        for (i, v) in self.ctx_vars.iter().enumerate() {
            map.insert(v.clone(), format!("C{i}"));
        }
        for (i, v) in self.vars.iter().enumerate() {
            map.insert(v.clone(), format!("V{i}"));
        }
        for (i, v) in self.exist_vars.iter().enumerate() {
            map.insert(v.clone(), format!("E{i}"));
        }
        let mut c = self.renamed(&|v| map.get(v).cloned().unwrap_or_else(|| v.to_string()));
        c.name.clear();
        c.hyp_members.sort();
        c.concl_members.sort();
        c.concl_formulas.sort();
        for eq in &mut c.concl_eqs {
            if eq.1 < eq.0 {
                std::mem::swap(&mut eq.0, &mut eq.1);
            }
        }
        c.concl_eqs.sort();
        c
    }

    /// Equal up to the lemma name, bound variable names and conjunct order.
    pub fn alpha_eq(&self, other: &LemmaStmt) -> bool {
        self.canonical() == other.canonical()
    }

    /// Checks the statement on one tuple of contexts the predicate holds
    /// of, counting one case per hypothesis instance.
    pub fn eval_on(&self, ctxs: &[Ctx<Val>], universe: &[Val]) -> Outcome {
        Compiled::new(self).eval_on(self, ctxs, universe)
    }
}

impl fmt::Display for LemmaStmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = |p: &Pat| match p {
            Pat::Con(_, a) if !a.is_empty() => format!("({p})"),
            _ => p.to_string(),
        };
        let forall: Vec<&str> = self.ctx_vars.iter().chain(&self.vars).map(String::as_str).collect();
        write!(
            f,
            "Theorem {} : forall {}, {} {} -> ",
            self.name,
            forall.join(" "),
            self.pred_name(),
            self.ctx_vars.join(" ")
        )?;
        for (p, c) in &self.hyp_members {
            write!(f, "member {} {} -> ", arg(p), self.ctx_vars[*c])?;
        }
        if !self.exist_vars.is_empty() {
            write!(f, "exists {}, ", self.exist_vars.join(" "))?;
        }
        let mut items: Vec<String> = Vec::new();
        for (p, c) in &self.concl_members {
            items.push(format!("member {} {}", arg(p), self.ctx_vars[*c]));
        }
        for x in &self.concl_formulas {
            items.push(match x {
                SideFormula::Disj(..) => format!("({x})"),
                _ => x.to_string(),
            });
        }
        for (a, b) in &self.concl_eqs {
            items.push(format!("{a} = {b}"));
        }
        if items.is_empty() {
            items.push("true".into());
        }
        write!(f, "{}.", items.join(" /\\ "))
    }
}

/// The terms existential and unconstrained variables are tried over: the
/// values in the contexts and inside them, the bounded types, and one name
/// that occurs nowhere.
pub fn term_universe(ctxs: &[Ctx<Val>], b: &GenBounds) -> Vec<Val> {
    let mut out = BTreeSet::new();
    let mut names = BTreeSet::new();
    for g in ctxs {
        for x in g.elems() {
            x.collect_subvalues(&mut out);
            x.collect_names(&mut names);
        }
    }
    out.extend(value_universe(b));
    out.insert(Val::Nom(NameSupply::avoiding(&names).fresh()));
    out.into_iter().collect()
}

fn lifted_ctx_name(v: &str, taken: &[String]) -> String {
    let mut n = match v.strip_prefix('L') {
        Some(rest) => format!("G{rest}"),
        None => format!("G{v}"),
    };
    while taken.contains(&n) {
        n.push('\'');
    }
    n
}

/// The multiset form of a list-form lemma: the same statement about the
/// context relation itself, with the context variables renamed `L* -> G*`.
pub fn lift_lemma(spec: &ContextSpec, stmt: &LemmaStmt) -> Result<LemmaStmt, SpecError> {
    if stmt.spec != spec.name || stmt.form != LemmaForm::List {
        return Err(SpecError::ShapeMismatch(format!(
            "{} is not a lemma about {}",
            stmt.name,
            spec.list_name()
        )));
    }
    stmt.check_shape()?;
    let others: Vec<String> = stmt.vars.iter().chain(&stmt.exist_vars).cloned().collect();
    let mut map = BTreeMap::new();
    let mut taken = others.clone();
    for c in &stmt.ctx_vars {
        let n = lifted_ctx_name(c, &taken);
        taken.push(n.clone());
        map.insert(c.clone(), n);
    }
    let mut lifted = stmt.renamed(&|v| map.get(v).cloned().unwrap_or_else(|| v.to_string()));
    lifted.name = format!("{}'", stmt.name);
    lifted.form = LemmaForm::Mset;
    Ok(lifted)
}

fn same_spec(e: &Elaborated<'_>, stmt: &LemmaStmt) -> Result<(), SpecError> {
    if stmt.spec == e.spec.name {
        Ok(())
    } else {
        Err(SpecError::ShapeMismatch(format!(
            "{} is not a lemma about {}",
            stmt.name, e.spec.name
        )))
    }
}

type Env = Vec<Option<Val>>;

fn var_index(names: &mut Vec<String>, v: &str) -> usize {
    match names.iter().position(|n| n == v) {
        Some(i) => i,
        None => {
            names.push(v.to_string());
            names.len() - 1
        }
    }
}

fn compile_pat(p: &Pat, names: &mut Vec<String>) -> CPat {
    match p {
        Pat::Var(v) => CPat::Var(var_index(names, v)),
        Pat::Con(h, args) => CPat::Con(
            Arc::from(h.as_str()),
            args.iter().map(|a| compile_pat(a, names)).collect(),
        ),
    }
}

fn match_pat(p: &CPat, v: &Val, env: &mut Env) -> bool {
    match p {
        CPat::Var(i) => match &env[*i] {
            Some(b) => b == v,
            None => {
                env[*i] = Some(v.clone());
                true
            }
        },
        CPat::Con(h, args) => match v {
            Val::Con(g, vs) if g == h && vs.len() == args.len() => {
                args.iter().zip(vs.iter()).all(|(a, x)| match_pat(a, x, env))
            }
            _ => false,
        },
    }
}

fn ground(p: &CPat, env: &Env) -> Option<Val> {
    match p {
        CPat::Var(i) => env[*i].clone(),
        CPat::Con(h, args) => {
            let vs = args.iter().map(|a| ground(a, env)).collect::<Option<Vec<_>>>()?;
            Some(Val::Con(h.clone(), vs.into()))
        }
    }
}

/// The distinct elements of each context.
fn element_sets(ctxs: &[Ctx<Val>]) -> Vec<Vec<&Val>> {
    ctxs.iter()
        .map(|g| {
            let mut es = g.elems();
            es.sort();
            es.dedup();
            es
        })
        .collect()
}

/// A lemma with its variables numbered.
struct Compiled {
    names: Vec<String>,
    forall: Vec<usize>,
    exist: Vec<usize>,
    hyps: Vec<(CPat, usize)>,
    members: Vec<(CPat, usize)>,
    eqs: Vec<(CPat, CPat)>,
    formulas: Vec<SideFormula>,
}

impl Compiled {
    fn new(stmt: &LemmaStmt) -> Compiled {
        let mut names: Vec<String> = stmt.vars.iter().chain(&stmt.exist_vars).cloned().collect();
        let forall = (0..stmt.vars.len()).collect();
        let exist = (stmt.vars.len()..names.len()).collect();
        let mut members_of = |ms: &[(Pat, usize)]| ms.iter().map(|(p, c)| (compile_pat(p, &mut names), *c)).collect();
        let hyps = members_of(&stmt.hyp_members);
        let members = members_of(&stmt.concl_members);
        let eqs = stmt
            .concl_eqs
            .iter()
            .map(|(a, b)| (compile_pat(a, &mut names), compile_pat(b, &mut names)))
            .collect();
        Compiled {
            names,
            forall,
            exist,
            hyps,
            members,
            eqs,
            formulas: stmt.concl_formulas.clone(),
        }
    }

    fn empty_env(&self) -> Env {
        vec![None; self.names.len()]
    }

    fn show(&self, stmt: &LemmaStmt, ctxs: &[Ctx<Val>], env: &Env) -> Counterexample {
        let mut cex = Counterexample::new();
        for (c, g) in stmt.ctx_vars.iter().zip(ctxs) {
            cex = cex.with(c, g);
        }
        for &i in &self.forall {
            if let Some(x) = &env[i] {
                cex = cex.with(&self.names[i], x);
            }
        }
        cex
    }

    /// Bindings of the universal variables that make every member
    /// hypothesis true; variables no hypothesis mentions range over
    /// `universe`.
    fn hyp_bindings(&self, sets: &[Vec<&Val>], universe: &[Val]) -> Vec<Env> {
        let mut envs = vec![self.empty_env()];
        for (p, c) in &self.hyps {
            let mut next = Vec::new();
            for env in &envs {
                for x in &sets[*c] {
                    let mut e2 = env.clone();
                    if match_pat(p, x, &mut e2) {
                        next.push(e2);
                    }
                }
            }
            envs = next;
        }
        for &v in &self.forall {
            envs = envs
                .into_iter()
                .flat_map(|env| {
                    if env[v].is_some() {
                        vec![env]
                    } else {
                        universe
                            .iter()
                            .map(|u| {
                                let mut e2 = env.clone();
                                e2[v] = Some(u.clone());
                                e2
                            })
                            .collect()
                    }
                })
                .collect();
        }
        envs
    }

    /// An extension of `env` satisfying the conclusion: member conjuncts
    /// are searched over context elements, equations solved by matching,
    /// and remaining existential variables tried over `universe`.
    fn witness(&self, sets: &[Vec<&Val>], env: Env, universe: &[Val]) -> Option<Env> {
        self.members_from(0, sets, env, universe)
    }

    fn members_from(&self, k: usize, sets: &[Vec<&Val>], env: Env, universe: &[Val]) -> Option<Env> {
        let Some((p, c)) = self.members.get(k) else {
            return self.solve_rest(env, universe);
        };
        sets[*c].iter().find_map(|x| {
            let mut e2 = env.clone();
            if match_pat(p, x, &mut e2) {
                self.members_from(k + 1, sets, e2, universe)
            } else {
                None
            }
        })
    }

    fn solve_rest(&self, mut env: Env, universe: &[Val]) -> Option<Env> {
        let mut progress = true;
        while progress {
            progress = false;
            for (a, b) in &self.eqs {
                let solved = match (ground(a, &env), ground(b, &env)) {
                    (Some(va), None) => Some(match_pat(b, &va, &mut env)),
                    (None, Some(vb)) => Some(match_pat(a, &vb, &mut env)),
                    _ => None,
                };
                match solved {
                    Some(false) => return None,
                    Some(true) => progress = true,
                    None => {}
                }
            }
        }
        if let Some(&v) = self.exist.iter().find(|&&v| env[v].is_none()) {
            return universe.iter().find_map(|u| {
                let mut e2 = env.clone();
                e2[v] = Some(u.clone());
                self.solve_rest(e2, universe)
            });
        }
        let eqs = self
            .eqs
            .iter()
            .all(|(a, b)| matches!((ground(a, &env), ground(b, &env)), (Some(x), Some(y)) if x == y));
        let lookup = |x: &str| self.names.iter().position(|n| n == x).and_then(|i| env[i].clone());
        let fs = self.formulas.iter().all(|f| f.eval(&lookup) == Some(true));
        (eqs && fs).then_some(env)
    }

    fn eval_on(&self, stmt: &LemmaStmt, ctxs: &[Ctx<Val>], universe: &[Val]) -> Outcome {
        let sets = element_sets(ctxs);
        check_seq(self.hyp_bindings(&sets, universe), |env| {
            let ok = self.witness(&sets, env.clone(), universe).is_some();
            Outcome::check(ok, || self.show(stmt, ctxs, &env))
        })
    }
}

/// Checks `stmt` on every generated tuple: as lists for a list-form
/// lemma, in every layout up to the union depth otherwise.
pub fn verify_lemma(e: &Elaborated<'_>, stmt: &LemmaStmt, b: &GenBounds) -> Result<CheckReport, SpecError> {
    same_spec(e, stmt)?;
    stmt.check_shape()?;
    let tuples = gen_tuples(e, b);
    let arity = e.spec.arity;
    let c = Compiled::new(stmt);
    Ok(CheckReport::run(&stmt.name, || {
        check_all(&tuples, |t: &Tuple| {
            let cols = columns(t, arity);
            let universe = term_universe(&cols, b);
            match stmt.form {
                LemmaForm::List => c.eval_on(stmt, &cols, &universe),
                LemmaForm::Mset => check_seq(layouts(t, arity, b.union_depth), |gs| c.eval_on(stmt, &gs, &universe)),
            }
        })
    }))
}

/// The lifted lemma checked the way its proof goes: unfold the relation to
/// lists, carry each member hypothesis over with [`mem_transport`], find
/// the conclusion's witnesses with the list-form lemma, and carry the
/// member conclusions back along the same permutations.
pub fn check_lifted(e: &Elaborated<'_>, list_stmt: &LemmaStmt, b: &GenBounds) -> Result<CheckReport, SpecError> {
    same_spec(e, list_stmt)?;
    let lifted = lift_lemma(e.spec, list_stmt)?;
    let tuples = gen_tuples(e, b);
    let arity = e.spec.arity;
    let name = format!("{}_via_{}", lifted.name, list_stmt.name);
    // Lifting renames only context variables, so one numbering serves both.
    let c = Compiled::new(list_stmt);
    Ok(CheckReport::run(&name, || {
        check_all(&tuples, |t: &Tuple| {
            let universe = term_universe(&columns(t, arity), b);
            check_seq(layouts(t, arity, b.union_depth), |gs| {
                let Ok(Some(ls)) = e.align(&gs) else {
                    return Outcome::fail(1, c.show(&lifted, &gs, &c.empty_env()));
                };
                let g_sets = element_sets(&gs);
                let l_sets = element_sets(&ls);
                check_seq(c.hyp_bindings(&g_sets, &universe), |env| {
                    let ok = transported(&c, &gs, &ls, &l_sets, &env, &universe);
                    Outcome::check(ok, || c.show(&lifted, &gs, &env))
                })
            })
        })
    }))
}

fn transported(
    c: &Compiled,
    gs: &[Ctx<Val>],
    ls: &[Ctx<Val>],
    l_sets: &[Vec<&Val>],
    env: &Env,
    universe: &[Val],
) -> bool {
    let hyps_move = c
        .hyps
        .iter()
        .all(|(p, i)| ground(p, env).is_some_and(|x| mem_transport(&x, &gs[*i], &ls[*i]) == Ok(true)));
    if !hyps_move {
        return false;
    }
    let Some(w) = c.witness(l_sets, env.clone(), universe) else {
        return false;
    };
    c.members
        .iter()
        .all(|(p, i)| ground(p, &w).is_some_and(|x| mem_transport(&x, &ls[*i], &gs[*i]) == Ok(true)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctxspec::{parse_lemma, trans_rel_spec, ty_ctx_spec, CheckOpts};

    const TY_CTX_MEM: &str =
        "Theorem ty_ctx_mem : forall L X, ty_ctx'_list L -> member X L -> exists n T, name n /\\ X = ty_of n T.";
    const TY_CTX_UNIQ: &str = "Theorem ty_ctx_uniq : forall L X T1 T2, ty_ctx'_list L -> \
        member (ty_of X T1) L -> member (ty_of X T2) L -> T1 = T2.";

    fn small() -> GenBounds {
        GenBounds {
            ctx_elems: 2,
            union_depth: 1,
            ..GenBounds::default()
        }
    }

    #[test]
    fn lifting_renames_contexts_and_predicate() {
        let s = ty_ctx_spec();
        let l = parse_lemma(TY_CTX_MEM, std::slice::from_ref(&s)).unwrap();
        let m = lift_lemma(&s, &l).unwrap();
        assert_eq!(
            m.to_string(),
            "Theorem ty_ctx_mem' : forall G X, ty_ctx' G -> member X G -> exists n T, name n /\\ X = ty_of n T."
        );
        assert!(lift_lemma(&s, &m).is_err());
    }

    #[test]
    fn alpha_equivalence_ignores_names_and_order() {
        let s = trans_rel_spec();
        let a = parse_lemma(
            "Lemma a : forall G1 G2 G3 E, trans_rel G1 G2 G3 -> member E G2 -> exists X Y T, \
             E = trans_to X Y /\\ name X /\\ member (ty_of X T) G1.",
            std::slice::from_ref(&s),
        )
        .unwrap();
        let b = parse_lemma(
            "Lemma b : forall H1 H2 H3 F, trans_rel H1 H2 H3 -> member F H2 -> exists A B U, \
             member (ty_of A U) H1 /\\ name A /\\ trans_to A B = F.",
            &[s],
        )
        .unwrap();
        assert!(a.alpha_eq(&b));
    }

    #[test]
    fn typing_lemmas_hold_in_both_forms() {
        let s = ty_ctx_spec();
        let e = Elaborated::new(&s, CheckOpts::default());
        for src in [TY_CTX_MEM, TY_CTX_UNIQ] {
            let l = parse_lemma(src, std::slice::from_ref(&s)).unwrap();
            let m = lift_lemma(&s, &l).unwrap();
            for r in [
                verify_lemma(&e, &l, &small()).unwrap(),
                verify_lemma(&e, &m, &small()).unwrap(),
            ] {
                assert!(r.passed() && r.cases > 0, "{}", r.text_line(false));
            }
            assert!(check_lifted(&e, &l, &small()).unwrap().passed());
        }
    }

    #[test]
    fn false_statement_gets_a_counterexample() {
        let s = ty_ctx_spec();
        let e = Elaborated::new(&s, CheckOpts::default());
        let l = parse_lemma(
            "Lemma wrong : forall G X T1 T2, ty_ctx' G -> member (ty_of X T1) G -> member (ty_of X T2) G -> T1 = i.",
            std::slice::from_ref(&s),
        )
        .unwrap();
        let r = verify_lemma(&e, &l, &small()).unwrap();
        assert!(!r.passed());
        let cex = r.counterexample.unwrap();
        assert_ne!(cex.get("T1"), Some("i"));
    }

    #[test]
    fn uniqueness_needs_freshness() {
        let s = ty_ctx_spec();
        let e = Elaborated::new(&s, CheckOpts { nabla_fresh: false });
        let l = parse_lemma(TY_CTX_UNIQ, std::slice::from_ref(&s)).unwrap();
        let r = verify_lemma(&e, &l, &small()).unwrap();
        assert!(!r.passed());
        let cex = r.counterexample.unwrap();
        assert_ne!(cex.get("T1"), cex.get("T2"));
    }
}
