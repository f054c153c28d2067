//! Intuitionistic, linear and linear-ML typing.
//!
//! Each system has a relational reading that follows its inductive
//! definition literally (enumerating every derivable type) and, for the
//! linear systems, an algorithmic checker that threads the unused part of
//! the context from one subterm to the next.

use std::collections::BTreeSet;

use crate::ctx::Ctx;
use crate::syntax::{open, Name, NameSupply, Tm, Ty, TyAssoc};

pub mod lemmas;

/// `Γ ⊢ e : τ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TyJudgment {
    pub ctx: Ctx<TyAssoc>,
    pub term: Tm,
    pub ty: Ty,
}

/// What is left of a linear context after checking a term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leftover {
    pub remaining: Ctx<TyAssoc>,
    pub used: BTreeSet<Name>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    Stlc,
    Linear,
    Ml,
}

pub fn ctx_names(g: &Ctx<TyAssoc>) -> BTreeSet<Name> {
    g.elems().into_iter().map(|a| a.name.clone()).collect()
}

/// A supply of names fresh for the context, the term, and each other.
fn supply(g: &Ctx<TyAssoc>, e: &Tm) -> NameSupply {
    let mut s = NameSupply::avoiding(g.elems().into_iter().map(|a| &a.name));
    e.each_free(&mut |n| s.avoid(n));
    s
}

fn opened(body: &Tm, x: &Name) -> Tm {
    open(body, x).expect("generated and parsed terms are locally closed")
}

/// `type_of`, reading variables by their first association.
pub fn type_of_infer(l: &Ctx<TyAssoc>, e: &Tm) -> Option<Ty> {
    let mut env: Vec<TyAssoc> = l.elems().into_iter().rev().cloned().collect();
    infer(&mut env, e, &mut supply(l, e))
}

/// `env` holds the context innermost binding last.
fn infer(env: &mut Vec<TyAssoc>, e: &Tm, names: &mut NameSupply) -> Option<Ty> {
    match e {
        Tm::Free(n) => env.iter().rev().find(|a| a.name == *n).map(|a| a.ty.clone()),
        Tm::Bound(_) | Tm::Let(..) => None,
        Tm::App(m, n) => match infer(env, m, names)? {
            Ty::Arrow(a, b) if infer(env, n, names).as_ref() == Some(&*a) => Some((*b).clone()),
            _ => None,
        },
        Tm::Abs(t, body) => {
            let x = names.fresh();
            env.push(TyAssoc::new(x.clone(), t.clone()));
            let cod = infer(env, &opened(body, &x), names);
            env.pop();
            Some(Ty::arrow(t.clone(), cod?))
        }
    }
}

/// Every `T` with `type_of G e T` derivable.
pub fn type_of_types(g: &Ctx<TyAssoc>, e: &Tm) -> BTreeSet<Ty> {
    let mut env: Vec<TyAssoc> = g.elems().into_iter().cloned().collect();
    stlc_types(&mut env, e, &mut supply(g, e))
}

fn stlc_types(env: &mut Vec<TyAssoc>, e: &Tm, names: &mut NameSupply) -> BTreeSet<Ty> {
    match e {
        Tm::Free(n) => env.iter().filter(|a| a.name == *n).map(|a| a.ty.clone()).collect(),
        Tm::Bound(_) | Tm::Let(..) => BTreeSet::new(),
        Tm::App(m, n) => {
            let fs = stlc_types(env, m, names);
            if fs.iter().all(|f| !matches!(f, Ty::Arrow(..))) {
                return BTreeSet::new();
            }
            let args = stlc_types(env, n, names);
            fs.into_iter()
                .filter_map(|f| match f {
                    Ty::Arrow(a, b) if args.contains(&a) => Some((*b).clone()),
                    _ => None,
                })
                .collect()
        }
        Tm::Abs(t, body) => {
            let x = names.fresh();
            env.push(TyAssoc::new(x.clone(), t.clone()));
            let cods = stlc_types(env, &opened(body, &x), names);
            env.pop();
            cods.into_iter().map(|c| Ty::arrow(t.clone(), c)).collect()
        }
    }
}

pub fn type_of_rel(g: &Ctx<TyAssoc>, e: &Tm, t: &Ty) -> bool {
    type_of_types(g, e).contains(t)
}

/// `ty_ctx`: a list whose every head name is absent from its tail.
pub fn ty_ctx_list(l: &Ctx<TyAssoc>) -> bool {
    match l {
        Ctx::Empty => true,
        Ctx::Cons(a, t) => !ctx_names(t).contains(&a.name) && ty_ctx_list(t),
        Ctx::Union(..) => false,
    }
}

/// `ty_ctx'`, decided on the flattening.
pub fn ty_ctx_mset(g: &Ctx<TyAssoc>) -> bool {
    ty_ctx_list(&g.to_list())
}

/// `ty_ctx'` as defined: some list permutation of `g` satisfies `pred`.
pub fn ty_ctx_mset_by(g: &Ctx<TyAssoc>, pred: &dyn Fn(&Ctx<TyAssoc>) -> bool) -> bool {
    let items: Vec<TyAssoc> = g.elems().into_iter().cloned().collect();
    crate::gen::distinct_permutations(&items)
        .into_iter()
        .any(|p| pred(&Ctx::from_list(p)))
}

/// Every `T` with `ltype_of G e T` derivable; `with_let` adds the
/// `mltype_of` clause for `let`.
///
/// Every clause observes its context only up to permutation (`select`,
/// `no_elems`, splits), so the search carries the elements of `G` and
/// splits them as [`crate::ctx::splits`] does: by every subset.
fn linear_types(g: &Ctx<TyAssoc>, e: &Tm, with_let: bool) -> BTreeSet<Ty> {
    let items: Vec<TyAssoc> = g.elems().into_iter().cloned().collect();
    Linear { with_let }.types(&items, e, &mut supply(g, e))
}

struct Linear {
    with_let: bool,
}

impl Linear {
    fn types(&self, g: &[TyAssoc], e: &Tm, names: &mut NameSupply) -> BTreeSet<Ty> {
        match e {
            // `select (ty_of X T) G G'` with `no_elems G'`: G holds exactly
            // that one association.
            Tm::Free(n) => match g {
                [a] if a.name == *n => [a.ty.clone()].into_iter().collect(),
                _ => BTreeSet::new(),
            },
            Tm::Bound(_) => BTreeSet::new(),
            Tm::App(m, n) => {
                let mut out = BTreeSet::new();
                for (g1, g2) in subsets(g) {
                    let fs = self.types(&g1, m, names);
                    if fs.iter().all(|f| !matches!(f, Ty::Arrow(..))) {
                        continue;
                    }
                    let args = self.types(&g2, n, names);
                    for f in fs {
                        if let Ty::Arrow(a, b) = f {
                            if args.contains(&a) {
                                out.insert((*b).clone());
                            }
                        }
                    }
                }
                out
            }
            Tm::Abs(t, body) => {
                let x = names.fresh();
                let mut g2 = Vec::with_capacity(g.len() + 1);
                g2.push(TyAssoc::new(x.clone(), t.clone()));
                g2.extend_from_slice(g);
                self.types(&g2, &opened(body, &x), names)
                    .into_iter()
                    .map(|c| Ty::arrow(t.clone(), c))
                    .collect()
            }
            Tm::Let(t, v, body) if self.with_let => {
                let x = names.fresh();
                let body = opened(body, &x);
                let mut out = BTreeSet::new();
                for (g1, mut g2) in subsets(g) {
                    if self.types(&g1, v, names).contains(t) {
                        g2.insert(0, TyAssoc::new(x.clone(), t.clone()));
                        out.extend(self.types(&g2, &body, names));
                    }
                }
                out
            }
            Tm::Let(..) => BTreeSet::new(),
        }
    }
}

/// Each subset of `g` with its complement, both in `g`'s order.
fn subsets(g: &[TyAssoc]) -> impl Iterator<Item = (Vec<TyAssoc>, Vec<TyAssoc>)> + '_ {
    (0u32..1 << g.len()).map(move |mask| {
        let mut a = Vec::new();
        let mut c = Vec::new();
        for (i, x) in g.iter().enumerate() {
            if mask >> i & 1 == 1 {
                a.push(x.clone());
            } else {
                c.push(x.clone());
            }
        }
        (a, c)
    })
}

pub fn ltype_types(g: &Ctx<TyAssoc>, e: &Tm) -> BTreeSet<Ty> {
    linear_types(g, e, false)
}

pub fn mltype_types(g: &Ctx<TyAssoc>, e: &Tm) -> BTreeSet<Ty> {
    linear_types(g, e, true)
}

pub fn ltype_rel(g: &Ctx<TyAssoc>, e: &Tm, t: &Ty) -> bool {
    ltype_types(g, e).contains(t)
}

pub fn mltype_rel(g: &Ctx<TyAssoc>, e: &Tm, t: &Ty) -> bool {
    mltype_types(g, e).contains(t)
}

/// Checks `e` against the list `g_in`, consuming each association at most
/// once. The caller decides whether a nonempty leftover is acceptable.
pub fn ltype_check(g_in: &Ctx<TyAssoc>, e: &Tm) -> Option<(Ty, Leftover)> {
    check_linear(g_in, e, false)
}

pub fn mltype_check(g_in: &Ctx<TyAssoc>, e: &Tm) -> Option<(Ty, Leftover)> {
    check_linear(g_in, e, true)
}

/// Top-level linear typing: the checker succeeds and consumes everything.
pub fn ltype_infer(g: &Ctx<TyAssoc>, e: &Tm) -> Option<Ty> {
    ltype_check(g, e).and_then(|(t, l)| l.remaining.no_elems().then_some(t))
}

pub fn mltype_infer(g: &Ctx<TyAssoc>, e: &Tm) -> Option<Ty> {
    mltype_check(g, e).and_then(|(t, l)| l.remaining.no_elems().then_some(t))
}

fn check_linear(g_in: &Ctx<TyAssoc>, e: &Tm, with_let: bool) -> Option<(Ty, Leftover)> {
    if !g_in.is_list() {
        return None;
    }
    let mut names = supply(g_in, e);
    let remaining: Vec<TyAssoc> = g_in.elems().into_iter().cloned().collect();
    let (t, rest) = thread(remaining, e, with_let, &mut names)?;
    let left = ctx_names(&Ctx::from_list(rest.clone()));
    let used = ctx_names(g_in).difference(&left).cloned().collect();
    Some((
        t,
        Leftover {
            remaining: Ctx::from_list(rest),
            used,
        },
    ))
}

fn thread(mut ctx: Vec<TyAssoc>, e: &Tm, with_let: bool, names: &mut NameSupply) -> Option<(Ty, Vec<TyAssoc>)> {
    match e {
        Tm::Free(n) => {
            let i = ctx.iter().position(|a| a.name == *n)?;
            let a = ctx.remove(i);
            Some((a.ty, ctx))
        }
        Tm::Bound(_) => None,
        Tm::App(m, n) => {
            let (f, ctx) = thread(ctx, m, with_let, names)?;
            let Ty::Arrow(a, b) = f else { return None };
            let (arg, ctx) = thread(ctx, n, with_let, names)?;
            (arg == *a).then(|| ((*b).clone(), ctx))
        }
        Tm::Abs(t, body) => {
            let x = names.fresh();
            ctx.insert(0, TyAssoc::new(x.clone(), t.clone()));
            let (cod, ctx) = thread(ctx, &opened(body, &x), with_let, names)?;
            if ctx.iter().any(|a| a.name == x) {
                return None;
            }
            Some((Ty::arrow(t.clone(), cod), ctx))
        }
        Tm::Let(t, v, body) if with_let => {
            let (tv, mut ctx) = thread(ctx, v, with_let, names)?;
            if tv != *t {
                return None;
            }
            let x = names.fresh();
            ctx.insert(0, TyAssoc::new(x.clone(), t.clone()));
            let (res, ctx) = thread(ctx, &opened(body, &x), with_let, names)?;
            if ctx.iter().any(|a| a.name == x) {
                return None;
            }
            Some((res, ctx))
        }
        Tm::Let(..) => None,
    }
}

/// Decides a judgment in `system`, relationally or algorithmically.
pub fn judge(system: System, algorithmic: bool, j: &TyJudgment) -> bool {
    match (system, algorithmic) {
        (System::Stlc, false) => type_of_rel(&j.ctx, &j.term, &j.ty),
        (System::Stlc, true) => j.ctx.is_list() && type_of_infer(&j.ctx, &j.term).as_ref() == Some(&j.ty),
        (System::Linear, false) => ltype_rel(&j.ctx, &j.term, &j.ty),
        (System::Linear, true) => ltype_infer(&j.ctx, &j.term).as_ref() == Some(&j.ty),
        (System::Ml, false) => mltype_rel(&j.ctx, &j.term, &j.ty),
        (System::Ml, true) => mltype_infer(&j.ctx, &j.term).as_ref() == Some(&j.ty),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_open_term, parse_ty, parse_ty_ctx};

    fn ty(s: &str) -> Ty {
        parse_ty(s).unwrap()
    }

    fn tm(s: &str) -> Tm {
        parse_open_term(s).unwrap()
    }

    fn ctx(s: &str) -> Ctx<TyAssoc> {
        parse_ty_ctx(s).unwrap()
    }

    const COMPOSE: &str = "abs (i -> o) (x\\ abs i (y\\ app x y))";
    const REUSE: &str = "abs (i -> i -> o) (x\\ abs i (y\\ app (app x y) y))";
    const UNUSED: &str = "abs i (x\\ abs o (y\\ y))";

    #[test]
    fn intuitionistic_examples() {
        assert_eq!(type_of_infer(&Ctx::Empty, &tm(COMPOSE)), Some(ty("(i -> o) -> i -> o")));
        assert_eq!(type_of_infer(&ctx("[ty_of n1 i]"), &tm("n1")), Some(ty("i")));
        assert_eq!(type_of_infer(&Ctx::Empty, &tm("n1")), None);
        assert_eq!(
            type_of_infer(&Ctx::Empty, &tm(REUSE)),
            Some(ty("(i -> i -> o) -> i -> o"))
        );
    }

    #[test]
    fn linear_examples() {
        let t = ty("(i -> o) -> i -> o");
        assert!(ltype_rel(&Ctx::Empty, &tm(COMPOSE), &t));
        assert_eq!(ltype_infer(&Ctx::Empty, &tm(COMPOSE)), Some(t));
        assert!(ltype_types(&Ctx::Empty, &tm(REUSE)).is_empty());
        assert!(ltype_types(&Ctx::Empty, &tm(UNUSED)).is_empty());
        assert_eq!(ltype_infer(&Ctx::Empty, &tm(REUSE)), None);
        assert_eq!(ltype_infer(&Ctx::Empty, &tm(UNUSED)), None);
    }

    #[test]
    fn leftover_threading() {
        let (t, l) = ltype_check(&ctx("[ty_of n1 i]"), &tm("n1")).unwrap();
        assert_eq!(t, ty("i"));
        assert_eq!(l.remaining, Ctx::Empty);
        assert!(l.used.contains(&Name::new("n1")));
        assert_eq!(ltype_check(&ctx("[ty_of n1 i]"), &tm("abs o (y\\ n1)")), None);
        let (_, l) = ltype_check(&ctx("[ty_of n1 i, ty_of n2 o]"), &tm("n1")).unwrap();
        assert_eq!(l.remaining, ctx("[ty_of n2 o]"));
        assert_eq!(ltype_infer(&ctx("[ty_of n1 i, ty_of n2 o]"), &tm("n1")), None);
    }

    #[test]
    fn let_examples() {
        let v = "abs o (z\\ z)";
        let e = tm(&format!("let (o -> o) ({v}) (x\\ x)"));
        assert!(mltype_rel(&Ctx::Empty, &e, &ty("o -> o")));
        assert_eq!(mltype_infer(&Ctx::Empty, &e), Some(ty("o -> o")));
        let unused = tm(&format!("let (o -> o) ({v}) (x\\ abs i (y\\ y))"));
        assert!(mltype_types(&Ctx::Empty, &unused).is_empty());
        let (t, l) = mltype_check(&ctx("[ty_of n1 i]"), &tm("let i n1 (x\\ x)")).unwrap();
        assert_eq!((t, l.remaining), (ty("i"), Ctx::Empty));
        assert_eq!(mltype_check(&Ctx::Empty, &tm("n1")), None);
        assert!(ltype_types(&Ctx::Empty, &e).is_empty());
    }

    #[test]
    fn context_predicates() {
        assert!(ty_ctx_list(&Ctx::Empty));
        assert!(ty_ctx_list(&ctx("[ty_of n1 i, ty_of n2 i]")));
        assert!(!ty_ctx_list(&ctx("[ty_of n1 i, ty_of n1 o]")));
        assert!(ty_ctx_mset(&ctx("[ty_of n1 i] ++ [ty_of n2 o]")));
        assert!(!ty_ctx_mset(&ctx("[ty_of n1 i] ++ [ty_of n1 i]")));
        assert!(ty_ctx_mset(&Ctx::Empty));
        assert!(ty_ctx_mset_by(&ctx("[ty_of n1 i] ++ [ty_of n2 o]"), &ty_ctx_list));
    }

    #[test]
    fn linear_typing_ignores_context_layout() {
        let e = tm("app n1 n2");
        let a = ctx("[ty_of n1 (i -> o), ty_of n2 i]");
        let b = ctx("[ty_of n2 i] ++ (nil ++ [ty_of n1 (i -> o)])");
        assert_eq!(ltype_types(&a, &e), ltype_types(&b, &e));
        assert_eq!(ltype_types(&a, &e), [ty("o")].into_iter().collect());
    }
}
