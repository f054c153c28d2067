//! Whole runs of the engine: cross-checks of the built-in commands against
//! the hand-written predicates, and every check a spec and lemma file call
//! for.

use super::check::Elaborated;
use super::distr::check_distr;
use super::gen::{columns, gen_tuples, layouts, reversed_union};
use super::lemma::{check_lifted, lift_lemma, verify_lemma, LemmaForm, LemmaStmt};
use super::{trans_rel_spec, ty_ctx_spec, CheckOpts, ContextSpec, SpecError, Val};
use crate::ctx::{gen_ctxs, Ctx};
use crate::gen::{distinct_permutations, gen_lists, gen_types, GenBounds};
use crate::report::{check_all, check_seq, CheckReport, Counterexample, Outcome};
use crate::syntax::{Name, Ty, TyAssoc, VarAssoc};
use crate::translation::{trans_rel_list, trans_rel_mset};
use crate::typing::lemmas::assoc_pool;
use crate::typing::{ty_ctx_list, ty_ctx_mset};

fn to_ty(v: &Val) -> Option<Ty> {
    match v {
        Val::Con(b, args) if args.is_empty() => Some(Ty::base(b)),
        Val::Con(h, args) if &**h == "arrow" && args.len() == 2 => Some(Ty::arrow(to_ty(&args[0])?, to_ty(&args[1])?)),
        _ => None,
    }
}

pub fn to_ty_assoc(v: &Val) -> Option<TyAssoc> {
    match v {
        Val::Con(h, args) if &**h == "ty_of" && args.len() == 2 => match &args[0] {
            Val::Nom(n) => Some(TyAssoc::new(n.clone(), to_ty(&args[1])?)),
            _ => None,
        },
        _ => None,
    }
}

pub fn to_var_assoc(v: &Val) -> Option<VarAssoc> {
    match v {
        Val::Con(h, args) if &**h == "trans_to" && args.len() == 2 => match (&args[0], &args[1]) {
            (Val::Nom(x), Val::Nom(y)) => Some(VarAssoc::new(x.clone(), y.clone())),
            _ => None,
        },
        _ => None,
    }
}

fn back<E: Clone>(g: &Ctx<Val>, f: fn(&Val) -> Option<E>) -> Ctx<E> {
    g.map(&|v| f(v).expect("generated elements have the expected shape"))
}

fn ty_vals(g: &Ctx<TyAssoc>) -> Ctx<Val> {
    g.map(&Val::ty_of)
}

fn var_vals(g: &Ctx<VarAssoc>) -> Ctx<Val> {
    g.map(&Val::trans_to)
}

fn agree(engine: Result<bool, SpecError>, hand: bool, cex: impl FnOnce() -> Counterexample) -> Outcome {
    Outcome::check(engine == Ok(hand), cex)
}

fn show3(gs: &[Ctx<Val>]) -> Counterexample {
    Counterexample::new()
        .with("G1", &gs[0])
        .with("G2", &gs[1])
        .with("G3", &gs[2])
}

/// Small triples over a few names, related or not: lists of at most two
/// elements, with the middle one also arranged with unions.
fn small_triples(middle_depth: usize) -> Vec<(Ctx<TyAssoc>, Ctx<VarAssoc>, Ctx<TyAssoc>)> {
    let names = [Name::new("n0"), Name::new("n1"), Name::new("m0")];
    let tys = gen_types(1);
    let ty_pool: Vec<TyAssoc> = names
        .iter()
        .flat_map(|n| tys.iter().map(move |t| TyAssoc::new(n.clone(), t.clone())))
        .collect();
    let var_pool: Vec<VarAssoc> = names
        .iter()
        .flat_map(|x| names.iter().map(move |y| VarAssoc::new(x.clone(), y.clone())))
        .collect();
    let outer = gen_ctxs(&ty_pool, 2, 0);
    let mut out = Vec::new();
    for g2 in gen_ctxs(&var_pool, 2, middle_depth) {
        for g1 in &outer {
            for g3 in &outer {
                out.push((g1.clone(), g2.clone(), g3.clone()));
            }
        }
    }
    out
}

/// The elaborated commands against `ty_ctx_list`, `ty_ctx_mset`,
/// `trans_rel_list` and `trans_rel_mset`, plus the existential reading of
/// the multiset predicate.
pub fn fidelity_reports(b: &GenBounds) -> Vec<CheckReport> {
    let ty = ty_ctx_spec();
    let tr = trans_rel_spec();
    let ety = Elaborated::new(&ty, CheckOpts::default());
    let etr = Elaborated::new(&tr, CheckOpts::default());
    let loose_tr = Elaborated::new(&tr, CheckOpts { nabla_fresh: false });
    let pool = assoc_pool(b);
    let mut out = Vec::new();

    out.push(CheckReport::run("ty_ctx'_list_fidelity", || {
        let lists: Vec<Ctx<TyAssoc>> = gen_lists(&pool, b.ctx_elems).into_iter().map(Ctx::from_list).collect();
        check_all(&lists, |l| {
            agree(ety.check_list(&[ty_vals(l)]), ty_ctx_list(l), || {
                Counterexample::new().with("L", l)
            })
        })
    }));
    out.push(CheckReport::run("ty_ctx'_mset_fidelity", || {
        let ctxs = gen_ctxs(&pool, b.ctx_elems, b.union_depth);
        check_all(&ctxs, |g| {
            agree(ety.check_mset(&[ty_vals(g)]), ty_ctx_mset(g), || {
                Counterexample::new().with("G", g)
            })
        })
    }));

    let sound = gen_tuples(&etr, b);
    let loose = gen_tuples(&loose_tr, b);
    let hand_list = |gs: &[Ctx<Val>]| {
        trans_rel_list(
            &back(&gs[0], to_ty_assoc),
            &back(&gs[1], to_var_assoc),
            &back(&gs[2], to_ty_assoc),
        )
    };
    let hand_mset = |gs: &[Ctx<Val>]| {
        trans_rel_mset(
            &back(&gs[0], to_ty_assoc),
            &back(&gs[1], to_var_assoc),
            &back(&gs[2], to_ty_assoc),
        )
    };
    out.push(CheckReport::run("trans_rel_list_fidelity", || {
        let small = small_triples(0);
        let a = check_all(&small, |(g1, g2, g3)| {
            let gs = [ty_vals(g1), var_vals(g2), ty_vals(g3)];
            agree(etr.check_list(&gs), trans_rel_list(g1, g2, g3), || show3(&gs))
        });
        let gen = check_all(&[sound.as_slice(), loose.as_slice()].concat(), |t| {
            let gs = columns(t, 3);
            agree(etr.check_list(&gs), hand_list(&gs), || show3(&gs))
        });
        a.and(gen)
    }));
    out.push(CheckReport::run("trans_rel_mset_fidelity", || {
        let small = small_triples(1);
        let a = check_all(&small, |(g1, g2, g3)| {
            let gs = [ty_vals(g1), var_vals(g2), ty_vals(g3)];
            agree(etr.check_mset(&gs), trans_rel_mset(g1, g2, g3), || show3(&gs))
        });
        let related = check_all(&sound, |t| {
            check_seq(layouts(t, 3, b.union_depth), |gs| {
                agree(etr.check_mset(&gs), hand_mset(&gs), || show3(&gs))
            })
        });
        let unrelated = check_all(&loose, |t| {
            check_seq([columns(t, 3), reversed_union(t, 3)], |gs| {
                agree(etr.check_mset(&gs), hand_mset(&gs), || show3(&gs))
            })
        });
        a.and(related).and(unrelated)
    }));

    out.push(CheckReport::run("ctx_mset_definitional", || {
        let tys: Vec<Vec<Ctx<Val>>> = gen_ctxs(&pool, b.ctx_elems, 0)
            .iter()
            .map(|g| vec![ty_vals(g)])
            .collect();
        let trs: Vec<Vec<Ctx<Val>>> = small_triples(0)
            .iter()
            .map(|(g1, g2, g3)| vec![ty_vals(g1), var_vals(g2), ty_vals(g3)])
            .collect();
        let one = |e: &Elaborated<'_>, gs: &Vec<Ctx<Val>>| {
            agree(e.check_mset(gs), exists_lists(e, gs), || {
                gs.iter()
                    .enumerate()
                    .fold(Counterexample::new(), |c, (i, g)| c.with(&format!("G{}", i + 1), g))
            })
        };
        check_all(&tys, |gs| one(&ety, gs)).and(check_all(&trs, |gs| one(&etr, gs)))
    }));
    out
}

/// Some choice of orderings of the arguments satisfies the list predicate.
pub fn exists_lists(e: &Elaborated<'_>, gs: &[Ctx<Val>]) -> bool {
    let orders: Vec<Vec<Vec<Val>>> = gs
        .iter()
        .map(|g| distinct_permutations(&g.elems().into_iter().cloned().collect::<Vec<_>>()))
        .collect();
    let mut pick = vec![0; gs.len()];
    loop {
        let ls: Vec<Ctx<Val>> = pick
            .iter()
            .zip(&orders)
            .map(|(&k, os)| Ctx::from_list(os[k].iter().cloned()))
            .collect();
        if e.check_list(&ls).unwrap_or(false) {
            return true;
        }
        let mut i = gs.len();
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < orders[i].len() {
                break;
            }
            pick[i] = 0;
        }
    }
}

/// Everything a spec file and a lemma file ask for: distributivity at
/// every index of every spec; for each list-form lemma its verification,
/// the verification of its lift and the transport check; for each
/// multiset-form lemma its verification. Reports come sorted by name.
pub fn engine_reports(
    specs: &[ContextSpec],
    lemmas: &[LemmaStmt],
    b: &GenBounds,
    opts: CheckOpts,
) -> Result<Vec<CheckReport>, SpecError> {
    let mut out = Vec::new();
    for spec in specs {
        let e = Elaborated::new(spec, opts);
        for i in 1..=spec.arity {
            out.push(check_distr(&e, i, b)?);
        }
        for l in lemmas.iter().filter(|l| l.spec == spec.name) {
            out.push(verify_lemma(&e, l, b)?);
            if l.form == LemmaForm::List {
                out.push(verify_lemma(&e, &lift_lemma(spec, l)?, b)?);
                out.push(check_lifted(&e, l, b)?);
            }
        }
    }
    if let Some(l) = lemmas.iter().find(|l| !specs.iter().any(|s| s.name == l.spec)) {
        return Err(SpecError::UnknownContext(l.spec.clone()));
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fidelity_at_small_bounds() {
        let b = GenBounds {
            ctx_elems: 2,
            union_depth: 1,
            ..GenBounds::default()
        };
        for r in fidelity_reports(&b) {
            assert!(r.passed() && r.cases > 0, "{}", r.text_line(false));
        }
    }

    #[test]
    fn conversions_invert() {
        let a = TyAssoc::new(Name::new("n0"), Ty::arrow(Ty::base("i"), Ty::base("o")));
        assert_eq!(to_ty_assoc(&Val::ty_of(&a)), Some(a));
        let v = VarAssoc::new(Name::new("n0"), Name::new("m0"));
        assert_eq!(to_var_assoc(&Val::trans_to(&v)), Some(v));
        assert_eq!(to_var_assoc(&Val::constant("i")), None);
    }
}
