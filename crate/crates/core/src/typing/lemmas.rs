//! Bounded checks of the typing-context lemmas and of the agreement
//! between relational and algorithmic linear typing.

use std::collections::BTreeSet;

use super::*;
use crate::ctx::{partition_list, perm, splits};
use crate::gen::{arrangements, gen_lists, gen_terms, gen_types, name_pool, GenBounds};
use crate::report::{check_all, check_seq, CheckReport, Counterexample, Outcome};

pub type ListPred = dyn Fn(&Ctx<TyAssoc>) -> bool + Sync;

/// Largest term used where every term is paired with every context.
pub const PAIRED_TERM_SIZE: usize = 4;

/// Every `ty_of n T` with `n` from the name pool and `T` up to the type depth.
pub fn assoc_pool(b: &GenBounds) -> Vec<TyAssoc> {
    let tys = gen_types(b.ty_depth);
    name_pool(b.names)
        .into_iter()
        .flat_map(|n| tys.iter().map(move |t| TyAssoc::new(n.clone(), t.clone())))
        .collect()
}

/// Lists over the pool accepted by `pred`.
pub fn pred_lists(b: &GenBounds, pred: &ListPred) -> Vec<Ctx<TyAssoc>> {
    gen_lists(&assoc_pool(b), b.ctx_elems)
        .into_iter()
        .map(Ctx::from_list)
        .filter(|l| pred(l))
        .collect()
}

/// The multisets (sorted) of the lists accepted by `pred`.
fn pred_multisets(lists: &[Ctx<TyAssoc>]) -> Vec<Vec<TyAssoc>> {
    let set: BTreeSet<Vec<TyAssoc>> = lists
        .iter()
        .map(|l| l.multiset().into_iter().cloned().collect())
        .collect();
    set.into_iter().collect()
}

/// The seven context lemmas for the list predicate `pred` and the
/// multiset predicate it induces.
pub fn typing_lemma_suite_with(b: &GenBounds, pred: &ListPred) -> Vec<CheckReport> {
    let lists = pred_lists(b, pred);
    let msets = pred_multisets(&lists);
    let arranged: Vec<Ctx<TyAssoc>> = msets.iter().flat_map(|m| arrangements(m, b.union_depth)).collect();
    let names = name_pool(b.names);
    let tys = gen_types(b.ty_depth);
    let terms = gen_terms(b.term_size.min(PAIRED_TERM_SIZE), &names, &tys, false);

    vec![
        CheckReport::run("ty_ctx_mem", || ctx_mem(&lists, &names)),
        CheckReport::run("ty_ctx_uniq", || ctx_uniq(&lists)),
        CheckReport::run("ty_uniq", || ty_uniq(&lists, &terms)),
        CheckReport::run("ty_ctx_mem'", || ctx_mem(&arranged, &names)),
        CheckReport::run("ty_ctx_uniq'", || ctx_uniq(&arranged)),
        CheckReport::run("ty_ctx_distr_part", || distr_part(&lists, pred)),
        CheckReport::run("ty_ctx_distr", || distr(&msets, b.union_depth, pred)),
    ]
}

/// The lemma suite for the distinct-names predicate, plus properties of the
/// type systems themselves.
pub fn typing_lemma_suite(b: &GenBounds) -> Vec<CheckReport> {
    let mut out = typing_lemma_suite_with(b, &ty_ctx_list);
    let lists = pred_lists(b, &ty_ctx_list);
    let small: Vec<Ctx<TyAssoc>> = lists.iter().filter(|l| l.len() <= 2).cloned().collect();
    let names = name_pool(b.names);
    let tys = gen_types(b.ty_depth);
    let terms = gen_terms(b.term_size.min(PAIRED_TERM_SIZE), &names, &tys, false);
    let small_terms = gen_terms(b.term_size.min(3), &names, &tys, false);
    out.extend([
        CheckReport::run("ty_ctx_mset_flatten", || mset_flatten(b)),
        CheckReport::run("ltype_perm_invariant", || {
            perm_invariant(&small, &small_terms, b.union_depth.min(1))
        }),
        CheckReport::run("linear_implies_intuitionistic", || linear_implies_stlc(&small, &terms)),
        CheckReport::run("mltype_conservative", || ml_conservative(&small, &terms)),
    ]);
    out
}

fn ctx_mem(ctxs: &[Ctx<TyAssoc>], names: &[Name]) -> Outcome {
    check_all(ctxs, |g| {
        check_seq(g.elems(), |a| {
            Outcome::check(names.contains(&a.name), || {
                Counterexample::new().with("X", a).with("G", g)
            })
        })
    })
}

fn ctx_uniq(ctxs: &[Ctx<TyAssoc>]) -> Outcome {
    check_all(ctxs, |g| {
        let es = g.elems();
        check_seq(es.iter().flat_map(|a| es.iter().map(move |c| (*a, *c))), |(a, c)| {
            if a.name != c.name {
                return Outcome::pass(0);
            }
            Outcome::check(a.ty == c.ty, || {
                Counterexample::new()
                    .with("X", &a.name)
                    .with("T1", &a.ty)
                    .with("T2", &c.ty)
                    .with("G", g)
            })
        })
    })
}

fn ty_uniq(lists: &[Ctx<TyAssoc>], terms: &[Tm]) -> Outcome {
    check_all(lists, |l| {
        check_seq(terms, |e| {
            let found = type_of_types(l, e);
            let inferred = type_of_infer(l, e);
            let ok = found.len() <= 1 && found.iter().next() == inferred.as_ref();
            Outcome::check(ok, || {
                let mut it = found.iter();
                let mut cex = Counterexample::new().with("L", l).with("X", e);
                if let Some(t) = it.next() {
                    cex = cex.with("T1", t);
                }
                if let Some(t) = it.next() {
                    cex = cex.with("T2", t);
                }
                cex
            })
        })
    })
}

fn distr_part(lists: &[Ctx<TyAssoc>], pred: &ListPred) -> Outcome {
    check_all(lists, |l| {
        let parts = partition_list(l).expect("generated lists are lists");
        check_seq(parts, |(l1, l2)| {
            Outcome::check(pred(&l1) && pred(&l2), || {
                Counterexample::new().with("L", l).with("L1", &l1).with("L2", &l2)
            })
        })
    })
}

/// Every split of every accepted multiset into two sub-multisets, each
/// arranged in every way: both halves satisfy the induced predicate, read
/// by its definition as a search over list permutations. The whole
/// context `G` enters only through its multiset.
fn distr(msets: &[Vec<TyAssoc>], depth: usize, pred: &ListPred) -> Outcome {
    let holds = |g: &Ctx<TyAssoc>| ty_ctx_mset_by(g, &|l| pred(l));
    check_all(msets, |m| {
        let g = Ctx::from_list(m.clone());
        let halves: BTreeSet<(Vec<TyAssoc>, Vec<TyAssoc>)> = splits(&g)
            .into_iter()
            .map(|(a, c)| {
                let mut a: Vec<TyAssoc> = a.elems().into_iter().cloned().collect();
                let mut c: Vec<TyAssoc> = c.elems().into_iter().cloned().collect();
                a.sort();
                c.sort();
                (a, c)
            })
            .collect();
        check_seq(halves, |(a, c)| {
            let ga = arrangements(&a, depth);
            let gc = arrangements(&c, depth);
            let a_ok: Vec<bool> = ga.iter().map(holds).collect();
            let c_ok: Vec<bool> = gc.iter().map(holds).collect();
            let cases = (ga.len() * gc.len()) as u64;
            let bad_a = a_ok.iter().position(|ok| !ok);
            let bad_c = c_ok.iter().position(|ok| !ok);
            match (bad_a, bad_c) {
                (None, None) => Outcome::pass(cases),
                (i, j) => Outcome::fail(
                    cases,
                    Counterexample::new()
                        .with("G", &g)
                        .with("G1", &ga[i.unwrap_or(0)])
                        .with("G2", &gc[j.unwrap_or(0)]),
                ),
            }
        })
    })
}

/// Flattening decides `ty_ctx'` exactly as the permutation search does.
fn mset_flatten(b: &GenBounds) -> Outcome {
    let pool = assoc_pool(b);
    let msets: BTreeSet<Vec<TyAssoc>> = gen_lists(&pool, b.ctx_elems)
        .into_iter()
        .map(|mut l| {
            l.sort();
            l
        })
        .collect();
    let msets: Vec<Vec<TyAssoc>> = msets.into_iter().collect();
    check_all(&msets, |m| {
        let gs = arrangements(m, b.union_depth.min(1));
        check_seq(gs.iter(), |g| {
            Outcome::check(ty_ctx_mset(g) == ty_ctx_mset_by(g, &ty_ctx_list), || {
                Counterexample::new().with("G", g)
            })
        })
    })
}

fn perm_invariant(lists: &[Ctx<TyAssoc>], terms: &[Tm], depth: usize) -> Outcome {
    check_all(lists, |l| {
        let items: Vec<TyAssoc> = l.elems().into_iter().cloned().collect();
        let gs = arrangements(&items, depth);
        check_seq(terms, |e| {
            let lin = ltype_types(l, e);
            let ml = mltype_types(l, e);
            check_seq(gs.iter(), |g| {
                debug_assert!(perm(g, l));
                let ok = ltype_types(g, e) == lin && mltype_types(g, e) == ml;
                Outcome::check(ok, || Counterexample::new().with("G", l).with("G'", g).with("E", e))
            })
        })
    })
}

fn linear_implies_stlc(lists: &[Ctx<TyAssoc>], terms: &[Tm]) -> Outcome {
    check_all(lists, |l| {
        check_seq(terms, |e| {
            let lin = ltype_types(l, e);
            let int = type_of_types(l, e);
            Outcome::check(lin.is_subset(&int), || Counterexample::new().with("G", l).with("E", e))
        })
    })
}

fn ml_conservative(lists: &[Ctx<TyAssoc>], terms: &[Tm]) -> Outcome {
    check_all(lists, |l| {
        check_seq(terms, |e| {
            Outcome::check(ltype_types(l, e) == mltype_types(l, e), || {
                Counterexample::new().with("G", l).with("E", e)
            })
        })
    })
}

/// Relational and algorithmic linear typing agree on every term up to
/// `term_size` (lets included) and every list context of at most
/// `ctx_elems` associations with distinct names.
pub fn oracle_equivalence(b: &GenBounds) -> Vec<CheckReport> {
    let lists = pred_lists(b, &ty_ctx_list);
    let names = name_pool(b.names);
    let tys = gen_types(b.ty_depth);
    let terms = gen_terms(b.term_size, &names, &tys, true);
    let agree = |rel: fn(&Ctx<TyAssoc>, &Tm) -> BTreeSet<Ty>, alg: fn(&Ctx<TyAssoc>, &Tm) -> Option<Ty>| {
        let lists = &lists;
        let terms = &terms;
        move || {
            check_all(lists, |g| {
                check_seq(terms, |e| {
                    let r = rel(g, e);
                    let a = alg(g, e);
                    let ok = r.len() <= 1 && r.iter().next() == a.as_ref();
                    Outcome::check(ok, || {
                        let shown = |t: Option<&Ty>| t.map_or("none".to_string(), |t| t.to_string());
                        Counterexample::new()
                            .with("G", g)
                            .with("E", e)
                            .with("relational", shown(r.iter().next()))
                            .with("algorithmic", shown(a.as_ref()))
                    })
                })
            })
        }
    };
    vec![
        CheckReport::run("ltype_oracle_equivalence", agree(ltype_types, ltype_infer)),
        CheckReport::run("mltype_oracle_equivalence", agree(mltype_types, mltype_infer)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GenBounds {
        GenBounds {
            term_size: 3,
            ctx_elems: 2,
            union_depth: 1,
            names: 2,
            ty_depth: 2,
        }
    }

    #[test]
    fn suite_passes_at_small_bounds() {
        for r in typing_lemma_suite(&small()) {
            assert!(r.passed(), "{}", r.text_line(false));
        }
    }

    #[test]
    fn dropping_distinctness_breaks_uniqueness() {
        let reports = typing_lemma_suite_with(&small(), &|l: &Ctx<TyAssoc>| l.is_list());
        let uniq = reports.iter().find(|r| r.name == "ty_ctx_uniq").unwrap();
        assert!(!uniq.passed());
        let cex = uniq.counterexample.as_ref().unwrap();
        assert_ne!(cex.get("T1"), cex.get("T2"));
    }

    #[test]
    fn oracles_agree_at_small_bounds() {
        for r in oracle_equivalence(&small()) {
            assert!(r.passed(), "{}", r.text_line(false));
        }
    }

    #[test]
    fn distr_instance() {
        let g = crate::parse::parse_ty_ctx("[ty_of n1 i] ++ [ty_of n2 o]").unwrap();
        assert!(ty_ctx_mset(&g));
        for (a, c) in splits(&g) {
            assert!(ty_ctx_mset(&a) && ty_ctx_mset(&c));
        }
    }
}
