//! Bounded checks of the translation lemmas.
//!
//! Related triples are generated up to renaming: row `i` is
//! `(ty_of n{i} T, trans_to n{i} m{i}, ty_of m{i} T)` for every choice of
//! types, and every statement is equivariant under renaming. Each triple is
//! then laid out as multiset contexts in two ways: all three contexts
//! arranged alike, and one context arranged freely while the other two stay
//! lists.

use std::collections::BTreeSet;

use super::*;
use crate::ctx::{gen_ctxs, part_to_perm, partition_list, perm_to_part, positions, split_by, splits};
use crate::gen::{arrangements, gen_terms, gen_types, name_pool, GenBounds};
use crate::report::{check_all, check_seq, CheckReport, Counterexample, Outcome};
use crate::syntax::Ty;
use crate::typing::{ltype_types, mltype_types};

pub type Rows = Vec<(TyAssoc, VarAssoc, TyAssoc)>;

fn src_name(i: usize) -> Name {
    Name::indexed("n", i)
}

fn dst_name(i: usize) -> Name {
    Name::indexed("m", i)
}

fn row(i: usize, t: &Ty) -> (TyAssoc, VarAssoc, TyAssoc) {
    (
        TyAssoc::new(src_name(i), t.clone()),
        VarAssoc::new(src_name(i), dst_name(i)),
        TyAssoc::new(dst_name(i), t.clone()),
    )
}

fn type_tuples(tys: &[Ty], k: usize) -> Vec<Vec<Ty>> {
    (0..k).fold(vec![Vec::new()], |acc, _| {
        acc.iter()
            .flat_map(|p| {
                tys.iter().map(move |t| {
                    let mut p = p.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect()
    })
}

/// One canonical related triple per tuple of types, up to `max_rows` rows.
pub fn canonical_rows(max_rows: usize, tys: &[Ty]) -> Vec<Rows> {
    (0..=max_rows)
        .flat_map(|k| type_tuples(tys, k))
        .map(|ts| ts.iter().enumerate().map(|(i, t)| row(i, t)).collect())
        .collect()
}

pub fn lists_of(rows: &Rows) -> RelTriple {
    RelTriple::new(
        Ctx::from_list(rows.iter().map(|r| r.0.clone())),
        Ctx::from_list(rows.iter().map(|r| r.1.clone())),
        Ctx::from_list(rows.iter().map(|r| r.2.clone())),
    )
}

/// The multiset layouts of one related triple.
pub fn layouts(rows: &Rows, depth: usize) -> Vec<RelTriple> {
    let idx: Vec<usize> = (0..rows.len()).collect();
    layouts_from(rows, &arrangements(&idx, depth))
}

/// [`layouts`], given the arrangements of the row indices.
fn layouts_from(rows: &Rows, shapes: &[Ctx<usize>]) -> Vec<RelTriple> {
    let base = lists_of(rows);
    let mut out = BTreeSet::new();
    for shape in shapes {
        let g1 = shape.map(&|&i| rows[i].0.clone());
        let g2 = shape.map(&|&i| rows[i].1.clone());
        let g3 = shape.map(&|&i| rows[i].2.clone());
        out.insert(RelTriple::new(
            g1.clone(),
            base.transctx.clone(),
            base.tyctx_dst.clone(),
        ));
        out.insert(RelTriple::new(
            base.tyctx_src.clone(),
            g2.clone(),
            base.tyctx_dst.clone(),
        ));
        out.insert(RelTriple::new(
            base.tyctx_src.clone(),
            base.transctx.clone(),
            g3.clone(),
        ));
        out.insert(RelTriple::new(g1, g2, g3));
    }
    out.into_iter().collect()
}

fn show(t: &RelTriple, cex: Counterexample) -> Counterexample {
    cex.with("G1", &t.tyctx_src)
        .with("G2", &t.transctx)
        .with("G3", &t.tyctx_dst)
}

type LayoutCheck = (&'static str, fn(&RelTriple) -> Outcome);

/// Statements about a single related triple, in report order.
const LAYOUT_CHECKS: [LayoutCheck; 9] = [
    ("trans_rel_holds", holds),
    ("trans_rel_uniq", uniq_forward),
    ("trans_rel_uniq_backward", uniq_backward),
    ("trans_rel_uniq_src", |t| uniq_ty(t, &t.tyctx_src)),
    ("trans_rel_uniq_dst", |t| uniq_ty(t, &t.tyctx_dst)),
    ("trans_rel_mem", mem_from_trans),
    ("trans_rel_mem_src", |t| mem_from_ty(t, Side::Src)),
    ("trans_rel_mem_dst", |t| mem_from_ty(t, Side::Dst)),
    ("trans_rel_sel", sel),
];

/// Runs every [`LAYOUT_CHECKS`] entry over every layout of every canonical
/// triple, building each layout once. Elapsed time is measured per check.
fn layout_reports(canon: &[Rows], depth: usize) -> Vec<CheckReport> {
    use rayon::prelude::*;
    use std::time::{Duration, Instant};
    let max_rows = canon.iter().map(Vec::len).max().unwrap_or(0);
    let shapes: Vec<Vec<Ctx<usize>>> = (0..=max_rows)
        .map(|k| arrangements(&(0..k).collect::<Vec<_>>(), depth))
        .collect();
    let parts: Vec<Vec<(Outcome, Duration)>> = canon
        .par_iter()
        .map(|rows| {
            let ls = layouts_from(rows, &shapes[rows.len()]);
            LAYOUT_CHECKS
                .iter()
                .map(|(_, check)| {
                    let start = Instant::now();
                    let o = check_seq(ls.iter(), check);
                    (o, start.elapsed())
                })
                .collect()
        })
        .collect();
    (0..LAYOUT_CHECKS.len())
        .map(|j| {
            let (o, d) = parts
                .iter()
                .map(|p| p[j].clone())
                .fold((Outcome::default(), Duration::ZERO), |(o, d), (o2, d2)| {
                    (o.and(o2), d + d2)
                });
            CheckReport::from_outcome(LAYOUT_CHECKS[j].0, o, d)
        })
        .collect()
}

/// Union depth of the two halves a split of `G1` is arranged into.
pub const DISTR_HALF_DEPTH: usize = 1;

pub fn translation_lemma_suite(b: &GenBounds) -> Vec<CheckReport> {
    let tys = gen_types(b.ty_depth);
    let canon = canonical_rows(b.ctx_elems, &tys);
    let mut out = layout_reports(&canon, b.union_depth);
    out.extend([
        CheckReport::run("trans_rel_list_distr", || list_distr(&canon)),
        CheckReport::run("trans_rel_distr", || distr(&canon, b.union_depth.min(DISTR_HALF_DEPTH))),
        CheckReport::run("sel_implies_mem", || sel_implies_mem(b)),
        CheckReport::run("trans_rel_definitional", trans_rel_definitional),
    ]);
    out.extend(preservation_reports(b));
    out
}

fn holds(t: &RelTriple) -> Outcome {
    Outcome::check(t.holds(), || show(t, Counterexample::new()))
}

fn pairs<E>(g: &Ctx<E>) -> Vec<(&E, &E)> {
    let es = g.elems();
    es.iter().flat_map(|a| es.iter().map(move |c| (*a, *c))).collect()
}

fn uniq_forward(t: &RelTriple) -> Outcome {
    check_seq(pairs(&t.transctx), |(a, c)| {
        if a.src != c.src {
            return Outcome::pass(0);
        }
        Outcome::check(a.dst == c.dst, || {
            show(
                t,
                Counterexample::new()
                    .with("X", &a.src)
                    .with("Y1", &a.dst)
                    .with("Y2", &c.dst),
            )
        })
    })
}

fn uniq_backward(t: &RelTriple) -> Outcome {
    check_seq(pairs(&t.transctx), |(a, c)| {
        if a.dst != c.dst {
            return Outcome::pass(0);
        }
        Outcome::check(a.src == c.src, || {
            show(
                t,
                Counterexample::new()
                    .with("Y", &a.dst)
                    .with("X1", &a.src)
                    .with("X2", &c.src),
            )
        })
    })
}

fn uniq_ty(t: &RelTriple, g: &Ctx<TyAssoc>) -> Outcome {
    check_seq(pairs(g), |(a, c)| {
        if a.name != c.name {
            return Outcome::pass(0);
        }
        Outcome::check(a.ty == c.ty, || {
            show(
                t,
                Counterexample::new()
                    .with("X", &a.name)
                    .with("T1", &a.ty)
                    .with("T2", &c.ty),
            )
        })
    })
}

fn has_ty(g: &Ctx<TyAssoc>, n: &Name, ty: &Ty) -> bool {
    g.member(&TyAssoc::new(n.clone(), ty.clone()))
}

/// `member E G2` gives `E = trans_to X Y` with `ty_of X T` in `G1` and
/// `ty_of Y T` in `G3` for some `T`.
fn mem_from_trans(t: &RelTriple) -> Outcome {
    let src_tys: Vec<&Ty> = t.tyctx_src.elems().into_iter().map(|a| &a.ty).collect();
    check_seq(t.transctx.elems(), |e| {
        let witness = src_tys
            .iter()
            .any(|ty| has_ty(&t.tyctx_src, &e.src, ty) && has_ty(&t.tyctx_dst, &e.dst, ty));
        Outcome::check(witness, || show(t, Counterexample::new().with("E", e)))
    })
}

#[derive(Clone, Copy)]
enum Side {
    Src,
    Dst,
}

/// Membership read from `G1` (or `G3`): a partner mapping and a partner
/// typing with the same type exist.
fn mem_from_ty(t: &RelTriple, side: Side) -> Outcome {
    let (here, there) = match side {
        Side::Src => (&t.tyctx_src, &t.tyctx_dst),
        Side::Dst => (&t.tyctx_dst, &t.tyctx_src),
    };
    let maps = t.transctx.elems();
    check_seq(here.elems(), |e| {
        let witness = maps.iter().any(|v| match side {
            Side::Src => v.src == e.name && has_ty(there, &v.dst, &e.ty),
            Side::Dst => v.dst == e.name && has_ty(there, &v.src, &e.ty),
        });
        Outcome::check(witness, || show(t, Counterexample::new().with("E", e)))
    })
}

/// Every selection from `G2` is matched by selections from `G1` and `G3`
/// leaving a related triple.
fn sel(t: &RelTriple) -> Outcome {
    let from1 = t.tyctx_src.select_any();
    let from3 = t.tyctx_dst.select_any();
    check_seq(t.transctx.select_any(), |(_, e, g2r)| {
        let found = from1.iter().any(|(_, a, g1r)| {
            a.name == e.src
                && from3
                    .iter()
                    .any(|(_, c, g3r)| c.name == e.dst && c.ty == a.ty && trans_rel_mset(g1r, &g2r, g3r))
        });
        Outcome::check(found, || show(t, Counterexample::new().with("E", &e).with("G2'", &g2r)))
    })
}

fn reorder(rows: &Rows, order: &[usize]) -> Rows {
    order.iter().map(|&i| rows[i].clone()).collect()
}

/// Every partition of `L1` is matched by partitions of `L2` and `L3`
/// whose halves are related, for every coordinated ordering of the rows.
fn list_distr(canon: &[Rows]) -> Outcome {
    check_all(canon, |rows| {
        let idx: Vec<usize> = (0..rows.len()).collect();
        check_seq(distinct_permutations(&idx), |order| {
            let t = lists_of(&reorder(rows, &order));
            let p2 = partition_list(&t.transctx).expect("list");
            let p3 = partition_list(&t.tyctx_dst).expect("list");
            check_seq(partition_list(&t.tyctx_src).expect("list"), |(a1, b1)| {
                let found = p2.iter().any(|(a2, b2)| {
                    p3.iter()
                        .any(|(a3, b3)| trans_rel_list(&a1, a2, a3) && trans_rel_list(&b1, b2, b3))
                });
                Outcome::check(found, || {
                    show(&t, Counterexample::new().with("L1'", &a1).with("L1''", &b1))
                })
            })
        })
    })
}

/// Witnesses for one instance of distributivity over `G1`: unfold the
/// triple to lists, turn the split of `G1` into a partition of `L1`,
/// partition `L2` and `L3` at the same positions, and read the halves back
/// as contexts.
pub fn distr_witness(t: &RelTriple, g1a: &Ctx<TyAssoc>, g1b: &Ctx<TyAssoc>) -> Option<(RelTriple, RelTriple)> {
    let (l1, l2, l3) = trans_rel_align(&t.tyctx_src, &t.transctx, &t.tyctx_dst)?;
    let (p1a, _) = perm_to_part(&l1, g1a, g1b).ok()?;
    let mask = positions(&l1.elems(), &p1a.elems());
    let (p2a, p2b) = split_by(&l2, &mask);
    let (p3a, p3b) = split_by(&l3, &mask);
    if !(part_to_perm(&l2, &p2a, &p2b).ok()? && part_to_perm(&l3, &p3a, &p3b).ok()?) {
        return None;
    }
    Some((
        RelTriple::new(g1a.clone(), p2a, p3a),
        RelTriple::new(g1b.clone(), p2b, p3b),
    ))
}

fn distr_holds(t: &RelTriple, left: &RelTriple, right: &RelTriple) -> bool {
    perm(&t.transctx, &Ctx::union(left.transctx.clone(), right.transctx.clone()))
        && perm(
            &t.tyctx_dst,
            &Ctx::union(left.tyctx_dst.clone(), right.tyctx_dst.clone()),
        )
        && left.holds()
        && right.holds()
}

/// A layout that arranges every context alike and is not a list.
fn reversed_union(rows: &Rows) -> RelTriple {
    let mut rev = rows.clone();
    rev.reverse();
    let h = rev.len() / 2;
    let l = lists_of(&rev[..h].to_vec());
    let r = lists_of(&rev[h..].to_vec());
    RelTriple::new(
        Ctx::union(l.tyctx_src, r.tyctx_src),
        Ctx::union(l.transctx, r.transctx),
        Ctx::union(l.tyctx_dst, r.tyctx_dst),
    )
}

/// For every split of `G1` into two sub-multisets, each arranged in every
/// way, the witnesses built by [`distr_witness`] satisfy the conclusion.
fn distr(canon: &[Rows], depth: usize) -> Outcome {
    check_all(canon, |rows| {
        check_seq([lists_of(rows), reversed_union(rows)], |t| {
            check_seq(splits(&t.tyctx_src), |(a, c)| {
                let a: Vec<TyAssoc> = a.elems().into_iter().cloned().collect();
                let c: Vec<TyAssoc> = c.elems().into_iter().cloned().collect();
                let gcs = arrangements(&c, depth);
                check_seq(arrangements(&a, depth), |g1a| {
                    check_seq(gcs.iter(), |g1b| {
                        let ok = matches!(distr_witness(&t, &g1a, g1b), Some((l, r)) if distr_holds(&t, &l, &r));
                        Outcome::check(ok, || {
                            show(&t, Counterexample::new().with("G1'", &g1a).with("G1''", g1b))
                        })
                    })
                })
            })
        })
    })
}

fn sel_implies_mem(b: &GenBounds) -> Outcome {
    let pool: Vec<VarAssoc> = (0..b.names).map(|i| VarAssoc::new(src_name(i), dst_name(i))).collect();
    let univ = gen_ctxs(&pool, b.ctx_elems, b.union_depth);
    check_all(&univ, |g| {
        check_seq(pool.iter(), |x| {
            let ok = g.select(x).is_empty() || g.member(x);
            Outcome::check(ok, || Counterexample::new().with("X", x).with("G", g))
        })
    })
}

/// Alignment agrees with the search over permutations, on every triple of
/// contexts with at most two elements over a small pool, related or not.
fn trans_rel_definitional() -> Outcome {
    let names = [src_name(0), src_name(1), dst_name(0)];
    let tys = gen_types(1);
    let ty_pool: Vec<TyAssoc> = names
        .iter()
        .flat_map(|n| tys.iter().map(move |t| TyAssoc::new(n.clone(), t.clone())))
        .collect();
    let var_pool: Vec<VarAssoc> = names
        .iter()
        .flat_map(|x| names.iter().map(move |y| VarAssoc::new(x.clone(), y.clone())))
        .collect();
    let ty_ctxs: Vec<Ctx<TyAssoc>> = gen_ctxs(&ty_pool, 2, 0);
    let var_ctxs: Vec<Ctx<VarAssoc>> = gen_ctxs(&var_pool, 2, 1);
    check_all(&var_ctxs, |g2| {
        check_seq(ty_ctxs.iter(), |g1| {
            check_seq(ty_ctxs.iter(), |g3| {
                Outcome::check(trans_rel_mset(g1, g2, g3) == trans_rel_mset_def(g1, g2, g3), || {
                    Counterexample::new().with("G1", g1).with("G2", g2).with("G3", g3)
                })
            })
        })
    })
}

/// Type preservation, and soundness of [`translate`] against the
/// relation, over all source terms within the bound.
///
/// For a term with free names `x1 .. xk`, the only mapping contexts that
/// admit a translation map each `xi` exactly once; the target names are
/// `m0 ..` and every assignment of types is tried.
fn preservation_reports(b: &GenBounds) -> Vec<CheckReport> {
    let start = std::time::Instant::now();
    let names = name_pool(b.names);
    let tys = gen_types(b.ty_depth);
    let terms = gen_terms(b.term_size, &names, &tys, true);
    let parts: Vec<(Outcome, Outcome)> = {
        use rayon::prelude::*;
        terms.par_iter().map(|e| preservation_case(e, &tys)).collect()
    };
    let (pres, sound): (Outcome, Outcome) = parts
        .into_iter()
        .fold(Default::default(), |(p, s), (p2, s2)| (p.and(p2), s.and(s2)));
    let elapsed = start.elapsed();
    vec![
        CheckReport::from_outcome("ltrans_pres_ty", pres, elapsed),
        CheckReport::from_outcome("translate_sound", sound, elapsed),
    ]
}

fn preservation_case(e: &Tm, tys: &[Ty]) -> (Outcome, Outcome) {
    let free: Vec<Name> = e.free_names().into_iter().collect();
    let g2: Ctx<VarAssoc> = Ctx::from_list(
        free.iter()
            .enumerate()
            .map(|(i, x)| VarAssoc::new(x.clone(), dst_name(i))),
    );
    let outs = ltrans_outputs(&g2, e);
    let sound = match translate(&g2, e) {
        Ok(e2) => Outcome::check(outs.len() == 1 && outs.contains(&e2) && ltrans_rel(&g2, e, &e2), || {
            Counterexample::new().with("G", &g2).with("E", e).with("E'", &e2)
        }),
        Err(_) => Outcome::check(outs.is_empty(), || Counterexample::new().with("G", &g2).with("E", e)),
    };
    if outs.is_empty() {
        return (Outcome::pass(0), sound);
    }
    let pres = check_seq(type_tuples(tys, free.len()), |ts| {
        let g1 = Ctx::from_list(free.iter().zip(&ts).map(|(x, t)| TyAssoc::new(x.clone(), t.clone())));
        let g3 = Ctx::from_list(ts.iter().enumerate().map(|(i, t)| TyAssoc::new(dst_name(i), t.clone())));
        let src_tys = mltype_types(&g1, e);
        check_seq(outs.iter(), |e2| {
            let dst_tys = ltype_types(&g3, e2);
            check_seq(
                src_tys.iter().flat_map(|s| dst_tys.iter().map(move |d| (s, d))),
                |(s, d)| {
                    Outcome::check(s == d, || {
                        Counterexample::new()
                            .with("G", &g1)
                            .with("G'", &g2)
                            .with("G''", &g3)
                            .with("E", e)
                            .with("E'", e2)
                            .with("T", s)
                            .with("T'", d)
                    })
                },
            )
        })
    });
    (pres, sound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GenBounds {
        GenBounds {
            term_size: 4,
            ctx_elems: 2,
            union_depth: 1,
            names: 2,
            ty_depth: 1,
        }
    }

    #[test]
    fn suite_passes_at_small_bounds() {
        for r in translation_lemma_suite(&small()) {
            assert!(r.passed(), "{}", r.text_line(false));
            assert!(r.cases > 0, "{}", r.name);
        }
    }

    #[test]
    fn sel_instance() {
        let i = Ty::base("i");
        let o = Ty::base("o");
        let rows = vec![row(1, &i), row(2, &o)];
        let t = lists_of(&rows);
        assert!(sel(&t).is_pass());
        let picked = VarAssoc::new(src_name(2), dst_name(2));
        let (_, rest) = t.transctx.select(&picked).pop().unwrap();
        let g1 = Ctx::from_list(vec![rows[0].0.clone()]);
        let g3 = Ctx::from_list(vec![rows[0].2.clone()]);
        assert!(trans_rel_mset(&g1, &rest, &g3));
    }

    #[test]
    fn distr_instance() {
        let i = Ty::base("i");
        let rows = vec![row(0, &i), row(1, &i), row(2, &i)];
        let t = lists_of(&rows);
        for (a, c) in splits(&t.tyctx_src) {
            let (l, r) = distr_witness(&t, &a, &c).unwrap();
            assert!(distr_holds(&t, &l, &r));
        }
    }

    #[test]
    fn layouts_are_related_and_distinct() {
        let rows = canonical_rows(2, &gen_types(1)).pop().unwrap();
        let ls = layouts(&rows, 1);
        assert!(ls.iter().all(RelTriple::holds));
        assert!(ls.contains(&lists_of(&rows)));
    }
}
