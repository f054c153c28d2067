//! Related tuples built clause by clause.

use std::collections::BTreeSet;

use super::check::{instantiate, Elaborated, Rule, Subst};
use super::Val;
use crate::ctx::Ctx;
use crate::gen::{arrangements, gen_types, GenBounds};
use crate::syntax::Name;

/// Row `r` holds the `r`-th element of every context.
pub type Tuple = Vec<Vec<Val>>;

/// Values metavariables range over: the types up to the bound.
pub fn value_universe(b: &GenBounds) -> Vec<Val> {
    gen_types(b.ty_depth).iter().map(Val::from_ty).collect()
}

fn names_of(t: &Tuple) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    t.iter().flatten().for_each(|v| v.collect_names(&mut out));
    out
}

/// Every tuple of at most `b.ctx_elems` rows the predicate accepts, up to
/// renaming of names. Rows are added at the front: each nabla variable
/// takes a name already in use or the next unused `n{k}`, and the clause
/// check then keeps only the admissible heads.
pub fn gen_tuples(e: &Elaborated<'_>, b: &GenBounds) -> Vec<Tuple> {
    let universe = value_universe(b);
    let mut out: Vec<Tuple> = vec![Vec::new()];
    let mut frontier: Vec<Tuple> = vec![Vec::new()];
    for _ in 0..b.ctx_elems {
        let mut next = Vec::new();
        for t in &frontier {
            let used: Vec<Name> = names_of(t).into_iter().collect();
            for rule in &e.rules {
                for row in heads(e, rule, t, &used, &universe) {
                    let mut t2 = Vec::with_capacity(t.len() + 1);
                    t2.push(row);
                    t2.extend(t.iter().cloned());
                    next.push(t2);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn heads(e: &Elaborated<'_>, rule: &Rule, tail: &Tuple, used: &[Name], universe: &[Val]) -> Vec<Vec<Val>> {
    let nabla: Vec<usize> = (0..rule.nvars()).filter(|&i| rule.is_nabla[i]).collect();
    let metas: Vec<usize> = (0..rule.nvars()).filter(|&i| !rule.is_nabla[i]).collect();
    let mut name_choices: Vec<Vec<Val>> = vec![Vec::new()];
    for _ in &nabla {
        let mut ext = Vec::new();
        for prefix in &name_choices {
            let mut pool: Vec<Name> = used.to_vec();
            let mut k = used.len();
            for v in prefix {
                if let Val::Nom(n) = v {
                    if !pool.contains(n) {
                        pool.push(n.clone());
                        k += 1;
                    }
                }
            }
            pool.push(Name::indexed("n", k));
            for n in pool {
                let mut p = prefix.clone();
                p.push(Val::Nom(n));
                ext.push(p);
            }
        }
        name_choices = ext;
    }
    let mut out = Vec::new();
    let mut meta_choice = vec![0; metas.len()];
    loop {
        for names in &name_choices {
            let mut s: Subst<'_> = vec![None; rule.nvars()];
            for (slot, v) in nabla.iter().zip(names) {
                s[*slot] = Some(v);
            }
            for (slot, &c) in metas.iter().zip(&meta_choice) {
                s[*slot] = Some(&universe[c]);
            }
            if e.row_ok(rule, &s, tail.iter().flatten()) {
                out.push(rule.pats.iter().map(|p| instantiate(p, &s)).collect());
            }
        }
        // Odometer over metavariable values.
        let mut i = metas.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            meta_choice[i] += 1;
            if meta_choice[i] < universe.len() {
                break;
            }
            meta_choice[i] = 0;
        }
    }
}

/// The contexts of a tuple as lists.
pub fn columns(t: &Tuple, arity: usize) -> Vec<Ctx<Val>> {
    (0..arity)
        .map(|i| Ctx::from_list(t.iter().map(|r| r[i].clone())))
        .collect()
}

/// Arrangements of a tuple: all contexts shaped alike, or one context
/// rearranged while the others stay lists.
pub fn layouts(t: &Tuple, arity: usize, depth: usize) -> Vec<Vec<Ctx<Val>>> {
    let idx: Vec<usize> = (0..t.len()).collect();
    let base = columns(t, arity);
    let mut out = BTreeSet::new();
    for shape in arrangements(&idx, depth) {
        let shaped: Vec<Ctx<Val>> = (0..arity).map(|i| shape.map(&|&r| t[r][i].clone())).collect();
        for i in 0..arity {
            let mut one = base.clone();
            one[i] = shaped[i].clone();
            out.insert(one);
        }
        out.insert(shaped);
    }
    out.into_iter().collect()
}

/// All contexts as `rev(front) ++ rev(back)`, alike.
pub fn reversed_union(t: &Tuple, arity: usize) -> Vec<Ctx<Val>> {
    let mut rev = t.clone();
    rev.reverse();
    let h = rev.len() / 2;
    let l = columns(&rev[..h].to_vec(), arity);
    let r = columns(&rev[h..].to_vec(), arity);
    l.into_iter().zip(r).map(|(a, b)| Ctx::union(a, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctxspec::{trans_rel_spec, ty_ctx_spec, CheckOpts};

    fn small() -> GenBounds {
        GenBounds {
            ctx_elems: 2,
            ..GenBounds::default()
        }
    }

    #[test]
    fn typing_tuples_are_type_sequences() {
        let s = ty_ctx_spec();
        let e = Elaborated::new(&s, CheckOpts::default());
        let ts = gen_tuples(&e, &GenBounds::default());
        // One fresh name per row, any of six types: 1 + 6 + 36 + 216.
        assert_eq!(ts.len(), 259);
        assert!(ts.iter().all(|t| e.check_list(&columns(t, 1)).unwrap()));
    }

    #[test]
    fn dropping_freshness_allows_reuse() {
        let s = ty_ctx_spec();
        let e = Elaborated::new(&s, CheckOpts { nabla_fresh: false });
        let ts = gen_tuples(&e, &small());
        // Second row: reuse n0 or take n1, six types each.
        assert_eq!(ts.len(), 1 + 6 + 6 * 6 * 2);
    }

    #[test]
    fn translation_tuples_and_layouts_are_related() {
        let s = trans_rel_spec();
        let e = Elaborated::new(&s, CheckOpts::default());
        let ts = gen_tuples(&e, &small());
        assert_eq!(ts.len(), 1 + 6 + 36);
        for t in &ts {
            for gs in layouts(t, 3, 1) {
                assert!(e.check_mset(&gs).unwrap());
            }
            assert!(e.check_mset(&reversed_union(t, 3)).unwrap());
        }
    }
}
