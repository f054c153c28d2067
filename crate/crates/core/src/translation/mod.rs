//! Let-elimination and the three-context relation that ties a source
//! typing context to a target one through a variable mapping.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ctx::{perm, Ctx};
use crate::gen::distinct_permutations;
use crate::syntax::{close, open, print_term, Name, NameSupply, Tm, TyAssoc, VarAssoc};

pub mod lemmas;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransError {
    #[error("unmapped variable {0}")]
    Unmapped(Name),
    #[error("linearity violation: {var} used {uses} times")]
    Linearity { var: String, uses: usize },
    #[error("source name {0} is mapped twice")]
    DuplicateSource(Name),
    #[error("translation context is not a list")]
    NotAList,
}

/// `ltrans G E E'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransJudgment {
    pub ctx: Ctx<VarAssoc>,
    pub src: Tm,
    pub dst: Tm,
}

/// The three arguments of `trans_rel`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RelTriple {
    pub tyctx_src: Ctx<TyAssoc>,
    pub transctx: Ctx<VarAssoc>,
    pub tyctx_dst: Ctx<TyAssoc>,
}

impl RelTriple {
    pub fn new(g1: Ctx<TyAssoc>, g2: Ctx<VarAssoc>, g3: Ctx<TyAssoc>) -> RelTriple {
        RelTriple {
            tyctx_src: g1,
            transctx: g2,
            tyctx_dst: g3,
        }
    }

    pub fn holds(&self) -> bool {
        trans_rel_mset(&self.tyctx_src, &self.transctx, &self.tyctx_dst)
    }
}

fn opened(body: &Tm, x: &Name) -> Tm {
    open(body, x).expect("generated and parsed terms are locally closed")
}

fn var_supply(g: &Ctx<VarAssoc>, terms: &[&Tm]) -> NameSupply {
    let mut s = NameSupply::default();
    for a in g.elems() {
        s.avoid(&a.src);
        s.avoid(&a.dst);
    }
    for t in terms {
        t.each_free(&mut |n| s.avoid(n));
    }
    s
}

/// Each subset of `g` with its complement; the canonical splits.
fn subsets<E: Clone>(g: &[E]) -> impl Iterator<Item = (Vec<E>, Vec<E>)> + '_ {
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

fn extended(x: &Name, y: &Name, g: &[VarAssoc]) -> Vec<VarAssoc> {
    let mut out = Vec::with_capacity(g.len() + 1);
    out.push(VarAssoc::new(x.clone(), y.clone()));
    out.extend_from_slice(g);
    out
}

/// `ltrans G e e2`, searched clause by clause. Contexts are observed only
/// through `select`, `no_elems` and splits, so the search carries the
/// elements of `G`.
pub fn ltrans_rel(g: &Ctx<VarAssoc>, e: &Tm, e2: &Tm) -> bool {
    let items: Vec<VarAssoc> = g.elems().into_iter().cloned().collect();
    rel(&items, e, e2, &mut var_supply(g, &[e, e2]))
}

fn rel(g: &[VarAssoc], e: &Tm, e2: &Tm, names: &mut NameSupply) -> bool {
    match (e, e2) {
        (Tm::Free(x), Tm::Free(y)) => matches!(g, [a] if a.src == *x && a.dst == *y),
        (Tm::App(m, n), Tm::App(m2, n2)) => subsets(g).any(|(g1, g2)| rel(&g1, m, m2, names) && rel(&g2, n, n2, names)),
        (Tm::Abs(t, b), Tm::Abs(t2, b2)) if t == t2 => {
            let (x, y) = (names.fresh(), names.fresh());
            rel(&extended(&x, &y, g), &opened(b, &x), &opened(b2, &y), names)
        }
        (Tm::Let(t, v, b), Tm::App(f, v2)) => match &**f {
            Tm::Abs(t2, b2) if t == t2 => {
                let (x, y) = (names.fresh(), names.fresh());
                let (b, b2) = (opened(b, &x), opened(b2, &y));
                subsets(g).any(|(g1, g2)| rel(&g1, v, v2, names) && rel(&extended(&x, &y, &g2), &b, &b2, names))
            }
            _ => false,
        },
        _ => false,
    }
}

/// Every `e2` with `ltrans G e e2` derivable.
pub fn ltrans_outputs(g: &Ctx<VarAssoc>, e: &Tm) -> BTreeSet<Tm> {
    let items: Vec<VarAssoc> = g.elems().into_iter().cloned().collect();
    outputs(&items, e, &mut var_supply(g, &[e]))
}

fn outputs(g: &[VarAssoc], e: &Tm, names: &mut NameSupply) -> BTreeSet<Tm> {
    match e {
        Tm::Free(x) => match g {
            [a] if a.src == *x => [Tm::free(&a.dst)].into_iter().collect(),
            _ => BTreeSet::new(),
        },
        Tm::Bound(_) => BTreeSet::new(),
        Tm::App(m, n) => {
            let mut out = BTreeSet::new();
            for (g1, g2) in subsets(g) {
                let fs = outputs(&g1, m, names);
                if fs.is_empty() {
                    continue;
                }
                let xs = outputs(&g2, n, names);
                for f in &fs {
                    for x in &xs {
                        out.insert(Tm::app(f.clone(), x.clone()));
                    }
                }
            }
            out
        }
        Tm::Abs(t, b) => {
            let (x, y) = (names.fresh(), names.fresh());
            outputs(&extended(&x, &y, g), &opened(b, &x), names)
                .into_iter()
                .map(|b2| Tm::abs(t.clone(), close(&b2, &y)))
                .collect()
        }
        Tm::Let(t, v, b) => {
            let (x, y) = (names.fresh(), names.fresh());
            let b = opened(b, &x);
            let mut out = BTreeSet::new();
            for (g1, g2) in subsets(g) {
                let vs = outputs(&g1, v, names);
                if vs.is_empty() {
                    continue;
                }
                for b2 in outputs(&extended(&x, &y, &g2), &b, names) {
                    let f = Tm::abs(t.clone(), close(&b2, &y));
                    for v2 in &vs {
                        out.insert(Tm::app(f.clone(), v2.clone()));
                    }
                }
            }
            out
        }
    }
}

/// The translation as a function of the source term.
pub fn translate(g: &Ctx<VarAssoc>, e: &Tm) -> Result<Tm, TransError> {
    if !g.is_list() {
        return Err(TransError::NotAList);
    }
    let mut map: BTreeMap<Name, Name> = BTreeMap::new();
    for a in g.elems() {
        if map.insert(a.src.clone(), a.dst.clone()).is_some() {
            return Err(TransError::DuplicateSource(a.src.clone()));
        }
    }
    let free = e.free_names();
    for n in &free {
        if !map.contains_key(n) {
            return Err(TransError::Unmapped(n.clone()));
        }
        let uses = e.count_free(n);
        if uses != 1 {
            return Err(TransError::Linearity {
                var: n.to_string(),
                uses,
            });
        }
    }
    if let Some(unused) = map.keys().find(|n| !free.contains(*n)) {
        return Err(TransError::Linearity {
            var: unused.to_string(),
            uses: 0,
        });
    }
    go(&map, e, &mut var_supply(g, &[e]))
}

fn linear_binder(binder: &Tm, body: &Tm) -> Result<(), TransError> {
    match body.count_bound(0) {
        1 => Ok(()),
        uses => Err(TransError::Linearity {
            var: format!("the variable bound by `{}`", print_term(binder)),
            uses,
        }),
    }
}

fn go(map: &BTreeMap<Name, Name>, e: &Tm, names: &mut NameSupply) -> Result<Tm, TransError> {
    match e {
        Tm::Free(x) => map.get(x).map(Tm::free).ok_or_else(|| TransError::Unmapped(x.clone())),
        Tm::Bound(_) => unreachable!("opened before descent"),
        Tm::App(m, n) => Ok(Tm::app(go(map, m, names)?, go(map, n, names)?)),
        Tm::Abs(t, b) => {
            linear_binder(e, b)?;
            let (x, y) = (names.fresh(), names.fresh());
            let mut inner = map.clone();
            inner.insert(x.clone(), y.clone());
            let b2 = go(&inner, &opened(b, &x), names)?;
            Ok(Tm::abs(t.clone(), close(&b2, &y)))
        }
        Tm::Let(t, v, b) => {
            linear_binder(e, b)?;
            let v2 = go(map, v, names)?;
            let (x, y) = (names.fresh(), names.fresh());
            let mut inner = map.clone();
            inner.insert(x.clone(), y.clone());
            let b2 = go(&inner, &opened(b, &x), names)?;
            Ok(Tm::app(Tm::abs(t.clone(), close(&b2, &y)), v2))
        }
    }
}

fn ty_names(g: &Ctx<TyAssoc>) -> impl Iterator<Item = &Name> {
    g.elems().into_iter().map(|a| &a.name)
}

fn var_names(g: &Ctx<VarAssoc>) -> impl Iterator<Item = &Name> {
    g.elems().into_iter().flat_map(|a| [&a.src, &a.dst])
}

/// `trans_rel_list`: position-wise `(ty_of x T, trans_to x y, ty_of y T)`
/// with `x` and `y` distinct and absent from the three tails.
pub fn trans_rel_list(l1: &Ctx<TyAssoc>, l2: &Ctx<VarAssoc>, l3: &Ctx<TyAssoc>) -> bool {
    match (l1, l2, l3) {
        (Ctx::Empty, Ctx::Empty, Ctx::Empty) => true,
        (Ctx::Cons(a, t1), Ctx::Cons(v, t2), Ctx::Cons(c, t3)) => {
            let shape = a.name == v.src && c.name == v.dst && a.ty == c.ty && v.src != v.dst;
            shape && {
                let tails: BTreeSet<&Name> = ty_names(t1).chain(var_names(t2)).chain(ty_names(t3)).collect();
                !tails.contains(&v.src) && !tails.contains(&v.dst) && trans_rel_list(t1, t2, t3)
            }
        }
        _ => false,
    }
}

/// `trans_rel`, decided by aligning on the elements of `g2`.
pub fn trans_rel_mset(g1: &Ctx<TyAssoc>, g2: &Ctx<VarAssoc>, g3: &Ctx<TyAssoc>) -> bool {
    trans_rel_align(g1, g2, g3).is_some()
}

/// Lists `L1 ~ g1`, `L2 ~ g2`, `L3 ~ g3` with `trans_rel_list L1 L2 L3`.
///
/// Any alignment makes all names pairwise distinct, and then every order
/// of `L2` aligns; the search keeps the order of `g2` and backtracks only
/// over the partners chosen in `g1` and `g3`.
pub fn trans_rel_align(
    g1: &Ctx<TyAssoc>,
    g2: &Ctx<VarAssoc>,
    g3: &Ctx<TyAssoc>,
) -> Option<(Ctx<TyAssoc>, Ctx<VarAssoc>, Ctx<TyAssoc>)> {
    let a: Vec<TyAssoc> = g1.elems().into_iter().cloned().collect();
    let v: Vec<VarAssoc> = g2.elems().into_iter().cloned().collect();
    let c: Vec<TyAssoc> = g3.elems().into_iter().cloned().collect();
    if a.len() != v.len() || v.len() != c.len() {
        return None;
    }
    let rows = align(a, v, c)?;
    let (l1, rest): (Vec<_>, Vec<_>) = rows.into_iter().map(|(x, y, z)| (x, (y, z))).unzip();
    let (l2, l3): (Vec<_>, Vec<_>) = rest.into_iter().unzip();
    Some((Ctx::from_list(l1), Ctx::from_list(l2), Ctx::from_list(l3)))
}

type Row = (TyAssoc, VarAssoc, TyAssoc);

fn align(a: Vec<TyAssoc>, v: Vec<VarAssoc>, c: Vec<TyAssoc>) -> Option<Vec<Row>> {
    let Some(head) = v.first().cloned() else {
        return Some(Vec::new());
    };
    let v_rest = v[1..].to_vec();
    for i in (0..a.len()).filter(|&i| a[i].name == head.src) {
        for k in (0..c.len()).filter(|&k| c[k].name == head.dst && c[k].ty == a[i].ty) {
            let mut a_rest = a.clone();
            let x = a_rest.remove(i);
            let mut c_rest = c.clone();
            let z = c_rest.remove(k);
            let fresh = head.src != head.dst && {
                let tails: BTreeSet<&Name> = a_rest
                    .iter()
                    .map(|t| &t.name)
                    .chain(v_rest.iter().flat_map(|t| [&t.src, &t.dst]))
                    .chain(c_rest.iter().map(|t| &t.name))
                    .collect();
                !tails.contains(&head.src) && !tails.contains(&head.dst)
            };
            if !fresh {
                continue;
            }
            if let Some(mut rows) = align(a_rest, v_rest.clone(), c_rest) {
                rows.insert(0, (x, head.clone(), z));
                return Some(rows);
            }
        }
    }
    None
}

/// `trans_rel` by its definition: a search over list permutations.
pub fn trans_rel_mset_def(g1: &Ctx<TyAssoc>, g2: &Ctx<VarAssoc>, g3: &Ctx<TyAssoc>) -> bool {
    let p1 = distinct_permutations(&g1.elems().into_iter().cloned().collect::<Vec<_>>());
    let p2 = distinct_permutations(&g2.elems().into_iter().cloned().collect::<Vec<_>>());
    let p3 = distinct_permutations(&g3.elems().into_iter().cloned().collect::<Vec<_>>());
    p1.iter().any(|l1| {
        let l1 = Ctx::from_list(l1.clone());
        p2.iter().any(|l2| {
            let l2 = Ctx::from_list(l2.clone());
            p3.iter()
                .any(|l3| trans_rel_list(&l1, &l2, &Ctx::from_list(l3.clone())))
        })
    })
}

/// Checks a candidate alignment against the triple it was built from.
pub fn is_alignment_of(t: &RelTriple, l1: &Ctx<TyAssoc>, l2: &Ctx<VarAssoc>, l3: &Ctx<TyAssoc>) -> bool {
    perm(&t.tyctx_src, l1) && perm(&t.transctx, l2) && perm(&t.tyctx_dst, l3) && trans_rel_list(l1, l2, l3)
}
