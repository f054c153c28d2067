//! Bounded enumeration of types, terms and context shapes.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::ctx::{gen_ctxs, Ctx};
use crate::syntax::{Name, Tm, Ty};

/// Size limits shared by all bounded checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenBounds {
    /// Largest term, counted in constructors.
    pub term_size: usize,
    /// Most elements in one context.
    pub ctx_elems: usize,
    /// Deepest nesting of `++`.
    pub union_depth: usize,
    /// Size of the name (or element) pool.
    pub names: usize,
    /// Deepest type; base types have depth 1.
    pub ty_depth: usize,
}

impl Default for GenBounds {
    fn default() -> Self {
        GenBounds {
            term_size: 5,
            ctx_elems: 3,
            union_depth: 2,
            names: 3,
            ty_depth: 2,
        }
    }
}

impl GenBounds {
    /// Defaults for the element-agnostic context lemmas.
    pub fn core() -> GenBounds {
        GenBounds {
            ctx_elems: 4,
            union_depth: 3,
            names: 2,
            ..GenBounds::default()
        }
    }
}

pub const BASE_TYPES: [&str; 2] = ["i", "o"];

/// All types over [`BASE_TYPES`] up to `depth`, smallest first.
pub fn gen_types(depth: usize) -> Vec<Ty> {
    let mut levels: Vec<Vec<Ty>> = Vec::new();
    let mut all: Vec<Ty> = Vec::new();
    for d in 1..=depth {
        let mut level = Vec::new();
        if d == 1 {
            level.extend(BASE_TYPES.iter().map(|b| Ty::base(b)));
        } else {
            let shallower: Vec<&Ty> = all.iter().collect();
            let prev = &levels[d - 2];
            for a in &shallower {
                for b in &shallower {
                    if prev.contains(a) || prev.contains(b) {
                        level.push(Ty::arrow((*a).clone(), (*b).clone()));
                    }
                }
            }
        }
        all.extend(level.iter().cloned());
        levels.push(level);
    }
    all
}

/// The name pool `n0 .. n{k-1}`.
pub fn name_pool(k: usize) -> Vec<Name> {
    (0..k).map(|i| Name::indexed("n", i)).collect()
}

/// All locally closed terms with at most `max_size` constructors whose
/// free names come from `names` and whose annotations come from `tys`.
pub fn gen_terms(max_size: usize, names: &[Name], tys: &[Ty], with_let: bool) -> Vec<Tm> {
    let mut gen = TermGen {
        names,
        tys,
        with_let,
        memo: HashMap::new(),
    };
    (1..=max_size).flat_map(|s| gen.exact(s, 0)).collect()
}

struct TermGen<'a> {
    names: &'a [Name],
    tys: &'a [Ty],
    with_let: bool,
    memo: HashMap<(usize, usize), Vec<Tm>>,
}

impl TermGen<'_> {
    /// Terms of exactly `size` under `depth` binders.
    fn exact(&mut self, size: usize, depth: usize) -> Vec<Tm> {
        if let Some(v) = self.memo.get(&(size, depth)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            out.extend(self.names.iter().map(Tm::free));
            out.extend((0..depth).map(Tm::Bound));
        } else {
            for a in 1..size - 1 {
                let fs = self.exact(a, depth);
                let xs = self.exact(size - 1 - a, depth);
                for f in &fs {
                    for x in &xs {
                        out.push(Tm::app(f.clone(), x.clone()));
                    }
                }
            }
            let bodies = self.exact(size - 1, depth + 1);
            for t in self.tys {
                for b in &bodies {
                    out.push(Tm::abs(t.clone(), b.clone()));
                }
            }
            if self.with_let {
                for a in 1..size - 1 {
                    let vs = self.exact(a, depth);
                    let bs = self.exact(size - 1 - a, depth + 1);
                    for t in self.tys {
                        for v in &vs {
                            for b in &bs {
                                out.push(Tm::let_(t.clone(), v.clone(), b.clone()));
                            }
                        }
                    }
                }
            }
        }
        self.memo.insert((size, depth), out.clone());
        out
    }
}

/// Every context of union depth at most `max_depth` holding exactly the
/// multiset `items`, without duplicates.
pub fn arrangements<E: Clone + Ord>(items: &[E], max_depth: usize) -> Vec<Ctx<E>> {
    let shapes: Vec<Ctx<()>> = gen_ctxs(&[()], items.len(), max_depth)
        .into_iter()
        .filter(|s| s.len() == items.len())
        .collect();
    let mut out = BTreeSet::new();
    for order in distinct_permutations(items) {
        for s in &shapes {
            let mut it = order.iter();
            out.insert(fill(s, &mut it));
        }
    }
    out.into_iter().collect()
}

fn fill<'a, E: Clone + 'a>(shape: &Ctx<()>, items: &mut impl Iterator<Item = &'a E>) -> Ctx<E> {
    match shape {
        Ctx::Empty => Ctx::Empty,
        Ctx::Cons((), t) => {
            let h = items.next().expect("shape has as many slots as items").clone();
            Ctx::cons(h, fill(t, items))
        }
        Ctx::Union(l, r) => {
            let l = fill(l, items);
            Ctx::union(l, fill(r, items))
        }
    }
}

/// The distinct orderings of a multiset.
pub fn distinct_permutations<E: Clone + Ord>(items: &[E]) -> Vec<Vec<E>> {
    let mut sorted = items.to_vec();
    sorted.sort();
    let mut out = Vec::new();
    let mut used = vec![false; sorted.len()];
    let mut cur = Vec::with_capacity(sorted.len());
    permute(&sorted, &mut used, &mut cur, &mut out);
    out
}

fn permute<E: Clone + Ord>(items: &[E], used: &mut [bool], cur: &mut Vec<E>, out: &mut Vec<Vec<E>>) {
    if cur.len() == items.len() {
        out.push(cur.clone());
        return;
    }
    for i in 0..items.len() {
        if used[i] || (i > 0 && items[i] == items[i - 1] && !used[i - 1]) {
            continue;
        }
        used[i] = true;
        cur.push(items[i].clone());
        permute(items, used, cur, out);
        cur.pop();
        used[i] = false;
    }
}

/// All lists of length at most `max_len` over `pool`, shortest first.
pub fn gen_lists<E: Clone>(pool: &[E], max_len: usize) -> Vec<Vec<E>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for l in &frontier {
            for x in pool {
                let mut l2: Vec<E> = l.clone();
                l2.push(x.clone());
                next.push(l2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_universe_sizes() {
        assert_eq!(gen_types(1).len(), 2);
        assert_eq!(gen_types(2).len(), 6);
        // 6 * 6 pairs minus the 2 * 2 pairs of base types.
        assert_eq!(gen_types(3).len(), 6 + 32);
        assert!(gen_types(3).iter().all(|t| t.depth() <= 3));
    }

    #[test]
    fn terms_are_locally_closed_and_distinct() {
        let names = name_pool(2);
        let tys = gen_types(1);
        let ts = gen_terms(4, &names, &tys, true);
        assert!(ts.iter().all(|t| t.is_locally_closed() && t.size() <= 4));
        let set: BTreeSet<_> = ts.iter().collect();
        assert_eq!(set.len(), ts.len());
    }

    /// Counts by the grammar directly: atoms, applications, abstractions,
    /// and lets, each at a binder depth.
    fn count(size: usize, depth: usize, names: usize, tys: usize, with_let: bool) -> usize {
        if size == 1 {
            return names + depth;
        }
        let mut n = tys * count(size - 1, depth + 1, names, tys, with_let);
        for a in 1..size - 1 {
            n += count(a, depth, names, tys, with_let) * count(size - 1 - a, depth, names, tys, with_let);
            if with_let {
                n += tys * count(a, depth, names, tys, with_let) * count(size - 1 - a, depth + 1, names, tys, with_let);
            }
        }
        n
    }

    #[test]
    fn term_counts_match_grammar() {
        let names = name_pool(2);
        let tys = gen_types(2);
        for with_let in [false, true] {
            let expected: usize = (1..=4).map(|s| count(s, 0, 2, 6, with_let)).sum();
            assert_eq!(gen_terms(4, &names, &tys, with_let).len(), expected);
        }
    }

    #[test]
    fn arrangements_cover_every_shape() {
        let a = arrangements(&['a', 'b'], 1);
        // Shapes with two slots and depth at most one: 7; two orderings each.
        assert_eq!(a.len(), 14);
        assert!(a.iter().all(|g| crate::ctx::perm(g, &Ctx::from_list(vec!['a', 'b']))));
        assert_eq!(arrangements(&['a', 'a'], 1).len(), 7);
    }

    #[test]
    fn permutations_are_distinct() {
        assert_eq!(distinct_permutations(&[1, 1, 2]).len(), 3);
        assert_eq!(distinct_permutations(&[1, 2, 3]).len(), 6);
        assert_eq!(distinct_permutations::<u8>(&[]).len(), 1);
    }

    #[test]
    fn list_counts() {
        assert_eq!(gen_lists(&['a', 'b'], 3).len(), 1 + 2 + 4 + 8);
    }
}
