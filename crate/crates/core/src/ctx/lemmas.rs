//! Bounded checks of the generic context lemmas.
//!
//! Statements quantifying over pairs related by `perm` are checked one
//! permutation class at a time: "for all G, G' in a class, P(G) implies
//! P(G')" holds exactly when P is constant on the class, which needs one
//! pass over the class rather than one per pair.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::*;
use crate::gen::GenBounds;
use crate::report::{check_all, check_seq, CheckReport, Counterexample, Outcome};

/// The element pool `a, b, ...` of the given size.
pub fn letter_pool(k: usize) -> Vec<char> {
    (0..k.min(26)).map(|i| (b'a' + i as u8) as char).collect()
}

type Key = Vec<char>;

fn key(g: &Ctx<char>) -> Key {
    g.multiset().into_iter().copied().collect()
}

fn classes(univ: &[Ctx<char>]) -> Vec<Vec<&Ctx<char>>> {
    let mut by_key: BTreeMap<Key, Vec<&Ctx<char>>> = BTreeMap::new();
    for g in univ {
        by_key.entry(key(g)).or_default().push(g);
    }
    by_key.into_values().collect()
}

fn class_pairs(classes: &[Vec<&Ctx<char>>]) -> u64 {
    classes.iter().map(|c| (c.len() as u64).pow(2)).sum()
}

/// Runs every core lemma at `b`: contexts over `b.names` letters with at
/// most `b.ctx_elems` elements and union depth at most `b.union_depth`.
pub fn core_lemma_suite(b: &GenBounds) -> Vec<CheckReport> {
    let pool = letter_pool(b.names);
    let univ = gen_ctxs(&pool, b.ctx_elems, b.union_depth);
    let cls = classes(&univ);
    let lists: Vec<&Ctx<char>> = univ.iter().filter(|g| g.is_list()).collect();
    let pair_depth = b.union_depth.min(2);
    let small: Vec<Ctx<char>> = univ.iter().filter(|g| g.depth() <= pair_depth).cloned().collect();
    let tables = std::cell::OnceCell::new();
    let tables = || tables.get_or_init(|| pair_tables(&small));

    vec![
        CheckReport::run("sel_implies_mem", || sel_implies_mem(&univ, &pool)),
        CheckReport::run("mem_replace", || mem_replace(&cls, &pool)),
        CheckReport::run("sel_replace", || sel_replace(&cls, &pool)),
        CheckReport::run("partition_count", || partition_count(&lists)),
        CheckReport::run("partition_complete", || partition_complete(&lists)),
        CheckReport::run("part_to_perm", || part_to_perm_check(&lists)),
        CheckReport::run("perm_to_part", || perm_to_part_check(&univ)),
        CheckReport::run("perm_equiv_perm_rel", || perm_equiv_all_pairs(&small, tables())),
        CheckReport::run("perm_equiv_perm_rel_list", || perm_equiv_list_rows(&univ)),
        CheckReport::run("perm_rel_literal", || perm_rel_literal(&univ)),
        CheckReport::run("perm_equivalence", || perm_equivalence(&univ, &small, tables())),
        CheckReport::run("splits_sound_complete", || splits_check(&small)),
    ]
}

fn sel_implies_mem(univ: &[Ctx<char>], pool: &[char]) -> Outcome {
    check_all(univ, |g| {
        check_seq(pool, |x| {
            let sel = g.select(x);
            let ok = sel.is_empty() || g.member(x);
            let paths_ok = sel
                .iter()
                .all(|(p, r)| p.resolve(g) == Some(x) && r.len() + 1 == g.len());
            Outcome::check(ok && paths_ok, || Counterexample::new().with("X", x).with("G", g))
        })
    })
}

fn mem_replace(cls: &[Vec<&Ctx<char>>], pool: &[char]) -> Outcome {
    let out = check_all(cls, |class| {
        let reference: Vec<bool> = pool.iter().map(|x| class[0].member(x)).collect();
        check_seq(class.iter(), |g| {
            let bad = pool.iter().zip(&reference).find(|(x, &r)| g.member(x) != r);
            match bad {
                None => Outcome::pass(0),
                Some((x, &r)) => {
                    let (from, to) = if r { (class[0], *g) } else { (*g, class[0]) };
                    Outcome::fail(0, Counterexample::new().with("X", x).with("G", from).with("G'", to))
                }
            }
        })
    });
    Outcome {
        cases: class_pairs(cls) * pool.len() as u64,
        ..out
    }
}

fn residual_keys(g: &Ctx<char>, x: &char) -> BTreeSet<Key> {
    g.select(x).iter().map(|(_, r)| key(r)).collect()
}

fn sel_replace(cls: &[Vec<&Ctx<char>>], pool: &[char]) -> Outcome {
    let out = check_all(cls, |class| {
        let reference: Vec<BTreeSet<Key>> = pool.iter().map(|x| residual_keys(class[0], x)).collect();
        check_seq(class.iter(), |g| {
            for (x, r) in pool.iter().zip(&reference) {
                let mine = residual_keys(g, x);
                if &mine != r {
                    let (g1, g2) = if mine.is_subset(r) {
                        (class[0], *g)
                    } else {
                        (*g, class[0])
                    };
                    return Outcome::fail(0, Counterexample::new().with("X", x).with("G1", g1).with("G2", g2));
                }
            }
            Outcome::pass(0)
        })
    });
    Outcome {
        cases: class_pairs(cls) * pool.len() as u64,
        ..out
    }
}

fn partition_count(lists: &[&Ctx<char>]) -> Outcome {
    check_all(lists, |l| {
        let parts = partition_list(l).expect("lists only");
        // One entry per derivation, so repeated elements give repeated pairs.
        let ok = parts.len() == 1 << l.len()
            && parts
                .iter()
                .all(|(a, b)| a.is_list() && b.is_list() && is_partition(l, a, b));
        Outcome::check(ok, || Counterexample::new().with("L", l))
    })
}

fn partition_complete(lists: &[&Ctx<char>]) -> Outcome {
    check_all(lists, |l| {
        let parts: BTreeSet<_> = partition_list(l).expect("lists only").into_iter().collect();
        check_seq(lists.iter().filter(|a| a.len() <= l.len()), |l1| {
            check_seq(lists.iter().filter(|b| b.len() + l1.len() == l.len()), |l2| {
                let derivable = is_partition(l, l1, l2);
                let listed = parts.contains(&((*l1).clone(), (*l2).clone()));
                Outcome::check(derivable == listed, || {
                    Counterexample::new().with("L", l).with("L1", l1).with("L2", l2)
                })
            })
        })
    })
}

fn part_to_perm_check(lists: &[&Ctx<char>]) -> Outcome {
    check_all(lists, |l| {
        check_seq(partition_list(l).expect("lists only"), |(l1, l2)| {
            Outcome::check(part_to_perm(l, &l1, &l2) == Ok(true), || {
                Counterexample::new().with("L", l).with("L1", &l1).with("L2", &l2)
            })
        })
    })
}

fn perm_to_part_check(univ: &[Ctx<char>]) -> Outcome {
    let mut lists_by_key: HashMap<Key, Vec<&Ctx<char>>> = HashMap::new();
    for g in univ.iter().filter(|g| g.is_list()) {
        lists_by_key.entry(key(g)).or_default().push(g);
    }
    let unions: Vec<&Ctx<char>> = univ.iter().filter(|g| matches!(g, Ctx::Union(..))).collect();
    check_all(&unions, |g| {
        let Ctx::Union(g1, g2) = g else { unreachable!() };
        let candidates = lists_by_key.get(&key(g)).map(Vec::as_slice).unwrap_or(&[]);
        check_seq(candidates, |l| {
            let ok = match perm_to_part(l, g1, g2) {
                Ok((l1, l2)) => {
                    perm(g1, &l1) && perm(g2, &l2) && is_partition(l, &l1, &l2) && part_to_perm(l, &l1, &l2) == Ok(true)
                }
                Err(_) => false,
            };
            Outcome::check(ok, || Counterexample::new().with("L", l).with("G1", g1).with("G2", g2))
        })
    })
}

/// `perm_rel` over a whole universe, tabled: each selection residual is
/// itself in the universe and has fewer elements, so it is decided before
/// the context it came from. Universes are sorted by element count.
struct PermRelTable {
    stride: usize,
    bits: Vec<u64>,
}

impl PermRelTable {
    fn new(rows: usize, cols: usize) -> PermRelTable {
        let stride = cols.div_ceil(64);
        PermRelTable {
            stride,
            bits: vec![0; rows * stride],
        }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.stride + j / 64] |= 1 << (j % 64);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }
}

struct Interned<'a> {
    index: HashMap<&'a Ctx<char>, usize>,
    sel: Vec<Vec<(char, usize)>>,
    empty: Vec<bool>,
}

fn intern(univ: &[Ctx<char>]) -> Interned<'_> {
    let index: HashMap<&Ctx<char>, usize> = univ.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let sel = univ
        .iter()
        .map(|g| {
            g.select_any()
                .into_iter()
                .map(|(_, x, r)| (x, *index.get(&r).expect("residuals stay in the universe")))
                .collect()
        })
        .collect();
    let empty = univ.iter().map(Ctx::no_elems).collect();
    Interned { index, sel, empty }
}

/// Fills the table for rows `rows` (indices into the universe, closed
/// under selection) against every column.
fn tabulate(it: &Interned<'_>, rows: &[usize]) -> PermRelTable {
    let n = it.sel.len();
    let mut row_of = vec![usize::MAX; n];
    for (r, &i) in rows.iter().enumerate() {
        row_of[i] = r;
    }
    let mut t = PermRelTable::new(rows.len(), n);
    for (r, &i) in rows.iter().enumerate() {
        for j in 0..n {
            let holds = (it.empty[i] && it.empty[j])
                || it.sel[i].iter().any(|&(x, ri)| {
                    let rr = row_of[ri];
                    it.sel[j].iter().any(|&(y, rj)| x == y && t.get(rr, rj))
                });
            if holds {
                t.set(r, j);
            }
        }
    }
    t
}

/// `perm` and the tabled `perm_rel` on every pair of a universe.
struct PairTables {
    rel: PermRelTable,
    dec: PermRelTable,
}

fn pair_tables(univ: &[Ctx<char>]) -> PairTables {
    let it = intern(univ);
    let rows: Vec<usize> = (0..univ.len()).collect();
    let rel = tabulate(&it, &rows);
    let mut dec = PermRelTable::new(univ.len(), univ.len());
    for i in 0..univ.len() {
        for j in 0..univ.len() {
            if perm(&univ[i], &univ[j]) {
                dec.set(i, j);
            }
        }
    }
    PairTables { rel, dec }
}

fn perm_equiv_all_pairs(univ: &[Ctx<char>], t: &PairTables) -> Outcome {
    check_seq(0..univ.len(), |i| {
        check_seq(0..univ.len(), |j| {
            Outcome::check(t.dec.get(i, j) == t.rel.get(i, j), || {
                Counterexample::new().with("G1", &univ[i]).with("G2", &univ[j])
            })
        })
    })
}

fn perm_equiv_list_rows(univ: &[Ctx<char>]) -> Outcome {
    let it = intern(univ);
    let rows: Vec<usize> = univ
        .iter()
        .enumerate()
        .filter(|(_, g)| g.is_list())
        .map(|(i, _)| i)
        .collect();
    debug_assert!(rows.iter().all(|&i| it.index[&univ[i]] == i));
    let t = tabulate(&it, &rows);
    check_all(&(0..rows.len()).collect::<Vec<_>>(), |&r| {
        check_seq(0..univ.len(), |j| {
            Outcome::check(perm(&univ[rows[r]], &univ[j]) == t.get(r, j), || {
                Counterexample::new().with("G1", &univ[rows[r]]).with("G2", &univ[j])
            })
        })
    })
}

/// The untabled [`perm_rel`] itself, on pairs of union depth at most one
/// and at most three elements.
fn perm_rel_literal(univ: &[Ctx<char>]) -> Outcome {
    let small: Vec<&Ctx<char>> = univ.iter().filter(|g| g.depth() <= 1 && g.len() <= 3).collect();
    check_all(&small, |g1| {
        check_seq(small.iter(), |g2| {
            Outcome::check(perm_rel(g1, g2) == perm(g1, g2), || {
                Counterexample::new().with("G1", g1).with("G2", g2)
            })
        })
    })
}

/// Reflexivity on the whole universe; symmetry and transitivity on the
/// pair universe, read off the table of `perm` results.
fn perm_equivalence(univ: &[Ctx<char>], small: &[Ctx<char>], t: &PairTables) -> Outcome {
    let refl = check_all(univ, |g| {
        Outcome::check(perm(g, g), || Counterexample::new().with("G", g))
    });
    let n = small.len();
    let sym = check_seq(0..n, |i| {
        check_seq(0..n, |j| {
            Outcome::check(t.dec.get(i, j) == t.dec.get(j, i), || {
                Counterexample::new().with("G1", &small[i]).with("G2", &small[j])
            })
        })
    });
    let trans = check_seq(0..n, |i| {
        check_seq((0..n).filter(|&j| t.dec.get(i, j)), |j| {
            // perm(i, j) and perm(j, k) must give perm(i, k) for every k:
            // row j of the table is contained in row i.
            let (ri, rj) = (t.dec.row(i), t.dec.row(j));
            let cases: u64 = rj.iter().map(|w| u64::from(w.count_ones())).sum();
            match rj.iter().zip(ri).position(|(wj, wi)| wj & !wi != 0) {
                None => Outcome::pass(cases),
                Some(w) => {
                    let k = w * 64 + (rj[w] & !ri[w]).trailing_zeros() as usize;
                    Outcome::fail(
                        cases,
                        Counterexample::new()
                            .with("G1", &small[i])
                            .with("G2", &small[j])
                            .with("G3", &small[k]),
                    )
                }
            }
        })
    });
    refl.and(sym).and(trans)
}

/// Every sub-multiset split of `key` as a pair of keys.
fn key_splits(k: &Key) -> BTreeSet<(Key, Key)> {
    (0..1u32 << k.len())
        .map(|mask| {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (i, x) in k.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    a.push(*x);
                } else {
                    b.push(*x);
                }
            }
            (a, b)
        })
        .collect()
}

fn splits_check(univ: &[Ctx<char>]) -> Outcome {
    check_all(univ, |g| {
        let s = splits(g);
        let sound = s.len() == 1 << g.len()
            && s.iter()
                .all(|(a, b)| a.is_list() && b.is_list() && perm(g, &Ctx::union(a.clone(), b.clone())));
        let yielded: BTreeSet<(Key, Key)> = s.iter().map(|(a, b)| (key(a), key(b))).collect();
        let complete = yielded == key_splits(&key(g));
        Outcome::check(sound && complete, || Counterexample::new().with("G", g))
    })
}
