//! Multiset contexts built from `nil`, `::` and `++`.
//!
//! A [`Ctx`] is an ordinary finite tree, but every relation defined here
//! (`member`, `select`, `no_elems`, `perm`, partitions) treats it as the
//! multiset of the elements hanging off its `Cons` nodes.

use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

pub mod lemmas;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CtxError {
    #[error("expected a list-form context (no `++`), got {0}")]
    NotAList(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("lemma instance has no witness: {0}")]
    NoWitness(String),
}

/// The two sides of a split or partition.
pub type Halves<E> = (Ctx<E>, Ctx<E>);

/// A binding context: `nil`, `X :: G`, or `G1 ++ G2`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ctx<E> {
    #[default]
    Empty,
    Cons(E, Box<Ctx<E>>),
    Union(Box<Ctx<E>>, Box<Ctx<E>>),
}

/// One step of an [`OccPath`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    AtHead,
    InTail,
    InLeft,
    InRight,
}

/// Locates a single element occurrence inside a context.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct OccPath(pub Vec<Step>);

impl OccPath {
    fn prefixed(step: Step, rest: OccPath) -> OccPath {
        let mut steps = Vec::with_capacity(rest.0.len() + 1);
        steps.push(step);
        steps.extend(rest.0);
        OccPath(steps)
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    /// Follows the path; `None` unless it ends exactly on a `Cons` head.
    pub fn resolve<'a, E>(&self, ctx: &'a Ctx<E>) -> Option<&'a E> {
        let mut cur = ctx;
        let mut steps = self.0.iter().peekable();
        while let Some(step) = steps.next() {
            match (step, cur) {
                (Step::AtHead, Ctx::Cons(h, _)) => {
                    return if steps.peek().is_none() { Some(h) } else { None };
                }
                (Step::InTail, Ctx::Cons(_, t)) => cur = t,
                (Step::InLeft, Ctx::Union(l, _)) => cur = l,
                (Step::InRight, Ctx::Union(_, r)) => cur = r,
                _ => return None,
            }
        }
        None
    }
}

impl<E> Ctx<E> {
    pub fn cons(head: E, tail: Ctx<E>) -> Ctx<E> {
        Ctx::Cons(head, Box::new(tail))
    }

    pub fn union(left: Ctx<E>, right: Ctx<E>) -> Ctx<E> {
        Ctx::Union(Box::new(left), Box::new(right))
    }

    /// Builds the list-form context `x1 :: ... :: xn :: nil`.
    pub fn from_list<I>(items: I) -> Ctx<E>
    where
        I: IntoIterator<Item = E>,
        I::IntoIter: DoubleEndedIterator,
    {
        items.into_iter().rev().fold(Ctx::Empty, |tail, x| Ctx::cons(x, tail))
    }

    /// Left-to-right flattening of the `Cons` heads.
    pub fn elems(&self) -> Vec<&E> {
        let mut out = Vec::new();
        self.collect_elems(&mut out);
        out
    }

    fn collect_elems<'a, C: Extend<&'a E>>(&'a self, out: &mut C) {
        let mut cur = self;
        loop {
            match cur {
                Ctx::Empty => return,
                Ctx::Cons(h, t) => {
                    out.extend(std::iter::once(h));
                    cur = t;
                }
                Ctx::Union(l, r) => {
                    l.collect_elems(out);
                    cur = r;
                }
            }
        }
    }

    /// Number of `Cons` nodes.
    pub fn len(&self) -> usize {
        match self {
            Ctx::Empty => 0,
            Ctx::Cons(_, t) => 1 + t.len(),
            Ctx::Union(l, r) => l.len() + r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.no_elems()
    }

    /// Union nesting depth: `Cons` is transparent, each `++` adds one.
    pub fn depth(&self) -> usize {
        match self {
            Ctx::Empty => 0,
            Ctx::Cons(_, t) => t.depth(),
            Ctx::Union(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn no_elems(&self) -> bool {
        match self {
            Ctx::Empty => true,
            Ctx::Cons(..) => false,
            Ctx::Union(l, r) => l.no_elems() && r.no_elems(),
        }
    }

    pub fn is_list(&self) -> bool {
        match self {
            Ctx::Empty => true,
            Ctx::Cons(_, t) => t.is_list(),
            Ctx::Union(..) => false,
        }
    }

    pub fn map<F, T>(&self, f: &F) -> Ctx<T>
    where
        F: Fn(&E) -> T,
    {
        match self {
            Ctx::Empty => Ctx::Empty,
            Ctx::Cons(h, t) => Ctx::cons(f(h), t.map(f)),
            Ctx::Union(l, r) => Ctx::union(l.map(f), r.map(f)),
        }
    }
}

impl<E: Clone> Ctx<E> {
    /// The flattening as an owned list-form context.
    pub fn to_list(&self) -> Ctx<E> {
        Ctx::from_list(self.elems().into_iter().cloned().collect::<Vec<_>>())
    }
}

impl<E: PartialEq> Ctx<E> {
    pub fn member(&self, x: &E) -> bool {
        match self {
            Ctx::Empty => false,
            Ctx::Cons(h, t) => h == x || t.member(x),
            Ctx::Union(l, r) => l.member(x) || r.member(x),
        }
    }
}

impl<E: PartialEq> Ctx<E> {
    /// Paths to every occurrence of `x`, in the clause order of [`Ctx::select`].
    pub fn occurrences(&self, x: &E) -> Vec<OccPath> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.collect_occurrences(x, &mut prefix, &mut out);
        out
    }

    fn collect_occurrences(&self, x: &E, prefix: &mut Vec<Step>, out: &mut Vec<OccPath>) {
        match self {
            Ctx::Empty => {}
            Ctx::Cons(h, t) => {
                if h == x {
                    let mut p = prefix.clone();
                    p.push(Step::AtHead);
                    out.push(OccPath(p));
                }
                prefix.push(Step::InTail);
                t.collect_occurrences(x, prefix, out);
                prefix.pop();
            }
            Ctx::Union(l, r) => {
                prefix.push(Step::InLeft);
                l.collect_occurrences(x, prefix, out);
                prefix.pop();
                prefix.push(Step::InRight);
                r.collect_occurrences(x, prefix, out);
                prefix.pop();
            }
        }
    }
}

impl<E: Clone> Ctx<E> {
    /// The context with the `Cons` node at `path` spliced out.
    pub fn remove_at(&self, path: &OccPath) -> Option<Ctx<E>> {
        self.remove_steps(path.steps())
    }

    fn remove_steps(&self, steps: &[Step]) -> Option<Ctx<E>> {
        let (first, rest) = steps.split_first()?;
        match (first, self) {
            (Step::AtHead, Ctx::Cons(_, t)) if rest.is_empty() => Some((**t).clone()),
            (Step::InTail, Ctx::Cons(h, t)) => Some(Ctx::cons(h.clone(), t.remove_steps(rest)?)),
            (Step::InLeft, Ctx::Union(l, r)) => Some(Ctx::Union(Box::new(l.remove_steps(rest)?), r.clone())),
            (Step::InRight, Ctx::Union(l, r)) => Some(Ctx::Union(l.clone(), Box::new(r.remove_steps(rest)?))),
            _ => None,
        }
    }
}

impl<E: Clone + PartialEq> Ctx<E> {
    /// Every way of removing one occurrence of `x`, in clause order:
    /// head, then tail, then left operand, then right operand.
    pub fn select(&self, x: &E) -> Vec<(OccPath, Ctx<E>)> {
        match self {
            Ctx::Empty => Vec::new(),
            Ctx::Cons(h, t) => {
                let mut out = Vec::new();
                if h == x {
                    out.push((OccPath(vec![Step::AtHead]), (**t).clone()));
                }
                for (p, rest) in t.select(x) {
                    out.push((OccPath::prefixed(Step::InTail, p), Ctx::cons(h.clone(), rest)));
                }
                out
            }
            Ctx::Union(l, r) => {
                let mut out = Vec::new();
                for (p, l2) in l.select(x) {
                    out.push((OccPath::prefixed(Step::InLeft, p), Ctx::Union(Box::new(l2), r.clone())));
                }
                for (p, r2) in r.select(x) {
                    out.push((OccPath::prefixed(Step::InRight, p), Ctx::Union(l.clone(), Box::new(r2))));
                }
                out
            }
        }
    }

    /// `select` without fixing the element: one entry per occurrence.
    pub fn select_any(&self) -> Vec<(OccPath, E, Ctx<E>)> {
        let mut seen: Vec<&E> = Vec::new();
        let mut out = Vec::new();
        for x in self.elems() {
            if seen.contains(&x) {
                continue;
            }
            seen.push(x);
            for (p, rest) in self.select(x) {
                out.push((p, x.clone(), rest));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

impl<E: Ord> Ctx<E> {
    /// The elements sorted; two contexts are permutations of each other
    /// exactly when these agree.
    pub fn multiset(&self) -> Vec<&E> {
        let mut v = self.elems();
        v.sort();
        v
    }
}

/// `G1 ~ G2`: same elements with the same multiplicities.
pub fn perm<E: Ord>(g1: &Ctx<E>, g2: &Ctx<E>) -> bool {
    let mut a: SmallVec<[&E; 8]> = SmallVec::new();
    let mut b: SmallVec<[&E; 8]> = SmallVec::new();
    g1.collect_elems(&mut a);
    g2.collect_elems(&mut b);
    if a.len() != b.len() {
        return false;
    }
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// The inductive two-clause definition of `perm`, searched literally.
///
/// Exponential; kept as a reference for [`perm`].
pub fn perm_rel<E: Clone + PartialEq>(g1: &Ctx<E>, g2: &Ctx<E>) -> bool {
    if g1.no_elems() && g2.no_elems() {
        return true;
    }
    for (_, x, r1) in g1.select_any() {
        for (_, r2) in g2.select(&x) {
            if perm_rel(&r1, &r2) {
                return true;
            }
        }
    }
    false
}

fn require_list<E: fmt::Debug>(l: &Ctx<E>) -> Result<(), CtxError> {
    if l.is_list() {
        Ok(())
    } else {
        Err(CtxError::NotAList(format!("{l:?}")))
    }
}

/// All `(L1, L2)` with `partition L L1 L2` derivable, in clause order.
pub fn partition_list<E: Clone + fmt::Debug>(l: &Ctx<E>) -> Result<Vec<Halves<E>>, CtxError> {
    require_list(l)?;
    Ok(partitions_of(&l.elems()))
}

fn partitions_of<E: Clone>(items: &[&E]) -> Vec<(Ctx<E>, Ctx<E>)> {
    match items.split_first() {
        None => vec![(Ctx::Empty, Ctx::Empty)],
        Some((x, rest)) => {
            let sub = partitions_of(rest);
            let mut out = Vec::with_capacity(sub.len() * 2);
            for (l1, l2) in &sub {
                out.push((Ctx::cons((*x).clone(), l1.clone()), l2.clone()));
            }
            for (l1, l2) in sub {
                out.push((l1, Ctx::cons((*x).clone(), l2)));
            }
            out
        }
    }
}

/// Decides `partition L L1 L2` by its three clauses.
pub fn is_partition<E: PartialEq>(l: &Ctx<E>, l1: &Ctx<E>, l2: &Ctx<E>) -> bool {
    match l {
        Ctx::Empty => matches!(l1, Ctx::Empty) && matches!(l2, Ctx::Empty),
        Ctx::Cons(x, rest) => {
            let left = matches!(l1, Ctx::Cons(y, r1) if y == x && is_partition(rest, r1, l2));
            left || matches!(l2, Ctx::Cons(y, r2) if y == x && is_partition(rest, l1, r2))
        }
        Ctx::Union(..) => false,
    }
}

/// Canonical solutions of `G ~ G1 ++ G2`: the list-form powerset splits
/// of `elems(G)`. Complete up to permutation of each half.
pub fn splits<E: Clone>(g: &Ctx<E>) -> Vec<(Ctx<E>, Ctx<E>)> {
    partitions_of(&g.elems())
}

/// Membership survives a permutation.
pub fn mem_transport<E>(x: &E, g: &Ctx<E>, g2: &Ctx<E>) -> Result<bool, CtxError>
where
    E: Ord + fmt::Debug,
{
    if !g.member(x) {
        return Err(CtxError::Precondition(format!("{x:?} is not a member of {g:?}")));
    }
    if !perm(g, g2) {
        return Err(CtxError::Precondition(format!("{g:?} is not a permutation of {g2:?}")));
    }
    Ok(g2.member(x))
}

/// Selecting `x` from `g1` (leaving `g1r`) can be matched by a selection
/// from any permutation `g2`, leaving something that permutes to `g1r`.
pub fn sel_transport<E>(x: &E, g1: &Ctx<E>, g1r: &Ctx<E>, g2: &Ctx<E>) -> Result<Ctx<E>, CtxError>
where
    E: Ord + Clone + fmt::Debug,
{
    sel_transport_path(x, g1, g1r, g2).map(|(_, r)| r)
}

fn sel_transport_path<E>(x: &E, g1: &Ctx<E>, g1r: &Ctx<E>, g2: &Ctx<E>) -> Result<(OccPath, Ctx<E>), CtxError>
where
    E: Ord + Clone + fmt::Debug,
{
    if !perm(g1, g2) {
        return Err(CtxError::Precondition(format!("{g1:?} is not a permutation of {g2:?}")));
    }
    if !g1.select(x).iter().any(|(_, r)| r == g1r) {
        return Err(CtxError::Precondition(format!(
            "{g1r:?} is not a residual of selecting {x:?} from {g1:?}"
        )));
    }
    g2.select(x)
        .into_iter()
        .find(|(_, r)| perm(g1r, r))
        .ok_or_else(|| CtxError::NoWitness(format!("sel_replace for {x:?} in {g2:?}")))
}

/// Flattens `L ~ G1 ++ G2` into an ordered partition `(L1, L2)` of `L`
/// with `G1 ~ L1` and `G2 ~ L2`, extracting the elements of `L` front to
/// back and preferring `G1` when both sides hold the element.
pub fn perm_to_part<E>(l: &Ctx<E>, g1: &Ctx<E>, g2: &Ctx<E>) -> Result<(Ctx<E>, Ctx<E>), CtxError>
where
    E: Ord + Clone + fmt::Debug,
{
    require_list(l)?;
    let mut joined = Ctx::union(g1.clone(), g2.clone());
    if !perm(l, &joined) {
        return Err(CtxError::Precondition(format!(
            "{l:?} is not a permutation of {joined:?}"
        )));
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut cur = l;
    while let Ctx::Cons(x, tail) = cur {
        // `cur ~ joined` holds on every iteration, so only the search remains.
        let (path, rest) = joined
            .occurrences(x)
            .into_iter()
            .map(|p| {
                let r = joined.remove_at(&p).expect("occurrence paths resolve");
                (p, r)
            })
            .find(|(_, r)| perm(tail, r))
            .ok_or_else(|| CtxError::NoWitness(format!("sel_replace for {x:?} in {joined:?}")))?;
        match path.steps().first() {
            Some(Step::InLeft) => left.push(x.clone()),
            Some(Step::InRight) => right.push(x.clone()),
            _ => unreachable!("selection from a union starts on one side"),
        }
        joined = rest;
        cur = tail;
    }
    Ok((Ctx::from_list(left), Ctx::from_list(right)))
}

/// An ordered partition of a list is a permutation-style split of it.
pub fn part_to_perm<E>(l: &Ctx<E>, l1: &Ctx<E>, l2: &Ctx<E>) -> Result<bool, CtxError>
where
    E: Ord + Clone + fmt::Debug,
{
    if !is_partition(l, l1, l2) {
        return Err(CtxError::Precondition(format!(
            "({l1:?}, {l2:?}) is not an ordered partition of {l:?}"
        )));
    }
    Ok(perm(l, &Ctx::union(l1.clone(), l2.clone())))
}

/// Positions of `l` taken by the sublist `part`, matched left to right.
pub fn positions<E: PartialEq>(l: &[&E], part: &[&E]) -> Vec<bool> {
    let mut taken = vec![false; l.len()];
    let mut j = 0;
    for (i, x) in l.iter().enumerate() {
        if j < part.len() && part[j] == *x {
            taken[i] = true;
            j += 1;
        }
    }
    taken
}

/// The elements of a list where `mask` is set, and the others.
pub fn split_by<E: Clone>(l: &Ctx<E>, mask: &[bool]) -> (Ctx<E>, Ctx<E>) {
    let es = l.elems();
    let pick = |keep: bool| {
        Ctx::from_list(
            es.iter()
                .zip(mask)
                .filter(|(_, m)| **m == keep)
                .map(|(x, _)| (*x).clone()),
        )
    };
    (pick(true), pick(false))
}

/// Every context over `pool` with at most `max_elems` elements and union
/// depth at most `max_depth`, without duplicates, ordered by element
/// count, then depth, then structure.
pub fn gen_ctxs<E: Clone + Ord>(pool: &[E], max_elems: usize, max_depth: usize) -> Vec<Ctx<E>> {
    let mut memo = HashMap::new();
    let mut out = Vec::new();
    for n in 0..=max_elems {
        out.extend(gen_exact(pool, n, max_depth, &mut memo));
    }
    let mut keyed: Vec<_> = out.into_iter().map(|g| ((g.len(), g.depth()), g)).collect();
    keyed.sort();
    keyed.dedup();
    keyed.into_iter().map(|(_, g)| g).collect()
}

fn gen_exact<E: Clone>(
    pool: &[E],
    n: usize,
    depth: usize,
    memo: &mut HashMap<(usize, usize), Vec<Ctx<E>>>,
) -> Vec<Ctx<E>> {
    if let Some(v) = memo.get(&(n, depth)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Ctx::Empty);
    } else {
        let tails = gen_exact(pool, n - 1, depth, memo);
        for x in pool {
            for t in &tails {
                out.push(Ctx::cons(x.clone(), t.clone()));
            }
        }
    }
    if depth > 0 {
        for i in 0..=n {
            let ls = gen_exact(pool, i, depth - 1, memo);
            let rs = gen_exact(pool, n - i, depth - 1, memo);
            for l in &ls {
                for r in &rs {
                    out.push(Ctx::union(l.clone(), r.clone()));
                }
            }
        }
    }
    memo.insert((n, depth), out.clone());
    out
}

/// Prints contexts in the literal syntax: `nil`, `[a, b]`, `x :: G`,
/// `G1 ++ G2` (with `++` left-associative).
impl<E: fmt::Display> fmt::Display for Ctx<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ctx::Union(l, r) => {
                write_cons_level(l, f)?;
                f.write_str(" ++ ")?;
                if matches!(**r, Ctx::Union(..)) {
                    write!(f, "({r})")
                } else {
                    write_cons_level(r, f)
                }
            }
            other => write_cons_level(other, f),
        }
    }
}

fn write_cons_level<E: fmt::Display>(g: &Ctx<E>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match g {
        Ctx::Empty => f.write_str("nil"),
        Ctx::Union(..) => write!(f, "{g}"),
        Ctx::Cons(..) if g.is_list() => {
            f.write_str("[")?;
            for (i, x) in g.elems().into_iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")
        }
        Ctx::Cons(h, t) => {
            write!(f, "{h} :: ")?;
            match **t {
                Ctx::Union(..) => write!(f, "({t})"),
                _ => write_cons_level(t, f),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(xs: &[char]) -> Ctx<char> {
        Ctx::from_list(xs.to_vec())
    }

    fn u(a: Ctx<char>, b: Ctx<char>) -> Ctx<char> {
        Ctx::union(a, b)
    }

    #[test]
    fn elems_is_in_order() {
        assert!(Ctx::<char>::Empty.elems().is_empty());
        let g = Ctx::cons('a', u(l(&['b']), l(&['c'])));
        assert_eq!(g.elems(), vec![&'a', &'b', &'c']);
    }

    #[test]
    fn member_cases() {
        assert!(l(&['a']).member(&'a'));
        assert!(u(Ctx::Empty, l(&['b', 'a'])).member(&'a'));
        assert!(!Ctx::Empty.member(&'a'));
    }

    #[test]
    fn select_cases() {
        let got = l(&['a']).select(&'a');
        assert_eq!(got, vec![(OccPath(vec![Step::AtHead]), Ctx::Empty)]);

        let g = u(l(&['a']), l(&['a']));
        let residuals: Vec<_> = g.select(&'a').into_iter().map(|(_, r)| r).collect();
        assert_eq!(residuals, vec![u(Ctx::Empty, l(&['a'])), u(l(&['a']), Ctx::Empty)]);
        assert!(l(&['b']).select(&'a').is_empty());
    }

    #[test]
    fn select_paths_resolve_to_the_element() {
        let g = Ctx::cons('a', u(l(&['b', 'a']), Ctx::cons('a', Ctx::Empty)));
        let sel = g.select(&'a');
        assert_eq!(sel.len(), 3);
        let mut paths: Vec<_> = sel.iter().map(|(p, _)| p.clone()).collect();
        for p in &paths {
            assert_eq!(p.resolve(&g), Some(&'a'));
        }
        paths.dedup();
        assert_eq!(paths.len(), 3);
    }

    #[test]
    fn occurrences_agree_with_select() {
        for g in gen_ctxs(&['a', 'b'], 3, 2) {
            let sel = g.select(&'a');
            let occ = g.occurrences(&'a');
            assert_eq!(sel.len(), occ.len());
            for ((p, r), q) in sel.iter().zip(&occ) {
                assert_eq!(p, q);
                assert_eq!(g.remove_at(q).as_ref(), Some(r));
            }
        }
    }

    #[test]
    fn no_elems_cases() {
        assert!(Ctx::<char>::Empty.no_elems());
        assert!(u(Ctx::Empty, u(Ctx::Empty, Ctx::Empty)).no_elems());
        assert!(!l(&['a']).no_elems());
    }

    #[test]
    fn is_list_cases() {
        assert!(l(&['a', 'b']).is_list());
        assert!(!u(Ctx::<char>::Empty, Ctx::Empty).is_list());
        assert!(Ctx::<char>::Empty.is_list());
    }

    #[test]
    fn perm_cases() {
        assert!(perm(&u(l(&['a']), l(&['b'])), &l(&['b', 'a'])));
        assert!(perm(&Ctx::<char>::Empty, &u(Ctx::Empty, Ctx::Empty)));
        assert!(!perm(&l(&['a']), &l(&['a', 'a'])));
    }

    #[test]
    fn perm_rel_cases() {
        assert!(perm_rel(&Ctx::<char>::Empty, &Ctx::Empty));
        assert!(perm_rel(&l(&['a', 'b']), &l(&['b', 'a'])));
        assert!(!perm_rel(&l(&['a']), &Ctx::Empty));
    }

    #[test]
    fn partition_list_cases() {
        let parts = partition_list(&l(&['a', 'b'])).unwrap();
        assert_eq!(
            parts,
            vec![
                (l(&['a', 'b']), l(&[])),
                (l(&['a']), l(&['b'])),
                (l(&['b']), l(&['a'])),
                (l(&[]), l(&['a', 'b'])),
            ]
        );
        assert_eq!(partition_list(&l(&[])).unwrap(), vec![(Ctx::Empty, Ctx::Empty)]);
        assert_eq!(partition_list(&l(&['a', 'b', 'c'])).unwrap().len(), 8);
        assert!(matches!(
            partition_list(&u(l(&['a']), Ctx::Empty)),
            Err(CtxError::NotAList(_))
        ));
    }

    #[test]
    fn splits_cases() {
        let g = u(l(&['a']), l(&['b']));
        let s = splits(&g);
        assert_eq!(s.len(), 4);
        assert!(s.contains(&(l(&['a']), l(&['b']))));
        assert!(s.contains(&(l(&['b']), l(&['a']))));
        assert_eq!(splits(&Ctx::<char>::Empty), vec![(Ctx::Empty, Ctx::Empty)]);
    }

    #[test]
    fn mem_transport_cases() {
        assert_eq!(mem_transport(&'a', &l(&['a']), &u(l(&['a']), Ctx::Empty)), Ok(true));
        assert_eq!(mem_transport(&'b', &l(&['b', 'c']), &u(l(&['c']), l(&['b']))), Ok(true));
        assert!(matches!(
            mem_transport(&'a', &l(&['a']), &l(&['b'])),
            Err(CtxError::Precondition(_))
        ));
        assert!(matches!(
            mem_transport(&'z', &l(&['a']), &l(&['a'])),
            Err(CtxError::Precondition(_))
        ));
    }

    #[test]
    fn sel_transport_cases() {
        let r = sel_transport(&'a', &l(&['a', 'b']), &l(&['b']), &u(l(&['b']), l(&['a']))).unwrap();
        assert_eq!(r, u(l(&['b']), Ctx::Empty));
        assert_eq!(
            sel_transport(&'a', &l(&['a']), &l(&[]), &l(&['a'])).unwrap(),
            Ctx::Empty
        );
        let r = sel_transport(&'a', &l(&['a', 'a']), &l(&['a']), &u(l(&['a']), l(&['a']))).unwrap();
        assert!(perm(&r, &l(&['a'])));
        assert!(matches!(
            sel_transport(&'a', &l(&['a', 'b']), &l(&['a']), &l(&['b', 'a'])),
            Err(CtxError::Precondition(_))
        ));
    }

    #[test]
    fn perm_to_part_cases() {
        // The `a` comes out of G2 and the `b` out of G1.
        let (l1, l2) = perm_to_part(&l(&['a', 'b']), &l(&['b']), &l(&['a'])).unwrap();
        assert_eq!((l1, l2), (l(&['b']), l(&['a'])));

        let (l1, l2) = perm_to_part(&l(&[]), &Ctx::Empty, &u(Ctx::Empty, Ctx::Empty)).unwrap();
        assert_eq!((l1, l2), (Ctx::Empty, Ctx::Empty));

        let (l1, l2) = perm_to_part(&l(&['a', 'a']), &l(&['a']), &l(&['a'])).unwrap();
        assert_eq!((l1, l2), (l(&['a']), l(&['a'])));

        assert!(matches!(
            perm_to_part(&u(l(&['a']), Ctx::Empty), &l(&['a']), &Ctx::Empty),
            Err(CtxError::NotAList(_))
        ));
        assert!(matches!(
            perm_to_part(&l(&['a']), &l(&['b']), &Ctx::Empty),
            Err(CtxError::Precondition(_))
        ));
    }

    #[test]
    fn part_to_perm_cases() {
        assert_eq!(part_to_perm(&l(&['a', 'b']), &l(&['a']), &l(&['b'])), Ok(true));
        assert_eq!(
            part_to_perm(&l(&['a', 'b', 'c']), &l(&['b']), &l(&['a', 'c'])),
            Ok(true)
        );
        assert!(matches!(
            part_to_perm(&l(&['a']), &l(&['a']), &l(&['a'])),
            Err(CtxError::Precondition(_))
        ));
    }

    #[test]
    fn gen_ctxs_small_cases() {
        assert_eq!(gen_ctxs::<char>(&[], 0, 0), vec![Ctx::Empty]);
        assert_eq!(gen_ctxs::<char>(&[], 0, 1), vec![Ctx::Empty, u(Ctx::Empty, Ctx::Empty)]);
        let g = gen_ctxs(&['a'], 1, 1);
        assert!(g.contains(&Ctx::Empty));
        assert!(g.contains(&l(&['a'])));
    }

    /// Independent count: a context is a prefix of elements ending either
    /// in `nil` or in a `++` node whose operands have one less depth.
    fn count_trees(pool: u64, n: usize, d: usize) -> u64 {
        let ends_in_union = |m: usize| -> u64 {
            if d == 0 {
                return 0;
            }
            (0..=m)
                .map(|i| count_trees(pool, i, d - 1) * count_trees(pool, m - i, d - 1))
                .sum()
        };
        let mut total = pool.pow(n as u32);
        for k in 0..=n {
            total += pool.pow(k as u32) * ends_in_union(n - k);
        }
        total
    }

    #[test]
    fn gen_ctxs_count_matches_recurrence() {
        for (p, pool) in [(1u64, vec!['a']), (2, vec!['a', 'b'])] {
            for d in 0..=2 {
                for m in 0..=3 {
                    let expected: u64 = (0..=m).map(|n| count_trees(p, n, d)).sum();
                    assert_eq!(gen_ctxs(&pool, m, d).len() as u64, expected, "p={p} d={d} m={m}");
                }
            }
        }
        assert_eq!(gen_ctxs(&['a'], 2, 2).len(), 91);
    }

    #[test]
    fn gen_ctxs_is_sorted_and_within_bounds() {
        let g = gen_ctxs(&['a', 'b'], 3, 2);
        for w in g.windows(2) {
            let ka = (w[0].len(), w[0].depth(), &w[0]);
            let kb = (w[1].len(), w[1].depth(), &w[1]);
            assert!(ka < kb);
        }
        assert!(g.iter().all(|c| c.len() <= 3 && c.depth() <= 2));
    }

    #[test]
    fn elems_length_is_cons_count() {
        fn cons_nodes(g: &Ctx<char>) -> usize {
            match g {
                Ctx::Empty => 0,
                Ctx::Cons(_, t) => 1 + cons_nodes(t),
                Ctx::Union(l, r) => cons_nodes(l) + cons_nodes(r),
            }
        }
        for g in gen_ctxs(&['a', 'b'], 5, 2) {
            assert_eq!(g.elems().len(), cons_nodes(&g));
        }
    }

    #[test]
    fn display_uses_literal_syntax() {
        assert_eq!(Ctx::<char>::Empty.to_string(), "nil");
        assert_eq!(l(&['a', 'b']).to_string(), "[a, b]");
        assert_eq!(
            Ctx::cons('a', u(l(&['b']), Ctx::Empty)).to_string(),
            "a :: ([b] ++ nil)"
        );
        assert_eq!(
            u(l(&['a']), u(Ctx::Empty, l(&['b']))).to_string(),
            "[a] ++ (nil ++ [b])"
        );
    }
}
