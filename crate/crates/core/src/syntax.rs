//! Simple types and locally nameless lambda/let terms.
//!
//! Bound variables are de Bruijn indices; free variables are [`Name`]s,
//! the nominal constants introduced when descending under a binder.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("malformed term: {0}")]
    Malformed(String),
}

/// A nominal constant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(ident: &str) -> Name {
        Name(Arc::from(ident))
    }

    /// `stem` followed by `index`, e.g. `n3`.
    pub fn indexed(stem: &str, index: usize) -> Name {
        Name(Arc::from(format!("{stem}{index}")))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The trailing decimal index, if the identifier has one.
    pub fn index(&self) -> Option<usize> {
        let digits = self.0.len() - self.0.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        if digits == 0 {
            None
        } else {
            self.0[self.0.len() - digits..].parse().ok()
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The first `n<k>` not in `avoid`.
pub fn fresh(avoid: &BTreeSet<Name>) -> Name {
    let taken: BTreeSet<usize> = avoid.iter().filter_map(|n| canonical_index(&n.0, "n")).collect();
    let k = (0..).find(|k| !taken.contains(k)).expect("unbounded supply of names");
    Name::indexed("n", k)
}

/// Hands out `n{k}` names with `k` above every index seen so far, so each
/// is fresh for the names it was built from and for every earlier one.
#[derive(Debug, Clone, Default)]
pub struct NameSupply {
    next: usize,
}

impl NameSupply {
    pub fn avoiding<'a>(names: impl IntoIterator<Item = &'a Name>) -> NameSupply {
        let mut s = NameSupply::default();
        for n in names {
            s.avoid(n);
        }
        s
    }

    pub fn avoid(&mut self, n: &Name) {
        if let Some(k) = canonical_index(&n.0, "n") {
            self.next = self.next.max(k + 1);
        }
    }

    pub fn fresh(&mut self) -> Name {
        let n = Name::indexed("n", self.next);
        self.next += 1;
        n
    }
}

/// `k` when `ident` is exactly `Name::indexed(stem, k)`.
fn canonical_index(ident: &str, stem: &str) -> Option<usize> {
    let digits = ident.strip_prefix(stem)?;
    let canonical =
        !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit()) && (digits == "0" || !digits.starts_with('0'));
    if canonical {
        digits.parse().ok()
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    Base(Arc<str>),
    Arrow(Arc<Ty>, Arc<Ty>),
}

impl Ty {
    pub fn base(label: &str) -> Ty {
        Ty::Base(Arc::from(label))
    }

    pub fn arrow(dom: Ty, cod: Ty) -> Ty {
        Ty::Arrow(Arc::new(dom), Arc::new(cod))
    }

    /// Base types have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Ty::Base(_) => 1,
            Ty::Arrow(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Base(l) => f.write_str(l),
            Ty::Arrow(a, b) => match **a {
                Ty::Arrow(..) => write!(f, "({a}) -> {b}"),
                Ty::Base(_) => write!(f, "{a} -> {b}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tm {
    Free(Name),
    Bound(usize),
    App(Box<Tm>, Box<Tm>),
    Abs(Ty, Box<Tm>),
    Let(Ty, Box<Tm>, Box<Tm>),
}

impl Tm {
    pub fn free(n: &Name) -> Tm {
        Tm::Free(n.clone())
    }

    pub fn app(m: Tm, n: Tm) -> Tm {
        Tm::App(Box::new(m), Box::new(n))
    }

    pub fn abs(ty: Ty, body: Tm) -> Tm {
        Tm::Abs(ty, Box::new(body))
    }

    pub fn let_(ty: Ty, val: Tm, body: Tm) -> Tm {
        Tm::Let(ty, Box::new(val), Box::new(body))
    }

    /// Constructor count.
    pub fn size(&self) -> usize {
        match self {
            Tm::Free(_) | Tm::Bound(_) => 1,
            Tm::App(m, n) => 1 + m.size() + n.size(),
            Tm::Abs(_, b) => 1 + b.size(),
            Tm::Let(_, v, b) => 1 + v.size() + b.size(),
        }
    }

    /// Every `Bound(i)` sits under more than `i - depth` binders.
    pub fn is_closed_at(&self, depth: usize) -> bool {
        match self {
            Tm::Free(_) => true,
            Tm::Bound(i) => *i < depth,
            Tm::App(m, n) => m.is_closed_at(depth) && n.is_closed_at(depth),
            Tm::Abs(_, b) => b.is_closed_at(depth + 1),
            Tm::Let(_, v, b) => v.is_closed_at(depth) && b.is_closed_at(depth + 1),
        }
    }

    pub fn is_locally_closed(&self) -> bool {
        self.is_closed_at(0)
    }

    pub fn has_let(&self) -> bool {
        match self {
            Tm::Free(_) | Tm::Bound(_) => false,
            Tm::App(m, n) => m.has_let() || n.has_let(),
            Tm::Abs(_, b) => b.has_let(),
            Tm::Let(..) => true,
        }
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        self.each_free(&mut |n| {
            out.insert(n.clone());
        });
    }

    /// Visits every free occurrence, left to right.
    pub fn each_free<'a>(&'a self, f: &mut dyn FnMut(&'a Name)) {
        match self {
            Tm::Free(n) => f(n),
            Tm::Bound(_) => {}
            Tm::App(m, n) => {
                m.each_free(f);
                n.each_free(f);
            }
            Tm::Abs(_, b) => b.each_free(f),
            Tm::Let(_, v, b) => {
                v.each_free(f);
                b.each_free(f);
            }
        }
    }

    /// Occurrences of the free name `n`.
    pub fn count_free(&self, n: &Name) -> usize {
        match self {
            Tm::Free(m) => usize::from(m == n),
            Tm::Bound(_) => 0,
            Tm::App(a, b) => a.count_free(n) + b.count_free(n),
            Tm::Abs(_, b) => b.count_free(n),
            Tm::Let(_, v, b) => v.count_free(n) + b.count_free(n),
        }
    }

    /// Occurrences of the variable bound `depth` binders above this term.
    pub fn count_bound(&self, depth: usize) -> usize {
        match self {
            Tm::Free(_) => 0,
            Tm::Bound(i) => usize::from(*i == depth),
            Tm::App(a, b) => a.count_bound(depth) + b.count_bound(depth),
            Tm::Abs(_, b) => b.count_bound(depth + 1),
            Tm::Let(_, v, b) => v.count_bound(depth) + b.count_bound(depth + 1),
        }
    }

    fn open_at(&self, k: usize, n: &Name) -> Tm {
        match self {
            Tm::Free(m) => Tm::Free(m.clone()),
            Tm::Bound(i) if *i == k => Tm::Free(n.clone()),
            Tm::Bound(i) if *i > k => Tm::Bound(i - 1),
            Tm::Bound(i) => Tm::Bound(*i),
            Tm::App(a, b) => Tm::app(a.open_at(k, n), b.open_at(k, n)),
            Tm::Abs(t, b) => Tm::abs(t.clone(), b.open_at(k + 1, n)),
            Tm::Let(t, v, b) => Tm::let_(t.clone(), v.open_at(k, n), b.open_at(k + 1, n)),
        }
    }

    fn close_at(&self, k: usize, n: &Name) -> Tm {
        match self {
            Tm::Free(m) if m == n => Tm::Bound(k),
            Tm::Free(m) => Tm::Free(m.clone()),
            Tm::Bound(i) if *i >= k => Tm::Bound(i + 1),
            Tm::Bound(i) => Tm::Bound(*i),
            Tm::App(a, b) => Tm::app(a.close_at(k, n), b.close_at(k, n)),
            Tm::Abs(t, b) => Tm::abs(t.clone(), b.close_at(k + 1, n)),
            Tm::Let(t, v, b) => Tm::let_(t.clone(), v.close_at(k, n), b.close_at(k + 1, n)),
        }
    }
}

/// Instantiates the outermost bound variable of a binder body with `n`.
pub fn open(body: &Tm, n: &Name) -> Result<Tm, SyntaxError> {
    if !body.is_closed_at(1) {
        return Err(SyntaxError::Malformed(format!(
            "binder body is not locally closed at depth 1: {body:?}"
        )));
    }
    Ok(body.open_at(0, n))
}

/// Inverse of [`open`]: abstracts `n` into index 0 of a binder body.
pub fn close(t: &Tm, n: &Name) -> Tm {
    t.close_at(0, n)
}

/// `ty_of x T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TyAssoc {
    pub name: Name,
    pub ty: Ty,
}

impl TyAssoc {
    pub fn new(name: Name, ty: Ty) -> TyAssoc {
        TyAssoc { name, ty }
    }
}

impl fmt::Display for TyAssoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ty {
            Ty::Base(_) => write!(f, "ty_of {} {}", self.name, self.ty),
            Ty::Arrow(..) => write!(f, "ty_of {} ({})", self.name, self.ty),
        }
    }
}

/// `trans_to x y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarAssoc {
    pub src: Name,
    pub dst: Name,
}

impl VarAssoc {
    pub fn new(src: Name, dst: Name) -> VarAssoc {
        VarAssoc { src, dst }
    }
}

impl fmt::Display for VarAssoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "trans_to {} {}", self.src, self.dst)
    }
}

const BINDER_STEMS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

fn binder_name(k: usize) -> String {
    let stem = BINDER_STEMS[k % BINDER_STEMS.len()];
    match k / BINDER_STEMS.len() {
        0 => stem.to_string(),
        r => format!("{stem}{r}"),
    }
}

/// Renders a term in the surface syntax, inventing binder names that do
/// not clash with the term's free names or with enclosing binders.
pub fn print_term(t: &Tm) -> String {
    let free: BTreeSet<String> = t.free_names().iter().map(|n| n.to_string()).collect();
    let mut out = String::new();
    let mut scope = Vec::new();
    write_term(t, &free, &mut scope, false, &mut out);
    out
}

fn pick_binder(free: &BTreeSet<String>, scope: &[String]) -> String {
    (0..)
        .map(binder_name)
        .find(|c| !free.contains(c) && !scope.contains(c))
        .expect("unbounded supply of binder names")
}

fn write_ty_atom(ty: &Ty, out: &mut String) {
    match ty {
        Ty::Base(l) => out.push_str(l),
        Ty::Arrow(..) => {
            out.push('(');
            out.push_str(&ty.to_string());
            out.push(')');
        }
    }
}

fn write_term(t: &Tm, free: &BTreeSet<String>, scope: &mut Vec<String>, atom: bool, out: &mut String) {
    let compound = matches!(t, Tm::App(..) | Tm::Abs(..) | Tm::Let(..));
    if atom && compound {
        out.push('(');
    }
    match t {
        Tm::Free(n) => out.push_str(n.as_str()),
        Tm::Bound(i) => match scope.len().checked_sub(i + 1) {
            Some(pos) => out.push_str(&scope[pos]),
            None => out.push_str(&format!("#{i}")),
        },
        Tm::App(m, n) => {
            out.push_str("app ");
            write_term(m, free, scope, true, out);
            out.push(' ');
            write_term(n, free, scope, true, out);
        }
        Tm::Abs(ty, body) => {
            out.push_str("abs ");
            write_ty_atom(ty, out);
            write_binder(body, free, scope, out);
        }
        Tm::Let(ty, val, body) => {
            out.push_str("let ");
            write_ty_atom(ty, out);
            out.push(' ');
            write_term(val, free, scope, true, out);
            write_binder(body, free, scope, out);
        }
    }
    if atom && compound {
        out.push(')');
    }
}

fn write_binder(body: &Tm, free: &BTreeSet<String>, scope: &mut Vec<String>, out: &mut String) {
    let x = pick_binder(free, scope);
    out.push_str(" (");
    out.push_str(&x);
    out.push_str("\\ ");
    scope.push(x);
    write_term(body, free, scope, false, out);
    scope.pop();
    out.push(')');
}

impl fmt::Display for Tm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    fn tau() -> Ty {
        Ty::base("i")
    }

    #[test]
    fn open_cases() {
        assert_eq!(open(&Tm::Bound(0), &n("n1")).unwrap(), Tm::free(&n("n1")));
        assert_eq!(
            open(&Tm::app(Tm::Bound(0), Tm::free(&n("n2"))), &n("n1")).unwrap(),
            Tm::app(Tm::free(&n("n1")), Tm::free(&n("n2")))
        );
        assert_eq!(
            open(&Tm::abs(tau(), Tm::Bound(1)), &n("n1")).unwrap(),
            Tm::abs(tau(), Tm::free(&n("n1")))
        );
        assert!(matches!(open(&Tm::Bound(1), &n("n1")), Err(SyntaxError::Malformed(_))));
    }

    #[test]
    fn fresh_cases() {
        assert_eq!(fresh(&BTreeSet::new()), n("n0"));
        assert_eq!(fresh(&[n("n0")].into_iter().collect()), n("n1"));
        assert_eq!(fresh(&[n("n1")].into_iter().collect()), n("n0"));
        assert_eq!(fresh(&[n("n0"), n("n01"), n("m1")].into_iter().collect()), n("n1"));
    }

    #[test]
    fn supply_avoids_its_sources() {
        let mut s = NameSupply::avoiding(&[n("n2"), n("x"), n("n01")]);
        assert_eq!(s.fresh(), n("n3"));
        assert_eq!(s.fresh(), n("n4"));
    }

    #[test]
    fn fresh_chain_is_injective() {
        let mut avoid = BTreeSet::new();
        let mut seen = Vec::new();
        for _ in 0..50 {
            let x = fresh(&avoid);
            assert!(!seen.contains(&x));
            seen.push(x.clone());
            avoid.insert(x);
        }
    }

    #[test]
    fn free_names_cases() {
        assert!(Tm::abs(tau(), Tm::Bound(0)).free_names().is_empty());
        let t = Tm::app(Tm::free(&n("n1")), Tm::free(&n("n1")));
        assert_eq!(t.free_names(), [n("n1")].into_iter().collect());
    }

    #[test]
    fn close_inverts_open() {
        let body = Tm::app(Tm::Bound(0), Tm::abs(tau(), Tm::app(Tm::Bound(1), Tm::Bound(0))));
        let x = n("n9");
        assert_eq!(close(&open(&body, &x).unwrap(), &x), body);
    }

    #[test]
    fn name_index() {
        assert_eq!(n("n12").index(), Some(12));
        assert_eq!(n("x").index(), None);
    }

    #[test]
    fn printing() {
        let t = Tm::abs(
            Ty::arrow(tau(), tau()),
            Tm::abs(tau(), Tm::app(Tm::Bound(1), Tm::Bound(0))),
        );
        assert_eq!(print_term(&t), "abs (i -> i) (x\\ abs i (y\\ app x y))");
        let shadow = Tm::abs(tau(), Tm::free(&n("x")));
        assert_eq!(print_term(&shadow), "abs i (y\\ x)");
        let l = Tm::let_(tau(), Tm::free(&n("n0")), Tm::Bound(0));
        assert_eq!(print_term(&l), "let i n0 (x\\ x)");
        assert_eq!(Ty::arrow(Ty::arrow(tau(), tau()), tau()).to_string(), "(i -> i) -> i");
    }
}
