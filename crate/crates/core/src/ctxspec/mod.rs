//! Schematic context relations.
//!
//! A `Context` command lists the shapes a row of related context elements
//! may take. From it we derive a list predicate, a multiset predicate,
//! distributivity statements for each argument position, and a way to
//! carry member-based lemmas from the list view to the multiset view.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::parse::ParseError;
use crate::report::Counterexample;
use crate::syntax::{Name, Ty, TyAssoc, VarAssoc};

pub mod check;
pub mod derive;
pub mod distr;
pub mod gen;
pub mod lemma;
pub mod parse;
pub mod suite;

pub use check::{check_list_pred, check_mset_pred, mset_align, Elaborated};
pub use derive::{DerivationStore, Fact, FactId};
pub use distr::{check_distr, distr_witness, gen_distr_lemma, DistrStmt};
pub use gen::{gen_tuples, Tuple};
pub use lemma::{check_lifted, lift_lemma, verify_lemma, LemmaForm, LemmaStmt};
pub use parse::{parse_lemma, parse_lemma_file, parse_spec, parse_spec_file};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("context {ctx}: clause {clause} has {found} patterns, expected {expected}")]
    ArityMismatch {
        ctx: String,
        clause: usize,
        expected: usize,
        found: usize,
    },
    #[error("unbound variable `{var}` in {place}")]
    UnboundVar { var: String, place: String },
    #[error("context {ctx}: {msg}")]
    BadClause { ctx: String, msg: String },
    #[error("index {index} is out of range for a context relation of arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("expected {expected} contexts, got {found}")]
    WrongTupleSize { expected: usize, found: usize },
    #[error("argument {0} is not a list-form context")]
    NotAList(usize),
    #[error("unknown context relation `{0}`")]
    UnknownContext(String),
    #[error("lemma {lemma}: {msg}")]
    ShapeViolation { lemma: String, msg: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("claim does not hold: {0}")]
    FalseClaim(String),
    #[error("{lemma} fails: {counterexample}")]
    VerificationFailure {
        lemma: String,
        counterexample: Counterexample,
    },
}

/// Context elements: nominal constants and constructor applications.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Nom(Name),
    Con(Arc<str>, Arc<[Val]>),
}

impl Val {
    pub fn con(head: &str, args: Vec<Val>) -> Val {
        Val::Con(Arc::from(head), args.into())
    }

    pub fn constant(head: &str) -> Val {
        Val::Con(Arc::from(head), Arc::from([]))
    }

    pub fn from_ty(t: &Ty) -> Val {
        match t {
            Ty::Base(b) => Val::constant(b),
            Ty::Arrow(a, b) => Val::con("arrow", vec![Val::from_ty(a), Val::from_ty(b)]),
        }
    }

    pub fn ty_of(a: &TyAssoc) -> Val {
        Val::con("ty_of", vec![Val::Nom(a.name.clone()), Val::from_ty(&a.ty)])
    }

    pub fn trans_to(a: &VarAssoc) -> Val {
        Val::con("trans_to", vec![Val::Nom(a.src.clone()), Val::Nom(a.dst.clone())])
    }

    pub fn mentions(&self, n: &Name) -> bool {
        match self {
            Val::Nom(m) => m == n,
            Val::Con(_, args) => args.iter().any(|a| a.mentions(n)),
        }
    }

    pub fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Val::Nom(m) => {
                out.insert(m.clone());
            }
            Val::Con(_, args) => args.iter().for_each(|a| a.collect_names(out)),
        }
    }

    /// This value and all values nested in it.
    pub fn collect_subvalues(&self, out: &mut BTreeSet<Val>) {
        out.insert(self.clone());
        if let Val::Con(_, args) = self {
            args.iter().for_each(|a| a.collect_subvalues(out));
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(self, Val::Nom(_)) || matches!(self, Val::Con(_, a) if a.is_empty())
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Nom(n) => write!(f, "{n}"),
            Val::Con(h, args) => {
                f.write_str(h)?;
                for a in args.iter() {
                    if a.is_atomic() {
                        write!(f, " {a}")?;
                    } else {
                        write!(f, " ({a})")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Terms with variables. Which identifiers count as variables is decided
/// by the surrounding clause or lemma.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pat {
    Var(String),
    Con(String, Vec<Pat>),
}

impl Pat {
    pub fn vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Pat::Var(v) => {
                out.insert(v);
            }
            Pat::Con(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Pat {
        match self {
            Pat::Var(v) => Pat::Var(f(v)),
            Pat::Con(h, args) => Pat::Con(h.clone(), args.iter().map(|a| a.rename(f)).collect()),
        }
    }

    /// The value of the pattern once every variable has one.
    pub fn eval(&self, lookup: &dyn Fn(&str) -> Option<Val>) -> Option<Val> {
        match self {
            Pat::Var(v) => lookup(v),
            Pat::Con(h, args) => {
                let vs = args.iter().map(|a| a.eval(lookup)).collect::<Option<Vec<_>>>()?;
                Some(Val::Con(Arc::from(h.as_str()), vs.into()))
            }
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(self, Pat::Var(_)) || matches!(self, Pat::Con(_, a) if a.is_empty())
    }
}

impl fmt::Display for Pat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pat::Var(v) => f.write_str(v),
            Pat::Con(h, args) => {
                f.write_str(h)?;
                for a in args {
                    if a.is_atomic() {
                        write!(f, " {a}")?;
                    } else {
                        write!(f, " ({a})")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// The decidable fragment of side conditions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SideFormula {
    Truth,
    Eq(Pat, Pat),
    IsName(String),
    Conj(Box<SideFormula>, Box<SideFormula>),
    Disj(Box<SideFormula>, Box<SideFormula>),
}

impl SideFormula {
    pub fn vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            SideFormula::Truth => {}
            SideFormula::Eq(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            SideFormula::IsName(v) => {
                out.insert(v);
            }
            SideFormula::Conj(a, b) | SideFormula::Disj(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> SideFormula {
        match self {
            SideFormula::Truth => SideFormula::Truth,
            SideFormula::Eq(a, b) => SideFormula::Eq(a.rename(f), b.rename(f)),
            SideFormula::IsName(v) => SideFormula::IsName(f(v)),
            SideFormula::Conj(a, b) => SideFormula::Conj(Box::new(a.rename(f)), Box::new(b.rename(f))),
            SideFormula::Disj(a, b) => SideFormula::Disj(Box::new(a.rename(f)), Box::new(b.rename(f))),
        }
    }

    /// `None` when some variable has no value.
    pub fn eval(&self, lookup: &dyn Fn(&str) -> Option<Val>) -> Option<bool> {
        Some(match self {
            SideFormula::Truth => true,
            SideFormula::Eq(a, b) => a.eval(lookup)? == b.eval(lookup)?,
            SideFormula::IsName(v) => matches!(lookup(v)?, Val::Nom(_)),
            SideFormula::Conj(a, b) => a.eval(lookup)? && b.eval(lookup)?,
            SideFormula::Disj(a, b) => a.eval(lookup)? || b.eval(lookup)?,
        })
    }

    fn prec(&self) -> u8 {
        match self {
            SideFormula::Disj(..) => 0,
            SideFormula::Conj(..) => 1,
            _ => 2,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            SideFormula::Truth => f.write_str("true"),
            SideFormula::Eq(a, b) => write!(f, "{a} = {b}"),
            SideFormula::IsName(v) => write!(f, "name {v}"),
            SideFormula::Conj(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str(" /\\ ")?;
                b.fmt_at(f, 1)
            }
            SideFormula::Disj(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(" \\/ ")?;
                b.fmt_at(f, 0)
            }
        }
    }
}

impl fmt::Display for SideFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub nabla_vars: Vec<String>,
    pub patterns: Vec<Pat>,
    pub formula: SideFormula,
}

impl Clause {
    pub fn is_nabla(&self, v: &str) -> bool {
        self.nabla_vars.iter().any(|x| x == v)
    }

    /// Metavariables in order of first occurrence in the patterns.
    pub fn metavars(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for p in &self.patterns {
            let mut ordered = Vec::new();
            first_occurrences(p, &mut ordered);
            for v in ordered {
                if !self.is_nabla(&v) && !seen.contains(&v) {
                    seen.push(v);
                }
            }
        }
        seen
    }
}

fn first_occurrences(p: &Pat, out: &mut Vec<String>) {
    match p {
        Pat::Var(v) => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        Pat::Con(_, args) => args.iter().for_each(|a| first_occurrences(a, out)),
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.nabla_vars.is_empty() {
            write!(f, "nabla {} ", self.nabla_vars.join(" "))?;
        }
        f.write_str("(")?;
        for (i, p) in self.patterns.iter().enumerate() {
            if i > 0 {
                f.write_str(" _|_ ")?;
            }
            write!(f, "{p}")?;
        }
        if self.formula != SideFormula::Truth {
            write!(f, " -| {}", self.formula)?;
        }
        f.write_str(")")
    }
}

/// A context relation of arity `arity` given by its row shapes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextSpec {
    pub name: String,
    pub arity: usize,
    pub clauses: Vec<Clause>,
}

impl ContextSpec {
    /// Checks the well-formedness conditions a parsed command must meet.
    pub fn new(name: &str, clauses: Vec<Clause>) -> Result<ContextSpec, SpecError> {
        let bad = |msg: String| SpecError::BadClause {
            ctx: name.to_string(),
            msg,
        };
        let arity = clauses.first().ok_or_else(|| bad("no clauses".into()))?.patterns.len();
        if arity == 0 {
            return Err(bad("a clause needs at least one pattern".into()));
        }
        for (ci, c) in clauses.iter().enumerate() {
            if c.patterns.len() != arity {
                return Err(SpecError::ArityMismatch {
                    ctx: name.to_string(),
                    clause: ci + 1,
                    expected: arity,
                    found: c.patterns.len(),
                });
            }
            let distinct: BTreeSet<&String> = c.nabla_vars.iter().collect();
            if distinct.len() != c.nabla_vars.len() {
                return Err(bad(format!("clause {} repeats a nabla variable", ci + 1)));
            }
            let mut in_pats = BTreeSet::new();
            c.patterns.iter().for_each(|p| p.vars(&mut in_pats));
            if let Some(v) = c.nabla_vars.iter().find(|v| !in_pats.contains(v.as_str())) {
                return Err(bad(format!("nabla variable `{v}` occurs in no pattern")));
            }
            let mut in_formula = BTreeSet::new();
            c.formula.vars(&mut in_formula);
            if let Some(v) = in_formula.iter().find(|v| !in_pats.contains(*v)) {
                return Err(SpecError::UnboundVar {
                    var: v.to_string(),
                    place: format!("the formula of clause {} of {name}", ci + 1),
                });
            }
        }
        Ok(ContextSpec {
            name: name.to_string(),
            arity,
            clauses,
        })
    }

    /// The name of the derived list predicate.
    pub fn list_name(&self) -> String {
        format!("{}_list", self.name)
    }

    /// Pairs of clauses whose heads can match the same row, which may
    /// break uniqueness-style lemmas.
    pub fn overlap_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..self.clauses.len() {
            for j in i + 1..self.clauses.len() {
                let (a, b) = (&self.clauses[i], &self.clauses[j]);
                if a.patterns.iter().zip(&b.patterns).all(|(p, q)| may_overlap(p, q)) {
                    out.push(format!(
                        "context {}: clauses {} and {} may match the same elements",
                        self.name,
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
        out
    }
}

/// Conservative: ignores repeated variables.
fn may_overlap(p: &Pat, q: &Pat) -> bool {
    match (p, q) {
        (Pat::Var(_), _) | (_, Pat::Var(_)) => true,
        (Pat::Con(h, a), Pat::Con(g, b)) => {
            h == g && a.len() == b.len() && a.iter().zip(b).all(|(x, y)| may_overlap(x, y))
        }
    }
}

impl fmt::Display for ContextSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Context {} with elems as ", self.name)?;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" \\/ ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(".")
    }
}

/// How nabla variables are read in clause heads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOpts {
    /// Nabla variables stand for distinct names absent from the
    /// metavariable values and from the rest of the contexts. Turning this
    /// off only asks that they be names.
    pub nabla_fresh: bool,
}

impl Default for CheckOpts {
    fn default() -> Self {
        CheckOpts { nabla_fresh: true }
    }
}

/// The typing-context command.
pub const TY_CTX_COMMAND: &str = "Context ty_ctx' with elems as nabla x (ty_of x T).";

/// The translation-relation command, with one type shared by both sides.
pub const TRANS_REL_COMMAND: &str =
    "Context trans_rel with elems as nabla x y (ty_of x T _|_ trans_to x y _|_ ty_of y T).";

pub fn ty_ctx_spec() -> ContextSpec {
    parse_spec(TY_CTX_COMMAND).expect("built-in command parses")
}

pub fn trans_rel_spec() -> ContextSpec {
    parse_spec(TRANS_REL_COMMAND).expect("built-in command parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn val_display_parenthesizes_compound_arguments() {
        let v = Val::ty_of(&TyAssoc::new(Name::new("n0"), Ty::arrow(Ty::base("i"), Ty::base("o"))));
        assert_eq!(v.to_string(), "ty_of n0 (arrow i o)");
    }

    #[test]
    fn formula_display_round_trips_precedence() {
        let f = parse::parse_formula_str("(name X \\/ X = i) /\\ true", &["X"]).unwrap();
        assert_eq!(f.to_string(), "(name X \\/ X = i) /\\ true");
    }

    #[test]
    fn overlap_is_flagged() {
        let s = parse_spec("Context c with elems as nabla x (p x T) \\/ nabla y (p y i).").unwrap();
        assert_eq!(s.overlap_warnings().len(), 1);
        assert!(ty_ctx_spec().overlap_warnings().is_empty());
    }
}
