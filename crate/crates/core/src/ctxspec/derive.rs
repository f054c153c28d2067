//! A store of checked facts and the steps that extend it.

use std::collections::BTreeMap;
use std::fmt;

use super::check::Elaborated;
use super::distr::distr_witness;
use super::lemma::{check_lifted, lift_lemma, verify_lemma, LemmaStmt};
use super::{CheckOpts, ContextSpec, SpecError, Val};
use crate::ctx::{mem_transport, perm, Ctx};
use crate::gen::GenBounds;
use crate::report::CheckReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fact {
    /// `G ~ G'`.
    Perm(Ctx<Val>, Ctx<Val>),
    /// `member X G`.
    Member(Val, Ctx<Val>),
    /// `CTX G1 .. Gn`.
    Holds(String, Vec<Ctx<Val>>),
    /// A lemma verified at the store's bounds.
    Lemma(LemmaStmt),
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Perm(a, b) => write!(f, "{a} ~ {b}"),
            Fact::Member(x, g) => write!(f, "member ({x}) ({g})"),
            Fact::Holds(name, gs) => {
                f.write_str(name)?;
                for g in gs {
                    write!(f, " ({g})")?;
                }
                Ok(())
            }
            Fact::Lemma(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FactId(pub usize);

/// Facts are appended only after they have been checked.
#[derive(Debug, Clone)]
pub struct DerivationStore {
    specs: BTreeMap<String, ContextSpec>,
    bounds: GenBounds,
    opts: CheckOpts,
    facts: Vec<Fact>,
    /// Reports of the verifications behind each lemma fact.
    pub reports: Vec<CheckReport>,
}

impl DerivationStore {
    pub fn new(specs: impl IntoIterator<Item = ContextSpec>, bounds: GenBounds) -> DerivationStore {
        DerivationStore {
            specs: specs.into_iter().map(|s| (s.name.clone(), s)).collect(),
            bounds,
            opts: CheckOpts::default(),
            facts: Vec::new(),
            reports: Vec::new(),
        }
    }

    pub fn fact(&self, id: FactId) -> &Fact {
        &self.facts[id.0]
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    fn spec(&self, name: &str) -> Result<&ContextSpec, SpecError> {
        self.specs
            .get(name)
            .ok_or_else(|| SpecError::UnknownContext(name.to_string()))
    }

    fn push(&mut self, f: Fact) -> FactId {
        self.facts.push(f);
        FactId(self.facts.len() - 1)
    }

    fn get(&self, id: FactId) -> Result<&Fact, SpecError> {
        self.facts
            .get(id.0)
            .ok_or_else(|| SpecError::ShapeMismatch(format!("no fact #{}", id.0)))
    }

    /// Adds a claim after checking it directly.
    pub fn assume(&mut self, f: Fact) -> Result<FactId, SpecError> {
        let holds = match &f {
            Fact::Perm(a, b) => perm(a, b),
            Fact::Member(x, g) => g.member(x),
            Fact::Holds(name, gs) => Elaborated::new(self.spec(name)?, self.opts).check_mset(gs)?,
            Fact::Lemma(l) => {
                return Err(SpecError::ShapeMismatch(format!(
                    "lemma {} must be added with derive_lift",
                    l.name
                )))
            }
        };
        if !holds {
            return Err(SpecError::FalseClaim(f.to_string()));
        }
        Ok(self.push(f))
    }

    /// `G ~ G'` and `member X G` give `member X G'` (either direction).
    pub fn derive_subst(&mut self, perm_fact: FactId, member_fact: FactId) -> Result<FactId, SpecError> {
        let (Fact::Perm(a, b), Fact::Member(x, g)) = (self.get(perm_fact)?, self.get(member_fact)?) else {
            return Err(SpecError::ShapeMismatch(
                "subst needs a permutation and a membership".into(),
            ));
        };
        let target = if g == a {
            b
        } else if g == b {
            a
        } else {
            return Err(SpecError::ShapeMismatch(format!("{g} is not a side of {a} ~ {b}")));
        };
        match mem_transport(x, g, target) {
            Ok(true) => {
                let f = Fact::Member(x.clone(), target.clone());
                Ok(self.push(f))
            }
            _ => Err(SpecError::ShapeMismatch("membership does not transport".into())),
        }
    }

    /// `CTX G1 .. Gn` and `Gi ~ Gi' ++ Gi''` give both halves of the
    /// relation and a split of every other argument.
    pub fn derive_distr(&mut self, ctx_fact: FactId, split_fact: FactId) -> Result<Vec<FactId>, SpecError> {
        let (Fact::Holds(name, gs), Fact::Perm(g, Ctx::Union(left, right))) =
            (self.get(ctx_fact)?, self.get(split_fact)?)
        else {
            return Err(SpecError::ShapeMismatch(
                "distr needs a relation fact and a split `G ~ G' ++ G''`".into(),
            ));
        };
        let index = gs
            .iter()
            .position(|x| x == g)
            .ok_or_else(|| SpecError::ShapeMismatch(format!("{g} is not an argument of {name}")))?
            + 1;
        let (name, gs) = (name.clone(), gs.clone());
        let (left, right) = ((**left).clone(), (**right).clone());
        let e = Elaborated::new(self.spec(&name)?, self.opts);
        let (ws_l, ws_r) = distr_witness(&e, &gs, index, &left, &right)?
            .ok_or_else(|| SpecError::ShapeMismatch("no witnesses for the split".into()))?;
        let mut out = vec![
            self.push(Fact::Holds(name.clone(), ws_l.clone())),
            self.push(Fact::Holds(name, ws_r.clone())),
        ];
        for j in (0..gs.len()).filter(|&j| j + 1 != index) {
            out.push(self.push(Fact::Perm(gs[j].clone(), Ctx::union(ws_l[j].clone(), ws_r[j].clone()))));
        }
        Ok(out)
    }

    /// Verifies a list-form lemma, lifts it, verifies the lifted statement
    /// directly and through the transport procedure, and records it.
    pub fn derive_lift(&mut self, spec: &str, stmt: &LemmaStmt) -> Result<FactId, SpecError> {
        let s = self.spec(spec)?.clone();
        let e = Elaborated::new(&s, self.opts);
        let lifted = lift_lemma(&s, stmt)?;
        let reports = [
            verify_lemma(&e, stmt, &self.bounds)?,
            verify_lemma(&e, &lifted, &self.bounds)?,
            check_lifted(&e, stmt, &self.bounds)?,
        ];
        if let Some(bad) = reports.iter().find(|r| !r.passed()) {
            return Err(SpecError::VerificationFailure {
                lemma: bad.name.clone(),
                counterexample: bad.counterexample.clone().unwrap_or_default(),
            });
        }
        self.reports.extend(reports);
        Ok(self.push(Fact::Lemma(lifted)))
    }
}
