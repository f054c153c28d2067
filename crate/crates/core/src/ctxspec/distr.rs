//! Distributivity of a context relation over a split of one argument.

use std::fmt;

use super::check::Elaborated;
use super::gen::{columns, gen_tuples, reversed_union, Tuple};
use super::{ContextSpec, SpecError, Val};
use crate::ctx::{part_to_perm, perm, perm_to_part, positions, split_by, splits, Ctx};
use crate::gen::{arrangements, GenBounds};
use crate::report::{check_all, check_seq, CheckReport, Counterexample, Outcome};

/// Halves of a split are arranged up to this union depth.
pub const DISTR_HALF_DEPTH: usize = 1;

/// `forall .., CTX G1 .. Gn -> Gi ~ Gi' ++ Gi'' -> exists .., CTX G1' .. Gn'
/// /\ CTX G1'' .. Gn'' /\ Gj ~ Gj' ++ Gj''` for every `j` other than `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistrStmt {
    pub spec: String,
    pub arity: usize,
    /// Counted from 1.
    pub index: usize,
}

impl DistrStmt {
    pub fn name(&self) -> String {
        format!("{}_distr{}", self.spec, self.index)
    }

    fn ctx(&self, j: usize, primes: &str) -> String {
        if self.arity == 1 {
            format!("G{primes}")
        } else {
            format!("G{j}{primes}")
        }
    }

    fn pred(&self, primes: &str) -> String {
        let args: Vec<String> = (1..=self.arity).map(|j| self.ctx(j, primes)).collect();
        format!("{} {}", self.spec, args.join(" "))
    }

    fn split(&self, j: usize) -> String {
        format!("{} ~ {} ++ {}", self.ctx(j, ""), self.ctx(j, "'"), self.ctx(j, "''"))
    }

    /// Context indices other than the split one.
    pub fn others(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.arity).filter(move |&j| j != self.index)
    }
}

impl fmt::Display for DistrStmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut vars = Vec::new();
        for j in 1..=self.arity {
            vars.push(self.ctx(j, ""));
            if j == self.index {
                vars.push(self.ctx(j, "'"));
                vars.push(self.ctx(j, "''"));
            }
        }
        write!(
            f,
            "Theorem {} : forall {}, {} -> {} -> ",
            self.name(),
            vars.join(" "),
            self.pred(""),
            self.split(self.index)
        )?;
        let witnesses: Vec<String> = self
            .others()
            .flat_map(|j| [self.ctx(j, "'"), self.ctx(j, "''")])
            .collect();
        if !witnesses.is_empty() {
            write!(f, "exists {}, ", witnesses.join(" "))?;
        }
        write!(f, "{} /\\ {}", self.pred("'"), self.pred("''"))?;
        for j in self.others() {
            write!(f, " /\\ {}", self.split(j))?;
        }
        f.write_str(".")
    }
}

pub fn gen_distr_lemma(spec: &ContextSpec, index: usize) -> Result<DistrStmt, SpecError> {
    if index == 0 || index > spec.arity {
        return Err(SpecError::IndexOutOfRange {
            index,
            arity: spec.arity,
        });
    }
    Ok(DistrStmt {
        spec: spec.name.clone(),
        arity: spec.arity,
        index,
    })
}

/// The primed and double-primed arguments.
pub type Witnesses = (Vec<Ctx<Val>>, Vec<Ctx<Val>>);

/// The witnesses for one instance: unfold to lists, turn the split of
/// argument `index` into an ordered partition of its list, cut every other
/// list at the same positions, and read the pieces back as contexts.
pub fn distr_witness(
    e: &Elaborated<'_>,
    gs: &[Ctx<Val>],
    index: usize,
    left: &Ctx<Val>,
    right: &Ctx<Val>,
) -> Result<Option<Witnesses>, SpecError> {
    let i = index - 1;
    let Some(ls) = e.align(gs)? else { return Ok(None) };
    let Ok((pl, _)) = perm_to_part(&ls[i], left, right) else {
        return Ok(None);
    };
    let mask = positions(&ls[i].elems(), &pl.elems());
    let mut ws = (Vec::new(), Vec::new());
    for (j, l) in ls.iter().enumerate() {
        let (a, b) = if j == i {
            (left.clone(), right.clone())
        } else {
            let (a, b) = split_by(l, &mask);
            if part_to_perm(l, &a, &b) != Ok(true) {
                return Ok(None);
            }
            (a, b)
        };
        ws.0.push(a);
        ws.1.push(b);
    }
    Ok(Some(ws))
}

fn conclusion_holds(e: &Elaborated<'_>, gs: &[Ctx<Val>], index: usize, ws: &Witnesses) -> bool {
    let split_ok = (0..gs.len())
        .filter(|&j| j + 1 != index)
        .all(|j| perm(&gs[j], &Ctx::union(ws.0[j].clone(), ws.1[j].clone())));
    split_ok && e.check_mset(&ws.0).unwrap_or(false) && e.check_mset(&ws.1).unwrap_or(false)
}

fn show(stmt: &DistrStmt, gs: &[Ctx<Val>], left: &Ctx<Val>, right: &Ctx<Val>) -> Counterexample {
    let mut cex = Counterexample::new();
    for (j, g) in gs.iter().enumerate() {
        cex = cex.with(&stmt.ctx(j + 1, ""), g);
    }
    cex.with(&stmt.ctx(stmt.index, "'"), left)
        .with(&stmt.ctx(stmt.index, "''"), right)
}

/// Runs the witness pipeline on every generated tuple, laid out as lists
/// and as a reversed union, over every split of argument `index` with each
/// half arranged in every way.
pub fn check_distr(e: &Elaborated<'_>, index: usize, b: &GenBounds) -> Result<CheckReport, SpecError> {
    let stmt = gen_distr_lemma(e.spec, index)?;
    let tuples = gen_tuples(e, b);
    let depth = DISTR_HALF_DEPTH.min(b.union_depth);
    Ok(CheckReport::run(&stmt.name(), || {
        check_all(&tuples, |t: &Tuple| {
            let arity = e.spec.arity;
            check_seq([columns(t, arity), reversed_union(t, arity)], |gs| {
                check_seq(splits(&gs[index - 1]), |(a, c)| {
                    let a: Vec<Val> = a.elems().into_iter().cloned().collect();
                    let c: Vec<Val> = c.elems().into_iter().cloned().collect();
                    let rights = arrangements(&c, depth);
                    check_seq(arrangements(&a, depth), |left| {
                        check_seq(rights.iter(), |right| {
                            let ok = matches!(
                                distr_witness(e, &gs, index, &left, right),
                                Ok(Some(ws)) if conclusion_holds(e, &gs, index, &ws)
                            );
                            Outcome::check(ok, || show(&stmt, &gs, &left, right))
                        })
                    })
                })
            })
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctxspec::{trans_rel_spec, ty_ctx_spec, CheckOpts};

    #[test]
    fn second_translation_statement() {
        let s = gen_distr_lemma(&trans_rel_spec(), 2).unwrap();
        let expected = "Theorem trans_rel_distr2 : forall G1 G2 G2' G2'' G3, \
            trans_rel G1 G2 G3 -> G2 ~ G2' ++ G2'' -> exists G1' G1'' G3' G3'', \
            trans_rel G1' G2' G3' /\\ trans_rel G1'' G2'' G3'' /\\ \
            G1 ~ G1' ++ G1'' /\\ G3 ~ G3' ++ G3''.";
        assert_eq!(s.to_string(), expected);
    }

    #[test]
    fn unary_statement_has_no_witnesses() {
        let s = gen_distr_lemma(&ty_ctx_spec(), 1).unwrap();
        assert_eq!(
            s.to_string(),
            "Theorem ty_ctx'_distr1 : forall G G' G'', ty_ctx' G -> G ~ G' ++ G'' -> ty_ctx' G' /\\ ty_ctx' G''."
        );
    }

    #[test]
    fn index_is_checked() {
        let s = ty_ctx_spec();
        assert!(matches!(
            gen_distr_lemma(&s, 0),
            Err(SpecError::IndexOutOfRange { index: 0, arity: 1 })
        ));
        assert!(gen_distr_lemma(&s, 2).is_err());
    }

    #[test]
    fn every_index_distributes_at_small_bounds() {
        let b = GenBounds {
            ctx_elems: 2,
            ..GenBounds::default()
        };
        for spec in [ty_ctx_spec(), trans_rel_spec()] {
            let e = Elaborated::new(&spec, CheckOpts::default());
            for i in 1..=spec.arity {
                let r = check_distr(&e, i, &b).unwrap();
                assert!(r.passed() && r.cases > 0, "{}", r.text_line(false));
            }
        }
    }
}
