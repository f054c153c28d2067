//! The acceptance criteria, one PASS/FAIL line each.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use ctxlift_core::ctx::lemmas::core_lemma_suite;
use ctxlift_core::ctx::Ctx;
use ctxlift_core::ctxspec::suite::{engine_reports, fidelity_reports};
use ctxlift_core::ctxspec::{
    lift_lemma, parse_lemma, parse_lemma_file, parse_spec_file, verify_lemma, CheckOpts, Elaborated, LemmaStmt,
};
use ctxlift_core::gen::GenBounds;
use ctxlift_core::parse::{parse_open_term, parse_ty};
use ctxlift_core::report::CheckReport;
use ctxlift_core::translation::lemmas::translation_lemma_suite;
use ctxlift_core::typing::lemmas::{oracle_equivalence, typing_lemma_suite_with};
use ctxlift_core::typing::{ltype_infer, ltype_rel, ty_ctx_list, type_of_infer, type_of_rel};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

fn read(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap()
}

struct Verdict {
    ok: bool,
    detail: String,
}

/// Every named report is present and passed, and the whole run stayed
/// within `limit`.
fn reports_pass(reports: &[CheckReport], names: &[&str], elapsed: Duration, limit: Duration) -> Verdict {
    let mut problems = Vec::new();
    for n in names {
        match reports.iter().find(|r| r.name == *n) {
            None => problems.push(format!("{n} missing")),
            Some(r) if !r.passed() || r.cases == 0 => problems.push(r.text_line(false)),
            Some(_) => {}
        }
    }
    problems.extend(reports.iter().filter(|r| !r.passed()).map(|r| r.text_line(false)));
    if elapsed > limit {
        problems.push(format!("took {elapsed:?}, limit {limit:?}"));
    }
    let cases: u64 = reports.iter().map(|r| r.cases).sum();
    Verdict {
        ok: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "{} reports, {cases} cases, {:.1} s",
                reports.len(),
                elapsed.as_secs_f64()
            )
        } else {
            problems.join("; ")
        },
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn worked_examples() -> Verdict {
    let (checks, elapsed) = timed(|| {
        let app = parse_open_term("abs (i -> o) (x\\ abs i (y\\ app x y))").unwrap();
        let twice = parse_open_term("abs (i -> i -> o) (x\\ abs i (y\\ app (app x y) y))").unwrap();
        let unused = parse_open_term("abs i (x\\ abs o (y\\ y))").unwrap();
        let t = parse_ty("(i -> o) -> i -> o").unwrap();
        let t_twice = parse_ty("(i -> i -> o) -> i -> o").unwrap();
        let t_unused = parse_ty("i -> o -> o").unwrap();
        let nil = Ctx::Empty;
        [
            (
                "intuitionistic accepts",
                type_of_infer(&nil, &app) == Some(t.clone()) && type_of_rel(&nil, &app, &t),
            ),
            (
                "linear accepts",
                ltype_infer(&nil, &app) == Some(t.clone()) && ltype_rel(&nil, &app, &t),
            ),
            (
                "linear rejects the duplicate",
                ltype_infer(&nil, &twice).is_none() && !ltype_rel(&nil, &twice, &t_twice),
            ),
            (
                "linear rejects the unused",
                ltype_infer(&nil, &unused).is_none() && !ltype_rel(&nil, &unused, &t_unused),
            ),
            (
                "intuitionistic accepts the duplicate",
                type_of_rel(&nil, &twice, &t_twice),
            ),
        ]
    });
    let wrong: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let fast = elapsed < Duration::from_secs(1);
    Verdict {
        ok: wrong.is_empty() && fast,
        detail: if wrong.is_empty() {
            format!("5 verdicts match, {} ms", elapsed.as_millis())
        } else {
            format!("mismatched: {}", wrong.join(", "))
        },
    }
}

fn core_suite() -> Verdict {
    let (reports, elapsed) = timed(|| core_lemma_suite(&GenBounds::core()));
    let names = [
        "mem_replace",
        "sel_replace",
        "perm_to_part",
        "part_to_perm",
        "sel_implies_mem",
        "perm_equiv_perm_rel",
        "partition_count",
    ];
    reports_pass(&reports, &names, elapsed, Duration::from_secs(30))
}

fn typing_suite() -> Verdict {
    let (reports, elapsed) = timed(|| typing_lemma_suite_with(&GenBounds::default(), &ty_ctx_list));
    let names = [
        "ty_ctx_mem",
        "ty_ctx_uniq",
        "ty_uniq",
        "ty_ctx_mem'",
        "ty_ctx_uniq'",
        "ty_ctx_distr_part",
        "ty_ctx_distr",
    ];
    reports_pass(&reports, &names, elapsed, Duration::from_secs(30))
}

fn oracle() -> Verdict {
    let b = GenBounds {
        term_size: 4,
        ctx_elems: 2,
        ..GenBounds::default()
    };
    let (reports, elapsed) = timed(|| oracle_equivalence(&b));
    let names = ["ltype_oracle_equivalence", "mltype_oracle_equivalence"];
    reports_pass(&reports, &names, elapsed, Duration::from_secs(120))
}

fn translation_suite() -> Verdict {
    let (reports, elapsed) = timed(|| translation_lemma_suite(&GenBounds::default()));
    let names = [
        "trans_rel_uniq",
        "trans_rel_mem",
        "trans_rel_sel",
        "trans_rel_list_distr",
        "trans_rel_distr",
        "sel_implies_mem",
        "ltrans_pres_ty",
    ];
    reports_pass(&reports, &names, elapsed, Duration::from_secs(120))
}

const EXPECTED_LIFTED: [&str; 3] = [
    "Theorem ty_ctx_mem' : forall G X, ty_ctx' G -> member X G -> exists n T, name n /\\ X = ty_of n T.",
    "Theorem ty_ctx_uniq' : forall G X T1 T2, ty_ctx' G -> member (ty_of X T1) G -> member (ty_of X T2) G -> T1 = T2.",
    "Theorem trans_rel_mem : forall G1 G2 G3 E, trans_rel G1 G2 G3 -> member E G2 -> exists X Y T, \
     E = trans_to X Y /\\ name X /\\ name Y /\\ member (ty_of X T) G1 /\\ member (ty_of Y T) G3.",
];

fn engine_fidelity() -> Verdict {
    let specs = parse_spec_file(&read("specs/contexts.ctx")).unwrap();
    let mut lemmas = parse_lemma_file(&read("lemmas/typing.lemmas"), &specs).unwrap();
    lemmas.extend(parse_lemma_file(&read("lemmas/translation.lemmas"), &specs).unwrap());
    lemmas.retain(|l| ["ty_ctx_mem", "ty_ctx_uniq", "trans_rel_mem"].contains(&l.name.as_str()));

    let mut problems = Vec::new();
    for (list, expected_src) in lemmas.iter().zip(EXPECTED_LIFTED) {
        let spec = specs.iter().find(|s| s.name == list.spec).unwrap();
        let lifted = lift_lemma(spec, list).unwrap();
        let expected: LemmaStmt = parse_lemma(expected_src, &specs).unwrap();
        if !lifted.alpha_eq(&expected) {
            problems.push(format!("lift of {} is `{lifted}`", list.name));
        }
    }

    let b = GenBounds::default();
    let (reports, elapsed) = timed(|| {
        let mut r = fidelity_reports(&b);
        r.extend(engine_reports(&specs, &lemmas, &b, CheckOpts::default()).unwrap());
        r
    });
    let names = [
        "ty_ctx'_mset_fidelity",
        "trans_rel_mset_fidelity",
        "ty_ctx'_distr1",
        "trans_rel_distr1",
        "trans_rel_distr2",
        "trans_rel_distr3",
        "ty_ctx_mem'",
        "ty_ctx_uniq'",
        "trans_rel_mem'",
        "ty_ctx_mem'_via_ty_ctx_mem",
        "ty_ctx_uniq'_via_ty_ctx_uniq",
        "trans_rel_mem'_via_trans_rel_mem",
    ];
    let mut v = reports_pass(&reports, &names, elapsed, Duration::from_secs(120));
    if !problems.is_empty() {
        v.ok = false;
        v.detail = format!("{}; {}", problems.join("; "), v.detail);
    }
    v
}

fn mutation() -> Verdict {
    let specs = parse_spec_file(&read("specs/contexts.ctx")).unwrap();
    let mut lemmas = parse_lemma_file(&read("lemmas/typing.lemmas"), &specs).unwrap();
    lemmas.extend(parse_lemma_file(&read("lemmas/translation.lemmas"), &specs).unwrap());
    lemmas.retain(|l| l.name.ends_with("_uniq"));
    let b = GenBounds::default();
    let run = |nabla_fresh: bool| -> Vec<CheckReport> {
        lemmas
            .iter()
            .map(|l| {
                let spec = specs.iter().find(|s| s.name == l.spec).unwrap();
                verify_lemma(&Elaborated::new(spec, CheckOpts { nabla_fresh }), l, &b).unwrap()
            })
            .collect()
    };
    let mutated = run(false);
    let restored = run(true);
    let broken: Vec<&CheckReport> = mutated
        .iter()
        .filter(|r| !r.passed() && r.counterexample.as_ref().is_some_and(|c| !c.0.is_empty()))
        .collect();
    let green = restored.iter().all(CheckReport::passed);
    Verdict {
        ok: !broken.is_empty() && green,
        detail: match broken.first() {
            Some(r) => format!(
                "mutated {} fails with {}; restored suite {}",
                r.name,
                r.counterexample.as_ref().unwrap(),
                if green { "passes" } else { "still fails" }
            ),
            None => "no uniqueness lemma fails without freshness".into(),
        },
    }
}

fn determinism() -> Verdict {
    let spec = fixture("specs/contexts.ctx");
    let lemmas = fixture("lemmas/translation.lemmas");
    let run = |jobs: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_ctxlift"))
            .args(["verify", "--format", "structured", "--bound-ctx", "2", "--jobs", jobs])
            .arg(&spec)
            .arg(&lemmas)
            .output()
            .unwrap();
        (out.status.code(), out.stdout)
    };
    let (a, b) = (run("1"), run("4"));
    Verdict {
        ok: a == b && a.0 == Some(0) && !a.1.is_empty(),
        detail: format!("{} bytes with --jobs 1 and --jobs 4, identical: {}", a.1.len(), a == b),
    }
}

type Criterion = (&'static str, fn() -> Verdict);

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("worked typing examples", worked_examples),
        ("core context lemmas", core_suite),
        ("typing lemmas", typing_suite),
        ("relational and algorithmic checkers agree", oracle),
        ("translation lemmas", translation_suite),
        ("context spec engine", engine_fidelity),
        ("mutation sensitivity", mutation),
        ("deterministic reports", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        println!(
            "{} criterion {} ({name}): {}",
            if v.ok { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
        if !v.ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
