use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ctxlift_core::ctx::lemmas::core_lemma_suite;
use ctxlift_core::ctx::Ctx;
use ctxlift_core::ctxspec::suite::{engine_reports, fidelity_reports};
use ctxlift_core::ctxspec::{parse_lemma_file, parse_spec_file, CheckOpts};
use ctxlift_core::gen::GenBounds;
use ctxlift_core::parse::{parse_judgment_file, parse_translation_file, TransLine};
use ctxlift_core::report::{CheckReport, Counterexample, Outcome, Verdict};
use ctxlift_core::syntax::Tm;
use ctxlift_core::translation::lemmas::translation_lemma_suite;
use ctxlift_core::translation::{ltrans_rel, translate};
use ctxlift_core::typing::lemmas::{oracle_equivalence, typing_lemma_suite};
use ctxlift_core::typing::{judge, ltype_types, mltype_types, System, TyJudgment};

#[derive(Parser)]
#[command(
    name = "ctxlift",
    version,
    about = "Typing, translation and context-lemma checks over multiset binding contexts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every `CTX |- TERM : TY => yes|no` line of a judgment file.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = SystemArg::Linear)]
        system: SystemArg,
        /// Use the leftover-threading checker instead of the relational one.
        #[arg(long)]
        algo: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Translate the terms of a file, removing `let`.
    Translate {
        file: PathBuf,
        /// Also check each output against the relation and its type.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the checks a spec file and lemma file call for, or a built-in suite.
    #[command(group = clap::ArgGroup::new("input").required(true).multiple(true).args(["spec", "suite"]))]
    Verify {
        spec: Option<PathBuf>,
        lemmas: Option<PathBuf>,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Worker threads.
        #[arg(long, default_value_t = default_jobs(), value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
        /// Elaborate `nabla` without its freshness condition.
        #[arg(long, hide = true)]
        drop_nabla_freshness: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include elapsed times in the reports.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct BoundArgs {
    /// Largest generated term, in constructors.
    #[arg(long)]
    bound_term_size: Option<usize>,
    /// Most elements in a generated context.
    #[arg(long)]
    bound_ctx: Option<usize>,
    /// Deepest nesting of `++` in a generated context.
    #[arg(long)]
    bound_depth: Option<usize>,
    /// Size of the name pool.
    #[arg(long)]
    bound_names: Option<usize>,
    /// Deepest generated type.
    #[arg(long)]
    bound_ty_depth: Option<usize>,
}

impl BoundArgs {
    fn apply(&self, mut b: GenBounds) -> GenBounds {
        let set = |field: &mut usize, v: Option<usize>| {
            if let Some(v) = v {
                *field = v;
            }
        };
        set(&mut b.term_size, self.bound_term_size);
        set(&mut b.ctx_elems, self.bound_ctx);
        set(&mut b.union_depth, self.bound_depth);
        set(&mut b.names, self.bound_names);
        set(&mut b.ty_depth, self.bound_ty_depth);
        b
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Stlc,
    Linear,
    Ml,
}

impl From<SystemArg> for System {
    fn from(s: SystemArg) -> System {
        match s {
            SystemArg::Stlc => System::Stlc,
            SystemArg::Linear => System::Linear,
            SystemArg::Ml => System::Ml,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// Lemmas about contexts themselves.
    Core,
    /// Typing lemmas and the relational/algorithmic agreement.
    Typing,
    /// Translation lemmas and type preservation.
    Translation,
    /// The built-in commands against the hand-written predicates.
    Engine,
}

fn default_jobs() -> u16 {
    std::thread::available_parallelism().map_or(1, |n| n.get().min(u16::MAX as usize) as u16)
}

/// A usage or input problem, reported with exit status 2.
struct Failure(String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: impl fmt::Display) -> Failure {
    Failure(format!("{}:{e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check {
            file,
            system,
            algo,
            out,
        } => cmd_check(&file, system.into(), algo, &out),
        Command::Translate { file, verify, out } => cmd_translate(&file, verify, &out),
        Command::Verify {
            spec,
            lemmas,
            suite,
            bounds,
            jobs,
            drop_nabla_freshness,
            out,
        } => {
            let opts = CheckOpts {
                nabla_fresh: !drop_nabla_freshness,
            };
            cmd_verify(
                spec.as_deref(),
                lemmas.as_deref(),
                suite,
                &bounds,
                jobs.into(),
                opts,
                &out,
            )
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("ctxlift: {e}");
            ExitCode::from(2)
        }
    }
}

/// Prints the reports and tells whether all passed.
fn emit(reports: &[CheckReport], out: &OutputArgs) -> bool {
    for r in reports {
        match out.format {
            Format::Text => println!("{}", r.text_line(out.timings)),
            Format::Structured => println!(
                "{}",
                serde_json::to_string(&r.record(out.timings)).expect("records serialize")
            ),
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if out.format == Format::Text {
        println!("{} checks, {} failed", reports.len(), failed);
    }
    failed == 0
}

fn cmd_check(file: &Path, system: System, algo: bool, out: &OutputArgs) -> Result<bool, Failure> {
    let lines = parse_judgment_file(&read(file)?).map_err(|e| in_file(file, e))?;
    let reports: Vec<CheckReport> = lines
        .into_iter()
        .map(|l| {
            let j = TyJudgment {
                ctx: l.ctx,
                term: l.term,
                ty: l.ty,
            };
            CheckReport::run(&format!("line {}", l.line), || {
                let got = judge(system, algo, &j);
                Outcome::check(got == l.expected, || {
                    Counterexample::new()
                        .with("G", &j.ctx)
                        .with("E", &j.term)
                        .with("T", &j.ty)
                        .with("expected", yes_no(l.expected))
                        .with("got", yes_no(got))
                })
            })
        })
        .collect();
    Ok(emit(&reports, out))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Serialize)]
struct TransRecord {
    line: usize,
    src: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    dst: Option<String>,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn translation_record(line: usize, src: &Tm, verify: bool) -> TransRecord {
    let mut rec = TransRecord {
        line,
        src: src.to_string(),
        dst: None,
        verdict: Verdict::Fail,
        error: None,
    };
    match translate(&Ctx::Empty, src) {
        Err(e) => rec.error = Some(e.to_string()),
        Ok(dst) => {
            if verify {
                rec.error = verify_translation(src, &dst).err();
            }
            rec.dst = Some(dst.to_string());
        }
    }
    if rec.error.is_none() {
        rec.verdict = Verdict::Pass;
    }
    rec
}

fn verify_translation(src: &Tm, dst: &Tm) -> Result<(), String> {
    if !ltrans_rel(&Ctx::Empty, src, dst) {
        return Err("output is not related to the source".into());
    }
    let src_tys = mltype_types(&Ctx::Empty, src);
    let dst_tys: BTreeSet<_> = ltype_types(&Ctx::Empty, dst);
    match src_tys.iter().find(|t| !dst_tys.contains(*t)) {
        Some(t) => Err(format!("source has type {t} but the output does not")),
        None => Ok(()),
    }
}

fn cmd_translate(file: &Path, verify: bool, out: &OutputArgs) -> Result<bool, Failure> {
    let lines = parse_translation_file(&read(file)?).map_err(|e| in_file(file, e))?;
    let records: Vec<TransRecord> = lines
        .iter()
        .map(|l| match l {
            TransLine::Translate { line, src } => translation_record(*line, src, verify),
            TransLine::Judge {
                line,
                ctx,
                src,
                dst,
                expected,
            } => {
                let got = ltrans_rel(ctx, src, dst);
                TransRecord {
                    line: *line,
                    src: src.to_string(),
                    dst: Some(dst.to_string()),
                    verdict: if got == *expected { Verdict::Pass } else { Verdict::Fail },
                    error: (got != *expected).then(|| format!("expected {}, got {}", yes_no(*expected), yes_no(got))),
                }
            }
        })
        .collect();
    for r in &records {
        match out.format {
            Format::Structured => println!("{}", serde_json::to_string(r).expect("records serialize")),
            Format::Text => match (&r.dst, &r.error) {
                (Some(d), None) => println!("{}: {} ~> {}", r.line, r.src, d),
                (Some(d), Some(e)) => println!("{}: {} ~> {}  FAIL: {e}", r.line, r.src, d),
                (None, e) => println!("{}: {}  FAIL: {}", r.line, r.src, e.as_deref().unwrap_or("")),
            },
        }
    }
    Ok(records.iter().all(|r| r.verdict == Verdict::Pass))
}

fn suite_reports(suite: Suite, bounds: &BoundArgs) -> Vec<CheckReport> {
    match suite {
        Suite::Core => core_lemma_suite(&bounds.apply(GenBounds::core())),
        Suite::Typing => {
            let b = bounds.apply(GenBounds::default());
            let mut out = typing_lemma_suite(&b);
            let small = GenBounds {
                term_size: b.term_size.min(4),
                ctx_elems: b.ctx_elems.min(2),
                ..b
            };
            out.extend(oracle_equivalence(&small));
            out
        }
        Suite::Translation => translation_lemma_suite(&bounds.apply(GenBounds::default())),
        Suite::Engine => fidelity_reports(&bounds.apply(GenBounds::default())),
    }
}

fn cmd_verify(
    spec: Option<&Path>,
    lemmas: Option<&Path>,
    suite: Option<Suite>,
    bounds: &BoundArgs,
    jobs: usize,
    opts: CheckOpts,
    out: &OutputArgs,
) -> Result<bool, Failure> {
    let mut specs = Vec::new();
    let mut stmts = Vec::new();
    if let Some(path) = spec {
        specs = parse_spec_file(&read(path)?).map_err(|e| in_file(path, e))?;
        for s in &specs {
            for w in s.overlap_warnings() {
                eprintln!("warning: {}: {w}", path.display());
            }
        }
    }
    if let Some(path) = lemmas {
        stmts = parse_lemma_file(&read(path)?, &specs).map_err(|e| in_file(path, e))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure(e.to_string()))?;
    let mut reports = pool.install(|| -> Result<Vec<CheckReport>, Failure> {
        let mut reports = Vec::new();
        if let Some(s) = suite {
            reports.extend(suite_reports(s, bounds));
        }
        if !specs.is_empty() {
            let b = bounds.apply(GenBounds::default());
            reports.extend(engine_reports(&specs, &stmts, &b, opts).map_err(|e| Failure(e.to_string()))?);
        }
        Ok(reports)
    })?;
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(emit(&reports, out))
}
