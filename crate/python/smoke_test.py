"""Smoke test for the ctxlift extension module.

Build and run from the repository root:

    cargo build --release -p ctxlift-py --features extension-module
    cp target/release/libctxlift.so python/ctxlift.so
    python3 python/smoke_test.py
"""

import pathlib

import ctxlift

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

APP = "abs (i -> o) (x\\ abs i (y\\ app x y))"
TWICE = "abs (i -> i -> o) (x\\ abs i (y\\ app (app x y) y))"


def main():
    assert ctxlift.check("nil", APP, "(i -> o) -> i -> o")
    assert ctxlift.check("nil", APP, "(i -> o) -> i -> o", "stlc")
    assert not ctxlift.check("nil", TWICE, "(i -> i -> o) -> i -> o", "linear")
    assert ctxlift.check("nil", TWICE, "(i -> i -> o) -> i -> o", "stlc")

    out = ctxlift.translate("let (o -> o) (abs o (z\\ z)) (x\\ x)")
    assert out.startswith("app (abs"), out
    try:
        ctxlift.translate("abs i (x\\ app x x)")
    except ValueError as e:
        assert "linearity" in str(e)
    else:
        raise AssertionError("a non-linear term was translated")

    assert ctxlift.perm("[a, b] ++ [c]", "[c, b, a]")
    assert not ctxlift.perm("[a, a]", "[a]")

    spec = (FIXTURES / "specs" / "contexts.ctx").read_text()
    lemmas = (FIXTURES / "lemmas" / "typing.lemmas").read_text()
    lifted = ctxlift.lift(spec, lemmas)
    assert lifted[0].startswith("Theorem ty_ctx_mem' : forall G X, ty_ctx' G -> member X G"), lifted[0]

    reports = ctxlift.verify(spec, lemmas, ctx_elems=2, union_depth=1)
    assert reports and all(r["verdict"] == "pass" for r in reports), reports

    broken = (FIXTURES / "specs" / "broken_freshness.ctx").read_text()
    broken_lemmas = (FIXTURES / "lemmas" / "broken_freshness.lemmas").read_text()
    failing = [r for r in ctxlift.verify(broken, broken_lemmas, ctx_elems=2, union_depth=1) if r["verdict"] == "fail"]
    assert failing and failing[0]["counterexample"], failing

    print(f"ok: {len(reports)} reports passed, {len(failing)} expected failures")


if __name__ == "__main__":
    main()
