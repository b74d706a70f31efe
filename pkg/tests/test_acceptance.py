"""End-to-end verification battery over the full randomized corpus.

One test per advertised guarantee; each runs against every corpus instance
it applies to and finishes well inside its 60-second budget.
"""

import json
import time

import pytest

from fibcat.cli import main
from fibcat.constructions import (
    arrow_category,
    artin_gluing,
    comma,
    free_cocartesian,
    verify_family_lift_formulas,
    verify_gluing_lift_formulas,
    verify_groth_lift_formulas,
)
from fibcat.core import Functor, check_category, is_lex_category, preserves_pullbacks
from fibcat.corpus import (
    chain,
    const_top,
    divisor_lattice,
    f_bad,
    finset_category,
    meet_functor,
    random_gluing_functor,
    random_intersection_lattice,
    random_poset,
    walking_cospan,
)
from fibcat.errors import PreconditionError
from fibcat.fibration import lexness_transfer
from fibcat.moens import (
    bcc_via_transport,
    disjointness_characterizations,
    extensivity_characterizations,
    gluing_bcc_iff_pb_preserving,
    is_generalized_moens,
    is_moens,
    is_pre_moens,
    moens_consequences,
    recheck_witness,
    satisfies_bcc,
    satisfies_dual_bcc,
    zawadowski_conditions,
    zawadowski_equiv_gen_moens,
)
from fibcat.schema import dumps_canonical, functor_to_json
from fibcat.theorem import psi, roundtrip_phi_psi, roundtrip_psi_phi

from conftest import SEEDS

BUDGET = 60.0


def test_criterion_01_all_categories_lawful(dia, ch4, fs3, d12, bicart_corpus, cod_dia):
    """Generated and constructed categories pass every category law."""
    t0 = time.monotonic()
    cats = [
        ("diamond", dia),
        ("chain4", ch4),
        ("finset3", fs3),
        ("divisors12", d12),
        ("divisors30", divisor_lattice(30)),
        ("walking-cospan", walking_cospan()),
        ("finset2", finset_category(2)),
        ("chain6", chain(6)),
    ]
    cats += [(f"poset-{s}", random_poset(s)) for s in SEEDS]
    cats += [(f"lattice-{s}", random_intersection_lattice(s)) for s in SEEDS]
    fb = f_bad()
    cats += [
        ("arrow-diamond", arrow_category(dia).cat),
        ("arrow-chain4", arrow_category(ch4).cat),
        ("comma-const-id", comma(const_top(dia), Functor.identity(dia)).cat),
        ("comma-fbad-id", comma(fb, Functor.identity(fb.target)).cat),
        ("free-cocart-parts", free_cocartesian(cod_dia).parts.cat),
    ]
    cats += [(f"total-{name}", p.total) for name, p in bicart_corpus]
    assert len(cats) > 90
    for name, cat in cats:
        report = check_category(cat)
        assert report.ok and report.violations == [], (name, report.violations)
    assert time.monotonic() - t0 < BUDGET


def test_criterion_02_lift_soundness(bicart_corpus, gluing_corpus, groth_corpus, cod_corpus):
    """Closed-form lifts match brute force; lifts are unique up to a unique
    vertical iso."""
    t0 = time.monotonic()
    for name, gl in gluing_corpus:
        assert verify_gluing_lift_formulas(gl), name
    for name, g in groth_corpus:
        assert verify_groth_lift_formulas(g), name
    for name, p in cod_corpus:
        assert verify_family_lift_formulas(p, free_cocartesian(p)), name

    for name, p in bicart_corpus:
        t, b = p.total, p.base
        inv = t.inverse_table()
        for u in range(b.n_morphisms):
            for e in range(t.n_objects):
                if p.proj.omap[e] == b.src[u]:
                    lifts = p.cocartesian_lifts(u, e)
                    assert lifts, (name, u, e)
                    for i, f in enumerate(lifts):
                        for g in lifts[i + 1 :]:
                            conn = [
                                v
                                for v in range(t.n_morphisms)
                                if t.src[v] == t.tgt[f]
                                and t.tgt[v] == t.tgt[g]
                                and inv[v] >= 0
                                and p.proj.mmap[v] == b.ident[b.tgt[u]]
                                and t.comp[v, f] == g
                            ]
                            assert len(conn) == 1, (name, u, e)
                if p.proj.omap[e] == b.tgt[u]:
                    lifts = p.cartesian_lifts(u, e)
                    assert lifts, (name, u, e)
                    for i, f in enumerate(lifts):
                        for g in lifts[i + 1 :]:
                            conn = [
                                v
                                for v in range(t.n_morphisms)
                                if t.src[v] == t.src[g]
                                and t.tgt[v] == t.src[f]
                                and inv[v] >= 0
                                and p.proj.mmap[v] == b.ident[b.src[u]]
                                and t.comp[f, v] == g
                            ]
                            assert len(conn) == 1, (name, u, e)
    assert time.monotonic() - t0 < BUDGET


def test_criterion_03_bcc_three_ways_agree(bicart_corpus, gl_bad):
    """Direct, dual, and transport-mate Beck-Chevalley checks agree everywhere,
    and every failure carries a witness that rechecks."""
    t0 = time.monotonic()
    n_false = 0
    for name, p in bicart_corpus:
        direct = satisfies_bcc(p)
        dual = satisfies_dual_bcc(p)
        mate = bcc_via_transport(p)
        assert direct.holds == dual.holds == mate.holds, name
        if not direct.holds:
            n_false += 1
            for verdict in (direct, dual, mate):
                assert verdict.witness is not None, (name, verdict.name)
                assert recheck_witness(p, verdict.witness), (name, verdict.name)
    assert n_false >= 2

    for verdict in (satisfies_bcc(gl_bad.fib), satisfies_dual_bcc(gl_bad.fib), bcc_via_transport(gl_bad.fib)):
        assert not verdict.holds
        assert recheck_witness(gl_bad.fib, verdict.witness)
    assert time.monotonic() - t0 < BUDGET


def test_criterion_04_gluing_bcc_iff_pullback_preserving(dia, d12):
    """gl(F) satisfies Beck-Chevalley exactly when F preserves pullbacks."""
    t0 = time.monotonic()
    functors = [
        ("id-diamond", Functor.identity(dia)),
        ("const-top", const_top(dia)),
        ("meet4", meet_functor(d12, "4")),
        ("meet6", meet_functor(d12, "6")),
        ("f-bad", f_bad()),
    ]
    functors += [(f"random-{s}", random_gluing_functor(s)) for s in SEEDS]
    assert len(functors) >= 10
    outcomes = {}
    for name, fun in functors:
        assert gluing_bcc_iff_pb_preserving(fun), name
        outcomes[name] = preserves_pullbacks(fun)
    assert outcomes["id-diamond"] and outcomes["const-top"] and outcomes["meet4"]
    assert not outcomes["f-bad"]
    assert {True, False} <= set(outcomes.values())
    assert time.monotonic() - t0 < BUDGET


def test_criterion_05_lexness_transfer(bicart_corpus):
    """Total-side lexness coincides with fiberwise lexness, and the terminal
    section is lex whenever the fibers are."""
    t0 = time.monotonic()
    n = 0
    for name, p in bicart_corpus:
        if not is_lex_category(p.base):
            continue
        report = lexness_transfer(p)
        assert report.agree, name
        if report.side_fibers:
            assert report.zeta_lex is True, name
            assert report.global_terminal_from_zeta is True, name
        n += 1
    assert n >= 20
    assert time.monotonic() - t0 < BUDGET


def test_criterion_06_characterization_suites(bicart_corpus, collapse_fib):
    """The four disjointness and four extensivity characterizations each agree
    pairwise wherever their preconditions hold; the collapsing fixture is
    rejected by all four disjointness predicates at once."""
    t0 = time.monotonic()
    n_disj = 0
    for name, p in bicart_corpus:
        try:
            if not is_pre_moens(p).holds:
                continue
        except PreconditionError:
            continue
        suite = disjointness_characterizations(p)
        assert suite.agree, name
        assert all(v.holds for v in suite.verdicts), name
        n_disj += 1
    assert n_disj >= 20

    n_ext = 0
    for name, p in bicart_corpus:
        try:
            if not satisfies_bcc(p).holds:
                continue
            suite = extensivity_characterizations(p, mode="bc")
        except PreconditionError:
            continue
        assert suite.agree, name
        n_ext += 1
    assert n_ext >= 20

    rejected = disjointness_characterizations(collapse_fib, mode="vertical")
    assert rejected.agree
    assert all(not v.holds for v in rejected.verdicts)
    assert len(rejected.verdicts) == 4
    assert time.monotonic() - t0 < BUDGET


def test_criterion_07_moens_consequences(bicart_corpus):
    """Every Moens instance over a lex base satisfies the full consequence
    suite."""
    t0 = time.monotonic()
    n = 0
    for name, p in bicart_corpus:
        try:
            if not is_moens(p).holds:
                continue
            report = moens_consequences(p)
        except PreconditionError:
            continue
        assert report.holds, (name, [(v.name, v.holds) for v in report.verdicts])
        n += 1
    assert n >= 20
    assert time.monotonic() - t0 < BUDGET


def test_criterion_08_round_trips(lex_functors, cod_corpus, gl_meet4, d12):
    """phi and psi invert each other up to natural iso, from both ends."""
    t0 = time.monotonic()
    assert len(lex_functors) >= 10
    for name, fun in lex_functors:
        forward = roundtrip_phi_psi(fun)
        assert forward.verdict, (name, forward.evidence)
        back = roundtrip_psi_phi(psi(fun))
        assert back.verdict, (name, back.evidence)

    moens_fibs = [(name, p) for name, p in cod_corpus]
    moens_fibs.append(("gl-meet4", gl_meet4.fib))
    moens_fibs.append(("gl-meet6", artin_gluing(meet_functor(d12, "6")).fib))
    assert len(moens_fibs) >= 5
    for name, p in moens_fibs:
        report = roundtrip_psi_phi(p)
        assert report.verdict, (name, report.evidence)
    assert time.monotonic() - t0 < BUDGET


def test_criterion_09_generalized_mode(gl_bad):
    """gl(F_bad) fails the Moens predicate yet satisfies the generalized one,
    and both generalized round trips go through."""
    t0 = time.monotonic()
    p = gl_bad.fib
    assert not is_moens(p).holds
    assert is_generalized_moens(p).holds
    forward = roundtrip_phi_psi(f_bad(), mode="generalized")
    assert forward.verdict, forward.evidence
    back = roundtrip_psi_phi(p, mode="generalized")
    assert back.verdict, back.evidence
    assert time.monotonic() - t0 < BUDGET


def test_criterion_10_zawadowski_equivalence(bicart_corpus, collapse_fib):
    """Zawadowski's conditions hold exactly when the generalized Moens
    predicate does, across the whole corpus."""
    t0 = time.monotonic()
    n = 0
    for name, p in bicart_corpus:
        try:
            assert zawadowski_equiv_gen_moens(p), name
        except PreconditionError:
            continue
        n += 1
    assert n >= 40

    assert not zawadowski_conditions(collapse_fib).holds
    assert not is_generalized_moens(collapse_fib).holds
    assert zawadowski_equiv_gen_moens(collapse_fib)
    assert time.monotonic() - t0 < BUDGET


def test_criterion_11_analyze_reports_deterministic(tmp_path, dia):
    """analyze emits byte-identical reports across runs and job counts, apart
    from timing."""
    t0 = time.monotonic()
    path = tmp_path / "glid.json"
    path.write_text(dumps_canonical(functor_to_json(Functor.identity(dia))), encoding="utf-8")

    texts, stripped = [], []
    for i, jobs in enumerate(("1", "1", "4")):
        out = tmp_path / f"report{i}.json"
        assert main(["analyze", str(path), "--jobs", jobs, "--out", str(out)]) == 0
        text = out.read_text(encoding="utf-8")
        texts.append(text)
        stripped.append([l for l in text.splitlines() if "timing_ms" not in l])
    assert stripped[0] == stripped[1] == stripped[2]

    report = json.loads(texts[0])
    assert report["verdict"] is True
    assert time.monotonic() - t0 < BUDGET
