import pytest

from fibcat.constructions import artin_gluing, grothendieck
from fibcat.core import Functor
from fibcat.corpus import (
    collapsing_fixture,
    const_top,
    divisor_lattice,
    f_bad,
    meet_functor,
    random_gluing_functor,
    random_groth,
)
from fibcat.errors import NotBeckChevalley, NotMoens, NotPreMoens
from fibcat.moens import (
    bcc_via_transport,
    disjointness_characterizations,
    extensivity_characterizations,
    gluing_bcc_iff_pb_preserving,
    has_disjoint_sums,
    has_stable_sums,
    is_generalized_moens,
    is_lex_family,
    is_moens,
    is_pre_moens,
    moens_consequences,
    omega_functor,
    recheck_witness,
    satisfies_bcc,
    satisfies_dual_bcc,
    terminal_section,
    zawadowski_conditions,
    zawadowski_equiv_gen_moens,
)


def test_bcc_holds_on_identity_gluing(gl_id):
    p = gl_id.fib
    assert satisfies_bcc(p).holds
    assert satisfies_dual_bcc(p).holds
    assert bcc_via_transport(p).holds


def test_bcc_fails_on_bad_gluing_with_witnesses(gl_bad):
    p = gl_bad.fib
    direct = satisfies_bcc(p)
    dual = satisfies_dual_bcc(p)
    transport = bcc_via_transport(p)
    assert not direct.holds and not dual.holds and not transport.holds
    for verdict in (direct, dual, transport):
        assert verdict.witness is not None
        assert recheck_witness(p, verdict.witness)


def test_bcc_triple_agreement_on_random_corpus():
    for seed in range(1, 6):
        p = artin_gluing(random_gluing_functor(seed)).fib
        Q = grothendieck(random_groth(seed)).fib
        for inst in (p, Q):
            a = satisfies_bcc(inst).holds
            b = satisfies_dual_bcc(inst).holds
            c = bcc_via_transport(inst).holds
            assert a == b == c


def test_stable_and_disjoint_on_identity_gluing(gl_id):
    p = gl_id.fib
    assert has_stable_sums(p).holds
    assert has_disjoint_sums(p).holds
    assert is_pre_moens(p).holds
    assert is_moens(p).holds
    assert is_generalized_moens(p).holds


def test_collapse_fixture_raw_verdicts(collapse_fib):
    # the fibered diagonals are all identities here, so bare disjointness
    # holds while full stability is what actually fails
    assert has_disjoint_sums(collapse_fib).holds
    stable = has_stable_sums(collapse_fib)
    assert not stable.holds
    assert recheck_witness(collapse_fib, stable.witness)
    assert has_stable_sums(collapse_fib, along_vertical_only=True).holds
    assert not is_moens(collapse_fib).holds
    assert not is_generalized_moens(collapse_fib).holds


def test_collapse_fixture_rejected_by_all_characterizations(collapse_fib):
    suite = disjointness_characterizations(collapse_fib, mode="vertical")
    assert suite.agree
    for verdict in suite.verdicts:
        assert not verdict.holds
        assert verdict.witness is not None
        assert recheck_witness(collapse_fib, verdict.witness)


def test_disjointness_gate_requires_pre_moens(collapse_fib):
    with pytest.raises(NotPreMoens):
        disjointness_characterizations(collapse_fib, mode="pre-moens")


def test_disjointness_agreement_on_pre_moens_instances(gl_id, gl_const, gl_meet4):
    for gl in (gl_id, gl_const, gl_meet4):
        p = gl.fib
        assert is_pre_moens(p).holds
        suite = disjointness_characterizations(p)
        assert suite.agree
        assert all(v.holds for v in suite.verdicts)


def test_extensivity_agreement(gl_id, gl_meet4):
    for gl in (gl_id, gl_meet4):
        suite = extensivity_characterizations(gl.fib, mode="bc")
        assert suite.agree
        assert all(v.holds for v in suite.verdicts)


def test_extensivity_gate_requires_bcc(gl_bad):
    with pytest.raises(NotBeckChevalley):
        extensivity_characterizations(gl_bad.fib, mode="bc")


def test_extensivity_vertical_mode_on_collapse(collapse_fib):
    suite = extensivity_characterizations(collapse_fib, mode="vertical")
    assert suite.agree
    assert not any(v.holds for v in suite.verdicts)


def test_moens_consequences_on_positive_instances(gl_id, gl_meet4, cod_dia):
    for p in (gl_id.fib, gl_meet4.fib, cod_dia):
        report = moens_consequences(p)
        assert report.holds
        assert all(v.holds for v in report.verdicts)


def test_moens_consequences_gate(collapse_fib):
    with pytest.raises(NotMoens):
        moens_consequences(collapse_fib)


def test_generalized_moens_on_bad_gluing(gl_bad):
    p = gl_bad.fib
    assert not is_moens(p).holds
    assert is_generalized_moens(p).holds


def test_zawadowski_matches_generalized_moens(gl_id, gl_bad, collapse_fib):
    assert zawadowski_conditions(gl_id.fib).holds
    assert zawadowski_conditions(gl_bad.fib).holds
    z = zawadowski_conditions(collapse_fib)
    assert not z.holds
    assert recheck_witness(collapse_fib, z.witness)
    for p in (gl_id.fib, gl_bad.fib, collapse_fib):
        assert zawadowski_equiv_gen_moens(p)


def test_gluing_bcc_iff_pb_preserving(dia, d12):
    assert gluing_bcc_iff_pb_preserving(Functor.identity(dia))
    assert gluing_bcc_iff_pb_preserving(const_top(dia))
    assert gluing_bcc_iff_pb_preserving(f_bad())
    assert gluing_bcc_iff_pb_preserving(meet_functor(d12, "4"))
    for seed in range(1, 6):
        assert gluing_bcc_iff_pb_preserving(random_gluing_functor(seed))


def test_lex_family_detection(gl_id, collapse_fib):
    assert is_lex_family(gl_id.fib)
    assert is_lex_family(collapse_fib)


def test_terminal_section_and_omega_on_gluing(gl_id, dia):
    p = gl_id.fib
    ts = terminal_section(p)
    z = ts.z
    assert p.base.obj_id(z) == "top"
    for b in range(p.base.n_objects):
        c, bb, v = gl_id.parts.obj_parts[ts.zeta[b]]
        assert bb == b
        # zeta over b is (F b, b, id_{F b})
        assert dia.is_identity(int(v))
    om = omega_functor(p)
    om.validate()


def test_omega_prime_on_codomain_fibration(cod_dia, dia):
    from fibcat.constructions import codomain_fibration

    p, arr = codomain_fibration(dia)
    ts = terminal_section(p)
    for b in range(dia.n_objects):
        arrow = int(arr.obj_arrow[ts.omega_prime[b]])
        assert dia.src[arrow] == b
        assert dia.obj_id(int(dia.tgt[arrow])) == "top"


def test_witness_recheck_rejects_fabricated_claim(gl_id):
    p = gl_id.fib
    flags = p.cocart_flags()
    t = p.total
    f = next(
        i for i in range(t.n_morphisms)
        if flags[i] and not p.base.is_iso(int(p.proj.mmap[i]))
    )
    fake = {
        "kind": "stable-sums",
        "cocart": t.mor_id(f),
        "along": t.mor_id(f),
        "pulled": t.mor_id(f),
    }
    assert not recheck_witness(p, fake)


def test_witness_recheck_rejects_unknown_kind(gl_id):
    with pytest.raises(ValueError):
        recheck_witness(gl_id.fib, {"kind": "no-such-check"})
