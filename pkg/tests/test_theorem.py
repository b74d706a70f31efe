import numpy as np
import pytest

from fibcat.constructions import artin_gluing, codomain_fibration
from fibcat.core import Functor, natural_iso
from fibcat.corpus import const_top, divisor_lattice, f_bad, meet_functor
from fibcat.errors import NotLex, NotMoens, NotTerminalPreserving
from fibcat.moens import is_moens
from fibcat.theorem import phi, psi, roundtrip_phi_psi, roundtrip_psi_phi


def test_phi_codomain_fibration_recovers_identity(dia):
    p, arr = codomain_fibration(dia)
    fun = phi(p)
    fz = p.fiber_data(dia.o("top"))
    # project the slice over top back down; the composite is the identity
    for b in range(dia.n_objects):
        total_obj = int(fz.obj_to_total[fun.omap[b]])
        arrow = int(arr.obj_arrow[total_obj])
        assert dia.src[arrow] == b


def test_psi_of_identity_is_moens(dia):
    p = psi(Functor.identity(dia))
    assert is_moens(p).holds


def test_roundtrip_phi_psi_identity(dia):
    rep = roundtrip_phi_psi(Functor.identity(dia))
    assert rep.verdict
    assert rep.evidence["projection-retracts-section"]
    assert rep.evidence["section-retracts-projection"]
    assert rep.evidence["comparison-natural-iso"]


def test_roundtrip_phi_psi_const_top(dia):
    rep = roundtrip_phi_psi(const_top(dia))
    assert rep.verdict


def test_roundtrip_psi_phi_codomain(cod_dia):
    rep = roundtrip_psi_phi(cod_dia)
    assert rep.verdict
    assert rep.evidence["phi-fibered"]
    assert rep.evidence["psi-fibered"]
    assert rep.evidence["unit-natural-iso"]
    assert rep.evidence["counit-natural-iso"]


def test_roundtrip_psi_phi_meet_gluing(gl_meet4):
    rep = roundtrip_psi_phi(gl_meet4.fib)
    assert rep.verdict


def test_bad_functor_needs_generalized_mode(gl_bad):
    with pytest.raises(NotLex):
        roundtrip_phi_psi(f_bad())
    rep = roundtrip_phi_psi(f_bad(), mode="generalized")
    assert rep.verdict
    rep2 = roundtrip_psi_phi(gl_bad.fib, mode="generalized")
    assert rep2.verdict


def test_moens_gate_on_psi_phi(gl_bad):
    with pytest.raises(NotMoens):
        roundtrip_psi_phi(gl_bad.fib)


def test_phi_gates(collapse_fib):
    with pytest.raises(NotMoens):
        phi(collapse_fib)
    from fibcat.errors import NotGeneralizedMoens

    with pytest.raises(NotGeneralizedMoens):
        phi(collapse_fib, mode="generalized")


def test_generalized_gate_needs_terminal_preservation(ch4):
    from fibcat.corpus import chain, monotone_functor

    low = monotone_functor(chain(2), ch4, {"0": "0", "1": "2"})
    with pytest.raises(NotTerminalPreserving):
        roundtrip_phi_psi(low, mode="generalized")
    with pytest.raises(NotLex):
        roundtrip_phi_psi(low)


def test_mode_validation(dia):
    with pytest.raises(ValueError):
        roundtrip_phi_psi(Functor.identity(dia), mode="bogus")


def test_phi_lands_in_terminal_fiber(gl_id, dia):
    p = gl_id.fib
    fun = phi(p)
    fz_cat = p.fiber(p.base.o("top"))
    assert fun.target is fz_cat
    assert fun.source is p.base


def test_roundtrip_reports_serialize(dia):
    rep = roundtrip_phi_psi(Functor.identity(dia))
    payload = rep.to_json()
    assert payload["verdict"] is True
    assert set(payload["evidence"]) == {
        "projection-retracts-section",
        "section-retracts-projection",
        "comparison-natural-iso",
    }
