"""The Moens correspondence between fibrations and lex-valued functors.

phi sends a fibration to its terminal transport omega' = omega . zeta; psi
sends a functor to its Artin gluing.  Both round trips are verified per
instance: the fibered comparison functors are built explicitly and the unit
and counit checked to be natural isomorphisms, on the nose over the base.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constructions import Gluing, artin_gluing, gluing_cocart_lift_closed
from .core import (
    Cone,
    Functor,
    cone_mediator,
    is_lex_category,
    is_lex_functor,
    natural_iso,
    preserves_terminal,
    pullback,
)
from .errors import (
    MissingPullback,
    MissingTerminal,
    NotGeneralizedMoens,
    NotLex,
    NotMoens,
    NotTerminalPreserving,
)
from .fibration import FiberedFunctor, Fibration, fiberwise_terminal_section, fill_cocart
from .moens import is_generalized_moens, is_moens, omega_functor, terminal_section


@dataclass
class RoundTripReport:
    direction: str
    functors: dict      # name -> the comparison Functor
    evidence: dict      # name -> bool

    @property
    def verdict(self) -> bool:
        return all(self.evidence.values())

    def to_json(self) -> dict:
        return {
            "direction": self.direction,
            "evidence": dict(self.evidence),
            "verdict": self.verdict,
        }


def _check_mode(mode: str) -> None:
    if mode not in ("moens", "generalized"):
        raise ValueError(f"unknown mode {mode!r}")


def phi(p: Fibration, mode: str = "moens") -> Functor:
    """Terminal transport omega': b -> (!_b)_! zeta_b as a functor base -> fiber(z).

    Lex in Moens mode, terminal-preserving in generalized mode; both are
    re-verified on the result.
    """
    _check_mode(mode)
    if not is_lex_category(p.base):
        raise NotLex("the correspondence needs a lex base")
    if mode == "moens":
        if not is_moens(p).holds:
            raise NotMoens("phi in Moens mode needs a Moens fibration")
    elif not is_generalized_moens(p).holds:
        raise NotGeneralizedMoens("phi needs at least a generalized Moens fibration")
    fun = fiberwise_terminal_section(p).then(omega_functor(p))
    if mode == "moens":
        if not is_lex_functor(fun):
            raise NotLex("terminal transport of a Moens fibration must be lex")
    elif not preserves_terminal(fun):
        raise NotTerminalPreserving("terminal transport must preserve the terminal")
    return fun


def _gate_functor(f_fun: Functor, mode: str) -> None:
    _check_mode(mode)
    if not is_lex_category(f_fun.source) or not is_lex_category(f_fun.target):
        raise NotLex("the correspondence needs lex source and target")
    if mode == "moens":
        if not is_lex_functor(f_fun):
            raise NotLex("psi in Moens mode needs a lex functor")
    elif not preserves_terminal(f_fun):
        raise NotTerminalPreserving("psi needs a terminal-preserving functor")


def _psi_gluing(f_fun: Functor, mode: str, max_morphisms: int | None = None) -> Gluing:
    _gate_functor(f_fun, mode)
    gl = artin_gluing(f_fun, max_morphisms)
    if mode == "moens":
        if not is_moens(gl.fib).holds:
            raise NotMoens("the gluing of a lex functor must be Moens")
    elif not is_generalized_moens(gl.fib).holds:
        raise NotGeneralizedMoens("the gluing must be generalized Moens")
    return gl


def psi(f_fun: Functor, mode: str = "moens", max_morphisms: int | None = None) -> Fibration:
    """The Artin gluing of f_fun, verified Moens (lex mode) or generalized Moens."""
    return _psi_gluing(f_fun, mode, max_morphisms).fib


def _vertical_into(p: Fibration, e: int, target: int) -> int:
    """The unique vertical arrow e -> target; target is a fiber terminal."""
    verts = p.verticals()
    hits = [int(m) for m in p.total.hom(e, target) if verts[int(m)]]
    if len(hits) != 1:
        raise MissingTerminal(
            f"no unique vertical from {p.total.obj_id(e)!r} to the fiber terminal"
        )
    return hits[0]


def roundtrip_psi_phi(p: Fibration, mode: str = "moens",
                      max_morphisms: int | None = None) -> RoundTripReport:
    """Fibered equivalence between p and the gluing of its terminal transport.

    phi_b(e) is the comparison mu_e; psi_b(k) is the pullback of nu_b along k.
    Both directions are materialized as strict fibered functors and the two
    composites checked to be naturally isomorphic to the identities.
    """
    om_prime = phi(p, mode)
    glp = artin_gluing(om_prime, max_morphisms)
    parts, gcat = glp.parts, glp.parts.cat
    t, base = p.total, p.base
    ts = terminal_section(p)
    om = omega_functor(p)
    zeta = fiberwise_terminal_section(p)
    fz = p.fiber_data(ts.z)
    idz = base.identity(ts.z)

    mu = np.zeros(t.n_objects, dtype=np.int32)
    phi_omap = np.zeros(t.n_objects, dtype=np.int32)
    for e in range(t.n_objects):
        b = int(p.proj.omap[e])
        bang_e = _vertical_into(p, e, ts.zeta[b])
        kappa = p.required_colift(ts.bang[b], e)
        mu[e] = fill_cocart(p, kappa, t.compose(ts.nu[b], bang_e), v=idz)
        phi_omap[e] = parts.obj_lookup[(int(om.omap[e]), b, int(fz.mor_from_total[int(mu[e])]))]
    phi_mmap = np.array(
        [
            parts.mor_lookup[(
                int(phi_omap[t.src[m]]), int(phi_omap[t.tgt[m]]),
                int(om.mmap[m]), int(p.proj.mmap[m]),
            )]
            for m in range(t.n_morphisms)
        ],
        dtype=np.int32,
    )
    phi_top = Functor(t, gcat, phi_omap, phi_mmap)
    FiberedFunctor(phi_top, Functor.identity(base)).validate(p, glp.fib)

    cones = []
    psi_omap = np.zeros(gcat.n_objects, dtype=np.int32)
    for o in range(gcat.n_objects):
        _, b, k = parts.obj_parts[o]
        cone = pullback(t, ts.nu[b], int(fz.mor_to_total[k]))
        if cone is None:
            raise MissingPullback(
                f"no pullback of the terminal transport over {base.obj_id(b)!r}"
            )
        cones.append(cone)
        psi_omap[o] = cone.apex
    psi_mmap = np.zeros(gcat.n_morphisms, dtype=np.int32)
    for m in range(gcat.n_morphisms):
        pi, q = parts.mor_parts[m]
        o1, o2 = int(gcat.src[m]), int(gcat.tgt[m])
        _, b2, k2 = parts.obj_parts[o2]
        cone1 = cones[o1]
        psi_mmap[m] = cone_mediator(
            t, ts.nu[b2], int(fz.mor_to_total[k2]),
            Cone(
                cone1.apex,
                t.compose(int(zeta.mmap[q]), cone1.left),
                t.compose(int(fz.mor_to_total[pi]), cone1.right),
            ),
        )
    psi_top = Functor(gcat, t, psi_omap, psi_mmap)
    FiberedFunctor(psi_top, Functor.identity(base)).validate(glp.fib, p)

    unit = np.zeros(t.n_objects, dtype=np.int32)
    for e in range(t.n_objects):
        b = int(p.proj.omap[e])
        bang_e = _vertical_into(p, e, ts.zeta[b])
        kappa = p.required_colift(ts.bang[b], e)
        unit[e] = cone_mediator(t, ts.nu[b], int(mu[e]), Cone(e, bang_e, kappa))
    unit_iso = natural_iso(Functor.identity(t), phi_top.then(psi_top), unit)

    counit = np.zeros(gcat.n_objects, dtype=np.int32)
    for o in range(gcat.n_objects):
        _, b, _ = parts.obj_parts[o]
        apex = int(psi_omap[o])
        kappa = p.required_colift(ts.bang[b], apex)
        j = p._connecting_vertical_iso(kappa, cones[o].right, cocart=True)
        counit[o] = parts.mor_lookup[(
            int(phi_omap[apex]), o, int(fz.mor_from_total[j]), base.identity(b),
        )]
    counit_iso = natural_iso(psi_top.then(phi_top), Functor.identity(gcat), counit)

    return RoundTripReport(
        direction="psi-phi",
        functors={"phi": phi_top, "psi": psi_top},
        evidence={
            "phi-fibered": True,
            "psi-fibered": True,
            "unit-natural-iso": unit_iso,
            "counit-natural-iso": counit_iso,
        },
    )


def _fiber_domain_projection(gl: Gluing, z: int):
    """The strict fiber over z with its domain projection to C and the section
    c -> (c, !_c); over a terminal value these form an isomorphism pair."""
    p = gl.fib
    parts = gl.parts
    c_cat = gl.functor.target
    fz = p.fiber_data(z)
    proj_omap = np.zeros(fz.cat.n_objects, dtype=np.int32)
    for i in range(fz.cat.n_objects):
        c, _, _ = parts.obj_parts[int(fz.obj_to_total[i])]
        proj_omap[i] = c
    proj_mmap = np.zeros(fz.cat.n_morphisms, dtype=np.int32)
    for j in range(fz.cat.n_morphisms):
        pp, _ = parts.mor_parts[int(fz.mor_to_total[j])]
        proj_mmap[j] = pp
    proj = Functor(fz.cat, c_cat, proj_omap, proj_mmap)

    y = int(gl.functor.omap[z])
    idz = gl.functor.source.identity(z)
    sect_omap = np.array(
        [
            fz.obj_from_total[parts.obj_lookup[(c, z, int(c_cat.hom(c, y)[0]))]]
            for c in range(c_cat.n_objects)
        ],
        dtype=np.int32,
    )
    sect_mmap = np.zeros(c_cat.n_morphisms, dtype=np.int32)
    for h in range(c_cat.n_morphisms):
        o1 = int(fz.obj_to_total[sect_omap[int(c_cat.src[h])]])
        o2 = int(fz.obj_to_total[sect_omap[int(c_cat.tgt[h])]])
        sect_mmap[h] = fz.mor_from_total[parts.mor_lookup[(o1, o2, h, idz)]]
    sect = Functor(c_cat, fz.cat, sect_omap, sect_mmap)
    return fz, proj, sect


def roundtrip_phi_psi(f_fun: Functor, mode: str = "moens",
                      max_morphisms: int | None = None) -> RoundTripReport:
    """phi of the gluing of f_fun, read back through fiber(z) = C, against f_fun."""
    gl = _psi_gluing(f_fun, mode, max_morphisms)
    p = gl.fib
    base, c_cat = f_fun.source, f_fun.target
    om_prime = phi(p, mode)
    ts = terminal_section(p)
    fz, proj, sect = _fiber_domain_projection(gl, ts.z)

    sect_retracts = bool(
        np.array_equal(sect.then(proj).omap, Functor.identity(c_cat).omap)
        and np.array_equal(sect.then(proj).mmap, Functor.identity(c_cat).mmap)
    )
    proj_retracts = bool(
        np.array_equal(proj.then(sect).omap, Functor.identity(fz.cat).omap)
        and np.array_equal(proj.then(sect).mmap, Functor.identity(fz.cat).mmap)
    )

    comparison = om_prime.then(proj)
    comps = np.zeros(base.n_objects, dtype=np.int32)
    for b in range(base.n_objects):
        closed = gluing_cocart_lift_closed(gl, ts.bang[b], ts.zeta[b])
        j = p._connecting_vertical_iso(ts.nu[b], closed, cocart=True)
        pp, _ = gl.parts.mor_parts[j]
        _, _, v0 = gl.parts.obj_parts[ts.zeta[b]]
        comps[b] = c_cat.compose(v0, pp)
    iso = natural_iso(comparison, f_fun, comps)

    return RoundTripReport(
        direction="phi-psi",
        functors={"comparison": comparison, "projection": proj, "section": sect},
        evidence={
            "projection-retracts-section": sect_retracts,
            "section-retracts-projection": proj_retracts,
            "comparison-natural-iso": iso,
        },
    )
