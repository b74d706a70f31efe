"""Finite-category verification engine for fibered structures."""

__version__ = "0.1.0"

from .constructions import (
    arrow_category,
    artin_gluing,
    codomain_fibration,
    domain_opfibration,
    free_cocartesian,
    grothendieck,
)
from .core import (
    Cone,
    FinCategory,
    Functor,
    NatTrans,
    check_category,
    comma,
    is_lex_category,
    is_lex_functor,
    natural_iso,
    pullback,
    pushout,
    slice_category,
)
from .errors import FibcatError
from .fibration import (
    FiberedFunctor,
    Fibration,
    adjunction_counit,
    adjunction_unit,
    is_bicartesian,
    is_cartesian_fibration,
    is_cocartesian_fibration,
    transport_pullback,
    transport_pushforward,
)
from .moens import (
    CharacterizationSuite,
    PredicateVerdict,
    bcc_via_transport,
    disjointness_characterizations,
    extensivity_characterizations,
    has_disjoint_sums,
    has_stable_sums,
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
from .theorem import (
    RoundTripReport,
    phi,
    psi,
    roundtrip_phi_psi,
    roundtrip_psi_phi,
)

__all__ = [
    "Cone",
    "CharacterizationSuite",
    "FibcatError",
    "FiberedFunctor",
    "Fibration",
    "FinCategory",
    "Functor",
    "NatTrans",
    "PredicateVerdict",
    "RoundTripReport",
    "__version__",
    "adjunction_counit",
    "adjunction_unit",
    "arrow_category",
    "artin_gluing",
    "bcc_via_transport",
    "check_category",
    "codomain_fibration",
    "comma",
    "disjointness_characterizations",
    "domain_opfibration",
    "extensivity_characterizations",
    "free_cocartesian",
    "grothendieck",
    "has_disjoint_sums",
    "has_stable_sums",
    "is_bicartesian",
    "is_cartesian_fibration",
    "is_cocartesian_fibration",
    "is_generalized_moens",
    "is_lex_category",
    "is_lex_functor",
    "is_moens",
    "is_pre_moens",
    "moens_consequences",
    "natural_iso",
    "phi",
    "psi",
    "pullback",
    "pushout",
    "recheck_witness",
    "roundtrip_phi_psi",
    "roundtrip_psi_phi",
    "satisfies_bcc",
    "satisfies_dual_bcc",
    "slice_category",
    "transport_pullback",
    "transport_pushforward",
    "zawadowski_conditions",
    "zawadowski_equiv_gen_moens",
]
