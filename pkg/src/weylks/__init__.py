"""Exact verification of Kochen-Specker parity obstructions built from Weyl unitaries.

Monomials ``phase * prod_j U_j^{m_j} V_j^{n_j}`` obey
``U_j V_j = exp(-i*pi*theta_j) V_j U_j``.  Certificates list contexts of
commuting monomials; the verifier decides exactly whether a value assignment
respecting every context's product rule exists.
"""

from .certificate import (
    BUILTINS,
    Certificate,
    CertificateError,
    ContradictionWitness,
    builtin,
    builtin_mermin3,
    builtin_peres2,
    compile_certificate,
    dump_certificate,
    find_assignment,
    find_contradiction,
    load_certificate,
    verify,
)
from .phase import MINUS_ONE, ONE, PhaseExp, parse_phase
from .search import SearchParams, SearchResult, enumerate_monomials, search_obstruction
from .weyl import (
    DofSystem,
    WeylError,
    WeylMonomial,
    format_monomial,
    inverse,
    monomial_mul,
    parse_monomial,
    product,
    symplectic_phase,
)

__all__ = [
    "BUILTINS", "Certificate", "CertificateError", "ContradictionWitness", "DofSystem",
    "MINUS_ONE", "ONE", "PhaseExp", "SearchParams", "SearchResult", "WeylError",
    "WeylMonomial", "builtin", "builtin_mermin3", "builtin_peres2", "compile_certificate",
    "dump_certificate", "enumerate_monomials", "find_assignment", "find_contradiction",
    "format_monomial", "inverse", "load_certificate", "monomial_mul", "parse_monomial",
    "parse_phase", "product", "search_obstruction", "symplectic_phase", "verify",
]
