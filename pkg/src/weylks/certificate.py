"""Kochen-Specker obstruction certificates and their exact verification.

A certificate names Weyl monomials and lists contexts: ordered lists of
pairwise-commuting monomials.  Each context asserts the product rule

    value(m_1 m_2 ... m_k) = value(m_1) value(m_2) ... value(m_k)

for a value assignment into the unit circle.  Writing every value as
``exp(i*pi*y)``, the constraints become linear congruences ``E y = phi
(mod 2)`` over real unknowns ``y``.  Such a system is solvable exactly when
every integer vector ``t`` with ``t E = 0`` also has ``t . phi = 0 (mod 2)``;
a ``t`` violating this is a parity contradiction.

Unknowns are keyed by phase-free normal-ordered monomials, scalar phases
moving into ``phi``.  A power of a single generator and its inverse share one
unknown with opposite signs (``value(U^-1) = 1/value(U)``); composite
monomials get one unknown each and are only related through contexts.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .intlinalg import hermite_rows, matvec, solve_echelon
from .phase import PhaseExp
from .weyl import (
    DofSystem,
    WeylError,
    WeylMonomial,
    canonical_orientation,
    format_monomial,
    inverse,
    parse_monomial,
    product,
    symplectic_phase,
)


class CertificateError(ValueError):
    """Structurally invalid certificate (unknown id, non-commuting context, bad file)."""

    def __init__(self, message: str, *, context: int | None = None,
                 pair: Tuple[str, str] | None = None, phase: PhaseExp | None = None):
        super().__init__(message)
        self.context = context
        self.pair = pair
        self.phase = phase


@dataclass(frozen=True)
class Context:
    members: Tuple[str, ...]

    def __init__(self, members: Iterable[str]):
        object.__setattr__(self, "members", tuple(members))


@dataclass(frozen=True)
class Certificate:
    system: DofSystem
    monomials: Mapping[str, WeylMonomial]
    contexts: Tuple[Context, ...]
    name: str = ""

    def __init__(self, system: DofSystem, monomials: Mapping[str, WeylMonomial],
                 contexts: Iterable, name: str = "", check: bool = True):
        ctxs = tuple(c if isinstance(c, Context) else Context(c) for c in contexts)
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "monomials", dict(monomials))
        object.__setattr__(self, "contexts", ctxs)
        object.__setattr__(self, "name", name)
        if check:
            self.validate()

    def __hash__(self):
        return hash((self.system, tuple(sorted((k, v) for k, v in self.monomials.items())),
                     self.contexts))

    def validate(self) -> None:
        for key, mono in self.monomials.items():
            if mono.system != self.system:
                raise CertificateError(f"monomial {key!r} belongs to a different system")
        for ci, ctx in enumerate(self.contexts):
            if not ctx.members:
                raise CertificateError(f"context {ci} is empty", context=ci)
            for mid in ctx.members:
                if mid not in self.monomials:
                    raise CertificateError(f"context {ci} references unknown monomial {mid!r}",
                                           context=ci)
            for a, b in itertools.combinations(ctx.members, 2):
                c = symplectic_phase(self.monomials[a], self.monomials[b])
                if not c.is_identity:
                    raise CertificateError(
                        f"context {ci}: members {a!r} and {b!r} do not commute "
                        f"(symplectic phase {c.to_text()})",
                        context=ci, pair=(a, b), phase=c)

    def context_product(self, index: int) -> WeylMonomial:
        ctx = self.contexts[index]
        return product((self.monomials[m] for m in ctx.members), self.system)


@dataclass(frozen=True)
class AssignmentSystem:
    """Rows ``sum_c E[r][c] * y_c = phi_r (mod 2)``, one row per context."""

    unknowns: Tuple[WeylMonomial, ...]
    E: Tuple[Tuple[int, ...], ...]
    phi: Tuple[PhaseExp, ...]
    products: Tuple[WeylMonomial, ...] = ()

    @property
    def n_rows(self) -> int:
        return len(self.E)

    @property
    def n_cols(self) -> int:
        return len(self.unknowns)

    def residual(self, y: Sequence[Fraction]) -> List[PhaseExp]:
        """Per-row ``E y - phi`` reduced mod 2; all zero for a solution."""
        return [PhaseExp(sum((e * v for e, v in zip(row, y)), Fraction(0)) - p.q)
                for row, p in zip(self.E, self.phi)]


@dataclass(frozen=True)
class ContradictionWitness:
    t: Tuple[int, ...]
    accumulated_phase: PhaseExp

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.t) if x)

    def check(self, system: AssignmentSystem) -> bool:
        """Recompute ``t E = 0`` and ``t . phi != 0 (mod 2)`` from scratch."""
        if len(self.t) != system.n_rows:
            return False
        for c in range(system.n_cols):
            if sum(t * row[c] for t, row in zip(self.t, system.E)) != 0:
                return False
        acc = PhaseExp(sum((t * p.q for t, p in zip(self.t, system.phi)), Fraction(0)))
        return acc == self.accumulated_phase and not acc.is_identity


# value decomposition --------------------------------------------------------

def unknown_key(mono: WeylMonomial) -> Tuple[Optional[WeylMonomial], int, PhaseExp]:
    """Split ``value(mono)`` as ``exp(i*pi*s) * value(rep)^sign``.

    Returns ``(rep, sign, s)`` where ``rep`` is the phase-free unknown
    (``None`` for scalars).  Generator powers with a negative exponent are
    expressed through their positive-power representative.
    """
    if mono.is_scalar:
        return None, 0, mono.phase
    bare = mono.phase_free()
    if bare.generator_count() == 1 and canonical_orientation(bare) < 0:
        rep = inverse(bare).phase_free()
        # bare == exp(-i*pi*c) * rep^-1 where inverse(rep) carries phase c
        c = inverse(rep).phase
        return rep, -1, PhaseExp(mono.phase.q - c.q)
    return bare, 1, mono.phase


def compile_certificate(cert: Certificate) -> AssignmentSystem:
    """Turn every context into one product-rule congruence."""
    cert.validate()
    columns: Dict[WeylMonomial, int] = {}
    reps: List[WeylMonomial] = []
    rows: List[Dict[int, int]] = []
    phis: List[PhaseExp] = []
    prods: List[WeylMonomial] = []

    def col(rep: WeylMonomial) -> int:
        if rep not in columns:
            columns[rep] = len(reps)
            reps.append(rep)
        return columns[rep]

    for ci in range(len(cert.contexts)):
        members = [cert.monomials[m] for m in cert.contexts[ci].members]
        prod = product(members, cert.system)
        row: Dict[int, int] = {}
        q = Fraction(0)
        for mono in members:
            rep, sign, s = unknown_key(mono)
            q += s.q
            if rep is not None:
                k = col(rep)
                row[k] = row.get(k, 0) - sign
        rep, sign, s = unknown_key(prod)
        q -= s.q
        if rep is not None:
            k = col(rep)
            row[k] = row.get(k, 0) + sign
        rows.append(row)
        phis.append(PhaseExp(q))
        prods.append(prod)

    n = len(reps)
    E = tuple(tuple(row.get(k, 0) for k in range(n)) for row in rows)
    return AssignmentSystem(tuple(reps), E, tuple(phis), tuple(prods))


def _kernel(system: AssignmentSystem):
    H, T, pivots = hermite_rows(system.E, system.n_cols)
    return H, T, pivots


def _phase_of(t: Sequence[int], phi: Sequence[PhaseExp]) -> PhaseExp:
    return PhaseExp(sum((x * p.q for x, p in zip(t, phi)), Fraction(0)))


def _normalize_sign(t: Sequence[int]) -> Tuple[int, ...]:
    for x in t:
        if x:
            return tuple(t) if x > 0 else tuple(-v for v in t)
    return tuple(t)


def find_contradiction(system: AssignmentSystem) -> Optional[ContradictionWitness]:
    """Integer left-kernel vector with a nonzero accumulated phase, or ``None``.

    Candidates are the kernel lattice basis vectors and their pairwise sums
    and differences; the one with the smallest support wins, ties broken
    lexicographically by support and then by the vector itself.
    """
    if system.n_rows == 0:
        return None
    _, T, pivots = _kernel(system)
    basis = [_normalize_sign(T[i]) for i in range(len(pivots), system.n_rows)]
    candidates = list(basis)
    for a, b in itertools.combinations(basis, 2):
        candidates.append(_normalize_sign([x + y for x, y in zip(a, b)]))
        candidates.append(_normalize_sign([x - y for x, y in zip(a, b)]))
    best = None
    best_key = None
    for t in candidates:
        if not any(t):
            continue
        acc = _phase_of(t, system.phi)
        if acc.is_identity:
            continue
        support = tuple(i for i, x in enumerate(t) if x)
        key = (len(support), support, t)
        if best_key is None or key < best_key:
            best, best_key = ContradictionWitness(t, acc), key
    return best


def find_assignment(system: AssignmentSystem) -> Optional[Dict[WeylMonomial, PhaseExp]]:
    """Exact rational phases for every unknown, or ``None`` if contradictory.

    The returned values are checked by substitution before returning.
    """
    if system.n_rows == 0:
        return {rep: PhaseExp(0) for rep in system.unknowns}
    H, T, pivots = _kernel(system)
    rhs = matvec(T, [p.q for p in system.phi])
    rank = len(pivots)
    if any(Fraction(v) % 2 != 0 for v in rhs[rank:]):
        return None
    y = solve_echelon(H, pivots, rhs, system.n_cols)
    if any(not r.is_identity for r in system.residual(y)):
        raise AssertionError("internal error: assignment failed substitution check")
    return {rep: PhaseExp(v) for rep, v in zip(system.unknowns, y)}


def monomial_values(cert: Certificate, assignment: Mapping[WeylMonomial, PhaseExp]) -> Dict[str, PhaseExp]:
    """Lift unknown values to every named monomial of the certificate."""
    out = {}
    for key, mono in cert.monomials.items():
        rep, sign, s = unknown_key(mono)
        v = assignment.get(rep, PhaseExp(0)) if rep is not None else PhaseExp(0)
        out[key] = PhaseExp(s.q + sign * v.q)
    return out


def check_assignment(system: AssignmentSystem, assignment: Mapping[WeylMonomial, PhaseExp]) -> bool:
    """Substitute unknown values into every row."""
    try:
        y = [assignment[rep].q for rep in system.unknowns]
    except KeyError:
        return False
    return all(r.is_identity for r in system.residual(y))


# verification report ----------------------------------------------------------

@dataclass
class Verification:
    certificate: Certificate
    system: AssignmentSystem
    witness: Optional[ContradictionWitness]
    assignment: Optional[Dict[WeylMonomial, PhaseExp]]
    trace: List[dict] = field(default_factory=list)

    @property
    def status(self) -> str:
        return "contradiction" if self.witness is not None else "consistent"

    def to_json(self) -> dict:
        out = {"status": self.status, "trace": self.trace,
               "unknowns": [format_monomial(u) for u in self.system.unknowns]}
        if self.witness is not None:
            out["witness"] = {"t": list(self.witness.t),
                              "phase": self.witness.accumulated_phase.to_text(),
                              "contexts": list(self.witness.support)}
        else:
            vals = monomial_values(self.certificate, self.assignment)
            out["assignment"] = {k: v.to_text() for k, v in vals.items()}
        return out


def _row_text(system: AssignmentSystem, r: int) -> str:
    terms = []
    for c, e in enumerate(system.E[r]):
        if e:
            name = format_monomial(system.unknowns[c])
            terms.append(f"{e:+d}*[{name}]")
    lhs = " ".join(terms) if terms else "0"
    return f"{lhs} = {system.phi[r].q} (mod 2)"


def verify(cert: Certificate) -> Verification:
    system = compile_certificate(cert)
    witness = find_contradiction(system)
    assignment = None if witness is not None else find_assignment(system)
    if witness is None and assignment is None:
        raise AssertionError("internal error: neither witness nor assignment")
    if witness is not None and not witness.check(system):
        raise AssertionError("internal error: witness failed its own check")
    trace = []
    for ci, ctx in enumerate(cert.contexts):
        prod = system.products[ci]
        trace.append({
            "context": ci,
            "members": list(ctx.members),
            "product": format_monomial(prod),
            "product_phase": prod.phase.to_text(),
            "constraint": _row_text(system, ci),
        })
    return Verification(cert, system, witness, assignment, trace)


# file format -------------------------------------------------------------------

def certificate_to_dict(cert: Certificate) -> dict:
    return {
        "dofs": cert.system.n_dof,
        "theta": cert.system.theta_strings(),
        "monomials": {k: format_monomial(v) for k, v in cert.monomials.items()},
        "contexts": [list(c.members) for c in cert.contexts],
    }


def certificate_from_dict(data: Mapping) -> Certificate:
    try:
        dofs = data["dofs"]
        theta = data.get("theta")
        mono_text = data["monomials"]
        contexts = data["contexts"]
    except (KeyError, TypeError, AttributeError) as exc:
        raise CertificateError(f"certificate is missing required key: {exc}") from None
    if not isinstance(mono_text, Mapping) or not isinstance(contexts, list):
        raise CertificateError("'monomials' must be an object and 'contexts' an array")
    try:
        system = DofSystem(dofs, theta)
        monos = {str(k): parse_monomial(str(v), system) for k, v in mono_text.items()}
    except WeylError as exc:
        raise CertificateError(str(exc)) from None
    ctxs = []
    for ci, c in enumerate(contexts):
        if not isinstance(c, list):
            raise CertificateError(f"context {ci} must be an array of ids", context=ci)
        ctxs.append(Context(str(x) for x in c))
    return Certificate(system, monos, ctxs, name=str(data.get("name", "")))


def load_certificate(path) -> Certificate:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CertificateError(f"{path}: not valid JSON ({exc})") from None
    return certificate_from_dict(data)


def dump_certificate(cert: Certificate, path) -> None:
    Path(path).write_text(json.dumps(certificate_to_dict(cert), indent=2) + "\n",
                          encoding="utf-8")


# built-in certificates -----------------------------------------------------------

def _from_texts(system: DofSystem, ids: Iterable[str], contexts, name: str) -> Certificate:
    monos = {i: parse_monomial(i, system) for i in ids}
    return Certificate(system, monos, contexts, name=name)


def builtin_peres2(theta: Sequence = ("1", "1")) -> Certificate:
    """Two dofs: four pair products, two regroupings, and the final product -I."""
    system = DofSystem(2, theta)
    singles = ["U1", "U1^-1", "U2", "U2^-1", "V1", "V1^-1", "V2", "V2^-1"]
    pairs = ["U1^-1 U2", "U1 V2", "V1 U2^-1", "V1^-1 V2^-1"]
    fours = ["U1^-1 U2 V1^-1 V2^-1", "U1 V2 V1 U2^-1"]
    contexts = [
        ["U1^-1", "U2"],
        ["U1", "V2"],
        ["V1", "U2^-1"],
        ["V1^-1", "V2^-1"],
        ["U1^-1 U2", "V1^-1 V2^-1"],
        ["U1 V2", "V1 U2^-1"],
        fours,
    ]
    return _from_texts(system, singles + pairs + fours, contexts, "peres2")


def builtin_mermin3(theta: Sequence = ("1", "1", "1")) -> Certificate:
    """Three dofs: four triple products that pairwise commute and multiply to -I."""
    system = DofSystem(3, theta)
    triples = [
        ["U1", "V2^-1", "V3^-1"],
        ["V1^-1", "U2", "V3"],
        ["V1", "V2", "U3"],
        ["U1^-1", "U2^-1", "U3^-1"],
    ]
    singles = sorted({g for t in triples for g in t})
    names = [" ".join(t) for t in triples]
    contexts = triples + [names]
    return _from_texts(system, singles + names, contexts, "mermin3")


BUILTINS = {"peres2": builtin_peres2, "mermin3": builtin_mermin3}


def builtin(name: str, theta: Sequence | None = None) -> Certificate:
    if name not in BUILTINS:
        raise CertificateError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
    return BUILTINS[name]() if theta is None else BUILTINS[name](theta)
