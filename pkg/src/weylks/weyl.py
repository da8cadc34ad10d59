"""Normal-ordered Weyl monomials over a fixed set of degrees of freedom.

Conventions, fixed here and nowhere else:

* hbar = 1 and each degree of freedom j carries the single rational
  ``theta_j = a_j * b_j / pi``.
* The generators obey ``U_j V_j = exp(-i*pi*theta_j) V_j U_j``, equivalently
  ``V_j U_j = exp(+i*pi*theta_j) U_j V_j``.  Generators of different degrees
  of freedom commute.
* A monomial is stored as ``phase * prod_j U_j^{m_j} V_j^{n_j}``: dofs in
  ascending order, and within each dof every U factor sits left of every V
  factor.  Moving ``V_j^n`` to the right of ``U_j^m`` costs the phase
  exponent ``theta_j * n * m``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .phase import PhaseExp, parse_phase


class WeylError(ValueError):
    """Malformed monomial input or mixing of incompatible systems."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise WeylError(f"theta must be rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise WeylError(f"theta must be a rational 'p/q', got {value!r}") from None
    raise WeylError(f"theta must be an exact rational (int, Fraction or 'p/q' string), got {value!r}")


@dataclass(frozen=True)
class DofSystem:
    """Number of degrees of freedom and the per-dof symplectic ratio theta_j."""

    n_dof: int
    theta: tuple[Fraction, ...]

    def __init__(self, n_dof: int, theta: Iterable | None = None):
        if not isinstance(n_dof, int) or n_dof < 1:
            raise WeylError(f"n_dof must be a positive integer, got {n_dof!r}")
        if theta is None:
            theta = (Fraction(1),) * n_dof
        else:
            theta = tuple(_as_fraction(t) for t in theta)
        if len(theta) != n_dof:
            raise WeylError(f"expected {n_dof} theta values, got {len(theta)}")
        if any(t == 0 for t in theta):
            raise WeylError("theta_j must be nonzero; drop the generator pair instead")
        object.__setattr__(self, "n_dof", n_dof)
        object.__setattr__(self, "theta", theta)
        # theta_j = _weights[j] / _den, for integer arithmetic in products
        den = math.lcm(*(t.denominator for t in theta))
        object.__setattr__(self, "_den", den)
        object.__setattr__(self, "_weights", tuple(int(t * den) for t in theta))

    @property
    def all_odd_integer(self) -> bool:
        return all(t.denominator == 1 and t.numerator % 2 for t in self.theta)

    def identity(self) -> "WeylMonomial":
        zero = (0,) * self.n_dof
        return WeylMonomial(PhaseExp(0), zero, zero, self)

    def U(self, j: int, power: int = 1) -> "WeylMonomial":
        """``U_j^power`` with 1-based dof index ``j``."""
        return self._generator("U", j, power)

    def V(self, j: int, power: int = 1) -> "WeylMonomial":
        return self._generator("V", j, power)

    def _generator(self, kind: str, j: int, power: int) -> "WeylMonomial":
        if not 1 <= j <= self.n_dof:
            raise WeylError(f"dof index {j} out of range 1..{self.n_dof}")
        exps = [0] * self.n_dof
        exps[j - 1] = power
        zero = (0,) * self.n_dof
        if kind == "U":
            return WeylMonomial(PhaseExp(0), tuple(exps), zero, self)
        return WeylMonomial(PhaseExp(0), zero, tuple(exps), self)

    def monomial(self, m: Sequence[int], n: Sequence[int], phase=0) -> "WeylMonomial":
        return WeylMonomial(PhaseExp(phase), tuple(int(x) for x in m),
                            tuple(int(x) for x in n), self)

    def theta_strings(self) -> list[str]:
        return [str(t) for t in self.theta]


@dataclass(frozen=True)
class WeylMonomial:
    """``phase * prod_j U_j^{m_j} V_j^{n_j}`` in normal order (see module docstring)."""

    phase: PhaseExp
    m: tuple[int, ...]
    n: tuple[int, ...]
    system: DofSystem

    def __post_init__(self):
        k = self.system.n_dof
        if len(self.m) != k or len(self.n) != k:
            raise WeylError(f"exponent vectors must have length {k}")

    def __mul__(self, other: "WeylMonomial") -> "WeylMonomial":
        return monomial_mul(self, other)

    def __pow__(self, k: int) -> "WeylMonomial":
        if k < 0:
            return inverse(self) ** (-k)
        out = self.system.identity()
        for _ in range(k):
            out = monomial_mul(out, self)
        return out

    @property
    def exponents(self) -> tuple[int, ...]:
        """Interleaved ``(m_1, n_1, m_2, n_2, ...)``."""
        return tuple(x for pair in zip(self.m, self.n) for x in pair)

    @property
    def is_scalar(self) -> bool:
        return not any(self.m) and not any(self.n)

    @property
    def is_identity(self) -> bool:
        return self.is_scalar and self.phase.is_identity

    def phase_free(self) -> "WeylMonomial":
        return WeylMonomial(PhaseExp(0), self.m, self.n, self.system)

    def with_phase(self, phase) -> "WeylMonomial":
        return WeylMonomial(PhaseExp(phase), self.m, self.n, self.system)

    def support(self) -> tuple[int, ...]:
        """0-based dofs on which the monomial acts nontrivially."""
        return tuple(j for j in range(self.system.n_dof) if self.m[j] or self.n[j])

    def generator_count(self) -> int:
        """Number of distinct generators (U_j or V_j) with nonzero exponent."""
        return sum(1 for x in self.exponents if x)

    def commutes_with(self, other: "WeylMonomial") -> bool:
        return symplectic_phase(self, other).is_identity

    def to_text(self) -> str:
        return format_monomial(self)

    def __str__(self) -> str:
        return format_monomial(self)


def _check_same(a: WeylMonomial, b: WeylMonomial) -> None:
    if a.system != b.system:
        raise WeylError("monomials belong to different DofSystems")


def monomial_mul(a: WeylMonomial, b: WeylMonomial) -> WeylMonomial:
    """Normal-ordered product ``a * b``."""
    _check_same(a, b)
    system = a.system
    cross = sum(w * na * mb for w, na, mb in zip(system._weights, a.n, b.m))
    q = a.phase.q + b.phase.q
    if cross:
        q += Fraction(cross, system._den)
    return WeylMonomial(
        PhaseExp(q),
        tuple(x + y for x, y in zip(a.m, b.m)),
        tuple(x + y for x, y in zip(a.n, b.n)),
        a.system,
    )


def symplectic_phase(a: WeylMonomial, b: WeylMonomial) -> PhaseExp:
    """The phase c with ``a b = exp(i*pi*c) b a``."""
    _check_same(a, b)
    total = sum(w * (na * mb - ma * nb)
                for w, ma, na, mb, nb in zip(a.system._weights, a.m, a.n, b.m, b.n))
    return PhaseExp(Fraction(total, a.system._den))


def inverse(a: WeylMonomial) -> WeylMonomial:
    """Exact inverse; negating exponents costs the reordering phase theta*m*n per dof."""
    correction = sum(w * mj * nj for w, mj, nj in zip(a.system._weights, a.m, a.n))
    return WeylMonomial(
        PhaseExp(-a.phase.q + Fraction(correction, a.system._den)),
        tuple(-x for x in a.m),
        tuple(-x for x in a.n),
        a.system,
    )


def product(monomials: Iterable[WeylMonomial], system: DofSystem | None = None) -> WeylMonomial:
    """Ordered product of a sequence of monomials (identity when empty)."""
    out = None
    for mono in monomials:
        out = mono if out is None else monomial_mul(out, mono)
    if out is None:
        if system is None:
            raise WeylError("empty product needs an explicit system")
        return system.identity()
    return out


# text syntax ---------------------------------------------------------------

_GEN_RE = re.compile(r"^([UV])(\d+)(?:\^\(?([+-]?\d+)\)?)?$")


def format_monomial(a: WeylMonomial) -> str:
    """Canonical text, e.g. ``-1 * U1^-1 V1^-1 U2 V2^-1``; parses back exactly."""
    parts = []
    for j in range(a.system.n_dof):
        for kind, e in (("U", a.m[j]), ("V", a.n[j])):
            if e == 1:
                parts.append(f"{kind}{j + 1}")
            elif e:
                parts.append(f"{kind}{j + 1}^{e}")
    body = " ".join(parts) if parts else "I"
    if a.phase.is_identity:
        return body
    return f"{a.phase.to_text()} * {body}"


def parse_monomial(text: str, system: DofSystem) -> WeylMonomial:
    """Parse the monomial text syntax.

    An optional leading phase (``+1``, ``-1``, ``+i``, ``-i`` or
    ``exp(i*pi*p/q)``) followed by ``*``, then generator powers such as
    ``U1^-1 V2`` written in any order.  Factors are multiplied left to
    right, so non-normal-ordered input picks up the reordering phase.
    ``I`` denotes the identity.
    """
    s = text.strip()
    if not s:
        raise WeylError("empty monomial text")
    phase = PhaseExp(0)
    body = s
    # a leading phase is separated from the body by '*'
    m = re.match(r"^(exp\([^)]*\)|[+-]?1|[+-]?i)\s*(?:\*\s*(.*))?$", s)
    if m:
        phase = parse_phase(m.group(1))
        body = m.group(2) if m.group(2) is not None else "I"
    tokens = [t for t in re.split(r"[\s*]+", body.strip()) if t]
    if not tokens:
        raise WeylError(f"no generators in {text!r}")
    out = system.identity().with_phase(phase)
    for tok in tokens:
        if tok == "I":
            continue
        g = _GEN_RE.match(tok)
        if not g:
            raise WeylError(f"bad generator token {tok!r} in {text!r}")
        kind, j, e = g.group(1), int(g.group(2)), int(g.group(3) or 1)
        if not 1 <= j <= system.n_dof:
            raise WeylError(f"dof index {j} out of range 1..{system.n_dof} in {text!r}")
        out = monomial_mul(out, system._generator(kind, j, e))
    return out


def canonical_orientation(a: WeylMonomial) -> int:
    """+1 if the first nonzero interleaved exponent is positive, -1 if negative, 0 for scalars."""
    for x in a.exponents:
        if x:
            return 1 if x > 0 else -1
    return 0
