"""Exact unit-circle phases e^{i*pi*q} with rational q kept in [0, 2)."""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

RationalLike = Union[int, str, Fraction, "PhaseExp"]

_TWO = Fraction(2)


@dataclass(frozen=True, order=True, init=False)
class PhaseExp:
    """The unit complex number ``exp(i*pi*q)``.

    ``q`` is stored as a reduced :class:`~fractions.Fraction` normalized to
    ``0 <= q < 2``, so equal phases always compare equal.
    """

    q: Fraction

    def __init__(self, q: RationalLike = 0):
        if isinstance(q, PhaseExp):
            q = q.q
        elif isinstance(q, float):
            raise TypeError("PhaseExp requires an exact rational, got float")
        if not isinstance(q, Fraction):
            q = Fraction(q)
        if not 0 <= q < _TWO:
            q = q % _TWO
        object.__setattr__(self, "q", q)

    def __mul__(self, other: "PhaseExp") -> "PhaseExp":
        return phase_mul(self, other)

    def __pow__(self, k: int) -> "PhaseExp":
        return PhaseExp(self.q * k)

    def inverse(self) -> "PhaseExp":
        return PhaseExp(-self.q)

    @property
    def is_identity(self) -> bool:
        return self.q == 0

    def __complex__(self) -> complex:
        q = self.q
        # exact values for the common quarter turns
        if q.denominator == 1:
            return 1 + 0j if q == 0 else -1 + 0j
        if q.denominator == 2:
            return 1j if q == Fraction(1, 2) else -1j
        return cmath.exp(1j * math.pi * float(q))

    def to_text(self) -> str:
        """Short text form: ``+1``, ``-1``, ``+i``, ``-i`` or ``exp(i*pi*p/q)``."""
        special = {Fraction(0): "+1", Fraction(1): "-1",
                   Fraction(1, 2): "+i", Fraction(3, 2): "-i"}
        if self.q in special:
            return special[self.q]
        return f"exp(i*pi*{self.q.numerator}/{self.q.denominator})"

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"PhaseExp({self.q})"


def phase_mul(p: PhaseExp, q: PhaseExp) -> PhaseExp:
    return PhaseExp(p.q + q.q)


_PHASE_RE = re.compile(
    r"^exp\(\s*i\s*\*\s*pi\s*(?:\*\s*(?P<num>[+-]?\d+)\s*(?:/\s*(?P<den>\d+))?)?\s*\)$"
)


def parse_phase(text: str) -> PhaseExp:
    """Parse ``+1``/``-1``/``+i``/``-i`` (sign optional on the ones) or ``exp(i*pi*p/q)``."""
    t = text.strip().replace(" ", "")
    table = {"+1": 0, "1": 0, "-1": 1, "+i": Fraction(1, 2), "i": Fraction(1, 2),
             "-i": Fraction(3, 2)}
    if t in table:
        return PhaseExp(table[t])
    m = _PHASE_RE.match(t)
    if m:
        if m.group("num") is None:
            return PhaseExp(1)
        num = int(m.group("num"))
        den = int(m.group("den") or 1)
        if den == 0:
            raise ValueError(f"zero denominator in phase {text!r}")
        return PhaseExp(Fraction(num, den))
    raise ValueError(f"cannot parse phase {text!r}")


ONE = PhaseExp(0)
MINUS_ONE = PhaseExp(1)
