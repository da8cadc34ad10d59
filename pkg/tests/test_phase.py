from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from weylks.phase import MINUS_ONE, ONE, PhaseExp, parse_phase, phase_mul

from conftest import rationals


def test_normalized_into_zero_two():
    assert PhaseExp(3).q == 1
    assert PhaseExp(-1) == MINUS_ONE
    assert PhaseExp(Fraction(-1, 2)).q == Fraction(3, 2)
    assert PhaseExp("5/3").q == Fraction(5, 3)


def test_rejects_float():
    with pytest.raises(TypeError):
        PhaseExp(0.5)


@pytest.mark.parametrize("q,text,value", [
    (0, "+1", 1), (1, "-1", -1), (Fraction(1, 2), "+i", 1j), (Fraction(3, 2), "-i", -1j),
])
def test_quarter_turns_exact(q, text, value):
    p = PhaseExp(q)
    assert p.to_text() == text
    assert complex(p) == value
    assert parse_phase(text) == p


def test_general_text():
    p = PhaseExp(Fraction(1, 3))
    assert p.to_text() == "exp(i*pi*1/3)"
    assert parse_phase("exp(i*pi*1/3)") == p
    assert parse_phase("exp(i*pi)") == MINUS_ONE
    assert parse_phase("exp( i * pi * -2/3 )") == PhaseExp(Fraction(4, 3))
    assert abs(complex(p) - complex(0.5, 3 ** 0.5 / 2)) < 1e-15


@pytest.mark.parametrize("bad", ["", "2", "exp(pi)", "exp(i*pi*1/0)", "e^(i pi)", "0.5"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_phase(bad)


def test_constants():
    assert ONE.is_identity and not MINUS_ONE.is_identity
    assert MINUS_ONE * MINUS_ONE == ONE
    assert MINUS_ONE ** 3 == MINUS_ONE


@given(rationals(), rationals())
def test_group_laws(a, b):
    pa, pb = PhaseExp(a), PhaseExp(b)
    assert phase_mul(pa, pb) == phase_mul(pb, pa)
    assert pa * pa.inverse() == ONE
    assert abs(complex(pa * pb) - complex(pa) * complex(pb)) < 1e-12


@given(rationals(max_den=12))
def test_text_roundtrip(q):
    p = PhaseExp(q)
    assert parse_phase(p.to_text()) == p


@given(rationals(), st.integers(-5, 5))
def test_power(q, k):
    assert PhaseExp(q) ** k == PhaseExp(q * k)
