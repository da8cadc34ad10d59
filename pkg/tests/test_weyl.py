from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from weylks.phase import MINUS_ONE, ONE, PhaseExp
from weylks.weyl import (
    DofSystem,
    WeylError,
    canonical_orientation,
    format_monomial,
    inverse,
    monomial_mul,
    parse_monomial,
    product,
    symplectic_phase,
)

from conftest import monomials, systems


def test_system_validation():
    assert DofSystem(2).theta == (1, 1)
    assert DofSystem(1, ["1/3"]).theta == (Fraction(1, 3),)
    with pytest.raises(WeylError):
        DofSystem(2, [1])
    with pytest.raises(WeylError):
        DofSystem(1, [0])
    with pytest.raises(WeylError):
        DofSystem(1, [0.5])
    with pytest.raises(WeylError):
        DofSystem(0)
    assert DofSystem(2, [1, 3]).all_odd_integer
    assert not DofSystem(2, [1, 2]).all_odd_integer


def test_anticommutation_at_theta_one(sys2):
    u, v = sys2.U(1), sys2.V(1)
    assert symplectic_phase(u, v) == MINUS_ONE
    assert u * v == v * u * sys2.identity().with_phase(1)
    # different dofs commute
    assert symplectic_phase(sys2.U(1), sys2.V(2)) == ONE


def test_normal_order_phase():
    s = DofSystem(1, ["1/3"])
    vu = s.V(1) * s.U(1)
    assert (vu.m, vu.n) == ((1,), (1,))
    assert vu.phase == PhaseExp(Fraction(1, 3))
    assert symplectic_phase(s.U(1), s.V(1)) == PhaseExp(Fraction(-1, 3))


def test_frozen_products(sys2):
    # the two four-fold products of the Peres-style square multiply to -I
    f1 = parse_monomial("U1^-1 U2 V1^-1 V2^-1", sys2)
    f2 = parse_monomial("U1 V2 V1 U2^-1", sys2)
    assert format_monomial(f1) == "U1^-1 V1^-1 U2 V2^-1"
    assert format_monomial(f2) == "-1 * U1 V1 U2^-1 V2"
    assert symplectic_phase(f1, f2) == ONE
    assert f1 * f2 == sys2.identity().with_phase(1)


def test_mermin_triples(sys3):
    texts = ["U1 V2^-1 V3^-1", "V1^-1 U2 V3", "V1 V2 U3", "U1^-1 U2^-1 U3^-1"]
    ops = [parse_monomial(t, sys3) for t in texts]
    for i in range(4):
        for k in range(i + 1, 4):
            assert ops[i].commutes_with(ops[k])
    assert product(ops) == sys3.identity().with_phase(1)


def test_parse_and_format():
    s = DofSystem(2)
    assert format_monomial(s.identity()) == "I"
    assert parse_monomial("I", s) == s.identity()
    assert parse_monomial("-1", s) == s.identity().with_phase(1)
    assert parse_monomial("+i * U1^(2)", s) == s.U(1, 2).with_phase(Fraction(1, 2))
    assert parse_monomial("exp(i*pi*1/3) * V2", s).phase == PhaseExp(Fraction(1, 3))
    for bad in ["", "W1", "U3", "U1^x", "U0"]:
        with pytest.raises(WeylError):
            parse_monomial(bad, s)


def test_mixed_systems_rejected():
    with pytest.raises(WeylError):
        DofSystem(1).U(1) * DofSystem(2).U(1)


def test_canonical_orientation(sys2):
    assert canonical_orientation(sys2.U(1, -1) * sys2.V(2)) == -1
    assert canonical_orientation(sys2.V(1)) == 1
    assert canonical_orientation(sys2.identity()) == 0


@given(st.data())
def test_associative(data):
    s = data.draw(systems())
    a, b, c = (data.draw(monomials(s)) for _ in range(3))
    assert (a * b) * c == a * (b * c)


@given(st.data())
def test_inverse(data):
    s = data.draw(systems())
    a = data.draw(monomials(s))
    assert a * inverse(a) == s.identity()
    assert inverse(a) * a == s.identity()
    assert inverse(inverse(a)) == a


@given(st.data())
def test_symplectic_phase_is_commutator(data):
    s = data.draw(systems())
    a, b = data.draw(monomials(s)), data.draw(monomials(s))
    c = symplectic_phase(a, b)
    assert a * b == (b * a).with_phase((b * a).phase.q + c.q)
    assert symplectic_phase(b, a) == c.inverse()


@given(st.data())
def test_text_roundtrip(data):
    s = data.draw(systems())
    a = data.draw(monomials(s))
    assert parse_monomial(format_monomial(a), s) == a


@given(st.data(), st.integers(-3, 3))
def test_power_matches_repeated_product(data, k):
    s = data.draw(systems(max_dof=2))
    a = data.draw(monomials(s, max_exp=2))
    expect = product([a] * k, s) if k >= 0 else product([inverse(a)] * -k, s)
    assert a ** k == expect
