import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from weylks.certificate import builtin
from weylks.oracle_grid import (
    Binding,
    GridError,
    GridSpec,
    GridState,
    apply_U,
    apply_V,
    apply_monomial,
    check_certificate_grid,
    check_eigenstate,
    default_binding,
    epr_table,
    find_ghz_analogues,
    make_binding,
    make_epr_delta,
    momentum_amplitudes,
    monomial_matrix,
    random_state,
    valid_bindings,
)
from weylks.weyl import DofSystem, parse_monomial, product


def test_spec_validation():
    with pytest.raises(GridError):
        GridSpec(2, 7)
    with pytest.raises(GridError):
        GridSpec(0, 8)
    with pytest.raises(GridError):
        GridSpec(1, 8, L=-1.0)
    spec = GridSpec(1, 8)
    with pytest.raises(GridError):
        spec.a_index(0.3)
    with pytest.raises(GridError):
        spec.b_index(0.3)


def test_bindings():
    assert valid_bindings(8, 1) == [(1, 4), (2, 2), (4, 1)]
    spec = GridSpec(2, 8)
    b = default_binding(spec, DofSystem(2))
    assert b.k == (1, 1) and b.s == (4, 4)
    assert b.theta() == (1, 1)
    assert make_binding(spec, b.a, b.b) == b
    with pytest.raises(GridError):
        default_binding(GridSpec(1, 2), DofSystem(1, ["1/3"]))


def test_weyl_relation_on_grid():
    spec = GridSpec(1, 8)
    b = default_binding(spec, DofSystem(1))
    psi = random_state(spec, 3)
    uv = apply_U(b.a, apply_V(b.b, psi))
    vu = apply_V(b.b, apply_U(b.a, psi))
    np.testing.assert_allclose(uv.amplitudes, -vu.amplitudes, atol=1e-12)


def test_translation_and_phase_are_unitary():
    spec = GridSpec(2, 6)
    psi = random_state(spec, 1)
    assert abs(psi.norm() - 1) < 1e-12
    assert abs(apply_V([spec.spacing, 0.0], psi).norm() - 1) < 1e-12
    assert abs(apply_U([1.0, 2.0], psi).norm() - 1) < 1e-12


@given(st.integers(0, 50), st.lists(st.integers(-1, 1), min_size=4, max_size=4))
def test_monomial_matches_sequential_generators(seed, e):
    spec = GridSpec(2, 4)
    s = DofSystem(2)
    b = default_binding(spec, s)
    A = s.monomial(e[:2], e[2:])
    psi = random_state(spec, seed)
    out = psi
    for j in reversed(range(2)):
        out = apply_V([b.b[i] * e[2 + j] if i == j else 0.0 for i in range(2)], out)
        out = apply_U([b.a[i] * e[j] if i == j else 0.0 for i in range(2)], out)
    np.testing.assert_allclose(apply_monomial(A, b, psi).amplitudes, out.amplitudes, atol=1e-12)


def test_minus_identity_on_random_states(sys2, sys3):
    spec = GridSpec(2, 8)
    b = default_binding(spec, sys2)
    pair = [parse_monomial("U1^-1 U2 V1^-1 V2^-1", sys2), parse_monomial("U1 V2 V1 U2^-1", sys2)]
    for seed in range(100):
        psi = random_state(spec, seed)
        out = psi
        for m in reversed(pair):
            out = apply_monomial(m, b, out)
        assert np.max(np.abs(out.amplitudes + psi.amplitudes)) < 1e-10


def test_epr_table_frozen():
    _, rows = epr_table(GridSpec(2, 8))
    assert [r["eigenstate"] for r in rows] == [True, True, False, False]
    c0 = complex(*rows[0]["c"])
    c1 = complex(*rows[1]["c"])
    assert abs(c0 - 1) < 1e-10 and abs(c1 + 1) < 1e-10
    assert rows[2]["residual"] > 0.5


def test_epr_delta_momentum_correlation():
    spec = GridSpec(2, 8)
    p = momentum_amplitudes(make_epr_delta(spec))
    nz = np.argwhere(np.abs(p) > 1e-9)
    assert all((i + j) % spec.N == 0 for i, j in nz)
    with pytest.raises(GridError):
        make_epr_delta(GridSpec(3, 4))


def test_check_eigenstate_errors():
    spec = GridSpec(2, 4)
    s = DofSystem(2)
    zero = GridState(np.zeros(spec.shape, complex), spec, False)
    with pytest.raises(GridError):
        check_eigenstate(zero, s.U(1), default_binding(spec, s))
    with pytest.raises(GridError):
        apply_monomial(s.U(1), Binding(spec, (1, 1), (1, 1)), random_state(spec))


def test_ghz_analogues_n4():
    found = find_ghz_analogues(GridSpec(3, 4))
    assert len(found) == 64
    for g in found:
        assert abs(np.prod(g.eigenvalues) + 1) < 1e-8
        assert max(g.residuals) < 1e-8
    with pytest.raises(GridError):
        find_ghz_analogues(GridSpec(2, 4))


def test_monomial_matrix_is_unitary():
    spec = GridSpec(2, 4)
    s = DofSystem(2)
    m = monomial_matrix(parse_monomial("U1 V2^-1", s), default_binding(spec, s))
    np.testing.assert_allclose(m.conj().T @ m, np.eye(16), atol=1e-12)


def test_state_json_roundtrip():
    psi = random_state(GridSpec(2, 4), 7)
    back = GridState.from_json(json.dumps(psi.to_json()))
    np.testing.assert_array_equal(back.amplitudes, psi.amplitudes)
    assert back.spec == psi.spec


@pytest.mark.parametrize("name,n", [("peres2", 2), ("mermin3", 3)])
def test_certificate_on_grid(name, n):
    claims = check_certificate_grid(builtin(name), GridSpec(n, 4), n_states=5)
    assert all(c.ok for c in claims)
    with pytest.raises(GridError):
        check_certificate_grid(builtin(name), GridSpec(n + 1, 4))
