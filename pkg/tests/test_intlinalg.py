from fractions import Fraction

from hypothesis import given, strategies as st

from weylks.intlinalg import hermite_rows, left_kernel_basis, matvec, solve_echelon


def _det(M):
    M = [[Fraction(x) for x in row] for row in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return det


def test_small_example():
    E = [[1, -1, 0], [0, 1, -1], [-1, 0, 1]]
    H, T, piv = hermite_rows(E)
    assert piv == [0, 1]
    assert H[2] == [0, 0, 0]
    assert left_kernel_basis(E, 3) == [[1, 1, 1]]


matrices = st.integers(1, 5).flatmap(
    lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=1, max_size=6))


@given(matrices)
def test_hermite_properties(E):
    c = len(E[0])
    H, T, piv = hermite_rows(E, c)
    r = len(E)
    for i in range(r):
        assert [sum(T[i][k] * E[k][j] for k in range(r)) for j in range(c)] == H[i]
    assert abs(_det(T)) == 1
    for i, p in enumerate(piv):
        assert H[i][p] > 0
        assert all(H[i][j] == 0 for j in range(p))
        for above in range(i):
            assert 0 <= H[above][p] < H[i][p]
    assert all(not any(H[i]) for i in range(len(piv), r))
    for t in left_kernel_basis(E, c):
        assert all(sum(t[k] * E[k][j] for k in range(r)) == 0 for j in range(c))


@given(matrices, st.data())
def test_solve_consistent(E, data):
    c = len(E[0])
    y0 = [Fraction(data.draw(st.integers(-4, 4)), data.draw(st.integers(1, 3))) for _ in range(c)]
    b = [sum(e * v for e, v in zip(row, y0)) for row in E]
    H, T, piv = hermite_rows(E, c)
    rhs = matvec(T, b)
    assert all(v == 0 for v in rhs[len(piv):])
    y = solve_echelon(H, piv, rhs, c)
    assert [sum(e * v for e, v in zip(row, y)) for row in E] == b
