"""Exact integer row reduction used by the certificate verifier.

Everything works on lists of Python ints, so there is no overflow.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

Matrix = List[List[int]]


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def hermite_rows(E: Sequence[Sequence[int]], ncols: int | None = None) -> Tuple[Matrix, Matrix, List[int]]:
    """Row echelon form over the integers with a unimodular transform.

    Returns ``(H, T, pivots)`` with ``T @ E == H``, ``det T = +-1``, the first
    ``len(pivots)`` rows of ``H`` nonzero with pivot columns ``pivots``
    (positive pivot entries, entries above each pivot reduced), and the
    remaining rows of ``H`` zero.  The rows of ``T`` below the rank are a
    lattice basis of the integer left kernel ``{t : t E = 0}``.
    """
    H = [list(map(int, row)) for row in E]
    r = len(H)
    c = ncols if ncols is not None else (len(H[0]) if H else 0)
    T = _identity(r)
    pivots: List[int] = []
    row = 0
    for col in range(c):
        if row >= r:
            break
        # Euclid on the column below `row` until a single nonzero entry remains
        while True:
            nz = [i for i in range(row, r) if H[i][col] != 0]
            if not nz:
                break
            k = min(nz, key=lambda i: abs(H[i][col]))
            if k != row:
                H[row], H[k] = H[k], H[row]
                T[row], T[k] = T[k], T[row]
            done = True
            p = H[row][col]
            for i in range(row + 1, r):
                if H[i][col]:
                    q = H[i][col] // p
                    if q:
                        H[i] = [a - q * b for a, b in zip(H[i], H[row])]
                        T[i] = [a - q * b for a, b in zip(T[i], T[row])]
                    if H[i][col]:
                        done = False
            if done:
                break
        if row < r and H[row][col] != 0:
            if H[row][col] < 0:
                H[row] = [-a for a in H[row]]
                T[row] = [-a for a in T[row]]
            p = H[row][col]
            for i in range(row):
                q = H[i][col] // p
                if q:
                    H[i] = [a - q * b for a, b in zip(H[i], H[row])]
                    T[i] = [a - q * b for a, b in zip(T[i], T[row])]
            pivots.append(col)
            row += 1
    return H, T, pivots


def left_kernel_basis(E: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Lattice basis of ``{t in Z^r : t E = 0}``."""
    _, T, pivots = hermite_rows(E, ncols)
    return [T[i] for i in range(len(pivots), len(T))]


def solve_echelon(H: Matrix, pivots: Sequence[int], rhs: Sequence[Fraction], ncols: int) -> List[Fraction]:
    """Rational solution of ``H[:rank] y = rhs[:rank]`` with free variables set to 0."""
    y = [Fraction(0)] * ncols
    for i in reversed(range(len(pivots))):
        col = pivots[i]
        acc = Fraction(rhs[i])
        for j in range(col + 1, ncols):
            if H[i][j]:
                acc -= H[i][j] * y[j]
        y[col] = acc / H[i][col]
    return y


def matvec(T: Sequence[Sequence[int]], v: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, v)) for row in T]
