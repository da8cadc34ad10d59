"""Finite clock-and-shift model of the Weyl relations.

Each degree of freedom is represented on C^d with the clock matrix Z (for
U_j) and a power of the cyclic shift X (for V_j), chosen so that
``rep(U_j) rep(V_j) = exp(-i*pi*theta_j) rep(V_j) rep(U_j)`` holds exactly
up to rounding.  The model has discrete spectra, unlike position and
momentum; it checks the algebra (phases, products, commutation), not the
Schrodinger representation itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import List, Sequence, Tuple

import numpy as np

from .weyl import DofSystem, WeylError, WeylMonomial, product, symplectic_phase


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class MatrixRep:
    system: DofSystem
    d: int
    shift_powers: Tuple[int, ...]

    @property
    def omega(self) -> complex:
        return np.exp(2j * np.pi / self.d)

    @property
    def dim(self) -> int:
        return self.d ** self.system.n_dof

    def clock(self, power: int = 1) -> np.ndarray:
        k = np.arange(self.d)
        return np.diag(np.exp(2j * np.pi * ((power * k) % self.d) / self.d))

    def shift(self, power: int = 1) -> np.ndarray:
        # X|k> = |k+1 mod d>
        return np.roll(np.eye(self.d, dtype=complex), power % self.d, axis=0)

    def local_U(self, j: int, power: int = 1) -> np.ndarray:
        return self.clock(power)

    def local_V(self, j: int, power: int = 1) -> np.ndarray:
        return self.shift(self.shift_powers[j] * power)

    def embed(self, j: int, local: np.ndarray) -> np.ndarray:
        """Place a d x d operator on tensor factor j (0-based)."""
        eye = np.eye(self.d, dtype=complex)
        factors = [local if i == j else eye for i in range(self.system.n_dof)]
        return reduce(np.kron, factors)

    def U(self, j: int) -> np.ndarray:
        return self.embed(j, self.local_U(j))

    def V(self, j: int) -> np.ndarray:
        return self.embed(j, self.local_V(j))


def build_rep(system: DofSystem, d: int | None = None) -> MatrixRep:
    """Clock-and-shift model; the default ``d = 2 * lcm(denominators)`` is the smallest that works."""
    for t in system.theta:
        if not hasattr(t, "denominator"):
            raise OracleError(f"theta {t!r} is not rational; no finite representation")
    lcm = reduce(math.lcm, (t.denominator for t in system.theta), 1)
    if d is None:
        d = 2 * lcm
    if d < 2 or d % (2 * lcm):
        raise OracleError(f"dimension {d} must be a positive multiple of {2 * lcm}")
    # Z X^s = omega^s X^s Z, and omega^s = exp(-i*pi*theta) needs s = -theta*d/2 (mod d)
    powers = tuple(int((-t * d / 2) % d) for t in system.theta)
    return MatrixRep(system, d, powers)


def evaluate(rep: MatrixRep, a: WeylMonomial) -> np.ndarray:
    """Matrix of ``a``: canonical-order product of factors times its scalar phase."""
    if a.system != rep.system:
        raise WeylError("monomial belongs to a different DofSystem")
    local = [rep.local_U(j, a.m[j]) @ rep.local_V(j, a.n[j]) for j in range(a.system.n_dof)]
    return complex(a.phase) * reduce(np.kron, local)


def max_abs(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


def commutation_residual(rep: MatrixRep, j: int) -> float:
    """``max|U V - exp(-i*pi*theta_j) V U|`` for the pair on dof j."""
    u, v = rep.U(j), rep.V(j)
    theta = rep.system.theta[j]
    target = np.exp(-1j * np.pi * float(theta))
    return max_abs(u @ v - target * (v @ u))


def unitarity_residual(m: np.ndarray) -> float:
    return max_abs(m.conj().T @ m - np.eye(m.shape[0]))


def hermitian_parts(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Self-adjoint ``Re(M) = (M + M^*)/2`` and ``Im(M) = i (M^* - M)/2``."""
    mh = m.conj().T
    return (m + mh) / 2, 1j * (mh - m) / 2


def check_re_im_commutation(rep: MatrixRep, a: WeylMonomial, b: WeylMonomial,
                            tol: float = 1e-10) -> bool:
    """Whether the real and imaginary parts of two commuting unitaries all commute."""
    if not symplectic_phase(a, b).is_identity:
        raise OracleError("check_re_im_commutation needs symbolically commuting monomials")
    parts = [*hermitian_parts(evaluate(rep, a)), *hermitian_parts(evaluate(rep, b))]
    for i in range(len(parts)):
        for k in range(i + 1, len(parts)):
            x, y = parts[i], parts[k]
            if max_abs(x @ y - y @ x) > tol:
                return False
    return True


def simultaneous_eigenbasis(ops: Sequence[np.ndarray], seed: int = 0,
                            cluster_tol: float = 1e-6) -> np.ndarray:
    """Orthonormal common eigenbasis of pairwise-commuting normal matrices.

    Diagonalizes a random real combination of the Hermitian parts, then
    splits any remaining degenerate cluster by each Hermitian part in turn.
    """
    rng = np.random.default_rng(seed)
    herm = [h for m in ops for h in hermitian_parts(m)]
    coeffs = rng.standard_normal(len(herm))
    mix = sum(c * h for c, h in zip(coeffs, herm))
    mix = (mix + mix.conj().T) / 2
    w, vecs = np.linalg.eigh(mix)
    blocks = [vecs[:, lo:hi] for lo, hi in _clusters(w, cluster_tol)]
    return np.hstack([_refine(b, herm, 0, cluster_tol) for b in blocks])


def _clusters(w: np.ndarray, tol: float) -> List[Tuple[int, int]]:
    out, lo = [], 0
    for hi in range(1, len(w) + 1):
        if hi == len(w) or w[hi] - w[hi - 1] > tol:
            out.append((lo, hi))
            lo = hi
    return out


def _refine(vecs: np.ndarray, herm: List[np.ndarray], idx: int, tol: float) -> np.ndarray:
    # vecs spans a subspace invariant under every herm[k]; split it by herm[idx:]
    if vecs.shape[1] == 1 or idx == len(herm):
        return vecs
    sub = vecs.conj().T @ herm[idx] @ vecs
    sub = (sub + sub.conj().T) / 2
    w, u = np.linalg.eigh(sub)
    vecs = vecs @ u
    return np.hstack([_refine(vecs[:, lo:hi], herm, idx + 1, tol)
                      for lo, hi in _clusters(w, tol)])


def common_eigenstates(rep: MatrixRep, monomials: Sequence[WeylMonomial], seed: int = 0,
                       tol: float = 1e-8) -> List[Tuple[np.ndarray, Tuple[complex, ...]]]:
    """Simultaneous eigenvectors of commuting monomials with per-monomial eigenvalues."""
    for i in range(len(monomials)):
        for k in range(i + 1, len(monomials)):
            c = symplectic_phase(monomials[i], monomials[k])
            if not c.is_identity:
                raise OracleError(
                    f"monomials {i} and {k} do not commute (symplectic phase {c.to_text()})")
    mats = [evaluate(rep, m) for m in monomials]
    vecs = simultaneous_eigenbasis(mats, seed=seed)
    out = []
    for col in range(vecs.shape[1]):
        v = vecs[:, col]
        lams = []
        for m in mats:
            mv = m @ v
            lam = complex(np.vdot(v, mv))
            res = float(np.linalg.norm(mv - lam * v))
            if res > tol:
                raise OracleError(f"eigen-residual {res:.3e} exceeds {tol:g}")
            lams.append(lam)
        out.append((v, tuple(lams)))
    return out


def check_product_identity(rep: MatrixRep, monomials: Sequence[WeylMonomial]) -> Tuple[bool, float]:
    """Compare the symbolic ordered product with the matrix product; returns (ok, residual)."""
    sym = evaluate(rep, product(monomials, rep.system))
    mat = reduce(np.matmul, [evaluate(rep, m) for m in monomials])
    res = max_abs(sym - mat)
    return res <= 1e-10, res


@dataclass(frozen=True)
class Claim:
    """One numerically re-checked algebraic statement."""

    name: str
    residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.residual <= self.tol

    def to_json(self) -> dict:
        return {"claim": self.name, "residual": self.residual, "tol": self.tol, "ok": self.ok}


def check_certificate(cert, d: int | None = None, tol: float = 1e-10) -> List[Claim]:
    """Re-check the Weyl relations and every context of ``cert`` in the matrix model."""
    from .weyl import format_monomial

    rep = build_rep(cert.system, d)
    claims = [Claim(f"U{j + 1} V{j + 1} = exp(-i*pi*theta) V{j + 1} U{j + 1}",
                    commutation_residual(rep, j), tol) for j in range(cert.system.n_dof)]
    for ci, ctx in enumerate(cert.contexts):
        members = [cert.monomials[m] for m in ctx.members]
        mats = [evaluate(rep, m) for m in members]
        comm = 0.0
        for i in range(len(mats)):
            for k in range(i + 1, len(mats)):
                comm = max(comm, max_abs(mats[i] @ mats[k] - mats[k] @ mats[i]))
        claims.append(Claim(f"context {ci}: members commute", comm, tol))
        prod = product(members, cert.system)
        _, res = check_product_identity(rep, members)
        label = "I" if prod.is_scalar else format_monomial(prod.phase_free())
        claims.append(Claim(f"context {ci}: product = {prod.phase.to_text()} * {label}", res, tol))
    return claims
