"""Schrodinger-representation oracle on a periodic grid.

Each degree of freedom lives on N equally spaced points of a circle of
length L (hbar = 1).  With ``a = 2*pi*k/L`` and ``b = s*L/N`` the operators

    (U_a psi)(x) = exp(-i a x) psi(x),      (V_b psi)(x) = psi(x - b)

are exact unitaries on the grid (pointwise phase and cyclic shift) and obey
``U_a V_b = exp(-i a b) V_b U_a`` with no discretization error.  Dirac
deltas become grid basis vectors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .oracle_matrix import simultaneous_eigenbasis
from .weyl import DofSystem, WeylMonomial, symplectic_phase

_COMMENSURATE_TOL = 1e-9


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    n_dof: int
    N: int
    L: float = 2 * math.pi

    def __post_init__(self):
        if self.n_dof < 1:
            raise GridError("n_dof must be positive")
        if self.N < 2 or self.N % 2:
            raise GridError(f"N must be even and >= 2, got {self.N}")
        if not self.L > 0:
            raise GridError("period L must be positive")

    @property
    def spacing(self) -> float:
        return self.L / self.N

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.N,) * self.n_dof

    def coords(self, j: int) -> np.ndarray:
        """Coordinates along axis j, broadcastable against the state array."""
        x = np.arange(self.N) * self.spacing
        shape = [1] * self.n_dof
        shape[j] = self.N
        return x.reshape(shape)

    def a_index(self, a: float) -> int:
        k = a * self.L / (2 * math.pi)
        kr = round(k)
        if abs(k - kr) > _COMMENSURATE_TOL:
            raise GridError(f"a={a!r} is not a multiple of 2*pi/L={2 * math.pi / self.L!r}")
        return int(kr)

    def b_index(self, b: float) -> int:
        s = b / self.spacing
        sr = round(s)
        if abs(s - sr) > _COMMENSURATE_TOL:
            raise GridError(f"b={b!r} is not a multiple of the spacing {self.spacing!r}")
        return int(sr)


@dataclass(frozen=True)
class GridState:
    amplitudes: np.ndarray
    spec: GridSpec
    normalized: bool = True

    def __post_init__(self):
        if self.amplitudes.shape != self.spec.shape:
            raise GridError(f"amplitudes shape {self.amplitudes.shape} != {self.spec.shape}")

    def norm(self) -> float:
        cell = self.spec.spacing ** self.spec.n_dof
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * cell))

    def normalize(self) -> "GridState":
        return GridState(self.amplitudes / self.norm(), self.spec, True)

    def scaled(self, c: complex) -> "GridState":
        return GridState(c * self.amplitudes, self.spec, self.normalized)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.amplitudes)))

    def to_json(self) -> dict:
        flat = self.amplitudes.reshape(-1)
        return {
            "n_dof": self.spec.n_dof, "N": self.spec.N, "L": self.spec.L,
            "normalized": self.normalized,
            "amplitudes": [[float(z.real), float(z.imag)] for z in flat],
        }

    @classmethod
    def from_json(cls, data) -> "GridState":
        if isinstance(data, str):
            data = json.loads(data)
        spec = GridSpec(int(data["n_dof"]), int(data["N"]), float(data["L"]))
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]]).reshape(spec.shape)
        return cls(amps, spec, bool(data.get("normalized", True)))


def random_state(spec: GridSpec, seed: int = 0) -> GridState:
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    return GridState(amps, spec, False).normalize()


def apply_U(a: Sequence[float], s: GridState) -> GridState:
    """Multiply by ``exp(-i a.x)``; every a_j must be a multiple of 2*pi/L."""
    spec = s.spec
    if len(a) != spec.n_dof:
        raise GridError("a must have one entry per dof")
    ks = [spec.a_index(x) for x in a]
    out = s.amplitudes
    for j, k in enumerate(ks):
        if k:
            # exact phase from the integer index: exp(-2*pi*i*k*n/N)
            n = np.arange(spec.N)
            ph = np.exp(-2j * np.pi * ((k * n) % spec.N) / spec.N)
            shape = [1] * spec.n_dof
            shape[j] = spec.N
            out = out * ph.reshape(shape)
    return GridState(np.array(out, copy=True), spec, s.normalized)


def apply_V(b: Sequence[float], s: GridState) -> GridState:
    """Translate: ``psi(x) -> psi(x - b)``, a cyclic shift by b_j / spacing points."""
    spec = s.spec
    if len(b) != spec.n_dof:
        raise GridError("b must have one entry per dof")
    shifts = [spec.b_index(x) for x in b]
    out = np.roll(s.amplitudes, shifts, axis=tuple(range(spec.n_dof)))
    return GridState(out, spec, s.normalized)


@dataclass(frozen=True)
class Binding:
    """Concrete ``(a_j, b_j)`` per dof, stored as grid indices ``(k_j, s_j)``."""

    spec: GridSpec
    k: Tuple[int, ...]
    s: Tuple[int, ...]

    @property
    def a(self) -> Tuple[float, ...]:
        return tuple(2 * math.pi * k / self.spec.L for k in self.k)

    @property
    def b(self) -> Tuple[float, ...]:
        return tuple(s * self.spec.spacing for s in self.s)

    def theta(self) -> Tuple[Fraction, ...]:
        """``a_j b_j / pi = 2 k_j s_j / N`` exactly."""
        return tuple(Fraction(2 * k * s, self.spec.N) for k, s in zip(self.k, self.s))


def make_binding(spec: GridSpec, a: Sequence[float], b: Sequence[float]) -> Binding:
    return Binding(spec, tuple(spec.a_index(x) for x in a), tuple(spec.b_index(x) for x in b))


def valid_bindings(N: int, theta: Fraction | int = 1) -> List[Tuple[int, int]]:
    """All index pairs ``(k, s)`` with ``1 <= k, s <= N - 1`` and ``2 k s / N = theta``."""
    theta = Fraction(theta)
    return [(k, s) for k in range(1, N) for s in range(1, N) if Fraction(2 * k * s, N) == theta]


def default_binding(spec: GridSpec, system: DofSystem) -> Binding:
    """Smallest modulation index realizing each theta_j (same choice on every dof)."""
    ks, ss = [], []
    for t in system.theta:
        opts = valid_bindings(spec.N, t)
        if not opts:
            raise GridError(f"no commensurate (a, b) with a*b = {t}*pi on an N={spec.N} grid")
        k, s = opts[0]
        ks.append(k)
        ss.append(s)
    return Binding(spec, tuple(ks), tuple(ss))


def _check_binding(system: DofSystem, binding: Binding) -> None:
    if system.n_dof != binding.spec.n_dof:
        raise GridError("binding and monomial have different numbers of dofs")
    got = binding.theta()
    for j, (t, g) in enumerate(zip(system.theta, got)):
        if t != g:
            raise GridError(f"binding realizes theta_{j + 1}={g}, monomial system needs {t}")


def apply_monomial(A: WeylMonomial, binding: Binding, s: GridState) -> GridState:
    """Apply ``phase * prod_j U_j^{m_j} V_j^{n_j}``, rightmost factor first."""
    _check_binding(A.system, binding)
    spec = s.spec
    out = s
    for j in reversed(range(spec.n_dof)):
        if A.n[j]:
            b = [0.0] * spec.n_dof
            b[j] = A.n[j] * binding.b[j]
            out = apply_V(b, out)
        if A.m[j]:
            a = [0.0] * spec.n_dof
            a[j] = A.m[j] * binding.a[j]
            out = apply_U(a, out)
    return out.scaled(complex(A.phase))


def monomial_matrix(A: WeylMonomial, binding: Binding) -> np.ndarray:
    """Dense matrix of ``A`` on the N**n_dof grid space (column k = image of basis vector k)."""
    spec = binding.spec
    dim = spec.N ** spec.n_dof
    cols = []
    for k in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[k] = 1.0
        st = GridState(e.reshape(spec.shape), spec, False)
        cols.append(apply_monomial(A, binding, st).amplitudes.reshape(-1))
    return np.stack(cols, axis=1)


def make_epr_delta(spec: GridSpec, x0: float = 0.0) -> GridState:
    """Unit amplitude where ``x1 - x2 = x0 (mod L)``; an unnormalized delta-like state."""
    if spec.n_dof != 2:
        raise GridError("the EPR state needs exactly 2 dofs")
    d = spec.b_index(x0) % spec.N
    amps = np.zeros(spec.shape, dtype=complex)
    for i2 in range(spec.N):
        amps[(i2 + d) % spec.N, i2] = 1.0
    return GridState(amps, spec, normalized=False)


def momentum_amplitudes(s: GridState) -> np.ndarray:
    """Discrete Fourier transform over every axis (momentum index p_j = 0..N-1)."""
    return np.fft.fftn(s.amplitudes)


def check_eigenstate(s: GridState, A: WeylMonomial, binding: Binding,
                     tol: float = 1e-8) -> Tuple[bool, complex, float]:
    """Fit ``A s = c s`` from the largest-magnitude amplitude.

    Returns ``(is_eigen, c, residual)`` with the residual measured as
    ``max|A s - c s| / max|s|``.
    """
    amps = s.amplitudes.reshape(-1)
    scale = float(np.max(np.abs(amps)))
    if scale == 0.0:
        raise GridError("check_eigenstate needs a nonzero state")
    image = apply_monomial(A, binding, s).amplitudes.reshape(-1)
    i = int(np.argmax(np.abs(amps)))
    c = complex(image[i] / amps[i])
    # fixed-order reduction keeps the residual bitwise reproducible
    residual = float(np.max(np.abs(image - c * amps))) / scale
    return residual <= tol, c, residual


def mermin_products(system: DofSystem) -> List[WeylMonomial]:
    from .weyl import parse_monomial

    texts = ["U1 V2^-1 V3^-1", "V1^-1 U2 V3", "V1 V2 U3", "U1^-1 U2^-1 U3^-1"]
    return [parse_monomial(t, system) for t in texts]


@dataclass(frozen=True)
class GHZAnalogue:
    state: GridState
    eigenvalues: Tuple[complex, ...]
    residuals: Tuple[float, ...]


def find_ghz_analogues(spec: GridSpec, binding: Optional[Binding] = None, seed: int = 0,
                       tol: float = 1e-8) -> List[GHZAnalogue]:
    """Common eigenstates of the four commuting triple products on a 3-dof grid."""
    if spec.n_dof != 3:
        raise GridError("GHZ analogues need exactly 3 dofs")
    system = DofSystem(3)
    if binding is None:
        binding = default_binding(spec, system)
    _check_binding(system, binding)
    ops = mermin_products(system)
    for i in range(4):
        for k in range(i + 1, 4):
            assert symplectic_phase(ops[i], ops[k]).is_identity
    mats = [monomial_matrix(A, binding) for A in ops]
    vecs = simultaneous_eigenbasis(mats, seed=seed)
    out = []
    for col in range(vecs.shape[1]):
        st = GridState(vecs[:, col].reshape(spec.shape), spec, False).normalize()
        lams, res = [], []
        for A in ops:
            ok, c, r = check_eigenstate(st, A, binding, tol)
            if not ok:
                raise GridError(f"simultaneous eigenvector failed with residual {r:.3e}")
            lams.append(c)
            res.append(r)
        out.append(GHZAnalogue(st, tuple(lams), tuple(res)))
    return out


def check_certificate_grid(cert, spec: GridSpec, binding: Optional[Binding] = None,
                           n_states: int = 100, seed: int = 0, tol: float = 1e-10):
    """Re-check every context of ``cert`` on random grid states.

    For each context the members are applied one after another and compared
    with the symbolic product; members are also checked to commute.
    """
    from .oracle_matrix import Claim
    from .weyl import format_monomial, product

    if spec.n_dof != cert.system.n_dof:
        raise GridError("grid and certificate have different numbers of dofs")
    if binding is None:
        binding = default_binding(spec, cert.system)
    _check_binding(cert.system, binding)
    states = [random_state(spec, seed + i) for i in range(n_states)]
    claims = []
    for ci, ctx in enumerate(cert.contexts):
        members = [cert.monomials[m] for m in ctx.members]
        prod = product(members, cert.system)
        res_prod = res_comm = 0.0
        for st in states:
            out = st
            for m in reversed(members):
                out = apply_monomial(m, binding, out)
            target = apply_monomial(prod, binding, st)
            res_prod = max(res_prod, float(np.max(np.abs(out.amplitudes - target.amplitudes))) / st.max_abs())
            for i in range(len(members)):
                for k in range(i + 1, len(members)):
                    ab = apply_monomial(members[i], binding, apply_monomial(members[k], binding, st))
                    ba = apply_monomial(members[k], binding, apply_monomial(members[i], binding, st))
                    res_comm = max(res_comm, float(np.max(np.abs(ab.amplitudes - ba.amplitudes))) / st.max_abs())
        label = "I" if prod.is_scalar else format_monomial(prod.phase_free())
        claims.append(Claim(f"context {ci}: members commute", res_comm, tol))
        claims.append(Claim(f"context {ci}: product = {prod.phase.to_text()} * {label}", res_prod, tol))
    return claims


def epr_table(spec: GridSpec, x0: float = 0.0, tol: float = 1e-8):
    """Eigen-checks of the delta state on x1 - x2 = x0 for the four pair products.

    The two four-fold products have it as an eigenstate; the pair products
    ``U1 V2`` and ``V1 U2^-1`` do not.
    """
    from .weyl import parse_monomial

    system = DofSystem(2)
    binding = default_binding(spec, system)
    state = make_epr_delta(spec, x0)
    rows = []
    for text in ("U1^-1 U2 V1^-1 V2^-1", "U1 V2 V1 U2^-1", "U1 V2", "V1 U2^-1"):
        mono = parse_monomial(text, system)
        ok, c, r = check_eigenstate(state, mono, binding, tol)
        rows.append({"operator": text, "eigenstate": ok, "c": [c.real, c.imag], "residual": r})
    return binding, rows
