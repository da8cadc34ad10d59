"""Bounded search for parity obstructions among Weyl monomials.

The search space is a pool of *contexts*, built level by level:

* level 1: pairwise-commuting sets of generator powers ``U_j^k``/``V_j^k``
  with distinct unknown columns, whose product stays within the exponent
  bound;
* level L >= 2: pairwise-commuting sets of composite monomials produced as
  products at earlier levels (at least one from level L - 1), whose product
  is a scalar or a fresh in-bound monomial.

A set of contexts can only be contradictory if every unknown column it
touches is touched at least twice ("closed").  The kernel enumerates closed
sets of exactly ``k`` contexts for ``k = 1, 2, ...``; each candidate is then
compiled and checked exactly, cheapest first.  The first contradictory set is
minimal by context count, then by total member count, then by pool index.

Exhaustion of the pool within ``max_contexts`` proves absence only for this
level-bounded grammar, not in general.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .certificate import Certificate, Verification, verify
from .weyl import DofSystem, WeylMonomial, format_monomial, _as_fraction

Exps = Tuple[int, ...]


class SearchError(ValueError):
    pass


@dataclass(frozen=True)
class SearchParams:
    n_dof: int
    max_exponent: int = 1
    max_context_size: int = 4
    max_contexts: int = 7
    max_level: int = 2
    node_budget: int = 10 ** 7
    time_budget: Optional[float] = None
    theta: Optional[Tuple] = None
    u_only: bool = False
    symmetry: bool = True
    max_pool: int = 2_000_000

    def __post_init__(self):
        if self.n_dof < 1:
            raise SearchError("n_dof must be positive")
        if self.max_exponent < 0:
            raise SearchError("max_exponent must be non-negative")
        for name in ("max_context_size", "max_contexts", "max_level", "node_budget", "max_pool"):
            if getattr(self, name) < 1:
                raise SearchError(f"{name} must be positive")
        if self.max_context_size < 2:
            raise SearchError("max_context_size must be at least 2")
        if self.time_budget is not None and not self.time_budget > 0:
            raise SearchError("time_budget must be positive")
        theta = self.theta if self.theta is not None else (1,) * self.n_dof
        object.__setattr__(self, "theta", tuple(_as_fraction(t) for t in theta))
        # validates length and nonzero entries
        DofSystem(self.n_dof, self.theta)

    @property
    def system(self) -> DofSystem:
        return DofSystem(self.n_dof, self.theta)

    @property
    def experimental(self) -> bool:
        return not self.system.all_odd_integer


# -- exponent-vector helpers (interleaved m1, n1, m2, n2, ...) ---------------

def _to_monomial(e: Exps, system: DofSystem) -> WeylMonomial:
    return system.monomial(e[0::2], e[1::2])


def _canonical(e: Exps) -> Exps:
    for x in e:
        if x:
            return e if x > 0 else tuple(-y for y in e)
    return e


def column_key(e: Exps) -> Exps:
    """Unknown column of a phase-free monomial.

    A single generator power shares its column with its inverse; every other
    monomial has its own column.
    """
    nz = [x for x in e if x]
    if len(nz) == 1 and nz[0] < 0:
        return tuple(-x for x in e)
    return e


def _commutes(a: Exps, b: Exps, theta: Sequence[Fraction]) -> bool:
    c = sum(t * (a[2 * j] * b[2 * j + 1] - a[2 * j + 1] * b[2 * j])
            for j, t in enumerate(theta))
    return c % 2 == 0


def _order_key(e: Exps) -> tuple:
    # earliest slot first, then smaller powers, positive before negative
    return tuple((x == 0, abs(x), x < 0) for x in e)


def _is_generator(e: Exps) -> bool:
    return sum(1 for x in e if x) == 1


def enumerate_monomials(params: SearchParams) -> List[WeylMonomial]:
    """Phase-free monomials with exponents in ``[-e, e]``, one per inverse pair, lexicographic."""
    e = params.max_exponent
    width = 2 * params.n_dof
    rng = range(-e, e + 1)
    out = set()
    for v in itertools.product(rng, repeat=width):
        if params.u_only and any(v[1::2]):
            continue
        out.add(_canonical(v))
    system = params.system
    return [_to_monomial(v, system) for v in sorted(out)]


# -- context pool ------------------------------------------------------------

@dataclass(frozen=True)
class PoolContext:
    members: Tuple[Exps, ...]
    product: Exps
    level: int

    @property
    def columns(self) -> Tuple[Exps, ...]:
        cols = [column_key(m) for m in self.members]
        if any(self.product):
            cols.append(column_key(self.product))
        return tuple(cols)


@dataclass
class SearchSpace:
    params: SearchParams
    contexts: List[PoolContext]
    columns: List[Exps]
    ctx_ptr: np.ndarray
    ctx_cols: np.ndarray
    col_ptr: np.ndarray
    col_ctx: np.ndarray
    use_ptr: np.ndarray
    use_cols: np.ndarray
    prod_col: np.ndarray
    prd_ptr: np.ndarray
    prd_ctx: np.ndarray
    starts: np.ndarray
    level_sizes: Dict[int, int]
    n_monomials: int

    @property
    def max_row(self) -> int:
        return int(np.max(np.diff(self.ctx_ptr))) if len(self.contexts) else 0

    def kernel_arrays(self) -> tuple:
        return (self.ctx_ptr, self.ctx_cols, self.col_ptr, self.col_ctx, self.use_ptr,
                self.use_cols, self.prod_col, self.prd_ptr, self.prd_ctx, len(self.columns))

    def summary(self) -> dict:
        return {
            "monomial_classes": self.n_monomials,
            "contexts": len(self.contexts),
            "contexts_per_level": {str(k): v for k, v in sorted(self.level_sizes.items())},
            "columns": len(self.columns),
            "orbit_representatives": int(len(self.starts)),
        }


def _generator_powers(params: SearchParams) -> List[Exps]:
    width = 2 * params.n_dof
    out = []
    for slot in range(width):
        if params.u_only and slot % 2:
            continue
        for p in range(-params.max_exponent, params.max_exponent + 1):
            if p:
                v = [0] * width
                v[slot] = p
                out.append(tuple(v))
    return sorted(out)


def _commute_matrix(items: np.ndarray, theta: Sequence[Fraction]) -> np.ndarray:
    """Boolean matrix of pairwise commutation for rows of interleaved exponents."""
    lcm = 1
    for t in theta:
        lcm = lcm * t.denominator // math.gcd(lcm, t.denominator)
    w = np.array([int(t * lcm) for t in theta], dtype=np.int64)
    m = items[:, 0::2].astype(np.int64) * w
    n = items[:, 1::2].astype(np.int64)
    # lcm * symplectic phase; commuting means it is a multiple of 2 * lcm
    c = m @ n.T - (m @ n.T).T
    return c % (2 * lcm) == 0


def _cliques(adj: np.ndarray, max_size: int, limit: int) -> Dict[int, np.ndarray]:
    """Index arrays (by size) of cliques of ``adj`` with 2..max_size vertices, ascending."""
    n = len(adj)
    total = [0]
    bits = [sum(1 << int(k) for k in np.flatnonzero(adj[i, i + 1:]) + i + 1) for i in range(n)]
    out: Dict[int, List[Tuple[int, ...]]] = {k: [] for k in range(2, max_size + 1)}

    def grow(clique: Tuple[int, ...], cand: int) -> None:
        while cand:
            low = cand & -cand
            i = low.bit_length() - 1
            cand ^= low
            nxt = clique + (i,)
            out[len(nxt)].append(nxt)
            total[0] += 1
            if total[0] > limit:
                raise SearchError(f"more than {limit} commuting sets in the context pool; "
                                  "lower the context size or raise the pool limit")
            if len(nxt) < max_size:
                grow(nxt, cand & bits[i])

    for i in range(n):
        grow((i,), bits[i])
    return {k: np.array(v, dtype=np.int64).reshape(-1, k) for k, v in out.items() if v}


def _column_keys(x: np.ndarray) -> np.ndarray:
    """Vectorized ``column_key`` over rows."""
    nz = x != 0
    single = nz.sum(axis=1) == 1
    neg = (x * nz).sum(axis=1) < 0
    flip = single & neg
    out = x.copy()
    out[flip] = -out[flip]
    return out


def _build_pool(params: SearchParams) -> List[PoolContext]:
    theta = params.theta
    bound = params.max_exponent
    contexts: List[PoolContext] = []
    level_of: Dict[Exps, int] = {}

    def harvest(items: List[Exps], level: int, fresh: Optional[np.ndarray]) -> None:
        x = np.array(items, dtype=np.int64).reshape(len(items), 2 * params.n_dof)
        keys = _column_keys(x)
        adj = _commute_matrix(x, theta)
        # members need distinct columns
        adj &= ~(keys[:, None, :] == keys[None, :, :]).all(axis=2)
        for size, idx in sorted(_cliques(adj, params.max_context_size, params.max_pool).items()):
            ok = np.ones(len(idx), dtype=bool)
            if fresh is not None:
                ok &= fresh[idx].any(axis=1)
            prod = x[idx].sum(axis=1)
            ok &= (np.abs(prod) <= bound).all(axis=1)
            scalar = ~prod.any(axis=1)
            if level == 1:
                ok &= ~scalar
            pkeys = _column_keys(prod)
            ok &= scalar | ~(keys[idx] == pkeys[:, None, :]).all(axis=2).any(axis=1)
            for row in np.flatnonzero(ok):
                members = tuple(sorted((items[i] for i in idx[row]), key=_order_key))
                p = tuple(int(v) for v in prod[row])
                contexts.append(PoolContext(members, p, level))
                if any(p) and not _is_generator(p):
                    level_of.setdefault(p, level)

    harvest(_generator_powers(params), 1, None)
    for level in range(2, params.max_level + 1):
        items = sorted(level_of)
        if not items:
            break
        fresh = np.array([level_of[v] == level - 1 for v in items])
        if not fresh.any():
            break
        harvest(items, level, fresh)

    keys = {m: _order_key(m) for c in contexts for m in c.members}
    contexts.sort(key=lambda c: (c.level, tuple(keys[m] for m in c.members)))
    return contexts


# -- symmetry ----------------------------------------------------------------

def _symmetry_generators(params: SearchParams) -> List[Callable[[Exps], Exps]]:
    """Relabelings of exponent vectors that preserve every commutation phase."""
    n = params.n_dof
    theta = params.theta
    gens: List[Callable[[Exps], Exps]] = []

    for i in range(n):
        for k in range(i + 1, n):
            if (theta[i] - theta[k]) % 2 == 0:
                def swap_dofs(v, i=i, k=k):
                    w = list(v)
                    w[2 * i:2 * i + 2], w[2 * k:2 * k + 2] = v[2 * k:2 * k + 2], v[2 * i:2 * i + 2]
                    return tuple(w)
                gens.append(swap_dofs)

    integer = all(t.denominator == 1 for t in theta)
    for j in range(n):
        if integer:
            # U_j -> U_j^-1 flips the sign of theta_j, harmless when theta_j is an integer
            def invert_u(v, j=j):
                w = list(v)
                w[2 * j] = -w[2 * j]
                return tuple(w)
            gens.append(invert_u)
            if not params.u_only:
                def swap_uv(v, j=j):
                    w = list(v)
                    w[2 * j], w[2 * j + 1] = v[2 * j + 1], v[2 * j]
                    return tuple(w)
                gens.append(swap_uv)
        elif not params.u_only:
            # U_j -> V_j, V_j -> U_j^-1 preserves any theta_j
            def rotate(v, j=j):
                w = list(v)
                w[2 * j], w[2 * j + 1] = -v[2 * j + 1], v[2 * j]
                return tuple(w)
            gens.append(rotate)
    if not integer:
        gens.append(lambda v: tuple(-x for x in v))
    return gens


def _orbit_representatives(contexts: List[PoolContext], params: SearchParams) -> List[int]:
    n = len(contexts)
    if not params.symmetry:
        return list(range(n))
    ids: Dict[Exps, int] = {}
    for c in contexts:
        for m in c.members:
            ids.setdefault(m, len(ids))
    rows = [tuple(sorted(ids[m] for m in c.members)) for c in contexts]
    index = {r: i for i, r in enumerate(rows)}
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in _symmetry_generators(params):
        try:
            perm = {i: ids[g(m)] for m, i in ids.items()}
        except KeyError:
            raise SearchError("symmetry generator leaves the context pool") from None
        for i, r in enumerate(rows):
            k = index.get(tuple(sorted(perm[m] for m in r)))
            if k is None:
                raise SearchError("symmetry generator leaves the context pool")
            a, b = find(i), find(k)
            if a != b:
                # the smaller index stays the root, so roots are orbit minima
                parent[max(a, b)] = min(a, b)
    return [i for i in range(n) if find(i) == i]


def _csr(lists: List[List[int]]) -> Tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(lists) + 1, dtype=np.int32)
    if lists:
        ptr[1:] = np.cumsum([len(x) for x in lists])
    return ptr, np.array([v for x in lists for v in x], dtype=np.int32)


def build_space(params: SearchParams) -> SearchSpace:
    contexts = _build_pool(params)
    col_index: Dict[Exps, int] = {}
    rows = [[col_index.setdefault(k, len(col_index)) for k in c.columns] for c in contexts]
    columns: List[Exps] = sorted(col_index, key=col_index.get)
    uses = [[col_index[column_key(m)] for m in c.members if not _is_generator(m)] for c in contexts]
    prod_col = np.array([col_index[column_key(c.product)] if any(c.product) else -1
                         for c in contexts], dtype=np.int32)
    by_col: List[List[int]] = [[] for _ in columns]
    made_by: List[List[int]] = [[] for _ in columns]
    for i, r in enumerate(rows):
        for x in r:
            by_col[x].append(i)
        if prod_col[i] >= 0:
            made_by[prod_col[i]].append(i)
    ctx_ptr, ctx_cols = _csr(rows)
    col_ptr, col_ctx = _csr(by_col)
    use_ptr, use_cols = _csr(uses)
    prd_ptr, prd_ctx = _csr(made_by)
    # producers sit at lower levels, hence lower indices: a set's minimum has no composite members
    starts = np.array([i for i in _orbit_representatives(contexts, params) if not uses[i]],
                      dtype=np.int32)
    levels: Dict[int, int] = {}
    for c in contexts:
        levels[c.level] = levels.get(c.level, 0) + 1
    return SearchSpace(params, contexts, columns, ctx_ptr, ctx_cols, col_ptr, col_ctx,
                       use_ptr, use_cols, prod_col, prd_ptr, prd_ctx,
                       starts, levels, len(enumerate_monomials(params)))


# -- driver --------------------------------------------------------------------

@dataclass
class SearchResult:
    status: str  # "found", "absent" or "exhausted"
    certificate: Optional[Certificate]
    verification: Optional[Verification]
    depth: Optional[int]
    nodes: int
    candidates_checked: int
    space: dict
    experimental: bool
    backend: str
    reason: str = ""
    elapsed: float = field(default=0.0, compare=False)

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "depth": self.depth,
            "nodes": self.nodes,
            "candidates_checked": self.candidates_checked,
            "space": self.space,
            "experimental": self.experimental,
        }
        if self.reason:
            out["reason"] = self.reason
        if self.verification is not None:
            out["witness"] = self.verification.to_json().get("witness")
        return out


def certificate_from_contexts(space: SearchSpace, chosen: Sequence[int], name: str = "") -> Certificate:
    system = space.params.system
    monomials: Dict[str, WeylMonomial] = {}
    ctx_ids: List[List[str]] = []
    for i in chosen:
        ids = []
        for e in space.contexts[i].members:
            mono = _to_monomial(e, system)
            text = format_monomial(mono)
            monomials[text] = mono
            ids.append(text)
        ctx_ids.append(ids)
    return Certificate(system, monomials, ctx_ids, name=name)


def search_obstruction(params: SearchParams, space: Optional[SearchSpace] = None,
                       backend: Optional[str] = None, chunk: int = 32) -> SearchResult:
    """Iterative deepening over closed context sets; see the module docstring."""
    t0 = time.perf_counter()
    if space is None:
        space = build_space(params)
    kernel, backend_name = kernels.get_kernel(backend)
    summary = space.summary()
    nodes = 0
    checked = 0
    deadline = None if params.time_budget is None else t0 + params.time_budget

    def result(status, cert=None, ver=None, depth=None, reason=""):
        return SearchResult(status, cert, ver, depth, nodes, checked, summary,
                            params.experimental, backend_name, reason,
                            time.perf_counter() - t0)

    if not space.contexts:
        return result("absent", reason="empty context pool")
    starts = space.starts
    # a single context always leaves its own product column dangling
    for depth in range(2, params.max_contexts + 1):
        found: List[Tuple[int, ...]] = []
        for lo in range(0, len(starts), chunk):
            sets, used, aborted = kernel(*space.kernel_arrays(), starts[lo:lo + chunk], depth,
                                         space.max_row, params.node_budget - nodes)
            nodes += used
            found.extend(sets)
            if aborted:
                return result("exhausted", reason=f"node budget {params.node_budget} reached at depth {depth}")
            if deadline is not None and time.perf_counter() > deadline:
                return result("exhausted", reason=f"time budget {params.time_budget}s reached at depth {depth}")
        order = sorted(set(found), key=lambda s: (sum(len(space.contexts[i].members) for i in s), s))
        for cand in order:
            checked += 1
            cert = certificate_from_contexts(space, cand, name=f"search-n{params.n_dof}")
            ver = verify(cert)
            if ver.status == "contradiction":
                return result("found", cert, ver, depth)
            if deadline is not None and checked % 256 == 0 and time.perf_counter() > deadline:
                return result("exhausted", reason=f"time budget {params.time_budget}s reached at depth {depth}")
    return result("absent", reason=f"no contradiction with at most {params.max_contexts} contexts "
                                   f"in the level-{params.max_level} pool")
