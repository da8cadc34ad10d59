"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a one-line summary; the run ends with an "acceptance
criteria" section listing PASS/FAIL per criterion.
"""

import io
import itertools
import json
import random
import time
from fractions import Fraction
from functools import reduce

import numpy as np
import pytest

from weylks.certificate import (
    Certificate,
    CertificateError,
    builtin,
    check_assignment,
    load_certificate,
    verify,
)
from weylks.cli import main
from weylks.oracle_grid import (
    GridSpec,
    apply_monomial,
    check_certificate_grid,
    default_binding,
    epr_table,
    find_ghz_analogues,
    random_state,
)
from weylks.oracle_matrix import build_rep, check_certificate, evaluate, max_abs
from weylks.phase import PhaseExp
from weylks.weyl import DofSystem, monomial_mul, parse_monomial, symplectic_phase


@pytest.fixture
def note(record_property):
    def _note(criterion, detail):
        record_property("criterion", criterion)
        record_property("detail", detail)
    return _note


def _cli_json(tmp_path, *argv):
    path = tmp_path / "report.json"
    buf = io.StringIO()
    t0 = time.perf_counter()
    code = main([*argv, "--json", str(path)], out=buf)
    elapsed = time.perf_counter() - t0
    return code, json.loads(path.read_text()), elapsed


def test_c1_peres_obstruction(tmp_path, note):
    code, rep, elapsed = _cli_json(tmp_path, "verify", "--builtin", "peres2")
    w = rep["payload"]["witness"]
    note("1 peres2 contradiction", f"phase={w['phase']} contexts={len(w['contexts'])} {elapsed:.3f}s")
    assert code == 0 and rep["status"] == "contradiction"
    assert verify(builtin("peres2")).witness.accumulated_phase == PhaseExp(1)
    assert len(w["contexts"]) == 7
    assert elapsed < 1.0


def test_c2_mermin_obstruction(tmp_path, note):
    code, rep, elapsed = _cli_json(tmp_path, "verify", "--builtin", "mermin3")
    w = rep["payload"]["witness"]
    note("2 mermin3 contradiction", f"phase={w['phase']} contexts={len(w['contexts'])} {elapsed:.3f}s")
    assert code == 0 and rep["status"] == "contradiction"
    assert verify(builtin("mermin3")).witness.accumulated_phase == PhaseExp(1)
    assert len(w["contexts"]) == 5
    assert elapsed < 1.0


def test_c3_anticommutation(note):
    worst = 0.0
    for n in (1, 2, 3):
        s = DofSystem(n)
        rep = build_rep(s)
        for j in range(n):
            assert symplectic_phase(s.U(j + 1), s.V(j + 1)) == PhaseExp(1)
            u, v = rep.U(j), rep.V(j)
            worst = max(worst, max_abs(u @ v + v @ u))
    note("3 anticommutation", f"max|UV+VU|={worst:.2e}")
    assert worst < 1e-12


def test_c4_exhaustive_oracle_equivalence(note):
    t0 = time.perf_counter()
    s = DofSystem(2)
    # d = 4 keeps second powers distinct from the identity
    rep = build_rep(s, d=4)
    rng = range(-2, 3)
    monos = [s.monomial((a, c), (b, e)) for a, b, c, e in itertools.product(rng, repeat=4)]
    mats = np.stack([evaluate(rep, m) for m in monos])
    cache = {}

    def mat(ex):
        if ex not in cache:
            cache[ex] = evaluate(rep, s.monomial(ex[0::2], ex[1::2]))
        return cache[ex]

    worst = 0.0
    pairs = 0
    for i, a in enumerate(monos):
        prods = [monomial_mul(a, b) for b in monos]
        target = np.stack([complex(p.phase) * mat(p.exponents) for p in prods])
        got = np.matmul(mats[i], mats)
        worst = max(worst, max_abs(got - target))
        pairs += len(monos)
    elapsed = time.perf_counter() - t0
    note("4 exhaustive oracle equivalence", f"pairs={pairs} max residual={worst:.2e} {elapsed:.1f}s")
    assert pairs == 625 ** 2
    assert worst < 1e-10
    assert elapsed < 30.0


PAIR = ("U1^-1 U2 V1^-1 V2^-1", "U1 V2 V1 U2^-1")
QUAD = ("U1 V2^-1 V3^-1", "V1^-1 U2 V3", "V1 V2 U3", "U1^-1 U2^-1 U3^-1")


def test_c5_minus_identity_products(note):
    worst_m = worst_g = 0.0
    for texts, n, N in ((PAIR, 2, 8), (QUAD, 3, 4)):
        s = DofSystem(n)
        ms = [parse_monomial(t, s) for t in texts]
        rep = build_rep(s)
        m = reduce(np.matmul, [evaluate(rep, x) for x in ms])
        worst_m = max(worst_m, max_abs(m + np.eye(rep.dim)))
        spec = GridSpec(n, N)
        binding = default_binding(spec, s)
        for seed in range(100):
            psi = random_state(spec, seed)
            out = psi
            for x in reversed(ms):
                out = apply_monomial(x, binding, out)
            worst_g = max(worst_g, float(np.max(np.abs(out.amplitudes + psi.amplitudes))))
    note("5 -I products", f"matrix={worst_m:.2e} grid(100 states)={worst_g:.2e}")
    assert worst_m < 1e-10 and worst_g < 1e-10


def test_c6_epr_eigenstate(note):
    binding, rows = epr_table(GridSpec(2, 8), x0=0.0, tol=1e-10)
    assert binding.theta() == (1, 1)
    c = complex(*rows[0]["c"])
    c2 = complex(*rows[1]["c"])
    cc = abs(c * c2 + 1)
    res = max(rows[0]["residual"], rows[1]["residual"])
    note("6 EPR eigenstate", f"residual={res:.2e} |cc'+1|={cc:.2e} U1V2 residual={rows[2]['residual']:.2f}")
    assert rows[0]["eigenstate"] and rows[1]["eigenstate"]
    assert res < 1e-10 and cc < 1e-10
    assert rows[2]["operator"] == "U1 V2" and rows[2]["residual"] > 0.5


def test_c7_ghz_analogues(note):
    found = find_ghz_analogues(GridSpec(3, 4))
    worst = max(abs(np.prod(g.eigenvalues) + 1) for g in found)
    note("7 GHZ analogues", f"states={len(found)} max|prod+1|={worst:.2e}")
    assert found and worst < 1e-8


def _random_u_only(rnd):
    n = rnd.randint(1, 5)
    theta = [rnd.choice(["1", "3", "-1", "1/2", "2/3", "2"]) for _ in range(n)]
    s = DofSystem(n, theta)
    monos = {}
    for i in range(rnd.randint(1, 10)):
        m = [rnd.randint(-3, 3) for _ in range(n)]
        monos[f"m{i}"] = s.monomial(m, [0] * n, Fraction(rnd.randint(0, 7), 4))
    ids = sorted(monos)
    contexts = [rnd.sample(ids, rnd.randint(1, min(4, len(ids)))) for _ in range(rnd.randint(1, 10))]
    return Certificate(s, monos, contexts)


def test_c8_u_only_consistency(note):
    rnd = random.Random(20240501)
    ok = 0
    for _ in range(100):
        v = verify(_random_u_only(rnd))
        if v.status == "consistent" and check_assignment(v.system, v.assignment):
            ok += 1
    note("8 U-only certificates consistent", f"{ok}/100 with verified assignment")
    assert ok == 100


@pytest.mark.parametrize("n,N", [(3, 4), (2, 8)])
def test_c9_search_rediscovery(tmp_path, note, n, N):
    cert_path = tmp_path / "found.json"
    code, rep, elapsed = _cli_json(tmp_path, "search", "--dofs", str(n), "--max-exp", "1",
                                   "--emit", str(cert_path))
    assert code == 0 and rep["status"] == "found"
    cert = load_certificate(cert_path)
    v = verify(cert)
    # re-check in the style of criteria 1-5: exact witness, Weyl relations, products in both oracles
    matrix = check_certificate(cert)
    grid = check_certificate_grid(cert, GridSpec(n, N), n_states=100)
    worst = max(c.residual for c in matrix + grid)
    note(f"9 search --dofs {n}", f"{len(cert.contexts)} contexts, re-verified, "
                                 f"max residual={worst:.2e}, {elapsed:.1f}s")
    assert v.status == "contradiction" and v.witness.accumulated_phase == PhaseExp(1)
    assert all(c.ok for c in matrix) and all(c.ok for c in grid)
    assert elapsed < 60.0


def test_c10_even_theta_sensitivity(note):
    results = []
    for name, n in (("peres2", 2), ("mermin3", 3)):
        # every theta even: a consistent system with an assignment
        for t in ("2", "4", "-2"):
            v = verify(builtin(name, [t] * n))
            results.append(v.status == "consistent" and check_assignment(v.system, v.assignment))
        # one theta even: the contexts stop commuting, so no obstruction certificate exists
        for j in range(n):
            theta = ["1"] * n
            theta[j] = "2"
            with pytest.raises(CertificateError):
                builtin(name, theta)
            results.append(True)
    note("10 even-theta sensitivity", f"{sum(results)}/{len(results)} checks "
                                      "(all-even consistent, single-even rejected as non-commuting)")
    assert all(results)
