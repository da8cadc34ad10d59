"""Command-line front end: ``weylks verify|oracle|search|print``.

Exit codes: 0 for a completed run (a contradiction, a consistent system, a
found/absent/exhausted search are all results), 1 when a numerical check
fails its tolerance, 2 for malformed input or flags.

Human-readable tables go to standard output; ``--json PATH`` writes the
machine-readable run report.  Default tolerances can be overridden with
``WEYLKS_TOL_EIGEN`` (default 1e-8) and ``WEYLKS_TOL_ALGEBRAIC`` (default 1e-10).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from .certificate import (
    BUILTINS,
    Certificate,
    CertificateError,
    builtin,
    certificate_from_dict,
    certificate_to_dict,
    dump_certificate,
    load_certificate,
    verify,
)
from .oracle_grid import GridError, GridSpec, check_certificate_grid, epr_table, find_ghz_analogues
from .oracle_matrix import OracleError, check_certificate
from .search import SearchError, SearchParams, build_space, search_obstruction
from .weyl import WeylError

SCHEMA = "weylks.run/1"
EXIT_OK, EXIT_CHECK_FAILED, EXIT_BAD_INPUT = 0, 1, 2


def tolerance(kind: str) -> float:
    """Default tolerance for ``"eigen"`` or ``"algebraic"`` checks, env-overridable."""
    defaults = {"eigen": 1e-8, "algebraic": 1e-10}
    raw = os.environ.get(f"WEYLKS_TOL_{kind.upper()}")
    if raw is None:
        return defaults[kind]
    try:
        val = float(raw)
    except ValueError:
        raise UsageError(f"WEYLKS_TOL_{kind.upper()}={raw!r} is not a number") from None
    if not val > 0:
        raise UsageError(f"WEYLKS_TOL_{kind.upper()} must be positive")
    return val


class UsageError(ValueError):
    pass


@dataclass
class RunReport:
    command: List[str]
    inputs: dict = field(default_factory=dict)
    status: str = ""
    payload: dict = field(default_factory=dict)
    residuals: List[dict] = field(default_factory=list)
    timings: Optional[dict] = None

    def to_json(self) -> dict:
        out = {"schema": SCHEMA, "command": self.command, "inputs": self.inputs,
               "status": self.status, "payload": self.payload, "residuals": self.residuals}
        if self.timings is not None:
            out["timings"] = self.timings
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def parse_count(text: str) -> int:
    """Node counts: plain integers, ``10^6``, ``1e6`` or ``2*10^5``."""
    t = text.strip().replace(" ", "").replace("_", "")
    m = re.fullmatch(r"(?:(\d+)\*)?(\d+)\^(\d+)", t)
    if m:
        val = int(m.group(1) or 1) * int(m.group(2)) ** int(m.group(3))
    elif re.fullmatch(r"\d+", t):
        val = int(t)
    elif re.fullmatch(r"\d+(?:\.\d+)?[eE]\d+", t):
        f = float(t)
        if f != int(f):
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer count")
        val = int(f)
    else:
        raise argparse.ArgumentTypeError(f"cannot read {text!r} as a count (try 1000000 or 10^6)")
    if val < 1:
        raise argparse.ArgumentTypeError("count must be positive")
    return val


def _theta_list(text: str) -> List[str]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("theta needs at least one value")
    return parts


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _load(args, report: RunReport) -> Certificate:
    if args.builtin and args.path:
        raise UsageError("give either a certificate path or --builtin, not both")
    if args.builtin:
        if args.builtin not in BUILTINS:
            raise UsageError(f"unknown builtin {args.builtin!r}; choose from {sorted(BUILTINS)}")
        cert = builtin(args.builtin, getattr(args, "theta", None))
        canon = json.dumps(certificate_to_dict(cert), sort_keys=True).encode()
        report.inputs = {"builtin": args.builtin, "digest": _digest(canon)}
        return cert
    if not args.path:
        raise UsageError("a certificate path or --builtin NAME is required")
    path = Path(args.path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    report.inputs = {"path": str(path), "digest": _digest(raw)}
    cert = load_certificate(path)
    if getattr(args, "theta", None):
        d = certificate_to_dict(cert)
        d["theta"] = args.theta
        cert = certificate_from_dict(d)
    return cert


def _emit(report: RunReport, args) -> None:
    if getattr(args, "json", None):
        Path(args.json).write_text(report.dumps(), encoding="utf-8")


def _print_trace(ver, out) -> None:
    for row in ver.trace:
        members = " , ".join(row["members"])
        print(f"  [{row['context']}] {members}", file=out)
        print(f"      product {row['product']}   =>   {row['constraint']}", file=out)


# -- commands --------------------------------------------------------------------

def cmd_verify(args, report: RunReport, out) -> int:
    cert = _load(args, report)
    ver = verify(cert)
    payload = ver.to_json()
    report.status = ver.status
    report.payload = payload
    print(f"certificate: {cert.name or report.inputs.get('path', '')}", file=out)
    print(f"dofs: {cert.system.n_dof}  theta: {', '.join(cert.system.theta_strings())}  "
          f"contexts: {len(cert.contexts)}  unknowns: {len(ver.system.unknowns)}", file=out)
    print(f"status: {ver.status}", file=out)
    if ver.witness is not None:
        w = payload["witness"]
        print(f"witness t: {w['t']}", file=out)
        print(f"contexts used: {len(w['contexts'])} of {len(cert.contexts)}", file=out)
        print(f"accumulated phase: {w['phase']} (so [-I] = -1 = +1)", file=out)
    else:
        print("assignment:", file=out)
        for k, v in payload["assignment"].items():
            print(f"  [{k}] = {v}", file=out)
    return EXIT_OK


def cmd_print(args, report: RunReport, out) -> int:
    cert = _load(args, report)
    ver = verify(cert)
    report.status = ver.status
    report.payload = {"certificate": certificate_to_dict(cert), **ver.to_json()}
    print(f"certificate: {cert.name or report.inputs.get('path', '')}", file=out)
    print(f"dofs: {cert.system.n_dof}  theta: {', '.join(cert.system.theta_strings())}", file=out)
    print("monomials:", file=out)
    for k, v in cert.monomials.items():
        print(f"  {k}: {v.to_text()}", file=out)
    print("contexts and product-rule constraints:", file=out)
    _print_trace(ver, out)
    print(f"status: {ver.status}", file=out)
    if ver.witness is not None:
        print(f"witness t: {list(ver.witness.t)}  phase: {ver.witness.accumulated_phase.to_text()}",
              file=out)
    return EXIT_OK


def _unit_label(z: complex) -> str:
    """Nearest fourth root of unity as text (the GHZ eigenvalues are exactly these)."""
    k = round(math.atan2(z.imag, z.real) / (math.pi / 2)) % 4
    return ("+1", "+i", "-1", "-i")[k]


def _claims_table(claims, out) -> None:
    width = max((len(c.name) for c in claims), default=10)
    for c in claims:
        mark = "ok" if c.ok else "FAIL"
        print(f"  {c.name:<{width}}  {c.residual:10.3e}  {mark}", file=out)


def cmd_oracle(args, report: RunReport, out) -> int:
    eig_tol = tolerance("eigen")
    alg_tol = tolerance("algebraic")
    if args.target == "grid" and args.epr:
        if args.path or args.builtin:
            raise UsageError("--epr does not take a certificate")
        spec = GridSpec(2, args.grid_N, args.period)
        binding, rows = epr_table(spec, args.x0, eig_tol)
        report.inputs = {"epr": True, "x0": args.x0, "N": args.grid_N, "period": args.period}
        report.payload = {"binding": {"k": list(binding.k), "s": list(binding.s)}, "table": rows}
        # the four-fold products have the state as eigenstate, the pair products do not
        expected = [True, True, False, False]
        ok = [r["eigenstate"] for r in rows] == expected
        c1 = complex(*rows[0]["c"])
        c2 = complex(*rows[1]["c"])
        cc = abs(c1 * c2 + 1)
        report.residuals = [{"claim": r["operator"], "residual": r["residual"],
                             "eigenstate": r["eigenstate"]} for r in rows]
        report.residuals.append({"claim": "c * c' = -1", "residual": cc, "tol": eig_tol,
                                 "ok": cc <= eig_tol})
        ok = ok and cc <= eig_tol
        report.status = "pass" if ok else "fail"
        print(f"EPR delta on x1 - x2 = {args.x0} (N={args.grid_N}, k={binding.k}, s={binding.s})",
              file=out)
        for r in rows:
            c = complex(*r["c"])
            print(f"  {r['operator']:<22} eigenstate={str(r['eigenstate']):<5} "
                  f"c={c.real:+.6f}{c.imag:+.6f}i  residual={r['residual']:.3e}", file=out)
        print(f"  c * c' = {(c1 * c2).real:+.6f}  (|c c' + 1| = {cc:.3e})", file=out)
        print(f"status: {report.status}", file=out)
        return EXIT_OK if ok else EXIT_CHECK_FAILED
    if args.target == "grid" and args.ghz:
        spec = GridSpec(3, args.grid_N, args.period)
        found = find_ghz_analogues(spec, seed=args.seed, tol=eig_tol)
        report.inputs = {"ghz": True, "N": args.grid_N, "period": args.period}
        worst = 0.0
        quads = {}
        for g in found:
            prod = 1
            for lam in g.eigenvalues:
                prod *= lam
            worst = max(worst, abs(prod + 1))
            key = tuple(_unit_label(lam) for lam in g.eigenvalues)
            quads[key] = quads.get(key, 0) + 1
        ok = bool(found) and worst <= eig_tol
        report.status = "pass" if ok else "fail"
        report.payload = {"states": len(found),
                          "eigenvalue_patterns": {" ".join(k): v for k, v in sorted(quads.items())}}
        report.residuals = [{"claim": "eigenvalue product = -1", "residual": worst,
                             "tol": eig_tol, "ok": ok}]
        print(f"GHZ analogues on N={args.grid_N}: {len(found)} common eigenstates", file=out)
        for k, v in sorted(quads.items()):
            print(f"  eigenvalues ({', '.join(k)}): {v} states", file=out)
        print(f"  max |product + 1| = {worst:.3e}", file=out)
        print(f"status: {report.status}", file=out)
        return EXIT_OK if ok else EXIT_CHECK_FAILED

    if args.dim is not None and args.dim_auto:
        raise UsageError("--dim and --dim-auto are mutually exclusive")
    cert = _load(args, report)
    if args.target == "matrix":
        claims = check_certificate(cert, args.dim, alg_tol)
        report.inputs["dim"] = args.dim if args.dim else "auto"
    else:
        spec = GridSpec(cert.system.n_dof, args.grid_N, args.period)
        claims = check_certificate_grid(cert, spec, n_states=args.states, seed=args.seed,
                                        tol=alg_tol)
        report.inputs.update({"N": args.grid_N, "period": args.period, "states": args.states,
                              "seed": args.seed})
    ok = all(c.ok for c in claims)
    report.residuals = [c.to_json() for c in claims]
    report.status = "pass" if ok else "fail"
    report.payload = {"claims": len(claims),
                      "max_residual": max((c.residual for c in claims), default=0.0)}
    print(f"{args.target} oracle: {len(claims)} claims for {cert.name or report.inputs.get('path')}",
          file=out)
    _claims_table(claims, out)
    print(f"max residual: {report.payload['max_residual']:.3e}  status: {report.status}", file=out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_search(args, report: RunReport, out) -> int:
    theta = tuple(args.theta) if args.theta else None
    if theta is not None and len(theta) != args.dofs:
        raise UsageError(f"--theta needs {args.dofs} values, got {len(theta)}")
    params = SearchParams(
        n_dof=args.dofs, max_exponent=args.max_exp, max_context_size=args.max_context_size,
        max_contexts=args.max_contexts, max_level=args.max_level, node_budget=args.nodes,
        time_budget=args.time_budget, theta=theta, u_only=args.u_only,
        symmetry=not args.no_symmetry, max_pool=args.max_pool)
    report.inputs = {
        "dofs": params.n_dof, "max_exp": params.max_exponent,
        "max_context_size": params.max_context_size, "max_contexts": params.max_contexts,
        "max_level": params.max_level, "nodes": params.node_budget,
        "theta": [str(t) for t in params.theta], "u_only": params.u_only,
        "symmetry": params.symmetry, "max_pool": params.max_pool,
    }
    if params.time_budget is not None:
        report.inputs["time_budget"] = params.time_budget
    space = build_space(params)
    summary = space.summary()
    print(f"search space: {summary['monomial_classes']} monomial classes, "
          f"{summary['contexts']} contexts {summary['contexts_per_level']}, "
          f"{summary['columns']} unknowns, {summary['orbit_representatives']} start orbits",
          file=out)
    if params.experimental:
        print("note: theta is not all odd integers; this search mode is experimental", file=out)
    out.flush()
    res = search_obstruction(params, space, backend=args.backend)
    report.status = res.status
    report.payload = res.to_json()
    print(f"status: {res.status}  nodes: {res.nodes}  candidates checked: {res.candidates_checked}",
          file=out)
    if res.reason:
        print(f"reason: {res.reason}", file=out)
    if res.certificate is not None:
        cert = res.certificate
        report.payload["certificate"] = certificate_to_dict(cert)
        print(f"obstruction with {len(cert.contexts)} contexts:", file=out)
        _print_trace(res.verification, out)
        w = res.verification.witness
        print(f"witness t: {list(w.t)}  phase: {w.accumulated_phase.to_text()}", file=out)
        if args.emit:
            dump_certificate(cert, args.emit)
            print(f"certificate written to {args.emit}", file=out)
    elif args.emit:
        print("nothing to emit", file=out)
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------

def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("path", nargs="?", help="certificate JSON file")
    p.add_argument("--builtin", metavar="NAME", help=f"built-in certificate ({', '.join(sorted(BUILTINS))})")
    p.add_argument("--theta", type=_theta_list, metavar="T1,T2,...",
                   help="override theta (rationals like 1 or 1/3), comma separated")
    p.add_argument("--json", metavar="PATH", help="write the JSON run report here")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weylks", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="compile a certificate and decide its parity system")
    _add_source(p)

    p = sub.add_parser("print", help="pretty-print a certificate with its constraint trace")
    _add_source(p)

    p = sub.add_parser("oracle", help="re-check a certificate's algebra numerically")
    p.add_argument("target", choices=["matrix", "grid"])
    _add_source(p)
    p.add_argument("--dim-auto", action="store_true",
                   help="smallest clock dimension for theta (the default)")
    p.add_argument("--dim", type=int, default=None, help="explicit clock dimension (matrix)")
    p.add_argument("--grid-N", type=int, default=8, help="grid points per dof (even)")
    p.add_argument("--period", type=float, default=2 * math.pi, help="grid period L")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--states", type=int, default=100, help="random states per context (grid)")
    p.add_argument("--epr", action="store_true", help="EPR delta-state eigen table (grid, 2 dofs)")
    p.add_argument("--x0", type=float, default=0.0, help="relative position of the EPR state")
    p.add_argument("--ghz", action="store_true", help="GHZ-analogue common eigenstates (grid, 3 dofs)")

    p = sub.add_parser("search", help="look for an obstruction in a bounded space")
    p.add_argument("--dofs", type=int, required=True)
    p.add_argument("--max-exp", type=int, default=1)
    p.add_argument("--max-context-size", type=int, default=4)
    p.add_argument("--max-contexts", type=int, default=7)
    p.add_argument("--max-level", type=int, default=2,
                   help="how many rounds of products may feed later contexts")
    p.add_argument("--nodes", type=parse_count, default=10 ** 7, help="node budget, e.g. 10^6")
    p.add_argument("--max-pool", type=parse_count, default=2 * 10 ** 6,
                   help="abort if the context pool grows past this many sets")
    p.add_argument("--time-budget", type=float, default=None, help="wall-clock limit in seconds")
    p.add_argument("--theta", type=_theta_list, metavar="T1,T2,...")
    p.add_argument("--u-only", action="store_true", help="use U generators only")
    p.add_argument("--no-symmetry", action="store_true", help="disable symmetry pruning")
    p.add_argument("--backend", choices=["cython", "python"], default=None)
    p.add_argument("--emit", metavar="PATH", help="write a found certificate here")
    p.add_argument("--json", metavar="PATH", help="write the JSON run report here")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    return parser


COMMANDS = {"verify": cmd_verify, "print": cmd_print, "oracle": cmd_oracle, "search": cmd_search}


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code else EXIT_OK
    report = RunReport(command=["weylks", *argv])
    t0 = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, report, out)
    except CertificateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        report.status = "error"
        report.payload = {"error": str(exc), "context": exc.context,
                          "pair": list(exc.pair) if exc.pair else None}
        code = EXIT_BAD_INPUT
    except (UsageError, WeylError, GridError, OracleError, SearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        report.status = "error"
        report.payload = {"error": str(exc)}
        code = EXIT_BAD_INPUT
    if getattr(args, "timings", False):
        report.timings = {"total_seconds": round(time.perf_counter() - t0, 6)}
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
