"""Compare the compiled and pure-Python closed-set kernels.

Runs both backends on the same search space, depth by depth, checks that
they return identical sets and node counts, and prints wall-clock times.

    python benchmarks/bench_search.py
    python benchmarks/bench_search.py --dofs 3 --max-depth 5 --repeat 1
"""

import argparse
import sys
import time

from weylks import kernels
from weylks.search import SearchParams, build_space, search_obstruction


def time_kernel(fn, space, depth, budget, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*space.kernel_arrays(), space.starts, depth, space.max_row, budget)
        best = min(best, time.perf_counter() - t0)
    return out, best


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dofs", type=int, nargs="+", default=[2, 3])
    p.add_argument("--max-depth", type=int, default=None,
                   help="deepest level to time (default: 6 for 2 dofs, 4 for 3 dofs)")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--budget", type=int, default=10 ** 8)
    args = p.parse_args(argv)

    if kernels.closed_sets_c is None:
        print("compiled kernel not built; nothing to compare", file=sys.stderr)
        return 1

    print(f"{'dofs':>4} {'depth':>5} {'sets':>7} {'nodes':>10} {'python s':>10} "
          f"{'cython s':>10} {'speedup':>8}")
    for n in args.dofs:
        params = SearchParams(n)
        t0 = time.perf_counter()
        space = build_space(params)
        build = time.perf_counter() - t0
        top = args.max_depth or (6 if n == 2 else 4)
        for depth in range(2, top + 1):
            (py_sets, py_nodes, py_ab), t_py = time_kernel(kernels.closed_sets_py, space, depth,
                                                           args.budget, args.repeat)
            (c_sets, c_nodes, c_ab), t_c = time_kernel(kernels.closed_sets_c, space, depth,
                                                       args.budget, args.repeat)
            if (py_sets, py_nodes, py_ab) != (c_sets, c_nodes, c_ab):
                print(f"backends disagree at dofs={n} depth={depth}", file=sys.stderr)
                return 1
            speed = t_py / t_c if t_c > 0 else float("inf")
            print(f"{n:>4} {depth:>5} {len(c_sets):>7} {c_nodes:>10} {t_py:>10.4f} "
                  f"{t_c:>10.4f} {speed:>7.1f}x")
        res = search_obstruction(params, space)
        print(f"     dofs={n}: pool {build:.2f}s, full search {res.status} at depth "
              f"{res.depth} in {res.elapsed:.2f}s ({res.backend})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
