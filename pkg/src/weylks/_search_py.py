"""Pure-Python closed-context-set enumeration (reference backend).

Finds sets of contexts in which

* every unknown column is touched by at least two contexts ("closed"), and
* every composite member of a context is the product of another context in
  the set ("grounded").

Only such sets can be minimal parity contradictions in the search grammar;
the caller checks them exactly.

Arrays come in CSR form:

* ``ctx_ptr``/``ctx_cols``: columns touched by each context;
* ``col_ptr``/``col_ctx``: contexts touching each column, ascending;
* ``use_ptr``/``use_cols``: composite member columns of each context;
* ``prod_col``: product column of each context, or -1 for a scalar product;
* ``prd_ptr``/``prd_ctx``: contexts producing each column, ascending.

Each start context is the smallest index of the sets grown from it.  At every
node an ungrounded column is resolved first (branching over its producers);
otherwise the branch column is the dangling column with the fewest eligible
contexts (index above the start, not yet chosen), ties to the lowest column
index.  ``nodes`` counts expansions of
non-leaf states identically in both backends; children that already
violate the counting bounds are skipped without being counted.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import List, Sequence, Tuple


def closed_sets(ctx_ptr: Sequence[int], ctx_cols: Sequence[int],
                col_ptr: Sequence[int], col_ctx: Sequence[int],
                use_ptr: Sequence[int], use_cols: Sequence[int],
                prod_col: Sequence[int],
                prd_ptr: Sequence[int], prd_ctx: Sequence[int],
                n_cols: int, starts: Sequence[int], depth: int, max_row: int,
                node_budget: int) -> Tuple[List[Tuple[int, ...]], int, bool]:
    n_ctx = len(ctx_ptr) - 1

    def csr(ptr, data, n):
        ptr = [int(x) for x in ptr]
        data = [int(x) for x in data]
        return [data[ptr[i]:ptr[i + 1]] for i in range(n)]

    cols_of = csr(ctx_ptr, ctx_cols, n_ctx)
    ctx_of = csr(col_ptr, col_ctx, n_cols)
    uses_of = csr(use_ptr, use_cols, n_ctx)
    producers = csr(prd_ptr, prd_ctx, n_cols)
    ctx_sets = [set(lst) for lst in ctx_of]
    prod_of = [int(x) for x in prod_col]

    count = [0] * n_cols
    used = [0] * n_cols
    made = [0] * n_cols
    in_set = [False] * n_ctx
    chosen: List[int] = []
    found: List[Tuple[int, ...]] = []
    seen = set()
    st = {"nodes": 0, "aborted": False}
    # columns with exactly one chosen context, and used-but-unproduced columns
    dangling = set()
    unmet = set()

    def add(x: int) -> None:
        in_set[x] = True
        chosen.append(x)
        for c in cols_of[x]:
            k = count[c]
            if k == 0:
                dangling.add(c)
            elif k == 1:
                dangling.discard(c)
            count[c] = k + 1
        for c in uses_of[x]:
            if used[c] == 0 and made[c] == 0:
                unmet.add(c)
            used[c] += 1
        p = prod_of[x]
        if p >= 0:
            if made[p] == 0 and used[p] > 0:
                unmet.discard(p)
            made[p] += 1

    def remove(x: int) -> None:
        in_set[x] = False
        chosen.pop()
        for c in cols_of[x]:
            k = count[c]
            if k == 1:
                dangling.discard(c)
            elif k == 2:
                dangling.add(c)
            count[c] = k - 1
        p = prod_of[x]
        if p >= 0:
            made[p] -= 1
            if made[p] == 0 and used[p] > 0:
                unmet.add(p)
        for c in uses_of[x]:
            used[c] -= 1
            if used[c] == 0 and made[c] == 0:
                unmet.discard(c)

    def completes(x: int) -> bool:
        # adding x leaves nothing dangling and nothing ungrounded
        hit = 0
        for c in cols_of[x]:
            k = count[c]
            if k == 0:
                return False
            if k == 1:
                hit += 1
        if hit != len(dangling):
            return False
        for c in uses_of[x]:
            if made[c] == 0:
                return False
        u = len(unmet)
        p = prod_of[x]
        if p >= 0 and made[p] == 0 and used[p] > 0:
            u -= 1
        return u == 0

    def feasible(x: int, left: int) -> bool:
        # the bounds checked on entry to rec, evaluated without adding x
        d = len(dangling)
        for c in cols_of[x]:
            k = count[c]
            if k == 0:
                d += 1
            elif k == 1:
                d -= 1
        u = len(unmet)
        for c in uses_of[x]:
            if used[c] == 0 and made[c] == 0:
                u += 1
        p = prod_of[x]
        if p >= 0 and made[p] == 0 and used[p] > 0:
            u -= 1
        return u <= left and d <= left * max_row

    def rec(lo: int) -> None:
        st["nodes"] += 1
        if st["nodes"] > node_budget:
            st["aborted"] = True
            return
        remaining = depth - len(chosen)
        if len(unmet) > remaining or len(dangling) > remaining * max_row:
            return
        if unmet:
            # no producer of an ungrounded column is chosen yet
            best, best_n = -1, 0
            for c in sorted(unmet):
                lst = producers[c]
                n = len(lst) - bisect_right(lst, lo)
                if best < 0 or n < best_n:
                    best, best_n = c, n
                    if n == 0:
                        return
            pool = producers[best]
        elif dangling:
            # a dangling column has exactly one chosen context on it
            best, best_n = -1, 0
            for c in sorted(dangling):
                lst = ctx_of[c]
                n = len(lst) - bisect_right(lst, lo) - (0 if start_touch[c] else 1)
                if best < 0 or n < best_n:
                    best, best_n = c, n
                    if n == 0:
                        return
            pool = ctx_of[best]
        else:
            pool = sorted({x for y in chosen for c in cols_of[y] for x in ctx_of[c]})
        if remaining == 1:
            # the last context must touch every dangling column
            options = pool[bisect_right(pool, lo):]
            if dangling:
                options = sorted(set(options).intersection(*(ctx_sets[c] for c in dangling)))
            for x in options:
                if in_set[x]:
                    continue
                if completes(x):
                    key = tuple(sorted(chosen + [x]))
                    if key not in seen:
                        seen.add(key)
                        found.append(key)
            return
        options = [x for x in pool[bisect_right(pool, lo):] if not in_set[x]]
        left = remaining - 1
        for x in options:
            if not feasible(x, left):
                continue
            add(x)
            rec(lo)
            remove(x)
            if st["aborted"]:
                return

    start_touch = [False] * n_cols
    if depth >= 2:
        for s in starts:
            s = int(s)
            for c in cols_of[s]:
                start_touch[c] = True
            add(s)
            rec(s)
            remove(s)
            for c in cols_of[s]:
                start_touch[c] = False
            if st["aborted"]:
                break
    return found, st["nodes"], st["aborted"]
