# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled closed-context-set enumeration.

Same contract, branching order and node accounting as ``_search_py``.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int32_t i32


cdef inline int bisect_right(const i32[:] a, int lo_i, int hi_i, int x) noexcept:
    # first index in a[lo_i:hi_i] whose value exceeds x
    cdef int mid
    while lo_i < hi_i:
        mid = (lo_i + hi_i) >> 1
        if x < a[mid]:
            hi_i = mid
        else:
            lo_i = mid + 1
    return lo_i


cdef class _Search:
    cdef const i32[:] ctx_ptr
    cdef const i32[:] ctx_cols
    cdef const i32[:] col_ptr
    cdef const i32[:] col_ctx
    cdef const i32[:] use_ptr
    cdef const i32[:] use_cols
    cdef const i32[:] prod_col
    cdef const i32[:] prd_ptr
    cdef const i32[:] prd_ctx
    cdef int n_cols, n_ctx, depth, max_row
    cdef long long nodes, budget
    cdef bint aborted
    cdef int dangling, unmet, n_chosen
    cdef i32[:] count
    cdef i32[:] used
    cdef i32[:] made
    cdef i32[:] start_touch
    cdef cnp.uint8_t[:] in_set
    cdef i32[:] chosen
    cdef i32[:] scratch
    cdef cnp.uint8_t[:] mark
    cdef list found
    cdef set seen

    def __init__(self, ctx_ptr, ctx_cols, col_ptr, col_ctx, use_ptr, use_cols, prod_col,
                 prd_ptr, prd_ctx, int n_cols, int depth, int max_row, long long budget):
        self.ctx_ptr = ctx_ptr
        self.ctx_cols = ctx_cols
        self.col_ptr = col_ptr
        self.col_ctx = col_ctx
        self.use_ptr = use_ptr
        self.use_cols = use_cols
        self.prod_col = prod_col
        self.prd_ptr = prd_ptr
        self.prd_ctx = prd_ctx
        self.n_cols = n_cols
        self.n_ctx = len(ctx_ptr) - 1
        self.depth = depth
        self.max_row = max_row
        self.budget = budget
        self.nodes = 0
        self.aborted = False
        self.dangling = 0
        self.unmet = 0
        self.n_chosen = 0
        self.count = np.zeros(max(n_cols, 1), dtype=np.int32)
        self.used = np.zeros(max(n_cols, 1), dtype=np.int32)
        self.made = np.zeros(max(n_cols, 1), dtype=np.int32)
        self.start_touch = np.zeros(max(n_cols, 1), dtype=np.int32)
        self.in_set = np.zeros(max(self.n_ctx, 1), dtype=np.uint8)
        self.mark = np.zeros(max(self.n_ctx, 1), dtype=np.uint8)
        self.chosen = np.zeros(max(depth, 1), dtype=np.int32)
        # per-depth option buffers for the "extend a closed set" case
        self.scratch = np.zeros(max(self.n_ctx, 1) * max(depth, 1), dtype=np.int32)
        self.found = []
        self.seen = set()

    cdef void add(self, int x) noexcept:
        cdef int i, c, k, p
        self.in_set[x] = 1
        self.chosen[self.n_chosen] = x
        self.n_chosen += 1
        for i in range(self.ctx_ptr[x], self.ctx_ptr[x + 1]):
            c = self.ctx_cols[i]
            k = self.count[c]
            if k == 0:
                self.dangling += 1
            elif k == 1:
                self.dangling -= 1
            self.count[c] = k + 1
        for i in range(self.use_ptr[x], self.use_ptr[x + 1]):
            c = self.use_cols[i]
            if self.used[c] == 0 and self.made[c] == 0:
                self.unmet += 1
            self.used[c] += 1
        p = self.prod_col[x]
        if p >= 0:
            if self.made[p] == 0 and self.used[p] > 0:
                self.unmet -= 1
            self.made[p] += 1

    cdef void remove(self, int x) noexcept:
        cdef int i, c, k, p
        self.in_set[x] = 0
        self.n_chosen -= 1
        for i in range(self.ctx_ptr[x], self.ctx_ptr[x + 1]):
            c = self.ctx_cols[i]
            k = self.count[c]
            if k == 1:
                self.dangling -= 1
            elif k == 2:
                self.dangling += 1
            self.count[c] = k - 1
        p = self.prod_col[x]
        if p >= 0:
            self.made[p] -= 1
            if self.made[p] == 0 and self.used[p] > 0:
                self.unmet += 1
        for i in range(self.use_ptr[x], self.use_ptr[x + 1]):
            c = self.use_cols[i]
            self.used[c] -= 1
            if self.used[c] == 0 and self.made[c] == 0:
                self.unmet -= 1

    cdef bint completes(self, int x) noexcept:
        cdef int i, c, k, p, hit = 0, u
        for i in range(self.ctx_ptr[x], self.ctx_ptr[x + 1]):
            k = self.count[self.ctx_cols[i]]
            if k == 0:
                return False
            if k == 1:
                hit += 1
        if hit != self.dangling:
            return False
        for i in range(self.use_ptr[x], self.use_ptr[x + 1]):
            if self.made[self.use_cols[i]] == 0:
                return False
        u = self.unmet
        p = self.prod_col[x]
        if p >= 0 and self.made[p] == 0 and self.used[p] > 0:
            u -= 1
        return u == 0

    cdef bint feasible(self, int x, int left) noexcept:
        cdef int i, c, k, p
        cdef int d = self.dangling, u = self.unmet
        for i in range(self.ctx_ptr[x], self.ctx_ptr[x + 1]):
            k = self.count[self.ctx_cols[i]]
            if k == 0:
                d += 1
            elif k == 1:
                d -= 1
        for i in range(self.use_ptr[x], self.use_ptr[x + 1]):
            c = self.use_cols[i]
            if self.used[c] == 0 and self.made[c] == 0:
                u += 1
        p = self.prod_col[x]
        if p >= 0 and self.made[p] == 0 and self.used[p] > 0:
            u -= 1
        return u <= left and d <= left * self.max_row

    cdef void record(self, int x):
        cdef list members = [self.chosen[i] for i in range(self.n_chosen)]
        members.append(x)
        key = tuple(sorted(members))
        if key not in self.seen:
            self.seen.add(key)
            self.found.append(key)

    cdef void rec(self, int lo):
        cdef int remaining, c, n, best, best_n, i, x, y, j, a, b, left
        cdef int n_opts, off
        cdef const i32[:] src
        cdef i32[:] tmp
        self.nodes += 1
        if self.nodes > self.budget:
            self.aborted = True
            return
        remaining = self.depth - self.n_chosen
        if self.unmet > remaining or self.dangling > remaining * self.max_row:
            return
        best = -1
        best_n = 0
        if self.unmet:
            for c in range(self.n_cols):
                if self.used[c] and not self.made[c]:
                    n = self.prd_ptr[c + 1] - bisect_right(self.prd_ctx, self.prd_ptr[c], self.prd_ptr[c + 1], lo)
                    if best < 0 or n < best_n:
                        best = c
                        best_n = n
                        if n == 0:
                            return
            src = self.prd_ctx
            a = bisect_right(self.prd_ctx, self.prd_ptr[best], self.prd_ptr[best + 1], lo)
            b = self.prd_ptr[best + 1]
        elif self.dangling:
            for c in range(self.n_cols):
                if self.count[c] == 1:
                    n = self.col_ptr[c + 1] - bisect_right(self.col_ctx, self.col_ptr[c], self.col_ptr[c + 1], lo)
                    if not self.start_touch[c]:
                        n -= 1
                    if best < 0 or n < best_n:
                        best = c
                        best_n = n
                        if n == 0:
                            return
            src = self.col_ctx
            a = bisect_right(self.col_ctx, self.col_ptr[best], self.col_ptr[best + 1], lo)
            b = self.col_ptr[best + 1]
        else:
            # union of contexts touching any chosen column, ascending
            off = self.n_chosen * self.n_ctx
            n_opts = 0
            for j in range(self.n_chosen):
                y = self.chosen[j]
                for i in range(self.ctx_ptr[y], self.ctx_ptr[y + 1]):
                    c = self.ctx_cols[i]
                    for a in range(self.col_ptr[c], self.col_ptr[c + 1]):
                        x = self.col_ctx[a]
                        if x > lo and not self.mark[x]:
                            self.mark[x] = 1
                            self.scratch[off + n_opts] = x
                            n_opts += 1
            for a in range(n_opts):
                self.mark[self.scratch[off + a]] = 0
            if n_opts > 1:
                tmp = np.sort(np.asarray(self.scratch[off:off + n_opts]))
                self.scratch[off:off + n_opts] = tmp
            src = self.scratch
            a = off
            b = off + n_opts
        left = remaining - 1
        for i in range(a, b):
            x = src[i]
            if self.in_set[x]:
                continue
            if remaining == 1:
                if self.completes(x):
                    self.record(x)
                continue
            if not self.feasible(x, left):
                continue
            self.add(x)
            self.rec(lo)
            self.remove(x)
            if self.aborted:
                return

    def run(self, starts):
        cdef int s, i
        if self.depth < 2:
            return
        for s in starts:
            for i in range(self.ctx_ptr[s], self.ctx_ptr[s + 1]):
                self.start_touch[self.ctx_cols[i]] = 1
            self.add(s)
            self.rec(s)
            self.remove(s)
            for i in range(self.ctx_ptr[s], self.ctx_ptr[s + 1]):
                self.start_touch[self.ctx_cols[i]] = 0
            if self.aborted:
                break


def _i32(a):
    return np.ascontiguousarray(a, dtype=np.int32)


def closed_sets(ctx_ptr, ctx_cols, col_ptr, col_ctx, use_ptr, use_cols, prod_col,
                prd_ptr, prd_ctx, int n_cols, starts, int depth, int max_row,
                long long node_budget):
    """See ``weylks._search_py.closed_sets``."""
    st = _Search(_i32(ctx_ptr), _i32(ctx_cols), _i32(col_ptr), _i32(col_ctx), _i32(use_ptr),
                 _i32(use_cols), _i32(prod_col), _i32(prd_ptr), _i32(prd_ctx),
                 n_cols, depth, max_row, node_budget)
    st.run([int(s) for s in starts])
    return st.found, int(st.nodes), bool(st.aborted)
