"""numba-compiled inner loops. Signatures mirror kernels._numpy one for one."""

from __future__ import annotations

import numpy as np
from numba import njit

_opts = {"cache": True, "nogil": True}


@njit(**_opts)
def mark_sums(a, b, q):
    out = np.zeros(q, dtype=np.bool_)
    for i in range(a.shape[0]):
        ai = a[i]
        for j in range(b.shape[0]):
            out[(ai + b[j]) % q] = True
    return out


@njit(**_opts)
def mark_products(a, b, q):
    out = np.zeros(q, dtype=np.bool_)
    for i in range(a.shape[0]):
        ai = a[i]
        for j in range(b.shape[0]):
            out[(ai * b[j]) % q] = True
    return out


@njit(**_opts)
def dilate_sum_sizes(a, b, q, stop_at):
    sizes = np.full(q, -1, dtype=np.int64)
    stamp = np.zeros(q, dtype=np.int64)
    for xi in range(1, q):
        cnt = 0
        for j in range(b.shape[0]):
            bx = (b[j] * xi) % q
            for i in range(a.shape[0]):
                s = a[i] + bx
                if s >= q:
                    s -= q
                if stamp[s] != xi:
                    stamp[s] = xi
                    cnt += 1
        sizes[xi] = cnt
        if cnt >= stop_at:
            break
    return sizes


@njit(**_opts)
def _rot(m, t, q, full):
    if t == 0:
        return m
    return ((m << np.uint64(t)) | (m >> np.uint64(q - t))) & full


@njit(**_opts)
def _popcount(m):
    c = 0
    while m:
        m &= m - np.uint64(1)
        c += 1
    return c


@njit(**_opts)
def sumset_sizes_masks(a_masks, b_masks, q):
    """|A+B| for each pair of uint64 masks (q <= 63)."""
    n = a_masks.shape[0]
    out = np.empty(n, dtype=np.int64)
    full = (np.uint64(1) << np.uint64(q)) - np.uint64(1)
    for k in range(n):
        am = a_masks[k]
        bm = b_masks[k]
        acc = np.uint64(0)
        for t in range(q):
            if (bm >> np.uint64(t)) & np.uint64(1):
                acc |= _rot(am, t, q, full)
        out[k] = _popcount(acc)
    return out


@njit(**_opts)
def _count_sum(sub, n, q, stamp, gen):
    cnt = 0
    for i in range(n):
        for j in range(i, n):
            s = sub[i] + sub[j]
            if s >= q:
                s -= q
            if stamp[s] != gen:
                stamp[s] = gen
                cnt += 1
    return cnt


@njit(**_opts)
def _count_prod(sub, n, q, stamp, gen):
    cnt = 0
    for i in range(n):
        for j in range(i, n):
            s = (sub[i] * sub[j]) % q
            if stamp[s] != gen:
                stamp[s] = gen
                cnt += 1
    return cnt


@njit(**_opts)
def subset_stats(sub, q):
    n = sub.shape[0]
    stamp = np.zeros(q, dtype=np.int64)
    s = _count_sum(sub, n, q, stamp, 1)
    p = _count_prod(sub, n, q, stamp, 2)
    return s, p


@njit(**_opts)
def minmax_exhaustive(q, n, statistic, fix01):
    """Scan n-subsets of [0, q) in lexicographic order.

    statistic: 0 -> max(|A+A|, |A.A|), 1 -> |A+A|, 2 -> |A.A|.
    fix01: only subsets containing 0 and 1.
    Returns (best value, lexicographically first minimiser, subsets scanned).
    """
    sub = np.arange(n, dtype=np.int64)
    best = q + 1
    arg = sub.copy()
    stamp_s = np.zeros(q, dtype=np.int64)
    stamp_p = np.zeros(q, dtype=np.int64)
    gen = 0
    scanned = 0
    while True:
        ok = True
        if fix01 and not (sub[0] == 0 and n >= 2 and sub[1] == 1):
            ok = False
        if ok:
            gen += 1
            scanned += 1
            if statistic == 2:
                val = _count_prod(sub, n, q, stamp_p, gen)
            else:
                val = _count_sum(sub, n, q, stamp_s, gen)
                if statistic == 0 and val < best:
                    pv = _count_prod(sub, n, q, stamp_p, gen)
                    if pv > val:
                        val = pv
            if val < best:
                best = val
                arg[:] = sub
        # next combination
        i = n - 1
        while i >= 0 and sub[i] == q - n + i:
            i -= 1
        if i < 0:
            break
        if fix01 and i < 2:
            break
        sub[i] += 1
        for j in range(i + 1, n):
            sub[j] = sub[j - 1] + 1
    return best, arg, scanned


@njit(**_opts)
def incidence_naive(P, L, q):
    total = 0
    for i in range(P.shape[0]):
        x = P[i, 0]
        y = P[i, 1]
        z = P[i, 2]
        for j in range(L.shape[0]):
            if (x * L[j, 0] + y * L[j, 1] + z * L[j, 2]) % q == 0:
                total += 1
    return total


@njit(**_opts)
def _dist_count(xs, ys, n, q, stamp, gen, exclude_zero):
    cnt = 0
    if not exclude_zero and n > 0:
        stamp[0] = gen
        cnt = 1
    for i in range(n):
        for j in range(i + 1, n):
            dx = xs[i] - xs[j]
            dy = ys[i] - ys[j]
            d = (dx * dx + dy * dy) % q
            if exclude_zero and d == 0:
                continue
            if stamp[d] != gen:
                stamp[d] = gen
                cnt += 1
    return cnt


@njit(**_opts)
def dist_set_size(xs, ys, q, exclude_zero):
    stamp = np.zeros(q, dtype=np.int64)
    return _dist_count(xs, ys, xs.shape[0], q, stamp, 1, exclude_zero)


@njit(**_opts)
def distance_exhaustive(q, n, exclude_zero):
    m = q * q
    sub = np.arange(n, dtype=np.int64)
    xs = np.empty(n, dtype=np.int64)
    ys = np.empty(n, dtype=np.int64)
    stamp = np.zeros(q, dtype=np.int64)
    best = q + 1
    arg = sub.copy()
    gen = 0
    while True:
        for k in range(n):
            xs[k] = sub[k] // q
            ys[k] = sub[k] % q
        gen += 1
        val = _dist_count(xs, ys, n, q, stamp, gen, exclude_zero)
        if val < best:
            best = val
            arg[:] = sub
        i = n - 1
        while i >= 0 and sub[i] == m - n + i:
            i -= 1
        if i < 0:
            break
        sub[i] += 1
        for j in range(i + 1, n):
            sub[j] = sub[j - 1] + 1
    return best, arg


@njit(**_opts)
def bsg_rep_counts(D):
    m = D.shape[0]
    conv = np.zeros(m, dtype=np.int64)
    for d1 in range(m):
        if D[d1] == 0:
            continue
        for d3 in range(m):
            conv[(d1 + d3) % m] += D[d1] * D[d3]
    out = np.zeros(m, dtype=np.int64)
    for t in range(m):
        acc = 0
        for s in range(m):
            if conv[s]:
                acc += conv[s] * D[(s - t) % m]
        out[t] = acc
    return out


@njit(**_opts)
def _line_point_ids(dvec, pivot, choice, q, out):
    # base point: zero at pivot, remaining two coordinates from divmod(choice, q)
    u = choice // q
    v = choice % q
    base = np.zeros(3, dtype=np.int64)
    k = 0
    for c in range(3):
        if c == pivot:
            continue
        base[c] = u if k == 0 else v
        k += 1
    for t in range(q):
        x = (base[0] + t * dvec[0]) % q
        y = (base[1] + t * dvec[1]) % q
        z = (base[2] + t * dvec[2]) % q
        out[t] = (x * q + y) * q + z


@njit(**_opts)
def kakeya_climb(dirs, pivots, q, choice, proposals):
    """Local search over base-point choices; proposals[k] = (direction, new choice).

    A proposal is accepted when the union does not grow. Returns
    (best size, best choice vector, final size).
    """
    nd = dirs.shape[0]
    counts = np.zeros(q * q * q, dtype=np.int64)
    pts = np.empty(q, dtype=np.int64)
    size = 0
    for d in range(nd):
        _line_point_ids(dirs[d], pivots[d], choice[d], q, pts)
        for t in range(q):
            if counts[pts[t]] == 0:
                size += 1
            counts[pts[t]] += 1
    best = size
    best_choice = choice.copy()
    old = np.empty(q, dtype=np.int64)
    for k in range(proposals.shape[0]):
        d = proposals[k, 0]
        c = proposals[k, 1]
        if c == choice[d]:
            continue
        _line_point_ids(dirs[d], pivots[d], choice[d], q, old)
        _line_point_ids(dirs[d], pivots[d], c, q, pts)
        for t in range(q):
            counts[old[t]] -= 1
        delta = 0
        for t in range(q):
            if counts[old[t]] == 0:
                counts[old[t]] = -1  # mark once
                delta -= 1
        for t in range(q):
            if counts[old[t]] == -1:
                counts[old[t]] = 0
        for t in range(q):
            if counts[pts[t]] == 0:
                counts[pts[t]] = -1
                delta += 1
        for t in range(q):
            if counts[pts[t]] == -1:
                counts[pts[t]] = 0
        if delta <= 0:
            for t in range(q):
                counts[pts[t]] += 1
            choice[d] = c
            size += delta
            if size < best:
                best = size
                best_choice[:] = choice
        else:
            for t in range(q):
                counts[old[t]] += 1
    return best, best_choice, size
