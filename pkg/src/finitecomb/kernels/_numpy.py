"""Pure-numpy versions of the compiled kernels.

Same signatures and results as kernels._numba; used when numba is disabled
or unavailable, and as a cross-check in the test-suite.
"""

from __future__ import annotations

import itertools

import numpy as np

_CHUNK = 1 << 16


def mark_sums(a, b, q):
    out = np.zeros(q, dtype=bool)
    for start in range(0, a.shape[0], max(1, _CHUNK // max(1, b.shape[0]))):
        blk = a[start:start + max(1, _CHUNK // max(1, b.shape[0]))]
        out[((blk[:, None] + b[None, :]) % q).ravel()] = True
    return out


def mark_products(a, b, q):
    out = np.zeros(q, dtype=bool)
    step = max(1, _CHUNK // max(1, b.shape[0]))
    for start in range(0, a.shape[0], step):
        blk = a[start:start + step]
        out[((blk[:, None] * b[None, :]) % q).ravel()] = True
    return out


def dilate_sum_sizes(a, b, q, stop_at):
    sizes = np.full(q, -1, dtype=np.int64)
    for xi in range(1, q):
        sizes[xi] = np.count_nonzero(mark_sums(a, (b * xi) % q, q))
        if sizes[xi] >= stop_at:
            break
    return sizes


def sumset_sizes_masks(a_masks, b_masks, q):
    a_masks = a_masks.astype(np.uint64)
    b_masks = b_masks.astype(np.uint64)
    full = np.uint64((1 << q) - 1)
    acc = np.zeros_like(a_masks)
    one = np.uint64(1)
    for t in range(q):
        sel = ((b_masks >> np.uint64(t)) & one).astype(bool)
        if t == 0:
            rot = a_masks
        else:
            rot = ((a_masks << np.uint64(t)) | (a_masks >> np.uint64(q - t))) & full
        acc[sel] |= rot[sel]
    return np.bitwise_count(acc).astype(np.int64)


def _unique_per_row(vals):
    s = np.sort(vals, axis=1)
    return 1 + np.count_nonzero(np.diff(s, axis=1), axis=1)


def _stats_block(block, q, statistic):
    ii, jj = np.triu_indices(block.shape[1])
    out = None
    if statistic in (0, 1):
        out = _unique_per_row((block[:, ii] + block[:, jj]) % q)
    if statistic in (0, 2):
        p = _unique_per_row((block[:, ii] * block[:, jj]) % q)
        out = p if out is None else np.maximum(out, p)
    return out


def subset_stats(sub, q):
    ii, jj = np.triu_indices(sub.shape[0])
    s = np.unique((sub[ii] + sub[jj]) % q).size
    p = np.unique((sub[ii] * sub[jj]) % q).size
    return s, p


def minmax_exhaustive(q, n, statistic, fix01):
    if fix01:
        gen = ((0, 1) + rest for rest in itertools.combinations(range(2, q), n - 2))
    else:
        gen = itertools.combinations(range(q), n)
    best = q + 1
    arg = np.arange(n, dtype=np.int64)
    scanned = 0
    while True:
        rows = list(itertools.islice(gen, _CHUNK))
        if not rows:
            break
        block = np.asarray(rows, dtype=np.int64)
        vals = _stats_block(block, q, statistic)
        k = int(np.argmin(vals))
        if vals[k] < best:
            best = int(vals[k])
            arg = block[k].copy()
        scanned += block.shape[0]
    return best, arg, scanned


def incidence_naive(P, L, q):
    total = 0
    step = max(1, _CHUNK // max(1, L.shape[0]))
    for start in range(0, P.shape[0], step):
        blk = P[start:start + step]
        total += int(np.count_nonzero((blk @ L.T) % q == 0))
    return total


def dist_set_size(xs, ys, q, exclude_zero):
    n = xs.shape[0]
    if n == 0:
        return 0
    ii, jj = np.triu_indices(n, k=1)
    d = ((xs[ii] - xs[jj]) ** 2 + (ys[ii] - ys[jj]) ** 2) % q
    vals = set(np.unique(d).tolist())
    if exclude_zero:
        vals.discard(0)
    else:
        vals.add(0)
    return len(vals)


def distance_exhaustive(q, n, exclude_zero):
    gen = itertools.combinations(range(q * q), n)
    ii, jj = np.triu_indices(n, k=1)
    best = q + 1
    arg = np.arange(n, dtype=np.int64)
    while True:
        rows = list(itertools.islice(gen, _CHUNK))
        if not rows:
            break
        block = np.asarray(rows, dtype=np.int64)
        xs, ys = block // q, block % q
        d = ((xs[:, ii] - xs[:, jj]) ** 2 + (ys[:, ii] - ys[:, jj]) ** 2) % q
        if d.shape[1] == 0:
            vals = np.full(block.shape[0], 0 if exclude_zero else 1, dtype=np.int64)
        elif exclude_zero:
            d = np.where(d == 0, -1, d)
            vals = _unique_per_row(d) - np.any(d == -1, axis=1)
        else:
            d = np.concatenate([np.zeros((d.shape[0], 1), np.int64), d], axis=1)
            vals = _unique_per_row(d)
        k = int(np.argmin(vals))
        if vals[k] < best:
            best = int(vals[k])
            arg = block[k].copy()
    return best, arg


def bsg_rep_counts(D):
    m = D.shape[0]
    idx = np.arange(m)
    # conv[s] = sum_{d1} D[d1] D[s - d1]
    conv = np.array([int(np.dot(D, D[(s - idx) % m])) for s in range(m)], dtype=np.int64)
    return np.array([int(np.dot(conv, D[(idx - t) % m])) for t in range(m)], dtype=np.int64)


def _line_point_ids(dvec, pivot, choice, q):
    u, v = divmod(int(choice), q)
    base = np.zeros(3, dtype=np.int64)
    free = [c for c in range(3) if c != pivot]
    base[free[0]], base[free[1]] = u, v
    t = np.arange(q, dtype=np.int64)
    pts = (base[None, :] + t[:, None] * dvec[None, :]) % q
    return (pts[:, 0] * q + pts[:, 1]) * q + pts[:, 2]


def kakeya_climb(dirs, pivots, q, choice, proposals):
    counts = np.zeros(q ** 3, dtype=np.int64)
    for d in range(dirs.shape[0]):
        counts[_line_point_ids(dirs[d], pivots[d], choice[d], q)] += 1
    size = int(np.count_nonzero(counts))
    best, best_choice = size, choice.copy()
    for d, c in proposals:
        if c == choice[d]:
            continue
        old = _line_point_ids(dirs[d], pivots[d], choice[d], q)
        new = _line_point_ids(dirs[d], pivots[d], c, q)
        counts[old] -= 1
        lost = np.count_nonzero(counts[old] == 0)
        gained = np.count_nonzero(counts[new] == 0)
        # a point both freed and re-covered cancels
        delta = int(gained - lost)
        if delta <= 0:
            counts[new] += 1
            choice[d] = c
            size += delta
            if size < best:
                best, best_choice = size, choice.copy()
        else:
            counts[old] += 1
    return best, best_choice, size
