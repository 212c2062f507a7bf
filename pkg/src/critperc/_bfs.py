"""Batch breadth-first exploration kernel.

A problem is a rectangular window of axial coordinates with one code per
site:

    0  not part of the lattice (never visited)
    1  explorable
    2  exit: reaching an open site here means the cluster escaped the region
    3  box edge: reaching an open site here means the exploration was truncated

Sites of code 2 and 3 are recorded but never expanded.  The window carries a
ring of code-0 sites so the kernel needs no bounds checks.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numba as nb
import numpy as np

from .randomness import nb_sample_hash, nb_site_open

EXPLORE, EXIT, EDGE = 1, 2, 3


@nb.njit(inline="always")
def _is_open(h, force, idx, a, b, use_forced, reflect):
    if use_forced:
        f = force[idx]
        if f >= 0:
            return f == 1
    if reflect:
        return nb_site_open(h, a + b, -1 - b)
    return nb_site_open(h, a, b)


@nb.njit(nogil=True, cache=True)
def _run_chunk(seed, s_lo, s_hi, mask, forced, oi, oj, starts, targets, ci, cj,
               stop_on_escape, stop_on_targets, reflect,
               out_escaped, out_trunc, out_hits, out_maxd4, out_visited):
    W, H = mask.shape
    flat = mask.ravel()
    force = forced.ravel()
    use_forced = bool((force >= 0).any())
    ncell = W * H
    stamp = np.zeros(ncell, np.int32)
    qidx = np.empty(ncell, np.int32)
    qa = np.empty(ncell, np.int32)
    qb = np.empty(ncell, np.int32)
    # low two bits: site code; higher bits: target id + 1
    cell = flat.astype(np.int16)
    ntarget = targets.shape[0]
    for t in range(ntarget):
        cell[(targets[t, 0] - oi) * H + (targets[t, 1] - oj)] |= np.int16((t + 1) << 2)
    step = np.array([H, -H, 1, -1, H - 1, -H + 1], np.int32)
    da = np.array([1, -1, 0, 0, 1, -1], np.int64)
    db = np.array([0, 0, 1, -1, -1, 1], np.int64)

    for s in range(s_lo, s_hi):
        h = nb_sample_hash(seed, s)
        mark = s - s_lo + 1
        row = s - s_lo
        escaped = False
        trunc = False
        nhit = 0
        maxd4 = -1
        head = 0
        tail = 0
        for k in range(starts.shape[0]):
            a = starts[k, 0]
            b = starts[k, 1]
            idx = (a - oi) * H + (b - oj)
            if stamp[idx] == mark or cell[idx] & 3 == 0:
                continue
            stamp[idx] = mark
            if not _is_open(h, force, idx, a, b, use_forced, reflect):
                continue
            di = a - ci
            dj = b - cj
            d4 = (2 * di + dj) * (2 * di + dj) + 3 * dj * dj
            if d4 > maxd4:
                maxd4 = d4
            t = (cell[idx] >> 2) - 1
            if t >= 0:
                out_hits[row, t] = True
                nhit += 1
            code = cell[idx] & 3
            if code == 1:
                qidx[tail] = idx
                qa[tail] = a
                qb[tail] = b
                tail += 1
            elif code == 2:
                escaped = True
            else:
                trunc = True
        done = (stop_on_escape and escaped) or (stop_on_targets and ntarget > 0 and nhit == ntarget)
        visited = 0
        while head < tail and not done:
            idx = qidx[head]
            ca = qa[head]
            cb = qb[head]
            head += 1
            visited += 1
            for d in range(6):
                nidx = idx + step[d]
                if stamp[nidx] == mark:
                    continue
                stamp[nidx] = mark
                cv = cell[nidx]
                code = cv & 3
                if code == 0:
                    continue
                a = ca + da[d]
                b = cb + db[d]
                if not _is_open(h, force, nidx, a, b, use_forced, reflect):
                    continue
                di = a - ci
                dj = b - cj
                d4 = (2 * di + dj) * (2 * di + dj) + 3 * dj * dj
                if d4 > maxd4:
                    maxd4 = d4
                t = (cv >> 2) - 1
                if t >= 0:
                    out_hits[row, t] = True
                    nhit += 1
                    if stop_on_targets and nhit == ntarget:
                        done = True
                if code == 1:
                    qidx[tail] = nidx
                    qa[tail] = a
                    qb[tail] = b
                    tail += 1
                elif code == 2:
                    escaped = True
                    if stop_on_escape:
                        done = True
                else:
                    trunc = True
                if done:
                    break
        out_escaped[row] = escaped
        out_trunc[row] = trunc
        out_maxd4[row] = maxd4
        out_visited[row] = visited


def default_workers() -> int:
    env = os.environ.get("CRITPERC_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def chunk_bounds(start: int, n: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, n)) if n > 0 else 1
    edges = np.linspace(start, start + n, workers + 1).round().astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_batch(problem, seed: int, n: int, start: int = 0, workers: int | None = None):
    """Evaluate ``problem`` on samples ``start .. start+n-1``.

    Returns ``(escaped, truncated, hits, maxd4, visited)`` indexed by sample
    offset.  Chunks are independent, so the output does not depend on
    ``workers``.
    """
    workers = default_workers() if workers is None else workers
    ntarget = problem.targets.shape[0]
    escaped = np.zeros(n, np.bool_)
    trunc = np.zeros(n, np.bool_)
    hits = np.zeros((n, ntarget), np.bool_)
    maxd4 = np.zeros(n, np.int64)
    visited = np.zeros(n, np.int64)
    seed64 = np.uint64(seed)

    def work(bounds):
        lo, hi = bounds
        a, b = lo - start, hi - start
        _run_chunk(seed64, lo, hi, problem.mask, problem.forced, problem.oi, problem.oj,
                   problem.starts, problem.targets, problem.ci, problem.cj,
                   problem.stop_on_escape, problem.stop_on_targets, problem.reflect,
                   escaped[a:b], trunc[a:b], hits[a:b], maxd4[a:b], visited[a:b])

    chunks = chunk_bounds(start, n, workers)
    if len(chunks) == 1:
        work(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            list(pool.map(work, chunks))
    return escaped, trunc, hits, maxd4, visited
