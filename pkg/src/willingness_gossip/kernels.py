"""Hot inner loops: gossip slot iteration and conductance subset scan.

Both kernels are written as plain Python over numpy arrays and compiled
with numba when available.  Setting the environment variable
``WG_NO_NUMBA=1`` (or any of 1/true/yes) before import selects the
fallback path: the gossip loop runs uncompiled and the conductance scan
switches to a vectorized numpy enumeration.  ``benchmarks/bench_kernels.py``
compares the two paths.

The gossip kernel consumes pre-drawn uniforms, three per slot, so the
compiled and fallback paths reproduce bit-identical trajectories from the
same random stream.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("WG_NO_NUMBA", "").strip().lower()
_DISABLED = _FLAG in {"1", "true", "yes"}

if not _DISABLED:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False


def backend() -> str:
    """Name of the active kernel backend ("numba" or "numpy")."""
    return "numba" if NUMBA_ENABLED else "numpy"


# Chunk status codes returned by the gossip kernel.
CHUNK_EXHAUSTED = 0
CONVERGED = 1
BUDGET_EXHAUSTED = 2


def _gossip_chunk(
    w,
    nbr_idx,
    nbr_cum,
    row_start,
    x,
    y,
    delta,
    tol,
    uniforms,
    slot,
    max_slots,
    prev_spread,
    record_every,
    rec_w,
    rec_spread,
    rec_slots,
    rec_count,
):
    """Advance the meeting process through one chunk of uniforms.

    Mutates ``w`` and the rec_* buffers in place.  Each slot draws an
    initiator uniformly, a partner from the initiator's meeting row
    (CSR-style cumulative table) and a meeting kind from (y, x, rest).
    Influence updates are clamped into the pre-meeting pair interval so
    the willingness spread is exactly non-increasing in floating point.

    Returns (slot, prev_spread, rec_count, status, monotone_ok).
    """
    n = w.shape[0]
    monotone_ok = True
    status = CHUNK_EXHAUSTED
    for t in range(uniforms.shape[0]):
        if slot >= max_slots:
            status = BUDGET_EXHAUSTED
            break
        u0 = uniforms[t, 0]
        u1 = uniforms[t, 1]
        u2 = uniforms[t, 2]

        i = int(u0 * n)
        if i >= n:
            i = n - 1
        lo = row_start[i]
        hi = row_start[i + 1]
        while lo < hi:
            mid = (lo + hi) // 2
            if nbr_cum[mid] > u1:
                hi = mid
            else:
                lo = mid + 1
        j = nbr_idx[lo]

        yy = y[i, j]
        xx = x[i, j]
        if u2 < yy:
            avg = 0.5 * (w[i] + w[j])
            w[i] = avg
            w[j] = avg
        elif u2 < yy + xx:
            a = w[i]
            b = w[j]
            v = delta * a + (1.0 - delta) * b
            pair_lo = a if a < b else b
            pair_hi = a if a > b else b
            if v < pair_lo:
                v = pair_lo
            if v > pair_hi:
                v = pair_hi
            w[i] = v
        # else persistent: no change

        slot += 1

        mx = w[0]
        mn = w[0]
        for k in range(1, n):
            if w[k] > mx:
                mx = w[k]
            if w[k] < mn:
                mn = w[k]
        spread = mx - mn
        if spread > prev_spread:
            monotone_ok = False
        prev_spread = spread

        if record_every > 0 and slot % record_every == 0:
            rec_slots[rec_count] = slot
            rec_spread[rec_count] = spread
            for k in range(n):
                rec_w[rec_count, k] = w[k]
            rec_count += 1

        if spread <= tol:
            status = CONVERGED
            break

    return slot, prev_spread, rec_count, status, monotone_ok


def _conductance_gray(K):
    """Exact conductance by gray-code enumeration of subsets containing node 0.

    Tracks the cut weight incrementally (one node flips per step), so the
    scan over the 2^(n-1) - 1 proper subsets costs O(n) per subset.
    """
    n = K.shape[0]
    in_a = np.zeros(n, dtype=np.bool_)
    in_a[0] = True
    size_a = 1
    cut = 0.0
    for u in range(1, n):
        cut += K[0, u]

    best = n * cut / (size_a * (n - size_a))
    gray_prev = 0
    total = 1 << (n - 1)
    for c in range(1, total):
        gray = c ^ (c >> 1)
        changed = gray ^ gray_prev
        gray_prev = gray
        v = 1
        bit = changed >> 1
        while bit:
            bit >>= 1
            v += 1
        # v is now the flipped node id (bit index + 1)
        delta_cut = 0.0
        for u in range(n):
            if u == v:
                continue
            if in_a[u]:
                delta_cut -= K[v, u]
            else:
                delta_cut += K[v, u]
        if in_a[v]:
            in_a[v] = False
            size_a -= 1
            cut -= delta_cut
        else:
            in_a[v] = True
            size_a += 1
            cut += delta_cut
        if size_a == n:
            continue
        ratio = n * cut / (size_a * (n - size_a))
        if ratio < best:
            best = ratio
    return best


def _conductance_numpy(K: np.ndarray) -> float:
    """Vectorized fallback: evaluate all subsets containing node 0 in chunks."""
    n = K.shape[0]
    total = 1 << (n - 1)
    bit_cols = np.arange(n - 1, dtype=np.uint32)
    best = np.inf
    chunk = 1 << 14
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.uint32)
        masks = np.empty((idx.size, n))
        masks[:, 0] = 1.0
        masks[:, 1:] = (idx[:, None] >> bit_cols[None, :]) & 1
        size_a = masks.sum(axis=1)
        cut = ((masks @ K) * (1.0 - masks)).sum(axis=1)
        proper = size_a < n
        ratios = n * cut[proper] / (size_a[proper] * (n - size_a[proper]))
        if ratios.size:
            best = min(best, float(ratios.min()))
    return best


if NUMBA_ENABLED:
    gossip_chunk = njit(cache=True, nogil=True)(_gossip_chunk)
    conductance_scan = njit(cache=True, nogil=True)(_conductance_gray)
else:
    gossip_chunk = _gossip_chunk
    conductance_scan = _conductance_numpy


def warmup() -> None:
    """Trigger JIT compilation on tiny inputs (no-op on the fallback path)."""
    w = np.array([0.0, 1.0])
    nbr_idx = np.array([1, 0], dtype=np.int64)
    nbr_cum = np.array([1.0, 1.0])
    row_start = np.array([0, 1, 2], dtype=np.int64)
    x = np.zeros((2, 2))
    y = np.ones((2, 2))
    uniforms = np.full((2, 3), 0.25)
    rec_w = np.zeros((4, 2))
    rec_spread = np.zeros(4)
    rec_slots = np.zeros(4, dtype=np.int64)
    gossip_chunk(
        w, nbr_idx, nbr_cum, row_start, x, y, 0.5, 1e-9, uniforms,
        0, 2, 1.0, 1, rec_w, rec_spread, rec_slots, 0,
    )
    conductance_scan(np.full((2, 2), 0.5))
