"""Asynchronous meeting-process simulator.

One meeting happens per time slot: a uniformly chosen initiator i meets a
partner j drawn from its meeting row, and the pair's willingness values
update by mutual averaging, one-sided influence (j pulls i, retention
delta), or not at all.  Replicas are reproducible: replica k of an
ensemble draws from a counter-based Philox stream keyed by (seed, k), so
results do not depend on execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .network import AcquaintanceNetwork

REGULAR = "regular"
INFLUENCE = "influence"
PERSISTENT = "persistent"

_CHUNK_SLOTS = 16384


@dataclass(frozen=True)
class Meeting:
    """A single pairwise interaction: initiator i meets partner j."""

    slot: int
    i: int
    j: int
    kind: str


@dataclass(frozen=True)
class SimulationTrace:
    """Recorded trajectory of one replica.

    ``slots``/``snapshots``/``spread`` hold the recorded states (slot 0 is
    always included, the final state always last); ``final`` is the last
    willingness vector; ``value`` its arithmetic mean, the replica's
    converged common value when ``converged`` is set.
    """

    slots: np.ndarray
    snapshots: np.ndarray
    spread: np.ndarray
    final: np.ndarray
    value: float
    converged: bool
    slots_used: int
    monotone: bool
    seed: object


@dataclass(frozen=True)
class EnsembleSummary:
    """Aggregate over independent replicas."""

    replicas: int
    converged_count: int
    convergence_rate: float
    mean: float
    stderr: float
    mean_slots: float
    max_slots_used: int
    values: np.ndarray
    seed: object


def build_sampler(net: AcquaintanceNetwork):
    """CSR-style cumulative meeting table: (nbr_idx, nbr_cum, row_start).

    Row i's partners live in nbr_idx[row_start[i]:row_start[i+1]] with
    cumulative probabilities ending exactly at 1.0 (each row rescaled by
    its own sum, which the validator already pins to 1 within 1e-9).
    """
    n = net.n
    nbr_idx: list[int] = []
    cums: list[np.ndarray] = []
    row_start = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        cols = np.nonzero(net.p[i])[0]
        if cols.size == 0:
            raise ValueError(f"node {i} has no meeting partners")
        cum = np.cumsum(net.p[i, cols])
        cum /= cum[-1]
        cum[-1] = 1.0
        nbr_idx.extend(int(cc) for cc in cols)
        cums.append(cum)
        row_start[i + 1] = row_start[i] + cols.size
    return np.asarray(nbr_idx, dtype=np.int64), np.concatenate(cums), row_start


_KIND_BY_CODE = {0: REGULAR, 1: INFLUENCE, 2: PERSISTENT}


def _decode_meeting(net, u0: float, u1: float, u2: float, sampler, slot: int) -> Meeting:
    nbr_idx, nbr_cum, row_start = sampler
    n = net.n
    i = min(int(u0 * n), n - 1)
    k = int(np.searchsorted(nbr_cum[row_start[i]:row_start[i + 1]], u1, side="right"))
    j = int(nbr_idx[row_start[i] + k])
    yy = net.y[i, j]
    xx = net.x[i, j]
    if u2 < yy:
        kind = REGULAR
    elif u2 < yy + xx:
        kind = INFLUENCE
    else:
        kind = PERSISTENT
    return Meeting(slot=slot, i=i, j=j, kind=kind)


def sample_meeting(net: AcquaintanceNetwork, rng: np.random.Generator, slot: int = 0) -> Meeting:
    """Draw one meeting: initiator uniform, partner from p[i], kind from (y, x, z)."""
    u = rng.random(3)
    return _decode_meeting(net, u[0], u[1], u[2], build_sampler(net), slot)


def sample_meetings_batch(net: AcquaintanceNetwork, count: int, rng: np.random.Generator):
    """Vectorized meeting sampler; returns (i, j, kind_code) arrays.

    kind codes: 0 regular, 1 influence, 2 persistent.
    """
    nbr_idx, nbr_cum, row_start = build_sampler(net)
    n = net.n
    u = rng.random((count, 3))
    i = np.minimum((u[:, 0] * n).astype(np.int64), n - 1)
    # Shift each row's cumulative range into [row, row + 1] so one global
    # searchsorted resolves every draw.
    shifted = nbr_cum + np.repeat(np.arange(n), np.diff(row_start))
    pos = np.searchsorted(shifted, u[:, 1] + i, side="right")
    j = nbr_idx[pos]
    yy = net.y[i, j]
    xx = net.x[i, j]
    kind = np.full(count, 2, dtype=np.int64)
    kind[u[:, 2] < yy + xx] = 1
    kind[u[:, 2] < yy] = 0
    return i, j, kind


def apply_meeting(w: np.ndarray, meeting: Meeting, delta: float) -> np.ndarray:
    """One willingness update; pure (returns a new vector).

    Averaging sets both endpoints to their mean; influence moves only the
    initiator toward the partner with retention delta, clamped into the
    pre-meeting pair interval so the global spread cannot expand even
    under floating-point rounding; persistent meetings change nothing.
    """
    out = np.array(w, dtype=np.float64, copy=True)
    i, j = meeting.i, meeting.j
    if meeting.kind == REGULAR:
        avg = 0.5 * (out[i] + out[j])
        out[i] = avg
        out[j] = avg
    elif meeting.kind == INFLUENCE:
        a, b = out[i], out[j]
        v = delta * a + (1.0 - delta) * b
        out[i] = min(max(v, min(a, b)), max(a, b))
    elif meeting.kind != PERSISTENT:
        raise ValueError(f"unknown meeting kind {meeting.kind!r}")
    return out


def run_replica(
    net: AcquaintanceNetwork,
    max_slots: int = 10**6,
    tol: float = 1e-6,
    record_every: int | None = None,
    seed: int | np.random.SeedSequence = 0,
) -> SimulationTrace:
    """Simulate one replica until the willingness spread drops to tol.

    ``record_every`` controls snapshot density (default: one per n slots;
    0 disables recording except for the initial and final states).
    Deterministic for a fixed (network, parameters, seed).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = net.n
    if record_every is None:
        record_every = n
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rng = np.random.Generator(np.random.Philox(seq))

    nbr_idx, nbr_cum, row_start = build_sampler(net)
    w = np.array(net.w0, dtype=np.float64, copy=True)
    spread = float(w.max() - w.min())

    max_records = (max_slots // record_every + 2) if record_every > 0 else 2
    rec_w = np.empty((max_records, n))
    rec_spread = np.empty(max_records)
    rec_slots = np.empty(max_records, dtype=np.int64)
    rec_w[0] = w
    rec_spread[0] = spread
    rec_slots[0] = 0
    rec_count = 1

    slot = 0
    monotone = True
    status = kernels.CONVERGED if spread <= tol else kernels.CHUNK_EXHAUSTED
    while status == kernels.CHUNK_EXHAUSTED:
        remaining = max_slots - slot
        if remaining <= 0:
            status = kernels.BUDGET_EXHAUSTED
            break
        uniforms = rng.random((min(_CHUNK_SLOTS, remaining), 3))
        slot, spread, rec_count, status, chunk_monotone = kernels.gossip_chunk(
            w, nbr_idx, nbr_cum, row_start, net.x, net.y, float(net.delta),
            float(tol), uniforms, slot, max_slots, spread,
            record_every, rec_w, rec_spread, rec_slots, rec_count,
        )
        monotone = monotone and bool(chunk_monotone)

    if rec_slots[rec_count - 1] != slot:
        rec_w[rec_count] = w
        rec_spread[rec_count] = spread
        rec_slots[rec_count] = slot
        rec_count += 1

    return SimulationTrace(
        slots=rec_slots[:rec_count].copy(),
        snapshots=rec_w[:rec_count].copy(),
        spread=rec_spread[:rec_count].copy(),
        final=w,
        value=float(w.mean()),
        converged=(status == kernels.CONVERGED),
        slots_used=int(slot),
        monotone=monotone,
        seed=seed,
    )


def simulate_ensemble(
    net: AcquaintanceNetwork,
    replicas: int,
    max_slots: int = 10**6,
    tol: float = 1e-6,
    seed: int = 0,
) -> EnsembleSummary:
    """Run independent replicas and summarize their converged values.

    Replica k draws from the stream keyed by (seed, k); the summary is
    identical however the replicas might be scheduled.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    values = np.empty(replicas)
    converged = np.zeros(replicas, dtype=bool)
    slots = np.empty(replicas, dtype=np.int64)
    for k in range(replicas):
        trace = run_replica(
            net,
            max_slots=max_slots,
            tol=tol,
            record_every=0,
            seed=np.random.SeedSequence(entropy=seed, spawn_key=(k,)),
        )
        values[k] = trace.value
        converged[k] = trace.converged
        slots[k] = trace.slots_used

    good = values[converged]
    cnt = int(converged.sum())
    mean = float(good.mean()) if cnt else float("nan")
    stderr = float(good.std(ddof=1) / np.sqrt(cnt)) if cnt > 1 else 0.0
    return EnsembleSummary(
        replicas=replicas,
        converged_count=cnt,
        convergence_rate=cnt / replicas,
        mean=mean,
        stderr=stderr,
        mean_slots=float(slots.mean()),
        max_slots_used=int(slots.max()),
        values=values,
        seed=seed,
    )


def empirical_mean_update(net: AcquaintanceNetwork, count: int, rng: np.random.Generator):
    """Monte-Carlo estimate of the mean one-slot update matrix.

    Samples ``count`` meetings, accumulates the induced update matrices
    entrywise and returns (mean, stderr) arrays; a cross-check of the
    analytic mean matrices at 3-sigma resolution.
    """
    n = net.n
    i, j, kind = sample_meetings_batch(net, count, rng)
    dsum = np.zeros((n, n))
    dsq = np.zeros((n, n))

    reg = kind == 0
    inf = kind == 1
    one_minus_delta = 1.0 - net.delta
    # Averaging meeting deviation from I: -1/2 at (i,i),(j,j); +1/2 at (i,j),(j,i)
    for rows, cols, val in (
        (i[reg], i[reg], -0.5),
        (j[reg], j[reg], -0.5),
        (i[reg], j[reg], 0.5),
        (j[reg], i[reg], 0.5),
        # Influence meeting deviation: -(1-delta) at (i,i); +(1-delta) at (i,j)
        (i[inf], i[inf], -one_minus_delta),
        (i[inf], j[inf], one_minus_delta),
    ):
        np.add.at(dsum, (rows, cols), val)
        np.add.at(dsq, (rows, cols), val * val)

    mean = np.eye(n) + dsum / count
    var = np.maximum(dsq / count - (dsum / count) ** 2, 0.0)
    stderr = np.sqrt(var / count)
    return mean, stderr


def write_trace_csv(path: str, trace: SimulationTrace) -> None:
    """Trace export: one row per recorded slot, columns slot,node_*,spread."""
    n = trace.snapshots.shape[1]
    header = "slot," + ",".join(f"node_{k}" for k in range(n)) + ",spread"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in range(trace.slots.shape[0]):
            cells = [str(int(trace.slots[row]))]
            cells.extend(repr(float(v)) for v in trace.snapshots[row])
            cells.append(repr(float(trace.spread[row])))
            fh.write(",".join(cells) + "\n")
