"""Acquaintance-network model: parsing, validation, and basic graph metrics.

A network couples a meeting-probability matrix ``p`` with per-ordered-pair
interaction-type probabilities ``x`` (one-sided influence), ``y`` (mutual
averaging) and ``z`` (no change), an influence-retention factor ``delta``
and an initial willingness vector ``w0``.  Node ids are 0-based everywhere,
both in memory and in the JSON file format.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import NetworkFormatError, NotStronglyConnectedError

ROW_SUM_TOL = 1e-9
TYPE_SUM_TOL = 1e-9


@dataclass(frozen=True)
class AcquaintanceNetwork:
    """Immutable acquaintance network.

    Attributes
    ----------
    n : int
        Number of users.
    delta : float
        Influence retention in (0, 1/2]; at 1/2 an influence meeting is
        indistinguishable from averaging for the influenced side.
    p : ndarray, shape (n, n)
        Meeting probabilities; ``p[i, j]`` is the probability that user i,
        when initiating, meets user j.  Zero diagonal, rows sum to 1.
    x, y, z : ndarray, shape (n, n)
        Interaction-type probabilities conditional on the meeting (i, j):
        influence (j pulls i), regular (mutual averaging), persistent
        (no change).  ``x + y + z = 1`` wherever ``p > 0``.
    w0 : ndarray, shape (n,)
        Initial willingness values in [0, 1]; 1 marks an adopter.
    """

    n: int
    delta: float
    p: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    w0: np.ndarray

    def __post_init__(self):
        for name in ("p", "x", "y", "z"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (self.n, self.n):
                raise ValueError(f"{name} must have shape ({self.n}, {self.n})")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        w0 = np.ascontiguousarray(self.w0, dtype=np.float64)
        if w0.shape != (self.n,):
            raise ValueError(f"w0 must have shape ({self.n},)")
        w0.flags.writeable = False
        object.__setattr__(self, "w0", w0)

    @property
    def support(self) -> np.ndarray:
        """Boolean adjacency of the directed edge set {(i, j): p[i, j] > 0}."""
        return self.p > 0.0

    def edge_list(self) -> list[tuple[int, int]]:
        """Ordered pairs (i, j) with p[i, j] > 0, in row-major order."""
        rows, cols = np.nonzero(self.p)
        return list(zip(rows.tolist(), cols.tolist()))

    @property
    def influence_mass(self) -> float:
        """Total influence weight sum_ij p[i, j] * x[i, j]."""
        return float(np.sum(self.p * self.x))


@dataclass(frozen=True)
class EdgePartition:
    """Two-sided node split produced by removing a bridge edge.

    ``side_i`` contains the edge's tail i, ``side_j`` its head j; together
    they partition the node set.
    """

    removed_edge: tuple[int, int]
    side_i: frozenset[int]
    side_j: frozenset[int]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate_network`; violations are data, not faults."""

    ok: bool
    violations: list[str] = field(default_factory=list)


def _require_key(obj: dict, key: str, context: str):
    if key not in obj:
        raise NetworkFormatError(f"missing required field '{key}' in {context}")
    return obj[key]


def _as_number(value, key: str):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise NetworkFormatError(f"field '{key}' must be a number, got {value!r}")
    return float(value)


def parse_network(text: str, renormalize: bool = False) -> AcquaintanceNetwork:
    """Parse a UTF-8 JSON network document.

    The document carries ``n``, ``delta``, ``w0`` and an ``edges`` array of
    ``{"from", "to", "p", "x", "y", "z"}`` objects; ordered pairs absent
    from ``edges`` have meeting probability 0.  Structural problems raise
    :class:`NetworkFormatError` naming the offending key; semantic checks
    are deferred to :func:`validate_network`.

    With ``renormalize=True`` each nonzero row of ``p`` is rescaled to sum
    exactly to 1 (opt-in repair for row sums that only hold approximately).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise NetworkFormatError("top-level document must be a JSON object")

    n_raw = _require_key(doc, "n", "document")
    if isinstance(n_raw, bool) or not isinstance(n_raw, int) or n_raw < 1:
        raise NetworkFormatError(f"field 'n' must be a positive integer, got {n_raw!r}")
    n = n_raw

    delta = _as_number(_require_key(doc, "delta", "document"), "delta")

    w0_raw = _require_key(doc, "w0", "document")
    if not isinstance(w0_raw, list) or len(w0_raw) != n:
        raise NetworkFormatError(f"field 'w0' must be an array of {n} numbers")
    w0 = np.array([_as_number(v, "w0") for v in w0_raw], dtype=np.float64)

    edges = _require_key(doc, "edges", "document")
    if not isinstance(edges, list):
        raise NetworkFormatError("field 'edges' must be an array")

    p = np.zeros((n, n))
    x = np.zeros((n, n))
    y = np.zeros((n, n))
    z = np.zeros((n, n))
    seen: set[tuple[int, int]] = set()
    for idx, edge in enumerate(edges):
        ctx = f"edges[{idx}]"
        if not isinstance(edge, dict):
            raise NetworkFormatError(f"{ctx} must be an object")
        i = _require_key(edge, "from", ctx)
        j = _require_key(edge, "to", ctx)
        for key, val in (("from", i), ("to", j)):
            if isinstance(val, bool) or not isinstance(val, int):
                raise NetworkFormatError(f"{ctx}: field '{key}' must be an integer")
        if not (0 <= i < n) or not (0 <= j < n):
            raise NetworkFormatError(f"{ctx}: node index out of range (from={i}, to={j}, n={n})")
        if (i, j) in seen:
            raise NetworkFormatError(f"{ctx}: duplicate edge ({i}, {j})")
        seen.add((i, j))
        p[i, j] = _as_number(_require_key(edge, "p", ctx), "p")
        x[i, j] = _as_number(_require_key(edge, "x", ctx), "x")
        y[i, j] = _as_number(_require_key(edge, "y", ctx), "y")
        z[i, j] = _as_number(_require_key(edge, "z", ctx), "z")

    if renormalize:
        sums = p.sum(axis=1)
        nz = sums > 0
        p[nz] /= sums[nz, None]

    return AcquaintanceNetwork(n=n, delta=delta, p=p, x=x, y=y, z=z, w0=w0)


def serialize_network(net: AcquaintanceNetwork) -> str:
    """Serialize a network back to the JSON document format."""
    edges = []
    for i, j in net.edge_list():
        edges.append(
            {
                "from": int(i),
                "to": int(j),
                "p": float(net.p[i, j]),
                "x": float(net.x[i, j]),
                "y": float(net.y[i, j]),
                "z": float(net.z[i, j]),
            }
        )
    doc = {
        "n": net.n,
        "delta": float(net.delta),
        "w0": [float(v) for v in net.w0],
        "edges": edges,
    }
    return json.dumps(doc, indent=2)


def load_network(path: str, renormalize: bool = False) -> AcquaintanceNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_network(fh.read(), renormalize=renormalize)


def _strongly_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    if n == 1:
        return True
    for mat in (adj, adj.T):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in np.nonzero(mat[u])[0]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(int(v))
        if not seen.all():
            return False
    return True


def validate_network(net: AcquaintanceNetwork) -> ValidationReport:
    """Check every model invariant; returns ok or the full violation list."""
    v: list[str] = []
    n = net.n

    if not (0.0 < net.delta <= 0.5):
        v.append(f"delta {net.delta} outside (0, 0.5]")

    diag = np.diagonal(net.p)
    for i in np.nonzero(diag != 0.0)[0]:
        v.append(f"self-meeting probability nonzero at node {i}")

    if np.any(net.p < 0.0) or np.any(net.p > 1.0):
        bad = np.argwhere((net.p < 0.0) | (net.p > 1.0))[0]
        v.append(f"meeting probability out of [0, 1] at ({bad[0]}, {bad[1]})")

    row_sums = net.p.sum(axis=1)
    for i in np.nonzero(np.abs(row_sums - 1.0) > ROW_SUM_TOL)[0]:
        v.append(f"meeting probabilities of node {i} sum to {row_sums[i]:.12g}, expected 1")

    for name, mat in (("x", net.x), ("y", net.y), ("z", net.z)):
        if np.any(mat < -TYPE_SUM_TOL) or np.any(mat > 1.0 + TYPE_SUM_TOL):
            bad = np.argwhere((mat < -TYPE_SUM_TOL) | (mat > 1.0 + TYPE_SUM_TOL))[0]
            v.append(f"interaction probability {name} out of [0, 1] at ({bad[0]}, {bad[1]})")

    support = net.p > 0.0
    type_sum = net.x + net.y + net.z
    for i, j in np.argwhere(support & (np.abs(type_sum - 1.0) > TYPE_SUM_TOL)):
        v.append(f"interaction probabilities at edge ({i}, {j}) sum to {type_sum[i, j]:.12g}, expected 1")

    for i, j in np.argwhere(support & (net.x + net.y <= 0.0)):
        v.append(f"persistent-only edge ({i}, {j}): x + y must be positive")

    if not _strongly_connected(support):
        v.append("not strongly connected")

    for i in np.nonzero((net.w0 < 0.0) | (net.w0 > 1.0))[0]:
        v.append(f"initial willingness w0[{i}] = {net.w0[i]:.12g} outside [0, 1]")

    return ValidationReport(ok=not v, violations=v)


def _bfs_hops(adj: np.ndarray, source: int) -> np.ndarray:
    n = adj.shape[0]
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in np.nonzero(adj[u])[0]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(int(w))
    return dist


def diameter(net: AcquaintanceNetwork) -> int:
    """Maximum directed shortest-path hop count over all ordered node pairs."""
    adj = net.support
    best = 0
    for s in range(net.n):
        dist = _bfs_hops(adj, s)
        if np.any(dist < 0):
            raise NotStronglyConnectedError(f"no path from node {s} to some node")
        best = max(best, int(dist.max()))
    return best


def edge_partition(net: AcquaintanceNetwork, i: int, j: int) -> EdgePartition | None:
    """Split the node set by removing undirected edge {i, j}.

    Returns the two components (i's side first) when the undirected support
    graph minus {i, j} is disconnected, or ``None`` when the edge is not a
    bridge.  Bridges are undirected because the social matrix built from
    the network is symmetric.
    """
    if not (0 <= i < net.n and 0 <= j < net.n) or i == j:
        raise ValueError(f"invalid node pair ({i}, {j})")
    if net.p[i, j] <= 0.0 and net.p[j, i] <= 0.0:
        raise ValueError(f"({i}, {j}) is not an edge")

    undirected = net.support | net.support.T
    undirected = undirected.copy()
    undirected[i, j] = False
    undirected[j, i] = False

    seen = np.zeros(net.n, dtype=bool)
    seen[i] = True
    queue = deque([i])
    while queue:
        u = queue.popleft()
        for w in np.nonzero(undirected[u])[0]:
            if not seen[w]:
                seen[w] = True
                queue.append(int(w))
    if seen[j]:
        return None
    side_i = frozenset(int(k) for k in np.nonzero(seen)[0])
    side_j = frozenset(int(k) for k in np.nonzero(~seen)[0])
    return EdgePartition(removed_edge=(i, j), side_i=side_i, side_j=side_j)
