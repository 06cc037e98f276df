"""Expected-dynamics matrices and Markov-chain objects.

The one-slot update matrix of the gossip process is random; its mean
splits into a symmetric doubly stochastic social part ``K`` (meeting
structure only) plus a zero-row-sum influence part ``L`` (all the
asymmetry).  The stationary distribution of ``Wbar = K + L`` weighs each
user's pull on the consensus value; the fundamental matrix and mean first
passage times of ``K`` power the per-user impact identities.

All computations are dense; the intended scale is n <= 200.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .network import AcquaintanceNetwork

COND_LIMIT = 1e12


@dataclass(frozen=True)
class MeanMatrices:
    """Mean one-slot update matrix and its social/influence split."""

    Wbar: np.ndarray
    K: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        for name in ("Wbar", "K", "L"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class StationaryDistribution:
    """Left fixed-point of the mean update matrix, with its method tag."""

    pi_bar: np.ndarray
    method: str  # "eigen" (direct linear solve) or "perturbation"

    def __post_init__(self):
        arr = np.ascontiguousarray(self.pi_bar, dtype=np.float64)
        arr.flags.writeable = False
        object.__setattr__(self, "pi_bar", arr)


@dataclass(frozen=True)
class PassageData:
    """Fundamental matrix Y and mean-first-passage-time matrix m of K."""

    Y: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        for name in ("Y", "m"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def build_mean_matrices(net: AcquaintanceNetwork) -> MeanMatrices:
    """Assemble K, L and Wbar = K + L from the network parameters.

    Per ordered pair (i, j), an averaging meeting contributes the
    symmetric pair-averaging matrix, an influence meeting the one-sided
    pull matrix, and a persistent meeting the identity, each weighted by
    its per-slot probability p_ij * type / n.  The sums collapse to dense
    closed forms: the social part is a scaled graph Laplacian of the
    symmetrized non-persistent weights, the influence part a combination
    of row/column sums of p*x.
    """
    n = net.n
    s = net.p * (1.0 - net.z)  # non-persistent meeting weight per ordered pair
    q = net.p * net.x  # influence weight per ordered pair
    total_p = float(net.p.sum())

    r = s.sum(axis=1)
    c = s.sum(axis=0)
    K = (s + s.T) / (2.0 * n)
    K[np.diag_indices(n)] += total_p / n - (r + c) / (2.0 * n)

    rq = q.sum(axis=1)
    cq = q.sum(axis=0)
    L = (net.delta - 0.5) * (np.diag(rq) - q) + 0.5 * (np.diag(cq) - q.T)
    L /= n

    return MeanMatrices(Wbar=K + L, K=K, L=L)


def stationary_distribution(mm: MeanMatrices) -> StationaryDistribution:
    """Stationary distribution of Wbar by direct dense linear solve.

    Solves the left fixed-point equations with one equation replaced by
    the normalization sum(pi) = 1 (partial-pivot LU underneath).

    Raises
    ------
    NumericalError
        If the system is singular or its condition number exceeds 1e12.
    """
    n = mm.Wbar.shape[0]
    A = mm.Wbar.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericalError(f"stationary solve too ill-conditioned (cond={cond:.3e})")
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"stationary solve failed: {exc}") from exc
    return StationaryDistribution(pi_bar=_cleanup_distribution(pi), method="eigen")


def _cleanup_distribution(pi: np.ndarray) -> np.ndarray:
    if pi.min() < -1e-8:
        raise NumericalError(f"stationary solve produced negative mass {pi.min():.3e}")
    pi = np.maximum(pi, 0.0)
    return pi / pi.sum()


def _connected_symmetric(K: np.ndarray) -> bool:
    n = K.shape[0]
    off = K.copy()
    np.fill_diagonal(off, 0.0)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in np.nonzero(off[u] > 0.0)[0]:
            if not seen[v]:
                seen[v] = True
                queue.append(int(v))
    return bool(seen.all())


def fundamental_matrix(K: np.ndarray) -> np.ndarray:
    """Deviation-series matrix Y = sum_k (K^k - K_inf) of the social chain.

    Computed in closed form as inv(I - K + K_inf) - K_inf with
    K_inf = ones/n, valid because K is doubly stochastic and irreducible.
    """
    n = K.shape[0]
    if not _connected_symmetric(K):
        raise ValueError("social matrix is reducible; fundamental matrix undefined")
    Kinf = np.full((n, n), 1.0 / n)
    try:
        Z = np.linalg.inv(np.eye(n) - K + Kinf)
    except np.linalg.LinAlgError as exc:  # cannot occur for irreducible K
        raise NumericalError(f"fundamental matrix inversion failed: {exc}") from exc
    return Z - Kinf


def mean_first_passage(Y: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """Mean first passage times m[i, j] = (Y[j, j] - Y[i, j]) / pi[j].

    ``pi`` is the stationary distribution of the chain that produced Y
    (uniform for a doubly stochastic social matrix); the diagonal is 0 by
    convention.
    """
    m = (np.diagonal(Y)[None, :] - Y) / np.asarray(pi)[None, :]
    np.fill_diagonal(m, 0.0)
    return m


def build_passage_data(K: np.ndarray) -> PassageData:
    """Fundamental matrix and passage times of a doubly stochastic K."""
    n = K.shape[0]
    Y = fundamental_matrix(K)
    m = mean_first_passage(Y, np.full(n, 1.0 / n))
    return PassageData(Y=Y, m=m)


def stationary_perturbation(mm: MeanMatrices) -> StationaryDistribution:
    """Stationary distribution via the influence-perturbation identity.

    Treats Wbar as the social chain K perturbed by L and evaluates

        (pi_bar - e/n)^T = (1/n) e^T (LY) (I - LY)^{-1}

    with Y the fundamental matrix of K.  Algebraically exact, and an
    independent cross-check for :func:`stationary_distribution`.
    """
    n = mm.K.shape[0]
    Y = fundamental_matrix(mm.K)
    M = mm.L @ Y
    rhs = M.T @ np.full(n, 1.0 / n)
    try:
        v = np.linalg.solve(np.eye(n) - M.T, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"perturbation solve failed (I - LY singular): {exc}") from exc
    pi = np.full(n, 1.0 / n) + v
    return StationaryDistribution(pi_bar=_cleanup_distribution(pi), method="perturbation")


def write_matrix_csv(path: str, matrix: np.ndarray) -> None:
    """Dump a matrix as row-major CSV at full float precision (debug aid)."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in np.atleast_2d(matrix):
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")
