"""Per-client impact on the consensus value, and premium ranking.

A client's impact is its stationary weight minus the uniform share 1/n:
positive impact means the client drags the consensus above the plain
average of initial willingness.  Three routes are computed: the exact
value from the stationary distribution, an exact identity through mean
first passage times, and (when a single influential bridge splits the
network) a closed form in the two component sizes.  A conductance-based
cap completes the picture for arbitrary topologies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Thm6InapplicableError
from .meanfield import PassageData
from .network import AcquaintanceNetwork, EdgePartition, edge_partition

ZERO_IMPACT_FLOOR = 1e-13

TIER_INCENTIVIZE = "incentivize"
TIER_REVIEW = "review"
TIER_STANDARD = "standard"


@dataclass(frozen=True)
class Thm6Result:
    """Closed-form impacts for a single-influential-bridge network."""

    values: np.ndarray
    mu: float
    edge: tuple[int, int]
    side_i: frozenset[int]
    side_j: frozenset[int]


@dataclass(frozen=True)
class ClientRank:
    node: int
    impact: float
    score: float
    rank: int
    tier: str


@dataclass(frozen=True)
class ImpactReport:
    """Everything the insurer needs to differentiate client premiums."""

    exact: np.ndarray
    thm5: np.ndarray
    thm5_residual: np.ndarray
    thm7_bound: float | None
    thm6: Thm6Result | None
    thm6_residual: float | None
    thm6_reason: str | None
    ranking: list[ClientRank]


def impact_exact(pi_bar: np.ndarray) -> np.ndarray:
    """Per-node deviation of the stationary weight from the uniform 1/n."""
    pi_bar = np.asarray(pi_bar, dtype=float)
    return pi_bar - 1.0 / pi_bar.shape[0]


def impact_thm5(
    net: AcquaintanceNetwork,
    pi_bar: np.ndarray,
    passage: PassageData,
) -> tuple[np.ndarray, np.ndarray]:
    """Impact through the passage-time identity, plus residuals vs exact.

    Evaluates, per node k,

        (1/(2 n^2)) sum_ij p_ij x_ij ((1 - 2 delta) pi_i + pi_j) (m_ik - m_jk)

    which is algebraically exact for any valid network.  The second
    coefficient is the stationary weight of the influencer j (the
    derivation combines (1/2 - delta) pi_i with (1/2) pi_j).
    """
    n = net.n
    pi_bar = np.asarray(pi_bar, dtype=float)
    q = net.p * net.x
    coef = q * ((1.0 - 2.0 * net.delta) * pi_bar[:, None] + pi_bar[None, :])
    weights = coef.sum(axis=1) - coef.sum(axis=0)
    values = passage.m.T @ weights / (2.0 * n * n)
    residual = np.abs(values - impact_exact(pi_bar))
    return values, residual


def find_influential_edge(net: AcquaintanceNetwork) -> tuple[int, int]:
    """The unique ordered pair carrying influence weight, or a refusal.

    Raises Thm6InapplicableError unless exactly one ordered pair (i, j)
    has p_ij * x_ij > 0 (two opposite influential directions on the same
    pair count as multiple edges; the closed form assumes one).
    """
    q = net.p * net.x
    pairs = np.argwhere(q > 0.0)
    if pairs.shape[0] == 0:
        raise Thm6InapplicableError("no influential edge")
    if pairs.shape[0] > 1:
        raise Thm6InapplicableError(f"multiple influential edges ({pairs.shape[0]})")
    i, j = pairs[0]
    return int(i), int(j)


def impact_thm6(net: AcquaintanceNetwork, partition: EdgePartition) -> Thm6Result:
    """Closed-form impacts when one influential bridge splits the network.

    ``partition`` must be the bridge split of the unique influential edge
    (i, j); every node on j's side shares the value proportional to
    +|side_i|, every node on i's side the value proportional to
    -|side_j|.  Reported alongside its residual against the exact impact
    rather than trusted blindly.
    """
    i, j = find_influential_edge(net)
    if (i, j) != tuple(partition.removed_edge):
        raise Thm6InapplicableError(
            f"partition edge {partition.removed_edge} is not the influential edge ({i}, {j})"
        )
    n = net.n
    mu = float(
        net.p[i, j] * net.x[i, j]
        / (net.p[i, j] * (1.0 - net.z[i, j]) + net.p[j, i] * (1.0 - net.z[j, i]))
    )
    size_i = len(partition.side_i)
    size_j = len(partition.side_j)
    denom = 1.0 - (mu / n) * ((1.0 + 2.0 * net.delta) * size_i - size_j)
    if denom == 0.0:
        raise Thm6InapplicableError("degenerate closed-form denominator")
    base = (2.0 / (n * n)) * mu * (1.0 - net.delta) / denom
    values = np.empty(n)
    for k in partition.side_j:
        values[k] = base * size_i
    for k in partition.side_i:
        values[k] = -base * size_j
    return Thm6Result(values=values, mu=mu, edge=(i, j), side_i=partition.side_i, side_j=partition.side_j)


def try_thm6(net: AcquaintanceNetwork, exact: np.ndarray):
    """Attempt the bridge closed form; returns (result, residual, reason).

    ``result`` is None with a human-readable ``reason`` when the network
    has no single influential bridge; otherwise ``residual`` is the max
    absolute gap between the closed form and the exact impacts.
    """
    try:
        i, j = find_influential_edge(net)
    except Thm6InapplicableError as exc:
        return None, None, str(exc)
    partition = edge_partition(net, i, j)
    if partition is None:
        return None, None, f"influential edge ({i}, {j}) is not a bridge"
    try:
        result = impact_thm6(net, partition)
    except Thm6InapplicableError as exc:
        return None, None, str(exc)
    residual = float(np.max(np.abs(result.values - exact)))
    return result, residual, None


def impact_thm7_bound(net: AcquaintanceNetwork, psi: float | None) -> float | None:
    """Conductance cap on every |impact|: (2/n) sum p_ij x_ij (1 + ln n)/psi.

    None when the conductance was skipped.  The logarithm is natural; the
    bound is validated against exact impacts rather than used as a
    guarantee, so the base only affects looseness.
    """
    if psi is None:
        return None
    if psi <= 0.0:
        raise ValueError(f"conductance must be positive, got {psi}")
    n = net.n
    return (2.0 * net.influence_mass / n) * (1.0 + math.log(n)) / psi


def rank_clients(impacts: np.ndarray) -> list[ClientRank]:
    """Descending impact ranking with normalized scores and premium tiers.

    Sorting uses impacts rounded to 12 significant digits (the precision
    reports serialize at), so clients whose printed impacts are equal tie
    and break by node id; solver noise at the last bits cannot reorder
    mathematically equal clients.  Top quartile of ranks is tagged for
    incentives, bottom quartile for standard contracts, the middle for
    review.  When every impact is zero (below 1e-13 in magnitude, covering
    solver noise on influence-free networks) all nodes tie: ranks follow
    node ids and everyone lands in review.
    """
    impacts = np.asarray(impacts, dtype=float)
    n = impacts.shape[0]
    peak = float(np.max(np.abs(impacts))) if n else 0.0
    all_zero = peak <= ZERO_IMPACT_FLOOR

    if all_zero:
        order = list(range(n))
    else:
        order = sorted(range(n), key=lambda k: (-float(f"{impacts[k]:.12g}"), k))
    quart = math.ceil(n / 4)
    ranking = []
    for pos, node in enumerate(order):
        rank = pos + 1
        if all_zero:
            tier = TIER_REVIEW
            score = 0.0
        else:
            score = float(impacts[node] / peak)
            if rank <= quart:
                tier = TIER_INCENTIVIZE
            elif rank > n - quart:
                tier = TIER_STANDARD
            else:
                tier = TIER_REVIEW
        ranking.append(ClientRank(node=node, impact=float(impacts[node]), score=score, rank=rank, tier=tier))
    return ranking


def build_impact_report(
    net: AcquaintanceNetwork,
    pi_bar: np.ndarray,
    passage: PassageData,
    psi: float | None,
) -> ImpactReport:
    """Assemble every impact route plus the premium ranking."""
    exact = impact_exact(pi_bar)
    thm5, thm5_res = impact_thm5(net, pi_bar, passage)
    thm6, thm6_res, thm6_reason = try_thm6(net, exact)
    return ImpactReport(
        exact=exact,
        thm5=thm5,
        thm5_residual=thm5_res,
        thm7_bound=impact_thm7_bound(net, psi),
        thm6=thm6,
        thm6_residual=thm6_res,
        thm6_reason=thm6_reason,
        ranking=rank_clients(exact),
    )


def write_impact_csv(path: str, report: ImpactReport) -> None:
    """Impact table: node, exact, thm5, thm5_residual, thm6, thm7_bound, rank, tier."""
    n = report.exact.shape[0]
    by_node = {r.node: r for r in report.ranking}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node,exact,thm5,thm5_residual,thm6,thm7_bound,rank,tier\n")
        for k in range(n):
            thm6_cell = repr(float(report.thm6.values[k])) if report.thm6 is not None else ""
            thm7_cell = repr(float(report.thm7_bound)) if report.thm7_bound is not None else ""
            fh.write(
                ",".join(
                    [
                        str(k),
                        repr(float(report.exact[k])),
                        repr(float(report.thm5[k])),
                        repr(float(report.thm5_residual[k])),
                        thm6_cell,
                        thm7_cell,
                        str(by_node[k].rank),
                        by_node[k].tier,
                    ]
                )
                + "\n"
            )
