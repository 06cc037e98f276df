import math

import numpy as np
import pytest

from willingness_gossip.errors import Thm6InapplicableError
from willingness_gossip.fixtures import (
    barbell,
    bridged_clusters,
    cycle,
    random_network,
    two_node_influencer,
    without_influence,
)
from willingness_gossip.impact import (
    build_impact_report,
    find_influential_edge,
    impact_exact,
    impact_thm5,
    impact_thm6,
    impact_thm7_bound,
    rank_clients,
    try_thm6,
    write_impact_csv,
)
from willingness_gossip.meanfield import build_mean_matrices, build_passage_data, stationary_distribution
from willingness_gossip.network import AcquaintanceNetwork, edge_partition
from willingness_gossip.spectral import conductance


def exact_pipeline(net):
    mm = build_mean_matrices(net)
    pi = stationary_distribution(mm).pi_bar
    return mm, pi, impact_exact(pi)


class TestExact:
    def test_no_influence_all_zero(self, rng):
        net = without_influence(random_network(rng, 7))
        _, _, exact = exact_pipeline(net)
        assert np.max(np.abs(exact)) <= 1e-12

    def test_influencer_pair(self):
        _, _, exact = exact_pipeline(two_node_influencer())
        np.testing.assert_allclose(exact, [-1.0 / 6.0, 1.0 / 6.0], atol=1e-14)

    def test_sums_to_zero(self, rng):
        for _ in range(10):
            net = random_network(rng, int(rng.integers(3, 13)))
            _, _, exact = exact_pipeline(net)
            assert abs(exact.sum()) <= 1e-12


class TestPassageTimeIdentity:
    def test_influencer_pair_hand_values(self):
        net = two_node_influencer()
        mm, pi, exact = exact_pipeline(net)
        values, residual = impact_thm5(net, pi, build_passage_data(mm.K))
        # single influential term, delta=1/2 kills the first coefficient:
        # value_1 = (1/8) * pi_1 * (m_01 - m_11) = (1/8)(2/3)(2) = 1/6
        assert values[1] == pytest.approx(1.0 / 6.0, abs=1e-12)
        assert values[0] == pytest.approx(-1.0 / 6.0, abs=1e-12)
        assert residual.max() <= 1e-12

    def test_exact_identity_on_random_networks(self, rng):
        worst = 0.0
        for _ in range(30):
            net = random_network(rng, 10)
            mm, pi, exact = exact_pipeline(net)
            _, residual = impact_thm5(net, pi, build_passage_data(mm.K))
            worst = max(worst, float(residual.max()))
        assert worst <= 1e-8


class TestBridgeClosedForm:
    def test_influencer_pair_values(self):
        net = two_node_influencer()
        _, _, exact = exact_pipeline(net)
        part = edge_partition(net, 0, 1)
        result = impact_thm6(net, part)
        assert result.mu == pytest.approx(0.5)
        np.testing.assert_allclose(result.values, exact, atol=1e-12)

    def test_within_cluster_equality(self, rng):
        for size_i, size_j in ((2, 2), (3, 3), (1, 4), (4, 2)):
            net = bridged_clusters(size_i, size_j, influence=0.5)
            _, _, exact = exact_pipeline(net)
            left, right = exact[:size_i], exact[size_i:]
            assert np.max(np.abs(left - left[0])) <= 1e-9
            assert np.max(np.abs(right - right[0])) <= 1e-9
            # influencer side is pulled up, the other side down
            assert right[0] > 0 > left[0]

    def test_balanced_sides_match_exact(self):
        net = barbell(3, influence=0.6, delta=0.35)
        _, _, exact = exact_pipeline(net)
        result, residual, reason = try_thm6(net, exact)
        assert reason is None
        assert residual <= 1e-9

    def test_unbalanced_residual_is_reported(self):
        net = bridged_clusters(2, 5, influence=0.5)
        _, _, exact = exact_pipeline(net)
        result, residual, reason = try_thm6(net, exact)
        assert reason is None
        assert result is not None and residual is not None  # surfaced, not hidden

    def test_non_bridge_refused(self):
        net = cycle(4)
        x = net.x.copy()
        y = net.y.copy()
        x[0, 1] = 0.5
        y[0, 1] = 0.5
        net = AcquaintanceNetwork(n=4, delta=0.5, p=net.p, x=x, y=y, z=net.z, w0=net.w0)
        _, _, exact = exact_pipeline(net)
        result, residual, reason = try_thm6(net, exact)
        assert result is None
        assert "not a bridge" in reason

    def test_multiple_influential_edges_refused(self, rng):
        net = random_network(rng, 6)
        assert net.influence_mass > 0
        with pytest.raises(Thm6InapplicableError, match="multiple|no influential"):
            find_influential_edge(net)

    def test_no_influential_edge_refused(self, rng):
        net = without_influence(random_network(rng, 5))
        with pytest.raises(Thm6InapplicableError, match="no influential"):
            find_influential_edge(net)

    def test_wrong_partition_refused(self):
        net = barbell(2, influence=0.5)
        part = edge_partition(net, 1, 2)
        flipped = edge_partition(net, 2, 1)
        impact_thm6(net, part)  # correct orientation works
        with pytest.raises(Thm6InapplicableError, match="not the influential edge"):
            impact_thm6(net, flipped)


class TestConductanceBound:
    def test_influencer_pair_value(self):
        net = two_node_influencer()
        bound = impact_thm7_bound(net, 1.0)
        assert bound == pytest.approx(1.0 + math.log(2.0))
        assert bound >= 1.0 / 6.0

    def test_no_influence_zero(self, rng):
        net = without_influence(random_network(rng, 5))
        assert impact_thm7_bound(net, 0.8) == 0.0

    def test_absent_without_conductance(self, rng):
        net = random_network(rng, 5)
        assert impact_thm7_bound(net, None) is None

    def test_dominates_exact_impacts(self, rng):
        for _ in range(25):
            net = random_network(rng, int(rng.integers(3, 13)))
            mm, pi, exact = exact_pipeline(net)
            bound = impact_thm7_bound(net, conductance(mm.K))
            assert np.max(np.abs(exact)) <= bound + 1e-12


class TestRanking:
    def test_influencer_pair_order(self):
        ranking = rank_clients(np.array([-1.0 / 6.0, 1.0 / 6.0]))
        assert [r.node for r in ranking] == [1, 0]
        assert ranking[0].tier == "incentivize"
        assert ranking[0].score == 1.0
        assert ranking[1].tier == "standard"

    def test_all_zero_ties(self):
        ranking = rank_clients(np.zeros(5))
        assert [r.node for r in ranking] == [0, 1, 2, 3, 4]
        assert all(r.tier == "review" for r in ranking)
        assert all(r.score == 0.0 for r in ranking)

    def test_relabeling_gives_isomorphic_ranking(self, rng):
        impacts = rng.normal(size=9)
        perm = rng.permutation(9)
        base = rank_clients(impacts)
        permuted = rank_clients(impacts[perm])
        # rank sequence of impact values is identical
        assert [round(r.impact, 12) for r in base] == [round(r.impact, 12) for r in permuted]

    def test_quartile_tiers(self):
        impacts = np.array([0.4, 0.3, 0.2, 0.1, -0.1, -0.2, -0.3, -0.4])
        ranking = {r.node: r.tier for r in rank_clients(impacts)}
        assert ranking[0] == ranking[1] == "incentivize"
        assert ranking[6] == ranking[7] == "standard"
        assert ranking[2] == ranking[5] == "review"

    def test_solver_noise_ties_break_by_node_id(self):
        # impacts equal up to the last bits must rank by node id, not noise
        base = 0.03494580165021835
        noisy = np.array([-3 * base, base + 8e-17, base, base, base + 8e-17])
        order = [r.node for r in rank_clients(noisy)]
        assert order == [1, 2, 3, 4, 0]

    def test_within_cluster_ties_rank_by_node_id(self):
        net = bridged_clusters(3, 4, influence=0.6, delta=0.4)
        _, _, exact = exact_pipeline(net)
        order = [r.node for r in rank_clients(exact)]
        assert order == [3, 4, 5, 6, 0, 1, 2]

    def test_scaling_w0_does_not_change_ranking(self, rng):
        # impacts depend only on the network, not on w0
        net = random_network(rng, 8)
        mm = build_mean_matrices(net)
        pi = stationary_distribution(mm).pi_bar
        order1 = [r.node for r in rank_clients(impact_exact(pi))]
        scaled = AcquaintanceNetwork(
            n=net.n, delta=net.delta, p=net.p, x=net.x, y=net.y, z=net.z, w0=net.w0 * 0.25
        )
        pi2 = stationary_distribution(build_mean_matrices(scaled)).pi_bar
        order2 = [r.node for r in rank_clients(impact_exact(pi2))]
        assert order1 == order2


def test_report_and_csv(tmp_path):
    net = two_node_influencer()
    mm, pi, _ = exact_pipeline(net)
    report = build_impact_report(net, pi, build_passage_data(mm.K), conductance(mm.K))
    assert report.thm6 is not None
    assert report.thm6_residual <= 1e-12
    assert abs(report.exact.sum()) <= 1e-12
    assert np.max(np.abs(report.exact)) <= report.thm7_bound

    out = tmp_path / "impact.csv"
    write_impact_csv(str(out), report)
    lines = out.read_text().splitlines()
    assert lines[0] == "node,exact,thm5,thm5_residual,thm6,thm7_bound,rank,tier"
    assert len(lines) == 3
    row0 = lines[1].split(",")
    assert row0[0] == "0" and row0[-1] == "standard" and row0[-2] == "2"


def test_csv_blank_cells_when_inapplicable(tmp_path, rng):
    net = random_network(rng, 5)
    mm, pi, _ = exact_pipeline(net)
    report = build_impact_report(net, pi, build_passage_data(mm.K), None)
    assert report.thm7_bound is None and report.thm6 is None
    out = tmp_path / "impact.csv"
    write_impact_csv(str(out), report)
    row = out.read_text().splitlines()[1].split(",")
    assert row[4] == "" and row[5] == ""
