"""Payoff engine against closed forms and the outcome-space oracle."""

from __future__ import annotations

import math
import random
from dataclasses import replace

import pytest

from favornet.model import (
    EnforcementConfig,
    FavorMatrix,
    Network,
    Society,
    SocietyParams,
    TransferScheme,
)
from favornet.payoff import (
    DegreeCapError,
    PayoffBreakdown,
    legal_cost,
    payoff,
    payoff_general,
    payoff_monopolistic,
    payoff_substitutable,
    payoff_with_enforcement,
    payoff_with_transfers,
    transfer_weight,
)

from conftest import clique_union, fig1_params, fig1_society, fig2_society
from outcome_oracle import expected_payoffs


def random_graph(rng: random.Random, n: int, p_edge: float = 0.5) -> Network:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.random() < p_edge]
    return Network.from_edges(n, edges)


# --------------------------------------------------------------------------
# Substitutable


def test_isolated_player_earns_nothing(fig1):
    b = payoff_substitutable(0, Network.empty(6), fig1)
    assert b.total == 0.0 and b.benefit == 0.0 and b.cost == 0.0


def test_single_link_closed_form(fig1):
    net = Network.from_edges(6, [(0, 1)])
    got = payoff_substitutable(0, net, fig1).total
    p0 = fig1.params
    assert got == pytest.approx(p0.alpha * p0.p * (p0.v - p0.c), rel=1e-14)


def test_regular_network_value_and_oracle(fig1):
    # every player of a 4-regular graph nets alpha*(v-c)*(1-(1-p)^4)
    net = Network.from_edges(6, [(i, (i + k) % 6) for i in range(6) for k in (1, 2)])
    assert net.degrees() == (4,) * 6
    p0 = fig1.params
    closed = p0.alpha * (p0.v - p0.c) * (1.0 - (1.0 - p0.p) ** 4)
    oracle = expected_payoffs(net, fig1)
    for i in range(6):
        got = payoff_substitutable(i, net, fig1).total
        assert got == pytest.approx(closed, rel=1e-13)
        assert got == pytest.approx(oracle[i], rel=1e-12)


def test_heterogeneous_costs_split_by_provider(fig2):
    # provider pays their own c, requester collects their own v
    net = Network.from_edges(16, [(0, 8)])  # rich 0 linked to poor 8
    rich = payoff_substitutable(0, net, fig2)
    poor = payoff_substitutable(8, net, fig2)
    alpha, p = 0.1, 0.1
    assert rich.cost == pytest.approx(alpha * 1.0 * p, rel=1e-14)
    assert poor.cost == pytest.approx(alpha * 1.3 * p, rel=1e-14)
    assert rich.benefit == poor.benefit == pytest.approx(alpha * 9.0 * p, rel=1e-14)
    oracle = expected_payoffs(net, fig2)
    assert rich.total == pytest.approx(oracle[0], rel=1e-12)
    assert poor.total == pytest.approx(oracle[8], rel=1e-12)


# --------------------------------------------------------------------------
# Monopolistic


def _mono_society(n: int = 4, alpha: float = 0.3, p: float = 0.5,
                  v: float = 4.0, c: float = 1.0, gamma: float = 0.0,
                  delta: float = 0.9) -> Society:
    params = SocietyParams(n, alpha, p, v, c, gamma, delta)
    return Society.homogeneous(params, FavorMatrix.monopolistic(p, n))


def test_monopolistic_isolated_zero():
    assert payoff_monopolistic(0, Network.empty(4), _mono_society()).total == 0.0


def test_monopolistic_complete_linear_in_links():
    soc = _mono_society()
    net = Network.complete(4)
    p_hat = soc.alpha * soc.matrix.p / 4
    for i in range(4):
        got = payoff_monopolistic(i, net, soc)
        assert got.total == pytest.approx(3 * p_hat * (4.0 - 1.0), rel=1e-14)
    oracle = expected_payoffs(net, soc)
    assert got.total == pytest.approx(oracle[3], rel=1e-12)


def test_monopolistic_star_center_three_times_leaf():
    soc = _mono_society()
    star = Network.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    center = payoff_monopolistic(0, star, soc).total
    leaf = payoff_monopolistic(1, star, soc).total
    assert center == pytest.approx(3 * leaf, rel=1e-13)
    oracle = expected_payoffs(star, soc)
    assert center == pytest.approx(oracle[0], rel=1e-12)
    assert leaf == pytest.approx(oracle[1], rel=1e-12)


# --------------------------------------------------------------------------
# General matrices


def test_general_matches_substitutable_distribution(fig1):
    rows = [[0.2, 0.2]] * 6
    soc = Society(fig1.params, fig1.types, FavorMatrix.general(rows))
    rng = random.Random(5)
    for _ in range(5):
        net = random_graph(rng, 6)
        for i in range(6):
            assert payoff_general(i, net, soc).total == pytest.approx(
                payoff_substitutable(i, net, fig1).total, rel=1e-12, abs=1e-15)


def test_general_matches_monopolistic_distribution():
    mono = _mono_society()
    rows = [[mono.matrix.p if i == f else 0.0 for f in range(4)] for i in range(4)]
    soc = Society(mono.params, mono.types, FavorMatrix.general(rows))
    rng = random.Random(6)
    for _ in range(5):
        net = random_graph(rng, 4)
        for i in range(4):
            assert payoff_general(i, net, soc).total == pytest.approx(
                payoff_monopolistic(i, net, mono).total, rel=1e-12, abs=1e-15)


def test_general_mixed_triangle_against_oracle():
    params = SocietyParams(3, alpha=0.3, p=0.3, v=4.0, c=1.0, gamma=0.0, delta=0.9)
    rows = [[0.0, 0.3], [0.3, 0.7], [0.7, 0.3]]
    soc = Society.homogeneous(params, FavorMatrix.general(rows))
    net = Network.complete(3)
    oracle = expected_payoffs(net, soc)
    for i in range(3):
        assert payoff_general(i, net, soc).total == pytest.approx(
            oracle[i], rel=1e-12, abs=1e-15)


def test_general_degree_cap_error():
    n = 20
    params = SocietyParams(n, 0.1, 0.2, 5.3, 1.5, 1.0, 0.95)
    soc = Society.homogeneous(params, FavorMatrix.general([[0.2]] * n))
    star = Network.from_edges(n, [(0, j) for j in range(1, n)])
    with pytest.raises(DegreeCapError, match="Monte Carlo"):
        payoff_general(0, star, soc)
    # the cap is configurable
    assert payoff_general(1, star, soc, cap=19).total != 0.0


# --------------------------------------------------------------------------
# Oracle equivalence across kinds (randomized)


def test_oracle_equivalence_all_kinds_small_graphs():
    rng = random.Random(987)
    for trial in range(8):
        n = rng.randint(2, 6)
        params = SocietyParams(n, alpha=rng.uniform(0.05, 0.5),
                               p=rng.uniform(0.1, 0.6), v=5.0, c=1.5,
                               gamma=0.5, delta=0.9)
        net = random_graph(rng, n)
        societies = [Society.homogeneous(params),
                     Society.homogeneous(params, FavorMatrix.monopolistic(params.p, n)),
                     Society.homogeneous(params, FavorMatrix.general(
                         [[rng.choice([0.0, 0.3, 0.7]) or 0.3 for _ in range(2)]
                          for _ in range(n)]))]
        for soc in societies:
            oracle = expected_payoffs(net, soc)
            for i in range(n):
                got = payoff(i, net, soc).total
                assert got == pytest.approx(oracle[i], rel=1e-12, abs=1e-14), (
                    trial, soc.matrix.kind, i)


# --------------------------------------------------------------------------
# Structural properties of the substitutable payoff


def test_diminishing_marginal_link_value():
    # adding a second same-degree partner is worth strictly less
    rng = random.Random(41)
    fig1 = fig1_society(8)
    for _ in range(20):
        net = random_graph(rng, 8, 0.4)
        candidates = [(i, j, k) for i in range(8) for j in range(8) for k in range(8)
                      if len({i, j, k}) == 3 and not net.has_edge(i, j)
                      and not net.has_edge(i, k)
                      and net.degree(j) == net.degree(k)]
        if not candidates:
            continue
        i, j, k = candidates[0]
        u0 = payoff_substitutable(i, net, fig1).total
        u1 = payoff_substitutable(i, net.add_edge(i, j), fig1).total
        u2 = payoff_substitutable(i, net.add_edge(i, j).add_edge(i, k), fig1).total
        assert u1 - u0 > u2 - u1


def test_players_prefer_connected_neighbors():
    # a new link between a neighbor and a third player raises own payoff
    rng = random.Random(42)
    fig1 = fig1_society(8)
    for _ in range(20):
        net = random_graph(rng, 8, 0.4)
        found = [(i, j, k) for i in range(8) for j in net.neighbors(i)
                 for k in range(8)
                 if k not in (i, j) and not net.has_edge(j, k)]
        if not found:
            continue
        i, j, k = found[0]
        assert (payoff_substitutable(i, net.add_edge(j, k), fig1).total
                > payoff_substitutable(i, net, fig1).total)


def test_monopolistic_additive_substitutable_submodular():
    soc_m = _mono_society(n=6)
    fig1 = fig1_society(6)
    rng = random.Random(43)
    for _ in range(10):
        net = random_graph(rng, 6, 0.4)
        pairs = [(i, j) for i in range(6) for j in range(i + 1, 6)
                 if not net.has_edge(i, j)]
        if not pairs:
            continue
        i, j = pairs[0]
        gain = (payoff_monopolistic(i, net.add_edge(i, j), soc_m).total
                - payoff_monopolistic(i, net, soc_m).total)
        p_hat = soc_m.alpha * soc_m.matrix.p / 6
        assert gain == pytest.approx(p_hat * (soc_m.types[i].v - soc_m.types[i].c),
                                     rel=1e-12)
        # substitutable marginal benefit shrinks with own degree
        b0 = payoff_substitutable(i, net, fig1).benefit
        b1 = payoff_substitutable(i, net.add_edge(i, j), fig1).benefit
        q = 1 - fig1.params.p
        assert b1 - b0 == pytest.approx(
            fig1.alpha * fig1.params.v * fig1.params.p * q ** net.degree(i),
            rel=1e-12)


# --------------------------------------------------------------------------
# Transfers


def test_zero_transfers_reduce_to_plain_payoff(fig1):
    net = Network.from_edges(6, [(0, 1), (1, 2)])
    plain = payoff_substitutable(0, net, fig1)
    with_t = payoff_with_transfers(0, 1, net, TransferScheme(0.0, 0.0), fig1)
    assert with_t.total == plain.total
    assert with_t.transfer_in == with_t.transfer_out == 0.0


def test_symmetric_transfers_cancel(fig1):
    net = Network.from_edges(6, [(0, 1), (0, 2), (1, 3)])  # d_0 = d_1 = 2
    plain = payoff_substitutable(0, net, fig1).total
    with_t = payoff_with_transfers(0, 1, net, TransferScheme(0.4, 0.4), fig1)
    assert with_t.total == pytest.approx(plain, rel=1e-14)
    assert with_t.transfer_in == pytest.approx(with_t.transfer_out, rel=1e-14)


def test_transfers_require_existing_link(fig1):
    net = Network.from_edges(6, [(0, 1)])
    with pytest.raises(ValueError, match="existing link"):
        payoff_with_transfers(0, 2, net, TransferScheme(0.1, 0.0), fig1)


def test_transfer_solves_indifference_equation(fig2):
    # pay t_i so the partner is exactly indifferent to the swap
    g = Network.from_edges(16, [(8, 9), (9, 10), (10, 11), (10, 12)])
    # deviation: rich 0 adds poor 9 who drops their degree-3 neighbor 10
    g_prime = g.add_edge(0, 9).remove_edge(9, 10)
    u_j_before = payoff_substitutable(9, g, fig2).total
    u_j_after = payoff_substitutable(9, g_prime, fig2).total
    w_i = transfer_weight(fig2.alpha, fig2.params.p, g_prime.degree(0))
    t_i = (u_j_before - u_j_after) / w_i
    assert t_i > 0  # dropped a better-connected partner for a worse one
    got = payoff_with_transfers(9, 0, g_prime, TransferScheme(t_i=0.0, t_j=t_i), fig2)
    assert got.total == pytest.approx(u_j_before, rel=1e-12)


# --------------------------------------------------------------------------
# Enforcement maintenance


def test_bilateral_mode_costs_nothing(fig1):
    net = Network.from_edges(6, [(0, 1)])
    b = payoff_with_enforcement(0, net, EnforcementConfig.bilateral(), fig1)
    assert b.maintenance == 0.0


def test_singleton_community_costs_nothing(fig1):
    cfg = EnforcementConfig.community([[0], [1], [2], [3], [4], [5]], kappa=0.7)
    b = payoff_with_enforcement(0, Network.empty(6), cfg, fig1)
    assert b.maintenance == 0.0


def test_clique_community_payoff_formula():
    n_members = 4  # community of size 5
    params = fig1_params(5)
    soc = Society.homogeneous(params)
    net = clique_union([5])
    cfg = EnforcementConfig.community([[0, 1, 2, 3, 4]], kappa=0.01)
    got = payoff_with_enforcement(0, net, cfg, soc)
    expected = (params.alpha * (params.v - params.c)
                * (1 - (1 - params.p) ** n_members) - n_members * 0.01)
    assert got.total == pytest.approx(expected, rel=1e-13)
    assert got.maintenance == pytest.approx(n_members * 0.01, rel=1e-14)


def test_legal_maintenance_and_population_mode(fig1):
    soc = Society(replace(fig1.params, gamma=0.5),
                  tuple(replace(t, c=t.c) for t in fig1.types), fig1.matrix)
    cfg = EnforcementConfig.legal(cost_k0=0.05, cost_a=0.05)
    full = payoff_with_enforcement(0, Network.empty(6), cfg, soc)
    shared = payoff_with_enforcement(0, Network.empty(6), cfg, soc,
                                     population_mode=True)
    expected = legal_cost(0.05, 0.05, 0.5, 1.5)
    assert full.maintenance == pytest.approx(expected, rel=1e-14)
    assert shared.maintenance == pytest.approx(expected / 6, rel=1e-14)


def test_breakdown_total_is_the_stated_combination():
    b = PayoffBreakdown(benefit=1.0, cost=0.25, transfer_in=0.5,
                        transfer_out=0.125, maintenance=0.0625)
    assert b.total == 1.0 - 0.25 + 0.5 - 0.125 - 0.0625
