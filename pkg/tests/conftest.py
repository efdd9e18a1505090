"""Shared parameter sets and reference networks.

Three benchmark societies recur throughout: the bound-illustration
parameters (B* = 4), the three-clique example (B* = 9), and the two-group
rich/poor society (bounds 4 and 2).
"""

from __future__ import annotations

import pytest

from favornet.model import FavorMatrix, Network, PlayerType, Society, SocietyParams


def fig1_params(n: int = 6) -> SocietyParams:
    return SocietyParams(n_players=n, alpha=0.1, p=0.2, v=5.3, c=1.5,
                         gamma=1.0, delta=0.95)


def example1_params(n: int = 22) -> SocietyParams:
    return SocietyParams(n_players=n, alpha=0.15, p=0.25, v=7.0, c=1.0,
                         gamma=0.0, delta=0.99)


def fig2_params(n: int = 16, c: float = 1.3) -> SocietyParams:
    return SocietyParams(n_players=n, alpha=0.1, p=0.1, v=9.0, c=c,
                         gamma=0.0, delta=0.95)


def fig1_society(n: int = 6, can_transfer: bool = False) -> Society:
    return Society.homogeneous(fig1_params(n), can_transfer=can_transfer)


def example1_society(n: int = 22) -> Society:
    return Society.homogeneous(example1_params(n))


def fig2_society() -> Society:
    """8 transfer-capable rich players (c=1) and 8 poor players (c=1.3)."""
    params = fig2_params()
    rich = PlayerType(v=9.0, c=1.0, delta=0.95, can_transfer=True, group="rich")
    poor = PlayerType(v=9.0, c=1.3, delta=0.95, can_transfer=False, group="poor")
    matrix = FavorMatrix.substitutable(params.p, params.n_players)
    return Society(params, (rich,) * 8 + (poor,) * 8, matrix)


def clique_union(sizes: list[int]) -> Network:
    """Disjoint union of complete graphs, nodes numbered consecutively."""
    edges = []
    start = 0
    for size in sizes:
        block = list(range(start, start + size))
        edges += [(a, b) for i, a in enumerate(block) for b in block[i + 1:]]
        start += size
    return Network.from_edges(start, edges)


def three_clique_network() -> Network:
    """K10 + K8 + K4 on 22 nodes."""
    return clique_union([10, 8, 4])


def fig2_right_network() -> Network:
    """Rich players (0-7) 4-regular among themselves; poor players (8-15)
    in a 4-cycle, a triangle, and one isolated node."""
    rich = [(0, 1), (0, 2), (0, 6), (0, 7), (1, 2), (1, 3), (1, 7), (2, 3),
            (2, 4), (3, 4), (3, 5), (4, 5), (4, 6), (5, 6), (5, 7), (6, 7)]
    poor = [(8, 9), (9, 11), (10, 11), (8, 10), (12, 13), (12, 15), (13, 15)]
    return Network.from_edges(16, rich + poor)


def fig2_left_network() -> Network:
    """2-regular network on 16 nodes (every player at the bound for c=1.3)."""
    edges = [(0, 7), (3, 6), (6, 7), (1, 5), (8, 9), (9, 11), (12, 13),
             (12, 15), (4, 10), (2, 13), (4, 11), (1, 14), (3, 10), (5, 8),
             (2, 15), (0, 14)]
    return Network.from_edges(16, edges)


@pytest.fixture
def fig1():
    return fig1_society()


@pytest.fixture
def example1():
    return example1_society()


@pytest.fixture
def fig2():
    return fig2_society()
