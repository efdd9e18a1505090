"""Exact expected per-period payoffs for every favor-matrix kind.

The engine computes each player's expectation directly: the benefit side is
the probability that at least one linked neighbor can provide a needed
favor, the cost side sums the probability that this player is the uniformly
selected provider among the able neighbors of each partner. Heterogeneous
values and costs enter as the requester's v_i and the provider's c_i; the
homogeneous case collapses to the same formulas with equal types.

All functions are pure; inputs are immutable model values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .model import (
    COMMUNITY,
    GENERAL,
    LEGAL,
    MONOPOLISTIC,
    SUBSTITUTABLE,
    EnforcementConfig,
    Network,
    Society,
    TransferScheme,
)

# Exact enumeration over availability vectors is exponential in degree;
# beyond this cap callers are pointed at the Monte Carlo estimator.
GENERAL_ENUM_CAP = 15


class DegreeCapError(ValueError):
    """Exact general-matrix payoff refused; degree beyond the enumeration cap."""


@dataclass(frozen=True)
class PayoffBreakdown:
    """Per-period expected payoff split into its accounting pieces."""

    benefit: float = 0.0
    cost: float = 0.0
    transfer_in: float = 0.0
    transfer_out: float = 0.0
    maintenance: float = 0.0

    @property
    def total(self) -> float:
        return (self.benefit - self.cost + self.transfer_in
                - self.transfer_out - self.maintenance)


# --------------------------------------------------------------------------
# Substitutable favors (the Eq-(1) engine)


def provision_share(p: float, degree: int) -> float:
    """Probability a given neighbor of a degree-d player provides their favor.

    (1 - (1-p)^d) / d: the requester needs someone able, and the provider is
    picked uniformly among able neighbors, which averages out to this share.
    """
    if degree < 1:
        return 0.0
    return (1.0 - (1.0 - p) ** degree) / degree


def transfer_weight(alpha: float, p: float, degree: int) -> float:
    """Expected per-period frequency a player receives a favor from one
    specific neighbor: alpha * (1 - (1-p)^d) / d."""
    return alpha * provision_share(p, degree)


def payoff_substitutable(i: int, net: Network, society: Society) -> PayoffBreakdown:
    """Expected per-period payoff of player i when all favors are provided."""
    if society.matrix.kind != SUBSTITUTABLE:
        raise ValueError(f"substitutable matrix required, got {society.matrix.kind}")
    alpha, p = society.alpha, society.matrix.p
    t_i = society.type_of(i)
    d_i = net.degree(i)
    benefit = alpha * t_i.v * (1.0 - (1.0 - p) ** d_i)
    cost = alpha * t_i.c * math.fsum(provision_share(p, net.degree(j))
                                     for j in net.neighbors(i))
    return PayoffBreakdown(benefit=benefit, cost=cost)


def payoff_monopolistic(i: int, net: Network, society: Society) -> PayoffBreakdown:
    """Monopolistic favors: each link is worth p_hat = alpha*p/N per side,
    independent of the rest of the network."""
    if society.matrix.kind != MONOPOLISTIC:
        raise ValueError(f"monopolistic matrix required, got {society.matrix.kind}")
    p_hat = society.alpha * society.matrix.p / society.n
    t_i = society.type_of(i)
    d_i = net.degree(i)
    return PayoffBreakdown(benefit=d_i * p_hat * t_i.v, cost=d_i * p_hat * t_i.c)


# --------------------------------------------------------------------------
# General favor matrices (exact enumeration)


def _able_share(p_self: float, others: tuple[float, ...]) -> float:
    """E[ 1{self able} / (1 + #able among others) ] by subset enumeration."""
    if p_self == 0.0:
        return 0.0
    total = 0.0
    m = len(others)
    terms = []
    for size in range(m + 1):
        for subset in combinations(range(m), size):
            w = 1.0
            inside = set(subset)
            for k in range(m):
                w *= others[k] if k in inside else (1.0 - others[k])
            terms.append(w / (1 + size))
    total = math.fsum(terms)
    return p_self * total


def payoff_general(i: int, net: Network, society: Society,
                   cap: int = GENERAL_ENUM_CAP) -> PayoffBreakdown:
    """Exact expectation for a general provision matrix.

    Per favor type f, player i needs f with probability alpha/|F|; each
    neighbor is able with its own p_{jf} and the provider is uniform among
    the able. Enumeration is exponential in degree, hence the cap.
    """
    matrix = society.matrix
    if matrix.kind != GENERAL:
        raise ValueError(f"general matrix required, got {matrix.kind}")
    relevant = max((net.degree(j) for j in (i, *net.neighbors(i))), default=0)
    if relevant > cap:
        raise DegreeCapError(
            f"degree {relevant} exceeds the exact-enumeration cap {cap}; "
            "use the Monte Carlo estimator (simulate.estimate_payoff_general)")
    alpha = society.alpha
    n_f = matrix.n_favor_types
    t_i = society.type_of(i)
    nbrs = net.neighbors(i)

    benefit_terms = []
    for f in range(n_f):
        none_able = 1.0
        for j in nbrs:
            none_able *= 1.0 - matrix.provision_probability(j, f)
        benefit_terms.append(1.0 - none_able)
    benefit = alpha / n_f * t_i.v * math.fsum(benefit_terms)

    cost_terms = []
    for j in nbrs:
        others = tuple(k for k in net.neighbors(j) if k != i)
        for f in range(n_f):
            p_self = matrix.provision_probability(i, f)
            p_others = tuple(matrix.provision_probability(k, f) for k in others)
            cost_terms.append(_able_share(p_self, p_others))
    cost = alpha / n_f * t_i.c * math.fsum(cost_terms)
    return PayoffBreakdown(benefit=benefit, cost=cost)


# --------------------------------------------------------------------------
# Dispatch, transfers, enforcement


def payoff(i: int, net: Network, society: Society) -> PayoffBreakdown:
    kind = society.matrix.kind
    if kind == SUBSTITUTABLE:
        return payoff_substitutable(i, net, society)
    if kind == MONOPOLISTIC:
        return payoff_monopolistic(i, net, society)
    return payoff_general(i, net, society)


def payoff_with_transfers(i: int, j: int, net: Network, scheme: TransferScheme,
                          society: Society) -> PayoffBreakdown:
    """Payoff of i when the relationship ij carries per-favor transfers.

    i pays t_i each time j provides to i, so the expected outflow is
    w(i,g)*t_i with w the per-neighbor provision frequency; the inflow is
    w(j,g)*t_j symmetrically.
    """
    if not net.has_edge(i, j):
        raise ValueError(f"transfers attach to an existing link; {i}-{j} not in network")
    base = payoff_substitutable(i, net, society)
    alpha, p = society.alpha, society.matrix.p
    out = transfer_weight(alpha, p, net.degree(i)) * scheme.t_i
    inc = transfer_weight(alpha, p, net.degree(j)) * scheme.t_j
    return PayoffBreakdown(benefit=base.benefit, cost=base.cost,
                           transfer_in=inc, transfer_out=out)


def maintenance_cost(i: int, config: EnforcementConfig, society: Society,
                     population_mode: bool = False) -> float:
    """Per-period enforcement cost borne by player i."""
    if config.mode == COMMUNITY:
        return (len(config.community_of(i)) - 1) * config.kappa
    if config.mode == LEGAL:
        c = legal_cost(config.cost_k0, config.cost_a, society.gamma, society.params.c)
        return c / society.n if population_mode else c
    return 0.0


def legal_cost(k0: float, a: float, gamma: float, c: float) -> float:
    """Maintenance cost k0 + a*gamma/(c - gamma) of a legal system with
    expected punishment gamma; diverges as gamma approaches c."""
    if not (0 <= gamma < c):
        raise ValueError(f"legal cost defined on [0, c): gamma={gamma}, c={c}")
    return k0 + a * gamma / (c - gamma)


def payoff_with_enforcement(i: int, net: Network, config: EnforcementConfig,
                            society: Society,
                            population_mode: bool = False) -> PayoffBreakdown:
    """Favor payoff minus the enforcement-maintenance cost of the mechanism."""
    base = payoff(i, net, society)
    return PayoffBreakdown(benefit=base.benefit, cost=base.cost,
                           transfer_in=base.transfer_in,
                           transfer_out=base.transfer_out,
                           maintenance=maintenance_cost(i, config, society,
                                                        population_mode))
