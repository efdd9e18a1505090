"""Comparison of enforcement mechanisms: bilateral, community, legal.

Pure bilateral enforcement earns the payoff of the best degree-regular
network sustainable with zero punishment. A community of size s is a
clique whose members each pay kappa per co-member to keep the monitoring
channels alive; its payoff is concave in s, giving a finite optimal size.
Legal enforcement buys a refusal penalty gamma at maintenance cost
C(gamma) = k0 + a*gamma/(c-gamma); the benefit is a step function of gamma
that jumps exactly where one more mutual relationship becomes sustainable,
so the optimum sits on the candidate set of those step points.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .model import Network, Society
from .payoff import legal_cost
from .stability import bound_from_params, cooperation_bound, sustainability_margin

_BISECT_TOL = 1e-9
_SCAN_GUARD = 1_000_000


@dataclass(frozen=True)
class LegalCost:
    """Coefficients of the legal maintenance-cost family k0 + a*g/(c-g)."""

    k0: float
    a: float

    def at(self, gamma: float, c: float) -> float:
        return legal_cost(self.k0, self.a, gamma, c)


# --------------------------------------------------------------------------
# Building blocks


def pure_bilateral_payoff(society: Society) -> float:
    """Per-period payoff at a B*-regular network with gamma forced to 0:
    alpha*(v-c)*(1-(1-p)^B*(0))."""
    p0 = society.params
    b0 = bound_from_params(p0.alpha, p0.p, p0.v, p0.c, 0.0, p0.delta)
    return p0.alpha * (p0.v - p0.c) * (1.0 - (1.0 - p0.p) ** b0)


def community_payoff(size: int, kappa: float, society: Society) -> float:
    """Per-member payoff of a size-s clique community: each member is
    linked to the s-1 others and pays kappa per co-member."""
    if size < 1:
        raise ValueError(f"community size must be >= 1, got {size}")
    p0 = society.params
    members = size - 1
    return (p0.alpha * (p0.v - p0.c) * (1.0 - (1.0 - p0.p) ** members)
            - members * kappa)


def optimal_community_size(kappa: float, society: Society) -> tuple[int, float]:
    """Community size maximizing the per-member payoff, ties toward smaller.

    The payoff is strictly concave in the member count, so the discrete
    argmax is the floor or ceiling of the interior optimum of
    alpha*(v-c)*(1-(1-p)^m) - m*kappa.
    """
    if kappa <= 0:
        raise ValueError("optimal community size is unbounded at kappa <= 0; "
                         "pass a positive maintenance cost")
    p0 = society.params
    q = 1.0 - p0.p
    scale = p0.alpha * (p0.v - p0.c) * (-math.log(q))
    ratio = kappa / scale
    if ratio >= 1.0:
        candidates = [0]
    else:
        m_star = math.log(ratio) / math.log(q)
        candidates = sorted({max(0, math.floor(m_star)), math.ceil(m_star)})
    best_size, best_u = None, -math.inf
    for m in candidates:
        u = community_payoff(m + 1, kappa, society)
        if u > best_u:
            best_size, best_u = m + 1, u
    return best_size, best_u


# --------------------------------------------------------------------------
# Legal enforcement


def gamma_candidate(n: int, society: Society) -> float:
    """Smallest punishment level at which n mutual degree-n relationships
    are sustainable: gamma_n = c - T(n) with T the zero-gamma cutoff."""
    p0 = society.params
    q = 1.0 - p0.p
    t_n = (p0.delta * p0.alpha * p0.v * q ** (n - 1) * p0.p
           / (1.0 - p0.delta + (p0.alpha / n) * p0.delta * (1.0 - q ** n)))
    return p0.c - t_n


@dataclass(frozen=True)
class LegalOptimum:
    gamma_star: float
    utility: float
    n_star: int  # relationships per player sustained at gamma_star


def optimal_legal_gamma(society: Society, cost: LegalCost,
                        population: int | None = None) -> LegalOptimum:
    """Maximize alpha*(v-c)*(1-(1-p)^B*(gamma)) - C(gamma) over gamma.

    The benefit only moves at the candidate points gamma_n where the bound
    steps up, and the cost strictly increases in between, so scanning
    {0} union {gamma_n} is exact. With a population size given, the cost is
    shared (C/N) and the sustained degree is capped at N-1.
    """
    if not society.is_homogeneous:
        raise ValueError("legal-enforcement optimum requires a homogeneous society")
    p0 = society.params
    q = 1.0 - p0.p
    cost_div = population if population is not None else 1
    cap = population - 1 if population is not None else None

    def utility(n_links: int, gamma: float) -> float:
        reach = n_links if cap is None else min(n_links, cap)
        return (p0.alpha * (p0.v - p0.c) * (1.0 - q ** reach)
                - cost.at(gamma, p0.c) / cost_div)

    b0 = bound_from_params(p0.alpha, p0.p, p0.v, p0.c, 0.0, p0.delta)
    best = LegalOptimum(0.0, utility(b0, 0.0), b0)
    ceiling = p0.alpha * (p0.v - p0.c)
    n = b0 + 1
    while n < _SCAN_GUARD:
        g_n = gamma_candidate(n, society)
        if g_n >= p0.c:  # cost family diverges before this point
            break
        u = utility(n, g_n)
        if u > best.utility:
            best = LegalOptimum(g_n, u, n)
        # no later candidate can beat the ceiling minus this (rising) cost
        if ceiling - cost.at(g_n, p0.c) / cost_div < best.utility:
            break
        if cap is not None and n >= cap:
            break
        n += 1
    return best


# --------------------------------------------------------------------------
# Thresholds


def _bisect_decreasing(f, lo: float, hi: float, tol: float = _BISECT_TOL) -> float:
    """Root of a decreasing function with f(lo) >= 0 >= f(hi)."""
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def kappa_thresholds(society: Society, cost: LegalCost) -> tuple[float, float]:
    """(kappa_P, kappa_L): community beats pure bilateral iff kappa <=
    kappa_P, and beats optimal legal enforcement iff kappa <= kappa_L.

    The optimal-size community payoff is continuous and decreasing in
    kappa, so each threshold comes from a bisection. A benchmark that the
    community weakly beats at every kappa yields an infinite threshold.
    """
    p0 = society.params
    u_p = pure_bilateral_payoff(society)
    u_l = optimal_legal_gamma(society, cost).utility
    kappa_hi = p0.alpha * (p0.v - p0.c) * p0.p  # first member no longer pays

    def threshold(benchmark: float) -> float:
        if benchmark <= 0.0:
            return math.inf  # community payoff never drops below zero
        limit_low = p0.alpha * (p0.v - p0.c)  # community payoff as kappa -> 0
        if limit_low <= benchmark:
            return 0.0

        def gap(kappa: float) -> float:
            _, u_c = optimal_community_size(kappa, society)
            return u_c - benchmark

        hi = kappa_hi
        while gap(hi) > 0.0:
            hi *= 2.0
        return _bisect_decreasing(gap, 0.0, hi)

    return threshold(u_p), threshold(u_l)


# --------------------------------------------------------------------------
# Population analysis


@dataclass(frozen=True)
class PopulationRow:
    n_players: int
    gamma_star: float
    u_legal: float
    u_bilateral: float
    u_community: float | None


@dataclass(frozen=True)
class PopulationReport:
    rows: tuple[PopulationRow, ...]
    n_bar: int | None
    n_bar_kappa: int | None


def population_analysis(society: Society, cost: LegalCost,
                        n_grid: tuple[int, ...],
                        kappa: float | None = None) -> PopulationReport:
    """Legal enforcement with shared cost C(gamma)/N across the grid.

    Degrees are capped at N-1 on both sides of the comparison: a network of
    N players supports at most N-1 relationships each. Reports the
    smallest grid N where legal strictly beats pure bilateral (n_bar) and,
    when kappa is given, where it strictly beats the optimal community
    (n_bar_kappa).
    """
    if list(n_grid) != sorted(n_grid) or len(n_grid) != len(set(n_grid)):
        raise ValueError("population grid must be strictly increasing")
    p0 = society.params
    q = 1.0 - p0.p
    b0 = bound_from_params(p0.alpha, p0.p, p0.v, p0.c, 0.0, p0.delta)
    rows = []
    n_bar = n_bar_kappa = None
    for n_players in n_grid:
        opt = optimal_legal_gamma(society, cost, population=n_players)
        u_b = p0.alpha * (p0.v - p0.c) * (1.0 - q ** min(b0, n_players - 1))
        u_c = None
        if kappa is not None:
            size, _ = optimal_community_size(kappa, society)
            size = min(size, n_players)
            u_c = community_payoff(size, kappa, society)
        rows.append(PopulationRow(n_players, opt.gamma_star, opt.utility, u_b, u_c))
        if n_bar is None and opt.utility > u_b:
            n_bar = n_players
        if kappa is not None and n_bar_kappa is None and opt.utility > u_c:
            n_bar_kappa = n_players
    return PopulationReport(tuple(rows), n_bar, n_bar_kappa)


# --------------------------------------------------------------------------
# Head-to-head comparison


@dataclass(frozen=True)
class MechanismComparison:
    u_bilateral: float
    u_community: float
    community_size: int
    u_legal: float
    gamma_star: float
    winner: str
    kappa_p: float
    kappa_l: float


def compare_mechanisms(society: Society, kappa: float,
                       cost: LegalCost) -> MechanismComparison:
    """Evaluate all three mechanisms at the given kappa and cost family.

    Ties go to the simpler mechanism: bilateral, then community, then
    legal.
    """
    u_p = pure_bilateral_payoff(society)
    size, u_c = optimal_community_size(kappa, society)
    opt = optimal_legal_gamma(society, cost)
    kappa_p, kappa_l = kappa_thresholds(society, cost)
    ranked = [("bilateral", u_p), ("community", u_c), ("legal", opt.utility)]
    winner = max(ranked, key=lambda kv: kv[1])
    for name, u in ranked:  # first max in simplicity order wins ties
        if u == winner[1]:
            winner = (name, u)
            break
    return MechanismComparison(u_p, u_c, size, opt.utility, opt.gamma_star,
                               winner[0], kappa_p, kappa_l)


# --------------------------------------------------------------------------
# Community-stability check (necessary conditions)


@dataclass(frozen=True)
class CommunityStabilityReport:
    """Necessary-conditions verdict, not a full equilibrium verification."""

    ok: bool
    findings: tuple[str, ...]
    bound: int


def is_community_stable(net: Network, partition: tuple[tuple[int, ...], ...],
                        society: Society) -> CommunityStabilityReport:
    """Check the two community-stability necessary conditions plus the
    bilateral sustainability of every cross-community link.

    Members of small communities (size <= B*) cannot exceed B* links; a
    player above B* links may only be linked inside their own (large)
    community; links across community lines are bilaterally enforced, so
    both endpoints need degree <= B* and both margins nonnegative. All
    singleton communities reduce this to plain stability.
    """
    if not society.is_homogeneous:
        raise ValueError("community-stability check requires a homogeneous society")
    bound = cooperation_bound(society)
    community_of = {}
    for block in partition:
        for idx in block:
            community_of[idx] = block
    findings = []
    for i in range(net.n):
        block = community_of.get(i)
        if block is None:
            findings.append(f"player {i} not covered by the partition")
            continue
        d_i = net.degree(i)
        if len(block) <= bound and d_i > bound:
            findings.append(f"player {i}: degree {d_i} > B*={bound} inside a "
                            f"small community of size {len(block)}")
        if d_i > bound:
            outside = [j for j in net.neighbors(i) if j not in block]
            if outside:
                findings.append(f"player {i}: degree {d_i} > B*={bound} but "
                                f"linked outside the community to {outside}")
    for a, b in net.sorted_edges():
        if community_of.get(a) is community_of.get(b):
            continue
        if max(net.degree(a), net.degree(b)) > bound:
            findings.append(f"cross-community link {a}-{b} with an endpoint "
                            f"above B*={bound}")
            continue
        if (sustainability_margin(a, b, net, society) < 0
                or sustainability_margin(b, a, net, society) < 0):
            findings.append(f"cross-community link {a}-{b} is not bilaterally "
                            "sustainable")
    return CommunityStabilityReport(not findings, tuple(findings), bound)


# --------------------------------------------------------------------------
# CSV emitters


def write_kappa_table(path: str | Path, society: Society, cost: LegalCost,
                      kappas: tuple[float, ...]) -> None:
    u_p = pure_bilateral_payoff(society)
    u_l = optimal_legal_gamma(society, cost).utility
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kappa", "community_size", "u_community",
                         "u_bilateral", "u_legal"])
        for kappa in kappas:
            size, u_c = optimal_community_size(kappa, society)
            writer.writerow([kappa, size, u_c, u_p, u_l])


def write_population_table(path: str | Path, report: PopulationReport) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_players", "gamma_star", "u_legal", "u_bilateral",
                         "u_community"])
        for row in report.rows:
            writer.writerow([row.n_players, row.gamma_star, row.u_legal,
                             row.u_bilateral,
                             "" if row.u_community is None else row.u_community])
