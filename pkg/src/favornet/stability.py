"""Sustainability margins, stability verdicts and cooperation bounds.

A link survives bilateral enforcement when the discounted future value of
the relationship covers the net immediate cost of providing a favor. The
cooperation bound B* is the largest degree at which a player whose
neighbors all share that degree still finds every link worth keeping; it
drives everything downstream (strong stability, stratification, the
enforcement comparison).

Weak inequalities throughout: a margin of exactly zero counts as
sustainable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .model import MONOPOLISTIC, SUBSTITUTABLE, Network, PlayerType, Society
from .payoff import payoff, provision_share

_BOUND_SCAN_LIMIT = 10_000_000


# --------------------------------------------------------------------------
# Per-link margins


def sustainability_margin(i: int, j: int, net: Network, society: Society) -> float:
    """Signed surplus of keeping link ij from i's side.

    delta_i/(1-delta_i) * (u_i(g) - u_i(g-ij)) - (c_i - gamma); the link is
    sustainable for i iff this is >= 0. Routed through the payoff engine on
    both networks, so it is exact for every matrix kind.
    """
    if not net.has_edge(i, j):
        raise ValueError(f"margin undefined: link {i}-{j} not in network")
    t = society.type_of(i)
    u_with = payoff(i, net, society).total
    u_without = payoff(i, net.remove_edge(i, j), society).total
    return t.delta / (1.0 - t.delta) * (u_with - u_without) - (t.c - society.gamma)


def degree_margin(d_i: int, d_j: int, society: Society,
                  t: PlayerType | None = None) -> float:
    """Substitutable-case margin as a function of the two endpoint degrees.

    Equals sustainability_margin on any network where i has degree d_i and
    the partner degree d_j; the rest of the graph cancels out.
    """
    if t is None:
        t = society.types[0]
    alpha, p = society.alpha, society.params.p
    q = 1.0 - p
    gain = alpha * t.v * p * q ** (d_i - 1) - alpha * t.c * provision_share(p, d_j)
    return t.delta / (1.0 - t.delta) * gain - (t.c - society.gamma)


@dataclass(frozen=True)
class SustainabilityReport:
    """Directed margins, per-link verdicts, and the overall stability flag."""

    margins: dict[tuple[int, int], float]
    link_sustainable: dict[tuple[int, int], bool]
    stable: bool
    witness: tuple[int, int] | None

    def margin(self, i: int, j: int) -> float:
        return self.margins[(i, j)]


def is_stable(net: Network, society: Society) -> SustainabilityReport:
    """A network is stable iff every link is sustainable from both sides.

    The empty network is trivially stable: no favors to ask, no links to
    remove. The witness is the lexicographically first unsustainable link.
    """
    margins: dict[tuple[int, int], float] = {}
    verdicts: dict[tuple[int, int], bool] = {}
    witness = None
    for a, b in net.sorted_edges():
        m_ab = sustainability_margin(a, b, net, society)
        m_ba = sustainability_margin(b, a, net, society)
        margins[(a, b)] = m_ab
        margins[(b, a)] = m_ba
        ok = m_ab >= 0.0 and m_ba >= 0.0
        verdicts[(a, b)] = ok
        if not ok and witness is None:
            witness = (a, b)
    return SustainabilityReport(margins, verdicts, witness is None, witness)


# --------------------------------------------------------------------------
# Cooperation bound and the cutoff curve


def bound_from_params(alpha: float, p: float, v: float, c: float,
                      gamma: float, delta: float) -> int:
    """Largest n >= 1 such that a player with n degree-n neighbors keeps
    every link:

        delta*alpha*v*(1-p)^(n-1)*p - delta*alpha*c*(1-(1-p)^n)/n
            >= (1-delta)*(c-gamma)

    Returns 0 when even one such link fails. The left side is strictly
    decreasing in n, so an ascending scan with early exit is exact.
    """
    q = 1.0 - p
    rhs = (1.0 - delta) * (c - gamma)
    n = 1
    while n < _BOUND_SCAN_LIMIT:
        lhs = delta * alpha * v * q ** (n - 1) * p - delta * alpha * c * provision_share(p, n)
        if lhs < rhs:
            return n - 1
        n += 1
    raise ArithmeticError("cooperation bound scan exceeded limit; check parameters")


def cooperation_bound(society: Society, player: int | None = None) -> int:
    """Cooperation bound B* for the given player's type (any player in a
    homogeneous society)."""
    if player is None:
        if not society.is_homogeneous:
            raise ValueError("heterogeneous society: pass the player whose bound you want")
        t = society.types[0]
    else:
        t = society.type_of(player)
    return bound_from_params(society.alpha, society.params.p, t.v, t.c,
                             society.gamma, t.delta)


def bound_for_type(society: Society, t: PlayerType) -> int:
    return bound_from_params(society.alpha, society.params.p, t.v, t.c,
                             society.gamma, t.delta)


def cutoff_cost(n: int, society: Society) -> float:
    """Highest provision cost at which n mutual degree-n relationships hold:

        c(n) = delta*alpha*v*(1-p)^(n-1)*p
               / (1 - delta + (alpha/n)*delta*(1-(1-p)^n)) + gamma

    Strictly decreasing in n, with c(n) -> gamma as n grows.
    """
    if n < 1:
        raise ValueError(f"cutoff defined for n >= 1, got {n}")
    params = society.params
    alpha, p, v, gamma, delta = (params.alpha, params.p, params.v,
                                 params.gamma, params.delta)
    q = 1.0 - p
    num = delta * alpha * v * q ** (n - 1) * p
    den = 1.0 - delta + (alpha / n) * delta * (1.0 - q ** n)
    return num / den + gamma


# --------------------------------------------------------------------------
# Comparative statics


@dataclass(frozen=True)
class AxisScan:
    parameter: str
    values: tuple[float, ...]
    bounds: tuple[int, ...]
    expected: str  # "nondecreasing" | "nonincreasing"
    monotone: bool
    counterexample: tuple[float, float] | None


@dataclass(frozen=True)
class ComparativeStaticsReport:
    axes: tuple[AxisScan, ...]

    @property
    def all_monotone(self) -> bool:
        return all(a.monotone for a in self.axes)


def comparative_statics_scan(society: Society,
                             deltas: tuple[float, ...] = (),
                             vs: tuple[float, ...] = (),
                             gammas: tuple[float, ...] = (),
                             cs: tuple[float, ...] = ()) -> ComparativeStaticsReport:
    """Scan B* along each axis; B* must rise with delta, v and gamma and
    fall with c. Grid points must stay inside the valid parameter ranges."""
    p0 = society.params
    axes = []
    grids = (("delta", deltas, "nondecreasing"), ("v", vs, "nondecreasing"),
             ("gamma", gammas, "nondecreasing"), ("c", cs, "nonincreasing"))
    for name, values, expected in grids:
        if not values:
            continue
        values = tuple(sorted(values))
        bounds = []
        for x in values:
            kw = dict(alpha=p0.alpha, p=p0.p, v=p0.v, c=p0.c,
                      gamma=p0.gamma, delta=p0.delta)
            kw[name] = x
            if not (0 < kw["delta"] < 1 and kw["v"] > kw["c"] > 0
                    and 0 <= kw["gamma"] < kw["c"]):
                raise ValueError(f"scan point {name}={x} leaves the valid range")
            bounds.append(bound_from_params(**kw))
        monotone, counterexample = True, None
        for (x0, b0), (x1, b1) in zip(zip(values, bounds), zip(values[1:], bounds[1:])):
            bad = b1 < b0 if expected == "nondecreasing" else b1 > b0
            if bad:
                monotone, counterexample = False, (x0, x1)
                break
        axes.append(AxisScan(name, values, tuple(bounds), expected,
                             monotone, counterexample))
    return ComparativeStaticsReport(tuple(axes))


# --------------------------------------------------------------------------
# Monopolistic dichotomy


class MonopolisticOutcome(Enum):
    COMPLETE_STABLE = "complete-stable"
    EMPTY_ONLY = "empty-only"


def monopolistic_verdict(society: Society) -> MonopolisticOutcome:
    """Either the complete network is stable (and efficient), or the empty
    network is the unique stable network: complete iff

        c - gamma <= delta/(1-delta) * p_hat * (v - c),  p_hat = alpha*p/N.
    """
    if society.matrix.kind != MONOPOLISTIC:
        raise ValueError(f"monopolistic matrix required, got {society.matrix.kind}")
    if not society.is_homogeneous:
        raise ValueError("monopolistic verdict requires a homogeneous society")
    t = society.types[0]
    p_hat = society.alpha * society.matrix.p / society.n
    future = t.delta / (1.0 - t.delta) * p_hat * (t.v - t.c)
    if t.c - society.gamma <= future:
        return MonopolisticOutcome.COMPLETE_STABLE
    return MonopolisticOutcome.EMPTY_ONLY


# --------------------------------------------------------------------------
# Heterogeneous cost threshold


def example_h(m: int, n: int, society: Society) -> float:
    """Marginal-link convenience formula between a degree-m and a degree-n
    player:

        h(m, n) = -c + alpha*delta/(1-delta) * ( v*((1-p)^m - (1-p)^(m+1))
                  - c/(n+1) * (1 - (1-p)^(n+1)) )

    Reproduced for reporting: its exponent convention sits one unit off the
    explicit-network margin (it evaluates the pivot term at m and the
    provision share at n+1), so all verdicts in this package route through
    sustainability_margin instead.
    """
    params = society.params
    alpha, p, v, c, delta = params.alpha, params.p, params.v, params.c, params.delta
    q = 1.0 - p
    return -c + alpha * delta / (1.0 - delta) * (
        v * (q ** m - q ** (m + 1)) - c / (n + 1) * (1.0 - q ** (n + 1)))


def _h_marginal_cost(m: int, n: int, society: Society) -> float:
    """Cost level where example_h(m, n) crosses zero (gamma = 0 form)."""
    params = society.params
    alpha, p, v, delta = params.alpha, params.p, params.v, params.delta
    q = 1.0 - p
    a = alpha * delta / (1.0 - delta)
    share = (1.0 - q ** (n + 1)) / (n + 1)
    return a * v * q ** m * p / (1.0 + a * share) + params.gamma


def rich_cost_threshold(c_p: float, society: Society, strict: bool = False) -> float:
    """Cost threshold below which low-cost players support strictly more
    relationships than players with cost c_p.

    Two conventions, one unit apart in the pivot exponent:
      default      -- inverts the example_h marginal-link formula at
                      (B*(c_p), B*(c_p)+1), matching the reported value for
                      the two-group benchmark society (about 1.19 there);
      strict=True  -- the exact infimum inf{c : B*(c) = B*(c_p)}, which is
                      the cutoff curve evaluated at B*(c_p)+1.

    Both are clamped to [0, c_p].
    """
    params = society.params
    if not (params.v > c_p > 0):
        raise ValueError(f"need v > c_p > 0, got v={params.v}, c_p={c_p}")
    b_p = bound_from_params(params.alpha, params.p, params.v, c_p,
                            params.gamma, params.delta)
    if strict:
        value = cutoff_cost(b_p + 1, society)
    else:
        value = _h_marginal_cost(b_p, b_p + 1, society)
    return min(max(value, 0.0), c_p)


# --------------------------------------------------------------------------
# General-matrix degree bound


def general_matrix_bound(society: Society) -> int:
    """Degree bound |F|*b for general matrices with floor p_lower > 0.

    b is the largest integer with alpha*v*(1-p_lower)^b >= (1-delta)/delta
    * (c-gamma): past b other able providers, no single link's pivot value
    can cover the provision cost. Every stable network under the matrix has
    max degree at most |F|*b.
    """
    matrix = society.matrix
    if matrix.kind != SUBSTITUTABLE and (matrix.p_lower is None or matrix.p_lower <= 0):
        raise ValueError("general matrix bound needs a positive p_lower")
    p_low = matrix.p if matrix.kind == SUBSTITUTABLE else matrix.p_lower
    n_f = matrix.n_favor_types
    alpha, gamma = society.alpha, society.gamma
    q = 1.0 - p_low
    best = 0
    for t in set(society.types):
        rhs = (1.0 - t.delta) / t.delta * (t.c - gamma)
        if alpha * t.v < rhs:
            continue
        b = 0
        while alpha * t.v * q ** (b + 1) >= rhs and b < _BOUND_SCAN_LIMIT:
            b += 1
        best = max(best, b)
    return n_f * best


# --------------------------------------------------------------------------
# Bound curve export


def bound_curve(society: Society, n_max: int) -> list[tuple[int, float, float]]:
    """Rows (n, lhs, rhs) of the keep-vs-refuse trade-off: lhs is the
    discounted net future value of the n-th mutual relationship, rhs the
    constant net cost of providing today. They cross at B*."""
    params = society.params
    alpha, p, v, c, gamma, delta = (params.alpha, params.p, params.v,
                                    params.c, params.gamma, params.delta)
    q = 1.0 - p
    rhs = (1.0 - delta) * (c - gamma)
    rows = []
    for n in range(1, n_max + 1):
        lhs = delta * alpha * v * q ** (n - 1) * p - delta * alpha * c * provision_share(p, n)
        rows.append((n, lhs, rhs))
    return rows


def write_bound_curve(path: str | Path, society: Society, n_max: int) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "lhs", "rhs"])
        for row in bound_curve(society, n_max):
            writer.writerow(row)
