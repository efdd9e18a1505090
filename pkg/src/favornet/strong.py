"""Strong stability: pairwise deviations, violation search, and audits.

A pair violates strong stability when they can form a new link, possibly
dropping any subset of their own links, such that the new link is
sustainable in the resulting network and both are weakly better off with
one strictly. With transfers, the deviating pair may additionally attach
per-favor payments to the new link; all four resulting constraints are
affine in the expected net transfer, so feasibility reduces to an interval
intersection.

The search is exact: every pair is first screened with per-(drop-count)
margins and payoff upper bounds, and only pairs the screen cannot exclude
are enumerated subset by subset, in the canonical order (pairs
lexicographic, removal subsets by increasing size then lexicographic).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations

from .model import MONOPOLISTIC, SUBSTITUTABLE, Network, Society, TransferScheme
from .payoff import provision_share, transfer_weight
from .stability import bound_for_type, is_stable

# Exact deviation search is exponential in d_i + d_j; pairs beyond the cap
# are searched in the single-removal pattern only, with a warning.
PAIR_CAP = 24

EXACT = "exact"
SINGLE = "single"  # each deviating player removes at most one link


@dataclass(frozen=True)
class Deviation:
    """One pairwise deviation: add link ij, remove a subset of own links."""

    i: int
    j: int
    removed: tuple[tuple[int, int], ...]

    def apply(self, net: Network) -> Network:
        edges = set(net.edges) - set(self.removed)
        edges.add((self.i, self.j) if self.i <= self.j else (self.j, self.i))
        return Network(net.n, frozenset(edges))


@dataclass(frozen=True)
class ViolationWitness:
    """A deviation (and transfers, when used) that defeats strong stability."""

    deviation: Deviation
    transfers: TransferScheme | None
    margin_i: float
    margin_j: float
    gain_i: float
    gain_j: float

    def to_json_dict(self) -> dict:
        d = self.deviation
        out = {"pair": [d.i, d.j],
               "removed": [list(e) for e in d.removed],
               "sustainability_margin_i": self.margin_i,
               "sustainability_margin_j": self.margin_j,
               "improvement_i": self.gain_i,
               "improvement_j": self.gain_j}
        if self.transfers is not None:
            out["transfers"] = {"t_i": self.transfers.t_i, "t_j": self.transfers.t_j}
        return out


def enumerate_deviations(i: int, j: int, net: Network):
    """All 2^(d_i + d_j) deviations available to a non-linked pair, by
    increasing removal-set size then lexicographic."""
    if net.has_edge(i, j):
        raise ValueError(f"pair {i},{j} already linked; no deviation adds their link")
    removable = sorted({tuple(sorted((i, k))) for k in net.neighbors(i)}
                       | {tuple(sorted((j, k))) for k in net.neighbors(j)})
    for size in range(len(removable) + 1):
        for subset in combinations(removable, size):
            yield Deviation(i, j, subset)


# --------------------------------------------------------------------------
# Search internals (substitutable and monopolistic favor matrices)


class _SubstEnv:
    """Precomputed degree tables for one (network, society) search."""

    def __init__(self, net: Network, society: Society):
        self.society = society
        self.alpha = society.alpha
        self.p = society.params.p
        q = 1.0 - self.p
        top = net.n + 2
        self.qpow = [q ** d for d in range(top)]
        self.share = [provision_share(self.p, d) for d in range(top)]
        self.deg = list(net.degrees())

    def pivot(self, i: int, d_i: int, d_j: int) -> float:
        """u_i(g) - u_i(g-ij) when i has degree d_i and j degree d_j."""
        t = self.society.type_of(i)
        return self.alpha * (t.v * self.p * self.qpow[d_i - 1] - t.c * self.share[d_j])

    def margin(self, i: int, d_i: int, d_j: int) -> float:
        t = self.society.type_of(i)
        return (t.delta / (1.0 - t.delta) * self.pivot(i, d_i, d_j)
                - (t.c - self.society.gamma))

    def sustain_floor(self, i: int) -> float:
        t = self.society.type_of(i)
        return (1.0 - t.delta) / t.delta * (t.c - self.society.gamma)

    def benefit_delta(self, i: int, d_from: int, d_to: int) -> float:
        t = self.society.type_of(i)
        return self.alpha * t.v * (self.qpow[d_from] - self.qpow[d_to])

    def weight(self, degree: int) -> float:
        return transfer_weight(self.alpha, self.p, degree)


class _MonoEnv:
    """Monopolistic counterpart: everything is per-link and degree-free."""

    def __init__(self, net: Network, society: Society):
        self.society = society
        self.p_hat = society.alpha * society.matrix.p / society.n
        self.deg = list(net.degrees())

    def margin(self, i: int, d_i: int, d_j: int) -> float:
        t = self.society.type_of(i)
        return (t.delta / (1.0 - t.delta) * self.p_hat * (t.v - t.c)
                - (t.c - self.society.gamma))

    def link_value(self, i: int) -> float:
        t = self.society.type_of(i)
        return self.p_hat * (t.v - t.c)


def _subset_effects(env: _SubstEnv, net: Network, i: int, j: int,
                    subset: tuple[tuple[int, int], ...]):
    """Exact degrees and payoff gains for one deviation, in delta form.

    Delta form keeps unchanged terms as identical table lookups, so swaps
    between equal-degree neighbors cancel exactly instead of accumulating
    rounding noise.
    """
    drop = {}
    for a, b in subset:
        drop[a] = drop.get(a, 0) + 1
        drop[b] = drop.get(b, 0) + 1
    d_i1 = env.deg[i] - drop.get(i, 0) + 1
    d_j1 = env.deg[j] - drop.get(j, 0) + 1

    gains = []
    for x, d_x1, other, d_o1 in ((i, d_i1, j, d_j1), (j, d_j1, i, d_i1)):
        t = env.society.type_of(x)
        terms = [env.benefit_delta(x, env.deg[x], d_x1),
                 -env.alpha * t.c * env.share[d_o1]]
        for k in net.neighbors(x):
            e = (x, k) if x <= k else (k, x)
            if e in subset:
                terms.append(env.alpha * t.c * env.share[env.deg[k]])
            elif k in drop:
                d_k1 = env.deg[k] - drop[k]
                terms.append(-env.alpha * t.c
                             * (env.share[d_k1] - env.share[env.deg[k]]))
        gains.append(math.fsum(terms))
    return d_i1, d_j1, gains[0], gains[1]


def _transfer_interval(env: _SubstEnv, i: int, j: int, d_i1: int, d_j1: int,
                       gain_i: float, gain_j: float, ntilde: frozenset[int]):
    """Feasible range of the expected net transfer E = w_j t_j - w_i t_i.

    Four affine constraints: both sustainability inequalities and both weak
    improvements; capability restricts the sign of E.
    """
    lo1 = env.sustain_floor(i) - env.pivot(i, d_i1, d_j1)
    lo2 = -gain_i
    hi1 = env.pivot(j, d_j1, d_i1) - env.sustain_floor(j)
    hi2 = gain_j
    lo = max(lo1, lo2)
    hi = min(hi1, hi2)
    if i in ntilde and j in ntilde:
        pass
    elif j in ntilde:
        lo = max(lo, 0.0)
    elif i in ntilde:
        hi = min(hi, 0.0)
    else:
        lo, hi = max(lo, 0.0), min(hi, 0.0)
    if lo > hi:
        return None
    # at least one improvement must be strict: some E with E > lo2 or E < hi2
    if hi <= lo2 and lo >= hi2:
        return None
    return lo, hi, lo2, hi2


def _violation_search(net: Network, society: Society, transfers: bool,
                      mode: str, pair_cap: int) -> ViolationWitness | None:
    report = is_stable(net, society)
    if not report.stable:
        raise ValueError(f"strong stability is a refinement of stability; "
                         f"network is unstable at link {report.witness}")
    kind = society.matrix.kind
    if kind == SUBSTITUTABLE:
        return _search_substitutable(net, society, transfers, mode, pair_cap)
    if kind == MONOPOLISTIC:
        if transfers:
            raise ValueError("transfer-augmented search is defined for substitutable favors")
        return _search_monopolistic(net, society)
    raise ValueError(f"deviation search supports substitutable and monopolistic "
                     f"matrices, got {kind}; use the oracle module at desk scale")


def _check_het_guard(society: Society) -> None:
    # every player at the top bound needs enough equivalent partners for the
    # bound to be attainable in principle
    if society.is_homogeneous:
        return
    bounds = [bound_for_type(society, t) for t in society.types]
    top = max(bounds)
    if bounds.count(top) < top + 1:
        warnings.warn(
            f"only {bounds.count(top)} players carry the top cooperation bound "
            f"{top}; the strong-stability characterization assumes at least "
            f"{top + 1} players of equivalent type", stacklevel=3)


def _search_substitutable(net: Network, society: Society, transfers: bool,
                          mode: str, pair_cap: int) -> ViolationWitness | None:
    _check_het_guard(society)
    env = _SubstEnv(net, society)
    ntilde = society.transfer_capable() if transfers else frozenset()
    n = net.n
    for i in range(n):
        for j in range(i + 1, n):
            if net.has_edge(i, j):
                continue
            w = _search_pair(env, net, society, i, j, transfers, ntilde,
                             mode, pair_cap)
            if w is not None:
                return w
    return None


def _pair_screen(env: _SubstEnv, net: Network, i: int, j: int,
                 transfers: bool, ntilde: frozenset[int],
                 max_a: int, max_b: int) -> set[tuple[int, int]]:
    """Drop-count classes (a, b) that could possibly contain a violation.

    Margins are exact functions of the post-deviation degrees; payoff gains
    are bounded above by dropping the highest-cost (lowest-degree) own
    neighbors and ignoring partner-side drops of common neighbors, which
    only hurt. Sound: every discarded class is violation-free.
    """
    d_i, d_j = env.deg[i], env.deg[j]
    t_i, t_j = env.society.type_of(i), env.society.type_of(j)

    def best_prefix(x, t):
        shares = sorted((env.share[env.deg[k]] for k in net.neighbors(x)), reverse=True)
        acc, out = 0.0, [0.0]
        for s in shares:
            acc += env.alpha * t.c * s
            out.append(acc)
        return out

    prefix_i = best_prefix(i, t_i)
    prefix_j = best_prefix(j, t_j)
    passing = set()
    for a in range(max_a + 1):
        for b in range(max_b + 1):
            d_i1, d_j1 = d_i - a + 1, d_j - b + 1
            top_gain_i = (env.benefit_delta(i, d_i, d_i1) + prefix_i[a]
                          - env.alpha * t_i.c * env.share[d_j1])
            top_gain_j = (env.benefit_delta(j, d_j, d_j1) + prefix_j[b]
                          - env.alpha * t_j.c * env.share[d_i1])
            if transfers:
                box = _transfer_interval(env, i, j, d_i1, d_j1,
                                         top_gain_i, top_gain_j, ntilde)
                if box is None:
                    continue
            else:
                if env.margin(i, d_i1, d_j1) < 0 or env.margin(j, d_j1, d_i1) < 0:
                    continue
                if top_gain_i < 0 or top_gain_j < 0:
                    continue
                if not (top_gain_i > 0 or top_gain_j > 0):
                    continue
            passing.add((a, b))
    return passing


def _search_pair(env: _SubstEnv, net: Network, society: Society, i: int, j: int,
                 transfers: bool, ntilde: frozenset[int],
                 mode: str, pair_cap: int) -> ViolationWitness | None:
    d_i, d_j = env.deg[i], env.deg[j]
    single = mode == SINGLE
    if not single and d_i + d_j > pair_cap:
        warnings.warn(f"pair ({i},{j}) has d_i+d_j={d_i + d_j} > cap {pair_cap}; "
                      "searching the single-removal pattern only", stacklevel=4)
        single = True
    max_a, max_b = (1, 1) if single else (d_i, d_j)
    max_a, max_b = min(max_a, d_i), min(max_b, d_j)

    passing = _pair_screen(env, net, i, j, transfers, ntilde, max_a, max_b)
    if not passing:
        return None

    links_i = {tuple(sorted((i, k))) for k in net.neighbors(i)}
    removable = sorted(links_i | {tuple(sorted((j, k))) for k in net.neighbors(j)})
    for size in range(max_a + max_b + 1):
        for subset in combinations(removable, size):
            a = sum(1 for e in subset if e in links_i)
            b = size - a
            if (a, b) not in passing or a > max_a or b > max_b:
                continue
            d_i1, d_j1, gain_i, gain_j = _subset_effects(env, net, i, j, subset)
            if transfers:
                box = _transfer_interval(env, i, j, d_i1, d_j1,
                                         gain_i, gain_j, ntilde)
                if box is None:
                    continue
                lo, hi, lo2, hi2 = box
                e_mid = 0.5 * (lo + hi)
                w_i1, w_j1 = env.weight(d_i1), env.weight(d_j1)
                if e_mid >= 0:
                    scheme = TransferScheme(t_i=0.0, t_j=e_mid / w_j1)
                else:
                    scheme = TransferScheme(t_i=-e_mid / w_i1, t_j=0.0)
                dev = Deviation(i, j, subset)
                return ViolationWitness(
                    dev, scheme,
                    margin_i=(society.type_of(i).delta / (1 - society.type_of(i).delta)
                              * (env.pivot(i, d_i1, d_j1) + e_mid)
                              - (society.type_of(i).c - society.gamma)),
                    margin_j=(society.type_of(j).delta / (1 - society.type_of(j).delta)
                              * (env.pivot(j, d_j1, d_i1) - e_mid)
                              - (society.type_of(j).c - society.gamma)),
                    gain_i=gain_i + e_mid, gain_j=gain_j - e_mid)
            m_i = env.margin(i, d_i1, d_j1)
            m_j = env.margin(j, d_j1, d_i1)
            if (m_i >= 0 and m_j >= 0 and gain_i >= 0 and gain_j >= 0
                    and (gain_i > 0 or gain_j > 0)):
                return ViolationWitness(Deviation(i, j, subset), None,
                                        m_i, m_j, gain_i, gain_j)
    return None


def _search_monopolistic(net: Network, society: Society) -> ViolationWitness | None:
    env = _MonoEnv(net, society)
    # margins do not depend on the network and dropping links only loses
    # value, so the only candidate deviation per pair is the bare addition
    for i in range(net.n):
        for j in range(i + 1, net.n):
            if net.has_edge(i, j):
                continue
            m_i = env.margin(i, 0, 0)
            m_j = env.margin(j, 0, 0)
            g_i, g_j = env.link_value(i), env.link_value(j)
            if (m_i >= 0 and m_j >= 0 and g_i >= 0 and g_j >= 0
                    and (g_i > 0 or g_j > 0)):
                return ViolationWitness(Deviation(i, j, ()), None, m_i, m_j, g_i, g_j)
    return None


# --------------------------------------------------------------------------
# Public operations


def find_violation(net: Network, society: Society, mode: str = EXACT,
                   pair_cap: int = PAIR_CAP) -> ViolationWitness | None:
    """First strong-stability violation in canonical order, or None.

    None means the (stable) network is strongly stable. Raises if the
    network is not stable to begin with.
    """
    return _violation_search(net, society, transfers=False, mode=mode,
                             pair_cap=pair_cap)


def find_violation_with_transfers(net: Network, society: Society,
                                  mode: str = EXACT,
                                  pair_cap: int = PAIR_CAP) -> ViolationWitness | None:
    """Like find_violation, but deviating pairs may attach per-favor
    transfers to the new link, subject to transfer capability. Equivalent
    to find_violation when nobody is transfer-capable."""
    return _violation_search(net, society, transfers=True, mode=mode,
                             pair_cap=pair_cap)


def is_strongly_stable(net: Network, society: Society,
                       transfers: bool = False) -> bool:
    return _violation_search(net, society, transfers=transfers, mode=EXACT,
                             pair_cap=PAIR_CAP) is None


# --------------------------------------------------------------------------
# Degree-count audit


@dataclass(frozen=True)
class Theorem2Report:
    """Degree-count audit: below the bound, degree-k players number at most
    k+1 in any strongly stable network."""

    counts: dict[int, int]
    caps: dict[int, int]
    flagged: tuple[int, ...]

    @property
    def passes(self) -> bool:
        return not self.flagged


def audit_theorem2(net: Network, society: Society) -> Theorem2Report:
    """Count players below their own cooperation bound per degree and flag
    every degree class whose count exceeds degree+1; any flag proves the
    network is not strongly stable."""
    bounds = [bound_for_type(society, t) for t in society.types]
    counts: dict[int, int] = {}
    for idx in range(net.n):
        k = net.degree(idx)
        if k < bounds[idx]:
            counts[k] = counts.get(k, 0) + 1
    caps = {k: k + 1 for k in counts}
    flagged = tuple(sorted(k for k, c in counts.items() if c > k + 1))
    return Theorem2Report(counts, caps, flagged)


# --------------------------------------------------------------------------
# Constructions and stratification


def build_regular_network(n_players: int, degree: int) -> Network:
    """Circulant degree-regular graph: node i links to i +- 1..floor(d/2),
    plus the antipodal node when the degree is odd."""
    if degree >= n_players:
        raise ValueError(f"degree {degree} needs at least {degree + 1} players, got {n_players}")
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if (n_players * degree) % 2 != 0:
        raise ValueError(f"no {degree}-regular graph on {n_players} nodes: "
                         "the handshake lemma requires n*degree to be even")
    edges = set()
    for i in range(n_players):
        for step in range(1, degree // 2 + 1):
            edges.add(tuple(sorted((i, (i + step) % n_players))))
        if degree % 2 == 1:
            edges.add(tuple(sorted((i, (i + n_players // 2) % n_players))))
    return Network(n_players, frozenset(edges))


@dataclass(frozen=True)
class GroupSummary:
    group: str
    size: int
    bound: int
    fraction_at_bound: float
    cross_links: int
    degree_histogram: dict[int, int]


def classify_stratification(net: Network, society: Society) -> dict[str, GroupSummary]:
    """Per-group view of who reaches their cooperation bound and how many
    links leave the group."""
    members: dict[str, list[int]] = {}
    for idx, t in enumerate(society.types):
        members.setdefault(t.group, []).append(idx)
    out = {}
    for group, idxs in sorted(members.items()):
        bound = bound_for_type(society, society.type_of(idxs[0]))
        at_bound = sum(1 for idx in idxs if net.degree(idx) == bound)
        cross = sum(1 for a, b in net.edges
                    if (society.type_of(a).group == group)
                    != (society.type_of(b).group == group))
        hist: dict[int, int] = {}
        for idx in idxs:
            d = net.degree(idx)
            hist[d] = hist.get(d, 0) + 1
        out[group] = GroupSummary(group, len(idxs), bound,
                                  at_bound / len(idxs), cross,
                                  dict(sorted(hist.items())))
    return out
