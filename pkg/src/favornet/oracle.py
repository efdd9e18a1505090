"""Exhaustive ground truth on small instances.

Enumerates every labeled graph (or one representative per isomorphism
class) on up to seven nodes and classifies each one straight from the
definitions: stability by checking the sustainability inequality on every
link, strong stability by enumerating every pairwise deviation -- all
2^(d_i+d_j) removal subsets -- and transfer-augmented strong stability by
solving the four affine constraints for a feasible expected transfer.
Nothing here consults the analytic modules; this is what they are tested
against.

Payoff comparisons that tie exactly (equal-degree neighbor swaps) must not
be decided by rounding noise, so every payoff difference is an exactly
rounded fsum over the raw benefit and cost-share terms of both networks.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from itertools import combinations, permutations
from pathlib import Path

import numpy as np

from .model import (
    MONOPOLISTIC,
    SUBSTITUTABLE,
    Network,
    Society,
    SocietyParams,
)

DEFAULT_CAP = 7


@dataclass(frozen=True)
class EnumerationScope:
    """What to enumerate: node count and labeled-vs-isomorphism-class."""

    n: int
    dedupe: str = "labeled"  # "labeled" | "classes"
    cap: int = DEFAULT_CAP


def _pairs(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(n), 2))


def _mask_to_network(mask: int, n: int, pairs: list[tuple[int, int]]) -> Network:
    edges = [pairs[k] for k in range(len(pairs)) if mask >> k & 1]
    return Network.from_edges(n, edges)


def network_to_mask(net: Network) -> int:
    pairs = _pairs(net.n)
    index = {e: k for k, e in enumerate(pairs)}
    mask = 0
    for e in net.edges:
        mask |= 1 << index[e]
    return mask


def _perm_bit_maps(n: int) -> np.ndarray:
    """For each node permutation, where every pair-bit lands."""
    pairs = _pairs(n)
    index = {e: k for k, e in enumerate(pairs)}
    maps = []
    for perm in permutations(range(n)):
        maps.append([index[tuple(sorted((perm[a], perm[b])))] for a, b in pairs])
    return np.array(maps, dtype=np.int64)


def canonical_mask(mask: int, n: int) -> int:
    """Minimum edge bitmask over all node relabelings."""
    pairs = _pairs(n)
    m = len(pairs)
    bits = [(mask >> k) & 1 for k in range(m)]
    best = mask
    for row in _perm_bit_maps(n):
        img = 0
        for k in range(m):
            if bits[k]:
                img |= 1 << int(row[k])
        best = min(best, img)
    return best


def _class_representatives(n: int) -> list[int]:
    """All masks that are minimal within their isomorphism orbit."""
    m = n * (n - 1) // 2
    total = 1 << m
    bit_cols = np.array([[(mask >> k) & 1 for k in range(m)]
                         for mask in range(total)], dtype=np.int64)
    weights = 1 << np.arange(m, dtype=np.int64)
    canon = np.full(total, np.iinfo(np.int64).max, dtype=np.int64)
    for row in _perm_bit_maps(n):
        images = bit_cols[:, row] @ weights  # row k of the image gets bit k
        np.minimum(canon, images, out=canon)
    return [mask for mask in range(total) if canon[mask] == mask]


def enumerate_graphs(scope: EnumerationScope):
    """Stream of networks: all 2^(n(n-1)/2) labeled graphs, or one
    representative per isomorphism class, in ascending bitmask order."""
    if scope.n > scope.cap:
        raise ValueError(f"enumeration capped at {scope.cap} nodes, got {scope.n}")
    pairs = _pairs(scope.n)
    if scope.dedupe == "labeled":
        masks = range(1 << len(pairs))
    elif scope.dedupe == "classes":
        masks = _class_representatives(scope.n)
    else:
        raise ValueError(f"unknown dedupe mode {scope.dedupe!r}")
    for mask in masks:
        yield _mask_to_network(mask, scope.n, pairs)


# --------------------------------------------------------------------------
# Definition-level classification


class _Env:
    """Tables and per-player primitives for one society."""

    def __init__(self, society: Society):
        self.society = society
        self.n = society.n
        self.alpha = society.alpha
        self.gamma = society.gamma
        self.kind = society.matrix.kind
        self.v = [t.v for t in society.types]
        self.c = [t.c for t in society.types]
        self.disc = [t.delta / (1.0 - t.delta) for t in society.types]
        self.ntilde = society.transfer_capable()
        if self.kind == SUBSTITUTABLE:
            p = society.matrix.p
            q = 1.0 - p
            self.qpow = [q ** d for d in range(self.n + 2)]
            self.share = [0.0] + [(1.0 - q ** d) / d for d in range(1, self.n + 2)]
        elif self.kind == MONOPOLISTIC:
            self.p_hat = society.alpha * society.matrix.p / society.n

    # -- per-player payoff terms (substitutable) --

    def u_terms(self, i: int, adj: list[list[int]], deg: list[int]) -> list[float]:
        if self.kind == SUBSTITUTABLE:
            terms = [self.alpha * self.v[i] * (1.0 - self.qpow[deg[i]])]
            terms += [-self.alpha * self.c[i] * self.share[deg[j]] for j in adj[i]]
            return terms
        if self.kind == MONOPOLISTIC:
            return [deg[i] * self.p_hat * self.v[i], -deg[i] * self.p_hat * self.c[i]]
        return _general_u_terms(self.society, i, adj, deg)

    def u(self, i: int, adj, deg) -> float:
        return math.fsum(self.u_terms(i, adj, deg))

    def weight(self, degree: int) -> float:
        return self.alpha * self.share[degree]


def _general_u_terms(society: Society, i: int, adj, deg) -> list[float]:
    """Outcome-space expectation: enumerate the able subset of each
    requester's neighborhood and split payoffs over the uniform provider."""
    m = society.matrix
    alpha, n_f = society.alpha, m.n_favor_types
    terms = []
    for f in range(n_f):
        w_f = alpha / n_f
        # i as requester: benefit when somebody is able
        none = 1.0
        for j in adj[i]:
            none *= 1.0 - m.provision_probability(j, f)
        terms.append(w_f * society.types[i].v * (1.0 - none))
        # i as provider for each linked requester
        for j in adj[i]:
            others = [k for k in adj[j] if k != i]
            p_i = m.provision_probability(i, f)
            if p_i == 0.0:
                continue
            for size in range(len(others) + 1):
                for subset in combinations(others, size):
                    w = p_i
                    inside = set(subset)
                    for k in others:
                        pk = m.provision_probability(k, f)
                        w *= pk if k in inside else (1.0 - pk)
                    terms.append(-w_f * society.types[i].c * w / (1 + size))
    return terms


def _margin(env: _Env, i: int, j: int, adj, deg) -> float:
    """Sustainability margin of link ij for i, from the payoff difference."""
    if env.kind == SUBSTITUTABLE:
        diff = math.fsum([
            env.alpha * env.v[i] * (1.0 - env.qpow[deg[i]]),
            -env.alpha * env.v[i] * (1.0 - env.qpow[deg[i] - 1]),
            -env.alpha * env.c[i] * env.share[deg[j]]])
    elif env.kind == MONOPOLISTIC:
        diff = env.p_hat * (env.v[i] - env.c[i])
    else:
        adj2 = [list(ns) for ns in adj]
        adj2[i].remove(j)
        adj2[j].remove(i)
        deg2 = list(deg)
        deg2[i] -= 1
        deg2[j] -= 1
        diff = env.u(i, adj, deg) - env.u(i, adj2, deg2)
    return env.disc[i] * diff - (env.c[i] - env.gamma)


def _is_stable(env: _Env, edges, adj, deg) -> bool:
    for a, b in edges:
        if _margin(env, a, b, adj, deg) < 0 or _margin(env, b, a, adj, deg) < 0:
            return False
    return True


def _deviation_state(adj, deg, i, j, subset):
    adj2 = [list(ns) for ns in adj]
    deg2 = list(deg)
    for a, b in subset:
        adj2[a].remove(b)
        adj2[b].remove(a)
        deg2[a] -= 1
        deg2[b] -= 1
    adj2[i].append(j)
    adj2[j].append(i)
    deg2[i] += 1
    deg2[j] += 1
    return adj2, deg2


def _gain(env: _Env, x: int, adj_new, deg_new, adj_old, deg_old) -> float:
    terms = env.u_terms(x, adj_new, deg_new)
    terms += [-t for t in env.u_terms(x, adj_old, deg_old)]
    return math.fsum(terms)


def _has_violation_with_transfers(env: _Env, adj, deg) -> bool:
    if env.kind != SUBSTITUTABLE:
        raise ValueError("transfer-augmented verdicts are defined for substitutable favors")
    n = env.n
    for i in range(n):
        for j in range(i + 1, n):
            if j in adj[i]:
                continue
            removable = sorted({tuple(sorted((i, k))) for k in adj[i]}
                               | {tuple(sorted((j, k))) for k in adj[j]})
            for size in range(len(removable) + 1):
                for subset in combinations(removable, size):
                    adj2, deg2 = _deviation_state(adj, deg, i, j, subset)
                    gain_i = _gain(env, i, adj2, deg2, adj, deg)
                    gain_j = _gain(env, j, adj2, deg2, adj, deg)
                    pivot_i = math.fsum([
                        env.alpha * env.v[i] * (1.0 - env.qpow[deg2[i]]),
                        -env.alpha * env.v[i] * (1.0 - env.qpow[deg2[i] - 1]),
                        -env.alpha * env.c[i] * env.share[deg2[j]]])
                    pivot_j = math.fsum([
                        env.alpha * env.v[j] * (1.0 - env.qpow[deg2[j]]),
                        -env.alpha * env.v[j] * (1.0 - env.qpow[deg2[j] - 1]),
                        -env.alpha * env.c[j] * env.share[deg2[i]]])
                    lo_sust = (env.c[i] - env.gamma) / env.disc[i] - pivot_i
                    hi_sust = pivot_j - (env.c[j] - env.gamma) / env.disc[j]
                    lo_imp, hi_imp = -gain_i, gain_j
                    lo = max(lo_sust, lo_imp)
                    hi = min(hi_sust, hi_imp)
                    if i in env.ntilde and j in env.ntilde:
                        pass
                    elif j in env.ntilde:
                        lo = max(lo, 0.0)
                    elif i in env.ntilde:
                        hi = min(hi, 0.0)
                    else:
                        lo, hi = max(lo, 0.0), min(hi, 0.0)
                    if lo > hi:
                        continue
                    if hi <= lo_imp and lo >= hi_imp:
                        continue  # both improvements forced to equality
                    return True
    return False


def _has_plain_violation(env: _Env, adj, deg) -> bool:
    n = env.n
    for i in range(n):
        for j in range(i + 1, n):
            if j in adj[i]:
                continue
            removable = sorted({tuple(sorted((i, k))) for k in adj[i]}
                               | {tuple(sorted((j, k))) for k in adj[j]})
            for size in range(len(removable) + 1):
                for subset in combinations(removable, size):
                    adj2, deg2 = _deviation_state(adj, deg, i, j, subset)
                    gain_i = _gain(env, i, adj2, deg2, adj, deg)
                    gain_j = _gain(env, j, adj2, deg2, adj, deg)
                    if gain_i < 0 or gain_j < 0 or not (gain_i > 0 or gain_j > 0):
                        continue
                    if (_margin(env, i, j, adj2, deg2) >= 0
                            and _margin(env, j, i, adj2, deg2) >= 0):
                        return True
    return False


@dataclass(frozen=True)
class GraphVerdict:
    graph_id: int  # edge bitmask
    stable: bool
    strongly_stable: bool
    sst_transfers: bool | None


def classify_all(scope: EnumerationScope, society: Society,
                 with_transfers: bool = True) -> list[GraphVerdict]:
    """Classify every enumerated graph from first principles.

    A network that is not stable is not strongly stable either (strong
    stability refines stability). Transfer-augmented verdicts are emitted
    for substitutable matrices only.
    """
    if scope.n != society.n:
        raise ValueError(f"scope is on {scope.n} nodes but society has {society.n}")
    env = _Env(society)
    do_transfers = with_transfers and env.kind == SUBSTITUTABLE
    do_strong = env.kind in (SUBSTITUTABLE, MONOPOLISTIC)
    out = []
    for net in enumerate_graphs(scope):
        adj = [list(net.neighbors(i)) for i in range(net.n)]
        deg = [len(a) for a in adj]
        edges = net.sorted_edges()
        stable = _is_stable(env, edges, adj, deg)
        strong = False
        sst = False if do_transfers else None
        if stable and do_strong:
            strong = not _has_plain_violation(env, adj, deg)
            if do_transfers:
                sst = not _has_violation_with_transfers(env, adj, deg)
        out.append(GraphVerdict(network_to_mask(net), stable, strong, sst))
    return out


def max_stable_degree(scope: EnumerationScope, society: Society) -> int:
    """Largest degree appearing in any stable enumerated graph."""
    env = _Env(society)
    best = 0
    for net in enumerate_graphs(scope):
        adj = [list(net.neighbors(i)) for i in range(net.n)]
        deg = [len(a) for a in adj]
        if _is_stable(env, net.sorted_edges(), adj, deg):
            best = max(best, max(deg, default=0))
    return best


def write_classification_csv(path: str | Path, verdicts: list[GraphVerdict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["graph_id", "stable", "strongly_stable", "sst_transfers"])
        for v in verdicts:
            writer.writerow([v.graph_id, int(v.stable), int(v.strongly_stable),
                             "" if v.sst_transfers is None else int(v.sst_transfers)])


# --------------------------------------------------------------------------
# Randomized-test parameter draws


def random_society(rng: random.Random, n: int) -> Society:
    """Parameter draw spanning sustainable and unsustainable regimes:
    log-uniform delta in [.8,.999], alpha in [.01,.5], p in [.05,.5] and
    v/c in [1.1,10], uniform gamma/c in [0,.9], with c normalized to 1."""

    def log_uniform(lo: float, hi: float) -> float:
        return math.exp(rng.uniform(math.log(lo), math.log(hi)))

    delta = log_uniform(0.8, 0.999)
    alpha = log_uniform(0.01, 0.5)
    p = log_uniform(0.05, 0.5)
    c = 1.0
    v = c * log_uniform(1.1, 10.0)
    gamma = c * rng.uniform(0.0, 0.9)
    params = SocietyParams(n_players=n, alpha=alpha, p=p, v=v, c=c,
                           gamma=gamma, delta=delta)
    return Society.homogeneous(params)
