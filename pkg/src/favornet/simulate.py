"""Seeded Monte Carlo execution of the favor-exchange protocol.

Each period: link removals come first, then favor needs and favor types
are drawn, provider availability is realized, a provider is picked
uniformly among the able linked neighbors, and the stage game is played.
On the equilibrium path under bilateral grim trigger every favor is
provided and every link kept; a scripted one-shot refusal removes exactly
the one link between refuser and requester, forever.

Randomness comes from a counter-based generator (Philox) seeded once, with
a fixed per-period draw layout -- needs, favor types, availability,
provider selection -- so results are bit-identical for a given config and
instrumentation can never perturb the stream. Availability is drawn per
(requester, provider) pair; per-player expected payoffs are unaffected by
cross-requester availability correlation, so this matches the analytic
expectation under either request convention.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import Network, Society

INDEPENDENT = "independent"
AT_MOST_ONE = "at-most-one"

_BASE_CHUNK = 4_194_304  # scaled down by n^2; fixed so streams are reproducible


@dataclass(frozen=True)
class SimConfig:
    """Run length, seed, request convention and optional scripted refusal.

    deviation = (player, partner, period): the player refuses the first
    favor requested by the partner at or after the given period, once.
    """

    periods: int
    seed: int
    convention: str = INDEPENDENT
    deviation: tuple[int, int, int] | None = None
    n_batches: int = 100


@dataclass(frozen=True)
class SimResult:
    periods: int
    means: tuple[float, ...]
    std_errors: tuple[float, ...]
    events: dict[str, int]
    received: tuple[int, ...]
    provided: tuple[int, ...]
    refusals_by: tuple[int, ...]
    refused_requests: tuple[int, ...]
    final_network: Network

    def to_json_dict(self) -> dict:
        return {"periods": self.periods,
                "means": list(self.means),
                "std_errors": list(self.std_errors),
                "events": dict(self.events),
                "received": list(self.received),
                "provided": list(self.provided),
                "refusals_by": list(self.refusals_by),
                "final_network": {"n": self.final_network.n,
                                  "edges": [list(e) for e in self.final_network.sorted_edges()]}}


class _Tally:
    def __init__(self, n: int, n_batches: int, batch_len: int):
        self.n_batches = n_batches
        self.batch_len = batch_len
        # one spill bucket for leftover periods beyond the last full batch
        self.recv = np.zeros((n_batches + 1, n), dtype=np.int64)
        self.prov = np.zeros((n_batches + 1, n), dtype=np.int64)
        self.refuse = np.zeros((n_batches + 1, n), dtype=np.int64)
        self.refused_req = np.zeros(n, dtype=np.int64)
        self.requests = 0
        self.provisions = 0
        self.refusals = 0
        self.removals = 0

    def batch_of(self, t: int | np.ndarray):
        if self.batch_len == 0:
            return np.full_like(np.asarray(t), self.n_batches)
        return np.minimum(t // self.batch_len, self.n_batches)


def _matrix_array(society: Society) -> np.ndarray:
    m = society.matrix
    return np.array([[m.provision_probability(j, f) for j in range(society.n)]
                     for f in range(m.n_favor_types)], dtype=float)


def simulate(net: Network, society: Society, config: SimConfig,
             event_log: str | Path | None = None) -> SimResult:
    """Run the protocol and return per-player empirical payoff means.

    Means are computed from event counts, so the accounting identity
    total = v*received - c*provided - gamma*refusals holds exactly.
    Standard errors use batch means over n_batches consecutive blocks.
    """
    if config.periods < 1:
        raise ValueError("periods must be >= 1")
    if config.convention not in (INDEPENDENT, AT_MOST_ONE):
        raise ValueError(f"unknown request convention {config.convention!r}")
    n = society.n
    alpha = society.alpha
    if config.convention == AT_MOST_ONE and n * alpha > 1.0:
        raise ValueError(f"at-most-one convention needs n*alpha <= 1, got {n * alpha}")

    rng = np.random.Generator(np.random.Philox(config.seed))
    probs = _matrix_array(society)
    n_f = probs.shape[0]
    adjacency = [list(net.neighbors(i)) for i in range(n)]
    batch_len = config.periods // config.n_batches
    tally = _Tally(n, config.n_batches, batch_len)
    chunk = min(32768, max(256, _BASE_CHUNK // (n * n)))

    pending = config.deviation
    if pending is not None:
        player, partner, t_dev = pending
        if not net.has_edge(player, partner):
            raise ValueError(f"deviation script names non-link {player}-{partner}")
    removed_edge = None
    log_fh = open(event_log, "w") if event_log is not None else None

    try:
        t = 0
        while t < config.periods:
            size = min(chunk, config.periods - t)
            if config.convention == INDEPENDENT:
                req_u = rng.random((size, n))
                type_u = rng.random((size, n))
                avail_u = rng.random((size, n, n))
                sel_u = rng.random((size, n))
            else:
                req_u = rng.random(size)
                type_u = rng.random(size)
                avail_u = rng.random((size, n))
                sel_u = rng.random(size)

            scalar = pending is not None and t + size > pending[2]
            if scalar or log_fh is not None:
                pending, removed_edge, adjacency = _walk_chunk(
                    t, size, config, society, probs, n_f, adjacency, tally,
                    req_u, type_u, avail_u, sel_u, pending, removed_edge, log_fh)
            else:
                _vector_chunk(t, size, config, society, probs, n_f, adjacency,
                              tally, req_u, type_u, avail_u, sel_u)
            t += size
    finally:
        if log_fh is not None:
            log_fh.close()

    return _finish(net, society, config, tally, removed_edge)


def _resolve_request(r: int, f: int, nbrs: list[int], avail_row, sel: float,
                     probs: np.ndarray):
    """Able providers and the uniform pick for one request; None if nobody
    is able."""
    able = [j for j in nbrs if avail_row[j] < probs[f, j]]
    if not able:
        return None
    return able[int(sel * len(able))]


def _walk_chunk(t0, size, config, society, probs, n_f, adjacency, tally,
                req_u, type_u, avail_u, sel_u, pending, removed_edge, log_fh):
    """Sequential resolution; used when a scripted refusal may trigger or
    an event log is requested. Draw-for-draw identical to the vector path."""
    independent = config.convention == INDEPENDENT
    alpha = society.alpha
    n = society.n
    for row in range(size):
        t = t0 + row
        b = int(tally.batch_of(t))
        if independent:
            requesters = [r for r in range(n) if req_u[row, r] < alpha]
        else:
            requesters = [int(req_u[row] / alpha)] if req_u[row] < n * alpha else []
        for r in requesters:
            tally.requests += 1
            f = int((type_u[row, r] if independent else type_u[row]) * n_f)
            avail_row = avail_u[row, r] if independent else avail_u[row]
            sel = sel_u[row, r] if independent else sel_u[row]
            provider = _resolve_request(r, f, adjacency[r], avail_row, sel, probs)
            if provider is None:
                continue
            refuse = (pending is not None and t >= pending[2]
                      and r == pending[1] and provider == pending[0])
            if refuse:
                tally.refusals += 1
                tally.refuse[b, provider] += 1
                tally.refused_req[r] += 1
                # grim trigger: the requester removes this one link next period
                adjacency = [list(ns) for ns in adjacency]
                adjacency[r].remove(provider)
                adjacency[provider].remove(r)
                removed_edge = (min(r, provider), max(r, provider))
                tally.removals += 1
                pending = None
            else:
                tally.provisions += 1
                tally.recv[b, r] += 1
                tally.prov[b, provider] += 1
            if log_fh is not None:
                log_fh.write(json.dumps({
                    "period": t, "requester": r, "favor": f,
                    "provider": provider,
                    "action": "refuse" if refuse else "provide"}) + "\n")
    return pending, removed_edge, adjacency


def _vector_chunk(t0, size, config, society, probs, n_f, adjacency, tally,
                  req_u, type_u, avail_u, sel_u):
    independent = config.convention == INDEPENDENT
    alpha = society.alpha
    n = society.n
    periods = np.arange(t0, t0 + size)
    batches = tally.batch_of(periods)
    if not independent:
        requester_of = (req_u / alpha).astype(np.int64)  # matches int(u/alpha)
        requested = req_u < n * alpha
    for r in range(n):
        if independent:
            rows = np.nonzero(req_u[:, r] < alpha)[0]
            f = (type_u[rows, r] * n_f).astype(np.int64)
            avail = avail_u[rows, r]
            sel = sel_u[rows, r]
        else:
            rows = np.nonzero(requested & (requester_of == r))[0]
            f = (type_u[rows] * n_f).astype(np.int64)
            avail = avail_u[rows]
            sel = sel_u[rows]
        tally.requests += len(rows)
        nbrs = adjacency[r]
        if not nbrs or len(rows) == 0:
            continue
        nbr_idx = np.array(nbrs)
        able = avail[:, nbr_idx] < probs[f][:, nbr_idx]
        counts = able.sum(axis=1)
        ok = counts > 0
        if not ok.any():
            continue
        pick = (sel[ok] * counts[ok]).astype(np.int64)
        cum = np.cumsum(able[ok], axis=1)
        prov_pos = (cum > pick[:, None]).argmax(axis=1)
        providers = nbr_idx[prov_pos]
        b_ok = batches[rows[ok]]
        tally.provisions += int(ok.sum())
        np.add.at(tally.recv, (b_ok, r), 1)
        np.add.at(tally.prov, (b_ok, providers), 1)


def _finish(net: Network, society: Society, config: SimConfig, tally: _Tally,
            removed_edge) -> SimResult:
    n = society.n
    recv_total = tally.recv.sum(axis=0)
    prov_total = tally.prov.sum(axis=0)
    ref_total = tally.refuse.sum(axis=0)
    v = np.array([t.v for t in society.types])
    c = np.array([t.c for t in society.types])
    gamma = society.gamma
    means = (v * recv_total - c * prov_total - gamma * ref_total) / config.periods

    if tally.batch_len > 0 and config.n_batches > 1:
        bl = tally.batch_len
        batch_pay = (v[None, :] * tally.recv[:config.n_batches]
                     - c[None, :] * tally.prov[:config.n_batches]
                     - gamma * tally.refuse[:config.n_batches]) / bl
        ses = batch_pay.std(axis=0, ddof=1) / math.sqrt(config.n_batches)
    else:
        ses = np.full(n, math.nan)

    final = net if removed_edge is None else net.remove_edge(*removed_edge)
    events = {"requests": int(tally.requests),
              "provisions": int(tally.provisions),
              "refusals": int(tally.refusals),
              "link_removals": int(tally.removals)}
    return SimResult(config.periods, tuple(float(x) for x in means),
                     tuple(float(x) for x in ses), events,
                     tuple(int(x) for x in recv_total),
                     tuple(int(x) for x in prov_total),
                     tuple(int(x) for x in ref_total),
                     tuple(int(x) for x in tally.refused_req), final)


def estimate_payoff_general(net: Network, society: Society,
                            config: SimConfig) -> SimResult:
    """Unbiased Monte Carlo estimate of per-player payoffs for matrices too
    dense for exact enumeration; just the simulator on the given matrix."""
    if config.deviation is not None:
        raise ValueError("payoff estimation runs on the equilibrium path; "
                         "no deviation script")
    return simulate(net, society, config)
