"""Domain data types for favor-exchange societies.

Everything here is immutable value data: society parameters, the network,
per-player types, the favor provision matrix, transfer schemes and
enforcement configuration, plus validation, the JSON document format and
DOT export. No game logic lives in this module.

Players are 0-indexed integers throughout; group names are metadata only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence


class SocietyFormatError(ValueError):
    """Raised when a society document cannot be parsed or violates invariants."""


# --------------------------------------------------------------------------
# Core parameter block


@dataclass(frozen=True)
class SocietyParams:
    """Scalar parameters of a homogeneous society.

    alpha  -- probability a given player needs a favor in a period
    p      -- provision probability (substitutable case)
    v      -- value of a received favor
    c      -- cost of providing a favor (v > c > 0)
    gamma  -- penalty for refusing a favor (0 <= gamma < c)
    delta  -- discount factor
    """

    n_players: int
    alpha: float
    p: float
    v: float
    c: float
    gamma: float
    delta: float


@dataclass(frozen=True)
class PlayerType:
    """Per-player primitives; a homogeneous society has all types equal."""

    v: float
    c: float
    delta: float
    can_transfer: bool = False
    group: str = "all"

    @staticmethod
    def from_params(params: SocietyParams, can_transfer: bool = False,
                    group: str = "all") -> "PlayerType":
        return PlayerType(v=params.v, c=params.c, delta=params.delta,
                          can_transfer=can_transfer, group=group)


# --------------------------------------------------------------------------
# Network


def _canonical_edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i <= j else (j, i)


@dataclass(frozen=True)
class Network:
    """Undirected simple graph over player indices 0..n-1.

    Edges are stored canonically as (a, b) with a <= b. Instances are
    immutable; add_edge/remove_edge return new networks.
    """

    n: int
    edges: frozenset[tuple[int, int]] = frozenset()

    @staticmethod
    def from_edges(n: int, edges: Iterable[Sequence[int]]) -> "Network":
        return Network(n, frozenset(_canonical_edge(int(i), int(j)) for i, j in edges))

    @staticmethod
    def empty(n: int) -> "Network":
        return Network(n, frozenset())

    @staticmethod
    def complete(n: int) -> "Network":
        return Network(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))

    @cached_property
    def _adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        return tuple(tuple(sorted(ns)) for ns in nbrs)

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self._adjacency[i]

    def degree(self, i: int) -> int:
        return len(self._adjacency[i])

    def degrees(self) -> tuple[int, ...]:
        return tuple(len(ns) for ns in self._adjacency)

    def has_edge(self, i: int, j: int) -> bool:
        return _canonical_edge(i, j) in self.edges

    def add_edge(self, i: int, j: int) -> "Network":
        return Network(self.n, self.edges | {_canonical_edge(i, j)})

    def remove_edge(self, i: int, j: int) -> "Network":
        e = _canonical_edge(i, j)
        if e not in self.edges:
            raise ValueError(f"remove_edge: edge {e} not present")
        return Network(self.n, self.edges - {e})

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


# --------------------------------------------------------------------------
# Favor provision matrix

SUBSTITUTABLE = "substitutable"
MONOPOLISTIC = "monopolistic"
GENERAL = "general"


@dataclass(frozen=True)
class FavorMatrix:
    """Per-player, per-favor-type provision probabilities.

    Three kinds:
      substitutable -- every entry equals p; any neighbor can stand in for
                       any other (payoffs do not depend on n_favor_types)
      monopolistic  -- p on the diagonal, zero elsewhere; requires one favor
                       type per player
      general       -- explicit rows, every nonzero entry >= p_lower > 0
    """

    kind: str
    n_players: int
    n_favor_types: int
    p: float | None = None
    rows: tuple[tuple[float, ...], ...] | None = None
    p_lower: float | None = None

    @staticmethod
    def substitutable(p: float, n_players: int, n_favor_types: int = 1) -> "FavorMatrix":
        return FavorMatrix(SUBSTITUTABLE, n_players, n_favor_types, p=p)

    @staticmethod
    def monopolistic(p: float, n_players: int) -> "FavorMatrix":
        return FavorMatrix(MONOPOLISTIC, n_players, n_players, p=p)

    @staticmethod
    def general(rows: Sequence[Sequence[float]], p_lower: float | None = None) -> "FavorMatrix":
        tup = tuple(tuple(float(x) for x in row) for row in rows)
        if p_lower is None:
            positives = [x for row in tup for x in row if x > 0.0]
            p_lower = min(positives) if positives else 0.0
        width = len(tup[0]) if tup else 0
        return FavorMatrix(GENERAL, len(tup), width, rows=tup, p_lower=p_lower)

    def provision_probability(self, player: int, favor: int) -> float:
        if self.kind == SUBSTITUTABLE:
            return self.p
        if self.kind == MONOPOLISTIC:
            return self.p if player == favor else 0.0
        return self.rows[player][favor]

    def row(self, player: int) -> tuple[float, ...]:
        return tuple(self.provision_probability(player, f) for f in range(self.n_favor_types))


# --------------------------------------------------------------------------
# Transfers and enforcement


@dataclass(frozen=True)
class TransferScheme:
    """Per-favor transfers on one relationship; the payer pays on receiving.

    t_i is paid by player i to j each time j provides a favor to i, and
    symmetrically for t_j. Positive transfers require transfer capability.
    """

    t_i: float = 0.0
    t_j: float = 0.0


BILATERAL = "bilateral"
COMMUNITY = "community"
LEGAL = "legal"


@dataclass(frozen=True)
class EnforcementConfig:
    """Enforcement mechanism: pure bilateral, community partition, or legal.

    Community mode carries a partition of the players and a per-link
    per-period maintenance cost kappa. Legal mode carries coefficients of
    the maintenance-cost family k0 + a*gamma/(c - gamma), which is positive,
    convex on [0, c) and diverges at gamma -> c.
    """

    mode: str
    partition: tuple[tuple[int, ...], ...] | None = None
    kappa: float | None = None
    cost_k0: float | None = None
    cost_a: float | None = None

    @staticmethod
    def bilateral() -> "EnforcementConfig":
        return EnforcementConfig(BILATERAL)

    @staticmethod
    def community(partition: Sequence[Sequence[int]], kappa: float) -> "EnforcementConfig":
        blocks = tuple(tuple(sorted(int(i) for i in block)) for block in partition)
        return EnforcementConfig(COMMUNITY, partition=blocks, kappa=kappa)

    @staticmethod
    def legal(cost_k0: float, cost_a: float) -> "EnforcementConfig":
        return EnforcementConfig(LEGAL, cost_k0=cost_k0, cost_a=cost_a)

    def community_of(self, i: int) -> tuple[int, ...]:
        for block in self.partition:
            if i in block:
                return block
        raise ValueError(f"player {i} not covered by partition")


# --------------------------------------------------------------------------
# Society aggregate


@dataclass(frozen=True)
class Society:
    """Parameters, per-player types and the favor matrix, bundled.

    The heterogeneous representation is the only representation: a
    homogeneous society is simply one where every PlayerType is equal.
    """

    params: SocietyParams
    types: tuple[PlayerType, ...]
    matrix: FavorMatrix

    @staticmethod
    def homogeneous(params: SocietyParams, matrix: FavorMatrix | None = None,
                    can_transfer: bool = False) -> "Society":
        t = PlayerType.from_params(params, can_transfer=can_transfer)
        if matrix is None:
            matrix = FavorMatrix.substitutable(params.p, params.n_players)
        return Society(params, (t,) * params.n_players, matrix)

    @property
    def n(self) -> int:
        return self.params.n_players

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def gamma(self) -> float:
        return self.params.gamma

    def type_of(self, i: int) -> PlayerType:
        return self.types[i]

    @property
    def is_homogeneous(self) -> bool:
        return all(t == self.types[0] for t in self.types)

    def transfer_capable(self) -> frozenset[int]:
        return frozenset(i for i, t in enumerate(self.types) if t.can_transfer)

    def with_types(self, types: Sequence[PlayerType]) -> "Society":
        return Society(self.params, tuple(types), self.matrix)


# --------------------------------------------------------------------------
# Validation

_PROB_FIELDS = (("alpha", 0.0, 1.0, True), ("p", 0.0, 1.0, False), ("delta", 0.0, 1.0, False))


def validate(params: SocietyParams,
             net: Network | None = None,
             matrix: FavorMatrix | None = None,
             types: Sequence[PlayerType] | None = None,
             enforcement: EnforcementConfig | None = None) -> list[str]:
    """Check every domain invariant; returns human-readable violations.

    An empty list means ok. Violations are data, not failures: nothing is
    raised here.
    """
    out: list[str] = []
    if int(params.n_players) != params.n_players or params.n_players < 1:
        out.append(f"params.n_players: positive integer required, got {params.n_players}")
    for name, lo, hi, closed_hi in _PROB_FIELDS:
        x = getattr(params, name)
        ok = (lo < x <= hi) if closed_hi else (lo < x < hi)
        if not ok:
            bracket = "]" if closed_hi else ")"
            out.append(f"params.{name}: needs ({lo}, {hi}{bracket}, got {x}")
    if not (params.v > params.c > 0):
        out.append(f"params: v > c > 0 required, got v={params.v}, c={params.c}")
    if not (0 <= params.gamma < params.c):
        out.append(f"params: gamma < c required with gamma >= 0, got gamma={params.gamma}, c={params.c}")

    if net is not None:
        for a, b in net.edges:
            if a == b:
                out.append(f"network: self-loop at node {a}")
            if not (0 <= a < net.n and 0 <= b < net.n):
                out.append(f"network: edge ({a},{b}) outside node range [0,{net.n})")

    if types is not None:
        if len(types) != params.n_players:
            out.append(f"players: expected {params.n_players} types, got {len(types)}")
        for i, t in enumerate(types):
            if not (t.v > t.c > 0):
                out.append(f"players[{i}]: v > c > 0 required, got v={t.v}, c={t.c}")
            if not (0 < t.delta < 1):
                out.append(f"players[{i}]: delta in (0,1) required, got {t.delta}")

    if matrix is not None:
        out.extend(_validate_matrix(params, matrix))

    if enforcement is not None:
        out.extend(_validate_enforcement(params, enforcement))
    return out


def _validate_matrix(params: SocietyParams, matrix: FavorMatrix) -> list[str]:
    out: list[str] = []
    if matrix.kind not in (SUBSTITUTABLE, MONOPOLISTIC, GENERAL):
        return [f"matrix.kind: unknown kind {matrix.kind!r}"]
    if matrix.n_players != params.n_players:
        out.append(f"matrix: n_players {matrix.n_players} != params.n_players {params.n_players}")
    if matrix.kind in (SUBSTITUTABLE, MONOPOLISTIC):
        if matrix.p is None or not (0 < matrix.p < 1):
            out.append(f"matrix.p: needs (0, 1), got {matrix.p}")
        elif matrix.kind == SUBSTITUTABLE and matrix.p != params.p:
            out.append(f"matrix.p: {matrix.p} inconsistent with params.p {params.p}")
    if matrix.kind == MONOPOLISTIC and matrix.n_players != matrix.n_favor_types:
        out.append(f"matrix: |N| = |F| required for monopolistic favors, "
                   f"got {matrix.n_players} players and {matrix.n_favor_types} favor types")
    if matrix.kind == GENERAL:
        if matrix.p_lower is None or matrix.p_lower <= 0:
            out.append(f"matrix.p_lower: positive lower bound required, got {matrix.p_lower}")
        for i, row in enumerate(matrix.rows):
            if len(row) != matrix.n_favor_types:
                out.append(f"matrix.rows[{i}]: expected {matrix.n_favor_types} entries, got {len(row)}")
            if not any(x > 0 for x in row):
                out.append(f"matrix.rows[{i}]: at least one positive provision probability required")
            for f, x in enumerate(row):
                if not (0 <= x <= 1):
                    out.append(f"matrix.rows[{i}][{f}]: probability outside [0,1]: {x}")
                elif 0 < x < (matrix.p_lower or 0):
                    out.append(f"matrix.rows[{i}][{f}]: nonzero entry {x} below p_lower {matrix.p_lower}")
    return out


def _validate_enforcement(params: SocietyParams, cfg: EnforcementConfig) -> list[str]:
    out: list[str] = []
    if cfg.mode not in (BILATERAL, COMMUNITY, LEGAL):
        return [f"enforcement.mode: unknown mode {cfg.mode!r}"]
    if cfg.mode == COMMUNITY:
        if cfg.kappa is None or cfg.kappa < 0:
            out.append(f"enforcement.kappa: nonnegative cost required, got {cfg.kappa}")
        seen: set[int] = set()
        for block in cfg.partition or ():
            for i in block:
                if i in seen:
                    out.append(f"enforcement.partition: player {i} appears in two blocks")
                seen.add(i)
        missing = set(range(params.n_players)) - seen
        if missing:
            out.append(f"enforcement.partition: players {sorted(missing)} not covered")
        extra = seen - set(range(params.n_players))
        if extra:
            out.append(f"enforcement.partition: unknown players {sorted(extra)}")
    if cfg.mode == LEGAL:
        if cfg.cost_k0 is None or cfg.cost_k0 <= 0:
            out.append(f"enforcement.cost_k0: positive constant required, got {cfg.cost_k0}")
        if cfg.cost_a is None or cfg.cost_a <= 0:
            out.append(f"enforcement.cost_a: positive slope required, got {cfg.cost_a}")
    return out


def validate_transfers(scheme: TransferScheme, i: int, j: int,
                       types: Sequence[PlayerType]) -> list[str]:
    out = []
    if scheme.t_i < 0 or scheme.t_j < 0:
        out.append(f"transfers: nonnegative amounts required, got ({scheme.t_i}, {scheme.t_j})")
    if scheme.t_i > 0 and not types[i].can_transfer:
        out.append(f"transfers: t_i > 0 but player {i} is not transfer-capable")
    if scheme.t_j > 0 and not types[j].can_transfer:
        out.append(f"transfers: t_j > 0 but player {j} is not transfer-capable")
    return out


# --------------------------------------------------------------------------
# JSON document


@dataclass(frozen=True)
class SocietyDocument:
    """One loadable unit: parameters, network, matrix, types, enforcement."""

    params: SocietyParams
    network: Network
    matrix: FavorMatrix
    players: tuple[PlayerType, ...]
    enforcement: EnforcementConfig | None = None

    @property
    def society(self) -> Society:
        return Society(self.params, self.players, self.matrix)


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise SocietyFormatError(f"{where}: missing required field {key!r}")
    return doc[key]


def load_society(path: str | Path) -> SocietyDocument:
    """Load and validate a society document; see README for the schema.

    Defaults: empty network, homogeneous types from params, substitutable
    matrix with the params' p, no enforcement block.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise SocietyFormatError(f"{path}: line {e.lineno}: {e.msg}") from e
    return society_from_dict(raw, where=str(path))


def society_from_dict(raw: dict, where: str = "society") -> SocietyDocument:
    p = _require(raw, "params", where)
    for k in ("alpha", "p", "v", "c", "gamma", "delta"):
        _require(p, k, f"{where}.params")
    n = int(_require(raw, "n", where))
    params = SocietyParams(n_players=n, alpha=p["alpha"], p=p["p"], v=p["v"],
                           c=p["c"], gamma=p["gamma"], delta=p["delta"])

    net = Network.from_edges(n, raw.get("edges", []))

    if "players" in raw:
        players = tuple(
            PlayerType(v=pl.get("v", params.v), c=pl.get("c", params.c),
                       delta=pl.get("delta", params.delta),
                       can_transfer=bool(pl.get("can_transfer", False)),
                       group=str(pl.get("group", "all")))
            for pl in raw["players"])
    else:
        players = (PlayerType.from_params(params),) * n

    m = raw.get("matrix")
    if m is None:
        matrix = FavorMatrix.substitutable(params.p, n)
    else:
        kind = _require(m, "kind", f"{where}.matrix")
        if kind == SUBSTITUTABLE:
            matrix = FavorMatrix.substitutable(m.get("p", params.p), n,
                                               m.get("n_favor_types", 1))
        elif kind == MONOPOLISTIC:
            matrix = FavorMatrix.monopolistic(m.get("p", params.p), n)
        elif kind == GENERAL:
            matrix = FavorMatrix.general(_require(m, "rows", f"{where}.matrix"),
                                         m.get("p_lower"))
        else:
            raise SocietyFormatError(f"{where}.matrix.kind: unknown kind {kind!r}")

    enforcement = None
    e = raw.get("enforcement")
    if e is not None:
        mode = _require(e, "mode", f"{where}.enforcement")
        if mode == BILATERAL:
            enforcement = EnforcementConfig.bilateral()
        elif mode == COMMUNITY:
            enforcement = EnforcementConfig.community(
                _require(e, "partition", f"{where}.enforcement"),
                _require(e, "kappa", f"{where}.enforcement"))
        elif mode == LEGAL:
            cost = _require(e, "cost", f"{where}.enforcement")
            enforcement = EnforcementConfig.legal(
                _require(cost, "k0", f"{where}.enforcement.cost"),
                _require(cost, "a", f"{where}.enforcement.cost"))
        else:
            raise SocietyFormatError(f"{where}.enforcement.mode: unknown mode {mode!r}")

    problems = validate(params, net, matrix, players, enforcement)
    if problems:
        raise SocietyFormatError(f"{where}: " + "; ".join(problems))
    return SocietyDocument(params, net, matrix, players, enforcement)


def society_to_dict(doc: SocietyDocument) -> dict:
    p = doc.params
    out: dict = {
        "params": {"alpha": p.alpha, "p": p.p, "v": p.v, "c": p.c,
                   "gamma": p.gamma, "delta": p.delta},
        "n": p.n_players,
        "edges": [list(e) for e in doc.network.sorted_edges()],
    }
    if any(t != PlayerType.from_params(p) for t in doc.players):
        out["players"] = [{"v": t.v, "c": t.c, "delta": t.delta,
                           "can_transfer": t.can_transfer, "group": t.group}
                          for t in doc.players]
    m = doc.matrix
    if m.kind == SUBSTITUTABLE:
        out["matrix"] = {"kind": m.kind, "p": m.p, "n_favor_types": m.n_favor_types}
    elif m.kind == MONOPOLISTIC:
        out["matrix"] = {"kind": m.kind, "p": m.p}
    else:
        out["matrix"] = {"kind": m.kind, "rows": [list(r) for r in m.rows],
                         "p_lower": m.p_lower}
    if doc.enforcement is not None:
        e = doc.enforcement
        if e.mode == BILATERAL:
            out["enforcement"] = {"mode": e.mode}
        elif e.mode == COMMUNITY:
            out["enforcement"] = {"mode": e.mode, "partition": [list(b) for b in e.partition],
                                  "kappa": e.kappa}
        else:
            out["enforcement"] = {"mode": e.mode,
                                  "cost": {"k0": e.cost_k0, "a": e.cost_a}}
    return out


def save_society(doc: SocietyDocument, path: str | Path) -> None:
    Path(path).write_text(json.dumps(society_to_dict(doc), indent=2) + "\n")


def load_network(path: str | Path) -> Network:
    """Load a network-only document: {"n": int, "edges": [[i,j], ...]}."""
    raw = json.loads(Path(path).read_text())
    net = Network.from_edges(int(_require(raw, "n", str(path))), raw.get("edges", []))
    for a, b in net.edges:
        if a == b:
            raise SocietyFormatError(f"{path}: self-loop at node {a}")
        if not (0 <= a < net.n and 0 <= b < net.n):
            raise SocietyFormatError(f"{path}: edge ({a},{b}) outside node range")
    return net


# --------------------------------------------------------------------------
# DOT export

_GROUP_SHAPES = ("circle", "box", "diamond", "triangle", "ellipse", "hexagon")


def export_dot(net: Network, types: Sequence[PlayerType] | None = None,
               name: str = "favors") -> str:
    """Render the network as an undirected DOT graph, shaped by group."""
    lines = [f"graph {name} {{"]
    if types is not None:
        groups = sorted({t.group for t in types})
        shape_of = {g: _GROUP_SHAPES[k % len(_GROUP_SHAPES)] for k, g in enumerate(groups)}
        for i in range(net.n):
            t = types[i]
            lines.append(f'  {i} [shape={shape_of[t.group]}, label="{i}", group="{t.group}"];')
    else:
        for i in range(net.n):
            lines.append(f'  {i} [shape=circle, label="{i}"];')
    for a, b in net.sorted_edges():
        lines.append(f"  {a} -- {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
