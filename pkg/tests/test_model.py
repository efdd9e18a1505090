"""Data-type invariants, validation, JSON round-trips, DOT export."""

from __future__ import annotations

import json
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from favornet.model import (
    FavorMatrix,
    Network,
    PlayerType,
    SocietyFormatError,
    export_dot,
    load_network,
    load_society,
    save_society,
    society_from_dict,
    society_to_dict,
    validate,
)

from conftest import fig1_params, fig2_params


def test_validate_accepts_valid_document():
    params = fig1_params(5)
    net = Network.empty(5)
    matrix = FavorMatrix.substitutable(0.2, 5)
    assert validate(params, net, matrix) == []


def test_validate_gamma_must_stay_below_cost():
    bad = replace(fig1_params(5), c=1.0, gamma=1.0)
    problems = validate(bad)
    assert any("gamma < c" in p for p in problems)


def test_validate_monopolistic_needs_square_matrix():
    params = fig1_params(3)
    matrix = FavorMatrix(kind="monopolistic", n_players=3, n_favor_types=4, p=0.2)
    problems = validate(params, matrix=matrix)
    assert any("|N| = |F|" in p for p in problems)


def test_validate_flags_self_loop_and_range():
    params = fig1_params(3)
    net = Network.from_edges(3, [(2, 2), (1, 5)])
    problems = validate(params, net)
    assert any("self-loop" in p for p in problems)
    assert any("outside node range" in p for p in problems)


def test_validate_general_matrix_floor():
    params = fig1_params(2)
    matrix = FavorMatrix.general([[0.0, 0.5], [0.3, 0.0]], p_lower=0.4)
    problems = validate(params, matrix=matrix)
    assert any("below p_lower" in p for p in problems)
    empty_row = FavorMatrix.general([[0.5, 0.5], [0.0, 0.0]])
    assert any("at least one positive" in p
               for p in validate(params, matrix=empty_row))


def test_minimal_document_defaults(tmp_path):
    doc_path = tmp_path / "soc.json"
    doc_path.write_text(json.dumps({
        "params": {"alpha": 0.1, "p": 0.2, "v": 5.3, "c": 1.5,
                   "gamma": 1.0, "delta": 0.95},
        "n": 5}))
    doc = load_society(doc_path)
    assert doc.network.edges == frozenset()
    assert doc.matrix.kind == "substitutable" and doc.matrix.p == 0.2
    assert len(doc.players) == 5
    assert all(t == PlayerType(v=5.3, c=1.5, delta=0.95) for t in doc.players)
    assert doc.enforcement is None


def test_self_loop_document_rejected(tmp_path):
    doc_path = tmp_path / "soc.json"
    doc_path.write_text(json.dumps({
        "params": {"alpha": 0.1, "p": 0.2, "v": 5.3, "c": 1.5,
                   "gamma": 1.0, "delta": 0.95},
        "n": 5, "edges": [[2, 2]]}))
    with pytest.raises(SocietyFormatError, match="self-loop"):
        load_society(doc_path)


def test_two_group_document_loads(tmp_path):
    raw = {
        "params": {"alpha": 0.1, "p": 0.1, "v": 9, "c": 1.3,
                   "gamma": 0, "delta": 0.95},
        "n": 4,
        "edges": [[0, 1]],
        "players": [
            {"c": 1.0, "can_transfer": True, "group": "rich"},
            {"c": 1.0, "can_transfer": True, "group": "rich"},
            {"group": "poor"},
            {"group": "poor"},
        ],
    }
    path = tmp_path / "het.json"
    path.write_text(json.dumps(raw))
    doc = load_society(path)
    groups = {t.group for t in doc.players}
    assert groups == {"rich", "poor"}
    assert doc.players[0].c == 1.0 and doc.players[2].c == 1.3
    assert doc.players[0].can_transfer and not doc.players[2].can_transfer


def test_parse_error_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"params": {\n  "alpha": }')
    with pytest.raises(SocietyFormatError, match="line 2"):
        load_society(path)


def test_missing_field_reported(tmp_path):
    path = tmp_path / "short.json"
    path.write_text(json.dumps({"params": {"alpha": 0.1}, "n": 2}))
    with pytest.raises(SocietyFormatError, match="params"):
        load_society(path)


def test_round_trip_identity(tmp_path):
    raw = {
        "params": {"alpha": 0.15, "p": 0.25, "v": 7, "c": 1, "gamma": 0,
                   "delta": 0.99},
        "n": 4,
        "edges": [[0, 1], [2, 3]],
        "players": [{"v": 7.0, "c": 0.5, "delta": 0.99, "can_transfer": True,
                     "group": "a"}] * 4,
        "matrix": {"kind": "general", "rows": [[0.3, 0.7], [0.3, 0.7],
                                               [0.0, 0.7], [0.3, 0.0]],
                   "p_lower": 0.3},
        "enforcement": {"mode": "community", "partition": [[0, 1], [2, 3]],
                        "kappa": 0.01},
    }
    doc = society_from_dict(raw)
    path = tmp_path / "round.json"
    save_society(doc, path)
    doc2 = load_society(path)
    assert doc2 == doc
    # and the dict form is fixed-point
    assert society_to_dict(doc2) == society_to_dict(doc)


def test_network_only_document(tmp_path):
    path = tmp_path / "net.json"
    path.write_text(json.dumps({"n": 4, "edges": [[0, 1], [1, 3]]}))
    net = load_network(path)
    assert net.degree(1) == 2 and net.degree(2) == 0


def test_add_then_remove_is_identity():
    net = Network.from_edges(4, [(0, 1), (2, 3)])
    assert net.add_edge(1, 2).remove_edge(2, 1) == net
    with pytest.raises(ValueError):
        net.remove_edge(0, 3)


@settings(max_examples=50)
@given(st.integers(2, 8), st.data())
def test_degree_bookkeeping_under_edits(n, data):
    net = Network.empty(n)
    mirror: set[tuple[int, int]] = set()
    for _ in range(data.draw(st.integers(0, 12))):
        i = data.draw(st.integers(0, n - 1))
        j = data.draw(st.integers(0, n - 1))
        if i == j:
            continue
        e = (min(i, j), max(i, j))
        if e in mirror:
            mirror.discard(e)
            net = net.remove_edge(i, j)
        else:
            mirror.add(e)
            net = net.add_edge(i, j)
    assert net.edges == frozenset(mirror)
    for v in range(n):
        assert net.degree(v) == len(net.neighbors(v))
        assert net.degree(v) == sum(1 for e in mirror if v in e)


def test_dot_export_shapes_by_group():
    net = Network.from_edges(3, [(0, 1)])
    types = (PlayerType(9, 1.0, 0.95, group="rich"),
             PlayerType(9, 1.3, 0.95, group="poor"),
             PlayerType(9, 1.3, 0.95, group="poor"))
    dot = export_dot(net, types)
    assert dot.startswith("graph")
    assert "0 -- 1;" in dot
    shapes = {line.split("shape=")[1].split(",")[0]
              for line in dot.splitlines() if "shape=" in line}
    assert len(shapes) == 2  # one shape per group


def test_fig2_matrix_consistency_flagged():
    params = fig2_params(4)
    matrix = FavorMatrix.substitutable(0.5, 4)
    assert any("inconsistent" in p for p in validate(params, matrix=matrix))
