"""Command-line surface.

Machine-readable JSON goes to stdout, human summaries to stderr, so the
subcommands compose in pipelines. Exit codes: 0 on success (and, for
`check`, when the queried property holds), 1 when `check`'s queried
property fails, 2 on any usage or data error. All subcommands are
deterministic given their flags, including seeds.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import enforcement, model, oracle, stability, strong
from .simulate import AT_MOST_ONE, INDEPENDENT, SimConfig
from .simulate import simulate as run_simulation

_EXIT_TRUTH_TABLE = """\
exit codes:
  0  success; for `check`, the queried property holds
  1  `check` only: the queried property does not hold
  2  bad flags, unreadable file, or invariant violations

CSV schemas:
  bound --curve    n,lhs,rhs
  enforce tables   kappa,community_size,u_community,u_bilateral,u_legal
                   n_players,gamma_star,u_legal,u_bilateral,u_community
  oracle           graph_id,stable,strongly_stable,sst_transfers
"""


def _society_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--society", required=True, help="society JSON document")


def _emit(payload: dict, summary: str) -> None:
    print(json.dumps(payload, indent=2))
    print(summary, file=sys.stderr)


def _load(path: str) -> model.SocietyDocument:
    return model.load_society(path)


# --------------------------------------------------------------------------
# Subcommand handlers


def _cmd_bound(args) -> int:
    params = model.SocietyParams(n_players=2, alpha=args.alpha, p=args.p,
                                 v=args.v, c=args.c, gamma=args.gamma,
                                 delta=args.delta)
    problems = model.validate(params)
    if problems:
        raise model.SocietyFormatError("; ".join(problems))
    society = model.Society.homogeneous(params)
    b = stability.cooperation_bound(society)
    if args.curve:
        stability.write_bound_curve(args.curve, society, args.nmax or b + 6)
        print(f"curve written to {args.curve}", file=sys.stderr)
    print(f"B* = {b}")
    return 0


def _cmd_check(args) -> int:
    doc = _load(args.society)
    society, net = doc.society, doc.network
    report = stability.is_stable(net, society)
    payload: dict = {"stable": report.stable}
    if report.witness is not None:
        payload["unsustainable_link"] = list(report.witness)
    holds = report.stable
    if args.strong and report.stable:
        finder = (strong.find_violation_with_transfers if args.transfers
                  else strong.find_violation)
        witness = finder(net, society)
        payload["strongly_stable"] = witness is None
        if witness is not None:
            payload["violation"] = witness.to_json_dict()
        holds = witness is None
    elif args.strong:
        payload["strongly_stable"] = False
        holds = False
    summary = f"stable: {str(report.stable).lower()}"
    if args.strong:
        kind = "strongly stable (with transfers)" if args.transfers else "strongly stable"
        summary += f"; {kind}: {str(payload['strongly_stable']).lower()}"
    _emit(payload, summary)
    return 0 if holds else 1


def _group_blocks(society: model.Society) -> dict[str, list[int]]:
    blocks: dict[str, list[int]] = {}
    for i, t in enumerate(society.types):
        blocks.setdefault(t.group, []).append(i)
    return blocks


def _regular_candidate(society: model.Society, seed: int) -> model.Network:
    """Per-group degree-regular construction with a seeded relabeling."""
    rng = random.Random(seed)
    edges = []
    for group, members in sorted(_group_blocks(society).items()):
        m = len(members)
        bound = stability.bound_for_type(society, society.type_of(members[0]))
        degree = min(bound, m - 1)
        if (m * degree) % 2 == 1:
            degree -= 1
        shuffled = list(members)
        rng.shuffle(shuffled)
        if degree > 0:
            block = strong.build_regular_network(m, degree)
            edges += [(shuffled[a], shuffled[b]) for a, b in block.edges]
    return model.Network.from_edges(society.n, edges)


def _cmd_find_sst(args) -> int:
    doc = _load(args.society)
    society = doc.society
    if args.n is not None and args.n != society.n:
        raise model.SocietyFormatError(
            f"--n {args.n} conflicts with the document's {society.n} players")
    net = _regular_candidate(society, args.seed)
    finder = (strong.find_violation_with_transfers if society.transfer_capable()
              else strong.find_violation)
    witness = None
    iterations = 0
    for iterations in range(1, args.max_iters + 1):
        witness = finder(net, society)
        if witness is None:
            break
        net = witness.deviation.apply(net)
    payload = {"network": {"n": net.n, "edges": [list(e) for e in net.sorted_edges()]},
               "strongly_stable": witness is None,
               "iterations": iterations,
               "violation": None if witness is None else witness.to_json_dict(),
               "search": "heuristic construction + local repair; not exhaustive"}
    _emit(payload, "strongly stable network found" if witness is None
          else f"gave up after {iterations} repairs; last violation reported")
    return 0


def _cmd_simulate(args) -> int:
    doc = _load(args.society)
    deviation = None
    if args.deviate:
        parts = [int(x) for x in args.deviate.split(",")]
        if len(parts) != 3:
            raise model.SocietyFormatError("--deviate wants player,partner,period")
        deviation = (parts[0], parts[1], parts[2])
    config = SimConfig(periods=args.periods, seed=args.seed,
                       convention=args.convention, deviation=deviation)
    result = run_simulation(doc.network, doc.society, config,
                            event_log=args.log)
    _emit(result.to_json_dict(),
          f"{args.periods} periods, {result.events['provisions']} favors provided, "
          f"{result.events['refusals']} refused")
    return 0


def _cmd_enforce(args) -> int:
    doc = _load(args.society)
    society = doc.society
    k0, a = (float(x) for x in args.costfn.split(","))
    cost = enforcement.LegalCost(k0=k0, a=a)
    comparison = enforcement.compare_mechanisms(society, args.kappa, cost)
    payload = {
        "u_bilateral": comparison.u_bilateral,
        "u_community": comparison.u_community,
        "community_size": comparison.community_size,
        "u_legal": comparison.u_legal,
        "gamma_star": comparison.gamma_star,
        "winner": comparison.winner,
        "kappa_p": comparison.kappa_p,
        "kappa_l": comparison.kappa_l,
    }
    if args.ngrid:
        grid = tuple(int(x) for x in args.ngrid.split(","))
        report = enforcement.population_analysis(society, cost, grid, kappa=args.kappa)
        payload["population"] = {
            "rows": [{"n": r.n_players, "gamma_star": r.gamma_star,
                      "u_legal": r.u_legal, "u_bilateral": r.u_bilateral,
                      "u_community": r.u_community} for r in report.rows],
            "n_bar": report.n_bar, "n_bar_kappa": report.n_bar_kappa}
        if args.pop_table:
            enforcement.write_population_table(args.pop_table, report)
    if args.kappa_table:
        kappas = tuple(args.kappa * (k + 1) / 10 for k in range(20))
        enforcement.write_kappa_table(args.kappa_table, society, cost, kappas)
    _emit(payload, f"winner: {comparison.winner}")
    return 0


def _cmd_stratify(args) -> int:
    doc = _load(args.society)
    summary = strong.classify_stratification(doc.network, doc.society)
    payload = {g: {"size": s.size, "bound": s.bound,
                   "fraction_at_bound": s.fraction_at_bound,
                   "cross_links": s.cross_links,
                   "degree_histogram": {str(k): v for k, v in s.degree_histogram.items()}}
               for g, s in summary.items()}
    lines = ", ".join(f"{g}: at-bound {s.fraction_at_bound:.2f}, cross {s.cross_links}"
                      for g, s in summary.items())
    _emit(payload, lines)
    return 0


def _cmd_oracle(args) -> int:
    doc = _load(args.society)
    scope = oracle.EnumerationScope(n=args.nmax,
                                    dedupe="classes" if args.classes else "labeled")
    if args.nmax != doc.society.n:
        raise model.SocietyFormatError(
            f"--nmax {args.nmax} conflicts with the document's {doc.society.n} players")
    verdicts = oracle.classify_all(scope, doc.society)
    if args.output:
        oracle.write_classification_csv(args.output, verdicts)
        print(f"{len(verdicts)} graphs classified -> {args.output}", file=sys.stderr)
    else:
        print("graph_id,stable,strongly_stable,sst_transfers")
        for v in verdicts:
            sst = "" if v.sst_transfers is None else int(v.sst_transfers)
            print(f"{v.graph_id},{int(v.stable)},{int(v.strongly_stable)},{sst}")
    return 0


def _cmd_export_dot(args) -> int:
    doc = _load(args.society)
    text = model.export_dot(doc.network, doc.players)
    with open(args.output, "w") as fh:
        fh.write(text)
    print(f"DOT written to {args.output}", file=sys.stderr)
    return 0


# --------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="favornet",
        description="Favor-exchange network analysis: cooperation bounds, "
                    "stability, enforcement comparison, simulation, oracles.",
        epilog=_EXIT_TRUTH_TABLE,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("bound", help="cooperation bound B* from raw parameters")
    for flag in ("alpha", "p", "v", "c", "gamma", "delta"):
        sub.add_argument(f"--{flag}", type=float, required=True)
    sub.add_argument("--curve", help="write the trade-off curve CSV here")
    sub.add_argument("--nmax", type=int, help="curve rows (default B*+6)")
    sub.set_defaults(handler=_cmd_bound)

    sub = subs.add_parser("check", help="stability / strong-stability report")
    _society_args(sub)
    sub.add_argument("--strong", action="store_true")
    sub.add_argument("--transfers", action="store_true")
    sub.set_defaults(handler=_cmd_check)

    sub = subs.add_parser("find-sst", help="heuristic search for a strongly "
                                           "stable network (not exhaustive)")
    _society_args(sub)
    sub.add_argument("--n", type=int, help="must match the document size")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--max-iters", type=int, default=50)
    sub.set_defaults(handler=_cmd_find_sst)

    sub = subs.add_parser("simulate", help="seeded protocol simulation")
    _society_args(sub)
    sub.add_argument("--periods", type=int, required=True)
    sub.add_argument("--seed", type=int, required=True)
    sub.add_argument("--convention", default=INDEPENDENT,
                     choices=[INDEPENDENT, AT_MOST_ONE])
    sub.add_argument("--deviate", help="player,partner,period one-shot refusal")
    sub.add_argument("--log", help="line-delimited event log path")
    sub.set_defaults(handler=_cmd_simulate)

    sub = subs.add_parser("enforce", help="compare enforcement mechanisms")
    _society_args(sub)
    sub.add_argument("--mode", default="compare", choices=["compare"])
    sub.add_argument("--kappa", type=float, required=True)
    sub.add_argument("--costfn", required=True, metavar="k0,a")
    sub.add_argument("--ngrid", help="population sizes, comma-separated")
    sub.add_argument("--kappa-table", help="write the kappa sweep CSV here")
    sub.add_argument("--pop-table", help="write the population CSV here")
    sub.set_defaults(handler=_cmd_enforce)

    sub = subs.add_parser("stratify", help="per-group stratification summary")
    _society_args(sub)
    sub.set_defaults(handler=_cmd_stratify)

    sub = subs.add_parser("oracle", help="brute-force classification CSV")
    _society_args(sub)
    sub.add_argument("--nmax", type=int, default=6)
    sub.add_argument("--classes", action="store_true",
                     help="isomorphism classes instead of labeled graphs")
    sub.add_argument("-o", "--output")
    sub.set_defaults(handler=_cmd_oracle)

    sub = subs.add_parser("export-dot", help="DOT export, node shapes by group")
    _society_args(sub)
    sub.add_argument("-o", "--output", required=True)
    sub.set_defaults(handler=_cmd_export_dot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (model.SocietyFormatError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
