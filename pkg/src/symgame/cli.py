"""Command-line interface: ``symgame analyze|orbits|solve|iso|check|gen``.

Exit codes: 0 success, 1 certification failed, 2 unreadable or malformed
input, 3 precondition violated, 4 search budget exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import errors
from .equilibrium import (deviation_report, solve_fixed_point, support_enumeration_details,
                          team_gradient, zero_sum_symmetric)
from .game import (Game, bimatrix, game_from_graph, gen_chicken, gen_coordination,
                   gen_matching_pennies, gen_rps_extension, gen_zero_sum_embedding,
                   graphs_to_zero_sum_game, game_to_dict, load_game)
from .graph import find_isomorphism, full_symmetry_group, graph_from_dict, player_symmetries
from .rational import format_rational, to_fraction
from .symmetry import (OrbitPartition, StrategyProfile, default_closure_cap, group_closure,
                       is_totally_symmetric, load_generators, one_player_action_symmetries,
                       orbits_from_dict, orbits_from_generators, profile_from_dict, respects)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_PARSE, EXIT_PRECONDITION, EXIT_BUDGET = 0, 1, 2, 3, 4

PARSE_ERRORS = (errors.InvalidGame, errors.InvalidProfile, errors.InvalidOrbits,
                errors.InvalidCandidate, json.JSONDecodeError, OSError, KeyError, TypeError)
PRECONDITION_ERRORS = (errors.NotTeamGame, errors.NotZeroSum, errors.Unsupported,
                       errors.UnsupportedDegenerate, errors.InvalidParameter, errors.TooLarge,
                       errors.NotInDomain)
BUDGET_ERRORS = (errors.BudgetExhausted,)


class Report:
    """Collects the run report; printed as text or JSON at the end."""

    def __init__(self, argv: list[str]):
        self.command = argv
        self.inputs: dict[str, str] = {}
        self.outputs: dict = {}
        self.lines: list[str] = []
        self.start = time.perf_counter()

    def digest(self, path) -> None:
        self.inputs[str(path)] = hashlib.sha256(Path(path).read_bytes()).hexdigest()

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def emit(self, status: int, as_json: bool, error: str | None = None) -> None:
        if as_json:
            doc = {"command": self.command, "inputs": self.inputs,
                   "elapsed_seconds": round(time.perf_counter() - self.start, 6),
                   "outputs": self.outputs, "status": status}
            if error:
                doc["error"] = error
            print(json.dumps(doc, indent=2))
            return
        for line in self.lines:
            print(line)
        if error:
            print(f"error: {error}", file=sys.stderr)


def _read_json(path, report: Report):
    report.digest(path)
    with open(path) as fh:
        return json.load(fh)


def _load_game(path, report: Report) -> Game:
    report.digest(path)
    return load_game(path)


def _generator_lines(group) -> list[str]:
    return ["  " + g.cycles() + f"  players {list(g.pi)}" for g in group.generators]


def _orbit_text(orbits: OrbitPartition) -> list[str]:
    return [f"  {list(o)}  c={c}  players={sorted(inc)}"
            for o, c, inc in zip(orbits.orbits, orbits.cardinality, orbits.incidence)]


def _group_order(group) -> tuple[int, bool]:
    """Order and whether explicit closure confirmed it."""
    try:
        return len(group_closure(group, default_closure_cap())), True
    except errors.CapExceeded:
        return group.order, False


def _resolve_orbits(args, game: Game, report: Report) -> OrbitPartition:
    if getattr(args, "full", False):
        return full_symmetry_group(game).orbits()
    if getattr(args, "orbits", None):
        return orbits_from_dict(_read_json(args.orbits, report), game.action_counts)
    return OrbitPartition.singletons(game.action_counts)


# -- commands -----------------------------------------------------------------

def cmd_analyze(args, report: Report) -> int:
    game = _load_game(args.game, report)
    ts = is_totally_symmetric(game)
    one = one_player_action_symmetries(game)
    players = player_symmetries(game)
    report.say(f"players: {game.num_players}  actions: {list(game.action_counts)}")
    report.say(f"totally symmetric: {str(ts).lower()}")
    report.say(f"one-player action symmetries: {len(one.generators)} generators")
    report.lines += _generator_lines(one)
    report.say(f"player symmetries: order {players.order}, {len(players.generators)} generators")
    report.lines += _generator_lines(players)
    out = {"totally_symmetric": ts, "one_player_action_generators": one.to_dict()["generators"],
           "player_symmetries": players.to_dict()}
    try:
        full = full_symmetry_group(game)
    except errors.UnsupportedDegenerate as exc:
        report.say(f"warning: {exc}; full group skipped")
        out["warning"] = str(exc)
        report.outputs = out
        return EXIT_OK
    order, confirmed = _group_order(full)
    orbits = full.orbits()
    report.say(f"full group: order {order}{'' if confirmed else ' (closure cap reached; order from search)'}"
               f", {len(full.generators)} generators")
    report.lines += _generator_lines(full)
    report.say(f"orbits: {orbits.num_orbits}")
    report.lines += _orbit_text(orbits)
    out.update({"full_group": {**full.to_dict(), "order": order, "closure_confirmed": confirmed},
                "orbits": orbits.to_dict()})
    report.outputs = out
    return EXIT_OK


def cmd_orbits(args, report: Report) -> int:
    game = _load_game(args.game, report)
    if args.full:
        orbits = full_symmetry_group(game).orbits()
    else:
        report.digest(args.symmetries)
        orbits = orbits_from_generators(game.action_counts,
                                        load_generators(args.symmetries, game.action_counts))
    doc = orbits.to_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(doc) + "\n")
    report.say(f"orbits: {orbits.num_orbits}")
    report.lines += _orbit_text(orbits)
    report.outputs = doc
    return EXIT_OK


def _certify(game: Game, profile: StrategyProfile, orbits: OrbitPartition, eps: float,
             well_supported: bool = False) -> tuple[bool, dict]:
    dev = deviation_report(game, profile)
    ok_eq = dev.is_well_supported(eps) if well_supported else dev.is_nash(eps)
    ok_resp = respects(profile, orbits)
    return ok_eq and ok_resp, {"deviation": dev.to_dict(), "respects": ok_resp,
                               "equilibrium": ok_eq}


def _profile_text(profile: StrategyProfile) -> str:
    def fmt(p):
        return str(format_rational(p)) if isinstance(p, (Fraction, int)) else f"{p:.10g}"
    return "  " + " | ".join(" ".join(fmt(p) for p in s) for s in profile.strategies)


def cmd_solve(args, report: Report) -> int:
    game = _load_game(args.game, report)
    eps = args.epsilon
    method = args.method
    orbits = (OrbitPartition.singletons(game.action_counts) if method == "zero-sum-reg"
              else _resolve_orbits(args, game, report))
    extra: dict = {}
    ws = False
    if method == "orbit-support":
        details = support_enumeration_details(game, orbits)
        profiles = [e.profile for e in details.equilibria]
        extra = {"supports_tried": details.supports_tried, "inconsistent": details.inconsistent,
                 "degenerate": [e.degenerate for e in details.equilibria]}
        if not profiles:
            raise errors.BudgetExhausted("no symmetry-respecting equilibrium found")
    elif method == "fixed-point":
        profiles = [solve_fixed_point(game, orbits, eps, seeds=args.seeds, seed=args.seed)]
    elif method == "team-gradient":
        profile, cert = team_gradient(game, orbits, eps / 2, seed=args.seed or None)
        profiles = [profile]
        extra = {"kkt": cert.to_dict()}
        ws = True
    else:
        sol = zero_sum_symmetric(game, tol=min(eps, 1e-8))
        profiles = [sol.profile]
        extra = {"value": format_rational(sol.value) if sol.exact else sol.value,
                 "rho": format_rational(sol.rho) if sol.exact else sol.rho}
    results, all_ok = [], True
    for p in profiles:
        ok, cert = _certify(game, p, orbits, eps, ws)
        all_ok &= ok
        results.append({"profile": p.to_dict(), **cert})
    report.say(f"method: {method}  orbits: {orbits.num_orbits}  solutions: {len(profiles)}")
    for p, r in zip(profiles, results):
        report.say(_profile_text(p))
        report.say(f"  epsilon {r['deviation']['epsilon']}  values {r['deviation']['values']}"
                   f"  respects {str(r['respects']).lower()}")
    for key, val in extra.items():
        if key == "kkt":
            report.say(f"kkt residual {val['residual']:.3g} after {val['iterations']} iterations")
        else:
            report.say(f"{key}: {val}")
    if args.out:
        Path(args.out).write_text(json.dumps(profiles[0].to_dict()) + "\n")
    report.outputs = {"method": method, "orbits": orbits.to_dict(), "solutions": results, **extra}
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def cmd_iso(args, report: Report) -> int:
    g1 = _load_game(args.game1, report)
    g2 = _load_game(args.game2, report)
    coset = find_isomorphism(g1, g2)
    report.say("isomorphic: " + ("no" if coset.empty else "yes"))
    if not coset.empty:
        rep = coset.representative
        report.say(f"representative: phi {list(rep.phi)}  players {list(rep.pi)}")
    report.say(f"symmetry group of first game: order {coset.group.order}, "
               f"{len(coset.group.generators)} generators")
    report.lines += _generator_lines(coset.group)
    report.outputs = coset.to_dict()
    return EXIT_OK


def cmd_check(args, report: Report) -> int:
    game = _load_game(args.game, report)
    profile = profile_from_dict(_read_json(args.profile, report))
    profile.validate(game, tol=1e-9)
    orbits = _resolve_orbits(args, game, report)
    ok, cert = _certify(game, profile, orbits, args.epsilon)
    dev = cert["deviation"]
    report.say(f"epsilon-hat: {dev['epsilon']}  (tolerance {args.epsilon})")
    report.say(f"values: {dev['values']}")
    report.say(f"equilibrium: {'pass' if cert['equilibrium'] else 'fail'}")
    report.say(f"respects orbits: {'pass' if cert['respects'] else 'fail'}")
    report.outputs = cert
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _matrix(text: str, report: Report):
    if Path(text).is_file():
        data = _read_json(text, report)
    else:
        data = json.loads(text)
    return [[to_fraction(v) for v in row] for row in data]


def _graph(path: str, report: Report):
    return graph_from_dict(_read_json(path, report))


def cmd_gen(args, report: Report) -> int:
    kind, params = args.kind, args.params
    if kind == "rps":
        if len(params) != 2:
            raise errors.InvalidParameter("rps needs N and m")
        game = gen_rps_extension(int(params[0]), int(params[1]))
    elif kind == "coord":
        if not params:
            raise errors.InvalidParameter("coord needs at least one value")
        game = gen_coordination([to_fraction(p) for p in params])
    elif kind == "mp":
        game = gen_matching_pennies()
    elif kind == "chicken":
        game = gen_chicken()
    elif kind == "embed":
        if len(params) not in (1, 2):
            raise errors.InvalidParameter("embed needs A and optionally B (default -A)")
        A = _matrix(params[0], report)
        if len(params) == 2:
            game = gen_zero_sum_embedding(A, _matrix(params[1], report))
        else:
            game = gen_zero_sum_embedding(A, [[-v for v in r] for r in A], require_positive=False)
    elif kind == "bimatrix":
        if len(params) != 2:
            raise errors.InvalidParameter("bimatrix needs A and B")
        game = bimatrix(_matrix(params[0], report), _matrix(params[1], report))
    elif kind == "from-graph":
        if len(params) != 1:
            raise errors.InvalidParameter("from-graph needs a graph file")
        kw = {}
        if args.c:
            kw["c"] = args.c
        if args.d:
            kw["d"] = args.d
        game = game_from_graph(_graph(params[0], report), **kw)
    elif kind == "zerosum-from-graphs":
        if len(params) != 2:
            raise errors.InvalidParameter("zerosum-from-graphs needs two graph files")
        game = graphs_to_zero_sum_game(_graph(params[0], report), _graph(params[1], report))
    else:
        raise errors.InvalidParameter(f"unknown generator {kind!r}")
    doc = game_to_dict(game)
    text = json.dumps(doc)
    if args.out:
        Path(args.out).write_text(text + "\n")
        report.say(f"wrote {args.out}: players {game.num_players}, actions {list(game.action_counts)}")
    else:
        report.say(text)
    report.outputs = doc
    return EXIT_OK


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symgame", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="emit a machine-readable run report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="report symmetry structure of a game")
    p.add_argument("game")

    p = sub.add_parser("orbits", help="orbit partition from symmetries")
    p.add_argument("game")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--symmetries", help="JSON file with one or more symmetries")
    grp.add_argument("--full", action="store_true", help="use the full symmetry group")
    p.add_argument("--out")

    p = sub.add_parser("solve", help="find a symmetry-respecting equilibrium")
    p.add_argument("game")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--orbits", help="orbit JSON file")
    grp.add_argument("--full", action="store_true", help="use orbits of the full group")
    p.add_argument("--method", required=True,
                   choices=["fixed-point", "orbit-support", "team-gradient", "zero-sum-reg"])
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=8, help="multi-start budget for fixed-point")
    p.add_argument("--out", help="write the (first) profile here")

    p = sub.add_parser("iso", help="isomorphisms between two games")
    p.add_argument("game1")
    p.add_argument("game2")

    p = sub.add_parser("check", help="certify a profile")
    p.add_argument("game")
    p.add_argument("--profile", required=True)
    p.add_argument("--epsilon", type=float, default=1e-9)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--orbits")
    grp.add_argument("--full", action="store_true")

    p = sub.add_parser("gen", help="write a generated game")
    p.add_argument("kind", choices=["rps", "coord", "mp", "chicken", "embed", "bimatrix",
                                    "from-graph", "zerosum-from-graphs"])
    p.add_argument("params", nargs="*")
    p.add_argument("--c", nargs=4, help="payoffs of player 1 for from-graph")
    p.add_argument("--d", nargs=4, help="payoffs of player 2 for from-graph")
    p.add_argument("--out")
    return parser


COMMANDS = {"analyze": cmd_analyze, "orbits": cmd_orbits, "solve": cmd_solve, "iso": cmd_iso,
            "check": cmd_check, "gen": cmd_gen}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    report = Report(argv)
    try:
        status = COMMANDS[args.command](args, report)
        error = None
    except BUDGET_ERRORS as exc:
        status, error = EXIT_BUDGET, str(exc)
    except PRECONDITION_ERRORS as exc:
        status, error = EXIT_PRECONDITION, str(exc)
    except PARSE_ERRORS as exc:
        status, error = EXIT_PARSE, f"{type(exc).__name__}: {exc}"
    report.emit(status, args.json, error)
    return status


if __name__ == "__main__":
    sys.exit(main())
