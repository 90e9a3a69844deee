"""Exact support enumeration in orbit coordinates (two-player games)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from ..errors import InvalidOrbits, Unsupported
from ..game import Game
from ..rational import solve_linear
from ..symmetry import OrbitPartition, StrategyProfile
from .deviation import deviation_report
from .polytope import orbit_to_profile


@dataclass(frozen=True)
class OrbitEquilibrium:
    profile: StrategyProfile
    r: tuple[Fraction, ...]
    support: tuple[int, ...]
    degenerate: bool
    values: tuple[Fraction, ...]


@dataclass
class EnumerationReport:
    equilibria: list[OrbitEquilibrium] = field(default_factory=list)
    supports_tried: int = 0
    inconsistent: int = 0
    degenerate: int = 0


def _orbit_payoff_rows(game: Game, orbits: OrbitPartition):
    """Row ``w``: coefficients of ``u^{i(w)}(a_w, s_-i)`` as a linear form in ``r``."""
    rows = []
    for w, rep in enumerate(orbits.representatives):
        i = orbits.rep_player[w]
        j = 1 - i
        k = game.local(rep)
        U = game.payoffs[i]
        coef = [Fraction(0)] * orbits.num_orbits
        for b in range(game.action_counts[j]):
            prof = (k, b) if i == 0 else (b, k)
            flat = prof[0] * game.action_counts[1] + prof[1]
            gb = game.global_id(j, b)
            wb = orbits.orbit_of[gb]
            coef[wb] += U[flat] / orbits.cardinality[wb]
        rows.append(coef)
    return rows


def support_enumeration_details(game: Game, orbits: OrbitPartition) -> EnumerationReport:
    if game.num_players != 2:
        raise Unsupported("orbit support enumeration needs exactly two players")
    if orbits.action_counts != game.action_counts:
        raise InvalidOrbits("orbit partition was built for a different game")
    W = orbits.num_orbits
    classes = orbits.classes
    class_of = [0] * W
    for ci, cls in enumerate(classes):
        for w in cls:
            class_of[w] = ci
    rows = _orbit_payoff_rows(game, orbits)
    report = EnumerationReport()
    seen = set()
    for size in range(1, W + 1):
        for support in combinations(range(W), size):
            if any(not set(cls) & set(support) for cls in classes):
                continue
            report.supports_tried += 1
            nS, nC = len(support), len(classes)
            # unknowns: r_w for w in support, then one value t_C per class
            A, b = [], []
            for ci, cls in enumerate(classes):
                A.append([Fraction(int(class_of[w] == ci)) for w in support] + [Fraction(0)] * nC)
                b.append(Fraction(1))
            for w in support:
                row = [rows[w][u] for u in support] + [Fraction(0)] * nC
                row[nS + class_of[w]] = Fraction(-1)
                A.append(row)
                b.append(Fraction(0))
            solved = solve_linear(A, b)
            if solved is None:
                report.inconsistent += 1
                continue
            x, rank = solved
            degenerate = rank < nS + nC
            if degenerate:
                report.degenerate += 1
            r = [Fraction(0)] * W
            for k, w in enumerate(support):
                r[w] = x[k]
            t = x[nS:]
            if any(v < 0 for v in r):
                continue
            if any(sum(rows[w][u] * r[u] for u in range(W)) > t[class_of[w]]
                   for w in range(W) if w not in support):
                continue
            profile = orbit_to_profile(orbits, r)
            dev = deviation_report(game, profile)
            if dev.epsilon != 0:
                continue
            key = tuple(profile.flat())
            if key in seen:
                continue
            seen.add(key)
            report.equilibria.append(
                OrbitEquilibrium(profile, tuple(r), support, degenerate, tuple(dev.values)))
    return report


def support_enumeration_orbits(game: Game, orbits: OrbitPartition) -> list[StrategyProfile]:
    """All symmetry-respecting equilibria found by exact orbit-support enumeration."""
    return [e.profile for e in support_enumeration_details(game, orbits).equilibria]
