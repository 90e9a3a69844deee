"""Expected utilities, deviation gaps and Nash's improvement map."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..game import Game
from ..rational import format_rational
from ..symmetry import StrategyProfile


def _vectors(game: Game, s: StrategyProfile):
    if s.exact:
        return game.exact_tensors, [np.array([Fraction(p) for p in v], dtype=object)
                                    for v in s.strategies]
    return game.tensors, [np.array(v, dtype=float) for v in s.strategies]


def action_values(tensor: np.ndarray, vectors, player: int) -> np.ndarray:
    """``u^i(a, s_-i)`` for every action ``a`` of ``player``."""
    T = tensor
    for j in reversed(range(len(vectors))):
        if j != player:
            T = np.tensordot(T, vectors[j], axes=([j], [0]))
    return T


def all_action_values(game: Game, s: StrategyProfile) -> list[np.ndarray]:
    tensors, vecs = _vectors(game, s)
    return [action_values(tensors[i], vecs, i) for i in range(game.num_players)]


@dataclass(frozen=True)
class DeviationReport:
    """Deviation gaps ``g(s,i,a) = u^i(a, s_-i) - u^i(s)`` of a profile.

    ``epsilon`` is the largest gap (the profile is an epsilon-NE for any
    larger epsilon). ``ws_epsilon`` is the largest shortfall of a played
    action against that player's best action.
    """

    values: tuple
    action_values: tuple[tuple, ...]
    gaps: tuple[tuple, ...]
    epsilon: float | Fraction
    ws_epsilon: float | Fraction
    exact: bool

    def is_nash(self, eps=0) -> bool:
        return self.epsilon <= eps

    def is_well_supported(self, eps=0) -> bool:
        return self.ws_epsilon <= eps

    def to_dict(self) -> dict:
        fmt = format_rational if self.exact else float
        return {"epsilon": fmt(self.epsilon), "ws_epsilon": fmt(self.ws_epsilon),
                "values": [fmt(v) for v in self.values],
                "gaps": [[fmt(g) for g in row] for row in self.gaps]}


def deviation_report(game: Game, s: StrategyProfile) -> DeviationReport:
    s.validate(game)
    tensors, vecs = _vectors(game, s)
    zero = Fraction(0) if s.exact else 0.0
    values, avs, gaps = [], [], []
    eps, ws = zero, zero
    for i in range(game.num_players):
        av = action_values(tensors[i], vecs, i)
        v = np.dot(av, vecs[i])
        g = av - v
        best = max(av)
        eps = max(eps, max(g))
        for a, p in enumerate(s.strategies[i]):
            if p > 0:
                ws = max(ws, best - av[a])
        values.append(v)
        avs.append(tuple(av))
        gaps.append(tuple(g))
    if not s.exact:
        values = [float(v) for v in values]
        avs = [tuple(float(x) for x in row) for row in avs]
        gaps = [tuple(float(x) for x in row) for row in gaps]
        eps, ws = float(eps), float(ws)
    return DeviationReport(tuple(values), tuple(avs), tuple(gaps), eps, ws, s.exact)


def nash_function(game: Game, s: StrategyProfile) -> StrategyProfile:
    """Nash's map ``F``: shift mass toward actions with positive gap."""
    report = deviation_report(game, s)
    zero = Fraction(0) if s.exact else 0.0
    out = []
    for i, row in enumerate(s.strategies):
        plus = [max(zero, g) for g in report.gaps[i]]
        denom = 1 + sum(plus)
        out.append(tuple((p + q) / denom for p, q in zip(row, plus)))
    return StrategyProfile(tuple(out))


def profile_distance(s: StrategyProfile, t: StrategyProfile) -> float:
    return max(abs(float(a) - float(b)) for a, b in zip(s.flat(), t.flat()))
