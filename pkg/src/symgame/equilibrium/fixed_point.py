"""Multi-start search for certified symmetry-respecting equilibria of any game.

The fixed points of Nash's map ``F`` are the profiles with no positive
deviation gap, so the search minimizes the smooth residual
``sum max(0, g)^2`` over D in orbit coordinates. Candidates are polished on
their support by solving the indifference equations and are returned only
once :func:`deviation_report` certifies them.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.optimize import least_squares, minimize

from ..errors import BudgetExhausted, InvalidOrbits, InvalidParameter
from ..game import Game
from ..symmetry import OrbitPartition, StrategyProfile
from .deviation import action_values, deviation_report

SUPPORT_TOL = 1e-7


class _OrbitSpace:
    """Profiles of D written as one value per orbit (``s(a) = x_w``)."""

    def __init__(self, game: Game, orbits: OrbitPartition):
        self.game = game
        self.orbits = orbits
        self.index = np.asarray(orbits.orbit_of)
        self.card = np.asarray(orbits.cardinality, dtype=float)
        self.classes = [list(c) for c in orbits.classes]
        self.offsets = list(game.offsets) + [game.num_actions]

    def flat(self, x: np.ndarray) -> np.ndarray:
        return x[self.index]

    def vectors(self, x: np.ndarray) -> list[np.ndarray]:
        f = self.flat(x)
        return [f[self.offsets[i]: self.offsets[i + 1]] for i in range(self.game.num_players)]

    def gaps(self, x: np.ndarray) -> np.ndarray:
        vecs = self.vectors(x)
        out = []
        for i in range(self.game.num_players):
            av = action_values(self.game.tensors[i], vecs, i)
            out.append(av - av @ vecs[i])
        return np.concatenate(out)

    def action_values(self, x: np.ndarray) -> np.ndarray:
        vecs = self.vectors(x)
        return np.concatenate([action_values(self.game.tensors[i], vecs, i)
                               for i in range(self.game.num_players)])

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        x = np.empty(self.orbits.num_orbits)
        for cls in self.classes:
            r = rng.dirichlet(np.ones(len(cls)))
            x[cls] = r / self.card[cls]
        return x

    def uniform_point(self) -> np.ndarray:
        return self.flat_to_x(np.concatenate(
            [np.full(m, 1.0 / m) for m in self.game.action_counts]))

    def flat_to_x(self, flat: np.ndarray) -> np.ndarray:
        return np.array([flat[o[0]] for o in self.orbits.orbits])

    def renormalize(self, x: np.ndarray) -> np.ndarray:
        x = np.maximum(x, 0.0)
        for cls in self.classes:
            total = float(self.card[cls] @ x[cls])
            x[cls] = x[cls] / total
        return x

    def profile(self, x: np.ndarray) -> StrategyProfile:
        f = self.flat(x)
        return StrategyProfile.from_flat(self.game.action_counts, [float(v) for v in f])


def _residual(space: _OrbitSpace, x: np.ndarray) -> float:
    g = space.gaps(x)
    return float(np.sum(np.maximum(g, 0.0) ** 2))


def _polish(space: _OrbitSpace, x: np.ndarray) -> np.ndarray:
    """Solve the indifference equations on the support of ``x``."""
    support = np.flatnonzero(x > SUPPORT_TOL)
    if len(support) == 0:
        return x
    orbits = space.orbits
    reps = [(w, orbits.rep_player[w], orbits.representatives[w]) for w in support]
    offs = space.game.offsets

    def full(z):
        y = np.zeros_like(x)
        y[support] = z
        return y

    def resid(z):
        y = full(z)
        av = space.action_values(y)
        vecs = space.vectors(y)
        vals = [float(av[offs[i]: offs[i] + space.game.action_counts[i]] @ vecs[i])
                for i in range(space.game.num_players)]
        out = [av[rep] - vals[i] for _, i, rep in reps]
        for cls in space.classes:
            out.append(float(space.card[cls] @ y[cls]) - 1.0)
        return np.array(out)

    try:
        sol = least_squares(resid, x[support], bounds=(0.0, 1.0), xtol=1e-15, ftol=1e-15,
                            gtol=1e-15, max_nfev=200)
    except ValueError:
        return x
    return space.renormalize(full(sol.x))


def _minimize(space: _OrbitSpace, x0: np.ndarray, max_iter: int) -> np.ndarray:
    cons = [{"type": "eq", "fun": (lambda x, c=cls: float(space.card[c] @ x[c]) - 1.0)}
            for cls in space.classes]
    res = minimize(lambda x: _residual(space, x), x0, method="SLSQP",
                   bounds=[(0.0, 1.0)] * len(x0), constraints=cons,
                   options={"maxiter": max_iter, "ftol": 1e-16})
    return space.renormalize(np.asarray(res.x, dtype=float))


def solve_fixed_point(game: Game, orbits: OrbitPartition, eps: float = 1e-6,
                      seeds: int = 8, seed: int = 0, max_iter: int = 500) -> StrategyProfile:
    """First certified symmetry-respecting ``eps``-NE over a multi-start budget.

    Start ``k`` uses ``numpy.random.default_rng(seed + k)``; start 0 is the
    uniform profile. Raises :class:`BudgetExhausted` when no start certifies.
    """
    if eps <= 0:
        raise InvalidParameter("eps must be positive")
    if orbits.action_counts != game.action_counts:
        raise InvalidOrbits("orbit partition was built for a different game")
    if all(len(cls) == 1 for cls in orbits.classes):
        # D is a single point; return it exactly
        flat = [Fraction(1, orbits.cardinality[w]) for w in orbits.orbit_of]
        point = StrategyProfile.from_flat(game.action_counts, flat)
        report = deviation_report(game, point)
        if report.epsilon <= eps:
            return point
        raise BudgetExhausted(f"the only point of D has epsilon {float(report.epsilon):.3g}")
    space = _OrbitSpace(game, orbits)
    best = np.inf
    for k in range(max(1, seeds)):
        rng = np.random.default_rng(seed + k)
        x0 = space.uniform_point() if k == 0 else space.random_point(rng)
        x = x0 if _residual(space, x0) == 0 else _minimize(space, x0, max_iter)
        for cand in (x, _polish(space, x)):
            profile = space.profile(cand)
            report = deviation_report(game, profile)
            best = min(best, report.epsilon)
            if report.epsilon <= eps:
                return profile
    raise BudgetExhausted(f"no certified {eps}-NE in {seeds} starts (best epsilon {best:.3g})")
