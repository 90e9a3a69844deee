"""Projected gradient ascent for team games over D, with KKT certificates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import lsq_linear

from ..errors import IterationBudgetExhausted, InvalidOrbits, InvalidParameter, NotTeamGame
from ..game import Game
from ..symmetry import OrbitPartition, StrategyProfile
from .deviation import action_values
from .polytope import project_to_polytope

ARMIJO = 1e-4


@dataclass(frozen=True)
class KktCertificate:
    """Multipliers for the stationarity conditions of ``max u`` over D.

    For every action ``a``: ``grad_a + mu_a - kappa_{i(a)} - tie_a = 0`` where
    ``tie_a = tau_a`` for a non-representative and ``-sum tau_b`` over the
    non-representatives ``b`` of its orbit for a representative. ``mu`` is
    only placed on zero coordinates, so complementarity holds by design.
    """

    mu: tuple[float, ...]
    kappa: tuple[float, ...]
    tau: dict
    residual: float
    complementarity: float
    iterations: int

    def to_dict(self) -> dict:
        return {"mu": list(self.mu), "kappa": list(self.kappa),
                "tau": {str(k): v for k, v in self.tau.items()},
                "residual": self.residual, "complementarity": self.complementarity,
                "iterations": self.iterations}


class _Team:
    def __init__(self, game: Game):
        self.game = game
        self.tensor = game.tensors[0]
        self.offsets = list(game.offsets) + [game.num_actions]

    def split(self, flat: np.ndarray) -> list[np.ndarray]:
        return [flat[self.offsets[i]: self.offsets[i + 1]] for i in range(self.game.num_players)]

    def value(self, flat: np.ndarray) -> float:
        vecs = self.split(flat)
        return float(action_values(self.tensor, vecs, 0) @ vecs[0])

    def gradient(self, flat: np.ndarray) -> np.ndarray:
        vecs = self.split(flat)
        return np.concatenate([action_values(self.tensor, vecs, i)
                               for i in range(self.game.num_players)])


def team_value(game: Game, flat) -> float:
    return _Team(game).value(np.asarray(flat, dtype=float))


def team_orbit_gradient(game: Game, orbits: OrbitPartition, r) -> np.ndarray:
    """Gradient of ``u(s(r))`` in orbit coordinates: ``sum_{a in w} grad_a / c_w``."""
    r = np.asarray(r, dtype=float)
    card = np.asarray(orbits.cardinality, dtype=float)
    flat = (r / card)[np.asarray(orbits.orbit_of)]
    grad = _Team(game).gradient(flat)
    out = np.zeros(orbits.num_orbits)
    np.add.at(out, np.asarray(orbits.orbit_of), grad)
    return out / card


def team_orbit_value(game: Game, orbits: OrbitPartition, r) -> float:
    r = np.asarray(r, dtype=float)
    card = np.asarray(orbits.cardinality, dtype=float)
    return team_value(game, (r / card)[np.asarray(orbits.orbit_of)])


def kkt_certificate(game: Game, orbits: OrbitPartition, flat, iterations: int = 0,
                    zero_tol: float = 0.0) -> KktCertificate:
    """Recover multipliers by bounded least squares; residual is the max violation."""
    flat = np.asarray(flat, dtype=float)
    grad = _Team(game).gradient(flat)
    n, N = game.num_actions, game.num_players
    zeros = np.flatnonzero(flat <= zero_tol)
    ties = [(a, o[0]) for o in orbits.orbits for a in o[1:]]
    cols = len(zeros) + N + len(ties)
    M = np.zeros((n, cols))
    for k, a in enumerate(zeros):
        M[a, k] = 1.0
    for a in range(n):
        M[a, len(zeros) + int(game.owners[a])] = -1.0
    for k, (a, rep) in enumerate(ties):
        M[a, len(zeros) + N + k] = -1.0
        M[rep, len(zeros) + N + k] = 1.0
    lower = np.concatenate([np.zeros(len(zeros)), np.full(N + len(ties), -np.inf)])
    upper = np.full(cols, np.inf)
    sol = lsq_linear(M, -grad, bounds=(lower, upper), tol=1e-14,
                     method="bvls") if cols else None
    z = sol.x if sol is not None else np.zeros(0)
    residual = float(np.max(np.abs(grad + M @ z))) if n else 0.0
    mu = np.zeros(n)
    mu[zeros] = z[:len(zeros)]
    kappa = z[len(zeros):len(zeros) + N]
    tau = {a: float(z[len(zeros) + N + k]) for k, (a, _) in enumerate(ties)}
    comp = float(np.max(np.abs(mu * flat))) if n else 0.0
    return KktCertificate(tuple(float(m) for m in mu), tuple(float(k) for k in kappa), tau,
                          residual, comp, iterations)


def team_gradient(game: Game, orbits: OrbitPartition, delta: float = 1e-7,
                  max_iter: int = 10**5, start=None, seed: int | None = None,
                  ) -> tuple[StrategyProfile, KktCertificate]:
    """Projected gradient ascent on the team payoff over D.

    Stops at the first iterate whose KKT residual is at most ``delta``; such
    a point is a ``2 * delta`` well-supported equilibrium. ``start`` is a flat
    profile (projected onto D); otherwise the uniform profile is used, or a
    random point of D when ``seed`` is given.
    """
    if delta <= 0:
        raise InvalidParameter("delta must be positive")
    if not game.is_team_game():
        raise NotTeamGame("payoff tensors are not identical across players")
    if orbits.action_counts != game.action_counts:
        raise InvalidOrbits("orbit partition was built for a different game")
    team = _Team(game)
    if start is not None:
        y = np.asarray(start, dtype=float)
    elif seed is not None:
        rng = np.random.default_rng(seed)
        y = np.concatenate([rng.dirichlet(np.ones(m)) for m in game.action_counts])
    else:
        y = np.concatenate([np.full(m, 1.0 / m) for m in game.action_counts])
    s = project_to_polytope(orbits, y)
    scale = max(1.0, float(np.max(np.abs(team.tensor))))
    step = 1.0 / scale
    value = team.value(s)
    for it in range(max_iter + 1):
        grad = team.gradient(s)
        proxy = float(np.max(np.abs(project_to_polytope(orbits, s + grad / scale) - s)))
        if proxy <= 1e-3 or it % 50 == 0:
            cert = kkt_certificate(game, orbits, s, it)
            if cert.residual <= delta:
                return StrategyProfile.from_flat(game.action_counts, s.tolist()), cert
        if it == max_iter:
            break
        t = step * 2.0
        while True:
            cand = project_to_polytope(orbits, s + t * grad)
            new = team.value(cand)
            if new >= value + ARMIJO * float(grad @ (cand - s)) or t < 1e-14:
                break
            t *= 0.5
        step = t
        if np.array_equal(cand, s):
            # stuck at a boundary point; take the certificate as final
            cert = kkt_certificate(game, orbits, s, it)
            if cert.residual <= delta:
                return StrategyProfile.from_flat(game.action_counts, s.tolist()), cert
        s, value = cand, new
    raise IterationBudgetExhausted(f"KKT residual above {delta} after {max_iter} iterations")
