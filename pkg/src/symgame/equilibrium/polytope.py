"""The polytope of symmetry-respecting profiles and its orbit coordinates.

A profile respects an orbit partition when it is constant on every orbit,
so it is determined by one value ``x_w`` per orbit. Orbit coordinates
``r_w = c_w * x_w`` are the total mass a single player puts on orbit ``w``;
for each player the ``r`` of the orbits it meets sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import InvalidOrbits, NotInDomain
from ..game import Game
from ..rational import solve_linear
from ..symmetry import OrbitPartition, StrategyProfile

DOMAIN_TOL = 1e-9


@dataclass(frozen=True)
class Constraint:
    coefficients: tuple[tuple[int, int], ...]
    rhs: int
    kind: str
    sense: str  # "<=" or "=="

    def evaluate(self, flat: Sequence) -> float | Fraction:
        return sum(c * flat[a] for a, c in self.coefficients)

    def violation(self, flat: Sequence):
        lhs = self.evaluate(flat) - self.rhs
        if self.sense == "==":
            return abs(lhs)
        return max(lhs, 0 * lhs)


@dataclass(frozen=True)
class SymmetryPolytope:
    """Linear description of the symmetry-respecting profiles.

    Rows: ``-s(a) <= 0`` and ``s(a) <= 1`` for every action, one sum-to-one
    equality per player and one tie ``s(a) - s(a_w) = 0`` for every action
    that is not its orbit's representative.
    """

    action_counts: tuple[int, ...]
    orbits: OrbitPartition
    constraints: tuple[Constraint, ...]

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def witness(self) -> StrategyProfile:
        return StrategyProfile.uniform(self.action_counts)

    def violation(self, s: StrategyProfile):
        flat = s.flat()
        return max(c.violation(flat) for c in self.constraints)

    def contains(self, s: StrategyProfile, tol: float = DOMAIN_TOL) -> bool:
        v = self.violation(s)
        return v == 0 if s.exact else float(v) <= tol

    def equality_matrix(self) -> tuple[list[list[Fraction]], list[Fraction]]:
        n = sum(self.action_counts)
        rows, rhs = [], []
        for c in self.constraints:
            if c.sense != "==":
                continue
            row = [Fraction(0)] * n
            for a, coef in c.coefficients:
                row[a] += coef
            rows.append(row)
            rhs.append(Fraction(c.rhs))
        return rows, rhs

    @property
    def dimension(self) -> int:
        """Affine dimension (the polytope always has a relative-interior point)."""
        rows, rhs = self.equality_matrix()
        _, rank = solve_linear(rows, rhs)
        return sum(self.action_counts) - rank


def build_symmetry_polytope(game: Game, orbits: OrbitPartition) -> SymmetryPolytope:
    if orbits.action_counts != game.action_counts:
        raise InvalidOrbits("orbit partition was built for a different game")
    cons = []
    for a in range(game.num_actions):
        cons.append(Constraint(((a, -1),), 0, "nonnegative", "<="))
    for a in range(game.num_actions):
        cons.append(Constraint(((a, 1),), 1, "upper", "<="))
    for i in range(game.num_players):
        cons.append(Constraint(tuple((a, 1) for a in game.actions_of(i)), 1, "sum", "=="))
    for o in orbits.orbits:
        for a in o[1:]:
            cons.append(Constraint(((a, 1), (o[0], -1)), 0, "tie", "=="))
    return SymmetryPolytope(game.action_counts, orbits, tuple(cons))


# -- orbit coordinates ----------------------------------------------------

@dataclass(frozen=True)
class OrbitProfile:
    values: tuple

    def to_dict(self) -> dict:
        return {"r": [str(v) if isinstance(v, Fraction) else float(v) for v in self.values]}


def _close(x, y, exact: bool, tol: float) -> bool:
    return x == y if exact else abs(float(x) - float(y)) <= tol


def profile_to_orbit(orbits: OrbitPartition, s: StrategyProfile,
                     tol: float = DOMAIN_TOL) -> OrbitProfile:
    """``r_w = c_w * s(a_w)``; raises :class:`NotInDomain` unless ``s`` is in D."""
    flat = s.flat()
    if len(flat) != len(orbits.orbit_of):
        raise NotInDomain("profile size does not match orbits")
    exact = s.exact
    for i, row in enumerate(s.strategies):
        if any((p < 0 if exact else float(p) < -tol) for p in row):
            raise NotInDomain(f"player {i} has a negative probability")
        if not _close(sum(row), 1, exact, tol):
            raise NotInDomain(f"player {i} probabilities do not sum to one")
    for o in orbits.orbits:
        for a in o[1:]:
            if not _close(flat[a], flat[o[0]], exact, tol):
                raise NotInDomain(f"profile is not constant on orbit {list(o)}")
    return OrbitProfile(tuple(c * flat[rep] for c, rep in
                              zip(orbits.cardinality, orbits.representatives)))


def orbit_to_profile(orbits: OrbitPartition, r, tol: float = DOMAIN_TOL,
                     check: bool = True) -> StrategyProfile:
    """``s(a) = r_w / c_w`` for ``a`` in orbit ``w``; checks ``r`` is in E."""
    values = list(r.values if isinstance(r, OrbitProfile) else r)
    if len(values) != orbits.num_orbits:
        raise NotInDomain(f"expected {orbits.num_orbits} orbit values, got {len(values)}")
    exact = all(isinstance(v, (Fraction, int)) for v in values)
    if check:
        for v in values:
            if (v < 0 or v > 1) if exact else (float(v) < -tol or float(v) > 1 + tol):
                raise NotInDomain(f"orbit value {v} outside [0, 1]")
        for cls in orbits.classes:
            if not _close(sum(values[w] for w in cls), 1, exact, tol):
                raise NotInDomain(f"orbit values of class {list(cls)} do not sum to one")
    flat = []
    for a in range(len(orbits.orbit_of)):
        w = orbits.orbit_of[a]
        c = orbits.cardinality[w]
        flat.append(Fraction(values[w]) / c if exact else float(values[w]) / c)
    return StrategyProfile.from_flat(orbits.action_counts, flat)


# -- projection -------------------------------------------------------------

def _weighted_simplex(y: np.ndarray, c: np.ndarray) -> np.ndarray:
    """argmin sum_w c_w |I| (x_w - y_w)^2 s.t. sum c_w x_w = 1, x >= 0.

    The minimizer is ``x = max(0, y - t)`` for the unique ``t`` meeting the
    sum constraint; ``t`` is found by scanning the sorted ``y``.
    """
    order = np.argsort(-y)
    ys, cs = y[order], c[order]
    csum = np.cumsum(cs)
    wsum = np.cumsum(cs * ys)
    t = (wsum - 1.0) / csum
    k = int(np.max(np.flatnonzero(ys - t > 0))) if np.any(ys - t > 0) else 0
    return np.maximum(y - t[k], 0.0)


def project_to_polytope(orbits: OrbitPartition, y) -> np.ndarray:
    """Euclidean projection of the flat vector ``y`` onto D.

    Averaging over each orbit gives the nearest orbit-constant vector; the
    remaining problem splits over classes of orbits meeting the same
    players, each a weighted simplex projection.
    """
    y = np.asarray(y, dtype=float)
    means = np.array([y[list(o)].mean() for o in orbits.orbits])
    card = np.asarray(orbits.cardinality, dtype=float)
    x = np.empty(orbits.num_orbits)
    for cls in orbits.classes:
        idx = list(cls)
        x[idx] = _weighted_simplex(means[idx], card[idx])
    return x[np.asarray(orbits.orbit_of)]


def orbit_values_to_flat(orbits: OrbitPartition, x) -> np.ndarray:
    return np.asarray(x, dtype=float)[np.asarray(orbits.orbit_of)]
