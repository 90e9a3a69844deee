"""Two-player zero-sum games: value by LP, then the min-norm equilibrium.

The squared-norm regularizer is strictly convex and invariant under every
game symmetry, so its unique minimizer over the equilibrium polytope is
fixed by all symmetries without any of them being computed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog, minimize

from ..errors import IterationBudgetExhausted, NotZeroSum
from ..game import Game
from ..rational import format_rational, simplex_max, solve_linear
from ..symmetry import StrategyProfile

EXACT_MAX_ACTIONS = 40


@dataclass(frozen=True)
class ZeroSumSolution:
    value: Fraction | float
    profile: StrategyProfile
    rho: Fraction | float
    exact: bool
    feasibility: float

    def to_dict(self) -> dict:
        fmt = format_rational if self.exact else float
        return {"value": fmt(self.value), "rho": fmt(self.rho),
                "feasibility": self.feasibility, "profile": self.profile.to_dict()}


def _payoff_matrix(game: Game) -> list[list[Fraction]]:
    if game.num_players != 2:
        raise NotZeroSum("zero-sum solver needs exactly two players")
    if not game.is_zero_sum():
        raise NotZeroSum("payoffs of the two players do not sum to zero")
    m1, m2 = game.action_counts
    u = game.payoffs[0]
    return [[u[a * m2 + b] for b in range(m2)] for a in range(m1)]


def minimax_exact(U: list[list[Fraction]]):
    """Value and optimal strategies by the exact simplex method.

    With ``U`` shifted to be positive, ``max sum y s.t. U y <= 1`` gives the
    column strategy ``y / sum y`` and its dual gives the row strategy.
    """
    m1, m2 = len(U), len(U[0])
    shift = 1 - min(min(row) for row in U)
    Up = [[v + shift for v in row] for row in U]
    y, total, x = simplex_max([Fraction(1)] * m2, Up, [Fraction(1)] * m1)
    v = 1 / total
    s2 = [yi * v for yi in y]
    s1 = [xi * v for xi in x]
    return v - shift, s1, s2


def minimax_float(U: np.ndarray):
    m1, m2 = U.shape
    shift = 1.0 - U.min()
    Up = U + shift
    res = linprog(-np.ones(m2), A_ub=Up, b_ub=np.ones(m1), bounds=(0, None), method="highs")
    total = -res.fun
    v = 1.0 / total
    s2 = res.x * v
    s1 = -res.ineqlin.marginals * v
    return v - shift, s1, s2


def min_norm_exact(G: list[list[Fraction]], h: list[Fraction], x0: list[Fraction],
                   max_iter: int = 10_000) -> list[Fraction]:
    """Exact primal active-set method for ``min |x|^2 s.t. sum x = 1, G x >= h, x >= 0``.

    ``x0`` must be feasible. The Hessian is the identity, so each step
    projects the current point onto the null space of the working set.
    """
    n = len(x0)
    rows = [list(r) for r in G] + [[Fraction(int(j == k)) for j in range(n)] for k in range(n)]
    rhs = list(h) + [Fraction(0)] * n
    ones = [Fraction(1)] * n
    x = list(x0)

    def dot(a, b):
        return sum(p * q for p, q in zip(a, b))

    working: list[int] = []
    for k, row in enumerate(rows):
        if dot(row, x) == rhs[k]:
            cand = working + [k]
            mat = [ones] + [rows[j] for j in cand]
            if solve_linear(mat, [Fraction(0)] * len(mat))[1] == len(mat):
                working = cand
    for _ in range(max_iter):
        C = [ones] + [rows[j] for j in working]
        q = len(C)
        # [I  -C^T; C  0] [p; lam] = [-x; 0]
        K = [[Fraction(int(r == c)) for c in range(n)] + [-C[j][r] for j in range(q)]
             for r in range(n)]
        K += [C[j] + [Fraction(0)] * q for j in range(q)]
        solved = solve_linear(K, [-v for v in x] + [Fraction(0)] * q)
        p, lam = solved[0][:n], solved[0][n:]
        if all(v == 0 for v in p):
            negative = [(lam[1 + k], working[k]) for k in range(len(working))
                        if lam[1 + k] < 0]
            if not negative:
                return x
            working.remove(min(negative)[1])
            continue
        alpha, block = Fraction(1), None
        for k, row in enumerate(rows):
            if k in working:
                continue
            slope = dot(row, p)
            if slope < 0:
                step = (rhs[k] - dot(row, x)) / slope
                if step < alpha:
                    alpha, block = step, k
        x = [xi + alpha * pi for xi, pi in zip(x, p)]
        if block is not None:
            working.append(block)
    raise IterationBudgetExhausted("active-set method did not terminate")


def _min_norm_float(G: np.ndarray, h: np.ndarray, x0: np.ndarray, tol: float) -> np.ndarray:
    n = len(x0)
    cons = [{"type": "eq", "fun": lambda x: np.sum(x) - 1.0, "jac": lambda x: np.ones(n)},
            {"type": "ineq", "fun": lambda x: G @ x - h, "jac": lambda x: G}]
    res = minimize(lambda x: float(x @ x), x0, jac=lambda x: 2 * x, method="SLSQP",
                   bounds=[(0.0, 1.0)] * n, constraints=cons,
                   options={"ftol": tol * tol, "maxiter": 1000})
    return np.asarray(res.x)


def zero_sum_symmetric(game: Game, tol: float = 1e-8) -> ZeroSumSolution:
    """Equilibrium of a zero-sum game minimizing ``sum_a s(a)^2``."""
    U = _payoff_matrix(game)
    m1, m2 = game.action_counts
    if m1 + m2 <= EXACT_MAX_ACTIONS:
        v, s1, s2 = minimax_exact(U)
        # row player: (s1^T U)_b >= v ; column player: (U s2)_a <= v, i.e. (-U s2)_a >= -v
        G1 = [[U[a][b] for a in range(m1)] for b in range(m2)]
        G2 = [[-U[a][b] for b in range(m2)] for a in range(m1)]
        t1 = min_norm_exact(G1, [v] * m2, s1)
        t2 = min_norm_exact(G2, [-v] * m1, s2)
        profile = StrategyProfile((tuple(t1), tuple(t2)))
        rho = sum(p * p for p in t1) + sum(p * p for p in t2)
        feas = _feasibility_exact(U, v, t1, t2)
        if feas != 0:
            raise IterationBudgetExhausted("exact solution failed its feasibility check")
        return ZeroSumSolution(v, profile, rho, True, 0.0)
    Uf = np.array(U, dtype=float)
    v, s1, s2 = minimax_float(Uf)
    t1 = _min_norm_float(Uf.T, np.full(m2, v), s1, tol)
    t2 = _min_norm_float(-Uf, np.full(m1, -v), s2, tol)
    t1, t2 = np.maximum(t1, 0) / np.maximum(t1, 0).sum(), np.maximum(t2, 0) / np.maximum(t2, 0).sum()
    feas = _feasibility(Uf, v, t1, t2)
    if feas > tol:
        raise IterationBudgetExhausted(f"feasibility {feas:.3g} above tolerance {tol}")
    profile = StrategyProfile((tuple(float(p) for p in t1), tuple(float(p) for p in t2)))
    return ZeroSumSolution(float(v), profile, float(t1 @ t1 + t2 @ t2), False, feas)


def _feasibility(U: np.ndarray, v: float, s1, s2) -> float:
    s1 = np.array([float(p) for p in s1])
    s2 = np.array([float(p) for p in s2])
    over = np.max(U @ s2 - v)
    under = np.max(v - s1 @ U)
    return float(max(over, under, 0.0))


def _feasibility_exact(U, v, s1, s2) -> Fraction:
    over = max(sum(u * q for u, q in zip(row, s2)) - v for row in U)
    under = max(v - sum(U[a][b] * s1[a] for a in range(len(U))) for b in range(len(U[0])))
    return max(over, under, Fraction(0))
