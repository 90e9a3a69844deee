"""Finite normal-form games in explicit form, with exact rational payoffs.

A game stores one dense payoff tensor per player, flattened in row-major
order (the last player's action varies fastest). Actions of all players are
also addressed through a single *global action id*: player ``i``'s local
action ``k`` has id ``offsets[i] + k``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import prod
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidGame, InvalidParameter, InvalidProfile
from .rational import format_rational, to_fraction


@dataclass(frozen=True)
class Game:
    action_counts: tuple[int, ...]
    payoffs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        counts = tuple(int(m) for m in self.action_counts)
        if len(counts) < 2:
            raise InvalidGame("a game needs at least two players")
        if any(m < 1 for m in counts):
            raise InvalidGame(f"every player needs at least one action: {counts}")
        size = prod(counts)
        if len(self.payoffs) != len(counts):
            raise InvalidGame(
                f"expected {len(counts)} payoff tables, got {len(self.payoffs)}")
        tables = []
        for i, table in enumerate(self.payoffs):
            table = tuple(to_fraction(v) for v in table)
            if len(table) != size:
                raise InvalidGame(
                    f"payoffs[{i}] has {len(table)} entries, expected {size}")
            tables.append(table)
        object.__setattr__(self, "action_counts", counts)
        object.__setattr__(self, "payoffs", tuple(tables))

    @property
    def num_players(self) -> int:
        return len(self.action_counts)

    @property
    def num_actions(self) -> int:
        """Size of the global action set (all players' actions together)."""
        return sum(self.action_counts)

    @property
    def num_profiles(self) -> int:
        return prod(self.action_counts)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for m in self.action_counts:
            out.append(acc)
            acc += m
        return tuple(out)

    @cached_property
    def owners(self) -> np.ndarray:
        """Owner player of every global action id."""
        return np.repeat(np.arange(self.num_players), self.action_counts)

    def owner(self, action: int) -> int:
        return int(self.owners[action])

    def local(self, action: int) -> int:
        return action - self.offsets[self.owner(action)]

    def global_id(self, player: int, local: int) -> int:
        if not 0 <= local < self.action_counts[player]:
            raise InvalidProfile(f"player {player} has no action {local}")
        return self.offsets[player] + local

    def actions_of(self, player: int) -> range:
        start = self.offsets[player]
        return range(start, start + self.action_counts[player])

    @cached_property
    def strides(self) -> np.ndarray:
        strides = np.ones(self.num_players, dtype=np.int64)
        for i in range(self.num_players - 2, -1, -1):
            strides[i] = strides[i + 1] * self.action_counts[i + 1]
        return strides

    @cached_property
    def profiles(self) -> np.ndarray:
        """All action profiles as an ``(num_profiles, N)`` array in flat order."""
        grids = np.indices(self.action_counts).reshape(self.num_players, -1)
        return np.ascontiguousarray(grids.T)

    def payoff(self, player: int, profile: Sequence[int]) -> Fraction:
        return self.payoffs[player][profile_to_flat(self, profile)]

    @cached_property
    def tensors(self) -> tuple[np.ndarray, ...]:
        """Float payoff tensors, one per player, shaped by ``action_counts``."""
        return tuple(np.array([float(v) for v in t]).reshape(self.action_counts)
                     for t in self.payoffs)

    @cached_property
    def exact_tensors(self) -> tuple[np.ndarray, ...]:
        return tuple(np.array(t, dtype=object).reshape(self.action_counts)
                     for t in self.payoffs)

    @cached_property
    def distinct_payoffs(self) -> tuple[Fraction, ...]:
        return tuple(sorted({v for t in self.payoffs for v in t}))

    @cached_property
    def payoff_labels(self) -> np.ndarray:
        """Dense integer rank of every payoff, shape ``(N, num_profiles)``.

        Equal rationals get equal labels, so exact comparisons can be done on
        integers.
        """
        rank = {v: k for k, v in enumerate(self.distinct_payoffs)}
        return np.array([[rank[v] for v in t] for t in self.payoffs], dtype=np.int64)

    def is_team_game(self) -> bool:
        return all(t == self.payoffs[0] for t in self.payoffs[1:])

    def is_zero_sum(self) -> bool:
        return all(sum(vals) == 0 for vals in zip(*self.payoffs))


def profile_to_flat(game: Game, profile: Sequence[int]) -> int:
    if len(profile) != game.num_players:
        raise InvalidProfile(
            f"profile has {len(profile)} entries for {game.num_players} players")
    flat = 0
    for a, m in zip(profile, game.action_counts):
        if not 0 <= int(a) < m:
            raise InvalidProfile(f"action {a} out of range for {m} actions")
        flat = flat * m + int(a)
    return flat


def flat_to_profile(game: Game, flat: int) -> tuple[int, ...]:
    if not 0 <= flat < game.num_profiles:
        raise InvalidProfile(f"flat index {flat} out of range")
    out = []
    for m in reversed(game.action_counts):
        flat, a = divmod(flat, m)
        out.append(a)
    return tuple(reversed(out))


def game_from_function(action_counts: Sequence[int], payoff_fn) -> Game:
    """Build a game from ``payoff_fn(profile) -> sequence of N payoffs``."""
    counts = tuple(action_counts)
    tables: list[list[Fraction]] = [[] for _ in counts]
    for profile in product(*(range(m) for m in counts)):
        values = payoff_fn(profile)
        for i, v in enumerate(values):
            tables[i].append(to_fraction(v))
    return Game(counts, tuple(tuple(t) for t in tables))


def bimatrix(A, B) -> Game:
    A = [[to_fraction(v) for v in row] for row in A]
    B = [[to_fraction(v) for v in row] for row in B]
    rows, cols = len(A), len(A[0])
    if len(B) != rows or any(len(r) != cols for r in A + B):
        raise InvalidParameter("bimatrix payoff matrices must share one shape")
    return Game((rows, cols), (tuple(v for r in A for v in r),
                               tuple(v for r in B for v in r)))


# -- serialization ----------------------------------------------------------

def game_to_dict(game: Game) -> dict:
    return {
        "players": game.num_players,
        "actions": list(game.action_counts),
        "payoffs": [[format_rational(v) for v in t] for t in game.payoffs],
    }


def game_from_dict(data: dict) -> Game:
    try:
        players = int(data["players"])
        actions = [int(m) for m in data["actions"]]
        payoffs = data["payoffs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidGame(f"malformed game document: {exc}") from exc
    if players != len(actions):
        raise InvalidGame(f"'players' is {players} but {len(actions)} action counts given")
    return Game(tuple(actions), tuple(tuple(t) for t in payoffs))


def dumps_game(game: Game) -> str:
    return json.dumps(game_to_dict(game))


def loads_game(text: str) -> Game:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidGame(f"invalid JSON: {exc}") from exc
    return game_from_dict(data)


def load_game(path: str | Path) -> Game:
    return loads_game(Path(path).read_text())


def save_game(game: Game, path: str | Path) -> None:
    Path(path).write_text(dumps_game(game) + "\n")


# -- transformations --------------------------------------------------------

def normalize_payoffs(game: Game):
    """Map every player's payoffs affinely into ``[0, 1]``.

    Returns ``(normalized_game, transforms)`` with one ``(shift, scale)`` pair
    per player such that ``normalized = (original - shift) / scale``. An
    epsilon in normalized units is ``epsilon * scale`` in original units.
    A player with constant payoffs maps to all zeros; a player already inside
    ``[0, 1]`` keeps the identity transform.
    """
    tables, transforms = [], []
    for t in game.payoffs:
        lo, hi = min(t), max(t)
        if lo == hi:
            shift, scale = lo, Fraction(1)
        elif lo >= 0 and hi <= 1:
            shift, scale = Fraction(0), Fraction(1)
        else:
            shift, scale = lo, hi - lo
        transforms.append((shift, scale))
        tables.append(tuple((v - shift) / scale for v in t))
    return Game(game.action_counts, tuple(tables)), transforms


# -- generators -------------------------------------------------------------

def gen_rps_extension(num_players: int, num_actions: int) -> Game:
    """N-player, m-action Rock-Paper-Scissors.

    A player choosing ``j`` scores the number of players on ``j + 1 (mod m)``
    minus the number of players on ``j - 1 (mod m)``.
    """
    if num_players < 2 or num_actions < 3:
        raise InvalidParameter("need at least 2 players and 3 actions")
    m = num_actions

    def payoff(profile):
        return [sum(1 for b in profile if b == (a + 1) % m)
                - sum(1 for b in profile if b == (a - 1) % m) for a in profile]

    return game_from_function([m] * num_players, payoff)


def gen_coordination(values: Sequence) -> Game:
    """Two-player team game paying ``values[k]`` when both pick color ``k``."""
    values = [to_fraction(v) for v in values]
    if not values:
        raise InvalidParameter("need at least one color")
    k = len(values)
    A = [[values[r] if r == c else 0 for c in range(k)] for r in range(k)]
    return bimatrix(A, A)


def gen_matching_pennies() -> Game:
    A = [[1, -1], [-1, 1]]
    return bimatrix(A, [[-v for v in row] for row in A])


def gen_chicken() -> Game:
    A = [[0, -1], [1, -10]]
    return bimatrix(A, [list(col) for col in zip(*A)])


def gen_zero_sum_embedding(A, B, *, require_positive: bool = True) -> Game:
    """Totally symmetric bimatrix game ``(M, M^T)`` with ``M = [[0, A], [B^T, 0]]``.

    With ``require_positive`` (the default) all entries of ``A`` and ``B``
    must be positive so that equilibria of ``(A, B)`` correspond to
    player-symmetric equilibria of the embedding. Passing ``B = -A`` with
    ``require_positive=False`` yields a skew-symmetric ``M``, i.e. a
    totally symmetric *zero-sum* game.
    """
    A = [[to_fraction(v) for v in row] for row in A]
    B = [[to_fraction(v) for v in row] for row in B]
    if not A or not A[0]:
        raise InvalidParameter("empty payoff matrix")
    m, n = len(A), len(A[0])
    if len(B) != m or any(len(r) != n for r in A + B):
        raise InvalidParameter("A and B must have the same shape")
    if require_positive and any(v <= 0 for row in A + B for v in row):
        raise InvalidParameter("entries of A and B must be positive; shift first")
    size = m + n
    M = [[Fraction(0)] * size for _ in range(size)]
    for r in range(m):
        for c in range(n):
            M[r][m + c] = A[r][c]
            M[m + c][r] = B[r][c]
    return bimatrix(M, [list(col) for col in zip(*M)])


def _edge_set(graph) -> set[frozenset]:
    edges = set()
    for e in graph.edges:
        u, v = int(e[0]), int(e[1])
        if u == v:
            raise InvalidParameter("simple graphs have no self-loops")
        edges.add(frozenset((u, v)))
    return edges


def game_from_graph(graph, c: Sequence = (1, 2, 3, 4), d: Sequence = (1, 2, 3, 4)) -> Game:
    """Two-player game whose symmetries mirror the automorphisms of ``graph``.

    Player 1 picks a vertex, player 2 picks a vertex or the extra action
    ``alpha`` (its last action). Payoffs ``(c_k, d_k)`` by case: ``k=1``
    alpha played, ``k=2`` distinct non-adjacent, ``k=3`` distinct adjacent,
    ``k=4`` same vertex. ``graph`` needs ``num_vertices`` and ``edges``.
    """
    c = [to_fraction(v) for v in c]
    d = [to_fraction(v) for v in d]
    if len(c) != 4 or len(d) != 4 or len(set(c)) != 4 or len(set(d)) != 4:
        raise InvalidParameter("c and d must each hold four distinct values")
    n = int(graph.num_vertices)
    if n < 1:
        raise InvalidParameter("graph needs at least one vertex")
    edges = _edge_set(graph)

    def payoff(profile):
        u, v = profile
        if v == n:
            k = 0
        elif u == v:
            k = 3
        elif frozenset((u, v)) in edges:
            k = 2
        else:
            k = 1
        return c[k], d[k]

    return game_from_function([n, n + 1], payoff)


def graphs_to_zero_sum_game(g1, g2) -> Game:
    """Zero-sum game on ``V1 + V2`` with a player swap iff ``g1`` is isomorphic to ``g2``.

    Vertices of ``g1`` come first in both players' action lists.
    """
    n1, n2 = int(g1.num_vertices), int(g2.num_vertices)
    e1, e2 = _edge_set(g1), _edge_set(g2)
    size = n1 + n2

    def payoff(profile):
        v, w = profile
        in1 = (v < n1, w < n1)
        if in1 == (True, True):
            x = 2 if frozenset((v, w)) in e1 else -1
        elif in1 == (False, False):
            x = -2 if frozenset((v - n1, w - n1)) in e2 else 1
        else:
            x = 0
        return x, -x

    return game_from_function([size, size], payoff)


def relabel_game(game: Game, player_perm: Sequence[int],
                 action_perms: Sequence[Sequence[int]]) -> Game:
    """Copy of ``game`` with players and actions renamed.

    Player ``i`` becomes player ``player_perm[i]`` and its local action ``k``
    becomes local action ``action_perms[i][k]`` of that player. The renaming
    is then an isomorphism from ``game`` to the result.
    """
    N = game.num_players
    pi = list(player_perm)
    if sorted(pi) != list(range(N)):
        raise InvalidParameter("player_perm is not a permutation")
    counts = [0] * N
    for i in range(N):
        counts[pi[i]] = game.action_counts[i]
    size = game.num_profiles
    tables = [[None] * size for _ in range(N)]
    new_strides = [1] * N
    for j in range(N - 2, -1, -1):
        new_strides[j] = new_strides[j + 1] * counts[j + 1]
    for flat, profile in enumerate(game.profiles):
        target = sum(action_perms[i][profile[i]] * new_strides[pi[i]] for i in range(N))
        for i in range(N):
            tables[pi[i]][target] = game.payoffs[i][flat]
    return Game(tuple(counts), tuple(tuple(t) for t in tables))


def iter_profiles(game: Game) -> Iterable[tuple[int, ...]]:
    return product(*(range(m) for m in game.action_counts))
