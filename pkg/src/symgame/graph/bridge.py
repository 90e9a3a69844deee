"""Translate between games and labeled graphs.

A game becomes a three-class graph: player vertices, action vertices and
profile vertices. Player-action edges and action-profile edges carry two
reserved labels; player-profile edges carry the rank of the payoff that
player receives at that profile. Automorphisms of this graph restricted to
action vertices are exactly the game's symmetries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import ceil, log2

import numpy as np

from ..errors import CapExceeded, InvalidAutomorphism, InvalidCandidate, UnsupportedDegenerate
from ..game import Game
from ..symmetry import (Symmetry, SymmetryGroup, compose, default_closure_cap, group_closure,
                        verify_isomorphism, verify_symmetry)
from .labeled import LabeledGraph
from .search import labeled_graph_automorphisms

PLAYER, ACTION, PROFILE = 0, 1, 2


@dataclass(frozen=True)
class GraphLegend:
    """Vertex layout: players first, then global actions, then flat profiles."""

    num_players: int
    num_actions: int
    num_profiles: int
    payoff_values: tuple = ()
    lam: int = 0
    lam_prime: int = 0

    def player_vertex(self, i: int) -> int:
        return i

    def action_vertex(self, a: int) -> int:
        return self.num_players + a

    def profile_vertex(self, flat: int) -> int:
        return self.num_players + self.num_actions + flat

    def kind(self, v: int) -> tuple[int, int]:
        if v < self.num_players:
            return PLAYER, v
        if v < self.num_players + self.num_actions:
            return ACTION, v - self.num_players
        return PROFILE, v - self.num_players - self.num_actions


def game_to_labeled_graph(game: Game) -> tuple[LabeledGraph, GraphLegend]:
    N, A, P = game.num_players, game.num_actions, game.num_profiles
    labels = game.payoff_labels
    npay = len(game.distinct_payoffs)
    legend = GraphLegend(N, A, P, game.distinct_payoffs, npay, npay + 1)
    colors = [PLAYER] * N + [ACTION] * A + [PROFILE] * P
    edges = []
    for a in range(A):
        edges.append((int(game.owners[a]), N + a, legend.lam))
    acts = game.profiles + np.asarray(game.offsets)[None, :]
    for flat in range(P):
        pv = N + A + flat
        for j in range(N):
            edges.append((N + int(acts[flat, j]), pv, legend.lam_prime))
        for i in range(N):
            edges.append((i, pv, int(labels[i, flat])))
    return LabeledGraph(N + A + P, tuple(colors), tuple(edges)), legend


def automorphism_to_symmetry(game: Game, legend: GraphLegend, psi) -> Symmetry:
    N, A = legend.num_players, legend.num_actions
    psi = [int(x) for x in psi]
    if len(psi) != N + A + legend.num_profiles:
        raise InvalidAutomorphism("permutation size does not match the game graph")
    pi = psi[:N]
    phi = [x - N for x in psi[N:N + A]]
    if sorted(pi) != list(range(N)) or sorted(phi) != list(range(A)):
        raise InvalidAutomorphism("automorphism does not preserve vertex classes")
    try:
        sym = Symmetry(tuple(phi), tuple(pi))
        sym.check_blockwise(game.action_counts)
    except InvalidCandidate as exc:
        raise InvalidAutomorphism(str(exc)) from exc
    return sym


def symmetry_to_automorphism(game: Game, legend: GraphLegend, sym: Symmetry) -> tuple[int, ...]:
    N, A = legend.num_players, legend.num_actions
    out = list(sym.pi) + [N + b for b in sym.phi]
    P = game.profiles
    new = np.empty_like(P)
    off = game.offsets
    for j in range(N):
        t = sym.pi[j]
        block = np.asarray(sym.phi[off[j]: off[j] + game.action_counts[j]]) - off[t]
        new[:, t] = block[P[:, j]]
    images = new @ game.strides
    out += [N + A + int(x) for x in images]
    return tuple(out)


def _symmetries_via_graph(game: Game) -> SymmetryGroup:
    graph, legend = game_to_labeled_graph(game)
    aut = labeled_graph_automorphisms(graph)
    gens = []
    for psi in aut.generators:
        sym = automorphism_to_symmetry(game, legend, psi)
        if not verify_symmetry(game, sym):
            raise InvalidAutomorphism("engine produced a non-symmetry")
        gens.append(sym)
    return SymmetryGroup(game.action_counts, tuple(gens), order=aut.order)


def full_symmetry_group(game: Game) -> SymmetryGroup:
    """Generators (and order) of the group of all symmetries of ``game``."""
    if min(game.action_counts) < 2:
        raise UnsupportedDegenerate(
            "full-group search needs at least two actions per player")
    return _symmetries_via_graph(game)


# -- player symmetries --------------------------------------------------------

def _bits(m: int) -> int:
    return ceil(log2(m)) if m > 1 else 0


def player_symmetry_graph(game: Game) -> tuple[LabeledGraph, int]:
    """Incidence graph of the player-symmetry hypergraph.

    Player vertices are colored by action count; action-bit vertex ``k`` of a
    player is colored by ``k`` and tied to its player by an owner edge, so an
    automorphism moves a player's bits along with the player and keeps bit
    positions. Payoff-bit vertices get unique colors and stay fixed. One
    auxiliary vertex per (player, profile) joins the player, the set bits of
    every player's action and the set bits of the payoff rank.
    """
    N = game.num_players
    counts = game.action_counts
    count_colors = {m: k for k, m in enumerate(sorted(set(counts)))}
    colors: list[int] = [count_colors[m] for m in counts]
    base = len(count_colors)
    max_bits = max(_bits(m) for m in counts)
    bit_vertex: list[list[int]] = []
    for i in range(N):
        row = []
        for k in range(_bits(counts[i])):
            row.append(len(colors))
            colors.append(base + k)
        bit_vertex.append(row)
    base += max_bits
    npay = len(game.distinct_payoffs)
    pay_vertex = []
    for k in range(_bits(npay)):
        pay_vertex.append(len(colors))
        colors.append(base + k)
    base += _bits(npay)
    hyper_color = base
    edges = []
    for i in range(N):
        for v in bit_vertex[i]:
            edges.append((i, v, 1))
    labels = game.payoff_labels
    profiles = game.profiles
    for i in range(N):
        for flat in range(game.num_profiles):
            h = len(colors)
            colors.append(hyper_color)
            members = [i]
            for j in range(N):
                a = int(profiles[flat, j])
                members += [bit_vertex[j][k] for k in range(len(bit_vertex[j])) if a >> k & 1]
            lab = int(labels[i, flat])
            members += [pay_vertex[k] for k in range(len(pay_vertex)) if lab >> k & 1]
            edges += [(h, u, 0) for u in members]
    return LabeledGraph(len(colors), tuple(colors), tuple(edges)), N


def player_symmetries(game: Game) -> SymmetryGroup:
    """Symmetries that permute players and keep every action label."""
    graph, N = player_symmetry_graph(game)
    aut = labeled_graph_automorphisms(graph)
    gens = []
    for psi in aut.generators:
        sym = Symmetry.player_permutation(game.action_counts, psi[:N])
        if not verify_symmetry(game, sym):
            raise InvalidAutomorphism("engine produced a non-symmetry")
        gens.append(sym)
    return SymmetryGroup(game.action_counts, tuple(gens), order=aut.order)


# -- isomorphism ------------------------------------------------------------

@dataclass(frozen=True)
class IsoCoset:
    """All isomorphisms from one game to another: ``representative`` after ``group``."""

    representative: Symmetry | None
    group: SymmetryGroup
    source_counts: tuple[int, ...]
    target_counts: tuple[int, ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def empty(self) -> bool:
        return self.representative is None

    def elements(self, cap: int | None = None) -> list[Symmetry]:
        if self.empty:
            return []
        return [compose(self.representative, g) for g in group_closure(self.group, cap)]

    def to_dict(self) -> dict:
        return {"empty": self.empty,
                "representative": None if self.empty else self.representative.to_dict(),
                "group": self.group.to_dict()}


def hat_game(g1: Game, g2: Game) -> Game:
    """Combined game on both player sets, each action set extended by a bottom action.

    Player ``i`` of ``g1`` is player ``i`` here and player ``j`` of ``g2`` is
    player ``N + j``; bottom is the last local action of every player.
    """
    N = g1.num_players
    counts = tuple(m + 1 for m in g1.action_counts) + tuple(m + 1 for m in g2.action_counts)
    bottom = min(min(g1.distinct_payoffs), min(g2.distinct_payoffs)) - 1
    bot = np.array([m - 1 for m in counts])
    sizes = tuple(counts)
    total = int(np.prod(sizes))
    profiles = np.array(list(product(*(range(m) for m in sizes))), dtype=np.int64).reshape(total, 2 * N)
    is_bot = profiles == bot[None, :]
    left_bot, right_bot = is_bot[:, :N], is_bot[:, N:]
    case1 = right_bot.all(axis=1) & ~left_bot.any(axis=1)
    case2 = left_bot.all(axis=1) & ~right_bot.any(axis=1)
    payoffs = [[bottom] * total for _ in range(2 * N)]
    for flat in np.flatnonzero(case1):
        sub = profiles[flat, :N]
        idx = int(sub @ g1.strides)
        for i in range(N):
            payoffs[i][flat] = g1.payoffs[i][idx]
    for flat in np.flatnonzero(case2):
        sub = profiles[flat, N:]
        idx = int(sub @ g2.strides)
        for j in range(N):
            payoffs[N + j][flat] = g2.payoffs[j][idx]
    return Game(counts, tuple(tuple(p) for p in payoffs))


def _extract(g1: Game, g2: Game, hat: Game, sym: Symmetry) -> Symmetry | None:
    N = g1.num_players
    pi = sym.pi
    if any(pi[i] < N for i in range(N)):
        return None
    phi = []
    for i in range(N):
        j = pi[i] - N
        src = hat.offsets[i]
        dst = hat.offsets[N + j]
        for k in range(g1.action_counts[i]):
            local = sym.phi[src + k] - dst
            if local >= g2.action_counts[j]:
                return None
            phi.append(g2.offsets[j] + local)
    try:
        cand = Symmetry.from_phi(g1.action_counts, phi, g2.action_counts)
    except InvalidCandidate:
        return None
    return cand if verify_isomorphism(g1, g2, cand) else None


def find_isomorphism(g1: Game, g2: Game, cap: int | None = None) -> IsoCoset:
    group = _symmetries_via_graph(g1)
    empty = IsoCoset(None, group, g1.action_counts, g2.action_counts)
    if (g1.num_players != g2.num_players
            or sorted(g1.action_counts) != sorted(g2.action_counts)):
        return empty
    hat = hat_game(g1, g2)
    hat_group = _symmetries_via_graph(hat)
    for gen in hat_group.generators:
        rep = _extract(g1, g2, hat, gen)
        if rep is not None:
            return IsoCoset(rep, group, g1.action_counts, g2.action_counts)
    cap = default_closure_cap() if cap is None else cap
    try:
        for elem in group_closure(hat_group, cap):
            rep = _extract(g1, g2, hat, elem)
            if rep is not None:
                return IsoCoset(rep, group, g1.action_counts, g2.action_counts)
    except CapExceeded:
        pass
    return empty
