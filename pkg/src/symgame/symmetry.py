"""Game symmetries, the groups they generate, and the orbits they induce.

A :class:`Symmetry` is a permutation ``phi`` of global action ids that maps
each player's action block onto one player's block; ``pi`` records the
induced player permutation. Whether a candidate leaves payoffs invariant is
checked by :func:`verify_symmetry`, not by construction.
"""

from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import permutations, product
from math import factorial, prod
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, InvalidCandidate, InvalidOrbits, InvalidProfile, TooLarge
from .game import Game
from .rational import format_rational, to_number

DEFAULT_CLOSURE_CAP = 10**6
BRUTE_FORCE_MAX_ACTIONS = 12
FLOAT_TOL = 1e-9
SIMPLEX_TOL = 1e-12


def default_closure_cap() -> int:
    raw = os.environ.get("SYMGAME_CLOSURE_CAP")
    return int(raw) if raw else DEFAULT_CLOSURE_CAP


def _offsets(counts: Sequence[int]) -> list[int]:
    out, acc = [], 0
    for m in counts:
        out.append(acc)
        acc += m
    return out


def _owners(counts: Sequence[int]) -> list[int]:
    return [i for i, m in enumerate(counts) for _ in range(m)]


@dataclass(frozen=True)
class Symmetry:
    phi: tuple[int, ...]
    pi: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(int(x) for x in self.phi))
        object.__setattr__(self, "pi", tuple(int(x) for x in self.pi))
        if sorted(self.phi) != list(range(len(self.phi))):
            raise InvalidCandidate("phi is not a permutation")
        if sorted(self.pi) != list(range(len(self.pi))):
            raise InvalidCandidate("pi is not a permutation")

    @classmethod
    def from_phi(cls, action_counts: Sequence[int], phi: Sequence[int],
                 target_counts: Sequence[int] | None = None) -> "Symmetry":
        """Derive ``pi`` from the block structure; raise if ``phi`` is not blockwise.

        ``target_counts`` describes the codomain when ``phi`` is an
        isomorphism between two games.
        """
        target_counts = action_counts if target_counts is None else target_counts
        if len(phi) != sum(action_counts) or len(phi) != sum(target_counts):
            raise InvalidCandidate(
                f"phi has {len(phi)} entries for {sum(action_counts)} actions")
        owners = _owners(target_counts)
        pi = []
        start = 0
        for m in action_counts:
            images = {owners[phi[a]] for a in range(start, start + m)}
            if len(images) != 1:
                raise InvalidCandidate("phi splits a player's actions across players")
            pi.append(images.pop())
            start += m
        if sorted(pi) != list(range(len(action_counts))):
            raise InvalidCandidate("phi does not induce a player permutation")
        return cls(tuple(phi), tuple(pi))

    @classmethod
    def identity(cls, action_counts: Sequence[int]) -> "Symmetry":
        return cls(tuple(range(sum(action_counts))), tuple(range(len(action_counts))))

    @classmethod
    def player_permutation(cls, action_counts: Sequence[int], pi: Sequence[int]) -> "Symmetry":
        """Player permutation that keeps action labels (local index k to k)."""
        offs = _offsets(action_counts)
        phi = [0] * sum(action_counts)
        for i, m in enumerate(action_counts):
            if action_counts[pi[i]] != m:
                raise InvalidCandidate("players with different action counts cannot swap")
            for k in range(m):
                phi[offs[i] + k] = offs[pi[i]] + k
        return cls(tuple(phi), tuple(pi))

    def is_identity(self) -> bool:
        return all(a == b for a, b in enumerate(self.phi))

    def check_blockwise(self, action_counts: Sequence[int],
                        target_counts: Sequence[int] | None = None) -> None:
        expected = Symmetry.from_phi(action_counts, self.phi, target_counts)
        if expected.pi != self.pi:
            raise InvalidCandidate(f"pi {self.pi} inconsistent with phi (expected {expected.pi})")

    def __call__(self, action: int) -> int:
        return self.phi[action]

    def to_dict(self) -> dict:
        return {"phi": list(self.phi), "pi": list(self.pi)}

    def cycles(self) -> str:
        seen, out = set(), []
        for a in range(len(self.phi)):
            if a in seen or self.phi[a] == a:
                continue
            cyc, b = [a], self.phi[a]
            seen.add(a)
            while b != a:
                seen.add(b)
                cyc.append(b)
                b = self.phi[b]
            out.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(out) or "()"


def symmetry_from_dict(data: dict, action_counts: Sequence[int] | None = None) -> Symmetry:
    phi = data["phi"]
    if action_counts is None:
        return Symmetry(tuple(phi), tuple(data["pi"]))
    s = Symmetry.from_phi(action_counts, phi)
    if "pi" in data and tuple(data["pi"]) != s.pi:
        raise InvalidCandidate(f"pi {data['pi']} inconsistent with phi (expected {list(s.pi)})")
    return s


def compose(s1: Symmetry, s2: Symmetry) -> Symmetry:
    """``s1 after s2``: apply ``s2`` first."""
    if len(s1.phi) != len(s2.phi) or len(s1.pi) != len(s2.pi):
        raise InvalidCandidate("cannot compose symmetries of different sizes")
    return Symmetry(tuple(s1.phi[x] for x in s2.phi), tuple(s1.pi[x] for x in s2.pi))


def invert(s: Symmetry) -> Symmetry:
    phi = [0] * len(s.phi)
    for a, b in enumerate(s.phi):
        phi[b] = a
    pi = [0] * len(s.pi)
    for i, j in enumerate(s.pi):
        pi[j] = i
    return Symmetry(tuple(phi), tuple(pi))


def power(s: Symmetry, k: int) -> Symmetry:
    out = Symmetry(tuple(range(len(s.phi))), tuple(range(len(s.pi))))
    for _ in range(k):
        out = compose(s, out)
    return out


def order_of(s: Symmetry) -> int:
    k, cur = 1, s
    while not cur.is_identity():
        cur = compose(s, cur)
        k += 1
    return k


# -- verification -----------------------------------------------------------

def _profile_images(game: Game, phi: Sequence[int], pi: Sequence[int],
                    target: Game) -> np.ndarray:
    """Flat index in ``target`` of ``phi(a)`` for every profile ``a`` of ``game``."""
    P = game.profiles
    new = np.empty_like(P)
    src_off, dst_off = game.offsets, target.offsets
    phi_arr = np.asarray(phi)
    for j in range(game.num_players):
        t = pi[j]
        block = phi_arr[src_off[j]: src_off[j] + game.action_counts[j]] - dst_off[t]
        new[:, t] = block[P[:, j]]
    return new @ target.strides


def verify_isomorphism(g1: Game, g2: Game, candidate: Symmetry) -> bool:
    """True iff ``candidate`` maps ``g1`` onto ``g2`` preserving every payoff."""
    if (len(candidate.phi) != g1.num_actions or len(candidate.pi) != g1.num_players
            or g1.num_actions != g2.num_actions or g1.num_players != g2.num_players):
        raise InvalidCandidate("candidate size does not match the games")
    try:
        candidate.check_blockwise(g1.action_counts, g2.action_counts)
    except InvalidCandidate:
        return False
    for i in range(g1.num_players):
        if g1.action_counts[i] != g2.action_counts[candidate.pi[i]]:
            return False
    img = _profile_images(g1, candidate.phi, candidate.pi, g2)
    if g1 is g2:
        lab1 = lab2 = g1.payoff_labels
    else:
        # compare through a label space shared by both games
        union = sorted(set(g1.distinct_payoffs) | set(g2.distinct_payoffs))
        rank = {v: k for k, v in enumerate(union)}
        lab1 = np.array([[rank[v] for v in t] for t in g1.payoffs])
        lab2 = np.array([[rank[v] for v in t] for t in g2.payoffs])
    for i in range(g1.num_players):
        if not np.array_equal(lab2[candidate.pi[i]][img], lab1[i]):
            return False
    return True


def verify_symmetry(game: Game, candidate: Symmetry) -> bool:
    """True iff ``candidate`` is blockwise and leaves all payoffs invariant (exactly)."""
    if len(candidate.phi) != game.num_actions or len(candidate.pi) != game.num_players:
        raise InvalidCandidate(
            f"candidate acts on {len(candidate.phi)} actions / {len(candidate.pi)} players, "
            f"game has {game.num_actions} / {game.num_players}")
    return verify_isomorphism(game, game, candidate)


# -- strategy profiles ------------------------------------------------------

@dataclass(frozen=True)
class StrategyProfile:
    """Per-player probability vectors; entries are floats or Fractions."""

    strategies: tuple[tuple, ...]

    def __post_init__(self):
        object.__setattr__(self, "strategies",
                           tuple(tuple(p for p in s) for s in self.strategies))

    @property
    def exact(self) -> bool:
        return all(isinstance(p, (Fraction, int)) for s in self.strategies for p in s)

    @property
    def action_counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.strategies)

    def flat(self) -> list:
        return [p for s in self.strategies for p in s]

    def as_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.flat()])

    @classmethod
    def from_flat(cls, action_counts: Sequence[int], values) -> "StrategyProfile":
        values = list(values)
        out, start = [], 0
        for m in action_counts:
            out.append(tuple(values[start:start + m]))
            start += m
        return cls(tuple(out))

    @classmethod
    def uniform(cls, action_counts: Sequence[int]) -> "StrategyProfile":
        return cls(tuple(tuple(Fraction(1, m) for _ in range(m)) for m in action_counts))

    @classmethod
    def pure(cls, action_counts: Sequence[int], profile: Sequence[int]) -> "StrategyProfile":
        return cls(tuple(tuple(Fraction(int(k == a)) for k in range(m))
                         for m, a in zip(action_counts, profile)))

    def to_float(self) -> "StrategyProfile":
        return StrategyProfile(tuple(tuple(float(p) for p in s) for s in self.strategies))

    def validate(self, game: Game, tol: float = SIMPLEX_TOL) -> None:
        if self.action_counts != game.action_counts:
            raise InvalidProfile(
                f"profile shape {self.action_counts} does not match game {game.action_counts}")
        for i, s in enumerate(self.strategies):
            if any(p < 0 for p in s):
                raise InvalidProfile(f"player {i} has a negative probability")
            total = sum(s)
            if self.exact and total != 1:
                raise InvalidProfile(f"player {i} probabilities sum to {total}")
            if not self.exact and abs(float(total) - 1.0) > tol:
                raise InvalidProfile(f"player {i} probabilities sum to {float(total)!r}")

    def to_dict(self) -> dict:
        return {"strategies": [[format_rational(p) if isinstance(p, (Fraction, int)) else float(p)
                                for p in s] for s in self.strategies]}


def profile_from_dict(data: dict) -> StrategyProfile:
    try:
        return StrategyProfile(tuple(tuple(to_number(p) for p in s) for s in data["strategies"]))
    except (KeyError, TypeError) as exc:
        raise InvalidProfile(f"malformed profile document: {exc}") from exc


def apply_to_profile(s: Symmetry, profile: StrategyProfile) -> StrategyProfile:
    """Image profile: action ``phi(a)`` receives the probability of ``a``."""
    flat = profile.flat()
    if len(flat) != len(s.phi):
        raise InvalidProfile("profile size does not match symmetry")
    out = [None] * len(flat)
    for a, b in enumerate(s.phi):
        out[b] = flat[a]
    return StrategyProfile.from_flat(profile.action_counts, out)


# -- orbits -----------------------------------------------------------------

@dataclass(frozen=True)
class OrbitPartition:
    """Partition of global action ids into orbits, ordered by smallest member.

    ``cardinality[w]`` is the number of actions orbit ``w`` holds for any
    one player it meets, and ``incidence[w]`` is the set of players it meets.
    """

    action_counts: tuple[int, ...]
    orbits: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        counts = tuple(int(m) for m in self.action_counts)
        orbits = sorted((tuple(sorted(int(a) for a in o)) for o in self.orbits), key=lambda o: o[0]
                        if o else -1)
        object.__setattr__(self, "action_counts", counts)
        object.__setattr__(self, "orbits", tuple(orbits))
        n = sum(counts)
        members = [a for o in orbits for a in o]
        if any(not o for o in orbits) or sorted(members) != list(range(n)):
            raise InvalidOrbits(f"orbits do not partition the {n} actions")
        owners = _owners(counts)
        player_class: dict[int, frozenset] = {}
        for o in orbits:
            per_player: dict[int, int] = {}
            for a in o:
                per_player[owners[a]] = per_player.get(owners[a], 0) + 1
            if len(set(per_player.values())) != 1:
                raise InvalidOrbits(f"orbit {o} meets players unevenly: {per_player}")
            inc = frozenset(per_player)
            for i in per_player:
                if player_class.setdefault(i, inc) != inc:
                    raise InvalidOrbits(
                        f"player {i} meets orbits with different player sets")
            if len({counts[i] for i in inc}) != 1:
                raise InvalidOrbits(f"orbit {o} joins players with different action counts")

    @property
    def num_orbits(self) -> int:
        return len(self.orbits)

    @cached_property
    def orbit_of(self) -> tuple[int, ...]:
        out = [0] * sum(self.action_counts)
        for w, o in enumerate(self.orbits):
            for a in o:
                out[a] = w
        return tuple(out)

    @cached_property
    def representatives(self) -> tuple[int, ...]:
        return tuple(o[0] for o in self.orbits)

    @cached_property
    def _owners(self) -> tuple[int, ...]:
        return tuple(_owners(self.action_counts))

    @cached_property
    def rep_player(self) -> tuple[int, ...]:
        return tuple(self._owners[a] for a in self.representatives)

    @cached_property
    def incidence(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(self._owners[a] for a in o) for o in self.orbits)

    @cached_property
    def cardinality(self) -> tuple[int, ...]:
        return tuple(sum(1 for a in o if self._owners[a] == self.rep_player[w])
                     for w, o in enumerate(self.orbits))

    @cached_property
    def classes(self) -> tuple[tuple[int, ...], ...]:
        """Orbit indices grouped by incidence set; each class is one simplex."""
        groups: dict[frozenset, list[int]] = {}
        for w, inc in enumerate(self.incidence):
            groups.setdefault(inc, []).append(w)
        return tuple(sorted((tuple(g) for g in groups.values()), key=lambda g: g[0]))

    @classmethod
    def singletons(cls, action_counts: Sequence[int]) -> "OrbitPartition":
        return cls(tuple(action_counts), tuple((a,) for a in range(sum(action_counts))))

    def to_dict(self) -> dict:
        return {"orbits": [list(o) for o in self.orbits]}


def orbits_from_dict(data: dict, action_counts: Sequence[int]) -> OrbitPartition:
    try:
        return OrbitPartition(tuple(action_counts), tuple(tuple(o) for o in data["orbits"]))
    except (KeyError, TypeError) as exc:
        raise InvalidOrbits(f"malformed orbit document: {exc}") from exc


def orbits_from_generators(action_counts: Sequence[int],
                           gens: Iterable[Symmetry]) -> OrbitPartition:
    """Orbits of the group generated by ``gens`` via breadth-first closure.

    Each action is enqueued once and every generator is applied to it once,
    so the cost is ``O(len(gens) * num_actions)``.
    """
    gens = list(gens)
    n = sum(action_counts)
    if any(len(g.phi) != n for g in gens):
        raise InvalidCandidate("generator size does not match action count")
    marked = [-1] * n
    orbits: list[list[int]] = []
    for a in range(n):
        if marked[a] >= 0:
            continue
        orbit = [a]
        marked[a] = len(orbits)
        queue = deque([a])
        while queue:
            b = queue.popleft()
            for g in gens:
                c = g.phi[b]
                if marked[c] < 0:
                    marked[c] = len(orbits)
                    orbit.append(c)
                    queue.append(c)
        orbits.append(orbit)
    return OrbitPartition(tuple(action_counts), tuple(tuple(o) for o in orbits))


def respects(profile: StrategyProfile, constraint, tol: float = FLOAT_TOL) -> bool:
    """Does ``profile`` respect an orbit partition or a collection of symmetries?

    Exact profiles are compared exactly; float profiles within ``tol``.
    """
    flat = profile.flat()
    exact = profile.exact
    if isinstance(constraint, OrbitPartition):
        if len(flat) != len(constraint.orbit_of):
            raise InvalidProfile("profile size does not match orbit partition")
        for o in constraint.orbits:
            ref = flat[o[0]]
            for a in o[1:]:
                if exact and flat[a] != ref:
                    return False
                if not exact and abs(float(flat[a]) - float(ref)) > tol:
                    return False
        return True
    for s in constraint:
        image = apply_to_profile(s, profile).flat()
        if exact and image != flat:
            return False
        if not exact and max(abs(float(x) - float(y)) for x, y in zip(image, flat)) > tol:
            return False
    return True


# -- groups -----------------------------------------------------------------

@dataclass(frozen=True)
class SymmetryGroup:
    """A group given by generators; ``order`` is filled in when known."""

    action_counts: tuple[int, ...]
    generators: tuple[Symmetry, ...] = ()
    order: int | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "action_counts", tuple(self.action_counts))
        object.__setattr__(self, "generators", tuple(self.generators))

    @property
    def identity(self) -> Symmetry:
        return Symmetry.identity(self.action_counts)

    def elements(self, cap: int | None = None) -> list[Symmetry]:
        cap = default_closure_cap() if cap is None else cap
        key = ("elements", cap)
        if key not in self._cache:
            self._cache[key] = group_closure(self, cap)
        return self._cache[key]

    def orbits(self) -> OrbitPartition:
        return orbits_from_generators(self.action_counts, self.generators)

    def to_dict(self) -> dict:
        out = {"generators": [g.to_dict() for g in self.generators]}
        if self.order is not None:
            out["order"] = self.order
        return out


def group_closure(group: SymmetryGroup, cap: int | None = None) -> list[Symmetry]:
    """All elements of the group, identity first, in breadth-first order.

    Raises :class:`CapExceeded` once more than ``cap`` elements are found.
    """
    cap = default_closure_cap() if cap is None else cap
    ident = group.identity
    gens = [(g.phi, g.pi) for g in group.generators if not g.is_identity()]
    seen = {ident.phi: ident.pi}
    order = [ident.phi]
    queue = deque([ident.phi])
    while queue:
        phi = queue.popleft()
        pi = seen[phi]
        for gphi, gpi in gens:
            new = tuple(gphi[x] for x in phi)
            if new not in seen:
                seen[new] = tuple(gpi[x] for x in pi)
                if len(seen) > cap:
                    raise CapExceeded(cap)
                order.append(new)
                queue.append(new)
    return [Symmetry(phi, seen[phi]) for phi in order]


def burnside_orbit_count(elements: Sequence[Symmetry]) -> Fraction:
    """Average number of fixed points over the group (equals the number of orbits)."""
    fixed = sum(sum(1 for a, b in enumerate(g.phi) if a == b) for g in elements)
    return Fraction(fixed, len(elements))


def generators_from_dict(data, action_counts: Sequence[int]) -> list[Symmetry]:
    """Accept a single symmetry, a list of them, or ``{"generators": [...]}``."""
    if isinstance(data, dict) and "generators" in data:
        data = data["generators"]
    if isinstance(data, dict):
        data = [data]
    return [symmetry_from_dict(d, action_counts) for d in data]


def load_generators(path, action_counts: Sequence[int]) -> list[Symmetry]:
    with open(path) as fh:
        return generators_from_dict(json.load(fh), action_counts)


# -- polynomial special cases ----------------------------------------------

def is_totally_symmetric(game: Game) -> bool:
    """All action counts equal and every player transposition is a symmetry."""
    counts = game.action_counts
    if len(set(counts)) != 1:
        return False
    N = game.num_players
    for i in range(N):
        for j in range(i + 1, N):
            pi = list(range(N))
            pi[i], pi[j] = j, i
            if not verify_symmetry(game, Symmetry.player_permutation(counts, pi)):
                return False
    return True


def one_player_action_symmetries(game: Game) -> SymmetryGroup:
    """Generators of the symmetries moving only one player's actions.

    These are generated by the swaps of duplicate action pairs, so every
    verified swap of two actions of one player is returned.
    """
    n = game.num_actions
    gens = []
    for i in range(game.num_players):
        acts = list(game.actions_of(i))
        for x in range(len(acts)):
            for y in range(x + 1, len(acts)):
                phi = list(range(n))
                phi[acts[x]], phi[acts[y]] = acts[y], acts[x]
                cand = Symmetry(tuple(phi), tuple(range(game.num_players)))
                if verify_symmetry(game, cand):
                    gens.append(cand)
    return SymmetryGroup(game.action_counts, tuple(gens))


# -- brute force (test oracle) ---------------------------------------------

def _blockwise_bijections(counts1: Sequence[int], counts2: Sequence[int]):
    N = len(counts1)
    off1, off2 = _offsets(counts1), _offsets(counts2)
    for pi in permutations(range(N)):
        if any(counts1[i] != counts2[pi[i]] for i in range(N)):
            continue
        for local in product(*(permutations(range(m)) for m in counts1)):
            phi = [0] * sum(counts1)
            for i in range(N):
                for k, img in enumerate(local[i]):
                    phi[off1[i] + k] = off2[pi[i]] + img
            yield Symmetry(tuple(phi), tuple(pi))


def _check_brute_force_size(game: Game) -> None:
    if game.num_actions > BRUTE_FORCE_MAX_ACTIONS:
        raise TooLarge(f"brute force limited to {BRUTE_FORCE_MAX_ACTIONS} actions")


def brute_force_isomorphisms(g1: Game, g2: Game) -> list[Symmetry]:
    _check_brute_force_size(g1)
    if g1.num_players != g2.num_players or sorted(g1.action_counts) != sorted(g2.action_counts):
        return []
    return [c for c in _blockwise_bijections(g1.action_counts, g2.action_counts)
            if verify_isomorphism(g1, g2, c)]


def brute_force_symmetries(game: Game) -> SymmetryGroup:
    """Every symmetry of ``game`` by exhaustive enumeration (small games only)."""
    elements = brute_force_isomorphisms(game, game)
    return SymmetryGroup(game.action_counts, tuple(elements), order=len(elements))


def brute_force_candidate_count(action_counts: Sequence[int]) -> int:
    from collections import Counter
    players = prod(factorial(c) for c in Counter(action_counts).values())
    return players * prod(factorial(m) for m in action_counts)
