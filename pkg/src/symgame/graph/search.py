"""Automorphism search: equitable color refinement plus individualization.

The search follows the first path of the individualization tree down to a
discrete partition, then walks back up. At level ``k`` it looks for an
automorphism fixing the first ``k`` chosen vertices and moving the ``k``-th
one to each other vertex of its target cell (skipping vertices already known
to be in its orbit). Generators found this way form a generating set for
the whole group, and the group order is the product of the orbit lengths of
the chosen vertices in the successive pointwise stabilizers.

Refinement hashes the multiset of (edge label, neighbor color) pairs of each
vertex. The hash is computed identically for every vertex, so the resulting
ordered partition is isomorphism-invariant; a hash collision can only make
a partition coarser, never unsound, because every leaf is verified.
"""

from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass

import numpy as np

from .labeled import LabeledGraph

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLD = np.uint64(0x9E3779B97F4A7C15)


def _mix(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x.astype(np.uint64) + _GOLD
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class AutomorphismGroup:
    generators: tuple[tuple[int, ...], ...]
    order: int
    base: tuple[int, ...]
    orbit_lengths: tuple[int, ...]


class _Refiner:
    def __init__(self, graph: LabeledGraph):
        self.n = graph.num_vertices
        e = graph.edge_array
        self.src = np.concatenate([e[:, 0], e[:, 1]])
        self.dst = np.concatenate([e[:, 1], e[:, 0]])
        self.lab = _mix(np.concatenate([e[:, 2], e[:, 2]]) + 1)

    def refine(self, colors: np.ndarray) -> tuple[np.ndarray, tuple]:
        n = self.n
        trace = []
        colors, count = _ranks(colors, np.zeros(n, dtype=np.uint64))
        while True:
            with np.errstate(over="ignore"):
                key = _mix(self.lab + _mix(colors[self.dst]))
            sig = np.zeros(n, dtype=np.uint64)
            np.add.at(sig, self.src, key)
            new, new_count, digest = _ranks(colors, sig, with_digest=True)
            trace.append(digest)
            if new_count == count:
                return new, tuple(trace)
            colors, count = new, new_count


def _ranks(colors: np.ndarray, sig: np.ndarray, with_digest: bool = False):
    """Dense ranks of (color, sig) pairs in lexicographic order."""
    n = len(colors)
    order = np.lexsort((sig, colors))
    sc, ss = colors[order], sig[order]
    change = np.ones(n, dtype=bool)
    if n > 1:
        change[1:] = (sc[1:] != sc[:-1]) | (ss[1:] != ss[:-1])
    ranks = np.cumsum(change) - 1
    out = np.empty(n, dtype=np.int64)
    out[order] = ranks
    count = int(ranks[-1]) + 1 if n else 0
    if with_digest:
        starts = np.flatnonzero(change)
        sizes = np.diff(np.append(starts, n))
        digest = hash((ss[starts].tobytes(), sizes.tobytes()))
        return out, count, digest
    return out, count


def _individualize(colors: np.ndarray, v: int) -> np.ndarray:
    out = colors * 2 + 1
    out[v] -= 1
    return out


def _target_cell(colors: np.ndarray) -> np.ndarray | None:
    sizes = np.bincount(colors)
    big = np.flatnonzero(sizes > 1)
    if len(big) == 0:
        return None
    c = big[np.argmin(sizes[big])]
    return np.flatnonzero(colors == c)


def _orbit(v: int, gens: list[np.ndarray]) -> set[int]:
    seen = {v}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = int(g[x])
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def labeled_graph_automorphisms(graph: LabeledGraph) -> AutomorphismGroup:
    """Generators and order of the automorphism group of ``graph``."""
    n = graph.num_vertices
    if n == 0:
        return AutomorphismGroup((), 1, (), ())
    refiner = _Refiner(graph)
    colors, trace = refiner.refine(np.asarray(graph.colors, dtype=np.int64))

    path_colors = [colors]
    path_traces = [trace]
    cells: list[np.ndarray] = []
    base: list[int] = []
    while True:
        cell = _target_cell(colors)
        if cell is None:
            break
        v = int(cell[0])
        colors, trace = refiner.refine(_individualize(colors, v))
        cells.append(cell)
        base.append(v)
        path_colors.append(colors)
        path_traces.append(trace)
    depth = len(base)
    leaf_colors = path_colors[-1]

    limit = sys.getrecursionlimit()
    if limit < depth + 200:
        sys.setrecursionlimit(depth + 200)

    def descend(level: int, colors: np.ndarray):
        if level == depth:
            gamma = np.argsort(colors)[leaf_colors]
            return gamma if graph.is_automorphism(gamma) else None
        cell = _target_cell(colors)
        if cell is None or len(cell) != len(cells[level]):
            return None
        for u in cell:
            child, tr = refiner.refine(_individualize(colors, int(u)))
            if tr != path_traces[level + 1]:
                continue
            found = descend(level + 1, child)
            if found is not None:
                return found
        return None

    gens: list[np.ndarray] = []
    orbit_lengths = [1] * depth
    for k in reversed(range(depth)):
        v = base[k]
        orbit = _orbit(v, gens)
        for w in cells[k]:
            w = int(w)
            if w in orbit:
                continue
            child, tr = refiner.refine(_individualize(path_colors[k], w))
            if tr != path_traces[k + 1]:
                continue
            gamma = descend(k + 1, child)
            if gamma is not None:
                gens.append(gamma)
                orbit = _orbit(v, gens)
        orbit_lengths[k] = len(orbit)

    order = 1
    for length in orbit_lengths:
        order *= length
    return AutomorphismGroup(
        tuple(tuple(int(x) for x in g) for g in gens), order, tuple(base), tuple(orbit_lengths))
