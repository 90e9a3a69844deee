"""Vertex-colored, edge-labeled undirected graphs."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from ..errors import InvalidAutomorphism


@dataclass(frozen=True)
class LabeledGraph:
    num_vertices: int
    colors: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        n = int(self.num_vertices)
        colors = tuple(int(c) for c in self.colors) if self.colors else (0,) * n
        if len(colors) != n:
            raise ValueError(f"{len(colors)} colors for {n} vertices")
        seen = set()
        edges = []
        for u, v, lab in self.edges:
            u, v, lab = int(u), int(v), int(lab)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            edges.append((u, v, lab))
        object.__setattr__(self, "num_vertices", n)
        object.__setattr__(self, "colors", colors)
        object.__setattr__(self, "edges", tuple(sorted(edges)))

    @classmethod
    def simple(cls, num_vertices: int, edges: Sequence[tuple[int, int]]) -> "LabeledGraph":
        """Uncolored graph with every edge labeled 0."""
        return cls(num_vertices, (0,) * num_vertices, tuple((u, v, 0) for u, v in edges))

    @cached_property
    def edge_array(self) -> np.ndarray:
        if not self.edges:
            return np.zeros((0, 3), dtype=np.int64)
        return np.array(self.edges, dtype=np.int64)

    @cached_property
    def _edge_keys(self) -> np.ndarray:
        e = self.edge_array
        return np.sort((e[:, 0] * self.num_vertices + e[:, 1]) * (self._max_label + 1) + e[:, 2])

    @cached_property
    def _max_label(self) -> int:
        return int(self.edge_array[:, 2].max()) if self.edges else 0

    @cached_property
    def adjacency(self) -> dict[tuple[int, int], int]:
        out = {}
        for u, v, lab in self.edges:
            out[(u, v)] = lab
            out[(v, u)] = lab
        return out

    def is_automorphism(self, perm: Sequence[int]) -> bool:
        """Does ``perm`` (vertex v to perm[v]) preserve colors and labeled edges?"""
        p = np.asarray(perm, dtype=np.int64)
        n = self.num_vertices
        if p.shape != (n,) or not np.array_equal(np.sort(p), np.arange(n)):
            return False
        col = np.asarray(self.colors)
        if not np.array_equal(col[p], col):
            return False
        e = self.edge_array
        if len(e) == 0:
            return True
        a, b = p[e[:, 0]], p[e[:, 1]]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        keys = np.sort((lo * n + hi) * (self._max_label + 1) + e[:, 2])
        return bool(np.array_equal(keys, self._edge_keys))

    def to_dict(self) -> dict:
        return {"vertices": self.num_vertices, "colors": list(self.colors),
                "edges": [list(e) for e in self.edges]}


def graph_from_dict(data: dict) -> LabeledGraph:
    n = int(data["vertices"])
    return LabeledGraph(n, tuple(data.get("colors") or [0] * n),
                        tuple((e[0], e[1], e[2] if len(e) > 2 else 0)
                              for e in data.get("edges", [])))


def load_graph(path) -> LabeledGraph:
    with open(path) as fh:
        return graph_from_dict(json.load(fh))


def check_automorphism(graph: LabeledGraph, perm: Sequence[int]) -> None:
    if not graph.is_automorphism(perm):
        raise InvalidAutomorphism("permutation does not preserve the labeled graph")


def compose_perms(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """``p after q``."""
    return tuple(p[x] for x in q)


def brute_force_automorphisms(graph: LabeledGraph) -> list[tuple[int, ...]]:
    """Every automorphism by plain backtracking (no refinement; test oracle).

    Vertices are assigned in order; a partial map is extended only when the
    color matches and all edges to already-assigned vertices carry the same
    label on the image side (non-edges must stay non-edges).
    """
    n = graph.num_vertices
    adj = graph.adjacency
    colors = graph.colors
    image = [-1] * n
    used = [False] * n
    out: list[tuple[int, ...]] = []

    def extend(v: int) -> None:
        if v == n:
            out.append(tuple(image))
            return
        for w in range(n):
            if used[w] or colors[w] != colors[v]:
                continue
            if any(adj.get((v, u)) != adj.get((w, image[u])) for u in range(v)):
                continue
            image[v] = w
            used[w] = True
            extend(v + 1)
            used[w] = False
        image[v] = -1

    extend(0)
    return out
