"""Simple undirected graphs, rotation systems and face tracing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EmbeddingError, MalformedInputError

Edge = tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices 0..n-1.

    Edges are stored normalized (u < v) and sorted, so edge indices are stable.
    """

    n: int
    edges: tuple[Edge, ...] = ()
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise MalformedInputError(f"vertex count must be a nonnegative int, got {self.n!r}")
        norm = set()
        for e in self.edges:
            try:
                u, v = (int(x) for x in e)
            except (TypeError, ValueError):
                raise MalformedInputError(f"bad edge {e!r}") from None
            if u == v:
                raise MalformedInputError(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise MalformedInputError(f"edge {e!r} out of range for n={self.n}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != self.n:
                raise MalformedInputError("labels length differs from n")
            object.__setattr__(self, "labels", labels)

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        nb: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return tuple(frozenset(s) for s in nb)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << w for w in s) for s in self.adj)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def degrees(self) -> list[int]:
        return [len(s) for s in self.adj]

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels else str(v)

    def index_of(self, name) -> int:
        """Resolve a vertex given by label or integer id."""
        if self.labels and str(name) in self.labels:
            return self.labels.index(str(name))
        try:
            v = int(name)
        except (TypeError, ValueError):
            raise MalformedInputError(f"unknown vertex {name!r}") from None
        if not 0 <= v < self.n:
            raise MalformedInputError(f"vertex {name!r} out of range")
        return v


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
    """Return g[S] relabelled to 0..|S|-1 together with the new->old map."""
    old = sorted(set(vertices))
    pos = {v: i for i, v in enumerate(old)}
    edges = [(pos[u], pos[v]) for u, v in g.edges if u in pos and v in pos]
    labels = [g.label(v) for v in old] if g.labels else None
    return Graph(len(old), tuple(edges), tuple(labels) if labels else None), old


def with_apex(g: Graph, attach: Iterable[int]) -> Graph:
    """g plus one new vertex (index n) adjacent to exactly `attach`."""
    extra = tuple((v, g.n) for v in sorted(set(attach)))
    return Graph(g.n + 1, g.edges + extra)


def components(g: Graph, alive: Iterable[int] | None = None) -> list[list[int]]:
    todo = set(range(g.n)) if alive is None else set(alive)
    out = []
    while todo:
        start = min(todo)
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in g.adj[u]:
                if w in todo and w not in seen:
                    seen.add(w)
                    stack.append(w)
        todo -= seen
        out.append(sorted(seen))
    return out


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(components(g)) == 1


@dataclass(frozen=True)
class FaceList:
    walks: tuple[tuple[int, ...], ...]  # vertex sequence of each facial walk
    dart_face: dict[Edge, int] = field(compare=False)

    @property
    def lengths(self) -> list[int]:
        return [len(w) for w in self.walks]

    def __len__(self):
        return len(self.walks)


@dataclass(frozen=True)
class PlaneGraph:
    """A graph with a rotation system: rotation[v] is the cyclic order of v's neighbors."""

    graph: Graph
    rotation: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        g = self.graph
        rot = tuple(tuple(int(w) for w in r) for r in self.rotation)
        if len(rot) != g.n:
            raise EmbeddingError("rotation must list every vertex")
        for v, r in enumerate(rot):
            if len(r) != len(set(r)) or set(r) != g.adj[v]:
                raise EmbeddingError(f"rotation at vertex {v} is not a cyclic order of its neighbors")
        object.__setattr__(self, "rotation", rot)
        faces = self.faces
        # a genus-0 rotation gives n - m + f = 2 per component
        comps = components(g)
        if g.n - g.m + len(faces) != 2 * len(comps):
            raise EmbeddingError("rotation system does not describe a plane embedding")

    @classmethod
    def from_edge_rotation(cls, graph: Graph, rotation: Sequence[Sequence[int]]) -> "PlaneGraph":
        """Build from per-vertex cyclic lists of edge indices (the JSON form)."""
        if len(rotation) != graph.n:
            raise EmbeddingError("rotation must list every vertex")
        nbr_rot = []
        for v, idxs in enumerate(rotation):
            order = []
            for i in idxs:
                if not 0 <= int(i) < graph.m:
                    raise EmbeddingError(f"edge index {i} out of range")
                a, b = graph.edges[int(i)]
                if v not in (a, b):
                    raise EmbeddingError(f"edge {i} is not incident to vertex {v}")
                order.append(b if a == v else a)
            nbr_rot.append(tuple(order))
        return cls(graph, tuple(nbr_rot))

    def edge_rotation(self) -> list[list[int]]:
        idx = self.graph.edge_index
        return [[idx[(min(v, w), max(v, w))] for w in r] for v, r in enumerate(self.rotation)]

    def successor(self, v: int, u: int) -> int:
        r = self.rotation[v]
        return r[(r.index(u) + 1) % len(r)]

    @cached_property
    def faces(self) -> FaceList:
        return trace_faces(self)


def trace_faces(pg: PlaneGraph) -> FaceList:
    """Facial walks: the dart after (u, v) is (v, successor of u around v)."""
    g = pg.graph
    pos = [{w: i for i, w in enumerate(r)} for r in pg.rotation]
    darts = sorted((u, v) for u in range(g.n) for v in g.adj[u])
    dart_face: dict[Edge, int] = {}
    walks = []
    for d in darts:
        if d in dart_face:
            continue
        fid = len(walks)
        walk = []
        u, v = d
        while (u, v) not in dart_face:
            dart_face[(u, v)] = fid
            walk.append(u)
            r = pg.rotation[v]
            u, v = v, r[(pos[v][u] + 1) % len(r)]
        if (u, v) != d:
            raise EmbeddingError("face tracing did not close up")
        walks.append(tuple(walk))
    for v in range(g.n):
        if not g.adj[v]:
            walks.append(())  # an isolated vertex sits in its own face
    if sum(len(w) for w in walks) != 2 * g.m:
        raise EmbeddingError("dart count mismatch while tracing faces")
    return FaceList(tuple(walks), dart_face)


# --- JSON ------------------------------------------------------------------

def graph_from_dict(data: dict) -> Graph | PlaneGraph:
    if not isinstance(data, dict) or "n" not in data:
        raise MalformedInputError("graph JSON needs an 'n' field")
    try:
        g = Graph(int(data["n"]), tuple(tuple(e) for e in data.get("edges", [])), data.get("labels"))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MalformedInputError):
            raise
        raise MalformedInputError(str(exc)) from None
    if data.get("rotation") is not None:
        return PlaneGraph.from_edge_rotation(g, data["rotation"])
    return g


def graph_to_dict(g: Graph | PlaneGraph) -> dict:
    pg = g if isinstance(g, PlaneGraph) else None
    base = pg.graph if pg else g
    out: dict = {"n": base.n, "edges": [list(e) for e in base.edges]}
    if pg:
        out["rotation"] = pg.edge_rotation()
    if base.labels:
        out["labels"] = list(base.labels)
    return out


def load_json(path: str | Path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from None


def read_graph(path: str | Path) -> Graph | PlaneGraph:
    return graph_from_dict(load_json(path))


def plain(g: Graph | PlaneGraph) -> Graph:
    return g.graph if isinstance(g, PlaneGraph) else g
