"""Instance builders: the diamond-chain family, random F-free plane graphs, small-graph enumeration."""

from __future__ import annotations

import math
import random
from typing import Iterator

import networkx as nx

from .errors import MalformedInputError
from .forbidden import Family, is_family_free
from .graph import Graph, PlaneGraph


def figure1_chain(t: int) -> PlaneGraph:
    """t diamonds glued at their side vertices, closed by one edge between the two end sides.

    Vertex s_i (i = 0..t) are the cut/side vertices; top_i and bot_i are the
    middles of block i. Every diamond forces s_i and s_{i+1} to share a color
    in any 3-coloring, so the closing edge makes the graph not 3-colorable.
    """
    if t < 5:
        raise MalformedInputError("the chain needs at least 5 blocks")
    labels = [f"s{i}" for i in range(t + 1)]
    labels += [f"top{i}" for i in range(t)] + [f"bot{i}" for i in range(t)]
    s = lambda i: i  # noqa: E731
    top = lambda i: t + 1 + i  # noqa: E731
    bot = lambda i: 2 * t + 1 + i  # noqa: E731
    edges = [(s(0), s(t))]
    for i in range(t):
        edges += [(s(i), top(i)), (s(i), bot(i)), (top(i), bot(i)), (top(i), s(i + 1)), (bot(i), s(i + 1))]
    pos = {s(i): (2.0 * i, 0.0) for i in range(t + 1)}
    pos.update({top(i): (2.0 * i + 1, 1.0) for i in range(t)})
    pos.update({bot(i): (2.0 * i + 1, -1.0) for i in range(t)})
    g = Graph(3 * t + 1, tuple(edges), tuple(labels))
    # the closing arc leaves both ends straight up
    arc = lambda v, w: math.pi / 2 if {v, w} == {s(0), s(t)} else None  # noqa: E731
    return straight_line_embedding(g, pos, arc)


def straight_line_embedding(g: Graph, pos, angle_override=None) -> PlaneGraph:
    """Rotation system of a straight-line drawing: neighbours sorted by angle around each vertex."""

    def angle(v: int, w: int) -> float:
        if angle_override is not None:
            a = angle_override(v, w)
            if a is not None:
                return a
        (x0, y0), (x1, y1) = pos[v], pos[w]
        return math.atan2(y1 - y0, x1 - x0)

    return PlaneGraph(g, tuple(tuple(sorted(g.adj[v], key=lambda w: angle(v, w))) for v in range(g.n)))


def _corners(pg: PlaneGraph) -> list[tuple[int, list[tuple[int, int]]]]:
    """Per face, its corners (vertex a, predecessor p on the walk)."""
    out = []
    for fid, walk in enumerate(pg.faces.walks):
        out.append((fid, [(walk[i], walk[i - 1]) for i in range(len(walk))]))
    return out


def _insert_after(rot: list[list[int]], a: int, p: int, b: int) -> None:
    r = rot[a]
    r.insert(r.index(p) + 1, b)


def random_free_plane_graph(n: int, family: Family, seed: int, max_extra: int | None = None) -> PlaneGraph:
    """Random tree, then random chords drawn inside faces while the graph stays F-free.

    Candidate chords (two corners of one face) are tried in random order; after
    each accepted chord the faces are recomputed. Stops when no chord fits or
    after `max_extra` chords.
    """
    if n < 3:
        raise MalformedInputError("need at least 3 vertices")
    rng = random.Random(seed)
    rot: list[list[int]] = [[] for _ in range(n)]
    edges: set[tuple[int, int]] = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        v, u = order[i], order[rng.randrange(i)]
        rot[u].insert(rng.randrange(len(rot[u]) + 1), v)
        rot[v].append(u)
        edges.add((min(u, v), max(u, v)))
    pg = PlaneGraph(Graph(n, tuple(edges)), tuple(map(tuple, rot)))
    if not is_family_free(pg.graph, family):
        raise MalformedInputError("the family forbids trees; nothing to generate")

    added = 0
    changed = max_extra is None or max_extra > 0
    while changed:
        changed = False
        candidates = []
        for _fid, corners in _corners(pg):
            for i, (a, p) in enumerate(corners):
                for b, q in corners[i + 1:]:
                    if a != b and (min(a, b), max(a, b)) not in edges:
                        candidates.append((a, p, b, q))
        rng.shuffle(candidates)
        for a, p, b, q in candidates:
            trial_edges = edges | {(min(a, b), max(a, b))}
            g = Graph(n, tuple(trial_edges))
            if not is_family_free(g, family):
                continue
            new_rot = [list(r) for r in pg.rotation]
            _insert_after(new_rot, a, p, b)
            _insert_after(new_rot, b, q, a)
            pg = PlaneGraph(g, tuple(map(tuple, new_rot)))
            edges = trial_edges
            added += 1
            changed = max_extra is None or added < max_extra
            break  # faces changed; recompute corners
    return pg


def enumerate_connected_graphs(n: int) -> Iterator[Graph]:
    """Connected simple graphs on n vertices up to isomorphism, in atlas order."""
    if not 1 <= n <= 7:
        raise MalformedInputError("enumeration is limited to 1..7 vertices")
    for h in nx.graph_atlas_g():
        if h.number_of_nodes() == n and nx.is_connected(h):
            yield Graph(n, tuple(h.edges()))
