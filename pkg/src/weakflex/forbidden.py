"""Forbidden-subgraph families: K_n, C_n, books B_n and explicit patterns."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from .errors import MalformedInputError
from .graph import Graph, with_apex


@dataclass(frozen=True)
class Pattern:
    kind: str  # "K", "C", "B" or "G" (explicit graph)
    size: int
    graph: Graph | None = None

    def __post_init__(self):
        if self.kind not in "KCBG" or len(self.kind) != 1:
            raise MalformedInputError(f"unknown pattern kind {self.kind!r}")
        minimum = {"K": 1, "C": 3, "B": 3, "G": 0}[self.kind]
        if self.size < minimum:
            raise MalformedInputError(f"{self.kind}{self.size} is not a valid pattern")

    def __str__(self):
        return f"{self.kind}{self.size}" if self.kind != "G" else f"G[{self.size}]"

    def as_graph(self) -> Graph:
        n = self.size
        if self.kind == "G":
            return self.graph
        if self.kind == "K":
            return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))
        if self.kind == "C":
            return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))
        # book: spine 0-1, pages 2..n-1
        return Graph(n, ((0, 1),) + tuple((s, p) for p in range(2, n) for s in (0, 1)))


def Clique(n: int) -> Pattern:
    return Pattern("K", n)


def Cycle(n: int) -> Pattern:
    return Pattern("C", n)


def Book(n: int) -> Pattern:
    return Pattern("B", n)


def explicit(g: Graph) -> Pattern:
    return Pattern("G", g.n, g)


Family = tuple[Pattern, ...]

_TOKEN = re.compile(r"^([KCB])(\d+)$")


def parse_family(text: str | Iterable[Pattern] | None) -> Family:
    """Parse "K4,C5,C6,C7,B5" (case-insensitive). Whitespace is ignored."""
    if text is None:
        return ()
    if not isinstance(text, str):
        return tuple(text)
    pats = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        mt = _TOKEN.match(tok.upper())
        if not mt:
            raise MalformedInputError(f"cannot parse pattern {tok!r}")
        pats.append(Pattern(mt.group(1), int(mt.group(2))))
    return tuple(pats)


def format_family(family: Family) -> str:
    return ",".join(str(p) for p in family)


def book_bound(family: Family) -> int | None:
    sizes = [p.size for p in family if p.kind == "B"]
    return min(sizes) if sizes else None


def has_clique(g: Graph, n: int) -> bool:
    if n <= 1:
        return g.n >= n
    if n == 2:
        return g.m > 0

    def grow(cands: int, need: int) -> bool:
        if need == 0:
            return True
        while cands:
            low = cands & -cands
            v = low.bit_length() - 1
            cands ^= low
            if grow(cands & g.masks[v], need - 1):
                return True
        return False

    full = (1 << g.n) - 1
    return any(grow(g.masks[v] & (full ^ ((1 << (v + 1)) - 1)), n - 1) for v in range(g.n))


def has_cycle(g: Graph, length: int) -> bool:
    """Is there a (not necessarily induced) cycle with exactly `length` vertices?"""
    masks = g.masks
    for s in range(g.n):
        allowed = ~((1 << (s + 1)) - 1)  # start at the cycle's smallest vertex
        # walk simple paths s -> ... of length-1 edges over vertices > s
        stack = [(s, 1 << s, 1)]
        while stack:
            v, used, cnt = stack.pop()
            if cnt == length:
                if masks[v] >> s & 1:
                    return True
                continue
            nxt = masks[v] & allowed & ~used
            while nxt:
                low = nxt & -nxt
                w = low.bit_length() - 1
                nxt ^= low
                stack.append((w, used | low, cnt + 1))
    return False


def has_book(g: Graph, n: int) -> bool:
    pages = n - 2
    return any(len(g.adj[u] & g.adj[v]) >= pages for u, v in g.edges)


def _to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def contains_pattern(h: Graph, p: Pattern) -> bool:
    """Subgraph (not induced) containment of p in h."""
    if p.kind == "K":
        return has_clique(h, p.size)
    if p.kind == "C":
        return p.size <= h.n and has_cycle(h, p.size)
    if p.kind == "B":
        return has_book(h, p.size)
    if p.graph.n > h.n or p.graph.m > h.m:
        return False
    return GraphMatcher(_to_nx(h), _to_nx(p.graph)).subgraph_is_monomorphic()


def is_family_free(h: Graph, family: Family) -> bool:
    return not any(contains_pattern(h, p) for p in family)


def first_contained(h: Graph, family: Family) -> Pattern | None:
    for p in family:
        if contains_pattern(h, p):
            return p
    return None


def is_f_free_set(h: Graph, subset: Sequence[int], family: Family) -> bool:
    """Does h plus an apex adjacent to exactly `subset` avoid every pattern in the family?"""
    return is_family_free(with_apex(h, subset), family)
