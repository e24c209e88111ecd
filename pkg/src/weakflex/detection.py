"""Find catalog configurations as induced subgraphs of a host graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .catalog import detection_patterns
from .configurations import Configuration
from .graph import Graph, PlaneGraph, plain


@dataclass(frozen=True, order=True)
class Embedding:
    name: str
    reduced: tuple[int, ...]
    boundary: tuple[int, ...]
    mapping: tuple[int, ...]  # host vertex for each pattern vertex
    pattern: Configuration | None = field(default=None, compare=False, repr=False)

    def to_json(self) -> dict:
        labels = [self.pattern.h.label(i) for i in range(len(self.mapping))] if self.pattern else None
        return {
            "name": self.name,
            "reduced": list(self.reduced),
            "boundary": list(self.boundary),
            "mapping": dict(zip(labels, self.mapping)) if labels else list(self.mapping),
        }


def _search_order(p: Graph) -> list[int]:
    start = max(range(p.n), key=lambda v: (p.degree(v), -v))
    order, seen = [start], {start}
    while len(order) < p.n:
        frontier = [w for w in range(p.n) if w not in seen and p.adj[w] & seen]
        if not frontier:  # disconnected pattern: restart anywhere
            frontier = [w for w in range(p.n) if w not in seen]
        nxt = max(frontier, key=lambda w: (len(p.adj[w] & seen), p.degree(w), -w))
        order.append(nxt)
        seen.add(nxt)
    return order


def induced_matches(host: Graph, cfg: Configuration) -> Iterator[tuple[int, ...]]:
    """All injective maps pattern -> host preserving edges and non-edges and the degree rules."""
    p = cfg.h
    order = _search_order(p)
    rules = [cfg.rule(v) for v in range(p.n)]
    hdeg = host.degrees()
    assign: dict[int, int] = {}
    used: set[int] = set()

    def rec(i: int):
        if i == len(order):
            yield tuple(assign[v] for v in range(p.n))
            return
        v = order[i]
        placed_nbrs = [assign[w] for w in p.adj[v] if w in assign]
        if placed_nbrs:
            cands = set(host.adj[placed_nbrs[0]])
            for x in placed_nbrs[1:]:
                cands &= host.adj[x]
        else:
            cands = set(range(host.n))
        for c in sorted(cands - used):
            if not rules[v].holds(hdeg[c]):
                continue
            if any(host.has_edge(c, assign[w]) for w in assign if w not in p.adj[v]):
                continue
            assign[v] = c
            used.add(c)
            yield from rec(i + 1)
            del assign[v]
            used.discard(c)

    yield from rec(0)


def detect_configurations(g: Graph | PlaneGraph, which: str, first_only: bool = False) -> list[Embedding]:
    """Canonical sorted list of catalog embeddings, one per (entry, reduced image, boundary image)."""
    host = plain(g)
    found: dict[tuple, Embedding] = {}
    for cfg in detection_patterns(which):
        for mp in induced_matches(host, cfg):
            red = tuple(sorted(mp[v] for v in cfg.reduced))
            bnd = tuple(sorted(mp[v] for v in cfg.boundary))
            key = (cfg.name, red, bnd)
            emb = Embedding(cfg.name, red, bnd, mp, cfg)
            if key not in found or mp < found[key].mapping:
                found[key] = emb
            if first_only:
                return [emb]
    order = {n: i for i, n in enumerate(dict.fromkeys(c.name for c in detection_patterns(which)))}
    return sorted(found.values(), key=lambda e: (order[e.name], e.reduced, e.boundary, e.mapping))
