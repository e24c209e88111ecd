"""List coloring: fixed assignments, and the universal check over all f-assignments.

The universal check treats the list assignment as a multiset of color supports
(the vertex set whose lists contain a given color). An adversary picks supports
one color at a time, always including the lowest vertex that still needs
colors, with nondecreasing masks inside a run, so each multiset is produced
once. Alongside it we track the antichain of maximal vertex sets that can be
properly colored with the colors chosen so far; the assignment is colorable
iff the full set becomes reachable.

Exact reductions applied before searching:
  * a vertex whose budget exceeds its degree can always be colored last;
  * a vertex with budget 1 behaves like a precolored vertex, so it can be
    deleted while every neighbor loses one unit of budget;
  * components are independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import networkx as nx

from .errors import ContractError, MalformedInputError
from .graph import Graph, components

Lists = Mapping[int, Sequence[int]]


# --- fixed assignment -------------------------------------------------------

def color_with_lists(g: Graph, lists: Lists | Sequence[Sequence[int]]) -> list[int] | None:
    """Backtracking L-coloring; smallest remaining list first, ties by index."""
    doms = []
    for v in range(g.n):
        lv = lists[v] if not isinstance(lists, Mapping) else lists.get(v, lists.get(str(v)))
        if lv is None or len(lv) == 0:
            raise MalformedInputError(f"vertex {v} has an empty list")
        doms.append(set(lv))
    color: list[int | None] = [None] * g.n

    def solve(doms: list[set[int]]) -> bool:
        best = None
        for v in range(g.n):
            if color[v] is None and (best is None or len(doms[v]) < len(doms[best])):
                best = v
        if best is None:
            return True
        for c in sorted(doms[best]):
            nd = list(doms)
            ok = True
            for w in g.adj[best]:
                if color[w] is None and c in nd[w]:
                    nd[w] = nd[w] - {c}
                    if not nd[w]:
                        ok = False
                        break
            if not ok:
                continue
            color[best] = c
            if solve(nd):
                return True
            color[best] = None
        return False

    return list(color) if solve(doms) else None


def is_proper_coloring(g: Graph, coloring: Sequence[int], lists=None) -> bool:
    if any(coloring[u] == coloring[v] for u, v in g.edges):
        return False
    if lists is not None:
        return all(coloring[v] in lists[v] for v in range(g.n))
    return True


# --- Gallai trees and the degree shortcut ----------------------------------

def is_gallai_tree(g: Graph) -> bool:
    if len(components(g)) > 1:
        raise ContractError("is_gallai_tree needs a connected graph")
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    for block in nx.biconnected_components(h):
        b = len(block)
        e = h.subgraph(block).number_of_edges()
        complete = e == b * (b - 1) // 2
        odd_cycle = b % 2 == 1 and e == b
        if not (complete or odd_cycle):
            return False
    return True


def _peel(g: Graph, alive: set[int], f: Sequence[int]) -> set[int]:
    alive = set(alive)
    changed = True
    while changed:
        changed = False
        for v in sorted(alive):
            if f[v] > len(g.adj[v] & alive):
                alive.discard(v)
                changed = True
    return alive


def degree_feasibility_shortcut(g: Graph, f: Sequence[int]) -> bool | None:
    """Decide the universal check from degrees alone when possible."""
    f = list(f)
    alive = set(range(g.n))
    if any(f[v] <= 0 for v in alive):
        return False
    rest = _peel(g, alive, f)
    if not rest:
        return True
    undecided = False
    for comp in components(g, rest):
        cs = set(comp)
        degs = {v: len(g.adj[v] & cs) for v in comp}
        if any(f[v] < degs[v] for v in comp):
            undecided = True
            continue
        sub = Graph(len(comp), tuple((comp.index(u), comp.index(v)) for u, v in g.edges if u in cs and v in cs))
        if is_gallai_tree(sub):
            return False
    return None if undecided else True


# --- universal check --------------------------------------------------------

@dataclass
class Verdict:
    always: bool
    witness: dict[int, list[int]] | None = None

    def to_json(self) -> dict:
        if self.always:
            return {"verdict": "always"}
        return {"verdict": "counterexample", "lists": {str(v): c for v, c in sorted(self.witness.items())}}


def _maximal_sets(sets) -> frozenset[int]:
    keep: list[int] = []
    for s in sorted(set(sets), key=lambda x: -bin(x).count("1")):
        if not any(s & k == s for k in keep):
            keep.append(s)
    return frozenset(keep)


class _Adversary:
    def __init__(self, g: Graph, shortcuts: bool):
        self.g = g
        self.shortcuts = shortcuts
        self.memo: dict[tuple, dict | None] = {}
        self.mis_cache: dict[int, list[int]] = {}

    # returns a (partial) bad assignment {vertex: colors} or None
    def find_bad(self, alive: frozenset[int], f: tuple[int, ...]) -> dict | None:
        if not alive:
            return None
        key = (alive, tuple(f[v] for v in sorted(alive)))
        if key in self.memo:
            return self.memo[key]
        res = self._find_bad(alive, f)
        self.memo[key] = res
        return res

    def _find_bad(self, alive, f) -> dict | None:
        g = self.g
        for v in sorted(alive):
            if f[v] <= 0:
                return {v: []}
        rest = _peel(g, set(alive), f)
        if not rest:
            return None
        if len(rest) < len(alive):
            return self.find_bad(frozenset(rest), f)
        ones = [v for v in sorted(alive) if f[v] == 1]
        if ones:
            v = ones[0]
            f2 = list(f)
            for w in g.adj[v] & alive:
                f2[w] -= 1
            sub = self.find_bad(alive - {v}, tuple(f2))
            if sub is None:
                return None
            fresh = 1 + max((c for cs in sub.values() for c in cs), default=-1)
            out = {w: list(cs) for w, cs in sub.items()}
            for w in g.adj[v] & alive:
                if w in out:
                    out[w].append(fresh)
                else:
                    # w was not needed by the sub-witness; give it the forced color plus padding
                    out[w] = [fresh] + [fresh + 1 + i + w * g.n for i in range(f[w] - 1)]
            out[v] = [fresh]
            return out
        comps = components(g, alive)
        if len(comps) > 1:
            for comp in comps:
                sub = self.find_bad(frozenset(comp), f)
                if sub is not None:
                    return sub
            return None
        if self.shortcuts:
            sub = Graph(len(comps[0]), tuple((comps[0].index(u), comps[0].index(v))
                                             for u, v in g.edges if u in alive and v in alive))
            if all(f[v] >= len(g.adj[v] & alive) for v in alive) and not is_gallai_tree(sub):
                return None
        return self._search(sorted(alive), f)

    def _mis(self, mask: int, local_adj: list[int]) -> list[int]:
        """Maximal independent subsets of `mask`."""
        out: list[int] = []

        def rec(chosen: int, cand: int, excluded: int):
            if not cand and not excluded:
                out.append(chosen)
                return
            while cand:
                low = cand & -cand
                v = low.bit_length() - 1
                rec(chosen | low, cand & ~local_adj[v] & ~low, excluded & ~local_adj[v])
                cand &= ~low
                excluded |= low

        rec(0, mask, 0)
        return out

    def _search(self, verts: list[int], f) -> dict | None:
        g = self.g
        m = len(verts)
        pos = {v: i for i, v in enumerate(verts)}
        local_adj = [sum(1 << pos[w] for w in g.adj[v] if w in pos) for v in verts]
        full = (1 << m) - 1
        mis_cache: dict[int, list[int]] = {}
        losing: set[tuple] = set()

        def mis(mask):
            if mask not in mis_cache:
                mis_cache[mask] = self._mis(mask, local_adj)
            return mis_cache[mask]

        def rest_is_safe(X: int, r: tuple[int, ...]) -> bool:
            if X == 0:
                return False
            remaining = frozenset(verts[i] for i in range(m) if not X >> i & 1)
            fr = list(f)
            for i, v in enumerate(verts):
                fr[v] = r[i]
            return self.find_bad(remaining, tuple(fr)) is None

        def dfs(r: tuple[int, ...], A: frozenset[int], run_owner: int, min_mask: int):
            if full in A:
                return None
            owner = next((i for i in range(m) if r[i] > 0), None)
            if owner is None:
                return []
            if owner != run_owner:
                min_mask = 0
            key = (r, A, owner, min_mask)
            if key in losing:
                return None
            if any(rest_is_safe(X, r) for X in A):
                losing.add(key)
                return None
            pos_mask = sum(1 << i for i in range(m) if r[i] > 0) & ~(1 << owner)
            # enumerate supports {owner} | T for T subset of pos_mask, increasing
            subs = []
            t = pos_mask
            while True:
                subs.append(t | (1 << owner))
                if t == 0:
                    break
                t = (t - 1) & pos_mask
            for s in sorted(subs):
                if s < min_mask:
                    continue
                newA = _maximal_sets(X | i for X in A for i in mis(s & ~X))
                r2 = tuple(r[i] - (s >> i & 1) for i in range(m))
                tail = dfs(r2, newA, owner, s)
                if tail is not None:
                    return [s] + tail
            losing.add(key)
            return None

        supports = dfs(tuple(f[v] for v in verts), frozenset([0]), -1, 0)
        if supports is None:
            return None
        return {v: [c for c, s in enumerate(supports) if s >> i & 1] for i, v in enumerate(verts)}


def _canonical_witness(g: Graph, f: Sequence[int], partial: dict) -> dict[int, list[int]]:
    # pad vertices the witness does not constrain with private colors, then relabel 1..P
    raw = {v: list(cs) for v, cs in partial.items()}
    nxt = 1 + max((c for cs in raw.values() for c in cs), default=-1)
    for v in range(g.n):
        if v not in raw:
            raw[v] = list(range(nxt, nxt + f[v]))
            nxt += f[v]
    relabel: dict[int, int] = {}
    out = {}
    for v in range(g.n):
        cs = []
        for c in sorted(raw[v]):
            if c not in relabel:
                relabel[c] = len(relabel) + 1
            cs.append(relabel[c])
        out[v] = sorted(cs)
    return out


def colorable_for_all_assignments(g: Graph, f: Sequence[int], palette_bound: int | None = None,
                                  shortcuts: bool = True) -> Verdict:
    """Is g L-colorable for every assignment with |L(v)| = f(v)?

    With shortcuts=False the degree-choosability theorem is not used, which
    keeps cross-checks against that theorem independent.
    """
    f = tuple(int(x) for x in f)
    if len(f) != g.n:
        raise MalformedInputError("budget length differs from vertex count")
    if g.n == 0:
        return Verdict(True)
    adv = _Adversary(g, shortcuts)
    if palette_bound is not None and palette_bound < sum(f):
        partial = _capped_search(g, f, palette_bound, adv)
    else:
        partial = adv.find_bad(frozenset(range(g.n)), f)
    if partial is None:
        return Verdict(True)
    witness = _canonical_witness(g, f, partial)
    if any(len(witness[v]) != max(f[v], 0) for v in range(g.n)):
        raise AssertionError("witness has wrong list sizes")
    if all(witness[v] for v in range(g.n)) and color_with_lists(g, witness) is not None:
        raise AssertionError("reported counterexample is colorable")
    return Verdict(False, witness)


def _capped_search(g: Graph, f, cap: int, adv: _Adversary) -> dict | None:
    """Plain enumeration of support multisets using at most `cap` colors."""
    if any(x <= 0 for x in f):
        return {v: [] for v in range(g.n) if f[v] <= 0}
    n = g.n
    full = (1 << n) - 1
    adj = list(g.masks)

    def dfs(r, A, owner_prev, min_mask, used):
        if full in A:
            return None
        owner = next((i for i in range(n) if r[i] > 0), None)
        if owner is None:
            return []
        if used >= cap:
            return None
        if owner != owner_prev:
            min_mask = 0
        pos_mask = sum(1 << i for i in range(n) if r[i] > 0) & ~(1 << owner)
        subs = []
        t = pos_mask
        while True:
            subs.append(t | (1 << owner))
            if t == 0:
                break
            t = (t - 1) & pos_mask
        for s in sorted(subs):
            if s < min_mask:
                continue
            newA = _maximal_sets(X | i for X in A for i in adv._mis(s & ~X, adj))
            tail = dfs(tuple(r[i] - (s >> i & 1) for i in range(n)), newA, owner, s, used + 1)
            if tail is not None:
                return [s] + tail
        return None

    supports = dfs(f, frozenset([0]), -1, 0, 0)
    if supports is None:
        return None
    return {v: [c for c, s in enumerate(supports) if s >> v & 1] for v in range(n)}


# --- budget helpers ----------------------------------------------------------

def lowered_at(f: Sequence[int], v: int) -> list[int]:
    out = list(f)
    out[v] = 1
    return out


def minus_set(f: Sequence[int], subset) -> list[int]:
    out = list(f)
    for v in subset:
        out[v] -= 1
    return out
