"""Exact-rational discharging: initial charges, the two rule systems and audits.

Elements are keyed as ("v", vertex), ("f", face index) and ("e", edge index).
A diamond here is a pair of distinct triangular faces sharing an edge; the
shared edge's endpoints are the middle vertices, the two other corners are
the sides.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable

from .errors import MalformedInputError, PreconditionError
from .forbidden import Cycle, is_family_free
from .graph import PlaneGraph, is_connected

Element = tuple[str, int]
HALF, QUARTER, EIGHTH = Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)


@dataclass(frozen=True)
class Diamond:
    middles: tuple[int, int]
    sides: tuple[int, int]
    faces: tuple[int, int]


@dataclass(frozen=True)
class Transfer:
    rule: str
    source: Element
    target: Element
    amount: Fraction


def element_name(pg: PlaneGraph, el: Element) -> str:
    kind, i = el
    if kind == "e":
        u, v = pg.graph.edges[i]
        return f"e{u}-{v}"
    return f"{kind}{i}"


class StructureIndex:
    def __init__(self, pg: PlaneGraph):
        self.pg = pg
        g = pg.graph
        self.g = g
        self.deg = g.degrees()
        fl = pg.faces
        self.walks = fl.walks
        self.flen = [len(w) for w in fl.walks]
        self.edge_faces = [(fl.dart_face[(u, v)], fl.dart_face[(v, u)]) for u, v in g.edges]
        self.face_vertices = [sorted(set(w)) for w in fl.walks]
        self.vertex_faces: list[list[int]] = [[] for _ in range(g.n)]
        for f, vs in enumerate(self.face_vertices):
            for v in vs:
                self.vertex_faces[v].append(f)

    @cached_property
    def diamonds(self) -> list[Diamond]:
        out = []
        for i, (u, v) in enumerate(self.g.edges):
            f1, f2 = self.edge_faces[i]
            if f1 == f2 or self.flen[f1] != 3 or self.flen[f2] != 3:
                continue
            x = next(w for w in self.walks[f1] if w not in (u, v))
            y = next(w for w in self.walks[f2] if w not in (u, v))
            if x == y:
                continue
            out.append(Diamond((u, v), tuple(sorted((x, y))), (f1, f2)))
        return out

    @cached_property
    def diamond_faces(self) -> set[int]:
        return {f for d in self.diamonds for f in d.faces}

    @cached_property
    def middle_of(self) -> dict[int, list[Diamond]]:
        out = defaultdict(list)
        for d in self.diamonds:
            for m in d.middles:
                out[m].append(d)
        return out

    @cached_property
    def side_of(self) -> dict[int, list[Diamond]]:
        out = defaultdict(list)
        for d in self.diamonds:
            for s in d.sides:
                out[s].append(d)
        return out

    def is_bridge(self, e: int) -> bool:
        f1, f2 = self.edge_faces[e]
        return f1 == f2

    def in_graph_triangle(self, u: int, v: int) -> bool:
        return bool(self.g.adj[u] & self.g.adj[v])

    def triangle_descriptor(self, f: int) -> tuple[int, ...]:
        return tuple(sorted(self.deg[v] for v in self.walks[f]))

    def diamond_descriptor(self, d: Diamond) -> tuple:
        return (tuple(self.deg[m] for m in d.middles), tuple(self.deg[s] for s in d.sides))


def deg_ok(d: int, spec: str) -> bool:
    """'5' exact, '5+' at least, '5-' at most."""
    if spec.endswith("+"):
        return d >= int(spec[:-1])
    if spec.endswith("-"):
        return d <= int(spec[:-1])
    return d == int(spec)


def _pair_roles(ix: StructureIndex, pair: tuple[int, int], a: str, b: str) -> list[tuple[int, int]]:
    """Orderings (p, q) of `pair` with deg p matching a and deg q matching b."""
    x, y = pair
    out = []
    for p, q in ((x, y), (y, x)):
        if deg_ok(ix.deg[p], a) and deg_ok(ix.deg[q], b) and (p, q) not in out:
            out.append((p, q))
    return out


def other(pair, v):
    return pair[1] if pair[0] == v else pair[0]


# --- charge state ---------------------------------------------------------------

@dataclass
class ChargeState:
    scheme: str
    charge: dict[Element, Fraction]
    ledger: list[Transfer] = field(default_factory=list)
    initial_total: Fraction = Fraction(0)

    def total(self) -> Fraction:
        return sum(self.charge.values(), Fraction(0))

    def copy(self) -> "ChargeState":
        return ChargeState(self.scheme, dict(self.charge), list(self.ledger), self.initial_total)


def initial_charges(pg: PlaneGraph, scheme: str) -> ChargeState:
    scheme = scheme.upper()
    if scheme not in ("A", "B"):
        raise MalformedInputError(f"unknown scheme {scheme!r}")
    if not is_connected(pg.graph):
        raise MalformedInputError("discharging needs a connected plane graph")
    g = pg.graph
    charge: dict[Element, Fraction] = {}
    for v in range(g.n):
        d = g.degree(v)
        charge[("v", v)] = Fraction(d - 4 if scheme == "A" else 2 * d - 6)
    for f, w in enumerate(pg.faces.walks):
        charge[("f", f)] = Fraction(len(w) - 4 if scheme == "A" else len(w) - 6)
    if scheme == "A":
        for e in range(g.m):
            charge[("e", e)] = Fraction(0)
    st = ChargeState(scheme, charge)
    st.initial_total = st.total()
    return st


def replay(initial: ChargeState, ledger: Iterable[Transfer]) -> dict[Element, Fraction]:
    charge = dict(initial.charge)
    for t in ledger:
        charge[t.source] -= t.amount
        charge[t.target] += t.amount
    return charge


# --- rule system A ---------------------------------------------------------------

def _a_r1(ix, st):
    out = []
    for e in range(ix.g.m):
        f1, f2 = ix.edge_faces[e]
        if f1 == f2:
            continue
        for big, small in ((f1, f2), (f2, f1)):
            if ix.flen[big] >= 8 and ix.flen[small] in (3, 4):
                out.append(Transfer("R1", ("f", big), ("f", small), HALF))
    return out


def _a_r2(ix, st):
    out = []
    for e in range(ix.g.m):
        f1, f2 = ix.edge_faces[e]
        if ix.flen[f1] in (3, 4) or ix.flen[f2] in (3, 4):
            continue
        if f1 == f2:
            out.append(Transfer("R2", ("f", f1), ("e", e), Fraction(1)))
        else:
            out.append(Transfer("R2", ("f", f1), ("e", e), HALF))
            out.append(Transfer("R2", ("f", f2), ("e", e), HALF))
    return out


def _a_r3(ix, st):
    out = []
    deg = ix.deg
    for e, (a, b) in enumerate(ix.g.edges):
        if st.charge[("e", e)] != 1:
            continue
        for u, z in ((a, b), (b, a)):
            if deg[u] == 3 and deg[z] == 3:
                out.append(Transfer("R3a", ("e", e), ("v", u), HALF))
            elif deg[u] == 3 and deg[z] >= 4:
                out.append(Transfer("R3b", ("e", e), ("v", u), Fraction(1)))
            if deg[u] != 4 or deg[z] < 4:
                continue
            for d in ix.middle_of.get(u, []):
                w = other(d.middles, u)
                if deg[w] == 3 and _pair_roles(ix, d.sides, "4", "4+"):
                    out.append(Transfer("R3c", ("e", e), ("v", w), Fraction(1)))
                if deg[w] == 4:
                    for s3, _s4 in _pair_roles(ix, d.sides, "3", "4"):
                        out.append(Transfer("R3d", ("e", e), ("v", s3), HALF))
    return out


def _a_r4(ix, st):
    return [Transfer("R4", ("f", f), ("v", v), Fraction(1))
            for f in range(len(ix.walks)) if ix.flen[f] == 4
            for v in ix.face_vertices[f] if ix.deg[v] == 3]


def _a_r5(ix, st):
    out = []
    for f in range(len(ix.walks)):
        if ix.flen[f] != 3 or f in ix.diamond_faces:
            continue
        threes = [v for v in ix.face_vertices[f] if ix.deg[v] == 3]
        if len(threes) == 1:
            out.append(Transfer("R5", ("f", f), ("v", threes[0]), HALF))
    return out


def _a_r6(ix, st):
    out = []
    for u in range(ix.g.n):
        if ix.deg[u] != 5:
            continue
        for d in ix.middle_of.get(u, []):
            w = other(d.middles, u)
            sides = d.sides
            src = ("v", u)
            if ix.deg[w] == 3 and (_pair_roles(ix, sides, "4", "4") or _pair_roles(ix, sides, "5", "4")):
                out.append(Transfer("R6a", src, ("v", w), Fraction(1)))
            elif ix.deg[w] == 3 and (_pair_roles(ix, sides, "6+", "4+") or _pair_roles(ix, sides, "5", "5")):
                out.append(Transfer("R6b", src, ("v", w), HALF))
            if ix.deg[w] >= 5 and _pair_roles(ix, sides, "3", "3"):
                for s in sides:
                    out.append(Transfer("R6c", src, ("v", s), QUARTER))
            if ix.deg[w] >= 4:
                for s3, _ in _pair_roles(ix, sides, "3", "4+"):
                    out.append(Transfer("R6d", src, ("v", s3), HALF))
    return out


def _a_r7(ix, st):
    out = []
    sent_r6a = {t.source for t in st.ledger if t.rule == "R6a"}
    for u in range(ix.g.n):
        if ix.deg[u] != 5:
            continue
        for d in ix.side_of.get(u, []):
            s2 = other(d.sides, u)
            src = ("v", u)
            if ix.deg[s2] == 3 and _pair_roles(ix, d.middles, "4", "4"):
                out.append(Transfer("R7a", src, ("v", s2), HALF))
            if ix.deg[s2] >= 5:
                for _m4, m3 in _pair_roles(ix, d.middles, "4", "3"):
                    out.append(Transfer("R7b", src, ("v", m3), HALF))
            if ix.deg[s2] >= 4 and src not in sent_r6a:
                for _m5, m3 in _pair_roles(ix, d.middles, "5", "3"):
                    out.append(Transfer("R7c", src, ("v", m3), HALF))
    return out


def _a_r8(ix, st):
    out = []
    for u in range(ix.g.n):
        if ix.deg[u] < 6:
            continue
        for d in ix.side_of.get(u, []):
            s2 = other(d.sides, u)
            src = ("v", u)
            if ix.deg[s2] >= 4:
                for _m5, m3 in _pair_roles(ix, d.middles, "5", "3"):
                    out.append(Transfer("R8a", src, ("v", m3), HALF))
                for _m4, m3 in _pair_roles(ix, d.middles, "4", "3"):
                    out.append(Transfer("R8c", src, ("v", m3), HALF))
            if ix.deg[s2] == 3 and _pair_roles(ix, d.middles, "4", "4"):
                out.append(Transfer("R8b", src, ("v", s2), HALF))
    return out


def _a_r9(ix, st):
    out = []
    for u in range(ix.g.n):
        if ix.deg[u] < 6:
            continue
        for d in ix.middle_of.get(u, []):
            w = other(d.middles, u)
            src = ("v", u)
            if ix.deg[w] >= 4 and _pair_roles(ix, d.sides, "3", "3"):
                for s in d.sides:
                    out.append(Transfer("R9a", src, ("v", s), HALF))
            elif ix.deg[w] >= 4:
                for s3, _ in _pair_roles(ix, d.sides, "3", "4+"):
                    out.append(Transfer("R9b", src, ("v", s3), Fraction(1)))
            if ix.deg[w] == 3 and _pair_roles(ix, d.sides, "4+", "4+"):
                out.append(Transfer("R9c", src, ("v", w), Fraction(1)))
    return out


RULES_A: list[tuple[str, Callable]] = [
    ("R1", _a_r1), ("R2", _a_r2), ("R3", _a_r3), ("R4", _a_r4), ("R5", _a_r5),
    ("R6", _a_r6), ("R7", _a_r7), ("R8", _a_r8), ("R9", _a_r9),
]


# --- rule system B ---------------------------------------------------------------

def _b_r1(ix, st):
    out = []
    for e in range(ix.g.m):
        f1, f2 = ix.edge_faces[e]
        if f1 == f2:
            continue
        for big, small in ((f1, f2), (f2, f1)):
            if ix.flen[big] >= 8 and ix.flen[small] in (3, 4):
                out.append(Transfer("R1", ("f", big), ("f", small), QUARTER))
    return out


def _b_r2(ix, st):
    out = []
    g = ix.g
    for v in range(g.n):
        if ix.deg[v] != 3:
            continue
        tris = [f for f in ix.vertex_faces[v] if ix.flen[f] == 3]
        for u in sorted(g.adj[v]):
            if ix.in_graph_triangle(u, v):
                continue
            e = g.edge_index[(min(u, v), max(u, v))]
            rule, amt = ("R2a", EIGHTH) if ix.deg[u] == 3 else ("R2b", QUARTER)
            for t in tris:
                for side in ix.edge_faces[e]:  # the same face twice for a bridge
                    out.append(Transfer(rule, ("f", side), ("f", t), amt))
    return out


def _b_r3(ix, st):
    return [Transfer("R3", ("v", v), ("f", f), Fraction(1))
            for v in range(ix.g.n) if ix.deg[v] == 4
            for f in ix.vertex_faces[v] if ix.flen[f] in (3, 4)]


def _b_r4(ix, st):
    return [Transfer("R4", ("v", v), ("f", f), Fraction(1))
            for v in range(ix.g.n) if ix.deg[v] == 5
            for f in ix.vertex_faces[v] if ix.flen[f] == 4]


def _b_r5_match(ix, v, d) -> bool:
    w = other(d.middles, v)
    return (ix.deg[w] == 3 and (_pair_roles(ix, d.sides, "4", "4") or _pair_roles(ix, d.sides, "3", "5+"))) or (
        ix.deg[w] == 5 and _pair_roles(ix, d.sides, "3", "3"))


def _b_r5(ix, st):
    return [Transfer("R5", ("v", v), ("f", f), Fraction(3, 2))
            for v in range(ix.g.n) if ix.deg[v] == 5
            for d in ix.middle_of.get(v, []) if _b_r5_match(ix, v, d)
            for f in d.faces]


def _b_r6(ix, st):
    return [Transfer("R6", ("v", v), ("f", f), Fraction(1))
            for v in range(ix.g.n) if ix.deg[v] == 5
            for d in ix.middle_of.get(v, []) if not _b_r5_match(ix, v, d)
            for f in d.faces]


def _faces_as_middle(ix, v) -> set[int]:
    return {f for d in ix.middle_of.get(v, []) for f in d.faces}


def _b_r7(ix, st):
    out = []
    for f in range(len(ix.walks)):
        if ix.flen[f] != 3:
            continue
        for v in ix.face_vertices[f]:
            if ix.deg[v] != 5 or f in _faces_as_middle(ix, v):
                continue
            u, w = [x for x in ix.face_vertices[f] if x != v]
            if ix.deg[u] >= 4 and ix.deg[w] >= 4:
                out.append(Transfer("R7a", ("v", v), ("f", f), Fraction(1)))
            else:
                out.append(Transfer("R7b", ("v", v), ("f", f), Fraction(2)))
    return out


def _b_r8(ix, st):
    out = []
    for v in range(ix.g.n):
        if ix.deg[v] < 6:
            continue
        mid = _faces_as_middle(ix, v)
        for f in ix.vertex_faces[v]:
            if ix.flen[f] == 4:
                out.append(Transfer("R8", ("v", v), ("f", f), Fraction(1)))
            elif ix.flen[f] == 3 and f not in mid:
                out.append(Transfer("R8", ("v", v), ("f", f), Fraction(2)))
    return out


def _b_r9_match(ix, v, d):
    w = other(d.middles, v)
    return ix.deg[w] == 3 and bool(_pair_roles(ix, d.sides, "3", "4"))


def _b_r10_match(ix, v, d):
    w = other(d.middles, v)
    return ix.deg[w] == 3 and bool(_pair_roles(ix, d.sides, "4", "4"))


def _b_six(rule, amount, pred):
    def fn(ix, st):
        return [Transfer(rule, ("v", v), ("f", f), amount)
                for v in range(ix.g.n) if ix.deg[v] == 6
                for d in ix.middle_of.get(v, []) if pred(ix, v, d)
                for f in d.faces]
    return fn


def _b_r12(ix, st):
    return [Transfer("R12", ("v", v), ("f", f), Fraction(7, 4))
            for v in range(ix.g.n) if ix.deg[v] >= 7
            for d in ix.middle_of.get(v, [])
            for f in d.faces]


def _b_r13(ix, st):
    out = []
    for d in ix.diamonds:
        f, g = d.faces
        cf, cg = st.charge[("f", f)], st.charge[("f", g)]
        for giver, taker, cgv, ctk in ((g, f, cg, cf), (f, g, cf, cg)):
            if cgv > 0 and ctk < 0:
                out.append(Transfer("R13", ("f", giver), ("f", taker), min(cgv, -ctk)))
    return out


RULES_B: list[tuple[str, Callable]] = [
    ("R1", _b_r1), ("R2", _b_r2), ("R3", _b_r3), ("R4", _b_r4), ("R5", _b_r5), ("R6", _b_r6),
    ("R7", _b_r7), ("R8", _b_r8),
    ("R9", _b_six("R9", Fraction(7, 4), _b_r9_match)),
    ("R10", _b_six("R10", Fraction(3, 2), _b_r10_match)),
    ("R11", _b_six("R11", Fraction(5, 4), lambda ix, v, d: not _b_r9_match(ix, v, d) and not _b_r10_match(ix, v, d))),
    ("R12", _b_r12), ("R13", _b_r13),
]


def apply_rules(pg: PlaneGraph, st: ChargeState, check: bool = True) -> ChargeState:
    """Apply the scheme's rules in order; each numbered rule fires against the state before it."""
    ix = StructureIndex(pg)
    st = st.copy()
    rules = RULES_A if st.scheme == "A" else RULES_B
    for _name, fn in rules:
        before = st.total()
        transfers = fn(ix, st)
        for t in transfers:
            st.charge[t.source] -= t.amount
            st.charge[t.target] += t.amount
        st.ledger.extend(transfers)
        if check and st.total() != before:
            raise AssertionError(f"rule {_name} changed the total charge")
    return st


# --- audits ----------------------------------------------------------------------

@dataclass
class AuditReport:
    total: Fraction
    initial_total: Fraction
    negatives: list[tuple[str, Fraction]]

    @property
    def conserved(self) -> bool:
        return self.total == self.initial_total

    def to_json(self) -> dict:
        return {
            "total": str(self.total),
            "initial_total": str(self.initial_total),
            "conserved": self.conserved,
            "negatives": [{"element": e, "charge": str(c)} for e, c in self.negatives],
        }


def audit(pg: PlaneGraph, st: ChargeState) -> AuditReport:
    neg = [(element_name(pg, el), c) for el, c in sorted(st.charge.items()) if c < 0]
    return AuditReport(st.total(), st.initial_total, neg)


def transfer_json(pg: PlaneGraph, t: Transfer) -> dict:
    return {"rule": t.rule, "source": element_name(pg, t.source), "target": element_name(pg, t.target),
            "amount": str(t.amount)}


@dataclass
class DegreeLemmaRow:
    vertex: int
    degree: int
    k: int
    m: int

    @property
    def holds(self) -> bool:
        return self.degree >= 3 * self.k + 2 * self.m


def degree_lemma_audit(pg: PlaneGraph) -> list[DegreeLemmaRow]:
    """Per vertex: diamonds with it as a middle (k) and other incident 3/4-faces (m), counted as faces."""
    if not is_family_free(pg.graph, (Cycle(5), Cycle(6), Cycle(7))):
        raise PreconditionError("degree lemma needs a graph without 5-, 6- and 7-cycles")
    ix = StructureIndex(pg)
    rows = []
    for v in range(pg.graph.n):
        mids = ix.middle_of.get(v, [])
        covered = {f for d in mids for f in d.faces}
        m = sum(1 for f in ix.vertex_faces[v] if ix.flen[f] in (3, 4) and f not in covered)
        rows.append(DegreeLemmaRow(v, ix.deg[v], len(mids), m))
    return rows
