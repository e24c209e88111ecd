"""Built-in configuration catalogs for k = 4.

Each vertex is written `name:degree` where the degree is the host degree of
the drawn vertex. A trailing `+` means "at least" (used for boundary
vertices), `-` means "at most", and `*` marks a boundary vertex. Host degrees
are instantiated at the minimum, which is the worst case for the budgets.

Diamonds are K4 minus an edge: the two middle vertices are adjacent and both
sides are adjacent to both middles.
"""

from __future__ import annotations

from .configurations import Configuration, DegreeRule, check_forb, classify, f_free_subsets
from .errors import MalformedInputError
from .graph import Graph

_C = {
    "C1": ("v:2-", ""),
    "C2": ("a:3 b:3 c:3", "a-b b-c"),
    "C3": ("a:3 b:3 c:3", "a-b b-c a-c"),
    # the worked example's labels: u1 pendant, u2/u3 middles, u4 side, v boundary side
    "C4": ("u1:3 u2:4 u3:3 u4:4 v:5+*", "u1-u2 u2-u3 u2-u4 u2-v u3-u4 u3-v"),
    "C5": ("m1:3 m2:3 s1:5+* s2:5+*", "m1-m2 m1-s1 m1-s2 m2-s1 m2-s2"),
    "C6": ("m:3 M:5+* s:3 S:5+*", "m-M m-s m-S M-s M-S"),
    "C7": ("u:5 v:4 x:3 y:3", "u-v u-x u-y v-x v-y"),
    "C8": ("u:4 v:4 x:3 y:5 a:3 b:4 c:4+*",
           "u-v u-x u-y v-x v-y y-a y-b y-c a-b a-c"),
    "C9": ("u:4 v:3 x:4 y:5+* a:4 b:3 c:4 d:5+*",
           "u-v u-x u-y v-x v-y a-b a-c a-d b-c b-d u-a"),
    "C10": ("u:4 v:3 x:5+* y:5 a:3 b:4+* c:4",
            "u-v u-x u-y v-x v-y y-a y-b y-c a-b a-c"),
    "C11": ("u:4 v:4 x:3 y:4 z:3", "u-v u-x u-y v-x v-y u-z"),
    "C12": ("u:4 v:4 x:3 y:4 a:4 b:3 c:4 d:5+*",
            "u-v u-x u-y v-x v-y a-b a-c a-d b-c b-d u-a"),
    "C13": ("u:5 v:3 x:4 y:5+* a:5 b:3 c:4 d:5+* k:5 j:3",
            "u-v u-x u-y v-x v-y a-b a-c a-d b-c b-d k-j k-a k-u j-a j-u"),
}

_D = {
    "D1": ("v:2-", ""),
    "D2": ("a:3 b:3 c:4", "a-b b-c a-c"),
    "D3": ("u:3 v:6 x:3 y:4 a:4 b:4 c:3", "u-v u-x u-y v-x v-y v-a v-b v-c c-a c-b"),
    "D4": ("m1:3 m2:3 s1:4+* s2:4+*", "m1-m2 m1-s1 m1-s2 m2-s1 m2-s2"),
    "D5": ("u:4 v:5 x:3 y:3", "u-v u-x u-y v-x v-y"),
    "D6": ("u:4 v:3 x:4 y:4", "u-v u-x u-y v-x v-y"),
    "D7": ("u:3 v:5 x:4 y:4 z:3", "u-v u-x u-y v-x v-y v-z"),
    "D8": ("u:5 v:5 x:3 y:3 z:3", "u-v u-x u-y v-x v-y v-z"),
    "D8p": ("u:5 v:5 x:3 y:3 z:3", "u-v u-x u-y v-x v-y v-z u-z"),
    "D9": ("u:3 v:3 w:3", "u-v v-w"),
    "D9p": ("u:3 v:3 w:3", "u-v v-w u-w"),
    # a: middle 3-vertex, c: middle 5-vertex, b: side 4-vertex, d: side 3-vertex
    "D10": ("a:3 b:4 c:5 d:3", "a-c a-b a-d c-b c-d"),
    "D11": ("v:5 u:3 w:3 x:3", "v-u v-w u-w v-x"),
    "D11p": ("v:5 u:3 w:3 x:3", "v-u v-w u-w v-x x-w"),
    "D11pp": ("v:5 u:3 w:3 x:3", "v-u v-w u-w v-x x-u"),
    "D12": ("v:6 u:3 w:3 x:3 y:3", "v-u v-w u-w v-x v-y x-y"),
}

# T(3,3,3) is also part of (D2); the detector looks for both triangles
_D_EXTRA_PATTERNS = {"D2": [("a:3 b:3 c:3", "a-b b-c a-c")]}

C_NAMES = list(_C)
D_NAMES = list(_D)


def _build(name: str, verts: str, edges: str, k: int = 4) -> Configuration:
    ids, hosts, rules, boundary = [], [], [], set()
    for tok in verts.split():
        vid, deg = tok.split(":")
        if deg.endswith("*"):
            boundary.add(vid)
            deg = deg[:-1]
        op = "eq"
        if deg.endswith("+"):
            op, deg = "ge", deg[:-1]
        elif deg.endswith("-"):
            op, deg = "le", deg[:-1]
        ids.append(vid)
        hosts.append(int(deg))
        rules.append(DegreeRule(op, int(deg)))
    pos = {x: i for i, x in enumerate(ids)}
    pairs = tuple((pos[a], pos[b]) for a, b in (e.split("-") for e in edges.split()))
    h = Graph(len(ids), pairs, tuple(ids))
    ext = tuple(hosts[v] - h.degree(v) for v in range(h.n))
    reduced = frozenset(pos[x] for x in ids if x not in boundary)
    return Configuration(h, reduced, ext, k, None, name, tuple(rules))


def catalog(name: str) -> Configuration:
    key = name.strip().replace("'", "p")
    key = key[:1].upper() + key[1:].lower()
    table = _C if key.startswith("C") else _D
    if key not in table:
        raise MalformedInputError(f"unknown catalog entry {name!r}")
    return _build(key, *table[key])


def catalog_names(which: str) -> list[str]:
    if which.upper() == "C":
        return list(C_NAMES)
    if which.upper() == "D":
        return list(D_NAMES)
    raise MalformedInputError(f"catalog must be C or D, got {which!r}")


def detection_patterns(which: str) -> list[Configuration]:
    """Catalog entries plus extra drawings that the detector also matches."""
    out = []
    for name in catalog_names(which):
        out.append(catalog(name))
        if which.upper() == "D":
            for verts, edges in _D_EXTRA_PATTERNS.get(name, []):
                out.append(_build(name, verts, edges))
    return out


# classification each entry is expected to reach
EXPECTED = {
    **{n: "full" for n in C_NAMES},
    **{n: "enhanced-weak" for n in D_NAMES if n not in ("D1", "D4")},
    "D1": "weak",
    "D4": "weak",
}


def expectation_failures(name: str, rep) -> list[str]:
    """Which expected properties a catalog entry's report misses (empty when all hold)."""
    want = EXPECTED[name]
    out = []
    if want == "full" and not rep.full:
        out.append("not fully reducible")
    if want == "enhanced-weak" and not rep.enhanced_weak:
        out.append("not enhanced-weak reducible")
    if want == "weak" and not rep.weak:
        out.append("not weakly reducible")
    if name == "D4" and rep.enhanced_weak:
        out.append("unexpectedly enhanced-weak")
    if name == "D10":
        cfg = catalog(name)
        if rep.enhanced_fix != {cfg.vid("d")}:
            out.append(f"enhanced Fix is {cfg.names(rep.enhanced_fix)}, expected ['d']")
    return out


def verify_catalog(which: str, family, attachable_only: bool = True, jobs: int = 1):
    """Classify every entry; returns [(name, report, failures)] in catalog order."""
    names = catalog_names(which)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_classify_entry, names, [family] * len(names),
                                    [attachable_only] * len(names)))
    else:
        reports = [_classify_entry(n, family, attachable_only) for n in names]
    return [(n, r, expectation_failures(n, r)) for n, r in zip(names, reports)]


def _classify_entry(name, family, attachable_only):
    return classify(catalog(name), family, attachable_only)


def gained_forb_sets(name: str, family, reference_book: int = 5):
    """F-free sets that appear because `family` has no book, with their FORB outcome."""
    from .forbidden import Book

    cfg = catalog(name)
    size = cfg.k - 2
    with_book = set(f_free_subsets(cfg, tuple(family) + (Book(reference_book),), size))
    out = []
    for e in check_forb(cfg, family, size, attachable_only=True):
        if e.subset not in with_book:
            out.append((cfg.names(e.subset), e.passed))
    return out
