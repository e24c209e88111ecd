"""Configurations and their FIX / FORB / loose reducibility checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .choosability import colorable_for_all_assignments, lowered_at, minus_set
from .errors import ContractError, MalformedInputError
from .forbidden import Family, is_f_free_set
from .graph import Graph, induced_subgraph


@dataclass(frozen=True)
class DegreeRule:
    """Degree predicate used by the detector: op is 'eq', 'ge' or 'le'."""

    op: str
    value: int

    def holds(self, d: int) -> bool:
        if self.op == "eq":
            return d == self.value
        if self.op == "ge":
            return d >= self.value
        return d <= self.value

    def __str__(self):
        return f"{self.value}{ {'eq': '', 'ge': '+', 'le': '-'}[self.op] }"


@dataclass(frozen=True)
class Configuration:
    h: Graph
    reduced: frozenset[int]
    ext_degree: tuple[int, ...]
    k: int = 4
    declared_fix: frozenset[int] | None = None
    name: str = ""
    degree_rules: tuple[DegreeRule, ...] | None = None

    def __post_init__(self):
        if not self.reduced:
            raise MalformedInputError("reduced part must be nonempty")
        if not set(self.reduced) <= set(range(self.h.n)):
            raise MalformedInputError("reduced part outside the configuration")
        if len(self.ext_degree) != self.h.n or any(e < 0 for e in self.ext_degree):
            raise MalformedInputError("ext_degree must be a nonnegative entry per vertex")
        if self.declared_fix is not None and not set(self.declared_fix) <= set(self.reduced):
            raise MalformedInputError("declared Fix set must lie in the reduced part")
        for v in self.reduced:
            if self.budget_of(v) < 0:
                raise MalformedInputError(f"negative budget at {self.h.label(v)}")

    @property
    def boundary(self) -> frozenset[int]:
        return frozenset(range(self.h.n)) - self.reduced

    def host_degree(self, v: int) -> int:
        return self.h.degree(v) + self.ext_degree[v]

    def reduced_degree(self, v: int) -> int:
        return len(self.h.adj[v] & self.reduced)

    def outside_degree(self, v: int) -> int:
        """Neighbors of v in the host that are not in the reduced part."""
        return self.host_degree(v) - self.reduced_degree(v)

    def budget_of(self, v: int) -> int:
        return self.k - self.host_degree(v) + self.reduced_degree(v)

    def budgets(self) -> dict[int, int]:
        return {v: self.budget_of(v) for v in sorted(self.reduced)}

    def rule(self, v: int) -> DegreeRule:
        if self.degree_rules:
            return self.degree_rules[v]
        return DegreeRule("eq" if v in self.reduced else "ge", self.host_degree(v))

    @property
    def reduced_graph(self) -> tuple[Graph, list[int]]:
        return induced_subgraph(self.h, self.reduced)

    def vid(self, name) -> int:
        return self.h.index_of(name)

    def names(self, vs: Iterable[int]) -> list[str]:
        return [self.h.label(v) for v in sorted(vs)]


# --- core checks -------------------------------------------------------------

def _run(cfg: Configuration, budget: dict[int, int]):
    sub, old = cfg.reduced_graph
    verdict = colorable_for_all_assignments(sub, [budget[v] for v in old])
    if verdict.always:
        return True, None
    return False, {cfg.h.label(old[i]): cs for i, cs in verdict.witness.items()}


def check_fix(cfg: Configuration, v: int) -> tuple[bool, dict | None]:
    if v not in cfg.reduced:
        raise ContractError(f"{cfg.h.label(v)} is not in the reduced part")
    base = cfg.budgets()
    keys = sorted(base)
    lowered = dict(zip(keys, lowered_at([base[u] for u in keys], keys.index(v))))
    return _run(cfg, lowered)


def attachable(cfg: Configuration, subset: Iterable[int]) -> bool:
    """Can a vertex outside the configuration be adjacent to every vertex of subset?"""
    return all(cfg.ext_degree[v] > 0 for v in subset)


def f_free_subsets(cfg: Configuration, family: Family, max_size: int) -> list[tuple[int, ...]]:
    """All F-free I within the reduced part with |I| <= max_size (apex test on the whole h)."""
    out = []
    red = sorted(cfg.reduced)
    for s in range(max_size + 1):
        for subset in combinations(red, s):
            if is_f_free_set(cfg.h, subset, family):
                out.append(subset)
    return out


@dataclass
class ForbEntry:
    subset: tuple[int, ...]
    attachable: bool
    passed: bool | None  # None when skipped as not attachable
    witness: dict | None = None


def forb_budget(cfg: Configuration, subset: Iterable[int]) -> dict[int, int]:
    base = cfg.budgets()
    keys = sorted(base)
    idx = [keys.index(v) for v in subset]
    return dict(zip(keys, minus_set([base[u] for u in keys], idx)))


def check_forb(cfg: Configuration, family: Family, max_size: int, attachable_only: bool = True) -> list[ForbEntry]:
    """Check the budget drop on every F-free set of size <= max_size.

    With attachable_only, sets containing a vertex that has no edge leaving
    the configuration are listed but not checked: no earlier-colored vertex
    can be adjacent to it.
    """
    out = []
    for subset in f_free_subsets(cfg, family, max_size):
        att = attachable(cfg, subset)
        if attachable_only and not att:
            out.append(ForbEntry(subset, False, None))
            continue
        ok, wit = _run(cfg, forb_budget(cfg, subset))
        out.append(ForbEntry(subset, att, ok, wit))
    return out


def check_loose(cfg: Configuration, subset: Iterable[int], family: Family) -> bool:
    subset = tuple(sorted(set(subset)))
    if len(subset) != cfg.k - 2:
        raise ContractError(f"loose sets have size k-2 = {cfg.k - 2}")
    if not set(subset) <= cfg.reduced:
        raise ContractError("loose sets lie in the reduced part")
    if not is_f_free_set(cfg.h, subset, family):
        raise ContractError("set is not F-free")
    return _run(cfg, forb_budget(cfg, subset))[0]


# --- classification ------------------------------------------------------------

@dataclass
class ReducibilityReport:
    name: str
    budgets: dict[int, int]
    fix_pass: set[int]
    fix_fail: dict[int, dict]
    forb: list[ForbEntry]
    loose_sets: list[tuple[int, ...]]
    full: bool
    enhanced_weak: bool
    weak: bool
    enhanced_fix: set[int]
    fix: set[int]
    declared_fix_ok: bool | None
    labels: list[str] = field(default_factory=list)

    @property
    def classification(self) -> str:
        if self.full:
            return "full"
        if self.enhanced_weak:
            return "enhanced-weak"
        if self.weak:
            return "weak"
        return "none"

    def forb_holds(self, size: int) -> bool:
        return all(e.passed is not False for e in self.forb if len(e.subset) <= size)

    def to_json(self) -> dict:
        lab = self.labels
        name = lambda vs: [lab[v] for v in sorted(vs)]  # noqa: E731
        return {
            "name": self.name,
            "classification": self.classification,
            "satisfies": {"full": self.full, "enhanced-weak": self.enhanced_weak, "weak": self.weak},
            "budgets": {lab[v]: b for v, b in sorted(self.budgets.items())},
            "fix_pass": name(self.fix_pass),
            "enhanced_fix": name(self.enhanced_fix),
            "fix": name(self.fix),
            "declared_fix_ok": self.declared_fix_ok,
            "forb": [
                {"set": name(e.subset), "attachable": e.attachable,
                 "result": "skipped" if e.passed is None else ("pass" if e.passed else "fail")}
                for e in self.forb
            ],
            "loose_sets": [name(s) for s in self.loose_sets],
            "witnesses": {
                **{f"FIX@{lab[v]}": w for v, w in sorted(self.fix_fail.items())},
                **{"FORB@{" + ",".join(name(e.subset)) + "}": e.witness for e in self.forb if e.passed is False},
            },
        }


def classify(cfg: Configuration, family: Family, attachable_only: bool = True) -> ReducibilityReport:
    k = cfg.k
    fix_pass, fix_fail = set(), {}
    for v in sorted(cfg.reduced):
        ok, wit = check_fix(cfg, v)
        if ok:
            fix_pass.add(v)
        else:
            fix_fail[v] = wit
    forb = check_forb(cfg, family, k - 2, attachable_only)
    loose = [e.subset for e in forb if len(e.subset) == k - 2 and e.passed]
    holds_weak = all(e.passed is not False for e in forb)
    holds_enh = all(e.passed is not False for e in forb if len(e.subset) <= k - 3)
    eligible = {v for v in cfg.reduced if cfg.outside_degree(v) <= k - 3}
    enhanced_fix = fix_pass & eligible
    full = holds_weak and fix_pass == set(cfg.reduced)
    enhanced = holds_enh and bool(enhanced_fix)
    weak = holds_weak and bool(fix_pass)
    if cfg.declared_fix is not None:
        fix = set(cfg.declared_fix)
    elif enhanced:
        fix = enhanced_fix
    else:
        fix = set(sorted(fix_pass)[:1])
    declared_ok = None if cfg.declared_fix is None else set(cfg.declared_fix) <= fix_pass
    return ReducibilityReport(cfg.name, cfg.budgets(), fix_pass, fix_fail, forb, loose, full, enhanced, weak,
                              enhanced_fix, fix, declared_ok, [cfg.h.label(v) for v in range(cfg.h.n)])


# --- JSON ----------------------------------------------------------------------

def config_from_dict(data: dict, name: str = "") -> Configuration:
    try:
        verts = data["vertices"]
        ids = [str(v["id"]) for v in verts]
        if len(set(ids)) != len(ids):
            raise MalformedInputError("duplicate vertex ids")
        pos = {x: i for i, x in enumerate(ids)}
        edges = tuple((pos[str(u)], pos[str(v)]) for u, v in data.get("edges", []))
        h = Graph(len(ids), edges, tuple(ids))
        ext = tuple(int(v.get("ext_degree", 0)) for v in verts)
        reduced = frozenset(i for i, v in enumerate(verts) if v.get("in_reduced", True))
        fix = frozenset(i for i, v in enumerate(verts) if v.get("in_fix", False))
        return Configuration(h, reduced, ext, int(data.get("k", 4)), fix or None, name or data.get("name", ""))
    except (KeyError, TypeError) as exc:
        raise MalformedInputError(f"bad configuration JSON: {exc!r}") from None


def config_to_dict(cfg: Configuration) -> dict:
    fix = cfg.declared_fix or frozenset()
    return {
        "name": cfg.name,
        "k": cfg.k,
        "vertices": [
            {"id": cfg.h.label(v), "ext_degree": cfg.ext_degree[v], "in_reduced": v in cfg.reduced, "in_fix": v in fix}
            for v in range(cfg.h.n)
        ],
        "edges": [[cfg.h.label(u), cfg.h.label(v)] for u, v in cfg.h.edges],
    }
