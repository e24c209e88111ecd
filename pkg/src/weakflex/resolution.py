"""Resolutions: greedy construction, verification, tight-vertex refactoring,
distribution certificates and the exact request-satisfaction oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .catalog import detection_patterns
from .choosability import colorable_for_all_assignments, color_with_lists
from .configurations import Configuration, ReducibilityReport, classify, forb_budget
from .detection import induced_matches
from .errors import ContractError, MalformedInputError, NoColoringError, PreconditionError, ResourceGuardError, StuckError
from .forbidden import Family, book_bound, format_family, is_f_free_set, is_family_free
from .graph import Graph, induced_subgraph, plain

KINDS = ("full", "enhanced-weak", "weak", "single")
COLORING_LIMIT = 5000


@dataclass(frozen=True)
class Step:
    kind: str
    vertices: tuple[int, ...]  # H_i, host ids
    reduced: tuple[int, ...]  # R_i
    fix: tuple[int, ...] = ()
    source: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MalformedInputError(f"unknown step kind {self.kind!r}")
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        object.__setattr__(self, "reduced", tuple(sorted(self.reduced)))
        object.__setattr__(self, "fix", tuple(sorted(self.fix)))

    def to_json(self, g: Graph) -> dict:
        lab = g.label
        return {"kind": self.kind, "source": self.source, "H": [lab(v) for v in self.vertices],
                "R": [lab(v) for v in self.reduced], "fix": [lab(v) for v in self.fix]}


@dataclass
class Resolution:
    steps: list[Step]
    family: Family
    k: int
    b: int
    beta: int

    def to_json(self, g: Graph) -> dict:
        return {"family": format_family(self.family), "k": self.k, "b": self.b, "beta": self.beta,
                "steps": [s.to_json(g) for s in self.steps]}


def default_beta(family: Family) -> int | None:
    ell = book_bound(family)
    return None if ell is None else 10 * ell


def epsilon_parameters(k: int, b: int, beta: int) -> dict[str, Fraction]:
    p = Fraction(1, k ** (b + beta))
    eps_prime = p ** (k - 1)
    return {"p": p, "eps_prime": eps_prime, "eps_prime_over_b": eps_prime / b}


def _residual_degree(g: Graph, alive: frozenset[int], v: int) -> int:
    return len(g.adj[v] & alive)


def step_configuration(g: Graph, alive: Iterable[int], vertices: Iterable[int], reduced: Iterable[int],
                       k: int, name: str = "") -> Configuration:
    """The configuration H = g_alive[vertices] with reduced part `reduced`, degrees taken in g_alive."""
    alive = frozenset(alive)
    h, old = induced_subgraph(g, vertices)
    labels = tuple(g.label(v) for v in old)
    h = Graph(h.n, h.edges, labels)
    pos = {v: i for i, v in enumerate(old)}
    ext = tuple(_residual_degree(g, alive, v) - h.degree(i) for i, v in enumerate(old))
    return Configuration(h, frozenset(pos[v] for v in reduced), ext, k, None, name)


# --- looseness and tightness ----------------------------------------------------

def _is_loose(cfg: Configuration, subset: Sequence[int], family: Family) -> bool:
    """`subset` (configuration indices) is an F-free set of size k-2 whose budget drop stays colorable."""
    if len(subset) != cfg.k - 2 or not set(subset) <= cfg.reduced:
        return False
    if not is_f_free_set(cfg.h, subset, family):
        return False
    sub, old = cfg.reduced_graph
    budget = forb_budget(cfg, subset)
    return colorable_for_all_assignments(sub, [budget[v] for v in old]).always


@dataclass
class _Context:
    """Residuals and configurations re-derived from a resolution."""

    g: Graph
    res: Resolution
    alive_before: list[frozenset[int]]
    configs: list[Configuration | None]
    errors: list[str | None]

    def host_to_cfg(self, j: int, vs: Iterable[int]) -> tuple[int, ...]:
        pos = {v: i for i, v in enumerate(self.res.steps[j].vertices)}
        return tuple(sorted(pos[v] for v in vs))

    def neighbourhood(self, i: int, v: int) -> frozenset[int]:
        return self.g.adj[v] & self.alive_before[i]

    def loose_in(self, j: int, vs: Iterable[int]) -> bool:
        cfg = self.configs[j]
        return cfg is not None and _is_loose(cfg, self.host_to_cfg(j, vs), self.res.family)

    def tight_pairs(self) -> list[tuple[int, int]]:
        """(i, j) with single step i tight for the later step j."""
        k = self.res.k
        out = []
        for i, s in enumerate(self.res.steps):
            if s.kind != "single":
                continue
            v = s.reduced[0]
            nb = self.neighbourhood(i, v)
            if len(nb) != k - 2:
                continue
            for j in range(i + 1, len(self.res.steps)):
                if nb <= set(self.res.steps[j].reduced) and not self.loose_in(j, nb):
                    out.append((i, j))
        return out


def _context(g: Graph, res: Resolution) -> _Context:
    alive = frozenset(range(g.n))
    before, configs, errors = [], [], []
    for s in res.steps:
        before.append(alive)
        try:
            if not set(s.vertices) <= alive:
                raise MalformedInputError("H is not inside the current residual")
            if not set(s.reduced) <= set(s.vertices):
                raise MalformedInputError("R is not inside H")
            configs.append(step_configuration(g, alive, s.vertices, s.reduced, res.k, s.source))
            errors.append(None)
        except MalformedInputError as exc:
            configs.append(None)
            errors.append(str(exc))
        alive = alive - set(s.reduced)
    before.append(alive)
    return _Context(g, res, before, configs, errors)


# --- verification ---------------------------------------------------------------

@dataclass
class ResolutionReport:
    valid: bool
    failures: list[dict]
    tight_counts: list[int]
    reports: list[ReducibilityReport | None] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"valid": self.valid, "failures": self.failures, "tight_counts": self.tight_counts}


def _forward_failures(ctx: _Context, i: int) -> list[tuple[int, int]]:
    """Fix vertices of step i whose neighbourhood in some later R_j is k-2 large and not loose."""
    k = ctx.res.k
    bad = []
    for v in ctx.res.steps[i].fix:
        nb = ctx.neighbourhood(i, v)
        for j in range(i + 1, len(ctx.res.steps)):
            inter = nb & set(ctx.res.steps[j].reduced)
            if len(inter) > k - 3 and not (len(inter) == k - 2 and ctx.loose_in(j, inter)):
                bad.append((v, j))
    return bad


def verify_resolution(g, res: Resolution) -> ResolutionReport:
    g = plain(g)
    k = res.k
    ctx = _context(g, res)
    failures: list[dict] = []
    reports: list[ReducibilityReport | None] = []

    def fail(step, reason, detail):
        failures.append({"step": step, "reason": reason, "detail": detail})

    if not is_family_free(g, res.family):
        fail(None, "not-free", f"graph is not {format_family(res.family)}-free")
    for i, s in enumerate(res.steps):
        cfg = ctx.configs[i]
        if not s.reduced:
            fail(i, "empty", "reduced part is empty")
        if len(s.reduced) > res.b:
            fail(i, "size", f"|R| = {len(s.reduced)} > b = {res.b}")
        if cfg is None:
            fail(i, "structure", ctx.errors[i])
            reports.append(None)
            continue
        if s.kind == "single":
            reports.append(None)
            deg = _residual_degree(g, ctx.alive_before[i], s.reduced[0]) if s.reduced else -1
            if len(s.vertices) != 1 or s.vertices != s.reduced or deg != k - 2:
                fail(i, "single", f"single-vertex step needs one vertex of residual degree {k - 2}")
            continue
        rep = classify(cfg, res.family)
        reports.append(rep)
        fix = set(ctx.host_to_cfg(i, s.fix)) if set(s.fix) <= set(s.vertices) else None
        if fix is None or not fix:
            fail(i, "fix", "Fix set must be a nonempty part of R")
            continue
        if s.kind == "full" and not rep.full:
            fail(i, "classification", f"{s.source or 'step'} is {rep.classification}, not full")
        elif s.kind == "enhanced-weak" and not (rep.enhanced_weak and fix <= rep.enhanced_fix):
            fail(i, "classification", f"{s.source or 'step'} is not enhanced-weak with this Fix set")
        elif s.kind == "weak" and not (rep.weak and fix <= rep.fix_pass):
            fail(i, "classification", f"{s.source or 'step'} is not weak with this Fix set")
        for v, j in _forward_failures(ctx, i):
            fail(i, "forward", f"Fix vertex {g.label(v)} has a large non-loose neighbourhood in step {j}")
    rest = ctx.alive_before[-1]
    if rest:
        if len(rest) > res.b:
            fail(None, "size", f"final residual has {len(rest)} > b vertices")
        cfg = step_configuration(g, rest, rest, rest, k, "residual")
        if not classify(cfg, res.family).weak:
            fail(None, "residual", "final residual is not reducible with empty boundary")
    tight = [0] * len(res.steps)
    for _i, j in ctx.tight_pairs():
        tight[j] += 1
    for j, c in enumerate(tight):
        if c > res.beta:
            fail(j, "tight", f"{c} tight vertices exceed beta = {res.beta}")
    return ResolutionReport(not failures, failures, tight, reports)


# --- construction ---------------------------------------------------------------

def _step_from_report(kind_mode: str, cfg: Configuration, rep: ReducibilityReport, old: Sequence[int],
                      name: str) -> Step | None:
    to_host = lambda vs: tuple(old[v] for v in vs)  # noqa: E731
    H, R = to_host(range(cfg.h.n)), to_host(cfg.reduced)
    if kind_mode == "full":
        return Step("full", H, R, R, name) if rep.full else None
    if rep.enhanced_weak:
        return Step("enhanced-weak", H, R, to_host(rep.enhanced_fix), name)
    if rep.weak:
        return Step("weak", H, R, to_host(sorted(rep.fix_pass)), name)
    return None


def build_resolution(g, family: Family, k: int = 4, catalog: str | None = "D", b: int | None = None,
                     beta: int | None = None) -> Resolution:
    """Greedy resolution: catalog entries by index, then low-degree vertices, then degree-(k-2) vertices.

    With catalog C every step must be fully reducible; otherwise steps are
    enhanced-weak, weak or single vertices of degree k-2. Runs until the
    residual is empty. Raises StuckError with the residual when nothing applies.
    """
    g = plain(g)
    if not is_family_free(g, family):
        raise PreconditionError(f"input graph is not {format_family(family)}-free")
    mode = "full" if catalog and catalog.upper() == "C" else "weak"
    patterns = []
    if catalog and k == 4:
        patterns = [p for p in detection_patterns(catalog) if p.name not in ("C1", "D1")]
    alive = frozenset(range(g.n))
    steps: list[Step] = []
    while alive:
        step = None
        sub, old = induced_subgraph(g, alive)
        for pat in patterns:
            for mp in induced_matches(sub, pat):
                host = [old[x] for x in mp]
                red = [host[v] for v in sorted(pat.reduced)]
                if b is not None and len(red) > b:
                    break
                cfg = step_configuration(g, alive, host, red, k, pat.name)
                step = _step_from_report(mode, cfg, classify(cfg, family), sorted(host), pat.name)
                if step:
                    break
            if step:
                break
        if step is None:
            degs = {v: _residual_degree(g, alive, v) for v in sorted(alive)}
            low = [v for v, d in degs.items() if d <= k - 3]
            mid = [v for v, d in degs.items() if d == k - 2]
            if low or (mid and mode == "full"):
                v = (low or mid)[0]
                H = (v, *sorted(g.adj[v] & alive))
                step = Step("full" if mode == "full" else "enhanced-weak", H, (v,), (v,),
                            "low-degree" if low else "degree-k-2")
            elif mid:
                step = Step("single", (mid[0],), (mid[0],), (), "degree-k-2")
        if step is None:
            residual, _ = induced_subgraph(g, alive)
            raise StuckError(f"no reducible configuration in a residual of {len(alive)} vertices",
                             residual=residual, steps=steps)
        steps.append(step)
        alive = alive - set(step.reduced)
    bound = b if b is not None else max((len(s.reduced) for s in steps), default=1)
    res = Resolution(steps, tuple(family), k, bound, 0)
    _settle_weak_fix(g, res)
    ctx = _context(g, res)
    tight = [0] * len(steps)
    for _i, j in ctx.tight_pairs():
        tight[j] += 1
    default = default_beta(family)
    res.beta = beta if beta is not None else (default if default is not None else max(tight, default=0))
    return res


def _settle_weak_fix(g: Graph, res: Resolution) -> None:
    """Pick, for each weak step, one Fix vertex whose later neighbourhoods are small or loose."""
    ctx = _context(g, res)
    for i, s in enumerate(res.steps):
        if s.kind != "weak":
            continue
        for v in s.fix:
            trial = replace(s, fix=(v,))
            ctx.res.steps[i] = trial
            if not _forward_failures(ctx, i):
                break
        else:
            ctx.res.steps[i] = replace(s, fix=s.fix[:1])


def refactor_tight(g, res: Resolution) -> Resolution:
    """Attach every tight single-vertex step to the later step it is tight for; parameters become (b+beta, 0)."""
    g = plain(g)
    ctx = _context(g, res)
    pairs = ctx.tight_pairs()
    target: dict[int, int] = {}
    for i, j in pairs:
        target.setdefault(i, j)  # the neighbourhood lies in exactly one later R_j
    absorbed: dict[int, list[int]] = {}
    for i, j in target.items():
        absorbed.setdefault(j, []).append(res.steps[i].reduced[0])
    new_steps = []
    for idx, s in enumerate(res.steps):
        if idx in target:
            continue
        extra = absorbed.get(idx, [])
        if extra:
            s = replace(s, vertices=s.vertices + tuple(extra), reduced=s.reduced + tuple(extra))
            if len(s.reduced) > res.b + res.beta:
                raise ContractError(f"refactored step {idx} exceeds b + beta")
        new_steps.append(s)
    merged = {v for vs in absorbed.values() for v in vs}
    out = Resolution(new_steps, res.family, res.k, res.b + res.beta, 0)
    ctx2 = _context(g, out)
    for idx, s in enumerate(out.steps):
        cfg = ctx2.configs[idx]
        if s.kind not in ("enhanced-weak", "weak") or cfg is None or not set(s.reduced) & merged:
            continue
        rep = classify(cfg, res.family)
        fixset = set(ctx2.host_to_cfg(idx, s.fix))
        if rep.enhanced_weak and fixset <= rep.enhanced_fix:
            out.steps[idx] = replace(s, kind="enhanced-weak")
        elif rep.weak and fixset <= rep.fix_pass:
            out.steps[idx] = replace(s, kind="weak")
    return out


# --- distributions ----------------------------------------------------------------

def all_colorings(g: Graph, lists: Sequence[Sequence[int]], limit: int = COLORING_LIMIT) -> list[tuple[int, ...]]:
    """Every proper L-coloring, in lexicographic order; ResourceGuardError past `limit`."""
    out: list[tuple[int, ...]] = []
    col = [0] * g.n
    lists = [sorted(set(L)) for L in lists]

    def rec(v: int):
        if v == g.n:
            out.append(tuple(col))
            if len(out) > limit:
                raise ResourceGuardError(f"more than {limit} proper colorings")
            return
        for c in lists[v]:
            if all(col[u] != c for u in g.adj[v] if u < v):
                col[v] = c
                rec(v + 1)

    rec(0)
    return out


@dataclass
class DistributionCertificate:
    support: list[tuple[tuple[int, ...], Fraction]]
    p: Fraction
    eps_prime: Fraction

    def to_json(self) -> dict:
        return {"p": str(self.p), "eps_prime": str(self.eps_prime),
                "support": [{"coloring": list(c), "probability": str(q)} for c, q in self.support]}


def distribution_obligations(g: Graph, lists, fix: Iterable[int], family: Family, k: int,
                             p: Fraction, eps_prime: Fraction) -> list[tuple[str, object, Fraction]]:
    """Events (as predicates on colorings) with the probability each must reach.

    Loose sets are taken with g itself as a configuration with empty boundary.
    """
    colors = sorted({c for L in lists for c in L})
    out = []
    for v in sorted(set(fix)):
        for c in sorted(set(lists[v])):
            out.append((f"fix v{v}={c}", ("eq", v, c), eps_prime))
    cfg = Configuration(g, frozenset(range(g.n)), (0,) * g.n, k) if g.n else None
    for size in range(1, k - 1):
        for I in itertools.combinations(range(g.n), size):
            if not is_f_free_set(g, I, family):
                continue
            if size == k - 2 and not _is_loose(cfg, I, family):
                continue
            for c in colors:
                out.append((f"avoid {c} on {list(I)}", ("avoid", I, c), p ** size))
    return out


def _event(coloring, spec) -> bool:
    if spec[0] == "eq":
        return coloring[spec[1]] == spec[2]
    return all(coloring[v] != spec[2] for v in spec[1])


def validate_certificate(cert: DistributionCertificate, g: Graph, lists, fix, family: Family, k: int) -> list[str]:
    """Exact re-check; returns the violated obligations (empty when valid)."""
    bad = []
    if sum(q for _, q in cert.support) != 1 or any(q < 0 for _, q in cert.support):
        bad.append("probabilities do not form a distribution")
    for col, _ in cert.support:
        if any(col[u] == col[v] for u, v in g.edges) or any(col[v] not in lists[v] for v in range(g.n)):
            bad.append(f"{list(col)} is not a proper L-coloring")
    for name, spec, bound in distribution_obligations(g, lists, fix, family, k, cert.p, cert.eps_prime):
        if sum(q for col, q in cert.support if _event(col, spec)) < bound:
            bad.append(name)
    return bad


def distribution_feasible(g, lists, fix: Iterable[int], family: Family, k: int, b: int,
                          beta: int) -> DistributionCertificate | None:
    """Search a distribution on proper L-colorings meeting the Fix, F-free and loose-set bounds.

    Solved as an LP maximising the common slack, then rounded to rationals and
    re-validated exactly.
    """
    g = plain(g)
    lists = [sorted(set(L)) for L in lists]
    params = epsilon_parameters(k, b, beta)
    p, eps_prime = params["p"], params["eps_prime"]
    cols = all_colorings(g, lists)
    if not cols:
        return None
    obligations = distribution_obligations(g, lists, fix, family, k, p, eps_prime)
    n_col = len(cols)
    if obligations:
        A = np.array([[1.0 if _event(c, spec) else 0.0 for c in cols] for _, spec, _ in obligations])
        lb = np.array([float(bound) for _, _, bound in obligations])
        # variables: x_1..x_N, t ; maximise t s.t. A x - t >= lb, sum x = 1
        c_obj = np.zeros(n_col + 1)
        c_obj[-1] = -1.0
        A_ub = np.hstack([-A, np.ones((len(obligations), 1))])
        A_eq = np.hstack([np.ones((1, n_col)), np.zeros((1, 1))])
        sol = linprog(c_obj, A_ub=A_ub, b_ub=-lb, A_eq=A_eq, b_eq=[1.0],
                      bounds=[(0, None)] * n_col + [(None, 1)], method="highs")
        if sol.status != 0 or sol.x[-1] < -1e-12:
            return None
        x = sol.x[:-1]
    else:
        x = np.full(n_col, 1.0 / n_col)
    probs = [Fraction(max(v, 0.0)).limit_denominator(10**9) for v in x]
    total = sum(probs)
    lam = Fraction(1, 10**6)
    probs = [(1 - lam) * q / total + lam / n_col for q in probs]
    cert = DistributionCertificate([(c, q) for c, q in zip(cols, probs) if q > 0], p, eps_prime)
    if validate_certificate(cert, g, lists, fix, family, k):
        return None
    return cert


# --- request satisfaction -------------------------------------------------------------

@dataclass
class RequestInstance:
    lists: list[list[int]]
    request: dict[int, int] | None = None
    weights: dict[tuple[int, int], Fraction] | None = None

    def __post_init__(self):
        self.lists = [sorted(set(int(c) for c in L)) for L in self.lists]
        if any(not L for L in self.lists):
            raise MalformedInputError("every list must be nonempty")
        if self.request is not None and self.weights is not None:
            raise MalformedInputError("give a request or weights, not both")
        if self.request is not None:
            self.request = {int(v): int(c) for v, c in self.request.items()}
            for v, c in self.request.items():
                if not 0 <= v < len(self.lists) or c not in self.lists[v]:
                    raise MalformedInputError(f"request {v}->{c} is not in the list of {v}")
        if self.weights is not None:
            self.weights = {(int(v), int(c)): Fraction(str(w)) for (v, c), w in self.weights.items()}
            if any(w < 0 for w in self.weights.values()):
                raise MalformedInputError("weights must be nonnegative")

    @classmethod
    def widespread(cls, lists) -> "RequestInstance":
        """Request every vertex's smallest list color."""
        return cls(lists, {v: min(L) for v, L in enumerate(lists)})

    def gain(self, v: int, c: int) -> Fraction | int:
        if self.weights is not None:
            return self.weights.get((v, c), Fraction(0))
        return int(self.request is not None and self.request.get(v) == c)

    def total(self) -> Fraction | int:
        if self.weights is not None:
            return sum(self.weights.values(), Fraction(0))
        return len(self.request or {})


def max_satisfied(g, inst: RequestInstance) -> tuple[Fraction | int, list[int]]:
    """Exact optimum over proper L-colorings; ties go to the lexicographically least coloring."""
    g = plain(g)
    n = g.n
    if len(inst.lists) != n:
        raise MalformedInputError("one list per vertex is required")
    if color_with_lists(g, inst.lists) is None:
        raise NoColoringError("the graph has no proper L-coloring")
    best_gain = [max(inst.gain(v, c) for c in inst.lists[v]) for v in range(n)]
    col = [0] * n
    best: list = [None, None]

    def bound_rest(v: int) -> Fraction | int:
        total = 0
        for u in range(v, n):
            opts = [c for c in inst.lists[u] if all(col[w] != c for w in g.adj[u] if w < v)]
            if not opts:
                return -1
            total += max(inst.gain(u, c) for c in opts) if best_gain[u] else 0
        return total

    def rec(v: int, acc):
        if v == n:
            if best[0] is None or acc > best[0]:
                best[0], best[1] = acc, list(col)
            return
        rest = bound_rest(v)
        if rest < 0 or (best[0] is not None and acc + rest <= best[0]):
            return
        for c in inst.lists[v]:
            if all(col[u] != c for u in g.adj[v] if u < v):
                col[v] = c
                rec(v + 1, acc + inst.gain(v, c))
        col[v] = 0

    rec(0, 0)
    return best[0], best[1]


def satisfaction_ratio(value, inst: RequestInstance) -> Fraction:
    total = inst.total()
    return Fraction(value) / Fraction(total) if total else Fraction(1)
