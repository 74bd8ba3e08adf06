"""Profile samples for Y_k sweeps, growth-exponent fits, and epsilon-cut sizes."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .budget import Budget
from .congestion import YkPathSystem, build_coloring, compute_congestion, lemma_bound
from .formulas import epsilon_of, predicted_exponent, profile_exponent, q_of  # noqa: F401  (re-exported)
from .graph import Graph, component_labels, gradient_norm, induced_subgraph, lp_norm
from .poincare import fiedler, h1_sweep, h2_exact, hp_minimize
from .roundtree import build_yk

DEFAULT_EPSILON = Fraction(2, 3)
EXACT_CUT_CAP = 20


@dataclass
class ProfilePoint:
    graph_id: str
    r: int
    p: float
    lower_bound: float
    upper_estimate: float | None = None
    extra: dict = field(default_factory=dict)

    def consistent(self, tol: float = 1e-9) -> bool:
        return self.upper_estimate is None or self.lower_bound <= self.upper_estimate + tol


@dataclass
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float
    sample_count: int
    size_range: tuple[int, int]
    last3_slope: float | None = None

    def to_record(self) -> dict:
        d = asdict(self)
        d["size_range"] = list(self.size_range)
        return d


@dataclass
class CutResult:
    epsilon: Fraction
    cut_set: tuple[int, ...]
    size: int
    max_component_fraction: float
    method: str  # exact | heuristic
    optimal: bool

    def to_record(self) -> dict:
        return {
            "epsilon": str(self.epsilon),
            "cut_set": list(self.cut_set),
            "size": self.size,
            "max_component_fraction": self.max_component_fraction,
            "method": self.method,
            "optimal": self.optimal,
        }


# ---------------------------------------------------------------- sweeps


def _upper_estimate(g: Graph, p: float, seed: int, restarts: int) -> float:
    if p == 1:
        return h1_sweep(g).value
    if p == 2:
        return h2_exact(g).value
    # any mean-zero function gives an upper bound; the Fiedler vector is a cheap extra candidate
    _, vec = fiedler(g)
    spectral = gradient_norm(g, vec, p) / lp_norm(vec, p)
    return min(hp_minimize(g, p, restarts=restarts, seed=seed).value, spectral)


def sweep_yk(
    H: int,
    V: int,
    p: float,
    k_range: Iterable[int],
    upper: bool = True,
    budget: Budget | None = None,
    seed: int = 0,
    restarts: int = 16,
) -> list[ProfilePoint]:
    """Certified lower bounds ``|Y_k| * h^p`` along the witness family.

    Each point runs build -> colouring -> exact loads -> path-counting
    bound. With ``upper`` the graph's numeric upper estimate is attached.
    """
    points = []
    for k in k_range:
        yk = build_yk(H, V, p, k, budget)
        col = build_coloring(yk)
        ps = YkPathSystem(yk, col)
        loads = compute_congestion(yk, col, budget)
        cert = lemma_bound(ps, p, loads=loads, budget=budget)
        n = yk.n
        up = n * _upper_estimate(yk.graph, p, seed, restarts) if upper else None
        extra = {"k": k, "T": yk.T, "t": yk.t, "m": col.m, "max_edge_load": cert.max_edge_load}
        points.append(ProfilePoint(f"Y_k(H={H},V={V},p={p:g},k={k})", n, float(p), n * cert.bound, up, extra))
    return points


# ---------------------------------------------------------------- fits


def _as_arrays(points) -> tuple[np.ndarray, np.ndarray]:
    pts = list(points)
    if pts and isinstance(pts[0], ProfilePoint):
        r = np.array([q.r for q in pts], dtype=float)
        y = np.array([q.lower_bound for q in pts], dtype=float)
    else:
        arr = np.asarray(pts, dtype=float).reshape(-1, 2)
        r, y = arr[:, 0], arr[:, 1]
    return r, y


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return float(slope), float(intercept), min(1.0, max(0.0, r2))


def fit_exponent(points) -> ExponentFit:
    """OLS of ``ln bound`` on ``ln r``; accepts ProfilePoints or ``(r, bound)`` pairs."""
    r, y = _as_arrays(points)
    if len(r) < 2:
        raise ValueError("need at least 2 points")
    if len(np.unique(r)) < 2:
        raise ValueError("need at least 2 distinct sizes")
    if np.any(r <= 0) or np.any(y <= 0):
        raise ValueError("sizes and bounds must be positive")
    lr, ly = np.log(r), np.log(y)
    slope, intercept, r2 = _ols(lr, ly)
    last3 = _ols(lr[-3:], ly[-3:])[0] if len(r) >= 3 else None
    return ExponentFit(slope, intercept, r2, len(r), (int(r.min()), int(r.max())), last3)


def fit_log_model(points) -> ExponentFit:
    """OLS of ``bound`` on ``ln r`` (the model ``bound = a + b ln r``)."""
    r, y = _as_arrays(points)
    if len(np.unique(r)) < 2 or np.any(r <= 0):
        raise ValueError("need at least 2 distinct positive sizes")
    slope, intercept, r2 = _ols(np.log(r), y)
    return ExponentFit(slope, intercept, r2, len(r), (int(r.min()), int(r.max())))


def running_slopes(points: Sequence[ProfilePoint]) -> list[float | None]:
    return [None if i < 1 else fit_exponent(points[: i + 1]).slope for i in range(len(points))]


def profile_csv_text(points: Sequence[ProfilePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["graph_id", "r", "p", "lower_bound", "upper_estimate", "slope_running"])
    for q, s in zip(points, running_slopes(points)):
        w.writerow([
            q.graph_id, q.r, repr(q.p), repr(q.lower_bound),
            "" if q.upper_estimate is None else repr(q.upper_estimate),
            "" if s is None else repr(s),
        ])
    return buf.getvalue()


def write_profile_csv(points: Sequence[ProfilePoint], path: str | Path) -> None:
    Path(path).write_text(profile_csv_text(points))


def read_profile_csv(path: str | Path) -> list[ProfilePoint]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        up = row.get("upper_estimate", "")
        out.append(ProfilePoint(row["graph_id"], int(row["r"]), float(row["p"]), float(row["lower_bound"]),
                                float(up) if up else None))
    return out


# ---------------------------------------------------------------- epsilon-cuts


def _size_limit(n: int, epsilon) -> int:
    eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return (eps.numerator * n) // eps.denominator


def _result(g: Graph, cut: Iterable[int], epsilon, method: str, optimal: bool) -> CutResult:
    cut = tuple(sorted(int(x) for x in cut))
    count, lab = component_labels(g, cut)
    biggest = int(np.bincount(lab[lab >= 0]).max()) if count else 0
    frac = biggest / g.n if g.n else 0.0
    return CutResult(Fraction(epsilon), cut, len(cut), frac, method, optimal)


def cut_is_valid(g: Graph, cut: Iterable[int], epsilon=DEFAULT_EPSILON) -> bool:
    count, lab = component_labels(g, cut)
    if count == 0:
        return True
    return int(np.bincount(lab[lab >= 0]).max()) <= _size_limit(g.n, epsilon)


def _mask_components(nbr: list[int], alive: int) -> list[int]:
    comps = []
    while alive:
        seed = alive & -alive
        comp, frontier = seed, seed
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            new = nbr[low.bit_length() - 1] & alive & ~comp
            comp |= new
            frontier |= new
        comps.append(comp)
        alive &= ~comp
    return comps


def cut_exact(g: Graph, epsilon=DEFAULT_EPSILON, cap: int = EXACT_CUT_CAP) -> CutResult:
    """Minimum epsilon-cut by iterative deepening over the cut size.

    Any cut extending a partial cut must hit every oversized component of
    what is left, so the search branches on the vertices of the largest
    one (highest degree first) and prunes when more oversized components
    remain than vertices may still be removed.
    """
    n = g.n
    if n > cap:
        raise ValueError(f"exact cut solver is capped at {cap} vertices, got {n}")
    limit = _size_limit(n, epsilon)
    nbr = [0] * n
    for u, v in g.edges:
        nbr[u] |= 1 << int(v)
        nbr[v] |= 1 << int(u)
    deg = g.degree
    full = (1 << n) - 1

    def search(removed: int, left: int, seen: set[int]) -> int | None:
        if removed in seen:
            return None
        seen.add(removed)
        big = [c for c in _mask_components(nbr, full & ~removed) if c.bit_count() > limit]
        if not big:
            return removed
        if len(big) > left:
            return None
        target = max(big, key=lambda c: c.bit_count())
        verts = [i for i in range(n) if target >> i & 1]
        verts.sort(key=lambda i: (-deg[i], i))
        for v in verts:
            hit = search(removed | 1 << v, left - 1, seen)
            if hit is not None:
                return hit
        return None

    for size in range(n + 1):
        hit = search(0, size, set())
        if hit is not None:
            return _result(g, [i for i in range(n) if hit >> i & 1], epsilon, "exact", True)
    raise AssertionError("removing every vertex always satisfies the cut condition")


def _sweep_separator(sub: Graph, limit: int) -> np.ndarray:
    """Vertex separator from the best Fiedler-order prefix of a connected graph."""
    n = sub.n
    if n <= 2:
        return np.array([0])
    _, vec = fiedler(sub)
    order = np.argsort(vec, kind="stable")
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    ru, rv = rank[sub.edges[:, 0]], rank[sub.edges[:, 1]]
    max_nb = np.full(n, -1, dtype=np.int64)
    min_nb = np.full(n, n, dtype=np.int64)
    np.maximum.at(max_nb, sub.edges[:, 0], rv)
    np.maximum.at(max_nb, sub.edges[:, 1], ru)
    np.minimum.at(min_nb, sub.edges[:, 0], rv)
    np.minimum.at(min_nb, sub.edges[:, 1], ru)
    # prefix {rank < k}: inner boundary = rank < k <= max_nb, outer = min_nb < k <= rank
    inner, outer = np.zeros(n + 1, dtype=np.int64), np.zeros(n + 1, dtype=np.int64)
    ok = max_nb > rank
    np.add.at(inner, rank[ok] + 1, 1)
    np.add.at(inner, max_nb[ok] + 1, -1)
    ok = min_nb < rank
    np.add.at(outer, min_nb[ok] + 1, 1)
    np.add.at(outer, rank[ok] + 1, -1)
    inner, outer = np.cumsum(inner)[1:n], np.cumsum(outer)[1:n]
    k = np.arange(1, n)
    part_in = np.maximum(k - inner, n - k)
    part_out = np.maximum(k, n - k - outer)
    sizes = np.concatenate([inner, outer])
    parts = np.concatenate([part_in, part_out])
    feasible = parts <= limit
    if feasible.any():
        best = int(np.flatnonzero(feasible)[np.argmin(sizes[feasible])])
    else:
        best = int(np.lexsort((sizes, parts))[0])
    kk = int(k[best % (n - 1)])
    if best < n - 1:
        return np.flatnonzero((rank < kk) & (max_nb >= kk))
    return np.flatnonzero((rank >= kk) & (min_nb < kk))


def cut_heuristic(g: Graph, epsilon=DEFAULT_EPSILON) -> CutResult:
    """Spectral separator, applied again to oversized pieces, then greedily shrunk."""
    n = g.n
    limit = _size_limit(n, epsilon)
    cut: set[int] = set()
    while True:
        count, lab = component_labels(g, cut)
        sizes = np.bincount(lab[lab >= 0], minlength=count) if count else np.zeros(0, dtype=np.int64)
        big = np.flatnonzero(sizes > limit)
        if big.size == 0:
            break
        for c in big:
            sub, keep = induced_subgraph(g, np.flatnonzero(lab == c))
            cut.update(int(x) for x in keep[_sweep_separator(sub, limit)])
    changed = True
    while changed:
        changed = False
        for v in sorted(cut, key=lambda x: (g.degree[x], x)):
            if cut_is_valid(g, cut - {v}, epsilon):
                cut.discard(v)
                changed = True
    return _result(g, cut, epsilon, "heuristic", False)


def sep_point(g: Graph, epsilon=DEFAULT_EPSILON, method: str = "auto", graph_id: str = "") -> dict:
    """One ``(r, cut size)`` witness record; exact up to the solver cap unless told otherwise."""
    if method not in ("auto", "exact", "heuristic"):
        raise ValueError(f"unknown method {method!r}")
    use_exact = method == "exact" or (method == "auto" and g.n <= EXACT_CUT_CAP)
    res = cut_exact(g, epsilon) if use_exact else cut_heuristic(g, epsilon)
    return {"graph_id": graph_id, "r": g.n, "epsilon": str(res.epsilon), "cut_size": res.size,
            "method": res.method, "optimal": res.optimal}


def log_separation_report(sizes: Sequence[int], cuts: Sequence[int]) -> dict:
    """Power-law and log-model fits of cut size against graph size."""
    pts = list(zip(sizes, cuts))
    power = fit_exponent(pts)
    logm = fit_log_model(pts)
    return {"power_slope": power.slope, "power_r2": power.r_squared, "log_slope": logm.slope, "log_r2": logm.r_squared}


def expected_profile_exponent(H: int, V: int, p: float) -> dict:
    Q = q_of(H, V)
    return {"Q": Q, "epsilon": epsilon_of(p, Q), "predicted": predicted_exponent(p, Q), "in_r": profile_exponent(p, Q)}
