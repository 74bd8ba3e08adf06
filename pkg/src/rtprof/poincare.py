"""L^p Poincare constants h^p of finite connected graphs.

``h2_exact`` is the spectral anchor (h^2 = sqrt(lambda_2) of the Laplacian),
``h1_sweep`` restricts p = 1 to two-valued functions, and ``hp_minimize``
is a seeded multi-start first-order search for any finite p. Only the
spectral value is exact; the others are upper bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import Graph, gradient_norm, lp_norm

DENSE_LIMIT = 512
EIG_TOL = 1e-10
EXHAUSTIVE_LIMIT = 20

# hp_minimize hyperparameters; recorded in every result
STEP_SCALE = 0.1
MAX_ITER = 5000
IMPROVE_TOL = 1e-10
DEFAULT_RESTARTS = 16


class DisconnectedGraphError(ValueError):
    pass


@dataclass
class PoincareResult:
    p: float
    value: float
    witness: np.ndarray
    method: str  # spectral | two_valued | numeric
    certified: str  # exact | upper_bound
    iterations: int = 0
    seed: int | None = None
    params: dict = field(default_factory=dict)

    def ratio(self, g: Graph) -> float:
        """Recompute ``|grad f|_p / |f|_p`` for the witness."""
        return gradient_norm(g, self.witness, self.p) / lp_norm(self.witness, self.p)

    def to_record(self) -> dict:
        return {
            "p": self.p,
            "value": self.value,
            "method": self.method,
            "certified": self.certified,
            "iterations": self.iterations,
            "seed": self.seed,
        }


def _require_connected(g: Graph) -> None:
    if g.n < 2:
        raise ValueError(f"need at least 2 vertices, got {g.n}")
    if not g.is_connected():
        raise DisconnectedGraphError("graph is disconnected; h^p would be 0")


def fiedler(g: Graph) -> tuple[float, np.ndarray]:
    """Second-smallest Laplacian eigenvalue and a unit eigenvector (mean removed)."""
    if g.n < DENSE_LIMIT:
        w, vecs = np.linalg.eigh(g.laplacian().toarray())
        lam, vec = float(w[1]), vecs[:, 1]
    else:
        # shift-invert Lanczos around a point just below the spectrum
        lap = g.laplacian().astype(float)
        w, vecs = spla.eigsh(lap, k=2, sigma=-1e-3, which="LM", tol=EIG_TOL, v0=np.ones(g.n) + np.arange(g.n) / g.n)
        order = np.argsort(w)
        lam, vec = float(w[order[1]]), vecs[:, order[1]]
    vec = vec - vec.mean()
    vec = vec / np.linalg.norm(vec)
    # fix the sign so results are reproducible across solvers
    pivot = np.flatnonzero(np.abs(vec) > 1e-12)
    if pivot.size and vec[pivot[0]] < 0:
        vec = -vec
    return max(lam, 0.0), vec


def h2_exact(g: Graph) -> PoincareResult:
    _require_connected(g)
    lam, vec = fiedler(g)
    return PoincareResult(2.0, float(np.sqrt(lam)), vec, "spectral", "exact")


def two_valued_ratio(n: int, cut: np.ndarray, size: np.ndarray) -> np.ndarray:
    """``n e(S, S^c) / (2 |S| |S^c|)``: the p = 1 ratio of the mean-zero two-valued function on S."""
    return n * cut / (2.0 * size * (n - size))


def two_valued_witness(in_s: np.ndarray) -> np.ndarray:
    n, s = len(in_s), int(in_s.sum())
    f = np.where(in_s, float(n - s), -float(s))
    return f / np.abs(f).max()


def h1_sweep(g: Graph) -> PoincareResult:
    """Best two-valued mean-zero function for p = 1 (an upper bound on h^1).

    Exhaustive over vertex subsets for ``n <= 20``; otherwise sweep cuts of
    the Fiedler vector followed by single-vertex exchange moves.
    """
    _require_connected(g)
    n = g.n
    if n <= EXHAUSTIVE_LIMIT:
        in_s, value = _h1_exhaustive(g)
        params = {"search": "exhaustive"}
    else:
        _, vec = fiedler(g)
        in_s, value = _sweep_best(g, np.argsort(vec, kind="stable"))
        in_s, value, moves = _local_exchange(g, in_s, value)
        params = {"search": "sweep+exchange", "moves": moves}
    return PoincareResult(1.0, value, two_valued_witness(in_s), "two_valued", "upper_bound", params=params)


def _h1_exhaustive(g: Graph) -> tuple[np.ndarray, float]:
    n = g.n
    u = g.edges[:, 0].astype(np.uint32)
    v = g.edges[:, 1].astype(np.uint32)
    best_val, best_mask = np.inf, 0
    # vertex n-1 always lies outside S; S <-> S^c gives the same ratio
    total = 1 << (n - 1)
    chunk = 1 << 16
    for start in range(1, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.uint32)
        cut = np.zeros(len(masks), dtype=np.int64)
        for a, b in zip(u, v):
            cut += ((masks >> a) ^ (masks >> b)) & 1
        size = np.bitwise_count(masks).astype(np.int64)
        ratio = two_valued_ratio(n, cut, size)
        i = int(np.argmin(ratio))
        if ratio[i] < best_val:
            best_val, best_mask = float(ratio[i]), int(masks[i])
    in_s = np.array([(best_mask >> i) & 1 for i in range(n)], dtype=bool)
    return in_s, best_val


def _sweep_best(g: Graph, order: np.ndarray) -> tuple[np.ndarray, float]:
    n = g.n
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    ra, rb = rank[g.edges[:, 0]], rank[g.edges[:, 1]]
    lo, hi = np.minimum(ra, rb), np.maximum(ra, rb)
    # edge is cut by prefix {order[:k]} iff lo < k <= hi
    diff = np.zeros(n + 1, dtype=np.int64)
    np.add.at(diff, lo + 1, 1)
    np.add.at(diff, hi + 1, -1)
    cut = np.cumsum(diff)[1:n]
    sizes = np.arange(1, n)
    ratio = two_valued_ratio(n, cut, sizes)
    k = int(np.argmin(ratio)) + 1
    in_s = np.zeros(n, dtype=bool)
    in_s[order[:k]] = True
    return in_s, float(ratio[k - 1])


def _local_exchange(g: Graph, in_s: np.ndarray, value: float, max_moves: int | None = None) -> tuple[np.ndarray, float, int]:
    n = g.n
    in_s = in_s.copy()
    a = g.adjacency()
    deg = g.degree
    n_in = a @ in_s.astype(float)
    s = int(in_s.sum())
    cut = int(np.sum(in_s[g.edges[:, 0]] != in_s[g.edges[:, 1]]))
    max_moves = 4 * n if max_moves is None else max_moves
    moves = 0
    while moves < max_moves:
        new_cut = np.where(in_s, cut - (deg - n_in) + n_in, cut - n_in + (deg - n_in))
        new_s = np.where(in_s, s - 1, s + 1)
        valid = (new_s > 0) & (new_s < n)
        ratio = np.full(n, np.inf)
        ratio[valid] = two_valued_ratio(n, new_cut[valid], new_s[valid])
        x = int(np.argmin(ratio))
        if not ratio[x] < value * (1 - 1e-12):
            break
        delta = -1.0 if in_s[x] else 1.0
        in_s[x] = not in_s[x]
        cut, s, value = int(new_cut[x]), int(new_s[x]), float(ratio[x])
        nb = g.neighbors(x)
        n_in[nb] += delta
        moves += 1
    return in_s, value, moves


def hp_minimize(
    g: Graph,
    p: float,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    max_iter: int = MAX_ITER,
) -> PoincareResult:
    """Seeded multi-start minimisation of ``|grad f|_p / |f|_p`` over mean-zero f.

    Each restart runs projected (sub)gradient descent on ``|grad f|_p^p``
    over the sphere ``|f|_p = 1`` intersected with mean-zero functions,
    with step ``0.1 / max_degree``. For p = 1 the best iterate is also
    rounded to its two-valued level-set functions. The result is the best
    ratio seen and is only an upper bound on h^p.
    """
    if not p >= 1 or not np.isfinite(p):
        raise ValueError(f"p must be a finite real >= 1, got {p}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    _require_connected(g)
    n = g.n
    step = STEP_SCALE / g.max_degree
    # restarts are independent; run them as the columns of one matrix
    children = np.random.SeedSequence(seed).spawn(restarts)
    f0 = np.stack([np.random.default_rng(c).standard_normal(n) for c in children], axis=1)
    vals, fs, iters = _descend(f0, _incidence(g), p, step, max_iter)
    best = int(np.argmin(vals))
    best_val, best_f, best_iters = float(vals[best]), fs[:, best], int(iters[best])

    witness = best_f
    params = {"step": step, "max_iter": max_iter, "improve_tol": IMPROVE_TOL, "restarts": restarts}
    if p == 1:
        order = np.argsort(best_f, kind="stable")
        in_s, rounded = _sweep_best(g, order)
        if rounded < best_val:
            witness = two_valued_witness(in_s)
            params["rounded"] = True
    value = gradient_norm(g, witness, p) / lp_norm(witness, p)
    return PoincareResult(float(p), float(value), witness, "numeric", "upper_bound", best_iters, seed, params)


def _incidence(g: Graph) -> sp.csr_matrix:
    m = g.m
    rows = np.repeat(np.arange(m), 2)
    cols = g.edges.ravel()
    data = np.tile([1.0, -1.0], m)
    return sp.csr_matrix((data, (rows, cols)), shape=(m, g.n))


def _col_norms(f: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(f)
    if p == 1:
        return a.sum(axis=0)
    top = a.max(axis=0)
    top = np.where(top > 0, top, 1.0)
    return top * np.sum((a / top) ** p, axis=0) ** (1.0 / p)


def _normalize(f: np.ndarray, p: float) -> np.ndarray:
    f = f - f.mean(axis=0)
    return f / _col_norms(f, p)


def _descend(f, inc, p, step, max_iter):
    """Projected descent on the columns of ``f``; each column stops on its own."""
    inc_t = inc.T.tocsr()
    f = _normalize(f, p)
    r = f.shape[1]
    best_val = np.full(r, np.inf)
    best_f = f.copy()
    prev = np.full(r, np.inf)
    iters = np.zeros(r, dtype=np.int64)
    active = np.ones(r, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        iters[active] += 1
        d = inc @ f
        ad = np.abs(d)
        energy = np.sum(ad**p, axis=0)
        ratio = energy ** (1.0 / p)
        better = active & (ratio < best_val)
        best_val[better] = ratio[better]
        best_f[:, better] = f[:, better]
        gain = prev - energy
        active &= ~((gain >= 0) & (gain < IMPROVE_TOL * energy))
        prev = energy
        w = np.sign(d) if p == 1 else ad ** (p - 1) * np.sign(d)
        g_den = np.sign(f) if p == 1 else np.abs(f) ** (p - 1) * np.sign(f)
        grad = p * (inc_t @ w - energy * g_den)
        grad -= grad.mean(axis=0)
        stepped = _normalize(f - step * grad, p)
        f = np.where(active, stepped, f)
    return best_val, best_f, iters
