"""Finite-depth Cantor spaces Z^{H,V} and a discrete hyperbolic cone over Z x [0, 1].

Points are words in ``[V]^n`` with the ultrametric ``H^(-i)``, ``i`` the
1-based index of the first mismatch, and the uniform measure. Balls are
open: ``B(a, r) = {b : rho(a, b) < r}``. With that convention the ball of
radius ``H^-k`` is the cylinder of words sharing ``a``'s first k letters.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .budget import Budget
from .graph import Graph


@dataclass(frozen=True)
class CantorSpace:
    H: int
    V: int
    depth: int

    def __post_init__(self):
        if self.H < 2 or self.V < 2:
            raise ValueError(f"need H >= 2 and V >= 2, got H={self.H}, V={self.V}")
        if self.depth < 0:
            raise ValueError(f"depth must be >= 0, got {self.depth}")

    @property
    def q_z(self) -> float:
        return math.log(self.V) / math.log(self.H)

    @property
    def size(self) -> int:
        return self.V**self.depth

    def points(self) -> np.ndarray:
        """All words as a ``V^n x n`` array in lexicographic order."""
        idx = np.arange(self.size)
        powers = self.V ** np.arange(self.depth - 1, -1, -1)
        return (idx[:, None] // powers[None, :]) % self.V

    def point_mass(self) -> float:
        return float(self.V) ** -self.depth


def _check_word(word: Sequence[int], V: int | None) -> tuple[int, ...]:
    w = tuple(int(x) for x in word)
    if V is not None and any(not 0 <= x < V for x in w):
        raise ValueError(f"letter outside [0, {V}) in {w}")
    return w


def first_mismatch(a: Sequence[int], b: Sequence[int]) -> int | None:
    """1-based index of the first differing letter, or None if equal."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    for i, (x, y) in enumerate(zip(a, b), start=1):
        if x != y:
            return i
    return None


def rho(a: Sequence[int], b: Sequence[int], H: int, V: int | None = None) -> float:
    if H < 2:
        raise ValueError(f"need H >= 2, got {H}")
    a, b = _check_word(a, V), _check_word(b, V)
    i = first_mismatch(a, b)
    return 0.0 if i is None else float(H) ** -i


def ball_measure(space: CantorSpace, center: Sequence[int], k: int) -> float:
    """Measure ``V^-k`` of the ball of radius ``H^-k`` around ``center``."""
    if not 0 <= k <= space.depth:
        raise ValueError(f"k must lie in [0, {space.depth}], got {k}")
    c = _check_word(center, space.V)
    if len(c) != space.depth:
        raise ValueError(f"center has length {len(c)}, expected {space.depth}")
    return float(Fraction(1, space.V**k))


def enumerated_ball_measure(space: CantorSpace, center: Sequence[int], radius: float) -> float:
    """Measure of ``{b : rho(center, b) < radius}`` by scanning every point."""
    c = np.asarray(_check_word(center, space.V))
    pts = space.points()
    diff = pts != c[None, :]
    has = diff.any(axis=1)
    first = np.where(has, np.argmax(diff, axis=1) + 1, 0)
    dist = np.where(has, float(space.H) ** -first.astype(float), 0.0)
    # rounded once from the exact rational, so equal measures compare equal
    return float(Fraction(int(np.count_nonzero(dist < radius)), space.size))


def ahlfors_report(space: CantorSpace) -> dict:
    """Smallest C with ``1/C <= mu(B(z, r)) / r^Q_Z <= C`` over all centres and scanned radii.

    Radii are ``H^-k`` for ``k = 0..n`` and the geometric midpoints between
    consecutive ones. Ball measures are counted from the prefix classes of
    the enumerated points, so every centre is visited.
    """
    if space.depth < 1:
        raise ValueError("depth must be >= 1")
    H, V, n = space.H, space.V, space.depth
    pts = space.points()
    powers = V ** np.arange(n - 1, -1, -1)
    # (radius, letters a point must share with the centre to lie in the open ball)
    radii = []
    for k in range(n + 1):
        radii.append((float(H) ** -k, k))
        if k < n:
            radii.append((float(H) ** -(k + 0.5), k))
    lo, hi = math.inf, 0.0
    worst = None
    for r, agree in radii:
        keys = pts[:, :agree] @ powers[n - agree:] if agree else np.zeros(len(pts), dtype=np.int64)
        _, inv, counts = np.unique(keys, return_inverse=True, return_counts=True)
        mu = counts[inv] * space.point_mass()
        ratio = mu / r**space.q_z
        if ratio.min() < lo:
            lo = float(ratio.min())
        if ratio.max() > hi:
            hi = float(ratio.max())
            worst = r
    C = max(hi, 1.0 / lo)
    return {"Q_Z": space.q_z, "C": C, "min_ratio": lo, "max_ratio": hi, "worst_radius": worst,
            "radii": len(radii), "centers": int(len(pts))}


# ---------------------------------------------------------------- cone graph


def cone_level_sizes(H: int, V: int, depth: int) -> list[int]:
    return [(H * V) ** k for k in range(depth + 1)]


def build_cone_graph(space: CantorSpace, depth: int | None = None, budget: Budget | None = None) -> Graph:
    """Scale-hierarchy graph over ``Z x [0, 1]``.

    A level-k vertex ``(w, j)`` stands for the cylinder of the prefix
    ``w in [V]^k`` times ``[j H^-k, (j + 1) H^-k]``. Closed regions that
    overlap are joined when their levels differ by at most one: same-level
    neighbours share ``w`` and have ``|j - j'| = 1``; a child ``(w a, j')``
    meets ``(w, j)`` when ``jH - 1 <= j' <= (j + 1) H``.
    """
    H, V = space.H, space.V
    depth = space.depth if depth is None else depth
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    sizes = cone_level_sizes(H, V, depth)
    (budget or Budget()).check_vertices(sum(sizes), "cone graph vertices")
    offsets = np.concatenate([[0], np.cumsum(sizes)])

    def vid(k, w, j):
        return offsets[k] + w * H**k + j

    edges, labels = [], {}
    for k in range(depth + 1):
        hk = H**k
        w = np.repeat(np.arange(V**k), hk)
        j = np.tile(np.arange(hk), V**k)
        ids = vid(k, w, j)
        for i, ww, jj in zip(ids.tolist(), w.tolist(), j.tolist()):
            labels[i] = f"k={k};w={ww};j={jj}"
        inner = j < hk - 1
        edges.append(np.stack([ids[inner], ids[inner] + 1], axis=1))
        if k < depth:
            for a in range(V):
                child_w = w * V + a
                for dj in range(-1, H + 1):
                    cj = j * H + dj
                    ok = (cj >= 0) & (cj < hk * H)
                    edges.append(np.stack([ids[ok], vid(k + 1, child_w[ok], cj[ok])], axis=1))
    e = np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64)
    return Graph(int(offsets[-1]), e, labels)


def cone_vs_round_tree(H: int, V: int, depth: int, budget: Budget | None = None) -> dict:
    """Certified ``r * h^1`` lower bounds (shortest-path congestion) for the cone and RT^{H,V}.

    Both graphs have ``(HV)^k`` vertices at level k, so the comparison is at
    equal size. Only a report: matching exponents are expected, not
    matching constants.
    """
    from .congestion import ShortestPathSystem, lemma_bound
    from .roundtree import build_round_tree

    cone = build_cone_graph(CantorSpace(H, V, max(depth, 0)), depth, budget)
    rt = build_round_tree(H, V, depth, budget).graph
    out = {"r": cone.n}
    for name, g in (("cone", cone), ("round_tree", rt)):
        cert = lemma_bound(ShortestPathSystem(g), 1.0, budget=budget)
        out[name] = {"n": g.n, "max_degree": g.max_degree, "lower_bound": g.n * cert.bound}
    out["ratio"] = out["cone"]["lower_bound"] / out["round_tree"]["lower_bound"]
    return out
