from __future__ import annotations

import numpy as np
import pytest

from rtprof.graph import complete_graph, cycle_graph, path_graph, random_connected_graph, star_graph
from rtprof.roundtree import build_yk


def regression_corpus() -> list[tuple[str, object]]:
    """Small graphs shared by the cross-checks: families, seeded random graphs, Y_k for k <= 3."""
    out = []
    for n in (2, 3, 5, 8):
        out.append((f"P{n}", path_graph(n)))
    for n in (3, 4, 7):
        out.append((f"C{n}", cycle_graph(n)))
    for n in (3, 4, 6):
        out.append((f"K{n}", complete_graph(n)))
    out.append(("S5", star_graph(5)))
    rng = np.random.default_rng(2024)
    for i, n in enumerate((6, 10, 16, 25, 40)):
        out.append((f"G{n}_{i}", random_connected_graph(n, 0.2, rng)))
    for k in (1, 2, 3):
        out.append((f"Y{k}_p1", build_yk(2, 2, 1.0, k).graph))
    out.append(("Y3_p1.5", build_yk(2, 2, 1.5, 3).graph))
    return out


@pytest.fixture(scope="session")
def corpus():
    return regression_corpus()
