"""Vertex and work budgets shared by the constructors and counters."""

from __future__ import annotations

import os
from dataclasses import dataclass

DEFAULT_VERTEX_BUDGET = 2_000_000
DEFAULT_WORK_BUDGET = 1_000_000_000
ENV_VAR = "RTPROF_BUDGET"


class BudgetExceeded(RuntimeError):
    """A construction or count would exceed its configured budget."""

    def __init__(self, what: str, projected: float, limit: float):
        super().__init__(f"{what}: projected {projected:.4g} exceeds budget {limit:.4g}")
        self.what = what
        self.projected = projected
        self.limit = limit


@dataclass(frozen=True)
class Budget:
    vertices: int = DEFAULT_VERTEX_BUDGET
    work: int = DEFAULT_WORK_BUDGET

    def check_vertices(self, projected: float, what: str = "vertex count") -> None:
        if projected > self.vertices:
            raise BudgetExceeded(what, projected, self.vertices)

    def check_work(self, projected: float, what: str = "work") -> None:
        if projected > self.work:
            raise BudgetExceeded(what, projected, self.work)


def budget_from_env(environ: dict[str, str] | None = None) -> Budget:
    """Read ``RTPROF_BUDGET``.

    Accepted forms: ``"500000"`` (vertex budget only) or a comma list
    such as ``"vertices=500000,work=1e8"``.
    """
    env = os.environ if environ is None else environ
    raw = env.get(ENV_VAR, "").strip()
    if not raw:
        return Budget()
    if "=" not in raw:
        return Budget(vertices=int(float(raw)))
    fields = {}
    for part in raw.split(","):
        key, _, val = part.partition("=")
        key = key.strip()
        if key not in ("vertices", "work"):
            raise ValueError(f"unknown budget key {key!r} in {ENV_VAR}")
        fields[key] = int(float(val))
    return Budget(**fields)
