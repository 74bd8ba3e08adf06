"""Closed-form exponents for regular round trees."""

from __future__ import annotations

import math


def q_of(H: int, V: int) -> float:
    """Conformal dimension ``1 + ln V / ln H`` of the boundary of RT^{H,V}."""
    if H < 2 or V < 1:
        raise ValueError(f"need H >= 2 and V >= 1, got H={H}, V={V}")
    return 1.0 + math.log(V) / math.log(H)


def epsilon_of(p: float, Q: float) -> float:
    """Excess exponent over the tree baseline ``1 - 1/p`` for ``1 <= p < Q``."""
    if not 1 <= p < Q:
        raise ValueError(f"need 1 <= p < Q, got p={p}, Q={Q}")
    return (Q - p) / (p * (Q - p + p * Q))


def tree_exponent(p: float) -> float:
    return 1.0 - 1.0 / p


def predicted_exponent(p: float, Q: float) -> float:
    """Lower-bound growth exponent ``1 - 1/p + epsilon`` of the witness family."""
    return tree_exponent(p) + epsilon_of(p, Q)


def profile_exponent(p: float, Q: float) -> float:
    """Exponent ``(pQ - p) / (pQ - p + Q)`` of the profile lower bound in terms of r."""
    return (p * Q - p) / (p * Q - p + Q)
