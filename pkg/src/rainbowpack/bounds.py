"""Closed-form lower bounds on the number of disjoint rainbow bases.

Two regimes: disjoint base sequences (bound in terms of the girth deficit
beta alone) and kappa-overlapping sequences (bound in terms of beta and
kappa).  Each bound carries a side condition on n; outside it the bound is
reported as inapplicable, never as an error.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError


@dataclass(frozen=True)
class BoundRecord:
    n: int
    beta: int
    kappa: int
    disjoint: bool
    bound: int
    applicable: bool
    alpha: int  # truncation deficit used internally by the argument
    side_condition: str


def theorem_bounds(n: int, beta: int, kappa: int = 1, disjoint: bool = True) -> BoundRecord:
    """Bound record for one parameter triple.

    Disjoint regime: t >= n - 4*beta^2 - 7*beta - 4, valid for
    n >= 4*beta^2 + 7*beta + 5.  Overlapping regime: with
    s = 2*kappa + 2*beta + 1, t >= n - s^2 - beta - 2, valid for
    n > 2*(s^2 + beta).
    """
    if n < 0 or beta < 0:
        raise InputError("n and beta must be non-negative")
    if kappa < 1:
        raise InputError("kappa must be at least 1")
    if disjoint:
        alpha = 4 * beta * beta + 7 * beta + 2
        bound = n - 4 * beta * beta - 7 * beta - 4
        threshold = 4 * beta * beta + 7 * beta + 5
        return BoundRecord(
            n=n,
            beta=beta,
            kappa=1,
            disjoint=True,
            bound=bound,
            applicable=n >= threshold,
            alpha=alpha,
            side_condition=f"n >= {threshold}",
        )
    s = 2 * kappa + 2 * beta + 1
    alpha = s * s + beta
    bound = n - s * s - beta - 2
    threshold = 2 * (s * s + beta)
    return BoundRecord(
        n=n,
        beta=beta,
        kappa=kappa,
        disjoint=False,
        bound=bound,
        applicable=n > threshold,
        alpha=alpha,
        side_condition=f"n > {threshold}",
    )
