"""Truncated power-series arithmetic over any field-like coefficient type.

Series are plain lists ``[a0, a1, ..., a_n]``; everything works uniformly for
Fraction, float and mpmath coefficients because only +, -, *, / are used.
Reversion is exact Lagrange-style back-substitution, which over rationals
avoids the cancellation that a floating Newton solve would reintroduce in
high cumulants.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

from .errors import DegenerateSeriesError

T = TypeVar("T")

__all__ = ["series_mul", "series_pow_table", "series_compose", "series_revert",
           "series_derivative"]


def _zero_like(x):
    return x * 0


def series_mul(a: Sequence, b: Sequence, order: int) -> list:
    """Product of two series truncated at ``order`` (inclusive)."""
    zero = _zero_like(a[0]) if a else 0
    out = [zero] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: order + 1 - i]):
            out[i + j] = out[i + j] + ai * bj
    return out


def series_pow_table(g: Sequence, order: int) -> list[list]:
    """Powers g^0 .. g^order of a series with g[0] = 0, each truncated."""
    one = g[1] / g[1] if len(g) > 1 and g[1] != 0 else 1
    zero = _zero_like(one)
    table = [[one] + [zero] * order]
    for _ in range(order):
        table.append(series_mul(table[-1], list(g) + [zero] * order, order))
    return table


def series_compose(f: Sequence, g: Sequence, order: int) -> list:
    """f(g(t)) truncated at ``order``; requires g[0] = 0."""
    if g[0] != 0:
        raise DegenerateSeriesError("composition needs a series with zero constant term")
    powers = series_pow_table(g, order)
    zero = _zero_like(f[0])
    out = [zero] * (order + 1)
    for k, fk in enumerate(f[: order + 1]):
        if fk == 0:
            continue
        for n in range(order + 1):
            out[n] = out[n] + fk * powers[k][n]
    return out


def series_revert(f: Sequence, order: int) -> list:
    """Compositional inverse g with f(g(t)) = t + O(t^{order+1}).

    Requires f[0] = 0 and f[1] != 0.  Coefficients are solved order by
    order: the degree-n coefficient of f(g(t)) - t is linear in g_n.
    """
    if f[0] != 0:
        raise DegenerateSeriesError("reversion needs a series with zero constant term")
    if len(f) < 2 or f[1] == 0:
        raise DegenerateSeriesError("reversion needs a nonzero linear coefficient")
    one = f[1] / f[1]
    zero = _zero_like(one)
    f = list(f[: order + 1]) + [zero] * max(0, order + 1 - len(f))
    g = [zero, one / f[1]] + [zero] * (order - 1)
    for n in range(2, order + 1):
        powers = series_pow_table(g, n)
        coeff = zero
        for k in range(2, n + 1):
            if f[k] != 0:
                coeff = coeff + f[k] * powers[k][n]
        g[n] = -coeff / f[1]
    return g


def series_derivative(f: Sequence) -> list:
    """Formal derivative."""
    return [f[k] * k for k in range(1, len(f))]
