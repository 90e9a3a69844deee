"""Exact rational helpers: parsing, formatting, linear systems and a small LP.

All routines operate on :class:`fractions.Fraction` so that results can be
compared for exact equality.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Sequence

from .errors import InvalidGame


def to_fraction(value) -> Fraction:
    """Parse an integer, a Fraction or a ``"p/q"`` / ``"p"`` string.

    Floats are rejected: payoffs must be exact so symmetry checks are exact.
    """
    if isinstance(value, bool):
        raise InvalidGame(f"boolean is not a payoff: {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/", 1)
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidGame(f"cannot parse rational {value!r}") from exc
    raise InvalidGame(f"expected integer or 'p/q' string, got {value!r}")


def to_number(value) -> Fraction | float:
    """Like :func:`to_fraction` but floats pass through (used for profiles)."""
    if isinstance(value, float):
        return value
    return to_fraction(value)


def format_rational(q: Fraction) -> int | str:
    q = Fraction(q)
    if q.denominator == 1:
        return q.numerator
    return f"{q.numerator}/{q.denominator}"


def solve_linear(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]):
    """Solve ``A x = b`` exactly by Gauss-Jordan elimination.

    Returns ``(x, rank)`` where free variables (if any) are set to zero, or
    ``None`` when the system is inconsistent. ``rank < len(x)`` means the
    solution set is a family and ``x`` is one representative of it.
    """
    rows = len(A)
    cols = len(A[0]) if rows else 0
    M = [[Fraction(v) for v in A[r]] + [Fraction(b[r])] for r in range(rows)]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [vi - f * vr for vi, vr in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if M[i][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = M[i][cols]
    return x, len(pivots)


def simplex_max(c: Sequence[Fraction], A: Sequence[Sequence[Fraction]],
                b: Sequence[Fraction]):
    """Exact dense simplex for ``max c.y  s.t.  A y <= b, y >= 0`` with ``b >= 0``.

    Uses Bland's rule, so it terminates on degenerate problems. Returns
    ``(y, objective, x)`` where ``x`` is an optimal dual solution
    (``min b.x  s.t.  A^T x >= c, x >= 0``). Raises ``ValueError`` when the
    problem is unbounded.
    """
    m, n = len(A), len(c)
    if any(Fraction(v) < 0 for v in b):
        raise ValueError("simplex_max needs b >= 0 so that y = 0 is feasible")
    # tableau rows: constraints; columns: y (n), slack (m), rhs
    T = [[Fraction(A[i][j]) for j in range(n)]
         + [Fraction(int(i == k)) for k in range(m)]
         + [Fraction(b[i])] for i in range(m)]
    z = [-Fraction(v) for v in c] + [Fraction(0)] * m + [Fraction(0)]
    basis = [n + i for i in range(m)]
    width = n + m
    while True:
        enter = next((j for j in range(width) if z[j] < 0), None)
        if enter is None:
            break
        best = None
        leave = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise ValueError("linear program is unbounded")
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [vi - f * vl for vi, vl in zip(T[i], T[leave])]
        f = z[enter]
        z = [vz - f * vl for vz, vl in zip(z, T[leave])]
        basis[leave] = enter
    y = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            y[var] = T[i][-1]
    dual = [z[n + i] for i in range(m)]
    return y, z[-1], dual
