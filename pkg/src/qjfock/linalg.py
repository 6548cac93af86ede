"""Exact linear solves over Q used by the fitting routines."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from flint import fmpq, fmpq_mat

from .series import FourierSeries, to_fmpq, to_frac

# sample points for u; avoids 0 and +-1 where the generator denominators vanish
SAMPLE_U = [Fraction(a, b) for a, b in [
    (2, 1), (3, 1), (1, 2), (5, 1), (1, 3), (3, 2), (7, 1), (2, 3), (5, 2), (1, 5),
    (4, 3), (7, 2), (11, 1), (3, 5), (5, 3), (9, 2), (2, 7), (13, 1), (7, 3), (3, 7),
    (11, 2), (5, 7), (17, 1), (8, 3), (4, 7), (13, 2), (19, 1), (7, 5), (9, 4), (2, 9),
    (23, 1), (10, 3), (3, 11), (11, 4), (6, 7), (29, 1), (13, 3), (5, 9), (15, 2), (31, 1),
]]


def rref_solve(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction], ncols: int
               ) -> Tuple[Optional[List[Fraction]], int, List[int]]:
    """Solve ``rows @ x = rhs``.

    Returns ``(solution or None if inconsistent, rank, pivot_columns)``; free
    variables are set to zero.
    """
    if not rows:
        return [Fraction(0)] * ncols, 0, []
    flat = []
    for row, b in zip(rows, rhs):
        flat.extend(to_fmpq(x) for x in row)
        flat.append(to_fmpq(b))
    mat = fmpq_mat(len(rows), ncols + 1, flat)
    red, rank = mat.rref()
    pivots = []
    sol = [Fraction(0)] * ncols
    for i in range(rank):
        for j in range(ncols + 1):
            if red[i, j] != 0:
                if j == ncols:
                    return None, rank, pivots
                pivots.append(j)
                sol[j] = to_frac(red[i, ncols])
                break
    return sol, rank, pivots


def series_equations(basis: Sequence[FourierSeries], target: FourierSeries, orders: Sequence[int],
                     samples: int) -> Tuple[list, list]:
    """Turn ``sum_m c_m basis_m = target`` into scalar equations.

    Every q-order contributes one equation per sample point of u; q-only
    coefficients contribute a single equation.
    """
    rows, rhs = [], []
    q_only = target.is_q_only() and all(b.is_q_only() for b in basis)
    points = [None] if q_only else SAMPLE_U[:samples]
    for d in orders:
        coeffs = [b[d] for b in basis]
        tcoef = target[d]
        for u in points:
            if u is None:
                rows.append([c.constant_value() for c in coeffs])
                rhs.append(tcoef.constant_value())
                continue
            try:
                row = [c.evaluate(u) for c in coeffs]
                val = tcoef.evaluate(u)
            except ZeroDivisionError:
                continue
            rows.append(row)
            rhs.append(val)
    return rows, rhs


def combine(basis: Sequence[FourierSeries], coeffs: Sequence[Fraction], qmax: int) -> FourierSeries:
    out = FourierSeries.zero(qmax)
    for b, c in zip(basis, coeffs):
        if c != 0:
            out = out + b.scale(c)
    return out.truncate(qmax)
