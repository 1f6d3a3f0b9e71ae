"""Dense bounded-variable primal simplex for small LPs.

Solves ``max c.x  s.t.  A x <= b, 0 <= x <= u`` with ``b >= 0`` so the slack
basis is a feasible start.  The float pass finds a basis; that basis is then
re-solved and certified optimal in exact rational arithmetic.  If the
certificate fails the exact simplex runs from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import IKPError

FLOAT_TOL = 1e-9


class LpNumericalFailure(IKPError, RuntimeError):
    pass


@dataclass
class LpResult:
    x: list
    objective: Fraction
    basis: list
    iterations: int
    certified_from_float: bool


def _run(c, A, b, upper, num, tol, max_iter):
    m = len(A)
    nx = len(c)
    N = nx + m
    zero = num(0)
    one = num(1)
    tab = []
    for i in range(m):
        row = [num(v) for v in A[i]] + [zero] * m
        row[nx + i] = one
        tab.append(row)
    beta = [num(v) for v in b]
    ub = [None if u is None else num(u) for u in upper] + [None] * m
    d = [num(v) for v in c] + [zero] * m
    basis = [nx + i for i in range(m)]
    in_basis = [False] * nx + [True] * m
    at_upper = [False] * N

    for it in range(max_iter):
        enter = -1
        for j in range(N):
            if in_basis[j]:
                continue
            if not at_upper[j] and d[j] > tol and (ub[j] is None or ub[j] > 0):
                enter = j
                break
            if at_upper[j] and d[j] < -tol:
                enter = j
                break
        if enter < 0:
            x = [zero] * N
            for j in range(N):
                if at_upper[j]:
                    x[j] = ub[j]
            for i, j in enumerate(basis):
                x[j] = beta[i]
            return x, basis, at_upper, it
        s = -1 if at_upper[enter] else 1
        theta = ub[enter]
        leave = -1
        leave_to_upper = False
        for i in range(m):
            g = s * tab[i][enter]
            if g > tol:
                lim = beta[i] / g
                to_up = False
            elif g < -tol and ub[basis[i]] is not None:
                lim = (ub[basis[i]] - beta[i]) / (-g)
                to_up = True
            else:
                continue
            if lim < 0:
                lim = zero
            if (theta is None or lim < theta
                    or (leave >= 0 and lim == theta and basis[i] < basis[leave])):
                theta = lim
                leave = i
                leave_to_upper = to_up
        if theta is None:
            raise LpNumericalFailure("LP is unbounded")
        if leave >= 0 and ub[enter] is not None and ub[enter] <= theta:
            leave = -1
            theta = ub[enter]
        col = [tab[i][enter] for i in range(m)]
        for i in range(m):
            if col[i]:
                beta[i] -= s * col[i] * theta
        if leave < 0:
            at_upper[enter] = not at_upper[enter]
            continue
        r = leave
        start = ub[enter] if at_upper[enter] else zero
        beta[r] = start + s * theta
        old = basis[r]
        in_basis[old] = False
        at_upper[old] = leave_to_upper
        basis[r] = enter
        in_basis[enter] = True
        at_upper[enter] = False
        prow = tab[r]
        piv = prow[enter]
        prow = [v / piv for v in prow]
        tab[r] = prow
        nz = [j for j in range(N) if prow[j]]
        for i in range(m):
            if i == r:
                continue
            f = tab[i][enter]
            if f:
                row = tab[i]
                for j in nz:
                    row[j] -= f * prow[j]
                if tol:
                    row[enter] = zero
        f = d[enter]
        if f:
            for j in nz:
                d[j] -= f * prow[j]
            if tol:
                d[enter] = zero
        if tol:
            for i in range(m):
                u = ub[basis[i]]
                if beta[i] < 0:
                    beta[i] = zero
                elif u is not None and beta[i] > u:
                    beta[i] = u
    raise LpNumericalFailure(f"simplex did not terminate within {max_iter} iterations")


def _solve_square(M, rhs):
    """Exact Gauss-Jordan solve; returns None for a singular matrix."""
    n = len(M)
    aug = [list(M[i]) + [rhs[i]] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * bcol for a, bcol in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def _certify(c, A, b, upper, basis, at_upper):
    """Exact primal/dual check of a basis; returns the x vector or None."""
    m = len(A)
    nx = len(c)
    N = nx + m
    F = Fraction

    def column(j):
        if j < nx:
            return [F(A[i][j]) for i in range(m)]
        return [F(1) if i == j - nx else F(0) for i in range(m)]

    ub = [None if u is None else F(u) for u in upper] + [None] * m
    cc = [F(v) for v in c] + [F(0)] * m
    basic = set(basis)
    xN = {j: (ub[j] if at_upper[j] else F(0)) for j in range(N) if j not in basic}
    rhs = [F(v) for v in b]
    for j, v in xN.items():
        if v:
            colj = column(j)
            for i in range(m):
                rhs[i] -= colj[i] * v
    cols = [column(j) for j in basis]
    B = [[cols[k][i] for k in range(m)] for i in range(m)]
    xB = _solve_square(B, rhs)
    if xB is None:
        return None
    for k, j in enumerate(basis):
        if xB[k] < 0 or (ub[j] is not None and xB[k] > ub[j]):
            return None
    Bt = [[cols[i][k] for k in range(m)] for i in range(m)]
    y = _solve_square(Bt, [cc[j] for j in basis])
    if y is None:
        return None
    for j, v in xN.items():
        colj = column(j)
        dj = cc[j] - sum((y[i] * colj[i] for i in range(m) if colj[i]), F(0))
        if at_upper[j] and dj < 0:
            return None
        if not at_upper[j] and dj > 0 and (ub[j] is None or ub[j] > 0):
            return None
    x = [F(0)] * N
    for j, v in xN.items():
        x[j] = v
    for k, j in enumerate(basis):
        x[j] = xB[k]
    return x


def solve_lp(c, A, b, upper, max_iter=None) -> LpResult:
    """Maximize ``c.x`` subject to ``A x <= b`` and ``0 <= x <= upper``.

    ``upper`` entries may be ``None`` for unbounded variables.  All inputs are
    exact numbers; the returned solution and objective are :class:`Fraction`.
    """
    if any(v < 0 for v in b):
        raise ValueError("right-hand sides must be non-negative")
    nx = len(c)
    m = len(A)
    if max_iter is None:
        max_iter = 50 * (nx + m) + 100
    x = None
    certified = False
    iters = 0
    try:
        _, basis, at_upper, iters = _run(c, A, b, upper, float, FLOAT_TOL, max_iter)
        x = _certify(c, A, b, upper, basis, at_upper)
        certified = x is not None
    except LpNumericalFailure:
        x = None
    if x is None:
        x, basis, _, iters = _run(c, A, b, upper, Fraction, 0, max_iter)
    xs = x[:nx]
    obj = sum((Fraction(c[j]) * xs[j] for j in range(nx)), Fraction(0))
    return LpResult(xs, obj, basis, iters, certified)
