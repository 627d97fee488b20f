"""Small exact linear-algebra routines over ``fractions.Fraction``.

Everything here is desk-scale (matrices of a handful of rows/columns), so
plain Gauss-Jordan elimination with exact scalars is the right tool.  A
floating rank test with an explicit pivot threshold backs the floating
scalar lane.
"""

from itertools import combinations

from ascolim.rats import RAT

ZERO = RAT(0)
ONE = RAT(1)


def row_reduce(mat):
    """Gauss-Jordan over exact scalars.

    Returns ``(reduced, pivot_cols)`` where ``reduced`` is the reduced
    row-echelon form and ``pivot_cols`` the pivot column indices.
    """
    m = [list(row) for row in mat]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(mat):
    if not mat:
        return 0
    return len(row_reduce(mat)[1])


def solve(mat, rhs):
    """Solve ``mat @ x = rhs`` exactly.

    Returns ``(solution, free_cols)`` with free variables set to zero, or
    ``None`` if the system is inconsistent.
    """
    ncols = len(mat[0]) if mat else 0
    if not mat:
        return ([], []) if all(v == 0 for v in rhs) else None
    aug = [list(row) + [b] for row, b in zip(mat, rhs)]
    red, pivots = row_reduce(aug)
    if ncols in pivots:
        return None
    sol = [ZERO] * ncols
    for i, c in enumerate(pivots):
        sol[c] = red[i][ncols]
    free = [c for c in range(ncols) if c not in pivots]
    return sol, free


def invert(mat):
    """Exact inverse of a square matrix; raises ``ValueError`` if singular."""
    n = len(mat)
    aug = [list(row) + [ONE if i == j else ZERO for j in range(n)]
           for i, row in enumerate(mat)]
    red, pivots = row_reduce(aug)
    if pivots != list(range(n)):
        raise ValueError("singular matrix")
    return [row[n:] for row in red]


def solve_nonneg(mat, rhs):
    """A nonnegative exact solution of ``mat @ x = rhs``, or ``None``.

    Decides feasibility of ``{x >= 0 : mat @ x = rhs}`` by enumerating
    supports of basic solutions (columns with independent selections up to
    the matrix rank).  Fine for the handful of columns this package needs.
    """
    ncols = len(mat[0]) if mat else 0
    if all(v == 0 for v in rhs):
        return [ZERO] * ncols
    r = rank(mat)
    for k in range(1, r + 1):
        for support in combinations(range(ncols), k):
            sub = [[row[j] for j in support] for row in mat]
            res = solve(sub, rhs)
            if res is None:
                continue
            sol, free = res
            if free:
                continue  # dependent columns; a smaller support covers this
            if all(v >= 0 for v in sol):
                full = [ZERO] * ncols
                for j, v in zip(support, sol):
                    full[j] = v
                return full
    return None


def rank_float(mat, tau):
    """Rank of a float matrix using partial pivoting with threshold ``tau``."""
    m = [list(map(float, row)) for row in mat]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    r = 0
    for c in range(ncols):
        pr = max(range(r, nrows), key=lambda i: abs(m[i][c]), default=None)
        if pr is None or abs(m[pr][c]) <= tau:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        for i in range(r + 1, nrows):
            f = m[i][c] / pv
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == nrows:
            break
    return r
