"""Bounded-term convex-combination membership oracles.

``conv_n(Y)`` is the set of combinations ``t_1 y_1 + ... + t_n y_n`` with
nonnegative coefficients summing to one; ``conv_2(X, Y)`` the segments
``t x + (1-t) y``.  Membership is decided exactly by enumerating small
supports and solving rational feasibility systems; every positive answer
carries a certificate that re-verifies by plain arithmetic.
"""

from dataclasses import dataclass
from itertools import combinations

from ascolim import linalg
from ascolim.errors import InputError
from ascolim.geometry import as_point, combine, point_is_exact, vsub
from ascolim.rats import RAT


class FinitePointSet:
    """Non-empty finite list of exact points in a common ambient space."""

    def __init__(self, points):
        pts = [as_point(p) for p in points]
        if not pts:
            raise InputError("empty point set")
        dim = len(pts[0])
        if any(len(p) != dim for p in pts):
            raise InputError("points of mixed ambient dimension")
        if not all(point_is_exact(p) for p in pts):
            raise InputError("finite point sets must be exact rational")
        self.points = pts
        self.dim = dim

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class ConvexCertificate:
    """Witness ``x == sum(c * p)`` with ``c >= 0`` summing to one."""

    points: tuple
    coefficients: tuple

    def verify(self, x):
        if any(c < 0 for c in self.coefficients):
            return False
        if sum(self.coefficients) != 1:
            return False
        return combine(self.points, self.coefficients) == tuple(x)


@dataclass(frozen=True)
class SegmentCertificate:
    """Witness ``p == t*x + (1-t)*y`` with ``t`` in [0, 1]."""

    x: tuple
    y: tuple
    t: object

    def verify(self, p):
        if not 0 <= self.t <= 1:
            return False
        got = tuple(self.t * a + (1 - self.t) * b
                    for a, b in zip(self.x, self.y))
        return got == tuple(p)


def conv_n_contains(point_set, n, x):
    """Is ``x`` a convex combination of at most ``n`` points of the set?

    Returns ``(verdict, certificate)``; the certificate is ``None`` on a
    negative verdict.  Decided by exact feasibility over every support of
    size ``min(n, |Y|)``.
    """
    if n < 1:
        raise InputError("n must be at least 1")
    if not isinstance(point_set, FinitePointSet):
        point_set = FinitePointSet(point_set)
    x = as_point(x)
    if len(x) != point_set.dim:
        raise InputError("probe point of wrong dimension")
    pts = point_set.points
    k = min(n, len(pts))
    rhs = list(x) + [RAT(1)]
    for support in combinations(range(len(pts)), k):
        cols = [pts[i] for i in support]
        mat = [[c[d] for c in cols] for d in range(point_set.dim)]
        mat.append([RAT(1)] * k)
        sol = linalg.solve_nonneg(mat, rhs)
        if sol is not None:
            cert = ConvexCertificate(tuple(cols), tuple(sol))
            assert cert.verify(x)
            return True, cert
    return False, None


def conv2_pair_contains(set_x, set_y, p):
    """Is ``p`` on a segment between ``set_x`` and ``set_y``?

    Exact; returns ``(verdict, SegmentCertificate | None)``.
    """
    if not isinstance(set_x, FinitePointSet):
        set_x = FinitePointSet(set_x)
    if not isinstance(set_y, FinitePointSet):
        set_y = FinitePointSet(set_y)
    if set_x.dim != set_y.dim:
        raise InputError("sets of mixed ambient dimension")
    p = as_point(p)
    if len(p) != set_x.dim:
        raise InputError("probe point of wrong dimension")
    for x in set_x.points:
        for y in set_y.points:
            t = _segment_parameter(x, y, p)
            if t is not None:
                cert = SegmentCertificate(x, y, t)
                assert cert.verify(p)
                return True, cert
    return False, None


def _segment_parameter(x, y, p):
    """Exact ``t`` in [0,1] with ``p = t*x + (1-t)*y``, or ``None``."""
    diff = vsub(x, y)
    t = None
    for d, dd in enumerate(diff):
        if dd != 0:
            t = (p[d] - y[d]) / dd
            break
    if t is None:  # x == y
        return RAT(0) if tuple(p) == tuple(y) else None
    if not 0 <= t <= 1:
        return None
    for d in range(len(p)):
        if t * x[d] + (1 - t) * y[d] != p[d]:
            return None
    return t


def conv2_with_convn_contains(point_set, n, p):
    """Membership of ``p`` in ``conv_2(X, conv_n(X))``, decided exactly.

    Searches, for each ``x`` in ``X``, the ray ``{p + s*(p - x) : s >= 0}``
    for a point of ``conv_n(X)`` (the segment endpoint ``q``), including
    the degenerate ``t = 1`` case ``p = x``.  Returns the verdict plus a
    witness ``(x, t, q)`` when positive.
    """
    if not isinstance(point_set, FinitePointSet):
        point_set = FinitePointSet(point_set)
    p = as_point(p)
    pts = point_set.points
    k = min(n, len(pts))
    for x in pts:
        if tuple(x) == tuple(p):
            return True, (x, RAT(1), x)
        # feasibility: p + s*(p - x) = sum(mu_i y_i), mu >= 0, sum mu = 1,
        # s >= 0, over every support of size k
        direction = vsub(p, x)
        for support in combinations(range(len(pts)), k):
            cols = [pts[i] for i in support]
            mat = [[-direction[d]] + [c[d] for c in cols]
                   for d in range(point_set.dim)]
            mat.append([RAT(0)] + [RAT(1)] * k)
            rhs = list(p) + [RAT(1)]
            sol = linalg.solve_nonneg(mat, rhs)
            if sol is None:
                continue
            s, mu = sol[0], sol[1:]
            q = combine(cols, mu)
            t = s / (1 + s)
            # p = t*x + (1-t)*q by construction; re-verify
            if all(t * x[d] + (1 - t) * q[d] == p[d]
                   for d in range(len(p))):
                return True, (x, t, q)
    return False, None


# -- independent full-hull oracle -------------------------------------------


def hull_contains(point_set, x):
    """Full convex-hull membership via separating-hyperplane enumeration.

    Independent of the feasibility route above: ``x`` is outside the hull
    iff some hyperplane spanned by points of ``Y`` (within their affine
    hull) strictly separates it, or ``x`` leaves the affine hull entirely.
    """
    if not isinstance(point_set, FinitePointSet):
        point_set = FinitePointSet(point_set)
    x = as_point(x)
    pts = point_set.points
    base = pts[0]
    rows = [list(vsub(q, base)) for q in pts[1:]]
    dim = point_set.dim
    hull_rank = linalg.rank(rows) if rows else 0
    if hull_rank == 0:
        return tuple(x) == tuple(base)
    res = linalg.solve([[r[d] for r in rows] for d in range(dim)],
                       list(vsub(x, base)))
    if res is None:
        return False
    # enumerate candidate facet hyperplanes through hull_rank points
    for support in combinations(range(len(pts)), hull_rank):
        anchor = pts[support[0]]
        span = [vsub(pts[i], anchor) for i in support[1:]]
        normal = _normal_in_hull(span, rows, dim)
        if normal is None:
            continue
        side_x = sum(n * c for n, c in zip(normal, vsub(x, anchor)))
        if side_x == 0:
            continue
        sides = [sum(n * c for n, c in zip(normal, vsub(q, anchor)))
                 for q in pts]
        if all(s * side_x <= 0 for s in sides):
            return False  # strictly separated
    return True


def _normal_in_hull(span, hull_rows, dim):
    """A vector in the affine-hull direction space orthogonal to ``span``."""
    basis_rows, pivots = linalg.row_reduce(hull_rows)
    basis = [basis_rows[i] for i in range(len(pivots))]
    if not basis:
        return None
    # normal = sum(a_j * basis_j) with normal . s == 0 for each s in span
    mat = [[sum(b[d] * s[d] for d in range(dim)) for b in basis]
           for s in span]
    if not mat:
        mat = [[RAT(0)] * len(basis)]
    red, piv = linalg.row_reduce(mat)
    free = [j for j in range(len(basis)) if j not in piv]
    if not free:
        return None
    j0 = free[0]
    coeff = [RAT(0)] * len(basis)
    coeff[j0] = RAT(1)
    for i, c in enumerate(piv):
        coeff[c] = -red[i][j0]
    return tuple(sum(coeff[j] * basis[j][d] for j in range(len(basis)))
                 for d in range(dim))
