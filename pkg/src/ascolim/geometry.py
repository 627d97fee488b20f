"""Scalars, points and affine simplices.

Two scalar backends coexist: exact rationals (``int``/``Fraction``), the
default for every correctness-bearing identity, and binary floats with a
fixed comparison tolerance ``TAU`` for large sampled experiments.  A point
is a plain tuple of scalars; a simplex stores its vertices in construction
order and owns a cached exact solver for barycentric coordinates.
"""

import math
from dataclasses import dataclass
from itertools import combinations

from ascolim import linalg
from ascolim._kernels import matvec_q, max_pairwise_sqdist_q
from ascolim.errors import InputError
from ascolim.rats import RAT, RAT_TYPES, to_rat

#: comparison tolerance of the floating backend
TAU = 1e-9


def is_exact_scalar(x):
    return isinstance(x, RAT_TYPES) and not isinstance(x, bool)


def as_point(coords):
    """Normalize to a tuple point; exact entries become ``Fraction``."""
    pt = tuple(coords)
    if all(is_exact_scalar(c) for c in pt):
        return tuple(to_rat(c) for c in pt)
    return tuple(float(c) for c in pt)


def point_is_exact(p):
    return all(is_exact_scalar(c) for c in p)


def vadd(p, q):
    return tuple(a + b for a, b in zip(p, q))


def vsub(p, q):
    return tuple(a - b for a, b in zip(p, q))


def vscale(t, p):
    return tuple(t * a for a in p)


def dot(p, q):
    return sum(a * b for a, b in zip(p, q))


def sqdist(p, q):
    return sum((a - b) ** 2 for a, b in zip(p, q))


def combine(points, coeffs):
    """Linear combination ``sum(c * p)`` of points."""
    dim = len(points[0])
    acc = [0] * dim
    for c, p in zip(coeffs, points):
        for i, a in enumerate(p):
            acc[i] += c * a
    return tuple(acc)


def scale_common(values):
    """Fractions -> (integer numerators, common denominator)."""
    den = 1
    for v in values:
        d = int(v.denominator)
        den = den * d // math.gcd(den, d)
    return tuple(int(v * den) for v in values), den


@dataclass(frozen=True)
class Outside:
    """Verdict of a failed barycentric membership query.

    ``reason`` is ``"negative_coefficient"`` (point in the affine hull but
    outside the simplex; ``index``/``value`` name the violating
    coefficient) or ``"off_affine_hull"``.
    """

    reason: str
    index: int = -1
    value: object = None

    def __bool__(self):
        return False


class Simplex:
    """Geometric simplex ``conv{v_1, ..., v_r}``; rank r = vertex count.

    Vertices keep construction order.  Identity for complex membership is
    the unordered vertex set (``key``).  Affine independence is checked
    exactly on the rational backend, with a ``TAU``-thresholded rank test
    on the floating backend.
    """

    __slots__ = ("vertices", "rank", "dim", "exact", "key", "_solver",
                 "_contains_cache")

    def __init__(self, vertices):
        vs = tuple(as_point(v) for v in vertices)
        if not vs:
            raise InputError("a simplex needs at least one vertex")
        dim = len(vs[0])
        if any(len(v) != dim for v in vs):
            raise InputError("vertices of mixed ambient dimension")
        exact = all(point_is_exact(v) for v in vs)
        if not exact:
            vs = tuple(tuple(float(c) for c in v) for v in vs)
        self.vertices = vs
        self.rank = len(vs)
        self.dim = dim
        self.exact = exact
        self.key = frozenset(vs)
        self._solver = None
        self._contains_cache = {}
        if len(self.key) != self.rank:
            raise InputError("repeated vertex")
        if not self._independent():
            raise InputError("vertices are affinely dependent")

    @classmethod
    def trusted(cls, vertices):
        """Construct without the independence check.

        Only for vertex sets that are independent by construction: subsets
        of a valid simplex's vertices, barycenter chains of a subdivision,
        staircase lifts.
        """
        obj = cls.__new__(cls)
        vs = tuple(tuple(v) for v in vertices)
        obj.vertices = vs
        obj.rank = len(vs)
        obj.dim = len(vs[0])
        obj.exact = point_is_exact(vs[0])
        obj.key = frozenset(vs)
        obj._solver = None
        obj._contains_cache = {}
        return obj

    def _independent(self):
        if self.rank == 1:
            return True
        edges = [vsub(v, self.vertices[0]) for v in self.vertices[1:]]
        if self.exact:
            return linalg.rank(edges) == self.rank - 1
        return linalg.rank_float(edges, TAU) == self.rank - 1

    def __eq__(self, other):
        return isinstance(other, Simplex) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Simplex({list(self.vertices)!r})"

    def barycenter(self):
        r = RAT(1, self.rank) if self.exact else 1.0 / self.rank
        return combine(self.vertices, [r] * self.rank)

    def faces(self):
        """All proper nonempty faces, as simplices."""
        out = []
        for k in range(1, self.rank):
            for idx in combinations(range(self.rank), k):
                out.append(Simplex.trusted([self.vertices[i] for i in idx]))
        return out

    def facets(self):
        """Faces of rank r-1 (the boundary pieces)."""
        return [Simplex.trusted(self.vertices[:i] + self.vertices[i + 1:])
                for i in range(self.rank)]

    def has_face(self, other):
        return other.key <= self.key

    # -- barycentric machinery ------------------------------------------

    def _exact_solver(self):
        """Cached (row-selection, kernel matrix, residual rows) triple.

        The affine system ``sum(s_i * v_i) = x, sum(s_i) = 1`` has the
        (D+1) x r coefficient matrix ``A``; we invert r independent rows
        once and keep the remaining rows for the affine-hull residual
        check.
        """
        if self._solver is None:
            rows = [[self.vertices[i][d] for i in range(self.rank)]
                    for d in range(self.dim)]
            rows.append([RAT(1)] * self.rank)
            _, pivot_rows = linalg.row_reduce(
                [[rows[d][i] for d in range(self.dim + 1)]
                 for i in range(self.rank)])
            sel = list(pivot_rows)
            inv = linalg.invert([rows[d] for d in sel])
            inv_num, inv_den = _int_matrix(inv)
            rest = [d for d in range(self.dim + 1) if d not in sel]
            check = []
            for d in rest:
                # row_d @ inv expresses rhs[d] from rhs[sel]
                coeff = [sum(rows[d][i] * inv[i][k] for i in range(self.rank))
                         for k in range(self.rank)]
                check.append((d, coeff))
            self._solver = (sel, inv_num, inv_den, check)
        return self._solver

    def barycentric(self, x):
        """Coefficients of ``x`` in this simplex, or an ``Outside`` verdict."""
        x = as_point(x)
        if len(x) != self.dim:
            raise InputError(
                f"point dimension {len(x)} != simplex dimension {self.dim}")
        if self.exact and point_is_exact(x):
            return self._barycentric_exact(x)
        return self._barycentric_float(tuple(float(c) for c in x))

    def _barycentric_exact(self, x):
        sel, inv_num, inv_den, check = self._exact_solver()
        rhs = list(x) + [RAT(1)]
        for d, coeff in check:
            if sum(c * rhs[s] for c, s in zip(coeff, sel)) != rhs[d]:
                return Outside("off_affine_hull")
        sel_num, sel_den = scale_common([rhs[s] for s in sel])
        nums, den = matvec_q(inv_num, inv_den, sel_num, sel_den)
        coords = tuple(RAT(n, den) for n in nums)
        for i, s in enumerate(coords):
            if s < 0:
                return Outside("negative_coefficient", i, s)
        return coords

    def _barycentric_float(self, x):
        # float lane: rebuild a small least-squares-free solve each call
        rows = [[float(self.vertices[i][d]) for i in range(self.rank)]
                for d in range(self.dim)]
        rows.append([1.0] * self.rank)
        rhs = list(x) + [1.0]
        sol = _solve_float(rows, rhs)
        if sol is None:
            return Outside("off_affine_hull")
        coords, residual = sol
        if residual > TAU:
            return Outside("off_affine_hull")
        for i, s in enumerate(coords):
            if s < -TAU:
                return Outside("negative_coefficient", i, s)
        return tuple(coords)

    def contains(self, x):
        x = tuple(x)
        got = self._contains_cache.get(x)
        if got is None:
            got = not isinstance(self.barycentric(x), Outside)
            self._contains_cache[x] = got
        return got

    def point_at(self, coords):
        """The point with the given barycentric coefficients."""
        return combine(self.vertices, coords)


def _int_matrix(mat):
    """Fraction matrix -> (int rows, common denominator) for the kernel."""
    flat = [v for row in mat for v in row]
    nums, den = scale_common(flat)
    ncols = len(mat[0])
    rows = tuple(tuple(nums[i * ncols + j] for j in range(ncols))
                 for i in range(len(mat)))
    return rows, den


def _solve_float(rows, rhs):
    """Least-squares-free float solve of a tall system; (coords, residual)."""
    n = len(rows[0])
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    nrows = len(m)
    r = 0
    cols = []
    for c in range(n):
        pr = max(range(r, nrows), key=lambda i: abs(m[i][c]))
        if abs(m[pr][c]) <= TAU:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        m[r] = [a / pv for a in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0.0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        cols.append(c)
        r += 1
    if len(cols) < n:
        return None
    coords = [0.0] * n
    for i, c in enumerate(cols):
        coords[c] = m[i][n]
    residual = max((abs(m[i][n]) for i in range(r, nrows)), default=0.0)
    return coords, residual


# -- spec-level operations ----------------------------------------------


def barycentric_coordinates(simplex, x):
    """Barycentric coefficients of ``x`` in ``simplex`` or ``Outside``."""
    return simplex.barycentric(x)


def diameter_sq(simplex):
    """Exact squared euclidean diameter (max pairwise vertex distance)."""
    if simplex.rank == 1:
        return RAT(0) if simplex.exact else 0.0
    if simplex.exact:
        flat = [c for v in simplex.vertices for c in v]
        nums, den = scale_common(flat)
        dim = simplex.dim
        pts = [tuple(nums[i * dim:(i + 1) * dim])
               for i in range(simplex.rank)]
        return RAT(max_pairwise_sqdist_q(pts), den * den)
    best = 0.0
    for i in range(simplex.rank):
        for j in range(i + 1, simplex.rank):
            best = max(best, sqdist(simplex.vertices[i], simplex.vertices[j]))
    return best


def sqdist_point_simplex(x, simplex):
    """Exact squared euclidean distance from ``x`` to a rational simplex.

    Enumerates the faces, projects onto each affine hull by the normal
    equations, and keeps the feasible candidates; the true minimizer lies
    in the relative interior of some face.
    """
    x = as_point(x)
    best = None
    for k in range(1, simplex.rank + 1):
        for idx in combinations(range(simplex.rank), k):
            verts = [simplex.vertices[i] for i in idx]
            base = verts[0]
            edges = [vsub(v, base) for v in verts[1:]]
            if edges:
                gram = [[dot(a, b) for b in edges] for a in edges]
                rhs = [dot(e, vsub(x, base)) for e in edges]
                res = linalg.solve(gram, rhs)
                if res is None or res[1]:
                    continue
                coeff = res[0]
                if any(c < 0 for c in coeff) or sum(coeff) > 1:
                    continue
                proj = base
                for c, e in zip(coeff, edges):
                    proj = vadd(proj, vscale(c, e))
            else:
                proj = base
            d = sqdist(x, proj)
            if best is None or d < best:
                best = d
    return best


def affine_lipschitz_sq_bound(simplex, values):
    """Exact bound ``L^2`` for the affine map vertex_i -> values_i.

    Uses the Frobenius norm of the minimal-norm linear extension:
    ``trace((E^T E)^{-1} G^T G)`` with E the domain edge matrix and G the
    value edge matrix.  Dominates the squared operator norm.
    """
    if simplex.rank == 1:
        return RAT(0)
    base = simplex.vertices[0]
    vals = [tuple(v) for v in values]
    e_cols = [vsub(v, base) for v in simplex.vertices[1:]]
    g_cols = [vsub(v, vals[0]) for v in vals[1:]]
    k = len(e_cols)
    gram = [[dot(e_cols[i], e_cols[j]) for j in range(k)] for i in range(k)]
    gtg = [[dot(g_cols[i], g_cols[j]) for j in range(k)] for i in range(k)]
    inv = linalg.invert(gram)
    return sum(sum(inv[i][j] * gtg[j][i] for j in range(k))
               for i in range(k))


def diameter(simplex, norm="euclidean"):
    """Diameter of the simplex under the chosen norm, as a float.

    For a convex norm this equals the max pairwise vertex distance.  Use
    ``diameter_sq`` when the exact squared euclidean value is needed.
    """
    if norm == "euclidean":
        return math.sqrt(diameter_sq(simplex))
    if norm == "max":
        best = 0
        for i in range(simplex.rank):
            for j in range(i + 1, simplex.rank):
                d = max(abs(a - b) for a, b in
                        zip(simplex.vertices[i], simplex.vertices[j]))
                best = max(best, d)
        return float(best)
    raise InputError(f"unsupported norm {norm!r}")
