"""Finite geometric simplicial complexes.

A complex is a face-closed set of simplices in a common ambient space whose
pairwise intersections are common faces.  The module provides barycentric
subdivision (with the diameter-contraction guarantee and parent tracking
for fast point location), diameter-driven iterated subdivision, staircase
triangulation of prisms ``|Σ| x [0,1]``, and carriers of subcomplexes.
"""

import math
from itertools import combinations

from ascolim import linalg
from ascolim.errors import InputError, ResolutionExceededError
from ascolim.geometry import (Outside, Simplex, diameter_sq, vsub)
from ascolim.rats import RAT


class SimplicialComplex:
    """Face-closed finite set of simplices in a common ambient space."""

    __slots__ = ("simplices", "dim", "rank", "_tops", "_by_key")

    def __init__(self, simplices, close=True):
        gen = list(simplices)
        if not gen:
            raise InputError("empty complex")
        dim = gen[0].dim
        if any(s.dim != dim for s in gen):
            raise InputError("simplices of mixed ambient dimension")
        pool = {}
        for s in gen:
            pool[s.key] = s
        if close:
            stack = list(gen)
            while stack:
                s = stack.pop()
                if s.rank == 1:
                    continue
                for f in s.facets():
                    if f.key not in pool:
                        pool[f.key] = f
                        stack.append(f)
        self.simplices = frozenset(pool.values())
        self._by_key = pool
        self.dim = dim
        self.rank = max(s.rank for s in self.simplices)
        self._tops = None

    def tops(self):
        """Simplices that are not a proper face of another member."""
        if self._tops is None:
            covered = set()
            tops = []
            for s in sorted(self.simplices, key=lambda t: -t.rank):
                if s.key in covered:
                    continue
                tops.append(s)
                for k in range(1, s.rank):
                    for idx in combinations(s.vertices, k):
                        covered.add(frozenset(idx))
            self._tops = sorted(tops, key=lambda s: sorted(s.vertices))
        return self._tops

    def vertices(self):
        out = set()
        for s in self.simplices:
            out.update(s.vertices)
        return sorted(out)

    def __contains__(self, simplex):
        return simplex.key in self._by_key

    def __len__(self):
        return len(self.simplices)

    def contains_point(self, x):
        return any(top.contains(x) for top in self.tops())

    def locate(self, x):
        """A top simplex containing ``x`` together with its coordinates."""
        for top in self.tops():
            coords = top.barycentric(x)
            if not isinstance(coords, Outside):
                return top, coords
        return None

    def skeleton(self, max_rank):
        """Subcomplex of all simplices of rank at most ``max_rank``."""
        kept = [s for s in self.simplices if s.rank <= max_rank]
        if not kept:
            raise InputError("empty skeleton")
        return SimplicialComplex(kept, close=False)

    def validate(self):
        """Exhaustive desk-scale check of the complex invariants.

        Face closure plus the pairwise common-face property; raises
        ``InputError`` with the offending pair otherwise.
        """
        keys = {s.key for s in self.simplices}
        for s in self.simplices:
            for f in s.facets() if s.rank > 1 else []:
                if f.key not in keys:
                    raise InputError(f"missing face {f!r} of {s!r}")
        tops = self.tops()
        for a, b in combinations(tops, 2):
            if not _intersection_is_common_face(a, b):
                raise InputError(
                    f"simplices {a!r} and {b!r} do not meet in a face")
        return True


def _intersection_vertices(s1, s2):
    """Vertices of the polytope ``s1 ∩ s2`` by basic-solution enumeration."""
    dim = s1.dim
    n1, n2 = s1.rank, s2.rank
    ncols = n1 + n2
    rows = []
    for d in range(dim):
        rows.append([s1.vertices[i][d] for i in range(n1)] +
                    [-s2.vertices[j][d] for j in range(n2)])
    rows.append([RAT(1)] * n1 + [RAT(0)] * n2)
    rows.append([RAT(0)] * n1 + [RAT(1)] * n2)
    rhs = [RAT(0)] * dim + [RAT(1), RAT(1)]
    r = linalg.rank(rows)
    seen = set()
    points = []
    for support in combinations(range(ncols), min(r, ncols)):
        sub = [[row[j] for j in support] for row in rows]
        res = linalg.solve(sub, rhs)
        if res is None:
            continue
        sol, free = res
        if free or any(v < 0 for v in sol):
            continue
        coeffs = {j: v for j, v in zip(support, sol)}
        x = tuple(
            sum(coeffs.get(i, 0) * s1.vertices[i][d] for i in range(n1))
            for d in range(dim))
        if x not in seen:
            seen.add(x)
            points.append(x)
    return points


def _intersection_is_common_face(s1, s2):
    shared = s1.key & s2.key
    pts = _intersection_vertices(s1, s2)
    if not shared:
        return not pts
    face = Simplex(sorted(shared))
    return all(face.contains(x) for x in pts)


# -- barycentric subdivision ----------------------------------------------


def _chains(complex_):
    """All chains in the face poset, as lists ordered by inclusion."""
    order = sorted(complex_.simplices, key=lambda s: s.rank)
    ending = {}
    for s in order:
        chains = [[s]]
        for t in order:
            if t.rank >= s.rank:
                break
            if t.key < s.key:
                chains.extend(ch + [s] for ch in ending[t.key])
        ending[s.key] = chains
    out = []
    for chains in ending.values():
        out.extend(chains)
    return out


def bsd_with_parents(complex_, centers=None):
    """Barycentric subdivision plus the parent map.

    Returns ``(subdivided, parents)`` where ``parents`` maps the key of
    each new simplex to the member of the input complex whose relative
    interior carries it (the largest element of its barycenter chain).
    """
    parents = {}
    cells = []
    if centers is None:
        centers = {s.key: s.barycenter() for s in complex_.simplices}
    for chain in _chains(complex_):
        cell = Simplex.trusted([centers[f.key] for f in chain])
        cells.append(cell)
        parents[cell.key] = chain[-1]
    return SimplicialComplex(cells, close=False), parents


def barycentric_subdivide(complex_):
    """The barycentric subdivision ``bsd(Σ)``; a refinement of ``Σ``."""
    return bsd_with_parents(complex_)[0]


def max_diameter_sq(complex_):
    return max(diameter_sq(s) for s in complex_.tops())


def subdivide_until(complex_, delta):
    """Iterate ``bsd`` until every simplex has diameter below ``delta``.

    Returns ``(m, subdivided)`` with ``m`` the first iterate that works.
    The loop is capped by the a-priori bound from the per-step
    ``(r-1)/r`` diameter contraction.
    """
    if delta <= 0:
        raise InputError("delta must be positive")
    delta_sq = delta * delta
    r = complex_.rank
    current = complex_
    if r == 1:
        return 0, current
    d0 = max_diameter_sq(current)
    if d0 == 0:
        return 0, current
    ratio = ((r - 1) / r) ** 2
    cap = 0
    if float(d0) > float(delta_sq):
        cap = math.ceil(math.log(float(delta_sq) / float(d0))
                        / math.log(ratio)) + 2
    m = 0
    while max_diameter_sq(current) >= delta_sq:
        if m >= cap:
            raise ResolutionExceededError(
                f"subdivision bound {cap} reached without diameter < {delta}")
        current = barycentric_subdivide(current)
        m += 1
    return m, current


class SubdividedComplex:
    """A complex with its iterated-subdivision history.

    Keeps every level, the parent map per level for hierarchical point
    location and root tracking, and per vertex its "origin": the vertex
    set of the minimal base simplex whose relative interior carries it.
    A vertex lies in a base simplex exactly when its origin is a subset
    of the simplex's vertex set, which turns carrier and constraint
    queries into set arithmetic.
    """

    def __init__(self, base):
        self.levels = [base]
        self.parents = []  # parents[i]: keys of level i+1 -> simplex of level i
        self.origins = {tuple(v): frozenset([tuple(v)])
                        for v in base.vertices()}

    @property
    def base(self):
        return self.levels[0]

    @property
    def final(self):
        return self.levels[-1]

    @property
    def depth(self):
        return len(self.levels) - 1

    def refine(self, steps=1):
        for _ in range(steps):
            current = self.levels[-1]
            centers = {s.key: (s.barycenter(), s)
                       for s in current.simplices}
            for center, src in centers.values():
                if center not in self.origins:
                    origin = frozenset()
                    for v in src.vertices:
                        origin |= self.origins[tuple(v)]
                    self.origins[center] = origin
            nxt, par = bsd_with_parents(current, centers={
                k: c for k, (c, _) in centers.items()})
            self.levels.append(nxt)
            self.parents.append(par)
        return self

    def vertex_in_base_simplex(self, vertex, base_simplex):
        """Exact ``vertex in base_simplex`` by origin set arithmetic."""
        return self.origins[tuple(vertex)] <= base_simplex.key

    def refine_until(self, delta):
        if delta <= 0:
            raise InputError("delta must be positive")
        delta_sq = delta * delta
        r = self.final.rank
        if r == 1:
            return 0
        d0 = max_diameter_sq(self.final)
        cap = 0
        if float(d0) >= float(delta_sq):
            ratio = ((r - 1) / r) ** 2
            cap = math.ceil(math.log(float(delta_sq) / float(d0))
                            / math.log(ratio)) + 2
        m = 0
        while max_diameter_sq(self.final) >= delta_sq:
            if m >= cap:
                raise ResolutionExceededError("subdivision cap reached")
            self.refine()
            m += 1
        return m

    def root(self, simplex):
        """Minimal base-complex simplex carrying ``simplex``."""
        key = simplex.key
        current = simplex
        for par in reversed(self.parents):
            current = par[current.key]
        return current

    def locate_final(self, x, base_hint=None):
        """Find a final top simplex containing ``x`` by level descent."""
        if base_hint is not None:
            coords = base_hint.barycentric(x)
            top = base_hint if not isinstance(coords, Outside) else None
        else:
            top = None
        if top is None:
            hit = self.base.locate(x)
            if hit is None:
                return None
            top = hit[0]
        for level, par in zip(self.levels[1:], self.parents):
            nxt = None
            for cell in level.tops():
                if par[cell.key].key <= top.key and cell.contains(x):
                    nxt = cell
                    break
            if nxt is None:  # numerical impossibility on the exact lane
                hit = level.locate(x)
                if hit is None:
                    return None
                nxt = hit[0]
            top = nxt
        return top


# -- carriers --------------------------------------------------------------


class SubcomplexCarrier:
    """A union of member simplices, stored by its selecting subset.

    The carrier invariant ``E = union of the member simplices it
    contains`` is maintained by expanding the selection to every member
    simplex contained in it (decided exactly via vertex containment).
    """

    def __init__(self, parent, selected=()):
        self.parent = parent
        chosen = {}
        for s in selected:
            if s not in parent:
                raise InputError(f"{s!r} is not a member of the parent complex")
            chosen[s.key] = s
            for f in s.faces():
                chosen[f.key] = f
        # expand: any member simplex whose vertices all lie in a selected one
        if chosen:
            tops = [s for s in chosen.values()]
            for s in parent.simplices:
                if s.key in chosen:
                    continue
                if any(all(t.contains(v) for v in s.vertices) for t in tops):
                    chosen[s.key] = s
        self.selected = frozenset(chosen.values())

    def is_empty(self):
        return not self.selected

    def contains_simplex(self, simplex):
        """Is ``simplex`` (not necessarily a member) inside the carrier?"""
        return any(all(t.contains(v) for v in simplex.vertices)
                   for t in self.selected)

    def contains_point(self, x):
        return any(s.contains(x) for s in self.selected if s in _tops(self))

    def tops(self):
        keys = {s.key for s in self.selected}
        return [s for s in self.selected
                if not any(s.key < t for t in keys if t != s.key)]


def _tops(carrier):
    return set(carrier.tops())


# -- prisms ---------------------------------------------------------------


def _lift(v, t):
    return tuple(v) + (RAT(t),)


def _staircase(simplex, order_key):
    """Kuhn staircase cells of ``simplex x [0,1]`` under a global order."""
    vs = sorted(simplex.vertices, key=order_key)
    k = len(vs)
    cells = []
    for j in range(k):
        verts = [_lift(v, 0) for v in vs[:j + 1]] + \
                [_lift(v, 1) for v in vs[j:]]
        cells.append(Simplex.trusted(verts))
    return cells


def triangulate_prism(complex_, aligned=()):
    """Triangulate ``|Σ| x [0,1]`` consistently across shared faces.

    Staircase triangulation of each top prism under the global
    lexicographic vertex order, so the cells over a shared face agree and
    ``C x [0,1]`` is a union of cells for every aligned carrier ``C`` (as
    are the two end copies of ``|Σ|``).
    """
    for car in aligned:
        if car.parent is not complex_:
            raise InputError("aligned carrier of a different complex")
    cells = []
    for top in complex_.tops():
        cells.extend(_staircase(top, order_key=tuple))
    ends = [Simplex.trusted([_lift(v, t) for v in s.vertices])
            for s in complex_.tops() for t in (0, 1)]
    return SimplicialComplex(cells + ends)


def prism_end_carrier(prism, base, t):
    """Carrier of ``|base| x {t}`` inside a prism triangulation."""
    sel = [Simplex([_lift(v, t) for v in s.vertices]) for s in base.tops()]
    return SubcomplexCarrier(prism, sel)


def prism_over_carrier(prism, carrier):
    """Carrier of ``C x [0,1]`` inside a prism triangulation."""
    sel = []
    for s in carrier.tops():
        sel.extend(_staircase(s, order_key=tuple))
        sel.append(Simplex([_lift(v, 0) for v in s.vertices]))
        sel.append(Simplex([_lift(v, 1) for v in s.vertices]))
    return SubcomplexCarrier(prism, sel)


# -- exact refinement volumes ----------------------------------------------


def relative_volumes(parent, pieces):
    """Volumes of full-rank ``pieces`` relative to ``parent`` (sums to 1).

    Pieces must have the same rank as ``parent`` and live in its affine
    hull; each volume ratio is the absolute determinant of the piece's
    edge vectors expressed in the parent's edge basis, an exact rational.
    """
    r = parent.rank
    base = parent.vertices[0]
    edges = [vsub(v, base) for v in parent.vertices[1:]]
    out = []
    for piece in pieces:
        if piece.rank != r:
            raise InputError("piece of different rank")
        coeff_rows = []
        for v in list(piece.vertices[1:]):
            rel = vsub(v, piece.vertices[0])
            res = linalg.solve([[e[d] for e in edges]
                                for d in range(parent.dim)], list(rel))
            if res is None:
                raise InputError("piece not in the parent affine hull")
            coeff_rows.append(res[0])
        out.append(abs(_det(coeff_rows)))
    return out


def _det(rows):
    n = len(rows)
    m = [list(r) for r in rows]
    det = RAT(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pr is None:
            return RAT(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det
