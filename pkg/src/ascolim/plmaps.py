"""Piecewise-affine maps on carriers of complexes, and generic evaluators.

A ``PLMap`` stores one value per vertex of its domain complex and
evaluates by exact point location plus barycentric combination, so
composition with exact inputs stays exact.  ``FuncMap`` wraps an arbitrary
callable behind the same evaluation interface.  ``bake`` turns any
evaluator into a ``PLMap`` on a chosen refinement of its domain.
"""

from ascolim.errors import InputError
from ascolim.geometry import Outside, as_point, combine, point_is_exact
from ascolim.simplicial import SimplicialComplex, SubdividedComplex


class PLMap:
    """Affine-on-each-simplex map determined by its vertex values."""

    def __init__(self, domain, values):
        if isinstance(domain, SubdividedComplex):
            domain = domain.final
        if not isinstance(domain, SimplicialComplex):
            raise InputError("PLMap domain must be a complex")
        self.domain = domain
        self.values = {tuple(v): as_point(values[tuple(v)])
                       for v in domain.vertices()}
        lengths = {len(v) for v in self.values.values()}
        if len(lengths) != 1:
            raise InputError("PL values of mixed target dimension")
        self.target_dim = lengths.pop()
        self.exact = all(point_is_exact(v) for v in self.values.values())

    def eval_located(self, simplex, coords):
        """Value at the point of ``simplex`` with barycentric ``coords``."""
        vals = [self.values[v] for v in simplex.vertices]
        return combine(vals, coords)

    def __call__(self, x, hint=None):
        key = tuple(x)
        value = self.values.get(key)
        if value is not None:
            return value
        if hint is not None:
            coords = hint.barycentric(key)
            if not isinstance(coords, Outside):
                return self.eval_located(hint, coords)
        hit = self.domain.locate(key)
        if hit is None:
            raise InputError(f"point {x!r} outside the PL domain")
        return self.eval_located(*hit)

    def vertex_value(self, v):
        return self.values[tuple(v)]

    def image_points(self):
        return sorted(set(self.values.values()))


class FuncMap:
    """A bare evaluator; ``exact`` declares whether values are rational."""

    def __init__(self, fn, exact=False):
        self.fn = fn
        self.exact = exact

    def eval_located(self, simplex, coords):
        return self.fn(combine(simplex.vertices, coords))

    def __call__(self, x, hint=None):
        return self.fn(tuple(x))


def as_evaluator(obj):
    if isinstance(obj, (PLMap, FuncMap)):
        return obj
    if callable(obj):
        return FuncMap(obj)
    raise InputError(f"not an evaluator: {obj!r}")


def bake(evaluator, domain, refine=0):
    """Sample ``evaluator`` at the vertices of ``bsd^refine(domain)``.

    Returns ``(PLMap, SubdividedComplex)``; the PL surrogate agrees with
    the evaluator on the refined vertex set and interpolates in between.
    """
    tree = domain if isinstance(domain, SubdividedComplex) \
        else SubdividedComplex(domain)
    if refine:
        tree.refine(refine)
    fn = as_evaluator(evaluator)
    values = {tuple(v): tuple(fn(v)) for v in tree.final.vertices()}
    return PLMap(tree.final, values), tree


class Homotopy:
    """Evaluator on ``|Σ| x [0,1]``; wraps ``fn(x, t)``."""

    def __init__(self, fn, exact=False):
        self.fn = fn
        self.exact = exact

    def __call__(self, x, t):
        return self.fn(tuple(x), t)

    def slice_at(self, t):
        return FuncMap(lambda x, _t=t: self.fn(tuple(x), _t),
                       exact=self.exact)


class PLHomotopy:
    """Homotopy backed by a PLMap on a prism triangulation of ``|Σ| x [0,1]``."""

    def __init__(self, prism_map):
        self.prism_map = prism_map
        self.exact = prism_map.exact

    def __call__(self, x, t):
        return self.prism_map(tuple(x) + (t,))

    def slice_at(self, t):
        return FuncMap(lambda x, _t=t: self.prism_map(tuple(x) + (_t,)),
                       exact=self.exact)
