"""The approximation-homotopy engine.

Given a map on a finite complex, a compact-open neighbourhood (a finite
intersection of "image of K inside W" constraints), a frozen carrier, and
a filtered-space model, the engine runs the rank induction: normalize
constraints to per-cell form by refinement, assign a well-filled chart
with nested cores to every maximal cell, recurse on the skeleton, and
assemble the three-branch homotopy (chart-affine contraction on the first
half, filled boundary extension on the second, frozen values on the
carrier).  A separate pass pushes the finitely many anchor values that
miss the step union onto nearby rational step points before re-running
the homotopy, yielding maps supported in one finite step together with
exact support certificates.
"""

import random
from dataclasses import dataclass, field
from itertools import combinations

from ascolim.errors import (AbsorptionError, ChartCoverError, InputError,
                            ResolutionExceededError)
from ascolim.filling import cone_decomposition
from ascolim.filtered_spaces import (AffineMap, CompactSample,
                                     WellFilledChart, identity_chart,
                                     quarter_core, shrink_chart)
from ascolim.geometry import (Outside, Simplex, affine_lipschitz_sq_bound,
                              combine, sqdist, sqdist_point_simplex)
from ascolim.plmaps import FuncMap, PLMap, as_evaluator
from ascolim.rats import RAT, to_rat
from ascolim.regions import (CoordinatePlaneComplement, FullSpace, HalfSpace,
                             Intersection, OpenBall, Region, Translate,
                             region_subset)
from ascolim.simplicial import SubdividedComplex


@dataclass
class EngineConfig:
    """Deterministic knobs; equal configs give identical engines."""

    max_subdivision: int = 6
    bisection_depth: int = 40
    bake_level: int = 1
    t_grid: int = 50
    probe_per_cell: int = 2
    max_chart_radius: object = 1
    rounding_denominator: int = 2 ** 40
    seed: int = 0


@dataclass(frozen=True)
class Constraint:
    """One ``image of subset inside region`` requirement.

    ``subset`` is ``"all"`` (the whole carrier), a ``Simplex``, a
    ``SubcomplexCarrier`` of the domain, or a ``CompactSample`` of domain
    points.
    """

    subset: object
    region: Region

    def meets_simplex(self, simplex):
        """Does the subset meet a subdivision cell?

        Exact for subdivision-derived cells: such a cell touches a base
        face precisely when one of its vertices lies in it.
        """
        if self.subset == "all":
            return True
        if isinstance(self.subset, CompactSample):
            return any(not isinstance(simplex.barycentric(p), Outside)
                       for p in self.subset.points)
        if isinstance(self.subset, Simplex):
            return any(self.subset.contains(v) for v in simplex.vertices)
        return any(self.subset.contains_point(v) for v in simplex.vertices)

    def domain_contains(self, x):
        if self.subset == "all":
            return True
        if isinstance(self.subset, CompactSample):
            return tuple(x) in {tuple(p) for p in self.subset.points}
        if isinstance(self.subset, Simplex):
            return self.subset.contains(x)
        return self.subset.contains_point(x)

    def domain_sqdist(self, x):
        """Exact squared distance from ``x`` to the subset (None: whole)."""
        if self.subset == "all":
            return None
        if isinstance(self.subset, CompactSample):
            return min(sqdist(x, p) for p in self.subset.points)
        if isinstance(self.subset, Simplex):
            return sqdist_point_simplex(x, self.subset)
        return min(sqdist_point_simplex(x, s)
                   for s in self.subset.tops())


class NeighborhoodSpec:
    """Finite intersection of compact-open constraints."""

    def __init__(self, constraints):
        self.constraints = list(constraints)

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self):
        return len(self.constraints)

    def check_map(self, complex_, evaluator, rng=None, samples=2):
        """Membership of a map, constraint by constraint.

        Cell images are checked exactly through hull containment where
        the region algebra decides; anything undecidable falls back to
        seeded barycentric sampling.  Returns ``(ok, details)``.
        """
        rng = rng or random.Random(0)
        fn = as_evaluator(evaluator)
        details = []
        ok = True
        for i, con in enumerate(self.constraints):
            verdict, mode = _check_constraint(complex_, fn, con, rng,
                                              samples)
            details.append({"constraint": i, "ok": verdict, "mode": mode})
            ok = ok and verdict
        return ok, details


def _map_values(fn, cell):
    return [tuple(fn(v)) for v in cell.vertices]


def _is_pl(fn):
    """Hull checks are sound only for maps affine on each checked cell;
    in this package that means PLMaps evaluated on (refinements of) their
    own domain."""
    return isinstance(fn, PLMap)


def _cell_inside(subset, cell):
    if subset == "all":
        return True
    if isinstance(subset, Simplex):
        return all(subset.contains(v) for v in cell.vertices)
    return subset.contains_simplex(cell)


def _check_constraint(complex_, fn, con, rng, samples):
    """Membership in one ``image of K inside W`` constraint.

    Only the image of K matters, so hull checks run over the cells of the
    complex contained in K; when K is finer than every cell (single
    vertices, unrefined carriers) the subset's own vertex set plus probes
    is checked pointwise.
    """
    if isinstance(con.subset, CompactSample):
        return all(con.region.contains(fn(p))
                   for p in con.subset.points), "exact"
    exact = True
    hull_ok = _is_pl(fn)
    covered = False
    for cell in complex_.tops():
        if not _cell_inside(con.subset, cell):
            continue
        covered = True
        values = _map_values(fn, cell)
        got = con.region.contains_hull(values) if hull_ok else None
        if got is False:
            return False, "exact"
        if got is None:
            exact = False
            if any(not con.region.contains(v) for v in values):
                return False, "sampled"
            for _ in range(samples):
                w = _random_weights(rng, cell.rank)
                x = combine(cell.vertices, w)
                if not con.region.contains(fn(x)):
                    return False, "sampled"
    if not covered:
        pieces = [con.subset] if isinstance(con.subset, Simplex) \
            else list(con.subset.tops())
        for piece in pieces:
            values = [tuple(fn(v)) for v in piece.vertices]
            got = con.region.contains_hull(values) if hull_ok else None
            if got is False:
                return False, "exact"
            if got is None:
                exact = False
                if any(not con.region.contains(v) for v in values):
                    return False, "sampled"
                for _ in range(samples):
                    w = _random_weights(rng, piece.rank)
                    if not con.region.contains(
                            fn(combine(piece.vertices, w))):
                        return False, "sampled"
    return True, "exact" if exact else "sampled"


def _random_weights(rng, k):
    w = [RAT(rng.randint(0, 8)) for _ in range(k)]
    if sum(w) == 0:
        w[0] = RAT(1)
    tot = sum(w)
    return [x / tot for x in w]


# -- chart provision ---------------------------------------------------------


@dataclass
class ChartAssignment:
    chart: WellFilledChart
    core4: Region

    def to_image(self, p):
        return self.chart.phi(tuple(p))

    def from_image(self, v):
        return self.chart.phi.inverse_apply(tuple(v))


class ChartProvider:
    """Charts with nested cores around points of the model.

    Prefers maximal convex cores: when the target neighbourhood splits
    into convex parts and coordinate-plane complements, the chart image is
    the convex intersection of those parts with one separating halfspace
    per removed plane, and both cores equal the image (the convex-image
    regime).  Otherwise falls back to ball cores found by bisection, with
    the quarter-core pass for the inner core.
    """

    def __init__(self, model, config):
        self.model = model
        self.config = config

    def chart_at(self, q, target):
        q = tuple(q)
        parts = _flatten_region(Intersection([target, self.model.carrier]))
        if parts is not None:
            convex, planes = parts
            pieces = list(convex)
            usable = True
            for pc in planes:
                hs = _separating_halfspace(pc, q)
                if hs is None:
                    usable = False
                    break
                pieces.append(hs)
            if usable:
                image = Intersection(pieces) if pieces \
                    else FullSpace(self.model.ambient_dim)
                if image.contains(q):
                    chart = WellFilledChart(
                        filtration=self.model.filtration,
                        domain=image,
                        phi=AffineMap.identity(self.model.ambient_dim),
                        image=image,
                        core=image,
                        alpha0=self.model.filtration.labels[0],
                        label="convex-core",
                    )
                    return ChartAssignment(chart=chart, core4=image)
        return self._ball_chart(q, target)

    def _ball_chart(self, q, target):
        cfg = self.config
        rho = to_rat(cfg.max_chart_radius)
        base_core = None
        for _ in range(cfg.bisection_depth):
            ball = OpenBall(q, rho)
            if region_subset(ball, self.model.carrier) is True:
                base_core = ball
                break
            rho = rho / 2
        if base_core is None:
            raise ChartCoverError(
                f"no ball around {q!r} certifies inside the carrier")
        base = identity_chart(self.model, base_core)
        shrunk = shrink_chart(base, q, target,
                              max_radius=to_rat(cfg.max_chart_radius),
                              depth=cfg.bisection_depth)
        core4 = quarter_core(shrunk, q,
                             max_radius=to_rat(cfg.max_chart_radius),
                             depth=cfg.bisection_depth)
        return ChartAssignment(chart=shrunk, core4=core4)


def _flatten_region(region):
    """Split into (convex parts, plane complements); None if impossible."""
    convex = []
    planes = []
    stack = [region]
    while stack:
        node = stack.pop()
        if isinstance(node, Intersection):
            stack.extend(node.parts)
        elif isinstance(node, CoordinatePlaneComplement):
            planes.append(node)
        elif isinstance(node, Translate):
            pushed = node.region.translate(node.shift)
            if isinstance(pushed, Translate):
                return None
            stack.append(pushed)
        elif isinstance(node, FullSpace):
            continue
        elif node.is_convex:
            convex.append(node)
        else:
            return None
    return convex, planes


def _separating_halfspace(plane_complement, q):
    """Halfspace containing ``q`` and avoiding the removed plane."""
    i, j = plane_complement.i, plane_complement.j
    qi, qj = q[i], q[j]
    norm_sq = qi * qi + qj * qj
    if norm_sq == 0:
        return None
    normal = [RAT(0)] * plane_complement.dim
    normal[i], normal[j] = qi, qj
    return HalfSpace(tuple(normal), norm_sq / 2)


# -- the engine ---------------------------------------------------------------


class ThetaEngine:
    """One level of the rank induction over a subdivided complex."""

    def __init__(self, tree, rank, spec, charts, anchors, frozen_keys,
                 sub_engine, anchor_points, p_spec, model, config):
        self.tree = tree
        self.rank = rank
        self.spec = spec              # normalized input spec at this level
        self.charts = charts          # final top key -> ChartAssignment
        self.anchors = anchors        # final top key -> anchor vertex
        self.frozen_keys = frozen_keys
        self.sub = sub_engine
        self.S = anchor_points
        self.P = p_spec
        self.model = model
        self.config = config

    @property
    def complex(self):
        return self.tree.final

    def locate(self, x, hint=None):
        top = self.tree.locate_final(x, base_hint=hint)
        if top is None:
            raise InputError(f"point {x!r} outside the engine domain")
        return top

    def theta(self, session, x, t, hint=None):
        """Evaluate the homotopy at ``(x, t)`` for the bound map."""
        gamma = session.gamma
        if self.rank == 1:
            return tuple(gamma(x))
        top = self.locate(x, hint)
        if top.rank < self.rank:
            return self._skeleton_value(session, x, t, top)
        coords = top.barycentric(x)
        if any(c == 0 for c in coords):
            # on the skeleton: both branch definitions agree there
            face_idx = [i for i, c in enumerate(coords) if c > 0]
            face = Simplex.trusted([top.vertices[i] for i in face_idx])
            return self._skeleton_value(session, x, t, face)
        if top.key in self.frozen_keys:
            return tuple(gamma(x))
        assign = self.charts[top.key]
        if 2 * t <= 1:
            gx = assign.to_image(gamma(x))
            fill_val = self._fill_gamma(session, assign, top, x)
            s = 2 * t
            mixed = tuple((1 - s) * a + s * b for a, b in zip(gx, fill_val))
            return tuple(assign.from_image(mixed))
        s = 2 * t - 1
        val = self._fill_theta(session, assign, top, x, s)
        return tuple(assign.from_image(val))

    def _skeleton_value(self, session, x, t, face_hint):
        if 2 * t <= 1:
            return tuple(session.gamma(x))
        return self.sub.theta(session, x, 2 * t - 1, hint=face_hint)

    def _anchor_value_gamma(self, session, assign, top):
        key = ("anchor-gamma", top.key)
        if key not in session.cache:
            session.cache[key] = assign.to_image(
                session.gamma(self.anchors[top.key]))
        return session.cache[key]

    def _anchor_value_theta(self, session, assign, top, s):
        key = ("anchor-theta", top.key, s)
        if key not in session.cache:
            anchor = self.anchors[top.key]
            session.cache[key] = assign.to_image(
                self.sub.theta(session, anchor, s))
        return session.cache[key]

    def _fill_gamma(self, session, assign, top, x):
        """Filled boundary extension of ``phi . gamma`` evaluated at x."""
        cd = cone_decomposition(top, x)
        anchor_val = self._anchor_value_gamma(session, assign, top)
        if cd.t == 1:
            return anchor_val
        y = cd.boundary_point(top)
        gy = assign.to_image(session.gamma(y))
        return tuple(cd.t * a + (1 - cd.t) * b
                     for a, b in zip(anchor_val, gy))

    def _fill_theta(self, session, assign, top, x, s):
        """Filled extension of ``phi . Theta*(gamma, ., s)`` at x."""
        cd = cone_decomposition(top, x)
        anchor_val = self._anchor_value_theta(session, assign, top, s)
        if cd.t == 1:
            return anchor_val
        y = cd.boundary_point(top)
        face = Simplex.trusted([top.vertices[i] for i in cd.indices])
        ty = assign.to_image(self.sub.theta(session, y, s, hint=face))
        return tuple(cd.t * a + (1 - cd.t) * b
                     for a, b in zip(anchor_val, ty))


class BoundTheta:
    """The engine bound to one input map, with a per-map value cache."""

    def __init__(self, engine, gamma):
        self.engine = engine
        self.gamma = as_evaluator(gamma)
        self.cache = {}

    def __call__(self, x, t, hint=None):
        return self.engine.theta(self, tuple(x), to_rat(t), hint=hint)

    def final_map(self):
        return FuncMap(lambda x: self(x, 1), exact=True)

    def slice_at(self, t):
        return FuncMap(lambda x, _t=to_rat(t): self(x, _t), exact=True)


def bake_on(complex_, fn):
    """PLMap through the vertex values of a fixed complex."""
    fn = as_evaluator(fn)
    values = {tuple(v): tuple(fn(v)) for v in complex_.vertices()}
    return PLMap(complex_, values)


# -- engine construction ------------------------------------------------------


def _cell_regions_for(tree, spec, ambient_dim):
    base = tree.base
    fast = [isinstance(con.subset, Simplex) and con.subset in base
            for con in spec]
    out = {}
    for cell in tree.final.tops():
        regs = []
        for con, use_fast in zip(spec, fast):
            if use_fast:
                # origin sets turn the touch test into set arithmetic
                if any(tree.vertex_in_base_simplex(v, con.subset)
                       for v in cell.vertices):
                    regs.append(con.region)
            elif con.meets_simplex(cell):
                regs.append(con.region)
        if not regs:
            out[cell.key] = FullSpace(ambient_dim)
        else:
            out[cell.key] = regs[0] if len(regs) == 1 \
                else Intersection(regs)
    return out


def _constraints_hold(tree, gamma0, cell_regions, rng, probes):
    hull_ok = _is_pl(gamma0)
    for cell in tree.final.tops():
        region = cell_regions[cell.key]
        if isinstance(region, FullSpace):
            continue
        values = _map_values(gamma0, cell)
        got = region.contains_hull(values) if hull_ok else None
        if got is False:
            return False
        if got is None:
            if any(not region.contains(v) for v in values):
                return False
            for _ in range(probes):
                w = _random_weights(rng, cell.rank)
                if not region.contains(gamma0(combine(cell.vertices, w))):
                    return False
    return True


def _charts_fit(tree, gamma0, cell_regions, provider, config):
    """Charts per maximal cell whose inner core holds the cell image.

    Candidate anchors per cell: the image barycenter, then the vertex
    images; ties break by least squared distance between the inner-core
    center and the barycenter image.  Returns ``None`` when some cell has
    no admissible chart at this refinement level.
    """
    hull_ok = _is_pl(gamma0)
    charts = {}
    for cell in tree.final.tops():
        region = cell_regions[cell.key]
        values = _map_values(gamma0, cell)
        bary_img = combine(values, [RAT(1, len(values))] * len(values))
        best = None
        for q in [bary_img] + values:
            try:
                assign = provider.chart_at(q, region)
            except (ChartCoverError, ResolutionExceededError, InputError):
                continue
            fit = assign.core4.contains_hull(values) if hull_ok \
                else all(assign.core4.contains(v) for v in values)
            if fit is True:
                center = getattr(assign.core4, "center", None)
                if center is None:
                    center = getattr(
                        getattr(assign.core4, "parts", [None])[0],
                        "center", q)
                dist = sqdist(center, bary_img)
                if best is None or dist < best[0]:
                    best = (dist, assign)
        if best is None:
            return None
        charts[cell.key] = best[1]
    return charts


def build_engine(tree, gamma0, spec, frozen_pred, model, config, rng=None):
    """Recursive engine construction.

    ``frozen_pred(tree, cell)`` decides membership of a cell in the frozen
    carrier through its root in the original complex.  The refinement
    level is the least one passing both the constraint-normalization and
    the chart-fit pass, mirroring the Lebesgue-number step at the
    certified level.
    """
    rng = rng or random.Random(config.seed)
    rank = tree.final.rank
    if rank == 1:
        return ThetaEngine(
            tree=tree, rank=1, spec=spec, charts={}, anchors={},
            frozen_keys=frozenset(), sub_engine=None,
            anchor_points=sorted(tree.final.vertices()),
            p_spec=spec, model=model, config=config)

    provider = ChartProvider(model, config)
    charts = None
    for _ in range(config.max_subdivision + 1):
        cell_regions = _cell_regions_for(tree, spec, model.ambient_dim)
        if _constraints_hold(tree, gamma0, cell_regions, rng,
                             config.probe_per_cell):
            charts = _charts_fit(tree, gamma0, cell_regions, provider,
                                 config)
            if charts is not None:
                break
        tree.refine()
    if charts is None:
        raise ChartCoverError(
            "no refinement level admits a certified chart cover "
            f"within {config.max_subdivision} subdivisions")

    final = tree.final
    tops = final.tops()
    frozen_keys = frozenset(cell.key for cell in tops
                            if cell.rank == rank
                            and frozen_pred(tree, cell))

    # per skeleton simplex, intersect the inner cores of containing tops
    skeleton = final.skeleton(rank - 1)
    core_by_face = {}
    for T in tops:
        if T.key not in charts:
            continue
        core = charts[T.key].core4
        for k in range(1, T.rank + 1):
            for idx in combinations(T.vertices, k):
                core_by_face.setdefault(frozenset(idx), []).append(core)
    z_constraints = []
    for sx in sorted(skeleton.simplices, key=lambda s: sorted(s.vertices)):
        cores = core_by_face.get(sx.key)
        if not cores:
            continue
        region = cores[0] if len(cores) == 1 else Intersection(cores)
        z_constraints.append(Constraint(subset=sx, region=region))
    sub_spec = NeighborhoodSpec(z_constraints)
    sub_tree = SubdividedComplex(skeleton)

    def sub_frozen(sub_tree_, cell):
        mid = sub_tree_.root(cell)      # a simplex of the skeleton
        return frozen_pred(tree, mid)   # roots chain to the original

    sub_engine = build_engine(sub_tree, gamma0, sub_spec, sub_frozen,
                              model, config, rng)

    anchors = {T.key: min(T.vertices) for T in tops if T.rank == rank}

    p_constraints = list(sub_engine.P) + [
        Constraint(subset=T, region=charts[T.key].core4)
        for T in tops if T.key in charts]
    p_spec = NeighborhoodSpec(p_constraints)

    return ThetaEngine(
        tree=tree, rank=rank, spec=spec, charts=charts, anchors=anchors,
        frozen_keys=frozen_keys, sub_engine=sub_engine,
        anchor_points=list(sub_engine.S), p_spec=p_spec,
        model=model, config=config)


def simultaneous_approximation(complex_, gamma0, spec, relative, model,
                               config=None):
    """The full engine: returns ``(S, P, engine)``.

    ``relative`` is a carrier of the input complex (or ``None``); its
    cells are frozen pointwise for all times.  Bind the engine to a map
    with ``BoundTheta`` to evaluate the homotopy.
    """
    config = config or EngineConfig()
    gamma0 = as_evaluator(gamma0)
    tree = SubdividedComplex(complex_)
    rng = random.Random(config.seed)

    ok, details = spec.check_map(tree.final, gamma0, rng=rng)
    if not ok:
        raise InputError(
            f"base map violates the neighbourhood spec: {details}")

    def frozen_pred(tree_, cell):
        if relative is None or relative.is_empty():
            return False
        root = tree_.root(cell)
        return relative.contains_simplex(root)

    engine = build_engine(tree, gamma0, spec, frozen_pred, model, config,
                          rng)
    return engine.S, engine.P, engine


# -- individual approximations ------------------------------------------------


@dataclass
class HomotopyRecord:
    """Outcome of an individual approximation run."""

    homotopy: object            # callable (x, t)
    eta: object                 # endpoint evaluator
    eta_baked: object           # PLMap surrogate of the endpoint
    beta: object                # absorbing step index
    relative: object
    spec: object
    grid_reports: list = field(default_factory=list)
    pushed_points: list = field(default_factory=list)
    engine: object = None

    @property
    def grid_ok(self):
        return all(r["ok"] for r in self.grid_reports)


def _relative_sqdist(relative, x):
    """Squared distance from ``x`` to the frozen carrier (None if empty)."""
    if relative is None or relative.is_empty():
        return None
    return min(sqdist_point_simplex(x, s) for s in relative.tops())


def _push_targets(engine, gamma0, model, config):
    """Chart, rounded step-union target, per anchor value off the union."""
    filt = model.filtration
    provider = ChartProvider(model, config)
    moved = []
    for x in (tuple(p) for p in engine.S):
        gx = tuple(gamma0(x))
        if model.in_m_infinity(gx):
            continue
        regions = [con.region for con in engine.P
                   if con.domain_contains(x)]
        target = Intersection(regions) if regions \
            else FullSpace(model.ambient_dim)
        assign = provider.chart_at(gx, target)
        vq = assign.to_image(gx)
        den = config.rounding_denominator
        projected = filt.project(vq, filt.top)
        v_x = tuple(RAT(round(c * den), den) for c in projected)
        ok = assign.core4.contains(v_x) \
            and model.carrier.contains(assign.from_image(v_x)) \
            and filt.subspace_contains(filt.top, v_x)
        if not ok:
            raise ResolutionExceededError(
                f"no admissible step-union target near {gx!r}")
        moved.append((x, gx, assign, v_x))
    return moved


def _epsilon_for(moved, engine, gamma0, relative, config):
    """Dyadic push radius satisfying every exact disjointness and image
    condition; raises when the bisection depth is exhausted."""
    s_points = [tuple(p) for p in engine.S]
    eps = RAT(1)
    for _ in range(config.bisection_depth):
        if _epsilon_ok(eps, moved, s_points, engine, gamma0, relative):
            return eps
        eps = eps / 2
    raise ResolutionExceededError("no admissible push radius")


def _epsilon_ok(eps, moved, s_points, engine, gamma0, relative):
    eps_sq = eps * eps
    for (x, gx, assign, v_x) in moved:
        for y in s_points:
            if tuple(y) == x:
                continue
            if sqdist(x, y) <= 4 * eps_sq:
                return False
        rel_d = _relative_sqdist(relative, x)
        if rel_d is not None and rel_d <= eps_sq:
            return False
        for con in engine.P:
            if con.domain_contains(x):
                continue
            d = con.domain_sqdist(x)
            if d is not None and d <= eps_sq:
                return False
        # image control through the exact PL Lipschitz bound
        for cell in engine.tree.base.tops():
            if isinstance(cell.barycentric(x), Outside):
                continue
            values = [tuple(gamma0(v)) for v in cell.vertices]
            l_sq = affine_lipschitz_sq_bound(cell, values)
            if not _ball_in_region_sq(gx, eps_sq * l_sq, assign.core4):
                return False
    return True


def _ball_in_region_sq(center, radius_sq, region):
    """Exact ``closed ball(center, sqrt(radius_sq)) ⊆ region`` for the
    region kinds cores are built from (conservative where it rounds)."""
    if isinstance(region, Intersection):
        return all(_ball_in_region_sq(center, radius_sq, p)
                   for p in region.parts)
    if isinstance(region, FullSpace):
        return True
    if radius_sq == 0:
        return region.contains(center)
    if isinstance(region, OpenBall):
        margin_sq = sqdist(center, region.center)
        rad = region.radius
        if margin_sq >= rad * rad:
            return False
        u = _sqrt_upper(margin_sq)
        if u > rad:
            return False
        lower = rad * rad + margin_sq - 2 * rad * u  # <= (rad - |c-c0|)^2
        return radius_sq < lower
    if isinstance(region, HalfSpace):
        margin = sum(n * c for n, c in zip(region.normal, center)) \
            - region.offset
        if margin <= 0:
            return False
        nn = sum(n * n for n in region.normal)
        return radius_sq * nn < margin * margin
    if isinstance(region, CoordinatePlaneComplement):
        ci, cj = center[region.i], center[region.j]
        return radius_sq < ci * ci + cj * cj
    return False


def _sqrt_upper(value):
    """A rational upper bound on sqrt(value)."""
    if value == 0:
        return RAT(0)
    hi = RAT(1)
    while hi * hi < value:
        hi = hi * 2
    lo = RAT(0)
    for _ in range(40):
        mid = (lo + hi) / 2
        if mid * mid < value:
            lo = mid
        else:
            hi = mid
    return hi


def _make_push_map(gamma0, centers, eps):
    eps_sq = eps * eps

    def g_map(z, t):
        z = tuple(z)
        for (x, gx, assign, v_x) in centers:
            d_sq = sqdist(z, x)
            if d_sq <= eps_sq:
                q = d_sq / eps_sq
                phi_gz = assign.to_image(gamma0(z))
                bumped = tuple((1 - q) * v + q * g
                               for v, g in zip(v_x, phi_gz))
                mixed = tuple(t * b + (1 - t) * g
                              for b, g in zip(bumped, phi_gz))
                return tuple(assign.from_image(mixed))
        return tuple(gamma0(z))

    return g_map


def individual_approximation(complex_, gamma0, spec, relative, model,
                             alpha, config=None):
    """Homotope the map into one finite step, relative to the carrier.

    Runs the simultaneous engine, pushes the finitely many anchor values
    missing the step union onto nearby rational step points (radially in
    the squared distance, so every slice stays exact on rational inputs),
    composes the homotopies, and certifies the result: exact support index
    via the baked endpoint, spec membership along the declared time grid.
    """
    config = config or EngineConfig()
    gamma0 = as_evaluator(gamma0)
    filt = model.filtration

    if relative is not None and not relative.is_empty():
        for s in relative.tops():
            for v in s.vertices:
                value = tuple(gamma0(v))
                if not filt.subspace_contains(alpha, value) \
                        or not model.carrier.contains(value):
                    raise InputError(
                        "frozen carrier image leaves the base step")

    _, _, engine = simultaneous_approximation(complex_, gamma0, spec,
                                              relative, model, config)
    moved = _push_targets(engine, gamma0, model, config)

    if not moved:
        session = BoundTheta(engine, gamma0)
        homotopy = session.__call__
        bound_final = session
    else:
        eps = _epsilon_for(moved, engine, gamma0, relative, config)
        g_map = _make_push_map(gamma0, moved, eps)
        sessions = {}

        def homotopy(x, t, hint=None):
            t = RAT(t)
            if t not in sessions:
                sessions[t] = BoundTheta(
                    engine, lambda z, _t=t: g_map(z, _t))
            return sessions[t](x, t, hint=hint)

        bound_final = BoundTheta(engine, lambda z: g_map(z, 1))

    eta = bound_final.final_map()
    grid_tree = SubdividedComplex(engine.tree.final)
    if config.bake_level:
        grid_tree.refine(config.bake_level)
    eta_baked = bake_on(grid_tree.final, eta)

    beta = alpha
    for value in eta_baked.values.values():
        least = filt.least_index_supporting(value, at_least=alpha)
        if least is None:
            raise AbsorptionError("endpoint escapes every step",
                                  witness=value)
        if filt.position(least) > filt.position(beta):
            beta = least

    grid_reports = []
    n = config.t_grid
    for k in range(n + 1):
        t = RAT(k, n)
        baked_slice = bake_on(grid_tree.final,
                              lambda x, _t=t: homotopy(x, _t))
        ok, details = spec.check_map(grid_tree.final, baked_slice,
                                     rng=random.Random(config.seed))
        grid_reports.append({"t": str(t), "ok": ok, "details": details})

    return HomotopyRecord(
        homotopy=homotopy,
        eta=eta,
        eta_baked=eta_baked,
        beta=beta,
        relative=relative,
        spec=spec,
        grid_reports=grid_reports,
        pushed_points=[(x, v_x) for (x, _, _, v_x) in moved],
        engine=engine,
    )


# -- property verification ----------------------------------------------------


@dataclass
class SamplingPlan:
    points_per_cell: int = 2
    t_points: int = 10
    seed: int = 0


def verify_theta_properties(engine, gamma, plan=None, constant_cells=None):
    """Checkable forms of the engine guarantees, as a per-item report.

    Exact identities (start slice, frozen anchors and carrier, constant
    cells) are asserted on exact data at sampled points; membership along
    the time grid and the support certificates go through baked PL
    surrogates; the finite-dependency claim is a twin-input experiment.
    """
    plan = plan or SamplingPlan()
    rng = random.Random(plan.seed)
    gamma = as_evaluator(gamma)
    session = BoundTheta(engine, gamma)
    report = {}

    cells = engine.tree.final.tops()
    samples = []
    for cell in cells:
        for _ in range(plan.points_per_cell):
            samples.append((cell, combine(cell.vertices,
                                          _random_weights(rng, cell.rank))))
    t_grid = [RAT(k, plan.t_points) for k in range(plan.t_points + 1)]

    report["a"] = all(session(x, 0, hint=cell) == tuple(gamma(x))
                      for cell, x in samples)

    eta_vals = {}
    for cell, x in samples:
        eta_vals[x] = session(x, 1, hint=cell)
    report["e"] = report["a"] and all(
        eta_vals[x] == session(x, 1, hint=cell) for cell, x in samples)

    anchor_ok = True
    for x in engine.S:
        gx = tuple(gamma(x))
        if any(session(x, t) != gx for t in t_grid):
            anchor_ok = False
            break
    report["h"] = anchor_ok

    frozen_ok = True
    for key in engine.frozen_keys:
        cell = next(c for c in cells if c.key == key)
        for _ in range(plan.points_per_cell):
            x = combine(cell.vertices, _random_weights(rng, cell.rank))
            gx = tuple(gamma(x))
            if any(session(x, t, hint=cell) != gx for t in t_grid):
                frozen_ok = False
    report["relative"] = frozen_ok

    if constant_cells:
        const_ok = True
        for cell in constant_cells:
            y = tuple(gamma(cell.vertices[0]))
            for _ in range(plan.points_per_cell):
                x = combine(cell.vertices, _random_weights(rng, cell.rank))
                if any(session(x, t, hint=cell) != y for t in t_grid):
                    const_ok = False
        report["g"] = const_ok

    grid_tree = SubdividedComplex(engine.tree.final)
    if engine.config.bake_level:
        grid_tree.refine(engine.config.bake_level)
    grid_ok = True
    grid_details = []
    for t in t_grid:
        baked_slice = bake_on(grid_tree.final,
                              lambda x, _t=t: session(x, _t))
        ok, _ = engine.spec.check_map(grid_tree.final, baked_slice,
                                      rng=random.Random(plan.seed))
        grid_ok = grid_ok and ok
        grid_details.append({"t": str(t), "ok": ok})
    report["b"] = grid_ok
    report["b_details"] = grid_details

    twin = _twin_input(engine, gamma)
    if twin is not None:
        twin_session = BoundTheta(engine, twin)
        report["c"] = all(
            session(x, 1, hint=cell) == twin_session(x, 1, hint=cell)
            for cell, x in samples)
    else:
        report["c"] = None

    filt = engine.model.filtration
    beta = None
    escaped = None
    eta_baked = bake_on(grid_tree.final, session.final_map())
    for value in eta_baked.values.values():
        least = filt.least_index_supporting(value)
        if least is None:
            escaped = value
            break
        if beta is None or filt.position(least) > filt.position(beta):
            beta = least
    report["d"] = {"beta": beta, "escaped": escaped}
    report["f"] = report["d"]
    return report


def _twin_input(engine, gamma):
    """A map agreeing with ``gamma`` on S and the frozen carrier but
    perturbed inside one open top cell; None when no room exists."""
    if engine.rank == 1:
        return None
    s_set = {tuple(p) for p in engine.S}
    target_cell = next(
        (c for c in engine.tree.final.tops()
         if c.rank == engine.rank and c.key not in engine.frozen_keys),
        None)
    if target_cell is None:
        return None

    def perturbed(z, hint=None):
        z = tuple(z)
        base = tuple(gamma(z))
        if z in s_set:
            return base
        coords = target_cell.barycentric(z)
        if isinstance(coords, Outside) or any(c == 0 for c in coords):
            return base
        weight = RAT(1, 100)
        for c in coords:
            weight = weight * c
        return tuple(b + (weight if i == 0 else 0)
                     for i, b in enumerate(base))

    return perturbed
