"""The simultaneous/individual approximation engine on small models."""

import random
from fractions import Fraction

import pytest

from ascolim.approximation import (BoundTheta, Constraint, EngineConfig,
                                   NeighborhoodSpec, SamplingPlan,
                                   individual_approximation,
                                   simultaneous_approximation,
                                   verify_theta_properties)
from ascolim.errors import InputError
from ascolim.filtered_spaces import FilteredSpaceModel, Filtration
from ascolim.geometry import Simplex, combine
from ascolim.plmaps import PLMap
from ascolim.regions import CoordinatePlaneComplement, FullSpace, OpenBall
from ascolim.simplicial import SimplicialComplex, SubcomplexCarrier

F = Fraction

CONFIG = EngineConfig(max_subdivision=4, bake_level=1, t_grid=6,
                      probe_per_cell=1)


def square_domain():
    """Boundary of a square: four edges, rank 2."""
    corners = [(1, 1), (-1, 1), (-1, -1), (1, -1)]
    edges = [Simplex([corners[i], corners[(i + 1) % 4]]) for i in range(4)]
    return SimplicialComplex(edges), corners


def plane_model(dim=4, top_coords=(0, 1), labels=None):
    """R^dim minus the (0,1) coordinate plane, chain over given labels."""
    if labels is None:
        labels = [(1, set(top_coords))]
    filt = Filtration(dim, labels)
    carrier = CoordinatePlaneComplement(dim, 0, 1)
    return FilteredSpaceModel(filt, carrier)


def loop_map(cx, corners, pert=None, dim=4):
    """PL loop into R^dim: planar square, optionally perturbed at one
    corner in the trailing coordinates."""
    values = {}
    for v in cx.vertices():
        val = [F(v[0]), F(v[1])] + [F(0)] * (dim - 2)
        if pert is not None and tuple(v) == pert[0]:
            for d, amount in pert[1].items():
                val[d] = amount
        values[tuple(v)] = tuple(val)
    return PLMap(cx, values)


def test_rank_one_base_case_is_evaluation():
    pts = SimplicialComplex([Simplex([(0, 0)]), Simplex([(3, 1)])])
    model = plane_model(dim=2)
    gamma = PLMap(pts, {(0, 0): (F(1), F(0)), (3, 1): (F(0), F(2))})
    spec = NeighborhoodSpec([Constraint("all", model.carrier)])
    s_points, p_spec, engine = simultaneous_approximation(
        pts, gamma, spec, None, model, CONFIG)
    assert sorted(s_points) == sorted(pts.vertices())
    assert p_spec is spec
    session = BoundTheta(engine, gamma)
    for v in pts.vertices():
        for t in (0, F(1, 3), 1):
            assert session(v, t) == tuple(gamma(v))


def test_constant_map_stays_constant_through_all_branches():
    tri = SimplicialComplex([Simplex([(0, 0), (2, 0), (0, 2)])])
    model = FilteredSpaceModel(Filtration(3, [(1, {0, 1, 2})]),
                               FullSpace(3))
    y = (F(1), F(2), F(3))
    gamma = PLMap(tri, {tuple(v): y for v in tri.vertices()})
    spec = NeighborhoodSpec([Constraint("all", model.carrier)])
    _, _, engine = simultaneous_approximation(tri, gamma, spec, None,
                                              model, CONFIG)
    session = BoundTheta(engine, gamma)
    rng = random.Random(1)
    for cell in engine.tree.final.tops():
        for _ in range(3):
            w = [F(rng.randint(0, 5)) for _ in range(cell.rank)]
            if sum(w) == 0:
                w[0] = F(1)
            x = combine(cell.vertices, [wi / sum(w) for wi in w])
            for t in (0, F(1, 4), F(1, 2), F(3, 4), 1):
                assert session(x, t, hint=cell) == y


def test_square_loop_engine_properties():
    cx, corners = square_domain()
    model = plane_model()
    gamma = loop_map(cx, corners)
    spec = NeighborhoodSpec([Constraint("all", model.carrier)])
    base = SubcomplexCarrier(cx, [Simplex([corners[0]])])
    _, p_spec, engine = simultaneous_approximation(cx, gamma, spec, base,
                                                   model, CONFIG)
    ok, details = p_spec.check_map(engine.tree.final, gamma)
    assert ok, details
    report = verify_theta_properties(engine, gamma,
                                     SamplingPlan(points_per_cell=2,
                                                  t_points=4))
    assert report["a"] is True
    assert report["h"] is True
    assert report["e"] is True
    assert report["b"] is True, report["b_details"]
    assert report["c"] is True
    assert report["relative"] is True
    assert report["d"]["beta"] == 1
    assert report["d"]["escaped"] is None


def test_individual_approximation_freezes_and_projects():
    cx, corners = square_domain()
    model = plane_model()
    pert = ((1, 1), {2: F(1, 5), 3: F(-1, 7)})
    gamma = loop_map(cx, corners, pert=pert)
    spec = NeighborhoodSpec([Constraint("all", model.carrier)])
    basepoint = Simplex([corners[2]])
    relative = SubcomplexCarrier(cx, [basepoint])
    record = individual_approximation(cx, gamma, spec, relative, model,
                                      alpha=1, config=CONFIG)
    # one anchor value sat off the step union and was pushed
    assert len(record.pushed_points) >= 1
    assert record.beta == 1
    # endpoint is supported in the top step exactly
    filt = model.filtration
    for value in record.eta_baked.values.values():
        assert filt.subspace_contains(filt.top, value)
    # frozen basepoint: every homotopy time keeps the value
    bp = corners[2]
    want = tuple(gamma(bp))
    for t in (0, F(1, 3), F(2, 3), 1):
        assert record.homotopy(bp, t) == want
    # start slice is the input map
    rng = random.Random(3)
    for cell in record.engine.tree.final.tops():
        w = [F(rng.randint(0, 5)) for _ in range(cell.rank)]
        if sum(w) == 0:
            w[0] = F(1)
        x = combine(cell.vertices, [wi / sum(w) for wi in w])
        assert record.homotopy(x, 0) == tuple(gamma(x))
    assert record.grid_ok


def test_individual_approximation_fully_frozen_complex():
    # relative carrier = the whole complex: everything stays put
    cx, corners = square_domain()
    model = plane_model()
    gamma = loop_map(cx, corners)
    spec = NeighborhoodSpec([Constraint("all", model.carrier)])
    whole = SubcomplexCarrier(cx, cx.tops())
    record = individual_approximation(cx, gamma, spec, whole, model,
                                      alpha=1, config=CONFIG)
    assert record.beta == 1
    assert record.pushed_points == []
    rng = random.Random(6)
    for cell in record.engine.tree.final.tops():
        w = [F(rng.randint(0, 5)) for _ in range(cell.rank)]
        if sum(w) == 0:
            w[0] = F(1)
        x = combine(cell.vertices, [wi / sum(w) for wi in w])
        want = tuple(gamma(x))
        for t in (0, F(1, 2), 1):
            assert record.homotopy(x, t) == want


def test_individual_approximation_noop_when_already_in_step():
    cx, corners = square_domain()
    model = plane_model()
    gamma = loop_map(cx, corners)
    spec = NeighborhoodSpec([Constraint("all", model.carrier)])
    record = individual_approximation(cx, gamma, spec, None, model,
                                      alpha=1, config=CONFIG)
    assert record.pushed_points == []
    assert record.beta == 1
    assert record.grid_ok


def test_sphere_complex_runs_with_support_certificates():
    # degree >= 2 has no complete desk invariant; the engine still runs
    # on a sphere boundary complex and reports exact support certificates
    tet = Simplex([(0, 0, 0), (2, 0, 0), (0, 2, 0), (0, 0, 2)])
    sphere = SimplicialComplex(tet.facets())
    assert sphere.rank == 3
    filt = Filtration(4, [(1, {0, 1}), (2, {0, 1, 2, 3})])
    model = FilteredSpaceModel(filt, CoordinatePlaneComplement(4, 0, 1))
    values = {tuple(v): (F(v[0]) + 1, F(v[1]) + 1, F(v[2]), F(0))
              for v in sphere.vertices()}
    gamma = PLMap(sphere, values)
    spec = NeighborhoodSpec([Constraint("all", model.carrier)])
    _, _, engine = simultaneous_approximation(sphere, gamma, spec, None,
                                              model, CONFIG)
    report = verify_theta_properties(engine, gamma,
                                     SamplingPlan(points_per_cell=1,
                                                  t_points=2))
    assert report["a"] and report["h"]
    assert report["d"]["beta"] == 2 and report["d"]["escaped"] is None


def test_engine_rejects_map_violating_spec():
    cx, corners = square_domain()
    model = plane_model()
    # collapse everything onto the removed plane
    bad = PLMap(cx, {tuple(v): (F(0), F(0), F(1), F(0))
                     for v in cx.vertices()})
    spec = NeighborhoodSpec([Constraint("all", model.carrier)])
    with pytest.raises(InputError):
        simultaneous_approximation(cx, bad, spec, None, model, CONFIG)


def test_ball_chart_fallback_engine():
    # a model whose carrier mixes a ball with the plane complement, so
    # the convex fast path cannot flatten it and the bisection path runs
    cx, corners = square_domain()
    from ascolim.regions import Intersection, Union
    dim = 4
    filt = Filtration(dim, [(1, {0, 1})])
    blob = Union([OpenBall((F(0),) * dim, 8), OpenBall((F(9),) * dim, 1)])
    carrier = Intersection([CoordinatePlaneComplement(dim, 0, 1), blob])
    model = FilteredSpaceModel(filt, carrier)
    gamma = loop_map(cx, corners)
    spec = NeighborhoodSpec([Constraint("all", carrier)])
    config = EngineConfig(max_subdivision=6, bake_level=1, t_grid=4,
                          probe_per_cell=1)
    _, _, engine = simultaneous_approximation(cx, gamma, spec, None,
                                              model, config)
    assert engine.tree.depth >= 1  # the bisected ball cores force refinement
    report = verify_theta_properties(engine, gamma,
                                     SamplingPlan(points_per_cell=1,
                                                  t_points=3))
    assert report["a"] and report["h"]
    assert report["d"]["beta"] == 1
