"""Complexes, subdivision, prisms and carriers."""

import random
from fractions import Fraction

import pytest

from ascolim.errors import InputError
from ascolim.geometry import Simplex, diameter_sq, sqdist, vsub
from ascolim.simplicial import (SimplicialComplex, SubcomplexCarrier,
                                SubdividedComplex, barycentric_subdivide,
                                bsd_with_parents, max_diameter_sq,
                                prism_end_carrier, prism_over_carrier,
                                relative_volumes, subdivide_until,
                                triangulate_prism)

F = Fraction

UNIT_TRIANGLE = Simplex([(0, 0), (1, 0), (0, 1)])


def _det(rows):
    # independent tiny determinant for volume oracles
    if len(rows) == 1:
        return rows[0][0]
    total = 0
    for j in range(len(rows)):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * _det(minor)
    return total


def test_interval_bsd_is_midpoint_split():
    cx = SimplicialComplex([Simplex([(0,), (1,)])])
    sub = barycentric_subdivide(cx)
    tops = {frozenset(s.vertices) for s in sub.tops()}
    assert tops == {frozenset({(0,), (F(1, 2),)}),
                    frozenset({(F(1, 2),), (1,)})}
    assert sub.validate()


def test_triangle_bsd_six_triangles_and_exact_max_diameter():
    cx = SimplicialComplex([UNIT_TRIANGLE])
    sub = barycentric_subdivide(cx)
    tris = [s for s in sub.tops() if s.rank == 3]
    assert len(tris) == 6
    # independent oracle: enumerate the six vertex-midpoint-barycenter
    # chain triangles by hand and take the max pairwise squared distance
    verts = [(F(0), F(0)), (F(1), F(0)), (F(0), F(1))]
    bary = (F(1, 3), F(1, 3))
    expected = F(0)
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            mid = tuple((a + b) / 2 for a, b in zip(verts[i], verts[j]))
            pts = [verts[i], mid, bary]
            for a in range(3):
                for b in range(a + 1, 3):
                    expected = max(expected, sqdist(pts[a], pts[b]))
    assert expected == F(5, 9)
    assert max_diameter_sq(sub) == F(5, 9)
    # (estbsd) bound with r = 3, D^2 = 2: (2/3)^2 * 2 = 8/9
    assert F(5, 9) <= F(8, 9)


def test_bsd_preserves_rank():
    cx = SimplicialComplex([UNIT_TRIANGLE])
    assert barycentric_subdivide(cx).rank == cx.rank


def test_bsd_parents_cover_every_cell():
    cx = SimplicialComplex([UNIT_TRIANGLE])
    sub, parents = bsd_with_parents(cx)
    for s in sub.simplices:
        parent = parents[s.key]
        assert parent in cx
        assert all(parent.contains(v) for v in s.vertices)


def test_subdivide_until_interval():
    cx = SimplicialComplex([Simplex([(0,), (1,)])])
    m, sub = subdivide_until(cx, F(3, 10))
    assert m == 2
    assert len(sub.tops()) == 4
    assert all(diameter_sq(s) == F(1, 16) for s in sub.tops())


def test_subdivide_until_noop_when_fine_enough():
    cx = SimplicialComplex([Simplex([(0,), (1,)])])
    m, sub = subdivide_until(cx, 2)
    assert m == 0 and sub is cx


def test_subdivide_until_triangle():
    cx = SimplicialComplex([UNIT_TRIANGLE])
    m, _ = subdivide_until(cx, F(4, 5))
    assert m == 1


def test_subdivide_until_rejects_nonpositive_delta():
    cx = SimplicialComplex([UNIT_TRIANGLE])
    with pytest.raises(InputError):
        subdivide_until(cx, 0)


def test_refinement_exact_volume_sums():
    cx = SimplicialComplex([UNIT_TRIANGLE])
    sub = barycentric_subdivide(cx)
    pieces = [s for s in sub.tops() if s.rank == 3]
    vols = relative_volumes(UNIT_TRIANGLE, pieces)
    assert sum(vols) == 1
    assert all(v == F(1, 6) for v in vols)
    for piece in pieces:
        for v in piece.vertices:
            assert UNIT_TRIANGLE.contains(v)


def test_estbsd_bound_on_random_simplices():
    rng = random.Random(99)
    for _ in range(50):
        rank = rng.randint(2, 5)
        while True:
            pts = [tuple(F(rng.randint(-16, 16), 4) for _ in range(6))
                   for _ in range(rank)]
            try:
                sx = Simplex(pts)
                break
            except InputError:
                continue
        cx = SimplicialComplex([sx])
        sub = barycentric_subdivide(cx)
        bound = F(rank - 1, rank) ** 2 * diameter_sq(sx)
        assert max_diameter_sq(sub) <= bound


def test_prism_of_interval_is_two_triangles():
    cx = SimplicialComplex([Simplex([(0,), (1,)])])
    prism = triangulate_prism(cx)
    tris = [s for s in prism.tops()]
    assert len(tris) == 2
    assert all(s.rank == 3 for s in tris)
    shared = tris[0].key & tris[1].key
    assert len(shared) == 2  # the diagonal
    assert prism.validate()


def test_prism_of_triangle_three_tets_with_volume_sum():
    cx = SimplicialComplex([UNIT_TRIANGLE])
    prism = triangulate_prism(cx)
    tets = [s for s in prism.tops()]
    assert len(tets) == 3 and all(s.rank == 4 for s in tets)
    total = F(0)
    for t in tets:
        edges = [list(vsub(v, t.vertices[0])) for v in t.vertices[1:]]
        total += abs(_det(edges)) / 6
    assert total == F(1, 2)


def test_prism_vertex_carrier_is_an_edge():
    cx = SimplicialComplex([Simplex([(0,), (1,)])])
    v = Simplex([(0,)])
    prism = triangulate_prism(cx, aligned=[SubcomplexCarrier(cx, [v])])
    edge = Simplex([(0, 0), (0, 1)])
    assert edge in prism
    over = prism_over_carrier(prism, SubcomplexCarrier(cx, [v]))
    assert edge in over.selected


def test_prism_consistency_across_shared_faces():
    # two triangles sharing an edge: prisms must still form a complex
    a = Simplex([(0, 0), (1, 0), (0, 1)])
    b = Simplex([(1, 0), (0, 1), (1, 1)])
    cx = SimplicialComplex([a, b])
    prism = triangulate_prism(cx)
    assert prism.validate()
    bottom = prism_end_carrier(prism, cx, 0)
    top = prism_end_carrier(prism, cx, 1)
    assert not bottom.is_empty() and not top.is_empty()
    for s in cx.tops():
        lifted = Simplex([tuple(v) + (F(0),) for v in s.vertices])
        assert bottom.contains_simplex(lifted)


def test_carrier_invariant_union_of_contained_members():
    a = Simplex([(0, 0), (1, 0), (0, 1)])
    b = Simplex([(1, 0), (0, 1), (1, 1)])
    cx = SimplicialComplex([a, b])
    car = SubcomplexCarrier(cx, [a])
    # every member contained in |car| is selected
    for s in cx.simplices:
        inside = all(a.contains(v) for v in s.vertices)
        assert (s in car.selected) == inside
    shared_edge = Simplex([(1, 0), (0, 1)])
    assert car.contains_simplex(shared_edge)
    assert not car.contains_simplex(b)


def test_carrier_rejects_foreign_simplex():
    cx = SimplicialComplex([UNIT_TRIANGLE])
    with pytest.raises(InputError):
        SubcomplexCarrier(cx, [Simplex([(9, 9), (10, 10), (9, 10)])])


def test_carrier_point_sampling_stays_in_subdivision():
    rng = random.Random(5)
    cx = SimplicialComplex([UNIT_TRIANGLE])
    sub = barycentric_subdivide(cx)
    sub_tops = [s for s in sub.tops()]
    for _ in range(1000):
        # sample in the parent, land in the subdivision
        w = [F(rng.randint(0, 8)) for _ in range(3)]
        if sum(w) == 0:
            w[0] = F(1)
        s = sum(w)
        x = tuple(sum(wi * vi[d] for wi, vi in zip(w, UNIT_TRIANGLE.vertices))
                  / s for d in range(2))
        assert sub.contains_point(x)
        # and vice versa: sample in a subdivision cell, land in the parent
        cell = sub_tops[rng.randrange(len(sub_tops))]
        w = [F(rng.randint(0, 8)) for _ in range(cell.rank)]
        if sum(w) == 0:
            w[0] = F(1)
        y = tuple(sum(wi * vi[d] for wi, vi in zip(w, cell.vertices))
                  / sum(w) for d in range(2))
        assert cx.contains_point(y)


def test_subdivided_complex_roots_and_location():
    cx = SimplicialComplex([UNIT_TRIANGLE])
    tree = SubdividedComplex(cx)
    tree.refine(2)
    assert tree.depth == 2
    x = (F(1, 7), F(2, 7))
    cell = tree.locate_final(x)
    assert cell is not None and cell.contains(x)
    root = tree.root(cell)
    assert root in cx
    assert all(root.contains(v) for v in cell.vertices)
