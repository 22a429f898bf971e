import pytest
from hypothesis import given
from hypothesis import strategies as st

from gridharm import (
    DisconnectedDomainError,
    EmptyDomainError,
    Mesh,
    boundary_of,
    build_box_domain,
    cylinder_caps,
    cylinder_domain,
    cylinder_wall,
    is_connected,
    points_domain,
)
from _oracles import brute_boundary, random_connected_interior, union_find_connected


def test_mesh_validation():
    with pytest.raises(ValueError):
        Mesh(1, 1)
    with pytest.raises(ValueError):
        Mesh(2, 0)
    m = Mesh(3, 2)
    assert m.delta == pytest.approx(1 / 3)
    assert m.inv_delta_sq == 9.0
    assert m.delta_exact * 3 == 1


def test_box_smallest_interval():
    dom = build_box_domain(Mesh(2, 1), (1,))
    assert dom.interior == ((1,),)
    assert dom.boundary == ((0,), (2,))


def test_box_unit_square_count():
    assert build_box_domain(Mesh(4, 2), (1, 1)).n_interior == 9


def test_box_interval_two_units():
    dom = build_box_domain(Mesh(3, 1), (2,))
    assert dom.interior == tuple((c,) for c in range(1, 6))
    assert dom.n_interior == 2 * 3 - 1


def test_box_rejects_degenerate_side():
    with pytest.raises(ValueError):
        build_box_domain(Mesh(2, 2), (1, 0))


def test_boundary_single_point():
    assert boundary_of(Mesh(2, 2), {(0, 0)}) == {(1, 0), (-1, 0), (0, 1), (0, -1)}


def test_boundary_segment():
    assert boundary_of(Mesh(2, 1), {(1,), (2,), (3,)}) == {(0,), (4,)}


def test_boundary_l_shape_vs_brute_force():
    interior = {(0, 0), (1, 0), (2, 0), (2, 1), (2, 2)}
    assert boundary_of(Mesh(2, 2), interior) == brute_boundary(interior)


def test_is_connected_examples():
    assert is_connected({(0, 0), (0, 1)})
    assert not is_connected({(0, 0), (1, 1)})
    with pytest.raises(EmptyDomainError):
        is_connected(set())


def test_is_connected_random_blobs_vs_union_find(rng):
    for _ in range(10):
        blob = sorted(random_connected_interior(rng, 2, 50))
        pts = [p for p in blob if rng.random() > 0.3]
        if not pts:
            continue
        assert is_connected(pts) == union_find_connected(pts)


def test_cylinder_one_point_base():
    base = build_box_domain(Mesh(2, 1), (1,))
    dom = cylinder_domain(base, 2)
    assert dom.interior == ((1, -1), (1, 0), (1, 1))
    caps = set(cylinder_caps(base, 2))
    wall = set(cylinder_wall(base, 2))
    assert caps == {(1, -2), (1, 2)}
    assert wall == {(0, s) for s in (-1, 0, 1)} | {(2, s) for s in (-1, 0, 1)}
    assert set(dom.boundary) == caps | wall


def test_cylinder_single_layer():
    base = build_box_domain(Mesh(2, 1), (1,))
    assert cylinder_domain(base, 1).interior == ((1, 0),)


def test_cylinder_interior_count():
    base = build_box_domain(Mesh(4, 2), (1, 1))
    assert cylinder_domain(base, 4).n_interior == 9 * 7


def test_cylinder_boundary_matches_generic_rule(rng):
    base = points_domain(Mesh(2, 2), random_connected_interior(rng, 2, 8))
    dom = cylinder_domain(base, 3)
    assert set(dom.boundary) == brute_boundary(set(dom.interior))
    assert set(dom.boundary) == set(cylinder_caps(base, 3)) | set(cylinder_wall(base, 3))


def test_points_domain_rejects_disconnected():
    with pytest.raises(DisconnectedDomainError):
        points_domain(Mesh(2, 2), [(0, 0), (5, 5)])


def test_canonical_index_order():
    dom = build_box_domain(Mesh(2, 2), (1, 1))
    assert list(dom.interior) == sorted(dom.interior)
    assert list(dom.boundary) == sorted(dom.boundary)
    assert dom.index_of(dom.interior[0]) == 0
    assert dom.index_of(dom.boundary[0]) == dom.n_interior
    with pytest.raises(ValueError):
        dom.index_of((99, 99))


@given(st.sets(st.tuples(st.integers(-8, 8), st.integers(-8, 8)), min_size=1, max_size=40))
def test_boundary_properties(pts):
    mesh = Mesh(2, 2)
    bdry = boundary_of(mesh, pts)
    assert not (bdry & pts)
    assert not (boundary_of(mesh, pts | bdry) & bdry)


@given(st.integers(2, 5), st.lists(st.integers(1, 2), min_size=1, max_size=2))
def test_box_is_connected(denominator, sides):
    dom = build_box_domain(Mesh(denominator, len(sides)), sides)
    assert is_connected(dom.interior)


@given(st.integers(2, 4), st.integers(1, 4))
def test_cylinder_cardinality(denominator, half_length):
    base = build_box_domain(Mesh(denominator, 1), (1,))
    dom = cylinder_domain(base, half_length)
    assert dom.n_interior == base.n_interior * (2 * half_length - 1)
