import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gridharm import (
    GridFunction,
    Mesh,
    NeighborUndefinedError,
    b_of_lambda1,
    build_box_domain,
    check_max_principle,
    cylinder_domain,
    dirichlet_spectrum,
    gradient_at,
    is_harmonic,
    is_subharmonic,
    laplacian_at,
    laplacian_interior,
    partial_laplacian_at,
)


def interval(denominator=4, units=1):
    return build_box_domain(Mesh(denominator, 1), (units,))


def test_constant_is_harmonic():
    dom = build_box_domain(Mesh(4, 2), (1, 1))
    u = GridFunction.constant(dom, 3.5)
    assert all(laplacian_at(u, p) == 0.0 for p in dom.interior)
    assert is_harmonic(u, 0.0)


def test_linear_is_harmonic():
    dom = build_box_domain(Mesh(4, 2), (1, 1))
    u = GridFunction.from_callable(dom, lambda p: p[0] / 4)
    assert is_harmonic(u, 1e-12)


def test_hand_stencil_value():
    # delta = 1/2, values (0, 1, 4) on {0, 1/2, 1}: 4 * (0 + 4 - 2) = 8
    dom = interval(denominator=2)
    u = GridFunction.from_map(dom, {(0,): 0.0, (1,): 1.0, (2,): 4.0})
    assert laplacian_at(u, (1,)) == 8.0


def test_laplacian_requires_interior_point():
    u = GridFunction.constant(interval(), 1.0)
    with pytest.raises(NeighborUndefinedError):
        laplacian_at(u, (0,))


def test_saddle_quadratic_is_annihilated():
    dom = build_box_domain(Mesh(4, 2), (1, 1))
    u = GridFunction.from_callable(dom, lambda p: (p[0] / 4) ** 2 - (p[1] / 4) ** 2)
    assert is_harmonic(u, 0.0)


def test_square_is_subharmonic_not_harmonic():
    dom = interval(denominator=4)
    u = GridFunction.from_callable(dom, lambda p: (p[0] / 4) ** 2)
    assert np.allclose(laplacian_interior(u), 2.0, atol=1e-12)
    assert not is_harmonic(u, 1.0)
    assert is_subharmonic(u, 1e-12)


def test_gradient_constant_and_linear():
    dom = interval()
    assert gradient_at(GridFunction.constant(dom, 2.0), (1,)) == (0.0,)
    v = GridFunction.from_callable(dom, lambda p: p[0] / 4)
    assert gradient_at(v, (2,)) == (1.0,)


def test_gradient_hand_value():
    # delta = 1/4, values (1, 3) on consecutive points: 4 * (3 - 1) = 8
    dom = interval(denominator=4)
    u = GridFunction.from_map(dom, {(0,): 0.0, (1,): 1.0, (2,): 3.0, (3,): 0.0, (4,): 0.0})
    assert gradient_at(u, (1,))[0] == 8.0


def test_gradient_domain_edge_error():
    u = GridFunction.constant(interval(), 0.0)
    with pytest.raises(NeighborUndefinedError):
        gradient_at(u, (4,))


def test_max_principle_subharmonic_square():
    dom = interval(denominator=8)
    u = GridFunction.from_callable(dom, lambda p: (p[0] / 8) ** 2)
    assert check_max_principle(u)


def test_grid_function_rejects_nonfinite():
    dom = interval()
    vals = np.zeros(dom.n_points)
    vals[0] = np.nan
    with pytest.raises(ValueError):
        GridFunction(dom, vals)


@given(st.integers(0, 2**32 - 1))
def test_laplacian_linearity(seed):
    r = np.random.default_rng(seed)
    dom = build_box_domain(Mesh(2, 2), (2, 1))
    u = GridFunction(dom, r.uniform(-1, 1, dom.n_points))
    v = GridFunction(dom, r.uniform(-1, 1, dom.n_points))
    a, b = r.uniform(-3, 3, 2)
    w = GridFunction(dom, a * u.values + b * v.values)
    lhs = laplacian_interior(w)
    rhs = a * laplacian_interior(u) + b * laplacian_interior(v)
    scale = dom.mesh.inv_delta_sq * max(1.0, float(np.abs(w.values).max()))
    assert np.abs(lhs - rhs).max() <= 1e-12 * scale


def test_laplacian_splits_over_product_axes(rng):
    base = build_box_domain(Mesh(2, 1), (2,))
    dom = cylinder_domain(base, 2)
    u = GridFunction(dom, rng.uniform(-1, 1, dom.n_points))
    for p in dom.interior:
        full = laplacian_at(u, p)
        split = partial_laplacian_at(u, p, [0]) + partial_laplacian_at(u, p, [1])
        assert abs(full - split) <= 1e-12 * dom.mesh.inv_delta_sq


@pytest.mark.parametrize("k_axes", [1, 2])
def test_separable_comparison_function_is_harmonic(k_axes):
    base = build_box_domain(Mesh(4, 1), (1,))
    spec = dirichlet_spectrum(base)
    lam1 = float(spec.eigenvalues[0])
    f1 = dict(zip(base.interior, spec.eigenvectors[:, 0]))
    b = b_of_lambda1(lam1, base.mesh, k_axes)
    dom = base
    for _ in range(k_axes):
        dom = cylinder_domain(dom, 4)
    delta = base.mesh.delta

    def value(p):
        out = f1.get(p[:1], 0.0)
        for y in p[1:]:
            out *= np.cosh(b * y * delta)
        return out

    u = GridFunction.from_callable(dom, value)
    rel = np.abs(laplacian_interior(u)).max() / (dom.mesh.inv_delta_sq * np.abs(u.values).max())
    assert rel <= 1e-9
