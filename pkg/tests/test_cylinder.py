import numpy as np
import pytest

from gridharm import (
    CylinderSpec,
    GridFunction,
    Mesh,
    PositivityError,
    build_box_domain,
    check_max_principle,
    cube_spectrum_closed_form,
    dirichlet_spectrum,
    eigenspace_groups,
    harmonic_basis,
    harmonic_measure,
    is_harmonic,
    make_cylinder_spec,
    measure_mid_values,
    midsection_linear_bound,
    pl_constant_partition_report,
    pl_lower_bound,
    points_domain,
    residual,
    solve,
    solve_measure_directly,
    stability_bound,
    verify_pl,
)
from gridharm.cylinder import cosh_ratio
from _oracles import l_shape_interior


@pytest.fixture(scope="module")
def one_point_spec():
    return make_cylinder_spec(build_box_domain(Mesh(2, 1), (1,)), 2)


@pytest.fixture(scope="module")
def interval_spec():
    return make_cylinder_spec(build_box_domain(Mesh(4, 1), (1,)), 4)


@pytest.fixture(scope="module")
def square_spec():
    return make_cylinder_spec(build_box_domain(Mesh(4, 2), (1, 1)), 4)


def wall_points(spec):
    return [spec.domain.points[i] for i in spec.wall_indices]


def cap_points(spec):
    return [spec.domain.points[i] for i in spec.cap_indices]


def test_basis_harmonic_positive_and_wall_vanishing(interval_spec):
    u = harmonic_basis(interval_spec, 1, "even")
    assert is_harmonic(u)
    assert np.all(u.interior_values > 0)
    assert np.all(u.values[interval_spec.wall_indices] == 0.0)


def test_basis_one_point_closed_form(one_point_spec):
    a = 2 * np.arccosh(2.0)
    u = harmonic_basis(one_point_spec, 1, "even")
    for s in (-2, -1, 0, 1, 2):
        assert u.value_at((1, s)) == pytest.approx(np.cosh(a * s / 2), rel=1e-12)


def test_basis_odd_vanishes_on_mid_layer(interval_spec):
    v = harmonic_basis(interval_spec, 2, "odd")
    assert np.all(v.values[interval_spec.mid_indices] == 0.0)
    assert is_harmonic(v)


def test_basis_harmonic_all_modes(square_spec):
    worst = 0.0
    for k in range(1, square_spec.K + 1):
        for parity in ("even", "odd"):
            u = harmonic_basis(square_spec, k, parity)
            rel = residual(u) / (square_spec.mesh.inv_delta_sq * np.abs(u.values).max())
            worst = max(worst, rel)
    assert worst <= 1e-9


def test_basis_validation(interval_spec):
    with pytest.raises(ValueError):
        harmonic_basis(interval_spec, 0)
    with pytest.raises(ValueError):
        harmonic_basis(interval_spec, 1, "sideways")


def test_measure_one_seventh(one_point_spec):
    expansion, g = harmonic_measure(one_point_spec)
    assert g.value_at((1, 0)) == pytest.approx(1 / 7, abs=1e-12)
    direct = solve_measure_directly(one_point_spec)
    assert np.abs(g.values - direct.values).max() <= 1e-12
    assert expansion.d[0] == pytest.approx(1.0, abs=1e-14)


def test_measure_caps_range_evenness_monotone(square_spec):
    _, g = harmonic_measure(square_spec)
    assert np.abs(g.values[square_spec.cap_indices] - 1.0).max() <= 1e-10
    assert np.all(g.values[square_spec.wall_indices] == 0.0)
    assert g.values.min() >= -1e-9 and g.values.max() <= 1 + 1e-9
    hl = square_spec.half_length_lattice
    for p in square_spec.base.interior:
        profile = [g.value_at(p + (s,)) for s in range(-hl, hl + 1)]
        assert profile == pytest.approx(profile[::-1], abs=1e-12)  # even in s
        half = profile[hl:]
        assert all(half[i] <= half[i + 1] + 1e-12 for i in range(len(half) - 1))


def test_measure_satisfies_max_principle(square_spec):
    _, g = harmonic_measure(square_spec)
    assert check_max_principle(g)


def test_measure_matches_direct_on_l_shape():
    base = points_domain(Mesh(4, 2), l_shape_interior(4))
    spec = make_cylinder_spec(base, 4)
    _, g = harmonic_measure(spec)
    direct = solve_measure_directly(spec)
    assert np.abs(g.values - direct.values).max() <= 1e-9


def test_midsection_bound(one_point_spec, interval_spec, rng):
    # w = f_1 picks out the single term d_1 / cosh(a_1 N)
    V = interval_spec.spectrum.eigenvectors
    d = V.sum(axis=0)
    lhs = float(V[:, 0] @ measure_mid_values(interval_spec))
    expected = d[0] * cosh_ratio(interval_spec.rates, 0.0, interval_spec.N)[0]
    assert lhs == pytest.approx(expected, rel=1e-10)
    assert lhs <= midsection_linear_bound(interval_spec, V[:, 0])

    # one-point base: equality at 1/7
    assert midsection_linear_bound(one_point_spec, np.array([1.0])) == pytest.approx(1 / 7, abs=1e-12)

    g0 = measure_mid_values(interval_spec)
    for _ in range(5):
        w = rng.uniform(0, 1, interval_spec.K)
        assert float(w @ g0) <= midsection_linear_bound(interval_spec, w)


def test_pl_lower_bound_one_point(one_point_spec):
    bound = pl_lower_bound(one_point_spec, 2.0)
    assert bound.exact == pytest.approx(np.exp(2 * np.arccosh(2.0)), rel=1e-12)
    assert pl_lower_bound(one_point_spec, 4.0).exact == pytest.approx(2 * bound.exact, rel=1e-12)
    with pytest.raises(ValueError):
        pl_lower_bound(one_point_spec, 0.0)


def test_verify_pl_scaled_first_mode(interval_spec):
    u1 = harmonic_basis(interval_spec, 1, "even")
    u = GridFunction(u1.domain, u1.values * np.sqrt(interval_spec.K))
    report = verify_pl(interval_spec, u)
    assert report.amplitude == pytest.approx(1.0, rel=1e-12)
    assert report.passed and report.ratio >= 1.0


def test_verify_pl_harmonic_measure(square_spec):
    _, g = harmonic_measure(square_spec)
    report = verify_pl(square_spec, g)
    assert report.passed
    assert report.bound_exact < 1.0 + 1e-9


def test_verify_pl_rejects_nonpositive_mid_layer(interval_spec):
    u1 = harmonic_basis(interval_spec, 1, "even")
    with pytest.raises(PositivityError):
        verify_pl(interval_spec, GridFunction(u1.domain, -u1.values))


def test_stability_bound_zero_wall_data(one_point_spec):
    assert stability_bound(one_point_spec, 0.0, 3.0) == pytest.approx(3.0 / 7, abs=1e-12)


def test_stability_constant_wall_data(one_point_spec):
    c = 0.8
    spec = one_point_spec
    bound = stability_bound(spec, c, 0.0)
    assert bound <= c * (1 + 1 / 7) + 1e-12
    bvals = {p: c for p in wall_points(spec)}
    bvals.update({p: 0.0 for p in cap_points(spec)})
    h = solve(spec.domain, bvals)
    assert np.abs(h.values[spec.mid_indices]).max() <= min(bound, c) + 1e-12


def test_stability_randomized(square_spec, rng):
    spec = square_spec
    cap_bound = 2.0
    for _ in range(10):
        f = rng.uniform(-1, 1, len(spec.wall_indices))
        caps = rng.uniform(-cap_bound, cap_bound, len(spec.cap_indices))
        bvals = {p: float(v) for p, v in zip(wall_points(spec), f)}
        bvals.update({p: float(v) for p, v in zip(cap_points(spec), caps)})
        h = solve(spec.domain, bvals)
        measured = float(np.abs(h.values[spec.mid_indices]).max())
        assert measured <= stability_bound(spec, bvals, cap_bound)


def test_comparison_function_dominates(interval_spec, rng):
    # |h| <= eps u on the caps and 0 on the wall forces |h| <= eps u inside
    spec = interval_spec
    u = harmonic_basis(spec, 1, "even")
    eps = 0.3
    bvals = {p: 0.0 for p in wall_points(spec)}
    bvals.update({p: eps * u.value_at(p) * rng.uniform(-1, 1) for p in cap_points(spec)})
    h = solve(spec.domain, bvals)
    assert np.all(np.abs(h.values) <= eps * u.values + 1e-12)


def test_uniqueness_and_cap_perturbation(interval_spec, rng):
    spec = interval_spec
    f = rng.uniform(-1, 1, len(spec.wall_indices))
    caps = rng.uniform(-1, 1, len(spec.cap_indices))
    bvals = {p: float(v) for p, v in zip(wall_points(spec), f)}
    bvals.update({p: float(v) for p, v in zip(cap_points(spec), caps)})
    h1 = solve(spec.domain, bvals)
    h2 = solve(spec.domain, bvals)
    assert np.array_equal(h1.values, h2.values)

    eta = 0.25
    perturbed = dict(bvals)
    for p in cap_points(spec):
        perturbed[p] = bvals[p] + eta * rng.uniform(-1, 1)
    h3 = solve(spec.domain, perturbed)
    g0max = float(measure_mid_values(spec).max())
    change = np.abs((h3.values - h1.values)[spec.mid_indices]).max()
    assert change <= eta * g0max + 1e-12


def test_degenerate_eigenspace_expansion_is_basis_invariant():
    mesh = Mesh(4, 2)
    closed = cube_spectrum_closed_form(1, mesh, 2)
    numeric = dirichlet_spectrum(build_box_domain(mesh, (1, 1)))
    for gc, gn in zip(eigenspace_groups(closed.eigenvalues), eigenspace_groups(numeric.eigenvalues)):
        Bc = closed.eigenvectors[:, gc]
        Bn = numeric.eigenvectors[:, gn]
        # per-eigenspace term sum_k d_k f_k = projection of the all-ones vector
        sc = Bc @ Bc.sum(axis=0)
        sn = Bn @ Bn.sum(axis=0)
        assert np.abs(sc - sn).max() <= 1e-10


def test_partition_report(interval_spec):
    report = pl_constant_partition_report(interval_spec, c=1.0)
    assert report.i1_count + report.i2_count == interval_spec.K
    assert report.c0 == pytest.approx(np.arccosh(2.0), rel=1e-14)
    assert sum(s.count for s in report.shells) == report.i1_count
    assert report.shells_bounded
    assert report.measured_constant == pytest.approx(0.5 / report.mode_sum, rel=1e-14)

    empty_i2 = pl_constant_partition_report(interval_spec, c=5.0)  # c > 4n empties I2
    assert empty_i2.i2_count == 0
    assert empty_i2.i2_tail == 0.0
    with pytest.raises(ValueError):
        pl_constant_partition_report(interval_spec, c=-1.0)


def test_mode_sum_uniformly_bounded():
    # sum_k e^{(a_1 - a_k) N} stays near 1 across the refinement family
    worst = 0.0
    for denominator in (8, 16, 32):
        base = build_box_domain(Mesh(denominator, 1), (1,))
        spectrum = dirichlet_spectrum(base)
        for units in (1, 2, 3):
            spec = CylinderSpec(base, spectrum, units * denominator)
            worst = max(worst, pl_constant_partition_report(spec).mode_sum)
    assert worst <= 1.5


def test_spec_validation():
    base = build_box_domain(Mesh(2, 1), (1,))
    other = build_box_domain(Mesh(2, 1), (2,))
    with pytest.raises(ValueError):
        CylinderSpec(base, dirichlet_spectrum(other), 2)
    with pytest.raises(ValueError):
        make_cylinder_spec(base, 0)
