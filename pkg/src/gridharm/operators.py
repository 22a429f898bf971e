"""Discrete Laplacian, forward-difference gradient, and harmonicity predicates.

The delta-discrete Laplacian at an interior point x is

    L u(x) = delta**-2 * ( sum_j [u(x + delta e_j) + u(x - delta e_j)] - 2m u(x) ),

so u is discrete harmonic at x exactly when u(x) equals the average of its 2m
neighbor values.  Partial derivatives are one-sided forward differences
delta**-1 (u(x + delta e_j) - u(x)); the layer gradient energies downstream
are defined for this one-sided difference, so no centered variant is provided.

Stencil accumulation runs in a fixed order (axes ascending, minus neighbor
before plus) in both the scalar and vectorized paths, keeping results bitwise
reproducible across runs.  Everything here is pure; concurrent evaluation
over disjoint points is safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .lattice import GridDomain, Point

# Harmonicity tolerance is relative to the stencil scale delta**-2 * max|u|;
# the delta**-2 factor amplifies rounding in the stencil itself.
HARMONIC_TOL_FACTOR = 1e-9


class NeighborUndefinedError(ValueError):
    """Stencil or difference needs a neighbor value outside the domain closure."""


@dataclass(frozen=True)
class GridFunction:
    """Real values on the closure of a grid domain, in canonical point order.

    Total (a value for every interior and boundary point) and finite; the
    value array is frozen read-only so instances can be shared freely.
    """

    domain: GridDomain
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.domain.n_points,):
            raise ValueError(
                f"expected {self.domain.n_points} values (interior + boundary), got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_map(cls, domain: GridDomain, mapping: Mapping[Point, float]) -> "GridFunction":
        vals = np.empty(domain.n_points)
        for i, p in enumerate(domain.points):
            try:
                vals[i] = mapping[p]
            except KeyError:
                raise ValueError(f"no value for domain point {p}") from None
        return cls(domain, vals)

    @classmethod
    def from_callable(cls, domain: GridDomain, fn: Callable[[Point], float]) -> "GridFunction":
        return cls(domain, np.array([fn(p) for p in domain.points], dtype=float))

    @classmethod
    def constant(cls, domain: GridDomain, value: float) -> "GridFunction":
        return cls(domain, np.full(domain.n_points, float(value)))

    def value_at(self, point) -> float:
        return float(self.values[self.domain.index_of(point)])

    @property
    def interior_values(self) -> np.ndarray:
        return self.values[: self.domain.n_interior]

    @property
    def boundary_values(self) -> np.ndarray:
        return self.values[self.domain.n_interior :]

    def as_map(self) -> dict[Point, float]:
        return {p: float(v) for p, v in zip(self.domain.points, self.values)}


def laplacian_at(u: GridFunction, x) -> float:
    """Exact stencil value of the delta-discrete Laplacian at an interior point."""
    dom = u.domain
    try:
        i = dom.interior_index(x)
    except ValueError as exc:
        raise NeighborUndefinedError(str(exc)) from None
    row = dom.neighbor_table[i]
    vals = u.values
    acc = 0.0
    for col in range(row.shape[0]):
        acc += vals[row[col]]
    m = dom.mesh.dimension
    return (acc - 2.0 * m * vals[i]) * dom.mesh.inv_delta_sq


def laplacian_interior(u: GridFunction) -> np.ndarray:
    """Stencil values at every interior point, same accumulation order as laplacian_at."""
    dom = u.domain
    tbl = dom.neighbor_table
    vals = u.values
    acc = np.zeros(dom.n_interior)
    for col in range(tbl.shape[1]):
        acc += vals[tbl[:, col]]
    m = dom.mesh.dimension
    return (acc - 2.0 * m * vals[: dom.n_interior]) * dom.mesh.inv_delta_sq


def default_harmonic_tol(u: GridFunction) -> float:
    """1e-9 relative to the stencil scale delta**-2 * max|u|."""
    scale = float(np.abs(u.values).max()) if u.values.size else 0.0
    return HARMONIC_TOL_FACTOR * u.domain.mesh.inv_delta_sq * scale


def is_harmonic(u: GridFunction, tol: float | None = None) -> bool:
    """True iff |L u| <= tol at every interior point (tol defaults to the relative rule)."""
    if tol is None:
        tol = default_harmonic_tol(u)
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    lap = laplacian_interior(u)
    return bool(np.all(np.abs(lap) <= tol))


def is_subharmonic(u: GridFunction, tol: float | None = None) -> bool:
    """True iff L u >= -tol at every interior point."""
    if tol is None:
        tol = default_harmonic_tol(u)
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return bool(np.all(laplacian_interior(u) >= -tol))


def gradient_at(u: GridFunction, x) -> tuple[float, ...]:
    """Forward-difference gradient delta**-1 (u(x + delta e_j) - u(x)), j = 1..m."""
    dom = u.domain
    x = tuple(x)
    ux = u.value_at(x)
    inv_delta = float(dom.mesh.denominator)
    out = []
    for j in range(dom.mesh.dimension):
        fwd = x[:j] + (x[j] + 1,) + x[j + 1 :]
        if fwd not in dom:
            raise NeighborUndefinedError(f"forward neighbor {fwd} of {x} is outside the domain")
        out.append((u.value_at(fwd) - ux) * inv_delta)
    return tuple(out)


def partial_laplacian_at(u: GridFunction, x, axes: Iterable[int]) -> float:
    """Stencil restricted to a subset of axes (needs x's neighbors along them)."""
    dom = u.domain
    x = tuple(x)
    ux = u.value_at(x)
    acc = 0.0
    count = 0
    for j in axes:
        for off in (-1, 1):
            q = x[:j] + (x[j] + off,) + x[j + 1 :]
            if q not in dom:
                raise NeighborUndefinedError(f"neighbor {q} of {x} is outside the domain")
            acc += u.value_at(q)
        count += 1
    return (acc - 2.0 * count * ux) * dom.mesh.inv_delta_sq


def check_max_principle(u: GridFunction) -> bool:
    """True iff the maximum over the closure equals the maximum over the boundary.

    Exact comparison; meaningful when the caller knows u is subharmonic.
    """
    return bool(u.values.max() == u.boundary_values.max())
