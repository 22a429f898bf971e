"""Lattice geometry: meshes, grid domains, boundaries, cylinders.

Points of the spacing-delta lattice are stored as integer coordinate tuples;
the physical location of a point c is delta*c with delta = 1/denominator.
Keeping integer coordinates makes membership and neighbor tests exact --
delta enters only when a physical coordinate or an operator scale is needed.

A grid domain is a finite, lattice-connected interior set together with its
lattice boundary: exactly the points outside the interior that have at least
one of their 2m nearest neighbors inside.  Interior and boundary points carry
a canonical index (interior block first, then boundary, each sorted
lexicographically) that every matrix assembly downstream relies on.  Domains
are immutable after construction.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

Point = tuple[int, ...]


class DomainError(ValueError):
    """Invalid lattice domain."""


class EmptyDomainError(DomainError):
    """Operation requires a nonempty point set."""


class DisconnectedDomainError(DomainError):
    """Interior set is not lattice-connected."""


@dataclass(frozen=True)
class Mesh:
    """Uniform lattice mesh: spacing delta = 1/denominator in `dimension` axes.

    The denominator must be >= 2 so a unit interval has at least one
    interior layer.  delta is never stored as a rounded real; geometry is
    integer arithmetic throughout.
    """

    denominator: int
    dimension: int

    def __post_init__(self) -> None:
        if not isinstance(self.denominator, int) or self.denominator < 2:
            raise ValueError(f"mesh denominator must be an integer >= 2, got {self.denominator!r}")
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise ValueError(f"mesh dimension must be a positive integer, got {self.dimension!r}")

    @property
    def delta(self) -> float:
        return 1.0 / self.denominator

    @property
    def delta_exact(self) -> Fraction:
        return Fraction(1, self.denominator)

    @property
    def inv_delta_sq(self) -> float:
        """Stencil scale delta**-2 (exact in binary floating point for integer denominators)."""
        return float(self.denominator * self.denominator)

    def physical(self, point: Point) -> tuple[float, ...]:
        return tuple(c / self.denominator for c in point)


def neighbors(point: Point) -> Iterator[Point]:
    """The 2m lattice neighbors of `point`, axes ascending, minus before plus."""
    for j in range(len(point)):
        yield point[:j] + (point[j] - 1,) + point[j + 1 :]
        yield point[:j] + (point[j] + 1,) + point[j + 1 :]


def is_connected(interior: Iterable[Point]) -> bool:
    """True iff every pair of points is joined by a nearest-neighbor path in the set.

    Breadth-first search from the lexicographically least point, so traversal
    order is deterministic.  Raises EmptyDomainError for an empty set.
    """
    pts = {tuple(p) for p in interior}
    if not pts:
        raise EmptyDomainError("connectivity is undefined for an empty point set")
    root = min(pts)
    seen = {root}
    queue = deque([root])
    while queue:
        p = queue.popleft()
        for q in neighbors(p):
            if q in pts and q not in seen:
                seen.add(q)
                queue.append(q)
    return len(seen) == len(pts)


def boundary_of(mesh: Mesh, interior: Iterable[Point]) -> set[Point]:
    """Exactly the lattice points outside `interior` adjacent to it."""
    pts = {tuple(p) for p in interior}
    if not pts:
        raise EmptyDomainError("boundary of an empty set is undefined")
    for p in pts:
        if len(p) != mesh.dimension:
            raise ValueError(f"point {p} does not match mesh dimension {mesh.dimension}")
    out: set[Point] = set()
    for p in pts:
        for q in neighbors(p):
            if q not in pts:
                out.add(q)
    return out


class GridDomain:
    """Immutable finite lattice domain: connected interior plus its lattice boundary.

    The canonical point index lists interior points first and boundary points
    after, both blocks sorted lexicographically.  Instances are value types:
    nothing is mutated after construction, so they are safe to share across
    threads; the neighbor table is a derived cache built on first use.
    """

    def __init__(self, mesh: Mesh, interior: Iterable[Point]):
        pts = sorted({tuple(int(c) for c in p) for p in interior})
        if not pts:
            raise EmptyDomainError("domain interior must be nonempty")
        for p in pts:
            if len(p) != mesh.dimension:
                raise ValueError(f"point {p} does not match mesh dimension {mesh.dimension}")
        if not is_connected(pts):
            raise DisconnectedDomainError("domain interior must be lattice-connected")
        self.mesh = mesh
        self.interior: tuple[Point, ...] = tuple(pts)
        self.boundary: tuple[Point, ...] = tuple(sorted(boundary_of(mesh, pts)))
        self._index: dict[Point, int] = {p: i for i, p in enumerate(self.interior + self.boundary)}
        self._neighbor_table: np.ndarray | None = None

    # ------------------------------------------------------------------ queries

    @property
    def n_interior(self) -> int:
        return len(self.interior)

    @property
    def n_boundary(self) -> int:
        return len(self.boundary)

    @property
    def n_points(self) -> int:
        return len(self._index)

    @property
    def points(self) -> tuple[Point, ...]:
        return self.interior + self.boundary

    def __contains__(self, point) -> bool:
        return tuple(point) in self._index

    def index_of(self, point) -> int:
        """Canonical index of a point of the closure (interior block first)."""
        try:
            return self._index[tuple(point)]
        except KeyError:
            raise ValueError(f"point {tuple(point)} is not in the domain closure") from None

    def interior_index(self, point) -> int:
        i = self.index_of(point)
        if i >= self.n_interior:
            raise ValueError(f"point {tuple(point)} is a boundary point, not interior")
        return i

    def is_interior(self, point) -> bool:
        i = self._index.get(tuple(point))
        return i is not None and i < self.n_interior

    def is_boundary(self, point) -> bool:
        i = self._index.get(tuple(point))
        return i is not None and i >= self.n_interior

    @property
    def neighbor_table(self) -> np.ndarray:
        """(n_interior, 2m) canonical indices of each interior point's neighbors.

        Column order matches `neighbors`: axes ascending, minus before plus.
        Every neighbor of an interior point lies in the closure, so the table
        is total.
        """
        if self._neighbor_table is None:
            m = self.mesh.dimension
            tbl = np.empty((self.n_interior, 2 * m), dtype=np.int64)
            for i, p in enumerate(self.interior):
                for col, q in enumerate(neighbors(p)):
                    tbl[i, col] = self._index[q]
            tbl.setflags(write=False)
            self._neighbor_table = tbl
        return self._neighbor_table

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GridDomain)
            and self.mesh == other.mesh
            and self.interior == other.interior
        )

    def __hash__(self) -> int:
        return hash((self.mesh, self.interior))

    def __repr__(self) -> str:
        return (
            f"GridDomain(denominator={self.mesh.denominator}, dimension={self.mesh.dimension}, "
            f"n_interior={self.n_interior}, n_boundary={self.n_boundary})"
        )


def build_box_domain(mesh: Mesh, side_lengths: Iterable[int]) -> GridDomain:
    """Open box (0, s_1) x ... x (0, s_m), side lengths in whole units.

    A side of s units spans s*denominator lattice steps, so the interior along
    that axis is {1, ..., s*denominator - 1}.  Degenerate sides (fewer than two
    lattice steps, hence no interior point) are rejected.
    """
    sides = tuple(int(s) for s in side_lengths)
    if len(sides) != mesh.dimension:
        raise ValueError(f"expected {mesh.dimension} side lengths, got {len(sides)}")
    units = tuple(s * mesh.denominator for s in sides)
    if any(u < 2 for u in units):
        raise DomainError(f"degenerate side length in {sides}: no interior points at denominator {mesh.denominator}")
    return GridDomain(mesh, itertools.product(*(range(1, u) for u in units)))


def points_domain(mesh: Mesh, interior: Iterable[Point]) -> GridDomain:
    """Domain from an explicit interior point list (no rasterization policy here)."""
    return GridDomain(mesh, interior)


def cylinder_domain(base: GridDomain, half_length: int) -> GridDomain:
    """Truncated cylinder over `base` with the axial coordinate appended last.

    `half_length` is the half-length N in lattice steps (N/delta).  The
    interior is base.interior x {1-N, ..., N-1}; the boundary that falls out of
    the general adjacency rule is the lateral wall base.boundary x {|s| <= N-1}
    plus the two caps base.interior x {+-N}.  The outer corner points
    base.boundary x {+-N} have no neighbor in the interior and are excluded.
    """
    if half_length < 1:
        raise ValueError(f"half_length must be a positive integer, got {half_length}")
    mesh = Mesh(base.mesh.denominator, base.mesh.dimension + 1)
    axial = range(1 - half_length, half_length)
    return GridDomain(mesh, (p + (s,) for p in base.interior for s in axial))


def cylinder_caps(base: GridDomain, half_length: int) -> tuple[Point, ...]:
    """The cap boundary points base.interior x {+-half_length}, sorted."""
    return tuple(sorted(p + (s,) for p in base.interior for s in (-half_length, half_length)))


def cylinder_wall(base: GridDomain, half_length: int) -> tuple[Point, ...]:
    """The lateral-wall boundary points base.boundary x {|s| <= half_length-1}, sorted."""
    axial = range(1 - half_length, half_length)
    return tuple(sorted(p + (s,) for p in base.boundary for s in axial))
