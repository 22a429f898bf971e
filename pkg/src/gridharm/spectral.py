"""Dirichlet spectra of lattice domains and the axial rate maps.

Eigenpairs of -Laplacian on interior points with zero boundary values,
orthonormal in the counting-measure inner product <f, g> = sum_x f(x) g(x)
over the interior.  The eigenvalues are positive, the first is simple, and
its eigenfunction can be chosen strictly positive (Perron-Frobenius for the
stencil matrix).

For the open cube (0,R)^n with spacing delta the spectrum is closed-form:
prod_j sin(k_j pi x_j / R) is an eigenfunction with eigenvalue

    lambda_kbar = 2 delta**-2 * (n - sum_j cos(k_j pi delta / R)),

k_j = 1 .. R/delta - 1, and lambda_kbar >= 4 R**-2 sum_j k_j**2, which yields
a mesh-uniform Weyl-type bound N(lambda) <= C_n(R) (lambda**(n/2) + 1) for the
counting function.

The axial rate map a(lambda) = delta**-1 arccosh(1 + delta**2 lambda / 2) is
the discrete stand-in for sqrt(lambda): f_k(x') cosh(a_k s) is exactly
discrete harmonic on a cylinder over the domain.  It behaves like
sqrt(lambda) for lambda << delta**-2 but only logarithmically above that
scale, which is what the partition diagnostics in the cylinder module probe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from math import acosh

import numpy as np

from .dirichlet import dirichlet_matrix
from .lattice import GridDomain, Mesh, build_box_domain
from .operators import GridFunction

ORTHONORMALITY_TOL = 1e-10
EIGEN_RESIDUAL_FACTOR = 1e-8
DEGENERACY_REL_GAP = 1e-8
RATE_IDENTITY_RTOL = 1e-12


class EigensolverError(RuntimeError):
    """Eigendecomposition failed its residual or structure contract."""


@dataclass(frozen=True)
class Spectrum:
    """Ascending Dirichlet eigenvalues with a counting-measure orthonormal eigenbasis.

    `eigenvectors[:, k]` holds the k-th eigenfunction on the interior points in
    canonical order; eigenfunctions vanish on the boundary by definition.
    Immutable after construction.
    """

    domain: GridDomain
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self) -> None:
        lam = np.array(self.eigenvalues, dtype=float)
        vec = np.array(self.eigenvectors, dtype=float)
        K = self.domain.n_interior
        if lam.shape != (K,) or vec.shape != (K, K):
            raise ValueError(f"expected {K} eigenvalues and a {K}x{K} eigenvector matrix")
        lam.setflags(write=False)
        vec.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "eigenvectors", vec)

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    def eigenfunction(self, k: int) -> GridFunction:
        """Mode k (1-based) as a grid function, zero on the boundary."""
        if not 1 <= k <= self.size:
            raise ValueError(f"mode number must be in 1..{self.size}, got {k}")
        vals = np.zeros(self.domain.n_points)
        vals[: self.size] = self.eigenvectors[:, k - 1]
        return GridFunction(self.domain, vals)

    def rates(self) -> np.ndarray:
        """Axial rates a_k for every eigenvalue."""
        return axial_rates(self.eigenvalues, self.domain.mesh)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """First nonzero component (canonical order) positive; guard f_1 > 0."""
    V = np.array(vectors)
    for k in range(V.shape[1]):
        col = V[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12 * np.abs(col).max())
        if col[nz[0]] < 0:
            V[:, k] = -col
    if np.all(V[:, 0] < 0):  # unreachable after the rule above; kept as a guard
        V[:, 0] = -V[:, 0]
    return V


def _validated(domain: GridDomain, eigenvalues: np.ndarray, eigenvectors: np.ndarray) -> Spectrum:
    lam = np.asarray(eigenvalues, dtype=float)
    V = np.asarray(eigenvectors, dtype=float)
    if np.any(np.diff(lam) < 0):
        raise EigensolverError("eigenvalues are not ascending")
    if lam[0] <= 0:
        raise EigensolverError(f"first eigenvalue must be positive, got {lam[0]}")
    if lam.size > 1 and lam[1] <= lam[0]:
        raise EigensolverError("first eigenvalue must be simple")
    if not np.all(V[:, 0] > 0):
        raise EigensolverError("first eigenfunction is not strictly positive")

    gram = V.T @ V
    ortho_defect = float(np.abs(gram - np.eye(lam.size)).max())
    if ortho_defect > ORTHONORMALITY_TOL:
        raise EigensolverError(f"orthonormality defect {ortho_defect:.3e} exceeds {ORTHONORMALITY_TOL}")

    A = dirichlet_matrix(domain)
    resid = (A @ V) * domain.mesh.inv_delta_sq - V * lam
    worst = float(np.abs(resid).max())
    if worst > EIGEN_RESIDUAL_FACTOR * lam[-1]:
        raise EigensolverError(
            f"eigen residual {worst:.3e} exceeds {EIGEN_RESIDUAL_FACTOR * lam[-1]:.3e}"
        )
    return Spectrum(domain, lam, V)


def dirichlet_spectrum(domain: GridDomain) -> Spectrum:
    """Full dense eigendecomposition of -Laplacian with zero boundary values."""
    if domain.n_interior > 20000:
        raise ValueError("dense spectrum limited to desk scale (<= 20000 interior points)")
    A = dirichlet_matrix(domain).toarray()
    w, V = np.linalg.eigh(A)
    lam = w * domain.mesh.inv_delta_sq
    return _validated(domain, lam, _fix_signs(V))


def cube_modes(side: int, mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form cube eigenvalues with their mode multi-indices, ascending.

    Returns (eigenvalues, modes) where modes[i] is the multi-index kbar of
    eigenvalues[i]; ties are ordered by the multi-index for determinism.
    """
    n = mesh.dimension
    P = side * mesh.denominator
    if P < 2:
        raise ValueError("degenerate cube: no interior points")
    ks = np.arange(1, P)
    lam1d = 2.0 * mesh.inv_delta_sq * (1.0 - np.cos(ks * np.pi / P))
    modes = np.array(list(itertools.product(ks, repeat=n)), dtype=np.int64)
    lam = lam1d[modes - 1].sum(axis=1)
    order = np.lexsort(tuple(modes[:, a] for a in reversed(range(n))) + (lam,))
    return lam[order], modes[order]


def cube_spectrum_closed_form(side: int, mesh: Mesh, n: int) -> Spectrum:
    """Closed-form spectrum of the open cube (0, side)^n, counting-measure normalized."""
    if n != mesh.dimension:
        raise ValueError(f"mesh dimension {mesh.dimension} does not match n={n}")
    P = side * mesh.denominator
    lam, modes = cube_modes(side, mesh)
    # 1D sine table; each row has counting-measure norm 1 (sum of sin^2 = P/2).
    grid = np.arange(1, P)
    table = np.sin(np.outer(grid, grid) * (np.pi / P)) * np.sqrt(2.0 / P)
    V = np.empty((lam.size, lam.size))
    for i, kbar in enumerate(modes):
        V[:, i] = reduce(np.kron, (table[k - 1] for k in kbar))
    domain = build_box_domain(mesh, (side,) * n)
    return _validated(domain, lam, V)


def counting_function(spectrum: Spectrum, lam: float) -> int:
    """Number of eigenvalues <= lam."""
    return int(np.searchsorted(spectrum.eigenvalues, lam, side="right"))


@dataclass(frozen=True)
class RatePair:
    """Eigenvalue lambda with its axial rate a: cosh(delta a) = 1 + delta**2 lambda / 2."""

    lam: float
    a: float
    delta: float

    def __post_init__(self) -> None:
        target = 1.0 + 0.5 * self.delta**2 * self.lam
        if abs(np.cosh(self.delta * self.a) - target) > RATE_IDENTITY_RTOL * target:
            raise ValueError("rate pair violates cosh(delta a) = 1 + delta^2 lambda / 2")


def a_of_lambda(lam: float, mesh: Mesh) -> RatePair:
    """The unique rate a >= 0 with cosh(delta a) = 1 + delta**2 lambda / 2; a = 0 iff lambda = 0."""
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    a = mesh.denominator * acosh(1.0 + 0.5 * lam / mesh.inv_delta_sq)
    return RatePair(lam=float(lam), a=float(a), delta=mesh.delta)


def axial_rates(eigenvalues: np.ndarray, mesh: Mesh) -> np.ndarray:
    """Vectorized a_of_lambda over an eigenvalue array."""
    lam = np.asarray(eigenvalues, dtype=float)
    if np.any(lam < 0):
        raise ValueError("eigenvalues must be nonnegative")
    return mesh.denominator * np.arccosh(1.0 + 0.5 * lam / mesh.inv_delta_sq)


def b_of_lambda1(lam1: float, mesh: Mesh, k_axes: int) -> float:
    """The unique b > 0 with cosh(delta b) = 1 + delta**2 lambda_1 / (2 k_axes).

    This is the growth rate of the separable comparison function
    f_1(x) prod_i cosh(b y_i) on a product with k_axes appended axes; for
    k_axes = 1 it coincides with a_of_lambda.  b tends to sqrt(lambda_1 / k)
    as delta -> 0.
    """
    if lam1 <= 0:
        raise ValueError(f"lambda_1 must be positive, got {lam1}")
    if not isinstance(k_axes, int) or k_axes < 1:
        raise ValueError(f"k_axes must be a positive integer, got {k_axes!r}")
    return mesh.denominator * acosh(1.0 + 0.5 * lam1 / (k_axes * mesh.inv_delta_sq))


@dataclass(frozen=True)
class WeylBound:
    """Cube counting-function value and its normalized constant at one lambda."""

    count: int
    constant: float


def weyl_bound(side: int, mesh: Mesh, n: int, lam: float) -> WeylBound:
    """N_Q(lambda) for the cube (0,side)^n plus the ratio N / (lambda^{n/2} + 1).

    The ratio is what a mesh-uniform constant has to dominate; provable
    choices are side/2 for n = 1 and pi*side**2/16 for n = 2 (from
    lambda_kbar >= 4 side**-2 sum k_j^2 and lattice-point counting).
    """
    if n != mesh.dimension:
        raise ValueError(f"mesh dimension {mesh.dimension} does not match n={n}")
    values, _ = cube_modes(side, mesh)
    count = int(np.searchsorted(values, lam, side="right"))
    return WeylBound(count=count, constant=count / (lam ** (n / 2.0) + 1.0))


def eigenspace_groups(eigenvalues: np.ndarray, rel_gap: float = DEGENERACY_REL_GAP) -> list[np.ndarray]:
    """Indices grouped into (numerically) degenerate eigenspaces.

    Consecutive eigenvalues with relative gap below `rel_gap` share a group;
    eigenspace comparisons must be basis-invariant (projectors, not vectors).
    """
    lam = np.asarray(eigenvalues, dtype=float)
    groups: list[np.ndarray] = []
    start = 0
    for i in range(1, lam.size + 1):
        if i == lam.size or lam[i] - lam[i - 1] > rel_gap * max(lam[i], lam[i - 1]):
            groups.append(np.arange(start, i))
            start = i
    return groups
