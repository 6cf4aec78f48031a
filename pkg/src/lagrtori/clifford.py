"""The torus fibration of the plane by moduli levels: fibers, discs, periods,
integral-level enumeration, and the lifted period map.

Action coordinates are the squared moduli (r0, r1) = (|z0|^2, |z1|^2) of the
unit representative; the moment triangle is {r0 >= 0, r1 >= 0, r0 + r1 <= 1}.
The fiber over an interior point is the torus

    (theta0, theta1) |-> [sqrt(r0) e^{i theta0} : sqrt(r1) e^{i theta1} : sqrt(1 - r0 - r1)]

whose basis cycles d1, d2 (and their sum d3 = d1 + d2) bound standard discs
with symplectic areas r0, r1 and r0 + r1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import (
    BoundaryFiber,
    LeavesTriangle,
    StencilOutOfDomain,
    UnsupportedClass,
)
from .geometry import (
    HomogeneousPoint,
    ParamSurface,
    QuadSpec,
    hermdot,
    normalize_point,
    surface_symplectic_area,
)
from .maslov import DiscWithBoundary

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ActionCoords:
    """A point of the closed moment triangle; floats or exact Fractions."""

    r0: float | Fraction
    r1: float | Fraction

    def __post_init__(self):
        eps = 1e-12
        if self.r0 < -eps or self.r1 < -eps or self.r0 + self.r1 > 1 + eps:
            raise ValueError(f"({self.r0}, {self.r1}) is outside the moment triangle")

    @property
    def r2(self):
        return 1 - self.r0 - self.r1

    def is_interior(self) -> bool:
        return self.r0 > 0 and self.r1 > 0 and self.r0 + self.r1 < 1

    def as_floats(self) -> tuple[float, float]:
        return (float(self.r0), float(self.r1))


@dataclass(frozen=True)
class HomologyClass:
    """First-homology class of the fiber torus in the (d1, d2) basis."""

    p: int
    q: int

    def __add__(self, other: "HomologyClass") -> "HomologyClass":
        return HomologyClass(self.p + other.p, self.q + other.q)


D1 = HomologyClass(1, 0)
D2 = HomologyClass(0, 1)
D3 = HomologyClass(1, 1)


@dataclass(frozen=True)
class CliffordFiber:
    """The lagrangian torus fiber over an interior point of the triangle."""

    base: ActionCoords

    def lift(self, theta0, theta1) -> np.ndarray:
        """Coordinate lift at angle parameters (radians), vectorized."""
        r0, r1 = self.base.as_floats()
        theta0 = np.asarray(theta0, dtype=float)
        theta1 = np.asarray(theta1, dtype=float)
        shape = np.broadcast(theta0, theta1).shape
        z0 = math.sqrt(r0) * np.exp(1j * theta0) * np.ones(shape)
        z1 = math.sqrt(r1) * np.exp(1j * theta1) * np.ones(shape)
        z2 = math.sqrt(1.0 - r0 - r1) * np.ones(shape, dtype=complex)
        return np.stack([z0, z1, z2], axis=-1)

    def point_at(self, theta0: float, theta1: float) -> HomogeneousPoint:
        return normalize_point(self.lift(theta0, theta1))

    def tangent_frame(self, theta0, theta1) -> tuple[np.ndarray, np.ndarray]:
        """Lifts of the angle coordinate fields d/dtheta0, d/dtheta1."""
        z = self.lift(theta0, theta1)
        e1 = np.zeros_like(z)
        e2 = np.zeros_like(z)
        e1[..., 0] = 1j * z[..., 0]
        e2[..., 1] = 1j * z[..., 1]
        return e1, e2

    def surface(self) -> ParamSurface:
        return ParamSurface(
            lambda s, t: self.lift(_TWO_PI * np.asarray(s), _TWO_PI * np.asarray(t)),
            periodic=(True, True),
        )


def clifford_fiber(base: ActionCoords | tuple) -> CliffordFiber:
    """Fiber constructor; rejects boundary points of the triangle.

    Boundary fibers degenerate to circles or points and carry no torus
    parametrization, so they raise BoundaryFiber.
    """
    if not isinstance(base, ActionCoords):
        base = ActionCoords(*base)
    if not base.is_interior():
        raise BoundaryFiber(f"({base.r0}, {base.r1}) lies on the triangle boundary")
    return CliffordFiber(base)


# ---------------------------------------------------------------------------
# standard bounding discs
# ---------------------------------------------------------------------------


def standard_disc(fiber: CliffordFiber, cls: HomologyClass) -> DiscWithBoundary:
    """Standard bounding disc for a basis cycle d1, d2 or the diagonal d3.

    For d1 the disc is the family of d1-circles over the level segment from
    (r0, r1) down to (0, r1), radially smoothed; its area is r0.  The d2 disc
    mirrors it with area r1.  For d3 the disc lives in the affine chart around
    [0:0:1] with the diagonal boundary cycle theta0 = theta1; its area is
    r0 + r1 and its index is 2.  All three stay inside the chart {z2 != 0}.
    """
    r0, r1 = fiber.base.as_floats()
    r2 = 1.0 - r0 - r1
    a0, a1 = math.sqrt(r0), math.sqrt(r1)

    if cls == D1:
        def lift(s, t):
            s = np.asarray(s, dtype=float)
            ph = np.exp(2j * math.pi * np.asarray(t, dtype=float))
            shape = np.broadcast(s, ph).shape
            z0 = np.broadcast_to(a0 * s * ph, shape)
            z1 = np.broadcast_to(a1 + 0j, shape)
            z2 = np.broadcast_to(np.sqrt(1.0 - r0 * s * s - r1) + 0j, shape)
            return np.stack([z0, z1, z2], axis=-1)

        loop = lambda t: fiber.lift(_TWO_PI * np.asarray(t), 0.0)
        frame = lambda t: fiber.tangent_frame(_TWO_PI * np.asarray(t), 0.0)
    elif cls == D2:
        def lift(s, t):
            s = np.asarray(s, dtype=float)
            ph = np.exp(2j * math.pi * np.asarray(t, dtype=float))
            shape = np.broadcast(s, ph).shape
            z0 = np.broadcast_to(a0 + 0j, shape)
            z1 = np.broadcast_to(a1 * s * ph, shape)
            z2 = np.broadcast_to(np.sqrt(1.0 - r0 - r1 * s * s) + 0j, shape)
            return np.stack([z0, z1, z2], axis=-1)

        loop = lambda t: fiber.lift(0.0, _TWO_PI * np.asarray(t))
        frame = lambda t: fiber.tangent_frame(0.0, _TWO_PI * np.asarray(t))
    elif cls == D3:
        big0 = a0 / math.sqrt(r2)
        big1 = a1 / math.sqrt(r2)

        def lift(s, t):
            zeta = np.asarray(s, dtype=float) * np.exp(
                2j * math.pi * np.asarray(t, dtype=float)
            )
            one = np.ones_like(zeta)
            return np.stack([big0 * zeta, big1 * zeta, one], axis=-1)

        loop = lambda t: fiber.lift(_TWO_PI * np.asarray(t), _TWO_PI * np.asarray(t))
        frame = lambda t: fiber.tangent_frame(_TWO_PI * np.asarray(t), _TWO_PI * np.asarray(t))
    else:
        raise UnsupportedClass(f"no standard disc for class ({cls.p}, {cls.q})")

    return DiscWithBoundary(
        disc=ParamSurface(lift, periodic=(False, True)),
        boundary_loop=loop,
        frame=frame,
        chart=2,
    )


class FiberPeriods(NamedTuple):
    p1: float
    p2: float
    p1_error: float
    p2_error: float


def _mod_unit(x: float) -> float:
    return x - math.floor(x)


def fiber_periods(base: ActionCoords | tuple, quad: QuadSpec = QuadSpec(),
                  level: int = 1) -> FiberPeriods:
    """Periods of the fiber's basis cycles at integrality level ``level``.

    Each period is ``level`` times the standard-disc area, reduced mod 1 to
    [0, 1); at level 1 they recover the action coordinates of the base.
    """
    fiber = clifford_fiber(base)
    out = []
    errs = []
    for cls in (D1, D2):
        est = surface_symplectic_area(standard_disc(fiber, cls).disc, quad)
        out.append(_mod_unit(level * est.value))
        errs.append(level * est.error)
    return FiberPeriods(out[0], out[1], errs[0], errs[1])


def diagonal_period(base: ActionCoords | tuple, quad: QuadSpec = QuadSpec(),
                    level: int = 1) -> tuple[float, float]:
    """Period of the diagonal cycle d3 (sum of the basis periods mod 1)."""
    fiber = clifford_fiber(base)
    est = surface_symplectic_area(standard_disc(fiber, D3).disc, quad)
    return (_mod_unit(level * est.value), level * est.error)


# ---------------------------------------------------------------------------
# integral-level fibers: exact enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BSFiberSet:
    """Exact rational enumeration of integral fibers at a given level."""

    level: int
    closed: bool
    fibers: tuple[ActionCoords, ...]

    @property
    def count(self) -> int:
        return len(self.fibers)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "closed": self.closed,
            "count": self.count,
            "fibers": [
                [[f.r0.numerator, f.r0.denominator], [f.r1.numerator, f.r1.denominator]]
                for f in self.fibers
            ],
        }


def enumerate_bs_fibers(level: int, closed: bool = False) -> BSFiberSet:
    """All fibers whose level-scaled periods are integers, exactly.

    Interior ('open') fibers at level k are the lattice points (i/k, j/k)
    with i, j >= 1 and i + j <= k - 1; the closed count adds the boundary
    lattice (degenerate fibers), enumerated combinatorially without building
    torus parametrizations.  Everything is Fraction arithmetic -- no floats.
    """
    if level < 1:
        raise ValueError("level must be a positive integer")
    lo = 0 if closed else 1
    hi = level if closed else level - 1
    fibers = [
        ActionCoords(Fraction(i, level), Fraction(j, level))
        for i in range(lo, hi + 1)
        for j in range(lo, hi - i + 1)
    ]
    return BSFiberSet(level, closed, tuple(fibers))


class HilbertComparison(NamedTuple):
    count: int
    dimension: int
    match: bool


def hilbert_dimension(level: int, closed: bool = False) -> HilbertComparison:
    """Compare the fiber count with the matching space of plane sections.

    Interior fibers at level k are as many as degree-(k-3) homogeneous
    polynomials in three variables; closed fibers match degree k.  Dimensions
    below degree 0 are 0.
    """
    fibers = enumerate_bs_fibers(level, closed)
    deg = level if closed else level - 3
    dim = (deg + 1) * (deg + 2) // 2 if deg >= 0 else 0
    return HilbertComparison(fibers.count, dim, fibers.count == dim)


def interior_rational_grid(n: int) -> list[tuple[Fraction, Fraction]]:
    """The n-by-n interior rational grid of the triangle: (i/(n+2), j/(n+2)).

    Each axis index runs over 1..n, constrained to the open triangle.  When
    n + 2 is divisible by 3 the centroid (1/3, 1/3) is a grid point.
    """
    if n < 1:
        raise ValueError("grid size must be positive")
    den = n + 2
    return [
        (Fraction(i, den), Fraction(j, den))
        for i in range(1, n + 1)
        for j in range(1, n + 2 - i)
    ]


# ---------------------------------------------------------------------------
# lifted period map and its Jacobian
# ---------------------------------------------------------------------------


def lifted_period_map(base: ActionCoords | tuple) -> tuple[float, float]:
    """Continuous lift of the periods over the closed triangle.

    The lift is fixed by requiring both components nonnegative and vanishing
    on the edges where their cycles collapse; in action coordinates it is the
    identity, sending the corners to (0,0), (0,1), (1,0).
    """
    if not isinstance(base, ActionCoords):
        base = ActionCoords(*base)
    return base.as_floats()


class KSResult(NamedTuple):
    jacobian: np.ndarray
    determinant: float


def ks_jacobian(base: ActionCoords | tuple, step: float = 1e-4,
                period_fn: Callable | None = None) -> KSResult:
    """Central finite-difference Jacobian of the lifted period map.

    ``period_fn`` defaults to :func:`lifted_period_map`; passing a
    quadrature-backed period function gives an independent (slower, noisier)
    version of the same derivative.  Raises StencilOutOfDomain when the
    stencil would leave the open triangle.
    """
    if not isinstance(base, ActionCoords):
        base = ActionCoords(*base)
    r0, r1 = base.as_floats()
    pts = [(r0 + step, r1), (r0 - step, r1), (r0, r1 + step), (r0, r1 - step)]
    for (a, b) in pts:
        if a <= 0 or b <= 0 or a + b >= 1:
            raise StencilOutOfDomain(
                f"stencil point ({a}, {b}) leaves the open triangle"
            )
    fn = period_fn if period_fn is not None else lifted_period_map
    vals = [np.asarray(fn((a, b)), dtype=float) for (a, b) in pts]
    col0 = (vals[0] - vals[1]) / (2.0 * step)
    col1 = (vals[2] - vals[3]) / (2.0 * step)
    jac = np.stack([col0, col1], axis=-1)
    return KSResult(jac, float(np.linalg.det(jac)))


# ---------------------------------------------------------------------------
# graph deformations of a fiber
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeformationSpec:
    """A closed deformation one-form c1 dtheta0/2pi + c2 dtheta1/2pi + s df.

    ``c1``, ``c2`` are the closed-form class in area units: moving along the
    deformation shifts the d1/d2 periods by exactly (s*c1, s*c2).  ``f`` is a
    smooth real function of the two angle parameters (radians, 2pi-periodic);
    its differential is the exact part and moves no period.
    """

    c1: float
    c2: float
    f: Callable | None = None
    scale: float = 1.0
    fd_step: float = 1e-3


def _angle_gradient(f: Callable, theta0, theta1, h: float):
    def d(axis):
        if axis == 0:
            return (
                8.0 * (f(theta0 + h, theta1) - f(theta0 - h, theta1))
                - (f(theta0 + 2 * h, theta1) - f(theta0 - 2 * h, theta1))
            ) / (12.0 * h)
        return (
            8.0 * (f(theta0, theta1 + h) - f(theta0, theta1 - h))
            - (f(theta0, theta1 + 2 * h) - f(theta0, theta1 - 2 * h))
        ) / (12.0 * h)

    return d(0), d(1)


def _deformed_actions(fiber: CliffordFiber, spec: DeformationSpec, theta0, theta1):
    r0, r1 = fiber.base.as_floats()
    # one-form coefficients in area units per unit angle fraction
    if spec.f is None:
        g0 = np.zeros(np.broadcast(theta0, theta1).shape)
        g1 = np.zeros_like(g0)
    else:
        g0, g1 = _angle_gradient(spec.f, np.asarray(theta0, float),
                                 np.asarray(theta1, float), spec.fd_step)
    i0 = r0 + spec.scale * (spec.c1 + g0)
    i1 = r1 + spec.scale * (spec.c2 + g1)
    return i0, i1


def _check_stays_inside(fiber: CliffordFiber, spec: DeformationSpec,
                        check_grid: int = 64) -> None:
    grid = np.linspace(0.0, _TWO_PI, check_grid, endpoint=False)
    g0, g1 = np.meshgrid(grid, grid, indexing="ij")
    i0, i1 = _deformed_actions(fiber, spec, g0, g1)
    margin = 1e-9
    if np.min(i0) <= margin or np.min(i1) <= margin or np.max(i0 + i1) >= 1 - margin:
        raise LeavesTriangle("deformed action values exit the open moment triangle")


def deform_fiber(fiber: CliffordFiber, spec: DeformationSpec,
                 check_grid: int = 64) -> ParamSurface:
    """Graph torus of the deformation one-form over the fiber.

    The surface keeps the fiber's angle parametrization and shifts the action
    values pointwise by the one-form coefficients; closedness of the form
    makes the graph lagrangian.  Raises LeavesTriangle when any shifted action
    value exits the open triangle.
    """
    _check_stays_inside(fiber, spec, check_grid)

    def lift(s, t):
        theta0 = _TWO_PI * np.asarray(s, dtype=float)
        theta1 = _TWO_PI * np.asarray(t, dtype=float)
        i0, i1 = _deformed_actions(fiber, spec, theta0, theta1)
        z0 = np.sqrt(i0) * np.exp(1j * theta0)
        z1 = np.sqrt(i1) * np.exp(1j * theta1)
        z2 = np.sqrt(1.0 - i0 - i1) * np.ones_like(z0)
        return np.stack([z0, z1, z2], axis=-1)

    return ParamSurface(lift, periodic=(True, True))


def _deformation_tube(fiber: CliffordFiber, spec: DeformationSpec,
                      cls: HomologyClass) -> ParamSurface:
    """Tube between the base cycle and the deformed cycle, angle fixed."""
    r0, r1 = fiber.base.as_floats()

    def lift(s, t):
        tau = np.asarray(s, dtype=float)
        theta = _TWO_PI * np.asarray(t, dtype=float)
        if cls == D1:
            th0, th1 = theta, np.zeros_like(theta)
        else:
            th0, th1 = np.zeros_like(theta), theta
        i0_full, i1_full = _deformed_actions(fiber, spec, th0, th1)
        i0 = r0 + tau * (i0_full - r0)
        i1 = r1 + tau * (i1_full - r1)
        z0 = np.sqrt(i0) * np.exp(1j * th0)
        z1 = np.sqrt(i1) * np.exp(1j * th1)
        z2 = np.sqrt(1.0 - i0 - i1) * np.ones_like(z0)
        return np.stack([z0, z1, z2], axis=-1)

    return ParamSurface(lift, periodic=(False, True))


def deformed_fiber_periods(fiber: CliffordFiber, spec: DeformationSpec,
                           quad: QuadSpec = QuadSpec(), level: int = 1
                           ) -> FiberPeriods:
    """Periods of the deformed torus: standard-disc area plus tube area.

    The bounding chain for the deformed d_i cycle is the fiber's standard
    disc glued to the action-interpolation tube; areas add under quadrature.
    """
    if level < 1:
        raise ValueError("level must be positive")
    _check_stays_inside(fiber, spec)
    out, errs = [], []
    for cls in (D1, D2):
        disc_est = surface_symplectic_area(standard_disc(fiber, cls).disc, quad)
        tube_est = surface_symplectic_area(_deformation_tube(fiber, spec, cls), quad)
        out.append(_mod_unit(level * (disc_est.value + tube_est.value)))
        errs.append(level * (disc_est.error + tube_est.error))
    return FiberPeriods(out[0], out[1], errs[0], errs[1])
