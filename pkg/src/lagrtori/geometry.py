"""Geometry of the complex projective plane with an integrally normalized form.

Points are stored as unit-norm representatives of homogeneous coordinate
triples; tangent vectors are horizontal lifts (orthogonal to the base
representative).  The two-form is scaled so that a projective line has
symplectic area exactly 1, which fixes the coordinate expression

    omega_p(u, v) = -(1/pi) * Im <u, v>,    <a, b> = sum_i a_i conj(b_i)

for unit-norm ``p`` and horizontal ``u``, ``v``.  The sign is pinned by the
line-area test in the suite, not by an external convention.

Surface areas are computed by pulling the form back through finite
differences of a parametrized lift and integrating with tensor
Gauss-Legendre quadrature; two refinement levels give a Richardson-style
error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import GaugeViolation, NonConvergent, NotUnitary, ZeroVector

# Single global constant multiplying Im<u, v>; its magnitude makes a line
# have unit area and its sign makes complex curves positively oriented.
FS_SCALE = -1.0 / math.pi

_HORIZONTALITY_TOL = 1e-10
_UNITARY_TOL = 1e-10


def hermdot(a, b):
    """Hermitian product sum_i a_i * conj(b_i) along the last axis."""
    return np.sum(np.asarray(a) * np.conj(np.asarray(b)), axis=-1)


def fs_pullback_raw(z, u, v):
    """Value of the form on raw (not necessarily unit or horizontal) lifts.

    ``z`` is a lift of the base point and ``u``, ``v`` are derivatives of a
    family of lifts; the expression is invariant under smooth rescaling and
    rephasing of the lift, so callers may differentiate any convenient
    parametrization.  Shapes broadcast; the coordinate axis is the last one.
    """
    n = hermdot(z, z).real
    huv = hermdot(u, v)
    huz = hermdot(u, z)
    hzv = hermdot(z, v)
    return FS_SCALE * np.imag((huv * n - huz * hzv) / (n * n))


def _unit_rows(z):
    z = np.asarray(z, dtype=complex)
    scale = np.max(np.abs(z), axis=-1, keepdims=True)
    if np.any(scale < 1e-300):
        raise ZeroVector("all homogeneous components below 1e-300 in magnitude")
    w = z / scale
    return w / np.linalg.norm(w, axis=-1, keepdims=True)


@dataclass(frozen=True)
class HomogeneousPoint:
    """A point of the projective plane held as a unit-norm coordinate triple."""

    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex).reshape(3)
        object.__setattr__(self, "z", _unit_rows(z))
        self.z.setflags(write=False)

    def projectively_equal(self, other: "HomogeneousPoint", tol: float = 1e-10) -> bool:
        """True when the two representatives differ only by a unit phase."""
        return abs(abs(hermdot(self.z, other.z)) - 1.0) <= tol

    def canonical(self) -> np.ndarray:
        """Representative rephased so its first non-negligible coordinate is
        real and positive; used for serialization only, never for calculus."""
        return canonical_gauge(self.z)

    def __repr__(self):  # short, for debugging output
        parts = ", ".join(f"{c.real:+.6f}{c.imag:+.6f}j" for c in self.z)
        return f"HomogeneousPoint([{parts}])"


def canonical_gauge(z) -> np.ndarray:
    z = _unit_rows(z)
    idx = int(np.argmax(np.abs(z) > 1e-9))
    phase = z[idx] / abs(z[idx])
    return z / phase


def normalize_point(z) -> HomogeneousPoint:
    """Normalize a coordinate triple to a unit representative.

    Only a positive real rescaling is applied, so a smooth family of input
    lifts stays smooth.  Raises ZeroVector when every component is below
    1e-300 in magnitude.
    """
    return HomogeneousPoint(np.asarray(z, dtype=complex))


@dataclass(frozen=True)
class TangentVector:
    """A horizontal tangent lift at a base point.

    Horizontality (<u, z> = 0 within 1e-10) is enforced at construction; use
    :meth:`project` to horizontalize an arbitrary lift.
    """

    base: HomogeneousPoint
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex).reshape(3)
        defect = abs(hermdot(u, self.base.z))
        scale = max(1.0, float(np.linalg.norm(u)))
        if defect > _HORIZONTALITY_TOL * scale:
            raise GaugeViolation(f"tangent lift is not horizontal (defect {defect:.3e})")
        object.__setattr__(self, "u", u)
        self.u.setflags(write=False)

    @classmethod
    def project(cls, base: HomogeneousPoint, raw) -> "TangentVector":
        raw = np.asarray(raw, dtype=complex).reshape(3)
        return cls(base, raw - hermdot(raw, base.z) * base.z)


def fs_form_value(p: HomogeneousPoint, u: TangentVector, v: TangentVector) -> float:
    """Evaluate the form on two horizontal tangent vectors based at ``p``."""
    for vec in (u, v):
        if not vec.base.projectively_equal(p, 1e-9):
            raise GaugeViolation("tangent vector is not based at the given point")
        if abs(hermdot(vec.u, p.z)) > 1e-8 * max(1.0, float(np.linalg.norm(vec.u))):
            raise GaugeViolation("tangent vector fails horizontality at this gauge")
    return float(fs_pullback_raw(p.z, u.u, v.u))


def moment_map(p):
    """Squared moduli (|z0|^2, |z1|^2) of the unit representative.

    Accepts a HomogeneousPoint (returns a tuple) or an array of raw lifts
    with trailing axis 3 (returns an array with trailing axis 2).
    """
    if isinstance(p, HomogeneousPoint):
        return (float(abs(p.z[0]) ** 2), float(abs(p.z[1]) ** 2))
    z = _unit_rows(np.asarray(p, dtype=complex))
    return np.stack([np.abs(z[..., 0]) ** 2, np.abs(z[..., 1]) ** 2], axis=-1)


# ---------------------------------------------------------------------------
# parametrized surfaces and quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamSurface:
    """A surface given by a lift map on the unit square.

    ``lift(s, t)`` must accept broadcasting numpy arrays and return an array
    of homogeneous coordinate triples along the last axis.  The lift need not
    be unit-norm but must be smooth (no phase jumps between neighboring
    samples).  Axes flagged periodic are evaluated outside [0, 1] by the same
    formula; non-periodic axes are differenced with a stencil clamped inside
    the domain.
    """

    lift: Callable[..., np.ndarray]
    periodic: tuple[bool, bool] = (False, False)
    smoothness_step: float = 1e-3

    def point_at(self, s: float, t: float) -> HomogeneousPoint:
        return normalize_point(np.asarray(self.lift(np.float64(s), np.float64(t)), dtype=complex))

    def _eval(self, s, t):
        return np.asarray(self.lift(s, t), dtype=complex)


@dataclass(frozen=True)
class QuadSpec:
    """Tensor Gauss-Legendre quadrature parameters.

    ``nodes_per_axis`` is the base resolution; each refinement level doubles
    it, and the last two levels provide the error estimate.
    """

    nodes_per_axis: int = 32
    refinement_levels: int = 2
    max_disagreement: float = 1e-6

    def __post_init__(self):
        if self.nodes_per_axis < 4:
            raise ValueError("nodes_per_axis must be at least 4")
        if self.refinement_levels < 1:
            raise ValueError("refinement_levels must be positive")


class AreaEstimate(NamedTuple):
    value: float
    error: float


def _gl_nodes_01(n: int):
    x, w = leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def surface_lift_partial(surface: ParamSurface, s, t, axis: int) -> np.ndarray:
    """Fourth-order central difference of the lift along one axis."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    x = s if axis == 0 else t
    h0 = surface.smoothness_step
    if surface.periodic[axis]:
        h = np.full(x.shape, h0)
    else:
        margin = np.minimum(x, 1.0 - x)
        h = np.minimum(h0, margin * 0.4999)
        if np.any(h <= 1e-12):
            raise ValueError("finite-difference stencil pinched at the domain edge")

    def ev(off):
        if axis == 0:
            return surface._eval(s + off, t)
        return surface._eval(s, t + off)

    hh = h[..., None]
    return (8.0 * (ev(h) - ev(-h)) - (ev(2.0 * h) - ev(-2.0 * h))) / (12.0 * hh)


def central_difference(surface: ParamSurface, s, t, axis: int, h: float) -> np.ndarray:
    """Plain second-order central difference (used by smoothness tests)."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)

    def ev(off):
        if axis == 0:
            return surface._eval(s + off, t)
        return surface._eval(s, t + off)

    return (ev(h) - ev(-h)) / (2.0 * h)


def surface_form_grid(surface: ParamSurface, s, t) -> np.ndarray:
    """Pullback of the form onto parameter space, sampled on arrays."""
    z = surface._eval(s, t)
    u = surface_lift_partial(surface, s, t, 0)
    v = surface_lift_partial(surface, s, t, 1)
    return fs_pullback_raw(z, u, v)


def _area_once(surface: ParamSurface, n: int, weight_fn=None) -> float:
    xs, ws = _gl_nodes_01(n)
    mesh_s, mesh_t = np.meshgrid(xs, xs, indexing="ij")
    k = surface_form_grid(surface, mesh_s, mesh_t)
    if weight_fn is not None:
        k = k * weight_fn(surface, mesh_s, mesh_t)
    return float(np.einsum("i,j,ij->", ws, ws, k))


def surface_symplectic_area(surface: ParamSurface, quad: QuadSpec = QuadSpec(),
                            weight_fn=None) -> AreaEstimate:
    """Symplectic area of a parametrized surface.

    Parameters
    ----------
    surface : ParamSurface
        Surface whose lift is smooth on (a neighborhood of) the unit square.
    quad : QuadSpec
        Quadrature resolution and refinement policy.
    weight_fn : callable, optional
        Extra scalar factor ``weight_fn(surface, s, t)`` multiplied into the
        integrand (used for weighted integrals of functions against the form).

    Returns
    -------
    AreaEstimate
        ``value`` from the finest level and ``error`` as the last two levels'
        disagreement.  Raises NonConvergent when the disagreement exceeds
        ``quad.max_disagreement``.
    """
    values = [
        _area_once(surface, quad.nodes_per_axis * (2 ** lvl), weight_fn)
        for lvl in range(quad.refinement_levels)
    ]
    value = values[-1]
    if len(values) == 1:
        return AreaEstimate(value, math.inf)
    err = abs(values[-1] - values[-2])
    if err > quad.max_disagreement:
        raise NonConvergent(
            f"refinements disagree by {err:.3e} > {quad.max_disagreement:.1e}"
        )
    return AreaEstimate(value, err)


# ---------------------------------------------------------------------------
# unitary action and reference surfaces
# ---------------------------------------------------------------------------


def _check_unitary(mat) -> np.ndarray:
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (3, 3):
        raise NotUnitary("expected a 3x3 matrix")
    defect = float(np.linalg.norm(mat.conj().T @ mat - np.eye(3)))
    if defect > _UNITARY_TOL:
        raise NotUnitary(f"unitarity defect {defect:.3e} exceeds {_UNITARY_TOL:.1e}")
    return mat


def apply_unitary(mat, target):
    """Apply a projective unitary to a point or to a whole surface.

    The matrix must satisfy ||U*U - I|| <= 1e-10.  For surfaces the returned
    object composes the lift with the matrix, so all downstream quadrature and
    differencing see the moved surface.
    """
    mat = _check_unitary(mat)
    if isinstance(target, HomogeneousPoint):
        return normalize_point(mat @ target.z)
    if isinstance(target, ParamSurface):
        inner = target.lift

        def moved(s, t):
            return np.einsum("ij,...j->...i", mat, np.asarray(inner(s, t), dtype=complex))

        return ParamSurface(moved, target.periodic, target.smoothness_step)
    raise TypeError("apply_unitary acts on HomogeneousPoint or ParamSurface")


def projective_line_surface(mat=None) -> ParamSurface:
    """The line {z2 = 0} (or its image under a unitary), complex-oriented."""

    def lift(s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        ang = 0.5 * math.pi * s
        ph = np.exp(2j * math.pi * t)
        out = np.stack(
            [np.cos(ang) + 0j, np.sin(ang) * ph, np.zeros_like(ph)], axis=-1
        )
        return out

    surf = ParamSurface(lift, periodic=(False, True))
    if mat is None:
        return surf
    return apply_unitary(mat, surf)


def chordal_distance(z, w) -> np.ndarray:
    """Projective (Fubini-Study chordal) distance between unit-norm rows."""
    ip = np.abs(hermdot(z, w)) ** 2
    return np.sqrt(np.maximum(0.0, 1.0 - ip))


def phase_aligned_residual(z, w) -> np.ndarray:
    """Norm of the gauge-optimal difference of unit lifts (vectorized).

    Rotates w's phase onto z before subtracting, so near-coincident points
    are resolved far below the sqrt-of-ulp floor of the chordal formula.
    """
    z = _unit_rows(z)
    w = _unit_rows(w)
    pairing = hermdot(w, z)
    mag = np.abs(pairing)
    phase = np.where(mag > 0, pairing / np.where(mag > 0, mag, 1.0), 1.0 + 0j)
    return np.linalg.norm(z - w * np.conj(phase)[..., None], axis=-1)


def random_unitary(rng: np.random.RandomState) -> np.ndarray:
    """Haar-ish random unitary from a QR factorization (for tests)."""
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))
