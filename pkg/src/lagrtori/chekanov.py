"""Tori fibered over circles in the bitangent conic pencil.

The pencil is {z0 z1 = eps * z2^2}; every smooth member (eps not 0 or
infinity) is a conic through the two poles [1:0:0] and [0:1:0], where all
members are mutually tangent.  The circle action

    (z0, z1, z2) |-> (e^{i s} z0, e^{-i s} z1, z2)

preserves each member, and its orbits are the level circles of the in-conic
disc area measured from the pole [1:0:0].  A torus is assembled by choosing,
on each conic over a parameter circle {a e^{i t} - mu}, the orbit whose
anchored disc has area 1 + delta; because that area level is a function of
the global circle-action moment, the assembled torus is lagrangian.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ConingDegenerate,
    DegenerateFamily,
    RootNotBracketed,
    SingularConic,
)
from .geometry import (
    HomogeneousPoint,
    ParamSurface,
    QuadSpec,
    _unit_rows,
    normalize_point,
    surface_symplectic_area,
)

_TWO_PI = 2.0 * math.pi
_EPS_FLOOR = 1e-12
_CONE_FLOOR = 1e-2


def _require_smooth(eps: complex) -> complex:
    eps = complex(eps)
    if not (np.isfinite(eps.real) and np.isfinite(eps.imag)):
        raise SingularConic("pencil parameter must be finite")
    if abs(eps) <= _EPS_FLOOR:
        raise SingularConic("pencil parameter 0 names the singular member")
    return eps


def conic_equation_residual(eps: complex, z) -> np.ndarray:
    """|z0 z1 - eps z2^2| on unit representatives (vectorized)."""
    z = _unit_rows(z)
    return np.abs(z[..., 0] * z[..., 1] - eps * z[..., 2] ** 2)


def radial_area(eps_abs: float, rho) -> np.ndarray:
    """Area of the in-conic disc {|lambda| <= rho} anchored at [1:0:0].

    The lift (1, eps lambda^2, lambda) has radially symmetric norm, so the
    area is the boundary term of the potential: with x = rho^2 and
    e = |eps|,  A = (x + 2 e^2 x^2) / (1 + x + e^2 x^2), increasing from 0
    to the total conic area 2.
    """
    x = np.asarray(rho, dtype=float) ** 2
    e2 = eps_abs * eps_abs
    return (x + 2.0 * e2 * x * x) / (1.0 + x + e2 * x * x)


def level_radius(eps_abs, level) -> np.ndarray:
    """Inverse of :func:`radial_area`: radius of the level-area orbit.

    Solves the quadratic e^2 (2 - level) x^2 + (1 - level) x - level = 0 for
    x = rho^2, taking the branch of the quadratic formula that avoids
    cancellation on either sign of (1 - level).
    """
    ell = np.asarray(level, dtype=float)
    if np.any(ell <= 0.0) or np.any(ell >= 2.0):
        raise ValueError("area level must lie strictly between 0 and 2")
    e2 = np.asarray(eps_abs, dtype=float) ** 2
    b = 1.0 - ell
    root = np.sqrt(b * b + 4.0 * ell * (2.0 - ell) * e2)
    denom = 2.0 * np.maximum(e2, np.finfo(float).tiny) * (2.0 - ell)
    x = np.where(b > 0.0, 2.0 * ell / (b + root), (root - b) / denom)
    return np.sqrt(x)


@dataclass(frozen=True)
class ConicParametrization:
    """Equivariant parametrization of a smooth pencil member.

    ``lift(level, s)`` maps the in-conic disc area level in (0, 2) and the
    orbit angle fraction ``s`` to coordinate lifts; the circle action at
    angle alpha is intertwined with s |-> s - alpha / 2 pi.
    """

    eps: complex

    def lam(self, level, s) -> np.ndarray:
        rho = level_radius(abs(self.eps), level)
        return rho * np.exp(2j * math.pi * np.asarray(s, dtype=float))

    def lift(self, level, s) -> np.ndarray:
        lam = np.asarray(self.lam(level, s), dtype=complex)
        one = np.ones_like(lam)
        return np.stack([one, self.eps * lam * lam, lam], axis=-1)

    def point_at(self, level: float, s: float) -> HomogeneousPoint:
        return normalize_point(self.lift(level, s))


def conic_parametrize(eps: complex) -> ConicParametrization:
    """Parametrization of {z0 z1 = eps z2^2}; SingularConic for eps ~ 0."""
    return ConicParametrization(_require_smooth(eps))


def conic_disc_surface(eps: complex, rho: float, inverted: bool = False) -> ParamSurface:
    """In-conic disc bounded by the radius-``rho`` orbit, as a surface.

    With ``inverted`` false the disc is anchored at [1:0:0] (lambda = 0);
    inverted uses the chart around the other pole [0:1:0] and covers the
    complementary side.
    """
    eps = _require_smooth(eps)

    if not inverted:
        def lift(s, t):
            lam = rho * np.asarray(s, dtype=float) * np.exp(
                2j * math.pi * np.asarray(t, dtype=float)
            )
            one = np.ones_like(lam)
            return np.stack([one, eps * lam * lam, lam], axis=-1)
    else:
        inv = 1.0 / rho

        def lift(s, t):
            w = inv * np.asarray(s, dtype=float) * np.exp(
                2j * math.pi * np.asarray(t, dtype=float)
            )
            one = np.ones_like(w)
            return np.stack([w * w, eps * one, w], axis=-1)

    return ParamSurface(lift, periodic=(False, True))


def conic_total_area(eps: complex, quad: QuadSpec = QuadSpec()) -> tuple[float, float]:
    """Total symplectic area of a smooth member, by two-chart quadrature."""
    eps = _require_smooth(eps)
    mid = 1.0 / math.sqrt(abs(eps))  # the area-bisecting orbit
    a1 = surface_symplectic_area(conic_disc_surface(eps, mid), quad)
    a2 = surface_symplectic_area(conic_disc_surface(eps, mid, inverted=True), quad)
    return (a1.value + a2.value, a1.error + a2.error)


class Anchor(str, enum.Enum):
    NEAR_Z0 = "z0"
    NEAR_Z1 = "z1"


@dataclass(frozen=True)
class ConicCircle:
    """A circle orbit on a conic selected by its anchored disc area."""

    eps: complex
    delta: float
    anchor: Anchor
    rho: float
    level: float  # disc area from the [1:0:0] side, in (0, 2)

    def loop(self, t) -> np.ndarray:
        lam = self.rho * np.exp(2j * math.pi * np.asarray(t, dtype=float))
        one = np.ones_like(lam)
        return np.stack([one, self.eps * lam * lam, lam], axis=-1)

    def disc(self) -> ParamSurface:
        """The anchored in-conic disc whose area is 1 + delta."""
        return conic_disc_surface(self.eps, self.rho,
                                  inverted=self.anchor is Anchor.NEAR_Z1)


def conic_circle(eps: complex, delta: float, anchor: Anchor | str = Anchor.NEAR_Z0,
                 tol: float = 1e-12) -> ConicCircle:
    """Orbit whose anchored in-conic disc has area 1 + delta.

    The anchor names which pole's disc is measured; the default [1:0:0]
    choice is a convention recorded here and exposed as a flag.  The radius
    is found by root-finding on the monotone area-level function.
    """
    eps = _require_smooth(eps)
    if not -1.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between -1 and 1")
    anchor = Anchor(anchor)
    target = 1.0 + delta if anchor is Anchor.NEAR_Z0 else 1.0 - delta
    e = abs(eps)

    fn = lambda rho: radial_area(e, rho) - target
    lo, hi = 1e-9, 1.0
    expansions = 0
    while fn(hi) < 0.0:
        hi *= 4.0
        expansions += 1
        if expansions > 200:
            raise RootNotBracketed("area-level equation could not be bracketed")
    if fn(lo) > 0.0:
        raise RootNotBracketed("area-level equation could not be bracketed")
    rho = float(brentq(fn, lo, hi, xtol=tol, rtol=8.9e-16))
    return ConicCircle(eps, delta, anchor, rho, float(radial_area(e, rho)))


# ---------------------------------------------------------------------------
# torus families over pencil-parameter circles
# ---------------------------------------------------------------------------


class TorusType(enum.Enum):
    CLIFFORD = "clifford"
    CHEKANOV = "chekanov"
    BOUNDARY = "boundary"


_BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class ChekanovParams:
    """Parameters (a, mu, delta) of a torus over the circle {a e^{it} - mu}."""

    a: float
    mu: complex
    delta: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("circle radius a must be positive")
        if abs(self.mu) <= _EPS_FLOOR:
            raise ValueError("circle center mu must be nonzero")
        if not -1.0 < self.delta < 1.0:
            raise ValueError("delta must lie strictly between -1 and 1")

    def eps_of(self, t) -> np.ndarray:
        return self.a * np.exp(2j * math.pi * np.asarray(t, dtype=float)) - self.mu


def classify_type(params: ChekanovParams) -> TorusType:
    """Circle inside (a < |mu|), outside (a > |mu|) or through the origin."""
    gap = params.a - abs(params.mu)
    if abs(gap) <= _BOUNDARY_TOL:
        return TorusType.BOUNDARY
    return TorusType.CLIFFORD if gap > 0 else TorusType.CHEKANOV


def chekanov_torus(params: ChekanovParams, anchor: Anchor | str = Anchor.NEAR_Z0,
                   smoothness_step: float = 3e-5) -> ParamSurface:
    """The lagrangian torus over the pencil-parameter circle.

    For each t the fiber circle is the conic_circle of the member at
    eps(t) = a e^{2 pi i t} - mu, with the orbit radius obtained from the
    closed-form level_radius inverse.  Raises DegenerateFamily when the
    parameter circle passes through the singular member (a = |mu| within
    1e-9).  The differencing step is kept small because the radius varies
    steeply in t when the parameter circle passes near the singular member.
    """
    if classify_type(params) is TorusType.BOUNDARY:
        raise DegenerateFamily("parameter circle passes through the singular member")
    anchor = Anchor(anchor)
    target = 1.0 + params.delta if anchor is Anchor.NEAR_Z0 else 1.0 - params.delta

    def lift(s, t):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        eps = params.eps_of(t)
        lam = level_radius(np.abs(eps), target) * np.exp(2j * math.pi * s)
        eps, lam = np.broadcast_arrays(eps, lam)
        one = np.ones_like(lam)
        return np.stack([one, eps * lam * lam, lam], axis=-1)

    # axis 0 is the pencil-circle angle t, axis 1 the orbit angle s
    return ParamSurface(lambda u, v: lift(v, u), periodic=(True, True),
                        smoothness_step=smoothness_step)


# ---------------------------------------------------------------------------
# periods of the two torus cycles
# ---------------------------------------------------------------------------


def cone_disc(loop_lift: Callable[[np.ndarray], np.ndarray], basepoint: np.ndarray,
              check_grid: int = 201, smoothness_step: float = 2.5e-4) -> ParamSurface:
    """Disc bounding a loop by linear coning of its unit lift to a basepoint.

    Raises ConingDegenerate when the chord between the basepoint and the loop
    passes too close to the origin of coordinate space, which would puncture
    the disc projectively.
    """
    base = _unit_rows(np.asarray(basepoint, dtype=complex))

    def lift(s, t):
        s = np.asarray(s, dtype=float)
        loop = _unit_rows(np.asarray(loop_lift(np.asarray(t, dtype=float)), dtype=complex))
        return (1.0 - s[..., None]) * base + s[..., None] * loop

    surf = ParamSurface(lift, periodic=(False, True), smoothness_step=smoothness_step)
    g = np.linspace(0.0, 1.0, check_grid)
    mesh_s, mesh_t = np.meshgrid(g, g, indexing="ij")
    low = float(np.min(np.linalg.norm(surf._eval(mesh_s, mesh_t), axis=-1)))
    if low < _CONE_FLOOR:
        raise ConingDegenerate(f"coning chord norm drops to {low:.3e}")
    return surf


class ChekanovPeriods(NamedTuple):
    p_orbit: float
    p_section: float
    orbit_error: float
    section_error: float
    basepoint: np.ndarray


def _mod_unit(x: float) -> float:
    return x - math.floor(x)


def torus_periods_chekanov(params: ChekanovParams, quad: QuadSpec = QuadSpec(),
                           seed: int = 0, retries: int = 8,
                           anchor: Anchor | str = Anchor.NEAR_Z0) -> ChekanovPeriods:
    """Periods of the orbit cycle and a fixed section cycle, mod 1.

    The orbit period is the anchored in-conic disc area (1 + delta reduced);
    the section loop is the s = 0 curve of the torus, coned linearly to a
    seeded random basepoint.  Distinct basepoints change the section area by
    whole numbers only.  The section class is the s = 0 convention; combined
    classes (section plus or minus the orbit) are reported by the scan.
    """
    anchor = Anchor(anchor)
    circle0 = conic_circle(complex(params.eps_of(0.0)), params.delta, anchor)
    orbit_est = surface_symplectic_area(circle0.disc(), quad)

    torus = chekanov_torus(params, anchor)

    def section_lift(t):
        return torus._eval(np.asarray(t, dtype=float), np.zeros_like(np.asarray(t, dtype=float)))

    rng = np.random.RandomState(seed)
    last_exc: Exception | None = None
    for _ in range(max(1, retries)):
        base = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        try:
            disc = cone_disc(section_lift, base)
        except ConingDegenerate as exc:
            last_exc = exc
            continue
        section_est = surface_symplectic_area(disc, quad)
        return ChekanovPeriods(
            _mod_unit(orbit_est.value),
            _mod_unit(section_est.value),
            orbit_est.error,
            section_est.error,
            _unit_rows(base),
        )
    raise ConingDegenerate(
        f"no usable coning basepoint after {retries} attempts"
    ) from last_exc


# ---------------------------------------------------------------------------
# integrality scan over the (a, delta) grid
# ---------------------------------------------------------------------------


def _lattice_distance(x: float) -> float:
    return abs(x - round(x))


@dataclass(frozen=True)
class ScanRow:
    a: float
    delta: float
    p_orbit: float
    p_section: float
    defect: float
    defect_orbit: float
    defect_section: tuple[float, float, float]  # section - orbit, section, section + orbit


@dataclass(frozen=True)
class ScanReport:
    mu: complex
    rows: tuple[ScanRow, ...]
    min_defect: float
    argmin: tuple[float, float]

    def to_csv(self) -> str:
        lines = ["a,delta,p_orbit,p_section,defect"]
        for r in self.rows:
            lines.append(
                f"{r.a!r},{r.delta!r},{r.p_orbit!r},{r.p_section!r},{r.defect!r}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "mu": [self.mu.real, self.mu.imag],
            "rows": [
                {
                    "a": r.a,
                    "delta": r.delta,
                    "p_orbit": r.p_orbit,
                    "p_section": r.p_section,
                    "defect": r.defect,
                    "defect_orbit": r.defect_orbit,
                    "defect_section_combined": list(r.defect_section),
                }
                for r in self.rows
            ],
            "min_defect": self.min_defect,
            "argmin": list(self.argmin),
        }


def _scan_point(mu: complex, a: float, delta: float, quad: QuadSpec,
                seed: int) -> ScanRow:
    periods = torus_periods_chekanov(ChekanovParams(a, mu, delta), quad, seed=seed)
    d_orb = _lattice_distance(3.0 * periods.p_orbit)
    combos = tuple(
        _lattice_distance(3.0 * (periods.p_section + m * periods.p_orbit))
        for m in (-1, 0, 1)
    )
    defect = max(d_orb, min(combos))
    return ScanRow(a, delta, periods.p_orbit, periods.p_section, defect, d_orb, combos)


def canonical_bs_scan(mu: complex, a_grid, delta_grid, quad: QuadSpec = QuadSpec(),
                      seed: int = 0, workers: int = 1) -> ScanReport:
    """Tripled-period integrality defects over an (a, delta) grid.

    For each grid torus the defect is max(orbit defect, best combined section
    defect); the report carries the grid minimum and its location.  The grid
    must stay in the a < |mu| regime.  Rows are computed in grid order
    (optionally by a thread pool) so reports are deterministic.
    """
    mu = complex(mu)
    a_grid = [float(a) for a in a_grid]
    delta_grid = [float(d) for d in delta_grid]
    if not a_grid or not delta_grid:
        raise ValueError("scan grids must be nonempty")
    if max(a_grid) >= abs(mu) - _BOUNDARY_TOL:
        raise ValueError("a_grid must stay strictly inside (0, |mu|)")
    if min(a_grid) <= 0:
        raise ValueError("a_grid must be positive")
    tasks = [(a, d) for a in a_grid for d in delta_grid]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda ad: _scan_point(mu, ad[0], ad[1], quad, seed), tasks))
    else:
        rows = [_scan_point(mu, a, d, quad, seed) for a, d in tasks]
    best = min(range(len(rows)), key=lambda i: rows[i].defect)
    return ScanReport(
        mu, tuple(rows), rows[best].defect, (rows[best].a, rows[best].delta)
    )
