"""Hamiltonian flows of Hermitian symbols and displacement certificates.

Every flow used here is the projectivization of a one-parameter unitary
group exp(i t A) with A Hermitian; the induced projective isotopy is the
Hamiltonian flow of the symbol function <Az, z>/<z, z>.  Working with the
exact unitaries (instead of integrating an ODE) makes displacement
certificates exact wherever moment-image arithmetic decides them, and keeps
the sampled checks honest elsewhere.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .chekanov import Anchor, ChekanovParams, TorusType, chekanov_torus, classify_type
from .clifford import ActionCoords, CliffordFiber, clifford_fiber
from .errors import (
    CriticalPointMiscount,
    InternalContradiction,
    NormalizationFailure,
    NotChekanovType,
    NotHermitian,
)
from .geometry import (
    ParamSurface,
    QuadSpec,
    _unit_rows,
    chordal_distance,
    hermdot,
    moment_map,
    phase_aligned_residual,
    surface_symplectic_area,
)
from .maslov import MonotoneWitness, is_monotone
from .serialize import complex_pair, number_or_rational

_HERM_TOL = 1e-12


@dataclass(frozen=True)
class HermitianSymbol:
    """A 3x3 Hermitian matrix viewed as a real function on the plane."""

    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        if a.shape != (3, 3):
            raise NotHermitian(f"expected a 3x3 matrix, got {a.shape}")
        if np.max(np.abs(a - a.conj().T)) > _HERM_TOL:
            raise NotHermitian("matrix is not self-adjoint within 1e-12")
        object.__setattr__(self, "matrix", a)

    def value(self, z) -> np.ndarray:
        """Rayleigh quotient <Az, z>/<z, z> on raw lifts (vectorized)."""
        z = np.asarray(z, dtype=complex)
        num = hermdot(np.einsum("ij,...j->...i", self.matrix, z), z)
        return num.real / hermdot(z, z).real

    def gradient_residual(self, z) -> np.ndarray:
        """Norm of Az - f(z) z on unit lifts; zero exactly at critical points."""
        z = _unit_rows(z)
        az = np.einsum("ij,...j->...i", self.matrix, z)
        f = hermdot(az, z).real
        return np.linalg.norm(az - f[..., None] * z, axis=-1)

    def to_json(self) -> dict:
        return {"matrix": [[complex_pair(v) for v in row] for row in self.matrix]}


def diagonal_symbol(d0: float, d1: float, d2: float) -> HermitianSymbol:
    return HermitianSymbol(np.diag([d0, d1, d2]).astype(complex))


def swap_symbol(j: int, k: int) -> HermitianSymbol:
    """Symbol of the (j, k) coordinate-exchange block."""
    if not (0 <= j < k <= 2):
        raise ValueError("need coordinate indices 0 <= j < k <= 2")
    a = np.zeros((3, 3), dtype=complex)
    a[j, k] = a[k, j] = 1.0
    return HermitianSymbol(a)


def symbol_flow(symbol: HermitianSymbol, t: float) -> np.ndarray:
    """The unitary exp(i t A), computed by diagonalization."""
    w, v = np.linalg.eigh(symbol.matrix)
    return (v * np.exp(1j * t * w)) @ v.conj().T


class CertificateMethod(str, enum.Enum):
    MOMENT_IMAGE_DISJOINT = "MomentImageDisjoint"
    SAMPLED_DISTANCE = "SampledDistance"


@dataclass(frozen=True)
class DisplacementCertificate:
    """Witness that a specific flow moves a torus entirely off itself."""

    symbol: HermitianSymbol
    time: float
    separation: float
    method: CertificateMethod
    samples: int
    detail: dict

    def __post_init__(self):
        if not self.separation > 0:
            raise ValueError("a certificate requires strictly positive separation")

    def to_json(self) -> dict:
        return {
            "method": self.method.value,
            "separation": self.separation,
            "samples": self.samples,
            "flow": {"symbol": self.symbol.to_json()["matrix"], "time": self.time},
            "detail": self.detail,
        }


@dataclass(frozen=True)
class NotDisplacedByTheseFlows:
    """All coordinate-swap flows fix the moment value; no verdict implied."""

    base: tuple


@dataclass(frozen=True)
class Inconclusive:
    """Sampled tori came closer than the separation threshold."""

    separation: float
    samples: int


def displace_clifford(base: ActionCoords):
    """Displacement of a toric fiber by a coordinate-swap flow, if any.

    Each swap (j, k) at time pi/2 induces the exact exchange of the j-th and
    k-th coordinates, carrying the fiber over (r0, r1) to the fiber over the
    swapped action value; fibers over distinct base points are disjoint, so
    inequality of the two moment values is an exact certificate.  All three
    swaps fix the moment value only at the symmetric point (1/3, 1/3).
    """
    if not base.is_interior():
        raise ValueError("displacement test expects an interior fiber")
    r = (base.r0, base.r1, base.r2)
    images = {
        (0, 1): (r[1], r[0]),
        (1, 2): (r[0], r[2]),
        (0, 2): (r[2], r[1]),
    }
    for (j, k), img in images.items():
        if img != (r[0], r[1]):
            gap = math.hypot(float(img[0] - r[0]), float(img[1] - r[1]))
            return DisplacementCertificate(
                symbol=swap_symbol(j, k),
                time=math.pi / 2.0,
                separation=gap,
                method=CertificateMethod.MOMENT_IMAGE_DISJOINT,
                samples=0,
                detail={
                    "source_moment": [number_or_rational(r[0]), number_or_rational(r[1])],
                    "image_moment": [number_or_rational(img[0]), number_or_rational(img[1])],
                    "swap": [j, k],
                },
            )
    return NotDisplacedByTheseFlows(base=(r[0], r[1]))


def _min_pairwise_chordal(a: np.ndarray, b: np.ndarray, block: int = 2048) -> float:
    """Minimum chordal distance between two unit-lift sample clouds."""
    worst = 0.0  # largest squared pairing magnitude = closest pair
    bt = np.conj(b.T)
    for i in range(0, a.shape[0], block):
        inner = a[i:i + block] @ bt
        m = float(np.max(inner.real**2 + inner.imag**2))
        if m > worst:
            worst = m
    return math.sqrt(max(0.0, 1.0 - worst))


def displace_chekanov(params: ChekanovParams, samples: int = 128,
                      threshold: float = 1e-3,
                      anchor: Anchor | str = Anchor.NEAR_Z0):
    """Displacement of a Chekanov-type torus by the z2-phase rotation.

    The flow of diag(0, 0, 1) at time pi/2 negates the pencil parameter, so
    the torus over the circle centered at -mu lands over the circle centered
    at +mu; the two parameter circles are disjoint exactly when a < |mu|.
    Because every member conic passes through the base points, circle
    disjointness alone is not a full certificate, so the minimum chordal
    distance between the sampled tori is reported and must clear the
    threshold; otherwise the result is Inconclusive.
    """
    if classify_type(params) is not TorusType.CHEKANOV:
        raise NotChekanovType(
            f"a = {params.a} vs |mu| = {abs(params.mu)}: not in the a < |mu| regime"
        )
    torus = chekanov_torus(params, anchor)
    g = (np.arange(samples) + 0.5) / samples
    uu, vv = np.meshgrid(g, g, indexing="ij")
    src = _unit_rows(torus._eval(uu, vv)).reshape(-1, 3)
    flow_t = math.pi / 2.0
    img = src @ symbol_flow(diagonal_symbol(0.0, 0.0, 1.0), flow_t).T
    sep = _min_pairwise_chordal(src, img)
    total = samples * samples
    if sep <= threshold:
        return Inconclusive(separation=sep, samples=total)
    return DisplacementCertificate(
        symbol=diagonal_symbol(0.0, 0.0, 1.0),
        time=flow_t,
        separation=sep,
        method=CertificateMethod.SAMPLED_DISTANCE,
        samples=total,
        detail={
            "grid": [samples, samples],
            "pencil_circle_gap": 2.0 * (abs(params.mu) - params.a),
            "a": params.a,
            "mu": complex_pair(params.mu),
            "delta": params.delta,
        },
    )


# ---------------------------------------------------------------------------
# the diagonal rotation construction
# ---------------------------------------------------------------------------


def _rotation_symbol() -> HermitianSymbol:
    """Symbol whose flow rotates the diagonal family: 2*swap01 + diag(1,1,0).

    Eigenvalues (3, -1, 0) are distinct integers, so the function has
    exactly three projective critical points and its flow is 2 pi periodic.
    """
    m = np.array([[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 0.0]],
                 dtype=complex)
    return HermitianSymbol(m)


def _sphere_section(alpha: float) -> ParamSurface:
    """Section of the reduced sphere of the level set {p1 + p2 = alpha}.

    The circle action (z0, z1) -> e^{i s}(z0, z1) preserves the level set;
    the section fixes the z0 phase, covering the reduced sphere once, so its
    symplectic area equals the reduced volume.
    """
    ra = math.sqrt(alpha)
    rc = math.sqrt(1.0 - alpha)

    def lift(u, t):
        u = np.asarray(u, dtype=float)
        t = np.asarray(t, dtype=float)
        half = 0.5 * math.pi * u
        z0 = ra * np.cos(half) * np.ones_like(t)
        z1 = ra * np.sin(half) * np.exp(2j * math.pi * t)
        z2 = rc * np.ones_like(z1)
        return np.stack([z0 + 0j, z1, z2], axis=-1)

    return ParamSurface(lift, periodic=(False, True))


def _rqi_critical_points(symbol: HermitianSymbol, seed: int, starts: int,
                         residual_tol: float = 1e-10) -> list[np.ndarray]:
    """Distinct projective critical points found by Rayleigh iteration."""
    rng = np.random.RandomState(seed)
    found: list[np.ndarray] = []
    eye = np.eye(3, dtype=complex)
    for _ in range(starts):
        z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        z = z / np.linalg.norm(z)
        for _ in range(60):
            if symbol.gradient_residual(z) < residual_tol:
                break
            lam = float(symbol.value(z))
            try:
                step = np.linalg.solve(symbol.matrix - lam * eye, z)
            except np.linalg.LinAlgError:
                break
            z = step / np.linalg.norm(step)
        if symbol.gradient_residual(z) < residual_tol:
            if all(chordal_distance(z, p) > 1e-6 for p in found):
                found.append(z)
    return found


class AlphaReport(NamedTuple):
    alpha: float
    reduced_area: float
    reduced_area_error: float
    normalization: float
    normalization_error: float
    marked_moment: tuple[float, float]
    extreme_values: tuple[float, float]
    extreme_location_gap: float


@dataclass(frozen=True)
class RotationReport:
    """Validated data for the rotation flow of the diagonal torus family."""

    symbol: HermitianSymbol
    alphas: tuple[AlphaReport, ...]
    critical_points: tuple[np.ndarray, ...]
    critical_values: tuple[float, ...]
    swap_moment_deviation: float
    periodicity_deviation: float

    def to_json(self) -> dict:
        return {
            "symbol": self.symbol.to_json()["matrix"],
            "alphas": [
                {
                    "alpha": a.alpha,
                    "reduced_area": a.reduced_area,
                    "reduced_area_error": a.reduced_area_error,
                    "normalization": a.normalization,
                    "normalization_error": a.normalization_error,
                    "marked_moment": list(a.marked_moment),
                    "extreme_values": list(a.extreme_values),
                    "extreme_location_gap": a.extreme_location_gap,
                }
                for a in self.alphas
            ],
            "critical_points": [
                [complex_pair(c) for c in p] for p in self.critical_points
            ],
            "critical_values": list(self.critical_values),
            "swap_moment_deviation": self.swap_moment_deviation,
            "periodicity_deviation": self.periodicity_deviation,
        }


def build_diagonal_rotation(alpha_samples, grid: int = 64,
                            quad: QuadSpec = QuadSpec(), seed: int = 0,
                            area_tol: float = 1e-6,
                            period_tol: float = 1e-8) -> RotationReport:
    """Assemble and validate the rotation flow on diagonal level sets.

    For each alpha in (0, 1): the level set {p1 + p2 = alpha} reduces to a
    sphere whose area must equal alpha; the rotation function restricted
    there must integrate to alpha^2 and attain its extremes on the marked
    diagonal circle (the image of the fiber with periods (alpha/2, alpha/2)).
    Globally the function must have exactly three critical points, and the
    exact swap flow realizing the same rotation must exchange fiber moment
    values and be 2 pi periodic.
    """
    if grid < 32:
        raise ValueError("grid resolution must be at least 32")
    symbol = _rotation_symbol()

    reports = []
    for alpha in alpha_samples:
        alpha = float(alpha)
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha values must lie strictly inside (0, 1)")
        section = _sphere_section(alpha)
        area = surface_symplectic_area(section, quad)
        if abs(area.value - alpha) > area_tol:
            raise NormalizationFailure(
                f"reduced area {area.value!r} differs from alpha = {alpha}"
            )
        norm = surface_symplectic_area(
            section, quad,
            weight_fn=lambda surf, s, t: symbol.value(surf._eval(s, t)))
        if abs(norm.value - alpha * alpha) > area_tol:
            raise NormalizationFailure(
                f"rotation function integrates to {norm.value!r}, want alpha^2"
            )

        g = (np.arange(grid) + 0.5) / grid
        uu, tt = np.meshgrid(g, g, indexing="ij")
        pts = _unit_rows(section._eval(uu, tt)).reshape(-1, 3)
        vals = symbol.value(pts)
        hi, lo = int(np.argmax(vals)), int(np.argmin(vals))
        marked_hi = _unit_rows(np.array(
            [math.sqrt(alpha / 2), math.sqrt(alpha / 2), math.sqrt(1 - alpha)],
            dtype=complex))
        marked_lo = _unit_rows(np.array(
            [math.sqrt(alpha / 2), -math.sqrt(alpha / 2), math.sqrt(1 - alpha)],
            dtype=complex))
        gap = max(float(chordal_distance(pts[hi], marked_hi)),
                  float(chordal_distance(pts[lo], marked_lo)))
        m_hi = moment_map(marked_hi)
        reports.append(AlphaReport(
            alpha, area.value, area.error, norm.value, norm.error,
            (float(m_hi[..., 0]), float(m_hi[..., 1])),
            (float(vals[hi]), float(vals[lo])), gap,
        ))

    crits = _rqi_critical_points(symbol, seed=seed, starts=120)
    if len(crits) != 3:
        raise CriticalPointMiscount(
            f"found {len(crits)} critical points, expected exactly 3"
        )
    crit_vals = tuple(float(symbol.value(p)) for p in crits)

    # the exact swap flow realizes the same rotation on fibers
    swap_u = symbol_flow(swap_symbol(0, 1), math.pi / 2.0)
    dev = 0.0
    rng = np.random.RandomState(seed + 1)
    for _ in range(12):
        c1, c2 = sorted(rng.uniform(0.05, 0.45, size=2))
        fiber = CliffordFiber(ActionCoords(c1, c2))
        th = rng.uniform(0.0, 2.0 * math.pi, size=(40, 2))
        z = fiber.lift(th[:, 0], th[:, 1]) @ swap_u.T
        m = moment_map(z)
        dev = max(dev, float(np.max(np.abs(m - np.array([c2, c1])))))

    # integer eigenvalue gaps make the rotation flow 2 pi periodic
    full_turn = symbol_flow(symbol, 2.0 * math.pi)
    zs = rng.standard_normal((100, 3)) + 1j * rng.standard_normal((100, 3))
    per_dev = float(np.max(phase_aligned_residual(zs, zs @ full_turn.T)))
    if per_dev > period_tol:
        raise NormalizationFailure(
            f"rotation flow misses 2 pi periodicity by {per_dev:.3e}"
        )

    return RotationReport(symbol, tuple(reports), tuple(crits), crit_vals,
                          dev, per_dev)


# ---------------------------------------------------------------------------
# the combined displaceable-or-monotone verdict
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Displaceable:
    base: tuple
    certificate: DisplacementCertificate

    def to_json(self) -> dict:
        return {
            "verdict": "displaceable",
            "base": [number_or_rational(v) for v in self.base],
            "certificate": self.certificate.to_json(),
        }


@dataclass(frozen=True)
class Monotone:
    base: tuple
    witness: MonotoneWitness

    def to_json(self) -> dict:
        return {
            "verdict": "monotone",
            "base": [number_or_rational(v) for v in self.base],
            "witness": self.witness.to_json(),
        }


def _exact_canonical_bs(base: ActionCoords, tol: float) -> bool:
    vals = (base.r0, base.r1)
    if all(isinstance(v, Fraction) for v in vals):
        return all((3 * v).denominator == 1 for v in vals)
    return all(abs(3 * float(v) - round(3 * float(v))) <= tol for v in vals)


def enc_verdict(base: ActionCoords, tol: float = 1e-9):
    """Displaceable-or-monotone dichotomy for an interior toric fiber.

    Combines the exact swap-displacement test, the exact tripled-period
    integrality test, and the universal-class witness.  Exactly one verdict
    must fire; both diagonals of the dichotomy meet only at (1/3, 1/3).
    """
    if not base.is_interior():
        raise ValueError("verdict expects an interior fiber")
    outcome = displace_clifford(base)
    displaced = isinstance(outcome, DisplacementCertificate)

    canonical = _exact_canonical_bs(base, tol)
    witness = None
    if canonical:
        r0, r1 = float(base.r0), float(base.r1)
        witness = is_monotone((r0, r1, r0 + r1), (1, 1, 2))
    monotone = witness is not None and witness.monotone

    if displaced and not monotone:
        return Displaceable((base.r0, base.r1), outcome)
    if monotone and not displaced:
        return Monotone((base.r0, base.r1), witness)
    raise InternalContradiction(
        f"fiber ({base.r0}, {base.r1}): displaced={displaced}, monotone={monotone}"
    )
