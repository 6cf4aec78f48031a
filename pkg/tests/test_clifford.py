import math
from fractions import Fraction

import numpy as np
import pytest

from lagrtori.clifford import (
    ActionCoords,
    D1,
    D2,
    D3,
    DeformationSpec,
    HomologyClass,
    clifford_fiber,
    deform_fiber,
    deformed_fiber_periods,
    diagonal_period,
    enumerate_bs_fibers,
    fiber_periods,
    hilbert_dimension,
    interior_rational_grid,
    ks_jacobian,
    lifted_period_map,
    standard_disc,
)
from lagrtori.errors import (
    BoundaryFiber,
    LeavesTriangle,
    StencilOutOfDomain,
    UnsupportedClass,
)
from lagrtori.geometry import QuadSpec, surface_form_grid, surface_symplectic_area

QUAD = QuadSpec()


# ---------------------------------------------------------------------------
# action coordinates and fibers
# ---------------------------------------------------------------------------


def test_action_coords_validation():
    assert ActionCoords(0.2, 0.3).r2 == pytest.approx(0.5)
    assert ActionCoords(Fraction(1, 3), Fraction(1, 3)).is_interior()
    assert not ActionCoords(0.0, 0.5).is_interior()
    with pytest.raises(ValueError):
        ActionCoords(0.7, 0.4)
    with pytest.raises(ValueError):
        ActionCoords(-0.1, 0.5)


def test_boundary_fiber_rejected():
    with pytest.raises(BoundaryFiber):
        clifford_fiber(ActionCoords(0.0, 0.5))


@pytest.mark.parametrize("base", [(0.2, 0.3), (0.45, 0.45), (1 / 3, 1 / 3)])
def test_fiber_is_lagrangian(base):
    fiber = clifford_fiber(base)
    surf = fiber.surface()
    g = (np.arange(16) + 0.5) / 16
    ss, tt = np.meshgrid(g, g, indexing="ij")
    assert np.max(np.abs(surface_form_grid(surf, ss, tt))) < 1e-10


def test_fiber_points_have_expected_moduli():
    fiber = clifford_fiber((0.2, 0.3))
    z = fiber.lift(0.7, 1.9)
    np.testing.assert_allclose(np.abs(z) ** 2, [0.2, 0.3, 0.5], atol=1e-14)


# ---------------------------------------------------------------------------
# standard discs and periods
# ---------------------------------------------------------------------------


def test_standard_disc_areas_match_actions():
    fiber = clifford_fiber((0.2, 0.3))
    for cls, want in ((D1, 0.2), (D2, 0.3), (D3, 0.5)):
        est = surface_symplectic_area(standard_disc(fiber, cls).disc, QUAD)
        assert est.value == pytest.approx(want, abs=1e-7)


def test_standard_disc_validates():
    fiber = clifford_fiber((0.2, 0.3))
    for cls in (D1, D2, D3):
        standard_disc(fiber, cls).validate()


def test_unsupported_class_rejected():
    fiber = clifford_fiber((0.2, 0.3))
    with pytest.raises(UnsupportedClass):
        standard_disc(fiber, HomologyClass(2, 1))


@pytest.mark.parametrize("base", [(0.15, 0.15), (0.3, 0.45), (0.45, 0.3)])
def test_fiber_periods_recover_actions(base):
    got = fiber_periods(base, QUAD)
    assert got.p1 == pytest.approx(base[0], abs=1e-6)
    assert got.p2 == pytest.approx(base[1], abs=1e-6)
    assert got.p1_error < 1e-6 and got.p2_error < 1e-6


def test_diagonal_period_is_sum_of_basis_periods():
    base = (0.25, 0.35)
    p = fiber_periods(base, QUAD)
    d3, err = diagonal_period(base, QUAD)
    assert d3 == pytest.approx((p.p1 + p.p2) % 1.0, abs=2e-6)
    assert err < 1e-6


def test_periods_scale_with_level():
    base = (0.2, 0.3)
    p3 = fiber_periods(base, QUAD, level=3)
    assert p3.p1 == pytest.approx((3 * 0.2) % 1.0, abs=1e-6)
    assert p3.p2 == pytest.approx((3 * 0.3) % 1.0, abs=1e-6)


# ---------------------------------------------------------------------------
# integral fiber enumeration
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("level", range(1, 31))
def test_bs_counts_closed_form(level):
    open_count = enumerate_bs_fibers(level, closed=False).count
    closed_count = enumerate_bs_fibers(level, closed=True).count
    assert open_count == (level - 1) * (level - 2) // 2
    assert closed_count == (level + 1) * (level + 2) // 2


def test_level3_unique_interior_fiber():
    fibers = enumerate_bs_fibers(3, closed=False)
    assert fibers.count == 1
    f = fibers.fibers[0]
    assert (f.r0, f.r1) == (Fraction(1, 3), Fraction(1, 3))


@pytest.mark.parametrize("level,want", [(1, 3), (2, 6), (3, 10)])
def test_closed_counts_small_levels(level, want):
    assert enumerate_bs_fibers(level, closed=True).count == want


@pytest.mark.parametrize("level", range(3, 31))
def test_hilbert_dimension_matches_open_count(level):
    cmp = hilbert_dimension(level, closed=False)
    assert cmp.match
    assert cmp.dimension == (level - 2) * (level - 1) // 2


def test_closed_count_matches_full_space_dimension():
    cmp = hilbert_dimension(6, closed=True)
    assert cmp.match and cmp.dimension == 28


def test_bs_fiber_set_json_round_trip():
    payload = enumerate_bs_fibers(3, closed=False).to_json()
    assert payload["count"] == 1
    assert payload["fibers"] == [[[1, 3], [1, 3]]]


def test_interior_grid_contains_centroid_when_divisible():
    grid19 = interior_rational_grid(19)
    assert len(grid19) == 190
    assert (Fraction(1, 3), Fraction(1, 3)) in grid19
    grid5 = interior_rational_grid(5)
    assert len(grid5) == 15
    assert (Fraction(1, 3), Fraction(1, 3)) not in grid5
    assert all(a > 0 and b > 0 and a + b < 1 for a, b in grid19)


# ---------------------------------------------------------------------------
# the period-map derivative
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("base", [(0.2, 0.3), (0.4, 0.25), (1 / 3, 1 / 3)])
def test_ks_jacobian_is_identity(base):
    res = ks_jacobian(base)
    assert res.determinant == pytest.approx(1.0, abs=1e-6)
    assert res.jacobian[0, 0] > 0 and res.jacobian[1, 1] > 0


def test_ks_jacobian_quadrature_backed():
    cheap = QuadSpec(nodes_per_axis=16)

    def by_quadrature(base):
        p = fiber_periods(base, cheap)
        return (p.p1, p.p2)

    res = ks_jacobian((0.3, 0.3), step=1e-4, period_fn=by_quadrature)
    assert res.determinant == pytest.approx(1.0, abs=1e-5)


def test_ks_jacobian_stencil_guard():
    with pytest.raises(StencilOutOfDomain):
        ks_jacobian((0.5, 0.49999), step=1e-3)


def test_lifted_period_map_fixes_corners_continuously():
    assert lifted_period_map((0.0, 0.0)) == (0.0, 0.0)
    assert lifted_period_map((1.0, 0.0)) == (1.0, 0.0)
    assert lifted_period_map((0.2, 0.3)) == (0.2, 0.3)


# ---------------------------------------------------------------------------
# graph deformations
# ---------------------------------------------------------------------------


def _bump(theta0, theta1):
    return 0.05 * np.sin(theta0) * np.cos(2.0 * theta1)


def test_deformed_torus_is_lagrangian_for_exact_forms():
    fiber = clifford_fiber((0.3, 0.3))
    surf = deform_fiber(fiber, DeformationSpec(0.0, 0.0, f=_bump))
    g = (np.arange(12) + 0.5) / 12
    ss, tt = np.meshgrid(g, g, indexing="ij")
    assert np.max(np.abs(surface_form_grid(surf, ss, tt))) < 1e-8


def test_exact_form_deformation_moves_no_period():
    fiber = clifford_fiber((0.2, 0.3))
    got = deformed_fiber_periods(fiber, DeformationSpec(0.0, 0.0, f=_bump), QUAD)
    assert got.p1 == pytest.approx(0.2, abs=2e-6)
    assert got.p2 == pytest.approx(0.3, abs=2e-6)


@pytest.mark.parametrize("scale", [0.25, 0.5])
def test_closed_form_deformation_shifts_periods_linearly(scale):
    fiber = clifford_fiber((0.25, 0.35))
    spec = DeformationSpec(0.08, -0.06, f=_bump, scale=scale)
    got = deformed_fiber_periods(fiber, spec, QUAD)
    assert got.p1 == pytest.approx((0.25 + scale * 0.08) % 1.0, abs=2e-6)
    assert got.p2 == pytest.approx((0.35 - scale * 0.06) % 1.0, abs=2e-6)


def test_level_multiplies_deformed_periods():
    fiber = clifford_fiber((0.25, 0.35))
    spec = DeformationSpec(0.04, 0.05, scale=0.25)
    got = deformed_fiber_periods(fiber, spec, QUAD, level=3)
    assert got.p1 == pytest.approx((3 * (0.25 + 0.01)) % 1.0, abs=6e-6)
    assert got.p2 == pytest.approx((3 * (0.35 + 0.0125)) % 1.0, abs=6e-6)


def test_deformation_leaving_triangle_rejected():
    fiber = clifford_fiber((0.1, 0.1))
    with pytest.raises(LeavesTriangle):
        deform_fiber(fiber, DeformationSpec(-0.2, 0.0))
    with pytest.raises(LeavesTriangle):
        deformed_fiber_periods(fiber, DeformationSpec(-0.2, 0.0), QUAD)
