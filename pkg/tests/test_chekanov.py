import math

import numpy as np
import pytest

from lagrtori.chekanov import (
    Anchor,
    ChekanovParams,
    TorusType,
    canonical_bs_scan,
    chekanov_torus,
    classify_type,
    cone_disc,
    conic_circle,
    conic_disc_surface,
    conic_equation_residual,
    conic_parametrize,
    conic_total_area,
    level_radius,
    radial_area,
    torus_periods_chekanov,
)
from lagrtori.errors import (
    ConingDegenerate,
    DegenerateFamily,
    SingularConic,
)
from lagrtori.geometry import (
    QuadSpec,
    _unit_rows,
    chordal_distance,
    surface_form_grid,
    surface_symplectic_area,
)

QUAD = QuadSpec()
CHEAP = QuadSpec(nodes_per_axis=16)


# ---------------------------------------------------------------------------
# conic members and their orbit circles
# ---------------------------------------------------------------------------


def test_parametrization_satisfies_the_equation():
    eps = 0.7 - 0.4j
    par = conic_parametrize(eps)
    rng = np.random.RandomState(7)
    levels = rng.uniform(0.05, 1.95, 50)
    ss = rng.uniform(0.0, 1.0, 50)
    res = conic_equation_residual(eps, par.lift(levels, ss))
    assert np.max(res) < 1e-10


def test_parametrization_intertwines_the_circle_action():
    eps = 0.7 - 0.4j
    par = conic_parametrize(eps)
    rng = np.random.RandomState(3)
    levels = rng.uniform(0.1, 1.9, 20)
    ss = rng.uniform(0.0, 1.0, 20)
    alpha = 0.83
    u = np.diag([np.exp(1j * alpha), np.exp(-1j * alpha), 1.0])
    moved = _unit_rows(par.lift(levels, ss) @ u.T)
    reparam = _unit_rows(par.lift(levels, ss - alpha / (2.0 * math.pi)))
    assert np.max(chordal_distance(moved, reparam)) < 1e-7


def test_singular_member_rejected():
    with pytest.raises(SingularConic):
        conic_parametrize(0.0)
    with pytest.raises(SingularConic):
        conic_circle(1e-14, 0.2)


@pytest.mark.parametrize("rho", [0.4, 1.0, 2.3])
def test_disc_area_matches_closed_form(rho):
    eps = 0.7 - 0.4j
    est = surface_symplectic_area(conic_disc_surface(eps, rho), QUAD)
    assert est.value == pytest.approx(float(radial_area(abs(eps), rho)), abs=1e-8)


def test_level_radius_inverts_radial_area():
    e = 0.81
    for rho in (0.3, 1.0, 1.7, 3.0):
        level = float(radial_area(e, rho))
        assert float(level_radius(e, level)) == pytest.approx(rho, rel=1e-12)
    with pytest.raises(ValueError):
        level_radius(e, 2.0)


def test_total_conic_area_is_two():
    rng = np.random.RandomState(11)
    for _ in range(10):
        eps = rng.uniform(0.2, 2.0) * np.exp(2j * math.pi * rng.uniform())
        total, err = conic_total_area(eps, CHEAP)
        assert total == pytest.approx(2.0, abs=1e-6)
        assert err < 1e-6


@pytest.mark.parametrize("delta", [-0.35, 0.0, 0.2, 0.8])
@pytest.mark.parametrize("anchor", [Anchor.NEAR_Z0, Anchor.NEAR_Z1])
def test_delta_label_round_trip(delta, anchor):
    eps = 0.7 - 0.4j
    circle = conic_circle(eps, delta, anchor)
    est = surface_symplectic_area(circle.disc(), QUAD)
    assert est.value == pytest.approx(1.0 + delta, abs=1e-7)


def test_conic_circle_validates_delta():
    with pytest.raises(ValueError):
        conic_circle(0.5, 1.0)


# ---------------------------------------------------------------------------
# the torus family over pencil circles
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "a,mu,want",
    [
        (2.0, 1.0, TorusType.CLIFFORD),
        (0.5, 1.0, TorusType.CHEKANOV),
        (1.0, 1.0, TorusType.BOUNDARY),
        (1.0 + 5e-10, 1.0, TorusType.BOUNDARY),
    ],
)
def test_type_classification(a, mu, want):
    assert classify_type(ChekanovParams(a, mu, 0.0)) is want


def test_degenerate_family_rejected():
    with pytest.raises(DegenerateFamily):
        chekanov_torus(ChekanovParams(1.0, 1.0, 0.2))


def test_params_validate():
    with pytest.raises(ValueError):
        ChekanovParams(-0.1, 1.0, 0.0)
    with pytest.raises(ValueError):
        ChekanovParams(0.5, 0.0, 0.0)
    with pytest.raises(ValueError):
        ChekanovParams(0.5, 1.0, 1.0)


@pytest.mark.parametrize(
    "a,mu,delta",
    [
        (0.5, 1.0, 0.0),
        (0.3, 1.0, 0.4),
        (0.7, np.exp(2j * math.pi / 3), -0.3),
        (1.5, 1.0, 0.2),
    ],
)
def test_torus_is_lagrangian_and_on_the_conics(a, mu, delta):
    params = ChekanovParams(a, mu, delta)
    torus = chekanov_torus(params)
    g = (np.arange(16) + 0.37) / 16
    uu, vv = np.meshgrid(g, g, indexing="ij")
    assert np.max(np.abs(surface_form_grid(torus, uu, vv))) <= 1e-8
    eps = params.eps_of(uu)
    assert np.max(conic_equation_residual(eps, torus._eval(uu, vv))) <= 1e-10


# ---------------------------------------------------------------------------
# periods
# ---------------------------------------------------------------------------


def test_orbit_period_recovers_delta():
    p = torus_periods_chekanov(ChekanovParams(0.5, 1.0, 0.25), QUAD)
    assert p.p_orbit == pytest.approx(0.25, abs=1e-6)
    assert p.orbit_error < 1e-6


def test_section_period_independent_of_basepoint():
    a = torus_periods_chekanov(ChekanovParams(0.5, 1.0, 0.2), QUAD, seed=0)
    b = torus_periods_chekanov(ChekanovParams(0.5, 1.0, 0.2), QUAD, seed=3)
    assert a.p_section == pytest.approx(b.p_section, abs=2e-6)


def test_section_period_continuous_in_a():
    quad = QuadSpec(nodes_per_axis=32, max_disagreement=1e-5)
    vals = [
        torus_periods_chekanov(ChekanovParams(a, 1.0, 0.2), quad, seed=0).p_section
        for a in np.arange(0.30, 0.901, 0.02)
    ]
    jumps = np.abs(np.diff(vals))
    assert np.max(jumps) < 0.01


def test_coning_degenerates_on_antipodal_basepoint():
    def loop(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.cos(2 * np.pi * t) + 0j, np.sin(2 * np.pi * t) + 0j,
                         np.zeros_like(t) + 0j], axis=-1)

    with pytest.raises(ConingDegenerate):
        cone_disc(loop, -loop(0.25))


# ---------------------------------------------------------------------------
# the integrality scan
# ---------------------------------------------------------------------------


def test_scan_small_grid_values():
    report = canonical_bs_scan(1.0, [0.3, 0.5], [-0.2, 0.0, 0.2],
                               QuadSpec(nodes_per_axis=24), seed=0)
    assert len(report.rows) == 6
    by_key = {(r.a, r.delta): r for r in report.rows}
    # nonzero delta rows are rejected by the orbit period alone
    assert by_key[(0.3, 0.2)].defect == pytest.approx(0.4, abs=1e-6)
    assert by_key[(0.5, -0.2)].defect == pytest.approx(0.4, abs=1e-6)
    # delta = 0 rows are decided by the section period
    assert by_key[(0.3, 0.0)].defect == pytest.approx(0.0158922, abs=1e-4)
    assert report.min_defect == pytest.approx(0.0158922, abs=1e-4)
    assert report.argmin == (0.3, 0.0)
    assert report.min_defect > 1e-4


def test_scan_workers_agree_with_serial():
    serial = canonical_bs_scan(1.0, [0.4], [-0.5, 0.0, 0.5], CHEAP, seed=0)
    threaded = canonical_bs_scan(1.0, [0.4], [-0.5, 0.0, 0.5], CHEAP, seed=0,
                                 workers=3)
    for r1, r2 in zip(serial.rows, threaded.rows):
        assert r1 == r2


def test_scan_csv_layout():
    report = canonical_bs_scan(1.0, [0.4], [0.0], CHEAP, seed=0)
    lines = report.to_csv().splitlines()
    assert lines[0] == "a,delta,p_orbit,p_section,defect"
    assert len(lines) == 2
    assert lines[1].startswith("0.4,0.0,")


def test_scan_validates_regime():
    with pytest.raises(ValueError):
        canonical_bs_scan(1.0, [0.5, 1.1], [0.0], CHEAP)
    with pytest.raises(ValueError):
        canonical_bs_scan(1.0, [], [0.0], CHEAP)
