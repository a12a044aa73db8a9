import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pdc_match.gvm import (
    Regime, angle_difference, classify, dispersion_parameter, find_degenerate_locus,
    find_nondegenerate_locus, find_singular_points, gvm_arrays, theta_from_d,
)
from pdc_match.phasematch import WavelengthTriple, idler_wavelength


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_sign_identity(D):
    theta = float(theta_from_d(D))
    assert -90 < theta <= 90
    if D > 0:
        assert 0 < theta <= 90
    elif D < 0:
        assert theta < 0


def test_exact_points():
    assert float(theta_from_d(1.0)) == 45.0
    assert float(theta_from_d(0.0)) == 0.0
    assert float(theta_from_d(np.inf)) == 90.0
    assert float(theta_from_d(-np.inf)) == 90.0


@pytest.mark.parametrize("theta, regime", [
    (0.4, Regime.ASYMMETRIC_ZERO), (-0.5, Regime.ASYMMETRIC_ZERO), (44.6, Regime.SYMMETRIC),
    (89.6, Regime.ASYMMETRIC_NINETY), (-89.7, Regime.ASYMMETRIC_NINETY), (30.0, Regime.GENERIC),
    (float("nan"), Regime.SINGULAR),
])
def test_classify(theta, regime):
    assert classify(theta) is regime


def test_angle_difference_wraps():
    assert float(angle_difference(-89.9, 90.0)) == pytest.approx(0.1)
    assert float(angle_difference(10.0, 45.0)) == pytest.approx(-35.0)


def test_ktp_degenerate_symmetric(ppktp):
    point = dispersion_parameter(ppktp, ppktp.config("typeII"), WavelengthTriple.degenerate(0.791))
    assert abs(point.theta - 45) <= 0.5
    assert point.regime is Regime.SYMMETRIC


@pytest.mark.parametrize("material", ["PPKTP", "PPLN", "OPGaP", "OPGaAs"])
def test_type0_degenerate_singular(db, material):
    rec = db[material]
    point = dispersion_parameter(rec, rec.config("type0"), WavelengthTriple.degenerate(2.0))
    assert point.regime is Regime.SINGULAR
    assert math.isnan(point.D) and point.singular


def test_zgp_3014_asymmetric(db):
    zgp = db["ZGP"]
    point = dispersion_parameter(zgp, zgp.config("typeII"), WavelengthTriple.degenerate(3.014))
    assert abs(point.theta) <= 0.5


@pytest.mark.parametrize("material, cfg_type", [("PPKTP", "type0"), ("PPLN", "typeI"), ("ZGP", "typeI"),
                                                ("CSP", "typeI"), ("OPGaAs", "type0")])
def test_exchange_inverts_D(db, material, cfg_type):
    rec = db[material]
    cfg = rec.config(cfg_type)
    lo = max(rec.tpa_edge, rec.evaluable_range(cfg.pump_axis)[0])
    for p in np.linspace(lo + 0.05, lo + 0.6, 5):
        s = 2.4 * p
        i = idler_wavelength(p, s)
        if max(s, i) > min(rec.evaluable_range(cfg.signal_axis)[1], rec.evaluable_range(cfg.idler_axis)[1]):
            continue
        a = dispersion_parameter(rec, cfg, WavelengthTriple(p, s, i))
        b = dispersion_parameter(rec, cfg, WavelengthTriple(p, i, s))
        assert b.D == pytest.approx(1 / a.D, rel=1e-9)
        assert float(angle_difference(b.theta, 90 - a.theta)) == pytest.approx(0, abs=1e-9)


# Locus roots checked against 30-digit oracle roots (D = 1 or D = 0 on the degeneracy line).
def test_ppln_type2_theta45(ppln):
    roots = find_degenerate_locus(ppln, ppln.config("typeII"), 45, (1.5, 2.0))
    assert [r.pump for r in roots] == [pytest.approx(1.7753191899728542, abs=2e-7)]


def test_csp_type2_theta45(db):
    csp = db["CSP"]
    roots = find_degenerate_locus(csp, csp.config("typeII"), 45, (2.0, 3.0))
    assert any(abs(r.pump - 2.573) <= 0.01 * 2.573 for r in roots)


def test_ktp_type2_theta0(ppktp):
    # θ = 0 on the variant with the signal on y; the listed o -> e + o assignment
    # sees the same point as θ = 90.
    cfg = ppktp.config("typeII", exchanged=True)
    roots = find_degenerate_locus(ppktp, cfg, 0, (1.0, 1.5))
    assert [r.pump for r in roots] == [pytest.approx(1.199731831400253, abs=2e-7)]
    same = find_degenerate_locus(ppktp, ppktp.config("typeII"), 90, (1.0, 1.5))
    assert [r.pump for r in same] == [pytest.approx(roots[0].pump, abs=1e-9)]


def test_ktp_type2_theta45(ppktp):
    roots = find_degenerate_locus(ppktp, ppktp.config("typeII"), 45, (0.7, 0.9))
    assert [r.pump for r in roots] == [pytest.approx(0.79171801359584111, abs=2e-7)]


def test_zgp_type2_roots(db):
    zgp = db["ZGP"]
    cfg = zgp.config("typeII")
    assert [r.pump for r in find_degenerate_locus(zgp, cfg, 0, (2.0, 4.5))] == [pytest.approx(2.5129501367126153, abs=2e-7)]
    assert [r.pump for r in find_degenerate_locus(zgp, cfg, 45, (2.0, 4.5))] == [pytest.approx(3.0139741693644122, abs=2e-7)]
    assert [r.pump for r in find_degenerate_locus(zgp, cfg, 90, (2.0, 4.5))] == [pytest.approx(3.6869668650640636, abs=2e-7)]


def test_ktp_nondegenerate(ppktp):
    cfg = ppktp.config("typeII", exchanged=True)
    roots = find_nondegenerate_locus(ppktp, cfg, 45, 0.7456, (0.9, 1.2))
    assert len(roots) == 1
    p, s, i = roots[0].triple.labeled()
    assert s == pytest.approx(1.0714, rel=0.01)
    assert i == pytest.approx(idler_wavelength(0.7456, s), rel=1e-12)
    assert roots[0].abs_period > 250


def test_target_not_attained(ppktp):
    assert find_nondegenerate_locus(ppktp, ppktp.config("typeII"), 80, 0.7456, (1.0, 1.05)) == []
    assert find_degenerate_locus(ppktp, ppktp.config("typeII"), 45, (1.0, 1.1)) == []


def test_roots_reevaluate(db):
    for material in ("PPKTP", "PPLN", "ZGP", "CSP"):
        rec = db[material]
        lo = max(rec.tpa_edge, rec.evaluable_range("o")[0], rec.evaluable_range("e")[0]) + 0.01
        hi = min(rec.evaluable_range("o")[1], rec.evaluable_range("e")[1]) / 2 - 0.01
        for cfg in (rec.config("typeII"), rec.config("typeII", exchanged=True)):
            for target in (0, 45, 90, 20):
                for sol in find_degenerate_locus(rec, cfg, target, (lo, hi)):
                    again = dispersion_parameter(rec, cfg, sol.triple)
                    assert abs(float(angle_difference(again.theta, target))) <= 1e-3


def test_prescan_refinement_stable(ppktp):
    cfg = ppktp.config("typeII")
    a = find_degenerate_locus(ppktp, cfg, 45, (0.6, 1.4))
    b = find_degenerate_locus(ppktp, cfg, 45, (0.6, 1.4), step=0.5e-3)
    assert len(a) == len(b)
    for x, y in zip(a, b):
        assert abs(x.pump - y.pump) * 1000 <= 1e-3


def test_ppln_type1_singular_point(ppln):
    pts = find_singular_points(ppln, ppln.config("typeI"), (0.6, 1.0))
    assert [p.pump for p in pts] == [pytest.approx(0.78445263671970654, abs=2e-7)]
    assert pts[0].regime is Regime.SINGULAR


def test_singular_points_need_same_axis(ppln):
    from pdc_match.errors import DomainError
    with pytest.raises(DomainError):
        find_singular_points(ppln, ppln.config("typeII"), (0.6, 1.0))


def test_vector_and_scalar_agree(ppktp):
    cfg = ppktp.config("typeII")
    p = np.array([0.8, 0.9, 1.0])
    s = np.array([1.3, 1.5, 2.5])
    i = p * s / (s - p)
    D, theta, _ = gvm_arrays(ppktp, cfg, p, s, i)
    for k in range(3):
        point = dispersion_parameter(ppktp, cfg, WavelengthTriple(p[k], s[k], i[k]))
        assert point.D == pytest.approx(D[k], rel=1e-14)
