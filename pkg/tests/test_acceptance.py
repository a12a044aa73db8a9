"""Acceptance criteria, one test each.

Every test prints a single ``CRITERION <n> PASS|FAIL <detail>`` line (shown
live and again in the terminal summary).  Tolerances are fixed here and not
adjusted to the computed values: wavelengths ±1 %, lengths ±15 %,
up-conversion outputs ±0.1 nm against an exact rational oracle.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.interpolate import RegularGridInterpolator
from scipy.ndimage import binary_dilation, label

from pdc_match.dispersion import dn_dlambda
from pdc_match.errors import DomainError
from pdc_match.gvm import (
    angle_difference, dispersion_parameter, find_degenerate_locus, find_nondegenerate_locus,
    find_singular_points, gvm_arrays,
)
from pdc_match.materials import Axis
from pdc_match.phasematch import WavelengthTriple, delta_k, solve_period
from pdc_match.sweep import MaskFlag, scan
from pdc_match.upconv import upconvert

WAVELENGTH_REL = 0.01
LENGTH_REL = 0.15
UPCONV_ABS_UM = 1e-4
ENERGY_REL = 1e-12
FD_REL = 1e-8
DK_ABS = 1e-9
ROOT_DEG = 1e-3
CONVERGENCE_DEG = 0.05

RESULTS = []


def report(capsys, number, ok, detail):
    line = f"CRITERION {number:>2} {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def within(x, expected, rel):
    return x is not None and abs(x - expected) <= rel * abs(expected)


def variants(rec, pm_type):
    base = rec.config(pm_type)
    return [base] if base.signal_idler_same_axis else [base, base.exchanged()]


def degenerate_root(rec, pm_type, theta, pump_range, expected):
    """Root nearest ``expected`` over both axis assignments (type-II labels are arbitrary)."""
    roots = [s for cfg in variants(rec, pm_type) for s in find_degenerate_locus(rec, cfg, theta, pump_range)]
    return min(roots, key=lambda s: abs(s.pump - expected)) if roots else None


def length_rows(rec, targets, pump_range):
    """(ok, text) for each (theta, pump, mm) degenerate target."""
    out = []
    for theta, pump, mm in targets:
        sol = degenerate_root(rec, "typeII", theta, pump_range, pump)
        if sol is None:
            out.append((False, f"theta={theta} pump {pump}: no root"))
            continue
        length = sol.abs_period / 1000.0
        ok = within(sol.pump, pump, WAVELENGTH_REL) and within(length, mm, LENGTH_REL)
        out.append((ok, f"theta={theta} pump {sol.pump * 1000:.1f} nm (exp {pump * 1000:.0f}), "
                        f"|L| {length:.2f} mm (exp {mm}), theta there {sol.theta:.2f}"))
    return out


def test_criterion_01_ktp_theta45(capsys, db):
    sol = degenerate_root(db["PPKTP"], "typeII", 45, (0.7, 0.9), 0.791)
    pump = sol and sol.pump
    report(capsys, 1, within(pump, 0.791, WAVELENGTH_REL), f"PPKTP type-II theta=45 pump {pump:.5f} um (exp 0.791 +-1%)")


def test_criterion_02_ktp_theta0(capsys, db):
    sol = degenerate_root(db["PPKTP"], "typeII", 0, (1.0, 1.5), 1.200)
    pump = sol and sol.pump
    report(capsys, 2, within(pump, 1.200, WAVELENGTH_REL), f"PPKTP type-II theta=0 pump {pump:.5f} um (exp 1.200 +-1%)")


def test_criterion_03_ktp_nondegenerate(capsys, db):
    rec = db["PPKTP"]
    cands = [s for cfg in variants(rec, "typeII")
             for s in find_nondegenerate_locus(rec, cfg, 45, 0.7456, (0.9, 1.3))
             if s.abs_period > rec.birefringent_threshold]
    sol = min(cands, key=lambda s: abs(s.triple.labeled()[1] - 1.0714))
    p, s, i = sol.triple.labeled()
    energy = abs(1 / p - 1 / s - 1 / i) * p
    ok = within(s, 1.0714, WAVELENGTH_REL) and energy <= ENERGY_REL and sol.abs_period > 250.0
    report(capsys, 3, ok, f"signal {s:.5f} um (exp 1.0714 +-1%), idler {i:.5f} um by energy "
                          f"(residual {energy:.1e}), |Lambda| {sol.abs_period:.0f} um (> 250)")


def test_criterion_04_ppln_type1(capsys, db):
    rec = db["PPLN"]
    pts = find_singular_points(rec, rec.config("typeI"), (0.6, 1.0))
    pump = min((s.pump for s in pts), key=lambda x: abs(x - 0.784)) if pts else None
    report(capsys, 4, within(pump, 0.784, WAVELENGTH_REL),
           f"PPLN type-I degenerate (GD_p = GD_s) pump {pump:.5f} um (exp 0.784 +-1%)")


def test_criterion_05_ppln_type2(capsys, db):
    sol = degenerate_root(db["PPLN"], "typeII", 45, (1.5, 2.0), 1.775)
    pump = sol and sol.pump
    report(capsys, 5, within(pump, 1.775, WAVELENGTH_REL), f"PPLN type-II theta=45 pump {pump:.5f} um (exp 1.775 +-1%)")


def test_criterion_06_csp(capsys, db):
    rows = length_rows(db["CSP"], ((45, 2.573, 1.6), (0, 2.090, 1.9), (0, 3.310, 2.2)), (1.5, 4.4))
    report(capsys, 6, all(ok for ok, _ in rows), "CSP type-II: " + "; ".join(t for _, t in rows))


def test_criterion_07_zgp(capsys, db):
    rows = length_rows(db["ZGP"], ((0, 3.014, 8.6), (0, 2.520, 1.3), (0, 3.692, 1.5)), (2.0, 4.5))
    report(capsys, 7, all(ok for ok, _ in rows), "ZGP type-II: " + "; ".join(t for _, t in rows))


MASK_CASES = [
    # material, pm_type, pump range, signal range, (pump floor, idler ceiling)
    ("OPGaAs", "type0", (1.0, 8.0), (1.5, 17.0), (1.73, None)),
    ("OPGaP", "type0", (0.6, 6.0), (0.7, 12.5), (1.0, None)),
    ("PPLN", "type0", (0.3, 2.2), (0.4, 6.0), (None, 4.5)),
    ("PPKTP", "typeII", (0.3, 2.2), (0.4, 6.0), (None, 4.5)),
    ("ZGP", "typeII", (1.9, 6.0), (2.0, 14.0), (None, 12.3)),
    ("CSP", "typeII", (1.0, 4.5), (1.2, 12.0), (None, 9.0)),
]


def test_criterion_08_masking(capsys, db):
    bad = []
    for mid, pm, pr, sr, (pump_floor, idler_ceiling) in MASK_CASES:
        g = scan(db[mid], db[mid].config(pm), pr, sr, 256, loci=False)
        P, _ = np.meshgrid(g.pump_samples, g.signal_samples)
        with np.errstate(all="ignore"):
            idler = g.idler
        if pump_floor is not None and np.any(g.ok & (P < pump_floor)):
            bad.append(f"{mid} pump<{pump_floor}")
        if idler_ceiling is not None and np.any(g.ok & (idler > idler_ceiling)):
            bad.append(f"{mid} idler>{idler_ceiling}")
    report(capsys, 8, not bad, f"{len(MASK_CASES)} maps checked" + (": " + ", ".join(bad) if bad else ""))


TYPE0_MAPS = [
    ("PPKTP", (0.4, 2.2), (0.5, 4.5)),
    ("PPLN", (0.4, 2.2), (0.5, 4.5)),
    ("OPGaP", (1.0, 6.0), (1.2, 12.5)),
    ("OPGaAs", (1.0, 8.0), (1.5, 17.0)),
]


def test_criterion_09_type0_degeneracy(capsys, db):
    problems = []
    for mid, pr, sr in TYPE0_MAPS:
        rec = db[mid]
        g = scan(rec, rec.config("type0"), pr, sr, 512)
        half = (g.signal_samples[1] - g.signal_samples[0]) / 2
        P, S = np.meshgrid(g.pump_samples, g.signal_samples)
        line = np.abs(S - 2 * P) <= half
        outside = (g.mask & np.uint8(MaskFlag.SIGNAL_OUT_OF_RANGE | MaskFlag.IDLER_BEYOND_TRANSPARENCY)) != 0
        unflagged = line & ~outside & ((g.mask & np.uint8(MaskFlag.SINGULAR)) == 0)
        if line.sum() == 0 or unflagged.any():
            problems.append(f"{mid}: {int(unflagged.sum())} unflagged line cells")
        for name, segs in g.loci.items():
            if name == "degeneracy":
                continue
            for seg in segs:
                seg = np.asarray(seg)
                if np.any(np.abs(seg[:, 1] - 2 * seg[:, 0]) <= half):
                    problems.append(f"{mid}: {name} vertex on the degeneracy line")
    report(capsys, 9, not problems, f"{len(TYPE0_MAPS)} type-0 maps at 512" + (": " + "; ".join(problems) if problems else ""))


def exact_output(seed_nm, mid_nm):
    return float(1 / (1 / Fraction(seed_nm, 1000) - 1 / Fraction(mid_nm, 1000)))


def test_criterion_10_upconversion(capsys, db):
    cases = [("OPGaP", 1250, 6028, "ingaas"), ("PPLN", 660, 3000, "si_spad"), ("PPLN", 660, 5000, "si_spad")]
    ok, parts = True, []
    for mid, seed, midir, band in cases:
        sol = upconvert(db[mid], seed / 1000, midir / 1000)
        exact = exact_output(seed, midir)
        good = abs(sol.output - exact) <= UPCONV_ABS_UM and sol.detector_band.value == band
        ok &= good
        parts.append(f"{seed}/{midir} nm -> {sol.output * 1000:.2f} nm {sol.detector_band.value}")
    # the quoted 1577.2 nm sits 0.18 nm from the energy relation; the relation is the oracle
    report(capsys, 10, ok, "; ".join(parts) + " (rational oracle, +-0.1 nm)")


def _energy(n=100_000):
    rng = np.random.default_rng(11)
    pumps = rng.uniform(0.3, 5.0, n)
    signals = pumps * rng.uniform(1.0001, 1.9999, n)
    worst = 0.0
    for p, s in zip(pumps, signals):
        t = WavelengthTriple.from_pump_signal(p, s)
        worst = max(worst, abs(1 / t.pump - 1 / t.signal - 1 / t.idler) * t.pump)
    return worst


def _fd(db):
    worst = 0.0
    for rec in db:
        for axis in (Axis.ORDINARY_Y, Axis.EXTRAORDINARY_Z):
            lo, hi = rec.evaluable_range(axis)
            lam = np.linspace(lo + 1e-3 * lo, hi - 1e-3 * hi, 100)
            a = np.asarray(dn_dlambda(rec, axis, lam))
            f = np.asarray(dn_dlambda(rec, axis, lam, method="fd"))
            worst = max(worst, float(np.max(np.abs(a - f) / np.abs(a))))
    return worst


def _residual(db):
    worst = 0.0
    for rec in db:
        for cfg in rec.configs:
            lo = max(rec.tpa_edge, rec.evaluable_range(cfg.pump_axis)[0])
            pumps = np.linspace(lo, lo * 1.8, 50)
            for p in pumps:
                for frac in np.linspace(1.05, 1.95, 50):
                    try:
                        sol = solve_period(rec, cfg, p, p * frac)
                    except DomainError:
                        continue
                    r = delta_k(rec, cfg, WavelengthTriple(sol.pump, *sol.triple.labeled()[1:]), period=sol.period)
                    worst = max(worst, abs(r))
    return worst


def _roots(db):
    worst, count = 0.0, 0
    jobs = [("PPKTP", (0.6, 1.5)), ("PPLN", (1.0, 2.2)), ("ZGP", (2.0, 4.5)), ("CSP", (1.5, 4.4))]
    for mid, rng in jobs:
        rec = db[mid]
        for cfg in variants(rec, "typeII"):
            for target in (0, 45, 90):
                for sol in find_degenerate_locus(rec, cfg, target, rng):
                    again = dispersion_parameter(rec, cfg, sol.triple)
                    worst = max(worst, abs(angle_difference(again.theta, target)))
                    count += 1
    return worst, count


def _convergence(db):
    """Worst probe difference between the 512 grid and a doubled grid, per material."""
    out = {}
    for mid, pr, sr in (("PPKTP", (0.7, 1.3), (0.9, 3.0)), ("ZGP", (2.0, 4.0), (2.6, 12.0))):
        rec = db[mid]
        cfg = rec.config("typeII")
        c = scan(rec, cfg, pr, sr, 512, loci=False)
        f = scan(rec, cfg, pr, sr, 1023, loci=False)
        rng = np.random.default_rng(3)
        pts = np.column_stack([rng.uniform(*sr, 2000), rng.uniform(*pr, 2000)])
        a = RegularGridInterpolator((c.signal_samples, c.pump_samples), c.theta)(pts)
        b = RegularGridInterpolator((f.signal_samples, f.pump_samples), f.theta)(pts)
        singular = ~c.ok | ~np.isfinite(c.theta) | (np.abs(c.theta) > 80)
        near = binary_dilation(singular, np.ones((3, 3)), iterations=2)
        n = len(c.signal_samples) - 2
        i = np.clip(np.searchsorted(c.signal_samples, pts[:, 0]) - 1, 0, n)
        j = np.clip(np.searchsorted(c.pump_samples, pts[:, 1]) - 1, 0, n)
        keep = np.isfinite(a) & np.isfinite(b) & ~(near[i, j] | near[i + 1, j] | near[i, j + 1] | near[i + 1, j + 1])
        out[mid] = float(np.max(np.abs(a[keep] - b[keep])))
    return out


def test_criterion_11_properties(capsys, db):
    energy = _energy()
    fd = _fd(db)
    dk = _residual(db)
    root, nroots = _roots(db)
    conv = _convergence(db)
    checks = [
        (energy <= ENERGY_REL, f"energy {energy:.1e} (<= 1e-12, 1e5 triples)"),
        (fd <= FD_REL, f"FD slope {fd:.1e} (<= 1e-8)"),
        (dk <= DK_ABS, f"dk residual {dk:.1e} rad/um (<= 1e-9)"),
        (nroots > 0 and root <= ROOT_DEG, f"{nroots} roots re-evaluate within {root:.1e} deg (<= 1e-3)"),
        (all(v <= CONVERGENCE_DEG for v in conv.values()),
         "map convergence " + ", ".join(f"{k} {v:.3f}" for k, v in conv.items()) + " deg (<= 0.05)"),
    ]
    report(capsys, 11, all(ok for ok, _ in checks), "; ".join(t for _, t in checks))


def _components(region):
    return label(region, structure=np.ones((3, 3)))[1]


def _topology(rec, pm_type, prange, srange, exchanged=False):
    cfg = rec.config(pm_type, exchanged)
    g = scan(rec, cfg, prange, srange, 512, loci=False)
    p = np.linspace(*prange, 1536)
    s = np.linspace(*srange, 1536)
    half = (g.signal_samples[1] - g.signal_samples[0]) / 2
    P, S = np.meshgrid(p, s)
    with np.errstate(all="ignore"):
        idler = np.where(S > P, P * S / (S - P), np.nan)
        ok = (S > P) & (P >= rec.tpa_edge) & (idler <= rec.transparency[1])
        if cfg.signal_idler_same_axis:
            ok &= np.abs(S - 2 * P) > half
        _, theta, _ = gvm_arrays(rec, cfg, np.where(ok, P, np.nan), np.where(ok, S, np.nan), np.where(ok, idler, np.nan))
    bands = ((0, 45), (45, 90.001))
    brute = tuple(_components(ok & (theta > lo) & (theta < hi)) for lo, hi in bands)
    mapped = tuple(_components(g.ok & (g.theta > lo) & (g.theta < hi)) for lo, hi in bands)
    return brute, mapped


def test_criterion_12_topology(capsys, db):
    cases = [("PPLN", "typeI", (0.6, 2.2), (0.7, 4.4)), ("PPKTP", "typeII", (0.7, 1.3), (0.9, 3.0))]
    ok, parts = True, []
    for mid, pm, pr, sr in cases:
        brute, mapped = _topology(db[mid], pm, pr, sr)
        ok &= brute == mapped
        parts.append(f"{mid} {pm} regions (0,45)/(45,90] map {mapped} vs brute force {brute}")
    report(capsys, 12, ok, "; ".join(parts))
