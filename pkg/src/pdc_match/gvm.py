"""Dispersion parameter D, GVM angle θ and locus root-finding.

D = −(GD_p − GD_s)/(GD_p − GD_i) and θ = arctan(D) in degrees, folded into
(−90, 90] so that θ = 90 stands for D → ±∞.  θ = 0 and θ = 90 are the two
asymmetric group-velocity-matched regimes, θ = 45 the symmetric one.

Roots are found on the smooth field

    g(θt) = (GD_s − GD_p) cos θt − (GD_p − GD_i) sin θt,

which vanishes exactly where tan θ = tan θt.  Unlike θ − θt it has no jump
where D passes through ±∞, so sign-change bracketing does not see false
roots at the poles of D.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import bisect

from .dispersion import group_delay_array
from .errors import DomainError
from .materials import DEFAULT_TEMPERATURE_K, check_evaluable
from .phasematch import WavelengthTriple, idler_wavelength, solve_triple

REGIME_TOLERANCE_DEG = 0.5
DEGENERACY_REL_TOL = 1e-9
PRESCAN_STEP_UM = 1e-3     # 1 nm
ROOT_XTOL_UM = 1e-7        # 1e-4 nm
ROOT_THETA_TOL_DEG = 1e-3


class Regime(str, Enum):
    ASYMMETRIC_ZERO = "asymmetric_zero"
    SYMMETRIC = "symmetric"
    ASYMMETRIC_NINETY = "asymmetric_ninety"
    GENERIC = "generic"
    SINGULAR = "singular"


@dataclass(frozen=True)
class GvmPoint:
    triple: WavelengthTriple
    D: float
    theta: float
    regime: Regime

    @property
    def singular(self):
        return self.regime is Regime.SINGULAR


def angle_difference(a, b):
    """a − b folded into [−90, 90): θ and θ ± 180 describe the same D."""
    return (np.asarray(a) - np.asarray(b) + 90.0) % 180.0 - 90.0


def theta_from_d(D):
    """arctan(D) in degrees, in (−90, 90]; ±inf map to 90."""
    theta = np.degrees(np.arctan(np.asarray(D, dtype=float)))
    return np.where(theta <= -90.0, 90.0, theta)


def classify(theta, singular=False):
    if singular or math.isnan(theta):
        return Regime.SINGULAR
    if abs(theta) <= REGIME_TOLERANCE_DEG:
        return Regime.ASYMMETRIC_ZERO
    if abs(theta - 45.0) <= REGIME_TOLERANCE_DEG:
        return Regime.SYMMETRIC
    if abs(theta) >= 90.0 - REGIME_TOLERANCE_DEG:
        return Regime.ASYMMETRIC_NINETY
    return Regime.GENERIC


def group_delays(material, config, pump, signal, idler, temp_k=DEFAULT_TEMPERATURE_K):
    """GD_p, GD_s, GD_i arrays (s/m); signal/idler in the caller's labelling."""
    out = []
    for lam, axis in ((pump, config.pump_axis), (signal, config.signal_axis), (idler, config.idler_axis)):
        out.append(group_delay_array(material, axis, lam, temp_k)[2])
    return out


def gvm_arrays(material, config, pump, signal, idler, temp_k=DEFAULT_TEMPERATURE_K, singular_mask=None):
    """Vectorized (D, θ, singular) for broadcastable wavelength arrays.

    A cell is singular when both GD differences vanish, or when it is given
    as such by ``singular_mask`` (the sweep marks the type-0/I degeneracy
    line that way).  Singular cells get D = θ = NaN.
    """
    gp, gs, gi = group_delays(material, config, pump, signal, idler, temp_k)
    num = gs - gp
    den = gp - gi
    with np.errstate(divide="ignore", invalid="ignore"):
        D = num / den
    singular = (num == 0) & (den == 0)
    if singular_mask is not None:
        singular = singular | singular_mask
    D = np.where(singular, np.nan, D)
    D = np.where(~singular & (den == 0), np.inf, D)
    theta = np.where(np.isnan(D), np.nan, theta_from_d(np.where(np.isnan(D), 0.0, D)))
    return D, theta, singular


def matching_field(material, config, pump, signal, idler, theta_target, temp_k=DEFAULT_TEMPERATURE_K):
    """g(θt) in units of s/m; zero exactly on the θ = θt locus."""
    gp, gs, gi = group_delays(material, config, pump, signal, idler, temp_k)
    t = math.radians(theta_target)
    return (gs - gp) * math.cos(t) - (gp - gi) * math.sin(t)


def same_axis_degenerate(config, triple):
    return config.signal_idler_same_axis and triple.is_degenerate


def dispersion_parameter(material, config, triple, temp_k=DEFAULT_TEMPERATURE_K):
    """D, θ and regime for one wavelength triple.

    Type-0 and type-I triples at exact degeneracy are reported singular
    (D = NaN): there the signal and idler are the same mode and θ is not a
    property of the pair.
    """
    p, s, i = triple.labeled()
    check_evaluable(material, config.pump_axis, p)
    check_evaluable(material, config.signal_axis, s)
    check_evaluable(material, config.idler_axis, i)
    D, theta, singular = gvm_arrays(
        material, config, p, s, i, temp_k, singular_mask=same_axis_degenerate(config, triple)
    )
    D, theta, singular = float(D), float(theta), bool(singular)
    return GvmPoint(triple, D, theta, classify(theta, singular))


# -- locus finders -------------------------------------------------------------

def _scan_roots(field, lo, hi, step):
    """Sign-change brackets of ``field`` on a uniform pre-scan, bisected."""
    n = max(int(math.ceil((hi - lo) / step)), 1) + 1
    x = np.linspace(lo, hi, n)
    g = field(x)
    roots = []
    for k in range(n - 1):
        a, b = g[k], g[k + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a == 0.0:
            roots.append(float(x[k]))
            continue
        if a * b < 0:
            roots.append(bisect(lambda v: float(field(np.array(v))), x[k], x[k + 1], xtol=ROOT_XTOL_UM))
    if n > 1 and g[-1] == 0.0:
        roots.append(float(x[-1]))
    return roots


def _check_range(rng, what):
    lo, hi = (float(v) for v in rng)
    if not 0 < lo < hi:
        raise DomainError(f"{what} range must satisfy 0 < lo < hi, got {rng}")
    return lo, hi


def _accept(solution, theta_target):
    return (
        solution.regime is not Regime.SINGULAR
        and abs(float(angle_difference(solution.theta, theta_target))) <= ROOT_THETA_TOL_DEG
    )


def find_degenerate_locus(material, config, theta_target, pump_range, temp_k=DEFAULT_TEMPERATURE_K,
                          step=PRESCAN_STEP_UM):
    """Pump wavelengths where the degenerate pair (λs = λi = 2λp) has θ = θt.

    Returns a list of :class:`~pdc_match.phasematch.MatchSolution`, one per
    root, in increasing pump wavelength.  Empty when θ never crosses θt.
    """
    lo, hi = _check_range(pump_range, "pump")
    for lam in (lo, hi):
        check_evaluable(material, config.pump_axis, lam)
        check_evaluable(material, config.signal_axis, 2 * lam)
        check_evaluable(material, config.idler_axis, 2 * lam)

    def field(p):
        return matching_field(material, config, p, 2 * p, 2 * p, theta_target, temp_k)

    out = []
    for root in _scan_roots(field, lo, hi, step):
        sol = solve_triple(material, config, WavelengthTriple.degenerate(root), temp_k)
        if _accept(sol, theta_target):
            out.append(sol)
    return out


def find_nondegenerate_locus(material, config, theta_target, pump, signal_range,
                             temp_k=DEFAULT_TEMPERATURE_K, step=PRESCAN_STEP_UM):
    """Signal wavelengths at fixed pump where θ = θt.

    The signal keeps the config's signal axis even when it is the longer
    photon; its idler is the energy-conservation partner.
    """
    pump = float(pump)
    lo, hi = _check_range(signal_range, "signal")
    if lo <= pump:
        raise DomainError(f"signal range must lie above the pump wavelength {pump} um")
    for lam in (lo, hi):
        check_evaluable(material, config.signal_axis, lam)
        check_evaluable(material, config.idler_axis, idler_wavelength(pump, lam))
    check_evaluable(material, config.pump_axis, pump)

    def field(s):
        return matching_field(material, config, pump, s, pump * s / (s - pump), theta_target, temp_k)

    out = []
    for root in _scan_roots(field, lo, hi, step):
        sol = solve_triple(material, config, _labeled_triple(pump, root), temp_k)
        if _accept(sol, theta_target):
            out.append(sol)
    return out


def _labeled_triple(pump, signal):
    """Triple that keeps ``signal`` as the labelled signal photon."""
    return WavelengthTriple(pump, signal, idler_wavelength(pump, signal))


def find_singular_points(material, config, pump_range, temp_k=DEFAULT_TEMPERATURE_K, step=PRESCAN_STEP_UM):
    """Degenerate type-0/I points where the pump travels with the pair.

    On the degeneracy line of a same-axis config both GD differences reduce
    to GD_p(λp) − GD_s(2λp); its zeros are where every θ-contour of the map
    meets the degeneracy line.  Returns MatchSolutions (regime singular).
    """
    if not config.signal_idler_same_axis:
        raise DomainError("singular points exist only for type-0 and type-I configurations")
    lo, hi = _check_range(pump_range, "pump")
    for lam in (lo, hi):
        check_evaluable(material, config.pump_axis, lam)
        check_evaluable(material, config.signal_axis, 2 * lam)

    def field(p):
        gp, gs, _ = group_delays(material, config, p, 2 * p, 2 * p, temp_k)
        return gp - gs

    return [
        solve_triple(material, config, WavelengthTriple.degenerate(r), temp_k)
        for r in _scan_roots(field, lo, hi, step)
    ]
