"""Collinear wave-vector mismatch and first-order QPM period.

Sign convention: Δk = 2π (n_p/λp − n_s/λs − n_i/λi − 1/Λ), wavelengths in µm,
so Δk is in rad/µm and Λ in µm.  Λ keeps its sign; a negative period means
the grating vector points the other way (reversed domain order).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .materials import DEFAULT_TEMPERATURE_K, check_evaluable, index_and_slope

ENERGY_REL_TOL = 1e-12


def idler_wavelength(pump, signal):
    """Energy-conservation partner (1/λp − 1/λs)⁻¹ of ``signal``."""
    pump = float(pump)
    signal = float(signal)
    if not (pump > 0 and signal > 0):
        raise DomainError(f"wavelengths must be positive (pump {pump}, signal {signal})")
    if signal <= pump:
        raise DomainError(f"signal {signal} um must be longer than pump {pump} um")
    return pump * signal / (signal - pump)


@dataclass(frozen=True)
class WavelengthTriple:
    """Pump, signal and idler wavelengths (µm) with signal <= idler.

    ``swapped`` records that the caller's "signal" was the longer photon.
    Axis assignment for type-II follows the caller's labels, see
    :meth:`labeled`.
    """

    pump: float
    signal: float
    idler: float
    swapped: bool = False

    def __post_init__(self):
        p, s, i = float(self.pump), float(self.signal), float(self.idler)
        swapped = bool(self.swapped)
        if s > i:
            s, i = i, s
            swapped = not swapped
        object.__setattr__(self, "pump", p)
        object.__setattr__(self, "signal", s)
        object.__setattr__(self, "idler", i)
        object.__setattr__(self, "swapped", swapped)
        if min(p, s, i) <= 0:
            raise DomainError("wavelengths must be positive")
        err = abs(1.0 / p - 1.0 / s - 1.0 / i) * p
        if err > ENERGY_REL_TOL:
            raise DomainError(
                f"1/{p} != 1/{s} + 1/{i} (relative error {err:.2e}); energy is not conserved"
            )

    @classmethod
    def from_pump_signal(cls, pump, signal):
        return cls(pump, signal, idler_wavelength(pump, signal))

    @classmethod
    def degenerate(cls, pump):
        pump = float(pump)
        return cls(pump, 2.0 * pump, 2.0 * pump)

    def labeled(self):
        """(pump, signal, idler) in the caller's original labelling."""
        if self.swapped:
            return self.pump, self.idler, self.signal
        return self.pump, self.signal, self.idler

    @property
    def is_degenerate(self):
        return abs(self.idler - self.signal) <= 1e-9 * self.idler

    def as_dict(self):
        return {"pump_um": self.pump, "signal_um": self.signal, "idler_um": self.idler, "swapped": self.swapped}


@dataclass(frozen=True)
class Feasibility:
    within_transparency: bool
    pump_above_tpa: bool
    birefringent_qpm_possible: bool

    def as_dict(self):
        return {
            "within_transparency": self.within_transparency,
            "pump_above_tpa": self.pump_above_tpa,
            "birefringent_qpm_possible": self.birefringent_qpm_possible,
        }


@dataclass(frozen=True)
class MatchSolution:
    material_id: str
    triple: WavelengthTriple
    config: object
    period: float  # signed Λ in µm, +inf when birefringently matched
    delta_k_residual: float
    D: float
    theta: float
    regime: object
    feasible: Feasibility
    temperature_k: float = DEFAULT_TEMPERATURE_K

    @property
    def abs_period(self):
        return abs(self.period)

    @property
    def pump(self):
        return self.triple.pump

    def as_dict(self):
        p, s, i = self.triple.labeled()
        return {
            "material": self.material_id,
            "type": self.config.pm_type.value,
            "axes": {
                "pump": self.config.pump_axis.value,
                "signal": self.config.signal_axis.value,
                "idler": self.config.idler_axis.value,
            },
            "d_eff_pm_per_v": self.config.d_eff_max,
            "temperature_k": self.temperature_k,
            "pump_um": p,
            "signal_um": s,
            "idler_um": i,
            "period_um": _json_number(self.period),
            "abs_period_um": _json_number(abs(self.period)),
            "delta_k_residual_rad_per_um": self.delta_k_residual,
            "D": None if math.isnan(self.D) else _json_number(self.D),
            "theta_deg": None if math.isnan(self.theta) else self.theta,
            "regime": self.regime.value,
            "feasible": self.feasible.as_dict(),
        }


def _json_number(x):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# -- vectorized kernels --------------------------------------------------------

def axis_terms(material, config, pump, signal, idler, temp_k, slope=True):
    """(n, dn/dλ) for each photon on its configured axis.

    ``signal``/``idler`` are in the caller's labelling.  Arrays broadcast;
    values outside any fit's range come back NaN.
    """
    out = []
    for lam, axis in ((pump, config.pump_axis), (signal, config.signal_axis), (idler, config.idler_axis)):
        out.append(index_and_slope(material, axis, np.asarray(lam, dtype=float), temp_k, slope=slope))
    return out


def inverse_period_array(material, config, pump, signal, idler, temp_k=DEFAULT_TEMPERATURE_K):
    """n_p/λp − n_s/λs − n_i/λi in µm⁻¹ (the 1/Λ that zeroes Δk)."""
    (np_, _), (ns, _), (ni, _) = axis_terms(material, config, pump, signal, idler, temp_k, slope=False)
    return np_ / pump - ns / signal - ni / idler


def _check_triple(material, config, triple):
    p, s, i = triple.labeled()
    check_evaluable(material, config.pump_axis, p)
    check_evaluable(material, config.signal_axis, s)
    check_evaluable(material, config.idler_axis, i)
    return p, s, i


def delta_k(material, config, triple, period=None, temp_k=DEFAULT_TEMPERATURE_K):
    """Wave-vector mismatch in rad/µm; the grating term is dropped if ``period`` is None."""
    p, s, i = _check_triple(material, config, triple)
    k = float(inverse_period_array(material, config, p, s, i, temp_k))
    if period is not None and not math.isinf(period):
        k -= 1.0 / period
    return 2.0 * math.pi * k


def feasibility(material, triple, period):
    lo, hi = material.transparency
    inside = lo <= triple.pump and triple.idler <= hi and lo <= triple.signal
    threshold = material.birefringent_threshold
    if math.isinf(period):
        biref = True
    else:
        biref = threshold is not None and abs(period) > threshold
    return Feasibility(bool(inside), bool(triple.pump >= material.tpa_edge), bool(biref))


def solve_period(material, config, pump, signal, temp_k=DEFAULT_TEMPERATURE_K):
    """Grating period that zeroes Δk, with D, θ and feasibility flags."""
    return solve_triple(material, config, WavelengthTriple.from_pump_signal(pump, signal), temp_k)


def solve_triple(material, config, triple, temp_k=DEFAULT_TEMPERATURE_K):
    """:func:`solve_period` for an already-built :class:`WavelengthTriple`."""
    from .gvm import dispersion_parameter

    p, s, i = _check_triple(material, config, triple)
    inv = float(inverse_period_array(material, config, p, s, i, temp_k))
    period = math.inf if inv == 0.0 else 1.0 / inv
    residual = delta_k(material, config, triple, period, temp_k)
    point = dispersion_parameter(material, config, triple, temp_k)
    return MatchSolution(
        material_id=material.id,
        triple=triple,
        config=config,
        period=period,
        delta_k_residual=residual,
        D=point.D,
        theta=point.theta,
        regime=point.regime,
        feasible=feasibility(material, triple, period),
        temperature_k=float(temp_k),
    )
