"""Seeded type-0 interaction that shifts a mid-IR photon to a detector band.

The seed plays the pump role: seed → output + mid_ir, so
1/output = 1/seed − 1/mid_ir and the grating period is the type-0 Λ of
that triple.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError
from .materials import DEFAULT_TEMPERATURE_K, PmType
from .phasematch import WavelengthTriple, solve_triple


class DetectorBand(str, Enum):
    SI_SPAD = "si_spad"
    INGAAS = "ingaas"
    NONE = "none"


# Half-open [lo, hi) intervals in µm.
DETECTOR_BANDS = {
    DetectorBand.SI_SPAD: (0.7, 0.9),
    DetectorBand.INGAAS: (1.5, 1.7),
}


def classify_band(output_um, bands=None):
    bands = DETECTOR_BANDS if bands is None else bands
    for band, (lo, hi) in bands.items():
        if lo <= output_um < hi:
            return band
    return DetectorBand.NONE


@dataclass(frozen=True)
class UpconversionSolution:
    material_id: str
    seed: float
    mid_ir: float
    output: float
    period: float
    detector_band: DetectorBand
    within_transparency: bool
    seed_above_tpa: bool
    temperature_k: float = DEFAULT_TEMPERATURE_K

    def as_dict(self):
        return {
            "material": self.material_id,
            "seed_um": self.seed,
            "mid_ir_um": self.mid_ir,
            "output_um": self.output,
            "period_um": self.period if math.isfinite(self.period) else "inf",
            "abs_period_um": abs(self.period) if math.isfinite(self.period) else "inf",
            "detector_band": self.detector_band.value,
            "within_transparency": self.within_transparency,
            "seed_above_tpa": self.seed_above_tpa,
            "temperature_k": self.temperature_k,
        }


def output_wavelength(seed, mid_ir):
    seed, mid_ir = float(seed), float(mid_ir)
    if not (0 < seed < mid_ir):
        raise DomainError(f"seed {seed} um must be positive and shorter than the mid-IR photon {mid_ir} um")
    return seed * mid_ir / (mid_ir - seed)


def _solve(material, triple, temp_k):
    config = material.config(PmType.TYPE0)
    sol = solve_triple(material, config, triple, temp_k)
    return UpconversionSolution(
        material_id=material.id,
        seed=triple.pump,
        mid_ir=triple.idler,
        output=triple.signal,
        period=sol.period,
        detector_band=classify_band(triple.signal),
        within_transparency=sol.feasible.within_transparency,
        seed_above_tpa=sol.feasible.pump_above_tpa,
        temperature_k=float(temp_k),
    )


def upconvert(material, seed, mid_ir, temp_k=DEFAULT_TEMPERATURE_K):
    """Output wavelength and type-0 period for converting ``mid_ir`` with ``seed``."""
    output = output_wavelength(seed, mid_ir)
    if output >= float(mid_ir):
        # the mid-IR photon has to be the longer of the two daughters
        raise DomainError(f"mid-IR photon {mid_ir} um must be longer than twice the seed {seed} um")
    return _solve(material, WavelengthTriple(float(seed), output, float(mid_ir)), temp_k)


def seed_for_target(material, mid_ir, target_output, temp_k=DEFAULT_TEMPERATURE_K):
    """Seed wavelength that sends ``mid_ir`` to ``target_output``."""
    mid_ir, target = float(mid_ir), float(target_output)
    if not (0 < target < mid_ir):
        raise DomainError(f"target {target} um must be positive and shorter than the mid-IR photon {mid_ir} um")
    seed = target * mid_ir / (target + mid_ir)
    return _solve(material, WavelengthTriple(seed, target, mid_ir), temp_k)
