"""Closed set of dispersion formulas and their analytic wavelength derivatives.

Every formula takes vacuum wavelengths in micrometres and temperatures in
kelvin. Formulas whose published fit uses Celsius carry their reference
temperature (in Celsius) as the last coefficient.

Coefficient layouts (``C`` values are squared resonance wavelengths, µm²)::

    constant     [n]
    sellmeier    [A, B1, C1, B2, C2, ...]       n² = A + Σ B λ²/(λ² - C)
    sellmeier_ir [A, F, B1, C1, ...]            n² = A - F λ² + Σ B λ²/(λ² - C)
    pole         [A, B1, C1, ...]               n² = A + Σ B/(λ² - C)
    pole_thermo  [A, B1, C1, B2, C2, a3, a2, a1, a0, T0]
                 n = sqrt(A + Σ B/(λ² - C)) + 1e-5 (a3/λ³ + a2/λ² + a1/λ + a0)(T - T0)
    gayer        [a1, a2, a3, a4, a5, a6, b1, b2, b3, b4, T0]
                 f = (T - T0)(T + T0 + 546.32), T in Celsius
                 n² = a1 + b1 f + (a2 + b2 f)/(λ² - (a3 + b3 f)²) + (a4 + b4 f)/(λ² - a5²) - a6 λ²
    skauli       [A, G1, G3, E0, E0_t1, E0_t2, E1, E1_t1, E2, E2_t1, E3, E3_t1, T0]
                 photon energy E = hc/λ (eV), band energies linear/quadratic in T - T0
                 n² = 1 + A/π ln((E1²-E²)/(E0²-E²)) + G1/π ln((E2²-E²)/(E1²-E²)) + G3/(E3²-E²)
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

ZERO_CELSIUS = 273.15
HC_EV_UM = 1.239841984  # h*c in eV*um


class FormId(str, Enum):
    CONSTANT = "constant"
    SELLMEIER = "sellmeier"
    SELLMEIER_IR = "sellmeier_ir"
    POLE = "pole"
    POLE_THERMO = "pole_thermo"
    GAYER = "gayer"
    SKAULI = "skauli"


_TEMPERATURE_FORMS = {FormId.POLE_THERMO, FormId.GAYER, FormId.SKAULI}


def _check_layout(form_id, coeffs):
    n = len(coeffs)
    if form_id is FormId.CONSTANT:
        return n == 1
    if form_id is FormId.SELLMEIER or form_id is FormId.POLE:
        return n >= 1 and n % 2 == 1
    if form_id is FormId.SELLMEIER_IR:
        return n >= 2 and n % 2 == 0
    if form_id is FormId.POLE_THERMO:
        return n == 10
    if form_id is FormId.GAYER:
        return n == 11
    if form_id is FormId.SKAULI:
        return n == 13
    return False


@dataclass(frozen=True)
class SellmeierForm:
    """One published dispersion fit for one polarization axis."""

    form_id: FormId
    coefficients: tuple
    valid_range: tuple
    source_tag: str
    temperature_dependent: bool = False
    note: str = field(default="", compare=True)

    def __post_init__(self):
        object.__setattr__(self, "form_id", FormId(self.form_id))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        lo, hi = (float(v) for v in self.valid_range)
        object.__setattr__(self, "valid_range", (lo, hi))
        if not _check_layout(self.form_id, self.coefficients):
            raise ValueError(
                f"{len(self.coefficients)} coefficients do not fit the "
                f"{self.form_id.value!r} layout"
            )
        if not 0 < lo < hi:
            raise ValueError(f"valid_range must satisfy 0 < lo < hi, got {self.valid_range}")
        if self.temperature_dependent != (self.form_id in _TEMPERATURE_FORMS):
            raise ValueError(
                f"temperature_dependent={self.temperature_dependent} contradicts form "
                f"{self.form_id.value!r}"
            )

    def covers(self, lam):
        lo, hi = self.valid_range
        lam = np.asarray(lam)
        return (lam >= lo) & (lam <= hi)

    def index(self, lam, temp_k=300.0):
        """Refractive index; no range checking (callers mask)."""
        return _INDEX[self.form_id](np.asarray(lam), self.coefficients, temp_k)

    def slope(self, lam, temp_k=300.0):
        """Analytic dn/dλ in µm⁻¹, or ``None`` if the form has no closed form."""
        fn = _SLOPE.get(self.form_id)
        if fn is None:
            return None
        return fn(np.asarray(lam), self.coefficients, temp_k)

    @property
    def has_analytic_slope(self):
        return self.form_id in _SLOPE


# -- constant ---------------------------------------------------------------

def _constant(lam, c, temp_k):
    return np.full_like(lam, c[0], dtype=np.result_type(lam, float))


def _constant_slope(lam, c, temp_k):
    return np.zeros_like(lam, dtype=np.result_type(lam, float))


# -- sellmeier / sellmeier_ir ---------------------------------------------

def _sellmeier_sq(lam, a, f, pairs):
    l2 = lam * lam
    n2 = a - f * l2
    dn2 = -2.0 * f * lam
    for b, c in pairs:
        den = l2 - c
        n2 = n2 + b * l2 / den
        dn2 = dn2 - 2.0 * b * c * lam / (den * den)
    return n2, dn2


def _pairs(seq):
    return list(zip(seq[0::2], seq[1::2]))


def _sellmeier(lam, c, temp_k):
    n2, _ = _sellmeier_sq(lam, c[0], 0.0, _pairs(c[1:]))
    return np.sqrt(n2)


def _sellmeier_slope(lam, c, temp_k):
    n2, dn2 = _sellmeier_sq(lam, c[0], 0.0, _pairs(c[1:]))
    return dn2 / (2.0 * np.sqrt(n2))


def _sellmeier_ir(lam, c, temp_k):
    n2, _ = _sellmeier_sq(lam, c[0], c[1], _pairs(c[2:]))
    return np.sqrt(n2)


def _sellmeier_ir_slope(lam, c, temp_k):
    n2, dn2 = _sellmeier_sq(lam, c[0], c[1], _pairs(c[2:]))
    return dn2 / (2.0 * np.sqrt(n2))


# -- pole / pole_thermo --------------------------------------------------------

def _pole_sq(lam, a, pairs):
    l2 = lam * lam
    n2 = a + 0.0 * lam
    dn2 = 0.0 * lam
    for b, c in pairs:
        den = l2 - c
        n2 = n2 + b / den
        dn2 = dn2 - 2.0 * b * lam / (den * den)
    return n2, dn2


def _pole(lam, c, temp_k):
    n2, _ = _pole_sq(lam, c[0], _pairs(c[1:]))
    return np.sqrt(n2)


def _pole_slope(lam, c, temp_k):
    n2, dn2 = _pole_sq(lam, c[0], _pairs(c[1:]))
    return dn2 / (2.0 * np.sqrt(n2))


def _pole_thermo(lam, c, temp_k):
    n2, _ = _pole_sq(lam, c[0], _pairs(c[1:5]))
    a3, a2, a1, a0, t0 = c[5:]
    dt = temp_k - ZERO_CELSIUS - t0
    return np.sqrt(n2) + 1e-5 * (a3 / lam**3 + a2 / lam**2 + a1 / lam + a0) * dt


def _pole_thermo_slope(lam, c, temp_k):
    n2, dn2 = _pole_sq(lam, c[0], _pairs(c[1:5]))
    a3, a2, a1, a0, t0 = c[5:]
    dt = temp_k - ZERO_CELSIUS - t0
    return dn2 / (2.0 * np.sqrt(n2)) + 1e-5 * (
        -3.0 * a3 / lam**4 - 2.0 * a2 / lam**3 - a1 / lam**2
    ) * dt


# -- gayer (temperature-dependent LiNbO3) ------------------------------------

def _gayer_terms(lam, c, temp_k):
    a1, a2, a3, a4, a5, a6, b1, b2, b3, b4, t0 = c
    t = temp_k - ZERO_CELSIUS
    f = (t - t0) * (t + t0 + 2 * 273.16)
    l2 = lam * lam
    uv = a3 + b3 * f
    d1 = l2 - uv * uv
    d2 = l2 - a5 * a5
    n2 = a1 + b1 * f + (a2 + b2 * f) / d1 + (a4 + b4 * f) / d2 - a6 * l2
    dn2 = (
        -2.0 * lam * (a2 + b2 * f) / (d1 * d1)
        - 2.0 * lam * (a4 + b4 * f) / (d2 * d2)
        - 2.0 * a6 * lam
    )
    return n2, dn2


def _gayer(lam, c, temp_k):
    n2, _ = _gayer_terms(lam, c, temp_k)
    return np.sqrt(n2)


def _gayer_slope(lam, c, temp_k):
    n2, dn2 = _gayer_terms(lam, c, temp_k)
    return dn2 / (2.0 * np.sqrt(n2))


# -- skauli (temperature-dependent GaAs) ------------------------------------

def _skauli_terms(lam, c, temp_k):
    a, g1, g3, e0, e0t1, e0t2, e1, e1t1, e2, e2t1, e3, e3t1, t0 = c
    dt = temp_k - ZERO_CELSIUS - t0
    e0 = e0 + e0t1 * dt + e0t2 * dt * dt
    e1 = e1 + e1t1 * dt
    e2 = e2 + e2t1 * dt
    e3 = e3 + e3t1 * dt
    e = HC_EV_UM / lam
    ee = e * e
    q0, q1, q2, q3 = e0 * e0 - ee, e1 * e1 - ee, e2 * e2 - ee, e3 * e3 - ee
    n2 = 1.0 + a / np.pi * np.log(q1 / q0) + g1 / np.pi * np.log(q2 / q1) + g3 / q3
    # d(n^2)/dE, then chain rule with dE/dλ = -E/λ
    dn2_de = (
        a / np.pi * (-2.0 * e / q1 + 2.0 * e / q0)
        + g1 / np.pi * (-2.0 * e / q2 + 2.0 * e / q1)
        + g3 * 2.0 * e / (q3 * q3)
    )
    return n2, dn2_de * (-e / lam)


def _skauli(lam, c, temp_k):
    n2, _ = _skauli_terms(lam, c, temp_k)
    return np.sqrt(n2)


def _skauli_slope(lam, c, temp_k):
    n2, dn2 = _skauli_terms(lam, c, temp_k)
    return dn2 / (2.0 * np.sqrt(n2))


_INDEX = {
    FormId.CONSTANT: _constant,
    FormId.SELLMEIER: _sellmeier,
    FormId.SELLMEIER_IR: _sellmeier_ir,
    FormId.POLE: _pole,
    FormId.POLE_THERMO: _pole_thermo,
    FormId.GAYER: _gayer,
    FormId.SKAULI: _skauli,
}

_SLOPE = {
    FormId.CONSTANT: _constant_slope,
    FormId.SELLMEIER: _sellmeier_slope,
    FormId.SELLMEIER_IR: _sellmeier_ir_slope,
    FormId.POLE: _pole_slope,
    FormId.POLE_THERMO: _pole_thermo_slope,
    FormId.GAYER: _gayer_slope,
    FormId.SKAULI: _skauli_slope,
}
