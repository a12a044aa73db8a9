"""Group delays and first derivatives of the refractive index."""

from dataclasses import dataclass

import numpy as np

from .materials import Axis, DEFAULT_TEMPERATURE_K, check_evaluable, index_and_slope

C_M_PER_S = 299_792_458.0

# Central difference with step h = FD_REL_STEP * λ, refined once by
# Richardson extrapolation against the h/2 estimate.  Evaluated in
# extended precision where the platform has it: with float64 the rounding
# term alone (~eps*n/h ≈ 1e-10 relative) already eats the 1e-8 budget for
# weakly dispersive media, while np.longdouble on x86-64 brings it to ~1e-13.
FD_REL_STEP = 1e-6


def finite_difference_slope(fn, lam, rel_step=FD_REL_STEP):
    """dn/dλ of ``fn`` at ``lam`` by Richardson-refined central differences."""
    x = np.asarray(lam, dtype=np.longdouble)
    h = x * rel_step
    d1 = (fn(x + h) - fn(x - h)) / (2 * h)
    d2 = (fn(x + h / 2) - fn(x - h / 2)) / h
    return ((4 * d2 - d1) / 3).astype(float)


def _as_output(arr):
    return arr if np.ndim(arr) else float(arr)


def dn_dlambda(material, axis, lam, temp_k=DEFAULT_TEMPERATURE_K, method="analytic"):
    """dn/dλ in µm⁻¹ on ``axis``; averaged like the index itself.

    ``method="fd"`` forces the finite-difference path for every fit.
    """
    check_evaluable(material, axis, lam)
    if method == "analytic":
        _, d = index_and_slope(material, axis, lam, temp_k)
    elif method == "fd":
        d = finite_difference_slope(
            lambda x: index_and_slope(material, axis, x, temp_k, slope=False)[0], lam
        )
    else:
        raise ValueError(f"method must be 'analytic' or 'fd', not {method!r}")
    return _as_output(np.asarray(d, dtype=float))


@dataclass(frozen=True)
class GroupDelay:
    """Group delay per unit length, s/m, with the index data behind it."""

    value: float
    wavelength: float
    axis: Axis
    material_id: str
    n: float
    group_index: float


def group_delay_array(material, axis, lam, temp_k=DEFAULT_TEMPERATURE_K):
    """Vectorized (n, group index, GD) with NaN where nothing is evaluable."""
    lam = np.asarray(lam, dtype=float)
    n, d = index_and_slope(material, axis, lam, temp_k)
    ng = n - lam * d
    return n, ng, ng / C_M_PER_S


def group_delay(material, axis, lam, temp_k=DEFAULT_TEMPERATURE_K):
    """GD = (n − λ dn/dλ)/c for a single wavelength."""
    check_evaluable(material, axis, lam)
    axis = Axis.parse(axis)
    n, ng, gd = group_delay_array(material, axis, float(lam), temp_k)
    return GroupDelay(float(gd), float(lam), axis, material.id, float(n), float(ng))
