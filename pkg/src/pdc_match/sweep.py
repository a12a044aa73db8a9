"""Pump × signal maps of θ and |Λ| with feasibility masks and iso-θ loci.

Layers are stored with shape ``(len(signal_samples), len(pump_samples))``:
rows follow the signal axis, columns the pump axis, so ``theta[j, i]`` is
the cell at ``(pump_samples[i], signal_samples[j])``.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import IntFlag
from pathlib import Path

import numpy as np
from skimage.measure import find_contours

from .errors import DomainError
from .gvm import angle_difference, gvm_arrays, matching_field
from .materials import DEFAULT_TEMPERATURE_K, PhaseMatchConfig
from .phasematch import inverse_period_array

DEFAULT_RESOLUTION = 512
LOCUS_TARGETS = (0.0, 45.0, 90.0)
REFINE_XTOL_UM = 1e-6        # 1e-3 nm
LOCUS_THETA_TOL_DEG = 0.1


class MaskFlag(IntFlag):
    OK = 0
    PUMP_BELOW_TPA = 1
    IDLER_BEYOND_TRANSPARENCY = 2
    SIGNAL_OUT_OF_RANGE = 4
    SINGULAR = 8


MASK_NAMES = {
    MaskFlag.PUMP_BELOW_TPA: "pump_below_tpa",
    MaskFlag.IDLER_BEYOND_TRANSPARENCY: "idler_beyond_transparency",
    MaskFlag.SIGNAL_OUT_OF_RANGE: "signal_out_of_range",
    MaskFlag.SINGULAR: "singular",
}


def mask_label(bits):
    bits = int(bits)
    if bits == 0:
        return "ok"
    return "|".join(name for flag, name in MASK_NAMES.items() if bits & flag)


def locus_name(theta):
    return f"theta_{theta:g}"


@dataclass
class GridMap:
    material_id: str
    config: PhaseMatchConfig
    pump_samples: np.ndarray
    signal_samples: np.ndarray
    theta: np.ndarray
    abs_period: np.ndarray
    mask: np.ndarray
    loci: dict = field(default_factory=dict)
    threshold: float = None
    temperature_k: float = DEFAULT_TEMPERATURE_K
    database_version: str = ""

    @property
    def shape(self):
        return self.theta.shape

    @property
    def idler(self):
        p, s = np.meshgrid(self.pump_samples, self.signal_samples)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(s > p, p * s / (s - p), np.nan)

    @property
    def ok(self):
        return self.mask == 0

    def birefringent_region(self):
        """Boolean layer of cells with |Λ| above the material threshold."""
        if self.threshold is None:
            return np.zeros(self.shape, dtype=bool)
        return np.isfinite(self.abs_period) & (self.abs_period > self.threshold) | np.isinf(self.abs_period)

    def __eq__(self, other):
        if not isinstance(other, GridMap):
            return NotImplemented
        if set(self.loci) != set(other.loci):
            return False
        for key in self.loci:
            a, b = self.loci[key], other.loci[key]
            if len(a) != len(b) or not all(np.array_equal(x, y) for x, y in zip(a, b)):
                return False
        return (
            self.material_id == other.material_id
            and self.config == other.config
            and np.array_equal(self.pump_samples, other.pump_samples)
            and np.array_equal(self.signal_samples, other.signal_samples)
            and np.array_equal(self.theta, other.theta, equal_nan=True)
            and np.array_equal(self.abs_period, other.abs_period, equal_nan=True)
            and np.array_equal(self.mask, other.mask)
            and self.threshold == other.threshold
            and self.temperature_k == other.temperature_k
            and self.database_version == other.database_version
        )


def _resolution(resolution):
    if np.ndim(resolution) == 0:
        n_p = n_s = int(resolution)
    else:
        n_p, n_s = (int(v) for v in resolution)
    if n_p < 2 or n_s < 2:
        raise DomainError("resolution must be at least 2 samples per axis")
    return n_p, n_s


def _axis_ok(material, axis, lam):
    lo, hi = material.evaluable_range(axis)
    return (lam >= lo) & (lam <= hi)


def scan(material, config, pump_range, signal_range, resolution=DEFAULT_RESOLUTION,
         temp_k=DEFAULT_TEMPERATURE_K, loci=True):
    """Evaluate θ and |Λ| on a uniform pump × signal grid.

    Masked cells still carry values where the dispersion data allow it;
    the mask says whether a cell is usable.  Singular cells carry NaN θ.
    """
    n_p, n_s = _resolution(resolution)
    p_lo, p_hi = (float(v) for v in pump_range)
    s_lo, s_hi = (float(v) for v in signal_range)
    if not (0 < p_lo < p_hi and 0 < s_lo < s_hi):
        raise DomainError("ranges must satisfy 0 < lo < hi")
    pumps = np.linspace(p_lo, p_hi, n_p)
    signals = np.linspace(s_lo, s_hi, n_s)
    P, S = np.meshgrid(pumps, signals)
    with np.errstate(divide="ignore", invalid="ignore"):
        I = np.where(S > P, P * S / (S - P), np.nan)

    evaluable = (
        (S > P)
        & _axis_ok(material, config.pump_axis, P)
        & _axis_ok(material, config.signal_axis, S)
        & _axis_ok(material, config.idler_axis, I)
    )
    lo, hi = material.transparency
    mask = np.zeros(P.shape, dtype=np.uint8)
    mask[P < material.tpa_edge] |= np.uint8(MaskFlag.PUMP_BELOW_TPA)
    longest = np.fmax(S, I)
    mask[evaluable & (longest > hi)] |= np.uint8(MaskFlag.IDLER_BEYOND_TRANSPARENCY)
    mask[~evaluable | (np.fmin(S, I) < lo) | (P < lo)] |= np.uint8(MaskFlag.SIGNAL_OUT_OF_RANGE)

    singular_line = np.zeros(P.shape, dtype=bool)
    if config.signal_idler_same_axis:
        half_step = 0.5 * (signals[1] - signals[0]) * (1 + 1e-9)
        singular_line = np.abs(S - 2 * P) <= half_step

    Pe, Se, Ie = (np.where(evaluable, a, np.nan) for a in (P, S, I))
    with np.errstate(all="ignore"):
        _, theta, singular = gvm_arrays(material, config, Pe, Se, Ie, temp_k, singular_mask=singular_line)
        inv = inverse_period_array(material, config, Pe, Se, Ie, temp_k)
        abs_period = np.where(inv == 0, np.inf, np.abs(1.0 / inv))
    singular &= evaluable
    mask[singular] |= np.uint8(MaskFlag.SINGULAR)
    theta = np.where(evaluable, theta, np.nan)

    grid = GridMap(
        material_id=material.id,
        config=config,
        pump_samples=pumps,
        signal_samples=signals,
        theta=theta,
        abs_period=abs_period,
        mask=mask,
        threshold=material.birefringent_threshold,
        temperature_k=float(temp_k),
        database_version=material.database_version,
    )
    if loci:
        grid.loci = extract_loci(material, grid)
    return grid


# -- loci ------------------------------------------------------------------

def degeneracy_line(pumps, signals):
    """Endpoints of λs = 2λp clipped to the grid box (empty if it misses)."""
    a = max(pumps[0], signals[0] / 2)
    b = min(pumps[-1], signals[-1] / 2)
    if a > b:
        return []
    return [np.array([[a, 2 * a], [b, 2 * b]])]


def _refine(material, grid, theta_target, pts):
    """Move contour vertices onto the θ = θt curve by bisection along their cell edge."""
    pumps, signals = grid.pump_samples, grid.signal_samples
    rows, cols = pts[:, 0], pts[:, 1]
    on_row = np.isclose(rows, np.round(rows), atol=1e-9)   # edge along the pump axis
    r0 = np.clip(np.floor(rows), 0, len(signals) - 1).astype(int)
    c0 = np.clip(np.floor(cols), 0, len(pumps) - 1).astype(int)
    r1 = np.minimum(r0 + 1, len(signals) - 1)
    c1 = np.minimum(c0 + 1, len(pumps) - 1)
    rr = np.where(on_row, np.round(rows).astype(int), r0)

    # endpoints of the bracketing edge, in µm
    pa = np.where(on_row, pumps[c0], pumps[np.round(cols).astype(int).clip(0, len(pumps) - 1)])
    pb = np.where(on_row, pumps[c1], pa)
    sa = np.where(on_row, signals[rr], signals[r0])
    sb = np.where(on_row, sa, signals[r1])

    def g(p, s):
        with np.errstate(all="ignore"):
            i = p * s / (s - p)
            return matching_field(material, grid.config, p, s, i, theta_target, grid.temperature_k)

    ga = g(pa, sa)
    lo_p, lo_s, hi_p, hi_s = pa.copy(), sa.copy(), pb.copy(), sb.copy()
    while True:
        width = np.maximum(np.abs(hi_p - lo_p), np.abs(hi_s - lo_s))
        if not np.any(width > REFINE_XTOL_UM):
            break
        mp, ms = 0.5 * (lo_p + hi_p), 0.5 * (lo_s + hi_s)
        gm = g(mp, ms)
        left = np.sign(gm) == np.sign(ga)
        lo_p, lo_s = np.where(left, mp, lo_p), np.where(left, ms, lo_s)
        hi_p, hi_s = np.where(left, hi_p, mp), np.where(left, hi_s, ms)
        ga = np.where(left, gm, ga)
    return np.column_stack([0.5 * (lo_p + hi_p), 0.5 * (lo_s + hi_s)])


def _verify(material, grid, theta_target, xy):
    p, s = xy[:, 0], xy[:, 1]
    with np.errstate(all="ignore"):
        _, theta, _ = gvm_arrays(material, grid.config, p, s, p * s / (s - p), grid.temperature_k)
    return np.abs(angle_difference(theta, theta_target)) <= LOCUS_THETA_TOL_DEG


def _split(xy, good):
    pieces, start = [], None
    for k, flag in enumerate(good):
        if flag and start is None:
            start = k
        elif not flag and start is not None:
            pieces.append(xy[start:k])
            start = None
    if start is not None:
        pieces.append(xy[start:])
    return [p for p in pieces if len(p) >= 2]


def extract_loci(material, grid, targets=LOCUS_TARGETS):
    """θ-loci by masked marching squares on the smooth matching field.

    Squares touching a masked cell are skipped, so masked cells never
    contribute vertices.  Each vertex is then bisected along its cell edge
    and kept only if it re-evaluates within 0.1° of the target.
    """
    P, S = np.meshgrid(grid.pump_samples, grid.signal_samples)
    ok = grid.ok
    out = {}
    with np.errstate(all="ignore"):
        I = np.where(S > P, P * S / (S - P), np.nan)
    for target in targets:
        lines = []
        if ok.sum() >= 4:
            Pe, Se, Ie = (np.where(ok, a, np.nan) for a in (P, S, I))
            with np.errstate(all="ignore"):
                gfield = matching_field(material, grid.config, Pe, Se, Ie, target, grid.temperature_k)
            # scale to O(1) for the contour tracer
            finite = np.isfinite(gfield)
            scale = np.max(np.abs(gfield[finite])) if finite.any() else 1.0
            image = np.where(finite, gfield / (scale or 1.0), 0.0)
            for path in find_contours(image, 0.0, mask=ok & finite):
                xy = _refine(material, grid, target, path)
                lines.extend(_split(xy, _verify(material, grid, target, xy)))
        out[locus_name(target)] = lines
    out["degeneracy"] = degeneracy_line(grid.pump_samples, grid.signal_samples)
    return out


# -- export ----------------------------------------------------------------

CSV_COLUMNS = ("pump_um", "signal_um", "idler_um", "theta_deg", "lambda_abs_um", "mask")
LOCI_COLUMNS = ("locus", "segment", "pump_um", "signal_um")


def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def csv_text(grid):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    idler = grid.idler
    for j, s in enumerate(grid.signal_samples):
        for i, p in enumerate(grid.pump_samples):
            w.writerow([_fmt(p), _fmt(s), _fmt(idler[j, i]), _fmt(grid.theta[j, i]),
                        _fmt(grid.abs_period[j, i]), mask_label(grid.mask[j, i])])
    return buf.getvalue()


def loci_csv_text(grid):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LOCI_COLUMNS)
    for name in sorted(grid.loci):
        for k, line in enumerate(grid.loci[name]):
            for p, s in line:
                w.writerow([name, k, _fmt(p), _fmt(s)])
    return buf.getvalue()


def loci_path(path):
    path = Path(path)
    return path.with_name(path.stem + ".loci" + path.suffix)


def _jnum(x):
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _unjnum(x):
    if x is None:
        return math.nan
    if isinstance(x, str):
        return float(x)
    return float(x)


def _matrix(a):
    return [[_jnum(v) for v in row] for row in a]


def metadata(grid):
    cfg = grid.config
    return {
        "material": grid.material_id,
        "config": {
            "type": cfg.pm_type.value,
            "pump_axis": cfg.pump_axis.value,
            "signal_axis": cfg.signal_axis.value,
            "idler_axis": cfg.idler_axis.value,
            "d_eff_pm_per_v": cfg.d_eff_max,
        },
        "temperature_k": grid.temperature_k,
        "database_version": grid.database_version,
        "thresholds": {"birefringent_qpm_um": grid.threshold},
        "layout": "rows follow signal_um, columns follow pump_um",
        "mask_flags": {name: int(flag) for flag, name in MASK_NAMES.items()},
    }


def to_json_dict(grid):
    return {
        "metadata": metadata(grid),
        "pump_um": [float(v) for v in grid.pump_samples],
        "signal_um": [float(v) for v in grid.signal_samples],
        "theta_deg": _matrix(grid.theta),
        "lambda_abs_um": _matrix(grid.abs_period),
        "mask": [[int(v) for v in row] for row in grid.mask],
        "loci": {
            name: [[[float(p), float(s)] for p, s in line] for line in lines]
            for name, lines in grid.loci.items()
        },
    }


def json_text(grid):
    return json.dumps(to_json_dict(grid), sort_keys=True, allow_nan=False, separators=(",", ":")) + "\n"


def from_json_dict(doc):
    meta = doc["metadata"]
    c = meta["config"]
    config = PhaseMatchConfig(c["type"], c["pump_axis"], c["signal_axis"], c["idler_axis"], c["d_eff_pm_per_v"])
    unmat = np.vectorize(_unjnum, otypes=[float])
    threshold = meta["thresholds"]["birefringent_qpm_um"]
    return GridMap(
        material_id=meta["material"],
        config=config,
        pump_samples=np.array(doc["pump_um"], dtype=float),
        signal_samples=np.array(doc["signal_um"], dtype=float),
        theta=unmat(np.array(doc["theta_deg"], dtype=object)),
        abs_period=unmat(np.array(doc["lambda_abs_um"], dtype=object)),
        mask=np.array(doc["mask"], dtype=np.uint8),
        loci={name: [np.array(line, dtype=float).reshape(-1, 2) for line in lines]
              for name, lines in doc["loci"].items()},
        threshold=None if threshold is None else float(threshold),
        temperature_k=float(meta["temperature_k"]),
        database_version=meta["database_version"],
    )


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return from_json_dict(json.load(fh))


def export(grid, fmt, path):
    """Write ``grid`` as JSON, or as CSV plus a ``<name>.loci.csv`` companion."""
    path = Path(path)
    if fmt == "json":
        path.write_text(json_text(grid), encoding="utf-8")
    elif fmt == "csv":
        path.write_text(csv_text(grid), encoding="utf-8")
        loci_path(path).write_text(loci_csv_text(grid), encoding="utf-8")
    else:
        raise ValueError(f"format must be 'csv' or 'json', not {fmt!r}")
