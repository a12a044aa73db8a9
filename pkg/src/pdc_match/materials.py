"""Crystal database: dispersion fits, transparency limits and d_eff entries.

Records are loaded from a YAML file (``data/materials.yaml`` by default, or
the path in ``$PDC_MATCH_DB``). The file layout is described in
``docs/database_schema.md``.
"""

import os
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .errors import (
    DatabaseParseError,
    DatabaseValidationError,
    DomainError,
    UnknownMaterialError,
)
from .sellmeier import FormId, SellmeierForm

DEFAULT_TEMPERATURE_K = 300.0
DATABASE_ENV = "PDC_MATCH_DB"

KNOWN_MATERIALS = ("PPKTP", "PPLN", "OPGaP", "OPGaAs", "CSP", "ZGP")
POLEABLE = frozenset({"PPKTP", "PPLN", "OPGaP", "OPGaAs"})


class Axis(str, Enum):
    ORDINARY_Y = "ordinary_y"
    EXTRAORDINARY_Z = "extraordinary_z"

    @property
    def short(self):
        return "o" if self is Axis.ORDINARY_Y else "e"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        text = str(text).strip().lower()
        aliases = {"o": cls.ORDINARY_Y, "y": cls.ORDINARY_Y, "e": cls.EXTRAORDINARY_Z, "z": cls.EXTRAORDINARY_Z}
        if text in aliases:
            return aliases[text]
        return cls(text)


class CrystalClass(str, Enum):
    ISOTROPIC = "isotropic"
    UNIAXIAL_POSITIVE = "uniaxial_positive"
    UNIAXIAL_NEGATIVE = "uniaxial_negative"
    BIAXIAL_PRINCIPAL_PLANE = "biaxial_principal_plane"


class PmType(str, Enum):
    TYPE0 = "type0"
    TYPEI = "typeI"
    TYPEII = "typeII"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = str(text).strip().replace("-", "").replace("_", "").lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown phase-matching type {text!r} (expected type0, typeI or typeII)")


O, E = Axis.ORDINARY_Y, Axis.EXTRAORDINARY_Z

# Maximum |d_eff| in pm/V per (type, pump, signal, idler); 0 and N/A entries
# are left out, so anything absent here is not allowed in the database.
TABLE_I = {
    "PPKTP": {(PmType.TYPE0, E, E, E): 15.3, (PmType.TYPEI, E, O, O): 3.9, (PmType.TYPEII, O, E, O): 3.9},
    "PPLN": {(PmType.TYPE0, E, E, E): 25.0, (PmType.TYPEI, E, O, O): 4.6, (PmType.TYPEII, O, E, O): 4.6},
    "OPGaP": {(PmType.TYPE0, E, E, E): 75.0},
    "OPGaAs": {(PmType.TYPE0, E, E, E): 95.0},
    "CSP": {(PmType.TYPEI, E, O, O): 84.0, (PmType.TYPEII, E, O, E): 84.0},
    "ZGP": {(PmType.TYPEI, O, E, E): 75.4, (PmType.TYPEII, O, E, O): 75.4},
}


@dataclass(frozen=True)
class PhaseMatchConfig:
    """A polarization configuration: which axis each photon travels on.

    Type-II entries are stored as listed in the table (e.g. o -> e + o);
    :meth:`exchanged` gives the mirror assignment (o -> o + e).
    """

    pm_type: PmType
    pump_axis: Axis
    signal_axis: Axis
    idler_axis: Axis
    d_eff_max: float

    def __post_init__(self):
        object.__setattr__(self, "pm_type", PmType.parse(self.pm_type))
        for name in ("pump_axis", "signal_axis", "idler_axis"):
            object.__setattr__(self, name, Axis.parse(getattr(self, name)))
        object.__setattr__(self, "d_eff_max", float(self.d_eff_max))
        expected = _type_from_axes(self.pump_axis, self.signal_axis, self.idler_axis)
        if expected is not self.pm_type:
            raise ValueError(
                f"axes {self.label} describe a {expected.value} interaction, not {self.pm_type.value}"
            )

    @property
    def key(self):
        return (self.pm_type, self.pump_axis, self.signal_axis, self.idler_axis)

    @property
    def label(self):
        return f"{self.pump_axis.short} -> {self.signal_axis.short} + {self.idler_axis.short}"

    @property
    def signal_idler_same_axis(self):
        return self.signal_axis is self.idler_axis

    def exchanged(self):
        """Same interaction with the signal and idler axes swapped."""
        return PhaseMatchConfig(self.pm_type, self.pump_axis, self.idler_axis, self.signal_axis, self.d_eff_max)


def _type_from_axes(pump, signal, idler):
    if signal is not idler:
        return PmType.TYPEII
    if signal is pump:
        return PmType.TYPE0
    return PmType.TYPEI


# Alternative name for a database config entry.
PhaseMatchConfigEntry = PhaseMatchConfig


@dataclass(frozen=True)
class MaterialRecord:
    id: str
    name: str
    crystal_class: CrystalClass
    axes: dict
    transparency: tuple
    tpa_edge: float
    poleable: bool
    configs: tuple
    birefringent_threshold: float = None
    database_version: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "crystal_class", CrystalClass(self.crystal_class))
        object.__setattr__(
            self, "axes", {Axis.parse(k): tuple(v) for k, v in dict(self.axes).items()}
        )
        object.__setattr__(self, "transparency", tuple(float(v) for v in self.transparency))
        object.__setattr__(self, "tpa_edge", float(self.tpa_edge))
        object.__setattr__(self, "configs", tuple(self.configs))
        if self.birefringent_threshold is not None:
            object.__setattr__(self, "birefringent_threshold", float(self.birefringent_threshold))

    def __hash__(self):
        return hash((self.id, self.crystal_class, self.transparency, self.configs))

    @property
    def is_isotropic(self):
        return self.crystal_class is CrystalClass.ISOTROPIC

    def forms_for(self, axis):
        """Dispersion fits used for ``axis`` (isotropic media ignore the axis)."""
        axis = Axis.parse(axis)
        if self.is_isotropic:
            return next(iter(self.axes.values()))
        try:
            return self.axes[axis]
        except KeyError:
            raise DomainError(f"{self.id} has no dispersion data for axis {axis.value}") from None

    def evaluable_range(self, axis):
        """(lo, hi) span of the union of valid ranges for ``axis``."""
        forms = self.forms_for(axis)
        return min(f.valid_range[0] for f in forms), max(f.valid_range[1] for f in forms)

    def config(self, pm_type, exchanged=False):
        pm_type = PmType.parse(pm_type)
        for cfg in self.configs:
            if cfg.pm_type is pm_type:
                return cfg.exchanged() if exchanged else cfg
        raise DomainError(f"{self.id} has no {pm_type.value} configuration in the database")

    def validate(self):
        """Raise :class:`DatabaseValidationError` if an invariant fails."""
        rid = self.id
        lo, hi = self.transparency
        if not 0 < lo < hi:
            raise DatabaseValidationError(f"transparency window {self.transparency} is not increasing", rid)
        if not (lo < self.tpa_edge < hi or self.tpa_edge == lo):
            raise DatabaseValidationError(
                f"tpa_edge {self.tpa_edge} must lie inside the transparency window {self.transparency} "
                "or equal its lower bound", rid)
        if self.poleable and rid not in POLEABLE:
            raise DatabaseValidationError(f"{rid} cannot be poled", rid)
        if not self.poleable and rid in POLEABLE:
            raise DatabaseValidationError(f"{rid} is a poled crystal but marked poleable=false", rid)
        expected_axes = 1 if self.is_isotropic else 2
        if len(self.axes) != expected_axes:
            raise DatabaseValidationError(
                f"{self.crystal_class.value} material needs {expected_axes} axis entries, has {len(self.axes)}", rid)
        for axis, forms in self.axes.items():
            if not forms:
                raise DatabaseValidationError(f"axis {axis.value} has no dispersion fits", rid)
            tags = [f.source_tag for f in forms]
            if len(set(tags)) != len(tags):
                raise DatabaseValidationError(f"axis {axis.value} repeats a source_tag: {tags}", rid)
            for form in forms:
                f_lo, f_hi = form.valid_range
                probe = np.linspace(f_lo, f_hi, 33)
                with np.errstate(all="ignore"):
                    n = form.index(probe, DEFAULT_TEMPERATURE_K)
                if not np.all(np.isfinite(n)) or not np.all(n > 1.0):
                    raise DatabaseValidationError(
                        f"fit {form.source_tag!r} on {axis.value} does not give real n > 1 over {form.valid_range}", rid)
        if self.is_isotropic and self.crystal_class is CrystalClass.ISOTROPIC:
            for cfg in self.configs:
                if cfg.pm_type is not PmType.TYPE0:
                    raise DatabaseValidationError("isotropic media only support type-0 interactions", rid)
        table = TABLE_I.get(rid)
        for cfg in self.configs:
            if cfg.d_eff_max <= 0:
                raise DatabaseValidationError(f"{cfg.pm_type.value} {cfg.label} has d_eff <= 0", rid)
            if table is not None:
                ref = table.get(cfg.key)
                if ref is None:
                    raise DatabaseValidationError(
                        f"{cfg.pm_type.value} {cfg.label} is zero or N/A in the d_eff table", rid)
                if abs(ref - cfg.d_eff_max) > 1e-9:
                    raise DatabaseValidationError(
                        f"{cfg.pm_type.value} {cfg.label} d_eff {cfg.d_eff_max} differs from table value {ref}", rid)
        keys = [cfg.key for cfg in self.configs]
        if len(set(keys)) != len(keys):
            raise DatabaseValidationError("duplicate configuration entries", rid)
        if self.birefringent_threshold is not None and self.birefringent_threshold <= 0:
            raise DatabaseValidationError("birefringent_threshold_um must be positive", rid)
        return self


# -- evaluation -------------------------------------------------------------

def index_and_slope(material, axis, lam, temp_k=DEFAULT_TEMPERATURE_K, slope=True):
    """Averaged n and dn/dλ with NaN wherever no fit covers the wavelength.

    At each wavelength the fits whose valid range contains it are averaged.
    Fits without an analytic derivative fall back to a finite difference.
    """
    lam = np.asarray(lam)
    dtype = np.result_type(lam, float)
    n_sum = np.zeros(lam.shape, dtype=dtype)
    d_sum = np.zeros(lam.shape, dtype=dtype)
    count = np.zeros(lam.shape, dtype=int)
    for form in material.forms_for(axis):
        inside = form.covers(lam)
        if not np.any(inside):
            continue
        safe = np.where(inside, lam, form.valid_range[0]).astype(dtype)
        with np.errstate(all="ignore"):
            n = form.index(safe, temp_k)
            n_sum += np.where(inside, n, 0.0)
            if slope:
                d = form.slope(safe, temp_k)
                if d is None:
                    from .dispersion import finite_difference_slope
                    d = finite_difference_slope(lambda x: form.index(x, temp_k), safe)
                d_sum += np.where(inside, d, 0.0)
        count += inside
    with np.errstate(invalid="ignore", divide="ignore"):
        n_avg = np.where(count > 0, n_sum / np.maximum(count, 1), np.nan)
        d_avg = np.where(count > 0, d_sum / np.maximum(count, 1), np.nan) if slope else None
    return n_avg, d_avg


def check_evaluable(material, axis, lam):
    lam_arr = np.asarray(lam, dtype=float)
    forms = material.forms_for(axis)
    covered = np.zeros(lam_arr.shape, dtype=bool)
    for form in forms:
        covered |= form.covers(lam_arr)
    if not np.all(covered):
        bad = lam_arr[~covered] if lam_arr.ndim else lam_arr
        ranges = ", ".join(f"[{f.valid_range[0]}, {f.valid_range[1]}]" for f in forms)
        raise DomainError(
            f"{material.id} {Axis.parse(axis).value}: wavelength {np.ravel(bad)[0]:g} um "
            f"outside the dispersion data ({ranges})"
        )


def refractive_index(material, axis, lam, temp_k=DEFAULT_TEMPERATURE_K):
    """Refractive index on ``axis`` at vacuum wavelength ``lam`` (µm).

    Where several fits exist for the axis their indices are averaged.
    Raises :class:`DomainError` outside every fit's valid range.
    """
    check_evaluable(material, axis, lam)
    n, _ = index_and_slope(material, axis, lam, temp_k, slope=False)
    return n if np.ndim(n) else float(n)


# -- loading / saving ---------------------------------------------------------

_TOP_FIELDS = ("id", "crystal_class", "poleable", "transparency_um", "tpa_edge_um", "axes", "configs")
_FORM_FIELDS = ("form", "source_tag", "coefficients", "valid_range_um", "temperature_dependent")
_CONFIG_FIELDS = ("type", "pump", "signal", "idler", "d_eff_pm_per_v")


def default_database_path():
    env = os.environ.get(DATABASE_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("pdc_match").joinpath("data/materials.yaml")))


def _require(doc, keys, record, prefix=""):
    if not isinstance(doc, dict):
        raise DatabaseParseError("expected a mapping", record, prefix or None)
    for key in keys:
        if key not in doc:
            raise DatabaseParseError("missing required field", record, prefix + key)


def _pair(value, record, fieldname):
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise DatabaseParseError("expected a [low, high] pair", record, fieldname)
    try:
        return float(value[0]), float(value[1])
    except (TypeError, ValueError):
        raise DatabaseParseError("expected numbers", record, fieldname) from None


def _number(value, record, fieldname):
    if isinstance(value, bool):
        raise DatabaseParseError("expected a number", record, fieldname)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise DatabaseParseError("expected a number", record, fieldname) from None


def _parse_form(doc, record, where):
    _require(doc, _FORM_FIELDS, record, where + ".")
    coeffs = doc["coefficients"]
    if not isinstance(coeffs, list) or not coeffs:
        raise DatabaseParseError("expected a non-empty list", record, where + ".coefficients")
    coeffs = [_number(c, record, where + ".coefficients") for c in coeffs]
    if not isinstance(doc["temperature_dependent"], bool):
        raise DatabaseParseError("expected true/false", record, where + ".temperature_dependent")
    try:
        form_id = FormId(doc["form"])
    except ValueError:
        raise DatabaseParseError(
            f"unknown form {doc['form']!r} (known: {', '.join(f.value for f in FormId)})",
            record, where + ".form") from None
    try:
        return SellmeierForm(
            form_id=form_id,
            coefficients=coeffs,
            valid_range=_pair(doc["valid_range_um"], record, where + ".valid_range_um"),
            source_tag=str(doc["source_tag"]),
            temperature_dependent=doc["temperature_dependent"],
            note=str(doc.get("note", "")),
        )
    except ValueError as exc:
        raise DatabaseParseError(str(exc), record, where) from None


def _parse_config(doc, record, where):
    _require(doc, _CONFIG_FIELDS, record, where + ".")
    try:
        return PhaseMatchConfig(
            pm_type=doc["type"],
            pump_axis=doc["pump"],
            signal_axis=doc["signal"],
            idler_axis=doc["idler"],
            d_eff_max=_number(doc["d_eff_pm_per_v"], record, where + ".d_eff_pm_per_v"),
        )
    except ValueError as exc:
        raise DatabaseParseError(str(exc), record, where) from None


def parse_record(doc, version=""):
    record = doc.get("id") if isinstance(doc, dict) else None
    _require(doc, _TOP_FIELDS, record)
    record = str(doc["id"])
    if record not in KNOWN_MATERIALS:
        raise DatabaseParseError(f"unknown material id (expected one of {', '.join(KNOWN_MATERIALS)})", record, "id")
    if not isinstance(doc["poleable"], bool):
        raise DatabaseParseError("expected true/false", record, "poleable")
    try:
        crystal_class = CrystalClass(doc["crystal_class"])
    except ValueError:
        raise DatabaseParseError(f"unknown crystal class {doc['crystal_class']!r}", record, "crystal_class") from None
    axes_doc = doc["axes"]
    if not isinstance(axes_doc, dict) or not axes_doc:
        raise DatabaseParseError("expected a mapping of axis -> list of fits", record, "axes")
    axes = {}
    for key, forms in axes_doc.items():
        try:
            axis = Axis.parse(key)
        except ValueError:
            raise DatabaseParseError(f"unknown axis {key!r}", record, "axes") from None
        if not isinstance(forms, list) or not forms:
            raise DatabaseParseError("expected a non-empty list of fits", record, f"axes.{key}")
        axes[axis] = tuple(_parse_form(f, record, f"axes.{key}[{i}]") for i, f in enumerate(forms))
    if not isinstance(doc["configs"], list):
        raise DatabaseParseError("expected a list", record, "configs")
    configs = tuple(_parse_config(c, record, f"configs[{i}]") for i, c in enumerate(doc["configs"]))
    threshold = doc.get("birefringent_threshold_um")
    return MaterialRecord(
        id=record,
        name=str(doc.get("name", record)),
        crystal_class=crystal_class,
        axes=axes,
        transparency=_pair(doc["transparency_um"], record, "transparency_um"),
        tpa_edge=_number(doc["tpa_edge_um"], record, "tpa_edge_um"),
        poleable=doc["poleable"],
        configs=configs,
        birefringent_threshold=None if threshold is None else _number(threshold, record, "birefringent_threshold_um"),
        database_version=version,
    )


def load_database(path=None):
    """Load and validate every record in a material database file.

    Returns a list of :class:`MaterialRecord`. Schema problems raise
    :class:`DatabaseParseError` naming the record and field; physical
    inconsistencies raise :class:`DatabaseValidationError`.
    """
    path = Path(path) if path is not None else default_database_path()
    with open(path, encoding="utf-8") as fh:
        try:
            docs = [d for d in yaml.safe_load_all(fh) if d is not None]
        except yaml.YAMLError as exc:
            raise DatabaseParseError(f"{path}: not valid YAML ({exc})") from None
    version = ""
    records = []
    seen = set()
    for doc in docs:
        if isinstance(doc, dict) and doc.get("kind") == "header":
            version = str(doc.get("database_version", ""))
            continue
        rec = parse_record(doc, version)
        if rec.id in seen:
            raise DatabaseParseError("material listed twice", rec.id, "id")
        seen.add(rec.id)
        records.append(rec.validate())
    return records


def database_version(path=None):
    path = Path(path) if path is not None else default_database_path()
    with open(path, encoding="utf-8") as fh:
        for doc in yaml.safe_load_all(fh):
            if isinstance(doc, dict) and doc.get("kind") == "header":
                return str(doc.get("database_version", ""))
    return ""


def record_to_dict(rec):
    return {
        "id": rec.id,
        "name": rec.name,
        "crystal_class": rec.crystal_class.value,
        "poleable": rec.poleable,
        "transparency_um": list(rec.transparency),
        "tpa_edge_um": rec.tpa_edge,
        "birefringent_threshold_um": rec.birefringent_threshold,
        "axes": {
            axis.value: [
                {
                    "form": f.form_id.value,
                    "source_tag": f.source_tag,
                    "coefficients": list(f.coefficients),
                    "valid_range_um": list(f.valid_range),
                    "temperature_dependent": f.temperature_dependent,
                    "note": f.note,
                }
                for f in forms
            ]
            for axis, forms in rec.axes.items()
        },
        "configs": [
            {
                "type": c.pm_type.value,
                "pump": c.pump_axis.short,
                "signal": c.signal_axis.short,
                "idler": c.idler_axis.short,
                "d_eff_pm_per_v": c.d_eff_max,
            }
            for c in rec.configs
        ],
    }


def dump_database(records, path, version="", schema_version=1):
    docs = [{"kind": "header", "schema_version": schema_version, "database_version": version}]
    docs += [record_to_dict(r) for r in records]
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump_all(docs, fh, sort_keys=False, explicit_start=True)


class Database:
    """Loaded records indexed by id."""

    def __init__(self, records, version="", path=None):
        self.records = {r.id: r for r in records}
        self.version = version
        self.path = path

    @classmethod
    def load(cls, path=None):
        path = Path(path) if path is not None else default_database_path()
        return cls(load_database(path), database_version(path), path)

    def __getitem__(self, material_id):
        try:
            return self.records[material_id]
        except KeyError:
            # case-insensitive fallback: "ppln" -> "PPLN"
            for key, rec in self.records.items():
                if key.lower() == str(material_id).lower():
                    return rec
            raise UnknownMaterialError(material_id, self.records) from None

    def __contains__(self, material_id):
        try:
            self[material_id]
        except UnknownMaterialError:
            return False
        return True

    def __iter__(self):
        return iter(self.records.values())

    def __len__(self):
        return len(self.records)


_DEFAULT = None


def default_database():
    """The bundled (or ``$PDC_MATCH_DB``) database, loaded once."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = Database.load()
    return _DEFAULT


def get_material(material_id):
    return default_database()[material_id]
