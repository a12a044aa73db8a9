"""Exception hierarchy shared by every module."""


class PdcMatchError(Exception):
    """Base class for errors raised by pdc_match."""


class DomainError(PdcMatchError, ValueError):
    """A wavelength (or wavelength combination) cannot be evaluated.

    Raised for wavelengths outside every dispersion model's valid range and
    for physically impossible inputs such as a signal shorter than its pump.
    Transparency and two-photon-absorption limits are *not* reported this way;
    those are feasibility flags on the result.
    """


class DatabaseError(PdcMatchError):
    """Problem with the material database file."""


class DatabaseParseError(DatabaseError):
    """The file does not follow the documented schema."""

    def __init__(self, message, record=None, field=None):
        where = []
        if record is not None:
            where.append(f"record {record!r}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.record = record
        self.field = field


class DatabaseValidationError(DatabaseError):
    """A record parsed correctly but violates a physical invariant."""

    def __init__(self, message, record=None):
        super().__init__(f"record {record!r}: {message}" if record else message)
        self.record = record


class UnknownMaterialError(PdcMatchError, KeyError):
    def __init__(self, material_id, known=()):
        self.material_id = material_id
        self.known = tuple(known)
        super().__init__(material_id)

    def __str__(self):
        if self.known:
            return f"unknown material {self.material_id!r} (known: {', '.join(self.known)})"
        return f"unknown material {self.material_id!r}"
