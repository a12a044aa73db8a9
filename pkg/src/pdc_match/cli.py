"""``pdc-match`` command line.

Wavelengths are read in µm unless ``--nm`` is given; output is always µm.
Exit status: 0 success, 1 domain/database error, 2 usage error.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .dispersion import dn_dlambda, group_delay
from .errors import DatabaseError, PdcMatchError
from .gvm import find_degenerate_locus, find_nondegenerate_locus
from .materials import DATABASE_ENV, DEFAULT_TEMPERATURE_K, Axis, Database, PmType, record_to_dict, refractive_index
from .phasematch import solve_period
from .reproduce import reproduce_all
from .sweep import DEFAULT_RESOLUTION, csv_text, json_text, loci_csv_text, loci_path, scan
from .upconv import seed_for_target, upconvert

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _range(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi but got {text!r}")
    lo, hi = (_positive(p) for p in parts)
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"range {text!r} must have lo < hi")
    return lo, hi


def _pm_type(text):
    try:
        return PmType.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _axis(text):
    try:
        return Axis.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown axis {text!r} (use ordinary_y/o/y or extraordinary_z/e/z)") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--db", default=None,
                        help=f"material database file (default: ${DATABASE_ENV} or the bundled file)")
    common.add_argument("--temp-k", type=_positive, default=DEFAULT_TEMPERATURE_K, help="crystal temperature in kelvin")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text", dest="fmt")
    common.add_argument("-o", "--output", default=None, help="write data to this file instead of stdout")
    common.add_argument("--nm", action="store_true", help="read wavelength arguments in nm")

    parser = argparse.ArgumentParser(prog="pdc-match", description="Phase-matching, GVM and up-conversion calculations for nonlinear crystals.")
    parser.add_argument("--version", action="store_true", help="print tool and database versions")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("materials", help="list or show database records")
    msub = p.add_subparsers(dest="action", metavar="ACTION")
    msub.add_parser("list", parents=[common], help="list materials")
    show = msub.add_parser("show", parents=[common], help="show one record")
    show.add_argument("material")

    for name, helptext in (("nindex", "refractive index"), ("gd", "group index and group delay")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("material")
        p.add_argument("axis", type=_axis)
        p.add_argument("wavelength", type=_positive)

    p = sub.add_parser("solve", parents=[common], help="grating period, D and theta for one triple")
    p.add_argument("material")
    p.add_argument("pm_type", type=_pm_type)
    p.add_argument("pump", type=_positive)
    p.add_argument("signal", type=_positive)
    p.add_argument("--exchange", action="store_true", help="swap the signal/idler axes of a type-II entry")

    p = sub.add_parser("locus", parents=[common], help="roots of theta = target")
    p.add_argument("material")
    p.add_argument("pm_type", type=_pm_type)
    p.add_argument("--theta", type=float, required=True)
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--degenerate", action="store_true", help="scan the pump along signal = idler")
    where.add_argument("--pump", type=_positive, help="scan the signal at this fixed pump")
    p.add_argument("--range", type=_range, required=True, dest="scan_range", help="lo,hi of the scanned wavelength")
    p.add_argument("--exchange", action="store_true")

    p = sub.add_parser("map", parents=[common], help="pump x signal grid of theta and |Lambda|")
    p.add_argument("material")
    p.add_argument("pm_type", type=_pm_type)
    p.add_argument("--pump", type=_range, required=True)
    p.add_argument("--signal", type=_range, required=True)
    p.add_argument("--res", type=int, default=DEFAULT_RESOLUTION)
    p.add_argument("--exchange", action="store_true")

    p = sub.add_parser("upconvert", parents=[common], help="detector-band up-conversion of a mid-IR photon")
    p.add_argument("material")
    p.add_argument("--midir", type=_positive, required=True)
    how = p.add_mutually_exclusive_group(required=True)
    how.add_argument("--seed", type=_positive)
    how.add_argument("--target", type=_positive)

    p = sub.add_parser("reproduce", parents=[common], help="regenerate all maps and golden checks")
    p.add_argument("output_dir")
    p.add_argument("--res", type=int, default=DEFAULT_RESOLUTION)
    return parser


# -- output helpers -------------------------------------------------------------

def _clean(obj):
    """Make a structure JSON-safe: NaN -> null, inf -> "inf"."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _json(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _text_table(rows, columns):
    cells = [[_cell(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[k]) for row in cells)) if cells else len(c) for k, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _cell(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.10g}"
    if isinstance(v, dict):
        return ",".join(f"{k}={_cell(x)}" for k, x in v.items())
    return str(v)


def _csv_rows(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(["" if r.get(c) is None else (repr(r[c]) if isinstance(r[c], float) else r[c]) for c in columns])
    return buf.getvalue()


def _key_value(d):
    width = max(len(k) for k in d)
    return "".join(f"{k.ljust(width)}  {_cell(v)}\n" for k, v in d.items())


def _emit(args, text):
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _render(args, payload, rows=None, columns=None):
    """Format ``payload`` (dict) or ``rows`` (list of flat dicts) per --format."""
    if args.fmt == "json":
        return _json(payload)
    if args.fmt == "csv":
        if rows is None:
            rows, columns = [_flatten(payload)], list(_flatten(payload))
        return _csv_rows(rows, columns)
    if rows is not None:
        return _text_table(rows, columns)
    return _key_value(_flatten(payload))


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out.update(_flatten(v, f"{prefix}{k}."))
        else:
            out[prefix + k] = v
    return out


# -- commands ---------------------------------------------------------------

def _um(args, value):
    return value / 1000.0 if args.nm else value


def _um_range(args, rng):
    return tuple(_um(args, v) for v in rng)


def _db(args):
    return Database.load(args.db)


def cmd_materials(args, db):
    if args.action == "list":
        rows = [{
            "id": r.id, "name": r.name, "crystal_class": r.crystal_class.value, "poleable": r.poleable,
            "transparency_um": list(r.transparency), "tpa_edge_um": r.tpa_edge,
            "configs": [c.pm_type.value for c in r.configs],
        } for r in db]
        payload = {"database_version": db.version, "materials": rows}
        if args.fmt == "json":
            return _json(payload)
        flat = [dict(r, transparency_um=f"{r['transparency_um'][0]:g}-{r['transparency_um'][1]:g}",
                     configs=" ".join(r["configs"])) for r in rows]
        cols = ["id", "crystal_class", "poleable", "transparency_um", "tpa_edge_um", "configs"]
        return _csv_rows(flat, cols) if args.fmt == "csv" else _text_table(flat, cols)
    rec = db[args.material]
    payload = {"database_version": db.version, "material": record_to_dict(rec)}
    if args.fmt == "json":
        return _json(payload)
    d = record_to_dict(rec)
    lines = [f"{rec.id}: {rec.name} ({rec.crystal_class.value}, poleable={rec.poleable})",
             f"transparency {rec.transparency[0]:g}-{rec.transparency[1]:g} um, TPA edge {rec.tpa_edge:g} um, "
             f"birefringent QPM threshold {rec.birefringent_threshold if rec.birefringent_threshold is not None else '-'} um"]
    for axis, forms in d["axes"].items():
        for f in forms:
            lines.append(f"  {axis}: {f['form']} [{f['source_tag']}] valid {f['valid_range_um'][0]:g}-"
                         f"{f['valid_range_um'][1]:g} um")
    for c in rec.configs:
        lines.append(f"  {c.pm_type.value}: {c.label}  d_eff {c.d_eff_max:g} pm/V")
    return "\n".join(lines) + "\n"


def cmd_nindex(args, db):
    rec = db[args.material]
    lam = _um(args, args.wavelength)
    payload = {"material": rec.id, "axis": args.axis.value, "wavelength_um": lam, "temperature_k": args.temp_k,
               "n": refractive_index(rec, args.axis, lam, args.temp_k),
               "dn_dlambda_per_um": dn_dlambda(rec, args.axis, lam, args.temp_k)}
    return _render(args, payload)


def cmd_gd(args, db):
    rec = db[args.material]
    lam = _um(args, args.wavelength)
    gd = group_delay(rec, args.axis, lam, args.temp_k)
    payload = {"material": rec.id, "axis": args.axis.value, "wavelength_um": lam, "temperature_k": args.temp_k,
               "n": gd.n, "group_index": gd.group_index, "group_delay_s_per_m": gd.value}
    return _render(args, payload)


def _config(rec, args):
    return rec.config(args.pm_type, exchanged=getattr(args, "exchange", False))


def cmd_solve(args, db):
    rec = db[args.material]
    sol = solve_period(rec, _config(rec, args), _um(args, args.pump), _um(args, args.signal), args.temp_k)
    return _render(args, sol.as_dict())


LOCUS_COLUMNS = ["pump_um", "signal_um", "idler_um", "theta_deg", "D", "period_um", "regime"]


def cmd_locus(args, db):
    rec = db[args.material]
    cfg = _config(rec, args)
    rng = _um_range(args, args.scan_range)
    if args.degenerate:
        sols = find_degenerate_locus(rec, cfg, args.theta, rng, args.temp_k)
    else:
        sols = find_nondegenerate_locus(rec, cfg, args.theta, _um(args, args.pump), rng, args.temp_k)
    dicts = [s.as_dict() for s in sols]
    payload = {"material": rec.id, "type": cfg.pm_type.value, "theta_target_deg": args.theta,
               "mode": "degenerate" if args.degenerate else "fixed_pump",
               "axes": {"pump": cfg.pump_axis.value, "signal": cfg.signal_axis.value, "idler": cfg.idler_axis.value},
               "temperature_k": args.temp_k, "roots": dicts}
    return _render(args, payload, rows=[_clean(d) for d in dicts], columns=LOCUS_COLUMNS)


def cmd_map(args, db):
    rec = db[args.material]
    if args.res < 2:
        raise UsageError("--res must be at least 2")
    grid = scan(rec, _config(rec, args), _um_range(args, args.pump), _um_range(args, args.signal),
                args.res, args.temp_k)
    if args.fmt == "csv":
        if args.output:
            Path(args.output).write_text(csv_text(grid), encoding="utf-8")
            loci_path(args.output).write_text(loci_csv_text(grid), encoding="utf-8")
            return None
        return csv_text(grid)
    if args.fmt == "json":
        return json_text(grid)
    ok = int(grid.ok.sum())
    lines = [f"{rec.id} {grid.config.pm_type.value} ({grid.config.label}) {grid.shape[1]} pump x {grid.shape[0]} signal",
             f"usable cells {ok} of {grid.mask.size}"]
    for name, segs in sorted(grid.loci.items()):
        lines.append(f"  {name}: {len(segs)} segment(s), {sum(len(s) for s in segs)} vertices")
    return "\n".join(lines) + "\n"


def cmd_upconvert(args, db):
    rec = db[args.material]
    midir = _um(args, args.midir)
    if args.seed is not None:
        sol = upconvert(rec, _um(args, args.seed), midir, args.temp_k)
    else:
        sol = seed_for_target(rec, midir, _um(args, args.target), args.temp_k)
    return _render(args, sol.as_dict())


def cmd_reproduce(args, db):
    summary, status = reproduce_all(args.output_dir, db, args.temp_k, args.res)
    if args.fmt == "json":
        text = _json(summary)
    else:
        cols = ["status", "id", "expected", "computed", "variant"]
        text = _text_table(summary["checks"], cols) + \
            f"\n{summary['counts']['pass']} passed, {summary['counts']['fail']} failed, " \
            f"{summary['counts']['skipped']} skipped; summary in {Path(args.output_dir) / 'summary.json'}\n"
    return text, status


COMMANDS = {
    "materials": cmd_materials, "nindex": cmd_nindex, "gd": cmd_gd, "solve": cmd_solve,
    "locus": cmd_locus, "map": cmd_map, "upconvert": cmd_upconvert, "reproduce": cmd_reproduce,
}


def dispatch(argv=None):
    """Run one command; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.version:
        try:
            db_version = Database.load(os.environ.get(DATABASE_ENV)).version
        except (OSError, DatabaseError):
            db_version = "unavailable"
        print(f"pdc-match {__version__} (database {db_version})")
        return EXIT_OK
    if args.command is None or (args.command == "materials" and args.action is None):
        parser.print_usage(sys.stderr)
        print("pdc-match: error: a command is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        db = _db(args)
        result = COMMANDS[args.command](args, db)
        status = EXIT_OK
        if isinstance(result, tuple):
            result, status = result
        if result is not None:
            _emit(args, result)
        return status
    except UsageError as exc:
        print(f"pdc-match: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PdcMatchError, KeyError) as exc:
        print(f"pdc-match: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"pdc-match: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
