"""Command-line front end.

Subcommands parse JSON inputs, run the library pipelines and emit
deterministic JSON or CSV.  The report subcommand additionally renders
matplotlib figures next to the delimited output.

Exit codes: 0 success, 1 data violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import lattice, latticeshift, matching, sequences, shift1d
from .hulls import (
    HullSpec,
    cross_section,
    hull_from_json,
    hull_to_json,
    membership,
    section_radii,
    separating_monomial,
)
from .numerics import DomainError
from .sequences import ValidationError, ZeroTermError, scalar_to_json

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

_VIOLATIONS = (
    ValidationError,
    ZeroTermError,
    DomainError,
    matching.TargetOutsideDomainError,
    matching.InexactBoundError,
    matching.EmptyOffsetSetError,
    latticeshift.InconsistentDirectionsError,
)


class UsageError(Exception):
    pass


# -- small parsers --------------------------------------------------------------


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse number {text!r}") from exc


def _parse_complex(token: str) -> complex:
    token = token.strip()
    if "∠" in token or "<" in token:
        sep = "∠" if "∠" in token else "<"
        mod_s, ang_s = token.split(sep, 1)
        return cmath.rect(float(Fraction(mod_s)), math.radians(float(ang_s)))
    try:
        return complex(token.replace("i", "j"))
    except ValueError:
        pass
    try:
        return complex(float(Fraction(token)))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse coordinate {token!r}; use 're+imi' "
                         "or 'modulus∠degrees'") from exc


def _parse_point(text: str) -> tuple:
    return tuple(_parse_complex(tok) for tok in text.split(","))


def _parse_index(text: str) -> tuple:
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise UsageError(f"cannot parse index {text!r}") from exc


def _parse_axes(text):
    if text is None:
        return None
    text = text.strip()
    if not text:
        return frozenset()
    try:
        return frozenset(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise UsageError(f"cannot parse axis list {text!r}") from exc


def _parse_fixed(text: str) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        try:
            axis, value = item.split("=", 1)
            out[int(axis)] = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"cannot parse fixed modulus {item!r}") from exc
    return out


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _looks_like_field(doc) -> bool:
    return isinstance(doc, dict) and ("entries" in doc or "default" in doc
                                      or "n" in doc)


def _emit(args, text: str):
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, obj):
    _emit(args, json.dumps(obj, sort_keys=True) + "\n")


def _emit_csv(args, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _emit(args, buf.getvalue())


def _num(x):
    """Deterministic numeric rendering for CSV cells."""
    v = scalar_to_json(x)
    if isinstance(v, float):
        return repr(v)
    return v


# -- sequence / field loading ---------------------------------------------------


def _load_sequence(path: str) -> sequences.NormSequence:
    return sequences.from_json_dict(_load_json(path))


def _load_field(path: str) -> lattice.NormField:
    doc = _load_json(path)
    if not _looks_like_field(doc):
        raise UsageError(f"{path} does not look like a field document")
    try:
        return lattice.field_from_json(doc)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad field document {path}: {exc}") from exc


def _build_hull(args) -> HullSpec:
    doc = _load_json(args.field)
    if isinstance(doc, dict) and "constraints" in doc:
        return hull_from_json(doc)
    field = lattice.field_from_json(doc)
    box = args.box if args.box is not None else field.box
    if args.kind == "polynomial":
        return HullSpec.from_field(field, box=box)
    rf = lattice.RatioField.compute(field, box=box,
                                    declared=_parse_axes(args.declared))
    return HullSpec.from_ratio_field(rf)


# -- subcommands ------------------------------------------------------------------


def cmd_gen_seq(args) -> int:
    if args.kind == "unbounded-ratio":
        seq = sequences.gen_unbounded_ratio(_parse_fraction(args.base), args.n)
    elif args.kind == "inner-radius":
        if args.radius is None:
            raise UsageError("inner-radius needs --radius")
        seq = sequences.gen_inner_radius(_parse_fraction(args.radius), args.n)
    else:
        seq = sequences.gen_inner_radius(Fraction(1), args.n)
    if args.form == "exponents":
        _emit_json(args, sequences.to_json_dict(seq))
    else:
        _emit_json(args, [scalar_to_json(v) for v in seq.term_values()])
    return EXIT_OK


def cmd_validate(args) -> int:
    doc = _load_json(args.input)
    try:
        if _looks_like_field(doc):
            lattice.validate_field(doc, tol=args.tol, seed=args.seed)
        else:
            sequences.validate(doc, tol=args.tol)
    except ValidationError as err:
        _emit_json(args, {"valid": False, "kind": err.kind,
                          "witness": _jsonable(err.witness),
                          "message": str(err)})
        return EXIT_VIOLATION
    _emit_json(args, {"valid": True})
    return EXIT_OK


def _jsonable(w):
    if isinstance(w, tuple):
        return [_jsonable(x) for x in w]
    return w


def cmd_annulus(args) -> int:
    seq = sequences.validate(_load_sequence(args.input), tol=args.tol)
    ann = sequences.annulus(seq, k_max=args.window)
    _emit_json(args, sequences.annulus_to_json(ann))
    return EXIT_OK


def cmd_cfield(args) -> int:
    field = lattice.validate_field(_load_field(args.field), seed=args.seed)
    rf = lattice.RatioField.compute(field, box=args.box,
                                    declared=_parse_axes(args.declared),
                                    window=args.window)
    values = [{"i": list(i), "C": scalar_to_json(b.value), "exact": b.exact}
              for i, b in sorted(rf.values.items())]
    _emit_json(args, {"invertible": sorted(rf.invertible),
                      "provenance": rf.provenance,
                      "box": rf.box,
                      "values": values})
    return EXIT_OK


def cmd_hull_member(args) -> int:
    spec = _build_hull(args)
    point = _parse_point(args.point)
    if len(point) != spec.n:
        raise UsageError(f"point has {len(point)} coordinates, hull has {spec.n}")
    sep = separating_monomial(spec, point, method=args.method, tol=args.tol)
    _emit_json(args, {"member": sep is None,
                      "separating": list(sep) if sep else None})
    return EXIT_OK


def cmd_hull_section(args) -> int:
    spec = _build_hull(args)
    fixed = _parse_fixed(args.fixed)
    radii = None
    if args.rmax is not None:
        rmax = _parse_fraction(args.rmax)
        radii = [Fraction(j, args.resolution - 1) * rmax
                 for j in range(args.resolution)]
    rows = cross_section(spec, fixed, args.free, radii=radii, tol=args.tol)
    out_rows = [(_num(r), int(inside)) for r, inside in rows]
    if args.plot:
        from .report import render_section
        render_section(rows, args.plot, axis_label=f"|s_{args.free}|")
    if args.format == "json":
        _emit_json(args, {"rows": [{"modulus": m, "inside": bool(i)}
                                   for m, i in out_rows]})
    else:
        _emit_csv(args, ["modulus", "inside"], out_rows)
    return EXIT_OK


def cmd_match(args) -> int:
    field = lattice.validate_field(_load_field(args.field), seed=args.seed)
    matched = matching.match_target(field, _parse_index(args.target),
                                    box=args.box,
                                    declared=_parse_axes(args.declared))
    top = [{"i": list(i), "B": scalar_to_json(v)}
           for i, v in sorted(matched.boxed_values().items())]
    _emit_json(args, {
        "target": list(matched.target),
        "invertible": sorted(matched.invertible),
        "plan": {"order": list(matched.plan.order),
                 "negatives": matched.plan.negatives},
        "levels": matched.level_dump(),
        "B": top,
    })
    return EXIT_OK


def cmd_min_norm(args) -> int:
    field = lattice.validate_field(_load_field(args.field), seed=args.seed)
    b = matching.min_monomial_norm(field, _parse_index(args.j), k_max=args.kmax,
                                   declared=_parse_axes(args.declared))
    _emit_json(args, {"value": scalar_to_json(b.value), "exact": b.exact})
    return EXIT_OK


def cmd_shift_verify(args) -> int:
    if not args.seq and not args.field:
        raise UsageError("shift-verify needs --seq or --field")
    if args.seq:
        seq = sequences.validate(_load_sequence(args.seq), tol=args.tol)
        shift = shift1d.build(seq)
        if args.table == "weights":
            rows = [(n, _num(w)) for n, w in shift.weight_table()]
            _emit_csv(args, ["n", "weight"], rows)
            return EXIT_OK
        k_hi = args.kmax if args.kmax else max(1, seq.window // 2)
        rows = []
        mismatches = 0
        for k in range(1, k_hi + 1):
            norm = shift1d.power_norm(shift, k)
            root = float(norm) ** (1.0 / k) if norm > 0 else 0.0
            if norm != seq.term(k):
                mismatches += 1
            rows.append((k, _num(norm), repr(root)))
        _emit_csv(args, ["k", "norm", "root"], rows)
        return EXIT_OK if mismatches == 0 else EXIT_VIOLATION

    field = lattice.validate_field(_load_field(args.field), seed=args.seed)
    if args.target:
        matched = matching.match_target(field, _parse_index(args.target),
                                        box=args.box,
                                        declared=_parse_axes(args.declared))
        system = latticeshift.build_system(matched)
        expected = matched.value_at
    else:
        system = latticeshift.build_system(field, box=args.box)
        expected = field.value
    report = latticeshift.check_commutation(system)
    norm_mismatches = 0
    checked = 0
    for m in system.basis():
        checked += 1
        if latticeshift.power_norms(system, m) != expected(m):
            norm_mismatches += 1
    _emit_json(args, {
        "source": system.source,
        "invertible": sorted(system.invertible),
        "commutation": {"pairs_checked": report.pairs_checked,
                        "violations": len(report.violations)},
        "norms": {"checked": checked, "mismatches": norm_mismatches},
    })
    ok = report.ok and norm_mismatches == 0
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_report(args) -> int:
    from .report import render_annulus, render_power_norms, render_section

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    doc = _load_json(args.input)
    written = []
    if _looks_like_field(doc):
        field = lattice.validate_field(lattice.field_from_json(doc), seed=args.seed)
        rf = lattice.RatioField.compute(field, box=args.box)
        cf_path = outdir / "ratio_bounds.json"
        cf_path.write_text(json.dumps({
            "invertible": sorted(rf.invertible),
            "values": [{"i": list(i), "C": scalar_to_json(b.value),
                        "exact": b.exact} for i, b in sorted(rf.values.items())],
        }, sort_keys=True) + "\n")
        written.append(cf_path)
        spec = HullSpec.from_ratio_field(rf)
        fixed = {k: Fraction(1) for k in range(1, field.n)}
        rows = cross_section(spec, fixed, 0)
        csv_path = outdir / "section_axis0.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["modulus", "inside"])
            writer.writerows([(_num(r), int(i)) for r, i in rows])
        written.append(csv_path)
        written.append(render_section(rows, outdir / "section_axis0.png",
                                      axis_label="|s_0|"))
    else:
        seq = sequences.validate(doc, tol=args.tol)
        ann = sequences.annulus(seq, k_max=args.window)
        ann_path = outdir / "annulus.json"
        ann_path.write_text(json.dumps(sequences.annulus_to_json(ann),
                                       sort_keys=True) + "\n")
        written.append(ann_path)
        if not seq.has_zero():
            shift = shift1d.build(seq)
            k_hi = max(1, seq.window // 2)
            rows = []
            for k in range(1, k_hi + 1):
                norm = shift1d.power_norm(shift, k)
                rows.append((k, _num(norm), float(norm) ** (1.0 / k)))
            csv_path = outdir / "power_norms.csv"
            with open(csv_path, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["k", "norm", "root"])
                writer.writerows([(k, n, repr(r)) for k, n, r in rows])
            written.append(csv_path)
            written.append(render_power_norms(rows, outdir / "power_norms.png"))
        written.append(render_annulus(float(ann.inner.value),
                                      float(ann.outer.value),
                                      outdir / "annulus.png"))
    _emit_json(args, {"written": sorted(str(p) for p in written)})
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spechull",
        description="Spectral containment sets from submultiplicative norm data")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, field=False):
        p.add_argument("--output", help="write to a file instead of stdout")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--seed", type=int, default=0,
                       help="seed for sampled validation scans")
        if field:
            p.add_argument("--box", type=int, default=None)
            p.add_argument("--declared", default=None,
                           help="comma-separated invertible axes (0-based)")

    p = sub.add_parser("gen-seq", help="generate an example sequence")
    p.add_argument("--kind", required=True,
                   choices=["unbounded-ratio", "inner-radius", "constant"])
    p.add_argument("--base", default="2")
    p.add_argument("--radius", default=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--form", choices=["values", "exponents"], default="values")
    common(p)
    p.set_defaults(func=cmd_gen_seq)

    p = sub.add_parser("validate", help="validate a sequence or field document")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("annulus", help="optimal annulus of a sequence prefix")
    p.add_argument("--input", required=True)
    p.add_argument("--window", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_annulus)

    p = sub.add_parser("cfield", help="directional ratio bounds of a field")
    p.add_argument("--field", required=True)
    p.add_argument("--window", type=int, default=None,
                   help="force truncated windowed scans")
    common(p, field=True)
    p.set_defaults(func=cmd_cfield)

    p = sub.add_parser("hull-member", help="test a point against a hull")
    p.add_argument("--field", required=True,
                   help="field document or explicit hull document")
    p.add_argument("--point", required=True)
    p.add_argument("--kind", choices=["rational", "polynomial"],
                   default="rational")
    p.add_argument("--method", choices=["log", "direct"], default="direct")
    common(p, field=True)
    p.set_defaults(func=cmd_hull_member)

    p = sub.add_parser("hull-section", help="radial in/out table of a hull")
    p.add_argument("--field", required=True)
    p.add_argument("--kind", choices=["rational", "polynomial"],
                   default="rational")
    p.add_argument("--free", type=int, default=0)
    p.add_argument("--fixed", default="",
                   help="fixed moduli as axis=value pairs, comma separated")
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--rmax", default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--plot", default=None, help="also render a PNG figure")
    common(p, field=True)
    p.set_defaults(func=cmd_hull_section)

    p = sub.add_parser("match", help="submultiplicative envelope pinned at a target")
    p.add_argument("--field", required=True)
    p.add_argument("--target", required=True)
    common(p, field=True)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("shift-verify", help="verify a weighted-shift realization")
    p.add_argument("--seq", default=None)
    p.add_argument("--field", default=None)
    p.add_argument("--target", default=None,
                   help="match the field at this target before building")
    p.add_argument("--table", choices=["powers", "weights"], default="powers")
    p.add_argument("--kmax", type=int, default=None)
    common(p, field=True)
    p.set_defaults(func=cmd_shift_verify)

    p = sub.add_parser("min-norm", help="smallest possible monomial sup-norm")
    p.add_argument("--field", required=True)
    p.add_argument("--j", required=True)
    p.add_argument("--kmax", type=int, default=8)
    common(p, field=True)
    p.set_defaults(func=cmd_min_norm)

    p = sub.add_parser("report", help="write JSON/CSV plus rendered figures")
    p.add_argument("--input", required=True)
    p.add_argument("--outdir", default="reports")
    p.add_argument("--window", type=int, default=None)
    common(p, field=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except _VIOLATIONS as err:
        print(f"violation: {err}", file=sys.stderr)
        return EXIT_VIOLATION
    except (ValueError, KeyError, IndexError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
