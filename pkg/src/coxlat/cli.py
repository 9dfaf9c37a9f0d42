"""Command line interface: verify identities, list subset orbits, and print
characteristic polynomials or lattice summaries.

Reports come in three formats.  ``table`` is aligned text for reading,
``json`` is one schema-versioned document per run, ``csv`` is one section per
kind of row.  Polynomials print in factored form when their integer roots
account for the full degree and as ascending coefficient lists otherwise;
JSON always carries ascending integer coefficient arrays.  Subsets on the
command line and in reports use 1-based node numbers in Bourbaki order:
chains are numbered along the diagram, the marked bond of B/C/F/G sits at
the high end, the fork tips of D are the last two nodes, and product factors
are numbered left to right.

With ``--no-timing`` all reported timings are zeroed, which makes repeated
runs byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from .coxeter import (
    DEFAULT_CAP,
    CoxeterType,
    EnumerationCapError,
    UnsupportedTypeError,
    build_root_system,
    parse_type,
)
from .exact import IntPolynomial
from .identities import (
    IDENTITY_ORDER,
    run_all,
    verify_theorem1,
    verify_theorem1_subset,
)
from .lattice import build_lattice

SCHEMA_VERSION = 1


class UsageError(Exception):
    """Flag combinations a command cannot honor; reported with exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    ctype: CoxeterType
    command: str
    identities: tuple[str, ...] = ("all",)
    output: str = "table"
    big: bool = False
    cap: int = DEFAULT_CAP
    subset: tuple[int, ...] | None = None  # zero-based internally
    timing: bool = True

    @property
    def effective_cap(self) -> int:
        return max(self.cap, self.ctype.order) if self.big else self.cap

    @property
    def gated(self) -> bool:
        """True for types past the cap, which demand --big and subset mode."""
        return self.ctype.order > self.cap


# ---------------------------------------------------------------------------
# Value rendering


def _poly_str(p: IntPolynomial) -> str:
    deg = p.degree
    if deg > 0 and p == IntPolynomial.t_power(deg):
        return "t" if deg == 1 else f"t^{deg}"
    return p.factored_str()


def _value_str(v) -> str:
    if isinstance(v, IntPolynomial):
        return _poly_str(v)
    if isinstance(v, tuple):
        return "[" + ", ".join(str(c) for c in v) + "]"
    return str(v)


def _json_value(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, IntPolynomial):
        return list(v.coeffs)
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    if isinstance(v, (tuple, list)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (int, str)) or v is None:
        return v
    return str(v)


def _subset_str(subset) -> str:
    return "{" + ",".join(str(k + 1) for k in subset) + "}"


def _aligned(header, rows):
    table = [list(header)] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    return ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in table]


def _row_json(row) -> dict:
    return {
        "representative": [k + 1 for k in row.representative],
        "type": row.type_label,
        "lambda": row.lambda_size,
        "rhs": _json_value(row.rhs_value),
        "normalizer_index": row.normalizer_index,
        "chi": list(row.chi_fix.coeffs),
        "match": row.match,
    }


def _report_json(r, timing: bool) -> dict:
    doc = {
        "name": r.identity_name,
        "holds": r.holds,
        "lhs": _json_value(r.lhs),
        "rhs": _json_value(r.rhs),
    }
    if r.rows:
        doc["rows"] = [_row_json(row) for row in r.rows]
    doc["details"] = _json_value(r.details)
    doc["timing_ms"] = r.timing_ms if timing else 0
    return doc


def _document(config: RunConfig, body: dict, started: float) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "type": config.ctype.name,
        "command": config.command,
    }
    doc.update(body)
    elapsed = int(round((time.perf_counter() - started) * 1000))
    doc["timing_ms"] = elapsed if config.timing else 0
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# verify


def _expand_identities(config: RunConfig) -> tuple[str, ...]:
    if config.subset is not None:
        if config.identities in (("all",), ("theorem1",)):
            return ("theorem1",)
        raise UsageError(
            "subset mode checks the orbit-size identity only; "
            "drop --identities or pass --identities theorem1"
        )
    return config.identities


def _verify_reports(config: RunConfig):
    names = _expand_identities(config)
    if config.subset is not None:
        if config.gated and not config.subset:
            raise UsageError(
                f"{config.ctype.name} needs a nonempty --subset; the full lattice "
                "is past the supported scale"
            )
        return [verify_theorem1_subset(config.ctype, config.subset, cap=config.effective_cap)]
    if config.gated:
        raise UsageError(
            f"full verification of {config.ctype.name} is past the supported scale; "
            "pass --subset to check one orbit row"
        )
    return run_all(config.ctype, names, cap=config.effective_cap)


def _render_verify(config: RunConfig, reports, started: float) -> str:
    if config.output == "json":
        body = {"identities": [_report_json(r, config.timing) for r in reports]}
        return _document(config, body, started)
    if config.output == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["identity", "holds", "lhs", "rhs"]
        if config.timing:
            header.append("timing_ms")
        writer.writerow(header)
        for r in reports:
            row = [r.identity_name, str(r.holds).lower(), _value_str(r.lhs), _value_str(r.rhs)]
            if config.timing:
                row.append(r.timing_ms)
            writer.writerow(row)
        for r in reports:
            if not r.rows:
                continue
            buf.write("\n")
            writer.writerow(
                ["representative", "type", "lambda", "rhs", "normalizer_index", "chi", "match"]
            )
            for row in r.rows:
                writer.writerow(
                    [
                        ",".join(str(k + 1) for k in row.representative),
                        row.type_label,
                        row.lambda_size,
                        str(row.rhs_value),
                        row.normalizer_index,
                        _poly_str(row.chi_fix),
                        str(row.match).lower(),
                    ]
                )
        return buf.getvalue()
    lines = [f"type: {config.ctype.name}"]
    header = ["identity", "holds", "lhs", "rhs"]
    if config.timing:
        header.append("time")
    body = []
    for r in reports:
        row = [r.identity_name, "yes" if r.holds else "NO", _value_str(r.lhs), _value_str(r.rhs)]
        if config.timing:
            row.append(f"{r.timing_ms}ms")
        body.append(row)
    lines += _aligned(header, body)
    for r in reports:
        if not r.rows:
            continue
        lines.append("")
        lines.append("orbit rows:")
        rows = [
            [
                _subset_str(row.representative),
                row.type_label,
                row.lambda_size,
                row.normalizer_index,
                _poly_str(row.chi_fix),
                str(row.rhs_value),
                "ok" if row.match else "MISMATCH",
            ]
            for row in r.rows
        ]
        lines += [
            "  " + line
            for line in _aligned(["K", "type", "lambda", "|W|/|N|", "chi", "rhs", ""], rows)
        ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# orbits


def _render_orbits(config: RunConfig, report, started: float) -> str:
    if config.output == "json":
        body = {"rows": [_row_json(row) for row in report.rows]}
        return _document(config, body, started)
    if config.output == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["representative", "type", "lambda", "normalizer_index", "chi"])
        for row in report.rows:
            writer.writerow(
                [
                    ",".join(str(k + 1) for k in row.representative),
                    row.type_label,
                    row.lambda_size,
                    row.normalizer_index,
                    _poly_str(row.chi_fix),
                ]
            )
        return buf.getvalue()
    lines = [f"type: {config.ctype.name}", f"orbits: {len(report.rows)}"]
    rows = [
        [
            _subset_str(row.representative),
            row.type_label,
            row.lambda_size,
            row.normalizer_index,
            _poly_str(row.chi_fix),
        ]
        for row in report.rows
    ]
    lines += _aligned(["K", "type", "lambda", "|W|/|N|", "chi"], rows)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# charpoly and lattice


def _charpoly_data(config: RunConfig):
    rs = build_root_system(config.ctype)
    subset = config.subset or ()
    seeds = [int(rs.simple_index[k]) for k in subset]
    if config.gated:
        if not subset:
            raise UsageError(
                f"{config.ctype.name} needs a nonempty --subset; the full lattice "
                "is past the supported scale"
            )
        lat = build_lattice(rs, seed_hyperplanes=seeds)
        return subset, lat.char_poly_upper(lat.bottom_index)
    lat = build_lattice(rs)
    node = lat.mask_index[lat.flat_mask(seeds)]
    return subset, lat.char_poly_upper(node)


def _render_charpoly(config: RunConfig, subset, chi, started: float) -> str:
    if config.output == "json":
        body = {
            "subset": [k + 1 for k in subset],
            "chi": list(chi.coeffs),
            "factored": _poly_str(chi),
        }
        return _document(config, body, started)
    if config.output == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["subset", "chi", "factored"])
        writer.writerow(
            [",".join(str(k + 1) for k in subset), str(list(chi.coeffs)), _poly_str(chi)]
        )
        return buf.getvalue()
    lines = [
        f"type: {config.ctype.name}",
        f"subset: {_subset_str(subset)}",
        f"chi = {_poly_str(chi)}",
        f"coefficients: {list(chi.coeffs)}",
    ]
    return "\n".join(lines) + "\n"


def _lattice_data(config: RunConfig):
    rs = build_root_system(config.ctype)
    subset = config.subset or ()
    seeds = [int(rs.simple_index[k]) for k in subset]
    if config.gated and not subset:
        raise UsageError(
            f"{config.ctype.name} needs a nonempty --subset; the full lattice "
            "is past the supported scale"
        )
    lat = build_lattice(rs, seed_hyperplanes=seeds) if subset else build_lattice(rs)
    dims = [int(d) for d in lat.node_dims]
    by_dim = []
    for d in range(max(dims), -1, -1):
        count = dims.count(d)
        if count:
            by_dim.append((d, count))
    chi = lat.char_poly_upper(lat.bottom_index)
    roots = chi.integer_roots()
    exponents = list(roots) if len(roots) == chi.degree else None
    return subset, lat.num_nodes, by_dim, chi, exponents


def _render_lattice(config, subset, num, by_dim, chi, exponents, started) -> str:
    if config.output == "json":
        body = {
            "subset": [k + 1 for k in subset],
            "num_flats": num,
            "flats_by_dim": [[d, c] for d, c in by_dim],
            "chi": list(chi.coeffs),
            "exponents": exponents,
        }
        return _document(config, body, started)
    if config.output == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dim", "flats"])
        for d, c in by_dim:
            writer.writerow([d, c])
        buf.write("\n")
        writer.writerow(["chi", "factored", "exponents"])
        writer.writerow(
            [
                str(list(chi.coeffs)),
                _poly_str(chi),
                " ".join(str(e) for e in exponents) if exponents else "",
            ]
        )
        return buf.getvalue()
    lines = [f"type: {config.ctype.name}"]
    if subset:
        lines.append(f"subset: {_subset_str(subset)}")
    lines.append(f"flats: {num}")
    for d, c in by_dim:
        lines.append(f"  dim {d}: {c}")
    lines.append(f"chi = {_poly_str(chi)}")
    if exponents is not None:
        lines.append("exponents: " + " ".join(str(e) for e in exponents))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Dispatch


def run(config: RunConfig) -> tuple[int, str]:
    """Execute one command; returns (exit code, rendered report)."""
    started = time.perf_counter()
    if config.gated and not config.big:
        raise UsageError(
            f"{config.ctype.name} has order {config.ctype.order}, past the cap of "
            f"{config.cap}; pass --big to allow the enumeration"
        )
    if config.command == "verify":
        reports = _verify_reports(config)
        code = 0 if all(r.holds for r in reports) else 1
        return code, _render_verify(config, reports, started)
    if config.command == "orbits":
        if config.gated:
            raise UsageError(
                f"orbit listing for {config.ctype.name} is past the supported scale; "
                "use verify --subset for single rows"
            )
        report = verify_theorem1(config.ctype, cap=config.effective_cap)
        return 0, _render_orbits(config, report, started)
    if config.command == "charpoly":
        subset, chi = _charpoly_data(config)
        return 0, _render_charpoly(config, subset, chi, started)
    if config.command == "lattice":
        data = _lattice_data(config)
        return 0, _render_lattice(config, *data, started)
    raise UsageError(f"unknown command {config.command!r}")


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coxlat",
        description="Exact orbit and characteristic polynomial checks "
        "for finite Coxeter groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("verify", "check identities, both sides computed independently"),
        ("orbits", "list subset orbits with sizes and polynomials"),
        ("charpoly", "characteristic polynomial above one fixed subspace"),
        ("lattice", "intersection lattice summary"),
    ]
    for name, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument(
            "--type",
            required=True,
            dest="type_text",
            metavar="TYPE",
            help='type string such as "B3", "I2(7)", or "A2xA1"',
        )
        p.add_argument("--output", choices=("table", "json", "csv"), default="table")
        p.add_argument("--big", action="store_true", help="allow enumerations past the cap")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration cap")
        p.add_argument(
            "--no-timing",
            action="store_true",
            help="report zero timings, for byte-stable output",
        )
        if name != "orbits":
            p.add_argument(
                "--subset",
                default=None,
                metavar="I,J,...",
                help="1-based simple-root node numbers",
            )
        if name == "verify":
            p.add_argument(
                "--identities",
                default="all",
                help="comma list from: " + ", ".join(IDENTITY_ORDER) + ", all",
            )
    return parser


def _parse_subset(text: str, rank: int) -> tuple[int, ...]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"subset must be comma-separated integers, got {text!r}") from None
    subset = tuple(sorted(set(v - 1 for v in values)))
    if any(k < 0 or k >= rank for k in subset):
        raise UsageError(f"subset nodes must be 1-based numbers between 1 and {rank}")
    return subset


def _parse_identities(text: str) -> tuple[str, ...]:
    names = tuple(tok.strip() for tok in text.split(",") if tok.strip())
    if not names:
        raise UsageError("empty --identities list")
    known = set(IDENTITY_ORDER) | {"all"}
    for name in names:
        if name not in known:
            raise UsageError(f"unknown identity {name!r}; choose from {sorted(known)}")
    return names


def config_from_args(args: argparse.Namespace) -> RunConfig:
    ctype = parse_type(args.type_text)
    if any(f.family == "E" and f.rank == 8 for f in ctype.factors):
        raise UsageError("E8 exceeds supported scale: 696729600 elements")
    subset_text = getattr(args, "subset", None)
    subset = None if subset_text is None else _parse_subset(subset_text, ctype.rank)
    identities = ("all",)
    if getattr(args, "identities", None) is not None:
        identities = _parse_identities(args.identities)
    if args.cap <= 0:
        raise UsageError("--cap must be positive")
    return RunConfig(
        ctype=ctype,
        command=args.command,
        identities=identities,
        output=args.output,
        big=args.big,
        cap=args.cap,
        subset=subset,
        timing=not args.no_timing,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        code, text = run(config)
    except (UsageError, UnsupportedTypeError, EnumerationCapError) as exc:
        print(f"coxlat: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
