"""Command-line front end.

    asdcong reproduce ex1
    asdcong search --level 5 --character jacobi_top/5 --weight 2 --t "eta(5)^6/eta(1)^6"
    asdcong search2 --level 5 --weight 4 --g "eta(1)^4*eta(5)^4" --f1 10
    asdcong expand --level 5 --t "eta(5)^6/eta(1)^6" --f "eta(1)^5/eta(5)" --index-bound 20
    asdcong verify b.json --prime-max 13
    asdcong scan --prime-max 50 --index-bound 2000
    asdcong dims --table 3

Exit status: 0 when everything passes, 1 on a mathematical mismatch,
2 on a usage or data error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import engine, registry, tables
from .char_eis import DirichletChar
from .qconstructors import EtaQuotient
from .series_core import SeriesError, is_prime
from .spaces import (
    SpaceSpec,
    UnsupportedSpace,
    condition_star_report,
    dim_E,
    dim_M,
    sturm_bound,
)

OK, MISMATCH, USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class JobSpec:
    command: str
    level: int | None = None
    character: str | None = None
    weight: int | None = None
    t: str | None = None
    g: str | None = None
    precision: int | None = None
    prime_max: int = 13
    index_bound: int = 100
    fmt: str = "json"
    out: str | None = None
    data_dir: str | None = None
    extra: dict = field(default_factory=dict)

    def spec(self):
        if self.level is None:
            raise UsageError(f"{self.command} needs --level")
        return SpaceSpec(self.level, self.character or "principal", self.weight or 0)

    def min_precision(self):
        if self.level is None or self.weight is None:
            return 0
        return sturm_bound(self.level, self.weight + 2) + engine.MARGIN

    def effective_precision(self):
        """Default: max(Sturm bound + 10, index bound + 10)."""
        if self.precision is not None:
            return self.precision
        return max(self.min_precision(), self.index_bound + 10)

    def validate(self):
        if self.prime_max < 2:
            raise UsageError("--prime-max must be at least 2")
        if self.index_bound < self.prime_max:
            raise UsageError("--index-bound must be at least --prime-max")
        if self.precision is not None and self.precision < self.min_precision():
            raise UsageError(f"--precision {self.precision} is below the Sturm-derived minimum {self.min_precision()}")
        return self


# output -------------------------------------------------------------------------------


def _rows_csv(rows):
    if not rows:
        return ""
    buf = io.StringIO()
    keys = list(rows[0].keys())
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(r.get(k)) for k in keys})
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else str(v)


def _rows_md(rows):
    if not rows:
        return ""
    keys = list(rows[0].keys())
    lines = ["| " + " | ".join(keys) + " |", "|" + "---|" * len(keys)]
    for r in rows:
        lines.append("| " + " | ".join(_cell(r.get(k)).replace("|", "\\|") for k in keys) + " |")
    return "\n".join(lines) + "\n"


def render(record, rows, fmt):
    if fmt == "json":
        return json.dumps(record, indent=2, sort_keys=True, default=str) + "\n"
    if fmt == "csv":
        return _rows_csv(rows)
    if fmt == "md":
        return _rows_md(rows)
    raise UsageError(f"unknown format {fmt!r}")


def _report_rows(reports):
    rows = []
    for r in reports:
        bad = r.get("first_failure") or {}
        rows.append(
            {
                "sequence": r["sequence_id"],
                "prime": r["prime"],
                "flavor": r["flavor"],
                "status": r["status"],
                "checks": r["n_checks"],
                "verdict": r["verdict"],
                "witness": f"l={bad['ell']} r={bad['r']} n={bad['index']}" if bad else "",
            }
        )
    return rows


# commands ------------------------------------------------------------------------------


def cmd_reproduce(job):
    example = job.extra["example"]
    rep = registry.run_example(example, job.prime_max, job.index_bound, job.data_dir)
    rows = []
    for run in rep["runs"]:
        for name, passed in run["checks"].items():
            rows.append({"run": run["name"], "check": name, "result": "pass" if passed else "fail"})
    return rep, rows, rep["ok"]


def _pins(items):
    out = {}
    for item in items or ():
        k, _, v = item.partition("=")
        if not _:
            raise UsageError(f"--pin expects i=value, got {item!r}")
        out[int(k)] = Fraction(v)
    return out or None


def cmd_search(job):
    if not job.t:
        raise UsageError("search needs --t")
    spec = job.spec()
    t = EtaQuotient.parse(job.t, spec.level)
    cert = engine.find_theorem1(spec, t, prec=job.precision, pins=_pins(job.extra.get("pin")), data_dir=job.data_dir)
    rec = cert.to_record()
    rec["identity_holds"] = cert.identity_holds()
    return rec, [_cert_row(cert, rec["identity_holds"])], rec["identity_holds"]


def _cert_row(cert, ident):
    return {
        "kind": cert.kind,
        "level": cert.spec.level,
        "character": cert.spec.character.kind,
        "weight": cert.spec.weight,
        "combo": cert.combo.render(),
        "primes": cert.excluded_primes.render(),
        "D": cert.denominator_D,
        "identity": ident,
    }


def cmd_search2(job):
    if not job.g:
        raise UsageError("search2 needs --g")
    spec = job.spec()
    g = EtaQuotient.parse(job.g, spec.level)
    f1 = job.extra.get("f1")
    cert = engine.find_theorem2(
        spec, g, prec=job.precision, f1=Fraction(f1) if f1 is not None else None, data_dir=job.data_dir
    )
    rec = cert.to_record()
    rec["identity_holds"] = cert.identity_holds()
    return rec, [_cert_row(cert, rec["identity_holds"])], rec["identity_holds"]


def cmd_expand(job):
    if not job.t:
        raise UsageError("expand needs --t")
    n = job.index_bound
    prec = max(job.effective_precision(), n + 2)
    level = job.level
    t = EtaQuotient.parse(job.t, level).series(prec)
    if job.extra.get("f"):
        f = EtaQuotient.parse(job.extra["f"], level).series(prec)
    else:
        cert = engine.find_theorem1(job.spec(), job.t, prec=job.precision, data_dir=job.data_dir)
        f = cert.f_series(prec)
    res = engine.expand_in_t(f, t, n)
    rec = res.to_record()
    rec["reconstruction_ok"] = res.reconstruction_ok()
    rows = [{"n": i, "b": str(x)} for i, x in enumerate(res.b)]
    return rec, rows, rec["reconstruction_ok"]


def read_sequence(path):
    """A b-file: JSON list, JSON {"b": [...]}, or one rational per line."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if isinstance(data, dict):
        data = data["b"]
    try:
        return [Fraction(str(x)) for x in data]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{path}: not a list of rationals ({exc})") from exc


def cmd_verify(job):
    b = read_sequence(job.extra["file"])
    bound = min(job.index_bound, len(b) - 1)
    twist = job.extra.get("twist")
    primes = job.extra.get("primes") or [p for p in range(2, job.prime_max + 1) if is_prime(p)]
    reports = []
    for p in primes:
        if twist:
            chi = DirichletChar(job.level, twist)
            reports.append(engine.verify_twisted(b, p, chi, bound, "b"))
        else:
            reports.append(engine.verify_asd(b, p, bound, "b"))
    recs = [r.to_record() for r in reports]
    ok = all(r.verdict for r in reports)
    return {"bound": bound, "reports": recs, "ok": ok}, _report_rows(recs), ok


# scan ----------------------------------------------------------------------------------


def _scan_weight(row):
    m, r = row["weight_modulus"], row["weight_residue"]
    k = r if r > 0 else m
    return k


def scan_job(key, row, t_text, prime_max, bound, data_dir):
    """One Table 1 row: search, then the congruence suite at the row's primes.

    Pure in its arguments, so jobs may run in any order or process."""
    level, kind = row["level"], row["character"]
    k = _scan_weight(row)
    spec = SpaceSpec(level, kind, k)
    out = {"key": key, "level": level, "character": kind, "weight": k, "t": t_text, "cells": {}}
    try:
        cert = engine.find_theorem1(spec, EtaQuotient.parse(t_text, level), data_dir=data_dir)
    except (engine.NoSolution, engine.InfeasibleSpec) as exc:
        out["error"] = f"{type(exc).__name__}: {exc}"
        return out
    out["identity"] = cert.identity_holds()
    out["combo"] = cert.combo.render()
    out["D"] = cert.denominator_D
    pred = engine.table1_predicate(row)
    primes = [p for p in range(2, prime_max + 1) if pred(p)]
    good = [p for p in primes if cert.denominator_D % p]
    for p in primes:
        if p not in good:
            out["cells"][str(p)] = "p|D"
    if good:
        modulus = engine.suite_modulus(good, bound)
        b = cert.expansion_mod(bound, modulus).b
        for p in good:
            rep = engine.verify_asd(b, p, bound, f"N{level}", "claimed", modulus)
            out["cells"][str(p)] = "pass" if rep.verdict else "fail"
    return out


def _scan_jobs(job, max_level):
    t_by_level = {r["level"]: r["t"] for r in tables.table2(job.data_dir)}
    jobs = []
    for i, row in enumerate(tables.table1(job.data_dir)):
        if row["level"] > max_level or row["level"] not in t_by_level:
            continue
        key = f"{row['level']:02d}-{row['character']}"
        jobs.append((key, row, t_by_level[row["level"]], job.prime_max, job.index_bound, job.data_dir))
    return jobs


def cmd_scan(job):
    jobs = _scan_jobs(job, job.extra.get("max_level", 13))
    workers = job.extra.get("workers") or min(4, os.cpu_count() or 1)
    if workers <= 1:
        results = [scan_job(*j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(scan_job, *j) for j in jobs]
            results = [f.result() for f in futures]
    results.sort(key=lambda r: r["key"])
    ok = all("error" not in r and r.get("identity") and all(v != "fail" for v in r["cells"].values()) for r in results)
    rows = []
    for r in results:
        cells = r["cells"]
        rows.append(
            {
                "row": r["key"],
                "weight": r["weight"],
                "identity": r.get("identity"),
                "pass": " ".join(p for p, v in cells.items() if v == "pass"),
                "fail": " ".join(p for p, v in cells.items() if v == "fail"),
                "skipped": " ".join(p for p, v in cells.items() if v == "p|D"),
                "error": r.get("error", ""),
            }
        )
    rec = {"prime_max": job.prime_max, "index_bound": job.index_bound, "rows": results, "ok": ok}
    return rec, rows, ok


# dims ----------------------------------------------------------------------------------


def cmd_dims(job):
    which = job.extra.get("table")
    max_w = job.extra.get("max_weight", 24)
    rows = []
    ok = True
    if which is None:
        spec = job.spec()
        weights = [spec.weight] if job.weight is not None else range(1, max_w + 1)
        for k in weights:
            s = spec.with_weight(k)
            if s.parity_ok:
                rows.append(_dims_row(s, "star"))
    else:
        data = tables.TableData.load(job.data_dir)
        src = data.table1 if which == 1 else data.table3
        for row in src:
            for k in data.weights(row, max_w if which == 1 else max_w - 2):
                r = _dims_row(SpaceSpec(row["level"], row["character"], k), "star" if which == 1 else "equal")
                ok = ok and r["verdict"]
                rows.append(r)
    rec = {"table": which, "rows": rows, "ok": ok}
    return rec, rows, ok


def _dims_row(spec, mode):
    rep = condition_star_report(spec)
    up = spec.with_weight(spec.weight + 2)
    row = {
        "level": spec.level,
        "character": spec.character.kind,
        "weight": spec.weight,
        "dim_M_k": rep["dim_M_k"],
        "dim_M_k2": rep["dim_M_k_plus_2"],
        "dim_E_k": rep["dim_E_k"],
        "dim_E_k2": rep["dim_E_k_plus_2"],
        "star_proof": rep["proof_version"],
        "star_display": rep["display_version"],
    }
    if mode == "equal":
        row["verdict"] = dim_M(spec) == dim_M(up) and dim_E(up) == 2
    else:
        row["verdict"] = rep["proof_version"]
    return row


COMMANDS = {
    "reproduce": cmd_reproduce,
    "search": cmd_search,
    "search2": cmd_search2,
    "expand": cmd_expand,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "dims": cmd_dims,
}


# argument parsing ----------------------------------------------------------------------


def _common(p, prime_max=13, index_bound=100):
    p.add_argument("--level", type=int)
    p.add_argument("--weight", type=int)
    p.add_argument("--character", help="principal, jacobi_top/q or kronecker_-4")
    p.add_argument("--t", help="eta quotient, e.g. 'eta(5)^6/eta(1)^6'")
    p.add_argument("--g", help="eta quotient for the Phi_g search")
    p.add_argument("--precision", type=int)
    p.add_argument("--prime-max", type=int, default=prime_max)
    p.add_argument("--index-bound", type=int, default=index_bound)
    p.add_argument("--format", choices=("json", "csv", "md"), default="json")
    p.add_argument("--out")
    p.add_argument("--data-dir")


def build_parser():
    parser = argparse.ArgumentParser(prog="asdcong", description="Eisenstein certificates and ASD congruences")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reproduce", help="run a bundled example against its golden values")
    p.add_argument("example")
    _common(p, 13, 60)

    p = sub.add_parser("search", help="find f with f*theta(t)/t Eisenstein")
    _common(p)
    p.add_argument("--pin", action="append", help="fix a coefficient of f: i=value (repeatable)")

    p = sub.add_parser("search2", help="find f with Phi_g(f) Eisenstein")
    _common(p)
    p.add_argument("--f1", help="value of the free coefficient f_1")

    p = sub.add_parser("expand", help="expand f in powers of t")
    _common(p, 2, 20)
    p.add_argument("--f", help="eta quotient for f (default: run the search)")

    p = sub.add_parser("verify", help="check ASD congruences on a b-file")
    p.add_argument("file")
    _common(p)
    p.add_argument("--prime", type=int, action="append", dest="primes")
    p.add_argument("--twist", help="character kind for the twisted congruence")

    p = sub.add_parser("scan", help="Table 1 rows with Table 2 t's: pass/fail per prime")
    _common(p, 50, 2000)
    p.add_argument("--max-level", type=int, default=13)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("dims", help="dimensions and condition (*)")
    _common(p)
    p.add_argument("--table", type=int, choices=(1, 3))
    p.add_argument("--max-weight", type=int, default=24)
    return parser


def job_from_args(args):
    extra = {}
    for name in ("example", "pin", "f1", "f", "file", "primes", "twist", "max_level", "workers", "table", "max_weight"):
        if getattr(args, name, None) is not None:
            extra[name] = getattr(args, name)
    return JobSpec(
        command=args.command,
        level=args.level,
        character=args.character,
        weight=args.weight,
        t=args.t,
        g=args.g,
        precision=args.precision,
        prime_max=args.prime_max,
        index_bound=args.index_bound,
        fmt=args.format,
        out=args.out,
        data_dir=args.data_dir,
        extra=extra,
    )


def run(job):
    """(text, exit code) for a validated job."""
    job.validate()
    record, rows, ok = COMMANDS[job.command](job)
    return render(record, rows, job.fmt), OK if ok else MISMATCH


def main(argv=None):
    args = build_parser().parse_args(argv)
    job = job_from_args(args)
    try:
        text, code = run(job)
    except engine.NoSolution as exc:
        print(f"asdcong {job.command}: {exc}", file=sys.stderr)
        return MISMATCH
    except (
        UsageError,
        registry.UnknownExample,
        tables.DataError,
        UnsupportedSpace,
        engine.InfeasibleSpec,
        SeriesError,
        ValueError,
        OSError,
    ) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"asdcong {job.command} (level={job.level}, weight={job.weight}): {msg}", file=sys.stderr)
        return USAGE
    if job.out:
        Path(job.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
