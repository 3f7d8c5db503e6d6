"""Command line front end: ``qf check|analyze|form|enumerate|gen|quotient|iso``.

Table files: the first line holds n, the next n lines hold the rows of the
Cayley table as space-separated integers; ``#`` starts a comment and the file
must end with a newline.  Exit codes: 0 success, 1 property fails, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Optional

from .errors import NotCongruence, NotF, ParseError, QFError
from .forms import basepoint_shift, form_at
from .gen import EnumSpec, builtin, count_parallel, iter_tables
from .laws import PUBLIC_LAWS, check_law, get_law, is_f_quasigroup, k_medial
from .qcore import CayleyTable, from_table
from .structure import (
    center, commutant, congruence_from_subloop, is_FG, is_isomorphic, is_simple,
    m_set, moufang_center, nucleus, quotient, rho_congruence, SIMPLE_CAP,
)

OK, FAILS, USAGE = 0, 1, 2
FORM_BASEPOINT_CAP = 32


# -- table files -----------------------------------------------------------------

def parse_table(text: str) -> CayleyTable:
    if not text.endswith("\n"):
        raise ParseError(max(1, text.count("\n") + 1), "missing final newline")
    lines = []
    for number, raw in enumerate(text.split("\n")[:-1], start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((number, body))
    if not lines:
        raise ParseError(1, "empty file")
    number, head = lines[0]
    try:
        n = int(head)
    except ValueError:
        raise ParseError(number, f"expected the order, got {head!r}") from None
    if n < 1:
        raise ParseError(number, "order must be positive")
    rows = lines[1:]
    if len(rows) != n:
        raise ParseError(rows[-1][0] if rows else number, f"expected {n} rows, got {len(rows)}")
    entries = []
    for number, body in rows:
        try:
            row = [int(tok) for tok in body.split()]
        except ValueError:
            raise ParseError(number, "non-integer entry") from None
        if len(row) != n:
            raise ParseError(number, f"expected {n} entries, got {len(row)}")
        entries.append(row)
    return from_table(n, entries)


def render_table(q: CayleyTable) -> str:
    return f"{q.order}\n" + "".join(" ".join(map(str, r)) + "\n" for r in q.rows)


def _read(path: str) -> CayleyTable:
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh.read())


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


# -- analysis --------------------------------------------------------------------

def analyze(q: CayleyTable, at: int = 0) -> dict:
    """Aggregate law results, structural subsets, forms and rho into one report."""
    laws = {name: check_law(q, name).to_json() for name in PUBLIC_LAWS}
    holds = {name: rep["holds"] for name, rep in laws.items()}
    is_f = holds["f_left"] and holds["f_right"]
    tags = set()
    if is_f:
        tags.add("F")
    if holds["associative"]:
        tags.add("group")
    if holds["medial"]:
        tags.update({"medial", "trimedial"})
    for name in ("distributive", "symmetric"):
        if holds[name]:
            tags.add(name)
    report = {
        "digest": hashlib.sha256(render_table(q).encode()).hexdigest(),
        "laws": laws,
        "order": q.order,
    }
    if q.order <= SIMPLE_CAP:
        simple = is_simple(q)
        report["simple"] = simple
        if simple:
            tags.add("simple")
    else:
        report["simple"] = None
    if not is_f:
        report["notice"] = "not an F-quasigroup; form, rho and M sections skipped"
        report["tags"] = sorted(tags)
        return report

    tri = k_medial(q, 3)
    report["trimedial"] = tri.to_json()
    if tri.holds:
        tags.add("trimedial")
    if is_FG(q):
        tags.add("FG")

    form, trace = form_at(q, at)
    loop = form.loop
    report["form"] = dict(form.to_json(), basepoint=at, a=trace.a, b=trace.b)
    report["subsets"] = {
        "center": center(loop).to_json(),
        "commutant": commutant(loop).to_json(),
        "m_set": m_set(q).to_json(),
        "moufang_center": moufang_center(loop).to_json(),
        "nucleus": nucleus(loop).to_json(),
    }
    points = range(q.order) if q.order <= FORM_BASEPOINT_CAP else range(8)
    summaries = []
    for r in points:
        fr, tr = form_at(q, r)
        summaries.append({"basepoint": r, "e": fr.e, "strong": fr.is_strong(), "zero": fr.zero})
    report["forms"] = summaries
    report["forms_truncated"] = q.order > FORM_BASEPOINT_CAP

    rho = rho_congruence(q)
    q_rho = quotient(q, rho)
    block = from_table(len(rho.blocks[0]), _block_table(q, rho.blocks[0])) if rho.blocks else None
    report["rho"] = {
        "block_size": len(rho.blocks[0]),
        "blocks": rho.size,
        "blocks_are_FG": block is not None and is_f_quasigroup(block) and is_FG(block),
        "quotient_distributive": check_law(q_rho, "distributive").holds,
        "quotient_symmetric": check_law(q_rho, "symmetric").holds,
    }

    m = m_set(q)
    c = congruence_from_subloop(loop, m.members)
    q_m = quotient(q, c)
    report["quotient_by_m"] = {
        "is_group": check_law(q_m, "associative").holds,
        "order": q_m.order,
    }
    report["tags"] = sorted(tags)
    return report


def _block_table(q: CayleyTable, block) -> list:
    index = {x: i for i, x in enumerate(block)}
    return [[index[q.mul(x, y)] for y in block] for x in block]


def quotient_by(q: CayleyTable, by: str) -> CayleyTable:
    if not is_f_quasigroup(q):
        raise NotF("quotients by M or rho need an F-quasigroup")
    if by == "rho":
        return quotient(q, rho_congruence(q))
    if by == "m":
        form, _ = form_at(q, 0)
        c = congruence_from_subloop(form.loop, m_set(q).members)
        return quotient(q, c)
    raise ValueError(f"--by must be m or rho, not {by!r}")


# -- commands --------------------------------------------------------------------

def cmd_check(args, out) -> int:
    q = _read(args.file)
    reports = [check_law(q, get_law(name)) for name in args.law]
    ok = all(r.holds for r in reports)
    out.write(_dump({"holds": ok, "laws": [r.to_json() for r in reports]}) + "\n")
    return OK if ok else FAILS


def cmd_analyze(args, out) -> int:
    q = _read(args.file)
    out.write(_dump(analyze(q, args.at)) + "\n")
    return OK


def cmd_form(args, out) -> int:
    q = _read(args.file)
    if not 0 <= args.at < q.order:
        raise ValueError(f"basepoint {args.at} out of range")
    form, trace = form_at(q, args.at)
    data = dict(form.to_json(), basepoint=args.at, a=trace.a, b=trace.b)
    if args.shift:
        try:
            a, b = (int(t) for t in args.shift.split(","))
        except ValueError:
            raise ValueError("--shift expects a,b") from None
        shifted = basepoint_shift(form, a, b)
        data = dict(shifted.to_json(), basepoint=args.at, shift=[a, b])
    out.write(_dump(data) + "\n")
    return OK


def cmd_enumerate(args, out) -> int:
    spec = EnumSpec(args.order, args.mode, tuple(args.filter or ()), args.limit)
    if args.count:
        count = count_parallel(spec, workers=args.workers)
        out.write(_dump({"count": count, "mode": spec.mode, "order": spec.order}) + "\n")
        return OK
    first = True
    for rows in iter_tables(spec):
        if not first:
            out.write("\n")
        out.write(render_table(from_table(spec.order, rows)))
        first = False
    return OK


def cmd_gen(args, out) -> int:
    out.write(render_table(builtin(args.id)))
    return OK


def cmd_quotient(args, out) -> int:
    out.write(render_table(quotient_by(_read(args.file), args.by)))
    return OK


def cmd_iso(args, out) -> int:
    w = is_isomorphic(_read(args.file1), _read(args.file2))
    out.write(_dump({"isomorphic": w is not None,
                     "witness": list(w.images) if w is not None else None}) + "\n")
    return OK if w is not None else FAILS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qf", description="finite quasigroup analysis")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="check laws on a table file")
    s.add_argument("file")
    s.add_argument("--law", nargs="+", required=True)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("analyze", help="full structural report")
    s.add_argument("file")
    s.add_argument("--at", type=int, default=0, help="basepoint of the reported form")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("form", help="arithmetic form at a basepoint")
    s.add_argument("file")
    s.add_argument("--at", type=int, default=0)
    s.add_argument("--shift", help="a,b with a in K and b in N")
    s.set_defaults(func=cmd_form)

    s = sub.add_parser("enumerate", help="enumerate small Latin squares")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--mode", choices=("all", "reduced", "loops"), default="all")
    s.add_argument("--filter", nargs="+", metavar="LAW")
    s.add_argument("--limit", type=int)
    s.add_argument("--count", action="store_true", help="print only the count")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("gen", help="print a builtin example table")
    s.add_argument("id")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("quotient", help="quotient by M or rho")
    s.add_argument("file")
    s.add_argument("--by", choices=("m", "rho"), required=True)
    s.set_defaults(func=cmd_quotient)

    s = sub.add_parser("iso", help="isomorphism witness between two tables")
    s.add_argument("file1")
    s.add_argument("file2")
    s.set_defaults(func=cmd_iso)
    return p


def main(argv: Optional[list] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else USAGE
    try:
        return args.func(args, out)
    except (NotF, NotCongruence) as exc:
        sys.stderr.write(f"qf: {exc}\n")
        return FAILS
    except (QFError, ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"qf: {exc}\n")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
