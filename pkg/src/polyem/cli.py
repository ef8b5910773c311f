"""Command line interface.

    polyem count --polytope tri.json --cmap flag.json
    polyem mu --cone k0.json --cmap flag.json --constant-term
    polyem verify --polytope tri.json --identity interpolator

Inputs are JSON files (or inline JSON when the argument starts with ``{``).
All numbers are exact: rationals are written as "p/q" strings, never floats.
Exit codes: 0 success, 1 failed verification, 2 bad input, 3 complement map
not generic, 4 enumeration too large.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .checks import CONE_CHECKS, POLYTOPE_CHECKS, run_checks
from .errors import InputError, PolyemError
from .euler import (
    count_lattice_points,
    em_integral,
    em_sum,
    format_polynomial,
    parse_polynomial,
    volume_from_lattice_points,
)
from .exactmath import QQ, field_for
from .genfun import MeroFun, i_of, render, s_interior, s_of, taylor_at_zero
from .geometry import Cone, Polytope, supporting_cone
from .interp import ComplementMap, InterpolatorCache, audit_genericity, interpolator
from .lattice import LatticeContext

MAX_DIM = 4


# --------------------------------------------------------------------------
# input


def _load(arg: str, what: str) -> dict:
    text = arg
    if not arg.lstrip().startswith("{"):
        try:
            text = sys.stdin.read() if arg == "-" else Path(arg).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {what} file {arg!r}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"{what} JSON must be an object")
    return data


def _rational(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise InputError(f"{x!r}: write rationals as integers or \"p/q\" strings")
    return QQ(x)


def _vectors(data, key: str, dim: int | None = None, required: bool = True) -> list:
    rows = data.get(key)
    if rows is None:
        if required:
            raise InputError(f"missing {key!r}")
        return []
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError(f"{key!r} must be a list of vectors")
    out = [tuple(_rational(a) for a in r) for r in rows]
    if dim is not None and any(len(r) != dim for r in out):
        raise InputError(f"every vector in {key!r} must have length {dim}")
    return out


def _lattice(data, dim: int) -> LatticeContext:
    basis = _vectors(data, "lattice", dim, required=False)
    return LatticeContext(dim, tuple(basis)) if basis else LatticeContext.standard(dim)


def _check_dim(dim: int):
    if not 1 <= dim <= MAX_DIM:
        raise InputError(f"dimension must be between 1 and {MAX_DIM}, got {dim}")


def load_polytope(arg: str) -> Polytope:
    data = _load(arg, "polytope")
    vertices = _vectors(data, "vertices")
    if not vertices:
        raise InputError("a polytope needs at least one vertex")
    dim = len(vertices[0])
    _check_dim(dim)
    return Polytope(vertices, _lattice(data, dim))


def load_cone(arg: str) -> Cone:
    data = _load(arg, "cone")
    if "apex" not in data or not isinstance(data["apex"], list):
        raise InputError("a cone needs an 'apex' vector")
    apex = tuple(_rational(a) for a in data["apex"])
    dim = len(apex)
    _check_dim(dim)
    gens = _vectors(data, "generators", dim, required=False)
    lin = _vectors(data, "lineality", dim, required=False)
    return Cone(apex, gens, lin, _lattice(data, dim))


def load_cmap(arg: str | None, dim: int) -> ComplementMap:
    if arg is None:
        return ComplementMap.standard(dim)
    data = _load(arg, "complement map")
    params = data.get("parameters", [])
    if not isinstance(params, list) or not all(isinstance(p, str) for p in params):
        raise InputError("'parameters' must be a list of names")
    F = field_for(params)
    kind = data.get("kind")
    key = {"inner_product": "matrix", "flag": "vectors"}.get(kind)
    if key is None:
        raise InputError(f"complement map 'kind' must be 'inner_product' or 'flag', got {kind!r}")
    rows = data.get(key)
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError(f"complement map needs {key!r} as a list of rows")
    for r in rows:
        for a in r:
            if isinstance(a, (bool, float)):
                raise InputError(f"{a!r}: write entries as integers or strings")
    entries = [[F(a if isinstance(a, str) else int(a)) for a in r] for r in rows]
    cmap = ComplementMap(kind, len(entries), tuple(tuple(r) for r in entries), F)
    if cmap.dim != dim:
        raise InputError(f"complement map has dimension {cmap.dim}, the input lives in dimension {dim}")
    return cmap


# --------------------------------------------------------------------------
# output helpers


def _vec(v) -> str:
    return "(" + ", ".join(QQ.format(a) for a in v) + ")"


def merofun_json(f: MeroFun) -> dict:
    fmt = f.field.format
    return {
        "dim": f.dim,
        "parameters": list(f.field.parameters),
        "terms": [
            {
                "coeff": fmt(t.coeff),
                "point": [fmt(a) for a in t.point],
                "lin": [[fmt(a) for a in v] for v in t.lin],
                "exp": [[fmt(a) for a in w] for w in t.exp],
            }
            for t in f.terms
        ],
        "text": render(f),
    }


def merofun_from_json(data: dict) -> MeroFun:
    F = field_for(data.get("parameters", []))
    terms = [
        (F(t["coeff"]), tuple(F(a) for a in t["point"]), [tuple(F(a) for a in v) for v in t["lin"]], [tuple(F(a) for a in w) for w in t["exp"]])
        for t in data["terms"]
    ]
    return MeroFun(F, data["dim"], terms)


def _monomial(e) -> str:
    parts = [f"xi{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k]
    return "*".join(parts) or "1"


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    return "\n".join([line(headers), line(["-" * w for w in widths])] + [line(r) for r in rows])


def _sorted_rows(rows):
    return sorted(rows, key=lambda r: (r.face.dim, r.face.index))


# --------------------------------------------------------------------------
# commands


def cmd_expand(args) -> tuple[dict, str]:
    X = _target(args)
    F = QQ
    out = {"S": s_of(X, F), "I": i_of(X, F)}
    if isinstance(X, Polytope):
        out["S_interior"] = s_interior(X, F)
    payload = {key: merofun_json(f) for key, f in out.items()}
    text = "\n".join(f"{key} = {render(f)}" for key, f in out.items())
    return payload, text


def cmd_interpolator(args) -> tuple[dict, str]:
    kind = args.command
    K = _target(args, polytope=False)
    cmap = load_cmap(args.cmap, K.ambient_dim)
    F = cmap.field
    f = interpolator(kind, cmap, K, InterpolatorCache())
    if args.constant_term:
        c = taylor_at_zero(f, 0).constant_term()
        return {"kind": kind, "constant_term": F.format(c)}, F.format(c)
    payload = {"kind": kind, "function": merofun_json(f)}
    lines = [render(f)]
    if args.order is not None:
        series = taylor_at_zero(f, args.order)
        coeffs = sorted(series.coefficients.items(), key=lambda kv: (sum(kv[0]), tuple(-a for a in kv[0])))
        payload["taylor"] = [{"exponent": list(e), "coeff": F.format(c)} for e, c in coeffs]
        lines.append(f"Taylor coefficients through order {args.order}:")
        lines += [f"  {_monomial(e)}: {F.format(c)}" for e, c in coeffs]
    return payload, "\n".join(lines)


def _face_table(P: Polytope, rows, F, value_header: str, constant_header: str, volume_header: str = "volume"):
    body = [
        [str(r.face.dim), " ".join(_vec(v) for v in r.vertices), F.format(r.constant), QQ.format(r.volume), F.format(r.value)]
        for r in _sorted_rows(rows)
    ]
    json_rows = [
        {
            "dim": r.face.dim,
            "vertices": [[QQ.format(a) for a in v] for v in r.vertices],
            "constant": F.format(r.constant),
            "volume": QQ.format(r.volume),
            "value": F.format(r.value),
        }
        for r in _sorted_rows(rows)
    ]
    return json_rows, _table(["dim", "vertices", constant_header, volume_header, value_header], body)


def cmd_count(args) -> tuple[dict, str]:
    P = _target(args, cone=False)
    cmap = load_cmap(args.cmap, P.ambient_dim)
    F = cmap.field
    total, rows = count_lattice_points(cmap, P, InterpolatorCache(), detail=True)
    json_rows, table = _face_table(P, rows, F, "contribution", "mu(0)")
    return {"count": F.format(total), "faces": json_rows}, f"{F.format(total)}\n{table}"


def cmd_volume(args) -> tuple[dict, str]:
    P = _target(args, cone=False)
    cmap = load_cmap(args.cmap, P.ambient_dim)
    F = cmap.field
    total, rows = volume_from_lattice_points(cmap, P, InterpolatorCache(), detail=True)
    json_rows, table = _face_table(P, rows, F, "contribution", "lambda(0)")
    return {"volume": F.format(total), "faces": json_rows}, f"{F.format(total)}\n{table}"


def _polynomial(args, dim: int, F):
    if args.poly is None:
        raise InputError("this command needs --poly")
    return parse_polynomial(args.poly, dim, F)


def cmd_sum(args) -> tuple[dict, str]:
    P = _target(args, cone=False)
    cmap = load_cmap(args.cmap, P.ambient_dim)
    F = cmap.field
    h = _polynomial(args, P.ambient_dim, F)
    total, rows = em_sum(cmap, P, h, InterpolatorCache(), detail=True)
    json_rows, table = _face_table(P, rows, F, "integral", "mu(0)")
    return {"poly": format_polynomial(h, F), "sum": F.format(total), "faces": json_rows}, f"{F.format(total)}\n{table}"


def cmd_integrate(args) -> tuple[dict, str]:
    P = _target(args, cone=False)
    cmap = load_cmap(args.cmap, P.ambient_dim)
    F = cmap.field
    h = _polynomial(args, P.ambient_dim, F)
    total, rows = em_integral(cmap, P, h, args.mode, InterpolatorCache(), detail=True)
    json_rows, table = _face_table(P, rows, F, "lattice sum", f"{args.mode}(0)")
    payload = {"poly": format_polynomial(h, F), "mode": args.mode, "integral": F.format(total), "faces": json_rows}
    return payload, f"{F.format(total)}\n{table}"


def cmd_verify(args) -> tuple[dict, str]:
    X = _target(args)
    cmap = load_cmap(args.cmap, X.ambient_dim)
    h = parse_polynomial(args.poly, X.ambient_dim, cmap.field) if args.poly is not None else None
    results = run_checks(cmap, X, args.identity, h, args.seed)
    payload = {
        "passed": all(r.passed for r in results),
        "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail, "discrepancy": r.discrepancy} for r in results],
    }
    lines = []
    for r in results:
        line = f"{'PASS' if r.passed else 'FAIL'}  {r.name}"
        if r.detail:
            line += f": {r.detail}"
        if r.discrepancy is not None:
            line += f" [difference: {r.discrepancy}]"
        lines.append(line)
    return payload, "\n".join(lines)


COMMANDS = {
    "expand": cmd_expand,
    "mu": cmd_interpolator,
    "lambda": cmd_interpolator,
    "nu": cmd_interpolator,
    "count": cmd_count,
    "volume": cmd_volume,
    "sum": cmd_sum,
    "integrate": cmd_integrate,
    "verify": cmd_verify,
}


def _target(args, polytope: bool = True, cone: bool = True):
    given = [name for name in ("polytope", "cone") if getattr(args, name, None) is not None]
    allowed = [name for name, ok in (("polytope", polytope), ("cone", cone)) if ok]
    if len(given) != 1 or given[0] not in allowed:
        raise InputError(f"{args.command} needs exactly one of " + " or ".join(f"--{a}" for a in allowed))
    return load_polytope(args.polytope) if given[0] == "polytope" else load_cone(args.cone)


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyem", description="Exact local Euler-Maclaurin formulas for rational polytopes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str, polytope=True, cone=True, cmap=True):
        p = sub.add_parser(name, help=help)
        if polytope:
            p.add_argument("--polytope", metavar="FILE", help="polytope JSON {vertices, lattice?}")
        if cone:
            p.add_argument("--cone", metavar="FILE", help="cone JSON {apex, generators, lineality?, lattice?}")
        if cmap:
            p.add_argument("--cmap", metavar="FILE", help="complement map JSON (default: standard inner product)")
        p.add_argument("--format", choices=["text", "json"], default="text")
        return p

    add("expand", "exponential sum and integral as meromorphic functions", cmap=False)
    for kind in ("mu", "lambda", "nu"):
        p = add(kind, f"the interpolator {kind} of a cone", polytope=False)
        p.add_argument("--constant-term", action="store_true", help="print only the value at the origin")
        p.add_argument("--order", type=_order, help="also print Taylor coefficients through this order")
    add("count", "number of lattice points from local constants", cone=False)
    add("volume", "volume from weighted lattice point counts", cone=False)
    p = add("sum", "sum of a polynomial over lattice points", cone=False)
    p.add_argument("--poly", metavar="EXPR", help='polynomial in x1..xn, e.g. "x1^2 + x2"')
    p = add("integrate", "integral of a polynomial from lattice point sums", cone=False)
    p.add_argument("--poly", metavar="EXPR")
    p.add_argument("--mode", choices=["lambda", "nu"], default="lambda")
    p = add("verify", "check the defining identities on an input")
    p.add_argument("--identity", action="append", metavar="NAME", help=f"identity to check (repeatable): {', '.join(sorted(set(POLYTOPE_CHECKS + CONE_CHECKS)))}")
    p.add_argument("--poly", metavar="EXPR", help="polynomial for the em_sum and em_integral checks (default 1)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    return parser


def _order(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("order must be non-negative")
    return n


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, text = COMMANDS[args.command](args)
    except PolyemError as exc:
        print(f"polyem: error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.format == "json":
        print(json.dumps({"command": args.command, **payload}, indent=2, sort_keys=True))
    else:
        print(text)
    if args.command == "verify" and not payload["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
