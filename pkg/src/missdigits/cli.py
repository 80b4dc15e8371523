"""Command-line front end; every subcommand emits one JSON report."""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from typing import Optional, Sequence

from . import __version__
from .cantor import (
    LevelSetSpec,
    check_formula,
    fmt_thickness,
    gap_system,
    level_set,
    thickness_exact,
)
from .expansions import MissingDigitSpec, avoids, expand_nat, parse_digit_set
from .fy import AlignmentProblem, NotFound, certify_common_integer, find_alignment, solve_threshold_M
from .gaussian import (
    GaussianDigitSystem,
    centered_residue_system,
    enumerate_representable,
    gauss_alignment,
    gauss_expand,
    gauss_search_common,
    level_cells,
    parse_gaussian,
    parse_gaussian_list,
    render,
    residue_system,
    validate_digit_system,
)
from .numeric import DEFAULT_BITS, Q, fmt_q
from .search import SearchQuery, count_common, next_avoiding, search_common

PRECISION_ENV = "MISSDIGITS_BITS"
EXIT_OK, EXIT_USAGE, EXIT_CERT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let "-1+i", "-i" and "-3" through as values rather than options
        self._negative_number_matcher = re.compile(r"^-(\d+([+-]\d*)?i?|\d*i)$")

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_bits() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_BITS
    try:
        bits = int(raw)
    except ValueError:
        raise UsageError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None
    if bits < 32:
        raise UsageError(f"{PRECISION_ENV} must be >= 32")
    return bits


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _missing_sets(text: Optional[str], count: int) -> list[frozenset[int]]:
    if text is None:
        return [frozenset({0})] * count
    parts = text.split(";")
    if len(parts) == 1 and count > 1:
        parts = parts * count
    if len(parts) != count:
        raise UsageError(f"--missing has {len(parts)} groups for {count} bases")
    return [parse_digit_set(p) for p in parts]


def _digits_str(n: int, b: int) -> str:
    return str(expand_nat(n, b))


# ---------------------------------------------------------------------------
# handlers: each returns (inputs, outputs, exit code)


def cmd_expand(a):
    d = expand_nat(a.n, a.base)
    return {"n": str(a.n), "base": a.base}, {"digits": d.msf(), "string": str(d), "length": len(d.digits)}, 0


def cmd_avoid(a):
    spec = MissingDigitSpec(a.base, parse_digit_set(a.missing))
    nxt = next_avoiding(a.n, spec)
    out = {
        "avoids": avoids(a.n, spec),
        "digits": expand_nat(a.n, a.base).msf(),
        "next_avoiding": None if nxt is None else str(nxt),
        "flags": spec.flags(),
    }
    return {"n": str(a.n), "base": a.base, "missing": sorted(spec.missing)}, out, 0


def cmd_search(a):
    bases = _ints(a.bases)
    if len(set(bases)) != len(bases):
        raise UsageError("bases must be listed once each")
    specs = [MissingDigitSpec(b, m) for b, m in zip(bases, _missing_sets(a.missing, len(bases)))]
    if a.first is None and a.bound is None:
        raise UsageError("give --first, --bound, or both")
    q = SearchQuery(tuple(specs), a.bound, a.first)
    prune = {"auto": None, "on": True, "off": False}[a.prune]
    inputs = {"bases": bases, "missing": [sorted(s.missing) for s in specs], "first": a.first,
              "bound": a.bound, "count": a.count, "prune": a.prune}
    if a.count:
        if a.bound is None:
            raise UsageError("--count needs --bound")
        return inputs, {"count": count_common(q, workers=a.workers)}, 0
    found = list(search_common(q, prune))
    rows = [{"n": str(n), "digits": {str(b): _digits_str(n, b) for b in bases}} for n in found]
    return inputs, {"results": rows, "count": len(rows)}, 0


def cmd_thickness(a):
    spec = MissingDigitSpec(a.base, parse_digit_set(a.missing), Q(a.r) if a.r else None)
    inputs = {"base": a.base, "missing": sorted(spec.missing), "depth": a.depth, "r": fmt_q(spec.r)}
    if spec.structured:
        chk = check_formula(spec, a.depth)
        out = chk.to_json()
        out["thickness"] = fmt_thickness(chk.exact)
        if a.evidence and chk.evidence is None:
            out["evidence"] = gap_system(level_set(LevelSetSpec(spec, 0, a.depth))).to_json()
    else:
        u = level_set(LevelSetSpec(spec, 0, a.depth))
        t = thickness_exact(u)
        out = {"thickness": fmt_thickness(t), "flags": spec.flags(), "formula": None}
        if a.evidence:
            out["evidence"] = gap_system(u).to_json()
    return inputs, out, 0


def cmd_levelset(a):
    spec = MissingDigitSpec(a.base, parse_digit_set(a.missing))
    u = level_set(LevelSetSpec(spec, a.scale, a.depth))
    inputs = {"base": a.base, "missing": sorted(spec.missing), "depth": a.depth, "scale": a.scale}
    return inputs, {"intervals": u.to_json(), "count": len(u), "measure": fmt_q(u.measure)}, 0


def cmd_bound_m(a):
    th = solve_threshold_M(a.k, Q(a.r), a.bits)
    return {"k": a.k, "r": fmt_q(Q(a.r))}, th.to_json(), 0


def cmd_align(a):
    bases = _ints(a.bases)
    p = AlignmentProblem(tuple(bases), Q(a.eps), a.n_max)
    try:
        al = find_alignment(p)
    except NotFound as exc:
        return {"bases": bases, "eps": fmt_q(p.eps), "n_max": a.n_max}, {"found": False, "reason": str(exc)}, 0
    out = al.to_json()
    out["found"] = True
    return {"bases": sorted(bases), "eps": fmt_q(p.eps), "n_max": a.n_max}, out, 0


def cmd_certify(a):
    bases = _ints(a.bases)
    missing = _missing_sets(a.missing, len(bases))
    cert = certify_common_integer(bases, missing, n=a.n, witness=a.witness, n_max=a.n_max, bits=a.bits)
    inputs = {"bases": bases, "missing": [sorted(m) for m in missing], "n": a.n,
              "witness": a.witness, "n_max": a.n_max}
    return inputs, cert.to_json(), EXIT_OK if cert.passed else EXIT_CERT_FAIL


def _system(base: str, digits: Optional[str], centered: bool = False) -> GaussianDigitSystem:
    b = parse_gaussian(base)
    if digits:
        return GaussianDigitSystem(b, tuple(parse_gaussian_list(digits)))
    return centered_residue_system(b) if centered else residue_system(b)


def cmd_gauss_digits(a):
    b = parse_gaussian(a.base)
    inputs = {"base": str(b), "centered": a.centered, "validate": a.validate}
    if a.validate is not None:
        ds = parse_gaussian_list(a.validate)
        return inputs, {"valid": validate_digit_system(b, ds), "digits": [str(d) for d in ds]}, 0
    return inputs, _system(a.base, None, a.centered).to_json(), 0


def cmd_gauss_expand(a):
    sys_ = _system(a.base, a.digits, a.centered)
    z = parse_gaussian(a.z)
    e = gauss_expand(z, sys_, stop=a.stop)
    out = e.to_json()
    if e.terminated:
        out["reconstructed"] = str(e.value())
    return {"base": str(sys_.base), "digits": [str(d) for d in sys_.digits], "z": str(z), "stop": a.stop}, out, 0


def cmd_gauss_search(a):
    s1 = _system(a.base1, a.digits1, a.centered)
    s2 = _system(a.base2, a.digits2, a.centered)
    m1, m2 = parse_gaussian(a.missing1), parse_gaussian(a.missing2)
    found = gauss_search_common(s1, s2, m1, m2, a.max_digits)
    inputs = {"base1": str(s1.base), "base2": str(s2.base), "digits1": [str(d) for d in s1.digits],
              "digits2": [str(d) for d in s2.digits], "missing1": str(m1), "missing2": str(m2),
              "max_digits": a.max_digits}
    return inputs, {"results": [str(z) for z in found], "count": len(found)}, 0


def cmd_gauss_align(a):
    b1, b2 = parse_gaussian(a.base1), parse_gaussian(a.base2)
    inputs = {"base1": str(b1), "base2": str(b2), "eps": fmt_q(Q(a.eps)), "bound": a.bound}
    try:
        res = gauss_alignment(b1, b2, Q(a.eps), a.bound)
    except NotFound as exc:
        return inputs, {"found": False, "reason": str(exc)}, 0
    out = res.to_json()
    out["found"] = True
    return inputs, out, 0


def cmd_render(a):
    sys_ = _system(a.base, a.digits, a.centered)
    keep = [d for d in sys_.digits if a.missing is None or d != parse_gaussian(a.missing)]
    try:
        w, h = (int(t) for t in a.size.lower().split("x"))
    except ValueError:
        raise UsageError(f"--size must look like 512x512, got {a.size!r}") from None
    if a.points is not None:
        items = sorted(enumerate_representable(sys_, keep, a.points), key=lambda z: (z.re, z.im))
        kind = "points"
    else:
        items = level_cells(sys_, keep, a.level)
        kind = "cells"
    path = render(items, a.out, (w, h), color_digits=a.color, digit_order=sys_.digits)
    inputs = {"base": str(sys_.base), "digits": [str(d) for d in keep], "level": a.level,
              "points": a.points, "out": str(path), "size": [w, h], "color": a.color}
    return inputs, {"kind": kind, "items": len(items), "bytes": path.stat().st_size}, 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="missdigits", description="Integers with missing digits in several bases.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report (default: plain text)")
    common.add_argument("--bits", type=int, default=None,
                        help=f"working precision for enclosures (default {DEFAULT_BITS}, env {PRECISION_ENV})")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("expand", cmd_expand, "base-b digits of a natural number")
    sp.add_argument("n", type=int)
    sp.add_argument("--base", type=int, required=True)

    sp = add("avoid", cmd_avoid, "test whether n avoids the missing digits")
    sp.add_argument("n", type=int)
    sp.add_argument("--base", type=int, required=True)
    sp.add_argument("--missing", default="0")

    sp = add("search", cmd_search, "integers avoiding digits in every base")
    sp.add_argument("--bases", required=True)
    sp.add_argument("--missing", help='missing digits per base, e.g. "0;0,3"')
    sp.add_argument("--first", type=int)
    sp.add_argument("--bound", type=int)
    sp.add_argument("--count", action="store_true")
    sp.add_argument("--prune", choices=("auto", "on", "off"), default="auto")
    sp.add_argument("--workers", type=int, default=1)

    sp = add("thickness", cmd_thickness, "exact thickness of a level set")
    sp.add_argument("--base", type=int, required=True)
    sp.add_argument("--missing", default="0")
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--r", help="run fraction (default: shortest run / base)")
    sp.add_argument("--evidence", action="store_true", help="include the full gap system")

    sp = add("levelset", cmd_levelset, "dump a level set as intervals")
    sp.add_argument("--base", type=int, required=True)
    sp.add_argument("--missing", default="0")
    sp.add_argument("--depth", type=int, default=1)
    sp.add_argument("--scale", type=int, default=0)

    sp = add("bound-M", cmd_bound_m, "smallest base for which the gauge is positive")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--r", default="1")

    sp = add("align", cmd_align, "smallest n with n log_{b_i} b_1 near integers")
    sp.add_argument("--bases", required=True)
    sp.add_argument("--eps", required=True)
    sp.add_argument("--n-max", "--max", dest="n_max", type=int, default=100_000)

    sp = add("certify", cmd_certify, "certificate of common missing-digit integers")
    sp.add_argument("--bases", required=True)
    sp.add_argument("--missing")
    sp.add_argument("--n", type=int)
    sp.add_argument("--n-max", "--max", dest="n_max", type=int, default=10_000)
    sp.add_argument("--witness", action="store_true")

    sp = add("gauss-digits", cmd_gauss_digits, "residue digit system of a Gaussian base")
    sp.add_argument("--base", required=True)
    sp.add_argument("--centered", action="store_true", help="least-norm digits instead of the parallelogram")
    sp.add_argument("--validate", help="check a user digit list instead")

    sp = add("gauss-expand", cmd_gauss_expand, "Euclidean digit walk of a Gaussian integer")
    sp.add_argument("z")
    sp.add_argument("--base", required=True)
    sp.add_argument("--digits")
    sp.add_argument("--centered", action="store_true")
    sp.add_argument("--stop", choices=("unit", "zero"), default="unit")

    sp = add("gauss-search", cmd_gauss_search, "Gaussian integers missing a digit in two bases")
    sp.add_argument("--base1", required=True)
    sp.add_argument("--base2", required=True)
    sp.add_argument("--digits1")
    sp.add_argument("--digits2")
    sp.add_argument("--centered", action="store_true")
    sp.add_argument("--missing1", default="0")
    sp.add_argument("--missing2", default="0")
    sp.add_argument("--max-digits", type=int, default=4)

    sp = add("gauss-align", cmd_gauss_align, "powers with b1**l1 / b2**l2 near 1")
    sp.add_argument("--base1", required=True)
    sp.add_argument("--base2", required=True)
    sp.add_argument("--eps", required=True)
    sp.add_argument("--bound", type=int, default=64)

    sp = add("render", cmd_render, "draw level cells or a point cloud")
    sp.add_argument("--base", required=True)
    sp.add_argument("--digits")
    sp.add_argument("--centered", action="store_true")
    sp.add_argument("--missing", help="digit to leave out")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--level", type=int, default=1)
    group.add_argument("--points", type=int, help="plot all values with at most this many digits")
    sp.add_argument("--out", required=True)
    sp.add_argument("--size", default="512x512")
    sp.add_argument("--color", action="store_true", help="color cells by their last digit")
    return p


def _plain(payload, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(payload, dict):
        for k in sorted(payload):
            v = payload[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_plain(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(payload, list):
        if all(not isinstance(x, (dict, list)) for x in payload):
            lines.append(pad + ", ".join(json.dumps(x) for x in payload))
        else:
            for x in payload:
                lines.append(f"{pad}-")
                lines.extend(_plain(x, indent + 1))
    else:
        lines.append(pad + json.dumps(payload))
    return lines


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.bits is None:
            args.bits = default_bits()
        start = time.perf_counter()
        inputs, outputs, code = args.func(args)
        elapsed = time.perf_counter() - start
    except (UsageError, ValueError, OSError) as exc:
        print(f"missdigits {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {
        "tool": "missdigits",
        "version": __version__,
        "command": argv,
        "inputs": inputs,
        "outputs": outputs,
        "precision": {"bits": args.bits},
        "timing": {"seconds": round(elapsed, 6)},
    }
    if args.json:
        print(dumps(report))
    else:
        print("\n".join(_plain({"inputs": inputs, "outputs": outputs})))
    return code


if __name__ == "__main__":
    sys.exit(main())
