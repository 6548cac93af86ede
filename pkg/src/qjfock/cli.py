"""Command line front end.

    qjfock expand --gen Theta --qmax 5 --json
    qjfock hecke --poly "G4" --k 4 --ell 2 --qmax 10
    qjfock fock apply --op U --n 2 --partition '[{"part": 1, "class": "pt"}, {"part": 1, "class": "1"}]'
    qjfock assemble e8 --qmax 12 --twist 2
    qjfock verify all

Exit status: 0 on success, 1 on a domain error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import List, Optional

from .errors import DomainError
from .genpoly import GenPoly, expand
from .series import FourierSeries, LaurentView, parse_rat, rat_str, series_to_json, to_laurent, view_to_json


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# input parsing

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_\u0398][A-Za-z_0-9']*)|(.))")


def _tokens(text: str):
    out = []
    for num, name, op in _TOKEN.findall(text.strip()):
        if num:
            out.append(("num", Fraction(num)))
        elif name:
            out.append(("name", name))
        elif op.strip():
            out.append(("op", op))
    return out


class _PolyParser:
    """expr := term (('+'|'-') term)*, term := unary ('*' unary)*, unary := '-' unary | atom ['^' int]."""

    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if tok[0] is None or (op is not None and tok != ("op", op)):
            raise UsageError(f"cannot parse polynomial near token {self.i}: expected {op or 'a term'}")
        self.i += 1
        return tok

    def parse(self) -> GenPoly:
        out = self.expr()
        if self.peek()[0] is not None:
            raise UsageError(f"cannot parse polynomial: unexpected {self.peek()[1]!r}")
        return out

    def expr(self) -> GenPoly:
        out = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            sign = self.take()[1]
            t = self.term()
            out = out + t if sign == "+" else out - t
        return out

    def term(self) -> GenPoly:
        out = self.unary()
        while self.peek() == ("op", "*"):
            self.take()
            out = out * self.unary()
        return out

    def unary(self) -> GenPoly:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        kind, val = self.take()
        if kind == "num":
            base, name = GenPoly.const(val), None
        elif kind == "name":
            base, name = None, val
        elif val == "(":
            base, name = self.expr(), None
            self.take(")")
        else:
            raise UsageError(f"cannot parse polynomial: unexpected {val!r}")
        if self.peek() == ("op", "^"):
            self.take()
            neg = self.peek() == ("op", "-")
            if neg:
                self.take()
            kind, k = self.take()
            if kind != "num" or Fraction(k).denominator != 1:
                raise UsageError("exponents must be integers")
            k = -int(k) if neg else int(k)
            if name is not None:
                return _power(name, k)
            if k < 0:
                raise UsageError("negative powers are only allowed on Theta")
            return base ** k
        return _power(name, 1) if name is not None else base


def parse_poly(text: str) -> GenPoly:
    """GenPoly from JSON (inline or @file) or an expression like ``-Theta^2*Delta_inv + 1/2*(G2 + wp)``."""
    text = text.strip()
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read().strip()
    if text.startswith("["):
        return GenPoly.from_json(json.loads(text))
    return _PolyParser(text).parse()


def _power(name: str, k: int) -> GenPoly:
    if k < 0:
        if name in ("Theta", "theta", "Θ"):
            return GenPoly.gen("Theta_inv", -k)
        raise UsageError(f"negative power of {name}")
    return GenPoly.gen(name, k)


def parse_window(text: str):
    try:
        lo, hi = text.split(":")
        return Fraction(lo), Fraction(hi)
    except ValueError:
        raise UsageError(f"window must look like rmin:rmax, got {text!r}")


def _load_json(text: str):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return json.load(fh)
    return json.loads(text)


def _model(args):
    from .fock import K3Model
    if getattr(args, "gram", None):
        with open(args.gram) as fh:
            return K3Model.from_json(json.load(fh))
    return K3Model.default()


# ---------------------------------------------------------------------------
# output

def _emit(args, payload, text: str) -> None:
    if args.json:
        sys.stdout.write(json.dumps(payload) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _series_text(f: FourierSeries) -> str:
    return "\n".join(f"q^{d}: {f.coeffs[d].to_string()}" for d in sorted(f.coeffs)) or "0"


def _view_text(v: LaurentView) -> str:
    lines = [f"q^{d} p^{r}: {c}" for d, r, c in v.items()]
    return "\n".join(lines) or "0"


def _poly_payload(p: GenPoly):
    return {"genpoly": p.to_json(), "weight": p.weight, "index2": p.index2}


def _input_poly(args) -> GenPoly:
    if args.gen:
        return GenPoly.gen(args.gen, args.power)
    if args.poly:
        return parse_poly(args.poly)
    raise UsageError("give --gen or --poly")


# ---------------------------------------------------------------------------
# commands

def cmd_expand(args):
    f = expand(_input_poly(args), args.qmax)
    if args.window:
        v = to_laurent(f, args.window)
        _emit(args, view_to_json(v), _view_text(v))
    else:
        _emit(args, series_to_json(f), _series_text(f))


def cmd_anomaly(args):
    from .qjacobi import anomaly
    out = anomaly(_input_poly(args), args.which)
    _emit(args, _poly_payload(out), str(out))


def cmd_hecke(args):
    from .hecke import HeckeSpec, apply_decomposition, hecke_formal, mobius_decomposition
    if args.ell < 1:
        raise UsageError("--ell must be >= 1")
    f = _input_poly(args)
    window = args.window or (-4, 4)
    wide = (window[0] * args.ell, window[1] * args.ell)
    src = to_laurent(expand(f, args.qmax * args.ell + args.ell), wide)
    if args.decompose:
        kprime = f.weight if args.kprime is None else args.kprime
        if kprime is None:
            raise UsageError("input is not homogeneous; pass --kprime")
        terms = mobius_decomposition(args.k, kprime, args.ell)
        v = apply_decomposition(src, args.k, kprime, args.ell, args.qmax).restrict(window=window)
        payload = {"terms": [{"e": e, "c": rat_str(c), "d": d} for e, c, d in terms], "result": view_to_json(v)}
        text = "\n".join(f"{rat_str(c)} B_{e} T_{{{kprime},{d}}}" for e, c, d in terms) + "\n" + _view_text(v)
        _emit(args, payload, text)
        return
    v = hecke_formal(src, HeckeSpec(args.k, args.ell), qmax=args.qmax, window=window)
    _emit(args, view_to_json(v), _view_text(v))


def cmd_fock(args):
    from .fock import FockVector, class_of_partition, llv_operator, pairing
    model = _model(args)

    def vector(text):
        data = _load_json(text)
        if isinstance(data, list):
            return class_of_partition(data, model)
        return FockVector.from_json(data)

    if args.action == "apply":
        if not args.vector:
            raise UsageError("fock apply needs --vector or --partition")
        v = vector(args.vector)
        alpha = None
        if args.alpha:
            alpha = _load_json(args.alpha) if args.alpha.startswith(("{", "@")) else args.alpha
        op = llv_operator(args.op, args.n or v.n, alpha, model)
        out = op.apply(v)
        _emit(args, out.to_json(), repr(out))
    else:
        if not (args.v and args.w):
            raise UsageError("fock pair needs --v and --w")
        val = pairing(vector(args.v), vector(args.w), model)
        _emit(args, {"pairing": rat_str(val)}, rat_str(val))


def cmd_assemble(args):
    from . import assembly as asm
    what = args.what
    window = args.window or (-4, 4)
    if what == "fiber":
        invr = []
        for item in (args.invr or "").split(","):
            if item:
                r, v = item.split(":")
                invr.append((int(r), parse_rat(v)))
        v = asm.fiber_class_series(asm.FiberInput(args.a, args.b, parse_rat(args.inv0), invr), args.qmax, window)
        _emit(args, view_to_json(v), _view_text(v))
    elif what == "lift":
        if args.ell < 1:
            raise UsageError("--ell must be >= 1")
        f = _input_poly(args)
        k, e = args.k, args.e
        if args.insertions:
            ins = _load_json(args.insertions)
            k, e = asm.lift_exponents(args.g, args.n, ins, _model(args))
        if k is None or e is None:
            raise UsageError("give --k and --e, or --insertions with --n")
        wide = (window[0] * args.ell, window[1] * args.ell)
        src = to_laurent(expand(f, args.qmax * args.ell + args.ell), wide)
        v = asm.multiple_cover_lift(src, k, e, args.ell).restrict(qmax=args.qmax, window=window)
        _emit(args, view_to_json(v), _view_text(v))
    elif what == "twopoint":
        p = asm.lagrangian_two_point(args.n) if args.lagrangian else asm.two_point_correction(args.n)
        f = expand(p, args.qmax)
        _emit(args, {"genpoly": p.to_json(), "weight": p.weight, "index2": p.index2, "series": series_to_json(f)},
              f"{p}\n{_series_text(f)}")
    elif what == "dt":
        lf = asm.dt_correction(args.n, parse_rat(args.trace), args.qmax)
        f = lf.expand(args.qmax)
        meta = lf.meta
        _emit(args, {"genpoly": lf.poly.to_json(), "level": lf.level, "series": series_to_json(f),
                     "weight": None if meta is None else meta.weight,
                     "index2": None if meta is None else meta.index2},
              f"({lf.poly}) * E4(q^2)\n{_series_text(f)}")
    elif what == "e8":
        f = asm.e8_theta(args.qmax, args.twist)
        _emit(args, series_to_json(f), _series_text(f))
    elif what == "hae":
        if not args.table or not args.lambdas:
            raise UsageError("assemble hae needs --table and --lambdas")
        with open(args.table) as fh:
            table = asm.GWTable.from_json(json.load(fh))
        v = asm.hae_residual_g0n3(table, _load_json(args.lambdas), args.n, args.qmax, window, model=_model(args))
        _emit(args, view_to_json(v), _view_text(v))


def cmd_verify(args):
    from .checks import run_suite
    rows = run_suite(args.suite)
    width = max(len(label) for _, label, _ in rows)
    lines = [f"{suite:<9} {label:<{width}}  {'PASS' if ok else 'FAIL'}" for suite, label, ok in rows]
    payload = [{"suite": s, "check": label, "pass": ok} for s, label, ok in rows]
    _emit(args, payload, "\n".join(lines))
    return 0 if all(ok for _, _, ok in rows) else 1


# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--qmax", type=int, default=10)
    common.add_argument("--window", type=parse_window, default=None, help="rmin:rmax")

    poly = _Parser(add_help=False)
    poly.add_argument("--gen", help="a single generator")
    poly.add_argument("--power", type=int, default=1)
    poly.add_argument("--poly", help="polynomial expression, GenPoly JSON or @file")

    parser = _Parser(prog="qjfock", description="quasi-Jacobi forms and Nakajima calculus")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expand", parents=[common, poly], help="q-expansion of a polynomial in the generators")
    p.set_defaults(fn=cmd_expand)

    p = sub.add_parser("anomaly", parents=[common, poly], help="d/dG2 or d/dA")
    p.add_argument("--which", choices=["G2", "A"], default="G2")
    p.set_defaults(fn=cmd_anomaly)

    p = sub.add_parser("hecke", parents=[common, poly], help="formal Hecke operator T_{k,l}")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--decompose", action="store_true", help="go through the Moebius decomposition")
    p.add_argument("--kprime", type=int, default=None)
    p.set_defaults(fn=cmd_hecke)

    p = sub.add_parser("fock", parents=[common], help="operators and pairing on H*(S^[n])")
    p.add_argument("action", choices=["apply", "pair"])
    p.add_argument("--op", default="U")
    p.add_argument("--alpha", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--vector", "--partition", dest="vector", default=None,
                   help="FockVector JSON or a weighted partition list")
    p.add_argument("--v", default=None)
    p.add_argument("--w", default=None)
    p.add_argument("--gram", default=None, help="K3 lattice JSON")
    p.set_defaults(fn=cmd_fock)

    p = sub.add_parser("assemble", parents=[common, poly], help="generating series from tables and closed forms")
    p.add_argument("what", choices=["fiber", "lift", "twopoint", "dt", "e8", "hae"])
    p.add_argument("--a", type=int, default=0)
    p.add_argument("--b", type=int, default=0)
    p.add_argument("--inv0", default="0")
    p.add_argument("--invr", default="", help="r:value,r:value")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--g", type=int, default=0)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--e", type=int, default=None)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--insertions", default=None, help="JSON list of weighted partitions")
    p.add_argument("--lagrangian", action="store_true")
    p.add_argument("--trace", default="1")
    p.add_argument("--twist", type=int, default=1)
    p.add_argument("--table", default=None, help="GWTable JSON file")
    p.add_argument("--lambdas", default=None, help="JSON list of three weighted partitions")
    p.add_argument("--gram", default=None, help="K3 lattice JSON")
    p.set_defaults(fn=cmd_assemble)

    p = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    p.add_argument("suite", choices=["series", "qjacobi", "hecke", "fock", "assembly", "all"])
    p.set_defaults(fn=cmd_verify)
    return parser


def _join_values(argv: List[str]) -> List[str]:
    # "--window -5:5" or "--poly -Theta^2" would otherwise be read as options
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and argv[i + 1].startswith("-") and not argv[i + 1].startswith("--")):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run(argv: Optional[List[str]] = None) -> int:
    argv = _join_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code = args.fn(args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    except DomainError as exc:
        sys.stderr.write(f"{exc.name}: {exc}\n")
        if "--json" in argv:
            sys.stdout.write(json.dumps(exc.to_json()) + "\n")
        return 1
    return code or 0


def main() -> None:
    sys.exit(run())
