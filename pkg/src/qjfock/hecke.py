"""Formal Hecke operators, scaling/section operators and the Moebius decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List, Optional, Tuple

from flint import fmpz

from .errors import SourceRangeInsufficient
from .generators import divisors
from .qjacobi import AHForm
from .series import FormMeta, FourierSeries, LaurentView


@dataclass(frozen=True)
class HeckeSpec:
    k: int
    ell: int

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError("ell must be >= 1")


def _meta_scaled(meta: Optional[FormMeta], index_factor: int, level_factor: int, weight=None):
    if meta is None:
        return FormMeta(weight, None, level_factor) if weight is not None else None
    idx = None if meta.index2 is None else meta.index2 * index_factor
    return FormMeta(meta.weight if weight is None else weight, idx, meta.level * level_factor, meta.kind)


def _int_r(view: LaurentView):
    for (d, k) in view.coeffs:
        if k % 2:
            raise ValueError("Hecke operators need integral p-exponents")


def hecke_formal(f: LaurentView, spec: HeckeSpec, qmax: Optional[int] = None,
                 window=None) -> LaurentView:
    """T_{k,l} f (n, r) = sum_{a | (l, n, r)} a^(k-1) c(l n / a^2, r / a)."""
    _int_r(f)
    k, ell = spec.k, spec.ell
    qmin_out = ell * f.qmin if f.qmin < 0 else -((-f.qmin) // ell)
    qmax_out = f.qmax // ell if qmax is None else qmax
    lo, hi = (f.window if window is None else (Fraction(window[0]), Fraction(window[1])))
    rmin, rmax = math.ceil(lo), math.floor(hi)
    out = {}
    missing = []
    for n in range(qmin_out, qmax_out + 1):
        for r in range(rmin, rmax + 1):
            acc = Fraction(0)
            for a in divisors(math.gcd(ell, n, r)):
                d = ell * n // (a * a)
                if (ell * n) % (a * a):
                    continue
                if d < f.qmin:
                    continue
                if not f.in_range(d, Fraction(r, a)):
                    missing.append((d, str(Fraction(r, a))))
                    continue
                acc += Fraction(a) ** (k - 1) * f.c(d, Fraction(r, a))
            if acc:
                out[(n, 2 * r)] = acc
    if missing:
        raise SourceRangeInsufficient(f"{len(missing)} source coefficients outside the view, first {missing[0]}",
                                      missing=missing[:50])
    meta = _meta_scaled(f.meta, ell, ell, weight=k)
    return LaurentView(qmin_out, qmax_out, (Fraction(rmin), Fraction(rmax)), out, meta, f.modulo_constants)


# ---------------------------------------------------------------------------
def bscale(f, N: int):
    """B_N: move c(d, r) to (N d, N r).  Accepts FourierSeries, LaurentView or AHForm."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if isinstance(f, AHForm):
        # nu scales by 1/N under tau -> N tau, alpha is invariant
        entries = {key: bscale(s, N).scale(Fraction(1, N ** key[0])) for key, s in f.entries.items()}
        return AHForm(entries, f.weight, None if f.index2 is None else f.index2 * N)
    if N == 1:
        return f
    if isinstance(f, LaurentView):
        out = {(N * d, N * k): c for (d, k), c in f.coeffs.items()}
        return LaurentView(N * f.qmin, N * f.qmax + N - 1, (N * f.window[0], N * f.window[1]), out,
                           _meta_scaled(f.meta, N, N), f.modulo_constants)
    coeffs = {N * d: c.substitute_u_power(N) for d, c in f.coeffs.items()}
    return FourierSeries(N * f.pole_order, N * f.qmax + N - 1, coeffs, _meta_scaled(f.meta, N, N))


def ub(f, b: int):
    """U_b: the section n -> c(b n, r)."""
    if b < 1:
        raise ValueError("b must be >= 1")
    if b == 1:
        return f
    if isinstance(f, LaurentView):
        out = {(d // b, k): c for (d, k), c in f.coeffs.items() if d % b == 0}
        qmin = -((-f.qmin) // b)
        return LaurentView(qmin, f.qmax // b, f.window, out, f.meta, f.modulo_constants)
    coeffs = {d // b: c for d, c in f.coeffs.items() if d % b == 0}
    return FourierSeries(f.pole_order // b, f.qmax // b, coeffs, f.meta)


def mobius(n: int) -> int:
    return int(fmpz(n).moebius_mu())


def c_coeff(k: int, kprime: int, e: int) -> Fraction:
    """Dirichlet convolution c_{k,k'}(e) = sum_{ab=e} a^(k-1) mu(b) b^(k'-1)."""
    return sum((Fraction(a) ** (k - 1) * mobius(e // a) * Fraction(e // a) ** (kprime - 1)
                for a in divisors(e)), Fraction(0))


def mobius_decomposition(k: int, kprime: int, ell: int) -> List[Tuple[int, Fraction, int]]:
    """Terms (e, c, d) with T_{k,l} = sum c B_e T_{k',d}; zero terms dropped."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    out = []
    for e in divisors(ell):
        c = c_coeff(k, kprime, e)
        if c != 0:
            out.append((e, c, ell // e))
    return out


def apply_decomposition(f: LaurentView, k: int, kprime: int, ell: int, qmax: int) -> LaurentView:
    """Evaluate sum c B_e T_{k',d} f through q^qmax."""
    total = None
    for e, c, d in mobius_decomposition(k, kprime, ell):
        piece = bscale(hecke_formal(f, HeckeSpec(kprime, d)), e).restrict(qmax=qmax).scale(c)
        piece = LaurentView(piece.qmin, qmax, f.window, piece.coeffs, None)
        total = piece if total is None else total + piece
    return total


# ---------------------------------------------------------------------------
def _v_operator(f: FourierSeries, a: int, d: int) -> FourierSeries:
    """sum_{d | n} c(n, .)|_{p -> p^a} q^(a n / d) (the b-average without its factor d)."""
    coeffs = {a * n // d: c.substitute_u_power(a) for n, c in f.coeffs.items() if n % d == 0}
    qmax = (a * f.qmax) // d
    pole = (a * f.pole_order) // d
    return FourierSeries(pole, qmax, coeffs)


def hecke_ah(F: AHForm, spec: HeckeSpec) -> AHForm:
    """Hecke operator on an almost-holomorphic completion.

    For ``spec.k`` equal to the form weight, entry (r, s) is
    l^(k-1-r) sum_{ad=l} d^(-k+2r+s) sum_b f_{r,s}(a z, (a tau + b)/d).
    Other weights go through the Moebius decomposition.
    """
    k, ell = spec.k, spec.ell
    if not F.entries:
        return AHForm({}, k, None)
    if F.weight is not None and k != F.weight:
        total: dict = {}
        for e, c, d in mobius_decomposition(k, F.weight, ell):
            part = bscale(hecke_ah(F, HeckeSpec(F.weight, d)), e)
            for key, s in part.entries.items():
                s = s.scale(c)
                total[key] = total[key] + s if key in total else s
        idx = None if F.index2 is None else F.index2 * ell
        return AHForm(total, k, idx)
    qmax = min(s.qmax for s in F.entries.values()) // ell
    out = {}
    for (r, s), f in F.entries.items():
        acc = None
        for d in divisors(ell):
            a = ell // d
            w = Fraction(ell) ** (k - 1 - r) * Fraction(d) ** (-k + 2 * r + s) * d
            piece = _v_operator(f, a, d).scale(w)
            acc = piece if acc is None else acc + piece
        acc = FourierSeries(acc.pole_order, qmax, acc.coeffs, _meta_scaled(f.meta, ell, 1))
        if not acc.is_zero():
            out[(r, s)] = acc
    return AHForm(out, k, None if F.index2 is None else F.index2 * ell)
