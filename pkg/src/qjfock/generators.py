"""q-expansions of the generators of the quasi-Jacobi ring."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List

from flint import fmpq, fmpz

from .errors import UnknownGenerator
from .series import FormMeta, FourierSeries, PCoeff, invert

# canonical generator names, in exponent-vector order
GENERATORS = ("Theta", "A", "G2", "wp", "dwp", "G4", "G6", "Delta_inv", "Theta_inv")

ALIASES = {
    "theta": "Theta", "Θ": "Theta", "a": "A", "𝖠": "A", "g2": "G2", "g4": "G4", "g6": "G6",
    "p": "wp", "℘": "wp", "wp'": "dwp", "℘′": "dwp", "℘'": "dwp", "dp": "dwp",
    "delta_inv": "Delta_inv", "Δ⁻¹": "Delta_inv", "Dinv": "Delta_inv",
    "theta_inv": "Theta_inv", "Θ⁻¹": "Theta_inv",
}

GEN_WEIGHT = {"Theta": -1, "A": 1, "G2": 2, "wp": 2, "dwp": 3, "G4": 4, "G6": 6, "Delta_inv": -12, "Theta_inv": 1}
GEN_INDEX2 = {"Theta": 1, "Theta_inv": -1}

_KIND = {"Theta": "holomorphic-quasi", "G2": "holomorphic-quasi", "G4": "holomorphic-quasi",
         "G6": "holomorphic-quasi"}


def canonical_name(name: str) -> str:
    if name in GENERATORS:
        return name
    if name in ALIASES:
        return ALIASES[name]
    low = {g.lower(): g for g in GENERATORS}
    if name.lower() in low:
        return low[name.lower()]
    raise UnknownGenerator(f"unknown generator {name!r}")


def gen_meta(name: str) -> FormMeta:
    return FormMeta(GEN_WEIGHT[name], GEN_INDEX2.get(name, 0), 1, _KIND.get(name, "meromorphic-quasi"))


def bernoulli(n: int) -> Fraction:
    b = fmpq.bernoulli(n)
    return Fraction(int(b.p), int(b.q))


def sigma(k: int, n: int) -> int:
    return int(fmpz(n).divisor_sigma(k))


def divisors(n: int) -> List[int]:
    n = abs(n)
    small = [d for d in range(1, int(n ** 0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def euler_product(power: int, qmax: int) -> List[int]:
    """Coefficients of prod_{n>=1} (1 - q^n)^power through q^qmax."""
    coeffs = [0] * (qmax + 1)
    coeffs[0] = 1
    sign = 1 if power >= 0 else -1
    for n in range(1, qmax + 1):
        for _ in range(abs(power)):
            if sign > 0:
                for d in range(qmax, n - 1, -1):
                    coeffs[d] -= coeffs[d - n]
            else:
                for d in range(n, qmax + 1):
                    coeffs[d] += coeffs[d - n]
    return coeffs


def eisenstein_coeffs(k: int, qmax: int) -> List[Fraction]:
    """G_k = -B_k/(2k) + sum sigma_{k-1}(n) q^n."""
    return [-bernoulli(k) / (2 * k)] + [Fraction(sigma(k - 1, n)) for n in range(1, qmax + 1)]


def eisenstein(k: int, qmax: int) -> FourierSeries:
    return FourierSeries.from_q(eisenstein_coeffs(k, qmax), qmax, meta=FormMeta(k, 0, 1, "holomorphic-quasi"))


def _u2_rational(num: Dict[int, Fraction], den: Dict[int, Fraction]) -> PCoeff:
    """Rational function given by p-exponent dictionaries."""
    return PCoeff.from_terms({2 * k: v for k, v in num.items()}, {2 * k: v for k, v in den.items()})


def _p_laurent(terms: Dict[int, Fraction]) -> PCoeff:
    return PCoeff.from_terms({2 * k: v for k, v in terms.items()})


def _theta(qmax: int) -> FourierSeries:
    # numerator (u - 1/u) prod (1 - p q^m)(1 - q^m/p), as Laurent dicts in u
    rows: List[Dict[int, int]] = [dict() for _ in range(qmax + 1)]
    rows[0] = {1: 1, -1: -1}
    for m in range(1, qmax + 1):
        for shift in (2, -2):
            for d in range(qmax, m - 1, -1):
                src = rows[d - m]
                if not src:
                    continue
                tgt = rows[d]
                for k, v in src.items():
                    tgt[k + shift] = tgt.get(k + shift, 0) - v
            for d in range(qmax + 1):
                rows[d] = {k: v for k, v in rows[d].items() if v}
    inv2 = euler_product(-2, qmax)
    coeffs = {}
    for d in range(qmax + 1):
        acc: Dict[int, int] = {}
        for j in range(d + 1):
            c = inv2[d - j]
            if c == 0:
                continue
            for k, v in rows[j].items():
                acc[k] = acc.get(k, 0) + c * v
        coeffs[d] = PCoeff.from_terms(acc)
    return FourierSeries(0, qmax, coeffs, gen_meta("Theta"))


def _A(qmax: int) -> FourierSeries:
    half = Fraction(1, 2)
    coeffs = {0: _u2_rational({0: -half, 1: -half}, {0: 1, 1: -1})}
    for d in range(1, qmax + 1):
        terms: Dict[int, Fraction] = {}
        for m in divisors(d):
            terms[-m] = terms.get(-m, 0) + 1
            terms[m] = terms.get(m, 0) - 1
        coeffs[d] = _p_laurent(terms)
    return FourierSeries(0, qmax, coeffs, gen_meta("A"))


def _wp_q0() -> PCoeff:
    return PCoeff.const(Fraction(1, 12)) + _u2_rational({1: 1}, {0: 1, 1: -2, 2: 1})


def _wp(qmax: int) -> FourierSeries:
    coeffs = {0: _wp_q0()}
    for d in range(1, qmax + 1):
        terms: Dict[int, Fraction] = {}
        for k in divisors(d):
            terms[k] = terms.get(k, 0) + k
            terms[-k] = terms.get(-k, 0) + k
            terms[0] = terms.get(0, 0) - 2 * k
        coeffs[d] = _p_laurent(terms)
    return FourierSeries(0, qmax, coeffs, gen_meta("wp"))


def _dwp(qmax: int) -> FourierSeries:
    coeffs = {0: _wp_q0().dx()}
    for d in range(1, qmax + 1):
        terms: Dict[int, Fraction] = {}
        for k in divisors(d):
            terms[k] = terms.get(k, 0) + k * k
            terms[-k] = terms.get(-k, 0) - k * k
        coeffs[d] = _p_laurent(terms)
    return FourierSeries(0, qmax, coeffs, gen_meta("dwp"))


def discriminant(qmax: int) -> FourierSeries:
    """Delta = q prod (1 - q^n)^24."""
    e = euler_product(24, max(qmax - 1, 0))
    vals = {d + 1: PCoeff.const(c) for d, c in enumerate(e) if d + 1 <= qmax and c}
    return FourierSeries(0, qmax, vals, FormMeta(12, 0, 1, "holomorphic-quasi"))


def _delta_inv(qmax: int) -> FourierSeries:
    out = invert(discriminant(qmax + 2))
    return out.with_meta(gen_meta("Delta_inv"))


def _theta_inv(qmax: int) -> FourierSeries:
    return invert(_theta(qmax)).with_meta(gen_meta("Theta_inv"))


_BUILDERS = {
    "Theta": _theta, "A": _A, "wp": _wp, "dwp": _dwp,
    "G2": lambda q: eisenstein(2, q).with_meta(gen_meta("G2")),
    "G4": lambda q: eisenstein(4, q).with_meta(gen_meta("G4")),
    "G6": lambda q: eisenstein(6, q).with_meta(gen_meta("G6")),
    "Delta_inv": _delta_inv, "Theta_inv": _theta_inv,
}

_CACHE: Dict[str, FourierSeries] = {}


def expand_generator(name: str, qmax: int) -> FourierSeries:
    """Exact expansion of a generator through q^qmax (cached, truncated on reuse)."""
    name = canonical_name(name)
    if qmax < 0:
        raise ValueError("qmax must be >= 0")
    cached = _CACHE.get(name)
    if cached is None or cached.qmax < qmax:
        cached = _BUILDERS[name](max(qmax, 8))
        _CACHE[name] = cached
    return cached.truncate(qmax)
