"""Polynomials in the generators Theta^(+-1), A, G2, wp, wp', G4, G6, Delta^-1."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple

from .generators import GEN_WEIGHT, canonical_name, expand_generator
from .series import FormMeta, FourierSeries, parse_rat, rat_str

# slot 0 is the signed Theta exponent (negative means Theta_inv)
SLOTS = ("Theta", "A", "G2", "wp", "dwp", "G4", "G6", "Delta_inv")
SLOT = {name: i for i, name in enumerate(SLOTS)}
_W = (-1, 1, 2, 2, 3, 4, 6, -12)

Exps = Tuple[int, ...]
ZERO_EXPS: Exps = (0,) * len(SLOTS)


def mono_weight(e: Exps) -> int:
    # Theta_inv has weight +1, which the signed slot already produces
    return sum(w * x for w, x in zip(_W, e))


def mono_index2(e: Exps) -> int:
    return e[0]


class GenPoly:
    """Sparse polynomial ``{exponent tuple: Fraction}``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Exps, Fraction]] = None):
        clean = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            if c != 0:
                clean[tuple(e)] = c
        self.terms = clean

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "GenPoly":
        return cls({ZERO_EXPS: Fraction(c)})

    @classmethod
    def gen(cls, name: str, power: int = 1) -> "GenPoly":
        name = canonical_name(name)
        e = [0] * len(SLOTS)
        if name == "Theta_inv":
            e[0] = -power
        else:
            if name != "Theta" and power < 0:
                raise ValueError(f"negative power of {name}")
            e[SLOT[name]] = power
        return cls({tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, coeff=1, **exps) -> "GenPoly":
        e = [0] * len(SLOTS)
        for name, p in exps.items():
            name = canonical_name(name)
            if name == "Theta_inv":
                e[0] -= p
            else:
                e[SLOT[name]] += p
        return cls({tuple(e): Fraction(coeff)})

    # structure --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def gradings(self):
        return {(mono_weight(e), mono_index2(e)) for e in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.gradings()) <= 1

    @property
    def weight(self) -> Optional[int]:
        g = self.gradings()
        return next(iter(g))[0] if len(g) == 1 else None

    @property
    def index2(self) -> Optional[int]:
        g = self.gradings()
        return next(iter(g))[1] if len(g) == 1 else None

    def meta(self) -> Optional[FormMeta]:
        g = self.gradings()
        if len(g) != 1:
            return None
        w, i = next(iter(g))
        mero = any(e[0] < 0 or e[SLOT["Delta_inv"]] > 0 or e[SLOT["A"]] or e[SLOT["wp"]] or e[SLOT["dwp"]]
                   for e in self.terms)
        return FormMeta(w, i, 1, "meromorphic-quasi" if mero else "holomorphic-quasi")

    def degree_in(self, name: str) -> int:
        name = canonical_name(name)
        if name == "Theta_inv":
            return max((-e[0] for e in self.terms), default=0)
        return max((e[SLOT[name]] for e in self.terms), default=0)

    # arithmetic -------------------------------------------------------
    def __add__(self, other) -> "GenPoly":
        if not isinstance(other, GenPoly):
            other = GenPoly.const(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return GenPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "GenPoly":
        return GenPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "GenPoly":
        if not isinstance(other, GenPoly):
            other = GenPoly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "GenPoly":
        return (-self) + other

    def __mul__(self, other) -> "GenPoly":
        if not isinstance(other, GenPoly):
            c = Fraction(other)
            return GenPoly({e: v * c for e, v in self.terms.items()})
        out: Dict[Exps, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return GenPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "GenPoly":
        if n < 0:
            raise ValueError("negative power of a GenPoly")
        out = GenPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, GenPoly):
            try:
                other = GenPoly.const(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def partial(self, name: str) -> "GenPoly":
        """Formal partial derivative in one generator (Theta_inv not allowed)."""
        i = SLOT[canonical_name(name)]
        out: Dict[Exps, Fraction] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            out[tuple(ne)] = out.get(tuple(ne), 0) + c * e[i]
        return GenPoly(out)

    # presentation -----------------------------------------------------
    def to_json(self):
        out = []
        for e in sorted(self.terms):
            exps = {}
            for name, x in zip(SLOTS, e):
                if x == 0:
                    continue
                if name == "Theta" and x < 0:
                    exps["Theta_inv"] = -x
                else:
                    exps[name] = x
            out.append({"exps": exps, "coeff": rat_str(self.terms[e])})
        return out

    @classmethod
    def from_json(cls, data: Iterable[dict]) -> "GenPoly":
        out = GenPoly()
        for item in data:
            out = out + GenPoly.monomial(parse_rat(item["coeff"]), **item.get("exps", {}))
        return out

    def __repr__(self):
        return f"GenPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        names = ("Θ", "𝖠", "G2", "℘", "℘'", "G4", "G6", "Δ⁻¹")
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            factors = []
            for name, x in zip(names, e):
                if x == 0:
                    continue
                if name == "Θ" and x < 0:
                    factors.append("Θ⁻¹" if x == -1 else f"Θ⁻¹^{-x}")
                else:
                    factors.append(name if x == 1 else f"{name}^{x}")
            mono = "·".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}·{mono}")
        return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
_POW_CACHE: Dict[Tuple[str, int, int], FourierSeries] = {}


def _gen_power(name: str, k: int, qmax: int) -> FourierSeries:
    key = (name, k, qmax)
    hit = _POW_CACHE.get(key)
    if hit is not None:
        return hit
    base = expand_generator(name, qmax)
    if k == 1:
        out = base
    else:
        out = _gen_power(name, k // 2, qmax) * _gen_power(name, k - k // 2, qmax)
    _POW_CACHE[key] = out
    return out


def working_precision(f: GenPoly, qmax: int) -> int:
    return qmax + 2 * f.degree_in("Delta_inv") + 2


def expand_monomial(e: Exps, qmax: int) -> FourierSeries:
    work = qmax + 2 * e[SLOT["Delta_inv"]] + 2
    out = None
    for name, x in zip(SLOTS, e):
        if x == 0:
            continue
        if name == "Theta" and x < 0:
            s = _gen_power("Theta_inv", -x, work)
        else:
            s = _gen_power(name, x, work)
        out = s if out is None else out * s
    if out is None:
        out = FourierSeries.constant(1, qmax)
    return out.truncate(qmax)


def expand(f: GenPoly, qmax: int) -> FourierSeries:
    """Substitute generator expansions; exact through q^qmax."""
    meta = f.meta()
    pole = f.degree_in("Delta_inv")
    out = FourierSeries.zero(qmax, pole)
    for e, c in sorted(f.terms.items()):
        out = out + expand_monomial(e, qmax).scale(c)
    return FourierSeries(max(out.pole_order, pole), qmax, out.coeffs, meta)


def mono_gen_weight(name: str) -> int:
    return GEN_WEIGHT[canonical_name(name)]
