"""Exact truncated Fourier series in q with rational-function coefficients in u = p^(1/2).

A :class:`PCoeff` is an exact rational function of ``u``; a :class:`FourierSeries`
maps q-exponents to ``PCoeff`` values inside a known range ``[-pole_order, qmax]``.
Laurent truncation in ``p`` only happens in :func:`to_laurent`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple

from flint import fmpq, fmpq_poly

from .errors import NotExpandable, WindowTooSmall, ZeroLeadingCoefficient

Rat = Fraction


def to_fmpq(x) -> fmpq:
    x = Fraction(x)
    return fmpq(x.numerator, x.denominator)


def to_frac(x: fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def rat_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(str(s))


_ONE = fmpq_poly([1])
_ZERO = fmpq_poly([])


def _valuation(poly: fmpq_poly) -> int:
    for i, c in enumerate(poly.coeffs()):
        if c != 0:
            return i
    return 0


class PCoeff:
    """The rational function ``u**shift * num(u) / den(u)``.

    Canonical form: ``num`` and ``den`` coprime, neither divisible by ``u``,
    ``den`` monic.  Zero is ``(0, 0, 1)``.
    """

    __slots__ = ("shift", "num", "den", "_hash")

    def __init__(self, shift: int, num: fmpq_poly, den: fmpq_poly = _ONE, *, canonical=False):
        if not canonical:
            shift, num, den = _canon(shift, num, den)
        self.shift = shift
        self.num = num
        self.den = den
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls) -> "PCoeff":
        return cls(0, _ZERO, _ONE, canonical=True)

    @classmethod
    def const(cls, c) -> "PCoeff":
        c = Fraction(c)
        if c == 0:
            return cls.zero()
        return cls(0, fmpq_poly([to_fmpq(c)]), _ONE, canonical=True)

    @classmethod
    def from_terms(cls, terms: Dict[int, object], den_terms: Optional[Dict[int, object]] = None) -> "PCoeff":
        """Build from ``{u_exp: coeff}`` numerator (and optional denominator) terms."""
        num_shift, num = _laurent_to_poly(terms)
        if den_terms is None:
            return cls(num_shift, num)
        den_shift, den = _laurent_to_poly(den_terms)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        return cls(num_shift - den_shift, num, den)

    @classmethod
    def monomial(cls, u_exp: int, c=1) -> "PCoeff":
        return cls.from_terms({u_exp: c})

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_laurent(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.is_zero() or (self.shift == 0 and self.den.is_one() and self.num.degree() == 0)

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("coefficient depends on p")
        return to_frac(self.num.coeffs()[0])

    def parity(self) -> str:
        """Parity of all u-exponents ("even"/"odd"), or "mixed"."""
        if self.is_zero():
            return "even"
        pars = set()
        for poly, s in ((self.num, self.shift), (self.den, 0)):
            for i, c in enumerate(poly.coeffs()):
                if c != 0:
                    pars.add((i + s) % 2)
        if len(pars) > 1:
            return "mixed"
        return "odd" if 1 in pars else "even"

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: "PCoeff") -> "PCoeff":
        if not isinstance(other, PCoeff):
            other = PCoeff.const(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        s = min(self.shift, other.shift)
        a = self.num.left_shift(self.shift - s) if self.shift > s else self.num
        b = other.num.left_shift(other.shift - s) if other.shift > s else other.num
        if self.den.is_one() and other.den.is_one():
            return PCoeff(s, a + b, _ONE)
        if self.den == other.den:
            return PCoeff(s, a + b, self.den)
        return PCoeff(s, a * other.den + b * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "PCoeff":
        return PCoeff(self.shift, -self.num, self.den, canonical=True)

    def __sub__(self, other: "PCoeff") -> "PCoeff":
        if not isinstance(other, PCoeff):
            other = PCoeff.const(other)
        return self + (-other)

    def __mul__(self, other) -> "PCoeff":
        if not isinstance(other, PCoeff):
            c = Fraction(other)
            if c == 0:
                return PCoeff.zero()
            return PCoeff(self.shift, self.num * to_fmpq(c), self.den, canonical=True)
        if self.is_zero() or other.is_zero():
            return PCoeff.zero()
        if self.den.is_one() and other.den.is_one():
            return PCoeff(self.shift + other.shift, self.num * other.num, _ONE, canonical=True)
        return PCoeff(self.shift + other.shift, self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "PCoeff":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero coefficient")
        return PCoeff(-self.shift, self.den, self.num)

    def __truediv__(self, other) -> "PCoeff":
        if not isinstance(other, PCoeff):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __pow__(self, e: int) -> "PCoeff":
        if e < 0:
            return self.inverse() ** (-e)
        out = PCoeff.const(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, PCoeff):
            try:
                other = PCoeff.const(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.shift == other.shift and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shift, tuple(self.num.coeffs()), tuple(self.den.coeffs())))
        return self._hash

    # transformations ----------------------------------------------------
    def dx(self) -> "PCoeff":
        """Apply p d/dp = (u/2) d/du."""
        if self.is_zero():
            return self
        n, d, s = self.num, self.den, self.shift
        if d.is_one():
            top = n * s + n.derivative().left_shift(1)
            return PCoeff(s, top * fmpq(1, 2), _ONE)
        top = n * d * s + (n.derivative() * d - n * d.derivative()).left_shift(1)
        return PCoeff(s, top * fmpq(1, 2), d * d)

    def substitute_u_power(self, r: int) -> "PCoeff":
        """u -> u**r for a positive integer r (p -> p**r)."""
        if r == 1 or self.is_zero():
            return self
        return PCoeff(self.shift * r, _spread(self.num, r), _spread(self.den, r))

    def invert_u(self) -> "PCoeff":
        """u -> 1/u (p -> 1/p)."""
        if self.is_zero():
            return self
        dn, dd = self.num.degree(), self.den.degree()
        num = fmpq_poly(list(reversed(self.num.coeffs())))
        den = fmpq_poly(list(reversed(self.den.coeffs())))
        return PCoeff(-self.shift - dn + dd, num, den)

    def evaluate(self, u) -> Fraction:
        u = to_fmpq(u)
        val = self.num(u) / self.den(u)
        return to_frac(val * u ** self.shift if self.shift >= 0 else val / u ** (-self.shift))

    def laurent_terms(self) -> Dict[int, Fraction]:
        """Exact ``{u_exp: coeff}`` when the coefficient is a Laurent polynomial."""
        if not self.den.is_one():
            raise ValueError("not a Laurent polynomial")
        return {i + self.shift: to_frac(c) for i, c in enumerate(self.num.coeffs()) if c != 0}

    def expand(self, kmin: int, kmax: int) -> Dict[int, Fraction]:
        """Ascending u-expansion, keeping exponents in ``[kmin, kmax]``."""
        if self.is_zero() or kmax < self.shift:
            return {}
        if self.den.is_one():
            return {k: c for k, c in self.laurent_terms().items() if kmin <= k <= kmax}
        length = kmax - self.shift + 1
        dco = [to_frac(c) for c in self.den.coeffs()]
        nco = [to_frac(c) for c in self.num.coeffs()]
        if dco[0] == 0:
            raise NotExpandable("denominator vanishes at u = 0")
        inv0 = 1 / dco[0]
        out = []
        for i in range(length):
            acc = nco[i] if i < len(nco) else Fraction(0)
            for j in range(1, min(i, len(dco) - 1) + 1):
                acc -= dco[j] * out[i - j]
            out.append(acc * inv0)
        return {i + self.shift: c for i, c in enumerate(out) if c != 0 and i + self.shift >= kmin}

    def to_json(self):
        num = [[i + self.shift, rat_str(to_frac(c))] for i, c in enumerate(self.num.coeffs()) if c != 0]
        den = [[i, rat_str(to_frac(c))] for i, c in enumerate(self.den.coeffs()) if c != 0]
        return num, den

    def __repr__(self):
        return f"PCoeff({self.to_string()})"

    def to_string(self) -> str:
        def fmt(poly, s):
            parts = []
            for i, c in enumerate(poly.coeffs()):
                if c != 0:
                    parts.append(f"{to_frac(c)}*u^{i + s}")
            return " + ".join(parts) or "0"

        if self.den.is_one():
            return fmt(self.num, self.shift)
        return f"({fmt(self.num, self.shift)})/({fmt(self.den, 0)})"


def _spread(poly: fmpq_poly, r: int) -> fmpq_poly:
    co = poly.coeffs()
    out = [fmpq(0)] * ((len(co) - 1) * r + 1) if co else []
    for i, c in enumerate(co):
        out[i * r] = c
    return fmpq_poly(out)


def _laurent_to_poly(terms: Dict[int, object]) -> Tuple[int, fmpq_poly]:
    terms = {int(k): Fraction(v) for k, v in terms.items() if Fraction(v) != 0}
    if not terms:
        return 0, _ZERO
    lo = min(terms)
    co = [fmpq(0)] * (max(terms) - lo + 1)
    for k, v in terms.items():
        co[k - lo] = to_fmpq(v)
    return lo, fmpq_poly(co)


def _canon(shift: int, num: fmpq_poly, den: fmpq_poly):
    if num.is_zero():
        return 0, _ZERO, _ONE
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if not den.is_one():
        if den.degree() > 0:
            g = num.gcd(den)
            if not g.is_one():
                num = num // g
                den = den // g
        vd = _valuation(den)
        if vd:
            den = den.right_shift(vd)
            shift -= vd
        lead = den.leading_coefficient()
        if lead != 1:
            num = num / lead
            den = den / lead
    vn = _valuation(num)
    if vn:
        num = num.right_shift(vn)
        shift += vn
    return shift, num, den


# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class FormMeta:
    weight: Optional[int] = None
    index2: Optional[int] = None
    level: int = 1
    kind: str = "unknown"

    def combine_mul(self, other: "FormMeta") -> "FormMeta":
        w = None if self.weight is None or other.weight is None else self.weight + other.weight
        i = None if self.index2 is None or other.index2 is None else self.index2 + other.index2
        kind = self.kind if self.kind == other.kind else "unknown"
        return FormMeta(w, i, max(self.level, other.level), kind)

    def combine_add(self, other: "FormMeta") -> Optional["FormMeta"]:
        if self == other:
            return self
        w = self.weight if self.weight == other.weight else None
        i = self.index2 if self.index2 == other.index2 else None
        kind = self.kind if self.kind == other.kind else "unknown"
        return FormMeta(w, i, max(self.level, other.level), kind)


def _meta_mul(a, b):
    if a is None or b is None:
        return None
    return a.combine_mul(b)


def _meta_add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a.combine_add(b)


@dataclass(frozen=True, eq=False)
class FourierSeries:
    """Truncated series ``sum_d coeffs[d] q^d`` with known range ``[-pole_order, qmax]``."""

    pole_order: int
    qmax: int
    coeffs: Dict[int, PCoeff] = field(default_factory=dict)
    meta: Optional[FormMeta] = None

    def __post_init__(self):
        clean = {d: c for d, c in self.coeffs.items() if -self.pole_order <= d <= self.qmax and not c.is_zero()}
        object.__setattr__(self, "coeffs", clean)

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls, qmax: int, pole_order: int = 0, meta=None) -> "FourierSeries":
        return cls(pole_order, qmax, {}, meta)

    @classmethod
    def constant(cls, c, qmax: int, meta=None) -> "FourierSeries":
        pc = c if isinstance(c, PCoeff) else PCoeff.const(c)
        return cls(0, qmax, {0: pc}, meta)

    @classmethod
    def from_q(cls, values: Iterable, qmax: Optional[int] = None, start: int = 0, meta=None) -> "FourierSeries":
        """Build a q-only series from consecutive rational coefficients starting at ``q**start``."""
        values = list(values)
        if qmax is None:
            qmax = start + len(values) - 1
        coeffs = {start + i: PCoeff.const(v) for i, v in enumerate(values) if Fraction(v) != 0}
        return cls(max(0, -start), qmax, coeffs, meta)

    # access -----------------------------------------------------------
    def __getitem__(self, d: int) -> PCoeff:
        if d < -self.pole_order or d > self.qmax:
            if d < -self.pole_order:
                return PCoeff.zero()
            raise IndexError(f"q^{d} beyond truncation q^{self.qmax}")
        return self.coeffs.get(d, PCoeff.zero())

    def q_coeff(self, d: int) -> Fraction:
        return self[d].constant_value()

    def valuation(self) -> Optional[int]:
        return min(self.coeffs) if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_q_only(self) -> bool:
        return all(c.is_constant() for c in self.coeffs.values())

    def with_meta(self, meta) -> "FourierSeries":
        return replace(self, meta=meta)

    def truncate(self, qmax: int) -> "FourierSeries":
        return FourierSeries(self.pole_order, min(qmax, self.qmax), self.coeffs, self.meta)

    def map_coeffs(self, fn, meta=None) -> "FourierSeries":
        return FourierSeries(self.pole_order, self.qmax, {d: fn(c) for d, c in self.coeffs.items()}, meta)

    # arithmetic -------------------------------------------------------
    def __add__(self, other) -> "FourierSeries":
        if not isinstance(other, FourierSeries):
            other = FourierSeries.constant(other, self.qmax)
        qmax = min(self.qmax, other.qmax)
        pole = max(self.pole_order, other.pole_order)
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out[d] + c if d in out else c
        return FourierSeries(pole, qmax, out, _meta_add(self.meta, other.meta))

    __radd__ = __add__

    def __neg__(self) -> "FourierSeries":
        return FourierSeries(self.pole_order, self.qmax, {d: -c for d, c in self.coeffs.items()}, self.meta)

    def __sub__(self, other) -> "FourierSeries":
        if not isinstance(other, FourierSeries):
            other = FourierSeries.constant(other, self.qmax)
        return self + (-other)

    def __rsub__(self, other) -> "FourierSeries":
        return (-self) + other

    def scale(self, c) -> "FourierSeries":
        if isinstance(c, PCoeff):
            return self.map_coeffs(lambda x: x * c, self.meta)
        c = Fraction(c)
        return self.map_coeffs(lambda x: x * c, self.meta)

    def __mul__(self, other) -> "FourierSeries":
        if not isinstance(other, FourierSeries):
            return self.scale(other)
        # a pole in one factor consumes precision of the other
        qmax = min(self.qmax - other.pole_order, other.qmax - self.pole_order)
        pole = self.pole_order + other.pole_order
        out: Dict[int, PCoeff] = {}
        for d1, c1 in self.coeffs.items():
            for d2, c2 in other.coeffs.items():
                d = d1 + d2
                if d > qmax:
                    continue
                prod = c1 * c2
                out[d] = out[d] + prod if d in out else prod
        return FourierSeries(pole, qmax, out, _meta_mul(self.meta, other.meta))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "FourierSeries":
        if e < 0:
            return invert(self) ** (-e)
        out = FourierSeries.constant(1, self.qmax, FormMeta(0, 0) if self.meta else None)
        for _ in range(e):
            out = out * self
        return out

    def equals(self, other: "FourierSeries", qmax: Optional[int] = None) -> bool:
        """Coefficient equality on the shared known range (optionally capped at ``qmax``)."""
        top = min(self.qmax, other.qmax)
        if qmax is not None:
            top = min(top, qmax)
        lo = -max(self.pole_order, other.pole_order)
        return all(self[d] == other[d] for d in range(lo, top + 1))

    def __eq__(self, other):
        if not isinstance(other, FourierSeries):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"q^{d}: {c.to_string()}" for d, c in sorted(self.coeffs.items())[:4])
        return f"FourierSeries(pole_order={self.pole_order}, qmax={self.qmax}, {{{body}{', ...' if len(self.coeffs) > 4 else ''}}})"


def arith(f: FourierSeries, g: FourierSeries, op: str) -> FourierSeries:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}")


def invert(f: FourierSeries) -> FourierSeries:
    """Multiplicative inverse by long division from the leading q-term."""
    v = f.valuation()
    if v is None:
        raise ZeroLeadingCoefficient("cannot invert the zero series")
    lead = f.coeffs[v]
    if lead.is_zero():
        raise ZeroLeadingCoefficient("leading coefficient is zero")
    # known range of f is up to qmax, so 1/f is known up to qmax - 2v
    qmax = f.qmax - 2 * v
    n_terms = qmax + v + 1
    inv_lead = lead.inverse()
    g = [f[v + i] for i in range(f.qmax - v + 1)]
    h = []
    for i in range(max(n_terms, 0)):
        acc = PCoeff.const(1) if i == 0 else PCoeff.zero()
        for j in range(1, min(i, len(g) - 1) + 1):
            if not g[j].is_zero() and not h[i - j].is_zero():
                acc = acc - g[j] * h[i - j]
        h.append(acc * inv_lead)
    meta = None
    if f.meta is not None:
        m = f.meta
        meta = FormMeta(None if m.weight is None else -m.weight,
                        None if m.index2 is None else -m.index2, m.level, "meromorphic-quasi")
    coeffs = {i - v: c for i, c in enumerate(h)}
    return FourierSeries(max(v, 0), qmax, coeffs, meta)


def _bump(meta, dw):
    if meta is None or meta.weight is None:
        return meta
    return replace(meta, weight=meta.weight + dw)


def dtau(f: FourierSeries) -> FourierSeries:
    """q d/dq."""
    return FourierSeries(f.pole_order, f.qmax, {d: c * d for d, c in f.coeffs.items()}, _bump(f.meta, 2))


def dx(f: FourierSeries) -> FourierSeries:
    """p d/dp."""
    return f.map_coeffs(PCoeff.dx, _bump(f.meta, 1))


def substitute_p_power(f: FourierSeries, r: int) -> FourierSeries:
    if r < 1:
        raise ValueError("r must be a positive integer")
    meta = f.meta
    if meta is not None and meta.index2 is not None:
        meta = replace(meta, index2=meta.index2 * r * r)
    return f.map_coeffs(lambda c: c.substitute_u_power(r), meta)


def invert_p(f: FourierSeries) -> FourierSeries:
    """The involution p -> 1/p."""
    return f.map_coeffs(PCoeff.invert_u, f.meta)


# ---------------------------------------------------------------------------
def _half(x) -> Fraction:
    x = Fraction(x)
    if (2 * x).denominator != 1:
        raise ValueError(f"{x} is not a half-integer")
    return x


@dataclass(frozen=True, eq=False)
class LaurentView:
    """Windowed Fourier coefficients c(d, r); absent entries inside the range are zero.

    ``coeffs`` is keyed by ``(d, k)`` with ``k = 2r`` the u-exponent.
    """

    qmin: int
    qmax: int
    window: Tuple[Fraction, Fraction]
    coeffs: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)
    meta: Optional[FormMeta] = None
    modulo_constants: bool = False

    def __post_init__(self):
        lo, hi = _half(self.window[0]), _half(self.window[1])
        object.__setattr__(self, "window", (lo, hi))
        clean = {}
        for (d, k), c in self.coeffs.items():
            c = Fraction(c)
            if c != 0 and self.qmin <= d <= self.qmax and 2 * lo <= k <= 2 * hi:
                clean[(d, k)] = c
        object.__setattr__(self, "coeffs", clean)

    @property
    def kmin(self) -> int:
        return int(2 * self.window[0])

    @property
    def kmax(self) -> int:
        return int(2 * self.window[1])

    def in_range(self, d, r) -> bool:
        k = 2 * Fraction(r)
        return k.denominator == 1 and self.qmin <= d <= self.qmax and self.kmin <= k <= self.kmax

    def c(self, d: int, r) -> Fraction:
        """Coefficient of q^d p^r; d below ``qmin`` is a known zero."""
        if d < self.qmin:
            return Fraction(0)
        if not self.in_range(d, r):
            raise IndexError(f"(d, r) = ({d}, {r}) outside the view")
        return self.coeffs.get((d, int(2 * Fraction(r))), Fraction(0))

    def items(self):
        """Yield ``(d, r, c)`` for nonzero entries, r as a Fraction."""
        for (d, k), c in sorted(self.coeffs.items()):
            yield d, Fraction(k, 2), c

    def map(self, fn, meta=None) -> "LaurentView":
        """Apply ``fn(d, r, c)`` to every stored coefficient."""
        out = {(d, int(2 * r)): fn(d, r, c) for d, r, c in self.items()}
        return LaurentView(self.qmin, self.qmax, self.window, out, meta if meta is not None else self.meta,
                           self.modulo_constants)

    def scale(self, s) -> "LaurentView":
        s = Fraction(s)
        return self.map(lambda d, r, c: c * s)

    def __add__(self, other: "LaurentView") -> "LaurentView":
        qmin, qmax = max(self.qmin, other.qmin), min(self.qmax, other.qmax)
        lo, hi = max(self.window[0], other.window[0]), min(self.window[1], other.window[1])
        # a smaller qmin on one side still contributes known zeros below its range
        qmin = min(self.qmin, other.qmin)
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, 0) + c
        return LaurentView(qmin, qmax, (lo, hi), out, _meta_add(self.meta, other.meta),
                           self.modulo_constants or other.modulo_constants)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def restrict(self, qmax=None, window=None, qmin=None) -> "LaurentView":
        return LaurentView(self.qmin if qmin is None else qmin,
                           self.qmax if qmax is None else min(qmax, self.qmax),
                           self.window if window is None else window,
                           self.coeffs, self.meta, self.modulo_constants)

    def equals(self, other: "LaurentView", ignore_constant: bool = False) -> bool:
        """Compare on the shared range."""
        qmin = max(self.qmin, other.qmin)
        qmax = min(self.qmax, other.qmax)
        kmin, kmax = max(self.kmin, other.kmin), min(self.kmax, other.kmax)
        skip_const = ignore_constant or self.modulo_constants or other.modulo_constants
        keys = set(self.coeffs) | set(other.coeffs)
        for d, k in keys:
            if not (qmin <= d <= qmax and kmin <= k <= kmax):
                continue
            if skip_const and d == 0 and k == 0:
                continue
            if self.coeffs.get((d, k), 0) != other.coeffs.get((d, k), 0):
                return False
        # coefficients below one view's qmin are known zeros there
        lo = min(self.qmin, other.qmin)
        for view, ref in ((self, other), (other, self)):
            for (d, k), c in view.coeffs.items():
                if lo <= d < ref.qmin and kmin <= k <= kmax and c != 0:
                    return False
        return True

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        return f"LaurentView(q in [{self.qmin}, {self.qmax}], r in [{self.window[0]}, {self.window[1]}], {len(self.coeffs)} terms)"


def _bump(meta: Optional[FormMeta], dw: int) -> Optional[FormMeta]:
    if meta is None or meta.weight is None:
        return meta
    return replace(meta, weight=meta.weight + dw)


def view_dtau(view: LaurentView) -> LaurentView:
    return view.map(lambda d, r, c: d * c, _bump(view.meta, 2))


def view_dx(view: LaurentView) -> LaurentView:
    return view.map(lambda d, r, c: r * c, _bump(view.meta, 1))


def to_laurent(f: FourierSeries, window) -> LaurentView:
    """Expand every coefficient in ascending powers of p and keep ``rmin <= r <= rmax``."""
    lo, hi = _half(window[0]), _half(window[1])
    kmin, kmax = int(2 * lo), int(2 * hi)
    out = {}
    for d, c in f.coeffs.items():
        for k, v in c.expand(kmin, kmax).items():
            out[(d, k)] = v
    return LaurentView(-f.pole_order, f.qmax, (lo, hi), out, f.meta)


def from_laurent(view: LaurentView) -> FourierSeries:
    """Re-sum a view whose coefficients are genuinely Laurent polynomials inside the window."""
    per_d: Dict[int, Dict[int, Fraction]] = {}
    for (d, k), c in view.coeffs.items():
        per_d.setdefault(d, {})[k] = c
    coeffs = {d: PCoeff.from_terms(t) for d, t in per_d.items()}
    return FourierSeries(max(0, -view.qmin), view.qmax, coeffs, view.meta)


@dataclass
class SymmetryReport:
    checked: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def check_elliptic_symmetry(f: LaurentView, m, lambdas=(-1, 0, 1)) -> SymmetryReport:
    """Scan c(d - lam*r + m*lam^2, r - 2*lam*m) == c(d, r) over the view.

    Only pairs whose image lies inside the view are compared.  Violations are
    reported as ``(d, r, lam)``.
    """
    m = Fraction(m)
    checked = 0
    violations = []
    nonzero_lams = [lam for lam in lambdas if lam != 0]
    checked_nonzero = 0
    for d in range(f.qmin, f.qmax + 1):
        for k in range(f.kmin, f.kmax + 1):
            r = Fraction(k, 2)
            c = f.coeffs.get((d, k), Fraction(0))
            for lam in lambdas:
                d2 = d - lam * r + m * lam * lam
                r2 = r - 2 * lam * m
                if d2.denominator != 1:
                    continue
                d2 = int(d2)
                if d2 < f.qmin:
                    other = Fraction(0)
                elif f.in_range(d2, r2):
                    other = f.c(d2, r2)
                else:
                    continue
                checked += 1
                if lam != 0:
                    checked_nonzero += 1
                if other != c:
                    violations.append((d, r, lam))
    if nonzero_lams and checked_nonzero == 0 and f.coeffs:
        raise WindowTooSmall("no transformed index stays inside the window")
    return SymmetryReport(checked, violations)


# ---------------------------------------------------------------------------
def meta_to_json(meta: Optional[FormMeta]):
    if meta is None:
        return None
    return {"weight": meta.weight, "index2": meta.index2, "level": meta.level, "kind": meta.kind}


def meta_from_json(obj) -> Optional[FormMeta]:
    if obj is None:
        return None
    return FormMeta(obj.get("weight"), obj.get("index2"), obj.get("level", 1), obj.get("kind", "unknown"))


def series_to_json(f: FourierSeries) -> dict:
    coeffs = []
    for d in sorted(f.coeffs):
        num, den = f.coeffs[d].to_json()
        coeffs.append({"d": d, "num": num, "den": den})
    return {"pole_order": f.pole_order, "qmax": f.qmax, "coeffs": coeffs, "meta": meta_to_json(f.meta)}


def series_from_json(obj: dict) -> FourierSeries:
    coeffs = {}
    for entry in obj["coeffs"]:
        num = {int(k): parse_rat(v) for k, v in entry["num"]}
        den = {int(k): parse_rat(v) for k, v in entry.get("den", [[0, "1/1"]])}
        coeffs[int(entry["d"])] = PCoeff.from_terms(num, den)
    return FourierSeries(int(obj["pole_order"]), int(obj["qmax"]), coeffs, meta_from_json(obj.get("meta")))


def view_to_json(v: LaurentView) -> dict:
    return {
        "qmin": v.qmin, "qmax": v.qmax,
        "window": [rat_str(v.window[0]), rat_str(v.window[1])],
        "coeffs": [{"d": d, "r": rat_str(r), "c": rat_str(c)} for d, r, c in v.items()],
        "meta": meta_to_json(v.meta),
        "modulo_constants": v.modulo_constants,
    }


def view_from_json(obj: dict) -> LaurentView:
    coeffs = {(int(e["d"]), int(2 * parse_rat(e["r"]))): parse_rat(e["c"]) for e in obj["coeffs"]}
    window = (parse_rat(obj["window"][0]), parse_rat(obj["window"][1]))
    return LaurentView(int(obj["qmin"]), int(obj["qmax"]), window, coeffs, meta_from_json(obj.get("meta")),
                       bool(obj.get("modulo_constants", False)))
