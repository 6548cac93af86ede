"""Generating series assembled from tables of reduced Gromov-Witten invariants.

Invariants are inputs only.  A table entry is addressed by genus, the number
of points n, a curve class, the insertions (weighted partitions, read as
their normalized classes) and a tautological tag.  Primitive classes are
``W + d F + r A`` with ``W = B + F`` and enter a series as ``q^d (-p)^r``;
fiber classes ``d F + r A`` are kept under their own kind.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from flint import fmpq_mat

from .errors import FitFailed, MissingTableEntry, NegativeExponent, UnsupportedClass
from .fock import (FockVector, K3Model, WeightedPartition, class_of_partition, cup_product, gradings, op_T_alpha,
                   op_U)
from .generators import divisors, eisenstein, expand_generator
from .genpoly import GenPoly, expand
from .hecke import HeckeSpec, hecke_formal
from .qjacobi import a_n, anomaly, fit_jacobi_ansatz
from .series import (FormMeta, FourierSeries, LaurentView, PCoeff, dx, from_laurent, parse_rat, rat_str,
                     substitute_p_power, to_laurent)

Insertions = Tuple[WeightedPartition, ...]


def _insertions(items) -> Insertions:
    return tuple(sorted(WeightedPartition(x) for x in items))


@dataclass(frozen=True)
class GWKey:
    g: int
    n: int
    kind: str  # "prim" (W + dF + rA) or "fiber" (dF + rA)
    d: int
    r: int
    insertions: Insertions
    taut: str = "1"

    def __post_init__(self):
        if self.kind not in ("prim", "fiber"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        object.__setattr__(self, "insertions", _insertions(self.insertions))

    @property
    def series_key(self):
        return (self.g, self.n, self.kind, self.insertions, self.taut)

    def to_json(self) -> dict:
        out = {"g": self.g, "n": self.n, "d": self.d, "r": self.r,
               "insertions": [mu.to_json() for mu in self.insertions], "taut": self.taut}
        if self.kind == "fiber":
            out["class"] = "fiber"
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "GWKey":
        kind = obj.get("class", "prim")
        d = obj.get("d")
        if kind == "F+rA":
            kind, d = "fiber", 1 if d is None else d
        return cls(int(obj["g"]), int(obj["n"]), kind, int(d), int(obj["r"]),
                   tuple(WeightedPartition.from_json(x) for x in obj.get("insertions", [])), obj.get("taut", "1"))


class GWTable:
    """Finite table of invariants.  Explicit zeros are kept: they mark a series as supplied."""

    def __init__(self, entries: Optional[Dict[GWKey, Fraction]] = None):
        self.entries: Dict[GWKey, Fraction] = {}
        self._series: Dict[tuple, Dict[Tuple[int, int], Fraction]] = {}
        for key, v in (entries or {}).items():
            self.set(key, v)

    def set(self, key: GWKey, value) -> None:
        value = Fraction(value)
        self.entries[key] = value
        self._series.setdefault(key.series_key, {})[(key.d, key.r)] = value

    def add(self, g: int, n: int, d: int, r: int, insertions, value, taut: str = "1", kind: str = "prim"):
        self.set(GWKey(g, n, kind, d, r, _insertions(insertions), taut), value)

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return isinstance(other, GWTable) and self.entries == other.entries

    def get(self, key: GWKey, default_zero: bool = False) -> Fraction:
        if key in self.entries:
            return self.entries[key]
        if default_zero:
            return Fraction(0)
        raise MissingTableEntry(f"no table entry for {key.to_json()}", key=key.to_json())

    def has_series(self, g, n, insertions, taut="1", kind="prim") -> bool:
        return (g, n, kind, _insertions(insertions), taut) in self._series

    def series(self, g: int, n: int, insertions, qmax: int, window=None, taut: str = "1", kind: str = "prim",
               default_zero: bool = False) -> LaurentView:
        """sum_{d, r} <...>_{class(d, r)} q^d (-p)^r for d <= qmax; no window keeps every entry."""
        ins = _insertions(insertions)
        data = self._series.get((g, n, kind, ins, taut))
        if data is None:
            if not default_zero:
                key = GWKey(g, n, kind, -1 if kind == "prim" else 0, 0, ins, taut)
                raise MissingTableEntry(f"no series for {key.to_json()}", key=key.to_json())
            data = {}
        out = {(d, 2 * r): v * (-1) ** (r % 2) for (d, r), v in data.items()}
        qmin = -1 if kind == "prim" else 0
        if window is None:
            rs = [r for (d, r) in data if d <= qmax] or [0]
            window = (min(rs), max(rs))
        return LaurentView(qmin, qmax, (Fraction(window[0]), Fraction(window[1])), out)

    def to_json(self) -> List[dict]:
        rows = []
        for key in sorted(self.entries, key=lambda k: json.dumps(k.to_json(), sort_keys=True)):
            row = key.to_json()
            row["value"] = rat_str(self.entries[key])
            rows.append(row)
        return rows

    @classmethod
    def from_json(cls, rows: Iterable[dict]) -> "GWTable":
        table = cls()
        for row in rows:
            table.set(GWKey.from_json(row), parse_rat(row["value"]))
        return table


# ---------------------------------------------------------------------------
# multiple cover formula

def lift_exponents(g: int, n: int, insertions: Sequence[WeightedPartition],
                   model: Optional[K3Model] = None) -> Tuple[int, int]:
    """(k, e) with k = n(2g - 2 + N) + sum wt and e = sum (deg - n - wt)."""
    k = n * (2 * g - 2 + len(insertions))
    e = 0
    for mu in insertions:
        deg, wt, _, _ = gradings(WeightedPartition(mu), model)
        k += wt
        e += deg - n - wt
    return k, e


def multiple_cover_lift(F1: LaurentView, k: int, e: int, ell: int) -> LaurentView:
    """l^e T_{k,l} F1."""
    if ell == 1:
        return F1
    return hecke_formal(F1, HeckeSpec(k, ell)).scale(Fraction(ell) ** e)


# ---------------------------------------------------------------------------
# fiber classes

@dataclass
class FiberInput:
    a: int
    b: int
    inv0: Fraction = Fraction(0)
    invr: List[Tuple[int, Fraction]] = field(default_factory=list)

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise NegativeExponent(f"exponents must be >= 0, got a={self.a}, b={self.b}")
        self.inv0 = Fraction(self.inv0)
        self.invr = [(int(r), Fraction(v)) for r, v in self.invr]
        if any(r < 1 for r, _ in self.invr):
            raise ValueError("r-terms need r >= 1")


def fiber_class_series(inp: FiberInput, qmax: int, window) -> LaurentView:
    """inv0 sum k^a d^b q^(kd) + sum_r (-1)^r inv_r ((-1/(b+1)) (p d/dp)^a A_(b+1))(p^r), modulo constants."""
    a, b = inp.a, inp.b
    total = FourierSeries.zero(qmax)
    if inp.inv0:
        vals = [Fraction(0)] + [sum(Fraction(k) ** a * Fraction(m // k) ** b for k in divisors(m))
                                for m in range(1, qmax + 1)]
        total = total + FourierSeries.from_q(vals, qmax).scale(inp.inv0)
    if inp.invr:
        base = a_n(b + 1, qmax).series
        for _ in range(a):
            base = dx(base)
        base = base.scale(Fraction(-1, b + 1))
        for r, v in inp.invr:
            total = total + substitute_p_power(base, r).scale(v * (-1) ** r)
    view = to_laurent(total, window)
    coeffs = {key: c for key, c in view.coeffs.items() if key != (0, 0)}
    meta = FormMeta(a + b + 1, 0, 1, "meromorphic-quasi")
    return LaurentView(0, qmax, view.window, coeffs, meta, modulo_constants=True)


# ---------------------------------------------------------------------------
# closed evaluations and correction terms

def lagrangian_two_point(n: int, qmax: Optional[int] = None) -> GenPoly:
    """(-1)^(n-1) Theta^(2n-2) / Delta."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return GenPoly.monomial((-1) ** (n - 1), Theta=2 * n - 2, Delta_inv=1)


def bold_g() -> GenPoly:
    """G = Theta^2 (wp + 2 G2) = -Theta^2 (p d/dp)^2 log Theta."""
    return GenPoly.gen("Theta", 2) * (GenPoly.gen("wp") + GenPoly.gen("G2") * 2)


def bold_g_series(qmax: int) -> FourierSeries:
    """-Theta^2 (p d/dp)^2 log Theta computed on expansions, as (Theta'^2 - Theta Theta'')."""
    th = expand_generator("Theta", qmax)
    d1 = dx(th)
    return (d1 * d1 - th * dx(d1)).truncate(qmax)


def two_point_correction(n: int, qmax: Optional[int] = None) -> GenPoly:
    """G^n Theta^-2 Delta^-1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return bold_g() ** n * GenPoly.monomial(1, Theta=-2, Delta_inv=1)


def _e8_gram(model_data: Optional[dict] = None) -> List[List[int]]:
    from importlib import resources
    data = model_data or json.loads(resources.files("qjfock").joinpath("data/k3_lattice.json").read_text())
    return [[int(x) for x in row] for row in data["e8_cartan"]]


def _ldl(gram: Sequence[Sequence[int]]):
    """Q(x) = sum_i d_i (x_i + sum_{j > i} m_ij x_j)^2, exact."""
    size = len(gram)
    A = [[Fraction(x) for x in row] for row in gram]
    d = [Fraction(0)] * size
    m = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        d[i] = A[i][i]
        if d[i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
        for j in range(i + 1, size):
            m[i][j] = A[i][j] / d[i]
        for j in range(i + 1, size):
            for k in range(i + 1, size):
                A[j][k] -= m[i][j] * A[i][k]
    return d, m


def lattice_vectors(gram: Sequence[Sequence[int]], bound: int) -> Dict[int, int]:
    """Count lattice vectors by norm (x, x) <= bound (Fincke-Pohst enumeration).

    The completed squares d_i (x_i + sum_j m_ij x_j)^2 are scaled to integers
    so the whole search runs in exact integer arithmetic.
    """
    size = len(gram)
    d, m = _ldl(gram)
    den = [math.lcm(*[m[i][j].denominator for j in range(i + 1, size)]) if i < size - 1 else 1
           for i in range(size)]
    mi = [[int(m[i][j] * den[i]) for j in range(size)] for i in range(size)]
    S = math.lcm(*[d[i].denominator * den[i] ** 2 for i in range(size)])
    w = [int(d[i].numerator * (S // (d[i].denominator * den[i] ** 2))) for i in range(size)]
    counts: Dict[int, int] = {}
    x = [0] * size

    def rec(i: int, left: int):
        if i < 0:
            norm = bound - left // S
            counts[norm] = counts.get(norm, 0) + 1
            return
        N = sum(mi[i][j] * x[j] for j in range(i + 1, size))
        D = den[i]
        # w_i (D x + N)^2 <= left
        t = math.isqrt(left // w[i])
        for xi in range((-N - t) // D - 1, (-N + t) // D + 2):
            y = D * xi + N
            val = w[i] * y * y
            if val <= left:
                x[i] = xi
                rec(i - 1, left - val)
        x[i] = 0

    rec(size - 1, bound * S)
    return counts


def e8_theta(qmax: int, twist: int = 1) -> FourierSeries:
    """sum_{alpha in E8} q^(twist (alpha, alpha) / 2) through q^qmax."""
    if twist < 1:
        raise ValueError("twist must be a positive integer")
    counts = lattice_vectors(_e8_gram(), (2 * qmax) // twist)
    vals = [Fraction(0)] * (qmax + 1)
    for norm, c in counts.items():
        e = twist * norm // 2
        if e <= qmax:
            vals[e] += c
    return FourierSeries.from_q(vals, qmax, meta=FormMeta(4, 0, twist, "holomorphic-quasi"))


def e4_at(qmax: int, twist: int = 1) -> FourierSeries:
    """E4(q^twist) = 1 + 240 sum sigma_3(m) q^(twist m)."""
    g4 = eisenstein(4, qmax // twist)
    vals = [Fraction(0)] * (qmax + 1)
    for m in range(qmax // twist + 1):
        vals[twist * m] = g4.q_coeff(m) * 240
    return FourierSeries.from_q(vals, qmax, meta=FormMeta(4, 0, twist, "holomorphic-quasi"))


@dataclass
class LevelForm:
    """GenPoly times a q-series of higher level."""

    poly: GenPoly
    factor: FourierSeries
    level: int
    factor_weight: int

    @property
    def meta(self) -> Optional[FormMeta]:
        if self.poly.is_zero():
            return None
        w, i = self.poly.weight, self.poly.index2
        return FormMeta(w + self.factor_weight, i, self.level, "meromorphic-quasi")

    def expand(self, qmax: int) -> FourierSeries:
        if self.poly.is_zero():
            return FourierSeries.zero(qmax)
        f = expand(self.poly, qmax + 1) * self.factor
        return f.truncate(qmax).with_meta(self.meta)


def dt_correction(n: int, trace, qmax: int) -> LevelForm:
    """(1/2) G^n Theta^-2 Delta^-1 E4(q^2) trace, with level 2."""
    if n < 0:
        raise ValueError("n must be >= 0")
    poly = two_point_correction(n) * (Fraction(trace) / 2)
    return LevelForm(poly, e4_at(qmax + 1, 2), 2, 4)


# ---------------------------------------------------------------------------
# the genus 0, 3-point anomaly equation

Term = Dict[Insertions, Fraction]


def _as_vector(x, model: K3Model) -> FockVector:
    if isinstance(x, FockVector):
        return x
    return class_of_partition(WeightedPartition(x), model)


def _accumulate(out: Term, vecs: Sequence[FockVector], c: Fraction) -> None:
    """Add c F(v_1, ..., v_N), expanded over monomials; F(monomial) = prod(parts) F(partition)."""
    partial = [((), Fraction(c))]
    for v in vecs:
        nxt = []
        for keys, acc in partial:
            for mu, cm in v.terms.items():
                nxt.append((keys + (mu,), acc * cm * mu.prod_parts()))
        partial = nxt
    for keys, acc in partial:
        key = tuple(sorted(keys))
        out[key] = out.get(key, 0) + acc


@lru_cache(maxsize=4)
def _complement(model: K3Model):
    """Labels spanning {W, F}^perp in H^2(S) and the inverse of their Gram matrix."""
    labels = [lab for lab in model.labels if model.degree(lab) == 1 and lab not in ("W", "F")]
    for lab in labels:
        if model.pair(lab, "W") or model.pair(lab, "F"):
            raise UnsupportedClass(f"{lab} is not orthogonal to W and F in this model")
    gram = fmpq_mat([[int(model.pair(a, b)) for b in labels] for a in labels])
    inv = gram.inv()
    ginv = {}
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            v = inv[i, j]
            if v != 0:
                ginv[(a, b)] = Fraction(int(v.p), int(v.q))
    return labels, ginv


def hae_terms(lambdas: Sequence, n: int, model: Optional[K3Model] = None) -> Tuple[Insertions, Term]:
    """The LHS insertions and the RHS of the g = 0, N = 3 anomaly equation as {insertions: coeff}.

    RHS = 2 sum_i (F(l_i, U(l_j l_k)) - F(U l_i, l_j l_k)) - sum (G^-1)_ab T_a T_b F(l_1, l_2, l_3).
    """
    model = model or K3Model.default()
    if len(lambdas) != 3:
        raise ValueError("need exactly three insertions")
    mus = [WeightedPartition(x) for x in lambdas]
    if any(mu.n != n for mu in mus):
        raise ValueError(f"insertions must be partitions of {n}")
    vs = [_as_vector(mu, model) for mu in mus]
    U = op_U(model)
    rhs: Term = {}
    for i in range(3):
        j, k = [x for x in range(3) if x != i]
        prod = cup_product(vs[j], vs[k], model)
        _accumulate(rhs, [vs[i], U.apply(prod)], Fraction(2))
        _accumulate(rhs, [U.apply(vs[i]), prod], Fraction(-2))
    labels, ginv = _complement(model)
    ops = {lab: op_T_alpha(lab, model) for lab in labels}
    once = {(lab, i): ops[lab].apply(vs[i]) for lab in labels for i in range(3)}
    for (a, b), g in ginv.items():
        for i in range(3):
            for j in range(3):
                vecs = list(vs)
                if i == j:
                    vecs[i] = ops[a].apply(once[(b, i)])
                else:
                    vecs[i], vecs[j] = once[(a, i)], once[(b, j)]
                if all(not v.is_zero() for v in vecs):
                    _accumulate(rhs, vecs, -g)
    rhs = {key: c for key, c in rhs.items() if c != 0}
    return tuple(sorted(mus)), rhs


def hae_weight(lambdas: Sequence, n: int, model: Optional[K3Model] = None) -> int:
    return lift_exponents(0, n, [WeightedPartition(x) for x in lambdas], model)[0]


def g2_derivative(series: LaurentView, n: int, weight: int, qmax: int, window) -> LaurentView:
    """d/dG2 of a series in (Theta^(2n-2)/Delta) QJac, via the ansatz fit."""
    f = from_laurent(series)
    fit = fit_jacobi_ansatz(f, n)
    if fit.qmax < 0:
        raise FitFailed("not enough q-orders to fit the ansatz")
    poly = fit.to_genpoly(weight)
    return to_laurent(expand(anomaly(poly, "G2"), qmax), window)


def lhs_precision(n: int, weight: int, qmax: int) -> int:
    """q-order to which the LHS series is read: enough for the ansatz fit
    (which loses about seven orders at the top) and for the quasimodular fit
    of its heaviest coefficient."""
    from .qjacobi import monomials
    top = weight + 2 * n - 2 + 12
    dim = len(monomials(("G2", "G4", "G6"), top)) if top >= 0 else 0
    return max(qmax, dim + 5) + 7


def hae_residual_g0n3(table: GWTable, lambdas: Sequence, n: int, qmax: int, window,
                      default_zero: bool = False, model: Optional[K3Model] = None) -> LaurentView:
    """LHS - RHS of the anomaly equation on table data, through q^qmax.

    The LHS series is read to ``lhs_precision`` so that the ansatz fit and the
    quasimodular fits of its coefficients are determined.
    """
    model = model or K3Model.default()
    lhs_key, rhs = hae_terms(lambdas, n, model)
    for key in [lhs_key] + sorted(rhs):
        if not default_zero and not table.has_series(0, n, key):
            table.series(0, n, key, qmax)  # raises MissingTableEntry
    weight = hae_weight(lambdas, n, model)
    lhs_series = table.series(0, n, lhs_key, lhs_precision(n, weight, qmax), default_zero=default_zero)
    out = g2_derivative(lhs_series, n, weight, qmax, window)
    out = LaurentView(-1, qmax, out.window, out.coeffs)
    for key, c in sorted(rhs.items()):
        out = out - table.series(0, n, key, qmax, window, default_zero=default_zero).scale(c)
    return out


def _integrate_g2(poly: GenPoly) -> GenPoly:
    """Antiderivative in G2 with no G2-free part."""
    from .genpoly import SLOT
    i = SLOT["G2"]
    out = {}
    for e, c in poly.terms.items():
        ne = list(e)
        ne[i] += 1
        out[tuple(ne)] = c / ne[i]
    return GenPoly(out)


def _random_ansatz_poly(rng, n: int, weight: int, g2_free: bool) -> GenPoly:
    """Random element of (Theta^(2n-2)/Delta) QJac in the ansatz span.

    Only monomials A^i wp^j wp'^s with pole order i + 2j + 3s <= 2n - 2 at
    z = 0 are used, so every q-coefficient is a Laurent polynomial in p.
    """
    from .qjacobi import ansatz_keys, monomials
    pre = GenPoly.monomial(1, Theta=2 * n - 2, Delta_inv=1)
    out = GenPoly()
    names = ("G4", "G6") if g2_free else ("G2", "G4", "G6")
    for i, j, s in ansatz_keys(n):
        if i + 2 * j + 3 * s > 2 * n - 2:
            continue
        w = weight + (2 * n - 2) + 12 - i - 2 * j - 3 * s
        if w < 0:
            continue
        for mono in monomials(names, w):
            if rng.random() < 0.5:
                out = out + mono * GenPoly.monomial(rng.randint(-3, 3), A=i, wp=j, dwp=s)
    return pre * out


def synthetic_hae_table(lambdas: Sequence, n: int, qmax: int, seed: int = 0,
                        model: Optional[K3Model] = None):
    """A table satisfying the anomaly equation by construction.

    The RHS series are random elements of the ansatz span of the right
    weight; the LHS series is a G2-free random part plus the G2-antiderivative
    of the assembled RHS.  Returns (table, {insertions: GenPoly}).
    """
    import random
    model = model or K3Model.default()
    rng = random.Random(seed)
    lhs_key, rhs = hae_terms(lambdas, n, model)
    weight = hae_weight(lambdas, n, model)
    polys: Dict[Insertions, GenPoly] = {}
    total = GenPoly()
    for key, c in sorted(rhs.items()):
        p = _random_ansatz_poly(rng, n, weight - 2, g2_free=False)
        polys[key] = p
        total = total + p * c
    polys[lhs_key] = _random_ansatz_poly(rng, n, weight, g2_free=True) + _integrate_g2(total)
    table = GWTable()
    for key, p in polys.items():
        table.add(0, n, -1, 0, key, 0)
        for d, c in expand(p, lhs_precision(n, weight, qmax)).coeffs.items():
            for k, v in c.laurent_terms().items():
                r = k // 2
                table.add(0, n, d, r, key, v * (-1) ** (r % 2))
    return table, polys
