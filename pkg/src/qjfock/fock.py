"""Nakajima operators on the cohomology of Hilbert schemes of points of a K3 surface.

A basis vector of H*(S^[n]) is stored as the plain Nakajima monomial
prod q_k(gamma) v_0, keyed by its multiset of (part, class label).  The
normalized class of a weighted partition carries the extra 1/prod(parts).
All cohomology of a K3 surface is even, so no super-signs are needed.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from flint import fmpq_mat

from .errors import DimensionMismatch, ShiftMismatch, UnknownOperator, UnsupportedClass

ClassLike = Union[str, Dict[str, object]]
Vec = Dict[str, Fraction]

_ALIASES = {"p": "pt", "point": "pt", "one": "1", "unit": "1"}


class K3Model:
    """Basis {1, W, F, b1..b20, pt} with the Poincare pairing and cup product.

    ``gram`` is the Gram matrix of H^2 in the order of ``h2_labels``; the
    first two labels must be the hyperbolic pair (W, F).
    """

    def __init__(self, h2_labels: Sequence[str], gram: Sequence[Sequence[int]]):
        if list(h2_labels[:2]) != ["W", "F"]:
            raise ValueError("the first two H^2 labels must be W, F")
        m = len(h2_labels)
        if len(gram) != m or any(len(row) != m for row in gram):
            raise DimensionMismatch("Gram matrix shape does not match the labels")
        for i in range(m):
            for j in range(m):
                if gram[i][j] != gram[j][i]:
                    raise ValueError("Gram matrix is not symmetric")
            if gram[i][i] % 2:
                raise ValueError("Gram matrix is not even")
        if gram[0][0] or gram[1][1] or gram[0][1] != 1:
            raise ValueError("(W, F) must span a hyperbolic plane")
        self.h2_labels = list(h2_labels)
        self.labels = ["1"] + self.h2_labels + ["pt"]
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.h2_gram = [[int(x) for x in row] for row in gram]
        inv = fmpq_mat(self.h2_gram).inv()
        self._h2_inv = {(a, b): Fraction(int(inv[i, j].p), int(inv[i, j].q))
                        for i, a in enumerate(self.h2_labels) for j, b in enumerate(self.h2_labels)
                        if inv[i, j] != 0}
        self._pair: Dict[Tuple[str, str], Fraction] = {("1", "pt"): Fraction(1), ("pt", "1"): Fraction(1)}
        for i, a in enumerate(self.h2_labels):
            for j, b in enumerate(self.h2_labels):
                if self.h2_gram[i][j]:
                    self._pair[(a, b)] = Fraction(self.h2_gram[i][j])
        self._dual: Dict[str, Vec] = {}
        for a in self.labels:
            if a == "1":
                self._dual[a] = {"pt": Fraction(1)}
            elif a == "pt":
                self._dual[a] = {"1": Fraction(1)}
            else:
                self._dual[a] = {b: c for (x, b), c in self._h2_inv.items() if x == a}
        self._triple_cache: Dict[Tuple[str, str, str], Fraction] = {}
        self._partners: Dict[str, List[str]] = {}

    @classmethod
    def default(cls) -> "K3Model":
        return _default_model()

    @classmethod
    def from_json(cls, data) -> "K3Model":
        return cls(data["labels"], data["gram"])

    # classes ----------------------------------------------------------
    def degree(self, label: str) -> int:
        return 0 if label == "1" else 2 if label == "pt" else 1

    def wt(self, label: str) -> int:
        return {"1": -1, "pt": 1, "W": 1, "F": -1}.get(label, 0)

    def vector(self, alpha: ClassLike) -> Vec:
        """A class given as a label or as a mapping label -> coefficient."""
        if isinstance(alpha, str):
            alpha = {alpha: 1}
        out: Vec = {}
        for lab, c in alpha.items():
            lab = _ALIASES.get(lab, lab)
            if lab not in self.index:
                raise UnsupportedClass(f"unknown class label {lab!r}")
            c = Fraction(c)
            if c:
                out[lab] = out.get(lab, 0) + c
        return {k: v for k, v in out.items() if v}

    def pair(self, a: str, b: str) -> Fraction:
        return self._pair.get((a, b), Fraction(0))

    def pair_vec(self, x: Vec, y: Vec) -> Fraction:
        return sum((cx * cy * self.pair(a, b) for a, cx in x.items() for b, cy in y.items()), Fraction(0))

    def partners(self, label: str) -> List[str]:
        """Labels pairing nonzero with ``label``."""
        hit = self._partners.get(label)
        if hit is None:
            hit = [b for b in self.labels if self.pair(label, b)]
            self._partners[label] = hit
        return hit

    def dual(self, label: str) -> Vec:
        return self._dual[label]

    def cup(self, a: str, b: str) -> Vec:
        if a == "1":
            return {b: Fraction(1)}
        if b == "1":
            return {a: Fraction(1)}
        if a == "pt" or b == "pt":
            return {}
        c = self.pair(a, b)
        return {"pt": c} if c else {}

    def cup_vec(self, x: Vec, y: Vec) -> Vec:
        out: Vec = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for lab, c in self.cup(a, b).items():
                    out[lab] = out.get(lab, 0) + ca * cb * c
        return {k: v for k, v in out.items() if v}

    def integral(self, x: Vec) -> Fraction:
        return x.get("pt", Fraction(0))

    def triple(self, a: str, b: str, c: str) -> Fraction:
        key = (a, b, c)
        hit = self._triple_cache.get(key)
        if hit is None:
            hit = self.integral(self.cup_vec(self.cup(a, b), {c: Fraction(1)}))
            self._triple_cache[key] = hit
        return hit

    # diagonal-type tensors ---------------------------------------------
    def diagonal(self) -> Dict[Tuple[str, str], Fraction]:
        """Sum_a gamma_a x gamma_a^dual."""
        out = {}
        for a in self.labels:
            for b, c in self.dual(a).items():
                out[(a, b)] = out.get((a, b), 0) + c
        return out

    def diagonal_push(self, alpha: Vec) -> Dict[Tuple[str, str], Fraction]:
        """Delta_* alpha = sum int(alpha a^dual b^dual) a x b."""
        out = {}
        for a in self.labels:
            for b in self.labels:
                v = self.integral(self.cup_vec(self.cup_vec(alpha, self.dual(a)), self.dual(b)))
                if v:
                    out[(a, b)] = v
        return out

    def small_diagonal(self) -> Dict[Tuple[str, str, str], Fraction]:
        """Delta_123 = sum int(a^dual b^dual c^dual) a x b x c."""
        out = {}
        for a in self.labels:
            da = self.dual(a)
            for b in self.labels:
                dab = self.cup_vec(da, self.dual(b))
                if not dab:
                    continue
                for c in self.labels:
                    v = self.integral(self.cup_vec(dab, self.dual(c)))
                    if v:
                        out[(a, b, c)] = v
        return out


@lru_cache(maxsize=1)
def _default_model() -> K3Model:
    text = resources.files("qjfock").joinpath("data/k3_lattice.json").read_text()
    return K3Model.from_json(json.loads(text))


# ---------------------------------------------------------------------------
class WeightedPartition(tuple):
    """Canonically sorted multiset of (part, class label)."""

    def __new__(cls, parts: Iterable = ()):
        items = []
        for p in parts:
            if isinstance(p, dict):
                k, lab = p["part"], p["class"]
            else:
                k, lab = p
            k = int(k)
            if k < 1:
                raise ValueError("parts must be positive")
            items.append((k, _ALIASES.get(str(lab), str(lab))))
        return super().__new__(cls, sorted(items, reverse=True))

    @property
    def n(self) -> int:
        return sum(k for k, _ in self)

    @property
    def length(self) -> int:
        return len(self)

    def prod_parts(self) -> int:
        return math.prod(k for k, _ in self)

    def aut(self) -> int:
        return math.prod(math.factorial(m) for m in Counter(self).values())

    def gradings(self, model: Optional[K3Model] = None):
        return gradings(self, model)

    def to_json(self):
        return [{"part": k, "class": lab} for k, lab in self]

    @classmethod
    def from_json(cls, data) -> "WeightedPartition":
        return cls(data)

    def __repr__(self):
        return "WP(" + ", ".join(f"{k}:{lab}" for k, lab in self) + ")"


def _add(out: Dict, key, c):
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


class FockVector:
    """Sparse rational combination of Nakajima monomials of a fixed n."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Dict[WeightedPartition, Fraction]] = None):
        self.n = n
        clean = {}
        for key, c in (terms or {}).items():
            c = Fraction(c)
            if not c:
                continue
            key = key if isinstance(key, WeightedPartition) else WeightedPartition(key)
            if key.n != n:
                raise DimensionMismatch(f"partition {key} does not have size {n}")
            clean[key] = clean.get(key, 0) + c
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def vacuum(cls) -> "FockVector":
        return cls(0, {WeightedPartition(): Fraction(1)})

    @classmethod
    def monomial(cls, parts, coeff=1) -> "FockVector":
        key = WeightedPartition(parts)
        return cls(key.n, {key: Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "FockVector"):
        if self.n != other.n and self.terms and other.terms:
            raise DimensionMismatch(f"n = {self.n} vs n = {other.n}")

    def __add__(self, other: "FockVector") -> "FockVector":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add(out, k, c)
        return FockVector(self.n if self.terms else other.n, out)

    def __neg__(self) -> "FockVector":
        return self.scale(-1)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + (-other)

    def scale(self, c) -> "FockVector":
        c = Fraction(c)
        return FockVector(self.n, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, FockVector):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def to_json(self):
        return {"n": self.n, "terms": [{"partition": k.to_json(), "coeff": _rat(c)}
                                       for k, c in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, data) -> "FockVector":
        terms = {WeightedPartition(t["partition"]): Fraction(t["coeff"]) for t in data["terms"]}
        return cls(int(data["n"]), terms)

    def __repr__(self):
        if not self.terms:
            return "FockVector(0)"
        return "FockVector(" + " + ".join(f"{c}*{k}" for k, c in sorted(self.terms.items())) + ")"


def _rat(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
def nakajima_apply(k: int, alpha: ClassLike, v: FockVector, model: Optional[K3Model] = None) -> FockVector:
    """q_k(alpha) v, with [q_k(a), q_l(b)] = k (a, b) delta_{k+l,0}."""
    model = model or K3Model.default()
    if k == 0:
        return FockVector(v.n)
    vec = model.vector(alpha)
    out: Dict[WeightedPartition, Fraction] = {}
    if k > 0:
        for key, c in v.terms.items():
            for lab, a in vec.items():
                _add(out, WeightedPartition(key + ((k, lab),)), c * a)
        return FockVector(v.n + k, out)
    m = -k
    if m > v.n:
        return FockVector(max(v.n - m, 0))
    for key, c in v.terms.items():
        for i, (part, lab) in enumerate(key):
            if part != m:
                continue
            s = model.pair_vec(vec, {lab: Fraction(1)})
            if s:
                _add(out, WeightedPartition(key[:i] + key[i + 1:]), c * k * s)
    return FockVector(v.n - m, out)


def _pair_keys(model: K3Model, mu: WeightedPartition, nu: WeightedPartition) -> Fraction:
    by_mu: Dict[int, List[str]] = {}
    by_nu: Dict[int, List[str]] = {}
    for k, lab in mu:
        by_mu.setdefault(k, []).append(lab)
    for k, lab in nu:
        by_nu.setdefault(k, []).append(lab)
    if {k: len(v) for k, v in by_mu.items()} != {k: len(v) for k, v in by_nu.items()}:
        return Fraction(0)
    total = Fraction(1)
    for k, a in by_mu.items():
        b = by_nu[k]
        perm = Fraction(0)
        for sigma in itertools.permutations(range(len(b))):
            term = Fraction(1)
            for i, j in enumerate(sigma):
                term *= model.pair(a[i], b[j])
                if not term:
                    break
            perm += term
        if not perm:
            return Fraction(0)
        total *= perm * Fraction((-1) ** k * (-k)) ** len(a)
    return total


def pairing(v: FockVector, w: FockVector, model: Optional[K3Model] = None) -> Fraction:
    """Poincare pairing; the adjoint of q_k(a) is (-1)^k q_{-k}(a)."""
    model = model or K3Model.default()
    if v.n != w.n and v.terms and w.terms:
        raise DimensionMismatch(f"cannot pair n = {v.n} with n = {w.n}")
    total = Fraction(0)
    for mu, a in v.terms.items():
        for nu, b in w.terms.items():
            if len(mu) == len(nu):
                total += a * b * _pair_keys(model, mu, nu)
    return total


# ---------------------------------------------------------------------------
def partitions(n: int) -> List[Tuple[int, ...]]:
    out = []

    def rec(rest, largest, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for k in range(min(rest, largest), 0, -1):
            rec(rest - k, k, acc + [k])

    rec(n, n, [])
    return out


def basis(n: int, model: Optional[K3Model] = None) -> List[WeightedPartition]:
    """All weighted partitions of n with labels from the model basis."""
    model = model or K3Model.default()
    out = []
    for lam in partitions(n):
        mult = Counter(lam)
        choices = [list(itertools.combinations_with_replacement(model.labels, m)) for m in mult.values()]
        sizes = list(mult.keys())
        for combo in itertools.product(*choices):
            parts = [(k, lab) for k, labs in zip(sizes, combo) for lab in labs]
            out.append(WeightedPartition(parts))
    return sorted(out)


def class_of_partition(mu, model: Optional[K3Model] = None) -> FockVector:
    """mu -> (1/prod mu_i) prod q_{mu_i}(class_i) v_0, multilinear in non-basis classes."""
    model = model or K3Model.default()
    parts = list(mu.items()) if isinstance(mu, dict) else list(mu)
    vec = FockVector.vacuum()
    for p in parts:
        k, cls = (p["part"], p["class"]) if isinstance(p, dict) else p
        vec = nakajima_apply(int(k), cls, vec, model)
    norm = math.prod(int(p["part"] if isinstance(p, dict) else p[0]) for p in parts)
    return vec.scale(Fraction(1, norm))


def gradings(mu: WeightedPartition, model: Optional[K3Model] = None) -> Tuple[int, int, int, int]:
    """(deg, wt, deg_WF, length) of a Nakajima monomial."""
    model = model or K3Model.default()
    n, ell = mu.n, len(mu)
    deg = n - ell + sum(model.degree(lab) for _, lab in mu)
    wt = sum(model.wt(lab) for _, lab in mu)
    deg_wf = sum(1 for _, lab in mu if lab == "W") - sum(1 for _, lab in mu if lab == "F")
    return deg, wt, deg_wf, ell


def delta_class(n: int, model: Optional[K3Model] = None) -> FockVector:
    """delta = -1/(2 (n-2)!) q_2(1) q_1(1)^(n-2) v_0."""
    if n < 2:
        return FockVector(n)
    return FockVector.monomial([(2, "1")] + [(1, "1")] * (n - 2), Fraction(-1, 2 * math.factorial(n - 2)))


def unit_class(n: int) -> FockVector:
    return FockVector.monomial([(1, "1")] * n, Fraction(1, math.factorial(n)))


def divisor_class(alpha: ClassLike, n: int, model: Optional[K3Model] = None) -> FockVector:
    """(1/(n-1)!) q_1(alpha) q_1(1)^(n-1) v_0."""
    model = model or K3Model.default()
    v = FockVector.vacuum()
    for _ in range(n - 1):
        v = nakajima_apply(1, "1", v, model)
    return nakajima_apply(1, alpha, v, model).scale(Fraction(1, math.factorial(n - 1)))


# ---------------------------------------------------------------------------
Rule = Callable[[WeightedPartition], Dict[WeightedPartition, Fraction]]


class LinearOperator:
    """Operator on Fock space given by its action on basis monomials.

    Columns are computed lazily and cached per monomial; ``matrix(n)``
    assembles the full block on H*(S^[n]).
    """

    def __init__(self, shift: int, rule: Rule, name: str = "", n: Optional[int] = None,
                 model: Optional[K3Model] = None):
        self.shift = shift
        self._rule = rule
        self.name = name
        self.n = n
        self.model = model or K3Model.default()
        self._cols: Dict[WeightedPartition, Dict[WeightedPartition, Fraction]] = {}
        self._mats: Dict[int, Dict] = {}

    def column(self, key: WeightedPartition) -> Dict[WeightedPartition, Fraction]:
        col = self._cols.get(key)
        if col is None:
            col = self._rule(key)
            self._cols[key] = col
        return col

    def apply(self, v: FockVector) -> FockVector:
        out: Dict[WeightedPartition, Fraction] = {}
        for key, c in v.terms.items():
            for k2, c2 in self.column(key).items():
                _add(out, k2, c * c2)
        return FockVector(max(v.n + self.shift, 0), out)

    __call__ = apply

    def matrix(self, n: Optional[int] = None):
        n = self.n if n is None else n
        if n is None:
            raise ValueError("no n given")
        mat = self._mats.get(n)
        if mat is None:
            mat = {key: self.column(key) for key in basis(n, self.model)}
            self._mats[n] = mat
        return mat

    def equals(self, other: "LinearOperator", n: Optional[int] = None) -> bool:
        if self.shift != other.shift:
            return False
        n = self.n if n is None else n
        for key in basis(n, self.model):
            if self.column(key) != other.column(key):
                return False
        return True

    def is_zero(self, n: Optional[int] = None) -> bool:
        n = self.n if n is None else n
        return all(not self.column(key) for key in basis(n, self.model))

    # algebra ----------------------------------------------------------
    def _combine(self, other: "LinearOperator", a, b, name) -> "LinearOperator":
        if self.shift != other.shift:
            raise ShiftMismatch(f"shift {self.shift} vs {other.shift}")

        def rule(key):
            out = {}
            for k2, c in self.column(key).items():
                _add(out, k2, a * c)
            for k2, c in other.column(key).items():
                _add(out, k2, b * c)
            return out

        return LinearOperator(self.shift, rule, name, self.n if self.n is not None else other.n, self.model)

    def __add__(self, other):
        return self._combine(other, 1, 1, f"({self.name} + {other.name})")

    def __sub__(self, other):
        return self._combine(other, 1, -1, f"({self.name} - {other.name})")

    def scale(self, s) -> "LinearOperator":
        s = Fraction(s)

        def rule(key):
            return {k2: c * s for k2, c in self.column(key).items()} if s else {}

        return LinearOperator(self.shift, rule, f"{s}*{self.name}", self.n, self.model)

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1)

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        def rule(key):
            out = {}
            for k1, c1 in other.column(key).items():
                for k2, c2 in self.column(k1).items():
                    _add(out, k2, c1 * c2)
            return out

        return LinearOperator(self.shift + other.shift, rule, f"{self.name}.{other.name}",
                              self.n if self.n is not None else other.n, self.model)

    def __repr__(self):
        return f"LinearOperator({self.name or '?'}, shift={self.shift})"


def commutator(A: LinearOperator, B: LinearOperator) -> LinearOperator:
    out = (A @ B) - (B @ A)
    out.name = f"[{A.name}, {B.name}]"
    return out


def identity_operator(model: Optional[K3Model] = None) -> LinearOperator:
    return LinearOperator(0, lambda key: {key: Fraction(1)}, "id", model=model)


def nakajima_operator(k: int, alpha: ClassLike, model: Optional[K3Model] = None) -> LinearOperator:
    model = model or K3Model.default()

    def rule(key):
        v = FockVector(key.n, {key: Fraction(1)})
        return nakajima_apply(k, alpha, v, model).terms

    return LinearOperator(k, rule, f"q_{k}({alpha})", model=model)


# quadratic and cubic normal-ordered expressions -----------------------------
def quadratic_operator(tensor: Dict[Tuple[str, str], Fraction], coeff: Callable[[int], Fraction],
                       model: K3Model, name: str = "") -> LinearOperator:
    """sum_{k>0} coeff(k) q_k q_{-k}(tensor): each part (k, g) becomes
    coeff(k) * (-k) * sum (b, g) a over the tensor terms a x b."""
    per_part: Dict[Tuple[int, str], Vec] = {}

    def part_map(k: int, lab: str) -> Vec:
        hit = per_part.get((k, lab))
        if hit is None:
            c0 = Fraction(coeff(k)) * (-k)
            hit = {}
            for (a, b), t in tensor.items():
                s = model.pair(b, lab)
                if s:
                    _add(hit, a, c0 * t * s)
            per_part[(k, lab)] = hit
        return hit

    def rule(key):
        out: Dict[WeightedPartition, Fraction] = {}
        for i, (k, lab) in enumerate(key):
            rest = key[:i] + key[i + 1:]
            for a, c in part_map(k, lab).items():
                _add(out, WeightedPartition(rest + ((k, a),)), c)
        return out

    return LinearOperator(0, rule, name, model=model)


def cubic_operator(tensor: Dict[Tuple[str, str, str], Fraction], coeff: Callable[[int, int, int], Fraction],
                   model: K3Model, name: str = "") -> LinearOperator:
    """sum_{i+j+k=0} coeff(i,j,k) :q_i q_j q_k(tensor): with q_0 = 0."""
    contract1: Dict[Tuple[int, str], Dict[Tuple[str, str], Fraction]] = {}
    contract2: Dict[Tuple[int, int, str, str], Vec] = {}

    def one(slot: int, lab: str):
        key = (slot, lab)
        hit = contract1.get(key)
        if hit is None:
            hit = {}
            for t, c in tensor.items():
                s = model.pair(t[slot], lab)
                if s:
                    rest = tuple(x for i, x in enumerate(t) if i != slot)
                    _add(hit, rest, c * s)
            contract1[key] = hit
        return hit

    def two(s1: int, s2: int, l1: str, l2: str):
        key = (s1, s2, l1, l2)
        hit = contract2.get(key)
        if hit is None:
            hit = {}
            for t, c in tensor.items():
                s = model.pair(t[s1], l1) * model.pair(t[s2], l2)
                if s:
                    (rest,) = tuple(x for i, x in enumerate(t) if i not in (s1, s2))
                    _add(hit, rest, c * s)
            contract2[key] = hit
        return hit

    def rule(key):
        out: Dict[WeightedPartition, Fraction] = {}
        n = key.n
        parts = list(key)
        for idx, (m, lab) in enumerate(parts):
            rest = tuple(parts[:idx] + parts[idx + 1:])
            for slot in range(3):
                others = [s for s in range(3) if s != slot]
                for i in range(1, m):
                    j = m - i
                    ind = [0, 0, 0]
                    ind[slot], ind[others[0]], ind[others[1]] = -m, i, j
                    c0 = Fraction(coeff(*ind))
                    if not c0:
                        continue
                    c0 *= -m
                    for (a, b), t in one(slot, lab).items():
                        _add(out, WeightedPartition(rest + ((i, a), (j, b))), c0 * t)
        for i1 in range(len(parts)):
            for i2 in range(len(parts)):
                if i1 == i2:
                    continue
                (m1, l1), (m2, l2) = parts[i1], parts[i2]
                rest = tuple(p for t, p in enumerate(parts) if t not in (i1, i2))
                m = m1 + m2
                if m > n:
                    continue
                for slot in range(3):
                    s1, s2 = [s for s in range(3) if s != slot]
                    ind = [0, 0, 0]
                    ind[slot], ind[s1], ind[s2] = m, -m1, -m2
                    c0 = Fraction(coeff(*ind))
                    if not c0:
                        continue
                    c0 *= m1 * m2
                    for a, t in two(s1, s2, l1, l2).items():
                        _add(out, WeightedPartition(rest + ((m, a),)), c0 * t)
        return out

    return LinearOperator(0, rule, name, model=model)


# ---------------------------------------------------------------------------
def _sym2(x: Vec, y: Vec) -> Dict[Tuple[str, str], Fraction]:
    """x_1 y_2 as a tensor: x in the first slot, y in the second."""
    out = {}
    for a, ca in x.items():
        for b, cb in y.items():
            _add(out, (a, b), ca * cb)
    return out


def _tensor_sum(*ts):
    out = {}
    for t in ts:
        for k, c in t.items():
            _add(out, k, c)
    return out


def _scale_t(t, s):
    return {k: c * s for k, c in t.items()}


_ONE = {"1": Fraction(1)}
_PT = {"pt": Fraction(1)}


def _h2_part(model: K3Model, alpha: ClassLike, what: str) -> Vec:
    vec = model.vector(alpha)
    if any(lab in ("1", "pt") for lab in vec):
        raise UnsupportedClass(f"{what} needs a class in H^2(S)")
    return vec


def op_e_alpha(alpha: ClassLike, model: Optional[K3Model] = None) -> LinearOperator:
    """e_alpha = -sum_{k>0} q_k q_{-k}(Delta_* alpha): cup product with alpha in H^2(S)."""
    model = model or K3Model.default()
    vec = _h2_part(model, alpha, "e_alpha")
    return quadratic_operator(model.diagonal_push(vec), lambda k: -1, model, f"e_{alpha}")


def op_f_alpha(alpha: ClassLike, model: Optional[K3Model] = None) -> LinearOperator:
    """f~_alpha = -sum_{k>0} (1/k^2) q_k q_{-k}(alpha_1 + alpha_2)."""
    model = model or K3Model.default()
    vec = _h2_part(model, alpha, "f_alpha")
    t = _tensor_sum(_sym2(vec, _ONE), _sym2(_ONE, vec))
    return quadratic_operator(t, lambda k: Fraction(-1, k * k), model, f"f_{alpha}")


def op_U(model: Optional[K3Model] = None) -> LinearOperator:
    op = op_f_alpha("F", model)
    op.name = "U"
    return op


def op_h(model: Optional[K3Model] = None) -> LinearOperator:
    """h = sum_{k>0} (1/k) q_k q_{-k}(p_2 - p_1)."""
    model = model or K3Model.default()
    t = _tensor_sum(_sym2(_ONE, _PT), _scale_t(_sym2(_PT, _ONE), -1))
    return quadratic_operator(t, lambda k: Fraction(1, k), model, "h")


def op_Wt(model: Optional[K3Model] = None) -> LinearOperator:
    """Wt = sum_{k>0} (1/k) q_k q_{-k}(p_2 - p_1 + W_2 F_1 - W_1 F_2)."""
    model = model or K3Model.default()
    W, F = {"W": Fraction(1)}, {"F": Fraction(1)}
    t = _tensor_sum(_sym2(_ONE, _PT), _scale_t(_sym2(_PT, _ONE), -1), _sym2(F, W), _scale_t(_sym2(W, F), -1))
    return quadratic_operator(t, lambda k: Fraction(1, k), model, "Wt")


def op_e_delta(model: Optional[K3Model] = None) -> LinearOperator:
    """e_delta = -1/6 sum_{i+j+k=0} :q_i q_j q_k(Delta_123):."""
    model = model or K3Model.default()
    return cubic_operator(model.small_diagonal(), lambda i, j, k: Fraction(-1, 6), model, "e_delta")


def op_T_delta(model: Optional[K3Model] = None) -> LinearOperator:
    """T_delta = 1/2 sum_{i+j+k=0} (1/i) :q_i q_j q_k((F_1 + F_2) Delta_23):."""
    model = model or K3Model.default()
    F = {"F": Fraction(1)}
    t: Dict[Tuple[str, str, str], Fraction] = {}
    for (a, b), c in model.diagonal().items():
        _add(t, ("F", a, b), c)
        for x, cx in model.cup_vec(F, {a: Fraction(1)}).items():
            _add(t, ("1", x, b), c * cx)
    return cubic_operator(t, lambda i, j, k: Fraction(1, 2 * i), model, "T_delta")


def op_T_alpha(alpha: ClassLike, model: Optional[K3Model] = None) -> LinearOperator:
    """T_alpha = [e_alpha, U] for alpha orthogonal to W and F."""
    model = model or K3Model.default()
    vec = _h2_part(model, alpha, "T_alpha")
    if model.pair_vec(vec, {"W": Fraction(1)}) or model.pair_vec(vec, {"F": Fraction(1)}):
        raise UnsupportedClass("T_alpha needs alpha orthogonal to W and F")
    out = commutator(op_e_alpha(alpha, model), op_U(model))
    out.name = f"T_{alpha}"
    return out


_OPS = ("e_alpha", "e_delta", "U", "T_delta", "T_alpha", "Wt", "h", "f_alpha", "f_delta")


def llv_operator(name: str, n: Optional[int] = None, alpha: Optional[ClassLike] = None,
                 model: Optional[K3Model] = None) -> LinearOperator:
    model = model or K3Model.default()
    if name not in _OPS:
        raise UnknownOperator(f"unknown operator {name!r}")
    if name == "f_delta":
        raise UnsupportedClass("f_delta involves classes that are not determined; not implemented")
    if name in ("e_alpha", "f_alpha", "T_alpha") and alpha is None:
        raise UnsupportedClass(f"{name} needs a class alpha")
    op = {"e_alpha": lambda: op_e_alpha(alpha, model), "f_alpha": lambda: op_f_alpha(alpha, model),
          "T_alpha": lambda: op_T_alpha(alpha, model), "e_delta": lambda: op_e_delta(model),
          "U": lambda: op_U(model), "T_delta": lambda: op_T_delta(model), "Wt": lambda: op_Wt(model),
          "h": lambda: op_h(model)}[name]()
    op.n = n
    return op


# ---------------------------------------------------------------------------
# LLV algebra: wedge^2(V + U_Q) with V = H^2(S) + Q delta and U_Q = <e, f>
class LLVElement:
    """Rational combination of wedges a ^ b of basis labels of V + U_Q."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Tuple[str, str], Fraction]] = None):
        out: Dict[Tuple[str, str], Fraction] = {}
        for (a, b), c in (terms or {}).items():
            c = Fraction(c)
            if a == b or not c:
                continue
            if _llv_order(a) > _llv_order(b):
                a, b, c = b, a, -c
            _add(out, (a, b), c)
        self.terms = out

    @classmethod
    def wedge(cls, x, y) -> "LLVElement":
        x = {x: Fraction(1)} if isinstance(x, str) else x
        y = {y: Fraction(1)} if isinstance(y, str) else y
        out: Dict[Tuple[str, str], Fraction] = {}
        for a, ca in x.items():
            for b, cb in y.items():
                if a == b:
                    continue
                if _llv_order(a) > _llv_order(b):
                    _add(out, (b, a), -Fraction(ca) * Fraction(cb))
                else:
                    _add(out, (a, b), Fraction(ca) * Fraction(cb))
        return cls(out)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add(out, k, c)
        return LLVElement(out)

    def scale(self, s):
        return LLVElement({k: c * Fraction(s) for k, c in self.terms.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, LLVElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "LLV(0)"
        return "LLV(" + " + ".join(f"{c}*{a}^{b}" for (a, b), c in sorted(self.terms.items())) + ")"


def _llv_order(label: str):
    head = {"e": 0, "W": 1, "F": 2, "delta": 3, "f": 10 ** 6}
    if label in head:
        return (head[label], 0)
    if label.startswith("b") and label[1:].isdigit():
        return (4, int(label[1:]))
    return (5, label)


def llv_form(a: str, b: str, n: int, model: Optional[K3Model] = None) -> Fraction:
    """The form on V + U_Q: BBF form on V, (e, f) = 1, U_Q orthogonal to V."""
    model = model or K3Model.default()
    if {a, b} == {"e", "f"}:
        return Fraction(1)
    if a in ("e", "f") or b in ("e", "f"):
        return Fraction(0)
    if a == "delta" or b == "delta":
        return Fraction(2 - 2 * n) if a == b else Fraction(0)
    return model.pair(a, b)


def llv_bracket(x: LLVElement, y: LLVElement, n: int, model: Optional[K3Model] = None) -> LLVElement:
    """[a^b, c^d] = (a,d) b^c - (a,c) b^d - (b,d) a^c + (b,c) a^d."""
    model = model or K3Model.default()
    out = LLVElement()
    for (a, b), c1 in x.terms.items():
        for (c, d), c2 in y.terms.items():
            s = c1 * c2
            parts = {}
            for coef, (u, v) in ((llv_form(a, d, n, model), (b, c)), (-llv_form(a, c, n, model), (b, d)),
                                 (-llv_form(b, d, n, model), (a, c)), (llv_form(b, c, n, model), (a, d))):
                if coef and u != v:
                    parts[(u, v)] = parts.get((u, v), 0) + coef * s
            out = out + LLVElement(parts)
    return out


def act(x: LLVElement, n: Optional[int] = None, model: Optional[K3Model] = None) -> LinearOperator:
    """The LLV action: e^a -> e_a, a^f -> f~_a, e^f -> h, extended through brackets."""
    model = model or K3Model.default()
    total: Optional[LinearOperator] = None
    for (a, b), c in x.terms.items():
        op = _act_basis(a, b, model).scale(c)
        total = op if total is None else total + op
    if total is None:
        total = identity_operator(model).scale(0)
    total.n = n
    return total


_ACT_CACHE: Dict[Tuple[int, str, str], LinearOperator] = {}


def _act_basis(a: str, b: str, model: K3Model) -> LinearOperator:
    key = (id(model), a, b)
    hit = _ACT_CACHE.get(key)
    if hit is not None:
        return hit
    op = _act_basis_raw(a, b, model)
    _ACT_CACHE[key] = op
    return op


def _act_basis_raw(a: str, b: str, model: K3Model) -> LinearOperator:
    if (a, b) == ("e", "f"):
        return op_h(model)
    if a == "e":
        return op_e_delta(model) if b == "delta" else op_e_alpha(b, model)
    if b == "f":
        if a == "delta":
            raise UnsupportedClass("f_delta is not implemented")
        return op_f_alpha(a, model)
    if (a, b) == ("delta", "F"):
        return op_T_delta(model)
    if a == "delta" or b == "delta":
        # delta ^ beta = [e_delta, f~_beta] since (delta, beta) = 0
        other, sign = (b, 1) if a == "delta" else (a, -1)
        return commutator(op_e_delta(model), op_f_alpha(other, model)).scale(sign)
    # a ^ b = [e_a, f~_b] - (a, b) h for a, b in H^2(S)
    out = commutator(op_e_alpha(a, model), op_f_alpha(b, model))
    s = model.pair(a, b)
    if s:
        out = out - op_h(model).scale(s)
    return out


# ---------------------------------------------------------------------------
def monodromy(kind: str, n: Optional[int] = None, lam: int = 0,
              model: Optional[K3Model] = None) -> LinearOperator:
    """``involution``: D composed with -id on H^2(S) classes; ``shift``: exp(lam T_delta)."""
    model = model or K3Model.default()
    if kind == "involution":
        def rule(key):
            deg = gradings(key, model)[0]
            h2 = sum(1 for _, lab in key if model.degree(lab) == 1)
            return {key: Fraction((-1) ** (deg + h2))}

        return LinearOperator(0, rule, "involution", n, model)
    if kind == "shift":
        lam = Fraction(lam)
        if lam.denominator != 1:
            raise ValueError("shift parameter must be an integer")
        T = op_T_delta(model)

        def rule(key):
            out = {key: Fraction(1)}
            cur = {key: Fraction(1)}
            m = 0
            while cur:
                m += 1
                nxt: Dict[WeightedPartition, Fraction] = {}
                for k1, c1 in cur.items():
                    for k2, c2 in T.column(k1).items():
                        _add(nxt, k2, c1 * c2)
                cur = nxt
                f = lam ** m / math.factorial(m)
                for k2, c in cur.items():
                    _add(out, k2, c * f)
            return out

        return LinearOperator(0, rule, f"exp({lam} T_delta)", n, model)
    raise UnknownOperator(f"unknown monodromy {kind!r}")


def curve_class(beta: ClassLike, r: int, n: int, model: Optional[K3Model] = None) -> FockVector:
    """beta_[n] + r A with beta_[n] = q_1(beta) q_1(pt)^(n-1) v_0, A = q_2(pt) q_1(pt)^(n-2) v_0."""
    model = model or K3Model.default()
    v = FockVector.vacuum()
    for _ in range(n - 1):
        v = nakajima_apply(1, "pt", v, model)
    out = nakajima_apply(1, beta, v, model) if model.vector(beta) else FockVector(n)
    if r and n >= 2:
        out = out + FockVector.monomial([(2, "pt")] + [(1, "pt")] * (n - 2), r)
    return out


# ---------------------------------------------------------------------------
def dual_partition(mu: WeightedPartition, model: Optional[K3Model] = None) -> FockVector:
    """The class of mu^dual = {(mu_i, gamma_i^dual)}, expanded in the basis."""
    model = model or K3Model.default()
    norm = Fraction(1, mu.prod_parts())
    out: Dict[WeightedPartition, Fraction] = {}
    choices = [[((k, b), c) for b, c in model.dual(lab).items()] for k, lab in mu]
    for combo in itertools.product(*choices):
        key = WeightedPartition(p for p, _ in combo)
        c = norm
        for _, x in combo:
            c *= x
        out[key] = out.get(key, 0) + c
    return FockVector(mu.n, out)


def kunneth_diagonal(n: int, model: Optional[K3Model] = None):
    """Terms (coeff, mu, mu_dual) of the diagonal of S^[n]; mu_dual is a FockVector."""
    model = model or K3Model.default()
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    for mu in basis(n, model):
        c = Fraction((-1) ** (n - len(mu)) * mu.prod_parts(), mu.aut())
        out.append((c, mu, dual_partition(mu, model)))
    return out


def _candidates(model: K3Model, key: WeightedPartition):
    """Basis monomials whose pairing with ``key`` can be nonzero."""
    choices = [[(k, b) for b in model.partners(lab)] for k, lab in key]
    seen = set()
    for combo in itertools.product(*choices):
        wp = WeightedPartition(combo)
        if wp not in seen:
            seen.add(wp)
            yield wp


def contract(terms, gamma: FockVector, model: Optional[K3Model] = None) -> FockVector:
    """sum coeff * <gamma, left> * right over Kunneth terms (left given as partition or vector)."""
    model = model or K3Model.default()
    index = _term_index(terms)
    out: Dict[WeightedPartition, Fraction] = {}
    for key, g in gamma.terms.items():
        for mu in _candidates(model, key):
            hits = index.get(mu)
            if not hits:
                continue
            s = _pair_keys(model, key, mu)
            if not s:
                continue
            gs = g * s
            for c, right in hits:
                f = gs * c
                for k2, c2 in right.terms.items():
                    out[k2] = out.get(k2, 0) + f * c2
    out = {k: v for k, v in out.items() if v}
    n = next(iter(out)).n if out else gamma.n
    return FockVector(n, out)


_INDEX_CACHE: Dict[int, Tuple[object, Dict]] = {}


def _term_index(terms):
    hit = _INDEX_CACHE.get(id(terms))
    if hit is not None and hit[0] is terms:
        return hit[1]
    index: Dict[WeightedPartition, list] = {}
    for c, left, right in terms:
        if isinstance(left, WeightedPartition):
            lv = {left: Fraction(1, left.prod_parts())}
        else:
            lv = left.terms
        for mu, a in lv.items():
            index.setdefault(mu, []).append((c * a, right))
    _INDEX_CACHE.clear()
    _INDEX_CACHE[id(terms)] = (terms, index)
    return index


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def u_class(n: int, model: Optional[K3Model] = None):
    """Kunneth terms (coeff, left, right) of the class of U, both sides FockVectors."""
    model = model or K3Model.default()
    if n < 1:
        raise ValueError("n must be >= 1")
    base_split = [({"F": Fraction(1)}, _ONE), (_ONE, {"F": Fraction(1)})]
    s_split = [({a: Fraction(1)}, model.dual(a)) for a in model.labels]
    out = []
    for m in range(0, n):
        for b in range(1, n - m + 1):
            for bs in _compositions(n - b, m):
                coeff = Fraction((-1) ** (m + n + 1) * math.prod(bs), math.factorial(m))
                for left_b, right_b in base_split:
                    for choice in itertools.product(s_split, repeat=m):
                        left = [(b, left_b)] + [(bi, c[0]) for bi, c in zip(bs, choice)]
                        right = [(b, right_b)] + [(bi, c[1]) for bi, c in zip(bs, choice)]
                        out.append((coeff, class_of_partition(left, model), class_of_partition(right, model)))
    return out


def wt_of_vector(v: FockVector, model: Optional[K3Model] = None) -> Optional[int]:
    """Common wt of all terms, or None when v is not wt-homogeneous (zero gives None)."""
    model = model or K3Model.default()
    ws = {gradings(k, model)[1] for k in v.terms}
    return ws.pop() if len(ws) == 1 else None


def divisor_operator(v: FockVector, model: Optional[K3Model] = None) -> Optional[LinearOperator]:
    """Cup product with v as an operator, when v lies in H^0 + H^2 of S^[n]; otherwise None."""
    model = model or K3Model.default()
    n = v.n
    total = None
    for mu, c in v.terms.items():
        others = [p for p in mu if p != (1, "1")]
        if not others:
            op = identity_operator(model).scale(c * math.factorial(n))
        elif len(others) == 1 and others[0][0] == 1 and model.degree(others[0][1]) == 1:
            op = op_e_alpha(others[0][1], model).scale(c * math.factorial(n - 1))
        elif others == [(2, "1")]:
            op = op_e_delta(model).scale(c * -2 * math.factorial(n - 2))
        else:
            return None
        total = op if total is None else total + op
    return total if total is not None else identity_operator(model).scale(0)


def cup_product(x: FockVector, y: FockVector, model: Optional[K3Model] = None) -> FockVector:
    """x * y in H*(S^[n]); one factor must be a combination of 1 and divisor classes."""
    model = model or K3Model.default()
    if x.n != y.n:
        raise DimensionMismatch(f"classes on S^[{x.n}] and S^[{y.n}]")
    for a, b in ((x, y), (y, x)):
        op = divisor_operator(a, model)
        if op is not None:
            return op.apply(b)
    raise UnsupportedClass("cup product needs one factor in H^0 + H^2")
