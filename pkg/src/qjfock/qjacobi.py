"""Symbolic calculus on quasi-Jacobi forms and the fitting algorithms built on it.

The ring is presented by :class:`~qjfock.genpoly.GenPoly`.  Derivative rules
for the generators are not typed in: each one is fitted against exact
q-expansions over an ansatz of monomials of the right weight and index, then
verified on extra coefficients before it is used.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from flint import fmpq, fmpq_mat

from .errors import (FitFailed, InsufficientPrecision, NotInSpan, NotQuasimodular, ResidualNonzero,
                     RuleTableUnverified, SymmetryViolated)
from .generators import bernoulli, discriminant, divisors, eisenstein, expand_generator
from .genpoly import SLOT, SLOTS, ZERO_EXPS, GenPoly, expand, mono_index2, mono_weight
from .linalg import combine, rref_solve, series_equations
from .series import (FormMeta, FourierSeries, LaurentView, PCoeff, check_elliptic_symmetry, dtau, dx,
                     from_laurent, invert, to_fmpq, to_frac, to_laurent)

JACOBI_FREE = ("A", "G2", "wp", "dwp", "G4")
QMOD = ("G2", "G4", "G6")
RULE_FIT_Q = 20
RULE_CHECK_Q = 26


def monomials(names: Sequence[str], weight: int) -> List[GenPoly]:
    """All monomials in ``names`` of the given weight (index 0 generators only)."""
    from .generators import GEN_WEIGHT

    if weight < 0:
        return []
    ws = [GEN_WEIGHT[n] for n in names]
    out = []

    def rec(i, left, exps):
        if i == len(names):
            if left == 0:
                out.append(GenPoly.monomial(1, **dict(zip(names, exps))))
            return
        for k in range(left // ws[i] + 1):
            rec(i + 1, left - k * ws[i], exps + [k])

    rec(0, weight, [])
    return out


def fit_span(basis: Sequence[GenPoly], target: FourierSeries, qfit: int, qcheck: int,
             allow_ambiguous: bool = False) -> Optional[GenPoly]:
    """Find the unique combination of ``basis`` expanding to ``target``.

    Fitting uses q-orders through ``qfit``; the answer is then checked exactly
    through ``qcheck``.  Returns None when no combination fits.
    """
    if not basis:
        return GenPoly() if target.truncate(qcheck).is_zero() else None
    series = [expand(b, qcheck) for b in basis]
    lo = -max([s.pole_order for s in series] + [target.pole_order])
    rows, rhs = series_equations(series, target, range(lo, qfit + 1), len(basis) + 4)
    sol, rank, _ = rref_solve(rows, rhs, len(basis))
    if sol is None:
        return None
    if rank < len(basis) and not allow_ambiguous:
        raise FitFailed(f"ansatz of size {len(basis)} has rank {rank}; increase precision")
    out = GenPoly()
    for b, c in zip(basis, sol):
        out = out + b * c
    check = min(qcheck, target.qmax)
    if not combine(series, sol, check).equals(target.truncate(check)):
        return None
    return out


# ---------------------------------------------------------------------------
# derivative rule tables

def _rule_ansatz(name: str, extra_weight: int) -> List[GenPoly]:
    from .generators import GEN_WEIGHT

    w = GEN_WEIGHT[name] + extra_weight
    if name in ("Theta", "Theta_inv", "Delta_inv"):
        prefix = GenPoly.gen(name)
        inner = monomials(QMOD, w - GEN_WEIGHT[name]) if name == "Delta_inv" else \
            monomials(JACOBI_FREE, w - GEN_WEIGHT[name])
        return [prefix * m for m in inner]
    if name in QMOD:
        return monomials(QMOD, w)
    return monomials(JACOBI_FREE, w)


_RULES: Dict[str, Dict[str, GenPoly]] = {}


def _fit_rules(kind: str) -> Dict[str, GenPoly]:
    op, extra = (dx, 1) if kind == "dx" else (dtau, 2)
    table = {}
    for name in ("Theta", "A", "G2", "wp", "dwp", "G4", "G6", "Delta_inv", "Theta_inv"):
        target = op(expand_generator(name, RULE_CHECK_Q + 2))
        rule = fit_span(_rule_ansatz(name, extra), target, RULE_FIT_Q, RULE_CHECK_Q)
        if rule is None:
            raise RuleTableUnverified(f"{kind} rule for {name} failed its expansion check")
        table[name] = rule
    # the signed-Theta slot uses the Theta rule; it must agree with the Theta_inv fit
    theta_inv = GenPoly.gen("Theta_inv")
    derived = theta_inv * theta_inv * table["Theta"] * -1
    if derived != table["Theta_inv"]:
        raise RuleTableUnverified(f"{kind} rules for Theta and Theta_inv disagree")
    return table


def rule_table(kind: str) -> Dict[str, GenPoly]:
    """Fitted and verified rule table for ``kind`` in {"dx", "dtau"}."""
    if kind not in _RULES:
        _RULES[kind] = _fit_rules(kind)
    return _RULES[kind]


def _apply_derivation(f: GenPoly, rules: Dict[str, GenPoly]) -> GenPoly:
    out = GenPoly()
    for e, c in f.terms.items():
        for i, name in enumerate(SLOTS):
            x = e[i]
            if x == 0:
                continue
            rest = list(e)
            rest[i] -= 1
            out = out + GenPoly({tuple(rest): c * x}) * rules[name]
    return out


def dx_symbolic(f: GenPoly) -> GenPoly:
    """D_x = p d/dp on the generator presentation."""
    return _apply_derivation(f, rule_table("dx"))


def dtau_symbolic(f: GenPoly) -> GenPoly:
    """D_tau = q d/dq on the generator presentation."""
    return _apply_derivation(f, rule_table("dtau"))


def anomaly(f: GenPoly, which: str) -> GenPoly:
    """Formal partial derivative d/dG2 or d/dA."""
    if which not in ("G2", "A"):
        raise ValueError("which must be 'G2' or 'A'")
    return f.partial(which)


# ---------------------------------------------------------------------------
@dataclass
class AHForm:
    """Almost-holomorphic completion ``sum f_{i,j} nu^i alpha^j``."""

    entries: Dict[Tuple[int, int], FourierSeries] = field(default_factory=dict)
    weight: Optional[int] = None
    index2: Optional[int] = None
    symbolic: Dict[Tuple[int, int], GenPoly] = field(default_factory=dict)

    def __getitem__(self, key) -> FourierSeries:
        return self.entries[key]

    def get(self, key, default=None):
        return self.entries.get(key, default)

    def keys(self):
        return sorted(self.entries)


def ah_completion(f: GenPoly, qmax: int) -> AHForm:
    entries, symbolic = {}, {}
    g_i = f
    i = 0
    while not g_i.is_zero():
        g_ij = g_i
        j = 0
        while not g_ij.is_zero():
            scaled = g_ij * Fraction(1, math.factorial(i) * math.factorial(j))
            symbolic[(i, j)] = scaled
            entries[(i, j)] = expand(scaled, qmax)
            g_ij = g_ij.partial("A")
            j += 1
        g_i = g_i.partial("G2")
        i += 1
    return AHForm(entries, f.weight, f.index2, symbolic)


# ---------------------------------------------------------------------------
# z-expansions

@dataclass
class ZExpansion:
    """``sum_r coeffs[r] z^r`` known for ``r <= zmax``; coefficients are q-series."""

    zmax: int
    coeffs: Dict[int, FourierSeries] = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {r: s for r, s in self.coeffs.items() if r <= self.zmax and not s.is_zero()}

    def pairs(self) -> List[Tuple[int, FourierSeries]]:
        return sorted(self.coeffs.items())

    def __getitem__(self, r) -> Optional[FourierSeries]:
        return self.coeffs.get(r)

    def zmin(self) -> Optional[int]:
        return min(self.coeffs) if self.coeffs else None

    def __add__(self, other: "ZExpansion") -> "ZExpansion":
        out = dict(self.coeffs)
        for r, s in other.coeffs.items():
            out[r] = out[r] + s if r in out else s
        return ZExpansion(min(self.zmax, other.zmax), out)

    def scale(self, c) -> "ZExpansion":
        return ZExpansion(self.zmax, {r: s.scale(c) for r, s in self.coeffs.items()})

    def shift(self, k: int) -> "ZExpansion":
        """Multiply by z**k."""
        return ZExpansion(self.zmax + k, {r + k: s for r, s in self.coeffs.items()})

    def __mul__(self, other: "ZExpansion") -> "ZExpansion":
        if not self.coeffs or not other.coeffs:
            return ZExpansion(min(self.zmax, other.zmax))
        zmax = min(self.zmax + other.zmin(), other.zmax + self.zmin())
        out: Dict[int, FourierSeries] = {}
        for r1, s1 in self.coeffs.items():
            for r2, s2 in other.coeffs.items():
                r = r1 + r2
                if r > zmax:
                    continue
                prod = s1 * s2
                out[r] = out[r] + prod if r in out else prod
        return ZExpansion(zmax, out)

    def equals(self, other: "ZExpansion", zmax: Optional[int] = None) -> bool:
        top = min(self.zmax, other.zmax) if zmax is None else zmax
        keys = {r for r in set(self.coeffs) | set(other.coeffs) if r <= top}
        for r in keys:
            a, b = self.coeffs.get(r), other.coeffs.get(r)
            if a is None or b is None:
                if (a if b is None else b).is_zero():
                    continue
                return False
            if not a.equals(b):
                return False
        return True


def _zexp(x: ZExpansion, order: int) -> ZExpansion:
    """exp of a z-series with positive z-valuation, through z^order."""
    one = FourierSeries.constant(1, min(s.qmax for s in x.coeffs.values()) if x.coeffs else 10**6)
    out = ZExpansion(order, {0: one})
    term = ZExpansion(order, {0: one})
    j = 1
    while True:
        term = (term * x).scale(Fraction(1, j))
        term = ZExpansion(order, term.coeffs)
        if not term.coeffs:
            break
        out = out + term
        j += 1
    return out


def _gen_zseries(name: str, order: int, qmax: int) -> ZExpansion:
    def G(k):
        return eisenstein(k, qmax)

    fact = math.factorial
    if name in ("G2", "G4", "G6"):
        return ZExpansion(order, {0: expand_generator(name, qmax)})
    if name == "Delta_inv":
        return ZExpansion(order, {0: expand_generator("Delta_inv", qmax)})
    if name in ("Theta", "Theta_inv"):
        sign = -2 if name == "Theta" else 2
        x = ZExpansion(order + 1, {k: G(k).scale(Fraction(sign, fact(k))) for k in range(2, order + 2, 2)})
        e = _zexp(x, order + 1)
        return e.shift(1) if name == "Theta" else e.shift(-1)
    one = FourierSeries.constant(1, qmax)
    if name == "A":
        c = {-1: one}
        for k in range(2, order + 2, 2):
            c[k - 1] = G(k).scale(Fraction(-2, fact(k - 1)))
        return ZExpansion(order, c)
    if name == "wp":
        c = {-2: one}
        for k in range(4, order + 3, 2):
            c[k - 2] = G(k).scale(Fraction(2, fact(k - 2)))
        return ZExpansion(order, c)
    if name == "dwp":
        c = {-3: one.scale(-2)}
        for k in range(4, order + 4, 2):
            c[k - 3] = G(k).scale(Fraction(2, fact(k - 3)))
        return ZExpansion(order, c)
    raise ValueError(name)


_POLE_Z = {"Theta": -1, "A": 1, "wp": 2, "dwp": 3, "Theta_inv": 1}


def z_expand(f: GenPoly, zmax: int, qmax: int = 12) -> ZExpansion:
    """Expansion in z = 2 pi i x with q-series coefficients, through z^zmax."""
    out = ZExpansion(zmax)
    work_q = qmax + 2 * f.degree_in("Delta_inv") + 2
    for e, c in sorted(f.terms.items()):
        slack = 0
        for name, x in zip(SLOTS, e):
            if name == "Theta" and x < 0:
                slack += -x
            elif name != "Theta":
                slack += x * max(_POLE_Z.get(name, 0), 0)
        term = ZExpansion(zmax + slack, {0: FourierSeries.constant(1, work_q)})
        for name, x in zip(SLOTS, e):
            if x == 0:
                continue
            gname = "Theta_inv" if name == "Theta" and x < 0 else name
            piece = _gen_zseries(gname, zmax + slack + 2, work_q)
            for _ in range(abs(x)):
                term = term * piece
        term = ZExpansion(zmax, {r: s.truncate(qmax) for r, s in term.coeffs.items()})
        out = out + term.scale(c)
    return ZExpansion(zmax, {r: s.truncate(qmax) for r, s in out.coeffs.items()})


# ---------------------------------------------------------------------------
def fit_quasimodular(s: FourierSeries, weight: int, safety: int = 5) -> GenPoly:
    """Write a q-series as a polynomial in G2, G4, G6 of the given weight."""
    if s.pole_order > 0 and any(d < 0 for d in s.coeffs):
        raise NotQuasimodular("series has a pole at the cusp")
    if not s.is_q_only():
        raise NotQuasimodular("coefficients depend on p")
    basis = monomials(QMOD, weight) if weight >= 0 else []
    have = s.qmax + 1
    if have < len(basis) + safety:
        raise InsufficientPrecision(f"need {len(basis) + safety} coefficients, have {have}")
    if not basis:
        if s.is_zero():
            return GenPoly()
        raise NotQuasimodular(f"no quasimodular forms of weight {weight}")
    series = [expand(b, s.qmax) for b in basis]
    rows = [[b.q_coeff(d) for b in series] for d in range(s.qmax + 1)]
    rhs = [s.q_coeff(d) for d in range(s.qmax + 1)]
    sol, rank, _ = rref_solve(rows, rhs, len(basis))
    if sol is None:
        raise NotQuasimodular(f"not quasimodular of weight {weight}")
    if rank < len(basis):
        raise InsufficientPrecision("coefficients do not separate the weight-graded basis")
    out = GenPoly()
    for b, c in zip(basis, sol):
        out = out + b * c
    return out


# ---------------------------------------------------------------------------
# reconstruction from symmetric coefficient data

@dataclass
class Reconstruction:
    """``Theta^(2m) [wp'] sum_i f_i(q) wp^(m-i)`` with the f_i as q-series."""

    m: int
    parity: str
    coefficients: Dict[int, FourierSeries]

    def basis_element(self, i: int) -> GenPoly:
        base = GenPoly.gen("Theta", 2 * self.m) * GenPoly.gen("wp", self.m - i) if self.m - i >= 0 else None
        if self.parity == "odd":
            base = base * GenPoly.gen("dwp")
        return base

    def expand(self, qmax: Optional[int] = None) -> FourierSeries:
        if qmax is None:
            qmax = min((c.qmax for c in self.coefficients.values()), default=0)
        out = FourierSeries.zero(qmax)
        for i, c in self.coefficients.items():
            out = out + expand(self.basis_element(i), qmax) * c
        return out.truncate(qmax)


def _x_basis_coeffs(terms: Dict[int, Fraction]) -> Dict[int, Fraction]:
    """Coordinates of a symmetric Laurent polynomial (in u) in the basis X^l, X = (u - 1/u)^2."""
    from .series import PCoeff as _P

    rest = dict(terms)
    out = {}
    while rest:
        top = max(rest)
        if top % 2 or top < 0:
            raise ResidualNonzero("coefficient is not symmetric under p -> 1/p")
        ell = top // 2
        c = rest[top]
        out[ell] = c
        xl = (_P.from_terms({1: 1, -1: -1}) ** (2 * ell)).laurent_terms()
        for k, v in xl.items():
            rest[k] = rest.get(k, 0) - c * v
            if rest[k] == 0:
                del rest[k]
    return out


def _leading_pcoeff(g: GenPoly) -> PCoeff:
    return expand(g, 0)[0]


def reconstruct(f, m: int, parity: str = "even", check_window: int = 8) -> Reconstruction:
    """Inductive stripping in the basis (p^(1/2) - p^(-1/2))^(2l).

    ``f`` is a FourierSeries (or LaurentView with finite support) without pole.
    """
    if isinstance(f, LaurentView):
        f = from_laurent(f)
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    if f.pole_order and any(d < 0 for d in f.coeffs):
        raise ResidualNonzero("input has a pole in q")
    qmax = f.qmax
    sign = 1 if parity == "even" else -1
    for d, c in f.coeffs.items():
        if c.invert_u() != c * sign:
            raise SymmetryViolated(f"q^{d} coefficient fails c(d,k) = {'+' if sign > 0 else '-'}c(d,-k)", d=d)
    if all(c.is_laurent() for c in f.coeffs.values()) and f.coeffs:
        kmax = max(max(c.laurent_terms()) for c in f.coeffs.values())
        view = to_laurent(f, (-Fraction(kmax, 2) - check_window, Fraction(kmax, 2) + check_window))
        report = check_elliptic_symmetry(view, m, (-1, 1))
        if not report.ok:
            d, r, lam = report.violations[0]
            raise SymmetryViolated(f"elliptic symmetry fails at (d, r, lambda) = ({d}, {r}, {lam})",
                                   d=d, r=str(r), lam=lam)
    idx = list(range(0, m + 1)) if parity == "even" else list(range(2, m + 1))
    rec = Reconstruction(m, parity, {})
    basis_series = {i: expand(rec.basis_element(i), qmax) for i in idx}
    # the X-expansion of each basis element's q^0 term
    lead = {}
    for i in idx:
        c0 = basis_series[i][0]
        if parity == "odd":
            c0 = _divide_antisym(c0)
        lead[i] = _x_basis_coeffs(c0.laurent_terms())
    found = {i: [Fraction(0)] * (qmax + 1) for i in idx}
    resid = f
    for d in range(0, qmax + 1):
        c = resid[d]
        if c.is_zero():
            continue
        if not c.is_laurent():
            raise ResidualNonzero(f"q^{d} remainder is not a Laurent polynomial", d=d)
        if parity == "odd":
            c = _divide_antisym(c)
        xs = _x_basis_coeffs(c.laurent_terms())
        # triangular solve: the basis element i starts at X^(i) (even) or X^(i-2) (odd)
        off = 0 if parity == "even" else 2
        sol = {}
        for i in idx:
            ell = i - off
            val = xs.get(ell, Fraction(0))
            for j, s in sol.items():
                val -= s * lead[j].get(ell, 0)
            sol[i] = val / lead[i][ell]
        for i, s in sol.items():
            if s == 0:
                continue
            found[i][d] = s
            shifted = FourierSeries(0, qmax, {e + d: v * s for e, v in basis_series[i].coeffs.items()})
            resid = resid - shifted
        if not resid[d].is_zero():
            raise ResidualNonzero(f"nonzero remainder at q^{d}", d=d)
    rec.coefficients = {i: FourierSeries.from_q(v, qmax) for i, v in found.items()}
    return rec


def _divide_antisym(c: PCoeff) -> PCoeff:
    """Divide by (p - 1/p); exact for antisymmetric Laurent polynomials."""
    return c / PCoeff.from_terms({2: 1, -2: -1})


# ---------------------------------------------------------------------------
@dataclass
class AnsatzFit:
    """Coefficients f_{i,j,s}(q) of F = Theta^(2n-2)/Delta * sum f_ijs A^i wp^j wp'^s."""

    n: int
    coefficients: Dict[Tuple[int, int, int], FourierSeries]
    qmax: int

    def prefactor(self) -> GenPoly:
        return GenPoly.gen("Theta", 2 * self.n - 2) * GenPoly.gen("Delta_inv")

    @staticmethod
    def monomial(key) -> GenPoly:
        i, j, s = key
        return GenPoly.monomial(1, A=i, wp=j, dwp=s)

    def expand(self, qmax: Optional[int] = None) -> FourierSeries:
        """Re-expand; exact through q^(qmax-1) because of the Delta pole."""
        qmax = self.qmax if qmax is None else qmax
        inner = FourierSeries.zero(qmax + 1)
        for key, c in self.coefficients.items():
            inner = inner + expand(self.monomial(key), qmax + 1) * c
        return (expand(self.prefactor(), qmax + 1) * inner).truncate(qmax)

    def to_genpoly(self, weight: int) -> GenPoly:
        """Fit each coefficient as a quasimodular form; ``weight`` is that of F."""
        pre_w = -(2 * self.n - 2) - 12
        out = GenPoly()
        for (i, j, s), c in self.coefficients.items():
            if c.is_zero():
                continue
            w = weight - pre_w - i - 2 * j - 3 * s
            out = out + fit_quasimodular(c, w) * self.monomial((i, j, s))
        return self.prefactor() * out


def ansatz_keys(n: int) -> List[Tuple[int, int, int]]:
    return [(i, j, s) for i in range(2 * n + 1) for j in range(n) for s in range(2)]


def fit_jacobi_ansatz(f: FourierSeries, n: int, lag: Optional[int] = None) -> AnsatzFit:
    """Solve for the f_{i,j,s}(q) order by order over Q.

    The q^0 parts of the ansatz monomials are linearly dependent, so the
    top orders of the solution are not pinned by the data.  All orders are
    solved together and the fit keeps the longest initial run of orders whose
    coefficients are determined; ``lag`` optionally caps that run at
    ``f.qmax - lag``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    g = (f * discriminant(f.qmax + 2))
    prefactor = expand(GenPoly.gen("Theta", 2 * n - 2), g.qmax)
    h = g * invert(prefactor) if n > 1 else g
    h = h.truncate(f.qmax + 1)
    if any(d < 0 and not c.is_zero() for d, c in h.coeffs.items()):
        raise NotInSpan("pole of order > 1 in q", order=min(h.coeffs))
    D = h.qmax
    keys = ansatz_keys(n)
    mono = [expand(AnsatzFit.monomial(k), D) for k in keys]
    nk = len(keys)
    from .linalg import SAMPLE_U
    pts = SAMPLE_U[:nk + 4]
    ncols = nk * (D + 1)
    flat = []
    nrows = 0
    for d in range(0, D + 1):
        for u in pts:
            row = [fmpq(0)] * (ncols + 1)
            for e in range(0, d + 1):
                for a in range(nk):
                    c = mono[a][d - e]
                    if not c.is_zero():
                        row[e * nk + a] = to_fmpq(c.evaluate(u))
            row[ncols] = to_fmpq(h[d].evaluate(u))
            flat.extend(row)
            nrows += 1
    red, rank = fmpq_mat(nrows, ncols + 1, flat).rref()
    pivots = {}
    for i in range(rank):
        j = next(j for j in range(ncols + 1) if red[i, j] != 0)
        if j == ncols:
            bad = next(d for d in range(D + 1) if _inconsistent_at(mono, h, pts, d, nk))
            raise NotInSpan(f"not in the ansatz span at q^{bad - 1}", order=bad - 1)
        pivots[j] = i
    free = [j for j in range(ncols) if j not in pivots]
    E = -1
    for e in range(D + 1):
        ok = True
        for a in range(nk):
            j = e * nk + a
            if j not in pivots or any(red[pivots[j], jf] != 0 for jf in free):
                ok = False
                break
        if not ok:
            break
        E = e
    if lag is not None:
        E = min(E, D - lag)
    if E < 1:
        raise FitFailed("ansatz coefficients not determined at this precision; supply more q-orders")
    coeffs = {}
    for a, key in enumerate(keys):
        vals = [to_frac(red[pivots[e * nk + a], ncols]) for e in range(E + 1)]
        coeffs[key] = FourierSeries.from_q(vals, E)
    fit = AnsatzFit(n, coeffs, E - 1)
    check = fit.expand(E - 1)
    if not check.equals(f.truncate(E - 1)):
        bad = next(d for d in range(-1, E) if check[d] != f[d])
        raise NotInSpan(f"residual nonzero at q^{bad}", order=bad)
    return fit


def _inconsistent_at(mono, h, pts, top, nk) -> bool:
    rows, rhs = [], []
    for d in range(top + 1):
        for u in pts:
            row = [Fraction(0)] * (nk * (top + 1))
            for e in range(d + 1):
                for a in range(nk):
                    c = mono[a][d - e]
                    if not c.is_zero():
                        row[e * nk + a] = c.evaluate(u)
            rows.append(row)
            rhs.append(h[d].evaluate(u))
    sol, _, _ = rref_solve(rows, rhs, nk * (top + 1))
    return sol is None


# ---------------------------------------------------------------------------
# the functions A_n

def bernoulli_coth(n: int) -> Fraction:
    """Coefficients of (1/2) coth(z/2) = sum B_n z^(n-1)/n!  (so B_1 = 0)."""
    return Fraction(0) if n == 1 else bernoulli(n)


def a_n_series(n: int, qmax: int) -> FourierSeries:
    """Closed Fourier expansion of A_n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    c0 = PCoeff.const(bernoulli_coth(n))
    if n == 1:
        c0 = c0 + PCoeff.from_terms({2: Fraction(1, 2), 0: Fraction(1, 2)}, {2: 1, 0: -1})
    coeffs = {0: c0}
    if n >= 1:
        for d in range(1, qmax + 1):
            terms: Dict[int, Fraction] = {}
            for dd in divisors(d):
                k = d // dd
                w = -n * dd ** (n - 1)
                terms[2 * k] = terms.get(2 * k, 0) + w
                terms[-2 * k] = terms.get(-2 * k, 0) + w * (-1) ** n
            coeffs[d] = PCoeff.from_terms(terms)
    return FourierSeries(0, qmax, coeffs, FormMeta(n, 0, 1, "meromorphic-quasi"))


def a_n_generating(n: int, qmax: int) -> FourierSeries:
    """A_n from the w-expansion of Theta(z+w)/(Theta(z)Theta(w))."""
    theta = expand_generator("Theta", qmax)
    theta_inv = expand_generator("Theta_inv", qmax)
    # 1/Theta(w) = sum_i c_i w^(i-1)
    inv_w = _gen_zseries("Theta_inv", n + 1, qmax)
    out = FourierSeries.zero(qmax)
    deriv = theta
    for j in range(0, n + 1):
        c = inv_w[n - j - 1]
        if c is not None and not c.is_zero():
            out = out + (deriv * theta_inv) * c.scale(Fraction(1, math.factorial(j)))
        deriv = dx(deriv)
    return out.scale(math.factorial(n)).truncate(qmax)


_AN_CACHE: Dict[int, GenPoly] = {}


def a_n_symbolic(n: int, qfit: int = 16) -> GenPoly:
    """Representative of A_n among weight-n, index-0 monomials in A, G2, wp, wp', G4."""
    if n not in _AN_CACHE:
        target = a_n_series(n, qfit + 6)
        fit = fit_span(monomials(JACOBI_FREE, n), target, qfit, qfit + 6)
        if fit is None:
            raise FitFailed(f"A_{n} not in the weight-{n} ansatz")
        _AN_CACHE[n] = fit
    return _AN_CACHE[n]


@dataclass
class AnResult:
    n: int
    series: FourierSeries
    symbolic: Optional[GenPoly]


def a_n(n: int, qmax: int, nmax_symbolic: int = 6) -> AnResult:
    series = a_n_series(n, qmax)
    sym = None
    if n <= nmax_symbolic:
        sym = a_n_symbolic(n)
        if not expand(sym, qmax).equals(series):
            raise FitFailed(f"symbolic A_{n} disagrees with its Fourier expansion")
    return AnResult(n, series, sym)
