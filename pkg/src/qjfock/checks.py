"""Invariant suites behind ``qjfock verify``.

Each check is a small exact computation returning True or False.  Sizes are
kept below those of the test suite so that ``verify all`` stays quick.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from .genpoly import GenPoly, expand
from .series import FourierSeries, LaurentView, dtau, dx, to_laurent

Check = Tuple[str, Callable[[], bool]]


def _gen(name, power=1):
    return GenPoly.gen(name, power)


# series ----------------------------------------------------------------------
def _coherence() -> bool:
    th, a = expand(_gen("Theta"), 10), expand(_gen("A"), 10)
    return to_laurent(a * th, (-5, 5)).equals(to_laurent(dx(th), (-5, 5)))


def _inverse_roundtrip() -> bool:
    from .series import invert
    f = expand(_gen("Theta", 2), 10)
    one = (f * invert(f)).truncate(10)
    return one.equals(FourierSeries.constant(1, 10))


def _json_roundtrip() -> bool:
    from .series import series_from_json, series_to_json
    f = expand(_gen("A") * _gen("Theta", 2), 6)
    return series_from_json(series_to_json(f)).equals(f)


# qjacobi ---------------------------------------------------------------------
def _comm_relations() -> bool:
    from .qjacobi import anomaly, dtau_symbolic, dx_symbolic
    q = 10
    for f in (_gen("G2"), _gen("G4"), _gen("Theta", 2), _gen("Theta", 2) * _gen("wp"), _gen("A") * _gen("Theta", 2)):
        k, m2 = f.weight, f.index2
        pairs = [
            (anomaly(dtau_symbolic(f), "G2") - dtau_symbolic(anomaly(f, "G2")), f * (-2 * k)),
            (anomaly(dx_symbolic(f), "A") - dx_symbolic(anomaly(f, "A")), f * m2),
            (anomaly(dx_symbolic(f), "G2") - dx_symbolic(anomaly(f, "G2")), anomaly(f, "A") * -2),
            (anomaly(dtau_symbolic(f), "A") - dtau_symbolic(anomaly(f, "A")), dx_symbolic(f)),
        ]
        for lhs, rhs in pairs:
            if not to_laurent(expand(lhs, q), (-6, 6)).equals(to_laurent(expand(rhs, q), (-6, 6))):
                return False
    return True


def _rules_match_series() -> bool:
    from .qjacobi import dtau_symbolic, dx_symbolic
    f = _gen("A") * _gen("Theta", 2) * _gen("G4")
    w = (-6, 6)
    ok = to_laurent(expand(dx_symbolic(f), 10), w).equals(to_laurent(dx(expand(f, 10)), w))
    return ok and to_laurent(expand(dtau_symbolic(f), 10), w).equals(to_laurent(dtau(expand(f, 10)), w))


def _a_n() -> bool:
    from .qjacobi import a_n_generating, a_n_series, a_n_symbolic
    for n in range(1, 5):
        s = a_n_series(n, 8)
        if not a_n_generating(n, 8).equals(s) or not expand(a_n_symbolic(n), 8).equals(s):
            return False
    return True


def _ansatz_fit() -> bool:
    from .qjacobi import fit_jacobi_ansatz
    fit = fit_jacobi_ansatz(expand(GenPoly.monomial(-1, Theta=2, Delta_inv=1), 10), 2)
    c = fit.coefficients[(0, 0, 0)]
    return c.q_coeff(0) == -1 and all(c.q_coeff(d) == 0 for d in range(1, fit.qmax + 1))


# hecke -----------------------------------------------------------------------
def _hecke_example() -> bool:
    from .generators import eisenstein
    from .hecke import HeckeSpec, hecke_ah, hecke_formal
    from .qjacobi import ah_completion
    q = 15
    g2 = to_laurent(eisenstein(2, 2 * q + 2), (0, 0))
    lhs = hecke_formal(g2, HeckeSpec(4, 2), qmax=q)
    f2 = [Fraction(1)] + [Fraction(24 * sum(d for d in range(1, m + 1, 2) if m % d == 0)) for m in range(1, q + 1)]
    F2 = FourierSeries.from_q(f2, q)
    G2 = eisenstein(2, q)
    rhs = (F2.scale(Fraction(-1, 48)) + G2.scale(Fraction(1, 2))).scale(8) + F2.scale(Fraction(1, 24)) + G2.scale(2)
    if not lhs.equals(to_laurent(rhs, (0, 0))):
        return False
    ah = hecke_ah(ah_completion(_gen("G2"), 2 * q), HeckeSpec(4, 2))
    return ah[(1, 0)].truncate(q).equals(FourierSeries.constant(6, q))


def _mobius() -> bool:
    from .generators import eisenstein
    from .hecke import HeckeSpec, apply_decomposition, hecke_formal
    q = 20
    g4 = to_laurent(eisenstein(4, 2 * q + 2), (0, 0))
    return hecke_formal(g4, HeckeSpec(5, 2), qmax=q).equals(apply_decomposition(g4, 5, 4, 2, q))


# fock ------------------------------------------------------------------------
def _heisenberg() -> bool:
    from .fock import FockVector, nakajima_apply
    v = FockVector.monomial([(1, "W"), (1, "F")])
    for k, a, b in ((2, "W", "F"), (1, "pt", "1"), (1, "b1", "b2")):
        lhs = nakajima_apply(k, a, nakajima_apply(-k, b, v)) - nakajima_apply(-k, b, nakajima_apply(k, a, v))
        from .fock import K3Model
        if lhs != v.scale(k * K3Model.default().pair(a, b)):
            return False
    return True


def _llv_n2() -> bool:
    from .fock import commutator, op_e_alpha, op_e_delta, op_T_delta, op_U, op_Wt
    U, Wt = op_U(), op_Wt()
    return (commutator(op_e_alpha("W"), U).equals(Wt, 2) and commutator(op_e_delta(), U).equals(op_T_delta(), 2)
            and commutator(Wt, U).equals(U.scale(-2), 2))


def _fujiki() -> bool:
    from .fock import op_e_delta, pairing, unit_class
    ed, one = op_e_delta(), unit_class(2)
    return pairing(ed(ed(ed(ed(one)))), one) == 12


# assembly --------------------------------------------------------------------
def _fiber() -> bool:
    from .assembly import FiberInput, fiber_class_series
    from .generators import eisenstein
    v = fiber_class_series(FiberInput(0, 3, 24), 12, (-2, 2))
    return v.equals(to_laurent(eisenstein(4, 12).scale(24), (-2, 2)))


def _e8() -> bool:
    from .assembly import e4_at, e8_theta
    return e8_theta(8, 2).equals(e4_at(8, 2))


def _bold_g() -> bool:
    from .assembly import bold_g, bold_g_series
    from .qjacobi import anomaly
    G = bold_g()
    return (to_laurent(expand(G, 8), (-6, 6)).equals(to_laurent(bold_g_series(8), (-6, 6)))
            and anomaly(G, "G2") == _gen("Theta", 2) * 2)


def _hae_synthetic() -> bool:
    from .assembly import hae_residual_g0n3, synthetic_hae_table
    lams = [[(1, "W"), (1, "1")], [(1, "F"), (1, "1")], [(1, "pt"), (1, "1")]]
    table, _ = synthetic_hae_table(lams, 2, 4, seed=3)
    return hae_residual_g0n3(table, lams, 2, 4, (-4, 4)).is_zero()


SUITES: Dict[str, List[Check]] = {
    "series": [("generator coherence A Theta = D_x Theta", _coherence),
               ("series inverse round trip", _inverse_roundtrip),
               ("series JSON round trip", _json_roundtrip)],
    "qjacobi": [("commutation relations", _comm_relations),
                ("derivative rules match expansions", _rules_match_series),
                ("A_n closed / generating / symbolic", _a_n),
                ("ansatz fit of -Theta^2/Delta", _ansatz_fit)],
    "hecke": [("T_{4,2} G2 worked example", _hecke_example),
              ("Moebius decomposition (5, 4, 2)", _mobius)],
    "fock": [("Heisenberg commutators", _heisenberg),
             ("LLV commutators on n = 2", _llv_n2),
             ("Fujiki constant of delta", _fujiki)],
    "assembly": [("fiber class a=0, b=3", _fiber),
                 ("E8(2) theta = E4(q^2)", _e8),
                 ("bold G identities", _bold_g),
                 ("anomaly residual on synthetic table", _hae_synthetic)],
}


def run_suite(name: str) -> List[Tuple[str, str, bool]]:
    names = list(SUITES) if name == "all" else [name]
    out = []
    for suite in names:
        for label, fn in SUITES[suite]:
            try:
                ok = bool(fn())
            except Exception:
                ok = False
            out.append((suite, label, ok))
    return out
