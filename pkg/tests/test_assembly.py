import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qjfock.assembly import (FiberInput, GWKey, GWTable, bold_g, bold_g_series, dt_correction, e4_at,
                             e8_theta, fiber_class_series, hae_residual_g0n3, hae_terms, lagrangian_two_point,
                             lattice_vectors, lift_exponents, multiple_cover_lift, synthetic_hae_table,
                             two_point_correction)
from qjfock.errors import MissingTableEntry, NegativeExponent
from qjfock.fock import K3Model, WeightedPartition
from qjfock.generators import eisenstein, expand_generator
from qjfock.genpoly import GenPoly, expand
from qjfock.qjacobi import a_n_symbolic, anomaly, dx_symbolic, fit_quasimodular, z_expand
from qjfock.series import FourierSeries, LaurentView, PCoeff, check_elliptic_symmetry, to_laurent

G = GenPoly.gen
P_OVER = PCoeff.from_terms({2: 1}, {0: 1, 2: -2, 4: 1})  # p / (1 - p)^2
LAMS = [[(1, "W"), (1, "1")], [(1, "F"), (1, "1")], [(1, "pt"), (1, "1")]]


# table ---------------------------------------------------------------------
def test_missing_entries_are_errors():
    t = GWTable()
    key = GWKey(0, 1, "prim", 0, 0, (WeightedPartition([(1, "pt")]),))
    with pytest.raises(MissingTableEntry):
        t.get(key)
    assert t.get(key, default_zero=True) == 0
    with pytest.raises(MissingTableEntry):
        t.series(0, 1, [[(1, "pt")]], 3)


def test_series_sign_convention():
    t = GWTable()
    ins = [[(1, "pt")], [(1, "1")]]
    t.add(0, 1, -1, 0, ins, 5)
    t.add(0, 1, 2, 1, ins, 3)
    t.add(0, 1, 2, 2, ins, 7)
    v = t.series(0, 1, ins, 4)
    assert v.c(-1, 0) == 5 and v.c(2, 1) == -3 and v.c(2, 2) == 7


def test_insertions_are_canonical():
    a = GWKey(0, 1, "prim", 1, 0, (WeightedPartition([(1, "pt")]), WeightedPartition([(1, "1")])))
    b = GWKey(0, 1, "prim", 1, 0, (WeightedPartition([(1, "1")]), WeightedPartition([(1, "pt")])))
    assert a == b


def test_fiber_json_keys():
    row = {"g": 1, "n": 1, "class": "F+rA", "r": 2, "insertions": [[{"part": 1, "class": "pt"}]], "value": "1/3"}
    t = GWTable.from_json([row])
    (key,) = t.entries
    assert key.kind == "fiber" and key.d == 1 and t.entries[key] == Fraction(1, 3)


labels = st.sampled_from(["1", "pt", "W", "F", "b1", "b17"])
partitions = st.lists(st.tuples(st.integers(1, 3), labels), min_size=1, max_size=3)


@given(st.lists(st.tuples(st.integers(0, 2), st.integers(1, 3), st.integers(-1, 5), st.integers(-3, 3),
                          st.lists(partitions, max_size=3), st.fractions(max_denominator=9),
                          st.sampled_from(["prim", "fiber"])), max_size=6))
def test_table_json_roundtrip(rows):
    t = GWTable()
    for g, n, d, r, ins, v, kind in rows:
        t.add(g, n, d, r, ins, v, kind=kind)
    text = json.dumps(t.to_json())
    assert GWTable.from_json(json.loads(text)) == t
    assert json.dumps(GWTable.from_json(json.loads(text)).to_json()) == text


# multiple covers -----------------------------------------------------------
def test_lift_exponents():
    ins = [WeightedPartition(x) for x in ([(1, "pt"), (1, "1")],) * 3]
    assert lift_exponents(0, 2, ins) == (2, 0)
    ins = [WeightedPartition([(1, "pt"), (1, "pt")]), WeightedPartition([(2, "1")])]
    # deg 4 and 1, wt 2 and -1
    assert lift_exponents(1, 2, ins) == (2 * 2 + 2 - 1, (4 - 2 - 2) + (1 - 2 + 1))


def _lagrangian_view(q, window):
    return to_laurent(expand(lagrangian_two_point(2), q), window)


def test_lift_identity_and_linearity():
    v = _lagrangian_view(12, (-6, 6))
    assert multiple_cover_lift(v, -10, 1, 1).equals(v)
    w = to_laurent(expand(G("Theta", 2) * G("G4") * G("Delta_inv"), 12), (-6, 6))
    lhs = multiple_cover_lift(v + w, -10, 1, 2)
    assert lhs.equals(multiple_cover_lift(v, -10, 1, 2) + multiple_cover_lift(w, -10, 1, 2))


def test_lift_of_lagrangian_at_two():
    v = _lagrangian_view(24, (-12, 12))
    out = multiple_cover_lift(v, -10, 1, 2)
    assert out.qmin == -2
    assert min(d for d, _ in out.coeffs) == -2
    c = {(d, k // 2): x for (d, k), x in v.coeffs.items() if k % 2 == 0}
    ref = oracles.hecke_naive(c, -10, 2, range(-2, 6), range(-6, 7))
    for (d, r), x in ref.items():
        assert out.c(d, r) == 2 * x
    assert out.c(-2, -2) == 2 * Fraction(-1, 2 ** 11) and out.c(-2, 2) == out.c(-2, -2)


def test_lift_coprime_composition():
    v = _lagrangian_view(36, (-18, 18))
    k, e = -10, 1
    six = multiple_cover_lift(v, k, e, 6).restrict(window=(-1, 1))
    two = multiple_cover_lift(v, k, e, 2).restrict(window=(-9, 9))
    both = multiple_cover_lift(two, k, e, 3).restrict(window=(-1, 1))
    assert six.equals(both)


# fiber classes -------------------------------------------------------------
def test_fiber_g4():
    q = 30
    v = fiber_class_series(FiberInput(0, 3, 24), q, (-2, 2))
    assert v.equals(to_laurent(eisenstein(4, q).scale(24), (-2, 2)))
    lam = oracles.lambert(0, 3, q)
    assert [v.c(d, 0) for d in range(1, q + 1)] == [24 * x for x in lam[1:]]


def test_fiber_empty_and_negative():
    assert fiber_class_series(FiberInput(1, 2), 8, (-3, 3)).is_zero()
    with pytest.raises(NegativeExponent):
        FiberInput(-1, 0)


def test_fiber_single_r_term():
    v = fiber_class_series(FiberInput(0, 0, 0, [(1, Fraction(5, 2))]), 10, (-4, 4))
    ref = to_laurent(expand_generator("A", 10).scale(Fraction(5, 2)), (-4, 4))
    assert v.equals(ref)
    assert v.modulo_constants and (0, 0) not in v.coeffs


def test_fiber_lambert_general():
    q = 12
    v = fiber_class_series(FiberInput(2, 1, 3), q, (0, 0))
    assert [v.c(d, 0) for d in range(1, q + 1)] == [3 * x for x in oracles.lambert(2, 1, q)[1:]]


@pytest.mark.parametrize("a,b", [(0, 1), (1, 1), (0, 3), (2, 1)])
def test_fiber_closed_part_weight(a, b):
    f = a_n_symbolic(b + 1)
    for _ in range(a):
        f = dx_symbolic(f)
    z = z_expand(f, 5, 14)
    for r, c in z.pairs():
        if not c.is_zero():
            fit_quasimodular(c, r + a + b + 1)


# closed forms --------------------------------------------------------------
def test_lagrangian_two_point():
    assert lagrangian_two_point(1) == G("Delta_inv")
    assert lagrangian_two_point(2) == GenPoly.monomial(-1, Theta=2, Delta_inv=1)
    for n in (1, 2, 3):
        f = lagrangian_two_point(n)
        # weight 2 - 2n once the 1/Delta factor (weight -12) is split off
        assert (f.weight + 12, f.index2) == (2 - 2 * n, 2 * n - 2)
        assert expand(f, 3).pole_order == 1
    f = lagrangian_two_point(2)
    assert to_laurent(expand(f, 2), (-2, 2)).c(-1, 1) == -1


@pytest.mark.parametrize("n", [2, 3])
def test_lagrangian_elliptic_symmetry(n):
    f = lagrangian_two_point(n)
    assert anomaly(f, "A").is_zero()
    rep = check_elliptic_symmetry(to_laurent(expand(f, 10), (-8, 8)), n - 1, (-1, 0, 1))
    assert rep.ok


def test_two_point_correction_examples():
    f1 = two_point_correction(1)
    assert f1 == (G("wp") + G("G2") * 2) * G("Delta_inv")
    assert expand(f1, 2)[-1] == P_OVER
    assert expand(bold_g(), 4)[0] == PCoeff.const(1)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_two_point_correction_grading(n):
    f = two_point_correction(n)
    # bold G has weight 0 and index 1, so only the index moves with n
    assert (f.weight, f.index2) == (-10, 2 * n - 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_two_point_correction_anomaly(n):
    lhs = anomaly(two_point_correction(n), "G2")
    rhs = bold_g() ** (n - 1) * G("Delta_inv") * (2 * n)
    assert to_laurent(expand(lhs - rhs, 8), (-6, 6)).is_zero()


def test_bold_g_identities():
    q = 12
    assert to_laurent(expand(bold_g(), q), (-8, 8)).equals(to_laurent(bold_g_series(q), (-8, 8)))
    assert anomaly(bold_g(), "G2") == G("Theta", 2) * 2


# E8 --------------------------------------------------------------------------
def test_e8_enumeration_matches_coordinates():
    from qjfock.assembly import _e8_gram
    assert lattice_vectors(_e8_gram(), 12) == oracles.e8_counts(12)


def test_lattice_vectors_small_brute_force():
    for gram in ([[2, -1], [-1, 2]], [[2, 1, 0], [1, 4, 1], [0, 1, 6]]):
        assert lattice_vectors(gram, 8) == oracles.all_vectors_small(gram, 8)


def test_e8_theta():
    assert e8_theta(6, 1).q_coeff(0) == 1
    e4 = [Fraction(1)] + [240 * Fraction(oracles.sigma(3, n)) for n in range(1, 7)]
    assert e8_theta(6, 1).equals(FourierSeries.from_q(e4, 6))
    twisted = [Fraction(0)] * 13
    for m in range(7):
        twisted[2 * m] = e4[m]
    assert e8_theta(12, 2).equals(FourierSeries.from_q(twisted, 12))
    assert e4_at(12, 2).equals(FourierSeries.from_q(twisted, 12))


# DT correction -------------------------------------------------------------
def test_dt_correction_examples():
    assert dt_correction(2, 0, 5).expand(5).is_zero()
    f0 = dt_correction(0, 1, 6)
    ref = expand(GenPoly.monomial(Fraction(1, 2), Theta=-2, Delta_inv=1), 7) * e4_at(8, 2)
    assert f0.expand(6).equals(ref.truncate(6))
    f1 = dt_correction(1, 1, 4)
    assert f1.expand(4)[-1] == P_OVER * PCoeff.const(Fraction(1, 2))


@pytest.mark.parametrize("n", [0, 1, 2])
def test_dt_correction_meta(n):
    m = dt_correction(n, 3, 4).meta
    assert (m.weight, m.index2, m.level) == (-6, 2 * n - 2, 2)


# anomaly residual ----------------------------------------------------------
def test_hae_terms_shape():
    lhs, rhs = hae_terms(LAMS, 2)
    assert lhs == tuple(sorted(WeightedPartition(x) for x in LAMS))
    assert len(rhs) == 4
    assert 20 in rhs.values()


def test_hae_all_zero_table():
    t = GWTable()
    out = hae_residual_g0n3(t, LAMS, 2, 4, (-4, 4), default_zero=True)
    assert out.is_zero()


def test_hae_missing_entry():
    with pytest.raises(MissingTableEntry):
        hae_residual_g0n3(GWTable(), LAMS, 2, 4, (-4, 4))


def test_hae_synthetic_and_corruption():
    q = 5
    table, _ = synthetic_hae_table(LAMS, 2, q, seed=11)
    assert hae_residual_g0n3(table, LAMS, 2, q, (-5, 5)).is_zero()
    _, rhs = hae_terms(LAMS, 2)
    key = sorted(rhs)[0]
    gw = GWKey(0, 2, "prim", 3, 1, key)
    table.set(gw, table.get(gw, default_zero=True) + 1)
    res = hae_residual_g0n3(table, LAMS, 2, q, (-5, 5))
    assert set(res.coeffs) == {(3, 2)}
    assert res.coeffs[(3, 2)] == rhs[key]
