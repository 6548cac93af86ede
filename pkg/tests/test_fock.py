import functools
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles
from qjfock.errors import DimensionMismatch, UnknownOperator, UnsupportedClass
from qjfock.fock import (FockVector, K3Model, LLVElement, WeightedPartition, act, basis, class_of_partition,
                         commutator, contract, cup_product, curve_class, delta_class, dual_partition, divisor_class, gradings,
                         kunneth_diagonal, llv_bracket, llv_operator, monodromy, nakajima_apply, op_e_alpha,
                         op_e_delta, op_h, op_T_alpha, op_T_delta, op_U, op_Wt, pairing, u_class, unit_class,
                         wt_of_vector)

MODEL = K3Model.default()
VAC = FockVector.vacuum()
mono = FockVector.monomial
wedge = LLVElement.wedge


# model ---------------------------------------------------------------------
def test_model_gram():
    labels = MODEL.labels
    assert len(labels) == 24
    assert MODEL.pair("W", "F") == 1 and MODEL.pair("W", "W") == 0 and MODEL.pair("F", "F") == 0
    assert MODEL.pair("1", "pt") == 1 and MODEL.pair("1", "1") == 0
    h2 = [lab for lab in labels if MODEL.degree(lab) == 1]
    for a in h2:
        assert MODEL.pair(a, a) % 2 == 0
        for b in h2:
            assert MODEL.pair(a, b) == MODEL.pair(b, a)
    assert [MODEL.wt(x) for x in ("1", "pt", "W", "F", "b1")] == [-1, 1, 1, -1, 0]


def test_basis_dimensions_match_generating_function():
    for n in range(1, 4):
        assert len(basis(n)) == oracles.weighted_partition_count(n)


# Nakajima operators --------------------------------------------------------
def test_creation_on_vacuum():
    assert nakajima_apply(1, "1", VAC) == unit_class(1)


def test_annihilation_examples():
    # [q_k(a), q_l(b)] = k (a, b) delta_{k+l, 0}, so k = -2 contributes -2 (W, F)
    assert nakajima_apply(-2, "F", nakajima_apply(2, "W", VAC)) == VAC.scale(-2)
    v = mono([(1, "1"), (1, "W")])
    assert nakajima_apply(-1, "pt", v) == mono([(1, "W")]).scale(-1)
    assert nakajima_apply(-3, "pt", VAC).is_zero()


def test_multilinearity_in_class():
    v = mono([(1, "pt")])
    both = nakajima_apply(2, {"W": 2, "F": -1}, v)
    assert both == nakajima_apply(2, "W", v).scale(2) - nakajima_apply(2, "F", v)


@given(st.integers(-3, 3).filter(bool), st.integers(-3, 3).filter(bool),
       st.sampled_from(["1", "pt", "W", "F", "b3", "b7"]), st.sampled_from(["1", "pt", "W", "F", "b3", "b4"]),
       st.integers(0, 10 ** 6))
def test_heisenberg_relation(k, l, a, b, seed):
    rng = random.Random(seed)
    lo = max(0, -k, -l, -(k + l))
    assume(lo <= 4)
    n = rng.randint(lo, 4)
    v = FockVector(n, {_random_partition(rng, n): rng.randint(1, 3) for _ in range(3)})
    lhs = nakajima_apply(k, a, nakajima_apply(l, b, v)) - nakajima_apply(l, b, nakajima_apply(k, a, v))
    expected = v.scale(k * MODEL.pair(a, b)) if k + l == 0 else FockVector(n + k + l)
    assert lhs == expected


def _random_partition(rng, n):
    parts, left = [], n
    while left:
        p = rng.randint(1, left)
        parts.append((p, rng.choice(MODEL.labels)))
        left -= p
    return WeightedPartition(parts)


# pairing -------------------------------------------------------------------
def test_pairing_examples():
    assert pairing(mono([(2, "pt")]), mono([(2, "1")])) == -2
    mu = WeightedPartition([(2, "pt"), (1, "pt")])
    dual = WeightedPartition([(2, "1"), (1, "1")])
    assert pairing(class_of_partition(mu), class_of_partition(dual)) == Fraction(-1, 2)
    x = mono([(1, "W"), (1, "F")])
    assert pairing(x, x) == 1


def test_pairing_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        pairing(unit_class(1), unit_class(2))


def test_dual_basis_formula():
    rng = random.Random(2)
    for mu in rng.sample(basis(3), 40):
        want = Fraction((-1) ** (3 + mu.length) * mu.aut(), mu.prod_parts())
        assert pairing(class_of_partition(mu), dual_partition(mu)) == want


@given(st.integers(0, 10 ** 6))
def test_pairing_symmetric(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    b = basis(n)
    v = FockVector(n, {k: rng.randint(-3, 3) for k in rng.sample(b, 4)})
    w = FockVector(n, {k: rng.randint(-3, 3) for k in rng.sample(b, 4)})
    assert pairing(v, w) == pairing(w, v)


# gradings ------------------------------------------------------------------
def test_gradings_examples():
    for n in (1, 2, 3):
        deg, wt, wf, length = gradings(WeightedPartition([(1, "1")] * n))
        assert (deg, length) == (0, n)
        deg, wt, wf, length = gradings(WeightedPartition([(1, "F")] * n))
        assert (wt, wf) == (-n, -n)
    assert gradings(WeightedPartition([(2, "1"), (1, "1")]))[0] == 1
    assert delta_class(3) == mono([(2, "1"), (1, "1")]).scale(Fraction(-1, 2))


def test_class_of_partition_normalisation():
    mu = WeightedPartition([(3, "W"), (2, "pt"), (2, "pt")])
    assert class_of_partition(mu) == FockVector(7, {mu: Fraction(1, 12)})


def test_partition_json_roundtrip_examples():
    mu = WeightedPartition([(2, "F"), (1, "pt")])
    assert mu.to_json() == [{"part": 2, "class": "F"}, {"part": 1, "class": "pt"}]
    assert WeightedPartition.from_json([{"part": 1, "class": "pt"}, {"part": 2, "class": "F"}]) == mu


@given(st.lists(st.tuples(st.integers(1, 4), st.sampled_from(MODEL.labels)), max_size=5))
def test_partition_json_roundtrip(parts):
    mu = WeightedPartition(parts)
    assert WeightedPartition.from_json(mu.to_json()) == mu
    v = FockVector(mu.n, {mu: Fraction(3, 7)})
    assert FockVector.from_json(v.to_json()) == v


# LLV operators -------------------------------------------------------------
def test_llv_operator_examples():
    for n in (1, 2, 3):
        f_n = mono([(1, "F")] * n)
        assert op_Wt()(f_n) == f_n.scale(-n)
        pts = mono([(1, "pt")] * n)
        assert op_U()(pts) == mono([(1, "F")] + [(1, "pt")] * (n - 1)).scale(n)


def test_h_eigenvalues():
    h = op_h()
    for n in (1, 2):
        for mu in basis(n):
            eig = gradings(mu)[0] - n
            assert h.column(mu) == ({mu: Fraction(eig)} if eig else {})


def test_llv_operator_errors():
    with pytest.raises(UnknownOperator):
        llv_operator("bogus")
    with pytest.raises(UnsupportedClass):
        llv_operator("f_delta")
    with pytest.raises(UnsupportedClass):
        llv_operator("e_alpha")


def test_commutator_examples_n2():
    U = op_U()
    assert commutator(op_e_alpha("W"), U).equals(op_Wt(), 2)
    assert commutator(op_e_delta(), U).equals(op_T_delta(), 2)
    assert commutator(op_e_alpha("W"), op_e_alpha("b5")).is_zero(2)
    assert commutator(op_e_alpha("F"), op_e_delta()).is_zero(2)


def test_wt_diagonal_and_t_alpha_weight():
    Wt = op_Wt()
    for mu in basis(2):
        col = Wt.column(mu)
        assert set(col) <= {mu}
        assert -2 <= col.get(mu, 0) <= 2
        assert col.get(mu, 0) == gradings(mu)[1]
    for alpha in ("b2", "b11"):
        T = op_T_alpha(alpha)
        assert commutator(Wt, T).equals(T.scale(-1), 2)


def test_u_self_adjoint():
    U = op_U()
    rng = random.Random(4)
    b = basis(2)
    for _ in range(10):
        v = FockVector(2, {k: rng.randint(-2, 2) for k in rng.sample(b, 5)})
        w = FockVector(2, {k: rng.randint(-2, 2) for k in rng.sample(b, 5)})
        assert pairing(U(v), w) == pairing(v, U(w))


def test_cup_product_weight_multiplicative():
    n = 2
    for a in ("W", "F", "b1", "1"):
        g1 = divisor_class(a, n) if a != "1" else unit_class(n)
        w1 = wt_of_vector(g1)
        for mu in basis(n):
            prod = cup_product(g1, FockVector(n, {mu: 1}))
            if not prod.is_zero():
                assert wt_of_vector(prod) == n + w1 + gradings(mu)[1]


def test_cup_product_commutes_and_fujiki():
    x, y = divisor_class("W", 2), divisor_class("b3", 2)
    assert cup_product(x, y) == cup_product(y, x)
    ed, one = op_e_delta(), unit_class(2)
    assert pairing(ed(ed(ed(ed(one)))), one) == 12
    with pytest.raises(UnsupportedClass):
        cup_product(mono([(1, "pt"), (1, "pt")]), mono([(1, "pt"), (1, "pt")]))


# LLV algebra ---------------------------------------------------------------
def test_llv_bracket_examples():
    lhs = llv_bracket(wedge("e", "f") + wedge("W", "F"), wedge("F", "f"), 2)
    assert lhs == wedge("F", "f").scale(-2)
    assert llv_bracket(wedge("e", "b1"), wedge("e", "b2"), 2).is_zero()
    assert wedge("F", "W") == wedge("W", "F").scale(-1)


LLV_LABELS = ["e", "f", "W", "F", "delta", "b1", "b2", "b9"]


@st.composite
def llv_elements(draw):
    out = LLVElement()
    for _ in range(draw(st.integers(1, 3))):
        a, b = draw(st.lists(st.sampled_from(LLV_LABELS), min_size=2, max_size=2, unique=True))
        out = out + wedge(a, b).scale(draw(st.integers(-3, 3)))
    return out


@given(llv_elements(), llv_elements(), llv_elements(), st.integers(1, 4))
def test_jacobi_identity(x, y, z, n):
    def br(a, b):
        return llv_bracket(a, b, n)
    assert (br(x, br(y, z)) + br(y, br(z, x)) + br(z, br(x, y))).is_zero()


def test_action_is_lie_homomorphism_n2():
    gens = [wedge("e", "W"), wedge("e", "b1"), wedge("F", "f"), wedge("e", "f"), wedge("delta", "F"),
            wedge("e", "delta")]
    for i, x in enumerate(gens):
        for y in gens[i + 1:]:
            assert commutator(act(x), act(y)).equals(act(llv_bracket(x, y, 2)), 2)


def test_lefschetz_triple_w_plus_f():
    a = {"W": 1, "F": 1}
    comm = commutator(act(wedge("e", a)), act(wedge(a, "f")))
    assert comm.equals(op_h().scale(2), 2)


# monodromy -----------------------------------------------------------------
def test_involution_example_and_sign_law():
    inv = monodromy("involution")
    v = mono([(2, "pt")])
    assert inv(v) == v.scale(-1)
    for n in (1, 2):
        for mu in basis(n):
            assert inv.column(mu) == {mu: Fraction((-1) ** (n + mu.length))}


def test_shift_curve_classes_n2():
    n, S = 2, monodromy("shift", lam=1)
    for d in range(-1, 3):
        for r in range(-2, 3):
            src = curve_class("W", 0, n) + curve_class("F", 0, n).scale(d) + curve_class({}, r, n)
            want = curve_class("W", 0, n) + curve_class("F", 0, n).scale(d - r + 1) + curve_class({}, r - 2, n)
            assert S(src) == want


def test_shift_zero_identity():
    S = monodromy("shift", lam=0)
    for mu in basis(2)[:50]:
        assert S.column(mu) == {mu: 1}


@given(st.integers(-2, 2), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_shift_is_isometry(lam, n, seed):
    rng = random.Random(seed)
    S = monodromy("shift", lam=lam)
    b = basis(n)
    v = FockVector(n, {k: rng.randint(-2, 2) for k in rng.sample(b, 3)})
    w = FockVector(n, {k: rng.randint(-2, 2) for k in rng.sample(b, 3)})
    assert pairing(S(v), S(w)) == pairing(v, w)


# Kunneth and U-class ---------------------------------------------------------
def test_kunneth_counts():
    assert len(kunneth_diagonal(1)) == 24
    terms = kunneth_diagonal(2)
    assert len(terms) == 324
    assert sum(1 for _, mu, _ in terms if mu.length == 1) == 24
    assert sum(1 for _, mu, _ in terms if mu.length == 2) == 300


@functools.lru_cache(maxsize=None)
def _diagonal(n):
    return kunneth_diagonal(n)


@settings(max_examples=10)
@given(st.integers(1, 3), st.integers(0, 10 ** 6))
def test_kunneth_contraction(n, seed):
    rng = random.Random(seed)
    terms = _diagonal(n)
    g = FockVector(n, {k: rng.randint(-3, 3) for k in rng.sample(basis(n), 3)})
    assert contract(terms, g) == g


def test_u_class_n1():
    assert contract(u_class(1), mono([(1, "pt")])) == mono([(1, "F")])


def test_u_class_weights():
    for n in (1, 2):
        for _, left, right in u_class(n):
            assert wt_of_vector(left) + wt_of_vector(right) == -2


def test_u_class_matches_operator_n2():
    U, terms = op_U(), u_class(2)
    for mu in basis(2):
        v = FockVector(2, {mu: 1})
        assert contract(terms, v) == U(v)
