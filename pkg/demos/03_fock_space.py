"""The Fock space H*(S^[n]) in the Nakajima basis and the LLV operators on it."""

from qjfock.fock import (FockVector, basis, commutator, curve_class, gradings, monodromy, nakajima_apply,
                         op_e_alpha, op_e_delta, op_T_delta, op_U, op_Wt, pairing)

for n in range(1, 4):
    print(f"n = {n}: {len(basis(n))} basis vectors")

v = FockVector.monomial([(1, "W"), (1, "F")])
mu = next(iter(v.terms))
print("v =", v, " (deg, wt, deg_WF, length) =", gradings(mu))

# positive modes create, negative modes annihilate
w = nakajima_apply(1, "pt", v)
print("q_1(pt) v =", w)
print("q_{-1}(1) q_1(pt) v =", nakajima_apply(-1, "1", w))

# the intersection pairing on the dual basis
print("<q_1(pt) q_1(1), q_1(pt) q_1(1)> =", pairing(FockVector.monomial([(1, "pt"), (1, "1")]),
                                                      FockVector.monomial([(1, "pt"), (1, "1")])))

# a few LLV relations as operator identities on the whole n = 2 space
U, Wt = op_U(), op_Wt()
print("[e_W, U] = Wt:", commutator(op_e_alpha("W"), U).equals(Wt, 2))
print("[e_delta, U] = T_delta:", commutator(op_e_delta(), U).equals(op_T_delta(), 2))

# the shift monodromy acts on curve classes W + dF + rA
S = monodromy("shift", lam=1)
src = curve_class("W", 0, 2) + curve_class("F", 0, 2).scale(3) + curve_class({}, 1, 2)
print("shift(W + 3F + A) =", S(src))
