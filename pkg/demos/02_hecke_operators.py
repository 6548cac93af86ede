"""Formal Hecke operators, wrong-weight decompositions and multiple-cover lifts."""

from qjfock.assembly import multiple_cover_lift
from qjfock.generators import eisenstein
from qjfock.genpoly import GenPoly, expand
from qjfock.hecke import HeckeSpec, apply_decomposition, hecke_ah, hecke_formal, mobius_decomposition
from qjfock.qjacobi import ah_completion
from qjfock.series import to_laurent

q = 12

# T_{4,2} on G2: G2 has weight 2, so this is a wrong-weight operator
g2 = to_laurent(eisenstein(2, 2 * q + 2), (0, 0))
t = hecke_formal(g2, HeckeSpec(4, 2), qmax=q)
print("T_{4,2} G2:", [str(t.c(d, 0)) for d in range(6)])

# the same thing as a combination of B_e T_{2,d}
for e, c, d in mobius_decomposition(4, 2, 2):
    print(f"  {c} * B_{e} T_{{2,{d}}}")
print("decomposition agrees:", t.equals(apply_decomposition(g2, 4, 2, 2, q)))

# on the almost-holomorphic side the nu-coefficient is a constant
ah = hecke_ah(ah_completion(GenPoly.gen("G2"), 2 * q), HeckeSpec(4, 2))
print("(1,0) entry:", [str(ah[(1, 0)].q_coeff(d)) for d in range(4)])

# Hecke on a Jacobi-type series: -Theta^2/Delta under the degree-2 lift
f = to_laurent(expand(GenPoly.monomial(-1, Theta=2, Delta_inv=1), 4 * q), (-12, 12))
lifted = multiple_cover_lift(f, -10, 1, 2)
print("lift at (q^-2, p^2):", lifted.c(-2, 2), " at (q^-2, p^1):", lifted.c(-2, 1))
