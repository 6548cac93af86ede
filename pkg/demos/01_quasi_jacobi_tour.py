"""A short walk through the quasi-Jacobi ring: expansions, anomalies, reconstruction."""

from qjfock.genpoly import GenPoly, expand
from qjfock.qjacobi import anomaly, dx_symbolic, fit_jacobi_ansatz, reconstruct
from qjfock.series import FourierSeries, dx, to_laurent

G = GenPoly.gen

# Theta starts as p^(1/2) - p^(-1/2); its square is the weight -2 index 1 form
theta2 = G("Theta", 2)
print("Theta^2 =", theta2, " weight", theta2.weight, " index2", theta2.index2)
print(to_laurent(expand(theta2, 3), (-3, 3)))

# A is the logarithmic x-derivative of Theta; check A * Theta = D_x Theta
th = expand(G("Theta"), 8)
lhs = to_laurent(expand(G("A"), 8) * th, (-4, 4))
print("A Theta == D_x Theta:", lhs.equals(to_laurent(dx(th), (-4, 4))))

# anomaly operators act formally on polynomials
f = G("A", 2) * G("Theta", 2) + G("G2") * G("wp")
print("d/dG2 :", anomaly(f, "G2"))
print("d/dA  :", anomaly(f, "A"))
print("D_x   :", dx_symbolic(G("Theta", 2)))

# an elliptic index-2 series splits into coefficients of Theta^4 wp^i, i <= 2
c = FourierSeries.from_q([1, 2, -1, 0, 3, 0, 0, 1, 0, 0, 2], 10)
series = expand(G("Theta", 4) * (G("wp") * 3 + G("wp", 2) * 5), 10) * c
rec = reconstruct(series, 2, "even")
for i, c in sorted(rec.coefficients.items()):
    print(f"coefficient of Theta^4 wp^{i}:", [str(c.q_coeff(d)) for d in range(6)])

# -Theta^2/Delta sits in the two-dimensional index-1 ansatz space
fit = fit_jacobi_ansatz(expand(GenPoly.monomial(-1, Theta=2, Delta_inv=1), 12), 2)
for key, c in sorted(fit.coefficients.items()):
    if not c.is_zero():
        print("ansatz slot", key, "->", [str(c.q_coeff(d)) for d in range(3)])
