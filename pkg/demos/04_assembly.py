"""Assembling generating series: fiber classes, E8 theta, corrections and the anomaly residual."""

from qjfock.assembly import (FiberInput, GWKey, bold_g, dt_correction, e8_theta, fiber_class_series,
                             hae_residual_g0n3, hae_terms, lagrangian_two_point, synthetic_hae_table,
                             two_point_correction)
from qjfock.genpoly import expand
from qjfock.series import to_laurent

# fiber class series with only an r = 0 input is 24 G4 up to a constant
v = fiber_class_series(FiberInput(0, 3, 24), 8, (0, 0))
print("fiber series:", [str(v.c(d, 0)) for d in range(5)])

# E8(-2) theta by counting lattice vectors
th = e8_theta(8, 2)
print("E8(2) theta:", [str(th.q_coeff(d)) for d in range(9)])

print("bold G =", bold_g())
for n in (2, 3):
    f = lagrangian_two_point(n)
    print(f"Lagrangian two-point, n={n}:", f, " weight", f.weight)
print("two-point correction n=2:", two_point_correction(2))
print("dt correction n=2:", dt_correction(2, 1, 4))

# the anomaly residual vanishes on a consistent synthetic table...
lams = [[(1, "W"), (1, "1")], [(1, "F"), (1, "1")], [(1, "pt"), (1, "1")]]
table, _ = synthetic_hae_table(lams, 2, 6, seed=0)
print("residual:", hae_residual_g0n3(table, lams, 2, 6, (-4, 4)).is_zero())

# ...and localises a single corrupted entry
_, rhs = hae_terms(lams, 2)
key = GWKey(0, 2, "prim", 3, 1, sorted(rhs)[-1])
table.set(key, table.get(key, default_zero=True) + 1)
res = hae_residual_g0n3(table, lams, 2, 6, (-4, 4))
print("after corruption:", dict(res.coeffs))
