"""
A count whose leading coefficient is 2
======================================

For x_i = a_i + b_i t the equation sum x_i^2 = 0 in four variables says that
a and b span an isotropic subspace of a split quadratic form.  Such planes
come in two families, so the count is about 2 q^5 rather than q^5.
"""

from ffcircle import CurveModel, EquationSpec, LineBundleSpec, make_field
from ffcircle.counting import brute_force_count, count_slope

eq = EquationSpec.fermat(2, 3)
for p, k in [(3, 1), (5, 1), (7, 1), (3, 2)]:
    F = make_field(p, k)
    r = brute_force_count(CurveModel.P1(F), LineBundleSpec((1,)), None, None, eq)
    print(f"q={F.q}  N={r.count}  N/q^5={float(r.ratio):.4f}  3/sqrt(q)={3 * F.q ** -0.5:.4f}")

# the slope over F_3 and F_9 still sees dimension 5
counts = [brute_force_count(CurveModel.P1(make_field(3)), LineBundleSpec((1,)), None, None, eq, ext_degree=k)
          for k in (1, 2)]
est = count_slope(counts)
print("dimension from F_3, F_9:", est.dim_estimate, " leading coefficient:", float(est.leading_coeff))
