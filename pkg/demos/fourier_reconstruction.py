"""
Counting solutions by summing over the circle
=============================================

Brute force and the Fourier sum over functionals give the same integer.
"""

from ffcircle import CurveModel, EquationSpec, LineBundleSpec, make_field
from ffcircle.circle import arc_sums, circle_setup, degree_table, fourier_sweep
from ffcircle.counting import brute_force_count

# x0^2 + x1^2 + x2^2 = 0 with each x_i a polynomial of degree <= 1 over F_3
F = make_field(3)
C = CurveModel.P1(F)
L = LineBundleSpec((1,))
eq = EquationSpec.fermat(2, 2)

direct = brute_force_count(C, L, None, None, eq)
print("brute force:", direct.count, " ratio to q^3:", float(direct.ratio))

# one product of exponential sums per functional on sections of L^2
setup = circle_setup(C, L, None, None, eq)
sweep = fourier_sweep(setup)
print("functionals:", setup.dual_size, " Fourier count:", sweep.count)
print("alpha = 0 term:", sweep.zero_term, "= q^((n+1)(e+1)) =", 3 ** (3 * 2))

# split the sum by the degree of each functional
deg = degree_table(setup)
arcs = arc_sums(sweep, deg)
print("major functionals:", arcs.major_count, " minor:", arcs.minor_count)
print("normalized major term:", arcs.normalized_major)

# the same identity over F_4 = F_2[x]/(x^2+x+1)
F4 = make_field(2, 2)
s4 = circle_setup(CurveModel.P1(F4), L, None, None, eq)
print("F_4:", fourier_sweep(s4).count, "==", brute_force_count(CurveModel.P1(F4), L, None, None, eq).count)
