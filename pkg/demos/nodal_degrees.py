"""
Degrees of functionals on P^1 and on a nodal curve
==================================================

On P^1 every functional on sections of L^d factors through a divisor of
degree at most (de-b)/2 + 1.  On two lines glued at a point, divisors kept
off the node are not always enough.
"""

import numpy as np

from ffcircle.circle import circle_setup, degree_table
from ffcircle.grid import GridPoint

for curve in ("P1", "nodal"):
    pt = GridPoint(p=2, k=1, d=2, n=1, e=2, b=0, curve=curve)
    setup = circle_setup(*pt.build())
    deg = degree_table(setup)
    bound = (pt.d * pt.e - pt.b) / 2 + 1
    hist = np.bincount(deg)
    print(pt.label(), " degree histogram:", hist.tolist(), " bound:", bound,
          " over bound:", int((deg > bound).sum()))

# the residue path gives the same degrees on P^1
pt = GridPoint(3, 1, 2, 1, 2, 1, "P1")
setup = circle_setup(*pt.build())
same = np.array_equal(degree_table(setup), degree_table(setup, method="residue"))
print(pt.label(), " residue and vanishing degrees agree:", same)
