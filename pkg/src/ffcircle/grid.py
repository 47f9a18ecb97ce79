"""Standard experiment configurations and per-configuration runners.

The two reference curves are P^1 and two copies of P^1 glued at t = 0.  A
bundle of total degree e on the nodal curve is split as evenly as possible
with the extra degree on the first component.  With b = 1 the constraint is
the rational point t = 1 on the first component, and the prescribed values
there are the lexicographically first nonzero vector (v_0, ..., v_n) with
sum v_i^d = 0 (or zero when no such vector exists), so the count is never
trivially empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .circle import arc_sums, circle_setup, degree_table, fourier_sweep
from .counting import EquationSpec, brute_force_count
from .curve import ClosedPoint, CurveModel, DivisorSpec, LineBundleSpec, Node
from .errors import IdentityViolation
from .field import FieldSpec, make_field


def reference_curve(kind: str, F: FieldSpec) -> CurveModel:
    if kind == "P1":
        return CurveModel.P1(F)
    if kind == "nodal":
        z = ClosedPoint.rational(F, 0)
        return CurveModel(F, 2, (Node(0, z, 1, z),))
    raise ValueError(f"unknown reference curve {kind!r}")


def split_degrees(curve: CurveModel, e: int) -> tuple[int, ...]:
    c = curve.n_components
    return tuple(e // c + (1 if i < e % c else 0) for i in range(c))


def reference_divisor(F: FieldSpec, b: int) -> DivisorSpec | None:
    if b == 0:
        return None
    if b != 1:
        raise ValueError("reference configurations use b in {0, 1}")
    return DivisorSpec(((0, ClosedPoint.rational(F, 1), 1),))


def compatible_values(F: FieldSpec, d: int, n_plus_1: int, coeffs=None) -> tuple[int, ...]:
    """Lexicographically first nonzero v with sum c_i v_i^d = 0, else zero."""
    coeffs = coeffs or [1] * n_plus_1
    pw = np.array([F.power(x, d) for x in range(F.q)], dtype=np.int32)
    for v in product(range(F.q), repeat=n_plus_1):
        if not any(v):
            continue
        acc = 0
        for c, x in zip(coeffs, v):
            acc = int(F.add[acc, F.mul[c, pw[x]]])
        if acc == 0:
            return tuple(v)
    return (0,) * n_plus_1


@dataclass(frozen=True)
class GridPoint:
    p: int
    k: int
    d: int
    n: int
    e: int
    b: int
    curve: str

    @property
    def q(self) -> int:
        return self.p**self.k

    def build(self, jets_override=None):
        F = make_field(self.p, self.k)
        C = reference_curve(self.curve, F)
        L = LineBundleSpec(split_degrees(C, self.e))
        B = reference_divisor(F, self.b)
        eq = EquationSpec.fermat(self.d, self.n)
        jets = None
        if B is not None:
            vals = jets_override or compatible_values(F, self.d, self.n + 1)
            jets = [[[v]] for v in vals]
        return C, L, B, jets, eq

    def label(self) -> str:
        return f"q={self.q} d={self.d} n={self.n} e={self.e} b={self.b} {self.curve}"


def acceptance_grid(qs=((2, 1), (3, 1), (2, 2), (5, 1)), ds=(1, 2, 3), ns=(1, 2, 3), es=(0, 1, 2),
                    bs=(0, 1), curves=("P1", "nodal")) -> list[GridPoint]:
    return [GridPoint(p, k, d, n, e, b, c) for (p, k), d, n, e, b, c in product(qs, ds, ns, es, bs, curves)]


def run_point(pt: GridPoint, with_degrees: bool = False, budget: int | None = None) -> dict:
    """Brute force, Fourier reconstruction and (optionally) the arc split for one configuration."""
    C, L, B, jets, eq = pt.build()
    direct = brute_force_count(C, L, B, jets, eq, budget=budget)
    setup = circle_setup(C, L, B, jets, eq)
    sweep = fourier_sweep(setup, budget=budget)
    if sweep.count != direct.count:
        raise IdentityViolation(f"{pt.label()}: Fourier {sweep.count} != brute force {direct.count}")
    row = {
        "q": pt.q, "d": pt.d, "n": pt.n, "e": pt.e, "b": pt.b, "curve": pt.curve, "g": setup.g,
        "count": direct.count, "fourier": sweep.count, "zero_term": sweep.zero_term,
        "expected_zero_term": pt.q ** ((pt.n + 1) * (pt.e - pt.b + 1 - setup.g)),
        "ratio": direct.ratio, "dual_size": setup.dual_size,
    }
    if with_degrees:
        deg = degree_table(setup, budget=budget)
        arcs = arc_sums(sweep, deg)
        row.update({
            "max_degree": int(deg.max()),
            "degree_bound": (pt.d * pt.e - pt.b) / 2 + 1,
            "major_count": arcs.major_count,
            "minor_count": arcs.minor_count,
            "normalized_major": arcs.normalized_major,
            "normalized_minor_abs": arcs.normalized_minor_abs,
        })
    return row
