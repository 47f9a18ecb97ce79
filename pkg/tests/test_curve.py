from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ffcircle.curve import (
    ClosedPoint,
    CurveModel,
    DivisorSpec,
    LineBundleSpec,
    Node,
    Section,
    arithmetic_genus,
    closed_points,
    enumerate_sections,
    lift_jets,
    pl_divmod,
    pl_eval,
    pl_pow,
    restrict,
    section_space,
    section_table,
)
from ffcircle.errors import SpecialRange, ValidationError
from ffcircle.field import make_field


def nodal(F, n_comp=2, self_node=False):
    z, o = ClosedPoint.rational(F, 0), ClosedPoint.rational(F, 1)
    nodes = [Node(i, o if i else z, i + 1, z) for i in range(n_comp - 1)]
    if self_node:
        nodes.append(Node(0, ClosedPoint.infinity(), n_comp - 1, ClosedPoint.infinity()))
    return CurveModel(F, n_comp, tuple(nodes))


def _vanishes(F, poly, deg, pt, m):
    if pt.is_infinity:
        return all(c == 0 for c in poly[max(deg - m + 1, 0):])
    _, r = pl_divmod(F, list(poly), pl_pow(F, list(pt.poly), m))
    return not any(r)


def _brute_dim(curve, degrees, divisor):
    """Count ambient vectors satisfying the node and vanishing conditions directly."""
    F = curve.field
    off = np.cumsum([0] + [e + 1 for e in degrees])
    hits = 0
    for v in product(range(F.q), repeat=int(off[-1])):
        comps = [v[off[i]:off[i + 1]] for i in range(len(degrees))]

        def val(c, pt):
            return comps[c][-1] if pt.is_infinity else pl_eval(F, list(comps[c]), pt.rational_value(F))

        if any(val(nd.comp_a, nd.point_a) != val(nd.comp_b, nd.point_b) for nd in curve.nodes):
            continue
        if divisor and not all(_vanishes(F, comps[c], degrees[c], pt, m) for c, pt, m in divisor.points):
            continue
        hits += 1
    return hits


CASES = [
    ((2, 1), "P1", (2,), None),
    ((3, 1), "P1", (2,), ((0, "r1", 1),)),
    ((2, 1), "P1", (3,), ((0, "quad", 1),)),
    ((2, 1), "P1", (3,), ((0, "inf", 2),)),
    ((3, 1), "nodal", (1, 1), ((0, "r1", 1),)),
    ((2, 1), "nodal", (2, 1), None),
    ((2, 1), "cycle", (2, 2), None),
    ((2, 2), "P1", (1,), ((0, "r1", 1),)),
]


def _build(pk, kind, degs, div):
    F = make_field(*pk)
    C = {"P1": CurveModel.P1(F), "nodal": nodal(F), "cycle": nodal(F, 2, True)}[kind]
    pts = []
    for c, name, m in div or ():
        pt = {"r1": ClosedPoint.rational(F, 1), "inf": ClosedPoint.infinity(), "quad": ClosedPoint((1, 1, 1))}[name]
        pts.append((c, pt, m))
    return F, C, LineBundleSpec(degs), DivisorSpec(tuple(pts)) if pts else None


@pytest.mark.parametrize("case", CASES)
def test_dimension_matches_brute_force(case):
    F, C, L, B = _build(*case)
    V = section_space(C, L, B)
    b = B.degree if B else 0
    assert V.dim == L.degree - b + 1 - C.genus
    assert F.q**V.dim == _brute_dim(C, L.degrees, B)


@pytest.mark.parametrize("case", CASES)
def test_enumeration_is_the_space(case):
    F, C, L, B = _build(*case)
    V = section_space(C, L, B)
    tab = section_table(V)
    assert len({tuple(r) for r in tab}) == F.q**V.dim
    for r in tab:
        assert V.contains(r)
    secs = list(enumerate_sections(V, chunk=3))
    assert [s.coeffs for s in secs] == [tuple(int(x) for x in r) for r in tab]


def test_genus_of_dual_graphs():
    F = make_field(2)
    assert arithmetic_genus(CurveModel.P1(F)) == 0
    assert nodal(F).genus == 0
    assert nodal(F, 2, True).genus == 1
    assert nodal(F, 3, True).genus == 1


def test_invalid_curves():
    F = make_field(3)
    z = ClosedPoint.rational(F, 0)
    with pytest.raises(ValidationError):
        CurveModel(F, 2, ())
    with pytest.raises(ValidationError):
        CurveModel(F, 2, (Node(0, z, 1, z), Node(0, z, 1, ClosedPoint.infinity())))
    with pytest.raises(ValidationError):
        section_space(nodal(F), LineBundleSpec((1, 1)), DivisorSpec(((0, z, 1),)))


def test_special_range_rejected():
    F = make_field(2)
    C = nodal(F, 2, True)
    with pytest.raises(SpecialRange):
        section_space(C, LineBundleSpec((0, 0)))
    # a degree-0 component on the cycle is still non-special
    assert section_space(C, LineBundleSpec((3, 0))).dim == 3


def test_closed_point_counts():
    # monic irreducibles of degree 2 over F_q number (q^2 - q)/2
    for pk in [(2, 1), (3, 1), (5, 1), (2, 2)]:
        F = make_field(*pk)
        C = CurveModel.P1(F)
        assert len(closed_points(C, 0, 1)) == F.q + 1
        assert len(closed_points(C, 0, 2)) == (F.q**2 - F.q) // 2


@pytest.mark.parametrize("pk,deg", [((2, 1), 3), ((3, 1), 3), ((2, 2), 2)])
@given(data=st.data())
def test_lift_then_restrict_round_trip(pk, deg, data):
    F = make_field(*pk)
    C = CurveModel.P1(F)
    V = section_space(C, LineBundleSpec((deg,)))
    pts = [ClosedPoint.rational(F, 1), ClosedPoint.infinity()]
    if F.q == 2:
        pts.append(ClosedPoint((1, 1, 1)))
    B = DivisorSpec(tuple((0, pt, 1) for pt in pts[: deg]))
    coords = data.draw(st.lists(st.integers(0, F.q - 1), min_size=V.dim, max_size=V.dim))
    s = V.from_coords(coords)
    jets = restrict(s, B)
    lifted = lift_jets(V, B, jets)
    assert lifted is not None
    assert restrict(lifted, B) == jets


def test_restrict_at_infinity_is_top_coefficient():
    F = make_field(5)
    s = Section(F, (3,), (1, 2, 3, 4))
    assert int(restrict(s, DivisorSpec(((0, ClosedPoint.infinity(), 2),)))[0][0]) == 4
    assert int(restrict(s, DivisorSpec(((0, ClosedPoint.infinity(), 2),)))[0][1]) == 3
    assert s.value_at(0, ClosedPoint.rational(F, 1)) == 0


def test_section_power_and_embed():
    F = make_field(2)
    s = Section(F, (1,), (1, 1))
    assert s.power(2).coeffs == (1, 0, 1)
    E = make_field(2, 2)
    assert s.embed(E).coeffs == (1, 1)
