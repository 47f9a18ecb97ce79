import pytest
from hypothesis import given, strategies as st

from ffcircle.counting import (
    CountResult,
    EquationSpec,
    brute_force_count,
    count_by_jets,
    count_slope,
    naive_count,
    nodal_fiber_product_count,
)
from ffcircle.curve import ClosedPoint, CurveModel, DivisorSpec, LineBundleSpec, Node, Section
from ffcircle.errors import BudgetExceeded, IdentityViolation, InconsistentSlope, ValidationError
from ffcircle.field import make_field
from ffcircle.grid import GridPoint, compatible_values


def _small_point():
    return st.builds(
        GridPoint,
        p=st.sampled_from([2, 3]),
        k=st.just(1),
        d=st.integers(1, 3),
        n=st.integers(1, 2),
        e=st.integers(0, 1),
        b=st.integers(0, 1),
        curve=st.sampled_from(["P1", "nodal"]),
    ).filter(lambda g: not (g.curve == "nodal" and g.e < g.b))


@given(pt=_small_point())
def test_kernel_matches_naive_enumeration(pt):
    C, L, B, jets, eq = pt.build()
    fast = brute_force_count(C, L, B, jets, eq).count
    assert fast == naive_count(C, L, B, jets, eq)


def test_known_counts():
    F3 = make_field(3)
    C = CurveModel.P1(F3)
    eq = EquationSpec.fermat(2, 2)
    assert brute_force_count(C, LineBundleSpec((1,)), None, None, eq).count == 33
    # x + y = 0 on constants: q solutions
    assert brute_force_count(C, LineBundleSpec((0,)), None, None, EquationSpec.fermat(1, 1)).count == 3


def test_workers_do_not_change_count():
    F = make_field(3)
    C = CurveModel.P1(F)
    eq = EquationSpec.fermat(2, 2)
    a = brute_force_count(C, LineBundleSpec((1,)), None, None, eq, workers=1).count
    b = brute_force_count(C, LineBundleSpec((1,)), None, None, eq, workers=2).count
    assert a == b


def test_explicit_equation_matches_naive():
    F = make_field(3)
    C = CurveModel.P1(F)
    L = LineBundleSpec((1,))
    # x^2 + x y + 2 z^2, not diagonal
    eq = EquationSpec("explicit", 2, 3, (((2, 0, 0), 1), ((1, 1, 0), 1), ((0, 0, 2), 2)))
    assert eq.diagonal() is None
    assert brute_force_count(C, L, None, None, eq).count == naive_count(C, L, None, None, eq)


def test_explicit_diagonal_is_detected():
    eq = EquationSpec("explicit", 3, 2, (((3, 0), 1), ((0, 3), 2)))
    assert eq.diagonal() == [1, 2]


def test_extension_count_over_f4_equals_field_count():
    F2 = make_field(2)
    C = CurveModel.P1(F2)
    L = LineBundleSpec((1,))
    eq = EquationSpec.fermat(2, 1)
    ext = brute_force_count(C, L, None, None, eq, ext_degree=2).count
    direct = brute_force_count(CurveModel.P1(make_field(2, 2)), L, None, None, eq).count
    assert ext == direct


def test_rational_constraint_and_lifts():
    F = make_field(3)
    C = CurveModel.P1(F)
    L = LineBundleSpec((2,))
    B = DivisorSpec(((0, ClosedPoint.rational(F, 1), 1),))
    eq = EquationSpec.fermat(2, 2)
    vals = compatible_values(F, 2, 3)
    jets = [[[v]] for v in vals]
    a = brute_force_count(C, L, B, jets, eq)
    # a different lift of the same jets: add t - 1 times something
    lifts = [Section(F, (2,), (v, 0, 0)) for v in vals]
    shifted = [Section(F, (2,), (int(F.add[v, 2]), 1, 0)) for v in vals]
    assert brute_force_count(C, L, B, None, eq, lifts=lifts).count == a.count
    assert brute_force_count(C, L, B, None, eq, lifts=shifted).count == a.count
    assert a.b == 1 and a.exponent == 2 * (3 - 2) + 2 - 2


def test_budget_and_validation():
    F = make_field(3)
    C = CurveModel.P1(F)
    eq = EquationSpec.fermat(2, 3)
    with pytest.raises(BudgetExceeded):
        brute_force_count(C, LineBundleSpec((2,)), None, None, eq, budget=100)
    with pytest.raises(ValidationError):
        brute_force_count(C, LineBundleSpec((1,)), DivisorSpec(((0, ClosedPoint.infinity(), 1),)), None, eq)


def test_count_result_ratio():
    r = CountResult(count=33, q=3, k=1, d=2, n=2, e=1, b=0, g=0)
    assert r.exponent == 3
    assert r.ratio == pytest.approx(33 / 27)


def _cr(count, k, q=2):
    return CountResult(count, q, k, 1, 1, 0, 0, 0)


def test_count_slope():
    est = count_slope([_cr(2**3, 1), _cr(2**6, 2)])
    assert est.dim_estimate == 3 and est.leading_coeff == 1 and est.irreducible_hint
    bad = [_cr(2**3, 1), _cr(2**6, 2), _cr(2**12, 3)]
    assert count_slope(bad).flagged
    with pytest.raises(InconsistentSlope):
        count_slope(bad, strict=True)
    with pytest.raises(ValidationError):
        count_slope([_cr(4, 1)])
    with pytest.raises(ValidationError):
        count_slope([_cr(4, 1), _cr(0, 2)])


# -- gluing ----------------------------------------------------------------------

def _gluing_cases(F):
    z, inf = ClosedPoint.rational(F, 0), ClosedPoint.infinity()
    P1 = CurveModel.P1(F)
    return {
        "one_node": (P1, (1,), [(0, z)], P1, (1,), [(0, z)], [(0, 0)],
                     CurveModel(F, 2, (Node(0, z, 1, z),)), (1, 1)),
        "self_node": (P1, (2,), [(0, z), (0, inf)], None, None, None, [(0, 1)],
                      CurveModel(F, 1, (Node(0, z, 0, inf),)), (2,)),
        "two_node": (P1, (1,), [(0, z), (0, inf)], P1, (1,), [(0, z), (0, inf)], [(0, 0), (1, 1)],
                     CurveModel(F, 2, (Node(0, z, 1, z), Node(0, inf, 1, inf))), (1, 1)),
    }


@pytest.mark.parametrize("kind", ["one_node", "self_node", "two_node"])
@pytest.mark.parametrize("d", [1, 2])
def test_fiber_product_matches_direct(kind, d):
    F = make_field(2)
    lc, ld, lp, rc, rd, rp, pairs, glued, gd = _gluing_cases(F)[kind]
    eq = EquationSpec.fermat(d, 2)
    left = count_by_jets(lc, LineBundleSpec(ld), lp, eq)
    right = count_by_jets(rc, LineBundleSpec(rd), rp, eq) if rc is not None else None
    direct = brute_force_count(glued, LineBundleSpec(gd), None, None, eq)
    res = nodal_fiber_product_count(left, right, pairs, direct=direct)
    assert res.count == direct.count
    assert res.g == glued.genus


def test_fiber_product_mismatch_raises():
    F = make_field(2)
    lc, ld, lp, rc, rd, rp, pairs, glued, gd = _gluing_cases(F)["one_node"]
    eq = EquationSpec.fermat(2, 1)
    left = count_by_jets(lc, LineBundleSpec(ld), lp, eq)
    fake = CountResult(0, 2, 1, 2, 1, 2, 0, 0)
    with pytest.raises(IdentityViolation):
        nodal_fiber_product_count(left, left, pairs, direct=fake)
    with pytest.raises(ValidationError):
        nodal_fiber_product_count(left, left, [])


def test_jet_table_total_is_global_count():
    F = make_field(3)
    C = CurveModel.P1(F)
    eq = EquationSpec.fermat(2, 1)
    t = count_by_jets(C, LineBundleSpec((1,)), [(0, ClosedPoint.rational(F, 0))], eq)
    assert t.total == brute_force_count(C, LineBundleSpec((1,)), None, None, eq).count


@pytest.mark.parametrize("p", [3, 5])
def test_quaternary_quadric_counts_isotropic_pairs(p):
    from oracles import isotropic_pair_count

    F = make_field(p)
    r = brute_force_count(CurveModel.P1(F), LineBundleSpec((1,)), None, None, EquationSpec.fermat(2, 3))
    assert r.count == isotropic_pair_count(p)


def test_quaternary_quadric_has_two_top_components():
    # sum x_i^2 with x_i linear: two rulings of isotropic planes, so N / q^5 tends to 2
    for p, k in [(3, 1), (5, 1), (7, 1), (3, 2)]:
        F = make_field(p, k)
        r = brute_force_count(CurveModel.P1(F), LineBundleSpec((1,)), None, None, EquationSpec.fermat(2, 3))
        assert abs(float(r.ratio) - 2) <= 3 * F.q**-0.5
