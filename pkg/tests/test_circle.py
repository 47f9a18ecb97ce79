import cmath

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ffcircle.circle import (
    EffectiveDivisor,
    arc_sums,
    arc_threshold,
    circle_setup,
    classify_arc,
    deg_alpha,
    degree_table,
    dual_enumerate,
    evaluation_functional,
    exp_sum,
    fourier_count,
    fourier_sweep,
    residue_rep,
    smooth_divisors,
)
from ffcircle.counting import EquationSpec, brute_force_count
from ffcircle.curve import ClosedPoint, CurveModel, DivisorSpec, LineBundleSpec, Section, pl_eval
from ffcircle.cyclotomic import CycInt, cyc_eval
from ffcircle.errors import NotFactoring, ValidationError
from ffcircle.field import make_field
from ffcircle.grid import GridPoint


def _setup(p, d, e, n=1, k=1, b=0):
    F = make_field(p, k)
    C = CurveModel.P1(F)
    B = DivisorSpec(((0, ClosedPoint.rational(F, 1), 1),)) if b else None
    jets = [[[0]]] * (n + 1) if b else None
    return circle_setup(C, LineBundleSpec((e,)), B, jets, EquationSpec.fermat(d, n))


def _psi_oracle(setup, alpha, i=0):
    """sum over a of exp(2 pi i Tr(alpha((a + P)^d)) / p) by Section arithmetic and floats."""
    F = setup.field
    V, W = setup.V, setup.W
    total = 0j
    for row in range(F.q**V.dim):
        coords = np.base_repr(row, F.q).zfill(V.dim)[-V.dim:] if V.dim else ""
        a = V.from_coords([int(c) for c in coords])
        f = (a + setup.lifts[i]).power(setup.d).scale(setup.coeffs[i])
        val = 0
        for aj, col in zip(alpha.coords, W.coord_cols):
            val = int(F.add[val, F.mul[aj, f.coeffs[col]]])
        total += cmath.exp(2j * cmath.pi * int(F.trace_table[val]) / F.p)
    return total


# -- dual enumeration --------------------------------------------------------------

def test_dual_sizes():
    assert len(list(dual_enumerate(_setup(2, 2, 1).W))) == 8
    F = make_field(3)
    s = circle_setup(CurveModel.P1(F), LineBundleSpec((1,)), DivisorSpec(((0, ClosedPoint.rational(F, 1), 1),)),
                     [[[0]], [[0]]], EquationSpec.fermat(1, 1))
    assert len(list(dual_enumerate(s.W))) == 3
    # b = de leaves a 1-dimensional W; only b = de + 1 (so d = 1) empties the dual
    s = circle_setup(CurveModel.P1(F), LineBundleSpec((1,)), DivisorSpec(((0, ClosedPoint.infinity(), 1),)),
                     [[[0]], [[0]]], EquationSpec.fermat(1, 1))
    assert len(list(dual_enumerate(s.W))) == 3
    s = circle_setup(CurveModel.P1(F), LineBundleSpec((1,)), DivisorSpec(((0, ClosedPoint.infinity(), 2),)),
                     [[[0, 0]], [[0, 0]]], EquationSpec.fermat(1, 1))
    alphas = list(dual_enumerate(s.W))
    assert len(alphas) == 1 and alphas[0].is_zero()


def test_dual_order_zero_first_and_unique():
    s = _setup(3, 2, 1)
    alphas = list(dual_enumerate(s.W))
    assert alphas[0].is_zero()
    assert [a.index() for a in alphas] == list(range(len(alphas)))


# -- exponential sums -----------------------------------------------------------------

def test_exp_sum_zero_functional_counts_sections():
    F = make_field(3)
    s = circle_setup(CurveModel.P1(F), LineBundleSpec((2,)), DivisorSpec(((0, ClosedPoint.rational(F, 1), 1),)),
                     [[[0]], [[0]]], EquationSpec.fermat(2, 1))
    assert exp_sum(s, s.functional([0] * s.W.dim)) == CycInt.from_int(3, 9)


def test_exp_sum_linear_nonzero_vanishes():
    s = _setup(3, 1, 1)
    for a in list(dual_enumerate(s.W))[1:]:
        assert exp_sum(s, a).is_zero()


def test_exp_sum_frozen_q2_d2_e1():
    # frozen from the psi-summation oracle below; coords in lexicographic order
    s = _setup(2, 2, 1)
    want = [4, 0, 4, 0, 0, 0, 0, 0]
    got = [exp_sum(s, a).coeffs[0] for a in dual_enumerate(s.W)]
    assert got == want
    assert [round(_psi_oracle(s, a).real) for a in dual_enumerate(s.W)] == want


@pytest.mark.parametrize("p,k,d,e,b", [(3, 1, 2, 1, 0), (5, 1, 3, 1, 0), (2, 2, 3, 1, 0), (3, 1, 2, 2, 1), (7, 1, 2, 0, 0)])
def test_exp_sum_matches_psi_oracle(p, k, d, e, b):
    s = _setup(p, d, e, k=k, b=b)
    for a in list(dual_enumerate(s.W))[:40]:
        assert abs(cyc_eval(exp_sum(s, a)) - _psi_oracle(s, a)) < 1e-8


# -- reconstruction -----------------------------------------------------------------

def test_linear_example_count_4():
    F = make_field(2)
    assert fourier_count(CurveModel.P1(F), LineBundleSpec((1,)), None, None, EquationSpec.fermat(1, 1)) == 4
    s = _setup(2, 1, 1)
    sweep = fourier_sweep(s)
    assert sweep.products[0].sum() == 16


def test_q3_d2_n2_e1_frozen():
    F = make_field(3)
    assert fourier_count(CurveModel.P1(F), LineBundleSpec((1,)), None, None, EquationSpec.fermat(2, 2)) == 33


@pytest.mark.parametrize("p,e", [(2, 1), (3, 2), (5, 1)])
def test_single_variable_power(p, e):
    # x^d = 0 has only the zero section on an integral curve
    F = make_field(p)
    for d in (1, 2, 3):
        assert fourier_count(CurveModel.P1(F), LineBundleSpec((e,)), None, None, EquationSpec.fermat(d, 0)) == 1


def _grid_points():
    return st.builds(
        GridPoint,
        p=st.sampled_from([2, 3]),
        k=st.sampled_from([1, 1, 2]),
        d=st.integers(1, 3),
        n=st.integers(1, 2),
        e=st.integers(0, 2),
        b=st.integers(0, 1),
        curve=st.sampled_from(["P1", "nodal"]),
    ).filter(lambda g: g.p**g.k <= 4 and not (g.curve == "nodal" and g.e < g.b))


@given(pt=_grid_points())
def test_fourier_equals_brute_force(pt):
    C, L, B, jets, eq = pt.build()
    sweep = fourier_sweep(circle_setup(C, L, B, jets, eq))
    assert sweep.count == brute_force_count(C, L, B, jets, eq).count
    assert sweep.zero_term == pt.q ** ((pt.n + 1) * (pt.e - pt.b + 1 - C.genus))


@given(pt=_grid_points(), data=st.data())
def test_twisted_character_invariance(pt, data):
    C, L, B, jets, eq = pt.build()
    s = circle_setup(C, L, B, jets, eq)
    c = data.draw(st.integers(1, s.q - 1))
    assert fourier_sweep(s, twist=c).count == fourier_sweep(s).count


@given(pt=_grid_points().filter(lambda g: g.b == 1), data=st.data())
def test_lift_invariance(pt, data):
    C, L, B, jets, eq = pt.build()
    s = circle_setup(C, L, B, jets, eq)
    F = s.field
    shifted = []
    for P in s.lifts:
        coords = data.draw(st.lists(st.integers(0, F.q - 1), min_size=s.V.dim, max_size=s.V.dim))
        shifted.append(P + s.V.from_coords(coords))
    assert fourier_sweep(s.with_lifts(shifted)).count == fourier_sweep(s).count


def test_incompatible_jets_give_zero_on_both_sides():
    F = make_field(3)
    C = CurveModel.P1(F)
    B = DivisorSpec(((0, ClosedPoint.rational(F, 1), 1),))
    jets = [[[0]], [[1]], [[1]]]  # 0 + 1 + 1 != 0
    eq = EquationSpec.fermat(2, 2)
    s = circle_setup(C, LineBundleSpec((1,)), B, jets, eq)
    assert not s.compatible
    sweep = fourier_sweep(s)
    assert sweep.count == 0 and sweep.notes
    assert brute_force_count(C, LineBundleSpec((1,)), B, jets, eq).count == 0


def test_non_diagonal_rejected():
    F = make_field(3)
    eq = EquationSpec("explicit", 2, 2, (((1, 1), 1),))
    with pytest.raises(ValidationError):
        circle_setup(CurveModel.P1(F), LineBundleSpec((1,)), None, None, eq)


def test_zero_twist_rejected():
    with pytest.raises(ValidationError):
        fourier_sweep(_setup(3, 2, 1), twist=0)


# -- degrees ----------------------------------------------------------------------------

def test_deg_examples():
    s = _setup(3, 1, 1)
    assert deg_alpha(s, s.functional([0, 0])) == 0
    ev = evaluation_functional(s, 0, ClosedPoint.rational(s.field, 0))
    assert deg_alpha(s, ev) == 1
    assert deg_alpha(s, evaluation_functional(s, 0, ClosedPoint.infinity())) == 1


@pytest.mark.parametrize("p,d,e,b", [(2, 2, 2, 0), (3, 2, 1, 0), (2, 3, 1, 1), (3, 2, 2, 1), (4, 2, 1, 0)])
def test_degree_bound_and_paths_agree_on_p1(p, d, e, b):
    s = _setup(p, d, e, b=b) if p != 4 else _setup(2, d, e, k=2, b=b)
    van = degree_table(s)
    res = degree_table(s, method="residue")
    assert np.array_equal(van, res)
    assert (van >= 0).all()
    assert ((van == 0) == (np.arange(van.size) == 0)).all()
    assert van.max() <= (d * e - b) / 2 + 1
    alphas = list(dual_enumerate(s.W))
    for i in np.random.default_rng(0).choice(len(alphas), size=min(8, len(alphas)), replace=False):
        assert deg_alpha(s, alphas[i]) == van[i]


def test_smooth_divisors_avoid_nodes():
    F = make_field(2)
    z = ClosedPoint.rational(F, 0)
    from ffcircle.curve import Node

    C = CurveModel(F, 2, (Node(0, z, 1, z),))
    for Z in smooth_divisors(C, 2):
        assert Z.degree == 2
        for h, _ in Z.parts:
            assert pl_eval(F, list(h), 0) != 0


# -- residue representations -------------------------------------------------------------

def test_residue_rep_zero():
    s = _setup(3, 1, 1)
    rep = residue_rep(s, s.functional([0, 0]), DivisorSpec(((0, ClosedPoint.rational(s.field, 2), 1),)))
    assert rep.is_zero()


def test_residue_rep_evaluation_at_zero():
    s = _setup(3, 1, 1)
    F = s.field
    ev = evaluation_functional(s, 0, ClosedPoint.rational(F, 0))
    rep = residue_rep(s, ev, DivisorSpec(((0, ClosedPoint.rational(F, 0), 1),)))
    # dt/t with residue 1
    assert rep.numerators == ((1,),)


def test_residue_rep_two_simple_poles():
    s = _setup(3, 1, 2)
    F = s.field
    e0 = evaluation_functional(s, 0, ClosedPoint.rational(F, 0))
    e1 = evaluation_functional(s, 0, ClosedPoint.rational(F, 1))
    alpha = s.functional([F.add[x, y] for x, y in zip(e0.coords, e1.coords)])
    assert deg_alpha(s, alpha) == 2
    Z = DivisorSpec(((0, ClosedPoint.rational(F, 0), 1), (0, ClosedPoint.rational(F, 1), 1)))
    rep = residue_rep(s, alpha, Z)
    r = list(rep.numerators[0])
    h = rep.divisor.parts[0][0]
    dh = [int(F.mul[i % F.p, c]) for i, c in enumerate(h)][1:]
    for x in (0, 1):
        res = F.mul[pl_eval(F, r, x), F.inv[pl_eval(F, dh, x)]]
        assert res == 1
    for sec in s.W.basis_sections():
        assert rep.pairing(s, sec) == alpha(sec)
    with pytest.raises(NotFactoring):
        residue_rep(s, alpha, DivisorSpec(((0, ClosedPoint.rational(F, 0), 1),)))


def test_effective_divisor_round_trip():
    F = make_field(2)
    C = CurveModel.P1(F)
    Z = DivisorSpec(((0, ClosedPoint((1, 1, 1)), 1), (0, ClosedPoint.infinity(), 2)))
    E = EffectiveDivisor.from_divisor(C, Z)
    assert E.degree == 4
    back = E.as_divisor(F)
    assert sorted(map(str, back.points)) == sorted(map(str, Z.points))


# -- arcs ----------------------------------------------------------------------------------

def test_classify_arc():
    assert classify_arc(0, 1, 0, 0).is_major
    t = arc_threshold(3, 1, 1)
    assert classify_arc(t, 3, 1, 1).is_major
    assert not classify_arc(t + 1, 3, 1, 1).is_major


@pytest.mark.parametrize("p,d,e", [(2, 2, 2), (3, 2, 1), (2, 1, 2), (2, 3, 1)])
def test_arc_sums_partition(p, d, e):
    s = _setup(p, d, e, n=2)
    sweep = fourier_sweep(s)
    arcs = arc_sums(sweep, degree_table(s))
    assert arcs.major + arcs.minor == sweep.total
    assert arcs.major_count + arcs.minor_count == s.dual_size
    if d == 1:
        assert arcs.minor.is_zero()
