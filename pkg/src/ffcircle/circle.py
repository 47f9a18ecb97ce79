"""Fourier reconstruction of section counts over the dual of H^0(C, L^d(-B)).

A functional alpha is stored by its values on the echelon basis of
W = H^0(C, L^d(-B)).  Because the basis is the identity on its coordinate
columns, ``alpha(v) = sum_j alpha_j v[col_j]`` evaluates alpha on W and
extends it linearly to every ambient section of L^d; the extension is what
the exponential sums see for lifted tuples (a + P_i)^d.

Degrees of functionals are computed two independent ways: as the least
degree of an effective divisor Z whose vanishing subspace alpha kills, and
through residue pairings f -> [t^(deg h - 1)](r f mod h) plus top
coefficients at infinity, whose span is the set of functionals factoring
through Z.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from itertools import product

import numpy as np

from . import linalg
from .counting import EquationSpec, power_tables, resolve_lifts
from .curve import (
    ClosedPoint,
    CurveModel,
    DivisorSpec,
    LineBundleSpec,
    Section,
    SectionSpace,
    arithmetic_genus,
    constraint_matrix,
    divisibility_rows,
    monic_polys,
    offsets,
    pl_divmod,
    pl_eval,
    pl_mul,
    pl_pow,
    pl_trim,
    raw_section_space,
    section_space,
)
from .cyclotomic import CycInt, cyc_as_integer, cyc_eval_abs, histogram_product, sum_histograms
from .errors import (
    IdentityViolation,
    NotFactoring,
    ValidationError,
    check_budget,
)
from .field import FieldSpec, trace_form

CHUNK = 1 << 21


# -- setup ---------------------------------------------------------------------

@dataclass(eq=False)
class CircleSetup:
    """Everything the sweep needs: V = H^0(L(-B)), W = H^0(L^d(-B)) and the lifts."""

    curve: CurveModel
    bundle: LineBundleSpec
    constraint: DivisorSpec | None
    d: int
    coeffs: list[int]
    V: SectionSpace
    W: SectionSpace
    lifts: list[Section]

    @property
    def field(self) -> FieldSpec:
        return self.curve.field

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def e(self) -> int:
        return self.bundle.degree

    @property
    def b(self) -> int:
        return self.constraint.degree if self.constraint else 0

    @property
    def g(self) -> int:
        return arithmetic_genus(self.curve)

    @property
    def n_plus_1(self) -> int:
        return len(self.lifts)

    @property
    def dual_size(self) -> int:
        return self.q**self.W.dim

    @cached_property
    def compatible(self) -> bool:
        """Whether F(P) lies in W; otherwise no tuple can satisfy F = 0."""
        F = self.field
        acc = np.zeros(self.W.ambient_dim, dtype=np.int32)
        for P, c in zip(self.lifts, self.coeffs):
            acc = F.add[acc, F.mul[c, P.power(self.d).array]]
        return self.W.contains(acc)

    def functional(self, coords) -> Functional:
        return Functional(tuple(int(x) for x in coords), self.W)

    def with_lifts(self, lifts: list[Section]) -> CircleSetup:
        return CircleSetup(self.curve, self.bundle, self.constraint, self.d, self.coeffs, self.V, self.W, list(lifts))


def circle_setup(curve: CurveModel, bundle: LineBundleSpec, constraint: DivisorSpec | None, target_jets,
                 eq: EquationSpec, lifts: list[Section] | None = None) -> CircleSetup:
    coeffs = eq.diagonal()
    if coeffs is None:
        raise ValidationError("the Fourier engine handles diagonal forms only")
    V = section_space(curve, bundle, constraint)
    L = raw_section_space(curve, bundle.degrees, None)
    P = resolve_lifts(L, constraint, target_jets, eq.n_plus_1, lifts)
    W = section_space(curve, bundle.power(eq.d), constraint)
    return CircleSetup(curve, bundle, constraint, eq.d, coeffs, V, W, P)


# -- functionals -------------------------------------------------------------

@dataclass(frozen=True)
class Functional:
    coords: tuple[int, ...]
    space: SectionSpace | None = dc_field(default=None, compare=False, repr=False)
    cached_degree: int | None = dc_field(default=None, compare=False)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __call__(self, vec) -> int:
        """alpha on an ambient section (array or Section) of L^d."""
        arr = vec.array if isinstance(vec, Section) else np.asarray(vec, dtype=np.int32)
        F = self.space.field
        cols = list(self.space.coord_cols)
        return int(linalg.dot_rows(F, arr[cols][None, :], np.array(self.coords, dtype=np.int32))[0])

    def index(self) -> int:
        return int(linalg.lex_index(np.array(self.coords, dtype=np.int64), self.space.field.q))

    def with_degree(self, deg: int) -> Functional:
        return Functional(self.coords, self.space, deg)


def dual_enumerate(space: SectionSpace, budget: int | None = None):
    """Every functional on ``space`` exactly once, zero first, lexicographic in coordinates."""
    total = space.field.q**space.dim
    check_budget(total, budget, "dual enumeration")
    for lo in range(0, total, 1 << 14):
        for row in linalg.lex_vectors(space.dim, space.field.q, lo, min(lo + (1 << 14), total)):
            yield Functional(tuple(int(x) for x in row), space)


def evaluation_functional(setup: CircleSetup, comp: int, pt: ClosedPoint) -> Functional:
    """alpha(f) = value of f at a rational point, in the fixed trivialization."""
    vals = [b.value_at(comp, pt) for b in setup.W.basis_sections()]
    return setup.functional(vals)


# -- exponential sums ----------------------------------------------------------

def _projected_tables(setup: CircleSetup) -> list[np.ndarray]:
    """Per variable, W-coordinates (coordinate columns) of c_i (a + P_i)^d over all a in V."""
    tabs = power_tables(setup.V, setup.lifts, setup.d, setup.coeffs, 1)
    cols = list(setup.W.coord_cols)
    return [t[:, cols] for t in tabs]


def trace_pairing(F: FieldSpec, A: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Tr(sum_j A[m, j] Y[n, j]) in 0..p-1 for all (m, n)."""
    p, k = F.p, F.k
    w = A.shape[1]
    if w == 0:
        return np.zeros((A.shape[0], Y.shape[0]), dtype=np.int64)
    dig = F.tables.digits
    G = np.kron(np.eye(w, dtype=np.int64), trace_form(F))
    Ad = dig[A].reshape(A.shape[0], w * k)
    Yd = dig[Y].reshape(Y.shape[0], w * k)
    return ((Ad @ G) % p) @ Yd.T % p


def _histograms(T: np.ndarray, p: int) -> np.ndarray:
    M = T.shape[0]
    flat = (T + p * np.arange(M, dtype=np.int64)[:, None]).ravel()
    return np.bincount(flat, minlength=M * p).reshape(M, p)


def exp_sum_histograms(setup: CircleSetup, alphas: np.ndarray, twist: int = 1,
                       tables: list[np.ndarray] | None = None) -> list[np.ndarray]:
    """Exponent histograms of S_1(alpha)_i for a batch of functionals (rows of ``alphas``)."""
    F = setup.field
    if twist == 0:
        raise ValidationError("the twisted character must be nontrivial")
    A = F.mul[int(twist), np.asarray(alphas, dtype=np.int32)]
    tables = _projected_tables(setup) if tables is None else tables
    return [_histograms(trace_pairing(F, A, Y), F.p) for Y in tables]


def exp_sum(setup: CircleSetup, alpha: Functional, i: int = 0, twist: int = 1) -> CycInt:
    """S_1(alpha)_i = sum over a in V of psi(alpha((a + P_i)^d)), exactly."""
    A = np.array([alpha.coords], dtype=np.int32).reshape(1, setup.W.dim)
    tab = _projected_tables(setup)[i]
    h = exp_sum_histograms(setup, A, twist, [tab])[0]
    return sum_histograms(h, setup.field.p)


@dataclass
class FourierSweep:
    setup: CircleSetup
    twist: int
    products: np.ndarray
    total: CycInt
    count: int
    abs_sums: np.ndarray | None = None
    notes: list[str] = dc_field(default_factory=list)

    @property
    def zero_term(self) -> int:
        return cyc_as_integer(sum_histograms(self.products[:1], self.setup.field.p))


def _sweep_chunk(args):
    setup, lo, hi, twist, tables, keep_abs = args
    A = linalg.lex_vectors(setup.W.dim, setup.q, lo, hi)
    hists = exp_sum_histograms(setup, A, twist, tables)
    prods = histogram_product(hists, setup.field.p)
    abs_rows = None
    if keep_abs:
        p = setup.field.p
        abs_rows = np.array([[cyc_eval_abs(CycInt.from_exponents(p, h[r])) for h in hists] for r in range(hi - lo)])
    return prods, abs_rows


def fourier_sweep(setup: CircleSetup, twist: int = 1, budget: int | None = None, workers: int = 1,
                  keep_abs: bool = False) -> FourierSweep:
    """All per-functional products S_1(alpha)_0 ... S_1(alpha)_n and the reconstructed count."""
    total_alpha = setup.dual_size
    N = setup.q**setup.V.dim
    check_budget(total_alpha * N, budget, "Fourier sweep")
    tables = _projected_tables(setup)
    step = max(1, CHUNK // max(N, 1))
    jobs = [(setup, lo, min(lo + step, total_alpha), twist, tables, keep_abs) for lo in range(0, total_alpha, step)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_sweep_chunk, jobs))
    else:
        parts = [_sweep_chunk(j) for j in jobs]
    prods = np.concatenate([pr for pr, _ in parts], axis=0) if parts else np.zeros((0, setup.field.p), dtype=np.int64)
    abs_sums = np.concatenate([a for _, a in parts], axis=0) if keep_abs else None
    p = setup.field.p
    total = sum_histograms(prods, p)
    notes = []
    if not setup.compatible:
        notes.append("prescribed jets give F(P) outside W; count is 0 without summation")
        count = 0
    else:
        raw = cyc_as_integer(total)
        denom = setup.q**setup.W.dim
        if raw % denom:
            raise IdentityViolation(f"Fourier total {raw} not divisible by {denom}")
        count = raw // denom
    return FourierSweep(setup, twist, prods, total, count, abs_sums, notes)


def fourier_count(curve: CurveModel, bundle: LineBundleSpec, constraint: DivisorSpec | None, target_jets,
                  eq: EquationSpec, twist: int = 1, lifts: list[Section] | None = None,
                  budget: int | None = None, workers: int = 1) -> int:
    setup = circle_setup(curve, bundle, constraint, target_jets, eq, lifts)
    return fourier_sweep(setup, twist, budget, workers).count


# -- effective divisors on the smooth locus -----------------------------------

@dataclass(frozen=True)
class EffectiveDivisor:
    """Per component a monic polynomial (finite part) and a multiplicity at infinity."""

    parts: tuple[tuple[tuple[int, ...], int], ...]

    @property
    def degree(self) -> int:
        return sum(len(h) - 1 + mu for h, mu in self.parts)

    def as_divisor(self, F: FieldSpec) -> DivisorSpec | None:
        """Closed-point form when every finite part splits into known irreducibles."""
        pts = []
        for c, (h, mu) in enumerate(self.parts):
            for poly, m in _factor(F, list(h)):
                pts.append((c, ClosedPoint(tuple(poly)), m))
            if mu:
                pts.append((c, ClosedPoint.infinity(), mu))
        return DivisorSpec(tuple(pts))

    @classmethod
    def from_divisor(cls, curve: CurveModel, Z: DivisorSpec) -> EffectiveDivisor:
        F = curve.field
        parts = []
        for c in range(curve.n_components):
            h = [1]
            mu = 0
            for comp, pt, m in Z.points:
                if comp != c:
                    continue
                if pt.is_infinity:
                    mu += m
                else:
                    h = pl_mul(F, h, pl_pow(F, list(pt.poly), m))
            parts.append((tuple(h), mu))
        return cls(tuple(parts))


def _factor(F: FieldSpec, h: list[int]) -> list[tuple[list[int], int]]:
    """Factorization of a monic polynomial into monic irreducibles (trial division).

    Candidates are tried by increasing degree, so every divisor found has
    no smaller factor left and is irreducible.
    """
    out = []
    h = pl_trim(h)
    deg = 1
    while len(h) - 1 >= deg:
        for m in monic_polys(F, deg):
            m = list(m)
            mult = 0
            while True:
                quo, rem = pl_divmod(F, h, m)
                if pl_trim(rem):
                    break
                h = pl_trim(quo)
                mult += 1
            if mult:
                out.append((m, mult))
        deg += 1
    return out


def _component_options(curve: CurveModel, c: int, j: int) -> list[tuple[tuple[int, ...], int]]:
    """Effective divisors of degree j on component c avoiding its node points."""
    F = curve.field
    node_pts = curve.node_points(c)
    finite = [pt.rational_value(F) for pt in node_pts if not pt.is_infinity]
    inf_ok = not any(pt.is_infinity for pt in node_pts)
    out = []
    for mu in range(j + 1):
        if mu and not inf_ok:
            break
        hdeg = j - mu
        for h in monic_polys(F, hdeg):
            h = tuple(int(x) for x in h)
            if any(pl_eval(F, list(h), x) == 0 for x in finite):
                continue
            out.append((h, mu))
    return out


def smooth_divisors(curve: CurveModel, m: int):
    """Effective divisors of degree m supported away from the nodes, in a fixed order."""
    comps = curve.n_components
    for split in _compositions(m, comps):
        opts = [_component_options(curve, c, j) for c, j in enumerate(split)]
        for combo in product(*opts):
            yield EffectiveDivisor(tuple(combo))


def _compositions(m: int, parts: int):
    if parts == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in _compositions(m - first, parts - 1):
            yield (first,) + rest


def _inf_rows(deg: int, mult: int) -> np.ndarray:
    rows = []
    for j in range(min(mult, deg + 1)):
        r = np.zeros(deg + 1, dtype=np.int32)
        r[deg - j] = 1
        rows.append(r)
    return np.array(rows, dtype=np.int32).reshape(-1, deg + 1)


def vanishing_subspace(setup: CircleSetup, Z: EffectiveDivisor) -> np.ndarray:
    """Basis (ambient rows) of sections in W that also vanish on Z."""
    F = setup.field
    degs = setup.W.degrees
    off = offsets(degs)
    base = EffectiveDivisor.from_divisor(setup.curve, setup.constraint) if setup.constraint else None
    rows = [constraint_matrix(setup.curve, degs, None)]
    for c, (h, mu) in enumerate(Z.parts):
        hb, mb = (base.parts[c] if base else ((1,), 0))
        modulus = pl_mul(F, list(hb), list(h))
        blocks = []
        if len(modulus) > 1:
            blocks.append(divisibility_rows(F, degs[c], modulus))
        blocks.append(_inf_rows(degs[c], mb + mu))
        for blk in blocks:
            full = np.zeros((blk.shape[0], off[-1]), dtype=np.int32)
            full[:, off[c] : off[c + 1]] = blk
            rows.append(full)
    M = np.concatenate(rows, axis=0)
    return linalg.nullspace(F, M, ncols=off[-1]) if M.shape[0] else np.eye(off[-1], dtype=np.int32)


def annihilator(setup: CircleSetup, Z: EffectiveDivisor) -> np.ndarray:
    """Basis of functionals on W vanishing on W(-Z), in W coordinates."""
    basis = vanishing_subspace(setup, Z)
    if basis.shape[0] == 0:
        return np.eye(setup.W.dim, dtype=np.int32)
    M = basis[:, list(setup.W.coord_cols)]
    return linalg.nullspace(setup.field, M, ncols=setup.W.dim)


# -- residues --------------------------------------------------------------------

def _twisted_components(setup: CircleSetup, section: Section) -> list[tuple[list[int], int]]:
    """Per component, f / h_B and the top degree of f as a section of L^d(-B).

    Dividing by the finite part of B and lowering the top degree by B's
    multiplicity at infinity expresses a section of W in the local
    trivializations of L^d(-B) itself.
    """
    F = setup.field
    base = EffectiveDivisor.from_divisor(setup.curve, setup.constraint) if setup.constraint else None
    out = []
    for c in range(setup.curve.n_components):
        f = list(section.component(c))
        hb, mb = base.parts[c] if base else ((1,), 0)
        quo, rem = pl_divmod(F, f, list(hb))
        if pl_trim(rem):
            raise ValidationError("section does not vanish on the constraint divisor")
        top = section.degrees[c] - mb - (len(hb) - 1)
        quo = quo + [0] * max(0, top + 1 - len(quo))
        out.append((quo, top))
    return out


def residue_matrix(setup: CircleSetup, Z: EffectiveDivisor) -> tuple[np.ndarray, list[tuple[int, str, int]]]:
    """Rows: functionals on W given by the elementary residue pairings along Z.

    Row labels are (component, "finite", i) for the numerator t^i, and
    (component, "inf", k) for the k-th coefficient from the top.
    """
    F = setup.field
    W = setup.W
    twisted = [_twisted_components(setup, s) for s in W.basis_sections()]
    rows, labels = [], []
    for c, (h, mu) in enumerate(Z.parts):
        hd = len(h) - 1
        for i in range(hd):
            row = []
            for tw in twisted:
                f, _ = tw[c]
                _, r = pl_divmod(F, [0] * i + f, list(h))
                r = r + [0] * (hd - len(r))
                row.append(r[hd - 1])
            rows.append(row)
            labels.append((c, "finite", i))
        for k in range(mu):
            row = []
            for tw in twisted:
                f, top = tw[c]
                row.append(f[top - k] if top - k >= 0 else 0)
            rows.append(row)
            labels.append((c, "inf", k))
    return np.array(rows, dtype=np.int32).reshape(len(rows), W.dim), labels


@dataclass(frozen=True)
class ResidueRep:
    """Residue data along Z for sections of L^d(-B).

    With f_c the component polynomial divided by the finite part of B, the
    functional is sum_c [t^(deg h_c - 1)](r_c f_c mod h_c) plus
    sum_k c_k * (k-th top coefficient of f_c in the trivialization at infinity).
    """

    divisor: EffectiveDivisor
    numerators: tuple[tuple[int, ...], ...]
    inf_coeffs: tuple[tuple[int, ...], ...]

    def pairing(self, setup: CircleSetup, section: Section) -> int:
        F = setup.field
        acc = 0
        for c, ((h, mu), (f, top)) in enumerate(zip(self.divisor.parts, _twisted_components(setup, section))):
            r = list(self.numerators[c])
            hd = len(h) - 1
            if hd:
                _, rem = pl_divmod(F, pl_mul(F, r, f), list(h))
                rem = rem + [0] * (hd - len(rem))
                acc = int(F.add[acc, rem[hd - 1]])
            for k, ck in enumerate(self.inf_coeffs[c]):
                if top - k >= 0:
                    acc = int(F.add[acc, F.mul[ck, f[top - k]]])
        return acc

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.numerators) and not any(any(c) for c in self.inf_coeffs)


def residue_rep(setup: CircleSetup, alpha: Functional, Z: DivisorSpec | EffectiveDivisor) -> ResidueRep:
    """The residue data along Z reproducing alpha; NotFactoring if alpha does not factor through Z."""
    F = setup.field
    if isinstance(Z, DivisorSpec):
        Z = EffectiveDivisor.from_divisor(setup.curve, Z)
    R, labels = residue_matrix(setup, Z)
    target = np.array(alpha.coords, dtype=np.int32)
    if R.shape[0] == 0:
        if alpha.is_zero():
            u = np.zeros(0, dtype=np.int32)
        else:
            raise NotFactoring("alpha is nonzero but Z is empty")
    else:
        u = linalg.solve(F, R.T, target)
        if u is None:
            raise NotFactoring(f"alpha does not factor through a divisor of degree {Z.degree}")
    nums, infs = [], []
    for c, (h, mu) in enumerate(Z.parts):
        nums.append(tuple(int(u[j]) for j, lab in enumerate(labels) if lab[0] == c and lab[1] == "finite"))
        infs.append(tuple(int(u[j]) for j, lab in enumerate(labels) if lab[0] == c and lab[1] == "inf"))
    rep = ResidueRep(Z, tuple(nums), tuple(infs))
    check = [rep.pairing(setup, s) for s in setup.W.basis_sections()]
    if check != list(alpha.coords):
        raise IdentityViolation("residue pairing does not reproduce alpha")
    return rep


# -- degrees ---------------------------------------------------------------------

def _max_support(setup: CircleSetup) -> int:
    return sum(D + 1 for D in setup.W.degrees)


def deg_alpha(setup: CircleSetup, alpha: Functional) -> int:
    """Least degree of an effective divisor (away from nodes) through which alpha factors."""
    if alpha.cached_degree is not None:
        return alpha.cached_degree
    if alpha.is_zero():
        return 0
    a = np.array(alpha.coords, dtype=np.int32)
    F = setup.field
    for m in range(1, _max_support(setup) + 1):
        for Z in smooth_divisors(setup.curve, m):
            basis = vanishing_subspace(setup, Z)
            if basis.shape[0] == 0:
                return m
            vals = linalg.dot_rows(F, basis[:, list(setup.W.coord_cols)], a)
            if not vals.any():
                return m
    raise IdentityViolation("no divisor kills alpha")  # pragma: no cover


def degree_table(setup: CircleSetup, method: str = "vanishing", max_degree: int | None = None,
                 budget: int | None = None) -> np.ndarray:
    """deg alpha for every functional, indexed by lexicographic position.

    ``method`` is "vanishing" (annihilators of vanishing subspaces) or
    "residue" (spans of residue pairings).  Entries stay -1 when they exceed
    ``max_degree``.
    """
    F = setup.field
    q = setup.q
    w = setup.W.dim
    total = q**w
    check_budget(total, budget, "degree table")
    deg = np.full(total, -1, dtype=np.int64)
    deg[0] = 0
    remaining = total - 1
    top = _max_support(setup) if max_degree is None else max_degree
    m = 0
    while remaining and m < top:
        m += 1
        for Z in smooth_divisors(setup.curve, m):
            if method == "vanishing":
                span = annihilator(setup, Z)
            elif method == "residue":
                R, _ = residue_matrix(setup, Z)
                span = linalg.rref(F, R)[0] if R.shape[0] else np.zeros((0, w), dtype=np.int32)
            else:
                raise ValidationError(f"unknown degree method {method!r}")
            if span.shape[0] == 0:
                continue
            idx = linalg.lex_index(linalg.span_elements(F, span), q)
            fresh = idx[deg[idx] < 0]
            if fresh.size:
                deg[fresh] = m
                remaining -= np.unique(fresh).size
            if not remaining:
                break
    return deg


# -- arcs --------------------------------------------------------------------------

@dataclass(frozen=True)
class ArcClass:
    kind: str
    threshold: int

    @property
    def is_major(self) -> bool:
        return self.kind == "major"


def arc_threshold(e: int, b: int, g: int) -> int:
    return e - b - 2 * g + 1


def classify_arc(degree: int | Functional, e: int, b: int, g: int) -> ArcClass:
    if isinstance(degree, Functional):
        if degree.cached_degree is None:
            raise ValidationError("functional has no cached degree")
        degree = degree.cached_degree
    t = arc_threshold(e, b, g)
    return ArcClass("major" if degree <= t else "minor", t)


@dataclass(frozen=True)
class ArcSums:
    major: CycInt
    minor: CycInt
    normalized_major: Fraction
    normalized_minor_abs: float
    major_count: int
    minor_count: int


def arc_sums(sweep: FourierSweep, degrees: np.ndarray) -> ArcSums:
    """Split the Fourier total into major and minor arcs (exact), then normalize."""
    st = sweep.setup
    if (degrees < 0).any():
        raise ValidationError("degree table is incomplete")
    p = st.field.p
    major_mask = degrees <= arc_threshold(st.e, st.b, st.g)
    major = sum_histograms(sweep.products[major_mask], p)
    minor = sum_histograms(sweep.products[~major_mask], p)
    if major + minor != sweep.total:
        raise IdentityViolation("major and minor arcs do not add up to the total")
    scale = st.q ** ((st.e - st.g + 1 - st.b) * st.n_plus_1)
    return ArcSums(major, minor, Fraction(cyc_as_integer(major), scale), cyc_eval_abs(minor) / scale,
                   int(major_mask.sum()), int((~major_mask).sum()))
