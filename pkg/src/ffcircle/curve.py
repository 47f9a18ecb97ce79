"""Curves made of P^1 components, line bundles on them and their sections.

A section of a line bundle of degree ``e_i`` on the component with
coordinate ``t`` is a polynomial of degree ``<= e_i`` (the dehomogenized
form).  Its value at a finite rational point ``c`` is ``f(c)``; at infinity
the trivialization is division by ``t^{e_i}``, so the value is the
coefficient of ``t^{e_i}`` and Taylor coefficients in ``s = 1/t`` are the
top coefficients read downwards.  At a node the two component values are
identified with the identity map.

Sections are stored in ambient coordinates: the coefficient vectors of all
components concatenated in component order, lowest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import product
from math import lcm

import numpy as np

from . import linalg
from .errors import SpecialRange, ValidationError, check_budget
from .field import (
    FieldElem,
    FieldSpec,
    embedding_table,
    extension,
    make_field,
    poly_mul,
)


# -- small polynomial helpers over a field (Python lists, low degree first) --

def pl_trim(a: list[int]) -> list[int]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def pl_mul(F: FieldSpec, a, b) -> list[int]:
    if not len(a) or not len(b):
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = int(F.add[out[i + j], F.mul[x, y]])
    return out


def pl_divmod(F: FieldSpec, a, m) -> tuple[list[int], list[int]]:
    a = pl_trim(a)
    m = pl_trim(m)
    if not m:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = int(F.inv[m[-1]])
    quot = [0] * max(len(a) - len(m) + 1, 0)
    while len(a) >= len(m):
        c = int(F.mul[a[-1], inv_lead])
        shift = len(a) - len(m)
        quot[shift] = c
        for i, mc in enumerate(m):
            a[shift + i] = int(F.sub[a[shift + i], F.mul[c, mc]])
        a = pl_trim(a)
    return quot, a


def pl_eval(F: FieldSpec, a, x: int) -> int:
    acc = 0
    for c in reversed(list(a)):
        acc = int(F.add[F.mul[acc, x], c])
    return acc


def pl_pow(F: FieldSpec, a, e: int) -> list[int]:
    out = [1]
    for _ in range(e):
        out = pl_mul(F, out, a)
    return out


def monic_polys(F: FieldSpec, degree: int):
    """Monic polynomials of the given degree, constant term varying slowest."""
    for tail in product(range(F.q), repeat=degree):
        yield tuple(tail) + (1,)


def has_root_in(F: FieldSpec, poly, E: FieldSpec) -> bool:
    emb = embedding_table(F, E)
    xs = np.arange(E.q, dtype=np.int32)
    val = np.zeros(E.q, dtype=np.int32)
    for c in reversed(list(poly)):
        val = E.add[E.mul[val, xs], emb[c]]
    return bool((val == 0).any())


def is_irreducible_over(F: FieldSpec, poly) -> bool:
    poly = pl_trim(poly)
    f = len(poly) - 1
    if f < 1:
        return False
    for j in range(1, f // 2 + 1):
        if has_root_in(F, poly, extension(F, j)):
            return False
    return True


# -- points, curves, bundles, divisors --------------------------------------

@dataclass(frozen=True)
class ClosedPoint:
    """A closed point of P^1: a monic irreducible polynomial, or infinity (poly=None)."""

    poly: tuple[int, ...] | None

    @classmethod
    def infinity(cls) -> ClosedPoint:
        return cls(None)

    @classmethod
    def rational(cls, F: FieldSpec, c: int | FieldElem) -> ClosedPoint:
        c = int(c)
        return cls((int(F.neg[c]), 1))

    @property
    def is_infinity(self) -> bool:
        return self.poly is None

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else len(self.poly) - 1

    def rational_value(self, F: FieldSpec) -> int | None:
        """The coordinate of a finite rational point, None at infinity."""
        if self.poly is None:
            return None
        if self.degree != 1:
            raise ValidationError(f"{self} is not a rational point")
        return int(F.neg[self.poly[0]])

    def __str__(self) -> str:
        if self.poly is None:
            return "inf"
        return "poly" + str(list(self.poly))


@dataclass(frozen=True)
class Node:
    comp_a: int
    point_a: ClosedPoint
    comp_b: int
    point_b: ClosedPoint


@dataclass(frozen=True)
class CurveModel:
    """A connected nodal curve whose components are copies of P^1."""

    field: FieldSpec
    n_components: int = 1
    nodes: tuple[Node, ...] = ()
    labels: tuple[str, ...] = dc_field(default=())

    def __post_init__(self):
        if self.n_components < 1:
            raise ValidationError("a curve needs at least one component")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"t{i}" for i in range(self.n_components)))
        seen = set()
        for nd in self.nodes:
            for comp, pt in ((nd.comp_a, nd.point_a), (nd.comp_b, nd.point_b)):
                if not 0 <= comp < self.n_components:
                    raise ValidationError(f"node references missing component {comp}")
                if pt.degree != 1:
                    raise ValidationError("nodes must be rational points")
                if (comp, pt) in seen:
                    raise ValidationError(f"point {pt} of component {comp} used by two nodes")
                seen.add((comp, pt))
        if not self._connected():
            raise ValidationError("dual graph is disconnected")

    def _connected(self) -> bool:
        parent = list(range(self.n_components))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for nd in self.nodes:
            parent[find(nd.comp_a)] = find(nd.comp_b)
        return len({find(i) for i in range(self.n_components)}) == 1

    @classmethod
    def P1(cls, F: FieldSpec) -> CurveModel:
        return cls(F, 1, ())

    def node_points(self, comp: int) -> list[ClosedPoint]:
        pts = []
        for nd in self.nodes:
            if nd.comp_a == comp:
                pts.append(nd.point_a)
            if nd.comp_b == comp:
                pts.append(nd.point_b)
        return pts

    @property
    def genus(self) -> int:
        return arithmetic_genus(self)

    def base_change(self, E: FieldSpec) -> CurveModel:
        """Same curve with point data re-expressed over an extension E."""
        emb = embedding_table(self.field, E)

        def mv(pt):
            return pt if pt.poly is None else ClosedPoint(tuple(int(emb[c]) for c in pt.poly))

        nodes = tuple(Node(n.comp_a, mv(n.point_a), n.comp_b, mv(n.point_b)) for n in self.nodes)
        return CurveModel(E, self.n_components, nodes, self.labels)


def arithmetic_genus(curve: CurveModel) -> int:
    if not curve._connected():
        raise ValidationError("dual graph is disconnected")
    return len(curve.nodes) - curve.n_components + 1


@dataclass(frozen=True)
class LineBundleSpec:
    degrees: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(e) for e in self.degrees))
        if any(e < 0 for e in self.degrees):
            raise ValidationError("negative partial degrees are not supported")

    @property
    def degree(self) -> int:
        return sum(self.degrees)

    def power(self, d: int) -> LineBundleSpec:
        return LineBundleSpec(tuple(d * e for e in self.degrees))


@dataclass(frozen=True)
class DivisorSpec:
    """Effective divisor: tuple of (component, closed point, multiplicity)."""

    points: tuple[tuple[int, ClosedPoint, int], ...] = ()

    def __post_init__(self):
        pts = tuple((int(c), pt, int(m)) for c, pt, m in self.points)
        for _, _, m in pts:
            if m < 1:
                raise ValidationError("multiplicities must be >= 1")
        object.__setattr__(self, "points", pts)

    @property
    def degree(self) -> int:
        return sum(pt.degree * m for _, pt, m in self.points)

    def __add__(self, other: DivisorSpec) -> DivisorSpec:
        return DivisorSpec(self.points + other.points)

    @property
    def is_reduced(self) -> bool:
        return all(m == 1 for _, _, m in self.points)


EMPTY_DIVISOR = DivisorSpec(())


def check_divisor(curve: CurveModel, divisor: DivisorSpec) -> None:
    F = curve.field
    for comp, pt, _ in divisor.points:
        if not 0 <= comp < curve.n_components:
            raise ValidationError(f"divisor references missing component {comp}")
        if pt.poly is not None:
            if pt.poly[-1] != 1 or not is_irreducible_over(F, pt.poly):
                raise ValidationError(f"{pt} is not a monic irreducible polynomial")
        if pt in curve.node_points(comp):
            raise ValidationError(f"divisor point {pt} on component {comp} is a node")


# -- sections ----------------------------------------------------------------

def offsets(degrees) -> list[int]:
    out = [0]
    for e in degrees:
        out.append(out[-1] + e + 1)
    return out


@dataclass(frozen=True)
class Section:
    field: FieldSpec
    degrees: tuple[int, ...]
    coeffs: tuple[int, ...]

    @classmethod
    def from_array(cls, F: FieldSpec, degrees, arr) -> Section:
        return cls(F, tuple(degrees), tuple(int(x) for x in arr))

    @classmethod
    def zero(cls, F: FieldSpec, degrees) -> Section:
        return cls(F, tuple(degrees), (0,) * offsets(degrees)[-1])

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int32)

    def component(self, i: int) -> tuple[int, ...]:
        off = offsets(self.degrees)
        return self.coeffs[off[i] : off[i + 1]]

    def __add__(self, other: Section) -> Section:
        return Section(self.field, self.degrees, tuple(int(x) for x in self.field.add[self.array, other.array]))

    def scale(self, c: int) -> Section:
        return Section(self.field, self.degrees, tuple(int(x) for x in self.field.mul[int(c), self.array]))

    def __mul__(self, other: Section) -> Section:
        F = self.field
        comps = []
        for i in range(len(self.degrees)):
            a = np.array(self.component(i), dtype=np.int32)
            b = np.array(other.component(i), dtype=np.int32)
            comps.extend(int(x) for x in poly_mul(F, a, b))
        degs = tuple(a + b for a, b in zip(self.degrees, other.degrees))
        return Section(F, degs, tuple(comps))

    def power(self, d: int) -> Section:
        out = Section(self.field, (0,) * len(self.degrees), (1,) * len(self.degrees))
        for _ in range(d):
            out = out * self
        return out

    def embed(self, E: FieldSpec) -> Section:
        emb = embedding_table(self.field, E)
        return Section(E, self.degrees, tuple(int(emb[c]) for c in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def value_at(self, comp: int, pt: ClosedPoint) -> int:
        poly = self.component(comp)
        if pt.is_infinity:
            return poly[-1]
        return pl_eval(self.field, poly, pt.rational_value(self.field))


def _value_row(F: FieldSpec, deg: int, pt: ClosedPoint) -> np.ndarray:
    row = np.zeros(deg + 1, dtype=np.int32)
    if pt.is_infinity:
        row[deg] = 1
        return row
    c = pt.rational_value(F)
    acc = 1
    for j in range(deg + 1):
        row[j] = acc
        acc = int(F.mul[acc, c])
    return row


def _vanishing_rows(F: FieldSpec, deg: int, pt: ClosedPoint, mult: int) -> np.ndarray:
    """Linear conditions on a degree-<=deg polynomial to vanish to order mult at pt."""
    if pt.is_infinity:
        rows = []
        for j in range(mult):
            if deg - j < 0:
                break
            r = np.zeros(deg + 1, dtype=np.int32)
            r[deg - j] = 1
            rows.append(r)
        return np.array(rows, dtype=np.int32).reshape(-1, deg + 1)
    return divisibility_rows(F, deg, pl_pow(F, list(pt.poly), mult))


def divisibility_rows(F: FieldSpec, deg: int, modulus) -> np.ndarray:
    """Conditions on a degree-<=deg polynomial to be divisible by a monic ``modulus``."""
    modulus = list(modulus)
    width = len(modulus) - 1
    cols = []
    for j in range(deg + 1):
        mono = [0] * j + [1]
        _, r = pl_divmod(F, mono, modulus)
        cols.append(r + [0] * (width - len(r)))
    return np.array(cols, dtype=np.int32).T.reshape(width, deg + 1)


def constraint_matrix(curve: CurveModel, degrees, divisor: DivisorSpec | None = None) -> np.ndarray:
    """Rows whose kernel is H^0(C, L(-divisor)) in ambient coordinates."""
    F = curve.field
    off = offsets(degrees)
    n = off[-1]
    rows = []
    for nd in curve.nodes:
        r = np.zeros(n, dtype=np.int32)
        r[off[nd.comp_a] : off[nd.comp_a + 1]] = _value_row(F, degrees[nd.comp_a], nd.point_a)
        rb = F.neg[_value_row(F, degrees[nd.comp_b], nd.point_b)]
        seg = slice(off[nd.comp_b], off[nd.comp_b + 1])
        r[seg] = F.add[r[seg], rb]
        rows.append(r)
    if divisor is not None:
        for comp, pt, m in divisor.points:
            block = _vanishing_rows(F, degrees[comp], pt, m)
            for br in block:
                r = np.zeros(n, dtype=np.int32)
                r[off[comp] : off[comp + 1]] = br
                rows.append(r)
    return np.array(rows, dtype=np.int32).reshape(-1, n)


def kernel_basis(curve: CurveModel, degrees, divisor: DivisorSpec | None = None):
    """Echelon basis of sections of L(-divisor) and its coordinate columns."""
    F = curve.field
    n = offsets(degrees)[-1]
    M = constraint_matrix(curve, degrees, divisor)
    basis = linalg.nullspace(F, M, ncols=n) if M.shape[0] else np.eye(n, dtype=np.int32)
    if basis.shape[0] == 0:
        return np.zeros((0, n), dtype=np.int32), []
    basis, cols = linalg.rref(F, basis)
    return basis, cols


@dataclass(frozen=True, eq=False)
class SectionSpace:
    """H^0(C, L(-B)) with an ordered echelon basis."""

    curve: CurveModel
    bundle: LineBundleSpec
    constraint: DivisorSpec | None
    basis: np.ndarray
    coord_cols: tuple[int, ...]

    @property
    def field(self) -> FieldSpec:
        return self.curve.field

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def degrees(self) -> tuple[int, ...]:
        return self.bundle.degrees

    @property
    def ambient_dim(self) -> int:
        return offsets(self.degrees)[-1]

    def basis_sections(self) -> list[Section]:
        return [Section.from_array(self.field, self.degrees, b) for b in self.basis]

    def coordinates(self, section: Section) -> np.ndarray:
        return section.array[list(self.coord_cols)]

    def contains(self, vec) -> bool:
        """Whether an ambient vector lies in the space."""
        vec = np.asarray(vec, dtype=np.int32)
        F = self.field
        recon = linalg.dot_rows(F, self.basis.T, vec[list(self.coord_cols)]) if self.dim else np.zeros_like(vec)
        return bool(np.array_equal(recon, vec))

    def from_coords(self, coords) -> Section:
        F = self.field
        coords = np.asarray(coords, dtype=np.int32)
        vec = linalg.dot_rows(F, self.basis.T, coords) if self.dim else np.zeros(self.ambient_dim, dtype=np.int32)
        return Section.from_array(F, self.degrees, vec)

    @cached_property
    def expected_dim(self) -> int:
        b = self.constraint.degree if self.constraint else 0
        return self.bundle.degree - b + 1 - arithmetic_genus(self.curve)


def section_space(curve: CurveModel, bundle: LineBundleSpec, constraint: DivisorSpec | None = None) -> SectionSpace:
    if len(bundle.degrees) != curve.n_components:
        raise ValidationError("bundle needs one degree per component")
    g = arithmetic_genus(curve)
    b = 0
    if constraint is not None:
        check_divisor(curve, constraint)
        b = constraint.degree
    e = bundle.degree
    if e - b < 2 * g - 1:
        raise SpecialRange(f"deg L(-B) = {e - b} < 2g-1 = {2 * g - 1}")
    basis, cols = kernel_basis(curve, bundle.degrees, constraint)
    space = SectionSpace(curve, bundle, constraint, basis, tuple(cols))
    if space.dim != e - b + 1 - g:
        raise SpecialRange(
            f"h0 = {space.dim} but e-b+1-g = {e - b + 1 - g}; some subcurve is special"
        )
    return space


def raw_section_space(curve: CurveModel, degrees, divisor: DivisorSpec | None = None) -> SectionSpace:
    """Section space without the non-special checks (used for auxiliary subspaces)."""
    basis, cols = kernel_basis(curve, tuple(degrees), divisor)
    return SectionSpace(curve, LineBundleSpec(tuple(degrees)), divisor, basis, tuple(cols))


# -- enumeration ---------------------------------------------------------------

def section_table(space: SectionSpace, ext_degree: int = 1, start: int = 0, stop: int | None = None,
                  budget: int | None = None) -> np.ndarray:
    """All sections over F_{q^k} as ambient index rows, lexicographic in coordinates.

    Rows ``start:stop`` of the full enumeration; a contiguous range is a
    coordinate-prefix block when its bounds are multiples of a power of Q.
    """
    E = extension(space.field, ext_degree)
    Q = E.q
    total = Q**space.dim
    stop = total if stop is None else min(stop, total)
    check_budget(stop - start, budget, "section enumeration")
    basis = embedding_table(space.field, E)[space.basis]
    coords = linalg.lex_vectors(space.dim, Q, start, stop)
    out = np.zeros((coords.shape[0], space.ambient_dim), dtype=np.int32)
    for j in range(space.dim):
        out = E.add[out, E.mul[coords[:, j : j + 1], basis[j][None, :]]]
    return out


def enumerate_sections(space: SectionSpace, ext_degree: int = 1, start: int = 0, stop: int | None = None,
                       budget: int | None = None, chunk: int = 1 << 14):
    """Yield every section over F_{q^k} exactly once, in lexicographic coordinate order."""
    E = extension(space.field, ext_degree)
    total = E.q**space.dim
    stop = total if stop is None else min(stop, total)
    check_budget(stop - start, budget, "section enumeration")
    for lo in range(start, stop, chunk):
        tab = section_table(space, ext_degree, lo, min(lo + chunk, stop), budget=None)
        for row in tab:
            yield Section.from_array(E, space.degrees, row)


def closed_points(curve: CurveModel, component: int, degree: int) -> list[ClosedPoint]:
    if degree < 1:
        raise ValidationError("closed points have degree >= 1")
    if not 0 <= component < curve.n_components:
        raise ValidationError(f"no component {component}")
    F = curve.field
    pts = [ClosedPoint(m) for m in monic_polys(F, degree) if is_irreducible_over(F, m)]
    if degree == 1:
        pts.append(ClosedPoint.infinity())
    return pts


# -- jets ------------------------------------------------------------------

def point_root(F: FieldSpec, pt: ClosedPoint) -> tuple[FieldSpec, int]:
    """The least root of a closed point's polynomial, in F_{q^f}."""
    E = extension(F, pt.degree)
    emb = embedding_table(F, E)
    xs = np.arange(E.q, dtype=np.int32)
    val = np.zeros(E.q, dtype=np.int32)
    for c in reversed(pt.poly):
        val = E.add[E.mul[val, xs], emb[c]]
    return E, int(np.flatnonzero(val == 0)[0])


def jet_field(base: FieldSpec, section_field: FieldSpec, pt: ClosedPoint) -> FieldSpec:
    return make_field(base.p, lcm(base.k * pt.degree, section_field.k))


def taylor(poly, deg: int, pt: ClosedPoint, base: FieldSpec, F: FieldSpec, mult: int) -> list[FieldElem]:
    """First ``mult`` Taylor coefficients of a section component at a closed point.

    ``poly`` has coefficients in ``F`` (an extension of ``base``); the point is
    defined over ``base``.  Values lie in the compositum of F and F_{q^f}.
    """
    poly = list(poly)
    if pt.is_infinity:
        return [FieldElem(F, int(poly[deg - j]) if deg - j >= 0 else 0) for j in range(mult)]
    V = jet_field(base, F, pt)
    Ef, root = point_root(base, pt)
    theta = int(embedding_table(Ef, V)[root])
    emb = embedding_table(F, V)
    cur = [int(emb[c]) for c in poly]
    out = []
    for _ in range(mult):
        # synthetic division by (t - theta)
        if not cur:
            out.append(FieldElem(V, 0))
            continue
        acc = 0
        quot = [0] * (len(cur) - 1)
        for i in range(len(cur) - 1, -1, -1):
            acc = int(V.add[V.mul[acc, theta], cur[i]])
            if i > 0:
                quot[i - 1] = acc
        out.append(FieldElem(V, acc))
        cur = quot
    return out


def restrict(section: Section, divisor: DivisorSpec, base: FieldSpec | None = None) -> list[list[FieldElem]]:
    """Jet of a section along a divisor: Taylor coefficients per point.

    ``base`` is the field the divisor is defined over (default: the section's).
    """
    base = section.field if base is None else base
    out = []
    for comp, pt, m in divisor.points:
        out.append(taylor(section.component(comp), section.degrees[comp], pt, base, section.field, m))
    return out


def jets_to_indices(jets) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in pj) for pj in jets)


def _jet_digits(jets) -> list[int]:
    out = []
    for pj in jets:
        for v in pj:
            out.extend(v.coeffs)
    return out


def lift_jets(space: SectionSpace, divisor: DivisorSpec, jets) -> Section | None:
    """A section of ``space`` whose jet along ``divisor`` is ``jets``; None if none exists.

    ``jets`` is a list (per divisor point) of Taylor coefficients, given as
    FieldElems or as element indices of the point's jet field.  The solve is
    done over F_p so points of any residue degree are handled uniformly.
    """
    F = space.field
    p = F.p
    Fp = make_field(p, 1)
    jet_fields = [jet_field(F, F, pt) for _, pt, _ in divisor.points]
    target = []
    for (comp, pt, m), V, pj in zip(divisor.points, jet_fields, jets):
        if len(pj) != m:
            raise ValidationError(f"jet at {pt} needs {m} coefficients, got {len(pj)}")
        for v in pj:
            if isinstance(v, FieldElem):
                if v.field != V:
                    raise ValidationError(f"jet value {v} not in {V}")
                target.extend(v.coeffs)
            else:
                target.extend(FieldElem(V, int(v)).coeffs)
    if not target:
        return Section.zero(F, space.degrees)
    columns = []
    units = [p**i for i in range(F.k)]
    for b in space.basis_sections():
        for u in units:
            columns.append(_jet_digits(restrict(b.scale(u), divisor)))
    if not columns:
        return Section.zero(F, space.degrees) if not any(target) else None
    M = np.array(columns, dtype=np.int32).T
    x = linalg.solve(Fp, M, np.array(target, dtype=np.int32))
    if x is None:
        return None
    out = Section.zero(F, space.degrees)
    for j, b in enumerate(space.basis_sections()):
        c = sum(int(x[j * F.k + i]) * p**i for i in range(F.k))
        out = out + b.scale(c)
    return out
