"""Exact brute-force counts of section tuples on hypersurfaces.

The diagonal kernel (Fermat and other diagonal forms) precomputes, for each
variable, the table of ``c_i * (P_i + a)^d`` over all sections ``a`` and then
walks the lexicographic tuple stream keeping running prefix sums: moving to
the next tuple only adds the changed variable's table row.  The last
variable is matched by an exact lookup of the negated prefix sum in its
table's value histogram, so every tuple is accounted for once.

General (non-diagonal) forms are evaluated monomial by monomial on chunks
of the full tuple stream.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product

import numpy as np

from .curve import (
    ClosedPoint,
    CurveModel,
    DivisorSpec,
    LineBundleSpec,
    Section,
    SectionSpace,
    arithmetic_genus,
    lift_jets,
    offsets,
    raw_section_space,
    section_space,
    section_table,
    _value_row,
)
from .errors import IdentityViolation, InconsistentSlope, ValidationError, check_budget
from .field import FieldSpec, embedding_table, extension, poly_mul, poly_pow

ROW_LIMIT = 1 << 21


@dataclass(frozen=True)
class EquationSpec:
    """A homogeneous form of degree d in n+1 variables.

    ``coefficients`` (explicit kind) is a tuple of ``(exponents, coef)`` with
    ``coef`` an element index of the base field.
    """

    kind: str
    d: int
    n_plus_1: int
    coefficients: tuple[tuple[tuple[int, ...], int], ...] = ()

    def __post_init__(self):
        if self.kind not in ("fermat", "explicit"):
            raise ValidationError(f"unknown equation kind {self.kind!r}")
        if self.d < 1 or self.n_plus_1 < 1:
            raise ValidationError("need d >= 1 and at least one variable")
        if self.kind == "explicit":
            coeffs = tuple((tuple(int(x) for x in ex), int(c)) for ex, c in self.coefficients)
            for ex, _ in coeffs:
                if len(ex) != self.n_plus_1 or sum(ex) != self.d or min(ex) < 0:
                    raise ValidationError(f"monomial {ex} is not of degree {self.d} in {self.n_plus_1} variables")
            object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def fermat(cls, d: int, n: int) -> EquationSpec:
        return cls("fermat", d, n + 1)

    @property
    def n(self) -> int:
        return self.n_plus_1 - 1

    def diagonal(self) -> list[int] | None:
        """Per-variable coefficients if the form is diagonal, else None."""
        if self.kind == "fermat":
            return [1] * self.n_plus_1
        diag = [0] * self.n_plus_1
        for ex, c in self.coefficients:
            nz = [i for i, x in enumerate(ex) if x]
            if len(nz) != 1:
                if c:
                    return None
                continue
            diag[nz[0]] = c
        return diag

    def monomials(self) -> list[tuple[tuple[int, ...], int]]:
        if self.kind == "fermat":
            out = []
            for i in range(self.n_plus_1):
                ex = [0] * self.n_plus_1
                ex[i] = self.d
                out.append((tuple(ex), 1))
            return out
        return [(ex, c) for ex, c in self.coefficients if c]

    def evaluate(self, xs: list[Section], base: FieldSpec | None = None) -> Section:
        """F(x_0, ..., x_n) as a section of L^d (reference path, no tables).

        ``base`` is the field the coefficients live in (default: that of xs).
        """
        if len(xs) != self.n_plus_1:
            raise ValidationError("wrong number of variables")
        F = xs[0].field
        emb = embedding_table(base or F, F)
        degs = tuple(self.d * e for e in xs[0].degrees)
        acc = Section.zero(F, degs)
        for ex, c in self.monomials():
            term = Section(F, (0,) * len(degs), (1,) * len(degs))
            for x, k in zip(xs, ex):
                term = term * x.power(k)
            acc = acc + term.scale(int(emb[c]))
        return acc


@dataclass(frozen=True)
class CountResult:
    count: int
    q: int
    k: int
    d: int
    n: int
    e: int
    b: int
    g: int

    @property
    def exponent(self) -> int:
        """Exponent of q^k in the main term e(n+1-d) + n(1-g) - bn."""
        return self.e * (self.n + 1 - self.d) + self.n * (1 - self.g) - self.b * self.n

    @property
    def main_term(self) -> Fraction:
        return Fraction(self.q) ** (self.k * self.exponent)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.count) / self.main_term

    def as_dict(self) -> dict:
        return {
            "count": self.count,
            "q": self.q,
            "k": self.k,
            "d": self.d,
            "n": self.n,
            "e": self.e,
            "b": self.b,
            "g": self.g,
            "main_exponent": self.k * self.exponent,
            "ratio": self.ratio,
        }


# -- setup shared with the circle-method module ------------------------------

def resolve_lifts(space_L: SectionSpace, constraint: DivisorSpec | None, target_jets, n_plus_1: int,
                  lifts: list[Section] | None = None) -> list[Section]:
    """One lift P_i in H^0(C, L) per variable."""
    F = space_L.field
    if lifts is not None:
        if len(lifts) != n_plus_1:
            raise ValidationError("need one lift per variable")
        return list(lifts)
    if constraint is None or not constraint.points:
        if target_jets:
            raise ValidationError("target jets given without a constraint divisor")
        return [Section.zero(F, space_L.degrees)] * n_plus_1
    if target_jets is None:
        raise ValidationError("a constraint divisor needs target jets")
    if len(target_jets) != n_plus_1:
        raise ValidationError("need one jet vector per variable")
    out = []
    for jets in target_jets:
        P = lift_jets(space_L, constraint, jets)
        if P is None:
            raise ValidationError(f"jets {jets} do not lift to H^0(C, L)")
        out.append(P)
    return out


def _global_space(curve: CurveModel, bundle: LineBundleSpec) -> SectionSpace:
    return raw_section_space(curve, bundle.degrees, None)


def power_tables(V: SectionSpace, lifts: list[Section], d: int, coeffs: list[int], ext_degree: int,
                 budget: int | None = None) -> list[np.ndarray]:
    """Per variable, the rows c_i * (P_i + a)^d over all a in V (over F_{q^k})."""
    E = extension(V.field, ext_degree)
    emb = embedding_table(V.field, E)
    tab = section_table(V, ext_degree, budget=budget)
    off = offsets(V.degrees)
    out = []
    for P, c in zip(lifts, coeffs):
        X = E.add[tab, emb[P.array][None, :]]
        parts = [poly_pow(E, X[:, off[i] : off[i + 1]], d) for i in range(len(V.degrees))]
        D = np.concatenate(parts, axis=1)
        out.append(E.mul[int(emb[c]), D])
    return out


def _encoder(Q: int, m: int):
    if m * math.log2(max(Q, 2)) <= 62:
        w = (np.int64(Q) ** np.arange(m, dtype=np.int64)).astype(np.int64)

        def enc(rows):
            return rows.astype(np.int64) @ w

        return enc

    def enc_bytes(rows):
        rows = np.ascontiguousarray(rows.astype(np.int32))
        return np.array([r.tobytes() for r in rows], dtype=object)

    return enc_bytes


def _diagonal_count_range(E: FieldSpec, tables: list[np.ndarray], lo: int, hi: int) -> int:
    """Tuples with first variable in rows [lo, hi) whose table rows sum to zero."""
    m = tables[0].shape[1]
    enc = _encoder(E.q, m)
    if len(tables) == 1:
        rows = tables[0][lo:hi]
        return int((rows == 0).all(axis=1).sum()) if m else hi - lo
    last = tables[-1]
    if m == 0:
        total = hi - lo
        for t in tables[1:]:
            total *= t.shape[0]
        return total
    keys, counts = np.unique(enc(last), return_counts=True)
    if keys.dtype == object:
        lookup = dict(zip(keys.tolist(), counts.tolist()))
    mids = tables[1:-1]
    total = 0
    stack = [(tables[0][lo:hi], 0)]
    while stack:
        S, depth = stack.pop()
        if depth == len(mids):
            need = enc(E.neg[S])
            if keys.dtype == object:
                total += sum(lookup.get(k, 0) for k in need.tolist())
            else:
                pos = np.searchsorted(keys, need)
                pos = np.minimum(pos, keys.size - 1)
                hit = keys[pos] == need
                total += int(counts[pos][hit].sum())
            continue
        T = mids[depth]
        step = max(1, ROW_LIMIT // max(T.shape[0], 1))
        for s in range(S.shape[0] - 1, -1, -step):
            block = S[max(0, s - step + 1) : s + 1]
            nxt = E.add[block[:, None, :], T[None, :, :]].reshape(-1, m)
            stack.append((nxt, depth + 1))
    return total


def _run_diagonal(args):
    E, tables, lo, hi = args
    return _diagonal_count_range(E, tables, lo, hi)


def diagonal_count(E: FieldSpec, tables: list[np.ndarray], workers: int = 1) -> int:
    """Number of index tuples (a_0..a_n) with sum_i tables[i][a_i] == 0.

    The first variable's range is split into contiguous blocks; partial
    counts are merged by integer addition, so the result does not depend on
    ``workers``.
    """
    N0 = tables[0].shape[0]
    if workers <= 1 or N0 < 2:
        return _diagonal_count_range(E, tables, 0, N0)
    bounds = np.linspace(0, N0, min(workers, N0) + 1).astype(int)
    jobs = [(E, tables, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return sum(ex.map(_run_diagonal, jobs))


def _general_values(E: FieldSpec, eq: EquationSpec, Xs: list[np.ndarray], degrees, base: FieldSpec) -> np.ndarray:
    """F evaluated on a batch of tuples; Xs[i] are (N, amb_L) rows of variable i."""
    emb = embedding_table(base, E)
    off = offsets(degrees)
    parts = []
    for ci in range(len(degrees)):
        comp = [X[:, off[ci] : off[ci + 1]] for X in Xs]
        width = eq.d * degrees[ci] + 1
        acc = np.zeros((Xs[0].shape[0], width), dtype=np.int32)
        for ex, c in eq.monomials():
            term = np.ones((Xs[0].shape[0], 1), dtype=np.int32)
            for X, k in zip(comp, ex):
                if k:
                    term = poly_mul(E, term, poly_pow(E, X, k))
            term = E.mul[int(emb[c]), term]
            acc = E.add[acc, term]
        parts.append(acc)
    return np.concatenate(parts, axis=1)


def _tuple_chunks(Ns: list[int], chunk: int):
    total = math.prod(Ns)
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        cols = []
        for N in reversed(Ns):
            cols.append(idx % N)
            idx //= N
        yield list(reversed(cols))


def general_count(E: FieldSpec, eq: EquationSpec, rows: list[np.ndarray], degrees, base: FieldSpec) -> int:
    total = 0
    Ns = [r.shape[0] for r in rows]
    for cols in _tuple_chunks(Ns, 1 << 15):
        Xs = [r[c] for r, c in zip(rows, cols)]
        vals = _general_values(E, eq, Xs, degrees, base)
        total += int((vals == 0).all(axis=1).sum())
    return total


def brute_force_count(curve: CurveModel, bundle: LineBundleSpec, constraint: DivisorSpec | None,
                      target_jets, eq: EquationSpec, ext_degree: int = 1, budget: int | None = None,
                      workers: int = 1, lifts: list[Section] | None = None) -> CountResult:
    """#{x in H^0(C,L)^(n+1) over F_{q^k} : F(x) = 0, x|_B = P}."""
    V = section_space(curve, bundle, constraint)
    L = _global_space(curve, bundle)
    P = resolve_lifts(L, constraint, target_jets, eq.n_plus_1, lifts)
    E = extension(curve.field, ext_degree)
    N = E.q**V.dim
    check_budget(N**eq.n_plus_1, budget, "tuple enumeration")
    diag = eq.diagonal()
    b = constraint.degree if constraint else 0
    if diag is not None:
        tables = power_tables(V, P, eq.d, diag, ext_degree)
        count = diagonal_count(E, tables, workers)
    else:
        emb = embedding_table(curve.field, E)
        tab = section_table(V, ext_degree)
        rows = [E.add[tab, emb[p.array][None, :]] for p in P]
        count = general_count(E, eq, rows, bundle.degrees, curve.field)
    return CountResult(count, curve.field.q, ext_degree, eq.d, eq.n, bundle.degree, b, arithmetic_genus(curve))


def naive_count(curve: CurveModel, bundle: LineBundleSpec, constraint: DivisorSpec | None, target_jets,
                eq: EquationSpec, lifts: list[Section] | None = None) -> int:
    """Tuple-by-tuple reference count over the base field using Section arithmetic only."""
    V = section_space(curve, bundle, constraint)
    L = _global_space(curve, bundle)
    P = resolve_lifts(L, constraint, target_jets, eq.n_plus_1, lifts)
    secs = [Section.from_array(V.field, V.degrees, r) for r in section_table(V)]
    total = 0
    for combo in product(secs, repeat=eq.n_plus_1):
        xs = [p + a for p, a in zip(P, combo)]
        if eq.evaluate(xs).is_zero():
            total += 1
    return total


# -- slopes ------------------------------------------------------------------

@dataclass(frozen=True)
class SlopeEstimate:
    dim_estimate: int
    leading_coeff: Fraction
    irreducible_hint: bool
    constant: float
    pair_dims: tuple[int, ...]

    @property
    def flagged(self) -> bool:
        return len(set(self.pair_dims)) > 1


def count_slope(counts: list[CountResult], constant: float = 3.0, strict: bool = False) -> SlopeEstimate:
    """Dimension and leading coefficient from counts over F_{q^k}, k = 1..K.

    Each consecutive pair gives ``round(log_q(N_k / N_{k-1}))``; the estimate
    is the one from the last pair.  Disagreeing pairs set ``flagged`` (or
    raise InconsistentSlope when ``strict``).
    """
    if len(counts) < 2:
        raise ValidationError("need counts for at least two extension degrees")
    if any(c.count <= 0 for c in counts):
        raise ValidationError("slope estimation needs positive counts")
    q = counts[0].q
    ks = [c.k for c in counts]
    if ks != list(range(ks[0], ks[0] + len(ks))):
        raise ValidationError("counts must be for consecutive extension degrees")
    pair = []
    for a, b in zip(counts, counts[1:]):
        pair.append(round((math.log(b.count) - math.log(a.count)) / math.log(q)))
    dim = pair[-1]
    K = counts[-1].k
    coeff = Fraction(counts[-1].count, 1) / Fraction(q) ** (K * dim)
    hint = abs(float(coeff) - 1.0) <= constant * q ** (-K / 2)
    est = SlopeEstimate(dim, coeff, hint, constant, tuple(pair))
    if strict and est.flagged:
        raise InconsistentSlope(f"extension pairs give dimensions {pair}")
    return est


# -- nodal gluing ----------------------------------------------------------------

@dataclass(frozen=True)
class JetCountTable:
    """Solution counts on one piece, keyed by the values of (x_0..x_n) at marked points.

    Keys are tuples over points of tuples over variables.
    """

    points: tuple[tuple[int, object], ...]
    counts: dict = dc_field(hash=False, compare=False)
    q: int = 0
    k: int = 1
    d: int = 1
    n: int = 0
    e: int = 0
    g: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def count_by_jets(curve: CurveModel, bundle: LineBundleSpec, points, eq: EquationSpec,
                  ext_degree: int = 1, budget: int | None = None) -> JetCountTable:
    """Tally solutions on ``curve`` by their values at rational ``points``.

    ``points`` is a list of (component, ClosedPoint).  Every tuple of global
    sections is visited; no surjectivity onto the jet space is assumed.
    """
    L = _global_space(curve, bundle)
    E = extension(curve.field, ext_degree)
    N = E.q**L.dim
    check_budget(N**eq.n_plus_1, budget, "tuple enumeration")
    tab = section_table(L, ext_degree)
    emb = embedding_table(curve.field, E)
    off = offsets(bundle.degrees)
    vrows = []
    for comp, pt in points:
        row = np.zeros(off[-1], dtype=np.int32)
        mapped = pt if pt.is_infinity else ClosedPoint(tuple(int(emb[c]) for c in pt.poly))
        row[off[comp] : off[comp + 1]] = _value_row(E, bundle.degrees[comp], mapped)
        vrows.append(row)
    vrows = np.array(vrows, dtype=np.int32).reshape(len(points), off[-1])
    counts: dict = {}
    diag = eq.diagonal()
    Ns = [tab.shape[0]] * eq.n_plus_1
    if diag is not None:
        pw = [E.mul[int(emb[c]), np.concatenate(
            [poly_pow(E, tab[:, off[i] : off[i + 1]], eq.d) for i in range(len(bundle.degrees))], axis=1)]
            for c in diag]
    vals = np.stack([_dot(E, tab, r) for r in vrows], axis=1) if len(points) else np.zeros((tab.shape[0], 0), np.int32)
    for cols in _tuple_chunks(Ns, 1 << 15):
        if diag is not None:
            acc = pw[0][cols[0]]
            for i in range(1, eq.n_plus_1):
                acc = E.add[acc, pw[i][cols[i]]]
        else:
            acc = _general_values(E, eq, [tab[c] for c in cols], bundle.degrees, curve.field)
        ok = (acc == 0).all(axis=1)
        if not ok.any():
            continue
        sel = [c[ok] for c in cols]
        # key[point][var]
        keyarr = np.stack([vals[s] for s in sel], axis=2)  # (M, points, vars)
        uniq, cnt = np.unique(keyarr.reshape(keyarr.shape[0], -1), axis=0, return_counts=True)
        for u, c in zip(uniq, cnt):
            key = tuple(tuple(int(x) for x in u[j * eq.n_plus_1 : (j + 1) * eq.n_plus_1]) for j in range(len(points)))
            counts[key] = counts.get(key, 0) + int(c)
    return JetCountTable(tuple(points), counts, curve.field.q, ext_degree, eq.d, eq.n, bundle.degree,
                         arithmetic_genus(curve))


def _dot(E: FieldSpec, rows: np.ndarray, w: np.ndarray) -> np.ndarray:
    prods = E.mul[rows, w[None, :]]
    acc = np.zeros(rows.shape[0], dtype=np.int32)
    for j in range(rows.shape[1]):
        acc = E.add[acc, prods[:, j]]
    return acc


def nodal_fiber_product_count(left: JetCountTable, right: JetCountTable | None,
                              pairs: list[tuple[int, int]], direct: CountResult | None = None) -> CountResult:
    """Count on a glued curve from jet-indexed counts of its pieces.

    With ``right`` given, ``pairs`` lists (left point index, right point
    index) nodes W joining the two pieces, and the count is
    ``sum_w N_left(w) * N_right(w)``.  With ``right`` None the pairs are
    self-nodes of ``left`` and the count sums the entries whose values at
    the two points of each pair agree.  ``direct``, when supplied, must
    match exactly.
    """
    if not pairs:
        raise ValidationError("gluing along an empty W gives a disconnected curve")
    if right is None:
        used = [i for pr in pairs for i in pr]
        if len(set(used)) != len(used):
            raise ValidationError("self-node pairs must be disjoint")
        count = sum(c for key, c in left.counts.items() if all(key[a] == key[b] for a, b in pairs))
        g = left.g + len(pairs)
        e = left.e
    else:
        li = [a for a, _ in pairs]
        ri = [b for _, b in pairs]
        if len(set(li)) != len(li) or len(set(ri)) != len(ri):
            raise ValidationError("node pairs must be disjoint")
        grouped: dict = {}
        for key, c in right.counts.items():
            w = tuple(key[b] for b in ri)
            grouped[w] = grouped.get(w, 0) + c
        count = 0
        for key, c in left.counts.items():
            w = tuple(key[a] for a in li)
            count += c * grouped.get(w, 0)
        g = left.g + right.g + len(pairs) - 1
        e = left.e + right.e
    res = CountResult(count, left.q, left.k, left.d, left.n, e, 0, g)
    if direct is not None and direct.count != count:
        raise IdentityViolation(f"fiber product gives {count}, direct count gives {direct.count}")
    return res
