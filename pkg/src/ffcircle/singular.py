"""Singular loci of functionals, the Katz-type bound and the minor-arc exponent.

Sing_alpha is the set of a in H^0(C, L(-B)) (over F_{q^k}) such that the
linear form b -> alpha(a^(d-1) b) vanishes identically.  Its dimension is
estimated from point counts over consecutive extensions; for d = 2 it is
the radical of the symmetric form (a, b) -> alpha(ab), which gives an exact
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .circle import CircleSetup, Functional, exp_sum
from .curve import offsets, section_table
from .cyclotomic import abs_bound_ok, cyc_eval_abs
from .errors import NonpositiveDenominator, ValidationError, check_budget
from .field import embedding_table, extension, poly_mul, poly_pow


# -- point counts ----------------------------------------------------------------

def sing_count(setup: CircleSetup, alpha: Functional, ext_degree: int = 1, budget: int | None = None) -> int:
    """#{a in V over F_{q^k} : alpha_k(a^(d-1) b) = 0 for every b in V}."""
    V = setup.V
    E = extension(setup.field, ext_degree)
    check_budget(E.q**V.dim, budget, "singular-locus enumeration")
    emb = embedding_table(setup.field, E)
    a = section_table(V, ext_degree)
    basis = emb[V.basis]
    alpha_k = emb[np.array(alpha.coords, dtype=np.int32)]
    cols = list(setup.W.coord_cols)
    off = offsets(V.degrees)
    powers = [poly_pow(E, a[:, off[c] : off[c + 1]], setup.d - 1) for c in range(len(V.degrees))]
    ok = np.ones(a.shape[0], dtype=bool)
    for bvec in basis:
        prod = np.concatenate(
            [poly_mul(E, powers[c], bvec[None, off[c] : off[c + 1]]) for c in range(len(V.degrees))], axis=1)
        vals = linalg.dot_rows(E, prod[:, cols], alpha_k)
        ok &= vals == 0
    return int(ok.sum())


def bilinear_matrix(setup: CircleSetup, alpha: Functional) -> np.ndarray:
    """Gram matrix alpha(v_i v_j) on the basis of V."""
    secs = setup.V.basis_sections()
    n = len(secs)
    M = np.zeros((n, n), dtype=np.int32)
    for i in range(n):
        for j in range(n):
            M[i, j] = alpha(secs[i] * secs[j])
    return M


def quadratic_sing_count(setup: CircleSetup, alpha: Functional, ext_degree: int = 1) -> int:
    """For d = 2: the radical of alpha(ab) has q^(k (dim - rank)) points."""
    if setup.d != 2:
        raise ValidationError("the bilinear-form oracle applies to d = 2")
    r = linalg.rank(setup.field, bilinear_matrix(setup, alpha))
    return setup.q ** (ext_degree * (setup.V.dim - r))


# -- dimension -------------------------------------------------------------------

@dataclass(frozen=True)
class SingProfile:
    alpha: Functional
    counts: tuple[int, ...]
    dim_estimate: int
    flagged: bool
    pair_dims: tuple[int, ...] = ()


def sing_dim(setup: CircleSetup, alpha: Functional, K: int = 2, budget: int | None = None) -> SingProfile:
    """Dimension of Sing_alpha from counts over F_{q^k}, k = 1..K.

    An empty locus (possible only for d = 1 and alpha nonzero on V) gets
    dimension -1.
    """
    if K < 2:
        raise ValidationError("need K >= 2 extension degrees")
    counts = tuple(sing_count(setup, alpha, k, budget) for k in range(1, K + 1))
    if all(c == 0 for c in counts):
        return SingProfile(alpha, counts, -1, False, ())
    if any(c == 0 for c in counts):
        raise ValidationError(f"inconsistent singular-locus counts {counts}")
    q = setup.q
    pairs = tuple(round((math.log(b) - math.log(a)) / math.log(q)) for a, b in zip(counts, counts[1:]))
    return SingProfile(alpha, counts, pairs[-1], len(set(pairs)) > 1, pairs)


# -- Katz-type bound ---------------------------------------------------------------

def katz_bound(d: int, e: int, b: int, g: int, q: int, sing_dimension: int) -> float:
    """3 (d+1)^(e-b-g+1) q^((e-b+g-1+dim Sing)/2)."""
    return 3.0 * (d + 1) ** (e - b - g + 1) * math.sqrt(q) ** (e - b + g - 1 + sing_dimension)


@dataclass(frozen=True)
class KatzCheck:
    holds: bool
    slack: float
    magnitudes: tuple[float, ...]
    bound: float


def katz_bound_check(setup: CircleSetup, alpha: Functional, profile: SingProfile,
                     magnitudes=None, rel: float = 1e-9) -> KatzCheck:
    """Compare |S_1(alpha)_i| for every i against the bound; slack = max ratio."""
    if magnitudes is None:
        magnitudes = [cyc_eval_abs(exp_sum(setup, alpha, i)) for i in range(setup.n_plus_1)]
    bound = katz_bound(setup.d, setup.e, setup.b, setup.g, setup.q, profile.dim_estimate)
    slack = max(m / bound for m in magnitudes)
    holds = all(abs_bound_ok(m, bound, rel) for m in magnitudes)
    return KatzCheck(holds, slack, tuple(float(m) for m in magnitudes), bound)


# -- gamma and the minor-arc inequality ----------------------------------------------

@dataclass(frozen=True)
class GammaInterval:
    d: int
    p: int
    lower: Fraction
    upper: Fraction

    def endpoints(self) -> tuple[Fraction, Fraction]:
        return (self.lower, self.upper)


def gamma_interval(d: int, p: int) -> GammaInterval:
    """(d-2)/(2d-2) <= gamma <= min((d-2)/(2d-2) (1 + d/p), (d-2)/(d-1))."""
    if d < 3:
        raise ValidationError("gamma is only bounded for d >= 3")
    lo = Fraction(d - 2, 2 * d - 2)
    hi = min(lo * (1 + Fraction(d, p)), Fraction(d - 2, d - 1))
    return GammaInterval(d, p, lo, hi)


def _genus_term(d: int, g: int) -> Fraction:
    if d <= 2:
        raise ValidationError("the minor-arc inequality divides by d - 2; need d >= 3")
    return Fraction(2 * max(2 * g - 1, 0), d - 2)


def nbound_denominator(d: int, gamma, e: int, b: int, g: int) -> Fraction:
    gamma = Fraction(gamma)
    return (1 - gamma) * (e - b) - 2 * g - gamma * _genus_term(d, g)


def nbound_rhs(d: int, gamma, e: int, b: int, g: int) -> Fraction:
    """The value n must exceed for the explicit minor-arc term to decay."""
    gamma = Fraction(gamma)
    M = _genus_term(d, g)
    den = (1 - gamma) * (e - b) - 2 * g - gamma * M
    if den <= 0:
        raise NonpositiveDenominator(f"denominator {den} <= 0: minor-arc inequality inapplicable")
    return ((2 * d - 1 - gamma) * (e - b) - 2 * g - gamma * M) / den


def minor_envelope_exponent(d: int, n: int, e: int, b: int, g: int, gamma) -> Fraction:
    """Exponent of q in the explicit minor-arc term, after normalization."""
    gamma = Fraction(gamma)
    E = e - b
    M = _genus_term(d, g)
    return (d + 1) * E + 2 - 2 * g + Fraction(n - 1) * (E + 2 + (E + M) * gamma) / 2 - (E - g + 1) * (n + 1)

