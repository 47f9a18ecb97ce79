"""Exact arithmetic in Z[zeta_p] for a prime p.

A :class:`CycInt` stores coordinates in the basis ``zeta^0, ..., zeta^(p-2)``;
``zeta^(p-1)`` is always rewritten as ``-(1 + zeta + ... + zeta^(p-2))``.
Character sums are naturally produced as exponent histograms
``sum_t c_t zeta^t`` (length ``p``), which :meth:`CycInt.from_exponents`
folds into canonical form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import NonRationalValue


def _normalize(p: int, c) -> tuple[int, ...]:
    """Fold a length-p exponent vector into canonical length-(p-1) coordinates."""
    c = [int(x) for x in c]
    if len(c) < p:
        c = c + [0] * (p - len(c))
    elif len(c) > p:
        folded = [0] * p
        for t, x in enumerate(c):
            folded[t % p] += x
        c = folded
    top = c[p - 1]
    return tuple(x - top for x in c[: p - 1])


@dataclass(frozen=True)
class CycInt:
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.p - 1:
            object.__setattr__(self, "coeffs", _normalize(self.p, self.coeffs))

    @classmethod
    def from_int(cls, p: int, n: int) -> CycInt:
        return cls(p, (int(n),) + (0,) * (p - 2))

    @classmethod
    def zeta_power(cls, p: int, t: int) -> CycInt:
        c = [0] * p
        c[t % p] = 1
        return cls(p, _normalize(p, c))

    @classmethod
    def from_exponents(cls, p: int, counts) -> CycInt:
        """``sum_t counts[t] * zeta^t`` for a length-p histogram."""
        return cls(p, _normalize(p, counts))

    def exponent_vector(self) -> list[int]:
        """Coordinates in the (non-unique) length-p form with last entry 0."""
        return list(self.coeffs) + [0]

    def _coerce(self, other) -> CycInt:
        if isinstance(other, CycInt):
            if other.p != self.p:
                raise ValueError("mixing cyclotomic rings of different order")
            return other
        if isinstance(other, int):
            return CycInt.from_int(self.p, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycInt(self.p, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        out = [0] * p
        a = self.exponent_vector()
        b = o.exponent_vector()
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[(i + j) % p] += x * y
        return CycInt(p, _normalize(p, out))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> CycInt:
        acc = CycInt.from_int(self.p, 1)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def normalized(self) -> CycInt:
        return CycInt(self.p, _normalize(self.p, self.coeffs))

    def galois(self, c: int) -> CycInt:
        """The automorphism zeta -> zeta^c, c prime to p."""
        p = self.p
        out = [0] * p
        for t, x in enumerate(self.exponent_vector()):
            out[(t * c) % p] += x
        return CycInt(p, _normalize(p, out))

    def conjugate(self) -> CycInt:
        return self.galois(-1)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __repr__(self) -> str:
        return f"CycInt(p={self.p}, {list(self.coeffs)})"


def cyc_as_integer(v: CycInt) -> int:
    if not v.is_rational():
        raise NonRationalValue(f"{v} is not a rational integer")
    return v.coeffs[0]


def cyc_eval(v: CycInt) -> complex:
    """Complex value under zeta -> exp(2 pi i / p), double precision."""
    with mpmath.workdps(_digits_needed(v)):
        z = _eval_mp(v)
        return complex(z)


def _digits_needed(v: CycInt) -> int:
    big = max((abs(c) for c in v.coeffs), default=0)
    return 30 + 2 * len(str(big))


def _eval_mp(v: CycInt):
    p = v.p
    acc = mpmath.mpc(0)
    for t, c in enumerate(v.coeffs):
        if c:
            acc += c * mpmath.expjpi(mpmath.mpf(2 * t) / p)
    return acc


def cyc_eval_abs(v: CycInt) -> float:
    """|v| under the standard complex embedding.

    Evaluated at a working precision that grows with the coefficient size,
    so cancellation between large coordinates cannot spoil the result.
    """
    if v.is_zero():
        return 0.0
    if v.is_rational():
        return float(abs(v.coeffs[0]))
    norm2 = v * v.conjugate()
    with mpmath.workdps(_digits_needed(norm2)):
        return float(mpmath.sqrt(abs(_eval_mp(norm2).real)))


# -- batched products of exponent histograms ---------------------------------

def histogram_product(hists: list[np.ndarray], p: int) -> np.ndarray:
    """Row-wise product of exponent histograms in Z[x]/(x^p - 1).

    ``hists`` are arrays of shape ``(N, p)``.  The result is exact: int64 is
    used only when the coefficient bound provably fits, otherwise Python ints.
    """
    bound = 1
    for h in hists:
        bound *= int(h.sum(axis=1).max(initial=0)) or 1
    dtype = np.int64 if bound < 2**62 else object
    acc = hists[0].astype(dtype)
    for h in hists[1:]:
        h = h.astype(dtype)
        out = np.zeros_like(acc)
        for s in range(p):
            # out[:, (t + s) % p] += acc[:, t] * h[:, s]
            out += np.roll(acc * h[:, s : s + 1], s, axis=1)
        acc = out
    return acc


def sum_histograms(h: np.ndarray, p: int) -> CycInt:
    """Exact CycInt sum of the rows of an exponent-histogram array."""
    totals = [int(x) for x in h.astype(object).sum(axis=0)] if h.size else [0] * p
    return CycInt.from_exponents(p, totals)


def histogram_to_cyc(row, p: int) -> CycInt:
    return CycInt.from_exponents(p, [int(x) for x in row])


def abs_bound_ok(value: float, bound: float, rel: float = 1e-9) -> bool:
    return value <= bound * (1 + rel) or math.isclose(value, bound, rel_tol=rel)
