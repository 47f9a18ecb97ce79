"""Finite fields F_{p^k} backed by lookup tables.

Elements are encoded as integers ``0 <= index < q`` whose base-``p`` digits
are the power-basis coordinates (lowest degree first).  The prime subfield
is therefore ``{0, ..., p-1}`` in every field of characteristic ``p``, and
field operations on numpy index arrays reduce to fancy indexing into
``q x q`` tables.

The defining modulus of F_{p^k} is the lexicographically least monic
irreducible polynomial of degree ``k``, coefficients compared from the
constant term upwards.  For ``k == 1`` this is ``x`` itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import product

import numpy as np

from .cyclotomic import CycInt
from .errors import IncompatibleTower, ValidationError

MAX_FIELD_ORDER = 4096


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# -- dense polynomial helpers over F_p (lists, lowest degree first) --------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    inv_lead = pow(m[-1], -1, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _pmod(out, m, p)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Rabin-style test for a monic polynomial over F_p."""
    k = len(poly) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    m = list(poly)
    if m[0] % p == 0:
        return False
    xp = [0, 1]
    for _ in range(k // 2):
        # xp <- xp^p mod m
        acc = [1]
        base = xp
        e = p
        while e:
            if e & 1:
                acc = _pmulmod(acc, base, m, p)
            base = _pmulmod(base, base, m, p)
            e >>= 1
        xp = acc
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(m, _trim(diff), p)) > 1:
            return False
    return True


def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree k (low-degree first)."""
    for tail in product(range(p), repeat=k):
        cand = tail + (1,)
        if is_irreducible(cand, p):
            return cand
    raise ValidationError(f"no irreducible polynomial of degree {k} over F_{p}")  # pragma: no cover


# -- table construction -----------------------------------------------------

@dataclass
class _Tables:
    digits: np.ndarray
    add: np.ndarray
    neg: np.ndarray
    sub: np.ndarray
    mul: np.ndarray
    inv: np.ndarray
    trace: np.ndarray
    frobenius: np.ndarray


def _build_tables(p: int, k: int, modulus: tuple[int, ...]) -> _Tables:
    q = p**k
    idx = np.arange(q)
    digits = np.stack([(idx // p**i) % p for i in range(k)], axis=1).astype(np.int64)
    weights = p ** np.arange(k, dtype=np.int64)

    def encode(d):
        return (d % p) @ weights

    add = encode(digits[:, None, :] + digits[None, :, :]).astype(np.int32)
    neg = encode(-digits).astype(np.int32)
    sub = add[:, neg]

    prod = np.zeros((q, q, 2 * k - 1), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            prod[:, :, i + j] += digits[:, None, i] * digits[None, :, j]
    prod %= p
    for top in range(2 * k - 2, k - 1, -1):
        c = prod[:, :, top].copy()
        prod[:, :, top] = 0
        for i in range(k):
            prod[:, :, top - k + i] -= c * modulus[i]
        prod %= p
    mul = encode(prod[:, :, :k]).astype(np.int32)

    inv = np.zeros(q, dtype=np.int32)
    inv[1:] = np.argmax(mul[1:] == 1, axis=1)

    frob = idx.astype(np.int32)
    for _ in range(p - 1):
        frob = mul[frob, idx]
    tr = idx.astype(np.int32)
    conj = idx.astype(np.int32)
    for _ in range(k - 1):
        conj = frob[conj]
        tr = add[tr, conj]
    return _Tables(digits, add, neg, sub, mul, inv, tr, frob.astype(np.int32))


@lru_cache(maxsize=None)
def _tables_for(p: int, k: int, modulus: tuple[int, ...]) -> _Tables:
    return _build_tables(p, k, modulus)


@dataclass(frozen=True)
class FieldSpec:
    """The finite field F_{p^k} = F_p[x]/(modulus)."""

    p: int
    k: int
    modulus: tuple[int, ...]
    _t: _Tables = dc_field(default=None, repr=False, compare=False, hash=False)

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def tables(self) -> _Tables:
        t = self._t
        if t is None:
            t = _tables_for(self.p, self.k, self.modulus)
            object.__setattr__(self, "_t", t)
        return t

    # array-level operations on element indices
    @property
    def add(self) -> np.ndarray:
        return self.tables.add

    @property
    def sub(self) -> np.ndarray:
        return self.tables.sub

    @property
    def neg(self) -> np.ndarray:
        return self.tables.neg

    @property
    def mul(self) -> np.ndarray:
        return self.tables.mul

    @property
    def inv(self) -> np.ndarray:
        return self.tables.inv

    @property
    def trace_table(self) -> np.ndarray:
        return self.tables.trace

    def elem(self, value: int | tuple[int, ...] | list[int]) -> FieldElem:
        if isinstance(value, (tuple, list)):
            if len(value) > self.k or any(not 0 <= c < self.p for c in value):
                raise ValidationError(f"bad coefficients {value} for F_{self.q}")
            value = sum(c * self.p**i for i, c in enumerate(value))
        if not 0 <= value < self.q:
            raise ValidationError(f"{value} is not an element index of F_{self.q}")
        return FieldElem(self, int(value))

    def elements(self):
        for i in range(self.q):
            yield FieldElem(self, i)

    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, 0)

    @property
    def one(self) -> FieldElem:
        return FieldElem(self, 1)

    @property
    def generator(self) -> FieldElem:
        """The class of x in F_p[x]/(modulus)."""
        return FieldElem(self, self.p if self.k > 1 else 0)

    def power(self, x: int, e: int) -> int:
        acc, base = 1, x
        while e:
            if e & 1:
                acc = int(self.mul[acc, base])
            base = int(self.mul[base, base])
            e >>= 1
        return acc

    def __str__(self) -> str:
        return f"F_{self.q}"


@lru_cache(maxsize=None)
def make_field(p: int, k: int = 1) -> FieldSpec:
    """Return the canonical field F_{p^k}.

    Repeated calls with the same arguments return the same object.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise ValidationError(f"characteristic {p!r} is not prime")
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"extension degree must be >= 1, got {k!r}")
    if p**k > MAX_FIELD_ORDER:
        raise ValidationError(f"F_{p}^{k} exceeds the table limit {MAX_FIELD_ORDER}")
    return FieldSpec(p, k, least_irreducible(p, k))


@dataclass(frozen=True)
class FieldElem:
    field: FieldSpec
    index: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.field.tables.digits[self.index])

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise ValidationError(f"mixing elements of {self.field} and {other.field}")
            return other.index
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return FieldElem(self.field, int(self.field.add[self.index, o]))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return FieldElem(self.field, int(self.field.sub[self.index, o]))

    def __rsub__(self, other):
        o = self._other(other)
        return FieldElem(self.field, int(self.field.sub[o, self.index]))

    def __neg__(self):
        return FieldElem(self.field, int(self.field.neg[self.index]))

    def __mul__(self, other):
        o = self._other(other)
        return FieldElem(self.field, int(self.field.mul[self.index, o]))

    __rmul__ = __mul__

    def inverse(self) -> FieldElem:
        if self.index == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldElem(self.field, int(self.field.inv[self.index]))

    def __truediv__(self, other):
        o = self._other(other)
        return self * FieldElem(self.field, o).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElem(self.field, self.field.power(self.index, e))

    def __bool__(self) -> bool:
        return self.index != 0

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        return f"FieldElem({self.field}, {self.coeffs})"


# -- towers -----------------------------------------------------------------

_EMBED_CACHE: dict[tuple[FieldSpec, FieldSpec], np.ndarray] = {}


def embedding_table(source: FieldSpec, target: FieldSpec) -> np.ndarray:
    """Index map of the fixed embedding ``source -> target``.

    The generator of ``source`` goes to the least (by index) root of the
    source modulus in ``target``.
    """
    key = (source, target)
    tab = _EMBED_CACHE.get(key)
    if tab is not None:
        return tab
    if source.p != target.p or target.k % source.k:
        raise IncompatibleTower(f"{source} does not embed in {target}")
    if source == target:
        tab = np.arange(source.q, dtype=np.int32)
    else:
        xs = np.arange(target.q, dtype=np.int32)
        val = np.zeros(target.q, dtype=np.int32)
        for c in reversed(source.modulus):
            val = target.add[target.mul[val, xs], c]
        root = int(np.flatnonzero(val == 0)[0])
        powers = [1]
        for _ in range(source.k - 1):
            powers.append(int(target.mul[powers[-1], root]))
        digits = source.tables.digits
        tab = np.zeros(source.q, dtype=np.int32)
        for i, r in enumerate(powers):
            tab = target.add[tab, target.mul[digits[:, i].astype(np.int32), r]]
    _EMBED_CACHE[key] = tab
    return tab


def extension(field: FieldSpec, degree: int) -> FieldSpec:
    """The field F_{q^degree} over ``field`` (same canonical construction)."""
    return make_field(field.p, field.k * degree)


def embed(elem: FieldElem, target: FieldSpec) -> FieldElem:
    return FieldElem(target, int(embedding_table(elem.field, target)[elem.index]))


def trace(elem: FieldElem) -> FieldElem:
    """Absolute trace to the prime field F_p."""
    return FieldElem(make_field(elem.field.p, 1), int(elem.field.trace_table[elem.index]))


def psi(elem: FieldElem, twist: FieldElem | None = None) -> CycInt:
    """The additive character x -> zeta_p^{Tr(c x)} with c = twist (default 1)."""
    x = elem if twist is None else elem * twist
    return CycInt.zeta_power(elem.field.p, int(elem.field.trace_table[x.index]))


def trace_form(field: FieldSpec) -> np.ndarray:
    """Gram matrix Tr(x^i x^j) over F_p of the power basis, as integers."""
    k, p = field.k, field.p
    g = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            g[i, j] = field.trace_table[field.mul[p**i, p**j]]
    return g


# -- batched arithmetic on index arrays --------------------------------------

def poly_mul(F: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of coefficient arrays along the last axis (broadcasting)."""
    la, lb = a.shape[-1], b.shape[-1]
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (la + lb - 1,)
    out = np.zeros(shape, dtype=np.int32)
    for i in range(la):
        term = F.mul[a[..., i : i + 1], b]
        out[..., i : i + lb] = F.add[out[..., i : i + lb], term]
    return out


def poly_pow(F: FieldSpec, a: np.ndarray, e: int) -> np.ndarray:
    if e == 0:
        out = np.zeros(a.shape[:-1] + (1,), dtype=np.int32)
        out[...] = 1
        return out
    acc = a
    for _ in range(e - 1):
        acc = poly_mul(F, acc, a)
    return acc


def vec_sum(F: FieldSpec, arrays) -> np.ndarray:
    it = iter(arrays)
    acc = next(it)
    for a in it:
        acc = F.add[acc, a]
    return acc
