"""Hypothesis gates, dimension formulas and the Artin-Schreier witness construction.

Everything here is exact integer or rational arithmetic.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction

from .errors import DivisibleRamification, EvenCharacteristic, NoWitness, ValidationError
from .field import is_prime
from .singular import gamma_interval, nbound_rhs


@dataclass(frozen=True)
class Check:
    name: str
    condition: str
    passed: bool
    values: dict = dc_field(default_factory=dict, hash=False, compare=False)


@dataclass(frozen=True)
class HypothesisVerdict:
    checks: tuple[Check, ...]

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "overall": self.overall,
            "checks": [{"name": c.name, "condition": c.condition, "passed": c.passed, "values": c.values}
                       for c in self.checks],
        }


def constant_A(d: int) -> int:
    return 27 * (4 * d - 7)


def p_threshold(d: int) -> Fraction:
    """36 (4d-7) d (d-2) / (d-1)."""
    if d < 2:
        raise ValidationError("the characteristic threshold needs d >= 2")
    return Fraction(36 * (4 * d - 7) * d * (d - 2), d - 1)


def gate_thm31(d: int, n: int, e: int, b: int, g: int, p: int) -> HypothesisVerdict:
    n_min = 4 * d - 6
    e_min = b + constant_A(d) * g
    thr = p_threshold(d) if d >= 2 else None
    checks = [
        Check("degree", "d >= 5", d >= 5, {"d": d}),
        Check("dimension", "n >= 4d-6", n >= n_min, {"n": n, "n_min": n_min}),
        Check("bundle_degree", "e >= b + 27(4d-7)g", e >= e_min, {"e": e, "e_min": e_min}),
        Check("characteristic", "p > 36(4d-7)d(d-2)/(d-1)", thr is not None and p > thr,
              {"p": p, "p_threshold": thr}),
    ]
    return HypothesisVerdict(tuple(checks))


def thresholds(d: int) -> dict:
    return {"n_min": 4 * d - 6, "A": constant_A(d), "p_threshold": p_threshold(d)}


# -- dimension formulas ------------------------------------------------------------

def expected_affine_exponent(n: int, d: int, e: int, g: int, b: int) -> int:
    return e * (n + 1 - d) + n * (1 - g) - b * n


def expected_section_dim(n: int, d: int, e: int, g: int) -> int:
    """(n+1)(e-g+1) - (de-g+1): sections of L^(n+1) minus conditions in L^d."""
    return (n + 1) * (e - g + 1) - (d * e - g + 1)


def expected_moduli_dim(n: int, d: int, e: int, g: int) -> int:
    return expected_section_dim(n, d, e, g) - 1 + g


def mor_lower_bound(minus_KY_dot_C: int, g_C: int, dim_Y: int) -> int:
    return minus_KY_dot_C + (1 - g_C) * dim_Y


# -- Artin-Schreier covers -------------------------------------------------------------

def as_genus(p: int, g_C: int, m_x: int) -> int:
    """Genus of a degree-p Artin-Schreier cover with one pole of order m_x."""
    if not is_prime(p):
        raise ValidationError(f"{p} is not prime")
    if p == 2:
        raise EvenCharacteristic("the genus formula needs odd p")
    if m_x < 1:
        raise ValidationError("pole order must be positive")
    if m_x % p == 0:
        raise DivisibleRamification(f"p = {p} divides m_x = {m_x}")
    return p * g_C + (p - 1) // 2 * (m_x - 1)


@dataclass(frozen=True)
class WitnessChain:
    d: int
    e: int
    g_C: int
    p: int
    A: int
    m: int
    b: int
    m_x: int
    c: int
    E: int

    @property
    def g_prime(self) -> int:
        return as_genus(self.p, self.g_C, self.m_x)

    @property
    def margin(self) -> int:
        return contradiction_margin(self.e, self.p, self.b, self.m, self.g_prime)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["g_prime"] = self.g_prime
        out["margin"] = self.margin
        return out


def pchoice_first(A: int, m: int, p: int) -> bool:
    """(1/A - 1/m) p^2 > p + (p-1)/2."""
    return (Fraction(1, A) - Fraction(1, m)) * p * p > p + Fraction(p - 1, 2)


def bchoice(A: int, e: int, p: int, b: int, g_C: int, clamp: bool = False) -> bool:
    """e p^(b+1) >= A(p g + (p-1)/2 (2g-1)) + A (p-1)/2.

    ``clamp`` replaces 2g-1 by max(2g-1, 0).
    """
    t = 2 * g_C - 1
    if clamp:
        t = max(t, 0)
    return e * p ** (b + 1) >= A * (p * g_C + Fraction(p - 1, 2) * t) + A * Fraction(p - 1, 2)


def _mx_quantity(p: int, g_C: int, m_x: int) -> Fraction:
    return p * g_C + Fraction(p - 1, 2) * (m_x - 1)


def verify_witness(w: WitnessChain) -> HypothesisVerdict:
    """Re-check the five defining inequalities of a chain from scratch."""
    A = 27 * (4 * w.d - 7)
    lhs = w.e * w.p ** (w.b + 1)
    Q = _mx_quantity(w.p, w.g_C, w.m_x)
    checks = (
        Check("constants", "A = 27(4d-7), m > A, p prime",
              w.A == A and w.m > A and is_prime(w.p), {"A": A, "m": w.m, "p": w.p}),
        Check("pchoice", "(1/A - 1/m) p^2 > p + (p-1)/2",
              (Fraction(1, A) - Fraction(1, w.m)) * w.p**2 > w.p + Fraction(w.p - 1, 2), {}),
        Check("bchoice", "e p^(b+1) >= A(p g + (p-1)/2 (2g-1)) + A(p-1)/2",
              lhs >= A * (w.p * w.g_C + Fraction(w.p - 1, 2) * (2 * w.g_C - 1)) + A * Fraction(w.p - 1, 2),
              {"e_p_b1": lhs}),
        Check("mxchoice", "A Q <= e p^(b+1) < m (Q - 1), Q = p g + (p-1)/2 (m_x - 1)",
              A * Q <= lhs < w.m * (Q - 1), {"Q": Q}),
        Check("mx_genus_and_divisibility", "m_x >= 2g and p does not divide m_x",
              w.m_x >= 2 * w.g_C and w.m_x % w.p != 0, {"m_x": w.m_x}),
    )
    return HypothesisVerdict(checks)


def least_m(A: int, p: int) -> int | None:
    """Smallest m > A with (1/A - 1/m) p^2 > p + (p-1)/2, or None if none exists."""
    R = Fraction(p) + Fraction(p - 1, 2)
    slack = Fraction(1, A) - R / (p * p)
    if slack <= 0:
        return None
    m = max(A + 1, int(1 / slack) + 1)
    while m > A + 1 and pchoice_first(A, m - 1, p):
        m -= 1
    while not pchoice_first(A, m, p):
        m += 1
    return m


def find_witness(d: int, e: int, g_C: int, p: int, max_b: int = 64, clamp: bool = False) -> WitnessChain:
    if e < 1 or g_C < 0:
        raise ValidationError("need e >= 1 and g_C >= 0")
    if not is_prime(p):
        raise NoWitness("p prime", f"{p} is not prime")
    if p == 2:
        raise NoWitness("p odd", "the cover genus formula needs odd p")
    A = constant_A(d)
    if not p > p_threshold(d):
        raise NoWitness("pchoice", f"p = {p} <= {p_threshold(d)}")
    m = least_m(A, p)
    if m is None:
        raise NoWitness("pchoice", f"(1/A - 1/m) p^2 > p + (p-1)/2 fails for every m > {A}")
    u = A * (p - 1) // 2
    last = None
    for b in range(1, max_b + 1):
        if not bchoice(A, e, p, b, g_C, clamp):
            last = "bchoice"
            continue
        X = e * p ** (b + 1) - A * p * g_C
        c = X // u
        E = X - u * (c - 1)
        m_x = c if c % p else c + 1
        if m_x < 1:
            last = "mx_positive"
            continue
        w = WitnessChain(d, e, g_C, p, A, m, b, m_x, c, E)
        verdict = verify_witness(w)
        if verdict.overall:
            return w
        last = verdict.failing()[0]
    raise NoWitness(last or "bchoice", f"no b <= {max_b} completes the chain")


def contradiction_margin(e: int, p: int, b: int, m: int, g_prime: int) -> int:
    """m (g' - 1) - e p^(b+1); positive exactly when the final chain is strict."""
    return m * (g_prime - 1) - e * p ** (b + 1)


def minimal_admissible_prime(d: int, limit: int = 10**6) -> int:
    """Least odd prime above the characteristic threshold with some m > A in pchoice."""
    A = constant_A(d)
    p = int(p_threshold(d)) + 1
    while p < limit:
        if p > 2 and is_prime(p) and p > p_threshold(d) and least_m(A, p) is not None:
            return p
        p += 1
    raise NoWitness("pchoice", f"no admissible prime below {limit}")


# -- consistency of the constant chain -----------------------------------------------

def gamma_margin(d: int, p: int) -> Fraction:
    """2d - 5 - (4d-7) gamma at the upper end of the gamma interval."""
    return 2 * d - 5 - (4 * d - 7) * gamma_interval(d, p).upper


def echain_values(d: int, g: int, p: int) -> dict:
    """Both sides of the lower bound on e - b used to absorb the genus terms."""
    A = constant_A(d)
    closed = Fraction((4 * d - 7) * (2 * g + Fraction(4 * g, d - 1))) * 9
    out = {"A_g": A * g, "closed_form": closed, "closed_le_A_g": closed <= A * g}
    for name, gam in zip(("lower", "upper"), gamma_interval(d, p).endpoints()):
        num = (4 * d - 7) * (2 * g + Fraction(2 * max(2 * g - 1, 0), d - 2) * gam)
        out[f"needed_{name}"] = num / (2 * d - 5 - (4 * d - 7) * gam)
    return out


def nbound_claim(d: int, e_minus_b: int, g: int, p: int) -> HypothesisVerdict:
    """n = 4d-6 exceeds the minor-arc bound at both gamma endpoints."""
    checks = []
    for name, gam in zip(("lower", "upper"), gamma_interval(d, p).endpoints()):
        rhs = nbound_rhs(d, gam, e_minus_b, 0, g)
        checks.append(Check(f"n_bound_{name}", "4d-6 > rhs", 4 * d - 6 > rhs, {"gamma": gam, "rhs": rhs}))
    return HypothesisVerdict(tuple(checks))
