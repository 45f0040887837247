"""Lift multi-prime residues to exact integers and rationals.

Coefficients recovered per prime are combined by the Chinese remainder
theorem in the symmetric range, optionally after stripping a common power
of 2 (word-size primes are odd, so dividing residues by 2^k is always
possible and shrinks the integer to be recovered).  Rational reconstruction
uses the half-extended Euclid bound.  A quadratic fit of the digit measure
r_n = ln|c_n| / ln(30000) over the coefficient index predicts how many
primes a full reconstruction will need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientSamples, NoConsistentK, NoRationalFound

R_MEASURE_BASE = 30000.0


@dataclass
class ResidueSet:
    """Residues (prime, value) of one unknown coefficient."""

    residues: list[tuple[int, int]]

    def __post_init__(self):
        primes = [p for p, _ in self.residues]
        if len(set(primes)) != len(primes):
            raise ValueError("duplicate primes in residue set")
        self.residues = [(p, v % p) for p, v in self.residues]

    @property
    def modulus(self) -> int:
        m = 1
        for p, _ in self.residues:
            m *= p
        return m


@dataclass
class BudgetFit:
    samples: list[tuple[int, float]]
    coefficients: tuple[float, float, float]  # a n^2 + b n + c
    predicted_max_primes: int


def _crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    t = (r2 - r1) * pow(m1, -1, m2) % m2
    return r1 + m1 * t, m1 * m2


def crt_lift(rs: ResidueSet) -> int:
    """Symmetric-range integer congruent to every residue."""
    if not rs.residues:
        raise ValueError("empty residue set")
    r, m = rs.residues[0][1], rs.residues[0][0]
    for p, v in rs.residues[1:]:
        r, m = _crt_pair(r, m, v, p)
    if 2 * r > m:
        r -= m
    return r


def strip_pow2_lift(rs: ResidueSet, k_max: int,
                    redundancy: int = 3) -> tuple[int, int]:
    """Find k so that residues/2^k lift to a stable integer; return (k, odd part).

    Stability means the lifted value survives removing any `redundancy`
    primes, which holds iff |value| stays inside the symmetric range of the
    worst-case reduced modulus (dropping the largest primes).  The returned
    k is the exact 2-adic valuation of the recovered coefficient; the trial
    exponent only has to get the magnitude inside the stable range.
    """
    primes = [p for p, _ in rs.residues]
    if any(p % 2 == 0 for p in primes):
        raise ValueError("strip_pow2_lift needs odd primes")
    if len(primes) <= redundancy:
        raise NoConsistentK(
            f"{len(primes)} primes cannot survive dropping {redundancy}")
    modulus = rs.modulus
    reduced = modulus
    for p in sorted(primes, reverse=True)[:redundancy]:
        reduced //= p
    bound = reduced // 2

    for k in range(k_max + 1):
        inv2k = [pow(pow(2, k, p), -1, p) for p in primes]
        shifted = ResidueSet([(p, v * inv2k[i] % p)
                              for i, (p, v) in enumerate(rs.residues)])
        m = crt_lift(shifted)
        if abs(m) <= bound:
            if m == 0:
                return 0, 0
            full = m << k
            v2 = (full & -full).bit_length() - 1
            return v2, full >> v2
    raise NoConsistentK(
        f"no exponent in [0, {k_max}] yields a stable lift; add primes")


def rational_lift(rs: ResidueSet) -> Fraction:
    """Reconstruct n/d with |n|, d <= sqrt(modulus/2), verified per prime."""
    if not rs.residues:
        raise ValueError("empty residue set")
    m = rs.modulus
    x = crt_lift(rs) % m
    if x == 0:
        return Fraction(0)
    bound = math.isqrt(m // 2)
    r0, r1 = m, x
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if r1 == 0 or t1 == 0 or abs(t1) > bound:
        raise NoRationalFound("no representative inside the Euclid bound")
    num, den = r1, t1
    if den < 0:
        num, den = -num, -den
    g = math.gcd(abs(num), den)
    num, den = num // g, den // g
    for p, v in rs.residues:
        if den % p == 0 or (num - v * den) % p != 0:
            raise NoRationalFound(f"candidate {num}/{den} fails residue mod {p}")
    return Fraction(num, den)


def guess_normalizer(values: list[Fraction]) -> int:
    """LCM of reconstructed denominators: a candidate global scale factor."""
    norm = 1
    for v in values:
        norm = norm * v.denominator // math.gcd(norm, v.denominator)
    return norm


def _ln_abs_big(x: int) -> float:
    """log of |x| for integers far beyond float range."""
    x = abs(x)
    if x == 0:
        raise ValueError("log of zero coefficient")
    if x.bit_length() <= 512:
        return math.log(x)
    s = x.bit_length() - 64
    return math.log(x >> s) + s * math.log(2.0)


def digit_measure(c: int, strip_pow2: bool = True) -> float:
    """r = ln|c| / ln(30000), the prime-count measure of one coefficient."""
    c = abs(c)
    if c == 0:
        return 0.0
    if strip_pow2:
        c >>= (c & -c).bit_length() - 1
    if c == 1:
        return 0.0
    return _ln_abs_big(c) / math.log(R_MEASURE_BASE)


def estimate_prime_budget(partial: list[tuple[int, int]], horizon: int,
                          headroom: int = 0,
                          strip_pow2: bool = True) -> BudgetFit:
    """Least-squares quadratic through r_n, maximized over [0, horizon].

    `partial` holds (index, fully lifted coefficient) pairs; the ends of
    the index range reconstruct with the fewest primes, so a handful of
    early lifts already pin the curve.
    """
    if len(partial) < 3:
        raise InsufficientSamples("need at least 3 (n, c_n) samples")
    samples = [(n, digit_measure(c, strip_pow2)) for n, c in partial]
    import numpy as np

    xs = np.array([float(n) for n, _ in samples])
    ys = np.array([r for _, r in samples])
    a, b, c = np.polyfit(xs, ys, 2)

    def fitted(n):
        return a * n * n + b * n + c

    candidates = [fitted(0.0), fitted(float(horizon))]
    if a < 0:
        vertex = -b / (2 * a)
        if 0 <= vertex <= horizon:
            candidates.append(fitted(vertex))
    peak = max(candidates)
    peak = max(peak, max(ys))  # prediction never below observed
    prediction = math.ceil(peak) + headroom
    return BudgetFit(samples, (float(a), float(b), float(c)), prediction)
