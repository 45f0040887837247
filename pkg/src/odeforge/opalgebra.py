"""Exact and mod-p algebra of differential operators in theta-form.

An operator is sum_{i,j} a_{i,j} w^j theta^i with theta = w d/dw.  The
non-commutative product uses theta w^j = w^j (theta + j); right division
runs over the rational-function field with gcd reduction on the fly and
clears denominators at the end.  The same generic cores serve exact
(Fraction) and prime-field coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (BadReduction, PointMismatch, SeriesTooShort, ZeroFunction)
from .polytools import (GFp, QQ, RatFunc, padd, pdeg, pderiv, pdivmod, pgcd,
                        pis_zero, pcompose_linear, peval, pmul, pscal, ptrim,
                        pzero)
from .primefield import PrimeField
from .guess import ThetaOperatorP

# ---------------------------------------------------------------------------
# Stirling-number conversion tables (theta-form <-> d/dw-form)


def _stirling2(n: int) -> list[list[int]]:
    """S2[i][k]: theta^i = sum_k S2[i][k] w^k D^k."""
    table = [[1]]
    for i in range(1, n + 1):
        prev = table[-1]
        row = [0] * (i + 1)
        for k, v in enumerate(prev):
            # theta * w^k D^k = k w^k D^k + w^(k+1) D^(k+1)
            row[k] += k * v
            row[k + 1] += v
        table.append(row)
    return table


def _stirling1(n: int) -> list[list[int]]:
    """s1[k][i]: w^k D^k = theta (theta-1) ... (theta-k+1) = sum_i s1[k][i] theta^i."""
    table = [[1]]
    for k in range(1, n + 1):
        prev = table[-1]
        row = [0] * (k + 1)
        for i, v in enumerate(prev):
            # multiply by (theta - (k-1))
            row[i + 1] += v
            row[i] -= (k - 1) * v
        table.append(row)
    return table


# ---------------------------------------------------------------------------
# generic theta-form cores, parametrized by a field handle
# rows[i] is the dense polynomial coefficient of theta^i


def _trim_rows(F, rows):
    rows = [ptrim(F, list(r)) for r in rows]
    while len(rows) > 1 and pis_zero(F, rows[-1]):
        rows.pop()
    return rows


def rows_multiply(F, a_rows, b_rows):
    """Composition a(b(.)) using theta^i w^l = w^l (theta + l)^i."""
    out = [pzero(F)]
    for i, arow in enumerate(a_rows):
        for j, aij in enumerate(arow):
            if F.is_zero(aij):
                continue
            for k, brow in enumerate(b_rows):
                for l, bkl in enumerate(brow):
                    if F.is_zero(bkl):
                        continue
                    c = F.mul(aij, bkl)
                    # (theta + l)^i theta^k contributes binom(i,m) l^(i-m)
                    # at theta^(m+k), all times w^(j+l)
                    for m in range(i + 1):
                        coef = F.mul(c, F.from_int(math.comb(i, m) * l ** (i - m)))
                        if F.is_zero(coef):
                            continue
                        while len(out) <= m + k:
                            out.append(pzero(F))
                        row = out[m + k]
                        while len(row) <= j + l:
                            row.append(F.zero())
                        row[j + l] = F.add(row[j + l], coef)
                        out[m + k] = row
    return _trim_rows(F, out)


def rows_to_ratcoeffs(F, rows):
    return [RatFunc.from_poly(F, r) for r in rows]


def _rat_rows_trim(rat):
    while len(rat) > 1 and rat[-1].is_zero():
        rat.pop()
    return rat


def _theta_shift_rat(F, coeffs):
    """theta o L for L given by rational coefficients of theta^i.

    theta (c(w) theta^i) = w c'(w) theta^i + c(w) theta^(i+1).
    """
    x = [F.zero(), F.one()]
    out = [RatFunc.const(F, F.zero()) for _ in range(len(coeffs) + 1)]
    w = RatFunc.from_poly(F, x)
    for i, c in enumerate(coeffs):
        out[i] = out[i] + w * c.deriv()
        out[i + 1] = out[i + 1] + c
    return _rat_rows_trim(out)


def rows_right_divide(F, l_rows, r_rows):
    """l = q*r + rem over the rational function field.

    Returns (q_rat, rem_rat) as lists of RatFunc theta-coefficients.
    """
    r_rat = rows_to_ratcoeffs(F, r_rows)
    rem = rows_to_ratcoeffs(F, l_rows)
    r_ord = len(r_rat) - 1
    if r_ord < 1 and pis_zero(F, r_rows[-1]):
        raise ZeroDivisionError("division by zero operator")
    # theta^d o r for d = 0 .. needed
    shifts = [r_rat]
    quot = [RatFunc.const(F, F.zero())
            for _ in range(max(len(rem) - len(r_rat) + 1, 1))]
    while len(rem) - 1 >= r_ord and not all(c.is_zero() for c in rem):
        d = len(rem) - 1 - r_ord
        while len(shifts) <= d:
            shifts.append(_theta_shift_rat(F, shifts[-1]))
        qc = rem[-1] / shifts[d][-1]
        quot[d] = quot[d] + qc
        shifted = shifts[d]
        new_rem = list(rem)
        for i, c in enumerate(shifted):
            new_rem[i] = new_rem[i] - qc * c
        new_rem[-1] = RatFunc.const(F, F.zero())
        rem = _rat_rows_trim(new_rem)
        if len(rem) == 1 and rem[0].is_zero():
            break
    return _rat_rows_trim(quot), rem


def rat_rows_clear(F, rat_rows):
    """Common-denominator clearing: returns (poly_rows, denominator_poly)."""
    den = [F.one()]
    for c in rat_rows:
        g = pgcd(F, den, c.den)
        extra, _ = pdivmod(F, c.den, g)
        den = pmul(F, den, extra)
    rows = []
    for c in rat_rows:
        q, r = pdivmod(F, den, c.den)
        assert pis_zero(F, r)
        rows.append(pmul(F, c.num, q))
    return rows, den


def rows_theta_to_d(F, rows):
    """theta-form rows -> dense polynomial coefficients of D^k."""
    m = len(rows) - 1
    s2 = _stirling2(m)
    drows = [pzero(F) for _ in range(m + 1)]
    for i, row in enumerate(rows):
        for k, sv in enumerate(s2[i]):
            if sv == 0:
                continue
            term = pscal(F, F.from_int(sv), row)
            # multiply by w^k
            term = [F.zero()] * k + term
            drows[k] = padd(F, drows[k], term)
    return [ptrim(F, r) for r in drows]


def rows_d_to_theta(F, drows):
    """D-form -> theta-form; multiplies by w^v on the left (v returned).

    v is the smallest power making every w^(v-k) b_k(w) polynomial.
    """
    m = len(drows) - 1
    v = 0
    for k, b in enumerate(drows):
        if pis_zero(F, b):
            continue
        val = 0
        while val < len(b) and F.is_zero(b[val]):
            val += 1
        v = max(v, k - val)
    s1 = _stirling1(m)
    rows = [pzero(F) for _ in range(m + 1)]
    for k, b in enumerate(drows):
        if pis_zero(F, b):
            continue
        # w^(v-k) * b_k: shift down by k - v (v >= k - val guarantees exactness)
        shift = v - k
        if shift >= 0:
            poly = [F.zero()] * shift + list(b)
        else:
            poly = list(b[-shift:])
        for i, sv in enumerate(s1[k]):
            if sv == 0:
                continue
            rows[i] = padd(F, rows[i], pscal(F, F.from_int(sv), poly))
    return _trim_rows(F, rows), v


def rows_recenter_v(F, rows, center, direction=1):
    """Local theta_x-form at x = direction*(w - center), and the power v of
    the left x^v factor the conversion applied."""
    drows = rows_theta_to_d(F, rows)
    dirf = F.from_int(direction)
    local = []
    for k, b in enumerate(drows):
        # w = center + direction*x, D_w^k = direction^k D_x^k
        poly = pcompose_linear(F, b, dirf, center)
        if direction == -1 and k % 2 == 1:
            poly = pscal(F, F.neg(F.one()), poly)
        local.append(poly)
    return rows_d_to_theta(F, local)


def rows_recenter(F, rows, center, direction=1):
    return rows_recenter_v(F, rows, center, direction)[0]


def rows_at_infinity(F, rows):
    """theta-form at x = 1/w: theta -> -theta, w^j -> x^(D-j)."""
    dmax = max(pdeg(F, r) for r in rows)
    out = []
    for i, row in enumerate(rows):
        new = [F.zero()] * (dmax + 1)
        for j, c in enumerate(row):
            if not F.is_zero(c):
                v = c if i % 2 == 0 else F.neg(c)
                new[dmax - j] = F.add(new[dmax - j], v)
        out.append(new)
    return _trim_rows(F, out)


# ---------------------------------------------------------------------------
# exact series over Q


@dataclass
class RationalSeries:
    """Truncated power series with exact rational coefficients."""

    var: str
    offset: int
    coeffs: list[Fraction]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("series needs at least one coefficient")
        self.coeffs = [Fraction(c) for c in self.coeffs]
        while len(self.coeffs) > 1 and self.coeffs[0] == 0:
            self.coeffs.pop(0)
            self.offset += 1

    @property
    def order(self):
        return self.offset + len(self.coeffs) - 1

    def coeff(self, n):
        if n < self.offset:
            return Fraction(0)
        if n > self.order:
            raise IndexError(f"coefficient {n} beyond order {self.order}")
        return self.coeffs[n - self.offset]

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def truncate(self, order):
        if order < self.offset:
            return RationalSeries(self.var, order, [Fraction(0)])
        return RationalSeries(self.var, self.offset,
                              self.coeffs[:order - self.offset + 1])

    def reduce_mod(self, field: PrimeField):
        from .primefield import PrimeSeries
        p = field.p
        out = []
        for c in self.coeffs:
            if c.denominator % p == 0:
                raise BadReduction(f"denominator divisible by {p}")
            out.append(c.numerator * pow(c.denominator, -1, p) % p)
        return PrimeSeries(field, self.var, self.offset, out)


def expand_rational(num, den, order: int, var: str = "w") -> RationalSeries:
    """Power-series expansion of num(w)/den(w) to the given order."""
    num = [Fraction(c) for c in num]
    den = [Fraction(c) for c in den]
    val = 0
    while val < len(den) and den[val] == 0:
        val += 1
    if val == len(den):
        raise ZeroDivisionError("zero denominator polynomial")
    den = den[val:]
    n_terms = order + val + 1
    inv = [Fraction(0)] * n_terms
    inv[0] = 1 / den[0]
    for k in range(1, n_terms):
        acc = Fraction(0)
        for j in range(1, min(k, len(den) - 1) + 1):
            acc += den[j] * inv[k - j]
        inv[k] = -inv[0] * acc
    out = [Fraction(0)] * n_terms
    for i, c in enumerate(num):
        if c == 0 or i >= n_terms:
            continue
        for j in range(n_terms - i):
            out[i + j] += c * inv[j]
    return RationalSeries(var, -val, out[:order + val + 1])


# ---------------------------------------------------------------------------
# the exact operator type


@dataclass
class ThetaOperatorX:
    """Exact-arithmetic operator sum a_{i,j} w^j theta^i."""

    rows: list[list[Fraction]]

    def __post_init__(self):
        self.rows = [[Fraction(c) for c in r] for r in self.rows]
        self.rows = _trim_rows(QQ, self.rows)

    @classmethod
    def from_ints(cls, rows):
        return cls([[Fraction(c) for c in r] for r in rows])

    @classmethod
    def from_dform(cls, drows):
        """Build from d/dw-form coefficient polynomials (left w-power applied)."""
        rows, _ = rows_d_to_theta(QQ, [[Fraction(c) for c in r] for r in drows])
        return cls(rows)

    def to_dform(self) -> list[list[Fraction]]:
        return rows_theta_to_d(QQ, self.rows)

    @property
    def order(self):
        return len(self.rows) - 1

    @property
    def degree(self):
        return max(pdeg(QQ, r) for r in self.rows)

    def head_poly(self) -> list[Fraction]:
        return list(self.rows[-1])

    def is_zero(self):
        return all(pis_zero(QQ, r) for r in self.rows)

    def coeff(self, i, j):
        if i >= len(self.rows) or j >= len(self.rows[i]):
            return Fraction(0)
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, ThetaOperatorX):
            return NotImplemented
        n = max(len(self.rows), len(other.rows))
        for i in range(n):
            a = self.rows[i] if i < len(self.rows) else []
            b = other.rows[i] if i < len(other.rows) else []
            if not pis_zero(QQ, psub_q(a, b)):
                return False
        return True

    def normalized_content(self) -> "ThetaOperatorX":
        """Primitive integer coefficients, first nonzero (i, j) positive."""
        den = 1
        for r in self.rows:
            for c in r:
                den = den * c.denominator // math.gcd(den, c.denominator)
        num = 0
        for r in self.rows:
            for c in r:
                num = math.gcd(num, abs(c.numerator * den // c.denominator))
        if num == 0:
            return self
        scale = Fraction(den, num)
        rows = [[c * scale for c in r] for r in self.rows]
        # sign convention: leading coefficient of the head polynomial positive
        for c in reversed(rows[-1]):
            if c != 0:
                if c < 0:
                    rows = [[-x for x in rr] for rr in rows]
                break
        return ThetaOperatorX(rows)

    def normalized_head_one(self) -> "ThetaOperatorX":
        """Scale so the head polynomial has value 1 at w = 0."""
        h = self.head_poly()
        if not h or h[0] == 0:
            raise ValueError("head polynomial vanishes at w=0")
        inv = 1 / h[0]
        return ThetaOperatorX([[c * inv for c in r] for r in self.rows])

    def reduce_mod(self, field: PrimeField) -> ThetaOperatorP:
        p = field.p
        head = self.head_poly()
        rows = []
        for r in self.rows:
            out = []
            for c in r:
                if c.denominator % p == 0:
                    raise BadReduction(f"coefficient denominator divisible by {p}")
                out.append(c.numerator * pow(c.denominator, -1, p) % p)
            rows.append(out)
        if all(v % p == 0 for v in rows[-1]):
            raise BadReduction(f"head polynomial vanishes mod {p}")
        return ThetaOperatorP(field, rows)

    def apply(self, s: RationalSeries) -> RationalSeries:
        d = self.degree
        if s.order - d < 0:
            raise SeriesTooShort(f"series order {s.order} below degree {d}")
        out = []
        for n in range(0, s.order - d + 1):
            acc = Fraction(0)
            for j in range(min(n - s.offset, d) + 1):
                c = s.coeff(n - j)
                if c == 0:
                    continue
                base = n - j
                powv = Fraction(1)
                for i in range(len(self.rows)):
                    aij = self.coeff(i, j)
                    if aij:
                        acc += aij * powv * c
                    powv *= base
            out.append(acc)
        return RationalSeries(s.var, 0, out if out else [Fraction(0)])

    def __repr__(self):
        return f"ThetaOperatorX(order={self.order}, degree={self.degree})"


def psub_q(a, b):
    n = max(len(a), len(b))
    return [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0))
            for i in range(n)]


def multiply(a: ThetaOperatorX, b: ThetaOperatorX) -> ThetaOperatorX:
    return ThetaOperatorX(rows_multiply(QQ, a.rows, b.rows))


def multiply_p(a: ThetaOperatorP, b: ThetaOperatorP) -> ThetaOperatorP:
    if a.field != b.field:
        raise ValueError("operators over different primes")
    F = GFp(a.field.p)
    return ThetaOperatorP(a.field, rows_multiply(F, a.rows, b.rows))


@dataclass
class RightDivision:
    """scale * l = quotient * r + remainder, all polynomial operators."""

    quotient: ThetaOperatorX
    remainder: ThetaOperatorX
    scale: list[Fraction]

    @property
    def divides(self) -> bool:
        return self.remainder.is_zero()


def right_divide(l: ThetaOperatorX, r: ThetaOperatorX) -> RightDivision:
    """Right-divide l by r in Q(w)[theta]; denominators cleared at the end.

    order(remainder) < order(r); a zero remainder certifies that r right
    divides l (the scale is then a left polynomial unit).
    """
    if r.order < 1 and pis_zero(QQ, r.rows[-1]):
        raise ZeroDivisionError("division by zero operator")
    q_rat, rem_rat = rows_right_divide(QQ, l.rows, r.rows)
    all_rat = q_rat + rem_rat
    cleared, den = rat_rows_clear(QQ, all_rat)
    q_rows = cleared[:len(q_rat)]
    rem_rows = cleared[len(q_rat):]
    return RightDivision(ThetaOperatorX(q_rows), ThetaOperatorX(rem_rows), den)


@dataclass
class RightDivisionP:
    quotient: ThetaOperatorP
    remainder: ThetaOperatorP
    scale: list[int]

    @property
    def divides(self) -> bool:
        return self.remainder.is_zero()


def right_divide_p(l: ThetaOperatorP, r: ThetaOperatorP) -> RightDivisionP:
    F = GFp(l.field.p)
    q_rat, rem_rat = rows_right_divide(F, l.rows, r.rows)
    all_rat = q_rat + rem_rat
    cleared, den = rat_rows_clear(F, all_rat)
    q_rows = cleared[:len(q_rat)]
    rem_rows = cleared[len(q_rat):]
    return RightDivisionP(ThetaOperatorP(l.field, q_rows),
                          ThetaOperatorP(l.field, rem_rows), den)


_ADJ_CACHE: dict[int, ThetaOperatorX] = {}


def _adj_theta_power(i: int) -> ThetaOperatorX:
    """(-theta - 1)^i, the adjoint image of theta^i."""
    if i in _ADJ_CACHE:
        return _ADJ_CACHE[i]
    base = ThetaOperatorX([[Fraction(-1)], [Fraction(-1)]])  # -1 - theta
    out = ThetaOperatorX([[Fraction(1)]])
    for _ in range(i):
        out = multiply(out, base)
    _ADJ_CACHE[i] = out
    return out


def adjoint(op: ThetaOperatorX) -> ThetaOperatorX:
    """Formal adjoint: adj(c(w) theta^i) = (-theta-1)^i o c(w).

    The convention constant comes from adj(w d/dw) = -d/dw o w = -theta - 1;
    the map is an involution and an anti-homomorphism.
    """
    acc_rows = [pzero(QQ)]
    for i, row in enumerate(op.rows):
        if pis_zero(QQ, row):
            continue
        term = rows_multiply(QQ, _adj_theta_power(i).rows, [row])
        n = max(len(acc_rows), len(term))
        merged = []
        for k in range(n):
            a = acc_rows[k] if k < len(acc_rows) else pzero(QQ)
            b = term[k] if k < len(term) else pzero(QQ)
            merged.append(padd(QQ, a, b))
        acc_rows = merged
    return ThetaOperatorX(acc_rows)


def annihilator_of_rational(num, den=None) -> ThetaOperatorX:
    """Order-1 annihilator of f = num(w)/den(w), content-normalized.

    (N Dn) f' - (N' Dn - N Dn') f = 0, so in D-form the operator is
    (N Dn) D - (N' Dn - N Dn').  Multiplying by w turns head*D into
    head*theta and the order-0 part into -w*(N' Dn - N Dn'); the common
    polynomial factor of the two coefficients is then removed.
    """
    num = ptrim(QQ, [Fraction(c) for c in num])
    den = ptrim(QQ, [Fraction(c) for c in (den if den is not None else [1])])
    if pis_zero(QQ, num):
        raise ZeroFunction("zero function has no first-order annihilator")
    head = pmul(QQ, num, den)
    tail = psub_q_poly(pmul(QQ, pderiv(QQ, num), den),
                       pmul(QQ, num, pderiv(QQ, den)))
    rows = [pscal(QQ, Fraction(-1), [Fraction(0)] + list(tail)), head]
    g = pgcd(QQ, rows[0], rows[1])
    if pdeg(QQ, g) > 0:
        rows = [pdivmod(QQ, r, g)[0] for r in rows]
    return ThetaOperatorX(rows).normalized_content()


def psub_q_poly(a, b):
    return ptrim(QQ, [Fraction(x) for x in psub_q(a, b)])


# ---------------------------------------------------------------------------
# p-curvature


@dataclass
class PCurvatureReport:
    classification: str           # "zero" | "nilpotent" | "neither"
    witness_power: int | None     # smallest m with A_p^m = 0

    @property
    def is_nilpotent(self):
        return self.classification in ("zero", "nilpotent")


def p_curvature_nilpotent(op: ThetaOperatorP, check_zero: bool = True,
                          prime_limit: int = 97) -> PCurvatureReport:
    """Classify the p-curvature A_p as zero / nilpotent / neither.

    Builds the companion matrix over F_p(w) in D-form and iterates the
    derivation A_{k+1} = A_k' + A_k A up to k = p.  Dense rational-function
    arithmetic: keep the order and the prime small (desk limits).
    """
    p = op.field.p
    if p > prime_limit:
        raise ValueError(f"p={p} beyond the implemented desk limit {prime_limit}")
    F = GFp(p)
    drows = rows_theta_to_d(F, [list(r) for r in op.rows])
    m = len(drows) - 1
    if m == 0:
        raise BadReduction("order-0 operator has no solution module")
    head = drows[m]
    if pis_zero(F, head):
        raise BadReduction("head vanishes mod p")
    zero = RatFunc.const(F, 0)
    one = RatFunc.const(F, 1)
    a = [[zero for _ in range(m)] for _ in range(m)]
    for i in range(m - 1):
        a[i][i + 1] = one
    for j in range(m):
        b = drows[j] if j < len(drows) else pzero(F)
        a[m - 1][j] = RatFunc(F, pscal(F, F.neg(F.one()), b), head)

    cur = [row[:] for row in a]
    for _ in range(p - 1):
        nxt = [[zero for _ in range(m)] for _ in range(m)]
        for i in range(m):
            for j in range(m):
                acc = cur[i][j].deriv()
                for k in range(m):
                    if cur[i][k].is_zero() or a[k][j].is_zero():
                        continue
                    acc = acc + cur[i][k] * a[k][j]
                nxt[i][j] = acc
        cur = nxt

    def mat_is_zero(mat):
        return all(c.is_zero() for row in mat for c in row)

    if mat_is_zero(cur):
        cls = "zero" if check_zero else "nilpotent"
        return PCurvatureReport(cls, 1)
    power = [row[:] for row in cur]
    for mpow in range(2, m + 1):
        nxt = [[zero for _ in range(m)] for _ in range(m)]
        for i in range(m):
            for j in range(m):
                acc = zero
                for k in range(m):
                    if power[i][k].is_zero() or cur[k][j].is_zero():
                        continue
                    acc = acc + power[i][k] * cur[k][j]
                nxt[i][j] = acc
        power = nxt
        if mat_is_zero(power):
            return PCurvatureReport("nilpotent", mpow)
    return PCurvatureReport("neither", None)


# ---------------------------------------------------------------------------
# symmetric power/product bookkeeping


def symmetric_power_order(q: int, n: int) -> int:
    if q < 1 or n < 1:
        raise ValueError("orders must be positive")
    return math.comb(q + n - 1, n)


def symmetric_product_order_bounds(q1: int, q2: int) -> tuple[int, int]:
    if q1 < 1 or q2 < 1:
        raise ValueError("orders must be positive")
    return (q1 + q2 - 1, q1 * q2)


@dataclass
class BlockScheme:
    """Multiset of logarithm blocks at one singular point.

    Block n groups n+1 solutions whose maximal log power is n; a complete
    scheme's solution count equals the operator order.
    """

    point: str
    blocks: list[int]

    def __post_init__(self):
        self.blocks = sorted(self.blocks, reverse=True)

    def solutions(self) -> int:
        return sum(n + 1 for n in self.blocks)

    def as_multiset(self):
        return tuple(self.blocks)


def block_product_scheme(f1: BlockScheme, f2: BlockScheme) -> BlockScheme:
    """Clebsch-Gordan style pairing: BLa x BLb -> BL(a+b), BL(a+b-2), ..., BL|a-b|."""
    if f1.point != f2.point:
        raise PointMismatch(f"{f1.point} vs {f2.point}")
    out = []
    for a in f1.blocks:
        for b in f2.blocks:
            n = a + b
            while n >= abs(a - b):
                out.append(n)
                n -= 2
    return BlockScheme(f1.point, out)


def _block_partitions(order: int, max_block: int | None = None):
    """All multisets of block indices n >= 0 with sum (n+1) = order."""
    if max_block is None:
        max_block = order - 1
    if order == 0:
        yield ()
        return
    for n in range(min(max_block, order - 1), -1, -1):
        for rest in _block_partitions(order - (n + 1), n):
            yield (n,) + rest


@dataclass
class DecompositionVerdict:
    feasible: bool
    per_point: list[tuple[str, bool, str]]

    def __bool__(self):
        return self.feasible


def check_sym_decomposition(targets: list[BlockScheme], config: list[int],
                            mode: str = "product") -> DecompositionVerdict:
    """Can the target block schemes arise from the factor configuration?

    product mode: factors of the given orders, paired with the CG rule.
    power mode: config = [q, n], the n-th symmetric power of an order-q
    operator (implemented for q = 2, the only case the block chain needs).
    Feasible means "not ruled out" — the block rule is a necessary
    condition only.
    """
    per_point = []
    overall = True
    for target in targets:
        ok, why = _point_feasible(target, config, mode)
        per_point.append((target.point, ok, why))
        overall = overall and ok
    return DecompositionVerdict(overall, per_point)


def _point_feasible(target: BlockScheme, config, mode):
    want = tuple(sorted(target.blocks, reverse=True))
    if mode == "power":
        q, n = config
        if q != 2:
            raise ValueError("power mode implemented for order-2 bases only")
        if symmetric_power_order(q, n) != target.solutions():
            return False, "order mismatch"
        # order-2 factor schemes: one BL1, or two BL0
        for scheme in ([1], [0, 0]):
            if scheme == [1]:
                got = (n,)
            else:
                got = tuple([0] * (n + 1))
            if tuple(sorted(got, reverse=True)) == want:
                return True, f"realized by factor blocks {scheme}"
        return False, "no factor block assignment matches"
    if mode != "product":
        raise ValueError(f"unknown mode {mode!r}")
    orders = list(config)
    assignments = [list(_block_partitions(q)) for q in orders]

    def rec(idx, scheme):
        if idx == len(orders):
            return tuple(sorted(scheme.blocks, reverse=True)) == want
        for part in assignments[idx]:
            nxt = block_product_scheme(scheme, BlockScheme(target.point, list(part)))
            if nxt.solutions() > target.solutions():
                continue
            if rec(idx + 1, nxt):
                return True
        return False

    start = BlockScheme(target.point, [0])  # neutral BL0 factor
    if rec(0, start):
        return True, "a factor block assignment matches"
    return False, "no factor block assignment matches"
