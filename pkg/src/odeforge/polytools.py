"""Dense polynomial and rational-function arithmetic over pluggable fields.

The same operator-algebra code has to run over exact rationals (lifted
operators), word-size prime fields (guessing, p-curvature) and arbitrary
precision floats (connection matching).  A tiny field handle abstracts the
coefficient arithmetic; polynomials are plain coefficient lists (index =
exponent) and rational functions are reduced num/den pairs.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath as mp


class QQ:
    """Exact rational coefficients via fractions.Fraction."""

    name = "QQ"

    @staticmethod
    def zero():
        return Fraction(0)

    @staticmethod
    def one():
        return Fraction(1)

    @staticmethod
    def from_int(n):
        return Fraction(n)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def inv(a):
        return 1 / Fraction(a)

    @staticmethod
    def div(a, b):
        return Fraction(a) / b

    @staticmethod
    def is_zero(a):
        return a == 0

    @staticmethod
    def eq(a, b):
        return a == b


class GFp:
    """Prime-field coefficients as plain ints in [0, p)."""

    def __init__(self, p: int):
        self.p = p
        self.name = f"GF({p})"

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * pow(b, -1, self.p) % self.p

    def is_zero(self, a):
        return a % self.p == 0

    def eq(self, a, b):
        return (a - b) % self.p == 0


class MPC:
    """mpmath complex coefficients; zero tests use a relative floor.

    The floor is an absolute threshold chosen by the caller per problem
    scale (values below it count as zero for pivoting/trimming).
    """

    def __init__(self, floor=None):
        self.floor = floor if floor is not None else mp.mpf(10) ** (-mp.mp.dps + 5)
        self.name = "MPC"

    def zero(self):
        return mp.mpc(0)

    def one(self):
        return mp.mpc(1)

    def from_int(self, n):
        if isinstance(n, Fraction):
            return mp.mpc(n.numerator) / n.denominator
        return mp.mpc(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return 1 / a

    def div(self, a, b):
        return a / b

    def is_zero(self, a):
        return abs(a) <= self.floor

    def eq(self, a, b):
        return abs(a - b) <= self.floor


# ---------------------------------------------------------------------------
# dense polynomials: list of coefficients, index = exponent


def ptrim(F, a):
    while len(a) > 1 and F.is_zero(a[-1]):
        a = a[:-1]
    return a


def pzero(F):
    return [F.zero()]

def pis_zero(F, a):
    return all(F.is_zero(c) for c in a)


def pdeg(F, a):
    a = ptrim(F, a)
    return -1 if pis_zero(F, a) else len(a) - 1


def padd(F, a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else F.zero()
        y = b[i] if i < len(b) else F.zero()
        out.append(F.add(x, y))
    return ptrim(F, out)


def psub(F, a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else F.zero()
        y = b[i] if i < len(b) else F.zero()
        out.append(F.sub(x, y))
    return ptrim(F, out)


def pscal(F, c, a):
    return ptrim(F, [F.mul(c, x) for x in a])


def pmul(F, a, b):
    if pis_zero(F, a) or pis_zero(F, b):
        return pzero(F)
    out = [F.zero()] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if F.is_zero(ca):
            continue
        for j, cb in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(ca, cb))
    return ptrim(F, out)


def pdivmod(F, a, b):
    b = ptrim(F, b)
    if pis_zero(F, b):
        raise ZeroDivisionError("polynomial division by zero")
    a = list(ptrim(F, a))
    db, lb = len(b) - 1, b[-1]
    if pdeg(F, a) < db:
        return pzero(F), ptrim(F, a)
    q = [F.zero()] * (len(a) - db)
    for k in range(len(a) - db - 1, -1, -1):
        c = F.div(a[k + db], lb)
        if not F.is_zero(c):
            q[k] = c
            for i in range(len(b)):
                a[k + i] = F.sub(a[k + i], F.mul(c, b[i]))
    return ptrim(F, q), ptrim(F, a)


def pgcd(F, a, b):
    a, b = ptrim(F, a), ptrim(F, b)
    while not pis_zero(F, b):
        _, r = pdivmod(F, a, b)
        a, b = b, r
    if pis_zero(F, a):
        return a
    return pscal(F, F.inv(a[-1]), a)  # monic


def peval(F, a, x):
    acc = F.zero()
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def pderiv(F, a):
    if len(a) <= 1:
        return pzero(F)
    return ptrim(F, [F.mul(F.from_int(i), a[i]) for i in range(1, len(a))])


def pshift(F, a, c):
    """Taylor shift: coefficients of a(x + c)."""
    out = list(a)
    n = len(out)
    # repeated synthetic division by (x - (-c))
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] = F.add(out[j], F.mul(c, out[j + 1]))
    return ptrim(F, out)


def pcompose_linear(F, a, scale, shift):
    """Coefficients of a(scale*x + shift)."""
    out = pshift(F, a, shift)
    s = F.one()
    res = []
    for c in out:
        res.append(F.mul(c, s))
        s = F.mul(s, scale)
    return ptrim(F, res)


def pmonomial(F, c, k):
    return ptrim(F, [F.zero()] * k + [c])


# ---------------------------------------------------------------------------
# rational functions


class RatFunc:
    """Reduced fraction of dense polynomials over a field handle."""

    __slots__ = ("F", "num", "den")

    def __init__(self, F, num, den=None, reduce=True):
        self.F = F
        den = den if den is not None else [F.one()]
        if pis_zero(F, den):
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce:
            num, den = self._reduced(F, num, den)
        self.num = num
        self.den = den

    @staticmethod
    def _reduced(F, num, den):
        num, den = ptrim(F, num), ptrim(F, den)
        if pis_zero(F, num):
            return pzero(F), [F.one()]
        g = pgcd(F, num, den)
        if pdeg(F, g) > 0:
            num, _ = pdivmod(F, num, g)
            den, _ = pdivmod(F, den, g)
        # normalize denominator monic
        lc = den[-1]
        if not F.eq(lc, F.one()):
            inv = F.inv(lc)
            num = pscal(F, inv, num)
            den = pscal(F, inv, den)
        return num, den

    @classmethod
    def const(cls, F, c):
        return cls(F, [c], [F.one()], reduce=False)

    @classmethod
    def from_poly(cls, F, a):
        return cls(F, ptrim(F, a), [F.one()], reduce=False)

    def is_zero(self):
        return pis_zero(self.F, self.num)

    def is_poly(self):
        return pdeg(self.F, self.den) == 0

    def as_poly(self):
        if not self.is_poly():
            raise ValueError("rational function is not polynomial")
        inv = self.F.inv(self.den[0])
        return pscal(self.F, inv, self.num)

    def __add__(self, o):
        F = self.F
        num = padd(F, pmul(F, self.num, o.den), pmul(F, o.num, self.den))
        return RatFunc(F, num, pmul(F, self.den, o.den))

    def __sub__(self, o):
        F = self.F
        num = psub(F, pmul(F, self.num, o.den), pmul(F, o.num, self.den))
        return RatFunc(F, num, pmul(F, self.den, o.den))

    def __mul__(self, o):
        F = self.F
        return RatFunc(F, pmul(F, self.num, o.num), pmul(F, self.den, o.den))

    def __truediv__(self, o):
        F = self.F
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(F, pmul(F, self.num, o.den), pmul(F, self.den, o.num))

    def __neg__(self):
        return RatFunc(self.F, pscal(self.F, self.F.neg(self.F.one()), self.num),
                       self.den, reduce=False)

    def deriv(self):
        F = self.F
        num = psub(F, pmul(F, pderiv(F, self.num), self.den),
                   pmul(F, self.num, pderiv(F, self.den)))
        den = pmul(F, self.den, self.den)
        return RatFunc(F, num, den)

    def eval(self, x):
        F = self.F
        return F.div(peval(F, self.num, x), peval(F, self.den, x))

    def __eq__(self, o):
        if not isinstance(o, RatFunc):
            return NotImplemented
        F = self.F
        d = psub(F, pmul(F, self.num, o.den), pmul(F, o.num, self.den))
        return pis_zero(F, d)

    def __repr__(self):
        return f"RatFunc({self.num}/{self.den})"


# ---------------------------------------------------------------------------
# generic dense linear algebra (small systems: ranks, solves)


def rank(F, rows):
    """Row rank by Gaussian elimination with first-nonzero pivoting."""
    if not rows:
        return 0
    rows = [list(r) for r in rows]
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, len(rows)):
            if not F.is_zero(rows[i][c]):
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = F.inv(rows[r][c])
        rows[r] = [F.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not F.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [F.sub(rows[i][j], F.mul(f, rows[r][j]))
                           for j in range(ncols)]
        r += 1
        if r == len(rows):
            break
    return r


def solve_linear(F, rows, rhs):
    """Solve a square-ish system; returns None when inconsistent/deficient."""
    n = len(rows)
    if n == 0:
        return []
    ncols = len(rows[0])
    aug = [list(rows[i]) + [rhs[i]] for i in range(n)]
    pivots = []
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, n):
            if not F.is_zero(aug[i][c]):
                sel = i
                break
        if sel is None:
            continue
        aug[r], aug[sel] = aug[sel], aug[r]
        inv = F.inv(aug[r][c])
        aug[r] = [F.mul(inv, x) for x in aug[r]]
        for i in range(n):
            if i != r and not F.is_zero(aug[i][c]):
                f = aug[i][c]
                aug[i] = [F.sub(aug[i][j], F.mul(f, aug[r][j]))
                          for j in range(ncols + 1)]
        pivots.append(c)
        r += 1
        if r == n:
            break
    for i in range(r, n):
        if not F.is_zero(aug[i][ncols]):
            return None
    if len(pivots) < ncols:
        return None
    x = [F.zero()] * ncols
    for i, c in enumerate(pivots):
        x[c] = aug[i][ncols]
    return x
