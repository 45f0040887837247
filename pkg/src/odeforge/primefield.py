"""Word-size prime fields, truncated power series and dense nullspace solving.

Everything downstream of the modular guessing pipeline sits on this layer:
elements are plain Python ints reduced to [0, p), series are coefficient
lists with an explicit starting exponent, and the linear algebra is a
straightforward Gaussian elimination (exact by construction in a field).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .errors import FieldMismatch, NonInvertibleLeadingTerm

# Deterministic Miller-Rabin witnesses, valid far beyond word size.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_pool(count: int, below: int = 1 << 15) -> list[int]:
    """Descending odd primes below the bound (default: below 2^15)."""
    out = []
    n = below - 1 if below % 2 == 0 else below - 2
    while n > 2 and len(out) < count:
        if is_prime(n):
            out.append(n)
        n -= 2
    if len(out) < count:
        raise ValueError(f"only {len(out)} odd primes below {below}")
    return out


class PrimeField:
    """Arithmetic mod an odd prime; elements are ints in [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if p % 2 == 0 or not is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
        self.p = p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    def red(self, a: int) -> int:
        return a % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"0 has no inverse mod {self.p}")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p


@dataclass
class PrimeSeries:
    """Truncated power series over a prime field.

    ``coeffs[k]`` is the coefficient of ``var**(offset+k)``.  Leading zeros
    are normalized into ``offset`` so the first stored coefficient is the
    true valuation (except for a series that is zero through its whole
    known range, which keeps a single 0).  ``order`` is the last exponent
    whose coefficient is known.
    """

    field: PrimeField
    var: str
    offset: int
    coeffs: list[int]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("series needs at least one coefficient")
        p = self.field.p
        self.coeffs = [c % p for c in self.coeffs]
        self._trim()

    def _trim(self):
        while len(self.coeffs) > 1 and self.coeffs[0] == 0:
            self.coeffs.pop(0)
            self.offset += 1

    @property
    def order(self) -> int:
        return self.offset + len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def coeff(self, n: int) -> int:
        """Coefficient of var**n; zero below offset, error above order."""
        if n < self.offset:
            return 0
        if n > self.order:
            raise IndexError(f"coefficient {n} beyond known order {self.order}")
        return self.coeffs[n - self.offset]

    def truncate(self, order: int) -> "PrimeSeries":
        if order < self.offset:
            return PrimeSeries(self.field, self.var, order, [0])
        keep = order - self.offset + 1
        return PrimeSeries(self.field, self.var, self.offset, self.coeffs[:keep])

    def dense(self, upto: int) -> list[int]:
        """Coefficients of var**0 .. var**upto (must be within known order)."""
        if upto > self.order:
            raise IndexError(f"order {upto} beyond known order {self.order}")
        return [self.coeff(n) for n in range(upto + 1)]

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        tail = ", ..." if len(self.coeffs) > 6 else ""
        return (f"PrimeSeries(p={self.field.p}, {self.var}^{self.offset}*"
                f"[{head}{tail}], order={self.order})")


def _check_compatible(a: PrimeSeries, b: PrimeSeries):
    if a.field != b.field:
        raise FieldMismatch(f"mod {a.field.p} vs mod {b.field.p}")
    if a.var != b.var:
        raise FieldMismatch(f"variable {a.var!r} vs {b.var!r}")


def series_add(a: PrimeSeries, b: PrimeSeries) -> PrimeSeries:
    _check_compatible(a, b)
    order = min(a.order, b.order)
    off = min(a.offset, b.offset)
    p = a.field.p
    out = [(a.coeff(n) if n <= a.order else 0) + (b.coeff(n) if n <= b.order else 0)
           for n in range(off, order + 1)]
    return PrimeSeries(a.field, a.var, off, [c % p for c in out])


def series_mul(a: PrimeSeries, b: PrimeSeries) -> PrimeSeries:
    _check_compatible(a, b)
    # Unknown tail of one factor first pollutes the product at
    # (order+1) + valuation of the other factor.
    order = min(a.order + b.offset, b.order + a.offset)
    p = a.field.p
    off = a.offset + b.offset
    n_out = order - off + 1
    out = [0] * n_out
    for i, ca in enumerate(a.coeffs):
        if ca == 0:
            continue
        jmax = min(len(b.coeffs), n_out - i)
        for j in range(jmax):
            out[i + j] = (out[i + j] + ca * b.coeffs[j]) % p
    return PrimeSeries(a.field, a.var, off, out)


def series_scal(c: int, a: PrimeSeries) -> PrimeSeries:
    p = a.field.p
    return PrimeSeries(a.field, a.var, a.offset, [c * x % p for x in a.coeffs])


def series_recip(a: PrimeSeries) -> PrimeSeries:
    if a.offset != 0 or a.coeffs[0] == 0:
        raise NonInvertibleLeadingTerm("reciprocal needs a nonzero constant term")
    p = a.field.p
    n = len(a.coeffs)
    inv0 = a.field.inv(a.coeffs[0])
    out = [0] * n
    out[0] = inv0
    for k in range(1, n):
        acc = 0
        for j in range(1, k + 1):
            cj = a.coeffs[j] if j < n else 0
            acc += cj * out[k - j]
        out[k] = -inv0 * acc % p
    return PrimeSeries(a.field, a.var, 0, out)


def series_compose(a: PrimeSeries, b: PrimeSeries) -> PrimeSeries:
    """a(b(w)); inner series must vanish at the origin."""
    _check_compatible(a, b)
    if b.offset < 1:
        raise NonInvertibleLeadingTerm("inner series must have positive valuation")
    p = a.field.p
    order = min(a.order * b.offset, b.order)
    zero = PrimeSeries(a.field, a.var, order, [0])
    acc = zero
    power = PrimeSeries(a.field, a.var, 0, [1] + [0] * order)  # b^0
    for k in range(a.offset + len(a.coeffs)):
        ck = a.coeff(k) if k >= a.offset else 0
        if ck:
            acc = series_add(acc, series_scal(ck, power.truncate(order)))
        if k * b.offset > order:
            break
        power = series_mul(power, b).truncate(order)
    return acc.truncate(order)


def series_arith(a: PrimeSeries, b: PrimeSeries | None, kind: str) -> PrimeSeries:
    """Dispatcher per the series text-format verbs: add, mul, recip, compose."""
    if kind == "add":
        return series_add(a, b)
    if kind == "mul":
        return series_mul(a, b)
    if kind == "recip":
        return series_recip(a)
    if kind == "compose":
        return series_compose(a, b)
    raise ValueError(f"unknown series operation {kind!r}")


def series_pow(a: PrimeSeries, n: int, order: int) -> PrimeSeries:
    out = PrimeSeries(a.field, a.var, 0, [1] + [0] * order)
    for _ in range(n):
        out = series_mul(out, a).truncate(order)
    return out


@dataclass
class FpMatrix:
    """Dense matrix over a prime field (row-major list of lists)."""

    field: PrimeField
    rows: int
    cols: int
    entries: list[list[int]] = dc_field(default_factory=list)

    def __post_init__(self):
        p = self.field.p
        if len(self.entries) != self.rows:
            raise ValueError("row count mismatch")
        for r in self.entries:
            if len(r) != self.cols:
                raise ValueError("ragged matrix")
        self.entries = [[x % p for x in r] for r in self.entries]

    @classmethod
    def from_rows(cls, field: PrimeField, rows: list[list[int]]) -> "FpMatrix":
        if not rows:
            return cls(field, 0, 0, [])
        return cls(field, len(rows), len(rows[0]), rows)

    def mul_vec(self, v: list[int]) -> list[int]:
        p = self.field.p
        return [sum(r[j] * v[j] for j in range(self.cols)) % p for r in self.entries]


def _rref(field: PrimeField, rows: list[list[int]], cols: int):
    """In-place reduced row echelon form; returns pivot column list."""
    p = field.p
    pivots = []
    r = 0
    for c in range(cols):
        sel = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                ri, rr = rows[i], rows[r]
                rows[i] = [(ri[j] - f * rr[j]) % p for j in range(cols)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def nullspace(m: FpMatrix) -> list[list[int]]:
    """Basis of the right kernel; empty iff the matrix has full column rank."""
    if m.rows == 0:
        # Everything is in the kernel of an empty equation set.
        basis = []
        for j in range(m.cols):
            v = [0] * m.cols
            v[j] = 1
            basis.append(v)
        return basis
    rows = [r[:] for r in m.entries]
    pivots = _rref(m.field, rows, m.cols)
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    p = m.field.p
    basis = []
    for fc in free:
        v = [0] * m.cols
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc] % p
        basis.append(v)
    return basis


def solve_dense(m: FpMatrix, rhs: list[int]) -> list[int] | None:
    """One solution of M x = rhs, or None if inconsistent."""
    p = m.field.p
    rows = [m.entries[i][:] + [rhs[i] % p] for i in range(m.rows)]
    pivots = _rref(m.field, rows, m.cols + 1)
    if m.cols in pivots:
        return None
    x = [0] * m.cols
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][m.cols]
    return x
