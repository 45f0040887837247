"""Fit linear ODEs in theta-form to mod-p series and extend series by recursion.

Operators are written as sums a_{i,j} w^j theta^i with theta = w*d/dw, so the
coefficient recursion is index-shift diagonal: equating the coefficient of
w^n in L(f) gives  sum_{i,j} a_{i,j} (n-j)^i c_{n-j} = e_n.  Fitting an
operator (and optionally unknown multiplier polynomials on a set of known
right-hand-side basis series) is a dense nullspace problem in the unknown
coefficients, solved per prime.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (DegenerateFit, FieldMismatch, IndicialObstruction,
                     InsufficientTerms, NoAnnihilatorFound, NoSolutionFound,
                     SeedTooShort)
from .primefield import FpMatrix, PrimeField, PrimeSeries, nullspace

DEFAULT_MARGIN = 10


@dataclass
class ThetaOperatorP:
    """Mod-p operator sum a_{i,j} w^j theta^i; rows[i][j] = a_{i,j}."""

    field: PrimeField
    rows: list[list[int]]

    def __post_init__(self):
        p = self.field.p
        width = max(len(r) for r in self.rows)
        self.rows = [[c % p for c in r] + [0] * (width - len(r)) for r in self.rows]
        while len(self.rows) > 1 and all(c == 0 for c in self.rows[-1]):
            self.rows.pop()

    @property
    def order(self) -> int:
        return len(self.rows) - 1

    @property
    def degree(self) -> int:
        deg = 0
        for r in self.rows:
            for j in range(len(r) - 1, -1, -1):
                if r[j]:
                    deg = max(deg, j)
                    break
        return deg

    def head_poly(self) -> list[int]:
        return list(self.rows[-1])

    def is_zero(self) -> bool:
        return all(c == 0 for r in self.rows for c in r)

    def coeff(self, i: int, j: int) -> int:
        if i >= len(self.rows) or j >= len(self.rows[i]):
            return 0
        return self.rows[i][j]

    def normalized(self) -> "ThetaOperatorP":
        """Scale so the first nonzero coefficient in (i, j) order is 1."""
        p = self.field.p
        for i, r in enumerate(self.rows):
            for j, c in enumerate(r):
                if c:
                    inv = pow(c, -1, p)
                    return ThetaOperatorP(
                        self.field, [[x * inv % p for x in row] for row in self.rows])
        return self

    def apply(self, s: PrimeSeries, upto: int | None = None) -> PrimeSeries:
        """L(s) with output coefficients for n = 0 .. (s.order if known)."""
        if s.field != self.field:
            raise FieldMismatch("operator and series over different primes")
        p = self.field.p
        top = s.order if upto is None else min(upto, s.order)
        out = []
        for n in range(top + 1):
            acc = 0
            for j in range(min(n - s.offset, len(self.rows[0]) - 1,
                               self.degree) + 1):
                c = s.coeff(n - j)
                if c == 0:
                    continue
                base = (n - j) % p
                powv = 1
                for i in range(len(self.rows)):
                    aij = self.coeff(i, j)
                    if aij:
                        acc += aij * powv % p * c
                    powv = powv * base % p
            out.append(acc % p)
        return PrimeSeries(self.field, s.var, 0, out if out else [0])

    def indicial_coeffs(self) -> list[int]:
        """A(n) = sum_i a_{i,0} n^i, the diagonal recursion factor."""
        return [r[0] if r else 0 for r in self.rows]


@dataclass
class RhsAnsatz:
    """Known basis series B_t with unknown multiplier polys of shared degree."""

    bases: list[tuple[str, PrimeSeries]]
    rhs_degree: int

    def __post_init__(self):
        if not self.bases:
            raise ValueError("ansatz needs at least one basis series")
        f0 = self.bases[0][1]
        for _, b in self.bases[1:]:
            if b.field != f0.field or b.var != f0.var:
                raise FieldMismatch("ansatz bases over mixed fields/variables")

    @property
    def field(self):
        return self.bases[0][1].field

    def min_order(self) -> int:
        return min(b.order for _, b in self.bases)


@dataclass
class FitReport:
    operator: ThetaOperatorP
    rhs_polys: list[list[int]] | None
    kernel_dim: int
    unknowns: int
    equations_used: int
    order: int = 0
    degree: int = 0

    def __post_init__(self):
        self.order = self.operator.order
        self.degree = self.operator.degree


def budget(order: int, degree: int, n_bases: int = 0, rhs_degree: int = 0) -> int:
    """Number of unknown scalars in a fit of the given shape."""
    if order < 0 or degree < 0 or n_bases < 0 or rhs_degree < 0:
        raise ValueError("budget arguments must be nonnegative")
    total = (order + 1) * (degree + 1)
    if n_bases:
        total += n_bases * (rhs_degree + 1)
    return total


def _fit_rows(s: PrimeSeries, order_m: int, degree_d: int, n_lo: int, n_hi: int,
              rhs: RhsAnsatz | None, exponent_shift: int = 0) -> list[list[int]]:
    """One row per index n: coefficients of the unknowns in the linear system.

    With an exponent shift q the series stands for w^q * s and powers use
    (q + n - j) in the field.
    """
    p = s.field.p
    rows = []
    for n in range(n_lo, n_hi + 1):
        row = []
        for i in range(order_m + 1):
            for j in range(degree_d + 1):
                k = n - j
                if k < s.offset or k > s.order:
                    row.append(0)
                    continue
                c = s.coeff(k)
                row.append(pow((exponent_shift + k) % p, i, p) * c % p if c else 0)
        if rhs is not None:
            for _, b in rhs.bases:
                for d in range(rhs.rhs_degree + 1):
                    k = n - d
                    v = b.coeff(k) if b.offset <= k <= b.order else 0
                    row.append(-v % p)
        rows.append(row)
    return rows


def _kernel_at(s, order_m, degree_d, rhs, margin, exponent_shift=0):
    need = budget(order_m, degree_d,
                  len(rhs.bases) if rhs else 0,
                  rhs.rhs_degree if rhs else 0)
    n_hi = s.order if rhs is None else min(s.order, rhs.min_order())
    avail = n_hi + 1
    if avail < need + margin:
        return None, need, 0
    rows = _fit_rows(s, order_m, degree_d, 0, n_hi, rhs, exponent_shift)
    basis = nullspace(FpMatrix.from_rows(s.field, rows))
    return basis, need, avail


def _split_vector(v, order_m, degree_d, rhs):
    w = degree_d + 1
    op_rows = [v[i * w:(i + 1) * w] for i in range(order_m + 1)]
    rhs_polys = None
    if rhs is not None:
        base = (order_m + 1) * w
        step = rhs.rhs_degree + 1
        rhs_polys = [v[base + t * step: base + (t + 1) * step]
                     for t in range(len(rhs.bases))]
    return op_rows, rhs_polys


def _rhs_combination(rhs: RhsAnsatz, rhs_polys, upto: int) -> list[int]:
    p = rhs.field.p
    out = [0] * (upto + 1)
    for (_, b), q in zip(rhs.bases, rhs_polys):
        for d, qd in enumerate(q):
            if qd == 0:
                continue
            for n in range(d, upto + 1):
                k = n - d
                if b.offset <= k <= b.order:
                    out[n] = (out[n] + qd * b.coeff(k)) % p
    return out


def guess_ode(s: PrimeSeries, max_order: int, max_degree: int,
              margin: int = DEFAULT_MARGIN, minimize_degree: bool = True,
              exponent_shift: int = 0) -> FitReport:
    """Search increasing orders for an annihilating operator of the series.

    At each order the largest degree fitting the length budget is tried
    first; on success the degree is shrunk to the smallest that still has a
    kernel, which makes the (normalized) result canonical across primes.
    """
    report = _search(s, max_order, max_degree, None, margin, minimize_degree,
                     exponent_shift)
    if report is None:
        raise NoAnnihilatorFound(
            f"no annihilator with order <= {max_order}, degree <= {max_degree}")
    return report


def guess_inhom(s: PrimeSeries, max_order: int, max_degree: int,
                rhs: RhsAnsatz, margin: int = DEFAULT_MARGIN,
                minimize_degree: bool = True) -> FitReport:
    """Joint fit of operator and rhs multiplier polynomials.

    The kernel vector splits into the operator part and one coefficient
    vector per basis series; the relation L(s) = sum_t Q_t B_t is verified
    through every available term before returning.
    """
    report = _search(s, max_order, max_degree, rhs, margin, minimize_degree)
    if report is None:
        raise NoSolutionFound(
            f"no inhomogeneous fit with order <= {max_order}, degree <= {max_degree}")
    if report.operator.is_zero() or report.operator.order == 0:
        # relation uses no differential action: s is in the span of the bases
        raise DegenerateFit("operator part vanished: series lies in rhs span")
    return report


def _search(s, max_order, max_degree, rhs, margin, minimize_degree,
            exponent_shift=0):
    any_budget_ok = False
    m_lo = 0 if rhs is not None else 1
    for m in range(m_lo, max_order + 1):
        n_hi = s.order if rhs is None else min(s.order, rhs.min_order())
        avail = n_hi + 1
        extra = (len(rhs.bases) * (rhs.rhs_degree + 1)) if rhs else 0
        d = min(max_degree, (avail - margin - extra) // (m + 1) - 1)
        if d < 0:
            continue
        any_budget_ok = True
        basis, _, _ = _kernel_at(s, m, d, rhs, margin, exponent_shift)
        if not basis:
            continue
        if minimize_degree:
            # kernel nonemptiness is monotone in the degree cap
            lo, hi, best = 0, d, basis
            while lo < hi:
                mid = (lo + hi) // 2
                trial, _, _ = _kernel_at(s, m, mid, rhs, margin, exponent_shift)
                if trial:
                    best, hi = trial, mid
                else:
                    lo = mid + 1
            basis, d = best, hi
        report = _accept(s, m, d, rhs, basis, exponent_shift)
        if report is not None:
            return report
    if not any_budget_ok:
        raise InsufficientTerms(
            f"series order {s.order} cannot fund any fit within margin {margin}")
    return None


def _accept(s, m, d, rhs, basis, exponent_shift):
    op_rows, rhs_polys = _split_vector(basis[0], m, d, rhs)
    op = ThetaOperatorP(s.field, op_rows).normalized()
    if op.is_zero() and rhs is None:
        return None
    # verify through all available terms (rejects kernels that only fit
    # the truncated window)
    if rhs is None:
        if exponent_shift == 0 and not op.apply(s).is_zero():
            return None
        if exponent_shift != 0 and not _annihilates_shifted(op, s, exponent_shift):
            return None
        nb, dr = 0, 0
    else:
        n_hi = min(s.order, rhs.min_order())
        lhs = op.apply(s, upto=n_hi)
        comb = _rhs_combination(rhs, rhs_polys, n_hi)
        if any((lhs.coeff(n) - comb[n]) % s.field.p
               for n in range(n_hi + 1)):
            return None
        nb, dr = len(rhs.bases), rhs.rhs_degree
    return FitReport(op, rhs_polys, len(basis), budget(m, d, nb, dr),
                     s.order + 1)


def _annihilates_shifted(op, s, q):
    p = s.field.p
    for n in range(s.order + 1):
        acc = 0
        for j in range(min(n - s.offset, op.degree) + 1):
            c = s.coeff(n - j)
            if c == 0:
                continue
            base = (q + n - j) % p
            powv = 1
            for i in range(op.order + 1):
                aij = op.coeff(i, j)
                if aij:
                    acc += aij * powv % p * c
                powv = powv * base % p
        if acc % p:
            return False
    return True


def extend_series(op: ThetaOperatorP, seed: PrimeSeries,
                  rhs_coeffs: PrimeSeries | None, target_len: int) -> PrimeSeries:
    """Continue a series with the operator recursion up to order target_len.

    Solves A(n) c_n = e_n - sum_{j>=1,i} a_{i,j} (n-j)^i c_{n-j} for each n
    past the seed, where A is the indicial factor; the seed must cover the
    operator degree and every root of A in the target range.
    """
    if seed.field != op.field:
        raise FieldMismatch("seed and operator over different primes")
    p = op.field.p
    ind = op.indicial_coeffs()
    deg = op.degree

    c = {n: seed.coeff(n) for n in range(seed.offset, seed.order + 1)}
    known_to = seed.order

    def coeff_at(k):
        if k < seed.offset:
            return 0
        return c.get(k, 0)

    def rhs_at(n):
        if rhs_coeffs is None:
            return 0
        if rhs_coeffs.offset <= n <= rhs_coeffs.order:
            return rhs_coeffs.coeff(n)
        return 0

    for n in range(known_to + 1, target_len + 1):
        a_n = 0
        powv = 1
        base = n % p
        for i in range(len(ind)):
            a_n = (a_n + ind[i] * powv) % p
            powv = powv * base % p
        acc = 0
        for j in range(1, min(n - seed.offset, deg) + 1):
            ck = coeff_at(n - j)
            if ck == 0:
                continue
            b = (n - j) % p
            pw = 1
            for i in range(op.order + 1):
                aij = op.coeff(i, j)
                if aij:
                    acc += aij * pw % p * ck
                pw = pw * b % p
        acc %= p
        e_n = rhs_at(n)
        if a_n == 0:
            if (e_n - acc) % p == 0:
                raise IndicialObstruction(n, f"c_{n} underdetermined (A({n})=0)")
            raise IndicialObstruction(n, f"inconsistent at n={n} (A({n})=0)")
        c[n] = (e_n - acc) * pow(a_n, -1, p) % p

    if target_len < seed.offset:
        raise SeedTooShort("target below seed valuation")
    coeffs = [coeff_at(n) for n in range(seed.offset, target_len + 1)]
    return PrimeSeries(op.field, seed.var, seed.offset, coeffs)


# ---------------------------------------------------------------------------
# elliptic integral basis series


def _kseries_int(length: int) -> list[int]:
    """Integer coefficients of (2/pi) K(4w): binom(2n,n)^2 at w^(2n)."""
    out = [0] * (length + 1)
    b = 1  # binom(2n, n)
    for n in range(0, length // 2 + 1):
        if 2 * n <= length:
            out[2 * n] = b * b
        b = b * (2 * n + 1) * (2 * n + 2) // ((n + 1) * (n + 1))
    return out


def _eseries_int(length: int) -> list[int]:
    """Integer coefficients of (2/pi) E(4w): -binom(2n,n)^2/(2n-1) at w^(2n)."""
    out = [0] * (length + 1)
    b = 1
    for n in range(0, length // 2 + 1):
        if 2 * n <= length:
            if n == 0:
                out[0] = 1
            else:
                q, r = divmod(b * b, 2 * n - 1)
                assert r == 0
                out[2 * n] = -q
        b = b * (2 * n + 1) * (2 * n + 2) // ((n + 1) * (n + 1))
    return out


def kseries(field: PrimeField, length: int, var: str = "w") -> PrimeSeries:
    return PrimeSeries(field, var, 0, [c % field.p for c in _kseries_int(length)])


def eseries(field: PrimeField, length: int, var: str = "w") -> PrimeSeries:
    return PrimeSeries(field, var, 0, [c % field.p for c in _eseries_int(length)])


def elliptic_basis(field: PrimeField, length: int, kappa: int = 0,
                   var: str = "w") -> RhsAnsatz:
    """The five series w (1-16w^2)^max(3-t,0) K^(4-t) E^t / ((1+4w)^6 (1-16w^2)^kappa).

    K and E stand for the (2/pi)-normalized complete elliptic integrals of
    argument 4w, whose coefficients are integers, so the basis lives in any
    odd prime field.  rhs_degree on the returned ansatz is a placeholder 0;
    callers set it for their fit.
    """
    from .primefield import series_mul, series_pow, series_recip, series_scal

    p = field.p
    k = kseries(field, length, var)
    e = eseries(field, length, var)
    one_m16 = PrimeSeries(field, var, 0, [1, 0, -16 % p] + [0] * (length - 2))
    one_p4 = PrimeSeries(field, var, 0, [1, 4] + [0] * (length - 1))
    denom = series_pow(one_p4, 6, length)
    if kappa > 0:
        denom = series_mul(denom, series_pow(one_m16, kappa, length)).truncate(length)
    elif kappa < 0:
        raise ValueError("kappa must be nonnegative")
    inv_denom = series_recip(denom.truncate(length))
    w_fac = PrimeSeries(field, var, 1, [1] + [0] * (length - 1))

    bases = []
    for t in range(5):
        s = series_pow(k, 4 - t, length)
        if t:
            s = series_mul(s, series_pow(e, t, length)).truncate(length)
        m = max(3 - t, 0)
        if m:
            s = series_mul(s, series_pow(one_m16, m, length)).truncate(length)
        s = series_mul(s, inv_denom).truncate(length)
        s = series_mul(s, w_fac).truncate(length)
        bases.append((f"K{4 - t}E{t}", s))
    return RhsAnsatz(bases, 0)
