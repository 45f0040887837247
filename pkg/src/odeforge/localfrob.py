"""Local solution analysis at singular points of theta-form operators.

Frobenius solutions are built per congruence class of indicial exponents
(differences in Z), processing offsets upward.  Coefficients are
polynomials in lambda = ln(x): the operator acts on x^(rho+k) c(lambda) as
the Taylor-shifted indicial polynomial P_j(rho+k + d/dlambda), so a
resonant offset (indicial root of multiplicity mu) turns into mu formal
integrations in lambda — exactly where new logarithm levels and new basis
solutions appear.  The same machinery runs over exact rationals, prime
fields and arbitrary-precision complex coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import (DepthBudgetExceeded, InsufficientTerms, NoAnnihilator,
                     NoAnnihilatorFound, NoSplitRoot, NotComputable)
from .guess import ThetaOperatorP, budget as fit_budget, guess_ode
from .opalgebra import (BlockScheme, ThetaOperatorX, _stirling1,
                        rows_at_infinity, rows_recenter, rows_recenter_v,
                        rows_theta_to_d)
from .polytools import (GFp, QQ, RatFunc, pdivmod, peval, pis_zero, pmul,
                        pshift, ptrim, rank)
from .primefield import PrimeField, PrimeSeries

# ---------------------------------------------------------------------------
# frames


@dataclass
class LocalFrame:
    """Expansion point bookkeeping: x = direction*(w - center), or x = 1/w.

    kind: "rational" (exact center), "modp" (center only meaningful mod p),
    "infinity", or "algebraic" (an irrational center, which the exact path
    cannot expand at — that is the accidental-root route's job).
    """

    kind: str
    center: object = None
    direction: int = 1

    @classmethod
    def at(cls, center, direction: int = 1) -> "LocalFrame":
        return cls("rational", Fraction(center), direction)

    @classmethod
    def at_infinity(cls) -> "LocalFrame":
        return cls("infinity")

    @classmethod
    def at_modp(cls, w_p: int, direction: int = 1) -> "LocalFrame":
        return cls("modp", w_p, direction)

    @classmethod
    def algebraic(cls, minpoly) -> "LocalFrame":
        return cls("algebraic", list(minpoly))

    def label(self) -> str:
        if self.kind == "infinity":
            return "w=inf"
        if self.kind == "modp":
            return f"w=modp:{self.center}"
        if self.kind == "algebraic":
            return "w=algebraic"
        return f"w={self.center}"


def localize_v(op, frame: LocalFrame):
    """Local theta_x-form rows at the frame, over the operator's own field.

    Returns (rows, field, v) where x^v is the left factor the recentering
    introduced (inhomogeneous solves must shift their right-hand side by it).
    """
    if isinstance(op, ThetaOperatorP):
        F = GFp(op.field.p)
        rows = [list(r) for r in op.rows]
        if frame.kind == "modp":
            out, v = rows_recenter_v(F, rows, frame.center % op.field.p,
                                     frame.direction)
            return out, F, v
        if frame.kind == "rational":
            c = Fraction(frame.center)
            cp = c.numerator * pow(c.denominator, -1, op.field.p) % op.field.p
            if cp == 0 and frame.direction == 1:
                return rows, F, 0
            out, v = rows_recenter_v(F, rows, cp, frame.direction)
            return out, F, v
        if frame.kind == "infinity":
            return rows_at_infinity(F, rows), F, 0
        raise NotComputable("algebraic centers have no single mod-p image")
    if isinstance(op, ThetaOperatorX):
        rows = [list(r) for r in op.rows]
        if frame.kind == "rational":
            c = Fraction(frame.center)
            if c == 0 and frame.direction == 1:
                return rows, QQ, 0
            out, v = rows_recenter_v(QQ, rows, c, frame.direction)
            return out, QQ, v
        if frame.kind == "infinity":
            return rows_at_infinity(QQ, rows), QQ, 0
        raise NotComputable(
            "exact expansion at an irrational center: use accidental roots")
    raise TypeError(f"unsupported operator type {type(op)!r}")


def localize(op, frame: LocalFrame):
    rows, F, _ = localize_v(op, frame)
    return rows, F


def _strip_valuation(F, rows):
    """Remove a common x^v factor from all coefficient polynomials."""
    v = None
    for r in rows:
        if pis_zero(F, r):
            continue
        val = 0
        while val < len(r) and F.is_zero(r[val]):
            val += 1
        v = val if v is None else min(v, val)
        if v == 0:
            return rows
    if not v:
        return rows
    return [(r[v:] if not pis_zero(F, r) else list(r)) for r in rows]


# ---------------------------------------------------------------------------
# indicial data


@dataclass
class IndicialData:
    poly: list                       # indicial polynomial coefficients
    exponents: list                  # (root, multiplicity) pairs in the field
    irrational_factor: list | None   # leftover with no field roots

    def roots(self):
        return [r for r, _ in self.exponents]


def _int_divisors(n: int, cap: int = 10 ** 12) -> list[int]:
    n = abs(n)
    if n == 0:
        return [1]
    out = set()
    if n > cap:
        # desk-scale fallback: only small divisors are searched
        for d in range(1, 10 ** 4):
            if n % d == 0:
                out.add(d)
                if n // d <= 10 ** 4:
                    out.add(n // d)
        return sorted(out)
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def _rational_roots(poly):
    """Rational roots with multiplicity; returns (roots, leftover_factor)."""
    poly = ptrim(QQ, [Fraction(c) for c in poly])
    roots = []
    work = list(poly)
    mult0 = 0
    while len(work) > 1 and work[0] == 0:
        work = work[1:]
        mult0 += 1
    if mult0:
        roots.append((Fraction(0), mult0))
    if len(work) == 1:
        return roots, None
    den = 1
    for c in work:
        den = den * c.denominator // math.gcd(den, c.denominator)
    iw = [int(c * den) for c in work]
    g = 0
    for c in iw:
        g = math.gcd(g, abs(c))
    if g > 1:
        iw = [c // g for c in iw]
    cands = set()
    for pn in _int_divisors(iw[0]):
        for qd in _int_divisors(iw[-1]):
            f = Fraction(pn, qd)
            cands.add(f)
            cands.add(-f)
    for cand in sorted(cands):
        mult = 0
        while len(work) > 1 and peval(QQ, work, cand) == 0:
            work, rem = pdivmod(QQ, work, [-cand, Fraction(1)])
            assert pis_zero(QQ, rem)
            mult += 1
        if mult:
            roots.append((cand, mult))
        if len(work) == 1:
            break
    leftover = work if len(work) > 1 else None
    return roots, leftover


def _modp_roots(F: GFp, poly):
    roots = []
    work = ptrim(F, list(poly))
    for r in range(F.p):
        if len(work) == 1:
            break
        mult = 0
        while len(work) > 1 and peval(F, work, r) == 0:
            work, rem = pdivmod(F, work, [F.neg(r), 1])
            mult += 1
        if mult:
            roots.append((r, mult))
    leftover = work if len(work) > 1 else None
    return roots, leftover


def indicial(op, frame: LocalFrame) -> IndicialData:
    """Indicial polynomial and exponents at the frame's center."""
    rows, F = localize(op, frame)
    rows = _strip_valuation(F, rows)
    poly = ptrim(F, [r[0] if r else F.zero() for r in rows])
    if isinstance(F, GFp):
        exps, leftover = _modp_roots(F, poly)
    else:
        exps, leftover = _rational_roots(poly)
    return IndicialData(poly, exps, leftover)


# ---------------------------------------------------------------------------
# lambda-polynomial helpers (coefficient lists in lambda = ln x)


def _lam_trim(F, c):
    while len(c) > 1 and F.is_zero(c[-1]):
        c = c[:-1]
    return c if c else [F.zero()]


def _lam_is_zero(F, c):
    return all(F.is_zero(x) for x in c)


def _lam_add_into(F, acc, term):
    n = max(len(acc), len(term))
    return [F.add(acc[i] if i < len(acc) else F.zero(),
                  term[i] if i < len(term) else F.zero()) for i in range(n)]


def _lam_deriv(F, c):
    return [F.mul(F.from_int(i), c[i]) for i in range(1, len(c))] or [F.zero()]


def _shifted_apply(F, tau, c):
    """sum_m tau[m] (d/dlambda)^m applied to the lambda-polynomial c."""
    out = [F.zero()] * len(c)
    deriv = list(c)
    for m in range(len(tau)):
        if m > 0:
            deriv = _lam_deriv(F, deriv)
            if _lam_is_zero(F, deriv):
                break
        if F.is_zero(tau[m]):
            continue
        for i, d in enumerate(deriv):
            out[i] = F.add(out[i], F.mul(tau[m], d))
    return _lam_trim(F, out)


def _solve_unit(F, tau, rhs):
    """Solve sum_m tau[m] d^m c = rhs with tau[0] invertible (unique c)."""
    inv0 = F.inv(tau[0])
    c = [F.mul(inv0, x) for x in rhs]
    for _ in range(len(rhs) + 2):
        corr = [F.zero()] * len(c)
        deriv = list(c)
        for m in range(1, len(tau)):
            deriv = _lam_deriv(F, deriv)
            if _lam_is_zero(F, deriv):
                break
            if F.is_zero(tau[m]):
                continue
            for i, d in enumerate(deriv):
                corr[i] = F.add(corr[i], F.mul(tau[m], d))
        new = [F.mul(inv0, F.sub(rhs[i] if i < len(rhs) else F.zero(), corr[i]))
               for i in range(len(c))]
        if all(F.eq(a, b) for a, b in zip(new, c)):
            c = new
            break
        c = new
    return _lam_trim(F, c)


def _integrate_lambda(F, g, times):
    """`times`-fold antiderivative with the low-order constants zeroed."""
    c = list(g)
    for _ in range(times):
        c = [F.zero()] + [F.div(c[i], F.from_int(i + 1)) for i in range(len(c))]
    return c


# ---------------------------------------------------------------------------
# logarithmic solutions


@dataclass
class FreeParam:
    """A zeroed integration constant: adding alpha * `solution` to the owner
    spans the same leading behaviour (the basis choice is not unique)."""

    name: str
    offset: int
    level: int
    solution: "LogSolution | None" = None


@dataclass
class LogSolution:
    """x^exponent * sum_l parts[l](x) * ln(x)^l in the frame's local variable."""

    exponent: object
    parts: list[list]
    frame: LocalFrame | None = None
    free_params: list[FreeParam] = dc_field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.parts) - 1

    def top_series(self) -> list:
        return self.parts[-1]

    def truncation(self) -> int:
        return len(self.parts[0]) - 1


@dataclass
class FrobeniusBasis:
    solutions: list[LogSolution]
    scheme: BlockScheme
    frame: LocalFrame


def frobenius_solve(op, frame: LocalFrame, depth_budget: int = 4,
                    order_budget: int = 30, work_field=None) -> FrobeniusBasis:
    """Full (field-split) basis of formal solutions, grouped into log blocks.

    `work_field` overrides the coefficient field of the series parts (an
    MPC handle gives a numeric basis of an exact operator); resonance
    decisions always use the operator's exact field.  Free coefficients
    zeroed during construction are surfaced as named parameters pointing at
    the basis solution that carries each degree of freedom.
    """
    rows, F = localize(op, frame)
    rows = _strip_valuation(F, rows)
    degree = max(len(r) - 1 for r in rows)
    pj = []
    for j in range(degree + 1):
        pj.append(ptrim(F, [(r[j] if j < len(r) else F.zero()) for r in rows]))
    poly0 = pj[0]
    if isinstance(F, GFp):
        exps, _ = _modp_roots(F, poly0)
    else:
        exps, leftover = _rational_roots(poly0)
        if leftover is not None:
            raise NotComputable(
                "indicial polynomial has irrational roots; exact basis unavailable")
    W = work_field if work_field is not None else F

    classes = _congruence_classes(F, exps, order_budget)
    solutions = []
    blocks = []
    for base, offsets in classes:
        span = max(off for off, _ in offsets)
        budget = max(order_budget, span + 4)
        sols = _solve_class(F, W, pj, base, offsets, depth_budget, budget)
        for s in sols:
            s.frame = frame
        blocks.extend(_jordan_blocks(W, sols, budget))
        solutions.extend(sols)
    return FrobeniusBasis(solutions, BlockScheme(frame.label(), blocks), frame)


def _congruence_classes(F, exps, span):
    """Group indicial roots whose pairwise differences are integers <= span."""
    classes = []
    items = sorted(exps)
    used = [False] * len(items)
    if isinstance(F, GFp):
        def diff_ok(a, b):
            return (a - b) % F.p <= span or (b - a) % F.p <= span
    else:
        def diff_ok(a, b):
            return (a - b).denominator == 1

    for i, (r, m) in enumerate(items):
        if used[i]:
            continue
        group = [(r, m)]
        used[i] = True
        changed = True
        while changed:
            changed = False
            for j in range(len(items)):
                if used[j]:
                    continue
                r2, m2 = items[j]
                if any(diff_ok(r2, g) for g, _ in group):
                    group.append((r2, m2))
                    used[j] = True
                    changed = True
        if isinstance(F, GFp):
            base = None
            for g, _ in group:
                if all((g2 - g) % F.p <= span for g2, _ in group):
                    base = g
                    break
            if base is None:
                base = group[0][0]
            offsets = sorted(((g - base) % F.p, m) for g, m in group)
        else:
            base = min(g for g, _ in group)
            offsets = sorted((int(g - base), m) for g, m in group)
        classes.append((base, offsets))
    return classes


def _solve_class(F, W, pj, base, offsets, depth_budget, order_budget):
    """Basis solutions of one congruence class, offsets processed upward."""
    degree = len(pj) - 1
    same_field = W is F
    tau_exact_cache = {}
    tau_work_cache = {}

    def shift_point(t):
        if isinstance(F, GFp):
            return (base + t) % F.p
        return base + t

    def tau_exact(j, t):
        key = (j, t)
        if key not in tau_exact_cache:
            tau_exact_cache[key] = pshift(F, pj[j], shift_point(t))
        return tau_exact_cache[key]

    def tau_work(j, t):
        if same_field:
            return tau_exact(j, t)
        key = (j, t)
        if key not in tau_work_cache:
            tau_work_cache[key] = [W.from_int(c) for c in tau_exact(j, t)]
        return tau_work_cache[key]

    sols = []  # {'seed': (k, level), 'c': {k: lambda-poly}, 'free': [...]}
    for k in range(order_budget + 1):
        te = tau_exact(0, k)
        mu = 0
        while mu < len(te) and F.is_zero(te[mu]):
            mu += 1
        t0 = tau_work(0, k)
        for sol in sols:
            rhs = [W.zero()]
            for j in range(1, min(k - sol["seed"][0], degree) + 1):
                ck = sol["c"].get(k - j)
                if ck is None or _lam_is_zero(W, ck):
                    continue
                rhs = _lam_add_into(W, rhs, _shifted_apply(W, tau_work(j, k - j), ck))
            rhs = _lam_trim(W, [W.neg(x) for x in rhs])
            if _lam_is_zero(W, rhs):
                sol["c"][k] = [W.zero()]
            elif mu == 0:
                sol["c"][k] = _solve_unit(W, t0, rhs)
            else:
                g = _solve_unit(W, t0[mu:], rhs)
                c = _integrate_lambda(W, g, mu)
                if len(c) - 1 > depth_budget:
                    raise DepthBudgetExceeded(
                        f"log depth {len(c) - 1} at offset {k}")
                sol["c"][k] = _lam_trim(W, c)
            if mu > 0:
                for lvl in range(mu):
                    sol["free"].append(FreeParam(f"alpha[{k},{lvl}]", k, lvl))
        for lvl in range(mu):
            if lvl > depth_budget:
                raise DepthBudgetExceeded(f"seed log level {lvl} at offset {k}")
            seed = [W.zero()] * lvl + [W.one()]
            sols.append({"seed": (k, lvl), "c": {k: seed}, "free": []})

    out = []
    seed_index = {}
    for sol in sols:
        depth = max(len(c) - 1 for c in sol["c"].values())
        k0 = sol["seed"][0]
        width = order_budget - k0 + 1
        parts = [[W.zero()] * width for _ in range(depth + 1)]
        for k, c in sol["c"].items():
            for l, v in enumerate(c):
                parts[l][k - k0] = v
        while len(parts) > 1 and all(W.is_zero(x) for x in parts[-1]):
            parts.pop()
        ls = LogSolution(shift_point(k0), parts)
        ls.seed = sol["seed"]
        out.append(ls)
        seed_index[sol["seed"]] = ls
    for raw, ls in zip(sols, out):
        for fp in raw["free"]:
            fp.solution = seed_index.get((fp.offset, fp.level))
            ls.free_params.append(fp)
    return out


def _jordan_blocks(W, sols, budget):
    """BL block sizes of one class from the ranks of d/dlambda powers.

    Solutions are re-aligned to the class base (absolute offset = seed
    offset + relative index) so the lambda-derivative images stack in a
    common coordinate system.
    """
    if not sols:
        return []
    max_depth = max(s.depth for s in sols)
    if max_depth == 0:
        return [0] * len(sols)
    width = budget + 1

    def flat(sol, power):
        k0 = sol.seed[0]
        rows = []
        for l in range(max_depth + 1):
            src = l + power
            slot = [W.zero()] * width
            if src <= sol.depth:
                f = 1
                for t in range(l + 1, src + 1):
                    f *= t
                fw = W.from_int(f)
                for k, v in enumerate(sol.parts[src]):
                    if k0 + k < width and not W.is_zero(v):
                        slot[k0 + k] = W.mul(fw, v)
            rows.extend(slot)
        return rows

    ranks = [len(sols)]
    for power in range(1, max_depth + 3):
        mat = [flat(s, power) for s in sols]
        ranks.append(rank(W, mat))
    blocks = []
    for n in range(max_depth + 1):
        r_n = ranks[n]
        r_n1 = ranks[n + 1] if n + 1 < len(ranks) else 0
        r_n2 = ranks[n + 2] if n + 2 < len(ranks) else 0
        blocks.extend([n] * (r_n - 2 * r_n1 + r_n2))
    return blocks


def apply_log_series(op, sol: LogSolution, frame: LocalFrame | None = None,
                     work_field=None) -> LogSolution:
    """Apply the operator to a log-solution by direct series manipulation.

    Independent of the Frobenius recursion: theta acts on x^s ln^l as
    s x^s ln^l + l x^s ln^(l-1); the apply-to-zero oracle for generated
    bases (nonzero output only past the truncation order).
    """
    frame = frame or sol.frame
    rows, F = localize(op, frame)
    rows = _strip_valuation(F, rows)
    W = work_field if work_field is not None else F
    same = W is F
    depth = sol.depth
    width = len(sol.parts[0])
    q = sol.exponent

    def qk(k):
        if isinstance(F, GFp):
            return (q + k) % F.p
        return W.from_int(q + k) if not same else q + k

    cur = [list(p[:width]) + [W.zero()] * (width - len(p[:width]))
           for p in sol.parts]
    powers = [cur]
    for _ in range(len(rows) - 1):
        prev = powers[-1]
        nxt = [[W.zero()] * width for _ in range(depth + 1)]
        for l in range(depth + 1):
            for k in range(width):
                v = prev[l][k]
                if W.is_zero(v):
                    continue
                nxt[l][k] = W.add(nxt[l][k], W.mul(qk(k), v))
                if l > 0:
                    nxt[l - 1][k] = W.add(nxt[l - 1][k], W.mul(W.from_int(l), v))
        powers.append(nxt)
    out = [[W.zero()] * width for _ in range(depth + 1)]
    for i, row in enumerate(rows):
        for j, aij in enumerate(row):
            if F.is_zero(aij):
                continue
            a = aij if same else W.from_int(aij)
            src = powers[i]
            for l in range(depth + 1):
                for k in range(width - j):
                    v = src[l][k]
                    if not W.is_zero(v):
                        out[l][k + j] = W.add(out[l][k + j], W.mul(a, v))
    return LogSolution(sol.exponent, out, frame)


# ---------------------------------------------------------------------------
# factor probing


@dataclass
class ProbeHit:
    operator: ThetaOperatorP
    alpha: int | None = None


def probe_right_factor(opP: ThetaOperatorP, sol, max_order: int,
                       max_degree: int | None = None, margin: int = 6,
                       sweep: FreeParam | None = None) -> ProbeHit | None:
    """Annihilator search on a local solution's top-log series.

    Returns the minimal-order operator of order < order(opP) annihilating
    x^exponent * (top series), or None.  With `sweep` the one-parameter
    family sol + alpha * sweep.solution is searched over every alpha mod p.
    """
    field = opP.field
    cap = max_degree if max_degree is not None else max(opP.degree, 1)
    limit = min(max_order, opP.order - 1)
    if limit < 1:
        return None
    candidates = [(None, sol)] if sweep is None else \
        [(a, _combine(field, sol, a, sweep.solution)) for a in range(field.p)]
    for alpha, cand in candidates:
        series, shift = _top_series(field, cand)
        if series is None:
            continue
        try:
            rep = guess_ode(series, limit, cap, margin=margin,
                            exponent_shift=shift)
        except (NoAnnihilatorFound, InsufficientTerms):
            continue
        return ProbeHit(rep.operator, alpha)
    return None


def _combine(field, a: LogSolution, alpha: int, b: LogSolution | None):
    """a + alpha*b as mod-p log solutions sharing a frame."""
    if b is None or alpha == 0:
        return a
    p = field.p
    off = (b.exponent - a.exponent) % p
    depth = max(a.depth, b.depth)
    width = len(a.parts[0])
    if off > width:
        return a
    parts = []
    for l in range(depth + 1):
        row = list(a.parts[l][:width]) if l <= a.depth else [0] * width
        row += [0] * (width - len(row))
        if l <= b.depth:
            for k, v in enumerate(b.parts[l]):
                if k + off < width:
                    row[k + off] = (row[k + off] + alpha * v) % p
        parts.append(row)
    return LogSolution(a.exponent, parts, a.frame)


def _top_series(field, sol):
    """Top-log part as a PrimeSeries plus its exponent shift, or (None, 0)."""
    if isinstance(sol, PrimeSeries):
        return sol, 0
    top = sol.top_series()
    if all(v % field.p == 0 for v in top):
        return None, 0
    q = sol.exponent
    if isinstance(q, Fraction):
        q = q.numerator * pow(q.denominator, -1, field.p)
    return PrimeSeries(field, "x", 0, list(top)), q % field.p


# ---------------------------------------------------------------------------
# right factors at irrational singular points (accidental mod-p roots)


def split_roots(h: list[int], field: PrimeField) -> list[int]:
    """Simple roots of the exact polynomial h modulo p."""
    F = GFp(field.p)
    hp = ptrim(F, [c % field.p for c in h])
    if len(hp) == 1:
        return []
    dhp = ptrim(F, [(i * h[i]) % field.p for i in range(1, len(h))])
    return [r for r in range(field.p)
            if peval(F, hp, r) == 0 and peval(F, dhp, r) != 0]


def accidental_root_factor(opP: ThetaOperatorP, h: list[int],
                           max_order: int | None = None,
                           max_degree: int | None = None,
                           root: int | None = None,
                           margin: int = 6,
                           order_budget: int | None = None) -> ThetaOperatorP:
    """Right factor extracted at an accidental mod-p root of the head factor h.

    Recenters at x = w - w_p for a simple root w_p of h mod p, probes the
    local solutions for a low-order annihilator L_M(x), then renormalizes:
    the d/dx-form head x^M f0(x) carries the factor x^(M-K) h(w)^K, the
    w_p-dependent x^(M-K) part is divided out together with the w=0
    normalization constant, and the theta_w-form scaled to head(0) = 1 is
    returned — a w_p-independent mod-p operator ready for cross-prime
    rational reconstruction.
    """
    field = opP.field
    p = field.p
    F = GFp(p)
    roots = split_roots(h, field)
    if not roots:
        raise NoSplitRoot(f"head factor has no simple root mod {p}")
    w_p = root if root is not None else roots[0]
    if w_p not in roots:
        raise NoSplitRoot(f"{w_p} is not a simple root of h mod {p}")

    cap = max_degree if max_degree is not None else max(opP.degree, 1)
    lim = max_order if max_order is not None else opP.order - 1
    need = fit_budget(lim, cap) + margin + opP.degree + 2
    budget_terms = order_budget if order_budget is not None else need
    frame = LocalFrame.at_modp(w_p)
    basis = frobenius_solve(opP, frame, order_budget=budget_terms)
    hit = None
    for sol in sorted(basis.solutions, key=lambda s: -s.depth):
        hit = probe_right_factor(opP, sol, lim, max_degree=cap, margin=margin)
        if hit is not None:
            break
    if hit is None:
        raise NoAnnihilator(f"no annihilator of order < {opP.order} at w_p={w_p}")

    lm = hit.operator
    m = lm.order
    drows = rows_theta_to_d(F, [list(r) for r in lm.rows])
    h_local = pshift(F, [c % p for c in h], w_p)  # h(x + w_p), root at x=0
    k_mult = 0
    work = list(drows[m])
    while True:
        q, r = pdivmod(F, work, h_local)
        if pis_zero(F, r) and not pis_zero(F, q):
            work, k_mult = q, k_mult + 1
        else:
            break
    if k_mult == 0:
        raise NoAnnihilator("probed annihilator head carries no h factor")

    # to w coordinates (x = w - w_p), divide by (w - w_p)^(M-K), read off
    # theta_w coefficients: theta^i picks sum_k c_k(w) w^{-k} s1[k][i]
    drows_w = [pshift(F, b, F.neg(w_p)) for b in drows]
    pw = [F.one()]
    lin = [F.neg(w_p), F.one()]
    for _ in range(m - k_mult):
        pw = pmul(F, pw, lin)
    rat = [RatFunc(F, b, pw) for b in drows_w]
    s1 = _stirling1(m)
    theta_coeffs = [RatFunc.const(F, F.zero()) for _ in range(m + 1)]
    wrf = RatFunc.from_poly(F, [F.zero(), F.one()])
    wpow = RatFunc.const(F, F.one())
    for k in range(m + 1):
        if k > 0:
            wpow = wpow * wrf
        ck = rat[k] / wpow
        for i, sv in enumerate(s1[k]):
            if sv:
                theta_coeffs[i] = theta_coeffs[i] + ck * RatFunc.const(
                    F, F.from_int(sv))
    rows = []
    for c in theta_coeffs:
        if not c.is_poly():
            raise NoAnnihilator(
                "renormalized operator is not polynomial: spurious probe hit")
        rows.append(c.as_poly())
    out = ThetaOperatorP(field, rows)
    head0 = out.rows[-1][0] if out.rows[-1] else 0
    if head0 == 0:
        raise NoAnnihilator("renormalized head vanishes at w=0")
    inv = pow(head0, -1, p)
    return ThetaOperatorP(field, [[c * inv % p for c in r] for r in out.rows])
