"""Arithmetic in F_p and its extensions F_{p^l}.

A field context fixes the prime p, the degree l and a monic irreducible
modulus of degree l over F_p.  An element is represented by its *index*:
the element with power-basis coefficients (c_0, ..., c_{l-1}) has index
c_0 + c_1*p + ... + c_{l-1}*p^(l-1).  Index 0 is zero and index 1 is one;
indices below p are exactly the prime subfield.  All context operations
take and return indices, which keeps points hashable and lets bulk code
work on numpy arrays of indices via the precomputed tables.

Univariate polynomials over F_p appear in two roles (moduli and minimal
polynomials); they are plain tuples of ints, low-to-high, with no trailing
zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import BoundViolated, DegreeZero, NonPrime

PRIME_LIMIT = 1 << 31
ORDER_LIMIT = 1 << 40  # keeps point indices of F_q^n in 64-bit range
TABLE_LIMIT = 1 << 16  # no exp/log tables above this field size

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin, valid far beyond the p < 2^31 we allow."""
    if n < 2:
        return False
    for sp in _MR_BASES:
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
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


def prime_factors(n):
    """Sorted distinct prime factors by trial division (n <= 2^40 here)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# dense univariate polynomials over F_p: tuples, low-to-high, trimmed


def poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(a, b, p):
    n = max(len(a), len(b))
    return poly_trim(((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p
                     for i in range(n))


def poly_sub(a, b, p):
    n = max(len(a), len(b))
    return poly_trim(((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
                     for i in range(n))


def poly_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return poly_trim(out)


def poly_divmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    inv_lead = pow(b[-1], p - 2, p)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv_lead % p
        if c:
            q[i] = c
            for j, bj in enumerate(b):
                a[i + j] = (a[i + j] - c * bj) % p
    return poly_trim(q), poly_trim(a)


def poly_mod(a, b, p):
    return poly_divmod(a, b, p)[1]


def poly_gcd(a, b, p):
    while b:
        a, b = b, poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = poly_trim(c * inv % p for c in a)
    return a


def poly_powmod(base, e, mod, p):
    result = (1,)
    base = poly_mod(base, mod, p)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base, p), mod, p)
        base = poly_mod(poly_mul(base, base, p), mod, p)
        e >>= 1
    return result


def poly_eval(f, x, p):
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def _is_irreducible(f, p):
    """Degree-l monic f is irreducible iff x^(p^l) = x mod f and
    gcd(x^(p^(l/t)) - x, f) = 1 for every prime t | l.

    The divisor-gcd conditions alone are not enough (a degree-8 product of
    irreducibles of degrees 3 and 5 passes them); the x^(p^l) = x check
    forces every factor degree to divide l.
    """
    ell = len(f) - 1
    x = (0, 1)
    xq = poly_powmod(x, p**ell, f, p)
    if poly_sub(xq, x, p):
        return False
    for t in prime_factors(ell):
        xd = poly_powmod(x, p ** (ell // t), f, p)
        if poly_gcd(poly_sub(xd, x, p), f, p) != (1,):
            return False
    return True


def _smallest_irreducible(p, ell):
    """Lexicographically first monic irreducible of degree ell over F_p,
    comparing coefficient vectors (c_0, ..., c_{ell-1})."""
    if ell == 1:
        return (0, 1)  # the polynomial x
    for idx in range(p**ell):
        coeffs = []
        t = idx
        for _ in range(ell):
            coeffs.append(t % p)
            t //= p
        f = tuple(coeffs) + (1,)
        if _is_irreducible(f, p):
            return f
    raise AssertionError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------


class FieldCtx:
    """Immutable context for F_{p^ell}; all element operations are pure.

    Elements are integer indices (see module docstring).  Scalar operations
    work for any allowed size; the numpy table accessors require
    q <= TABLE_LIMIT and exist for bulk index arithmetic.  The lazily built
    tables are internal idempotent caches, so sharing a context between
    workers stays safe.
    """

    def __init__(self, p, ell, modulus=None):
        if ell < 1:
            raise DegreeZero(f"extension degree must be >= 1, got {ell}")
        if not isinstance(p, int) or p < 2 or not is_prime(p):
            raise NonPrime(f"{p} is not prime")
        if p >= PRIME_LIMIT:
            raise NonPrime(f"p must be < 2^31, got {p}")
        if p**ell > ORDER_LIMIT:
            raise DegreeZero(f"field order p^ell must be <= 2^40, got {p}^{ell}")
        self.p = p
        self.ell = ell
        self.q = p**ell
        if modulus is None:
            modulus = _smallest_irreducible(p, ell)
        else:
            modulus = poly_trim(modulus)
            if len(modulus) != ell + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree ell")
            if not _is_irreducible(modulus, p):
                raise ValueError("modulus is not irreducible")
        self.modulus = modulus
        self._pp = tuple(p**i for i in range(ell))
        # x^ell reduced mod modulus, used by schoolbook reduction
        self._xell = poly_trim((-c) % p for c in modulus[:-1])
        self._exp = None
        self._log = None
        self._frob = None
        self._deg = None
        self._mulc = {}
        self._powt = {}

    # -- conversions --------------------------------------------------------

    def coeffs(self, a):
        out = []
        for _ in range(self.ell):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def element(self, coeffs):
        a = 0
        for c, pk in zip(coeffs, self._pp):
            a += (c % self.p) * pk
        return a

    def elements(self):
        return range(self.q)

    # -- scalar arithmetic on indices ---------------------------------------

    def add(self, a, b):
        p = self.p
        out = 0
        for pk in self._pp:
            out += ((a % p + b % p) % p) * pk
            a //= p
            b //= p
        return out

    def neg(self, a):
        p = self.p
        out = 0
        for pk in self._pp:
            out += (-a % p) * pk
            a //= p
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self.q <= TABLE_LIMIT:
            exp, log = self._exp_log()
            return int(exp[(log[a] + log[b]) % (self.q - 1)])
        prod_ = poly_mul(self.coeffs(a), self.coeffs(b), self.p)
        return self.element(self._reduce(prod_))

    def _reduce(self, c):
        p, ell = self.p, self.ell
        c = list(c) + [0] * max(0, ell - len(c))
        for i in range(len(c) - 1, ell - 1, -1):
            hi = c[i]
            if hi:
                c[i] = 0
                for j, r in enumerate(self._xell):
                    c[i - ell + j] = (c[i - ell + j] + hi * r) % p
        return tuple(c[:ell])

    def inv(self, a):
        """Extended Euclid on polynomials (no table lookup needed)."""
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        p = self.p
        r0, r1 = self.modulus, poly_trim(self.coeffs(a))
        s0, s1 = (), (1,)
        while r1:
            q, r = poly_divmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, poly_sub(s0, poly_mul(q, s1, p), p)
        # r0 is a unit constant
        c = pow(r0[0], p - 2, p)
        return self.element(poly_trim(x * c % p for x in s0))

    def pow(self, a, e):
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 0 if e else 1
        if self.q <= TABLE_LIMIT:
            exp, log = self._exp_log()
            return int(exp[(int(log[a]) * e) % (self.q - 1)])
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def frobenius(self, a):
        return self.pow(a, self.p)

    def order(self, a):
        """Multiplicative order of a nonzero element."""
        if a == 0:
            raise ZeroDivisionError("order of zero")
        n = self.q - 1
        for r in prime_factors(n):
            while n % r == 0 and self._pow_slow(a, n // r) == 1:
                n //= r
        return n

    def _pow_slow(self, a, e):
        # table-free, used while bootstrapping the tables themselves
        result = 1
        while e:
            if e & 1:
                result = self._mul_slow(result, a)
            a = self._mul_slow(a, a)
            e >>= 1
        return result

    def multiplicative_generator(self):
        for a in range(1, self.q):
            if self.order(a) == self.q - 1:
                return a
        raise AssertionError("multiplicative group not cyclic")  # unreachable

    def subfield_degree(self, a):
        for d in sorted(_divisors(self.ell)):
            if self.pow(a, self.p**d) == a:
                return d
        raise AssertionError("element not fixed by full Frobenius power")

    def join_degree(self, elems):
        """Degree over F_p of the subfield generated by a set of elements."""
        return lcm(1, *(self.subfield_degree(a) for a in elems))

    # -- numpy tables (q <= TABLE_LIMIT) -------------------------------------

    def _exp_log(self):
        if self._exp is None:
            if self.q > TABLE_LIMIT:
                raise ValueError("field too large for exp/log tables")
            g = self.multiplicative_generator()
            exp = np.empty(2 * (self.q - 1), dtype=np.int64)
            x = 1
            for i in range(self.q - 1):
                exp[i] = x
                x = self._mul_slow(x, g)
            exp[self.q - 1:] = exp[: self.q - 1]
            log = np.zeros(self.q, dtype=np.int64)
            log[exp[: self.q - 1]] = np.arange(self.q - 1)
            self._exp, self._log = exp, log
        return self._exp, self._log

    def _mul_slow(self, a, b):
        prod_ = poly_mul(self.coeffs(a), self.coeffs(b), self.p)
        return self.element(self._reduce(prod_))

    def mul_arrays(self, A, B):
        exp, log = self._exp_log()
        out = exp[(log[A] + log[B]) % (self.q - 1)]
        return np.where((A == 0) | (B == 0), 0, out)

    def mul_const_table(self, c):
        t = self._mulc.get(c)
        if t is None:
            if c == 0:
                t = np.zeros(self.q, dtype=np.int64)
            else:
                exp, log = self._exp_log()
                t = np.concatenate(([0], exp[(log[1:self.q] + log[c]) % (self.q - 1)]))
            self._mulc[c] = t
        return t

    def pow_table(self, e):
        t = self._powt.get(e)
        if t is None:
            exp, log = self._exp_log()
            t = np.concatenate(([1 if e == 0 else 0],
                                exp[(log[1:self.q] * e) % (self.q - 1)]))
            self._powt[e] = t
        return t

    def frob_table(self):
        if self._frob is None:
            self._frob = self.pow_table(self.p)
        return self._frob

    def add_arrays(self, A, B):
        p = self.p
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        out = np.zeros_like(A)
        for pk in self._pp:
            out += ((A % p + B % p) % p) * pk
            A = A // p
            B = B // p
        return out

    def neg_table(self):
        return self.mul_const_table(self.p - 1)  # p-1 is the index of -1

    def subfield_degree_table(self):
        if self._deg is None:
            frob = self.frob_table()
            deg = np.zeros(self.q, dtype=np.int64)  # 0 = not yet decided
            img = np.arange(self.q)
            prev = 0
            for d in _divisors(self.ell):
                for _ in range(d - prev):
                    img = frob[img]
                prev = d
                fixed = (img == np.arange(self.q)) & (deg == 0)
                deg[fixed] = d
            self._deg = deg
        return self._deg

    # -- misc ----------------------------------------------------------------

    def serialize(self):
        mods = ",".join(str(c) for c in self.modulus)
        return f"p={self.p} ell={self.ell} mod={mods}"

    def __repr__(self):
        return f"FieldCtx(p={self.p}, ell={self.ell}, modulus={self.modulus})"

    def __eq__(self, other):
        return (isinstance(other, FieldCtx)
                and (self.p, self.ell, self.modulus) == (other.p, other.ell, other.modulus))

    def __hash__(self):
        return hash((self.p, self.ell, self.modulus))


def _divisors(n):
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


def solve_mod_p(rows, rhs, p):
    """Solve A x = b over F_p by Gaussian elimination.

    rows is a list of equal-length lists (the matrix A), rhs the right-hand
    side.  Returns one solution as a list, or None if inconsistent.  Free
    variables are set to 0.
    """
    m = [list(r) + [b % p] for r, b in zip(rows, rhs)]
    nrows, ncols = len(m), len(m[0]) - 1
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, nrows) if m[r][col] % p), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = pow(m[row][col], p - 2, p)
        m[row] = [x * inv % p for x in m[row]]
        for r in range(nrows):
            if r != row and m[r][col] % p:
                c = m[r][col]
                m[r] = [(x - c * y) % p for x, y in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    for r in range(row, nrows):
        if m[r][-1] % p:
            return None
    x = [0] * ncols
    for r, col in enumerate(pivots):
        x[col] = m[r][-1] % p
    return x


def make_field(p, ell):
    """Field context with the deterministically chosen smallest modulus."""
    return FieldCtx(p, ell)


def frobenius(ctx, a):
    return ctx.frobenius(a)


def generated_subfield_degree(ctx, a):
    return ctx.subfield_degree(a)


def minimal_polynomial(ctx, a):
    """Monic minimal polynomial of a over F_p, as a low-to-high tuple.

    Computed as the product of (y - conj) over the Frobenius orbit; the
    result always has prime-field coefficients.
    """
    conjugates = [a]
    x = ctx.frobenius(a)
    while x != a:
        conjugates.append(x)
        x = ctx.frobenius(x)
    # product of (y - c) with coefficients in the big field
    coeffs = [1]  # monic, low-to-high in y with field-element entries
    for c in conjugates:
        nxt = [0] * (len(coeffs) + 1)
        for i, t in enumerate(coeffs):
            nxt[i + 1] = ctx.add(nxt[i + 1], t)
            nxt[i] = ctx.sub(nxt[i], ctx.mul(c, t))
        coeffs = nxt
    for t in coeffs:
        if t >= ctx.p:
            raise AssertionError("minimal polynomial has non-prime-field coefficient")
    return poly_trim(coeffs)


@dataclass
class CountLemmaReport:
    """Exhaustive check that for every nonzero gamma, the proportion of
    alpha with F_p(alpha^N * gamma) = F_q is at least 1 - N/p."""
    p: int
    ell: int
    N: int
    worst_proportion: Fraction
    bound: Fraction
    holds: bool


def verify_count_lemma(ctx, N):
    if not (1 <= N < ctx.p):
        raise ValueError("need p > N >= 1")
    q = ctx.q
    deg = ctx.subfield_degree_table()
    powN = ctx.pow_table(N)
    worst = Fraction(1)
    if ctx.ell == 1:
        worst = Fraction(1)  # F_p(anything) = F_p
    else:
        alphaN = powN  # alpha^N for alpha = 0..q-1
        exp, log = ctx._exp_log()
        logs = log[alphaN[1:]]  # alpha != 0 handled apart; alpha = 0 always fails
        for gamma in range(1, q):
            t = exp[(logs + log[gamma]) % (q - 1)]
            count = int(np.count_nonzero(deg[t] == ctx.ell))
            worst = min(worst, Fraction(count, q))
    bound = Fraction(ctx.p - N, ctx.p)
    holds = worst >= bound
    if not holds:
        raise BoundViolated(
            f"count lemma failed: worst {worst} < bound {bound} for q={q}, N={N}")
    return CountLemmaReport(ctx.p, ctx.ell, N, worst, bound, holds)


@dataclass
class EnlargeLemmaReport:
    """Exhaustive check of the two unit-enlargement statements: part (i)
    existence of lambda in F_p(alpha^N) keeping the generated field at least
    as large, part (ii) strict growth whenever its hypothesis holds."""
    p: int
    ell: int
    N: int
    triples_checked: int
    part_ii_instances: int
    holds: bool


def verify_enlarge_lemma(ctx, N):
    if not (1 <= N < ctx.p):
        raise ValueError("need p > N >= 1")
    p, q, ell = ctx.p, ctx.q, ctx.ell
    deg = ctx.subfield_degree_table()
    # elements of the subfield F_{p^d} are those whose degree divides d
    subfield = {d: [a for a in range(q) if d % deg[a] == 0] for d in _divisors(ell)}
    betas = np.arange(q, dtype=np.int64)
    triples = 0
    part_ii = 0
    for alpha in range(1, q):
        aN = ctx.pow(alpha, N)
        d_a = deg[aN]
        lam_pool = subfield[int(d_a)]
        for k in range(N):
            ak = ctx.pow(alpha, k)
            triples += q
            # part (i): exists lambda with deg((beta + lambda*alpha^k)^N) >= d_a
            pending = np.ones(q, dtype=bool)
            strict_pending = None
            # part (ii) hypothesis per beta
            bN = ctx.pow_table(N)[betas]
            akbN1 = ctx.mul_arrays(np.full(q, ak, dtype=np.int64),
                                   ctx.pow_table(N - 1)[betas])
            join = np.lcm(np.int64(d_a), np.lcm(deg[bN], deg[akbN1]))
            hyp = join > d_a
            part_ii += int(np.count_nonzero(hyp))
            strict_pending = hyp.copy()
            for lam in lam_pool:
                if not pending.any() and not strict_pending.any():
                    break
                shifted = ctx.add_arrays(betas, np.full(q, ctx.mul(lam, ak), dtype=np.int64))
                dN = deg[ctx.pow_table(N)[shifted]]
                pending &= ~(dN >= d_a)
                strict_pending &= ~(dN > d_a)
            if pending.any():
                b = int(np.flatnonzero(pending)[0])
                raise BoundViolated(
                    f"enlarge lemma (i) failed at q={q}, N={N}, alpha={alpha}, beta={b}, k={k}")
            if strict_pending.any():
                b = int(np.flatnonzero(strict_pending)[0])
                raise BoundViolated(
                    f"enlarge lemma (ii) failed at q={q}, N={N}, alpha={alpha}, beta={b}, k={k}")
    return EnlargeLemmaReport(p, ell, N, triples, part_ii, True)
